//! Number formatting shared by every CSV writer.

/// Scientific notation with 17 significant digits; round-trips any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
