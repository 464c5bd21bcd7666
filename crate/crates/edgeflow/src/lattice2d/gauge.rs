use serde::Serialize;

use crate::linalg::{self, c, CMat, C64};

/// Nearest-neighbour scalar chain on sites `0..len`; `hoppings[j] = H_{j,j+1}`.
#[derive(Clone, Debug)]
pub struct ScalarChain {
    pub onsite: Vec<f64>,
    pub hoppings: Vec<C64>,
}

impl ScalarChain {
    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn matrix(&self) -> CMat {
        let n = self.len();
        let mut m = linalg::real_diag(&self.onsite);
        for (j, &h) in self.hoppings.iter().enumerate().take(n.saturating_sub(1)) {
            m[(j, j + 1)] = h;
            m[(j + 1, j)] = h.conj();
        }
        m
    }
}

/// `2·cells` sites alternating `J1`, `J2`, with the given on-site potential.
pub fn ssh_scalar_chain(j1: C64, j2: C64, onsite: Vec<f64>) -> ScalarChain {
    let hoppings = (0..onsite.len().saturating_sub(1)).map(|j| if j % 2 == 0 { j1 } else { j2 }).collect();
    ScalarChain { onsite, hoppings }
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeResult {
    /// `A_j` with `A_0 = 0`.
    pub phases: Vec<f64>,
    #[serde(skip)]
    pub stripped: ScalarChain,
}

impl GaugeResult {
    /// `U = diag(e^{iA_j})`.
    pub fn unitary(&self) -> CMat {
        let n = self.phases.len();
        let mut u = linalg::zeros(n, n);
        for (j, &a) in self.phases.iter().enumerate() {
            u[(j, j)] = C64::cis(a);
        }
        u
    }
}

/// Finds `U` with `U† H U` carrying hoppings `|H_{j,j+1}|`.
pub fn gauge_transform(chain: &ScalarChain) -> GaugeResult {
    let mut phases = vec![0.0; chain.len()];
    for j in 1..chain.len() {
        let h = chain.hoppings[j - 1];
        phases[j] = phases[j - 1] - if h == c(0.0, 0.0) { 0.0 } else { h.arg() };
    }
    let stripped = ScalarChain {
        onsite: chain.onsite.clone(),
        hoppings: chain.hoppings.iter().map(|h| c(h.norm(), 0.0)).collect(),
    };
    GaugeResult { phases, stripped }
}
