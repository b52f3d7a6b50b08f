//! Occupations, currents and transport efficiency extracted from a density matrix.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dynamics::DensityMatrix;
use crate::lattice::{Drive, LatticeSpec};

/// Below this input current the efficiency is reported as zero and flagged.
pub const CURRENT_FLOOR: f64 = 1e-14;

/// Which sites count as the "bulk-in" region of the chain-count sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BulkInMode {
    /// Rows 2..L−1, every column.
    #[default]
    InteriorRows,
    /// Rows 2..L−1 and columns 2..N−1.
    InteriorRowsAndColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyReport {
    /// `[chain, site]`, zero-based.
    pub p_sites: Array2<f64>,
    pub p_c: f64,
    pub p_11: f64,
    pub p_n: f64,
    pub p_bulk: f64,
    pub p_bulk_in: f64,
    pub i_in: f64,
    pub i_out: f64,
    pub eta: f64,
    /// Set when the input current fell below [`CURRENT_FLOOR`].
    pub eta_floored: bool,
    pub flux_residual: f64,
}

/// Site occupations `[chain, site]` and photon number.
pub fn occupations(rho: &DensityMatrix, spec: &LatticeSpec) -> (Array2<f64>, f64) {
    let m = &rho.matrix;
    let p = Array2::from_shape_fn((spec.l, spec.n), |(k, i)| {
        let s = k * spec.n + i + 1;
        m[[s, s]].re
    });
    let p_c = spec.cavity_index().map_or(0.0, |c| m[[c, c]].re);
    (p, p_c)
}

pub fn input_current(rho: &DensityMatrix, spec: &LatticeSpec) -> f64 {
    let m = &rho.matrix;
    let mut current = 2.0 * spec.xi_t * m[[0, 1]].im;
    if spec.drive == Drive::TlsCavity {
        if let Some(c) = spec.cavity_index() {
            current += 2.0 * spec.xi_c * m[[0, c]].im;
        }
    }
    current
}

fn last_column(p_sites: &Array2<f64>) -> f64 {
    p_sites.column(p_sites.ncols() - 1).sum()
}

pub fn outgoing_current(rho: &DensityMatrix, spec: &LatticeSpec) -> f64 {
    let (p, _) = occupations(rho, spec);
    spec.gamma_r * last_column(&p)
}

/// `(η, floored)`.
pub fn efficiency(i_in: f64, i_out: f64) -> (f64, bool) {
    if i_in <= CURRENT_FLOOR {
        (0.0, true)
    } else {
        (i_out / i_in, false)
    }
}

fn interior(len: usize) -> std::ops::Range<usize> {
    // Zero-based indices 1..len−1 are the one-based interior 2..len−1.
    if len >= 3 {
        1..len - 1
    } else {
        0..0
    }
}

pub fn bulk_in(p_sites: &Array2<f64>, mode: BulkInMode) -> f64 {
    let (l, n) = p_sites.dim();
    let cols = match mode {
        BulkInMode::InteriorRows => 0..n,
        BulkInMode::InteriorRowsAndColumns => interior(n),
    };
    interior(l)
        .flat_map(|k| cols.clone().map(move |i| (k, i)))
        .map(|(k, i)| p_sites[[k, i]])
        .sum()
}

pub fn report(rho: &DensityMatrix, spec: &LatticeSpec, mode: BulkInMode) -> SteadyReport {
    let (p, p_c) = occupations(rho, spec);
    let i_in = input_current(rho, spec);
    let p_n = last_column(&p);
    let i_out = spec.gamma_r * p_n;
    let (eta, eta_floored) = efficiency(i_in, i_out);
    let p_bulk = p
        .rows()
        .into_iter()
        .map(|r| interior(spec.n).map(|i| r[i]).sum::<f64>())
        .sum();
    let lost = spec.gamma_d * p.sum() + spec.kappa_eff() * p_c + spec.gamma_r * p_n;
    SteadyReport {
        p_11: p[[0, 0]],
        p_bulk,
        p_bulk_in: bulk_in(&p, mode),
        p_n,
        p_c,
        i_in,
        i_out,
        eta,
        eta_floored,
        flux_residual: (i_in - lost).abs(),
        p_sites: p,
    }
}
