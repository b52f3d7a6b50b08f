//! Dense Hamiltonian in the zero plus single excitation basis (rotating frame).

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::lattice::{build_bonds, BondList, Drive, LatticeSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    pub matrix: Array2<C64>,
    pub includes_drive: bool,
    /// Flat index of the photon state, if present.
    pub cavity: Option<usize>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_norm(&self) -> f64 {
        self.matrix
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
            }
        }
        worst
    }
}

/// Per-site coupling from the collective splitting `Ω_R = 2g√(LN)`.
pub fn g_from_rabi(omega_r: f64, l: usize, n: usize) -> f64 {
    omega_r / (2.0 * ((l * n) as f64).sqrt())
}

pub fn rabi_from_g(g: f64, l: usize, n: usize) -> f64 {
    2.0 * g * ((l * n) as f64).sqrt()
}

pub fn build_h0(spec: &LatticeSpec, bonds: &BondList) -> Result<HamiltonianMatrix> {
    spec.validate()?;
    let d = spec.dim();
    let mut h = Array2::<C64>::zeros((d, d));
    for s in 1..=spec.n_sites() {
        h[[s, s]] = C64::new(-spec.delta_a, 0.0);
    }
    for b in bonds.iter() {
        h[[b.a, b.b]] += C64::new(b.amplitude, 0.0);
        h[[b.b, b.a]] += C64::new(b.amplitude, 0.0);
    }
    let cavity = spec.cavity_index();
    if let Some(c) = cavity {
        h[[c, c]] = C64::new(-spec.delta_c, 0.0);
        for s in 1..=spec.n_sites() {
            h[[s, c]] = C64::new(spec.g, 0.0);
            h[[c, s]] = C64::new(spec.g, 0.0);
        }
    }
    Ok(HamiltonianMatrix {
        matrix: h,
        includes_drive: false,
        cavity,
    })
}

/// `H0` built from the lattice's own bond graph.
pub fn build_h0_for(spec: &LatticeSpec) -> Result<HamiltonianMatrix> {
    build_h0(spec, &build_bonds(spec)?)
}

pub fn build_h_total(spec: &LatticeSpec) -> Result<HamiltonianMatrix> {
    let mut h = build_h0_for(spec)?;
    let first = spec.site(1, 1)?;
    let xi_t = C64::new(spec.xi_t, 0.0);
    h.matrix[[0, first]] = xi_t;
    h.matrix[[first, 0]] = xi_t;
    if spec.drive == Drive::TlsCavity {
        if let Some(c) = h.cavity {
            let xi_c = C64::new(spec.xi_c, 0.0);
            h.matrix[[0, c]] = xi_c;
            h.matrix[[c, 0]] = xi_c;
        }
    }
    h.includes_drive = true;
    Ok(h)
}
