//! Multichain geometry: coupling configurations, site indexing and the bond graph.
//!
//! Basis order is `|0⟩, |1,1⟩, …, |1,N⟩, |2,1⟩, …, |L,N⟩, |c⟩`. The vacuum sits at
//! flat index 0, site `(k, i)` at `(k−1)·N + i` and the photon at `L·N + 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Intra-chain dimerization pattern combined with the inter-chain geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigurationKind {
    HoSt,
    HoTt,
    HeSt,
    HeTt,
    HoheSt,
    HoheTt,
}

impl ConfigurationKind {
    pub const ALL: [ConfigurationKind; 6] = [
        ConfigurationKind::HoSt,
        ConfigurationKind::HoTt,
        ConfigurationKind::HeSt,
        ConfigurationKind::HeTt,
        ConfigurationKind::HoheSt,
        ConfigurationKind::HoheTt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigurationKind::HoSt => "ho_st",
            ConfigurationKind::HoTt => "ho_tt",
            ConfigurationKind::HeSt => "he_st",
            ConfigurationKind::HeTt => "he_tt",
            ConfigurationKind::HoheSt => "hohe_st",
            ConfigurationKind::HoheTt => "hohe_tt",
        }
    }

    pub fn is_triangle(self) -> bool {
        matches!(
            self,
            ConfigurationKind::HoTt | ConfigurationKind::HeTt | ConfigurationKind::HoheTt
        )
    }

    /// Dimerization δ_k of chain `k` (1-based).
    pub fn chain_delta(self, k: usize, delta: f64) -> f64 {
        match self {
            ConfigurationKind::HoSt | ConfigurationKind::HoTt => 0.0,
            ConfigurationKind::HeSt | ConfigurationKind::HeTt => delta,
            ConfigurationKind::HoheSt | ConfigurationKind::HoheTt => {
                if k % 2 == 1 {
                    0.0
                } else {
                    delta
                }
            }
        }
    }
}

impl fmt::Display for ConfigurationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigurationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigurationKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid("configuration", format!("unknown configuration `{s}`")))
    }
}

/// Which states the coherent pump addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// Only site (1,1).
    #[default]
    Tls,
    /// Site (1,1) and the cavity mode.
    TlsCavity,
}

impl Drive {
    pub fn name(self) -> &'static str {
        match self {
            Drive::Tls => "tls",
            Drive::TlsCavity => "tls_cavity",
        }
    }
}

/// How many times the cavity dissipator enters the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CavityDecay {
    /// A single `κ D[c]` term.
    #[default]
    Once,
    /// `κ D[c]` repeated for every chain, i.e. an effective rate `L·κ`.
    PerChain,
}

/// Geometry and physical parameters. Energies and rates in eV, ħ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: ConfigurationKind,
    /// Number of chains.
    pub l: usize,
    /// Sites per chain.
    pub n: usize,
    pub h: f64,
    pub delta: f64,
    pub zeta: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    /// Exciton-cavity coupling per site.
    pub g: f64,
    pub kappa: f64,
    pub gamma_d: f64,
    pub gamma_r: f64,
    pub nbar_r: f64,
    pub drive: Drive,
    pub xi_t: f64,
    pub xi_c: f64,
    /// When false the photon state is dropped from the basis.
    pub cavity: bool,
    pub cavity_decay: CavityDecay,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        let (l, n) = (2, 8);
        Self {
            kind: ConfigurationKind::HoSt,
            l,
            n,
            h: 1.0,
            delta: 0.5,
            zeta: 0.1,
            delta_a: 0.0,
            delta_c: 0.0,
            g: crate::hamiltonian::g_from_rabi(1.0, l, n),
            kappa: 0.01,
            gamma_d: 0.01,
            gamma_r: 0.1,
            nbar_r: 0.0,
            drive: Drive::Tls,
            xi_t: 0.1,
            xi_c: 0.1,
            cavity: true,
            cavity_decay: CavityDecay::Once,
        }
    }
}

impl LatticeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(invalid("L", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if !(self.delta.abs() <= 1.0) {
            return Err(invalid("delta", format!("|delta| must be <= 1, got {}", self.delta)));
        }
        let finite = [
            ("h_eV", self.h),
            ("zeta_eV", self.zeta),
            ("Delta_eV", self.delta_a),
            ("Delta_eV", self.delta_c),
            ("g_eV", self.g),
            ("xi_T_eV", self.xi_t),
            ("xi_c_eV", self.xi_c),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(invalid(key, "must be finite"));
            }
        }
        let rates = [
            ("kappa_eV", self.kappa),
            ("gamma_d_eV", self.gamma_d),
            ("gamma_R_eV", self.gamma_r),
            ("nbar_R", self.nbar_r),
        ];
        for (key, v) in rates {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be a finite non-negative number, got {v}")));
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.l * self.n
    }

    /// Hilbert-space dimension: vacuum, sites and (optionally) the photon.
    pub fn dim(&self) -> usize {
        self.n_sites() + 1 + usize::from(self.cavity)
    }

    pub fn cavity_index(&self) -> Option<usize> {
        self.cavity.then(|| self.n_sites() + 1)
    }

    /// Flat index of site `(k, i)`, bounds-checked against this lattice.
    pub fn site(&self, k: usize, i: usize) -> Result<usize> {
        if k > self.l {
            return Err(Error::Index(format!("chain {k} > L = {}", self.l)));
        }
        index_of(k, i, self.n)
    }

    /// Effective cavity loss rate entering the generator.
    pub fn kappa_eff(&self) -> f64 {
        match self.cavity_decay {
            CavityDecay::Once => self.kappa,
            CavityDecay::PerChain => self.kappa * self.l as f64,
        }
    }
}

/// Flat basis index of site `(k, i)` in a lattice with `n` sites per chain.
pub fn index_of(k: usize, i: usize, n: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Index("chain index starts at 1".into()));
    }
    if i == 0 || i > n {
        return Err(Error::Index(format!("site {i} outside 1..={n}")));
    }
    Ok((k - 1) * n + i)
}

/// Coefficient of `σ⁺_a σ⁻_b + h.c.`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BondList {
    pub bonds: Vec<Bond>,
}

impl BondList {
    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Bond> {
        self.bonds.iter()
    }

    fn push(&mut self, n: usize, (k1, i1): (usize, usize), (k2, i2): (usize, usize), amplitude: f64) {
        // Indices are generated from validated ranges, so the unchecked form is safe here.
        let a = (k1 - 1) * n + i1;
        let b = (k2 - 1) * n + i2;
        self.bonds.push(Bond { a, b, amplitude });
    }
}

/// Upper bounds `(P, Q)` of the two triangle-coupling sums.
pub fn triangle_bounds(l: usize) -> (usize, usize) {
    if l % 2 == 1 {
        ((l - 1) / 2, (l - 1) / 2)
    } else {
        (l / 2, (l - 2) / 2)
    }
}

pub fn build_bonds(spec: &LatticeSpec) -> Result<BondList> {
    spec.validate()?;
    let (l, n, zeta) = (spec.l, spec.n, spec.zeta);
    let mut out = BondList::default();

    for k in 1..=l {
        let dk = spec.kind.chain_delta(k, spec.delta);
        for i in 1..n {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            out.push(n, (k, i), (k, i + 1), -spec.h * (1.0 + sign * dk));
        }
    }

    if spec.kind.is_triangle() {
        let (p, q) = triangle_bounds(l);
        for k in 1..=p {
            let (up, lo) = (2 * k - 1, 2 * k);
            for i in 1..n {
                out.push(n, (up, i), (lo, i), zeta);
                out.push(n, (up, i), (lo, i + 1), zeta);
            }
            out.push(n, (up, n), (lo, n), zeta);
        }
        for k in 1..=q {
            let (up, lo) = (2 * k, 2 * k + 1);
            out.push(n, (up, 1), (lo, 1), zeta);
            for i in 2..=n {
                out.push(n, (up, i), (lo, i - 1), zeta);
                out.push(n, (up, i), (lo, i), zeta);
            }
        }
    } else {
        for k in 1..l {
            for i in 1..=n {
                out.push(n, (k, i), (k + 1, i), zeta);
            }
        }
    }
    Ok(out)
}
