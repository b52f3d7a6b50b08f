//! Lindblad generator on the truncated space, steady-state solve and RK4 propagation.
//!
//! Density matrices are vectorized column by column: `vec(ρ)[i + D·j] = ρ[i, j]`.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, FactorizeInto, ReciprocalConditionNum, Solve, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_h_total, HamiltonianMatrix};
use crate::lattice::LatticeSpec;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Condition estimates below this trigger an explicit null-space count.
const RCOND_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: Array2<C64>,
}

impl DensityMatrix {
    /// `|idx⟩⟨idx|` in dimension `d`.
    pub fn projector(d: usize, idx: usize) -> Self {
        let mut m = Array2::zeros((d, d));
        m[[idx, idx]] = ONE;
        Self { matrix: m }
    }

    pub fn vacuum(d: usize) -> Self {
        Self::projector(d, 0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - &self.matrix.t().mapv(|z| z.conj())))
    }

    pub fn hermitize(&mut self) {
        let h = (&self.matrix + &self.matrix.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
        self.matrix = h;
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self
            .matrix
            .eigvalsh(UPLO::Lower)
            .map_err(|e| Error::Eigen(e.to_string()))?;
        Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn to_vec(&self) -> Array1<C64> {
        let d = self.dim();
        Array1::from_shape_fn(d * d, |k| self.matrix[[k % d, k / d]])
    }

    pub fn from_vec(v: &Array1<C64>, d: usize) -> Self {
        Self {
            matrix: Array2::from_shape_fn((d, d), |(i, j)| v[i + d * j]),
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

fn max_abs<'a>(m: impl IntoIterator<Item = &'a C64>) -> f64 {
    m.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Jump operator `√rate · |to⟩⟨from|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub to: usize,
    pub from: usize,
}

/// Dissipation channels of the model; zero-rate channels are omitted.
pub fn jumps(spec: &LatticeSpec) -> Result<Vec<Jump>> {
    let mut out = Vec::new();
    let mut push = |rate: f64, to: usize, from: usize| {
        if rate > 0.0 {
            out.push(Jump { rate, to, from });
        }
    };
    for s in 1..=spec.n_sites() {
        push(spec.gamma_d, 0, s);
    }
    if let Some(c) = spec.cavity_index() {
        push(spec.kappa_eff(), 0, c);
    }
    for k in 1..=spec.l {
        let last = spec.site(k, spec.n)?;
        push(spec.gamma_r * spec.nbar_r, last, 0);
        push(spec.gamma_r * (spec.nbar_r + 1.0), 0, last);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct LiouvillianOperator {
    /// Dense `D² × D²` generator acting on `vec(ρ)`.
    pub matrix: Array2<C64>,
    pub dim: usize,
    pub hamiltonian: HamiltonianMatrix,
    pub jumps: Vec<Jump>,
    pub spec: LatticeSpec,
}

impl LiouvillianOperator {
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_vec(&self.matrix.dot(&rho.to_vec()), self.dim)
    }

    /// Largest column sum of the diagonal-block rows, zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let s: C64 = (0..d).map(|i| self.matrix[[i + d * i, col]]).sum();
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Fastest rate in the problem: Hamiltonian row-sum norm or largest decay rate.
    pub fn time_scale(&self) -> f64 {
        let rate = self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max);
        self.hamiltonian.row_sum_norm().max(rate)
    }

    pub fn max_step(&self) -> f64 {
        0.1 / self.time_scale()
    }
}

pub fn vec_index(i: usize, j: usize, d: usize) -> usize {
    i + d * j
}

pub fn build_liouvillian(spec: &LatticeSpec) -> Result<LiouvillianOperator> {
    let h = build_h_total(spec)?;
    let channels = jumps(spec)?;
    let d = h.dim();
    let mut l = Array2::<C64>::zeros((d * d, d * d));
    let v = |i: usize, j: usize| vec_index(i, j, d);

    // -i[H, ρ]
    for i in 0..d {
        for k in 0..d {
            let hik = h.matrix[[i, k]];
            if hik == ZERO {
                continue;
            }
            for j in 0..d {
                l[[v(i, j), v(k, j)]] += -I * hik;
                // +iρH: ρ[j, i]·H[i, k] feeds entry (j, k).
                l[[v(j, k), v(j, i)]] += I * hik;
            }
        }
    }

    for jump in &channels {
        let (a, b, g) = (jump.to, jump.from, jump.rate);
        l[[v(a, a), v(b, b)]] += C64::new(g, 0.0);
        for j in 0..d {
            l[[v(b, j), v(b, j)]] -= C64::new(0.5 * g, 0.0);
            l[[v(j, b), v(j, b)]] -= C64::new(0.5 * g, 0.0);
        }
    }

    Ok(LiouvillianOperator {
        matrix: l,
        dim: d,
        hamiltonian: h,
        jumps: channels,
        spec: spec.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L·vec(ρ)‖∞` of the returned state.
    pub residual: f64,
}

fn nullity(a: &Array2<C64>) -> Result<usize> {
    let (_, sv, _) = a.svd(false, false).map_err(|e| Error::Solve(e.to_string()))?;
    let top = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s <= 1e-10 * top).count())
}

/// Unique trace-one fixed point of the generator.
pub fn steady_state(liouv: &LiouvillianOperator) -> Result<SteadyState> {
    let d = liouv.dim;
    let mut a = liouv.matrix.clone();
    a.row_mut(0).fill(ZERO);
    for i in 0..d {
        a[[0, vec_index(i, i, d)]] = ONE;
    }
    let mut rhs = Array1::<C64>::zeros(d * d);
    rhs[0] = ONE;

    let non_unique = |a: &Array2<C64>| -> Result<Error> {
        Ok(Error::NonUniqueSteadyState {
            nullity: nullity(a)?.max(1),
        })
    };

    let lu = match a.clone().factorize_into() {
        Ok(lu) => lu,
        Err(_) => return Err(non_unique(&a)?),
    };
    let rcond = lu.rcond().map_err(|e| Error::Solve(e.to_string()))?;
    if !(rcond > RCOND_MIN) && nullity(&a)? > 0 {
        return Err(non_unique(&a)?);
    }
    let x = lu.solve_into(rhs).map_err(|e| Error::Solve(e.to_string()))?;
    if !x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Solve("non-finite solution".into()));
    }

    let mut rho = DensityMatrix::from_vec(&x, d);
    rho.hermitize();
    let tr = rho.trace().re;
    rho.matrix.mapv_inplace(|z| z / tr);
    let residual = max_abs(&liouv.matrix.dot(&rho.to_vec()));
    Ok(SteadyState { rho, residual })
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub rho: DensityMatrix,
    pub steps: usize,
    pub dt: f64,
    /// Largest `|tr ρ(t) − tr ρ(0)|` along the trajectory.
    pub trace_drift: f64,
    /// Largest `‖ρ(t) − ρ(t)†‖∞` along the trajectory.
    pub hermiticity_drift: f64,
}

/// Fixed-step RK4 of `d vec(ρ)/dt = L·vec(ρ)`. The step is shrunk so that an
/// integer number of steps lands exactly on `t_final`.
pub fn propagate(
    liouv: &LiouvillianOperator,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<Propagation> {
    let max = liouv.max_step();
    if !(dt > 0.0) || dt > max * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, max });
    }
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter {
            key: "t_final",
            reason: "must be non-negative".into(),
        });
    }
    let d = liouv.dim;
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps > 0 { t_final / steps as f64 } else { 0.0 };
    let l = &liouv.matrix;
    let tr0 = rho0.trace();
    let mut y = rho0.to_vec();
    let mut trace_drift = 0.0f64;
    let mut herm = rho0.hermiticity_error();
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for _ in 0..steps {
        let k1 = l.dot(&y);
        let k2 = l.dot(&(&y + &k1.mapv(|z| z * half)));
        let k3 = l.dot(&(&y + &k2.mapv(|z| z * half)));
        let k4 = l.dot(&(&y + &k3.mapv(|z| z * full)));
        let incr = &k1 + &k2.mapv(|z| z * two) + &k3.mapv(|z| z * two) + &k4;
        y.scaled_add(sixth, &incr);
        let tr: C64 = (0..d).map(|i| y[vec_index(i, i, d)]).sum();
        trace_drift = trace_drift.max((tr - tr0).norm());
        let mut h_err = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                h_err = h_err.max((y[vec_index(i, j, d)] - y[vec_index(j, i, d)].conj()).norm());
            }
        }
        herm = herm.max(h_err);
    }
    Ok(Propagation {
        rho: DensityMatrix::from_vec(&y, d),
        steps,
        dt: h,
        trace_drift,
        hermiticity_drift: herm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CavityDecay, ConfigurationKind, Drive};
    use approx::assert_abs_diff_eq;
    use ndarray_linalg::Eig;
    use proptest::prelude::*;

    fn single_tls(delta: f64) -> LatticeSpec {
        LatticeSpec {
            l: 1,
            n: 1,
            cavity: false,
            delta_a: delta,
            delta_c: delta,
            ..LatticeSpec::default()
        }
    }

    fn bloch_oracle(xi: f64, delta: f64, gamma: f64) -> f64 {
        xi * xi / (delta * delta + gamma * gamma / 4.0 + 2.0 * xi * xi)
    }

    fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
        let (ra, ca) = a.dim();
        let (rb, cb) = b.dim();
        Array2::from_shape_fn((ra * rb, ca * cb), |(i, j)| a[[i / rb, j / cb]] * b[[i % rb, j % cb]])
    }

    /// Column-stacking superoperator from Kronecker products:
    /// vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
    fn kron_liouvillian(spec: &LatticeSpec) -> Array2<C64> {
        let h = build_h_total(spec).unwrap().matrix;
        let d = h.nrows();
        let id = Array2::<C64>::eye(d);
        let mut l = kron(&id, &h).mapv(|z| -I * z) + kron(&h.t().to_owned(), &id).mapv(|z| I * z);
        for j in jumps(spec).unwrap() {
            let mut c = Array2::<C64>::zeros((d, d));
            c[[j.to, j.from]] = C64::new(j.rate.sqrt(), 0.0);
            let cd = c.t().mapv(|z| z.conj());
            let cdc = cd.dot(&c);
            l = l + kron(&c.mapv(|z| z.conj()), &c)
                - kron(&id, &cdc).mapv(|z| 0.5 * z)
                - kron(&cdc.t().to_owned(), &id).mapv(|z| 0.5 * z);
        }
        l
    }

    #[test]
    fn optical_bloch_generator_by_hand() {
        let (xi, delta) = (0.1, 0.37);
        let gamma = 0.01 + 0.1;
        let spec = LatticeSpec {
            xi_t: xi,
            ..single_tls(delta)
        };
        let l = build_liouvillian(&spec).unwrap().matrix;
        let c = |re: f64, im: f64| C64::new(re, im);
        // Order: ρ00, ρe0, ρ0e, ρee.
        let expected = ndarray::array![
            [c(0.0, 0.0), c(0.0, -xi), c(0.0, xi), c(gamma, 0.0)],
            [c(0.0, -xi), c(-gamma / 2.0, delta), c(0.0, 0.0), c(0.0, xi)],
            [c(0.0, xi), c(0.0, 0.0), c(-gamma / 2.0, -delta), c(0.0, -xi)],
            [c(0.0, 0.0), c(0.0, xi), c(0.0, -xi), c(-gamma, 0.0)],
        ];
        for (a, b) in l.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
        }
    }

    #[test]
    fn unitary_when_undamped() {
        let spec = LatticeSpec {
            l: 1,
            n: 2,
            kappa: 0.0,
            gamma_d: 0.0,
            gamma_r: 0.0,
            drive: Drive::TlsCavity,
            ..LatticeSpec::default()
        };
        let liouv = build_liouvillian(&spec).unwrap();
        assert!(liouv.jumps.is_empty());
        let (vals, _) = liouv.matrix.eig().unwrap();
        for v in vals.iter() {
            assert!(v.re.abs() < 1e-12, "{v}");
        }
        assert!(matches!(
            steady_state(&liouv),
            Err(Error::NonUniqueSteadyState { nullity }) if nullity >= 1
        ));
    }

    #[test]
    fn trace_preserving_for_all_configurations() {
        for kind in ConfigurationKind::ALL {
            for drive in [Drive::Tls, Drive::TlsCavity] {
                let spec = LatticeSpec {
                    kind,
                    drive,
                    nbar_r: 0.3,
                    ..LatticeSpec::default()
                };
                let l = build_liouvillian(&spec).unwrap();
                assert!(l.trace_defect() < 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn literal_cavity_decay_scales_with_chains() {
        let spec = LatticeSpec {
            l: 3,
            n: 2,
            cavity_decay: CavityDecay::PerChain,
            ..LatticeSpec::default()
        };
        let c = spec.cavity_index().unwrap();
        let j = jumps(&spec).unwrap();
        let cav: Vec<_> = j.iter().filter(|j| j.from == c).collect();
        assert_eq!(cav.len(), 1);
        assert_abs_diff_eq!(cav[0].rate, 0.03, epsilon = 1e-15);
    }

    #[test]
    fn single_tls_matches_bloch_oracle() {
        for delta in [0.0, 0.5, -0.2] {
            let ss = steady_state(&build_liouvillian(&single_tls(delta)).unwrap()).unwrap();
            let p = ss.rho.matrix[[1, 1]].re;
            assert_abs_diff_eq!(p, bloch_oracle(0.1, delta, 0.11), epsilon = 1e-12);
            assert!(ss.residual < 1e-14);
        }
        assert_abs_diff_eq!(bloch_oracle(0.1, 0.5, 0.11), 0.01 / (0.25 + 0.003025 + 0.02), epsilon = 1e-15);
    }

    #[test]
    fn undriven_steady_state_is_vacuum() {
        let spec = LatticeSpec {
            xi_t: 0.0,
            xi_c: 0.0,
            drive: Drive::TlsCavity,
            l: 2,
            n: 3,
            ..LatticeSpec::default()
        };
        let ss = steady_state(&build_liouvillian(&spec).unwrap()).unwrap();
        let vac = DensityMatrix::vacuum(spec.dim());
        assert!(ss.rho.max_abs_diff(&vac) < 1e-12);
    }

    #[test]
    fn steady_state_is_physical() {
        for kind in ConfigurationKind::ALL {
            let spec = LatticeSpec {
                kind,
                l: 2,
                n: 5,
                drive: Drive::TlsCavity,
                ..LatticeSpec::default()
            };
            let ss = steady_state(&build_liouvillian(&spec).unwrap()).unwrap();
            assert!(ss.residual <= 1e-10);
            assert!(ss.rho.hermiticity_error() == 0.0);
            assert_abs_diff_eq!(ss.rho.trace().re, 1.0, epsilon = 1e-12);
            assert!(ss.rho.min_eigenvalue().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn propagation_edge_cases() {
        let liouv = build_liouvillian(&single_tls(0.0)).unwrap();
        let rho0 = DensityMatrix::vacuum(2);
        let p = propagate(&liouv, &rho0, 0.0, liouv.max_step()).unwrap();
        assert_eq!(p.rho, rho0);
        assert_eq!(p.steps, 0);

        let dt = liouv.max_step() * 1.5;
        assert!(matches!(propagate(&liouv, &rho0, 1.0, dt), Err(Error::StepSize { .. })));
        assert!(propagate(&liouv, &rho0, 1.0, 0.0).is_err());

        let frozen = LatticeSpec {
            h: 0.0,
            g: 0.0,
            xi_t: 0.0,
            xi_c: 0.0,
            kappa: 0.0,
            gamma_d: 0.0,
            gamma_r: 0.0,
            l: 1,
            n: 2,
            ..LatticeSpec::default()
        };
        let liouv = build_liouvillian(&frozen).unwrap();
        assert!(liouv.matrix.iter().all(|z| *z == ZERO));
        let mut rho0 = DensityMatrix::projector(4, 2);
        rho0.matrix[[1, 2]] = C64::new(0.1, 0.2);
        rho0.matrix[[2, 1]] = C64::new(0.1, -0.2);
        let p = propagate(&liouv, &rho0, 123.0, 1.0).unwrap();
        assert_eq!(p.rho, rho0);
    }

    #[test]
    fn long_propagation_reaches_fixed_point() {
        let liouv = build_liouvillian(&single_tls(0.0)).unwrap();
        let ss = steady_state(&liouv).unwrap();
        let p = propagate(&liouv, &DensityMatrix::vacuum(2), 2000.0, liouv.max_step()).unwrap();
        assert!(p.rho.max_abs_diff(&ss.rho) < 1e-6);
        assert!(p.trace_drift < 1e-8);
        assert!(p.hermiticity_drift < 1e-10);
    }

    #[test]
    fn vectorization_round_trip() {
        let mut rho = DensityMatrix::vacuum(3);
        rho.matrix[[2, 0]] = C64::new(0.5, -1.0);
        let v = rho.to_vec();
        assert_eq!(v[vec_index(2, 0, 3)], C64::new(0.5, -1.0));
        assert_eq!(DensityMatrix::from_vec(&v, 3), rho);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_kronecker_construction(
            kind in 0usize..6, l in 1usize..3, n in 1usize..4, cav in proptest::bool::ANY,
            zeta in -1.0f64..1.0, da in -0.5f64..0.5, nbar in 0.0f64..1.0,
            gd in 0.0f64..0.1, gr in 0.0f64..0.2, kappa in 0.0f64..0.1, tls_cav in proptest::bool::ANY,
        ) {
            let spec = LatticeSpec {
                kind: ConfigurationKind::ALL[kind], l, n, cavity: cav, zeta,
                delta_a: da, delta_c: da, nbar_r: nbar, gamma_d: gd, gamma_r: gr, kappa,
                drive: if tls_cav { Drive::TlsCavity } else { Drive::Tls },
                ..LatticeSpec::default()
            };
            let a = build_liouvillian(&spec).unwrap().matrix;
            let b = kron_liouvillian(&spec);
            prop_assert!(max_abs(&(&a - &b)) < 1e-14);
        }

        #[test]
        fn propagation_preserves_trace_and_hermiticity(kind in 0usize..6, zeta in -1.0f64..1.0) {
            let spec = LatticeSpec {
                kind: ConfigurationKind::ALL[kind], l: 2, n: 2, zeta, ..LatticeSpec::default()
            };
            let liouv = build_liouvillian(&spec).unwrap();
            let p = propagate(&liouv, &DensityMatrix::vacuum(spec.dim()), 20.0, liouv.max_step()).unwrap();
            prop_assert!(p.trace_drift <= 1e-8);
            prop_assert!(p.hermiticity_drift <= 1e-10);
        }
    }
}
