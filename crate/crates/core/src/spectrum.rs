//! Eigen-decomposition of `H0`, photon Hopfield weights, exciton entropy,
//! branch tracking across a parameter grid and crossing classification.

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use ndarray_linalg::{EigValsh, Eigh, UPLO};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumOptions {
    /// Keep the undressed vacuum level (E = 0, zero photon weight) among the levels.
    pub include_vacuum: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            include_vacuum: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub param_value: f64,
    /// Ascending.
    pub energies: Array1<f64>,
    /// Eigenvectors as columns, expressed in the full basis.
    pub states: Array2<C64>,
    pub photon_weight: Array1<f64>,
    pub entropy: Array1<f64>,
    pub cavity: Option<usize>,
    /// Position of the vacuum level in `energies`, when it was kept.
    pub vacuum_level: Option<usize>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    fn refresh_weights(&mut self) {
        for (j, col) in self.states.axis_iter(Axis(1)).enumerate() {
            let w = photon_weight(col, self.cavity);
            self.photon_weight[j] = w;
            self.entropy[j] = binary_entropy(w);
        }
    }
}

fn photon_weight(state: ArrayView1<C64>, cavity: Option<usize>) -> f64 {
    cavity.map_or(0.0, |c| state[c].norm_sqr())
}

/// Rotate a column so that its largest-magnitude entry is real and positive.
fn fix_phase(mut col: ndarray::ArrayViewMut1<C64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        let a = z.norm();
        if a > best_abs + 1e-12 {
            best = i;
            best_abs = a;
        }
    }
    if best_abs > 0.0 {
        let phase = col[best].conj() / best_abs;
        col.mapv_inplace(|z| z * phase);
    }
}

fn single_block(h0: &HamiltonianMatrix) -> Result<Array2<C64>> {
    if h0.includes_drive {
        return Err(Error::DrivenHamiltonian);
    }
    let d = h0.dim();
    Ok(h0.matrix.slice(s![1..d, 1..d]).to_owned())
}

fn vacuum_slot(energies: &[f64]) -> usize {
    energies.partition_point(|&e| e < 0.0)
}

/// Diagonalize the undriven Hamiltonian. `param_value` is left at zero.
pub fn diagonalize(h0: &HamiltonianMatrix, opts: &SpectrumOptions) -> Result<EigenSolution> {
    let block = single_block(h0)?;
    let (vals, vecs) = block
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    let d = h0.dim();
    let m = d - 1;

    let mut energies: Vec<f64> = vals.to_vec();
    let mut states = Array2::<C64>::zeros((d, m));
    states.slice_mut(s![1..d, ..]).assign(&vecs);
    for col in states.axis_iter_mut(Axis(1)) {
        fix_phase(col);
    }

    let mut vacuum_level = None;
    if opts.include_vacuum {
        let at = vacuum_slot(&energies);
        energies.insert(at, 0.0);
        let mut with_vac = Array2::<C64>::zeros((d, d));
        with_vac.slice_mut(s![.., ..at]).assign(&states.slice(s![.., ..at]));
        with_vac.slice_mut(s![.., at + 1..]).assign(&states.slice(s![.., at..]));
        with_vac[[0, at]] = C64::new(1.0, 0.0);
        states = with_vac;
        vacuum_level = Some(at);
    }

    let n = energies.len();
    let mut sol = EigenSolution {
        param_value: 0.0,
        energies: Array1::from(energies),
        states,
        photon_weight: Array1::zeros(n),
        entropy: Array1::zeros(n),
        cavity: h0.cavity,
        vacuum_level,
    };
    sol.refresh_weights();
    Ok(sol)
}

/// Sorted levels only, without eigenvectors.
pub fn levels(h0: &HamiltonianMatrix, opts: &SpectrumOptions) -> Result<Array1<f64>> {
    let vals = single_block(h0)?
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    let mut e = vals.to_vec();
    if opts.include_vacuum {
        e.insert(vacuum_slot(&e), 0.0);
    }
    Ok(Array1::from(e))
}

/// Binary entropy in bits with `0·log₂0 = 0`.
pub fn binary_entropy(w: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    let w = w.clamp(0.0, 1.0);
    term(w) + term(1.0 - w)
}

/// Exciton entanglement entropy of a single-excitation state, in bits.
pub fn entropy_of_state(state: ArrayView1<C64>, cavity: Option<usize>) -> Result<f64> {
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(binary_entropy(photon_weight(state, cavity)))
}

/// Entropy of the exciton reduced state, computed the long way: embed the state in
/// exciton ⊗ photon space, trace out the photon and diagonalize.
pub fn partial_trace_entropy(state: ArrayView1<C64>, cavity: Option<usize>) -> Result<f64> {
    let d = state.len();
    let exc = d - usize::from(cavity.is_some());
    let mut psi = Array2::<C64>::zeros((exc, 2));
    let mut row = 0;
    for (i, &z) in state.iter().enumerate() {
        if Some(i) == cavity {
            psi[[0, 1]] += z;
        } else {
            psi[[row, 0]] += z;
            row += 1;
        }
    }
    let rho_e = psi.dot(&psi.t().mapv(|z| z.conj()));
    let vals = rho_e
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    Ok(vals
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackOptions {
    /// Relative energy spread below which levels are treated as one degenerate cluster.
    pub degeneracy_tol: f64,
    /// Assigned overlaps below this are reported as warnings.
    pub min_overlap: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: 1e-9,
            min_overlap: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingWarning {
    /// Grid index of the later point of the ambiguous step.
    pub index: usize,
    pub param_value: f64,
    pub min_overlap: f64,
}

#[derive(Debug, Clone)]
pub struct TrackedBands {
    pub grid: Vec<f64>,
    /// `[branch, point]`.
    pub energies: Array2<f64>,
    pub photon_weight: Array2<f64>,
    pub entropy: Array2<f64>,
    /// `[branch, point]` → sorted level index.
    pub level_of: Array2<usize>,
    /// `[level, point]` → branch id.
    pub branch_at: Array2<usize>,
    pub vacuum_branch: Option<usize>,
    pub warnings: Vec<TrackingWarning>,
}

impl TrackedBands {
    pub fn n_branches(&self) -> usize {
        self.energies.nrows()
    }

    pub fn n_points(&self) -> usize {
        self.grid.len()
    }

    /// Energy of sorted level `j` at point `m`.
    pub fn level_energy(&self, j: usize, m: usize) -> f64 {
        self.energies[[self.branch_at[[j, m]], m]]
    }

    pub fn level_weight(&self, j: usize, m: usize) -> f64 {
        self.photon_weight[[self.branch_at[[j, m]], m]]
    }
}

/// Optimal assignment maximizing the summed weight; returns `row → column`.
fn assign_max(w: &Array2<f64>) -> Vec<usize> {
    let n = w.nrows();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = -w[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

fn clusters(energies: &Array1<f64>, tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for j in 1..=energies.len() {
        let split = j == energies.len()
            || energies[j] - energies[j - 1] > tol * energies[j].abs().max(1.0);
        if split {
            if j - start > 1 {
                out.push((start, j));
            }
            start = j;
        }
    }
    out
}

fn dot(a: ArrayView1<C64>, b: ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Re-express each degenerate cluster of `cur` in the basis best aligned with `prev`.
fn align_degenerate(prev: &Array2<C64>, cur: &mut EigenSolution, tol: f64) {
    for (lo, hi) in clusters(&cur.energies, tol) {
        let q = cur.states.slice(s![.., lo..hi]).to_owned();
        let size = hi - lo;
        let mut candidates: Vec<(f64, Array1<C64>)> = prev
            .axis_iter(Axis(1))
            .map(|p| {
                let coeff: Array1<C64> = q.axis_iter(Axis(1)).map(|qc| dot(qc, p)).collect();
                let weight = coeff.iter().map(|z| z.norm_sqr()).sum::<f64>();
                (weight, q.dot(&coeff))
            })
            .collect();
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
        candidates.extend(q.axis_iter(Axis(1)).map(|c| (0.0, c.to_owned())));

        let mut basis: Vec<Array1<C64>> = Vec::with_capacity(size);
        for (_, mut v) in candidates {
            if basis.len() == size {
                break;
            }
            for b in &basis {
                let c = dot(b.view(), v.view());
                v.scaled_add(-c, b);
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                basis.push(v.mapv(|z| z / norm));
            }
        }
        for (j, b) in basis.into_iter().enumerate() {
            let mut col = cur.states.column_mut(lo + j);
            col.assign(&b);
            fix_phase(col);
        }
    }
    cur.refresh_weights();
}

pub fn track_bands(solutions: &[EigenSolution]) -> Result<TrackedBands> {
    track_bands_with(solutions, &TrackOptions::default())
}

pub fn track_bands_with(solutions: &[EigenSolution], opts: &TrackOptions) -> Result<TrackedBands> {
    if solutions.len() < 2 {
        return Err(Error::Grid("tracking needs at least 2 grid points".into()));
    }
    let m = solutions[0].len();
    let d = solutions[0].states.nrows();
    if solutions
        .iter()
        .any(|s| s.len() != m || s.states.nrows() != d)
    {
        return Err(Error::Grid("dimension changes along the grid".into()));
    }
    let p = solutions.len();
    let mut energies = Array2::zeros((m, p));
    let mut weight = Array2::zeros((m, p));
    let mut entropy = Array2::zeros((m, p));
    let mut level_of = Array2::zeros((m, p));
    let mut branch_at = Array2::zeros((m, p));
    let mut warnings = Vec::new();

    let mut record = |pt: usize, sol: &EigenSolution, branch_of_level: &[usize]| {
        for (lvl, &b) in branch_of_level.iter().enumerate() {
            energies[[b, pt]] = sol.energies[lvl];
            weight[[b, pt]] = sol.photon_weight[lvl];
            entropy[[b, pt]] = sol.entropy[lvl];
            level_of[[b, pt]] = lvl;
            branch_at[[lvl, pt]] = b;
        }
    };

    let mut branch_of_level: Vec<usize> = (0..m).collect();
    record(0, &solutions[0], &branch_of_level);
    let mut prev = solutions[0].clone();

    for pt in 1..p {
        let mut cur = solutions[pt].clone();
        align_degenerate(&prev.states, &mut cur, opts.degeneracy_tol);
        let overlap = prev.states.t().mapv(|z| z.conj()).dot(&cur.states).mapv(|z| z.norm_sqr());
        let assign = assign_max(&overlap);
        let worst = assign
            .iter()
            .enumerate()
            .map(|(a, &b)| overlap[[a, b]])
            .fold(f64::INFINITY, f64::min);
        if worst < opts.min_overlap {
            warnings.push(TrackingWarning {
                index: pt,
                param_value: cur.param_value,
                min_overlap: worst,
            });
        }
        let mut next = vec![0; m];
        for (a, &b) in assign.iter().enumerate() {
            next[b] = branch_of_level[a];
        }
        branch_of_level = next;
        record(pt, &cur, &branch_of_level);
        prev = cur;
    }

    let vacuum_branch = solutions[0].vacuum_level;
    Ok(TrackedBands {
        grid: solutions.iter().map(|s| s.param_value).collect(),
        energies,
        photon_weight: weight,
        entropy,
        level_of,
        branch_at,
        vacuum_branch,
        warnings,
    })
}

/// Spacing of a uniform grid.
pub fn uniform_spacing(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Grid("need at least 2 points".into()));
    }
    let dx = grid[1] - grid[0];
    if !(dx > 0.0) {
        return Err(Error::Grid("grid must be strictly increasing".into()));
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - dx).abs() > 1e-6 * dx {
            return Err(Error::Grid("grid spacing is not uniform".into()));
        }
    }
    Ok(dx)
}

#[derive(Debug, Clone)]
pub struct SecondDerivative {
    /// Interior grid points.
    pub grid: Vec<f64>,
    /// `[branch, interior point]`.
    pub values: Array2<f64>,
}

/// Central second difference of each branch's photon weight.
pub fn hopfield_second_derivative(tb: &TrackedBands) -> Result<SecondDerivative> {
    if tb.n_points() < 3 {
        return Err(Error::Grid("second derivative needs at least 3 points".into()));
    }
    let dx = uniform_spacing(&tb.grid)?;
    let w = &tb.photon_weight;
    let p = tb.n_points();
    let values = &w.slice(s![.., ..p - 2]) - &(2.0 * &w.slice(s![.., 1..p - 1]))
        + w.slice(s![.., 2..]);
    Ok(SecondDerivative {
        grid: tb.grid[1..p - 1].to_vec(),
        values: values / (dx * dx),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Crossing,
    Anticrossing,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Crossing => "CROSSING",
            EventKind::Anticrossing => "ANTICROSSING",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub kind: EventKind,
    pub param_value: f64,
    pub gap: f64,
    pub branch_lo: usize,
    pub branch_hi: usize,
    /// Lower of the two sorted levels forming the pair.
    pub level_lo: usize,
    pub photon_weight: f64,
    pub involves_vacuum: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectOptions {
    pub energy_window: f64,
    pub photon_weight_min: f64,
    pub eps_cross: f64,
    /// Density multiplier of the refinement pass.
    pub refine_density: usize,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            energy_window: 0.3,
            photon_weight_min: 0.05,
            eps_cross: 1e-4,
            refine_density: 10,
        }
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

/// Grid indices where level pair `(j, j+1)` has a local gap minimum passing the filters.
fn candidates(tb: &TrackedBands, opts: &DetectOptions) -> Vec<(usize, usize)> {
    let p = tb.n_points();
    let mut out = Vec::new();
    if p < 3 {
        return out;
    }
    for j in 0..tb.n_branches().saturating_sub(1) {
        let gap: Vec<f64> = (0..p)
            .map(|m| tb.level_energy(j + 1, m) - tb.level_energy(j, m))
            .collect();
        for m in 1..p - 1 {
            if !(gap[m] <= gap[m - 1] && gap[m] < gap[m + 1]) || nearly_equal(gap[m], gap[m + 1]) {
                continue;
            }
            // A single tie on the left is a minimum straddling two points; longer runs are plateaus.
            if nearly_equal(gap[m], gap[m - 1]) && (m < 2 || nearly_equal(gap[m - 1], gap[m - 2])) {
                continue;
            }
            let (e0, e1) = (tb.level_energy(j, m), tb.level_energy(j + 1, m));
            let w = tb.level_weight(j, m).max(tb.level_weight(j + 1, m));
            if e0.abs() < opts.energy_window
                && e1.abs() < opts.energy_window
                && w >= opts.photon_weight_min
            {
                out.push((j, m));
            }
        }
    }
    out
}

fn make_event(
    tb: &TrackedBands,
    opts: &DetectOptions,
    (j, m): (usize, usize),
    x: f64,
    gap: f64,
) -> CrossingEvent {
    let (b0, b1) = (tb.branch_at[[j, m]], tb.branch_at[[j + 1, m]]);
    let kind = if gap < opts.eps_cross {
        EventKind::Crossing
    } else {
        EventKind::Anticrossing
    };
    CrossingEvent {
        kind,
        param_value: x,
        gap,
        branch_lo: b0,
        branch_hi: b1,
        level_lo: j,
        photon_weight: tb.level_weight(j, m).max(tb.level_weight(j + 1, m)),
        involves_vacuum: tb.vacuum_branch.is_some_and(|v| v == b0 || v == b1),
    }
}

fn dedupe(mut events: Vec<CrossingEvent>, dx: f64) -> Vec<CrossingEvent> {
    events.sort_by(|a, b| {
        a.param_value
            .total_cmp(&b.param_value)
            .then(a.level_lo.cmp(&b.level_lo))
    });
    let mut out: Vec<CrossingEvent> = Vec::with_capacity(events.len());
    for e in events {
        let dup = out.iter_mut().find(|o| {
            o.level_lo == e.level_lo && (o.param_value - e.param_value).abs() < 0.5 * dx
        });
        match dup {
            Some(o) if e.gap < o.gap => *o = e,
            Some(_) => {}
            None => out.push(e),
        }
    }
    out
}

/// Grid-only detection; the location and gap come from a parabola through the
/// three samples around each minimum.
pub fn detect_events(tb: &TrackedBands, opts: &DetectOptions) -> Result<Vec<CrossingEvent>> {
    let dx = uniform_spacing(&tb.grid)?;
    let events = candidates(tb, opts)
        .into_iter()
        .map(|(j, m)| {
            let g = |k: usize| tb.level_energy(j + 1, k) - tb.level_energy(j, k);
            let (gm, g0, gp) = (g(m - 1), g(m), g(m + 1));
            let curv = gp - 2.0 * g0 + gm;
            let (x, gap) = if curv > 0.0 {
                let shift = 0.5 * (gm - gp) / curv;
                (tb.grid[m] + shift * dx, (g0 - 0.125 * (gp - gm).powi(2) / curv).max(0.0))
            } else {
                (tb.grid[m], g0)
            };
            make_event(tb, opts, (j, m), x, gap)
        })
        .collect();
    Ok(dedupe(events, dx))
}

/// Detection with a dense re-diagonalization pass around each candidate followed by
/// Brent minimization of the gap. `levels_at(x)` must return the sorted levels at `x`
/// with the same count and conventions used to build `tb`.
pub fn detect_events_refined<F>(
    tb: &TrackedBands,
    opts: &DetectOptions,
    levels_at: F,
) -> Result<Vec<CrossingEvent>>
where
    F: Fn(f64) -> Result<Array1<f64>>,
{
    let dx = uniform_spacing(&tb.grid)?;
    let (lo_edge, hi_edge) = (tb.grid[0], *tb.grid.last().unwrap_or(&tb.grid[0]));
    let density = opts.refine_density.max(1);
    let step = dx / density as f64;
    let mut events = Vec::new();
    for (j, m) in candidates(tb, opts) {
        let gap_at = |x: f64| -> Result<f64> {
            let e = levels_at(x)?;
            Ok(e[j + 1] - e[j])
        };
        let mut best = (tb.grid[m], tb.level_energy(j + 1, m) - tb.level_energy(j, m));
        for k in 0..=(4 * density) {
            let x = tb.grid[m] - 2.0 * dx + k as f64 * step;
            if x < lo_edge || x > hi_edge {
                continue;
            }
            let g = gap_at(x)?;
            if g < best.1 {
                best = (x, g);
            }
        }
        let a = (best.0 - step).max(lo_edge);
        let b = (best.0 + step).min(hi_edge);
        let (x, g) = brent_min(gap_at, a, b, 1e-12)?;
        let (x, g) = if g < best.1 { (x, g) } else { best };
        events.push(make_event(tb, opts, (j, m), x, g.max(0.0)));
    }
    Ok(dedupe(events, dx))
}

/// Brent's derivative-free minimizer on `[a, b]` (golden section with parabolic steps).
fn brent_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let eps = f64::EPSILON.sqrt();
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let r = e;
            e = d;
            if p.abs() < (0.5 * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok((x, fx))
}
