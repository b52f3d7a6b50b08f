//! One- and two-axis parameter grids over spectra and steady states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_liouvillian, steady_state};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h0_for, g_from_rabi};
use crate::lattice::LatticeSpec;
use crate::observables::{report, BulkInMode, SteadyReport};
use crate::spectrum::{
    detect_events_refined, diagonalize, hopfield_second_derivative, levels, track_bands_with,
    CrossingEvent, DetectOptions, SecondDerivative, SpectrumOptions, TrackOptions, TrackedBands,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "zeta")]
    Zeta,
    #[serde(rename = "delta")]
    Dimerization,
    /// Joint detuning `Δ_a = Δ_c`.
    #[serde(rename = "Delta")]
    Detuning,
    #[serde(rename = "L")]
    Chains,
    #[serde(rename = "N")]
    Sites,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Zeta => "zeta",
            Param::Dimerization => "delta",
            Param::Detuning => "Delta",
            Param::Chains => "L",
            Param::Sites => "N",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, Param::Chains | Param::Sites)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<usize>>,
}

impl Axis {
    pub fn range(param: Param, min: f64, max: f64, steps: usize) -> Self {
        Self {
            param,
            min: Some(min),
            max: Some(max),
            steps: Some(steps),
            values: None,
        }
    }

    pub fn list(param: Param, values: Vec<usize>) -> Self {
        Self {
            param,
            min: None,
            max: None,
            steps: None,
            values: Some(values),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let name = self.param.name();
        if self.param.is_integer() {
            return match (&self.values, self.min, self.max, self.steps) {
                (Some(v), None, None, None) if !v.is_empty() => Ok(v.iter().map(|&x| x as f64).collect()),
                _ => Err(Error::Plan(format!("axis `{name}` takes a non-empty `values` list"))),
            };
        }
        match (self.min, self.max, self.steps, &self.values) {
            (Some(a), Some(b), Some(n), None) if n >= 2 && a.is_finite() && b.is_finite() && b > a => {
                Ok(linspace(a, b, n))
            }
            _ => Err(Error::Plan(format!(
                "axis `{name}` takes `min` < `max` and `steps` >= 2"
            ))),
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// How the per-site coupling is fixed when `L` or `N` changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// Collective splitting held fixed; `g` follows `L·N`.
    Rabi(f64),
    /// Per-site `g` held fixed.
    Direct(f64),
}

impl Coupling {
    pub fn g(self, l: usize, n: usize) -> f64 {
        match self {
            Coupling::Rabi(omega) => g_from_rabi(omega, l, n),
            Coupling::Direct(g) => g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Spectrum,
    Steady,
    Detect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct SweepOptions {
    pub spectrum: SpectrumOptions,
    pub detect: DetectOptions,
    pub track: TrackOptions,
    pub bulk_in: BulkInMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPlan {
    pub base: LatticeSpec,
    pub coupling: Coupling,
    pub axes: Vec<Axis>,
    pub task: Task,
    pub options: SweepOptions,
}

impl SweepPlan {
    pub fn new(base: LatticeSpec, coupling: Coupling, axes: Vec<Axis>, task: Task) -> Self {
        Self {
            base,
            coupling,
            axes,
            task,
            options: SweepOptions::default(),
        }
    }

    /// Spec at the given axis coordinates.
    pub fn spec_at(&self, coords: &[(Param, f64)]) -> Result<LatticeSpec> {
        let mut s = self.base.clone();
        for &(p, v) in coords {
            match p {
                Param::Zeta => s.zeta = v,
                Param::Dimerization => s.delta = v,
                Param::Detuning => {
                    s.delta_a = v;
                    s.delta_c = v;
                }
                Param::Chains => s.l = v as usize,
                Param::Sites => s.n = v as usize,
            }
        }
        s.g = self.coupling.g(s.l, s.n);
        s.validate()?;
        Ok(s)
    }

    /// Row-major grid: the first axis varies slowest.
    pub fn grid(&self) -> Result<Vec<Vec<(Param, f64)>>> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Plan("a sweep takes one or two axes".into()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::Plan("the two axes must differ".into()));
        }
        let first = self.axes[0].points()?;
        let mut out = Vec::new();
        match self.axes.get(1) {
            None => out.extend(first.iter().map(|&x| vec![(self.axes[0].param, x)])),
            Some(ax) => {
                let second = ax.points()?;
                for &x in &first {
                    for &y in &second {
                        out.push(vec![(self.axes[0].param, x), (ax.param, y)]);
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyOutcome {
    pub report: SteadyReport,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyRow {
    pub index: usize,
    pub coords: Vec<(Param, f64)>,
    pub spec: LatticeSpec,
    /// Solver failures are kept in-row as a message.
    pub outcome: std::result::Result<SteadyOutcome, String>,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub param: Param,
    pub bands: TrackedBands,
    pub events: Vec<CrossingEvent>,
    pub second_derivative: Option<SecondDerivative>,
}

#[derive(Debug, Clone)]
pub enum SweepOutput {
    Steady(Vec<SteadyRow>),
    Spectrum(SpectrumResult),
}

pub fn steady_point(spec: &LatticeSpec, mode: BulkInMode) -> Result<SteadyOutcome> {
    let ss = steady_state(&build_liouvillian(spec)?)?;
    Ok(SteadyOutcome {
        report: report(&ss.rho, spec, mode),
        residual: ss.residual,
    })
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| Error::Plan(e.to_string()))
}

/// Evaluate every grid point; `threads = None` sizes the pool to the machine.
pub fn run_sweep(plan: &SweepPlan, threads: Option<usize>) -> Result<SweepOutput> {
    let grid = plan.grid()?;
    let pool = pool(threads)?;
    match plan.task {
        Task::Steady => {
            let rows = pool.install(|| {
                grid.par_iter()
                    .enumerate()
                    .map(|(index, coords)| {
                        let spec = plan.spec_at(coords);
                        let outcome = spec
                            .as_ref()
                            .map_err(|e| e.clone())
                            .and_then(|s| steady_point(s, plan.options.bulk_in))
                            .map_err(|e| e.to_string());
                        SteadyRow {
                            index,
                            coords: coords.clone(),
                            spec: spec.unwrap_or_else(|_| plan.base.clone()),
                            outcome,
                        }
                    })
                    .collect()
            });
            Ok(SweepOutput::Steady(rows))
        }
        Task::Spectrum | Task::Detect => {
            if plan.axes.len() != 1 || plan.axes[0].param.is_integer() {
                return Err(Error::Plan(
                    "spectra need exactly one continuous axis (zeta, delta or Delta)".into(),
                ));
            }
            let param = plan.axes[0].param;
            let spec_opts = plan.options.spectrum;
            let solutions = pool.install(|| {
                grid.par_iter()
                    .map(|coords| {
                        let spec = plan.spec_at(coords)?;
                        let mut sol = diagonalize(&build_h0_for(&spec)?, &spec_opts)?;
                        sol.param_value = coords[0].1;
                        Ok(sol)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let bands = track_bands_with(&solutions, &plan.options.track)?;
            let events = detect_events_refined(&bands, &plan.options.detect, |x| {
                levels(&build_h0_for(&plan.spec_at(&[(param, x)])?)?, &spec_opts)
            })?;
            let second_derivative = hopfield_second_derivative(&bands).ok();
            Ok(SweepOutput::Spectrum(SpectrumResult {
                param,
                bands,
                events,
                second_derivative,
            }))
        }
    }
}
