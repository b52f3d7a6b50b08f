//! JSON run configuration, subcommand dispatch and CSV/JSON output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dynamics::{build_liouvillian, propagate, steady_state, DensityMatrix};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h0_for, rabi_from_g};
use crate::lattice::{CavityDecay, ConfigurationKind, Drive, LatticeSpec};
use crate::observables::{report, BulkInMode};
use crate::spectrum::{diagonalize, entropy_of_state, partial_trace_entropy, SpectrumOptions};
use crate::sweep::{run_sweep, Axis, Coupling, SpectrumResult, SteadyRow, SweepOptions, SweepOutput, SweepPlan, Task};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "MULTICHAIN_THREADS";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    #[serde(rename = "energy_window_eV", default)]
    pub energy_window: Option<f64>,
    #[serde(default)]
    pub photon_weight_min: Option<f64>,
    #[serde(rename = "eps_cross_eV", default)]
    pub eps_cross: Option<f64>,
    #[serde(default)]
    pub include_vacuum: Option<bool>,
}

/// User-facing run configuration. Every key is optional; missing keys take the defaults
/// listed in the README.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub configuration: Option<ConfigurationKind>,
    #[serde(rename = "L", default)]
    pub l: Option<usize>,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(rename = "h_eV", default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(rename = "zeta_eV", default)]
    pub zeta: Option<f64>,
    #[serde(rename = "Delta_eV", default)]
    pub detuning: Option<f64>,
    #[serde(rename = "OmegaR_eV", default)]
    pub omega_r: Option<f64>,
    #[serde(rename = "g_eV", default)]
    pub g: Option<f64>,
    #[serde(rename = "kappa_eV", default)]
    pub kappa: Option<f64>,
    #[serde(rename = "gamma_d_eV", default)]
    pub gamma_d: Option<f64>,
    #[serde(rename = "gamma_R_eV", default)]
    pub gamma_r: Option<f64>,
    #[serde(rename = "nbar_R", default)]
    pub nbar_r: Option<f64>,
    #[serde(default)]
    pub drive: Option<Drive>,
    #[serde(rename = "xi_T_eV", default)]
    pub xi_t: Option<f64>,
    #[serde(rename = "xi_c_eV", default)]
    pub xi_c: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub cavity: Option<bool>,
    #[serde(default)]
    pub detector: Option<DetectorConfig>,
    #[serde(default)]
    pub bulk_in: Option<BulkInMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub spec: LatticeSpec,
    pub coupling: Coupling,
    pub axes: Option<Vec<Axis>>,
    pub options: SweepOptions,
}

impl Resolved {
    pub fn plan(&self, task: Task) -> Option<SweepPlan> {
        self.axes.clone().map(|axes| SweepPlan {
            base: self.spec.clone(),
            coupling: self.coupling,
            axes,
            task,
            options: self.options,
        })
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Plan(format!("config: {e}")))
    }

    pub fn resolve(&self, cavity_decay: CavityDecay) -> Result<Resolved> {
        let d = LatticeSpec::default();
        let l = self.l.unwrap_or(d.l);
        let n = self.n.unwrap_or(d.n);
        let cavity = self.cavity.unwrap_or(true);
        let coupling = match (self.omega_r, self.g) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter {
                    key: "OmegaR_eV",
                    reason: "`OmegaR_eV` and `g_eV` are mutually exclusive".into(),
                })
            }
            _ if !cavity => Coupling::Direct(0.0),
            (_, Some(g)) => Coupling::Direct(g),
            (omega, None) => Coupling::Rabi(omega.unwrap_or(1.0)),
        };
        if let Coupling::Rabi(w) = coupling {
            if !(w >= 0.0) {
                return Err(Error::InvalidParameter {
                    key: "OmegaR_eV",
                    reason: "must be non-negative".into(),
                });
            }
        }
        let detuning = self.detuning.unwrap_or(d.delta_a);
        let spec = LatticeSpec {
            kind: self.configuration.unwrap_or(d.kind),
            l,
            n,
            h: self.h.unwrap_or(d.h),
            delta: self.delta.unwrap_or(d.delta),
            zeta: self.zeta.unwrap_or(d.zeta),
            delta_a: detuning,
            delta_c: detuning,
            g: if l > 0 && n > 0 { coupling.g(l, n) } else { 0.0 },
            kappa: self.kappa.unwrap_or(d.kappa),
            gamma_d: self.gamma_d.unwrap_or(d.gamma_d),
            gamma_r: self.gamma_r.unwrap_or(d.gamma_r),
            nbar_r: self.nbar_r.unwrap_or(d.nbar_r),
            drive: self.drive.unwrap_or(d.drive),
            xi_t: self.xi_t.unwrap_or(d.xi_t),
            xi_c: self.xi_c.unwrap_or(d.xi_c),
            cavity,
            cavity_decay,
        };
        spec.validate()?;

        let mut options = SweepOptions::default();
        if let Some(det) = &self.detector {
            let o = &mut options;
            o.detect.energy_window = det.energy_window.unwrap_or(o.detect.energy_window);
            o.detect.photon_weight_min = det.photon_weight_min.unwrap_or(o.detect.photon_weight_min);
            o.detect.eps_cross = det.eps_cross.unwrap_or(o.detect.eps_cross);
            o.spectrum = SpectrumOptions {
                include_vacuum: det.include_vacuum.unwrap_or(o.spectrum.include_vacuum),
            };
        }
        options.bulk_in = self.bulk_in.unwrap_or_default();

        let axes = self.sweep.as_ref().map(|s| s.axes.clone());
        if let Some(axes) = &axes {
            // Surface bad axes before any work starts.
            SweepPlan::new(spec.clone(), coupling, axes.clone(), Task::Steady).grid()?;
        }
        Ok(Resolved {
            spec,
            coupling,
            axes,
            options,
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "multichain", version, about = "Spectra and steady-state transport of cavity-coupled multichain TLS arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parameter sweeps.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Repeat the cavity dissipator once per chain (effective loss L·κ).
    #[arg(long = "kappa-per-chain", visible_alias = "literal-eq13", global = true)]
    pub kappa_per_chain: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigen-spectrum sweep: writes spectrum.csv and events.csv.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Steady-state sweep (or single point): writes steady.csv.
    Steady {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant checks on the configured base point.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Propagation horizon; defaults to 5 / (smallest nonzero rate).
        #[arg(long)]
        t_final: Option<f64>,
    },
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| Error::Plan(format!("{}: {e}", path.display())))
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Plan(format!("csv: {e}"))
}

pub const SPECTRUM_COLUMNS: [&str; 6] = [
    "param_name",
    "param_value",
    "branch",
    "energy_eV",
    "photon_weight",
    "entropy_bits",
];

pub const EVENT_COLUMNS: [&str; 6] = ["kind", "param_value", "gap_eV", "branch_lo", "branch_hi", "photon_weight"];

pub const STEADY_COLUMNS: [&str; 24] = [
    "config",
    "L",
    "N",
    "h",
    "delta",
    "zeta",
    "Delta",
    "OmegaR",
    "kappa",
    "gamma_d",
    "gamma_R",
    "drive",
    "xi_T",
    "xi_c",
    "p_11",
    "p_bulk",
    "p_N",
    "p_c",
    "I_i",
    "I_o",
    "eta",
    "flux_residual",
    "p_bulk_in",
    "status",
];

/// Public branch label: the vacuum level is `-1`, the rest are numbered from 0.
pub fn branch_label(b: usize, vacuum: Option<usize>) -> i64 {
    match vacuum {
        Some(v) if b == v => -1,
        Some(v) if b > v => b as i64 - 1,
        _ => b as i64,
    }
}

pub fn write_spectrum_csv(path: &Path, res: &SpectrumResult) -> Result<()> {
    let tb = &res.bands;
    let mut w = csv_writer(path)?;
    w.write_record(SPECTRUM_COLUMNS).map_err(csv_err)?;
    let mut order: Vec<usize> = (0..tb.n_branches()).collect();
    order.sort_by_key(|&b| branch_label(b, tb.vacuum_branch));
    for m in 0..tb.n_points() {
        for &b in &order {
            w.write_record([
                res.param.name().to_string(),
                fmt_f64(tb.grid[m]),
                branch_label(b, tb.vacuum_branch).to_string(),
                fmt_f64(tb.energies[[b, m]]),
                fmt_f64(tb.photon_weight[[b, m]]),
                fmt_f64(tb.entropy[[b, m]]),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(csv_err)
}

pub fn write_events_csv(path: &Path, res: &SpectrumResult) -> Result<()> {
    let vac = res.bands.vacuum_branch;
    let mut w = csv_writer(path)?;
    w.write_record(EVENT_COLUMNS).map_err(csv_err)?;
    for e in &res.events {
        w.write_record([
            e.kind.name().to_string(),
            fmt_f64(e.param_value),
            fmt_f64(e.gap),
            branch_label(e.branch_lo, vac).to_string(),
            branch_label(e.branch_hi, vac).to_string(),
            fmt_f64(e.photon_weight),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

pub fn write_steady_csv(path: &Path, rows: &[SteadyRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(STEADY_COLUMNS).map_err(csv_err)?;
    for row in rows {
        let s = &row.spec;
        let mut rec = vec![
            s.kind.name().to_string(),
            s.l.to_string(),
            s.n.to_string(),
            fmt_f64(s.h),
            fmt_f64(s.delta),
            fmt_f64(s.zeta),
            fmt_f64(s.delta_a),
            fmt_f64(rabi_from_g(s.g, s.l, s.n)),
            fmt_f64(s.kappa),
            fmt_f64(s.gamma_d),
            fmt_f64(s.gamma_r),
            s.drive.name().to_string(),
            fmt_f64(s.xi_t),
            fmt_f64(s.xi_c),
        ];
        match &row.outcome {
            Ok(o) => {
                let r = &o.report;
                for v in [r.p_11, r.p_bulk, r.p_n, r.p_c, r.i_in, r.i_out, r.eta, r.flux_residual, r.p_bulk_in] {
                    rec.push(fmt_f64(v));
                }
                rec.push(if r.eta_floored { "ok:eta_floored".into() } else { "ok".into() });
            }
            Err(msg) => {
                rec.extend(std::iter::repeat_n(fmt_f64(f64::NAN), 9));
                rec.push(format!("error: {msg}"));
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    wall_time_s: f64,
    threads: Option<usize>,
    kappa_per_chain: bool,
    config: &'a RunConfig,
    plan: &'a Resolved,
    outputs: Vec<String>,
    warnings: Vec<String>,
}

fn write_manifest(out: &Path, m: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(m).map_err(|e| Error::Plan(e.to_string()))?;
    let mut f = fs::File::create(out.join("manifest.json")).map_err(|e| Error::Plan(e.to_string()))?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| Error::Plan(e.to_string()))
}

fn load(config: &Path, decay: CavityDecay) -> Result<(RunConfig, Resolved)> {
    let text = fs::read_to_string(config).map_err(|e| Error::Plan(format!("{}: {e}", config.display())))?;
    let cfg = RunConfig::from_json(&text)?;
    let resolved = cfg.resolve(decay)?;
    Ok((cfg, resolved))
}

fn prepare_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::Plan(format!("{}: {e}", out.display())))
}

pub fn cmd_spectrum(config: &Path, out: &Path, threads: Option<usize>, decay: CavityDecay) -> Result<()> {
    let start = Instant::now();
    let (cfg, resolved) = load(config, decay)?;
    let plan = resolved
        .plan(Task::Spectrum)
        .ok_or_else(|| Error::Plan("spectrum needs a `sweep` with one continuous axis".into()))?;
    let SweepOutput::Spectrum(res) = run_sweep(&plan, threads)? else {
        unreachable!("spectrum task yields a spectrum result")
    };
    prepare_out(out)?;
    write_spectrum_csv(&out.join("spectrum.csv"), &res)?;
    write_events_csv(&out.join("events.csv"), &res)?;
    let warnings = res
        .bands
        .warnings
        .iter()
        .map(|w| format!("ambiguous branch assignment at {} (overlap {:.3})", w.param_value, w.min_overlap))
        .collect();
    write_manifest(
        out,
        &Manifest {
            command: "spectrum",
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: start.elapsed().as_secs_f64(),
            threads,
            kappa_per_chain: decay == CavityDecay::PerChain,
            config: &cfg,
            plan: &resolved,
            outputs: vec!["spectrum.csv".into(), "events.csv".into()],
            warnings,
        },
    )
}

pub fn cmd_steady(config: &Path, out: &Path, threads: Option<usize>, decay: CavityDecay) -> Result<()> {
    let start = Instant::now();
    let (cfg, resolved) = load(config, decay)?;
    let rows = match resolved.plan(Task::Steady) {
        Some(plan) => match run_sweep(&plan, threads)? {
            SweepOutput::Steady(rows) => rows,
            SweepOutput::Spectrum(_) => unreachable!("steady task yields rows"),
        },
        None => vec![SteadyRow {
            index: 0,
            coords: Vec::new(),
            spec: resolved.spec.clone(),
            outcome: crate::sweep::steady_point(&resolved.spec, resolved.options.bulk_in)
                .map_err(|e| e.to_string()),
        }],
    };
    prepare_out(out)?;
    write_steady_csv(&out.join("steady.csv"), &rows)?;
    let warnings = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| format!("row {}: {e}", r.index)))
        .collect();
    write_manifest(
        out,
        &Manifest {
            command: "steady",
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: start.elapsed().as_secs_f64(),
            threads,
            kappa_per_chain: decay == CavityDecay::PerChain,
            config: &cfg,
            plan: &resolved,
            outputs: vec!["steady.csv".into()],
            warnings,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, tol: f64) -> Check {
    Check {
        name,
        passed: value <= tol,
        detail: format!("{value:.3e} (tolerance {tol:.0e})"),
    }
}

/// Invariant suite on a single configuration.
pub fn verify(spec: &LatticeSpec, mode: BulkInMode, t_final: Option<f64>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let liouv = build_liouvillian(spec)?;
    out.push(check("trace_preservation", liouv.trace_defect(), 1e-12));

    let ss = steady_state(&liouv)?;
    out.push(check("fixed_point_residual", ss.residual, 1e-10));
    out.push(check("positivity", (-ss.rho.min_eigenvalue()?).max(0.0), 1e-10));
    let r = report(&ss.rho, spec, mode);
    out.push(check("flux_balance", r.flux_residual, 1e-8));

    let bare = LatticeSpec {
        cavity: false,
        g: 0.0,
        ..spec.clone()
    };
    let mirrored = LatticeSpec {
        zeta: -spec.zeta,
        ..bare.clone()
    };
    let eta = |s: &LatticeSpec| -> Result<f64> {
        let ss = steady_state(&build_liouvillian(s)?)?;
        Ok(report(&ss.rho, s, mode).eta)
    };
    out.push(check("no_cavity_zeta_symmetry", (eta(&bare)? - eta(&mirrored)?).abs(), 1e-8));

    let sol = diagonalize(&build_h0_for(spec)?, &SpectrumOptions::default())?;
    let mut worst = 0.0f64;
    for col in sol.states.columns() {
        let s = entropy_of_state(col, sol.cavity)?;
        worst = worst.max((s - partial_trace_entropy(col, sol.cavity)?).abs());
    }
    out.push(check("entropy_identity", worst, 1e-12));

    let rates: Vec<f64> = liouv.jumps.iter().map(|j| j.rate).collect();
    let slowest = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let horizon = t_final.unwrap_or(if slowest.is_finite() { 5.0 / slowest } else { 0.0 });
    let prop = propagate(&liouv, &DensityMatrix::vacuum(liouv.dim), horizon, liouv.max_step())?;
    out.push(check("propagation_trace_drift", prop.trace_drift, 1e-8));
    let mut c = check("propagation_vs_steady_state", prop.rho.max_abs_diff(&ss.rho), 1e-6);
    c.detail.push_str(&format!(" at t = {horizon}"));
    out.push(c);
    Ok(out)
}

fn cmd_verify(config: &Path, t_final: Option<f64>, decay: CavityDecay) -> Result<bool> {
    let (_, resolved) = load(config, decay)?;
    let checks = verify(&resolved.spec, resolved.options.bulk_in, t_final)?;
    for c in &checks {
        println!("{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let decay = if cli.kappa_per_chain {
        CavityDecay::PerChain
    } else {
        CavityDecay::Once
    };
    let result = match &cli.command {
        Command::Spectrum { config, out } => cmd_spectrum(config, out, cli.threads, decay).map(|_| true),
        Command::Steady { config, out } => cmd_steady(config, out, cli.threads, decay).map(|_| true),
        Command::Verify { config, t_final } => cmd_verify(config, *t_final, decay),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let r = RunConfig::from_json("{}").unwrap().resolve(CavityDecay::Once).unwrap();
        let d = LatticeSpec::default();
        assert_eq!(r.spec, d);
        assert_eq!(r.coupling, Coupling::Rabi(1.0));
        assert!(r.axes.is_none());
    }

    #[test]
    fn unknown_and_conflicting_keys() {
        let e = RunConfig::from_json(r#"{"zeta": 0.1}"#).unwrap_err().to_string();
        assert!(e.contains("zeta"), "{e}");
        let e = RunConfig::from_json(r#"{"OmegaR_eV": 1, "g_eV": 0.1}"#)
            .unwrap()
            .resolve(CavityDecay::Once)
            .unwrap_err()
            .to_string();
        assert!(e.contains("OmegaR_eV") && e.contains("g_eV"), "{e}");
        let e = RunConfig::from_json(r#"{"L": 0}"#)
            .unwrap()
            .resolve(CavityDecay::Once)
            .unwrap_err()
            .to_string();
        assert!(e.contains("`L`"), "{e}");
        let e = RunConfig::from_json(r#"{"sweep": {"axes": [{"param": "zeta", "min": 0, "max": 1, "step": 3}]}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("step"), "{e}");
    }

    #[test]
    fn explicit_keys() {
        let text = r#"{
            "configuration": "he_tt", "L": 3, "N": 5, "h_eV": 0.9, "delta": -0.2,
            "zeta_eV": 0.3, "Delta_eV": 0.1, "g_eV": 0.05, "kappa_eV": 0.02,
            "gamma_d_eV": 0.03, "gamma_R_eV": 0.2, "nbar_R": 0.1, "drive": "tls_cavity",
            "xi_T_eV": 0.04, "xi_c_eV": 0.06, "cavity": true,
            "sweep": {"axes": [{"param": "L", "values": [2, 3]}, {"param": "Delta", "min": -1, "max": 1, "steps": 3}]},
            "detector": {"energy_window_eV": 0.5, "include_vacuum": false},
            "bulk_in": "interior_rows_and_columns"
        }"#;
        let r = RunConfig::from_json(text).unwrap().resolve(CavityDecay::PerChain).unwrap();
        let s = &r.spec;
        assert_eq!((s.kind, s.l, s.n), (ConfigurationKind::HeTt, 3, 5));
        assert_eq!((s.delta_a, s.delta_c, s.g), (0.1, 0.1, 0.05));
        assert_eq!(s.drive, Drive::TlsCavity);
        assert_eq!(s.cavity_decay, CavityDecay::PerChain);
        assert_eq!(r.axes.as_ref().unwrap().len(), 2);
        assert_eq!(r.options.detect.energy_window, 0.5);
        assert!(!r.options.spectrum.include_vacuum);
        assert_eq!(r.options.bulk_in, BulkInMode::InteriorRowsAndColumns);
    }

    #[test]
    fn no_cavity_forces_zero_coupling() {
        let r = RunConfig::from_json(r#"{"cavity": false, "OmegaR_eV": 2}"#)
            .unwrap()
            .resolve(CavityDecay::Once)
            .unwrap();
        assert_eq!(r.spec.g, 0.0);
        assert_eq!(r.spec.dim(), 17);
    }

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn vacuum_label() {
        assert_eq!(branch_label(3, Some(3)), -1);
        assert_eq!(branch_label(4, Some(3)), 3);
        assert_eq!(branch_label(2, Some(3)), 2);
        assert_eq!(branch_label(2, None), 2);
    }
}
