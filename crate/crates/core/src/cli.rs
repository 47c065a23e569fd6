//! `pf-wcl` command-line driver.
//!
//! Every run resolves flags and an optional JSON config into a [`RunConfig`],
//! echoes it at the top of the output, and streams rows in input order.
//! Exit codes: 0 success, 2 usage/config/assumption error, 3 numerical failure.

use crate::energy::{cutoff_energy_3d, cutoff_split, dipole_dispersion, ground_energy, log_spectral_energy};
use crate::error::{Error, Result};
use crate::fockdesk::{self, FiberOperators, FockBasis, Mode, WclRow};
use crate::formfactor::{MeasureSpec, RadialMeasure};
use crate::hermite;
use crate::scan::{echoed_config, open_output, Cell, Format, ScanRecord, ScanWriter};
use crate::wienerhopf::{self, default_nodes, AkRow, WienerHopfGrid};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "pf-wcl", version, about = "Weak-coupling spectral lab for the Pauli-Fierz model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run config (a CSV produced by an earlier run also works: its
    /// echoed first line is read).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Inline RadialMeasure JSON, overriding the config's measure.
    #[arg(long, global = true)]
    pub measure: Option<String>,

    /// Output path; `-` is stdout.
    #[arg(long, global = true)]
    pub output: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for scans.
    #[arg(long, global = true, env = "PF_WCL_JOBS")]
    pub jobs: Option<usize>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground energy, log-spectral energy and dipole dispersion of a measure.
    Energy {
        #[arg(long, value_delimiter = ',')]
        kappa_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        p_list: Option<Vec<f64>>,
    },
    /// Sharp-cutoff energy E(Λ) in three dimensions.
    CutoffScan {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Truncated Wiener-Hopf determinants and the mass functional.
    WienerHopf {
        #[arg(long = "T")]
        t: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "T-ladder", value_delimiter = ',')]
        t_ladder: Option<Vec<f64>>,
    },
    /// Truncated Fock-space fiber scan.
    Fock {
        /// Modes as `w:W:q,w:W:q,…`.
        #[arg(long)]
        modes: Option<String>,
        #[arg(long)]
        ntot: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        kappa_list: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p_list: Option<Vec<f64>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Generalized Hermite invariant grid; JSON pass/fail report.
    HermiteCheck,
    /// Moment report and standing-assumption check of a measure.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandName {
    Energy,
    CutoffScan,
    WienerHopf,
    Fock,
    HermiteCheck,
    Validate,
}

impl SubcommandName {
    fn as_str(self) -> &'static str {
        match self {
            SubcommandName::Energy => "energy",
            SubcommandName::CutoffScan => "cutoff-scan",
            SubcommandName::WienerHopf => "wiener-hopf",
            SubcommandName::Fock => "fock",
            SubcommandName::HermiteCheck => "hermite-check",
            SubcommandName::Validate => "validate",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            SubcommandName::Energy => &["kappa_list", "p_list"],
            SubcommandName::CutoffScan => &["lambda", "kappa", "p"],
            SubcommandName::WienerHopf => &["T", "nodes", "kappa", "p", "T_ladder"],
            SubcommandName::Fock => &["modes", "ntot", "kappa_list", "p_list", "epsilon", "T"],
            SubcommandName::HermiteCheck | SubcommandName::Validate => &[],
        }
    }

    fn needs_measure(self) -> bool {
        matches!(self, SubcommandName::Energy | SubcommandName::WienerHopf | SubcommandName::Validate)
    }
}

/// Subcommand-specific parameters; keys that do not apply are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(rename = "T_ladder", default, skip_serializing_if = "Option::is_none")]
    pub t_ladder: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<Mode>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ntot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl Params {
    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! mark {
            ($f:ident, $k:literal) => {
                if self.$f.is_some() {
                    v.push($k);
                }
            };
        }
        mark!(kappa, "kappa");
        mark!(p, "p");
        mark!(kappa_list, "kappa_list");
        mark!(p_list, "p_list");
        mark!(lambda, "lambda");
        mark!(t, "T");
        mark!(nodes, "nodes");
        mark!(t_ladder, "T_ladder");
        mark!(modes, "modes");
        mark!(ntot, "ntot");
        mark!(epsilon, "epsilon");
        v
    }
}

/// Output destination. Only the format is echoed, so a run and its rerun
/// from the echo produce identical bytes wherever they are written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<SubcommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parses a JSON config, or the echo line of an earlier CSV output.
    pub fn from_text(text: &str) -> Result<Self> {
        let json = echoed_config(text).unwrap_or(text);
        serde_json::from_str(json).map_err(|e| Error::Config(format!("config: {e}")))
    }
}

fn overlay<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

/// Merges flags over the config file and fills defaults.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig {
            subcommand: None,
            measure: None,
            params: Params::default(),
            output: OutputSpec::default(),
            seed: 0,
        },
    };
    let name = match &cli.command {
        Command::Energy { .. } => SubcommandName::Energy,
        Command::CutoffScan { .. } => SubcommandName::CutoffScan,
        Command::WienerHopf { .. } => SubcommandName::WienerHopf,
        Command::Fock { .. } => SubcommandName::Fock,
        Command::HermiteCheck => SubcommandName::HermiteCheck,
        Command::Validate => SubcommandName::Validate,
    };
    if let Some(s) = cfg.subcommand {
        if s != name {
            return Err(Error::Config(format!(
                "config is for '{}' but the subcommand is '{}'",
                s.as_str(),
                name.as_str()
            )));
        }
    }
    cfg.subcommand = Some(name);
    if let Some(m) = &cli.measure {
        cfg.measure = Some(serde_json::from_str(m).map_err(|e| Error::Config(format!("--measure: {e}")))?);
    }
    overlay(&mut cfg.output.path, cli.output.clone());
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }

    let p = &mut cfg.params;
    match &cli.command {
        Command::Energy { kappa_list, p_list } => {
            overlay(&mut p.kappa_list, kappa_list.clone());
            overlay(&mut p.p_list, p_list.clone());
        }
        Command::CutoffScan { lambda, kappa, p: mom } => {
            overlay(&mut p.lambda, lambda.clone());
            overlay(&mut p.kappa, *kappa);
            overlay(&mut p.p, *mom);
        }
        Command::WienerHopf { t, nodes, kappa, p: mom, t_ladder } => {
            overlay(&mut p.t, *t);
            overlay(&mut p.nodes, *nodes);
            overlay(&mut p.kappa, *kappa);
            overlay(&mut p.p, *mom);
            overlay(&mut p.t_ladder, t_ladder.clone());
        }
        Command::Fock { modes, ntot, kappa_list, p_list, epsilon, t } => {
            if let Some(m) = modes {
                p.modes = Some(fockdesk::parse_modes(m)?);
            }
            overlay(&mut p.ntot, *ntot);
            overlay(&mut p.kappa_list, kappa_list.clone());
            overlay(&mut p.p_list, p_list.clone());
            overlay(&mut p.epsilon, *epsilon);
            overlay(&mut p.t, *t);
        }
        Command::HermiteCheck | Command::Validate => {}
    }

    let allowed = name.allowed_params();
    if let Some(bad) = p.present().into_iter().find(|k| !allowed.contains(k)) {
        return Err(Error::Config(format!("parameter '{bad}' does not apply to '{}'", name.as_str())));
    }
    if name.needs_measure() && cfg.measure.is_none() {
        return Err(Error::Config(format!("'{}' needs a measure (--config or --measure)", name.as_str())));
    }
    if !name.needs_measure() && cfg.measure.is_some() {
        return Err(Error::Config(format!("'{}' takes no measure", name.as_str())));
    }

    match name {
        SubcommandName::Energy => {
            p.kappa_list.get_or_insert_with(|| vec![1.0]);
            p.p_list.get_or_insert_with(|| vec![0.0]);
        }
        SubcommandName::CutoffScan => {
            p.lambda.get_or_insert_with(|| vec![1e2, 1e4, 1e6]);
            p.kappa.get_or_insert(1.0);
            p.p.get_or_insert(0.0);
        }
        SubcommandName::WienerHopf => {
            p.kappa.get_or_insert(1.0);
            if p.t_ladder.is_none() {
                p.t.get_or_insert(10.0);
            }
        }
        SubcommandName::Fock => {
            let modes = p
                .modes
                .as_ref()
                .ok_or_else(|| Error::Config("'fock' needs --modes".into()))?;
            if p.ntot.is_none() {
                p.ntot = Some(fockdesk::max_ntot_for(modes.len(), fockdesk::MAX_DENSE));
            }
            p.kappa_list.get_or_insert_with(|| vec![1.0]);
            p.p_list.get_or_insert_with(|| vec![0.0, 0.2]);
            p.epsilon.get_or_insert(1.0);
        }
        SubcommandName::HermiteCheck | SubcommandName::Validate => {}
    }
    Ok(cfg)
}

fn nonempty(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{what} is empty")));
    }
    Ok(())
}

/// One row of the cutoff scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutoffRow {
    pub lambda: f64,
    pub kappa: f64,
    pub p: f64,
    /// `κ² E(Λ)`.
    #[serde(rename = "calE")]
    pub cal_e: f64,
    pub log_spectral: f64,
    #[serde(rename = "E_over_lambda_1p5")]
    pub ratio: f64,
    /// `NaN` for `Λ ≤ 1`, where the split point leaves `[0, 1]`.
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "I2")]
    pub i2: f64,
}

impl CutoffRow {
    pub fn compute(lambda: f64, kappa: f64, p: f64) -> Result<Self> {
        let e = cutoff_energy_3d(lambda)?;
        let ff = RadialMeasure::sharp(3, lambda)?;
        let log_spectral = log_spectral_energy(&ff, kappa)?;
        let (i1, i2) = if lambda > 1.0 { cutoff_split(lambda)? } else { (f64::NAN, f64::NAN) };
        Ok(CutoffRow { lambda, kappa, p, cal_e: kappa * kappa * e, log_spectral, ratio: e / lambda.powf(1.5), i1, i2 })
    }
}

impl ScanRecord for CutoffRow {
    fn columns() -> &'static [&'static str] {
        &["lambda", "kappa", "p", "calE", "log_spectral", "E_over_lambda_1p5", "I1", "I2"]
    }
    fn cells(&self) -> Vec<Cell> {
        [self.lambda, self.kappa, self.p, self.cal_e, self.log_spectral, self.ratio, self.i1, self.i2]
            .into_iter()
            .map(Cell::from)
            .collect()
    }
}

/// One row of the energy subcommand.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyRow {
    pub kappa: f64,
    pub p: f64,
    #[serde(rename = "calE")]
    pub cal_e: f64,
    pub log_spectral: f64,
    #[serde(rename = "E_kappa")]
    pub e_kappa: f64,
    pub m_eff: f64,
    pub dispersion: f64,
}

impl ScanRecord for EnergyRow {
    fn columns() -> &'static [&'static str] {
        &["kappa", "p", "calE", "log_spectral", "E_kappa", "m_eff", "dispersion"]
    }
    fn cells(&self) -> Vec<Cell> {
        [self.kappa, self.p, self.cal_e, self.log_spectral, self.e_kappa, self.m_eff, self.dispersion]
            .into_iter()
            .map(Cell::from)
            .collect()
    }
}

impl ScanRecord for AkRow {
    fn columns() -> &'static [&'static str] {
        &["T", "n", "logdet_per_T", "ak_target", "ak_dev", "mass_fn", "mass_target", "mass_dev"]
    }
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.t.into(),
            self.n.into(),
            self.logdet_per_t.into(),
            self.ak_target.into(),
            self.ak_dev.into(),
            self.mass_fn.into(),
            self.mass_target.into(),
            self.mass_dev.into(),
        ]
    }
}

const AK_WITH_AMPLITUDE: &[&str] = &[
    "T", "n", "logdet_per_T", "ak_target", "ak_dev", "mass_fn", "mass_target", "mass_dev", "p", "vacuum_amplitude",
];

impl ScanRecord for WclRow {
    fn columns() -> &'static [&'static str] {
        &["kappa", "p", "epsilon", "E_p", "E_0", "gap", "target", "gap_dev", "E0_dev", "semigroup_res"]
    }
    fn cells(&self) -> Vec<Cell> {
        [
            self.kappa,
            self.p,
            self.epsilon,
            self.e_p,
            self.e_0,
            self.gap,
            self.target,
            self.gap_dev,
            self.e0_dev,
            self.semigroup_res,
        ]
        .into_iter()
        .map(Cell::from)
        .collect()
    }
}

/// Runs `work` over `items` on the pool, `chunk` at a time, handing results
/// to `sink` in input order as each chunk completes.
fn ordered_chunks<I, R, F, S>(items: &[I], chunk: usize, work: F, mut sink: S) -> Result<()>
where
    I: Sync,
    R: Send,
    F: Fn(&I) -> Result<R> + Sync,
    S: FnMut(R) -> Result<()>,
{
    for block in items.chunks(chunk.max(1)) {
        let results: Vec<Result<R>> = block.par_iter().map(&work).collect();
        for r in results {
            sink(r?)?;
        }
    }
    Ok(())
}

fn writer(cfg: &RunConfig, columns: &'static [&'static str]) -> Result<ScanWriter<Box<dyn Write>>> {
    let echo = serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let path = cfg.output.path.as_deref().unwrap_or("-");
    ScanWriter::new(open_output(path)?, cfg.output.format, &echo, columns)
}

fn write_report<T: Serialize>(cfg: &RunConfig, key: &str, report: &T) -> Result<()> {
    let echo = serde_json::to_value(cfg).map_err(|e| Error::Config(e.to_string()))?;
    let body = serde_json::json!({ "config": echo, key: report });
    let path = cfg.output.path.as_deref().unwrap_or("-");
    let mut out = open_output(path)?;
    let text = serde_json::to_string_pretty(&body).map_err(|e| Error::Config(e.to_string()))?;
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

/// Executes a resolved config.
pub fn execute(cfg: &RunConfig, jobs: usize) -> Result<()> {
    let name = cfg.subcommand.ok_or_else(|| Error::Config("no subcommand".into()))?;
    let p = &cfg.params;
    match name {
        SubcommandName::Validate => {
            let spec = cfg.measure.as_ref().expect("resolved");
            let ff = spec.build_unchecked()?;
            let assumptions = ff.validate_assumptions();
            let moments = ff.moment_report();
            match cfg.output.format {
                Format::Json => write_report(
                    cfg,
                    "report",
                    &serde_json::json!({ "moments": moments, "assumptions": assumptions }),
                )?,
                Format::Csv => {
                    let mut w = writer(
                        cfg,
                        &["M_plus1", "M_minus1", "M_minus2", "M_minus3", "ir_regular", "delta_m", "m_eff"],
                    )?;
                    w.write_cells(&[
                        moments.m_plus1.into(),
                        moments.m_minus1.into(),
                        moments.m_minus2.into(),
                        moments.m_minus3.into(),
                        moments.ir_regular.into(),
                        moments.delta_m.into(),
                        moments.m_eff.into(),
                    ])?;
                    w.finish()?;
                }
            }
            if let Some(c) = assumptions.failures.into_iter().next() {
                return Err(Error::Assumption { condition: c });
            }
            Ok(())
        }
        SubcommandName::Energy => {
            let ff = cfg.measure.as_ref().expect("resolved").build()?;
            let kappas = p.kappa_list.as_deref().unwrap_or_default();
            let ps = p.p_list.as_deref().unwrap_or_default();
            nonempty(kappas, "kappa_list")?;
            nonempty(ps, "p_list")?;
            let base = ground_energy(&ff)?;
            let m_eff = ff.m_eff()?;
            let pairs: Vec<(f64, f64)> = kappas.iter().flat_map(|&k| ps.iter().map(move |&q| (k, q))).collect();
            let mut w = writer(cfg, EnergyRow::columns())?;
            ordered_chunks(
                &pairs,
                jobs,
                |&(kappa, mom)| {
                    Ok(EnergyRow {
                        kappa,
                        p: mom,
                        cal_e: base.cal_e,
                        log_spectral: log_spectral_energy(&ff, kappa)?,
                        e_kappa: kappa * kappa * base.cal_e,
                        m_eff,
                        dispersion: dipole_dispersion(&ff, kappa, mom)?,
                    })
                },
                |row| w.write(&row),
            )?;
            w.finish()?;
            Ok(())
        }
        SubcommandName::CutoffScan => {
            let lambdas = p.lambda.as_deref().unwrap_or_default();
            nonempty(lambdas, "lambda")?;
            let (kappa, mom) = (p.kappa.unwrap_or(1.0), p.p.unwrap_or(0.0));
            let mut w = writer(cfg, CutoffRow::columns())?;
            ordered_chunks(lambdas, jobs, |&l| CutoffRow::compute(l, kappa, mom), |row| w.write(&row))?;
            w.finish()?;
            Ok(())
        }
        SubcommandName::WienerHopf => {
            let ff = cfg.measure.as_ref().expect("resolved").build()?;
            let kappa = p.kappa.unwrap_or(1.0);
            let ladder: Vec<f64> = match (&p.t_ladder, p.t) {
                (Some(l), _) => l.clone(),
                (None, Some(t)) => vec![t],
                (None, None) => unreachable!("resolved"),
            };
            nonempty(&ladder, "T_ladder")?;
            let columns = if p.p.is_some() { AK_WITH_AMPLITUDE } else { AkRow::columns() };
            let mut w = writer(cfg, columns)?;
            ordered_chunks(
                &ladder,
                jobs,
                |&t| {
                    let n = p.nodes.unwrap_or_else(|| default_nodes(t));
                    let row = wienerhopf::ak_convergence_report(&ff, kappa, &[t], |_| n)?.remove(0);
                    let amp = match p.p {
                        Some(mom) => Some(WienerHopfGrid::build(&ff, kappa, t, n)?.vacuum_amplitude(mom)?),
                        None => None,
                    };
                    Ok((row, amp))
                },
                |(row, amp)| {
                    let mut cells = row.cells();
                    if let (Some(a), Some(mom)) = (amp, p.p) {
                        cells.push(mom.into());
                        cells.push(a.into());
                    }
                    w.write_cells(&cells)
                },
            )?;
            w.finish()?;
            Ok(())
        }
        SubcommandName::Fock => {
            let modes = p.modes.as_deref().unwrap_or_default();
            let ntot = p.ntot.expect("resolved");
            let kappas = p.kappa_list.as_deref().unwrap_or_default();
            let ps = p.p_list.as_deref().unwrap_or_default();
            nonempty(kappas, "kappa_list")?;
            nonempty(ps, "p_list")?;
            let ops = FiberOperators::new(FockBasis::new(modes, ntot)?);
            let eps = p.epsilon.unwrap_or(1.0);
            let mut w = writer(cfg, WclRow::columns())?;
            ordered_chunks(
                kappas,
                jobs,
                |&k| fockdesk::wcl_scan(&ops, &[k], ps, eps, p.t),
                |rows| rows.iter().try_for_each(|r| w.write(r)),
            )?;
            w.finish()?;
            Ok(())
        }
        SubcommandName::HermiteCheck => {
            let report = hermite::invariant_report(cfg.seed)?;
            write_report(cfg, "report", &report)?;
            if !report.pass {
                return Err(Error::CheckFailed("generalized Hermite invariant grid".into()));
            }
            Ok(())
        }
    }
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    // Sequential dense kernels keep outputs bit-identical across runs.
    faer::set_global_parallelism(faer::Par::Seq);
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pf-wcl: {e}");
            return exit_code(&e);
        }
    };
    let jobs = cli.jobs.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("pf-wcl: cannot start worker pool: {e}");
            return 3;
        }
    };
    let name = cfg.subcommand.map(SubcommandName::as_str).unwrap_or("?");
    match pool.install(|| execute(&cfg, jobs)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pf-wcl {name}: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        2
    } else {
        3
    }
}
