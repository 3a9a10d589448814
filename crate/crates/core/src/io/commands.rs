use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::entropy::{max_entropy_audit, AuditOptions, PeriodicProductState};
use crate::error::{Error, Result};
use crate::macroflow::{
    find_eta1, integrate_flow_through, normal_fixed_point, normal_to_coherent, perturbed_start, scan_eta, uniform_grid,
    ClassifyOptions, Trajectory,
};
use crate::microdyn::{
    asymptotic_theta_with, integrate_theta, theta_fourier, BlochVector, PilotField, ASYMPTOTIC_HORIZON,
};
use crate::model::{packed_labels, unpack_state, MacroState, ModelParams};
use crate::oracle::{convergence_report, ConvergenceOptions, ConvergenceReport};

use super::config::{OracleSection, RunConfig};
use super::output::{Cell, Table, TOOL_NAME, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Macro,
    Scan,
    Micro,
    Entropy,
    Oracle,
    Compare,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Macro, Command::Scan, Command::Micro, Command::Entropy, Command::Oracle, Command::Compare];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Macro => "macro",
            Command::Scan => "scan",
            Command::Micro => "micro",
            Command::Entropy => "entropy",
            Command::Oracle => "oracle",
            Command::Compare => "compare",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown command `{s}`")))
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    command: Command,
    seed: u64,
    dir: PathBuf,
}

impl Ctx<'_> {
    fn table(&self, name: &str, columns: Vec<String>) -> Table {
        Table::new(name, columns)
            .meta("tool", format!("{TOOL_NAME} {VERSION}"))
            .meta("command", self.command.as_str())
            .meta("config_hash", &self.cfg.hash)
            .meta("seed", self.seed)
    }

    fn write(&self, table: &Table) -> Result<PathBuf> {
        table.write(&self.dir, self.cfg.output.format)
    }
}

fn missing(section: &str) -> Error {
    Error::Config { path: section.into(), message: "section required by this command is missing".into() }
}

fn packed_or(params: &ModelParams, x0: Option<&Vec<f64>>, fallback: MacroState) -> Result<MacroState> {
    match x0 {
        Some(v) => unpack_state(v, params.n),
        None => Ok(fallback),
    }
}

/// Runs one command and returns the files written.
pub fn run(command: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let seed = opts.seed.or(cfg.entropy.as_ref().map(|e| e.seed)).unwrap_or(0);
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    let ctx = Ctx { cfg, command, seed, dir };
    match command {
        Command::Macro => run_macro(&ctx),
        Command::Scan => run_scan(&ctx),
        Command::Micro => run_micro(&ctx),
        Command::Entropy => run_entropy(&ctx),
        Command::Oracle | Command::Compare => run_oracle(&ctx),
    }
}

fn run_macro(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let p = &ctx.cfg.model;
    let m = &ctx.cfg.macro_run;
    let x0 = packed_or(p, m.x0.as_ref(), normal_fixed_point(p))?;
    let times = uniform_grid(0.0, m.t_end, m.sample_dt);
    let traj = integrate_flow_through(p, &x0, &times[1..], m.tol)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(packed_labels(p.n));
    let mut table = ctx.table("trajectory", columns).meta("tol", m.tol);
    for &t in &times {
        let mut row = vec![Cell::Num(t)];
        row.extend(traj.packed_at(t)?.into_iter().map(Cell::Num));
        table.push(row);
    }
    Ok(vec![ctx.write(&table)?])
}

fn run_scan(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let p = &ctx.cfg.model;
    let s = ctx.cfg.scan.as_ref().ok_or_else(|| missing("scan"))?;
    if s.points < 2 || !(s.eta_max > s.eta_min) {
        return Err(Error::Config { path: "scan".into(), message: "need points >= 2 and eta_max > eta_min".into() });
    }
    let etas: Vec<f64> =
        (0..s.points).map(|k| s.eta_min + (s.eta_max - s.eta_min) * k as f64 / (s.points - 1) as f64).collect();
    let mut opts = ClassifyOptions::default_for(p);
    opts.tol = s.tol;
    if let Some(t) = s.t_transient {
        opts.t_transient = t;
    }
    opts.t_sample = s.t_sample.unwrap_or(10.0 * opts.t_transient);
    let rows = scan_eta(p, &etas, |q| perturbed_start(q, s.perturbation), opts)?;
    let transition = normal_to_coherent(&rows);

    let columns = ["eta", "label", "largest_lyapunov", "nu", "mode", "transition"];
    let mut table = ctx
        .table("scan", columns.iter().map(|c| c.to_string()).collect())
        .meta("t_transient", opts.t_transient)
        .meta("t_sample", opts.t_sample)
        .meta("tol", opts.tol);
    table = match find_eta1(p, (s.eta_min, s.eta_max)) {
        Ok(h) => table
            .meta("eta1", h.eta1)
            .meta("eta1_bracket_lo", h.bracket.0)
            .meta("eta1_bracket_hi", h.bracket.1)
            .meta("crossing_imag", h.crossing.im),
        Err(e) => table.meta("eta1", format!("none ({e})")),
    };
    for row in &rows {
        let marker = match transition {
            Some((_, hi)) if hi == row.eta => "normal->coherent",
            _ => "",
        };
        table.push(vec![
            row.eta.into(),
            row.label.as_str().into(),
            row.largest_lyapunov.into(),
            row.nu.into(),
            row.mode.into(),
            marker.into(),
        ]);
    }
    Ok(vec![ctx.write(&table)?])
}

fn theta_cells(v: &BlochVector) -> [Cell; 3] {
    [v.x().into(), v.y().into(), v.z().into()]
}

fn run_micro(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let p = &ctx.cfg.model;
    let m = ctx.cfg.micro.as_ref().ok_or_else(|| missing("micro"))?;
    if m.sites.is_empty() || !(m.t_end >= m.t_start) || !(m.sample_dt > 0.0) {
        return Err(Error::Config {
            path: "micro".into(),
            message: "need at least one site, t_end >= t_start and sample_dt > 0".into(),
        });
    }
    let gamma_t = p.bloch_decay_rate() * m.t_start;
    if gamma_t < ASYMPTOTIC_HORIZON {
        return Err(Error::InsufficientHorizon { gamma_t, required: ASYMPTOTIC_HORIZON });
    }
    let x0 = packed_or(p, m.x0.as_ref(), perturbed_start(p, 1e-2))?;
    let times = uniform_grid(m.t_start, m.t_end, m.sample_dt);
    let traj = integrate_flow_through(p, &x0, &times, m.tol)?;

    let series = m.sites.par_iter().map(|&r| site_rows(&traj, r, &times, m.tol)).collect::<Result<Vec<_>>>()?;
    let columns = ["t", "r", "theta_x", "theta_y", "theta_z", "fourier_x", "fourier_y", "fourier_z", "deviation"];
    let mut theta = ctx.table("micro_theta", columns.iter().map(|c| c.to_string()).collect()).meta("tol", m.tol);
    for (k, &t) in times.iter().enumerate() {
        for (&r, rows) in m.sites.iter().zip(&series) {
            let (a, f) = rows[k];
            let mut row = vec![Cell::Num(t), Cell::Int(r)];
            row.extend(theta_cells(&a));
            row.extend(theta_cells(&f));
            row.push(a.distance(&f).into());
            theta.push(row);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let picks: Vec<(i64, f64)> = (0..m.checks)
        .map(|_| {
            let r = m.sites[rng.random_range(0..m.sites.len())];
            let t = if m.t_end > m.t_start { rng.random_range(m.t_start..=m.t_end) } else { m.t_start };
            (r, t)
        })
        .collect();
    let checks = picks
        .par_iter()
        .map(|&(r, t)| Ok((r, t, asymptotic_theta_with(r, t, &traj, m.tol)?.distance(&theta_fourier(r, t, &traj)?))))
        .collect::<Result<Vec<_>>>()?;
    let max_dev = checks.iter().map(|c| c.2).fold(0.0, f64::max);
    let mut agreement =
        ctx.table("micro_agreement", vec!["r".into(), "t".into(), "deviation".into()]).meta("max_deviation", max_dev);
    for (r, t, d) in checks {
        agreement.push(vec![r.into(), t.into(), d.into()]);
    }
    Ok(vec![ctx.write(&theta)?, ctx.write(&agreement)?])
}

fn site_rows(traj: &Trajectory, r: i64, times: &[f64], tol: f64) -> Result<Vec<(BlochVector, BlochVector)>> {
    let field = PilotField::from_trajectory(traj);
    let mut theta = BlochVector::new(0.0, 0.0, 0.0);
    let mut t_prev = traj.t_start();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        theta = integrate_theta(r, theta, t_prev, t, &field, traj.params(), tol)?;
        t_prev = t;
        out.push((theta, theta_fourier(r, t, traj)?));
    }
    Ok(out)
}

fn run_entropy(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let p = &ctx.cfg.model;
    let e = ctx.cfg.entropy.as_ref().ok_or_else(|| missing("entropy"))?;
    let thetas = match &e.thetas {
        Some(list) => list.iter().map(|t| BlochVector::new(t[0], t[1], t[2])).collect(),
        None => vec![BlochVector::new(0.0, 0.0, p.eta); p.n],
    };
    let target = PeriodicProductState::new(thetas)?;
    let report =
        max_entropy_audit(&target, AuditOptions { trials: e.trials, block_size: e.block_size, seed: ctx.seed })?;
    let columns = ["trial", "amplitude", "density", "marginal_deviation", "subadditivity_excess"];
    let mut table = ctx
        .table("entropy_audit", columns.iter().map(|c| c.to_string()).collect())
        .meta("period", report.period)
        .meta("block_size", report.block_size)
        .meta("target_density", super::output::format_float(report.target_density))
        .meta("max_trial_density", super::output::format_float(report.max_trial_density))
        .meta("collapsed", report.collapsed)
        .meta("pass", report.pass);
    for t in &report.samples {
        table.push(vec![
            t.index.into(),
            t.amplitude.into(),
            t.density.into(),
            t.marginal_deviation.into(),
            t.subadditivity_excess.into(),
        ]);
    }
    Ok(vec![ctx.write(&table)?])
}

fn oracle_report(ctx: &Ctx, o: &OracleSection) -> Result<ConvergenceReport> {
    let p = &ctx.cfg.model;
    let x0 = match &o.x0 {
        Some(v) => unpack_state(v, p.n)?,
        None => packed_or(p, ctx.cfg.macro_run.x0.as_ref(), normal_fixed_point(p))?,
    };
    let opts = ConvergenceOptions {
        n_list: o.n_list.clone(),
        cutoffs: o.cutoffs.clone(),
        t_grid: o.t_grid.clone(),
        tol: o.tol,
        dimension_cap: o.dimension_cap,
    };
    convergence_report(p, &x0, &opts)
}

fn run_oracle(ctx: &Ctx) -> Result<Vec<PathBuf>> {
    let o = ctx.cfg.oracle.as_ref().ok_or_else(|| missing("oracle"))?;
    let report = oracle_report(ctx, o)?;
    let n = ctx.cfg.model.n;
    let mut files = Vec::new();
    if ctx.command == Command::Compare {
        let columns = ["n_half", "atoms", "dim", "error_s", "error_p", "error_alpha", "error", "max_scaled_photons"];
        let mut table = ctx
            .table("compare", columns.iter().map(|c| c.to_string()).collect())
            .meta("macro_tol", o.tol)
            .meta("oracle_tol", o.tol)
            .meta("photon_bound", super::output::format_float(report.photon_bound))
            .meta("photon_bound_holds", report.photon_bound_holds);
        for r in &report.rows {
            table.push(vec![
                r.n_half.into(),
                r.atoms.into(),
                r.dim.into(),
                r.error_s.into(),
                r.error_p.into(),
                r.error_alpha.into(),
                r.error.into(),
                r.max_scaled_photons.into(),
            ]);
        }
        files.push(ctx.write(&table)?);
        return Ok(files);
    }
    let mut columns = vec!["t".to_string()];
    for l in 0..n {
        columns.extend([format!("re_s_{l}"), format!("im_s_{l}")]);
    }
    for l in 0..n {
        columns.extend([format!("re_p_{l}"), format!("im_p_{l}")]);
    }
    for l in 0..n {
        columns.extend([format!("re_alpha_{l}"), format!("im_alpha_{l}"), format!("photons_{l}")]);
    }
    for r in &report.rows {
        let mut table = ctx
            .table(&format!("oracle_N{}", r.n_half), columns.clone())
            .meta("atoms", r.atoms)
            .meta("cutoffs", json!(r.cutoffs))
            .meta("tol", o.tol);
        for e in &r.series {
            let mut row = vec![Cell::Num(e.time)];
            row.extend(e.s.iter().flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)]));
            row.extend(e.p.iter().flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)]));
            for l in 0..n {
                row.extend([e.alpha[l].re.into(), e.alpha[l].im.into(), e.scaled_photons[l].into()]);
            }
            table.push(row);
        }
        files.push(ctx.write(&table)?);
    }
    Ok(files)
}

/// Machine-readable error record printed on failure.
pub fn error_record(command: Option<&str>, err: &Error) -> String {
    let mut rec = json!({ "error": err.kind(), "message": err.to_string() });
    if let (Some(c), Some(obj)) = (command, rec.as_object_mut()) {
        obj.insert("command".into(), json!(c));
    }
    if let (Error::Config { path, .. }, Some(obj)) = (err, rec.as_object_mut()) {
        obj.insert("path".into(), json!(path));
    }
    rec.to_string()
}

/// Parses the config at `config` and runs `command`.
pub fn run_from_path(command: Command, config: &Path, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let cfg = super::config::read_config(config)?;
    run(command, &cfg, opts)
}
