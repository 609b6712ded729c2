//! The `contact-bethe` command line: one verification per subcommand, a JSON
//! or table report, and exit code 0 (passed), 1 (check failed) or 2 (bad input).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bethe::{
    assemble_unchecked, boundary_residual, eigen_residual, hyperplane_probes, interior_points, random_unit_column,
};
use crate::bound_states::{
    bound_n_body_string, bound_separated, verify_bound_state, BoundStateFamily, SeparatedCoupling,
};
use crate::boundary::{BoundaryCondition, Coupling, NonseparatedBC};
use crate::config::{GridConfig, RunConfig};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scattering::{bethe_smatrix, build_smatrix, order_independence_residual};
use crate::tensor::{identity, ComplexMatrix};
use crate::yang_ops::YOperator;
use crate::ybe_check::{check_all, classify_nonseparated, YBE11};

#[derive(Debug, Parser)]
#[command(name = "contact-bethe", version, about = "Bethe-ansatz checks for particles with contact interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Overrides `run.tol`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Yang-Baxter, inverse and commuting-pair relations for the configured boundary.
    Ybe,
    /// Integrability verdicts over a grid of nonseparated parameters.
    ClassifyScan,
    /// Assemble a Bethe state and check path independence and boundary conditions.
    BetheVerify,
    /// Construct and verify bound states.
    Bound,
    /// Factorized S-matrix with unitarity, symmetry and order-independence residuals.
    Smatrix,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ybe => "ybe",
            Command::ClassifyScan => "classify-scan",
            Command::BetheVerify => "bethe-verify",
            Command::Bound => "bound",
            Command::Smatrix => "smatrix",
        }
    }
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| c2(m[(i, j)])).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into()
}

fn operator(cfg: &RunConfig) -> Result<(YOperator, BoundaryCondition)> {
    let bc = cfg.boundary_condition()?;
    let op = YOperator::from_boundary(&bc, cfg.space()?, cfg.system.statistics)?;
    Ok((op, bc))
}

pub fn cmd_ybe(cfg: &RunConfig) -> Result<Report> {
    let (op, bc) = operator(cfg)?;
    let report = check_all(&op, cfg.run.samples, cfg.run.seed, cfg.run.tol)?;
    let passed = report.verdict.passed();
    let results = json!({ "boundary": bc.name(), "ybe": report });
    Ok(Report::new(Command::Ybe.name(), cfg, passed, results))
}

fn expected_integrable(bc: &NonseparatedBC) -> bool {
    let eps = 1e-12;
    bc.theta.abs() < eps && bc.b.abs() < eps && ((bc.a - 1.0).abs() < eps || (bc.a + 1.0).abs() < eps)
}

pub fn cmd_classify_scan(cfg: &RunConfig) -> Result<Report> {
    let grid = match (&cfg.run.grid, cfg.boundary_condition()?) {
        (Some(g), _) => g.clone(),
        (None, BoundaryCondition::Nonseparated(bc)) if bc.a != 0.0 && ((1.0 + bc.b * bc.c) / bc.a - bc.d).abs() < 1e-12 => {
            GridConfig { theta: vec![bc.theta], a: vec![bc.a], b: vec![bc.b], c: vec![bc.c] }
        }
        (None, _) => {
            return Err(Error::InvalidParameter(
                "classify-scan needs run.grid or a nonseparated boundary".into(),
            ))
        }
    };
    let mut rows = Vec::new();
    let (mut mismatches, mut ybe11_mismatches, mut integrable) = (0usize, 0usize, 0usize);
    for &theta in &grid.theta {
        for &b in &grid.b {
            for &a in &grid.a {
                for &c in &grid.c {
                    let bc = NonseparatedBC::from_theta_a_b_c(theta, a, b, c)?;
                    let r = classify_nonseparated(&bc, cfg.system.n, cfg.run.samples, cfg.run.seed, cfg.run.tol_classify)?;
                    let expected = expected_integrable(&bc);
                    let ybe11_pass = r.ybe11.verdict.passed();
                    mismatches += usize::from(r.is_integrable() != expected);
                    ybe11_mismatches += usize::from(ybe11_pass != expected);
                    integrable += usize::from(r.is_integrable());
                    rows.push(json!({
                        "theta": theta, "a": a, "b": b, "c": c, "d": bc.d,
                        "ybe11_residual": r.ybe11.residual(YBE11),
                        "ybe11_pass": ybe11_pass,
                        "ybe22_residual": r.ybe22.max_residual(),
                        "integrable": r.is_integrable(),
                        "expected_integrable": expected,
                    }));
                }
            }
        }
    }
    let results = json!({
        "points": rows.len(),
        "integrable_points": integrable,
        "classification_mismatches": mismatches,
        "ybe11_only_mismatches": ybe11_mismatches,
        "grid": rows,
    });
    Ok(Report::new(Command::ClassifyScan.name(), cfg, mismatches == 0, results))
}

fn all_pairs(particles: usize) -> Vec<(usize, usize)> {
    (0..particles).flat_map(|i| (i + 1..particles).map(move |j| (i, j))).collect()
}

pub const BOUNDARY_TOL: f64 = 1e-9;
pub const EIGEN_TOL: f64 = 1e-5;

pub fn cmd_bethe_verify(cfg: &RunConfig) -> Result<Report> {
    let (op, bc) = operator(cfg)?;
    let momenta = cfg
        .momenta()
        .ok_or_else(|| Error::InvalidParameter("bethe-verify needs run.momenta".into()))?;
    let space = op.space();
    let u = random_unit_column(space.dim(), cfg.run.seed);
    let state = match assemble_unchecked(&op, &momenta, &u) {
        Ok(s) => s,
        Err(e @ (Error::PoleAtParameter { .. } | Error::SingularResolvent { .. })) => {
            let results = json!({ "pole": e.to_string() });
            return Ok(Report::new(Command::BetheVerify.name(), cfg, false, results));
        }
        Err(e) => return Err(e),
    };
    let path_ok = state.path_residual() <= cfg.run.tol;
    let mut boundary = Vec::new();
    let mut worst_boundary = 0.0f64;
    if path_ok {
        for (i, j) in all_pairs(space.particles) {
            let probes = hyperplane_probes(space.particles, i, j, cfg.run.probes, cfg.run.seed.wrapping_add((i * 31 + j) as u64));
            let r = boundary_residual(&state, i, j, &bc, &probes)?;
            worst_boundary = worst_boundary.max(r.max_residual);
            boundary.push(r);
        }
    }
    let mut eigen = 0.0f64;
    for x in interior_points(space.particles, cfg.run.probes, 0.01, cfg.run.seed) {
        eigen = eigen.max(eigen_residual(&state, &x, state.energy(), 1e-4)?);
    }
    let passed = path_ok && worst_boundary < BOUNDARY_TOL && eigen < EIGEN_TOL;
    let results = json!({
        "boundary": bc.name(),
        "path_residual": state.path_residual(),
        "divergent_path": !path_ok,
        "boundary_residuals": boundary,
        "max_boundary_residual": if path_ok { Some(worst_boundary) } else { None },
        "eigen_residual": eigen,
        "energy": c2(state.energy()),
    });
    Ok(Report::new(Command::BetheVerify.name(), cfg, passed, results))
}

fn family_json(f: &BoundStateFamily, cfg: &RunConfig) -> Result<(Value, bool)> {
    let v = verify_bound_state(f, &f.boundary, cfg.run.probes, cfg.run.seed)?;
    let passed = v.passed;
    Ok((
        json!({
            "kind": f.kind,
            "eigenvalue": f.eigenvalue,
            "kappa": f.kappa,
            "momenta": f.momenta.iter().map(|&k| c2(k)).collect::<Vec<_>>(),
            "energy": f.energy,
            "degeneracy": f.degeneracy(),
            "sign_pattern": f.sign_pattern,
            "verification": v,
        }),
        passed,
    ))
}

pub fn cmd_bound(cfg: &RunConfig) -> Result<Report> {
    let bc = cfg.boundary_condition()?;
    let (n, particles, stats) = (cfg.system.n, cfg.system.particles, cfg.system.statistics);
    let spin_delta = |h: ComplexMatrix| -> Result<(Vec<BoundStateFamily>, Option<String>)> {
        match bound_n_body_string(&h, particles, cfg.run.a_param, cfg.run.c_param, stats) {
            Ok(f) => Ok((f, None)),
            Err(e @ Error::NoInvariantSpinVector { .. }) => Ok((Vec::new(), Some(e.to_string()))),
            Err(e) => Err(e),
        }
    };
    let (families, note, patterns) = match &bc {
        BoundaryCondition::SpinDelta(s) => {
            let (f, note) = spin_delta(s.h.clone())?;
            (f, note, None)
        }
        BoundaryCondition::Nonseparated(s) if s.theta == 0.0 && s.a == 1.0 && s.d == 1.0 && s.b == 0.0 => {
            let (f, note) = spin_delta(identity(n * n) * Complex64::from(s.c))?;
            (f, note, None)
        }
        BoundaryCondition::Separated(s) => match s.symmetric_coupling() {
            Some(Coupling::Finite(q)) => {
                let r = bound_separated(&SeparatedCoupling::Scalar(q), particles, n, stats)?;
                (r.families.clone(), None, Some(r))
            }
            _ => return Err(Error::Unsupported("bound states need a finite symmetric separated coupling".into())),
        },
        BoundaryCondition::SeparatedSpin(s) => {
            let r = bound_separated(&SeparatedCoupling::Matrix(s.g.clone()), particles, n, stats)?;
            (r.families.clone(), None, Some(r))
        }
        other => {
            return Err(Error::Unsupported(format!("no bound-state construction for the {} family", other.name())))
        }
    };
    let mut passed = true;
    let mut rows = Vec::new();
    for f in &families {
        let (row, ok) = family_json(f, cfg)?;
        passed &= ok;
        rows.push(row);
    }
    let mut results = json!({
        "boundary": bc.name(),
        "states": families.iter().map(|f| f.degeneracy()).sum::<usize>(),
        "families": rows,
        "note": note,
    });
    if let Some(r) = patterns {
        let empty = r.empty_patterns().len();
        results["patterns"] = serde_json::to_value(&r.patterns).expect("patterns serialize");
        results["patterns_per_eigenvalue"] = r.patterns_per_eigenvalue.into();
        results["empty_patterns"] = empty.into();
        results["degeneracy_discrepancy"] = (empty > 0).into();
    }
    Ok(Report::new(Command::Bound.name(), cfg, passed, results))
}

pub fn cmd_smatrix(cfg: &RunConfig) -> Result<Report> {
    let (op, bc) = operator(cfg)?;
    let momenta = cfg
        .momenta()
        .ok_or_else(|| Error::InvalidParameter("smatrix needs run.momenta".into()))?;
    if momenta.iter().any(|k| k.im != 0.0) {
        return Err(Error::NonAscendingMomenta);
    }
    let real: Vec<f64> = momenta.iter().map(|k| k.re).collect();
    let s = build_smatrix(&op, &real)?;
    let order = if real.len() >= 3 { Some(order_independence_residual(&op, &real)?) } else { None };
    let consistency = (&s.matrix - bethe_smatrix(&op, &real)?).norm();
    let tol = cfg.run.tol;
    let passed = s.unitarity_residual() < tol
        && s.symmetry_residual() < tol
        && order.map_or(true, |r| r < tol)
        && consistency < BOUNDARY_TOL;
    let results = json!({
        "boundary": bc.name(),
        "word": s.word,
        "unitarity_residual": s.unitarity_residual(),
        "symmetry_residual": s.symmetry_residual(),
        "order_independence_residual": order,
        "bethe_consistency_residual": consistency,
        "matrix": matrix_json(&s.matrix),
    });
    Ok(Report::new(Command::Smatrix.name(), cfg, passed, results))
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = match command {
        Command::Ybe => cmd_ybe(cfg),
        Command::ClassifyScan => cmd_classify_scan(cfg),
        Command::BetheVerify => cmd_bethe_verify(cfg),
        Command::Bound => cmd_bound(cfg),
        Command::Smatrix => cmd_smatrix(cfg),
    }?;
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--config is required".into()))?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(seed) = cli.seed {
        cfg.run.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.run.tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = match load(&cli).and_then(|cfg| execute(cli.command, &cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(if report.passed { 0 } else { 1 })
}
