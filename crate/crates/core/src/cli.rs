//! Command-line front end.
//!
//! Every subcommand builds a JSON report. Reports are printed with sorted
//! keys and floats rounded to 12 significant digits; the exit code is 0 iff
//! no verdict in the report is a failure.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cross_bases::{model_c_basis, model_r_basis, verify_cross_basis};
use crate::dev_certify::{self as dc, CertifyError};
use crate::flag_geometry::{self as fg, FlagError};
use crate::g2_lie::{g2_dimension, leibniz_system};
use crate::hitchin_solver::{self as hs, Family, HitchinData, HitchinError, HitchinState, SolveOptions};
use crate::octonion_core::{identity_suite, table_agreement, BasisTag, OctError};
use crate::pencil_bases::{self as pb, FrenetSplitting, PencilError};

pub const CSV_HEADER_PREFIX: &str = "# g2-forge grid v1";
const SIG_DIGITS: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Hitchin(#[from] HitchinError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error(transparent)]
    Oct(#[from] OctError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "g2-forge", version, about = "Split octonions, G2' geometry, cyclic Hitchin solves and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplication table, identity suite and derivation algebra.
    VerifyAlgebra(VerifyArgs),
    /// Solve the cyclic Hitchin system on a periodic grid.
    Solve(SolveArgs),
    /// Run one of the positivity certificates.
    Certify(CertifyArgs),
    /// Sample a fiber of a base of pencils.
    SampleFiber(SampleArgs),
    /// Stability of cyclic bundles from degree and vanishing data.
    Classify(ClassifyArgs),
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Compute the derivation algebra with exact arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Number of random exact samples in the identity suite.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    FlatConstant,
    Hitchin,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Beta,
    Alpha,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Beta => Family::Beta,
            FamilyArg::Alpha => Family::Alpha,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Defaults to `custom` when `--data` is given and `hitchin` otherwise.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..))]
    pub grid: u32,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Data grids for the custom preset: a0², b0², d0², κ stacked (4n × n).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Family whose maximum principles are checked.
    #[arg(long, value_enum, default_value = "beta")]
    pub family: FamilyArg,
    /// Write the solution fields v1, v2 stacked (2n × n).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    BetaImmersion,
    AlphaImmersion,
    PhoPolynomials,
    HitchinSpan,
    PhoTransversality,
}

#[derive(Debug, clap::Args)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    /// Random samples (immersion cases) or parameter points (span).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Phase grid size for the transversality sweep.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..))]
    pub grid: u32,
    #[arg(long, default_value_t = dc::DELTA_MARGIN)]
    pub delta_margin: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FiberKind {
    Ein,
    Pho,
}

#[derive(Debug, clap::Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: FiberKind,
    /// Grid points per fiber coordinate.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(4..))]
    pub resolution: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum, default_value = "beta")]
    pub family: FamilyArg,
    #[arg(long)]
    pub genus: i64,
    /// Degree of the distinguished line bundle; omit with --table.
    #[arg(long, allow_hyphen_values = true)]
    pub degree: Option<i64>,
    /// The α entry is nonzero.
    #[arg(long)]
    pub alpha: bool,
    /// The β entry is nonzero.
    #[arg(long)]
    pub beta: bool,
    /// The δ entry is nonzero.
    #[arg(long)]
    pub delta: bool,
    /// The two nonzero sections share their divisor.
    #[arg(long)]
    pub same_divisor: bool,
    /// Tabulate every degree and vanishing pattern for the genus.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Output.

/// Round to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Round every float in the tree; non-finite floats become strings.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            serde_json::Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// True iff no string in the report is a failing verdict.
pub fn all_pass(v: &Value) -> bool {
    match v {
        Value::String(s) => !matches!(s.as_str(), "fail" | "counterexample"),
        Value::Array(a) => a.iter().all(all_pass),
        Value::Object(o) => o.values().all(all_pass),
        _ => true,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn emit(report: Value, path: Option<&Path>) -> Result<bool, CliError> {
    let report = normalize(report);
    let ok = all_pass(&report);
    let text = serde_json::to_string_pretty(&report)?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| CliError::Io { path: p.to_path_buf(), source: e })?,
        None => {
            use std::io::Write;
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
        }
    }
    Ok(ok)
}

// ---------------------------------------------------------------------------
// Grids.

/// Parse a grid file: header `# g2-forge grid v1 rows cols`, then `rows`
/// comma-separated lines of `cols` numbers.
pub fn parse_grid(text: &str) -> Result<(usize, usize, Vec<f64>), CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| CliError::Parse("empty grid file".into()))?;
    let dims: Vec<usize> = header
        .strip_prefix(CSV_HEADER_PREFIX)
        .ok_or_else(|| CliError::Parse(format!("bad header `{header}`")))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| CliError::Parse(format!("bad dimension `{t}`"))))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(CliError::Parse("header needs rows and cols".into()));
    };
    let mut out = Vec::with_capacity(rows * cols);
    for (r, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| CliError::Parse(format!("row {r}: bad number `{t}`"))))
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(CliError::Parse(format!("row {r}: {} columns, expected {cols}", row.len())));
        }
        out.extend(row);
    }
    if out.len() != rows * cols {
        return Err(CliError::Parse(format!("{} rows, expected {rows}", out.len() / cols.max(1))));
    }
    Ok((rows, cols, out))
}

pub fn format_grid(rows: usize, cols: usize, vals: &[f64]) -> String {
    let mut s = format!("{CSV_HEADER_PREFIX} {rows} {cols}\n");
    for r in 0..rows {
        let line: Vec<String> = vals[r * cols..(r + 1) * cols].iter().map(|x| format!("{:.*e}", SIG_DIGITS - 1, x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

/// Custom Hitchin data from a stacked 4n × n grid file.
pub fn load_hitchin_data(path: &Path) -> Result<HitchinData, CliError> {
    let (rows, n, v) = parse_grid(&read(path)?)?;
    if rows != 4 * n {
        return Err(CliError::Parse(format!("expected {} rows for 4 stacked {n}x{n} grids, found {rows}", 4 * n)));
    }
    let m = n * n;
    let f = |k: usize| v[k * m..(k + 1) * m].to_vec();
    Ok(HitchinData::new(n, hs::DEFAULT_LENGTH, f(0), f(1), f(2), f(3))?)
}

// ---------------------------------------------------------------------------
// Subcommands.

pub fn run_verify_algebra(args: &VerifyArgs) -> Result<Value, CliError> {
    let agree = table_agreement();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let ids = identity_suite(&mut rng, args.samples);
    let dim = if args.exact {
        g2_dimension(BasisTag::MImag)?
    } else {
        49 - crate::linalg::rank(&leibniz_system::<f64>(BasisTag::MImag)?, 1e-9)
    };
    let bases_ok = [model_c_basis(), model_r_basis()].iter().all(|b| verify_cross_basis(&b.vectors, 0.0).is_valid());
    Ok(json!({
        "table1": format!("{agree}/49"),
        "dcp": verdict(ids.double_cross == 0),
        "identities": verdict(ids.failures() == 0),
        "identity_failures": ids,
        "model_bases": verdict(bases_ok),
        "g2_dim": dim,
        "g2_dim_check": verdict(dim == 14),
        "table1_check": verdict(agree == 49),
        "exact": args.exact,
    }))
}

fn summary(v: &[f64]) -> Value {
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    json!({ "min": min, "max": max, "mean": v.iter().sum::<f64>() / v.len() as f64 })
}

fn mean_ratio(num: &[f64], den: &[f64]) -> Option<f64> {
    if den.iter().any(|d| *d <= 0.0) {
        return None;
    }
    Some(num.iter().zip(den).map(|(a, b)| (a / b).sqrt()).sum::<f64>() / num.len() as f64)
}

pub fn run_solve(args: &SolveArgs) -> Result<Value, CliError> {
    let n = args.grid as usize;
    let preset = match (args.preset, &args.data) {
        (None, Some(_)) => Preset::Custom,
        (None, None) => Preset::Hitchin,
        (Some(Preset::Custom), _) | (Some(_), None) => args.preset.unwrap(),
        (Some(p), Some(_)) => {
            let name = p.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            return Err(CliError::Parse(format!("--data cannot be combined with --preset {name}")));
        }
    };
    let data = match preset {
        Preset::FlatConstant => HitchinData::flat_constant(n),
        Preset::Hitchin => HitchinData::hitchin(n),
        Preset::Custom => {
            let path = args.data.as_ref().ok_or_else(|| CliError::Parse("--data is required with --preset custom".into()))?;
            load_hitchin_data(path)?
        }
    };
    let n = data.n;
    let opts = SolveOptions { tol: args.tol, max_iter: args.max_iter };
    let rep = hs::solve(&data, &HitchinState::zero(n), opts)?;
    let nm = rep.state.norms(&data);
    let mp = hs::check_max_principles(&rep.state, &data, args.family.into());
    if let Some(p) = &args.csv {
        let mut v = rep.state.v1.clone();
        v.extend_from_slice(&rep.state.v2);
        fs::write(p, format_grid(2 * n, n, &v)).map_err(|e| CliError::Io { path: p.clone(), source: e })?;
    }
    let mut ratios = serde_json::Map::new();
    for (k, num, den) in [
        ("alpha_over_beta", &nm.alpha_sq, &nm.beta_sq),
        ("delta_over_beta", &nm.delta_sq, &nm.beta_sq),
        ("beta_over_alpha", &nm.beta_sq, &nm.alpha_sq),
    ] {
        if let Some(r) = mean_ratio(num, den) {
            ratios.insert(k.into(), json!(r));
        }
    }
    Ok(json!({
        "preset": format!("{preset:?}").to_lowercase(),
        "grid": n,
        "iterations": rep.iterations,
        "final_residual": rep.final_residual,
        "converged": verdict(rep.final_residual <= args.tol),
        "norms": {
            "alpha_sq": summary(&nm.alpha_sq),
            "beta_sq": summary(&nm.beta_sq),
            "delta_sq": summary(&nm.delta_sq),
        },
        "ratios": ratios,
        "max_principle": {
            "family": mp.family,
            "checks": mp.checks.iter().map(|c| json!({
                "name": c.name, "sup": c.sup, "bound": c.bound, "verdict": verdict(c.pass),
            })).collect::<Vec<_>>(),
            "verdict": verdict(mp.pass),
        },
    }))
}

fn certificate_value(c: &dc::Certificate) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(c)?;
    v["min"] = json!(c.min_value);
    Ok(v)
}

pub fn run_certify(args: &CertifyArgs) -> Result<Value, CliError> {
    match args.case {
        Case::BetaImmersion => {
            let s = args.samples.unwrap_or(100_000);
            certificate_value(&dc::sweep_beta_immersion(s, args.seed, args.delta_margin))
        }
        Case::AlphaImmersion => {
            let s = args.samples.unwrap_or(100_000);
            certificate_value(&dc::sweep_alpha_immersion(s, args.seed))
        }
        Case::PhoPolynomials => {
            let certs = dc::pho_polynomial_certificates();
            let mut out = serde_json::Map::new();
            for c in &certs {
                out.insert(c.name.clone(), json!(c.verdict));
            }
            out.insert("certificates".into(), serde_json::to_value(&certs)?);
            Ok(Value::Object(out))
        }
        Case::HitchinSpan => certificate_value(&dc::span_sweep(args.samples.unwrap_or(100))),
        Case::PhoTransversality => {
            let grid = args.grid as usize;
            let rep = dc::fuchsian_pho_transversality(grid)?;
            let mut v = certificate_value(&dc::transversality_certificate(grid)?)?;
            v["eigen_residuals"] = json!(rep.eigen_residuals);
            v["top_eigenvalues"] = json!(rep.top_eigenvalues);
            Ok(v)
        }
    }
}

fn cell(k: usize, r: usize, span: f64) -> f64 {
    span * (k as f64 + 0.5) / r as f64
}

/// Unit vector of `span{x, n1, n2}` at sphere angles.
fn sphere_point(fr: &FrenetSplitting, theta: f64, phi: f64) -> fg::V {
    fg::combo(&[theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin()], &[fr.x, fr.n[0], fr.n[1]])
}

pub fn run_sample_fiber(args: &SampleArgs) -> Result<Value, CliError> {
    let r = args.resolution as usize;
    let fr = FrenetSplitting::model();
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    let mut worst_null: f64 = 0.0;
    let mut failures = 0usize;
    match args.kind {
        FiberKind::Ein => {
            let pencil = pb::beta_pencil(&fr);
            for i in 0..r {
                for j in 0..r {
                    let u = sphere_point(&fr, cell(i, r, PI), cell(j, r, TAU));
                    for k in 0..r {
                        let a = cell(k, r, TAU);
                        let v = fg::add(&fg::scale(a.cos(), &fr.b[0]), &fg::scale(a.sin(), &fr.b[1]));
                        let l = pb::ein_fiber_point(&fr, &u, &v, 1e-9)?;
                        let res = pb::beta_base_residuals(&pencil, &l);
                        worst = res.iter().fold(worst, |m, x| m.max(x.abs()));
                        worst_null = worst_null.max(fg::q(&l.rep, &l.rep).abs());
                        failures += (!pb::beta_base_membership(&pencil, &l, args.tol)) as usize;
                        points.push(json!(l.rep));
                    }
                }
            }
        }
        FiberKind::Pho => {
            let pencil = pb::alpha_pencil(&fr);
            // a plane of span{x, n1, n2} is recorded by its normal; the upper
            // hemisphere covers each plane once
            for i in 0..r {
                for j in 0..r {
                    let nrm = sphere_point(&fr, cell(i, r, PI / 2.0), cell(j, r, TAU));
                    let seed = if nrm[0].abs() < 0.9 { fr.x } else { fr.n[0] };
                    let w1 = fg::hat(&fg::sub(&seed, &fg::scale(fg::q(&seed, &nrm), &nrm))).expect("nonzero");
                    let w2 = fg::cross(&nrm, &w1);
                    for k in 0..r {
                        let nb = pb::NbMap::from_angle(&fr, cell(k, r, TAU));
                        let w = pb::pho_fiber_point(&fr, &pencil, &w1, &w2, &nb)?;
                        let res = pb::pho_base_residuals(&pencil, &w)?;
                        worst = res.iter().fold(worst, |m, x| m.max(x.abs()));
                        let c = fg::cross(&w.basis[0], &w.basis[1]);
                        worst_null = worst_null.max(fg::euclid(&c));
                        failures += (!pb::pho_base_membership(&pencil, &w, args.tol)?) as usize;
                        points.push(json!(w.basis));
                    }
                }
            }
        }
    }
    let null_key = match args.kind {
        FiberKind::Ein => "max_null_residual",
        FiberKind::Pho => "max_cross_residual",
    };
    Ok(json!({
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "resolution": r,
        "count": points.len(),
        "points": points,
        "max_base_residual": worst,
        null_key: worst_null,
        "membership_failures": failures,
        "verdict": verdict(failures == 0 && worst_null < 1e-12),
    }))
}

pub fn run_classify(args: &ClassifyArgs) -> Result<Value, CliError> {
    let family: Family = args.family.into();
    let base = hs::StabilityInput {
        family,
        genus: args.genus,
        degree: 0,
        alpha_nonzero: args.alpha,
        beta_nonzero: args.beta,
        delta_nonzero: args.delta,
        same_divisor: args.same_divisor,
    };
    if args.table {
        let g = args.genus;
        let mut rows = Vec::new();
        for d in -(6 * g - 6)..=(6 * g - 6) {
            for (a, b, dl) in [(true, true, true), (true, true, false), (true, false, true), (false, true, true), (true, false, false), (false, true, false)] {
                for same in [false, true] {
                    let inp = hs::StabilityInput { degree: d, alpha_nonzero: a, beta_nonzero: b, delta_nonzero: dl, same_divisor: same, ..base };
                    if let Ok(s) = hs::classify_stability(&inp) {
                        rows.push(json!({
                            "degree": d, "alpha": a, "beta": b, "delta": dl, "same_divisor": same, "stability": s,
                        }));
                    }
                }
            }
        }
        return Ok(json!({ "family": family, "genus": g, "rows": rows }));
    }
    let degree = args.degree.ok_or_else(|| CliError::Parse("--degree is required unless --table is given".into()))?;
    let input = hs::StabilityInput { degree, ..base };
    let stability = hs::classify_stability(&input)?;
    Ok(json!({
        "family": family,
        "genus": args.genus,
        "degree": degree,
        "alpha": args.alpha,
        "beta": args.beta,
        "delta": args.delta,
        "same_divisor": args.same_divisor,
        "stability": stability,
    }))
}

pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let (report, path) = match &cli.command {
        Command::VerifyAlgebra(a) => (run_verify_algebra(a)?, a.json.as_deref()),
        Command::Solve(a) => (run_solve(a)?, a.json.as_deref()),
        Command::Certify(a) => (run_certify(a)?, a.json.as_deref()),
        Command::SampleFiber(a) => (run_sample_fiber(a)?, a.json.as_deref()),
        Command::Classify(a) => (run_classify(a)?, a.json.as_deref()),
    };
    emit(report, path)
}

/// Parse `std::env::args`, run, and return the process exit code: 0 when all
/// verdicts pass, 1 when some check fails, 2 on usage or runtime errors.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
