//! The `compact-fourier` command line.
//!
//! Exit codes: 0 success, 1 a verified property failed, 2 malformed input,
//! 3 insufficient resolution. Verdicts of `diagnose` are data and never
//! change the exit code.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{run_suite, AuditConfig, Suite, SuiteReport};
use crate::error::Error;
use crate::fourier::{natural_cutoff, Harmonics};
use crate::group::GroupDescriptor;
use crate::io::{CoefficientsRecord, FunctionSpec, NormSummary, SCHEMA_VERSION};
use crate::pego::family::default_band;
use crate::pego::net::epsilon_net;
use crate::pego::profile::{default_mesh, ContinuityOptions, DualFiltration};
use crate::pego::verdict::diagnose_family;
use crate::pego::FamilyDefinition;
use crate::quadrature::{haar_quadrature, QuadratureRule};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "COMPACT_FOURIER_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "compact-fourier",
    version,
    about = "Fourier transforms on compact groups and precompactness diagnostics"
)]
pub struct Cli {
    /// Directory for output files; without it results go to stdout.
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier coefficients and norms of one function.
    Transform(TransformArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
    /// Profiles and precompactness verdicts for a family file.
    Diagnose(DiagnoseArgs),
    /// Merge diagnose outputs into plot-ready tables.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// cyclic:N, dihedral:N, torus:n, su2 or product(...).
    #[arg(long)]
    pub group: Option<String>,
    /// Quadrature resolution (trapezoid nodes per torus axis, SU(2) band).
    #[arg(long)]
    pub resolution: Option<u32>,
    /// Largest shell of the dual cutoff.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Tolerances, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.1, 0.01])]
    pub eps: Vec<f64>,
    /// Decreasing delta mesh, comma separated; defaults to a geometric mesh.
    #[arg(long, value_delimiter = ',')]
    pub delta: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub common: Common,
    /// const:c, char:<label>, entry:<label>:i:j, heat:t or file:path.
    #[arg(long = "f")]
    pub function: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Conjugate every irrep by a random unitary drawn from this seed.
    #[arg(long)]
    pub frame_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Family definition file.
    pub family: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub ball_samples: usize,
    /// Also build an eps-net for every tolerance.
    #[arg(long)]
    pub nets: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Outputs of `diagnose` or earlier reports.
    pub inputs: Vec<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResolutionTooSmall { .. } | Error::EmptyBall(_) => 3,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments and runs; the returned code is the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Transform(a) => transform(a, cli.out.as_deref()),
        Command::Verify(a) => verify(a, cli.out.as_deref()),
        Command::Diagnose(a) => diagnose(a, cli.out.as_deref()),
        Command::Report(a) => report::run(a, cli.out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn parse_group(s: Option<&str>, default: &str) -> CliResult<GroupDescriptor> {
    Ok(s.unwrap_or(default).parse::<GroupDescriptor>()?)
}

fn rule_for(group: &GroupDescriptor, resolution: Option<u32>, band: u32) -> CliResult<Arc<QuadratureRule>> {
    let rule = match resolution {
        Some(r) => haar_quadrature(group, r)?,
        None => QuadratureRule::for_band(group, band)?,
    };
    Ok(Arc::new(rule))
}

pub(crate) fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn write_output(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

pub(crate) fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub(crate) fn csv_string(rows: Vec<Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(|e| CliError::input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn transform(a: &TransformArgs, out: Option<&Path>) -> CliResult<u8> {
    let c = &a.common;
    let spec_group = parse_group(c.group.as_deref(), "torus:1")?;
    let spec = FunctionSpec::parse(&spec_group, &a.function)?;
    let (group, rule) = match &spec {
        FunctionSpec::File(p) => {
            let f = crate::io::read_sampled(p)?;
            if c.group.is_some() && *f.group() != spec_group {
                return Err(CliError::input(format!(
                    "{} holds a function on {}",
                    p.display(),
                    f.group()
                )));
            }
            (f.group().clone(), f.rule().clone())
        }
        _ => {
            let need = spec.shell().unwrap_or(0).max(c.cutoff.unwrap_or(0));
            let band = need.max(default_band(&spec_group).min(8));
            (spec_group.clone(), rule_for(&spec_group, c.resolution, band)?)
        }
    };
    if let Some(s) = spec.shell() {
        rule.require(s)?;
    }
    let cutoff = c.cutoff.unwrap_or_else(|| natural_cutoff(&rule));
    let h = Harmonics::new(rule.clone(), cutoff)?;
    let f = spec.sample(&h)?;
    let coeffs = h.forward(&f)?;
    let config = json!({
        "group": group.to_string(),
        "resolution": rule.resolution(),
        "cutoff": h.cutoff(),
        "function": spec.to_string(),
        "format": c.format,
    });
    let content = match c.format {
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "transform",
            "config": config,
            "coefficients": CoefficientsRecord::new(&coeffs),
            "norms": NormSummary::new(&f, &coeffs)?,
        }))?,
        Format::Csv => {
            let mut rows = vec![vec!["label", "dim", "i", "j", "re", "im"]
                .into_iter()
                .map(String::from)
                .collect()];
            for (l, b) in coeffs.iter() {
                for i in 0..l.dim() {
                    for j in 0..l.dim() {
                        let z = b[(i, j)];
                        rows.push(vec![
                            l.to_string(),
                            l.dim().to_string(),
                            (i + 1).to_string(),
                            (j + 1).to_string(),
                            crate::io::tidy(z.re).to_string(),
                            crate::io::tidy(z.im).to_string(),
                        ]);
                    }
                }
            }
            csv_string(rows)?
        }
    };
    match out {
        Some(dir) => {
            let ext = if c.format == Format::Json { "json" } else { "csv" };
            write_output(dir, &format!("transform.{ext}"), &content)?;
        }
        None => print!("{content}"),
    }
    Ok(0)
}

fn print_suite(r: &SuiteReport) {
    for (property, ok, total, worst) in r.summary() {
        println!(
            "{} {}/{property} ({ok}/{total}) worst {}: {:e} {} {:e}",
            if ok == total { "PASS" } else { "FAIL" },
            r.suite,
            worst.case,
            worst.lhs,
            worst.relation,
            worst.rhs
        );
    }
    for c in r.checks.iter().filter(|c| !c.passed) {
        println!(
            "  failed {}/{} {}: {:e} {} {:e}",
            r.suite, c.property, c.case, c.lhs, c.relation, c.rhs
        );
    }
}

fn verify(a: &VerifyArgs, out: Option<&Path>) -> CliResult<u8> {
    let c = &a.common;
    let suite: Suite = a.suite.parse()?;
    let group = parse_group(c.group.as_deref(), "torus:1")?;
    if a.samples == 0 {
        return Err(CliError::input("--samples must be at least 1"));
    }
    let cfg = AuditConfig {
        group: group.clone(),
        resolution: c.resolution,
        band: c.cutoff,
        samples: a.samples,
        seed: c.seed,
        exponents: c.p.clone(),
        frame_seed: a.frame_seed,
    };
    for p in &cfg.exponents {
        crate::norms::ExponentPair::new(*p)?;
    }
    let r = run_suite(suite, &cfg)?;
    print_suite(&r);
    if let Some(dir) = out {
        let name = format!("verify-{suite}");
        match c.format {
            Format::Json => {
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify",
                    "config": {
                        "suite": suite,
                        "group": group.to_string(),
                        "resolution": r.resolution,
                        "cutoff": r.band,
                        "p": cfg.exponents,
                        "samples": a.samples,
                        "seed": c.seed,
                        "frame_seed": a.frame_seed,
                        "format": c.format,
                    },
                    "passed": r.passed(),
                    "checks": r.checks,
                });
                write_output(dir, &format!("{name}.json"), &to_json(&doc)?)?;
            }
            Format::Csv => {
                let mut rows = vec![["property", "case", "lhs", "relation", "rhs", "passed"]
                    .map(String::from)
                    .to_vec()];
                for ch in &r.checks {
                    rows.push(vec![
                        ch.property.clone(),
                        ch.case.clone(),
                        ch.lhs.to_string(),
                        ch.relation.to_string(),
                        ch.rhs.to_string(),
                        ch.passed.to_string(),
                    ]);
                }
                write_output(dir, &format!("{name}.csv"), &csv_string(rows)?)?;
            }
        }
    }
    Ok(if r.passed() { 0 } else { 1 })
}

fn diagnose(a: &DiagnoseArgs, out: Option<&Path>) -> CliResult<u8> {
    let c = &a.common;
    let text = std::fs::read_to_string(&a.family)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", a.family.display())))?;
    let mut def =
        FamilyDefinition::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", a.family.display())))?;
    if let Some(g) = &c.group {
        if parse_group(Some(g), "")? != def.group {
            return Err(CliError::input(format!(
                "--group {g} disagrees with the family file's {}",
                def.group
            )));
        }
    }
    if c.resolution.is_some() {
        def.resolution = c.resolution;
    }
    if c.cutoff.is_some() {
        def.cutoff = c.cutoff;
    }
    let p = match c.p.as_slice() {
        [] => 2.0,
        [p] => *p,
        _ => return Err(CliError::input("diagnose takes a single --p")),
    };
    if c.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::input("--eps values must be positive"));
    }
    let k = def.build()?;
    let filtration = DualFiltration::for_family(&k);
    let mesh = if c.delta.is_empty() {
        default_mesh(k.group(), &c.eps, k.cutoff())
    } else {
        c.delta.clone()
    };
    let opts = ContinuityOptions {
        ball_samples: a.ball_samples,
        p,
        seed: c.seed,
        path: None,
    };
    let d = diagnose_family(&k, &c.eps, &filtration, &mesh, &opts)?;
    let nets: Vec<serde_json::Value> = if a.nets {
        c.eps
            .iter()
            .map(|e| match epsilon_net(&k, *e, &opts) {
                Ok(n) => json!({"eps": e, "net": n}),
                Err(err) => json!({"eps": e, "refused": err.to_string()}),
            })
            .collect()
    } else {
        vec![]
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "diagnose",
        "config": {
            "eps": c.eps,
            "delta": mesh,
            "p": p,
            "ball_samples": a.ball_samples,
            "seed": c.seed,
            "nets": a.nets,
            "format": c.format,
        },
        "family": k.definition,
        "members": k.member_names(),
        "diagnosis": d,
        "nets": nets,
    });
    let summary = report::FamilySummary::from_diagnose(&doc).map_err(CliError::input)?;
    let stem = sanitize(k.name());
    match out {
        Some(dir) => {
            write_output(dir, &format!("{stem}.diagnose.json"), &to_json(&doc)?)?;
            let (tails, omega) = report::tables(std::slice::from_ref(&summary))?;
            write_output(dir, &format!("{stem}.tail_vs_shell.csv"), &tails)?;
            write_output(dir, &format!("{stem}.omega_vs_delta.csv"), &omega)?;
            for v in &d.verdicts {
                println!(
                    "{} eps={}: {} (bounded {}, decay {}, equicontinuous {})",
                    k.name(),
                    v.eps,
                    serde_json::to_value(v.conclusion)
                        .map_err(Error::from)?
                        .as_str()
                        .unwrap_or(""),
                    v.bounded.flag,
                    v.uniform_decay.flag,
                    v.equicontinuous.flag
                );
            }
        }
        None => match c.format {
            Format::Json => print!("{}", to_json(&doc)?),
            Format::Csv => {
                let (tails, omega) = report::tables(std::slice::from_ref(&summary))?;
                print!("{tails}\n{omega}");
            }
        },
    }
    Ok(0)
}
