//! Command line front end: `check`, `table` and `selftest`.
//!
//! Exit codes: 0 success, 1 table mismatch or failed self-test, 2 invalid
//! input, 3 indeterminate numerical rank, 4 internal failure.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{catalog_spec, group_label, render_table, table_report, GammaType, Group, Params};
use crate::criterion::{check_criterion_with, Tolerances, RANK_TOL, RESIDUAL_TOL};
use crate::error::SpinError;
use crate::lift::HolonomySpec;
use crate::props::{self, PropertyOutcome};
use crate::spin_rep::build_gammas;
use crate::{DEFAULT_MAX_N, MAX_DIM};

pub const SCHEMA: &str = "spinlift/1";
pub const MAX_N_ENV: &str = "SPINLIFT_MAX_N";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "spinlift",
    version,
    about = "Lift holonomy groups to Spin(n) and count parallel spinors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Largest ambient dimension to consider.
    #[arg(long, global = true)]
    pub max_n: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Relative singular value threshold for fixed spaces.
    #[arg(long, global = true, default_value_t = RANK_TOL)]
    pub tol_rank: f64,

    /// Bound on the residual of returned fixed spinors.
    #[arg(long, global = true, default_value_t = RESIDUAL_TOL)]
    pub tol_residual: f64,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether one group lifts with fixed spinors.
    Check {
        #[arg(long)]
        group: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        gamma_type: Option<String>,
        /// Include orthonormal bases of the fixed spinors.
        #[arg(long)]
        emit_basis: bool,
    },
    /// Reproduce the classification table up to `--max-n`.
    Table,
    /// Run the randomized invariant checks.
    Selftest,
}

/// Settings shared by all commands after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol: Tolerances,
    pub max_n: usize,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    /// Resolve flags against the dimension cap taken from `env_cap`
    /// (the value of `SPINLIFT_MAX_N`, if set).
    pub fn resolve(
        common: &CommonArgs,
        env_cap: Option<&str>,
        default_format: Format,
    ) -> Result<Self, SpinError> {
        let cap = match env_cap {
            None => DEFAULT_MAX_N,
            Some(s) => {
                let v: usize = s.trim().parse().map_err(|_| {
                    SpinError::InvalidParameter(format!("{MAX_N_ENV} must be an integer, got '{s}'"))
                })?;
                if v == 0 || v > MAX_DIM {
                    return Err(SpinError::InvalidParameter(format!(
                        "{MAX_N_ENV} must lie in 1..={MAX_DIM}, got {v}"
                    )));
                }
                v
            }
        };
        let max_n = common.max_n.unwrap_or(cap);
        if max_n > cap {
            return Err(SpinError::InvalidParameter(format!(
                "--max-n {max_n} exceeds the dimension cap {cap} (raise it with {MAX_N_ENV})"
            )));
        }
        let tol = Tolerances {
            rank: common.tol_rank,
            residual: common.tol_residual,
            ..Tolerances::default()
        };
        tol.validate()?;
        Ok(Self {
            tol,
            max_n,
            format: common.format.unwrap_or(default_format),
            seed: common.seed,
        })
    }

    fn tolerances_are_default(&self) -> bool {
        self.tol == Tolerances::default()
    }
}

pub fn exit_code_for(e: &SpinError) -> i32 {
    match e {
        SpinError::IndeterminateRank { .. } | SpinError::UnstableRank(_) | SpinError::ResidualTooLarge(_) => {
            EXIT_INDETERMINATE
        }
        SpinError::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

/// Output of one command: exit code plus what goes to stdout and stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &SpinError) -> Self {
        Self {
            code: exit_code_for(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let (Some(map), Value::Object(body)) = (v.as_object_mut(), body) {
        map.extend(body);
    }
    v
}

fn build_spec(
    group: &str,
    m: Option<usize>,
    d: Option<usize>,
    gamma: Option<&str>,
) -> Result<HolonomySpec, SpinError> {
    let group: Group = group.parse()?;
    let gamma = gamma.map(str::parse::<GammaType>).transpose()?;
    catalog_spec(group, &Params { m, d, gamma })
}

pub fn cmd_check(
    group: &str,
    m: Option<usize>,
    d: Option<usize>,
    gamma: Option<&str>,
    emit_basis: bool,
    cfg: &RunConfig,
) -> Outcome {
    let spec = match build_spec(group, m, d, gamma) {
        Ok(s) => s,
        Err(e) => return Outcome::error(&e),
    };
    if spec.n > cfg.max_n {
        return Outcome::error(&SpinError::InvalidParameter(format!(
            "{} lives in dimension {} above the cap {} (raise it with {MAX_N_ENV})",
            spec.label, spec.n, cfg.max_n
        )));
    }
    let report = match build_gammas(spec.n).and_then(|g| check_criterion_with(&spec, &g, &cfg.tol)) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let stdout = match cfg.format {
        Format::Json => render_json(&envelope(
            "check",
            json!({ "report": report.to_json(emit_basis) }),
        )),
        Format::Table => {
            let mut s = format!(
                "{} in SO({}), spinor dimension {}\n",
                report.spec.label, report.spec.n, report.dim_sigma
            );
            for o in &report.per_lift {
                let n = o
                    .fixed
                    .as_ref()
                    .map(|f| f.dim.to_string())
                    .unwrap_or_else(|| "-".into());
                s.push_str(&format!(
                    "  signs {:?}  valid {}  N {}\n",
                    o.assignment.signs.signs(),
                    o.assignment.valid,
                    n
                ));
                for f in &o.assignment.failures {
                    s.push_str(&format!("    {f}\n"));
                }
            }
            s.push_str(&format!(
                "admits parallel spinor: {}  structures: {}\n",
                report.admits_parallel_spinor, report.structure_count
            ));
            for w in &report.warnings {
                s.push_str(&format!("warning: {w}\n"));
            }
            s
        }
    };
    Outcome::ok(EXIT_OK, stdout)
}

pub fn cmd_table(cfg: &RunConfig) -> Outcome {
    let rows = match table_report(cfg.max_n, &cfg.tol) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let all = rows.iter().all(|r| r.matched);
    let stdout = match cfg.format {
        Format::Json => render_json(&envelope(
            "table",
            json!({ "max_n": cfg.max_n, "rows": rows, "all_matched": all }),
        )),
        Format::Table => render_table(&rows),
    };
    Outcome::ok(if all { EXIT_OK } else { EXIT_FAILED }, stdout)
}

/// All invariant checks at the given seed and dimension cap.
pub fn selftest_outcomes(cfg: &RunConfig) -> Vec<PropertyOutcome> {
    let seed = cfg.seed;
    let max_n = cfg.max_n;
    let random_n = 2..=max_n.min(10);
    let count = 20;
    let mut out = vec![props::gamma_anticommutation(1..=max_n)];
    for n in random_n.clone() {
        out.push(props::rho_equivariance(seed, n, count));
        out.push(props::rho_lie_morphism(seed, n, count));
        out.push(props::double_cover_compatibility(seed, n, count));
        out.push(props::section_identity(seed, n, count));
        out.push(props::two_to_one(seed, n, count));
        out.push(props::cover_homomorphism(seed, n, count));
        out.push(props::exp_pathway(seed, n, count));
    }
    for n in 2..=max_n.min(8) {
        out.push(props::clifford_algebra_laws(seed, n, count));
        out.push(props::twisted_adjoint_orthogonal(seed, n, count));
    }
    for spec in props::discrete_specs(max_n) {
        out.push(props::relation_parity(&spec));
        out.push(props::distinct_lifts(&spec));
    }
    let tol = &cfg.tol;
    for m in 2..=max_n / 2 {
        out.push(props::exclusion(Group::U, m, tol));
    }
    for m in 1..=max_n / 4 {
        out.push(props::exclusion(Group::Sp1Sp, m, tol));
    }
    for n in 3..=max_n {
        out.push(props::exclusion(Group::SO, n, tol));
    }
    let small: Vec<HolonomySpec> = [
        (Group::SU, Params::m(2)),
        (Group::SU, Params::m(3)),
        (Group::Sp, Params::m(2)),
        (Group::G2, Params::default()),
        (Group::Spin7, Params::default()),
        (Group::SUxZ2, Params::m(4)),
        (Group::SpxZd, Params::md(2, 3)),
    ]
    .into_iter()
    .filter_map(|(g, p)| catalog_spec(g, &p).ok())
    .filter(|s| s.n <= max_n.min(8))
    .collect();
    for spec in &small {
        out.push(props::conjugation_invariance(seed, spec, tol));
        if spec.n % 2 == 1 {
            out.push(props::odd_irrep_independence(spec, tol));
        }
    }
    for n in [3, 5, 7].into_iter().filter(|&n| n <= max_n) {
        if let Ok(spec) = catalog_spec(Group::SO, &Params::m(n)) {
            out.push(props::odd_irrep_independence(&spec, tol));
        }
    }
    let pairs = [
        ((Group::SU, Params::m(4)), (Group::SUxZ2, Params::m(4))),
        ((Group::SU, Params::m(4)), (Group::U, Params::m(4))),
        ((Group::Sp, Params::m(2)), (Group::SpxZd, Params::md(2, 3))),
        ((Group::Sp, Params::m(2)), (Group::Sp1Sp, Params::m(2))),
        ((Group::G2, Params::default()), (Group::SO, Params::m(7))),
    ];
    for ((gs, ps), (gl, pl)) in pairs {
        if let (Ok(s), Ok(l)) = (catalog_spec(gs, &ps), catalog_spec(gl, &pl)) {
            if l.n <= max_n {
                out.push(props::monotonicity(&s, &l, tol));
            }
        }
    }
    out
}

pub fn cmd_selftest(cfg: &RunConfig) -> Outcome {
    let outcomes = selftest_outcomes(cfg);
    let first_failure = outcomes.iter().find(|o| !o.passed);
    let tolerance_note = (!cfg.tolerances_are_default() && first_failure.is_some())
        .then_some("failures may be tolerance-induced: non-default tolerances are in effect");
    let stdout = match cfg.format {
        Format::Json => render_json(&envelope(
            "selftest",
            json!({
                "seed": cfg.seed,
                "max_n": cfg.max_n,
                "checks": outcomes,
                "passed": first_failure.is_none(),
                "first_failure": first_failure.map(|o| o.name.clone()),
                "note": tolerance_note,
            }),
        )),
        Format::Table => {
            let mut s = String::new();
            for o in &outcomes {
                let status = if o.passed { "pass" } else { "FAIL" };
                s.push_str(&format!("{status}  {}", o.name));
                if o.bound > 0.0 {
                    s.push_str(&format!(
                        "  (max residual {:.2e} < {:.0e})",
                        o.max_residual, o.bound
                    ));
                }
                if let Some(d) = &o.detail {
                    s.push_str(&format!("  {d}"));
                }
                s.push('\n');
            }
            s
        }
    };
    let mut outcome = Outcome::ok(
        if first_failure.is_some() {
            EXIT_FAILED
        } else {
            EXIT_OK
        },
        stdout,
    );
    if let Some(f) = first_failure {
        outcome.stderr = format!("first failing invariant: {}\n", f.name);
        if let Some(note) = tolerance_note {
            outcome.stderr.push_str(&format!("{note}\n"));
        }
    }
    outcome
}

/// Parse arguments and run; `env_cap` is the value of `SPINLIFT_MAX_N`.
pub fn run(cli: &Cli, env_cap: Option<&str>) -> Outcome {
    let default_format = match cli.command {
        Command::Table => Format::Table,
        Command::Selftest => Format::Table,
        Command::Check { .. } => Format::Json,
    };
    let cfg = match RunConfig::resolve(&cli.common, env_cap, default_format) {
        Ok(c) => c,
        Err(e) => return Outcome::error(&e),
    };
    match &cli.command {
        Command::Check {
            group,
            m,
            d,
            gamma_type,
            emit_basis,
        } => cmd_check(group, *m, *d, gamma_type.as_deref(), *emit_basis, &cfg),
        Command::Table => cmd_table(&cfg),
        Command::Selftest => cmd_selftest(&cfg),
    }
}

/// Entry point used by the binary.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let env_cap = std::env::var(MAX_N_ENV).ok();
    let out = run(&cli, env_cap.as_deref());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    out.code
}

/// Label of a group as printed in reports, for callers that only hold
/// command line strings.
pub fn describe(group: &str, m: Option<usize>, d: Option<usize>) -> Result<String, SpinError> {
    let g: Group = group.parse()?;
    Ok(group_label(g, &Params { m, d, gamma: None }))
}
