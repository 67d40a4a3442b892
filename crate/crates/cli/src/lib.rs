//! Command-line front end for the `surfmod` library.
//!
//! Every command produces a [`Report`]: the resolved tolerances, a
//! command-specific JSON payload and a list of named checks. Reports are
//! deterministic for a fixed configuration and seed; wall time is printed
//! only in the plain-text rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use nalgebra::DVector;
use serde_json::{json, Value};

use surfmod::free_words::{fox_derivative, verify_fox_identity, Presentation, Word};
use surfmod::holonomy::{self, HolonomyConfig, PathConnection};
use surfmod::lie_model::LieGroupModel;
use surfmod::reduction_models::{self as rm, LinearMomentumModel, ModelKind, PsdStratum};
use surfmod::rep_cohomology::{
    build_complex, classify_orbit_type, conjugation_isomorphism_check,
    cross_product_sum, enumerate_central_reps, obstruction_quadratic, relator_defect,
    sample_cone_directions, stabilizer_fixed_subspace, stabilizer_generators,
    ObstructionModel, RepDocument, RepSource, ResolvedRep, Tolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

const DEFAULT_SAMPLES: usize = 200;
const DEFAULT_SEED: u64 = 0;
/// Harvest step for tangent-cone sampling.
const CONE_STEP: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NoConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }
}

impl From<surfmod::Error> for CliError {
    fn from(e: surfmod::Error) -> Self {
        match e {
            surfmod::Error::NoConvergence { .. } => Self::NoConvergence(e.to_string()),
            other => Self::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "surfmod", version, about = "Twisted cohomology, strata and local models of surface-group representation spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of samples for sampling-based checks.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Print the JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long = "tol-rank", global = true)]
    pub tol_rank: Option<f64>,
    /// Relator defect below which a point counts as a representation.
    #[arg(long = "tol-defect", global = true)]
    pub tol_defect: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct RepArgs {
    /// Group: SU2, SO3, U1 or a product such as SU2xU1.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub genus: Option<usize>,
    /// Central element the relator evaluates to (+I or -I).
    #[arg(long)]
    pub central: Option<String>,
    /// central:[+,-,…], torus:[θ1,…] or random:<seed>.
    #[arg(long)]
    pub rep: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    So2,
    So3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fox derivatives of a word in the free group.
    Fox {
        /// Word such as x1*x2*x1^-1*x2^-1.
        word: String,
        /// Number of free generators.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Twisted cohomology at a representation.
    Cohomology(RepArgs),
    /// Harvest tangent directions of the variety and measure their span.
    ConeSpan(RepArgs),
    /// Orbit type, stabilizer action on H¹ and conjugation checks.
    Stratify(RepArgs),
    /// Consolidated genus-two SU2 reproduction.
    Genus2Su2Report,
    /// Momentum-map local models.
    Reduction {
        #[arg(value_enum)]
        model: ModelArg,
    },
    /// Holonomy and derivative-of-holonomy checks for a path connection.
    HolonomyCheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Fox { .. } => "fox",
            Self::Cohomology(_) => "cohomology",
            Self::ConeSpan(_) => "cone-span",
            Self::Stratify(_) => "stratify",
            Self::Genus2Su2Report => "genus2-su2-report",
            Self::Reduction { .. } => "reduction",
            Self::HolonomyCheck => "holonomy-check",
        }
    }
}

/// Tolerances as they may appear in a configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank_tol: Option<f64>,
    pub defect_tol: Option<f64>,
    pub fd_step: Option<f64>,
}

/// A representation job: the representation document plus run settings.
#[derive(Debug, Clone, Deserialize)]
pub struct JobConfig {
    pub group: Option<String>,
    pub genus: Option<usize>,
    pub central: Option<String>,
    pub rep: Option<RepSource>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

/// One named pass/fail item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub samples: usize,
    pub result: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_INVARIANT
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Plain-text rendering mirroring the JSON payload.
    pub fn to_table(&self, wall_time: Option<f64>) -> String {
        let mut out = String::new();
        let t = &self.tolerances;
        let _ = writeln!(out, "command      {}", self.command);
        let _ = writeln!(
            out,
            "tolerances   rank_tol={:e} defect_tol={:e} fd_step={:e}",
            t.rank_tol, t.defect_tol, t.fd_step
        );
        let _ = writeln!(out, "seed         {}", self.seed);
        let _ = writeln!(out, "samples      {}", self.samples);
        let mut rows = Vec::new();
        flatten("", &self.result, &mut rows);
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in rows {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{mark}  {:<32} {}", c.name, c.detail);
        }
        let _ = writeln!(out, "status       {}", if self.passed { "ok" } else { "FAILED" });
        if let Some(secs) = wall_time {
            let _ = writeln!(out, "wall time    {secs:.3} s");
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Settings shared by all commands after merging defaults, config and flags.
pub struct Settings {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub samples: usize,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("invalid config {}: {e}", path.display())))
}

fn settings(common: &CommonArgs, config: Option<&JobConfig>) -> CliResult<Settings> {
    let mut tol = Tolerances::default();
    if let Some(c) = config {
        tol.rank_tol = c.tolerances.rank_tol.unwrap_or(tol.rank_tol);
        tol.defect_tol = c.tolerances.defect_tol.unwrap_or(tol.defect_tol);
        tol.fd_step = c.tolerances.fd_step.unwrap_or(tol.fd_step);
    }
    tol.rank_tol = common.tol_rank.unwrap_or(tol.rank_tol);
    tol.defect_tol = common.tol_defect.unwrap_or(tol.defect_tol);
    for (name, v) in [("rank_tol", tol.rank_tol), ("defect_tol", tol.defect_tol), ("fd_step", tol.fd_step)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Input(format!("{name} must be positive, got {v}")));
        }
    }
    let seed = common
        .seed
        .or(config.and_then(|c| c.seed))
        .unwrap_or(DEFAULT_SEED);
    let samples = common
        .samples
        .or(config.and_then(|c| c.samples))
        .unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Input("samples must be at least 1".into()));
    }
    Ok(Settings {
        tolerances: tol,
        seed,
        samples,
    })
}

fn rep_document(args: &RepArgs, config: Option<&JobConfig>) -> CliResult<RepDocument> {
    let group = args
        .group
        .clone()
        .or(config.and_then(|c| c.group.clone()))
        .unwrap_or_else(|| "SU2".into());
    let genus = args.genus.or(config.and_then(|c| c.genus)).unwrap_or(2);
    if genus == 0 {
        return Err(CliError::Input("genus must be at least 1".into()));
    }
    let central = args
        .central
        .clone()
        .or(config.and_then(|c| c.central.clone()))
        .unwrap_or_else(|| "+I".into());
    let rep = match (&args.rep, config.and_then(|c| c.rep.clone())) {
        (Some(text), _) => RepSource::Named(text.clone()),
        (None, Some(source)) => source,
        (None, None) => {
            return Err(CliError::Input(
                "no representation given (use --rep or a config with a `rep` field)".into(),
            ))
        }
    };
    Ok(RepDocument {
        group,
        genus,
        central,
        rep,
    })
}

/// Parses arguments, runs the command and returns the report.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let config: Option<JobConfig> = match (&cli.command, &cli.common.config) {
        (Command::HolonomyCheck, _) | (_, None) => None,
        (_, Some(path)) => Some(read_json(path)?),
    };
    let s = settings(&cli.common, config.as_ref())?;
    let (result, checks) = match &cli.command {
        Command::Fox { word, n } => cmd_fox(word, *n)?,
        Command::Cohomology(args) => cmd_cohomology(&rep_document(args, config.as_ref())?, &s)?,
        Command::ConeSpan(args) => cmd_cone_span(&rep_document(args, config.as_ref())?, &s)?,
        Command::Stratify(args) => cmd_stratify(&rep_document(args, config.as_ref())?, &s)?,
        Command::Genus2Su2Report => cmd_genus2_su2_report(&s)?,
        Command::Reduction { model } => cmd_reduction(*model, &s)?,
        Command::HolonomyCheck => {
            let path = cli
                .common
                .config
                .as_ref()
                .ok_or_else(|| CliError::Input("holonomy-check needs --config".into()))?;
            cmd_holonomy_check(&read_json(path)?, &s)?
        }
    };
    let command = match &cli.command {
        Command::Reduction { model } => format!("reduction {}", model_kind(*model)),
        other => other.name().to_string(),
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        command,
        tolerances: s.tolerances,
        seed: s.seed,
        samples: s.samples,
        result,
        checks,
        passed,
    })
}

type Outcome = CliResult<(Value, Vec<Check>)>;

pub fn cmd_fox(text: &str, n: usize) -> Outcome {
    let word = Word::parse(text, n)?;
    let derivatives = (0..n)
        .map(|j| {
            let d = fox_derivative(&word, j, n)?;
            Ok(json!({ "generator": format!("x{}", j + 1), "derivative": d.to_string() }))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let identity = verify_fox_identity(&word);
    let result = json!({
        "word": word.to_string(),
        "generators": n,
        "derivatives": derivatives,
        "fundamental_identity": identity,
    });
    Ok((result, vec![Check::new("fundamental_identity", identity, "1 - w = Σ (1 - x_j) ∂w/∂x_j")]))
}

fn resolve(doc: &RepDocument) -> CliResult<ResolvedRep> {
    Ok(doc.resolve()?)
}

fn cohomology_payload(r: &ResolvedRep, tol: &Tolerances) -> (Value, Vec<Check>) {
    let defect = relator_defect(&r.presentation, &r.rep, &r.class);
    let on_variety = defect < tol.defect_tol;
    let cd = build_complex(&r.presentation, &r.rep, tol);
    let orbit = classify_orbit_type(&r.rep, tol.rank());
    let genus = r.presentation.genus().unwrap_or(0);
    let mut checks = vec![Check::new(
        "on_variety",
        on_variety,
        format!("relator defect {defect:.3e} vs {:.1e}", tol.defect_tol),
    )];
    checks.push(Check::new(
        "euler_characteristic",
        cd.euler_characteristic_holds(),
        "h0 - h1 + h2 = (1 - n + m) dim g",
    ));
    if on_variety {
        checks.push(Check::new(
            "cochain_complex",
            cd.cochain_defect() <= 1e-9,
            format!("|D1 D0| = {:.3e}", cd.cochain_defect()),
        ));
        checks.push(Check::new(
            "duality",
            cd.duality_holds(genus),
            format!("h0 = h2 and h1 = 2 h0 + {} dim g", 2 * genus as i64 - 2),
        ));
    }
    let result = json!({
        "group": r.group.name(),
        "genus": genus,
        "relator_defect": defect,
        "on_variety": on_variety,
        "h_dims": [cd.h_dims.h0, cd.h_dims.h1, cd.h_dims.h2],
        "rank_d0": cd.rank0,
        "rank_d1": cd.rank1,
        "cochain_defect": cd.cochain_defect(),
        "stabilizer_dim": orbit.stabilizer_dim,
        "stratum": orbit.label,
    });
    (result, checks)
}

pub fn cmd_cohomology(doc: &RepDocument, s: &Settings) -> Outcome {
    let r = resolve(doc)?;
    Ok(cohomology_payload(&r, &s.tolerances))
}

fn cone_payload(r: &ResolvedRep, s: &Settings, count: usize, seed: u64) -> Outcome {
    let sampling = sample_cone_directions(
        &r.presentation,
        &r.rep,
        &r.class,
        count,
        seed,
        CONE_STEP,
        &s.tolerances,
    )?;
    let result = json!({
        "attempts": sampling.attempts,
        "failures": sampling.failures,
        "success_rate": sampling.success_rate(),
        "span_dim_z1": sampling.span_dim_z1,
        "dim_z1": sampling.z1_dim,
        "span_dim_h1": sampling.span_dim_h1,
        "h1": sampling.h1_dim,
        "step": sampling.step,
        "max_obstruction_on_harvest": sampling.max_obstruction,
    });
    let checks = vec![
        Check::new(
            "span_h1",
            sampling.span_dim_h1 == sampling.h1_dim,
            format!("{} of {}", sampling.span_dim_h1, sampling.h1_dim),
        ),
        Check::new(
            "span_z1",
            sampling.span_dim_z1 == sampling.z1_dim,
            format!("{} of {}", sampling.span_dim_z1, sampling.z1_dim),
        ),
        Check::new(
            "projection_success",
            sampling.success_rate() >= 0.95,
            format!("{:.3} (need 0.95)", sampling.success_rate()),
        ),
    ];
    Ok((result, checks))
}

pub fn cmd_cone_span(doc: &RepDocument, s: &Settings) -> Outcome {
    let r = resolve(doc)?;
    cone_payload(&r, s, s.samples, s.seed)
}

fn stratify_payload(r: &ResolvedRep, s: &Settings) -> Outcome {
    let tol = &s.tolerances;
    let orbit = classify_orbit_type(&r.rep, tol.rank());
    let gens = stabilizer_generators(&r.rep, tol.rank());
    let fixed = stabilizer_fixed_subspace(&r.presentation, &r.rep, &gens, tol)?;
    let x = r.group.random_element_seeded(s.seed);
    let conjugated = r.rep.conjugate(&x);
    let invariant = classify_orbit_type(&conjugated, tol.rank()) == orbit;
    let iso = conjugation_isomorphism_check(&r.presentation, &r.rep, &x, tol);
    let central_count = enumerate_central_reps(&r.presentation, &r.group, &r.class)
        .ok()
        .map(|v| v.len());
    let result = json!({
        "stabilizer_dim": orbit.stabilizer_dim,
        "stratum": orbit.label,
        "stabilizer_generators": gens.len(),
        "fixed_subspace_dim": fixed,
        "central_representations": central_count,
    });
    let checks = vec![
        Check::new("orbit_type_conjugation_invariant", invariant, "same type at x·rep·x⁻¹"),
        Check::new("conjugation_isomorphism", iso, "Ad(x) intertwines D0 and D1"),
    ];
    Ok((result, checks))
}

pub fn cmd_stratify(doc: &RepDocument, s: &Settings) -> Outcome {
    let r = resolve(doc)?;
    stratify_payload(&r, s)
}

fn model_kind(m: ModelArg) -> ModelKind {
    match m {
        ModelArg::So2 => ModelKind::So2,
        ModelArg::So3 => ModelKind::So3,
    }
}

/// Summary of a momentum-model run.
fn reduction_payload(kind: ModelKind, samples: usize, seed: u64) -> Outcome {
    let model = LinearMomentumModel::new(kind);
    let points = model.sample_zero_locus(samples, seed);
    let zariski = rm::zariski_dim_at_origin(&model, &points)?;
    let mut worst: f64 = 0.0;
    let mut worst_name = String::new();
    let mut histogram = std::collections::BTreeMap::<String, usize>::new();
    for p in &points {
        let report = model.check_relations(p);
        for (name, v) in &report.entries {
            if *v > worst {
                worst = *v;
                worst_name = name.clone();
            }
        }
        if let rm::HilbertImage::Gram(l) = model.hilbert_map(&p.w) {
            *histogram.entry(rm::psd_rank_stratum(&l).to_string()).or_default() += 1;
        }
    }
    let momentum_max = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    let projected = model.sample_zero_locus_projected(samples.min(100), seed ^ 0x5eed);
    let projected_dim = rm::zariski_dim_at_origin(&model, &projected).ok();
    let expected = model.invariant_count();
    let mut result = json!({
        "model": kind.to_string(),
        "samples": points.len(),
        "zariski_dim": zariski,
        "expected_zariski_dim": expected,
        "momentum_residual_max": momentum_max,
        "relation_residual_max": worst,
        "worst_relation": worst_name,
        "projected_sampler_zariski_dim": projected_dim,
    });
    let mut checks = vec![
        Check::new("zariski_dim", zariski == expected, format!("{zariski} (expected {expected})")),
        Check::new("momentum_zero", momentum_max < 1e-10, format!("{momentum_max:.3e}")),
        Check::new("relations", worst < rm::RELATION_TOL, format!("max {worst:.3e} ({worst_name})")),
        Check::new(
            "projected_sampler_consistent",
            projected_dim == Some(zariski),
            format!("{projected_dim:?}"),
        ),
    ];
    if kind == ModelKind::So3 {
        let outside = histogram.get(&PsdStratum::Outside.to_string()).copied().unwrap_or(0);
        let spanning = rm::spanning_vectors_8_5();
        let spanning_momentum = spanning.iter().map(|w| model.momentum(w).norm()).fold(0.0, f64::max);
        let spanning_rank = rm::hilbert_image_rank(&model, &spanning);
        result["stratum_histogram"] = json!(histogram);
        result["spanning_configurations"] = json!({
            "count": spanning.len(),
            "momentum_max": spanning_momentum,
            "image_rank": spanning_rank,
        });
        checks.push(Check::new("psd_rank_le_2", outside == 0, format!("{outside} outside n0 ∪ n1 ∪ n2")));
        checks.push(Check::new(
            "spanning_configurations",
            spanning_rank == 10 && spanning_momentum == 0.0,
            format!("rank {spanning_rank}, momentum {spanning_momentum:.1e}"),
        ));
    }
    Ok((result, checks))
}

pub fn cmd_reduction(model: ModelArg, s: &Settings) -> Outcome {
    reduction_payload(model_kind(model), s.samples, s.seed)
}

/// Observed order `log2(e(2) / e(4))` in substeps per cell, against a
/// 256-substep reference.
pub fn refinement_order(conn: &PathConnection, var: Option<&holonomy::Variation>) -> CliResult<f64> {
    let order = match var {
        Some(v) => {
            let reference = holonomy::holonomy_derivative_at_resolution(conn, v, 256)?;
            let err = |k| -> CliResult<f64> {
                Ok(holonomy::holonomy_derivative_at_resolution(conn, v, k)?.sub(&reference).norm())
            };
            (err(2)? / err(4)?).log2()
        }
        None => {
            let reference = holonomy::holonomy_at_resolution(conn, 256);
            let err = |k| holonomy::holonomy_at_resolution(conn, k).distance(&reference);
            (err(2) / err(4)).log2()
        }
    };
    Ok(order)
}

pub fn cmd_holonomy_check(cfg: &HolonomyConfig, s: &Settings) -> Outcome {
    let (conn, var) = cfg.resolve()?;
    let g = conn.group();
    let hol = holonomy::holonomy(&conn);
    let drift = g.membership_residual(&hol);

    // closed form for the constant connection at the initial value
    let x = conn.values()[0].clone();
    let group = Arc::new(LieGroupModel::parse(&cfg.group)?);
    let constant = PathConnection::constant(group, conn.length(), x.clone())?;
    let closed_form = holonomy::holonomy(&constant).distance(&g.exp(&x.scale(-conn.length())));

    let xg = g.random_element_seeded(s.seed);
    let invariance = holonomy::conjugation_invariance_check(&conn, &xg);
    let order = refinement_order(&conn, var.as_ref())?;
    let mut result = json!({
        "group": g.name(),
        "length": conn.length(),
        "grid_points": conn.values().len(),
        "holonomy_log": g.log(&hol).map(|v| v.0.as_slice().to_vec()).ok(),
        "group_drift": drift,
        "constant_closed_form_error": closed_form,
        "conjugation_invariance_residual": invariance,
        "refinement_order": order,
    });
    let mut checks = vec![
        Check::new("group_drift", drift < 1e-10, format!("{drift:.3e}")),
        Check::new("constant_closed_form", closed_form < 1e-10, format!("{closed_form:.3e}")),
        Check::new("conjugation_invariance", invariance < 1e-9, format!("{invariance:.3e}")),
        Check::new("refinement_order", order >= 3.5, format!("{order:.2}")),
    ];
    if let Some(var) = &var {
        let formula = holonomy::holonomy_derivative(&conn, var)?;
        let fd = holonomy::holonomy_derivative_fd(&conn, var, s.tolerances.fd_step)?;
        let err = formula.sub(&fd).norm();
        result["derivative"] = json!(formula.0.as_slice());
        result["derivative_fd_error"] = json!(err);
        checks.push(Check::new("derivative_vs_fd", err < 1e-6, format!("{err:.3e}")));
    }
    Ok((result, checks))
}

fn stratum_entry(
    name: &str,
    r: &ResolvedRep,
    s: &Settings,
    cone_samples: usize,
    expected: (usize, usize, usize, usize),
) -> CliResult<(Value, Vec<Check>)> {
    let (coh, mut checks) = cohomology_payload(r, &s.tolerances);
    let (strat, strat_checks) = stratify_payload(r, s)?;
    let (cone, cone_checks) = cone_payload(r, s, cone_samples, s.seed)?;
    checks.extend(strat_checks);
    checks.extend(cone_checks);
    let h = &coh["h_dims"];
    let h = (
        h[0].as_u64().unwrap_or(0) as usize,
        h[1].as_u64().unwrap_or(0) as usize,
        h[2].as_u64().unwrap_or(0) as usize,
    );
    let fixed = strat["fixed_subspace_dim"].as_u64().unwrap_or(0) as usize;
    checks.push(Check::new(
        "h_dims",
        (h.0, h.1, h.2) == (expected.0, expected.1, expected.2),
        format!("{h:?}"),
    ));
    checks.push(Check::new(
        "stratum_dim",
        fixed == expected.3,
        format!("{fixed} (expected {})", expected.3),
    ));
    for c in &mut checks {
        c.name = format!("{name}.{}", c.name);
    }
    Ok((json!({ "cohomology": coh, "stratification": strat, "cone_span": cone }), checks))
}

pub fn cmd_genus2_su2_report(s: &Settings) -> Outcome {
    let doc = |rep: String| RepDocument {
        group: "SU2".into(),
        genus: 2,
        central: "+I".into(),
        rep: RepSource::Named(rep),
    };
    let central = resolve(&doc("central:[+,+,+,+]".into()))?;
    let torus = resolve(&doc("torus:[0.7,1.1,2.3,0.4]".into()))?;
    let irreducible = resolve(&doc(format!("random:{}", s.seed)))?;
    let cone_samples = s.samples;

    let count = enumerate_central_reps(&central.presentation, &central.group, &central.class)?.len();
    let mut checks = vec![Check::new("central_points", count == 16, format!("{count} (expected 16)"))];

    let (c_val, c_checks) = stratum_entry("central", &central, s, cone_samples, (3, 12, 3, 0))?;
    let (t_val, t_checks) = stratum_entry("torus", &torus, s, cone_samples, (1, 8, 1, 4))?;
    let (i_val, i_checks) = stratum_entry("irreducible", &irreducible, s, cone_samples, (0, 6, 0, 6))?;
    checks.extend(c_checks);
    checks.extend(t_checks);
    checks.extend(i_checks);

    // local models
    let (so3, so3_checks) = reduction_payload(ModelKind::So3, s.samples.max(20), s.seed)?;
    let (so2, so2_checks) = reduction_payload(ModelKind::So2, s.samples.max(6), s.seed)?;
    let torus_fixed = t_val["stratification"]["fixed_subspace_dim"].as_u64().unwrap_or(0) as usize;
    let cone = rm::so2_cone_model_report(s.samples.max(6), s.seed, torus_fixed)?;
    let irreducible_fixed = i_val["stratification"]["fixed_subspace_dim"].as_u64().unwrap_or(0) as usize;
    let zariski = [
        so3["zariski_dim"].as_u64().unwrap_or(0) as usize,
        cone.total_zariski_dim,
        irreducible_fixed,
    ];
    checks.extend(so3_checks.into_iter().map(|mut c| {
        c.name = format!("so3_model.{}", c.name);
        c
    }));
    checks.extend(so2_checks.into_iter().map(|mut c| {
        c.name = format!("so2_model.{}", c.name);
        c
    }));
    checks.push(Check::new(
        "zariski_dims",
        zariski == [10, 7, 6],
        format!("{zariski:?} (expected [10, 7, 6])"),
    ));

    // obstruction cross-check at a central point
    let pres = Presentation::surface(2)?;
    let cd = build_complex(&pres, &central.rep, &s.tolerances);
    let mut rng_seed = s.seed;
    let (mut measured, mut reference) = (Vec::new(), Vec::new());
    for _ in 0..100 {
        rng_seed = rng_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let u = gaussian_cochain(&central.group, 4, rng_seed);
        measured.push(obstruction_quadratic(&pres, &central.rep, &cd, &u)?);
        reference.push(cross_product_sum(&u));
    }
    let (constant, rel_err) = ObstructionModel::fit_constant(&measured, &reference);
    checks.push(Check::new(
        "obstruction_cross_product",
        rel_err < 1e-8,
        format!("c = {constant:.12}, max relative error {rel_err:.3e}"),
    ));
    let irr_cd = build_complex(&pres, &irreducible.rep, &s.tolerances);
    let irr_q = obstruction_quadratic(&pres, &irreducible.rep, &irr_cd, &irr_cd.basis_h1.column(0).into_owned())?;
    checks.push(Check::new(
        "obstruction_vanishes_irreducible",
        irr_q.is_empty(),
        format!("dim H² = {}", irr_q.len()),
    ));

    let result = json!({
        "central_points": count,
        "strata": { "central": c_val, "torus": t_val, "irreducible": i_val },
        "zariski_dims": { "central": zariski[0], "torus": zariski[1], "irreducible": zariski[2] },
        "cone_model": cone,
        "so3_model": so3,
        "so2_model": so2,
        "obstruction": { "constant": constant, "max_relative_error": rel_err, "directions": 100 },
    });
    Ok((result, checks))
}

fn gaussian_cochain(group: &LieGroupModel, n: usize, seed: u64) -> DVector<f64> {
    let values: Vec<f64> = (0..n)
        .flat_map(|j| group.random_algebra_vector_seeded(seed.wrapping_add(j as u64)).0.iter().copied().collect::<Vec<_>>())
        .collect();
    DVector::from_vec(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        let stuck = surfmod::Error::NoConvergence { iterations: 5, defect: 1.0 };
        assert_eq!(CliError::from(stuck).exit_code(), EXIT_NO_CONVERGENCE);
        let bad = surfmod::Error::UnknownGroup("SU3".into());
        assert_eq!(CliError::from(bad).exit_code(), EXIT_INPUT);
    }

    #[test]
    fn flatten_walks_nested_values() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": {"b": 1}, "c": [1, 2], "d": [{"e": true}]}), &mut rows);
        let keys: Vec<_> = rows.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a.b", "c", "d[0].e"]);
        assert_eq!(rows[1].1, "[1,2]");
    }

    #[test]
    fn settings_reject_nonpositive_tolerances() {
        let common = CommonArgs {
            config: None,
            seed: None,
            samples: Some(0),
            json: false,
            tol_rank: None,
            tol_defect: None,
        };
        assert!(settings(&common, None).is_err());
        let common = CommonArgs { samples: None, tol_rank: Some(f64::NAN), ..common };
        assert!(settings(&common, None).is_err());
    }
}
