//! Experiment configuration: TOML parsing and validation.
//!
//! Every error produced here carries the config path and, when the offending
//! key is known, its line number.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use effham::fidelity::{Trial, TrialSet};
use effham::grover::{theta_of_fidelity, DEFAULT_K};
use effham::pauli::{DENSE_LIMIT, MAX_SITES};
use effham::tfim::{
    candidate_grid, exact_sw_coefficients, single_excitation, CandidateGrid, EffectiveParams,
    TfimParams,
};
use effham::variational::{Integrator, DEFAULT_LAYERS, DEFAULT_REGULARIZATION};
use effham::{HamiltonianSum, StateVector};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scan,
    Grover,
    Variational,
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::Grover => "grover",
            Command::Variational => "variational",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub trials: Vec<TrialEntry>,
    #[serde(default)]
    pub evolution: EvolutionBlock,
    pub search: Option<SearchBlock>,
    pub variational: Option<VariationalBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub model: Spanned<String>,
    #[serde(rename = "N")]
    pub n: Spanned<usize>,
    pub delta: Spanned<f64>,
    #[serde(rename = "J")]
    pub j: Spanned<f64>,
    pub lambda_range: Option<Spanned<[f64; 2]>>,
    pub kappa_range: Option<Spanned<[f64; 2]>>,
    pub steps: Option<Spanned<[usize; 2]>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TrialEntry {
    pub initial: Spanned<String>,
    pub time: Spanned<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionBlock {
    pub method: Option<Spanned<String>>,
    pub trotter_steps: Option<Spanned<usize>>,
    pub dt: Option<Spanned<f64>>,
    pub layers: Option<Spanned<usize>>,
    pub regularization: Option<Spanned<f64>>,
    pub integrator: Option<Spanned<String>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBlock {
    pub theta_th: Option<Spanned<f64>>,
    pub threshold_fidelity: Option<Spanned<f64>>,
    pub k: Option<Spanned<usize>>,
    pub iterations: Option<Spanned<usize>>,
    pub mode: Option<Spanned<String>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VariationalBlock {
    pub lambda: Option<Spanned<f64>>,
    pub kappa: Option<Spanned<f64>>,
    pub t_final: Option<Spanned<f64>>,
    pub reference: Option<bool>,
    pub h_test_file: Option<Spanned<String>>,
    pub write_params: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact,
    Trotter { steps: usize },
    Variational,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Trotter { .. } => "trotter",
            Method::Variational => "variational",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSettings {
    pub dt: f64,
    pub layers: usize,
    pub regularization: f64,
    pub integrator: Integrator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    pub theta_th: f64,
    pub k: usize,
    pub iterations: Option<usize>,
    pub leaky: bool,
}

#[derive(Debug, Clone)]
pub struct VariationalSettings {
    pub h_test: HamiltonianSum,
    /// `None` when the test Hamiltonian was read from a file.
    pub params: Option<EffectiveParams>,
    pub t_final: f64,
    pub reference: bool,
    pub write_params: bool,
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: TfimParams,
    pub grid: Option<CandidateGrid>,
    pub trials: TrialSet,
    pub method: Method,
    pub steps: StepSettings,
    pub search: Option<SearchSettings>,
    pub variational: Option<VariationalSettings>,
    pub out_dir: PathBuf,
    pub warnings: Vec<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub method: Option<String>,
}

struct Ctx<'a> {
    path: &'a Path,
    source: &'a str,
}

impl Ctx<'_> {
    fn line(&self, offset: usize) -> usize {
        self.source[..offset.min(self.source.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn at<T>(&self, v: &Spanned<T>, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!(
            "{}:{}: {msg}",
            self.path.display(),
            self.line(v.span().start)
        ))
    }

    fn plain(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}: {msg}", self.path.display()))
    }
}

pub fn parse(path: &Path, source: &str) -> CliResult<RawConfig> {
    toml::from_str(source).map_err(|e| {
        let ctx = Ctx { path, source };
        match e.span() {
            Some(span) => CliError::Config(format!(
                "{}:{}: {}",
                path.display(),
                ctx.line(span.start),
                e.message()
            )),
            None => ctx.plain(e.message()),
        }
    })
}

pub fn load(path: &Path) -> CliResult<(String, RawConfig)> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let raw = parse(path, &source)?;
    Ok((source, raw))
}

fn finite(ctx: &Ctx, v: &Spanned<f64>, key: &str) -> CliResult<f64> {
    let x = *v.get_ref();
    if !x.is_finite() {
        return Err(ctx.at(v, format!("{key} must be finite, got {x}")));
    }
    Ok(x)
}

fn positive(ctx: &Ctx, v: &Spanned<f64>, key: &str) -> CliResult<f64> {
    let x = finite(ctx, v, key)?;
    if x <= 0.0 {
        return Err(ctx.at(v, format!("{key} must be positive, got {x}")));
    }
    Ok(x)
}

fn exact_sw(ctx: &Ctx, m: &ModelBlock, model: &TfimParams) -> CliResult<EffectiveParams> {
    if model.delta == 0.0 {
        return Err(ctx.at(
            &m.delta,
            "exact effective coefficients need a nonzero delta (kappa = J^2 / (2 delta))",
        ));
    }
    exact_sw_coefficients(model.delta, model.j).map_err(|e| ctx.at(&m.delta, e))
}

fn parse_initial(ctx: &Ctx, entry: &TrialEntry, n: usize) -> CliResult<Vec<StateVector>> {
    let spec = entry.initial.get_ref().trim();
    if spec == "x_i" {
        return (1..=n)
            .map(|s| single_excitation(n, s).map_err(|e| ctx.at(&entry.initial, e)))
            .collect();
    }
    if let Some(site) = spec.strip_prefix("x_") {
        let site: usize = site
            .parse()
            .map_err(|_| ctx.at(&entry.initial, format!("bad excitation spec {spec:?}")))?;
        if site == 0 || site > n {
            return Err(ctx.at(&entry.initial, format!("site {site} outside 1..={n}")));
        }
        return Ok(vec![
            single_excitation(n, site).map_err(|e| ctx.at(&entry.initial, e))?
        ]);
    }
    if spec.len() != n || !spec.chars().all(|c| c == '0' || c == '1') {
        return Err(ctx.at(
            &entry.initial,
            format!("initial state must be \"x_i\", \"x_<site>\" or a {n}-character bitstring, got {spec:?}"),
        ));
    }
    Ok(vec![
        StateVector::from_bitstring(spec).map_err(|e| ctx.at(&entry.initial, e))?
    ])
}

fn method_of(ctx: &Ctx, raw: &EvolutionBlock, over: Option<&str>) -> CliResult<Method> {
    let name = over
        .map(str::to_string)
        .or_else(|| raw.method.as_ref().map(|m| m.get_ref().clone()))
        .unwrap_or_else(|| "exact".into());
    let bad = |msg: String| match (&raw.method, over) {
        (Some(m), None) => ctx.at(m, msg),
        _ => ctx.plain(msg),
    };
    match name.as_str() {
        "exact" => Ok(Method::Exact),
        "trotter" => {
            let steps = match &raw.trotter_steps {
                Some(s) if *s.get_ref() == 0 => {
                    return Err(ctx.at(s, "trotter_steps must be at least 1"))
                }
                Some(s) => *s.get_ref(),
                None => 1000,
            };
            Ok(Method::Trotter { steps })
        }
        "variational" => Ok(Method::Variational),
        other => Err(bad(format!(
            "unknown method {other:?}; expected exact, trotter or variational"
        ))),
    }
}

fn step_settings(ctx: &Ctx, raw: &EvolutionBlock) -> CliResult<StepSettings> {
    let dt = match &raw.dt {
        Some(v) => positive(ctx, v, "dt")?,
        None => TAU / 1000.0,
    };
    let layers = match &raw.layers {
        Some(v) if *v.get_ref() == 0 => return Err(ctx.at(v, "layers must be at least 1")),
        Some(v) => *v.get_ref(),
        None => DEFAULT_LAYERS,
    };
    let regularization = match &raw.regularization {
        Some(v) => {
            let x = finite(ctx, v, "regularization")?;
            if x < 0.0 {
                return Err(ctx.at(v, format!("regularization must be non-negative, got {x}")));
            }
            x
        }
        None => DEFAULT_REGULARIZATION,
    };
    let integrator = match raw.integrator.as_ref().map(|s| (s, s.get_ref().as_str())) {
        None | Some((_, "midpoint")) => Integrator::Midpoint,
        Some((_, "euler")) => Integrator::Euler,
        Some((s, other)) => {
            return Err(ctx.at(
                s,
                format!("unknown integrator {other:?}; expected midpoint or euler"),
            ))
        }
    };
    Ok(StepSettings {
        dt,
        layers,
        regularization,
        integrator,
    })
}

fn grid_of(ctx: &Ctx, m: &ModelBlock) -> CliResult<Option<CandidateGrid>> {
    let (Some(lr), Some(kr), Some(st)) = (&m.lambda_range, &m.kappa_range, &m.steps) else {
        if m.lambda_range.is_some() || m.kappa_range.is_some() || m.steps.is_some() {
            return Err(ctx.plain("lambda_range, kappa_range and steps must be given together"));
        }
        return Ok(None);
    };
    for (r, key) in [(lr, "lambda_range"), (kr, "kappa_range")] {
        let [lo, hi] = *r.get_ref();
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(ctx.at(
                r,
                format!("{key} must be finite with lo <= hi, got [{lo}, {hi}]"),
            ));
        }
    }
    let [sl, sk] = *st.get_ref();
    if sl == 0 || sk == 0 {
        return Err(ctx.at(st, "steps must be at least 1 per axis"));
    }
    for (r, s, key) in [(lr, sl, "lambda_range"), (kr, sk, "kappa_range")] {
        let [lo, hi] = *r.get_ref();
        if s == 1 && lo != hi {
            return Err(ctx.at(r, format!("{key} spans an interval but has a single step")));
        }
    }
    let [l0, l1] = *lr.get_ref();
    let [k0, k1] = *kr.get_ref();
    candidate_grid((l0, l1), (k0, k1), (sl, sk))
        .map(Some)
        .map_err(|e| ctx.at(st, e))
}

fn search_of(ctx: &Ctx, s: &SearchBlock) -> CliResult<SearchSettings> {
    let k = match &s.k {
        Some(v) => {
            let k = *v.get_ref();
            if k < 2 || !k.is_multiple_of(2) {
                return Err(ctx.at(v, format!("k must be an even integer >= 2, got {k}")));
            }
            k
        }
        None => DEFAULT_K,
    };
    let theta_th = match (&s.theta_th, &s.threshold_fidelity) {
        (Some(t), None) => {
            let x = finite(ctx, t, "theta_th")?;
            if !(x > 0.0 && x < PI) {
                return Err(ctx.at(t, format!("theta_th must lie in (0, pi), got {x}")));
            }
            x
        }
        (None, Some(f)) => {
            let x = finite(ctx, f, "threshold_fidelity")?;
            if !(x > 0.0 && x < 1.0) {
                return Err(ctx.at(f, format!("threshold_fidelity must lie in (0, 1), got {x}")));
            }
            theta_of_fidelity(x).map_err(|e| ctx.at(f, e))?
        }
        (Some(t), Some(_)) => {
            return Err(ctx.at(t, "give either theta_th or threshold_fidelity, not both"))
        }
        (None, None) => return Err(ctx.plain("[search] needs theta_th or threshold_fidelity")),
    };
    let leaky = match s.mode.as_ref().map(|m| (m, m.get_ref().as_str())) {
        None | Some((_, "leaky")) => true,
        Some((_, "ideal")) => false,
        Some((m, other)) => {
            return Err(ctx.at(
                m,
                format!("unknown mode {other:?}; expected ideal or leaky"),
            ))
        }
    };
    Ok(SearchSettings {
        theta_th,
        k,
        iterations: s.iterations.as_ref().map(|v| *v.get_ref()),
        leaky,
    })
}

fn variational_of(
    ctx: &Ctx,
    v: &VariationalBlock,
    m: &ModelBlock,
    model: &TfimParams,
    trials: &TrialSet,
) -> CliResult<VariationalSettings> {
    let t_final = match &v.t_final {
        Some(t) => positive(ctx, t, "t_final")?,
        None => match trials.common_time() {
            Some(t) if t > 0.0 => t,
            _ => {
                return Err(ctx.plain(
                    "[variational] needs t_final unless all trials share one positive time",
                ))
            }
        },
    };
    let (h_test, params) = match (&v.h_test_file, &v.lambda, &v.kappa) {
        (Some(f), None, None) => {
            let base = ctx.path.parent().unwrap_or(Path::new("."));
            let file = base.join(f.get_ref());
            let text = std::fs::read_to_string(&file)
                .map_err(|e| ctx.at(f, format!("{}: {e}", file.display())))?;
            let h = HamiltonianSum::from_json(&text).map_err(|e| ctx.at(f, e))?;
            if h.n_sites() != model.n {
                return Err(ctx.at(
                    f,
                    format!(
                        "test Hamiltonian has {} sites, model has {}",
                        h.n_sites(),
                        model.n
                    ),
                ));
            }
            (h, None)
        }
        (Some(f), _, _) => {
            return Err(ctx.at(f, "h_test_file excludes lambda and kappa"));
        }
        (None, Some(l), Some(k)) => {
            let p = EffectiveParams::new(finite(ctx, l, "lambda")?, finite(ctx, k, "kappa")?)
                .map_err(|e| ctx.at(l, e))?;
            (effham::tfim::test_hamiltonian(model, &p)?, Some(p))
        }
        (None, None, None) => {
            let p = exact_sw(ctx, m, model)?;
            (effham::tfim::test_hamiltonian(model, &p)?, Some(p))
        }
        (None, Some(l), None) => return Err(ctx.at(l, "lambda given without kappa")),
        (None, None, Some(k)) => return Err(ctx.at(k, "kappa given without lambda")),
    };
    Ok(VariationalSettings {
        h_test,
        params,
        t_final,
        reference: v.reference.unwrap_or(true),
        write_params: v.write_params.unwrap_or(false),
    })
}

/// Checks everything `command` needs before any computation starts.
pub fn validate(
    path: &Path,
    source: &str,
    raw: &RawConfig,
    command: Command,
    over: &Overrides,
) -> CliResult<Experiment> {
    let ctx = Ctx { path, source };
    let m = &raw.model;
    if m.model.get_ref() != "tfim" {
        return Err(ctx.at(
            &m.model,
            format!("unknown model {:?}; expected \"tfim\"", m.model.get_ref()),
        ));
    }
    let n = *m.n.get_ref();
    if !(2..=MAX_SITES).contains(&n) {
        return Err(ctx.at(&m.n, format!("N must lie in 2..={MAX_SITES}, got {n}")));
    }
    let model = TfimParams::new(
        n,
        finite(&ctx, &m.delta, "delta")?,
        finite(&ctx, &m.j, "J")?,
    )
    .map_err(|e| ctx.at(&m.n, e))?;
    let mut warnings = Vec::new();
    if model.weak_gap() {
        warnings.push(format!(
            "|delta/J| = {} is below 5; the effective model is outside its regime of validity",
            (model.delta / model.j).abs()
        ));
    }

    if raw.trials.is_empty() {
        return Err(ctx.plain("at least one [[trials]] entry is required"));
    }
    let mut trials = Vec::new();
    for entry in &raw.trials {
        let t = finite(&ctx, &entry.time, "time")?;
        if t < 0.0 {
            return Err(ctx.at(
                &entry.time,
                format!("trial time must be non-negative, got {t}"),
            ));
        }
        for s in parse_initial(&ctx, entry, n)? {
            trials.push(Trial::new(s, t)?);
        }
    }
    let trials = TrialSet::new(trials)?;

    let method = method_of(&ctx, &raw.evolution, over.method.as_deref())?;
    let steps = step_settings(&ctx, &raw.evolution)?;
    let grid = grid_of(&ctx, m)?;
    let search = raw
        .search
        .as_ref()
        .map(|s| search_of(&ctx, s))
        .transpose()?;

    let needs_dense = method == Method::Exact || command == Command::Oracle;
    if needs_dense && n > DENSE_LIMIT {
        return Err(ctx.at(
            &m.n,
            format!("exact evolution is limited to N <= {DENSE_LIMIT}, got {n}"),
        ));
    }

    let mut variational = None;
    match command {
        Command::Scan => {
            if grid.is_none() {
                return Err(ctx.plain("scan needs lambda_range, kappa_range and steps in [model]"));
            }
            if method == Method::Variational && trials.common_time().is_none_or(|t| t <= 0.0) {
                return Err(
                    ctx.plain("a variational scan needs all trials to share one positive time")
                );
            }
        }
        Command::Grover => {
            if grid.is_none() {
                return Err(
                    ctx.plain("grover needs lambda_range, kappa_range and steps in [model]")
                );
            }
            if search.is_none() {
                return Err(ctx.plain("grover needs a [search] block with a threshold"));
            }
            if method == Method::Variational {
                return Err(ctx.plain("grover scores candidates with exact or trotter evolution"));
            }
        }
        Command::Variational => {
            let block = raw
                .variational
                .as_ref()
                .ok_or_else(|| ctx.plain("variational needs a [variational] block"))?;
            variational = Some(variational_of(&ctx, block, m, &model, &trials)?);
        }
        Command::Oracle => {
            exact_sw(&ctx, m, &model)?;
        }
    }

    let out_dir = over
        .out
        .clone()
        .or_else(|| raw.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    Ok(Experiment {
        model,
        grid,
        trials,
        method,
        steps,
        search,
        variational,
        out_dir,
        warnings,
    })
}
