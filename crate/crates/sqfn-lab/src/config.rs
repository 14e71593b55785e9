//! Flat dotted-key run configuration.
//!
//! Config files are lines of `key = value` with `#` comments. Every key has
//! a recorded default; the resolved key/value map (defaults included) is
//! embedded in each report, so a report can be re-parsed into the exact
//! parameter tuple that produced it. Unknown keys are rejected outright.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::FieldSpec;
use crate::herz::HerzParams;
use crate::weights::Weight;

/// Orchestrator command, selected on the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compute,
    Verify,
    Sweep,
    Refine,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Refine => "refine",
        }
    }
}

/// What a verify/sweep run checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyTarget {
    /// cone square function, strong-type boundedness sweep
    Strong,
    /// all-aperture square function, strong-type sweep
    GStarStrong,
    /// cone square function into the weak space at the endpoint
    WeakEndpoint,
    /// all-aperture square function into the weak space at the endpoint
    GStarWeakEndpoint,
    /// aperture growth exponents against the admissible caps
    Scaling,
    /// cone vs diagonal square function envelope
    Comparability,
}

impl VerifyTarget {
    fn parse(s: &str) -> Option<VerifyTarget> {
        match s {
            "strong" => Some(VerifyTarget::Strong),
            "gstar-strong" => Some(VerifyTarget::GStarStrong),
            "weak-endpoint" => Some(VerifyTarget::WeakEndpoint),
            "gstar-weak-endpoint" => Some(VerifyTarget::GStarWeakEndpoint),
            "scaling" => Some(VerifyTarget::Scaling),
            "comparability" => Some(VerifyTarget::Comparability),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VerifyTarget::Strong => "strong",
            VerifyTarget::GStarStrong => "gstar-strong",
            VerifyTarget::WeakEndpoint => "weak-endpoint",
            VerifyTarget::GStarWeakEndpoint => "gstar-weak-endpoint",
            VerifyTarget::Scaling => "scaling",
            VerifyTarget::Comparability => "comparability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineKind {
    LqNorm,
    SPsiNorm,
    ApChar,
}

/// Input of the compute command: an analytic spec or an imported CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum ComputeInput {
    Spec(FieldSpec),
    File(PathBuf),
}

/// Fully resolved parameter tuple.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,

    pub grid_dim: usize,
    pub grid_halfwidth: f64,
    pub grid_m: usize,

    pub kernel_beta: f64,
    pub kernel_size: usize,
    pub kernel_seed: u64,

    pub quad_gamma: f64,
    pub quad_stride: usize,
    pub quad_t_min: Option<f64>,
    pub quad_t_max: Option<f64>,
    pub gstar_lambda: f64,

    pub herz_alpha: f64,
    pub herz_p: f64,
    pub herz_q: f64,
    pub herz_q1: f64,
    pub herz_q2: f64,
    pub herz_homogeneous: bool,
    pub w1: Weight,
    pub w2: Weight,

    pub corpus_size: usize,
    pub corpus_seed: u64,

    pub verify_target: VerifyTarget,
    pub scaling_j_max: usize,
    pub scaling_members: usize,
    pub comparability_small: usize,
    pub comparability_large: usize,
    pub comparability_members: usize,

    pub compute_input: ComputeInput,
    pub compute_ops: Vec<String>,

    pub refine_levels: usize,
    pub refine_kind: RefineKind,
    pub refine_q: f64,
    pub refine_level_factor: usize,

    pub output_dir: PathBuf,
    pub threads: usize,
    pub budget_cells: u64,
}

impl RunConfig {
    pub fn herz_params(&self) -> HerzParams {
        HerzParams {
            alpha: self.herz_alpha,
            p: self.herz_p,
            q: self.herz_q,
            q1: self.herz_q1,
            q2: self.herz_q2,
            w1: self.w1.clone(),
            w2: self.w2.clone(),
            homogeneous: self.herz_homogeneous,
        }
    }
}

/// key -> default value, the single source of truth for what exists.
const DEFAULTS: &[(&str, &str)] = &[
    ("grid.dim", "1"),
    ("grid.halfwidth", "8"),
    ("grid.m", "256"),
    ("kernel.beta", "1"),
    ("kernel.size", "8"),
    ("kernel.seed", "7"),
    ("quad.gamma", "1"),
    ("quad.stride", "1"),
    ("quad.t_min", "auto"),
    ("quad.t_max", "auto"),
    ("gstar.lambda", "4"),
    ("herz.alpha", "0.25"),
    ("herz.p", "1"),
    ("herz.q", "2"),
    ("herz.q1", "1"),
    ("herz.q2", "1"),
    ("herz.homogeneous", "true"),
    ("weights.w1", "kind=constant c=1"),
    ("weights.w2", "kind=constant c=1"),
    ("corpus.size", "20"),
    ("corpus.seed", "1"),
    ("verify.target", "strong"),
    ("scaling.j_max", "3"),
    ("scaling.members", "3"),
    ("comparability.small", "4"),
    ("comparability.large", "32"),
    ("comparability.members", "5"),
    ("compute.field", "kind=annulus inner=1 outer=2"),
    ("compute.ops", "s,g,gstar"),
    ("refine.levels", "3"),
    ("refine.quantity", "lq-norm"),
    ("refine.q", "2"),
    ("refine.level_factor", "4"),
    ("output.dir", "out"),
    ("threads", "0"),
    ("budget.cells", "100000000"),
];

fn config_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        location: location.into(),
        message: message.into(),
    }
}

/// Parses `key=val key2=val2 ...` word lists (weight and field specs).
fn parse_kv_words(s: &str, location: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for word in s.split_whitespace() {
        let (k, v) = word
            .split_once('=')
            .ok_or_else(|| config_err(location, format!("expected key=value, got `{word}`")))?;
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

fn take_f64(map: &BTreeMap<String, String>, key: &str, location: &str) -> Result<f64> {
    map.get(key)
        .ok_or_else(|| config_err(location, format!("missing `{key}`")))?
        .parse()
        .map_err(|_| config_err(location, format!("`{key}` is not a number")))
}

/// Weight spec strings: `kind=constant c=1`, `kind=power a=0.5`,
/// `kind=product a=0.5 c=2` (the product of a power and a constant).
pub fn parse_weight(s: &str, location: &str) -> Result<Weight> {
    let kv = parse_kv_words(s, location)?;
    match kv.get("kind").map(|s| s.as_str()) {
        Some("constant") => Ok(Weight::constant(take_f64(&kv, "c", location)?)),
        Some("power") => Ok(Weight::power(take_f64(&kv, "a", location)?)),
        Some("product") => Ok(Weight::Product {
            left: Box::new(Weight::power(take_f64(&kv, "a", location)?)),
            right: Box::new(Weight::constant(take_f64(&kv, "c", location)?)),
        }),
        Some(other) => Err(config_err(location, format!("unknown weight kind `{other}`"))),
        None => Err(config_err(location, "weight spec needs kind=...")),
    }
}

/// Field spec strings for the compute/refine commands; `kind=file path=..`
/// imports a CSV-exported grid function instead of sampling a formula.
pub fn parse_input(s: &str, location: &str) -> Result<ComputeInput> {
    let kv = parse_kv_words(s, location)?;
    if kv.get("kind").map(|s| s.as_str()) == Some("file") {
        let path = kv
            .get("path")
            .ok_or_else(|| config_err(location, "kind=file needs path=..."))?;
        return Ok(ComputeInput::File(PathBuf::from(path)));
    }
    parse_field(s, location).map(ComputeInput::Spec)
}

pub fn parse_field(s: &str, location: &str) -> Result<FieldSpec> {
    let kv = parse_kv_words(s, location)?;
    let num = |key: &str| take_f64(&kv, key, location);
    match kv.get("kind").map(|s| s.as_str()) {
        Some("zero") => Ok(FieldSpec::Zero),
        Some("constant") => Ok(FieldSpec::Constant { value: num("value")? }),
        Some("annulus") => Ok(FieldSpec::AnnulusIndicator {
            inner: num("inner")?,
            outer: num("outer")?,
        }),
        Some("bump") => Ok(FieldSpec::Bump {
            center: [
                num("center")?,
                kv.get("center2").map_or(Ok(0.0), |_| num("center2"))?,
            ],
            radius: num("radius")?,
            k: num("k")? as u32,
            amp: kv.get("amp").map_or(Ok(1.0), |_| num("amp"))?,
        }),
        Some("gaussian") => Ok(FieldSpec::Gaussian {
            center: [
                num("center")?,
                kv.get("center2").map_or(Ok(0.0), |_| num("center2"))?,
            ],
            sigma: num("sigma")?,
            amp: kv.get("amp").map_or(Ok(1.0), |_| num("amp"))?,
        }),
        Some("dyadic") => Ok(FieldSpec::DyadicNoise {
            seed: num("seed")? as u64,
            level: num("level")? as u32,
            amp: kv.get("amp").map_or(Ok(1.0), |_| num("amp"))?,
            inner_cut: num("inner")?,
            outer_cut: num("outer")?,
        }),
        Some(other) => Err(config_err(location, format!("unknown field kind `{other}`"))),
        None => Err(config_err(location, "field spec needs kind=...")),
    }
}

/// Reads a config file and applies `key=value` overrides, producing the
/// typed config and the resolved key map.
pub fn load(
    command: Command,
    text: &str,
    source: &str,
    overrides: &[String],
) -> Result<(RunConfig, BTreeMap<String, String>)> {
    let mut map: BTreeMap<String, String> =
        DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let known: std::collections::BTreeSet<&str> = DEFAULTS.iter().map(|(k, _)| *k).collect();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = format!("{source}:{}", lineno + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(&location, "expected `key = value`"))?;
        let key = key.trim();
        if !known.contains(key) {
            return Err(config_err(&location, format!("unknown key `{key}`")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    for (i, ov) in overrides.iter().enumerate() {
        let location = format!("--set[{i}]");
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| config_err(&location, "expected key=value"))?;
        let key = key.trim();
        if !known.contains(key) {
            return Err(config_err(&location, format!("unknown key `{key}`")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }

    let config = from_map(command, &map)?;
    Ok((config, map))
}

fn get<'a>(map: &'a BTreeMap<String, String>, key: &str) -> &'a str {
    map.get(key).map(|s| s.as_str()).unwrap_or_default()
}

fn parse_num<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    get(map, key)
        .parse()
        .map_err(|_| config_err(key, format!("cannot parse `{}`", get(map, key))))
}

/// Typed extraction from a resolved key map (also used to round-trip the
/// echo embedded in reports).
pub fn from_map(command: Command, map: &BTreeMap<String, String>) -> Result<RunConfig> {
    let opt_auto = |key: &str| -> Result<Option<f64>> {
        let v = get(map, key);
        if v == "auto" {
            Ok(None)
        } else {
            v.parse()
                .map(Some)
                .map_err(|_| config_err(key, format!("expected a number or `auto`, got `{v}`")))
        }
    };
    let target_str = get(map, "verify.target");
    let verify_target = VerifyTarget::parse(target_str)
        .ok_or_else(|| config_err("verify.target", format!("unknown target `{target_str}`")))?;
    let refine_kind = match get(map, "refine.quantity") {
        "lq-norm" => RefineKind::LqNorm,
        "s-psi-norm" => RefineKind::SPsiNorm,
        "ap-char" => RefineKind::ApChar,
        other => {
            return Err(config_err(
                "refine.quantity",
                format!("unknown quantity `{other}`"),
            ))
        }
    };
    let homogeneous = match get(map, "herz.homogeneous") {
        "true" => true,
        "false" => false,
        other => {
            return Err(config_err(
                "herz.homogeneous",
                format!("expected true/false, got `{other}`"),
            ))
        }
    };
    let config = RunConfig {
        command,
        grid_dim: parse_num(map, "grid.dim")?,
        grid_halfwidth: parse_num(map, "grid.halfwidth")?,
        grid_m: parse_num(map, "grid.m")?,
        kernel_beta: parse_num(map, "kernel.beta")?,
        kernel_size: parse_num(map, "kernel.size")?,
        kernel_seed: parse_num(map, "kernel.seed")?,
        quad_gamma: parse_num(map, "quad.gamma")?,
        quad_stride: parse_num(map, "quad.stride")?,
        quad_t_min: opt_auto("quad.t_min")?,
        quad_t_max: opt_auto("quad.t_max")?,
        gstar_lambda: parse_num(map, "gstar.lambda")?,
        herz_alpha: parse_num(map, "herz.alpha")?,
        herz_p: parse_num(map, "herz.p")?,
        herz_q: parse_num(map, "herz.q")?,
        herz_q1: parse_num(map, "herz.q1")?,
        herz_q2: parse_num(map, "herz.q2")?,
        herz_homogeneous: homogeneous,
        w1: parse_weight(get(map, "weights.w1"), "weights.w1")?,
        w2: parse_weight(get(map, "weights.w2"), "weights.w2")?,
        corpus_size: parse_num(map, "corpus.size")?,
        corpus_seed: parse_num(map, "corpus.seed")?,
        verify_target,
        scaling_j_max: parse_num(map, "scaling.j_max")?,
        scaling_members: parse_num(map, "scaling.members")?,
        comparability_small: parse_num(map, "comparability.small")?,
        comparability_large: parse_num(map, "comparability.large")?,
        comparability_members: parse_num(map, "comparability.members")?,
        compute_input: parse_input(get(map, "compute.field"), "compute.field")?,
        compute_ops: get(map, "compute.ops")
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        refine_levels: parse_num(map, "refine.levels")?,
        refine_kind,
        refine_q: parse_num(map, "refine.q")?,
        refine_level_factor: parse_num(map, "refine.level_factor")?,
        output_dir: PathBuf::from(get(map, "output.dir")),
        threads: parse_num(map, "threads")?,
        budget_cells: parse_num(map, "budget.cells")?,
    };
    for op in &config.compute_ops {
        if !matches!(op.as_str(), "s" | "g" | "gstar") {
            return Err(config_err("compute.ops", format!("unknown operator `{op}`")));
        }
    }
    Ok(config)
}
