//! Experiment harness: admissibility classification of parameter tuples,
//! norm-ratio sweeps over a deterministic corpus, weak-type endpoint sweeps,
//! aperture scaling studies, comparability envelopes, and refinement studies.
//!
//! "Bounded" is operationalized as: finite corpus max ratio, stable within
//! 25% under one grid refinement and under corpus doubling. That is evidence,
//! not proof, and runs outside the hypothesis range never earn a PASS.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lq_norm_weighted, FieldSpec, Grid, GridFunction};
use crate::herz::{herz_norm, weak_herz_norm, Annuli, HerzParams, LevelGrid};
use crate::kernels::{a_beta_field, build_dictionary, KernelClassParams, KernelDictionary};
use crate::sqfn::{
    aperture_ladder_from_afield, g_beta_from_afield, g_star_from_afield, s_beta_from_afield,
    ConeQuadratureSpec, GStarParams,
};
use crate::weights::{membership_check, BallFamily, Weight};

// ---------------------------------------------------------------------------
// admissibility
// ---------------------------------------------------------------------------

/// Which hypothesis, if any, a parameter tuple satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictCase {
    /// equal weights, equal classes, q2 <= q, alpha q1 strictly inside
    StrongSameWeights,
    /// different weights, q2 <= q, 0 < alpha q1 < n(1 - q2/q)
    StrongDifferentWeights,
    /// alpha q1 = n(1 - q2/q) with p <= 1: weak-type conclusion only
    WeakEndpoint,
    Inadmissible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub case: VerdictCase,
    pub weights_equal: bool,
    pub classes_equal: bool,
    pub q2_within_q: bool,
    /// `-n q1/q < alpha q1`
    pub lower_ok: bool,
    /// `alpha q1 < n(1 - q2/q)`
    pub upper_ok: bool,
    /// `alpha q1 = n(1 - q2/q)` (within 1e-12)
    pub at_endpoint: bool,
    /// `lambda > max{q2,3}`, when a lambda is supplied
    pub lambda_ok: Option<bool>,
    pub p_le_1: bool,
    pub explanation: String,
}

impl ConditionVerdict {
    pub fn admits_strong(&self) -> bool {
        matches!(
            self.case,
            VerdictCase::StrongSameWeights | VerdictCase::StrongDifferentWeights
        )
    }
}

/// Pure clause evaluation over the parameter tuple. `lambda` switches the
/// check to the all-aperture operator, which additionally needs
/// `lambda > max{q2,3}`.
pub fn admissibility_check(hp: &HerzParams, lambda: Option<f64>, dim: usize) -> ConditionVerdict {
    let n = dim as f64;
    let weights_equal = hp.w1 == hp.w2;
    let classes_equal = (hp.q1 - hp.q2).abs() <= 1e-12;
    let q2_within_q = hp.q2 <= hp.q + 1e-12;
    let prod = hp.alpha * hp.q1;
    let lower = -n * hp.q1 / hp.q;
    let upper = n * (1.0 - hp.q2 / hp.q);
    let at_endpoint = (prod - upper).abs() <= 1e-12 * upper.abs().max(1.0);
    let at_lower = (prod - lower).abs() <= 1e-12 * lower.abs().max(1.0);
    let lower_ok = prod > lower && !at_lower;
    let upper_ok = prod < upper && !at_endpoint;
    let lambda_ok = lambda.map(|l| l > hp.q2.max(3.0));
    let p_le_1 = hp.p <= 1.0 + 1e-12;

    let explanation;
    let case = 'case: {
        if let Some(false) = lambda_ok {
            explanation = format!(
                "lambda > max{{q2,3}} violated: lambda = {} <= max({}, 3)",
                lambda.unwrap(),
                hp.q2
            );
            break 'case VerdictCase::Inadmissible;
        }
        if !q2_within_q {
            explanation = format!("q2 <= q violated: q2 = {} > q = {}", hp.q2, hp.q);
            break 'case VerdictCase::Inadmissible;
        }
        if at_endpoint {
            if p_le_1 {
                explanation = "endpoint alpha q1 = n(1 - q2/q) with p <= 1".into();
                break 'case VerdictCase::WeakEndpoint;
            }
            explanation = "endpoint alpha q1 = n(1 - q2/q) requires p <= 1".into();
            break 'case VerdictCase::Inadmissible;
        }
        if weights_equal {
            if !classes_equal {
                explanation =
                    "equal weights with unequal declared classes: outside both clauses".into();
                break 'case VerdictCase::Inadmissible;
            }
            if lower_ok && upper_ok {
                explanation = "equal weights, -n q1/q < alpha q1 < n(1 - q2/q)".into();
                break 'case VerdictCase::StrongSameWeights;
            }
            explanation = if !lower_ok {
                "-n q1/q < alpha q1 violated".into()
            } else {
                "alpha q1 < n(1 - q2/q) violated".into()
            };
            break 'case VerdictCase::Inadmissible;
        }
        // different weights: 0 < alpha q1 < n(1 - q2/q)
        if prod > 0.0 && upper_ok {
            explanation = "different weights, 0 < alpha q1 < n(1 - q2/q)".into();
            break 'case VerdictCase::StrongDifferentWeights;
        }
        explanation = if prod <= 0.0 {
            "0 < alpha q1 violated (different weights)".into()
        } else {
            "alpha q1 < n(1 - q2/q) violated".into()
        };
        VerdictCase::Inadmissible
    };

    ConditionVerdict {
        case,
        weights_equal,
        classes_equal,
        q2_within_q,
        lower_ok,
        upper_ok,
        at_endpoint,
        lambda_ok,
        p_le_1,
        explanation,
    }
}

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

/// Deterministic nested test corpus: annulus indicators, compact bumps,
/// seeded dyadic noise, and members concentrated near the origin. Member i
/// depends only on (i, seed), so a corpus of size a is a prefix of one of
/// size b > a, and the underlying functions do not depend on the grid.
pub fn standard_corpus(grid: &Grid, size: usize, seed: u64) -> Result<Vec<GridFunction>> {
    let mut out = Vec::with_capacity(size);
    for i in 0..size {
        let variant = i / 4;
        let spec = match i % 4 {
            0 => {
                let ks = [0i32, 1, -1];
                let k = ks[variant % ks.len()];
                let amp = 1.0 + 0.5 * (variant / ks.len()) as f64;
                FieldSpec::Scaled {
                    factor: amp,
                    inner: Box::new(FieldSpec::AnnulusIndicator {
                        inner: 2.0f64.powi(k - 1),
                        outer: 2.0f64.powi(k),
                    }),
                }
            }
            1 => {
                let table = [
                    (0.75, 0.25),
                    (1.5, 0.5),
                    (-1.2, 0.6),
                    (0.5, 0.2),
                    (1.8, 0.2),
                    (-1.0, 0.4),
                    (1.25, 0.75),
                    (-0.6, 0.3),
                ];
                let (c, r) = table[variant % table.len()];
                let amp = 1.0 + 0.25 * (variant / table.len()) as f64;
                let center = if grid.dim == 1 {
                    [c, 0.0]
                } else {
                    [0.8 * c, 0.5 * c]
                };
                FieldSpec::Bump {
                    center,
                    radius: r,
                    k: 4,
                    amp,
                }
            }
            2 => FieldSpec::DyadicNoise {
                seed: seed ^ (i as u64).wrapping_mul(0x9e37_79b9),
                level: 3 + (variant % 3) as u32,
                amp: 1.0,
                inner_cut: 0.25,
                outer_cut: 2.0,
            },
            _ => {
                let table = [(0.5, 0.25), (0.375, 0.125), (0.625, 0.3), (0.45, 0.2)];
                let (c, r) = table[variant % table.len()];
                let amp = 1.0 + 0.5 * (variant / table.len()) as f64;
                let center = if grid.dim == 1 { [c, 0.0] } else { [c, 0.5 * c] };
                FieldSpec::Bump {
                    center,
                    radius: r,
                    k: 3,
                    amp,
                }
            }
        };
        out.push(GridFunction::sample(&spec, grid)?);
    }
    Ok(out)
}

pub fn corpus_member_id(i: usize) -> String {
    let family = match i % 4 {
        0 => "ann",
        1 => "bump",
        2 => "dyad",
        _ => "stress",
    };
    format!("{family}-{i:02}")
}

// ---------------------------------------------------------------------------
// ratio sweeps
// ---------------------------------------------------------------------------

/// Which operator a sweep pushes the corpus through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    ConeSquare { gamma: f64 },
    DiagonalSquare,
    AllApertureSquare { lambda: f64 },
}

impl OperatorKind {
    pub fn name(&self) -> String {
        match self {
            OperatorKind::ConeSquare { gamma } => format!("s_beta[gamma={gamma}]"),
            OperatorKind::DiagonalSquare => "g_beta".into(),
            OperatorKind::AllApertureSquare { lambda } => format!("g_star[lambda={lambda}]"),
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            OperatorKind::AllApertureSquare { lambda } => Some(*lambda),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioEntry {
    pub id: String,
    pub in_norm: f64,
    pub out_norm: f64,
    pub ratio: f64,
    /// strong-norm companion of a weak sweep, for the levelwise domination
    /// check; absent in strong sweeps
    pub strong_out_norm: Option<f64>,
    /// window tails of the output norm (the corpus inputs are supported
    /// inside the window by construction)
    pub out_inner_tail: f64,
    pub out_outer_tail: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioSweep {
    pub grid_m: usize,
    pub corpus_size: usize,
    pub window_k_min: i32,
    pub window_k_max: i32,
    /// resolved scale window; mass at scales outside it is not integrated
    pub ladder_t_min: f64,
    pub ladder_t_max: f64,
    pub entries: Vec<RatioEntry>,
    pub skipped: Vec<String>,
    pub max_ratio: f64,
    pub max_inner_tail: f64,
    pub max_outer_tail: f64,
    pub max_truncated_mass_fraction: f64,
    /// weak sweeps only: weak <= strong held member-wise
    pub chebyshev_ok: bool,
}

/// One sweep at one resolution over an explicit named corpus.
#[allow(clippy::too_many_arguments)]
pub fn ratio_sweep_over(
    op: OperatorKind,
    hp: &HerzParams,
    grid: &Grid,
    beta: f64,
    dict_size: usize,
    dict_seed: u64,
    corpus: &[(String, GridFunction)],
    weak: bool,
) -> Result<RatioSweep> {
    hp.validate(grid.dim)?;
    let dict = build_dictionary(KernelClassParams::new(beta)?, grid.dim, dict_size, dict_seed)?;
    let quad = ConeQuadratureSpec::default();
    let ladder = quad.ladder_for(grid)?;
    let annuli = Annuli::default_window(grid, hp.homogeneous)?;

    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut max_inner = 0.0f64;
    let mut max_outer = 0.0f64;
    let mut max_trunc = 0.0f64;
    let mut chebyshev_ok = true;

    for (id, f) in corpus.iter() {
        let id = id.clone();
        let (in_norm, _) = herz_norm(f, hp, &annuli)?;
        if in_norm == 0.0 {
            skipped.push(format!("{id}: zero input norm"));
            continue;
        }
        let af = a_beta_field(f, &dict, &ladder, quad.stride)?;
        max_trunc = max_trunc.max(af.truncated_mass_fraction);
        let out = match op {
            OperatorKind::ConeSquare { gamma } => s_beta_from_afield(&af, gamma)?,
            OperatorKind::DiagonalSquare => g_beta_from_afield(&af)?,
            OperatorKind::AllApertureSquare { lambda } => {
                g_star_from_afield(&af, GStarParams::new(lambda)?)?
            }
        };
        let (strong_out, tail) = herz_norm(&out, hp, &annuli)?;
        max_inner = max_inner.max(tail.inner_lq_mass);
        max_outer = max_outer.max(tail.outer_lq_mass);
        let (out_inner_tail, out_outer_tail) = (tail.inner_lq_mass, tail.outer_lq_mass);
        let (out_norm, strong_companion) = if weak {
            let levels = LevelGrid::for_function(&out);
            let wn = weak_herz_norm(&out, hp, &annuli, &levels)?;
            if wn.value > strong_out * (1.0 + 1e-12) {
                chebyshev_ok = false;
            }
            (wn.value, Some(strong_out))
        } else {
            (strong_out, None)
        };
        let ratio = out_norm / in_norm;
        max_ratio = max_ratio.max(ratio);
        entries.push(RatioEntry {
            id,
            in_norm,
            out_norm,
            ratio,
            strong_out_norm: strong_companion,
            out_inner_tail,
            out_outer_tail,
        });
    }
    Ok(RatioSweep {
        grid_m: grid.points_per_axis,
        corpus_size: corpus.len(),
        window_k_min: annuli.k_min,
        window_k_max: annuli.k_max,
        ladder_t_min: ladder.t_min(),
        ladder_t_max: ladder.t_max(),
        entries,
        skipped,
        max_ratio,
        max_inner_tail: max_inner,
        max_outer_tail: max_outer,
        max_truncated_mass_fraction: max_trunc,
        chebyshev_ok,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub operator: String,
    pub weak: bool,
    pub verdict: ConditionVerdict,
    pub hypothesis_ok: bool,
    pub base: RatioSweep,
    pub refined: RatioSweep,
    pub doubled: RatioSweep,
    /// relative change of the corpus max ratio under grid refinement
    pub refinement_change: f64,
    /// relative change under corpus doubling
    pub corpus_change: f64,
    pub pass: bool,
    pub label: String,
}

/// Full boundedness experiment: base sweep, grid-refined sweep, corpus-
/// doubled sweep, and the stability verdict. Inadmissible tuples still
/// compute (exploration) but are labeled out-of-hypothesis and never PASS.
#[allow(clippy::too_many_arguments)]
pub fn theorem_ratio_sweep(
    op: OperatorKind,
    hp: &HerzParams,
    grid: &Grid,
    beta: f64,
    dict_size: usize,
    dict_seed: u64,
    corpus_size: usize,
    corpus_seed: u64,
    weak: bool,
) -> Result<RatioReport> {
    let verdict = admissibility_check(hp, op.lambda(), grid.dim);
    let hypothesis_ok = if weak {
        verdict.case == VerdictCase::WeakEndpoint
    } else {
        verdict.admits_strong()
    };
    let named = |grid: &Grid, size: usize| -> Result<Vec<(String, GridFunction)>> {
        Ok(standard_corpus(grid, size, corpus_seed)?
            .into_iter()
            .enumerate()
            .map(|(i, f)| (corpus_member_id(i), f))
            .collect())
    };
    let base = ratio_sweep_over(
        op,
        hp,
        grid,
        beta,
        dict_size,
        dict_seed,
        &named(grid, corpus_size)?,
        weak,
    )?;
    let refined_grid = grid.refined(2)?;
    let refined = ratio_sweep_over(
        op,
        hp,
        &refined_grid,
        beta,
        dict_size,
        dict_seed,
        &named(&refined_grid, corpus_size)?,
        weak,
    )?;
    let doubled = ratio_sweep_over(
        op,
        hp,
        grid,
        beta,
        dict_size,
        dict_seed,
        &named(grid, corpus_size * 2)?,
        weak,
    )?;
    let rel = |a: f64, b: f64| {
        if a == 0.0 && b == 0.0 {
            0.0
        } else {
            (b - a).abs() / a.abs().max(1e-300)
        }
    };
    let refinement_change = rel(base.max_ratio, refined.max_ratio);
    let corpus_change = rel(base.max_ratio, doubled.max_ratio);
    let finite = base.max_ratio.is_finite()
        && refined.max_ratio.is_finite()
        && doubled.max_ratio.is_finite();
    let stable = refinement_change < 0.25 && corpus_change < 0.25;
    let cheb = !weak || (base.chebyshev_ok && refined.chebyshev_ok && doubled.chebyshev_ok);
    let pass = hypothesis_ok && finite && stable && cheb;
    let label = if !hypothesis_ok {
        "out-of-hypothesis".to_string()
    } else if pass {
        "PASS".to_string()
    } else {
        "FAIL".to_string()
    };
    Ok(RatioReport {
        operator: op.name(),
        weak,
        verdict,
        hypothesis_ok,
        base,
        refined,
        doubled,
        refinement_change,
        corpus_change,
        pass,
        label,
    })
}

// ---------------------------------------------------------------------------
// aperture scaling
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub q: f64,
    pub q2: f64,
    pub j_values: Vec<usize>,
    pub norms: Vec<f64>,
    /// least-squares slope of log2 norms over j = 1..j_max (None if that
    /// range has fewer than two points)
    pub slope: Option<f64>,
    pub cap: f64,
    pub pass: bool,
}

/// Fits the growth of `||S_{2^j} f||_{L^q_w}` in j against the admissible
/// cap: `n q2 / 2` for q >= 2, `n q2 / q` for 1 < q < 2.
pub fn aperture_scaling_study(
    f: &GridFunction,
    dict: &KernelDictionary,
    quad: &ConeQuadratureSpec,
    j_max: usize,
    w: &Weight,
    q: f64,
    q2: f64,
) -> Result<ScalingReport> {
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scaling study needs q > 1, got {q}"
        )));
    }
    let family = BallFamily::standard(f.grid.dim, f.grid.halfwidth, 0.5)?;
    let membership = membership_check(&f.grid, w, q2, &family)?;
    if !membership.in_class {
        return Err(Error::InvalidParameter(format!(
            "weight is not in the declared class A_{q2}"
        )));
    }
    let ladder = quad.ladder_for(&f.grid)?;
    let af = a_beta_field(f, dict, &ladder, quad.stride)?;
    let fields = aperture_ladder_from_afield(&af, j_max)?;
    let mut norms = Vec::with_capacity(fields.len());
    for field in &fields {
        norms.push(lq_norm_weighted(field, q, w)?);
    }
    let n = f.grid.dim as f64;
    let cap = if q >= 2.0 { n * q2 / 2.0 } else { n * q2 / q };
    let slope = if j_max >= 2 {
        // least squares on (j, log2 norm) for j = 1..j_max
        let pts: Vec<(f64, f64)> = (1..=j_max).map(|j| (j as f64, norms[j].log2())).collect();
        let nn = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((nn * sxy - sx * sy) / (nn * sxx - sx * sx))
    } else {
        None
    };
    let pass = slope.map_or(true, |s| s <= cap + 0.1);
    Ok(ScalingReport {
        q,
        q2,
        j_values: (0..=j_max).collect(),
        norms,
        slope,
        cap,
        pass,
    })
}

// ---------------------------------------------------------------------------
// comparability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparabilityEntry {
    pub id: String,
    pub envelope_small: f64,
    pub envelope_large: f64,
    /// fraction of significant cells beyond the reach of the t-window,
    /// excluded from the envelope
    pub window_excluded_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparabilityReport {
    pub dict_small: usize,
    pub dict_large: usize,
    pub entries: Vec<ComparabilityEntry>,
    pub corpus_envelope_small: f64,
    pub corpus_envelope_large: f64,
    /// relative change of the corpus envelope under dictionary growth
    pub change: f64,
    pub stable: bool,
}

/// Envelope of max(S/G, G/S) over the significant set: cells where S is at
/// least 1% of its peak AND the diagonal ladder is not window-starved
/// (dist(x, supp f) <= t_max / 2; beyond t_max the diagonal field is
/// identically zero by construction, which says nothing about the
/// operators). Returns (envelope, fraction of significant cells excluded).
fn comparability_envelope(f: &GridFunction, dict: &KernelDictionary) -> Result<(f64, f64)> {
    let quad = ConeQuadratureSpec::default();
    let ladder = quad.ladder_for(&f.grid)?;
    let visible = ladder.t_max() / 2.0;
    let af = a_beta_field(f, dict, &ladder, quad.stride)?;
    let s = s_beta_from_afield(&af, 1.0)?;
    let g = g_beta_from_afield(&af)?;
    let s_max = s.values.iter().cloned().fold(0.0f64, f64::max);

    // bounding box of the support, for cheap distance estimates
    let grid = &f.grid;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (i, v) in f.values.iter().enumerate() {
        if *v != 0.0 {
            let z = grid.center(i);
            for a in 0..grid.dim {
                lo[a] = lo[a].min(z[a]);
                hi[a] = hi[a].max(z[a]);
            }
        }
    }
    let box_dist = |x: [f64; 2]| -> f64 {
        let mut d2 = 0.0;
        for a in 0..grid.dim {
            let d = (lo[a] - x[a]).max(x[a] - hi[a]).max(0.0);
            d2 += d * d;
        }
        d2.sqrt()
    };

    let mut envelope = 0.0f64;
    let mut significant = 0usize;
    let mut excluded = 0usize;
    for i in 0..s.values.len() {
        if s_max > 0.0 && s.values[i] >= 0.01 * s_max {
            significant += 1;
            if box_dist(grid.center(i)) > visible {
                excluded += 1;
                continue;
            }
            let (a, b) = (s.values[i], g.values[i]);
            if b == 0.0 {
                return Ok((f64::INFINITY, 0.0));
            }
            envelope = envelope.max((a / b).max(b / a));
        }
    }
    let frac = if significant > 0 {
        excluded as f64 / significant as f64
    } else {
        0.0
    };
    Ok((envelope, frac))
}

/// Pointwise comparability of the cone and diagonal square functions over
/// the significant set (where S is at least 1% of its peak), and its
/// stability when the dictionary grows.
pub fn comparability_study(
    corpus: &[(String, GridFunction)],
    beta: f64,
    dict_small: usize,
    dict_large: usize,
    seed: u64,
) -> Result<ComparabilityReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter("empty corpus".into()));
    }
    let dim = corpus[0].1.grid.dim;
    let params = KernelClassParams::new(beta)?;
    let small = build_dictionary(params, dim, dict_small, seed)?;
    let large = build_dictionary(params, dim, dict_large, seed)?;
    let mut entries = Vec::new();
    let mut env_small = 0.0f64;
    let mut env_large = 0.0f64;
    for (id, f) in corpus {
        if f.values.iter().all(|v| *v == 0.0) {
            continue;
        }
        let (a, ea) = comparability_envelope(f, &small)?;
        let (b, eb) = comparability_envelope(f, &large)?;
        env_small = env_small.max(a);
        env_large = env_large.max(b);
        entries.push(ComparabilityEntry {
            id: id.clone(),
            envelope_small: a,
            envelope_large: b,
            window_excluded_fraction: ea.max(eb),
        });
    }
    let change = (env_large - env_small).abs() / env_small.max(1e-300);
    Ok(ComparabilityReport {
        dict_small,
        dict_large,
        entries,
        corpus_envelope_small: env_small,
        corpus_envelope_large: env_large,
        change,
        stable: change < 0.30,
    })
}

// ---------------------------------------------------------------------------
// refinement studies
// ---------------------------------------------------------------------------

/// What a refinement study recomputes at each resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum RefineQuantity {
    LqNorm {
        field: FieldSpec,
        q: f64,
        weight: Weight,
    },
    /// norm of the singleton-kernel square function of the sampled field
    SPsiNorm {
        field: FieldSpec,
        q: f64,
        beta: f64,
        gamma: f64,
    },
    /// A_p characteristic over the standard family; refines by
    /// `level_factor` per level instead of 2
    ApChar {
        weight: Weight,
        p: f64,
        level_factor: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub values: Vec<f64>,
    /// successive relative changes |v_{i+1} - v_i| / |v_i|
    pub deltas: Vec<f64>,
    /// false when the deltas grow (non-Cauchy behavior)
    pub cauchy_ok: bool,
}

pub fn refinement_study(
    grid0: &Grid,
    quantity: &RefineQuantity,
    levels: usize,
) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::InvalidParameter(format!(
            "refinement study needs >= 2 levels, got {levels}"
        )));
    }
    let factor = match quantity {
        RefineQuantity::ApChar { level_factor, .. } => (*level_factor).max(2),
        _ => 2,
    };
    let mut resolutions = Vec::new();
    let mut values = Vec::new();
    let mut grid = *grid0;
    for _ in 0..levels {
        resolutions.push(grid.points_per_axis);
        let v = match quantity {
            RefineQuantity::LqNorm { field, q, weight } => {
                let f = GridFunction::sample(field, &grid)?;
                lq_norm_weighted(&f, *q, weight)?
            }
            RefineQuantity::SPsiNorm {
                field,
                q,
                beta,
                gamma,
            } => {
                let f = GridFunction::sample(field, &grid)?;
                let dict = build_dictionary(KernelClassParams::new(*beta)?, grid.dim, 1, 0)?;
                let s = crate::sqfn::s_psi(
                    &f,
                    &dict.members[0],
                    *gamma,
                    &ConeQuadratureSpec::default(),
                )?;
                lq_norm_weighted(&s, *q, &Weight::constant(1.0))?
            }
            RefineQuantity::ApChar { weight, p, .. } => {
                let family = BallFamily::standard(grid.dim, grid.halfwidth, 0.5)?;
                crate::weights::ap_characteristic(&grid, weight, *p, &family)?.value
            }
        };
        values.push(v);
        grid = grid.refined(factor)?;
    }
    let mut deltas = Vec::new();
    for w in values.windows(2) {
        deltas.push((w[1] - w[0]).abs() / w[0].abs().max(1e-300));
    }
    let cauchy_ok = deltas.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    Ok(ConvergenceReport {
        resolutions,
        values,
        deltas,
        cauchy_ok,
    })
}
