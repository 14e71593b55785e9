//! Command orchestration: load a config, run the requested computation or
//! verification sweep, and emit the report artifacts.
//!
//! Exit-status mapping lives in the binary: `Ok(Success)` is 0,
//! `Ok(Refused)` is 2 (hypothesis violated, run refused), errors are 1.

use std::path::Path;
use std::sync::Once;

use crate::config::{self, Command, ComputeInput, RefineKind, RunConfig, VerifyTarget};
use crate::error::{Error, Result};
use crate::grid::{lq_norm_weighted, Grid, GridFunction};
use crate::herz::{herz_norm, Annuli};
use crate::kernels::{
    a_beta_field, build_dictionary, dictionary_manifest, validate_dictionary, KernelClassParams,
    ValidationTolerances,
};
use crate::report::{ComputeSummary, OperatorSummary, Report, ReportBody};
use crate::sqfn::{
    g_beta_from_afield, g_star_from_afield, gstar_exterior_tail_bound, s_beta_from_afield,
    ConeQuadratureSpec, GStarParams,
};
use crate::verify::{
    admissibility_check, aperture_scaling_study, comparability_study, corpus_member_id,
    refinement_study, standard_corpus, theorem_ratio_sweep, OperatorKind, RefineQuantity,
    VerdictCase,
};
use crate::weights::{BallFamily, Weight};

/// Outcome of a run that did not error.
#[derive(Debug)]
pub enum RunStatus {
    Success,
    /// verify refused to run outside the hypothesis range
    Refused { clause: String },
}

static RAYON_INIT: Once = Once::new();

fn init_threads(config: &RunConfig) {
    let mut n = config.threads;
    if n == 0 {
        if let Ok(v) = std::env::var("SQFN_LAB_THREADS") {
            n = v.parse().unwrap_or(0);
        }
    }
    if n > 0 {
        RAYON_INIT.call_once(|| {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        });
    }
}

/// Upper estimate of the largest (y, t) lattice this run will allocate,
/// in f64 values. Runs over budget are refused up front.
fn preflight(config: &RunConfig) -> Result<()> {
    let mut m = config.grid_m;
    match config.command {
        Command::Verify | Command::Sweep => m *= 2, // refinement sweep
        Command::Refine => {
            let factor = if config.refine_kind == RefineKind::ApChar {
                config.refine_level_factor.max(2)
            } else {
                2
            };
            m *= factor.pow(config.refine_levels.saturating_sub(1) as u32);
        }
        Command::Compute => {}
    }
    let h = 2.0 * config.grid_halfwidth / m as f64;
    let t_min = config.quad_t_min.unwrap_or(2.0 * h);
    let t_max = config.quad_t_max.unwrap_or(config.grid_halfwidth / 2.0);
    let rungs = if t_max > t_min {
        ((t_max / t_min).log2() * 4.0).floor() as u64 + 1
    } else {
        1
    };
    let y_count = (m / config.quad_stride.max(1)) as u64;
    let lattice = rungs * y_count.pow(config.grid_dim as u32);
    if lattice > config.budget_cells {
        return Err(Error::MemoryBudget {
            needed: lattice,
            budget: config.budget_cells,
        });
    }
    Ok(())
}

/// Loads the config, runs the command, writes artifacts under `output.dir`.
pub fn run(command: Command, config_path: &Path, overrides: &[String]) -> Result<RunStatus> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Error::io(config_path.display().to_string(), e))?;
    let (config, echo) = config::load(
        command,
        &text,
        &config_path.display().to_string(),
        overrides,
    )?;
    init_threads(&config);
    preflight(&config)?;

    let status = match command {
        Command::Compute => run_compute(&config, &echo)?,
        Command::Verify | Command::Sweep => run_verify(&config, &echo)?,
        Command::Refine => run_refine(&config, &echo)?,
    };
    Ok(status)
}

fn grid_of(config: &RunConfig) -> Result<Grid> {
    Grid::new(config.grid_dim, config.grid_halfwidth, config.grid_m)
}

fn quad_of(config: &RunConfig) -> ConeQuadratureSpec {
    ConeQuadratureSpec {
        stride: config.quad_stride,
        t_min: config.quad_t_min,
        t_max: config.quad_t_max,
    }
}

fn run_compute(config: &RunConfig, echo: &std::collections::BTreeMap<String, String>) -> Result<RunStatus> {
    let grid = grid_of(config)?;
    let f = match &config.compute_input {
        ComputeInput::Spec(spec) => GridFunction::sample(spec, &grid)?,
        ComputeInput::File(path) => {
            let f = crate::grid::read_csv(path)?;
            if f.grid != grid {
                return Err(Error::InvalidParameter(format!(
                    "imported field grid {:?} does not match the configured grid {:?}",
                    f.grid, grid
                )));
            }
            f
        }
    };
    let dict = build_dictionary(
        KernelClassParams::new(config.kernel_beta)?,
        grid.dim,
        config.kernel_size,
        config.kernel_seed,
    )?;
    let (val_reports, dictionary_ok) = validate_dictionary(&dict, &ValidationTolerances::default());
    let manifest = dictionary_manifest(&dict, &val_reports);
    let quad = quad_of(config);
    let ladder = quad.ladder_for(&grid)?;
    let af = a_beta_field(&f, &dict, &ladder, quad.stride)?;

    let hp = config.herz_params();
    let annuli = Annuli::default_window(&grid, hp.homogeneous)?;
    let unit = Weight::constant(1.0);
    let (f_herz, f_tail) = herz_norm(&f, &hp, &annuli)?;

    let dir = &config.output_dir;
    crate::report::write_field(dir, "input", &f)?;

    let mut operators = Vec::new();
    for op in &config.compute_ops {
        let (name, field, exterior) = match op.as_str() {
            "s" => (
                format!("s_beta[gamma={}]", config.quad_gamma),
                s_beta_from_afield(&af, config.quad_gamma)?,
                None,
            ),
            "g" => ("g_beta".to_string(), g_beta_from_afield(&af)?, None),
            _ => {
                let params = GStarParams::new(config.gstar_lambda)?;
                let field = g_star_from_afield(&af, params)?;
                let tail = gstar_exterior_tail_bound(&f, &field, &ladder, config.gstar_lambda);
                (
                    format!("g_star[lambda={}]", config.gstar_lambda),
                    field,
                    Some(tail),
                )
            }
        };
        crate::report::write_field(dir, op, &field)?;
        let (op_herz, _) = herz_norm(&field, &hp, &annuli)?;
        operators.push(OperatorSummary {
            name,
            l2_norm: lq_norm_weighted(&field, 2.0, &unit)?,
            herz_norm: op_herz,
            max_value: field.max_abs(),
            exterior_tail_bound: exterior,
        });
    }

    let summary = ComputeSummary {
        field_provenance: f.provenance.clone(),
        ladder_t_min: ladder.t_min(),
        ladder_t_max: ladder.t_max(),
        ladder_rungs: ladder.t_values.len(),
        l1_norm: lq_norm_weighted(&f, 1.0, &unit)?,
        l2_norm: lq_norm_weighted(&f, 2.0, &unit)?,
        support_radius: f.support_radius(0.0),
        herz_norm: f_herz,
        herz_inner_tail: f_tail.inner_lq_mass,
        herz_outer_tail: f_tail.outer_lq_mass,
        operators,
        dictionary_ok,
        truncated_mass_fraction: af.truncated_mass_fraction,
    };
    let report = Report {
        tool: "sqfn-lab",
        command: config.command.name().into(),
        target: None,
        config: echo.clone(),
        body: ReportBody::Compute(summary),
    };
    crate::report::write_report(dir, &report)?;

    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).unwrap_or_default();
    manifest_bytes.push(b'\n');
    std::fs::write(dir.join("manifest.json"), manifest_bytes)
        .map_err(|e| Error::io(dir.join("manifest.json").display().to_string(), e))?;
    Ok(RunStatus::Success)
}

fn run_verify(config: &RunConfig, echo: &std::collections::BTreeMap<String, String>) -> Result<RunStatus> {
    let grid = grid_of(config)?;
    let hp = config.herz_params();
    let refusing = config.command == Command::Verify;

    // declared weight classes must survive the oracle before any sweep
    let family = BallFamily::standard(grid.dim, grid.halfwidth, 0.5)?;
    if let Err(e) = hp.validate_memberships(&grid, &family) {
        if refusing {
            return Ok(RunStatus::Refused {
                clause: e.to_string(),
            });
        }
        return Err(e);
    }

    let target = config.verify_target;
    let body = match target {
        VerifyTarget::Strong
        | VerifyTarget::GStarStrong
        | VerifyTarget::WeakEndpoint
        | VerifyTarget::GStarWeakEndpoint => {
            let weak = matches!(
                target,
                VerifyTarget::WeakEndpoint | VerifyTarget::GStarWeakEndpoint
            );
            let op = match target {
                VerifyTarget::Strong | VerifyTarget::WeakEndpoint => OperatorKind::ConeSquare {
                    gamma: config.quad_gamma,
                },
                _ => OperatorKind::AllApertureSquare {
                    lambda: config.gstar_lambda,
                },
            };
            let verdict = admissibility_check(&hp, op.lambda(), grid.dim);
            let admissible = if weak {
                verdict.case == VerdictCase::WeakEndpoint
            } else {
                verdict.admits_strong()
            };
            if refusing && !admissible {
                let clause = match (weak, verdict.case) {
                    // the tuple satisfies some clause, just not the one the
                    // target asks for: name the mismatch, not the clause
                    (true, VerdictCase::StrongSameWeights)
                    | (true, VerdictCase::StrongDifferentWeights) => {
                        "alpha q1 = n(1 - q2/q) violated (weak-type target needs the endpoint tuple)"
                            .to_string()
                    }
                    (false, VerdictCase::WeakEndpoint) => {
                        "alpha q1 < n(1 - q2/q) violated (tuple sits at the weak-type endpoint)"
                            .to_string()
                    }
                    _ => verdict.explanation,
                };
                return Ok(RunStatus::Refused { clause });
            }
            let report = theorem_ratio_sweep(
                op,
                &hp,
                &grid,
                config.kernel_beta,
                config.kernel_size,
                config.kernel_seed,
                config.corpus_size,
                config.corpus_seed,
                weak,
            )?;
            ReportBody::Ratio(Box::new(report))
        }
        VerifyTarget::Scaling => {
            let dict = build_dictionary(
                KernelClassParams::new(config.kernel_beta)?,
                grid.dim,
                config.kernel_size,
                config.kernel_seed,
            )?;
            let corpus = standard_corpus(&grid, config.scaling_members.max(1), config.corpus_seed)?;
            let quad = quad_of(config);
            let mut reports = Vec::new();
            for f in corpus.iter() {
                reports.push(aperture_scaling_study(
                    f,
                    &dict,
                    &quad,
                    config.scaling_j_max,
                    &hp.w2,
                    config.herz_q,
                    config.herz_q2,
                )?);
            }
            let pass = reports.iter().all(|r| r.pass);
            ReportBody::Scaling { reports, pass }
        }
        VerifyTarget::Comparability => {
            let corpus = standard_corpus(&grid, config.comparability_members.max(1), config.corpus_seed)?;
            let named: Vec<(String, GridFunction)> = corpus
                .into_iter()
                .enumerate()
                .map(|(i, f)| (corpus_member_id(i), f))
                .collect();
            let report = comparability_study(
                &named,
                config.kernel_beta,
                config.comparability_small,
                config.comparability_large,
                config.kernel_seed,
            )?;
            ReportBody::Comparability(report)
        }
    };

    let report = Report {
        tool: "sqfn-lab",
        command: config.command.name().into(),
        target: Some(target.name().into()),
        config: echo.clone(),
        body,
    };
    crate::report::write_report(&config.output_dir, &report)?;
    Ok(RunStatus::Success)
}

fn run_refine(config: &RunConfig, echo: &std::collections::BTreeMap<String, String>) -> Result<RunStatus> {
    let grid = grid_of(config)?;
    let field = match &config.compute_input {
        ComputeInput::Spec(spec) => spec.clone(),
        ComputeInput::File(_) => {
            return Err(Error::InvalidParameter(
                "refine needs an analytic compute.field (files cannot be resampled)".into(),
            ))
        }
    };
    let quantity = match config.refine_kind {
        RefineKind::LqNorm => RefineQuantity::LqNorm {
            field,
            q: config.refine_q,
            weight: config.w2.clone(),
        },
        RefineKind::SPsiNorm => RefineQuantity::SPsiNorm {
            field,
            q: config.refine_q,
            beta: config.kernel_beta,
            gamma: config.quad_gamma,
        },
        RefineKind::ApChar => RefineQuantity::ApChar {
            weight: config.w2.clone(),
            p: config.refine_q,
            level_factor: config.refine_level_factor,
        },
    };
    let report = refinement_study(&grid, &quantity, config.refine_levels)?;
    let report = Report {
        tool: "sqfn-lab",
        command: config.command.name().into(),
        target: Some(format!("{:?}", config.refine_kind)),
        config: echo.clone(),
        body: ReportBody::Refine(report),
    };
    crate::report::write_report(&config.output_dir, &report)?;
    Ok(RunStatus::Success)
}
