//! Report assembly and file emission: `report.json`, `tables/*.csv`, and
//! `fields/*.csv`. Everything written here is a pure function of the run
//! configuration and seeds, so repeated runs produce byte-identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::verify::{ComparabilityReport, ConvergenceReport, RatioReport, ScalingReport};

#[derive(Debug, Serialize)]
pub struct ComputeSummary {
    pub field_provenance: String,
    /// resolved scale window; mass at scales outside it is not integrated
    pub ladder_t_min: f64,
    pub ladder_t_max: f64,
    pub ladder_rungs: usize,
    pub l1_norm: f64,
    pub l2_norm: f64,
    pub support_radius: f64,
    pub herz_norm: f64,
    pub herz_inner_tail: f64,
    pub herz_outer_tail: f64,
    pub operators: Vec<OperatorSummary>,
    pub dictionary_ok: bool,
    pub truncated_mass_fraction: f64,
}

#[derive(Debug, Serialize)]
pub struct OperatorSummary {
    pub name: String,
    pub l2_norm: f64,
    pub herz_norm: f64,
    pub max_value: f64,
    /// all-aperture runs only: analytic bound on the squared exterior leak,
    /// absolute and relative to the squared peak
    pub exterior_tail_bound: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportBody {
    Compute(ComputeSummary),
    Ratio(Box<RatioReport>),
    Scaling { reports: Vec<ScalingReport>, pass: bool },
    Comparability(ComparabilityReport),
    Refine(ConvergenceReport),
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub command: String,
    pub target: Option<String>,
    /// fully resolved configuration, defaults included
    pub config: BTreeMap<String, String>,
    pub body: ReportBody,
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn write_report(dir: &Path, report: &Report) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report)
        .map_err(|e| Error::Malformed {
            path: "report.json".into(),
            message: e.to_string(),
        })?;
    bytes.push(b'\n');
    write_bytes(&dir.join("report.json"), &bytes)?;
    write_tables(dir, report)
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// Long-format observations (series, x, value) feeding any plotting tool,
/// plus one wide table per report kind.
fn write_tables(dir: &Path, report: &Report) -> Result<()> {
    let tables = dir.join("tables");
    let mut long = String::from("series,x,value\n");
    match &report.body {
        ReportBody::Ratio(r) => {
            // each row is self-describing: the space spec travels with the
            // norm values, and the window tails of the output norm follow
            let space = [
                report.config.get("herz.alpha").cloned().unwrap_or_default(),
                report.config.get("herz.p").cloned().unwrap_or_default(),
                report.config.get("herz.q").cloned().unwrap_or_default(),
                report.config.get("weights.w1").cloned().unwrap_or_default(),
                report.config.get("weights.w2").cloned().unwrap_or_default(),
                format!("[{};{}]", r.base.window_k_min, r.base.window_k_max),
            ];
            let mut wide = String::from(
                "id,alpha,p,q,w1,w2,window,in_norm,out_norm,ratio,out_inner_tail,out_outer_tail\n",
            );
            for e in &r.base.entries {
                let mut row = vec![e.id.clone()];
                row.extend(space.iter().cloned());
                row.extend([
                    format!("{}", e.in_norm),
                    format!("{}", e.out_norm),
                    format!("{}", e.ratio),
                    format!("{}", e.out_inner_tail),
                    format!("{}", e.out_outer_tail),
                ]);
                wide.push_str(&csv_line(&row));
                long.push_str(&csv_line(&[
                    "ratio".into(),
                    e.id.clone(),
                    format!("{}", e.ratio),
                ]));
            }
            write_bytes(&tables.join("ratios.csv"), wide.as_bytes())?;
        }
        ReportBody::Scaling { reports, .. } => {
            let mut wide = String::from("member,j,norm,cap_line\n");
            for (mi, rep) in reports.iter().enumerate() {
                for (&j, &norm) in rep.j_values.iter().zip(&rep.norms) {
                    // the admissible growth line through the j = 0 norm
                    let cap_line = rep.norms[0] * 2.0f64.powf(rep.cap * j as f64);
                    wide.push_str(&csv_line(&[
                        format!("{mi}"),
                        format!("{j}"),
                        format!("{norm}"),
                        format!("{cap_line}"),
                    ]));
                    long.push_str(&csv_line(&[
                        format!("norms[{mi}]"),
                        format!("{j}"),
                        format!("{norm}"),
                    ]));
                }
            }
            write_bytes(&tables.join("scaling.csv"), wide.as_bytes())?;
        }
        ReportBody::Comparability(rep) => {
            let mut wide = String::from("id,envelope_small,envelope_large,window_excluded\n");
            for e in &rep.entries {
                wide.push_str(&csv_line(&[
                    e.id.clone(),
                    format!("{}", e.envelope_small),
                    format!("{}", e.envelope_large),
                    format!("{}", e.window_excluded_fraction),
                ]));
                long.push_str(&csv_line(&[
                    "envelope".into(),
                    e.id.clone(),
                    format!("{}", e.envelope_large),
                ]));
            }
            write_bytes(&tables.join("comparability.csv"), wide.as_bytes())?;
        }
        ReportBody::Refine(rep) => {
            let mut wide = String::from("m,value,delta\n");
            for (i, (m, v)) in rep.resolutions.iter().zip(&rep.values).enumerate() {
                let delta = if i > 0 {
                    format!("{}", rep.deltas[i - 1])
                } else {
                    String::new()
                };
                wide.push_str(&csv_line(&[format!("{m}"), format!("{v}"), delta]));
                long.push_str(&csv_line(&["value".into(), format!("{m}"), format!("{v}")]));
            }
            write_bytes(&tables.join("convergence.csv"), wide.as_bytes())?;
        }
        ReportBody::Compute(summary) => {
            let mut wide = String::from("operator,l2_norm,herz_norm,max_value\n");
            for op in &summary.operators {
                wide.push_str(&csv_line(&[
                    op.name.clone(),
                    format!("{}", op.l2_norm),
                    format!("{}", op.herz_norm),
                    format!("{}", op.max_value),
                ]));
                long.push_str(&csv_line(&[
                    "l2_norm".into(),
                    op.name.clone(),
                    format!("{}", op.l2_norm),
                ]));
            }
            write_bytes(&tables.join("norms.csv"), wide.as_bytes())?;
        }
    }
    write_bytes(&tables.join("plotdata.csv"), long.as_bytes())
}

pub fn write_field(dir: &Path, name: &str, f: &GridFunction) -> Result<()> {
    let fields = dir.join("fields");
    std::fs::create_dir_all(&fields).map_err(|e| Error::io(fields.display().to_string(), e))?;
    crate::grid::write_csv(f, &fields.join(format!("{name}.csv")))
}
