//! Five-classifier evaluation per grouping and feature level, the results
//! table, and the pairwise source heatmap.

use std::collections::BTreeMap;

use mtese_core::classify::{
    evaluate_group, pairwise_heatmap, ClassificationReport, ClassifierKind, EvaluationProtocol, HeatmapGrid,
    Hyperparameters,
};
use mtese_core::corpus::Origin;
use mtese_core::grouping::{Comparison, DEFAULT_ENGINES};
use mtese_core::FeatureMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{Needs, RunConfig};
use crate::error::{CliError, Result};
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, level_label, levels, load_extracted, slug};
use crate::svg;

use super::select;

pub const SUMMARY_CSV: &str = "classify/summary.csv";
pub const TABLE_CSV: &str = "classify/table2.csv";
pub const HEATMAP_CSV: &str = "classify/heatmap.csv";
pub const HEATMAP_JSON: &str = "classify/heatmap.json";
pub const HEATMAP_SVG: &str = "classify/heatmap.svg";

pub fn report_path(grouping: &str) -> String {
    format!("classify/{}.json", slug(grouping))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: String,
    pub report: ClassificationReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupingReport {
    pub grouping: String,
    /// Not one of the six main-table groupings.
    pub supplementary: bool,
    pub levels: Vec<LevelReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatmapArtifact {
    pub k: usize,
    pub bins: usize,
    /// Sources left out for having fewer documents than folds.
    pub excluded: Vec<String>,
    pub grid: HeatmapGrid,
}

pub fn hyperparameters(cfg: &RunConfig, step: &mut StepWriter) -> Result<Hyperparameters> {
    let Some(p) = &cfg.classify.hyperparameters else {
        return Ok(Hyperparameters::default());
    };
    let bytes = step.input_file(p)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
}

pub fn protocol(cfg: &RunConfig) -> EvaluationProtocol {
    EvaluationProtocol { folds: cfg.classify.folds, seed: cfg.seed }
}

/// Sources for the heatmap: OCN first, then engines in table order, then any
/// other engine codes alphabetically.
fn heatmap_sources(matrix: &FeatureMatrix) -> BTreeMap<String, (usize, usize)> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for g in matrix.groups().iter().filter(|g| g.origin() != Origin::OEN) {
        let rank = match g.origin() {
            Origin::OCN => 0,
            _ => 1 + DEFAULT_ENGINES.iter().position(|e| e.0 == g.engine()).unwrap_or(DEFAULT_ENGINES.len()),
        };
        counts.entry(g.source_code().to_string()).or_insert((rank, 0)).1 += 1;
    }
    counts
}

fn write_table(step: &mut StepWriter, reports: &[GroupingReport]) -> Result<String> {
    let columns: Vec<&str> = Comparison::TABLE.iter().map(|c| c.name()).collect();
    let by_name: BTreeMap<&str, &GroupingReport> = reports.iter().map(|r| (r.grouping.as_str(), r)).collect();
    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        let header: Vec<&str> = ["level", "metric"].into_iter().chain(columns.iter().copied()).collect();
        w.write_record(&header).map_err(|e| e.to_string())?;
        for level in levels() {
            for metric in ["ACC", "F1", "C/T"] {
                let mut rec = vec![level_label(level).to_string(), metric.to_string()];
                for c in &columns {
                    let cell = by_name
                        .get(c)
                        .and_then(|g| g.levels.iter().find(|l| l.level == level))
                        .map(|l| match metric {
                            "ACC" => format!("{:.4}", l.report.acc_avg),
                            "F1" => format!("{:.4}", l.report.f1_avg),
                            _ => l.report.c_over_t(),
                        })
                        .unwrap_or_else(|| "not run".into());
                    rec.push(cell);
                }
                w.write_record(&rec).map_err(|e| e.to_string())?;
            }
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(TABLE_CSV, &body)?;
    Ok(String::from_utf8_lossy(&body).into_owned())
}

fn write_summary(step: &mut StepWriter, reports: &[GroupingReport]) -> Result<()> {
    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut header: Vec<String> =
            ["grouping", "level", "features", "acc_avg", "f1_avg", "correct_avg", "total"].map(String::from).to_vec();
        for k in ClassifierKind::ALL {
            header.push(format!("acc_{k}"));
            header.push(format!("f1_{k}"));
        }
        w.write_record(&header).map_err(|e| e.to_string())?;
        for g in reports {
            for l in &g.levels {
                let r = &l.report;
                let mut rec = vec![
                    g.grouping.clone(),
                    l.level.clone(),
                    r.features.len().to_string(),
                    format!("{:?}", r.acc_avg),
                    format!("{:?}", r.f1_avg),
                    format!("{:?}", r.correct_avg),
                    r.total.to_string(),
                ];
                for s in &r.per_classifier {
                    rec.push(format!("{:?}", s.acc));
                    rec.push(format!("{:?}", s.f1_macro));
                }
                w.write_record(&rec).map_err(|e| e.to_string())?;
            }
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(SUMMARY_CSV, &body)
}

fn heatmap(
    cfg: &RunConfig,
    matrix: &FeatureMatrix,
    protocol: &EvaluationProtocol,
    hp: &Hyperparameters,
    step: &mut StepWriter,
) -> Result<()> {
    let mut sources: Vec<(String, (usize, usize))> = heatmap_sources(matrix).into_iter().collect();
    sources.sort_by(|a, b| a.1 .0.cmp(&b.1 .0).then(a.0.cmp(&b.0)));
    let (codes, excluded): (Vec<_>, Vec<_>) = sources.into_iter().partition(|(_, (_, n))| *n >= cfg.classify.folds);
    let codes: Vec<String> = codes.into_iter().map(|(c, _)| c).collect();
    let excluded: Vec<String> = excluded.into_iter().map(|(c, _)| c).collect();
    for c in &excluded {
        log::warn!("heatmap: `{c}` has fewer than {} documents and is left out", cfg.classify.folds);
    }
    if codes.len() < 2 {
        step.skip("heatmap", "fewer than two sources with enough documents");
        return Ok(());
    }
    let grid = pairwise_heatmap(matrix, &codes, protocol, hp, cfg.selection.k, cfg.selection.bins)
        .map_err(|e| CliError::data("heatmap", e))?;
    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        let header: Vec<&str> = ["source"].into_iter().chain(grid.codes.iter().map(String::as_str)).collect();
        w.write_record(&header).map_err(|e| e.to_string())?;
        for (code, row) in grid.codes.iter().zip(&grid.acc) {
            let mut rec = vec![code.clone()];
            rec.extend(row.iter().map(|v| v.map(|v| format!("{v:?}")).unwrap_or_default()));
            w.write_record(&rec).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(HEATMAP_CSV, &body)?;
    step.write_svg(HEATMAP_SVG, &svg::heatmap(&grid))?;
    step.write_json(HEATMAP_JSON, &HeatmapArtifact { k: cfg.selection.k, bins: cfg.selection.bins, excluded, grid })
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Nothing)?;
    let mut step = StepWriter::new(cfg, "classify")?;
    let hp = hyperparameters(cfg, &mut step)?;
    let ex = load_extracted(cfg, &mut step)?;
    let protocol = protocol(cfg);
    let selections = select::compute(cfg, &ex, &mut step)?;
    if selections.is_empty() {
        return Err(CliError::Data("no grouping applies to this corpus".into()));
    }
    let mut reports = Vec::new();
    for g in &selections {
        let name = g.comparison.name();
        let mut out = GroupingReport {
            grouping: name.into(),
            supplementary: !Comparison::TABLE.contains(&g.comparison),
            levels: Vec::new(),
        };
        for (level, sel) in &g.levels {
            let sub = g.data.select_features(&sel.retained).map_err(|e| CliError::internal(name, e))?;
            let report = evaluate_group(name, &sub, &protocol, &hp)
                .map_err(|e| CliError::Data(format!("grouping `{name}`, level {level}: {e}")))?;
            out.levels.push(LevelReport { level: level.to_string(), report });
        }
        step.write_json(&report_path(name), &out)?;
        reports.push(out);
    }
    write_summary(&mut step, &reports)?;
    let table = write_table(&mut step, &reports)?;
    if cfg.classify.heatmap {
        heatmap(cfg, &ex.matrix, &protocol, &hp, &mut step)?;
    }
    print!("{table}");
    for r in reports.iter().filter(|r| r.supplementary) {
        let all = r.levels.last().expect("six levels");
        println!("{}: ACC {:.4} F1 {:.4} C/T {}", r.grouping, all.report.acc_avg, all.report.f1_avg, all.report.c_over_t());
    }
    step.finish()
}
