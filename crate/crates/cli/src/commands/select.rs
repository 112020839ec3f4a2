//! χ² feature selection per grouping and feature level.

use mtese_core::grouping::Comparison;
use mtese_core::matrix::Dataset;
use mtese_core::selection::SelectionResult;
use serde::{Deserialize, Serialize};

use crate::config::{Needs, RunConfig, Scope};
use crate::error::{CliError, Result};
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, grouping_dataset, levels, load_extracted, select_level, slug, Extracted, ALL_LEVEL};

pub const SUMMARY_JSON: &str = "select/summary.json";

pub struct GroupingSelection {
    pub comparison: Comparison,
    pub data: Dataset,
    pub levels: Vec<(&'static str, SelectionResult)>,
}

/// Selections for every configured grouping; inapplicable built-in
/// groupings are recorded as skipped.
pub fn compute(cfg: &RunConfig, ex: &Extracted, step: &mut StepWriter) -> Result<Vec<GroupingSelection>> {
    let mut out = Vec::new();
    for c in cfg.comparisons()? {
        let Some(data) = grouping_dataset(&c, &ex.matrix)? else {
            step.skip(c.name(), "fewer than two classes present in the corpus");
            continue;
        };
        let levels = levels()
            .into_iter()
            .map(|l| Ok((l, select_level(c.name(), &data, &ex.inventory.inventory, l, cfg)?)))
            .collect::<Result<_>>()?;
        out.push(GroupingSelection { comparison: c, data, levels });
    }
    Ok(out)
}

pub fn selection_path(grouping: &str, level: &str) -> String {
    format!("select/{}/{level}.csv", slug(grouping))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LevelSelection {
    pub level: String,
    pub retained: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupingSummary {
    pub grouping: String,
    pub classes: Vec<String>,
    pub class_sizes: Vec<usize>,
    pub levels: Vec<LevelSelection>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelectSummary {
    pub k: usize,
    pub bins: usize,
    pub scope: Scope,
    pub groupings: Vec<GroupingSummary>,
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Nothing)?;
    let mut step = StepWriter::new(cfg, "select")?;
    let ex = load_extracted(cfg, &mut step)?;
    let selections = compute(cfg, &ex, &mut step)?;
    let mut summary =
        SelectSummary { k: cfg.selection.k, bins: cfg.selection.bins, scope: cfg.selection.scope, groupings: Vec::new() };
    for g in &selections {
        let name = g.comparison.name();
        for (level, sel) in &g.levels {
            let body = csv_bytes(|buf| sel.write_csv(buf).map_err(|e| e.to_string()))?;
            step.write_csv(&selection_path(name, level), &body)?;
        }
        let all = &g.levels.iter().find(|(l, _)| *l == ALL_LEVEL).expect("all level is always computed").1;
        let top: Vec<&str> = all.ranked.iter().take(5).map(|r| r.feature.as_str()).collect();
        println!("{name}: top {}", top.join(", "));
        summary.groupings.push(GroupingSummary {
            grouping: name.into(),
            classes: g.data.class_names.clone(),
            class_sizes: g.data.class_counts(),
            levels: g
                .levels
                .iter()
                .map(|(l, s)| LevelSelection { level: l.to_string(), retained: s.retained.clone() })
                .collect(),
        });
    }
    if selections.is_empty() {
        return Err(CliError::Data("no grouping applies to this corpus".into()));
    }
    step.write_json(SUMMARY_JSON, &summary)?;
    step.finish()
}
