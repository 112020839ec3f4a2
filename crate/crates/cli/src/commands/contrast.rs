//! Per-feature group contrasts (ANOVA or Kruskal-Wallis) with box plots.

use mtese_core::selection::chi2_rank;
use mtese_core::stats::{contrast_feature, ContrastResult};
use serde::{Deserialize, Serialize};

use crate::config::{Needs, RunConfig, ORIGIN_GROUPING};
use crate::error::{CliError, Result};
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, load_extracted, slug};
use crate::svg;

use super::cluster::origin_dataset;

pub const CONTRAST_CSV: &str = "contrast/contrast.csv";
pub const CONTRAST_JSON: &str = "contrast/contrast.json";

pub fn boxplot_path(i: usize, feature: &str) -> String {
    format!("contrast/boxplot_{:02}_{}.svg", i + 1, slug(feature))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastArtifact {
    pub grouping: String,
    /// Features were picked by χ² rank rather than named in the config.
    pub ranked: bool,
    pub results: Vec<ContrastResult>,
    pub figures: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Nothing)?;
    let mut step = StepWriter::new(cfg, "contrast")?;
    let ex = load_extracted(cfg, &mut step)?;
    if let Some(f) = cfg.contrast.features.iter().find(|f| ex.matrix.feature_index(f).is_none()) {
        return Err(CliError::Validation(format!("contrast feature `{f}` is not in the extracted inventory")));
    }
    let data = origin_dataset(&ex.matrix)?;
    let ranked = cfg.contrast.features.is_empty();
    let features: Vec<String> = if ranked {
        chi2_rank(&data, cfg.selection.bins)
            .map_err(|e| CliError::data("ranking contrast features", e))?
            .ranked
            .into_iter()
            .take(cfg.contrast.top)
            .map(|r| r.feature)
            .collect()
    } else {
        cfg.contrast.features.clone()
    };
    let results: Vec<ContrastResult> = features
        .iter()
        .map(|f| contrast_feature(&data, f).map_err(|e| CliError::Data(format!("contrast of `{f}`: {e}"))))
        .collect::<Result<_>>()?;

    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record([
            "feature", "test", "statistic", "p_value", "group", "n", "mean", "std", "min", "q1", "median", "q3", "max",
            "normality_p",
        ])
        .map_err(|e| e.to_string())?;
        for r in &results {
            for g in &r.groups {
                let mut rec = vec![
                    r.feature.clone(),
                    r.test.as_str().to_string(),
                    format!("{:?}", r.statistic),
                    format!("{:?}", r.p_value),
                    g.group.clone(),
                    g.n.to_string(),
                ];
                rec.extend([g.mean, g.std, g.min, g.q1, g.median, g.q3, g.max].iter().map(|v| format!("{v:?}")));
                rec.push(g.normality.map(|t| format!("{:?}", t.p_value)).unwrap_or_default());
                w.write_record(&rec).map_err(|e| e.to_string())?;
            }
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(CONTRAST_CSV, &body)?;
    let mut figures = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let path = boxplot_path(i, &r.feature);
        step.write_svg(&path, &svg::boxplot(r))?;
        figures.push(path);
        println!("{}: {} {} = {:.4}, p = {:.3e}", r.feature, r.test.as_str(), r.test.statistic_name(), r.statistic, r.p_value);
    }
    step.write_json(
        CONTRAST_JSON,
        &ContrastArtifact { grouping: ORIGIN_GROUPING.0.into(), ranked, results, figures },
    )?;
    step.finish()
}
