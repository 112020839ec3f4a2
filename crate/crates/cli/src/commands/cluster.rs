//! k-means over the features shared by the three pairwise top-k selections.

use mtese_core::cluster::{cluster_and_score, ClusteringReport, KMeansConfig};
use mtese_core::grouping::Comparison;
use mtese_core::selection::shared_top_features;
use serde::{Deserialize, Serialize};

use crate::config::{Needs, RunConfig, ORIGIN_GROUPING};
use crate::error::{CliError, Result};
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, load_extracted, select_level, ALL_LEVEL};
use crate::svg;

pub const ASSIGNMENTS_CSV: &str = "cluster/assignments.csv";
pub const REPORT_JSON: &str = "cluster/report.json";
pub const SCATTER_SVG: &str = "cluster/scatter.svg";

/// Pairwise groupings whose top-k selections are intersected.
pub const PAIRS: [Comparison; 3] = [Comparison::OcnNmts, Comparison::OcnLlms, Comparison::LlmsNmts];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterArtifact {
    pub grouping: String,
    pub selected_from: Vec<String>,
    /// Shared features by first appearance across the selections.
    pub shared_features: Vec<String>,
    pub report: ClusteringReport,
}

pub fn origin_dataset(ex_matrix: &mtese_core::FeatureMatrix) -> Result<mtese_core::matrix::Dataset> {
    let (name, spec) = ORIGIN_GROUPING;
    Comparison::parse_custom(name, spec)
        .and_then(|c| c.dataset(ex_matrix))
        .map_err(|e| CliError::Data(e.to_string()))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Nothing)?;
    let mut step = StepWriter::new(cfg, "cluster")?;
    let ex = load_extracted(cfg, &mut step)?;
    let mut selections = Vec::new();
    for c in &PAIRS {
        let data = c.dataset(&ex.matrix).map_err(|e| CliError::Data(format!("clustering needs {}: {e}", c.name())))?;
        selections.push(select_level(c.name(), &data, &ex.inventory.inventory, ALL_LEVEL, cfg)?);
    }
    let shared = shared_top_features(&selections).map_err(|e| CliError::data("shared features", e))?;
    let data = origin_dataset(&ex.matrix)?;
    let kcfg = KMeansConfig {
        k: cfg.cluster.k,
        seed: cfg.seed,
        max_iter: cfg.cluster.max_iter,
        restarts: cfg.cluster.restarts,
    };
    let report =
        cluster_and_score(&data, &shared, &kcfg, cfg.cluster.standardize).map_err(|e| CliError::data("clustering", e))?;

    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["doc_id", "true_label", "cluster", "x", "y"]).map_err(|e| e.to_string())?;
        for i in 0..report.doc_ids.len() {
            let p = report.projection[i];
            w.write_record([
                report.doc_ids[i].clone(),
                report.class_names[report.truth[i]].clone(),
                report.assignments[i].to_string(),
                format!("{:?}", p[0]),
                format!("{:?}", p[1]),
            ])
            .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(ASSIGNMENTS_CSV, &body)?;
    step.write_svg(SCATTER_SVG, &svg::scatter(&report))?;
    println!("{} shared features, ARI {:.4}, inertia {:.3}", shared.len(), report.ari, report.inertia);
    for p in &report.purity {
        println!("  {} -> cluster {} (purity {:.3})", p.class, p.cluster, p.purity);
    }
    let artifact = ClusterArtifact {
        grouping: ORIGIN_GROUPING.0.into(),
        selected_from: PAIRS.iter().map(|c| c.name().to_string()).collect(),
        shared_features: shared,
        report,
    };
    step.write_json(REPORT_JSON, &artifact)?;
    step.finish()
}
