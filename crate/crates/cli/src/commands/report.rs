//! Consolidated Markdown report over whatever the run directory holds.

use std::fmt::Write;
use std::path::Path;

use mtese_core::classify::ClassifierKind;
use mtese_core::grouping::Comparison;

use crate::error::{CliError, Result};
use crate::manifest::{read_verified, Manifest, StepRecord, STEPS, TOOLKIT};
use crate::pipeline::{level_label, InventoryArtifact, INVENTORY_JSON};

use super::classify::{self, GroupingReport, HeatmapArtifact};
use super::cluster::{self, ClusterArtifact};
use super::contrast::{self, ContrastArtifact};
use super::{ingest, select};

pub const REPORT_MD: &str = "report.md";
const NOT_RUN: &str = "_not run_";
const TOP_FEATURES: usize = 10;

struct Ctx<'a> {
    dir: &'a Path,
    manifest: &'a Manifest,
}

impl Ctx<'_> {
    /// Artifact bytes when `step` ran and recorded `rel`; digest-checked.
    fn artifact(&self, step: &'static str, rel: &str) -> Result<Option<crate::manifest::Verified>> {
        match self.manifest.step(step) {
            Some(r) if r.artifacts.contains_key(rel) => read_verified(self.dir, self.manifest, step, rel).map(Some),
            _ => Ok(None),
        }
    }

    fn skipped(&self, step: &'static str, unit: &str) -> Option<&str> {
        self.manifest.step(step).and_then(|r| r.skipped.get(unit)).map(String::as_str)
    }
}

fn csv_rows(v: &crate::manifest::Verified) -> Result<Vec<csv::StringRecord>> {
    csv::Reader::from_reader(v.csv_body())
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::data(&v.rel, e))
}

fn short(d: &str) -> &str {
    &d[..12.min(d.len())]
}

fn provenance(out: &mut String, m: &Manifest) {
    out.push_str("## Provenance\n\n| step | config digest | inputs | artifacts |\n|---|---|---|---|\n");
    for (name, _) in STEPS {
        match m.steps.get(name) {
            Some(StepRecord { config_digest, inputs, artifacts, .. }) => {
                writeln!(out, "| {name} | `{}` | {} | {} |", short(config_digest), inputs.len(), artifacts.len())
                    .unwrap();
            }
            None => writeln!(out, "| {name} | {NOT_RUN} | | |").unwrap(),
        }
    }
    let seeds: Vec<String> = m
        .steps
        .iter()
        .filter_map(|(n, r)| r.config.get("seed").map(|s| format!("{n}: {s}")))
        .collect();
    writeln!(out, "\nMaster seeds: {}. Full digests and resolved configs are in `manifest.json`.\n", seeds.join(", "))
        .unwrap();
}

fn corpus(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Corpus\n\n");
    let Some(v) = cx.artifact("ingest", ingest::STATS_CSV)? else {
        out.push_str(NOT_RUN);
        out.push_str("\n\n");
        return Ok(());
    };
    out.push_str("| group | texts | tokens | types |\n|---|---:|---:|---:|\n");
    for r in csv_rows(&v)? {
        writeln!(out, "| {} | {} | {} | {} |", &r[0], &r[2], &r[3], &r[4]).unwrap();
    }
    out.push('\n');
    Ok(())
}

fn inventory(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Feature inventory\n\n");
    let Some(v) = cx.artifact("extract", INVENTORY_JSON)? else {
        out.push_str(NOT_RUN);
        out.push_str("\n\n");
        return Ok(());
    };
    let inv: InventoryArtifact = v.json()?;
    writeln!(out, "{} documents, tagset `{}`.\n", inv.documents, inv.tagset_id).unwrap();
    out.push_str("| layer | features |\n|---|---:|\n");
    for (layer, n) in &inv.layer_counts {
        writeln!(out, "| {} | {n} |", level_label(layer)).unwrap();
    }
    writeln!(out, "| total | {} |\n", inv.layer_counts.iter().map(|(_, n)| n).sum::<usize>()).unwrap();
    Ok(())
}

fn results_table(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Results by feature level\n\n");
    let Some(v) = cx.artifact("classify", classify::TABLE_CSV)? else {
        out.push_str(NOT_RUN);
        out.push_str("\n\n");
        return Ok(());
    };
    let mut r = csv::Reader::from_reader(v.csv_body());
    let header = r.headers().map_err(|e| CliError::data(&v.rel, e))?.clone();
    writeln!(out, "| {} |", header.iter().collect::<Vec<_>>().join(" | ")).unwrap();
    writeln!(out, "|{}", "---|".repeat(header.len())).unwrap();
    for rec in csv_rows(&v)? {
        writeln!(out, "| {} |", rec.iter().collect::<Vec<_>>().join(" | ")).unwrap();
    }
    out.push('\n');
    Ok(())
}

fn grouping(out: &mut String, cx: &Ctx, name: &str, heading: &str) -> Result<()> {
    writeln!(out, "{heading} {name}\n").unwrap();
    let report = cx.artifact("classify", &classify::report_path(name))?;
    match (&report, cx.skipped("classify", name).or(cx.skipped("select", name))) {
        (None, Some(why)) => writeln!(out, "_not run: {why}_\n").unwrap(),
        (None, None) => writeln!(out, "Classification: {NOT_RUN}\n").unwrap(),
        (Some(v), _) => {
            let g: GroupingReport = v.json()?;
            if let Some(first) = g.levels.first().and_then(|l| l.report.per_classifier.first()) {
                let sizes: Vec<String> = first
                    .confusion
                    .iter()
                    .zip(&g.levels[0].report.class_names)
                    .map(|(row, c)| format!("{c} ({})", row.iter().sum::<usize>()))
                    .collect();
                writeln!(out, "Classes: {}.\n", sizes.join(", ")).unwrap();
            }
            let kinds: Vec<&str> = ClassifierKind::ALL.iter().map(|k| k.as_str()).collect();
            writeln!(out, "| level | features | ACC | F1 | C/T | {} |", kinds.join(" | ")).unwrap();
            writeln!(out, "|---|---:|---:|---:|---:|{}", "---:|".repeat(kinds.len())).unwrap();
            for l in &g.levels {
                let r = &l.report;
                let per: Vec<String> = r.per_classifier.iter().map(|s| format!("{:.4}", s.acc)).collect();
                writeln!(
                    out,
                    "| {} | {} | {:.4} | {:.4} | {} | {} |",
                    level_label(&l.level),
                    r.features.len(),
                    r.acc_avg,
                    r.f1_avg,
                    r.c_over_t(),
                    per.join(" | ")
                )
                .unwrap();
            }
            out.push('\n');
        }
    }
    match cx.artifact("select", &select::selection_path(name, "all"))? {
        None if report.is_none() => {}
        None => writeln!(out, "Selected features: {NOT_RUN}\n").unwrap(),
        Some(v) => {
            writeln!(out, "Top {TOP_FEATURES} features by χ² (all features):\n").unwrap();
            out.push_str("| rank | feature | χ² | p |\n|---:|---|---:|---:|\n");
            for rec in csv_rows(&v)?.iter().take(TOP_FEATURES) {
                let chi2: f64 = rec[2].parse().unwrap_or(f64::NAN);
                let p: f64 = rec[3].parse().unwrap_or(f64::NAN);
                writeln!(out, "| {} | {} | {chi2:.3} | {p:.3e} |", &rec[0], &rec[1]).unwrap();
            }
            out.push('\n');
        }
    }
    Ok(())
}

fn heatmap(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Pairwise source heatmap\n\n");
    match cx.artifact("classify", classify::HEATMAP_JSON)? {
        None => writeln!(out, "{NOT_RUN}\n").unwrap(),
        Some(v) => {
            let h: HeatmapArtifact = v.json()?;
            writeln!(
                out,
                "Averaged accuracy of each source pair on its own top-{} χ² features.\n\n![pairwise heatmap]({})\n",
                h.k,
                classify::HEATMAP_SVG
            )
            .unwrap();
            if !h.excluded.is_empty() {
                writeln!(out, "Left out for having fewer documents than folds: {}.\n", h.excluded.join(", ")).unwrap();
            }
        }
    }
    Ok(())
}

fn clustering(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Clustering\n\n");
    let Some(v) = cx.artifact("cluster", cluster::REPORT_JSON)? else {
        writeln!(out, "{NOT_RUN}\n").unwrap();
        return Ok(());
    };
    let c: ClusterArtifact = v.json()?;
    let r = &c.report;
    writeln!(
        out,
        "k-means (k = {}) on the {} features shared by the top-k selections of {}. \
         ARI against {} = **{:.4}**.\n",
        r.config.k,
        c.shared_features.len(),
        c.selected_from.join(", "),
        c.grouping,
        r.ari
    )
    .unwrap();
    out.push_str("| class | main cluster | purity |\n|---|---:|---:|\n");
    for p in &r.purity {
        writeln!(out, "| {} | {} | {:.4} |", p.class, p.cluster, p.purity).unwrap();
    }
    writeln!(out, "\nShared features: {}.\n", c.shared_features.join(", ")).unwrap();
    writeln!(out, "![cluster scatter]({})\n", cluster::SCATTER_SVG).unwrap();
    out.push_str("The scatter uses a PCA projection for display only; clustering ran in the full feature space.\n\n");
    Ok(())
}

fn contrasts(out: &mut String, cx: &Ctx) -> Result<()> {
    out.push_str("## Feature contrasts\n\n");
    let Some(v) = cx.artifact("contrast", contrast::CONTRAST_JSON)? else {
        writeln!(out, "{NOT_RUN}\n").unwrap();
        return Ok(());
    };
    let c: ContrastArtifact = v.json()?;
    let groups: Vec<String> = c.results.first().map(|r| r.groups.iter().map(|g| g.group.clone()).collect()).unwrap_or_default();
    writeln!(out, "Groups of {}. Medians per group.\n", c.grouping).unwrap();
    writeln!(out, "| feature | test | statistic | p | {} |", groups.join(" | ")).unwrap();
    writeln!(out, "|---|---|---:|---:|{}", "---:|".repeat(groups.len())).unwrap();
    for r in &c.results {
        let med: Vec<String> = r.groups.iter().map(|g| format!("{:.4}", g.median)).collect();
        writeln!(
            out,
            "| {} | {} | {} = {:.3} | {:.3e} | {} |",
            r.feature,
            r.test.as_str(),
            r.test.statistic_name(),
            r.statistic,
            r.p_value,
            med.join(" | ")
        )
        .unwrap();
    }
    out.push('\n');
    for (r, fig) in c.results.iter().zip(&c.figures) {
        writeln!(out, "![{}]({fig})\n", r.feature).unwrap();
    }
    Ok(())
}

/// Renders the report for the run in `dir`.
pub fn render(dir: &Path) -> Result<String> {
    let manifest = Manifest::require(dir, "extract")?;
    let cx = Ctx { dir, manifest: &manifest };
    let mut out = String::from("# Machine-translationese analysis report\n\n");
    writeln!(out, "Generated by {TOOLKIT} from `manifest.json`.\n").unwrap();
    provenance(&mut out, &manifest);
    corpus(&mut out, &cx)?;
    inventory(&mut out, &cx)?;
    results_table(&mut out, &cx)?;
    for c in &Comparison::TABLE {
        grouping(&mut out, &cx, c.name(), "## Group")?;
    }
    out.push_str("## Supplementary groupings\n\n");
    let mut extra: Vec<String> = Comparison::SUPPLEMENTARY.iter().map(|c| c.name().to_string()).collect();
    for r in ["select", "classify"].iter().filter_map(|s| manifest.steps.get(*s)) {
        if let Some(custom) = r.config.pointer("/groupings/custom").and_then(|v| v.as_object()) {
            extra.extend(custom.keys().cloned());
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for name in extra.into_iter().filter(|n| seen.insert(n.clone())) {
        grouping(&mut out, &cx, &name, "###")?;
    }
    heatmap(&mut out, &cx)?;
    clustering(&mut out, &cx)?;
    contrasts(&mut out, &cx)?;
    Ok(out)
}

pub fn run(dir: &Path) -> Result<()> {
    let text = render(dir)?;
    let path = dir.join(REPORT_MD);
    std::fs::write(&path, &text).map_err(|e| CliError::write(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}
