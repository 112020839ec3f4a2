//! Parses and validates the corpora and tabulates texts, tokens and types.

use mtese_core::corpus::{corpus_stats, format_thousands, StatsKey};
use serde::Serialize;

use crate::config::{Needs, RunConfig};
use crate::error::Result;
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, load_corpora, load_tagset};

pub const STATS_CSV: &str = "ingest/corpus_stats.csv";
pub const SUMMARY_JSON: &str = "ingest/summary.json";

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct StatsRow {
    pub group: String,
    pub origin: String,
    pub texts: usize,
    pub tokens: usize,
    pub types: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    tagset_id: &'a str,
    documents: usize,
    warnings: &'a [String],
    rows: &'a [StatsRow],
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Corpora)?;
    let mut step = StepWriter::new(cfg, "ingest")?;
    let tagset = load_tagset(cfg, &mut step)?;
    let (corpus, warnings) = load_corpora(cfg, &tagset, &mut step)?;
    let rows: Vec<StatsRow> = corpus_stats(&corpus)
        .into_iter()
        .map(|(key, s)| {
            let origin = match &key {
                StatsKey::Engine { origin, .. } | StatsKey::OriginTotal(origin) => origin.to_string(),
                StatsKey::AllTranslations => "MT".into(),
            };
            StatsRow { group: key.label(), origin, texts: s.texts, tokens: s.tokens, types: s.types }
        })
        .collect();
    let body = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        for r in &rows {
            w.serialize(r).map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())
    })?;
    step.write_csv(STATS_CSV, &body)?;
    let summary = Summary { tagset_id: tagset.id(), documents: corpus.len(), warnings: &warnings, rows: &rows };
    step.write_json(SUMMARY_JSON, &summary)?;

    println!("{} documents, tagset {}, {} parse warnings", corpus.len(), tagset.id(), warnings.len());
    println!("{:<8} {:>8} {:>12} {:>10}", "group", "texts", "tokens", "types");
    for r in &rows {
        println!(
            "{:<8} {:>8} {:>12} {:>10}",
            r.group,
            format_thousands(r.texts),
            format_thousands(r.tokens),
            format_thousands(r.types)
        );
    }
    step.finish()
}
