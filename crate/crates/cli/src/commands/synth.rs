//! Writes a planted-signal demo corpus with everything `extract` needs.

use std::path::Path;

use mtese_core::corpus::serialize_corpus;
use mtese_core::synth::{planted_corpus, SynthConfig};
use mtese_core::Tagset;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const CONFIG_FILE: &str = "mtese.toml";

pub fn run(dir: &Path, synth: &SynthConfig, seed: u64) -> Result<()> {
    if synth.docs_per_group < 5 || synth.sentences_per_doc == 0 || synth.reference_docs == 0 {
        return Err(CliError::Validation("synth needs at least 5 documents per group and non-empty documents".into()));
    }
    let bundle = planted_corpus(synth).map_err(|e| CliError::internal("generating the corpus", e))?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    let mut cfg = RunConfig { seed, out: "run".into(), ..RunConfig::default() };
    cfg.inputs.corpora = vec!["corpus.conll".into()];
    cfg.inputs.tagset = Some("tagset.txt".into());
    cfg.inputs.frequency_lexicon = Some("frequency.tsv".into());
    cfg.inputs.concreteness_lexicon = Some("concreteness.tsv".into());
    cfg.inputs.reference_corpus = Some("reference.conll".into());
    let config = toml::to_string(&cfg).map_err(|e| CliError::internal("config", e))?;
    let files = [
        ("corpus.conll", serialize_corpus(&bundle.corpus)),
        ("reference.conll", serialize_corpus(&bundle.reference)),
        ("tagset.txt", Tagset::ltp().to_declaration()),
        ("frequency.tsv", bundle.frequency_tsv),
        ("concreteness.tsv", bundle.concreteness_tsv),
        (CONFIG_FILE, config),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::write(&path, e))?;
    }
    println!(
        "wrote {} documents ({} reference) to {}; run `mtese --config {} run`",
        bundle.corpus.len(),
        bundle.reference.len(),
        dir.display(),
        dir.join(CONFIG_FILE).display()
    );
    Ok(())
}
