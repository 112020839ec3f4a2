//! Runs selection, classification and clustering on the planted synthetic
//! corpus and prints the headline numbers.

use mtese_core::classify::{evaluate_group, EvaluationProtocol, Hyperparameters};
use mtese_core::cluster::{cluster_and_score, KMeansConfig};
use mtese_core::features::{build_reference_profile, default_inventory, extract_all, Resources, DEFAULT_NPOS_SIZES};
use mtese_core::grouping::Comparison;
use mtese_core::selection::{chi2_rank, select_top_k, shared_top_features};
use mtese_core::synth::{planted_corpus, SynthConfig};
use mtese_core::Tagset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t0 = std::time::Instant::now();
    let tagset = Tagset::ltp();
    let seed = std::env::args().nth(1).map_or(Ok(SynthConfig::default().seed), |a| a.parse())?;
    let bundle = planted_corpus(&SynthConfig { seed, ..SynthConfig::default() })?;
    let profile = build_reference_profile(&bundle.reference, tagset.id())?;
    let (inventory, _) = default_inventory(&tagset, &bundle.corpus, &profile, DEFAULT_NPOS_SIZES)?;
    let resources = Resources::new(bundle.frequency()?, bundle.concreteness()?);
    let matrix = extract_all(&bundle.corpus, &inventory, &resources)?.matrix;
    println!("{} docs x {} features ({:?})", matrix.n_docs(), matrix.n_features(), t0.elapsed());

    let protocol = EvaluationProtocol::default();
    let hp = Hyperparameters::default();
    let mut pair_selections = Vec::new();
    for c in [Comparison::OcnMts, Comparison::LlmsNmts, Comparison::OcnNmts, Comparison::OcnLlms] {
        let data = c.dataset(&matrix)?;
        let ranked = chi2_rank(&data, 10)?;
        let top: Vec<String> = ranked.ranked.iter().take(8).map(|r| format!("{} ({:.1})", r.feature, r.chi2)).collect();
        println!("{c}: top {}", top.join(", "));
        let sel = select_top_k(&ranked, 30);
        let report = evaluate_group(c.name(), &data.select_features(&sel.retained)?, &protocol, &hp)?;
        let per: Vec<String> =
            report.per_classifier.iter().map(|s| format!("{}={:.3}", s.classifier, s.acc)).collect();
        println!("  ACC_avg {:.4} F1_avg {:.4} C/T {} [{}]", report.acc_avg, report.f1_avg, report.c_over_t(), per.join(" "));
        if c != Comparison::OcnMts {
            pair_selections.push(sel);
        }
    }
    let shared = shared_top_features(&pair_selections)?;
    let three = Comparison::parse_custom("OCN-NMT-LLM", "OCN=OCN;NMT=NMT;LLM=LLM")?.dataset(&matrix)?;
    let report = cluster_and_score(&three, &shared, &KMeansConfig::default(), true)?;
    println!("clustering on {} shared features: ARI {:.4}, purity {:?}", shared.len(), report.ari, report.purity);
    let mut table = vec![vec![0; 3]; 3];
    for (a, t) in report.assignments.iter().zip(&report.truth) {
        table[*t][*a] += 1;
    }
    println!("truth x cluster {table:?}, inertia {:.1}", report.inertia);
    println!("elapsed {:?}", t0.elapsed());
    Ok(())
}
