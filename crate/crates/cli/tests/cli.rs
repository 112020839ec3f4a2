//! End-to-end tests of the `mtese` binary on generated corpora.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

fn mtese<P: AsRef<std::ffi::OsStr>>(args: &[P]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtese"))
        .args(args)
        .env_remove("MTESE_CONFIG")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Small planted corpus: 30 documents per origin, so every engine has at
/// least five documents for 5-fold evaluation.
fn synth(dir: &Path) -> PathBuf {
    let o = mtese(&[
        "synth".as_ref(),
        dir.as_os_str(),
        "--docs".as_ref(),
        "30".as_ref(),
        "--sentences".as_ref(),
        "15".as_ref(),
        "--reference-docs".as_ref(),
        "10".as_ref(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join("mtese.toml")
}

fn with_config(config: &Path, out: &Path, rest: &[&str]) -> Output {
    let mut args: Vec<&std::ffi::OsStr> =
        vec!["--config".as_ref(), config.as_os_str(), "--out".as_ref(), out.as_os_str()];
    args.extend(rest.iter().map(|s| std::ffi::OsStr::new(s)));
    mtese(&args)
}

/// Body of a stamped CSV (first line is the provenance comment).
fn csv_lines(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let stamp = lines.next().unwrap();
    assert!(stamp.starts_with("# mtese") && stamp.contains("config_digest="), "{stamp}");
    lines.map(str::to_string).collect()
}

fn recorded_steps(run: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(run.join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["steps"].as_object().unwrap().keys().cloned().collect()
}

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

/// One complete run shared by the tests that only read its outputs.
fn full_run() -> &'static Path {
    static RUN: OnceLock<PathBuf> = OnceLock::new();
    RUN.get_or_init(|| {
        let root = Path::new(env!("CARGO_TARGET_TMPDIR")).join("mtese-full-run");
        let _ = std::fs::remove_dir_all(&root);
        let config = synth(&root);
        let o = with_config(&config, &root.join("run"), &["run"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        root.join("run")
    })
}

#[test]
fn extract_writes_236_features_plus_label_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("run");
    let o = with_config(&config, &out, &["extract"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines = csv_lines(&out.join("extract/features.csv"));
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 236 + 3);
    assert_eq!(&header[..3], ["doc_id", "origin", "engine"]);
    assert_eq!(lines.len(), 1 + 90);
    assert!(stdout(&o).lines().any(|l| l.split_whitespace().eq(["total", "236"])), "{}", stdout(&o));
}

#[test]
fn missing_lexicon_fails_validation_before_any_work() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    std::fs::remove_file(tmp.path().join("frequency.tsv")).unwrap();
    let out = tmp.path().join("run");
    let o = with_config(&config, &out, &["extract"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("frequency lexicon"), "{}", stderr(&o));
    assert!(!out.exists(), "nothing may be written on a validation error");
}

#[test]
fn unusable_flags_exit_with_validation_code() {
    assert_eq!(code(&mtese(&["extract", "--no-such-flag"])), 1);
    assert_eq!(code(&mtese(&["--help"])), 0);
    assert_eq!(code(&mtese(&["--version"])), 0);
    let tmp = tempfile::tempdir().unwrap();
    let o = mtese(&["--out".as_ref(), tmp.path().as_os_str(), "select".as_ref(), "--k".as_ref(), "0".as_ref()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let o = mtese(&["--out".as_ref(), tmp.path().as_os_str(), "select".as_ref(), "--grouping".as_ref(), "nope".as_ref()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn downstream_commands_need_an_extracted_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    for cmd in ["select", "classify", "cluster", "contrast", "report"] {
        let o = mtese(&["--out".as_ref(), tmp.path().as_os_str(), cmd.as_ref()]);
        assert_eq!(code(&o), 2, "{cmd}: {}", stderr(&o));
        assert!(stderr(&o).contains("missing artifact"), "{cmd}: {}", stderr(&o));
    }
}

#[test]
fn reruns_with_equal_inputs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let args = ["run", "--grouping", "OCN-MTs", "--no-heatmap"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let oa = with_config(&config, &a, &[&["--jobs", "1"], &args[..]].concat());
    let ob = with_config(&config, &b, &[&["--jobs", "2"], &args[..]].concat());
    assert_eq!(code(&oa), 0, "{}", stderr(&oa));
    assert_eq!(code(&ob), 0, "{}", stderr(&ob));
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.len() > 20, "{:?}", fa.keys());
    assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
    for (k, v) in &fa {
        assert!(v == &fb[k], "{} differs between runs", k.display());
    }
}

#[test]
fn grouping_with_an_absent_engine_names_the_code() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let text = std::fs::read_to_string(&config).unwrap();
    let custom = text.replace("[groupings.custom]\n", "[groupings.custom]\nabsent = \"A=OCN;B=NGT,NXX\"\n");
    assert_ne!(custom, text);
    let custom_path = tmp.path().join("custom.toml");
    std::fs::write(&custom_path, custom).unwrap();
    let out = tmp.path().join("run");
    assert_eq!(code(&with_config(&custom_path, &out, &["extract"])), 0);
    let o = with_config(&custom_path, &out, &["select", "--grouping", "OCN-MTs"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("no documents for `NXX`") && err.contains("absent"), "{err}");
}

#[test]
fn tampered_matrix_aborts_downstream_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&with_config(&config, &out, &["extract"])), 0);
    let path = out.join("extract/features.csv");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("\n");
    std::fs::write(&path, text).unwrap();
    let o = with_config(&config, &out, &["cluster"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("does not match the manifest"), "{}", stderr(&o));
}

#[test]
fn changed_config_digest_inside_an_artifact_is_detected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&with_config(&config, &out, &["extract"])), 0);
    // rewrite the stamp and the manifest's file digest, leaving the config digest stale
    let path = out.join("extract/inventory.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let start = text.find("\"config_digest\": \"").unwrap() + 18;
    let old = &text[start..start + 64];
    let forged = text.replacen(old, &"0".repeat(64), 1);
    std::fs::write(&path, &forged).unwrap();
    let manifest_path = out.join("manifest.json");
    let manifest = std::fs::read_to_string(&manifest_path).unwrap();
    let old_digest = hex(text.as_bytes());
    let new_digest = hex(forged.as_bytes());
    assert!(manifest.contains(&old_digest));
    std::fs::write(&manifest_path, manifest.replace(&old_digest, &new_digest)).unwrap();
    let o = with_config(&config, &out, &["select"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("embedded config digest"), "{}", stderr(&o));
}

#[test]
fn partial_run_reports_placeholders_and_regenerates_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&with_config(&config, &out, &["extract"])), 0);
    let o = with_config(&config, &out, &["report"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = std::fs::read(out.join("report.md")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.matches("\n## Group ").count(), 6);
    assert!(text.matches("Classification: _not run_").count() >= 6, "{text}");
    assert!(text.contains("## Clustering\n\n_not run_"));
    assert!(text.contains("| total | 236 |"));
    assert_eq!(code(&with_config(&config, &out, &["report"])), 0);
    assert_eq!(std::fs::read(out.join("report.md")).unwrap(), first);
}

#[test]
fn full_run_produces_every_artifact() {
    let run = full_run();
    for f in [
        "manifest.json",
        "report.md",
        "ingest/corpus_stats.csv",
        "extract/features.csv",
        "extract/reference_profile.json",
        "select/OCN-MTs/all.csv",
        "select/China-vs-foreign/npos.csv",
        "classify/table2.csv",
        "classify/OCN-MTs.json",
        "classify/heatmap.svg",
        "classify/heatmap.csv",
        "cluster/assignments.csv",
        "cluster/scatter.svg",
        "cluster/report.json",
        "contrast/contrast.csv",
        "contrast/boxplot_01_Characters_per_sentence.svg",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let table = csv_lines(&run.join("classify/table2.csv"));
    assert_eq!(table[0], "level,metric,OCN-MTs,OCN-NMTs,OCN-LLMs,LLMs-NMTs,NMT-intra,LLM-intra");
    assert_eq!(table.len(), 1 + 6 * 3);
    assert!(table[1].starts_with("Lexical,ACC,"));
    assert!(table[18].starts_with("All Features,C/T,"));
    assert!(!table.iter().any(|l| l.contains("not run")));

    // planted contrasts: originals separate from translations
    let all_acc: Vec<f64> = table[16].split(',').skip(2).map(|v| v.parse().unwrap()).collect();
    assert!(all_acc[0] >= 0.9, "OCN-MTs ACC {}", all_acc[0]);

    let assignments = csv_lines(&run.join("cluster/assignments.csv"));
    assert_eq!(assignments[0], "doc_id,true_label,cluster,x,y");
    assert_eq!(assignments.len(), 1 + 90);

    let heatmap = csv_lines(&run.join("classify/heatmap.csv"));
    assert!(heatmap[0].starts_with("source,OCN,NGT,"), "{}", heatmap[0]);
    assert_eq!(heatmap.len(), 1 + 12);
}

#[test]
fn full_run_report_has_six_groups_and_supplementary_sections() {
    let run = full_run();
    let text = std::fs::read_to_string(run.join("report.md")).unwrap();
    let groups: Vec<&str> = text.lines().filter(|l| l.starts_with("## Group ")).collect();
    assert_eq!(
        groups,
        ["## Group OCN-MTs", "## Group OCN-NMTs", "## Group OCN-LLMs", "## Group LLMs-NMTs", "## Group NMT-intra", "## Group LLM-intra"]
    );
    assert!(text.contains("## Supplementary groupings\n\n### specific-vs-generic"));
    assert!(text.contains("### China-vs-foreign"));
    assert!(!text.contains("not run"), "complete run has no placeholders");
    assert!(text.contains("![pairwise heatmap](classify/heatmap.svg)"));
    assert!(text.contains("PCA projection for display only"));
    let manifest = std::fs::read_to_string(run.join("manifest.json")).unwrap();
    let digest_start = manifest.find("\"config_digest\": \"").unwrap() + 18;
    assert!(text.contains(&format!("`{}`", &manifest[digest_start..digest_start + 12])));
}

#[test]
fn every_artifact_embeds_the_config_digest() {
    let run = full_run();
    for (path, bytes) in files(run) {
        let name = path.to_string_lossy();
        if name == "manifest.json" || name == "report.md" {
            continue;
        }
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("config_digest"), "{name} lacks a config digest");
    }
}

#[test]
fn config_file_comes_from_the_environment_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("envrun");
    let o = Command::new(env!("CARGO_BIN_EXE_mtese"))
        .args(["--seed".as_ref(), "7".as_ref(), "--out".as_ref(), out.as_os_str(), "ingest".as_ref()])
        .env("MTESE_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 7"), "{manifest}");
    assert!(stdout(&o).contains("MTs"), "{}", stdout(&o));
}

#[test]
fn reextracting_drops_stale_downstream_records() {
    let tmp = tempfile::tempdir().unwrap();
    let config = synth(tmp.path());
    let out = tmp.path().join("run");
    assert_eq!(code(&with_config(&config, &out, &["extract"])), 0);
    assert_eq!(code(&with_config(&config, &out, &["contrast", "--feature", "Characters per sentence"])), 0);
    assert!(recorded_steps(&out).contains(&"contrast".to_string()));
    assert_eq!(code(&with_config(&config, &out, &["--seed", "9", "extract"])), 0);
    assert_eq!(recorded_steps(&out), ["extract"]);
    let o = with_config(&config, &out, &["contrast", "--feature", "no such feature"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}
