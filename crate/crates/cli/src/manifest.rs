//! Run directory bookkeeping: the manifest of per-step configs and digests,
//! provenance stamps, and digest-checked artifact reads.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{sha256_hex, RunConfig};
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const TOOLKIT: &str = concat!("mtese ", env!("CARGO_PKG_VERSION"));

/// Pipeline steps in execution order, each with the steps it reads from.
pub const STEPS: [(&str, &[&str]); 6] = [
    ("ingest", &[]),
    ("extract", &[]),
    ("select", &["extract"]),
    ("classify", &["extract"]),
    ("cluster", &["extract"]),
    ("contrast", &["extract"]),
];

/// Stamp embedded in every JSON artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub toolkit: String,
    pub step: String,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub config_digest: String,
    pub config: serde_json::Value,
    /// Input path (or upstream artifact) → SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Artifact path relative to the run directory → SHA-256.
    pub artifacts: BTreeMap<String, String>,
    /// Work units left out, with the reason.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub skipped: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit: String,
    pub steps: BTreeMap<String, StepRecord>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Option<Manifest>> {
        let path = dir.join(MANIFEST);
        if !path.exists() {
            return Ok(None);
        }
        let bytes = std::fs::read(&path).map_err(|e| CliError::data(path.display(), e))?;
        serde_json::from_slice(&bytes).map(Some).map_err(|e| CliError::data(path.display(), e))
    }

    pub fn require(dir: &Path, step: &'static str) -> Result<Manifest> {
        Manifest::load(dir)?.ok_or(CliError::MissingArtifact { path: dir.join(MANIFEST), step })
    }

    pub fn step(&self, name: &'static str) -> Option<&StepRecord> {
        self.steps.get(name)
    }
}

/// Collects the artifacts of one step and records them in the manifest.
pub struct StepWriter {
    dir: PathBuf,
    step: &'static str,
    config: serde_json::Value,
    digest: String,
    inputs: BTreeMap<String, String>,
    artifacts: BTreeMap<String, String>,
    skipped: BTreeMap<String, String>,
}

impl StepWriter {
    pub fn new(cfg: &RunConfig, step: &'static str) -> Result<StepWriter> {
        let dir = cfg.out.clone();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::write(&dir, e))?;
        Ok(StepWriter {
            dir,
            step,
            config: cfg.recorded(),
            digest: cfg.digest(),
            inputs: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            skipped: BTreeMap::new(),
        })
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { toolkit: TOOLKIT.into(), step: self.step.into(), config_digest: self.digest.clone() }
    }

    /// One-line stamp for CSV artifacts (a leading `#` comment).
    pub fn csv_stamp(&self) -> String {
        format!("# {} step={} config_digest={}\n", TOOLKIT, self.step, self.digest)
    }

    /// Records the content digest of an external input file.
    pub fn input_file(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::data(path.display(), e))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Records an upstream artifact this step consumed.
    pub fn input_artifact(&mut self, rel: &str, digest: &str) {
        self.inputs.insert(rel.into(), digest.into());
    }

    pub fn skip(&mut self, unit: impl Into<String>, reason: impl Into<String>) {
        self.skipped.insert(unit.into(), reason.into());
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::write(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::write(&path, e))?;
        self.artifacts.insert(rel.into(), sha256_hex(bytes));
        Ok(())
    }

    /// CSV artifact with the provenance stamp on its first line.
    pub fn write_csv(&mut self, rel: &str, body: &[u8]) -> Result<()> {
        let mut bytes = self.csv_stamp().into_bytes();
        bytes.extend_from_slice(body);
        self.write(rel, &bytes)
    }

    /// JSON artifact: `{"provenance": …, …payload fields}`.
    pub fn write_json<T: Serialize>(&mut self, rel: &str, payload: &T) -> Result<()> {
        let bytes = stamped_json(&self.provenance(), payload)?;
        self.write(rel, &bytes)
    }

    /// SVG artifact with the stamp as an XML comment after the root tag.
    pub fn write_svg(&mut self, rel: &str, svg: &str) -> Result<()> {
        let stamp = format!("<!-- {} step={} config_digest={} -->\n", TOOLKIT, self.step, self.digest);
        let body = match svg.find('\n') {
            Some(i) => format!("{}{}{}", &svg[..=i], stamp, &svg[i + 1..]),
            None => format!("{svg}\n{stamp}"),
        };
        self.write(rel, body.as_bytes())
    }

    /// Stores the step record. Records of steps that read from this one are
    /// dropped, since their inputs just changed.
    pub fn finish(self) -> Result<()> {
        let mut manifest = Manifest::load(&self.dir)?
            .unwrap_or_else(|| Manifest { toolkit: TOOLKIT.into(), steps: BTreeMap::new() });
        manifest.toolkit = TOOLKIT.into();
        for (name, deps) in STEPS {
            if deps.contains(&self.step) && manifest.steps.remove(name).is_some() {
                log::info!("dropped stale `{name}` record; rerun it to refresh its outputs");
            }
        }
        manifest.steps.insert(
            self.step.into(),
            StepRecord {
                config_digest: self.digest,
                config: self.config,
                inputs: self.inputs,
                artifacts: self.artifacts,
                skipped: self.skipped,
            },
        );
        let path = self.dir.join(MANIFEST);
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::internal("manifest", e))?;
        bytes.push(b'\n');
        std::fs::write(&path, bytes).map_err(|e| CliError::write(&path, e))
    }
}

pub fn stamped_json<T: Serialize>(provenance: &Provenance, payload: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_value(payload).map_err(|e| CliError::internal("serializing artifact", e))?;
    let map = v.as_object_mut().ok_or_else(|| CliError::Internal("artifact payload is not an object".into()))?;
    let mut out = serde_json::Map::new();
    out.insert("provenance".into(), serde_json::to_value(provenance).expect("provenance serializes"));
    out.append(map);
    let mut bytes = serde_json::to_vec_pretty(&out).map_err(|e| CliError::internal("serializing artifact", e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// An artifact read back and checked against its manifest record.
pub struct Verified {
    pub rel: String,
    pub digest: String,
    pub bytes: Vec<u8>,
}

impl Verified {
    /// Body of a stamped CSV, without the stamp line.
    pub fn csv_body(&self) -> &[u8] {
        match self.bytes.iter().position(|&b| b == b'\n') {
            Some(i) if self.bytes.starts_with(b"#") => &self.bytes[i + 1..],
            _ => &self.bytes,
        }
    }

    pub fn json<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_slice(&self.bytes).map_err(|e| CliError::data(&self.rel, e))
    }
}

/// Reads `rel` from the run directory. The file digest must equal the one the
/// producing step recorded, and the config digest stamped inside it must equal
/// that step's config digest.
pub fn read_verified(dir: &Path, manifest: &Manifest, step: &'static str, rel: &str) -> Result<Verified> {
    let path = dir.join(rel);
    let record = manifest.step(step).ok_or(CliError::MissingArtifact { path: path.clone(), step })?;
    let expected = record.artifacts.get(rel).ok_or(CliError::MissingArtifact { path: path.clone(), step })?;
    let bytes = std::fs::read(&path).map_err(|_| CliError::MissingArtifact { path: path.clone(), step })?;
    let digest = sha256_hex(&bytes);
    if &digest != expected {
        return Err(CliError::Data(format!(
            "{rel}: content digest {} does not match the manifest ({}); rerun `mtese {step}`",
            &digest[..12],
            &expected[..12.min(expected.len())]
        )));
    }
    let embedded = embedded_digest(&bytes)
        .ok_or_else(|| CliError::Data(format!("{rel}: no config digest embedded; rerun `mtese {step}`")))?;
    if embedded != record.config_digest {
        return Err(CliError::Data(format!(
            "{rel}: embedded config digest {} differs from the manifest's {}; rerun `mtese {step}`",
            &embedded[..12.min(embedded.len())],
            &record.config_digest[..12]
        )));
    }
    Ok(Verified { rel: rel.into(), digest, bytes })
}

/// Config digest stamped into a CSV, JSON or SVG artifact.
fn embedded_digest(bytes: &[u8]) -> Option<String> {
    let text = std::str::from_utf8(bytes).ok()?;
    let start = text.find("config_digest")? + "config_digest".len();
    let rest = text[start..].trim_start_matches(['"', ':', '=', ' ']);
    let hex: String = rest.chars().take_while(|c| c.is_ascii_hexdigit()).collect();
    (hex.len() == 64).then_some(hex)
}
