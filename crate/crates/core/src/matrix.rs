//! Dense feature matrices with their document labels.

use std::collections::HashMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::corpus::{GroupLabel, Origin};
use crate::grouping::EngineRegistry;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("row {row} has {found} values for {expected} features")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("{what} has {found} entries for {expected} documents")]
    Misaligned { what: &'static str, expected: usize, found: usize },
    #[error("document `{doc_id}`: feature `{feature}` is not finite")]
    NonFinite { doc_id: String, feature: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("duplicate doc_id `{0}`")]
    DuplicateDoc(String),
    #[error("matrix CSV: {0}")]
    Csv(String),
}

impl From<csv::Error> for MatrixError {
    fn from(e: csv::Error) -> Self {
        MatrixError::Csv(e.to_string())
    }
}

/// Documents × features, with each document's group label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    doc_ids: Vec<String>,
    feature_names: Vec<String>,
    rows: Vec<Vec<f64>>,
    groups: Vec<GroupLabel>,
}

const LABEL_COLUMNS: [&str; 3] = ["doc_id", "origin", "engine"];

impl FeatureMatrix {
    pub fn new(
        doc_ids: Vec<String>,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        groups: Vec<GroupLabel>,
    ) -> Result<Self, MatrixError> {
        if rows.len() != doc_ids.len() {
            return Err(MatrixError::Misaligned { what: "rows", expected: doc_ids.len(), found: rows.len() });
        }
        if groups.len() != doc_ids.len() {
            return Err(MatrixError::Misaligned { what: "groups", expected: doc_ids.len(), found: groups.len() });
        }
        let mut seen = HashMap::new();
        for f in &feature_names {
            if seen.insert(f.as_str(), ()).is_some() {
                return Err(MatrixError::DuplicateFeature(f.clone()));
            }
        }
        let mut seen_docs = HashMap::new();
        for d in &doc_ids {
            if seen_docs.insert(d.as_str(), ()).is_some() {
                return Err(MatrixError::DuplicateDoc(d.clone()));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != feature_names.len() {
                return Err(MatrixError::Ragged { row: i, expected: feature_names.len(), found: r.len() });
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(MatrixError::NonFinite { doc_id: doc_ids[i].clone(), feature: feature_names[j].clone() });
            }
        }
        Ok(FeatureMatrix { doc_ids, feature_names, rows, groups })
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn groups(&self) -> &[GroupLabel] {
        &self.groups
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, MatrixError> {
        let j = self.feature_index(name).ok_or_else(|| MatrixError::UnknownFeature(name.into()))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Keeps only the named features, in the given order.
    pub fn select_features<S: AsRef<str>>(&self, names: &[S]) -> Result<FeatureMatrix, MatrixError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.feature_index(n.as_ref()).ok_or_else(|| MatrixError::UnknownFeature(n.as_ref().into())))
            .collect::<Result<_, _>>()?;
        let rows = self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
        FeatureMatrix::new(
            self.doc_ids.clone(),
            names.iter().map(|n| n.as_ref().to_string()).collect(),
            rows,
            self.groups.clone(),
        )
    }

    /// CSV with `doc_id,origin,engine` followed by one column per feature.
    /// Values use the shortest representation that parses back exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), MatrixError> {
        let mut w = csv::Writer::from_writer(writer);
        let header: Vec<&str> =
            LABEL_COLUMNS.iter().copied().chain(self.feature_names.iter().map(String::as_str)).collect();
        w.write_record(&header)?;
        for ((id, g), row) in self.doc_ids.iter().zip(&self.groups).zip(&self.rows) {
            let mut rec = vec![id.clone(), g.origin().to_string(), g.engine().to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| MatrixError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads the CSV written by [`FeatureMatrix::write_csv`]; vendor region and
    /// LLM kind of each engine come from `engines`.
    pub fn read_csv<R: Read>(reader: R, engines: &EngineRegistry) -> Result<FeatureMatrix, MatrixError> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.len() < 3 || header.iter().take(3).ne(LABEL_COLUMNS.iter().copied()) {
            return Err(MatrixError::Csv("header must start with doc_id,origin,engine".into()));
        }
        let feature_names: Vec<String> = header.iter().skip(3).map(str::to_string).collect();
        let mut doc_ids = Vec::new();
        let mut groups = Vec::new();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            doc_ids.push(rec[0].to_string());
            let origin: Origin =
                rec[1].parse().map_err(|e| MatrixError::Csv(format!("line {line}: {e}")))?;
            let label = engines
                .label(origin, &rec[2])
                .map_err(|e| MatrixError::Csv(format!("line {line}: {e}")))?;
            groups.push(label);
            let row: Vec<f64> = rec
                .iter()
                .skip(3)
                .map(|v| v.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| MatrixError::Csv(format!("line {line}: {e}")))?;
            rows.push(row);
        }
        FeatureMatrix::new(doc_ids, feature_names, rows, groups)
    }
}

/// Rows of a matrix mapped onto integer classes for one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub doc_ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub class_names: Vec<String>,
    /// Engine code (or origin code for originals) of each row.
    pub sources: Vec<String>,
}

impl Dataset {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_classes()];
        for &y in &self.y {
            c[y] += 1;
        }
        c
    }

    /// Keeps only the named features, in the given order.
    pub fn select_features<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset, MatrixError> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n.as_ref())
                    .ok_or_else(|| MatrixError::UnknownFeature(n.as_ref().into()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Dataset {
            doc_ids: self.doc_ids.clone(),
            feature_names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            x: self.x.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            y: self.y.clone(),
            class_names: self.class_names.clone(),
            sources: self.sources.clone(),
        })
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            doc_ids: idx.iter().map(|&i| self.doc_ids[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            class_names: self.class_names.clone(),
            sources: idx.iter().map(|&i| self.sources[i].clone()).collect(),
        }
    }

    /// Builds a dataset directly from rows and labels (no group metadata).
    pub fn from_rows(x: Vec<Vec<f64>>, y: Vec<usize>, n_classes: usize) -> Dataset {
        let p = x.first().map_or(0, Vec::len);
        Dataset {
            doc_ids: (0..x.len()).map(|i| format!("d{i}")).collect(),
            feature_names: (0..p).map(|j| format!("f{j}")).collect(),
            sources: vec![String::new(); x.len()],
            class_names: (0..n_classes).map(|c| format!("c{c}")).collect(),
            x,
            y,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LlmKind, VendorRegion};

    fn sample() -> FeatureMatrix {
        let ocn = GroupLabel::original(Origin::OCN).unwrap();
        let lto = GroupLabel::new(Origin::LLM, "LTO", VendorRegion::Foreign, LlmKind::TranslationSpecific).unwrap();
        FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["Words per sentence".into(), "ratio_pos_n".into()],
            vec![vec![12.5, 0.1], vec![30.0, 1.0 / 3.0]],
            vec![ocn, lto],
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("doc_id,origin,engine,Words per sentence,ratio_pos_n\n"));
        let back = FeatureMatrix::read_csv(buf.as_slice(), &EngineRegistry::default()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_shapes() {
        let ocn = GroupLabel::original(Origin::OCN).unwrap();
        assert!(FeatureMatrix::new(vec!["a".into()], vec!["f".into()], vec![vec![1.0, 2.0]], vec![ocn.clone()]).is_err());
        assert!(FeatureMatrix::new(vec!["a".into()], vec!["f".into()], vec![vec![f64::NAN]], vec![ocn.clone()]).is_err());
        assert!(FeatureMatrix::new(vec!["a".into()], vec!["f".into(), "f".into()], vec![vec![1.0, 2.0]], vec![ocn]).is_err());
    }

    #[test]
    fn selects_columns() {
        let m = sample().select_features(&["ratio_pos_n"]).unwrap();
        assert_eq!(m.rows()[1], vec![1.0 / 3.0]);
        assert!(sample().select_features(&["nope"]).is_err());
    }
}
