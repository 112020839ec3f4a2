//! Engine metadata and the comparison groupings that map documents to classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, GroupLabel, LlmKind, Origin, VendorRegion};
use crate::matrix::{Dataset, FeatureMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum GroupingError {
    #[error("unknown engine code `{0}`")]
    UnknownEngine(String),
    #[error("engine `{engine}` is registered as {registered}, not {found}")]
    OriginMismatch { engine: String, registered: Origin, found: Origin },
    #[error("{origin} document needs an engine code")]
    MissingEngine { origin: Origin },
    #[error("grouping `{grouping}`: no documents for `{code}`")]
    GroupEmpty { grouping: String, code: String },
    #[error("grouping `{grouping}` yields {found} non-empty classes; at least 2 are needed")]
    TooFewClasses { grouping: String, found: usize },
    #[error("grouping `{grouping}`: `{code}` is assigned to more than one class")]
    Overlap { grouping: String, code: String },
    #[error("unknown grouping `{0}`")]
    UnknownGrouping(String),
    #[error("invalid engine entry: {0}")]
    InvalidEntry(String),
}

/// What the toolkit knows about one engine code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub origin: Origin,
    pub vendor_region: VendorRegion,
    pub llm_kind: LlmKind,
}

/// Engine code → origin class, vendor region and LLM kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineRegistry {
    engines: BTreeMap<String, EngineInfo>,
}

/// The five NMT engines and six LLMs of the reference study, in table order.
pub const DEFAULT_ENGINES: [(&str, Origin, VendorRegion, LlmKind); 11] = [
    ("NGT", Origin::NMT, VendorRegion::Foreign, LlmKind::NA),
    ("NDL", Origin::NMT, VendorRegion::Foreign, LlmKind::NA),
    ("NMS", Origin::NMT, VendorRegion::Foreign, LlmKind::NA),
    ("NBD", Origin::NMT, VendorRegion::China, LlmKind::NA),
    ("NYD", Origin::NMT, VendorRegion::China, LlmKind::NA),
    ("LCG", Origin::LLM, VendorRegion::Foreign, LlmKind::Generic),
    ("LCL", Origin::LLM, VendorRegion::Foreign, LlmKind::Generic),
    ("LGM", Origin::LLM, VendorRegion::Foreign, LlmKind::Generic),
    ("LKM", Origin::LLM, VendorRegion::China, LlmKind::Generic),
    ("LGL", Origin::LLM, VendorRegion::China, LlmKind::Generic),
    ("LTO", Origin::LLM, VendorRegion::Foreign, LlmKind::TranslationSpecific),
];

impl Default for EngineRegistry {
    fn default() -> Self {
        let engines = DEFAULT_ENGINES
            .iter()
            .map(|&(code, origin, vendor_region, llm_kind)| {
                (code.to_string(), EngineInfo { origin, vendor_region, llm_kind })
            })
            .collect();
        EngineRegistry { engines }
    }
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry { engines: BTreeMap::new() }
    }

    /// Adds or replaces an engine.
    pub fn register(&mut self, code: impl Into<String>, info: EngineInfo) -> Result<(), GroupingError> {
        let code = code.into();
        // validate through GroupLabel so registry entries obey label rules
        GroupLabel::new(info.origin, code.clone(), info.vendor_region, info.llm_kind)
            .map_err(|e| GroupingError::InvalidEntry(e.to_string()))?;
        self.engines.insert(code, info);
        Ok(())
    }

    /// Registers every engine label seen in `corpus`; corpus metadata wins
    /// over existing entries.
    pub fn absorb(&mut self, corpus: &Corpus) {
        for d in corpus.documents() {
            let g = d.group();
            if !g.origin().is_original() {
                self.engines.insert(
                    g.engine().to_string(),
                    EngineInfo { origin: g.origin(), vendor_region: g.vendor_region(), llm_kind: g.llm_kind() },
                );
            }
        }
    }

    pub fn get(&self, code: &str) -> Option<&EngineInfo> {
        self.engines.get(code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.engines.keys().map(String::as_str)
    }

    /// Full label for a document of `origin` produced by `engine`.
    pub fn label(&self, origin: Origin, engine: &str) -> Result<GroupLabel, GroupingError> {
        if origin.is_original() {
            return GroupLabel::original(origin).map_err(|e| GroupingError::InvalidEntry(e.to_string()));
        }
        if engine.is_empty() || engine == "-" {
            return Err(GroupingError::MissingEngine { origin });
        }
        let info = self.get(engine).ok_or_else(|| GroupingError::UnknownEngine(engine.into()))?;
        if info.origin != origin {
            return Err(GroupingError::OriginMismatch { engine: engine.into(), registered: info.origin, found: origin });
        }
        GroupLabel::new(origin, engine, info.vendor_region, info.llm_kind)
            .map_err(|e| GroupingError::InvalidEntry(e.to_string()))
    }
}

/// A way of splitting documents into classes for classification, selection
/// and contrast statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    OcnMts,
    OcnNmts,
    OcnLlms,
    LlmsNmts,
    NmtIntra,
    LlmIntra,
    /// LLM documents, translation-specific vs generic models.
    SpecificVsGeneric,
    /// LLM documents, by vendor region.
    ChinaVsForeign,
    /// Named classes, each a list of origin codes or engine codes.
    Custom { name: String, classes: Vec<(String, Vec<String>)> },
}

impl Comparison {
    /// The six groupings of the main results table, in table order.
    pub const TABLE: [Comparison; 6] = [
        Comparison::OcnMts,
        Comparison::OcnNmts,
        Comparison::OcnLlms,
        Comparison::LlmsNmts,
        Comparison::NmtIntra,
        Comparison::LlmIntra,
    ];

    /// The two LLM sub-category groupings.
    pub const SUPPLEMENTARY: [Comparison; 2] = [Comparison::SpecificVsGeneric, Comparison::ChinaVsForeign];

    pub fn standard() -> Vec<Comparison> {
        Self::TABLE.iter().chain(Self::SUPPLEMENTARY.iter()).cloned().collect()
    }

    pub fn name(&self) -> &str {
        match self {
            Comparison::OcnMts => "OCN-MTs",
            Comparison::OcnNmts => "OCN-NMTs",
            Comparison::OcnLlms => "OCN-LLMs",
            Comparison::LlmsNmts => "LLMs-NMTs",
            Comparison::NmtIntra => "NMT-intra",
            Comparison::LlmIntra => "LLM-intra",
            Comparison::SpecificVsGeneric => "specific-vs-generic",
            Comparison::ChinaVsForeign => "China-vs-foreign",
            Comparison::Custom { name, .. } => name,
        }
    }

    /// Parses `A=OCN;B=NGT,NDL` style custom groupings.
    pub fn parse_custom(name: &str, spec: &str) -> Result<Comparison, GroupingError> {
        let mut classes = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, codes) = part
                .split_once('=')
                .ok_or_else(|| GroupingError::InvalidEntry(format!("class `{part}` lacks `=`")))?;
            let codes: Vec<String> =
                codes.split(',').map(str::trim).filter(|c| !c.is_empty()).map(str::to_string).collect();
            if label.trim().is_empty() || codes.is_empty() {
                return Err(GroupingError::InvalidEntry(format!("class `{part}` is empty")));
            }
            classes.push((label.trim().to_string(), codes));
        }
        Ok(Comparison::Custom { name: name.into(), classes })
    }

    /// Class name of a document, or `None` when the grouping ignores it.
    fn classify(&self, g: &GroupLabel) -> Option<String> {
        let o = g.origin();
        match self {
            Comparison::OcnMts => match o {
                Origin::OCN => Some("OCN".into()),
                Origin::NMT | Origin::LLM => Some("MTs".into()),
                Origin::OEN => None,
            },
            Comparison::OcnNmts => match o {
                Origin::OCN => Some("OCN".into()),
                Origin::NMT => Some("NMTs".into()),
                _ => None,
            },
            Comparison::OcnLlms => match o {
                Origin::OCN => Some("OCN".into()),
                Origin::LLM => Some("LLMs".into()),
                _ => None,
            },
            Comparison::LlmsNmts => match o {
                Origin::LLM => Some("LLMs".into()),
                Origin::NMT => Some("NMTs".into()),
                _ => None,
            },
            Comparison::NmtIntra => (o == Origin::NMT).then(|| g.engine().to_string()),
            Comparison::LlmIntra => (o == Origin::LLM).then(|| g.engine().to_string()),
            Comparison::SpecificVsGeneric => match (o, g.llm_kind()) {
                (Origin::LLM, LlmKind::TranslationSpecific) => Some("specific".into()),
                (Origin::LLM, LlmKind::Generic) => Some("generic".into()),
                _ => None,
            },
            Comparison::ChinaVsForeign => match (o, g.vendor_region()) {
                (Origin::LLM, VendorRegion::China) => Some("China".into()),
                (Origin::LLM, VendorRegion::Foreign) => Some("foreign".into()),
                _ => None,
            },
            Comparison::Custom { classes, .. } => classes
                .iter()
                .find(|(_, codes)| codes.iter().any(|c| code_matches(c, g)))
                .map(|(label, _)| label.clone()),
        }
    }

    /// Maps the matrix rows this grouping covers onto classes. Class ids follow
    /// the declared order for custom groupings and sorted class names otherwise.
    pub fn dataset(&self, matrix: &FeatureMatrix) -> Result<Dataset, GroupingError> {
        if let Comparison::Custom { classes, .. } = self {
            let mut seen = BTreeMap::new();
            for (label, codes) in classes {
                for c in codes {
                    if seen.insert(c.as_str(), label.as_str()).is_some() {
                        return Err(GroupingError::Overlap { grouping: self.name().into(), code: c.clone() });
                    }
                    if !matrix.groups().iter().any(|g| code_matches(c, g)) {
                        return Err(GroupingError::GroupEmpty { grouping: self.name().into(), code: c.clone() });
                    }
                }
            }
        }
        let assigned: Vec<(usize, String)> = matrix
            .groups()
            .iter()
            .enumerate()
            .filter_map(|(i, g)| self.classify(g).map(|c| (i, c)))
            .collect();
        let class_names: Vec<String> = match self {
            Comparison::Custom { classes, .. } => classes.iter().map(|(l, _)| l.clone()).collect(),
            _ => {
                let mut names: Vec<String> = assigned.iter().map(|(_, c)| c.clone()).collect();
                names.sort();
                names.dedup();
                names
            }
        };
        if class_names.len() < 2 {
            return Err(GroupingError::TooFewClasses { grouping: self.name().into(), found: class_names.len() });
        }
        let index: BTreeMap<&str, usize> = class_names.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let rows: Vec<usize> = assigned.iter().map(|(i, _)| *i).collect();
        let y = assigned.iter().map(|(_, c)| index[c.as_str()]).collect();
        Ok(Dataset {
            doc_ids: rows.iter().map(|&i| matrix.doc_ids()[i].clone()).collect(),
            feature_names: matrix.feature_names().to_vec(),
            x: rows.iter().map(|&i| matrix.rows()[i].clone()).collect(),
            y,
            class_names,
            sources: rows.iter().map(|&i| matrix.groups()[i].source_code().to_string()).collect(),
        })
    }
}

fn code_matches(code: &str, g: &GroupLabel) -> bool {
    g.source_code() == code || g.origin().as_str() == code
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Comparison {
    type Err = GroupingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Comparison::standard()
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| GroupingError::UnknownGrouping(s.into()))
    }
}

/// Two-class dataset of the documents from two sources (origin or engine codes).
pub fn pair_dataset(matrix: &FeatureMatrix, a: &str, b: &str) -> Result<Dataset, GroupingError> {
    Comparison::Custom {
        name: format!("{a}-{b}"),
        classes: vec![(a.to_string(), vec![a.to_string()]), (b.to_string(), vec![b.to_string()])],
    }
    .dataset(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix() -> FeatureMatrix {
        let reg = EngineRegistry::default();
        let labels = [
            (Origin::OCN, ""),
            (Origin::OCN, ""),
            (Origin::NMT, "NGT"),
            (Origin::NMT, "NBD"),
            (Origin::LLM, "LTO"),
            (Origin::LLM, "LKM"),
            (Origin::LLM, "LCG"),
            (Origin::OEN, ""),
        ];
        let groups: Vec<GroupLabel> = labels.iter().map(|&(o, e)| reg.label(o, e).unwrap()).collect();
        let n = groups.len();
        FeatureMatrix::new(
            (0..n).map(|i| format!("d{i}")).collect(),
            vec!["f".into()],
            (0..n).map(|i| vec![i as f64]).collect(),
            groups,
        )
        .unwrap()
    }

    #[test]
    fn binary_groupings() {
        let m = matrix();
        let d = Comparison::OcnMts.dataset(&m).unwrap();
        assert_eq!(d.class_names, vec!["MTs", "OCN"]);
        assert_eq!(d.len(), 7);
        assert_eq!(d.class_counts(), vec![5, 2]);
        let d = Comparison::LlmsNmts.dataset(&m).unwrap();
        assert_eq!(d.class_counts(), vec![3, 2]);
    }

    #[test]
    fn sub_category_groupings() {
        let m = matrix();
        let d = Comparison::SpecificVsGeneric.dataset(&m).unwrap();
        assert_eq!(d.class_names, vec!["generic", "specific"]);
        assert_eq!(d.class_counts(), vec![2, 1]);
        let d = Comparison::ChinaVsForeign.dataset(&m).unwrap();
        assert_eq!(d.class_names, vec!["China", "foreign"]);
        assert_eq!(d.sources, vec!["LTO", "LKM", "LCG"]);
        assert_eq!(d.y, vec![1, 0, 1]);
    }

    #[test]
    fn intra_groupings_use_engines() {
        let d = Comparison::LlmIntra.dataset(&matrix()).unwrap();
        assert_eq!(d.class_names, vec!["LCG", "LKM", "LTO"]);
    }

    #[test]
    fn custom_grouping_reports_absent_code() {
        let c = Comparison::parse_custom("x", "A=OCN;B=NGT,NYD").unwrap();
        let err = c.dataset(&matrix()).unwrap_err();
        assert_eq!(err, GroupingError::GroupEmpty { grouping: "x".into(), code: "NYD".into() });
        assert!(err.to_string().contains("NYD"));
        let ok = Comparison::parse_custom("x", "A=OCN;B=NGT,NBD").unwrap().dataset(&matrix()).unwrap();
        assert_eq!(ok.class_counts(), vec![2, 2]);
    }

    #[test]
    fn registry_checks_origin() {
        let reg = EngineRegistry::default();
        assert!(matches!(reg.label(Origin::LLM, "NGT"), Err(GroupingError::OriginMismatch { .. })));
        assert!(matches!(reg.label(Origin::NMT, "XYZ"), Err(GroupingError::UnknownEngine(_))));
        assert!(matches!(reg.label(Origin::NMT, "-"), Err(GroupingError::MissingEngine { .. })));
    }

    #[test]
    fn names_round_trip() {
        for c in Comparison::standard() {
            assert_eq!(c.name().parse::<Comparison>().unwrap(), c);
        }
    }
}
