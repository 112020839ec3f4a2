use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::wordclass::{CONJUNCTIONS, PRONOUNS, PUNCT_KINDS};
use super::FeatureError;
use crate::corpus::Tagset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layer {
    Lexical,
    Syntactical,
    Readability,
    Translatability,
    NPosGram,
}

impl Layer {
    pub const ALL: [Layer; 5] =
        [Layer::Lexical, Layer::Syntactical, Layer::Readability, Layer::Translatability, Layer::NPosGram];

    pub fn as_str(&self) -> &'static str {
        match self {
            Layer::Lexical => "lexical",
            Layer::Syntactical => "syntactical",
            Layer::Readability => "readability",
            Layer::Translatability => "translatability",
            Layer::NPosGram => "npos",
        }
    }

    pub fn parse(s: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubLayer {
    GeneralLexical,
    PosTag,
    GeneralSyntactical,
    DepTag,
    Readability,
    Concreteness,
    Translatability,
    NPos1,
    NPos2,
    NPos3,
}

impl SubLayer {
    pub fn layer(&self) -> Layer {
        match self {
            SubLayer::GeneralLexical | SubLayer::PosTag => Layer::Lexical,
            SubLayer::GeneralSyntactical | SubLayer::DepTag => Layer::Syntactical,
            SubLayer::Readability | SubLayer::Concreteness => Layer::Readability,
            SubLayer::Translatability => Layer::Translatability,
            SubLayer::NPos1 | SubLayer::NPos2 | SubLayer::NPos3 => Layer::NPosGram,
        }
    }

    pub fn npos(n: usize) -> SubLayer {
        match n {
            1 => SubLayer::NPos1,
            2 => SubLayer::NPos2,
            3 => SubLayer::NPos3,
            _ => panic!("N-PoS-grams are defined for N in 1..=3"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Resource {
    FrequencyLexicon,
    ConcretenessLexicon,
    ReferenceProfile,
}

/// Value domain of a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// A proportion in [0, 1].
    Ratio,
    /// A non-negative, finite quantity.
    NonNegative,
    /// Any finite value (lexicon-scale statistics).
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub name: String,
    pub sublayer: SubLayer,
    pub definition: String,
    pub domain: Domain,
    pub resources: Vec<Resource>,
}

impl FeatureMeta {
    fn new(name: impl Into<String>, sublayer: SubLayer, definition: impl Into<String>, domain: Domain) -> Self {
        FeatureMeta { name: name.into(), sublayer, definition: definition.into(), domain, resources: Vec::new() }
    }

    fn needs(mut self, r: Resource) -> Self {
        self.resources.push(r);
        self
    }

    pub fn layer(&self) -> Layer {
        self.sublayer.layer()
    }
}

pub(crate) const GENERAL_LEXICAL: [(&str, &str, Domain); 14] = [
    ("TTR", "lex.ttr", Domain::Ratio),
    ("STTR", "lex.sttr", Domain::Ratio),
    ("AvgWordLength(char.)", "lex.avg_word_length", Domain::NonNegative),
    ("MTLD", "lex.mtld", Domain::NonNegative),
    ("RootTTR", "lex.root_ttr", Domain::NonNegative),
    ("LogTTR", "lex.log_ttr", Domain::Ratio),
    ("HapaxRatio", "lex.hapax", Domain::Ratio),
    ("DisLegomenaRatio", "lex.dis_legomena", Domain::Ratio),
    ("LexicalDensity", "lex.density", Domain::Ratio),
    ("YuleK", "lex.yule_k", Domain::NonNegative),
    ("SingleCharWordRatio", "lex.single_char", Domain::Ratio),
    ("LongWordRatio", "lex.long_word", Domain::Ratio),
    ("CharTTR", "lex.char_ttr", Domain::Ratio),
    ("WordLengthStd", "lex.word_length_std", Domain::NonNegative),
];

pub(crate) const GENERAL_SYNTACTICAL: [(&str, &str, Domain); 10] = [
    ("Words per sentence", "syn.words_per_sentence", Domain::NonNegative),
    ("Characters per sentence", "syn.chars_per_sentence", Domain::NonNegative),
    ("QuestionRatio", "syn.question_ratio", Domain::Ratio),
    ("ExclamationRatio", "syn.exclamation_ratio", Domain::Ratio),
    ("Mean Dependency Distance", "syn.mean_dependency_distance", Domain::NonNegative),
    ("Average Number of Children per Node", "syn.avg_children", Domain::Ratio),
    ("SentLengthStd", "syn.sentence_length_std", Domain::NonNegative),
    ("MeanTreeDepth", "syn.mean_tree_depth", Domain::NonNegative),
    ("EllipsisRatio", "syn.ellipsis_ratio", Domain::Ratio),
    ("ClausesPerSentence", "syn.clauses_per_sentence", Domain::NonNegative),
];

pub(crate) const DEP_EXTRAS: [(&str, &str); 2] = [
    ("ratio_dep_leftward", "dep.leftward"),
    ("ratio_dep_adjacent", "dep.adjacent"),
];

pub(crate) const READABILITY: [(&str, &str, Domain); 9] = [
    ("lexical_richness", "read.lexical_richness", Domain::Ratio),
    ("syntactic_richness", "read.syntactic_richness", Domain::Ratio),
    ("semantic_accuracy_n", "read.semantic_accuracy_n", Domain::Ratio),
    ("semantic_accuracy_v", "read.semantic_accuracy_v", Domain::Ratio),
    ("semantic_accuracy_c", "read.semantic_accuracy_c", Domain::Ratio),
    ("semantic_accuracy_n_v", "read.semantic_accuracy_n_v", Domain::Ratio),
    ("semantic_noise_n", "read.semantic_noise_n", Domain::NonNegative),
    ("semantic_noise_v", "read.semantic_noise_v", Domain::NonNegative),
    ("Average Word Frequency", "read.average_word_frequency", Domain::Real),
];

pub(crate) const CONCRETENESS: [(&str, &str, Domain); 4] = [
    ("average_concreteness", "conc.mean", Domain::Real),
    ("concrete_std", "conc.std", Domain::NonNegative),
    ("high_ratio", "conc.high_ratio", Domain::Ratio),
    ("low_ratio", "conc.low_ratio", Domain::Ratio),
];

pub(crate) const TRANSLATABILITY: [(&str, &str, Domain); 5] = [
    ("completeness", "trans.completeness", Domain::Ratio),
    ("foreignness", "trans.foreignness", Domain::NonNegative),
    ("code_switching", "trans.code_switching", Domain::Ratio),
    ("abbreviation", "trans.abbreviation", Domain::Ratio),
    ("untranslated", "trans.untranslated", Domain::Ratio),
];

/// Default N-PoS-gram counts retained for N = 1, 2, 3.
pub const DEFAULT_NPOS_SIZES: [usize; 3] = [10, 49, 60];

pub fn pos_ratio_name(tag: &str) -> String {
    format!("ratio_pos_{tag}")
}

pub fn dep_ratio_name(rel: &str) -> String {
    format!("ratio_dep_{rel}")
}

/// Feature name of a PoS N-gram, e.g. `pos_3gram_wp nh wp`.
pub fn npos_name(gram: &[&str]) -> String {
    format!("pos_{}gram_{}", gram.len(), gram.join(" "))
}

/// Splits an N-PoS-gram feature name back into its tags.
pub fn parse_npos_name(name: &str) -> Option<Vec<String>> {
    let rest = name.strip_prefix("pos_")?;
    let (n, tags) = rest.split_once("gram_")?;
    let n: usize = n.parse().ok()?;
    let tags: Vec<String> = tags.split(' ').map(str::to_string).collect();
    (tags.len() == n && (1..=3).contains(&n) && tags.iter().all(|t| !t.is_empty())).then_some(tags)
}

/// The ordered feature registry of a run.
///
/// The non-gram layers are fixed by the tagset; the N-PoS-gram names are
/// chosen per run by keyness against a reference profile and appended with
/// [`FeatureInventory::with_npos`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureInventory {
    features: Vec<FeatureMeta>,
    pos_tags: Vec<String>,
    dep_relations: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl FeatureInventory {
    /// Every layer except N-PoS-grams, laid out for `tagset`.
    pub fn base(tagset: &Tagset) -> Self {
        let mut f = Vec::new();
        for (name, def, dom) in GENERAL_LEXICAL {
            f.push(FeatureMeta::new(name, SubLayer::GeneralLexical, def, dom));
        }
        for tag in tagset.pos_tags() {
            f.push(FeatureMeta::new(pos_ratio_name(tag), SubLayer::PosTag, format!("pos.tag:{tag}"), Domain::Ratio));
        }
        for class in CONJUNCTIONS.iter().chain(PRONOUNS) {
            f.push(FeatureMeta::new(class.name, SubLayer::PosTag, format!("pos.class:{}", class.name), Domain::Ratio));
        }
        for (_, name) in PUNCT_KINDS {
            f.push(FeatureMeta::new(name, SubLayer::PosTag, format!("pos.punct:{name}"), Domain::Ratio));
        }
        for (name, def, dom) in GENERAL_SYNTACTICAL {
            f.push(FeatureMeta::new(name, SubLayer::GeneralSyntactical, def, dom));
        }
        for rel in tagset.dep_relations() {
            f.push(FeatureMeta::new(dep_ratio_name(rel), SubLayer::DepTag, format!("dep.rel:{rel}"), Domain::Ratio));
        }
        for (name, def) in DEP_EXTRAS {
            f.push(FeatureMeta::new(name, SubLayer::DepTag, def, Domain::Ratio));
        }
        for (name, def, dom) in READABILITY {
            let mut meta = FeatureMeta::new(name, SubLayer::Readability, def, dom);
            if name != "syntactic_richness" {
                meta = meta.needs(Resource::FrequencyLexicon);
            }
            f.push(meta);
        }
        for (name, def, dom) in CONCRETENESS {
            f.push(FeatureMeta::new(name, SubLayer::Concreteness, def, dom).needs(Resource::ConcretenessLexicon));
        }
        for (name, def, dom) in TRANSLATABILITY {
            f.push(FeatureMeta::new(name, SubLayer::Translatability, def, dom));
        }
        FeatureInventory::from_parts(f, tagset.pos_tags().to_vec(), tagset.dep_relations().to_vec())
            .expect("built-in names are unique")
    }

    /// Appends N-PoS-gram features given by name (`pos_<N>gram_<tags>`).
    pub fn with_npos<S: AsRef<str>>(mut self, grams: &[S]) -> Result<Self, FeatureError> {
        self.features.retain(|m| m.layer() != Layer::NPosGram);
        for g in grams {
            let name = g.as_ref();
            let tags = parse_npos_name(name).ok_or_else(|| FeatureError::BadFeatureName(name.to_string()))?;
            self.features.push(
                FeatureMeta::new(name, SubLayer::npos(tags.len()), "npos.relative_frequency", Domain::Ratio)
                    .needs(Resource::ReferenceProfile),
            );
        }
        FeatureInventory::from_parts(self.features, self.pos_tags, self.dep_relations)
    }

    fn from_parts(features: Vec<FeatureMeta>, pos_tags: Vec<String>, dep_relations: Vec<String>) -> Result<Self, FeatureError> {
        let mut index = HashMap::with_capacity(features.len());
        for (i, m) in features.iter().enumerate() {
            if index.insert(m.name.clone(), i).is_some() {
                return Err(FeatureError::DuplicateFeature(m.name.clone()));
            }
        }
        Ok(FeatureInventory { features, pos_tags, dep_relations, index })
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindexed(self) -> Result<Self, FeatureError> {
        FeatureInventory::from_parts(self.features, self.pos_tags, self.dep_relations)
    }

    pub fn features(&self) -> &[FeatureMeta] {
        &self.features
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.features.iter().map(|m| m.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&FeatureMeta> {
        self.index.get(name).map(|&i| &self.features[i])
    }

    pub fn pos_tags(&self) -> &[String] {
        &self.pos_tags
    }

    pub fn dep_relations(&self) -> &[String] {
        &self.dep_relations
    }

    pub fn count(&self, sublayer: SubLayer) -> usize {
        self.features.iter().filter(|m| m.sublayer == sublayer).count()
    }

    pub fn layer_names(&self, layer: Layer) -> Vec<&str> {
        self.features.iter().filter(|m| m.layer() == layer).map(|m| m.name.as_str()).collect()
    }

    /// The N-PoS-grams of the inventory as tag sequences.
    pub fn npos_grams(&self) -> Vec<(String, Vec<String>)> {
        self.features
            .iter()
            .filter(|m| m.layer() == Layer::NPosGram)
            .map(|m| (m.name.clone(), parse_npos_name(&m.name).expect("validated on insert")))
            .collect()
    }
}
