use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Writing-system class of a token surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Script {
    Han,
    Latin,
    Digit,
    Punct,
    Mixed,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CharClass {
    Han,
    Latin,
    Digit,
    Punct,
    Other,
}

static HAN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Han}$").unwrap());
static LATIN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Latin}$").unwrap());
static DIGIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{Nd}$").unwrap());
static PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{P}$").unwrap());
static LETTER_OR_NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[\p{L}\p{N}]$").unwrap());

/// Full-width and CJK punctuation that Unicode files under symbol categories
/// (for example `～` or `＋`), restricted to the CJK punctuation block and the
/// ASCII-variant half of the half/full-width forms block.
fn is_cjk_fullwidth_punct(c: char) -> bool {
    let cp = c as u32;
    let in_block = (0x3000..=0x303F).contains(&cp) || (0xFF01..=0xFF65).contains(&cp);
    in_block && cp != 0x3000 && !is_letter_or_number(c)
}

fn is_letter_or_number(c: char) -> bool {
    let mut buf = [0u8; 4];
    LETTER_OR_NUMBER.is_match(c.encode_utf8(&mut buf))
}

pub(crate) fn char_class(c: char) -> CharClass {
    if c.is_ascii() {
        return if c.is_ascii_alphabetic() {
            CharClass::Latin
        } else if c.is_ascii_digit() {
            CharClass::Digit
        } else if c.is_ascii_punctuation() && is_punct_slow(c) {
            CharClass::Punct
        } else {
            CharClass::Other
        };
    }
    let mut buf = [0u8; 4];
    let s = c.encode_utf8(&mut buf);
    if HAN.is_match(s) {
        CharClass::Han
    } else if LATIN.is_match(s) {
        CharClass::Latin
    } else if DIGIT.is_match(s) {
        CharClass::Digit
    } else if PUNCT.is_match(s) || is_cjk_fullwidth_punct(c) {
        CharClass::Punct
    } else {
        CharClass::Other
    }
}

// ASCII punctuation per `is_ascii_punctuation` includes symbols like `+` and
// `$` that are not in the P* categories.
fn is_punct_slow(c: char) -> bool {
    let mut buf = [0u8; 4];
    PUNCT.is_match(c.encode_utf8(&mut buf))
}

/// Classifies a surface form by the characters it contains.
///
/// Uniform surfaces map to their class; a surface mixing at least two of
/// Han, Latin and digits is `Mixed`; anything else is `Other`.
pub fn script_classify(surface: &str) -> Result<Script, CorpusError> {
    if surface.is_empty() {
        return Err(CorpusError::EmptySurface);
    }
    let (mut han, mut latin, mut digit, mut punct) = (0, 0, 0, 0);
    let mut total = 0usize;
    for c in surface.chars() {
        total += 1;
        match char_class(c) {
            CharClass::Han => han += 1,
            CharClass::Latin => latin += 1,
            CharClass::Digit => digit += 1,
            CharClass::Punct => punct += 1,
            CharClass::Other => {}
        }
    }
    let script = if han == total {
        Script::Han
    } else if latin == total {
        Script::Latin
    } else if punct == total {
        Script::Punct
    } else if digit == total {
        Script::Digit
    } else if [han, latin, digit].iter().filter(|&&n| n > 0).count() >= 2 {
        Script::Mixed
    } else {
        Script::Other
    };
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_basic_scripts() {
        assert_eq!(script_classify("中国").unwrap(), Script::Han);
        assert_eq!(script_classify("GDP").unwrap(), Script::Latin);
        assert_eq!(script_classify("A股").unwrap(), Script::Mixed);
        assert_eq!(script_classify("2024").unwrap(), Script::Digit);
        assert_eq!(script_classify("１２").unwrap(), Script::Digit);
        assert_eq!(script_classify("。").unwrap(), Script::Punct);
        assert_eq!(script_classify("……").unwrap(), Script::Punct);
        assert_eq!(script_classify("（").unwrap(), Script::Punct);
        assert_eq!(script_classify("～").unwrap(), Script::Punct);
        assert_eq!(script_classify("《》").unwrap(), Script::Punct);
        assert_eq!(script_classify("+").unwrap(), Script::Other);
        assert_eq!(script_classify("3.5").unwrap(), Script::Other);
        assert_eq!(script_classify("5G网络").unwrap(), Script::Mixed);
    }

    #[test]
    fn empty_surface_is_an_error() {
        assert!(matches!(script_classify(""), Err(CorpusError::EmptySurface)));
    }

    #[test]
    fn ideographic_space_is_not_punctuation() {
        assert_eq!(char_class('\u{3000}'), CharClass::Other);
        assert_eq!(char_class('〇'), CharClass::Han);
    }
}
