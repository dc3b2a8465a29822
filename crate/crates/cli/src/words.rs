//! Word arguments on the command line: the same single-symbol encoding as
//! presentation files, with the empty string denoting ε.

use anyhow::{bail, Result};
use smwp_core::word::{scan_letter, Letter, Word};

/// Parse a whole string as a word. With `units_names`, `b1`, `b2`, … are
/// read as group-of-units generators.
pub fn parse_word(s: &str, units_names: bool) -> Result<Word> {
    let mut rest = s;
    let mut letters = Vec::new();
    while !rest.is_empty() {
        match scan_letter(rest, units_names) {
            Some((l, used)) => {
                letters.push(l);
                rest = &rest[used..];
            }
            None => bail!("cannot read a symbol at {:?} in word {:?}", rest, s),
        }
    }
    Ok(Word(letters))
}

/// Parse a single letter name, rejecting multi-letter strings.
pub fn parse_letter(s: &str, units_names: bool) -> Result<Letter> {
    let w = parse_word(s, units_names)?;
    if w.len() != 1 {
        bail!("expected a single symbol, got {:?}", s);
    }
    Ok(w.0[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_string_is_the_empty_word() {
        assert_eq!(parse_word("", false).unwrap(), Word::empty());
    }

    #[test]
    fn plain_letters_and_fresh_names_round_trip() {
        for s in ["abc", "a_p0b", "_p12"] {
            assert_eq!(parse_word(s, false).unwrap().render(), s);
        }
    }

    #[test]
    fn units_names_only_when_enabled() {
        let w = parse_word("b1b2", true).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.render(), "b1b2");
        // Without units names, b1 is two user generators.
        let w = parse_word("b1", false).unwrap();
        assert_eq!(w.0, vec![Letter::ch('b'), Letter::ch('1')]);
    }

    #[test]
    fn single_letters_only_for_parse_letter() {
        assert_eq!(parse_letter("a", false).unwrap(), Letter::ch('a'));
        assert!(parse_letter("ab", false).is_err());
        assert!(parse_letter("", false).is_err());
    }
}
