//! Letters and words.
//!
//! Words in this crate range over several alphabets at once: the generators
//! of a presentation, synthetic generators introduced by normalization, the
//! units alphabet `b1, b2, …`, the `#` separator of word-problem languages,
//! per-piece marker symbols used inside the invertible-problem construction,
//! and primed copies used by the rational-subset transductions. [`Letter`]
//! packs all of these into one 32-bit value so words stay compact and
//! hashable.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

const TAG_SHIFT: u32 = 24;
const PRIME_BIT: u32 = 1 << 31;
const PAYLOAD_MASK: u32 = (1 << TAG_SHIFT) - 1;

const TAG_CHAR: u32 = 0;
const TAG_FRESH: u32 = 1;
const TAG_UNIT: u32 = 2;
const TAG_HASH: u32 = 3;
const TAG_HEART: u32 = 4;
const TAG_HEART_TILDE: u32 = 5;

/// A single symbol.
///
/// Ordering is stable and total: user characters sort before synthetic
/// generators, units letters, `#`, and markers; primed letters sort after
/// all unprimed ones.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    /// The `#` separator used by word-problem languages.
    pub const HASH: Letter = Letter(TAG_HASH << TAG_SHIFT);

    /// A user generator: a single Unicode scalar.
    pub fn ch(c: char) -> Letter {
        Letter((TAG_CHAR << TAG_SHIFT) | c as u32)
    }

    /// The synthetic generator `_p<index>` from the reserved namespace.
    pub fn fresh(index: u32) -> Letter {
        debug_assert!(index <= PAYLOAD_MASK);
        Letter((TAG_FRESH << TAG_SHIFT) | index)
    }

    /// The units-alphabet letter `b<index+1>`.
    pub fn unit(index: u32) -> Letter {
        debug_assert!(index <= PAYLOAD_MASK);
        Letter((TAG_UNIT << TAG_SHIFT) | index)
    }

    /// The marker `♥<index>` standing for representatives of piece `index`.
    pub fn heart(index: u32) -> Letter {
        debug_assert!(index <= PAYLOAD_MASK);
        Letter((TAG_HEART << TAG_SHIFT) | index)
    }

    /// The marker `♥~<index>` standing for reversed representatives of piece
    /// `index`.
    pub fn heart_tilde(index: u32) -> Letter {
        debug_assert!(index <= PAYLOAD_MASK);
        Letter((TAG_HEART_TILDE << TAG_SHIFT) | index)
    }

    /// The primed copy of this letter.
    pub fn primed(self) -> Letter {
        Letter(self.0 | PRIME_BIT)
    }

    /// This letter with any prime removed.
    pub fn unprimed(self) -> Letter {
        Letter(self.0 & !PRIME_BIT)
    }

    pub fn is_primed(self) -> bool {
        self.0 & PRIME_BIT != 0
    }

    pub fn is_hash(self) -> bool {
        self == Letter::HASH
    }

    pub fn is_marker(self) -> bool {
        matches!(self.tag(), TAG_HEART | TAG_HEART_TILDE)
    }

    /// The Unicode scalar for an unprimed user generator.
    pub fn as_char(self) -> Option<char> {
        if self.tag() == TAG_CHAR && !self.is_primed() {
            char::from_u32(self.payload())
        } else {
            None
        }
    }

    /// The index for an unprimed `_pN` synthetic generator.
    pub fn as_fresh(self) -> Option<u32> {
        (self.tag() == TAG_FRESH && !self.is_primed()).then(|| self.payload())
    }

    /// The index for an unprimed units letter.
    pub fn as_unit(self) -> Option<u32> {
        (self.tag() == TAG_UNIT && !self.is_primed()).then(|| self.payload())
    }

    pub fn heart_index(self) -> Option<u32> {
        (self.tag() == TAG_HEART).then(|| self.payload())
    }

    pub fn heart_tilde_index(self) -> Option<u32> {
        (self.tag() == TAG_HEART_TILDE).then(|| self.payload())
    }

    fn tag(self) -> u32 {
        (self.0 & !PRIME_BIT) >> TAG_SHIFT
    }

    fn payload(self) -> u32 {
        self.0 & PAYLOAD_MASK
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.unprimed();
        match base.tag() {
            TAG_CHAR => write!(f, "{}", char::from_u32(base.payload()).unwrap_or('\u{fffd}'))?,
            TAG_FRESH => write!(f, "_p{}", base.payload())?,
            TAG_UNIT => write!(f, "b{}", base.payload() + 1)?,
            TAG_HASH => write!(f, "#")?,
            TAG_HEART => write!(f, "\u{2665}{}", base.payload())?,
            TAG_HEART_TILDE => write!(f, "\u{2665}~{}", base.payload())?,
            _ => write!(f, "?")?,
        }
        if self.is_primed() {
            write!(f, "'")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse one letter from the front of `s` in the notation produced by
/// [`Letter`]'s `Display`. Returns the letter and the number of bytes
/// consumed.
///
/// `_pN` names, `bN` units names, `#`, markers, and a trailing `'` prime are
/// recognized; any other single scalar is a user generator. `bN` is only
/// read as a units letter when `units_names` is set, since `b1` is also a
/// perfectly good word over user generators.
pub fn scan_letter(s: &str, units_names: bool) -> Option<(Letter, usize)> {
    let mut chars = s.char_indices();
    let (_, first) = chars.next()?;
    let (mut letter, mut used) = match first {
        '#' => (Letter::HASH, 1),
        '_' => {
            let rest = &s[1..];
            let digits = rest
                .strip_prefix('p')
                .map(|t| t.chars().take_while(|c| c.is_ascii_digit()).count())
                .unwrap_or(0);
            if digits == 0 {
                return None;
            }
            let index: u32 = rest[1..1 + digits].parse().ok()?;
            (Letter::fresh(index), 2 + digits)
        }
        '\u{2665}' => {
            let heart_len = '\u{2665}'.len_utf8();
            let rest = &s[heart_len..];
            let (tilde, rest) = match rest.strip_prefix('~') {
                Some(r) => (true, r),
                None => (false, rest),
            };
            let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
            if digits == 0 {
                return None;
            }
            let index: u32 = rest[..digits].parse().ok()?;
            let used = heart_len + usize::from(tilde) + digits;
            let letter = if tilde {
                Letter::heart_tilde(index)
            } else {
                Letter::heart(index)
            };
            (letter, used)
        }
        'b' if units_names => {
            let digits = s[1..].chars().take_while(|c| c.is_ascii_digit()).count();
            if digits == 0 {
                (Letter::ch('b'), 1)
            } else {
                let n: u32 = s[1..1 + digits].parse().ok()?;
                if n == 0 {
                    return None;
                }
                (Letter::unit(n - 1), 1 + digits)
            }
        }
        c => (Letter::ch(c), c.len_utf8()),
    };
    if s[used..].starts_with('\'') {
        letter = letter.primed();
        used += 1;
    }
    Some((letter, used))
}

/// A finite word: a sequence of letters. The empty word is the monoid
/// identity and prints as `ε`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn one(l: Letter) -> Word {
        Word(alloc::vec![l])
    }

    /// The word of user generators spelled by `s`, one scalar per letter.
    /// `_pN` names and `#` are also recognized; see [`scan_letter`].
    pub fn from_str_chars(s: &str) -> Option<Word> {
        let mut rest = s;
        let mut out = Vec::new();
        while !rest.is_empty() {
            let (letter, used) = scan_letter(rest, false)?;
            out.push(letter);
            rest = &rest[used..];
        }
        Some(Word(out))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.iter().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// True if `needle` occurs as a factor starting at byte-free position
    /// `at`.
    pub fn matches_at(&self, at: usize, needle: &Word) -> bool {
        self.0[at..].starts_with(&needle.0)
    }

    pub fn render(&self) -> String {
        use fmt::Write;
        let mut s = String::new();
        for l in &self.0 {
            let _ = write!(s, "{}", l);
        }
        s
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "\u{3b5}")
        } else {
            for l in &self.0 {
                write!(f, "{}", l)?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Word {
        Word(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letter_roundtrip_through_display() {
        let cases = [
            Letter::ch('a'),
            Letter::ch('\u{3b2}'),
            Letter::fresh(0),
            Letter::fresh(17),
            Letter::HASH,
            Letter::heart(3),
            Letter::heart_tilde(12),
            Letter::ch('z').primed(),
            Letter::fresh(2).primed(),
        ];
        for l in cases {
            let s = alloc::format!("{}", l);
            let (back, used) = scan_letter(&s, false).expect("scan");
            assert_eq!(back, l, "roundtrip of {}", s);
            assert_eq!(used, s.len());
        }
        let (u, used) = scan_letter("b12'", true).unwrap();
        assert_eq!(u, Letter::unit(11).primed());
        assert_eq!(used, 4);
        // Without units names, b12 is the user letter b followed by digits.
        let (c, used) = scan_letter("b12", false).unwrap();
        assert_eq!(c, Letter::ch('b'));
        assert_eq!(used, 1);
    }

    #[test]
    fn prime_is_involutive_on_unprime() {
        let l = Letter::ch('q');
        assert_eq!(l.primed().unprimed(), l);
        assert!(l.primed().is_primed());
        assert!(!l.is_primed());
        assert_eq!(l.primed().as_char(), None);
    }

    #[test]
    fn word_from_str_reads_fresh_names() {
        let w = Word::from_str_chars("a_p0b_p1c").unwrap();
        assert_eq!(
            w.0,
            alloc::vec![
                Letter::ch('a'),
                Letter::fresh(0),
                Letter::ch('b'),
                Letter::fresh(1),
                Letter::ch('c'),
            ]
        );
        assert_eq!(w.render(), "a_p0b_p1c");
    }
}
