//! Special monoid presentations and their text format.
//!
//! A special presentation is `⟨ A | w_1 = 1, …, w_p = 1 ⟩`: a finite ordered
//! alphabet and a finite ordered list of nonempty relator words, each
//! declared equal to the identity. A relator may carry an *annotation*: a
//! parenthesized factorization into invertible pieces, which downstream
//! computations honor as a certified override.
//!
//! The text format, one declaration per line:
//!
//! ```text
//! # comment
//! generators: a b c
//! relator: aabbacc
//! relator: (ab)(ac)(ab)
//! ```
//!
//! Generators are single Unicode scalars; names of the form `_p0, _p1, …`
//! are reserved for generators introduced by normalization and are spelled
//! that way both in the `generators:` line and inside relators.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::word::{scan_letter, Letter, Word};

/// A relator `word = 1`, optionally annotated with a factorization into
/// pieces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relator {
    pub word: Word,
    /// Parenthesized factors; when present they concatenate to `word`.
    pub annotation: Option<Vec<Word>>,
}

impl Relator {
    pub fn bare(word: Word) -> Relator {
        Relator {
            word,
            annotation: None,
        }
    }

    pub fn annotated(factors: Vec<Word>) -> Relator {
        let word = factors
            .iter()
            .fold(Word::empty(), |acc, f| acc.concat(f));
        Relator {
            word,
            annotation: Some(factors),
        }
    }
}

/// A finitely presented special monoid `⟨ A | w_1 = 1, …, w_p = 1 ⟩`.
///
/// Alphabet and relator order are significant and preserved by parsing and
/// serialization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpecialPresentation {
    pub alphabet: Vec<Letter>,
    pub relators: Vec<Relator>,
}

impl SpecialPresentation {
    pub fn new(alphabet: Vec<Letter>, relators: Vec<Relator>) -> SpecialPresentation {
        SpecialPresentation { alphabet, relators }
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.alphabet.contains(&l)
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.word.len()).max().unwrap_or(0)
    }

    /// The first index in the `_pN` namespace not used by this alphabet.
    pub fn next_fresh_index(&self) -> u32 {
        self.alphabet
            .iter()
            .filter_map(|l| l.as_fresh())
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
    }
}

/// A syntax error with the 1-based line it occurred on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Severity of a validation finding.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Error,
    Warning,
}

/// A structural problem found by [`validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: String) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            message,
        }
    }
}

fn scan_word(line: usize, s: &str) -> Result<Word, ParseError> {
    let mut rest = s;
    let mut letters = Vec::new();
    while !rest.is_empty() {
        match scan_letter(rest, false) {
            Some((l, used)) => {
                letters.push(l);
                rest = &rest[used..];
            }
            None => {
                return Err(ParseError {
                    line,
                    message: format!("cannot read a symbol at {:?}", rest),
                })
            }
        }
    }
    Ok(Word(letters))
}

/// Parse the presentation text format.
pub fn parse_presentation(text: &str) -> Result<SpecialPresentation, ParseError> {
    let mut alphabet: Option<Vec<Letter>> = None;
    let mut relators = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("generators:") {
            if alphabet.is_some() {
                return Err(ParseError {
                    line: line_no,
                    message: "duplicate generators: line".to_string(),
                });
            }
            let mut letters = Vec::new();
            for token in rest.split_whitespace() {
                match scan_letter(token, false) {
                    Some((l, used)) if used == token.len() && !l.is_hash() && !l.is_primed() => {
                        letters.push(l)
                    }
                    _ => {
                        return Err(ParseError {
                            line: line_no,
                            message: format!(
                                "generator {:?} is not a single symbol or _pN name",
                                token
                            ),
                        })
                    }
                }
            }
            alphabet = Some(letters);
        } else if let Some(rest) = line.strip_prefix("relator:") {
            if alphabet.is_none() {
                return Err(ParseError {
                    line: line_no,
                    message: "relator: before generators: line".to_string(),
                });
            }
            let body: String = rest.split_whitespace().collect();
            if body.starts_with('(') {
                let mut factors = Vec::new();
                let mut rest = body.as_str();
                while !rest.is_empty() {
                    let inner = rest.strip_prefix('(').ok_or_else(|| ParseError {
                        line: line_no,
                        message: "annotated relator must be a sequence of (…) groups".to_string(),
                    })?;
                    let close = inner.find(')').ok_or_else(|| ParseError {
                        line: line_no,
                        message: "unclosed ( in relator annotation".to_string(),
                    })?;
                    let factor = scan_word(line_no, &inner[..close])?;
                    if factor.is_empty() {
                        return Err(ParseError {
                            line: line_no,
                            message: "empty () factor in relator annotation".to_string(),
                        });
                    }
                    factors.push(factor);
                    rest = &inner[close + 1..];
                }
                relators.push(Relator::annotated(factors));
            } else {
                if body.contains(')') {
                    return Err(ParseError {
                        line: line_no,
                        message: "stray ) in relator".to_string(),
                    });
                }
                relators.push(Relator::bare(scan_word(line_no, &body)?));
            }
        } else {
            return Err(ParseError {
                line: line_no,
                message: format!("expected generators: or relator:, got {:?}", line),
            });
        }
    }

    match alphabet {
        Some(alphabet) => Ok(SpecialPresentation { alphabet, relators }),
        None => Err(ParseError {
            line: text.lines().count().max(1),
            message: "missing generators: line".to_string(),
        }),
    }
}

/// Serialize to the text format. `parse_presentation` inverts this exactly.
pub fn serialize_presentation(p: &SpecialPresentation) -> String {
    let mut out = String::from("generators:");
    for l in &p.alphabet {
        out.push(' ');
        out.push_str(&format!("{}", l));
    }
    out.push('\n');
    for r in &p.relators {
        out.push_str("relator: ");
        match &r.annotation {
            Some(factors) => {
                for f in factors {
                    out.push('(');
                    out.push_str(&f.render());
                    out.push(')');
                }
            }
            None => out.push_str(&r.word.render()),
        }
        out.push('\n');
    }
    out
}

/// Check structural invariants, returning one diagnostic per finding.
///
/// Errors: duplicate generators, empty relators, relator letters outside the
/// alphabet, annotations that do not concatenate to their relator or that
/// contain an empty factor.
pub fn validate(p: &SpecialPresentation) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (i, a) in p.alphabet.iter().enumerate() {
        if p.alphabet[..i].contains(a) {
            out.push(Diagnostic::error(format!("generator {} declared twice", a)));
        }
    }
    for (i, r) in p.relators.iter().enumerate() {
        if r.word.is_empty() {
            out.push(Diagnostic::error(format!("relator {} is empty", i + 1)));
        }
        for l in r.word.letters() {
            if !p.contains_letter(l) {
                out.push(Diagnostic::error(format!(
                    "relator {} uses undeclared generator {}",
                    i + 1,
                    l
                )));
            }
        }
        if let Some(factors) = &r.annotation {
            let joined = factors.iter().fold(Word::empty(), |acc, f| acc.concat(f));
            if factors.iter().any(|f| f.is_empty()) {
                out.push(Diagnostic::error(format!(
                    "relator {} annotation has an empty factor",
                    i + 1
                )));
            }
            if joined != r.word {
                out.push(Diagnostic::error(format!(
                    "relator {} annotation does not spell the relator",
                    i + 1
                )));
            }
        }
    }
    out
}
