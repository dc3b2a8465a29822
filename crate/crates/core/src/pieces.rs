//! Invertible pieces of a special monoid.
//!
//! In a special monoid every relator is an invertible element, and every
//! invertible word factors uniquely into *pieces*: minimal invertible words,
//! that is, invertible words with no invertible nonempty proper prefix. This
//! module computes the pieces, the induced partition into congruence classes
//! (the generators of the group of units), the presentation of that group,
//! and the piece-in-piece normalization that shrinks pieces until none
//! contains a flanked product of pieces.
//!
//! Invertibility is decided through the language of words equal to the
//! identity: the ancestors of ε under the deletion rules `w_i → ε` form a
//! context-free language `E`. A word `w` is right-invertible when
//! `wA* ∩ E ≠ ∅`, left-invertible when `A*w ∩ E ≠ ∅`, and invertible when
//! both hold; nonemptiness is always a proof, and emptiness is a refutation
//! exactly when the deletion system is confluent (then `E` is the whole
//! congruence class of ε). Without confluence, relators must carry
//! factorization annotations; those are honored as certified.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use alloc::vec;

use crate::lang::{ancestors, Grammar, MonadicRule, Nfa};
use crate::oracle::{Budget, EqualAnswer, SpecialRewritingSystem};
use crate::presentation::{Relator, SpecialPresentation};
use crate::word::{Letter, Word};

/// Outcome of a yes/no question that may exceed its search budget.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Ternary {
    Yes,
    No,
    Unknown,
}

/// Whether every answer contributing to a result was proven.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Certification {
    Certified,
    BudgetLimited,
}

/// The pieces of a presentation and the factorization of each relator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PieceData {
    /// Distinct pieces, in order of first occurrence.
    pub pieces: Vec<Word>,
    /// Each relator as a sequence of indices into `pieces`.
    pub factorizations: Vec<Vec<usize>>,
    pub certification: Certification,
}

impl PieceData {
    /// `Σ (|δ| - 1)` over all pieces: the normalization measure.
    pub fn weight(&self) -> usize {
        self.pieces.iter().map(|d| d.len() - 1).sum()
    }

    /// True when every proper subword of a piece that is a product of
    /// pieces has length 1. Grammar synthesis requires this shape.
    pub fn is_normalized(&self) -> bool {
        for host in &self.pieces {
            for len in 2..=host.len() {
                for start in 0..=host.len() - len {
                    if len == host.len() {
                        continue;
                    }
                    if product_of_pieces(&host.0[start..start + len], &self.pieces) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The group of units `U(M) = ⟨ B | φ(w_1), …, φ(w_p) ⟩`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnitsPresentation {
    /// Number of congruence classes of pieces; class `i` is generator `b_{i+1}`.
    pub class_count: usize,
    /// Piece index → class index.
    pub piece_class: Vec<usize>,
    /// First piece of each class.
    pub class_reps: Vec<Word>,
    /// `φ(w_i)`: each relator rewritten over class indices.
    pub relator_images: Vec<Vec<usize>>,
    pub certification: Certification,
}

/// Why piece computation failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PieceError {
    /// No prefix of the remaining suffix could be certified invertible.
    Stuck { relator: usize, suffix: Word },
    /// A prefix was proven invertible after an undecided shorter one, so the
    /// minimal cut cannot be certified.
    AmbiguousCut { relator: usize, suffix: Word },
}

impl core::fmt::Display for PieceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PieceError::Stuck { relator, suffix } => write!(
                f,
                "relator {}: no prefix of {} certified invertible; annotate the relators or make the system confluent",
                relator + 1,
                suffix
            ),
            PieceError::AmbiguousCut { relator, suffix } => write!(
                f,
                "relator {}: a prefix of {} is invertible but a shorter one is undecided",
                relator + 1,
                suffix
            ),
        }
    }
}

/// The ancestors of ε under the deletion rules: all words that rewrite to
/// the empty word. Always a subset of the congruence class of ε; equal to it
/// exactly under confluence.
pub fn epsilon_class_grammar(p: &SpecialPresentation) -> Grammar {
    let terminals: BTreeSet<Letter> = p.alphabet.iter().copied().collect();
    let rules: Vec<MonadicRule> = p
        .relators
        .iter()
        .filter(|r| !r.word.is_empty())
        .map(|r| MonadicRule {
            lhs: Grammar::single_word(&r.word, terminals.clone()),
            rhs: None,
        })
        .collect();
    let target = Grammar::single_word(&Word::empty(), terminals);
    ancestors(&target, &rules)
}

/// Decides invertibility of words against one presentation.
pub struct InvertibilityChecker {
    epsilon_class: Grammar,
    alphabet: Vec<Letter>,
    confluent: bool,
}

impl InvertibilityChecker {
    pub fn new(p: &SpecialPresentation, sys: &SpecialRewritingSystem) -> InvertibilityChecker {
        InvertibilityChecker {
            epsilon_class: epsilon_class_grammar(p),
            alphabet: p.alphabet.clone(),
            confluent: sys.is_confluent(),
        }
    }

    fn one_sided(&self, w: &Word, left: bool) -> Ternary {
        let anywhere = Nfa::all_over(self.alphabet.iter().copied());
        let pattern = if left {
            anywhere.concat(&Nfa::from_word(w))
        } else {
            Nfa::from_word(w).concat(&anywhere)
        };
        if !self.epsilon_class.intersect_regular(&pattern).is_empty() {
            Ternary::Yes
        } else if self.confluent {
            Ternary::No
        } else {
            Ternary::Unknown
        }
    }

    /// Is there an `x` with `xw = 1`?
    pub fn left_invertible(&self, w: &Word) -> Ternary {
        self.one_sided(w, true)
    }

    /// Is there an `x` with `wx = 1`?
    pub fn right_invertible(&self, w: &Word) -> Ternary {
        self.one_sided(w, false)
    }

    /// Two-sided invertibility. `xw = 1` and `wy = 1` force `x = y`, so both
    /// one-sided answers together decide it.
    pub fn invertible(&self, w: &Word) -> Ternary {
        match (self.left_invertible(w), self.right_invertible(w)) {
            (Ternary::Yes, Ternary::Yes) => Ternary::Yes,
            (Ternary::No, _) | (_, Ternary::No) => Ternary::No,
            _ => Ternary::Unknown,
        }
    }
}

/// Greedy factorization of one relator into minimal invertible factors.
///
/// Every prefix cut is the shortest invertible nonempty prefix of the
/// remaining suffix; the suffix stays invertible, so the scan always has a
/// cut to find. Requires certified answers: a `Yes` after an `Unknown`
/// cannot establish minimality.
fn factorize_relator(
    checker: &InvertibilityChecker,
    index: usize,
    relator: &Word,
) -> Result<Vec<Word>, PieceError> {
    let mut factors = Vec::new();
    let mut rest = relator.0.as_slice();
    while !rest.is_empty() {
        let mut cut = None;
        let mut saw_unknown = false;
        for len in 1..=rest.len() {
            let prefix = Word(rest[..len].to_vec());
            match checker.invertible(&prefix) {
                Ternary::Yes => {
                    if saw_unknown {
                        return Err(PieceError::AmbiguousCut {
                            relator: index,
                            suffix: Word(rest.to_vec()),
                        });
                    }
                    cut = Some(len);
                    break;
                }
                Ternary::No => {}
                Ternary::Unknown => saw_unknown = true,
            }
        }
        match cut {
            Some(len) => {
                factors.push(Word(rest[..len].to_vec()));
                rest = &rest[len..];
            }
            None => {
                return Err(PieceError::Stuck {
                    relator: index,
                    suffix: Word(rest.to_vec()),
                })
            }
        }
    }
    Ok(factors)
}

/// Compute the pieces of `p` and the factorization of every relator.
///
/// Relators carrying an annotation use it as a certified factorization;
/// the rest are factorized greedily via the invertibility checker.
pub fn compute_pieces(p: &SpecialPresentation) -> Result<PieceData, PieceError> {
    let sys = SpecialRewritingSystem::from_presentation(p);
    let checker = InvertibilityChecker::new(p, &sys);
    let mut pieces: Vec<Word> = Vec::new();
    let mut factorizations = Vec::new();
    for (i, r) in p.relators.iter().enumerate() {
        let factors = match &r.annotation {
            Some(factors) => factors.clone(),
            None => factorize_relator(&checker, i, &r.word)?,
        };
        let mut indices = Vec::with_capacity(factors.len());
        for f in factors {
            let idx = match pieces.iter().position(|d| *d == f) {
                Some(idx) => idx,
                None => {
                    pieces.push(f);
                    pieces.len() - 1
                }
            };
            indices.push(idx);
        }
        factorizations.push(indices);
    }
    Ok(PieceData {
        pieces,
        factorizations,
        certification: Certification::Certified,
    })
}

/// Budget for targeted equality queries: proofs for genuine identities fit
/// within two relator layers over the inputs, and a bounded refutation
/// search stays fast.
fn search_budget(sys: &SpecialRewritingSystem, query_len: usize) -> Budget {
    Budget {
        max_len: (query_len + 2 * sys.max_relator_len()).max(16),
        max_visited: 200_000,
    }
}

fn proven_equal(sys: &SpecialRewritingSystem, u: &Word, v: &Word) -> Ternary {
    let len = u.len().max(v.len());
    match sys.equal(u, v, &search_budget(sys, len)) {
        EqualAnswer::Equal { .. } => Ternary::Yes,
        EqualAnswer::NotEqual { .. } => Ternary::No,
        EqualAnswer::Unknown { .. } => Ternary::Unknown,
    }
}

/// Partition the pieces by congruence and present the group of units.
pub fn units_presentation(
    p: &SpecialPresentation,
    data: &PieceData,
) -> UnitsPresentation {
    let sys = SpecialRewritingSystem::from_presentation(p);
    let mut class_reps: Vec<Word> = Vec::new();
    let mut piece_class = Vec::with_capacity(data.pieces.len());
    let mut certification = data.certification;
    for piece in &data.pieces {
        let mut class = None;
        for (ci, rep) in class_reps.iter().enumerate() {
            match proven_equal(&sys, piece, rep) {
                Ternary::Yes => {
                    class = Some(ci);
                    break;
                }
                Ternary::No => {}
                Ternary::Unknown => certification = Certification::BudgetLimited,
            }
        }
        let class = class.unwrap_or_else(|| {
            class_reps.push(piece.clone());
            class_reps.len() - 1
        });
        piece_class.push(class);
    }
    let relator_images = data
        .factorizations
        .iter()
        .map(|f| f.iter().map(|&i| piece_class[i]).collect())
        .collect();
    UnitsPresentation {
        class_count: class_reps.len(),
        piece_class,
        class_reps,
        relator_images,
        certification,
    }
}

/// One normalization step: inside `host`, the flanked subword `subword` was
/// replaced by the fresh generator `fresh`, whose inverse is `inverse`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalizeStep {
    pub host: Word,
    pub subword: Word,
    pub fresh: Letter,
    pub inverse: Word,
}

/// Result of piece-in-piece normalization.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalizeOutcome {
    /// The extended presentation; every relator carries its factorization.
    pub presentation: SpecialPresentation,
    pub pieces: PieceData,
    pub steps: Vec<NormalizeStep>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormalizeError {
    Pieces(PieceError),
    /// No inverse of the flanked subword was found within the search caps.
    InverseNotFound { subword: Word },
}

impl core::fmt::Display for NormalizeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormalizeError::Pieces(e) => write!(f, "{}", e),
            NormalizeError::InverseNotFound { subword } => {
                write!(f, "no inverse found for the flanked subword {}", subword)
            }
        }
    }
}

/// True when `w` is a nonempty product of the given pieces.
fn product_of_pieces(w: &[Letter], pieces: &[Word]) -> bool {
    if w.is_empty() {
        return false;
    }
    let mut reach = vec![false; w.len() + 1];
    reach[0] = true;
    for i in 0..w.len() {
        if !reach[i] {
            continue;
        }
        for d in pieces {
            if i + d.len() <= w.len() && w[i..i + d.len()] == d.0[..] {
                reach[i + d.len()] = true;
            }
        }
    }
    reach[w.len()]
}

/// Rebuild the presentation from piece words and factorizations.
fn assemble_presentation(
    alphabet: Vec<Letter>,
    pieces: &[Word],
    factorizations: &[Vec<usize>],
) -> SpecialPresentation {
    let relators = factorizations
        .iter()
        .map(|f| Relator::annotated(f.iter().map(|&i| pieces[i].clone()).collect()))
        .collect();
    SpecialPresentation::new(alphabet, relators)
}

/// Enumerate products of candidate pieces by (total length, candidate
/// order), starting with the empty product, and hand each to `test`. Stops
/// at the first accepted product.
fn search_products(
    candidates: &[Word],
    max_len: usize,
    max_count: usize,
    mut test: impl FnMut(&Word, &[usize]) -> bool,
) -> Option<(Word, Vec<usize>)> {
    if test(&Word::empty(), &[]) {
        return Some((Word::empty(), Vec::new()));
    }
    let mut tried = 0usize;
    for total in 1..=max_len {
        // Depth-first in candidate order enumerates this length class
        // lexicographically.
        let mut stack: Vec<(Word, Vec<usize>)> = vec![(Word::empty(), Vec::new())];
        while let Some((prefix, ranks)) = stack.pop() {
            // Expand in reverse so the stack pops candidates in order.
            let mut children = Vec::new();
            for (rank, c) in candidates.iter().enumerate() {
                let len = prefix.len() + c.len();
                if len > total {
                    continue;
                }
                let word = prefix.concat(c);
                let mut rs = ranks.clone();
                rs.push(rank);
                if len == total {
                    tried += 1;
                    if test(&word, &rs) {
                        return Some((word, rs));
                    }
                    if tried >= max_count {
                        return None;
                    }
                } else {
                    children.push((word, rs));
                }
            }
            for child in children.into_iter().rev() {
                stack.push(child);
            }
        }
    }
    None
}

/// Search `w′ ∈ candidates*` with proven `w·w′ = 1` and `w′·w = 1`.
fn find_inverse(
    sys: &SpecialRewritingSystem,
    w: &Word,
    candidates: &[Word],
    max_len: usize,
) -> Option<(Word, Vec<usize>)> {
    search_products(candidates, max_len, 10_000, |wp, _| {
        proven_equal(sys, &w.concat(wp), &Word::empty()) == Ternary::Yes
            && proven_equal(sys, &wp.concat(w), &Word::empty()) == Ternary::Yes
    })
}

/// Piece-in-piece normalization.
///
/// While some piece `δ = h₁·w·h₂` contains a product `w` of pieces with both
/// flanks nonempty and `|w| ≥ 2`, introduce a fresh generator `g`, adjoin
/// relators `g·w′ = 1` and `w′·g = 1` for an inverse `w′` of `w` found as a
/// product of pieces over the original alphabet, and shrink `δ` to
/// `h₁·g·h₂`. Each step lowers `Σ (|δ| - 1)`, so the loop terminates. The
/// flanked subword is chosen longest first, then by host piece order, then
/// leftmost.
pub fn normalize(p: &SpecialPresentation) -> Result<NormalizeOutcome, NormalizeError> {
    let original_alphabet: BTreeSet<Letter> = p.alphabet.iter().copied().collect();
    let data = compute_pieces(p).map_err(NormalizeError::Pieces)?;
    let mut pieces = data.pieces;
    let mut factorizations = data.factorizations;
    // Inverse searches only accept proven equalities, so certification
    // carries over from the piece computation unchanged.
    let certification = data.certification;
    let mut alphabet = p.alphabet.clone();
    let mut next_fresh = p.next_fresh_index();
    let mut steps = Vec::new();

    loop {
        // Longest flanked product of pieces inside any piece.
        let mut best: Option<(usize, usize, usize)> = None; // (len, host, start)
        for (host_idx, host) in pieces.iter().enumerate() {
            if host.len() < 4 {
                continue;
            }
            for len in (2..=host.len() - 2).rev() {
                for start in 1..=host.len() - 1 - len {
                    if product_of_pieces(&host.0[start..start + len], &pieces) {
                        let cand = (len, host_idx, start);
                        let better = match best {
                            None => true,
                            Some((bl, bh, bs)) => {
                                (len > bl)
                                    || (len == bl && host_idx < bh)
                                    || (len == bl && host_idx == bh && start < bs)
                            }
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        let Some((len, host_idx, start)) = best else {
            break;
        };

        let host = pieces[host_idx].clone();
        let subword = Word(host.0[start..start + len].to_vec());
        let sys = SpecialRewritingSystem::from_presentation(&assemble_presentation(
            alphabet.clone(),
            &pieces,
            &factorizations,
        ));

        // Inverse candidates: pieces over the original alphabet, shortest
        // first, then in piece order.
        let mut candidates: Vec<(usize, Word)> = pieces
            .iter()
            .enumerate()
            .filter(|(_, d)| d.letters().all(|l| original_alphabet.contains(&l)))
            .map(|(i, d)| (i, d.clone()))
            .collect();
        candidates.sort_by_key(|(i, d)| (d.len(), *i));
        let cand_words: Vec<Word> = candidates.iter().map(|(_, d)| d.clone()).collect();
        let cap = 2 * sys.max_relator_len();
        let Some((inverse, ranks)) = find_inverse(&sys, &subword, &cand_words, cap) else {
            return Err(NormalizeError::InverseNotFound { subword });
        };

        let fresh = Letter::fresh(next_fresh);
        next_fresh += 1;
        alphabet.push(fresh);
        let fresh_idx = pieces.len();
        pieces.push(Word::one(fresh));
        let inverse_factors: Vec<usize> = ranks.iter().map(|&r| candidates[r].0).collect();

        // g·w′ = 1 and w′·g = 1 with known factorizations.
        let mut left = vec![fresh_idx];
        left.extend(&inverse_factors);
        factorizations.push(left);
        let mut right = inverse_factors.clone();
        right.push(fresh_idx);
        factorizations.push(right);

        // Shrink the host piece; factorizations referencing it follow along.
        let mut shrunk = host.0[..start].to_vec();
        shrunk.push(fresh);
        shrunk.extend_from_slice(&host.0[start + len..]);
        pieces[host_idx] = Word(shrunk);

        steps.push(NormalizeStep {
            host,
            subword,
            fresh,
            inverse,
        });
    }

    let presentation = assemble_presentation(alphabet, &pieces, &factorizations);
    Ok(NormalizeOutcome {
        presentation,
        pieces: PieceData {
            pieces,
            factorizations,
            certification,
        },
        steps,
    })
}

/// Answer to the bicyclic-submonoid search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BicyclicAnswer {
    /// `right · left = 1` but `left · right ≠ 1`: the two generate a bicyclic
    /// submonoid.
    Witness { left: Word, right: Word },
    /// Every piece is a single letter, so no bicyclic submonoid exists.
    Absent,
    Unknown,
}

/// Find a bicyclic submonoid from a piece of length at least two.
///
/// For such a piece `w = w₁·w₂` (first letter split) with an inverse `w′`,
/// the pair `u = w₂·w′` and `w₁` satisfies `w₁·u = w·w′ = 1`; and `u·w₁ = 1`
/// would make `w₁` invertible, contradicting the minimality of the piece
/// `w`. The oracle double-checks that no proof of `u·w₁ = 1` exists within
/// budget before the witness is returned.
pub fn find_bicyclic(p: &SpecialPresentation, data: &PieceData) -> BicyclicAnswer {
    let sys = SpecialRewritingSystem::from_presentation(p);
    let alphabet: BTreeSet<Letter> = p.alphabet.iter().copied().collect();
    let mut candidates: Vec<(usize, Word)> = data
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, d)| d.letters().all(|l| alphabet.contains(&l)))
        .map(|(i, d)| (i, d.clone()))
        .collect();
    candidates.sort_by_key(|(i, d)| (d.len(), *i));
    let cand_words: Vec<Word> = candidates.iter().map(|(_, d)| d.clone()).collect();

    let mut any_long = false;
    for piece in &data.pieces {
        if piece.len() < 2 {
            continue;
        }
        any_long = true;
        let w1 = Word::one(piece.0[0]);
        let w2 = Word(piece.0[1..].to_vec());
        let cap = 2 * sys.max_relator_len().max(piece.len());
        let found = search_products(&cand_words, cap, 10_000, |wp, _| {
            proven_equal(&sys, &piece.concat(wp), &Word::empty()) == Ternary::Yes
        });
        let Some((inverse, _)) = found else {
            continue;
        };
        let u = w2.concat(&inverse);
        // Defensive: a proof of u·w₁ = 1 would contradict piece minimality.
        if proven_equal(&sys, &u.concat(&w1), &Word::empty()) == Ternary::Yes {
            continue;
        }
        return BicyclicAnswer::Witness {
            left: u,
            right: w1,
        };
    }
    if any_long {
        BicyclicAnswer::Unknown
    } else {
        BicyclicAnswer::Absent
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn pres(text: &str) -> SpecialPresentation {
        parse_presentation(text).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::from_str_chars(s).unwrap()
    }

    fn words(items: &[&str]) -> Vec<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn invertibility_in_the_bicyclic_monoid() {
        let p = pres("generators: b c\nrelator: bc\n");
        let sys = SpecialRewritingSystem::from_presentation(&p);
        let checker = InvertibilityChecker::new(&p, &sys);
        assert_eq!(checker.right_invertible(&w("b")), Ternary::Yes);
        assert_eq!(checker.left_invertible(&w("b")), Ternary::No);
        assert_eq!(checker.invertible(&w("b")), Ternary::No);
        assert_eq!(checker.invertible(&w("c")), Ternary::No);
        assert_eq!(checker.invertible(&w("bc")), Ternary::Yes);
        assert_eq!(checker.invertible(&w("bbcc")), Ternary::Yes);
        assert_eq!(checker.invertible(&w("cb")), Ternary::No);
    }

    #[test]
    fn pieces_of_small_monoids() {
        let p = pres("generators: b c\nrelator: bc\n");
        let data = compute_pieces(&p).unwrap();
        assert_eq!(data.pieces, words(&["bc"]));
        assert_eq!(data.factorizations, vec![vec![0]]);
        assert_eq!(data.certification, Certification::Certified);

        let p = pres("generators: a\nrelator: aaa\n");
        let data = compute_pieces(&p).unwrap();
        assert_eq!(data.pieces, words(&["a"]));
        assert_eq!(data.factorizations, vec![vec![0, 0, 0]]);

        let p = pres("generators: a b\nrelator: ab\nrelator: ba\n");
        let data = compute_pieces(&p).unwrap();
        assert_eq!(data.pieces, words(&["a", "b"]));
        assert_eq!(data.factorizations, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn annotations_override_the_search() {
        let p = pres(
            "generators: a b c\nrelator: (aabbacc)\nrelator: (ab)(ac)(ab)\n",
        );
        let data = compute_pieces(&p).unwrap();
        assert_eq!(data.pieces, words(&["aabbacc", "ab", "ac"]));
        assert_eq!(data.factorizations, vec![vec![0], vec![1, 2, 1]]);
        assert_eq!(data.weight(), 6 + 1 + 1);
    }

    #[test]
    fn unannotated_overlapping_relators_are_rejected() {
        let p = pres("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        // The relators overlap, so the system is not confluent: the full
        // relator is provably invertible but shorter prefixes stay
        // undecided, and no minimal cut can be certified.
        let err = compute_pieces(&p).unwrap_err();
        assert!(matches!(err, PieceError::AmbiguousCut { relator: 0, .. }));
    }

    #[test]
    fn units_of_small_monoids() {
        let p = pres("generators: a\nrelator: aaa\n");
        let u = units_presentation(&p, &compute_pieces(&p).unwrap());
        assert_eq!(u.class_count, 1);
        assert_eq!(u.relator_images, vec![vec![0, 0, 0]]);

        let p = pres("generators: a b\nrelator: ab\nrelator: ba\n");
        let u = units_presentation(&p, &compute_pieces(&p).unwrap());
        assert_eq!(u.class_count, 2);
        assert_eq!(u.relator_images, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(u.certification, Certification::Certified);
    }

    #[test]
    fn normalization_when_no_piece_contains_pieces() {
        let p = pres("generators: b c\nrelator: bc\n");
        let out = normalize(&p).unwrap();
        assert!(out.steps.is_empty());
        assert_eq!(out.pieces.pieces, words(&["bc"]));
        assert_eq!(out.presentation.alphabet, p.alphabet);
    }

    #[test]
    fn normalization_of_flanked_pieces() {
        let p = pres(
            "generators: a b c\nrelator: (aabbacc)\nrelator: (ab)(ac)(ab)\n",
        );
        let out = normalize(&p).unwrap();
        let p0 = Letter::fresh(0);
        let p1 = Letter::fresh(1);
        // aabbacc shrinks twice: ab → _p0 gives a_p0bacc, then ac → _p1.
        let expect_big = Word(vec![
            Letter::ch('a'),
            p0,
            Letter::ch('b'),
            p1,
            Letter::ch('c'),
        ]);
        assert_eq!(
            out.pieces.pieces,
            vec![expect_big.clone(), w("ab"), w("ac"), Word::one(p0), Word::one(p1)]
        );
        assert_eq!(out.pieces.weight(), 6);
        assert_eq!(out.steps.len(), 2);
        assert_eq!(out.steps[0].subword, w("ab"));
        assert_eq!(out.steps[0].inverse, w("abac"));
        assert_eq!(out.steps[1].subword, w("ac"));
        assert_eq!(out.steps[1].inverse, w("abab"));
        // Six relators: the two originals plus one inverse pair per step.
        assert_eq!(
            out.pieces.factorizations,
            vec![
                vec![0],
                vec![1, 2, 1],
                vec![3, 1, 2],
                vec![1, 2, 3],
                vec![4, 1, 1],
                vec![1, 1, 4],
            ]
        );
        assert_eq!(out.presentation.alphabet.len(), 5);
        assert_eq!(out.presentation.next_fresh_index(), 2);
    }

    #[test]
    fn normalization_rewrites_replaced_pieces_inside_inverses() {
        let p = pres(
            "generators: a b c\nrelator: (aaabccc)\nrelator: (aabcc)(abc)(aabcc)\n",
        );
        let out = normalize(&p).unwrap();
        let p0 = Letter::fresh(0);
        let p1 = Letter::fresh(1);
        let apc = Word(vec![Letter::ch('a'), p0, Letter::ch('c')]);
        let aqc = Word(vec![Letter::ch('a'), p1, Letter::ch('c')]);
        // aaabccc hosts the flanked piece aabcc, which in turn hosts abc;
        // both shrink, and the inverse relators follow the replacements.
        assert_eq!(
            out.pieces.pieces,
            vec![apc, aqc, w("abc"), Word::one(p0), Word::one(p1)]
        );
        assert_eq!(out.pieces.weight(), 6);
        assert_eq!(out.steps.len(), 2);
        assert_eq!(out.steps[0].subword, w("aabcc"));
        assert_eq!(out.steps[0].inverse, w("abcaabcc"));
        assert_eq!(out.steps[1].subword, w("abc"));
        assert_eq!(out.steps[1].inverse, w("aabccaabcc"));
        assert_eq!(
            out.pieces.factorizations,
            vec![
                vec![0],
                vec![1, 2, 1],
                vec![3, 2, 1],
                vec![2, 1, 3],
                vec![4, 1, 1],
                vec![1, 1, 4],
            ]
        );
    }

    #[test]
    fn bicyclic_witness_and_absence() {
        let p = pres("generators: b c\nrelator: bc\n");
        let data = compute_pieces(&p).unwrap();
        assert_eq!(
            find_bicyclic(&p, &data),
            BicyclicAnswer::Witness {
                left: w("c"),
                right: w("b"),
            }
        );

        let p = pres("generators: a\nrelator: aaa\n");
        let data = compute_pieces(&p).unwrap();
        assert_eq!(find_bicyclic(&p, &data), BicyclicAnswer::Absent);
    }

    #[test]
    fn epsilon_class_of_bicyclic_is_balanced() {
        let p = pres("generators: b c\nrelator: bc\n");
        let e = epsilon_class_grammar(&p);
        assert_eq!(e.enumerate_upto(4), words(&["", "bc", "bbcc", "bcbc"]));
    }
}
