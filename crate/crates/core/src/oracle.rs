//! Brute-force congruence oracle for special presentations.
//!
//! The relators of a special presentation orient into the length-reducing
//! rewriting system `{ w_i → ε }`. This module answers questions about the
//! Thue congruence it generates by elementary means only: rewriting, critical
//! pairs, an abelianized lattice test, and breadth-first search over
//! insert/delete derivations. It shares no code with the grammar-based
//! decision pipeline, so the two can check each other.
//!
//! Answers are never guesses:
//!
//! * `Equal` carries a derivation trace that [`SpecialRewritingSystem::replay`]
//!   re-executes step by step.
//! * `NotEqual` carries a certificate: distinct normal forms under a system
//!   certified confluent, or an abelianization obstruction.
//! * Anything else is `Unknown` with the exhausted budget.

use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use indexmap::IndexMap;
use smallvec::SmallVec;

use crate::presentation::SpecialPresentation;
use crate::word::{Letter, Word};

/// Interned word: letters replaced by small ids local to one system.
type IWord = SmallVec<[u8; 24]>;

type FxIndexMap<K, V> = IndexMap<K, V, hashbrown::DefaultHashBuilder>;

/// Search limits for derivation-graph exploration.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budget {
    /// Longest intermediate word a derivation may pass through.
    pub max_len: usize,
    /// Total number of distinct words the search may visit.
    pub max_visited: usize,
}

impl Budget {
    pub const DEFAULT_VISITED: usize = 2_000_000;

    /// Default budget for an equality query: room for two relator layers on
    /// top of the longer input.
    pub fn for_query(sys: &SpecialRewritingSystem, u: &Word, v: &Word) -> Budget {
        Budget {
            max_len: (2 * sys.max_relator_len() + u.len().max(v.len())).max(16),
            max_visited: Self::DEFAULT_VISITED,
        }
    }
}

/// One elementary congruence step: insert or delete relator `relator` at
/// position `pos`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Step {
    pub insert: bool,
    pub relator: usize,
    pub pos: usize,
}

impl Step {
    fn inverse(self) -> Step {
        Step {
            insert: !self.insert,
            ..self
        }
    }
}

/// A replayable derivation `u ↔ … ↔ v`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Trace(pub Vec<Step>);

/// Why two words are provably distinct.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NotEqualCertificate {
    /// The system is confluent and the normal forms differ.
    NormalForms { left: Word, right: Word },
    /// The difference of letter-count vectors lies outside the integer
    /// lattice spanned by the relator count vectors.
    Abelianization,
}

/// Result of an equality query.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EqualAnswer {
    Equal { trace: Trace },
    NotEqual { certificate: NotEqualCertificate },
    Unknown { budget: Budget },
}

impl EqualAnswer {
    pub fn is_equal(&self) -> bool {
        matches!(self, EqualAnswer::Equal { .. })
    }

    pub fn is_not_equal(&self) -> bool {
        matches!(self, EqualAnswer::NotEqual { .. })
    }
}

/// Whether an enumeration is exhaustive.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Completeness {
    Complete,
    PossiblyIncomplete,
}

/// Members of a congruence class up to a length bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassEnumeration {
    pub words: Vec<Word>,
    pub completeness: Completeness,
}

/// An unresolved overlap of two relator occurrences: `source` rewrites in one
/// step to both `left` and `right`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CriticalPair {
    pub source: Word,
    pub left: Word,
    pub right: Word,
}

/// The oriented system `{ w_i → ε }` of a special presentation.
pub struct SpecialRewritingSystem {
    letters: Vec<Letter>,
    ids: HashMap<Letter, u8>,
    relators: Vec<IWord>,
    max_relator_len: usize,
    confluent: once_cell::race::OnceBool,
}

impl SpecialRewritingSystem {
    /// Orient the relators of `p` into deletion rules.
    pub fn from_presentation(p: &SpecialPresentation) -> SpecialRewritingSystem {
        let mut letters = Vec::new();
        let mut ids = HashMap::new();
        let add = |l: Letter, letters: &mut Vec<Letter>, ids: &mut HashMap<Letter, u8>| {
            ids.entry(l).or_insert_with(|| {
                letters.push(l);
                u8::try_from(letters.len() - 1).expect("alphabet exceeds 255 letters")
            });
        };
        for &l in &p.alphabet {
            add(l, &mut letters, &mut ids);
        }
        for r in &p.relators {
            for l in r.word.letters() {
                add(l, &mut letters, &mut ids);
            }
        }
        let relators = p
            .relators
            .iter()
            .filter(|r| !r.word.is_empty())
            .map(|r| r.word.letters().map(|l| ids[&l]).collect())
            .collect::<Vec<IWord>>();
        let max_relator_len = relators.iter().map(|r| r.len()).max().unwrap_or(0);
        SpecialRewritingSystem {
            letters,
            ids,
            relators,
            max_relator_len,
            confluent: once_cell::race::OnceBool::new(),
        }
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.letters
    }

    pub fn max_relator_len(&self) -> usize {
        self.max_relator_len
    }

    pub fn relator_words(&self) -> Vec<Word> {
        self.relators.iter().map(|r| self.extern_word(r)).collect()
    }

    /// Intern `w`, mapping letters outside the system alphabet to fresh ids
    /// valid for this call only. Such letters are inert under every rule, so
    /// rewriting and search semantics are unchanged.
    fn intern_extended(&self, w: &Word, extra: &mut Vec<Letter>) -> IWord {
        w.letters()
            .map(|l| match self.ids.get(&l) {
                Some(&id) => id,
                None => {
                    let pos = match extra.iter().position(|&e| e == l) {
                        Some(p) => p,
                        None => {
                            extra.push(l);
                            extra.len() - 1
                        }
                    };
                    u8::try_from(self.letters.len() + pos).expect("alphabet exceeds 255 letters")
                }
            })
            .collect()
    }

    fn extern_with(&self, w: &IWord, extra: &[Letter]) -> Word {
        w.iter()
            .map(|&id| {
                let id = id as usize;
                if id < self.letters.len() {
                    self.letters[id]
                } else {
                    extra[id - self.letters.len()]
                }
            })
            .collect()
    }

    fn extern_word(&self, w: &IWord) -> Word {
        self.extern_with(w, &[])
    }

    /// Reduce to an irreducible word, recording the deletions performed.
    fn reduce(&self, w: &IWord) -> (IWord, Vec<Step>) {
        let mut cur = w.clone();
        let mut steps = Vec::new();
        // After deleting at p, new occurrences can only start at p-maxrel+1
        // or later; earlier positions were already scanned clean.
        let mut from = 0usize;
        loop {
            let mut hit = None;
            'scan: for p in from..cur.len() {
                for (ri, r) in self.relators.iter().enumerate() {
                    if p + r.len() <= cur.len() && &cur[p..p + r.len()] == r.as_slice() {
                        hit = Some((p, ri));
                        break 'scan;
                    }
                }
            }
            match hit {
                Some((p, ri)) => {
                    let rlen = self.relators[ri].len();
                    let mut next = IWord::with_capacity(cur.len() - rlen);
                    next.extend_from_slice(&cur[..p]);
                    next.extend_from_slice(&cur[p + rlen..]);
                    cur = next;
                    steps.push(Step {
                        insert: false,
                        relator: ri,
                        pos: p,
                    });
                    from = p.saturating_sub(self.max_relator_len.saturating_sub(1));
                }
                None => return (cur, steps),
            }
        }
    }

    /// The irreducible word reached by leftmost deletion. Unique over all
    /// strategies exactly when the system is confluent.
    pub fn normal_form(&self, w: &Word) -> Word {
        let mut extra = Vec::new();
        let iw = self.intern_extended(w, &mut extra);
        let (nf, _) = self.reduce(&iw);
        self.extern_with(&nf, &extra)
    }

    /// All words reachable from `w` by deletions alone. Finite: every step
    /// shortens the word.
    fn descendants(&self, w: &IWord) -> HashSet<IWord> {
        let mut seen = HashSet::new();
        let mut stack = alloc::vec![w.clone()];
        seen.insert(w.clone());
        while let Some(x) = stack.pop() {
            for (_, r) in self.relators.iter().enumerate() {
                if r.len() > x.len() {
                    continue;
                }
                for p in 0..=x.len() - r.len() {
                    if &x[p..p + r.len()] == r.as_slice() {
                        let mut child = IWord::with_capacity(x.len() - r.len());
                        child.extend_from_slice(&x[..p]);
                        child.extend_from_slice(&x[p + r.len()..]);
                        if seen.insert(child.clone()) {
                            stack.push(child);
                        }
                    }
                }
            }
        }
        seen
    }

    fn joinable(&self, a: &IWord, b: &IWord) -> bool {
        let da = self.descendants(a);
        if da.contains(b) {
            return true;
        }
        let db = self.descendants(b);
        da.intersection(&db).next().is_some()
    }

    /// Critical pairs that do not rewrite to a common word.
    ///
    /// Covers suffix/prefix overlaps (including self-overlaps) and strict
    /// containments of one relator in another.
    pub fn unresolved_critical_pairs(&self) -> Vec<CriticalPair> {
        let mut out = Vec::new();
        for (i, ri) in self.relators.iter().enumerate() {
            for (j, rj) in self.relators.iter().enumerate() {
                // ri = u·s, rj = s·v with u, v nonempty: u·s·v splits.
                for slen in 1..ri.len().min(rj.len()) {
                    if ri[ri.len() - slen..] == rj[..slen] {
                        let left: IWord = SmallVec::from_slice(&rj[slen..]);
                        let right: IWord = SmallVec::from_slice(&ri[..ri.len() - slen]);
                        if !self.joinable(&left, &right) {
                            let mut source: IWord = SmallVec::from_slice(&ri[..ri.len() - slen]);
                            source.extend_from_slice(rj);
                            out.push(CriticalPair {
                                source: self.extern_word(&source),
                                left: self.extern_word(&left),
                                right: self.extern_word(&right),
                            });
                        }
                    }
                }
                // rj strictly inside ri: ε vs flanks.
                if i != j && rj.len() < ri.len() {
                    for p in 0..=ri.len() - rj.len() {
                        if &ri[p..p + rj.len()] == rj.as_slice() {
                            let mut flanks: IWord = SmallVec::from_slice(&ri[..p]);
                            flanks.extend_from_slice(&ri[p + rj.len()..]);
                            if !self.joinable(&flanks, &SmallVec::new()) {
                                out.push(CriticalPair {
                                    source: self.extern_word(ri),
                                    left: self.extern_word(&flanks),
                                    right: Word::empty(),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact confluence test: the system is terminating, so local confluence
    /// of all critical pairs decides confluence. Cached after the first call.
    pub fn is_confluent(&self) -> bool {
        self.confluent
            .get_or_init(|| self.unresolved_critical_pairs().is_empty())
    }

    fn letter_counts(&self, w: &IWord, width: usize) -> Vec<i64> {
        let mut counts = alloc::vec![0i64; width];
        for &id in w {
            counts[id as usize] += 1;
        }
        counts
    }

    /// True when `target` lies in the ℤ-lattice spanned by `rows`.
    fn lattice_member(rows: &[Vec<i64>], target: &[i64]) -> bool {
        let width = target.len();
        let mut active: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut pivots: Vec<Vec<i128>> = Vec::new();
        for col in 0..width {
            loop {
                let mut best: Option<usize> = None;
                for (k, row) in active.iter().enumerate() {
                    if row[col] != 0
                        && best.map_or(true, |b| row[col].abs() < active[b][col].abs())
                    {
                        best = Some(k);
                    }
                }
                let Some(b) = best else { break };
                let pivot = active.swap_remove(b);
                let mut done = true;
                for row in active.iter_mut() {
                    if row[col] != 0 {
                        let q = row[col].div_euclid(pivot[col]);
                        for c in 0..width {
                            row[c] -= q * pivot[c];
                        }
                        if row[col] != 0 {
                            done = false;
                        }
                    }
                }
                active.push(pivot);
                if done {
                    let p = active.pop().expect("pivot row present");
                    pivots.push(p);
                    active.retain(|r| r.iter().any(|&x| x != 0));
                    break;
                }
            }
        }
        let mut t: Vec<i128> = target.iter().map(|&x| x as i128).collect();
        for p in &pivots {
            let col = p.iter().position(|&x| x != 0).expect("nonzero pivot");
            if t[col] % p[col] != 0 {
                return false;
            }
            let q = t[col] / p[col];
            for c in 0..t.len() {
                t[c] -= q * p[c];
            }
        }
        t.iter().all(|&x| x == 0)
    }

    /// True when abelianization already rules out `u = v`.
    fn abelianization_refutes(&self, u: &IWord, v: &IWord, width: usize) -> bool {
        let cu = self.letter_counts(u, width);
        let cv = self.letter_counts(v, width);
        let target: Vec<i64> = cu.iter().zip(&cv).map(|(a, b)| a - b).collect();
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| self.letter_counts(r, width))
            .collect();
        !Self::lattice_member(&rows, &target)
    }

    fn neighbors(&self, x: &IWord, max_len: usize, mut emit: impl FnMut(IWord, Step)) {
        for (ri, r) in self.relators.iter().enumerate() {
            if r.len() <= x.len() {
                for p in 0..=x.len() - r.len() {
                    if &x[p..p + r.len()] == r.as_slice() {
                        let mut child = IWord::with_capacity(x.len() - r.len());
                        child.extend_from_slice(&x[..p]);
                        child.extend_from_slice(&x[p + r.len()..]);
                        emit(
                            child,
                            Step {
                                insert: false,
                                relator: ri,
                                pos: p,
                            },
                        );
                    }
                }
            }
            if x.len() + r.len() <= max_len {
                for p in 0..=x.len() {
                    let mut child = IWord::with_capacity(x.len() + r.len());
                    child.extend_from_slice(&x[..p]);
                    child.extend_from_slice(r);
                    child.extend_from_slice(&x[p..]);
                    emit(
                        child,
                        Step {
                            insert: true,
                            relator: ri,
                            pos: p,
                        },
                    );
                }
            }
        }
    }

    /// Decide `u = v` in the monoid, within `budget`.
    ///
    /// Strategy: syntactic identity, then comparison of irreducible forms
    /// (a proof when they coincide, a refutation when they differ under a
    /// confluent system), then the abelianization obstruction, and finally
    /// bidirectional search over insert/delete derivations.
    pub fn equal(&self, u: &Word, v: &Word, budget: &Budget) -> EqualAnswer {
        if u == v {
            return EqualAnswer::Equal {
                trace: Trace::default(),
            };
        }
        let mut extra = Vec::new();
        let iu = self.intern_extended(u, &mut extra);
        let iv = self.intern_extended(v, &mut extra);

        let (nfu, steps_u) = self.reduce(&iu);
        let (nfv, steps_v) = self.reduce(&iv);
        if nfu == nfv {
            let mut steps = steps_u;
            steps.extend(steps_v.into_iter().rev().map(Step::inverse));
            return EqualAnswer::Equal {
                trace: Trace(steps),
            };
        }
        if self.is_confluent() {
            return EqualAnswer::NotEqual {
                certificate: NotEqualCertificate::NormalForms {
                    left: self.extern_with(&nfu, &extra),
                    right: self.extern_with(&nfv, &extra),
                },
            };
        }
        let width = self.letters.len() + extra.len();
        if self.abelianization_refutes(&iu, &iv, width) {
            return EqualAnswer::NotEqual {
                certificate: NotEqualCertificate::Abelianization,
            };
        }
        self.bidirectional_search(iu, iv, budget)
    }

    /// `equal` under [`Budget::for_query`].
    pub fn equal_default(&self, u: &Word, v: &Word) -> EqualAnswer {
        self.equal(u, v, &Budget::for_query(self, u, v))
    }

    fn bidirectional_search(&self, iu: IWord, iv: IWord, budget: &Budget) -> EqualAnswer {
        // Each side maps word → (parent index, producing step); usize::MAX
        // marks the root. Insertion order doubles as the BFS queue.
        let mut sides: [FxIndexMap<IWord, (usize, Step)>; 2] = [
            FxIndexMap::default(),
            FxIndexMap::default(),
        ];
        let dummy = Step {
            insert: false,
            relator: 0,
            pos: 0,
        };
        sides[0].insert(iu, (usize::MAX, dummy));
        sides[1].insert(iv, (usize::MAX, dummy));
        let mut next = [0usize, 0usize];

        let chain = |side: &FxIndexMap<IWord, (usize, Step)>, mut idx: usize| -> Vec<Step> {
            let mut steps = Vec::new();
            while idx != usize::MAX {
                let (_, &(parent, step)) = side.get_index(idx).expect("index in side");
                if parent == usize::MAX {
                    break;
                }
                steps.push(step);
                idx = parent;
            }
            steps.reverse();
            steps
        };
        let finish = |steps_from_u: Vec<Step>, steps_from_v: Vec<Step>| -> EqualAnswer {
            let mut steps = steps_from_u;
            steps.extend(steps_from_v.into_iter().rev().map(Step::inverse));
            EqualAnswer::Equal {
                trace: Trace(steps),
            }
        };

        loop {
            let pending = [sides[0].len() - next[0], sides[1].len() - next[1]];
            if pending[0] == 0 && pending[1] == 0 {
                return EqualAnswer::Unknown { budget: *budget };
            }
            let s = if pending[1] == 0 || (pending[0] != 0 && pending[0] <= pending[1]) {
                0
            } else {
                1
            };
            let idx = next[s];
            next[s] += 1;
            let x = sides[s].get_index(idx).expect("index in side").0.clone();

            let mut meet: Option<(Step, usize)> = None;
            let mut budget_hit = false;
            self.neighbors(&x, budget.max_len, |child, step| {
                if meet.is_some() || budget_hit {
                    return;
                }
                if let Some((other_idx, _, _)) = sides[1 - s].get_full(&child) {
                    meet = Some((step, other_idx));
                    return;
                }
                if sides[s].contains_key(&child) {
                    return;
                }
                if sides[0].len() + sides[1].len() >= budget.max_visited {
                    budget_hit = true;
                    return;
                }
                sides[s].insert(child, (idx, step));
            });
            if let Some((step, other_idx)) = meet {
                let mut mine = chain(&sides[s], idx);
                mine.push(step);
                let other = chain(&sides[1 - s], other_idx);
                return if s == 0 {
                    finish(mine, other)
                } else {
                    finish(other, mine)
                };
            }
            if budget_hit {
                return EqualAnswer::Unknown { budget: *budget };
            }
        }
    }

    /// Apply `trace` to `start`; `None` if any step is inapplicable.
    pub fn replay(&self, start: &Word, trace: &Trace) -> Option<Word> {
        let mut extra = Vec::new();
        let mut cur = self.intern_extended(start, &mut extra);
        for step in &trace.0 {
            let r = self.relators.get(step.relator)?;
            if step.insert {
                if step.pos > cur.len() {
                    return None;
                }
                let mut next = IWord::with_capacity(cur.len() + r.len());
                next.extend_from_slice(&cur[..step.pos]);
                next.extend_from_slice(r);
                next.extend_from_slice(&cur[step.pos..]);
                cur = next;
            } else {
                if step.pos + r.len() > cur.len()
                    || &cur[step.pos..step.pos + r.len()] != r.as_slice()
                {
                    return None;
                }
                let mut next = IWord::with_capacity(cur.len() - r.len());
                next.extend_from_slice(&cur[..step.pos]);
                next.extend_from_slice(&cur[step.pos + r.len()..]);
                cur = next;
            }
        }
        Some(self.extern_with(&cur, &extra))
    }

    /// Enumerate the congruence class of `w` restricted to words of length
    /// at most `maxlen`, in (length, alphabet-order) order.
    ///
    /// Under a confluent system every word of bounded length is checked
    /// against the normal form, so the result is `Complete` (provided the
    /// word count fits the visit budget). Otherwise the class is explored by
    /// insert/delete search through intermediates up to `budget.max_len` and
    /// the result is `PossiblyIncomplete`: longer detours may exist.
    pub fn class_enum(&self, w: &Word, maxlen: usize, budget: &Budget) -> ClassEnumeration {
        let mut extra = Vec::new();
        let iw = self.intern_extended(w, &mut extra);
        let width = self.letters.len() + extra.len();

        if self.is_confluent() {
            let mut total: u128 = 0;
            let mut layer: u128 = 1;
            for _ in 0..=maxlen {
                total += layer;
                layer = layer.saturating_mul(width as u128);
            }
            if total <= budget.max_visited as u128 {
                let (nf, _) = self.reduce(&iw);
                let mut words = Vec::new();
                let mut cur: Vec<u8> = Vec::new();
                loop {
                    let cand: IWord = SmallVec::from_slice(&cur);
                    if self.reduce(&cand).0 == nf {
                        words.push(self.extern_with(&cand, &extra));
                    }
                    // Odometer over ids, shortest first.
                    let mut i = cur.len();
                    loop {
                        if i == 0 {
                            cur.push(0);
                            break;
                        }
                        if (cur[i - 1] as usize) + 1 < width {
                            cur[i - 1] += 1;
                            break;
                        }
                        cur[i - 1] = 0;
                        i -= 1;
                    }
                    if cur.len() > maxlen {
                        break;
                    }
                }
                return ClassEnumeration {
                    words,
                    completeness: Completeness::Complete,
                };
            }
        }

        let max_len = budget.max_len.max(maxlen);
        let mut seen: FxIndexMap<IWord, ()> = FxIndexMap::default();
        seen.insert(iw, ());
        let mut qi = 0;
        while qi < seen.len() && seen.len() < budget.max_visited {
            let x = seen.get_index(qi).expect("index in queue").0.clone();
            qi += 1;
            let mut full = false;
            self.neighbors(&x, max_len, |child, _| {
                if !full {
                    seen.insert(child, ());
                    full = seen.len() >= budget.max_visited;
                }
            });
        }
        let mut words: Vec<IWord> = seen
            .into_keys()
            .filter(|x| x.len() <= maxlen)
            .collect();
        words.sort_unstable();
        words.sort_by_key(|x| x.len());
        ClassEnumeration {
            words: words.iter().map(|x| self.extern_with(x, &extra)).collect(),
            completeness: Completeness::PossiblyIncomplete,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn sys(text: &str) -> SpecialRewritingSystem {
        SpecialRewritingSystem::from_presentation(&parse_presentation(text).unwrap())
    }

    fn w(s: &str) -> Word {
        Word::from_str_chars(s).unwrap()
    }

    #[test]
    fn confluence_of_small_systems() {
        assert!(sys("generators: b c\nrelator: bc\n").is_confluent());
        assert!(sys("generators: a\nrelator: aaa\n").is_confluent());
        assert!(sys("generators: a b\nrelator: ab\nrelator: ba\n").is_confluent());
    }

    #[test]
    fn overlapping_relators_are_detected() {
        let s = sys("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        let pairs = s.unresolved_critical_pairs();
        assert!(!s.is_confluent());
        // abacab overlaps itself in its suffix/prefix ab.
        assert!(pairs
            .iter()
            .any(|p| (p.left == w("acab") && p.right == w("abac"))
                || (p.left == w("abac") && p.right == w("acab"))));
    }

    #[test]
    fn normal_forms_under_confluence() {
        let s = sys("generators: a\nrelator: aaa\n");
        assert_eq!(s.normal_form(&w("aaaa")), w("a"));
        assert_eq!(s.normal_form(&w("aaa")), Word::empty());
        let s = sys("generators: b c\nrelator: bc\n");
        assert_eq!(s.normal_form(&w("bbccbc")), Word::empty());
        assert_eq!(s.normal_form(&w("cb")), w("cb"));
    }

    #[test]
    fn equal_by_normal_forms_with_replayable_trace() {
        let s = sys("generators: b c\nrelator: bc\n");
        let answer = s.equal_default(&w("bbcc"), &w("bc"));
        let EqualAnswer::Equal { trace } = answer else {
            panic!("expected Equal");
        };
        assert_eq!(s.replay(&w("bbcc"), &trace), Some(w("bc")));
    }

    #[test]
    fn not_equal_certificates() {
        let s = sys("generators: b c\nrelator: bc\n");
        match s.equal_default(&w("cb"), &Word::empty()) {
            EqualAnswer::NotEqual {
                certificate: NotEqualCertificate::NormalForms { left, right },
            } => {
                assert_eq!(left, w("cb"));
                assert_eq!(right, Word::empty());
            }
            other => panic!("expected NormalForms certificate, got {:?}", other),
        }
        // Non-confluent system, refuted by letter counts.
        let s = sys("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        match s.equal_default(&w("a"), &Word::empty()) {
            EqualAnswer::NotEqual {
                certificate: NotEqualCertificate::Abelianization,
            } => {}
            other => panic!("expected Abelianization certificate, got {:?}", other),
        }
    }

    #[test]
    fn bfs_finds_nontrivial_derivation() {
        // ababac = (ab)(ab)(ac) collapses to ε only through an insertion.
        let s = sys("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        let u = w("ababac");
        match s.equal_default(&u, &Word::empty()) {
            EqualAnswer::Equal { trace } => {
                assert_eq!(s.replay(&u, &trace), Some(Word::empty()));
                assert!(!trace.0.is_empty());
            }
            other => panic!("expected Equal, got {:?}", other),
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = sys("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        let tight = Budget {
            max_len: 12,
            max_visited: 5_000,
        };
        // c has the abelianized type of a relator quotient but is not 1.
        match s.equal(&w("c"), &Word::empty(), &tight) {
            EqualAnswer::Unknown { budget } => assert_eq!(budget, tight),
            other => panic!("expected Unknown, got {:?}", other),
        }
    }

    #[test]
    fn class_enumeration_of_bicyclic_identity() {
        let s = sys("generators: b c\nrelator: bc\n");
        let budget = Budget {
            max_len: 16,
            max_visited: 100_000,
        };
        let class = s.class_enum(&Word::empty(), 4, &budget);
        assert_eq!(class.completeness, Completeness::Complete);
        let expect: Vec<Word> = ["", "bc", "bbcc", "bcbc"].iter().map(|s| w(s)).collect();
        assert_eq!(class.words, expect);
    }

    #[test]
    fn class_enumeration_without_confluence_is_marked() {
        let s = sys("generators: a b c\nrelator: aabbacc\nrelator: abacab\n");
        let budget = Budget {
            max_len: 10,
            max_visited: 50_000,
        };
        let class = s.class_enum(&w("abacab"), 6, &budget);
        assert_eq!(class.completeness, Completeness::PossiblyIncomplete);
        assert!(class.words.contains(&Word::empty()));
        assert!(class.words.contains(&w("aabbacc")) == false);
    }

    #[test]
    fn lattice_membership() {
        let rows = alloc::vec![alloc::vec![3, 2, 2], alloc::vec![3, 2, 1]];
        assert!(SpecialRewritingSystem::lattice_member(&rows, &[0, 0, 1]));
        assert!(SpecialRewritingSystem::lattice_member(&rows, &[3, 2, 1]));
        assert!(SpecialRewritingSystem::lattice_member(&rows, &[6, 4, 3]));
        assert!(!SpecialRewritingSystem::lattice_member(&rows, &[1, 0, 0]));
        assert!(!SpecialRewritingSystem::lattice_member(&rows, &[0, 1, 0]));
        assert!(SpecialRewritingSystem::lattice_member(&[], &[0, 0]));
        assert!(!SpecialRewritingSystem::lattice_member(&[], &[1, 0]));
    }
}
