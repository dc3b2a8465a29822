//! Nondeterministic finite automata and a small regular-expression parser.
//!
//! Automata here describe the regular languages the pipeline intersects
//! context-free grammars with: search windows like `wA*`, word-problem
//! shapes like `A*#K^rev`, and complements of finite sets. States are dense
//! ids, edges may be labeled with a letter or ε.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::word::{scan_letter, Letter, Word};

/// An NFA with one start state and ε-edges.
#[derive(Clone, Debug)]
pub struct Nfa {
    start: usize,
    finals: Vec<bool>,
    edges: Vec<Vec<(Option<Letter>, usize)>>,
}

impl Nfa {
    fn with_states(n: usize, start: usize) -> Nfa {
        Nfa {
            start,
            finals: vec![false; n],
            edges: vec![Vec::new(); n],
        }
    }

    /// The empty language.
    pub fn nothing() -> Nfa {
        Nfa::with_states(1, 0)
    }

    /// The language `{ε}`.
    pub fn epsilon() -> Nfa {
        let mut a = Nfa::with_states(1, 0);
        a.finals[0] = true;
        a
    }

    /// The language `{w}`.
    pub fn from_word(w: &Word) -> Nfa {
        let n = w.len() + 1;
        let mut a = Nfa::with_states(n, 0);
        for (i, l) in w.letters().enumerate() {
            a.edges[i].push((Some(l), i + 1));
        }
        a.finals[n - 1] = true;
        a
    }

    /// A finite language.
    pub fn from_words(words: &[Word]) -> Nfa {
        words
            .iter()
            .map(Nfa::from_word)
            .fold(Nfa::nothing(), |acc, a| acc.union(&a))
    }

    /// The language `letters*`.
    pub fn all_over(letters: impl IntoIterator<Item = Letter>) -> Nfa {
        let mut a = Nfa::with_states(1, 0);
        a.finals[0] = true;
        for l in letters {
            a.edges[0].push((Some(l), 0));
        }
        a
    }

    pub fn n_states(&self) -> usize {
        self.edges.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn edges_from(&self, q: usize) -> impl Iterator<Item = (Option<Letter>, usize)> + '_ {
        self.edges[q].iter().copied()
    }

    fn embed(&mut self, other: &Nfa) -> usize {
        let offset = self.edges.len();
        for q in 0..other.edges.len() {
            self.finals.push(other.finals[q]);
            self.edges
                .push(other.edges[q].iter().map(|&(l, t)| (l, t + offset)).collect());
        }
        offset + other.start
    }

    pub fn union(&self, other: &Nfa) -> Nfa {
        let mut a = Nfa::with_states(1, 0);
        let s1 = a.embed(self);
        let s2 = a.embed(other);
        a.edges[0].push((None, s1));
        a.edges[0].push((None, s2));
        a
    }

    pub fn concat(&self, other: &Nfa) -> Nfa {
        let mut a = self.clone();
        let s2 = a.embed(other);
        // Old finals of self feed other's start; only other's finals remain.
        for q in 0..self.finals.len() {
            if self.finals[q] {
                a.finals[q] = false;
                a.edges[q].push((None, s2));
            }
        }
        a
    }

    pub fn star(&self) -> Nfa {
        let mut a = Nfa::with_states(1, 0);
        let s = a.embed(self);
        a.finals[0] = true;
        a.edges[0].push((None, s));
        for q in 0..self.finals.len() {
            if self.finals[q] {
                a.edges[1 + q].push((None, 0));
            }
        }
        a
    }

    /// The mirror language.
    pub fn reversed(&self) -> Nfa {
        let n = self.edges.len();
        let mut a = Nfa::with_states(n + 1, n);
        for (q, out) in self.edges.iter().enumerate() {
            for &(l, t) in out {
                a.edges[t].push((l, q));
            }
        }
        a.finals[self.start] = true;
        for q in 0..n {
            if self.finals[q] {
                a.edges[n].push((None, q));
            }
        }
        a
    }

    fn closure_from(&self, seed: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.edges.len()];
        let mut stack: Vec<usize> = seed.into_iter().collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &(l, t) in &self.edges[q] {
                if l.is_none() && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        (0..self.edges.len()).filter(|&q| seen[q]).collect()
    }

    /// States reachable from `p` by `ε* l`.
    pub fn letter_step(&self, p: usize, l: Letter) -> Vec<usize> {
        let mut out = Vec::new();
        for &r in &self.closure_from([p]) {
            for &(e, t) in &self.edges[r] {
                if e == Some(l) && !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// True when a final state is ε-reachable from `q`.
    pub fn final_through_epsilon(&self, q: usize) -> bool {
        self.closure_from([q]).iter().any(|&r| self.finals[r])
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let mut states = self.closure_from([self.start]);
        for l in w.letters() {
            let mut next: Vec<usize> = Vec::new();
            for &q in &states {
                for t in self.letter_step(q, l) {
                    if !next.contains(&t) {
                        next.push(t);
                    }
                }
            }
            states = self.closure_from(next);
            if states.is_empty() {
                return false;
            }
        }
        states.iter().any(|&q| self.finals[q])
    }

    /// Complement with respect to `alphabet*`, via the subset construction.
    pub fn complement(&self, alphabet: &BTreeSet<Letter>) -> Nfa {
        let letters: Vec<Letter> = alphabet.iter().copied().collect();
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut subsets: Vec<Vec<usize>> = Vec::new();
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let start_set = self.closure_from([self.start]);
        index.insert(start_set.clone(), 0);
        subsets.push(start_set);
        let mut qi = 0;
        while qi < subsets.len() {
            let cur = subsets[qi].clone();
            let mut row = Vec::with_capacity(letters.len());
            for &l in &letters {
                let mut next: Vec<usize> = Vec::new();
                for &q in &cur {
                    for t in self.letter_step(q, l) {
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                let next = self.closure_from(next);
                let id = *index.entry(next.clone()).or_insert_with(|| {
                    subsets.push(next);
                    subsets.len() - 1
                });
                row.push(id);
            }
            trans.push(row);
            qi += 1;
        }
        let mut a = Nfa::with_states(subsets.len(), 0);
        for (q, row) in trans.iter().enumerate() {
            for (li, &t) in row.iter().enumerate() {
                a.edges[q].push((Some(letters[li]), t));
            }
            a.finals[q] = !subsets[q].iter().any(|&s| self.finals[s]);
        }
        a
    }

    /// Parse a regular expression: letters, `(…)`, `|`, `*`, `+`, `?`, and
    /// `\x` to escape a metacharacter as a letter. The empty expression (or
    /// branch) is ε. With `units_names`, letters are read as group-of-units
    /// generators.
    pub fn parse_regex(text: &str, units_names: bool) -> Result<Nfa, String> {
        let mut p = RegexParser {
            rest: text,
            units_names,
        };
        let a = p.alternation()?;
        if !p.rest.is_empty() {
            return Err(format!("unexpected {:?} in pattern", p.rest));
        }
        Ok(a)
    }
}

struct RegexParser<'a> {
    rest: &'a str,
    units_names: bool,
}

impl RegexParser<'_> {
    fn alternation(&mut self) -> Result<Nfa, String> {
        let mut a = self.concatenation()?;
        while let Some(stripped) = self.rest.strip_prefix('|') {
            self.rest = stripped;
            a = a.union(&self.concatenation()?);
        }
        Ok(a)
    }

    fn concatenation(&mut self) -> Result<Nfa, String> {
        let mut a = Nfa::epsilon();
        while !self.rest.is_empty()
            && !self.rest.starts_with('|')
            && !self.rest.starts_with(')')
        {
            a = a.concat(&self.repetition()?);
        }
        Ok(a)
    }

    fn repetition(&mut self) -> Result<Nfa, String> {
        let mut a = self.atom()?;
        loop {
            if let Some(s) = self.rest.strip_prefix('*') {
                self.rest = s;
                a = a.star();
            } else if let Some(s) = self.rest.strip_prefix('+') {
                self.rest = s;
                a = a.concat(&a.star());
            } else if let Some(s) = self.rest.strip_prefix('?') {
                self.rest = s;
                a = a.union(&Nfa::epsilon());
            } else {
                return Ok(a);
            }
        }
    }

    fn atom(&mut self) -> Result<Nfa, String> {
        if let Some(s) = self.rest.strip_prefix('(') {
            self.rest = s;
            let a = self.alternation()?;
            match self.rest.strip_prefix(')') {
                Some(s) => {
                    self.rest = s;
                    Ok(a)
                }
                None => Err(String::from("unclosed ( in pattern")),
            }
        } else if let Some(s) = self.rest.strip_prefix('\\') {
            let mut chars = s.chars();
            match chars.next() {
                Some(c) => {
                    self.rest = chars.as_str();
                    Ok(Nfa::from_word(&Word::one(Letter::ch(c))))
                }
                None => Err(String::from("dangling \\ in pattern")),
            }
        } else {
            match scan_letter(self.rest, self.units_names) {
                Some((l, used)) => {
                    self.rest = &self.rest[used..];
                    Ok(Nfa::from_word(&Word::one(l)))
                }
                None => Err(format!("cannot read a symbol at {:?}", self.rest)),
            }
        }
    }
}
