//! Finite transducers and rational transductions of context-free languages.
//!
//! A transducer edge reads an input word and writes an output word. The
//! image of a context-free language under such a relation is context-free
//! again; the construction below mirrors the regular intersection: triple
//! nonterminals `(p, A, q)` generate the outputs of runs from `p` to `q`
//! that consume a yield of `A`, and right-linear nonterminals `E(p, q)`
//! generate the outputs of input-less paths.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use alloc::{vec};

use hashbrown::HashMap;

use super::grammar::{Grammar, NtId, Symbol};
use crate::word::{Letter, Word};

/// One transition: consume `input`, emit `output`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub from: usize,
    pub input: Word,
    pub output: Word,
    pub to: usize,
}

/// A finite transducer over word pairs.
#[derive(Clone, Debug)]
pub struct Transducer {
    n_states: usize,
    start: usize,
    finals: Vec<bool>,
    edges: Vec<Edge>,
}

impl Transducer {
    pub fn new(n_states: usize, start: usize) -> Transducer {
        Transducer {
            n_states,
            start,
            finals: vec![false; n_states],
            edges: Vec::new(),
        }
    }

    /// The letterwise map `l ↦ f(l)` as a one-state transducer.
    pub fn letter_map(domain: impl IntoIterator<Item = Letter>, f: impl Fn(Letter) -> Word) -> Transducer {
        let mut t = Transducer::new(1, 0);
        t.set_final(0);
        for l in domain {
            t.add_edge(0, Word::one(l), f(l), 0);
        }
        t
    }

    pub fn set_final(&mut self, q: usize) {
        self.finals[q] = true;
    }

    pub fn add_edge(&mut self, from: usize, input: Word, output: Word, to: usize) {
        self.edges.push(Edge {
            from,
            input,
            output,
            to,
        });
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The inverse relation: every edge swaps input and output.
    pub fn inverted(&self) -> Transducer {
        let mut t = self.clone();
        for e in t.edges.iter_mut() {
            core::mem::swap(&mut e.input, &mut e.output);
        }
        t
    }

    /// Split edges until every input has length at most one.
    fn normalized(&self) -> Transducer {
        let mut t = Transducer {
            n_states: self.n_states,
            start: self.start,
            finals: self.finals.clone(),
            edges: Vec::new(),
        };
        for e in &self.edges {
            if e.input.len() <= 1 {
                t.edges.push(e.clone());
                continue;
            }
            let letters: Vec<Letter> = e.input.letters().collect();
            let mut cur = e.from;
            for (i, &l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() {
                    e.to
                } else {
                    t.finals.push(false);
                    t.n_states += 1;
                    t.n_states - 1
                };
                let out = if i == 0 { e.output.clone() } else { Word::empty() };
                t.edges.push(Edge {
                    from: cur,
                    input: Word::one(l),
                    output: out,
                    to: next,
                });
                cur = next;
            }
        }
        t
    }

    /// The image `{ y : ∃x ∈ L(g), (x, y) ∈ T }`, as a grammar.
    pub fn image(&self, g: &Grammar) -> Grammar {
        let t = self.normalized();
        let cnf = g.to_cnf();
        let m = t.n_states;

        let mut terms_by_head: Vec<Vec<Letter>> = vec![Vec::new(); cnf.n];
        for &(a, l) in &cnf.term_prods {
            terms_by_head[a].push(l);
        }
        let mut bins_by_head: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cnf.n];
        for &(a, b, c) in &cnf.bin_prods {
            bins_by_head[a].push((b, c));
        }
        let mut eps_edges: Vec<Vec<(&Word, usize)>> = vec![Vec::new(); m];
        let mut letter_edges: Vec<Vec<(Letter, &Word, usize)>> = vec![Vec::new(); m];
        for e in &t.edges {
            match e.input.len() {
                0 => eps_edges[e.from].push((&e.output, e.to)),
                1 => letter_edges[e.from].push((e.input.0[0], &e.output, e.to)),
                _ => unreachable!("edges are normalized"),
            }
        }
        let mut terminals = BTreeSet::new();
        for e in &t.edges {
            terminals.extend(e.output.letters());
        }

        let mut out = Grammar::empty_language(terminals);
        let mut trip_ids: HashMap<(usize, usize, usize), NtId> = HashMap::new();
        let mut eps_ids: HashMap<(usize, usize), NtId> = HashMap::new();
        let mut trip_work: Vec<(usize, usize, usize)> = Vec::new();
        let mut eps_work: Vec<(usize, usize)> = Vec::new();

        fn need<K: core::hash::Hash + Eq + Copy>(
            g: &mut Grammar,
            ids: &mut HashMap<K, NtId>,
            work: &mut Vec<K>,
            key: K,
        ) -> NtId {
            *ids.entry(key).or_insert_with(|| {
                work.push(key);
                g.fresh_nonterminal()
            })
        }

        let s = out.start();
        for f in 0..m {
            if !t.finals[f] {
                continue;
            }
            let id = need(&mut out, &mut trip_ids, &mut trip_work, (t.start, cnf.start, f));
            out.add_production(s, vec![Symbol::N(id)]);
            if cnf.nullable {
                let id = need(&mut out, &mut eps_ids, &mut eps_work, (t.start, f));
                out.add_production(s, vec![Symbol::N(id)]);
            }
        }

        loop {
            if let Some((p, a, q)) = trip_work.pop() {
                let id = trip_ids[&(p, a, q)];
                for &l in &terms_by_head[a] {
                    for &(el, ref outw, to) in &letter_edges[p] {
                        if el != l {
                            continue;
                        }
                        let tail = need(&mut out, &mut eps_ids, &mut eps_work, (to, q));
                        let mut body: Vec<Symbol> =
                            outw.letters().map(Symbol::T).collect();
                        body.push(Symbol::N(tail));
                        out.add_production(id, body);
                    }
                }
                // Input-less prefix before the first consumed letter.
                for &(ref outw, to) in &eps_edges[p] {
                    let rest = need(&mut out, &mut trip_ids, &mut trip_work, (to, a, q));
                    let mut body: Vec<Symbol> = outw.letters().map(Symbol::T).collect();
                    body.push(Symbol::N(rest));
                    out.add_production(id, body);
                }
                for &(b, c) in &bins_by_head[a] {
                    for r in 0..m {
                        let left = need(&mut out, &mut trip_ids, &mut trip_work, (p, b, r));
                        let right = need(&mut out, &mut trip_ids, &mut trip_work, (r, c, q));
                        out.add_production(id, vec![Symbol::N(left), Symbol::N(right)]);
                    }
                }
                continue;
            }
            if let Some((p, q)) = eps_work.pop() {
                let id = eps_ids[&(p, q)];
                if p == q {
                    out.add_production(id, vec![]);
                }
                for &(ref outw, to) in &eps_edges[p] {
                    let rest = need(&mut out, &mut eps_ids, &mut eps_work, (to, q));
                    let mut body: Vec<Symbol> = outw.letters().map(Symbol::T).collect();
                    body.push(Symbol::N(rest));
                    out.add_production(id, body);
                }
                continue;
            }
            break;
        }
        out.reduced()
    }

    /// The preimage `{ x : ∃y ∈ L(g), (x, y) ∈ T }`.
    pub fn preimage(&self, g: &Grammar) -> Grammar {
        self.inverted().image(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::grammar::parse_grammar;

    fn w(s: &str) -> Word {
        Word::from_str_chars(s).unwrap()
    }

    fn dyck() -> Grammar {
        parse_grammar("start: S\nS -> 'b' S 'c' S |\n", false).unwrap()
    }

    fn words(items: &[&str]) -> Vec<Word> {
        items.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn erasing_image_of_dyck() {
        let erase_c = Transducer::letter_map(w("bc").letters(), |l| {
            if l == Letter::ch('c') {
                Word::empty()
            } else {
                Word::one(l)
            }
        });
        let image = erase_c.image(&dyck());
        assert_eq!(image.enumerate_upto(3), words(&["", "b", "bb", "bbb"]));
    }

    #[test]
    fn preimage_of_dyck_under_pair_substitution() {
        let map = Transducer::letter_map([Letter::ch('a')], |_| w("bc"));
        let pre = map.preimage(&dyck());
        assert_eq!(pre.enumerate_upto(3), words(&["", "a", "aa", "aaa"]));
    }

    #[test]
    fn multi_letter_inputs_are_normalized() {
        let mut t = Transducer::new(1, 0);
        t.set_final(0);
        t.add_edge(0, w("ab"), w("x"), 0);
        let image = t.image(&Grammar::single_word(&w("abab"), w("ab").letters().collect()));
        assert_eq!(image.enumerate_upto(4), words(&["xx"]));
        // ab must be consumed atomically: ba is not in the domain.
        let none = t.image(&Grammar::single_word(&w("ba"), w("ab").letters().collect()));
        assert!(none.is_empty());
    }

    #[test]
    fn two_state_marker_rewrite() {
        // x # y ↦ x y with the separator dropped.
        let hash = Letter::HASH;
        let mut t = Transducer::new(2, 0);
        t.set_final(1);
        for l in w("ab").letters() {
            t.add_edge(0, Word::one(l), Word::one(l), 0);
            t.add_edge(1, Word::one(l), Word::one(l), 1);
        }
        t.add_edge(0, Word::one(hash), Word::empty(), 1);
        let input = Grammar::single_word(
            &Word(vec![Letter::ch('a'), hash, Letter::ch('b')]),
            [Letter::ch('a'), Letter::ch('b'), hash].into_iter().collect(),
        );
        assert_eq!(t.image(&input).enumerate_upto(4), words(&["ab"]));
        // Words without exactly one separator have no image.
        let no_hash = Grammar::single_word(&w("ab"), [Letter::ch('a'), Letter::ch('b'), hash].into_iter().collect());
        assert!(t.image(&no_hash).is_empty());
    }
}
