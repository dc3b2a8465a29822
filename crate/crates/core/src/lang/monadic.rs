//! Ancestor languages of context-free monadic rewriting systems.
//!
//! A rule `L → r` rewrites an occurrence of any word of the context-free
//! language `L` to `r`, where `r` is a single letter or the empty word. The
//! ancestors of a target language `T` are all words that rewrite into `T` in
//! finitely many steps. They form a context-free language again, built here
//! by mutual recursion:
//!
//! * `Z` generates the ancestors of ε: the empty word, or any word split as
//!   `z · u · z'` with `z, z' ∈ Z` and `u` an ancestor-image of a rule with
//!   empty right-hand side;
//! * `N_a` generates the ancestors of the letter `a`: `a` itself or an
//!   ancestor-image of a rule with right-hand side `a`, padded by `Z` on
//!   both sides;
//! * the target grammar is embedded with each terminal `a` replaced by
//!   `N_a`, padded by `Z`.
//!
//! An ancestor-image of a rule is its left-hand side grammar with every
//! terminal `b` replaced by `N_b`. Left-hand sides have the empty word
//! removed first: a rule `ε → r` would not be a rewriting step.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::vec;

use super::grammar::{Grammar, NtId, Symbol};
use crate::word::Letter;

/// One monadic rule: any word of `lhs` rewrites to `rhs` (`None` = ε).
#[derive(Clone, Debug)]
pub struct MonadicRule {
    pub lhs: Grammar,
    pub rhs: Option<Letter>,
}

/// The ancestors of `target` under `rules`.
pub fn ancestors(target: &Grammar, rules: &[MonadicRule]) -> Grammar {
    let mut universe: BTreeSet<Letter> = target.terminals().clone();
    for r in rules {
        universe.extend(r.lhs.terminals().iter().copied());
        universe.extend(r.rhs);
    }

    let mut g = Grammar::empty_language(universe.clone());
    let top = g.start();
    let z = g.fresh_nonterminal();
    let n_of: BTreeMap<Letter, NtId> = universe
        .iter()
        .map(|&l| (l, g.fresh_nonterminal()))
        .collect();

    let embed_retargeted = |g: &mut Grammar, inner: &Grammar| -> NtId {
        let from = g.n_nonterminals();
        let start = g.embed(inner);
        g.retarget_terminals(from, |b| n_of[&b]);
        start
    };

    g.add_production(z, vec![]);
    for rule in rules {
        if rule.rhs.is_none() {
            let s = embed_retargeted(&mut g, &rule.lhs.without_empty());
            g.add_production(z, vec![Symbol::N(z), Symbol::N(s), Symbol::N(z)]);
        }
    }
    for (&a, &na) in &n_of {
        let inner = g.fresh_nonterminal();
        g.add_production(na, vec![Symbol::N(z), Symbol::N(inner), Symbol::N(z)]);
        g.add_production(inner, vec![Symbol::T(a)]);
        for rule in rules {
            if rule.rhs == Some(a) {
                let s = embed_retargeted(&mut g, &rule.lhs.without_empty());
                g.add_production(inner, vec![Symbol::N(s)]);
            }
        }
    }

    let t = embed_retargeted(&mut g, target);
    g.add_production(top, vec![Symbol::N(z), Symbol::N(t), Symbol::N(z)]);
    g.reduced()
}
