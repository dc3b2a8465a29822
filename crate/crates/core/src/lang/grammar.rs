//! Context-free grammars and their closure operations.
//!
//! Grammars are plain data: interned nonterminal ids, per-nonterminal
//! production lists, and a declared terminal universe. Every combinator
//! returns a reduced grammar (useless nonterminals removed, structurally
//! identical ones merged), which keeps the deeply nested constructions of
//! the decision pipeline at a manageable size.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use hashbrown::HashMap;

use super::nfa::Nfa;
use crate::word::{scan_letter, Letter, Word};

pub type NtId = usize;

/// One symbol of a production body.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Symbol {
    T(Letter),
    N(NtId),
}

pub type Body = Vec<Symbol>;

/// A context-free grammar.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grammar {
    start: NtId,
    names: Vec<String>,
    productions: Vec<Vec<Body>>,
    terminals: BTreeSet<Letter>,
}

impl Grammar {
    /// The empty language over `terminals`: a start symbol with no
    /// productions.
    pub fn empty_language(terminals: BTreeSet<Letter>) -> Grammar {
        let mut g = Grammar {
            start: 0,
            names: Vec::new(),
            productions: Vec::new(),
            terminals,
        };
        g.start = g.fresh_nonterminal();
        g
    }

    /// The language `{w}`.
    pub fn single_word(w: &Word, terminals: BTreeSet<Letter>) -> Grammar {
        let mut g = Grammar::empty_language(terminals);
        g.add_production(g.start, w.letters().map(Symbol::T).collect());
        g
    }

    /// A finite language.
    pub fn finite(words: &[Word], terminals: BTreeSet<Letter>) -> Grammar {
        let mut g = Grammar::empty_language(terminals);
        for w in words {
            g.add_production(g.start, w.letters().map(Symbol::T).collect());
        }
        g.reduced()
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    pub fn set_start(&mut self, nt: NtId) {
        self.start = nt;
    }

    pub fn n_nonterminals(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, nt: NtId) -> &str {
        &self.names[nt]
    }

    pub fn productions(&self, nt: NtId) -> &[Body] {
        &self.productions[nt]
    }

    pub fn terminals(&self) -> &BTreeSet<Letter> {
        &self.terminals
    }

    pub fn add_terminals(&mut self, extra: impl IntoIterator<Item = Letter>) {
        self.terminals.extend(extra);
    }

    pub fn fresh_nonterminal(&mut self) -> NtId {
        let id = self.names.len();
        self.names.push(format!("N{}", id));
        self.productions.push(Vec::new());
        id
    }

    pub fn named_nonterminal(&mut self, name: &str) -> NtId {
        let id = self.names.len();
        self.names.push(String::from(name));
        self.productions.push(Vec::new());
        id
    }

    pub fn add_production(&mut self, nt: NtId, body: Body) {
        self.productions[nt].push(body);
    }

    /// Copy `other`'s nonterminals into `self`; returns `other`'s start as an
    /// id of `self`.
    pub fn embed(&mut self, other: &Grammar) -> NtId {
        let offset = self.names.len();
        for nt in 0..other.names.len() {
            self.fresh_nonterminal();
            for body in &other.productions[nt] {
                let shifted = body
                    .iter()
                    .map(|s| match s {
                        Symbol::T(l) => Symbol::T(*l),
                        Symbol::N(b) => Symbol::N(b + offset),
                    })
                    .collect();
                self.add_production(offset + nt, shifted);
            }
        }
        self.terminals.extend(other.terminals.iter().copied());
        offset + other.start
    }

    /// Replace every terminal in the productions of nonterminals `from..` by
    /// a nonterminal. Lets constructions tie an embedded grammar into
    /// surrounding recursion.
    pub(crate) fn retarget_terminals(&mut self, from: NtId, f: impl Fn(Letter) -> NtId) {
        for nt in from..self.productions.len() {
            for body in self.productions[nt].iter_mut() {
                for s in body.iter_mut() {
                    if let Symbol::T(l) = s {
                        *s = Symbol::N(f(*l));
                    }
                }
            }
        }
    }

    // ----- reduction -----------------------------------------------------

    fn productive_set(&self) -> Vec<bool> {
        let n = self.names.len();
        let mut productive = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for nt in 0..n {
                if productive[nt] {
                    continue;
                }
                let ok = self.productions[nt].iter().any(|body| {
                    body.iter().all(|s| match s {
                        Symbol::T(_) => true,
                        Symbol::N(b) => productive[*b],
                    })
                });
                if ok {
                    productive[nt] = true;
                    changed = true;
                }
            }
        }
        productive
    }

    /// Remove unproductive and unreachable nonterminals.
    pub fn trimmed(&self) -> Grammar {
        let productive = self.productive_set();
        let n = self.names.len();
        let mut reachable = vec![false; n];
        let mut stack = vec![self.start];
        reachable[self.start] = true;
        while let Some(nt) = stack.pop() {
            for body in &self.productions[nt] {
                if !body.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(b) => productive[*b],
                }) {
                    continue;
                }
                for s in body {
                    if let Symbol::N(b) = s {
                        if !reachable[*b] {
                            reachable[*b] = true;
                            stack.push(*b);
                        }
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut g = Grammar {
            start: 0,
            names: Vec::new(),
            productions: Vec::new(),
            terminals: self.terminals.clone(),
        };
        for nt in 0..n {
            if reachable[nt] {
                remap[nt] = g.fresh_nonterminal();
            }
        }
        for nt in 0..n {
            if !reachable[nt] {
                continue;
            }
            for body in &self.productions[nt] {
                if !body.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(b) => productive[*b],
                }) {
                    continue;
                }
                let mapped = body
                    .iter()
                    .map(|s| match s {
                        Symbol::T(l) => Symbol::T(*l),
                        Symbol::N(b) => Symbol::N(remap[*b]),
                    })
                    .collect();
                g.add_production(remap[nt], mapped);
            }
        }
        g.start = remap[self.start];
        g
    }

    /// Trim, then iteratively merge nonterminals with identical production
    /// sets. The result generates the same language.
    pub fn reduced(&self) -> Grammar {
        let mut g = self.trimmed();
        loop {
            for prods in g.productions.iter_mut() {
                prods.sort();
                prods.dedup();
            }
            let mut canon: HashMap<Vec<Body>, NtId> = HashMap::new();
            let mut rename: Vec<NtId> = (0..g.names.len()).collect();
            let mut any = false;
            for nt in 0..g.names.len() {
                match canon.entry(g.productions[nt].clone()) {
                    hashbrown::hash_map::Entry::Occupied(e) => {
                        rename[nt] = *e.get();
                        any = true;
                    }
                    hashbrown::hash_map::Entry::Vacant(e) => {
                        e.insert(nt);
                    }
                }
            }
            if !any {
                return g.trimmed();
            }
            for prods in g.productions.iter_mut() {
                for body in prods.iter_mut() {
                    for s in body.iter_mut() {
                        if let Symbol::N(b) = s {
                            *b = rename[*b];
                        }
                    }
                }
            }
            g.start = rename[g.start];
            g = g.trimmed();
        }
    }

    // ----- closure operations --------------------------------------------

    pub fn union(&self, other: &Grammar) -> Grammar {
        let mut g = Grammar::empty_language(BTreeSet::new());
        let a = g.embed(self);
        let b = g.embed(other);
        g.add_production(g.start, vec![Symbol::N(a)]);
        g.add_production(g.start, vec![Symbol::N(b)]);
        g.reduced()
    }

    pub fn concat(&self, other: &Grammar) -> Grammar {
        let mut g = Grammar::empty_language(BTreeSet::new());
        let a = g.embed(self);
        let b = g.embed(other);
        g.add_production(g.start, vec![Symbol::N(a), Symbol::N(b)]);
        g.reduced()
    }

    pub fn star(&self) -> Grammar {
        let mut g = Grammar::empty_language(BTreeSet::new());
        let a = g.embed(self);
        let s = g.start;
        g.add_production(s, vec![Symbol::N(a), Symbol::N(s)]);
        g.add_production(s, vec![]);
        g.reduced()
    }

    /// The mirror language `{ w^rev : w ∈ L }`.
    pub fn reversed(&self) -> Grammar {
        let mut g = self.clone();
        for prods in g.productions.iter_mut() {
            for body in prods.iter_mut() {
                body.reverse();
            }
        }
        g.reduced()
    }

    /// Apply the homomorphism `f` letterwise to the language.
    pub fn substitute_terminals(&self, f: impl Fn(Letter) -> Word) -> Grammar {
        let mut g = self.clone();
        let mut terminals = BTreeSet::new();
        for &l in &self.terminals {
            terminals.extend(f(l).letters());
        }
        for prods in g.productions.iter_mut() {
            for body in prods.iter_mut() {
                let mut next = Vec::new();
                for s in body.iter() {
                    match s {
                        Symbol::T(l) => next.extend(f(*l).letters().map(Symbol::T)),
                        Symbol::N(b) => next.push(Symbol::N(*b)),
                    }
                }
                *body = next;
            }
        }
        g.terminals = terminals;
        g.reduced()
    }

    /// Apply the finite substitution `f` letterwise: each terminal is
    /// replaced by any word from its (nonempty) image set, via one fresh
    /// nonterminal per substituted letter.
    pub fn substitute_terminals_finite(&self, f: impl Fn(Letter) -> Vec<Word>) -> Grammar {
        let mut g = self.clone();
        let originals: Vec<Letter> = self.terminals.iter().copied().collect();
        let mut terminals = BTreeSet::new();
        let mut image_nt = hashbrown::HashMap::new();
        for &l in &originals {
            let images = f(l);
            for w in &images {
                terminals.extend(w.letters());
            }
            let nt = g.fresh_nonterminal();
            for w in &images {
                g.add_production(nt, w.letters().map(Symbol::T).collect());
            }
            image_nt.insert(l, nt);
        }
        for nt in 0..self.n_nonterminals() {
            for body in g.productions[nt].iter_mut() {
                for s in body.iter_mut() {
                    if let Symbol::T(l) = *s {
                        *s = Symbol::N(image_nt[&l]);
                    }
                }
            }
        }
        g.terminals = terminals;
        g.reduced()
    }

    /// Intersect with `allowed*`: a production mentioning a banned terminal
    /// can never derive a word over `allowed`, so dropping those productions
    /// is exact.
    pub fn restrict_terminals(&self, allowed: &BTreeSet<Letter>) -> Grammar {
        let mut g = self.clone();
        for prods in g.productions.iter_mut() {
            prods.retain(|body| {
                body.iter().all(|s| match s {
                    Symbol::T(l) => allowed.contains(l),
                    Symbol::N(_) => true,
                })
            });
        }
        g.terminals = self.terminals.intersection(allowed).copied().collect();
        g.reduced()
    }

    /// The language minus the empty word.
    pub fn without_empty(&self) -> Grammar {
        let mut cnf = self.to_cnf();
        cnf.nullable = false;
        cnf.to_grammar()
    }

    /// Bar-Hillel intersection with a regular language.
    ///
    /// Works on the Chomsky normal form: a triple nonterminal `(p, A, q)`
    /// generates the yields of `A` that drive the automaton from `p` to `q`.
    /// Triples are created on demand from the start triples down.
    pub fn intersect_regular(&self, nfa: &Nfa) -> Grammar {
        let cnf = self.to_cnf();
        let m = nfa.n_states();
        let mut terms_by_head: Vec<Vec<Letter>> = vec![Vec::new(); cnf.n];
        for &(a, l) in &cnf.term_prods {
            terms_by_head[a].push(l);
        }
        let mut bins_by_head: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cnf.n];
        for &(a, b, c) in &cnf.bin_prods {
            bins_by_head[a].push((b, c));
        }

        let mut g = Grammar::empty_language(self.terminals.clone());
        let mut ids: HashMap<(usize, usize, usize), NtId> = HashMap::new();
        let mut work: Vec<(usize, usize, usize)> = Vec::new();
        let need = |g: &mut Grammar,
                        work: &mut Vec<(usize, usize, usize)>,
                        ids: &mut HashMap<(usize, usize, usize), NtId>,
                        key: (usize, usize, usize)| {
            *ids.entry(key).or_insert_with(|| {
                work.push(key);
                g.fresh_nonterminal()
            })
        };

        let s = g.start;
        for q in 0..m {
            if nfa.final_through_epsilon(q) {
                let id = need(&mut g, &mut work, &mut ids, (nfa.start(), cnf.start, q));
                g.add_production(s, vec![Symbol::N(id)]);
            }
        }
        if cnf.nullable && nfa.final_through_epsilon(nfa.start()) {
            g.add_production(s, vec![]);
        }

        while let Some((p, a, q)) = work.pop() {
            let id = ids[&(p, a, q)];
            for &l in &terms_by_head[a] {
                if nfa.letter_step(p, l).contains(&q) {
                    g.add_production(id, vec![Symbol::T(l)]);
                }
            }
            for &(b, c) in &bins_by_head[a] {
                for r in 0..m {
                    let left = need(&mut g, &mut work, &mut ids, (p, b, r));
                    let right = need(&mut g, &mut work, &mut ids, (r, c, q));
                    g.add_production(id, vec![Symbol::N(left), Symbol::N(right)]);
                }
            }
        }
        g.reduced()
    }

    // ----- decision procedures --------------------------------------------

    /// True when the language is empty.
    pub fn is_empty(&self) -> bool {
        !self.productive_set()[self.start]
    }

    /// A shortest member, or `None` for the empty language. Deterministic:
    /// ties break toward earlier productions.
    pub fn shortest_word(&self) -> Option<Word> {
        let n = self.names.len();
        let mut best: Vec<Option<usize>> = vec![None; n];
        let mut round: Vec<usize> = vec![0; n];
        let mut r = 0;
        loop {
            r += 1;
            // Jacobi update: each round reads the previous round's values, so
            // the body that settles a value only uses strictly earlier rounds.
            let prev = best.clone();
            let mut changed = false;
            for nt in 0..n {
                for body in &self.productions[nt] {
                    let mut sum = 0usize;
                    let mut ok = true;
                    for s in body {
                        match s {
                            Symbol::T(_) => sum += 1,
                            Symbol::N(b) => match prev[*b] {
                                Some(c) => sum += c,
                                None => {
                                    ok = false;
                                    break;
                                }
                            },
                        }
                    }
                    if ok && best[nt].map_or(true, |c| sum < c) {
                        best[nt] = Some(sum);
                        round[nt] = r;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        best[self.start]?;
        let mut out = Vec::new();
        self.expand_shortest(self.start, &best, &round, &mut out);
        Some(Word(out))
    }

    fn expand_shortest(
        &self,
        nt: NtId,
        best: &[Option<usize>],
        round: &[usize],
        out: &mut Vec<Letter>,
    ) {
        // A body realizing the minimum out of strictly earlier rounds exists:
        // the one that set the value. Recursing through it terminates.
        for body in &self.productions[nt] {
            let mut sum = 0usize;
            let mut ok = true;
            let mut newest = 0usize;
            for s in body {
                match s {
                    Symbol::T(_) => sum += 1,
                    Symbol::N(b) => match best[*b] {
                        Some(c) => {
                            sum += c;
                            newest = newest.max(round[*b]);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    },
                }
            }
            if ok && Some(sum) == best[nt] && newest < round[nt] {
                for s in body {
                    match s {
                        Symbol::T(l) => out.push(*l),
                        Symbol::N(b) => self.expand_shortest(*b, best, round, out),
                    }
                }
                return;
            }
        }
        unreachable!("a settling body exists for every valued nonterminal");
    }

    /// All members of length at most `maxlen`, shortest first, then in
    /// terminal order. Intended for desk-scale cross-checking.
    pub fn enumerate_upto(&self, maxlen: usize) -> Vec<Word> {
        let compiled = self.compile();
        let letters: Vec<Letter> = self.terminals.iter().copied().collect();
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        loop {
            let word: Word = cur.iter().map(|&i| letters[i]).collect();
            if compiled.contains(&word) {
                out.push(word);
            }
            let mut i = cur.len();
            loop {
                if i == 0 {
                    cur.push(0);
                    break;
                }
                if cur[i - 1] + 1 < letters.len() {
                    cur[i - 1] += 1;
                    break;
                }
                cur[i - 1] = 0;
                i -= 1;
            }
            if cur.len() > maxlen || (letters.is_empty() && !cur.is_empty()) {
                break;
            }
        }
        out
    }

    // ----- normal form -----------------------------------------------------

    /// Chomsky normal form, with the empty word tracked by a flag.
    pub fn to_cnf(&self) -> CnfGrammar {
        let g = self.trimmed();
        let mut bodies: Vec<Vec<Body>> = g.productions.clone();
        let n0 = bodies.len();

        // Fresh start so the start symbol never recurs on a right-hand side.
        let start = bodies.len();
        bodies.push(vec![vec![Symbol::N(g.start)]]);

        // TERM: lift terminals out of long bodies.
        let mut lift: HashMap<Letter, usize> = HashMap::new();
        for nt in 0..bodies.len() {
            for bi in 0..bodies[nt].len() {
                if bodies[nt][bi].len() < 2 {
                    continue;
                }
                for si in 0..bodies[nt][bi].len() {
                    if let Symbol::T(l) = bodies[nt][bi][si] {
                        let id = *lift.entry(l).or_insert_with(|| {
                            bodies.push(vec![vec![Symbol::T(l)]]);
                            bodies.len() - 1
                        });
                        bodies[nt][bi][si] = Symbol::N(id);
                    }
                }
            }
        }

        // BIN: split long bodies.
        for nt in 0..bodies.len() {
            let mut bi = 0;
            while bi < bodies[nt].len() {
                if bodies[nt][bi].len() > 2 {
                    let body = bodies[nt][bi].clone();
                    let mut tail = bodies.len();
                    bodies.push(vec![body[1..].to_vec()]);
                    bodies[nt][bi] = vec![body[0], Symbol::N(tail)];
                    while bodies[tail][0].len() > 2 {
                        let rest = bodies[tail][0][1..].to_vec();
                        let next = bodies.len();
                        bodies.push(vec![rest]);
                        bodies[tail][0] = vec![bodies[tail][0][0], Symbol::N(next)];
                        tail = next;
                    }
                }
                bi += 1;
            }
        }

        // DEL: compute nullable nonterminals; drop ε-bodies.
        let n = bodies.len();
        let mut nullable = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for nt in 0..n {
                if nullable[nt] {
                    continue;
                }
                if bodies[nt].iter().any(|b| {
                    b.iter().all(|s| match s {
                        Symbol::T(_) => false,
                        Symbol::N(x) => nullable[*x],
                    })
                }) {
                    nullable[nt] = true;
                    changed = true;
                }
            }
        }
        for nt in 0..n {
            let mut extra = Vec::new();
            for body in &bodies[nt] {
                if body.len() == 2 {
                    if let Symbol::N(x) = body[0] {
                        if nullable[x] {
                            extra.push(vec![body[1]]);
                        }
                    }
                    if let Symbol::N(y) = body[1] {
                        if nullable[y] {
                            extra.push(vec![body[0]]);
                        }
                    }
                }
            }
            bodies[nt].extend(extra);
            bodies[nt].retain(|b| !b.is_empty());
            bodies[nt].sort();
            bodies[nt].dedup();
        }

        // UNIT: replace unit chains by their non-unit productions.
        let unit_targets: Vec<Vec<usize>> = (0..n)
            .map(|nt| {
                let mut seen = vec![false; n];
                let mut stack = vec![nt];
                let mut out = Vec::new();
                seen[nt] = true;
                while let Some(x) = stack.pop() {
                    out.push(x);
                    for body in &bodies[x] {
                        if body.len() == 1 {
                            if let Symbol::N(y) = body[0] {
                                if !seen[y] {
                                    seen[y] = true;
                                    stack.push(y);
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();

        let mut term_prods = Vec::new();
        let mut bin_prods = Vec::new();
        for nt in 0..n {
            for &tgt in &unit_targets[nt] {
                for body in &bodies[tgt] {
                    match body.len() {
                        1 => {
                            if let Symbol::T(l) = body[0] {
                                term_prods.push((nt, l));
                            }
                        }
                        2 => {
                            let (Symbol::N(b), Symbol::N(c)) = (body[0], body[1]) else {
                                unreachable!("length-2 bodies are binarized");
                            };
                            bin_prods.push((nt, b, c));
                        }
                        _ => unreachable!("bodies are at most binary after BIN"),
                    }
                }
            }
        }
        term_prods.sort();
        term_prods.dedup();
        bin_prods.sort();
        bin_prods.dedup();

        let _ = n0;
        CnfGrammar {
            n,
            start,
            nullable: nullable[start],
            term_prods,
            bin_prods,
            terminals: g.terminals,
        }
    }

    /// Prepare the grammar for repeated membership queries.
    pub fn compile(&self) -> CompiledGrammar {
        self.to_cnf().compile()
    }
}

/// A grammar in Chomsky normal form: binary and terminal productions plus a
/// flag for the empty word.
#[derive(Clone, Debug)]
pub struct CnfGrammar {
    pub n: usize,
    pub start: usize,
    pub nullable: bool,
    pub term_prods: Vec<(usize, Letter)>,
    pub bin_prods: Vec<(usize, usize, usize)>,
    pub terminals: BTreeSet<Letter>,
}

impl CnfGrammar {
    /// Back to a plain grammar.
    pub fn to_grammar(&self) -> Grammar {
        let mut g = Grammar::empty_language(self.terminals.clone());
        for _ in 0..self.n {
            g.fresh_nonterminal();
        }
        // Nonterminal 0 of `g` is the fresh start; shift CNF ids by one.
        for &(a, l) in &self.term_prods {
            g.add_production(a + 1, vec![Symbol::T(l)]);
        }
        for &(a, b, c) in &self.bin_prods {
            g.add_production(a + 1, vec![Symbol::N(b + 1), Symbol::N(c + 1)]);
        }
        g.add_production(0, vec![Symbol::N(self.start + 1)]);
        if self.nullable {
            g.add_production(0, vec![]);
        }
        g.reduced()
    }

    /// Index productions for the bitset CYK recognizer.
    pub fn compile(&self) -> CompiledGrammar {
        let width = self.n.div_ceil(64).max(1);
        let mut term_masks: HashMap<Letter, Vec<u64>> = HashMap::new();
        for &(a, l) in &self.term_prods {
            let mask = term_masks.entry(l).or_insert_with(|| vec![0u64; width]);
            mask[a / 64] |= 1u64 << (a % 64);
        }
        let mut by_left: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.n];
        for &(a, b, c) in &self.bin_prods {
            by_left[b].push((c as u32, a as u32));
        }
        CompiledGrammar {
            nullable: self.nullable,
            start: self.start,
            width,
            term_masks,
            by_left,
        }
    }
}

/// CYK membership tables for one grammar.
pub struct CompiledGrammar {
    nullable: bool,
    start: usize,
    width: usize,
    term_masks: HashMap<Letter, Vec<u64>>,
    by_left: Vec<Vec<(u32, u32)>>,
}

impl CompiledGrammar {
    /// True when the grammar generates `w`.
    pub fn contains(&self, w: &Word) -> bool {
        let n = w.len();
        if n == 0 {
            return self.nullable;
        }
        let width = self.width;
        // cells[(len-1) layer][i] as one flat triangle of bitset rows.
        let offset = |len: usize| {
            let m = len - 1;
            m * n - m * m.saturating_sub(1) / 2
        };
        let mut cells = vec![0u64; (n * (n + 1) / 2) * width];
        for (i, l) in w.letters().enumerate() {
            match self.term_masks.get(&l) {
                Some(mask) => {
                    cells[(offset(1) + i) * width..][..width].copy_from_slice(mask)
                }
                None => return false,
            }
        }
        for len in 2..=n {
            for i in 0..=n - len {
                let dst = (offset(len) + i) * width;
                for k in 1..len {
                    let left = (offset(k) + i) * width;
                    let right = (offset(len - k) + i + k) * width;
                    for wj in 0..width {
                        let mut bits = cells[left + wj];
                        while bits != 0 {
                            let b = wj * 64 + bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            for &(c, a) in &self.by_left[b] {
                                let (c, a) = (c as usize, a as usize);
                                if cells[right + c / 64] >> (c % 64) & 1 == 1 {
                                    cells[dst + a / 64] |= 1u64 << (a % 64);
                                }
                            }
                        }
                    }
                }
            }
        }
        let top = (offset(n)) * width;
        cells[top + self.start / 64] >> (self.start % 64) & 1 == 1
    }
}

// ----- text format ----------------------------------------------------------

/// Strip a comment: `#` at line start or preceded by whitespace. A quoted
/// `'#'` terminal is always preceded by `'`, so it survives.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

fn valid_nt_name(tok: &str) -> bool {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse the grammar text format:
///
/// ```text
/// start: S
/// S -> 'b' S 'c' S |
/// ```
///
/// Terminals are quoted, nonterminals are bare identifiers, alternatives are
/// separated by `|`, and an empty alternative is the empty word. With
/// `units_names` set, quoted letters are read as group-of-units generators
/// (`'b1'`, `'b2'`, …) rather than raw characters.
pub fn parse_grammar(text: &str, units_names: bool) -> Result<Grammar, String> {
    let mut g = Grammar {
        start: 0,
        names: Vec::new(),
        productions: Vec::new(),
        terminals: BTreeSet::new(),
    };
    let mut ids: HashMap<String, NtId> = HashMap::new();
    let mut start_set = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("start:") {
            if start_set {
                return Err(format!("line {}: duplicate start: line", line_no));
            }
            let name = rest.trim();
            if !valid_nt_name(name) {
                return Err(format!("line {}: bad start symbol {:?}", line_no, name));
            }
            let id = *ids
                .entry(String::from(name))
                .or_insert_with(|| g.named_nonterminal(name));
            g.start = id;
            start_set = true;
            continue;
        }
        let Some((head, rest)) = line.split_once("->") else {
            return Err(format!("line {}: expected start: or a production", line_no));
        };
        let head = head.trim();
        if !valid_nt_name(head) {
            return Err(format!("line {}: bad nonterminal {:?}", line_no, head));
        }
        let head_id = *ids
            .entry(String::from(head))
            .or_insert_with(|| g.named_nonterminal(head));
        for alt in rest.split('|') {
            let mut body = Vec::new();
            for tok in alt.split_whitespace() {
                if let Some(inner) = tok.strip_prefix('\'') {
                    let Some(inner) = inner.strip_suffix('\'') else {
                        return Err(format!("line {}: unterminated quote {:?}", line_no, tok));
                    };
                    match scan_letter(inner, units_names) {
                        Some((l, used)) if used == inner.len() => {
                            g.terminals.insert(l);
                            body.push(Symbol::T(l));
                        }
                        _ => {
                            return Err(format!(
                                "line {}: cannot read terminal {:?}",
                                line_no, tok
                            ))
                        }
                    }
                } else if valid_nt_name(tok) {
                    let id = *ids
                        .entry(String::from(tok))
                        .or_insert_with(|| g.named_nonterminal(tok));
                    body.push(Symbol::N(id));
                } else {
                    return Err(format!("line {}: bad symbol {:?}", line_no, tok));
                }
            }
            g.add_production(head_id, body);
        }
    }
    if !start_set {
        return Err(String::from("missing start: line"));
    }
    Ok(g)
}

/// Serialize to the text format read by [`parse_grammar`].
pub fn serialize_grammar(g: &Grammar) -> String {
    let mut out = format!("start: {}\n", g.names[g.start]);
    for nt in 0..g.names.len() {
        if g.productions[nt].is_empty() {
            continue;
        }
        out.push_str(&g.names[nt]);
        out.push_str(" ->");
        for (bi, body) in g.productions[nt].iter().enumerate() {
            if bi > 0 {
                out.push_str(" |");
            }
            for s in body {
                match s {
                    Symbol::T(l) => out.push_str(&format!(" '{}'", l)),
                    Symbol::N(b) => out.push_str(&format!(" {}", g.names[*b])),
                }
            }
        }
        out.push('\n');
    }
    out
}
