//! Word-problem grammar synthesis.
//!
//! Starting from a normalized presentation, a piece set Δ with congruence
//! classes `B = {b_1, …, b_m}`, and a context-free word problem for the
//! group of units over `B`, this module synthesizes:
//!
//! * `Rep_B(t)`: the unit words equal to a target `t ∈ B ∪ {ε}`;
//! * `RepΔ(δ)`: their pullback through φ, words in Δ* equal to a piece;
//! * the monadic system `R_Δ` rewriting representatives to short targets;
//! * `Rep(δ) = ancestors(RepΔ(δ), R_Δ)`: all words equal to the piece δ;
//! * `InvP = {w₁ # w₂ʳᵉᵛ : w₁ =_M w₂, both invertible}` via marker symbols;
//! * `WP = {u # vʳᵉᵛ : u =_M v}` as ancestors of `#`;
//! * the invertible-word language and rational-subset membership, both as
//!   images of `WP` under erasing transductions.
//!
//! Equality queries then reduce to CYK membership in `WP`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::lang::{ancestors, CompiledGrammar, Grammar, MonadicRule, Nfa, Transducer};
use crate::oracle::SpecialRewritingSystem;
use crate::pieces::{
    compute_pieces, units_presentation, Certification, InvertibilityChecker, PieceData,
    PieceError, Ternary, UnitsPresentation,
};
use crate::presentation::SpecialPresentation;
use crate::word::{Letter, Word};

/// A group of units described structurally.
#[derive(Clone, Debug)]
pub enum UnitsBuilder {
    /// The trivial group: every unit word equals the identity.
    Trivial,
    /// A finite group as a multiplication table; `generator_elements` maps
    /// each unit generator to a table element.
    Finite {
        identity: usize,
        table: Vec<Vec<usize>>,
        generator_elements: Vec<usize>,
    },
    /// A free group whose unit generators pair up as formal inverses:
    /// `partner` is a fixed-point-free involution.
    Free { partner: Vec<usize> },
    /// A free product; the blocks partition the unit generators and each
    /// member builder is indexed relative to its own block.
    FreeProduct { members: Vec<(Vec<usize>, UnitsBuilder)> },
}

/// The word problem of the group of units, as supplied by the user.
#[derive(Clone, Debug)]
pub enum UnitsWpSpec {
    /// A grammar over `b_1, …, b_m, #` accepting `x # yʳᵉᵛ` iff `x =_U y`.
    /// Trusted as declared.
    Explicit(Grammar),
    Builder(UnitsBuilder),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UnitsError {
    /// The spec describes a different number of generators than there are
    /// piece classes.
    Arity { expected: usize, got: usize },
    NotAGroupTable(String),
    BadPairing(String),
    BadBlocks(String),
    /// `b·ι(b)` failed the identity-language check.
    InverseCheck { unit: usize },
    /// An explicit grammar uses letters outside `B ∪ {#}`.
    ExplicitAlphabet(String),
    /// A relator image `φ(w_i)` is not the identity of the supplied group.
    Inconsistent { relator: usize },
}

impl core::fmt::Display for UnitsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            UnitsError::Arity { expected, got } => {
                write!(f, "units spec has {} generators, presentation has {} piece classes", got, expected)
            }
            UnitsError::NotAGroupTable(m) => write!(f, "multiplication table is not a group: {}", m),
            UnitsError::BadPairing(m) => write!(f, "inverse pairing is not a fixed-point-free involution: {}", m),
            UnitsError::BadBlocks(m) => write!(f, "free-product blocks do not partition the generators: {}", m),
            UnitsError::InverseCheck { unit } => {
                write!(f, "b{}·ι(b{}) is not in the identity language", unit + 1, unit + 1)
            }
            UnitsError::ExplicitAlphabet(m) => write!(f, "explicit grammar alphabet: {}", m),
            UnitsError::Inconsistent { relator } => {
                write!(f, "relator {} does not map to the identity of the supplied group of units", relator + 1)
            }
        }
    }
}

impl UnitsBuilder {
    /// The identity language over `letters` plus the formal inverse word of
    /// each generator.
    fn identity_and_inverses(
        &self,
        letters: &[Letter],
    ) -> Result<(Grammar, Vec<Word>), UnitsError> {
        let terminals: BTreeSet<Letter> = letters.iter().copied().collect();
        match self {
            UnitsBuilder::Trivial => {
                let singles: Vec<Word> = letters.iter().map(|&l| Word::one(l)).collect();
                let id = Grammar::finite(&singles, terminals).star();
                // ι(b) = ε: in the trivial group b·ε is the identity.
                Ok((id, vec![Word::empty(); letters.len()]))
            }
            UnitsBuilder::Finite {
                identity,
                table,
                generator_elements,
            } => {
                if generator_elements.len() != letters.len() {
                    return Err(UnitsError::Arity {
                        expected: letters.len(),
                        got: generator_elements.len(),
                    });
                }
                validate_group_table(*identity, table)?;
                for &g in generator_elements {
                    if g >= table.len() {
                        return Err(UnitsError::NotAGroupTable(format!(
                            "generator element {} out of range",
                            g
                        )));
                    }
                }
                let id = finite_identity_grammar(*identity, table, generator_elements, letters);
                let iota =
                    finite_inverses(*identity, table, generator_elements, letters)?;
                Ok((id, iota))
            }
            UnitsBuilder::Free { partner } => {
                if partner.len() != letters.len() {
                    return Err(UnitsError::Arity {
                        expected: letters.len(),
                        got: partner.len(),
                    });
                }
                for (i, &j) in partner.iter().enumerate() {
                    if j >= partner.len() || partner[j] != i || j == i {
                        return Err(UnitsError::BadPairing(format!(
                            "generator {} pairs with {}",
                            i + 1,
                            j + 1
                        )));
                    }
                }
                let rules: Vec<MonadicRule> = (0..letters.len())
                    .map(|i| {
                        let w = Word(vec![letters[i], letters[partner[i]]]);
                        MonadicRule {
                            lhs: Grammar::single_word(&w, terminals.clone()),
                            rhs: None,
                        }
                    })
                    .collect();
                let id = ancestors(&Grammar::single_word(&Word::empty(), terminals), &rules);
                let iota = partner.iter().map(|&j| Word::one(letters[j])).collect();
                Ok((id, iota))
            }
            UnitsBuilder::FreeProduct { members } => {
                let mut seen = vec![false; letters.len()];
                for (block, _) in members {
                    for &i in block {
                        if i >= letters.len() || seen[i] {
                            return Err(UnitsError::BadBlocks(format!(
                                "generator {} repeated or out of range",
                                i + 1
                            )));
                        }
                        seen[i] = true;
                    }
                }
                if !seen.iter().all(|&s| s) {
                    return Err(UnitsError::BadBlocks("not all generators covered".into()));
                }
                let mut iota = vec![Word::empty(); letters.len()];
                let mut rules = Vec::new();
                for (block, builder) in members {
                    let block_letters: Vec<Letter> =
                        block.iter().map(|&i| letters[i]).collect();
                    let (member_id, member_iota) =
                        builder.identity_and_inverses(&block_letters)?;
                    // Free-product normal form: a word is trivial iff it
                    // vanishes by repeatedly deleting nonempty one-factor
                    // identities.
                    rules.push(MonadicRule {
                        lhs: member_id.without_empty(),
                        rhs: None,
                    });
                    for (local, &global) in block.iter().enumerate() {
                        iota[global] = member_iota[local].clone();
                    }
                }
                let id = ancestors(&Grammar::single_word(&Word::empty(), terminals), &rules);
                Ok((id, iota))
            }
        }
    }
}

fn validate_group_table(identity: usize, table: &[Vec<usize>]) -> Result<(), UnitsError> {
    let n = table.len();
    let bad = |m: String| Err(UnitsError::NotAGroupTable(m));
    if n == 0 {
        return bad("empty table".into());
    }
    if identity >= n {
        return bad(format!("identity {} out of range", identity));
    }
    for (x, row) in table.iter().enumerate() {
        if row.len() != n {
            return bad(format!("row {} has length {}", x, row.len()));
        }
        if row.iter().any(|&e| e >= n) {
            return bad(format!("row {} has an entry out of range", x));
        }
    }
    for x in 0..n {
        if table[identity][x] != x || table[x][identity] != x {
            return bad(format!("{} is not an identity", identity));
        }
    }
    for x in 0..n {
        if !(0..n).any(|y| table[x][y] == identity && table[y][x] == identity) {
            return bad(format!("element {} has no inverse", x));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if table[table[x][y]][z] != table[x][table[y][z]] {
                    return bad(format!("({}·{})·{} breaks associativity", x, y, z));
                }
            }
        }
    }
    Ok(())
}

/// Right-linear grammar tracking the group element of the prefix read so
/// far; accept when the whole word evaluates to the identity.
fn finite_identity_grammar(
    identity: usize,
    table: &[Vec<usize>],
    generator_elements: &[usize],
    letters: &[Letter],
) -> Grammar {
    use crate::lang::Symbol;
    let terminals: BTreeSet<Letter> = letters.iter().copied().collect();
    let mut g = Grammar::empty_language(terminals);
    let states: Vec<_> = (0..table.len())
        .map(|s| {
            if s == identity {
                g.start()
            } else {
                g.fresh_nonterminal()
            }
        })
        .collect();
    for s in 0..table.len() {
        for (i, &l) in letters.iter().enumerate() {
            let next = table[s][generator_elements[i]];
            g.add_production(states[s], vec![Symbol::T(l), Symbol::N(states[next])]);
        }
    }
    g.add_production(states[identity], Vec::new());
    g.reduced()
}

/// Shortest generator word evaluating to the inverse of each generator,
/// found by breadth-first search over the subgroup the generators reach.
fn finite_inverses(
    identity: usize,
    table: &[Vec<usize>],
    generator_elements: &[usize],
    letters: &[Letter],
) -> Result<Vec<Word>, UnitsError> {
    let n = table.len();
    let mut word: Vec<Option<Word>> = vec![None; n];
    word[identity] = Some(Word::empty());
    let mut queue = vec![identity];
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head];
        head += 1;
        for (i, &g) in generator_elements.iter().enumerate() {
            let t = table[s][g];
            if word[t].is_none() {
                word[t] = Some(word[s].clone().unwrap().concat(&Word::one(letters[i])));
                queue.push(t);
            }
        }
    }
    generator_elements
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let inv = (0..n)
                .find(|&y| table[g][y] == identity)
                .expect("validated table has inverses");
            word[inv].clone().ok_or(UnitsError::InverseCheck { unit: i })
        })
        .collect()
}

/// `WP = {x # yʳᵉᵛ : x =_U y}` from the identity language: a two-state
/// transducer copies letters before `#`, erases `#`, and maps each letter
/// `b` after it to `ι(b)`; then `x # yʳᵉᵛ` lands in `Id` iff `x·y⁻¹ =_U 1`.
fn wp_from_identity(id: &Grammar, letters: &[Letter], iota: &[Word]) -> Grammar {
    let mut t = Transducer::new(2, 0);
    for (i, &b) in letters.iter().enumerate() {
        t.add_edge(0, Word::one(b), Word::one(b), 0);
        t.add_edge(1, Word::one(b), iota[i].clone(), 1);
    }
    t.add_edge(0, Word::one(Letter::HASH), Word::empty(), 1);
    t.set_final(1);
    t.preimage(id).reduced()
}

/// Build (or pass through) the word problem of the group of units over
/// `class_count` generators.
pub fn units_wp_grammar(spec: &UnitsWpSpec, class_count: usize) -> Result<Grammar, UnitsError> {
    let letters: Vec<Letter> = (0..class_count).map(|i| Letter::unit(i as u32)).collect();
    match spec {
        UnitsWpSpec::Explicit(g) => {
            let mut allowed: BTreeSet<Letter> = letters.iter().copied().collect();
            allowed.insert(Letter::HASH);
            if let Some(l) = g.terminals().iter().find(|l| !allowed.contains(l)) {
                return Err(UnitsError::ExplicitAlphabet(format!(
                    "letter {} is not among b1..b{} or #",
                    l, class_count
                )));
            }
            Ok(g.clone())
        }
        UnitsWpSpec::Builder(b) => {
            let (id, iota) = b.identity_and_inverses(&letters)?;
            let compiled = id.compile();
            for (i, &bl) in letters.iter().enumerate() {
                if !compiled.contains(&Word::one(bl).concat(&iota[i])) {
                    return Err(UnitsError::InverseCheck { unit: i });
                }
            }
            Ok(wp_from_identity(&id, &letters, &iota))
        }
    }
}

/// Transducer keeping the prefix before the single `#` and erasing the rest.
fn keep_before_hash(alphabet: &[Letter]) -> Transducer {
    let mut t = Transducer::new(2, 0);
    for &a in alphabet {
        t.add_edge(0, Word::one(a), Word::one(a), 0);
        t.add_edge(1, Word::one(a), Word::empty(), 1);
    }
    t.add_edge(0, Word::one(Letter::HASH), Word::empty(), 1);
    t.set_final(1);
    t
}

/// `Rep_B(target) = {u : u =_U target}`: intersect the units word problem
/// with `B* # target` and erase the marked suffix.
pub fn rep_units(units_wp: &Grammar, letters: &[Letter], target: Option<Letter>) -> Grammar {
    let mut pat = Nfa::all_over(letters.iter().copied())
        .concat(&Nfa::from_word(&Word::one(Letter::HASH)));
    if let Some(t) = target {
        pat = pat.concat(&Nfa::from_word(&Word::one(t)));
    }
    let g = units_wp.intersect_regular(&pat);
    keep_before_hash(letters).image(&g).reduced()
}

/// `RepΔ = φ⁻¹(Rep_B)`: replace each abstract generator by the finite set
/// of pieces in its class. Exact because Δ is a biprefix code.
fn pull_back_through_phi(rep_b: &Grammar, data: &PieceData, units: &UnitsPresentation) -> Grammar {
    rep_b.substitute_terminals_finite(|l| {
        let class = l.as_unit().expect("Rep_B is a language over B") as usize;
        data.pieces
            .iter()
            .zip(&units.piece_class)
            .filter(|(_, &c)| c == class)
            .map(|(piece, _)| piece.clone())
            .collect()
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PipelineError {
    Pieces(PieceError),
    /// Some piece properly contains a product of pieces of length ≥ 2;
    /// normalize the presentation first.
    NotNormalized,
    Units(UnitsError),
    /// A query word uses letters outside the presentation alphabet.
    ForeignLetters { word: Word },
}

impl core::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PipelineError::Pieces(e) => write!(f, "{}", e),
            PipelineError::NotNormalized => write!(
                f,
                "a piece properly contains a product of pieces; normalize the presentation first"
            ),
            PipelineError::Units(e) => write!(f, "{}", e),
            PipelineError::ForeignLetters { word } => {
                write!(f, "{} uses letters outside the presentation alphabet", word)
            }
        }
    }
}

/// The two query grammars with their CYK tables, separated from the full
/// artifact bundle so they can be rebuilt from serialized grammars alone.
pub struct WpQueries {
    alphabet: Vec<Letter>,
    wp: Grammar,
    invertible: Grammar,
    compiled_wp: CompiledGrammar,
    compiled_invertible: CompiledGrammar,
}

impl WpQueries {
    pub fn new(alphabet: Vec<Letter>, wp: Grammar, invertible: Grammar) -> WpQueries {
        let compiled_wp = wp.compile();
        let compiled_invertible = invertible.compile();
        WpQueries {
            alphabet,
            wp,
            invertible,
            compiled_wp,
            compiled_invertible,
        }
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn wp(&self) -> &Grammar {
        &self.wp
    }

    pub fn invertible_language(&self) -> &Grammar {
        &self.invertible
    }

    fn check_alphabet(&self, w: &Word) -> Result<(), PipelineError> {
        if w.letters().all(|l| self.alphabet.contains(&l)) {
            Ok(())
        } else {
            Err(PipelineError::ForeignLetters { word: w.clone() })
        }
    }

    /// Does `u =_M v`?
    pub fn decide(&self, u: &Word, v: &Word) -> Result<bool, PipelineError> {
        self.check_alphabet(u)?;
        self.check_alphabet(v)?;
        let w = u.concat(&Word::one(Letter::HASH)).concat(&v.reversed());
        Ok(self.compiled_wp.contains(&w))
    }

    /// The congruence class of `w` as a grammar over the alphabet.
    pub fn rep_word_grammar(&self, w: &Word) -> Result<Grammar, PipelineError> {
        self.check_alphabet(w)?;
        Ok(self.rational_subset_grammar(&Nfa::from_word(w)))
    }

    /// Is `w` an invertible element?
    pub fn is_invertible(&self, w: &Word) -> Result<bool, PipelineError> {
        self.check_alphabet(w)?;
        Ok(self.compiled_invertible.contains(w))
    }

    /// Does `w` equal some element of the rational subset recognized by
    /// `k`? The answer grammar is the congruence saturation of `k`.
    pub fn rational_member(&self, w: &Word, k: &Nfa) -> Result<bool, PipelineError> {
        self.check_alphabet(w)?;
        let g = self.rational_subset_grammar(k);
        Ok(g.compile().contains(w))
    }

    /// The congruence saturation of the regular language of `k`.
    pub fn rational_subset_grammar(&self, k: &Nfa) -> Grammar {
        let pat = Nfa::all_over(self.alphabet.iter().copied())
            .concat(&Nfa::from_word(&Word::one(Letter::HASH)))
            .concat(&k.reversed());
        keep_before_hash(&self.alphabet)
            .image(&self.wp.intersect_regular(&pat))
            .reduced()
    }
}

/// Every grammar synthesized for one presentation and units spec.
pub struct PipelineArtifacts {
    pub presentation: SpecialPresentation,
    pub pieces: PieceData,
    pub units: UnitsPresentation,
    /// `WP_B^U` over `b_1..b_m, #`.
    pub units_wp: Grammar,
    /// `Rep_B(ε)` and `Rep_B(b)` per class.
    pub rep_units_eps: Grammar,
    pub rep_units: Vec<Grammar>,
    /// `RepΔ(ε)` and `RepΔ(δ)` per piece, over the presentation alphabet.
    pub rep_delta_eps: Grammar,
    pub rep_delta: Vec<Grammar>,
    /// The monadic system `R_Δ`.
    pub r_delta: Vec<MonadicRule>,
    /// `Rep(δ) = ancestors(RepΔ(δ), R_Δ)` per piece.
    pub rep_piece: Vec<Grammar>,
    /// Marker pair (♥_δ, ♥̃_δ) per piece.
    pub hearts: Vec<(Letter, Letter)>,
    /// `InvP = {w₁ # w₂ʳᵉᵛ : w₁ =_M w₂, both invertible}`.
    pub invp: Grammar,
    /// `WP = {u # vʳᵉᵛ : u =_M v}`.
    pub wp: Grammar,
    /// The invertible words: the congruence saturation of Δ*.
    pub invertible_language: Grammar,
    pub certification: Certification,
    queries: WpQueries,
}

/// Synthesize every grammar for `p` under the given units spec.
pub fn synthesize(
    p: &SpecialPresentation,
    spec: &UnitsWpSpec,
) -> Result<PipelineArtifacts, PipelineError> {
    let data = compute_pieces(p).map_err(PipelineError::Pieces)?;
    if !data.is_normalized() {
        return Err(PipelineError::NotNormalized);
    }
    let units = units_presentation(p, &data);
    let units_wp =
        units_wp_grammar(spec, units.class_count).map_err(PipelineError::Units)?;

    // Trust boundary: every relator image φ(w_i) must be the identity of
    // the supplied group.
    let compiled_units = units_wp.compile();
    for (i, image) in units.relator_images.iter().enumerate() {
        let mut w: Vec<Letter> = image.iter().map(|&c| Letter::unit(c as u32)).collect();
        w.push(Letter::HASH);
        if !compiled_units.contains(&Word(w)) {
            return Err(PipelineError::Units(UnitsError::Inconsistent { relator: i }));
        }
    }

    let unit_letters: Vec<Letter> = (0..units.class_count)
        .map(|i| Letter::unit(i as u32))
        .collect();
    let rep_units_eps = rep_units(&units_wp, &unit_letters, None);
    let rep_units_cls: Vec<Grammar> = (0..units.class_count)
        .map(|c| rep_units(&units_wp, &unit_letters, Some(unit_letters[c])))
        .collect();
    let rep_delta_eps = pull_back_through_phi(&rep_units_eps, &data, &units);
    let rep_delta: Vec<Grammar> = (0..data.pieces.len())
        .map(|i| pull_back_through_phi(&rep_units_cls[units.piece_class[i]], &data, &units))
        .collect();

    // R_Δ: representatives of the short targets p ∈ Δ ∪ {ε}, |p| ≤ 1,
    // rewrite to the target; the target itself and ε are excluded from
    // each left-hand side.
    let alphabet_set: BTreeSet<Letter> = p.alphabet.iter().copied().collect();
    let mut r_delta = vec![MonadicRule {
        lhs: rep_delta_eps.without_empty(),
        rhs: None,
    }];
    for (i, piece) in data.pieces.iter().enumerate() {
        if piece.len() == 1 {
            let keep = Nfa::from_words(&[piece.clone(), Word::empty()]).complement(&alphabet_set);
            r_delta.push(MonadicRule {
                lhs: rep_delta[i].intersect_regular(&keep),
                rhs: Some(piece.0[0]),
            });
        }
    }

    let rep_piece: Vec<Grammar> = rep_delta
        .iter()
        .map(|g| ancestors(g, &r_delta))
        .collect();

    // InvP: mark each invertible factor. T fixes the allowed marker words
    // through the units word problem, then markers expand to
    // representatives (reversed on the right of #). A representative ε is
    // redundant: dropping the marker maps to the same units class.
    let hearts: Vec<(Letter, Letter)> = (0..data.pieces.len())
        .map(|i| (Letter::heart(i as u32), Letter::heart_tilde(i as u32)))
        .collect();
    let mut marker_domain: Vec<Letter> = Vec::new();
    for &(h, ht) in &hearts {
        marker_domain.push(h);
        marker_domain.push(ht);
    }
    marker_domain.push(Letter::HASH);
    let piece_class = units.piece_class.clone();
    let rho = Transducer::letter_map(marker_domain, move |l| {
        let class = l
            .heart_index()
            .or_else(|| l.heart_tilde_index())
            .map(|i| piece_class[i as usize]);
        match class {
            Some(c) => Word::one(Letter::unit(c as u32)),
            None => Word::one(Letter::HASH),
        }
    });
    let t_pattern = Nfa::all_over(hearts.iter().map(|&(h, _)| h))
        .concat(&Nfa::from_word(&Word::one(Letter::HASH)))
        .concat(&Nfa::all_over(hearts.iter().map(|&(_, ht)| ht)));
    let t_language = rho.preimage(&units_wp).intersect_regular(&t_pattern);
    let mut invp_rules = Vec::new();
    for (i, &(h, ht)) in hearts.iter().enumerate() {
        invp_rules.push(MonadicRule {
            lhs: rep_piece[i].without_empty(),
            rhs: Some(h),
        });
        invp_rules.push(MonadicRule {
            lhs: rep_piece[i].reversed().without_empty(),
            rhs: Some(ht),
        });
    }
    let mut word_alphabet = alphabet_set.clone();
    word_alphabet.insert(Letter::HASH);
    let invp = ancestors(&t_language, &invp_rules).restrict_terminals(&word_alphabet);

    // WP: invertible equal pairs collapse to #, and matching outer letters
    // strip one at a time. The single word # is excluded from the InvP
    // rule: # → # is no rewriting step.
    let hash = Word::one(Letter::HASH);
    let not_hash = Nfa::from_word(&hash).complement(&word_alphabet);
    let mut wp_rules = vec![MonadicRule {
        lhs: invp.intersect_regular(&not_hash),
        rhs: Some(Letter::HASH),
    }];
    for &a in &p.alphabet {
        wp_rules.push(MonadicRule {
            lhs: Grammar::single_word(&Word(vec![a, Letter::HASH, a]), word_alphabet.clone()),
            rhs: Some(Letter::HASH),
        });
    }
    let wp = ancestors(&Grammar::single_word(&hash, word_alphabet), &wp_rules);

    // Invertible words: everything congruent to a product of pieces.
    let delta_rev: Vec<Word> = data.pieces.iter().map(|d| d.reversed()).collect();
    let invertible_pattern = Nfa::all_over(p.alphabet.iter().copied())
        .concat(&Nfa::from_word(&hash))
        .concat(&Nfa::from_words(&delta_rev).star());
    let invertible_language = keep_before_hash(&p.alphabet)
        .image(&wp.intersect_regular(&invertible_pattern))
        .reduced();

    let queries = WpQueries::new(p.alphabet.clone(), wp.clone(), invertible_language.clone());
    let certification = match (data.certification, units.certification) {
        (Certification::Certified, Certification::Certified) => Certification::Certified,
        _ => Certification::BudgetLimited,
    };
    Ok(PipelineArtifacts {
        presentation: p.clone(),
        pieces: data,
        units,
        units_wp,
        rep_units_eps,
        rep_units: rep_units_cls,
        rep_delta_eps,
        rep_delta,
        r_delta,
        rep_piece,
        hearts,
        invp,
        wp,
        invertible_language,
        certification,
        queries,
    })
}

impl PipelineArtifacts {
    pub fn queries(&self) -> &WpQueries {
        &self.queries
    }

    /// Does `u =_M v`?
    pub fn decide(&self, u: &Word, v: &Word) -> Result<bool, PipelineError> {
        self.queries.decide(u, v)
    }

    /// The congruence class of `w` as a grammar over the alphabet.
    pub fn rep_word_grammar(&self, w: &Word) -> Result<Grammar, PipelineError> {
        self.queries.rep_word_grammar(w)
    }

    /// Is `w` an invertible element?
    pub fn is_invertible(&self, w: &Word) -> Result<bool, PipelineError> {
        self.queries.is_invertible(w)
    }

    /// Does `w` equal some element of the rational subset recognized by
    /// `k`? The answer grammar is the congruence saturation of `k`.
    pub fn rational_member(&self, w: &Word, k: &Nfa) -> Result<bool, PipelineError> {
        self.queries.rational_member(w, k)
    }

    /// The congruence saturation of the regular language of `k`.
    pub fn rational_subset_grammar(&self, k: &Nfa) -> Grammar {
        self.queries.rational_subset_grammar(k)
    }
}

/// Diagnostic classification: the word problem is a regular language iff
/// the monoid is a finite group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classification {
    FiniteGroup { element_count: usize },
    NotFiniteGroup { witness: NotFiniteWitness },
    Unknown,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NotFiniteWitness {
    /// This generator is certified non-invertible, so M is no group.
    NonInvertibleGenerator(Letter),
    /// An irreducible word with a pumpable cycle: infinitely many elements.
    Growth(Word),
}

/// Classify whether M is a finite group. Exact under confluence: the
/// elements are the irreducible words, and their automaton is finite or
/// pumps. Without confluence only the absent-generator certificate applies.
pub fn classify_regular(p: &SpecialPresentation) -> Classification {
    // A generator occurring in no relator can never be cancelled.
    for &a in &p.alphabet {
        if p.relators.iter().all(|r| r.word.letters().all(|l| l != a)) {
            return Classification::NotFiniteGroup {
                witness: NotFiniteWitness::NonInvertibleGenerator(a),
            };
        }
    }
    let sys = SpecialRewritingSystem::from_presentation(p);
    if !sys.is_confluent() {
        return Classification::Unknown;
    }
    let checker = InvertibilityChecker::new(p, &sys);
    for &a in &p.alphabet {
        match checker.invertible(&Word::one(a)) {
            Ternary::Yes => {}
            Ternary::No => {
                return Classification::NotFiniteGroup {
                    witness: NotFiniteWitness::NonInvertibleGenerator(a),
                }
            }
            Ternary::Unknown => return Classification::Unknown,
        }
    }
    // All generators invertible: M is a group iff it is finite, and its
    // elements are exactly the irreducible words.
    let alphabet_set: BTreeSet<Letter> = p.alphabet.iter().copied().collect();
    let any = Nfa::all_over(p.alphabet.iter().copied());
    let mut reducible = Nfa::nothing();
    for r in &p.relators {
        if !r.word.is_empty() {
            reducible = reducible.union(&any.concat(&Nfa::from_word(&r.word)).concat(&any));
        }
    }
    let irreducible = reducible.complement(&alphabet_set);
    match count_or_growth(&irreducible) {
        Ok(count) => Classification::FiniteGroup {
            element_count: count,
        },
        Err(witness) => Classification::NotFiniteGroup {
            witness: NotFiniteWitness::Growth(witness),
        },
    }
}

/// For an ε-free automaton: the number of accepted words if finite, else a
/// pumpable accepted word as witness.
fn count_or_growth(dfa: &Nfa) -> Result<usize, Word> {
    let n = dfa.n_states();
    let mut edges: Vec<Vec<(Letter, usize)>> = vec![Vec::new(); n];
    for q in 0..n {
        for (l, t) in dfa.edges_from(q) {
            let l = l.expect("subset-constructed automaton has no epsilon edges");
            edges[q].push((l, t));
        }
    }
    // Live states: reachable from the start and reaching a final state.
    let mut reachable = vec![false; n];
    let mut stack = vec![dfa.start()];
    reachable[dfa.start()] = true;
    while let Some(q) = stack.pop() {
        for &(_, t) in &edges[q] {
            if !reachable[t] {
                reachable[t] = true;
                stack.push(t);
            }
        }
    }
    let mut productive = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&q| dfa.is_final(q)).collect();
    for &q in &stack {
        productive[q] = true;
    }
    let mut back: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in 0..n {
        for &(_, t) in &edges[q] {
            back[t].push(q);
        }
    }
    while let Some(q) = stack.pop() {
        for &s in &back[q] {
            if !productive[s] {
                productive[s] = true;
                stack.push(s);
            }
        }
    }
    let live = |q: usize| reachable[q] && productive[q];

    // Cycle detection over live states, remembering one tree path.
    let mut color = vec![0u8; n]; // 0 white, 1 on stack, 2 done
    let mut parent: Vec<Option<(usize, Letter)>> = vec![None; n];
    let mut cycle: Option<(usize, usize, Letter)> = None; // (from, to, letter)
    if live(dfa.start()) {
        let mut stack: Vec<(usize, usize)> = vec![(dfa.start(), 0)];
        color[dfa.start()] = 1;
        'dfs: while let Some(&mut (q, ref mut next)) = stack.last_mut() {
            while *next < edges[q].len() {
                let (l, t) = edges[q][*next];
                *next += 1;
                if !live(t) {
                    continue;
                }
                match color[t] {
                    0 => {
                        color[t] = 1;
                        parent[t] = Some((q, l));
                        stack.push((t, 0));
                        continue 'dfs;
                    }
                    1 => {
                        cycle = Some((q, t, l));
                        break 'dfs;
                    }
                    _ => {}
                }
            }
            color[q] = 2;
            stack.pop();
        }
    }

    if let Some((from, to, letter)) = cycle {
        // Path start → to, the cycle to → … → from → to once, then any
        // path to a final state.
        let path_to = |mut q: usize| {
            let mut w = Vec::new();
            while let Some((s, l)) = parent[q] {
                w.push(l);
                q = s;
            }
            w.reverse();
            w
        };
        let mut w = path_to(to);
        let mut cycle_part = path_to(from);
        cycle_part.drain(..w.len());
        w.extend(cycle_part);
        w.push(letter);
        // Breadth-first completion to a final state.
        let mut parent2: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = vec![to];
        seen[to] = true;
        let mut head = 0;
        let mut hit = if dfa.is_final(to) { Some(to) } else { None };
        while head < queue.len() && hit.is_none() {
            let q = queue[head];
            head += 1;
            for &(l, t) in &edges[q] {
                if !seen[t] {
                    seen[t] = true;
                    parent2[t] = Some((q, l));
                    if dfa.is_final(t) {
                        hit = Some(t);
                        break;
                    }
                    queue.push(t);
                }
            }
        }
        let mut tail = Vec::new();
        let mut q = hit.expect("live cycle state reaches a final state");
        while let Some((s, l)) = parent2[q] {
            tail.push(l);
            q = s;
        }
        tail.reverse();
        w.extend(tail);
        return Err(Word(w));
    }

    // Acyclic live part: count accepted paths by memoized descent.
    fn count(
        q: usize,
        edges: &[Vec<(Letter, usize)>],
        finals: &dyn Fn(usize) -> bool,
        live: &dyn Fn(usize) -> bool,
        memo: &mut [Option<usize>],
    ) -> usize {
        if let Some(c) = memo[q] {
            return c;
        }
        let mut total: usize = if finals(q) { 1 } else { 0 };
        for &(_, t) in &edges[q] {
            if live(t) {
                total = total.saturating_add(count(t, edges, finals, live, memo));
            }
        }
        memo[q] = Some(total);
        total
    }
    if !live(dfa.start()) {
        return Ok(0);
    }
    let mut memo = vec![None; n];
    Ok(count(
        dfa.start(),
        &edges,
        &|q| dfa.is_final(q),
        &live,
        &mut memo,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Budget;
    use crate::presentation::parse_presentation;

    fn pres(text: &str) -> SpecialPresentation {
        parse_presentation(text).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::from_str_chars(s).unwrap()
    }

    fn units(indices: &[u32]) -> Word {
        Word(indices.iter().map(|&i| Letter::unit(i)).collect())
    }

    fn zmod3() -> UnitsWpSpec {
        UnitsWpSpec::Builder(UnitsBuilder::Finite {
            identity: 0,
            table: vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
            generator_elements: vec![1],
        })
    }

    #[test]
    fn finite_units_word_problem_tracks_the_table() {
        let wp = units_wp_grammar(&zmod3(), 1).unwrap();
        let c = wp.compile();
        let b1 = Letter::unit(0);
        let hash = Letter::HASH;
        // b1⁴ # b1 accepted (4 ≡ 1 mod 3), b1² # b1 rejected.
        let mut yes = vec![b1; 4];
        yes.push(hash);
        yes.push(b1);
        assert!(c.contains(&Word(yes)));
        let mut no = vec![b1; 2];
        no.push(hash);
        no.push(b1);
        assert!(!c.contains(&Word(no)));
        assert!(c.contains(&Word(vec![hash])));
    }

    #[test]
    fn bad_finite_tables_are_rejected() {
        let spec = UnitsWpSpec::Builder(UnitsBuilder::Finite {
            identity: 0,
            table: vec![vec![0, 1], vec![1, 1]],
            generator_elements: vec![1],
        });
        assert!(matches!(
            units_wp_grammar(&spec, 1),
            Err(UnitsError::NotAGroupTable(_))
        ));
        let spec = UnitsWpSpec::Builder(UnitsBuilder::Finite {
            identity: 0,
            table: vec![vec![0, 1], vec![1, 0]],
            generator_elements: vec![1, 0],
        });
        assert!(matches!(
            units_wp_grammar(&spec, 1),
            Err(UnitsError::Arity { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn free_units_word_problem_reduces_freely() {
        let spec = UnitsWpSpec::Builder(UnitsBuilder::Free { partner: vec![1, 0] });
        let wp = units_wp_grammar(&spec, 2).unwrap();
        let c = wp.compile();
        let hash = Word::one(Letter::HASH);
        assert!(c.contains(&units(&[0, 1]).concat(&hash)));
        assert!(c.contains(&units(&[1, 0]).concat(&hash)));
        assert!(!c.contains(&units(&[0]).concat(&hash)));
        // b1b1b2 # b1: both sides reduce to b1.
        assert!(c.contains(&units(&[0, 0, 1]).concat(&hash).concat(&units(&[0]))));
        assert!(matches!(
            units_wp_grammar(
                &UnitsWpSpec::Builder(UnitsBuilder::Free { partner: vec![0, 1] }),
                2
            ),
            Err(UnitsError::BadPairing(_))
        ));
    }

    #[test]
    fn free_product_of_two_order_two_groups() {
        let z2 = UnitsBuilder::Finite {
            identity: 0,
            table: vec![vec![0, 1], vec![1, 0]],
            generator_elements: vec![1],
        };
        let spec = UnitsWpSpec::Builder(UnitsBuilder::FreeProduct {
            members: vec![(vec![0], z2.clone()), (vec![1], z2)],
        });
        let wp = units_wp_grammar(&spec, 2).unwrap();
        let c = wp.compile();
        let hash = Word::one(Letter::HASH);
        assert!(c.contains(&units(&[0, 0]).concat(&hash)));
        assert!(c.contains(&units(&[1, 1]).concat(&hash)));
        assert!(c.contains(&units(&[0, 1, 1, 0]).concat(&hash)));
        // b1b2 has infinite order in Z2 * Z2.
        assert!(!c.contains(&units(&[0, 1]).concat(&hash)));
        assert!(!c.contains(&units(&[0, 1, 0, 1]).concat(&hash)));
        // b1b2 # b1b2 still holds: x equals itself.
        assert!(c.contains(&units(&[0, 1]).concat(&hash).concat(&units(&[1, 0]))));
    }

    #[test]
    fn bicyclic_word_problem_end_to_end() {
        let p = pres("generators: b c\nrelator: bc\n");
        let arts = synthesize(&p, &UnitsWpSpec::Builder(UnitsBuilder::Trivial)).unwrap();
        assert_eq!(arts.certification, Certification::Certified);
        assert!(arts.decide(&w("bc"), &w("")).unwrap());
        assert!(arts.decide(&w("bbcc"), &w("")).unwrap());
        assert!(arts.decide(&w("bcb"), &w("b")).unwrap());
        assert!(!arts.decide(&w("cb"), &w("")).unwrap());
        assert!(!arts.decide(&w("b"), &w("c")).unwrap());
        assert!(arts.decide(&w(""), &w("")).unwrap());
        assert!(matches!(
            arts.decide(&w("bx"), &w("")),
            Err(PipelineError::ForeignLetters { .. })
        ));
    }

    #[test]
    fn bicyclic_marked_language_goldens() {
        let p = pres("generators: b c\nrelator: bc\n");
        let arts = synthesize(&p, &UnitsWpSpec::Builder(UnitsBuilder::Trivial)).unwrap();
        let c = arts.invp.compile();
        let hash = Word::one(Letter::HASH);
        assert!(c.contains(&w("bc").concat(&hash).concat(&w("cb"))));
        assert!(c.contains(&hash));
        assert!(!c.contains(&w("b").concat(&hash).concat(&w("b"))));
        // The class of ε is the balanced language.
        let eps_class = arts.rep_word_grammar(&w("")).unwrap();
        assert_eq!(
            eps_class.enumerate_upto(6),
            ["", "bc", "bbcc", "bcbc", "bbbccc", "bbcbcc", "bbccbc", "bcbbcc", "bcbcbc"]
                .iter()
                .map(|s| w(s))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn bicyclic_invertibility_and_rational_subsets() {
        let p = pres("generators: b c\nrelator: bc\n");
        let arts = synthesize(&p, &UnitsWpSpec::Builder(UnitsBuilder::Trivial)).unwrap();
        assert!(arts.is_invertible(&w("")).unwrap());
        assert!(arts.is_invertible(&w("bbcc")).unwrap());
        assert!(!arts.is_invertible(&w("b")).unwrap());
        assert!(!arts.is_invertible(&w("cb")).unwrap());
        let k = Nfa::from_word(&w("bc")).star();
        assert!(arts.rational_member(&w("bbcc"), &k).unwrap());
        assert!(!arts.rational_member(&w("b"), &k).unwrap());
        let just_b = Nfa::from_word(&w("b"));
        assert!(arts.rational_member(&w("b"), &just_b).unwrap());
    }

    #[test]
    fn zmod3_end_to_end() {
        let p = pres("generators: a\nrelator: aaa\n");
        let arts = synthesize(&p, &zmod3()).unwrap();
        assert!(arts.decide(&w("aaaa"), &w("a")).unwrap());
        assert!(arts.decide(&w(""), &w("aaa")).unwrap());
        assert!(!arts.decide(&w("aa"), &w("a")).unwrap());
        // Rep_B(b1) = words of length ≡ 1 mod 3.
        assert_eq!(
            arts.rep_units[0].enumerate_upto(7),
            vec![units(&[0]), units(&[0, 0, 0, 0]), units(&[0; 7])]
        );
        // Everything is invertible in a group.
        assert!(arts.is_invertible(&w("aa")).unwrap());
    }

    #[test]
    fn free_group_fixture_end_to_end() {
        let p = pres("generators: a b\nrelator: ab\nrelator: ba\n");
        let spec = UnitsWpSpec::Builder(UnitsBuilder::Free { partner: vec![1, 0] });
        let arts = synthesize(&p, &spec).unwrap();
        assert!(arts.decide(&w("aabb"), &w("")).unwrap());
        assert!(arts.decide(&w("bbaa"), &w("")).unwrap());
        assert!(arts.decide(&w("ab"), &w("ba")).unwrap());
        assert!(!arts.decide(&w("a"), &w("b")).unwrap());
        assert!(arts.decide(&w("aab"), &w("a")).unwrap());
    }

    #[test]
    fn synthesis_refuses_unnormalized_presentations() {
        let p = pres("generators: a b c\nrelator: (aabbacc)\nrelator: (ab)(ac)(ab)\n");
        assert!(matches!(
            synthesize(&p, &UnitsWpSpec::Builder(UnitsBuilder::Trivial)),
            Err(PipelineError::NotNormalized)
        ));
    }

    #[test]
    fn synthesis_refuses_inconsistent_units_specs() {
        let p = pres("generators: b c\nrelator: bc\n");
        let z2 = UnitsWpSpec::Builder(UnitsBuilder::Finite {
            identity: 0,
            table: vec![vec![0, 1], vec![1, 0]],
            generator_elements: vec![1],
        });
        assert!(matches!(
            synthesize(&p, &z2),
            Err(PipelineError::Units(UnitsError::Inconsistent { relator: 0 }))
        ));
    }

    #[test]
    fn classification_of_small_monoids() {
        let p = pres("generators: a\nrelator: aaa\n");
        assert_eq!(
            classify_regular(&p),
            Classification::FiniteGroup { element_count: 3 }
        );
        let p = pres("generators: b c\nrelator: bc\n");
        assert!(matches!(
            classify_regular(&p),
            Classification::NotFiniteGroup {
                witness: NotFiniteWitness::NonInvertibleGenerator(_)
            }
        ));
        let p = pres("generators: a b\nrelator: ab\nrelator: ba\n");
        let Classification::NotFiniteGroup {
            witness: NotFiniteWitness::Growth(word),
        } = classify_regular(&p)
        else {
            panic!("expected a growth witness");
        };
        // The witness is irreducible and pumpable, so it is not the identity.
        let sys = SpecialRewritingSystem::from_presentation(&p);
        assert!(!sys
            .equal(&word, &Word::empty(), &Budget::for_query(&sys, &word, &Word::empty()))
            .is_equal());
    }

    #[test]
    fn words_outside_any_relator_block_group_classification() {
        let p = pres("generators: a b\nrelator: aa\n");
        assert!(matches!(
            classify_regular(&p),
            Classification::NotFiniteGroup {
                witness: NotFiniteWitness::NonInvertibleGenerator(l)
            } if l == Letter::ch('b')
        ));
    }
}
