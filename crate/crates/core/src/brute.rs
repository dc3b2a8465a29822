//! Elementary reference implementations for cross-checking.
//!
//! Everything here is written the slow, obvious way and shares no logic with
//! the grammar machinery in [`crate::lang`]: membership predicates are
//! direct recognizers, transduction is a search over runs, and monadic
//! rewriting is a breadth-first closure over finite rules. Tests compare the
//! clever constructions against these.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::lang::transducer::Transducer;
use crate::word::{Letter, Word};

/// All words over `letters` of length at most `maxlen`, shortest first, then
/// in the given letter order.
pub fn words_over(letters: &[Letter], maxlen: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    loop {
        out.push(cur.iter().map(|&i| letters[i]).collect());
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

/// Balanced-bracket recognizer for one pair of letters.
pub fn dyck(open: Letter, close: Letter, w: &Word) -> bool {
    let mut depth: i64 = 0;
    for l in w.letters() {
        if l == open {
            depth += 1;
        } else if l == close {
            depth -= 1;
            if depth < 0 {
                return false;
            }
        } else {
            return false;
        }
    }
    depth == 0
}

/// True when `w` splits as `uv` with `p(u)` and `q(v)`.
pub fn splits_as(w: &Word, p: impl Fn(&Word) -> bool, q: impl Fn(&Word) -> bool) -> bool {
    (0..=w.len()).any(|k| {
        p(&Word(w.0[..k].to_vec())) && q(&Word(w.0[k..].to_vec()))
    })
}

/// True when `w` splits into zero or more nonempty blocks satisfying `p`
/// (with ε always a member).
pub fn star_of(w: &Word, p: impl Fn(&Word) -> bool) -> bool {
    let n = w.len();
    let mut reach = alloc::vec![false; n + 1];
    reach[0] = true;
    for i in 0..n {
        if !reach[i] {
            continue;
        }
        for j in i + 1..=n {
            if !reach[j] && p(&Word(w.0[i..j].to_vec())) {
                reach[j] = true;
            }
        }
    }
    reach[n]
}

/// All outputs of `t` on input `w` with length at most `max_out`, by search
/// over runs.
pub fn transduce_word(t: &Transducer, w: &Word, max_out: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    // (input position, state, output so far)
    let mut seen: BTreeSet<(usize, usize, Word)> = BTreeSet::new();
    let mut stack = alloc::vec![(0usize, t.start(), Word::empty())];
    seen.insert((0, t.start(), Word::empty()));
    while let Some((pos, q, acc)) = stack.pop() {
        if pos == w.len() && t.is_final(q) {
            out.insert(acc.clone());
        }
        for e in t.edges() {
            if e.from != q {
                continue;
            }
            if !e.input.is_empty() && !w.matches_at(pos, &e.input) {
                continue;
            }
            let acc2 = acc.concat(&e.output);
            if acc2.len() > max_out {
                continue;
            }
            let key = (pos + e.input.len(), e.to, acc2);
            if !seen.contains(&key) {
                seen.insert(key.clone());
                stack.push(key);
            }
        }
    }
    out
}

/// A finite monadic rule: any listed word rewrites to `rhs`.
#[derive(Clone, Debug)]
pub struct FiniteRule {
    pub lhs: Vec<Word>,
    pub rhs: Word,
}

/// True when `start` rewrites into `targets` under `rules`, by breadth-first
/// closure. Right-hand sides must not be longer than their left-hand sides,
/// so the word length never grows and the search terminates.
pub fn monadic_reaches(start: &Word, rules: &[FiniteRule], targets: &BTreeSet<Word>) -> bool {
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    let mut stack = alloc::vec![start.clone()];
    seen.insert(start.clone());
    while let Some(w) = stack.pop() {
        if targets.contains(&w) {
            return true;
        }
        for rule in rules {
            for lhs in &rule.lhs {
                if lhs.is_empty() || lhs.len() < rule.rhs.len() {
                    continue;
                }
                for pos in 0..=w.len().saturating_sub(lhs.len()) {
                    if !w.matches_at(pos, lhs) {
                        continue;
                    }
                    let mut next = Vec::with_capacity(w.len() - lhs.len() + rule.rhs.len());
                    next.extend_from_slice(&w.0[..pos]);
                    next.extend_from_slice(&rule.rhs.0);
                    next.extend_from_slice(&w.0[pos + lhs.len()..]);
                    let next = Word(next);
                    if !seen.contains(&next) {
                        seen.insert(next.clone());
                        stack.push(next);
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::from_str_chars(s).unwrap()
    }

    #[test]
    fn word_enumeration_order() {
        let ls: Vec<Letter> = w("ab").letters().collect();
        let got = words_over(&ls, 2);
        let expect: Vec<Word> = ["", "a", "b", "aa", "ab", "ba", "bb"]
            .iter()
            .map(|s| w(s))
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn dyck_recognizer() {
        let (b, c) = (Letter::ch('b'), Letter::ch('c'));
        assert!(dyck(b, c, &Word::empty()));
        assert!(dyck(b, c, &w("bbcc")));
        assert!(dyck(b, c, &w("bcbc")));
        assert!(!dyck(b, c, &w("cb")));
        assert!(!dyck(b, c, &w("bcb")));
        assert!(!dyck(b, c, &w("bxc")));
    }

    #[test]
    fn split_and_star_predicates() {
        let is_ab = |x: &Word| *x == w("ab");
        assert!(splits_as(&w("abab"), is_ab, is_ab));
        assert!(!splits_as(&w("aba"), is_ab, is_ab));
        assert!(star_of(&w("ababab"), is_ab));
        assert!(star_of(&Word::empty(), is_ab));
        assert!(!star_of(&w("abba"), is_ab));
    }

    #[test]
    fn transduction_by_run_search() {
        let erase_c = Transducer::letter_map(w("bc").letters(), |l| {
            if l == Letter::ch('c') {
                Word::empty()
            } else {
                Word::one(l)
            }
        });
        let outs = transduce_word(&erase_c, &w("bcbc"), 8);
        assert_eq!(outs.len(), 1);
        assert!(outs.contains(&w("bb")));
    }

    #[test]
    fn monadic_closure_reaches_targets() {
        let rules = [FiniteRule {
            lhs: alloc::vec![w("bc")],
            rhs: Word::empty(),
        }];
        let targets: BTreeSet<Word> = [Word::empty()].into_iter().collect();
        assert!(monadic_reaches(&w("bbcc"), &rules, &targets));
        assert!(monadic_reaches(&w("bcbc"), &rules, &targets));
        assert!(!monadic_reaches(&w("cb"), &rules, &targets));
    }
}
