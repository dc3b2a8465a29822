//! The monadic rules file for the `ancestors` subcommand.
//!
//! Line-oriented, `#` comments. Each rule maps a left-hand-side language to
//! a right-hand side that is one letter or ε (written as nothing):
//!
//! ```text
//! rule: ab ba -> a           # finite LHS set {ab, ba} rewrites to a
//! rule: bc ->                # bc rewrites to ε
//! rule-grammar: lhs.cfg -> b # LHS language from a grammar file
//! ```
//!
//! Grammar paths resolve relative to the rules file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use smwp_core::lang::{parse_grammar, Grammar, MonadicRule};
use smwp_core::word::{Letter, Word};

use crate::words::{parse_letter, parse_word};

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_rhs(rhs: &str, no: usize) -> Result<Option<Letter>> {
    let rhs = rhs.trim();
    if rhs.is_empty() {
        Ok(None)
    } else {
        Ok(Some(parse_letter(rhs, false).with_context(|| {
            format!("line {}: right-hand side must be one letter or empty", no)
        })?))
    }
}

pub fn parse_rules_file(text: &str, rules_path: &Path) -> Result<Vec<MonadicRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("rule-grammar:") {
            let (path, rhs) = rest
                .split_once("->")
                .with_context(|| format!("line {}: missing ->", no))?;
            let path = path.trim();
            let resolved = match rules_path.parent() {
                Some(dir) if Path::new(path).is_relative() => dir.join(path),
                _ => path.into(),
            };
            let gtext = std::fs::read_to_string(&resolved)
                .with_context(|| format!("reading LHS grammar {}", resolved.display()))?;
            let lhs = parse_grammar(&gtext, false)
                .map_err(|e| anyhow::anyhow!("parsing {}: {}", resolved.display(), e))?;
            rules.push(MonadicRule {
                lhs,
                rhs: parse_rhs(rhs, no)?,
            });
        } else if let Some(rest) = line.strip_prefix("rule:") {
            let (words, rhs) = rest
                .split_once("->")
                .with_context(|| format!("line {}: missing ->", no))?;
            let mut lhs_words: Vec<Word> = Vec::new();
            for tok in words.split_whitespace() {
                lhs_words.push(parse_word(tok, false)?);
            }
            if lhs_words.is_empty() {
                bail!("line {}: rule has no left-hand-side words", no);
            }
            if lhs_words.iter().any(|w| w.is_empty()) {
                bail!("line {}: left-hand sides must be nonempty", no);
            }
            let terminals = lhs_words.iter().flat_map(|w| w.letters()).collect();
            rules.push(MonadicRule {
                lhs: Grammar::finite(&lhs_words, terminals),
                rhs: parse_rhs(rhs, no)?,
            });
        } else {
            bail!("line {}: expected rule: or rule-grammar:", no);
        }
    }
    Ok(rules)
}
