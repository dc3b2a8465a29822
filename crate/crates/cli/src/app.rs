//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 = yes/equal/success, 1 = no/unequal, 2 = unknown or
//! budget exhausted, 3 = usage or input error.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use smwp_core::lang::{ancestors, parse_grammar, serialize_grammar, Nfa};
use smwp_core::oracle::{Budget, EqualAnswer, NotEqualCertificate, SpecialRewritingSystem};
use smwp_core::pieces::{compute_pieces, normalize, units_presentation};
use smwp_core::pipeline::{
    synthesize, Classification, NotFiniteWitness, PipelineError, WpQueries,
};
use smwp_core::presentation::{parse_presentation, serialize_presentation, validate, Severity};
use smwp_core::word::{Letter, Word};

use crate::cache::{self, CacheFile};
use crate::report::{emit, CertificateDto, CertificationDto, DiagnosticDto, Format, NormalizeStepDto, Report};
use crate::rules_file::parse_rules_file;
use crate::units_file::parse_units_file;
use crate::words::parse_word;

#[derive(Parser)]
#[command(
    name = "smwp",
    version,
    about = "Word problems for special monoids: pieces, units, grammar synthesis, decision"
)]
struct Cli {
    /// Output format for reports on standard output.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct SynthArgs {
    /// Presentation file.
    pres: PathBuf,
    /// Units spec file describing the word problem of the group of units.
    #[arg(long)]
    units: PathBuf,
    /// Skip the on-disk grammar cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a presentation and report structural diagnostics.
    Validate { pres: PathBuf },
    /// Compute the invertible pieces and relator factorizations.
    Pieces { pres: PathBuf },
    /// Eliminate pieces nested inside pieces; write the extended presentation.
    Normalize {
        pres: PathBuf,
        /// Output path for the normalized presentation.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the group-of-units presentation and the piece-class table.
    Units { pres: PathBuf },
    /// Synthesize the word-problem grammar and write it to a file.
    #[command(name = "wp-grammar")]
    WpGrammar {
        #[command(flatten)]
        synth: SynthArgs,
        /// Output path for the grammar.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decide whether two words are equal in the monoid.
    Decide {
        #[command(flatten)]
        synth: SynthArgs,
        left: String,
        right: String,
    },
    /// Decide whether a word is an invertible element.
    Invertible {
        #[command(flatten)]
        synth: SynthArgs,
        word: String,
    },
    /// Decide membership of a word in a rational subset given by a regex.
    Ratmem {
        #[command(flatten)]
        synth: SynthArgs,
        word: String,
        /// Regular expression over the generators (letters, |, *, +, ?, parentheses).
        #[arg(long)]
        regex: String,
    },
    /// Enumerate the congruence class of a word up to a length bound.
    Class {
        #[command(flatten)]
        synth: SynthArgs,
        word: String,
        /// Maximum length of enumerated class members.
        #[arg(long)]
        maxlen: usize,
        /// Override the oracle's maximum intermediate word length.
        #[arg(long)]
        max_len: Option<usize>,
        /// Override the oracle's maximum visited word count.
        #[arg(long)]
        max_visited: Option<usize>,
    },
    /// Compute all ancestors of a grammar's language under monadic rules.
    Ancestors {
        grammar: PathBuf,
        rules: PathBuf,
        /// Output path for the ancestors grammar.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Ask the brute-force congruence oracle whether two words are equal.
    Oracle {
        pres: PathBuf,
        left: String,
        right: String,
        /// Override the maximum intermediate word length.
        #[arg(long)]
        max_len: Option<usize>,
        /// Override the maximum visited word count.
        #[arg(long)]
        max_visited: Option<usize>,
    },
    /// Report whether the monoid is a finite group (regular word problem).
    Classify { pres: PathBuf },
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            3
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let format = cli.format;
    match cli.cmd {
        Cmd::Validate { pres } => cmd_validate(format, &pres),
        Cmd::Pieces { pres } => cmd_pieces(format, &pres),
        Cmd::Normalize { pres, output } => cmd_normalize(format, &pres, &output),
        Cmd::Units { pres } => cmd_units(format, &pres),
        Cmd::WpGrammar { synth, output } => cmd_wp_grammar(format, &synth, &output),
        Cmd::Decide { synth, left, right } => cmd_decide(format, &synth, &left, &right),
        Cmd::Invertible { synth, word } => cmd_invertible(format, &synth, &word),
        Cmd::Ratmem { synth, word, regex } => cmd_ratmem(format, &synth, &word, &regex),
        Cmd::Class {
            synth,
            word,
            maxlen,
            max_len,
            max_visited,
        } => cmd_class(format, &synth, &word, maxlen, max_len, max_visited),
        Cmd::Ancestors {
            grammar,
            rules,
            output,
        } => cmd_ancestors(format, &grammar, &rules, &output),
        Cmd::Oracle {
            pres,
            left,
            right,
            max_len,
            max_visited,
        } => cmd_oracle(format, &pres, &left, &right, max_len, max_visited),
        Cmd::Classify { pres } => cmd_classify(format, &pres),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_presentation(path: &Path) -> Result<smwp_core::presentation::SpecialPresentation> {
    let text = read(path)?;
    parse_presentation(&text)
        .map_err(|e| anyhow!("{}: line {}: {}", path.display(), e.line, e.message))
}

fn render_words(words: impl IntoIterator<Item = Word>) -> Vec<String> {
    words.into_iter().map(|w| w.render()).collect()
}

fn cmd_validate(format: Format, pres: &Path) -> Result<i32> {
    let p = load_presentation(pres)?;
    let diagnostics: Vec<DiagnosticDto> = validate(&p)
        .into_iter()
        .map(|d| DiagnosticDto {
            severity: match d.severity {
                Severity::Error => "error".into(),
                Severity::Warning => "warning".into(),
            },
            message: d.message,
        })
        .collect();
    let ok = diagnostics.iter().all(|d| d.severity != "error");
    emit(format, &Report::Validate { ok, diagnostics })?;
    Ok(if ok { 0 } else { 3 })
}

fn cmd_pieces(format: Format, pres: &Path) -> Result<i32> {
    let p = load_presentation(pres)?;
    let data = compute_pieces(&p).map_err(|e| anyhow!("{}", e))?;
    emit(
        format,
        &Report::Pieces {
            pieces: render_words(data.pieces.iter().cloned()),
            factorizations: data.factorizations.clone(),
            weight: data.weight(),
            certification: data.certification.into(),
        },
    )?;
    Ok(0)
}

fn cmd_normalize(format: Format, pres: &Path, output: &Path) -> Result<i32> {
    let p = load_presentation(pres)?;
    let out = normalize(&p).map_err(|e| anyhow!("{}", e))?;
    std::fs::write(output, serialize_presentation(&out.presentation))
        .with_context(|| format!("writing {}", output.display()))?;
    emit(
        format,
        &Report::Normalize {
            generators: out
                .presentation
                .alphabet
                .iter()
                .map(|l| l.to_string())
                .collect(),
            pieces: render_words(out.pieces.pieces.iter().cloned()),
            weight: out.pieces.weight(),
            steps: out
                .steps
                .iter()
                .map(|s| NormalizeStepDto {
                    host: s.host.render(),
                    subword: s.subword.render(),
                    fresh: s.fresh.to_string(),
                    inverse: s.inverse.render(),
                })
                .collect(),
            output: output.display().to_string(),
        },
    )?;
    Ok(0)
}

fn cmd_units(format: Format, pres: &Path) -> Result<i32> {
    let p = load_presentation(pres)?;
    let data = compute_pieces(&p).map_err(|e| anyhow!("{}", e))?;
    let units = units_presentation(&p, &data);
    emit(
        format,
        &Report::Units {
            class_count: units.class_count,
            pieces: render_words(data.pieces.iter().cloned()),
            piece_class: units.piece_class.clone(),
            class_reps: render_words(units.class_reps.iter().cloned()),
            relator_images: units
                .relator_images
                .iter()
                .map(|img| {
                    img.iter()
                        .map(|c| format!("b{}", c + 1))
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect(),
            certification: units.certification.into(),
        },
    )?;
    Ok(0)
}

/// Everything a query subcommand needs, either fresh or from cache.
struct Prepared {
    queries: WpQueries,
    original_alphabet: Vec<Letter>,
    certification: CertificationDto,
    cached: bool,
    normalized: bool,
    added_generators: Vec<String>,
}

fn prepare(synth: &SynthArgs) -> Result<Prepared> {
    let pres_text = read(&synth.pres)?;
    let units_text = read(&synth.units)?;
    let units_file = parse_units_file(&units_text)
        .with_context(|| format!("parsing units file {}", synth.units.display()))?;
    let extra = match units_file.grammar_path(&synth.units) {
        Some(p) => Some(read(&p)?),
        None => None,
    };
    let key = cache::cache_key(&pres_text, &units_text, extra.as_deref());
    let cache_path = cache::cache_path(&synth.pres, &key);

    if !synth.no_cache {
        if let Some(file) = cache::load(&cache_path) {
            return rebuild(file, true);
        }
    }

    let p0 = parse_presentation(&pres_text)
        .map_err(|e| anyhow!("{}: line {}: {}", synth.pres.display(), e.line, e.message))?;
    let data0 = compute_pieces(&p0).map_err(|e| anyhow!("{}", e))?;
    let (p, normalized) = if data0.is_normalized() {
        (p0.clone(), false)
    } else {
        let out = normalize(&p0).map_err(|e| anyhow!("{}", e))?;
        (out.presentation, true)
    };
    let data = if normalized {
        compute_pieces(&p).map_err(|e| anyhow!("{}", e))?
    } else {
        data0
    };
    let units = units_presentation(&p, &data);
    let spec = units_file.to_spec(units.class_count, &synth.units)?;
    let arts = synthesize(&p, &spec).map_err(describe_pipeline_error)?;

    let file = CacheFile {
        version: cache::CACHE_VERSION,
        original_generators: p0.alphabet.iter().map(|l| l.to_string()).collect(),
        generators: p.alphabet.iter().map(|l| l.to_string()).collect(),
        normalized,
        certification: arts.certification.into(),
        pieces: render_words(arts.pieces.pieces.iter().cloned()),
        class_count: arts.units.class_count,
        piece_class: arts.units.piece_class.clone(),
        wp_grammar: serialize_grammar(&arts.wp),
        invertible_grammar: serialize_grammar(&arts.invertible_language),
    };
    if !synth.no_cache {
        if let Err(e) = cache::store(&cache_path, &file) {
            eprintln!("warning: {:#}", e);
        }
    }
    rebuild(file, false)
}

fn describe_pipeline_error(e: PipelineError) -> anyhow::Error {
    anyhow!("{}", e)
}

/// Reconstruct query capability from a cache entry (also used right after
/// synthesis so both paths exercise the same code).
fn rebuild(file: CacheFile, cached: bool) -> Result<Prepared> {
    let parse_letters = |names: &[String]| -> Result<Vec<Letter>> {
        names
            .iter()
            .map(|n| crate::words::parse_letter(n, false))
            .collect()
    };
    let alphabet = parse_letters(&file.generators)?;
    let original_alphabet = parse_letters(&file.original_generators)?;
    let wp = parse_grammar(&file.wp_grammar, false).map_err(|e| anyhow!("cached grammar: {}", e))?;
    let invertible = parse_grammar(&file.invertible_grammar, false)
        .map_err(|e| anyhow!("cached grammar: {}", e))?;
    let added = file
        .generators
        .iter()
        .filter(|g| !file.original_generators.contains(g))
        .cloned()
        .collect();
    Ok(Prepared {
        queries: WpQueries::new(alphabet, wp, invertible),
        original_alphabet,
        certification: file.certification,
        cached,
        normalized: file.normalized,
        added_generators: added,
    })
}

fn cmd_wp_grammar(format: Format, synth: &SynthArgs, output: &Path) -> Result<i32> {
    let prep = prepare(synth)?;
    std::fs::write(output, serialize_grammar(prep.queries.wp()))
        .with_context(|| format!("writing {}", output.display()))?;
    emit(
        format,
        &Report::WpGrammar {
            output: output.display().to_string(),
            nonterminals: prep.queries.wp().n_nonterminals(),
            certification: prep.certification,
            cached: prep.cached,
            normalized: prep.normalized,
            added_generators: prep.added_generators,
        },
    )?;
    Ok(0)
}

fn cmd_decide(format: Format, synth: &SynthArgs, left: &str, right: &str) -> Result<i32> {
    let prep = prepare(synth)?;
    let u = parse_word(left, false)?;
    let v = parse_word(right, false)?;
    let equal = prep.queries.decide(&u, &v).map_err(describe_pipeline_error)?;
    emit(
        format,
        &Report::Decide {
            left: u.render(),
            right: v.render(),
            equal,
            certification: prep.certification,
            cached: prep.cached,
        },
    )?;
    Ok(if equal { 0 } else { 1 })
}

fn cmd_invertible(format: Format, synth: &SynthArgs, word: &str) -> Result<i32> {
    let prep = prepare(synth)?;
    let w = parse_word(word, false)?;
    let invertible = prep
        .queries
        .is_invertible(&w)
        .map_err(describe_pipeline_error)?;
    emit(
        format,
        &Report::Invertible {
            word: w.render(),
            invertible,
            certification: prep.certification,
            cached: prep.cached,
        },
    )?;
    Ok(if invertible { 0 } else { 1 })
}

fn cmd_ratmem(format: Format, synth: &SynthArgs, word: &str, regex: &str) -> Result<i32> {
    let prep = prepare(synth)?;
    let w = parse_word(word, false)?;
    let k = Nfa::parse_regex(regex, false).map_err(|e| anyhow!("pattern: {}", e))?;
    let member = prep
        .queries
        .rational_member(&w, &k)
        .map_err(describe_pipeline_error)?;
    emit(
        format,
        &Report::Ratmem {
            word: w.render(),
            pattern: regex.to_string(),
            member,
            certification: prep.certification,
            cached: prep.cached,
        },
    )?;
    Ok(if member { 0 } else { 1 })
}

fn cmd_class(
    format: Format,
    synth: &SynthArgs,
    word: &str,
    maxlen: usize,
    max_len: Option<usize>,
    max_visited: Option<usize>,
) -> Result<i32> {
    let prep = prepare(synth)?;
    let w = parse_word(word, false)?;
    let grammar = prep
        .queries
        .rep_word_grammar(&w)
        .map_err(describe_pipeline_error)?;
    // Members over the original generators only; fresh letters introduced
    // by normalization name the same elements but are not user symbols.
    let original: std::collections::BTreeSet<Letter> =
        prep.original_alphabet.iter().copied().collect();
    let members = grammar.restrict_terminals(&original).enumerate_upto(maxlen);

    // Independent evidence: replay each member through the congruence
    // oracle on the original presentation.
    let mut cross_checked = 0;
    let mut skipped = 0;
    if prep.certification == CertificationDto::Certified {
        let p = load_presentation(&synth.pres)?;
        let sys = SpecialRewritingSystem::from_presentation(&p);
        for m in &members {
            let mut budget = Budget::for_query(&sys, &w, m);
            if let Some(l) = max_len {
                budget.max_len = l;
            }
            if let Some(v) = max_visited {
                budget.max_visited = v;
            }
            match sys.equal(&w, m, &budget) {
                EqualAnswer::Equal { .. } => cross_checked += 1,
                EqualAnswer::Unknown { .. } => skipped += 1,
                EqualAnswer::NotEqual { .. } => {
                    return Err(anyhow!(
                        "internal inconsistency: grammar lists {} in class of {}, oracle refutes it",
                        m.render(),
                        w.render()
                    ));
                }
            }
        }
    }
    emit(
        format,
        &Report::Class {
            word: w.render(),
            maxlen,
            members: render_words(members),
            cross_checked,
            cross_check_skipped: skipped,
            certification: prep.certification,
            cached: prep.cached,
        },
    )?;
    Ok(0)
}

fn cmd_ancestors(format: Format, grammar: &Path, rules: &Path, output: &Path) -> Result<i32> {
    let gtext = read(grammar)?;
    let seed = parse_grammar(&gtext, false)
        .map_err(|e| anyhow!("parsing {}: {}", grammar.display(), e))?;
    let rtext = read(rules)?;
    let system = parse_rules_file(&rtext, rules)?;
    let result = ancestors(&seed, &system);
    std::fs::write(output, serialize_grammar(&result))
        .with_context(|| format!("writing {}", output.display()))?;
    emit(
        format,
        &Report::Ancestors {
            output: output.display().to_string(),
            nonterminals: result.n_nonterminals(),
        },
    )?;
    Ok(0)
}

fn cmd_oracle(
    format: Format,
    pres: &Path,
    left: &str,
    right: &str,
    max_len: Option<usize>,
    max_visited: Option<usize>,
) -> Result<i32> {
    let p = load_presentation(pres)?;
    let u = parse_word(left, false)?;
    let v = parse_word(right, false)?;
    let sys = SpecialRewritingSystem::from_presentation(&p);
    let mut budget = Budget::for_query(&sys, &u, &v);
    if let Some(l) = max_len {
        budget.max_len = l;
    }
    if let Some(m) = max_visited {
        budget.max_visited = m;
    }
    let answer = sys.equal(&u, &v, &budget);
    let (verdict, trace_len, certificate, code) = match &answer {
        EqualAnswer::Equal { trace } => ("equal", Some(trace.0.len()), None, 0),
        EqualAnswer::NotEqual { certificate } => {
            let dto = match certificate {
                NotEqualCertificate::NormalForms { left, right } => CertificateDto {
                    kind: "normal-forms".into(),
                    left: Some(left.render()),
                    right: Some(right.render()),
                },
                NotEqualCertificate::Abelianization => CertificateDto {
                    kind: "abelianization".into(),
                    left: None,
                    right: None,
                },
            };
            ("not-equal", None, Some(dto), 1)
        }
        EqualAnswer::Unknown { .. } => ("unknown", None, None, 2),
    };
    emit(
        format,
        &Report::Oracle {
            left: u.render(),
            right: v.render(),
            verdict: verdict.into(),
            trace_len,
            certificate,
        },
    )?;
    Ok(code)
}

fn cmd_classify(format: Format, pres: &Path) -> Result<i32> {
    let p = load_presentation(pres)?;
    let (classification, element_count, witness_kind, witness, code) =
        match smwp_core::pipeline::classify_regular(&p) {
            Classification::FiniteGroup { element_count } => {
                ("finite-group", Some(element_count), None, None, 0)
            }
            Classification::NotFiniteGroup { witness } => match witness {
                NotFiniteWitness::NonInvertibleGenerator(l) => (
                    "not-finite-group",
                    None,
                    Some("non-invertible-generator".to_string()),
                    Some(l.to_string()),
                    1,
                ),
                NotFiniteWitness::Growth(w) => (
                    "not-finite-group",
                    None,
                    Some("growth".to_string()),
                    Some(w.render()),
                    1,
                ),
            },
            Classification::Unknown => ("unknown", None, None, None, 2),
        };
    emit(
        format,
        &Report::Classify {
            classification: classification.into(),
            element_count,
            witness_kind,
            witness,
        },
    )?;
    Ok(code)
}

