//! Machine-readable reports: one JSON object per invocation, tagged by the
//! `report` field. Text mode renders the same data for humans; verdicts
//! never differ between the two modes.

use anyhow::Result;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificationDto {
    Certified,
    BudgetLimited,
}

impl From<smwp_core::pieces::Certification> for CertificationDto {
    fn from(c: smwp_core::pieces::Certification) -> CertificationDto {
        match c {
            smwp_core::pieces::Certification::Certified => CertificationDto::Certified,
            smwp_core::pieces::Certification::BudgetLimited => CertificationDto::BudgetLimited,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DiagnosticDto {
    pub severity: String,
    pub message: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NormalizeStepDto {
    /// The piece that contained the replaced subword, before replacement.
    pub host: String,
    pub subword: String,
    pub fresh: String,
    pub inverse: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CertificateDto {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
pub enum Report {
    Validate {
        ok: bool,
        diagnostics: Vec<DiagnosticDto>,
    },
    Pieces {
        pieces: Vec<String>,
        factorizations: Vec<Vec<usize>>,
        weight: usize,
        certification: CertificationDto,
    },
    Normalize {
        generators: Vec<String>,
        pieces: Vec<String>,
        weight: usize,
        steps: Vec<NormalizeStepDto>,
        output: String,
    },
    Units {
        class_count: usize,
        pieces: Vec<String>,
        piece_class: Vec<usize>,
        class_reps: Vec<String>,
        relator_images: Vec<String>,
        certification: CertificationDto,
    },
    WpGrammar {
        output: String,
        nonterminals: usize,
        certification: CertificationDto,
        cached: bool,
        normalized: bool,
        added_generators: Vec<String>,
    },
    Decide {
        left: String,
        right: String,
        equal: bool,
        certification: CertificationDto,
        cached: bool,
    },
    Invertible {
        word: String,
        invertible: bool,
        certification: CertificationDto,
        cached: bool,
    },
    Ratmem {
        word: String,
        pattern: String,
        member: bool,
        certification: CertificationDto,
        cached: bool,
    },
    Class {
        word: String,
        maxlen: usize,
        members: Vec<String>,
        cross_checked: usize,
        cross_check_skipped: usize,
        certification: CertificationDto,
        cached: bool,
    },
    Ancestors {
        output: String,
        nonterminals: usize,
    },
    Oracle {
        left: String,
        right: String,
        verdict: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        trace_len: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<CertificateDto>,
    },
    Classify {
        classification: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        element_count: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness_kind: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<String>,
    },
}

/// Render ε for the empty word everywhere a word is shown to a human.
fn show(w: &str) -> &str {
    if w.is_empty() {
        "ε"
    } else {
        w
    }
}

fn certification_note(c: CertificationDto) {
    if c == CertificationDto::BudgetLimited {
        eprintln!(
            "warning: piece certification was budget-limited; verdicts may rest on an incomplete piece set"
        );
    }
}

fn render_text(report: &Report) {
    match report {
        Report::Validate { ok, diagnostics } => {
            for d in diagnostics {
                println!("{}: {}", d.severity, d.message);
            }
            if *ok {
                println!("ok");
            }
        }
        Report::Pieces {
            pieces,
            factorizations,
            weight,
            certification,
        } => {
            for (i, p) in pieces.iter().enumerate() {
                println!("piece {}: {}", i + 1, p);
            }
            for (i, f) in factorizations.iter().enumerate() {
                let parts: Vec<String> = f
                    .iter()
                    .map(|&j| format!("({})", pieces[j]))
                    .collect();
                println!("relator {}: {}", i + 1, parts.join(""));
            }
            println!("weight: {}", weight);
            certification_note(*certification);
        }
        Report::Normalize {
            generators,
            pieces,
            weight,
            steps,
            output,
        } => {
            for (i, s) in steps.iter().enumerate() {
                println!(
                    "step {}: replaced {} inside {} by {} (inverse {})",
                    i + 1,
                    s.subword,
                    s.host,
                    s.fresh,
                    show(&s.inverse)
                );
            }
            println!("generators: {}", generators.join(" "));
            for (i, p) in pieces.iter().enumerate() {
                println!("piece {}: {}", i + 1, p);
            }
            println!("weight: {}", weight);
            println!("wrote {}", output);
        }
        Report::Units {
            class_count,
            pieces,
            piece_class,
            class_reps,
            relator_images,
            certification,
        } => {
            println!("classes: {}", class_count);
            for (c, rep) in class_reps.iter().enumerate() {
                let members: Vec<&str> = piece_class
                    .iter()
                    .enumerate()
                    .filter(|&(_, &pc)| pc == c)
                    .map(|(i, _)| pieces[i].as_str())
                    .collect();
                println!(
                    "class b{}: representative {}, pieces {{{}}}",
                    c + 1,
                    rep,
                    members.join(", ")
                );
            }
            for (i, img) in relator_images.iter().enumerate() {
                println!("relator {} image: {}", i + 1, show(img));
            }
            certification_note(*certification);
        }
        Report::WpGrammar {
            output,
            nonterminals,
            certification,
            cached,
            normalized,
            added_generators,
        } => {
            if *normalized {
                println!(
                    "normalized first; added generators: {}",
                    added_generators.join(" ")
                );
            }
            println!("wrote {} ({} nonterminals)", output, nonterminals);
            if *cached {
                println!("from cache");
            }
            certification_note(*certification);
        }
        Report::Decide {
            left,
            right,
            equal,
            certification,
            ..
        } => {
            println!(
                "{} {} {}",
                show(left),
                if *equal { "=" } else { "≠" },
                show(right)
            );
            certification_note(*certification);
        }
        Report::Invertible {
            word,
            invertible,
            certification,
            ..
        } => {
            println!(
                "{} is {}",
                show(word),
                if *invertible {
                    "invertible"
                } else {
                    "not invertible"
                }
            );
            certification_note(*certification);
        }
        Report::Ratmem {
            word,
            pattern,
            member,
            certification,
            ..
        } => {
            println!(
                "{} {} an element of [{}]",
                show(word),
                if *member { "is" } else { "is not" },
                pattern
            );
            certification_note(*certification);
        }
        Report::Class {
            word,
            maxlen,
            members,
            cross_checked,
            cross_check_skipped,
            certification,
            ..
        } => {
            println!("class of {} up to length {}:", show(word), maxlen);
            for m in members {
                println!("{}", show(m));
            }
            if *cross_checked > 0 || *cross_check_skipped > 0 {
                println!(
                    "oracle cross-check: {} confirmed, {} out of budget",
                    cross_checked, cross_check_skipped
                );
            }
            certification_note(*certification);
        }
        Report::Ancestors {
            output,
            nonterminals,
        } => {
            println!("wrote {} ({} nonterminals)", output, nonterminals);
        }
        Report::Oracle {
            left,
            right,
            verdict,
            trace_len,
            certificate,
        } => {
            match verdict.as_str() {
                "equal" => println!("{} = {}", show(left), show(right)),
                "not-equal" => println!("{} ≠ {}", show(left), show(right)),
                _ => println!("{} ? {} (budget exhausted)", show(left), show(right)),
            }
            if let Some(n) = trace_len {
                println!("derivation with {} elementary steps", n);
            }
            if let Some(c) = certificate {
                match (&c.left, &c.right) {
                    (Some(l), Some(r)) => {
                        println!("certificate: {} (normal forms {} vs {})", c.kind, show(l), show(r))
                    }
                    _ => println!("certificate: {}", c.kind),
                }
            }
        }
        Report::Classify {
            classification,
            element_count,
            witness_kind,
            witness,
        } => match classification.as_str() {
            "finite-group" => {
                println!("finite group with {} elements", element_count.unwrap_or(0))
            }
            "not-finite-group" => match witness_kind.as_deref() {
                Some("non-invertible-generator") => println!(
                    "not a finite group: generator {} is not invertible",
                    witness.as_deref().unwrap_or("?")
                ),
                _ => println!(
                    "not a finite group: infinitely many elements (witness {})",
                    witness.as_deref().map(show).unwrap_or("?")
                ),
            },
            _ => println!("unknown (presentation is not confluent)"),
        },
    }
}

/// Print the report in the chosen format.
pub fn emit(format: Format, report: &Report) -> Result<()> {
    match format {
        Format::Text => render_text(report),
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_round_trip_through_json() {
        let reports = [
            Report::Decide {
                left: "bc".into(),
                right: String::new(),
                equal: true,
                certification: CertificationDto::Certified,
                cached: true,
            },
            Report::Oracle {
                left: "b".into(),
                right: "c".into(),
                verdict: "not-equal".into(),
                trace_len: None,
                certificate: Some(CertificateDto {
                    kind: "normal-forms".into(),
                    left: Some("b".into()),
                    right: Some("c".into()),
                }),
            },
            Report::Classify {
                classification: "finite-group".into(),
                element_count: Some(3),
                witness_kind: None,
                witness: None,
            },
        ];
        for report in reports {
            let text = serde_json::to_string(&report).unwrap();
            let back: Report = serde_json::from_str(&text).unwrap();
            assert_eq!(back, report);
        }
    }

    #[test]
    fn json_tags_are_kebab_case() {
        let text = serde_json::to_string(&Report::WpGrammar {
            output: "wp.cfg".into(),
            nonterminals: 7,
            certification: CertificationDto::BudgetLimited,
            cached: false,
            normalized: true,
            added_generators: vec!["_p0".into()],
        })
        .unwrap();
        assert!(text.contains("\"report\":\"wp-grammar\""), "{}", text);
        assert!(text.contains("\"budget-limited\""), "{}", text);
    }

    #[test]
    fn none_fields_are_omitted() {
        let text = serde_json::to_string(&Report::Classify {
            classification: "unknown".into(),
            element_count: None,
            witness_kind: None,
            witness: None,
        })
        .unwrap();
        assert!(!text.contains("element_count"), "{}", text);
        assert!(!text.contains("witness"), "{}", text);
    }

    #[test]
    fn empty_words_render_as_epsilon() {
        assert_eq!(show(""), "\u{3b5}");
        assert_eq!(show("bc"), "bc");
    }
}
