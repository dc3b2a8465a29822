//! End-to-end checks of the `smwp` binary: exit codes, JSON reports that
//! round-trip through the DTOs, cache behavior, and the auto-normalize
//! chaining path.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use smwp_cli::report::Report;
use smwp_core::brute;
use smwp_core::lang::parse_grammar;
use smwp_core::word::{Letter, Word};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smwp"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn smwp")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Run with `--format json` and parse the report back through the DTOs.
fn json_report(args: &[&str]) -> (i32, Report) {
    let out = bin()
        .arg("--format")
        .arg("json")
        .args(args)
        .output()
        .expect("spawn smwp");
    let text = stdout(&out);
    let report: Report = serde_json::from_str(&text)
        .unwrap_or_else(|e| panic!("unparseable report ({}): {}", e, text));
    (code(&out), report)
}

/// Copy fixtures into a fresh directory so cache files never land in the
/// checked-in tree.
fn sandbox(names: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().expect("tempdir");
    for name in names {
        fs::copy(fixture(name), dir.path().join(name)).expect("copy fixture");
    }
    dir
}

fn path_str(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn validate_reports_diagnostics() {
    let out = run(&["validate", fixture("bicyclic.smp").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("ok"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.smp");
    fs::write(&bad, "generators: a\nrelator: ab\n").unwrap();
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("error"));
}

#[test]
fn pieces_reports_the_known_factorization() {
    let (status, report) = json_report(&["pieces", fixture("p1.smp").to_str().unwrap()]);
    assert_eq!(status, 0);
    match report {
        Report::Pieces {
            pieces,
            factorizations,
            weight,
            ..
        } => {
            assert_eq!(pieces, vec!["aabbacc", "ab", "ac"]);
            assert_eq!(factorizations, vec![vec![0], vec![1, 2, 1]]);
            assert_eq!(weight, 8);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn normalize_writes_a_loadable_presentation() {
    let dir = sandbox(&["p1.smp"]);
    let out_path = path_str(&dir, "p1-normal.smp");
    let (status, report) = json_report(&[
        "normalize",
        &path_str(&dir, "p1.smp"),
        "-o",
        &out_path,
    ]);
    assert_eq!(status, 0);
    match report {
        Report::Normalize {
            generators,
            pieces,
            weight,
            steps,
            output,
        } => {
            assert_eq!(generators, vec!["a", "b", "c", "_p0", "_p1"]);
            assert_eq!(pieces.len(), 5);
            assert_eq!(weight, 6);
            assert_eq!(steps.len(), 2);
            assert_eq!(output, out_path);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
    // The written presentation is itself normalized.
    let (status, report) = json_report(&["pieces", &out_path]);
    assert_eq!(status, 0);
    match report {
        Report::Pieces { pieces, weight, .. } => {
            assert_eq!(pieces.len(), 5);
            assert_eq!(weight, 6);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn units_reports_class_structure() {
    let (status, report) = json_report(&["units", fixture("bicyclic.smp").to_str().unwrap()]);
    assert_eq!(status, 0);
    match report {
        Report::Units {
            class_count,
            pieces,
            piece_class,
            class_reps,
            relator_images,
            ..
        } => {
            assert_eq!(class_count, 1);
            assert_eq!(pieces, vec!["bc"]);
            assert_eq!(piece_class, vec![0]);
            assert_eq!(class_reps, vec!["bc"]);
            assert_eq!(relator_images, vec!["b1"]);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn wp_grammar_caches_and_honors_no_cache() {
    let dir = sandbox(&["bicyclic.smp", "trivial.us"]);
    let pres = path_str(&dir, "bicyclic.smp");
    let units = path_str(&dir, "trivial.us");
    let out_path = path_str(&dir, "wp.cfg");

    let (status, report) = json_report(&[
        "wp-grammar", &pres, "--units", &units, "-o", &out_path,
    ]);
    assert_eq!(status, 0);
    let first_nonterminals = match report {
        Report::WpGrammar {
            cached,
            normalized,
            nonterminals,
            added_generators,
            ..
        } => {
            assert!(!cached);
            assert!(!normalized);
            assert!(added_generators.is_empty());
            nonterminals
        }
        other => panic!("wrong report kind: {:?}", other),
    };
    let cache_dir = dir.path().join(".smwp-cache");
    assert!(cache_dir.is_dir(), "cache directory created beside the input");
    assert_eq!(fs::read_dir(&cache_dir).unwrap().count(), 1);

    // The written grammar recognizes the word problem language directly.
    let text = fs::read_to_string(&out_path).unwrap();
    let g = parse_grammar(&text, false).unwrap().compile();
    let wp_word = |u: &str, v: &str| {
        let mut w: Vec<Letter> = Word::from_str_chars(u).unwrap().0;
        w.push(Letter::HASH);
        w.extend(Word::from_str_chars(v).unwrap().reversed().0);
        Word(w)
    };
    assert!(g.contains(&wp_word("bc", "")));
    assert!(g.contains(&wp_word("bbcc", "bc")));
    assert!(!g.contains(&wp_word("cb", "")));

    // Second run hits the cache and reports identical structure.
    let (status, report) = json_report(&[
        "wp-grammar", &pres, "--units", &units, "-o", &out_path,
    ]);
    assert_eq!(status, 0);
    match report {
        Report::WpGrammar {
            cached,
            nonterminals,
            ..
        } => {
            assert!(cached);
            assert_eq!(nonterminals, first_nonterminals);
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    // A corrupt cache entry is ignored, recomputed, and rewritten.
    for entry in fs::read_dir(&cache_dir).unwrap() {
        fs::write(entry.unwrap().path(), "not json").unwrap();
    }
    let (status, report) = json_report(&[
        "wp-grammar", &pres, "--units", &units, "-o", &out_path,
    ]);
    assert_eq!(status, 0);
    match report {
        Report::WpGrammar { cached, .. } => assert!(!cached),
        other => panic!("wrong report kind: {:?}", other),
    }

    // --no-cache never touches the directory.
    let clean = sandbox(&["bicyclic.smp", "trivial.us"]);
    let out = run(&[
        "decide",
        &path_str(&clean, "bicyclic.smp"),
        "--units",
        &path_str(&clean, "trivial.us"),
        "--no-cache",
        "bc",
        "",
    ]);
    assert_eq!(code(&out), 0);
    assert!(!clean.path().join(".smwp-cache").exists());
}

#[test]
fn decide_exit_codes_match_the_verdict() {
    let dir = sandbox(&["bicyclic.smp", "trivial.us"]);
    let pres = path_str(&dir, "bicyclic.smp");
    let units = path_str(&dir, "trivial.us");

    let cases = [
        ("bc", "", true),
        ("bbcc", "bc", true),
        ("cb", "", false),
        ("b", "c", false),
        ("", "", true),
    ];
    for (u, v, equal) in cases {
        let (status, report) = json_report(&["decide", &pres, "--units", &units, u, v]);
        assert_eq!(status, if equal { 0 } else { 1 }, "({:?}, {:?})", u, v);
        match report {
            Report::Decide {
                left,
                right,
                equal: got,
                ..
            } => {
                assert_eq!(left, u);
                assert_eq!(right, v);
                assert_eq!(got, equal);
            }
            other => panic!("wrong report kind: {:?}", other),
        }
        // Text mode agrees on the exit code.
        let out = run(&["decide", &pres, "--units", &units, u, v]);
        assert_eq!(code(&out), if equal { 0 } else { 1 });
    }
}

#[test]
fn invertible_and_ratmem_exit_codes() {
    let dir = sandbox(&["bicyclic.smp", "trivial.us"]);
    let pres = path_str(&dir, "bicyclic.smp");
    let units = path_str(&dir, "trivial.us");

    let out = run(&["invertible", &pres, "--units", &units, "bc"]);
    assert_eq!(code(&out), 0);
    let out = run(&["invertible", &pres, "--units", &units, "b"]);
    assert_eq!(code(&out), 1);

    let (status, report) = json_report(&[
        "ratmem", &pres, "--units", &units, "bbcc", "--regex", "(bc)*",
    ]);
    assert_eq!(status, 0);
    match report {
        Report::Ratmem { member, .. } => assert!(member),
        other => panic!("wrong report kind: {:?}", other),
    }
    let out = run(&[
        "ratmem", &pres, "--units", &units, "cb", "--regex", "(bc)*",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn class_enumerates_the_congruence_class() {
    let dir = sandbox(&["bicyclic.smp", "trivial.us"]);
    let (status, report) = json_report(&[
        "class",
        &path_str(&dir, "bicyclic.smp"),
        "--units",
        &path_str(&dir, "trivial.us"),
        "",
        "--maxlen",
        "6",
    ]);
    assert_eq!(status, 0);
    match report {
        Report::Class {
            members,
            cross_checked,
            cross_check_skipped,
            ..
        } => {
            let got: BTreeSet<String> = members.into_iter().collect();
            let b = Letter::ch('b');
            let c = Letter::ch('c');
            let expected: BTreeSet<String> = brute::words_over(&[b, c], 6)
                .into_iter()
                .filter(|w| brute::dyck(b, c, w))
                .map(|w| w.render())
                .collect();
            assert_eq!(got, expected);
            assert_eq!(cross_checked, expected.len());
            assert_eq!(cross_check_skipped, 0);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn ancestors_writes_the_closure_grammar() {
    let dir = sandbox(&["empty-seed.cfg", "dyck.rules"]);
    let out_path = path_str(&dir, "closure.cfg");
    let (status, report) = json_report(&[
        "ancestors",
        &path_str(&dir, "empty-seed.cfg"),
        &path_str(&dir, "dyck.rules"),
        "-o",
        &out_path,
    ]);
    assert_eq!(status, 0);
    match report {
        Report::Ancestors { output, .. } => assert_eq!(output, out_path),
        other => panic!("wrong report kind: {:?}", other),
    }
    let g = parse_grammar(&fs::read_to_string(&out_path).unwrap(), false)
        .unwrap()
        .compile();
    let b = Letter::ch('b');
    let c = Letter::ch('c');
    for w in brute::words_over(&[b, c], 7) {
        assert_eq!(g.contains(&w), brute::dyck(b, c, &w), "{}", w.render());
    }
}

#[test]
fn oracle_exit_codes_cover_all_three_verdicts() {
    let pres = fixture("bicyclic.smp");
    let pres = pres.to_str().unwrap();

    let (status, report) = json_report(&["oracle", pres, "bbcc", "bc"]);
    assert_eq!(status, 0);
    match report {
        Report::Oracle {
            verdict, trace_len, ..
        } => {
            assert_eq!(verdict, "equal");
            assert!(trace_len.is_some());
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    let (status, report) = json_report(&["oracle", pres, "b", "c"]);
    assert_eq!(status, 1);
    match report {
        Report::Oracle {
            verdict,
            certificate,
            ..
        } => {
            assert_eq!(verdict, "not-equal");
            assert!(certificate.is_some());
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    // A non-confluent system with an abelianization-equal pair: nothing
    // short-circuits, so a tiny budget forces the unknown verdict.
    let hard = fixture("p1.smp");
    let (status, report) = json_report(&[
        "oracle",
        hard.to_str().unwrap(),
        "ab",
        "ba",
        "--max-visited",
        "2",
    ]);
    assert_eq!(status, 2);
    match report {
        Report::Oracle { verdict, .. } => assert_eq!(verdict, "unknown"),
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn classify_exit_codes_follow_the_classification() {
    let (status, report) = json_report(&["classify", fixture("zmod3.smp").to_str().unwrap()]);
    assert_eq!(status, 0);
    match report {
        Report::Classify {
            classification,
            element_count,
            ..
        } => {
            assert_eq!(classification, "finite-group");
            assert_eq!(element_count, Some(3));
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    let (status, report) = json_report(&["classify", fixture("bicyclic.smp").to_str().unwrap()]);
    assert_eq!(status, 1);
    match report {
        Report::Classify {
            classification,
            witness_kind,
            witness,
            ..
        } => {
            assert_eq!(classification, "not-finite-group");
            assert_eq!(witness_kind.as_deref(), Some("non-invertible-generator"));
            assert!(witness.is_some());
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    let (status, report) = json_report(&["classify", fixture("freegroup.smp").to_str().unwrap()]);
    assert_eq!(status, 1);
    match report {
        Report::Classify { witness_kind, .. } => {
            assert_eq!(witness_kind.as_deref(), Some("growth"));
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    let out = run(&["classify", fixture("p1.smp").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_three() {
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 3);
    let out = run(&["decide", fixture("bicyclic.smp").to_str().unwrap()]);
    assert_eq!(code(&out), 3, "missing required arguments");
    let out = run(&["pieces", "/nonexistent/path.smp"]);
    assert_eq!(code(&out), 3);
    let dir = sandbox(&["bicyclic.smp", "trivial.us"]);
    let out = run(&[
        "ratmem",
        &path_str(&dir, "bicyclic.smp"),
        "--units",
        &path_str(&dir, "trivial.us"),
        "--no-cache",
        "b",
        "--regex",
        "(bc",
    ]);
    assert_eq!(code(&out), 3, "unbalanced regex");
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn non_normalized_presentations_are_normalized_on_the_fly() {
    let dir = sandbox(&["nonnorm.smp", "trivial.us"]);
    let pres = path_str(&dir, "nonnorm.smp");
    let units = path_str(&dir, "trivial.us");
    let out_path = path_str(&dir, "wp.cfg");

    let (status, report) = json_report(&[
        "wp-grammar", &pres, "--units", &units, "-o", &out_path,
    ]);
    assert_eq!(status, 0);
    match report {
        Report::WpGrammar {
            normalized,
            added_generators,
            ..
        } => {
            assert!(normalized);
            assert_eq!(added_generators, vec!["_p0"]);
        }
        other => panic!("wrong report kind: {:?}", other),
    }

    // Verdicts are still about the original generators: this monoid embeds
    // the balanced language the same way the one-relator one does.
    for (u, v, equal) in [("ab", "", true), ("aabb", "", true), ("ba", "", false)] {
        let out = run(&["decide", &pres, "--units", &units, u, v]);
        assert_eq!(code(&out), if equal { 0 } else { 1 }, "({:?}, {:?})", u, v);
    }

    // Class enumeration stays inside the original alphabet.
    let (status, report) = json_report(&[
        "class", &pres, "--units", &units, "", "--maxlen", "4",
    ]);
    assert_eq!(status, 0);
    match report {
        Report::Class { members, .. } => {
            assert_eq!(members, vec!["", "ab", "aabb", "abab"]);
        }
        other => panic!("wrong report kind: {:?}", other),
    }
}

#[test]
fn alternate_units_specs_work_end_to_end() {
    // Finite units from a table file.
    let dir = sandbox(&["zmod3.smp", "zmod3.us"]);
    let pres = path_str(&dir, "zmod3.smp");
    let units = path_str(&dir, "zmod3.us");
    for (u, v, equal) in [("aaa", "", true), ("a", "", false), ("aaaa", "a", true)] {
        let out = run(&["decide", &pres, "--units", &units, "--no-cache", u, v]);
        assert_eq!(code(&out), if equal { 0 } else { 1 }, "({:?}, {:?})", u, v);
    }

    // Free units from an inverse-pairing file.
    let dir = sandbox(&["freegroup.smp", "free.us"]);
    let pres = path_str(&dir, "freegroup.smp");
    let units = path_str(&dir, "free.us");
    for (u, v, equal) in [("ab", "ba", true), ("aabb", "", true), ("a", "b", false)] {
        let out = run(&["decide", &pres, "--units", &units, "--no-cache", u, v]);
        assert_eq!(code(&out), if equal { 0 } else { 1 }, "({:?}, {:?})", u, v);
    }

    // An explicit word-problem grammar agrees with the built-in trivial
    // builder everywhere we look.
    let dir = sandbox(&["bicyclic.smp", "trivial.us", "grammar.us", "bicyclic-wp.cfg"]);
    let pres = path_str(&dir, "bicyclic.smp");
    let trivial = path_str(&dir, "trivial.us");
    let grammar = path_str(&dir, "grammar.us");
    for (u, v) in [("bc", ""), ("cb", ""), ("bbc", "b"), ("bcb", "b")] {
        let via_builder = code(&run(&[
            "decide", &pres, "--units", &trivial, "--no-cache", u, v,
        ]));
        let via_grammar = code(&run(&[
            "decide", &pres, "--units", &grammar, "--no-cache", u, v,
        ]));
        assert_eq!(via_builder, via_grammar, "({:?}, {:?})", u, v);
        assert!(via_builder == 0 || via_builder == 1);
    }
}
