//! The units spec file: how the user declares the word problem of the
//! group of units.
//!
//! Line-oriented, `#` comments. The first directive selects the kind:
//!
//! ```text
//! units: trivial
//! ```
//!
//! ```text
//! units: finite
//! elements: e g h        # element names, defines table row/column order
//! identity: e
//! table:
//! e g h                  # row x: the products x·e, x·g, x·h
//! g h e
//! h e g
//! generators: g          # the element of each unit generator b1, b2, …
//! ```
//!
//! ```text
//! units: free
//! inverse: b1 b2         # pairing lines; every generator exactly once
//! ```
//!
//! ```text
//! units: grammar wp.cfg  # grammar over 'b1' … 'bm' '#' accepting x#yʳᵉᵛ
//! inverse: b1 b2         # accepted for interface compatibility; unused
//! ```
//!
//! The grammar path is resolved relative to the units file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use smwp_core::lang::parse_grammar;
use smwp_core::pipeline::{UnitsBuilder, UnitsWpSpec};

/// A parsed units file, before the presentation's class count is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitsFile {
    Trivial,
    Finite {
        element_names: Vec<String>,
        identity: usize,
        table: Vec<Vec<usize>>,
        generator_elements: Vec<usize>,
    },
    Free {
        /// Pairs of zero-based generator indices.
        pairs: Vec<(usize, usize)>,
    },
    Grammar { path: PathBuf },
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Zero-based index of a `bN` generator name.
fn generator_index(name: &str) -> Result<usize> {
    let n: usize = name
        .strip_prefix('b')
        .and_then(|d| d.parse().ok())
        .with_context(|| format!("expected a generator name like b1, got {:?}", name))?;
    if n == 0 {
        bail!("generator names start at b1");
    }
    Ok(n - 1)
}

pub fn parse_units_file(text: &str) -> Result<UnitsFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());

    let (no, first) = lines.next().context("empty units file")?;
    let kind = first
        .strip_prefix("units:")
        .with_context(|| format!("line {}: expected a units: directive", no))?
        .trim();

    match kind {
        "trivial" => {
            if let Some((no, l)) = lines.next() {
                bail!("line {}: unexpected {:?} after units: trivial", no, l);
            }
            Ok(UnitsFile::Trivial)
        }
        "free" => {
            let mut pairs = Vec::new();
            for (no, l) in lines {
                let rest = l
                    .strip_prefix("inverse:")
                    .with_context(|| format!("line {}: expected an inverse: line", no))?;
                let names: Vec<&str> = rest.split_whitespace().collect();
                if names.len() != 2 {
                    bail!("line {}: inverse: takes exactly two generator names", no);
                }
                pairs.push((generator_index(names[0])?, generator_index(names[1])?));
            }
            Ok(UnitsFile::Free { pairs })
        }
        "finite" => parse_finite(lines),
        _ => {
            if let Some(path) = kind.strip_prefix("grammar") {
                let path = path.trim();
                if path.is_empty() {
                    bail!("units: grammar needs a file path");
                }
                for (no, l) in lines {
                    if !l.starts_with("inverse:") {
                        bail!("line {}: unexpected {:?} after units: grammar", no, l);
                    }
                }
                Ok(UnitsFile::Grammar {
                    path: PathBuf::from(path),
                })
            } else {
                bail!("unknown units kind {:?}", kind)
            }
        }
    }
}

fn parse_finite<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<UnitsFile> {
    let mut element_names: Option<Vec<String>> = None;
    let mut identity: Option<usize> = None;
    let mut table: Vec<Vec<usize>> = Vec::new();
    let mut generator_elements: Option<Vec<usize>> = None;
    let mut in_table = false;

    let lookup = |names: &Option<Vec<String>>, name: &str, no: usize| -> Result<usize> {
        names
            .as_ref()
            .context("elements: line must come first")?
            .iter()
            .position(|n| n == name)
            .with_context(|| format!("line {}: unknown element {:?}", no, name))
    };

    for (no, l) in lines {
        if let Some(rest) = l.strip_prefix("elements:") {
            element_names = Some(rest.split_whitespace().map(String::from).collect());
            in_table = false;
        } else if let Some(rest) = l.strip_prefix("identity:") {
            identity = Some(lookup(&element_names, rest.trim(), no)?);
            in_table = false;
        } else if l == "table:" {
            in_table = true;
        } else if let Some(rest) = l.strip_prefix("generators:") {
            let mut gens = Vec::new();
            for name in rest.split_whitespace() {
                gens.push(lookup(&element_names, name, no)?);
            }
            generator_elements = Some(gens);
            in_table = false;
        } else if in_table {
            let mut row = Vec::new();
            for name in l.split_whitespace() {
                row.push(lookup(&element_names, name, no)?);
            }
            table.push(row);
        } else {
            bail!("line {}: unexpected {:?} in units: finite block", no, l);
        }
    }

    let element_names = element_names.context("units: finite needs an elements: line")?;
    if element_names.is_empty() {
        bail!("elements: line lists no elements");
    }
    if table.len() != element_names.len() {
        bail!(
            "table has {} rows for {} elements",
            table.len(),
            element_names.len()
        );
    }
    Ok(UnitsFile::Finite {
        identity: identity.context("units: finite needs an identity: line")?,
        generator_elements: generator_elements
            .context("units: finite needs a generators: line")?,
        element_names,
        table,
    })
}

impl UnitsFile {
    /// The path of the referenced grammar file, if any, resolved relative
    /// to the units file location.
    pub fn grammar_path(&self, units_path: &Path) -> Option<PathBuf> {
        match self {
            UnitsFile::Grammar { path } => Some(match units_path.parent() {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            }),
            _ => None,
        }
    }

    /// Convert to a pipeline spec for a presentation with `class_count`
    /// piece classes.
    pub fn to_spec(&self, class_count: usize, units_path: &Path) -> Result<UnitsWpSpec> {
        match self {
            UnitsFile::Trivial => Ok(UnitsWpSpec::Builder(UnitsBuilder::Trivial)),
            UnitsFile::Finite {
                identity,
                table,
                generator_elements,
                ..
            } => Ok(UnitsWpSpec::Builder(UnitsBuilder::Finite {
                identity: *identity,
                table: table.clone(),
                generator_elements: generator_elements.clone(),
            })),
            UnitsFile::Free { pairs } => {
                let mut partner = vec![usize::MAX; class_count];
                for &(i, j) in pairs {
                    for k in [i, j] {
                        if k >= class_count {
                            bail!(
                                "inverse: names b{} but there are only {} piece classes",
                                k + 1,
                                class_count
                            );
                        }
                    }
                    if partner[i] != usize::MAX || partner[j] != usize::MAX {
                        bail!("generator b{} or b{} paired twice", i + 1, j + 1);
                    }
                    partner[i] = j;
                    partner[j] = i;
                }
                if let Some(k) = partner.iter().position(|&p| p == usize::MAX) {
                    bail!("generator b{} has no inverse: line", k + 1);
                }
                Ok(UnitsWpSpec::Builder(UnitsBuilder::Free { partner }))
            }
            UnitsFile::Grammar { .. } => {
                let path = self.grammar_path(units_path).unwrap();
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading units grammar {}", path.display()))?;
                let g = parse_grammar(&text, true)
                    .map_err(|e| anyhow::anyhow!("parsing units grammar {}: {}", path.display(), e))?;
                Ok(UnitsWpSpec::Explicit(g))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_is_a_single_directive() {
        assert_eq!(
            parse_units_file("# comment\nunits: trivial\n").unwrap(),
            UnitsFile::Trivial
        );
        assert!(parse_units_file("units: trivial\nelements: e\n").is_err());
        assert!(parse_units_file("").is_err());
        assert!(parse_units_file("units: septimal\n").is_err());
    }

    #[test]
    fn finite_tables_resolve_element_names() {
        let parsed = parse_units_file(
            "units: finite\nelements: e g\nidentity: e\ntable:\ne g\ng e\ngenerators: g g\n",
        )
        .unwrap();
        assert_eq!(
            parsed,
            UnitsFile::Finite {
                element_names: vec!["e".into(), "g".into()],
                identity: 0,
                table: vec![vec![0, 1], vec![1, 0]],
                generator_elements: vec![1, 1],
            }
        );
        // Unknown names and missing directives are rejected.
        assert!(parse_units_file("units: finite\nelements: e\nidentity: x\n").is_err());
        assert!(parse_units_file("units: finite\nelements: e\ntable:\ne\ngenerators: e\n").is_err());
    }

    #[test]
    fn free_pairings_check_names_and_coverage() {
        let parsed = parse_units_file("units: free\ninverse: b1 b2\n").unwrap();
        assert_eq!(
            parsed,
            UnitsFile::Free {
                pairs: vec![(0, 1)]
            }
        );
        assert!(parse_units_file("units: free\ninverse: b0 b1\n").is_err());
        assert!(parse_units_file("units: free\ninverse: b1\n").is_err());

        let spec = parsed.to_spec(2, Path::new("free.us")).unwrap();
        assert!(matches!(
            spec,
            UnitsWpSpec::Builder(UnitsBuilder::Free { .. })
        ));
        // Out-of-range, double-paired, and unpaired generators all fail.
        assert!(parsed.to_spec(1, Path::new("free.us")).is_err());
        assert!(parsed.to_spec(3, Path::new("free.us")).is_err());
        let doubled = UnitsFile::Free {
            pairs: vec![(0, 1), (1, 0)],
        };
        assert!(doubled.to_spec(2, Path::new("free.us")).is_err());
    }

    #[test]
    fn grammar_paths_resolve_relative_to_the_units_file() {
        let parsed = parse_units_file("units: grammar wp.cfg\ninverse: b1 b1\n").unwrap();
        assert_eq!(
            parsed.grammar_path(Path::new("/etc/units/some.us")),
            Some(PathBuf::from("/etc/units/wp.cfg"))
        );
        let absolute = parse_units_file("units: grammar /tmp/wp.cfg\n").unwrap();
        assert_eq!(
            absolute.grammar_path(Path::new("some.us")),
            Some(PathBuf::from("/tmp/wp.cfg"))
        );
        assert!(parse_units_file("units: grammar\n").is_err());
    }
}
