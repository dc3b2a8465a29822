//! Decision procedures and grammar constructions for the word problem in
//! special monoids.
//!
//! A *special monoid* is one presented by relations of the form `w = 1`.
//! This crate takes such a presentation and
//!
//! * computes its invertible pieces and the presentation of its group of
//!   units ([`pieces`]),
//! * rewrites the presentation so that no piece properly contains a product
//!   of pieces of length > 1 ([`pieces::normalize`]),
//! * given a context-free word problem for the group of units, synthesizes
//!   context-free grammars for the invertible-word problem and the full word
//!   problem of the monoid, and answers equality and rational-subset
//!   membership queries from them ([`pipeline`]),
//! * cross-checks everything at small scale against a brute-force congruence
//!   oracle ([`oracle`], [`brute`]).
//!
//! The grammar machinery ([`lang`]) is a small, self-contained context-free
//! toolkit: closure operations (union, concatenation, star, reversal,
//! substitution), products with finite automata and rational transducers,
//! the ancestor construction for monadic rewriting systems, Chomsky normal
//! form, and CYK membership.
//!
//! The crate is `no_std` + `alloc`; everything that touches files or
//! processes lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod brute;
pub mod lang;
pub mod oracle;
pub mod pieces;
pub mod pipeline;
pub mod presentation;
pub mod word;

pub use presentation::SpecialPresentation;
pub use word::{Letter, Word};
