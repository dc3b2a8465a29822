//! Context-free languages and the closure machinery the decision pipeline
//! is built from.
//!
//! The submodules provide:
//!
//! * [`grammar`]: context-free grammars with the closure operations (union,
//!   concatenation, star, reversal, substitution, regular intersection),
//!   Chomsky normal form, CYK membership, emptiness, and enumeration;
//! * [`nfa`]: nondeterministic finite automata, a small regular-expression
//!   parser, determinization and complement;
//! * [`transducer`]: finite transducers and images/preimages of context-free
//!   languages under them;
//! * [`monadic`]: ancestor languages of context-free rewriting systems with
//!   right-hand sides of length at most one.

pub mod grammar;
pub mod monadic;
pub mod nfa;
pub mod transducer;

pub use grammar::{
    parse_grammar, serialize_grammar, CnfGrammar, CompiledGrammar, Grammar, NtId, Symbol,
};
pub use monadic::{ancestors, MonadicRule};
pub use nfa::Nfa;
pub use transducer::Transducer;
