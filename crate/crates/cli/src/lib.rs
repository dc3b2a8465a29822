//! Command-line front end: argument parsing, file formats that only matter
//! at the boundary (units specs, monadic rule files, reports), and a disk
//! cache for synthesized grammars.

pub mod app;
pub mod cache;
pub mod report;
pub mod rules_file;
pub mod units_file;
pub mod words;

pub use app::run;
