//! Satisfiability checking for multi-modal hybrid logic with `@`, the binder
//! `↓`, converse and global modalities, transitivity and relation inclusions.
//!
//! The pipeline is [`parser::parse`] → [`preprocess::preprocess`] →
//! [`tableau::solve`], with [`semantics`] providing an independent
//! brute-force oracle and model extraction for open branches.

pub mod blocking;
pub mod fragment;
pub mod generators;
pub mod parser;
pub mod preprocess;
pub mod semantics;
pub mod syntax;
pub mod tableau;
