//! Connection-aware motif mining for molecular graphs.

pub mod chem;
pub mod corpus;
pub mod format;
pub mod generator;
pub mod merging;
pub mod metrics;
pub mod miner;
pub mod ops;
pub mod tokenizer;
pub mod vocab;
