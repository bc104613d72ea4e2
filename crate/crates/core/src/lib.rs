//! Abbreviation identification, expansion and evaluation for
//! historical-biographical text.

pub mod bridge;
pub mod classifier;
pub mod corpus;
pub mod evaluation;
pub mod expansion;
pub mod identifiers;
pub mod tokenization;
