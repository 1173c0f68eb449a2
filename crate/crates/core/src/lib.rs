//! Topic modeling and co-occurrence network analysis for timestamped
//! document corpora.

pub mod corpus;
pub mod dtm;
pub mod error;
pub mod graphalg;
pub mod netbuild;
pub mod nmf;
pub mod report;
pub mod textprep;

pub use error::{Error, Result};
