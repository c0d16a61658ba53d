//! Learning library for network intrusion detection over KDD99-format
//! flow records: a naive Bayes classifier, an ID3 decision tree, and a
//! hybrid learner that grows an information-gain tree whose every node
//! carries its own naive Bayes tables.

pub mod bayes;
pub mod data;
pub mod error;
pub mod preprocess;
pub mod schema;

#[cfg(test)]
pub(crate) mod testutil;

pub use data::{Category, ClassLabel, Dataset, Example, SymbolTable, Value};
pub use error::{Error, Result};
pub use schema::{AttrKind, AttributeSchema, LabelMap};
