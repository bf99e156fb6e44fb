//! A forward-chaining rule engine over triples that records how every
//! inferred statement was derived, and explains its conclusions.
//!
//! ```
//! use rulelens_core::{fixtures, infer, explain};
//!
//! let loan = fixtures::load_fixture("loan").unwrap();
//! let model = infer(&loan.graph, &loan.rules).unwrap();
//! assert_eq!(model.inferred().len(), 6);
//! let statement = model.inferred().iter().next().unwrap().clone();
//! let trace = explain::trace(&model, &statement).unwrap();
//! assert_eq!(trace.rule.as_ref().unwrap().name, "DTIRule");
//! ```

pub mod error;
pub mod explain;
pub mod fixtures;
pub mod inference;
pub mod kb;
mod lexer;
pub mod rules;

pub use error::{ParseError, ParseErrorKind};
pub use inference::{
    derivations_of, infer, infer_with, is_asserted, list_statements, Derivation, InferenceConfig, InferenceError,
    InferenceModel, ModelError, Which, DEFAULT_MAX_INFERRED,
};
pub use kb::{Graph, Iri, LabelTable, Number, Statement, Term};
pub use rules::{parse_rules, Rule};
