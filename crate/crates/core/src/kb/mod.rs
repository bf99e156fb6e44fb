//! Terms, statements, graphs, labels and the triple text format.

mod graph;
mod label;
mod term;
mod triples;

pub use graph::{Graph, Statement};
pub use label::{format_statement, label, LabelTable};
pub use term::{Iri, Number, NumberShape, Term};
pub use triples::{
    parse_statement, parse_term, parse_triples, parse_triples_with_warnings, serialize_triples, ParseWarning,
    ParsedTriples,
};

pub(crate) use term::quote;
pub(crate) use triples::{literal, parse_prefix_decl, prefix_block};
