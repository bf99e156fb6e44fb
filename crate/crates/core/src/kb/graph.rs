use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{Iri, Term};

/// A subject/predicate/object triple. Subject and predicate are always IRIs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Statement {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Statement {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Self { subject, predicate, object: object.into() }
    }

    /// `ex:a ex:p 1 .`
    pub fn to_text(&self) -> String {
        format!("{} {} {} .", self.subject, self.predicate, self.object.to_text())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object.to_text())
    }
}

/// Serialized as `{s, p, o}` strings in the facts term grammar.
impl Serialize for Statement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Statement", 3)?;
        st.serialize_field("s", &self.subject)?;
        st.serialize_field("p", &self.predicate)?;
        st.serialize_field("o", &self.object)?;
        st.end()
    }
}

/// An insertion-ordered set of statements plus the prefix table they were
/// written against.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    prefixes: IndexMap<String, String>,
    statements: IndexSet<Statement>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// An empty graph sharing `other`'s prefix table.
    pub fn with_prefixes_of(other: &Graph) -> Self {
        Self { prefixes: other.prefixes.clone(), statements: IndexSet::new() }
    }

    pub fn add_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn prefixes(&self) -> &IndexMap<String, String> {
        &self.prefixes
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    /// Full IRI for a prefixed name, if its prefix is declared.
    pub fn expand(&self, iri: &Iri) -> Option<String> {
        self.namespace(&iri.prefix).map(|ns| format!("{ns}{}", iri.local))
    }

    /// Returns false (and leaves the graph unchanged) for a duplicate.
    pub fn insert(&mut self, statement: Statement) -> bool {
        self.statements.insert(statement)
    }

    pub fn contains(&self, statement: &Statement) -> bool {
        self.statements.contains(statement)
    }

    pub fn index_of(&self, statement: &Statement) -> Option<usize> {
        self.statements.get_index_of(statement)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter()
    }

    pub fn statements(&self) -> Vec<Statement> {
        self.statements.iter().cloned().collect()
    }
}

/// Graphs compare by prefix table and statement sequence.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.prefixes == other.prefixes && self.statements.iter().eq(other.statements.iter())
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Statement;
    type IntoIter = indexmap::set::Iter<'a, Statement>;

    fn into_iter(self) -> Self::IntoIter {
        self.statements.iter()
    }
}

impl Extend<Statement> for Graph {
    fn extend<T: IntoIterator<Item = Statement>>(&mut self, iter: T) {
        self.statements.extend(iter);
    }
}
