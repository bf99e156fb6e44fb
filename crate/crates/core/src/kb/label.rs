//! Human-readable labels for terms and statements.
//!
//! Predicates like `ex:dtiRatio` become `DTI Ratio`: the local name is split
//! on camelCase boundaries, each token is title-cased, and tokens found in
//! the acronym table are replaced wholesale.

use std::collections::HashMap;

use indexmap::IndexMap;

use super::{Graph, Iri, Statement, Term};

#[derive(Clone, Debug)]
pub struct LabelTable {
    acronyms: HashMap<String, String>,
    overrides: HashMap<String, String>,
    prefixes: IndexMap<String, String>,
}

impl Default for LabelTable {
    fn default() -> Self {
        let mut acronyms = HashMap::new();
        acronyms.insert("dti".to_string(), "DTI".to_string());
        Self { acronyms, overrides: HashMap::new(), prefixes: IndexMap::new() }
    }
}

impl LabelTable {
    /// Default table whose overrides resolve against `graph`'s prefixes.
    pub fn for_graph(graph: &Graph) -> Self {
        Self { prefixes: graph.prefixes().clone(), ..Self::default() }
    }

    pub fn with_acronym(mut self, token: &str, display: impl Into<String>) -> Self {
        self.acronyms.insert(token.to_lowercase(), display.into());
        self
    }

    /// Override the label of a full IRI.
    pub fn with_override(mut self, full_iri: impl Into<String>, label: impl Into<String>) -> Self {
        self.overrides.insert(full_iri.into(), label.into());
        self
    }

    fn override_for(&self, iri: &Iri) -> Option<&str> {
        let ns = self.prefixes.get(&iri.prefix)?;
        self.overrides.get(&format!("{ns}{}", iri.local)).map(String::as_str)
    }

    pub fn label_iri(&self, iri: &Iri) -> String {
        if let Some(label) = self.override_for(iri) {
            return label.to_string();
        }
        split_words(&iri.local)
            .into_iter()
            .map(|word| match self.acronyms.get(&word.to_lowercase()) {
                Some(acronym) => acronym.clone(),
                None => title_case(&word),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn label(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.label_iri(iri),
            Term::Number(n) => n.lexical(),
            Term::Str(s) => s.clone(),
        }
    }

    /// `applicant1 has Loan Eligibility: Not Eligible`
    pub fn format_statement(&self, s: &Statement) -> String {
        format!("{} has {}: {}", s.subject.local, self.label_iri(&s.predicate), self.label(&s.object))
    }
}

/// Free-function form of [`LabelTable::label`].
pub fn label(term: &Term, table: &LabelTable) -> String {
    table.label(term)
}

/// Free-function form of [`LabelTable::format_statement`].
pub fn format_statement(statement: &Statement, table: &LabelTable) -> String {
    table.format_statement(statement)
}

fn title_case(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// `dtiRatio` -> [dti, Ratio]; `HTTPServer` -> [HTTP, Server]; `_` and `-`
/// also separate words.
fn split_words(local: &str) -> Vec<String> {
    let chars: Vec<char> = local.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c == '-' {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                words.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}
