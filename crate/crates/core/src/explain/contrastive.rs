//! Contrastive explanations: what two subjects share and where they differ.
//!
//! Each subject is projected to its features, i.e. the values of every
//! predicate (asserted or inferred) it is the subject of, except its type.
//! A predicate whose value sets coincide is a similarity; anything else is a
//! difference.

use indexmap::IndexMap;
use serde::Serialize;

use crate::inference::InferenceModel;
use crate::kb::{Iri, LabelTable, Statement, Term};

use super::{is_type_predicate, ExplainError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContrastiveExplanation {
    pub subject: Iri,
    pub alternate_subject: Iri,
    /// Shared facts, phrased with `subject`.
    pub similarities: Vec<Statement>,
    pub differences: Vec<Difference>,
}

/// One differing value pair; a side is `None` when that subject lacks a
/// value the other has.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Difference {
    pub predicate: Iri,
    pub this_value: Option<Term>,
    pub alternate_value: Option<Term>,
}

/// Feature values of `subject` keyed by predicate, in first-appearance
/// order (base statements first, then inferred ones).
pub(crate) fn features_of(model: &InferenceModel, subject: &Iri) -> Option<IndexMap<Iri, Vec<Term>>> {
    let mut found = false;
    let mut features: IndexMap<Iri, Vec<Term>> = IndexMap::new();
    for s in model.iter().filter(|s| &s.subject == subject) {
        found = true;
        if !is_type_predicate(&s.predicate) {
            features.entry(s.predicate.clone()).or_default().push(s.object.clone());
        }
    }
    found.then_some(features)
}

pub fn contrastive(
    this_model: &InferenceModel,
    this_subject: &Iri,
    alt_model: &InferenceModel,
    alt_subject: &Iri,
) -> Result<ContrastiveExplanation, ExplainError> {
    let this =
        features_of(this_model, this_subject).ok_or_else(|| ExplainError::UnknownSubject(this_subject.clone()))?;
    let alt = features_of(alt_model, alt_subject).ok_or_else(|| ExplainError::UnknownSubject(alt_subject.clone()))?;

    let predicates = this.keys().chain(alt.keys().filter(|p| !this.contains_key(*p)));
    let mut similarities = Vec::new();
    let mut differences = Vec::new();
    let empty = Vec::new();
    for predicate in predicates {
        let ours = this.get(predicate).unwrap_or(&empty);
        let theirs = alt.get(predicate).unwrap_or(&empty);
        let same = ours.len() == theirs.len() && ours.iter().all(|v| theirs.contains(v));
        if same {
            similarities
                .extend(ours.iter().map(|v| Statement::new(this_subject.clone(), predicate.clone(), v.clone())));
            continue;
        }
        let only_ours: Vec<&Term> = ours.iter().filter(|v| !theirs.contains(v)).collect();
        let only_theirs: Vec<&Term> = theirs.iter().filter(|v| !ours.contains(v)).collect();
        for i in 0..only_ours.len().max(only_theirs.len()) {
            differences.push(Difference {
                predicate: predicate.clone(),
                this_value: only_ours.get(i).map(|v| (*v).clone()),
                alternate_value: only_theirs.get(i).map(|v| (*v).clone()),
            });
        }
    }
    Ok(ContrastiveExplanation {
        subject: this_subject.clone(),
        alternate_subject: alt_subject.clone(),
        similarities,
        differences,
    })
}

fn difference_value(value: &Option<Term>, labels: &LabelTable) -> String {
    match value {
        Some(Term::Number(n)) => n.fixed2(),
        Some(other) => labels.label(other),
        None => "no value".to_string(),
    }
}

pub fn render_contrastive(c: &ContrastiveExplanation, labels: &LabelTable) -> String {
    let mut lines = vec!["Similarities:".to_string()];
    if c.similarities.is_empty() {
        lines.push("    - (none)".to_string());
    }
    lines.extend(c.similarities.iter().map(|s| format!("    - {}", labels.format_statement(s))));
    lines.push(String::new());
    lines.push("Differences:".to_string());
    if c.differences.is_empty() {
        lines.push("    - (none)".to_string());
    }
    for d in &c.differences {
        lines.push(format!(
            "    - For {}: this model has {} while the alternate model has {}",
            labels.label_iri(&d.predicate),
            difference_value(&d.this_value, labels),
            difference_value(&d.alternate_value, labels),
        ));
    }
    lines.join("\n")
}
