//! Counterfactual explanations via the nearest unlike neighbor.
//!
//! Cases are subjects projected onto their features. The query case is
//! compared with every historical case that already has the desired outcome
//! under a range-normalized L1 distance; the closest one is the neighbor.
//! Only asserted features are ever substituted when testing changes — derived
//! features such as a ratio are recomputed by re-running inference.

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;
use tracing::debug;

use crate::inference::InferenceModel;
use crate::kb::{Graph, Iri, LabelTable, Statement, Term};

use super::{is_type_predicate, ExplainError};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseRecord {
    pub subject: Iri,
    /// First value of every predicate except the type and outcome
    /// predicates, in first-appearance order (base, then inferred).
    pub features: IndexMap<Iri, Term>,
    /// Features whose value is asserted rather than inferred.
    pub asserted: IndexSet<Iri>,
    pub outcome: Term,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureDifference {
    pub predicate: Iri,
    pub query_value: Term,
    pub neighbor_value: Term,
    /// Asserted features can be changed directly; derived ones only follow
    /// from changes to asserted ones.
    pub asserted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterfactualExplanation {
    pub outcome_predicate: Iri,
    pub query: CaseRecord,
    pub neighbor: CaseRecord,
    pub distance: f64,
    /// Derived features first, then asserted ones, each in feature order.
    pub differences: Vec<FeatureDifference>,
    /// Asserted differences that flip the outcome when substituted alone.
    pub flip_set: Vec<FeatureDifference>,
    /// Substituting every asserted difference yields the desired outcome.
    pub validated: bool,
}

impl CounterfactualExplanation {
    fn query_statement(&self) -> Statement {
        Statement::new(self.query.subject.clone(), self.outcome_predicate.clone(), self.query.outcome.clone())
    }

    fn neighbor_statement(&self) -> Statement {
        Statement::new(self.neighbor.subject.clone(), self.outcome_predicate.clone(), self.neighbor.outcome.clone())
    }
}

/// Projects `subject` to a case, or `None` if it has no statements.
pub fn case_record(
    model: &InferenceModel,
    subject: &Iri,
    outcome_predicate: &Iri,
    outcome: Term,
) -> Option<CaseRecord> {
    let mut found = false;
    let mut features = IndexMap::new();
    let mut asserted = IndexSet::new();
    for s in model.iter().filter(|s| &s.subject == subject) {
        found = true;
        if is_type_predicate(&s.predicate) || &s.predicate == outcome_predicate || features.contains_key(&s.predicate) {
            continue;
        }
        if model.base().contains(s) {
            asserted.insert(s.predicate.clone());
        }
        features.insert(s.predicate.clone(), s.object.clone());
    }
    found.then(|| CaseRecord { subject: subject.clone(), features, asserted, outcome })
}

/// Every subject other than `exclude` that has `desired` as a value of
/// `outcome_predicate`, in first-appearance order.
pub fn historical_cases(
    model: &InferenceModel,
    outcome_predicate: &Iri,
    desired: &Term,
    exclude: &Iri,
) -> Vec<CaseRecord> {
    let subjects: IndexSet<&Iri> = model
        .iter()
        .filter(|s| &s.predicate == outcome_predicate && &s.object == desired && &s.subject != exclude)
        .map(|s| &s.subject)
        .collect();
    subjects.into_iter().filter_map(|subject| case_record(model, subject, outcome_predicate, desired.clone())).collect()
}

/// Spread (max − min) of every numeric feature across `cases`.
pub fn feature_ranges<'a>(cases: impl IntoIterator<Item = &'a CaseRecord>) -> IndexMap<Iri, f64> {
    let mut bounds: IndexMap<Iri, (f64, f64)> = IndexMap::new();
    for case in cases {
        for (predicate, value) in &case.features {
            if let Some(n) = value.as_number() {
                let v = n.value();
                let entry = bounds.entry(predicate.clone()).or_insert((v, v));
                entry.0 = entry.0.min(v);
                entry.1 = entry.1.max(v);
            }
        }
    }
    bounds.into_iter().map(|(p, (lo, hi))| (p, hi - lo)).collect()
}

/// Range-normalized L1 distance over the features both cases have. A
/// numeric feature contributes `|a − b| / range` (with a zero range counting
/// as 0 when equal and 1 otherwise); any other feature contributes 0 when
/// equal and 1 otherwise.
pub fn feature_distance(a: &CaseRecord, b: &CaseRecord, ranges: &IndexMap<Iri, f64>) -> f64 {
    let mut total = 0.0;
    for (predicate, x) in &a.features {
        let Some(y) = b.features.get(predicate) else { continue };
        total += match (x.as_number(), y.as_number()) {
            (Some(x), Some(y)) => {
                let diff = (x.value() - y.value()).abs();
                let range = ranges.get(predicate).copied().unwrap_or(0.0);
                if range > 0.0 {
                    diff / range
                } else if diff == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            _ if x == y => 0.0,
            _ => 1.0,
        };
    }
    total
}

/// Index and distance of the candidate closest to `query`; ties go to the
/// lexicographically smallest subject name.
pub fn nearest_unlike_neighbor(
    query: &CaseRecord,
    candidates: &[CaseRecord],
    ranges: &IndexMap<Iri, f64>,
) -> Option<(usize, f64)> {
    candidates.iter().enumerate().map(|(i, c)| (i, feature_distance(query, c, ranges))).min_by(|(i, d), (j, e)| {
        let (a, b) = (&candidates[*i].subject, &candidates[*j].subject);
        d.total_cmp(e).then_with(|| a.local.cmp(&b.local)).then_with(|| a.prefix.cmp(&b.prefix))
    })
}

/// `base` with each listed feature of `subject` replaced in place.
fn substitute(base: &Graph, subject: &Iri, changes: &[(&Iri, &Term)]) -> Graph {
    let mut out = Graph::with_prefixes_of(base);
    let mut done: IndexSet<&Iri> = IndexSet::new();
    for s in base {
        let change = changes.iter().find(|(p, _)| &s.subject == subject && &s.predicate == *p);
        match change {
            Some((p, value)) => {
                if done.insert(*p) {
                    out.insert(Statement::new(subject.clone(), (*p).clone(), (*value).clone()));
                }
            }
            None => {
                out.insert(s.clone());
            }
        }
    }
    for (p, value) in changes {
        if !done.contains(*p) {
            out.insert(Statement::new(subject.clone(), (*p).clone(), (*value).clone()));
        }
    }
    out
}

/// Whether `model` gives `subject` the desired outcome and no longer the
/// current one.
fn reaches(model: &InferenceModel, subject: &Iri, predicate: &Iri, desired: &Term, current: &Term) -> bool {
    model.contains(&Statement::new(subject.clone(), predicate.clone(), desired.clone()))
        && !model.contains(&Statement::new(subject.clone(), predicate.clone(), current.clone()))
}

pub fn counterfactual(
    model: &InferenceModel,
    statement: &Statement,
    desired: &Term,
) -> Result<CounterfactualExplanation, ExplainError> {
    model.is_asserted(statement)?;
    let Statement { subject, predicate, object: current } = statement;
    if current == desired {
        return Err(ExplainError::DesiredEqualsCurrent(desired.clone()));
    }
    let history = historical_cases(model, predicate, desired, subject);
    if history.is_empty() {
        return Err(ExplainError::NoHistoricalCases { predicate: predicate.clone(), desired: desired.clone() });
    }
    let query = case_record(model, subject, predicate, current.clone())
        .ok_or_else(|| ExplainError::UnknownSubject(subject.clone()))?;
    let ranges = feature_ranges(std::iter::once(&query).chain(&history));
    let (index, distance) = nearest_unlike_neighbor(&query, &history, &ranges).expect("history is nonempty");
    let neighbor = history[index].clone();
    debug!(neighbor = %neighbor.subject, distance, "nearest unlike neighbor");

    let mut differences: Vec<FeatureDifference> = query
        .features
        .iter()
        .filter_map(|(p, qv)| {
            let nv = neighbor.features.get(p)?;
            (qv != nv).then(|| FeatureDifference {
                predicate: p.clone(),
                query_value: qv.clone(),
                neighbor_value: nv.clone(),
                asserted: query.asserted.contains(p),
            })
        })
        .collect();
    // stable: derived features first
    differences.sort_by_key(|d| d.asserted);

    let changeable: Vec<&FeatureDifference> = differences.iter().filter(|d| d.asserted).collect();
    let mut flip_set = Vec::new();
    for d in &changeable {
        let trial = model.reinfer(&substitute(model.base(), subject, &[(&d.predicate, &d.neighbor_value)]))?;
        if reaches(&trial, subject, predicate, desired, current) {
            flip_set.push((*d).clone());
        }
    }
    let all_changes: Vec<(&Iri, &Term)> = changeable.iter().map(|d| (&d.predicate, &d.neighbor_value)).collect();
    let modified = model.reinfer(&substitute(model.base(), subject, &all_changes))?;
    let validated = reaches(&modified, subject, predicate, desired, current);

    let explanation = CounterfactualExplanation {
        outcome_predicate: predicate.clone(),
        query,
        neighbor,
        distance,
        differences,
        flip_set,
        validated,
    };
    if validated {
        Ok(explanation)
    } else {
        Err(ExplainError::ValidationFailed(Box::new(explanation)))
    }
}

/// The base graph with every asserted difference of `c` applied to the
/// query subject, i.e. the input whose re-inference `validated` refers to.
pub fn apply_differences(c: &CounterfactualExplanation, base: &Graph) -> Graph {
    let changes: Vec<(&Iri, &Term)> =
        c.differences.iter().filter(|d| d.asserted).map(|d| (&d.predicate, &d.neighbor_value)).collect();
    substitute(base, &c.query.subject, &changes)
}

pub fn render_counterfactual(c: &CounterfactualExplanation, labels: &LabelTable) -> String {
    let mut lines = vec![
        format!(
            "To change the outcome for {}, you could look at these examples:",
            labels.format_statement(&c.query_statement())
        ),
        String::new(),
        format!("{} because:", labels.format_statement(&c.neighbor_statement())),
    ];
    for d in &c.differences {
        let theirs = Statement::new(c.neighbor.subject.clone(), d.predicate.clone(), d.neighbor_value.clone());
        let yours = Statement::new(c.query.subject.clone(), d.predicate.clone(), d.query_value.clone());
        lines.push(format!(
            "  - Their {} while your {}",
            labels.format_statement(&theirs),
            labels.format_statement(&yours)
        ));
    }
    lines.push(String::new());
    let footer = if !c.flip_set.is_empty() {
        let changes: Vec<String> = c
            .flip_set
            .iter()
            .map(|d| {
                format!(
                    "{} from {} to {}",
                    labels.label_iri(&d.predicate),
                    labels.label(&d.query_value),
                    labels.label(&d.neighbor_value)
                )
            })
            .collect();
        changes.join(" or ")
    } else if c.differences.is_empty() {
        "none; the two cases do not differ in any compared feature".to_string()
    } else {
        "no single change flips the outcome; the listed changes are needed together".to_string()
    };
    lines.push(format!("Minimal change: {footer}"));
    lines.join("\n")
}
