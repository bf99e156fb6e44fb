//! The four explanation types and their text renderings.
//!
//! Every explainer is a pure function over an [`InferenceModel`]; the text
//! renderings are stable templates so that they can be compared verbatim.

mod contextual;
mod contrastive;
mod counterfactual;
mod trace;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::inference::{InferenceError, InferenceModel, ModelError};
use crate::kb::{Iri, LabelTable, Statement, Term};
use crate::rules::{format_rule, Rule};

pub use contextual::{contextual, render_contextual, ContextualExplanation};
pub use contrastive::{contrastive, render_contrastive, ContrastiveExplanation, Difference};
pub use counterfactual::{
    apply_differences, case_record, counterfactual, feature_distance, feature_ranges, historical_cases,
    nearest_unlike_neighbor, render_counterfactual, CaseRecord, CounterfactualExplanation, FeatureDifference,
};
pub use trace::{render_trace, trace, trace_all, TraceMatch, TraceNode};

#[derive(Clone, Debug, Error)]
pub enum ExplainError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("unknown subject: {0}")]
    UnknownSubject(Iri),
    #[error("desired value {0} is already the current outcome")]
    DesiredEqualsCurrent(Term),
    #[error("no historical case has {predicate} = {desired}")]
    NoHistoricalCases { predicate: Iri, desired: Term },
    #[error("counterfactual validation failed: applying every difference from {} does not yield the desired outcome", .0.neighbor.subject)]
    ValidationFailed(Box<CounterfactualExplanation>),
    #[error("missing option: {0}")]
    MissingOption(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExplanationKind {
    Trace,
    Contextual,
    Contrastive,
    Counterfactual,
}

impl ExplanationKind {
    pub const ALL: [ExplanationKind; 4] = [
        ExplanationKind::Trace,
        ExplanationKind::Contextual,
        ExplanationKind::Contrastive,
        ExplanationKind::Counterfactual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExplanationKind::Trace => "trace",
            ExplanationKind::Contextual => "contextual",
            ExplanationKind::Contrastive => "contrastive",
            ExplanationKind::Counterfactual => "counterfactual",
        }
    }
}

impl fmt::Display for ExplanationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("unknown explanation type '{0}' (expected trace, contextual, contrastive or counterfactual)")]
pub struct UnknownKind(pub String);

impl FromStr for ExplanationKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// Inputs that only some explanation types need.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExplainOptions<'a> {
    /// Contrastive: the subject to compare against.
    pub against: Option<&'a Iri>,
    /// Contrastive: a second model to take the alternate subject from.
    pub alt_model: Option<&'a InferenceModel>,
    /// Counterfactual: the outcome value wanted instead of the current one.
    pub desired: Option<&'a Term>,
}

/// A finished explanation of any type.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Explanation {
    Trace(TraceNode),
    Contextual(ContextualExplanation),
    Contrastive(ContrastiveExplanation),
    Counterfactual(Box<CounterfactualExplanation>),
}

impl Explanation {
    pub fn kind(&self) -> ExplanationKind {
        match self {
            Explanation::Trace(_) => ExplanationKind::Trace,
            Explanation::Contextual(_) => ExplanationKind::Contextual,
            Explanation::Contrastive(_) => ExplanationKind::Contrastive,
            Explanation::Counterfactual(_) => ExplanationKind::Counterfactual,
        }
    }

    pub fn render(&self, labels: &LabelTable) -> String {
        match self {
            Explanation::Trace(t) => render_trace(t, labels),
            Explanation::Contextual(c) => render_contextual(c, labels),
            Explanation::Contrastive(c) => render_contrastive(c, labels),
            Explanation::Counterfactual(c) => render_counterfactual(c, labels),
        }
    }
}

/// Dispatches to the requested explainer. The statement must be in the
/// model whatever the type.
pub fn explain(
    model: &InferenceModel,
    statement: &Statement,
    kind: ExplanationKind,
    options: ExplainOptions<'_>,
) -> Result<Explanation, ExplainError> {
    if !model.contains(statement) {
        return Err(ModelError::StatementNotFound(Box::new(statement.clone())).into());
    }
    let labels = LabelTable::for_graph(model.base());
    Ok(match kind {
        ExplanationKind::Trace => Explanation::Trace(trace(model, statement)?),
        ExplanationKind::Contextual => Explanation::Contextual(contextual(model, statement, &labels)?),
        ExplanationKind::Contrastive => {
            let (alt_model, alt_subject) = match (options.alt_model, options.against) {
                (None, None) => return Err(ExplainError::MissingOption("against or alt_model")),
                (alt, against) => (alt.unwrap_or(model), against.unwrap_or(&statement.subject)),
            };
            Explanation::Contrastive(contrastive(model, &statement.subject, alt_model, alt_subject)?)
        }
        ExplanationKind::Counterfactual => {
            let desired = options.desired.ok_or(ExplainError::MissingOption("desired"))?;
            Explanation::Counterfactual(Box::new(counterfactual(model, statement, desired)?))
        }
    })
}

/// Whitespace canonicalization for comparing rendered text: trailing spaces
/// are stripped, runs of blank lines collapse to one, and leading/trailing
/// blank lines are dropped.
pub fn canonicalize_whitespace(text: &str) -> String {
    let mut out: Vec<&str> = Vec::new();
    for line in text.lines().map(str::trim_end) {
        if line.is_empty() && out.last().is_none_or(|l| l.is_empty()) {
            continue;
        }
        out.push(line);
    }
    while out.last().is_some_and(|l| l.is_empty()) {
        out.pop();
    }
    out.join("\n")
}

/// The predicate treated as `rdf:type`: any predicate whose local name is
/// `type`.
pub(crate) fn is_type_predicate(iri: &Iri) -> bool {
    iri.local == "type"
}

/// Rules appear in structured output as `{name, text}`.
pub(crate) struct RuleRef<'a>(pub &'a Rule);

impl Serialize for RuleRef<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Rule", 2)?;
        st.serialize_field("name", &self.0.name)?;
        st.serialize_field("text", &format_rule(self.0))?;
        st.end()
    }
}

pub(crate) fn serialize_rule<S: Serializer>(rule: &Arc<Rule>, s: S) -> Result<S::Ok, S::Error> {
    RuleRef(rule).serialize(s)
}

pub(crate) fn serialize_opt_rule<S: Serializer>(rule: &Option<Arc<Rule>>, s: S) -> Result<S::Ok, S::Error> {
    rule.as_deref().map(RuleRef).serialize(s)
}
