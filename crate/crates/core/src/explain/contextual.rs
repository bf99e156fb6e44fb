//! Contextual explanations: only the rule that fired last and the facts it
//! matched, in a technical ("shallow") and a one-sentence form.

use std::sync::Arc;

use serde::Serialize;

use crate::inference::InferenceModel;
use crate::kb::{LabelTable, Statement};
use crate::rules::{display_rule_inline, Rule};

use super::ExplainError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContextualExplanation {
    pub conclusion: Statement,
    #[serde(serialize_with = "super::serialize_rule")]
    pub rule: Arc<Rule>,
    pub facts: Vec<Statement>,
    pub shallow_text: String,
    pub simple_text: String,
}

pub fn contextual(
    model: &InferenceModel,
    statement: &Statement,
    labels: &LabelTable,
) -> Result<ContextualExplanation, ExplainError> {
    let derivation = model.canonical_derivation(statement)?;
    let conclusion = labels.format_statement(statement);
    let facts: Vec<String> = derivation.premises.iter().map(|p| labels.format_statement(p)).collect();

    let mut shallow = vec![
        format!("Conclusion: {conclusion}"),
        format!("Based on rule: {}", display_rule_inline(&derivation.rule)),
        "Using the following facts:".to_string(),
    ];
    shallow.extend(facts.iter().map(|f| format!("- {f}")));

    let simple_text = if facts.is_empty() {
        format!("{conclusion}.")
    } else {
        format!("{conclusion} because {}.", facts.join(" and "))
    };

    Ok(ContextualExplanation {
        conclusion: statement.clone(),
        rule: Arc::clone(&derivation.rule),
        facts: derivation.premises.clone(),
        shallow_text: shallow.join("\n"),
        simple_text,
    })
}

pub fn render_contextual(c: &ContextualExplanation, _labels: &LabelTable) -> String {
    format!("Shallow Explanation:\n{}\n\nSimple Explanation:\n{}", c.shallow_text, c.simple_text)
}
