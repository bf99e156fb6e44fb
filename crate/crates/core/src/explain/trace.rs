//! Trace-based explanations: the full recursive derivation chain of a
//! statement, using the canonical derivation at every level.

use std::sync::Arc;

use serde::Serialize;

use crate::inference::InferenceModel;
use crate::kb::{LabelTable, Statement};
use crate::rules::{display_rule_lines, Rule};

use super::ExplainError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceNode {
    pub conclusion: Statement,
    pub asserted: bool,
    #[serde(serialize_with = "super::serialize_opt_rule")]
    pub rule: Option<Arc<Rule>>,
    pub matches: Vec<TraceMatch>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceMatch {
    pub statement: Statement,
    /// Expansion of an inferred premise; absent for asserted premises and
    /// for premises already being explained further up the path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<Box<TraceNode>>,
    pub already_explained: bool,
}

impl TraceNode {
    /// Number of nested conclusion levels below (and including) this node.
    pub fn depth(&self) -> usize {
        1 + self.matches.iter().filter_map(|m| m.node.as_ref()).map(|n| n.depth()).max().unwrap_or(0)
    }
}

pub fn trace(model: &InferenceModel, statement: &Statement) -> Result<TraceNode, ExplainError> {
    if model.is_asserted(statement)? {
        return Ok(TraceNode { conclusion: statement.clone(), asserted: true, rule: None, matches: Vec::new() });
    }
    let mut path = vec![statement.clone()];
    expand(model, statement, &mut path)
}

fn expand(model: &InferenceModel, statement: &Statement, path: &mut Vec<Statement>) -> Result<TraceNode, ExplainError> {
    let derivation = model.canonical_derivation(statement)?;
    let mut matches = Vec::with_capacity(derivation.premises.len());
    for premise in &derivation.premises {
        let asserted = model.is_asserted(premise)?;
        let on_path = path.contains(premise);
        let node = if asserted || on_path {
            None
        } else {
            path.push(premise.clone());
            let node = expand(model, premise, path)?;
            path.pop();
            Some(Box::new(node))
        };
        matches.push(TraceMatch { statement: premise.clone(), node, already_explained: !asserted && on_path });
    }
    Ok(TraceNode { conclusion: statement.clone(), asserted: false, rule: Some(Arc::clone(&derivation.rule)), matches })
}

/// Traces for every inferred statement, in derivation order.
pub fn trace_all(model: &InferenceModel) -> Result<Vec<TraceNode>, ExplainError> {
    model.inferred().iter().map(|s| trace(model, s)).collect()
}

pub fn render_trace(node: &TraceNode, labels: &LabelTable) -> String {
    if node.asserted {
        return format!("Conclusion: {} (asserted)", labels.format_statement(&node.conclusion));
    }
    let mut lines = Vec::new();
    render_node(node, labels, 0, &mut lines);
    lines.join("\n")
}

fn render_node(node: &TraceNode, labels: &LabelTable, indent: usize, lines: &mut Vec<String>) {
    let pad = " ".repeat(indent);
    lines.push(format!("{pad}Conclusion: {}", labels.format_statement(&node.conclusion)));
    for m in &node.matches {
        let suffix = if m.already_explained { " (already explained)" } else { "" };
        lines.push(format!("{pad}  Match: {}{suffix}", labels.format_statement(&m.statement)));
    }
    let nested: Vec<&TraceNode> = node.matches.iter().filter_map(|m| m.node.as_deref()).collect();
    for child in &nested {
        lines.push(String::new());
        render_node(child, labels, indent + 2, lines);
    }
    if !nested.is_empty() {
        lines.push(String::new());
    }
    if let Some(rule) = &node.rule {
        for (i, line) in display_rule_lines(rule).into_iter().enumerate() {
            if i == 0 {
                lines.push(format!("{pad}  Rule: {line}"));
            } else {
                lines.push(format!("{pad}  {line}"));
            }
        }
    }
}
