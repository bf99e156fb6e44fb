//! Naive forward chaining to a fixpoint, recording how every inferred
//! statement was derived.
//!
//! Evaluation order is fixed so that runs are reproducible: rules fire in
//! file order, and each body pattern enumerates candidate statements in
//! insertion order (base first, then inferred statements in the order they
//! were derived). A rule's matches are computed against the state at the
//! start of that rule's turn, then its conclusions are added.

use std::collections::HashSet;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;
use thiserror::Error;
use tracing::debug;

use crate::kb::{Graph, Statement};
use crate::rules::{Bindings, BuiltinOutcome, Clause, Rule};

pub const DEFAULT_MAX_INFERRED: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InferenceConfig {
    /// Inference aborts once more than this many statements are derived.
    pub max_inferred: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self { max_inferred: DEFAULT_MAX_INFERRED }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InferenceError {
    #[error("inference exceeded the cap of {cap} inferred statements (runaway rule set?)")]
    CapExceeded { cap: usize },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("statement not found: {0}")]
    StatementNotFound(Box<Statement>),
    #[error("statement is asserted, not inferred: {0}")]
    StatementIsAsserted(Box<Statement>),
}

/// One way an inferred statement was produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Derivation {
    pub conclusion: Statement,
    #[serde(serialize_with = "serialize_rule_name")]
    pub rule: Arc<Rule>,
    pub bindings: Bindings,
    /// Body patterns instantiated under `bindings`, in body order.
    pub premises: Vec<Statement>,
}

fn serialize_rule_name<S: serde::Serializer>(rule: &Arc<Rule>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rule.name)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Base,
    Inferred,
    All,
}

/// The base graph extended with everything the rules derive.
#[derive(Clone, Debug)]
pub struct InferenceModel {
    base: Graph,
    inferred: Graph,
    derivations: IndexMap<Statement, Vec<Derivation>>,
    rules: Vec<Arc<Rule>>,
    diagnostics: Vec<String>,
    config: InferenceConfig,
}

pub fn infer(base: &Graph, rules: &[Rule]) -> Result<InferenceModel, InferenceError> {
    infer_with(base, rules, InferenceConfig::default())
}

pub fn infer_with(base: &Graph, rules: &[Rule], config: InferenceConfig) -> Result<InferenceModel, InferenceError> {
    let rules: Vec<Arc<Rule>> = rules.iter().cloned().map(Arc::new).collect();
    let mut inferred = Graph::with_prefixes_of(base);
    let mut derivations: IndexMap<Statement, Vec<Derivation>> = IndexMap::new();
    let mut seen: HashSet<(usize, Bindings, Statement)> = HashSet::new();
    let mut diagnostics: IndexSet<String> = IndexSet::new();

    let mut pass = 0;
    loop {
        pass += 1;
        let before = inferred.len();
        for (rule_index, rule) in rules.iter().enumerate() {
            let matches = find_matches(rule, base, &inferred, &mut diagnostics);
            for (bindings, premises) in matches {
                for head in &rule.head {
                    let Some(conclusion) = head.instantiate(&bindings) else {
                        diagnostics.insert(format!(
                            "{}: head {} does not instantiate to a statement under {bindings}",
                            rule.name,
                            crate::rules::display_clause(&Clause::Pattern(head.clone()))
                        ));
                        continue;
                    };
                    if base.contains(&conclusion) {
                        continue;
                    }
                    if !seen.insert((rule_index, bindings.clone(), conclusion.clone())) {
                        continue;
                    }
                    let derivation = Derivation {
                        conclusion: conclusion.clone(),
                        rule: Arc::clone(rule),
                        bindings: bindings.clone(),
                        premises: premises.clone(),
                    };
                    match inferred.index_of(&conclusion) {
                        None => {
                            if inferred.len() >= config.max_inferred {
                                return Err(InferenceError::CapExceeded { cap: config.max_inferred });
                            }
                            inferred.insert(conclusion.clone());
                            derivations.insert(conclusion, vec![derivation]);
                        }
                        Some(position) => {
                            // Only alternatives built from earlier statements are kept,
                            // so the premise-of relation stays acyclic.
                            let well_founded = premises
                                .iter()
                                .all(|p| base.contains(p) || inferred.index_of(p).is_some_and(|i| i < position));
                            if well_founded {
                                derivations.get_mut(&conclusion).expect("inferred has derivations").push(derivation);
                            }
                        }
                    }
                }
            }
        }
        debug!(pass, added = inferred.len() - before, "inference pass");
        if inferred.len() == before {
            break;
        }
    }

    Ok(InferenceModel {
        base: base.clone(),
        inferred,
        derivations,
        rules,
        diagnostics: diagnostics.into_iter().collect(),
        config,
    })
}

/// All body matches of `rule`, each with its instantiated premises.
fn find_matches(
    rule: &Rule,
    base: &Graph,
    inferred: &Graph,
    diagnostics: &mut IndexSet<String>,
) -> Vec<(Bindings, Vec<Statement>)> {
    let mut out = Vec::new();
    let mut premises = Vec::new();
    match_from(rule, 0, Bindings::new(), &mut premises, base, inferred, diagnostics, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn match_from(
    rule: &Rule,
    index: usize,
    bindings: Bindings,
    premises: &mut Vec<Statement>,
    base: &Graph,
    inferred: &Graph,
    diagnostics: &mut IndexSet<String>,
    out: &mut Vec<(Bindings, Vec<Statement>)>,
) {
    let Some(clause) = rule.body.get(index) else {
        out.push((bindings, premises.clone()));
        return;
    };
    match clause {
        Clause::Pattern(pattern) => {
            for statement in base.iter().chain(inferred.iter()) {
                if let Some(next) = pattern.unify(statement, &bindings) {
                    premises.push(statement.clone());
                    match_from(rule, index + 1, next, premises, base, inferred, diagnostics, out);
                    premises.pop();
                }
            }
        }
        Clause::Builtin(call) => match call.builtin.eval(&call.args, &bindings) {
            Ok(BuiltinOutcome::Pass(next)) => {
                match_from(rule, index + 1, next, premises, base, inferred, diagnostics, out)
            }
            Ok(BuiltinOutcome::Fail { diagnostic: None }) => {}
            Ok(BuiltinOutcome::Fail { diagnostic: Some(message) }) => {
                diagnostics.insert(format!("{}: {message}", rule.name));
            }
            Err(err) => {
                diagnostics.insert(format!("{}: {err}", rule.name));
            }
        },
    }
}

impl InferenceModel {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn inferred(&self) -> &Graph {
        &self.inferred
    }

    pub fn rules(&self) -> &[Arc<Rule>] {
        &self.rules
    }

    /// Owned copies of the rules, e.g. for re-running inference.
    pub fn rule_list(&self) -> Vec<Rule> {
        self.rules.iter().map(|r| (**r).clone()).collect()
    }

    pub fn config(&self) -> InferenceConfig {
        self.config
    }

    /// Re-runs inference over a different base with the same rules and cap.
    pub fn reinfer(&self, base: &Graph) -> Result<InferenceModel, InferenceError> {
        infer_with(base, &self.rule_list(), self.config)
    }

    /// Problems seen while matching, such as division by zero.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn contains(&self, statement: &Statement) -> bool {
        self.base.contains(statement) || self.inferred.contains(statement)
    }

    pub fn is_asserted(&self, statement: &Statement) -> Result<bool, ModelError> {
        if self.base.contains(statement) {
            Ok(true)
        } else if self.inferred.contains(statement) {
            Ok(false)
        } else {
            Err(ModelError::StatementNotFound(Box::new(statement.clone())))
        }
    }

    /// Every recorded derivation; the first is the canonical one.
    pub fn derivations_of(&self, statement: &Statement) -> Result<&[Derivation], ModelError> {
        match self.derivations.get(statement) {
            Some(list) => Ok(list),
            None if self.base.contains(statement) => Err(ModelError::StatementIsAsserted(Box::new(statement.clone()))),
            None => Err(ModelError::StatementNotFound(Box::new(statement.clone()))),
        }
    }

    pub fn canonical_derivation(&self, statement: &Statement) -> Result<&Derivation, ModelError> {
        Ok(&self.derivations_of(statement)?[0])
    }

    /// Every derivation of every inferred statement, in derivation order.
    pub fn all_derivations(&self) -> impl Iterator<Item = &Derivation> {
        self.derivations.values().flatten()
    }

    pub fn list_statements(&self, which: Which) -> Vec<Statement> {
        match which {
            Which::Base => self.base.statements(),
            Which::Inferred => self.inferred.statements(),
            Which::All => self.iter().cloned().collect(),
        }
    }

    /// Base statements then inferred statements.
    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        self.base.iter().chain(self.inferred.iter())
    }

    /// Base and inferred statements merged into one graph.
    pub fn closure(&self) -> Graph {
        let mut g = self.base.clone();
        g.extend(self.inferred.iter().cloned());
        g
    }
}

pub fn is_asserted(model: &InferenceModel, statement: &Statement) -> Result<bool, ModelError> {
    model.is_asserted(statement)
}

pub fn derivations_of<'m>(model: &'m InferenceModel, statement: &Statement) -> Result<&'m [Derivation], ModelError> {
    model.derivations_of(statement)
}

pub fn list_statements(model: &InferenceModel, which: Which) -> Vec<Statement> {
    model.list_statements(which)
}
