use std::collections::BTreeMap;
use std::fmt;

use crate::kb::{Iri, Statement, Term};

use super::Builtin;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleTerm {
    Var(String),
    Const(Term),
}

impl RuleTerm {
    pub fn var(name: impl Into<String>) -> Self {
        RuleTerm::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            RuleTerm::Var(name) => Some(name),
            RuleTerm::Const(_) => None,
        }
    }

    /// The term this resolves to under `bindings`, if any.
    pub fn resolve<'a>(&'a self, bindings: &'a Bindings) -> Option<&'a Term> {
        match self {
            RuleTerm::Var(name) => bindings.get(name),
            RuleTerm::Const(term) => Some(term),
        }
    }
}

impl From<Term> for RuleTerm {
    fn from(term: Term) -> Self {
        RuleTerm::Const(term)
    }
}

/// `(subject predicate object)`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub subject: RuleTerm,
    pub predicate: RuleTerm,
    pub object: RuleTerm,
}

impl Pattern {
    pub fn new(subject: RuleTerm, predicate: RuleTerm, object: RuleTerm) -> Self {
        Self { subject, predicate, object }
    }

    pub fn terms(&self) -> [&RuleTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(RuleTerm::as_var)
    }

    /// Extends `bindings` so that this pattern matches `statement`.
    pub fn unify(&self, statement: &Statement, bindings: &Bindings) -> Option<Bindings> {
        let mut out = bindings.clone();
        let subject = Term::Iri(statement.subject.clone());
        let predicate = Term::Iri(statement.predicate.clone());
        for (slot, value) in
            [(&self.subject, &subject), (&self.predicate, &predicate), (&self.object, &statement.object)]
        {
            match slot {
                RuleTerm::Const(term) if term != value => return None,
                RuleTerm::Const(_) => {}
                RuleTerm::Var(name) => match out.get(name) {
                    Some(bound) if bound != value => return None,
                    Some(_) => {}
                    None => out.bind(name.clone(), value.clone()),
                },
            }
        }
        Some(out)
    }

    /// The statement this pattern denotes under `bindings`. `None` if a
    /// variable is unbound or the subject/predicate is not an IRI.
    pub fn instantiate(&self, bindings: &Bindings) -> Option<Statement> {
        let as_iri = |t: &RuleTerm| -> Option<Iri> { t.resolve(bindings)?.as_iri().cloned() };
        Some(Statement {
            subject: as_iri(&self.subject)?,
            predicate: as_iri(&self.predicate)?,
            object: self.object.resolve(bindings)?.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BuiltinCall {
    pub builtin: Builtin,
    pub args: Vec<RuleTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    Pattern(Pattern),
    Builtin(BuiltinCall),
}

impl Clause {
    pub fn as_pattern(&self) -> Option<&Pattern> {
        match self {
            Clause::Pattern(p) => Some(p),
            Clause::Builtin(_) => None,
        }
    }
}

/// A named forward rule: body clauses are matched left to right, then every
/// head pattern is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Clause>,
    pub head: Vec<Pattern>,
}

impl Rule {
    pub fn body_patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.body.iter().filter_map(Clause::as_pattern)
    }
}

/// Variable assignments accumulated while matching one rule body.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bindings(BTreeMap<String, Term>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    /// Binds a fresh variable. Rebinding is a logic error.
    pub fn bind(&mut self, var: impl Into<String>, value: Term) {
        let var = var.into();
        debug_assert!(!self.0.contains_key(&var), "?{var} rebound");
        self.0.insert(var, value);
    }

    pub fn with(mut self, var: impl Into<String>, value: Term) -> Self {
        self.bind(var, value);
        self
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("?{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl serde::Serialize for Bindings {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.0.iter())
    }
}
