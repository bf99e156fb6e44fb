//! Rule rendering.
//!
//! [`format_rule`] produces the canonical, re-parseable one-line form with
//! prefixed names. The `display_*` functions drop prefixes for the
//! explanation texts, e.g. `(?applicant type Person)`.

use indexmap::IndexMap;

use crate::kb::{prefix_block, quote, Number, Term};

use super::{BuiltinCall, Clause, Pattern, Rule, RuleTerm};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Canonical,
    Display,
}

fn term_text(term: &RuleTerm, style: Style) -> String {
    match term {
        RuleTerm::Var(name) => format!("?{name}"),
        RuleTerm::Const(Term::Iri(iri)) => match style {
            Style::Canonical => iri.to_string(),
            Style::Display => iri.local.clone(),
        },
        RuleTerm::Const(Term::Number(n)) => format!("'{}'", n.lexical()),
        // double quotes keep numeric-looking strings from re-parsing as numbers
        RuleTerm::Const(Term::Str(s)) if Number::parse(s).is_some() => quote(s, '"'),
        RuleTerm::Const(Term::Str(s)) => quote(s, '\''),
    }
}

fn pattern_text(p: &Pattern, style: Style) -> String {
    format!("({} {} {})", term_text(&p.subject, style), term_text(&p.predicate, style), term_text(&p.object, style))
}

fn builtin_text(call: &BuiltinCall, style: Style) -> String {
    let args: Vec<String> = call.args.iter().map(|a| term_text(a, style)).collect();
    format!("{}({})", call.builtin.name(), args.join(" "))
}

fn clause_text(c: &Clause, style: Style) -> String {
    match c {
        Clause::Pattern(p) => pattern_text(p, style),
        Clause::Builtin(call) => builtin_text(call, style),
    }
}

fn head_text(rule: &Rule, style: Style) -> String {
    rule.head.iter().map(|p| pattern_text(p, style)).collect::<Vec<_>>().join(" ")
}

fn body_texts(rule: &Rule, style: Style) -> Vec<String> {
    rule.body.iter().map(|c| clause_text(c, style)).collect()
}

/// `[Name: (?a ex:p ?b) greaterThan(?b '1') -> (?a ex:q 'x')]`
pub fn format_rule(rule: &Rule) -> String {
    format!(
        "[{}: {} -> {}]",
        rule.name,
        body_texts(rule, Style::Canonical).join(" "),
        head_text(rule, Style::Canonical)
    )
}

/// A complete rule file: prefix block, blank line, one rule per line.
pub fn format_rule_file(prefixes: &IndexMap<String, String>, rules: &[Rule]) -> String {
    let mut out = prefix_block(prefixes);
    if !out.is_empty() && !rules.is_empty() {
        out.push('\n');
    }
    for rule in rules {
        out.push_str(&format_rule(rule));
        out.push('\n');
    }
    out
}

pub fn display_clause(clause: &Clause) -> String {
    clause_text(clause, Style::Display)
}

/// `[ Name: (?a p ?b) ... -> (?a q ?b) ]`
pub fn display_rule_inline(rule: &Rule) -> String {
    format!("[ {}: {} -> {} ]", rule.name, body_texts(rule, Style::Display).join(" "), head_text(rule, Style::Display))
}

/// One line per clause, clauses indented two spaces past the name line:
///
/// ```text
/// [DTIRule:
///   (?applicant type Person)
///   quotient(?debt ?income ?dti)
///   -> (?applicant dtiRatio ?dti)]
/// ```
pub fn display_rule_lines(rule: &Rule) -> Vec<String> {
    let mut lines = vec![format!("[{}:", rule.name)];
    lines.extend(body_texts(rule, Style::Display).into_iter().map(|c| format!("  {c}")));
    lines.push(format!("  -> {}]", head_text(rule, Style::Display)));
    lines
}
