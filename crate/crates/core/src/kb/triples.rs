//! The `.facts` triple text format.
//!
//! ```text
//! @prefix ex: <http://example.org/loan#> .
//! ex:applicant1 ex:creditScore 680 .      # comment
//! ex:applicant1 ex:status "Not Eligible" .
//! ```
//!
//! One statement per line. Objects are prefixed names, bare numbers or
//! quoted strings. Single-quoted literals that lex as numbers become
//! numbers, matching the rule language.

use indexmap::IndexMap;
use tracing::warn;

use super::{Graph, Iri, Number, Statement, Term};
use crate::error::{ParseError, ParseErrorKind};
use crate::lexer::{tokenize, Cursor, QuoteKind, Spanned, Token};

/// A parsed graph plus the non-fatal problems found while reading it.
#[derive(Clone, Debug)]
pub struct ParsedTriples {
    pub graph: Graph,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

/// Parses the facts format. Duplicate statements are skipped with a warning.
pub fn parse_triples(text: &str) -> Result<Graph, ParseError> {
    parse_triples_with_warnings(text).map(|parsed| parsed.graph)
}

pub fn parse_triples_with_warnings(text: &str) -> Result<ParsedTriples, ParseError> {
    let tokens = tokenize(text)?;
    let mut graph = Graph::new();
    let mut warnings = Vec::new();

    for line_tokens in group_by_line(tokens) {
        let line = line_tokens[0].line;
        let mut cur = Cursor::for_line(line_tokens, text, line);
        if cur.peek_token() == Some(&Token::PrefixKeyword) {
            let (prefix, namespace) = parse_prefix_decl(&mut cur)?;
            graph.add_prefix(prefix, namespace);
        } else {
            let statement = parse_statement_tokens(&mut cur, graph.prefixes())?;
            cur.expect(&Token::Dot, "'.' at end of statement")?;
            if !graph.insert(statement.clone()) {
                warn!(line, statement = %statement, "duplicate statement skipped");
                warnings.push(ParseWarning {
                    line,
                    message: format!("duplicate statement skipped: {}", statement.to_text()),
                });
            }
        }
        if !cur.at_end() {
            return Err(cur.unexpected("end of line"));
        }
    }
    Ok(ParsedTriples { graph, warnings })
}

/// Prefix block followed by one statement per line, in insertion order.
pub fn serialize_triples(graph: &Graph) -> String {
    let mut out = prefix_block(graph.prefixes());
    if !graph.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        for statement in graph {
            out.push_str(&statement.to_text());
            out.push('\n');
        }
    }
    out
}

pub(crate) fn prefix_block(prefixes: &IndexMap<String, String>) -> String {
    prefixes.iter().map(|(p, ns)| format!("@prefix {p}: <{ns}> .\n")).collect()
}

/// Parses one statement (`ex:a ex:p 'x'`, trailing `.` optional) against a
/// prefix table.
pub fn parse_statement(text: &str, prefixes: &IndexMap<String, String>) -> Result<Statement, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?, text);
    let statement = parse_statement_tokens(&mut cur, prefixes)?;
    if cur.peek_token() == Some(&Token::Dot) {
        cur.next();
    }
    if !cur.at_end() {
        return Err(cur.unexpected("end of statement"));
    }
    Ok(statement)
}

/// Parses a single object-position term.
pub fn parse_term(text: &str, prefixes: &IndexMap<String, String>) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(tokenize(text)?, text);
    let term = parse_object(&mut cur, prefixes)?;
    if !cur.at_end() {
        return Err(cur.unexpected("end of term"));
    }
    Ok(term)
}

fn group_by_line(tokens: Vec<Spanned>) -> Vec<Vec<Spanned>> {
    let mut groups: Vec<Vec<Spanned>> = Vec::new();
    for tok in tokens {
        match groups.last_mut() {
            Some(group) if group[0].line == tok.line => group.push(tok),
            _ => groups.push(vec![tok]),
        }
    }
    groups
}

pub(crate) fn parse_prefix_decl(cur: &mut Cursor) -> Result<(String, String), ParseError> {
    cur.expect(&Token::PrefixKeyword, "'@prefix'")?;
    let prefix = match cur.next().map(|s| s.token) {
        Some(Token::Ident(name)) => name,
        _ => return Err(cur.error(ParseErrorKind::Syntax("expected prefix label".into()))),
    };
    cur.expect(&Token::Colon, "':' after prefix label")?;
    let namespace = match cur.peek_token() {
        Some(Token::IriRef(iri)) => iri.clone(),
        _ => return Err(cur.unexpected("<namespace IRI>")),
    };
    cur.next();
    cur.expect(&Token::Dot, "'.' after prefix declaration")?;
    Ok((prefix, namespace))
}

fn parse_statement_tokens(cur: &mut Cursor, prefixes: &IndexMap<String, String>) -> Result<Statement, ParseError> {
    let subject = parse_iri(cur, prefixes, "subject")?;
    let predicate = parse_iri(cur, prefixes, "predicate")?;
    let object = parse_object(cur, prefixes)?;
    Ok(Statement { subject, predicate, object })
}

fn parse_iri(cur: &mut Cursor, prefixes: &IndexMap<String, String>, role: &str) -> Result<Iri, ParseError> {
    match cur.peek_token() {
        Some(Token::PrefixedName { prefix, local }) => {
            let iri = Iri::new(prefix.clone(), local.clone());
            if !prefixes.contains_key(&iri.prefix) {
                return Err(cur.error(ParseErrorKind::UndeclaredPrefix(iri.prefix)));
            }
            cur.next();
            Ok(iri)
        }
        _ => Err(cur.unexpected(&format!("prefixed name as {role}"))),
    }
}

fn parse_object(cur: &mut Cursor, prefixes: &IndexMap<String, String>) -> Result<Term, ParseError> {
    match cur.peek_token() {
        Some(Token::PrefixedName { .. }) => parse_iri(cur, prefixes, "object").map(Term::Iri),
        Some(Token::Number(n)) => {
            let term = Term::Number(*n);
            cur.next();
            Ok(term)
        }
        Some(Token::Quoted { text, quote }) => {
            let term = literal(text, *quote);
            cur.next();
            Ok(term)
        }
        _ => Err(cur.unexpected("object (prefixed name, number or quoted string)")),
    }
}

/// Double quotes always give a string; single quotes give a number when the
/// content lexes as one.
pub(crate) fn literal(text: &str, quote: QuoteKind) -> Term {
    match quote {
        QuoteKind::Single => Number::parse(text).map_or_else(|| Term::Str(text.to_string()), Term::Number),
        QuoteKind::Double => Term::Str(text.to_string()),
    }
}
