//! Recursive-descent parser for `.rules` files.
//!
//! ```text
//! rules   := (prefix | rule)*
//! prefix  := '@prefix' IDENT ':' IRIREF '.'
//! rule    := '[' IDENT ':' clause+ '->' clause+ ']'
//! clause  := '(' term term term ')' | IDENT '(' term (','? term)* ')'
//! term    := VAR | PNAME | QUOTED | NUMBER
//! ```

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::error::{ParseError, ParseErrorKind};
use crate::kb::{literal, parse_prefix_decl, Iri, Term};
use crate::lexer::{tokenize, Cursor, Token};

use super::{Builtin, BuiltinCall, Clause, Pattern, Rule, RuleTerm};

/// Rules plus the prefix block they were declared with.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RuleSet {
    pub prefixes: IndexMap<String, String>,
    pub rules: Vec<Rule>,
}

pub fn parse_rules(text: &str) -> Result<Vec<Rule>, ParseError> {
    parse_rule_file(text).map(|set| set.rules)
}

/// Parses a rule file. When the file declares any prefix, every prefixed
/// name must use a declared one; a file without a prefix block accepts any
/// prefix (it is resolved against the facts later).
pub fn parse_rule_file(text: &str) -> Result<RuleSet, ParseError> {
    let tokens = tokenize(text)?;
    let declares_prefixes = tokens.iter().any(|t| t.token == Token::PrefixKeyword);
    let mut cur = Cursor::new(tokens, text);
    let mut set = RuleSet::default();

    while let Some(tok) = cur.peek_token() {
        match tok {
            Token::PrefixKeyword => {
                let (prefix, ns) = parse_prefix_decl(&mut cur)?;
                set.prefixes.insert(prefix, ns);
            }
            Token::LBracket => {
                let scope = declares_prefixes.then_some(&set.prefixes);
                let rule = parse_rule(&mut cur, scope)?;
                set.rules.push(rule);
            }
            _ => return Err(cur.unexpected("'[' or '@prefix'")),
        }
    }
    Ok(set)
}

fn parse_rule(cur: &mut Cursor, prefixes: Option<&IndexMap<String, String>>) -> Result<Rule, ParseError> {
    cur.expect(&Token::LBracket, "'['")?;
    let name = match cur.peek_token() {
        Some(Token::Ident(name)) => name.clone(),
        _ => return Err(cur.unexpected("rule name")),
    };
    cur.next();
    cur.expect(&Token::Colon, "':' after rule name")?;

    let mut body = Vec::new();
    while !matches!(cur.peek_token(), Some(Token::Arrow) | None) {
        body.push(parse_clause(cur, prefixes)?);
    }
    if body.is_empty() {
        return Err(cur.unexpected("at least one body clause"));
    }
    cur.expect(&Token::Arrow, "'->'")?;

    let mut head = Vec::new();
    while !matches!(cur.peek_token(), Some(Token::RBracket) | None) {
        let (line, col) = cur.position();
        if let Some(Token::Ident(name)) = cur.peek_token() {
            return Err(ParseError::new(line, col, ParseErrorKind::BuiltinInHead(name.clone())));
        }
        match parse_clause(cur, prefixes)?.0 {
            Clause::Pattern(p) => head.push(p),
            Clause::Builtin(call) => {
                return Err(ParseError::new(line, col, ParseErrorKind::BuiltinInHead(call.builtin.name().into())))
            }
        }
    }
    if head.is_empty() {
        return Err(cur.unexpected("at least one head pattern"));
    }
    let (end_line, end_col) = cur.position();
    cur.expect(&Token::RBracket, "']'")?;

    let body_clauses = validate_body(&body)?;
    let bound: HashSet<&str> = bound_vars(&body_clauses);
    for pattern in &head {
        if let Some(var) = pattern.vars().find(|v| !bound.contains(v)) {
            return Err(ParseError::new(end_line, end_col, ParseErrorKind::UnboundHeadVariable(var.to_string())));
        }
    }
    Ok(Rule { name, body: body_clauses, head })
}

type Positioned = (Clause, (usize, usize));

/// Builtin inputs must be bound by an earlier clause.
fn validate_body(body: &[Positioned]) -> Result<Vec<Clause>, ParseError> {
    let mut bound: HashSet<String> = HashSet::new();
    for (clause, (line, col)) in body {
        match clause {
            Clause::Pattern(p) => bound.extend(p.vars().map(String::from)),
            Clause::Builtin(call) => {
                let b = call.builtin;
                if call.args.len() != b.arity() {
                    return Err(ParseError::new(
                        *line,
                        *col,
                        ParseErrorKind::Arity {
                            builtin: b.name().into(),
                            expected: b.arity(),
                            actual: call.args.len(),
                        },
                    ));
                }
                for arg in &call.args[..b.input_count()] {
                    if let Some(var) = arg.as_var().filter(|v| !bound.contains(*v)) {
                        return Err(ParseError::new(
                            *line,
                            *col,
                            ParseErrorKind::UnboundBuiltinArgument { builtin: b.name().into(), var: var.into() },
                        ));
                    }
                }
                if let Some(out) = call.args.get(2).and_then(RuleTerm::as_var) {
                    bound.insert(out.to_string());
                }
            }
        }
    }
    Ok(body.iter().map(|(c, _)| c.clone()).collect())
}

fn bound_vars(body: &[Clause]) -> HashSet<&str> {
    let mut bound = HashSet::new();
    for clause in body {
        match clause {
            Clause::Pattern(p) => bound.extend(p.vars()),
            Clause::Builtin(call) if call.builtin.is_function() => {
                bound.extend(call.args.get(2).and_then(RuleTerm::as_var));
            }
            Clause::Builtin(_) => {}
        }
    }
    bound
}

fn parse_clause(cur: &mut Cursor, prefixes: Option<&IndexMap<String, String>>) -> Result<Positioned, ParseError> {
    let pos = cur.position();
    match cur.peek_token() {
        Some(Token::LParen) => {
            cur.next();
            let subject = parse_term(cur, prefixes)?;
            let predicate = parse_term(cur, prefixes)?;
            let object = parse_term(cur, prefixes)?;
            cur.expect(&Token::RParen, "')' closing the pattern")?;
            Ok((Clause::Pattern(Pattern { subject, predicate, object }), pos))
        }
        Some(Token::Ident(name)) => {
            let builtin = Builtin::from_name(name)
                .ok_or_else(|| ParseError::new(pos.0, pos.1, ParseErrorKind::UnknownBuiltin(name.clone())))?;
            cur.next();
            cur.expect(&Token::LParen, "'(' after builtin name")?;
            let mut args = Vec::new();
            loop {
                match cur.peek_token() {
                    Some(Token::RParen) => {
                        cur.next();
                        break;
                    }
                    Some(Token::Comma) if !args.is_empty() => {
                        cur.next();
                        args.push(parse_term(cur, prefixes)?);
                    }
                    _ => args.push(parse_term(cur, prefixes)?),
                }
            }
            Ok((Clause::Builtin(BuiltinCall { builtin, args }), pos))
        }
        _ => Err(cur.unexpected("a pattern '(...)' or builtin call")),
    }
}

fn parse_term(cur: &mut Cursor, prefixes: Option<&IndexMap<String, String>>) -> Result<RuleTerm, ParseError> {
    let term = match cur.peek_token() {
        Some(Token::Var(name)) => RuleTerm::Var(name.clone()),
        Some(Token::PrefixedName { prefix, local }) => {
            if prefixes.is_some_and(|p| !p.contains_key(prefix)) {
                return Err(cur.error(ParseErrorKind::UndeclaredPrefix(prefix.clone())));
            }
            RuleTerm::Const(Term::Iri(Iri::new(prefix.clone(), local.clone())))
        }
        Some(Token::Quoted { text, quote }) => RuleTerm::Const(literal(text, *quote)),
        Some(Token::Number(n)) => RuleTerm::Const(Term::Number(*n)),
        _ => return Err(cur.unexpected("a variable, prefixed name or literal")),
    };
    cur.next();
    Ok(term)
}
