//! Tokenizer shared by the facts format, the rule language and the
//! one-line statement syntax used on the command line and over HTTP.

use crate::error::{ParseError, ParseErrorKind};
use crate::kb::Number;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    /// `@prefix`
    PrefixKeyword,
    /// `<...>`
    IriRef(String),
    /// `prefix:local`
    PrefixedName {
        prefix: String,
        local: String,
    },
    /// A bare identifier: rule names, builtin names, prefix labels.
    Ident(String),
    /// `?name`
    Var(String),
    Number(Number),
    Quoted {
        text: String,
        quote: QuoteKind,
    },
    Dot,
    Colon,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Arrow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum QuoteKind {
    Single,
    Double,
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub token: Token,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::PrefixKeyword => "'@prefix'".into(),
            Token::IriRef(iri) => format!("<{iri}>"),
            Token::PrefixedName { prefix, local } => format!("'{prefix}:{local}'"),
            Token::Ident(name) => format!("'{name}'"),
            Token::Var(name) => format!("'?{name}'"),
            Token::Number(n) => format!("number {}", n.lexical()),
            Token::Quoted { text, .. } => format!("literal '{text}'"),
            Token::Dot => "'.'".into(),
            Token::Colon => "':'".into(),
            Token::Comma => "','".into(),
            Token::LBracket => "'['".into(),
            Token::RBracket => "']'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::Arrow => "'->'".into(),
        }
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Splits `text` into tokens. `#` comments run to end of line.
pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;

    while i < chars.len() {
        let c = chars[i];
        let col = i - line_start + 1;
        let err = |message: String| ParseError::new(line, col, ParseErrorKind::Syntax(message));
        let mut push = |token: Token| tokens.push(Spanned { token, line, col });

        match c {
            '\n' => {
                i += 1;
                line += 1;
                line_start = i;
            }
            c if c.is_whitespace() => i += 1,
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                if word != "prefix" {
                    return Err(err(format!("unknown directive '@{word}'")));
                }
                push(Token::PrefixKeyword);
                i = j;
            }
            '<' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '>' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '>' {
                    return Err(err("unterminated IRI reference".into()));
                }
                push(Token::IriRef(chars[i + 1..j].iter().collect()));
                i = j + 1;
            }
            '\'' | '"' => {
                let quote = if c == '\'' { QuoteKind::Single } else { QuoteKind::Double };
                let mut text = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => return Err(err("unterminated quoted literal".into())),
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some('n') => text.push('\n'),
                                Some('t') => text.push('\t'),
                                Some(&e @ ('\\' | '\'' | '"')) => text.push(e),
                                _ => return Err(err("invalid escape sequence".into())),
                            }
                            j += 2;
                        }
                        Some(&q) if q == c => break,
                        Some(&other) => {
                            text.push(other);
                            j += 1;
                        }
                    }
                }
                push(Token::Quoted { text, quote });
                i = j + 1;
            }
            '?' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err("empty variable name".into()));
                }
                push(Token::Var(chars[i + 1..j].iter().collect()));
                i = j;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Token::Arrow);
                i += 2;
            }
            c if c.is_ascii_digit()
                || ((c == '-' || c == '+') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if chars.get(j).is_some_and(|&d| is_name_char(d)) {
                    return Err(err("malformed number".into()));
                }
                let lexical: String = chars[i..j].iter().collect();
                let number = Number::parse(&lexical).ok_or_else(|| err(format!("malformed number '{lexical}'")))?;
                push(Token::Number(number));
                i = j;
            }
            c if is_name_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && is_name_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                if chars.get(j) == Some(&':') && chars.get(j + 1).is_some_and(|&d| is_name_char(d)) {
                    let mut k = j + 1;
                    while k < chars.len() && is_name_char(chars[k]) {
                        k += 1;
                    }
                    push(Token::PrefixedName { prefix: name, local: chars[j + 1..k].iter().collect() });
                    i = k;
                } else {
                    push(Token::Ident(name));
                    i = j;
                }
            }
            '.' => {
                push(Token::Dot);
                i += 1;
            }
            ':' => {
                push(Token::Colon);
                i += 1;
            }
            ',' => {
                push(Token::Comma);
                i += 1;
            }
            '[' => {
                push(Token::LBracket);
                i += 1;
            }
            ']' => {
                push(Token::RBracket);
                i += 1;
            }
            '(' => {
                push(Token::LParen);
                i += 1;
            }
            ')' => {
                push(Token::RParen);
                i += 1;
            }
            other => return Err(err(format!("unexpected character '{other}'"))),
        }
    }
    Ok(tokens)
}

/// Sequential reader over a token list with end-of-input positions.
pub(crate) struct Cursor {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Spanned>, text: &str) -> Self {
        let end_line = text.split('\n').count().max(1);
        let end_col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { tokens, pos: 0, end_line, end_col }
    }

    /// A cursor over the tokens of one line of `text`; running out of
    /// tokens reports the end of that line rather than of the whole text.
    pub fn for_line(tokens: Vec<Spanned>, text: &str, line: usize) -> Self {
        let end_col = text.split('\n').nth(line - 1).map_or(0, |l| l.trim_end_matches('\r').chars().count()) + 1;
        Self { tokens, pos: 0, end_line: line, end_col }
    }

    pub fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    pub fn peek_token(&self) -> Option<&Token> {
        self.peek().map(|s| &s.token)
    }

    pub fn next(&mut self) -> Option<Spanned> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Position of the next token, or end of input.
    pub fn position(&self) -> (usize, usize) {
        self.peek().map_or((self.end_line, self.end_col), |s| (s.line, s.col))
    }

    pub fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, col) = self.position();
        ParseError::new(line, col, kind)
    }

    pub fn unexpected(&self, expected: &str) -> ParseError {
        let found = self.peek_token().map_or("end of input".to_string(), Token::describe);
        self.error(ParseErrorKind::Syntax(format!("expected {expected}, found {found}")))
    }

    pub fn expect(&mut self, want: &Token, expected: &str) -> Result<Spanned, ParseError> {
        match self.peek() {
            Some(s) if &s.token == want => Ok(self.next().unwrap()),
            _ => Err(self.unexpected(expected)),
        }
    }
}
