use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

/// A prefixed name such as `ex:applicant1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri {
    pub prefix: String,
    pub local: String,
}

impl Iri {
    pub fn new(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        Self { prefix: prefix.into(), local: local.into() }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Whether a number was written like an integer (`680`) or a decimal (`2000.0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberShape {
    Integer,
    Decimal,
}

/// A double-precision number that remembers its lexical shape.
///
/// Equality and hashing are numeric: `680` and `680.0` are the same value.
/// Rendering respects the shape.
#[derive(Clone, Copy, Debug)]
pub struct Number {
    value: f64,
    shape: NumberShape,
}

impl Number {
    pub fn integer(value: f64) -> Self {
        Self { value, shape: NumberShape::Integer }
    }

    pub fn decimal(value: f64) -> Self {
        Self { value, shape: NumberShape::Decimal }
    }

    pub fn new(value: f64, shape: NumberShape) -> Self {
        Self { value, shape }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn shape(&self) -> NumberShape {
        self.shape
    }

    /// Parses `[+-]digits[.digits]`. Anything else (exponents, `inf`,
    /// missing digits) is rejected.
    pub fn parse(text: &str) -> Option<Self> {
        let unsigned = text.strip_prefix(['+', '-']).unwrap_or(text);
        let (int_part, frac_part) = match unsigned.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (unsigned, None),
        };
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(int_part) || frac_part.is_some_and(|f| !digits(f)) {
            return None;
        }
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        let shape = if frac_part.is_some() { NumberShape::Decimal } else { NumberShape::Integer };
        Some(Self { value, shape })
    }

    /// Canonical lexical form: integers print without a fraction, decimals
    /// print the shortest representation that round-trips, with at least
    /// one fraction digit.
    pub fn lexical(&self) -> String {
        let text = format!("{}", self.value);
        match self.shape {
            NumberShape::Integer if self.value.fract() == 0.0 => text,
            _ if text.contains('.') => text,
            _ => format!("{text}.0"),
        }
    }

    /// Decimals with exactly two fraction digits; integers unchanged.
    pub fn fixed2(&self) -> String {
        match self.shape {
            NumberShape::Integer if self.value.fract() == 0.0 => self.lexical(),
            _ => format!("{:.2}", self.value),
        }
    }

    fn hash_bits(&self) -> u64 {
        // -0.0 == 0.0 must hash alike
        if self.value == 0.0 {
            0
        } else {
            self.value.to_bits()
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Number {}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.hash_bits().hash(state);
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical())
    }
}

/// The atoms of every statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Number(Number),
    Str(String),
}

impl Term {
    pub fn iri(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        Term::Iri(Iri::new(prefix, local))
    }

    pub fn string(text: impl Into<String>) -> Self {
        Term::Str(text.into())
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<Number> {
        match self {
            Term::Number(n) => Some(*n),
            _ => None,
        }
    }

    /// Rendering in the facts-file term grammar (`ex:a`, `680`, `"text"`).
    pub fn to_text(&self) -> String {
        match self {
            Term::Iri(iri) => iri.to_string(),
            Term::Number(n) => n.lexical(),
            Term::Str(s) => quote(s, '"'),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Number> for Term {
    fn from(n: Number) -> Self {
        Term::Number(n)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

pub(crate) fn quote(text: &str, q: char) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push(q);
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c == q => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out.push(q);
    out
}
