//! Builtin guards and functions usable in rule bodies.
//!
//! Guards (`greaterThan`, `lessThan`, `ge`, `le`, `equal`, `notEqual`) take
//! two arguments and never bind. Functions (`quotient`, `sum`,
//! `difference`, `product`) take three; the last one receives the result, or
//! is checked against it when already bound.

use std::fmt;

use thiserror::Error;

use crate::kb::{Number, NumberShape, Term};

use super::{Bindings, RuleTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Quotient,
    Sum,
    Difference,
    Product,
    GreaterThan,
    LessThan,
    Ge,
    Le,
    Equal,
    NotEqual,
}

impl Builtin {
    pub const ALL: [Builtin; 10] = [
        Builtin::Quotient,
        Builtin::Sum,
        Builtin::Difference,
        Builtin::Product,
        Builtin::GreaterThan,
        Builtin::LessThan,
        Builtin::Ge,
        Builtin::Le,
        Builtin::Equal,
        Builtin::NotEqual,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Quotient => "quotient",
            Builtin::Sum => "sum",
            Builtin::Difference => "difference",
            Builtin::Product => "product",
            Builtin::GreaterThan => "greaterThan",
            Builtin::LessThan => "lessThan",
            Builtin::Ge => "ge",
            Builtin::Le => "le",
            Builtin::Equal => "equal",
            Builtin::NotEqual => "notEqual",
        }
    }

    pub fn is_function(self) -> bool {
        matches!(self, Builtin::Quotient | Builtin::Sum | Builtin::Difference | Builtin::Product)
    }

    pub fn arity(self) -> usize {
        if self.is_function() {
            3
        } else {
            2
        }
    }

    /// Leading arguments that must be bound before evaluation. Every builtin
    /// reads its first two arguments.
    pub fn input_count(self) -> usize {
        2
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuiltinOutcome {
    /// The builtin succeeded; for functions the output variable is bound.
    Pass(Bindings),
    /// The builtin rejected the match. `diagnostic` explains abnormal
    /// failures such as division by zero.
    Fail { diagnostic: Option<String> },
}

impl BuiltinOutcome {
    fn fail() -> Self {
        BuiltinOutcome::Fail { diagnostic: None }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BuiltinError {
    #[error("unknown builtin '{0}'")]
    Unknown(String),
    #[error("{builtin} expects {expected} arguments, got {actual}")]
    Arity { builtin: Builtin, expected: usize, actual: usize },
    #[error("{builtin}: argument ?{var} is unbound")]
    Unbound { builtin: Builtin, var: String },
    #[error("{builtin}: expected a number, got {value}")]
    NotNumeric { builtin: Builtin, value: Term },
}

/// Evaluates a builtin by name.
pub fn eval_builtin(name: &str, args: &[RuleTerm], bindings: &Bindings) -> Result<BuiltinOutcome, BuiltinError> {
    let builtin = Builtin::from_name(name).ok_or_else(|| BuiltinError::Unknown(name.to_string()))?;
    builtin.eval(args, bindings)
}

impl Builtin {
    pub fn eval(self, args: &[RuleTerm], bindings: &Bindings) -> Result<BuiltinOutcome, BuiltinError> {
        if args.len() != self.arity() {
            return Err(BuiltinError::Arity { builtin: self, expected: self.arity(), actual: args.len() });
        }
        let input = |i: usize| -> Result<&Term, BuiltinError> {
            args[i].resolve(bindings).ok_or_else(|| BuiltinError::Unbound {
                builtin: self,
                var: args[i].as_var().unwrap_or_default().to_string(),
            })
        };
        let numeric = |i: usize| -> Result<Number, BuiltinError> {
            let term = input(i)?;
            term.as_number().ok_or_else(|| BuiltinError::NotNumeric { builtin: self, value: term.clone() })
        };
        let verdict = |ok: bool| if ok { BuiltinOutcome::Pass(bindings.clone()) } else { BuiltinOutcome::fail() };

        match self {
            Builtin::Equal | Builtin::NotEqual => {
                let same = input(0)? == input(1)?;
                Ok(verdict(same == (self == Builtin::Equal)))
            }
            Builtin::GreaterThan | Builtin::LessThan | Builtin::Ge | Builtin::Le => {
                let (a, b) = (numeric(0)?.value(), numeric(1)?.value());
                Ok(verdict(match self {
                    Builtin::GreaterThan => a > b,
                    Builtin::LessThan => a < b,
                    Builtin::Ge => a >= b,
                    _ => a <= b,
                }))
            }
            Builtin::Quotient | Builtin::Sum | Builtin::Difference | Builtin::Product => {
                let (a, b) = (numeric(0)?, numeric(1)?);
                if self == Builtin::Quotient && b.value() == 0.0 {
                    return Ok(BuiltinOutcome::Fail {
                        diagnostic: Some(format!("quotient({a} {b}): division by zero")),
                    });
                }
                let value = match self {
                    Builtin::Quotient => a.value() / b.value(),
                    Builtin::Sum => a.value() + b.value(),
                    Builtin::Difference => a.value() - b.value(),
                    _ => a.value() * b.value(),
                };
                if !value.is_finite() {
                    return Ok(BuiltinOutcome::Fail {
                        diagnostic: Some(format!("{self}({a} {b}): result is not finite")),
                    });
                }
                let integral_inputs = a.shape() == NumberShape::Integer && b.shape() == NumberShape::Integer;
                let shape =
                    if integral_inputs && value.fract() == 0.0 { NumberShape::Integer } else { NumberShape::Decimal };
                let result = Term::Number(Number::new(value, shape));
                match &args[2] {
                    RuleTerm::Var(var) if !bindings.contains(var) => {
                        Ok(BuiltinOutcome::Pass(bindings.clone().with(var.clone(), result)))
                    }
                    out => {
                        let existing = out.resolve(bindings).expect("bound or constant");
                        Ok(verdict(*existing == result))
                    }
                }
            }
        }
    }
}
