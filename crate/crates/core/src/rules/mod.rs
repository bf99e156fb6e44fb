//! The rule language: AST, parser, canonical formatter and builtins.

mod ast;
mod builtins;
mod format;
mod parser;

pub use ast::{Bindings, BuiltinCall, Clause, Pattern, Rule, RuleTerm};
pub use builtins::{eval_builtin, Builtin, BuiltinError, BuiltinOutcome};
pub use format::{display_clause, display_rule_inline, display_rule_lines, format_rule, format_rule_file};
pub use parser::{parse_rule_file, parse_rules, RuleSet};
