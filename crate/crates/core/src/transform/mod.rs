//! Rule-driven transformation of instance graphs into visual models.

mod pattern;
mod rules;

pub use pattern::{
    match_pattern, BindingSet, GraphPattern, PatternError, PatternTerm, TriplePattern,
    TypeConstraint,
};
pub use rules::{
    apply_rules, default_rules, parse_ruleset, ElementKind, EmitTemplate, MappingRule, Template,
    TransformError,
};
