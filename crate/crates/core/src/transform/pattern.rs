//! Basic graph patterns over the ABox.
//!
//! A pattern is a conjunction of triple patterns plus type constraints on
//! variables. Matching is a nested-loop join in triple order; each step looks
//! candidates up by predicate, then by whichever of subject or object is
//! already bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::iri::{Iri, RDF};
use crate::model::{Assertion, Ontology, Term};
use crate::reasoner::{inferred_types_by_individual, SubsumptionClosure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("type constraint on ?{0}, which no triple binds")]
    UnboundConstraint(String),
    #[error("?{0} is used both as a predicate and as a subject or object")]
    RoleClash(String),
    #[error("a literal cannot be a {0}")]
    MisplacedLiteral(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    /// Variable name without the leading `?`.
    Var(String),
    Iri(Iri),
    Literal(String),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(name.trim_start_matches('?').to_owned())
    }

    fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl From<Iri> for PatternTerm {
    fn from(iri: Iri) -> Self {
        PatternTerm::Iri(iri)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(i) => write!(f, "<{i}>"),
            PatternTerm::Literal(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

/// The binding of `var` must have `class` among its asserted types, or among
/// its inferred types when `transitive` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeConstraint {
    pub var: String,
    pub class: Iri,
    pub transitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphPattern {
    triples: Vec<TriplePattern>,
    type_constraints: Vec<TypeConstraint>,
}

impl GraphPattern {
    pub fn new(
        triples: Vec<TriplePattern>,
        type_constraints: Vec<TypeConstraint>,
    ) -> Result<Self, PatternError> {
        let mut positional = BTreeSet::new();
        let mut predicates = BTreeSet::new();
        for t in &triples {
            if matches!(t.subject, PatternTerm::Literal(_)) {
                return Err(PatternError::MisplacedLiteral("subject"));
            }
            if matches!(t.predicate, PatternTerm::Literal(_)) {
                return Err(PatternError::MisplacedLiteral("predicate"));
            }
            positional.extend(t.subject.as_var());
            positional.extend(t.object.as_var());
            predicates.extend(t.predicate.as_var());
        }
        if let Some(v) = positional.intersection(&predicates).next() {
            return Err(PatternError::RoleClash(v.to_string()));
        }
        let type_constraints: Vec<TypeConstraint> = type_constraints
            .into_iter()
            .map(|mut c| {
                c.var = c.var.trim_start_matches('?').to_owned();
                c
            })
            .collect();
        for c in &type_constraints {
            if !positional.contains(c.var.as_str()) && !predicates.contains(c.var.as_str()) {
                return Err(PatternError::UnboundConstraint(c.var.clone()));
            }
        }
        Ok(GraphPattern {
            triples,
            type_constraints,
        })
    }

    pub fn triples(&self) -> &[TriplePattern] {
        &self.triples
    }

    pub fn type_constraints(&self) -> &[TypeConstraint] {
        &self.type_constraints
    }

    /// Variable names, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        self.triples
            .iter()
            .flat_map(|t| [&t.subject, &t.predicate, &t.object])
            .filter_map(|t| t.as_var().map(str::to_owned))
            .collect()
    }
}

/// Solutions of a pattern: one row per distinct assignment, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BindingSet {
    pub variables: Vec<String>,
    pub rows: Vec<BTreeMap<String, Term>>,
}

impl BindingSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// The ABox viewed as triples, with `rdf:type` for type assertions.
pub(crate) struct TripleIndex {
    triples: Vec<(Term, Iri, Term)>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_predicate_subject: HashMap<(Iri, Term), Vec<usize>>,
    by_predicate_object: HashMap<(Iri, Term), Vec<usize>>,
    asserted_types: BTreeSet<(Iri, Iri)>,
    inferred_types: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl TripleIndex {
    pub(crate) fn new(graph: &Ontology, closure: &SubsumptionClosure) -> Self {
        let rdf_type = Iri::new(format!("{RDF}type")).expect("static IRI");
        let mut index = TripleIndex {
            triples: Vec::with_capacity(graph.abox.len()),
            by_predicate: HashMap::new(),
            by_predicate_subject: HashMap::new(),
            by_predicate_object: HashMap::new(),
            asserted_types: BTreeSet::new(),
            inferred_types: inferred_types_by_individual(graph, closure),
        };
        for a in &graph.abox {
            let (s, p, o) = match a {
                Assertion::TypeOf { individual, class } => {
                    index
                        .asserted_types
                        .insert((individual.clone(), class.clone()));
                    (
                        individual.clone(),
                        rdf_type.clone(),
                        Term::Iri(class.clone()),
                    )
                }
                Assertion::Relation {
                    subject,
                    predicate,
                    object,
                } => (subject.clone(), predicate.clone(), object.clone()),
            };
            let i = index.triples.len();
            let s = Term::Iri(s);
            index.by_predicate.entry(p.clone()).or_default().push(i);
            index
                .by_predicate_subject
                .entry((p.clone(), s.clone()))
                .or_default()
                .push(i);
            index
                .by_predicate_object
                .entry((p.clone(), o.clone()))
                .or_default()
                .push(i);
            index.triples.push((s, p, o));
        }
        index
    }

    fn candidates(&self, s: Option<&Term>, p: Option<&Iri>, o: Option<&Term>) -> Vec<usize> {
        const NONE: &[usize] = &[];
        match (p, s, o) {
            (Some(p), Some(s), _) => self
                .by_predicate_subject
                .get(&(p.clone(), s.clone()))
                .map_or(NONE, Vec::as_slice)
                .to_vec(),
            (Some(p), None, Some(o)) => self
                .by_predicate_object
                .get(&(p.clone(), o.clone()))
                .map_or(NONE, Vec::as_slice)
                .to_vec(),
            (Some(p), None, None) => self
                .by_predicate
                .get(p)
                .map_or(NONE, Vec::as_slice)
                .to_vec(),
            (None, _, _) => (0..self.triples.len()).collect(),
        }
    }

    fn satisfies(&self, term: &Term, c: &TypeConstraint) -> bool {
        let Term::Iri(ind) = term else { return false };
        if c.transitive {
            self.inferred_types
                .get(ind)
                .is_some_and(|types| types.contains(&c.class))
        } else {
            self.asserted_types
                .contains(&(ind.clone(), c.class.clone()))
        }
    }

    pub(crate) fn matches(&self, pattern: &GraphPattern) -> BindingSet {
        let variables: Vec<String> = pattern.variables().into_iter().collect();
        let mut found: BTreeSet<Vec<Term>> = BTreeSet::new();
        let mut binding: BTreeMap<&str, Term> = BTreeMap::new();
        self.join(pattern, 0, &mut binding, &variables, &mut found);
        BindingSet {
            rows: found
                .into_iter()
                .map(|values| variables.iter().cloned().zip(values).collect())
                .collect(),
            variables,
        }
    }

    fn join<'p>(
        &self,
        pattern: &'p GraphPattern,
        depth: usize,
        binding: &mut BTreeMap<&'p str, Term>,
        variables: &[String],
        found: &mut BTreeSet<Vec<Term>>,
    ) {
        let Some(tp) = pattern.triples.get(depth) else {
            if pattern.type_constraints.iter().all(|c| {
                binding
                    .get(c.var.as_str())
                    .is_some_and(|t| self.satisfies(t, c))
            }) {
                found.insert(
                    variables
                        .iter()
                        .map(|v| binding[v.as_str()].clone())
                        .collect(),
                );
            }
            return;
        };

        let resolve = |pt: &PatternTerm, binding: &BTreeMap<&str, Term>| -> Option<Term> {
            match pt {
                PatternTerm::Var(v) => binding.get(v.as_str()).cloned(),
                PatternTerm::Iri(i) => Some(Term::Iri(i.clone())),
                PatternTerm::Literal(l) => Some(Term::Literal(l.clone())),
            }
        };
        let s = resolve(&tp.subject, binding);
        let p = resolve(&tp.predicate, binding);
        let o = resolve(&tp.object, binding);
        let p_iri = match &p {
            Some(Term::Iri(i)) => Some(i),
            Some(Term::Literal(_)) => return,
            None => None,
        };

        for i in self.candidates(s.as_ref(), p_iri, o.as_ref()) {
            let (ts, tpred, to) = &self.triples[i];
            let tpred = Term::Iri(tpred.clone());
            let mut added: Vec<&'p str> = Vec::new();
            let ok = [(&tp.subject, ts), (&tp.predicate, &tpred), (&tp.object, to)]
                .into_iter()
                .all(|(pt, value)| match pt {
                    PatternTerm::Var(v) => match binding.get(v.as_str()) {
                        Some(bound) => bound == value,
                        None => {
                            binding.insert(v.as_str(), value.clone());
                            added.push(v.as_str());
                            true
                        }
                    },
                    PatternTerm::Iri(iri) => matches!(value, Term::Iri(x) if x == iri),
                    PatternTerm::Literal(l) => matches!(value, Term::Literal(x) if x == l),
                });
            if ok {
                self.join(pattern, depth + 1, binding, variables, found);
            }
            for v in added {
                binding.remove(v);
            }
        }
    }
}

/// All assignments under which every triple pattern is an ABox assertion and
/// every type constraint holds. Rows are distinct and sorted by their values
/// in variable-name order.
///
/// A pattern with no triples has exactly one solution, the empty row.
pub fn match_pattern(
    graph: &Ontology,
    closure: &SubsumptionClosure,
    pattern: &GraphPattern,
) -> BindingSet {
    TripleIndex::new(graph, closure).matches(pattern)
}
