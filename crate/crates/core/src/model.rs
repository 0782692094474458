//! Axioms, assertions and the [`Ontology`] container.
//!
//! An ontology is a plain value: a prefix map, a TBox of [`Axiom`]s, an ABox
//! of [`Assertion`]s and the sets of declared classes and properties. All
//! collections are ordered sets, so two ontologies compare equal exactly
//! when they hold the same statements.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::iri::{Iri, IriError, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Iri(#[from] IriError),
    #[error("{kind} axiom needs a property subject, but {subject} is a declared class")]
    PropertyKindMismatch { kind: AxiomKind, subject: Iri },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AxiomKind {
    SubClassOf,
    EquivalentClass,
    DisjointWith,
    Domain,
    Range,
}

impl AxiomKind {
    pub fn is_symmetric(self) -> bool {
        matches!(self, AxiomKind::EquivalentClass | AxiomKind::DisjointWith)
    }

    pub fn is_property_axiom(self) -> bool {
        matches!(self, AxiomKind::Domain | AxiomKind::Range)
    }
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomKind::SubClassOf => "SubClassOf",
            AxiomKind::EquivalentClass => "EquivalentClass",
            AxiomKind::DisjointWith => "DisjointWith",
            AxiomKind::Domain => "Domain",
            AxiomKind::Range => "Range",
        })
    }
}

/// A TBox axiom. Symmetric kinds keep the smaller IRI as subject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Axiom {
    kind: AxiomKind,
    subject: Iri,
    object: Iri,
}

impl Axiom {
    pub fn new(kind: AxiomKind, subject: Iri, object: Iri) -> Self {
        if kind.is_symmetric() && object < subject {
            Axiom {
                kind,
                subject: object,
                object: subject,
            }
        } else {
            Axiom {
                kind,
                subject,
                object,
            }
        }
    }

    pub fn sub_class_of(sub: Iri, sup: Iri) -> Self {
        Self::new(AxiomKind::SubClassOf, sub, sup)
    }

    pub fn equivalent(a: Iri, b: Iri) -> Self {
        Self::new(AxiomKind::EquivalentClass, a, b)
    }

    pub fn disjoint(a: Iri, b: Iri) -> Self {
        Self::new(AxiomKind::DisjointWith, a, b)
    }

    pub fn domain(property: Iri, class: Iri) -> Self {
        Self::new(AxiomKind::Domain, property, class)
    }

    pub fn range(property: Iri, class: Iri) -> Self {
        Self::new(AxiomKind::Range, property, class)
    }

    pub fn kind(&self) -> AxiomKind {
        self.kind
    }

    pub fn subject(&self) -> &Iri {
        &self.subject
    }

    pub fn object(&self) -> &Iri {
        &self.object
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.kind, self.subject, self.object)
    }
}

/// Object position of a relation: an IRI or a plain literal kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Iri(Iri),
    Literal(String),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(s) => write!(f, "{s:?}"),
        }
    }
}

/// An ABox statement about an individual.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind")]
pub enum Assertion {
    TypeOf {
        individual: Iri,
        class: Iri,
    },
    Relation {
        subject: Iri,
        predicate: Iri,
        object: Term,
    },
}

impl Assertion {
    pub fn type_of(individual: Iri, class: Iri) -> Self {
        Assertion::TypeOf { individual, class }
    }

    pub fn relation(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Assertion::Relation {
            subject,
            predicate,
            object: object.into(),
        }
    }

    pub fn subject(&self) -> &Iri {
        match self {
            Assertion::TypeOf { individual, .. } => individual,
            Assertion::Relation { subject, .. } => subject,
        }
    }
}

/// A TBox plus an ABox under one prefix map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub prefixes: PrefixMap,
    pub tbox: BTreeSet<Axiom>,
    pub abox: BTreeSet<Assertion>,
    pub declared_classes: BTreeSet<Iri>,
    pub declared_properties: BTreeSet<Iri>,
}

/// Which role an undeclared IRI plays where it was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ForeignRole {
    Class,
    Property,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Ontology {
            prefixes,
            ..Self::default()
        }
    }

    /// Resolves a prefixed name or `<absolute>` IRI against this ontology's prefixes.
    pub fn iri(&self, term: &str) -> Result<Iri, IriError> {
        self.prefixes.resolve(term)
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty()
            && self.abox.is_empty()
            && self.declared_classes.is_empty()
            && self.declared_properties.is_empty()
    }

    /// Returns a copy containing `axiom`. Re-adding is a no-op.
    pub fn add_axiom(&self, axiom: Axiom) -> Result<Ontology, ModelError> {
        let mut out = self.clone();
        out.insert_axiom(axiom)?;
        Ok(out)
    }

    /// In-place form of [`Ontology::add_axiom`]; returns whether the axiom was new.
    pub fn insert_axiom(&mut self, axiom: Axiom) -> Result<bool, ModelError> {
        if axiom.kind.is_property_axiom() && self.declared_classes.contains(&axiom.subject) {
            return Err(ModelError::PropertyKindMismatch {
                kind: axiom.kind,
                subject: axiom.subject,
            });
        }
        Ok(self.tbox.insert(axiom))
    }

    pub fn insert_assertion(&mut self, assertion: Assertion) -> bool {
        self.abox.insert(assertion)
    }

    pub fn declare_class(&mut self, class: Iri) -> bool {
        self.declared_classes.insert(class)
    }

    pub fn declare_property(&mut self, property: Iri) -> bool {
        self.declared_properties.insert(property)
    }

    pub fn contains_axiom(&self, axiom: &Axiom) -> bool {
        self.tbox.contains(axiom)
    }

    /// Set union of both ontologies. Fails when a prefix label is bound to
    /// different namespaces on each side.
    pub fn merge(&self, other: &Ontology) -> Result<Ontology, ModelError> {
        let prefixes = self.prefixes.merged(&other.prefixes)?;
        Ok(Ontology {
            prefixes,
            tbox: self.tbox.union(&other.tbox).cloned().collect(),
            abox: self.abox.union(&other.abox).cloned().collect(),
            declared_classes: self
                .declared_classes
                .union(&other.declared_classes)
                .cloned()
                .collect(),
            declared_properties: self
                .declared_properties
                .union(&other.declared_properties)
                .cloned()
                .collect(),
        })
    }

    /// Merges any number of ontologies left to right.
    pub fn merge_all<'a>(
        parts: impl IntoIterator<Item = &'a Ontology>,
    ) -> Result<Ontology, ModelError> {
        parts
            .into_iter()
            .try_fold(Ontology::new(), |acc, part| acc.merge(part))
    }

    /// Every IRI used in class position anywhere in the ontology.
    pub fn class_iris(&self) -> BTreeSet<Iri> {
        let mut out = self.declared_classes.clone();
        for ax in &self.tbox {
            if !ax.kind.is_property_axiom() {
                out.insert(ax.subject.clone());
            }
            out.insert(ax.object.clone());
        }
        for a in &self.abox {
            if let Assertion::TypeOf { class, .. } = a {
                out.insert(class.clone());
            }
        }
        out
    }

    /// Individuals mentioned in the ABox (subjects, and IRI objects of relations).
    pub fn individuals(&self) -> BTreeSet<Iri> {
        let mut out = BTreeSet::new();
        for a in &self.abox {
            match a {
                Assertion::TypeOf { individual, .. } => {
                    out.insert(individual.clone());
                }
                Assertion::Relation {
                    subject, object, ..
                } => {
                    out.insert(subject.clone());
                    if let Term::Iri(o) = object {
                        out.insert(o.clone());
                    }
                }
            }
        }
        out
    }

    /// IRIs used as classes or properties that this ontology never declares.
    pub fn foreign_terms(&self) -> BTreeSet<(ForeignRole, Iri)> {
        let mut out = BTreeSet::new();
        for class in self.class_iris() {
            if !self.declared_classes.contains(&class) {
                out.insert((ForeignRole::Class, class));
            }
        }
        let props = self
            .tbox
            .iter()
            .filter(|ax| ax.kind.is_property_axiom())
            .map(|ax| &ax.subject)
            .chain(self.abox.iter().filter_map(|a| match a {
                Assertion::Relation { predicate, .. } => Some(predicate),
                Assertion::TypeOf { .. } => None,
            }));
        for p in props {
            if !self.declared_properties.contains(p) {
                out.insert((ForeignRole::Property, p.clone()));
            }
        }
        out
    }
}
