//! Subsumption closure, disjointness clashes and type inference.
//!
//! The fragment covered is small on purpose: subclass and equivalence axioms
//! induce a preorder on classes, subclass cycles collapse into equivalence
//! classes, disjointness axioms are the only source of unsatisfiability, and
//! domain/range axioms propagate types to the individuals a relation links.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::iri::Iri;
use crate::model::{Assertion, Axiom, AxiomKind, Ontology, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("unknown class {0}")]
    UnknownClass(Iri),
}

/// The reflexive-transitive subclass relation with equivalent classes merged.
///
/// Every class is mapped to a canonical representative, the smallest IRI of
/// its equivalence class. `reachable` is keyed and valued by representatives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubsumptionClosure {
    canon: BTreeMap<Iri, Iri>,
    reachable: BTreeMap<Iri, BTreeSet<Iri>>,
    members: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl SubsumptionClosure {
    pub fn canonical(&self, class: &Iri) -> Option<&Iri> {
        self.canon.get(class)
    }

    /// Canonical superclasses of a canonical class, itself included.
    pub fn reachable(&self, canonical: &Iri) -> Option<&BTreeSet<Iri>> {
        self.reachable.get(canonical)
    }

    /// Every class the closure knows about.
    pub fn classes(&self) -> impl Iterator<Item = &Iri> {
        self.canon.keys()
    }

    pub fn canonical_classes(&self) -> impl Iterator<Item = &Iri> {
        self.reachable.keys()
    }

    pub fn contains(&self, class: &Iri) -> bool {
        self.canon.contains_key(class)
    }

    /// All classes equivalent to `class`, itself included.
    pub fn equivalents(&self, class: &Iri) -> Result<&BTreeSet<Iri>, ReasonerError> {
        let c = self.canon_of(class)?;
        Ok(&self.members[c])
    }

    /// All entailed superclasses of `class` (every member of every reachable
    /// equivalence class), including `class` itself.
    pub fn superclasses(&self, class: &Iri) -> Result<BTreeSet<Iri>, ReasonerError> {
        let c = self.canon_of(class)?;
        Ok(self.reachable[c]
            .iter()
            .flat_map(|r| self.members[r].iter().cloned())
            .collect())
    }

    fn canon_of(&self, class: &Iri) -> Result<&Iri, ReasonerError> {
        self.canon
            .get(class)
            .ok_or_else(|| ReasonerError::UnknownClass(class.clone()))
    }
}

/// Whether `sub ⊑ sup` is entailed.
pub fn is_subclass_of(
    closure: &SubsumptionClosure,
    sub: &Iri,
    sup: &Iri,
) -> Result<bool, ReasonerError> {
    let sub = closure.canon_of(sub)?;
    let sup = closure.canon_of(sup)?;
    Ok(closure.reachable[sub].contains(sup))
}

/// Computes the closure over every class IRI of `ontology`.
///
/// Strongly connected components of the graph whose edges are subclass
/// axioms (and equivalence axioms in both directions) become equivalence
/// classes. Tarjan's algorithm emits components in reverse topological
/// order, so each component's reachable set is assembled from successors
/// that are already complete.
pub fn subsumption_closure(ontology: &Ontology) -> SubsumptionClosure {
    let classes: Vec<Iri> = ontology.class_iris().into_iter().collect();
    let index: BTreeMap<&Iri, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for ax in &ontology.tbox {
        let edge = || (index[ax.subject()], index[ax.object()]);
        match ax.kind() {
            AxiomKind::SubClassOf => {
                let (s, o) = edge();
                succ[s].push(o);
            }
            AxiomKind::EquivalentClass => {
                let (s, o) = edge();
                succ[s].push(o);
                succ[o].push(s);
            }
            _ => {}
        }
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }

    let components = tarjan(&succ);
    let mut component_of = vec![0usize; classes.len()];
    for (ci, comp) in components.iter().enumerate() {
        for &n in comp {
            component_of[n] = ci;
        }
    }

    let mut reach: Vec<BTreeSet<usize>> = Vec::with_capacity(components.len());
    for (ci, comp) in components.iter().enumerate() {
        let mut set = BTreeSet::from([ci]);
        for &n in comp {
            for &m in &succ[n] {
                let cm = component_of[m];
                if cm != ci {
                    set.extend(reach[cm].iter().copied());
                }
            }
        }
        reach.push(set);
    }

    // Node indices follow IRI order, so the minimum index is the smallest IRI.
    let rep: Vec<usize> = components
        .iter()
        .map(|c| *c.iter().min().expect("non-empty component"))
        .collect();
    let mut out = SubsumptionClosure::default();
    for (ci, comp) in components.iter().enumerate() {
        let r = classes[rep[ci]].clone();
        for &n in comp {
            out.canon.insert(classes[n].clone(), r.clone());
        }
        out.members.insert(
            r.clone(),
            comp.iter().map(|&n| classes[n].clone()).collect(),
        );
        out.reachable.insert(
            r,
            reach[ci].iter().map(|&c| classes[rep[c]].clone()).collect(),
        );
    }
    out
}

/// Iterative Tarjan SCC; components come out in reverse topological order.
fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("v is on the stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

/// Why an individual has a base type, before superclass propagation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum TypeSource {
    Asserted(Assertion),
    Domain(Assertion, Axiom),
    Range(Assertion, Axiom),
}

impl TypeSource {
    fn assertion(&self) -> &Assertion {
        match self {
            TypeSource::Asserted(a) | TypeSource::Domain(a, _) | TypeSource::Range(a, _) => a,
        }
    }

    fn axiom(&self) -> Option<&Axiom> {
        match self {
            TypeSource::Asserted(_) => None,
            TypeSource::Domain(_, ax) | TypeSource::Range(_, ax) => Some(ax),
        }
    }
}

/// Types each individual gets directly from assertions and domain/range axioms.
fn base_types(ontology: &Ontology) -> BTreeMap<Iri, BTreeMap<Iri, TypeSource>> {
    let mut domains: BTreeMap<&Iri, Vec<&Axiom>> = BTreeMap::new();
    let mut ranges: BTreeMap<&Iri, Vec<&Axiom>> = BTreeMap::new();
    for ax in &ontology.tbox {
        match ax.kind() {
            AxiomKind::Domain => domains.entry(ax.subject()).or_default().push(ax),
            AxiomKind::Range => ranges.entry(ax.subject()).or_default().push(ax),
            _ => {}
        }
    }
    let mut out: BTreeMap<Iri, BTreeMap<Iri, TypeSource>> = BTreeMap::new();
    let mut add = |ind: &Iri, class: &Iri, source: TypeSource| {
        out.entry(ind.clone())
            .or_default()
            .entry(class.clone())
            .or_insert(source);
    };
    for a in &ontology.abox {
        match a {
            Assertion::TypeOf { individual, class } => {
                add(individual, class, TypeSource::Asserted(a.clone()))
            }
            Assertion::Relation {
                subject,
                predicate,
                object,
            } => {
                for ax in domains.get(predicate).into_iter().flatten() {
                    add(
                        subject,
                        ax.object(),
                        TypeSource::Domain(a.clone(), (*ax).clone()),
                    );
                }
                if let Term::Iri(o) = object {
                    for ax in ranges.get(predicate).into_iter().flatten() {
                        add(o, ax.object(), TypeSource::Range(a.clone(), (*ax).clone()));
                    }
                }
            }
        }
    }
    out
}

/// Asserted types closed under superclassing, plus domain/range propagation.
///
/// Classes the closure does not know are kept as-is.
pub fn infer_types(ontology: &Ontology, closure: &SubsumptionClosure) -> BTreeSet<(Iri, Iri)> {
    let mut out = BTreeSet::new();
    for (ind, types) in base_types(ontology) {
        for class in types.keys() {
            match closure.superclasses(class) {
                Ok(sups) => out.extend(sups.into_iter().map(|s| (ind.clone(), s))),
                Err(_) => {
                    out.insert((ind.clone(), class.clone()));
                }
            }
        }
    }
    out
}

/// Inferred types grouped by individual.
pub fn inferred_types_by_individual(
    ontology: &Ontology,
    closure: &SubsumptionClosure,
) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut out: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for (ind, class) in infer_types(ontology, closure) {
        out.entry(ind).or_default().insert(class);
    }
    out
}

/// A chain of TBox axioms from a starting class to one side of a disjoint pair.
///
/// For individual conflicts, `grounds` is the ABox assertion the starting
/// type comes from; a domain or range axiom is then the first step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct WitnessPath {
    pub grounds: Option<Assertion>,
    pub steps: Vec<Axiom>,
}

/// Explanation of one clash: `subject` falls under both classes of `disjoint`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub subject: Iri,
    pub individual: bool,
    pub disjoint: Axiom,
    pub left: WitnessPath,
    pub right: WitnessPath,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub unsatisfiable_classes: BTreeSet<Iri>,
    /// `(individual, class, class)`, the classes in disjoint-axiom order.
    pub conflicting_individuals: BTreeSet<(Iri, Iri, Iri)>,
    pub witnesses: Vec<Witness>,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ReportJson<'a> {
    schema_version: u32,
    consistent: bool,
    unsatisfiable_classes: &'a BTreeSet<Iri>,
    conflicting_individuals: Vec<ConflictJson<'a>>,
    witnesses: &'a [Witness],
}

#[derive(Serialize)]
struct ConflictJson<'a> {
    individual: &'a Iri,
    class_a: &'a Iri,
    class_b: &'a Iri,
}

impl ConsistencyReport {
    /// Pretty-printed JSON with a `schema_version` field and fixed key order.
    pub fn to_json(&self) -> String {
        let doc = ReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            consistent: self.consistent,
            unsatisfiable_classes: &self.unsatisfiable_classes,
            conflicting_individuals: self
                .conflicting_individuals
                .iter()
                .map(|(individual, class_a, class_b)| ConflictJson {
                    individual,
                    class_a,
                    class_b,
                })
                .collect(),
            witnesses: &self.witnesses,
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}

/// Detects unsatisfiable classes and individuals typed into a disjoint pair.
pub fn check_consistency(ontology: &Ontology) -> ConsistencyReport {
    let closure = subsumption_closure(ontology);
    let paths = AxiomGraph::new(ontology);
    let disjoint: Vec<&Axiom> = ontology
        .tbox
        .iter()
        .filter(|ax| ax.kind() == AxiomKind::DisjointWith)
        .collect();

    let mut report = ConsistencyReport::default();

    for ax in &disjoint {
        let ca = &closure.canon[ax.subject()];
        let cb = &closure.canon[ax.object()];
        for (rep, reach) in &closure.reachable {
            if !(reach.contains(ca) && reach.contains(cb)) {
                continue;
            }
            for class in &closure.members[rep] {
                report.unsatisfiable_classes.insert(class.clone());
                let left = paths.chain(class, ax.subject()).expect("entailed");
                let right = paths.chain(class, ax.object()).expect("entailed");
                report.witnesses.push(Witness {
                    subject: class.clone(),
                    individual: false,
                    disjoint: (*ax).clone(),
                    left: WitnessPath {
                        grounds: None,
                        steps: left,
                    },
                    right: WitnessPath {
                        grounds: None,
                        steps: right,
                    },
                });
            }
        }
    }

    let bases = base_types(ontology);
    for (ind, types) in inferred_types_by_individual(ontology, &closure) {
        for ax in &disjoint {
            if !(types.contains(ax.subject()) && types.contains(ax.object())) {
                continue;
            }
            report.conflicting_individuals.insert((
                ind.clone(),
                ax.subject().clone(),
                ax.object().clone(),
            ));
            let sources = &bases[&ind];
            let left = paths
                .grounded_chain(sources, ax.subject())
                .expect("entailed");
            let right = paths
                .grounded_chain(sources, ax.object())
                .expect("entailed");
            report.witnesses.push(Witness {
                subject: ind.clone(),
                individual: true,
                disjoint: (*ax).clone(),
                left,
                right,
            });
        }
    }

    report.witnesses.sort();
    report.consistent =
        report.unsatisfiable_classes.is_empty() && report.conflicting_individuals.is_empty();
    report
}

/// Subclass and equivalence axioms as a directed multigraph, for witness search.
struct AxiomGraph<'a> {
    edges: BTreeMap<&'a Iri, Vec<(&'a Iri, &'a Axiom)>>,
}

impl<'a> AxiomGraph<'a> {
    fn new(ontology: &'a Ontology) -> Self {
        let mut edges: BTreeMap<&Iri, Vec<(&Iri, &Axiom)>> = BTreeMap::new();
        for ax in &ontology.tbox {
            match ax.kind() {
                AxiomKind::SubClassOf => edges
                    .entry(ax.subject())
                    .or_default()
                    .push((ax.object(), ax)),
                AxiomKind::EquivalentClass => {
                    edges
                        .entry(ax.subject())
                        .or_default()
                        .push((ax.object(), ax));
                    edges
                        .entry(ax.object())
                        .or_default()
                        .push((ax.subject(), ax));
                }
                _ => {}
            }
        }
        AxiomGraph { edges }
    }

    /// Shortest axiom chain from `from` to `to`, empty when they coincide.
    fn chain(&self, from: &Iri, to: &Iri) -> Option<Vec<Axiom>> {
        let mut prev: BTreeMap<&Iri, (&Iri, &Axiom)> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(cur) = queue.pop_front() {
            if cur == to {
                let mut steps = Vec::new();
                let mut at = cur;
                while let Some((p, ax)) = prev.get(at) {
                    steps.push((*ax).clone());
                    at = p;
                }
                steps.reverse();
                return Some(steps);
            }
            for (next, ax) in self.edges.get(cur).into_iter().flatten() {
                if seen.insert(*next) {
                    prev.insert(*next, (cur, *ax));
                    queue.push_back(*next);
                }
            }
        }
        None
    }

    fn grounded_chain(
        &self,
        sources: &BTreeMap<Iri, TypeSource>,
        target: &Iri,
    ) -> Option<WitnessPath> {
        sources
            .iter()
            .filter_map(|(class, source)| {
                let chain = self.chain(class, target)?;
                let steps = source.axiom().cloned().into_iter().chain(chain).collect();
                Some(WitnessPath {
                    grounds: Some(source.assertion().clone()),
                    steps,
                })
            })
            .min_by_key(|p| p.steps.len())
    }
}
