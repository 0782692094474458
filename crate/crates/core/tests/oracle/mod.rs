//! Independent reference implementations and random generators used by the
//! property tests and the acceptance suite.
//!
//! Nothing here calls into the reasoner or matcher being checked, apart from
//! the one function under test in each `check_*` helper.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use skoo::iri::{Iri, PrefixMap, RDF};
use skoo::model::{Assertion, Axiom, AxiomKind, Ontology, Term};
use skoo::reasoner::{is_subclass_of, subsumption_closure};
use skoo::transform::{match_pattern, GraphPattern, PatternTerm, TriplePattern, TypeConstraint};
use skoo::turtle::{parse_turtle, serialize_turtle};

pub const NS: &str = "http://example.org/gen#";

pub fn iri(local: &str) -> Iri {
    Iri::new(format!("{NS}{local}")).unwrap()
}

pub fn rdf_type() -> Iri {
    Iri::new(format!("{RDF}type")).unwrap()
}

/// Random class hierarchy: up to `max_classes` classes, up to `max_edges`
/// subclass or equivalence axioms of which at most `max_equiv` are equivalences.
pub fn random_hierarchy(
    rng: &mut impl Rng,
    max_classes: usize,
    max_edges: usize,
    max_equiv: usize,
) -> Ontology {
    let n = rng.random_range(1..=max_classes);
    let classes: Vec<Iri> = (0..n).map(|i| iri(&format!("C{i}"))).collect();
    let mut o = Ontology::new();
    for c in &classes {
        o.declare_class(c.clone());
    }
    let equiv = rng.random_range(0..=max_equiv.min(max_edges));
    let sub = rng.random_range(0..=max_edges - equiv);
    for _ in 0..sub {
        let a = classes.choose(rng).unwrap().clone();
        let b = classes.choose(rng).unwrap().clone();
        o.insert_axiom(Axiom::sub_class_of(a, b)).unwrap();
    }
    for _ in 0..equiv {
        let a = classes.choose(rng).unwrap().clone();
        let b = classes.choose(rng).unwrap().clone();
        o.insert_axiom(Axiom::equivalent(a, b)).unwrap();
    }
    o
}

/// Superclasses of every class by depth-first search over subclass edges and
/// both directions of equivalence edges. Reflexive.
pub fn brute_force_supers(o: &Ontology) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut adj: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
    let mut classes: BTreeSet<Iri> = o.declared_classes.clone();
    for ax in &o.tbox {
        match ax.kind() {
            AxiomKind::SubClassOf => {
                adj.entry(ax.subject().clone())
                    .or_default()
                    .push(ax.object().clone());
            }
            AxiomKind::EquivalentClass => {
                adj.entry(ax.subject().clone())
                    .or_default()
                    .push(ax.object().clone());
                adj.entry(ax.object().clone())
                    .or_default()
                    .push(ax.subject().clone());
            }
            _ => {}
        }
        if !ax.kind().is_property_axiom() {
            classes.insert(ax.subject().clone());
        }
        classes.insert(ax.object().clone());
    }
    for a in &o.abox {
        if let Assertion::TypeOf { class, .. } = a {
            classes.insert(class.clone());
        }
    }
    classes
        .into_iter()
        .map(|c| {
            let mut seen = BTreeSet::from([c.clone()]);
            let mut stack = vec![c.clone()];
            while let Some(x) = stack.pop() {
                for y in adj.get(&x).into_iter().flatten() {
                    if seen.insert(y.clone()) {
                        stack.push(y.clone());
                    }
                }
            }
            (c, seen)
        })
        .collect()
}

/// Compares the closure with brute-force reachability on every ordered pair.
pub fn check_closure(o: &Ontology) -> Result<(), String> {
    let closure = subsumption_closure(o);
    let expected = brute_force_supers(o);
    let known: BTreeSet<&Iri> = closure.classes().collect();
    if known != expected.keys().collect() {
        return Err("closure and oracle disagree on the class set".into());
    }
    for (a, supers) in &expected {
        for b in expected.keys() {
            let got = is_subclass_of(&closure, a, b).map_err(|e| e.to_string())?;
            if got != supers.contains(b) {
                return Err(format!(
                    "{a} ⊑ {b}: closure says {got}, oracle says {}",
                    !got
                ));
            }
        }
    }
    Ok(())
}

/// Small random instance graph over a fixed vocabulary, with a few subclass,
/// domain and range axioms so type constraints have something to infer.
pub fn random_instance_graph(rng: &mut impl Rng, max_assertions: usize) -> Ontology {
    let mut o = Ontology::new();
    o.prefixes.bind("g", NS).unwrap();
    for _ in 0..rng.random_range(0..4) {
        let a = iri(&format!("K{}", rng.random_range(0..4)));
        let b = iri(&format!("K{}", rng.random_range(0..4)));
        o.insert_axiom(Axiom::sub_class_of(a, b)).unwrap();
    }
    for p in 0..3 {
        if rng.random_bool(0.3) {
            let k = iri(&format!("K{}", rng.random_range(0..4)));
            o.insert_axiom(Axiom::domain(iri(&format!("p{p}")), k))
                .unwrap();
        }
        if rng.random_bool(0.3) {
            let k = iri(&format!("K{}", rng.random_range(0..4)));
            o.insert_axiom(Axiom::range(iri(&format!("p{p}")), k))
                .unwrap();
        }
    }
    for _ in 0..rng.random_range(0..=max_assertions) {
        let s = iri(&format!("e{}", rng.random_range(0..6)));
        let a = match rng.random_range(0..4) {
            0 => Assertion::type_of(s, iri(&format!("K{}", rng.random_range(0..4)))),
            1 => Assertion::relation(
                s,
                iri(&format!("p{}", rng.random_range(0..3))),
                Term::Literal(format!("v{}", rng.random_range(0..2))),
            ),
            _ => Assertion::relation(
                s,
                iri(&format!("p{}", rng.random_range(0..3))),
                iri(&format!("e{}", rng.random_range(0..6))),
            ),
        };
        o.insert_assertion(a);
    }
    o
}

/// Random pattern of 1 to `max_triples` triples over the instance-graph
/// vocabulary, using at most the variables `x`, `y` and `p` (`p` only as a
/// predicate).
pub fn random_pattern(rng: &mut impl Rng, max_triples: usize) -> GraphPattern {
    let node = |rng: &mut dyn rand::RngCore| -> PatternTerm {
        match rng.random_range(0..10) {
            0..=4 => PatternTerm::var("x"),
            5..=7 => PatternTerm::var("y"),
            8 => PatternTerm::Iri(iri(&format!("e{}", rng.random_range(0..6)))),
            _ => PatternTerm::Iri(iri(&format!("K{}", rng.random_range(0..4)))),
        }
    };
    let mut triples = Vec::new();
    for _ in 0..rng.random_range(1..=max_triples) {
        let s = node(rng);
        let p = match rng.random_range(0..6) {
            0 | 1 => PatternTerm::var("p"),
            2 => PatternTerm::Iri(rdf_type()),
            _ => PatternTerm::Iri(iri(&format!("p{}", rng.random_range(0..3)))),
        };
        let o = if rng.random_bool(0.15) {
            PatternTerm::Literal(format!("v{}", rng.random_range(0..2)))
        } else {
            node(rng)
        };
        triples.push(TriplePattern::new(s, p, o));
    }
    let positional: Vec<String> = triples
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(|t| match t {
            PatternTerm::Var(v) => Some(v.clone()),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut constraints = Vec::new();
    if let Some(var) = positional.choose(rng) {
        if rng.random_bool(0.5) {
            constraints.push(TypeConstraint {
                var: var.clone(),
                class: iri(&format!("K{}", rng.random_range(0..4))),
                transitive: rng.random_bool(0.5),
            });
        }
    }
    GraphPattern::new(triples, constraints).expect("generator respects pattern invariants")
}

/// The ABox as plain triples.
pub fn abox_triples(g: &Ontology) -> BTreeSet<(Term, Term, Term)> {
    g.abox
        .iter()
        .map(|a| match a {
            Assertion::TypeOf { individual, class } => (
                Term::Iri(individual.clone()),
                Term::Iri(rdf_type()),
                Term::Iri(class.clone()),
            ),
            Assertion::Relation {
                subject,
                predicate,
                object,
            } => (
                Term::Iri(subject.clone()),
                Term::Iri(predicate.clone()),
                object.clone(),
            ),
        })
        .collect()
}

/// Types of each individual: asserted, plus domain and range consequences,
/// closed upward with [`brute_force_supers`].
pub fn brute_force_types(g: &Ontology) -> BTreeSet<(Iri, Iri)> {
    let supers = brute_force_supers(g);
    let mut base = BTreeSet::new();
    for a in &g.abox {
        match a {
            Assertion::TypeOf { individual, class } => {
                base.insert((individual.clone(), class.clone()));
            }
            Assertion::Relation {
                subject,
                predicate,
                object,
            } => {
                for ax in &g.tbox {
                    if ax.subject() != predicate {
                        continue;
                    }
                    match (ax.kind(), object) {
                        (AxiomKind::Domain, _) => {
                            base.insert((subject.clone(), ax.object().clone()));
                        }
                        (AxiomKind::Range, Term::Iri(o)) => {
                            base.insert((o.clone(), ax.object().clone()));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    base.into_iter()
        .flat_map(|(ind, c)| {
            let ups = supers
                .get(&c)
                .cloned()
                .unwrap_or_else(|| BTreeSet::from([c.clone()]));
            ups.into_iter().map(move |u| (ind.clone(), u))
        })
        .collect()
}

/// Tries every assignment of graph terms to the pattern's variables.
pub fn naive_match(g: &Ontology, pattern: &GraphPattern) -> Vec<BTreeMap<String, Term>> {
    let triples = abox_triples(g);
    let universe: BTreeSet<Term> = triples
        .iter()
        .flat_map(|(s, p, o)| [s.clone(), p.clone(), o.clone()])
        .collect();
    let universe: Vec<Term> = universe.into_iter().collect();
    let vars: Vec<String> = pattern.variables().into_iter().collect();
    let asserted: BTreeSet<(Term, Term)> = triples
        .iter()
        .filter(|(_, p, _)| *p == Term::Iri(rdf_type()))
        .map(|(s, _, o)| (s.clone(), o.clone()))
        .collect();
    let inferred: BTreeSet<(Term, Term)> = brute_force_types(g)
        .into_iter()
        .map(|(i, c)| (Term::Iri(i), Term::Iri(c)))
        .collect();

    let mut rows = BTreeSet::new();
    let total = universe.len().pow(vars.len() as u32);
    for mut code in 0..total {
        let mut row = BTreeMap::new();
        for v in &vars {
            row.insert(v.clone(), universe[code % universe.len()].clone());
            code /= universe.len();
        }
        let value = |t: &PatternTerm| match t {
            PatternTerm::Var(v) => row[v].clone(),
            PatternTerm::Iri(i) => Term::Iri(i.clone()),
            PatternTerm::Literal(l) => Term::Literal(l.clone()),
        };
        let holds = pattern
            .triples()
            .iter()
            .all(|t| triples.contains(&(value(&t.subject), value(&t.predicate), value(&t.object))));
        let typed = pattern.type_constraints().iter().all(|c| {
            let pair = (row[&c.var].clone(), Term::Iri(c.class.clone()));
            if c.transitive {
                inferred.contains(&pair)
            } else {
                asserted.contains(&pair)
            }
        });
        if holds && typed {
            rows.insert(row);
        }
    }
    rows.into_iter().collect()
}

/// Compares `match_pattern` with [`naive_match`].
pub fn check_matcher(g: &Ontology, pattern: &GraphPattern) -> Result<(), String> {
    let closure = subsumption_closure(g);
    let got: BTreeSet<_> = match_pattern(g, &closure, pattern)
        .rows
        .into_iter()
        .collect();
    let want: BTreeSet<_> = naive_match(g, pattern).into_iter().collect();
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "pattern {pattern:?}: matcher found {} rows, oracle {}",
            got.len(),
            want.len()
        ))
    }
}

const LITERAL_PIECES: [&str; 8] = [
    "plain",
    "with \"quotes\"",
    "back\\slash",
    "line\nbreak",
    "tab\there",
    "ünïcødé",
    "",
    "it's",
];

/// Random ontology using every construct the Turtle writer emits.
pub fn random_turtle_ontology(rng: &mut impl Rng) -> Ontology {
    let mut prefixes = PrefixMap::new();
    prefixes.bind("g", NS).unwrap();
    if rng.random_bool(0.5) {
        prefixes.bind("h", "http://example.org/other/").unwrap();
    }
    let mut o = Ontology::with_prefixes(prefixes);
    let class = |rng: &mut dyn rand::RngCore| match rng.random_range(0..3) {
        0 => Iri::new(format!(
            "http://example.org/other/C{}",
            rng.random_range(0..4)
        ))
        .unwrap(),
        1 => Iri::new(format!("urn:x:c{}", rng.random_range(0..3))).unwrap(),
        _ => iri(&format!("C{}", rng.random_range(0..8))),
    };
    let property = |rng: &mut dyn rand::RngCore| iri(&format!("p{}", rng.random_range(0..4)));
    for _ in 0..rng.random_range(0..6) {
        o.declare_class(class(rng));
    }
    for _ in 0..rng.random_range(0..3) {
        o.declare_property(property(rng));
    }
    for _ in 0..rng.random_range(0..15) {
        let ax = match rng.random_range(0..5) {
            0 => Axiom::sub_class_of(class(rng), class(rng)),
            1 => Axiom::equivalent(class(rng), class(rng)),
            2 => Axiom::disjoint(class(rng), class(rng)),
            3 => Axiom::domain(property(rng), class(rng)),
            _ => Axiom::range(property(rng), class(rng)),
        };
        o.insert_axiom(ax).unwrap();
    }
    for _ in 0..rng.random_range(0..15) {
        let s = iri(&format!("i{}", rng.random_range(0..6)));
        let a = match rng.random_range(0..3) {
            0 => Assertion::type_of(s, class(rng)),
            1 => Assertion::relation(
                s,
                property(rng),
                iri(&format!("i{}", rng.random_range(0..6))),
            ),
            _ => Assertion::relation(
                s,
                property(rng),
                Term::Literal((*LITERAL_PIECES.choose(rng).unwrap()).to_owned()),
            ),
        };
        o.insert_assertion(a);
    }
    o
}

/// Serializes `o`, parses the result and compares it with `o`.
pub fn check_round_trip(o: &Ontology) -> Result<(), String> {
    let text = serialize_turtle(o);
    let back = parse_turtle(&text).map_err(|e| format!("reparse failed: {e}\n{text}"))?;
    let same = back.tbox == o.tbox
        && back.abox == o.abox
        && back.declared_classes == o.declared_classes
        && back.declared_properties == o.declared_properties
        && back.prefixes == o.prefixes;
    if same {
        Ok(())
    } else {
        Err(format!("round trip changed the ontology:\n{text}"))
    }
}

/// parse, serialize, parse again: the two parses must agree.
pub fn check_text_round_trip(text: &str) -> Result<(), String> {
    let first = parse_turtle(text).map_err(|e| e.to_string())?;
    check_round_trip(&first)
}
