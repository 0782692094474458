//! Declarative mapping rules from instance graphs to visual models.
//!
//! A rule file is a JSON array of rules:
//!
//! ```json
//! [{
//!   "name": "theorem-node",
//!   "where": {
//!     "triples": [["?t", "a", "skoo:Theorem"]],
//!     "types": [{"var": "?t", "class": "skoo:Statement", "transitive": true}]
//!   },
//!   "emit": [{"kind": "node", "id": "{?t}", "label": "{?t}", "class": "theorem"}]
//! }]
//! ```
//!
//! Pattern terms are `?var`, `a`, `<absolute-iri>`, `"literal"` or a prefixed
//! name. Prefixed names are resolved against the prefixes of the graph the
//! rules are applied to.
//!
//! Emit fields by kind:
//!
//! | kind    | required             | optional |
//! |---------|----------------------|----------|
//! | `node`  | `id`, `class`        | `label` (defaults to the id) |
//! | `edge`  | `id`, `from`, `to`   | `label` |
//! | `tree`  | `id`, `from`, `to`   | |
//! | `list`  | `id`, `to`           | |
//! | `text`  | `id`, `label`        | |
//! | `shape` | `id`, `class`        | |
//!
//! For trees `from` is the parent and `to` the child; for lists `to` is the
//! item appended. A shape's `class` must render to `rect`, `ellipse` or `line`.
//!
//! Templates substitute `{?var}`. IRIs render in compact form. Inside `class`
//! an IRI renders as a style tag instead: its local name, lowercased, with
//! underscores turned into hyphens (`skoo:Domain_Object` becomes
//! `domain-object`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::iri::{Iri, IriError, PrefixMap, RDF};
use crate::model::{Ontology, Term};
use crate::reasoner::SubsumptionClosure;
use crate::schema::DEFAULT_RULES_FILE;
use crate::turtle::Severity;
use crate::visual::{
    validate_visual_model, ShapeKind, VisDiagnostic, VisEdge, VisList, VisNode, VisShape, VisText,
    VisTree, VisualModel,
};

use super::pattern::{
    GraphPattern, PatternError, PatternTerm, TripleIndex, TriplePattern, TypeConstraint,
};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("malformed rule file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule {rule}: emit template uses unbound variable ?{var}")]
    UnboundVariable { rule: String, var: String },
    #[error("rule {rule}: unknown element kind {kind:?}")]
    UnknownKind { rule: String, kind: String },
    #[error("rule {rule}: {kind} element is missing `{field}`")]
    MissingField {
        rule: String,
        kind: ElementKind,
        field: &'static str,
    },
    #[error("rule {rule}: bad pattern term {term:?}")]
    BadTerm { rule: String, term: String },
    #[error("rule {rule}: {source}")]
    Pattern {
        rule: String,
        #[source]
        source: PatternError,
    },
    #[error("rule {rule}: cannot resolve {name}: {source}")]
    Unresolved {
        rule: String,
        name: String,
        #[source]
        source: IriError,
    },
    #[error("rule {rule}: {value:?} is not a shape kind")]
    BadShape { rule: String, value: String },
    #[error("element {id:?} emitted differently by rules {first} and {second}")]
    Conflict {
        id: String,
        first: String,
        second: String,
    },
    #[error("edge {edge:?} refers to missing node {node:?}")]
    DanglingEdge { edge: String, node: String },
    #[error("tree {tree:?} has no single root")]
    Rootless { tree: String },
    #[error("generated model is invalid: {}", .0.iter().map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<VisDiagnostic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementKind {
    Node,
    Edge,
    Tree,
    List,
    Text,
    Shape,
}

impl ElementKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "node" => ElementKind::Node,
            "edge" => ElementKind::Edge,
            "tree" => ElementKind::Tree,
            "list" => ElementKind::List,
            "text" => ElementKind::Text,
            "shape" => ElementKind::Shape,
            _ => return None,
        })
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Node => "node",
            ElementKind::Edge => "edge",
            ElementKind::Tree => "tree",
            ElementKind::List => "list",
            ElementKind::Text => "text",
            ElementKind::Shape => "shape",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Part {
    Text(String),
    Var(String),
}

/// A string with `{?var}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    parts: Vec<Part>,
}

impl Template {
    pub fn parse(source: &str) -> Self {
        let mut parts = Vec::new();
        let mut text = String::new();
        let mut rest = source;
        while let Some(start) = rest.find("{?") {
            let after = &rest[start + 2..];
            let len = after
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(after.len());
            if len > 0 && after[len..].starts_with('}') {
                text.push_str(&rest[..start]);
                if !text.is_empty() {
                    parts.push(Part::Text(std::mem::take(&mut text)));
                }
                parts.push(Part::Var(after[..len].to_owned()));
                rest = &after[len + 1..];
            } else {
                text.push_str(&rest[..start + 2]);
                rest = after;
            }
        }
        text.push_str(rest);
        if !text.is_empty() {
            parts.push(Part::Text(text));
        }
        Template { parts }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            Part::Var(v) => Some(v.as_str()),
            Part::Text(_) => None,
        })
    }

    fn single_var(&self) -> Option<&str> {
        match self.parts.as_slice() {
            [Part::Var(v)] => Some(v),
            _ => None,
        }
    }

    fn render(&self, row: &BTreeMap<String, Term>, prefixes: &PrefixMap, style: bool) -> String {
        let mut out = String::new();
        for part in &self.parts {
            match part {
                Part::Text(t) => out.push_str(t),
                Part::Var(v) => match &row[v] {
                    Term::Iri(iri) if style => out.push_str(&style_tag(iri.local_name())),
                    Term::Iri(iri) => out.push_str(&prefixes.display(iri)),
                    Term::Literal(l) if style => out.push_str(&style_tag(l)),
                    Term::Literal(l) => out.push_str(l),
                },
            }
        }
        out
    }
}

fn style_tag(name: &str) -> String {
    name.to_lowercase()
        .chars()
        .map(|c| {
            if c == '_' || c.is_whitespace() {
                '-'
            } else {
                c
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitTemplate {
    pub kind: ElementKind,
    pub id: Template,
    pub label: Option<Template>,
    pub from: Option<Template>,
    pub to: Option<Template>,
    pub class: Option<Template>,
}

impl EmitTemplate {
    fn templates(&self) -> impl Iterator<Item = &Template> {
        [
            Some(&self.id),
            self.label.as_ref(),
            self.from.as_ref(),
            self.to.as_ref(),
            self.class.as_ref(),
        ]
        .into_iter()
        .flatten()
    }
}

/// Pattern term as written in the rule file, before prefix resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
enum RawTerm {
    Var(String),
    Type,
    Iri(String),
    Literal(String),
    Prefixed(String),
}

impl RawTerm {
    fn parse(s: &str) -> Option<Self> {
        if let Some(v) = s.strip_prefix('?') {
            let ok = !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            return ok.then(|| RawTerm::Var(v.to_owned()));
        }
        if s == "a" {
            return Some(RawTerm::Type);
        }
        if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
            return Some(RawTerm::Iri(inner.to_owned()));
        }
        if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
            return Some(RawTerm::Literal(s[1..s.len() - 1].to_owned()));
        }
        s.contains(':').then(|| RawTerm::Prefixed(s.to_owned()))
    }

    fn var(&self) -> Option<&str> {
        match self {
            RawTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RawConstraint {
    var: String,
    class: String,
    transitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub name: String,
    triples: Vec<[RawTerm; 3]>,
    types: Vec<RawConstraint>,
    pub emit: Vec<EmitTemplate>,
}

impl MappingRule {
    /// Resolves prefixed names against `prefixes`.
    pub fn pattern(&self, prefixes: &PrefixMap) -> Result<GraphPattern, TransformError> {
        let resolve = |name: &str, f: fn(&PrefixMap, &str) -> Result<Iri, IriError>| {
            f(prefixes, name).map_err(|source| TransformError::Unresolved {
                rule: self.name.clone(),
                name: name.to_owned(),
                source,
            })
        };
        let term = |raw: &RawTerm| -> Result<PatternTerm, TransformError> {
            Ok(match raw {
                RawTerm::Var(v) => PatternTerm::Var(v.clone()),
                RawTerm::Type => {
                    PatternTerm::Iri(Iri::new(format!("{RDF}type")).expect("static IRI"))
                }
                RawTerm::Iri(i) => PatternTerm::Iri(Iri::new(i.as_str()).map_err(|source| {
                    TransformError::Unresolved {
                        rule: self.name.clone(),
                        name: format!("<{i}>"),
                        source,
                    }
                })?),
                RawTerm::Literal(l) => PatternTerm::Literal(l.clone()),
                RawTerm::Prefixed(p) => PatternTerm::Iri(resolve(p, PrefixMap::expand)?),
            })
        };
        let triples = self
            .triples
            .iter()
            .map(|[s, p, o]| Ok(TriplePattern::new(term(s)?, term(p)?, term(o)?)))
            .collect::<Result<Vec<_>, TransformError>>()?;
        let types = self
            .types
            .iter()
            .map(|c| {
                Ok(TypeConstraint {
                    var: c.var.clone(),
                    class: resolve(&c.class, PrefixMap::resolve)?,
                    transitive: c.transitive,
                })
            })
            .collect::<Result<Vec<_>, TransformError>>()?;
        GraphPattern::new(triples, types).map_err(|source| TransformError::Pattern {
            rule: self.name.clone(),
            source,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleJson {
    name: String,
    #[serde(rename = "where")]
    pattern: WhereJson,
    emit: Vec<EmitJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WhereJson {
    triples: Vec<[String; 3]>,
    #[serde(default)]
    types: Vec<TypeJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeJson {
    var: String,
    class: String,
    #[serde(default)]
    transitive: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmitJson {
    kind: String,
    id: Option<String>,
    label: Option<String>,
    from: Option<String>,
    to: Option<String>,
    class: Option<String>,
}

fn build_rule(json: RuleJson) -> Result<MappingRule, TransformError> {
    let name = json.name;
    let bad_term = |term: &str| TransformError::BadTerm {
        rule: name.clone(),
        term: term.to_owned(),
    };
    let mut triples = Vec::with_capacity(json.pattern.triples.len());
    for [s, p, o] in &json.pattern.triples {
        let parse = |t: &String| RawTerm::parse(t).ok_or_else(|| bad_term(t));
        triples.push([parse(s)?, parse(p)?, parse(o)?]);
    }

    // Pattern invariants do not depend on prefixes, so check them now with
    // every name standing in as an arbitrary IRI.
    let stand_in = |t: &RawTerm| match t {
        RawTerm::Var(v) => PatternTerm::Var(v.clone()),
        RawTerm::Literal(l) => PatternTerm::Literal(l.clone()),
        _ => PatternTerm::Iri(Iri::new("urn:x").expect("static IRI")),
    };
    let types: Vec<RawConstraint> = json
        .pattern
        .types
        .into_iter()
        .map(|t| RawConstraint {
            var: t.var.trim_start_matches('?').to_owned(),
            class: t.class,
            transitive: t.transitive,
        })
        .collect();
    GraphPattern::new(
        triples
            .iter()
            .map(|[s, p, o]| TriplePattern::new(stand_in(s), stand_in(p), stand_in(o)))
            .collect(),
        types
            .iter()
            .map(|c| TypeConstraint {
                var: c.var.clone(),
                class: Iri::new("urn:x").expect("static IRI"),
                transitive: c.transitive,
            })
            .collect(),
    )
    .map_err(|source| TransformError::Pattern {
        rule: name.clone(),
        source,
    })?;

    let bound: BTreeSet<&str> = triples.iter().flatten().filter_map(RawTerm::var).collect();
    let mut emit = Vec::with_capacity(json.emit.len());
    for e in json.emit {
        let kind = ElementKind::parse(&e.kind).ok_or_else(|| TransformError::UnknownKind {
            rule: name.clone(),
            kind: e.kind.clone(),
        })?;
        let (required, allowed): (&[&str], &[&str]) = match kind {
            ElementKind::Node => (&["id", "class"], &["label"]),
            ElementKind::Edge => (&["id", "from", "to"], &["label"]),
            ElementKind::Tree => (&["id", "from", "to"], &[]),
            ElementKind::List => (&["id", "to"], &[]),
            ElementKind::Text => (&["id", "label"], &[]),
            ElementKind::Shape => (&["id", "class"], &[]),
        };
        let fields = [
            ("id", &e.id),
            ("label", &e.label),
            ("from", &e.from),
            ("to", &e.to),
            ("class", &e.class),
        ];
        for (field, value) in fields {
            if value.is_none() && required.contains(&field) {
                return Err(TransformError::MissingField {
                    rule: name.clone(),
                    kind,
                    field,
                });
            }
            if value.is_some() && !required.contains(&field) && !allowed.contains(&field) {
                return Err(TransformError::Json(serde::de::Error::custom(format!(
                    "rule {name}: {kind} element does not take `{field}`"
                ))));
            }
        }
        let t = |s: Option<String>| s.as_deref().map(Template::parse);
        let template = EmitTemplate {
            kind,
            id: Template::parse(e.id.as_deref().unwrap_or_default()),
            label: t(e.label),
            from: t(e.from),
            to: t(e.to),
            class: t(e.class),
        };
        if let Some(var) = template
            .templates()
            .flat_map(Template::variables)
            .find(|v| !bound.contains(v))
        {
            return Err(TransformError::UnboundVariable {
                rule: name.clone(),
                var: var.to_owned(),
            });
        }
        emit.push(template);
    }

    Ok(MappingRule {
        name,
        triples,
        types,
        emit,
    })
}

/// Parses a JSON rule file.
pub fn parse_ruleset(json: &str) -> Result<Vec<MappingRule>, TransformError> {
    let raw: Vec<RuleJson> = serde_json::from_str(json)?;
    raw.into_iter().map(build_rule).collect()
}

/// The bundled ruleset.
pub fn default_rules() -> Vec<MappingRule> {
    parse_ruleset(DEFAULT_RULES_FILE.contents).expect("bundled rules parse")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Element {
    Node(VisNode),
    Edge(VisEdge),
    Text(VisText),
    Shape(VisShape),
    Tree,
    List,
}

#[derive(Default)]
struct Builder {
    elements: BTreeMap<String, (Element, String)>,
    trees: BTreeMap<String, Vec<(String, String)>>,
    lists: BTreeMap<String, Vec<String>>,
}

impl Builder {
    fn claim(&mut self, id: String, element: Element, rule: &str) -> Result<(), TransformError> {
        match self.elements.get(&id) {
            Some((existing, first)) if *existing != element => Err(TransformError::Conflict {
                id,
                first: first.clone(),
                second: rule.to_owned(),
            }),
            Some(_) => Ok(()),
            None => {
                self.elements.insert(id, (element, rule.to_owned()));
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<VisualModel, TransformError> {
        let mut vm = VisualModel::default();
        for (_, (element, _)) in self.elements {
            match element {
                Element::Node(n) => vm.nodes.push(n),
                Element::Edge(e) => vm.edges.push(e),
                Element::Text(t) => vm.texts.push(t),
                Element::Shape(s) => vm.shapes.push(s),
                Element::Tree | Element::List => {}
            }
        }
        let node_ids: BTreeSet<&str> = vm.nodes.iter().map(|n| n.id.as_str()).collect();
        for e in &vm.edges {
            for end in [&e.from, &e.to] {
                if !node_ids.contains(end.as_str()) {
                    return Err(TransformError::DanglingEdge {
                        edge: e.id.clone(),
                        node: end.clone(),
                    });
                }
            }
        }
        for (id, pairs) in self.trees {
            let children: BTreeSet<&str> = pairs.iter().map(|(_, c)| c.as_str()).collect();
            let roots: BTreeSet<&str> = pairs
                .iter()
                .map(|(p, _)| p.as_str())
                .filter(|p| !children.contains(p))
                .collect();
            let [root] = roots.into_iter().collect::<Vec<_>>()[..] else {
                return Err(TransformError::Rootless { tree: id });
            };
            let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for (parent, child) in &pairs {
                map.entry(parent.clone()).or_default().push(child.clone());
            }
            vm.trees.push(VisTree {
                root: root.to_owned(),
                id,
                children: map,
            });
        }
        for (id, items) in self.lists {
            vm.lists.push(VisList { id, items });
        }
        vm.sort();
        let errors: Vec<VisDiagnostic> = validate_visual_model(&vm)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(vm)
        } else {
            Err(TransformError::InvalidModel(errors))
        }
    }
}

/// Applies `rules` to `graph` and assembles the resulting visual model.
///
/// Rules fire in order, each over every solution of its pattern. An element
/// id belongs to the first rule that emits it; emitting the same id again
/// with different content is an error. Edges must end at emitted nodes.
pub fn apply_rules(
    graph: &Ontology,
    closure: &SubsumptionClosure,
    rules: &[MappingRule],
) -> Result<VisualModel, TransformError> {
    let index = TripleIndex::new(graph, closure);
    let prefixes = &graph.prefixes;
    let mut builder = Builder::default();

    for rule in rules {
        let pattern = rule.pattern(prefixes)?;
        let solutions = index.matches(&pattern);
        for row in &solutions.rows {
            for emit in &rule.emit {
                let text = |t: &Template| t.render(row, prefixes, false);
                let field = |t: &Option<Template>| t.as_ref().map(text).unwrap_or_default();
                let id = text(&emit.id);
                match emit.kind {
                    ElementKind::Node => {
                        let payload = emit.id.single_var().and_then(|v| row[v].as_iri()).cloned();
                        let node = VisNode {
                            label: emit.label.as_ref().map_or_else(|| id.clone(), text),
                            style_class: emit
                                .class
                                .as_ref()
                                .map(|t| t.render(row, prefixes, true))
                                .unwrap_or_default(),
                            payload,
                            id: id.clone(),
                        };
                        builder.claim(id, Element::Node(node), &rule.name)?;
                    }
                    ElementKind::Edge => {
                        let edge = VisEdge {
                            id: id.clone(),
                            from: field(&emit.from),
                            to: field(&emit.to),
                            label: field(&emit.label),
                        };
                        builder.claim(id, Element::Edge(edge), &rule.name)?;
                    }
                    ElementKind::Text => {
                        let t = VisText {
                            id: id.clone(),
                            content: field(&emit.label),
                        };
                        builder.claim(id, Element::Text(t), &rule.name)?;
                    }
                    ElementKind::Shape => {
                        let value = emit
                            .class
                            .as_ref()
                            .map(|t| t.render(row, prefixes, true))
                            .unwrap_or_default();
                        let shape: ShapeKind =
                            value.parse().map_err(|_| TransformError::BadShape {
                                rule: rule.name.clone(),
                                value: value.clone(),
                            })?;
                        let s = VisShape {
                            id: id.clone(),
                            shape,
                        };
                        builder.claim(id, Element::Shape(s), &rule.name)?;
                    }
                    ElementKind::Tree => {
                        builder.claim(id.clone(), Element::Tree, &rule.name)?;
                        let pair = (field(&emit.from), field(&emit.to));
                        let pairs = builder.trees.entry(id).or_default();
                        if !pairs.contains(&pair) {
                            pairs.push(pair);
                        }
                    }
                    ElementKind::List => {
                        builder.claim(id.clone(), Element::List, &rule.name)?;
                        let item = field(&emit.to);
                        let items = builder.lists.entry(id).or_default();
                        if !items.contains(&item) {
                            items.push(item);
                        }
                    }
                }
            }
        }
    }
    builder.finish()
}
