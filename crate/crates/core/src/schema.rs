//! The SKOO ontology, the DOLCE, WordNet and OMDoc fragments it is aligned
//! with, the correspondence axioms, and bundled instance fixtures.
//!
//! All of it is data: the Turtle files under `schema/` are compiled into the
//! crate and parsed once on first use.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::iri::{Iri, PrefixMap};
use crate::model::{Assertion, Axiom, AxiomKind, ModelError, Ontology};
use crate::reasoner::check_consistency;
use crate::turtle::{parse_turtle, ParseError, Severity};

pub const SKOO_NS: &str = "http://purl.org/net/skoo#";
pub const DOLCE_NS: &str = "http://www.loa-cnr.it/ontologies/DOLCE-Lite.owl#";
pub const WORDNET_NS: &str = "http://wordnet-rdf.princeton.edu/wn31/";
pub const OMDOC_NS: &str = "http://omdoc.org/ontology#";

/// The four SKOO root classes, pairwise disjoint.
pub const TOP_CLASSES: [&str; 4] = [
    "Sci_Knowledge_Item",
    "Sci_Information_Object",
    "Sci_Activity",
    "Domain_Object",
];

/// A file shipped under `schema/`, path relative to that directory.
#[derive(Debug, Clone, Copy)]
pub struct SchemaFile {
    pub path: &'static str,
    pub contents: &'static str,
}

macro_rules! schema_file {
    ($path:literal) => {
        SchemaFile {
            path: $path,
            contents: include_str!(concat!("../schema/", $path)),
        }
    };
}

pub const SKOO_FILE: SchemaFile = schema_file!("skoo.ttl");
pub const DOLCE_FILE: SchemaFile = schema_file!("dolce-frag.ttl");
pub const WORDNET_FILE: SchemaFile = schema_file!("wordnet-frag.ttl");
pub const OMDOC_FILE: SchemaFile = schema_file!("omdoc-frag.ttl");
pub const ALIGNMENT_FILE: SchemaFile = schema_file!("alignment.ttl");
pub const WILLE_CH3_FILE: SchemaFile = schema_file!("fixtures/wille-ch3.ttl");
pub const DEFAULT_RULES_FILE: SchemaFile = schema_file!("rules/default.json");

pub const SCHEMA_FILES: [SchemaFile; 7] = [
    SKOO_FILE,
    DOLCE_FILE,
    WORDNET_FILE,
    OMDOC_FILE,
    ALIGNMENT_FILE,
    WILLE_CH3_FILE,
    DEFAULT_RULES_FILE,
];

/// Looks up an embedded schema file by its relative path.
pub fn schema_file(path: &str) -> Option<&'static SchemaFile> {
    let path = path.trim_start_matches("./");
    SCHEMA_FILES.iter().find(|f| f.path == path)
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("unknown fragment {0:?} (expected dolce, wordnet or omdoc)")]
    UnknownFragment(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} is not declared as a class in the domain ontology")]
    UndeclaredTopClass(Iri),
    #[error("{path}: cannot read schema file: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}: differs from the embedded schema")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Dolce,
    Wordnet,
    Omdoc,
}

impl Fragment {
    pub const ALL: [Fragment; 3] = [Fragment::Dolce, Fragment::Wordnet, Fragment::Omdoc];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::Dolce => "dolce",
            Fragment::Wordnet => "wordnet",
            Fragment::Omdoc => "omdoc",
        }
    }

    pub fn namespace(self) -> &'static str {
        match self {
            Fragment::Dolce => DOLCE_NS,
            Fragment::Wordnet => WORDNET_NS,
            Fragment::Omdoc => OMDOC_NS,
        }
    }

    fn file(self) -> SchemaFile {
        match self {
            Fragment::Dolce => DOLCE_FILE,
            Fragment::Wordnet => WORDNET_FILE,
            Fragment::Omdoc => OMDOC_FILE,
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fragment {
    type Err = SchemaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fragment::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| SchemaError::UnknownFragment(s.to_owned()))
    }
}

/// Everything under `schema/`, parsed.
#[derive(Debug, Clone)]
pub struct SchemaBundle {
    pub skoo: Ontology,
    pub fragments: BTreeMap<Fragment, Ontology>,
    /// The correspondence axioms, as a set.
    pub alignment: BTreeSet<Axiom>,
    /// The correspondence axioms with their file's prefixes.
    pub alignment_ontology: Ontology,
    pub fixtures: BTreeMap<String, Ontology>,
}

fn parse_file(file: &SchemaFile) -> Result<Ontology, SchemaError> {
    parse_turtle(file.contents).map_err(|source| SchemaError::Parse {
        path: file.path.to_owned(),
        source,
    })
}

impl SchemaBundle {
    /// Parses the embedded schema files.
    pub fn load() -> Result<Self, SchemaError> {
        let skoo = parse_file(&SKOO_FILE)?;
        let fragments = Fragment::ALL
            .into_iter()
            .map(|f| Ok((f, parse_file(&f.file())?)))
            .collect::<Result<_, SchemaError>>()?;
        let alignment_ontology = parse_file(&ALIGNMENT_FILE)?;
        let fixtures = BTreeMap::from([("wille-ch3".to_owned(), parse_file(&WILLE_CH3_FILE)?)]);
        Ok(SchemaBundle {
            skoo,
            fragments,
            alignment: alignment_ontology.tbox.clone(),
            alignment_ontology,
            fixtures,
        })
    }

    /// The embedded bundle, parsed once per process.
    pub fn embedded() -> &'static SchemaBundle {
        static BUNDLE: OnceLock<SchemaBundle> = OnceLock::new();
        BUNDLE.get_or_init(|| SchemaBundle::load().expect("embedded schema parses"))
    }

    pub fn fragment(&self, fragment: Fragment) -> &Ontology {
        &self.fragments[&fragment]
    }

    /// SKOO merged with the chosen fragments and, optionally, the alignment axioms.
    pub fn merged(
        &self,
        fragments: &BTreeSet<Fragment>,
        include_alignment: bool,
    ) -> Result<Ontology, SchemaError> {
        let mut parts = vec![&self.skoo];
        parts.extend(fragments.iter().map(|f| self.fragment(*f)));
        if include_alignment {
            parts.push(&self.alignment_ontology);
        }
        Ok(Ontology::merge_all(parts)?)
    }

    /// SKOO, all three fragments and the alignment axioms.
    pub fn merged_all(&self) -> Result<Ontology, SchemaError> {
        self.merged(&Fragment::ALL.into_iter().collect(), true)
    }
}

/// Checks that every schema file under `dir` is byte-identical to its embedded copy.
pub fn verify_schema_dir(dir: &Path) -> Result<(), SchemaError> {
    for file in SCHEMA_FILES {
        let path = dir.join(file.path);
        let on_disk = std::fs::read(&path).map_err(|source| SchemaError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if on_disk != file.contents.as_bytes() {
            return Err(SchemaError::Mismatch(path.display().to_string()));
        }
    }
    Ok(())
}

/// The SKOO TBox.
pub fn skoo_ontology() -> Ontology {
    SchemaBundle::embedded().skoo.clone()
}

/// The correspondence axioms between SKOO and the three fragments.
pub fn alignment_axioms() -> BTreeSet<Axiom> {
    SchemaBundle::embedded().alignment.clone()
}

/// One of `dolce`, `wordnet`, `omdoc`.
pub fn external_fragment(name: &str) -> Result<Ontology, SchemaError> {
    let fragment: Fragment = name.parse()?;
    Ok(SchemaBundle::embedded().fragment(fragment).clone())
}

/// Merges a domain ontology into SKOO, anchoring each listed top class under
/// `skoo:Domain_Object`.
pub fn import_domain_ontology(
    bundle: &SchemaBundle,
    domain: &Ontology,
    top_classes: &BTreeSet<Iri>,
) -> Result<Ontology, SchemaError> {
    if let Some(c) = top_classes
        .iter()
        .find(|c| !domain.declared_classes.contains(*c))
    {
        return Err(SchemaError::UndeclaredTopClass(c.clone()));
    }
    let mut merged = bundle.skoo.merge(domain)?;
    let anchor = skoo_iri("Domain_Object");
    for c in top_classes {
        merged.insert_axiom(Axiom::sub_class_of(c.clone(), anchor.clone()))?;
    }
    Ok(merged)
}

/// `skoo:<local>` as an absolute IRI.
pub fn skoo_iri(local: &str) -> Iri {
    Iri::new(format!("{SKOO_NS}{local}")).expect("valid local name")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ValidationItem {
    pub severity: Severity,
    pub subject: Iri,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
    pub errors: usize,
    pub warnings: usize,
}

impl ValidationReport {
    fn push(&mut self, severity: Severity, subject: &Iri, message: String) {
        self.items.push(ValidationItem {
            severity,
            subject: subject.clone(),
            message,
        });
    }

    fn finish(mut self) -> Self {
        self.items.sort();
        self.items.dedup();
        self.errors = self
            .items
            .iter()
            .filter(|i| i.severity == Severity::Error)
            .count();
        self.warnings = self.items.len() - self.errors;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.errors == 0
    }

    /// Pretty JSON: `schema_version`, `errors`, `warnings`, `items`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            errors: usize,
            warnings: usize,
            items: &'a [ValidationItem],
        }
        serde_json::to_string_pretty(&Doc {
            schema_version: crate::reasoner::REPORT_SCHEMA_VERSION,
            errors: self.errors,
            warnings: self.warnings,
            items: &self.items,
        })
        .expect("report serializes")
    }
}

/// Checks an instance graph against SKOO, the fragments and the alignment.
///
/// Errors: an individual typed by something that is not a known class, and
/// individuals whose inferred types (including those forced by relation
/// domains and ranges) fall under a disjoint pair. Warnings: individuals with
/// no asserted type, and undeclared predicates without domain or range.
pub fn validate_instance_graph(graph: &Ontology, bundle: &SchemaBundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    if graph.is_empty() {
        return report;
    }
    // Prefix labels play no part in validation; dropping them rules out binding clashes.
    let local = Ontology {
        prefixes: PrefixMap::new(),
        ..graph.clone()
    };
    let mut schema = bundle.merged_all().expect("embedded schema merges");
    schema.prefixes = PrefixMap::new();
    let context = schema.merge(&local).expect("no prefixes to clash");

    let thing = Iri::new(format!("{}Thing", crate::iri::OWL)).expect("static IRI");
    let mut known: BTreeSet<&Iri> = context.declared_classes.iter().collect();
    known.insert(&thing);
    let mut constrained: BTreeSet<&Iri> = BTreeSet::new();
    for ax in &context.tbox {
        if ax.kind().is_property_axiom() {
            constrained.insert(ax.subject());
        } else {
            known.insert(ax.subject());
        }
        known.insert(ax.object());
    }

    let mut typed = BTreeSet::new();
    for a in &graph.abox {
        match a {
            Assertion::TypeOf { individual, class } => {
                typed.insert(individual);
                if !known.contains(class) {
                    report.push(
                        Severity::Error,
                        individual,
                        format!("typed by {class}, which is not a known class"),
                    );
                }
            }
            Assertion::Relation { predicate, .. } => {
                if !context.declared_properties.contains(predicate)
                    && !constrained.contains(predicate)
                {
                    report.push(
                        Severity::Warning,
                        predicate,
                        "undeclared predicate without domain or range".to_owned(),
                    );
                }
            }
        }
    }
    for ind in graph.individuals() {
        if !typed.contains(&ind) {
            report.push(
                Severity::Warning,
                &ind,
                "individual has no asserted type".to_owned(),
            );
        }
    }

    let consistency = check_consistency(&context);
    for class in &consistency.unsatisfiable_classes {
        report.push(Severity::Error, class, "class is unsatisfiable".to_owned());
    }
    for w in consistency.witnesses.iter().filter(|w| w.individual) {
        let (a, b) = (w.disjoint.subject(), w.disjoint.object());
        let reason = [&w.left, &w.right]
            .into_iter()
            .filter_map(|p| match (&p.grounds, p.steps.first()) {
                (Some(Assertion::Relation { predicate, .. }), Some(ax))
                    if matches!(ax.kind(), AxiomKind::Domain | AxiomKind::Range) =>
                {
                    Some(format!(
                        "{} of {predicate} requires {}",
                        if ax.kind() == AxiomKind::Domain {
                            "domain"
                        } else {
                            "range"
                        },
                        ax.object()
                    ))
                }
                _ => None,
            })
            .collect::<Vec<_>>();
        let mut message = format!("inferred to be both {a} and {b}, which are disjoint");
        if !reason.is_empty() {
            message.push_str(&format!(" ({})", reason.join("; ")));
        }
        report.push(Severity::Error, &w.subject, message);
    }
    report.finish()
}
