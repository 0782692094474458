//! Absolute IRIs and prefix maps.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// Prefixes every [`PrefixMap`] resolves even when they were never bound.
///
/// An explicit binding for one of these labels takes precedence.
pub const WELL_KNOWN_PREFIXES: [(&str, &str); 4] =
    [("owl", OWL), ("rdf", RDF), ("rdfs", RDFS), ("xsd", XSD)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("not an absolute IRI: {0:?}")]
    NotAbsolute(String),
    #[error("IRI contains a forbidden character: {0:?}")]
    ForbiddenCharacter(String),
    #[error("unregistered prefix {prefix:?} in {name:?}")]
    UnknownPrefix { prefix: String, name: String },
    #[error("not a prefixed name: {0:?}")]
    NotPrefixed(String),
    #[error("prefix {label:?} already bound to <{existing}>, cannot rebind to <{requested}>")]
    ConflictingBinding {
        label: String,
        existing: String,
        requested: String,
    },
}

/// An absolute IRI. Equality is byte equality of the expanded form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, IriError> {
        let value = value.into();
        if value.chars().any(is_forbidden) {
            return Err(IriError::ForbiddenCharacter(value));
        }
        if !has_scheme(&value) {
            return Err(IriError::NotAbsolute(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#` or `/`, or the whole IRI if neither occurs.
    pub fn local_name(&self) -> &str {
        match self.0.rfind(['#', '/']) {
            Some(i) if i + 1 < self.0.len() => &self.0[i + 1..],
            _ => &self.0,
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = IriError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

fn is_forbidden(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

fn has_scheme(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Whether `local` can be written after `prefix:` and read back unchanged.
pub(crate) fn is_valid_local_name(local: &str) -> bool {
    if local.is_empty() {
        return true;
    }
    let first = local.chars().next().unwrap();
    let last = local.chars().last().unwrap();
    (first.is_alphanumeric() || first == '_')
        && last != '.'
        && local
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub(crate) fn is_valid_prefix_label(label: &str) -> bool {
    if label.is_empty() {
        return true;
    }
    let first = label.chars().next().unwrap();
    first.is_alphabetic()
        && !label.ends_with('.')
        && label
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Prefix label (possibly empty) to namespace bindings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixMap {
    bindings: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `label` to `namespace`. Binding the same pair twice is a no-op;
    /// binding an already bound label to a different namespace is an error.
    pub fn bind(&mut self, label: &str, namespace: &str) -> Result<(), IriError> {
        match self.bindings.get(label) {
            Some(existing) if existing == namespace => Ok(()),
            Some(existing) => Err(IriError::ConflictingBinding {
                label: label.to_owned(),
                existing: existing.clone(),
                requested: namespace.to_owned(),
            }),
            None => {
                self.bindings.insert(label.to_owned(), namespace.to_owned());
                Ok(())
            }
        }
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.bindings.get(label).map(String::as_str)
    }

    /// Explicit bindings, sorted by label.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    fn resolve_label(&self, label: &str) -> Option<&str> {
        self.get(label).or_else(|| {
            WELL_KNOWN_PREFIXES
                .iter()
                .find(|(l, _)| *l == label)
                .map(|(_, ns)| *ns)
        })
    }

    /// Expands `prefix:local` to an absolute IRI.
    pub fn expand(&self, name: &str) -> Result<Iri, IriError> {
        let (prefix, local) = name
            .split_once(':')
            .ok_or_else(|| IriError::NotPrefixed(name.to_owned()))?;
        let ns = self
            .resolve_label(prefix)
            .ok_or_else(|| IriError::UnknownPrefix {
                prefix: prefix.to_owned(),
                name: name.to_owned(),
            })?;
        Iri::new(format!("{ns}{local}"))
    }

    /// Accepts either `<absolute>` or a prefixed name.
    pub fn resolve(&self, term: &str) -> Result<Iri, IriError> {
        match term.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            Some(inner) => Iri::new(inner),
            None => self.expand(term),
        }
    }

    /// Shortest prefixed form of `iri` that expands back to it, if any.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        let explicit = self.iter();
        let implicit = WELL_KNOWN_PREFIXES
            .iter()
            .filter(|(l, _)| !self.bindings.contains_key(*l))
            .map(|(l, ns)| (*l, *ns));
        explicit
            .chain(implicit)
            .filter_map(|(label, ns)| {
                let local = iri.as_str().strip_prefix(ns)?;
                is_valid_local_name(local).then(|| format!("{label}:{local}"))
            })
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }

    /// Prefixed form when available, `<iri>` otherwise.
    pub fn display(&self, iri: &Iri) -> String {
        self.compact(iri).unwrap_or_else(|| format!("<{iri}>"))
    }

    /// Union of two maps; fails on a label bound to two namespaces.
    pub fn merged(&self, other: &PrefixMap) -> Result<PrefixMap, IriError> {
        let mut out = self.clone();
        for (label, ns) in other.iter() {
            out.bind(label, ns)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absolute_iris_require_a_scheme() {
        assert!(Iri::new("http://purl.org/net/skoo#Theorem").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(matches!(Iri::new("Theorem"), Err(IriError::NotAbsolute(_))));
        assert!(matches!(Iri::new("1http:x"), Err(IriError::NotAbsolute(_))));
        assert!(matches!(
            Iri::new("http://a b"),
            Err(IriError::ForbiddenCharacter(_))
        ));
    }

    #[test]
    fn expansion_of_unregistered_prefix_fails() {
        let map = PrefixMap::new();
        assert!(matches!(
            map.expand("skoo:Theorem"),
            Err(IriError::UnknownPrefix { .. })
        ));
        assert_eq!(
            map.expand("rdfs:subClassOf").unwrap().as_str(),
            "http://www.w3.org/2000/01/rdf-schema#subClassOf"
        );
    }

    #[test]
    fn rebinding_to_a_different_namespace_fails() {
        let mut map = PrefixMap::new();
        map.bind("skoo", "http://purl.org/net/skoo#").unwrap();
        map.bind("skoo", "http://purl.org/net/skoo#").unwrap();
        assert!(map.bind("skoo", "http://example.org/").is_err());
        assert_eq!(map.len(), 1);
    }

    #[test]
    fn compact_round_trips() {
        let mut map = PrefixMap::new();
        map.bind("skoo", "http://purl.org/net/skoo#").unwrap();
        map.bind("", "http://example.org/").unwrap();
        let iri = map.expand("skoo:Sci_Knowledge_Item").unwrap();
        assert_eq!(map.compact(&iri).unwrap(), "skoo:Sci_Knowledge_Item");
        let odd = Iri::new("http://purl.org/net/skoo#has space?").ok();
        assert!(odd.is_none());
        let tricky = Iri::new("http://purl.org/net/skoo#a/b").unwrap();
        assert_eq!(map.compact(&tricky), None);
        assert_eq!(map.display(&tricky), "<http://purl.org/net/skoo#a/b>");
        let empty = map.expand(":x").unwrap();
        assert_eq!(map.compact(&empty).unwrap(), ":x");
    }

    #[test]
    fn local_name() {
        let iri = Iri::new("http://purl.org/net/skoo#Domain_Object").unwrap();
        assert_eq!(iri.local_name(), "Domain_Object");
        let iri = Iri::new("http://wordnet-rdf.princeton.edu/wn31/theorem").unwrap();
        assert_eq!(iri.local_name(), "theorem");
    }
}
