//! Scientific Knowledge Objects Ontology (SKOO) toolkit.
//!
//! - [`model`]: ontologies as sets of axioms and assertions.
//! - [`turtle`]: reading and writing a Turtle subset.
//! - [`reasoner`]: subsumption closure and consistency checking with witnesses.
//! - [`schema`]: the SKOO vocabulary, external fragments, alignment axioms and
//!   instance validation.
//! - [`transform`]: graph patterns and mapping rules that build visual models.
//! - [`visual`]: the visual model, its validation and DOT/JSON export.
//!
//! ```
//! use skoo::reasoner::subsumption_closure;
//! use skoo::schema::SchemaBundle;
//! use skoo::transform::{apply_rules, default_rules};
//! use skoo::visual::to_dot;
//!
//! let bundle = SchemaBundle::embedded();
//! let graph = bundle.merged_all()?.merge(&bundle.fixtures["wille-ch3"])?;
//! let model = apply_rules(&graph, &subsumption_closure(&graph), &default_rules())?;
//! assert!(to_dot(&model)?.starts_with("digraph skoo {"));
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod iri;
pub mod model;
pub mod reasoner;
pub mod schema;
pub mod transform;
pub mod turtle;
pub mod visual;

pub use iri::{Iri, PrefixMap};
pub use model::{Assertion, Axiom, AxiomKind, Ontology, Term};

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ontologies.md")]
    mod ontologies {}
    #[doc = include_str!("../../../book/src/reasoning.md")]
    mod reasoning {}
    #[doc = include_str!("../../../book/src/schema.md")]
    mod schema {}
    #[doc = include_str!("../../../book/src/rules.md")]
    mod rules {}
}
