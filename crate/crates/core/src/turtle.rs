//! Reading and writing the Turtle subset used for schemas, fixtures and user graphs.
//!
//! Supported: `@prefix`/`PREFIX` directives, prefixed names, `<absolute>` IRIs,
//! the `a` keyword, object lists (`,`), predicate-object lists (`;`) and
//! single- or double-quoted string literals. Blank nodes, collections, numeric
//! or boolean literals, datatypes, language tags and `@base` are rejected.
//!
//! Statements map onto the model as follows:
//!
//! | predicate             | becomes                                  |
//! |-----------------------|------------------------------------------|
//! | `rdfs:subClassOf`     | [`AxiomKind::SubClassOf`]                |
//! | `owl:equivalentClass` | [`AxiomKind::EquivalentClass`]           |
//! | `owl:disjointWith`    | [`AxiomKind::DisjointWith`]              |
//! | `rdfs:domain`         | [`AxiomKind::Domain`]                    |
//! | `rdfs:range`          | [`AxiomKind::Range`]                     |
//! | `a` / `rdf:type`      | a declaration for `owl:Class` and property types, otherwise [`Assertion::TypeOf`] |
//! | anything else         | [`Assertion::Relation`]                  |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::iri::{self, Iri, PrefixMap, OWL, RDF, RDFS};
use crate::model::{Assertion, Axiom, AxiomKind, Ontology, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A located parser message. Lines and columns are 1-based; columns count characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}: {}",
            self.line, self.column, self.severity, self.message
        )
    }
}

/// Returned by [`parse_turtle`] when at least one error was found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", summarize(.diagnostics))]
pub struct ParseError {
    pub diagnostics: Vec<ParseDiagnostic>,
}

fn summarize(diags: &[ParseDiagnostic]) -> String {
    let errors: Vec<_> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    match errors.as_slice() {
        [] => "no errors".to_owned(),
        [one] => one.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more errors)", rest.len()),
    }
}

/// Parses `text`, failing if any error diagnostic is produced.
pub fn parse_turtle(text: &str) -> Result<Ontology, ParseError> {
    let (ontology, diagnostics) = parse_turtle_lenient(text);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        Err(ParseError { diagnostics })
    } else {
        Ok(ontology)
    }
}

/// Parses `text`, skipping statements that contain errors.
///
/// Every statement terminated before the first error is kept, and parsing
/// resumes after the next `.`.
pub fn parse_turtle_lenient(text: &str) -> (Ontology, Vec<ParseDiagnostic>) {
    let mut parser = Parser::new(text);
    parser.run();
    parser.finish()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixDirective { sparql: bool },
    IriRef(String),
    PName(String),
    A,
    Literal(String),
    Dot,
    Comma,
    Semi,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

type LexResult = Result<Option<Token>, (usize, String)>;

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Skips to just after the next statement-terminating `.`.
    fn recover(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                '"' | '\'' => {
                    let start = self.pos;
                    if self.string(c).is_err() {
                        self.pos = start;
                        self.bump();
                    }
                }
                '<' => {
                    let start = self.pos;
                    if self.iri_ref().is_err() {
                        self.pos = start;
                        self.bump();
                    }
                }
                '#' => self.skip_trivia(),
                '.' => {
                    self.bump();
                    if self.peek().is_none_or(|n| n.is_whitespace() || n == '#') {
                        return;
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn next_token(&mut self) -> LexResult {
        self.skip_trivia();
        let offset = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            '.' => {
                self.bump();
                Tok::Dot
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            ';' => {
                self.bump();
                Tok::Semi
            }
            '<' => Tok::IriRef(self.iri_ref()?),
            '"' | '\'' => {
                let lit = self.string(c)?;
                match self.peek() {
                    Some('@') => return Err((self.pos, "language tags are not supported".into())),
                    Some('^') => return Err((self.pos, "typed literals are not supported".into())),
                    _ => Tok::Literal(lit),
                }
            }
            '@' => {
                self.bump();
                let word = self.word();
                match word.as_str() {
                    "prefix" => Tok::PrefixDirective { sparql: false },
                    "base" => return Err((offset, "@base is not supported".into())),
                    _ => return Err((offset, format!("unknown directive @{word}"))),
                }
            }
            '[' | ']' => return Err((offset, "blank nodes are not supported".into())),
            '(' | ')' => return Err((offset, "collections are not supported".into())),
            '_' if self.peek_at(1) == Some(':') => {
                return Err((offset, "blank nodes are not supported".into()))
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => {
                return Err((offset, "numeric literals are not supported".into()))
            }
            c if c.is_alphabetic() || c == ':' || c == '_' => self.name(offset)?,
            c => return Err((offset, format!("unexpected character {c:?}"))),
        };
        Ok(Some(Token { tok, offset }))
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric()) {
            self.bump();
        }
        self.text[start..self.pos].to_owned()
    }

    fn name(&mut self, offset: usize) -> Result<Tok, (usize, String)> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.bump();
        }
        // A trailing '.' terminates the statement rather than the name.
        while self.text[start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        let label = &self.text[start..self.pos];
        if self.peek() != Some(':') {
            return match label {
                "a" => Ok(Tok::A),
                w if w.eq_ignore_ascii_case("prefix") => Ok(Tok::PrefixDirective { sparql: true }),
                w if w.eq_ignore_ascii_case("base") => {
                    Err((offset, "BASE is not supported".into()))
                }
                "true" | "false" => Err((offset, "boolean literals are not supported".into())),
                w => Err((offset, format!("unexpected word {w:?}"))),
            };
        }
        if !iri::is_valid_prefix_label(label) {
            return Err((offset, format!("invalid prefix label {label:?}")));
        }
        self.bump();
        let local_start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            self.bump();
        }
        while self.text[local_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        let local = &self.text[local_start..self.pos];
        if !iri::is_valid_local_name(local) {
            return Err((offset, format!("invalid local name {local:?}")));
        }
        Ok(Tok::PName(self.text[start..self.pos].to_owned()))
    }

    fn iri_ref(&mut self) -> Result<String, (usize, String)> {
        let offset = self.pos;
        self.bump();
        let start = self.pos;
        loop {
            match self.peek() {
                Some('>') => {
                    let inner = self.text[start..self.pos].to_owned();
                    self.bump();
                    return Ok(inner);
                }
                Some(c) if c == '\n' || c == '<' => {
                    return Err((offset, "unterminated IRI".into()));
                }
                Some(_) => {
                    self.bump();
                }
                None => return Err((offset, "unterminated IRI".into())),
            }
        }
    }

    fn string(&mut self, quote: char) -> Result<String, (usize, String)> {
        let offset = self.pos;
        self.bump();
        if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
            return Err((offset, "long string literals are not supported".into()));
        }
        let mut out = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None | Some('\n') | Some('\r') => {
                    return Err((offset, "unterminated string literal".into()))
                }
                Some(c) if c == quote => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('r') => out.push('\r'),
                    Some('b') => out.push('\u{8}'),
                    Some('f') => out.push('\u{c}'),
                    Some('"') => out.push('"'),
                    Some('\'') => out.push('\''),
                    Some('\\') => out.push('\\'),
                    Some(u @ ('u' | 'U')) => {
                        let n = if u == 'u' { 4 } else { 8 };
                        let hex: String = (0..n).filter_map(|_| self.bump()).collect();
                        let c = u32::from_str_radix(&hex, 16)
                            .ok()
                            .filter(|_| hex.len() == n)
                            .and_then(char::from_u32)
                            .ok_or((at, format!("invalid escape \\{u}{hex}")))?;
                        out.push(c);
                    }
                    other => return Err((at, format!("invalid escape {other:?}"))),
                },
                Some(c) => out.push(c),
            }
        }
    }
}

enum Object {
    Iri(Iri),
    Literal(String),
}

struct Triple {
    subject: Iri,
    predicate: Iri,
    object: Object,
    offset: usize,
}

struct Parser<'a> {
    text: &'a str,
    lexer: Lexer<'a>,
    lookahead: Option<Token>,
    prefixes: PrefixMap,
    triples: Vec<Triple>,
    diagnostics: Vec<ParseDiagnostic>,
}

type PResult<T> = Result<T, (usize, String)>;

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            lexer: Lexer { text, pos: 0 },
            lookahead: None,
            prefixes: PrefixMap::new(),
            triples: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn peek(&mut self) -> PResult<Option<&Token>> {
        if self.lookahead.is_none() {
            self.lookahead = self.lexer.next_token()?;
        }
        Ok(self.lookahead.as_ref())
    }

    fn next(&mut self) -> PResult<Token> {
        self.peek()?;
        self.lookahead
            .take()
            .ok_or_else(|| (self.eof_offset(), "unexpected end of input".to_owned()))
    }

    fn eof_offset(&self) -> usize {
        self.text
            .char_indices()
            .rev()
            .find(|(_, c)| !c.is_whitespace())
            .map_or(0, |(i, _)| i)
    }

    fn run(&mut self) {
        loop {
            match self.peek() {
                Ok(None) => return,
                Ok(Some(_)) => {}
                Err(e) => {
                    self.error(e);
                    self.lookahead = None;
                    self.lexer.recover();
                    continue;
                }
            }
            let mut pending = Vec::new();
            match self.statement(&mut pending) {
                Ok(()) => self.triples.extend(pending),
                Err(e) => {
                    self.error(e);
                    let at_dot = matches!(self.lookahead, Some(Token { tok: Tok::Dot, .. }));
                    self.lookahead = None;
                    if !at_dot {
                        self.lexer.recover();
                    }
                }
            }
        }
    }

    fn error(&mut self, (offset, message): (usize, String)) {
        self.diag(Severity::Error, offset, message);
    }

    fn diag(&mut self, severity: Severity, offset: usize, message: String) {
        let (line, column) = line_col(self.text, offset);
        self.diagnostics.push(ParseDiagnostic {
            severity,
            line,
            column,
            message,
        });
    }

    fn statement(&mut self, pending: &mut Vec<Triple>) -> PResult<()> {
        let first = self.next()?;
        match first.tok {
            Tok::PrefixDirective { sparql } => self.prefix_directive(sparql),
            _ => {
                let subject = self.iri_term(&first, "subject")?;
                self.predicate_object_list(&subject, pending)?;
                self.expect_dot()
            }
        }
    }

    fn prefix_directive(&mut self, sparql: bool) -> PResult<()> {
        let name = self.next()?;
        let Tok::PName(ref pname) = name.tok else {
            return Err((name.offset, "expected a prefix label like `ex:`".into()));
        };
        let Some(label) = pname.strip_suffix(':').filter(|l| !l.contains(':')) else {
            return Err((
                name.offset,
                format!("expected a prefix label, found {pname:?}"),
            ));
        };
        let label = label.to_owned();
        let iri = self.next()?;
        let Tok::IriRef(ref ns) = iri.tok else {
            return Err((iri.offset, "expected <namespace IRI>".into()));
        };
        Iri::new(ns.as_str()).map_err(|e| (iri.offset, e.to_string()))?;
        self.prefixes
            .bind(&label, ns)
            .map_err(|e| (name.offset, e.to_string()))?;
        if !sparql {
            self.expect_dot()?;
        }
        Ok(())
    }

    fn expect_dot(&mut self) -> PResult<()> {
        let t = self.next()?;
        if t.tok == Tok::Dot {
            Ok(())
        } else {
            let offset = t.offset;
            self.lookahead = Some(t);
            Err((offset, "expected `.`".into()))
        }
    }

    fn predicate_object_list(&mut self, subject: &Iri, pending: &mut Vec<Triple>) -> PResult<()> {
        loop {
            let verb = self.next()?;
            let predicate = match verb.tok {
                Tok::A => Iri::new(format!("{RDF}type")).expect("static IRI"),
                _ => self.iri_term(&verb, "predicate")?,
            };
            loop {
                let obj = self.next()?;
                let object = match obj.tok {
                    Tok::Literal(ref s) => Object::Literal(s.clone()),
                    _ => Object::Iri(self.iri_term(&obj, "object")?),
                };
                pending.push(Triple {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                    offset: obj.offset,
                });
                match self.peek()? {
                    Some(Token {
                        tok: Tok::Comma, ..
                    }) => {
                        self.next()?;
                    }
                    _ => break,
                }
            }
            match self.peek()? {
                Some(Token { tok: Tok::Semi, .. }) => {
                    while let Some(Token { tok: Tok::Semi, .. }) = self.peek()? {
                        self.next()?;
                    }
                    if let Some(Token { tok: Tok::Dot, .. }) = self.peek()? {
                        return Ok(());
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn iri_term(&self, token: &Token, role: &str) -> PResult<Iri> {
        match &token.tok {
            Tok::IriRef(s) => Iri::new(s.as_str()).map_err(|e| (token.offset, e.to_string())),
            Tok::PName(s) => self
                .prefixes
                .expand(s)
                .map_err(|e| (token.offset, e.to_string())),
            Tok::Literal(_) => Err((token.offset, format!("a literal cannot be a {role}"))),
            other => Err((
                token.offset,
                format!("expected {role}, found {}", describe(other)),
            )),
        }
    }

    fn finish(mut self) -> (Ontology, Vec<ParseDiagnostic>) {
        let vocab = Vocabulary::new();
        let mut ontology = Ontology::with_prefixes(std::mem::take(&mut self.prefixes));
        let triples = std::mem::take(&mut self.triples);
        // Declarations first, so property-axiom checks see every declared class.
        let mut rest = Vec::new();
        for t in triples {
            match (&t.object, vocab.declaration(&t.predicate, &t.object)) {
                (_, Some(Declared::Class)) => {
                    if !ontology.declare_class(t.subject.clone()) {
                        self.diag(Severity::Warning, t.offset, "repeated declaration".into());
                    }
                }
                (_, Some(Declared::Property)) => {
                    if !ontology.declare_property(t.subject.clone()) {
                        self.diag(Severity::Warning, t.offset, "repeated declaration".into());
                    }
                }
                _ => rest.push(t),
            }
        }
        for t in rest {
            let offset = t.offset;
            let inserted = match (vocab.axiom_kind(&t.predicate), t.object) {
                (Some(kind), Object::Iri(o)) => {
                    match ontology.insert_axiom(Axiom::new(kind, t.subject, o)) {
                        Ok(new) => new,
                        Err(e) => {
                            self.diag(Severity::Error, offset, e.to_string());
                            continue;
                        }
                    }
                }
                (Some(kind), Object::Literal(_)) => {
                    self.diag(
                        Severity::Error,
                        offset,
                        format!("{kind} needs an IRI object, found a literal"),
                    );
                    continue;
                }
                (None, Object::Iri(o)) if t.predicate == vocab.rdf_type => {
                    ontology.insert_assertion(Assertion::type_of(t.subject, o))
                }
                (None, Object::Literal(_)) if t.predicate == vocab.rdf_type => {
                    self.diag(
                        Severity::Error,
                        offset,
                        "rdf:type needs an IRI object".into(),
                    );
                    continue;
                }
                (None, Object::Iri(o)) => {
                    ontology.insert_assertion(Assertion::relation(t.subject, t.predicate, o))
                }
                (None, Object::Literal(s)) => ontology.insert_assertion(Assertion::relation(
                    t.subject,
                    t.predicate,
                    Term::Literal(s),
                )),
            };
            if !inserted {
                self.diag(Severity::Warning, offset, "repeated statement".into());
            }
        }
        self.diagnostics
            .sort_by_key(|d| (d.line, d.column, d.severity));
        (ontology, self.diagnostics)
    }
}

fn describe(tok: &Tok) -> &'static str {
    match tok {
        Tok::PrefixDirective { .. } => "a prefix directive",
        Tok::IriRef(_) => "an IRI",
        Tok::PName(_) => "a prefixed name",
        Tok::A => "`a`",
        Tok::Literal(_) => "a literal",
        Tok::Dot => "`.`",
        Tok::Comma => "`,`",
        Tok::Semi => "`;`",
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let column = before[line_start..].chars().count() + 1;
    (line, column)
}

enum Declared {
    Class,
    Property,
}

struct Vocabulary {
    rdf_type: Iri,
    class_types: [Iri; 2],
    property_types: [Iri; 4],
    axioms: [(Iri, AxiomKind); 5],
}

impl Vocabulary {
    fn new() -> Self {
        let i = |s: String| Iri::new(s).expect("static IRI");
        Vocabulary {
            rdf_type: i(format!("{RDF}type")),
            class_types: [i(format!("{OWL}Class")), i(format!("{RDFS}Class"))],
            property_types: [
                i(format!("{OWL}ObjectProperty")),
                i(format!("{OWL}DatatypeProperty")),
                i(format!("{OWL}AnnotationProperty")),
                i(format!("{RDF}Property")),
            ],
            axioms: [
                (i(format!("{RDFS}subClassOf")), AxiomKind::SubClassOf),
                (
                    i(format!("{OWL}equivalentClass")),
                    AxiomKind::EquivalentClass,
                ),
                (i(format!("{OWL}disjointWith")), AxiomKind::DisjointWith),
                (i(format!("{RDFS}domain")), AxiomKind::Domain),
                (i(format!("{RDFS}range")), AxiomKind::Range),
            ],
        }
    }

    fn declaration(&self, predicate: &Iri, object: &Object) -> Option<Declared> {
        let Object::Iri(o) = object else { return None };
        if *predicate != self.rdf_type {
            None
        } else if self.class_types.contains(o) {
            Some(Declared::Class)
        } else if self.property_types.contains(o) {
            Some(Declared::Property)
        } else {
            None
        }
    }

    fn axiom_kind(&self, predicate: &Iri) -> Option<AxiomKind> {
        self.axioms
            .iter()
            .find(|(p, _)| p == predicate)
            .map(|(_, k)| *k)
    }

    fn predicate_for(&self, kind: AxiomKind) -> &Iri {
        &self
            .axioms
            .iter()
            .find(|(_, k)| *k == kind)
            .expect("all kinds")
            .0
    }
}

/// Writes `ontology` as Turtle.
///
/// Output is deterministic: prefixes sorted by label, then one block per
/// subject ordered by expanded IRI, with predicates and objects sorted the
/// same way. An empty ontology with no prefixes serializes to `""`.
pub fn serialize_turtle(ontology: &Ontology) -> String {
    let vocab = Vocabulary::new();
    let class_decl = Term::Iri(vocab.class_types[0].clone());
    let property_decl = Term::Iri(vocab.property_types[0].clone());

    let mut statements: BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Term>>> = BTreeMap::new();
    let mut put = |s: &Iri, p: &Iri, o: Term| {
        statements
            .entry(s.clone())
            .or_default()
            .entry(p.clone())
            .or_default()
            .insert(o);
    };
    for c in &ontology.declared_classes {
        put(c, &vocab.rdf_type, class_decl.clone());
    }
    for p in &ontology.declared_properties {
        put(p, &vocab.rdf_type, property_decl.clone());
    }
    for ax in &ontology.tbox {
        put(
            ax.subject(),
            vocab.predicate_for(ax.kind()),
            Term::Iri(ax.object().clone()),
        );
    }
    for a in &ontology.abox {
        match a {
            Assertion::TypeOf { individual, class } => {
                put(individual, &vocab.rdf_type, Term::Iri(class.clone()))
            }
            Assertion::Relation {
                subject,
                predicate,
                object,
            } => put(subject, predicate, object.clone()),
        }
    }

    let prefixes = &ontology.prefixes;
    let mut out = String::new();
    for (label, ns) in prefixes.iter() {
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    for (subject, preds) in statements {
        out.push('\n');
        out.push_str(&prefixes.display(&subject));
        let n = preds.len();
        for (i, (predicate, objects)) in preds.into_iter().enumerate() {
            let verb = if predicate == vocab.rdf_type {
                "a".to_owned()
            } else {
                prefixes.display(&predicate)
            };
            let objs: Vec<String> = objects
                .iter()
                .map(|o| match o {
                    Term::Iri(iri) => prefixes.display(iri),
                    Term::Literal(s) => quote_literal(s),
                })
                .collect();
            let sep = if i == 0 { " " } else { "    " };
            let end = if i + 1 == n { " .\n" } else { " ;\n" };
            out.push_str(&format!("{sep}{verb} {}{end}", objs.join(", ")));
        }
    }
    out
}

fn quote_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
