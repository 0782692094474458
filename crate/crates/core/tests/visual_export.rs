use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use skoo::reasoner::subsumption_closure;
use skoo::schema::SchemaBundle;
use skoo::transform::{apply_rules, default_rules};
use skoo::visual::{
    from_json, to_dot, to_json, validate_visual_model, ShapeKind, VisEdge, VisList, VisNode,
    VisShape, VisText, VisTree, VisualModel,
};

/// Statements of a DOT digraph, as read by a small parser for the subset the
/// exporter writes: quoted ids, `->` edges, `[key="value", ...]` attributes.
#[derive(Debug, Default)]
struct Dot {
    nodes: BTreeMap<String, BTreeMap<String, String>>,
    edges: Vec<(String, String, BTreeMap<String, String>)>,
}

fn parse_dot(text: &str) -> Result<Dot, String> {
    let mut chars = text.chars().peekable();
    let mut tokens = Vec::new();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next().ok_or("unterminated string")? {
                        '"' => break,
                        '\\' => match chars.next().ok_or("dangling escape")? {
                            'n' => s.push('\n'),
                            c @ ('"' | '\\') => s.push(c),
                            c => return Err(format!("unknown escape \\{c}")),
                        },
                        '\n' => return Err("raw newline in string".into()),
                        c => s.push(c),
                    }
                }
                tokens.push(format!("\"{s}"));
            }
            '-' => {
                chars.next();
                if chars.next() != Some('>') {
                    return Err("expected ->".into());
                }
                tokens.push("->".into());
            }
            '{' | '}' | '[' | ']' | '=' | ',' | ';' => {
                chars.next();
                tokens.push(c.to_string());
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars
                    .peek()
                    .filter(|c| c.is_ascii_alphanumeric() || **c == '_')
                {
                    s.push(c);
                    chars.next();
                }
                tokens.push(s);
            }
            c => return Err(format!("unexpected character {c:?}")),
        }
    }

    let mut t = tokens.iter().map(String::as_str).peekable();
    let quoted = |tok: Option<&str>| -> Result<String, String> {
        tok.and_then(|s| s.strip_prefix('"'))
            .map(str::to_owned)
            .ok_or_else(|| format!("expected quoted id, got {tok:?}"))
    };
    let want = |tok: Option<&str>, w: &str| -> Result<(), String> {
        if tok == Some(w) {
            Ok(())
        } else {
            Err(format!("expected {w}, got {tok:?}"))
        }
    };

    want(t.next(), "digraph")?;
    t.next()
        .filter(|s| !s.starts_with('"'))
        .ok_or("missing graph name")?;
    want(t.next(), "{")?;
    let mut dot = Dot::default();
    loop {
        let tok = t.next();
        if tok == Some("}") {
            break;
        }
        let first = quoted(tok)?;
        let second = if t.peek() == Some(&"->") {
            t.next();
            Some(quoted(t.next())?)
        } else {
            None
        };
        let mut attrs = BTreeMap::new();
        want(t.next(), "[")?;
        loop {
            let key = t.next().ok_or("eof in attributes")?;
            want(t.next(), "=")?;
            attrs.insert(key.to_owned(), quoted(t.next())?);
            match t.next() {
                Some(",") => continue,
                Some("]") => break,
                other => return Err(format!("bad attribute list at {other:?}")),
            }
        }
        want(t.next(), ";")?;
        match second {
            Some(to) => dot.edges.push((first, to, attrs)),
            None => {
                if dot.nodes.insert(first.clone(), attrs).is_some() {
                    return Err(format!("node {first} declared twice"));
                }
            }
        }
    }
    if t.next().is_some() {
        return Err("trailing tokens".into());
    }
    Ok(dot)
}

const WORDS: [&str; 7] = [
    "alpha",
    "Beta",
    "with \"quote\"",
    "back\\slash",
    "two\nlines",
    "ünï",
    "x y",
];

fn random_model(rng: &mut impl Rng, max_elements: usize) -> VisualModel {
    let budget = rng.random_range(0..=max_elements);
    let n_nodes = rng.random_range(0..=budget);
    let mut vm = VisualModel::default();
    for i in 0..n_nodes {
        vm.nodes.push(VisNode {
            id: format!("n{i} {}", WORDS.choose(rng).unwrap()),
            label: WORDS.choose(rng).unwrap().to_string(),
            style_class: ["law", "theorem", "domain-object"]
                .choose(rng)
                .unwrap()
                .to_string(),
            payload: None,
        });
    }
    let ids: Vec<String> = vm.nodes.iter().map(|n| n.id.clone()).collect();
    for i in 0..budget - n_nodes {
        let id = format!("e{i}");
        match rng.random_range(0..5) {
            0 | 1 if !ids.is_empty() => vm.edges.push(VisEdge {
                id,
                from: ids.choose(rng).unwrap().clone(),
                to: ids.choose(rng).unwrap().clone(),
                label: WORDS.choose(rng).unwrap().to_string(),
            }),
            2 if !ids.is_empty() => vm.lists.push(VisList {
                id,
                items: ids
                    .iter()
                    .filter(|_| rng.random_bool(0.5))
                    .cloned()
                    .collect(),
            }),
            3 => vm.texts.push(VisText {
                id,
                content: WORDS.choose(rng).unwrap().to_string(),
            }),
            _ => vm.shapes.push(VisShape {
                id,
                shape: *[ShapeKind::Rect, ShapeKind::Ellipse, ShapeKind::Line]
                    .choose(rng)
                    .unwrap(),
            }),
        }
    }
    if ids.len() >= 2 && rng.random_bool(0.5) {
        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, kid) in ids.iter().enumerate().skip(1) {
            children
                .entry(ids[rng.random_range(0..i)].clone())
                .or_default()
                .push(kid.clone());
        }
        vm.trees.push(VisTree {
            id: "tree".into(),
            root: ids[0].clone(),
            children,
        });
    }
    vm.sort();
    vm
}

proptest! {
    #[test]
    fn json_round_trips(seed in any::<u64>()) {
        let vm = random_model(&mut StdRng::seed_from_u64(seed), 20);
        prop_assert!(validate_visual_model(&vm).iter().all(|d| d.severity != skoo::turtle::Severity::Error));
        prop_assert_eq!(from_json(&to_json(&vm).unwrap()).unwrap(), vm);
    }

    #[test]
    fn dot_parses_and_matches_the_model(seed in any::<u64>()) {
        let vm = random_model(&mut StdRng::seed_from_u64(seed), 20);
        let dot = parse_dot(&to_dot(&vm).unwrap()).map_err(TestCaseError::fail)?;
        let ids: BTreeSet<&String> = vm.nodes.iter().map(|n| &n.id).collect();
        prop_assert_eq!(dot.nodes.keys().collect::<BTreeSet<_>>(), ids);
        for n in &vm.nodes {
            prop_assert_eq!(&dot.nodes[&n.id]["label"], &n.label);
            prop_assert_eq!(&dot.nodes[&n.id]["class"], &n.style_class);
        }
        prop_assert_eq!(dot.edges.len(), vm.edges.len());
        for ((from, to, attrs), e) in dot.edges.iter().zip(&vm.edges) {
            prop_assert_eq!((from, to), (&e.from, &e.to));
            prop_assert_eq!(&attrs["id"], &e.id);
            prop_assert_eq!(&attrs["label"], &e.label);
        }
    }
}

fn fixture_model() -> VisualModel {
    let b = SchemaBundle::embedded();
    let g = b
        .merged_all()
        .unwrap()
        .merge(&b.fixtures["wille-ch3"])
        .unwrap();
    apply_rules(&g, &subsumption_closure(&g), &default_rules()).unwrap()
}

#[test]
fn fixture_dot_is_well_formed_and_stable() {
    let first = to_dot(&fixture_model()).unwrap();
    let second = to_dot(&fixture_model()).unwrap();
    assert_eq!(first, second);
    let dot = parse_dot(&first).unwrap();
    assert_eq!(dot.nodes.len(), 5);
    assert_eq!(dot.edges.len(), 3);
    for (from, to, _) in &dot.edges {
        assert!(dot.nodes.contains_key(from) && dot.nodes.contains_key(to));
    }
}

#[test]
fn invalid_models_are_not_exported() {
    let mut vm = fixture_model();
    vm.edges[0].to = "ex:nowhere".into();
    let err = to_dot(&vm).unwrap_err();
    assert!(err.to_string().contains("ex:nowhere"));
    assert!(to_json(&vm).is_err());
}
