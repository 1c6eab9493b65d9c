//! Versioned text format for handle decompositions and move scripts.
//!
//! ```text
//! kirbydoc 1
//! [metadata]
//! name = W(1)
//! simply_connected = true
//! reconstructed = false
//! cork = d h
//! [handles]
//! d dotted
//! h framed 0
//!   grid 2
//!   X: 1 0
//!   O: 0 1
//! [linking]
//! d h 1
//! [three_handles]
//! 0
//! [script]
//! twist d h
//! ```
//!
//! Indented `grid`/`X:`/`O:` lines attach a grid diagram to the handle above.
//! `#` starts a comment line. [`emit`] writes the canonical form, which
//! [`parse`] reads back to an equal value.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::handle::{Component, HandleDecomposition, Metadata};
use crate::legendrian::GridDiagram;
use crate::moves::MoveScript;

pub const HEADER: &str = "kirbydoc";
pub const VERSION: u32 = 1;

/// 1-based position of a problem in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct DocError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub decomposition: HandleDecomposition,
    pub script: Option<MoveScript>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Metadata,
    Handles,
    Linking,
    ThreeHandles,
    Script,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        Some(match s {
            "metadata" => Section::Metadata,
            "handles" => Section::Handles,
            "linking" => Section::Linking,
            "three_handles" => Section::ThreeHandles,
            "script" => Section::Script,
            _ => return None,
        })
    }
}

struct Parser {
    errors: Vec<DocError>,
}

impl Parser {
    fn err(&mut self, line: usize, column: usize, message: impl Into<String>) {
        self.errors.push(DocError { line, column, message: message.into() });
    }
}

/// Words of a line with their 1-based columns.
fn words(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn indent(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

struct PendingGrid {
    line: usize,
    size: Option<usize>,
    x: Option<Vec<usize>>,
    o: Option<Vec<usize>>,
}

pub fn parse(text: &str) -> Result<Document, Vec<DocError>> {
    let mut p = Parser { errors: Vec::new() };
    let lines: Vec<&str> = text.lines().collect();

    let Some(first) = lines.first() else {
        return Err(vec![DocError { line: 1, column: 1, message: format!("missing `{HEADER} {VERSION}` header") }]);
    };
    let head = words(first);
    match head.as_slice() {
        [(_, h), (c, v)] if *h == HEADER => {
            if v.parse::<u32>().ok() != Some(VERSION) {
                p.err(1, *c, format!("unsupported version `{v}`, expected {VERSION}"));
            }
        }
        _ => p.err(1, 1, format!("missing `{HEADER} {VERSION}` header")),
    }

    let mut metadata = Metadata::default();
    let mut meta_refs: Vec<(usize, usize, String)> = Vec::new();
    let mut components: Vec<Component> = Vec::new();
    let mut component_line: HashMap<String, usize> = HashMap::new();
    let mut grids: Vec<(usize, PendingGrid)> = Vec::new();
    let mut linking: BTreeMap<(String, String), i64> = BTreeMap::new();
    let mut link_lines: Vec<(usize, Vec<(usize, String)>)> = Vec::new();
    let mut three_handles: Option<u32> = None;
    let mut script_lines: Vec<(usize, &str)> = Vec::new();
    let mut has_script = false;
    let mut seen: HashMap<Section, usize> = HashMap::new();
    let mut section: Option<Section> = None;

    for (k, &raw) in lines.iter().enumerate().skip(1) {
        let ln = k + 1;
        let trimmed = raw.trim();
        if section == Some(Section::Script) && !trimmed.starts_with('[') {
            script_lines.push((ln, raw));
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with('[') {
            let col = indent(raw) + 1;
            let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) else {
                p.err(ln, col, "malformed section header");
                section = None;
                continue;
            };
            match Section::parse(name) {
                None => {
                    p.err(ln, col + 1, format!("unknown section `{name}`"));
                    section = None;
                }
                Some(s) => {
                    if let Some(prev) = seen.insert(s, ln) {
                        p.err(ln, col, format!("section `{name}` repeated (first at line {prev})"));
                    }
                    if s == Section::Script {
                        has_script = true;
                    }
                    section = Some(s);
                }
            }
            continue;
        }
        let w = words(raw);
        match section {
            None => p.err(ln, indent(raw) + 1, "content outside any section"),
            Some(Section::Metadata) => {
                let Some(eq) = raw.find('=') else {
                    p.err(ln, indent(raw) + 1, "expected `key = value`");
                    continue;
                };
                let key = raw[..eq].trim();
                let value = raw[eq + 1..].trim();
                let key_col = indent(raw) + 1;
                let val_col = eq + 2 + (raw[eq + 1..].len() - raw[eq + 1..].trim_start().len());
                match key {
                    "name" => metadata.name = value.to_string(),
                    "simply_connected" | "reconstructed" => match parse_bool(value) {
                        Some(b) if key == "reconstructed" => metadata.reconstructed = b,
                        Some(b) => metadata.asserted_simply_connected = b,
                        None => p.err(ln, val_col, format!("expected `true` or `false`, found `{value}`")),
                    },
                    "cork" | "plug" => {
                        let ids = words(value);
                        if ids.len() != 2 {
                            p.err(ln, val_col, format!("`{key}` takes two component ids"));
                            continue;
                        }
                        for (c, id) in &ids {
                            meta_refs.push((ln, val_col + c - 1, id.to_string()));
                        }
                        let pair = Some((ids[0].1.to_string(), ids[1].1.to_string()));
                        if key == "cork" {
                            metadata.cork = pair;
                        } else {
                            metadata.plug = pair;
                        }
                    }
                    "torus_witness" => {
                        meta_refs.push((ln, val_col, value.to_string()));
                        metadata.torus_witness = Some(value.to_string());
                    }
                    other => p.err(ln, key_col, format!("unknown metadata key `{other}`")),
                }
            }
            Some(Section::Handles) => {
                if indent(raw) > 0 {
                    let Some((_, g)) = grids.last_mut().filter(|(i, _)| *i + 1 == components.len()) else {
                        p.err(ln, indent(raw) + 1, "grid line without a handle above it");
                        continue;
                    };
                    let (c0, tag) = w[0];
                    let nums = |p: &mut Parser, items: &[(usize, &str)]| -> Option<Vec<usize>> {
                        let mut v = Vec::new();
                        for &(c, t) in items {
                            match t.parse::<usize>() {
                                Ok(x) => v.push(x),
                                Err(_) => {
                                    p.err(ln, c, format!("expected a row index, found `{t}`"));
                                    return None;
                                }
                            }
                        }
                        Some(v)
                    };
                    match tag {
                        "grid" if w.len() == 2 && g.size.is_none() => match w[1].1.parse() {
                            Ok(n) => g.size = Some(n),
                            Err(_) => p.err(ln, w[1].0, format!("expected grid size, found `{}`", w[1].1)),
                        },
                        "X:" if g.size.is_some() && g.x.is_none() => g.x = nums(&mut p, &w[1..]),
                        "O:" if g.x.is_some() && g.o.is_none() => g.o = nums(&mut p, &w[1..]),
                        _ => p.err(ln, c0, "expected `grid n`, then `X: …`, then `O: …`"),
                    }
                    continue;
                }
                let (c0, id) = w[0];
                let comp = match (w.get(1).map(|x| x.1), w.len()) {
                    (Some("dotted"), 2) => Some(Component::dotted(id)),
                    (Some("framed"), 3) => match w[2].1.parse::<i64>() {
                        Ok(f) => Some(Component::two_handle(id, f)),
                        Err(_) => {
                            p.err(ln, w[2].0, format!("expected an integer framing, found `{}`", w[2].1));
                            None
                        }
                    },
                    _ => {
                        p.err(ln, w.get(1).map_or(c0 + id.len(), |x| x.0), "expected `<id> dotted` or `<id> framed <n>`");
                        None
                    }
                };
                if let Some(c) = comp {
                    if let Some(prev) = component_line.insert(id.to_string(), ln) {
                        p.err(ln, c0, format!("duplicate id `{id}` (first at line {prev})"));
                        continue;
                    }
                    components.push(c);
                    grids.push((components.len() - 1, PendingGrid { line: ln, size: None, x: None, o: None }));
                }
            }
            Some(Section::Linking) => {
                if w.len() != 3 {
                    p.err(ln, w[0].0, "expected `<id> <id> <linking number>`");
                    continue;
                }
                let Ok(v) = w[2].1.parse::<i64>() else {
                    p.err(ln, w[2].0, format!("expected an integer, found `{}`", w[2].1));
                    continue;
                };
                let (a, b) = (w[0].1.to_string(), w[1].1.to_string());
                if a == b {
                    p.err(ln, w[1].0, "a component does not link itself; framings go in [handles]");
                    continue;
                }
                let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                if linking.insert(key, v).is_some() {
                    p.err(ln, w[0].0, format!("pair {a} {b} given twice"));
                }
                link_lines.push((ln, vec![(w[0].0, a), (w[1].0, b)]));
            }
            Some(Section::ThreeHandles) => {
                if three_handles.is_some() || w.len() != 1 {
                    p.err(ln, w[0].0, "expected a single count");
                    continue;
                }
                match w[0].1.parse::<u32>() {
                    Ok(t) => three_handles = Some(t),
                    Err(_) => p.err(ln, w[0].0, format!("expected a count, found `{}`", w[0].1)),
                }
            }
            Some(Section::Script) => unreachable!("handled above"),
        }
    }

    for (i, g) in grids {
        match g {
            PendingGrid { size: None, x: None, o: None, .. } => {}
            PendingGrid { line, size: Some(n), x: Some(x), o: Some(o) } => {
                if x.len() != n || o.len() != n {
                    p.err(line, 1, format!("grid of size {n} needs {n} X and {n} O entries"));
                    continue;
                }
                match GridDiagram::new(x, o) {
                    Ok(g) => components[i].grid = Some(g),
                    Err(e) => p.err(line, 1, format!("grid for `{}`: {e}", components[i].id)),
                }
            }
            PendingGrid { line, .. } => p.err(line, 1, format!("incomplete grid for `{}`", components[i].id)),
        }
    }
    for (ln, ids) in &link_lines {
        for (c, id) in ids {
            if !component_line.contains_key(id) {
                p.err(*ln, *c, format!("unknown component `{id}`"));
            }
        }
    }
    for (ln, c, id) in &meta_refs {
        if !component_line.contains_key(id) {
            p.err(*ln, *c, format!("unknown component `{id}`"));
        }
    }
    let script = if has_script {
        let start = script_lines.first().map_or(1, |(l, _)| *l);
        let body: String = script_lines.iter().map(|(_, l)| format!("{l}\n")).collect();
        match MoveScript::parse_at(&body, start) {
            Ok(s) => Some(s),
            Err(e) => {
                p.errors.push(DocError { line: e.line, column: e.column, message: e.message });
                None
            }
        }
    } else {
        None
    };
    if !p.errors.is_empty() {
        p.errors.sort_by_key(|e| (e.line, e.column));
        return Err(p.errors);
    }
    let decomposition = HandleDecomposition::from_parts(components, linking, three_handles.unwrap_or(0), metadata);
    let problems = decomposition.validate();
    if !problems.is_empty() {
        let at = seen.get(&Section::Linking).or(seen.get(&Section::Handles)).copied().unwrap_or(1);
        return Err(problems.into_iter().map(|message| DocError { line: at, column: 1, message }).collect());
    }
    Ok(Document { decomposition, script })
}

/// Canonical text for `h` and an optional script.
pub fn emit(h: &HandleDecomposition, script: Option<&MoveScript>) -> String {
    let mut s = String::new();
    let _ = emit_into(&mut s, h, script);
    s
}

fn emit_into(s: &mut String, h: &HandleDecomposition, script: Option<&MoveScript>) -> fmt::Result {
    let md = &h.metadata;
    writeln!(s, "{HEADER} {VERSION}")?;
    writeln!(s, "[metadata]")?;
    writeln!(s, "name = {}", md.name.replace('\n', " "))?;
    writeln!(s, "simply_connected = {}", md.asserted_simply_connected)?;
    writeln!(s, "reconstructed = {}", md.reconstructed)?;
    if let Some((a, b)) = &md.cork {
        writeln!(s, "cork = {a} {b}")?;
    }
    if let Some((a, b)) = &md.plug {
        writeln!(s, "plug = {a} {b}")?;
    }
    if let Some(w) = &md.torus_witness {
        writeln!(s, "torus_witness = {w}")?;
    }
    writeln!(s, "[handles]")?;
    for c in h.components() {
        match c.framing {
            None => writeln!(s, "{} dotted", c.id)?,
            Some(f) => writeln!(s, "{} framed {f}", c.id)?,
        }
        if let Some(g) = &c.grid {
            for line in g.to_text_lines() {
                writeln!(s, "  {line}")?;
            }
        }
    }
    writeln!(s, "[linking]")?;
    let comps = h.components();
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            let (a, b) = (&comps[i].id, &comps[j].id);
            let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            if let Some(v) = h.linking_entries().get(&key) {
                writeln!(s, "{a} {b} {v}")?;
            }
        }
    }
    writeln!(s, "[three_handles]")?;
    writeln!(s, "{}", h.three_handles)?;
    if let Some(script) = script {
        writeln!(s, "[script]")?;
        write!(s, "{script}")?;
    }
    Ok(())
}
