//! Edge-list and GML parsing.
//!
//! Both parsers map external node labels to dense 0-based indices in sorted
//! label order (numeric when every label is a nonnegative integer,
//! lexicographic otherwise), so the assignment depends only on the label
//! set and round trips exactly.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("input contains no edges")]
    Empty,
    #[error("gml: {0}")]
    Gml(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph plus the external label of each node index.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

/// A GML graph with per-node integer `value` attributes (cluster ground
/// truth in benchmark files) and any parser warnings.
#[derive(Debug, Clone)]
pub struct GmlGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub values: Vec<Option<i64>>,
    pub warnings: Vec<String>,
}

fn sort_labels(labels: BTreeSet<String>) -> Vec<String> {
    let mut out: Vec<String> = labels.into_iter().collect();
    if out.iter().all(|l| l.parse::<u64>().is_ok()) {
        out.sort_by_key(|l| (l.parse::<u64>().unwrap(), l.clone()));
    }
    // otherwise the BTreeSet already left them lexicographically sorted
    out
}

/// Parses lines of "u v" with '#' comments and blank lines allowed. Labels
/// may be arbitrary whitespace-free strings.
pub fn parse_edge_list(text: &str) -> Result<LabeledGraph, ParseError> {
    let mut label_set = BTreeSet::new();
    let mut raw_edges: Vec<(String, String)> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(ParseError::BadLine {
                    line,
                    reason: format!("expected two whitespace-separated labels, got {content:?}"),
                })
            }
        };
        if u == v {
            return Err(ParseError::SelfLoop { line });
        }
        label_set.insert(u.to_string());
        label_set.insert(v.to_string());
        raw_edges.push((u.to_string(), v.to_string()));
    }
    if raw_edges.is_empty() {
        return Err(ParseError::Empty);
    }
    let labels = sort_labels(label_set);
    let index: BTreeMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let pairs: Vec<(usize, usize)> = raw_edges
        .iter()
        .map(|(u, v)| (index[u.as_str()], index[v.as_str()]))
        .collect();
    let graph = Graph::from_edges(labels.len(), &pairs)?;
    Ok(LabeledGraph { graph, labels })
}

/// Writes the edge list back out; `parse_edge_list` of the result rebuilds
/// an identical graph and label map.
pub fn write_edge_list(g: &LabeledGraph) -> String {
    let mut out = String::new();
    for &(u, v) in g.graph.edges() {
        out.push_str(&g.labels[u]);
        out.push(' ');
        out.push_str(&g.labels[v]);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
    Str(String),
}

fn tokenize_gml(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '[' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ']' => {
                tokens.push(Token::Close);
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(ParseError::Gml("unterminated string".into())),
                    }
                }
                tokens.push(Token::Str(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                tokens.push(Token::Word(word));
            }
        }
    }
    Ok(tokens)
}

#[derive(Debug, Default)]
struct GmlNode {
    id: Option<i64>,
    label: Option<String>,
    value: Option<i64>,
}

/// Parses the GML subset used by the benchmark networks: a `graph [ ... ]`
/// block holding `node [ id .. label .. value .. ]` and
/// `edge [ source .. target .. ]` records. Unknown keys are skipped,
/// duplicate edges are deduplicated with a warning.
pub fn parse_gml(text: &str) -> Result<GmlGraph, ParseError> {
    let tokens = tokenize_gml(text)?;
    let mut pos = 0usize;
    // find the top-level "graph [" block, skipping header keys like Creator
    while pos < tokens.len() {
        if let Token::Word(w) = &tokens[pos] {
            if w == "graph" {
                break;
            }
        }
        pos += 1;
    }
    if pos == tokens.len() {
        return Err(ParseError::Gml("no graph [ ... ] block".into()));
    }
    pos += 1;
    if tokens.get(pos) != Some(&Token::Open) {
        return Err(ParseError::Gml("expected [ after graph".into()));
    }
    pos += 1;

    let mut nodes: Vec<GmlNode> = Vec::new();
    let mut raw_edges: Vec<(i64, i64)> = Vec::new();
    let mut warnings = Vec::new();

    while pos < tokens.len() {
        match &tokens[pos] {
            Token::Close => break,
            Token::Word(w) if w == "node" => {
                pos += 1;
                let fields = read_block(&tokens, &mut pos)?;
                let mut node = GmlNode::default();
                for (key, value) in fields {
                    match key.as_str() {
                        "id" => node.id = value.parse::<i64>().ok(),
                        "label" => node.label = Some(value),
                        "value" => node.value = value.parse::<i64>().ok(),
                        _ => {}
                    }
                }
                if node.id.is_none() {
                    return Err(ParseError::Gml("node block without id".into()));
                }
                nodes.push(node);
            }
            Token::Word(w) if w == "edge" => {
                pos += 1;
                let fields = read_block(&tokens, &mut pos)?;
                let mut source = None;
                let mut target = None;
                for (key, value) in fields {
                    match key.as_str() {
                        "source" => source = value.parse::<i64>().ok(),
                        "target" => target = value.parse::<i64>().ok(),
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => raw_edges.push((s, t)),
                    _ => return Err(ParseError::Gml("edge block without source/target".into())),
                }
            }
            Token::Word(_) => {
                // scalar attribute of the graph block (e.g. "directed 0")
                pos += 1;
                match tokens.get(pos) {
                    Some(Token::Open) => {
                        skip_block(&tokens, &mut pos)?;
                    }
                    Some(_) => pos += 1,
                    None => return Err(ParseError::Gml("dangling key".into())),
                }
            }
            t => return Err(ParseError::Gml(format!("unexpected token {t:?}"))),
        }
    }

    if nodes.is_empty() {
        return Err(ParseError::Gml("graph block has no nodes".into()));
    }
    // dense indices in ascending id order
    let mut ids: Vec<i64> = nodes.iter().map(|n| n.id.unwrap()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != nodes.len() {
        return Err(ParseError::Gml("duplicate node id".into()));
    }
    let index: BTreeMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

    let mut labels = vec![String::new(); nodes.len()];
    let mut values = vec![None; nodes.len()];
    for node in &nodes {
        let id = node.id.unwrap();
        let i = index[&id];
        labels[i] = node.label.clone().unwrap_or_else(|| id.to_string());
        values[i] = node.value;
    }

    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(raw_edges.len());
    for (s, t) in raw_edges {
        let (Some(&u), Some(&v)) = (index.get(&s), index.get(&t)) else {
            return Err(ParseError::Gml(format!(
                "edge references unknown node id {s} or {t}"
            )));
        };
        if u == v {
            return Err(ParseError::Gml(format!("self-loop at node id {s}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            warnings.push(format!("duplicate edge {s} -- {t} dropped"));
            continue;
        }
        pairs.push((u, v));
    }
    let graph = Graph::from_edges(nodes.len(), &pairs)?;
    Ok(GmlGraph {
        graph,
        labels,
        values,
        warnings,
    })
}

/// Reads the `[ key value ... ]` fields of a node/edge block.
fn read_block(tokens: &[Token], pos: &mut usize) -> Result<Vec<(String, String)>, ParseError> {
    if tokens.get(*pos) != Some(&Token::Open) {
        return Err(ParseError::Gml("expected [".into()));
    }
    *pos += 1;
    let mut fields = Vec::new();
    while *pos < tokens.len() {
        match &tokens[*pos] {
            Token::Close => {
                *pos += 1;
                return Ok(fields);
            }
            Token::Word(key) => {
                *pos += 1;
                match tokens.get(*pos) {
                    Some(Token::Word(value)) => {
                        fields.push((key.clone(), value.clone()));
                        *pos += 1;
                    }
                    Some(Token::Str(value)) => {
                        fields.push((key.clone(), value.clone()));
                        *pos += 1;
                    }
                    Some(Token::Open) => skip_block(tokens, pos)?,
                    _ => return Err(ParseError::Gml(format!("key {key} without value"))),
                }
            }
            t => return Err(ParseError::Gml(format!("unexpected token {t:?} in block"))),
        }
    }
    Err(ParseError::Gml("unterminated block".into()))
}

fn skip_block(tokens: &[Token], pos: &mut usize) -> Result<(), ParseError> {
    if tokens.get(*pos) != Some(&Token::Open) {
        return Err(ParseError::Gml("expected [".into()));
    }
    let mut depth = 0usize;
    while *pos < tokens.len() {
        match tokens[*pos] {
            Token::Open => depth += 1,
            Token::Close => {
                depth -= 1;
                if depth == 0 {
                    *pos += 1;
                    return Ok(());
                }
            }
            _ => {}
        }
        *pos += 1;
    }
    Err(ParseError::Gml("unterminated block".into()))
}
