//! The frame document format.
//!
//! ```text
//! # a fork
//! worlds: 3
//! label: 0 root
//! edge: 0 0
//! edge: 0 1
//! ```
//!
//! Worlds are numbered from 0. Blank lines and `#` comments are ignored.

use std::fmt;

use kripke::frame_core::{add_final, add_root, chain, cluster, copies, fork, strict_chain};
use kripke::Frame;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for DocumentError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDocument {
    pub frame: Frame,
    pub labels: Vec<Option<String>>,
}

pub fn parse_document(text: &str) -> Result<FrameDocument, DocumentError> {
    let mut size: Option<usize> = None;
    let mut edges = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| DocumentError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(':').ok_or_else(|| err(format!("expected `key: value`, got `{content}`")))?;
        let rest = rest.trim();
        match key.trim() {
            "worlds" => {
                if size.is_some() {
                    return Err(err("`worlds` given twice".into()));
                }
                let n = rest.parse().map_err(|_| err(format!("`{rest}` is not a world count")))?;
                size = Some(n);
                labels = vec![None; n];
            }
            "edge" | "label" => {
                let n = size.ok_or_else(|| err("`worlds` must come first".into()))?;
                let index = |tok: &str| -> Result<usize, DocumentError> {
                    let w: usize = tok.parse().map_err(|_| err(format!("`{tok}` is not a world index")))?;
                    if w >= n {
                        return Err(err(format!("world {w} is out of range for {n} worlds")));
                    }
                    Ok(w)
                };
                if key.trim() == "edge" {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    let [a, b] = toks[..] else {
                        return Err(err(format!("an edge needs two worlds, got `{rest}`")));
                    };
                    edges.push((index(a)?, index(b)?));
                } else {
                    let (w, name) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    labels[index(w)?] = Some(name.trim().to_string());
                }
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    let n = size.ok_or(DocumentError { line: text.lines().count().max(1), message: "missing `worlds`".into() })?;
    let frame = Frame::new(n, edges).expect("edges were range-checked");
    Ok(FrameDocument { frame, labels })
}

pub fn parse_frame_document(text: &str) -> Result<Frame, DocumentError> {
    parse_document(text).map(|d| d.frame)
}

pub fn print_frame(f: &Frame) -> String {
    let mut out = format!("worlds: {}\n", f.size());
    for (a, b) in f.edges() {
        out.push_str(&format!("edge: {a} {b}\n"));
    }
    out
}

/// Graphviz text for a frame; reflexive worlds are drawn as double circles.
pub fn dot(f: &Frame) -> String {
    let mut out = String::from("digraph frame {\n");
    for w in f.worlds() {
        let shape = if f.related(w, w) { "doublecircle" } else { "circle" };
        out.push_str(&format!("  {w} [shape={shape}];\n"));
    }
    for (a, b) in f.edges().filter(|(a, b)| a != b) {
        out.push_str(&format!("  {a} -> {b};\n"));
    }
    out.push_str("}\n");
    out
}

/// Shorthand frames accepted wherever a frame file is expected: `chain:3`, `strict-chain:2`,
/// `cluster:2`, `fork:2`, `root:<spec>`, `final:<spec>`, `copies:<k>:<spec>`, `empty`.
pub fn builtin_frame(spec: &str) -> Option<Frame> {
    if spec == "empty" {
        return Some(Frame::empty());
    }
    let (kind, arg) = spec.split_once(':')?;
    match kind {
        "root" => builtin_frame(arg).map(|f| add_root(&f)),
        "final" => builtin_frame(arg).map(|f| add_final(&f)),
        "copies" => {
            let (k, inner) = arg.split_once(':')?;
            Some(copies(k.parse().ok()?, &builtin_frame(inner)?))
        }
        _ => {
            let n: usize = arg.parse().ok()?;
            match kind {
                "chain" => Some(chain(n)),
                "strict-chain" => Some(strict_chain(n)),
                "cluster" => Some(cluster(n)),
                "fork" => Some(fork(n)),
                _ => None,
            }
        }
    }
}
