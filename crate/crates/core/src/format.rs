//! Line-based text formats for patterns and coloured instances.
//!
//! Pattern files: a header `pattern <n>` followed by one `<u> <v>` arc per
//! line. Instance files: a header `coloured-digraph <n> over <k>` followed
//! by `<u> <v> <c>` lines. `#` starts a comment, blank lines are ignored,
//! vertex indices are 0-based.

use std::fmt::Write as _;

use thiserror::Error;

use crate::digraph::{ColouredInstance, Digraph, Pattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `{expected}` header")]
    MissingHeader { expected: &'static str },
    #[error("malformed header, expected `{expected}`")]
    BadHeader { expected: &'static str },
    #[error("vertex count must be at least 1")]
    EmptyVertexSet,
    #[error("malformed arc line, expected `{expected}`")]
    BadArcLine { expected: &'static str },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("colour {colour} out of range for {k} colours")]
    ColourOutOfRange { colour: usize, k: usize },
    #[error("duplicate arc ({u}, {v})")]
    DuplicateArc { u: usize, v: usize },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Significant lines with their 1-based numbers: comments stripped at `#`,
/// blanks dropped.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

fn parse_usize(tok: &str, line: usize, expected: &'static str) -> Result<usize, ParseError> {
    tok.parse::<usize>().map_err(|_| err(line, ParseErrorKind::BadArcLine { expected }))
}

pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    let mut lines = significant_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(0, ParseErrorKind::MissingHeader { expected: "pattern <n>" }))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "pattern" {
        return Err(err(hline, ParseErrorKind::BadHeader { expected: "pattern <n>" }));
    }
    let n = toks[1]
        .parse::<usize>()
        .map_err(|_| err(hline, ParseErrorKind::BadHeader { expected: "pattern <n>" }))?;
    if n == 0 {
        return Err(err(hline, ParseErrorKind::EmptyVertexSet));
    }
    let mut g = Digraph::new(n).expect("n >= 1");
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(err(lno, ParseErrorKind::BadArcLine { expected: "<u> <v>" }));
        }
        let u = parse_usize(toks[0], lno, "<u> <v>")?;
        let v = parse_usize(toks[1], lno, "<u> <v>")?;
        for w in [u, v] {
            if w >= n {
                return Err(err(lno, ParseErrorKind::VertexOutOfRange { vertex: w, n }));
            }
        }
        if !g.insert_arc(u, v) {
            return Err(err(lno, ParseErrorKind::DuplicateArc { u, v }));
        }
    }
    Ok(Pattern::new(g))
}

pub fn parse_instance(text: &str) -> Result<ColouredInstance, ParseError> {
    let expected = "coloured-digraph <n> over <k>";
    let mut lines = significant_lines(text);
    let (hline, header) =
        lines.next().ok_or_else(|| err(0, ParseErrorKind::MissingHeader { expected }))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "coloured-digraph" || toks[2] != "over" {
        return Err(err(hline, ParseErrorKind::BadHeader { expected }));
    }
    let n = toks[1]
        .parse::<usize>()
        .map_err(|_| err(hline, ParseErrorKind::BadHeader { expected }))?;
    let k = toks[3]
        .parse::<usize>()
        .map_err(|_| err(hline, ParseErrorKind::BadHeader { expected }))?;
    if n == 0 {
        return Err(err(hline, ParseErrorKind::EmptyVertexSet));
    }
    let mut g = Digraph::new(n).expect("n >= 1");
    let mut colours: Vec<((usize, usize), usize)> = Vec::new();
    for (lno, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(err(lno, ParseErrorKind::BadArcLine { expected: "<u> <v> <c>" }));
        }
        let u = parse_usize(toks[0], lno, "<u> <v> <c>")?;
        let v = parse_usize(toks[1], lno, "<u> <v> <c>")?;
        let c = parse_usize(toks[2], lno, "<u> <v> <c>")?;
        for w in [u, v] {
            if w >= n {
                return Err(err(lno, ParseErrorKind::VertexOutOfRange { vertex: w, n }));
            }
        }
        if c >= k {
            return Err(err(lno, ParseErrorKind::ColourOutOfRange { colour: c, k }));
        }
        if !g.insert_arc(u, v) {
            return Err(err(lno, ParseErrorKind::DuplicateArc { u, v }));
        }
        colours.push(((u, v), c));
    }
    Ok(ColouredInstance::new(g, k, &colours).expect("validated while parsing"))
}

pub fn pattern_to_string(h: &Pattern) -> String {
    let mut out = format!("pattern {}\n", h.n());
    for (u, v) in h.arcs() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn instance_to_string(inst: &ColouredInstance) -> String {
    let mut out = format!("coloured-digraph {} over {}\n", inst.d().n(), inst.h_size());
    for (u, v) in inst.d().arcs() {
        writeln!(out, "{u} {v} {}", inst.colour(u, v)).unwrap();
    }
    out
}
