//! Text formats: SDF for splice diagrams, RGF for resolution graphs.
//!
//! SDF:
//!
//! ```text
//! subtree := node | leaf
//! leaf    := "*" ["=" IDENT]
//! node    := "(" branch {"," branch} ")"
//! branch  := INT leaf | INT "/" INT node
//! ```
//!
//! In a branch the first integer is the weight at the enclosing node, the
//! second the weight at the child node. `#` starts a comment running to the
//! end of the line. Vertices are numbered in depth-first order. Maximal
//! diagrams are written in an extended form where leaf branches also carry
//! a child weight (`INT "/" INT *`).
//!
//! RGF: one item per line, `v <id> <euler>` or `e <id> <id>`.

use std::collections::HashSet;
use std::fmt::Write;

use num_bigint::BigInt;

use crate::convert::{MaximalSpliceDiagram, ResolutionGraph};
use crate::diagram::{Edge, SpliceDiagram, Vertex, VertexId};
use crate::error::{Error, Result};

pub const SDF_VERSION: &str = "1.0";
pub const RGF_VERSION: &str = "1.0";

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            _src: src,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_trivia();
        let start = self.pos;
        let (line, column) = (self.line, self.column);
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected an integer weight, found '{c}'")),
                None => self.error("expected an integer weight, found end of input"),
            });
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| Error::Parse {
            line,
            column,
            message: format!("bad integer {text}"),
        })
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
        {
            self.bump();
        }
        if start == self.pos {
            return Err(self.error("expected a label after '='"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }
}

struct RawTree {
    vertices: Vec<Vertex>,
    /// (parent, weight at parent, child, weight at child)
    edges: Vec<(usize, BigInt, usize, Option<BigInt>)>,
}

fn parse_raw(text: &str, extended: bool) -> Result<Option<RawTree>> {
    let mut cur = Cursor::new(text);
    cur.skip_trivia();
    if cur.peek().is_none() {
        return Ok(None);
    }
    let mut raw = RawTree {
        vertices: Vec::new(),
        edges: Vec::new(),
    };
    let mut labels = HashSet::new();
    parse_subtree(&mut cur, &mut raw, &mut labels, None, extended)?;
    cur.skip_trivia();
    if let Some(c) = cur.peek() {
        return Err(cur.error(format!("unexpected '{c}' after the diagram")));
    }
    Ok(Some(raw))
}

fn parse_subtree(
    cur: &mut Cursor,
    raw: &mut RawTree,
    labels: &mut HashSet<String>,
    child_weight: Option<&BigInt>,
    extended: bool,
) -> Result<usize> {
    cur.skip_trivia();
    let (line, column) = (cur.line, cur.column);
    match cur.peek() {
        Some('*') => {
            cur.bump();
            if child_weight.is_some() && !extended {
                return Err(Error::Parse {
                    line,
                    column,
                    message: "a leaf end carries no weight".into(),
                });
            }
            let mut vertex = Vertex::leaf();
            if cur.peek() == Some('=') {
                cur.bump();
                let (l, c) = (cur.line, cur.column);
                let label = cur.ident()?;
                if !labels.insert(label.clone()) {
                    return Err(Error::Parse {
                        line: l,
                        column: c,
                        message: format!("duplicate label {label}"),
                    });
                }
                vertex.label = Some(label);
            }
            raw.vertices.push(vertex);
            Ok(raw.vertices.len() - 1)
        }
        Some('(') => {
            cur.bump();
            if child_weight.is_none() && !raw.vertices.is_empty() {
                return Err(Error::Parse {
                    line,
                    column,
                    message: "a node branch needs a weight at the child node (INT/INT)".into(),
                });
            }
            raw.vertices.push(Vertex::node());
            let me = raw.vertices.len() - 1;
            loop {
                let w = cur.integer()?;
                cur.skip_trivia();
                let child_w = if cur.peek() == Some('/') {
                    cur.bump();
                    Some(cur.integer()?)
                } else {
                    None
                };
                let edge_index = raw.edges.len();
                raw.edges.push((me, w, usize::MAX, child_w.clone()));
                let child = parse_subtree(cur, raw, labels, child_w.as_ref(), extended)?;
                raw.edges[edge_index].2 = child;
                cur.skip_trivia();
                match cur.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    Some(c) => return Err(cur.error(format!("expected ',' or ')', found '{c}'"))),
                    None => return Err(cur.error("unclosed '('")),
                }
            }
            Ok(me)
        }
        Some(c) => Err(cur.error(format!("expected '*' or '(', found '{c}'"))),
        None => Err(cur.error("unexpected end of input")),
    }
}

/// Parses SDF text. Empty input (or only comments) gives the empty diagram.
pub fn parse_sdf(text: &str) -> Result<SpliceDiagram> {
    let Some(raw) = parse_raw(text, false)? else {
        return Ok(SpliceDiagram::empty());
    };
    let edges = raw
        .edges
        .into_iter()
        .map(|(p, w, c, cw)| Edge::new(p, Some(w), c, cw))
        .collect();
    SpliceDiagram::new(raw.vertices, edges)
}

fn root_of(d: &SpliceDiagram) -> VertexId {
    d.nodes().first().copied().unwrap_or(0)
}

/// Writes SDF, rooted at the node with the smallest id, branches in
/// insertion order. The empty diagram is written as an empty string.
pub fn emit_sdf(d: &SpliceDiagram) -> String {
    if d.is_empty() {
        return String::new();
    }
    let mut out = String::new();
    emit_from(d, root_of(d), None, &mut out);
    out
}

fn emit_from(d: &SpliceDiagram, v: VertexId, parent: Option<usize>, out: &mut String) {
    if d.is_leaf(v) {
        out.push('*');
        if let Some(l) = &d.vertex(v).label {
            let _ = write!(out, "={l}");
        }
        return;
    }
    out.push('(');
    let mut first = true;
    for (e, w) in d.neighbors(v) {
        if Some(e) == parent {
            continue;
        }
        if !first {
            out.push_str(", ");
        }
        first = false;
        let edge = d.edge(e);
        let here = edge.weight_at(v).map(|x| x.to_string()).unwrap_or_else(|| "?".into());
        match edge.weight_at(w) {
            Some(there) if d.is_node(w) => {
                let _ = write!(out, "{here}/{there} ");
            }
            _ => {
                let _ = write!(out, "{here} ");
            }
        }
        emit_from(d, w, Some(e), out);
    }
    out.push(')');
}

/// Writes a maximal splice diagram in extended SDF, rooted at the first
/// original node (or vertex 0).
pub fn emit_maximal_sdf(m: &MaximalSpliceDiagram) -> String {
    if m.is_empty() {
        return String::new();
    }
    let root = (0..m.len())
        .find(|&v| m.incident(v).len() >= 3)
        .unwrap_or(0);
    let mut out = String::new();
    emit_maximal_from(m, root, None, &mut out);
    out
}

fn emit_maximal_from(m: &MaximalSpliceDiagram, v: usize, parent: Option<usize>, out: &mut String) {
    let children: Vec<usize> = m.incident(v).iter().copied().filter(|&e| Some(e) != parent).collect();
    if children.is_empty() {
        out.push('*');
        if let Some(l) = &m.vertices()[v].label {
            let _ = write!(out, "={l}");
        }
        return;
    }
    out.push('(');
    for (i, &e) in children.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let w = m.other(e, v);
        let _ = write!(out, "{}/{} ", m.weight_at(e, v), m.weight_at(e, w));
        emit_maximal_from(m, w, Some(e), out);
    }
    out.push(')');
}

/// Parses RGF text.
pub fn parse_rgf(text: &str) -> Result<ResolutionGraph> {
    let mut ids: Vec<String> = Vec::new();
    let mut euler = Vec::new();
    let mut pending_edges: Vec<(usize, usize, String, String)> = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let col_of = |i: usize| -> usize {
            let mut from = 0;
            let mut col = indent + 1;
            for (k, f) in fields.iter().enumerate() {
                let at = content[from..].find(f).map(|p| p + from).unwrap_or(0);
                col = at + 1;
                from = at + f.len();
                if k == i {
                    break;
                }
            }
            col
        };
        let err = |i: usize, msg: String| Error::Parse {
            line: line_no,
            column: col_of(i),
            message: msg,
        };
        match fields[0] {
            "v" => {
                if fields.len() != 3 {
                    return Err(err(0, "expected 'v <id> <euler>'".into()));
                }
                if !seen.insert(fields[1].to_string()) {
                    return Err(err(1, format!("duplicate vertex id {}", fields[1])));
                }
                let e: BigInt = fields[2]
                    .parse()
                    .map_err(|_| err(2, format!("bad Euler number {}", fields[2])))?;
                ids.push(fields[1].to_string());
                euler.push(e);
            }
            "e" => {
                if fields.len() != 3 {
                    return Err(err(0, "expected 'e <id> <id>'".into()));
                }
                pending_edges.push((line_no, col_of(1), fields[1].to_string(), fields[2].to_string()));
            }
            other => return Err(err(0, format!("unknown record '{other}'"))),
        }
    }
    let mut edges = Vec::new();
    for (line, column, a, b) in pending_edges {
        let find = |x: &str| ids.iter().position(|i| i == x);
        let (Some(ia), Some(ib)) = (find(&a), find(&b)) else {
            return Err(Error::Parse {
                line,
                column,
                message: format!("edge {a} {b} names an unknown vertex"),
            });
        };
        edges.push([ia, ib]);
    }
    ResolutionGraph::new(ids, euler, edges)
}

pub fn emit_rgf(g: &ResolutionGraph) -> String {
    let mut out = String::new();
    for v in 0..g.len() {
        let _ = writeln!(out, "v {} {}", g.ids()[v], g.euler(v));
    }
    for &[a, b] in g.edges() {
        let _ = writeln!(out, "e {} {}", g.ids()[a], g.ids()[b]);
    }
    out
}
