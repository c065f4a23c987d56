//! Splice diagrams and rooted weighted trees.
//!
//! A splice diagram is a finite tree whose vertices are leaves (valency 1)
//! or nodes. Every edge end that sits at a node carries a positive integer
//! weight; leaf ends carry none. Vertex ids are dense indices; diagrams
//! parsed from SDF text number their vertices in depth-first order from the
//! serialized root, so leaves listed in id order are the leaves in
//! serialization order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Leaf,
    Node,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    pub label: Option<String>,
}

impl Vertex {
    pub fn leaf() -> Self {
        Vertex {
            kind: VertexKind::Leaf,
            label: None,
        }
    }

    pub fn node() -> Self {
        Vertex {
            kind: VertexKind::Node,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// An edge with an optional weight at each end (`weights[i]` sits at `ends[i]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub ends: [VertexId; 2],
    pub weights: [Option<BigInt>; 2],
}

impl Edge {
    pub fn new(a: VertexId, wa: Option<BigInt>, b: VertexId, wb: Option<BigInt>) -> Self {
        Edge {
            ends: [a, b],
            weights: [wa, wb],
        }
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    pub fn weight_at(&self, v: VertexId) -> Option<&BigInt> {
        if self.ends[0] == v {
            self.weights[0].as_ref()
        } else if self.ends[1] == v {
            self.weights[1].as_ref()
        } else {
            None
        }
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.ends[0] == v || self.ends[1] == v
    }
}

#[derive(Clone, Debug)]
pub struct SpliceDiagram {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
}

/// A single failed condition found by [`SpliceDiagram::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NotATree { vertices: usize, edges: usize, connected: bool },
    LeafValency { leaf: VertexId, valency: usize },
    NodeValency { node: VertexId, valency: usize },
    MissingWeight { edge: EdgeId, vertex: VertexId },
    WeightOnLeaf { edge: EdgeId, leaf: VertexId },
    NonPositiveWeight { edge: EdgeId, vertex: VertexId, weight: BigInt },
    NotCoprime { node: VertexId, first: BigInt, second: BigInt },
    LeafWeightOne { node: VertexId, leaf: VertexId },
    EdgeDeterminant { edge: EdgeId, determinant: BigInt },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "diagram has no vertices"),
            Violation::NotATree {
                vertices,
                edges,
                connected,
            } => write!(
                f,
                "not a tree ({vertices} vertices, {edges} edges, connected={connected})"
            ),
            Violation::LeafValency { leaf, valency } => {
                write!(f, "leaf v{leaf} has valency {valency}")
            }
            Violation::NodeValency { node, valency } => {
                write!(f, "node v{node} has valency {valency}")
            }
            Violation::MissingWeight { edge, vertex } => {
                write!(f, "edge e{edge} has no weight at node v{vertex}")
            }
            Violation::WeightOnLeaf { edge, leaf } => {
                write!(f, "edge e{edge} carries a weight at leaf v{leaf}")
            }
            Violation::NonPositiveWeight {
                edge,
                vertex,
                weight,
            } => write!(f, "edge e{edge} has weight {weight} at v{vertex}"),
            Violation::NotCoprime {
                node,
                first,
                second,
            } => write!(f, "weights {first} and {second} at node v{node} are not coprime"),
            Violation::LeafWeightOne { node, leaf } => {
                write!(f, "edge from node v{node} to leaf v{leaf} has weight 1")
            }
            Violation::EdgeDeterminant { edge, determinant } => {
                write!(f, "edge e{edge} has edge determinant {determinant}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// The four pieces produced by cutting a diagram along a node–node edge.
///
/// `left` holds the side of `ends[0]` of the cut edge. The rooted trees are
/// rooted at the cut point and forget the far weights; the splice diagrams
/// turn the cut edge into a leaf edge that keeps the near weight.
#[derive(Clone, Debug)]
pub struct CutResult {
    pub left_rooted: RootedWeightedTree,
    pub right_rooted: RootedWeightedTree,
    pub left: SpliceDiagram,
    pub right: SpliceDiagram,
    /// The new leaf of `left` that replaces the cut edge.
    pub left_leaf: VertexId,
    pub right_leaf: VertexId,
    /// Vertex of `d` for each vertex of `left` (`None` for the new leaf).
    pub left_origin: Vec<Option<VertexId>>,
    pub right_origin: Vec<Option<VertexId>>,
}

impl SpliceDiagram {
    /// Builds a diagram from raw parts. Only index sanity is checked here;
    /// use [`SpliceDiagram::validate`] for the splice diagram conditions.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let n = vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            let [a, b] = e.ends;
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge e{i} refers to a missing vertex")));
            }
            if a == b {
                return Err(Error::invalid(format!("edge e{i} is a loop")));
            }
            adjacency[a].push(i);
            adjacency[b].push(i);
        }
        Ok(SpliceDiagram {
            vertices,
            edges,
            adjacency,
        })
    }

    /// The diagram with no vertices, standing for S³.
    pub fn empty() -> Self {
        SpliceDiagram {
            vertices: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    /// One node with a leaf for each weight: the link Σ(p₁,…,pₙ).
    pub fn star(weights: &[BigInt]) -> Self {
        let mut vertices = vec![Vertex::node()];
        let mut edges = Vec::new();
        for w in weights {
            vertices.push(Vertex::leaf());
            edges.push(Edge::new(0, Some(w.clone()), vertices.len() - 1, None));
        }
        SpliceDiagram::new(vertices, edges).expect("star is well formed")
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Incident edges of `v` in insertion order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, VertexId)> + '_ {
        self.adjacency[v]
            .iter()
            .map(move |&e| (e, self.edges[e].other(v)))
    }

    pub fn valency(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.vertices[v].kind == VertexKind::Leaf
    }

    pub fn is_node(&self, v: VertexId) -> bool {
        self.vertices[v].kind == VertexKind::Node
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        (0..self.vertices.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn nodes(&self) -> Vec<VertexId> {
        (0..self.vertices.len()).filter(|&v| self.is_node(v)).collect()
    }

    pub fn is_node_node_edge(&self, e: EdgeId) -> bool {
        let [a, b] = self.edges[e].ends;
        self.is_node(a) && self.is_node(b)
    }

    pub fn node_node_edges(&self) -> Vec<EdgeId> {
        (0..self.edges.len())
            .filter(|&e| self.is_node_node_edge(e))
            .collect()
    }

    /// Finds a vertex by label, or by 1-based leaf index in id order.
    pub fn find_leaf(&self, selector: &str) -> Option<VertexId> {
        let leaves = self.leaves();
        if let Some(v) = leaves
            .iter()
            .copied()
            .find(|&v| self.vertices[v].label.as_deref() == Some(selector))
        {
            return Some(v);
        }
        let index: usize = selector.parse().ok()?;
        leaves.get(index.checked_sub(1)?).copied()
    }

    /// Weight `d_ve` at node `v` on edge `e`.
    pub fn weight(&self, v: VertexId, e: EdgeId) -> Result<&BigInt> {
        self.edges[e]
            .weight_at(v)
            .ok_or_else(|| Error::invalid(format!("edge e{e} has no weight at v{v}")))
    }

    /// `d_v`, the product of the weights around `v` (1 for a leaf).
    pub fn weight_product(&self, v: VertexId) -> BigInt {
        self.adjacency[v]
            .iter()
            .filter_map(|&e| self.edges[e].weight_at(v))
            .product()
    }

    /// Product of the weights at `v` on every edge except `skip`.
    pub fn weight_product_except(&self, v: VertexId, skip: EdgeId) -> BigInt {
        self.adjacency[v]
            .iter()
            .filter(|&&e| e != skip)
            .filter_map(|&e| self.edges[e].weight_at(v))
            .product()
    }

    /// Vertices of the component of `d − e` containing the far end of `e`
    /// as seen from `v` (so `Δ_ve` together with its leaves).
    pub fn beyond(&self, v: VertexId, e: EdgeId) -> Vec<VertexId> {
        let start = self.edges[e].other(v);
        let mut seen = vec![false; self.vertices.len()];
        seen[v] = true;
        seen[start] = true;
        let mut order = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (_, w) in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    stack.push(w);
                }
            }
        }
        order.sort_unstable();
        order
    }

    /// Leaves of `Δ_ve` in id order.
    pub fn leaves_beyond(&self, v: VertexId, e: EdgeId) -> Vec<VertexId> {
        self.beyond(v, e)
            .into_iter()
            .filter(|&w| self.is_leaf(w))
            .collect()
    }

    /// Vertex path from `v` to `w` (inclusive) together with its edges.
    pub fn path(&self, v: VertexId, w: VertexId) -> Option<(Vec<VertexId>, Vec<EdgeId>)> {
        let n = self.vertices.len();
        let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            if u == w {
                break;
            }
            for (e, x) in self.neighbors(u) {
                if !seen[x] {
                    seen[x] = true;
                    parent[x] = Some((u, e));
                    queue.push_back(x);
                }
            }
        }
        if !seen[w] {
            return None;
        }
        let mut verts = vec![w];
        let mut edges = Vec::new();
        let mut cur = w;
        while let Some((p, e)) = parent[cur] {
            verts.push(p);
            edges.push(e);
            cur = p;
        }
        verts.reverse();
        edges.reverse();
        Some((verts, edges))
    }

    /// Linking number `ℓ_vw`, or `ℓ'_vw` when `prime` is set.
    ///
    /// Off the diagonal this is the product of the weights adjacent to, but
    /// not on, the path from `v` to `w`; the primed version also drops the
    /// weights around `v` and `w`. On the diagonal a node gives `d_v` and a
    /// leaf next to a node with weights `p₀` (toward the leaf), `p₁…pₙ`
    /// gives `⌈p₁…pₙ / p₀⌉`.
    pub fn linking_number(&self, v: VertexId, w: VertexId, prime: bool) -> Result<BigInt> {
        if v >= self.vertex_count() || w >= self.vertex_count() {
            return Err(Error::invalid("vertex out of range"));
        }
        if v == w {
            if prime {
                return Err(Error::invalid("primed linking number needs distinct vertices"));
            }
            return self.diagonal_linking(v);
        }
        let (verts, path_edges) = self
            .path(v, w)
            .ok_or_else(|| Error::invalid("vertices are not connected"))?;
        let mut product = BigInt::one();
        for (i, &u) in verts.iter().enumerate() {
            if prime && (i == 0 || i + 1 == verts.len()) {
                continue;
            }
            for &e in &self.adjacency[u] {
                if path_edges.contains(&e) {
                    continue;
                }
                if let Some(wt) = self.edges[e].weight_at(u) {
                    product *= wt;
                }
            }
        }
        Ok(product)
    }

    fn diagonal_linking(&self, v: VertexId) -> Result<BigInt> {
        if self.is_node(v) {
            return Ok(self.weight_product(v));
        }
        let &e = self.adjacency[v]
            .first()
            .ok_or_else(|| Error::invalid(format!("leaf v{v} has no edge")))?;
        let node = self.edges[e].other(v);
        if !self.is_node(node) {
            return Err(Error::invalid(format!("leaf v{v} is not attached to a node")));
        }
        let p0 = self.weight(node, e)?.clone();
        let rest = self.weight_product_except(node, e);
        Ok(ceil_div(&rest, &p0))
    }

    /// All `ℓ_vw` for fixed `v`, computed by a single traversal that divides
    /// out the path weights as it goes.
    pub fn linking_row(&self, v: VertexId) -> Result<Vec<BigInt>> {
        let n = self.vertex_count();
        let mut row = vec![BigInt::zero(); n];
        let mut acc: Vec<Option<BigInt>> = vec![None; n];
        acc[v] = Some(self.weight_product(v));
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let here = acc[u].clone().expect("visited");
            for (e, x) in self.neighbors(u) {
                if acc[x].is_some() {
                    continue;
                }
                let near = self.edges[e].weight_at(u).cloned().unwrap_or_else(BigInt::one);
                let far = self.edges[e].weight_at(x).cloned().unwrap_or_else(BigInt::one);
                let value = &here / &near * self.weight_product(x) / far;
                acc[x] = Some(value);
                stack.push(x);
            }
        }
        for (w, a) in acc.into_iter().enumerate() {
            row[w] = match a {
                Some(value) if w != v => value,
                Some(_) => self.diagonal_linking(v)?,
                None => return Err(Error::invalid("diagram is not connected")),
            };
        }
        Ok(row)
    }

    /// Product of the two weights on a node–node edge minus the product of
    /// the weights adjacent to it.
    pub fn edge_determinant(&self, e: EdgeId) -> Result<BigInt> {
        if e >= self.edges.len() {
            return Err(Error::invalid(format!("edge e{e} out of range")));
        }
        let [a, b] = self.edges[e].ends;
        if !self.is_node(a) || !self.is_node(b) {
            return Err(Error::invalid(format!("edge e{e} is incident to a leaf")));
        }
        let on_edge = self.weight(a, e)? * self.weight(b, e)?;
        let adjacent = self.weight_product_except(a, e) * self.weight_product_except(b, e);
        Ok(on_edge - adjacent)
    }

    /// Checks every splice diagram condition and lists all violations.
    pub fn validate(&self, strict: bool) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.vertices.len();
        if n == 0 {
            violations.push(Violation::Empty);
            return ValidationReport { violations };
        }
        let connected = self.is_connected();
        if !connected || self.edges.len() + 1 != n {
            violations.push(Violation::NotATree {
                vertices: n,
                edges: self.edges.len(),
                connected,
            });
        }
        for v in 0..n {
            let val = self.valency(v);
            match self.vertices[v].kind {
                VertexKind::Leaf if val != 1 => {
                    violations.push(Violation::LeafValency {
                        leaf: v,
                        valency: val,
                    });
                }
                VertexKind::Node if val < 3 && (strict || val < 2) => {
                    violations.push(Violation::NodeValency {
                        node: v,
                        valency: val,
                    });
                }
                _ => {}
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for side in 0..2 {
                let v = e.ends[side];
                match (&e.weights[side], self.vertices[v].kind) {
                    (None, VertexKind::Node) => {
                        violations.push(Violation::MissingWeight { edge: i, vertex: v })
                    }
                    (Some(_), VertexKind::Leaf) => {
                        violations.push(Violation::WeightOnLeaf { edge: i, leaf: v })
                    }
                    (Some(w), VertexKind::Node) if !w.is_positive() => {
                        violations.push(Violation::NonPositiveWeight {
                            edge: i,
                            vertex: v,
                            weight: w.clone(),
                        })
                    }
                    _ => {}
                }
            }
        }
        for v in self.nodes() {
            let ws: Vec<&BigInt> = self.adjacency[v]
                .iter()
                .filter_map(|&e| self.edges[e].weight_at(v))
                .collect();
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    if !ws[i].gcd(ws[j]).is_one() {
                        violations.push(Violation::NotCoprime {
                            node: v,
                            first: ws[i].clone(),
                            second: ws[j].clone(),
                        });
                    }
                }
            }
            if strict {
                for (e, w) in self.neighbors(v) {
                    if self.is_leaf(w) && self.edges[e].weight_at(v).is_some_and(|x| x.is_one()) {
                        violations.push(Violation::LeafWeightOne { node: v, leaf: w });
                    }
                }
            }
        }
        let has_missing = violations
            .iter()
            .any(|v| matches!(v, Violation::MissingWeight { .. }));
        if !has_missing {
            for e in self.node_node_edges() {
                if let Ok(det) = self.edge_determinant(e) {
                    if !det.is_positive() {
                        violations.push(Violation::EdgeDeterminant {
                            edge: e,
                            determinant: det,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub(crate) fn ensure_valid(&self, strict: bool) -> Result<()> {
        let report = self.validate(strict);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::invalid(report.to_string()))
        }
    }

    /// True when at least one leaf edge has weight 1.
    pub fn is_non_minimal(&self) -> bool {
        self.nodes().into_iter().any(|v| {
            self.neighbors(v)
                .any(|(e, w)| self.is_leaf(w) && self.edges[e].weight_at(v).is_some_and(|x| x.is_one()))
        })
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (_, w) in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// True when the nodes lie on a single path.
    pub fn is_line(&self) -> bool {
        self.nodes().into_iter().all(|v| {
            self.neighbors(v).filter(|&(_, w)| self.is_node(w)).count() <= 2
        })
    }

    /// Nodes of a line diagram in path order, starting from the end node
    /// with the smaller id.
    pub fn line_order(&self) -> Result<Vec<VertexId>> {
        if !self.is_line() {
            return Err(Error::UnsupportedTopology(
                "the nodes of the diagram are not in a line".into(),
            ));
        }
        let nodes = self.nodes();
        let Some(&start) = nodes
            .iter()
            .find(|&&v| self.neighbors(v).filter(|&(_, w)| self.is_node(w)).count() <= 1)
        else {
            return Ok(Vec::new());
        };
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = self
                .neighbors(cur)
                .map(|(_, w)| w)
                .find(|&w| w != prev && self.is_node(w));
            match next {
                Some(w) => {
                    order.push(w);
                    prev = cur;
                    cur = w;
                }
                None => break,
            }
        }
        Ok(order)
    }

    /// Edge joining two adjacent vertices.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adjacency[a]
            .iter()
            .copied()
            .find(|&e| self.edges[e].touches(b))
    }

    /// Splices `d1` and `d2` along the leaves `l1` and `l2`: the two leaf
    /// edges become one node–node edge keeping both node-end weights.
    pub fn splice(d1: &SpliceDiagram, l1: VertexId, d2: &SpliceDiagram, l2: VertexId) -> Result<Self> {
        for (d, l) in [(d1, l1), (d2, l2)] {
            if l >= d.vertex_count() || !d.is_leaf(l) || d.valency(l) != 1 {
                return Err(Error::invalid(format!("v{l} is not a leaf")));
            }
        }
        let (e1, n1) = d1.neighbors(l1).next().expect("leaf edge");
        let (e2, n2) = d2.neighbors(l2).next().expect("leaf edge");
        let w1 = d1.weight(n1, e1)?.clone();
        let w2 = d2.weight(n2, e2)?.clone();

        let mut vertices = Vec::new();
        let mut map1 = vec![usize::MAX; d1.vertex_count()];
        for v in 0..d1.vertex_count() {
            if v != l1 {
                map1[v] = vertices.len();
                vertices.push(d1.vertices[v].clone());
            }
        }
        let mut map2 = vec![usize::MAX; d2.vertex_count()];
        for v in 0..d2.vertex_count() {
            if v != l2 {
                map2[v] = vertices.len();
                vertices.push(d2.vertices[v].clone());
            }
        }
        let mut edges = Vec::new();
        for (i, e) in d1.edges.iter().enumerate() {
            if i == e1 {
                edges.push(Edge::new(map1[n1], Some(w1.clone()), map2[n2], Some(w2.clone())));
            } else {
                edges.push(Edge {
                    ends: [map1[e.ends[0]], map1[e.ends[1]]],
                    weights: e.weights.clone(),
                });
            }
        }
        for (i, e) in d2.edges.iter().enumerate() {
            if i != e2 {
                edges.push(Edge {
                    ends: [map2[e.ends[0]], map2[e.ends[1]]],
                    weights: e.weights.clone(),
                });
            }
        }
        let spliced = SpliceDiagram::new(vertices, edges)?;
        let report = spliced.validate(false);
        if !report.is_valid() {
            return Err(Error::invalid(format!("splice result is not a splice diagram: {report}")));
        }
        Ok(spliced)
    }

    /// Cuts along a node–node edge.
    pub fn cut(&self, e: EdgeId) -> Result<CutResult> {
        if e >= self.edges.len() {
            return Err(Error::invalid(format!("edge e{e} out of range")));
        }
        if !self.is_node_node_edge(e) {
            return Err(Error::invalid(format!("edge e{e} is incident to a leaf")));
        }
        let [u, v] = self.edges[e].ends;
        let (left, left_leaf, left_origin) = self.half(u, e)?;
        let (right, right_leaf, right_origin) = self.half(v, e)?;
        let left_rooted = left.root_at_leaf(left_leaf)?;
        let right_rooted = right.root_at_leaf(right_leaf)?;
        Ok(CutResult {
            left_rooted,
            right_rooted,
            left,
            right,
            left_leaf,
            right_leaf,
            left_origin,
            right_origin,
        })
    }

    /// The side of `e` containing `keep`, with `e` turned into a leaf edge.
    fn half(&self, keep: VertexId, e: EdgeId) -> Result<(SpliceDiagram, VertexId, Vec<Option<VertexId>>)> {
        let other = self.edges[e].other(keep);
        let mut side = self.beyond(other, e);
        side.sort_unstable();
        let mut map = vec![usize::MAX; self.vertex_count()];
        let mut vertices = Vec::new();
        let mut origin = Vec::new();
        for &v in &side {
            map[v] = vertices.len();
            vertices.push(self.vertices[v].clone());
            origin.push(Some(v));
        }
        let mut edges = Vec::new();
        for (i, edge) in self.edges.iter().enumerate() {
            if i == e {
                continue;
            }
            let [a, b] = edge.ends;
            if map[a] != usize::MAX && map[b] != usize::MAX {
                edges.push(Edge {
                    ends: [map[a], map[b]],
                    weights: edge.weights.clone(),
                });
            }
        }
        let leaf = vertices.len();
        vertices.push(Vertex::leaf());
        origin.push(None);
        edges.push(Edge::new(map[keep], Some(self.weight(keep, e)?.clone()), leaf, None));
        Ok((SpliceDiagram::new(vertices, edges)?, leaf, origin))
    }

    /// Roots the diagram at leaf `l`, keeping for every edge only the weight
    /// at its root-side end.
    pub fn root_at_leaf(&self, l: VertexId) -> Result<RootedWeightedTree> {
        if l >= self.vertex_count() || !self.is_leaf(l) || self.valency(l) != 1 {
            return Err(Error::invalid(format!("v{l} is not a leaf")));
        }
        let mut tree = RootedWeightedTree::with_root(self.vertices[l].label.clone(), Some(l));
        let mut stack: Vec<(VertexId, VertexId, usize)> = Vec::new();
        let (_, top) = self.neighbors(l).next().expect("leaf edge");
        let top_id = tree.add_child(0, None, self.vertices[top].label.clone(), Some(top));
        stack.push((top, l, top_id));
        let mut visited = vec![false; self.vertex_count()];
        visited[l] = true;
        visited[top] = true;
        // depth-first, children in adjacency order
        let mut order = Vec::new();
        while let Some((u, parent, tid)) = stack.pop() {
            order.push(u);
            let kids: Vec<(EdgeId, VertexId)> = self
                .neighbors(u)
                .filter(|&(_, w)| w != parent && !visited[w])
                .collect();
            let mut pending = Vec::new();
            for (e, w) in kids {
                visited[w] = true;
                let weight = self.weight(u, e)?.clone();
                let cid = tree.add_child(tid, Some(weight), self.vertices[w].label.clone(), Some(w));
                pending.push((w, u, cid));
            }
            for item in pending.into_iter().rev() {
                stack.push(item);
            }
        }
        tree.check()?;
        Ok(tree)
    }

    /// `Δ_n(l)`: on every edge, multiply the weight at the end farther from
    /// `l` by `n`. Leaf ends carry no weight and are left alone.
    pub fn twist(&self, l: VertexId, n: &BigInt) -> Result<SpliceDiagram> {
        if l >= self.vertex_count() || !self.is_leaf(l) {
            return Err(Error::invalid(format!("v{l} is not a leaf")));
        }
        if !n.is_positive() {
            return Err(Error::invalid("twist factor must be positive"));
        }
        let dist = self.distances_from(l);
        let mut edges = self.edges.clone();
        for edge in &mut edges {
            let far = if dist[edge.ends[0]] > dist[edge.ends[1]] { 0 } else { 1 };
            if let Some(w) = edge.weights[far].as_mut() {
                *w *= n;
            }
        }
        let twisted = SpliceDiagram::new(self.vertices.clone(), edges)?;
        let bad: Vec<String> = twisted
            .validate(false)
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::NotCoprime { .. }))
            .map(|v| v.to_string())
            .collect();
        if !bad.is_empty() {
            return Err(Error::invalid(format!("twist breaks coprimality: {}", bad.join("; "))));
        }
        Ok(twisted)
    }

    fn distances_from(&self, s: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (_, w) in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Canonical key: the lexicographically least rooted encoding over all
    /// choices of root node. Labels are ignored.
    pub fn canonical_key(&self) -> String {
        if self.vertices.is_empty() {
            return String::new();
        }
        let roots = {
            let nodes = self.nodes();
            if nodes.is_empty() {
                vec![0]
            } else {
                nodes
            }
        };
        roots
            .into_iter()
            .map(|r| self.encode_from(r, None))
            .min()
            .unwrap_or_default()
    }

    fn encode_from(&self, v: VertexId, parent: Option<EdgeId>) -> String {
        if self.is_leaf(v) {
            return "*".to_string();
        }
        let mut branches: Vec<(BigInt, BigInt, String)> = self
            .neighbors(v)
            .filter(|&(e, _)| Some(e) != parent)
            .map(|(e, w)| {
                let here = self.edges[e].weight_at(v).cloned().unwrap_or_else(BigInt::zero);
                let there = self.edges[e].weight_at(w).cloned().unwrap_or_else(BigInt::zero);
                (here, there, self.encode_from(w, Some(e)))
            })
            .collect();
        branches.sort();
        let parts: Vec<String> = branches
            .into_iter()
            .map(|(a, b, sub)| {
                if sub == "*" {
                    format!("{a} *")
                } else {
                    format!("{a}/{b} {sub}")
                }
            })
            .collect();
        format!("({})", parts.join(", "))
    }

    /// The diagram rebuilt from its canonical key.
    pub fn canonical_form(&self) -> SpliceDiagram {
        if self.vertices.is_empty() {
            return SpliceDiagram::empty();
        }
        crate::format::parse_sdf(&self.canonical_key()).expect("canonical key is valid SDF")
    }

    pub fn is_isomorphic(&self, other: &SpliceDiagram) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// Leaf ids keyed by their label, for diagrams whose leaves are labelled.
    pub fn labels(&self) -> BTreeSet<String> {
        self.vertices.iter().filter_map(|v| v.label.clone()).collect()
    }
}

/// `⌈a / b⌉` for positive `b`.
pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.is_positive() {
        q + 1
    } else {
        q
    }
}

/// A rooted tree whose root has valency 1. Every non-root edge carries one
/// positive weight, the weight at its upper (root-side) end; the root edge
/// is weightless. Vertex 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedWeightedTree {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    /// Weight of the edge from the parent, stored on the child.
    weight: Vec<Option<BigInt>>,
    labels: Vec<Option<String>>,
    origin: Vec<Option<VertexId>>,
}

impl RootedWeightedTree {
    fn with_root(label: Option<String>, origin: Option<VertexId>) -> Self {
        RootedWeightedTree {
            children: vec![Vec::new()],
            parent: vec![None],
            weight: vec![None],
            labels: vec![label],
            origin: vec![origin],
        }
    }

    /// Builds a tree from a nested description: each entry of `branches`
    /// is a weight and a subtree (an empty subtree is a leaf). The result
    /// has a root, a weightless root edge, and a top vertex carrying the
    /// given branches.
    pub fn from_branches(branches: &[(u64, RootedShape)]) -> Result<Self> {
        let mut tree = RootedWeightedTree::with_root(None, None);
        let top = tree.add_child(0, None, None, None);
        fn grow(tree: &mut RootedWeightedTree, at: usize, branches: &[(u64, RootedShape)]) {
            for (w, shape) in branches {
                let c = tree.add_child(at, Some(BigInt::from(*w)), None, None);
                grow(tree, c, &shape.0);
            }
        }
        grow(&mut tree, top, branches);
        tree.check()?;
        Ok(tree)
    }

    fn add_child(
        &mut self,
        parent: usize,
        weight: Option<BigInt>,
        label: Option<String>,
        origin: Option<VertexId>,
    ) -> usize {
        let id = self.children.len();
        self.children.push(Vec::new());
        self.parent.push(Some(parent));
        self.weight.push(weight);
        self.labels.push(label);
        self.origin.push(origin);
        self.children[parent].push(id);
        id
    }

    /// Checks the shape and the pairwise coprimality of downward weights.
    pub fn check(&self) -> Result<()> {
        if self.children[0].len() != 1 {
            return Err(Error::invalid("root must have valency 1"));
        }
        let top = self.children[0][0];
        if self.weight[top].is_some() {
            return Err(Error::invalid("root edge must be weightless"));
        }
        for v in 1..self.len() {
            if v != top {
                match &self.weight[v] {
                    Some(w) if w.is_positive() => {}
                    _ => return Err(Error::invalid(format!("edge above t{v} needs a positive weight"))),
                }
            }
            let ws: Vec<&BigInt> = self.children[v]
                .iter()
                .filter_map(|&c| self.weight[c].as_ref())
                .collect();
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    if !ws[i].gcd(ws[j]).is_one() {
                        return Err(Error::invalid(format!(
                            "downward weights {} and {} at t{v} are not coprime",
                            ws[i], ws[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// The vertex just below the root.
    pub fn top(&self) -> usize {
        self.children[0][0]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Weight on the edge from `v`'s parent down to `v` (`None` for the
    /// root and for the top vertex).
    pub fn weight(&self, v: usize) -> Option<&BigInt> {
        self.weight[v].as_ref()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels[v].as_deref()
    }

    /// Vertex of the source splice diagram, when there is one.
    pub fn origin(&self, v: usize) -> Option<VertexId> {
        self.origin[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v != 0 && self.children[v].is_empty()
    }

    /// Valency in the unrooted tree.
    pub fn valency(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(v != 0)
    }

    /// Non-root leaves in depth-first (left-to-right) order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if self.is_leaf(v) {
                out.push(v);
            }
            for &c in self.children[v].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Leaves below `v` (inclusive when `v` is a leaf) in left-to-right order.
    pub fn leaves_below(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if self.is_leaf(u) {
                out.push(u);
            }
            for &c in self.children[u].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Product of the downward weights at `v`, skipping child `skip`.
    fn child_weight_product(&self, v: usize, skip: Option<usize>) -> BigInt {
        self.children[v]
            .iter()
            .filter(|&&c| Some(c) != skip)
            .filter_map(|&c| self.weight[c].as_ref())
            .product()
    }

    /// `ℓ_{w'v}`: product of the weights adjacent to the path from the
    /// root to `v`.
    pub fn ell_from_root(&self, v: usize) -> BigInt {
        self.ell_below(0, v)
    }

    /// Product of weights adjacent to the downward path from `a` to its
    /// descendant `b`, excluding the weights at `a` itself.
    pub fn ell_below(&self, a: usize, b: usize) -> BigInt {
        let mut product = self.child_weight_product(b, None);
        let mut cur = b;
        while let Some(p) = self.parent[cur] {
            if p == a {
                return product;
            }
            product *= self.child_weight_product(p, Some(cur));
            cur = p;
        }
        assert_eq!(a, 0, "ell_below called with a non-ancestor");
        product
    }

    /// The subtree hanging below `v` through its child `c`, re-rooted so
    /// that `v` is the root and `v–c` is the (weightless) root edge.
    pub fn branch(&self, v: usize, c: usize) -> RootedWeightedTree {
        debug_assert_eq!(self.parent[c], Some(v));
        let mut tree = RootedWeightedTree::with_root(self.labels[v].clone(), self.origin[v]);
        let top = tree.add_child(0, None, self.labels[c].clone(), self.origin[c]);
        let mut stack = vec![(c, top)];
        while let Some((u, tu)) = stack.pop() {
            let mut pending = Vec::new();
            for &k in &self.children[u] {
                let tk = tree.add_child(tu, self.weight[k].clone(), self.labels[k].clone(), self.origin[k]);
                pending.push((k, tk));
            }
            stack.extend(pending.into_iter().rev());
        }
        tree
    }
}

/// Nested shape used by [`RootedWeightedTree::from_branches`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootedShape(pub Vec<(u64, RootedShape)>);

impl RootedShape {
    pub fn leaf() -> Self {
        RootedShape(Vec::new())
    }
}
