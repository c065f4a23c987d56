//! Splice diagrams ↔ resolution graphs through maximal splice diagrams,
//! with the exact integer linear algebra this needs.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diagram::{ceil_div, SpliceDiagram, Vertex, VertexId};
use crate::error::{Error, Result};

/// Upper limit on Stern–Brocot steps per edge.
const MAX_FAREY_STEPS: u64 = 10_000_000;

/// Dense square matrix of big integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(n: usize) -> Self {
        IntegerMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid("matrix is not square"));
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.n + j] = x;
    }

    pub fn neg(&self) -> Self {
        IntegerMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut out = Self::zeros(k);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by Bareiss fraction-free elimination with row pivoting.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| self.data[i * n..(i + 1) * n].to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    /// Leading principal minors, by Bareiss elimination without pivoting.
    /// Stops early (returning what it has) at the first zero minor.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        let n = self.n;
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|i| self.data[i * n..(i + 1) * n].to_vec()).collect();
        let mut out = Vec::with_capacity(n);
        let mut prev = BigInt::one();
        for k in 0..n {
            out.push(m[k][k].clone());
            if m[k][k].is_zero() {
                break;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        out
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        let minors = self.leading_minors();
        minors.len() == self.n && minors.iter().all(|x| x.is_positive())
    }

    /// Exact inverse over ℚ by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Vec<Vec<BigRational>>> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from_integer(self.get(i, j).clone())).collect())
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::invalid("matrix is singular"))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = &f * &a[col][j];
                    a[r][j] -= x;
                    let y = &f * &inv[col][j];
                    inv[r][j] -= y;
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A plumbing tree of rational curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGraph {
    ids: Vec<String>,
    euler: Vec<BigInt>,
    edges: Vec<[usize; 2]>,
    adjacency: Vec<Vec<usize>>,
}

impl ResolutionGraph {
    pub fn new(ids: Vec<String>, euler: Vec<BigInt>, edges: Vec<[usize; 2]>) -> Result<Self> {
        if ids.len() != euler.len() {
            return Err(Error::invalid("one Euler number per vertex"));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(format!("duplicate vertex id {id}")));
            }
        }
        let n = ids.len();
        let mut adjacency = vec![Vec::new(); n];
        for (k, &[a, b]) in edges.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::invalid(format!("bad edge {k}")));
            }
            if adjacency[a].contains(&b) {
                return Err(Error::invalid(format!("duplicate edge {} {}", ids[a], ids[b])));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(ResolutionGraph {
            ids,
            euler,
            edges,
            adjacency,
        })
    }

    /// Graph with vertices named `0, 1, …`.
    pub fn from_eulers(euler: &[i64], edges: &[[usize; 2]]) -> Result<Self> {
        let ids = (0..euler.len()).map(|i| i.to_string()).collect();
        Self::new(ids, euler.iter().map(|&e| BigInt::from(e)).collect(), edges.to_vec())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn euler(&self, v: usize) -> &BigInt {
        &self.euler[v]
    }

    pub fn eulers(&self) -> &[BigInt] {
        &self.euler
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn valency(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn is_tree(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return true;
        }
        if self.edges.len() + 1 != n {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// `A`: Euler numbers on the diagonal, 1 for adjacent vertices.
    pub fn intersection_matrix(&self) -> IntegerMatrix {
        let n = self.len();
        let mut a = IntegerMatrix::zeros(n);
        for v in 0..n {
            a.set(v, v, self.euler[v].clone());
        }
        for &[x, y] in &self.edges {
            a.set(x, y, BigInt::one());
            a.set(y, x, BigInt::one());
        }
        a
    }

    /// `det(−A)` by Bareiss.
    pub fn det_neg_a(&self) -> BigInt {
        self.intersection_matrix().neg().det()
    }

    pub fn is_negative_definite(&self) -> bool {
        self.intersection_matrix().neg().is_positive_definite()
    }

    /// Tree, `A` negative definite, `det(−A) = 1`.
    pub fn validate(&self) -> Result<()> {
        if !self.is_tree() {
            return Err(Error::invalid("resolution graph is not a tree"));
        }
        if !self.is_negative_definite() {
            return Err(Error::invalid("intersection matrix is not negative definite"));
        }
        let det = self.det_neg_a();
        if !det.is_one() {
            return Err(Error::invalid(format!("det(-A) = {det}, not 1")));
        }
        Ok(())
    }

    /// `det(−A)` of the component of `g − v` containing the neighbour `x`,
    /// for every ordered adjacent pair `(v, x)`.
    pub fn branch_determinants(&self) -> HashMap<(usize, usize), BigInt> {
        let mut memo: HashMap<(usize, usize), BigInt> = HashMap::new();
        // process directed edges in an order where children come first
        for &[a, b] in &self.edges {
            for (v, x) in [(a, b), (b, a)] {
                self.branch_det(v, x, &mut memo);
            }
        }
        memo
    }

    fn branch_det(&self, parent: usize, v: usize, memo: &mut HashMap<(usize, usize), BigInt>) -> BigInt {
        if let Some(d) = memo.get(&(parent, v)) {
            return d.clone();
        }
        // iterative post-order over the branch
        let mut order = Vec::new();
        let mut stack = vec![(parent, v)];
        while let Some((p, u)) = stack.pop() {
            order.push((p, u));
            for &w in &self.adjacency[u] {
                if w != p && !memo.contains_key(&(u, w)) {
                    stack.push((u, w));
                }
            }
        }
        for &(p, u) in order.iter().rev() {
            if memo.contains_key(&(p, u)) {
                continue;
            }
            let kids: Vec<usize> = self.adjacency[u].iter().copied().filter(|&w| w != p).collect();
            let dets: Vec<BigInt> = kids.iter().map(|&c| memo[&(u, c)].clone()).collect();
            // det of each child branch with the child removed
            let minus: Vec<BigInt> = kids
                .iter()
                .map(|&c| {
                    self.adjacency[c]
                        .iter()
                        .filter(|&&g| g != u)
                        .map(|&g| memo[&(c, g)].clone())
                        .product()
                })
                .collect();
            let all: BigInt = dets.iter().product();
            let mut value = -&self.euler[u] * &all;
            for i in 0..kids.len() {
                let others: BigInt = dets
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, d)| d.clone())
                    .product();
                value -= &minus[i] * others;
            }
            memo.insert((p, u), value);
        }
        memo[&(parent, v)].clone()
    }

    /// The maximal splice diagram read off the graph: at every vertex the
    /// weight toward a neighbour is the determinant of the branch there.
    pub fn maximal_diagram(&self) -> MaximalSpliceDiagram {
        let dets = self.branch_determinants();
        let vertices = (0..self.len())
            .map(|v| MaxVertex {
                origin: Some(v),
                leaf: self.valency(v) <= 1,
                label: None,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&[a, b]| MaxEdge {
                ends: [a, b],
                weights: [dets[&(a, b)].clone(), dets[&(b, a)].clone()],
            })
            .collect();
        MaximalSpliceDiagram::new(vertices, edges)
    }

    /// `L = (−A)⁻¹`, taken from the linking numbers of [`Self::maximal_diagram`]
    /// and checked by multiplying out `−A·L`.
    pub fn linking_matrix(&self) -> Result<IntegerMatrix> {
        let l = if self.len() == 1 {
            let e = -&self.euler[0];
            if !e.is_one() {
                return Err(Error::invalid("single vertex graph with det(-A) != 1"));
            }
            IntegerMatrix::identity(1)
        } else {
            self.maximal_diagram().linking_matrix()
        };
        let product = self.intersection_matrix().neg().mul(&l);
        if product != IntegerMatrix::identity(self.len()) {
            return Err(Error::invalid("-A is not inverted by the linking matrix"));
        }
        Ok(l)
    }

    /// Checks `−A·L = I` for `L` built from the maximal diagram.
    pub fn verify_l(&self) -> bool {
        self.linking_matrix().is_ok()
    }

    fn fresh_id(&self) -> String {
        let numeric: Option<Vec<u64>> = self.ids.iter().map(|s| s.parse::<u64>().ok()).collect();
        match numeric {
            Some(nums) => (nums.into_iter().max().map_or(0, |m| m + 1)).to_string(),
            None => {
                let mut k = self.len();
                loop {
                    let id = format!("b{k}");
                    if !self.ids.contains(&id) {
                        return id;
                    }
                    k += 1;
                }
            }
        }
    }

    /// Inserts a (−1)-vertex on edge `e` and lowers both ends by one.
    pub fn blow_up(&self, e: usize) -> Result<ResolutionGraph> {
        let &[a, b] = self
            .edges
            .get(e)
            .ok_or_else(|| Error::invalid(format!("edge {e} out of range")))?;
        let mut ids = self.ids.clone();
        let mut euler = self.euler.clone();
        let mut edges = self.edges.clone();
        let new = ids.len();
        ids.push(self.fresh_id());
        euler.push(BigInt::from(-1));
        euler[a] -= 1;
        euler[b] -= 1;
        edges[e] = [a, new];
        edges.push([new, b]);
        ResolutionGraph::new(ids, euler, edges)
    }

    /// Removes a (−1)-vertex of valency at most 2.
    pub fn blow_down(&self, v: usize) -> Result<ResolutionGraph> {
        if v >= self.len() {
            return Err(Error::invalid(format!("vertex {v} out of range")));
        }
        if self.euler[v] != BigInt::from(-1) {
            return Err(Error::invalid(format!("vertex {} has Euler number {}", self.ids[v], self.euler[v])));
        }
        if self.valency(v) > 2 {
            return Err(Error::invalid(format!("vertex {} has valency {}", self.ids[v], self.valency(v))));
        }
        let nbrs = self.adjacency[v].clone();
        let remap = |x: usize| if x > v { x - 1 } else { x };
        let mut ids = self.ids.clone();
        let mut euler = self.euler.clone();
        for &w in &nbrs {
            euler[w] += 1;
        }
        ids.remove(v);
        euler.remove(v);
        let mut edges = Vec::new();
        let mut joined = false;
        for &[x, y] in &self.edges {
            if x == v || y == v {
                if nbrs.len() == 2 && !joined {
                    edges.push([remap(nbrs[0]), remap(nbrs[1])]);
                    joined = true;
                }
                continue;
            }
            edges.push([remap(x), remap(y)]);
        }
        ResolutionGraph::new(ids, euler, edges)
    }

    /// Blows down (−1)-vertices of valency ≤ 2 until none is left.
    pub fn minimize(&self) -> ResolutionGraph {
        let mut g = self.clone();
        while let Some(v) = (0..g.len()).find(|&v| g.euler[v] == BigInt::from(-1) && g.valency(v) <= 2) {
            g = g.blow_down(v).expect("legal blow-down");
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxVertex {
    /// Vertex of the source diagram or graph; `None` for inserted vertices.
    pub origin: Option<usize>,
    pub leaf: bool,
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxEdge {
    pub ends: [usize; 2],
    pub weights: [BigInt; 2],
}

/// Splice diagram with a weight at both ends of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalSpliceDiagram {
    vertices: Vec<MaxVertex>,
    edges: Vec<MaxEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl MaximalSpliceDiagram {
    pub fn new(vertices: Vec<MaxVertex>, edges: Vec<MaxEdge>) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            adjacency[e.ends[0]].push(k);
            adjacency[e.ends[1]].push(k);
        }
        MaximalSpliceDiagram {
            vertices,
            edges,
            adjacency,
        }
    }

    pub fn vertices(&self) -> &[MaxVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[MaxEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn other(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn weight_at(&self, e: usize, v: usize) -> &BigInt {
        let edge = &self.edges[e];
        if edge.ends[0] == v {
            &edge.weights[0]
        } else {
            &edge.weights[1]
        }
    }

    pub fn weight_product(&self, v: usize) -> BigInt {
        self.adjacency[v].iter().map(|&e| self.weight_at(e, v).clone()).product()
    }

    fn weight_product_except(&self, v: usize, skip: usize) -> BigInt {
        self.adjacency[v]
            .iter()
            .filter(|&&e| e != skip)
            .map(|&e| self.weight_at(e, v).clone())
            .product()
    }

    pub fn edge_determinant(&self, e: usize) -> BigInt {
        let [a, b] = self.edges[e].ends;
        let [wa, wb] = &self.edges[e].weights;
        wa * wb - self.weight_product_except(a, e) * self.weight_product_except(b, e)
    }

    /// `ℓ_vw` for all `w`, diagonal `ℓ_vv` = product of the weights at `v`.
    pub fn linking_row(&self, v: usize) -> Vec<BigInt> {
        let n = self.len();
        let mut row: Vec<Option<BigInt>> = vec![None; n];
        row[v] = Some(self.weight_product(v));
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let here = row[u].clone().expect("visited");
            for &e in &self.adjacency[u] {
                let x = self.other(e, u);
                if row[x].is_some() {
                    continue;
                }
                let value = &here / self.weight_at(e, u) * self.weight_product(x) / self.weight_at(e, x);
                row[x] = Some(value);
                stack.push(x);
            }
        }
        row.into_iter().map(|x| x.expect("connected")).collect()
    }

    pub fn linking_matrix(&self) -> IntegerMatrix {
        let n = self.len();
        let mut l = IntegerMatrix::zeros(n);
        for v in 0..n {
            for (w, x) in self.linking_row(v).into_iter().enumerate() {
                l.set(v, w, x);
            }
        }
        l
    }

    /// `e_v = −(1/ℓ_{vw'}) Σ_{w adjacent to v} ℓ_{ww'}` for every choice of
    /// `w'` adjacent to `v`. Returns one value per vertex, failing if some
    /// choice is non-integral or the choices disagree.
    pub fn euler_numbers(&self) -> Result<Vec<BigInt>> {
        let n = self.len();
        let l = self.linking_matrix();
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let nbrs: Vec<usize> = self.adjacency[v].iter().map(|&e| self.other(e, v)).collect();
            if nbrs.is_empty() {
                return Err(Error::internal("isolated vertex in maximal diagram"));
            }
            let mut value: Option<BigInt> = None;
            for &wp in &nbrs {
                let num: BigInt = nbrs.iter().map(|&w| l.get(w, wp).clone()).sum();
                let den = l.get(v, wp);
                let (q, r) = num.div_rem(den);
                if !r.is_zero() {
                    return Err(Error::internal(format!("e_v at vertex {v} is not an integer")));
                }
                let e = -q;
                match &value {
                    None => value = Some(e),
                    Some(prev) if *prev != e => {
                        return Err(Error::internal(format!(
                            "e_v at vertex {v} depends on the neighbour chosen ({prev} vs {e})"
                        )))
                    }
                    _ => {}
                }
            }
            out.push(value.expect("neighbour"));
        }
        Ok(out)
    }
}

/// The Farey string from `(a, b)` to `(c, d)`: all Stern–Brocot ancestors
/// of either endpoint whose slope lies between them, in slope order.
pub fn farey_string(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    for x in [a, b, c, d] {
        if !x.is_positive() {
            return Err(Error::invalid("Farey endpoints must be positive"));
        }
    }
    if !a.gcd(b).is_one() || !c.gcd(d).is_one() {
        return Err(Error::invalid("Farey endpoints must be reduced"));
    }
    if !(b * c - a * d).is_positive() {
        return Err(Error::invalid(format!("{a}/{b} is not below {c}/{d}")));
    }
    let mut points = vec![(a.clone(), b.clone()), (c.clone(), d.clone())];
    for (x, y) in [(a, b), (c, d)] {
        for (p, q) in stern_brocot_path(x, y)? {
            // a/b ≤ p/q ≤ c/d
            if &p * b >= a * &q && &p * d <= c * &q {
                points.push((p, q));
            }
        }
    }
    points.sort_by(|(p1, q1), (p2, q2)| (p1 * q2).cmp(&(p2 * q1)));
    points.dedup();
    for w in points.windows(2) {
        let (x0, y0) = &w[0];
        let (x1, y1) = &w[1];
        if !(y0 * x1 - x0 * y1).is_one() {
            return Err(Error::internal(format!(
                "Farey string step {x0}/{y0} to {x1}/{y1} has determinant != 1"
            )));
        }
    }
    Ok(points)
}

/// Stern–Brocot ancestors of `x/y`, root first, excluding `x/y` itself.
fn stern_brocot_path(x: &BigInt, y: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    let (mut lp, mut lq) = (BigInt::zero(), BigInt::one());
    let (mut rp, mut rq) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    let mut steps = 0u64;
    loop {
        let mp = &lp + &rp;
        let mq = &lq + &rq;
        let cmp = (x * &mq).cmp(&(&mp * y));
        if cmp == std::cmp::Ordering::Equal {
            return Ok(out);
        }
        out.push((mp.clone(), mq.clone()));
        if cmp == std::cmp::Ordering::Less {
            rp = mp;
            rq = mq;
        } else {
            lp = mp;
            lq = mq;
        }
        steps += 1;
        if steps > MAX_FAREY_STEPS {
            return Err(Error::Bound(format!("Stern-Brocot descent to {x}/{y} is too long")));
        }
    }
}

/// The maximal splice diagram of a minimal diagram.
pub fn maximal(d: &SpliceDiagram) -> Result<MaximalSpliceDiagram> {
    d.ensure_valid(true)?;
    build_maximal(d)
}

/// As [`maximal`], but also accepts weight-1 leaf edges. Such a leaf needs
/// no chain at all (its target pair equals the node's own pair), so it is
/// dropped and the node absorbs it.
pub fn maximal_lenient(d: &SpliceDiagram) -> Result<MaximalSpliceDiagram> {
    d.ensure_valid(false)?;
    build_maximal(d)
}

fn build_maximal(d: &SpliceDiagram) -> Result<MaximalSpliceDiagram> {
    let mut vertices = Vec::new();
    let mut map = vec![usize::MAX; d.vertex_count()];
    let absorbed = |v: VertexId| -> bool {
        d.is_leaf(v)
            && d.neighbors(v)
                .next()
                .is_some_and(|(e, n)| d.edge(e).weight_at(n).is_some_and(|w| w.is_one()))
    };
    for v in 0..d.vertex_count() {
        if absorbed(v) {
            continue;
        }
        map[v] = vertices.len();
        vertices.push(MaxVertex {
            origin: Some(v),
            leaf: d.is_leaf(v),
            label: d.vertex(v).label.clone(),
        });
    }
    let mut edges = Vec::new();
    for (k, edge) in d.edges().iter().enumerate() {
        let [u, v] = edge.ends;
        let (u, v) = if d.is_node(u) { (u, v) } else { (v, u) };
        if absorbed(v) {
            continue;
        }
        let a = d.weight_product_except(u, k);
        let b = d.weight(u, k)?.clone();
        let (c, dd) = if d.is_node(v) {
            (d.weight(v, k)?.clone(), d.weight_product_except(v, k))
        } else {
            (ceil_div(&a, &b), BigInt::one())
        };
        let chain = farey_string(&a, &b, &c, &dd)?;
        let mut prev = map[u];
        for (i, window) in chain.windows(2).enumerate() {
            let (_, y0) = &window[0];
            let (x1, _) = &window[1];
            let last = i + 2 == chain.len();
            let next = if last {
                map[v]
            } else {
                vertices.push(MaxVertex {
                    origin: None,
                    leaf: false,
                    label: None,
                });
                vertices.len() - 1
            };
            edges.push(MaxEdge {
                ends: [prev, next],
                weights: [y0.clone(), x1.clone()],
            });
            prev = next;
        }
    }
    let m = MaximalSpliceDiagram::new(vertices, edges);
    for e in 0..m.edges().len() {
        if !m.edge_determinant(e).is_one() {
            return Err(Error::internal(format!("maximal diagram edge {e} has determinant != 1")));
        }
    }
    Ok(m)
}

/// The resolution graph of a minimal splice diagram.
pub fn to_resolution(d: &SpliceDiagram) -> Result<ResolutionGraph> {
    resolution_from_maximal(&maximal(d)?)
}

/// As [`to_resolution`], also accepting weight-1 leaf edges.
pub fn to_resolution_lenient(d: &SpliceDiagram) -> Result<ResolutionGraph> {
    resolution_from_maximal(&maximal_lenient(d)?)
}

/// Resolution graph together with the source diagram vertex of each
/// resolution vertex (`None` for vertices on inserted strings).
pub fn to_resolution_traced(d: &SpliceDiagram, strict: bool) -> Result<(ResolutionGraph, Vec<Option<VertexId>>)> {
    let m = if strict { maximal(d)? } else { maximal_lenient(d)? };
    let origins = m.vertices().iter().map(|v| v.origin).collect();
    Ok((resolution_from_maximal(&m)?, origins))
}

fn resolution_from_maximal(m: &MaximalSpliceDiagram) -> Result<ResolutionGraph> {
    let euler = m.euler_numbers()?;
    let ids = (0..m.len()).map(|i| i.to_string()).collect();
    let edges = m.edges().iter().map(|e| e.ends).collect();
    let g = ResolutionGraph::new(ids, euler, edges)?;
    g.validate()
        .map_err(|e| Error::internal(format!("converted graph fails its invariants: {e}")))?;
    let product = g.intersection_matrix().neg().mul(&m.linking_matrix());
    if product != IntegerMatrix::identity(g.len()) {
        return Err(Error::internal("-A times L is not the identity"));
    }
    Ok(g)
}

/// The splice diagram of a resolution graph. (−1)-vertices of valency ≤ 2
/// are blown down first. A graph with no vertex of valency ≥ 3 is a
/// plumbing of `S³` and yields the empty diagram.
pub fn to_splice(g: &ResolutionGraph) -> Result<SpliceDiagram> {
    let g = g.minimize();
    if g.is_empty() {
        return Ok(SpliceDiagram::empty());
    }
    g.validate()?;
    let nodes: Vec<usize> = (0..g.len()).filter(|&v| g.valency(v) >= 3).collect();
    if nodes.is_empty() {
        return Ok(SpliceDiagram::empty());
    }
    let dets = g.branch_determinants();
    let mut map = vec![usize::MAX; g.len()];
    let mut vertices = Vec::new();
    for v in 0..g.len() {
        if g.valency(v) >= 3 {
            map[v] = vertices.len();
            vertices.push(Vertex::node());
        } else if g.valency(v) == 1 {
            map[v] = vertices.len();
            vertices.push(Vertex::leaf());
        }
    }
    let mut edges = Vec::new();
    for &v in &nodes {
        for &first in g.neighbors(v) {
            // walk along the string to the next node or leaf
            let mut prev = v;
            let mut cur = first;
            while g.valency(cur) == 2 {
                let next = *g.neighbors(cur).iter().find(|&&w| w != prev).expect("string");
                prev = cur;
                cur = next;
            }
            let end = cur;
            let near = dets[&(v, first)].clone();
            if g.valency(end) >= 3 {
                if end < v {
                    continue;
                }
                let far = dets[&(end, prev)].clone();
                edges.push(crate::diagram::Edge::new(map[v], Some(near), map[end], Some(far)));
            } else {
                edges.push(crate::diagram::Edge::new(map[v], Some(near), map[end], None));
            }
        }
    }
    let d = SpliceDiagram::new(vertices, edges)?;
    let report = d.validate(false);
    if !report.is_valid() {
        return Err(Error::invalid(format!("resulting splice diagram is invalid: {report}")));
    }
    Ok(d)
}
