//! Splice-type equations, monomial curves and plane curves.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::diagram::{Edge, EdgeId, RootedWeightedTree, SpliceDiagram, Vertex, VertexId};
use crate::error::{Error, Result};
use crate::semigroup::{
    all_representations, lex_min_representation, require_semigroup_condition, rooted_condition,
    rooted_generators, to_u64, Monomial,
};

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Sparse polynomial with rational coefficients over a fixed number of
/// variables. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u64>, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::monomial(nvars, c, vec![0; nvars])
    }

    pub fn monomial(nvars: usize, c: BigRational, exps: Vec<u64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(c, exps);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(nvars, BigRational::one(), exps)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u64]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, c: BigRational, exps: Vec<u64>) {
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(c.clone(), e.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(x * c, e.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(c1 * c2, e);
            }
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Self::constant(self.nvars, BigRational::one());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Highest exponent of variable `i` (`None` for the zero polynomial).
    pub fn degree_in(&self, i: usize) -> Option<u64> {
        self.terms.keys().map(|e| e[i]).max()
    }
}

/// `Σ c·x^a·y^b`, printed with terms in decreasing `(a, b)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePolynomial(pub Polynomial);

impl BivariatePolynomial {
    pub fn terms(&self) -> Vec<(BigRational, u64, u64)> {
        let mut out: Vec<(BigRational, u64, u64)> =
            self.0.terms().map(|(e, c)| (c.clone(), e[0], e[1])).collect();
        out.sort_by(|a, b| (b.1, b.2).cmp(&(a.1, a.2)));
        out
    }

    pub fn y_degree(&self) -> u64 {
        self.0.degree_in(1).unwrap_or(0)
    }

    /// `f(x, 0)` as a list of `(coefficient, x-exponent)`.
    pub fn restrict_y_zero(&self) -> Vec<(BigRational, u64)> {
        self.terms()
            .into_iter()
            .filter(|t| t.2 == 0)
            .map(|(c, a, _)| (c, a))
            .collect()
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, first: bool, c: &BigRational, factors: &str) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    if factors.is_empty() {
        return write!(f, "{mag}");
    }
    if !mag.is_one() {
        write!(f, "{mag}*")?;
    }
    write!(f, "{factors}")
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, a, b)) in terms.iter().enumerate() {
            let mut parts = Vec::new();
            for (name, e) in [("x", a), ("y", b)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            write_term(f, i == 0, c, &parts.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: BigRational,
    pub exps: Vec<u64>,
}

/// `Σ terms = 0`, attached to the node that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub node: Option<VertexId>,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialSystem {
    pub variables: Vec<String>,
    /// Leaf of the source diagram or tree for each variable.
    pub leaves: Vec<VertexId>,
    pub equations: Vec<Equation>,
    /// Coefficient matrix `(a_ie)` of each node, in equation order.
    pub coefficient_matrices: Vec<(VertexId, Vec<Vec<BigRational>>)>,
}

impl PolynomialSystem {
    pub fn equations_at(&self, v: VertexId) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(move |e| e.node == Some(v))
    }
}

impl fmt::Display for PolynomialSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            for (i, t) in eq.terms.iter().enumerate() {
                let factors = Monomial(t.exps.clone());
                let text = if factors.is_one() {
                    String::new()
                } else {
                    let mut parts = Vec::new();
                    for (k, &a) in t.exps.iter().enumerate() {
                        match a {
                            0 => {}
                            1 => parts.push(self.variables[k].clone()),
                            _ => parts.push(format!("{}^{}", self.variables[k], a)),
                        }
                    }
                    parts.join("*")
                };
                write_term(f, i == 0, &t.coeff, &text)?;
            }
            writeln!(f, " = 0")?;
        }
        Ok(())
    }
}

fn leaf_variables(d: &SpliceDiagram) -> (Vec<VertexId>, Vec<String>) {
    let leaves = d.leaves();
    let names = (1..=leaves.len()).map(|i| format!("z{i}")).collect();
    (leaves, names)
}

/// Admissible monomials for `(v, e)`: exponent vectors over all leaves,
/// supported on `Δ_ve`, with `Σ α_w ℓ'_vw = d_ve`, in increasing
/// lexicographic order (at most `limit`).
pub fn admissible_monomials(d: &SpliceDiagram, v: VertexId, e: EdgeId, limit: usize) -> Result<Vec<Monomial>> {
    if !d.is_node(v) || !d.edge(e).touches(v) {
        return Err(Error::invalid(format!("e{e} is not an edge at node v{v}")));
    }
    let (all_leaves, _) = leaf_variables(d);
    let beyond = d.leaves_beyond(v, e);
    let gens: Vec<u64> = beyond
        .iter()
        .map(|&w| to_u64(&d.linking_number(v, w, true)?, "generator"))
        .collect::<Result<_>>()?;
    let target = to_u64(d.weight(v, e)?, "weight")?;
    let reps = all_representations(target, &gens, limit)?;
    if reps.is_empty() {
        return Err(Error::SemigroupCondition {
            location: format!("node v{v} edge e{e}"),
            detail: format!("{target} is not in the semigroup generated by {gens:?}"),
        });
    }
    Ok(reps
        .into_iter()
        .map(|rep| {
            let mut exps = vec![0u64; all_leaves.len()];
            for (w, a) in beyond.iter().zip(rep) {
                let k = all_leaves.iter().position(|x| x == w).expect("leaf");
                exps[k] = a;
            }
            Monomial(exps)
        })
        .collect())
}

/// Edges at each node with the edge toward the root (first node) last.
fn ordered_edges(d: &SpliceDiagram) -> Vec<(VertexId, Vec<EdgeId>)> {
    let nodes = d.nodes();
    let Some(&root) = nodes.first() else {
        return Vec::new();
    };
    let mut parent_edge = vec![None; d.vertex_count()];
    let mut seen = vec![false; d.vertex_count()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for (e, w) in d.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    nodes
        .into_iter()
        .map(|v| {
            let mut edges: Vec<EdgeId> = d
                .incident(v)
                .iter()
                .copied()
                .filter(|&e| Some(e) != parent_edge[v])
                .collect();
            if let Some(p) = parent_edge[v] {
                edges.push(p);
            }
            (v, edges)
        })
        .collect()
}

/// Coefficients `[I | a | b]` with `a_i = 1`, `b_i = i`.
pub fn default_coefficients(valency: usize) -> Vec<Vec<BigRational>> {
    let r = valency.saturating_sub(2);
    (0..r)
        .map(|i| {
            let mut row = vec![BigRational::zero(); valency];
            row[i] = BigRational::one();
            row[valency - 2] = BigRational::one();
            row[valency - 1] = rat(i as i64 + 1);
            row
        })
        .collect()
}

/// Strict splice-type system: at every node `v`, `δ_v − 2` equations
/// `Σ_e a_ie M_ve = 0` over the lexicographically least admissible
/// monomials.
pub fn splice_system(d: &SpliceDiagram) -> Result<PolynomialSystem> {
    d.ensure_valid(false)?;
    require_semigroup_condition(d)?;
    let (leaves, variables) = leaf_variables(d);
    let mut equations = Vec::new();
    let mut coefficient_matrices = Vec::new();
    for (v, edges) in ordered_edges(d) {
        let monomials: Vec<Monomial> = edges
            .iter()
            .map(|&e| {
                admissible_monomials(d, v, e, 1).map(|mut m| m.remove(0))
            })
            .collect::<Result<_>>()?;
        let coeffs = default_coefficients(edges.len());
        for row in &coeffs {
            let terms = row
                .iter()
                .zip(&monomials)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, m)| Term {
                    coeff: c.clone(),
                    exps: m.0.clone(),
                })
                .collect();
            equations.push(Equation { node: Some(v), terms });
        }
        coefficient_matrices.push((v, coeffs));
    }
    Ok(PolynomialSystem {
        variables,
        leaves,
        equations,
        coefficient_matrices,
    })
}

fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for j in col..n {
                let x = &f * &m[col][j];
                m[r][j] -= x;
            }
        }
    }
    det
}

/// True when every maximal minor of a `(δ−2) × δ` matrix is nonzero.
pub fn check_generic(matrix: &[Vec<BigRational>]) -> Result<bool> {
    let r = matrix.len();
    let cols = r + 2;
    if matrix.iter().any(|row| row.len() != cols) {
        return Err(Error::invalid(format!("expected a {r} x {cols} matrix")));
    }
    if r == 0 {
        return Ok(true);
    }
    let mut chosen: Vec<usize> = (0..r).collect();
    loop {
        let sub: Vec<Vec<BigRational>> = matrix
            .iter()
            .map(|row| chosen.iter().map(|&j| row[j].clone()).collect())
            .collect();
        if rational_det(sub).is_zero() {
            return Ok(false);
        }
        // next r-combination of 0..cols
        let mut i = r;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            if chosen[i] < cols - r + i {
                chosen[i] += 1;
                for j in i + 1..r {
                    chosen[j] = chosen[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Result of [`weight_check`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightReport {
    /// `weights[k][i][t]`: weight w.r.t. the `k`-th node of term `t` of
    /// equation `i`.
    pub weights: Vec<(VertexId, Vec<Vec<BigInt>>)>,
    pub violations: Vec<String>,
}

impl WeightReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `v`-weights: equations at `v` are homogeneous of weight `d_v`;
/// equations at `v' ≠ v` have least `v`-weight `ℓ_vv'`.
pub fn weight_check(sys: &PolynomialSystem, d: &SpliceDiagram) -> Result<WeightReport> {
    let mut report = WeightReport::default();
    for v in d.nodes() {
        let lw: Vec<BigInt> = sys
            .leaves
            .iter()
            .map(|&w| d.linking_number(v, w, false))
            .collect::<Result<_>>()?;
        let mut per_eq = Vec::new();
        for (i, eq) in sys.equations.iter().enumerate() {
            let ws: Vec<BigInt> = eq.terms.iter().map(|t| Monomial(t.exps.clone()).degree_under(&lw)).collect();
            match eq.node {
                Some(u) if u == v => {
                    let dv = d.weight_product(v);
                    if ws.iter().any(|w| *w != dv) {
                        report
                            .violations
                            .push(format!("equation {} is not homogeneous of v{v}-weight {dv}", i + 1));
                    }
                }
                Some(u) => {
                    let expect = d.linking_number(v, u, false)?;
                    let least = ws.iter().min().cloned().unwrap_or_default();
                    if least != expect {
                        report.violations.push(format!(
                            "equation {} has least v{v}-weight {least}, expected {expect}",
                            i + 1
                        ));
                    }
                }
                None => {}
            }
            per_eq.push(ws);
        }
        report.weights.push((v, per_eq));
    }
    Ok(report)
}

/// Rooted monomial-curve system: at every vertex with downward edges
/// `e₁…eₙ`, the equations `M_{e₁} − M_{eⱼ} = 0`.
pub fn monomial_curve_system(t: &RootedWeightedTree) -> Result<PolynomialSystem> {
    rooted_condition(t)?;
    let leaves = t.leaves();
    let variables = (1..=leaves.len()).map(|i| format!("z{i}")).collect();
    let mut equations = Vec::new();
    for v in 1..t.len() {
        let kids = t.children(v);
        if kids.len() < 2 {
            continue;
        }
        let mut monos = Vec::new();
        for &c in kids {
            let below = t.leaves_below(c);
            let gens: Vec<u64> = below
                .iter()
                .map(|&w| to_u64(&t.ell_below(v, w), "generator"))
                .collect::<Result<_>>()?;
            let p = to_u64(t.weight(c).expect("weight"), "weight")?;
            let rep = lex_min_representation(p, &gens)?
                .ok_or_else(|| Error::internal("condition holds but weight not representable"))?;
            let mut exps = vec![0u64; leaves.len()];
            for (w, a) in below.iter().zip(rep) {
                exps[leaves.iter().position(|x| x == w).expect("leaf")] = a;
            }
            monos.push(exps);
        }
        for m in &monos[1..] {
            equations.push(Equation {
                node: Some(v),
                terms: vec![
                    Term {
                        coeff: BigRational::one(),
                        exps: monos[0].clone(),
                    },
                    Term {
                        coeff: -BigRational::one(),
                        exps: m.clone(),
                    },
                ],
            });
        }
    }
    Ok(PolynomialSystem {
        variables,
        leaves,
        equations,
        coefficient_matrices: Vec::new(),
    })
}

/// Substitutes `z_w ↦ t^{g_w}` and reports whether every equation becomes
/// the zero polynomial in `t`.
pub fn vanishes_on_curve(sys: &PolynomialSystem, gens: &[BigInt]) -> bool {
    sys.equations.iter().all(|eq| {
        let mut acc: BTreeMap<BigInt, BigRational> = BTreeMap::new();
        for t in &eq.terms {
            let deg = Monomial(t.exps.clone()).degree_under(gens);
            *acc.entry(deg).or_insert_with(BigRational::zero) += &t.coeff;
        }
        acc.values().all(|c| c.is_zero())
    })
}

/// The monomial-curve system of `t` vanishes under `z_w ↦ t^{ℓ_{w'w}}`.
pub fn verify_monomial_curve(t: &RootedWeightedTree) -> Result<bool> {
    let sys = monomial_curve_system(t)?;
    Ok(vanishes_on_curve(&sys, &rooted_generators(t)))
}

/// Characteristic pairs `(p_i, q_i)` of an irreducible plane curve, with an
/// optional cover degree `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPairs {
    pub pairs: Vec<(u64, u64)>,
    pub n: Option<u64>,
}

impl CharPairs {
    pub fn new(pairs: Vec<(u64, u64)>, n: Option<u64>) -> Result<Self> {
        let cp = CharPairs { pairs, n };
        cp.check()?;
        Ok(cp)
    }

    pub fn check(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::invalid("need at least one pair"));
        }
        for (i, &(p, q)) in self.pairs.iter().enumerate() {
            if p == 0 || q == 0 {
                return Err(Error::invalid("pairs must be positive"));
            }
            if p.gcd(&q) != 1 {
                return Err(Error::invalid(format!("pair ({p},{q}) is not coprime")));
            }
            if i > 0 {
                let (pp, pq) = self.pairs[i - 1];
                if BigInt::from(p) <= BigInt::from(q) * pq * pp {
                    return Err(Error::invalid(format!(
                        "edge determinant condition fails: {p} <= {q}*{pq}*{pp}"
                    )));
                }
            }
            if let Some(n) = self.n {
                if n == 0 || n.gcd(&p) != 1 || n.gcd(&q) != 1 {
                    return Err(Error::invalid(format!("n = {n} is not coprime to ({p},{q})")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// `f_k(x, y)` by substitution: `f₁ = x^{p₁} + y^{q₁}`,
/// `f_j = a_j f_{j−1}^{q_j} + g_j` where `g_j` is the lexicographically
/// least admissible monomial in `x, y, f₁, …, f_{j−2}`. `coefficients`
/// gives `a₂…a_k` (all 1 when omitted).
pub fn plane_curve(cp: &CharPairs, coefficients: Option<&[BigRational]>) -> Result<BivariatePolynomial> {
    cp.check()?;
    let k = cp.len();
    if let Some(c) = coefficients {
        if c.len() + 1 != k {
            return Err(Error::invalid(format!("expected {} coefficients", k - 1)));
        }
    }
    let (p1, q1) = cp.pairs[0];
    let x = Polynomial::var(2, 0);
    let y = Polynomial::var(2, 1);
    // fs[i] is f_i, with fs[0] unused
    let mut fs: Vec<Polynomial> = vec![Polynomial::zero(2), x.pow(p1).add(&y.pow(q1))];
    for j in 2..=k {
        let (pj, qj) = cp.pairs[j - 1];
        // weights of z_0..z_{j-1}
        let tail = |from: usize| -> u64 { (from..j).map(|i| cp.pairs[i - 1].1).product() };
        let mut weights = vec![tail(1)];
        for i in 1..j {
            weights.push(cp.pairs[i - 1].0 * tail(i + 1));
        }
        let alpha = lex_min_representation(pj, &weights)?.ok_or_else(|| Error::SemigroupCondition {
            location: format!("pair {j}"),
            detail: format!("{pj} is not in the semigroup generated by {weights:?}"),
        })?;
        let mut g = x.pow(alpha[0]).mul(&y.pow(alpha[1]));
        for (i, &a) in alpha.iter().enumerate().skip(2) {
            if a > 0 {
                g = g.mul(&fs[i - 1].pow(a));
            }
        }
        let a = coefficients.map(|c| c[j - 2].clone()).unwrap_or_else(BigRational::one);
        let fj = fs[j - 1].pow(qj).scale(&a).add(&g);
        fs.push(fj);
    }
    Ok(BivariatePolynomial(fs.pop().expect("f_k")))
}

/// The chain diagram of the pairs with weight 1 toward the right (a
/// non-minimal diagram): leaves `x`, `y`, `z2`, …, `zk` and `z` at the end.
pub fn chain_diagram(cp: &CharPairs) -> Result<SpliceDiagram> {
    cp.check()?;
    let k = cp.len();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut prev_node: Option<usize> = None;
    for (j, &(p, q)) in cp.pairs.iter().enumerate() {
        let node = vertices.len();
        vertices.push(Vertex::node());
        match prev_node {
            None => {
                vertices.push(Vertex::leaf().with_label("x"));
                edges.push(Edge::new(node, Some(BigInt::from(p)), node + 1, None));
            }
            Some(prev) => edges.push(Edge::new(prev, Some(BigInt::one()), node, Some(BigInt::from(p)))),
        }
        let down = vertices.len();
        let name = if j == 0 { "y".to_string() } else { format!("z{}", j + 1) };
        vertices.push(Vertex::leaf().with_label(name));
        edges.push(Edge::new(node, Some(BigInt::from(q)), down, None));
        prev_node = Some(node);
        if j + 1 == k {
            let end = vertices.len();
            vertices.push(Vertex::leaf().with_label("z"));
            edges.push(Edge::new(node, Some(BigInt::one()), end, None));
        }
    }
    SpliceDiagram::new(vertices, edges)
}

/// The splice diagram of `zⁿ = f(x, y)`: the chain diagram twisted by `n`
/// at its rightmost leaf.
pub fn cover_diagram(cp: &CharPairs) -> Result<SpliceDiagram> {
    let n = cp.n.ok_or_else(|| Error::invalid("cover degree n is required"))?;
    let chain = chain_diagram(cp)?;
    let z = chain.find_leaf("z").expect("z leaf");
    let d = chain.twist(z, &BigInt::from(n))?;
    d.ensure_valid(false)?;
    Ok(d)
}

/// Generators `q₁…q_j, p₁q₂…q_j, …, p_{j−1}q_j, p_j` of `S_j`.
pub fn chain_semigroup_generators(cp: &CharPairs, j: usize) -> Vec<BigInt> {
    let tail = |from: usize| -> BigInt { (from..=j).map(|i| BigInt::from(cp.pairs[i - 1].1)).product() };
    let mut out = vec![tail(1)];
    for i in 1..=j {
        out.push(BigInt::from(cp.pairs[i - 1].0) * tail(i + 1));
    }
    out
}

/// `μ_j = q_j(μ_{j−1} − 1) − p_j + p_j q_j + 1`, `μ₀ = 0`, for `j = 1..k`.
pub fn chain_conductors(cp: &CharPairs) -> Vec<BigInt> {
    let mut mu = BigInt::zero();
    let mut out = Vec::new();
    for &(p, q) in &cp.pairs {
        let (p, q) = (BigInt::from(p), BigInt::from(q));
        mu = &q * (&mu - 1) - &p + &p * &q + 1;
        out.push(mu.clone());
    }
    out
}
