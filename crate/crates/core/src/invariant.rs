//! Canonical divisor, Chern numbers, geometric genus and the Casson
//! invariant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::convert::{to_resolution_lenient, to_resolution_traced, ResolutionGraph};
use crate::diagram::{EdgeId, SpliceDiagram, VertexId};
use crate::error::{Error, Result};
use crate::semigroup::{mu_rooted, rooted_generators, semigroup_condition, NumericSemigroup};

/// Default cap on the Brieskorn lattice box.
pub const DEFAULT_BOUND: u64 = 100_000_000;

fn integral(x: &BigRational, what: &str) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::internal(format!("{what} = {x} is not an integer")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalData {
    pub chi: Vec<BigInt>,
    pub k: Vec<BigInt>,
    /// Coefficients of `K = Σ (−k_i − 1) E_i`.
    pub kappa: Vec<BigInt>,
    pub c1sq: BigInt,
    pub c2: BigInt,
    pub c: BigInt,
}

pub fn canonical_data(g: &ResolutionGraph) -> Result<CanonicalData> {
    g.validate()?;
    let n = g.len();
    let a = g.intersection_matrix();
    let l = a.neg().inverse()?;
    let chi: Vec<BigInt> = (0..n).map(|i| BigInt::from(2 - g.valency(i) as i64)).collect();
    let k: Vec<BigInt> = (0..n)
        .map(|i| {
            let s: BigRational = (0..n).map(|j| &l[i][j] * BigRational::from_integer(chi[j].clone())).sum();
            integral(&-s, "k")
        })
        .collect::<Result<_>>()?;
    let kappa: Vec<BigInt> = k.iter().map(|x| -x - 1).collect();

    // adjunction: K·E_i = −2 − E_i·E_i
    for i in 0..n {
        let ke: BigInt = (0..n).map(|j| a.get(i, j) * &kappa[j]).sum();
        if ke != -BigInt::from(2) - a.get(i, i) {
            return Err(Error::internal(format!("adjunction fails at vertex {}", g.ids()[i])));
        }
    }
    let direct: BigInt = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| &kappa[i] * a.get(i, j) * &kappa[j])
        .sum();

    let c2 = BigInt::from(n + 1);
    let euler_char = BigInt::from(2 * n) - BigInt::from(g.edges().len());
    if euler_char != c2 {
        return Err(Error::internal("c2 disagrees with the Euler characteristic of the curve"));
    }
    let mut quad = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            quad += &l[i][j] * BigRational::from_integer(&chi[i] * &chi[j]);
        }
    }
    let euler_sum: BigInt = g.eulers().iter().sum();
    let closed = integral(&-quad, "closed c1^2")? + BigInt::from(2) * &c2 + euler_sum;
    if closed != direct {
        return Err(Error::internal(format!("c1^2: quadratic form {direct} != closed formula {closed}")));
    }
    let c = &direct + &c2 - 1;
    Ok(CanonicalData {
        chi,
        k,
        kappa,
        c1sq: direct,
        c2,
        c,
    })
}

/// `C(Δ)` through a fresh resolution conversion.
pub fn c_of_diagram(d: &SpliceDiagram) -> Result<BigInt> {
    Ok(canonical_data(&to_resolution_lenient(d)?)?.c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KvReport {
    pub node: VertexId,
    /// `Σ_{nodes u} ℓ_vu (δ_u − 2) − Σ_{leaves w} ℓ_vw`.
    pub splice: BigInt,
    /// `d_ve (C^L − 1) + (d_v / d_ve)(C^R − 1)` for every edge `e` at `v`;
    /// empty when the semigroup condition fails.
    pub by_edge: Vec<(EdgeId, BigInt)>,
    pub skipped: Option<String>,
}

pub fn k_v_splice(d: &SpliceDiagram, v: VertexId) -> Result<KvReport> {
    d.ensure_valid(false)?;
    if v >= d.vertex_count() || !d.is_node(v) {
        return Err(Error::invalid(format!("v{v} is not a node")));
    }
    let mut splice = BigInt::zero();
    for u in 0..d.vertex_count() {
        let l = d.linking_number(v, u, false)?;
        splice += l * BigInt::from(d.valency(u) as i64 - 2);
    }
    let mut report = KvReport {
        node: v,
        splice,
        by_edge: Vec::new(),
        skipped: None,
    };
    let condition = semigroup_condition(d)?;
    if let Some(bad) = condition.first_failure() {
        report.skipped = Some(format!(
            "semigroup condition fails at node v{} edge e{}",
            bad.node, bad.edge
        ));
        return Ok(report);
    }
    let dv = d.weight_product(v);
    for &e in d.incident(v) {
        let dve = d.weight(v, e)?.clone();
        let (near, far) = if d.is_node_node_edge(e) {
            let cut = d.cut(e)?;
            if d.edge(e).ends[0] == v {
                (mu_rooted(&cut.left_rooted), mu_rooted(&cut.right_rooted))
            } else {
                (mu_rooted(&cut.right_rooted), mu_rooted(&cut.left_rooted))
            }
        } else {
            let w = d.edge(e).other(v);
            (mu_rooted(&d.root_at_leaf(w)?), BigInt::zero())
        };
        let value = &dve * (near - 1) + (&dv / &dve) * (far - 1);
        if value != report.splice {
            return Err(Error::internal(format!(
                "k_v at v{v}: splice formula {} != conductor formula {value} at e{e}",
                report.splice
            )));
        }
        report.by_edge.push((e, value));
    }
    Ok(report)
}

fn pairwise_coprime(ps: &[u64]) -> bool {
    ps.iter()
        .enumerate()
        .all(|(i, a)| ps[i + 1..].iter().all(|b| a.gcd(b) == 1))
}

/// `#{(i₁…iₙ) ≥ 0 : Σ (i_k+1)/p_k < n−2, i_k < p_k for k ≤ n−2}`.
pub fn pg_brieskorn(ps: &[u64], bound: u64) -> Result<BigInt> {
    if ps.iter().any(|&p| p == 0) {
        return Err(Error::invalid("exponents must be positive"));
    }
    if !pairwise_coprime(ps) {
        return Err(Error::invalid(format!("exponents {ps:?} are not pairwise coprime")));
    }
    let n = ps.len();
    if n < 3 {
        return Ok(BigInt::zero());
    }
    let product: BigInt = ps.iter().map(|&p| BigInt::from(p)).product();
    if product > BigInt::from(bound) {
        return Err(Error::Bound(format!(
            "Brieskorn product {product} exceeds the lattice bound {bound}"
        )));
    }
    let big_p = product.to_u128().expect("bounded");
    let partial: Vec<u128> = ps.iter().map(|&p| big_p / p as u128).collect();
    // suffix sums of P_k: the least the remaining coordinates can add
    let mut rest = vec![0u128; n + 1];
    for k in (0..n).rev() {
        rest[k] = rest[k + 1] + partial[k];
    }
    let budget = (n as u128 - 2) * big_p;
    let count = count_points(ps, &partial, &rest, 0, budget);
    Ok(BigInt::from(count))
}

fn count_points(ps: &[u64], partial: &[u128], rest: &[u128], k: usize, budget: u128) -> u128 {
    let n = ps.len();
    if k + 1 == n {
        // (i+1) P_k < budget
        return if budget == 0 { 0 } else { (budget - 1) / partial[k] };
    }
    let mut total = 0;
    let mut i: u128 = 0;
    loop {
        if k < n - 2 && i >= ps[k] as u128 {
            break;
        }
        let used = (i + 1) * partial[k];
        if used + rest[k + 1] >= budget {
            break;
        }
        total += count_points(ps, partial, rest, k + 1, budget - used);
        i += 1;
    }
    total
}

fn node_weights(d: &SpliceDiagram, v: VertexId) -> Result<Vec<u64>> {
    d.incident(v)
        .iter()
        .map(|&e| {
            d.weight(v, e)?
                .to_u64()
                .ok_or_else(|| Error::Bound("weight does not fit in 64 bits".into()))
        })
        .filter(|w| !matches!(w, Ok(1)))
        .collect()
}

/// `C` of the Brieskorn sphere with the given exponents.
fn c_brieskorn(ws: &[u64]) -> Result<BigInt> {
    let star = SpliceDiagram::star(&ws.iter().map(|&w| BigInt::from(w)).collect::<Vec<_>>());
    c_of_diagram(&star)
}

/// `λ(Δ) = Σ_v (−p_g(Σ_v) − C(Σ_v)/8)` over the nodes, where `Σ_v` is the
/// Brieskorn sphere of the weights at `v` (weights 1 dropped).
pub fn casson(d: &SpliceDiagram, bound: u64) -> Result<BigInt> {
    d.ensure_valid(false)?;
    let mut total = BigRational::zero();
    for v in d.nodes() {
        let ws = node_weights(d, v)?;
        if ws.len() < 3 {
            continue;
        }
        let pg = pg_brieskorn(&ws, bound)?;
        let c = c_brieskorn(&ws)?;
        let term = BigRational::from_integer(-pg) - BigRational::new(c, BigInt::from(8));
        integral(&term, "Casson summand")?;
        total += term;
    }
    integral(&total, "Casson invariant")
}

/// Which node–node edge the genus recursion cuts first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutOrder {
    Leftmost,
    Rightmost,
}

fn require_line(d: &SpliceDiagram) -> Result<Vec<VertexId>> {
    if !d.is_line() {
        return Err(Error::UnsupportedTopology(
            "geometric genus is only available when the nodes lie on a line".into(),
        ));
    }
    d.line_order()
}

/// Geometric genus of a line diagram by the recursion
/// `p_g = C^L C^R / 4 + p_g(Δ^L) + p_g(Δ^R)`.
pub fn pg_line(d: &SpliceDiagram, bound: u64) -> Result<BigInt> {
    pg_line_ordered(d, bound, CutOrder::Leftmost)
}

pub fn pg_line_ordered(d: &SpliceDiagram, bound: u64, order: CutOrder) -> Result<BigInt> {
    d.ensure_valid(false)?;
    require_line(d)?;
    let report = semigroup_condition(d)?;
    if let Some(bad) = report.first_failure() {
        return Err(Error::SemigroupCondition {
            location: format!("node v{} edge e{}", bad.node, bad.edge),
            detail: format!("{} is not in the semigroup generated by {:?}", bad.weight, bad.generators),
        });
    }
    pg_rec(d, bound, order)
}

fn pg_rec(d: &SpliceDiagram, bound: u64, order: CutOrder) -> Result<BigInt> {
    let line = d.line_order()?;
    if line.len() == 1 {
        let ws = node_weights(d, line[0])?;
        return if ws.len() < 3 { Ok(BigInt::zero()) } else { pg_brieskorn(&ws, bound) };
    }
    let (a, b) = match order {
        CutOrder::Leftmost => (line[0], line[1]),
        CutOrder::Rightmost => (line[line.len() - 2], line[line.len() - 1]),
    };
    let e = d.edge_between(a, b).expect("consecutive nodes are adjacent");
    let cut = d.cut(e)?;
    let cl = mu_rooted(&cut.left_rooted);
    let cr = mu_rooted(&cut.right_rooted);
    let quarter = BigRational::new(&cl * &cr, BigInt::from(4));
    let quarter = integral(&quarter, "C^L C^R / 4")?;
    Ok(quarter + pg_rec(&cut.left, bound, order)? + pg_rec(&cut.right, bound, order)?)
}

/// One identity with both sides evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl Identity {
    fn new(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Identity {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    fn ints(name: impl Into<String>, lhs: &BigInt, rhs: &BigInt) -> Self {
        Self::new(name, BigRational::from_integer(lhs.clone()), BigRational::from_integer(rhs.clone()))
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CicVerdict {
    pub pg: BigInt,
    pub c: BigInt,
    pub casson: BigInt,
    pub mu: BigInt,
    pub signature: BigInt,
    pub identities: Vec<Identity>,
    pub flags: Vec<String>,
}

impl CicVerdict {
    pub fn holds(&self) -> bool {
        self.identities.iter().all(Identity::holds)
    }
}

fn cut_leaf_flags(d: &SpliceDiagram) -> Vec<String> {
    d.node_node_edges()
        .into_iter()
        .filter(|&e| d.edge(e).weights.iter().flatten().any(|w| w.is_one()))
        .map(|e| format!("cut leaf weight 1 at e{e}"))
        .collect()
}

/// Evaluates the Casson invariant conjecture and the splice additivity
/// statements for a line diagram.
pub fn check_cic(d: &SpliceDiagram, bound: u64) -> Result<CicVerdict> {
    let pg = pg_line(d, bound)?;
    let c = c_of_diagram(d)?;
    let lambda = casson(d, bound)?;
    let mu = BigInt::from(12) * &pg + &c;
    let signature = BigInt::from(-8) * &pg - &c;
    let mut identities = vec![
        Identity::new(
            "-pg - C/8 = casson",
            BigRational::from_integer(-pg.clone()) - BigRational::new(c.clone(), BigInt::from(8)),
            BigRational::from_integer(lambda.clone()),
        ),
        Identity::ints("signature/8 = casson", &(&signature / 8), &lambda),
        Identity::ints("signature mod 8 = 0", &signature.mod_floor(&BigInt::from(8)), &BigInt::zero()),
        Identity::ints("3 signature = -2 mu - C", &(BigInt::from(3) * &signature), &(BigInt::from(-2) * &mu - &c)),
    ];
    for e in d.node_node_edges() {
        let cut = d.cut(e)?;
        let b1 = mu_rooted(&cut.left_rooted);
        let b2 = mu_rooted(&cut.right_rooted);
        let pg1 = pg_line(&cut.left, bound)?;
        let pg2 = pg_line(&cut.right, bound)?;
        let c1 = c_of_diagram(&cut.left)?;
        let c2 = c_of_diagram(&cut.right)?;
        let mu1 = BigInt::from(12) * &pg1 + &c1;
        let mu2 = BigInt::from(12) * &pg2 + &c2;
        let sig1 = BigInt::from(-8) * &pg1 - &c1;
        let sig2 = BigInt::from(-8) * &pg2 - &c2;
        identities.push(Identity::ints(format!("e{e}: mu = mu1 + mu2 + b1 b2"), &mu, &(&mu1 + &mu2 + &b1 * &b2)));
        identities.push(Identity::new(
            format!("e{e}: pg = pg1 + pg2 + b1 b2 / 4"),
            BigRational::from_integer(pg.clone()),
            BigRational::from_integer(&pg1 + &pg2) + BigRational::new(&b1 * &b2, BigInt::from(4)),
        ));
        identities.push(Identity::ints(format!("e{e}: signature = sig1 + sig2"), &signature, &(sig1 + sig2)));
    }
    Ok(CicVerdict {
        pg,
        c,
        casson: lambda,
        mu,
        signature,
        identities,
        flags: cut_leaf_flags(d),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityVerdict {
    pub edge: EdgeId,
    pub c: BigInt,
    pub c_left: BigInt,
    pub c_right: BigInt,
    pub b1_left: BigInt,
    pub b1_right: BigInt,
    pub flags: Vec<String>,
}

impl AdditivityVerdict {
    pub fn lhs(&self) -> BigInt {
        &self.c - &self.c_left - &self.c_right
    }

    pub fn rhs(&self) -> BigInt {
        BigInt::from(-2) * &self.b1_left * &self.b1_right
    }

    pub fn holds(&self) -> bool {
        self.lhs() == self.rhs()
    }
}

/// `C(Δ) − C(Δ₁) − C(Δ₂) = −2 b₁(G₁) b₁(G₂)` for the cut at `e`.
pub fn check_splice_additivity(d: &SpliceDiagram, e: EdgeId) -> Result<AdditivityVerdict> {
    d.ensure_valid(false)?;
    let cut = d.cut(e)?;
    let mut flags = Vec::new();
    if d.edge(e).weights.iter().flatten().any(|w| w.is_one()) {
        flags.push(format!("cut leaf weight 1 at e{e}"));
    }
    Ok(AdditivityVerdict {
        edge: e,
        c: c_of_diagram(d)?,
        c_left: c_of_diagram(&cut.left)?,
        c_right: c_of_diagram(&cut.right)?,
        b1_left: mu_rooted(&cut.left_rooted),
        b1_right: mu_rooted(&cut.right_rooted),
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInvariant {
    pub node: VertexId,
    pub k_v: BigInt,
    pub k_v_resolution: BigInt,
    pub k_v_conductor: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafInvariant {
    pub leaf: VertexId,
    pub label: String,
    pub milnor_mu: BigInt,
    pub generators: Vec<BigInt>,
    pub conductor: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantsReport {
    pub valid: bool,
    pub semigroup_condition: bool,
    pub c: BigInt,
    pub c1sq: BigInt,
    pub c2: BigInt,
    pub det_neg_a: BigInt,
    pub pg: Option<BigInt>,
    pub mu: Option<BigInt>,
    pub signature: Option<BigInt>,
    pub casson: Option<BigInt>,
    pub nodes: Vec<NodeInvariant>,
    pub leaves: Vec<LeafInvariant>,
    pub notes: Vec<String>,
}

/// All invariants of a valid diagram. Quantities that need a line diagram
/// or the semigroup condition are `None` when those fail.
pub fn invariants(d: &SpliceDiagram, strict: bool, bound: u64) -> Result<InvariantsReport> {
    d.ensure_valid(strict)?;
    if d.is_empty() {
        return Err(Error::invalid("empty diagram"));
    }
    let (g, origins) = to_resolution_traced(d, strict)?;
    let cd = canonical_data(&g)?;
    let condition = semigroup_condition(d)?.holds();
    let mut notes = cut_leaf_flags(d);

    let mut nodes = Vec::new();
    for v in d.nodes() {
        let kv = k_v_splice(d, v)?;
        let r = origins
            .iter()
            .position(|o| *o == Some(v))
            .ok_or_else(|| Error::internal(format!("node v{v} has no resolution vertex")))?;
        if cd.k[r] != kv.splice {
            return Err(Error::internal(format!(
                "k_v at v{v}: splice formula {} != resolution value {}",
                kv.splice, cd.k[r]
            )));
        }
        nodes.push(NodeInvariant {
            node: v,
            k_v: kv.splice,
            k_v_resolution: cd.k[r].clone(),
            k_v_conductor: kv.by_edge.first().map(|(_, x)| x.clone()),
        });
    }

    let mut leaves = Vec::new();
    for (i, w) in d.leaves().into_iter().enumerate() {
        let t = d.root_at_leaf(w)?;
        let generators = rooted_generators(&t);
        let conductor = NumericSemigroup::from_bigints(&generators).ok().map(|s| s.conductor());
        leaves.push(LeafInvariant {
            leaf: w,
            label: d.vertex(w).label.clone().unwrap_or_else(|| (i + 1).to_string()),
            milnor_mu: mu_rooted(&t),
            generators,
            conductor,
        });
    }

    let casson_value = match casson(d, bound) {
        Ok(x) => Some(x),
        Err(Error::Bound(msg)) => {
            notes.push(msg);
            None
        }
        Err(e) => return Err(e),
    };
    let pg = if !condition {
        notes.push("semigroup condition fails; p_g not computed".into());
        None
    } else if !d.is_line() {
        notes.push("nodes are not on a line; p_g not computed".into());
        None
    } else {
        match pg_line(d, bound) {
            Ok(x) => Some(x),
            Err(Error::Bound(msg)) => {
                if !notes.contains(&msg) {
                    notes.push(msg);
                }
                None
            }
            Err(e) => return Err(e),
        }
    };
    let mu = pg.as_ref().map(|p| BigInt::from(12) * p + &cd.c);
    let signature = pg.as_ref().map(|p| BigInt::from(-8) * p - &cd.c);

    Ok(InvariantsReport {
        valid: true,
        semigroup_condition: condition,
        c: cd.c.clone(),
        c1sq: cd.c1sq.clone(),
        c2: cd.c2.clone(),
        det_neg_a: g.det_neg_a(),
        pg,
        mu,
        signature,
        casson: casson_value,
        nodes,
        leaves,
        notes,
    })
}
