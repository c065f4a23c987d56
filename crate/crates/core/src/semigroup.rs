//! Numeric semigroups and the semigroup side of splice diagrams.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagram::{EdgeId, RootedWeightedTree, SpliceDiagram, VertexId};
use crate::error::{Error, Result};

/// Largest smallest-generator for which an Apéry table is built.
pub const MAX_MODULUS: u64 = 1 << 24;

pub(crate) fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::Bound(format!("{what} {x} does not fit in 64 bits")))
}

/// A cofinite submonoid of ℕ, stored with its Apéry set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericSemigroup {
    generators: Vec<u64>,
    apery: Vec<u64>,
}

impl NumericSemigroup {
    pub fn new(generators: &[u64]) -> Result<Self> {
        let mut gens: Vec<u64> = generators.to_vec();
        if gens.is_empty() {
            return Err(Error::invalid("a numeric semigroup needs at least one generator"));
        }
        if gens.contains(&0) {
            return Err(Error::invalid("generators must be positive"));
        }
        gens.sort_unstable();
        gens.dedup();
        let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
        if g != 1 {
            return Err(Error::invalid(format!("generators have common factor {g}")));
        }
        let apery = apery_set(&gens)?;
        Ok(NumericSemigroup {
            generators: gens,
            apery,
        })
    }

    pub fn from_bigints(generators: &[BigInt]) -> Result<Self> {
        let gens: Vec<u64> = generators
            .iter()
            .map(|g| to_u64(g, "generator"))
            .collect::<Result<_>>()?;
        Self::new(&gens)
    }

    /// ℕ itself.
    pub fn naturals() -> Self {
        Self::new(&[1]).expect("⟨1⟩")
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn multiplicity(&self) -> u64 {
        self.generators[0]
    }

    /// Least element in each residue class modulo the multiplicity.
    pub fn apery(&self) -> &[u64] {
        &self.apery
    }

    pub fn contains(&self, x: u64) -> bool {
        let m = self.multiplicity();
        x >= self.apery[(x % m) as usize]
    }

    pub fn contains_big(&self, x: &BigInt) -> bool {
        if x < &BigInt::zero() {
            return false;
        }
        match x.to_u64() {
            Some(v) => self.contains(v),
            None => true,
        }
    }

    /// Least `c` with `[c, ∞) ⊂ Γ`.
    pub fn conductor(&self) -> u64 {
        let m = self.multiplicity();
        if m == 1 {
            return 0;
        }
        self.apery.iter().max().copied().unwrap_or(0) - m + 1
    }

    /// Number of gaps.
    pub fn delta(&self) -> u64 {
        let m = self.multiplicity();
        self.apery.iter().map(|w| w / m).sum()
    }

    pub fn gaps(&self) -> Vec<u64> {
        let m = self.multiplicity();
        let mut out: Vec<u64> = Vec::new();
        for &w in &self.apery {
            let mut g = w % m;
            while g < w {
                out.push(g);
                g += m;
            }
        }
        out.sort_unstable();
        out
    }

    /// Minimal generating set.
    pub fn minimal_generators(&self) -> Vec<u64> {
        let mut kept: Vec<u64> = Vec::new();
        for &g in &self.generators {
            if !representable(g, &kept) {
                kept.push(g);
            }
        }
        kept
    }

    /// `γ ∈ Γ ⟺ c − 1 − γ ∉ Γ` for all `0 ≤ γ < c`.
    pub fn is_symmetric(&self) -> bool {
        let c = self.conductor();
        if c == 0 {
            return true;
        }
        (0..c).all(|g| self.contains(g) != self.contains(c - 1 - g))
    }

    /// Lexicographically least exponent vector over the stored generators.
    pub fn representation(&self, x: u64) -> Option<Vec<u64>> {
        lex_min_representation(x, &self.generators).ok().flatten()
    }
}

impl fmt::Display for NumericSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

/// Shortest paths modulo the smallest generator.
fn apery_set(gens: &[u64]) -> Result<Vec<u64>> {
    let m = gens[0];
    if m > MAX_MODULUS {
        return Err(Error::Bound(format!(
            "smallest generator {m} exceeds the Apéry table limit {MAX_MODULUS}"
        )));
    }
    let m_us = m as usize;
    let mut dist = vec![u64::MAX; m_us];
    dist[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &g in &gens[1..] {
            let nd = d
                .checked_add(g)
                .ok_or_else(|| Error::Bound("semigroup element overflow".into()))?;
            let nr = ((r as u64 + g) % m) as usize;
            if nd < dist[nr] {
                dist[nr] = nd;
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    Ok(dist)
}

fn representable(x: u64, gens: &[u64]) -> bool {
    let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
    if g == 0 {
        return x == 0;
    }
    if x % g != 0 {
        return false;
    }
    let reduced: Vec<u64> = gens.iter().map(|v| v / g).collect();
    match NumericSemigroup::new(&reduced) {
        Ok(s) => s.contains(x / g),
        Err(_) => false,
    }
}

/// Membership oracle for the additive monoid spanned by an arbitrary
/// generator list (the gcd need not be 1).
#[derive(Clone, Debug)]
struct Span {
    gcd: u64,
    inner: Option<NumericSemigroup>,
}

impl Span {
    fn new(gens: &[u64]) -> Result<Self> {
        let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
        if g == 0 {
            return Ok(Span { gcd: 0, inner: None });
        }
        let reduced: Vec<u64> = gens.iter().filter(|&&v| v > 0).map(|v| v / g).collect();
        Ok(Span {
            gcd: g,
            inner: Some(NumericSemigroup::new(&reduced)?),
        })
    }

    fn contains(&self, x: u64) -> bool {
        match &self.inner {
            None => x == 0,
            Some(s) => x % self.gcd == 0 && s.contains(x / self.gcd),
        }
    }
}

/// The lexicographically least `α` with `Σ αᵢ gᵢ = x`, if any.
pub fn lex_min_representation(x: u64, gens: &[u64]) -> Result<Option<Vec<u64>>> {
    let n = gens.len();
    let suffix: Vec<Span> = (0..=n)
        .map(|i| Span::new(&gens[i..]))
        .collect::<Result<_>>()?;
    if !suffix[0].contains(x) {
        return Ok(None);
    }
    let mut out = vec![0u64; n];
    let mut rest = x;
    for i in 0..n {
        let g = gens[i];
        let mut a = 0u64;
        loop {
            if suffix[i + 1].contains(rest) {
                break;
            }
            if g == 0 || rest < g {
                return Err(Error::internal("representation search lost feasibility"));
            }
            rest -= g;
            a += 1;
        }
        out[i] = a;
    }
    debug_assert_eq!(rest, 0);
    Ok(Some(out))
}

/// All representations of `x`, in increasing lexicographic order, stopping
/// after `limit` of them.
pub fn all_representations(x: u64, gens: &[u64], limit: usize) -> Result<Vec<Vec<u64>>> {
    let n = gens.len();
    let suffix: Vec<Span> = (0..=n)
        .map(|i| Span::new(&gens[i..]))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut current = vec![0u64; n];
    fn walk(
        i: usize,
        rest: u64,
        gens: &[u64],
        suffix: &[Span],
        current: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if i == gens.len() {
            if rest == 0 {
                out.push(current.clone());
            }
            return;
        }
        let g = gens[i];
        let mut a = 0u64;
        let mut r = rest;
        loop {
            if suffix[i + 1].contains(r) {
                current[i] = a;
                walk(i + 1, r, gens, suffix, current, out, limit);
                current[i] = 0;
            }
            if g == 0 || r < g || out.len() >= limit {
                break;
            }
            r -= g;
            a += 1;
        }
    }
    if suffix[0].contains(x) {
        walk(0, x, gens, &suffix, &mut current, &mut out, limit);
    }
    Ok(out)
}

/// An exponent vector over leaf variables `z1, z2, …`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u64>);

impl Monomial {
    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn degree_under(&self, weights: &[BigInt]) -> BigInt {
        self.0
            .iter()
            .zip(weights)
            .map(|(&a, w)| BigInt::from(a) * w)
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &a) in self.0.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("z{}", i + 1)),
                _ => parts.push(format!("z{}^{}", i + 1, a)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// One `(node, edge)` entry of the semigroup condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionEntry {
    pub node: VertexId,
    pub edge: EdgeId,
    pub weight: BigInt,
    /// Leaves of `Δ_ve`, in id order.
    pub leaves: Vec<VertexId>,
    /// `ℓ'_vw` for those leaves.
    pub generators: Vec<BigInt>,
    /// Lexicographically least exponents, when the weight is representable.
    pub witness: Option<Vec<u64>>,
}

impl ConditionEntry {
    pub fn holds(&self) -> bool {
        self.witness.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(ConditionEntry::holds)
    }

    pub fn first_failure(&self) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| !e.holds())
    }
}

/// Checks `d_ve ∈ ℕ⟨ℓ'_vw : w leaf of Δ_ve⟩` for every node `v` and edge `e`.
pub fn semigroup_condition(d: &SpliceDiagram) -> Result<ConditionReport> {
    let mut entries = Vec::new();
    for v in d.nodes() {
        for &e in d.incident(v) {
            let weight = d.weight(v, e)?.clone();
            let leaves = d.leaves_beyond(v, e);
            let generators: Vec<BigInt> = leaves
                .iter()
                .map(|&w| d.linking_number(v, w, true))
                .collect::<Result<_>>()?;
            let small: Vec<u64> = generators
                .iter()
                .map(|g| to_u64(g, "generator"))
                .collect::<Result<_>>()?;
            let witness = lex_min_representation(to_u64(&weight, "weight")?, &small)?;
            entries.push(ConditionEntry {
                node: v,
                edge: e,
                weight,
                leaves,
                generators,
                witness,
            });
        }
    }
    Ok(ConditionReport { entries })
}

/// Returns an error describing the first failure, if any.
pub fn require_semigroup_condition(d: &SpliceDiagram) -> Result<ConditionReport> {
    let report = semigroup_condition(d)?;
    if let Some(bad) = report.first_failure() {
        let gens: Vec<String> = bad.generators.iter().map(|g| g.to_string()).collect();
        return Err(Error::SemigroupCondition {
            location: format!("node v{} edge e{}", bad.node, bad.edge),
            detail: format!("{} is not in the semigroup generated by {}", bad.weight, gens.join(", ")),
        });
    }
    Ok(report)
}

/// `ℓ_{w'w}` for the leaves of a rooted tree, left to right.
pub fn rooted_generators(t: &RootedWeightedTree) -> Vec<BigInt> {
    t.leaves().into_iter().map(|w| t.ell_from_root(w)).collect()
}

/// `ℕ⟨ℓ_{w'w}⟩` over the leaves `w` of `t`.
pub fn sg_of_rooted_tree(t: &RootedWeightedTree) -> Result<NumericSemigroup> {
    NumericSemigroup::from_bigints(&rooted_generators(t))
}

/// `1 + Σ_{v ≠ w'} (δ_v − 2) ℓ_{w'v}`.
pub fn mu_rooted(t: &RootedWeightedTree) -> BigInt {
    let mut mu = BigInt::one();
    for v in 1..t.len() {
        let delta = t.valency(v) as i64 - 2;
        if delta != 0 {
            mu += BigInt::from(delta) * t.ell_from_root(v);
        }
    }
    mu
}

/// Generators of the subtree below `v` through child `c`, as seen from `v`.
fn branch_generators(t: &RootedWeightedTree, v: usize, c: usize) -> Result<(Vec<usize>, Vec<u64>)> {
    let leaves = t.leaves_below(c);
    let gens = leaves
        .iter()
        .map(|&w| to_u64(&t.ell_below(v, w), "generator"))
        .collect::<Result<_>>()?;
    Ok((leaves, gens))
}

/// Checks the rooted semigroup condition: the weight on the root edge of
/// every subtree cut off below a non-root vertex lies in that subtree's
/// semigroup.
pub fn rooted_condition(t: &RootedWeightedTree) -> Result<()> {
    for v in 1..t.len() {
        for &c in t.children(v) {
            let p = to_u64(t.weight(c).expect("downward weight"), "weight")?;
            let (_, gens) = branch_generators(t, v, c)?;
            if !Span::new(&gens)?.contains(p) {
                return Err(Error::SemigroupCondition {
                    location: format!("subtree below t{v} through t{c}"),
                    detail: format!("{p} is not in the semigroup generated by {gens:?}"),
                });
            }
        }
    }
    Ok(())
}

pub fn satisfies_rooted_condition(t: &RootedWeightedTree) -> Result<bool> {
    match rooted_condition(t) {
        Ok(()) => Ok(true),
        Err(Error::SemigroupCondition { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Result of [`combine`]: the items of the gluing lemma, each evaluated on
/// the constructed semigroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombineReport {
    pub all_p_in_gamma: bool,
    pub delta_lhs: BigInt,
    pub delta_rhs: BigInt,
    pub conductor_lhs: BigInt,
    pub conductor_rhs: BigInt,
    pub delta_inequality: bool,
    pub delta_equality_implies_membership: bool,
    pub conductor_inequality: bool,
    pub membership_implies_conductor_equality: bool,
    pub symmetric_equivalence: bool,
    pub symmetry_transfer: bool,
    /// Brute-force sieve agreed with the Apéry values of the result.
    pub brute_force_agrees: bool,
}

impl CombineReport {
    pub fn all_hold(&self) -> bool {
        self.delta_inequality
            && self.delta_equality_implies_membership
            && self.conductor_inequality
            && self.membership_implies_conductor_equality
            && self.symmetric_equivalence
            && self.symmetry_transfer
            && self.brute_force_agrees
    }
}

/// `Γ = P₁Γ₁ + … + PₙΓₙ` with `P = Πpᵢ`, `Pᵢ = P/pᵢ`.
pub fn combine(parts: &[NumericSemigroup], ps: &[u64]) -> Result<(NumericSemigroup, CombineReport)> {
    if parts.len() != ps.len() || parts.is_empty() {
        return Err(Error::invalid("need one weight per semigroup"));
    }
    for i in 0..ps.len() {
        if ps[i] == 0 {
            return Err(Error::invalid("weights must be positive"));
        }
        for j in i + 1..ps.len() {
            if ps[i].gcd(&ps[j]) != 1 {
                return Err(Error::invalid(format!("{} and {} are not coprime", ps[i], ps[j])));
            }
        }
    }
    let p_big: BigInt = ps.iter().map(|&p| BigInt::from(p)).product();
    let n = ps.len();
    let mut gens = Vec::new();
    for (s, &p) in parts.iter().zip(ps) {
        let pi = to_u64(&(&p_big / p), "weight product")?;
        for &g in s.generators() {
            gens.push(
                g.checked_mul(pi)
                    .ok_or_else(|| Error::Bound("generator overflow".into()))?,
            );
        }
    }
    let gamma = NumericSemigroup::new(&gens)?;

    let tail: BigInt = BigInt::from(n as u64 - 1) * &p_big + 1;
    let mut delta_rhs = tail.clone();
    let mut conductor_rhs = tail;
    for (s, &p) in parts.iter().zip(ps) {
        let pi = &p_big / p;
        delta_rhs += &pi * (BigInt::from(2 * s.delta()) - 1);
        conductor_rhs += &pi * (BigInt::from(s.conductor()) - 1);
    }
    let delta_lhs = BigInt::from(2 * gamma.delta());
    let conductor_lhs = BigInt::from(gamma.conductor());
    let all_p_in_gamma = parts.iter().zip(ps).all(|(s, &p)| s.contains(p));
    let all_symmetric = parts.iter().all(NumericSemigroup::is_symmetric);

    let delta_eq = delta_lhs == delta_rhs;
    let conductor_eq = conductor_lhs == conductor_rhs;
    let symmetric_equivalence = !all_symmetric || (delta_eq == conductor_eq && conductor_eq == all_p_in_gamma);
    let symmetry_transfer = !all_p_in_gamma || gamma.is_symmetric() == all_symmetric;

    let limit = conductor_rhs.to_u64().unwrap_or(0).max(gamma.conductor()) + gamma.multiplicity();
    let brute_force_agrees = match sieve(&gens, limit) {
        Some(member) => {
            let gaps = member.iter().filter(|&&m| !m).count() as u64;
            let last_gap = member.iter().rposition(|&m| !m).map(|g| g as u64 + 1).unwrap_or(0);
            gaps == gamma.delta() && last_gap == gamma.conductor()
        }
        None => true,
    };

    let report = CombineReport {
        all_p_in_gamma,
        delta_inequality: delta_lhs <= delta_rhs,
        delta_equality_implies_membership: !delta_eq || all_p_in_gamma,
        conductor_inequality: conductor_lhs <= conductor_rhs,
        membership_implies_conductor_equality: !all_p_in_gamma || conductor_eq,
        symmetric_equivalence,
        symmetry_transfer,
        brute_force_agrees,
        delta_lhs,
        delta_rhs,
        conductor_lhs,
        conductor_rhs,
    };
    Ok((gamma, report))
}

/// Membership table for `0..=limit`; `None` when the table would be huge.
fn sieve(gens: &[u64], limit: u64) -> Option<Vec<bool>> {
    if limit > 1 << 22 {
        return None;
    }
    let mut member = vec![false; limit as usize + 1];
    member[0] = true;
    for x in 1..=limit as usize {
        member[x] = gens.iter().any(|&g| (g as usize) <= x && member[x - g as usize]);
    }
    Some(member)
}

/// A presentation `⟨x₁…xₙ : relations⟩` of a semigroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupPresentation {
    /// Value of each abstract generator.
    pub generators: Vec<u64>,
    pub relations: Vec<(Vec<u64>, Vec<u64>)>,
}

impl SemigroupPresentation {
    pub fn deficiency(&self) -> i64 {
        self.generators.len() as i64 - self.relations.len() as i64
    }

    /// Every relation evaluates to the same integer on both sides.
    pub fn relations_hold(&self) -> bool {
        let eval = |a: &[u64]| -> u128 {
            a.iter()
                .zip(&self.generators)
                .map(|(&x, &g)| x as u128 * g as u128)
                .sum()
        };
        self.relations.iter().all(|(l, r)| eval(l) == eval(r))
    }
}

impl fmt::Display for SemigroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |a: &[u64]| -> String {
            let terms: Vec<String> = a
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| if c == 1 { format!("x{}", i + 1) } else { format!("{c}x{}", i + 1) })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join("+")
            }
        };
        let gens: Vec<String> = (1..=self.generators.len()).map(|i| format!("x{i}")).collect();
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|(l, r)| format!("{} = {}", side(l), side(r)))
            .collect();
        write!(f, "⟨{} : {}⟩", gens.join(","), rels.join(", "))
    }
}

/// Deficiency-one presentation of `sg(t)`, one abstract generator per leaf
/// (left to right). At each vertex with downward edges `e₁…eₙ` the
/// relations `w₁ = wₙ, …, wₙ₋₁ = wₙ` are added, `wᵢ` being the least
/// expression for `p_{eᵢ}` in the subtree through `eᵢ`.
pub fn ci_presentation(t: &RootedWeightedTree) -> Result<SemigroupPresentation> {
    rooted_condition(t)?;
    let leaves = t.leaves();
    let index_of = |w: usize| leaves.iter().position(|&x| x == w).expect("leaf");
    let generators: Vec<u64> = leaves
        .iter()
        .map(|&w| to_u64(&t.ell_from_root(w), "generator"))
        .collect::<Result<_>>()?;
    let mut relations = Vec::new();
    for v in 1..t.len() {
        let kids = t.children(v);
        if kids.len() < 2 {
            continue;
        }
        let mut words = Vec::new();
        for &c in kids {
            let p = to_u64(t.weight(c).expect("weight"), "weight")?;
            let (below, gens) = branch_generators(t, v, c)?;
            let rep = lex_min_representation(p, &gens)?
                .ok_or_else(|| Error::internal("condition checked but no representation"))?;
            let mut word = vec![0u64; leaves.len()];
            for (w, a) in below.iter().zip(rep) {
                word[index_of(*w)] = a;
            }
            words.push(word);
        }
        let last = words.pop().expect("two words");
        for w in words {
            relations.push((w, last.clone()));
        }
    }
    Ok(SemigroupPresentation {
        generators,
        relations,
    })
}

/// Value of a monomial in `sg(t)` under `z_w ↦ t^{ℓ_{w'w}}`.
pub fn monomial_value(t: &RootedWeightedTree, m: &Monomial) -> BigInt {
    m.degree_under(&rooted_generators(t))
}

/// The normal form of `m`: repeatedly trade `t^{p_e}` below a non-rightmost
/// edge `e` at `v` for `t^{p_{e'}}` below the rightmost edge `e'`.
pub fn normal_form(t: &RootedWeightedTree, m: &Monomial) -> Result<Monomial> {
    rooted_condition(t)?;
    let leaves = t.leaves();
    if m.0.len() != leaves.len() {
        return Err(Error::invalid(format!(
            "monomial has {} exponents but the tree has {} leaves",
            m.0.len(),
            leaves.len()
        )));
    }
    let index_of = |w: usize| leaves.iter().position(|&x| x == w).expect("leaf");

    // breadth-first order of vertices that have at least two children
    let mut order = Vec::new();
    let mut queue = std::collections::VecDeque::from([t.top()]);
    while let Some(v) = queue.pop_front() {
        if t.children(v).len() >= 2 {
            order.push(v);
        }
        queue.extend(t.children(v).iter().copied());
    }

    struct Site {
        v: usize,
        c: usize,
        p: u64,
        below: Vec<usize>,
        gens: Vec<u64>,
        span: Span,
        right_below: Vec<usize>,
        right_rep: Vec<u64>,
    }
    let mut sites = Vec::new();
    for &v in &order {
        let kids = t.children(v);
        let &right = kids.last().expect("children");
        let pr = to_u64(t.weight(right).expect("weight"), "weight")?;
        let (right_below, right_gens) = branch_generators(t, v, right)?;
        let right_rep = lex_min_representation(pr, &right_gens)?
            .ok_or_else(|| Error::internal("rightmost weight not representable"))?;
        for &c in &kids[..kids.len() - 1] {
            let p = to_u64(t.weight(c).expect("weight"), "weight")?;
            let (below, gens) = branch_generators(t, v, c)?;
            let span = Span::new(&gens)?;
            sites.push(Site {
                v,
                c,
                p,
                below,
                gens,
                span,
                right_below: right_below.clone(),
                right_rep: right_rep.clone(),
            });
        }
    }

    let mut exps = m.0.clone();
    let mut steps = 0u64;
    'outer: loop {
        for s in &sites {
            let alpha: u64 = s
                .below
                .iter()
                .zip(&s.gens)
                .map(|(&w, &g)| exps[index_of(w)] * g)
                .sum();
            if alpha >= s.p && s.span.contains(alpha - s.p) {
                let rep = lex_min_representation(alpha - s.p, &s.gens)?
                    .ok_or_else(|| Error::internal("lost representation"))?;
                for (&w, a) in s.below.iter().zip(rep) {
                    exps[index_of(w)] = a;
                }
                for (&w, a) in s.right_below.iter().zip(&s.right_rep) {
                    exps[index_of(w)] += a;
                }
                steps += 1;
                if steps > 10_000_000 {
                    return Err(Error::internal(format!(
                        "normal form did not terminate at t{} through t{}",
                        s.v, s.c
                    )));
                }
                continue 'outer;
            }
        }
        break;
    }
    Ok(Monomial(exps))
}

/// One normal-form monomial for every `γ ∈ sg(t)` with `γ ≤ n`, by value.
pub fn monomial_basis_upto(t: &RootedWeightedTree, n: u64) -> Result<Vec<(u64, Monomial)>> {
    rooted_condition(t)?;
    let gens: Vec<u64> = rooted_generators(t)
        .iter()
        .map(|g| to_u64(g, "generator"))
        .collect::<Result<_>>()?;
    let sg = NumericSemigroup::new(&gens)?;
    let mut out = Vec::new();
    for gamma in 0..=n {
        if !sg.contains(gamma) {
            continue;
        }
        let rep = lex_min_representation(gamma, &gens)?
            .ok_or_else(|| Error::internal("member without representation"))?;
        out.push((gamma, normal_form(t, &Monomial(rep))?));
    }
    Ok(out)
}
