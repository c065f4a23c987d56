#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use splice_core::format::parse_sdf;
use splice_core::SpliceDiagram;

pub const DELTA_A: &str = "(2 *, 3 *, 7/11 (2 *, 5 *))";
pub const DELTA_B: &str = "(2 *, 3 *, 1/37 (2 *, 3 *))";
pub const DELTA_C: &str = "(2 *, 3 *, 5 *)";
pub const DELTA_D: &str = "(2 *, 3 *, 7/7 (2 *, 3 *))";
pub const DELTA_E: &str = "(2 *, 5 *, 7/11 (2 *, 3 *))";

pub fn sdf(s: &str) -> SpliceDiagram {
    parse_sdf(s).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, SpliceDiagram)> {
    [("A", DELTA_A), ("B", DELTA_B), ("C", DELTA_C), ("D", DELTA_D), ("E", DELTA_E)]
        .into_iter()
        .map(|(n, s)| (n, sdf(s)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Membership in `ℕ⟨gens⟩` for `0..=limit`, by dynamic programming.
pub fn member_table(gens: &[u64], limit: usize) -> Vec<bool> {
    let mut m = vec![false; limit + 1];
    m[0] = true;
    for x in 1..=limit {
        m[x] = gens.iter().any(|&g| g as usize <= x && m[x - g as usize]);
    }
    m
}

/// `(conductor, δ)` of `ℕ⟨gens⟩` (gcd 1). The sieve grows until it ends in
/// a run of `min(gens)` members, after which every integer is a member.
pub fn brute_conductor_delta(gens: &[u64]) -> (u64, u64) {
    let lo = *gens.iter().min().unwrap() as usize;
    let mut limit = 2 * (lo + *gens.iter().max().unwrap() as usize);
    loop {
        let m = member_table(gens, limit);
        if m[limit + 1 - lo..].iter().all(|&x| x) {
            let gaps = m.iter().filter(|&&x| !x).count() as u64;
            let conductor = m.iter().rposition(|&x| !x).map(|g| g as u64 + 1).unwrap_or(0);
            return (conductor, gaps);
        }
        limit *= 2;
    }
}

/// `ℓ_vw` straight from the definition: walk the path and multiply every
/// weight sitting at a path vertex on an edge off the path. `prime` also
/// drops the weights at `v` and `w`.
pub fn linking_oracle(d: &SpliceDiagram, v: usize, w: usize, prime: bool) -> BigInt {
    let (verts, path_edges) = d.path(v, w).unwrap();
    let mut product = BigInt::one();
    for (i, &u) in verts.iter().enumerate() {
        if prime && (i == 0 || i + 1 == verts.len()) {
            continue;
        }
        for &e in d.incident(u) {
            if path_edges.contains(&e) {
                continue;
            }
            if let Some(x) = d.edge(e).weight_at(u) {
                product *= x;
            }
        }
    }
    product
}

/// Rational inverse by Gauss–Jordan.
pub fn rational_inverse(m: &[Vec<BigInt>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant by cofactor expansion along the first row (small inputs).
pub fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Canonical string of a vertex-labelled tree: least AHU encoding over all
/// roots.
pub fn tree_key(labels: &[i64], edges: &[[usize; 2]]) -> String {
    let n = labels.len();
    let mut adj = vec![Vec::new(); n];
    for &[a, b] in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    fn enc(v: usize, parent: usize, labels: &[i64], adj: &[Vec<usize>]) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| enc(w, v, labels, adj))
            .collect();
        kids.sort();
        format!("{}({})", labels[v], kids.join(","))
    }
    (0..n).map(|r| enc(r, usize::MAX, labels, &adj)).min().unwrap_or_default()
}

/// Euler numbers as `i64`.
pub fn small(xs: &[BigInt]) -> Vec<i64> {
    xs.iter().map(|x| i64::try_from(x).unwrap()).collect()
}

pub fn histogram(xs: &[i64]) -> BTreeMap<i64, usize> {
    let mut h = BTreeMap::new();
    for &x in xs {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

/// Pivots of Gaussian elimination without row exchanges, over ℚ. `None`
/// when a zero pivot turns up.
pub fn rational_pivots(m: &[Vec<BigInt>]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut pivots = Vec::with_capacity(n);
    for c in 0..n {
        if a[c][c].is_zero() {
            return None;
        }
        let piv = a[c][c].clone();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[r][j] -= t;
            }
        }
        pivots.push(piv);
    }
    Some(pivots)
}

/// `−A` of a resolution graph as nested rows.
pub fn neg_a(g: &splice_core::ResolutionGraph) -> Vec<Vec<BigInt>> {
    let n = g.len();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for v in 0..n {
        m[v][v] = -g.euler(v);
    }
    for &[a, b] in g.edges() {
        m[a][b] = BigInt::from(-1);
        m[b][a] = BigInt::from(-1);
    }
    m
}

/// `(κ, C)` from adjunction: solve `A κ = −2 − diag(A)` over ℚ, then
/// `C = κᵀAκ + #vertices`.
pub fn canonical_oracle(g: &splice_core::ResolutionGraph) -> (Vec<BigInt>, BigInt) {
    let m = neg_a(g);
    let inv = rational_inverse(&m).unwrap();
    let n = g.len();
    // A κ = r  ⟺  κ = −(−A)⁻¹ r
    let r: Vec<BigInt> = (0..n).map(|i| BigInt::from(-2) - g.euler(i)).collect();
    let kappa: Vec<BigInt> = (0..n)
        .map(|i| {
            let s: BigRational = (0..n).map(|j| &inv[i][j] * BigRational::from_integer(r[j].clone())).sum();
            assert!(s.is_integer());
            -s.to_integer()
        })
        .collect();
    let mut quad = BigInt::zero();
    for i in 0..n {
        for j in 0..n {
            quad -= &kappa[i] * &m[i][j] * &kappa[j];
        }
    }
    (kappa, quad + BigInt::from(n))
}

pub fn c_oracle(d: &SpliceDiagram) -> BigInt {
    canonical_oracle(&splice_core::convert::to_resolution_lenient(d).unwrap()).1
}

/// Milnor number of a leaf from the definition `1 + Σ_{v≠w}(δ_v − 2) ℓ_wv`.
pub fn milnor_oracle(d: &SpliceDiagram, w: usize) -> BigInt {
    let mut mu = BigInt::from(1);
    for v in 0..d.vertex_count() {
        if v != w {
            mu += BigInt::from(d.valency(v) as i64 - 2) * linking_oracle(d, w, v, false);
        }
    }
    mu
}

/// `k_v = Σ_u (δ_u − 2) ℓ_vu` with `ℓ_vv = d_v`.
pub fn kv_oracle(d: &SpliceDiagram, v: usize) -> BigInt {
    (0..d.vertex_count())
        .map(|u| {
            let l = if u == v { d.weight_product(v) } else { linking_oracle(d, v, u, false) };
            l * BigInt::from(d.valency(u) as i64 - 2)
        })
        .sum()
}

/// Lattice count for `p_g` of a Brieskorn sphere by direct enumeration:
/// `Σ (i_k + 1)/p_k < n − 2` cleared of denominators, every coordinate
/// below `(n − 2) p_k`, the first `n − 2` below `p_k`.
pub fn pg_oracle(ps: &[u64]) -> u64 {
    let n = ps.len();
    let big_p: u64 = ps.iter().product();
    let budget = (n as u64 - 2) * big_p;
    fn walk(ps: &[u64], big_p: u64, k: usize, used: u64, budget: u64) -> u64 {
        let n = ps.len();
        if k == n {
            return u64::from(used < budget);
        }
        let cap = if k < n - 2 { ps[k] } else { (n as u64 - 2) * ps[k] };
        (0..cap)
            .map(|i| used + (i + 1) * (big_p / ps[k]))
            .take_while(|&u| u < budget)
            .map(|u| walk(ps, big_p, k + 1, u, budget))
            .sum()
    }
    walk(ps, big_p, 0, 0, budget)
}
