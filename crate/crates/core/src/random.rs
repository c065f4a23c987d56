//! Random instances for property tests and the acceptance suite.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Edge, RootedShape, RootedWeightedTree, SpliceDiagram, Vertex};
use crate::equation::{plane_curve, CharPairs};
use crate::semigroup::semigroup_condition;

const MAX_TRIES: usize = 10_000;

/// `k` pairwise coprime integers from `lo..=hi`, or `None` after a few
/// unlucky draws.
fn coprime_weights<R: Rng + ?Sized>(rng: &mut R, k: usize, lo: u64, hi: u64) -> Option<Vec<u64>> {
    'outer: for _ in 0..100 {
        let mut out: Vec<u64> = Vec::with_capacity(k);
        for _ in 0..k {
            let w = rng.gen_range(lo..=hi);
            if out.iter().any(|&x| x.gcd(&w) != 1) {
                continue 'outer;
            }
            out.push(w);
        }
        return Some(out);
    }
    None
}

/// A strictly valid splice diagram with `1..=max_nodes` nodes on a path,
/// node valency 3 or 4 and weights at most `max_weight`.
pub fn valid_diagram<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize, max_weight: u64) -> SpliceDiagram {
    let nodes = rng.gen_range(1..=max_nodes.max(1));
    diagram_with_nodes(rng, nodes, max_weight)
}

pub fn diagram_with_nodes<R: Rng + ?Sized>(rng: &mut R, nodes: usize, max_weight: u64) -> SpliceDiagram {
    if nodes == 3 {
        let family = three_node_family(max_weight);
        if let Some(cfg) = family.choose(rng) {
            return cfg.build(rng);
        }
        return diagram_with_nodes(rng, 2, max_weight);
    }
    for _ in 0..MAX_TRIES {
        if let Some(d) = try_path_diagram(rng, nodes, max_weight) {
            if d.validate(true).is_valid() {
                return d;
            }
        }
    }
    panic!("no valid diagram found with {nodes} nodes and weights <= {max_weight}");
}

fn try_path_diagram<R: Rng + ?Sized>(rng: &mut R, nodes: usize, max_weight: u64) -> Option<SpliceDiagram> {
    let mut vertices: Vec<Vertex> = (0..nodes).map(|_| Vertex::node()).collect();
    let mut edges: Vec<Edge> = Vec::new();
    if nodes == 1 {
        let valency = if rng.gen_bool(0.2) { 4 } else { 3 };
        for w in coprime_weights(rng, valency, 2, max_weight)? {
            let leaf = vertices.len();
            vertices.push(Vertex::leaf());
            edges.push(Edge::new(0, Some(BigInt::from(w)), leaf, None));
        }
        return SpliceDiagram::new(vertices, edges).ok();
    }
    if nodes != 2 {
        return None;
    }
    // leaves first, then a node–node pair above the determinant threshold
    let mut products = [0u64; 2];
    for (v, product) in products.iter_mut().enumerate() {
        let k = if rng.gen_bool(0.15) { 3 } else { 2 };
        let ws = coprime_weights(rng, k, 2, max_weight)?;
        *product = ws.iter().product();
        for w in ws {
            let leaf = vertices.len();
            vertices.push(Vertex::leaf());
            edges.push(Edge::new(v, Some(BigInt::from(w)), leaf, None));
        }
    }
    let pairs: Vec<(u64, u64)> = (1..=max_weight)
        .flat_map(|p| (1..=max_weight).map(move |q| (p, q)))
        .filter(|&(p, q)| p * q > products[0] * products[1] && p.gcd(&products[0]) == 1 && q.gcd(&products[1]) == 1)
        .collect();
    let &(p, q) = pairs.choose(rng)?;
    edges.push(Edge::new(0, Some(BigInt::from(p)), 1, Some(BigInt::from(q))));
    SpliceDiagram::new(vertices, edges).ok()
}

/// Weights of a three-node path: leaf pairs at the ends, one leaf in the
/// middle, and the four node–node weights.
#[derive(Clone, Copy, Debug)]
struct ThreeNodes {
    left: [u64; 2],
    right: [u64; 2],
    middle: u64,
    p: u64,
    a: u64,
    b: u64,
    q: u64,
}

impl ThreeNodes {
    fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> SpliceDiagram {
        let mut left = self.left;
        let mut right = self.right;
        left.shuffle(rng);
        right.shuffle(rng);
        let vertices = vec![
            Vertex::node(),
            Vertex::node(),
            Vertex::node(),
            Vertex::leaf(),
            Vertex::leaf(),
            Vertex::leaf(),
            Vertex::leaf(),
            Vertex::leaf(),
        ];
        let b = |x: u64| Some(BigInt::from(x));
        let edges = vec![
            Edge::new(0, b(left[0]), 3, None),
            Edge::new(0, b(left[1]), 4, None),
            Edge::new(0, b(self.p), 1, b(self.a)),
            Edge::new(1, b(self.middle), 5, None),
            Edge::new(1, b(self.b), 2, b(self.q)),
            Edge::new(2, b(right[0]), 6, None),
            Edge::new(2, b(right[1]), 7, None),
        ];
        let d = SpliceDiagram::new(vertices, edges).expect("well formed");
        debug_assert!(d.validate(true).is_valid());
        d
    }
}

/// Every strictly valid three-node path with node valency 3 and weights at
/// most `max`, up to the order of the leaves at each end.
fn three_node_family(max: u64) -> Vec<ThreeNodes> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<ThreeNodes>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache").get(&max) {
        return hit.clone();
    }
    let family = enumerate_three_nodes(max);
    cache.lock().expect("cache").insert(max, family.clone());
    family
}

fn enumerate_three_nodes(max: u64) -> Vec<ThreeNodes> {
    let pairs: Vec<[u64; 2]> = (2..=max)
        .flat_map(|x| (x + 1..=max).map(move |y| [x, y]))
        .filter(|[x, y]| x.gcd(y) == 1)
        .collect();
    let cap = max * max;
    let mut out = Vec::new();
    for left in &pairs {
        let lp = left[0] * left[1];
        for right in &pairs {
            let rp = right[0] * right[1];
            for middle in 2..=max {
                let floor = lp * rp * middle * middle;
                if floor >= cap {
                    break;
                }
                for p in 1..=max {
                    for q in 1..=max {
                        if p * q <= floor || p.gcd(&lp) != 1 || q.gcd(&rp) != 1 {
                            continue;
                        }
                        for a in 1..=max {
                            for b in 1..=max {
                                let ok = a * p > lp * b * middle
                                    && b * q > a * middle * rp
                                    && a.gcd(&b) == 1
                                    && a.gcd(&middle) == 1
                                    && b.gcd(&middle) == 1;
                                if ok {
                                    out.push(ThreeNodes {
                                        left: *left,
                                        right: *right,
                                        middle,
                                        p,
                                        a,
                                        b,
                                        q,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// A path of `nodes` nodes with leaf weights in `2..=leaf_max`. Each
/// node–node edge gets a small weight at its left end and, at its right
/// end, the least admissible weight above the edge determinant threshold
/// plus a small random offset.
pub fn threshold_line<R: Rng + ?Sized>(rng: &mut R, nodes: usize, leaf_max: u64) -> SpliceDiagram {
    'retry: loop {
        let leaves: Vec<Vec<u64>> = (0..nodes)
            .map(|i| {
                let k = if nodes == 1 { 3 } else if i == 0 || i + 1 == nodes { 2 } else { 1 };
                coprime_weights(rng, k, 2, leaf_max)
            })
            .collect::<Option<_>>()
            .unwrap_or_default();
        if leaves.len() != nodes {
            continue;
        }
        // x[i]: weight at node i toward i+1; y[i]: weight at node i+1 toward i
        let mut x = Vec::new();
        for i in 0..nodes.saturating_sub(1) {
            let lp: u64 = leaves[i].iter().product();
            let candidates: Vec<u64> = (1..=6).filter(|w| w.gcd(&lp) == 1).collect();
            x.push(*candidates.choose(rng).expect("1 is always coprime"));
        }
        let mut y: Vec<u64> = Vec::new();
        for i in 0..nodes.saturating_sub(1) {
            let here: u64 = leaves[i].iter().product::<u64>() * if i > 0 { y[i - 1] } else { 1 };
            let next_leaves: u64 = leaves[i + 1].iter().product();
            let there = next_leaves * if i + 2 < nodes { x[i + 1] } else { 1 };
            let mut w = here * there / x[i] + 1 + rng.gen_range(0..3);
            let blockers = there;
            while w.gcd(&blockers) != 1 || x[i] * w <= here * there {
                w += 1;
            }
            if w > 1 << 20 {
                continue 'retry;
            }
            y.push(w);
        }
        let mut vertices: Vec<Vertex> = (0..nodes).map(|_| Vertex::node()).collect();
        let mut edges = Vec::new();
        for i in 0..nodes {
            for &lw in &leaves[i] {
                let leaf = vertices.len();
                vertices.push(Vertex::leaf());
                edges.push(Edge::new(i, Some(BigInt::from(lw)), leaf, None));
            }
            if i + 1 < nodes {
                edges.push(Edge::new(i, Some(BigInt::from(x[i])), i + 1, Some(BigInt::from(y[i]))));
            }
        }
        let d = SpliceDiagram::new(vertices, edges).expect("well formed");
        if d.validate(true).is_valid() {
            return d;
        }
    }
}

/// A valid line diagram with `2..=max_nodes` nodes satisfying the
/// semigroup condition, every node's weight product at most `product_bound`.
/// Leaf weights stay within `max_weight`; when no three-node diagram fits
/// under that cap, three-node instances come from [`threshold_line`].
pub fn line_diagram_with_condition<R: Rng + ?Sized>(
    rng: &mut R,
    max_nodes: usize,
    max_weight: u64,
    product_bound: u64,
) -> SpliceDiagram {
    for _ in 0..MAX_TRIES {
        let nodes = rng.gen_range(2..=max_nodes.max(2));
        let d = if nodes == 3 && three_node_family(max_weight).is_empty() {
            threshold_line(rng, nodes, max_weight)
        } else {
            diagram_with_nodes(rng, nodes, max_weight)
        };
        let small = d
            .nodes()
            .into_iter()
            .all(|v| d.weight_product(v) <= BigInt::from(product_bound));
        if small && semigroup_condition(&d).map(|r| r.holds()).unwrap_or(false) {
            return d;
        }
    }
    panic!("no line diagram with the semigroup condition found");
}

/// A random rooted tree at most `levels` deep below the top vertex, with
/// weights in `2..=max_weight`, pairwise coprime at every vertex.
pub fn rooted_tree<R: Rng + ?Sized>(rng: &mut R, levels: usize, max_weight: u64) -> RootedWeightedTree {
    for _ in 0..MAX_TRIES {
        if let Some(branches) = shape(rng, levels.max(1), max_weight) {
            if let Ok(t) = RootedWeightedTree::from_branches(&branches) {
                return t;
            }
        }
    }
    panic!("no rooted tree found");
}

fn shape<R: Rng + ?Sized>(rng: &mut R, depth: usize, max_weight: u64) -> Option<Vec<(u64, RootedShape)>> {
    let k = if rng.gen_bool(0.75) { 2 } else { 3 };
    let ws = coprime_weights(rng, k, 2, max_weight)?;
    let mut out = Vec::new();
    let mut grown = false;
    for w in ws {
        let deeper = depth > 1 && !grown && rng.gen_bool(0.5);
        let sub = if deeper {
            grown = true;
            RootedShape(shape(rng, depth - 1, max_weight)?)
        } else {
            RootedShape::leaf()
        };
        out.push((w, sub));
    }
    out.shuffle(rng);
    Some(out)
}

/// Between 2 and `max_len` generators in `2..=max`, with gcd 1.
pub fn generator_set<R: Rng + ?Sized>(rng: &mut R, max_len: usize, max: u64) -> Vec<u64> {
    loop {
        let len = rng.gen_range(2..=max_len.max(2));
        let gens: Vec<u64> = (0..len).map(|_| rng.gen_range(2..=max)).collect();
        if gens.iter().fold(0, |g, &x| g.gcd(&x)) == 1 {
            return gens;
        }
    }
}

/// A chain of 1 to `max_pairs` characteristic pairs for which
/// [`plane_curve`] succeeds.
pub fn char_pairs<R: Rng + ?Sized>(rng: &mut R, max_pairs: usize) -> CharPairs {
    loop {
        let k = rng.gen_range(1..=max_pairs.max(1));
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        for i in 0..k {
            let q = rng.gen_range(2..=3u64);
            let floor = match pairs.last() {
                None => 1,
                Some(&(pp, pq)) => q * pq * pp,
            };
            let p = floor + rng.gen_range(1..=6);
            if p.gcd(&q) != 1 || (i == 0 && p < 2) {
                break;
            }
            pairs.push((p, q));
        }
        if pairs.len() != k {
            continue;
        }
        if let Ok(cp) = CharPairs::new(pairs, None) {
            if plane_curve(&cp, None).is_ok() {
                return cp;
            }
        }
    }
}
