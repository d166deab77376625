//! Test-side oracles and random instances. Nothing here calls the library's
//! clique, reduction or collapse code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use vrglue::metric::GraphEdge;
use vrglue::{FiniteMetricSpace, Length, MetricGraph, SimplicialComplex};

pub type Cells = BTreeSet<Vec<usize>>;

/// All vertex subsets of diameter `<= r` with at most `max_len` points, by
/// plain subset enumeration.
pub fn brute_vr(m: &FiniteMetricSpace, r: Length, max_len: usize) -> Cells {
    let n = m.len();
    assert!(n <= 20, "brute force is for small spaces");
    let mut out = Cells::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > max_len {
            continue;
        }
        let pts: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let ok = pts.iter().all(|&i| pts.iter().all(|&j| m.d(i, j) <= r));
        if ok {
            out.insert(pts);
        }
    }
    out
}

/// Simplices of a library complex as sorted vertex lists.
pub fn cells_of(k: &SimplicialComplex) -> Cells {
    k.iter().map(|s| s.vertices().iter().map(|&v| v as usize).collect()).collect()
}

/// Rank over GF(2) of a dense matrix given as bit rows.
fn rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut r = 0;
    let words = rows.first().map_or(0, Vec::len);
    for col in 0..words * 64 {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (r..rows.len()).find(|&i| rows[i][w] & b != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[w] & b != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Betti numbers in dimensions `0..=cap` from dense boundary ranks.
pub fn gf2_betti(cells: &Cells, cap: usize) -> Vec<usize> {
    let by_dim: Vec<Vec<&Vec<usize>>> = (0..=cap + 1).map(|d| cells.iter().filter(|c| c.len() == d + 1).collect()).collect();
    let boundary_rank = |d: usize| -> usize {
        if d == 0 || by_dim[d].is_empty() || by_dim[d - 1].is_empty() {
            return 0;
        }
        let lower = &by_dim[d - 1];
        let words = lower.len().div_ceil(64);
        let rows = by_dim[d]
            .iter()
            .map(|c| {
                let mut row = vec![0u64; words];
                for skip in 0..c.len() {
                    let f: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                    let i = lower.iter().position(|l| **l == f).expect("closed");
                    row[i / 64] ^= 1 << (i % 64);
                }
                row
            })
            .collect();
        rank(rows)
    };
    let ranks: Vec<usize> = (0..=cap + 1).map(boundary_rank).collect();
    (0..=cap).map(|d| by_dim[d].len() - ranks[d] - ranks[d + 1]).collect()
}

pub fn l(s: &str) -> Length {
    s.parse().unwrap()
}

/// Shortest-path metric of a random connected graph with integer weights in
/// `1..=max_w`, by Floyd–Warshall.
pub fn random_graph_metric(rng: &mut ChaCha8Rng, n: usize, prefix: &str, max_w: i64) -> FiniteMetricSpace {
    let inf = i64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let w = rng.gen_range(1..=max_w);
        d[i][j] = w;
        d[j][i] = w;
    }
    for _ in 0..n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let w = rng.gen_range(1..=max_w);
            d[i][j] = d[i][j].min(w);
            d[j][i] = d[i][j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    FiniteMetricSpace::new(
        (0..n).map(|i| format!("{prefix}{i}")).collect(),
        d.iter().map(|row| row.iter().map(|&x| Length::int(x)).collect()).collect(),
        false,
    )
    .unwrap()
}

/// Random chordal graph: each new vertex is joined to a clique of the
/// existing graph (one vertex plus some of its earlier-joined neighbours).
/// With `tree` set every new vertex gets exactly one neighbour.
pub fn random_chordal(rng: &mut ChaCha8Rng, n: usize, tree: bool) -> MetricGraph {
    let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let mut clique = vec![u];
        if !tree {
            let mut cand: Vec<usize> = adj[u].iter().copied().collect();
            cand.shuffle(rng);
            for w in cand {
                if rng.gen_bool(0.6) && clique.iter().all(|c| adj[*c].contains(&w)) {
                    clique.push(w);
                }
            }
        }
        for c in clique {
            adj[v].insert(c);
            adj[c].insert(v);
            edges.push(GraphEdge {
                u: names[c].clone(),
                v: names[v].clone(),
                len: Length::ONE,
                subdivision: None,
            });
        }
    }
    MetricGraph::new(names, edges, 0).unwrap()
}

/// Unit-length cycle through the given vertex names.
pub fn cycle_graph(names: &[String]) -> MetricGraph {
    let k = names.len();
    let edges: Vec<(String, String)> = (0..k).map(|i| (names[i].clone(), names[(i + 1) % k].clone())).collect();
    MetricGraph::unit(names, &edges).unwrap()
}

/// Which join-collapse construction an instance exercises.
#[derive(Clone, Copy, Debug)]
pub enum LemmaKind {
    Apex,
    Simplex,
    Collapsible,
}

/// A flag complex K on `u0.. , g` whose simplices through `g` are exactly
/// `S ∪ ρ` with `S ∋ g` avoiding the base set B and ρ a clique of B, so
/// that K collapses onto L = K without the star of g.
pub struct LemmaInstance {
    pub universe: Vec<String>,
    pub k: Cells,
    pub l: Cells,
    /// Simplices through g disjoint from B.
    pub t: Vec<Vec<usize>>,
    pub base: Vec<usize>,
    /// Edges inside B.
    pub base_edges: Vec<(usize, usize)>,
}

fn cliques_of(n: usize, adj: &[Vec<bool>]) -> Cells {
    let mut out = Cells::new();
    for mask in 1u32..(1 << n) {
        let pts: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if pts.iter().all(|&i| pts.iter().all(|&j| i == j || adj[i][j])) {
            out.insert(pts);
        }
    }
    out
}

pub fn lemma_instance(rng: &mut ChaCha8Rng, kind: LemmaKind) -> LemmaInstance {
    let others = rng.gen_range(4..=7);
    let n = others + 1;
    let g = others;
    let mut adj = vec![vec![false; n]; n];
    for i in 0..others {
        for j in i + 1..others {
            if rng.gen_bool(0.45) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let mut order: Vec<usize> = (0..others).collect();
    order.shuffle(rng);
    let size = match kind {
        LemmaKind::Apex => 1,
        LemmaKind::Simplex => rng.gen_range(1..=3),
        LemmaKind::Collapsible => rng.gen_range(2..=4),
    };
    let base: Vec<usize> = {
        let mut b = order[..size].to_vec();
        b.sort_unstable();
        b
    };
    let mut set = |i: usize, j: usize, v: bool| {
        adj[i][j] = v;
        adj[j][i] = v;
    };
    for (p, &i) in base.iter().enumerate() {
        for &j in &base[p + 1..] {
            set(i, j, matches!(kind, LemmaKind::Simplex | LemmaKind::Apex));
        }
    }
    let mut base_edges = Vec::new();
    if let LemmaKind::Collapsible = kind {
        // random tree on B
        for p in 1..base.len() {
            let q = rng.gen_range(0..p);
            set(base[q], base[p], true);
            base_edges.push((base[q].min(base[p]), base[q].max(base[p])));
        }
    }
    let rest: Vec<usize> = order[size..].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    for &b in &base {
        set(g, b, true);
        for &c in &rest {
            set(c, b, true);
        }
    }
    for &c in &rest {
        set(g, c, true);
    }
    let k = cliques_of(n, &adj);
    let l: Cells = k.iter().filter(|c| !c.contains(&g)).cloned().collect();
    let t: Vec<Vec<usize>> = k
        .iter()
        .filter(|c| c.contains(&g) && c.iter().all(|v| !base.contains(v)))
        .cloned()
        .collect();
    let mut universe: Vec<String> = (0..others).map(|i| format!("u{i}")).collect();
    universe.push("g".into());
    LemmaInstance {
        universe,
        k,
        l,
        t,
        base,
        base_edges,
    }
}
