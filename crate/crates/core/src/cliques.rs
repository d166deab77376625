//! Clique enumeration on bitset adjacency.

use fixedbitset::FixedBitSet;

use crate::par;

/// Undirected graph on `0..n` as one adjacency bitset per vertex.
#[derive(Clone, Debug)]
pub struct BitGraph {
    adj: Vec<FixedBitSet>,
}

impl BitGraph {
    pub fn new(n: usize) -> BitGraph {
        BitGraph {
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    /// Graph with an edge `i ~ j` wherever `edge(i, j)` holds, for `i < j`.
    pub fn from_fn(n: usize, edge: impl Fn(usize, usize) -> bool) -> BitGraph {
        let mut g = BitGraph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i].insert(j);
        self.adj[j].insert(i);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> &FixedBitSet {
        &self.adj[i]
    }
}

/// Every clique among `allowed` with at most `max_size` vertices, each as an
/// increasing vertex list. Branches are rooted at their smallest vertex and
/// explored independently; the output is grouped by root in increasing order.
pub fn all_cliques(g: &BitGraph, allowed: &FixedBitSet, max_size: Option<usize>) -> Vec<Vec<u32>> {
    let roots: Vec<usize> = allowed.ones().collect();
    let per_root = par::map(&roots, |&v| {
        let mut out = Vec::new();
        let mut cand = g.adj[v].clone();
        cand.intersect_with(allowed);
        cand.set_range(..v + 1, false);
        let mut current = vec![v as u32];
        extend(g, &mut current, &cand, max_size, &mut out);
        out
    });
    per_root.into_iter().flatten().collect()
}

fn extend(g: &BitGraph, current: &mut Vec<u32>, cand: &FixedBitSet, max_size: Option<usize>, out: &mut Vec<Vec<u32>>) {
    out.push(current.clone());
    if max_size.is_some_and(|m| current.len() >= m) {
        return;
    }
    for u in cand.ones() {
        let mut next = cand.clone();
        next.intersect_with(&g.adj[u]);
        next.set_range(..u + 1, false);
        current.push(u as u32);
        extend(g, current, &next, max_size, out);
        current.pop();
    }
}

/// Maximal cliques among `allowed` (Bron–Kerbosch with pivoting), each sorted,
/// the list sorted lexicographically.
pub fn maximal_cliques(g: &BitGraph, allowed: &FixedBitSet) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let p = allowed.clone();
    let x = FixedBitSet::with_capacity(g.len());
    bron_kerbosch(g, &mut Vec::new(), p, x, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(g: &BitGraph, r: &mut Vec<u32>, mut p: FixedBitSet, mut x: FixedBitSet, out: &mut Vec<Vec<u32>>) {
    if p.is_clear() {
        if x.is_clear() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    // pivot: vertex of P ∪ X with the most neighbours in P
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| g.adj[u].intersection(&p).count())
        .expect("P is nonempty");
    let mut todo = p.clone();
    todo.difference_with(&g.adj[pivot]);
    for v in todo.ones() {
        let mut np = p.clone();
        np.intersect_with(&g.adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&g.adj[v]);
        r.push(v as u32);
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

pub fn full_set(n: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}
