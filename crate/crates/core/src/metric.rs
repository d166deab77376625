//! Finite metric spaces: raw matrices, metric graphs, gluings, wedges,
//! circle samples and L∞ product subsets.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::length::Length;
use crate::par;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("matrix has {rows} rows but {labels} labels")]
    NotSquare { rows: usize, labels: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("d({0}, {1}) != d({1}, {0})")]
    AsymmetricMatrix(String, String),
    #[error("negative distance between {0} and {1}")]
    NegativeDistance(String, String),
    #[error("nonzero diagonal entry at {0}")]
    NonzeroDiagonal(String),
    #[error("triangle inequality fails: d({0}, {2}) > d({0}, {1}) + d({1}, {2})")]
    TriangleViolation(String, String, String),
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("edge {0}-{1} must have positive length")]
    NonPositiveEdge(String, String),
    #[error("edge {0}-{1} is a loop")]
    LoopEdge(String, String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("unknown basepoint {0:?}")]
    UnknownBasepoint(String),
    #[error("gluing set A is empty")]
    EmptyA,
    #[error("A is listed with {0} labels in X but {1} in Y")]
    ABijection(usize, usize),
    #[error("A is not isometric: d_X({0}, {1}) != d_Y({2}, {3})")]
    NonIsometricA(String, String, String, String),
    #[error("label {0:?} occurs on both sides outside A")]
    LabelClash(String),
    #[error("Y_0 is empty")]
    EmptyY0,
    #[error("a circle sample needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("circumference must be positive")]
    NonPositiveCircumference,
}

/// Labeled points with a dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Length>,
    pseudo: bool,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    labels: Vec<String>,
    matrix: Vec<Vec<Length>>,
    #[serde(default)]
    is_pseudo: bool,
}

impl TryFrom<RawSpace> for FiniteMetricSpace {
    type Error = MetricError;
    fn try_from(r: RawSpace) -> Result<Self, MetricError> {
        FiniteMetricSpace::new(r.labels, r.matrix, r.is_pseudo)
    }
}

impl From<FiniteMetricSpace> for RawSpace {
    fn from(m: FiniteMetricSpace) -> RawSpace {
        RawSpace {
            matrix: m.matrix(),
            labels: m.labels,
            is_pseudo: m.pseudo,
        }
    }
}

impl FiniteMetricSpace {
    /// Validated constructor. The triangle inequality is skipped for pseudo spaces.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Length>>, is_pseudo: bool) -> Result<FiniteMetricSpace, MetricError> {
        let n = labels.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(MetricError::NotSquare {
                rows: matrix.len(),
                labels: n,
            });
        }
        let index = build_index(&labels)?;
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal(labels[i].clone()));
            }
            for j in 0..n {
                if matrix[i][j].is_negative() {
                    return Err(MetricError::NegativeDistance(labels[i].clone(), labels[j].clone()));
                }
                if matrix[i][j] != matrix[j][i] {
                    return Err(MetricError::AsymmetricMatrix(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let dist: Vec<Length> = matrix.into_iter().flatten().collect();
        let space = FiniteMetricSpace {
            labels,
            dist,
            pseudo: is_pseudo,
            index,
        };
        if !is_pseudo {
            if let Some((a, b, c)) = space.triangle_violation() {
                return Err(MetricError::TriangleViolation(
                    space.labels[a].clone(),
                    space.labels[b].clone(),
                    space.labels[c].clone(),
                ));
            }
        }
        Ok(space)
    }

    /// For constructions whose output is a metric by design.
    pub(crate) fn from_parts(labels: Vec<String>, dist: Vec<Length>, pseudo: bool) -> Result<Self, MetricError> {
        debug_assert_eq!(dist.len(), labels.len() * labels.len());
        let index = build_index(&labels)?;
        Ok(FiniteMetricSpace {
            labels,
            dist,
            pseudo,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, MetricError> {
        labels
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| MetricError::UnknownLabel(l.as_ref().to_string()))
            })
            .collect()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> Length {
        self.dist[i * self.labels.len() + j]
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<Length> {
        Some(self.d(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn matrix(&self) -> Vec<Vec<Length>> {
        let n = self.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }

    /// Largest pairwise distance among `points` (zero for fewer than two).
    pub fn diameter(&self, points: &[usize]) -> Length {
        let mut best = Length::ZERO;
        for (k, &i) in points.iter().enumerate() {
            for &j in &points[k + 1..] {
                best = best.max(self.d(i, j));
            }
        }
        best
    }

    pub fn diam(&self) -> Length {
        self.dist.iter().copied().max().unwrap_or(Length::ZERO)
    }

    /// Subspace on `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> FiniteMetricSpace {
        let labels: Vec<String> = points.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = Vec::with_capacity(points.len() * points.len());
        for &i in points {
            for &j in points {
                dist.push(self.d(i, j));
            }
        }
        FiniteMetricSpace::from_parts(labels, dist, self.pseudo).expect("restriction keeps labels distinct")
    }

    pub fn restrict_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<FiniteMetricSpace, MetricError> {
        Ok(self.restrict(&self.indices_of(labels)?))
    }

    /// Distinct distance values, increasing, including 0 when nonempty.
    pub fn distinct_distances(&self) -> Vec<Length> {
        let mut v = self.dist.clone();
        if !v.is_empty() {
            v.push(Length::ZERO);
        }
        v.sort_unstable();
        v.dedup();
        v
    }

    /// First triple `(a, b, c)` with `d(a,c) > d(a,b) + d(b,c)`.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        match scaled_integers(&self.dist) {
            Some(ints) => {
                for i in 0..n {
                    for j in 0..n {
                        let dij = ints[i * n + j] as i128;
                        for k in 0..n {
                            if ints[i * n + k] as i128 > dij + ints[j * n + k] as i128 {
                                return Some((i, j, k));
                            }
                        }
                    }
                }
                None
            }
            None => {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if self.d(i, k) > self.d(i, j) + self.d(j, k) {
                                return Some((i, j, k));
                            }
                        }
                    }
                }
                None
            }
        }
    }
}

fn build_index(labels: &[String]) -> Result<HashMap<String, usize>, MetricError> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(MetricError::DuplicateLabel(l.clone()));
        }
    }
    Ok(index)
}

/// All values over a common denominator, if that fits in an `i64`.
pub(crate) fn scaled_integers(values: &[Length]) -> Option<Vec<i64>> {
    let mut lcm: i64 = 1;
    for v in values {
        let d = v.denom();
        if lcm % d != 0 {
            lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
        }
    }
    values.iter().map(|v| v.numer().checked_mul(lcm / v.denom())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: String,
    pub v: String,
    pub len: Length,
    /// Overrides the graph-wide subdivision count for this edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivision: Option<usize>,
}

/// Vertices and positively weighted edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<GraphEdge>,
    subdivision: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertices: Vec<String>,
    edges: Vec<GraphEdge>,
    #[serde(default)]
    subdivision: usize,
}

impl TryFrom<RawGraph> for MetricGraph {
    type Error = MetricError;
    fn try_from(r: RawGraph) -> Result<Self, MetricError> {
        MetricGraph::new(r.vertices, r.edges, r.subdivision)
    }
}

impl From<MetricGraph> for RawGraph {
    fn from(g: MetricGraph) -> RawGraph {
        RawGraph {
            vertices: g.vertices,
            edges: g.edges,
            subdivision: g.subdivision,
        }
    }
}

impl MetricGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<GraphEdge>, subdivision: usize) -> Result<MetricGraph, MetricError> {
        let index = build_index(&vertices)?;
        for e in &edges {
            for end in [&e.u, &e.v] {
                if !index.contains_key(end) {
                    return Err(MetricError::UnknownLabel(end.clone()));
                }
            }
            if e.u == e.v {
                return Err(MetricError::LoopEdge(e.u.clone(), e.v.clone()));
            }
            if e.len <= Length::ZERO {
                return Err(MetricError::NonPositiveEdge(e.u.clone(), e.v.clone()));
            }
        }
        Ok(MetricGraph {
            vertices,
            edges,
            subdivision,
            index,
        })
    }

    /// Unit-length edges given as label pairs.
    pub fn unit<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<MetricGraph, MetricError> {
        MetricGraph::new(
            vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges
                .iter()
                .map(|(u, v)| GraphEdge {
                    u: u.as_ref().to_string(),
                    v: v.as_ref().to_string(),
                    len: Length::ONE,
                    subdivision: None,
                })
                .collect(),
            0,
        )
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn subdivision(&self) -> usize {
        self.subdivision
    }

    pub fn with_subdivision(mut self, k: usize) -> MetricGraph {
        self.subdivision = k;
        self
    }

    pub fn vertex_index(&self, v: &str) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.index.contains_key(v)
    }

    /// Shortest edge joining `u` and `v`, if any.
    pub fn edge_between(&self, u: &str, v: &str) -> Option<&GraphEdge> {
        self.edges
            .iter()
            .filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .min_by_key(|e| e.len)
    }

    pub fn degree(&self, v: &str) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    /// Distinct neighbours, sorted by vertex index.
    pub fn neighbors(&self, v: &str) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.u == v {
                    Some(e.v.as_str())
                } else if e.v == v {
                    Some(e.u.as_str())
                } else {
                    None
                }
            })
            .collect();
        out.sort_by_key(|w| self.index[*w]);
        out.dedup();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = HashSet::new();
        let mut stack = vec![self.vertices[0].as_str()];
        seen.insert(self.vertices[0].as_str());
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    pub fn total_length(&self) -> Length {
        self.edges.iter().map(|e| e.len).sum()
    }
}

/// Label used for the `i`-th interior sample (1-based) on edge `u`-`v`.
pub fn subdivision_label(u: &str, v: &str, i: usize) -> String {
    format!("{u}~{v}#{i}")
}

/// Interior sample labels of one edge, from `u` towards `v`.
pub fn edge_sample_labels(g: &MetricGraph, e: &GraphEdge) -> Vec<String> {
    let k = e.subdivision.unwrap_or(g.subdivision);
    (1..=k).map(|i| subdivision_label(&e.u, &e.v, i)).collect()
}

/// Point labels of [`graph_metric`], in the same order.
pub fn sample_labels(g: &MetricGraph) -> Vec<String> {
    let mut out = g.vertices.clone();
    for e in &g.edges {
        out.extend(edge_sample_labels(g, e));
    }
    out
}

/// Weighted adjacency lists of the subdivided graph plus point labels.
fn subdivide(g: &MetricGraph) -> (Vec<String>, Vec<Vec<(usize, Length)>>) {
    let mut labels = g.vertices.clone();
    let mut adj: Vec<Vec<(usize, Length)>> = vec![Vec::new(); labels.len()];
    for e in &g.edges {
        let k = e.subdivision.unwrap_or(g.subdivision);
        let step = e.len / (k as i64 + 1);
        let mut prev = g.index[&e.u];
        for i in 1..=k {
            let id = labels.len();
            labels.push(subdivision_label(&e.u, &e.v, i));
            adj.push(Vec::new());
            adj[prev].push((id, step));
            adj[id].push((prev, step));
            prev = id;
        }
        let last = g.index[&e.v];
        adj[prev].push((last, step));
        adj[last].push((prev, step));
    }
    (labels, adj)
}

pub(crate) fn dijkstra(adj: &[Vec<(usize, Length)>], src: usize) -> Vec<Option<Length>> {
    let mut dist: Vec<Option<Length>> = vec![None; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = Some(Length::ZERO);
    heap.push(Reverse((Length::ZERO, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Shortest-path metric on the vertices and subdivision points of `g`.
///
/// Points are the vertices in order, then each edge's interior samples in
/// edge order (see [`subdivision_label`]).
pub fn graph_metric(g: &MetricGraph) -> Result<FiniteMetricSpace, MetricError> {
    let (labels, adj) = subdivide(g);
    let n = labels.len();
    let rows = par::map_range(n, |s| dijkstra(&adj, s));
    let mut dist = Vec::with_capacity(n * n);
    for row in rows {
        for d in row {
            dist.push(d.ok_or(MetricError::DisconnectedGraph)?);
        }
    }
    FiniteMetricSpace::from_parts(labels, dist, false)
}

/// A as a bijection between labels of X and labels of Y.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingSpec {
    pub a_labels_x: Vec<String>,
    pub a_labels_y: Vec<String>,
}

impl GluingSpec {
    /// A carries the same labels on both sides.
    pub fn shared<S: AsRef<str>>(labels: &[S]) -> GluingSpec {
        let v: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        GluingSpec {
            a_labels_x: v.clone(),
            a_labels_y: v,
        }
    }
}

/// Metric gluing of `x` and `y` along A.
///
/// Output points are the points of `x` in order followed by the points of `y`
/// outside A; A keeps its labels from `x`.
pub fn glue_metric(x: &FiniteMetricSpace, y: &FiniteMetricSpace, spec: &GluingSpec) -> Result<FiniteMetricSpace, MetricError> {
    if spec.a_labels_x.is_empty() || spec.a_labels_y.is_empty() {
        return Err(MetricError::EmptyA);
    }
    if spec.a_labels_x.len() != spec.a_labels_y.len() {
        return Err(MetricError::ABijection(spec.a_labels_x.len(), spec.a_labels_y.len()));
    }
    let ax = x.indices_of(&spec.a_labels_x)?;
    let ay = y.indices_of(&spec.a_labels_y)?;
    for i in 0..ax.len() {
        for j in 0..ax.len() {
            if x.d(ax[i], ax[j]) != y.d(ay[i], ay[j]) {
                return Err(MetricError::NonIsometricA(
                    x.labels[ax[i]].clone(),
                    x.labels[ax[j]].clone(),
                    y.labels[ay[i]].clone(),
                    y.labels[ay[j]].clone(),
                ));
            }
        }
    }
    let in_ay: HashSet<usize> = ay.iter().copied().collect();
    // position of each point of the output: Left(i in x) or Right(j in y)
    let y_rest: Vec<usize> = (0..y.len()).filter(|j| !in_ay.contains(j)).collect();
    let mut labels = x.labels.clone();
    for &j in &y_rest {
        if x.index_of(&y.labels[j]).is_some() {
            return Err(MetricError::LabelClash(y.labels[j].clone()));
        }
        labels.push(y.labels[j].clone());
    }
    let nx = x.len();
    let n = labels.len();
    let mut dist = vec![Length::ZERO; n * n];
    for i in 0..nx {
        for j in 0..nx {
            dist[i * n + j] = x.d(i, j);
        }
    }
    for (p, &s) in y_rest.iter().enumerate() {
        for (q, &t) in y_rest.iter().enumerate() {
            dist[(nx + p) * n + nx + q] = y.d(s, t);
        }
    }
    for i in 0..nx {
        for (p, &t) in y_rest.iter().enumerate() {
            let best = ax
                .iter()
                .zip(&ay)
                .map(|(&a, &b)| x.d(i, a) + y.d(b, t))
                .min()
                .expect("A is nonempty");
            dist[i * n + nx + p] = best;
            dist[(nx + p) * n + i] = best;
        }
    }
    FiniteMetricSpace::from_parts(labels, dist, x.pseudo || y.pseudo)
}

/// Gluing along the single point `base_x` ~ `base_y`.
pub fn wedge_metric(x: &FiniteMetricSpace, base_x: &str, y: &FiniteMetricSpace, base_y: &str) -> Result<FiniteMetricSpace, MetricError> {
    for (space, b) in [(x, base_x), (y, base_y)] {
        if space.index_of(b).is_none() {
            return Err(MetricError::UnknownBasepoint(b.to_string()));
        }
    }
    glue_metric(
        x,
        y,
        &GluingSpec {
            a_labels_x: vec![base_x.to_string()],
            a_labels_y: vec![base_y.to_string()],
        },
    )
}

/// Label of the point `(x, y)` of a product.
pub fn product_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// `(X × Y_0) ∪ (X_0 × Y)` with the max metric.
///
/// Points of `X × Y_0` come first (x-major), then `X_0 × (Y \ Y_0)`.
pub fn sup_product_subset<S: AsRef<str>>(
    x: &FiniteMetricSpace,
    x0: &[S],
    y: &FiniteMetricSpace,
    y0: &[S],
) -> Result<FiniteMetricSpace, MetricError> {
    if y0.is_empty() {
        return Err(MetricError::EmptyY0);
    }
    let x0 = x.indices_of(x0)?;
    let y0 = y.indices_of(y0)?;
    let y0_set: HashSet<usize> = y0.iter().copied().collect();
    let mut points: Vec<(usize, usize)> = Vec::new();
    for i in 0..x.len() {
        for &j in &y0 {
            points.push((i, j));
        }
    }
    for &i in &x0 {
        for j in (0..y.len()).filter(|j| !y0_set.contains(j)) {
            points.push((i, j));
        }
    }
    let mut seen = HashSet::new();
    points.retain(|p| seen.insert(*p));
    let labels: Vec<String> = points.iter().map(|&(i, j)| product_label(&x.labels[i], &y.labels[j])).collect();
    let n = points.len();
    let mut dist = Vec::with_capacity(n * n);
    for &(i, j) in &points {
        for &(k, l) in &points {
            dist.push(x.d(i, k).max(y.d(j, l)));
        }
    }
    FiniteMetricSpace::from_parts(labels, dist, x.pseudo || y.pseudo)
}

/// `n` equally spaced points `p0..` on a circle with geodesic distance.
pub fn sample_circle(circumference: Length, n: usize) -> Result<FiniteMetricSpace, MetricError> {
    if n < 3 {
        return Err(MetricError::TooFewPoints(n));
    }
    if circumference <= Length::ZERO {
        return Err(MetricError::NonPositiveCircumference);
    }
    let step = circumference / n as i64;
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut dist = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let k = i.abs_diff(j);
            dist.push(step * k.min(n - k) as i64);
        }
    }
    FiniteMetricSpace::from_parts(labels, dist, false)
}
