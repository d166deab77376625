//! Simplicial complexes and scale filtrations.
//!
//! A complex carries a label universe; vertices are indices into it. Two
//! complexes built over the same space share the universe and can be compared
//! simplex by simplex.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::cliques::{all_cliques, full_set, BitGraph};
use crate::length::Length;
use crate::metric::FiniteMetricSpace;
use crate::par;

pub type Vertex = u32;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),
    #[error("unknown landmark {0:?}")]
    UnknownLandmark(String),
    #[error("vertex {0} is outside the label universe")]
    VertexOutOfRange(Vertex),
    #[error("simplex must be nonempty without repeated vertices")]
    BadSimplex,
    #[error("face {face:?} of {simplex:?} is missing")]
    NotClosed { face: Vec<String>, simplex: Vec<String> },
    #[error("label {0:?} occurs in both complexes")]
    VertexClash(String),
    #[error("unknown basepoint {0:?}")]
    UnknownBasepoint(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
}

/// Nonempty strictly increasing vertex list.
///
/// Ordered by dimension first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(SmallVec<[Vertex; 8]>);

impl Simplex {
    /// Sorts the input; `None` if it is empty or has repeats.
    pub fn new<I: IntoIterator<Item = Vertex>>(vs: I) -> Option<Simplex> {
        let mut v: SmallVec<[Vertex; 8]> = vs.into_iter().collect();
        v.sort_unstable();
        if v.is_empty() || v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex(v))
    }

    pub(crate) fn from_sorted(v: &[Vertex]) -> Simplex {
        debug_assert!(!v.is_empty() && v.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(v))
    }

    pub fn vertex(v: Vertex) -> Simplex {
        Simplex(smallvec::smallvec![v])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.0.iter().all(|&v| !other.contains(v))
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v = self.0.clone();
        v.extend(other.0.iter().copied().filter(|&w| !self.contains(w)));
        v.sort_unstable();
        Simplex(v)
    }

    pub fn with_vertex(&self, w: Vertex) -> Simplex {
        let mut v = self.0.clone();
        match v.binary_search(&w) {
            Ok(_) => {}
            Err(pos) => v.insert(pos, w),
        }
        Simplex(v)
    }

    /// Vertices of `self` not in `other`.
    pub fn minus(&self, other: &Simplex) -> SmallVec<[Vertex; 8]> {
        self.0.iter().copied().filter(|&v| !other.contains(v)).collect()
    }

    /// Codimension-one faces (none for a vertex).
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| Simplex(self.0.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()))
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        assert!(n < 32, "too many vertices to enumerate faces");
        (1u32..(1 << n))
            .map(|mask| Simplex((0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect()))
            .collect()
    }

    pub fn remap(&self, map: &[Vertex]) -> Simplex {
        Simplex::new(self.0.iter().map(|&v| map[v as usize])).expect("remap must be injective")
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Simplex) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Simplex) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Closed or open scale comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `diam <= r`
    #[default]
    Closed,
    /// `diam < r`
    Open,
}

impl Convention {
    #[inline]
    pub fn admits(self, d: Length, r: Length) -> bool {
        match self {
            Convention::Closed => d <= r,
            Convention::Open => d < r,
        }
    }
}

/// Downward-closed simplex set over a label universe.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Arc<Vec<String>>,
    simplices: BTreeSet<Simplex>,
    dim_cap: Option<usize>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.maximal_simplices().iter().map(|s| self.simplex_labels(s)))
            .finish()
    }
}

impl SimplicialComplex {
    pub fn empty(labels: Arc<Vec<String>>) -> SimplicialComplex {
        SimplicialComplex {
            labels,
            simplices: BTreeSet::new(),
            dim_cap: None,
        }
    }

    /// Checks that every simplex lies in the universe and that the set is
    /// downward closed.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(
        labels: Arc<Vec<String>>,
        simplices: I,
        dim_cap: Option<usize>,
    ) -> Result<SimplicialComplex, ComplexError> {
        let k = SimplicialComplex {
            simplices: simplices.into_iter().collect(),
            labels,
            dim_cap,
        };
        k.check_vertices()?;
        if let Some((face, simplex)) = k.closure_defect() {
            return Err(ComplexError::NotClosed {
                face: k.simplex_labels(&face),
                simplex: k.simplex_labels(&simplex),
            });
        }
        Ok(k)
    }

    /// Complex generated by `maximal` (all faces added, truncated at the cap).
    pub fn from_maximal<I: IntoIterator<Item = Simplex>>(
        labels: Arc<Vec<String>>,
        maximal: I,
        dim_cap: Option<usize>,
    ) -> Result<SimplicialComplex, ComplexError> {
        let mut simplices = BTreeSet::new();
        for s in maximal {
            for f in s.faces() {
                if dim_cap.is_none_or(|c| f.dim() <= c) {
                    simplices.insert(f);
                }
            }
        }
        let k = SimplicialComplex {
            labels,
            simplices,
            dim_cap,
        };
        k.check_vertices()?;
        Ok(k)
    }

    /// Complex generated by label lists; the universe is the labels in order
    /// of first appearance.
    pub fn from_label_sets<S: AsRef<str>>(sets: &[Vec<S>]) -> Result<SimplicialComplex, ComplexError> {
        let mut universe: Vec<String> = Vec::new();
        let mut index: HashMap<String, Vertex> = HashMap::new();
        let mut maximal = Vec::new();
        for set in sets {
            let mut vs = Vec::new();
            for l in set {
                let l = l.as_ref();
                let id = *index.entry(l.to_string()).or_insert_with(|| {
                    universe.push(l.to_string());
                    (universe.len() - 1) as Vertex
                });
                vs.push(id);
            }
            maximal.push(Simplex::new(vs).ok_or(ComplexError::BadSimplex)?);
        }
        SimplicialComplex::from_maximal(Arc::new(universe), maximal, None)
    }

    fn check_vertices(&self) -> Result<(), ComplexError> {
        let n = self.labels.len() as Vertex;
        for s in &self.simplices {
            if let Some(&v) = s.vertices().iter().find(|&&v| v >= n) {
                return Err(ComplexError::VertexOutOfRange(v));
            }
        }
        Ok(())
    }

    /// A missing facet together with the simplex that needs it.
    pub fn closure_defect(&self) -> Option<(Simplex, Simplex)> {
        self.simplices
            .iter()
            .find_map(|s| s.facets().find(|f| !self.simplices.contains(f)).map(|f| (f, s.clone())))
    }

    pub fn labels(&self) -> &Arc<Vec<String>> {
        &self.labels
    }

    pub fn dim_cap(&self) -> Option<usize> {
        self.dim_cap
    }

    pub fn set_dim_cap(&mut self, cap: Option<usize>) {
        self.dim_cap = cap;
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().next_back().map(Simplex::dim)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    /// Simplices in (dimension, lexicographic) order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn of_dim(&self, k: usize) -> impl Iterator<Item = &Simplex> {
        self.simplices
            .iter()
            .skip_while(move |s| s.dim() < k)
            .take_while(move |s| s.dim() == k)
    }

    /// Number of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = Vec::new();
        for s in &self.simplices {
            if f.len() <= s.dim() {
                f.resize(s.dim() + 1, 0);
            }
            f[s.dim()] += 1;
        }
        f
    }

    pub fn vertex_set(&self) -> Vec<Vertex> {
        self.of_dim(0).map(|s| s.vertices()[0]).collect()
    }

    pub fn is_maximal(&self, s: &Simplex) -> bool {
        (0..self.labels.len() as Vertex)
            .filter(|&v| !s.contains(v))
            .all(|v| !self.simplices.contains(&s.with_vertex(v)))
    }

    /// Maximal simplices in (dimension, lexicographic) order.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices.iter().filter(|s| self.is_maximal(s)).cloned().collect()
    }

    pub fn simplex_labels(&self, s: &Simplex) -> Vec<String> {
        s.vertices().iter().map(|&v| self.labels[v as usize].clone()).collect()
    }

    pub fn vertex_of(&self, label: &str) -> Result<Vertex, ComplexError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as Vertex)
            .ok_or_else(|| ComplexError::UnknownLabel(label.to_string()))
    }

    pub fn simplex_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Simplex, ComplexError> {
        let vs = labels.iter().map(|l| self.vertex_of(l.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Simplex::new(vs).ok_or(ComplexError::BadSimplex)
    }

    /// Simplices as sorted label lists, sorted; comparable across universes.
    pub fn label_sets(&self) -> BTreeSet<Vec<String>> {
        self.simplices
            .iter()
            .map(|s| {
                let mut v = self.simplex_labels(s);
                v.sort();
                v
            })
            .collect()
    }

    /// Same simplices re-indexed into `universe`, which must contain every
    /// label of this universe.
    pub fn into_universe(&self, universe: Arc<Vec<String>>) -> Result<SimplicialComplex, ComplexError> {
        if Arc::ptr_eq(&universe, &self.labels) || *universe == *self.labels {
            let mut k = self.clone();
            k.labels = universe;
            return Ok(k);
        }
        let index: HashMap<&str, Vertex> = universe.iter().enumerate().map(|(i, l)| (l.as_str(), i as Vertex)).collect();
        let map = self
            .labels
            .iter()
            .map(|l| index.get(l.as_str()).copied().ok_or_else(|| ComplexError::UnknownLabel(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SimplicialComplex {
            simplices: self.simplices.iter().map(|s| s.remap(&map)).collect(),
            labels: universe,
            dim_cap: self.dim_cap,
        })
    }

    pub(crate) fn insert(&mut self, s: Simplex) -> bool {
        self.simplices.insert(s)
    }

    pub(crate) fn remove(&mut self, s: &Simplex) -> bool {
        self.simplices.remove(s)
    }
}

fn min_cap(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Threshold graph of `m` at scale `r`.
pub fn threshold_graph(m: &FiniteMetricSpace, r: Length, convention: Convention) -> BitGraph {
    BitGraph::from_fn(m.len(), |i, j| convention.admits(m.d(i, j), r))
}

/// Clique complex of the threshold graph, truncated at `dim_cap`.
pub fn vietoris_rips(m: &FiniteMetricSpace, r: Length, convention: Convention, dim_cap: Option<usize>) -> SimplicialComplex {
    let labels = Arc::new(m.labels().to_vec());
    if !convention.admits(Length::ZERO, r) {
        let mut k = SimplicialComplex::empty(labels);
        k.dim_cap = dim_cap;
        return k;
    }
    let g = threshold_graph(m, r, convention);
    let cliques = all_cliques(&g, &full_set(m.len()), dim_cap.map(|c| c + 1));
    SimplicialComplex {
        labels,
        simplices: cliques.iter().map(|c| Simplex::from_sorted(c)).collect(),
        dim_cap,
    }
}

/// Nerve-style complex on `landmarks`: a set is a simplex when some point of
/// `witnesses` lies within `r` of all its members.
pub fn cech_ambient<S: AsRef<str>>(
    witnesses: &FiniteMetricSpace,
    landmarks: &[S],
    r: Length,
    convention: Convention,
    dim_cap: Option<usize>,
) -> Result<SimplicialComplex, ComplexError> {
    let idx = landmarks
        .iter()
        .map(|l| {
            witnesses
                .index_of(l.as_ref())
                .ok_or_else(|| ComplexError::UnknownLandmark(l.as_ref().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let balls = balls(witnesses, &idx, r, convention);
    let universe = Arc::new(landmarks.iter().map(|l| l.as_ref().to_string()).collect::<Vec<_>>());
    let simplices = witnessed_sets(&balls, dim_cap.map(|c| c + 1))
        .into_iter()
        .map(|(s, _)| Simplex::from_sorted(&s))
        .collect();
    Ok(SimplicialComplex {
        labels: universe,
        simplices,
        dim_cap,
    })
}

/// `balls[i]` = witnesses within `r` of point `centers[i]`.
pub(crate) fn balls(w: &FiniteMetricSpace, centers: &[usize], r: Length, convention: Convention) -> Vec<FixedBitSet> {
    centers
        .iter()
        .map(|&c| {
            let mut b = FixedBitSet::with_capacity(w.len());
            for j in 0..w.len() {
                if convention.admits(w.d(c, j), r) {
                    b.insert(j);
                }
            }
            b
        })
        .collect()
}

/// Every index set (increasing) whose balls share a witness, with the common
/// witnesses.
pub(crate) fn witnessed_sets(balls: &[FixedBitSet], max_size: Option<usize>) -> Vec<(Vec<u32>, FixedBitSet)> {
    let per_root = par::map_range(balls.len(), |i| {
        let mut out = Vec::new();
        if !balls[i].is_clear() {
            let mut current = vec![i as u32];
            extend_witnessed(balls, &mut current, &balls[i], max_size, &mut out);
        }
        out
    });
    per_root.into_iter().flatten().collect()
}

fn extend_witnessed(
    balls: &[FixedBitSet],
    current: &mut Vec<u32>,
    common: &FixedBitSet,
    max_size: Option<usize>,
    out: &mut Vec<(Vec<u32>, FixedBitSet)>,
) {
    out.push((current.clone(), common.clone()));
    if max_size.is_some_and(|m| current.len() >= m) {
        return;
    }
    let last = *current.last().expect("nonempty") as usize;
    for j in last + 1..balls.len() {
        let mut next = common.clone();
        next.intersect_with(&balls[j]);
        if !next.is_clear() {
            current.push(j as u32);
            extend_witnessed(balls, current, &next, max_size, out);
            current.pop();
        }
    }
}

/// Union over a merged universe (labels of `k1`, then new labels of `k2`).
pub fn union_complexes(k1: &SimplicialComplex, k2: &SimplicialComplex) -> SimplicialComplex {
    let universe = if Arc::ptr_eq(&k1.labels, &k2.labels) || k1.labels == k2.labels {
        k1.labels.clone()
    } else {
        let mut u = (*k1.labels).clone();
        for l in k2.labels.iter() {
            if !k1.labels.contains(l) {
                u.push(l.clone());
            }
        }
        Arc::new(u)
    };
    let a = k1.into_universe(universe.clone()).expect("universe contains k1 labels");
    let b = k2.into_universe(universe).expect("universe contains k2 labels");
    let mut out = a;
    out.simplices.extend(b.simplices);
    out.dim_cap = min_cap(k1.dim_cap, k2.dim_cap);
    out
}

/// Identifies `b2` with `b1`; all other labels must differ.
pub fn wedge_complexes(k1: &SimplicialComplex, b1: &str, k2: &SimplicialComplex, b2: &str) -> Result<SimplicialComplex, ComplexError> {
    let v1 = k1.vertex_of(b1).map_err(|_| ComplexError::UnknownBasepoint(b1.into()))?;
    let v2 = k2.vertex_of(b2).map_err(|_| ComplexError::UnknownBasepoint(b2.into()))?;
    if !k1.contains(&Simplex::vertex(v1)) {
        return Err(ComplexError::UnknownBasepoint(b1.into()));
    }
    if !k2.contains(&Simplex::vertex(v2)) {
        return Err(ComplexError::UnknownBasepoint(b2.into()));
    }
    let mut universe = (*k1.labels).clone();
    let mut map = Vec::with_capacity(k2.labels.len());
    for (i, l) in k2.labels.iter().enumerate() {
        if i as Vertex == v2 {
            map.push(v1);
        } else if k1.labels.contains(l) {
            return Err(ComplexError::VertexClash(l.clone()));
        } else {
            universe.push(l.clone());
            map.push((universe.len() - 1) as Vertex);
        }
    }
    let mut out = k1.clone();
    out.labels = Arc::new(universe);
    out.simplices.extend(k2.simplices.iter().map(|s| s.remap(&map)));
    out.dim_cap = min_cap(k1.dim_cap, k2.dim_cap);
    Ok(out)
}

/// Simplices of `k` whose vertices all carry labels in `subset`.
pub fn induced<S: AsRef<str>>(k: &SimplicialComplex, subset: &[S]) -> SimplicialComplex {
    let keep: Vec<bool> = k.labels.iter().map(|l| subset.iter().any(|s| s.as_ref() == l)).collect();
    SimplicialComplex {
        labels: k.labels.clone(),
        simplices: k
            .simplices
            .iter()
            .filter(|s| s.vertices().iter().all(|&v| keep[v as usize]))
            .cloned()
            .collect(),
        dim_cap: k.dim_cap,
    }
}

/// Scale-ordered simplex sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    labels: Arc<Vec<String>>,
    entries: Vec<(Simplex, Length)>,
    dim_cap: Option<usize>,
}

impl Filtration {
    pub fn new(labels: Arc<Vec<String>>, entries: Vec<(Simplex, Length)>, dim_cap: Option<usize>) -> Result<Filtration, ComplexError> {
        let f = Filtration { labels, entries, dim_cap };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        let n = self.labels.len() as Vertex;
        let mut seen: HashMap<&Simplex, usize> = HashMap::with_capacity(self.entries.len());
        for (pos, (s, t)) in self.entries.iter().enumerate() {
            if s.vertices().iter().any(|&v| v >= n) {
                return Err(ComplexError::InvalidFiltration(format!("{s:?} leaves the label universe")));
            }
            if pos > 0 && *t < self.entries[pos - 1].1 {
                return Err(ComplexError::InvalidFiltration(format!("scale decreases at position {pos}")));
            }
            for f in s.facets() {
                if !seen.contains_key(&f) {
                    return Err(ComplexError::InvalidFiltration(format!("face {f:?} of {s:?} comes later or never")));
                }
            }
            if seen.insert(s, pos).is_some() {
                return Err(ComplexError::InvalidFiltration(format!("{s:?} listed twice")));
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &Arc<Vec<String>> {
        &self.labels
    }

    pub fn entries(&self) -> &[(Simplex, Length)] {
        &self.entries
    }

    pub fn dim_cap(&self) -> Option<usize> {
        self.dim_cap
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Complex of all simplices admitted at `r`.
    pub fn complex_at(&self, r: Length, convention: Convention) -> SimplicialComplex {
        SimplicialComplex {
            labels: self.labels.clone(),
            simplices: self
                .entries
                .iter()
                .filter(|(_, t)| convention.admits(*t, r))
                .map(|(s, _)| s.clone())
                .collect(),
            dim_cap: self.dim_cap,
        }
    }

    /// Distinct scales, increasing.
    pub fn scales(&self) -> Vec<Length> {
        let mut v: Vec<Length> = self.entries.iter().map(|(_, t)| *t).collect();
        v.dedup();
        v
    }
}

/// Every simplex up to `dim_cap` at scale diam(σ).
pub fn vr_filtration(m: &FiniteMetricSpace, dim_cap: usize) -> Filtration {
    vr_filtration_to(m, dim_cap, None)
}

/// As [`vr_filtration`], keeping only simplices with diameter at most `max_scale`.
pub fn vr_filtration_to(m: &FiniteMetricSpace, dim_cap: usize, max_scale: Option<Length>) -> Filtration {
    let scales = m.distinct_distances();
    let n = m.len();
    let rank_of: HashMap<Length, u32> = scales.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
    let rank: Vec<u32> = (0..n * n).map(|k| rank_of[&m.d(k / n, k % n)]).collect();
    let limit = match max_scale {
        Some(r) => scales.partition_point(|&s| s <= r) as u32,
        None => scales.len() as u32,
    };
    let g = BitGraph::from_fn(n, |i, j| rank[i * n + j] < limit);
    let cliques = all_cliques(&g, &full_set(n), Some(dim_cap + 1));
    let mut entries: Vec<(u32, Simplex)> = cliques
        .iter()
        .map(|c| {
            let mut d = 0;
            for (a, &i) in c.iter().enumerate() {
                for &j in &c[a + 1..] {
                    d = d.max(rank[i as usize * n + j as usize]);
                }
            }
            (d, Simplex::from_sorted(c))
        })
        .collect();
    entries.sort_unstable();
    Filtration {
        labels: Arc::new(m.labels().to_vec()),
        entries: entries.into_iter().map(|(d, s)| (s, scales[d as usize])).collect(),
        dim_cap: Some(dim_cap),
    }
}

/// Distinct pairwise distances, increasing, starting at 0.
pub fn critical_scales(m: &FiniteMetricSpace) -> Vec<Length> {
    m.distinct_distances()
}
