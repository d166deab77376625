//! GF(2) homology: Betti numbers, persistence diagrams and their comparison.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::families::{build_recipe, FamilyError, GluingRecipe};
use crate::length::Length;
use crate::metric::{graph_metric, MetricGraph};
use crate::par;
use crate::simplicial::{vr_filtration, ComplexError, Convention, Filtration, Simplex, SimplicialComplex};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum HomologyError {
    #[error("homology up to dimension {cap} needs simplices of dimension {needed}, enumerated only to {have}")]
    DimensionCapTooLow { cap: usize, needed: usize, have: usize },
    #[error(transparent)]
    InvalidFiltration(#[from] ComplexError),
    #[error("recipe is not admissible: {0}")]
    RecipeNotAdmissible(Box<FamilyError>),
}

/// Unreduced Betti numbers in dimensions `0..=cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn check_cap(dim_cap: Option<usize>, cap: usize) -> Result<(), HomologyError> {
    match dim_cap {
        Some(have) if have < cap + 1 => Err(HomologyError::DimensionCapTooLow {
            cap,
            needed: cap + 1,
            have,
        }),
        _ => Ok(()),
    }
}

/// Column reduction over GF(2) with columns as sorted row lists.
///
/// Columns are handed over dimension block by dimension block, highest first,
/// so rows that already serve as pivots can be cleared without reduction.
struct Reducer {
    pivot_of_row: Vec<Option<usize>>,
    reduced: Vec<Vec<usize>>,
    cleared: Vec<bool>,
}

impl Reducer {
    fn new(n: usize) -> Reducer {
        Reducer {
            pivot_of_row: vec![None; n],
            reduced: vec![Vec::new(); n],
            cleared: vec![false; n],
        }
    }

    /// Reduces column `j`; returns its pivot row.
    fn reduce(&mut self, j: usize, mut col: Vec<usize>) -> Option<usize> {
        if self.cleared[j] {
            return None;
        }
        while let Some(&low) = col.last() {
            match self.pivot_of_row[low] {
                Some(other) => col = sym_diff(&col, &self.reduced[other]),
                None => {
                    self.pivot_of_row[low] = Some(j);
                    // the column of `low` would reduce to zero
                    self.cleared[low] = true;
                    self.reduced[j] = col;
                    return Some(low);
                }
            }
        }
        None
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Boundary columns of `order` (faces looked up by position), grouped by
/// dimension, highest dimension first.
fn boundary_blocks(order: &[&Simplex], max_dim: usize) -> Vec<Vec<(usize, Vec<usize>)>> {
    let pos: HashMap<&Simplex, usize> = order.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut blocks: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); max_dim + 1];
    for (j, s) in order.iter().enumerate() {
        let d = s.dim();
        if d == 0 || d > max_dim {
            continue;
        }
        let mut col: Vec<usize> = s.facets().map(|f| pos[&f]).collect();
        col.sort_unstable();
        blocks[d].push((j, col));
    }
    blocks.reverse();
    blocks
}

/// Betti numbers of `k` in dimensions `0..=cap`.
pub fn betti(k: &SimplicialComplex, cap: usize) -> Result<BettiVector, HomologyError> {
    check_cap(k.dim_cap(), cap)?;
    let order: Vec<&Simplex> = k.iter().take_while(|s| s.dim() <= cap + 1).collect();
    let mut counts = vec![0usize; cap + 2];
    for s in &order {
        counts[s.dim()] += 1;
    }
    let mut rank = vec![0usize; cap + 2];
    let mut red = Reducer::new(order.len());
    for block in boundary_blocks(&order, cap + 1) {
        for (j, col) in block {
            if red.reduce(j, col).is_some() {
                rank[order[j].dim()] += 1;
            }
        }
    }
    Ok(BettiVector((0..=cap).map(|i| counts[i] - rank[i] - rank[i + 1]).collect()))
}

/// Death of a persistence class: a scale or never.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Death {
    At(Length),
    Never,
}

impl Serialize for Death {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Death::At(t) => t.serialize(s),
            Death::Never => s.serialize_str("inf"),
        }
    }
}

struct DeathVisitor;

impl Visitor<'_> for DeathVisitor {
    type Value = Death;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a length or \"inf\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Death, E> {
        Ok(Death::At(Length::int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Death, E> {
        i64::try_from(v).map(|v| Death::At(Length::int(v))).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Death, E> {
        Length::from_f64(v).map(Death::At).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Death, E> {
        if v == "inf" {
            Ok(Death::Never)
        } else {
            v.parse().map(Death::At).map_err(E::custom)
        }
    }
}

impl<'de> Deserialize<'de> for Death {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Death, D::Error> {
        d.deserialize_any(DeathVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PersistencePoint(pub Length, pub Death);

impl PersistencePoint {
    pub fn finite(birth: Length, death: Length) -> PersistencePoint {
        PersistencePoint(birth, Death::At(death))
    }

    pub fn essential(birth: Length) -> PersistencePoint {
        PersistencePoint(birth, Death::Never)
    }

    pub fn birth(&self) -> Length {
        self.0
    }

    pub fn death(&self) -> Death {
        self.1
    }
}

/// Per-dimension multisets of `(birth, death)`, each kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PersistenceDiagram {
    dims: BTreeMap<usize, Vec<PersistencePoint>>,
}

#[derive(Serialize, Deserialize)]
struct DiagramEntry {
    dim: usize,
    points: Vec<PersistencePoint>,
}

impl Serialize for PersistenceDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<DiagramEntry> = self
            .dims
            .iter()
            .map(|(&dim, pts)| DiagramEntry { dim, points: pts.clone() })
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PersistenceDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<PersistenceDiagram, D::Error> {
        let entries = Vec::<DiagramEntry>::deserialize(d)?;
        let mut out = PersistenceDiagram::default();
        for e in entries {
            for p in e.points {
                out.push(e.dim, p);
            }
        }
        out.normalize();
        Ok(out)
    }
}

impl PersistenceDiagram {
    pub fn push(&mut self, dim: usize, p: PersistencePoint) {
        self.dims.entry(dim).or_default().push(p);
    }

    fn normalize(&mut self) {
        self.dims.retain(|_, v| !v.is_empty());
        for v in self.dims.values_mut() {
            v.sort_unstable();
        }
    }

    pub fn points(&self, dim: usize) -> &[PersistencePoint] {
        self.dims.get(&dim).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Dimensions with at least one point.
    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.dims.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Only dimensions `>= k`.
    pub fn from_dim(&self, k: usize) -> PersistenceDiagram {
        PersistenceDiagram {
            dims: self.dims.range(k..).map(|(&d, v)| (d, v.clone())).collect(),
        }
    }

    /// Multiset union.
    pub fn union(&self, other: &PersistenceDiagram) -> PersistenceDiagram {
        let mut out = self.clone();
        for (&d, pts) in &other.dims {
            out.dims.entry(d).or_default().extend(pts.iter().copied());
        }
        out.normalize();
        out
    }

    /// Number of classes alive at `r` (closed convention), per dimension.
    pub fn rank_at(&self, dim: usize, r: Length) -> usize {
        self.points(dim)
            .iter()
            .filter(|p| {
                p.birth() <= r
                    && match p.death() {
                        Death::At(t) => r < t,
                        Death::Never => true,
                    }
            })
            .count()
    }
}

/// Standard persistence pairing of `f` in dimensions `0..=cap`. Pairs born
/// and killed at the same scale are dropped.
pub fn persistence(f: &Filtration, cap: usize) -> Result<PersistenceDiagram, HomologyError> {
    f.validate()?;
    check_cap(f.dim_cap(), cap)?;
    let entries = f.entries();
    let order: Vec<&Simplex> = entries.iter().map(|(s, _)| s).collect();
    let mut red = Reducer::new(order.len());
    let mut paired = vec![false; order.len()];
    let mut out = PersistenceDiagram::default();
    for block in boundary_blocks(&order, cap + 1) {
        for (j, col) in block {
            if let Some(low) = red.reduce(j, col) {
                paired[low] = true;
                paired[j] = true;
                let (birth, death) = (entries[low].1, entries[j].1);
                if birth < death {
                    out.push(order[low].dim(), PersistencePoint::finite(birth, death));
                }
            }
        }
    }
    for (j, s) in order.iter().enumerate() {
        if s.dim() <= cap && !paired[j] && !red.cleared[j] {
            out.push(s.dim(), PersistencePoint::essential(entries[j].1));
        }
    }
    out.normalize();
    Ok(out)
}

/// Outcome of a diagram comparison; on mismatch, a point without partner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramComparison {
    pub equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub dim: usize,
    /// `"left"` if the unmatched point comes from the first diagram.
    pub side: &'static str,
    pub point: PersistencePoint,
}

fn close(a: &PersistencePoint, b: &PersistencePoint, tol: Length) -> bool {
    let near = |x: Length, y: Length| if x > y { x - y <= tol } else { y - x <= tol };
    near(a.0, b.0)
        && match (a.1, b.1) {
            (Death::At(x), Death::At(y)) => near(x, y),
            (Death::Never, Death::Never) => true,
            _ => false,
        }
}

/// Maximum bipartite matching (augmenting paths); returns an unmatched index
/// on each side if the matching is not perfect.
fn unmatched(left: &[PersistencePoint], right: &[PersistencePoint], tol: Length) -> (Option<usize>, Option<usize>) {
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|a| (0..right.len()).filter(|&j| close(a, &right[j], tol)).collect())
        .collect();
    let mut match_r: Vec<Option<usize>> = vec![None; right.len()];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], match_r: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                if match_r[j].is_none_or(|k| augment(k, adj, seen, match_r)) {
                    match_r[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut free_left = None;
    for i in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(i, &adj, &mut seen, &mut match_r) && free_left.is_none() {
            free_left = Some(i);
        }
    }
    (free_left, match_r.iter().position(Option::is_none))
}

/// Multiset equality with each coordinate within `tol`.
pub fn diagrams_equal(d1: &PersistenceDiagram, d2: &PersistenceDiagram, tol: Length) -> DiagramComparison {
    let mut dims: Vec<usize> = d1.dims().chain(d2.dims()).collect();
    dims.sort_unstable();
    dims.dedup();
    for dim in dims {
        let (a, b) = (d1.points(dim), d2.points(dim));
        match unmatched(a, b, tol) {
            (Some(i), _) => {
                return DiagramComparison {
                    equal: false,
                    mismatch: Some(Mismatch {
                        dim,
                        side: "left",
                        point: a[i],
                    }),
                }
            }
            (None, Some(j)) => {
                return DiagramComparison {
                    equal: false,
                    mismatch: Some(Mismatch {
                        dim,
                        side: "right",
                        point: b[j],
                    }),
                }
            }
            (None, None) => {}
        }
    }
    DiagramComparison {
        equal: true,
        mismatch: None,
    }
}

type CycleKey = (usize, Length, usize, Convention, usize);

fn cycle_cache() -> &'static Mutex<HashMap<CycleKey, PersistenceDiagram>> {
    static CACHE: OnceLock<Mutex<HashMap<CycleKey, PersistenceDiagram>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Diagram (dims `1..=cap`) of the sampled `k`-cycle with edges of length
/// `edge_len` and `subdivision` interior samples per edge. Cached.
pub fn cycle_diagram(k: usize, edge_len: Length, subdivision: usize, convention: Convention, cap: usize) -> PersistenceDiagram {
    let key = (k, edge_len, subdivision, convention, cap);
    if let Some(d) = cycle_cache().lock().expect("cache lock").get(&key) {
        return d.clone();
    }
    let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let edges = (0..k)
        .map(|i| crate::metric::GraphEdge {
            u: names[i].clone(),
            v: names[(i + 1) % k].clone(),
            len: edge_len,
            subdivision: None,
        })
        .collect();
    let g = MetricGraph::new(names, edges, subdivision).expect("cycle graph is valid");
    let m = graph_metric(&g).expect("cycle is connected");
    let d = persistence(&vr_filtration(&m, cap + 1), cap)
        .expect("filtration built with enough dimensions")
        .from_dim(1);
    cycle_cache().lock().expect("cache lock").insert(key, d.clone());
    d
}

/// Diagram predicted for an iterated gluing of cycles and dismantlable
/// pieces: the union of the cycle blocks' diagrams in dimensions `1..=cap`,
/// plus one essential class in dimension 0.
pub fn predicted_diagram(recipe: &GluingRecipe, cap: usize) -> Result<PersistenceDiagram, HomologyError> {
    let built = build_recipe(recipe).map_err(|e| HomologyError::RecipeNotAdmissible(Box::new(e)))?;
    let blocks = par::map(&built.cycle_blocks, |b| {
        cycle_diagram(b.k, b.edge_len, recipe.subdivision, recipe.convention, cap)
    });
    let mut out = PersistenceDiagram::default();
    out.push(0, PersistencePoint::essential(Length::ZERO));
    for d in &blocks {
        out = out.union(d);
    }
    Ok(out)
}
