//! Hypotheses of the gluing theorems and end-to-end gluing certificates.
//!
//! A [`SplitSpace`] is a glued space `X ∪_A Y` together with its two sides.
//! For every cross simplex `S = S_X ∪ S_Y` (both parts nonempty, no point of
//! A) the admissible extensions into A are computed; when they always have a
//! single maximal element, or always form a collapsible complex, the glued
//! VR complex collapses onto the union of the two sides' VR complexes and a
//! replayable certificate is produced.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::cliques::{all_cliques, maximal_cliques, BitGraph};
use crate::collapse::{gen39_sequence, greedy_collapse, replay_to, twoplusplus_sequence, CollapseCertificate, CollapseError, ReplayError};
use crate::homology::{betti, BettiVector, HomologyError};
use crate::length::Length;
use crate::metric::{dijkstra, edge_sample_labels, FiniteMetricSpace, GraphEdge, MetricError, MetricGraph};
use crate::par;
use crate::simplicial::{
    balls, threshold_graph, vietoris_rips, witnessed_sets, ComplexError, Convention, Simplex, SimplicialComplex, Vertex,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GluingError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Collapse(#[from] CollapseError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("certificate failed its own replay: {0}")]
    Replay(#[from] ReplayError),
    #[error("X and Y share no point")]
    EmptyA,
    #[error("label {0:?} belongs to neither side")]
    UncoveredLabel(String),
    #[error("cross distance d({x}, {y}) = {found} but the shortest route through A is {through_a}")]
    GluingFormula {
        x: String,
        y: String,
        found: Length,
        through_a: Length,
    },
    #[error("{0} must be a nonempty set of points of {1} outside A")]
    BadSide(&'static str, &'static str),
    #[error("diam(S_X ∪ S_Y) exceeds the scale")]
    PrecondDiameterExceeded,
    #[error("{0} is not part of the graph")]
    SubgraphNotInGraph(String),
    #[error("not a simple path: {0}")]
    NotAPath(String),
    #[error("the graphs also share {0:?} outside the gluing path")]
    OverlapBeyondPath(String),
    #[error("shared edge {0}-{1} differs between the two graphs")]
    EdgeMismatch(String, String),
    #[error("hypotheses fail at this scale")]
    HypothesisFailed(Box<ValidSetReport>),
}

/// Glued space with its two sides; `a = x ∩ y`. Index lists are increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpace {
    glued: FiniteMetricSpace,
    x: Vec<usize>,
    y: Vec<usize>,
    a: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSplit {
    glued: FiniteMetricSpace,
    x_labels: Vec<String>,
    y_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_labels: Option<Vec<String>>,
}

impl Serialize for SplitSpace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawSplit {
            glued: self.glued.clone(),
            x_labels: self.x_labels(),
            y_labels: self.y_labels(),
            a_labels: Some(self.a_labels()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SplitSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<SplitSpace, D::Error> {
        let raw = RawSplit::deserialize(d)?;
        let s = SplitSpace::new(raw.glued, &raw.x_labels, &raw.y_labels).map_err(serde::de::Error::custom)?;
        if let Some(a) = raw.a_labels {
            let given: BTreeSet<String> = a.into_iter().collect();
            let found: BTreeSet<String> = s.a_labels().into_iter().collect();
            if given != found {
                return Err(serde::de::Error::custom("a_labels must equal x_labels ∩ y_labels"));
            }
        }
        Ok(s)
    }
}

impl SplitSpace {
    /// Checks the partition and that every cross distance is realized
    /// through A.
    pub fn new<S: AsRef<str>>(glued: FiniteMetricSpace, x_labels: &[S], y_labels: &[S]) -> Result<SplitSpace, GluingError> {
        let mut x = glued.indices_of(x_labels)?;
        let mut y = glued.indices_of(y_labels)?;
        x.sort_unstable();
        x.dedup();
        y.sort_unstable();
        y.dedup();
        let in_y: HashSet<usize> = y.iter().copied().collect();
        let a: Vec<usize> = x.iter().copied().filter(|i| in_y.contains(i)).collect();
        if a.is_empty() {
            return Err(GluingError::EmptyA);
        }
        let covered: HashSet<usize> = x.iter().chain(&y).copied().collect();
        if let Some(i) = (0..glued.len()).find(|i| !covered.contains(i)) {
            return Err(GluingError::UncoveredLabel(glued.label(i).to_string()));
        }
        let s = SplitSpace { glued, x, y, a };
        for &i in &s.x_only() {
            for &j in &s.y_only() {
                let through_a = s.a.iter().map(|&k| s.glued.d(i, k) + s.glued.d(k, j)).min().expect("A is nonempty");
                let found = s.glued.d(i, j);
                if found != through_a {
                    return Err(GluingError::GluingFormula {
                        x: s.glued.label(i).to_string(),
                        y: s.glued.label(j).to_string(),
                        found,
                        through_a,
                    });
                }
            }
        }
        Ok(s)
    }

    /// Glues two spaces (see [`crate::metric::glue_metric`]).
    pub fn glue(x: &FiniteMetricSpace, y: &FiniteMetricSpace, spec: &crate::metric::GluingSpec) -> Result<SplitSpace, GluingError> {
        let glued = crate::metric::glue_metric(x, y, spec)?;
        let x_labels = x.labels().to_vec();
        let mut y_labels = spec.a_labels_x.clone();
        let in_ay: HashSet<&String> = spec.a_labels_y.iter().collect();
        y_labels.extend(y.labels().iter().filter(|l| !in_ay.contains(l)).cloned());
        SplitSpace::new(glued, &x_labels, &y_labels)
    }

    pub fn glued(&self) -> &FiniteMetricSpace {
        &self.glued
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn x_only(&self) -> Vec<usize> {
        self.x.iter().copied().filter(|i| self.a.binary_search(i).is_err()).collect()
    }

    pub fn y_only(&self) -> Vec<usize> {
        self.y.iter().copied().filter(|i| self.a.binary_search(i).is_err()).collect()
    }

    fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.glued.label(i).to_string()).collect()
    }

    pub fn x_labels(&self) -> Vec<String> {
        self.names(&self.x)
    }

    pub fn y_labels(&self) -> Vec<String> {
        self.names(&self.y)
    }

    pub fn a_labels(&self) -> Vec<String> {
        self.names(&self.a)
    }

    pub fn x_space(&self) -> FiniteMetricSpace {
        self.glued.restrict(&self.x)
    }

    pub fn y_space(&self) -> FiniteMetricSpace {
        self.glued.restrict(&self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every cross simplex has exactly one maximal extension into A, and it
    /// is nonempty.
    UniqueNonempty,
    /// Every extension complex is nonempty and collapses greedily.
    Collapsible,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub s_x: Vec<String>,
    pub s_y: Vec<String>,
    /// Maximal admissible σ ⊆ A, sorted.
    pub maximal: Vec<Vec<String>>,
    /// Common witnesses of each maximal σ (Čech only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapsible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidSetReport {
    pub scale: Length,
    pub convention: Convention,
    /// Largest simplex dimension of `S_X ∪ S_Y` enumerated; `None` means all.
    pub cap: Option<usize>,
    pub verdict: Verdict,
    pub pairs_checked: usize,
    pub records: Vec<PairRecord>,
    /// Records that break uniqueness (for a failing verdict, the ones that
    /// break collapsibility too).
    pub failures: Vec<PairRecord>,
}

/// Per cross simplex: maximal extensions as glued indices.
#[derive(Clone, Debug)]
struct PairInfo {
    sx: Vec<u32>,
    sy: Vec<u32>,
    maximal: Vec<Vec<u32>>,
    witnesses: Option<Vec<Vec<u32>>>,
}

fn bits(n: usize, idx: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for &i in idx {
        b.insert(i);
    }
    b
}

fn check_side(s: &SplitSpace, part: &[usize], side: &'static str, name: &'static str) -> Result<(), GluingError> {
    let pool = if side == "X" { s.x_only() } else { s.y_only() };
    if part.is_empty() || part.iter().any(|i| !pool.contains(i)) {
        return Err(GluingError::BadSide(name, side));
    }
    Ok(())
}

fn maximal_extensions(g: &BitGraph, a: &[usize], n: usize, cross: &[u32]) -> Vec<Vec<u32>> {
    let cand: Vec<usize> = a
        .iter()
        .copied()
        .filter(|&v| cross.iter().all(|&u| g.adjacent(u as usize, v)))
        .collect();
    if cand.is_empty() {
        return Vec::new();
    }
    maximal_cliques(g, &bits(n, &cand))
}

/// All inclusion-maximal nonempty σ ⊆ A with `S_X ∪ S_Y ∪ σ` admissible at
/// scale `r`, as sorted label lists. Empty when no point of A qualifies.
pub fn maximal_valid_sets_vr<S: AsRef<str>>(
    s: &SplitSpace,
    r: Length,
    convention: Convention,
    sx: &[S],
    sy: &[S],
) -> Result<Vec<Vec<String>>, GluingError> {
    let sx = s.glued.indices_of(sx)?;
    let sy = s.glued.indices_of(sy)?;
    check_side(s, &sx, "X", "S_X")?;
    check_side(s, &sy, "Y", "S_Y")?;
    let cross: Vec<usize> = sx.iter().chain(&sy).copied().collect();
    if !convention.admits(s.glued.diameter(&cross), r) {
        return Err(GluingError::PrecondDiameterExceeded);
    }
    let g = threshold_graph(&s.glued, r, convention);
    let cross: Vec<u32> = cross.iter().map(|&i| i as u32).collect();
    Ok(maximal_extensions(&g, &s.a, s.glued.len(), &cross)
        .iter()
        .map(|m| sorted_names(&s.glued, m))
        .collect())
}

fn sorted_names(m: &FiniteMetricSpace, idx: &[u32]) -> Vec<String> {
    let mut v: Vec<String> = idx.iter().map(|&i| m.label(i as usize).to_string()).collect();
    v.sort();
    v
}

/// The complex Σ of all nonempty σ ⊆ A with `S_X ∪ S_Y ∪ σ` admissible, and
/// whether it collapses greedily to a point.
pub fn maximal_valid_complex<S: AsRef<str>>(
    s: &SplitSpace,
    r: Length,
    convention: Convention,
    sx: &[S],
    sy: &[S],
) -> Result<(SimplicialComplex, bool), GluingError> {
    let maximal = maximal_valid_sets_vr(s, r, convention, sx, sy)?;
    let universe = Arc::new(s.glued.labels().to_vec());
    let empty = SimplicialComplex::empty(universe.clone());
    let simplices = maximal.iter().map(|m| empty.simplex_of(m)).collect::<Result<Vec<_>, _>>()?;
    let sigma = SimplicialComplex::from_maximal(universe, simplices, None)?;
    let ok = !sigma.is_empty() && greedy_collapse(&sigma).0.len() == 1;
    Ok((sigma, ok))
}

fn vr_pairs(s: &SplitSpace, r: Length, convention: Convention, cap: Option<usize>) -> Vec<PairInfo> {
    let n = s.glued.len();
    let g = threshold_graph(&s.glued, r, convention);
    let (xo, yo) = (s.x_only(), s.y_only());
    let mut allowed = bits(n, &xo);
    allowed.union_with(&bits(n, &yo));
    let in_x = bits(n, &xo);
    let cliques: Vec<Vec<u32>> = all_cliques(&g, &allowed, cap.map(|c| c + 1))
        .into_iter()
        .filter(|c| c.iter().any(|&v| in_x.contains(v as usize)) && c.iter().any(|&v| !in_x.contains(v as usize)))
        .collect();
    par::map(&cliques, |c| {
        let (sx, sy): (Vec<u32>, Vec<u32>) = c.iter().partition(|&&v| in_x.contains(v as usize));
        PairInfo {
            maximal: maximal_extensions(&g, &s.a, n, c),
            sx,
            sy,
            witnesses: None,
        }
    })
}

fn sigma_complex(universe: &Arc<Vec<String>>, maximal: &[Vec<u32>]) -> SimplicialComplex {
    SimplicialComplex::from_maximal(universe.clone(), maximal.iter().map(|m| Simplex::from_sorted(m)), None)
        .expect("vertices come from the universe")
}

fn build_report(
    m: &FiniteMetricSpace,
    r: Length,
    convention: Convention,
    cap: Option<usize>,
    pairs: &[PairInfo],
    allow_collapsible: bool,
) -> ValidSetReport {
    let universe = Arc::new(m.labels().to_vec());
    let unique = |p: &PairInfo| p.maximal.len() == 1;
    let collapsible: Vec<Option<bool>> = par::map(pairs, |p| {
        (allow_collapsible && !unique(p))
            .then(|| !p.maximal.is_empty() && greedy_collapse(&sigma_complex(&universe, &p.maximal)).0.len() == 1)
    });
    let verdict = if pairs.iter().all(unique) {
        Verdict::UniqueNonempty
    } else if allow_collapsible && collapsible.iter().all(|c| c.unwrap_or(true)) {
        Verdict::Collapsible
    } else {
        Verdict::Fail
    };
    let record = |p: &PairInfo, c: Option<bool>| PairRecord {
        s_x: sorted_names(m, &p.sx),
        s_y: sorted_names(m, &p.sy),
        maximal: {
            let mut v: Vec<Vec<String>> = p.maximal.iter().map(|x| sorted_names(m, x)).collect();
            v.sort();
            v
        },
        witnesses: p.witnesses.as_ref().map(|ws| {
            // keep witnesses aligned with the sorted maximal sets
            let mut both: Vec<(Vec<String>, Vec<String>)> = p
                .maximal
                .iter()
                .zip(ws)
                .map(|(x, w)| (sorted_names(m, x), sorted_names(m, w)))
                .collect();
            both.sort();
            both.into_iter().map(|(_, w)| w).collect()
        }),
        collapsible: c,
    };
    let records: Vec<PairRecord> = pairs.iter().zip(&collapsible).map(|(p, &c)| record(p, c)).collect();
    let failures = records
        .iter()
        .filter(|rec| match verdict {
            Verdict::Fail if allow_collapsible => rec.collapsible == Some(false),
            _ => rec.maximal.len() != 1,
        })
        .cloned()
        .collect();
    ValidSetReport {
        scale: r,
        convention,
        cap,
        verdict,
        pairs_checked: pairs.len(),
        records,
        failures,
    }
}

/// Enumerates cross simplices `S_X ∪ S_Y` of dimension at most `cap`
/// (`None`: all) and their maximal extensions into A.
pub fn check_unique_max_hypothesis(s: &SplitSpace, r: Length, convention: Convention, cap: Option<usize>) -> ValidSetReport {
    let pairs = vr_pairs(s, r, convention, cap);
    build_report(&s.glued, r, convention, cap, &pairs, true)
}

/// Landmarks on two sides inside an ambient space; balls are centered at
/// landmarks and intersected over `witnesses` (all ambient points if absent).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CechSplit {
    pub ambient: FiniteMetricSpace,
    pub x_landmarks: Vec<String>,
    pub y_landmarks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<String>>,
}

/// Maximal σ ⊆ A such that the balls around `S_X ∪ S_Y ∪ σ` share a witness,
/// for every pair with a common witness. The verdict is `UniqueNonempty`
/// exactly when Condition-R holds.
pub fn cech_condition_r(c: &CechSplit, r: Length, convention: Convention, cap: Option<usize>) -> Result<ValidSetReport, GluingError> {
    let m = &c.ambient;
    let x = m.indices_of(&c.x_landmarks)?;
    let y = m.indices_of(&c.y_landmarks)?;
    let a: Vec<usize> = x.iter().copied().filter(|i| y.contains(i)).collect();
    if a.is_empty() {
        return Err(GluingError::EmptyA);
    }
    let mut wit = match &c.witnesses {
        Some(w) => bits(m.len(), &m.indices_of(w)?),
        None => {
            let mut b = FixedBitSet::with_capacity(m.len());
            b.insert_range(..);
            b
        }
    };
    wit.grow(m.len());
    let xo: Vec<usize> = x.iter().copied().filter(|i| !a.contains(i)).collect();
    let yo: Vec<usize> = y.iter().copied().filter(|i| !a.contains(i) && !xo.contains(i)).collect();
    let centers: Vec<usize> = xo.iter().chain(&yo).copied().collect();
    let restrict = |mut b: FixedBitSet| {
        b.intersect_with(&wit);
        b
    };
    let cross_balls: Vec<FixedBitSet> = balls(m, &centers, r, convention).into_iter().map(restrict).collect();
    let a_balls: Vec<FixedBitSet> = balls(m, &a, r, convention).into_iter().map(restrict).collect();
    let nx = xo.len();
    let sets: Vec<(Vec<u32>, FixedBitSet)> = witnessed_sets(&cross_balls, cap.map(|c| c + 1))
        .into_iter()
        .filter(|(s, _)| s.iter().any(|&i| (i as usize) < nx) && s.iter().any(|&i| (i as usize) >= nx))
        .collect();
    let pairs = par::map(&sets, |(set, common)| {
        // A ∩ B(w) for each common witness w, grouped
        let mut by_trace: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
        for w in common.ones() {
            let trace: Vec<u32> = (0..a.len()).filter(|&k| a_balls[k].contains(w)).map(|k| a[k] as u32).collect();
            if !trace.is_empty() {
                by_trace.entry(trace).or_default().push(w as u32);
            }
        }
        let traces: Vec<&Vec<u32>> = by_trace.keys().collect();
        let is_max = |t: &Vec<u32>| !traces.iter().any(|u| u.len() > t.len() && t.iter().all(|v| u.contains(v)));
        let (maximal, witnesses): (Vec<Vec<u32>>, Vec<Vec<u32>>) = by_trace
            .iter()
            .filter(|(t, _)| is_max(t))
            .map(|(t, w)| (t.clone(), w.clone()))
            .unzip();
        let (sx, sy): (Vec<u32>, Vec<u32>) = set
            .iter()
            .map(|&i| centers[i as usize] as u32)
            .partition(|&v| xo.contains(&(v as usize)));
        PairInfo {
            sx,
            sy,
            maximal,
            witnesses: Some(witnesses),
        }
    });
    Ok(build_report(m, r, convention, cap, &pairs, false))
}

/// Serializes `None` as `"inf"`.
fn ser_extended<S: Serializer>(v: &Option<Length>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(l) => l.serialize(s),
        None => s.serialize_str("inf"),
    }
}

fn path_edges<'g>(g: &'g MetricGraph, path: &[String]) -> Result<Vec<&'g GraphEdge>, GluingError> {
    for v in path {
        if !g.has_vertex(v) {
            return Err(GluingError::SubgraphNotInGraph(format!("vertex {v:?}")));
        }
    }
    path.windows(2)
        .map(|w| {
            g.edge_between(&w[0], &w[1])
                .ok_or_else(|| GluingError::SubgraphNotInGraph(format!("edge {}-{}", w[0], w[1])))
        })
        .collect()
}

fn validate_path(path: &[String]) -> Result<(), GluingError> {
    if path.is_empty() {
        return Err(GluingError::NotAPath("no vertices".into()));
    }
    let mut seen = HashSet::new();
    for v in path {
        if !seen.insert(v) {
            return Err(GluingError::NotAPath(format!("{v:?} repeats")));
        }
    }
    Ok(())
}

/// Length of the shortest cycle of `g` using an edge of the path (for a
/// one-vertex path: an edge at that vertex); `None` if there is none.
pub fn shortest_cycle_through(g: &MetricGraph, path: &[String]) -> Result<Option<Length>, GluingError> {
    validate_path(path)?;
    path_edges(g, path)?;
    let on_path: Vec<(&str, &str)> = path.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect();
    let through = |e: &GraphEdge| {
        if path.len() == 1 {
            e.u == path[0] || e.v == path[0]
        } else {
            on_path.iter().any(|&(p, q)| (e.u == p && e.v == q) || (e.u == q && e.v == p))
        }
    };
    let n = g.vertices().len();
    let mut best: Option<Length> = None;
    for (id, e) in g.edges().iter().enumerate().filter(|(_, e)| through(e)) {
        let mut adj: Vec<Vec<(usize, Length)>> = vec![Vec::new(); n];
        for (j, f) in g.edges().iter().enumerate() {
            if j != id {
                let (u, v) = (g.vertex_index(&f.u).unwrap(), g.vertex_index(&f.v).unwrap());
                adj[u].push((v, f.len));
                adj[v].push((u, f.len));
            }
        }
        let (u, v) = (g.vertex_index(&e.u).unwrap(), g.vertex_index(&e.v).unwrap());
        if let Some(d) = dijkstra(&adj, u)[v] {
            let c = d + e.len;
            best = Some(best.map_or(c, |b| b.min(c)));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub path: Vec<String>,
    pub alpha: Length,
    #[serde(serialize_with = "ser_extended")]
    pub ell_x: Option<Length>,
    #[serde(serialize_with = "ser_extended")]
    pub ell_y: Option<Length>,
    #[serde(serialize_with = "ser_extended")]
    pub ell: Option<Length>,
    /// Cycles of the attached side were not counted in `ell`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub y_exempt: bool,
    /// `alpha < ell / 3`.
    pub length_check: bool,
    pub degree_check: Check,
    pub endpoint_check: Check,
    pub verdict: bool,
}

/// Hypotheses for gluing `gx` and `gy` along `path`: the path is shorter
/// than a third of the shortest cycle through it, interior path vertices
/// have degree 2 on one side, and the endpoints lie in the sample `a`
/// (default: the path's vertices).
pub fn check_graph_gluing(
    gx: &MetricGraph,
    gy: &MetricGraph,
    path: &[String],
    a: Option<&[String]>,
) -> Result<AdmissibilityReport, GluingError> {
    admissibility(gx, gy, path, a, false)
}

/// As [`check_graph_gluing`], but cycles of `gy` do not count towards ℓ.
/// Used when `gy` is dismantlable and attached to `gx`.
pub fn check_graph_attachment(gx: &MetricGraph, gy: &MetricGraph, path: &[String]) -> Result<AdmissibilityReport, GluingError> {
    admissibility(gx, gy, path, None, true)
}

fn admissibility(
    gx: &MetricGraph,
    gy: &MetricGraph,
    path: &[String],
    a: Option<&[String]>,
    y_exempt: bool,
) -> Result<AdmissibilityReport, GluingError> {
    validate_path(path)?;
    let ex = path_edges(gx, path)?;
    let ey = path_edges(gy, path)?;
    for (e, f) in ex.iter().zip(&ey) {
        if e.len != f.len {
            return Err(GluingError::EdgeMismatch(e.u.clone(), e.v.clone()));
        }
    }
    let on_path: HashSet<&String> = path.iter().collect();
    if let Some(v) = gy.vertices().iter().find(|v| gx.has_vertex(v) && !on_path.contains(v)) {
        return Err(GluingError::OverlapBeyondPath(v.clone()));
    }
    let path_pairs: HashSet<(&str, &str)> = path
        .windows(2)
        .flat_map(|w| [(w[0].as_str(), w[1].as_str()), (w[1].as_str(), w[0].as_str())])
        .collect();
    for e in gy.edges() {
        if gx.has_vertex(&e.u) && gx.has_vertex(&e.v) && !path_pairs.contains(&(e.u.as_str(), e.v.as_str())) {
            return Err(GluingError::OverlapBeyondPath(format!("{}-{}", e.u, e.v)));
        }
    }
    for e in gx.edges() {
        if gy.has_vertex(&e.u) && gy.has_vertex(&e.v) && !path_pairs.contains(&(e.u.as_str(), e.v.as_str())) {
            return Err(GluingError::OverlapBeyondPath(format!("{}-{}", e.u, e.v)));
        }
    }
    let alpha: Length = ex.iter().map(|e| e.len).sum();
    let ell_x = shortest_cycle_through(gx, path)?;
    let ell_y = shortest_cycle_through(gy, path)?;
    let ell = match (ell_x, if y_exempt { None } else { ell_y }) {
        (Some(p), Some(q)) => Some(p.min(q)),
        (p, q) => p.or(q),
    };
    let length_check = ell.is_none_or(|l| alpha * 3 < l);
    let interior = if path.len() > 2 { &path[1..path.len() - 1] } else { &[][..] };
    let bad_in = |g: &MetricGraph| interior.iter().find(|v| g.degree(v) != 2).cloned();
    let degree_check = match (bad_in(gx), bad_in(gy)) {
        (Some(v), Some(_)) => Check {
            pass: false,
            vertex: Some(v),
        },
        _ => Check { pass: true, vertex: None },
    };
    let ends = [path.first().unwrap(), path.last().unwrap()];
    let endpoint_check = match a {
        Some(a) => match ends.iter().find(|e| !a.contains(e)) {
            Some(e) => Check {
                pass: false,
                vertex: Some((*e).clone()),
            },
            None => Check { pass: true, vertex: None },
        },
        None => Check { pass: true, vertex: None },
    };
    let verdict = length_check && degree_check.pass && endpoint_check.pass;
    Ok(AdmissibilityReport {
        path: path.to_vec(),
        alpha,
        ell_x,
        ell_y,
        ell,
        y_exempt,
        length_check,
        degree_check,
        endpoint_check,
        verdict,
    })
}

/// Union of two metric graphs plus the sample labels of each side.
#[derive(Clone, Debug)]
pub struct GraphUnion {
    pub graph: MetricGraph,
    pub x_points: Vec<String>,
    pub y_points: Vec<String>,
}

/// Union of `gx` and `gy`; edges present in both (either orientation, same
/// length) are merged and keep the orientation of `gx`, so shared samples
/// carry one label. Each edge records its own subdivision count.
pub fn union_graphs(gx: &MetricGraph, gy: &MetricGraph) -> Result<GraphUnion, GluingError> {
    let mut vertices = gx.vertices().to_vec();
    vertices.extend(gy.vertices().iter().filter(|v| !gx.has_vertex(v)).cloned());
    let explicit = |g: &MetricGraph, e: &GraphEdge| GraphEdge {
        subdivision: Some(e.subdivision.unwrap_or(g.subdivision())),
        ..e.clone()
    };
    let mut edges: Vec<GraphEdge> = gx.edges().iter().map(|e| explicit(gx, e)).collect();
    let mut x_points = gx.vertices().to_vec();
    for e in gx.edges() {
        x_points.extend(edge_sample_labels(gx, e));
    }
    let mut y_points = gy.vertices().to_vec();
    for e in gy.edges() {
        let e = explicit(gy, e);
        let twin = edges.iter().position(|f| (f.u == e.u && f.v == e.v) || (f.u == e.v && f.v == e.u));
        match twin {
            Some(i) if i < gx.edges().len() => {
                let f = &edges[i];
                if f.len != e.len || f.subdivision != e.subdivision {
                    return Err(GluingError::EdgeMismatch(e.u.clone(), e.v.clone()));
                }
                y_points.extend(edge_sample_labels(gx, f));
            }
            _ => {
                y_points.extend(edge_sample_labels(gy, &e));
                edges.push(e);
            }
        }
    }
    let graph = MetricGraph::new(vertices, edges, 0)?;
    Ok(GraphUnion { graph, x_points, y_points })
}

/// Split space of the sampled union of two graphs.
pub fn split_from_graphs(gx: &MetricGraph, gy: &MetricGraph) -> Result<SplitSpace, GluingError> {
    let u = union_graphs(gx, gy)?;
    let m = crate::metric::graph_metric(&u.graph)?;
    SplitSpace::new(m, &u.x_points, &u.y_points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certificate,
    Betti,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub mode: Mode,
    pub scale: Length,
    pub convention: Convention,
    /// Homology dimensions compared.
    pub max_dim: usize,
    pub betti_glued: BettiVector,
    pub betti_union: BettiVector,
    pub betti_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CollapseCertificate>,
    /// Number of collapses checked by the independent replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replayed_steps: Option<usize>,
}

/// `VR(X ∪_A Y; r)` and `VR(X; r) ∪ VR(Y; r)` over the glued labels.
pub fn glued_and_union(
    s: &SplitSpace,
    r: Length,
    convention: Convention,
    dim_cap: Option<usize>,
) -> (SimplicialComplex, SimplicialComplex) {
    let k = vietoris_rips(&s.glued, r, convention, dim_cap);
    let in_x = bits(s.glued.len(), &s.x);
    let in_y = bits(s.glued.len(), &s.y);
    let side = |s: &Simplex, b: &FixedBitSet| s.vertices().iter().all(|&v| b.contains(v as usize));
    let l = SimplicialComplex::from_simplices(
        k.labels().clone(),
        k.iter().filter(|t| side(t, &in_x) || side(t, &in_y)).cloned().collect::<Vec<_>>(),
        dim_cap,
    )
    .expect("faces of one-sided simplices are one-sided");
    (k, l)
}

/// Compares `VR(X ∪_A Y; r)` with `VR(X; r) ∪ VR(Y; r)`.
///
/// In certificate mode the hypotheses are checked on all cross simplices and
/// the collapse of the first complex onto the second is built stage by stage
/// and replayed; failing hypotheses give [`GluingError::HypothesisFailed`].
/// Betti mode only compares Betti numbers up to `max_dim`.
pub fn verify_gluing_equivalence(
    s: &SplitSpace,
    r: Length,
    convention: Convention,
    mode: Mode,
    max_dim: usize,
) -> Result<EquivalenceReport, GluingError> {
    match mode {
        Mode::Betti => {
            let (k, l) = glued_and_union(s, r, convention, Some(max_dim + 1));
            let (bk, bl) = (betti(&k, max_dim)?, betti(&l, max_dim)?);
            Ok(EquivalenceReport {
                mode,
                scale: r,
                convention,
                max_dim,
                betti_equal: bk == bl,
                betti_glued: bk,
                betti_union: bl,
                hypothesis: None,
                certificate: None,
                replayed_steps: None,
            })
        }
        Mode::Certificate => {
            let pairs = vr_pairs(s, r, convention, None);
            let report = build_report(&s.glued, r, convention, None, &pairs, true);
            if report.verdict == Verdict::Fail {
                return Err(GluingError::HypothesisFailed(Box::new(report)));
            }
            let (k, l0) = glued_and_union(s, r, convention, None);
            let cert = gluing_certificate(&k, &l0, &pairs, report.verdict)?;
            let replayed = replay_to(&k, &cert, &l0)?;
            let (bk, bl) = (betti(&k, max_dim)?, betti(&l0, max_dim)?);
            Ok(EquivalenceReport {
                mode,
                scale: r,
                convention,
                max_dim,
                betti_equal: bk == bl,
                betti_glued: bk,
                betti_union: bl,
                hypothesis: Some(report.verdict),
                certificate: Some(cert),
                replayed_steps: Some(replayed.steps),
            })
        }
    }
}

/// Stages grouped by extension complex, built up from `l0` in an order where
/// every face of a stage's simplices is already present; the certificate
/// takes them apart in reverse.
fn gluing_certificate(
    k: &SimplicialComplex,
    l0: &SimplicialComplex,
    pairs: &[PairInfo],
    verdict: Verdict,
) -> Result<CollapseCertificate, GluingError> {
    // extension complex (by maximal sets) -> cross simplices
    let mut groups: BTreeMap<Vec<Vec<u32>>, Vec<Simplex>> = BTreeMap::new();
    for p in pairs {
        let mut key = p.maximal.clone();
        key.sort();
        let s = Simplex::new(p.sx.iter().chain(&p.sy).copied()).expect("disjoint sides");
        groups.entry(key).or_default().push(s);
    }
    let universe = k.labels().clone();
    let mut stages: Vec<(SimplicialComplex, Vec<Simplex>)> =
        groups.into_iter().map(|(key, t)| (sigma_complex(&universe, &key), t)).collect();
    // shrinking a cross simplex enlarges its extension complex
    stages.sort_by(|a, b| {
        b.0.len()
            .cmp(&a.0.len())
            .then_with(|| a.0.maximal_simplices().cmp(&b.0.maximal_simplices()))
    });
    let mut l = l0.clone();
    let mut certs = Vec::with_capacity(stages.len());
    for (sigma, t) in &stages {
        let (next, cert) = match verdict {
            Verdict::UniqueNonempty => {
                let top = sigma.maximal_simplices().pop().expect("one maximal set");
                gen39_sequence(&l, &top, t)?
            }
            _ => twoplusplus_sequence(&l, sigma, t)?,
        };
        certs.push(cert);
        l = next;
    }
    if l.iter().ne(k.iter()) {
        return Err(CollapseError::HypothesisViolation("stages do not rebuild the glued complex".into()).into());
    }
    let mut out = CollapseCertificate {
        initial: crate::collapse::fingerprint(k),
        final_: crate::collapse::fingerprint(k),
        steps: Vec::new(),
    };
    for c in certs.into_iter().rev() {
        out = out.then(c);
    }
    Ok(out)
}

/// Vertex indices of `labels` inside `k`'s universe.
pub fn vertices_of<S: AsRef<str>>(k: &SimplicialComplex, labels: &[S]) -> Result<Vec<Vertex>, ComplexError> {
    labels.iter().map(|l| k.vertex_of(l.as_ref())).collect()
}
