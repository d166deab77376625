//! Free faces, collapses, greedy collapsibility, the three join-collapse
//! constructions, and graph dismantling.
//!
//! Producers here emit [`CollapseCertificate`]s; [`replay`] checks them with
//! its own bookkeeping.

pub mod replay;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metric::MetricGraph;
use crate::simplicial::{ComplexError, Simplex, SimplicialComplex, Vertex};

pub use replay::{replay, replay_all, replay_to, ReplayError, ReplayOutcome};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("simplex {0:?} is not in the complex")]
    SimplexNotInComplex(Vec<String>),
    #[error("{free:?} is not a free face of {coface:?}")]
    NotAFreeFace { free: Vec<String>, coface: Vec<String> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("greedy collapse of the base complex stopped at {0} simplices")]
    SigmaNotCollapsible(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One collapse `(τ, σ)`: remove every ρ with τ ⊆ ρ ⊆ σ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseStep {
    #[serde(rename = "free")]
    pub free_face: Vec<String>,
    pub coface: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    pub initial: String,
    #[serde(rename = "final")]
    pub final_: String,
    pub steps: Vec<CollapseStep>,
}

impl CollapseCertificate {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `self` followed by `next`; fingerprints must line up.
    pub fn then(mut self, next: CollapseCertificate) -> CollapseCertificate {
        assert_eq!(self.final_, next.initial, "certificates do not chain");
        self.steps.extend(next.steps);
        self.final_ = next.final_;
        self
    }
}

/// Order-independent hash of the maximal-simplex set, over labels.
pub fn fingerprint(k: &SimplicialComplex) -> String {
    let mut maximal: Vec<Vec<&str>> = k
        .maximal_simplices()
        .iter()
        .map(|s| {
            let mut v: Vec<&str> = s.vertices().iter().map(|&i| k.labels()[i as usize].as_str()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    maximal.sort_unstable();
    let mut h = Sha256::new();
    for (i, s) in maximal.iter().enumerate() {
        if i > 0 {
            h.update([0x1e]);
        }
        h.update(s.join("\u{1f}").as_bytes());
    }
    hex::encode(&h.finalize()[..16])
}

fn labels_of(k: &SimplicialComplex, s: &Simplex) -> Vec<String> {
    k.simplex_labels(s)
}

/// The unique maximal coface of `tau` other than itself, if there is one.
pub fn free_face_check(k: &SimplicialComplex, tau: &Simplex) -> Result<Option<Simplex>, CollapseError> {
    if !k.contains(tau) {
        return Err(CollapseError::SimplexNotInComplex(labels_of(k, tau)));
    }
    let n = k.labels().len() as Vertex;
    let up: Vec<Vertex> = (0..n).filter(|&v| !tau.contains(v) && k.contains(&tau.with_vertex(v))).collect();
    if up.is_empty() {
        return Ok(None);
    }
    // every coface lies inside tau ∪ up, so that union is the only candidate
    let sigma = tau.union(&Simplex::new(up).expect("distinct vertices"));
    Ok(k.contains(&sigma).then_some(sigma))
}

/// `k` without every ρ with τ ⊆ ρ ⊆ σ.
pub fn apply_collapse(k: &SimplicialComplex, tau: &Simplex, sigma: &Simplex) -> Result<SimplicialComplex, CollapseError> {
    if free_face_check(k, tau)?.as_ref() != Some(sigma) {
        return Err(CollapseError::NotAFreeFace {
            free: labels_of(k, tau),
            coface: labels_of(k, sigma),
        });
    }
    let mut out = k.clone();
    let extra = sigma.minus(tau);
    for mask in 0u32..(1 << extra.len()) {
        let mut rho = tau.clone();
        for (i, &v) in extra.iter().enumerate() {
            if mask & (1 << i) != 0 {
                rho = rho.with_vertex(v);
            }
        }
        out.remove(&rho);
    }
    Ok(out)
}

/// Elementary collapses, lowest-dimensional free face first (ties
/// lexicographic), until none is left.
pub fn greedy_collapse(k: &SimplicialComplex) -> (SimplicialComplex, CollapseCertificate) {
    let n = k.labels().len() as Vertex;
    // number of codimension-one cofaces of each simplex
    let mut cofacets: HashMap<Simplex, u32> = k.iter().map(|s| (s.clone(), 0)).collect();
    for s in k.iter() {
        for f in s.facets() {
            *cofacets.get_mut(&f).expect("complex is closed") += 1;
        }
    }
    let mut free: BTreeSet<Simplex> = cofacets.iter().filter(|&(_, &c)| c == 1).map(|(s, _)| s.clone()).collect();
    let mut core = k.clone();
    let mut steps = Vec::new();

    let drop = |rho: &Simplex, cofacets: &mut HashMap<Simplex, u32>, free: &mut BTreeSet<Simplex>| {
        cofacets.remove(rho);
        free.remove(rho);
        for f in rho.facets() {
            let c = cofacets.get_mut(&f).expect("facet present");
            *c -= 1;
            if *c == 1 {
                free.insert(f);
            } else {
                free.remove(&f);
            }
        }
    };

    while let Some(tau) = free.pop_first() {
        let sigma = (0..n)
            .filter(|&v| !tau.contains(v))
            .map(|v| tau.with_vertex(v))
            .find(|s| cofacets.contains_key(s))
            .expect("free face has a coface");
        steps.push(CollapseStep {
            free_face: labels_of(k, &tau),
            coface: labels_of(k, &sigma),
        });
        drop(&sigma, &mut cofacets, &mut free);
        drop(&tau, &mut cofacets, &mut free);
        core.remove(&sigma);
        core.remove(&tau);
    }
    let cert = CollapseCertificate {
        initial: fingerprint(k),
        final_: fingerprint(&core),
        steps,
    };
    (core, cert)
}

/// True when greedy collapsing ends at a single vertex.
pub fn is_greedy_collapsible(k: &SimplicialComplex) -> bool {
    greedy_collapse(k).0.len() == 1
}

/// `K = L ∪ {ρ ∪ S : ρ ∈ Σ ∪ {∅}, S ∈ T}` after checking the shared
/// hypotheses of the three constructions.
fn join_extension(l: &SimplicialComplex, sigma: &SimplicialComplex, t: &[Simplex]) -> Result<SimplicialComplex, CollapseError> {
    let violation = |msg: String| Err(CollapseError::HypothesisViolation(msg));
    for s in sigma.iter() {
        if !l.contains(s) {
            return violation(format!("base simplex {:?} is not in L", labels_of(l, s)));
        }
    }
    let base_vertices: HashSet<Vertex> = sigma.vertex_set().into_iter().collect();
    let universe = l.labels().len() as Vertex;
    for s in t {
        if s.vertices().iter().any(|&v| v >= universe) {
            return Err(ComplexError::VertexOutOfRange(*s.vertices().last().unwrap()).into());
        }
        if let Some(&v) = s.vertices().iter().find(|v| base_vertices.contains(v)) {
            return violation(format!("{:?} meets the base at {:?}", labels_of(l, s), l.labels()[v as usize]));
        }
        if l.contains(s) {
            return violation(format!("{:?} already lies in L", labels_of(l, s)));
        }
    }
    let mut k = l.clone();
    k.set_dim_cap(None);
    for s in t {
        k.insert(s.clone());
        for rho in sigma.iter() {
            k.insert(rho.union(s));
        }
    }
    for s in t {
        for rho in std::iter::once(s.clone()).chain(sigma.iter().map(|r| r.union(s))) {
            if let Some(f) = rho.facets().find(|f| !k.contains(f)) {
                return violation(format!(
                    "K is not a complex: face {:?} of {:?} is missing",
                    labels_of(l, &f),
                    labels_of(l, &rho)
                ));
            }
        }
    }
    Ok(k)
}

/// T sorted by decreasing size, lexicographic within a size.
fn largest_first(t: &[Simplex]) -> Vec<Simplex> {
    let mut v: Vec<Simplex> = t.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    v.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    v
}

fn certificate(k: &SimplicialComplex, l: &SimplicialComplex, steps: Vec<CollapseStep>) -> CollapseCertificate {
    CollapseCertificate {
        initial: fingerprint(k),
        final_: fingerprint(l),
        steps,
    }
}

/// Collapses `K = L ∪ ⋃_{S∈T} {S, a∪S}` onto `L` by the elementary pairs
/// `(S, a∪S)`, larger S first. Returns K and the certificate.
pub fn lemma39_sequence(
    l: &SimplicialComplex,
    a: Vertex,
    t: &[Simplex],
) -> Result<(SimplicialComplex, CollapseCertificate), CollapseError> {
    if !l.contains(&Simplex::vertex(a)) {
        return Err(CollapseError::HypothesisViolation(format!(
            "apex {:?} is not a vertex of L",
            l.labels().get(a as usize)
        )));
    }
    gen39_sequence(l, &Simplex::vertex(a), t)
}

/// Collapses `K = L ∪ ⋃_{S∈T} [S, σ∪S]` onto `L` by the pairs `(S, σ∪S)`,
/// larger S first: K is built up by nondecreasing |S|, so it is taken apart
/// in the reverse order.
pub fn gen39_sequence(
    l: &SimplicialComplex,
    sigma: &Simplex,
    t: &[Simplex],
) -> Result<(SimplicialComplex, CollapseCertificate), CollapseError> {
    if !l.contains(sigma) {
        return Err(CollapseError::HypothesisViolation(format!(
            "{:?} is not a simplex of L",
            labels_of(l, sigma)
        )));
    }
    let base = SimplicialComplex::from_maximal(l.labels().clone(), [sigma.clone()], None)?;
    let k = join_extension(l, &base, t)?;
    let steps = largest_first(t)
        .iter()
        .map(|s| CollapseStep {
            free_face: labels_of(l, s),
            coface: labels_of(l, &s.union(sigma)),
        })
        .collect();
    let cert = certificate(&k, l, steps);
    Ok((k, cert))
}

/// Collapses `K = L ∪ ⋃_{σ∈Σ} ⋃_{S∈T} [S, σ∪S]` onto `L` for a collapsible
/// subcomplex Σ of L: for each S (larger first) the greedy collapse of Σ is
/// replayed joined with S, then `S ↘ {v}∪S` for the surviving vertex v.
pub fn twoplusplus_sequence(
    l: &SimplicialComplex,
    sigma_complex: &SimplicialComplex,
    t: &[Simplex],
) -> Result<(SimplicialComplex, CollapseCertificate), CollapseError> {
    let sigma_complex = sigma_complex.into_universe(l.labels().clone())?;
    if sigma_complex.is_empty() {
        return Err(CollapseError::HypothesisViolation("base complex is empty".into()));
    }
    let k = join_extension(l, &sigma_complex, t)?;
    let (core, base_cert) = greedy_collapse(&sigma_complex);
    if core.len() != 1 {
        return Err(CollapseError::SigmaNotCollapsible(core.len()));
    }
    let apex = core.iter().next().expect("one vertex").clone();
    let base_steps: Vec<(Simplex, Simplex)> = base_cert
        .steps
        .iter()
        .map(|st| Ok((l.simplex_of(&st.free_face)?, l.simplex_of(&st.coface)?)))
        .collect::<Result<_, ComplexError>>()?;
    let mut steps = Vec::new();
    for s in largest_first(t) {
        for (tau, sig) in &base_steps {
            steps.push(CollapseStep {
                free_face: labels_of(l, &tau.union(&s)),
                coface: labels_of(l, &sig.union(&s)),
            });
        }
        steps.push(CollapseStep {
            free_face: labels_of(l, &s),
            coface: labels_of(l, &apex.union(&s)),
        });
    }
    let cert = certificate(&k, l, steps);
    Ok((k, cert))
}

/// `v ~ u` and every neighbour of v other than u is a neighbour of u.
pub fn is_dominated(g: &MetricGraph, v: &str, u: &str) -> bool {
    if v == u {
        return false;
    }
    let nu = g.neighbors(u);
    let nv = g.neighbors(v);
    nv.contains(&u) && nv.iter().all(|w| *w == u || nu.contains(w))
}

/// Removes dominated vertices (smallest first) until one vertex is left.
/// Returns `(removed, dominator)` pairs, or `None` when it gets stuck.
pub fn dismantle(g: &MetricGraph) -> Option<Vec<(String, String)>> {
    let mut alive: Vec<&str> = g.vertices().iter().map(String::as_str).collect();
    let mut adj: HashMap<&str, BTreeSet<&str>> = alive
        .iter()
        .map(|&v| (v, g.neighbors(v).into_iter().filter(|&w| w != v).collect()))
        .collect();
    let mut order = Vec::new();
    while alive.len() > 1 {
        let found = alive.iter().find_map(|&v| {
            let nv = &adj[v];
            nv.iter()
                .find(|&&u| nv.iter().all(|w| *w == u || adj[u].contains(w)))
                .map(|&u| (v, u))
        });
        let (v, u) = found?;
        order.push((v.to_string(), u.to_string()));
        alive.retain(|&w| w != v);
        let nv = adj.remove(v).expect("alive vertex");
        for w in nv {
            adj.get_mut(w).expect("alive neighbour").remove(v);
        }
    }
    Some(order)
}

/// Shorthand used by callers that hold label lists.
pub fn simplices_of<S: AsRef<str>>(k: &SimplicialComplex, sets: &[Vec<S>]) -> Result<Vec<Simplex>, ComplexError> {
    sets.iter().map(|s| k.simplex_of(s)).collect()
}

/// Complex on a universe given by labels, from maximal label sets.
pub fn complex_on<S: AsRef<str>>(universe: &[&str], maximal: &[Vec<S>]) -> Result<SimplicialComplex, ComplexError> {
    let labels = Arc::new(universe.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    let empty = SimplicialComplex::empty(labels.clone());
    let simplices = simplices_of(&empty, maximal)?;
    SimplicialComplex::from_maximal(labels, simplices, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(universe: &[&str], maximal: &[Vec<&str>]) -> SimplicialComplex {
        complex_on(universe, maximal).unwrap()
    }

    #[test]
    fn free_faces() {
        let tri = k(&["a", "b", "c"], &[vec!["a", "b", "c"]]);
        let e = tri.simplex_of(&["a", "b"]).unwrap();
        assert_eq!(free_face_check(&tri, &e).unwrap(), Some(tri.simplex_of(&["a", "b", "c"]).unwrap()));

        let two = k(&["a", "b", "c", "d"], &[vec!["a", "b", "c"], vec!["a", "b", "d"]]);
        assert_eq!(free_face_check(&two, &two.simplex_of(&["a", "b"]).unwrap()).unwrap(), None);

        let hollow = k(&["a", "b", "c"], &[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]]);
        assert_eq!(free_face_check(&hollow, &hollow.simplex_of(&["a"]).unwrap()).unwrap(), None);
        let missing = hollow.simplex_of(&["a", "b", "c"]).unwrap();
        assert!(matches!(
            free_face_check(&hollow, &missing),
            Err(CollapseError::SimplexNotInComplex(_))
        ));
    }

    #[test]
    fn collapses() {
        let tri = k(&["a", "b", "c"], &[vec!["a", "b", "c"]]);
        let e = tri.simplex_of(&["a", "b"]).unwrap();
        let t = tri.simplex_of(&["a", "b", "c"]).unwrap();
        let path = apply_collapse(&tri, &e, &t).unwrap();
        assert_eq!(path.f_vector(), vec![3, 2]);
        assert!(matches!(apply_collapse(&tri, &t, &t), Err(CollapseError::NotAFreeFace { .. })));

        let tet = k(&["a", "b", "c", "d"], &[vec!["a", "b", "c", "d"]]);
        let v = tet.simplex_of(&["a"]).unwrap();
        let all = tet.simplex_of(&["a", "b", "c", "d"]).unwrap();
        let rest = apply_collapse(&tet, &v, &all).unwrap();
        assert_eq!(rest.label_sets(), k(&["b", "c", "d"], &[vec!["b", "c", "d"]]).label_sets());
    }

    #[test]
    fn greedy() {
        let tet = k(&["a", "b", "c", "d"], &[vec!["a", "b", "c", "d"]]);
        let (core, cert) = greedy_collapse(&tet);
        assert_eq!(core.len(), 1);
        assert_eq!(cert.steps.len(), 7);
        assert_eq!(replay(&tet, &cert).unwrap().final_sets, core.label_sets());

        let hollow = k(&["a", "b", "c"], &[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]]);
        let (core, cert) = greedy_collapse(&hollow);
        assert_eq!(core, hollow);
        assert!(cert.steps.is_empty());
    }

    #[test]
    fn lemma_examples() {
        let l = k(&["a", "b", "c"], &[vec!["a", "b"]]);
        let c = l.simplex_of(&["c"]).unwrap();
        let (big, cert) = lemma39_sequence(&l, 0, std::slice::from_ref(&c)).unwrap();
        assert_eq!(big.f_vector(), vec![3, 2]);
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(replay_to(&big, &cert, &l).unwrap().steps, 1);

        let (same, cert) = lemma39_sequence(&l, 0, &[]).unwrap();
        assert_eq!(same, l);
        assert!(cert.steps.is_empty());

        // a simplex of T containing the apex
        let ac = l.simplex_of(&["a", "c"]).unwrap();
        assert!(matches!(lemma39_sequence(&l, 0, &[ac]), Err(CollapseError::HypothesisViolation(_))));
        // T inside L
        let b = l.simplex_of(&["b"]).unwrap();
        assert!(matches!(lemma39_sequence(&l, 0, &[b]), Err(CollapseError::HypothesisViolation(_))));

        let ab = l.simplex_of(&["a", "b"]).unwrap();
        let (cone, cert) = gen39_sequence(&l, &ab, std::slice::from_ref(&c)).unwrap();
        assert_eq!(cone.maximal_simplices().len(), 1);
        replay_to(&cone, &cert, &l).unwrap();
    }

    #[test]
    fn twoplusplus_examples() {
        let l = k(&["a", "b", "c", "u"], &[vec!["a", "b"], vec!["b", "c"]]);
        let u = l.simplex_of(&["u"]).unwrap();
        let sigma = k(&["a", "b", "c"], &[vec!["a", "b"], vec!["b", "c"]]);
        let (big, cert) = twoplusplus_sequence(&l, &sigma, std::slice::from_ref(&u)).unwrap();
        let (_, base) = greedy_collapse(&sigma);
        assert_eq!(cert.steps.len(), base.steps.len() + 1);
        replay_to(&big, &cert, &l).unwrap();

        let hollow = k(&["a", "b", "c", "u"], &[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]]);
        let r = twoplusplus_sequence(&hollow, &hollow.clone(), &[u]);
        assert!(matches!(r, Err(CollapseError::SigmaNotCollapsible(6))));
    }

    #[test]
    fn domination() {
        let c4 = MetricGraph::unit(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        assert!(!is_dominated(&c4, "a", "b"));
        assert!(dismantle(&c4).is_none());
        let c3 = MetricGraph::unit(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        assert!(is_dominated(&c3, "a", "b"));
        assert_eq!(dismantle(&c3).unwrap().len(), 2);
        let tree = MetricGraph::unit(&["r", "x", "y", "z"], &[("r", "x"), ("r", "y"), ("y", "z")]).unwrap();
        assert!(is_dominated(&tree, "x", "r"));
        assert_eq!(dismantle(&tree).unwrap().len(), 3);
    }

    #[test]
    fn fingerprint_ignores_universe_order() {
        let a = k(&["a", "b", "c"], &[vec!["a", "b"], vec!["c"]]);
        let b = k(&["c", "b", "a"], &[vec!["c"], vec!["b", "a"]]);
        assert_eq!(fingerprint(&a), fingerprint(&b));
        assert_ne!(fingerprint(&a), fingerprint(&k(&["a", "b", "c"], &[vec!["a", "b", "c"]])));
    }
}
