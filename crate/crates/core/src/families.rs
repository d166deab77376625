//! Example graph families: iterated gluings of cycles and dismantlable
//! pieces, the cube graph, circular ladders, and experiment drivers.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collapse::{dismantle, greedy_collapse};
use crate::gluing::{check_graph_attachment, check_graph_gluing, AdmissibilityReport, GluingError};
use crate::homology::{
    betti, diagrams_equal, persistence, predicted_diagram, BettiVector, DiagramComparison, HomologyError, PersistenceDiagram,
};
use crate::length::Length;
use crate::metric::{
    graph_metric, product_label, sample_circle, sup_product_subset, FiniteMetricSpace, GraphEdge, MetricError, MetricGraph,
};
use crate::par;
use crate::simplicial::{vietoris_rips, vr_filtration, Convention};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FamilyError {
    #[error("step {step} is not admissible (alpha = {}, ell = {:?})", report.alpha, report.ell)]
    InadmissibleStep { step: usize, report: Box<AdmissibilityReport> },
    #[error("step {step}: {reason}")]
    BadStep { step: usize, reason: String },
    #[error("step {0}: graph is not dismantlable")]
    NotDismantlable(usize),
    #[error("step {0}: only trees may be attached to a subdivided graph")]
    NotATree(usize),
    #[error("step {step}: {source}")]
    Gluing { step: usize, source: GluingError },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("a circular ladder needs n >= 3 and m >= 2")]
    LadderShape,
}

/// Where a piece is glued: a vertex, an edge, or a path of the current graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    Vertex(String),
    Edge(String, String),
    Path(Vec<String>),
}

impl Attachment {
    pub fn path(&self) -> Vec<String> {
        match self {
            Attachment::Vertex(v) => vec![v.clone()],
            Attachment::Edge(u, v) => vec![u.clone(), v.clone()],
            Attachment::Path(p) => p.clone(),
        }
    }
}

fn one() -> Length {
    Length::ONE
}

/// One gluing step. New cycle vertices of step `i` are named `s{i}_1`,
/// `s{i}_2`, ... following the cycle from the attachment's last vertex;
/// an attached edge ends in `s{i}_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RecipeStep {
    /// `graph` shares exactly the attachment's vertices and edges with the
    /// current graph.
    AttachDismantlable { graph: MetricGraph, at: Attachment },
    AttachCycle {
        k: usize,
        #[serde(default = "one")]
        edge_len: Length,
        at: Attachment,
    },
    AttachEdge {
        at: String,
        #[serde(default = "one")]
        len: Length,
    },
}

/// Iterated gluing starting from the single vertex `v0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingRecipe {
    /// Interior samples per edge; 0 means the vertex set only.
    #[serde(default)]
    pub subdivision: usize,
    #[serde(default)]
    pub convention: Convention,
    pub steps: Vec<RecipeStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleBlock {
    pub step: usize,
    pub k: usize,
    pub edge_len: Length,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuiltRecipe {
    pub graph: MetricGraph,
    #[serde(skip)]
    pub sample: FiniteMetricSpace,
    pub cycle_blocks: Vec<CycleBlock>,
    pub reports: Vec<AdmissibilityReport>,
}

fn edge(u: &str, v: &str, len: Length) -> GraphEdge {
    GraphEdge {
        u: u.to_string(),
        v: v.to_string(),
        len,
        subdivision: None,
    }
}

fn is_tree(g: &MetricGraph) -> bool {
    g.edges().len() + 1 == g.vertices().len() && g.is_connected()
}

fn graph_of(vertices: Vec<String>, edges: Vec<GraphEdge>, subdivision: usize) -> Result<MetricGraph, MetricError> {
    MetricGraph::new(vertices, edges, subdivision)
}

/// Applies the steps in order, checking each gluing when it happens.
pub fn build_recipe(recipe: &GluingRecipe) -> Result<BuiltRecipe, FamilyError> {
    let sub = recipe.subdivision;
    let mut current = graph_of(vec!["v0".into()], Vec::new(), sub)?;
    let mut blocks = Vec::new();
    let mut reports = Vec::new();
    for (i, step) in recipe.steps.iter().enumerate() {
        let bad = |reason: String| FamilyError::BadStep { step: i, reason };
        let glue_err = |source| FamilyError::Gluing { step: i, source };
        let (piece, report) = match step {
            RecipeStep::AttachCycle { k, edge_len, at } => {
                let path = at.path();
                if *k < 3 || *k < path.len() + 1 {
                    return Err(bad(format!("a {k}-cycle cannot contain a path on {} vertices", path.len())));
                }
                for w in path.windows(2) {
                    match current.edge_between(&w[0], &w[1]) {
                        Some(e) if e.len == *edge_len => {}
                        Some(_) => return Err(bad(format!("edge {}-{} has a different length", w[0], w[1]))),
                        None => return Err(glue_err(GluingError::SubgraphNotInGraph(format!("edge {}-{}", w[0], w[1])))),
                    }
                }
                let mut ring = path.clone();
                ring.extend((1..=k - path.len()).map(|j| format!("s{i}_{j}")));
                let edges = (0..*k).map(|j| edge(&ring[j], &ring[(j + 1) % k], *edge_len)).collect();
                let piece = graph_of(ring, edges, sub)?;
                let report = check_graph_gluing(&current, &piece, &path, None).map_err(glue_err)?;
                blocks.push(CycleBlock {
                    step: i,
                    k: *k,
                    edge_len: *edge_len,
                });
                (piece, report)
            }
            RecipeStep::AttachDismantlable { graph, at } => {
                if sub > 0 && !is_tree(graph) {
                    return Err(FamilyError::NotATree(i));
                }
                if dismantle(graph).is_none() {
                    return Err(FamilyError::NotDismantlable(i));
                }
                let piece = graph.clone().with_subdivision(sub);
                let report = check_graph_attachment(&current, &piece, &at.path()).map_err(glue_err)?;
                (piece, report)
            }
            RecipeStep::AttachEdge { at, len } => {
                let tip = format!("s{i}_1");
                let piece = graph_of(vec![at.clone(), tip.clone()], vec![edge(at, &tip, *len)], sub)?;
                let report = check_graph_attachment(&current, &piece, std::slice::from_ref(at)).map_err(glue_err)?;
                (piece, report)
            }
        };
        if !report.verdict {
            return Err(FamilyError::InadmissibleStep {
                step: i,
                report: Box::new(report),
            });
        }
        current = merge(&current, &piece)?;
        reports.push(report);
    }
    let sample = graph_metric(&current)?;
    Ok(BuiltRecipe {
        graph: current,
        sample,
        cycle_blocks: blocks,
        reports,
    })
}

fn merge(g: &MetricGraph, piece: &MetricGraph) -> Result<MetricGraph, MetricError> {
    let mut vertices = g.vertices().to_vec();
    vertices.extend(piece.vertices().iter().filter(|v| !g.has_vertex(v)).cloned());
    let mut edges = g.edges().to_vec();
    edges.extend(piece.edges().iter().filter(|e| g.edge_between(&e.u, &e.v).is_none()).cloned());
    graph_of(vertices, edges, g.subdivision())
}

/// Wedge of cycles of the given lengths at `v0`.
pub fn wedge_of_cycles(ks: &[usize], subdivision: usize) -> GluingRecipe {
    GluingRecipe {
        subdivision,
        convention: Convention::Closed,
        steps: ks
            .iter()
            .map(|&k| RecipeStep::AttachCycle {
                k,
                edge_len: Length::ONE,
                at: Attachment::Vertex("v0".into()),
            })
            .collect(),
    }
}

/// Cycles glued one after another, each along an edge of the previous
/// one (a chain of polygons), with a pendant edge at `v0`.
pub fn polygon_chain(ks: &[usize], subdivision: usize) -> GluingRecipe {
    let mut steps = Vec::new();
    let mut ring: Vec<String> = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let step = steps.len();
        let at = if ring.is_empty() {
            Attachment::Vertex("v0".into())
        } else {
            let j = if ring.len() >= 4 { 2 } else { 1 };
            Attachment::Edge(ring[j].clone(), ring[j + 1].clone())
        };
        let mut next = at.path();
        next.extend((1..=k - next.len()).map(|j| format!("s{step}_{j}")));
        ring = next;
        steps.push(RecipeStep::AttachCycle {
            k,
            edge_len: Length::ONE,
            at,
        });
        if i == 0 {
            steps.push(RecipeStep::AttachEdge {
                at: "v0".into(),
                len: Length::ONE,
            });
        }
    }
    GluingRecipe {
        subdivision,
        convention: Convention::Closed,
        steps,
    }
}

/// Two 7-cycles on a common edge, then a third glued along a path of two
/// edges through the shared vertex.
pub fn three_sevens() -> GluingRecipe {
    let p = |v: &[&str]| Attachment::Path(v.iter().map(|s| s.to_string()).collect());
    GluingRecipe {
        subdivision: 0,
        convention: Convention::Closed,
        steps: vec![
            RecipeStep::AttachCycle {
                k: 7,
                edge_len: Length::ONE,
                at: Attachment::Vertex("v0".into()),
            },
            RecipeStep::AttachCycle {
                k: 7,
                edge_len: Length::ONE,
                at: Attachment::Edge("v0".into(), "s0_1".into()),
            },
            // s0_6 -- v0 -- s1_5: one edge from each of the first two cycles
            RecipeStep::AttachCycle {
                k: 7,
                edge_len: Length::ONE,
                at: p(&["s0_6", "v0", "s1_5"]),
            },
        ],
    }
}

fn triangle_on(u: &str, v: &str, apex: &str) -> MetricGraph {
    MetricGraph::unit(&[u, v, apex], &[(u, v), (v, apex), (apex, u)]).expect("triangle")
}

/// A 9-cycle and a 10-cycle sharing a path of two edges, and a triangle on
/// one edge of that path. `longest_first` glues along the long path before
/// the triangle is attached; otherwise the triangle comes first and the
/// 10-cycle's path is no longer admissible.
pub fn caution_recipe(longest_first: bool) -> GluingRecipe {
    let c9 = RecipeStep::AttachCycle {
        k: 9,
        edge_len: Length::ONE,
        at: Attachment::Vertex("v0".into()),
    };
    let c10 = RecipeStep::AttachCycle {
        k: 10,
        edge_len: Length::ONE,
        at: Attachment::Path(vec!["v0".into(), "s0_8".into(), "s0_7".into()]),
    };
    let c3 = RecipeStep::AttachDismantlable {
        graph: triangle_on("v0", "s0_8", "t"),
        at: Attachment::Edge("v0".into(), "s0_8".into()),
    };
    GluingRecipe {
        subdivision: 0,
        convention: Convention::Closed,
        steps: if longest_first { vec![c9, c10, c3] } else { vec![c9, c3, c10] },
    }
}

/// The 1-skeleton of the 3-cube; vertices are bit strings.
pub fn cube_graph() -> MetricGraph {
    let names: Vec<String> = (0..8).map(|i| format!("{i:03b}")).collect();
    let mut edges = Vec::new();
    for i in 0..8usize {
        for b in 0..3 {
            let j = i ^ (1 << b);
            if i < j {
                edges.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    MetricGraph::unit(&names, &edges).expect("cube graph")
}

/// Circular ladder data: `x` samples a circle with 2n points, rungs sit at
/// the even ones; `y` samples a rung of length `width` with `m` rails and
/// the midpoints between them.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub x: FiniteMetricSpace,
    pub x0: Vec<String>,
    pub y: FiniteMetricSpace,
    pub y0: Vec<String>,
    /// `X × Y_0 ∪ X_0 × Y` with the max metric.
    pub sup: FiniteMetricSpace,
    /// The same points as vertices of the ladder graph; absent for `width = 0`.
    pub graph: Option<MetricGraph>,
}

/// Evenly spaced circular ladder with `n` rungs.
pub fn build_circular_ladder(n: usize, circumference: Length, m: usize, width: Length) -> Result<Ladder, FamilyError> {
    if n < 3 || m < 2 {
        return Err(FamilyError::LadderShape);
    }
    let x = sample_circle(circumference, 2 * n)?;
    let x0: Vec<String> = (0..n).map(|i| x.label(2 * i).to_string()).collect();
    // positions along the rung in units of width / (2(m-1))
    let pts = 2 * m - 1;
    let step = width / (2 * (m as i64 - 1));
    let y_labels: Vec<String> = (0..pts).map(|j| format!("y{j}")).collect();
    let matrix: Vec<Vec<Length>> = (0..pts).map(|i| (0..pts).map(|j| step * i.abs_diff(j) as i64).collect()).collect();
    let y = FiniteMetricSpace::new(y_labels.clone(), matrix, width.is_zero())?;
    let y0: Vec<String> = (0..m).map(|j| y_labels[2 * j].clone()).collect();
    let sup = sup_product_subset(&x, &x0, &y, &y0)?;
    let graph = if width.is_zero() {
        None
    } else {
        let ring = circumference / (2 * n as i64);
        let mut edges = Vec::new();
        for yl in &y0 {
            for i in 0..2 * n {
                let (a, b) = (x.label(i), x.label((i + 1) % (2 * n)));
                edges.push(edge(&product_label(a, yl), &product_label(b, yl), ring));
            }
        }
        for xl in &x0 {
            for j in 0..pts - 1 {
                edges.push(edge(&product_label(xl, &y_labels[j]), &product_label(xl, &y_labels[j + 1]), step));
            }
        }
        Some(MetricGraph::new(sup.labels().to_vec(), edges, 0)?)
    };
    Ok(Ladder { x, x0, y, y0, sup, graph })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupReport {
    pub scale: Length,
    /// Largest gap between consecutive points of Y_0 (largest edge of a
    /// minimum spanning tree).
    pub kappa_y: Length,
    pub r_at_least_kappa: bool,
    pub y0_collapsible: bool,
    pub y_collapsible: bool,
    pub hypotheses: bool,
    pub betti_sup: BettiVector,
    pub betti_x: BettiVector,
    pub equal: bool,
}

fn mst_max_edge(m: &FiniteMetricSpace, pts: &[usize]) -> Length {
    if pts.len() < 2 {
        return Length::ZERO;
    }
    let mut best: Vec<Option<Length>> = vec![None; pts.len()];
    let mut done = vec![false; pts.len()];
    best[0] = Some(Length::ZERO);
    let mut worst = Length::ZERO;
    for _ in 0..pts.len() {
        let (i, d) = (0..pts.len())
            .filter(|&i| !done[i])
            .filter_map(|i| best[i].map(|d| (i, d)))
            .min_by_key(|&(_, d)| d)
            .expect("connected");
        done[i] = true;
        worst = worst.max(d);
        for j in 0..pts.len() {
            let dij = m.d(pts[i], pts[j]);
            if !done[j] && best[j].is_none_or(|b| dij < b) {
                best[j] = Some(dij);
            }
        }
    }
    worst
}

/// Compares `VR(X × Y_0 ∪ X_0 × Y; r)` with `VR(X; r)` in dimensions up to
/// `max_dim`, after checking that `VR(Y_0; r)` and `VR(Y; r)` collapse to a
/// point.
pub fn verify_sup_theorem<S: AsRef<str>>(
    x: &FiniteMetricSpace,
    x0: &[S],
    y: &FiniteMetricSpace,
    y0: &[S],
    r: Length,
    convention: Convention,
    max_dim: usize,
) -> Result<SupReport, FamilyError> {
    if y0.is_empty() {
        return Err(MetricError::EmptyY0.into());
    }
    let y0_idx = y.indices_of(y0)?;
    let kappa_y = mst_max_edge(y, &y0_idx);
    let collapses = |m: &FiniteMetricSpace| greedy_collapse(&vietoris_rips(m, r, convention, None)).0.len() == 1;
    let y0_collapsible = collapses(&y.restrict(&y0_idx));
    let y_collapsible = collapses(y);
    let sup = sup_product_subset(x, x0, y, y0)?;
    let betti_sup = betti(&vietoris_rips(&sup, r, convention, Some(max_dim + 1)), max_dim)?;
    let betti_x = betti(&vietoris_rips(x, r, convention, Some(max_dim + 1)), max_dim)?;
    Ok(SupReport {
        scale: r,
        kappa_y,
        r_at_least_kappa: r >= kappa_y,
        y0_collapsible,
        y_collapsible,
        hypotheses: y0_collapsible && y_collapsible,
        equal: betti_sup == betti_x,
        betti_sup,
        betti_x,
    })
}

/// Computed against predicted diagram of a recipe.
#[derive(Clone, Debug, Serialize)]
pub struct RecipeExperiment {
    pub points: usize,
    pub cycles: Vec<usize>,
    pub computed: PersistenceDiagram,
    pub predicted: PersistenceDiagram,
    pub comparison: DiagramComparison,
}

/// Persistence of the recipe's sample in dimensions `1..=max_dim` against
/// the wedge prediction, exact.
pub fn recipe_experiment(recipe: &GluingRecipe, max_dim: usize) -> Result<RecipeExperiment, FamilyError> {
    let built = build_recipe(recipe)?;
    let computed = persistence(&vr_filtration(&built.sample, max_dim + 1), max_dim)?.from_dim(1);
    let predicted = predicted_diagram(recipe, max_dim)?.from_dim(1);
    let comparison = diagrams_equal(&computed, &predicted, Length::ZERO);
    Ok(RecipeExperiment {
        points: built.sample.len(),
        cycles: built.cycle_blocks.iter().map(|b| b.k).collect(),
        computed,
        predicted,
        comparison,
    })
}

/// [`verify_sup_theorem`] on a ladder at each scale, in parallel.
pub fn ladder_sweep(ladder: &Ladder, scales: &[Length], convention: Convention, max_dim: usize) -> Result<Vec<SupReport>, FamilyError> {
    par::map(scales, |&r| {
        verify_sup_theorem(&ladder.x, &ladder.x0, &ladder.y, &ladder.y0, r, convention, max_dim)
    })
    .into_iter()
    .collect()
}

/// Labels of `g` that are not in `h`.
pub fn new_vertices(g: &MetricGraph, h: &MetricGraph) -> Vec<String> {
    let old: HashSet<&String> = h.vertices().iter().collect();
    g.vertices().iter().filter(|v| !old.contains(v)).cloned().collect()
}
