//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//!
//! Run with `cargo test -p vrglue --test acceptance`. Exits nonzero if any
//! criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_vr, cells_of, cycle_graph, gf2_betti, l, lemma_instance, random_chordal, random_graph_metric, LemmaKind};
use vrglue::collapse::{gen39_sequence, greedy_collapse, lemma39_sequence, replay, twoplusplus_sequence};
use vrglue::families::{
    build_circular_ladder, build_recipe, caution_recipe, cube_graph, polygon_chain, recipe_experiment, three_sevens, verify_sup_theorem,
    wedge_of_cycles, Attachment, FamilyError, GluingRecipe, RecipeStep,
};
use vrglue::gluing::{
    cech_condition_r, check_graph_gluing, check_unique_max_hypothesis, split_from_graphs, verify_gluing_equivalence, CechSplit, Mode,
    SplitSpace, Verdict,
};
use vrglue::homology::{betti, diagrams_equal, persistence, BettiVector, PersistencePoint};
use vrglue::metric::{graph_metric, sample_circle, wedge_metric, GluingSpec, GraphEdge};
use vrglue::simplicial::{critical_scales, vietoris_rips, vr_filtration, Vertex};
use vrglue::{Convention, FiniteMetricSpace, Length, MetricGraph, Simplex, SimplicialComplex};

const CLOSED: Convention = Convention::Closed;

/// Runtime budgets (wall clock).
const BUDGET_SQUARE: Duration = Duration::from_secs(1);
const BUDGET_CECH: Duration = Duration::from_secs(1);
const BUDGET_CUBE: Duration = Duration::from_secs(5);
const BUDGET_WEDGE: Duration = Duration::from_secs(60);
const BUDGET_GRAPH_GLUING: Duration = Duration::from_secs(300);
const BUDGET_LEMMAS: Duration = Duration::from_secs(60);
const BUDGET_DISMANTLE: Duration = Duration::from_secs(30);
const BUDGET_FAMILIES: Duration = Duration::from_secs(300);
const BUDGET_ORDER: Duration = Duration::from_secs(1);
const BUDGET_SUP: Duration = Duration::from_secs(120);
const BUDGET_LOOP: Duration = Duration::from_secs(1);

/// Diagram comparisons are exact: every scale is a rational.
const DIAGRAM_TOL: Length = Length::ZERO;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(labels: &[&str], rows: &[&[&str]]) -> FiniteMetricSpace {
    FiniteMetricSpace::new(
        labels.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.iter().map(|s| l(s)).collect()).collect(),
        false,
    )
    .unwrap()
}

fn square_split() -> SplitSpace {
    let x = space(
        &["p1", "p2", "p3", "p4"],
        &[
            &["0", "0.5", "1.1", "0.6"],
            &["0.5", "0", "0.6", "1.1"],
            &["1.1", "0.6", "0", "0.5"],
            &["0.6", "1.1", "0.5", "0"],
        ],
    );
    let y = space(
        &["p2", "p3", "q"],
        &[&["0", "0.6", "0.5"], &["0.6", "0", "0.5"], &["0.5", "0.5", "0"]],
    );
    SplitSpace::glue(&x, &y, &GluingSpec::shared(&["p2", "p3"])).unwrap()
}

fn c1_square_split() -> Outcome {
    let s = square_split();
    let rep = verify_gluing_equivalence(&s, Length::ONE, CLOSED, Mode::Betti, 1).map_err(|e| e.to_string())?;
    ensure(rep.betti_glued == BettiVector(vec![1, 0]), || format!("glued {}", rep.betti_glued))?;
    ensure(rep.betti_union == BettiVector(vec![1, 1]), || format!("union {}", rep.betti_union))?;
    // oracle: brute-force VR of the glued space and of each side
    let glued = brute_vr(s.glued(), Length::ONE, 3);
    ensure(gf2_betti(&glued, 1) == [1, 0], || "oracle disagrees on the glued complex".into())?;
    let mut union = common::Cells::new();
    for side in [s.x(), s.y()] {
        union.extend(glued.iter().filter(|c| c.iter().all(|v| side.contains(v))).cloned());
    }
    ensure(gf2_betti(&union, 1) == [1, 1], || "oracle disagrees on the union".into())?;
    Ok(format!("glued {} union {}", rep.betti_glued, rep.betti_union))
}

/// Landmarks x, a1..a3 (X) and y1, y2, a1..a3 (Y) with witnesses w1..w5,
/// all inside one weighted graph.
fn two_maxima() -> CechSplit {
    let e = |u: &str, v: &str, len: &str| GraphEdge {
        u: u.into(),
        v: v.into(),
        len: l(len),
        subdivision: None,
    };
    let g = MetricGraph::new(
        ["x", "a1", "a2", "a3", "y1", "y2", "w1", "w2", "w3", "w4", "w5"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        vec![
            e("x", "a1", "0.25"),
            e("a1", "a2", "0.75"),
            e("a2", "a3", "1"),
            e("w1", "w2", "1"),
            e("w2", "w3", "1"),
            e("w1", "w4", "1"),
            e("w1", "y1", "8"),
            e("w3", "y2", "8"),
            e("w3", "w5", "2"),
            e("a1", "w4", "7.75"),
            e("a3", "w5", "7"),
        ],
        0,
    )
    .unwrap();
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    CechSplit {
        ambient: graph_metric(&g).unwrap(),
        x_landmarks: names(&["x", "a1", "a2", "a3"]),
        y_landmarks: names(&["y1", "y2", "a1", "a2", "a3"]),
        witnesses: Some(names(&["w1", "w2", "w3", "w4", "w5"])),
    }
}

fn c2_two_maxima() -> Outcome {
    let rep = cech_condition_r(&two_maxima(), Length::int(10), CLOSED, None).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::Fail, || format!("verdict {:?}", rep.verdict))?;
    let rec = rep
        .records
        .iter()
        .find(|r| r.s_x == ["x"] && r.s_y == ["y1", "y2"])
        .ok_or("pair ({x}, {y1, y2}) not enumerated")?;
    let want: Vec<Vec<String>> = vec![vec!["a1".into(), "a2".into()], vec!["a1".into(), "a3".into()]];
    ensure(rec.maximal == want, || format!("maximal sets {:?}", rec.maximal))?;
    let wit = rec.witnesses.as_ref().ok_or("no witnesses")?;
    ensure(wit == &vec![vec!["w1".to_string()], vec!["w2".to_string()]], || {
        format!("witnesses {wit:?}")
    })?;
    Ok(format!(
        "{{a1,a2}} by w1, {{a1,a3}} by w2; {} pairs, {} violate uniqueness",
        rep.pairs_checked,
        rep.failures.len()
    ))
}

fn c3_cube() -> Outcome {
    let m = graph_metric(&cube_graph()).unwrap();
    let k = vietoris_rips(&m, Length::int(2), CLOSED, Some(4));
    let b = betti(&k, 3).map_err(|e| e.to_string())?;
    ensure(b == BettiVector(vec![1, 0, 0, 1]), || format!("betti {b}"))?;
    let oracle = gf2_betti(&brute_vr(&m, Length::int(2), 5), 3);
    ensure(oracle == [1, 0, 0, 1], || format!("oracle {oracle:?}"))?;
    Ok(format!("betti {b}"))
}

fn c4_wedge_persistence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0;
    for trial in 0..50 {
        let (nx, ny) = (rng.gen_range(2..=8), rng.gen_range(2..=8));
        let x = random_graph_metric(&mut rng, nx, "x", 4);
        let y = random_graph_metric(&mut rng, ny, "y", 4);
        let (bx, by) = (format!("x{}", rng.gen_range(0..nx)), format!("y{}", rng.gen_range(0..ny)));
        let w = wedge_metric(&x, &bx, &y, &by).unwrap();
        let cap = 2;
        let dw = persistence(&vr_filtration(&w, cap + 1), cap).unwrap().from_dim(1);
        let dx = persistence(&vr_filtration(&x, cap + 1), cap).unwrap().from_dim(1);
        let dy = persistence(&vr_filtration(&y, cap + 1), cap).unwrap().from_dim(1);
        let cmp = diagrams_equal(&dw, &dx.union(&dy), DIAGRAM_TOL);
        ensure(cmp.equal, || format!("trial {trial}: {:?}", cmp.mismatch))?;
        // the same statement scale by scale, against the oracle
        for r in critical_scales(&w) {
            let bw = gf2_betti(&brute_vr(&w, r, cap + 2), cap);
            let bx = gf2_betti(&brute_vr(&x, r, cap + 2), cap);
            let by = gf2_betti(&brute_vr(&y, r, cap + 2), cap);
            for d in 1..=cap {
                ensure(bw[d] == bx[d] + by[d], || format!("trial {trial}, r = {r}, dim {d}"))?;
            }
        }
        points += dw.dims().map(|d| dw.points(d).len()).sum::<usize>();
    }
    Ok(format!("50 wedges, {points} points in dims >= 1"))
}

/// Two unit cycles of lengths `k1`, `k2` sharing a path of `alpha` edges.
fn two_cycles(k1: usize, k2: usize, alpha: usize) -> (MetricGraph, MetricGraph, Vec<String>) {
    let path: Vec<String> = (0..=alpha).map(|i| format!("a{i}")).collect();
    let ring = |k: usize, p: &str| {
        let mut v = path.clone();
        v.extend((1..k - alpha).map(|i| format!("{p}{i}")));
        v
    };
    (cycle_graph(&ring(k1, "x")), cycle_graph(&ring(k2, "y")), path)
}

fn c5_graph_gluing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut scales, mut steps, mut collapsible) = (0, 0, 0);
    for trial in 0..25 {
        let (k1, k2) = (rng.gen_range(4..=9), rng.gen_range(4..=9));
        let alpha = rng.gen_range(0..=(k1.min(k2) - 1) / 3);
        let (gx, gy, path) = two_cycles(k1, k2, alpha);
        let adm = check_graph_gluing(&gx, &gy, &path, None).map_err(|e| e.to_string())?;
        ensure(adm.verdict, || {
            format!("trial {trial}: gluing C{k1}, C{k2} along {alpha} edges rejected")
        })?;
        let s = split_from_graphs(&gx, &gy).map_err(|e| e.to_string())?;
        for r in critical_scales(s.glued()) {
            let rep = check_unique_max_hypothesis(&s, r, CLOSED, None);
            ensure(rep.verdict != Verdict::Fail, || {
                format!("trial {trial} (C{k1}, C{k2}, alpha {alpha}), r = {r}: {:?}", rep.failures.first())
            })?;
            if rep.verdict == Verdict::Collapsible {
                collapsible += 1;
            }
            let eq = verify_gluing_equivalence(&s, r, CLOSED, Mode::Certificate, 2).map_err(|e| format!("trial {trial}, r = {r}: {e}"))?;
            ensure(eq.betti_equal, || {
                format!("trial {trial}, r = {r}: {} vs {}", eq.betti_glued, eq.betti_union)
            })?;
            steps += eq.replayed_steps.unwrap_or(0);
            scales += 1;
        }
    }
    Ok(format!(
        "25 gluings, {scales} scales, {steps} collapses replayed, {collapsible} scales needed the collapsible variant"
    ))
}

fn cells_to_complex(universe: &Arc<Vec<String>>, cells: &common::Cells) -> SimplicialComplex {
    SimplicialComplex::from_simplices(
        universe.clone(),
        cells.iter().map(|c| Simplex::new(c.iter().map(|&v| v as Vertex)).unwrap()),
        None,
    )
    .unwrap()
}

fn c6_lemmas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let kinds = [LemmaKind::Apex, LemmaKind::Simplex, LemmaKind::Collapsible];
    let mut steps = 0;
    for trial in 0..100 {
        let kind = kinds[trial % 3];
        let inst = lemma_instance(&mut rng, kind);
        let universe = Arc::new(inst.universe.clone());
        let l = cells_to_complex(&universe, &inst.l);
        let t: Vec<Simplex> = inst
            .t
            .iter()
            .map(|c| Simplex::new(c.iter().map(|&v| v as Vertex)).unwrap())
            .collect();
        let base = Simplex::new(inst.base.iter().map(|&v| v as Vertex)).unwrap();
        let produced = match kind {
            LemmaKind::Apex => lemma39_sequence(&l, base.vertices()[0], &t),
            LemmaKind::Simplex => gen39_sequence(&l, &base, &t),
            LemmaKind::Collapsible => {
                let mut maximal: Vec<Simplex> = inst
                    .base_edges
                    .iter()
                    .map(|&(a, b)| Simplex::new([a as Vertex, b as Vertex]).unwrap())
                    .collect();
                if maximal.is_empty() {
                    maximal.push(Simplex::vertex(inst.base[0] as Vertex));
                }
                let sigma = SimplicialComplex::from_maximal(universe.clone(), maximal, None).unwrap();
                twoplusplus_sequence(&l, &sigma, &t)
            }
        };
        let (k, cert) = produced.map_err(|e| format!("trial {trial} ({kind:?}): {e}"))?;
        ensure(cells_of(&k) == inst.k, || format!("trial {trial}: K differs from the instance"))?;
        let out = replay(&k, &cert).map_err(|e| format!("trial {trial} ({kind:?}): {e}"))?;
        ensure(out.final_sets == l.label_sets(), || format!("trial {trial}: replay ends elsewhere"))?;
        let cap = 3;
        ensure(gf2_betti(&inst.k, cap) == gf2_betti(&inst.l, cap), || {
            format!("trial {trial}: Betti changed")
        })?;
        ensure(betti(&k, cap).unwrap() == betti(&l, cap).unwrap(), || {
            format!("trial {trial}: library Betti changed")
        })?;
        steps += out.steps;
    }
    Ok(format!("100 instances, {steps} collapses replayed"))
}

fn c7_dismantlable() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let n = rng.gen_range(4..=12);
        let g = random_chordal(&mut rng, n, trial % 2 == 0);
        let m = graph_metric(&g).unwrap();
        for r in [1, 2] {
            let k = vietoris_rips(&m, Length::int(r), CLOSED, None);
            let (core, cert) = greedy_collapse(&k);
            ensure(core.len() == 1, || {
                format!("trial {trial} (n = {n}), r = {r}: stuck at {} simplices", core.len())
            })?;
            replay(&k, &cert).map_err(|e| format!("trial {trial}: {e}"))?;
        }
    }
    Ok("20 graphs collapse to a point at r = 1, 2".into())
}

fn recipes() -> Vec<(&'static str, GluingRecipe)> {
    let mut with_tree = wedge_of_cycles(&[5, 7], 0);
    with_tree.steps.insert(
        1,
        RecipeStep::AttachDismantlable {
            graph: MetricGraph::unit(
                &["s0_2", "d1", "d2", "d3"],
                &[("s0_2", "d1"), ("d1", "d2"), ("d1", "d3"), ("d2", "d3")],
            )
            .unwrap(),
            at: Attachment::Vertex("s0_2".into()),
        },
    );
    let mut mixed = polygon_chain(&[6, 4], 0);
    mixed.steps.push(RecipeStep::AttachDismantlable {
        graph: MetricGraph::unit(&["s0_3", "s0_4", "d"], &[("s0_3", "s0_4"), ("s0_4", "d"), ("d", "s0_3")]).unwrap(),
        at: Attachment::Edge("s0_3".into(), "s0_4".into()),
    });
    vec![
        ("wedge 4,5,6", wedge_of_cycles(&[4, 5, 6], 0)),
        ("wedge 7,8", wedge_of_cycles(&[7, 8], 0)),
        ("wedge 3,4,5,6", wedge_of_cycles(&[3, 4, 5, 6], 0)),
        ("wedge 5,7 + dismantlable", with_tree),
        ("chain 6,4 + triangle", mixed),
        ("chain 5,6,4", polygon_chain(&[5, 6, 4], 0)),
        ("chain 7,5,6", polygon_chain(&[7, 5, 6], 0)),
        ("three 7-cycles", three_sevens()),
        ("metric wedge 4,5", wedge_of_cycles(&[4, 5], 1)),
        ("metric chain 5,4", polygon_chain(&[5, 4], 1)),
    ]
}

fn c8_families() -> Outcome {
    let mut total = 0;
    for (name, recipe) in recipes() {
        let exp = recipe_experiment(&recipe, 2).map_err(|e| format!("{name}: {e}"))?;
        ensure(exp.comparison.equal, || format!("{name}: {:?}", exp.comparison.mismatch))?;
        total += exp.points;
    }
    Ok(format!("10 recipes, {total} sample points"))
}

fn c9_order() -> Outcome {
    let ok = build_recipe(&caution_recipe(true)).map_err(|e| e.to_string())?;
    ensure(ok.cycle_blocks.len() == 2, || "expected two cycle blocks".into())?;
    match build_recipe(&caution_recipe(false)) {
        Err(FamilyError::InadmissibleStep { step, report }) => {
            let ell = report.ell.ok_or("no cycle through the path")?;
            ensure(report.alpha * 3 >= ell && !report.length_check, || "length check passed".into())?;
            Ok(format!(
                "reversed order rejected at step {step}: alpha = {} >= ell / 3 = {}",
                report.alpha,
                ell / 3
            ))
        }
        other => Err(format!("reversed order not rejected: {:?}", other.map(|b| b.cycle_blocks))),
    }
}

fn c10_sup() -> Outcome {
    let cases: [(usize, i64, usize, &str, &str); 10] = [
        (3, 3, 2, "1", "1"),
        (3, 6, 2, "1", "1.5"),
        (4, 4, 2, "1", "1"),
        (4, 8, 2, "1", "1"),
        (4, 8, 2, "1", "2"),
        (4, 4, 3, "1", "0.5"),
        (5, 10, 2, "1", "1"),
        (5, 5, 2, "0.5", "0.75"),
        (6, 12, 2, "1", "1"),
        (4, 12, 3, "2", "1.5"),
    ];
    for (i, &(n, circ, m, width, r)) in cases.iter().enumerate() {
        let ladder = build_circular_ladder(n, Length::int(circ), m, l(width)).map_err(|e| e.to_string())?;
        let rep = verify_sup_theorem(&ladder.x, &ladder.x0, &ladder.y, &ladder.y0, l(r), CLOSED, 2).map_err(|e| e.to_string())?;
        ensure(rep.r_at_least_kappa && rep.hypotheses, || {
            format!("case {i}: hypotheses not met ({rep:?})")
        })?;
        ensure(rep.equal, || format!("case {i}: {} vs {}", rep.betti_sup, rep.betti_x))?;
    }
    Ok("10 ladders match their circle".into())
}

fn c11_loop() -> Outcome {
    let m = sample_circle(Length::int(12), 12).unwrap();
    let d = persistence(&vr_filtration(&m, 2), 1).map_err(|e| e.to_string())?;
    let want = [PersistencePoint::finite(Length::ONE, Length::int(4))];
    ensure(d.points(1) == want, || format!("PH_1 = {:?}", d.points(1)))?;
    Ok("PH_1 = {(1, 4)}".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 glued square counterexample", BUDGET_SQUARE, c1_square_split),
        ("2 Cech Condition-R failure", BUDGET_CECH, c2_two_maxima),
        ("3 cube obstruction", BUDGET_CUBE, c3_cube),
        ("4 wedge persistence", BUDGET_WEDGE, c4_wedge_persistence),
        ("5 graph-gluing theorem", BUDGET_GRAPH_GLUING, c5_graph_gluing),
        ("6 collapse certificates", BUDGET_LEMMAS, c6_lemmas),
        ("7 dismantlable graphs", BUDGET_DISMANTLE, c7_dismantlable),
        ("8 family prediction", BUDGET_FAMILIES, c8_families),
        ("9 gluing order", BUDGET_ORDER, c9_order),
        ("10 supremum metric", BUDGET_SUP, c10_sup),
        ("11 single loop", BUDGET_LOOP, c11_loop),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let t0 = Instant::now();
        let out = run();
        let took = t0.elapsed();
        let verdict = match &out {
            Ok(_) if took <= budget => "PASS",
            _ => "FAIL",
        };
        let detail = match out {
            Ok(s) if took <= budget => s,
            Ok(s) => format!("{s}; over budget {budget:?}"),
            Err(e) => e,
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("{verdict} [{name}] {:.3}s: {detail}", took.as_secs_f64());
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
