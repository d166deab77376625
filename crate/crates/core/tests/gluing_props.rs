mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{cycle_graph, random_graph_metric};
use vrglue::collapse::replay;
use vrglue::families::{recipe_experiment, wedge_of_cycles};
use vrglue::gluing::{
    check_graph_gluing, maximal_valid_complex, maximal_valid_sets_vr, split_from_graphs, verify_gluing_equivalence, Mode, SplitSpace,
};
use vrglue::homology::betti;
use vrglue::metric::{wedge_metric, GraphEdge};
use vrglue::simplicial::{critical_scales, vietoris_rips};
use vrglue::{Convention, Length, MetricGraph};

/// Two random trees sharing the path a0-a1-a2, so the union satisfies the
/// gluing formula through A.
fn random_split(seed: u64) -> SplitSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side = |p: &str| {
        let mut names: Vec<String> = (0..3).map(|i| format!("a{i}")).collect();
        names.extend((0..rng.gen_range(1..=3)).map(|i| format!("{p}{i}")));
        let mut edges: Vec<GraphEdge> = (0..2)
            .map(|i| GraphEdge {
                u: names[i].clone(),
                v: names[i + 1].clone(),
                len: Length::ONE,
                subdivision: None,
            })
            .collect();
        for i in 3..names.len() {
            edges.push(GraphEdge {
                u: names[rng.gen_range(0..i)].clone(),
                v: names[i].clone(),
                len: Length::int(rng.gen_range(1..=2)),
                subdivision: None,
            });
        }
        MetricGraph::new(names, edges, 0).unwrap()
    };
    let (gx, gy) = (side("x"), side("y"));
    split_from_graphs(&gx, &gy).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wedges_add_betti_numbers(seed in any::<u64>(), nx in 2usize..7, ny in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_graph_metric(&mut rng, nx, "x", 4);
        let y = random_graph_metric(&mut rng, ny, "y", 4);
        let w = wedge_metric(&x, "x0", &y, "y0").unwrap();
        for r in critical_scales(&w) {
            let b = |m| betti(&vietoris_rips(m, r, Convention::Closed, Some(3)), 2).unwrap();
            let (bw, bx, by) = (b(&w), b(&x), b(&y));
            for d in 1..=2 {
                prop_assert_eq!(bw.get(d), bx.get(d) + by.get(d), "dim {} at r = {}", d, r);
            }
        }
    }

    #[test]
    fn maximal_sets_are_valid_and_maximal(seed in any::<u64>(), pick in 0usize..64) {
        let s = random_split(seed);
        let m = s.glued();
        let scales = critical_scales(m);
        let r = scales[pick % scales.len()];
        let a = s.a_labels();
        for sx in s.x_only() {
            for sy in s.y_only() {
                let (lx, ly) = (m.label(sx).to_string(), m.label(sy).to_string());
                if m.d(sx, sy) > r {
                    continue;
                }
                let sets = maximal_valid_sets_vr(&s, r, Convention::Closed, std::slice::from_ref(&lx), std::slice::from_ref(&ly)).unwrap();
                let valid = |set: &[String]| {
                    let mut all = set.to_vec();
                    all.extend([lx.clone(), ly.clone()]);
                    let idx = m.indices_of(&all).unwrap();
                    m.diameter(&idx) <= r
                };
                for (i, set) in sets.iter().enumerate() {
                    prop_assert!(valid(set));
                    for extra in a.iter().filter(|v| !set.contains(v)) {
                        let mut bigger = set.clone();
                        bigger.push(extra.clone());
                        prop_assert!(!valid(&bigger), "{:?} extends by {}", set, extra);
                    }
                    for other in &sets[i + 1..] {
                        prop_assert!(!set.iter().all(|v| other.contains(v)));
                        prop_assert!(!other.iter().all(|v| set.contains(v)));
                    }
                }
            }
        }
    }

    #[test]
    fn valid_set_complexes_grow_with_scale(seed in any::<u64>()) {
        let s = random_split(seed);
        let m = s.glued();
        let (sx, sy) = (s.x_only()[0], s.y_only()[0]);
        let pair = ([m.label(sx).to_string()], [m.label(sy).to_string()]);
        let mut prev = None;
        for r in critical_scales(m).into_iter().filter(|&r| r >= m.d(sx, sy)) {
            let (k, _) = maximal_valid_complex(&s, r, Convention::Closed, &pair.0, &pair.1).unwrap();
            let sets = k.label_sets();
            if let Some(p) = &prev {
                prop_assert!(sets.is_superset(p));
            }
            prev = Some(sets);
        }
    }

    #[test]
    fn admissibility_verdict_is_the_conjunction(k1 in 3usize..10, k2 in 3usize..10, alpha in 0usize..3) {
        prop_assume!(alpha + 2 <= k1.min(k2));
        let path: Vec<String> = (0..=alpha).map(|i| format!("a{i}")).collect();
        let ring = |k: usize, p: &str| {
            let mut v = path.clone();
            v.extend((1..k - alpha).map(|i| format!("{p}{i}")));
            v
        };
        let (gx, gy) = (cycle_graph(&ring(k1, "x")), cycle_graph(&ring(k2, "y")));
        let rep = check_graph_gluing(&gx, &gy, &path, None).unwrap();
        prop_assert_eq!(rep.verdict, rep.length_check && rep.degree_check.pass && rep.endpoint_check.pass);
        let ell = rep.ell.unwrap();
        prop_assert_eq!(rep.length_check, Length::int(3 * alpha as i64) < ell);
        prop_assert_eq!(ell, Length::int(k1.min(k2) as i64));
    }

    #[test]
    fn certificates_replay_and_preserve_betti(seed in any::<u64>(), pick in 0usize..64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k1, k2) = (rng.gen_range(4..=7), rng.gen_range(4..=7));
        let alpha = rng.gen_range(0..=(k1.min(k2) - 1) / 3);
        let path: Vec<String> = (0..=alpha).map(|i| format!("a{i}")).collect();
        let ring = |k: usize, p: &str| {
            let mut v = path.clone();
            v.extend((1..k - alpha).map(|i| format!("{p}{i}")));
            v
        };
        let s = split_from_graphs(&cycle_graph(&ring(k1, "x")), &cycle_graph(&ring(k2, "y"))).unwrap();
        let scales = critical_scales(s.glued());
        let r = scales[pick % scales.len()];
        let rep = verify_gluing_equivalence(&s, r, Convention::Closed, Mode::Certificate, 2).unwrap();
        prop_assert!(rep.betti_equal);
        let cert = rep.certificate.unwrap();
        let (glued, _) = vrglue::gluing::glued_and_union(&s, r, Convention::Closed, None);
        prop_assert_eq!(replay(&glued, &cert).unwrap().steps, cert.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wedges_of_cycles_match_prediction(ks in proptest::collection::vec(3usize..8, 1..4), sub in 0usize..2) {
        let exp = recipe_experiment(&wedge_of_cycles(&ks, sub), 2).unwrap();
        prop_assert!(exp.comparison.equal, "{:?}", exp.comparison.mismatch);
    }
}
