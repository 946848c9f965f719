mod common;

use common::{
    arborescence_exhaustive, cactus_patch_exists, intersection_exhaustive, isotonic, menger_exhaustive, random_graph,
    random_pair, rooted_connected_exhaustive, Shape,
};
use obsnet::field::is_prime;
use obsnet::opt::{
    brute_force_min_structure, min_spanning_arborescence, weighted_matroid_intersection, BiSetMatroid, Matroid,
    PartitionMatroid, Sense, WeightedArc,
};
use obsnet::realization::{draw, instantiate_deterministic, observability_rank};
use obsnet::robustness::{failure_curve, CurveConfig};
use obsnet::structure::BoolMatrix;
use obsnet::{
    backbone_shortest_paths, build_dynamic_graph, design, extract_cactus_certificate, instantiate_random, io,
    is_structurally_observable, local_node_connectivity, max_robustness, network_fails, recover_initial_state, simulate,
    validate_certificate, Cost, CostModel, Digraph, PrimeField, Recovery, StructuralPair, DEFAULT_PRIME,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TINY: Shape = Shape { max_sensors: 4, max_backbone: 2, max_edges: 10, max_cost: 9 };

fn digraph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=14)))
}

/// Subsets of `0..n` as index lists.
fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

fn bi_set_instance() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, usize)> {
    (2usize..=4, 1usize..=2).prop_flat_map(|(n, c)| {
        let arcs = prop::collection::vec((0..n, 0..n).prop_filter("distinct endpoints", |(a, b)| a != b), 0..=7);
        (Just(n), arcs, Just(c))
    })
}

/// A branching with self-loops: states in random order each link to an
/// earlier state or, when a root, to a fresh output row.
fn random_branching(rng: &mut ChaCha8Rng, n: usize) -> StructuralPair {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut a = BoolMatrix::identity(n);
    let mut roots = Vec::new();
    for (pos, &j) in order.iter().enumerate() {
        if pos == 0 || rng.gen_bool(0.3) {
            roots.push(j);
        } else {
            a.set(order[rng.gen_range(0..pos)], j, true);
        }
    }
    let mut c = BoolMatrix::zeros(roots.len(), n);
    for (r, &j) in roots.iter().enumerate() {
        c.set(r, j, true);
    }
    StructuralPair::from_patterns(a, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn connectivity_matches_path_search((n, arcs) in digraph()) {
        let g = Digraph::new(n, arcs.clone());
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    prop_assert_eq!(local_node_connectivity(&g, u, v).unwrap(), menger_exhaustive(n, &arcs, u, v));
                }
            }
        }
    }

    #[test]
    fn bi_set_matroid_axioms((n, arcs, c) in bi_set_instance()) {
        let m = BiSetMatroid::new(n, arcs.clone(), c);
        let all: Vec<Vec<usize>> = subsets(arcs.len()).collect();
        let indep: Vec<bool> = all.iter().map(|s| m.is_independent(s)).collect();
        prop_assert!(m.is_independent(&[]));
        for (i, s) in all.iter().enumerate() {
            if !indep[i] {
                continue;
            }
            for x in s {
                let smaller: Vec<usize> = s.iter().copied().filter(|y| y != x).collect();
                prop_assert!(m.is_independent(&smaller), "not closed under removal: {:?}", s);
            }
            for (j, t) in all.iter().enumerate() {
                if indep[j] && t.len() > s.len() {
                    let grows = t.iter().filter(|e| !s.contains(e)).any(|&e| {
                        let mut bigger = s.clone();
                        bigger.push(e);
                        m.is_independent(&bigger)
                    });
                    prop_assert!(grows, "exchange fails for {:?} and {:?}", s, t);
                }
            }
        }
    }

    #[test]
    fn bi_set_bases_are_rooted_connected((n, arcs, c) in bi_set_instance()) {
        // Ground arcs plus c arcs from every node to the root, as in the
        // padded construction: independent sets of size c*n are exactly the
        // arc sets giving every node c disjoint paths to the root.
        let m = BiSetMatroid::new(n, arcs.clone(), c);
        for s in subsets(arcs.len()) {
            if s.len() != arcs.len().min(c * n) || !m.is_independent(&s) {
                continue;
            }
            let mut chosen: Vec<(usize, usize)> = s.iter().map(|&e| arcs[e]).collect();
            let mut deg = vec![0; n];
            for &(t, _) in &chosen {
                deg[t] += 1;
            }
            for (v, d) in deg.iter().enumerate() {
                chosen.extend(std::iter::repeat_n((v, n), c.saturating_sub(*d)));
            }
            prop_assert!(rooted_connected_exhaustive(n + 1, &chosen, n, n, c));
        }
    }

    #[test]
    fn arborescence_matches_enumeration(
        (n, raw) in (2usize..=5).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n, 0u64..10), 0..=10)))
    ) {
        let arcs: Vec<WeightedArc> =
            raw.iter().map(|&(tail, head, c)| WeightedArc { tail, head, cost: Cost::from_units(c) }).collect();
        let oracle = arborescence_exhaustive(n, &arcs, n - 1);
        match min_spanning_arborescence(n, &arcs, n - 1) {
            Ok(r) => {
                prop_assert_eq!(Some(r.total_cost), oracle);
                prop_assert_eq!(r.edges.len(), n - 1);
                prop_assert_eq!(r.edges.iter().map(|&e| arcs[e].cost).sum::<Cost>(), r.total_cost);
            }
            Err(_) => prop_assert_eq!(oracle, None),
        }
    }

    #[test]
    fn intersection_matches_enumeration(
        blocks in prop::collection::vec((0usize..3, 0usize..3), 1..=10),
        weights in prop::collection::vec(-5i64..10, 10),
        caps in prop::collection::vec(0usize..=2, 6),
        maximize in any::<bool>(),
    ) {
        let n = blocks.len();
        let m1 = PartitionMatroid::new(blocks.iter().map(|b| b.0).collect(), caps[..3].to_vec());
        let m2 = PartitionMatroid::new(blocks.iter().map(|b| b.1).collect(), caps[3..].to_vec());
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        let w = &weights[..n];
        let got = weighted_matroid_intersection(&m1, &m2, w, sense);
        prop_assert!(m1.is_independent(&got) && m2.is_independent(&got));
        let (size, best) = intersection_exhaustive(&m1, &m2, w, sense);
        prop_assert_eq!(got.len(), size);
        prop_assert_eq!(got.iter().map(|&i| w[i]).sum::<i64>(), best);
    }

    #[test]
    fn intersection_with_bi_set_matches_enumeration(
        (n, arcs, c) in bi_set_instance(),
        weights in prop::collection::vec(0i64..10, 7),
    ) {
        let m1 = PartitionMatroid::new(arcs.iter().map(|a| a.0).collect(), vec![c; n]);
        let m2 = BiSetMatroid::new(n, arcs.clone(), c);
        let w = &weights[..arcs.len()];
        let got = weighted_matroid_intersection(&m1, &m2, w, Sense::Minimize);
        let (size, best) = intersection_exhaustive(&m1, &m2, w, Sense::Minimize);
        prop_assert_eq!(got.len(), size);
        prop_assert_eq!(got.iter().map(|&i| w[i]).sum::<i64>(), best);
    }

    #[test]
    fn cost_decimal_round_trip(micros in 0u64..10_000_000_000_000) {
        let c = Cost::from_micros(micros);
        prop_assert_eq!(Cost::parse_decimal(&c.to_decimal()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn design_matches_brute_force(seed in any::<u64>(), k in 0usize..=1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, TINY);
        let oracle = brute_force_min_structure(&g, k).unwrap();
        match design(&g, k) {
            Ok(sol) => {
                prop_assert_eq!(oracle.map(|b| b.cost), Some(sol.cost_per_output_sum));
                prop_assert!(obsnet::robust_structural_observability(&sol.structure, k).unwrap().is_robust());
            }
            Err(_) => {
                prop_assert!(!max_robustness(&g).admits(k));
                prop_assert!(oracle.is_none());
            }
        }
    }

    #[test]
    fn design_uses_rooted_connected_edges(seed in any::<u64>(), k in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, Shape { max_sensors: 5, max_backbone: 4, max_edges: 24, max_cost: 9 });
        if let Ok(sol) = design(&g, k) {
            let gd = build_dynamic_graph(&g, &backbone_shortest_paths(&g)).unwrap();
            let n = gd.n_sensors();
            let mut arcs = Vec::new();
            for e in &gd.edges {
                let (t, h) = (gd.dense(e.tail), gd.dense(e.head));
                let used = if h < n {
                    sol.structure.a().get(h, t)
                } else if h < n + gd.n_outputs() {
                    sol.structure.c().get(h - n, t)
                } else {
                    sol.structure.output_used(t - n)
                };
                if used {
                    arcs.push((t, h));
                }
            }
            prop_assert!(rooted_connected_exhaustive(gd.node_count(), &arcs, gd.fusion_dense(), n, k + 1));
        }
    }

    #[test]
    fn design_json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, TINY);
        if let Ok(sol) = design(&g, 0) {
            let text = io::to_pretty(&io::design_to_json(&sol));
            prop_assert_eq!(io::parse_design(&text).unwrap(), sol);
            let graph_text = io::to_pretty(&io::graph_to_json(&g));
            prop_assert_eq!(io::parse_physical_graph(&graph_text).unwrap(), g);
        }
    }

    #[test]
    fn matching_test_agrees_with_cactus_search(seed in any::<u64>(), n in 1usize..=6, m in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let density = rng.gen_range(0.05..0.7);
        let s = random_pair(&mut rng, n, m, density);
        let fast = is_structurally_observable(&s);
        prop_assert_eq!(fast, cactus_patch_exists(&s));
        let cert = extract_cactus_certificate(&s);
        prop_assert_eq!(cert.is_spanning(), fast);
        if fast {
            prop_assert_eq!(validate_certificate(&s, &cert), Ok(()));
        }
    }

    #[test]
    fn recovery_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, Shape { max_sensors: 8, max_backbone: 3, max_edges: 30, max_cost: 9 });
        if let Ok(sol) = design(&g, 0) {
            let p = [7u64, 101, DEFAULT_PRIME][rng.gen_range(0..3)];
            let field = PrimeField::new(p).unwrap();
            let Ok(inst) = instantiate_random(&sol.structure, field, seed, 64) else {
                // Tiny fields can miss every time; the large one must not.
                prop_assert!(p < 1000);
                return Ok(());
            };
            let n = sol.structure.n_states();
            let x0: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            let trace = simulate(&inst.system, &x0, n + 2).unwrap();
            prop_assert_eq!(recover_initial_state(&inst.system, &trace).unwrap(), Recovery::State(x0));
            let csv = io::trace_to_csv(&trace, inst.system.n_outputs());
            prop_assert_eq!(io::parse_trace(&csv).unwrap(), trace);
            // The document keeps patterns only, not output provenance.
            let back = io::parse_system(&io::to_pretty(&io::system_to_json(&inst.system))).unwrap();
            prop_assert_eq!(back.a(), inst.system.a());
            prop_assert_eq!(back.c(), inst.system.c());
            let (s1, s2) = (back.structure().unwrap(), inst.system.structure().unwrap());
            prop_assert_eq!((s1.a(), s1.c()), (s2.a(), s2.c()));
        }
    }

    #[test]
    fn rank_is_stable_past_n(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_pair(&mut rng, n, 2, 0.4);
        let sys = draw(&s, PrimeField::new(101).unwrap(), &mut rng).unwrap();
        let r = observability_rank(&sys, n);
        prop_assert_eq!(observability_rank(&sys, n + 3), r);
        prop_assert!(observability_rank(&sys, n - 1) <= r);
        if !is_structurally_observable(&s) {
            prop_assert!(r < n);
        }
    }

    #[test]
    fn deterministic_instantiation_is_observable(seed in any::<u64>(), n in 1usize..=8, extra in 0u64..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_branching(&mut rng, n);
        let p = (n as u64 + extra..).find(|&q| is_prime(q)).unwrap();
        let sys = instantiate_deterministic(&s, PrimeField::new(p).unwrap()).unwrap();
        prop_assert_eq!(observability_rank(&sys, n), n);
    }

    #[test]
    fn no_failure_within_guarantee(seed in any::<u64>()) {
        // Failing a stranded sensor can repair the network, so failure is
        // not monotone in the failed set; only the guarantee region is.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, Shape { max_sensors: 7, max_backbone: 3, max_edges: 30, max_cost: 9 });
        let k = match max_robustness(&g) {
            obsnet::Robustness::Max(k) => k.min(2),
            obsnet::Robustness::Infeasible => return Ok(()),
        };
        let sol = design(&g, k).unwrap();
        let n = sol.sensors.len();
        for mask in 0u32..1 << n {
            let failed: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if failed.len() <= k {
                prop_assert!(!network_fails(&sol, &failed), "failure inside the guarantee: {:?}", failed);
            }
        }
    }
}

#[test]
fn failure_curve_is_nearly_isotonic() {
    let cfg = CurveConfig {
        n_sensors: 20,
        n_backbone: 3,
        radius: 0.5,
        cost_model: CostModel::DistanceSquared,
        k: 2,
        n_graphs: 20,
        n_trials: 500,
        seed: 11,
    };
    let curve = failure_curve(&cfg).unwrap();
    let probs: Vec<f64> = curve.points.iter().map(|p| p.probability()).collect();
    let fit = isotonic(&probs);
    let gap = probs.iter().zip(&fit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap <= 0.05, "isotonic deviation {gap}: {probs:?}");
    assert!(curve.points.iter().take(3).all(|p| p.failures == 0));
    assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
}
