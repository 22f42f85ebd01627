mod common;

use std::collections::{BTreeMap, BTreeSet};

use contextuality::embeddings::{build_theorem41, compose, extend_model, EmbeddingJson};
use contextuality::io::{parse_embedding, parse_model, parse_rule, parse_scenario, to_json_string};
use contextuality::lp::{EqualitySystem, Row};
use contextuality::polytope::{ce1_check, enumerate_model_vertices, has_model, is_model, ModelPolytope};
use contextuality::products::{apply_rule, fr_product_bipartite, Rule, DEFAULT_EDGE_BUDGET};
use contextuality::reductions::{
    completion, observational_equivalence, vcz_reduce, zero_weighted_vertices, ReductionBudget,
};
use contextuality::{build_party, Model, Rational, Scenario};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

/// Scenarios on up to `max_n` vertices with up to four edges of size ≤ 4.
fn scenario(max_n: usize) -> impl Strategy<Value = Scenario> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::btree_set(0..n, 1..=4.min(n)), 1..=4)))
        .prop_filter_map("vertex left uncovered", |(n, edges)| {
            Scenario::new(
                (0..n).map(|v| format!("v{v}")),
                edges.iter().map(|e| e.iter().map(|v| format!("v{v}")).collect::<Vec<_>>()),
            )
            .ok()
        })
}

fn with_model(max_n: usize) -> impl Strategy<Value = Scenario> {
    scenario(max_n).prop_filter("no model", has_model)
}

fn sample_model(h: &Scenario, seed: u64) -> Model {
    let points = enumerate_model_vertices(h, 64).unwrap().vertices;
    random_convex(&mut ChaCha8Rng::seed_from_u64(seed), &points)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn edges_cover_vertices_and_orthogonality_is_symmetric(h in scenario(8)) {
        let covered: BTreeSet<usize> = h.edges().iter().flatten().copied().collect();
        prop_assert_eq!(covered.len(), h.vertex_count());
        let adj = h.orthogonality_adjacency();
        for (u, nbrs) in adj.iter().enumerate() {
            prop_assert!(!nbrs.contains(&u));
            for &v in nbrs {
                prop_assert!(adj[v].contains(&u));
            }
        }
    }

    #[test]
    fn deterministic_models_match_exhaustive_search(h in scenario(8)) {
        let n = h.vertex_count();
        let mut brute = Vec::new();
        for mask in 0u32..(1 << n) {
            let support: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
            let m = Model::indicator(n, &support);
            if is_model(&h, &m).unwrap() {
                brute.push(m);
            }
        }
        brute.sort();
        prop_assert_eq!(h.enumerate_deterministic_models(), brute);
    }

    #[test]
    fn vertex_enumeration_matches_oracle(h in scenario(7)) {
        let ours: BTreeSet<Vec<BigRational>> =
            enumerate_model_vertices(&h, 64).unwrap().vertices.iter().map(model_big).collect();
        prop_assert_eq!(ours, oracle_extreme_points(&h));
    }

    #[test]
    fn lp_optimum_is_best_extreme_point(h in with_model(7), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = h.vertex_count();
        let c: Vec<Rational> = (0..n).map(|_| random_unit(&mut rng) - Rational::new(1, 2)).collect();
        let rows: Vec<Row> = h.edges().iter().map(|e| Row::indicator(e, Rational::one())).collect();
        let opt = EqualitySystem::new(n, rows).maximize(&c).optimum.unwrap();
        let best = enumerate_model_vertices(&h, 64)
            .unwrap()
            .vertices
            .iter()
            .map(|p| p.weights().iter().zip(&c).map(|(x, y)| x * y).sum::<Rational>())
            .max()
            .unwrap();
        prop_assert_eq!(opt, best);
    }

    #[test]
    fn extension_by_zero_of_induced_models(h in with_model(7), mask in any::<u8>()) {
        let w: Vec<usize> = (0..h.vertex_count()).filter(|v| mask >> v & 1 == 1).collect();
        prop_assume!(!w.is_empty());
        let induced = h.induced_subhypergraph(&w).unwrap();
        prop_assume!(!induced.empty_induced_edge);
        let sub = induced.scenario;
        for p in enumerate_model_vertices(&sub, 64).unwrap().vertices {
            let mut full = vec![Rational::zero(); h.vertex_count()];
            for (i, x) in p.weights().iter().enumerate() {
                full[h.index_of(sub.label(i)).unwrap()] = x.clone();
            }
            prop_assert!(is_model(&h, &Model::new(full)).unwrap());
        }
    }

    #[test]
    fn completion_keeps_models_and_is_idempotent(h in with_model(7)) {
        let budget = ReductionBudget::default();
        let c = completion(&h, budget).unwrap();
        prop_assert_eq!(
            enumerate_model_vertices(&c, 64).unwrap(),
            enumerate_model_vertices(&h, 64).unwrap()
        );
        prop_assert_eq!(completion(&c, budget).unwrap(), c);
    }

    #[test]
    fn reduced_forms_are_reduced(h in with_model(7)) {
        let budget = ReductionBudget::default();
        let r = vcz_reduce(&h, budget).unwrap().reduced;
        prop_assert!(zero_weighted_vertices(&r).unwrap().is_empty());
        let table = r.incidence_table();
        let distinct: BTreeSet<&Vec<usize>> = table.iter().collect();
        prop_assert_eq!(distinct.len(), table.len());
        let again = vcz_reduce(&r, budget).unwrap().reduced;
        prop_assert!(observational_equivalence(&r, &again, 64).unwrap().is_equivalent());
    }

    #[test]
    fn deterministic_models_are_exclusive(h in scenario(7)) {
        for m in h.enumerate_deterministic_models() {
            prop_assert!(ce1_check(&h, &m, 10_000).unwrap());
        }
    }

    #[test]
    fn scenario_and_model_json_round_trip(h in with_model(7), seed in any::<u64>()) {
        let text = to_json_string(&h.to_raw());
        prop_assert_eq!(&parse_scenario(&text).unwrap(), &h);
        let p = sample_model(&h, seed);
        let text = to_json_string(&p.to_json(&h));
        prop_assert_eq!(parse_model(&text, &h).unwrap(), p);
    }

    #[test]
    fn rule_json_round_trip(map in prop::collection::btree_map("[0-9],[0-9]", prop::collection::vec("[a-z0-9|]{1,6}", 0..4), 0..6)) {
        let rule = Rule(map);
        prop_assert_eq!(parse_rule(&to_json_string(&rule)).unwrap(), rule);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn clone_extension_round_trip(h in with_model(6), seed in any::<u64>()) {
        let emb = build_theorem41(&h, None, DEFAULT_EDGE_BUDGET).unwrap();
        let p = sample_model(&h, seed);
        let ext = extend_model(&h, &emb, &p).unwrap();
        prop_assert!(is_model(&emb.target, &ext).unwrap());
        prop_assert_eq!(compose(&emb, &ext), p);
        let text = to_json_string(&emb.to_json(&h));
        prop_assert_eq!(parse_embedding(&text, &h).unwrap(), emb.clone());
        let json: EmbeddingJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(json, emb.to_json(&h));
    }

    #[test]
    fn bell_models_satisfy_edge_difference_identity(seed in any::<u64>()) {
        let a = build_party(2, 2).unwrap().into_scenario();
        let prod = fr_product_bipartite(&a, &a, DEFAULT_EDGE_BUDGET).unwrap();
        let h = prod.scenario();
        let p = sample_model(h, seed);
        for e1 in h.edges() {
            for e2 in h.edges() {
                let only1: Vec<usize> = e1.iter().copied().filter(|v| !e2.contains(v)).collect();
                let only2: Vec<usize> = e2.iter().copied().filter(|v| !e1.contains(v)).collect();
                prop_assert_eq!(p.mass(&only1), p.mass(&only2));
            }
        }
    }

    #[test]
    fn full_rule_keeps_the_polytope(m in 1usize..=2, d in 1usize..=3, m2 in 1usize..=2, d2 in 1usize..=2) {
        let a = build_party(m, d).unwrap().into_scenario();
        let b = build_party(m2, d2).unwrap().into_scenario();
        let prod = fr_product_bipartite(&a, &b, DEFAULT_EDGE_BUDGET).unwrap();
        let game = apply_rule(&prod, &Rule::full(&prod)).unwrap();
        prop_assert_eq!(&game, prod.scenario());
        let poly = ModelPolytope::new(&game);
        prop_assert!(poly.is_nonempty());
    }
}

#[test]
fn labelled_models_reject_foreign_domains() {
    let h = Scenario::new(["a", "b"], [["a", "b"]]).unwrap();
    let mut weights = BTreeMap::new();
    weights.insert("a".to_string(), Rational::one());
    weights.insert("z".to_string(), Rational::zero());
    assert!(Model::from_labeled(&h, &weights).is_err());
}
