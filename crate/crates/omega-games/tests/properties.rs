//! Property tests over seeded random instances: lasso evaluation
//! invariances, stage-table edge inequalities, product projections,
//! truncation monotonicity, and the equivalence chain between absence of
//! strong splits, path shape, and reducibility at finite scale.

use std::collections::BTreeSet;

use proptest::prelude::*;

use omega_games::positionalize::{check_stage_inequalities, is_stage_fixpoint};
use omega_games::random::{
    random_arena, random_explicit_muller, random_machine, random_path_condition, rng_from_seed,
};
use omega_games::zielonka::AlphaKind;
use omega_games::{
    build_tree, check_p0, compute_alpha, compute_beta, induced_lasso, member, product_with_memory,
    reduce_to_parity, verify_reduction, winner_of_lasso, ChainDescriptor, ConditionSpec, Family,
    FlowerVariant, GeneratedArena, Player, Priority, Strategy, VertexId, ZielonkaPathSpec,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lasso_winner_invariant_under_rotation_and_unrolling(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let arena = random_arena(&mut rng, 5, 4, 3);
        let m0 = random_machine(&mut rng, &arena, Player::Zero, 2);
        let m1 = random_machine(&mut rng, &arena, Player::One, 2);
        let lasso = induced_lasso(
            &arena,
            &Strategy::Memory(m0),
            &Strategy::Memory(m1),
            VertexId(0),
        ).unwrap();
        prop_assert!(lasso.is_valid(&arena));
        for condition in [
            ConditionSpec::MinParity,
            ConditionSpec::MaxParity,
            ConditionSpec::Infinity,
        ] {
            let base = winner_of_lasso(&condition, &arena, &lasso).unwrap();
            for by in 1..lasso.cycle.len() {
                let rotated = lasso.rotated(by);
                prop_assert!(rotated.is_valid(&arena));
                prop_assert_eq!(winner_of_lasso(&condition, &arena, &rotated).unwrap(), base);
            }
            let unrolled = lasso.unrolled();
            prop_assert!(unrolled.is_valid(&arena));
            prop_assert_eq!(winner_of_lasso(&condition, &arena, &unrolled).unwrap(), base);
        }
    }

    #[test]
    fn stage_tables_satisfy_edge_inequalities(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let arena = random_arena(&mut rng, 12, 5, 3);
        let p: Vec<bool> = arena.vertices().map(|v| arena.priority(v).offset % 3 == 0).collect();
        let q: Vec<bool> = arena.vertices().map(|v| arena.priority(v).offset >= 4).collect();
        let alpha = compute_alpha(&arena, &p);
        prop_assert_eq!(check_stage_inequalities(&arena, &alpha), None);
        prop_assert!(is_stage_fixpoint(&arena, &alpha));
        let beta = compute_beta(&arena, &p, &q);
        prop_assert_eq!(check_stage_inequalities(&arena, &beta), None);
        prop_assert!(is_stage_fixpoint(&arena, &beta));
    }

    #[test]
    fn product_cycles_project_into_the_arena(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let arena = random_arena(&mut rng, 6, 4, 3);
        let machine = random_machine(&mut rng, &arena, Player::Zero, 3);
        let region: BTreeSet<VertexId> = arena.vertices().collect();
        let product = product_with_memory(&arena, &machine, &region).unwrap();
        for (u, v) in product.arena.edges() {
            let (bu, bv) = (product.project[u.0], product.project[v.0]);
            prop_assert!(arena.successors(bu).contains(&bv));
            if arena.owner(bu) == Player::Zero {
                prop_assert_eq!(product.arena.successors(u).len(), 1);
            } else {
                prop_assert_eq!(
                    product.arena.successors(u).len(),
                    arena.successors(bu).len()
                );
            }
        }
    }

    #[test]
    fn zielonka_path_membership_is_node_determined(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let diffs = vec![
            BTreeSet::from([0, 1]),
            BTreeSet::from([2]),
            BTreeSet::from([3, 4, 5]),
        ];
        let spec = ConditionSpec::ZielonkaPath(
            ZielonkaPathSpec::new(Player::Zero, diffs.clone(), false).unwrap(),
        );
        // Two sets whose deepest containing node coincides get the same
        // winner; adding elements from deeper labels never changes it.
        use rand::Rng as _;
        let x: BTreeSet<Priority> = (0..10u32)
            .filter(|_| rng.gen_bool(0.4))
            .map(Priority::nat)
            .collect();
        let node = |s: &BTreeSet<Priority>| -> usize {
            for (i, d) in diffs.iter().enumerate() {
                if s.iter().any(|p| d.contains(&p.offset)) {
                    return i;
                }
            }
            diffs.len()
        };
        let mut grown = x.clone();
        grown.insert(Priority::nat(17));
        if node(&x) == node(&grown) {
            prop_assert_eq!(member(&spec, &x).unwrap(), member(&spec, &grown).unwrap());
        }
    }

    #[test]
    fn reductions_agree_on_every_subset(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let alphabet = 2 + (seed % 7) as u32;
        let muller = random_path_condition(&mut rng, alphabet);
        let spec = ConditionSpec::ExplicitMuller(muller);
        let reduction = reduce_to_parity(&spec).unwrap();
        let all_subsets: Vec<BTreeSet<u32>> = (0u32..1 << alphabet)
            .map(|mask| (0..alphabet).filter(|b| mask & (1 << b) != 0).collect())
            .collect();
        verify_reduction(&reduction, &spec, &all_subsets, &[]).unwrap();
        if let AlphaKind::Finite(k) = reduction.alpha {
            prop_assert!(k as usize <= 2 * alphabet as usize + 2);
        }
    }

    #[test]
    fn no_strong_split_and_path_shape_implies_reducibility(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let muller = random_explicit_muller(&mut rng, 4);
        let tree = build_tree(&muller).unwrap();
        let p0 = check_p0(&muller).unwrap();
        if p0.passed() && tree.is_path() {
            let spec = ConditionSpec::ExplicitMuller(muller);
            prop_assert!(reduce_to_parity(&spec).is_ok());
        }
    }

    #[test]
    fn solver_regions_partition_and_verify(seed in 0u64..10_000) {
        let mut rng = rng_from_seed(seed);
        let arena = random_arena(&mut rng, 3 + (seed % 20) as usize, 6, 4);
        let result = omega_games::solve_parity_recursive(&arena);
        prop_assert!(result.w0.is_disjoint(&result.w1));
        prop_assert_eq!(result.w0.len() + result.w1.len(), arena.len());
        if !result.w0.is_empty() {
            let out = omega_games::verify_positional(
                &arena,
                &ConditionSpec::MinParity,
                &result.strat0,
                &result.w0,
            ).unwrap();
            prop_assert!(out.pass);
        }
    }
}

#[test]
fn expansions_monotone_across_the_range() {
    let families = [
        Family::Flower { variant: FlowerVariant::MaxParity },
        Family::Flower { variant: FlowerVariant::OmegaCenter },
        Family::ChainGame { descriptor: ChainDescriptor::max_parity(), finite_appearance: false },
        Family::ChainGame { descriptor: ChainDescriptor::max_parity(), finite_appearance: true },
        Family::Ladder,
    ];
    for family in families {
        for n in [1u32, 2, 3, 5, 8, 13] {
            let small = GeneratedArena { family: family.clone(), truncation: n }
                .expand()
                .unwrap();
            let large = GeneratedArena { family: family.clone(), truncation: n + 1 }
                .expand()
                .unwrap();
            for v in small.vertices() {
                let w = large.lookup(small.id(v)).expect("vertex survives growth");
                assert_eq!(small.priority(v), large.priority(w));
                assert_eq!(small.owner(v), large.owner(w));
            }
            for (u, v) in small.edges() {
                let lu = large.lookup(small.id(u)).unwrap();
                let lv = large.lookup(small.id(v)).unwrap();
                assert!(large.successors(lu).contains(&lv), "{family:?} N={n}");
            }
        }
    }
}
