use proptest::prelude::*;

use listcol::instance::{
    parse_clique_instance, parse_instance, parse_partition, random_instance, random_partitioned_instance,
    reduce_multicoloured_clique, serialize_clique_instance, serialize_instance, serialize_partition,
    MulticolouredCliqueInstance,
};
use listcol::oracle::{brute_force_solve, dp_solve, BruteConfig};
use listcol::pathwidth::{solve_pathwidth, tree_decomposition, validate_nice};
use listcol::tree::{BracketParams, PosCode};
use listcol::{RootedTree, WorkspaceMeter};

/// Leaves of the pathwidth solver's backtracking tree, at most.
fn search_space(inst: &listcol::Instance) -> u128 {
    (0..inst.n())
        .map(|v| inst.lists.len_of(v).min(inst.graph.degree(v) + 1).max(1) as u128)
        .product()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn meter_conserves_bits(ops in prop::collection::vec((any::<bool>(), 0u64..200), 0..200)) {
        let mut m = WorkspaceMeter::new(100);
        let mut stack = Vec::new();
        let mut expect_peak = 0;
        for (push, bits) in ops {
            if push || stack.is_empty() {
                stack.push((m.push_frame("x", bits), bits));
            } else {
                let (h, _) = stack.pop().unwrap();
                m.pop_frame(h);
            }
            let sum: u64 = stack.iter().map(|&(_, b)| b).sum();
            prop_assert_eq!(m.current_persistent(), sum);
            expect_peak = expect_peak.max(sum);
            prop_assert_eq!(m.peak_report().peak_persistent, expect_peak);
        }
        while let Some((h, _)) = stack.pop() {
            m.pop_frame(h);
        }
        prop_assert_eq!(m.current_persistent(), 0);
    }

    #[test]
    fn scratch_cap_scales_with_calls(calls in 1u64..5, bits in 0u64..2000) {
        let mut m = WorkspaceMeter::new(1000);
        for _ in 0..calls {
            m.enter_call();
        }
        let ok = m.charge_scratch(bits);
        prop_assert_eq!(ok, bits <= m.scratch_cap() * calls);
        prop_assert_eq!(m.violations(), u64::from(!ok));
        m.release_scratch(bits);
        prop_assert_eq!(m.current_scratch(), 0);
    }

    #[test]
    fn instance_text_roundtrip(n in 1usize..40, max_list in 0usize..5, seed in any::<u64>()) {
        let inst = random_instance(n, max_list, seed);
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn partition_text_roundtrip(bags in 1usize..20, k in 1usize..4, seed in any::<u64>()) {
        let (inst, tp) = random_partitioned_instance(bags, k, 3, 5, 0.5, seed);
        let back = parse_partition(&serialize_partition(&tp)).unwrap();
        prop_assert_eq!(back.validate(&inst.graph).unwrap(), k);
        prop_assert_eq!(back, tp);
    }

    #[test]
    fn bracket_of_size_lies_in_its_interval(n_v in 3usize..100_000, frac in 0.0f64..1.0) {
        let bp = BracketParams::new(n_v);
        let max = (n_v - 1) / 2;
        let size = 1 + ((max - 1) as f64 * frac) as usize;
        let j = bp.bracket_index(size).unwrap();
        prop_assert!((1..=bp.m).contains(&j));
        let (lo, hi) = bp.interval(j);
        prop_assert!(lo <= size && size < hi, "size {} bracket {} interval {:?}", size, j, (lo, hi));
        // larger subtrees never fall in a higher bracket
        if size < max {
            prop_assert!(bp.bracket_index(size + 1).unwrap() <= j);
        }
    }

    #[test]
    fn pos_codes_roundtrip(n in 1usize..300, seed in any::<u64>()) {
        let inst = random_instance(n, 1, seed);
        let tree = RootedTree::new(&inst.graph).unwrap();
        let v = (seed as usize) % n;
        let len = tree.heavy_path(v).count();
        let mut seen = std::collections::HashSet::new();
        for i in 1..=len {
            let code = tree.encode_pos(v, i).unwrap();
            // rank is stored in 2^j bits
            let width = 1u32 << code.j;
            prop_assert!(width >= 64 || code.rank < 1u64 << width);
            prop_assert_eq!(code.to_bits().len(), code.j + 1 + width as usize);
            prop_assert_eq!(tree.decode_pos(v, &code).unwrap(), tree.heavy_path(v).nth(i - 1).unwrap());
            prop_assert_eq!(PosCode::from_bits(&code.to_bits()).unwrap(), code);
            prop_assert!(seen.insert(code));
        }
    }

    #[test]
    fn truncating_lists_to_degree_keeps_the_answer(n in 1usize..20, max_list in 1usize..6, seed in any::<u64>()) {
        let inst = random_instance(n, max_list, seed);
        // backtracking is exponential on bad NO instances; bound its tree
        prop_assume!(search_space(&inst) <= 1 << 20);
        let cut = inst.truncated_to_degree();
        let mut m = WorkspaceMeter::new(n);
        let a = solve_pathwidth(&inst, &mut m).unwrap().answer;
        let b = solve_pathwidth(&cut, &mut m).unwrap().answer;
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, dp_solve(&inst).unwrap().is_some());
    }

    #[test]
    fn tree_decompositions_are_narrow(n in 1usize..400, seed in any::<u64>()) {
        let inst = random_instance(n, 1, seed);
        let tree = RootedTree::new(&inst.graph).unwrap();
        let npd = tree_decomposition(&tree);
        let width = validate_nice(&inst.graph, &npd).unwrap();
        prop_assert!(width <= (usize::BITS - n.leading_zeros()) as usize);
    }

    #[test]
    fn tree_solvers_agree(n in 1usize..60, max_list in 1usize..5, seed in any::<u64>()) {
        let inst = random_instance(n, max_list, seed);
        let expect = dp_solve(&inst).unwrap().is_some();
        let mut m = WorkspaceMeter::new(n);
        prop_assert_eq!(listcol::log2::solve_log2(&inst, &mut m).unwrap(), expect);
        let mut m = WorkspaceMeter::new(n);
        prop_assert_eq!(listcol::logspace::solve_log(&inst, &mut m).unwrap(), expect);
        prop_assert_eq!(m.current_persistent(), 0);
        prop_assert_eq!(m.violations(), 0);
        if search_space(&inst) <= 1 << 20 {
            let mut m = WorkspaceMeter::new(n);
            prop_assert_eq!(solve_pathwidth(&inst, &mut m).unwrap().answer, expect);
        }
        let tp = listcol::TreePartition::trivial(&inst.graph);
        let mut m = WorkspaceMeter::new(n);
        prop_assert_eq!(listcol::tpw::solve_tpw(&inst, &tp, &mut m).unwrap(), expect);
    }

    #[test]
    fn tpw_agrees_with_brute_force(bags in 1usize..7, k in 1usize..4, seed in any::<u64>()) {
        let (inst, tp) = random_partitioned_instance(bags, k, 3, 4, 0.6, seed);
        let mut m = WorkspaceMeter::new(inst.n());
        let got = listcol::tpw::solve_tpw(&inst, &tp, &mut m).unwrap();
        prop_assert_eq!(got, brute_force_solve(&inst, BruteConfig::unlimited()).unwrap().is_some());
        prop_assert_eq!(m.current_persistent(), 0);
    }

    #[test]
    fn reduction_preserves_answers(k in 2usize..4, class in 1usize..4, p in 0.2f64..0.9, seed in any::<u64>()) {
        let mc = MulticolouredCliqueInstance::random(k, class, p, seed);
        prop_assert_eq!(parse_clique_instance(&serialize_clique_instance(&mc)).unwrap(), mc.clone());
        let (h, tp) = reduce_multicoloured_clique(&mc).unwrap();
        prop_assert_eq!(tp.validate(&h.graph).unwrap(), k);
        prop_assert!(h.n() >= mc.graph.n());
        let colourable = brute_force_solve(&h, BruteConfig::unlimited()).unwrap().is_some();
        prop_assert_eq!(colourable, mc.find_clique().is_some());
    }
}
