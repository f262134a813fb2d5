mod common;

use common::{fixtures, props};
use shex_core::validate::{infer_types, refine_step, MTyping, Strategy};

fn assert_clean(name: &str, out: props::Outcome) {
    assert!(out.ok(), "{name}: {} of {} failed\n{}", out.violations.len(), out.checked, out.violations.join("\n---\n"));
}

#[test]
fn refinement_is_monotone_and_bounded() {
    let mut r = common::rng(3);
    for _ in 0..200 {
        let s = props::random_general_schema(&mut r, 3, &["a", "b"]);
        let g = props::random_tree(&mut r, 5, 2);
        let full = MTyping::full(g.node_count(), s.type_count());
        let mut current = full.clone();
        let mut steps = 0;
        loop {
            let next = refine_step(&g, &s, &current, Strategy::General).unwrap();
            assert!(next.leq(&current));
            if next == current {
                break;
            }
            current = next;
            steps += 1;
        }
        assert!(steps <= g.node_count() * s.type_count());
        assert_eq!(current, infer_types(&g, &s).unwrap());
    }
}

#[test]
fn maximal_typing_dominates_every_valid_typing() {
    assert_clean("maximality", props::maximality());
}

#[test]
fn strategies_agree() {
    assert_clean("strategies", props::strategy_equivalence(100, 17));
}

#[test]
fn flood_is_the_least_extension() {
    assert_clean("flood", props::flood_correctness(100, 23));
}

#[test]
fn trees_do_not_separate_the_semantics() {
    assert_clean("trees", props::trees(300, 5));
}

#[test]
fn cycle_schema_language() {
    assert_clean("cycle", props::cycle_schema(&fixtures::schema("s_cycle.shex"), 2000, 9));
}
