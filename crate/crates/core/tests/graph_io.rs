mod common;

use proptest::prelude::*;
use sumgames::graph::{parse_arena, parse_graph, prefix_sums, Arena};

proptest! {
    #[test]
    fn graphs_round_trip(g in common::any_graph(6, 5, 14)) {
        let again = parse_graph::<i64>(&g.to_json_string()).unwrap();
        prop_assert_eq!(&again, &g);
        prop_assert_eq!(again.to_json(), g.to_json());
    }

    #[test]
    fn arenas_round_trip(a in common::any_arena(6, 5, 3)) {
        let again: Arena<i64> = parse_arena(&a.to_json_string()).unwrap();
        prop_assert_eq!(again, a);
    }

    #[test]
    fn prefix_sums_are_cumulative(word in prop::collection::vec(-1000i64..1000, 0..40)) {
        let sums = prefix_sums(&word).unwrap();
        prop_assert_eq!(sums.len(), word.len());
        if let Some(first) = sums.first() {
            prop_assert_eq!(*first, word[0]);
        }
        for k in 1..sums.len() {
            prop_assert_eq!(sums[k] - sums[k - 1], word[k]);
        }
    }
}

#[test]
fn overflowing_prefix_sum_is_an_error() {
    assert!(prefix_sums(&[i64::MAX, 1]).is_err());
    assert!(prefix_sums(&[i8::MIN, -1i8]).is_err());
    assert_eq!(prefix_sums(&[100i8, 27]).unwrap(), vec![100, 127]);
}

#[test]
fn dot_has_one_line_per_edge() {
    let a = parse_arena::<i64>(
        r#"{"vertices":[{"id":"a","owner":"Eve"},{"id":"b","owner":"Adam"}],
            "edges":[{"from":"a","to":"b","weight":-1},{"from":"b","to":"a","weight":2},{"from":"b","to":"b","weight":0}]}"#,
    )
    .unwrap();
    let dot = a.to_dot();
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 3);
    assert!(dot.contains("a -> b [label=\"-1\"];"));
    assert!(dot.contains("a [shape=circle];"));
    assert!(dot.contains("b [shape=square];"));
}
