use std::collections::HashMap;

use majorant_core::sumset::{is_bj_set, DEFAULT_ENUMERATION_LIMIT};
use majorant_core::FrequencySet;

/// Counts multisets by walking every ordered j-tuple and sorting it.
fn brute_is_bj(elems: &[i64], j: u32) -> bool {
    let mut reps: HashMap<i64, Vec<Vec<i64>>> = HashMap::new();
    let n = elems.len();
    let total = n.pow(j);
    for code in 0..total {
        let mut c = code;
        let mut tuple: Vec<i64> = (0..j)
            .map(|_| {
                let e = elems[c % n];
                c /= n;
                e
            })
            .collect();
        tuple.sort();
        let list = reps.entry(tuple.iter().sum()).or_default();
        if !list.contains(&tuple) {
            list.push(tuple);
        }
    }
    reps.values().all(|l| l.len() == 1)
}

#[test]
fn matches_brute_force_on_small_sets() {
    let mut checked = 0;
    for mask in 1u32..(1 << 11) {
        if mask.count_ones() > 4 {
            continue;
        }
        let elems: Vec<i64> = (0..11).filter(|b| mask >> b & 1 == 1).collect();
        let s: FrequencySet = elems.iter().copied().collect();
        for j in [2, 3] {
            let fast = is_bj_set(&s, j, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(fast.is_bj, brute_is_bj(&elems, j), "S = {s}, j = {j}");
            if let Some(w) = fast.witness {
                assert_eq!(w.rep_a.total(), w.target);
                assert_eq!(w.rep_b.total(), w.target);
                assert_ne!(w.rep_a, w.rep_b);
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 2 * (11 + 55 + 165 + 330));
}

#[test]
fn translation_and_reflection_invariance() {
    for (set, j) in [
        (vec![0, 1, 3], 2),
        (vec![0, 1, 2], 2),
        (vec![0, 1, 5, 11], 3),
    ] {
        let base = is_bj_set(&set.iter().copied().collect(), j, DEFAULT_ENUMERATION_LIMIT)
            .unwrap()
            .is_bj;
        let shifted: FrequencySet = set.iter().map(|x| x + 17).collect();
        let reflected: FrequencySet = set.iter().map(|x| -x).collect();
        assert_eq!(
            is_bj_set(&shifted, j, DEFAULT_ENUMERATION_LIMIT)
                .unwrap()
                .is_bj,
            base
        );
        assert_eq!(
            is_bj_set(&reflected, j, DEFAULT_ENUMERATION_LIMIT)
                .unwrap()
                .is_bj,
            base
        );
    }
}
