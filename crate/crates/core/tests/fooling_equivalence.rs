use seplab_core::automaton::enumerate_automata;
use seplab_core::fooling::search_fooling_pair;
use seplab_core::separation::{confirm_counterexample, verify_time_t};
use seplab_core::Caps;

#[test]
fn search_none_iff_time_separation() {
    let caps = Caps::default();
    let automata = enumerate_automata(2, 2, 3, &caps).unwrap();
    let mut mismatches = 0;
    for a in &automata {
        for t in 0..=6 {
            let ok = verify_time_t(a, 2, 2, t, &caps).unwrap().is_ok();
            let pair = search_fooling_pair(a, 2, 2, t, &caps).unwrap();
            if let Some(p) = &pair {
                assert!(confirm_counterexample(a, 2, 2, &p.as_counterexample(a, t), Some(t)));
            }
            if ok != pair.is_none() {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0, "over {} automata", automata.len());
}
