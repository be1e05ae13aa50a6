//! Property suites: serialization round-trips, witness-checker robustness
//! against mutated routes, and order-theoretic symmetries.

use proptest::prelude::*;

use cyclespec_core::graph::{
    expand_route, load_instance, realize_route, Dir, HamGraph, RouteDescriptor, RouteStep,
};
use cyclespec_core::section::classify_pair;
use cyclespec_core::sumset::{thin_to_spacing, LengthSet};
use cyclespec_core::testbed::{gen_random_min_deg3, gen_random_regular};

proptest! {
    /// load_instance . serialize is the identity on valid instances.
    #[test]
    fn serialize_round_trip(n in 8u32..60, seed in 0u64..500, regular in any::<bool>()) {
        let g = if regular {
            let n = n - n % 2;
            gen_random_regular(n, 3, seed).unwrap()
        } else {
            gen_random_min_deg3(n, (seed % 4) as u32, seed).unwrap()
        };
        let text = g.serialize();
        let g2 = load_instance(&text).unwrap();
        prop_assert_eq!(g2.serialize(), text);
    }

    /// A single flipped step endpoint is either rejected or still expands to
    /// a genuinely valid simple route (checked against the raw edge set).
    #[test]
    fn realize_rejects_mutations(seed in 0u64..300, step_sel in 0usize..8, delta in 1u32..5) {
        let g = gen_random_min_deg3(12, 2, seed).unwrap();
        // A known-good route: trivial path of the first chord from position 0.
        let (a, b) = g.chords().next().unwrap();
        let (pa, pb) = (g.pos_of(a).unwrap(), g.pos_of(b).unwrap());
        let (pa, pb) = (pa.min(pb), pa.max(pb));
        let mut route = RouteDescriptor::open(vec![
            RouteStep::Arc { from: 0, to: pa, dir: Dir::Fwd },
            RouteStep::Chord { from: pa, to: pb },
            RouteStep::Arc { from: pb, to: g.n() - 1, dir: Dir::Fwd },
        ]);
        if pa == 0 {
            route.steps.remove(0);
        }
        if pb == g.n() - 1 {
            route.steps.pop();
        }
        prop_assume!(realize_route(&g, &route).is_ok());

        let mut mutated = route.clone();
        let si = step_sel % mutated.steps.len();
        let flip_from = step_sel % 2 == 0;
        mutated.steps[si] = match mutated.steps[si] {
            RouteStep::Arc { from, to, dir } => RouteStep::Arc {
                from: if flip_from { (from + delta) % g.n() } else { from },
                to: if flip_from { to } else { (to + delta) % g.n() },
                dir,
            },
            RouteStep::Chord { from, to } => RouteStep::Chord {
                from: if flip_from { (from + delta) % g.n() } else { from },
                to: if flip_from { to } else { (to + delta) % g.n() },
            },
        };
        if let Ok(w) = realize_route(&g, &mutated) {
            // Accidentally reconnected: re-validate against the raw edges.
            let seq = expand_route(&g, &mutated).unwrap();
            let mut seen = std::collections::HashSet::new();
            for (i, &p) in seq.iter().enumerate() {
                let last = i + 1 == seq.len();
                prop_assert!(seen.insert(p) || (last && mutated.closed && p == seq[0]));
                if !last {
                    let q = seq[i + 1];
                    let adjacent = (p + 1) % g.n() == q || (q + 1) % g.n() == p
                        || g.has_chord_pos(p, q);
                    prop_assert!(adjacent, "hop {p}->{q} is not an edge");
                }
            }
            prop_assert_eq!(w.length, seq.len() as u64 - 1);
        }
    }

    /// Chord classification is symmetric in its arguments.
    #[test]
    fn classify_symmetric(a in (0u32..50, 0u32..50), b in (0u32..50, 0u32..50)) {
        prop_assume!(a != b);
        prop_assert_eq!(classify_pair(a, b), classify_pair(b, a));
    }

    /// Greedy thinning: gaps land in [target, target - 1 + gap_hi] and the
    /// kept count meets the floor (|L|-1) / ceil(target / gap_lo) + 1.
    #[test]
    fn thinning_bounds(start in 0u64..50, gaps in prop::collection::vec(1u64..20, 1..40), target in 1u64..40) {
        let mut v = vec![start];
        for g in &gaps {
            v.push(v.last().unwrap() + g);
        }
        let set = LengthSet::new(v.iter().map(|&l| (l, ())).collect()).unwrap();
        let gap_lo = set.actual_gap_lo().unwrap();
        let gap_hi = set.actual_gap_hi().unwrap();
        let out = thin_to_spacing(&set, target).unwrap();
        if target <= gap_lo {
            prop_assert_eq!(out.len(), set.len());
        } else {
            if out.len() > 1 {
                prop_assert!(out.actual_gap_lo().unwrap() >= target);
                prop_assert!(out.actual_gap_hi().unwrap() <= target - 1 + gap_hi);
            }
            let floor = (set.len() as u64 - 1) / target.div_ceil(gap_lo) + 1;
            prop_assert!(out.len() as u64 >= floor, "{} < {floor}", out.len());
        }
    }
}

/// Every theorem-grade generated instance validates, and its Hamilton order
/// really is a cycle of the emitted edge set.
#[test]
fn generators_emit_valid_instances() {
    for seed in 0..30u64 {
        let g = gen_random_regular(20, 3, seed).unwrap();
        cyclespec_core::graph::validate_instance(&g, true).unwrap();
        let w = realize_route(&g, &RouteDescriptor::full_cycle()).unwrap();
        assert_eq!(w.length, g.n() as u64);
        for c in g.chords().collect::<Vec<_>>() {
            let l = g.cycle_chord_length(c).unwrap();
            assert!(l >= 2 && l <= g.n() as u64 / 2, "chord length {l} out of range");
        }
    }
}

/// HamGraph is immutable and shareable: concurrent oracle runs on the same
/// instance agree.
#[test]
fn concurrent_reads_agree() {
    let g = std::sync::Arc::new(gen_random_min_deg3(12, 1, 3).unwrap());
    let lim = cyclespec_core::testbed::OracleLimits::default();
    let mut handles = Vec::new();
    for _ in 0..4 {
        let g = g.clone();
        let lim = lim.clone();
        handles.push(std::thread::spawn(move || {
            cyclespec_core::testbed::oracle_cycle_spectrum(&g, &lim).unwrap()
        }));
    }
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for w in results.windows(2) {
        assert_eq!(w[0], w[1]);
    }
}
