use std::collections::BTreeSet;

use proptest::prelude::*;

use limitgen::collection::progression::intersection_size;
use limitgen::collection::{Dfa, IntLanguage, IntersectionSize};
use limitgen::game::SampleSet;
use limitgen::prompted::prefix_dfa;
use limitgen::suite::words_upto;
use limitgen::{Alphabet, Element, Universe, UniverseId};

fn lang() -> impl Strategy<Value = IntLanguage> {
    (
        any::<bool>(),
        -20i64..20,
        1u64..8,
        prop::collection::btree_set(-30i64..30, 0..4),
    )
        .prop_map(|(up, a, b, v)| {
            if up {
                IntLanguage::p(a, b).with_extra(v)
            } else {
                IntLanguage::q(a, b).with_extra(v)
            }
        })
}

fn member(l: &IntLanguage, x: i64) -> bool {
    let on_grid = (x - l.start).rem_euclid(l.step as i64) == 0;
    let side = match l.kind {
        limitgen::collection::progression::Direction::Up => x >= l.start,
        limitgen::collection::progression::Direction::Both => true,
    };
    (on_grid && side) || l.extra.contains(&x)
}

fn dfa() -> impl Strategy<Value = Dfa> {
    (1usize..5).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(0..n, n * 2),
        )
            .prop_map(|(n, acc, delta)| {
                let ab = Alphabet::ab();
                let accepting: Vec<usize> = (0..n).filter(|&s| acc[s]).collect();
                let transitions: Vec<(usize, char, usize)> = (0..n)
                    .flat_map(|s| [(s, 'a', delta[2 * s]), (s, 'b', delta[2 * s + 1])])
                    .collect();
                Dfa::new(ab, n, 0, accepting, transitions).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn integer_ids_round_trip(x in any::<i64>().prop_filter("representable", |x| *x > i64::MIN)) {
        let u = Universe::Integers;
        let id = u.index_of(&Element::Int(x)).unwrap();
        prop_assert_eq!(u.element_at(id), Element::Int(x));
    }

    #[test]
    fn string_ids_round_trip(id in 1u64..(1 << 40), symbols in prop::sample::select(vec!["ab", "abc", "01", "xyzw"])) {
        let u = Universe::strings(symbols).unwrap();
        let id = UniverseId::from_index(id);
        prop_assert_eq!(u.index_of(&u.element_at(id)).unwrap(), id);
    }

    #[test]
    fn shortlex_order_is_length_then_lexicographic(a in 1u64..5000, b in 1u64..5000) {
        let u = Universe::strings("ab").unwrap();
        let (x, y) = (u.word(UniverseId::from_index(a)).unwrap(), u.word(UniverseId::from_index(b)).unwrap());
        prop_assert_eq!(a.cmp(&b), (x.len(), &x).cmp(&(y.len(), &y)));
    }

    #[test]
    fn subset_rule_matches_brute_force(l in lang(), m in lang()) {
        // any counterexample lies within a window covering both offsets, extras and a full period
        let span = 30 + (l.step * m.step) as i64 * 2;
        let lo = l.start.min(m.start) - span;
        let hi = l.start.max(m.start) + span;
        let brute = (lo..=hi).all(|x| !member(&l, x) || member(&m, x));
        prop_assert_eq!(l.is_subset_of(&m), brute, "{} vs {}", l, m);
    }

    #[test]
    fn intersection_size_matches_brute_force(ls in prop::collection::vec(lang(), 1..4)) {
        let refs: Vec<&IntLanguage> = ls.iter().collect();
        let size = intersection_size(&refs).unwrap();
        let count = |lo: i64, hi: i64| (lo..=hi).filter(|&x| ls.iter().all(|l| member(l, x))).count();
        match size {
            IntersectionSize::Finite(n) => {
                prop_assert_eq!(count(-400, 400) as u128, n);
                prop_assert_eq!(count(-800, 800) as u128, n);
            }
            IntersectionSize::Infinite => prop_assert!(count(100, 800) > 0 || count(-800, -100) > 0),
        }
    }

    #[test]
    fn automaton_text_round_trips(d in dfa()) {
        let back: Dfa = d.to_text().parse().unwrap();
        prop_assert_eq!(&back, &d);
    }

    #[test]
    fn automaton_analysis_matches_enumeration(d in dfa()) {
        let words = words_upto(&['a', 'b'], 9);
        let accepted: Vec<&String> = words.iter().filter(|w| d.accepts(w)).collect();
        prop_assert_eq!(d.is_empty(), accepted.is_empty());
        let least = d.shortlex_least();
        prop_assert_eq!(least.as_ref(), accepted.first().copied());
        // at most four states: infinite iff some accepted word has length in [5, 9)
        let long = words.iter().any(|w| w.len() >= 5 && d.accepts(w));
        prop_assert_eq!(d.is_infinite(), long);
        if let Some(n) = d.finite_size() {
            prop_assert_eq!(n as usize, accepted.len());
        }
        let c = d.complement();
        prop_assert!(words.iter().all(|w| c.accepts(w) != d.accepts(w)));
    }

    #[test]
    fn product_is_intersection(d in dfa(), e in dfa()) {
        let p = d.intersection(&e).unwrap();
        for w in words_upto(&['a', 'b'], 7) {
            prop_assert_eq!(p.accepts(&w), d.accepts(&w) && e.accepts(&w));
        }
    }

    #[test]
    fn prefix_automaton_is_starts_with(p in "[ab]{0,4}", excluded in prop::collection::vec("[ab]{0,5}", 0..4)) {
        let d = prefix_dfa(&Alphabet::ab(), &p, &excluded).unwrap();
        for w in words_upto(&['a', 'b'], 7) {
            prop_assert_eq!(d.accepts(&w), w.starts_with(&p) && !excluded.contains(&w), "{:?}", w);
        }
    }

    #[test]
    fn sample_distinct_is_the_set_of_arrivals(ids in prop::collection::vec(1u64..40, 0..30)) {
        let s: SampleSet = ids.iter().map(|&i| UniverseId::from_index(i)).collect();
        let set: BTreeSet<UniverseId> = ids.iter().map(|&i| UniverseId::from_index(i)).collect();
        prop_assert_eq!(s.distinct(), &set);
        prop_assert_eq!(s.arrivals().len(), ids.len());
        let absent = s.least_absent(&BTreeSet::new());
        prop_assert!(!set.contains(&absent));
        prop_assert!((1..absent.get()).all(|i| set.contains(&UniverseId::from_index(i))));
    }
}
