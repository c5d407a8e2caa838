use std::collections::BTreeSet;
use std::sync::Arc;

use limitgen::collection::families::{
    worked_matrix, worked_matrix_over, WORKED_HORIZON, WORKED_STREAM, WORKED_TARGET,
};
use limitgen::collection::progression::arith_index;
use limitgen::collection::{IntCollection, IntLanguage, LanguageCollection, Oracle};
use limitgen::game::adversary::{Canonical, Replay};
use limitgen::game::{
    run_game, Adversary, GameTrace, Knowledge, Move, PromptStrategy, SampleSet, Target,
};
use limitgen::generators::{by_name, Generator, LimitGenerator, StepInput};
use limitgen::{Universe, UniverseId};

const ROWS: [&[u64]; 5] = [
    &[1],
    &[2, 5, 7, 8, 10, 12, 15],
    &[2, 5, 8, 10, 12, 15],
    &[1, 2, 5, 8, 10],
    &[2, 5, 8, 10, 12, 14],
];

struct Expected {
    output: u64,
    n: Option<usize>,
    m: Option<u64>,
}

/// Direct simulation of the limit rule on the worked-example matrix.
fn simulate() -> Vec<Expected> {
    let member = |n: usize, w: u64| ROWS[n - 1].contains(&w);
    let mut seen = BTreeSet::new();
    let mut m_prev = 0;
    let mut out = Vec::new();
    for (i, &w) in WORKED_STREAM.iter().enumerate() {
        let t = i + 1;
        seen.insert(w);
        let consistent: Vec<usize> = (1..=t)
            .filter(|&n| seen.iter().all(|&x| member(n, x)))
            .collect();
        let mut m = m_prev.max(w);
        if consistent.is_empty() {
            let least = (1..).find(|x| !seen.contains(x)).unwrap();
            out.push(Expected {
                output: least,
                n: None,
                m: Some(m),
            });
            m_prev = m;
            continue;
        }
        loop {
            let critical = consistent.iter().copied().filter(|&n| {
                consistent
                    .iter()
                    .filter(|&&i| i < n)
                    .all(|&i| (1..=m).all(|x| !member(n, x) || member(i, x)))
            });
            let n = critical.max().unwrap();
            if let Some(a) = (1..=m).find(|&x| member(n, x) && !seen.contains(&x)) {
                out.push(Expected {
                    output: a,
                    n: Some(n),
                    m: Some(m),
                });
                m_prev = m;
                break;
            }
            m += 1;
            assert!(m <= 2 * WORKED_HORIZON, "no output at step {t}");
        }
    }
    out
}

fn worked_trace(
    c: Arc<dyn LanguageCollection>,
    generator: &mut dyn Generator,
    prompts: &PromptStrategy,
) -> GameTrace {
    let k = Knowledge::new(c.clone(), Target::Index(WORKED_TARGET)).unwrap();
    let mut adv = Replay::new(WORKED_STREAM.map(UniverseId::from_index));
    run_game(
        &Oracle::new(c),
        &k,
        &mut adv,
        generator,
        prompts,
        WORKED_STREAM.len(),
    )
    .unwrap()
}

#[test]
fn worked_example_matches_a_direct_simulation() {
    let expected = simulate();
    let t = worked_trace(
        Arc::new(worked_matrix()),
        &mut LimitGenerator::default(),
        &PromptStrategy::None,
    );
    assert_eq!(t.outputs(), [1, 7, 10, 12, 15]);
    for (r, e) in t.steps.iter().zip(&expected) {
        assert_eq!(r.a_t.get(), e.output, "step {}", r.t);
        assert_eq!(r.n_t, e.n, "step {}", r.t);
        assert_eq!(r.m_t, e.m, "step {}", r.t);
    }
}

#[test]
fn worked_example_records_show_the_drop_to_the_true_language() {
    let mut g = LimitGenerator::default().recording();
    worked_trace(Arc::new(worked_matrix()), &mut g, &PromptStrategy::None);
    let all = g.take_records();
    let records = all.iter().filter(|r| r.t == 5).collect::<Vec<_>>();
    assert!(!records.is_empty());
    let last = records.last().unwrap();
    assert_eq!(last.n_t, Some(3));
    assert_eq!(last.m, Some(15));
    assert!(records.iter().any(|r| r.n_t == Some(5)));
    let fourteen = records.iter().find(|r| r.m == Some(14)).unwrap();
    assert_eq!(fourteen.n_t, Some(3));
    for r in &all {
        assert!(r.critical.iter().all(|n| r.consistent.contains(n)));
        assert_eq!(r.critical.first(), r.consistent.first());
    }
}

#[test]
fn empty_prompt_reproduces_the_unprompted_run() {
    let strings = Universe::strings("ab").unwrap();
    let c: Arc<dyn LanguageCollection> = Arc::new(worked_matrix_over(strings));
    let plain = worked_trace(
        c.clone(),
        &mut LimitGenerator::default(),
        &PromptStrategy::None,
    );
    let mut robust = by_name("prompted-robust", None).unwrap();
    let prompted = worked_trace(c, robust.as_mut(), &"constant:ε".parse().unwrap());
    assert_eq!(plain.outputs(), prompted.outputs());
    assert_eq!(plain.outputs(), [1, 7, 10, 12, 15]);
}

fn arith_trace(generator: &str, steps: usize) -> GameTrace {
    let c: Arc<dyn LanguageCollection> = Arc::new(IntCollection::arith_progressions());
    let z = arith_index(&IntLanguage::p(3, 5)).unwrap();
    let k = Knowledge::new(c.clone(), Target::Index(z)).unwrap();
    let mut g = by_name(generator, None).unwrap();
    run_game(
        &Oracle::new(c),
        &k,
        &mut Canonical::new(k.clone()),
        g.as_mut(),
        &PromptStrategy::None,
        steps,
    )
    .unwrap()
}

fn trailing_valid(t: &GameTrace) -> usize {
    t.steps.iter().rev().take_while(|r| r.valid).count()
}

#[test]
fn subset_and_prefix_generators_both_settle() {
    let limit = arith_trace("limit", 400);
    let fc = arith_trace("f_c", 400);
    assert!(
        trailing_valid(&limit) >= 250,
        "limit: {}",
        trailing_valid(&limit)
    );
    assert!(trailing_valid(&fc) >= 250, "f_c: {}", trailing_valid(&fc));
    let differ = limit
        .steps
        .iter()
        .zip(&fc.steps)
        .filter(|(a, b)| a.a_t != b.a_t)
        .count();
    println!("limit and f_c differ on {differ} of 400 steps");
}

#[test]
fn disruptive_iterations_stay_below_t() {
    let c: Arc<dyn LanguageCollection> = Arc::new(IntCollection::arith_progressions());
    let z = arith_index(&IntLanguage::p(3, 5)).unwrap();
    let k = Knowledge::new(c.clone(), Target::Index(z)).unwrap();
    let oracle = Oracle::new(c);
    let mut adv = Canonical::new(k);
    let mut g = LimitGenerator::default();
    let mut sample = SampleSet::new();
    let mut m_prev = 0;
    for t in 1..=300 {
        let Move::Emit(w) = adv.next(t).unwrap() else {
            panic!("stream ended")
        };
        sample.push(w);
        let out = g.step(&oracle, &StepInput::new(t, &sample)).unwrap();
        assert!(
            out.disruptive < t,
            "step {t} had {} disruptive iterations",
            out.disruptive
        );
        let m = out.m_t.unwrap();
        assert!(m >= m_prev && m >= w.get());
        assert_eq!(out.m_start, Some(m_prev.max(w.get())));
        m_prev = m;
    }
}

#[test]
fn norepeat_never_repeats_itself() {
    for generator in ["limit-norepeat", "f_c-norepeat"] {
        let t = arith_trace(generator, 200);
        let outputs = t.outputs();
        let distinct: BTreeSet<_> = outputs.iter().collect();
        assert_eq!(distinct.len(), outputs.len(), "{generator}");
        assert!(trailing_valid(&t) >= 100, "{generator}");
    }
}

#[test]
fn unknown_generator_and_bad_suffix_are_errors() {
    assert!(by_name("oracle-of-delphi", None).is_err());
    assert!(by_name("heuristic-i2b-norepeat", None).is_err());
    assert!(by_name("limit-norepeat-norepeat", None).is_ok());
}
