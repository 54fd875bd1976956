//! Halting-problem experiments over tape units: the diagonal refutation,
//! the dup-only decider against real execution, the oracle-backed solver,
//! and the reply correspondence for judged programs.

use std::collections::BTreeSet;

use pglb_core::exec::{Budget, Reply, Verdict};
use pglb_core::gen::{self, Rng};
use pglb_core::isa::{ident, sbt, InstrSeq};
use pglb_core::tape::{
    check_solution, decide_halting, decide_halting_dup, diagonal_refute, dup_unit,
    encode_program_syms, halting_oracle_unit, halting_reply_with_depth, run_on_unit,
    SolutionCondition, TapeState, TapeSym,
};

fn fuel() -> Budget {
    Budget::Fuel(50_000)
}

#[test]
fn diagonal_refutes_every_total_candidate() {
    let unit = dup_unit();
    let mut rng = Rng::new(0xd1a6);
    let mut candidates = vec![sbt("!t"), sbt("!f"), sbt("+f.dup ; !t ; !f")];
    for _ in 0..20 {
        candidates.push(gen::random_total_dup_program(&mut rng));
    }
    for x in candidates {
        let report = diagonal_refute(&x, &unit, &fuel()).unwrap();
        assert_eq!(
            report.failed_condition(),
            Some(SolutionCondition::Correctness),
            "candidate `{}`: {:?}",
            x.print(),
            report.verdict
        );
    }
}

#[test]
fn dup_decider_agrees_with_execution() {
    let unit = dup_unit();
    let mut rng = Rng::new(0xd2b7);
    for case in 0..150 {
        let x = gen::random_dup_program(&mut rng);
        let decided = decide_halting_dup(&x).unwrap();
        for _ in 0..5 {
            let state = gen::random_tape_state(&mut rng, 4);
            // Halting dup runs finish within the program length; diverging
            // ones grow the tape every loop, so no configuration repeats
            // and a small cap is enough to classify them.
            let out = run_on_unit(&x, &unit, &state, &Budget::Exact { cap: 300 }).unwrap();
            let agrees = match out.verdict {
                Verdict::Converged(_) => decided,
                Verdict::Diverged(_) | Verdict::BudgetExhausted => !decided,
            };
            assert!(
                agrees,
                "case {case}: `{}` on {state}: decided {decided}, ran {:?}",
                x.print(),
                out.verdict
            );
        }
    }
}

fn oracle_corpus(rng: &mut Rng, size: usize) -> Vec<(InstrSeq, Vec<TapeSym>)> {
    let cfg = gen::ProgramCfg::strict_unit_programs(&[ident("halting")]);
    (0..size)
        .map(|_| {
            let y = gen::random_program(rng, &cfg);
            let v = gen::random_tape_word(rng, 6);
            (y, v)
        })
        .collect()
}

#[test]
fn oracle_solver_passes_reflexive_check() {
    let oracle = halting_oracle_unit();
    let interface = BTreeSet::from([ident("halting")]);
    let solver = sbt("+f.halting ; !t ; !f");
    let mut rng = Rng::new(0x0a1c);
    let corpus = oracle_corpus(&mut rng, 12);
    let report = check_solution(
        &solver,
        &interface,
        &oracle,
        &corpus,
        &Budget::exact(),
        true,
    )
    .unwrap();
    assert!(report.passed(), "{:?}", report.verdict);
    assert_eq!(report.checked, corpus.len());
}

#[test]
fn decider_matches_execution_and_depth_matches_colons() {
    let oracle = halting_oracle_unit();
    let mut rng = Rng::new(0x0a2d);
    for (y, v) in oracle_corpus(&mut rng, 25) {
        let decided = decide_halting(&y, &v).unwrap();
        let out = run_on_unit(&y, &oracle, &TapeState::from_right(v.clone()), &Budget::exact())
            .unwrap();
        assert_eq!(
            decided,
            matches!(out.verdict, Verdict::Converged(_)),
            "`{}` on |{:?}",
            y.print(),
            v
        );

        let mut judged = encode_program_syms(&y);
        judged.push(TapeSym::Colon);
        judged.extend(v.iter().copied());
        let colons = judged.iter().filter(|s| **s == TapeSym::Colon).count();
        let (_, depth) = halting_reply_with_depth(&judged);
        assert_eq!(depth, colons);
    }
}

/// For a reflexive oracle solver and convergent judged programs, the
/// judged program's reply shows up as the solver's reply on the
/// false-to-divergence transform.
#[test]
fn judged_reply_equals_solver_reply_on_ftod() {
    let oracle = halting_oracle_unit();
    let solver = sbt("+f.halting ; !t ; !f");
    let mut rng = Rng::new(0x0a3e);
    let mut conclusive = 0;
    for (y, v) in oracle_corpus(&mut rng, 60) {
        let state = TapeState::from_right(v.clone());
        let out = run_on_unit(&y, &oracle, &state, &Budget::exact()).unwrap();
        let y_reply = match out.verdict {
            Verdict::Converged(_) => out.reply().unwrap(),
            _ => continue,
        };
        conclusive += 1;
        let mut coded = encode_program_syms(&y.ftod());
        coded.push(TapeSym::Colon);
        coded.extend(v.iter().copied());
        let solver_out = run_on_unit(
            &solver,
            &oracle,
            &TapeState::from_right(coded),
            &Budget::exact(),
        )
        .unwrap();
        assert_eq!(solver_out.reply(), Some(y_reply), "`{}` on |{v:?}", y.print());
    }
    assert!(conclusive >= 10, "too few convergent corpus items");
}

#[test]
fn solver_reply_is_boolean_on_all_corpus_states() {
    let oracle = halting_oracle_unit();
    let solver = sbt("+f.halting ; !t ; !f");
    let mut rng = Rng::new(0x0a4f);
    for _ in 0..40 {
        let state = gen::random_tape_state(&mut rng, 8);
        let out = run_on_unit(&solver, &oracle, &state, &Budget::exact()).unwrap();
        assert!(matches!(out.reply(), Some(Reply::T) | Some(Reply::F)));
    }
}
