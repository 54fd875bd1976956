//! Executable law suites: the algebraic axioms of threads, service
//! families and the processing operators, run as randomized equalities,
//! plus a brute-force program enumerator used to cross-check the
//! derived-operation enumeration.
//!
//! Each checker runs a number of generated instances and reports the
//! first counterexample as an error string.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::exec::{
    abstracting_use, check_ispo, contract_taus, run, use_thread, Budget, IspoOutcome, Reply,
    Verdict, DEFAULT_PRODUCT_BOUND,
};
use crate::funits::{FunctionalUnit, StateSpace, UnitState};
use crate::gen::{self, ProgramCfg, Rng};
use crate::isa::{basic, ident, BasicInstruction, Dialect, InstrSeq, Instruction};
use crate::services::{Service, ServiceFamily, ServiceReply};
use crate::tape::{dup_unit, TapeState, TapeSym};
use crate::threads::{equal, extract, project, RegularThread};

const PRODUCT: usize = DEFAULT_PRODUCT_BOUND;

fn exact() -> Budget {
    Budget::Exact { cap: 100_000 }
}

fn actions() -> Vec<BasicInstruction> {
    vec![
        basic("f", "get"),
        basic("f", "set_t"),
        basic("f", "m0"),
        basic("g", "get"),
        basic("g", "m1"),
        basic("h", "set_f"),
    ]
}

fn thread(rng: &mut Rng) -> RegularThread {
    gen::random_thread(rng, &actions(), 7)
}

fn family(rng: &mut Rng) -> ServiceFamily {
    gen::random_family(rng, 3)
}

fn ensure(cond: bool, what: &str, case: usize) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(format!("{what} failed on case {case}"))
    }
}

/// T1: postconditional composition over τ ignores its false branch.
pub fn check_t1(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let x = thread(&mut rng);
        let y = thread(&mut rng);
        ensure(
            equal(
                &RegularThread::post_tau(&x, &y),
                &RegularThread::post_tau(&x, &x),
            ),
            "T1",
            case,
        )?;
        ensure(
            equal(&RegularThread::post_tau(&x, &y), &RegularThread::tau(&x)),
            "T1 (τ prefix form)",
            case,
        )?;
    }
    Ok(())
}

/// P0-P3: the projection axioms, with τ counting as an action.
pub fn check_projection(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let x = thread(&mut rng);
        let y = thread(&mut rng);
        let n = rng.below(5);
        ensure(
            equal(&project(&x, 0).thread, &RegularThread::dead()),
            "P0",
            case,
        )?;
        for (leaf, name) in [
            (RegularThread::stop_pos(), "P1a"),
            (RegularThread::stop_neg(), "P1b"),
            (RegularThread::stop(), "P1c"),
            (RegularThread::dead(), "P2"),
        ] {
            ensure(equal(&project(&leaf, n + 1).thread, &leaf), name, case)?;
        }
        let a = rng.pick(&actions()).clone();
        let lhs = project(&RegularThread::post(a.clone(), &x, &y), n + 1).thread;
        let rhs = RegularThread::post(a, &project(&x, n).thread, &project(&y, n).thread);
        ensure(equal(&lhs, &rhs), "P3", case)?;
        let lhs = project(&RegularThread::tau(&x), n + 1).thread;
        let rhs = RegularThread::tau(&project(&x, n).thread);
        ensure(equal(&lhs, &rhs), "P3 (τ)", case)?;
    }
    Ok(())
}

/// SFC1-SFC4: service family composition.
pub fn check_sfc(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let u = family(&mut rng);
        let v = family(&mut rng);
        let w = family(&mut rng);
        ensure(u.compose(&ServiceFamily::empty()) == u, "SFC1", case)?;
        ensure(u.compose(&v) == v.compose(&u), "SFC2", case)?;
        ensure(
            u.compose(&v).compose(&w) == u.compose(&v.compose(&w)),
            "SFC3",
            case,
        )?;
        let s1 = Service::boolean_register(rng.bool());
        let s2 = if rng.bool() {
            Service::boolean_register(rng.bool())
        } else {
            Service::Empty
        };
        let lhs = ServiceFamily::singleton(ident("f"), s1)
            .compose(&ServiceFamily::singleton(ident("f"), s2));
        ensure(
            lhs == ServiceFamily::singleton(ident("f"), Service::Empty),
            "SFC4",
            case,
        )?;
    }
    Ok(())
}

fn random_focus_set(rng: &mut Rng) -> BTreeSet<crate::isa::Ident> {
    ["f", "g", "h", "z"]
        .iter()
        .filter(|_| rng.bool())
        .map(|f| ident(f))
        .collect()
}

/// SFE1-SFE4: encapsulation.
pub fn check_sfe(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let u = family(&mut rng);
        let v = family(&mut rng);
        let hidden = random_focus_set(&mut rng);
        ensure(
            ServiceFamily::empty().encapsulate(&hidden) == ServiceFamily::empty(),
            "SFE1",
            case,
        )?;
        let focus = ident(*rng.pick(&["f", "g", "z"]));
        let single = ServiceFamily::singleton(focus.clone(), Service::boolean_register(true));
        let expected = if hidden.contains(&focus) {
            ServiceFamily::empty()
        } else {
            single.clone()
        };
        ensure(single.encapsulate(&hidden) == expected, "SFE2/SFE3", case)?;
        ensure(
            u.compose(&v).encapsulate(&hidden)
                == u.encapsulate(&hidden).compose(&v.encapsulate(&hidden)),
            "SFE4",
            case,
        )?;
    }
    Ok(())
}

/// The two foci properties: disjointness characterization, and
/// `f ∉ foci(u)` iff hiding `f` changes nothing.
pub fn check_foci_properties(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let universe = ["f", "g", "h", "z"];
    for case in 0..cases {
        let u = family(&mut rng);
        let v = family(&mut rng);
        let disjoint = u.foci().is_disjoint(&v.foci());
        let pointwise = universe
            .iter()
            .all(|f| !u.foci().contains(&ident(f)) || !v.foci().contains(&ident(f)));
        ensure(disjoint == pointwise, "foci property 1", case)?;

        let f = ident(*rng.pick(&universe));
        let hidden = BTreeSet::from([f.clone()]);
        ensure(
            (!u.foci().contains(&f)) == (u.encapsulate(&hidden) == u),
            "foci property 2",
            case,
        )?;
    }
    Ok(())
}

/// Picks a focus of `u` and a method, classifying the service reply.
fn pick_processing(
    rng: &mut Rng,
    u: &ServiceFamily,
) -> Option<(BasicInstruction, ServiceReply, ServiceFamily)> {
    let foci: Vec<_> = u.foci().into_iter().collect();
    if foci.is_empty() {
        return None;
    }
    let focus = foci[rng.below(foci.len())].clone();
    let method = ident(*rng.pick(&[
        "get", "set_t", "set_f", "m0", "m1", "m2", "nosuch",
    ]));
    let svc = u.get(&focus).expect("picked from foci");
    let (reply, next) = svc.process(&method);
    let updated = u.with_entry(focus.clone(), next);
    Some((BasicInstruction::new(focus, method), reply, updated))
}

/// U1-U10: the use operator.
pub fn check_use_axioms(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let mut hits = [0usize; 3];
    let mut case = 0;
    let mut attempts = 0;
    while hits.iter().any(|h| *h < cases) && attempts < cases * 200 {
        attempts += 1;
        case += 1;
        let u = family(&mut rng);
        let x = thread(&mut rng);
        let y = thread(&mut rng);

        for (leaf, name) in [
            (RegularThread::stop_pos(), "U1"),
            (RegularThread::stop_neg(), "U2"),
            (RegularThread::stop(), "U3"),
            (RegularThread::dead(), "U4"),
        ] {
            ensure(
                equal(&use_thread(&leaf, &u, PRODUCT).map_err(|e| e.to_string())?, &leaf),
                name,
                case,
            )?;
        }

        // U5: τ prefixes pass through.
        let lhs = use_thread(&RegularThread::tau(&x), &u, PRODUCT).map_err(|e| e.to_string())?;
        let rhs = RegularThread::tau(&use_thread(&x, &u, PRODUCT).map_err(|e| e.to_string())?);
        ensure(equal(&lhs, &rhs), "U5", case)?;

        // U6: an action whose focus is absent stays pending.
        let outside = BasicInstruction::new(ident("z"), ident("m"));
        let t = RegularThread::post(outside.clone(), &x, &y);
        let lhs = use_thread(&t, &u, PRODUCT).map_err(|e| e.to_string())?;
        let rhs = RegularThread::post(
            outside,
            &use_thread(&x, &u, PRODUCT).map_err(|e| e.to_string())?,
            &use_thread(&y, &u, PRODUCT).map_err(|e| e.to_string())?,
        );
        ensure(equal(&lhs, &rhs), "U6", case)?;

        // U7/U8/U9 depending on the service reply.
        if let Some((action, reply, updated)) = pick_processing(&mut rng, &u) {
            let t = RegularThread::post(action, &x, &y);
            let lhs = use_thread(&t, &u, PRODUCT).map_err(|e| e.to_string())?;
            match reply {
                ServiceReply::True => {
                    hits[0] += 1;
                    let rhs = RegularThread::tau(
                        &use_thread(&x, &updated, PRODUCT).map_err(|e| e.to_string())?,
                    );
                    ensure(equal(&lhs, &rhs), "U7", case)?;
                }
                ServiceReply::False => {
                    hits[1] += 1;
                    let rhs = RegularThread::tau(
                        &use_thread(&y, &updated, PRODUCT).map_err(|e| e.to_string())?,
                    );
                    ensure(equal(&lhs, &rhs), "U8", case)?;
                }
                ServiceReply::Blocked => {
                    hits[2] += 1;
                    ensure(equal(&lhs, &RegularThread::dead()), "U9", case)?;
                }
            }
        }

        // U10: projections commute with use.
        let n = rng.below(6);
        let lhs = project(&use_thread(&x, &u, PRODUCT).map_err(|e| e.to_string())?, n).thread;
        let rhs = use_thread(&project(&x, n).thread, &u, PRODUCT).map_err(|e| e.to_string())?;
        ensure(equal(&lhs, &rhs), "U10", case)?;
    }
    if hits.iter().any(|h| *h < cases) {
        return Err(format!("use axioms: reply cases not exercised enough: {hits:?}"));
    }
    Ok(())
}

/// A1-A9: the apply operator, evaluated through runs.
pub fn check_apply_axioms(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let budget = exact();
    let mut hits = [0usize; 3];
    let mut case = 0;
    let mut attempts = 0;
    let apply = |t: &RegularThread, u: &ServiceFamily| -> Option<ServiceFamily> {
        run(t, u, &budget).apply_view()
    };
    while hits.iter().any(|h| *h < cases) && attempts < cases * 200 {
        attempts += 1;
        case += 1;
        let u = family(&mut rng);
        let x = thread(&mut rng);
        let y = thread(&mut rng);

        ensure(apply(&RegularThread::stop_pos(), &u) == Some(u.clone()), "A1", case)?;
        ensure(apply(&RegularThread::stop_neg(), &u) == Some(u.clone()), "A2", case)?;
        ensure(apply(&RegularThread::stop(), &u) == Some(u.clone()), "A3", case)?;
        ensure(
            apply(&RegularThread::dead(), &u) == Some(ServiceFamily::empty()),
            "A4",
            case,
        )?;

        let lhs = apply(&RegularThread::tau(&x), &u);
        let rhs = apply(&x, &u);
        if lhs.is_some() && rhs.is_some() {
            ensure(lhs == rhs, "A5", case)?;
        }

        let outside = BasicInstruction::new(ident("z"), ident("m"));
        ensure(
            apply(&RegularThread::post(outside, &x, &y), &u) == Some(ServiceFamily::empty()),
            "A6",
            case,
        )?;

        if let Some((action, reply, updated)) = pick_processing(&mut rng, &u) {
            let t = RegularThread::post(action, &x, &y);
            let lhs = apply(&t, &u);
            match reply {
                ServiceReply::True => {
                    hits[0] += 1;
                    let rhs = apply(&x, &updated);
                    if lhs.is_some() && rhs.is_some() {
                        ensure(lhs == rhs, "A7", case)?;
                    }
                }
                ServiceReply::False => {
                    hits[1] += 1;
                    let rhs = apply(&y, &updated);
                    if lhs.is_some() && rhs.is_some() {
                        ensure(lhs == rhs, "A8", case)?;
                    }
                }
                ServiceReply::Blocked => {
                    hits[2] += 1;
                    ensure(lhs == Some(ServiceFamily::empty()), "A9", case)?;
                }
            }
        }
    }
    if hits.iter().any(|h| *h < cases) {
        return Err(format!("apply axioms: reply cases not exercised enough: {hits:?}"));
    }
    Ok(())
}

/// R1-R9: the reply operator, evaluated through runs.
pub fn check_reply_axioms(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let budget = exact();
    let mut hits = [0usize; 3];
    let mut case = 0;
    let mut attempts = 0;
    let reply_of = |t: &RegularThread, u: &ServiceFamily| -> Option<Reply> {
        run(t, u, &budget).reply()
    };
    while hits.iter().any(|h| *h < cases) && attempts < cases * 200 {
        attempts += 1;
        case += 1;
        let u = family(&mut rng);
        let x = thread(&mut rng);
        let y = thread(&mut rng);

        ensure(reply_of(&RegularThread::stop_pos(), &u) == Some(Reply::T), "R1", case)?;
        ensure(reply_of(&RegularThread::stop_neg(), &u) == Some(Reply::F), "R2", case)?;
        ensure(reply_of(&RegularThread::stop(), &u) == Some(Reply::M), "R3", case)?;
        ensure(reply_of(&RegularThread::dead(), &u) == Some(Reply::D), "R4", case)?;

        let lhs = reply_of(&RegularThread::tau(&x), &u);
        let rhs = reply_of(&x, &u);
        if lhs.is_some() && rhs.is_some() {
            ensure(lhs == rhs, "R5", case)?;
        }

        let outside = BasicInstruction::new(ident("z"), ident("m"));
        ensure(
            reply_of(&RegularThread::post(outside, &x, &y), &u) == Some(Reply::D),
            "R6",
            case,
        )?;

        if let Some((action, reply, updated)) = pick_processing(&mut rng, &u) {
            let t = RegularThread::post(action, &x, &y);
            let lhs = reply_of(&t, &u);
            match reply {
                ServiceReply::True => {
                    hits[0] += 1;
                    let rhs = reply_of(&x, &updated);
                    if lhs.is_some() && rhs.is_some() {
                        ensure(lhs == rhs, "R7", case)?;
                    }
                }
                ServiceReply::False => {
                    hits[1] += 1;
                    let rhs = reply_of(&y, &updated);
                    if lhs.is_some() && rhs.is_some() {
                        ensure(lhs == rhs, "R8", case)?;
                    }
                }
                ServiceReply::Blocked => {
                    hits[2] += 1;
                    ensure(lhs == Some(Reply::D), "R9", case)?;
                }
            }
        }
    }
    if hits.iter().any(|h| *h < cases) {
        return Err(format!("reply axioms: reply cases not exercised enough: {hits:?}"));
    }
    Ok(())
}

/// AU1-AU9 plus the τ-contraction correspondence on τ-free threads.
pub fn check_abstracting_use_axioms(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let mut hits = [0usize; 3];
    let mut case = 0;
    let mut attempts = 0;
    while hits.iter().any(|h| *h < cases) && attempts < cases * 200 {
        attempts += 1;
        case += 1;
        let u = family(&mut rng);
        let x = thread(&mut rng);
        let y = thread(&mut rng);

        for (leaf, name) in [
            (RegularThread::stop_pos(), "AU1"),
            (RegularThread::stop_neg(), "AU2"),
            (RegularThread::stop(), "AU3"),
            (RegularThread::dead(), "AU4"),
        ] {
            ensure(
                equal(
                    &abstracting_use(&leaf, &u, PRODUCT).map_err(|e| e.to_string())?,
                    &leaf,
                ),
                name,
                case,
            )?;
        }

        // AU5: pre-existing τ nodes are retained.
        let lhs =
            abstracting_use(&RegularThread::tau(&x), &u, PRODUCT).map_err(|e| e.to_string())?;
        let rhs =
            RegularThread::tau(&abstracting_use(&x, &u, PRODUCT).map_err(|e| e.to_string())?);
        ensure(equal(&lhs, &rhs), "AU5", case)?;

        // AU6.
        let outside = BasicInstruction::new(ident("z"), ident("m"));
        let t = RegularThread::post(outside.clone(), &x, &y);
        let lhs = abstracting_use(&t, &u, PRODUCT).map_err(|e| e.to_string())?;
        let rhs = RegularThread::post(
            outside,
            &abstracting_use(&x, &u, PRODUCT).map_err(|e| e.to_string())?,
            &abstracting_use(&y, &u, PRODUCT).map_err(|e| e.to_string())?,
        );
        ensure(equal(&lhs, &rhs), "AU6", case)?;

        // AU7/AU8/AU9: no τ is introduced.
        if let Some((action, reply, updated)) = pick_processing(&mut rng, &u) {
            let t = RegularThread::post(action, &x, &y);
            let lhs = abstracting_use(&t, &u, PRODUCT).map_err(|e| e.to_string())?;
            match reply {
                ServiceReply::True => {
                    hits[0] += 1;
                    let rhs = abstracting_use(&x, &updated, PRODUCT).map_err(|e| e.to_string())?;
                    ensure(equal(&lhs, &rhs), "AU7", case)?;
                }
                ServiceReply::False => {
                    hits[1] += 1;
                    let rhs = abstracting_use(&y, &updated, PRODUCT).map_err(|e| e.to_string())?;
                    ensure(equal(&lhs, &rhs), "AU8", case)?;
                }
                ServiceReply::Blocked => {
                    hits[2] += 1;
                    ensure(equal(&lhs, &RegularThread::dead()), "AU9", case)?;
                }
            }
        }

        // On τ-free threads, abstracting use is use with all τ contracted.
        let plain = gen::random_thread_tau_free(&mut rng, &actions(), 7);
        let lhs = abstracting_use(&plain, &u, PRODUCT).map_err(|e| e.to_string())?;
        let rhs = contract_taus(&use_thread(&plain, &u, PRODUCT).map_err(|e| e.to_string())?);
        ensure(equal(&lhs, &rhs), "AU vs contracted U", case)?;
    }
    if hits.iter().any(|h| *h < cases) {
        return Err(format!(
            "abstracting use axioms: reply cases not exercised enough: {hits:?}"
        ));
    }
    Ok(())
}

/// The three interaction equations for disjoint families.
pub fn check_prop_use_compose(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let t = thread(&mut rng);
        let u = family(&mut rng);
        let v = family(&mut rng).encapsulate(&u.foci());
        match check_ispo(&t, &u, &v, &exact(), PRODUCT).map_err(|e| e.to_string())? {
            IspoOutcome::Pass => {}
            IspoOutcome::Inconclusive { .. } => {}
            IspoOutcome::Fail { equation, detail } => {
                return Err(format!(
                    "use/apply/reply composition equation {equation} failed on case {case}: {detail}"
                ))
            }
        }
    }
    Ok(())
}

/// Termination-constant analysis: a convergent program whose only
/// terminators are `!t` (resp. `!f`, `!`) replies T (resp. F, M).
pub fn check_prop_terminator_constants(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let variants: [(Instruction, Reply); 3] = [
        (Instruction::HaltPos, Reply::T),
        (Instruction::HaltNeg, Reply::F),
        (Instruction::Halt, Reply::M),
    ];
    for case in 0..cases {
        let (terminator, expected) = &variants[rng.below(3)];
        let cfg = ProgramCfg {
            dialect: Dialect::Pglbbt,
            terminators: vec![terminator.clone()],
            ..ProgramCfg::default()
        };
        let p = gen::random_program(&mut rng, &cfg);
        let u = family(&mut rng);
        let out = run(&extract(&p), &u, &exact());
        if let Verdict::Converged(reply) = out.verdict {
            if reply != *expected {
                return Err(format!(
                    "terminator-constant property failed on case {case}: `{}` replied {reply}",
                    p.print()
                ));
            }
        }
    }
    Ok(())
}

/// Convergence and the reply value are two views of one verdict.
pub fn check_prop_convergence_reply(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let p = gen::random_program(&mut rng, &ProgramCfg::default());
        let u = family(&mut rng);
        let out = run(&extract(&p), &u, &exact());
        let consistent = match out.verdict {
            Verdict::Converged(r) => {
                matches!(r, Reply::T | Reply::F | Reply::M) && out.reply() == Some(r)
            }
            Verdict::Diverged(_) => out.reply() == Some(Reply::D),
            Verdict::BudgetExhausted => out.reply().is_none(),
        };
        ensure(consistent, "convergence/reply consistency", case)?;
    }
    Ok(())
}

/// The duplication prefix law: `(f.dup ; x) ! f.H(⌣w) = x ! f.H(⌣v:w)`
/// for `w = v` or `w = v:w'` with `v` the bit prefix.
pub fn check_prop_dup_prefix(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let unit = dup_unit();
    let cfg = ProgramCfg::strict_unit_programs(&[ident("dup")]);
    let budget = Budget::Fuel(2_000);
    let mut conclusive = 0;
    for case in 0..cases {
        let x = gen::random_program(&mut rng, &cfg);
        let v = gen::random_bits(&mut rng, 5);
        let w = if rng.bool() {
            v.clone()
        } else {
            let mut w = v.clone();
            w.push(TapeSym::Colon);
            w.extend(gen::random_tape_word(&mut rng, 5));
            w
        };
        let prefixed = crate::tape::dup_prefixed(&x);
        let lhs = crate::tape::run_on_unit(&prefixed, &unit, &TapeState::from_right(w.clone()), &budget)
            .map_err(|e| e.to_string())?;
        let mut vw = v.clone();
        vw.push(TapeSym::Colon);
        vw.extend(w.iter().copied());
        let rhs = crate::tape::run_on_unit(&x, &unit, &TapeState::from_right(vw), &budget)
            .map_err(|e| e.to_string())?;
        match (lhs.reply(), rhs.reply()) {
            (Some(a), Some(b)) => {
                conclusive += 1;
                ensure(a == b, "dup prefix law", case)?;
            }
            _ => {}
        }
    }
    if conclusive < cases / 2 {
        return Err(format!(
            "dup prefix law: too few conclusive cases ({conclusive}/{cases})"
        ));
    }
    Ok(())
}

/// The swap and false-to-divergence reply laws.
pub fn check_prop_swap_ftod(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let budget = exact();
    let mut conclusive = 0;
    for case in 0..cases {
        let over_dup = rng.bool();
        let (p, u) = if over_dup {
            let cfg = ProgramCfg::strict_unit_programs(&[ident("dup")]);
            let p = gen::random_program(&mut rng, &cfg);
            let state = gen::random_tape_state(&mut rng, 4);
            let svc = crate::funits::unit_service(&dup_unit(), &UnitState::Tape(state))
                .map_err(|e| e.to_string())?;
            (p, ServiceFamily::singleton_f(svc))
        } else {
            let cfg = ProgramCfg {
                dialect: Dialect::Pglbsbt,
                terminators: vec![Instruction::HaltPos, Instruction::HaltNeg],
                ..ProgramCfg::default()
            };
            (gen::random_program(&mut rng, &cfg), family(&mut rng))
        };
        let budget = if over_dup { Budget::Fuel(2_000) } else { budget };
        let base = run(&extract(&p), &u, &budget).reply();
        let swapped = run(&extract(&p.swap()), &u, &budget).reply();
        let dived = run(&extract(&p.ftod()), &u, &budget).reply();
        match base {
            Some(Reply::T) => {
                conclusive += 1;
                ensure(swapped == Some(Reply::F), "swap law (T case)", case)?;
                ensure(dived == Some(Reply::T), "ftod law (T case)", case)?;
            }
            Some(Reply::F) => {
                conclusive += 1;
                ensure(swapped == Some(Reply::T), "swap law (F case)", case)?;
                ensure(dived == Some(Reply::D), "ftod law (F case)", case)?;
            }
            _ => {}
        }
    }
    if conclusive < cases / 4 {
        return Err(format!(
            "swap/ftod laws: too few conclusive cases ({conclusive}/{cases})"
        ));
    }
    Ok(())
}

/// Exact mode agrees with plain fuel whenever the fuel does not run out.
pub fn check_exact_fuel_agreement(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let p = gen::random_program(&mut rng, &ProgramCfg::default());
        let u = family(&mut rng);
        let t = extract(&p);
        let fueled = run(&t, &u, &Budget::Fuel(rng.below(60) as u64));
        if matches!(fueled.verdict, Verdict::BudgetExhausted) {
            continue;
        }
        let exactly = run(&t, &u, &exact());
        ensure(
            fueled.reply() == exactly.reply(),
            "exact/fuel reply agreement",
            case,
        )?;
        ensure(
            fueled.final_family == exactly.final_family,
            "exact/fuel final family agreement",
            case,
        )?;
    }
    Ok(())
}

fn random_total_normal_form(
    rng: &mut Rng,
    methods: &[crate::isa::Ident],
    unit: &FunctionalUnit,
    max_body: usize,
) -> Option<(InstrSeq, Vec<(bool, u8)>)> {
    let budget = exact();
    'outer: for _ in 0..200 {
        let body = gen::random_normal_form(rng, methods, max_body);
        let thread = extract(&body);
        let mut table = Vec::new();
        for s in unit.all_states().expect("finite unit") {
            match crate::funits::derived_op_thread_at(&thread, unit, &s, &budget) {
                Ok(crate::funits::DerivedOutcome::Defined { reply, state }) => {
                    table.push((reply, state.as_fin().expect("finite state")));
                }
                _ => continue 'outer,
            }
        }
        return Some((body, table));
    }
    None
}

fn derived_table(
    x: &InstrSeq,
    unit: &FunctionalUnit,
) -> Result<Vec<Option<(bool, u8)>>, String> {
    let budget = exact();
    let thread = extract(x);
    let mut table = Vec::new();
    for s in unit.all_states().expect("finite unit") {
        let cell = match crate::funits::derived_op_thread_at(&thread, unit, &s, &budget)
            .map_err(|e| e.to_string())?
        {
            crate::funits::DerivedOutcome::Defined { reply, state } => {
                Some((reply, state.as_fin().expect("finite state")))
            }
            crate::funits::DerivedOutcome::Undefined => None,
            crate::funits::DerivedOutcome::Unknown => return Err("budget exhausted".into()),
        };
        table.push(cell);
    }
    Ok(table)
}

/// Normalization preserves the derived (partial) method operation on every
/// state of an exhaustively checked finite unit, and is idempotent up to
/// behavioural equality.
pub fn check_normalize_preserves(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let unit = gen::random_finite_unit(&mut rng, 4, 3);
        let methods: Vec<_> = unit.interface().iter().cloned().collect();
        let cfg = ProgramCfg::strict_unit_programs(&methods);
        let x = gen::random_program(&mut rng, &cfg);
        let normalized = crate::funits::normalize(&x).map_err(|e| e.to_string())?;
        if !crate::funits::is_normal_form(&normalized) {
            return Err(format!("normalize output not in normal form on case {case}"));
        }
        if derived_table(&x, &unit)? != derived_table(&normalized, &unit)? {
            return Err(format!(
                "normalize changed the derived operation on case {case}: `{}`",
                x.print()
            ));
        }
        let twice = crate::funits::normalize(&normalized).map_err(|e| e.to_string())?;
        ensure(
            equal(&extract(&normalized), &extract(&twice)),
            "normalize idempotence up to thread equality",
            case,
        )?;
    }
    Ok(())
}

/// The inlining construction preserves derived method operations: a
/// program over an extended interface equals its inlined form over the
/// base unit, exhaustively over all states (divergence included).
pub fn check_inline_preserves(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let mut case = 0;
    let mut attempts = 0;
    while case < cases && attempts < cases * 50 {
        attempts += 1;
        let base = gen::random_finite_unit(&mut rng, 4, 3);
        let base_methods: Vec<_> = base.interface().iter().cloned().collect();
        let size = match base.state_space() {
            StateSpace::Fin(k) => k,
            _ => unreachable!(),
        };

        // Bodies with total derived operations become the extra methods of
        // an extended unit; the oracle compares against it.
        let extra_names: Vec<_> = (0..rng.range(1, 2))
            .map(|i| ident(&format!("n{i}")))
            .collect();
        let mut bodies = alloc::collections::BTreeMap::new();
        let mut extended = crate::funits::FiniteUnit::new(size);
        if let crate::funits::UnitKind::Finite(u) = base.kind() {
            for (m, op) in u.ops() {
                extended.insert(m.clone(), op.clone());
            }
        }
        let mut ok = true;
        for name in &extra_names {
            match random_total_normal_form(&mut rng, &base_methods, &base, 4) {
                Some((body, table)) => {
                    bodies.insert(name.clone(), body);
                    extended.insert(name.clone(), crate::funits::FiniteOp::new(table));
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let extended = FunctionalUnit::new(crate::funits::UnitKind::Finite(extended));

        let mut all_methods = base_methods.clone();
        all_methods.extend(extra_names.iter().cloned());
        let x = gen::random_normal_form(&mut rng, &all_methods, 5);
        let inlined = crate::funits::inline_methods(&x, &bodies).map_err(|e| e.to_string())?;
        for u in inlined.instructions() {
            if let Some(a) = u.basic() {
                if bodies.contains_key(&a.method) {
                    return Err(format!("occurrence survived inlining on case {case}"));
                }
            }
        }
        if derived_table(&x, &extended)? != derived_table(&inlined, &base)? {
            return Err(format!(
                "inlining changed the derived operation on case {case}: `{}` vs `{}`",
                x.print(),
                inlined.print()
            ));
        }
        case += 1;
    }
    if case < cases {
        return Err(format!("inline preservation: only {case}/{cases} instances built"));
    }
    Ok(())
}

/// Witness transitivity: witnesses for `L below H` and `H below K` compose
/// through inlining into witnesses for `L below K`.
pub fn check_witness_transitivity(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let budget = exact();
    let mut case = 0;
    let mut attempts = 0;
    while case < cases && attempts < cases * 50 {
        attempts += 1;
        let k_unit = gen::random_finite_unit(&mut rng, 3, 3);
        let k_methods: Vec<_> = k_unit.interface().iter().cloned().collect();
        let size = match k_unit.state_space() {
            StateSpace::Fin(n) => n,
            _ => unreachable!(),
        };

        // Middle unit H: operations derived from K by witness programs.
        let mut h_unit = crate::funits::FiniteUnit::new(size);
        let mut witnesses_hk = alloc::collections::BTreeMap::new();
        let mut ok = true;
        for i in 0..rng.range(1, 2) {
            match random_total_normal_form(&mut rng, &k_methods, &k_unit, 3) {
                Some((w, table)) => {
                    let name = ident(&format!("h{i}"));
                    h_unit.insert(name.clone(), crate::funits::FiniteOp::new(table));
                    witnesses_hk.insert(name, w);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let h_unit = FunctionalUnit::new(crate::funits::UnitKind::Finite(h_unit));
        let h_methods: Vec<_> = h_unit.interface().iter().cloned().collect();

        // Bottom unit L: operations derived from H.
        let mut l_unit = crate::funits::FiniteUnit::new(size);
        let mut witnesses_lh = alloc::collections::BTreeMap::new();
        for i in 0..rng.range(1, 2) {
            match random_total_normal_form(&mut rng, &h_methods, &h_unit, 3) {
                Some((w, table)) => {
                    let name = ident(&format!("l{i}"));
                    l_unit.insert(name.clone(), crate::funits::FiniteOp::new(table));
                    witnesses_lh.insert(name, w);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let l_unit = FunctionalUnit::new(crate::funits::UnitKind::Finite(l_unit));

        let composed: alloc::collections::BTreeMap<_, _> = witnesses_lh
            .iter()
            .map(|(m, w)| {
                crate::funits::compose_witnesses(w, &witnesses_hk)
                    .map(|c| (m.clone(), c))
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, String>>()?;
        let states = k_unit.all_states().expect("finite");
        let report =
            crate::funits::check_below_witness(&l_unit, &k_unit, &composed, &states, &budget)
                .map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!(
                "composed witnesses failed on case {case}: {:?}",
                report.verdict
            ));
        }
        case += 1;
    }
    if case < cases {
        return Err(format!("witness transitivity: only {case}/{cases} instances built"));
    }
    Ok(())
}

/// Restriction is below the full unit via identity witnesses, and the
/// identity witness reproduces each interface operation exactly.
pub fn check_restriction_below(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let budget = exact();
    for case in 0..cases {
        let unit = gen::random_finite_unit(&mut rng, 4, 3);
        let methods: Vec<_> = unit.interface().iter().cloned().collect();
        let keep: BTreeSet<_> = methods
            .iter()
            .filter(|_| rng.bool())
            .cloned()
            .collect();
        let restricted = unit.restrict(&keep).map_err(|e| e.to_string())?;
        let witnesses: alloc::collections::BTreeMap<_, _> = keep
            .iter()
            .map(|m| (m.clone(), crate::funits::identity_witness(m)))
            .collect();
        let states = unit.all_states().expect("finite");
        let report =
            crate::funits::check_below_witness(&restricted, &unit, &witnesses, &states, &budget)
                .map_err(|e| e.to_string())?;
        ensure(report.passed(), "restriction below full unit", case)?;
    }
    Ok(())
}

/// The derived-operation set is a closure: enumerating over a unit made of
/// all derived operations gives the same set back.
pub fn check_enumeration_closure(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    for case in 0..cases {
        let mask = (rng.next_u64() & 0xffff) as u16;
        let unit = crate::funits::bool_unit_from_mask(mask);
        let closure = crate::funits::enumerate_derived_ops(&unit).map_err(|e| e.to_string())?;
        let closure_mask = closure
            .iter()
            .fold(0u16, |m, t| m | (1 << crate::funits::bool_op_index(t)));
        let closed_unit = crate::funits::bool_unit_from_mask(closure_mask);
        let twice = crate::funits::enumerate_derived_ops(&closed_unit).map_err(|e| e.to_string())?;
        ensure(closure == twice, "derived-operation closure", case)?;
    }
    Ok(())
}

/// Exhaustive-by-length program enumeration over a finite-space unit: the
/// independent cross-check for the strategy-closure enumeration. Offsets
/// beyond the semantically distinct range are folded into `#0`, which
/// leaves the computed operation set unchanged.
pub fn bounded_program_ops(
    h: &FunctionalUnit,
    max_len: usize,
) -> Result<BTreeSet<Vec<(bool, u8)>>, String> {
    let size = match h.state_space() {
        StateSpace::Fin(k) => k,
        _ => return Err("bounded enumeration needs a finite space".into()),
    };
    assert!(max_len <= 8, "position bitmask supports up to 8 positions");
    let tables: Vec<Vec<(bool, u8)>> = h
        .interface()
        .iter()
        .map(|m| {
            (0..size)
                .map(|s| {
                    let (r, e) = h.apply(m, &UnitState::Fin(s)).expect("interface method");
                    (r, e.as_fin().expect("finite effect"))
                })
                .collect()
        })
        .collect();

    // Compact instruction codes; decoded inside the evaluator.
    #[derive(Clone, Copy)]
    enum Code {
        TermT,
        TermF,
        Fwd(u8),
        Bwd(u8),
        Meth { table: u8, kind: u8 },
    }

    let code_space = |pos: usize, len: usize| -> Vec<Code> {
        let mut codes = vec![Code::TermT, Code::TermF];
        for l in 0..=(len - pos) {
            codes.push(Code::Fwd(l as u8));
        }
        for l in 1..pos {
            codes.push(Code::Bwd(l as u8));
        }
        for t in 0..tables.len() {
            for kind in 0..3 {
                codes.push(Code::Meth {
                    table: t as u8,
                    kind,
                });
            }
        }
        codes
    };

    let eval = |program: &[Code]| -> Option<Vec<(bool, u8)>> {
        let len = program.len();
        let mut op = Vec::with_capacity(size as usize);
        for s0 in 0..size {
            let mut pos: usize = 1;
            let mut state = s0;
            let mut visited: u64 = 0;
            let outcome = loop {
                if pos < 1 || pos > len {
                    break None;
                }
                let bit = 1u64 << ((pos - 1) * size as usize + state as usize);
                if visited & bit != 0 {
                    break None;
                }
                visited |= bit;
                match program[pos - 1] {
                    Code::TermT => break Some((true, state)),
                    Code::TermF => break Some((false, state)),
                    Code::Fwd(l) => {
                        if l == 0 {
                            break None;
                        }
                        pos += l as usize;
                    }
                    Code::Bwd(l) => {
                        if l == 0 || l as usize >= pos {
                            break None;
                        }
                        pos -= l as usize;
                    }
                    Code::Meth { table, kind } => {
                        let (reply, next) = tables[table as usize][state as usize];
                        state = next;
                        pos += match kind {
                            0 => 1,
                            1 => {
                                if reply {
                                    1
                                } else {
                                    2
                                }
                            }
                            _ => {
                                if reply {
                                    2
                                } else {
                                    1
                                }
                            }
                        };
                    }
                }
            };
            op.push(outcome?);
        }
        Some(op)
    };

    // Dedupe through a fixed-size table indexed by the packed op encoding.
    let cells = (2 * size as usize).pow(size as u32);
    let mut seen = vec![false; cells];
    let pack = |op: &[(bool, u8)]| -> usize {
        op.iter().fold(0usize, |acc, &(r, e)| {
            acc * (2 * size as usize) + (r as usize) + 2 * e as usize
        })
    };

    fn walk(
        program: &mut Vec<Code>,
        len: usize,
        spaces: &[Vec<Code>],
        eval: &impl Fn(&[Code]) -> Option<Vec<(bool, u8)>>,
        seen: &mut [bool],
        pack: &impl Fn(&[(bool, u8)]) -> usize,
        out: &mut BTreeSet<Vec<(bool, u8)>>,
    ) {
        if program.len() == len {
            if let Some(op) = eval(program) {
                let idx = pack(&op);
                if !seen[idx] {
                    seen[idx] = true;
                    out.insert(op);
                }
            }
            return;
        }
        let pos = program.len();
        for code in &spaces[pos] {
            program.push(*code);
            walk(program, len, spaces, eval, seen, pack, out);
            program.pop();
        }
    }

    let mut out = BTreeSet::new();
    for len in 1..=max_len {
        let spaces: Vec<Vec<Code>> = (1..=len).map(|pos| code_space(pos, len)).collect();
        let mut program = Vec::with_capacity(len);
        walk(&mut program, len, &spaces, &eval, &mut seen, &pack, &mut out);
    }
    Ok(out)
}
