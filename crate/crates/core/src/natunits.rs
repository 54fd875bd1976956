//! Functional units over the naturals: the unbounded counter, the
//! `decr<n>` family, the register machine language RML with its direct
//! simulator, the 20-method universal unit and its RML translation, and
//! the 3-method universal unit.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::exec::Budget;
use crate::funits::{FunctionalUnit, UnitKind};
use crate::isa::{basic, ident, BasicInstruction, Dialect, Ident, InstrSeq, Instruction, Natural};

/// The unbounded counter: `setzero`, `incr`, `decr`, `iszero`.
pub fn counter_unit() -> FunctionalUnit {
    FunctionalUnit::new(UnitKind::Counter)
}

/// The `decr<n>`/`iszero` unit; `n` must be at least 1.
pub fn decrn_unit(n: u64) -> Result<FunctionalUnit, String> {
    if n == 0 {
        return Err("decrn needs n >= 1".to_string());
    }
    Ok(FunctionalUnit::new(UnitKind::DecrN(n)))
}

/// The 20-method universal unit.
pub fn univ_unit() -> FunctionalUnit {
    FunctionalUnit::new(UnitKind::Univ)
}

/// The 3-method universal unit.
pub fn univ3_unit() -> FunctionalUnit {
    FunctionalUnit::new(UnitKind::Univ3)
}

pub(crate) fn apply_counter(m: &Ident, x: &Natural) -> Option<(bool, Natural)> {
    match m.as_str() {
        "setzero" => Some((true, Natural::zero())),
        "incr" => Some((true, x + 1u32)),
        "decr" => {
            if x.is_zero() {
                Some((false, Natural::zero()))
            } else {
                Some((true, x - 1u32))
            }
        }
        "iszero" => Some((x.is_zero(), x.clone())),
        _ => None,
    }
}

pub(crate) fn apply_decrn(n: u64, m: &Ident, x: &Natural) -> Option<(bool, Natural)> {
    let step = Natural::from(n);
    if m.as_str() == format!("decr{n}") {
        if *x >= step {
            Some((true, x - step))
        } else {
            Some((false, Natural::zero()))
        }
    } else if m.as_str() == "iszero" {
        Some((x.is_zero(), x.clone()))
    } else {
        None
    }
}

/// The first six primes, indexing the six simulated registers.
pub const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

/// Guard against runaway exponent growth; far beyond any desk-scale run.
const MAX_EXP2_ARG: u64 = 4_000_000;

fn exp2(x: &Natural) -> Natural {
    let exp = x
        .to_u64()
        .filter(|e| *e <= MAX_EXP2_ARG)
        .expect("exp2 argument exceeds the supported range");
    Natural::one() << exp as usize
}

/// p-adic valuation, with the convention that the valuation of 0 is 0.
fn valuation(p: u32, x: &Natural) -> Natural {
    if x.is_zero() {
        return Natural::zero();
    }
    let p = Natural::from(p);
    let mut rest = x.clone();
    let mut count = Natural::zero();
    while (&rest % &p).is_zero() {
        rest /= &p;
        count += 1u32;
    }
    count
}

fn divides(p: u32, x: &Natural) -> bool {
    (x % Natural::from(p)).is_zero()
}

/// Method names of the universal unit in the fixed index order
/// `exp2, fact5`, then `succ_i, pred_i, iszero_i` for each register.
pub fn univ_method_names() -> Vec<Ident> {
    let mut names = vec![ident("exp2"), ident("fact5")];
    for i in 0..6 {
        names.push(ident(&format!("succ{i}")));
        names.push(ident(&format!("pred{i}")));
        names.push(ident(&format!("iszero{i}")));
    }
    names
}

pub(crate) fn apply_univ(m: &Ident, x: &Natural) -> Option<(bool, Natural)> {
    let name = m.as_str();
    if name == "exp2" {
        return Some((true, exp2(x)));
    }
    if name == "fact5" {
        return Some((true, valuation(5, x)));
    }
    for (i, &p) in PRIMES.iter().enumerate() {
        if name == format!("succ{i}") {
            return Some((true, x * Natural::from(p)));
        }
        if name == format!("pred{i}") {
            return if divides(p, x) {
                Some((true, x / Natural::from(p)))
            } else {
                Some((false, x.clone()))
            };
        }
        if name == format!("iszero{i}") {
            return Some((!divides(p, x), x.clone()));
        }
    }
    None
}

/// The universal unit's operation with the given index, applied directly.
pub fn univ_apply_index(index: usize, x: &Natural) -> (bool, Natural) {
    let names = univ_method_names();
    apply_univ(&names[index], x).expect("index within 0..20")
}

/// `x` as `2^a * 3^b`, if it has no other prime divisors (and is positive).
fn two_three_form(x: &Natural) -> Option<(Natural, Natural)> {
    if x.is_zero() {
        return None;
    }
    let mut rest = x.clone();
    let mut a = Natural::zero();
    let mut b = Natural::zero();
    let two = Natural::from(2u32);
    let three = Natural::from(3u32);
    while (&rest % &two).is_zero() {
        rest /= &two;
        a += 1u32;
    }
    while (&rest % &three).is_zero() {
        rest /= &three;
        b += 1u32;
    }
    if rest.is_one() {
        Some((a, b))
    } else {
        None
    }
}

pub(crate) fn apply_univ3(m: &Ident, x: &Natural) -> Option<(bool, Natural)> {
    match m.as_str() {
        "g1" => Some((true, exp2(x))),
        "g2" => {
            let nineteen = Natural::from(19u32);
            match two_three_form(x) {
                Some((_, b)) if b < nineteen => Some((true, x * Natural::from(3u32))),
                Some((_, b)) if b == nineteen => {
                    Some((true, x / Natural::from(3u32).pow(19)))
                }
                _ => Some((false, Natural::zero())),
            }
        }
        "g3" => {
            // Index the stored operation by the 3-adic valuation, argument
            // by the 2-adic one. Valuations of 20 and beyond wrap; they do
            // not arise in the retrieval pattern.
            let index = (valuation(3, x) % Natural::from(20u32))
                .to_usize()
                .expect("index below 20");
            let arg = valuation(2, x);
            Some(univ_apply_index(index, &arg))
        }
        _ => None,
    }
}

/// Registers available to RML programs.
pub const RML_REGISTERS: usize = 6;

/// A register machine program: strict instruction sequence over
/// `r0..r5 . succ|pred|iszero` with no termination instructions. A run
/// halts by transferring control to exactly one past the last instruction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RmlProgram {
    seq: InstrSeq,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RmlError {
    WrongDialect,
    /// Termination instructions would bypass the translated read-out.
    TerminatorForbidden,
    BadInstruction(String),
}

impl fmt::Display for RmlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmlError::WrongDialect => f.write_str("rml programs are pglbsbt"),
            RmlError::TerminatorForbidden => {
                f.write_str("rml forbids termination instructions; halt by exiting past the end")
            }
            RmlError::BadInstruction(s) => write!(f, "not an rml instruction: {s}"),
        }
    }
}

impl core::error::Error for RmlError {}

fn rml_register(focus: &Ident) -> Option<usize> {
    (0..RML_REGISTERS).find(|i| focus.as_str() == format!("r{i}"))
}

impl RmlProgram {
    pub fn new(seq: InstrSeq) -> Result<Self, RmlError> {
        if seq.dialect() != Dialect::Pglbsbt {
            return Err(RmlError::WrongDialect);
        }
        for u in seq.instructions() {
            if u.is_terminator() {
                return Err(RmlError::TerminatorForbidden);
            }
            if let Some(a) = u.basic() {
                let reg_ok = rml_register(&a.focus).is_some();
                let method_ok = matches!(a.method.as_str(), "succ" | "pred" | "iszero");
                if !reg_ok || !method_ok {
                    return Err(RmlError::BadInstruction(a.to_string()));
                }
            }
        }
        Ok(RmlProgram { seq })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let seq = InstrSeq::parse(text, Dialect::Pglbsbt).map_err(|e| e.to_string())?;
        RmlProgram::new(seq).map_err(|e| e.to_string())
    }

    pub fn seq(&self) -> &InstrSeq {
        &self.seq
    }
}

/// Outcome of a register machine run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RmlOutcome {
    /// Control reached exactly one past the end; the Boolean output is
    /// `r1 == 0`, the natural output is `r2`.
    Halted { flag: bool, out: Natural },
    /// Control transferred beyond one past the end.
    InvalidHalt { position: usize },
    Diverged,
    BudgetExhausted,
}

/// One executed basic instruction with the registers afterwards.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RmlTraceStep {
    pub action: BasicInstruction,
    pub regs: [Natural; 6],
}

pub fn run_rml(p: &RmlProgram, input: &Natural, budget: &Budget) -> RmlOutcome {
    run_rml_traced(p, input, budget, false).0
}

/// Direct register machine semantics; the oracle for the translated
/// simulation. Optionally records each executed basic instruction.
pub fn run_rml_traced(
    p: &RmlProgram,
    input: &Natural,
    budget: &Budget,
    want_trace: bool,
) -> (RmlOutcome, Vec<RmlTraceStep>) {
    let seq = &p.seq;
    let k = seq.len();
    let mut regs: [Natural; 6] = [
        input.clone(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
    ];
    let mut pos: usize = 1;
    let mut steps: u64 = 0;
    let mut trace = Vec::new();
    let exact = matches!(budget, Budget::Exact { .. });
    let cap = budget.cap();
    let mut visited: alloc::collections::BTreeSet<(usize, [Natural; 6])> =
        alloc::collections::BTreeSet::new();

    loop {
        if pos == k + 1 {
            return (
                RmlOutcome::Halted {
                    flag: regs[1].is_zero(),
                    out: regs[2].clone(),
                },
                trace,
            );
        }
        if pos > k + 1 {
            return (RmlOutcome::InvalidHalt { position: pos }, trace);
        }
        debug_assert!(pos >= 1);
        if exact && !visited.insert((pos, regs.clone())) {
            return (RmlOutcome::Diverged, trace);
        }
        if steps >= cap {
            return (RmlOutcome::BudgetExhausted, trace);
        }
        steps += 1;
        match seq.at(pos).expect("position in range") {
            Instruction::FwdJump(l) => match l.to_usize().filter(|l| *l > 0) {
                Some(l) => pos = pos.saturating_add(l),
                None => return (RmlOutcome::Diverged, trace),
            },
            Instruction::BwdJump(l) => match l.to_usize().filter(|l| *l > 0 && *l < pos) {
                Some(l) => pos -= l,
                None => return (RmlOutcome::Diverged, trace),
            },
            instr => {
                let a = instr.basic().expect("validated rml instruction");
                let reg = rml_register(&a.focus).expect("validated register");
                let reply = match a.method.as_str() {
                    "succ" => {
                        regs[reg] += 1u32;
                        true
                    }
                    "pred" => {
                        if regs[reg].is_zero() {
                            false
                        } else {
                            regs[reg] -= 1u32;
                            true
                        }
                    }
                    "iszero" => regs[reg].is_zero(),
                    _ => unreachable!("validated method"),
                };
                if want_trace {
                    trace.push(RmlTraceStep {
                        action: a.clone(),
                        regs: regs.clone(),
                    });
                }
                pos += match instr {
                    Instruction::Plain(_) => 1,
                    Instruction::PosTest(_) => {
                        if reply {
                            1
                        } else {
                            2
                        }
                    }
                    Instruction::NegTest(_) => {
                        if reply {
                            2
                        } else {
                            1
                        }
                    }
                    _ => unreachable!(),
                };
            }
        }
    }
}

/// Translates a register instruction to the universal unit's method.
pub fn rml_action_translation(a: &BasicInstruction) -> BasicInstruction {
    let reg = rml_register(&a.focus).expect("rml register");
    let method = match a.method.as_str() {
        "succ" => format!("succ{reg}"),
        "pred" => format!("pred{reg}"),
        "iszero" => format!("iszero{reg}"),
        _ => unreachable!("rml method"),
    };
    basic("f", &method)
}

/// The simulation of an RML program on the universal unit: encode the
/// input into the prime exponent for register 0, run the translated body,
/// then read out the Boolean from register 1 and the natural from
/// register 2.
pub fn rmlful(p: &RmlProgram) -> InstrSeq {
    let mut out: Vec<Instruction> = Vec::with_capacity(p.seq.len() + 7);
    out.push(Instruction::Plain(basic("f", "exp2")));
    for u in p.seq.instructions() {
        let translated = match u {
            Instruction::Plain(a) => Instruction::Plain(rml_action_translation(a)),
            Instruction::PosTest(a) => Instruction::PosTest(rml_action_translation(a)),
            Instruction::NegTest(a) => Instruction::NegTest(rml_action_translation(a)),
            jump => jump.clone(),
        };
        out.push(translated);
    }
    out.extend([
        Instruction::NegTest(basic("f", "iszero1")),
        Instruction::fwd(3),
        Instruction::Plain(basic("f", "fact5")),
        Instruction::HaltPos,
        Instruction::Plain(basic("f", "fact5")),
        Instruction::HaltNeg,
    ]);
    InstrSeq::new(Dialect::Pglbsbt, out).expect("translation is non-empty")
}

/// The prime encoding of a register file.
pub fn encode_regs(regs: &[Natural; 6]) -> Natural {
    let mut acc = Natural::one();
    for (i, c) in regs.iter().enumerate() {
        let exp = c.to_u32().expect("register fits in u32 at desk scale");
        acc *= Natural::from(PRIMES[i]).pow(exp);
    }
    acc
}

/// Witnesses showing the `decr<n>`/`iszero` unit derivable from the
/// counter restricted to `decr` and `iszero`: `n` chained decrements with
/// every failure routed to `!f`. Running all `n` decrements leaves
/// `max(x - n, 0)` behind either way, which is exactly the n-step
/// decrement's effect.
pub fn decrn_witnesses(n: u64) -> alloc::collections::BTreeMap<Ident, InstrSeq> {
    let n = n as usize;
    assert!(n >= 1);
    let mut instrs = Vec::with_capacity(2 * n + 2);
    for j in 1..=n {
        instrs.push(Instruction::NegTest(basic("f", "decr")));
        instrs.push(Instruction::fwd((2 * n + 2 - 2 * j) as u64));
    }
    instrs.push(Instruction::HaltPos);
    instrs.push(Instruction::HaltNeg);
    let chained = InstrSeq::new(Dialect::Pglbsbt, instrs).expect("witness is non-empty");
    alloc::collections::BTreeMap::from([
        (ident(&format!("decr{n}")), chained),
        (
            ident("iszero"),
            crate::funits::identity_witness(&ident("iszero")),
        ),
    ])
}

/// Runs the register machine and its translated simulation side by side
/// and checks, step for step, that the universal unit's state is the prime
/// encoding of the register file; outcomes must agree, divergence
/// included.
pub fn check_lockstep_simulation(
    p: &RmlProgram,
    input: &Natural,
    budget: &Budget,
) -> Result<(), String> {
    use crate::funits::{unit_service, UnitState};
    use crate::services::{Service, ServiceFamily};

    let (rml_out, rml_trace) = run_rml_traced(p, input, budget, true);
    let translated = rmlful(p);
    let unit = univ_unit();
    let family = ServiceFamily::singleton_f(
        unit_service(&unit, &UnitState::Nat(input.clone())).map_err(|e| e.to_string())?,
    );
    let exec_out = crate::exec::run_with_trace(&crate::threads::extract(&translated), &family, budget, true);
    let trace = exec_out.trace.as_ref().expect("trace requested");

    let state_of = |step: &crate::exec::TraceStep| -> Result<Natural, String> {
        match step.family.get(&ident("f")) {
            Some(Service::Unit(_, UnitState::Nat(n))) => Ok(n.clone()),
            other => Err(format!("unexpected service in trace: {other:?}")),
        }
    };

    // Prefix: the input is loaded as the exponent of the first prime.
    let first = trace.first().ok_or("empty simulation trace")?;
    if first.action.as_ref() != Some(&basic("f", "exp2")) {
        return Err("simulation does not start with the encoding step".into());
    }
    let initial_regs = [
        input.clone(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
        Natural::zero(),
    ];
    if state_of(first)? != encode_regs(&initial_regs) {
        return Err("initial encoding mismatch".into());
    }

    // Body: one translated action per executed register instruction, with
    // the unit state equal to the prime encoding throughout.
    for (j, rml_step) in rml_trace.iter().enumerate() {
        let step = trace
            .get(1 + j)
            .ok_or_else(|| format!("simulation trace ends early at step {j}"))?;
        let expected_action = rml_action_translation(&rml_step.action);
        if step.action.as_ref() != Some(&expected_action) {
            return Err(format!(
                "action mismatch at step {j}: {:?} vs {expected_action}",
                step.action
            ));
        }
        if state_of(step)? != encode_regs(&rml_step.regs) {
            return Err(format!("prime-encoding invariant broken at step {j}"));
        }
    }

    // Outcomes must agree.
    match (&rml_out, &exec_out.verdict) {
        (RmlOutcome::Halted { flag, out }, crate::exec::Verdict::Converged(reply)) => {
            let expected = if *flag {
                crate::exec::Reply::T
            } else {
                crate::exec::Reply::F
            };
            if *reply != expected {
                return Err(format!("reply mismatch: {reply} vs flag {flag}"));
            }
            let final_family = exec_out.final_family.as_ref().expect("converged");
            match final_family.get(&ident("f")) {
                Some(Service::Unit(_, UnitState::Nat(n))) if n == out => Ok(()),
                other => Err(format!("output mismatch: {other:?} vs {out}")),
            }
        }
        (RmlOutcome::Diverged, crate::exec::Verdict::Diverged(_))
        | (RmlOutcome::Diverged, crate::exec::Verdict::BudgetExhausted)
        | (RmlOutcome::BudgetExhausted, crate::exec::Verdict::BudgetExhausted)
        | (RmlOutcome::BudgetExhausted, crate::exec::Verdict::Diverged(_)) => Ok(()),
        (rml, exec) => Err(format!("outcome mismatch: {rml:?} vs {exec:?}")),
    }
}

/// Named RML corpus: the five required operations plus two divergent
/// programs for divergence agreement.
pub fn rml_corpus() -> Vec<(&'static str, RmlProgram)> {
    let entries = [
        ("incr", "-r0.pred ; #3 ; r2.succ ; \\#3 ; r2.succ"),
        (
            "decr",
            "+r0.pred ; #2 ; r1.succ ; -r0.pred ; #3 ; r2.succ ; \\#3",
        ),
        (
            "iszero",
            "+r0.iszero ; #2 ; r1.succ ; -r0.pred ; #3 ; r2.succ ; \\#3",
        ),
        ("setzero", "#1"),
        ("double", "-r0.pred ; #4 ; r2.succ ; r2.succ ; \\#4"),
        ("deadlock", "#0"),
        ("spin", "r0.iszero ; \\#1"),
    ];
    entries
        .iter()
        .map(|(name, text)| (*name, RmlProgram::parse(text).expect("corpus parses")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funits::{derived_op_at, DerivedOutcome, UnitState};
    use crate::isa::sbt;

    fn nat(n: u64) -> Natural {
        Natural::from(n)
    }

    #[test]
    fn counter_operations() {
        let m = |name: &str, x: u64| apply_counter(&ident(name), &nat(x)).unwrap();
        assert_eq!(m("incr", 0), (true, nat(1)));
        assert_eq!(m("decr", 0), (false, nat(0)));
        assert_eq!(m("decr", 4), (true, nat(3)));
        assert_eq!(m("iszero", 7), (false, nat(7)));
        assert_eq!(m("iszero", 0), (true, nat(0)));
        assert_eq!(m("setzero", 9), (true, nat(0)));
    }

    #[test]
    fn decrn_operations() {
        let m = |n: u64, name: &str, x: u64| apply_decrn(n, &ident(name), &nat(x)).unwrap();
        assert_eq!(m(3, "decr3", 7), (true, nat(4)));
        assert_eq!(m(3, "decr3", 2), (false, nat(0)));
        assert_eq!(m(3, "iszero", 0), (true, nat(0)));
        assert!(decrn_unit(0).is_err());
    }

    #[test]
    fn univ_operations() {
        let m = |name: &str, x: u64| apply_univ(&ident(name), &nat(x)).unwrap();
        assert_eq!(m("exp2", 3), (true, nat(8)));
        assert_eq!(m("succ2", 4), (true, nat(20)));
        assert_eq!(m("pred0", 9), (false, nat(9)));
        assert_eq!(m("pred0", 10), (true, nat(5)));
        assert_eq!(m("iszero1", 10), (true, nat(10)));
        assert_eq!(m("iszero1", 9), (false, nat(9)));
        assert_eq!(m("fact5", 200), (true, nat(2)));
        assert_eq!(univ_method_names().len(), 20);
    }

    #[test]
    fn univ3_operations() {
        let m = |name: &str, x: u64| apply_univ3(&ident(name), &nat(x)).unwrap();
        assert_eq!(m("g1", 2), (true, nat(4)));
        assert_eq!(m("g2", 2), (true, nat(6)));
        assert_eq!(m("g2", 5), (false, nat(0)));
        assert_eq!(m("g2", 0), (false, nat(0)));
        let x = nat(2) * Natural::from(3u32).pow(19);
        assert_eq!(apply_univ3(&ident("g2"), &x).unwrap(), (true, nat(2)));
        // g3 on 2^4 * 3^0 applies exp2 to 4
        assert_eq!(m("g3", 16), (true, nat(16)));
        // g3 on 2^3 * 3^2 applies succ0 to 3
        assert_eq!(m("g3", 72), (true, nat(6)));
    }

    #[test]
    fn rml_validation() {
        assert!(RmlProgram::parse("r0.succ ; +r1.iszero ; #2").is_ok());
        assert!(RmlProgram::parse("r0.succ ; !t").is_err());
        assert!(RmlProgram::parse("r6.succ").is_err());
        assert!(RmlProgram::parse("r0.incr").is_err());
        assert!(RmlProgram::parse("f.exp2").is_err());
    }

    #[test]
    fn run_rml_examples() {
        let corpus = rml_corpus();
        let incr = &corpus[0].1;
        assert_eq!(
            run_rml(incr, &nat(7), &Budget::exact()),
            RmlOutcome::Halted {
                flag: true,
                out: nat(8)
            }
        );

        let empty_loop = RmlProgram::parse("#1").unwrap();
        assert_eq!(
            run_rml(&empty_loop, &nat(5), &Budget::exact()),
            RmlOutcome::Halted {
                flag: true,
                out: nat(0)
            }
        );

        // A jump two past the end is an invalid halt, not a halt.
        let bad = RmlProgram::parse("#3 ; r0.succ").unwrap();
        assert_eq!(
            run_rml(&bad, &nat(0), &Budget::exact()),
            RmlOutcome::InvalidHalt { position: 4 }
        );

        let spin = RmlProgram::parse("r0.iszero ; \\#1").unwrap();
        assert_eq!(run_rml(&spin, &nat(2), &Budget::exact()), RmlOutcome::Diverged);
        assert_eq!(
            run_rml(&spin, &nat(2), &Budget::Fuel(10)),
            RmlOutcome::BudgetExhausted
        );
    }

    #[test]
    fn rmlful_structure() {
        let single = RmlProgram::parse("r2.succ").unwrap();
        let translated = rmlful(&single);
        assert_eq!(translated.len(), 1 + 1 + 6);
        assert_eq!(
            translated.print(),
            "f.exp2 ; f.succ2 ; -f.iszero1 ; #3 ; f.fact5 ; !t ; f.fact5 ; !f"
        );
        assert_eq!(
            rml_action_translation(&basic("r0", "iszero")),
            basic("f", "iszero0")
        );
    }

    #[test]
    fn rmlful_simulates_incr() {
        let incr = &rml_corpus()[0].1;
        let out = derived_op_at(
            &rmlful(incr),
            &univ_unit(),
            &UnitState::nat(7),
            &Budget::exact(),
        )
        .unwrap();
        assert_eq!(
            out,
            DerivedOutcome::Defined {
                reply: true,
                state: UnitState::nat(8)
            }
        );
    }

    #[test]
    fn encode_regs_is_prime_product() {
        let regs = [nat(2), nat(0), nat(1), nat(0), nat(0), nat(1)];
        assert_eq!(encode_regs(&regs), nat(4 * 5 * 13));
    }

    #[test]
    fn counter_unit_has_expected_interface() {
        let unit = counter_unit();
        let names: Vec<&str> = unit.interface().iter().map(|m| m.as_str()).collect();
        assert_eq!(names, ["decr", "incr", "iszero", "setzero"]);
        let _ = sbt("+f.iszero ; !t ; !f");
    }
}
