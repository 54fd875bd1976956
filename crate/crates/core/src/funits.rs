//! Functional units: named total method operations over an explicit state
//! space. Covers unit-backed services, derived method operations produced
//! by instruction sequences, witness-based `below` checks, the inlining
//! construction behind transitivity of `below`, and exhaustive enumeration
//! of derived operations over small finite state spaces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::exec::{self, Budget, Reply, Verdict};
use crate::isa::{ident, Dialect, Ident, InstrSeq, Instruction, Natural};
use crate::natunits;
use crate::services::{Service, ServiceFamily};
use crate::tape::{self, TapeState};
use crate::threads::{extract, RegularThread};

/// A state of some functional-unit state space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UnitState {
    Nat(Natural),
    Fin(u8),
    Tape(TapeState),
}

impl UnitState {
    pub fn nat(n: u64) -> Self {
        UnitState::Nat(Natural::from(n))
    }

    pub fn as_nat(&self) -> Option<&Natural> {
        match self {
            UnitState::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_fin(&self) -> Option<u8> {
        match self {
            UnitState::Fin(s) => Some(*s),
            _ => None,
        }
    }

    pub fn as_tape(&self) -> Option<&TapeState> {
        match self {
            UnitState::Tape(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for UnitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitState::Nat(n) => write!(f, "{n}"),
            UnitState::Fin(s) => write!(f, "{s}"),
            UnitState::Tape(t) => write!(f, "{t}"),
        }
    }
}

/// Descriptor of a unit's state space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StateSpace {
    /// Arbitrary-precision naturals.
    Nat,
    /// Finite space with states `0..size`.
    Fin(u8),
    /// Turing-tape contents over `{0,1,:}` with a head position.
    Tape,
}

/// One total method operation over a finite space, as a table indexed by
/// state.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FiniteOp {
    table: Vec<(bool, u8)>,
}

impl FiniteOp {
    pub fn new(table: Vec<(bool, u8)>) -> Self {
        FiniteOp { table }
    }

    pub fn table(&self) -> &[(bool, u8)] {
        &self.table
    }

    pub fn apply(&self, s: u8) -> (bool, u8) {
        self.table[s as usize]
    }
}

/// An explicit-table functional unit over states `0..size`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FiniteUnit {
    size: u8,
    ops: BTreeMap<Ident, FiniteOp>,
}

impl FiniteUnit {
    pub fn new(size: u8) -> Self {
        assert!(size >= 1, "finite space needs at least one state");
        FiniteUnit {
            size,
            ops: BTreeMap::new(),
        }
    }

    pub fn size(&self) -> u8 {
        self.size
    }

    pub fn insert(&mut self, name: Ident, op: FiniteOp) {
        assert_eq!(op.table.len(), self.size as usize, "table must be total");
        assert!(
            op.table.iter().all(|(_, e)| *e < self.size),
            "effect states must be in range"
        );
        self.ops.insert(name, op);
    }

    pub fn ops(&self) -> &BTreeMap<Ident, FiniteOp> {
        &self.ops
    }
}

/// Behaviour of a functional unit; determines state space and the full
/// method table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum UnitKind {
    /// Unbounded counter over the naturals.
    Counter,
    /// `decr<n>`/`iszero` unit: subtract n at once.
    DecrN(u64),
    /// The 20-method universal unit over the naturals.
    Univ,
    /// The 3-method universal unit over the naturals.
    Univ3,
    /// Bit-sequence duplication over tape states.
    Dup,
    /// The halting-problem oracle over tape states (empty base).
    HaltingOracle,
    /// Explicit finite table.
    Finite(FiniteUnit),
}

impl UnitKind {
    fn full_interface(&self) -> BTreeSet<Ident> {
        match self {
            UnitKind::Counter => ["setzero", "incr", "decr", "iszero"]
                .iter()
                .map(|m| ident(m))
                .collect(),
            UnitKind::DecrN(n) => [format!("decr{n}"), "iszero".to_string()]
                .iter()
                .map(|m| ident(m))
                .collect(),
            UnitKind::Univ => natunits::univ_method_names().into_iter().collect(),
            UnitKind::Univ3 => ["g1", "g2", "g3"].iter().map(|m| ident(m)).collect(),
            UnitKind::Dup => BTreeSet::from([ident("dup")]),
            UnitKind::HaltingOracle => BTreeSet::from([ident("halting")]),
            UnitKind::Finite(u) => u.ops.keys().cloned().collect(),
        }
    }

    fn state_space(&self) -> StateSpace {
        match self {
            UnitKind::Counter | UnitKind::DecrN(_) | UnitKind::Univ | UnitKind::Univ3 => {
                StateSpace::Nat
            }
            UnitKind::Dup | UnitKind::HaltingOracle => StateSpace::Tape,
            UnitKind::Finite(u) => StateSpace::Fin(u.size),
        }
    }
}

/// A functional unit: a behaviour restricted to an interface.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FunctionalUnit {
    kind: UnitKind,
    interface: BTreeSet<Ident>,
}

impl FunctionalUnit {
    /// Unit with the full interface of its behaviour.
    pub fn new(kind: UnitKind) -> Self {
        let interface = kind.full_interface();
        FunctionalUnit { kind, interface }
    }

    /// Restriction to a sub-interface.
    pub fn restrict(&self, methods: &BTreeSet<Ident>) -> Result<Self, FunitError> {
        for m in methods {
            if !self.interface.contains(m) {
                return Err(FunitError::MethodOutsideInterface(m.clone()));
            }
        }
        Ok(FunctionalUnit {
            kind: self.kind.clone(),
            interface: methods.clone(),
        })
    }

    pub fn kind(&self) -> &UnitKind {
        &self.kind
    }

    pub fn interface(&self) -> &BTreeSet<Ident> {
        &self.interface
    }

    pub fn state_space(&self) -> StateSpace {
        self.kind.state_space()
    }

    /// Canonical default state: 0 for naturals, the empty tape, state 0 for
    /// finite spaces.
    pub fn default_state(&self) -> UnitState {
        match self.state_space() {
            StateSpace::Nat => UnitState::Nat(Natural::from(0u32)),
            StateSpace::Fin(_) => UnitState::Fin(0),
            StateSpace::Tape => UnitState::Tape(TapeState::empty()),
        }
    }

    pub fn contains_state(&self, s: &UnitState) -> bool {
        match (self.state_space(), s) {
            (StateSpace::Nat, UnitState::Nat(_)) => true,
            (StateSpace::Tape, UnitState::Tape(_)) => true,
            (StateSpace::Fin(k), UnitState::Fin(v)) => *v < k,
            _ => false,
        }
    }

    /// All states of a finite space, in order.
    pub fn all_states(&self) -> Option<Vec<UnitState>> {
        match self.state_space() {
            StateSpace::Fin(k) => Some((0..k).map(UnitState::Fin).collect()),
            _ => None,
        }
    }

    /// Applies the named method operation. `None` iff the method is outside
    /// the interface. Panics if the state is not in the unit's state space.
    pub fn apply(&self, method: &Ident, state: &UnitState) -> Option<(bool, UnitState)> {
        if !self.interface.contains(method) {
            return None;
        }
        assert!(
            self.contains_state(state),
            "state {state} outside the unit's state space"
        );
        let out = match &self.kind {
            UnitKind::Counter => {
                let n = state.as_nat().expect("nat state");
                natunits::apply_counter(method, n).map(|(r, n)| (r, UnitState::Nat(n)))
            }
            UnitKind::DecrN(step) => {
                let n = state.as_nat().expect("nat state");
                natunits::apply_decrn(*step, method, n).map(|(r, n)| (r, UnitState::Nat(n)))
            }
            UnitKind::Univ => {
                let n = state.as_nat().expect("nat state");
                natunits::apply_univ(method, n).map(|(r, n)| (r, UnitState::Nat(n)))
            }
            UnitKind::Univ3 => {
                let n = state.as_nat().expect("nat state");
                natunits::apply_univ3(method, n).map(|(r, n)| (r, UnitState::Nat(n)))
            }
            UnitKind::Dup => {
                let t = state.as_tape().expect("tape state");
                if method.as_str() == "dup" {
                    let (r, t) = tape::apply_dup(t);
                    Some((r, UnitState::Tape(t)))
                } else {
                    None
                }
            }
            UnitKind::HaltingOracle => {
                let t = state.as_tape().expect("tape state");
                if method.as_str() == "halting" {
                    let (r, t) = tape::apply_halting(t);
                    Some((r, UnitState::Tape(t)))
                } else {
                    None
                }
            }
            UnitKind::Finite(u) => {
                let s = state.as_fin().expect("finite state");
                u.ops.get(method).map(|op| {
                    let (r, e) = op.apply(s);
                    (r, UnitState::Fin(e))
                })
            }
        };
        debug_assert!(out.is_some(), "interface method {method} must be defined");
        out
    }
}

/// The unit-backed service at state `s`.
pub fn unit_service(h: &FunctionalUnit, s: &UnitState) -> Result<Service, FunitError> {
    if !h.contains_state(s) {
        return Err(FunitError::StateNotInSpace);
    }
    Ok(Service::Unit(h.clone(), s.clone()))
}

/// Errors of the functional-unit operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FunitError {
    StateNotInSpace,
    /// Program is not in the strict dialect.
    WrongDialect,
    /// Basic instruction with a focus other than `f`.
    WrongFocus(Ident),
    /// Method not in the unit's interface.
    MethodOutsideInterface(Ident),
    /// Witness map does not cover a method of the left unit.
    MissingWitness(Ident),
    /// Units live over different state spaces.
    SpaceMismatch,
    /// Operation requires a finite state space of bounded size.
    SpaceTooLarge,
    /// Program is not in the positive-test normal form.
    NotNormalForm(String),
    /// An inlining body mentions a method that is itself being inlined.
    RecursiveBodies(Ident),
    /// The run ended with a plain-termination reply, which strict programs
    /// cannot produce.
    UnexpectedMeaningless,
}

impl fmt::Display for FunitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunitError::StateNotInSpace => f.write_str("state is not in the unit's state space"),
            FunitError::WrongDialect => f.write_str("program must be in pglbsbt"),
            FunitError::WrongFocus(focus) => {
                write!(f, "unit programs use the single focus `f`, found `{focus}`")
            }
            FunitError::MethodOutsideInterface(m) => {
                write!(f, "method `{m}` is outside the unit interface")
            }
            FunitError::MissingWitness(m) => write!(f, "no witness for method `{m}`"),
            FunitError::SpaceMismatch => f.write_str("units live over different state spaces"),
            FunitError::SpaceTooLarge => {
                f.write_str("state space too large for exhaustive enumeration")
            }
            FunitError::NotNormalForm(why) => write!(f, "not in normal form: {why}"),
            FunitError::RecursiveBodies(m) => {
                write!(f, "body for `{m}` mentions a method being inlined")
            }
            FunitError::UnexpectedMeaningless => {
                f.write_str("strict program produced a meaningless reply")
            }
        }
    }
}

impl core::error::Error for FunitError {}

/// Checks that `x` is a unit program: strict dialect, single focus `f`,
/// methods within the interface of `h`.
pub fn validate_unit_program(x: &InstrSeq, h: &FunctionalUnit) -> Result<(), FunitError> {
    if x.dialect() != Dialect::Pglbsbt {
        return Err(FunitError::WrongDialect);
    }
    for u in x.instructions() {
        if let Some(a) = u.basic() {
            if a.focus != ident("f") {
                return Err(FunitError::WrongFocus(a.focus.clone()));
            }
            if !h.interface().contains(&a.method) {
                return Err(FunitError::MethodOutsideInterface(a.method.clone()));
            }
        }
    }
    Ok(())
}

/// Value of a derived (partial) method operation at one state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DerivedOutcome {
    /// The run converged with a Boolean reply; carries reply and final state.
    Defined { reply: bool, state: UnitState },
    /// The run diverged: the partial operation is undefined here.
    Undefined,
    /// The step budget ran out before an answer; reported distinctly.
    Unknown,
}

impl DerivedOutcome {
    pub fn defined(&self) -> Option<(bool, &UnitState)> {
        match self {
            DerivedOutcome::Defined { reply, state } => Some((*reply, state)),
            _ => None,
        }
    }
}

/// Runs `x` against `f.H(s)` and reads the derived-operation value off the
/// reply and the final family. Validates the program first.
pub fn derived_op_at(
    x: &InstrSeq,
    h: &FunctionalUnit,
    s: &UnitState,
    budget: &Budget,
) -> Result<DerivedOutcome, FunitError> {
    validate_unit_program(x, h)?;
    derived_op_thread_at(&extract(x), h, s, budget)
}

/// As [`derived_op_at`] for a pre-extracted, pre-validated thread. Useful
/// when the same program is evaluated over many states.
pub fn derived_op_thread_at(
    t: &RegularThread,
    h: &FunctionalUnit,
    s: &UnitState,
    budget: &Budget,
) -> Result<DerivedOutcome, FunitError> {
    let family = ServiceFamily::singleton_f(unit_service(h, s)?);
    let out = exec::run(t, &family, budget);
    match out.verdict {
        Verdict::Converged(Reply::T) | Verdict::Converged(Reply::F) => {
            let reply = matches!(out.verdict, Verdict::Converged(Reply::T));
            let family = out.final_family.expect("converged runs carry a family");
            let state = match family.get(&ident("f")) {
                Some(Service::Unit(_, state)) => state.clone(),
                _ => return Err(FunitError::StateNotInSpace),
            };
            Ok(DerivedOutcome::Defined { reply, state })
        }
        Verdict::Converged(Reply::M) | Verdict::Converged(Reply::D) => {
            Err(FunitError::UnexpectedMeaningless)
        }
        Verdict::Diverged(_) => Ok(DerivedOutcome::Undefined),
        Verdict::BudgetExhausted => Ok(DerivedOutcome::Unknown),
    }
}

/// Default sample states for the naturals: 0..=100 plus 50 seeded random
/// values below 10^6.
pub fn default_nat_samples() -> Vec<UnitState> {
    let mut states: Vec<UnitState> = (0..=100u64).map(UnitState::nat).collect();
    let mut rng = crate::gen::Rng::new(0x5a117);
    for _ in 0..50 {
        states.push(UnitState::nat(rng.next_u64() % 1_000_000));
    }
    states
}

/// Outcome of a witness-based `below` check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BelowVerdict {
    Pass,
    /// The witness value disagrees with the left unit's operation.
    Counterexample {
        method: Ident,
        state: UnitState,
        expected: (bool, UnitState),
        got: DerivedOutcome,
    },
    /// A witness run exhausted its budget.
    Inconclusive { method: Ident, state: UnitState },
}

/// Report of [`check_below_witness`]: per-method witness evaluation over the
/// sampled states.
#[derive(Clone, Debug)]
pub struct BelowReport {
    pub verdict: BelowVerdict,
    pub states_checked: usize,
}

impl BelowReport {
    pub fn passed(&self) -> bool {
        self.verdict == BelowVerdict::Pass
    }
}

/// Checks `L below H` via witness programs: for every method of `L` the
/// witness over `H` must reproduce the operation on every sampled state.
/// A diverging witness run is a counterexample (derived operations are
/// total).
pub fn check_below_witness(
    l: &FunctionalUnit,
    h: &FunctionalUnit,
    witnesses: &BTreeMap<Ident, InstrSeq>,
    states: &[UnitState],
    budget: &Budget,
) -> Result<BelowReport, FunitError> {
    if l.state_space() != h.state_space() {
        return Err(FunitError::SpaceMismatch);
    }
    for m in l.interface() {
        if !witnesses.contains_key(m) {
            return Err(FunitError::MissingWitness(m.clone()));
        }
    }
    for w in witnesses.values() {
        validate_unit_program(w, h)?;
    }
    let mut states_checked = 0;
    for m in l.interface() {
        let witness = extract(&witnesses[m]);
        for s in states {
            if !l.contains_state(s) {
                return Err(FunitError::StateNotInSpace);
            }
            states_checked += 1;
            let expected = l.apply(m, s).expect("interface method is defined");
            match derived_op_thread_at(&witness, h, s, budget)? {
                DerivedOutcome::Defined { reply, state }
                    if reply == expected.0 && state == expected.1 => {}
                DerivedOutcome::Unknown => {
                    return Ok(BelowReport {
                        verdict: BelowVerdict::Inconclusive {
                            method: m.clone(),
                            state: s.clone(),
                        },
                        states_checked,
                    })
                }
                got => {
                    return Ok(BelowReport {
                        verdict: BelowVerdict::Counterexample {
                            method: m.clone(),
                            state: s.clone(),
                            expected,
                            got,
                        },
                        states_checked,
                    })
                }
            }
        }
    }
    Ok(BelowReport {
        verdict: BelowVerdict::Pass,
        states_checked,
    })
}

/// The identity witness `+f.m ; !t ; !f` for a method.
pub fn identity_witness(m: &Ident) -> InstrSeq {
    InstrSeq::new(
        Dialect::Pglbsbt,
        vec![
            Instruction::PosTest(crate::isa::BasicInstruction::new(ident("f"), m.clone())),
            Instruction::HaltPos,
            Instruction::HaltNeg,
        ],
    )
    .expect("identity witness is valid")
}

/// True iff `x` is `u1 ; .. ; uk ; !t ; !f` with every `ui` a positive test
/// over focus `f` or a jump.
pub fn is_normal_form(x: &InstrSeq) -> bool {
    if x.dialect() != Dialect::Pglbsbt || x.len() < 2 {
        return false;
    }
    let k = x.len();
    if *x.at(k - 1).unwrap() != Instruction::HaltPos || *x.at(k).unwrap() != Instruction::HaltNeg {
        return false;
    }
    (1..=k - 2).all(|i| match x.at(i).unwrap() {
        Instruction::PosTest(a) => a.focus == ident("f"),
        Instruction::FwdJump(_) | Instruction::BwdJump(_) => true,
        _ => false,
    })
}

/// Rewrites a strict program into the normal form `u1 ; .. ; uk ; !t ; !f`
/// (positive tests and jumps only), preserving its derived method operation
/// for every unit. Every source instruction becomes a three-slot block with
/// explicit routing jumps; the trailing pair collects all terminations.
pub fn normalize(x: &InstrSeq) -> Result<InstrSeq, FunitError> {
    if x.dialect() != Dialect::Pglbsbt {
        return Err(FunitError::WrongDialect);
    }
    let k = x.len();
    // Block for source position i starts at 3(i-1)+1; !t sits at 3k+1.
    let block_start = |i: usize| 3 * (i - 1) + 1;
    let jump_to = |from: usize, to: usize| -> Instruction {
        use core::cmp::Ordering;
        match to.cmp(&from) {
            Ordering::Greater => Instruction::FwdJump(Natural::from(to - from)),
            Ordering::Less => Instruction::BwdJump(Natural::from(from - to)),
            Ordering::Equal => Instruction::FwdJump(Natural::from(0u32)),
        }
    };
    let dead = Instruction::FwdJump(Natural::from(0u32));
    let mut out: Vec<Instruction> = Vec::with_capacity(3 * k + 2);
    for i in 1..=k {
        let p = block_start(i);
        debug_assert_eq!(out.len() + 1, p);
        // Routing targets for the implicit successors i+1 / i+2.
        let succ = |j: usize, from: usize| -> Instruction {
            if j >= 1 && j <= k {
                jump_to(from, block_start(j))
            } else {
                dead.clone()
            }
        };
        match x.at(i).unwrap() {
            Instruction::PosTest(a) => {
                out.push(Instruction::PosTest(a.clone()));
                out.push(succ(i + 1, p + 1));
                out.push(succ(i + 2, p + 2));
            }
            Instruction::NegTest(a) => {
                out.push(Instruction::PosTest(a.clone()));
                out.push(succ(i + 2, p + 1));
                out.push(succ(i + 1, p + 2));
            }
            Instruction::Plain(a) => {
                out.push(Instruction::PosTest(a.clone()));
                out.push(succ(i + 1, p + 1));
                out.push(succ(i + 1, p + 2));
            }
            Instruction::FwdJump(l) => {
                let target = l
                    .to_usize()
                    .filter(|l| *l > 0)
                    .map(|l| i.checked_add(l))
                    .flatten();
                match target {
                    Some(t) if t <= k => out.push(jump_to(p, block_start(t))),
                    _ => out.push(dead.clone()),
                }
                out.push(dead.clone());
                out.push(dead.clone());
            }
            Instruction::BwdJump(l) => {
                let target = l.to_usize().filter(|l| *l > 0 && *l < i).map(|l| i - l);
                match target {
                    Some(t) => out.push(jump_to(p, block_start(t))),
                    None => out.push(dead.clone()),
                }
                out.push(dead.clone());
                out.push(dead.clone());
            }
            Instruction::HaltPos => {
                out.push(jump_to(p, 3 * k + 1));
                out.push(dead.clone());
                out.push(dead.clone());
            }
            Instruction::HaltNeg => {
                out.push(jump_to(p, 3 * k + 2));
                out.push(dead.clone());
                out.push(dead.clone());
            }
            Instruction::Halt => return Err(FunitError::WrongDialect),
        }
    }
    out.push(Instruction::HaltPos);
    out.push(Instruction::HaltNeg);
    Ok(InstrSeq::new(Dialect::Pglbsbt, out).expect("normal form is non-empty"))
}

fn require_normal_form(x: &InstrSeq, what: &str) -> Result<(), FunitError> {
    if is_normal_form(x) {
        Ok(())
    } else {
        Err(FunitError::NotNormalForm(format!("{what}: `{}`", x.print())))
    }
}

/// Replaces every positive-test occurrence of the `bodies` methods in `x`
/// by the corresponding body block, adjusting surrounding jumps so the
/// derived method operation is preserved. Input and bodies must be in
/// normal form; the output is in normal form over the remaining methods.
pub fn inline_methods(
    x: &InstrSeq,
    bodies: &BTreeMap<Ident, InstrSeq>,
) -> Result<InstrSeq, FunitError> {
    require_normal_form(x, "program")?;
    for (m, body) in bodies {
        require_normal_form(body, "body")?;
        for u in body.instructions() {
            if let Some(a) = u.basic() {
                if bodies.contains_key(&a.method) {
                    return Err(FunitError::RecursiveBodies(m.clone()));
                }
            }
        }
    }
    let mut current = x.clone();
    // Leftmost-first, one method at a time, until no occurrence remains.
    for m in bodies.keys() {
        loop {
            let occurrence = (1..=current.len()).find(|&p| {
                matches!(current.at(p), Some(Instruction::PosTest(a)) if a.method == *m)
            });
            let p = match occurrence {
                Some(p) => p,
                None => break,
            };
            current = splice_body(&current, p, &bodies[m]);
        }
    }
    debug_assert!(is_normal_form(&current));
    Ok(current)
}

/// Replaces the instruction at position `p` by the instruction block of
/// `body` (its trailing `!t ; !f` stripped). Body exits to its relative
/// positions k+1 / k+2 then land on the replaced instruction's true/false
/// successors. A positive test immediately before `p` reaches its false
/// branch implicitly at `p+1`; when the block is longer than one
/// instruction, a two-slot routing pad keeps that branch landing one past
/// the block.
fn splice_body(x: &InstrSeq, p: usize, body: &InstrSeq) -> InstrSeq {
    let k_old = x.len();
    let core_len = body.len() - 2;
    let hazard = p > 1
        && matches!(x.at(p - 1), Some(Instruction::PosTest(_)))
        && core_len.max(1) >= 2;
    let pad = if hazard { 2 } else { 0 };
    // Block length: padded body core, or a single forward hop for an empty
    // core (a body that terminates immediately).
    let block_len = pad + core_len.max(1);
    let growth = block_len - 1;

    let map = |q: usize| -> usize {
        if q <= p {
            q
        } else {
            q + growth
        }
    };
    let retarget = |instr: &Instruction, old_pos: usize| -> Instruction {
        let new_pos = map(old_pos);
        match instr {
            Instruction::FwdJump(l) => match l.to_usize().and_then(|l| old_pos.checked_add(l)) {
                Some(t) if t > old_pos && t <= k_old => {
                    Instruction::FwdJump(Natural::from(map(t) - new_pos))
                }
                _ => Instruction::FwdJump(Natural::from(0u32)),
            },
            Instruction::BwdJump(l) => match l.to_usize().filter(|l| *l > 0 && *l < old_pos) {
                Some(l) => Instruction::BwdJump(Natural::from(new_pos - map(old_pos - l))),
                _ => Instruction::FwdJump(Natural::from(0u32)),
            },
            other => other.clone(),
        }
    };

    let mut out: Vec<Instruction> = Vec::with_capacity(k_old + growth);
    for q in 1..=p - 1 {
        out.push(retarget(x.at(q).unwrap(), q));
    }
    if hazard {
        // Entry hop into the body, then the rerouted false branch of the
        // preceding test.
        out.push(Instruction::FwdJump(Natural::from(2u32)));
        out.push(Instruction::FwdJump(Natural::from(block_len - 1)));
    }
    if core_len == 0 {
        out.push(Instruction::FwdJump(Natural::from(1u32)));
    } else {
        for q in 1..=core_len {
            // Body-relative targets k+1 / k+2 fall through to the block's
            // two successor positions; anything further is out of range in
            // the standalone body and stays inaction.
            let instr = match body.at(q).unwrap() {
                Instruction::FwdJump(l) => match l.to_usize().and_then(|l| q.checked_add(l)) {
                    Some(t) if t > q && t <= core_len + 2 => {
                        Instruction::FwdJump(Natural::from(t - q))
                    }
                    _ => Instruction::FwdJump(Natural::from(0u32)),
                },
                Instruction::BwdJump(l) => match l.to_usize().filter(|l| *l > 0 && *l < q) {
                    Some(l) => Instruction::BwdJump(Natural::from(l)),
                    _ => Instruction::FwdJump(Natural::from(0u32)),
                },
                other => other.clone(),
            };
            out.push(instr);
        }
    }
    for q in p + 1..=k_old {
        out.push(retarget(x.at(q).unwrap(), q));
    }
    InstrSeq::new(Dialect::Pglbsbt, out).expect("spliced program is non-empty")
}

/// Composes witnesses along the inlining construction: a witness for
/// `L below H` rewritten over `K` using witnesses for `H below K`.
pub fn compose_witnesses(
    witness_lh: &InstrSeq,
    witnesses_hk: &BTreeMap<Ident, InstrSeq>,
) -> Result<InstrSeq, FunitError> {
    let normalized: BTreeMap<Ident, InstrSeq> = witnesses_hk
        .iter()
        .map(|(m, w)| Ok((m.clone(), normalize(w)?)))
        .collect::<Result<_, FunitError>>()?;
    inline_methods(&normalize(witness_lh)?, &normalized)
}

/// Largest finite space admitted by the exhaustive enumeration.
pub const MAX_ENUM_STATES: u8 = 4;

/// The exact set of total derived method operations of a finite-space unit,
/// as state-indexed tables.
///
/// Computed as a least fixpoint over joint configurations: all initial
/// states advance together while replies agree and split on disagreement;
/// an operation is achievable iff some finite strategy tree terminates every
/// track.
pub fn enumerate_derived_ops(
    h: &FunctionalUnit,
) -> Result<BTreeSet<Vec<(bool, u8)>>, FunitError> {
    let size = match h.state_space() {
        StateSpace::Fin(k) if k <= MAX_ENUM_STATES => k,
        StateSpace::Fin(_) => return Err(FunitError::SpaceTooLarge),
        _ => return Err(FunitError::SpaceTooLarge),
    };
    // (initial state, current state) pairs, sorted by initial state.
    type Cfg = Vec<(u8, u8)>;
    type Assign = Vec<(u8, (bool, u8))>;

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

    let split = |cfg: &Cfg, table: &[(bool, u8)]| -> (Cfg, Cfg) {
        let mut on_true = Vec::new();
        let mut on_false = Vec::new();
        for &(init, cur) in cfg {
            let (r, e) = table[cur as usize];
            if r {
                on_true.push((init, e));
            } else {
                on_false.push((init, e));
            }
        }
        (on_true, on_false)
    };

    let root: Cfg = (0..size).map(|s| (s, s)).collect();
    let mut reach: BTreeSet<Cfg> = BTreeSet::from([root.clone()]);
    let mut frontier = vec![root.clone()];
    while let Some(cfg) = frontier.pop() {
        for table in &tables {
            let (t, f) = split(&cfg, table);
            for piece in [t, f] {
                if !piece.is_empty() && reach.insert(piece.clone()) {
                    frontier.push(piece);
                }
            }
        }
    }

    let terminate = |cfg: &Cfg, reply: bool| -> Assign {
        cfg.iter().map(|&(init, cur)| (init, (reply, cur))).collect()
    };
    let mut ach: BTreeMap<Cfg, BTreeSet<Assign>> = reach
        .iter()
        .map(|cfg| {
            (
                cfg.clone(),
                BTreeSet::from([terminate(cfg, true), terminate(cfg, false)]),
            )
        })
        .collect();

    loop {
        let mut changed = false;
        for cfg in &reach {
            for table in &tables {
                let (t, f) = split(cfg, table);
                let mut new_assigns: Vec<Assign> = Vec::new();
                match (t.is_empty(), f.is_empty()) {
                    (true, true) => unreachable!("configs are non-empty"),
                    (false, true) => new_assigns.extend(ach[&t].iter().cloned()),
                    (true, false) => new_assigns.extend(ach[&f].iter().cloned()),
                    (false, false) => {
                        for at in &ach[&t] {
                            for af in &ach[&f] {
                                let mut merged: Assign =
                                    at.iter().chain(af.iter()).cloned().collect();
                                merged.sort_unstable_by_key(|(init, _)| *init);
                                new_assigns.push(merged);
                            }
                        }
                    }
                }
                let set = ach.get_mut(cfg).expect("reachable config");
                for a in new_assigns {
                    changed |= set.insert(a);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let ops = ach[&root]
        .iter()
        .map(|assign| assign.iter().map(|&(_, v)| v).collect())
        .collect();
    Ok(ops)
}

/// The method operation over `Bool` with the given index, as a two-state
/// table. Bits: reply(0), effect(0), reply(1), effect(1).
pub fn bool_op_table(index: u8) -> Vec<(bool, u8)> {
    assert!(index < 16);
    let bit = |b: u8| (index >> b) & 1 == 1;
    vec![
        (bit(0), bit(1) as u8),
        (bit(2), bit(3) as u8),
    ]
}

/// Index of a two-state table; inverse of [`bool_op_table`].
pub fn bool_op_index(table: &[(bool, u8)]) -> u8 {
    assert_eq!(table.len(), 2);
    (table[0].0 as u8)
        | (table[0].1 << 1)
        | ((table[1].0 as u8) << 2)
        | (table[1].1 << 3)
}

/// Functional unit over `Bool` holding the operations selected by `mask`
/// (bit i selects operation i), named `op00`..`op15`.
pub fn bool_unit_from_mask(mask: u16) -> FunctionalUnit {
    let mut unit = FiniteUnit::new(2);
    for index in 0..16u8 {
        if mask & (1 << index) != 0 {
            unit.insert(
                ident(&format!("op{index:02}")),
                FiniteOp::new(bool_op_table(index)),
            );
        }
    }
    FunctionalUnit::new(UnitKind::Finite(unit))
}

fn ops_to_mask(ops: &BTreeSet<Vec<(bool, u8)>>) -> u16 {
    ops.iter().fold(0u16, |mask, table| {
        mask | (1 << bool_op_index(table))
    })
}

/// One functional-unit degree over `Bool`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BoolDegree {
    /// Derived-operation set shared by every member, as an operation mask.
    pub closure: u16,
    /// Smallest generating operation set (fewest operations, then lowest
    /// mask).
    pub representative: u16,
    /// Number of operation sets in the degree.
    pub members: u32,
}

/// Report of the degree enumeration over `Bool`.
#[derive(Clone, Debug)]
pub struct DegreesReport {
    pub degrees: Vec<BoolDegree>,
}

impl DegreesReport {
    pub fn count(&self) -> usize {
        self.degrees.len()
    }
}

/// Enumerates all functional units over `Bool` up to same-operation-set
/// identity and groups them into degrees by their derived-operation
/// closure. Two units are equivalent iff their closures coincide.
pub fn count_degrees_bool() -> DegreesReport {
    let mut degrees: BTreeMap<u16, BoolDegree> = BTreeMap::new();
    for mask in 0..=u16::MAX {
        let unit = bool_unit_from_mask(mask);
        let closure = ops_to_mask(&enumerate_derived_ops(&unit).expect("bool space is small"));
        let entry = degrees.entry(closure).or_insert(BoolDegree {
            closure,
            representative: mask,
            members: 0,
        });
        entry.members += 1;
        let better = (mask.count_ones(), mask) < (entry.representative.count_ones(), entry.representative);
        if better {
            entry.representative = mask;
        }
    }
    DegreesReport {
        degrees: degrees.into_values().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::sbt;
    use crate::natunits::counter_unit;

    fn fuel() -> Budget {
        Budget::Fuel(10_000)
    }

    #[test]
    fn unit_service_examples() {
        let counter = counter_unit();
        let svc = unit_service(&counter, &UnitState::nat(0)).unwrap();
        let (r, next) = svc.process(&ident("iszero"));
        assert_eq!(r, crate::services::ServiceReply::True);
        assert_eq!(next, svc);

        let (r, next) = svc.process(&ident("foo"));
        assert_eq!(r, crate::services::ServiceReply::Blocked);
        assert!(next.is_empty_service());

        assert!(unit_service(&counter, &UnitState::Fin(1)).is_err());
    }

    #[test]
    fn derived_op_examples() {
        let counter = counter_unit();
        let out = derived_op_at(&sbt("+f.iszero ; !t ; !f"), &counter, &UnitState::nat(0), &fuel())
            .unwrap();
        assert_eq!(
            out,
            DerivedOutcome::Defined {
                reply: true,
                state: UnitState::nat(0)
            }
        );

        let out = derived_op_at(
            &sbt("f.setzero ; +f.iszero ; !t ; !f"),
            &counter,
            &UnitState::nat(5),
            &fuel(),
        )
        .unwrap();
        assert_eq!(
            out,
            DerivedOutcome::Defined {
                reply: true,
                state: UnitState::nat(0)
            }
        );

        let out = derived_op_at(&sbt("\\#1"), &counter, &UnitState::nat(3), &fuel()).unwrap();
        assert_eq!(out, DerivedOutcome::Undefined);
    }

    #[test]
    fn derived_op_validates_programs() {
        let counter = counter_unit();
        let err = derived_op_at(&sbt("+g.iszero ; !t ; !f"), &counter, &UnitState::nat(0), &fuel());
        assert_eq!(err, Err(FunitError::WrongFocus(ident("g"))));
        let err = derived_op_at(&sbt("+f.nope ; !t ; !f"), &counter, &UnitState::nat(0), &fuel());
        assert_eq!(err, Err(FunitError::MethodOutsideInterface(ident("nope"))));
    }

    #[test]
    fn below_witness_examples() {
        let counter = counter_unit();
        let di = counter
            .restrict(&BTreeSet::from([ident("decr"), ident("iszero")]))
            .unwrap();
        let h1 = crate::natunits::decrn_unit(1).unwrap();
        let witnesses = BTreeMap::from([
            (ident("decr1"), sbt("+f.decr ; !t ; !f")),
            (ident("iszero"), identity_witness(&ident("iszero"))),
        ]);
        let states: Vec<UnitState> = (0..=100).map(UnitState::nat).collect();
        let report = check_below_witness(&h1, &di, &witnesses, &states, &fuel()).unwrap();
        assert!(report.passed(), "{:?}", report.verdict);

        // Claiming Incr from a decrement witness fails at 0.
        let incr_only = counter
            .restrict(&BTreeSet::from([ident("incr")]))
            .unwrap();
        let bogus = BTreeMap::from([(ident("incr"), sbt("+f.decr ; !t ; !f"))]);
        let report = check_below_witness(&incr_only, &di, &bogus, &states, &fuel()).unwrap();
        match report.verdict {
            BelowVerdict::Counterexample {
                state,
                expected,
                got,
                ..
            } => {
                assert_eq!(state, UnitState::nat(0));
                assert_eq!(expected, (true, UnitState::nat(1)));
                assert_eq!(
                    got,
                    DerivedOutcome::Defined {
                        reply: false,
                        state: UnitState::nat(0)
                    }
                );
            }
            other => panic!("expected counterexample, got {other:?}"),
        }

        // Vacuous: empty left unit, empty witnesses.
        let empty = FunctionalUnit::new(UnitKind::Finite(FiniteUnit::new(1)));
        let nat_empty = counter.restrict(&BTreeSet::new()).unwrap();
        assert!(empty.interface().is_empty());
        let report =
            check_below_witness(&nat_empty, &di, &BTreeMap::new(), &states, &fuel()).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn normal_form_checks() {
        assert!(is_normal_form(&sbt("+f.a ; !t ; !f")));
        assert!(is_normal_form(&sbt("#2 ; \\#1 ; !t ; !f")));
        assert!(!is_normal_form(&sbt("-f.a ; !t ; !f")));
        assert!(!is_normal_form(&sbt("!f ; !t")));
        assert!(!is_normal_form(&sbt("+f.a ; !t")));
    }

    #[test]
    fn inline_single_instruction_body() {
        let bodies = BTreeMap::from([(ident("a"), sbt("+f.b ; !t ; !f"))]);
        let out = inline_methods(&sbt("+f.a ; !t ; !f"), &bodies).unwrap();
        assert_eq!(out.print(), "+f.b ; !t ; !f");
    }

    #[test]
    fn inline_adjusts_crossing_jumps_by_core_length_minus_one() {
        // Body with a three-instruction core; the leading jump crosses the
        // occurrence, so its offset grows by 3 - 1 = 2.
        let bodies = BTreeMap::from([(ident("a"), sbt("+f.b ; #2 ; \\#2 ; !t ; !f"))]);
        let out = inline_methods(&sbt("#2 ; +f.a ; !t ; !f"), &bodies).unwrap();
        assert_eq!(out.print(), "#4 ; +f.b ; #2 ; \\#2 ; !t ; !f");
    }

    #[test]
    fn inline_rejects_recursive_bodies() {
        let bodies = BTreeMap::from([
            (ident("a"), sbt("+f.b ; !t ; !f")),
            (ident("b"), sbt("+f.c ; !t ; !f")),
        ]);
        let err = inline_methods(&sbt("+f.a ; !t ; !f"), &bodies);
        assert!(matches!(err, Err(FunitError::RecursiveBodies(_))));
    }

    #[test]
    fn bool_op_round_trip() {
        for index in 0..16u8 {
            assert_eq!(bool_op_index(&bool_op_table(index)), index);
        }
    }

    #[test]
    fn enumerate_empty_unit_over_bool() {
        // Programs without basic instructions have a uniform reply and
        // identity effect.
        let unit = bool_unit_from_mask(0);
        let ops = enumerate_derived_ops(&unit).unwrap();
        let expected: BTreeSet<Vec<(bool, u8)>> = BTreeSet::from([
            vec![(true, 0), (true, 1)],
            vec![(false, 0), (false, 1)],
        ]);
        assert_eq!(ops, expected);
    }

    #[test]
    fn enumerate_identity_reply_unit() {
        // One operation: reply = current state, effect = identity. Derivable:
        // the two constants, the test itself, and its negation.
        let mut u = FiniteUnit::new(2);
        u.insert(
            ident("m"),
            FiniteOp::new(vec![(false, 0), (true, 1)]),
        );
        let ops = enumerate_derived_ops(&FunctionalUnit::new(UnitKind::Finite(u))).unwrap();
        let expected: BTreeSet<Vec<(bool, u8)>> = BTreeSet::from([
            vec![(true, 0), (true, 1)],
            vec![(false, 0), (false, 1)],
            vec![(false, 0), (true, 1)],
            vec![(true, 0), (false, 1)],
        ]);
        assert_eq!(ops, expected);
    }

    #[test]
    fn counting_bound_on_enumeration() {
        let mut rng = crate::gen::Rng::new(77);
        for _ in 0..20 {
            let unit = crate::gen::random_finite_unit(&mut rng, 3, 3);
            let k = match unit.state_space() {
                StateSpace::Fin(k) => k as u32,
                _ => unreachable!(),
            };
            let ops = enumerate_derived_ops(&unit).unwrap();
            assert!(ops.len() as u64 <= (2 * k as u64).pow(k));
        }
    }
}
