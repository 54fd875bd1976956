//! The Turing-tape state space over `{0,1,:}` with a head marker, the
//! bit-sequence duplication operation, canonical program bit-encodings,
//! and the halting-problem experiments: solution checking, the diagonal
//! refutation, the dup-only decider, and the empty-base halting oracle.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::ToPrimitive;

use crate::exec::{self, Budget, Reply, Verdict};
use crate::funits::{self, unit_service, FunctionalUnit, FunitError, UnitKind, UnitState};
use crate::isa::{basic, ident, Dialect, Ident, InstrSeq, Instruction};
use crate::services::ServiceFamily;
use crate::threads::extract;

/// Tape alphabet: bits and the separator colon.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TapeSym {
    Zero,
    One,
    Colon,
}

impl TapeSym {
    pub fn to_char(self) -> char {
        match self {
            TapeSym::Zero => '0',
            TapeSym::One => '1',
            TapeSym::Colon => ':',
        }
    }

    pub fn from_char(c: char) -> Option<TapeSym> {
        match c {
            '0' => Some(TapeSym::Zero),
            '1' => Some(TapeSym::One),
            ':' => Some(TapeSym::Colon),
            _ => None,
        }
    }

    pub fn is_bit(self) -> bool {
        self != TapeSym::Colon
    }
}

/// Tape contents: the word left of the head and the word from the head
/// rightwards. No padding equivalences; two states are equal iff both
/// words are.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct TapeState {
    pub left: Vec<TapeSym>,
    pub right: Vec<TapeSym>,
}

impl TapeState {
    pub fn new(left: Vec<TapeSym>, right: Vec<TapeSym>) -> Self {
        TapeState { left, right }
    }

    /// The empty tape with the head at the boundary.
    pub fn empty() -> Self {
        TapeState::default()
    }

    /// Head at the start, `right` to its right.
    pub fn from_right(right: Vec<TapeSym>) -> Self {
        TapeState {
            left: Vec::new(),
            right,
        }
    }

    /// Concatenation of both sides; the word the head-insensitive
    /// operations act on.
    pub fn merged(&self) -> Vec<TapeSym> {
        let mut out = self.left.clone();
        out.extend(self.right.iter().copied());
        out
    }

    /// Parses the literal syntax `v|w` with `|` marking the head.
    pub fn parse(text: &str) -> Result<TapeState, TapeError> {
        let mut parts = text.split('|');
        let (left, right) = match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) => (l, r),
            _ => return Err(TapeError::BadLiteral(text.to_string())),
        };
        let decode = |s: &str| -> Result<Vec<TapeSym>, TapeError> {
            s.chars()
                .map(|c| TapeSym::from_char(c).ok_or_else(|| TapeError::BadLiteral(text.to_string())))
                .collect()
        };
        Ok(TapeState {
            left: decode(left)?,
            right: decode(right)?,
        })
    }
}

impl fmt::Display for TapeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.left {
            write!(f, "{}", s.to_char())?;
        }
        f.write_str("|")?;
        for s in &self.right {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TapeError {
    BadLiteral(String),
    Program(FunitError),
    /// Program uses methods outside the announced interface.
    OutsideInterface(Ident),
}

impl fmt::Display for TapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TapeError::BadLiteral(s) => write!(f, "bad tape literal `{s}`"),
            TapeError::Program(e) => write!(f, "{e}"),
            TapeError::OutsideInterface(m) => write!(f, "method `{m}` outside the interface"),
        }
    }
}

impl core::error::Error for TapeError {}

impl From<FunitError> for TapeError {
    fn from(e: FunitError) -> Self {
        TapeError::Program(e)
    }
}

/// The unit holding only the duplication operation.
pub fn dup_unit() -> FunctionalUnit {
    FunctionalUnit::new(UnitKind::Dup)
}

/// The empty-base halting oracle unit.
pub fn halting_oracle_unit() -> FunctionalUnit {
    FunctionalUnit::new(UnitKind::HaltingOracle)
}

fn first_colon(word: &[TapeSym]) -> Option<usize> {
    word.iter().position(|s| *s == TapeSym::Colon)
}

/// Duplicates the bit sequence before the first colon:
/// `v⌣w` is first normalized to `⌣vw`; then `⌣v` becomes `⌣v:v` and
/// `⌣v:w` becomes `⌣v:v:w`.
pub fn apply_dup(state: &TapeState) -> (bool, TapeState) {
    let word = state.merged();
    let (prefix, rest) = match first_colon(&word) {
        None => (&word[..], None),
        Some(c) => (&word[..c], Some(&word[c..])),
    };
    let mut out: Vec<TapeSym> = Vec::with_capacity(word.len() + prefix.len() + 1);
    out.extend_from_slice(prefix);
    out.push(TapeSym::Colon);
    out.extend_from_slice(prefix);
    if let Some(rest) = rest {
        out.extend_from_slice(rest);
    }
    (true, TapeState::from_right(out))
}

/// Bits of the ASCII bytes of the canonical text, most significant bit
/// first. Injective because the canonical printing is.
pub fn encode_program_bits(x: &InstrSeq) -> Vec<bool> {
    let mut bits = Vec::new();
    for byte in x.print().bytes() {
        for i in (0..8).rev() {
            bits.push(byte & (1 << i) != 0);
        }
    }
    bits
}

/// The encoding as tape symbols.
pub fn encode_program_syms(x: &InstrSeq) -> Vec<TapeSym> {
    encode_program_bits(x)
        .into_iter()
        .map(|b| if b { TapeSym::One } else { TapeSym::Zero })
        .collect()
}

/// Decodes a bit word back to a strict program: byte-aligned ASCII of the
/// canonical text. `None` on any failure (alignment, encoding, parse, or
/// non-canonical spelling).
pub fn decode_program_syms(word: &[TapeSym]) -> Option<InstrSeq> {
    if word.len() % 8 != 0 || word.iter().any(|s| !s.is_bit()) {
        return None;
    }
    let mut bytes = Vec::with_capacity(word.len() / 8);
    for chunk in word.chunks(8) {
        let mut byte = 0u8;
        for sym in chunk {
            byte = (byte << 1) | (*sym == TapeSym::One) as u8;
        }
        bytes.push(byte);
    }
    let text = String::from_utf8(bytes).ok()?;
    let program = InstrSeq::parse(&text, Dialect::Pglbsbt).ok()?;
    if program.print() != text {
        return None;
    }
    Some(program)
}

/// Checks membership in `L(I)`: strict dialect, focus `f`, methods in `I`.
pub fn validate_in_language(x: &InstrSeq, interface: &BTreeSet<Ident>) -> Result<(), TapeError> {
    if x.dialect() != Dialect::Pglbsbt {
        return Err(TapeError::Program(FunitError::WrongDialect));
    }
    for u in x.instructions() {
        if let Some(a) = u.basic() {
            if a.focus != ident("f") {
                return Err(TapeError::Program(FunitError::WrongFocus(a.focus.clone())));
            }
            if !interface.contains(&a.method) {
                return Err(TapeError::OutsideInterface(a.method.clone()));
            }
        }
    }
    Ok(())
}

/// The halting oracle's reply on the word right of the head, together with
/// the recursion depth, which equals the number of colons in the word: the
/// oracle recurses once per colon, level by level.
pub fn halting_reply_with_depth(word: &[TapeSym]) -> (bool, usize) {
    match first_colon(word) {
        None => (false, 0),
        Some(c) => {
            let prefix = &word[..c];
            let rest = &word[c + 1..];
            let (sub_reply, sub_depth) = halting_reply_with_depth(rest);
            let reply = match decode_program_syms(prefix) {
                Some(program)
                    if validate_in_language(&program, &BTreeSet::from([ident("halting")]))
                        .is_ok() =>
                {
                    converges_with_first_reply(&program, sub_reply)
                }
                _ => false,
            };
            (reply, 1 + sub_depth)
        }
    }
}

/// The halting oracle as a method operation: reply as above, the tape
/// always collapses to empty.
pub fn apply_halting(state: &TapeState) -> (bool, TapeState) {
    let (reply, _) = halting_reply_with_depth(&state.merged());
    (reply, TapeState::empty())
}

/// Decides convergence of a program over `{halting}` when the first oracle
/// application replies `first_reply` and every later one replies false
/// (the oracle empties the tape, and the empty tape always replies false).
/// Pure control-flow analysis over (position, before/after first call).
fn converges_with_first_reply(x: &InstrSeq, first_reply: bool) -> bool {
    let k = x.len();
    let mut visited = vec![[false; 2]; k + 1];
    let mut pos: usize = 1;
    let mut called = false;
    loop {
        if pos < 1 || pos > k {
            return false;
        }
        if visited[pos][called as usize] {
            return false;
        }
        visited[pos][called as usize] = true;
        match x.at(pos).expect("in range") {
            Instruction::HaltPos | Instruction::HaltNeg => return true,
            Instruction::Halt => unreachable!("strict programs"),
            Instruction::FwdJump(l) => match l.to_usize().filter(|l| *l > 0) {
                Some(l) => pos = pos.saturating_add(l),
                None => return false,
            },
            Instruction::BwdJump(l) => match l.to_usize().filter(|l| *l > 0 && *l < pos) {
                Some(l) => pos -= l,
                None => return false,
            },
            instr => {
                let reply = if called { false } else { first_reply };
                called = true;
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

/// Decides `x ⇓ f.H'(⌣w)` for `x` over the oracle interface: the
/// independent recursive decider.
pub fn decide_halting(x: &InstrSeq, word_right: &[TapeSym]) -> Result<bool, TapeError> {
    validate_in_language(x, &BTreeSet::from([ident("halting")]))?;
    let (first_reply, _) = halting_reply_with_depth(word_right);
    Ok(converges_with_first_reply(x, first_reply))
}

/// Decides the halting problem for dup-only programs. The duplication
/// operation always replies true, so convergence is state-independent:
/// plain and positive tests proceed to the next instruction, negative
/// tests skip one, and the rest is jump-chasing with cycle detection.
pub fn decide_halting_dup(x: &InstrSeq) -> Result<bool, TapeError> {
    validate_in_language(x, &BTreeSet::from([ident("dup")]))?;
    let k = x.len();
    let mut visited = vec![false; k + 1];
    let mut pos: usize = 1;
    loop {
        if pos < 1 || pos > k || visited[pos] {
            return Ok(false);
        }
        visited[pos] = true;
        match x.at(pos).expect("in range") {
            Instruction::HaltPos | Instruction::HaltNeg => return Ok(true),
            Instruction::Halt => unreachable!("strict programs"),
            Instruction::FwdJump(l) => match l.to_usize().filter(|l| *l > 0) {
                Some(l) => pos = pos.saturating_add(l),
                None => return Ok(false),
            },
            Instruction::BwdJump(l) => match l.to_usize().filter(|l| *l > 0 && *l < pos) {
                Some(l) => pos -= l,
                None => return Ok(false),
            },
            Instruction::Plain(_) | Instruction::PosTest(_) => pos += 1,
            Instruction::NegTest(_) => pos += 2,
        }
    }
}

/// Runs a strict program against the singleton family `f.H(state)`.
pub fn run_on_unit(
    x: &InstrSeq,
    h: &FunctionalUnit,
    state: &TapeState,
    budget: &Budget,
) -> Result<exec::ExecOutcome, TapeError> {
    let svc = unit_service(h, &UnitState::Tape(state.clone()))?;
    Ok(exec::run(&extract(x), &ServiceFamily::singleton_f(svc), budget))
}

/// Which halting-solution requirement a candidate violates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolutionCondition {
    /// The solver must converge on every state.
    Totality,
    /// The solver's reply must match convergence of the judged program.
    Correctness,
    /// A reflexive solver must belong to the judged language.
    Membership,
}

impl fmt::Display for SolutionCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionCondition::Totality => f.write_str("totality"),
            SolutionCondition::Correctness => f.write_str("correctness"),
            SolutionCondition::Membership => f.write_str("membership"),
        }
    }
}

/// A concrete, re-executable violation witness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolverWitness {
    /// The judged program, when the condition concerns one.
    pub program: Option<InstrSeq>,
    /// The state the solver was applied to.
    pub state: TapeState,
    pub solver_reply: Option<Reply>,
    pub subject_reply: Option<Reply>,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolverVerdict {
    Pass,
    Fail {
        condition: SolutionCondition,
        witness: SolverWitness,
    },
    /// A budget ran out; never reported as a pass.
    Inconclusive { detail: String },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolverReport {
    pub verdict: SolverVerdict,
    pub checked: usize,
}

impl SolverReport {
    pub fn passed(&self) -> bool {
        self.verdict == SolverVerdict::Pass
    }

    pub fn failed_condition(&self) -> Option<SolutionCondition> {
        match &self.verdict {
            SolverVerdict::Fail { condition, .. } => Some(*condition),
            _ => None,
        }
    }
}

/// Checks whether `x` produces a solution of the halting problem for
/// `L(interface)` with respect to `h`, on the given corpus: totality on
/// every sampled state, and the reply on `⌣ȳ:v` against an independent
/// execution of `y` on `⌣v`. With `reflexive`, `x` must itself belong to
/// `L(interface)`.
pub fn check_solution(
    x: &InstrSeq,
    interface: &BTreeSet<Ident>,
    h: &FunctionalUnit,
    corpus: &[(InstrSeq, Vec<TapeSym>)],
    budget: &Budget,
    reflexive: bool,
) -> Result<SolverReport, TapeError> {
    funits::validate_unit_program(x, h)?;
    if reflexive {
        if let Err(e) = validate_in_language(x, interface) {
            let detail = alloc::format!("solver is not in the judged language: {e}");
            return Ok(SolverReport {
                verdict: SolverVerdict::Fail {
                    condition: SolutionCondition::Membership,
                    witness: SolverWitness {
                        program: Some(x.clone()),
                        state: TapeState::empty(),
                        solver_reply: None,
                        subject_reply: None,
                        detail,
                    },
                },
                checked: 0,
            });
        }
    }
    let solver = extract(x);
    let mut checked = 0;
    for (y, v) in corpus {
        validate_in_language(y, interface)?;
        let mut judged: Vec<TapeSym> = encode_program_syms(y);
        judged.push(TapeSym::Colon);
        judged.extend(v.iter().copied());
        let judged_state = TapeState::from_right(judged);
        let plain_state = TapeState::from_right(v.clone());

        // Totality on both sampled states; keep the reply on the judged one.
        let mut solver_reply = Reply::D;
        for (idx, state) in [&judged_state, &plain_state].into_iter().enumerate() {
            let svc = unit_service(h, &UnitState::Tape(state.clone()))?;
            let out = exec::run(&solver, &ServiceFamily::singleton_f(svc), budget);
            match out.verdict {
                Verdict::Converged(_) => {
                    if idx == 0 {
                        solver_reply = out.reply().expect("converged run has a reply");
                    }
                }
                Verdict::Diverged(_) => {
                    return Ok(SolverReport {
                        verdict: SolverVerdict::Fail {
                            condition: SolutionCondition::Totality,
                            witness: SolverWitness {
                                program: Some(y.clone()),
                                state: state.clone(),
                                solver_reply: Some(Reply::D),
                                subject_reply: None,
                                detail: "solver diverges on a sampled state".to_string(),
                            },
                        },
                        checked,
                    })
                }
                Verdict::BudgetExhausted => {
                    return Ok(SolverReport {
                        verdict: SolverVerdict::Inconclusive {
                            detail: alloc::format!("solver run out of budget on {state}"),
                        },
                        checked,
                    })
                }
            }
        }

        // Independent execution of the judged program.
        let subject = run_on_unit(y, h, &TapeState::from_right(v.clone()), budget)?;
        let subject_converges = match subject.verdict {
            Verdict::Converged(_) => true,
            Verdict::Diverged(_) => false,
            Verdict::BudgetExhausted => {
                return Ok(SolverReport {
                    verdict: SolverVerdict::Inconclusive {
                        detail: alloc::format!("judged program run out of budget on |{}", render_word(v)),
                    },
                    checked,
                })
            }
        };
        if (solver_reply == Reply::T) != subject_converges {
            return Ok(SolverReport {
                verdict: SolverVerdict::Fail {
                    condition: SolutionCondition::Correctness,
                    witness: SolverWitness {
                        program: Some(y.clone()),
                        state: judged_state,
                        solver_reply: Some(solver_reply),
                        subject_reply: subject.reply(),
                        detail: alloc::format!(
                            "solver says {solver_reply}, judged program {}",
                            if subject_converges { "halts" } else { "diverges" }
                        ),
                    },
                },
                checked,
            });
        }
        checked += 1;
    }
    Ok(SolverReport {
        verdict: SolverVerdict::Pass,
        checked,
    })
}

fn render_word(word: &[TapeSym]) -> String {
    word.iter().map(|s| s.to_char()).collect()
}

/// `f.dup ; x`: the duplication prefix.
pub fn dup_prefixed(x: &InstrSeq) -> InstrSeq {
    let prefix = InstrSeq::new(
        Dialect::Pglbsbt,
        vec![Instruction::Plain(basic("f", "dup"))],
    )
    .expect("non-empty");
    InstrSeq::concat(&[prefix, x.clone()]).expect("uniform dialect")
}

/// The diagonal program `f.dup ; ftod(swap(x))`.
pub fn diagonal_program(x: &InstrSeq) -> InstrSeq {
    dup_prefixed(&x.swap().ftod())
}

/// The interpreter-theorem variant `f.dup ; swap(x)`.
pub fn interpreter_diagonal_program(x: &InstrSeq) -> InstrSeq {
    dup_prefixed(&x.swap())
}

/// Refutes a halting-solver candidate by the diagonal argument: builds
/// `y = f.dup ; ftod(swap(x))`, evaluates `x` on `⌣ȳ:ȳ` and `y` on `⌣ȳ`,
/// and reports the violated solution condition with both sides' values.
pub fn diagonal_refute(
    x: &InstrSeq,
    h: &FunctionalUnit,
    budget: &Budget,
) -> Result<SolverReport, TapeError> {
    funits::validate_unit_program(x, h)?;
    if !h.interface().contains(&ident("dup")) {
        return Err(TapeError::OutsideInterface(ident("dup")));
    }
    let y = diagonal_program(x);
    let y_code = encode_program_syms(&y);
    let mut doubled = y_code.clone();
    doubled.push(TapeSym::Colon);
    doubled.extend(y_code.iter().copied());
    let judged_state = TapeState::from_right(doubled);

    let solver_out = run_on_unit(x, h, &judged_state, budget)?;
    let solver_reply = match solver_out.verdict {
        Verdict::Converged(_) => solver_out.reply().expect("converged"),
        Verdict::Diverged(_) => {
            return Ok(SolverReport {
                verdict: SolverVerdict::Fail {
                    condition: SolutionCondition::Totality,
                    witness: SolverWitness {
                        program: Some(y),
                        state: judged_state,
                        solver_reply: Some(Reply::D),
                        subject_reply: None,
                        detail: "candidate diverges on the diagonal state".to_string(),
                    },
                },
                checked: 1,
            })
        }
        Verdict::BudgetExhausted => {
            return Ok(SolverReport {
                verdict: SolverVerdict::Inconclusive {
                    detail: "candidate run out of budget on the diagonal state".to_string(),
                },
                checked: 0,
            })
        }
    };

    let diag_state = TapeState::from_right(y_code);
    let subject_out = run_on_unit(&y, h, &diag_state, budget)?;
    let (subject_converges, subject_reply) = match subject_out.verdict {
        Verdict::Converged(_) => (true, subject_out.reply()),
        Verdict::Diverged(_) => (false, Some(Reply::D)),
        Verdict::BudgetExhausted => {
            return Ok(SolverReport {
                verdict: SolverVerdict::Inconclusive {
                    detail: "diagonal program run out of budget".to_string(),
                },
                checked: 0,
            })
        }
    };

    if (solver_reply == Reply::T) != subject_converges {
        Ok(SolverReport {
            verdict: SolverVerdict::Fail {
                condition: SolutionCondition::Correctness,
                witness: SolverWitness {
                    program: Some(y),
                    state: judged_state,
                    solver_reply: Some(solver_reply),
                    subject_reply,
                    detail: alloc::format!(
                        "candidate says {solver_reply} on its own diagonal, but the diagonal program {}",
                        if subject_converges { "halts" } else { "diverges" }
                    ),
                },
            },
            checked: 1,
        })
    } else {
        Ok(SolverReport {
            verdict: SolverVerdict::Inconclusive {
                detail: "no contradiction found; the candidate is not refuted".to_string(),
            },
            checked: 1,
        })
    }
}

/// Which interpreter requirement a candidate violates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InterpreterCondition {
    /// The interpreter must converge whenever the interpreted program does.
    Convergence,
    /// Apply views must coincide.
    ApplyAgreement,
    /// Replies must coincide.
    ReplyAgreement,
    /// A reflexive interpreter must belong to the interpreted language.
    Membership,
}

impl fmt::Display for InterpreterCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterpreterCondition::Convergence => f.write_str("convergence"),
            InterpreterCondition::ApplyAgreement => f.write_str("apply-agreement"),
            InterpreterCondition::ReplyAgreement => f.write_str("reply-agreement"),
            InterpreterCondition::Membership => f.write_str("membership"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InterpreterVerdict {
    Pass,
    Fail {
        condition: InterpreterCondition,
        witness: SolverWitness,
    },
    Inconclusive { detail: String },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InterpreterReport {
    pub verdict: InterpreterVerdict,
    /// Corpus items with an established convergent run.
    pub checked: usize,
}

/// Checks the interpreter conditions of `x` for `L(inner)` with respect to
/// `h` on the corpus: for items where `y` converges on `⌣v`, the candidate
/// must converge on `⌣ȳ:v` with the same apply and reply views.
pub fn check_interpreter(
    x: &InstrSeq,
    inner: &BTreeSet<Ident>,
    h: &FunctionalUnit,
    corpus: &[(InstrSeq, Vec<TapeSym>)],
    budget: &Budget,
    reflexive: bool,
) -> Result<InterpreterReport, TapeError> {
    funits::validate_unit_program(x, h)?;
    if reflexive {
        if let Err(e) = validate_in_language(x, inner) {
            return Ok(InterpreterReport {
                verdict: InterpreterVerdict::Fail {
                    condition: InterpreterCondition::Membership,
                    witness: SolverWitness {
                        program: Some(x.clone()),
                        state: TapeState::empty(),
                        solver_reply: None,
                        subject_reply: None,
                        detail: alloc::format!("interpreter not in the interpreted language: {e}"),
                    },
                },
                checked: 0,
            });
        }
    }
    let mut checked = 0;
    for (y, v) in corpus {
        validate_in_language(y, inner)?;
        let plain_state = TapeState::from_right(v.clone());
        let subject = run_on_unit(y, h, &plain_state, budget)?;
        match subject.verdict {
            Verdict::Converged(_) => {}
            Verdict::Diverged(_) => continue,
            Verdict::BudgetExhausted => {
                return Ok(InterpreterReport {
                    verdict: InterpreterVerdict::Inconclusive {
                        detail: alloc::format!(
                            "interpreted program run out of budget on |{}",
                            render_word(v)
                        ),
                    },
                    checked,
                })
            }
        }

        let mut coded: Vec<TapeSym> = encode_program_syms(y);
        coded.push(TapeSym::Colon);
        coded.extend(v.iter().copied());
        let coded_state = TapeState::from_right(coded);
        let candidate = run_on_unit(x, h, &coded_state, budget)?;
        match candidate.verdict {
            Verdict::Converged(_) => {}
            Verdict::Diverged(_) => {
                return Ok(InterpreterReport {
                    verdict: InterpreterVerdict::Fail {
                        condition: InterpreterCondition::Convergence,
                        witness: SolverWitness {
                            program: Some(y.clone()),
                            state: coded_state,
                            solver_reply: Some(Reply::D),
                            subject_reply: subject.reply(),
                            detail: "interpreter diverges on a convergent input".to_string(),
                        },
                    },
                    checked,
                })
            }
            Verdict::BudgetExhausted => {
                return Ok(InterpreterReport {
                    verdict: InterpreterVerdict::Inconclusive {
                        detail: "interpreter run out of budget".to_string(),
                    },
                    checked,
                })
            }
        }
        if candidate.reply() != subject.reply() {
            return Ok(InterpreterReport {
                verdict: InterpreterVerdict::Fail {
                    condition: InterpreterCondition::ReplyAgreement,
                    witness: SolverWitness {
                        program: Some(y.clone()),
                        state: coded_state,
                        solver_reply: candidate.reply(),
                        subject_reply: subject.reply(),
                        detail: "replies differ".to_string(),
                    },
                },
                checked,
            });
        }
        if candidate.final_family != subject.final_family {
            return Ok(InterpreterReport {
                verdict: InterpreterVerdict::Fail {
                    condition: InterpreterCondition::ApplyAgreement,
                    witness: SolverWitness {
                        program: Some(y.clone()),
                        state: coded_state,
                        solver_reply: candidate.reply(),
                        subject_reply: subject.reply(),
                        detail: "apply views differ".to_string(),
                    },
                },
                checked,
            });
        }
        checked += 1;
    }
    Ok(InterpreterReport {
        verdict: InterpreterVerdict::Pass,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tape(text: &str) -> TapeState {
        TapeState::parse(text).unwrap()
    }

    #[test]
    fn tape_literals_round_trip() {
        for text in ["|", "10|1:", "|101:11", "::|"] {
            assert_eq!(tape(text).to_string(), text);
        }
        assert!(TapeState::parse("101").is_err());
        assert!(TapeState::parse("1|0|1").is_err());
        assert!(TapeState::parse("1x|0").is_err());
    }

    #[test]
    fn dup_examples() {
        assert_eq!(apply_dup(&tape("|101")), (true, tape("|101:101")));
        assert_eq!(apply_dup(&tape("10|1")), (true, tape("|101:101")));
        assert_eq!(apply_dup(&tape("|01:11")), (true, tape("|01:01:11")));
        assert_eq!(apply_dup(&tape("|")), (true, tape("|:")));
    }

    #[test]
    fn encoding_examples() {
        let bang_t = crate::isa::sbt("!t");
        let bits: String = encode_program_bits(&bang_t)
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect();
        assert_eq!(bits, "0010000101110100");
        assert!(encode_program_syms(&bang_t).iter().all(|s| s.is_bit()));
        let decoded = decode_program_syms(&encode_program_syms(&bang_t)).unwrap();
        assert_eq!(decoded, bang_t);
        // Misaligned or non-canonical words do not decode.
        assert_eq!(decode_program_syms(&[TapeSym::One]), None);
    }

    #[test]
    fn encode_decode_round_trip_on_random_programs() {
        let mut rng = crate::gen::Rng::new(0xe2c0de);
        let cfg = crate::gen::ProgramCfg {
            dialect: Dialect::Pglbsbt,
            terminators: vec![Instruction::HaltPos, Instruction::HaltNeg],
            ..crate::gen::ProgramCfg::default()
        };
        for _ in 0..1000 {
            let p = crate::gen::random_program(&mut rng, &cfg);
            let syms = encode_program_syms(&p);
            assert!(syms.iter().all(|s| s.is_bit()));
            assert_eq!(decode_program_syms(&syms), Some(p.clone()), "{}", p.print());
        }
    }

    #[test]
    fn check_solution_rejects_foreign_methods() {
        let solver = crate::isa::sbt("+f.dup ; !t ; !f");
        let err = check_solution(
            &solver,
            &BTreeSet::from([ident("halting")]),
            &halting_oracle_unit(),
            &[],
            &Budget::exact(),
            false,
        );
        assert!(matches!(
            err,
            Err(TapeError::Program(FunitError::MethodOutsideInterface(_)))
        ));
    }

    #[test]
    fn halting_oracle_examples() {
        assert_eq!(apply_halting(&tape("|101")), (false, tape("|")));

        let mut word = encode_program_syms(&crate::isa::sbt("!t"));
        word.push(TapeSym::Colon);
        assert_eq!(
            apply_halting(&TapeState::from_right(word)),
            (true, tape("|"))
        );

        let mut word = encode_program_syms(&crate::isa::sbt("\\#1"));
        word.push(TapeSym::Colon);
        assert_eq!(
            apply_halting(&TapeState::from_right(word)),
            (false, tape("|"))
        );
    }

    #[test]
    fn oracle_depth_equals_colon_count() {
        let mut word = encode_program_syms(&crate::isa::sbt("+f.halting ; !t ; !f"));
        word.push(TapeSym::Colon);
        word.extend([TapeSym::One, TapeSym::Colon, TapeSym::Zero, TapeSym::Colon]);
        let colons = word.iter().filter(|s| **s == TapeSym::Colon).count();
        let (_, depth) = halting_reply_with_depth(&word);
        assert_eq!(depth, colons);
    }

    #[test]
    fn decide_halting_dup_examples() {
        assert_eq!(decide_halting_dup(&crate::isa::sbt("f.dup ; \\#1")), Ok(false));
        assert_eq!(decide_halting_dup(&crate::isa::sbt("+f.dup ; !t ; !f")), Ok(true));
        // The negative test skips over `!t` straight into `!f`: still a halt.
        assert_eq!(decide_halting_dup(&crate::isa::sbt("-f.dup ; !t ; !f")), Ok(true));
        assert_eq!(decide_halting_dup(&crate::isa::sbt("-f.dup ; !t ; #0")), Ok(false));
        assert!(decide_halting_dup(&crate::isa::sbt("f.halting")).is_err());
    }

    #[test]
    fn diagonal_program_shapes() {
        assert_eq!(diagonal_program(&crate::isa::sbt("!t")).print(), "f.dup ; #0");
        assert_eq!(diagonal_program(&crate::isa::sbt("!f")).print(), "f.dup ; !t");
        assert_eq!(
            diagonal_program(&crate::isa::sbt("+f.dup ; !t ; !f")).print(),
            "f.dup ; +f.dup ; #0 ; !t"
        );
        assert_eq!(
            interpreter_diagonal_program(&crate::isa::sbt("+f.dup ; !t ; !f")).print(),
            "f.dup ; +f.dup ; !f ; !t"
        );
    }

    #[test]
    fn diagonal_refutes_constant_solvers() {
        let budget = Budget::Fuel(100_000);
        for text in ["!t", "!f", "+f.dup ; !t ; !f"] {
            let report = diagonal_refute(&crate::isa::sbt(text), &dup_unit(), &budget).unwrap();
            assert_eq!(
                report.failed_condition(),
                Some(SolutionCondition::Correctness),
                "candidate `{text}`: {:?}",
                report.verdict
            );
        }
    }

    #[test]
    fn check_solution_detects_wrong_and_right_solvers() {
        let budget = Budget::exact();
        let oracle = halting_oracle_unit();
        let interface = BTreeSet::from([ident("halting")]);
        let corpus = vec![
            (crate::isa::sbt("!t"), vec![]),
            (crate::isa::sbt("\\#1"), vec![TapeSym::One]),
            (crate::isa::sbt("+f.halting ; !t ; \\#2"), vec![]),
        ];

        let solver = crate::isa::sbt("+f.halting ; !t ; !f");
        let report =
            check_solution(&solver, &interface, &oracle, &corpus, &budget, true).unwrap();
        assert!(report.passed(), "{:?}", report.verdict);
        assert_eq!(report.checked, corpus.len());

        // A constant solver claims the diverging program halts.
        let constant = crate::isa::sbt("!t");
        let report =
            check_solution(&constant, &interface, &oracle, &corpus, &budget, true).unwrap();
        assert_eq!(
            report.failed_condition(),
            Some(SolutionCondition::Correctness)
        );
    }

    #[test]
    fn check_interpreter_examples() {
        let budget = Budget::exact();
        let oracle = halting_oracle_unit();
        let interface = BTreeSet::from([ident("halting")]);
        let corpus = vec![(crate::isa::sbt("!t"), vec![TapeSym::One])];

        // The solver agrees in reply but not in apply view: `!t` leaves the
        // tape untouched while the oracle call empties it.
        let candidate = crate::isa::sbt("+f.halting ; !t ; !f");
        let report =
            check_interpreter(&candidate, &interface, &oracle, &corpus, &budget, true).unwrap();
        assert!(matches!(
            report.verdict,
            InterpreterVerdict::Fail {
                condition: InterpreterCondition::ApplyAgreement,
                ..
            }
        ));

        // A wrong-reply candidate fails the reply agreement first.
        let wrong = crate::isa::sbt("!f");
        let report =
            check_interpreter(&wrong, &interface, &oracle, &corpus, &budget, true).unwrap();
        assert!(matches!(
            report.verdict,
            InterpreterVerdict::Fail {
                condition: InterpreterCondition::ReplyAgreement,
                ..
            }
        ));
    }
}
