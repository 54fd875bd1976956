//! Deterministic generators for random programs, threads, families and
//! units. Used by the property suites and the experiment harness; seeded,
//! so every run is reproducible.

use alloc::vec;
use alloc::vec::Vec;

use crate::funits::{FiniteOp, FiniteUnit, FunctionalUnit, UnitKind};
use crate::isa::{basic, ident, BasicInstruction, Dialect, Ident, InstrSeq, Instruction, Natural};
use crate::services::{Service, ServiceFamily};
use crate::tape::{TapeState, TapeSym};
use crate::threads::{RegularThread, ThreadBuilder, ThreadNode};

/// Splitmix64: small, fast, portable. Not cryptographic; only determinism
/// and distribution matter here.
#[derive(Clone, Debug)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// True with probability `num/den`.
    pub fn chance(&mut self, num: usize, den: usize) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

/// Shape of randomly generated programs.
#[derive(Clone, Debug)]
pub struct ProgramCfg {
    pub dialect: Dialect,
    pub min_len: usize,
    pub max_len: usize,
    /// Basic instructions to draw from.
    pub actions: Vec<BasicInstruction>,
    /// Terminators to draw from; defaults to all allowed by the dialect.
    pub terminators: Vec<Instruction>,
    /// Largest jump offset generated.
    pub max_jump: usize,
}

impl Default for ProgramCfg {
    fn default() -> Self {
        ProgramCfg {
            dialect: Dialect::Pglbbt,
            min_len: 1,
            max_len: 10,
            actions: vec![basic("f", "m"), basic("f", "get"), basic("g", "set_t")],
            terminators: vec![
                Instruction::Halt,
                Instruction::HaltPos,
                Instruction::HaltNeg,
            ],
            max_jump: 12,
        }
    }
}

impl ProgramCfg {
    pub fn strict_over(actions: Vec<BasicInstruction>) -> Self {
        ProgramCfg {
            dialect: Dialect::Pglbsbt,
            actions,
            terminators: vec![Instruction::HaltPos, Instruction::HaltNeg],
            ..ProgramCfg::default()
        }
    }

    /// Programs over a single focus `f` and the given method names.
    pub fn strict_unit_programs(methods: &[Ident]) -> Self {
        let actions = methods
            .iter()
            .map(|m| BasicInstruction::new(ident("f"), m.clone()))
            .collect();
        Self::strict_over(actions)
    }
}

pub fn random_program(rng: &mut Rng, cfg: &ProgramCfg) -> InstrSeq {
    let len = rng.range(cfg.min_len, cfg.max_len);
    let mut instructions = Vec::with_capacity(len);
    let terminators: Vec<Instruction> = cfg
        .terminators
        .iter()
        .filter(|t| !(cfg.dialect == Dialect::Pglbsbt && **t == Instruction::Halt))
        .cloned()
        .collect();
    for _ in 0..len {
        let choice = rng.below(10);
        let instr = match choice {
            0..=4 if !cfg.actions.is_empty() => {
                let a = rng.pick(&cfg.actions).clone();
                match rng.below(3) {
                    0 => Instruction::Plain(a),
                    1 => Instruction::PosTest(a),
                    _ => Instruction::NegTest(a),
                }
            }
            5 | 6 => Instruction::FwdJump(Natural::from(rng.below(cfg.max_jump + 1))),
            7 => Instruction::BwdJump(Natural::from(rng.below(cfg.max_jump + 1))),
            _ => rng.pick(&terminators).clone(),
        };
        instructions.push(instr);
    }
    InstrSeq::new(cfg.dialect, instructions).expect("generated program is valid")
}

/// Random regular thread graph with at most `max_nodes` nodes drawing
/// actions from `actions`.
pub fn random_thread(rng: &mut Rng, actions: &[BasicInstruction], max_nodes: usize) -> RegularThread {
    random_thread_impl(rng, actions, max_nodes, true)
}

/// As [`random_thread`], but without τ nodes.
pub fn random_thread_tau_free(
    rng: &mut Rng,
    actions: &[BasicInstruction],
    max_nodes: usize,
) -> RegularThread {
    random_thread_impl(rng, actions, max_nodes, false)
}

fn random_thread_impl(
    rng: &mut Rng,
    actions: &[BasicInstruction],
    max_nodes: usize,
    allow_tau: bool,
) -> RegularThread {
    let n = rng.range(1, max_nodes.max(1));
    let mut b = ThreadBuilder::new();
    // Reserve ids 0..n, then fill each slot; successors point anywhere,
    // which freely creates shared subgraphs and cycles.
    let ids: Vec<_> = (0..n).map(|_| b.reserve()).collect();
    for &id in &ids {
        let node = match rng.below(10) {
            0 => ThreadNode::Dead,
            1 => ThreadNode::Stop,
            2 => ThreadNode::StopPos,
            3 => ThreadNode::StopNeg,
            4 if allow_tau => ThreadNode::Tau(ids[rng.below(n)]),
            _ => ThreadNode::Post {
                action: rng.pick(actions).clone(),
                on_true: ids[rng.below(n)],
                on_false: ids[rng.below(n)],
            },
        };
        b.fill(id, node);
    }
    b.finish(ids[0])
}

/// Random finite unit: `states` states, method names `m0..`, total tables.
pub fn random_finite_unit(rng: &mut Rng, max_states: u8, max_ops: usize) -> FunctionalUnit {
    let size = rng.range(1, max_states as usize) as u8;
    let nops = rng.range(0, max_ops);
    let mut unit = FiniteUnit::new(size);
    for i in 0..nops {
        let table: Vec<(bool, u8)> = (0..size)
            .map(|_| (rng.bool(), rng.below(size as usize) as u8))
            .collect();
        unit.insert(ident(&alloc::format!("m{i}")), FiniteOp::new(table));
    }
    FunctionalUnit::new(UnitKind::Finite(unit))
}

/// Random service family over foci `f`, `g`, `h`: Boolean registers and
/// small finite units.
pub fn random_family(rng: &mut Rng, max_entries: usize) -> ServiceFamily {
    let mut fam = ServiceFamily::empty();
    let foci = [ident("f"), ident("g"), ident("h")];
    let n = rng.range(0, max_entries.min(foci.len()));
    for focus in foci.iter().take(n) {
        let svc = match rng.below(4) {
            0 => Service::Empty,
            1 | 2 => Service::boolean_register(rng.bool()),
            _ => {
                let unit = random_finite_unit(rng, 3, 3);
                let state = unit.default_state();
                crate::funits::unit_service(&unit, &state).expect("default state is in space")
            }
        };
        fam = fam.compose(&ServiceFamily::singleton(focus.clone(), svc));
    }
    fam
}

/// Random bit string as tape symbols.
pub fn random_bits(rng: &mut Rng, max_len: usize) -> Vec<TapeSym> {
    let len = rng.range(0, max_len);
    (0..len)
        .map(|_| {
            if rng.bool() {
                TapeSym::One
            } else {
                TapeSym::Zero
            }
        })
        .collect()
}

/// Random tape word over `{0,1,:}`.
pub fn random_tape_word(rng: &mut Rng, max_len: usize) -> Vec<TapeSym> {
    let len = rng.range(0, max_len);
    (0..len)
        .map(|_| match rng.below(5) {
            0 => TapeSym::Colon,
            1 | 2 => TapeSym::One,
            _ => TapeSym::Zero,
        })
        .collect()
}

pub fn random_tape_state(rng: &mut Rng, max_len: usize) -> TapeState {
    TapeState::new(random_tape_word(rng, max_len), random_tape_word(rng, max_len))
}

/// Random strict program over the duplication interface.
pub fn random_dup_program(rng: &mut Rng) -> InstrSeq {
    let cfg = ProgramCfg {
        max_jump: 8,
        ..ProgramCfg::strict_unit_programs(&[ident("dup")])
    };
    random_program(rng, &cfg)
}

/// Random dup-only program that halts on every state (convergence of
/// dup-only programs is state-independent).
pub fn random_total_dup_program(rng: &mut Rng) -> InstrSeq {
    loop {
        let p = random_dup_program(rng);
        if crate::tape::decide_halting_dup(&p) == Ok(true) {
            return p;
        }
    }
}

/// Random program in the positive-test normal form `u1 ; .. ; uk ; !t ; !f`
/// over a single focus `f` and the given methods.
pub fn random_normal_form(rng: &mut Rng, methods: &[Ident], max_body: usize) -> InstrSeq {
    let body_len = rng.range(0, max_body);
    let mut instructions = Vec::with_capacity(body_len + 2);
    for _ in 0..body_len {
        let instr = if !methods.is_empty() && rng.chance(3, 5) {
            Instruction::PosTest(BasicInstruction::new(
                ident("f"),
                rng.pick(methods).clone(),
            ))
        } else if rng.chance(4, 5) {
            Instruction::FwdJump(Natural::from(rng.below(body_len + 3)))
        } else {
            Instruction::BwdJump(Natural::from(rng.below(body_len + 1)))
        };
        instructions.push(instr);
    }
    instructions.push(Instruction::HaltPos);
    instructions.push(Instruction::HaltNeg);
    InstrSeq::new(Dialect::Pglbsbt, instructions).expect("normal form is valid")
}
