//! The instruction sequence processing operators: `use` (residual thread),
//! `apply` (residual service family), `reply` (delivered value), plus the
//! run loop with convergence analysis.
//!
//! Divergence detection is exact for finite-state services: the run tracks
//! visited (thread node, family) pairs. Infinite-state services fall back
//! to a step cap, reported as a distinct budget-exhausted verdict.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::isa::{BasicInstruction, Ident};
use crate::services::{ServiceFamily, ServiceReply};
use crate::threads::{equal, NodeId, RegularThread, ThreadBuilder, ThreadNode};

/// Reply delivered by processing: Boolean, meaningless (termination without
/// a value), or divergent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reply {
    T,
    F,
    M,
    D,
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reply::T => f.write_str("T"),
            Reply::F => f.write_str("F"),
            Reply::M => f.write_str("M"),
            Reply::D => f.write_str("D"),
        }
    }
}

/// Step limit for a run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Budget {
    /// Detect repeated (thread node, family) pairs; complete for
    /// finite-state services. The cap still bounds runaway state growth.
    Exact { cap: u64 },
    /// Plain step limit, no cycle detection.
    Fuel(u64),
}

pub const DEFAULT_FUEL: u64 = 1_000_000;

impl Budget {
    pub fn exact() -> Self {
        Budget::Exact { cap: DEFAULT_FUEL }
    }

    pub fn cap(&self) -> u64 {
        match self {
            Budget::Exact { cap } => *cap,
            Budget::Fuel(n) => *n,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::Fuel(DEFAULT_FUEL)
    }
}

/// Why a run got stuck without terminating.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DeadlockKind {
    /// The thread reached inaction.
    DeadNode,
    /// The action's focus names no service in the family.
    MissingFocus(BasicInstruction),
    /// The named service rejected the method.
    BlockedService(BasicInstruction),
}

impl fmt::Display for DeadlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeadlockKind::DeadNode => f.write_str("inaction"),
            DeadlockKind::MissingFocus(a) => write!(f, "no service named `{}`", a.focus),
            DeadlockKind::BlockedService(a) => write!(f, "service blocked on `{a}`"),
        }
    }
}

/// Evidence of divergence: a deadlock site, or a repeated configuration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DivergenceWitness {
    Deadlock(DeadlockKind),
    Cycle { node: NodeId },
}

impl fmt::Display for DivergenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceWitness::Deadlock(kind) => write!(f, "deadlock: {kind}"),
            DivergenceWitness::Cycle { node } => {
                write!(f, "cycle: repeated configuration at node {node}")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// The thread terminated; the reply is T, F or M.
    Converged(Reply),
    Diverged(DivergenceWitness),
    BudgetExhausted,
}

/// One entry of a step log: the consumed action (`None` for τ), the reply,
/// and the family afterwards.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub action: Option<BasicInstruction>,
    pub reply: Option<bool>,
    pub family: ServiceFamily,
}

/// Verdict of processing a thread against a family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExecOutcome {
    pub verdict: Verdict,
    /// Present iff the run converged.
    pub final_family: Option<ServiceFamily>,
    pub steps: u64,
    pub trace: Option<Vec<TraceStep>>,
}

impl ExecOutcome {
    /// The delivered reply; `None` while the budget is exhausted.
    pub fn reply(&self) -> Option<Reply> {
        match &self.verdict {
            Verdict::Converged(r) => Some(*r),
            Verdict::Diverged(_) => Some(Reply::D),
            Verdict::BudgetExhausted => None,
        }
    }

    /// The apply view: final family on convergence, the empty family on
    /// divergence, unknown while the budget is exhausted.
    pub fn apply_view(&self) -> Option<ServiceFamily> {
        match &self.verdict {
            Verdict::Converged(_) => self.final_family.clone(),
            Verdict::Diverged(_) => Some(ServiceFamily::empty()),
            Verdict::BudgetExhausted => None,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self.verdict, Verdict::Converged(_))
    }
}

/// Result of one processing step from a `Tau` or `Post` node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepOutcome {
    Moved {
        next: NodeId,
        family: ServiceFamily,
        action: Option<BasicInstruction>,
        reply: Option<bool>,
    },
    Stuck(DeadlockKind),
}

/// Performs one step from `node`. `None` if the node is a leaf.
pub fn step(t: &RegularThread, node: NodeId, u: &ServiceFamily) -> Option<StepOutcome> {
    match t.node(node) {
        ThreadNode::Tau(next) => Some(StepOutcome::Moved {
            next: *next,
            family: u.clone(),
            action: None,
            reply: None,
        }),
        ThreadNode::Post {
            action,
            on_true,
            on_false,
        } => {
            let svc = match u.get(&action.focus) {
                Some(svc) => svc,
                None => return Some(StepOutcome::Stuck(DeadlockKind::MissingFocus(action.clone()))),
            };
            match svc.process(&action.method) {
                (ServiceReply::True, next_svc) => Some(StepOutcome::Moved {
                    next: *on_true,
                    family: u.with_entry(action.focus.clone(), next_svc),
                    action: Some(action.clone()),
                    reply: Some(true),
                }),
                (ServiceReply::False, next_svc) => Some(StepOutcome::Moved {
                    next: *on_false,
                    family: u.with_entry(action.focus.clone(), next_svc),
                    action: Some(action.clone()),
                    reply: Some(false),
                }),
                (ServiceReply::Blocked, _) => {
                    Some(StepOutcome::Stuck(DeadlockKind::BlockedService(action.clone())))
                }
            }
        }
        _ => None,
    }
}

/// Processes `t` against `u` to completion, divergence, or budget
/// exhaustion.
pub fn run(t: &RegularThread, u: &ServiceFamily, budget: &Budget) -> ExecOutcome {
    run_with_trace(t, u, budget, false)
}

pub fn run_with_trace(
    t: &RegularThread,
    u: &ServiceFamily,
    budget: &Budget,
    want_trace: bool,
) -> ExecOutcome {
    let mut node = t.root();
    let mut family = u.clone();
    let mut steps: u64 = 0;
    let mut trace: Option<Vec<TraceStep>> = if want_trace { Some(Vec::new()) } else { None };
    let mut visited: BTreeSet<(NodeId, ServiceFamily)> = BTreeSet::new();
    let exact = matches!(budget, Budget::Exact { .. });
    let cap = budget.cap();

    loop {
        match t.node(node) {
            ThreadNode::StopPos => {
                return ExecOutcome {
                    verdict: Verdict::Converged(Reply::T),
                    final_family: Some(family),
                    steps,
                    trace,
                }
            }
            ThreadNode::StopNeg => {
                return ExecOutcome {
                    verdict: Verdict::Converged(Reply::F),
                    final_family: Some(family),
                    steps,
                    trace,
                }
            }
            ThreadNode::Stop => {
                return ExecOutcome {
                    verdict: Verdict::Converged(Reply::M),
                    final_family: Some(family),
                    steps,
                    trace,
                }
            }
            ThreadNode::Dead => {
                return ExecOutcome {
                    verdict: Verdict::Diverged(DivergenceWitness::Deadlock(DeadlockKind::DeadNode)),
                    final_family: None,
                    steps,
                    trace,
                }
            }
            _ => {}
        }
        if exact && !visited.insert((node, family.clone())) {
            return ExecOutcome {
                verdict: Verdict::Diverged(DivergenceWitness::Cycle { node }),
                final_family: None,
                steps,
                trace,
            };
        }
        if steps >= cap {
            return ExecOutcome {
                verdict: Verdict::BudgetExhausted,
                final_family: None,
                steps,
                trace,
            };
        }
        match step(t, node, &family).expect("non-leaf node steps") {
            StepOutcome::Moved {
                next,
                family: next_family,
                action,
                reply,
            } => {
                if let Some(log) = trace.as_mut() {
                    log.push(TraceStep {
                        action,
                        reply,
                        family: next_family.clone(),
                    });
                }
                node = next;
                family = next_family;
                steps += 1;
            }
            StepOutcome::Stuck(kind) => {
                return ExecOutcome {
                    verdict: Verdict::Diverged(DivergenceWitness::Deadlock(kind)),
                    final_family: None,
                    steps,
                    trace,
                }
            }
        }
    }
}

/// Errors of the product constructions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExecError {
    /// The (thread node, family state) product exceeded the configured
    /// bound.
    StateSpaceTooLarge,
    /// The two families must have disjoint foci.
    DisjointFociRequired,
}

impl fmt::Display for ExecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecError::StateSpaceTooLarge => f.write_str("state space product too large"),
            ExecError::DisjointFociRequired => f.write_str("families must have disjoint foci"),
        }
    }
}

impl core::error::Error for ExecError {}

pub const DEFAULT_PRODUCT_BOUND: usize = 100_000;

/// The residual thread `t / u`: processed actions leave a τ trace, blocked
/// processing becomes inaction, actions with foci outside `u` remain.
/// Computed as a product over (thread node, family state); fails if the
/// product exceeds `max_product` configurations.
pub fn use_thread(
    t: &RegularThread,
    u: &ServiceFamily,
    max_product: usize,
) -> Result<RegularThread, ExecError> {
    let mut builder = ThreadBuilder::new();
    let mut ids: BTreeMap<(NodeId, ServiceFamily), NodeId> = BTreeMap::new();
    let mut queue: VecDeque<(NodeId, ServiceFamily)> = VecDeque::new();

    fn id_for(
        builder: &mut ThreadBuilder,
        ids: &mut BTreeMap<(NodeId, ServiceFamily), NodeId>,
        queue: &mut VecDeque<(NodeId, ServiceFamily)>,
        cfg: (NodeId, ServiceFamily),
    ) -> NodeId {
        if let Some(&id) = ids.get(&cfg) {
            return id;
        }
        let id = builder.reserve();
        ids.insert(cfg.clone(), id);
        queue.push_back(cfg);
        id
    }

    let root = id_for(&mut builder, &mut ids, &mut queue, (t.root(), u.clone()));
    while let Some((node, family)) = queue.pop_front() {
        if ids.len() > max_product {
            return Err(ExecError::StateSpaceTooLarge);
        }
        let id = ids[&(node, family.clone())];
        let filled = match t.node(node) {
            ThreadNode::Dead => ThreadNode::Dead,
            ThreadNode::Stop => ThreadNode::Stop,
            ThreadNode::StopPos => ThreadNode::StopPos,
            ThreadNode::StopNeg => ThreadNode::StopNeg,
            ThreadNode::Tau(next) => ThreadNode::Tau(id_for(
                &mut builder,
                &mut ids,
                &mut queue,
                (*next, family.clone()),
            )),
            ThreadNode::Post {
                action,
                on_true,
                on_false,
            } => {
                if let Some(svc) = family.get(&action.focus) {
                    match svc.process(&action.method) {
                        (ServiceReply::True, next_svc) => {
                            let fam = family.with_entry(action.focus.clone(), next_svc);
                            ThreadNode::Tau(id_for(
                                &mut builder,
                                &mut ids,
                                &mut queue,
                                (*on_true, fam),
                            ))
                        }
                        (ServiceReply::False, next_svc) => {
                            let fam = family.with_entry(action.focus.clone(), next_svc);
                            ThreadNode::Tau(id_for(
                                &mut builder,
                                &mut ids,
                                &mut queue,
                                (*on_false, fam),
                            ))
                        }
                        (ServiceReply::Blocked, _) => ThreadNode::Dead,
                    }
                } else {
                    ThreadNode::Post {
                        action: action.clone(),
                        on_true: id_for(
                            &mut builder,
                            &mut ids,
                            &mut queue,
                            (*on_true, family.clone()),
                        ),
                        on_false: id_for(
                            &mut builder,
                            &mut ids,
                            &mut queue,
                            (*on_false, family.clone()),
                        ),
                    }
                }
            }
        };
        builder.fill(id, filled);
    }
    Ok(builder.finish(root))
}

enum Chased {
    /// Stable configuration: leaf, τ node, or an unprocessed action.
    At(NodeId, ServiceFamily),
    /// Blocked processing or a silent processing loop.
    Dead,
}

/// The abstracting residual thread `t // u`: as `use_thread` but processed
/// actions leave no trace. A cycle of silently processed actions has no
/// first visible action and is inaction.
pub fn abstracting_use(
    t: &RegularThread,
    u: &ServiceFamily,
    max_product: usize,
) -> Result<RegularThread, ExecError> {
    let chase = |start_node: NodeId, start_family: ServiceFamily| -> Result<Chased, ExecError> {
        let mut node = start_node;
        let mut family = start_family;
        let mut seen: BTreeSet<(NodeId, ServiceFamily)> = BTreeSet::new();
        loop {
            match t.node(node) {
                ThreadNode::Post {
                    action,
                    on_true,
                    on_false,
                } if family.get(&action.focus).is_some() => {
                    if seen.len() > max_product {
                        return Err(ExecError::StateSpaceTooLarge);
                    }
                    if !seen.insert((node, family.clone())) {
                        return Ok(Chased::Dead);
                    }
                    let svc = family.get(&action.focus).expect("checked above");
                    match svc.process(&action.method) {
                        (ServiceReply::True, next_svc) => {
                            family = family.with_entry(action.focus.clone(), next_svc);
                            node = *on_true;
                        }
                        (ServiceReply::False, next_svc) => {
                            family = family.with_entry(action.focus.clone(), next_svc);
                            node = *on_false;
                        }
                        (ServiceReply::Blocked, _) => return Ok(Chased::Dead),
                    }
                }
                _ => return Ok(Chased::At(node, family)),
            }
        }
    };

    let mut builder = ThreadBuilder::new();
    let mut ids: BTreeMap<(NodeId, ServiceFamily), NodeId> = BTreeMap::new();
    let mut queue: VecDeque<(NodeId, ServiceFamily)> = VecDeque::new();
    let mut dead_id: Option<NodeId> = None;

    // Allocation goes through the chase: every stored configuration is
    // stable.
    let id_for = |builder: &mut ThreadBuilder,
                      queue: &mut VecDeque<(NodeId, ServiceFamily)>,
                      ids: &mut BTreeMap<(NodeId, ServiceFamily), NodeId>,
                      dead_id: &mut Option<NodeId>,
                      chased: Chased|
     -> NodeId {
        match chased {
            Chased::Dead => *dead_id.get_or_insert_with(|| builder.push(ThreadNode::Dead)),
            Chased::At(node, family) => {
                let cfg = (node, family);
                if let Some(&id) = ids.get(&cfg) {
                    return id;
                }
                let id = builder.reserve();
                ids.insert(cfg.clone(), id);
                queue.push_back(cfg);
                id
            }
        }
    };

    let root_chased = chase(t.root(), u.clone())?;
    let root = id_for(
        &mut builder,
        &mut queue,
        &mut ids,
        &mut dead_id,
        root_chased,
    );
    while let Some((node, family)) = queue.pop_front() {
        if ids.len() > max_product {
            return Err(ExecError::StateSpaceTooLarge);
        }
        let id = ids[&(node, family.clone())];
        let filled = match t.node(node) {
            ThreadNode::Dead => ThreadNode::Dead,
            ThreadNode::Stop => ThreadNode::Stop,
            ThreadNode::StopPos => ThreadNode::StopPos,
            ThreadNode::StopNeg => ThreadNode::StopNeg,
            ThreadNode::Tau(next) => {
                let chased = chase(*next, family.clone())?;
                ThreadNode::Tau(id_for(
                    &mut builder,
                    &mut queue,
                    &mut ids,
                    &mut dead_id,
                    chased,
                ))
            }
            ThreadNode::Post {
                action,
                on_true,
                on_false,
            } => {
                debug_assert!(family.get(&action.focus).is_none(), "stable config");
                let chased_t = chase(*on_true, family.clone())?;
                let chased_f = chase(*on_false, family.clone())?;
                ThreadNode::Post {
                    action: action.clone(),
                    on_true: id_for(&mut builder, &mut queue, &mut ids, &mut dead_id, chased_t),
                    on_false: id_for(&mut builder, &mut queue, &mut ids, &mut dead_id, chased_f),
                }
            }
        };
        builder.fill(id, filled);
    }
    Ok(builder.finish(root))
}

/// Contracts every τ node: chains collapse, τ cycles become inaction.
pub fn contract_taus(t: &RegularThread) -> RegularThread {
    let resolve = |start: NodeId| -> Option<NodeId> {
        let mut node = start;
        let mut seen = BTreeSet::new();
        loop {
            match t.node(node) {
                ThreadNode::Tau(next) => {
                    if !seen.insert(node) {
                        return None;
                    }
                    node = *next;
                }
                _ => return Some(node),
            }
        }
    };

    let mut builder = ThreadBuilder::new();
    let mut ids: BTreeMap<Option<NodeId>, NodeId> = BTreeMap::new();
    let mut queue: VecDeque<NodeId> = VecDeque::new();

    fn id_for(
        builder: &mut ThreadBuilder,
        queue: &mut VecDeque<NodeId>,
        ids: &mut BTreeMap<Option<NodeId>, NodeId>,
        target: Option<NodeId>,
    ) -> NodeId {
        if let Some(&id) = ids.get(&target) {
            return id;
        }
        let id = builder.reserve();
        ids.insert(target, id);
        if let Some(n) = target {
            queue.push_back(n);
        }
        id
    }

    let root = id_for(&mut builder, &mut queue, &mut ids, resolve(t.root()));
    while let Some(node) = queue.pop_front() {
        let id = ids[&Some(node)];
        let filled = match t.node(node) {
            ThreadNode::Dead => ThreadNode::Dead,
            ThreadNode::Stop => ThreadNode::Stop,
            ThreadNode::StopPos => ThreadNode::StopPos,
            ThreadNode::StopNeg => ThreadNode::StopNeg,
            ThreadNode::Tau(_) => unreachable!("resolved configurations are not τ nodes"),
            ThreadNode::Post {
                action,
                on_true,
                on_false,
            } => ThreadNode::Post {
                action: action.clone(),
                on_true: id_for(&mut builder, &mut queue, &mut ids, resolve(*on_true)),
                on_false: id_for(&mut builder, &mut queue, &mut ids, resolve(*on_false)),
            },
        };
        builder.fill(id, filled);
    }
    // τ cycles resolved to `None`; that configuration is inaction.
    if let Some(&id) = ids.get(&None) {
        builder.fill(id, ThreadNode::Dead);
    }
    builder.finish(root)
}

/// Report of checking the three interaction equations between `use`,
/// `apply`, `reply` and family composition on one instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IspoOutcome {
    Pass,
    Fail { equation: u8, detail: String },
    Inconclusive { equation: u8 },
}

/// Checks, for disjoint-foci `u` and `v`:
/// 1. `t / (u ⊕ v) = (t / u) / v`
/// 2. `t ! (u ⊕ v) = (t / u) ! v`
/// 3. `∂_{foci(u)}(t • (u ⊕ v)) = (t / u) • v`
pub fn check_ispo(
    t: &RegularThread,
    u: &ServiceFamily,
    v: &ServiceFamily,
    budget: &Budget,
    max_product: usize,
) -> Result<IspoOutcome, ExecError> {
    let u_foci = u.foci();
    if !u_foci.is_disjoint(&v.foci()) {
        return Err(ExecError::DisjointFociRequired);
    }
    let uv = u.compose(v);
    let t_u = use_thread(t, u, max_product)?;

    let lhs1 = use_thread(t, &uv, max_product)?;
    let rhs1 = use_thread(&t_u, v, max_product)?;
    if !equal(&lhs1, &rhs1) {
        return Ok(IspoOutcome::Fail {
            equation: 1,
            detail: String::from("use over the composition differs from iterated use"),
        });
    }

    let lhs2 = run(t, &uv, budget);
    let rhs2 = run(&t_u, v, budget);
    match (lhs2.reply(), rhs2.reply()) {
        (Some(a), Some(b)) if a == b => {}
        (None, _) | (_, None) => return Ok(IspoOutcome::Inconclusive { equation: 2 }),
        (Some(a), Some(b)) => {
            return Ok(IspoOutcome::Fail {
                equation: 2,
                detail: alloc::format!("reply mismatch: {a} vs {b}"),
            })
        }
    }

    match (lhs2.apply_view(), rhs2.apply_view()) {
        (Some(a), Some(b)) => {
            let hidden: BTreeSet<Ident> = u_foci;
            if a.encapsulate(&hidden) != b {
                return Ok(IspoOutcome::Fail {
                    equation: 3,
                    detail: String::from("apply views differ after encapsulation"),
                });
            }
        }
        _ => return Ok(IspoOutcome::Inconclusive { equation: 3 }),
    }
    Ok(IspoOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::{basic, ident, sbt};
    use crate::services::Service;
    use crate::threads::extract;

    fn br_family(focus: &str, content: bool) -> ServiceFamily {
        ServiceFamily::singleton(ident(focus), Service::boolean_register(content))
    }

    #[test]
    fn step_selects_branch_by_reply() {
        let t = RegularThread::post(
            basic("f", "get"),
            &RegularThread::stop_pos(),
            &RegularThread::stop_neg(),
        );
        let fam = br_family("f", false);
        match step(&t, t.root(), &fam).unwrap() {
            StepOutcome::Moved {
                next,
                family,
                action,
                reply,
            } => {
                assert!(matches!(t.node(next), ThreadNode::StopNeg));
                assert_eq!(family, fam);
                assert_eq!(action, Some(basic("f", "get")));
                assert_eq!(reply, Some(false));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_missing_focus_is_deadlock() {
        let t = RegularThread::post(
            basic("g", "m"),
            &RegularThread::stop_pos(),
            &RegularThread::stop_neg(),
        );
        let out = step(&t, t.root(), &br_family("f", true)).unwrap();
        assert_eq!(
            out,
            StepOutcome::Stuck(DeadlockKind::MissingFocus(basic("g", "m")))
        );
    }

    #[test]
    fn step_tau_consumes_no_family_change() {
        let t = RegularThread::tau(&RegularThread::stop_pos());
        let fam = br_family("f", true);
        match step(&t, t.root(), &fam).unwrap() {
            StepOutcome::Moved {
                family,
                action,
                reply,
                ..
            } => {
                assert_eq!(family, fam);
                assert_eq!(action, None);
                assert_eq!(reply, None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn run_examples() {
        let out = run(&extract(&sbt("!t")), &ServiceFamily::empty(), &Budget::exact());
        assert_eq!(out.verdict, Verdict::Converged(Reply::T));
        assert_eq!(out.final_family, Some(ServiceFamily::empty()));

        let out = run(&extract(&sbt("+g.m ; !t ; !f")), &br_family("f", true), &Budget::exact());
        assert!(matches!(out.verdict, Verdict::Diverged(_)));
        assert_eq!(out.apply_view(), Some(ServiceFamily::empty()));

        let out = run(&extract(&sbt("f.set_t ; \\#1")), &br_family("f", false), &Budget::exact());
        match out.verdict {
            Verdict::Diverged(DivergenceWitness::Cycle { .. }) => {}
            other => panic!("expected a cycle, got {other:?}"),
        }

        let out = run(&extract(&sbt("+f.get ; !t ; !f")), &br_family("f", false), &Budget::exact());
        assert_eq!(out.verdict, Verdict::Converged(Reply::F));
        assert_eq!(out.final_family, Some(br_family("f", false)));
    }

    #[test]
    fn plain_termination_reply_is_meaningless() {
        let out = run(
            &extract(&crate::isa::bt("!")),
            &br_family("f", true),
            &Budget::exact(),
        );
        assert_eq!(out.verdict, Verdict::Converged(Reply::M));
        assert_eq!(out.final_family, Some(br_family("f", true)));
    }

    #[test]
    fn fuel_exhaustion_is_distinct() {
        let out = run(&extract(&sbt("f.set_t ; \\#1")), &br_family("f", false), &Budget::Fuel(10));
        assert_eq!(out.verdict, Verdict::BudgetExhausted);
        assert_eq!(out.reply(), None);
        assert_eq!(out.steps, 10);
    }

    #[test]
    fn use_thread_examples() {
        let bound = DEFAULT_PRODUCT_BOUND;
        let sp = RegularThread::stop_pos();
        let fam = br_family("f", true);
        assert!(equal(&use_thread(&sp, &fam, bound).unwrap(), &sp));

        let t = RegularThread::post(basic("f", "get"), &sp, &RegularThread::stop_neg());
        let used = use_thread(&t, &fam, bound).unwrap();
        assert!(equal(&used, &RegularThread::tau(&sp)));

        let t = RegularThread::post(basic("g", "m"), &sp, &RegularThread::stop_neg());
        let used = use_thread(&t, &fam, bound).unwrap();
        assert!(equal(&used, &t));
    }

    #[test]
    fn abstracting_use_examples() {
        let bound = DEFAULT_PRODUCT_BOUND;
        let sp = RegularThread::stop_pos();
        let fam = br_family("f", true);
        let t = RegularThread::post(basic("f", "get"), &sp, &RegularThread::stop_neg());
        assert!(equal(&abstracting_use(&t, &fam, bound).unwrap(), &sp));
        assert!(equal(
            &abstracting_use(&RegularThread::stop_neg(), &fam, bound).unwrap(),
            &RegularThread::stop_neg()
        ));
        // A silent processing loop is inaction.
        let looped = extract(&sbt("f.set_t ; \\#1"));
        assert!(equal(
            &abstracting_use(&looped, &br_family("f", false), bound).unwrap(),
            &RegularThread::dead()
        ));
    }

    #[test]
    fn contract_taus_examples() {
        let sp = RegularThread::stop_pos();
        let t = RegularThread::tau(&RegularThread::tau(&sp));
        assert!(equal(&contract_taus(&t), &sp));
        let mut b = ThreadBuilder::new();
        let id = b.reserve();
        b.fill(id, ThreadNode::Tau(id));
        let tau_loop = b.finish(id);
        assert!(equal(&contract_taus(&tau_loop), &RegularThread::dead()));
    }

    #[test]
    fn check_ispo_examples() {
        let t = extract(&sbt("+f.get ; !t ; !f"));
        let u = br_family("f", true);
        let v = br_family("g", false);
        let out = check_ispo(&t, &u, &v, &Budget::exact(), DEFAULT_PRODUCT_BOUND).unwrap();
        assert_eq!(out, IspoOutcome::Pass);

        let clash = check_ispo(&t, &u, &br_family("f", false), &Budget::exact(), DEFAULT_PRODUCT_BOUND);
        assert_eq!(clash, Err(ExecError::DisjointFociRequired));

        let out = check_ispo(
            &RegularThread::stop_pos(),
            &ServiceFamily::empty(),
            &ServiceFamily::empty(),
            &Budget::exact(),
            DEFAULT_PRODUCT_BOUND,
        )
        .unwrap();
        assert_eq!(out, IspoOutcome::Pass);
    }
}
