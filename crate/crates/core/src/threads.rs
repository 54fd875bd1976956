//! Regular threads: finite behaviour graphs with postconditional nodes,
//! thread extraction from instruction sequences, finite-depth projection,
//! and behavioural equality by partition refinement.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::isa::{BasicInstruction, InstrSeq, Instruction};

pub type NodeId = usize;

/// One state of a regular thread.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ThreadNode {
    /// Inaction (deadlock / divergence).
    Dead,
    /// Termination without a delivered value.
    Stop,
    /// Termination delivering T.
    StopPos,
    /// Termination delivering F.
    StopNeg,
    /// Internal action; always proceeds with its continuation.
    Tau(NodeId),
    /// Perform `action`; proceed with `on_true` on reply T, `on_false` on F.
    Post {
        action: BasicInstruction,
        on_true: NodeId,
        on_false: NodeId,
    },
}

/// A finite rooted thread graph. All successor ids resolve within the graph.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RegularThread {
    nodes: Vec<ThreadNode>,
    root: NodeId,
}

/// Incremental construction of thread graphs, with reserve/fill for cycles.
pub struct ThreadBuilder {
    nodes: Vec<Option<ThreadNode>>,
}

impl ThreadBuilder {
    pub fn new() -> Self {
        ThreadBuilder { nodes: Vec::new() }
    }

    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        self.nodes.len() - 1
    }

    pub fn fill(&mut self, id: NodeId, node: ThreadNode) {
        debug_assert!(self.nodes[id].is_none(), "node filled twice");
        self.nodes[id] = Some(node);
    }

    pub fn push(&mut self, node: ThreadNode) -> NodeId {
        let id = self.reserve();
        self.fill(id, node);
        id
    }

    pub fn finish(self, root: NodeId) -> RegularThread {
        let nodes: Vec<ThreadNode> = self
            .nodes
            .into_iter()
            .map(|n| n.expect("all reserved nodes must be filled"))
            .collect();
        for node in &nodes {
            match node {
                ThreadNode::Tau(n) => debug_assert!(*n < nodes.len()),
                ThreadNode::Post {
                    on_true, on_false, ..
                } => debug_assert!(*on_true < nodes.len() && *on_false < nodes.len()),
                _ => {}
            }
        }
        debug_assert!(root < nodes.len());
        RegularThread { nodes, root }
    }
}

impl Default for ThreadBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl RegularThread {
    fn leaf(node: ThreadNode) -> Self {
        RegularThread {
            nodes: vec![node],
            root: 0,
        }
    }

    pub fn dead() -> Self {
        Self::leaf(ThreadNode::Dead)
    }

    pub fn stop() -> Self {
        Self::leaf(ThreadNode::Stop)
    }

    pub fn stop_pos() -> Self {
        Self::leaf(ThreadNode::StopPos)
    }

    pub fn stop_neg() -> Self {
        Self::leaf(ThreadNode::StopNeg)
    }

    /// τ-prefix: performs τ, then continues as `inner`.
    pub fn tau(inner: &RegularThread) -> Self {
        let mut nodes = inner.nodes.clone();
        let root = nodes.len();
        nodes.push(ThreadNode::Tau(inner.root));
        RegularThread { nodes, root }
    }

    /// Postconditional composition over a basic action.
    pub fn post(action: BasicInstruction, on_true: &RegularThread, on_false: &RegularThread) -> Self {
        let mut nodes = on_true.nodes.clone();
        let offset = nodes.len();
        nodes.extend(on_false.nodes.iter().map(|n| n.shift(offset)));
        let root = nodes.len();
        nodes.push(ThreadNode::Post {
            action,
            on_true: on_true.root,
            on_false: on_false.root + offset,
        });
        RegularThread { nodes, root }
    }

    /// Postconditional composition over τ. By axiom T1 the right branch is
    /// irrelevant, so this is `tau(on_true)`.
    pub fn post_tau(on_true: &RegularThread, _on_false: &RegularThread) -> Self {
        Self::tau(on_true)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &ThreadNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Subthread rooted at an existing node.
    pub fn rooted_at(&self, id: NodeId) -> RegularThread {
        RegularThread {
            nodes: self.nodes.clone(),
            root: id,
        }
    }

    /// Nodes reachable from the root, in BFS order.
    pub fn reachable(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(self.root);
        seen[self.root] = true;
        while let Some(id) = queue.pop_front() {
            order.push(id);
            let mut visit = |n: NodeId| {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            match &self.nodes[id] {
                ThreadNode::Tau(n) => visit(*n),
                ThreadNode::Post {
                    on_true, on_false, ..
                } => {
                    visit(*on_true);
                    visit(*on_false);
                }
                _ => {}
            }
        }
        order
    }

    /// Deterministic adjacency listing: one line per reachable node in BFS
    /// order, ids renumbered from 0.
    pub fn render(&self) -> String {
        let order = self.reachable();
        let index: BTreeMap<NodeId, usize> =
            order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut out = String::new();
        let _ = writeln!(out, "root=0");
        for (i, &id) in order.iter().enumerate() {
            match &self.nodes[id] {
                ThreadNode::Dead => {
                    let _ = writeln!(out, "{i} dead");
                }
                ThreadNode::Stop => {
                    let _ = writeln!(out, "{i} stop");
                }
                ThreadNode::StopPos => {
                    let _ = writeln!(out, "{i} stop+");
                }
                ThreadNode::StopNeg => {
                    let _ = writeln!(out, "{i} stop-");
                }
                ThreadNode::Tau(n) => {
                    let _ = writeln!(out, "{i} tau next={}", index[n]);
                }
                ThreadNode::Post {
                    action,
                    on_true,
                    on_false,
                } => {
                    let _ = writeln!(
                        out,
                        "{i} post {action} then={} else={}",
                        index[on_true], index[on_false]
                    );
                }
            }
        }
        out
    }
}

impl ThreadNode {
    fn shift(&self, offset: usize) -> ThreadNode {
        match self {
            ThreadNode::Tau(n) => ThreadNode::Tau(n + offset),
            ThreadNode::Post {
                action,
                on_true,
                on_false,
            } => ThreadNode::Post {
                action: action.clone(),
                on_true: on_true + offset,
                on_false: on_false + offset,
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for RegularThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Result of chasing a jump chain from a position.
enum Resolved {
    Dead,
    At(usize),
}

/// Follows jumps from 1-based position `start`; a cycle of jumps, an offset
/// of zero, or an out-of-range position resolves to inaction.
fn resolve(s: &InstrSeq, start: usize) -> Resolved {
    let k = s.len();
    let mut i = start;
    let mut seen = BTreeSet::new();
    loop {
        if i < 1 || i > k {
            return Resolved::Dead;
        }
        match s.at(i).expect("in range") {
            Instruction::FwdJump(l) => {
                if !seen.insert(i) {
                    return Resolved::Dead;
                }
                match l.to_usize().and_then(|l| i.checked_add(l)) {
                    Some(t) if t > i && t <= k => i = t,
                    _ => return Resolved::Dead,
                }
            }
            Instruction::BwdJump(l) => {
                if !seen.insert(i) {
                    return Resolved::Dead;
                }
                match l.to_usize() {
                    Some(l) if l > 0 && l < i => i -= l,
                    _ => return Resolved::Dead,
                }
            }
            _ => return Resolved::At(i),
        }
    }
}

/// Thread extraction: the behaviour an instruction sequence exhibits on
/// execution. Jumps are resolved transitively; jump cycles and out-of-range
/// positions become inaction.
pub fn extract(s: &InstrSeq) -> RegularThread {
    let mut builder = ThreadBuilder::new();
    let mut ids: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut dead_id: Option<NodeId> = None;
    let mut queue: VecDeque<usize> = VecDeque::new();

    let node_for = |builder: &mut ThreadBuilder,
                        ids: &mut BTreeMap<usize, NodeId>,
                        dead_id: &mut Option<NodeId>,
                        queue: &mut VecDeque<usize>,
                        target: Resolved| match target {
        Resolved::Dead => *dead_id.get_or_insert_with(|| builder.push(ThreadNode::Dead)),
        Resolved::At(p) => *ids.entry(p).or_insert_with(|| {
            queue.push_back(p);
            builder.reserve()
        }),
    };

    let root = node_for(
        &mut builder,
        &mut ids,
        &mut dead_id,
        &mut queue,
        resolve(s, 1),
    );
    while let Some(p) = queue.pop_front() {
        let id = ids[&p];
        let node = match s.at(p).expect("queued positions are in range") {
            Instruction::Plain(a) => {
                let next = node_for(
                    &mut builder,
                    &mut ids,
                    &mut dead_id,
                    &mut queue,
                    resolve(s, p + 1),
                );
                ThreadNode::Post {
                    action: a.clone(),
                    on_true: next,
                    on_false: next,
                }
            }
            Instruction::PosTest(a) => {
                let t = node_for(
                    &mut builder,
                    &mut ids,
                    &mut dead_id,
                    &mut queue,
                    resolve(s, p + 1),
                );
                let e = node_for(
                    &mut builder,
                    &mut ids,
                    &mut dead_id,
                    &mut queue,
                    resolve(s, p + 2),
                );
                ThreadNode::Post {
                    action: a.clone(),
                    on_true: t,
                    on_false: e,
                }
            }
            Instruction::NegTest(a) => {
                let t = node_for(
                    &mut builder,
                    &mut ids,
                    &mut dead_id,
                    &mut queue,
                    resolve(s, p + 2),
                );
                let e = node_for(
                    &mut builder,
                    &mut ids,
                    &mut dead_id,
                    &mut queue,
                    resolve(s, p + 1),
                );
                ThreadNode::Post {
                    action: a.clone(),
                    on_true: t,
                    on_false: e,
                }
            }
            Instruction::Halt => ThreadNode::Stop,
            Instruction::HaltPos => ThreadNode::StopPos,
            Instruction::HaltNeg => ThreadNode::StopNeg,
            Instruction::FwdJump(_) | Instruction::BwdJump(_) => {
                unreachable!("resolve never yields a jump position")
            }
        };
        builder.fill(id, node);
    }
    builder.finish(root)
}

/// A thread cut off after at most `depth` actions; cut leaves are inaction.
#[derive(Clone, Debug)]
pub struct ThreadApprox {
    pub depth: usize,
    pub thread: RegularThread,
}

/// Projection up to `depth` actions (τ counts as an action).
pub fn project(t: &RegularThread, depth: usize) -> ThreadApprox {
    let mut builder = ThreadBuilder::new();
    let mut memo: BTreeMap<(NodeId, usize), NodeId> = BTreeMap::new();
    let root = project_node(t, t.root(), depth, &mut builder, &mut memo);
    ThreadApprox {
        depth,
        thread: builder.finish(root),
    }
}

fn project_node(
    t: &RegularThread,
    id: NodeId,
    depth: usize,
    builder: &mut ThreadBuilder,
    memo: &mut BTreeMap<(NodeId, usize), NodeId>,
) -> NodeId {
    if let Some(&done) = memo.get(&(id, depth)) {
        return done;
    }
    let slot = builder.reserve();
    memo.insert((id, depth), slot);
    let node = if depth == 0 {
        ThreadNode::Dead
    } else {
        match t.node(id) {
            ThreadNode::Dead => ThreadNode::Dead,
            ThreadNode::Stop => ThreadNode::Stop,
            ThreadNode::StopPos => ThreadNode::StopPos,
            ThreadNode::StopNeg => ThreadNode::StopNeg,
            ThreadNode::Tau(n) => ThreadNode::Tau(project_node(t, *n, depth - 1, builder, memo)),
            ThreadNode::Post {
                action,
                on_true,
                on_false,
            } => ThreadNode::Post {
                action: action.clone(),
                on_true: project_node(t, *on_true, depth - 1, builder, memo),
                on_false: project_node(t, *on_false, depth - 1, builder, memo),
            },
        }
    };
    builder.fill(slot, node);
    slot
}

/// Behavioural equality: bisimulation on the finite graphs, decided by
/// partition refinement. For regular threads this coincides with equality
/// of all finite-depth projections.
pub fn equal(a: &RegularThread, b: &RegularThread) -> bool {
    // Work on the disjoint union of the two graphs.
    #[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
    enum Kind<'a> {
        Dead,
        Stop,
        StopPos,
        StopNeg,
        Tau,
        Post(&'a BasicInstruction),
    }

    let offset = a.nodes.len();
    let total = offset + b.nodes.len();
    let node = |i: usize| -> &ThreadNode {
        if i < offset {
            &a.nodes[i]
        } else {
            &b.nodes[i - offset]
        }
    };

    // Initial partition: by node kind and action label.
    let mut kinds: BTreeMap<Kind, usize> = BTreeMap::new();
    let mut class: Vec<usize> = Vec::with_capacity(total);
    for i in 0..total {
        let kind = match node(i) {
            ThreadNode::Dead => Kind::Dead,
            ThreadNode::Stop => Kind::Stop,
            ThreadNode::StopPos => Kind::StopPos,
            ThreadNode::StopNeg => Kind::StopNeg,
            ThreadNode::Tau(_) => Kind::Tau,
            ThreadNode::Post { action, .. } => Kind::Post(action),
        };
        let next = kinds.len();
        class.push(*kinds.entry(kind).or_insert(next));
    }

    // Refine by successor classes until the class count stops growing.
    loop {
        let mut sigs: BTreeMap<(usize, Option<usize>, Option<usize>), usize> = BTreeMap::new();
        let mut next_class: Vec<usize> = Vec::with_capacity(total);
        for i in 0..total {
            let (s1, s2) = match node(i) {
                ThreadNode::Tau(n) => {
                    let n = if i < offset { *n } else { *n + offset };
                    (Some(class[n]), None)
                }
                ThreadNode::Post {
                    on_true, on_false, ..
                } => {
                    let (t, e) = if i < offset {
                        (*on_true, *on_false)
                    } else {
                        (*on_true + offset, *on_false + offset)
                    };
                    (Some(class[t]), Some(class[e]))
                }
                _ => (None, None),
            };
            let sig = (class[i], s1, s2);
            let fresh = sigs.len();
            next_class.push(*sigs.entry(sig).or_insert(fresh));
        }
        let old_count = class.iter().copied().collect::<BTreeSet<_>>().len();
        let stable = sigs.len() == old_count;
        class = next_class;
        if stable {
            break;
        }
    }
    class[a.root] == class[b.root + offset]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, Rng};
    use crate::isa::{basic, sbt};

    #[test]
    fn extraction_examples() {
        assert!(equal(&extract(&sbt("!t")), &RegularThread::stop_pos()));
        let want = RegularThread::post(
            basic("f", "m"),
            &RegularThread::stop_pos(),
            &RegularThread::stop_neg(),
        );
        assert!(equal(&extract(&sbt("+f.m ; !t ; !f")), &want));
        // positions 1 -> 3 -> 1 form a jump cycle
        assert!(equal(&extract(&sbt("#2 ; !t ; \\#2")), &RegularThread::dead()));
        assert!(equal(&extract(&sbt("#0")), &RegularThread::dead()));
    }

    #[test]
    fn negative_test_swaps_branches() {
        let want = RegularThread::post(
            basic("f", "m"),
            &RegularThread::stop_neg(),
            &RegularThread::stop_pos(),
        );
        assert!(equal(&extract(&sbt("-f.m ; !t ; !f")), &want));
    }

    #[test]
    fn plain_instruction_repeats_successor() {
        let want = RegularThread::post(
            basic("f", "m"),
            &RegularThread::stop_pos(),
            &RegularThread::stop_pos(),
        );
        assert!(equal(&extract(&sbt("f.m ; !t")), &want));
    }

    #[test]
    fn extraction_node_bound() {
        let mut rng = Rng::new(0x7eed);
        for _ in 0..300 {
            let p = gen::random_program(&mut rng, &gen::ProgramCfg::default());
            let t = extract(&p);
            assert!(t.reachable().len() <= p.len() + 1, "program `{}`", p.print());
        }
    }

    #[test]
    fn projection_examples() {
        let sp = RegularThread::stop_pos();
        assert!(equal(&project(&sp, 0).thread, &RegularThread::dead()));
        assert!(equal(&project(&sp, 3).thread, &sp));
        let t = RegularThread::post(basic("f", "a"), &sp, &RegularThread::stop_neg());
        let cut = RegularThread::post(basic("f", "a"), &RegularThread::dead(), &RegularThread::dead());
        assert!(equal(&project(&t, 1).thread, &cut));
        // τ counts as an action
        let tau = RegularThread::tau(&sp);
        assert!(equal(
            &project(&tau, 1).thread,
            &RegularThread::tau(&RegularThread::dead())
        ));
    }

    #[test]
    fn equality_examples() {
        assert!(equal(&extract(&sbt("!t ; !f")), &RegularThread::stop_pos()));
        assert!(equal(&extract(&sbt("#1 ; !t")), &extract(&sbt("!t"))));
        assert!(!equal(&RegularThread::stop_pos(), &RegularThread::stop_neg()));
        // an infinite τ loop is not inaction
        let mut b = ThreadBuilder::new();
        let id = b.reserve();
        b.fill(id, ThreadNode::Tau(id));
        let tau_loop = b.finish(id);
        assert!(!equal(&tau_loop, &RegularThread::dead()));
        assert!(equal(&tau_loop, &RegularThread::tau(&tau_loop)));
    }

    #[test]
    fn cone_property_of_projections() {
        let actions = [basic("f", "m"), basic("g", "get")];
        let mut rng = Rng::new(0xc0de);
        for _ in 0..200 {
            let t = gen::random_thread(&mut rng, &actions, 8);
            let n = rng.below(6);
            let a = project(&project(&t, n + 1).thread, n).thread;
            let b = project(&t, n).thread;
            assert!(equal(&a, &b));
        }
    }

    #[test]
    fn equal_agrees_with_bounded_projection_equality() {
        let actions = [basic("f", "m"), basic("g", "get")];
        let mut rng = Rng::new(0xb151);
        for _ in 0..200 {
            let a = gen::random_thread(&mut rng, &actions, 5);
            let b = gen::random_thread(&mut rng, &actions, 5);
            let bound = a.node_count() * b.node_count() + 1;
            let projections_agree =
                (0..=bound).all(|n| equal(&project(&a, n).thread, &project(&b, n).thread));
            assert_eq!(equal(&a, &b), projections_agree);
        }
    }

    #[test]
    fn render_is_deterministic() {
        let t = extract(&sbt("+f.m ; !t ; !f"));
        assert_eq!(t.render(), "root=0\n0 post f.m then=1 else=2\n1 stop+\n2 stop-\n");
    }
}
