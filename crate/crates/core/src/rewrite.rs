//! The self-optimizing graph reducer.
//!
//! Reduction walks the value graph top-down, rewriting under three pieces of
//! machinery:
//!
//! - per-pass memo tables keyed by node identity, so shared nodes are
//!   rewritten once;
//! - a structure-keyed unification table (hash-consing with a union-find
//!   flavor) that canonicalizes structurally identical nodes to one
//!   identity, which is what lets a self-application like
//!   `((lambda (x) (x x)) (lambda (x) (x x)))` reach an identity fixpoint;
//! - cyclic memoization: re-entering a node whose reduction is still pending
//!   hands back a fresh `MuArgument`, and when the pending reduction
//!   finishes the result is wrapped in a `Mu` binder. This is what the
//!   expansive `((lambda (x) (x x x)) (lambda (x) (x x x)))` needs.

use std::collections::HashMap;

use thiserror::Error;

use crate::ir::{
    recurse_children, try_recurse_children, Arena, NodeData, NodeId, PrimitiveError,
};

/// Pass names for the identity-keyed memo tables.
pub const PASS_REDUCE: &str = "reduce";
pub const PASS_REDUCE_ONCE: &str = "reduce-once";

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("cyclic expansion of {0}")]
    CyclicExpansion(NodeId),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error("step budget exceeded after {0} rule firings")]
    StepBudgetExceeded(u64),
}

impl ReduceError {
    pub fn tag(&self) -> &'static str {
        match self {
            ReduceError::CyclicExpansion(_) => "cyclic",
            ReduceError::Primitive(_) => "type",
            ReduceError::StepBudgetExceeded(_) => "budget",
        }
    }
}

/// Structure key of a unifiable node: variant tag, literal payload, and the
/// ordered child identities. Equal keys mean same variant, same payload, and
/// identity-equal children in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructuralKey {
    Integer(num_bigint::BigInt),
    True,
    False,
    Unit,
    Apply(NodeId, NodeId),
    Lambda(NodeId, NodeId),
    Mu(NodeId, NodeId),
    If(NodeId, NodeId, NodeId),
    Pair(NodeId, NodeId),
    First(NodeId),
    Second(NodeId),
    InjectLeft(NodeId),
    InjectRight(NodeId),
    Case(NodeId, NodeId, NodeId),
    Primitive(String),
    DeltaPort(String),
}

/// Computes the structural key of a node from its current children.
/// Binder leaves have no key; callers must check [`can_unify`] first.
pub fn structural_key(arena: &Arena, id: NodeId) -> StructuralKey {
    match arena.node(id) {
        NodeData::Integer(value) => StructuralKey::Integer(value.clone()),
        NodeData::True => StructuralKey::True,
        NodeData::False => StructuralKey::False,
        NodeData::Unit => StructuralKey::Unit,
        NodeData::Apply {
            functional,
            argument,
        } => StructuralKey::Apply(*functional, *argument),
        NodeData::Lambda { argument, body } => StructuralKey::Lambda(*argument, *body),
        NodeData::Mu { argument, body } => StructuralKey::Mu(*argument, *body),
        NodeData::If {
            condition,
            true_block,
            false_block,
        } => StructuralKey::If(*condition, *true_block, *false_block),
        NodeData::Pair { first, second } => StructuralKey::Pair(*first, *second),
        NodeData::First(pair) => StructuralKey::First(*pair),
        NodeData::Second(pair) => StructuralKey::Second(*pair),
        NodeData::InjectLeft(value) => StructuralKey::InjectLeft(*value),
        NodeData::InjectRight(value) => StructuralKey::InjectRight(*value),
        NodeData::Case {
            value,
            left_case,
            right_case,
        } => StructuralKey::Case(*value, *left_case, *right_case),
        NodeData::Primitive { name, .. } => StructuralKey::Primitive(name.clone()),
        NodeData::DeltaPort(name) => StructuralKey::DeltaPort(name.clone()),
        NodeData::Argument | NodeData::MuArgument => {
            unreachable!("binder leaves have no structural key")
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum MemoEntry {
    Pending,
    PendingCyclic { muarg: NodeId, hit: bool },
    Done(NodeId),
}

/// Mutable store for one run of the graph transform algorithms: per-pass
/// identity-keyed memo tables, the unification table, and the safety step
/// budget. A context is single-owner for the duration of its passes; after
/// an error it should be discarded.
#[derive(Debug)]
pub struct DagContext {
    tables: HashMap<&'static str, HashMap<NodeId, MemoEntry>>,
    unification: HashMap<StructuralKey, NodeId>,
    uses_var_memo: HashMap<(NodeId, NodeId), bool>,
    rule_firings: u64,
    step_budget: u64,
}

impl DagContext {
    pub fn new() -> Self {
        Self::with_budget(DEFAULT_STEP_BUDGET)
    }

    /// A context whose reductions may fire at most `step_budget` rules.
    /// The budget guards against non-termination; exceeding it is an error,
    /// never silent truncation.
    pub fn with_budget(step_budget: u64) -> Self {
        DagContext {
            tables: HashMap::new(),
            unification: HashMap::new(),
            uses_var_memo: HashMap::new(),
            rule_firings: 0,
            step_budget,
        }
    }

    /// Total reduction rules fired so far in this context.
    pub fn rule_firings(&self) -> u64 {
        self.rule_firings
    }

    fn count_firing(&mut self) -> Result<(), ReduceError> {
        self.rule_firings += 1;
        if self.rule_firings > self.step_budget {
            return Err(ReduceError::StepBudgetExceeded(self.rule_firings));
        }
        Ok(())
    }

    fn entry(&self, pass: &'static str, node: NodeId) -> Option<MemoEntry> {
        self.tables.get(pass).and_then(|t| t.get(&node)).copied()
    }

    fn insert(&mut self, pass: &'static str, node: NodeId, entry: MemoEntry) {
        self.tables.entry(pass).or_default().insert(node, entry);
    }

    fn mark_cyclic(&mut self, pass: &'static str, node: NodeId) {
        if let Some(MemoEntry::PendingCyclic { hit, .. }) =
            self.tables.entry(pass).or_default().get_mut(&node)
        {
            *hit = true;
        }
    }

    fn cyclic_flag(&self, pass: &'static str, node: NodeId) -> bool {
        matches!(
            self.entry(pass, node),
            Some(MemoEntry::PendingCyclic { hit: true, .. })
        )
    }
}

impl Default for DagContext {
    fn default() -> Self {
        Self::new()
    }
}

/// Identity-keyed memoization. The first call for `(pass, node)` runs
/// `compute`; later calls return the cached result. Re-entering a node whose
/// computation is still pending is an error in this non-cyclic variant.
pub fn memoize<F>(
    arena: &mut Arena,
    ctx: &mut DagContext,
    pass: &'static str,
    node: NodeId,
    compute: F,
) -> Result<NodeId, ReduceError>
where
    F: FnOnce(&mut Arena, &mut DagContext) -> Result<NodeId, ReduceError>,
{
    match ctx.entry(pass, node) {
        Some(MemoEntry::Done(result)) => return Ok(result),
        Some(MemoEntry::Pending) | Some(MemoEntry::PendingCyclic { .. }) => {
            return Err(ReduceError::CyclicExpansion(node))
        }
        None => {}
    }
    ctx.insert(pass, node, MemoEntry::Pending);
    let result = compute(arena, ctx)?;
    ctx.insert(pass, node, MemoEntry::Done(result));
    Ok(result)
}

/// Like [`memoize`], but re-entry is the feature instead of an error:
/// a pending node hands back its fresh `MuArgument` and flags the entry, and
/// a flagged computation gets wrapped as `Mu(muarg, result)` on completion.
/// The wrapper is skipped when the finished body no longer refers to the
/// binder, which keeps every surviving `Mu` minimal.
pub fn cyclic_memoize<F>(
    arena: &mut Arena,
    ctx: &mut DagContext,
    pass: &'static str,
    node: NodeId,
    compute: F,
) -> Result<NodeId, ReduceError>
where
    F: FnOnce(&mut Arena, &mut DagContext) -> Result<NodeId, ReduceError>,
{
    match ctx.entry(pass, node) {
        Some(MemoEntry::Done(result)) => return Ok(result),
        Some(MemoEntry::PendingCyclic { muarg, .. }) => {
            ctx.mark_cyclic(pass, node);
            return Ok(muarg);
        }
        Some(MemoEntry::Pending) => return Err(ReduceError::CyclicExpansion(node)),
        None => {}
    }
    let muarg = arena.alloc(NodeData::MuArgument);
    ctx.insert(pass, node, MemoEntry::PendingCyclic { muarg, hit: false });
    let transformed = compute(arena, ctx)?;
    let result = if ctx.cyclic_flag(pass, node) && uses_var(arena, ctx, transformed, muarg) {
        arena.alloc(NodeData::Mu {
            argument: muarg,
            body: transformed,
        })
    } else {
        transformed
    };
    ctx.insert(pass, node, MemoEntry::Done(result));
    Ok(result)
}

/// Binder leaves must keep their identity, everything else may be unified.
pub fn can_unify(arena: &Arena, id: NodeId) -> bool {
    !matches!(arena.node(id), NodeData::Argument | NodeData::MuArgument)
}

/// Hash-consing: returns the canonical representative of a node's structure.
/// Children are unified first and the key is computed from the unified
/// children, so keys are canonical bottom-up. A new key installs the
/// children-unified node as its own representative.
pub fn unify(arena: &mut Arena, ctx: &mut DagContext, id: NodeId) -> NodeId {
    if !can_unify(arena, id) {
        return id;
    }
    let with_unified_children = recurse_children(arena, id, &mut |arena, child| {
        unify(arena, ctx, child)
    });
    let key = structural_key(arena, with_unified_children);
    match ctx.unification.get(&key) {
        Some(&representative) => representative,
        None => {
            ctx.unification.insert(key, with_unified_children);
            with_unified_children
        }
    }
}

/// True for integers, booleans, unit, and pairs/injections of constants.
pub fn is_constant(arena: &Arena, id: NodeId) -> bool {
    arena.is_ground(id)
}

/// Identity reachability of a binder from a node, memoized in the context.
/// Nodes are immutable, so cached answers stay valid across passes.
pub fn uses_var(arena: &Arena, ctx: &mut DagContext, node: NodeId, binder: NodeId) -> bool {
    if node == binder {
        return true;
    }
    if let Some(&cached) = ctx.uses_var_memo.get(&(binder, node)) {
        return cached;
    }
    let result = arena
        .node(node)
        .children()
        .into_iter()
        .any(|child| uses_var(arena, ctx, child, binder));
    ctx.uses_var_memo.insert((binder, node), result);
    result
}

/// Replaces every occurrence of `binder` in `body` with `value`.
///
/// The traversal is identity-memoized per call: nodes that cannot reach the
/// binder keep their identity, rebuilt interior nodes are fresh, `value` is
/// inserted as-is without being traversed, and a lambda owning the binder
/// itself is a shadow boundary (unreachable for compiled graphs, where every
/// lambda gets a fresh binder).
pub fn substitute(
    arena: &mut Arena,
    ctx: &mut DagContext,
    binder: NodeId,
    value: NodeId,
    body: NodeId,
) -> NodeId {
    debug_assert!(matches!(arena.node(binder), NodeData::Argument));
    let mut memo = HashMap::new();
    subst_rec(arena, ctx, binder, value, body, &mut memo)
}

fn subst_rec(
    arena: &mut Arena,
    ctx: &mut DagContext,
    binder: NodeId,
    value: NodeId,
    node: NodeId,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if node == binder {
        return value;
    }
    if let NodeData::Lambda { argument, .. } = arena.node(node) {
        if *argument == binder {
            return node;
        }
    }
    if !uses_var(arena, ctx, node, binder) {
        return node;
    }
    if let Some(&done) = memo.get(&node) {
        return done;
    }
    let rebuilt = recurse_children(arena, node, &mut |arena, child| {
        subst_rec(arena, ctx, binder, value, child, memo)
    });
    memo.insert(node, rebuilt);
    rebuilt
}

/// Applies at most one top-level reduction rule, first match wins:
///
/// 1. primitive applied to a constant folds;
/// 2. lambda applied to anything beta-reduces by substitution;
/// 3. a mu whose body no longer uses its binder unwraps;
/// 4. `if` on a constant condition selects a branch;
/// 5. `if` whose branches are identity-equal collapses;
/// 6. `first`/`second` project a pair;
/// 7. `case` on an injection becomes an application of the matching branch.
///
/// Anything else comes back unchanged.
pub fn reduction_rule(
    arena: &mut Arena,
    ctx: &mut DagContext,
    node: NodeId,
) -> Result<NodeId, ReduceError> {
    let data = arena.node(node).clone();
    match data {
        NodeData::Apply {
            functional,
            argument,
        } => match arena.node(functional).clone() {
            NodeData::Primitive { implementation, .. } if is_constant(arena, argument) => {
                Ok(implementation.run(arena, argument)?)
            }
            NodeData::Lambda {
                argument: binder,
                body,
            } => Ok(substitute(arena, ctx, binder, argument, body)),
            _ => Ok(node),
        },
        NodeData::Mu { argument, body } => {
            if uses_var(arena, ctx, body, argument) {
                Ok(node)
            } else {
                Ok(body)
            }
        }
        NodeData::If {
            condition,
            true_block,
            false_block,
        } => match arena.node(condition) {
            NodeData::True => Ok(true_block),
            NodeData::False => Ok(false_block),
            _ if true_block == false_block => Ok(true_block),
            _ => Ok(node),
        },
        NodeData::First(pair) => match arena.node(pair) {
            NodeData::Pair { first, .. } => Ok(*first),
            _ => Ok(node),
        },
        NodeData::Second(pair) => match arena.node(pair) {
            NodeData::Pair { second, .. } => Ok(*second),
            _ => Ok(node),
        },
        NodeData::Case {
            value,
            left_case,
            right_case,
        } => match *arena.node(value) {
            NodeData::InjectLeft(payload) => Ok(arena.alloc(NodeData::Apply {
                functional: left_case,
                argument: payload,
            })),
            NodeData::InjectRight(payload) => Ok(arena.alloc(NodeData::Apply {
                functional: right_case,
                argument: payload,
            })),
            _ => Ok(node),
        },
        _ => Ok(node),
    }
}

/// One parallel rewriting step: children are reduced once, the result is
/// unified, one top-level rule is applied, and the outcome unified again.
pub fn reduce_once(
    arena: &mut Arena,
    ctx: &mut DagContext,
    node: NodeId,
) -> Result<NodeId, ReduceError> {
    cyclic_memoize(arena, ctx, PASS_REDUCE_ONCE, node, |arena, ctx| {
        let with_reduced_children = try_recurse_children(arena, node, &mut |arena, child| {
            reduce_once(arena, ctx, child)
        })?;
        let with_reduced_children = unify(arena, ctx, with_reduced_children);
        let applied = reduction_rule(arena, ctx, with_reduced_children)?;
        let applied = unify(arena, ctx, applied);
        if applied != with_reduced_children {
            ctx.count_firing()?;
        }
        Ok(applied)
    })
}

/// Reduces until an identity fixpoint is reached. Children are fully
/// reduced and unified, one rule is applied and unified; if that changed
/// nothing the node is final, otherwise reduction recurses on the result.
/// Self-reference discovered mid-pass surfaces as `MuArgument` occurrences
/// and a wrapping `Mu`, via [`cyclic_memoize`].
pub fn reduce(arena: &mut Arena, ctx: &mut DagContext, node: NodeId) -> Result<NodeId, ReduceError> {
    let mut no_trace = |_: &Arena, _: NodeId| {};
    reduce_inner(arena, ctx, node, &mut no_trace)
}

/// [`reduce`] with a snapshot hook: `trace` observes the graph after each
/// top-level rule firing, following the chain of rewrites from the root.
pub fn reduce_with_trace(
    arena: &mut Arena,
    ctx: &mut DagContext,
    node: NodeId,
    trace: &mut dyn FnMut(&Arena, NodeId),
) -> Result<NodeId, ReduceError> {
    reduce_inner(arena, ctx, node, trace)
}

fn reduce_inner(
    arena: &mut Arena,
    ctx: &mut DagContext,
    node: NodeId,
    trace: &mut dyn FnMut(&Arena, NodeId),
) -> Result<NodeId, ReduceError> {
    // long rule chains nest one frame per firing; grow the stack on demand
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
        reduce_step(arena, ctx, node, trace)
    })
}

fn reduce_step(
    arena: &mut Arena,
    ctx: &mut DagContext,
    node: NodeId,
    trace: &mut dyn FnMut(&Arena, NodeId),
) -> Result<NodeId, ReduceError> {
    cyclic_memoize(arena, ctx, PASS_REDUCE, node, |arena, ctx| {
        let with_reduced_children = try_recurse_children(arena, node, &mut |arena, child| {
            let mut no_trace = |_: &Arena, _: NodeId| {};
            reduce_inner(arena, ctx, child, &mut no_trace)
        })?;
        let with_reduced_children = unify(arena, ctx, with_reduced_children);
        let applied = reduction_rule(arena, ctx, with_reduced_children)?;
        let applied = unify(arena, ctx, applied);
        if applied == with_reduced_children {
            Ok(applied)
        } else {
            ctx.count_firing()?;
            trace(arena, applied);
            reduce_inner(arena, ctx, applied, trace)
        }
    })
}

/// Scans the graph reachable from `root` for distinct unifiable nodes that
/// share a structural key. A reduced graph must have none.
pub fn structural_duplicates(arena: &Arena, root: NodeId) -> Vec<(NodeId, NodeId)> {
    let mut seen: HashMap<StructuralKey, NodeId> = HashMap::new();
    let mut duplicates = Vec::new();
    for id in arena.reachable(root) {
        if !can_unify(arena, id) {
            continue;
        }
        let key = structural_key(arena, id);
        match seen.get(&key) {
            Some(&other) => duplicates.push((other, id)),
            None => {
                seen.insert(key, id);
            }
        }
    }
    duplicates
}
