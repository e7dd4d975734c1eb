//! The data-only sea-of-nodes value graph.
//!
//! Every node lives in an [`Arena`] and is immutable once allocated. A
//! [`NodeId`] is the node's identity: memo tables, unification and DOT
//! output all key on it, and identities are never reused. The reachable
//! graph from any node is acyclic; self-reference is expressed only through
//! the `Mu`/`MuArgument` pair introduced by the reducer.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::syntax::SyntaxNode;

/// Identity of an IR node, an index into its arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct PrimitiveError(pub String);

type PrimFn = Arc<dyn Fn(&mut Arena, NodeId) -> Result<NodeId, PrimitiveError> + Send + Sync>;

/// Behavior of a primitive node. Primitives are compared by name, never by
/// implementation; the name must determine the behavior.
#[derive(Clone)]
pub struct PrimitiveImpl(PrimFn);

impl PrimitiveImpl {
    pub fn new(run: PrimFn) -> Self {
        PrimitiveImpl(run)
    }

    pub fn run(&self, arena: &mut Arena, argument: NodeId) -> Result<NodeId, PrimitiveError> {
        (self.0)(arena, argument)
    }
}

impl fmt::Debug for PrimitiveImpl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<primitive-impl>")
    }
}

/// One node of the value graph. Children are ordered `NodeId`s.
#[derive(Debug, Clone)]
pub enum NodeData {
    Integer(BigInt),
    True,
    False,
    Unit,
    /// Binder leaf created fresh for each compiled `Lambda`.
    Argument,
    /// Binder leaf created fresh by the reducer's cyclic memoization.
    MuArgument,
    Apply {
        functional: NodeId,
        argument: NodeId,
    },
    Lambda {
        argument: NodeId,
        body: NodeId,
    },
    /// Self-reference binder: `body` refers back to the whole node through
    /// `argument`, keeping the stored graph acyclic.
    Mu {
        argument: NodeId,
        body: NodeId,
    },
    If {
        condition: NodeId,
        true_block: NodeId,
        false_block: NodeId,
    },
    Pair {
        first: NodeId,
        second: NodeId,
    },
    First(NodeId),
    Second(NodeId),
    InjectLeft(NodeId),
    InjectRight(NodeId),
    Case {
        value: NodeId,
        left_case: NodeId,
        right_case: NodeId,
    },
    Primitive {
        name: String,
        implementation: PrimitiveImpl,
    },
    /// Named inert leaf standing for a value sampled from outside the
    /// program; closed by the port-binding pass.
    DeltaPort(String),
}

impl NodeData {
    /// All child identities in order, binder links included.
    pub fn children(&self) -> Vec<NodeId> {
        match *self {
            NodeData::Apply {
                functional,
                argument,
            } => vec![functional, argument],
            NodeData::Lambda { argument, body } | NodeData::Mu { argument, body } => {
                vec![argument, body]
            }
            NodeData::If {
                condition,
                true_block,
                false_block,
            } => vec![condition, true_block, false_block],
            NodeData::Pair { first, second } => vec![first, second],
            NodeData::First(pair) | NodeData::Second(pair) => vec![pair],
            NodeData::InjectLeft(value) | NodeData::InjectRight(value) => vec![value],
            NodeData::Case {
                value,
                left_case,
                right_case,
            } => vec![value, left_case, right_case],
            _ => vec![],
        }
    }
}

/// Append-only store of nodes. One arena backs one pipeline run; node
/// identities are only meaningful within their arena.
#[derive(Debug, Default)]
pub struct Arena {
    nodes: Vec<NodeData>,
}

impl Arena {
    pub fn new() -> Self {
        Arena::default()
    }

    pub fn alloc(&mut self, data: NodeData) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(data);
        id
    }

    pub fn node(&self, id: NodeId) -> &NodeData {
        &self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integer(&mut self, value: impl Into<BigInt>) -> NodeId {
        self.alloc(NodeData::Integer(value.into()))
    }

    /// Every node reachable from `root` (binder links included), in
    /// depth-first preorder, each node once.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            order.push(id);
            let children = self.node(id).children();
            for child in children.into_iter().rev() {
                stack.push(child);
            }
        }
        order
    }

    /// True for first-order data: constants, and pairs/injections of ground
    /// values. Ground graphs print canonically and compare with the
    /// interpreter.
    pub fn is_ground(&self, id: NodeId) -> bool {
        match self.node(id) {
            NodeData::Integer(_) | NodeData::True | NodeData::False | NodeData::Unit => true,
            NodeData::Pair { first, second } => self.is_ground(*first) && self.is_ground(*second),
            NodeData::InjectLeft(value) | NodeData::InjectRight(value) => self.is_ground(*value),
            _ => false,
        }
    }

    /// Canonical print for ground graphs, mirroring the interpreter's value
    /// printer; a `<kind>` summary otherwise.
    pub fn printed(&self, id: NodeId) -> String {
        if self.is_ground(id) {
            return self.print_ground(id);
        }
        self.summary(id)
    }

    fn print_ground(&self, id: NodeId) -> String {
        match self.node(id) {
            NodeData::Integer(value) => value.to_string(),
            NodeData::True => "#t".to_string(),
            NodeData::False => "#f".to_string(),
            NodeData::Unit => "()".to_string(),
            NodeData::Pair { first, second } => format!(
                "(pair {} {})",
                self.print_ground(*first),
                self.print_ground(*second)
            ),
            NodeData::InjectLeft(value) => format!("(inject-left {})", self.print_ground(*value)),
            NodeData::InjectRight(value) => {
                format!("(inject-right {})", self.print_ground(*value))
            }
            _ => unreachable!("print_ground called on a non-ground node"),
        }
    }

    /// One-token description of a non-ground root.
    pub fn summary(&self, id: NodeId) -> String {
        match self.node(id) {
            NodeData::Lambda { .. } => "<lambda>".to_string(),
            NodeData::Mu { .. } => "<mu>".to_string(),
            NodeData::DeltaPort(name) => format!("<delta {}>", name),
            NodeData::Primitive { name, .. } => format!("<primitive {}>", name),
            NodeData::Apply { .. } => "<apply>".to_string(),
            NodeData::Argument => "<argument>".to_string(),
            NodeData::MuArgument => "<muargument>".to_string(),
            NodeData::If { .. } => "<if>".to_string(),
            NodeData::Case { .. } => "<case>".to_string(),
            NodeData::First(_) => "<first>".to_string(),
            NodeData::Second(_) => "<second>".to_string(),
            NodeData::Pair { .. } => "<pair>".to_string(),
            NodeData::InjectLeft(_) => "<inject-left>".to_string(),
            NodeData::InjectRight(_) => "<inject-right>".to_string(),
            other => format!("<{:?}>", other),
        }
    }

    /// DOT vertex label: variant name plus literal payload.
    pub fn label(&self, id: NodeId) -> String {
        match self.node(id) {
            NodeData::Integer(value) => format!("integer {}", value),
            NodeData::True => "true".to_string(),
            NodeData::False => "false".to_string(),
            NodeData::Unit => "unit".to_string(),
            NodeData::Argument => "argument".to_string(),
            NodeData::MuArgument => "muargument".to_string(),
            NodeData::Apply { .. } => "apply".to_string(),
            NodeData::Lambda { .. } => "lambda".to_string(),
            NodeData::Mu { .. } => "mu".to_string(),
            NodeData::If { .. } => "if".to_string(),
            NodeData::Pair { .. } => "pair".to_string(),
            NodeData::First(_) => "first".to_string(),
            NodeData::Second(_) => "second".to_string(),
            NodeData::InjectLeft(_) => "inject-left".to_string(),
            NodeData::InjectRight(_) => "inject-right".to_string(),
            NodeData::Case { .. } => "case".to_string(),
            NodeData::Primitive { name, .. } => format!("primitive {}", name),
            NodeData::DeltaPort(name) => format!("delta {}", name),
        }
    }
}

/// Compile-time environment: the same linked chain as the interpreter's,
/// binding symbols to node identities.
#[derive(Debug, Clone)]
pub struct CompEnv(Option<Arc<CompEnvLink>>);

#[derive(Debug)]
struct CompEnvLink {
    parent: CompEnv,
    symbol: String,
    node: NodeId,
}

impl CompEnv {
    pub fn empty() -> Self {
        CompEnv(None)
    }

    pub fn child(&self, symbol: impl Into<String>, node: NodeId) -> Self {
        CompEnv(Some(Arc::new(CompEnvLink {
            parent: self.clone(),
            symbol: symbol.into(),
            node,
        })))
    }

    pub fn lookup(&self, symbol: &str) -> Option<NodeId> {
        let mut current = &self.0;
        while let Some(link) = current {
            if link.symbol == symbol {
                return Some(link.node);
            }
            current = &link.parent.0;
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
}

/// Compiles syntax into the value graph. No evaluation happens: `if`
/// compiles both branches, applications stay applications. A `let` compiles
/// its bound value once and binds the resulting node, so every use of the
/// variable shares one identity.
pub fn comp(arena: &mut Arena, env: &CompEnv, syntax: &SyntaxNode) -> Result<NodeId, CompileError> {
    match syntax {
        SyntaxNode::Integer(value) => Ok(arena.alloc(NodeData::Integer(value.clone()))),
        SyntaxNode::True => Ok(arena.alloc(NodeData::True)),
        SyntaxNode::False => Ok(arena.alloc(NodeData::False)),
        SyntaxNode::Unit => Ok(arena.alloc(NodeData::Unit)),
        SyntaxNode::Identifier(name) => env
            .lookup(name)
            .ok_or_else(|| CompileError::UnboundSymbol(name.clone())),
        SyntaxNode::If(condition, true_expr, false_expr) => {
            let condition = comp(arena, env, condition)?;
            let true_block = comp(arena, env, true_expr)?;
            let false_block = comp(arena, env, false_expr)?;
            Ok(arena.alloc(NodeData::If {
                condition,
                true_block,
                false_block,
            }))
        }
        SyntaxNode::Application(functional, argument) => {
            let functional = comp(arena, env, functional)?;
            let argument = comp(arena, env, argument)?;
            Ok(arena.alloc(NodeData::Apply {
                functional,
                argument,
            }))
        }
        SyntaxNode::Lambda(name, body) => {
            let argument = arena.alloc(NodeData::Argument);
            let closure_env = env.child(name.clone(), argument);
            let body = comp(arena, &closure_env, body)?;
            Ok(arena.alloc(NodeData::Lambda { argument, body }))
        }
        SyntaxNode::Let(name, value, body) => {
            let bound = comp(arena, env, value)?;
            let child_env = env.child(name.clone(), bound);
            comp(arena, &child_env, body)
        }
        SyntaxNode::Pair(first, second) => {
            let first = comp(arena, env, first)?;
            let second = comp(arena, env, second)?;
            Ok(arena.alloc(NodeData::Pair { first, second }))
        }
        SyntaxNode::First(pair) => {
            let pair = comp(arena, env, pair)?;
            Ok(arena.alloc(NodeData::First(pair)))
        }
        SyntaxNode::Second(pair) => {
            let pair = comp(arena, env, pair)?;
            Ok(arena.alloc(NodeData::Second(pair)))
        }
        SyntaxNode::InjectLeft(expr) => {
            let value = comp(arena, env, expr)?;
            Ok(arena.alloc(NodeData::InjectLeft(value)))
        }
        SyntaxNode::InjectRight(expr) => {
            let value = comp(arena, env, expr)?;
            Ok(arena.alloc(NodeData::InjectRight(value)))
        }
        SyntaxNode::Case(expr, left, right) => {
            let value = comp(arena, env, expr)?;
            let left_case = comp(arena, env, left)?;
            let right_case = comp(arena, env, right)?;
            Ok(arena.alloc(NodeData::Case {
                value,
                left_case,
                right_case,
            }))
        }
        SyntaxNode::Delta(name) => Ok(arena.alloc(NodeData::DeltaPort(name.clone()))),
    }
}

/// Applies `rec` to each child in order and rebuilds the node. Leaves come
/// back unchanged, `Mu` recurses only its body (the binder is preserved),
/// and a rebuild whose children all kept their identity returns the original
/// node.
pub fn try_recurse_children<E>(
    arena: &mut Arena,
    node: NodeId,
    rec: &mut dyn FnMut(&mut Arena, NodeId) -> Result<NodeId, E>,
) -> Result<NodeId, E> {
    let data = arena.node(node).clone();
    let rebuilt = match data {
        NodeData::Integer(_)
        | NodeData::True
        | NodeData::False
        | NodeData::Unit
        | NodeData::Argument
        | NodeData::MuArgument
        | NodeData::Primitive { .. }
        | NodeData::DeltaPort(_) => return Ok(node),
        NodeData::Apply {
            functional,
            argument,
        } => {
            let new_functional = rec(arena, functional)?;
            let new_argument = rec(arena, argument)?;
            if new_functional == functional && new_argument == argument {
                return Ok(node);
            }
            NodeData::Apply {
                functional: new_functional,
                argument: new_argument,
            }
        }
        NodeData::Lambda { argument, body } => {
            let new_argument = rec(arena, argument)?;
            let new_body = rec(arena, body)?;
            if new_argument == argument && new_body == body {
                return Ok(node);
            }
            NodeData::Lambda {
                argument: new_argument,
                body: new_body,
            }
        }
        NodeData::Mu { argument, body } => {
            let new_body = rec(arena, body)?;
            if new_body == body {
                return Ok(node);
            }
            NodeData::Mu {
                argument,
                body: new_body,
            }
        }
        NodeData::If {
            condition,
            true_block,
            false_block,
        } => {
            let new_condition = rec(arena, condition)?;
            let new_true = rec(arena, true_block)?;
            let new_false = rec(arena, false_block)?;
            if new_condition == condition && new_true == true_block && new_false == false_block {
                return Ok(node);
            }
            NodeData::If {
                condition: new_condition,
                true_block: new_true,
                false_block: new_false,
            }
        }
        NodeData::Pair { first, second } => {
            let new_first = rec(arena, first)?;
            let new_second = rec(arena, second)?;
            if new_first == first && new_second == second {
                return Ok(node);
            }
            NodeData::Pair {
                first: new_first,
                second: new_second,
            }
        }
        NodeData::First(pair) => {
            let new_pair = rec(arena, pair)?;
            if new_pair == pair {
                return Ok(node);
            }
            NodeData::First(new_pair)
        }
        NodeData::Second(pair) => {
            let new_pair = rec(arena, pair)?;
            if new_pair == pair {
                return Ok(node);
            }
            NodeData::Second(new_pair)
        }
        NodeData::InjectLeft(value) => {
            let new_value = rec(arena, value)?;
            if new_value == value {
                return Ok(node);
            }
            NodeData::InjectLeft(new_value)
        }
        NodeData::InjectRight(value) => {
            let new_value = rec(arena, value)?;
            if new_value == value {
                return Ok(node);
            }
            NodeData::InjectRight(new_value)
        }
        NodeData::Case {
            value,
            left_case,
            right_case,
        } => {
            let new_value = rec(arena, value)?;
            let new_left = rec(arena, left_case)?;
            let new_right = rec(arena, right_case)?;
            if new_value == value && new_left == left_case && new_right == right_case {
                return Ok(node);
            }
            NodeData::Case {
                value: new_value,
                left_case: new_left,
                right_case: new_right,
            }
        }
    };
    Ok(arena.alloc(rebuilt))
}

/// Infallible variant of [`try_recurse_children`].
pub fn recurse_children(
    arena: &mut Arena,
    node: NodeId,
    rec: &mut dyn FnMut(&mut Arena, NodeId) -> NodeId,
) -> NodeId {
    let result: Result<NodeId, std::convert::Infallible> =
        try_recurse_children(arena, node, &mut |arena, child| Ok(rec(arena, child)));
    match result {
        Ok(id) => id,
        Err(never) => match never {},
    }
}

#[derive(Default)]
struct AlphaState {
    forward: HashMap<NodeId, NodeId>,
    backward: HashMap<NodeId, NodeId>,
    proven: HashSet<(NodeId, NodeId)>,
}

impl AlphaState {
    fn bind(&mut self, a: NodeId, b: NodeId) -> bool {
        match (self.forward.get(&a), self.backward.get(&b)) {
            (None, None) => {
                self.forward.insert(a, b);
                self.backward.insert(b, a);
                true
            }
            (Some(&fa), Some(&fb)) => fa == b && fb == a,
            _ => false,
        }
    }
}

/// Structural equality up to a consistent bijection of binder identities.
/// Constants compare by payload, primitives and ports by name. The two
/// roots may live in different arenas.
pub fn alpha_equal(arena_a: &Arena, a: NodeId, arena_b: &Arena, b: NodeId) -> bool {
    let mut state = AlphaState::default();
    alpha_rec(arena_a, a, arena_b, b, &mut state)
}

fn alpha_rec(
    arena_a: &Arena,
    a: NodeId,
    arena_b: &Arena,
    b: NodeId,
    state: &mut AlphaState,
) -> bool {
    if state.proven.contains(&(a, b)) {
        return true;
    }
    let ok = match (arena_a.node(a), arena_b.node(b)) {
        (NodeData::Integer(x), NodeData::Integer(y)) => x == y,
        (NodeData::True, NodeData::True)
        | (NodeData::False, NodeData::False)
        | (NodeData::Unit, NodeData::Unit) => true,
        (NodeData::Argument, NodeData::Argument)
        | (NodeData::MuArgument, NodeData::MuArgument) => {
            match (state.forward.get(&a), state.backward.get(&b)) {
                (Some(&fa), Some(&fb)) => fa == b && fb == a,
                // free binder occurrences only match themselves, and only
                // within a single arena
                (None, None) => std::ptr::eq(arena_a, arena_b) && a == b,
                _ => false,
            }
        }
        (
            NodeData::Lambda {
                argument: arg_a,
                body: body_a,
            },
            NodeData::Lambda {
                argument: arg_b,
                body: body_b,
            },
        )
        | (
            NodeData::Mu {
                argument: arg_a,
                body: body_a,
            },
            NodeData::Mu {
                argument: arg_b,
                body: body_b,
            },
        ) => state.bind(*arg_a, *arg_b) && alpha_rec(arena_a, *body_a, arena_b, *body_b, state),
        (
            NodeData::Apply {
                functional: fa,
                argument: aa,
            },
            NodeData::Apply {
                functional: fb,
                argument: ab,
            },
        ) => alpha_rec(arena_a, *fa, arena_b, *fb, state) && alpha_rec(arena_a, *aa, arena_b, *ab, state),
        (
            NodeData::If {
                condition: ca,
                true_block: ta,
                false_block: fa,
            },
            NodeData::If {
                condition: cb,
                true_block: tb,
                false_block: fb,
            },
        ) => {
            alpha_rec(arena_a, *ca, arena_b, *cb, state)
                && alpha_rec(arena_a, *ta, arena_b, *tb, state)
                && alpha_rec(arena_a, *fa, arena_b, *fb, state)
        }
        (
            NodeData::Pair {
                first: fa,
                second: sa,
            },
            NodeData::Pair {
                first: fb,
                second: sb,
            },
        ) => alpha_rec(arena_a, *fa, arena_b, *fb, state) && alpha_rec(arena_a, *sa, arena_b, *sb, state),
        (NodeData::First(pa), NodeData::First(pb))
        | (NodeData::Second(pa), NodeData::Second(pb))
        | (NodeData::InjectLeft(pa), NodeData::InjectLeft(pb))
        | (NodeData::InjectRight(pa), NodeData::InjectRight(pb)) => {
            alpha_rec(arena_a, *pa, arena_b, *pb, state)
        }
        (
            NodeData::Case {
                value: va,
                left_case: la,
                right_case: ra,
            },
            NodeData::Case {
                value: vb,
                left_case: lb,
                right_case: rb,
            },
        ) => {
            alpha_rec(arena_a, *va, arena_b, *vb, state)
                && alpha_rec(arena_a, *la, arena_b, *lb, state)
                && alpha_rec(arena_a, *ra, arena_b, *rb, state)
        }
        (NodeData::Primitive { name: na, .. }, NodeData::Primitive { name: nb, .. }) => na == nb,
        (NodeData::DeltaPort(na), NodeData::DeltaPort(nb)) => na == nb,
        _ => false,
    };
    if ok {
        state.proven.insert((a, b));
    }
    ok
}

fn escape_dot(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dot_children(data: &NodeData) -> Vec<(&'static str, NodeId)> {
    match *data {
        NodeData::Apply {
            functional,
            argument,
        } => vec![("functional", functional), ("argument", argument)],
        NodeData::Lambda { body, .. } | NodeData::Mu { body, .. } => vec![("body", body)],
        NodeData::If {
            condition,
            true_block,
            false_block,
        } => vec![
            ("condition", condition),
            ("true", true_block),
            ("false", false_block),
        ],
        NodeData::Pair { first, second } => vec![("first", first), ("second", second)],
        NodeData::First(pair) | NodeData::Second(pair) => vec![("pair", pair)],
        NodeData::InjectLeft(value) | NodeData::InjectRight(value) => vec![("value", value)],
        NodeData::Case {
            value,
            left_case,
            right_case,
        } => vec![("value", value), ("left", left_case), ("right", right_case)],
        _ => vec![],
    }
}

/// Renders the reachable subgraph as a DOT digraph. Shared nodes are printed
/// once. Binder edges are drawn only when the binder is referenced somewhere
/// in a body, and mu binder edges are dashed to stand out.
pub fn node_to_dot(arena: &Arena, root: NodeId) -> String {
    // vertex set: everything reachable through value edges; binders appear
    // only via their occurrences
    let mut order = Vec::new();
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if !seen.insert(id) {
            continue;
        }
        order.push(id);
        for (_, child) in dot_children(arena.node(id)).into_iter().rev() {
            stack.push(child);
        }
    }

    let mut out = String::from("digraph ir {\n");
    for &id in &order {
        out.push_str(&format!(
            "  {} [label=\"{}\"];\n",
            id,
            escape_dot(&arena.label(id))
        ));
    }
    for &id in &order {
        for (role, child) in dot_children(arena.node(id)) {
            out.push_str(&format!("  {} -> {} [label=\"{}\"];\n", id, child, role));
        }
        match *arena.node(id) {
            NodeData::Lambda { argument, .. } if seen.contains(&argument) => {
                out.push_str(&format!(
                    "  {} -> {} [label=\"argument\", style=dotted];\n",
                    id, argument
                ));
            }
            NodeData::Mu { argument, .. } if seen.contains(&argument) => {
                out.push_str(&format!(
                    "  {} -> {} [label=\"mu-argument\", style=dashed];\n",
                    id, argument
                ));
            }
            _ => {}
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Lt,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
        }
    }

    fn apply(self, a: &BigInt, b: &BigInt) -> NodeData {
        match self {
            BinOp::Add => NodeData::Integer(a + b),
            BinOp::Sub => NodeData::Integer(a - b),
            BinOp::Mul => NodeData::Integer(a * b),
            BinOp::Eq => {
                if a == b {
                    NodeData::True
                } else {
                    NodeData::False
                }
            }
            BinOp::Lt => {
                if a < b {
                    NodeData::True
                } else {
                    NodeData::False
                }
            }
        }
    }
}

fn expect_integer(arena: &Arena, op_name: &str, id: NodeId) -> Result<BigInt, PrimitiveError> {
    match arena.node(id) {
        NodeData::Integer(value) => Ok(value.clone()),
        other => Err(PrimitiveError(format!(
            "primitive `{}` expects an integer, got `{}`",
            op_name,
            match other {
                NodeData::True => "#t".to_string(),
                NodeData::False => "#f".to_string(),
                NodeData::Unit => "()".to_string(),
                _ => format!("{:?}", other),
            }
        ))),
    }
}

fn binary_primitive(arena: &mut Arena, op: BinOp) -> NodeId {
    let run: PrimFn = Arc::new(move |arena, first| {
        let a = expect_integer(arena, op.symbol(), first)?;
        // partial application: a new primitive whose name carries the
        // captured operand, so structurally identical partials unify
        let name = format!("{}{}", op.symbol(), a);
        let inner_name = name.clone();
        let inner: PrimFn = Arc::new(move |arena, second| {
            let b = expect_integer(arena, &inner_name, second)?;
            Ok(arena.alloc(op.apply(&a, &b)))
        });
        Ok(arena.alloc(NodeData::Primitive {
            name,
            implementation: PrimitiveImpl::new(inner),
        }))
    });
    arena.alloc(NodeData::Primitive {
        name: op.symbol().to_string(),
        implementation: PrimitiveImpl::new(run),
    })
}

/// Compile-time counterpart of the interpreter's base environment: the five
/// curried integer primitives as `Primitive` nodes.
pub fn default_env(arena: &mut Arena) -> CompEnv {
    let mut env = CompEnv::empty();
    for op in [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq, BinOp::Lt] {
        let node = binary_primitive(arena, op);
        env = env.child(op.symbol(), node);
    }
    env
}
