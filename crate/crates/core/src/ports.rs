//! Delta ports: named external-input leaves and the pass that closes them.
//!
//! A `(delta name)` form compiles to an inert `DeltaPort` leaf. It matches
//! no reduction rule, so it survives normalization untouched; binding
//! substitutes a sampled value for every port of that name.

use std::collections::{BTreeMap, HashMap};

use crate::ir::{recurse_children, Arena, NodeData, NodeId};
use crate::rewrite::{unify, DagContext};

/// Mapping from port name to the node that closes it, typically a constant.
/// Bound nodes must live in the same arena as the graph being closed.
#[derive(Debug, Default, Clone)]
pub struct PortBinding {
    bindings: BTreeMap<String, NodeId>,
}

impl PortBinding {
    pub fn new() -> Self {
        PortBinding::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, node: NodeId) {
        self.bindings.insert(name.into(), node);
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.bindings.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

/// Replaces every `DeltaPort` whose name is bound with its bound node.
/// Unbound ports remain, sharing is preserved, and the result is unified.
pub fn bind_ports(
    arena: &mut Arena,
    ctx: &mut DagContext,
    root: NodeId,
    bindings: &PortBinding,
) -> NodeId {
    let mut memo = HashMap::new();
    let replaced = bind_rec(arena, root, bindings, &mut memo);
    unify(arena, ctx, replaced)
}

fn bind_rec(
    arena: &mut Arena,
    node: NodeId,
    bindings: &PortBinding,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if let Some(&done) = memo.get(&node) {
        return done;
    }
    let result = match arena.node(node) {
        NodeData::DeltaPort(name) => bindings.get(name).unwrap_or(node),
        _ => recurse_children(arena, node, &mut |arena, child| {
            bind_rec(arena, child, bindings, memo)
        }),
    };
    memo.insert(node, result);
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{alpha_equal, comp, default_env};
    use crate::rewrite::reduce;
    use crate::sexpr::read_sexpr;
    use crate::syntax::parse;
    use num_bigint::BigInt;

    fn compile(arena: &mut Arena, text: &str) -> NodeId {
        let syntax = parse(&read_sexpr(text).unwrap()).unwrap();
        let env = default_env(arena);
        comp(arena, &env, &syntax).unwrap()
    }

    #[test]
    fn bound_port_closes_and_reduces() {
        let mut arena = Arena::new();
        let root = compile(&mut arena, "((lambda (a) a) (delta in))");
        let mut ctx = DagContext::new();
        let mut bindings = PortBinding::new();
        let nine = arena.integer(9);
        bindings.bind("in", nine);
        let closed = bind_ports(&mut arena, &mut ctx, root, &bindings);
        let out = reduce(&mut arena, &mut ctx, closed).unwrap();
        assert!(matches!(arena.node(out), NodeData::Integer(v) if *v == BigInt::from(9)));
    }

    #[test]
    fn unbound_port_is_left_alone() {
        let mut arena = Arena::new();
        let port = compile(&mut arena, "(delta x)");
        let mut ctx = DagContext::new();
        let out = bind_ports(&mut arena, &mut ctx, port, &PortBinding::new());
        assert_eq!(out, port);
    }

    #[test]
    fn binding_preserves_sharing() {
        let mut arena = Arena::new();
        let port = arena.alloc(NodeData::DeltaPort("x".to_string()));
        let pair = arena.alloc(NodeData::Pair {
            first: port,
            second: port,
        });
        let mut ctx = DagContext::new();
        let mut bindings = PortBinding::new();
        let one = arena.integer(1);
        bindings.bind("x", one);
        let out = bind_ports(&mut arena, &mut ctx, pair, &bindings);
        let NodeData::Pair { first, second } = *arena.node(out) else {
            panic!()
        };
        assert_eq!(first, second);
        assert_eq!(first, one);
    }

    #[test]
    fn ports_survive_reduction() {
        let mut arena = Arena::new();
        let root = compile(&mut arena, "(pair (delta in) (+ 1 2))");
        let mut ctx = DagContext::new();
        let out = reduce(&mut arena, &mut ctx, root).unwrap();
        let ports = arena
            .reachable(out)
            .into_iter()
            .filter(|&id| matches!(arena.node(id), NodeData::DeltaPort(_)))
            .count();
        assert_eq!(ports, 1);
    }

    #[test]
    fn binding_commutes_with_reduction() {
        for program in [
            "((lambda (a) a) (delta in))",
            "(+ (delta in) 1)",
            "(pair (delta in) (delta other))",
            "(if (< 1 2) (delta in) 0)",
        ] {
            // bind then reduce
            let mut arena_a = Arena::new();
            let root_a = compile(&mut arena_a, program);
            let mut ctx_a = DagContext::new();
            let mut bindings_a = PortBinding::new();
            let nine = arena_a.integer(9);
            bindings_a.bind("in", nine);
            let closed_a = bind_ports(&mut arena_a, &mut ctx_a, root_a, &bindings_a);
            let out_a = reduce(&mut arena_a, &mut ctx_a, closed_a).unwrap();

            // reduce, then bind, then reduce again
            let mut arena_b = Arena::new();
            let root_b = compile(&mut arena_b, program);
            let mut ctx_b = DagContext::new();
            let reduced_b = reduce(&mut arena_b, &mut ctx_b, root_b).unwrap();
            let mut bindings_b = PortBinding::new();
            let nine_b = arena_b.integer(9);
            bindings_b.bind("in", nine_b);
            let closed_b = bind_ports(&mut arena_b, &mut ctx_b, reduced_b, &bindings_b);
            let out_b = reduce(&mut arena_b, &mut ctx_b, closed_b).unwrap();

            assert!(
                alpha_equal(&arena_a, out_a, &arena_b, out_b),
                "bind/reduce order changed the result of {}",
                program
            );
        }
    }
}
