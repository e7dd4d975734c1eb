//! The mu-lambda calculus toolkit.
//!
//! The pipeline has four stages:
//!
//! 1. [`sexpr`]: read surface text into generic symbolic expressions.
//! 2. [`syntax`]: parse symbolic expressions into a curried abstract syntax tree.
//! 3. [`interp`]: a reference tree-walking evaluator, used as the ground-truth
//!    oracle for the optimizer.
//! 4. [`ir`] + [`rewrite`]: compile syntax to a data-only sea-of-nodes value
//!    graph and normalize it by memoized rewriting, hash-consing unification,
//!    and cyclic memoization (mu-binders). Classically divergent terms like
//!    `((lambda (x) (x x)) (lambda (x) (x x)))` normalize to finite, possibly
//!    self-referential graphs.
//!
//! [`ports`] closes named external-input ports (`(delta name)`) against bound
//! values, and [`corpus`] runs the differential corpus comparing interpreter
//! and reducer.

pub mod corpus;
pub mod interp;
pub mod ir;
pub mod ports;
pub mod rewrite;
pub mod sexpr;
pub mod syntax;

pub use num_bigint::BigInt;

pub use interp::{default_env, interp, Env, EvalError, Fuel, Value};
pub use ir::{alpha_equal, comp, node_to_dot, Arena, CompEnv, CompileError, NodeData, NodeId};
pub use ports::{bind_ports, PortBinding};
pub use rewrite::{reduce, reduce_once, reduce_with_trace, DagContext, ReduceError};
pub use sexpr::{read_sexpr, ReadError, SExpr};
pub use syntax::{parse, syntax_to_dot, ParseError, SyntaxNode};
