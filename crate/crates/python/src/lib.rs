//! Python bindings for the mu-lambda calculus toolkit.
//!
//! Exposes the pipeline stages to Python: parsing, the reference
//! interpreter, and the compile-and-reduce graph held by [`Dag`].

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mulambda::interp::{default_env as interp_env, interp, Fuel, DEFAULT_FUEL};
use mulambda::ir::{
    alpha_equal, comp, default_env, node_to_dot, Arena, CompEnv, NodeId,
};
use mulambda::ports::{bind_ports, PortBinding};
use mulambda::rewrite::{reduce, reduce_once, DagContext};
use mulambda::sexpr::read_sexpr;
use mulambda::syntax::{parse, syntax_to_dot, SyntaxNode};

fn parse_source(text: &str) -> PyResult<SyntaxNode> {
    let sexpr = read_sexpr(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    parse(&sexpr).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Parse a program and return its syntax tree as an indented dump.
#[pyfunction]
fn parse_tree(text: &str) -> PyResult<String> {
    Ok(parse_source(text)?.pretty())
}

/// Parse a program and return its syntax tree as a DOT digraph.
#[pyfunction]
fn syntax_dot(text: &str) -> PyResult<String> {
    Ok(syntax_to_dot(&parse_source(text)?))
}

/// Run the reference interpreter and return the printed value.
#[pyfunction]
#[pyo3(signature = (text, fuel=None))]
fn interpret(text: &str, fuel: Option<u64>) -> PyResult<String> {
    let syntax = parse_source(text)?;
    let mut fuel = Fuel::new(fuel.unwrap_or(DEFAULT_FUEL));
    let value = interp(&interp_env(), &syntax, &mut fuel)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(value.to_string())
}

/// A compiled value graph with its reduction context.
///
/// Construction compiles the program under the default primitives; `reduce`
/// and `reduce_once` rewrite the held root in place and return its print.
#[pyclass]
struct Dag {
    arena: Arena,
    ctx: DagContext,
    root: NodeId,
}

#[pymethods]
impl Dag {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let syntax = parse_source(text)?;
        let mut arena = Arena::new();
        let env = default_env(&mut arena);
        let root = comp(&mut arena, &env, &syntax)
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Dag {
            arena,
            ctx: DagContext::new(),
            root,
        })
    }

    /// Reduce to normal form and return the printed result.
    fn reduce(&mut self) -> PyResult<String> {
        self.root = reduce(&mut self.arena, &mut self.ctx, self.root)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(self.printed())
    }

    /// Apply one parallel rewriting step and return the printed result.
    fn reduce_once(&mut self) -> PyResult<String> {
        self.root = reduce_once(&mut self.arena, &mut self.ctx, self.root)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(self.printed())
    }

    /// Close delta ports against literal values (integer, `#t`, `#f`, `()`).
    fn bind_ports(&mut self, bindings: HashMap<String, String>) -> PyResult<()> {
        let mut ports = PortBinding::new();
        for (name, literal) in &bindings {
            let syntax = parse_source(literal)?;
            match syntax {
                SyntaxNode::Integer(_)
                | SyntaxNode::True
                | SyntaxNode::False
                | SyntaxNode::Unit => {}
                _ => {
                    return Err(PyValueError::new_err(format!(
                        "port literal must be an integer, #t, #f, or (), got `{}`",
                        literal
                    )))
                }
            }
            let node = comp(&mut self.arena, &CompEnv::empty(), &syntax)
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            ports.bind(name.clone(), node);
        }
        self.root = bind_ports(&mut self.arena, &mut self.ctx, self.root, &ports);
        Ok(())
    }

    /// Canonical print for ground graphs, `<kind>` summary otherwise.
    fn printed(&self) -> String {
        self.arena.printed(self.root)
    }

    fn is_ground(&self) -> bool {
        self.arena.is_ground(self.root)
    }

    /// DOT rendering of the current graph.
    fn to_dot(&self) -> String {
        node_to_dot(&self.arena, self.root)
    }

    /// Structural equality with another graph up to binder renaming.
    fn alpha_equal(&self, other: &Dag) -> bool {
        alpha_equal(&self.arena, self.root, &other.arena, other.root)
    }

    /// Number of nodes reachable from the root.
    fn node_count(&self) -> usize {
        self.arena.reachable(self.root).len()
    }

    /// Reduction rules fired in this graph's context so far.
    fn rule_firings(&self) -> u64 {
        self.ctx.rule_firings()
    }

    fn __repr__(&self) -> String {
        format!("Dag({})", self.printed())
    }
}

#[pymodule]
fn mulambda_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse_tree, m)?)?;
    m.add_function(wrap_pyfunction!(syntax_dot, m)?)?;
    m.add_function(wrap_pyfunction!(interpret, m)?)?;
    m.add_class::<Dag>()?;
    Ok(())
}
