//! Reference tree-walking evaluator.
//!
//! This is the ground-truth oracle the optimizer is checked against. It is
//! strict, environment-based, and fuelled: every `interp` call consumes one
//! step of fuel, so divergent programs fail fast and deterministically
//! instead of hanging the harness.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::syntax::SyntaxNode;

/// Linked lookup chain from symbol to bound value. Lookup resolves to the
/// innermost binding.
#[derive(Debug, Clone)]
pub struct Env(Option<Arc<EnvLink>>);

#[derive(Debug)]
struct EnvLink {
    parent: Env,
    symbol: String,
    value: Value,
}

impl Env {
    pub fn empty() -> Self {
        Env(None)
    }

    /// Returns a new chain extended with one binding; `self` is untouched.
    pub fn child(&self, symbol: impl Into<String>, value: Value) -> Self {
        Env(Some(Arc::new(EnvLink {
            parent: self.clone(),
            symbol: symbol.into(),
            value,
        })))
    }
}

/// Looks a symbol up in the chain, innermost binding first.
pub fn lookup(env: &Env, symbol: &str) -> Result<Value, EvalError> {
    let mut current = &env.0;
    while let Some(link) = current {
        if link.symbol == symbol {
            return Ok(link.value.clone());
        }
        current = &link.parent.0;
    }
    Err(EvalError::UnboundSymbol(symbol.to_string()))
}

type PrimFn = Arc<dyn Fn(Value) -> Result<Value, EvalError> + Send + Sync>;

/// A built-in function of one value. Curried primitives return further
/// primitives until saturated.
#[derive(Clone)]
pub struct Primitive {
    pub name: String,
    run: PrimFn,
}

impl Primitive {
    pub fn new(name: impl Into<String>, run: PrimFn) -> Self {
        Primitive {
            name: name.into(),
            run,
        }
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Primitive({})", self.name)
    }
}

/// Runtime values of the reference interpreter.
#[derive(Debug, Clone)]
pub enum Value {
    Integer(BigInt),
    True,
    False,
    Unit,
    Closure(Arc<Closure>),
    Primitive(Primitive),
    Pair(Arc<Value>, Arc<Value>),
    InjectLeft(Arc<Value>),
    InjectRight(Arc<Value>),
}

/// A lambda closed over its definition environment.
#[derive(Debug)]
pub struct Closure {
    pub environment: Env,
    pub argument: String,
    pub body: Arc<SyntaxNode>,
}

impl Value {
    pub fn integer(v: impl Into<BigInt>) -> Self {
        Value::Integer(v.into())
    }

    pub fn boolean(b: bool) -> Self {
        if b {
            Value::True
        } else {
            Value::False
        }
    }

    /// A ground value is first-order data: integers, booleans, unit, and
    /// pairs/injections of ground values. Only ground values can be compared
    /// between the interpreter and the reducer.
    pub fn is_ground(&self) -> bool {
        match self {
            Value::Integer(_) | Value::True | Value::False | Value::Unit => true,
            Value::Pair(a, b) => a.is_ground() && b.is_ground(),
            Value::InjectLeft(v) | Value::InjectRight(v) => v.is_ground(),
            Value::Closure(_) | Value::Primitive(_) => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(v) => write!(f, "{}", v),
            Value::True => write!(f, "#t"),
            Value::False => write!(f, "#f"),
            Value::Unit => write!(f, "()"),
            Value::Closure(_) => write!(f, "<closure>"),
            Value::Primitive(_) => write!(f, "<primitive>"),
            Value::Pair(a, b) => write!(f, "(pair {} {})", a, b),
            Value::InjectLeft(v) => write!(f, "(inject-left {})", v),
            Value::InjectRight(v) => write!(f, "(inject-right {})", v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("fuel exhausted")]
    FuelExhausted,
}

impl EvalError {
    /// Short tag used by `.expect` sidecars and exit-code reporting.
    pub fn tag(&self) -> &'static str {
        match self {
            EvalError::UnboundSymbol(_) => "unbound",
            EvalError::TypeMismatch(_) => "type",
            EvalError::FuelExhausted => "fuel",
        }
    }
}

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Step budget for one evaluation. Each `interp` call consumes one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    remaining: u64,
}

impl Fuel {
    pub fn new(steps: u64) -> Self {
        Fuel { remaining: steps }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    fn consume(&mut self) -> Result<(), EvalError> {
        if self.remaining == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.remaining -= 1;
        Ok(())
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(DEFAULT_FUEL)
    }
}

/// Evaluates syntax under an environment.
///
/// Recursion depth tracks the fuel budget (omega nests one call per beta
/// step), so the native stack is grown on demand rather than trusting the
/// caller's thread to be deep enough.
pub fn interp(env: &Env, syntax: &SyntaxNode, fuel: &mut Fuel) -> Result<Value, EvalError> {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || interp_inner(env, syntax, fuel))
}

fn interp_inner(env: &Env, syntax: &SyntaxNode, fuel: &mut Fuel) -> Result<Value, EvalError> {
    fuel.consume()?;
    match syntax {
        SyntaxNode::Integer(v) => Ok(Value::Integer(v.clone())),
        SyntaxNode::True => Ok(Value::True),
        SyntaxNode::False => Ok(Value::False),
        SyntaxNode::Unit => Ok(Value::Unit),
        SyntaxNode::Identifier(name) => lookup(env, name),
        SyntaxNode::If(condition, true_expr, false_expr) => {
            match interp(env, condition, fuel)? {
                Value::True => interp(env, true_expr, fuel),
                Value::False => interp(env, false_expr, fuel),
                other => Err(EvalError::TypeMismatch(format!(
                    "if condition must be a boolean, got {}",
                    other
                ))),
            }
        }
        SyntaxNode::Application(functional, argument) => {
            let functional_value = interp(env, functional, fuel)?;
            let argument_value = interp(env, argument, fuel)?;
            apply_value(functional_value, argument_value, fuel)
        }
        SyntaxNode::Lambda(argument, body) => Ok(Value::Closure(Arc::new(Closure {
            environment: env.clone(),
            argument: argument.clone(),
            body: body.clone(),
        }))),
        SyntaxNode::Let(name, value, body) => {
            let bound = interp(env, value, fuel)?;
            let child = env.child(name.clone(), bound);
            interp(&child, body, fuel)
        }
        SyntaxNode::Pair(first, second) => {
            let first_value = interp(env, first, fuel)?;
            let second_value = interp(env, second, fuel)?;
            Ok(Value::Pair(Arc::new(first_value), Arc::new(second_value)))
        }
        SyntaxNode::First(pair) => match interp(env, pair, fuel)? {
            Value::Pair(first, _) => Ok((*first).clone()),
            other => Err(EvalError::TypeMismatch(format!(
                "first expects a pair, got {}",
                other
            ))),
        },
        SyntaxNode::Second(pair) => match interp(env, pair, fuel)? {
            Value::Pair(_, second) => Ok((*second).clone()),
            other => Err(EvalError::TypeMismatch(format!(
                "second expects a pair, got {}",
                other
            ))),
        },
        SyntaxNode::InjectLeft(expr) => {
            Ok(Value::InjectLeft(Arc::new(interp(env, expr, fuel)?)))
        }
        SyntaxNode::InjectRight(expr) => {
            Ok(Value::InjectRight(Arc::new(interp(env, expr, fuel)?)))
        }
        SyntaxNode::Case(expr, left_case, right_case) => match interp(env, expr, fuel)? {
            Value::InjectLeft(payload) => {
                let branch = interp(env, left_case, fuel)?;
                apply_value(branch, (*payload).clone(), fuel)
            }
            Value::InjectRight(payload) => {
                let branch = interp(env, right_case, fuel)?;
                apply_value(branch, (*payload).clone(), fuel)
            }
            other => Err(EvalError::TypeMismatch(format!(
                "case expects an injection, got {}",
                other
            ))),
        },
        SyntaxNode::Delta(name) => Err(EvalError::TypeMismatch(format!(
            "unbound delta port `{}`: the interpreter evaluates closed programs only",
            name
        ))),
    }
}

/// Applies an already-evaluated functional to an already-evaluated argument.
pub fn apply_value(functional: Value, argument: Value, fuel: &mut Fuel) -> Result<Value, EvalError> {
    match functional {
        Value::Closure(closure) => {
            let env = closure
                .environment
                .child(closure.argument.clone(), argument);
            interp(&env, &closure.body, fuel)
        }
        Value::Primitive(primitive) => (primitive.run)(argument),
        other => Err(EvalError::TypeMismatch(format!(
            "cannot apply non-functional value {}",
            other
        ))),
    }
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

    fn apply(self, a: &BigInt, b: &BigInt) -> Value {
        match self {
            BinOp::Add => Value::Integer(a + b),
            BinOp::Sub => Value::Integer(a - b),
            BinOp::Mul => Value::Integer(a * b),
            BinOp::Eq => Value::boolean(a == b),
            BinOp::Lt => Value::boolean(a < b),
        }
    }
}

fn expect_integer(op_name: &str, value: &Value) -> Result<BigInt, EvalError> {
    match value {
        Value::Integer(v) => Ok(v.clone()),
        other => Err(EvalError::TypeMismatch(format!(
            "primitive `{}` expects an integer, got {}",
            op_name, other
        ))),
    }
}

fn binary_primitive(op: BinOp) -> Value {
    let run: PrimFn = Arc::new(move |first| {
        let a = expect_integer(op.symbol(), &first)?;
        let partial_name = format!("{}{}", op.symbol(), a);
        let inner_name = partial_name.clone();
        let run: PrimFn = Arc::new(move |second| {
            let b = expect_integer(&inner_name, &second)?;
            Ok(op.apply(&a, &b))
        });
        Ok(Value::Primitive(Primitive::new(partial_name, run)))
    });
    Value::Primitive(Primitive::new(op.symbol(), run))
}

/// The base environment: curried integer primitives `+` `-` `*` `=` `<`.
pub fn default_env() -> Env {
    let mut env = Env::empty();
    for op in [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq, BinOp::Lt] {
        env = env.child(op.symbol(), binary_primitive(op));
    }
    env
}
