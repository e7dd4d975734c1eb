//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p mulambda --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use std::path::PathBuf;

use mulambda::corpus::{load_corpus, run_corpus_dir};
use mulambda::interp::{default_env as interp_env, interp, EvalError, Fuel};
use mulambda::ir::{
    alpha_equal, comp, default_env, node_to_dot, Arena, NodeData, NodeId,
};
use mulambda::ports::{bind_ports, PortBinding};
use mulambda::rewrite::{
    reduce, reduce_once, structural_duplicates, uses_var, DagContext,
};
use mulambda::sexpr::read_sexpr;
use mulambda::syntax::{parse, SyntaxNode};

const PARTIAL_APPLY: &str = "((lambda (x y) x) 42)";
const OMEGA: &str = "((lambda (x) (x x)) (lambda (x) (x x)))";
const OMEGA3: &str = "((lambda (x) (x x x)) (lambda (x) (x x x)))";

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .canonicalize()
        .expect("corpus directory exists")
}

fn parse_text(text: &str) -> SyntaxNode {
    parse(&read_sexpr(text).unwrap()).unwrap()
}

fn compile(arena: &mut Arena, text: &str) -> NodeId {
    let env = default_env(arena);
    comp(arena, &env, &parse_text(text)).unwrap()
}

fn reduce_text(text: &str) -> (Arena, DagContext, NodeId) {
    let mut arena = Arena::new();
    let root = compile(&mut arena, text);
    let mut ctx = DagContext::new();
    let reduced = reduce(&mut arena, &mut ctx, root).unwrap();
    (arena, ctx, reduced)
}

fn count_kind(arena: &Arena, root: NodeId, pred: impl Fn(&NodeData) -> bool) -> usize {
    arena
        .reachable(root)
        .into_iter()
        .filter(|&id| pred(arena.node(id)))
        .count()
}

#[test]
fn criterion_1_partial_application_pipeline() {
    // stage 1: the syntax tree is the curried five-node tree
    let syntax = parse_text(PARTIAL_APPLY);
    let SyntaxNode::Application(functional, argument) = &syntax else {
        panic!("syntax root must be an application");
    };
    assert!(matches!(**argument, SyntaxNode::Integer(ref v) if *v == 42.into()));
    let SyntaxNode::Lambda(outer, inner) = &**functional else {
        panic!("functional must be the outer lambda");
    };
    assert_eq!(outer, "x");
    let SyntaxNode::Lambda(inner_name, body) = &**inner else {
        panic!("currying must produce a nested unary lambda");
    };
    assert_eq!(inner_name, "y");
    assert!(matches!(&**body, SyntaxNode::Identifier(name) if name == "x"));

    // stage 2: the compiled DAG applies a lambda tower to the constant
    let mut arena = Arena::new();
    let compiled = compile(&mut arena, PARTIAL_APPLY);
    let NodeData::Apply {
        functional,
        argument,
    } = *arena.node(compiled)
    else {
        panic!("compiled root must be an apply");
    };
    assert!(matches!(arena.node(argument), NodeData::Integer(v) if *v == 42.into()));
    let NodeData::Lambda {
        argument: outer_binder,
        body: outer_body,
    } = *arena.node(functional)
    else {
        panic!("compiled functional must be a lambda");
    };
    let NodeData::Lambda {
        argument: inner_binder,
        body: inner_body,
    } = *arena.node(outer_body)
    else {
        panic!("compiled body must be the inner lambda");
    };
    assert_eq!(inner_body, outer_binder, "inner body is the outer binder");
    assert_ne!(inner_binder, outer_binder);

    // stage 3: a single step already fires the outer beta
    let mut ctx = DagContext::new();
    let once = reduce_once(&mut arena, &mut ctx, compiled).unwrap();
    let NodeData::Lambda { body: once_body, .. } = *arena.node(once) else {
        panic!("reduce-once must already expose the lambda");
    };
    assert!(matches!(arena.node(once_body), NodeData::Integer(v) if *v == 42.into()));

    // stage 4: the fixpoint is the same shape
    let (arena_full, _, reduced) = reduce_text(PARTIAL_APPLY);
    let NodeData::Lambda { argument, body } = *arena_full.node(reduced) else {
        panic!("normal form must be a lambda");
    };
    assert!(matches!(arena_full.node(argument), NodeData::Argument));
    assert!(matches!(arena_full.node(body), NodeData::Integer(v) if *v == 42.into()));
    assert!(alpha_equal(&arena, once, &arena_full, reduced));

    println!("acceptance 1 (partial-application pipeline): PASS");
}

#[test]
fn criterion_2_omega_terminates_as_self_application() {
    let (arena, ctx, reduced) = reduce_text(OMEGA);
    let NodeData::Apply {
        functional,
        argument,
    } = *arena.node(reduced)
    else {
        panic!("omega must normalize to an application");
    };
    assert_eq!(
        functional, argument,
        "functional and argument must be one identity"
    );
    assert!(matches!(arena.node(functional), NodeData::Lambda { .. }));
    assert!(
        ctx.rule_firings() < 100,
        "rule firings: {}",
        ctx.rule_firings()
    );

    let mut fuel = Fuel::new(10_000);
    let oracle = interp(&interp_env(), &parse_text(OMEGA), &mut fuel);
    assert_eq!(oracle.unwrap_err(), EvalError::FuelExhausted);

    println!("acceptance 2 (omega termination): PASS");
}

#[test]
fn criterion_3_omega3_builds_one_minimal_mu() {
    let (arena, _, reduced) = reduce_text(OMEGA3);
    let NodeData::Mu { argument, body } = *arena.node(reduced) else {
        panic!("omega3 must normalize to a mu binder");
    };
    let NodeData::Apply { functional, .. } = *arena.node(body) else {
        panic!("mu body must be an application");
    };
    assert_eq!(functional, argument, "the body applies the mu argument");

    let mus = count_kind(&arena, reduced, |n| matches!(n, NodeData::Mu { .. }));
    let muargs = count_kind(&arena, reduced, |n| matches!(n, NodeData::MuArgument));
    assert_eq!((mus, muargs), (1, 1), "exactly one mu and one mu-argument");

    // mu minimality: every surviving binder is used by its body
    let mut ctx = DagContext::new();
    for id in arena.reachable(reduced) {
        if let NodeData::Mu { argument, body } = *arena.node(id) {
            assert!(uses_var(&arena, &mut ctx, body, argument));
        }
    }

    // the rendered graph shows one mu vertex and one mu-argument vertex
    let dot = node_to_dot(&arena, reduced);
    assert_eq!(dot.matches("[label=\"mu\"]").count(), 1);
    assert_eq!(dot.matches("[label=\"muargument\"]").count(), 1);

    println!("acceptance 3 (omega3 limit case): PASS");
}

#[test]
fn criterion_4_let_sharing() {
    let mut arena = Arena::new();
    let root = compile(&mut arena, "(let ((x (pair 1 2))) (pair x x))");
    let NodeData::Pair { first, second } = *arena.node(root) else {
        panic!("root must be a pair");
    };
    assert_eq!(first, second, "both children share one identity");
    assert_eq!(arena.reachable(root).len(), 4, "reachable node count");

    println!("acceptance 4 (let sharing): PASS");
}

#[test]
fn criterion_5_no_structural_duplicates_after_reduce() {
    let entries = load_corpus(&corpus_dir()).unwrap();
    assert!(entries.len() >= 20);
    for entry in entries {
        let source = std::fs::read_to_string(&entry.source_path).unwrap();
        let syntax = parse_text(&source);
        let mut arena = Arena::new();
        let env = default_env(&mut arena);
        let Ok(root) = comp(&mut arena, &env, &syntax) else {
            continue; // deliberately unbound corpus entries have no graph
        };
        let mut ctx = DagContext::new();
        let Ok(reduced) = reduce(&mut arena, &mut ctx, root) else {
            continue; // deliberate type errors abort the pass
        };
        let duplicates = structural_duplicates(&arena, reduced);
        assert!(
            duplicates.is_empty(),
            "{}: duplicated keys {:?}",
            entry.name,
            duplicates
        );
    }

    println!("acceptance 5 (hash-consing soundness): PASS");
}

#[test]
fn criterion_6_oracle_agreement_over_corpus() {
    let report = run_corpus_dir(&corpus_dir(), None).unwrap();
    assert!(report.total() >= 20, "corpus holds {} entries", report.total());
    assert_eq!(report.failed(), 0, "corpus failures:\n{}", report);

    // the Church-numeral entry normalizes to Church five
    let addition = "((lambda (m n s z) (m s (n s z))) \
                     (lambda (s z) (s (s z))) \
                     (lambda (s z) (s (s (s z)))))";
    let (arena_sum, _, sum) = reduce_text(addition);
    let (arena_five, _, five) = reduce_text("(lambda (s z) (s (s (s (s (s z))))))");
    assert!(alpha_equal(&arena_sum, sum, &arena_five, five));

    println!("acceptance 6 (oracle agreement): PASS");
}

#[test]
fn criterion_7_reduction_is_idempotent() {
    let entries = load_corpus(&corpus_dir()).unwrap();
    for entry in entries {
        let source = std::fs::read_to_string(&entry.source_path).unwrap();
        let syntax = parse_text(&source);
        let mut arena = Arena::new();
        let env = default_env(&mut arena);
        let Ok(root) = comp(&mut arena, &env, &syntax) else {
            continue;
        };
        let mut ctx = DagContext::new();
        let Ok(reduced) = reduce(&mut arena, &mut ctx, root) else {
            continue;
        };
        let mut fresh = DagContext::new();
        let again = reduce(&mut arena, &mut fresh, reduced).unwrap();
        assert!(
            alpha_equal(&arena, reduced, &arena, again),
            "{}: reducing the normal form changed it",
            entry.name
        );
    }

    println!("acceptance 7 (idempotence): PASS");
}

#[test]
fn criterion_8_delta_ports() {
    let program = "((lambda (x) x) (delta in))";

    // bound: the closed program reduces to the sampled constant
    let mut arena = Arena::new();
    let root = compile(&mut arena, program);
    let mut ctx = DagContext::new();
    let mut bindings = PortBinding::new();
    let nine = arena.integer(9);
    bindings.bind("in", nine);
    let closed = bind_ports(&mut arena, &mut ctx, root, &bindings);
    let reduced = reduce(&mut arena, &mut ctx, closed).unwrap();
    assert_eq!(arena.printed(reduced), "9");

    // unbound: the normal form retains exactly one port
    let (arena_open, _, open) = reduce_text(program);
    let ports = count_kind(&arena_open, open, |n| matches!(n, NodeData::DeltaPort(_)));
    assert_eq!(ports, 1);

    println!("acceptance 8 (delta ports): PASS");
}

#[test]
fn criterion_9_deterministic_dot_output() {
    for program in [PARTIAL_APPLY, OMEGA, OMEGA3, "(+ 2 3)"] {
        let (arena_a, _, reduced_a) = reduce_text(program);
        let (arena_b, _, reduced_b) = reduce_text(program);
        assert_eq!(
            node_to_dot(&arena_a, reduced_a),
            node_to_dot(&arena_b, reduced_b),
            "DOT output differs between runs of {}",
            program
        );
    }

    println!("acceptance 9 (determinism): PASS");
}
