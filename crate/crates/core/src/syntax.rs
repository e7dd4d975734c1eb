//! The curried abstract syntax tree and its parser.
//!
//! Multi-binder surface forms are expanded here: `(lambda (x y) body)`
//! becomes two nested unary lambdas, `(let ((x a) (y b)) body)` two nested
//! lets, and `(f a b)` two nested binary applications. Everything after the
//! parser deals only in unary binders and binary application.

use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::sexpr::SExpr;

/// AST of the surface language. Lambda and Let are always unary;
/// the tree has no sharing and no cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxNode {
    Integer(BigInt),
    True,
    False,
    Unit,
    Application(Arc<SyntaxNode>, Arc<SyntaxNode>),
    Lambda(String, Arc<SyntaxNode>),
    Let(String, Arc<SyntaxNode>, Arc<SyntaxNode>),
    If(Arc<SyntaxNode>, Arc<SyntaxNode>, Arc<SyntaxNode>),
    Identifier(String),
    Pair(Arc<SyntaxNode>, Arc<SyntaxNode>),
    First(Arc<SyntaxNode>),
    Second(Arc<SyntaxNode>),
    InjectLeft(Arc<SyntaxNode>),
    InjectRight(Arc<SyntaxNode>),
    Case(Arc<SyntaxNode>, Arc<SyntaxNode>, Arc<SyntaxNode>),
    Delta(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected syntax: {0}")]
    UnexpectedSyntax(String),
}

fn unexpected(form: &SExpr, why: &str) -> ParseError {
    ParseError::UnexpectedSyntax(format!("{} in `{}`", why, form))
}

/// Head symbols that select a special form. They stay usable as plain
/// identifiers anywhere but the head of a list.
const RESERVED_HEADS: [&str; 10] = [
    "lambda",
    "let",
    "if",
    "pair",
    "first",
    "second",
    "inject-left",
    "inject-right",
    "case",
    "delta",
];

/// Parses one symbolic expression into syntax.
pub fn parse(sexpr: &SExpr) -> Result<SyntaxNode, ParseError> {
    match sexpr {
        SExpr::IntAtom(value) => Ok(SyntaxNode::Integer(value.clone())),
        SExpr::BoolAtom(true) => Ok(SyntaxNode::True),
        SExpr::BoolAtom(false) => Ok(SyntaxNode::False),
        SExpr::SymbolAtom(name) => Ok(SyntaxNode::Identifier(name.clone())),
        SExpr::ListForm(items) => parse_list(sexpr, items),
    }
}

fn parse_list(whole: &SExpr, items: &[SExpr]) -> Result<SyntaxNode, ParseError> {
    let Some(head) = items.first() else {
        return Ok(SyntaxNode::Unit);
    };
    if let SExpr::SymbolAtom(name) = head {
        if RESERVED_HEADS.contains(&name.as_str()) {
            return parse_special(whole, name, &items[1..]);
        }
    }
    // Remaining case, applications: fold the arguments leftward.
    if items.len() < 2 {
        return Err(unexpected(whole, "application needs at least one argument"));
    }
    let mut node = parse(&items[0])?;
    for argument in &items[1..] {
        node = SyntaxNode::Application(Arc::new(node), Arc::new(parse(argument)?));
    }
    Ok(node)
}

fn parse_special(whole: &SExpr, head: &str, rest: &[SExpr]) -> Result<SyntaxNode, ParseError> {
    match (head, rest) {
        ("if", [condition, true_expr, false_expr]) => Ok(SyntaxNode::If(
            Arc::new(parse(condition)?),
            Arc::new(parse(true_expr)?),
            Arc::new(parse(false_expr)?),
        )),
        ("lambda", [binders, body]) => {
            let names = binder_names(whole, binders)?;
            let mut node = parse(body)?;
            for name in names.into_iter().rev() {
                node = SyntaxNode::Lambda(name, Arc::new(node));
            }
            Ok(node)
        }
        ("let", [bindings, body]) => {
            let SExpr::ListForm(pairs) = bindings else {
                return Err(unexpected(whole, "let bindings must be a list"));
            };
            let mut parsed = Vec::with_capacity(pairs.len());
            for pair in pairs {
                let SExpr::ListForm(entry) = pair else {
                    return Err(unexpected(whole, "let binding must be (name value)"));
                };
                let [SExpr::SymbolAtom(name), value] = entry.as_slice() else {
                    return Err(unexpected(whole, "let binding must be (name value)"));
                };
                parsed.push((name.clone(), parse(value)?));
            }
            let mut node = parse(body)?;
            for (name, value) in parsed.into_iter().rev() {
                node = SyntaxNode::Let(name, Arc::new(value), Arc::new(node));
            }
            Ok(node)
        }
        ("pair", [first, second]) => Ok(SyntaxNode::Pair(
            Arc::new(parse(first)?),
            Arc::new(parse(second)?),
        )),
        ("first", [pair]) => Ok(SyntaxNode::First(Arc::new(parse(pair)?))),
        ("second", [pair]) => Ok(SyntaxNode::Second(Arc::new(parse(pair)?))),
        ("inject-left", [expr]) => Ok(SyntaxNode::InjectLeft(Arc::new(parse(expr)?))),
        ("inject-right", [expr]) => Ok(SyntaxNode::InjectRight(Arc::new(parse(expr)?))),
        ("case", [expr, left, right]) => Ok(SyntaxNode::Case(
            Arc::new(parse(expr)?),
            Arc::new(parse(left)?),
            Arc::new(parse(right)?),
        )),
        ("delta", [SExpr::SymbolAtom(name)]) => Ok(SyntaxNode::Delta(name.clone())),
        _ => Err(unexpected(whole, &format!("malformed `{}` form", head))),
    }
}

fn binder_names(whole: &SExpr, binders: &SExpr) -> Result<Vec<String>, ParseError> {
    let SExpr::ListForm(items) = binders else {
        return Err(unexpected(whole, "lambda binders must be a list"));
    };
    items
        .iter()
        .map(|item| match item {
            SExpr::SymbolAtom(name) => Ok(name.clone()),
            _ => Err(unexpected(whole, "lambda binder must be an identifier")),
        })
        .collect()
}

impl SyntaxNode {
    /// Short label naming the variant and its literal payload, shared by the
    /// tree dump and the DOT emitter.
    pub fn label(&self) -> String {
        match self {
            SyntaxNode::Integer(value) => format!("integer {}", value),
            SyntaxNode::True => "true".to_string(),
            SyntaxNode::False => "false".to_string(),
            SyntaxNode::Unit => "unit".to_string(),
            SyntaxNode::Application(..) => "application".to_string(),
            SyntaxNode::Lambda(name, _) => format!("lambda {}", name),
            SyntaxNode::Let(name, ..) => format!("let {}", name),
            SyntaxNode::If(..) => "if".to_string(),
            SyntaxNode::Identifier(name) => format!("identifier {}", name),
            SyntaxNode::Pair(..) => "pair".to_string(),
            SyntaxNode::First(_) => "first".to_string(),
            SyntaxNode::Second(_) => "second".to_string(),
            SyntaxNode::InjectLeft(_) => "inject-left".to_string(),
            SyntaxNode::InjectRight(_) => "inject-right".to_string(),
            SyntaxNode::Case(..) => "case".to_string(),
            SyntaxNode::Delta(name) => format!("delta {}", name),
        }
    }

    /// Children in order, each tagged with its role.
    fn children(&self) -> Vec<(&'static str, &SyntaxNode)> {
        match self {
            SyntaxNode::Application(functional, argument) => {
                vec![("functional", functional), ("argument", argument)]
            }
            SyntaxNode::Lambda(_, body) => vec![("body", body)],
            SyntaxNode::Let(_, value, body) => vec![("value", value), ("body", body)],
            SyntaxNode::If(condition, true_expr, false_expr) => vec![
                ("condition", condition),
                ("true", true_expr),
                ("false", false_expr),
            ],
            SyntaxNode::Pair(first, second) => vec![("first", first), ("second", second)],
            SyntaxNode::First(pair) => vec![("pair", pair)],
            SyntaxNode::Second(pair) => vec![("pair", pair)],
            SyntaxNode::InjectLeft(expr) => vec![("value", expr)],
            SyntaxNode::InjectRight(expr) => vec![("value", expr)],
            SyntaxNode::Case(expr, left, right) => {
                vec![("value", expr), ("left", left), ("right", right)]
            }
            _ => vec![],
        }
    }

    /// Indented tree dump used by the CLI `parse` subcommand.
    pub fn pretty(&self) -> String {
        fn walk(node: &SyntaxNode, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&node.label());
            out.push('\n');
            for (_, child) in node.children() {
                walk(child, depth + 1, out);
            }
        }
        let mut out = String::new();
        walk(self, 0, &mut out);
        out
    }

    #[cfg(test)]
    fn node_count(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|(_, c)| c.node_count())
            .sum::<usize>()
    }
}

fn escape_dot(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the syntax tree as a DOT digraph: one vertex per AST node,
/// edges ordered and labeled by child role.
pub fn syntax_to_dot(node: &SyntaxNode) -> String {
    fn walk(node: &SyntaxNode, counter: &mut usize, out: &mut String) -> usize {
        let id = *counter;
        *counter += 1;
        out.push_str(&format!("  s{} [label=\"{}\"];\n", id, escape_dot(&node.label())));
        for (role, child) in node.children() {
            let child_id = walk(child, counter, out);
            out.push_str(&format!("  s{} -> s{} [label=\"{}\"];\n", id, child_id, role));
        }
        id
    }
    let mut out = String::from("digraph syntax {\n");
    let mut counter = 0usize;
    walk(node, &mut counter, &mut out);
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::read_sexpr;
    use proptest::prelude::*;

    fn parse_text(text: &str) -> Result<SyntaxNode, ParseError> {
        parse(&read_sexpr(text).unwrap())
    }

    fn ident(name: &str) -> Arc<SyntaxNode> {
        Arc::new(SyntaxNode::Identifier(name.to_string()))
    }

    #[test]
    fn multi_argument_lambda_curries() {
        let got = parse_text("(lambda (x y) x)").unwrap();
        let want = SyntaxNode::Lambda(
            "x".to_string(),
            Arc::new(SyntaxNode::Lambda("y".to_string(), ident("x"))),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn application_folds_leftward() {
        let got = parse_text("(f a b)").unwrap();
        let want = SyntaxNode::Application(
            Arc::new(SyntaxNode::Application(ident("f"), ident("a"))),
            ident("b"),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn let_folds_rightward() {
        let got = parse_text("(let ((x 1) (y 2)) y)").unwrap();
        let want = SyntaxNode::Let(
            "x".to_string(),
            Arc::new(SyntaxNode::Integer(BigInt::from(1))),
            Arc::new(SyntaxNode::Let(
                "y".to_string(),
                Arc::new(SyntaxNode::Integer(BigInt::from(2))),
                ident("y"),
            )),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn empty_list_is_unit() {
        assert_eq!(parse_text("()").unwrap(), SyntaxNode::Unit);
    }

    #[test]
    fn missing_if_arm_is_unexpected_syntax() {
        assert!(matches!(
            parse_text("(if a b)"),
            Err(ParseError::UnexpectedSyntax(_))
        ));
    }

    #[test]
    fn unary_application_rejected() {
        assert!(matches!(
            parse_text("(f)"),
            Err(ParseError::UnexpectedSyntax(_))
        ));
    }

    #[test]
    fn reserved_symbols_usable_outside_head_position() {
        let got = parse_text("(f pair)").unwrap();
        let want = SyntaxNode::Application(ident("f"), ident("pair"));
        assert_eq!(got, want);
        // and as a binder name
        let got = parse_text("(lambda (if) if)").unwrap();
        let want = SyntaxNode::Lambda("if".to_string(), ident("if"));
        assert_eq!(got, want);
    }

    #[test]
    fn wrong_arity_special_form_rejected() {
        assert!(parse_text("(pair 1 2 3)").is_err());
        assert!(parse_text("(first)").is_err());
        assert!(parse_text("(case x l)").is_err());
    }

    #[test]
    fn delta_form_parses_to_port() {
        assert_eq!(
            parse_text("(delta sensor)").unwrap(),
            SyntaxNode::Delta("sensor".to_string())
        );
        assert!(parse_text("(delta 3)").is_err());
        assert!(parse_text("(delta a b)").is_err());
    }

    #[test]
    fn zero_binder_lambda_folds_to_body() {
        // foldr over an empty binder list leaves the bare body.
        assert_eq!(
            parse_text("(lambda () 5)").unwrap(),
            SyntaxNode::Integer(BigInt::from(5))
        );
    }

    #[test]
    fn case_takes_three_arguments() {
        let got = parse_text("(case e l r)").unwrap();
        assert!(matches!(got, SyntaxNode::Case(..)));
    }

    #[test]
    fn syntax_dot_single_vertex() {
        let dot = syntax_to_dot(&SyntaxNode::Integer(BigInt::from(42)));
        assert_eq!(dot.matches("label=").count(), 1);
        assert!(dot.contains("integer 42"));
    }

    #[test]
    fn syntax_dot_lambda_body_edge() {
        let node = parse_text("(lambda (x) x)").unwrap();
        let dot = syntax_to_dot(&node);
        assert_eq!(dot.matches("[label=\"").count(), 2 + 1); // two vertices, one edge
        assert!(dot.contains("label=\"body\""));
    }

    #[test]
    fn syntax_dot_partial_apply_has_five_vertices() {
        let node = parse_text("((lambda (x y) x) 42)").unwrap();
        assert_eq!(node.node_count(), 5);
        let dot = syntax_to_dot(&node);
        assert_eq!(dot.matches("  s").count() - dot.matches(" -> ").count(), 5);
    }

    fn arb_symbol() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("x".to_string()),
            Just("y".to_string()),
            Just("f".to_string()),
            Just("long-name".to_string()),
            Just("+".to_string()),
        ]
    }

    fn arb_sexpr() -> impl Strategy<Value = SExpr> {
        let leaf = prop_oneof![
            any::<i64>().prop_map(|v| SExpr::IntAtom(BigInt::from(v))),
            any::<bool>().prop_map(SExpr::BoolAtom),
            arb_symbol().prop_map(SExpr::SymbolAtom),
        ];
        leaf.prop_recursive(4, 32, 4, |inner| {
            prop::collection::vec(inner, 0..4).prop_map(SExpr::ListForm)
        })
    }

    proptest! {
        #[test]
        fn print_read_round_trip(sexpr in arb_sexpr()) {
            let reread = read_sexpr(&sexpr.to_string()).unwrap();
            prop_assert_eq!(&reread, &sexpr);
            // and therefore the parses agree wherever parsing succeeds
            let a = parse(&sexpr);
            let b = parse(&reread);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn n_binder_lambda_equals_hand_curried(names in prop::collection::vec(arb_symbol(), 1..5)) {
            let flat = SExpr::ListForm(vec![
                SExpr::SymbolAtom("lambda".to_string()),
                SExpr::ListForm(names.iter().cloned().map(SExpr::SymbolAtom).collect()),
                SExpr::IntAtom(BigInt::from(1)),
            ]);
            let mut curried = SExpr::IntAtom(BigInt::from(1));
            for name in names.iter().rev() {
                curried = SExpr::ListForm(vec![
                    SExpr::SymbolAtom("lambda".to_string()),
                    SExpr::ListForm(vec![SExpr::SymbolAtom(name.clone())]),
                    curried,
                ]);
            }
            prop_assert_eq!(parse(&flat).unwrap(), parse(&curried).unwrap());
        }
    }
}
