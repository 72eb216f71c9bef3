//! Random expressions for the parser/AD checks.
//!
//! The generator only builds constructions that stay finite and inside
//! their natural domain for `x ∈ [−1, 1]`, so every sample is a fair
//! comparison against finite differences.

use rand::Rng;

use crate::exprparse::{BinOp, Expr, Func, Node};

fn num(v: f64) -> Node {
    Node::Num(v)
}

fn bin(op: BinOp, a: Node, b: Node) -> Node {
    Node::Bin(op, Box::new(a), Box::new(b))
}

fn call(f: Func, a: Node) -> Node {
    Node::Call(f, Box::new(a))
}

/// `c + sin(a)` with `c ≥ 1.5`, a strictly positive base.
fn positive(rng: &mut impl Rng, a: Node) -> Node {
    let c = 1.5 + (rng.random_range(0..10) as f64) / 10.0;
    bin(BinOp::Add, num(c), call(Func::Sin, a))
}

fn square(a: Node) -> Node {
    bin(BinOp::Pow, a, num(2.0))
}

pub fn random_node(rng: &mut impl Rng, depth: usize) -> Node {
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.6) {
            Node::Var(0)
        } else {
            num((rng.random_range(1..40) as f64) / 8.0)
        };
    }
    let d = depth - 1;
    match rng.random_range(0..13) {
        0 => bin(BinOp::Add, random_node(rng, d), random_node(rng, d)),
        1 => bin(BinOp::Sub, random_node(rng, d), random_node(rng, d)),
        2 => bin(BinOp::Mul, random_node(rng, d), random_node(rng, d)),
        3 => {
            let den = bin(BinOp::Add, num(1.0), square(random_node(rng, d)));
            bin(BinOp::Div, random_node(rng, d), den)
        }
        4 => call(Func::Sin, random_node(rng, d)),
        5 => call(Func::Cos, random_node(rng, d)),
        6 => call(Func::Exp, call(Func::Sin, random_node(rng, d))),
        7 => call(Func::Ln, bin(BinOp::Add, num(1.0), square(random_node(rng, d)))),
        8 => {
            let inner = random_node(rng, d);
            let base = positive(rng, inner);
            call(Func::Sqrt, base)
        }
        9 => {
            let inner = random_node(rng, d);
            let base = positive(rng, inner);
            let p = [-2.0, -1.0, 0.5, 1.5, 2.0, 3.0][rng.random_range(0..6)];
            bin(BinOp::Pow, base, num(p))
        }
        10 => {
            let inner = random_node(rng, d);
            let base = positive(rng, inner);
            bin(BinOp::Pow, base, call(Func::Cos, random_node(rng, d)))
        }
        11 => Node::Neg(Box::new(random_node(rng, d))),
        _ => {
            // integer power of a possibly negative base
            let inner = call(Func::Sin, random_node(rng, d));
            let base = bin(BinOp::Sub, inner, num(0.5));
            bin(BinOp::Pow, base, num([2.0, 3.0][rng.random_range(0..2)]))
        }
    }
}

pub fn random_expr(rng: &mut impl Rng, depth: usize) -> Expr {
    Expr::from_node(random_node(rng, depth), &["x"])
}

const JUNK: &[u8] = b"()+-*/^.,$#e1x ";

/// A random single edit of `text`: delete, insert, truncate or duplicate.
pub fn mutate(rng: &mut impl Rng, text: &str) -> String {
    let mut bytes = text.as_bytes().to_vec();
    if bytes.is_empty() {
        return "(".into();
    }
    let at = rng.random_range(0..bytes.len());
    match rng.random_range(0..4) {
        0 => {
            bytes.remove(at);
        }
        1 => bytes.insert(at, JUNK[rng.random_range(0..JUNK.len())]),
        2 => bytes.truncate(at),
        _ => {
            let b = bytes[at];
            bytes.insert(at, b);
        }
    }
    String::from_utf8(bytes).unwrap_or_default()
}

/// Inputs that must always be rejected.
pub const MALFORMED: &[&str] = &[
    "",
    "(",
    ")",
    "x +",
    "2*sin(x",
    "sin x",
    "sin()",
    "1e",
    "1e+",
    "x $ 2",
    "exp(2*z)",
    "x^",
    "3..2",
    "sinh(x)",
    "x x",
    "((x)",
    "x)",
    "*x",
    "x**2",
    "é",
    "1e999",
];
