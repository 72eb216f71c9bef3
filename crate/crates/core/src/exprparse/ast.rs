use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Syntax tree of a scalar expression. Variables are resolved to indices
/// into the identifier list supplied at parse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

const UNARY_PREC: u8 = 3;
const ATOM_PREC: u8 = 5;

impl Node {
    fn precedence(&self) -> u8 {
        match self {
            Node::Num(v) if v.is_sign_negative() => UNARY_PREC,
            Node::Num(_) | Node::Var(_) | Node::Call(..) => ATOM_PREC,
            Node::Neg(_) => UNARY_PREC,
            Node::Bin(op, ..) => op.precedence(),
        }
    }

    pub(crate) fn write(&self, names: &[String], out: &mut String) {
        match self {
            Node::Num(v) => {
                use fmt::Write;
                if *v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
                    let _ = write!(out, "{v}");
                } else {
                    let _ = write!(out, "{v:?}");
                }
            }
            Node::Var(i) => out.push_str(&names[*i]),
            Node::Neg(inner) => {
                out.push('-');
                // the unary operand is parsed as another unary or a power
                write_wrapped(inner, inner.precedence() < UNARY_PREC, names, out);
            }
            Node::Call(f, arg) => {
                out.push_str(f.name());
                out.push('(');
                arg.write(names, out);
                out.push(')');
            }
            Node::Bin(BinOp::Pow, base, exp) => {
                write_wrapped(base, base.precedence() < ATOM_PREC, names, out);
                out.push('^');
                write_wrapped(exp, exp.precedence() < UNARY_PREC, names, out);
            }
            Node::Bin(op, lhs, rhs) => {
                let p = op.precedence();
                write_wrapped(lhs, lhs.precedence() < p, names, out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                write_wrapped(rhs, rhs.precedence() <= p, names, out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Node::Num(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Bin(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

fn write_wrapped(node: &Node, paren: bool, names: &[String], out: &mut String) {
    if paren {
        out.push('(');
    }
    node.write(names, out);
    if paren {
        out.push(')');
    }
}
