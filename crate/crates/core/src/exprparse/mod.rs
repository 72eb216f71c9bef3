//! Scalar expressions for user-defined mass profiles and potentials.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right-associative)
//! primary := number | variable | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | sqrt
//! ```
//!
//! Evaluation is done on second-order [`Jet`]s so every evaluation yields the
//! value together with exact first and second derivatives.

mod ast;
mod dual;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{BinOp, Func, Node};
pub use dual::Jet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {}: expected {expected}", offset + 1)]
    SyntaxError { offset: usize, expected: String },
    #[error("unknown identifier `{name}` at column {}", offset + 1)]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    fn syntax(offset: usize, expected: impl Into<String>) -> Self {
        ParseError::SyntaxError {
            offset,
            expected: expected.into(),
        }
    }

    /// Zero-based byte offset of the offending token.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::SyntaxError { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }

    /// One-based column, as shown in messages.
    pub fn column(&self) -> usize {
        self.offset() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },
}

/// A parsed expression together with the identifiers it was resolved against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
}

/// Parse `text`, resolving identifiers against `variables`.
pub fn parse_expression(text: &str, variables: &[&str]) -> Result<Expr, ParseError> {
    let vars: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
    let root = parser::Parser::new(text, &vars)?.parse_all()?;
    Ok(Expr { root, vars })
}

/// Single-variable convenience: value, first and second derivative at `x`.
pub fn eval_dual(expr: &Expr, x: f64) -> Result<(f64, f64, f64), EvalError> {
    let j = expr.eval_jet(&[x], Some(0))?;
    Ok((j.v, j.d1, j.d2))
}

impl Expr {
    pub fn from_node(root: Node, variables: &[&str]) -> Self {
        Expr {
            root,
            vars: variables.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Evaluate with the variable at index `seed` as the differentiation
    /// direction (`None` gives plain values with zero derivatives).
    pub fn eval_jet(&self, values: &[f64], seed: Option<usize>) -> Result<Jet, EvalError> {
        self.eval_node(&self.root, values, seed)
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        Ok(self.eval_jet(values, None)?.v)
    }

    /// Value and gradient with respect to every variable.
    pub fn gradient(&self, values: &[f64]) -> Result<(f64, Vec<f64>), EvalError> {
        if values.is_empty() {
            return Ok((self.eval(values)?, Vec::new()));
        }
        let mut grad = Vec::with_capacity(values.len());
        let mut value = 0.0;
        for i in 0..values.len() {
            let j = self.eval_jet(values, Some(i))?;
            value = j.v;
            grad.push(j.d1);
        }
        Ok((value, grad))
    }

    fn domain_err(&self, node: &Node, reason: &str) -> EvalError {
        let mut s = String::new();
        node.write(&self.vars, &mut s);
        EvalError::Domain {
            subexpr: s,
            reason: reason.to_string(),
        }
    }

    fn eval_node(&self, node: &Node, values: &[f64], seed: Option<usize>) -> Result<Jet, EvalError> {
        let out = match node {
            Node::Num(v) => Jet::constant(*v),
            Node::Var(i) => {
                let v = *values
                    .get(*i)
                    .ok_or_else(|| self.domain_err(node, "variable has no value"))?;
                if seed == Some(*i) {
                    Jet::variable(v)
                } else {
                    Jet::constant(v)
                }
            }
            Node::Neg(a) => -self.eval_node(a, values, seed)?,
            Node::Call(f, a) => {
                let x = self.eval_node(a, values, seed)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if x.v <= 0.0 {
                            return Err(self.domain_err(node, "logarithm of a non-positive number"));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x.v < 0.0 {
                            return Err(self.domain_err(node, "square root of a negative number"));
                        }
                        if x.v == 0.0 {
                            if !x.is_constant() {
                                return Err(self.domain_err(node, "square root is not differentiable at 0"));
                            }
                            Jet::constant(0.0)
                        } else {
                            x.sqrt()
                        }
                    }
                }
            }
            Node::Bin(op, a, b) => {
                let x = self.eval_node(a, values, seed)?;
                let y = self.eval_node(b, values, seed)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.v == 0.0 {
                            return Err(self.domain_err(node, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => self.power(node, x, y)?,
                }
            }
        };
        if !out.is_finite() {
            return Err(self.domain_err(node, "result is not finite"));
        }
        Ok(out)
    }

    fn power(&self, node: &Node, base: Jet, exp: Jet) -> Result<Jet, EvalError> {
        if exp.is_constant() {
            let p = exp.v;
            if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                if base.v == 0.0 && p < 0.0 {
                    return Err(self.domain_err(node, "division by zero"));
                }
                return Ok(base.powi(p as i32));
            }
            if base.v <= 0.0 {
                return Err(self.domain_err(node, "non-integer power of a non-positive base"));
            }
            return Ok(base.powf(p));
        }
        if base.v <= 0.0 {
            return Err(self.domain_err(node, "variable exponent needs a positive base"));
        }
        Ok(base.pow(exp))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.root.write(&self.vars, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(expr: &Expr, x: f64) -> (f64, f64) {
        let f = |x: f64| expr.eval(&[x]).unwrap();
        let h = 1e-3;
        let d1 = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
        let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h)
            - f(x - 2.0 * h))
            / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn square_at_three() {
        let e = parse_expression("x^2", &["x"]).unwrap();
        assert_eq!(eval_dual(&e, 3.0).unwrap(), (9.0, 6.0, 2.0));
        let (d1, d2) = fd(&e, 3.0);
        assert!((d1 - 6.0).abs() < 1e-9 && (d2 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn lorentzian_profile() {
        let e = parse_expression("1/(1+x^2)", &["x"]).unwrap();
        let (v, d1, d2) = eval_dual(&e, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!((d1 + 0.5).abs() < 1e-15);
        assert!((d2 - 0.5).abs() < 1e-15);
        let (f1, f2) = fd(&e, 1.0);
        assert!((d1 - f1).abs() < 1e-9 && (d2 - f2).abs() < 1e-6);
    }

    #[test]
    fn sine_at_zero() {
        let e = parse_expression("sin(x)", &["x"]).unwrap();
        assert_eq!(eval_dual(&e, 0.0).unwrap(), (0.0, 1.0, -0.0));
    }

    #[test]
    fn unclosed_call_reports_end_of_input() {
        let err = parse_expression("2*sin(x", &["x"]).unwrap_err();
        assert!(matches!(err, ParseError::SyntaxError { .. }));
        assert_eq!(err.offset(), 7);
        assert_eq!(err.column(), 8);
    }

    #[test]
    fn unknown_identifier_is_named() {
        let err = parse_expression("exp(2*z)", &["x"]).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownIdentifier {
                name: "z".into(),
                offset: 6
            }
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let vars = ["x"];
        let v = |s: &str| parse_expression(s, &vars).unwrap().eval(&[2.0]).unwrap();
        assert_eq!(v("-x^2"), -4.0);
        assert_eq!(v("2^3^2"), 512.0);
        assert_eq!(v("8/4/2"), 1.0);
        assert_eq!(v("1-2-3"), -4.0);
        assert_eq!(v("2^-1"), 0.5);
        assert_eq!(v("(-x)^3"), -8.0);
        assert_eq!(v("1 + 2*x^2"), 9.0);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse_expression("1 + ln(x - 3)", &["x"]).unwrap();
        match eval_dual(&e, 1.0).unwrap_err() {
            EvalError::Domain { subexpr, .. } => assert_eq!(subexpr, "ln(x - 3)"),
        }
        let e = parse_expression("1/(x-1)", &["x"]).unwrap();
        assert!(eval_dual(&e, 1.0).is_err());
        let e = parse_expression("x^0.5", &["x"]).unwrap();
        assert!(eval_dual(&e, -1.0).is_err());
        let e = parse_expression("sqrt(x)", &["x"]).unwrap();
        assert!(eval_dual(&e, -1.0).is_err());
    }

    #[test]
    fn multivariable_gradient() {
        let e = parse_expression("1 + x1^2 + 3*x2^2", &["x1", "x2"]).unwrap();
        let (v, g) = e.gradient(&[1.0, 2.0]).unwrap();
        assert_eq!(v, 14.0);
        assert_eq!(g, vec![2.0, 12.0]);
    }

    #[test]
    fn display_reparses_identically() {
        for s in ["-x^2", "(-x)^2", "x^-x", "a - (b - c)", "-(a*b) / sqrt(c)", "2^3^a", "--a", "1e-7 * a"] {
            let e = parse_expression(s, &["a", "b", "c", "x"]).unwrap();
            let again = parse_expression(&e.to_string(), &["a", "b", "c", "x"]).unwrap();
            assert_eq!(e, again, "{s} -> {e}");
        }
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let s = "(".repeat(100_000) + "x";
        assert!(parse_expression(&s, &["x"]).is_err());
        let s = "-".repeat(100_000) + "x";
        assert!(parse_expression(&s, &["x"]).is_err());
    }
}
