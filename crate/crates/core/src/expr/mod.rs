//! Analytic expressions in one complex variable `z`.
//!
//! Expressions are parsed from a small infix language (see [`parse`]) and
//! evaluated either for their value or as an order-3 [`Jet3`]. Logarithm and
//! square root use principal branches; evaluating on their cut is an error
//! rather than a silent branch choice.

mod jet;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use jet::Jet3;
pub use parse::{parse, ParseError};

/// Largest exponent magnitude accepted by `^`.
pub const MAX_EXPONENT: i32 = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{func} evaluated on its branch cut at {at}")]
    BranchCut { func: &'static str, at: Complex64 },
    #[error("non-finite value during evaluation")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    PowInt(Box<Node>, i32),
    Exp(Box<Node>),
    Log(Box<Node>),
    Sqrt(Box<Node>),
}

/// An immutable, cheaply clonable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticExpr {
    root: Arc<Node>,
}

impl AnalyticExpr {
    pub fn new(root: Node) -> Self {
        Self { root: Arc::new(root) }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn var() -> Self {
        Self::new(Node::Var)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(Node::Const(c))
    }

    /// `c * self`, used to build scaled generators.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(Node::Mul(
            Box::new(Node::Const(c)),
            Box::new((*self.root).clone()),
        ))
    }

    /// Value at `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, ExprError> {
        let v = eval_value(&self.root, z)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Overflow)
        }
    }

    /// Value and derivatives of orders 1..=3 at `z`.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet3, ExprError> {
        let j = eval_jet(&self.root, z)?;
        if j.is_finite() {
            Ok(j)
        } else {
            Err(ExprError::Overflow)
        }
    }
}

impl std::str::FromStr for AnalyticExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

fn eval_value(node: &Node, z: Complex64) -> Result<Complex64, ExprError> {
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var => z,
        Node::Neg(a) => -eval_value(a, z)?,
        Node::Add(a, b) => eval_value(a, z)? + eval_value(b, z)?,
        Node::Sub(a, b) => eval_value(a, z)? - eval_value(b, z)?,
        Node::Mul(a, b) => eval_value(a, z)? * eval_value(b, z)?,
        Node::Div(a, b) => {
            let num = eval_value(a, z)?;
            let den = eval_value(b, z)?;
            if den == Complex64::new(0.0, 0.0) {
                return Err(ExprError::DivisionByZero);
            }
            num / den
        }
        Node::PowInt(a, n) => {
            let x = eval_value(a, z)?;
            if *n < 0 && x == Complex64::new(0.0, 0.0) {
                return Err(ExprError::DivisionByZero);
            }
            x.powi(*n)
        }
        Node::Exp(a) => eval_value(a, z)?.exp(),
        Node::Log(a) => {
            let x = eval_value(a, z)?;
            jet::check_cut(x, "log")?;
            x.ln()
        }
        Node::Sqrt(a) => {
            let x = eval_value(a, z)?;
            jet::check_cut(x, "sqrt")?;
            x.sqrt()
        }
    })
}

fn eval_jet(node: &Node, z: Complex64) -> Result<Jet3, ExprError> {
    Ok(match node {
        Node::Const(c) => Jet3::constant(*c),
        Node::Var => Jet3::variable(z),
        Node::Neg(a) => -eval_jet(a, z)?,
        Node::Add(a, b) => eval_jet(a, z)? + eval_jet(b, z)?,
        Node::Sub(a, b) => eval_jet(a, z)? - eval_jet(b, z)?,
        Node::Mul(a, b) => eval_jet(a, z)? * eval_jet(b, z)?,
        Node::Div(a, b) => eval_jet(a, z)?.checked_div(&eval_jet(b, z)?)?,
        Node::PowInt(a, n) => eval_jet(a, z)?.powi(*n)?,
        Node::Exp(a) => eval_jet(a, z)?.exp(),
        Node::Log(a) => eval_jet(a, z)?.ln()?,
        Node::Sqrt(a) => eval_jet(a, z)?.sqrt()?,
    })
}

// Printing precedence levels; higher binds tighter.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const FACTOR: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => FACTOR,
        Node::PowInt(..) => POWER,
        _ => ATOM,
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, node: &Node, min_level: u8) -> fmt::Result {
    let paren = level(node) < min_level;
    if paren {
        f.write_str("(")?;
    }
    match node {
        Node::Const(c) => write_const(f, *c)?,
        Node::Var => f.write_str("z")?,
        Node::Neg(a) => {
            f.write_str("-")?;
            write_node(f, a, POWER)?;
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            write_node(f, a, SUM)?;
            f.write_str(if matches!(node, Node::Add(..)) { " + " } else { " - " })?;
            write_node(f, b, PRODUCT)?;
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            write_node(f, a, PRODUCT)?;
            f.write_str(if matches!(node, Node::Mul(..)) { "*" } else { "/" })?;
            write_node(f, b, FACTOR)?;
        }
        Node::PowInt(a, n) => {
            write_node(f, a, ATOM)?;
            write!(f, "^{n}")?;
        }
        Node::Exp(a) | Node::Log(a) | Node::Sqrt(a) => {
            let name = match node {
                Node::Exp(_) => "exp",
                Node::Log(_) => "log",
                _ => "sqrt",
            };
            write!(f, "{name}(")?;
            write_node(f, a, SUM)?;
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn write_const(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 && c.re.is_sign_positive() {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 && c.re.is_sign_positive() && c.im == 1.0 {
        f.write_str("i")
    } else if c.im == 0.0 {
        write!(f, "(-{})", -c.re)
    } else {
        // Not a single literal: printed as an equivalent parenthesized sum.
        let re = if c.re < 0.0 { format!("-{}", -c.re) } else { c.re.to_string() };
        let sign = if c.im < 0.0 { '-' } else { '+' };
        write!(f, "({re} {sign} {}*i)", c.im.abs())
    }
}

/// Prints with the minimal parentheses needed for `parse` to rebuild the
/// same tree (exact for trees whose constants are non-negative reals or `i`).
impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, SUM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jet(text: &str, z: Complex64) -> Jet3 {
        parse(text).unwrap().eval_jet(z).unwrap()
    }

    #[test]
    fn square_at_one() {
        let j = jet("z^2", c(1.0, 0.0));
        assert_eq!(j, Jet3::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn parabolic_generator_at_boundary_point() {
        let j = jet("-(1-z)^2", c(1.0, 0.0));
        assert_eq!(j.c0.norm(), 0.0);
        assert_eq!(j.c1.norm(), 0.0);
        assert_eq!(j.c2, c(-2.0, 0.0));
        assert_eq!(j.c3.norm(), 0.0);
    }

    #[test]
    fn exp_at_zero() {
        let one = c(1.0, 0.0);
        assert_eq!(jet("exp(z)", c(0.0, 0.0)), Jet3::new(one, one, one, one));
    }

    #[test]
    fn value_and_jet_paths_agree() {
        let e = parse("(2*z+(1-z)*log(2/(1-z)))/(2+(1-z)*log(2/(1-z)))").unwrap();
        let z = c(0.3, -0.4);
        assert!((e.eval(z).unwrap() - e.eval_jet(z).unwrap().c0).norm() < 1e-15);
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(parse("1/z").unwrap().eval(c(0.0, 0.0)), Err(ExprError::DivisionByZero));
        assert_eq!(parse("1/z").unwrap().eval_jet(c(0.0, 0.0)), Err(ExprError::DivisionByZero));
        assert!(matches!(
            parse("log(z)").unwrap().eval(c(-0.5, 0.0)),
            Err(ExprError::BranchCut { func: "log", .. })
        ));
        assert!(matches!(
            parse("sqrt(z-1)").unwrap().eval_jet(c(0.5, 0.0)),
            Err(ExprError::BranchCut { func: "sqrt", .. })
        ));
        assert_eq!(parse("exp(exp(z))").unwrap().eval(c(10.0, 0.0)), Err(ExprError::Overflow));
    }

    #[test]
    fn printing_parenthesizes_only_where_needed() {
        let cases = [
            ("-(1-z)^2", "-(1 - z)^2"),
            ("z - (z - 1)", "z - (z - 1)"),
            ("(z - z) - 1", "z - z - 1"),
            ("z/(z*z)", "z/(z*z)"),
            ("-(-z)", "-(-z)"),
            ("(-z)^3", "(-z)^3"),
            ("2*-z", "2*-z"),
            ("exp(z+1)^-2", "exp(z + 1)^-2"),
        ];
        for (src, printed) in cases {
            let e = parse(src).unwrap();
            assert_eq!(e.to_string(), printed, "{src}");
            assert_eq!(parse(printed).unwrap(), e);
        }
    }

    #[test]
    fn general_constants_print_equivalently() {
        let e = AnalyticExpr::constant(c(-0.5, 2.0)).scaled(c(-3.0, 0.0));
        let back = parse(&e.to_string()).unwrap();
        let z = c(0.1, 0.2);
        assert!((back.eval(z).unwrap() - e.eval(z).unwrap()).norm() < 1e-15);
    }
}
