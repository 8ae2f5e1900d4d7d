//! Metric-component expressions: parsing and jet evaluation.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := primary ('^' exponent)?
//! exponent := ('-' | '+') exponent | power
//! primary  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers resolve against the declared coordinates, then the declared
//! parameters, then the built-in constant `pi`. Exponents must not depend on
//! coordinates.

mod parser;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::Jet;
use crate::scalar::Scalar;

pub use parser::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryOp {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Self::Exp,
            "ln" | "log" => Self::Ln,
            "sqrt" => Self::Sqrt,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "tan" => Self::Tan,
            "sinh" => Self::Sinh,
            "cosh" => Self::Cosh,
            "tanh" => Self::Tanh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Neg => "-",
            Self::Exp => "exp",
            Self::Ln => "ln",
            Self::Sqrt => "sqrt",
            Self::Sin => "sin",
            Self::Cos => "cos",
            Self::Tan => "tan",
            Self::Sinh => "sinh",
            Self::Cosh => "cosh",
            Self::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            Self::Add => '+',
            Self::Sub => '-',
            Self::Mul => '*',
            Self::Div => '/',
        }
    }
}

/// Expression tree node. Symbols are resolved to slots at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(usize),
    Param(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    /// Base raised to an exponent that is constant over the chart.
    Pow(Box<Node>, Box<Node>),
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Const(_) | Node::Coord(_) | Node::Param(_) => 1,
            Node::Unary(_, a) => 1 + a.depth(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn uses_coords(&self) -> bool {
        match self {
            Node::Coord(_) => true,
            Node::Const(_) | Node::Param(_) => false,
            Node::Unary(_, a) => a.uses_coords(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => a.uses_coords() || b.uses_coords(),
        }
    }

    fn uses_params(&self) -> bool {
        match self {
            Node::Param(_) => true,
            Node::Const(_) | Node::Coord(_) => false,
            Node::Unary(_, a) => a.uses_params(),
            Node::Binary(_, a, b) | Node::Pow(a, b) => a.uses_params() || b.uses_params(),
        }
    }

    fn uses_coord(&self, i: usize) -> bool {
        match self {
            Node::Coord(j) => *j == i,
            Node::Const(_) | Node::Param(_) => false,
            Node::Unary(_, a) => a.uses_coord(i),
            Node::Binary(_, a, b) | Node::Pow(a, b) => a.uses_coord(i) || b.uses_coord(i),
        }
    }
}

/// Symbol tables an expression was resolved against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbols {
    pub coords: Arc<[String]>,
    pub params: Arc<[String]>,
}

impl Symbols {
    pub fn new(coords: &[&str], params: &[&str]) -> Self {
        Self {
            coords: coords.iter().map(|s| s.to_string()).collect(),
            params: params.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn from_owned(coords: Vec<String>, params: Vec<String>) -> Self {
        Self {
            coords: coords.into(),
            params: params.into(),
        }
    }
}

/// Immutable parsed expression together with its symbol tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Arc<Node>,
    symbols: Symbols,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("point has {got} coordinates, expression expects {expected}")]
    PointDimension { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComposeError {
    #[error("expressions are resolved against different symbol tables")]
    SymbolMismatch,
    #[error("symbol `{0}` has no counterpart in the target chart")]
    MissingSymbol(String),
}

/// Parses `text` against the given coordinate and parameter names.
pub fn parse(text: &str, coords: &[&str], params: &[&str]) -> Result<Expr, ParseError> {
    Expr::parse(text, &Symbols::new(coords, params))
}

/// Evaluates `e` at `point` as an order-3 jet, binding parameters by name.
pub fn eval_jet3(e: &Expr, point: &[f64], params: &BTreeMap<String, f64>) -> Result<Jet<f64>, EvalError> {
    let values = e.bind_params(params)?;
    e.eval_jet(point, &values, 3)
}

impl Expr {
    pub fn parse(text: &str, symbols: &Symbols) -> Result<Self, ParseError> {
        let root = parser::Parser::new(text, symbols).parse()?;
        Ok(Self {
            root: Arc::new(root),
            symbols: symbols.clone(),
        })
    }

    pub fn constant(c: f64, symbols: &Symbols) -> Self {
        Self {
            root: Arc::new(Node::Const(c)),
            symbols: symbols.clone(),
        }
    }

    pub fn coordinate(i: usize, symbols: &Symbols) -> Self {
        assert!(i < symbols.coords.len());
        Self {
            root: Arc::new(Node::Coord(i)),
            symbols: symbols.clone(),
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn is_coordinate_free(&self) -> bool {
        !self.root.uses_coords()
    }

    pub fn depends_on(&self, coord: usize) -> bool {
        self.root.uses_coord(coord)
    }

    /// Literal zero, as produced for omitted metric entries.
    pub fn is_zero_literal(&self) -> bool {
        matches!(*self.root, Node::Const(c) if c == 0.0)
    }

    /// Resolves a name map into the parameter slice this expression expects.
    pub fn bind_params(&self, params: &BTreeMap<String, f64>) -> Result<Vec<f64>, EvalError> {
        let needed = self.root.uses_params();
        self.symbols
            .params
            .iter()
            .map(|name| match params.get(name) {
                Some(v) => Ok(*v),
                None if !needed => Ok(f64::NAN),
                None => Err(EvalError::UnboundParameter(name.clone())),
            })
            .collect()
    }

    fn combine(&self, other: &Self, f: impl FnOnce(Node, Node) -> Node) -> Result<Self, ComposeError> {
        if self.symbols != other.symbols {
            return Err(ComposeError::SymbolMismatch);
        }
        Ok(Self {
            root: Arc::new(f((*self.root).clone(), (*other.root).clone())),
            symbols: self.symbols.clone(),
        })
    }

    pub fn binary(&self, op: BinaryOp, other: &Self) -> Result<Self, ComposeError> {
        self.combine(other, |a, b| Node::Binary(op, Box::new(a), Box::new(b)))
    }

    pub fn powi(&self, k: i32) -> Self {
        Self {
            root: Arc::new(Node::Pow(
                Box::new((*self.root).clone()),
                Box::new(Node::Const(k as f64)),
            )),
            symbols: self.symbols.clone(),
        }
    }

    /// Re-resolves every symbol by name into `target`.
    pub fn embed(&self, target: &Symbols) -> Result<Self, ComposeError> {
        fn go(node: &Node, from: &Symbols, to: &Symbols) -> Result<Node, ComposeError> {
            let find = |names: &[String], name: &str| names.iter().position(|n| n == name);
            Ok(match node {
                Node::Const(c) => Node::Const(*c),
                Node::Coord(i) => {
                    let name = &from.coords[*i];
                    Node::Coord(find(&to.coords, name).ok_or_else(|| ComposeError::MissingSymbol(name.clone()))?)
                }
                Node::Param(i) => {
                    let name = &from.params[*i];
                    Node::Param(find(&to.params, name).ok_or_else(|| ComposeError::MissingSymbol(name.clone()))?)
                }
                Node::Unary(op, a) => Node::Unary(*op, Box::new(go(a, from, to)?)),
                Node::Binary(op, a, b) => Node::Binary(*op, Box::new(go(a, from, to)?), Box::new(go(b, from, to)?)),
                Node::Pow(a, b) => Node::Pow(Box::new(go(a, from, to)?), Box::new(go(b, from, to)?)),
            })
        }
        Ok(Self {
            root: Arc::new(go(&self.root, &self.symbols, target)?),
            symbols: target.clone(),
        })
    }

    /// Jet of this expression at `point`, carrying derivatives up to `order`.
    pub fn eval_jet<S: Scalar>(&self, point: &[S], params: &[S], order: u8) -> Result<Jet<S>, EvalError> {
        let n = self.symbols.coords.len();
        if point.len() != n {
            return Err(EvalError::PointDimension {
                expected: n,
                got: point.len(),
            });
        }
        Evaluator {
            expr: self,
            point,
            params,
            order,
        }
        .eval(&self.root)
    }

    pub fn eval_value<S: Scalar>(&self, point: &[S], params: &[S]) -> Result<S, EvalError> {
        Ok(self.eval_jet(point, params, 0)?.value())
    }

    fn render(&self, node: &Node, out: &mut String) {
        match node {
            Node::Const(c) => out.push_str(&format_const(*c)),
            Node::Coord(i) => out.push_str(&self.symbols.coords[*i]),
            Node::Param(i) => out.push_str(&self.symbols.params[*i]),
            Node::Unary(UnaryOp::Neg, a) => {
                out.push_str("-(");
                self.render(a, out);
                out.push(')');
            }
            Node::Unary(op, a) => {
                out.push_str(op.name());
                out.push('(');
                self.render(a, out);
                out.push(')');
            }
            Node::Binary(op, a, b) => {
                out.push('(');
                self.render(a, out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                self.render(b, out);
                out.push(')');
            }
            Node::Pow(a, b) => {
                out.push('(');
                self.render(a, out);
                out.push_str(")^(");
                self.render(b, out);
                out.push(')');
            }
        }
    }

    pub fn render_node(&self, node: &Node) -> String {
        let mut s = String::new();
        self.render(node, &mut s);
        s
    }
}

fn format_const(c: f64) -> String {
    if c < 0.0 {
        format!("({c})")
    } else {
        format!("{c}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_node(&self.root))
    }
}

struct Evaluator<'a, S: Scalar> {
    expr: &'a Expr,
    point: &'a [S],
    params: &'a [S],
    order: u8,
}

impl<S: Scalar> Evaluator<'_, S> {
    fn domain(&self, node: &Node, reason: &'static str) -> EvalError {
        EvalError::Domain {
            node: self.expr.render_node(node),
            reason,
        }
    }

    fn param(&self, i: usize) -> Result<S, EvalError> {
        match self.params.get(i) {
            Some(v) if !v.is_nan() => Ok(*v),
            _ => Err(EvalError::UnboundParameter(self.expr.symbols.params[i].clone())),
        }
    }

    fn eval(&self, node: &Node) -> Result<Jet<S>, EvalError> {
        let n = self.point.len();
        let out = match node {
            Node::Const(c) => Jet::constant(n, self.order, S::of(*c)),
            Node::Coord(i) => Jet::variable(n, self.order, self.point[*i], *i),
            Node::Param(i) => Jet::constant(n, self.order, self.param(*i)?),
            Node::Unary(op, a) => {
                let x = self.eval(a)?;
                let v = x.value();
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Ln => {
                        if v <= S::zero() {
                            return Err(self.domain(node, "logarithm of a nonpositive value"));
                        }
                        x.ln()
                    }
                    UnaryOp::Sqrt => {
                        if v < S::zero() || (v == S::zero() && self.order > 0) {
                            return Err(self.domain(node, "square root of a nonpositive value"));
                        }
                        x.sqrt()
                    }
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Tan => {
                        if v.cos() == S::zero() {
                            return Err(self.domain(node, "tangent at a pole"));
                        }
                        x.tan()
                    }
                    UnaryOp::Sinh => x.sinh(),
                    UnaryOp::Cosh => x.cosh(),
                    UnaryOp::Tanh => x.tanh(),
                }
            }
            Node::Binary(op, a, b) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y.value() == S::zero() {
                            return Err(self.domain(node, "division by zero"));
                        }
                        x / y
                    }
                }
            }
            Node::Pow(a, b) => {
                let base = self.eval(a)?;
                let c = Evaluator {
                    expr: self.expr,
                    point: self.point,
                    params: self.params,
                    order: 0,
                }
                .eval(b)?
                .value();
                let integral = c.fract() == S::zero();
                let v = base.value();
                if v < S::zero() && !integral {
                    return Err(self.domain(node, "fractional power of a negative value"));
                }
                if v == S::zero() && (c < S::zero() || (!integral && self.order > 0)) {
                    return Err(self.domain(node, "singular power at zero"));
                }
                base.powf(c)
            }
        };
        if !out.value().is_finite() {
            return Err(self.domain(node, "non-finite result"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_shapes() {
        let e = parse("t^2 + x*t", &["t", "x"], &[]).unwrap();
        assert_eq!(e.depth(), 3);
        let e = parse("exp(H*t)", &["t"], &["H"]).unwrap();
        assert!(
            matches!(e.root(), Node::Unary(UnaryOp::Exp, inner) if matches!(**inner, Node::Binary(BinaryOp::Mul, ref a, _) if **a == Node::Param(0)))
        );
    }

    #[test]
    fn precedence_pow_over_unary_minus() {
        let e = parse("-t^2", &["t"], &[]).unwrap();
        assert_eq!(e.eval_value(&[3.0], &[]).unwrap(), -9.0);
        let e = parse("2^-1", &["t"], &[]).unwrap();
        assert_eq!(e.eval_value(&[0.0f64], &[]).unwrap(), 0.5);
        let e = parse("8 - 3 - 2", &["t"], &[]).unwrap();
        assert_eq!(e.eval_value(&[0.0f64], &[]).unwrap(), 3.0);
        let e = parse("8 / 4 / 2", &["t"], &[]).unwrap();
        assert_eq!(e.eval_value(&[0.0f64], &[]).unwrap(), 1.0);
    }

    #[test]
    fn eval_jet3_binds_names() {
        let e = parse("exp(H*t)", &["t"], &["H"]).unwrap();
        let params = BTreeMap::from([("H".to_string(), 2.0)]);
        let j = eval_jet3(&e, &[0.0], &params).unwrap();
        assert_eq!(j.third(0, 0, 0), 8.0);
        let err = eval_jet3(&e, &[0.0], &BTreeMap::new()).unwrap_err();
        assert_eq!(err, EvalError::UnboundParameter("H".into()));
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = parse("1 + ln(t - 1)", &["t"], &[]).unwrap();
        match e.eval_jet(&[0.5f64], &[], 3).unwrap_err() {
            EvalError::Domain { node, .. } => assert_eq!(node, "ln((t - 1))"),
            other => panic!("{other:?}"),
        }
        let e = parse("1/t", &["t"], &[]).unwrap();
        assert!(matches!(e.eval_jet(&[0.0f64], &[], 1), Err(EvalError::Domain { .. })));
        let e = parse("sqrt(t)", &["t"], &[]).unwrap();
        assert!(e.eval_jet(&[-1.0f64], &[], 0).is_err());
        let e = parse("t^(2/3)", &["t"], &[]).unwrap();
        assert!(e.eval_jet(&[-1.0f64], &[], 0).is_err());
        assert!(e.eval_jet(&[0.0f64], &[], 1).is_err());
    }

    #[test]
    fn embed_shifts_coordinates() {
        let fiber = parse("sin(a)^2", &["a", "b"], &[]).unwrap();
        let full = Symbols::new(&["t", "a", "b"], &[]);
        let e = fiber.embed(&full).unwrap();
        assert!(e.depends_on(1) && !e.depends_on(0));
        let v: f64 = e.eval_value(&[9.0, 0.5, 0.0], &[]).unwrap();
        assert!((v - 0.5f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn display_reparses_to_same_value() {
        let e = parse("-(t - 2)^3 / (1 + x^2) * cosh(x)", &["t", "x"], &[]).unwrap();
        let again = parse(&e.to_string(), &["t", "x"], &[]).unwrap();
        let p = [0.3f64, -1.2];
        assert_eq!(e.eval_value(&p, &[]).unwrap(), again.eval_value(&p, &[]).unwrap());
    }
}
