//! Boundary expressions `psi(x)` over chart coordinates.
//!
//! Derivatives come from forward-mode dual numbers: one first-order pass per coordinate
//! for the gradient, nested duals for the Hessian.

mod dual;
mod parser;

pub use dual::{Dual, Scalar};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Func(Func, Box<Node>),
}

impl Node {
    fn eval<T: Scalar>(&self, vars: &[T]) -> T {
        match self {
            Node::Const(c) => T::cst(*c),
            Node::Var(i) => vars[*i].clone(),
            Node::Neg(a) => -a.eval(vars),
            Node::Add(a, b) => a.eval(vars) + b.eval(vars),
            Node::Sub(a, b) => a.eval(vars) - b.eval(vars),
            Node::Mul(a, b) => a.eval(vars) * b.eval(vars),
            Node::Div(a, b) => a.eval(vars) / b.eval(vars),
            Node::Pow(a, b) => match b.constant() {
                Some(c) => a.eval(vars).powc(c),
                None => (b.eval(vars) * a.eval(vars).ln()).exp(),
            },
            Node::Func(f, a) => {
                let a = a.eval(vars);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(),
                    Func::Sqrt => a.sqrt(),
                }
            }
        }
    }

    /// Folds variable-free subtrees so that `pow(x, 2)` keeps using the power rule.
    fn constant(&self) -> Option<f64> {
        match self {
            Node::Const(c) => Some(*c),
            Node::Var(_) => None,
            Node::Neg(a) => a.constant().map(|a| -a),
            Node::Add(a, b) => Some(a.constant()? + b.constant()?),
            Node::Sub(a, b) => Some(a.constant()? - b.constant()?),
            Node::Mul(a, b) => Some(a.constant()? * b.constant()?),
            Node::Div(a, b) => Some(a.constant()? / b.constant()?),
            Node::Pow(a, b) => Some(a.constant()?.powf(b.constant()?)),
            Node::Func(f, a) => {
                let a = a.constant()?;
                Some(match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(),
                    Func::Sqrt => a.sqrt(),
                })
            }
        }
    }
}

/// A compiled scalar expression in the chart coordinates of a manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiExpr {
    source: String,
    vars: Vec<String>,
    root: Node,
}

impl PsiExpr {
    /// Parses `source`, resolving identifiers against `vars` (plus the constant `pi`).
    pub fn parse(source: &str, vars: &[String]) -> Result<Self> {
        let root = parser::parse(source, vars)?;
        Ok(Self {
            source: source.trim().to_string(),
            vars: vars.to_vec(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    /// The expression `-(source)`.
    pub fn negated(&self) -> Self {
        Self {
            source: format!("-({})", self.source),
            vars: self.vars.clone(),
            root: Node::Neg(Box::new(self.root.clone())),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates with any scalar type; `x.len()` must equal the number of variables.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        self.root.eval(x)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.root.eval(x))
    }

    /// Partial derivatives (the differential, not the metric gradient).
    pub fn partials(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut vars: Vec<Dual<f64>> = x.iter().map(|&a| Dual::new(a, 0.0)).collect();
        let mut out = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            vars[i].du = 1.0;
            out.push(self.root.eval(&vars).du);
            vars[i].du = 0.0;
        }
        Ok(out)
    }

    /// Value and partials in one sweep.
    pub fn value_and_partials(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let value = self.value(x)?;
        Ok((value, self.partials(x)?))
    }

    /// Matrix of second partial derivatives.
    pub fn hessian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        let n = x.len();
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let vars: Vec<Dual<Dual<f64>>> = x
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| {
                        let inner = if k == j { 1.0 } else { 0.0 };
                        let outer = if k == i { 1.0 } else { 0.0 };
                        Dual::new(Dual::new(a, inner), Dual::new(outer, 0.0))
                    })
                    .collect();
                let d = self.root.eval(&vars).du.du;
                h[i][j] = d;
                h[j][i] = d;
            }
        }
        Ok(h)
    }
}

impl std::fmt::Display for PsiExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.source)
    }
}
