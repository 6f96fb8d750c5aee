//! The smooth-map DSL.
//!
//! A [`SmoothMap`] is an ordered list of expression trees, one per output
//! component, over a closed set of smooth operators. Source text follows
//!
//! ```text
//! map       := component (";" component)* ;
//! component := expr ;
//! expr      := term (("+"|"-") term)* ;
//! term      := factor (("*"|"/") factor)* ;
//! factor    := base ("^" factor)? ;
//! base      := number | "pi" | "e" | var | func "(" expr ")" | "(" expr ")" | "-" base ;
//! func      := "sin"|"cos"|"exp"|"log"|"sqrt"|"tanh" ;
//! var       := ("u"|"w"|"x") digits ;
//! ```
//!
//! `^` is right-associative and its exponent must fold to a finite constant.
//! A unary minus belongs to the base it precedes, so `-u1^2` is `(-u1)^2`,
//! while `-sin(u1)` negates the whole call.
//!
//! Maps are parsed under a [`VarScheme`]. With [`VarScheme::Plain`] the
//! names `x1..xn` (or equivalently `u1..un`) address the n domain slots.
//! With [`VarScheme::Split`] the domain is ℝᵖ × ℝᵖ: `u1..up` are the first p
//! slots and `w1..wp` the last p.

mod parse;
pub(crate) mod scalar;

use std::fmt;

use crate::error::{shape, DomainError, Error, ParseError, Result};

pub use scalar::{OpError, Scalar};

/// Smooth unary functions available in the DSL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree of a single map component. `Var` holds a zero-based slot.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Negation that folds into constants, mirroring what the parser produces.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Neg(Box::new(e)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, exponent: f64) -> Expr {
        Expr::Pow(Box::new(a), exponent)
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Largest slot index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Replaces every `Var(i)` with `f(i)`.
    pub fn substitute(&self, f: &impl Fn(usize) -> Expr) -> Expr {
        let bx = |e: &Expr| Box::new(e.substitute(f));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => f(*i),
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
            Expr::Pow(a, c) => Expr::Pow(bx(a), *c),
            Expr::Call(g, a) => Expr::Call(*g, bx(a)),
        }
    }

    /// Evaluates over any [`Scalar`]; `n` is the domain dimension.
    pub fn eval<S: Scalar>(&self, vars: &[S], n: usize) -> Result<S, OpError> {
        let out = match self {
            Expr::Const(c) => S::constant(*c, n),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Neg(a) => a.eval(vars, n)?.neg(),
            Expr::Add(a, b) => a.eval(vars, n)?.add(&b.eval(vars, n)?),
            Expr::Sub(a, b) => a.eval(vars, n)?.sub(&b.eval(vars, n)?),
            Expr::Mul(a, b) => a.eval(vars, n)?.mul(&b.eval(vars, n)?),
            Expr::Div(a, b) => a.eval(vars, n)?.div(&b.eval(vars, n)?)?,
            Expr::Pow(a, c) => a.eval(vars, n)?.powc(*c)?,
            Expr::Call(f, a) => a.eval(vars, n)?.apply(*f)?,
        };
        if !out.value().is_finite() {
            return Err(OpError::new(self.op_name(), "non-finite result"));
        }
        Ok(out)
    }

    fn op_name(&self) -> &'static str {
        match self {
            Expr::Const(_) => "const",
            Expr::Var(_) => "var",
            Expr::Neg(_) => "neg",
            Expr::Add(..) => "+",
            Expr::Sub(..) => "-",
            Expr::Mul(..) => "*",
            Expr::Div(..) => "/",
            Expr::Pow(..) => "^",
            Expr::Call(f, _) => f.name(),
        }
    }

    fn is_atom(&self) -> bool {
        match self {
            Expr::Const(c) => !c.is_sign_negative(),
            Expr::Var(_) | Expr::Call(..) => true,
            _ => false,
        }
    }

    fn write(&self, out: &mut impl fmt::Write, scheme: VarScheme) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(out, *c),
            Expr::Var(i) => write!(out, "{}", scheme.var_name(*i)),
            Expr::Neg(a) => {
                out.write_str("-(")?;
                a.write(out, scheme)?;
                out.write_str(")")
            }
            Expr::Add(a, b) => binary(out, scheme, a, " + ", b),
            Expr::Sub(a, b) => binary(out, scheme, a, " - ", b),
            Expr::Mul(a, b) => binary(out, scheme, a, " * ", b),
            Expr::Div(a, b) => binary(out, scheme, a, " / ", b),
            Expr::Pow(a, c) => {
                if a.is_atom() {
                    a.write(out, scheme)?;
                } else {
                    out.write_str("(")?;
                    a.write(out, scheme)?;
                    out.write_str(")")?;
                }
                out.write_str("^")?;
                write_const(out, *c)
            }
            Expr::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                a.write(out, scheme)?;
                out.write_str(")")
            }
        }
    }
}

fn binary(
    out: &mut impl fmt::Write,
    scheme: VarScheme,
    a: &Expr,
    op: &str,
    b: &Expr,
) -> fmt::Result {
    out.write_str("(")?;
    a.write(out, scheme)?;
    out.write_str(op)?;
    b.write(out, scheme)?;
    out.write_str(")")
}

// `{:?}` on f64 is the shortest representation that round-trips, and the
// tokenizer accepts all of its forms (`2.0`, `0.1`, `1e-7`, `1.5e300`).
fn write_const(out: &mut impl fmt::Write, c: f64) -> fmt::Result {
    if c.is_sign_negative() {
        write!(out, "(-{:?})", -c)
    } else {
        write!(out, "{c:?}")
    }
}

/// How variable names map to domain slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarScheme {
    /// `x1..xn` or `u1..un` name slots `0..n`.
    Plain,
    /// Domain ℝᵖ × ℝᵖ: `u1..up` are slots `0..p`, `w1..wp` are `p..2p`.
    Split { p: usize },
}

impl VarScheme {
    pub fn var_name(self, slot: usize) -> String {
        match self {
            VarScheme::Plain => format!("x{}", slot + 1),
            VarScheme::Split { p } if slot < p => format!("u{}", slot + 1),
            VarScheme::Split { p } => format!("w{}", slot - p + 1),
        }
    }
}

/// A parsed smooth map ℝⁿ → ℝᵐ.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothMap {
    n: usize,
    scheme: VarScheme,
    components: Vec<Expr>,
}

impl SmoothMap {
    /// Parses a map over a plain domain ℝⁿ with exactly `m` components.
    pub fn parse(source: &str, n: usize, m: usize) -> Result<Self, ParseError> {
        let map = Self::parse_with(source, n, VarScheme::Plain)?;
        map.expect_components(m)
    }

    /// Parses a map on ℝᵖ × ℝᵖ using the `u`/`w` naming.
    pub fn parse_split(source: &str, p: usize, m: usize) -> Result<Self, ParseError> {
        let map = Self::parse_with(source, 2 * p, VarScheme::Split { p })?;
        map.expect_components(m)
    }

    /// Parses over a plain domain and takes the component count from the source.
    pub fn parse_inferred(source: &str, n: usize) -> Result<Self, ParseError> {
        Self::parse_with(source, n, VarScheme::Plain)
    }

    pub fn parse_with(source: &str, n: usize, scheme: VarScheme) -> Result<Self, ParseError> {
        if n == 0 {
            return Err(ParseError::ZeroArity);
        }
        let components = parse::parse_components(source, n, scheme)?;
        Ok(SmoothMap {
            n,
            scheme,
            components,
        })
    }

    fn expect_components(self, m: usize) -> Result<Self, ParseError> {
        if m == 0 {
            return Err(ParseError::ZeroArity);
        }
        if self.components.len() != m {
            return Err(ParseError::ComponentCount {
                expected: m,
                found: self.components.len(),
            });
        }
        Ok(self)
    }

    /// Builds a map from trees; every slot referenced must be below `n`.
    pub fn from_components(n: usize, scheme: VarScheme, components: Vec<Expr>) -> Result<Self> {
        if n == 0 || components.is_empty() {
            return Err(Error::Invalid("arities must be positive".into()));
        }
        if let VarScheme::Split { p } = scheme {
            if 2 * p != n {
                return Err(shape(format!("split scheme with p={p} needs n={}", 2 * p)));
            }
        }
        if let Some(i) = components.iter().filter_map(Expr::max_var).max() {
            if i >= n {
                return Err(shape(format!("slot {i} outside domain of arity {n}")));
            }
        }
        Ok(SmoothMap {
            n,
            scheme,
            components,
        })
    }

    /// The identity map on a plain ℝⁿ.
    pub fn identity(n: usize) -> Self {
        SmoothMap {
            n,
            scheme: VarScheme::Plain,
            components: (0..n).map(Expr::Var).collect(),
        }
    }

    /// Applies `f` to every slot: (f(x1), ..., f(xn)).
    pub fn componentwise(n: usize, f: Func) -> Self {
        SmoothMap {
            n,
            scheme: VarScheme::Plain,
            components: (0..n).map(|i| Expr::call(f, Expr::Var(i))).collect(),
        }
    }

    pub fn arity_in(&self) -> usize {
        self.n
    }

    pub fn arity_out(&self) -> usize {
        self.components.len()
    }

    pub fn scheme(&self) -> VarScheme {
        self.scheme
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Componentwise evaluation.
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.eval_scalar(point)
    }

    pub fn eval_scalar<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>> {
        if point.len() != self.n {
            return Err(shape(format!(
                "point has {} coordinates, map expects {}",
                point.len(),
                self.n
            )));
        }
        self.components
            .iter()
            .enumerate()
            .map(|(component, e)| {
                e.eval(point, self.n).map_err(|OpError { op, reason }| {
                    Error::Domain(DomainError {
                        component,
                        op,
                        reason,
                    })
                })
            })
            .collect()
    }

    /// `self ∘ inner`, formed by substituting `inner`'s components for this
    /// map's variables. The result lives on `inner`'s domain.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        if self.n != inner.arity_out() {
            return Err(shape(format!(
                "cannot compose: outer map takes {} inputs, inner map yields {}",
                self.n,
                inner.arity_out()
            )));
        }
        let components = self
            .components
            .iter()
            .map(|e| e.substitute(&|i| inner.components[i].clone()))
            .collect();
        Ok(SmoothMap {
            n: inner.n,
            scheme: inner.scheme,
            components,
        })
    }

    /// Precomposition with the flip (u, w) ↦ (w, u) of ℝᵖ × ℝᵖ.
    pub fn flip_halves(&self) -> Result<SmoothMap> {
        if !self.n.is_multiple_of(2) {
            return Err(shape(format!("flip needs an even domain, got {}", self.n)));
        }
        let p = self.n / 2;
        let components = self
            .components
            .iter()
            .map(|e| e.substitute(&|i| Expr::Var((i + p) % (2 * p))))
            .collect();
        Ok(SmoothMap {
            n: self.n,
            scheme: self.scheme,
            components,
        })
    }

    /// The map `a·f + b·g`.
    pub fn linear_combination(a: f64, f: &SmoothMap, b: f64, g: &SmoothMap) -> Result<SmoothMap> {
        if f.n != g.n || f.arity_out() != g.arity_out() {
            return Err(shape("linear combination of maps with different arities"));
        }
        let components = f
            .components
            .iter()
            .zip(&g.components)
            .map(|(fe, ge)| {
                Expr::add(
                    Expr::mul(Expr::Const(a), fe.clone()),
                    Expr::mul(Expr::Const(b), ge.clone()),
                )
            })
            .collect();
        Ok(SmoothMap {
            n: f.n,
            scheme: f.scheme,
            components,
        })
    }
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            e.write(f, self.scheme)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(src: &str, n: usize, m: usize) -> SmoothMap {
        SmoothMap::parse(src, n, m).unwrap()
    }

    #[test]
    fn parses_two_component_map() {
        let f = plain("u1*u2; u1 + u2^2", 2, 2);
        assert_eq!(
            f.components(),
            &[
                Expr::mul(Expr::Var(0), Expr::Var(1)),
                Expr::add(Expr::Var(0), Expr::pow(Expr::Var(1), 2.0)),
            ]
        );
        assert_eq!(f.eval(&[2.0, 3.0]).unwrap(), vec![6.0, 11.0]);
    }

    #[test]
    fn sine_at_zero() {
        let f = plain("sin(u1)", 1, 1);
        assert_eq!(f.components(), &[Expr::call(Func::Sin, Expr::Var(0))]);
        assert_eq!(f.eval(&[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn variable_beyond_arity_is_rejected() {
        let err = SmoothMap::parse("u3", 2, 1).unwrap_err();
        assert!(matches!(
            err,
            ParseError::VariableOutOfRange { arity: 2, pos: 0, .. }
        ));
        assert!(matches!(
            SmoothMap::parse("x0", 2, 1),
            Err(ParseError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn log_of_negative_is_domain_error() {
        let f = plain("1; log(x1)", 1, 2);
        match f.eval(&[-1.0]) {
            Err(Error::Domain(d)) => {
                assert_eq!(d.component, 1);
                assert_eq!(d.op, "log");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_domain_errors() {
        for (src, x) in [
            ("sqrt(x1)", -1.0),
            ("1/x1", 0.0),
            ("x1^0.5", -2.0),
            ("x1^-1", 0.0),
            ("exp(exp(x1))", 10.0),
        ] {
            assert!(
                matches!(plain(src, 1, 1).eval(&[x]), Err(Error::Domain(_))),
                "{src} at {x}"
            );
        }
        // integer exponents accept negative bases
        assert_eq!(plain("x1^3", 1, 1).eval(&[-2.0]).unwrap(), vec![-8.0]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match SmoothMap::parse("u1 + * u2", 2, 1) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            SmoothMap::parse("foo(u1)", 1, 1),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            SmoothMap::parse("u1; u1", 1, 1),
            Err(ParseError::ComponentCount {
                expected: 1,
                found: 2
            })
        ));
        assert!(matches!(
            SmoothMap::parse("2^u1", 1, 1),
            Err(ParseError::NonConstantExponent { .. })
        ));
        assert!(matches!(
            SmoothMap::parse("1e400", 1, 1),
            Err(ParseError::InvalidNumber { .. })
        ));
        assert!(matches!(
            SmoothMap::parse("", 1, 1),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = plain("-x1^2", 1, 1);
        assert_eq!(f.eval(&[3.0]).unwrap(), vec![9.0]);
        let f = plain("-sin(x1)", 1, 1);
        assert_eq!(f.components(), &[Expr::Neg(Box::new(Expr::call(Func::Sin, Expr::Var(0))))]);
        let f = plain("2^3^2", 1, 1);
        assert_eq!(f.eval(&[0.0]).unwrap(), vec![512.0]);
        let f = plain("x1 - 1 - 2", 1, 1);
        assert_eq!(f.eval(&[0.0]).unwrap(), vec![-3.0]);
        let f = plain("x1 / 2 / 4", 1, 1);
        assert_eq!(f.eval(&[8.0]).unwrap(), vec![1.0]);
        let f = plain(" 1.5e1 +\tpi*0 + e - e ", 1, 1);
        assert_eq!(f.eval(&[0.0]).unwrap(), vec![15.0]);
    }

    #[test]
    fn split_scheme_names() {
        let f = SmoothMap::parse_split("u1*w1; u1 + w1^2", 1, 2).unwrap();
        assert_eq!(f.arity_in(), 2);
        assert_eq!(f.eval(&[2.0, 3.0]).unwrap(), vec![6.0, 11.0]);
        assert!(SmoothMap::parse_split("x1", 1, 1).is_err());
        assert!(SmoothMap::parse_split("w2", 1, 1).is_err());
        assert!(SmoothMap::parse("w1", 2, 1).is_err());
    }

    #[test]
    fn pretty_print_reparses() {
        for src in [
            "u1*u2; u1 + u2^2",
            "-x1^2 + -(x2) - -3",
            "sqrt(exp(x1) + 0.1) / (1e-7 + x2^(-2))",
            "tanh(x1)^1.5 - cos(-pi)",
        ] {
            let f = plain(src, 2, src.split(';').count());
            let g = plain(&f.to_string(), 2, f.arity_out());
            assert_eq!(f, g, "{src} -> {f}");
        }
    }

    #[test]
    fn composition_and_flip() {
        let g = plain("x1*x2", 2, 1);
        let h = plain("sin(x1); x1^2", 1, 2);
        let gh = g.compose(&h).unwrap();
        let x: f64 = 0.7;
        assert_eq!(gh.eval(&[x]).unwrap(), vec![x.sin() * x.powi(2)]);
        assert!(h.compose(&h).is_err());

        let phi = SmoothMap::parse_split("u1 + 2*w1", 1, 1).unwrap();
        let flipped = phi.flip_halves().unwrap();
        assert_eq!(flipped.to_string(), "(w1 + (2.0 * u1))");
        assert_eq!(flipped.flip_halves().unwrap(), phi);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = format!("{}x1{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(matches!(
            SmoothMap::parse(&src, 1, 1),
            Err(ParseError::TooDeep { .. })
        ));
        let src = format!("{}x1", "-".repeat(10_000));
        assert!(SmoothMap::parse(&src, 1, 1).is_err());
    }
}
