//! Value, Jacobian and Hessian of a [`SmoothMap`] at a point.
//!
//! The primary path evaluates the map over [`Taylor2`], a multivariate
//! polynomial truncated after degree two, which is exact (up to rounding)
//! for every operator in the DSL. [`fd_second_order`] is an independent
//! central-difference oracle used only to cross-check it.

use crate::error::{Error, Result};
use crate::expr::scalar::{check_pow, powc_value};
use crate::expr::{Func, OpError, Scalar, SmoothMap};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Default agreement tolerance between the Taylor and finite-difference paths.
pub const DEFAULT_FD_TOL: f64 = 1e-6;

/// `value[i]`, `jac[i][a] = ∂fᵢ/∂x_a`, `hess[i][a][b] = ∂²fᵢ/∂x_a∂x_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderData {
    pub value: Vec<f64>,
    pub jac: Vec<Vec<f64>>,
    pub hess: Vec<Vec<Vec<f64>>>,
}

impl SecondOrderData {
    /// Replaces each Hessian by the mean of itself and its transpose.
    pub fn symmetrize(&mut self) {
        for h in &mut self.hess {
            let n = h.len();
            for a in 0..n {
                for b in (a + 1)..n {
                    let s = 0.5 * (h[a][b] + h[b][a]);
                    h[a][b] = s;
                    h[b][a] = s;
                }
            }
        }
    }

    /// Largest |H[a][b] − H[b][a]| over all components.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for h in &self.hess {
            for (a, row) in h.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    worst = worst.max((v - h[b][a]).abs());
                }
            }
        }
        worst
    }

    fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        self.value
            .iter()
            .chain(self.jac.iter().flatten())
            .chain(self.hess.iter().flatten().flatten())
            .copied()
    }

    /// max over entries of |self − other| / (1 + |self|).
    pub fn relative_deviation(&self, other: &SecondOrderData) -> f64 {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
            .fold(0.0, f64::max)
    }
}

/// Truncated second-order multivariate Taylor polynomial
/// `v + gᵀδ + ½ δᵀHδ` in `n` variables, with `H` stored dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Taylor2 {
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl Taylor2 {
    pub fn n(&self) -> usize {
        self.g.len()
    }

    /// The coordinate function `x_slot` expanded at `at`.
    pub fn variable(at: f64, slot: usize, n: usize) -> Self {
        let mut g = vec![0.0; n];
        g[slot] = 1.0;
        Taylor2 {
            v: at,
            g,
            h: vec![0.0; n * n],
        }
    }

    /// `f ∘ self` given f, f′, f″ at `self.v`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.n();
        let g = self.g.iter().map(|gi| f1 * gi).collect();
        let mut h = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut hab = f1 * self.h[a * n + b];
                if f2 != 0.0 {
                    hab += f2 * self.g[a] * self.g[b];
                }
                h[a * n + b] = hab;
            }
        }
        Taylor2 { v: f0, g, h }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Taylor2 {
            v: f(self.v, rhs.v),
            g: self.g.iter().zip(&rhs.g).map(|(a, b)| f(*a, *b)).collect(),
            h: self.h.iter().zip(&rhs.h).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Scalar for Taylor2 {
    fn constant(c: f64, n: usize) -> Self {
        Taylor2 {
            v: c,
            g: vec![0.0; n],
            h: vec![0.0; n * n],
        }
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn neg(&self) -> Self {
        Taylor2 {
            v: -self.v,
            g: self.g.iter().map(|x| -x).collect(),
            h: self.h.iter().map(|x| -x).collect(),
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    fn mul(&self, rhs: &Self) -> Self {
        let n = self.n();
        let g = (0..n)
            .map(|a| self.g[a] * rhs.v + self.v * rhs.g[a])
            .collect();
        let mut h = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let k = a * n + b;
                h[k] = self.h[k] * rhs.v
                    + self.g[a] * rhs.g[b]
                    + self.g[b] * rhs.g[a]
                    + self.v * rhs.h[k];
            }
        }
        Taylor2 {
            v: self.v * rhs.v,
            g,
            h,
        }
    }

    fn div(&self, rhs: &Self) -> Result<Self, OpError> {
        let d = rhs.v;
        if d == 0.0 {
            return Err(OpError::new("/", "division by zero"));
        }
        let recip = rhs.chain(1.0 / d, -1.0 / (d * d), 2.0 / (d * d * d));
        Ok(self.mul(&recip))
    }

    fn powc(&self, c: f64) -> Result<Self, OpError> {
        let v = self.v;
        check_pow(v, c)?;
        // Derivative terms with a vanishing coefficient are dropped so that
        // e.g. x^1 at 0 never evaluates 0^-1.
        let term = |coef: f64, e: f64| {
            if coef == 0.0 {
                0.0
            } else {
                coef * powc_value(v, e)
            }
        };
        Ok(self.chain(powc_value(v, c), term(c, c - 1.0), term(c * (c - 1.0), c - 2.0)))
    }

    fn apply(&self, f: Func) -> Result<Self, OpError> {
        let v = self.v;
        Ok(match f {
            Func::Sin => {
                let (s, c) = v.sin_cos();
                self.chain(s, c, -s)
            }
            Func::Cos => {
                let (s, c) = v.sin_cos();
                self.chain(c, -s, -c)
            }
            Func::Exp => {
                let e = v.exp();
                self.chain(e, e, e)
            }
            Func::Tanh => {
                let t = v.tanh();
                let d = 1.0 - t * t;
                self.chain(t, d, -2.0 * t * d)
            }
            Func::Log => {
                if v <= 0.0 {
                    return Err(OpError::new("log", format!("argument {v} is not positive")));
                }
                self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
            }
            Func::Sqrt => {
                if v <= 0.0 {
                    return Err(OpError::new(
                        "sqrt",
                        format!("argument {v} is outside the differentiable domain"),
                    ));
                }
                let r = v.sqrt();
                self.chain(r, 0.5 / r, -0.25 / (r * v))
            }
        })
    }
}

/// Taylor data without symmetrizing the Hessians.
pub fn second_order_raw(map: &SmoothMap, point: &[f64]) -> Result<SecondOrderData> {
    let n = map.arity_in();
    if point.len() != n {
        return Err(Error::Shape(format!(
            "point has {} coordinates, map expects {n}",
            point.len()
        )));
    }
    let vars: Vec<Taylor2> = point
        .iter()
        .enumerate()
        .map(|(slot, &x)| Taylor2::variable(x, slot, n))
        .collect();
    let outs = map.eval_scalar(&vars)?;
    let mut data = SecondOrderData {
        value: Vec::with_capacity(outs.len()),
        jac: Vec::with_capacity(outs.len()),
        hess: Vec::with_capacity(outs.len()),
    };
    for (component, t) in outs.into_iter().enumerate() {
        if !(t.g.iter().chain(&t.h).all(|x| x.is_finite())) {
            return Err(Error::Domain(crate::error::DomainError {
                component,
                op: "derivative",
                reason: "non-finite derivative".into(),
            }));
        }
        data.value.push(t.v);
        data.hess.push(t.h.chunks(n).map(<[f64]>::to_vec).collect());
        data.jac.push(t.g);
    }
    Ok(data)
}

/// Exact (to rounding) value, Jacobian and symmetrized Hessian.
pub fn second_order(map: &SmoothMap, point: &[f64]) -> Result<SecondOrderData> {
    let mut data = second_order_raw(map, point)?;
    data.symmetrize();
    Ok(data)
}

/// Central-difference approximation with step `h`.
pub fn fd_second_order(map: &SmoothMap, point: &[f64], h: f64) -> Result<SecondOrderData> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    let n = map.arity_in();
    let f = |shift: &[(usize, f64)]| {
        let mut x = point.to_vec();
        for &(a, d) in shift {
            x[a] += d;
        }
        map.eval(&x)
    };
    let value = map.eval(point)?;
    let m = value.len();
    let mut jac = vec![vec![0.0; n]; m];
    let mut hess = vec![vec![vec![0.0; n]; n]; m];
    for a in 0..n {
        let plus = f(&[(a, h)])?;
        let minus = f(&[(a, -h)])?;
        for i in 0..m {
            jac[i][a] = (plus[i] - minus[i]) / (2.0 * h);
            hess[i][a][a] = (plus[i] - 2.0 * value[i] + minus[i]) / (h * h);
        }
        for b in (a + 1)..n {
            let pp = f(&[(a, h), (b, h)])?;
            let pm = f(&[(a, h), (b, -h)])?;
            let mp = f(&[(a, -h), (b, h)])?;
            let mm = f(&[(a, -h), (b, -h)])?;
            for i in 0..m {
                let d = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
                hess[i][a][b] = d;
                hess[i][b][a] = d;
            }
        }
    }
    Ok(SecondOrderData { value, jac, hess })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn split(src: &str, p: usize, m: usize) -> SmoothMap {
        SmoothMap::parse_split(src, p, m).unwrap()
    }

    #[test]
    fn bilinear_form() {
        let d = second_order(&split("u1*w1", 1, 1), &[0.0, 0.0]).unwrap();
        assert_eq!(d.value, vec![0.0]);
        assert_eq!(d.jac, vec![vec![0.0, 0.0]]);
        assert_eq!(d.hess, vec![vec![vec![0.0, 1.0], vec![1.0, 0.0]]]);
    }

    #[test]
    fn sine_maclaurin() {
        let d = second_order(&SmoothMap::parse("sin(x1)", 1, 1).unwrap(), &[0.0]).unwrap();
        assert_eq!(d.value, vec![0.0]);
        assert_eq!(d.jac, vec![vec![1.0]]);
        assert_eq!(d.hess, vec![vec![vec![0.0]]]);
    }

    #[test]
    fn two_component_example_matches_fd() {
        let f = split("u1*w1; u1 + w1^2", 1, 2);
        let d = second_order(&f, &[0.0, 0.0]).unwrap();
        let fd = fd_second_order(&f, &[0.0, 0.0], DEFAULT_FD_STEP).unwrap();
        // frozen from the oracle: jac [[0,0],[1,0]], hess₁ [[0,1],[1,0]], hess₂ [[0,0],[0,2]]
        let expected = SecondOrderData {
            value: vec![0.0, 0.0],
            jac: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            hess: vec![
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
                vec![vec![0.0, 0.0], vec![0.0, 2.0]],
            ],
        };
        assert!(fd.relative_deviation(&expected) < 1e-6);
        assert!(d.relative_deviation(&expected) < 1e-12);
    }

    #[test]
    fn fd_quadratic_and_exp() {
        let sq = SmoothMap::parse("x1^2", 1, 1).unwrap();
        let d = fd_second_order(&sq, &[1.0], 1e-4).unwrap();
        assert_abs_diff_eq!(d.jac[0][0], 2.0, epsilon = 1e-7);

        let ex = SmoothMap::parse("exp(x1)", 1, 1).unwrap();
        let d = fd_second_order(&ex, &[0.0], 1e-4).unwrap();
        assert_abs_diff_eq!(d.hess[0][0][0], 1.0, epsilon = 1e-6);

        let c = SmoothMap::parse("3.5; -1", 2, 2).unwrap();
        let d = fd_second_order(&c, &[0.3, -0.2], 1e-4).unwrap();
        assert!(d.jac.iter().flatten().all(|&x| x == 0.0));
        assert!(d.hess.iter().flatten().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn fd_rejects_bad_step() {
        let f = SmoothMap::parse("x1", 1, 1).unwrap();
        assert!(matches!(fd_second_order(&f, &[0.0], 0.0), Err(Error::Invalid(_))));
        assert!(matches!(fd_second_order(&f, &[0.0], -1.0), Err(Error::Invalid(_))));
    }

    #[test]
    fn fd_domain_error_on_stencil() {
        let f = SmoothMap::parse("log(x1)", 1, 1).unwrap();
        assert!(matches!(fd_second_order(&f, &[1e-5], 1e-4), Err(Error::Domain(_))));
    }

    #[test]
    fn unary_rules_match_closed_forms() {
        let x: f64 = 0.7;
        let cases: [(&str, f64, f64, f64); 7] = [
            ("sin(x1)", x.sin(), x.cos(), -x.sin()),
            ("cos(x1)", x.cos(), -x.sin(), -x.cos()),
            ("exp(x1)", x.exp(), x.exp(), x.exp()),
            ("log(x1)", x.ln(), 1.0 / x, -1.0 / (x * x)),
            ("sqrt(x1)", x.sqrt(), 0.5 / x.sqrt(), -0.25 * x.powf(-1.5)),
            (
                "tanh(x1)",
                x.tanh(),
                1.0 - x.tanh().powi(2),
                -2.0 * x.tanh() * (1.0 - x.tanh().powi(2)),
            ),
            ("x1^2.5", x.powf(2.5), 2.5 * x.powf(1.5), 3.75 * x.sqrt()),
        ];
        for (src, f0, f1, f2) in cases {
            let d = second_order(&SmoothMap::parse(src, 1, 1).unwrap(), &[x]).unwrap();
            assert_abs_diff_eq!(d.value[0], f0, epsilon = 1e-14);
            assert_abs_diff_eq!(d.jac[0][0], f1, epsilon = 1e-14);
            assert_abs_diff_eq!(d.hess[0][0][0], f2, epsilon = 1e-14);
        }
    }

    #[test]
    fn quotient_rule() {
        let f = SmoothMap::parse("x1 / x2", 2, 1).unwrap();
        let (a, b) = (1.3, -0.4);
        let d = second_order(&f, &[a, b]).unwrap();
        assert_abs_diff_eq!(d.jac[0][0], 1.0 / b, epsilon = 1e-14);
        assert_abs_diff_eq!(d.jac[0][1], -a / (b * b), epsilon = 1e-14);
        assert_abs_diff_eq!(d.hess[0][0][1], -1.0 / (b * b), epsilon = 1e-14);
        assert_abs_diff_eq!(d.hess[0][1][1], 2.0 * a / (b * b * b), epsilon = 1e-13);
        assert_eq!(d.hess[0][0][0], 0.0);
    }

    #[test]
    fn integer_powers_at_zero_base() {
        for (src, f1, f2) in [("x1^1", 1.0, 0.0), ("x1^2", 0.0, 2.0), ("x1^3", 0.0, 0.0), ("x1^0", 0.0, 0.0)] {
            let d = second_order(&SmoothMap::parse(src, 1, 1).unwrap(), &[0.0]).unwrap();
            assert_eq!((d.jac[0][0], d.hess[0][0][0]), (f1, f2), "{src}");
        }
        let f = SmoothMap::parse("x1^-1", 1, 1).unwrap();
        assert!(second_order(&f, &[0.0]).is_err());
        assert_abs_diff_eq!(second_order(&f, &[-2.0]).unwrap().hess[0][0][0], -0.25, epsilon = 1e-15);
    }

    #[test]
    fn sqrt_at_zero_has_no_derivative() {
        let f = SmoothMap::parse("sqrt(x1)", 1, 1).unwrap();
        assert_eq!(f.eval(&[0.0]).unwrap(), vec![0.0]);
        match second_order(&f, &[0.0]) {
            Err(Error::Domain(d)) => assert_eq!(d.op, "sqrt"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn exact_on_quadratics() {
        let f = SmoothMap::parse("3 - 2*x1 + 0.5*x2 + x1*x2 - 4*x2^2 + 0.25*x1^2", 2, 1).unwrap();
        for pt in [[0.0, 0.0], [1.5, -0.75], [-2.0, 2.0]] {
            let d = second_order(&f, &pt).unwrap();
            assert_eq!(d.hess[0], vec![vec![0.5, 1.0], vec![1.0, -8.0]]);
            assert_abs_diff_eq!(d.jac[0][0], -2.0 + pt[1] + 0.5 * pt[0], epsilon = 1e-15);
            assert_abs_diff_eq!(d.jac[0][1], 0.5 + pt[0] - 8.0 * pt[1], epsilon = 1e-15);
        }
    }
}
