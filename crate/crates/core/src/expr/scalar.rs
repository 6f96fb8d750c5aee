use super::Func;

/// Operator failure inside an expression, before it is tied to a component.
#[derive(Debug, Clone, PartialEq)]
pub struct OpError {
    pub op: &'static str,
    pub reason: String,
}

impl OpError {
    pub fn new(op: &'static str, reason: impl Into<String>) -> Self {
        OpError {
            op,
            reason: reason.into(),
        }
    }
}

/// Number type an [`Expr`](super::Expr) can be evaluated over.
///
/// Fallible operations check the domain of the value part. Implementations
/// that carry derivatives may additionally reject points where a derivative
/// of the operator is undefined.
pub trait Scalar: Clone {
    /// A constant in a domain of dimension `n`.
    fn constant(c: f64, n: usize) -> Self;
    fn value(&self) -> f64;
    fn neg(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self, OpError>;
    fn powc(&self, exponent: f64) -> Result<Self, OpError>;
    fn apply(&self, f: Func) -> Result<Self, OpError>;
}

pub(crate) fn is_integer(c: f64) -> bool {
    c.fract() == 0.0 && c.abs() <= i32::MAX as f64
}

/// Domain rule shared by every scalar type: `v^c` needs `v > 0` unless `c`
/// is an integer, and `v != 0` when `c` is a negative integer.
pub(crate) fn check_pow(v: f64, c: f64) -> Result<(), OpError> {
    if is_integer(c) {
        if c < 0.0 && v == 0.0 {
            return Err(OpError::new("^", "zero base with negative exponent"));
        }
    } else if v <= 0.0 {
        return Err(OpError::new("^", format!("non-integer exponent {c} needs a positive base, got {v}")));
    }
    Ok(())
}

pub(crate) fn powc_value(v: f64, c: f64) -> f64 {
    if is_integer(c) {
        v.powi(c as i32)
    } else {
        v.powf(c)
    }
}

impl Scalar for f64 {
    fn constant(c: f64, _n: usize) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn neg(&self) -> Self {
        -self
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Result<Self, OpError> {
        if *rhs == 0.0 {
            return Err(OpError::new("/", "division by zero"));
        }
        Ok(self / rhs)
    }

    fn powc(&self, exponent: f64) -> Result<Self, OpError> {
        check_pow(*self, exponent)?;
        Ok(powc_value(*self, exponent))
    }

    fn apply(&self, f: Func) -> Result<Self, OpError> {
        let v = *self;
        Ok(match f {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Tanh => v.tanh(),
            Func::Log => {
                if v <= 0.0 {
                    return Err(OpError::new("log", format!("argument {v} is not positive")));
                }
                v.ln()
            }
            Func::Sqrt => {
                if v < 0.0 {
                    return Err(OpError::new("sqrt", format!("argument {v} is negative")));
                }
                v.sqrt()
            }
        })
    }
}
