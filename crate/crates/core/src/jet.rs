//! Jet values in chart coordinates and their extraction from maps.
//!
//! Every jet has its source at the origin. Velocity matrices are stored
//! row = target component, column = source direction. Second-derivative
//! tensors are indexed `[component][row][column]`.
//!
//! The JSON encodings below are the interchange format of the CLI:
//!
//! ```text
//! Jet1      {"p","m","x","X"}
//! Jet2      {"p","m","x","A","B"}          A: m × 2p, B: m × 2p × 2p
//! DoubleJet {"p","m","x","X","Y","C"}      C: m × p × p
//! VBJet     {"p","m","k","x","y","F","G"}
//! ```

use serde::{Deserialize, Serialize};

use crate::canon;
use crate::error::{shape, Error, Result};
use crate::expr::{Expr, SmoothMap, VarScheme};
use crate::taylor::second_order;

pub type Matrix = Vec<Vec<f64>>;
pub type Tensor3 = Vec<Vec<Vec<f64>>>;

/// Default tolerance for jet equality and anchor comparison.
pub const JET_TOL: f64 = 1e-9;

/// Uniform access to the coordinates of a jet, for comparisons.
pub trait Coordinates {
    /// Dimension signature; two values are comparable iff these agree.
    fn dims(&self) -> Vec<usize>;
    /// All coordinates in a fixed order.
    fn coords(&self) -> Vec<f64>;

    /// Largest componentwise deviation. Mismatched dimensions are an error.
    fn deviation(&self, other: &Self) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(shape(format!(
                "cannot compare dimensions {:?} and {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(self
            .coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.deviation(other)? <= tol)
    }
}

/// A point `[x; X_α]` of J¹ₚM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Jet1Repr")]
pub struct Jet1 {
    pub p: usize,
    pub m: usize,
    pub x: Vec<f64>,
    #[serde(rename = "X")]
    pub velocity: Matrix,
}

/// A point `[x; A; B]` of J²₂ₚM. Columns `0..p` of `first` are
/// u-derivatives, columns `p..2p` are w-derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Jet2Repr")]
pub struct Jet2 {
    pub p: usize,
    pub m: usize,
    pub x: Vec<f64>,
    #[serde(rename = "A")]
    pub first: Matrix,
    #[serde(rename = "B")]
    pub second: Tensor3,
}

/// A point of J¹(J¹M) as the quadruple (x, X, Y, C): `(x, X)` is the base
/// 1-jet (w-derivatives), `Y` the u-derivatives and `C[j][α][β]` the mixed
/// second derivative ∂²φʲ/∂u_α∂w_β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DoubleJetRepr")]
pub struct DoubleJet {
    pub p: usize,
    pub m: usize,
    pub x: Vec<f64>,
    #[serde(rename = "X")]
    pub x_vel: Matrix,
    #[serde(rename = "Y")]
    pub y_vel: Matrix,
    #[serde(rename = "C")]
    pub mixed: Tensor3,
}

/// A point `[x, y; F, G]` of J¹ₚE for the trivial bundle E = ℝᵐ × ℝᵏ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VBJetRepr")]
pub struct VBJet {
    pub p: usize,
    pub m: usize,
    pub k: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(rename = "F")]
    pub base_vel: Matrix,
    #[serde(rename = "G")]
    pub fiber_vel: Matrix,
}

fn check_vec(name: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(shape(format!("`{name}` has length {}, expected {len}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("`{name}` has non-finite entries")));
    }
    Ok(())
}

fn check_matrix(name: &str, mat: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if mat.len() != rows {
        return Err(shape(format!("`{name}` has {} rows, expected {rows}", mat.len())));
    }
    mat.iter().try_for_each(|row| check_vec(name, row, cols))
}

fn check_tensor(name: &str, t: &Tensor3, d0: usize, d1: usize, d2: usize) -> Result<()> {
    if t.len() != d0 {
        return Err(shape(format!("`{name}` has {} slices, expected {d0}", t.len())));
    }
    t.iter().try_for_each(|s| check_matrix(name, s, d1, d2))
}

fn check_positive(p: usize, m: usize) -> Result<()> {
    if p == 0 || m == 0 {
        return Err(Error::Invalid("dimensions must be positive".into()));
    }
    Ok(())
}

impl Jet1 {
    pub fn new(x: Vec<f64>, velocity: Matrix) -> Result<Self> {
        let m = x.len();
        let p = velocity.first().map_or(0, Vec::len);
        let j = Jet1 { p, m, x, velocity };
        j.validate()?;
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.p, self.m)?;
        check_vec("x", &self.x, self.m)?;
        check_matrix("X", &self.velocity, self.m, self.p)
    }
}

impl Jet2 {
    /// Builds a 2-jet; each `second[j]` must be symmetric to within
    /// [`JET_TOL`] and is stored symmetrized.
    pub fn new(x: Vec<f64>, first: Matrix, second: Tensor3) -> Result<Self> {
        let m = x.len();
        let cols = first.first().map_or(0, Vec::len);
        if !cols.is_multiple_of(2) {
            return Err(shape(format!("`A` has {cols} columns, expected an even count")));
        }
        let mut j = Jet2 {
            p: cols / 2,
            m,
            x,
            first,
            second,
        };
        j.validate()?;
        j.symmetrize();
        Ok(j)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.p, self.m)?;
        let n = 2 * self.p;
        check_vec("x", &self.x, self.m)?;
        check_matrix("A", &self.first, self.m, n)?;
        check_tensor("B", &self.second, self.m, n, n)?;
        let asym = self
            .second
            .iter()
            .flat_map(|b| (0..n).flat_map(move |r| (0..n).map(move |c| (b[r][c] - b[c][r]).abs())))
            .fold(0.0, f64::max);
        if asym > JET_TOL {
            return Err(Error::Invalid(format!(
                "`B` is not symmetric (deviation {asym:e})"
            )));
        }
        Ok(())
    }

    fn symmetrize(&mut self) {
        let n = 2 * self.p;
        for b in &mut self.second {
            for r in 0..n {
                for c in (r + 1)..n {
                    let s = 0.5 * (b[r][c] + b[c][r]);
                    b[r][c] = s;
                    b[c][r] = s;
                }
            }
        }
    }
}

impl DoubleJet {
    pub fn new(x: Vec<f64>, x_vel: Matrix, y_vel: Matrix, mixed: Tensor3) -> Result<Self> {
        let m = x.len();
        let p = x_vel.first().map_or(0, Vec::len);
        let v = DoubleJet {
            p,
            m,
            x,
            x_vel,
            y_vel,
            mixed,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.p, self.m)?;
        check_vec("x", &self.x, self.m)?;
        check_matrix("X", &self.x_vel, self.m, self.p)?;
        check_matrix("Y", &self.y_vel, self.m, self.p)?;
        check_tensor("C", &self.mixed, self.m, self.p, self.p)
    }
}

impl VBJet {
    pub fn new(x: Vec<f64>, y: Vec<f64>, base_vel: Matrix, fiber_vel: Matrix) -> Result<Self> {
        let p = base_vel.first().map_or(0, Vec::len);
        let v = VBJet {
            p,
            m: x.len(),
            k: y.len(),
            x,
            y,
            base_vel,
            fiber_vel,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive(self.p, self.m)?;
        check_positive(self.p, self.k)?;
        check_vec("x", &self.x, self.m)?;
        check_vec("y", &self.y, self.k)?;
        check_matrix("F", &self.base_vel, self.m, self.p)?;
        check_matrix("G", &self.fiber_vel, self.k, self.p)
    }
}

impl Coordinates for Jet1 {
    fn dims(&self) -> Vec<usize> {
        vec![self.p, self.m]
    }

    fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(self.velocity.iter().flatten()).copied().collect()
    }
}

impl Coordinates for Jet2 {
    fn dims(&self) -> Vec<usize> {
        vec![self.p, self.m]
    }

    fn coords(&self) -> Vec<f64> {
        self.x
            .iter()
            .chain(self.first.iter().flatten())
            .chain(self.second.iter().flatten().flatten())
            .copied()
            .collect()
    }
}

impl Coordinates for DoubleJet {
    fn dims(&self) -> Vec<usize> {
        vec![self.p, self.m]
    }

    fn coords(&self) -> Vec<f64> {
        self.x
            .iter()
            .chain(self.x_vel.iter().flatten())
            .chain(self.y_vel.iter().flatten())
            .chain(self.mixed.iter().flatten().flatten())
            .copied()
            .collect()
    }
}

impl Coordinates for VBJet {
    fn dims(&self) -> Vec<usize> {
        vec![self.p, self.m, self.k]
    }

    fn coords(&self) -> Vec<f64> {
        self.x
            .iter()
            .chain(&self.y)
            .chain(self.base_vel.iter().flatten())
            .chain(self.fiber_vel.iter().flatten())
            .copied()
            .collect()
    }
}

/// `j¹φ` for φ: ℝᵖ → ℝᵐ, with p the map's input arity.
pub fn jet1_of(map: &SmoothMap) -> Result<Jet1> {
    let d = second_order(map, &vec![0.0; map.arity_in()])?;
    Ok(Jet1 {
        p: map.arity_in(),
        m: map.arity_out(),
        x: d.value,
        velocity: d.jac,
    })
}

/// `j²φ` for φ: ℝᵖ × ℝᵖ → ℝᵐ.
pub fn jet2_of(map: &SmoothMap) -> Result<Jet2> {
    let n = map.arity_in();
    if !n.is_multiple_of(2) {
        return Err(shape(format!(
            "a 2-jet source needs an even domain ℝᵖ × ℝᵖ, got arity {n}"
        )));
    }
    let d = second_order(map, &vec![0.0; n])?;
    Ok(Jet2 {
        p: n / 2,
        m: map.arity_out(),
        x: d.value,
        first: d.jac,
        second: d.hess,
    })
}

/// `j¹Φ` with Φ(u) = j¹(φ(u, ·)), read off the 2-jet of φ through the
/// quotient map.
pub fn doublejet_of(map: &SmoothMap) -> Result<DoubleJet> {
    Ok(canon::lambda(&jet2_of(map)?))
}

/// `j¹` of the section u ↦ (base(u), fiber(u)) of the trivial bundle.
pub fn vbjet_of(base_map: &SmoothMap, fiber_map: &SmoothMap) -> Result<VBJet> {
    if base_map.arity_in() != fiber_map.arity_in() {
        return Err(shape(format!(
            "base map has source dimension {}, fiber map {}",
            base_map.arity_in(),
            fiber_map.arity_in()
        )));
    }
    let base = jet1_of(base_map)?;
    let fiber = jet1_of(fiber_map)?;
    Ok(VBJet {
        p: base.p,
        m: base.m,
        k: fiber.m,
        x: base.x,
        y: fiber.x,
        base_vel: base.velocity,
        fiber_vel: fiber.velocity,
    })
}

/// The polynomial representative `x + A·ū + ½ ūᵀ·B·ū` of a 2-jet.
pub fn jet2_representative(j: &Jet2) -> SmoothMap {
    let n = 2 * j.p;
    let components = (0..j.m)
        .map(|i| {
            let mut e = Expr::Const(j.x[i]);
            for a in 0..n {
                e = Expr::add(e, Expr::mul(Expr::Const(j.first[i][a]), Expr::Var(a)));
            }
            for a in 0..n {
                for b in 0..n {
                    let coef = 0.5 * j.second[i][a][b];
                    e = Expr::add(
                        e,
                        Expr::mul(
                            Expr::Const(coef),
                            Expr::mul(Expr::Var(a), Expr::Var(b)),
                        ),
                    );
                }
            }
            e
        })
        .collect();
    SmoothMap::from_components(n, VarScheme::Split { p: j.p }, components)
        .expect("representative of a validated jet is well-formed")
}

macro_rules! repr {
    ($repr:ident => $target:ident { $($field:ident $(as $json:literal)? : $ty:ty),* $(,)? }) => {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct $repr {
            $( $(#[serde(rename = $json)])? $field: $ty, )*
        }
    };
}

repr!(Jet1Repr => Jet1 { p: usize, m: usize, x: Vec<f64>, velocity as "X": Matrix });
repr!(Jet2Repr => Jet2 { p: usize, m: usize, x: Vec<f64>, first as "A": Matrix, second as "B": Tensor3 });
repr!(DoubleJetRepr => DoubleJet {
    p: usize, m: usize, x: Vec<f64>,
    x_vel as "X": Matrix, y_vel as "Y": Matrix, mixed as "C": Tensor3,
});
repr!(VBJetRepr => VBJet {
    p: usize, m: usize, k: usize, x: Vec<f64>, y: Vec<f64>,
    base_vel as "F": Matrix, fiber_vel as "G": Matrix,
});

impl TryFrom<Jet1Repr> for Jet1 {
    type Error = Error;

    fn try_from(r: Jet1Repr) -> Result<Self> {
        let j = Jet1 {
            p: r.p,
            m: r.m,
            x: r.x,
            velocity: r.velocity,
        };
        j.validate()?;
        Ok(j)
    }
}

impl TryFrom<Jet2Repr> for Jet2 {
    type Error = Error;

    fn try_from(r: Jet2Repr) -> Result<Self> {
        let mut j = Jet2 {
            p: r.p,
            m: r.m,
            x: r.x,
            first: r.first,
            second: r.second,
        };
        j.validate()?;
        j.symmetrize();
        Ok(j)
    }
}

impl TryFrom<DoubleJetRepr> for DoubleJet {
    type Error = Error;

    fn try_from(r: DoubleJetRepr) -> Result<Self> {
        let v = DoubleJet {
            p: r.p,
            m: r.m,
            x: r.x,
            x_vel: r.x_vel,
            y_vel: r.y_vel,
            mixed: r.mixed,
        };
        v.validate()?;
        Ok(v)
    }
}

impl TryFrom<VBJetRepr> for VBJet {
    type Error = Error;

    fn try_from(r: VBJetRepr) -> Result<Self> {
        let v = VBJet {
            p: r.p,
            m: r.m,
            k: r.k,
            x: r.x,
            y: r.y,
            base_vel: r.base_vel,
            fiber_vel: r.fiber_vel,
        };
        v.validate()?;
        Ok(v)
    }
}

/// Any jet value, classified by the keys of its JSON object.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyJet {
    Jet1(Jet1),
    Jet2(Jet2),
    Double(DoubleJet),
    Vb(VBJet),
}

impl AnyJet {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyJet::Jet1(_) => "Jet1",
            AnyJet::Jet2(_) => "Jet2",
            AnyJet::Double(_) => "DoubleJet",
            AnyJet::Vb(_) => "VBJet",
        }
    }

    /// Decodes one of the four JSON encodings. The type is chosen by its
    /// distinguishing keys: `C` for DoubleJet, `B` for Jet2, `k` for VBJet,
    /// otherwise Jet1.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Invalid("jet payload must be a JSON object".into()))?;
        let has = |k: &str| obj.contains_key(k);
        let decode = |e: serde_json::Error| Error::Invalid(format!("invalid jet payload: {e}"));
        let jet = if has("C") {
            AnyJet::Double(serde_json::from_value(value).map_err(decode)?)
        } else if has("B") {
            AnyJet::Jet2(serde_json::from_value(value).map_err(decode)?)
        } else if has("k") {
            AnyJet::Vb(serde_json::from_value(value).map_err(decode)?)
        } else {
            AnyJet::Jet1(serde_json::from_value(value).map_err(decode)?)
        };
        Ok(jet)
    }

    pub fn to_json(&self) -> String {
        let text = match self {
            AnyJet::Jet1(j) => serde_json::to_string(j),
            AnyJet::Jet2(j) => serde_json::to_string(j),
            AnyJet::Double(j) => serde_json::to_string(j),
            AnyJet::Vb(j) => serde_json::to_string(j),
        };
        text.expect("jets contain only finite numbers")
    }
}
