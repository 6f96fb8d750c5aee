//! Vector-bundle operations on jets.
//!
//! Every fiber operation has the form `combine(a, b, λ) = a + λ•b` and
//! requires `a` and `b` to share the anchor of the structure (the data the
//! fiber is attached to). The result always carries `a`'s anchor unchanged.
//!
//! | structure              | anchor   | fiber      |
//! |------------------------|----------|------------|
//! | J¹M                    | x        | X          |
//! | J¹E, primary (over E)  | (x, y)   | (F, G)     |
//! | J¹E, secondary (J¹M)   | (x, F)   | (y, G)     |
//! | J¹J¹M, primary         | (x, X)   | (Y, C)     |
//! | J¹J¹M, secondary       | (x, Y)   | (X, C)     |
//!
//! The set identities relating trivialization domains of the two structures
//! on J¹E carry no runtime content and are not modelled here; what is
//! computable is the chart change [`omega_hat`] between the two induced
//! charts and the row split [`xi_split`].

use crate::error::{shape, Error, Result};
use crate::jet::{DoubleJet, Jet1, Matrix, Tensor3, VBJet, JET_TOL};

fn anchor_check(structure: &'static str, field: &'static str, a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(shape(format!("{structure}: `{field}` lengths differ")));
    }
    let deviation = a
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max);
    if deviation > JET_TOL {
        return Err(Error::AnchorMismatch {
            structure,
            field,
            deviation,
        });
    }
    Ok(())
}

fn anchor_check_matrix(structure: &'static str, field: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if a.len() != b.len() {
        return Err(shape(format!("{structure}: `{field}` row counts differ")));
    }
    a.iter()
        .zip(b)
        .try_for_each(|(ra, rb)| anchor_check(structure, field, ra, rb))
}

fn axpy(a: &[f64], b: &[f64], lambda: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(u, v)| u + lambda * v).collect()
}

fn axpy_matrix(a: &Matrix, b: &Matrix, lambda: f64) -> Matrix {
    a.iter().zip(b).map(|(ra, rb)| axpy(ra, rb, lambda)).collect()
}

fn axpy_tensor(a: &Tensor3, b: &Tensor3, lambda: f64) -> Tensor3 {
    a.iter().zip(b).map(|(sa, sb)| axpy_matrix(sa, sb, lambda)).collect()
}

fn same_dims(structure: &'static str, a: &[usize], b: &[usize]) -> Result<()> {
    if a != b {
        return Err(shape(format!("{structure}: dimensions {a:?} and {b:?} differ")));
    }
    Ok(())
}

/// `a + λ•b` in the fiber of J¹M over `a.x`.
pub fn jet1_combine(a: &Jet1, b: &Jet1, lambda: f64) -> Result<Jet1> {
    const S: &str = "J1M";
    same_dims(S, &[a.p, a.m], &[b.p, b.m])?;
    anchor_check(S, "x", &a.x, &b.x)?;
    Ok(Jet1 {
        p: a.p,
        m: a.m,
        x: a.x.clone(),
        velocity: axpy_matrix(&a.velocity, &b.velocity, lambda),
    })
}

/// Primary structure on J¹E: fibers over the point (x, y) of E.
pub fn vb_primary_combine(a: &VBJet, b: &VBJet, lambda: f64) -> Result<VBJet> {
    const S: &str = "J1E primary";
    same_dims(S, &[a.p, a.m, a.k], &[b.p, b.m, b.k])?;
    anchor_check(S, "x", &a.x, &b.x)?;
    anchor_check(S, "y", &a.y, &b.y)?;
    Ok(VBJet {
        p: a.p,
        m: a.m,
        k: a.k,
        x: a.x.clone(),
        y: a.y.clone(),
        base_vel: axpy_matrix(&a.base_vel, &b.base_vel, lambda),
        fiber_vel: axpy_matrix(&a.fiber_vel, &b.fiber_vel, lambda),
    })
}

/// Secondary structure on J¹E: fibers over the 1-jet (x, F) in J¹M.
pub fn vb_secondary_combine(a: &VBJet, b: &VBJet, lambda: f64) -> Result<VBJet> {
    const S: &str = "J1E secondary";
    same_dims(S, &[a.p, a.m, a.k], &[b.p, b.m, b.k])?;
    anchor_check(S, "x", &a.x, &b.x)?;
    anchor_check_matrix(S, "F", &a.base_vel, &b.base_vel)?;
    Ok(VBJet {
        p: a.p,
        m: a.m,
        k: a.k,
        x: a.x.clone(),
        y: axpy(&a.y, &b.y, lambda),
        base_vel: a.base_vel.clone(),
        fiber_vel: axpy_matrix(&a.fiber_vel, &b.fiber_vel, lambda),
    })
}

/// Primary structure on J¹(J¹M): fixes (x, X), adds (Y, C).
pub fn dj_primary_combine(a: &DoubleJet, b: &DoubleJet, lambda: f64) -> Result<DoubleJet> {
    const S: &str = "J1J1M primary";
    same_dims(S, &[a.p, a.m], &[b.p, b.m])?;
    anchor_check(S, "x", &a.x, &b.x)?;
    anchor_check_matrix(S, "X", &a.x_vel, &b.x_vel)?;
    Ok(DoubleJet {
        p: a.p,
        m: a.m,
        x: a.x.clone(),
        x_vel: a.x_vel.clone(),
        y_vel: axpy_matrix(&a.y_vel, &b.y_vel, lambda),
        mixed: axpy_tensor(&a.mixed, &b.mixed, lambda),
    })
}

/// Secondary structure on J¹(J¹M): fixes (x, Y), adds (X, C).
pub fn dj_secondary_combine(a: &DoubleJet, b: &DoubleJet, lambda: f64) -> Result<DoubleJet> {
    const S: &str = "J1J1M secondary";
    same_dims(S, &[a.p, a.m], &[b.p, b.m])?;
    anchor_check(S, "x", &a.x, &b.x)?;
    anchor_check_matrix(S, "Y", &a.y_vel, &b.y_vel)?;
    Ok(DoubleJet {
        p: a.p,
        m: a.m,
        x: a.x.clone(),
        x_vel: axpy_matrix(&a.x_vel, &b.x_vel, lambda),
        y_vel: a.y_vel.clone(),
        mixed: axpy_tensor(&a.mixed, &b.mixed, lambda),
    })
}

fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![0.0; cols]; rows]
}

/// Zero of the J¹M fiber through `a`.
pub fn jet1_zero(a: &Jet1) -> Jet1 {
    Jet1 {
        velocity: zeros(a.m, a.p),
        ..a.clone()
    }
}

pub fn vb_primary_zero(a: &VBJet) -> VBJet {
    VBJet {
        base_vel: zeros(a.m, a.p),
        fiber_vel: zeros(a.k, a.p),
        ..a.clone()
    }
}

pub fn vb_secondary_zero(a: &VBJet) -> VBJet {
    VBJet {
        y: vec![0.0; a.k],
        fiber_vel: zeros(a.k, a.p),
        ..a.clone()
    }
}

pub fn dj_primary_zero(a: &DoubleJet) -> DoubleJet {
    DoubleJet {
        y_vel: zeros(a.m, a.p),
        mixed: vec![zeros(a.p, a.p); a.m],
        ..a.clone()
    }
}

pub fn dj_secondary_zero(a: &DoubleJet) -> DoubleJet {
    DoubleJet {
        x_vel: zeros(a.m, a.p),
        mixed: vec![zeros(a.p, a.p); a.m],
        ..a.clone()
    }
}

/// Projection of J¹E onto E: the point (x, y).
pub fn proj_primary(v: &VBJet) -> (Vec<f64>, Vec<f64>) {
    (v.x.clone(), v.y.clone())
}

/// Projection of J¹E onto J¹M: the 1-jet (x, F).
pub fn proj_secondary(v: &VBJet) -> Jet1 {
    Jet1 {
        p: v.p,
        m: v.m,
        x: v.x.clone(),
        velocity: v.base_vel.clone(),
    }
}

/// π̃: the base 1-jet (x, X) of a double jet.
pub fn dj_proj_primary(v: &DoubleJet) -> Jet1 {
    Jet1 {
        p: v.p,
        m: v.m,
        x: v.x.clone(),
        velocity: v.x_vel.clone(),
    }
}

/// π¹: the prolonged projection (x, Y) of a double jet.
pub fn dj_proj_secondary(v: &DoubleJet) -> Jet1 {
    Jet1 {
        p: v.p,
        m: v.m,
        x: v.x.clone(),
        velocity: v.y_vel.clone(),
    }
}

fn check_cols(name: &str, m: &Matrix, cols: usize) -> Result<()> {
    if m.iter().any(|r| r.len() != cols) {
        return Err(shape(format!("`{name}` rows must all have length {cols}")));
    }
    Ok(())
}

/// Local form of the identity of J¹E between the secondary-induced chart
/// (x, f, y, g) and the primary-induced chart (x, y, f, g).
pub fn omega_hat(
    x: &[f64],
    f: &Matrix,
    y: &[f64],
    g: &Matrix,
) -> Result<(Vec<f64>, Vec<f64>, Matrix, Matrix)> {
    if f.len() != x.len() || g.len() != y.len() {
        return Err(shape("omega_hat: velocity rows must match x and y"));
    }
    let p = f.first().or(g.first()).map_or(0, Vec::len);
    check_cols("f", f, p)?;
    check_cols("g", g, p)?;
    Ok((x.to_vec(), y.to_vec(), f.clone(), g.clone()))
}

/// Inverse reordering (x, y, f, g) ↦ (x, f, y, g).
pub fn omega_hat_inverse(
    x: &[f64],
    y: &[f64],
    f: &Matrix,
    g: &Matrix,
) -> Result<(Vec<f64>, Matrix, Vec<f64>, Matrix)> {
    let (x, y, f, g) = omega_hat(x, f, y, g)?;
    Ok((x, f, y, g))
}

/// Splits the stacked velocity block of ℝᵐ⁺ᵏ into its ℝᵐ and ℝᵏ parts.
pub fn xi_split(h: &Matrix, m: usize) -> Result<(Matrix, Matrix)> {
    if m > h.len() {
        return Err(shape(format!("cannot split {} rows at {m}", h.len())));
    }
    let (f, g) = h.split_at(m);
    Ok((f.to_vec(), g.to_vec()))
}

/// Inverse of [`xi_split`]: stacks f over g.
pub fn xi_join(f: &Matrix, g: &Matrix) -> Result<Matrix> {
    let cols = f.first().or(g.first()).map_or(0, Vec::len);
    check_cols("f", f, cols)?;
    check_cols("g", g, cols)?;
    Ok(f.iter().chain(g).cloned().collect())
}

/// J¹ₚ(M × N) ≅ J¹ₚM × J¹ₚN on the first `m1` target coordinates.
pub fn product_split(j: &Jet1, m1: usize) -> Result<(Jet1, Jet1)> {
    if m1 == 0 || m1 >= j.m {
        return Err(Error::Invalid(format!(
            "split {m1} + {} of a {}-dimensional target needs both parts positive",
            j.m.saturating_sub(m1),
            j.m
        )));
    }
    let (x1, x2) = j.x.split_at(m1);
    let (v1, v2) = j.velocity.split_at(m1);
    Ok((
        Jet1 {
            p: j.p,
            m: m1,
            x: x1.to_vec(),
            velocity: v1.to_vec(),
        },
        Jet1 {
            p: j.p,
            m: j.m - m1,
            x: x2.to_vec(),
            velocity: v2.to_vec(),
        },
    ))
}

/// Checked variant of [`product_split`] for a declared `m1 + m2`.
pub fn product_split_sizes(j: &Jet1, m1: usize, m2: usize) -> Result<(Jet1, Jet1)> {
    if m1 + m2 != j.m {
        return Err(Error::Invalid(format!(
            "split sizes {m1} + {m2} do not add up to {}",
            j.m
        )));
    }
    product_split(j, m1)
}

/// Inverse of [`product_split`].
pub fn product_join(a: &Jet1, b: &Jet1) -> Result<Jet1> {
    if a.p != b.p {
        return Err(shape("product_join: source dimensions differ"));
    }
    Ok(Jet1 {
        p: a.p,
        m: a.m + b.m,
        x: a.x.iter().chain(&b.x).copied().collect(),
        velocity: a.velocity.iter().chain(&b.velocity).cloned().collect(),
    })
}
