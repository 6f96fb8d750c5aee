//! Canonical maps between jet spaces.
//!
//! * [`flip_jet2`]: the involution of J²₂ₚM induced by precomposing
//!   representatives with the flip (u, w) ↦ (w, u).
//! * [`lambda`]: the quotient J²₂ₚM → J¹(J¹M), keeping only the mixed
//!   second-derivative block.
//! * [`ell`]: the involution of J¹(J¹M) through which `flip_jet2` descends.
//! * [`prolong1`], [`prolong2`], [`prolong_double`]: the maps induced by a
//!   smooth map h on J¹, J² and J¹J¹.

use crate::error::{shape, Result};
use crate::expr::SmoothMap;
use crate::jet::{DoubleJet, Jet1, Jet2, Matrix, Tensor3};
use crate::taylor::{second_order, SecondOrderData};

/// Precomposition with the flip: swaps the u and w column blocks of A and
/// permutes the four p×p blocks of each B.
pub fn flip_jet2(j: &Jet2) -> Jet2 {
    let p = j.p;
    let n = 2 * p;
    let sw = |i: usize| (i + p) % n;
    let first = j
        .first
        .iter()
        .map(|row| (0..n).map(|c| row[sw(c)]).collect())
        .collect();
    let second = j
        .second
        .iter()
        .map(|b| {
            (0..n)
                .map(|r| (0..n).map(|c| b[sw(r)][sw(c)]).collect())
                .collect()
        })
        .collect();
    Jet2 {
        p,
        m: j.m,
        x: j.x.clone(),
        first,
        second,
    }
}

/// Quotient map: X = w-columns of A, Y = u-columns of A,
/// C[j][α][β] = B[j][α][p + β]. The pure uu and ww blocks are discarded.
pub fn lambda(j: &Jet2) -> DoubleJet {
    let p = j.p;
    DoubleJet {
        p,
        m: j.m,
        x: j.x.clone(),
        x_vel: j.first.iter().map(|row| row[p..].to_vec()).collect(),
        y_vel: j.first.iter().map(|row| row[..p].to_vec()).collect(),
        mixed: j
            .second
            .iter()
            .map(|b| b[..p].iter().map(|row| row[p..].to_vec()).collect())
            .collect(),
    }
}

/// A preimage of `v` under [`lambda`]: uu and ww blocks zero, the uw block
/// equal to C and the wu block to Cᵀ.
pub fn lambda_section(v: &DoubleJet) -> Jet2 {
    let p = v.p;
    let n = 2 * p;
    let first = v
        .y_vel
        .iter()
        .zip(&v.x_vel)
        .map(|(y, x)| y.iter().chain(x).copied().collect())
        .collect();
    let second = v
        .mixed
        .iter()
        .map(|c| {
            let mut b = vec![vec![0.0; n]; n];
            for a in 0..p {
                for bb in 0..p {
                    b[a][p + bb] = c[a][bb];
                    b[p + bb][a] = c[a][bb];
                }
            }
            b
        })
        .collect();
    Jet2 {
        p,
        m: v.m,
        x: v.x.clone(),
        first,
        second,
    }
}

fn transpose(c: &Matrix) -> Matrix {
    let rows = c.len();
    let cols = c.first().map_or(0, Vec::len);
    (0..cols).map(|b| (0..rows).map(|a| c[a][b]).collect()).collect()
}

/// The canonical involution: swaps X and Y and transposes every C[j].
pub fn ell(v: &DoubleJet) -> DoubleJet {
    DoubleJet {
        p: v.p,
        m: v.m,
        x: v.x.clone(),
        x_vel: v.y_vel.clone(),
        y_vel: v.x_vel.clone(),
        mixed: v.mixed.iter().map(transpose).collect(),
    }
}

fn derivatives_at(h: &SmoothMap, x: &[f64]) -> Result<SecondOrderData> {
    if h.arity_in() != x.len() {
        return Err(shape(format!(
            "map takes {} inputs but the jet lives in dimension {}",
            h.arity_in(),
            x.len()
        )));
    }
    second_order(h, x)
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| row.iter().zip(b).map(|(r, brow)| r * brow[c]).sum())
                .collect()
        })
        .collect()
}

/// `h¹([x; X]) = [h(x); Dh(x)·X]`.
pub fn prolong1(h: &SmoothMap, j: &Jet1) -> Result<Jet1> {
    let d = derivatives_at(h, &j.x)?;
    Ok(Jet1 {
        p: j.p,
        m: h.arity_out(),
        velocity: mat_mul(&d.jac, &j.velocity),
        x: d.value,
    })
}

/// Second-order chain rule term: Σ_j Dh[i][j]·T[j] + Σ_{j,l} D²h[i][j][l]·L[j][r]·R[l][c].
fn chain2(d: &SecondOrderData, t: &Tensor3, left: &Matrix, right: &Matrix) -> Tensor3 {
    let rows = left.first().map_or(0, Vec::len);
    let cols = right.first().map_or(0, Vec::len);
    let m = left.len();
    d.jac
        .iter()
        .zip(&d.hess)
        .map(|(dh, d2h)| {
            (0..rows)
                .map(|r| {
                    (0..cols)
                        .map(|c| {
                            let mut s = 0.0;
                            for j in 0..m {
                                s += dh[j] * t[j][r][c];
                            }
                            for j in 0..m {
                                for l in 0..m {
                                    s += d2h[j][l] * left[j][r] * right[l][c];
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Transport of a 2-jet along h: `j²φ ↦ j²(h∘φ)`.
pub fn prolong2(h: &SmoothMap, j: &Jet2) -> Result<Jet2> {
    let d = derivatives_at(h, &j.x)?;
    Ok(Jet2 {
        p: j.p,
        m: h.arity_out(),
        first: mat_mul(&d.jac, &j.first),
        second: chain2(&d, &j.second, &j.first, &j.first),
        x: d.value,
    })
}

/// `(h¹)¹` on double jets.
pub fn prolong_double(h: &SmoothMap, v: &DoubleJet) -> Result<DoubleJet> {
    let d = derivatives_at(h, &v.x)?;
    Ok(DoubleJet {
        p: v.p,
        m: h.arity_out(),
        x_vel: mat_mul(&d.jac, &v.x_vel),
        y_vel: mat_mul(&d.jac, &v.y_vel),
        mixed: chain2(&d, &v.mixed, &v.y_vel, &v.x_vel),
        x: d.value,
    })
}
