use rand::Rng;
use serde_json::{json, Value};

use super::{Ctx, Law, Tol, Trial};
use crate::bundle;
use crate::canon::{prolong1, prolong2, prolong_double};
use crate::error::Result;
use crate::expr::{Func, SmoothMap, VarScheme};
use crate::jet::{doublejet_of, jet2_of, jet2_representative, Coordinates, DoubleJet, Jet1, Jet2, Matrix, VBJet};
use crate::taylor::{fd_second_order, second_order, second_order_raw};

pub(super) static REGISTRY: &[Law] = &[
    law("hessian_symmetry", Tol::Exact, hessian_symmetry),
    law("ad_vs_fd", Tol::Fd, ad_vs_fd),
    law("taylor_linearity", Tol::Exact, taylor_linearity),
    law("jet2_roundtrip", Tol::Exact, jet2_roundtrip),
    law("quotient_consistency", Tol::Zero, quotient_consistency),
    law("vb_axioms_jet1", Tol::Exact, vb_axioms_jet1),
    law("vb_axioms_vb_primary", Tol::Exact, vb_axioms_vb_primary),
    law("vb_axioms_vb_secondary", Tol::Exact, vb_axioms_vb_secondary),
    law("vb_axioms_dj_primary", Tol::Exact, vb_axioms_dj_primary),
    law("vb_axioms_dj_secondary", Tol::Exact, vb_axioms_dj_secondary),
    law("anchor_preservation", Tol::Zero, anchor_preservation),
    law("secondary_projection", Tol::Zero, secondary_projection),
    law("omega_hat_involution", Tol::Zero, omega_hat_involution),
    law("xi_split_inverse", Tol::Zero, xi_split_inverse),
    law("product_split_inverse", Tol::Zero, product_split_inverse),
    sweep("flip_involution", Tol::Representation, flip_involution),
    sweep("ell_involution", Tol::Representation, ell_involution),
    law("descent", Tol::Exact, descent),
    law("quotient_invariance", Tol::Zero, quotient_invariance),
    law("fiber_preservation", Tol::Zero, fiber_preservation),
    law("fiber_linearity", Tol::Exact, fiber_linearity),
    law("functoriality", Tol::Transcendental, functoriality),
    law("inverse_prolongation", Tol::Transcendental, inverse_prolongation),
    law("naturality_ell", Tol::Transcendental, naturality_ell),
    law("flip_partials", Tol::Exact, flip_partials),
    law("chainrule_lambda", Tol::Exact, chainrule_lambda),
];

const fn law(name: &'static str, tol: Tol, run: super::LawFn) -> Law {
    Law {
        name,
        tol,
        sweep_dims: false,
        run,
    }
}

const fn sweep(name: &'static str, tol: Tol, run: super::LawFn) -> Law {
    Law {
        name,
        tol,
        sweep_dims: true,
        run,
    }
}

fn enc<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("jets serialize")
}

fn trial(residual: f64, inputs: Value) -> Result<Trial> {
    Ok(Trial { residual, inputs })
}

fn max_of(residuals: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    residuals
        .into_iter()
        .try_fold(0.0_f64, |acc, r| r.map(|v| acc.max(v)))
}

fn vec_dev(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

fn mat_dev(a: &Matrix, b: &Matrix) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(u, v)| vec_dev(u, v)).fold(0.0, f64::max)
}

/// 0 when bit-identical, otherwise the deviation (or 1 if that rounds to 0).
fn identical<T: PartialEq + Coordinates>(a: &T, b: &T) -> Result<f64> {
    if a == b {
        Ok(0.0)
    } else {
        Ok(a.deviation(b)?.max(1.0))
    }
}

fn probe_point(ctx: &mut Ctx, n: usize) -> Vec<f64> {
    (0..n).map(|_| ctx.gen.uniform(-1.0, 1.0)).collect()
}

fn hessian_symmetry(ctx: &mut Ctx) -> Result<Trial> {
    let (n, m) = (2 * ctx.p(), ctx.m());
    let point = probe_point(ctx, n);
    let map = ctx.gen.map_at(n, m, VarScheme::Plain, true, &point);
    let raw = second_order_raw(&map, &point)?;
    trial(raw.asymmetry(), json!({"map": map.to_string(), "point": point}))
}

fn ad_vs_fd(ctx: &mut Ctx) -> Result<Trial> {
    let (n, m) = (ctx.index_n(), ctx.m());
    let point = probe_point(ctx, n);
    let map = ctx.gen.map_at(n, m, VarScheme::Plain, true, &point);
    let ad = second_order(&map, &point)?;
    let fd = fd_second_order(&map, &point, ctx.cfg().fd_step)?;
    trial(ad.relative_deviation(&fd), json!({"map": map.to_string(), "point": point}))
}

impl Ctx<'_> {
    fn index_n(&mut self) -> usize {
        let p = self.p();
        self.gen.index(1, 2 * p)
    }
}

fn taylor_linearity(ctx: &mut Ctx) -> Result<Trial> {
    let (n, m) = (ctx.index_n(), ctx.m());
    let point = probe_point(ctx, n);
    let f = ctx.gen.map_at(n, m, VarScheme::Plain, true, &point);
    let g = ctx.gen.map_at(n, m, VarScheme::Plain, true, &point);
    let (a, b) = (ctx.gen.value(), ctx.gen.value());
    let combined = second_order(&SmoothMap::linear_combination(a, &f, b, &g)?, &point)?;
    let (df, dg) = (second_order(&f, &point)?, second_order(&g, &point)?);
    let lin = |x: f64, y: f64| a * x + b * y;
    let mut residual = vec_dev(
        &combined.value,
        &df.value.iter().zip(&dg.value).map(|(x, y)| lin(*x, *y)).collect::<Vec<_>>(),
    );
    for i in 0..m {
        for c in 0..n {
            residual = residual.max((combined.jac[i][c] - lin(df.jac[i][c], dg.jac[i][c])).abs());
            for r in 0..n {
                let expect = lin(df.hess[i][r][c], dg.hess[i][r][c]);
                residual = residual.max((combined.hess[i][r][c] - expect).abs());
            }
        }
    }
    trial(
        residual,
        json!({"f": f.to_string(), "g": g.to_string(), "a": a, "b": b, "point": point}),
    )
}

fn jet2_roundtrip(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let j = ctx.gen.jet2(p, m);
    let back = jet2_of(&jet2_representative(&j))?;
    trial(j.deviation(&back)?, json!({"jet2": enc(&j)}))
}

fn quotient_consistency(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let phi = ctx.gen.split_map(p, m);
    let direct = doublejet_of(&phi)?;
    let via = (ctx.ops.lambda)(&jet2_of(&phi)?);
    trial(identical(&direct, &via)?, json!({"map": phi.to_string()}))
}

/// A fiber structure: combine, zero, and a generator for elements sharing
/// one anchor.
struct Structure<T> {
    combine: fn(&T, &T, f64) -> Result<T>,
    zero: fn(&T) -> T,
    sample: fn(&mut Ctx, usize) -> Vec<T>,
}

fn axioms<T: Coordinates + serde::Serialize>(ctx: &mut Ctx, s: Structure<T>) -> Result<Trial> {
    let v = (s.sample)(ctx, 3);
    let (a, b, c) = (&v[0], &v[1], &v[2]);
    let (lam, mu) = (ctx.gen.value(), ctx.gen.value());
    let add = |x: &T, y: &T| (s.combine)(x, y, 1.0);
    let scale = |l: f64, x: &T| (s.combine)(&(s.zero)(x), x, l);
    let residual = max_of([
        // commutativity
        add(a, b)?.deviation(&add(b, a)?),
        // associativity
        add(&add(a, b)?, c)?.deviation(&add(a, &add(b, c)?)?),
        // zero element
        (s.combine)(a, b, 0.0)?.deviation(a),
        add(&(s.zero)(a), a)?.deviation(a),
        // additive inverse
        (s.combine)(a, a, -1.0)?.deviation(&(s.zero)(a)),
        // distributivity over fiber and scalar addition
        scale(lam, &add(a, b)?)?.deviation(&add(&scale(lam, a)?, &scale(lam, b)?)?),
        scale(lam + mu, a)?.deviation(&add(&scale(lam, a)?, &scale(mu, a)?)?),
        // a + λ•b agrees with the composite of scaling and adding
        (s.combine)(a, b, lam)?.deviation(&add(a, &scale(lam, b)?)?),
    ])?;
    trial(
        residual,
        json!({"a": enc(a), "b": enc(b), "c": enc(c), "lambda": lam, "mu": mu}),
    )
}

fn sample_jet1(ctx: &mut Ctx, count: usize) -> Vec<Jet1> {
    let (p, m) = (ctx.p(), ctx.m());
    let first = ctx.gen.jet1(p, m);
    let mut out = vec![first.clone()];
    for _ in 1..count {
        out.push(Jet1 {
            velocity: ctx.gen.matrix(m, p),
            ..first.clone()
        });
    }
    out
}

fn vb_dims(ctx: &mut Ctx) -> (usize, usize, usize) {
    (ctx.p(), ctx.m(), ctx.gen.k())
}

fn sample_vb_primary(ctx: &mut Ctx, count: usize) -> Vec<VBJet> {
    let (p, m, k) = vb_dims(ctx);
    let first = ctx.gen.vb_jet(p, m, k);
    let mut out = vec![first.clone()];
    for _ in 1..count {
        out.push(VBJet {
            base_vel: ctx.gen.matrix(m, p),
            fiber_vel: ctx.gen.matrix(k, p),
            ..first.clone()
        });
    }
    out
}

fn sample_vb_secondary(ctx: &mut Ctx, count: usize) -> Vec<VBJet> {
    let (p, m, k) = vb_dims(ctx);
    let first = ctx.gen.vb_jet(p, m, k);
    let mut out = vec![first.clone()];
    for _ in 1..count {
        out.push(VBJet {
            y: ctx.gen.vector(k),
            fiber_vel: ctx.gen.matrix(k, p),
            ..first.clone()
        });
    }
    out
}

fn sample_dj_primary(ctx: &mut Ctx, count: usize) -> Vec<DoubleJet> {
    let (p, m) = (ctx.p(), ctx.m());
    let first = ctx.gen.double_jet(p, m);
    let mut out = vec![first.clone()];
    for _ in 1..count {
        out.push(DoubleJet {
            y_vel: ctx.gen.matrix(m, p),
            mixed: ctx.gen.tensor(m, p, p),
            ..first.clone()
        });
    }
    out
}

fn sample_dj_secondary(ctx: &mut Ctx, count: usize) -> Vec<DoubleJet> {
    let (p, m) = (ctx.p(), ctx.m());
    let first = ctx.gen.double_jet(p, m);
    let mut out = vec![first.clone()];
    for _ in 1..count {
        out.push(DoubleJet {
            x_vel: ctx.gen.matrix(m, p),
            mixed: ctx.gen.tensor(m, p, p),
            ..first.clone()
        });
    }
    out
}

fn vb_axioms_jet1(ctx: &mut Ctx) -> Result<Trial> {
    axioms(
        ctx,
        Structure {
            combine: bundle::jet1_combine,
            zero: bundle::jet1_zero,
            sample: sample_jet1,
        },
    )
}

fn vb_axioms_vb_primary(ctx: &mut Ctx) -> Result<Trial> {
    axioms(
        ctx,
        Structure {
            combine: bundle::vb_primary_combine,
            zero: bundle::vb_primary_zero,
            sample: sample_vb_primary,
        },
    )
}

fn vb_axioms_vb_secondary(ctx: &mut Ctx) -> Result<Trial> {
    axioms(
        ctx,
        Structure {
            combine: bundle::vb_secondary_combine,
            zero: bundle::vb_secondary_zero,
            sample: sample_vb_secondary,
        },
    )
}

fn vb_axioms_dj_primary(ctx: &mut Ctx) -> Result<Trial> {
    axioms(
        ctx,
        Structure {
            combine: bundle::dj_primary_combine,
            zero: bundle::dj_primary_zero,
            sample: sample_dj_primary,
        },
    )
}

fn vb_axioms_dj_secondary(ctx: &mut Ctx) -> Result<Trial> {
    axioms(
        ctx,
        Structure {
            combine: bundle::dj_secondary_combine,
            zero: bundle::dj_secondary_zero,
            sample: sample_dj_secondary,
        },
    )
}

fn bits_differ(a: &[f64], b: &[f64]) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(u, v)| u.to_bits() != v.to_bits())
}

fn mat_bits_differ(a: &Matrix, b: &Matrix) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(u, v)| bits_differ(u, v))
}

fn anchor_preservation(ctx: &mut Ctx) -> Result<Trial> {
    let lam = ctx.gen.value();
    let j = sample_jet1(ctx, 2);
    let vp = sample_vb_primary(ctx, 2);
    let vs = sample_vb_secondary(ctx, 2);
    let dp = sample_dj_primary(ctx, 2);
    let ds = sample_dj_secondary(ctx, 2);

    let r1 = bundle::jet1_combine(&j[0], &j[1], lam)?;
    let r2 = bundle::vb_primary_combine(&vp[0], &vp[1], lam)?;
    let r3 = bundle::vb_secondary_combine(&vs[0], &vs[1], lam)?;
    let r4 = bundle::dj_primary_combine(&dp[0], &dp[1], lam)?;
    let r5 = bundle::dj_secondary_combine(&ds[0], &ds[1], lam)?;
    let moved = [
        bits_differ(&r1.x, &j[0].x),
        bits_differ(&r2.x, &vp[0].x) || bits_differ(&r2.y, &vp[0].y),
        bits_differ(&r3.x, &vs[0].x) || mat_bits_differ(&r3.base_vel, &vs[0].base_vel),
        bits_differ(&r4.x, &dp[0].x) || mat_bits_differ(&r4.x_vel, &dp[0].x_vel),
        bits_differ(&r5.x, &ds[0].x) || mat_bits_differ(&r5.y_vel, &ds[0].y_vel),
    ];
    let residual = if moved.iter().any(|&m| m) { 1.0 } else { 0.0 };
    trial(
        residual,
        json!({
            "lambda": lam,
            "jet1": [enc(&j[0]), enc(&j[1])],
            "vb_primary": [enc(&vp[0]), enc(&vp[1])],
            "vb_secondary": [enc(&vs[0]), enc(&vs[1])],
            "dj_primary": [enc(&dp[0]), enc(&dp[1])],
            "dj_secondary": [enc(&ds[0]), enc(&ds[1])],
        }),
    )
}

fn secondary_projection(ctx: &mut Ctx) -> Result<Trial> {
    let lam = ctx.gen.value();
    let v = sample_vb_secondary(ctx, 2);
    let combined = bundle::vb_secondary_combine(&v[0], &v[1], lam)?;
    let residual = identical(&bundle::proj_secondary(&combined), &bundle::proj_secondary(&v[0]))?;
    trial(residual, json!({"a": enc(&v[0]), "b": enc(&v[1]), "lambda": lam}))
}

fn omega_hat_involution(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m, k) = vb_dims(ctx);
    let v = ctx.gen.vb_jet(p, m, k);
    let (x, y, f, g) = bundle::omega_hat(&v.x, &v.base_vel, &v.y, &v.fiber_vel)?;
    let (x2, f2, y2, g2) = bundle::omega_hat_inverse(&x, &y, &f, &g)?;
    let forward_ok = x == v.x && y == v.y && f == v.base_vel && g == v.fiber_vel;
    let back_ok = x2 == v.x && y2 == v.y && f2 == v.base_vel && g2 == v.fiber_vel;
    let residual = if forward_ok && back_ok { 0.0 } else { 1.0 };
    trial(residual, json!({"blocks": enc(&v)}))
}

fn xi_split_inverse(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m, k) = vb_dims(ctx);
    let h = ctx.gen.matrix(m + k, p);
    let (f, g) = bundle::xi_split(&h, m)?;
    let joined = bundle::xi_join(&f, &g)?;
    let (f2, g2) = bundle::xi_split(&joined, m)?;
    let residual = mat_dev(&joined, &h).max(mat_dev(&f, &f2)).max(mat_dev(&g, &g2));
    let exact = joined == h && f.len() == m && g.len() == k;
    trial(if exact { residual } else { residual.max(1.0) }, json!({"h": h, "m": m}))
}

fn product_split_inverse(ctx: &mut Ctx) -> Result<Trial> {
    let p = ctx.p();
    let hi = ctx.cfg().m_range.1.max(2);
    let m = ctx.gen.index(2, hi);
    let m1 = ctx.gen.index(1, m - 1);
    let j = ctx.gen.jet1(p, m);
    let (a, b) = bundle::product_split_sizes(&j, m1, m - m1)?;
    let joined = bundle::product_join(&a, &b)?;
    trial(identical(&joined, &j)?, json!({"jet1": enc(&j), "m1": m1}))
}

fn flip_involution(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let j = ctx.gen.jet2(p, m);
    let twice = (ctx.ops.flip_jet2)(&(ctx.ops.flip_jet2)(&j));
    trial(twice.deviation(&j)?, json!({"jet2": enc(&j)}))
}

fn ell_involution(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let v = ctx.gen.double_jet(p, m);
    let twice = (ctx.ops.ell)(&(ctx.ops.ell)(&v));
    trial(twice.deviation(&v)?, json!({"double_jet": enc(&v)}))
}

fn descent(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let j = ctx.gen.jet2(p, m);
    let lhs = (ctx.ops.lambda)(&(ctx.ops.flip_jet2)(&j));
    let rhs = (ctx.ops.ell)(&(ctx.ops.lambda)(&j));
    trial(lhs.deviation(&rhs)?, json!({"jet2": enc(&j)}))
}

fn quotient_invariance(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let j = ctx.gen.jet2(p, m);
    let mut perturbed = j.clone();
    for b in &mut perturbed.second {
        for (lo, hi) in [(0, p), (p, 2 * p)] {
            for r in lo..hi {
                for c in r..hi {
                    let d = ctx.gen.uniform(-10.0, 10.0);
                    b[r][c] += d;
                    if r != c {
                        b[c][r] += d;
                    }
                }
            }
        }
    }
    let residual = identical(&(ctx.ops.lambda)(&j), &(ctx.ops.lambda)(&perturbed))?;
    trial(residual, json!({"jet2": enc(&j), "perturbed": enc(&perturbed)}))
}

fn fiber_preservation(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let v = ctx.gen.double_jet(p, m);
    let lhs = bundle::dj_proj_secondary(&(ctx.ops.ell)(&v));
    let rhs = bundle::dj_proj_primary(&v);
    trial(identical(&lhs, &rhs)?, json!({"double_jet": enc(&v)}))
}

fn fiber_linearity(ctx: &mut Ctx) -> Result<Trial> {
    let lam = ctx.gen.value();
    let v = sample_dj_primary(ctx, 2);
    let ell = ctx.ops.ell;
    let lhs = ell(&bundle::dj_primary_combine(&v[0], &v[1], lam)?);
    let rhs = bundle::dj_secondary_combine(&ell(&v[0]), &ell(&v[1]), lam)?;
    trial(
        lhs.deviation(&rhs)?,
        json!({"a": enc(&v[0]), "b": enc(&v[1]), "lambda": lam}),
    )
}

fn functoriality(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let mid = ctx.m();
    let out = ctx.m();
    let mut j = ctx.gen.jet1(p, m);
    for x in &mut j.x {
        *x = ctx.gen.uniform(0.5, 1.5);
    }
    let h = ctx.gen.map_at(m, mid, VarScheme::Plain, true, &j.x);
    let hx = h.eval(&j.x)?;
    let g = ctx.gen.map_at(mid, out, VarScheme::Plain, true, &hx);
    let lhs = prolong1(&g.compose(&h)?, &j)?;
    let rhs = prolong1(&g, &prolong1(&h, &j)?)?;
    trial(
        lhs.deviation(&rhs)?,
        json!({"jet1": enc(&j), "h": h.to_string(), "g": g.to_string()}),
    )
}

fn inverse_prolongation(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let mut j = ctx.gen.jet1(p, m);
    for x in &mut j.x {
        *x = ctx.gen.uniform(0.5, 1.5);
    }
    let h = SmoothMap::componentwise(m, Func::Exp);
    let h_inv = SmoothMap::componentwise(m, Func::Log);
    let round_trip = prolong1(&h_inv, &prolong1(&h, &j)?)?;
    let composed = prolong1(&h_inv.compose(&h)?, &j)?;
    let residual = round_trip.deviation(&j)?.max(composed.deviation(&j)?);
    trial(residual, json!({"jet1": enc(&j), "h": h.to_string(), "h_inv": h_inv.to_string()}))
}

fn naturality_ell(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let n = ctx.m();
    let v = ctx.gen.double_jet(p, m);
    let transcendental = ctx.gen.rng.gen_bool(0.5);
    let h = ctx.gen.map_at(m, n, VarScheme::Plain, transcendental, &v.x);
    let ell = ctx.ops.ell;
    let lhs = prolong_double(&h, &ell(&v))?;
    let rhs = ell(&prolong_double(&h, &v)?);
    trial(
        lhs.deviation(&rhs)?,
        json!({"double_jet": enc(&v), "h": h.to_string()}),
    )
}

fn flip_partials(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let phi = ctx.gen.split_map(p, m);
    let lhs = jet2_of(&phi.flip_halves()?)?;
    let rhs = (ctx.ops.flip_jet2)(&jet2_of(&phi)?);
    trial(lhs.deviation(&rhs)?, json!({"map": phi.to_string(), "p": p}))
}

fn chainrule_lambda(ctx: &mut Ctx) -> Result<Trial> {
    let (p, m) = (ctx.p(), ctx.m());
    let n = ctx.m();
    let j: Jet2 = ctx.gen.jet2(p, m);
    let h = ctx.gen.map_at(m, n, VarScheme::Plain, true, &j.x);
    let lambda = ctx.ops.lambda;
    let lhs = lambda(&prolong2(&h, &j)?);
    let rhs = prolong_double(&h, &lambda(&j))?;
    trial(lhs.deviation(&rhs)?, json!({"jet2": enc(&j), "h": h.to_string()}))
}
