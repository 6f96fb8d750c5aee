//! J¹(J¹M) seen as J¹E for the bundle E = J¹M → M with fiber ℝ^(m·p).
//! Under this embedding both double-jet structures coincide with the
//! corresponding section-jet structures.

use jetcalc::bundle::{
    dj_primary_combine, dj_primary_zero, dj_proj_primary, dj_proj_secondary, dj_secondary_combine,
    dj_secondary_zero, proj_primary, proj_secondary, vb_primary_combine, vb_primary_zero,
    vb_secondary_combine, vb_secondary_zero,
};
use jetcalc::{DoubleJet, VBJet};
use proptest::prelude::*;

/// y = vec(X) row-major, F = Y, G[(j, β)][α] = C[j][α][β].
fn embed(v: &DoubleJet) -> VBJet {
    let (p, m) = (v.p, v.m);
    let y = v.x_vel.iter().flatten().copied().collect();
    let g = (0..m * p)
        .map(|row| {
            let (j, beta) = (row / p, row % p);
            (0..p).map(|alpha| v.mixed[j][alpha][beta]).collect()
        })
        .collect();
    VBJet::new(v.x.clone(), y, v.y_vel.clone(), g).unwrap()
}

fn unembed(w: &VBJet, p: usize) -> DoubleJet {
    let m = w.m;
    let x_vel = w.y.chunks(p).map(<[f64]>::to_vec).collect();
    let mixed = (0..m)
        .map(|j| {
            (0..p)
                .map(|alpha| (0..p).map(|beta| w.fiber_vel[j * p + beta][alpha]).collect())
                .collect()
        })
        .collect();
    DoubleJet::new(w.x.clone(), x_vel, w.base_vel.clone(), mixed).unwrap()
}

fn double_jet() -> impl Strategy<Value = DoubleJet> {
    (1..=3_usize, 1..=3_usize).prop_flat_map(|(p, m)| double_jet_of_dims(p, m))
}

/// Two double jets sharing the anchor of one structure, and a scalar.
fn pair(primary: bool) -> impl Strategy<Value = (DoubleJet, DoubleJet, f64)> {
    (double_jet(), -2.0..2.0_f64).prop_flat_map(move |(a, l)| {
        let (p, m) = (a.p, a.m);
        double_jet_of_dims(p, m).prop_map(move |mut b| {
            b.x = a.x.clone();
            if primary {
                b.x_vel = a.x_vel.clone();
            } else {
                b.y_vel = a.y_vel.clone();
            }
            (a.clone(), b, l)
        })
    })
}

fn double_jet_of_dims(p: usize, m: usize) -> impl Strategy<Value = DoubleJet> {
    let v = move || prop::collection::vec(-2.0..2.0_f64, p);
    (
        prop::collection::vec(-2.0..2.0_f64, m),
        prop::collection::vec(v(), m),
        prop::collection::vec(v(), m),
        prop::collection::vec(prop::collection::vec(v(), p), m),
    )
        .prop_map(|(x, xv, yv, c)| DoubleJet::new(x, xv, yv, c).unwrap())
}

proptest! {
    #[test]
    fn embedding_is_invertible(v in double_jet()) {
        prop_assert_eq!(unembed(&embed(&v), v.p), v);
    }

    #[test]
    fn primary_structures_agree((a, b, l) in pair(true)) {
        let direct = dj_primary_combine(&a, &b, l).unwrap();
        let via = vb_primary_combine(&embed(&a), &embed(&b), l).unwrap();
        prop_assert_eq!(embed(&direct), via);
        prop_assert_eq!(embed(&dj_primary_zero(&a)), vb_primary_zero(&embed(&a)));
        let anchor = dj_proj_primary(&a);
        let flat: Vec<f64> = anchor.velocity.iter().flatten().copied().collect();
        prop_assert_eq!(proj_primary(&embed(&a)), (anchor.x, flat));
    }

    #[test]
    fn secondary_structures_agree((a, b, l) in pair(false)) {
        let direct = dj_secondary_combine(&a, &b, l).unwrap();
        let via = vb_secondary_combine(&embed(&a), &embed(&b), l).unwrap();
        prop_assert_eq!(embed(&direct), via);
        prop_assert_eq!(embed(&dj_secondary_zero(&a)), vb_secondary_zero(&embed(&a)));
        prop_assert_eq!(proj_secondary(&embed(&a)), dj_proj_secondary(&a));
    }
}
