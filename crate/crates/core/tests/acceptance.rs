//! Acceptance gate. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use jetcalc::canon::{ell, flip_jet2, lambda};
use jetcalc::jet::{doublejet_of, jet2_of, Coordinates, DoubleJet};
use jetcalc::props::{run_suite, run_suite_with, LawReport, Ops, SuiteConfig};
use jetcalc::taylor::fd_second_order;
use jetcalc::SmoothMap;

const SEED: u64 = 42;
const TRIALS: usize = 100;

struct Outcome {
    passed: bool,
    detail: String,
}

fn config() -> SuiteConfig {
    SuiteConfig {
        seed: SEED,
        trials: TRIALS,
        tol_exact: 1e-12,
        tol_transcendental: 1e-10,
        tol_fd: 1e-6,
        fd_step: 1e-4,
        p_range: (1, 3),
        m_range: (1, 4),
        k_range: (1, 3),
        value_range: (-2.0, 2.0),
    }
}

/// Runs the named laws and checks each residual against `limit`, which is
/// pinned here independently of the suite's own tolerances.
fn laws(reports: &[LawReport], limits: &[(&str, f64)]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(name, limit) in limits {
        let Some(r) = reports.iter().find(|r| r.law == name) else {
            passed = false;
            parts.push(format!("{name}: missing"));
            continue;
        };
        let ok = r.passed && r.max_residual <= limit && r.trials >= TRIALS;
        passed &= ok;
        parts.push(format!(
            "{name}: {} trials, max residual {:.3e} (limit {limit:.0e}){}",
            r.trials,
            r.max_residual,
            if ok { "" } else { " FAILED" }
        ));
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn worked_fixture() -> Outcome {
    let phi = SmoothMap::parse_split("u1*w1; u1 + w1^2", 1, 2).unwrap();

    // Independent oracle: central differences at the origin (slots u1, w1).
    let fd = fd_second_order(&phi, &[0.0, 0.0], 1e-4).unwrap();
    let fd_v = DoubleJet::new(
        fd.value.clone(),
        fd.jac.iter().map(|r| vec![r[1]]).collect(),
        fd.jac.iter().map(|r| vec![r[0]]).collect(),
        fd.hess.iter().map(|h| vec![vec![h[0][1]]]).collect(),
    )
    .unwrap();
    // Values frozen from the oracle (agrees to 1e-6 below).
    let expected = DoubleJet::new(
        vec![0.0, 0.0],
        vec![vec![0.0], vec![0.0]],
        vec![vec![0.0], vec![1.0]],
        vec![vec![vec![1.0]], vec![vec![0.0]]],
    )
    .unwrap();
    let expected_ell = DoubleJet::new(
        vec![0.0, 0.0],
        vec![vec![0.0], vec![1.0]],
        vec![vec![0.0], vec![0.0]],
        vec![vec![vec![1.0]], vec![vec![0.0]]],
    )
    .unwrap();

    let v = doublejet_of(&phi).unwrap();
    let by_formula = ell(&v);
    let by_representative = doublejet_of(&phi.flip_halves().unwrap()).unwrap();
    let r_oracle = fd_v.deviation(&expected).unwrap();
    let r_v = v.deviation(&expected).unwrap();
    let r_formula = by_formula.deviation(&expected_ell).unwrap();
    let r_rep = by_representative.deviation(&expected_ell).unwrap();
    let passed = r_oracle <= 1e-6 && r_v <= 1e-12 && r_formula <= 1e-12 && r_rep <= 1e-12;
    Outcome {
        passed,
        detail: format!(
            "oracle vs frozen {r_oracle:.3e} (limit 1e-6); doublejet {r_v:.3e}; \
             ell by formula {r_formula:.3e}; ell by representative {r_rep:.3e} (limit 1e-12)"
        ),
    }
}

fn no_transpose(v: &DoubleJet) -> DoubleJet {
    DoubleJet {
        x_vel: v.y_vel.clone(),
        y_vel: v.x_vel.clone(),
        ..v.clone()
    }
}

fn mutation() -> Outcome {
    let ops = Ops {
        ell: no_transpose,
        ..Ops::default()
    };
    let reports = run_suite_with(&config(), Some(&["descent".to_string()]), &ops).unwrap();
    let r = &reports[0];
    let cx = r.counterexample.as_ref();
    let asymmetric = cx
        .and_then(|c| serde_json::from_value::<jetcalc::Jet2>(c.inputs["jet2"].clone()).ok())
        .map(|j| {
            let c = lambda(&j).mixed;
            c.iter().any(|m| {
                (0..j.p).any(|a| (0..j.p).any(|b| m[a][b] != m[b][a]))
            })
        })
        .unwrap_or(false);
    // sanity: the correct implementation agrees on the same counterexample
    let sane = cx
        .and_then(|c| serde_json::from_value::<jetcalc::Jet2>(c.inputs["jet2"].clone()).ok())
        .map(|j| lambda(&flip_jet2(&j)).deviation(&ell(&lambda(&j))).unwrap() <= 1e-12)
        .unwrap_or(false);
    Outcome {
        passed: !r.passed && cx.is_some_and(|c| c.seed == SEED) && asymmetric && sane,
        detail: match cx {
            Some(c) => format!(
                "descent fails at trial {} with residual {:.3e}; counterexample has asymmetric C",
                c.trial, c.residual
            ),
            None => "descent passed with the transpose removed".into(),
        },
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = run_suite(&config(), None).expect("suite runs");

    // Jet equality sees second order: sin(u) agrees with u - u³/6 to order
    // two, while u + u² does not.
    let a = jet2_of(&SmoothMap::parse_split("sin(u1) + w1", 1, 1).unwrap()).unwrap();
    let b = jet2_of(&SmoothMap::parse_split("u1 + w1 - u1^3/6", 1, 1).unwrap()).unwrap();
    let c = jet2_of(&SmoothMap::parse_split("u1 + w1 + u1^2", 1, 1).unwrap()).unwrap();
    let equivalence_ok = a.approx_eq(&b, 1e-9).unwrap() && !a.approx_eq(&c, 1e-9).unwrap();

    let mut criteria: Vec<(&str, Outcome)> = vec![
        (
            "1 involution laws",
            laws(&reports, &[("flip_involution", 1e-15), ("ell_involution", 1e-15)]),
        ),
        ("2 descent square", laws(&reports, &[("descent", 1e-12)])),
        ("3 quotient invariance", laws(&reports, &[("quotient_invariance", 0.0)])),
        (
            "4 fiber preservation and linearity",
            laws(&reports, &[("fiber_preservation", 0.0), ("fiber_linearity", 1e-12)]),
        ),
        (
            "5 vector bundle axioms",
            laws(
                &reports,
                &[
                    ("vb_axioms_jet1", 1e-12),
                    ("vb_axioms_vb_primary", 1e-12),
                    ("vb_axioms_vb_secondary", 1e-12),
                    ("vb_axioms_dj_primary", 1e-12),
                    ("vb_axioms_dj_secondary", 1e-12),
                ],
            ),
        ),
        (
            "6 functoriality",
            laws(&reports, &[("functoriality", 1e-10), ("inverse_prolongation", 1e-10)]),
        ),
        ("7 naturality of ell", laws(&reports, &[("naturality_ell", 1e-10)])),
        ("8 derivative engine", {
            let mut o = laws(
                &reports,
                &[("ad_vs_fd", 1e-6), ("hessian_symmetry", 1e-12), ("jet2_roundtrip", 1e-12)],
            );
            o.passed &= equivalence_ok;
            o
        }),
        ("9 flip partial identities", laws(&reports, &[("flip_partials", 1e-12)])),
        ("10 worked fixture", worked_fixture()),
        ("11 mutation sensitivity", mutation()),
    ];

    let all_laws_pass = reports.iter().all(|r| r.passed);
    let failing: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.law.as_str()).collect();
    criteria.push((
        "full suite (seed 42, 100 trials)",
        Outcome {
            passed: all_laws_pass,
            detail: if failing.is_empty() {
                format!("{} laws pass", reports.len())
            } else {
                format!("failing: {}", failing.join(", "))
            },
        },
    ));

    let mut ok = true;
    for (name, outcome) in &criteria {
        ok &= outcome.passed;
        println!(
            "[{}] {name}: {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("acceptance finished in {:.2}s", start.elapsed().as_secs_f64());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
