//! Randomized law checking.
//!
//! Every registered law draws fresh random inputs per trial, computes a
//! residual (the largest componentwise deviation between the two sides of
//! the law) and compares it against the law's tolerance. Trials run in
//! parallel; each trial's generator is seeded from the suite seed, the law
//! name and the trial index, so reports are identical for a fixed seed no
//! matter how trials are scheduled or which laws are selected.

mod gen;
mod laws;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon;
use crate::error::{Error, Result};
use crate::jet::{DoubleJet, Jet2};

pub use gen::Gen;

/// Parameters of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub tol_exact: f64,
    pub tol_transcendental: f64,
    pub tol_fd: f64,
    pub fd_step: f64,
    pub p_range: (usize, usize),
    pub m_range: (usize, usize),
    pub k_range: (usize, usize),
    pub value_range: (f64, f64),
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 100,
            tol_exact: 1e-12,
            tol_transcendental: 1e-10,
            tol_fd: crate::taylor::DEFAULT_FD_TOL,
            fd_step: crate::taylor::DEFAULT_FD_STEP,
            p_range: (1, 3),
            m_range: (1, 4),
            k_range: (1, 3),
            value_range: (-2.0, 2.0),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invalid(format!("suite config: {what}")));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        for (name, t) in [
            ("tol_exact", self.tol_exact),
            ("tol_transcendental", self.tol_transcendental),
            ("tol_fd", self.tol_fd),
            ("fd_step", self.fd_step),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        for (name, (lo, hi)) in [("p", self.p_range), ("m", self.m_range), ("k", self.k_range)] {
            if lo == 0 || lo > hi {
                return bad(&format!("{name} range must be a nonempty range of positive integers"));
            }
        }
        let (lo, hi) = self.value_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad("value range must be a nonempty finite interval");
        }
        Ok(())
    }
}

/// Implementations the laws are checked against. The shipped runner always
/// uses [`Ops::default`]; tests substitute sabotaged versions to confirm
/// that the laws detect them.
#[derive(Clone, Copy)]
pub struct Ops {
    pub flip_jet2: fn(&Jet2) -> Jet2,
    pub lambda: fn(&Jet2) -> DoubleJet,
    pub ell: fn(&DoubleJet) -> DoubleJet,
}

impl Default for Ops {
    fn default() -> Self {
        Ops {
            flip_jet2: canon::flip_jet2,
            lambda: canon::lambda,
            ell: canon::ell,
        }
    }
}

/// A reproducible failing trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub trial: usize,
    /// Residual of the failing trial; `null` in JSON when the trial errored.
    pub residual: f64,
    pub error: Option<String>,
    /// Inputs, with jets in their JSON encodings and maps as DSL source.
    pub inputs: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: u64,
    pub counterexample: Option<Counterexample>,
}

/// One evaluation of a law.
pub struct Trial {
    pub residual: f64,
    pub inputs: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tol {
    /// The two sides must agree bit for bit.
    Zero,
    /// Permutation-only identities.
    Representation,
    Exact,
    Transcendental,
    Fd,
}

const REPRESENTATION_TOL: f64 = 1e-15;

impl Tol {
    fn value(self, cfg: &SuiteConfig) -> f64 {
        match self {
            Tol::Zero => 0.0,
            Tol::Representation => REPRESENTATION_TOL,
            Tol::Exact => cfg.tol_exact,
            Tol::Transcendental => cfg.tol_transcendental,
            Tol::Fd => cfg.tol_fd,
        }
    }
}

pub(crate) struct Ctx<'a> {
    pub gen: Gen<'a>,
    pub ops: &'a Ops,
    /// Fixed (p, m) for laws swept over every dimension combination.
    pub dims: Option<(usize, usize)>,
}

impl Ctx<'_> {
    pub fn cfg(&self) -> &SuiteConfig {
        self.gen.cfg
    }

    pub fn p(&mut self) -> usize {
        match self.dims {
            Some((p, _)) => p,
            None => self.gen.p(),
        }
    }

    pub fn m(&mut self) -> usize {
        match self.dims {
            Some((_, m)) => m,
            None => self.gen.m(),
        }
    }
}

type LawFn = fn(&mut Ctx) -> Result<Trial>;

struct Law {
    name: &'static str,
    tol: Tol,
    sweep_dims: bool,
    run: LawFn,
}

/// Names of all registered laws, in report order.
pub fn law_names() -> Vec<&'static str> {
    laws::REGISTRY.iter().map(|l| l.name).collect()
}

/// Runs the selected laws (all when `law_filter` is `None`).
pub fn run_suite(config: &SuiteConfig, law_filter: Option<&[String]>) -> Result<Vec<LawReport>> {
    run_suite_with(config, law_filter, &Ops::default())
}

pub fn run_suite_with(
    config: &SuiteConfig,
    law_filter: Option<&[String]>,
    ops: &Ops,
) -> Result<Vec<LawReport>> {
    config.validate()?;
    let selected: Vec<&Law> = match law_filter {
        None => laws::REGISTRY.iter().collect(),
        Some(names) => {
            if let Some(unknown) = names
                .iter()
                .find(|n| !laws::REGISTRY.iter().any(|l| l.name == n.as_str()))
            {
                return Err(Error::UnknownLaw(unknown.clone()));
            }
            laws::REGISTRY
                .iter()
                .filter(|l| names.iter().any(|n| n == l.name))
                .collect()
        }
    };
    Ok(selected.into_iter().map(|law| run_law(config, law, ops)).collect())
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn trial_rng(seed: u64, law: &str, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(law));
    rng.set_stream(trial as u64);
    rng
}

fn run_law(cfg: &SuiteConfig, law: &Law, ops: &Ops) -> LawReport {
    let combos: Vec<Option<(usize, usize)>> = if law.sweep_dims {
        (cfg.p_range.0..=cfg.p_range.1)
            .flat_map(|p| (cfg.m_range.0..=cfg.m_range.1).map(move |m| Some((p, m))))
            .collect()
    } else {
        vec![None]
    };
    let total = combos.len() * cfg.trials;
    let tolerance = law.tol.value(cfg);
    let outcomes: Vec<(usize, Result<Trial>)> = (0..total)
        .into_par_iter()
        .map(|t| {
            let mut ctx = Ctx {
                gen: Gen {
                    rng: trial_rng(cfg.seed, law.name, t),
                    cfg,
                },
                ops,
                dims: combos[t / cfg.trials],
            };
            (t, (law.run)(&mut ctx))
        })
        .collect();

    let mut max_residual: f64 = 0.0;
    let mut counterexample = None;
    for (trial, outcome) in outcomes {
        let (residual, error, inputs) = match outcome {
            Ok(t) => (t.residual, None, t.inputs),
            Err(e) => (f64::INFINITY, Some(e.to_string()), serde_json::Value::Null),
        };
        let failed = error.is_some() || residual.is_nan() || residual > tolerance;
        if residual.is_nan() {
            max_residual = f64::NAN;
        } else if !max_residual.is_nan() {
            max_residual = max_residual.max(residual);
        }
        if failed && counterexample.is_none() {
            counterexample = Some(Counterexample {
                seed: cfg.seed,
                trial,
                residual,
                error,
                inputs,
            });
        }
    }
    LawReport {
        law: law.name.to_string(),
        trials: total,
        max_residual,
        tolerance,
        passed: counterexample.is_none(),
        seed: cfg.seed,
        counterexample,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> SuiteConfig {
        SuiteConfig {
            trials,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn registry_has_the_required_laws() {
        let names = law_names();
        for required in [
            "hessian_symmetry",
            "ad_vs_fd",
            "jet2_roundtrip",
            "vb_axioms_jet1",
            "vb_axioms_vb_primary",
            "vb_axioms_vb_secondary",
            "vb_axioms_dj_primary",
            "vb_axioms_dj_secondary",
            "anchor_preservation",
            "omega_hat_involution",
            "xi_split_inverse",
            "product_split_inverse",
            "flip_involution",
            "ell_involution",
            "descent",
            "quotient_invariance",
            "fiber_preservation",
            "fiber_linearity",
            "functoriality",
            "inverse_prolongation",
            "naturality_ell",
            "flip_partials",
            "chainrule_lambda",
        ] {
            assert!(names.contains(&required), "missing {required}");
        }
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn single_law_filter() {
        let reports = run_suite(&quick(1), Some(&["ell_involution".to_string()])).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].passed);
        assert!(reports[0].max_residual <= 1e-15);
    }

    #[test]
    fn unknown_law_is_an_error() {
        let err = run_suite(&quick(1), Some(&["nosuchlaw".to_string()])).unwrap_err();
        assert_eq!(err, Error::UnknownLaw("nosuchlaw".into()));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for cfg in [
            SuiteConfig { trials: 0, ..quick(1) },
            SuiteConfig { tol_exact: 0.0, ..quick(1) },
            SuiteConfig { p_range: (2, 1), ..quick(1) },
            SuiteConfig { m_range: (0, 1), ..quick(1) },
            SuiteConfig { value_range: (1.0, 1.0), ..quick(1) },
        ] {
            assert!(matches!(run_suite(&cfg, None), Err(Error::Invalid(_))));
        }
    }

    #[test]
    fn same_seed_same_report() {
        let names: Vec<String> = ["ad_vs_fd", "functoriality", "descent"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let a = run_suite(&quick(8), Some(&names)).unwrap();
        let b = run_suite(&quick(8), Some(&names)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        // selection does not perturb a law's inputs
        let alone = run_suite(&quick(8), Some(&names[1..2])).unwrap();
        let in_full = a.iter().find(|r| r.law == "functoriality").unwrap();
        assert_eq!(&alone[0], in_full);
    }

    #[test]
    fn sweep_laws_cover_every_dimension_pair() {
        let reports = run_suite(&quick(2), Some(&["flip_involution".to_string()])).unwrap();
        assert_eq!(reports[0].trials, 2 * 3 * 4);
    }

    #[test]
    fn sabotaged_ell_breaks_descent() {
        fn no_transpose(v: &DoubleJet) -> DoubleJet {
            DoubleJet {
                x_vel: v.y_vel.clone(),
                y_vel: v.x_vel.clone(),
                ..v.clone()
            }
        }
        let ops = Ops {
            ell: no_transpose,
            ..Ops::default()
        };
        let reports = run_suite_with(&quick(100), Some(&["descent".to_string()]), &ops).unwrap();
        let r = &reports[0];
        assert!(!r.passed);
        let cx = r.counterexample.as_ref().unwrap();
        assert_eq!(cx.seed, 42);
        let jet: Jet2 = serde_json::from_value(cx.inputs["jet2"].clone()).unwrap();
        assert!(jet.p >= 2);
    }
}
