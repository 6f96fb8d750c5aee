//! Random inputs for the law suite.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::SuiteConfig;
use crate::expr::{Expr, Func, SmoothMap, VarScheme};
use crate::jet::{DoubleJet, Jet1, Jet2, Matrix, Tensor3, VBJet};
use crate::taylor::second_order;

/// Generated maps are kept only if value, Jacobian and Hessian at the
/// probe point stay below this bound.
const MAGNITUDE_CAP: f64 = 10.0;
const MAX_DEPTH: usize = 4;
const MAX_ATTEMPTS: usize = 200;

pub struct Gen<'a> {
    pub rng: ChaCha8Rng,
    pub cfg: &'a SuiteConfig,
}

impl Gen<'_> {
    pub fn value(&mut self) -> f64 {
        let (lo, hi) = self.cfg.value_range;
        self.rng.gen_range(lo..=hi)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn p(&mut self) -> usize {
        let (lo, hi) = self.cfg.p_range;
        self.index(lo, hi)
    }

    pub fn m(&mut self) -> usize {
        let (lo, hi) = self.cfg.m_range;
        self.index(lo, hi)
    }

    pub fn k(&mut self) -> usize {
        let (lo, hi) = self.cfg.k_range;
        self.index(lo, hi)
    }

    pub fn vector(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.value()).collect()
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        (0..rows).map(|_| self.vector(cols)).collect()
    }

    pub fn tensor(&mut self, d0: usize, d1: usize, d2: usize) -> Tensor3 {
        (0..d0).map(|_| self.matrix(d1, d2)).collect()
    }

    pub fn symmetric(&mut self, n: usize) -> Matrix {
        let mut b = vec![vec![0.0; n]; n];
        for r in 0..n {
            for c in r..n {
                let v = self.value();
                b[r][c] = v;
                b[c][r] = v;
            }
        }
        b
    }

    pub fn jet1(&mut self, p: usize, m: usize) -> Jet1 {
        Jet1 {
            p,
            m,
            x: self.vector(m),
            velocity: self.matrix(m, p),
        }
    }

    pub fn jet2(&mut self, p: usize, m: usize) -> Jet2 {
        Jet2 {
            p,
            m,
            x: self.vector(m),
            first: self.matrix(m, 2 * p),
            second: (0..m).map(|_| self.symmetric(2 * p)).collect(),
        }
    }

    pub fn double_jet(&mut self, p: usize, m: usize) -> DoubleJet {
        DoubleJet {
            p,
            m,
            x: self.vector(m),
            x_vel: self.matrix(m, p),
            y_vel: self.matrix(m, p),
            mixed: self.tensor(m, p, p),
        }
    }

    pub fn vb_jet(&mut self, p: usize, m: usize, k: usize) -> VBJet {
        VBJet {
            p,
            m,
            k,
            x: self.vector(m),
            y: self.vector(k),
            base_vel: self.matrix(m, p),
            fiber_vel: self.matrix(k, p),
        }
    }

    fn constant(&mut self) -> Expr {
        // one decimal place keeps generated sources short and exact to print
        Expr::Const((self.value() * 10.0).round() / 10.0)
    }

    fn leaf(&mut self, n: usize) -> Expr {
        if self.rng.gen_bool(0.75) {
            Expr::Var(self.index(0, n - 1))
        } else {
            self.constant()
        }
    }

    /// Random expression of depth at most `depth`. `log`, `sqrt` and `/`
    /// only appear with arguments of the form `c + e^2`, `c ≥ 0.5`, so the
    /// map and its derivatives are defined everywhere.
    pub fn expr(&mut self, n: usize, depth: usize, transcendental: bool) -> Expr {
        if depth <= 1 || self.rng.gen_bool(0.2) {
            return self.leaf(n);
        }
        let shifted_square = |g: &mut Self, e: Expr| {
            let c = g.uniform(0.5, 2.0);
            Expr::add(Expr::Const((c * 10.0).round() / 10.0), Expr::pow(e, 2.0))
        };
        let choices = if transcendental { 11 } else { 5 };
        match self.index(0, choices - 1) {
            0 => Expr::add(self.expr(n, depth - 1, transcendental), self.expr(n, depth - 1, transcendental)),
            1 => Expr::sub(self.expr(n, depth - 1, transcendental), self.expr(n, depth - 1, transcendental)),
            2 => Expr::mul(self.expr(n, depth - 1, transcendental), self.expr(n, depth - 1, transcendental)),
            3 => Expr::pow(self.expr(n, depth - 1, transcendental), self.index(2, 3) as f64),
            4 => Expr::neg(self.expr(n, depth - 1, transcendental)),
            5 => Expr::call(Func::Sin, self.expr(n, depth - 1, transcendental)),
            6 => Expr::call(Func::Cos, self.expr(n, depth - 1, transcendental)),
            7 => Expr::call(Func::Tanh, self.expr(n, depth - 1, transcendental)),
            8 => Expr::call(Func::Exp, self.expr(n, depth - 1, transcendental)),
            9 => {
                let f = if self.rng.gen_bool(0.5) { Func::Log } else { Func::Sqrt };
                let inner = self.expr(n, depth - 2, transcendental);
                Expr::call(f, shifted_square(self, inner))
            }
            _ => {
                let num = self.expr(n, depth - 1, transcendental);
                let inner = self.expr(n, depth - 2, transcendental);
                Expr::div(num, shifted_square(self, inner))
            }
        }
    }

    /// A random map ℝⁿ → ℝᵐ that is well conditioned at `point`.
    pub fn map_at(
        &mut self,
        n: usize,
        m: usize,
        scheme: VarScheme,
        transcendental: bool,
        point: &[f64],
    ) -> SmoothMap {
        for _ in 0..MAX_ATTEMPTS {
            let components = (0..m).map(|_| self.expr(n, MAX_DEPTH, transcendental)).collect();
            let map = SmoothMap::from_components(n, scheme, components)
                .expect("generated slots lie inside the domain");
            if is_tame(&map, point) {
                return map;
            }
        }
        // affine fallback, always tame for unit coefficients
        let components = (0..m)
            .map(|i| Expr::add(Expr::Var(i % n), Expr::Const(0.5)))
            .collect();
        SmoothMap::from_components(n, scheme, components).expect("affine map is well-formed")
    }

    /// Random map on ℝᵖ × ℝᵖ, well conditioned at the origin.
    pub fn split_map(&mut self, p: usize, m: usize) -> SmoothMap {
        let transcendental = self.rng.gen_bool(0.75);
        self.map_at(2 * p, m, VarScheme::Split { p }, transcendental, &vec![0.0; 2 * p])
    }
}

fn is_tame(map: &SmoothMap, point: &[f64]) -> bool {
    match second_order(map, point) {
        Ok(d) => d
            .value
            .iter()
            .chain(d.jac.iter().flatten())
            .chain(d.hess.iter().flatten().flatten())
            .all(|v| v.abs() <= MAGNITUDE_CAP),
        Err(_) => false,
    }
}
