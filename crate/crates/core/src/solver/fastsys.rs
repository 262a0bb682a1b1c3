//! Compiled f64 evaluators for a polynomial system and its Jacobian, used in
//! the multistart and continuation hot paths.

use crate::polysys::{PolySystem, SystemKind};

const MAX_VARS: usize = 9;

#[derive(Clone, Debug)]
struct FastPoly {
    terms: Vec<(f64, [u8; MAX_VARS])>,
    max_deg: [u8; MAX_VARS],
}

impl FastPoly {
    fn compile(p: &crate::polysys::poly::Polynomial) -> Self {
        assert!(p.arity as usize <= MAX_VARS);
        let mut terms = Vec::with_capacity(p.num_terms());
        let mut max_deg = [0u8; MAX_VARS];
        for (m, c) in p.terms() {
            let mut exps = [0u8; MAX_VARS];
            for &(v, e) in m.powers() {
                exps[v as usize] = e as u8;
                max_deg[v as usize] = max_deg[v as usize].max(e as u8);
            }
            terms.push((crate::polysys::poly::rational_to_f64(c), exps));
        }
        FastPoly { terms, max_deg }
    }

    #[inline]
    fn eval(&self, pows: &[[f64; 16]; MAX_VARS]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t *= pows[v][e as usize];
                }
            }
            acc += t;
        }
        acc
    }
}

/// A compiled square system F: ℝⁿ → ℝⁿ with its Jacobian.
pub struct FastSystem {
    n: usize,
    kind: SystemKind,
    eqs: Vec<FastPoly>,
    jac: Vec<FastPoly>,
    max_deg: [u8; MAX_VARS],
}

impl FastSystem {
    pub fn compile(sys: &PolySystem) -> Self {
        assert!(sys.mass_var.is_none(), "substitute the mass before compiling");
        let n = sys.n_coords;
        let eqs: Vec<FastPoly> = sys.equations.iter().map(FastPoly::compile).collect();
        let mut jac = Vec::with_capacity(n * n);
        for e in &sys.equations {
            for v in 0..n as u32 {
                jac.push(FastPoly::compile(&e.diff(v)));
            }
        }
        let mut max_deg = [0u8; MAX_VARS];
        for p in eqs.iter().chain(jac.iter()) {
            for v in 0..MAX_VARS {
                max_deg[v] = max_deg[v].max(p.max_deg[v]);
            }
        }
        FastSystem { n, kind: sys.kind, eqs, jac, max_deg }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Indices of the distance coordinates (positivity-constrained).
    pub fn coord_range(&self) -> std::ops::Range<usize> {
        match self.kind {
            SystemKind::Dziobek => 2..8,
            SystemKind::Ac => 0..6,
        }
    }

    #[inline]
    fn pow_table(&self, x: &[f64]) -> [[f64; 16]; MAX_VARS] {
        let mut pows = [[1.0f64; 16]; MAX_VARS];
        for v in 0..self.n {
            let d = self.max_deg[v] as usize;
            let mut acc = 1.0;
            for e in 1..=d {
                acc *= x[v];
                pows[v][e] = acc;
            }
        }
        pows
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        let pows = self.pow_table(x);
        for (i, e) in self.eqs.iter().enumerate() {
            out[i] = e.eval(&pows);
        }
    }

    /// Row-major n×n Jacobian.
    pub fn jacobian(&self, x: &[f64], out: &mut [f64]) {
        let pows = self.pow_table(x);
        for (k, p) in self.jac.iter().enumerate() {
            out[k] = p.eval(&pows);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::{build_ac, MassParams};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn fast_matches_exact_evaluation() {
        let q1 = BigRational::new(BigInt::from(1), BigInt::from(1));
        let masses = MassParams::three_equal(q1.clone()).unwrap();
        let sys = build_ac(&masses).at_mass(&q1);
        let fast = FastSystem::compile(&sys);
        let x = [1.1, 0.9, 0.8, 1.05, 0.75, 0.95];
        let mut out = [0.0; 6];
        fast.eval(&x, &mut out);
        for (i, e) in sys.equations.iter().enumerate() {
            let exact = e.eval_f64(&x);
            assert!(
                (out[i] - exact).abs() <= 1e-9 * exact.abs().max(1.0),
                "eq {i}: {} vs {}",
                out[i],
                exact
            );
        }
    }
}
