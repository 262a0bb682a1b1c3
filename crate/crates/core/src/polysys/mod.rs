//! Construction of the central-configuration equation systems as exact
//! polynomials: the Dziobek equations (8 equations in λ₀, μ and the six
//! mutual distances) and the Albouy-Chenciner equations (6 equations in the
//! mutual distances), with the mass parameter as an extra exact variable.

pub mod poly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use poly::{poly_det, Monomial, Polynomial};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Body pairs in lexicographic order: the coordinate order of all systems.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Dziobek variable order: λ₀, μ, r₁₂, r₁₃, r₁₄, r₂₃, r₂₄, r₃₄.
pub const DZIOBEK_DIM: usize = 8;
/// AC variable order: r₁₂, r₁₃, r₁₄, r₂₃, r₂₄, r₃₄.
pub const AC_DIM: usize = 6;

pub fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).expect("valid pair")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassPattern {
    /// m₁ = m₂ = m₃ = 1, m₄ = m.
    ThreeEqual,
    /// m₁ = m₂ = 1, m₃ = m₄ = m.
    TwoPairs,
    /// Four explicit numeric masses.
    General,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Dziobek,
    Ac,
}

#[derive(Debug, Error)]
pub enum PolysysError {
    #[error("masses must be positive")]
    NonPositiveMass,
    #[error("derivative order {0} exceeds supported order 3")]
    OrderTooHigh(u32),
}

/// Four masses plus the pattern tag deciding which of them are the symbolic
/// parameter m.
#[derive(Clone, Debug)]
pub struct MassParams {
    pub masses: [BigRational; 4],
    pub pattern: MassPattern,
}

impl MassParams {
    pub fn new(masses: [BigRational; 4], pattern: MassPattern) -> Result<Self, PolysysError> {
        if masses.iter().any(|m| *m <= BigRational::zero()) {
            return Err(PolysysError::NonPositiveMass);
        }
        Ok(MassParams { masses, pattern })
    }

    pub fn three_equal(m: BigRational) -> Result<Self, PolysysError> {
        let one = BigRational::one();
        Self::new([one.clone(), one.clone(), one, m], MassPattern::ThreeEqual)
    }

    pub fn two_pairs(m: BigRational) -> Result<Self, PolysysError> {
        let one = BigRational::one();
        Self::new([one.clone(), one, m.clone(), m], MassPattern::TwoPairs)
    }

    pub fn general(masses: [BigRational; 4]) -> Result<Self, PolysysError> {
        Self::new(masses, MassPattern::General)
    }

    pub fn masses_f64(&self) -> [f64; 4] {
        [
            poly::rational_to_f64(&self.masses[0]),
            poly::rational_to_f64(&self.masses[1]),
            poly::rational_to_f64(&self.masses[2]),
            poly::rational_to_f64(&self.masses[3]),
        ]
    }

    /// Mass of body `i` as a polynomial in the system variables (the symbolic
    /// pattern masses use the mass variable, the rest are constants).
    fn mass_poly(&self, i: usize, arity: u32, mass_var: Option<u32>) -> Polynomial {
        let symbolic = match (self.pattern, i) {
            (MassPattern::ThreeEqual, 3) => true,
            (MassPattern::TwoPairs, 2 | 3) => true,
            _ => false,
        };
        match (symbolic, mass_var) {
            (true, Some(v)) => Polynomial::var(arity, v),
            _ => Polynomial::constant(arity, self.masses[i].clone()),
        }
    }
}

/// A polynomial equation system together with its coordinate layout.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub kind: SystemKind,
    pub pattern: MassPattern,
    pub equations: Vec<Polynomial>,
    /// Number of unknowns (8 for Dziobek, 6 for AC).
    pub n_coords: usize,
    /// Index of the symbolic mass variable, if the system carries one.
    pub mass_var: Option<u32>,
}

impl PolySystem {
    pub fn arity(&self) -> u32 {
        self.equations[0].arity
    }

    /// Jacobian polynomials with respect to the coordinate variables only.
    pub fn jacobian_polys(&self) -> Vec<Vec<Polynomial>> {
        self.equations
            .iter()
            .map(|e| (0..self.n_coords as u32).map(|v| e.diff(v)).collect())
            .collect()
    }

    /// ∂F/∂m polynomials (zero polynomials when the mass is numeric).
    pub fn mass_derivative(&self) -> Vec<Polynomial> {
        match self.mass_var {
            Some(v) => self.equations.iter().map(|e| e.diff(v)).collect(),
            None => self
                .equations
                .iter()
                .map(|e| Polynomial::zero(e.arity))
                .collect(),
        }
    }

    /// Substitutes a numeric mass value, producing a system in the coordinates only.
    pub fn at_mass(&self, m: &BigRational) -> PolySystem {
        match self.mass_var {
            None => self.clone(),
            Some(v) => PolySystem {
                kind: self.kind,
                pattern: self.pattern,
                equations: self
                    .equations
                    .iter()
                    .map(|e| e.substitute(v, m).shrink_arity(self.n_coords as u32))
                    .collect(),
                n_coords: self.n_coords,
                mass_var: None,
            },
        }
    }

    pub fn residual_f64(&self, x: &[f64]) -> f64 {
        self.equations
            .iter()
            .map(|e| e.eval_f64(x).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_canonical_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "pattern": self.pattern,
            "n_coords": self.n_coords,
            "mass_var": self.mass_var,
            "equations": self.equations.iter().map(|e| e.to_canonical_json()).collect::<Vec<_>>(),
        })
    }
}

fn q_i64(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// The Cayley-Menger polynomial S in the six distance variables placed at
/// `offset..offset+6` of an `arity`-variable polynomial ring. S equals 288 V²
/// for the tetrahedron with those edge lengths and vanishes exactly on
/// coplanar configurations.
pub fn cayley_menger_poly(arity: u32, offset: u32) -> Polynomial {
    let one = Polynomial::constant_i64(arity, 1);
    let zero = Polynomial::zero(arity);
    let sq = |i: usize, j: usize| -> Polynomial {
        let v = offset + pair_index(i, j) as u32;
        let mut p = Polynomial::zero(arity);
        p.add_term(Monomial::from_pairs(vec![(v, 2)]), BigRational::one());
        p
    };
    let mut rows: Vec<Vec<Polynomial>> = vec![vec![zero.clone(); 5]; 5];
    for c in 1..5 {
        rows[0][c] = one.clone();
        rows[c][0] = one.clone();
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                rows[i + 1][j + 1] = sq(i, j);
            }
        }
    }
    poly_det(&rows)
}

fn cm_poly_6() -> &'static Polynomial {
    static CM: OnceLock<Polynomial> = OnceLock::new();
    CM.get_or_init(|| cayley_menger_poly(6, 0))
}

/// Cayley-Menger determinant of six mutual distances (r₁₂, r₁₃, r₁₄, r₂₃, r₂₄, r₃₄).
pub fn cayley_menger(r: &[f64; 6]) -> f64 {
    cm_poly_6().eval_f64(r)
}

/// Exact rational Cayley-Menger determinant.
pub fn cayley_menger_q(r: &[BigRational; 6]) -> BigRational {
    cm_poly_6().eval_q(r)
}

/// Builds the Dziobek system: the critical-point equations of
/// U + λ₀(I − I₀) + μS with I₀ = 1, denominators cleared (the
/// moment-of-inertia equation and each gradient equation are multiplied by
/// M = Σmᵢ, the r_ij-gradient equations additionally by r_ij²).
pub fn build_dziobek(masses: &MassParams) -> PolySystem {
    let symbolic = masses.pattern != MassPattern::General;
    let arity = if symbolic { 9 } else { 8 };
    let mass_var = if symbolic { Some(8u32) } else { None };

    let m_of = |i: usize| masses.mass_poly(i, arity, mass_var);
    let total_mass = m_of(0).add(&m_of(1)).add(&m_of(2)).add(&m_of(3));
    let s_poly = cayley_menger_poly(arity, 2);
    let rvar = |k: usize| Polynomial::var(arity, 2 + k as u32);
    let lambda0 = Polynomial::var(arity, 0);
    let mu = Polynomial::var(arity, 1);

    // F1 = Σ mᵢmⱼ r_ij² − M  (the cleared form of I − 1)
    let mut f1 = total_mass.neg();
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let r = rvar(k);
        f1 = f1.add(&m_of(i).mul(&m_of(j)).mul(&r).mul(&r));
    }

    let mut equations = vec![f1, s_poly.clone()];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let mij = m_of(i).mul(&m_of(j));
        let r = rvar(k);
        let r2 = r.mul(&r);
        let r3 = r2.mul(&r);
        let ds = s_poly.diff(2 + k as u32);
        // M r² (∂U/∂r + λ₀ ∂I/∂r + μ ∂S/∂r)
        let grad = total_mass
            .mul(&mij)
            .neg()
            .add(&lambda0.mul(&mij).mul(&r3).scale(&q_i64(2)))
            .add(&mu.mul(&total_mass).mul(&r2).mul(&ds));
        equations.push(grad);
    }

    PolySystem {
        kind: SystemKind::Dziobek,
        pattern: masses.pattern,
        equations,
        n_coords: DZIOBEK_DIM,
        mass_var,
    }
}

/// Builds the Albouy-Chenciner system with the normalization λ' = −1, one
/// cleared polynomial equation per pair (i, j): the raw equation multiplied
/// by −r_ij · Π_{k∉{i,j}} r_ik³ r_jk³.
pub fn build_ac(masses: &MassParams) -> PolySystem {
    let symbolic = masses.pattern != MassPattern::General;
    let arity = if symbolic { 7 } else { 6 };
    let mass_var = if symbolic { Some(6u32) } else { None };

    let m_of = |i: usize| masses.mass_poly(i, arity, mass_var);
    let rvar = |i: usize, j: usize| Polynomial::var(arity, pair_index(i, j) as u32);
    let pow3 = |p: &Polynomial| p.mul(p).mul(p);
    let sq = |p: &Polynomial| p.mul(p);

    let mut equations = Vec::with_capacity(6);
    for &(i, j) in PAIRS.iter() {
        let others: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
        let (k1, k2) = (others[0], others[1]);
        let rij = rvar(i, j);
        let two = q_i64(2);

        // k ∈ {i, j}: (mᵢ + mⱼ)(2 − 2 r_ij³) Π_{k∉{i,j}} r_ik³ r_jk³
        let pi_all = pow3(&rvar(i, k1))
            .mul(&pow3(&rvar(j, k1)))
            .mul(&pow3(&rvar(i, k2)))
            .mul(&pow3(&rvar(j, k2)));
        let own = m_of(i)
            .add(&m_of(j))
            .mul(&Polynomial::constant_i64(arity, 2).sub(&pow3(&rij).scale(&two)))
            .mul(&pi_all);
        let mut eq = own;

        // k ∉ {i, j}: r_ij (r_ik³ − 1) r_jk³ (other factors) X + (i ↔ j) part
        for &k in &others {
            let kp = if k == k1 { k2 } else { k1 };
            let rik = rvar(i, k);
            let rjk = rvar(j, k);
            let tail = pow3(&rvar(i, kp)).mul(&pow3(&rvar(j, kp)));
            let x = sq(&rjk).sub(&sq(&rik)).sub(&sq(&rij));
            let y = sq(&rik).sub(&sq(&rjk)).sub(&sq(&rij));
            let part1 = rij
                .mul(&pow3(&rik).sub(&Polynomial::constant_i64(arity, 1)))
                .mul(&pow3(&rjk))
                .mul(&tail)
                .mul(&x);
            let part2 = rij
                .mul(&pow3(&rjk).sub(&Polynomial::constant_i64(arity, 1)))
                .mul(&pow3(&rik))
                .mul(&tail)
                .mul(&y);
            eq = eq.add(&m_of(k).mul(&part1.add(&part2)));
        }
        equations.push(eq);
    }

    PolySystem {
        kind: SystemKind::Ac,
        pattern: masses.pattern,
        equations,
        n_coords: AC_DIM,
        mass_var,
    }
}

/// Exact partial derivative along a multi-index of total order ≤ 3.
pub fn differentiate(
    p: &Polynomial,
    multi_index: &[(u32, u32)],
) -> Result<Polynomial, PolysysError> {
    let order: u32 = multi_index.iter().map(|&(_, o)| o).sum();
    if order > 3 {
        return Err(PolysysError::OrderTooHigh(order));
    }
    let mut out = p.clone();
    for &(v, o) in multi_index {
        for _ in 0..o {
            out = out.diff(v);
        }
    }
    Ok(out)
}

/// The equilateral-triangle-plus-center family point in AC normalization
/// (λ' = −1): distances (α, α, √3α/3, α, √3α/3, √3α/3) with
/// α = (3(√3 m + 1)/(m + 3))^(1/3).
pub fn equilateral_point(m: f64) -> Result<[f64; 6], PolysysError> {
    if m <= 0.0 {
        return Err(PolysysError::NonPositiveMass);
    }
    let alpha = equilateral_alpha(m);
    let c = alpha / 3f64.sqrt();
    Ok([alpha, alpha, c, alpha, c, c])
}

pub fn equilateral_alpha(m: f64) -> f64 {
    (3.0 * (3f64.sqrt() * m + 1.0) / (m + 3.0)).cbrt()
}

/// The same family in Dziobek normalization I = 1: unit outer triangle,
/// center distance 1/√3, with the multipliers λ₀ = (3√3m + 3)/2 and
/// μ = 3m(3√3 − 1)/(4(m + 3)).
pub fn equilateral_dziobek_point(m: f64) -> Result<[f64; 8], PolysysError> {
    if m <= 0.0 {
        return Err(PolysysError::NonPositiveMass);
    }
    let s3 = 3f64.sqrt();
    let b = 1.0 / s3;
    let lambda0 = (3.0 * s3 * m + 3.0) / 2.0;
    let mu = 3.0 * m * (3.0 * s3 - 1.0) / (4.0 * (m + 3.0));
    Ok([lambda0, mu, 1.0, 1.0, b, 1.0, b, b])
}

/// Closed form of the Dziobek Jacobian determinant along the equilateral
/// family (normalization I = 1):
/// −64(60√3 − 133)(−249m + 64√3 + 81)² m² (m+3)⁵ / 20667.
pub fn equilateral_jacobian_det(m: f64) -> f64 {
    let s3 = 3f64.sqrt();
    let lin = -249.0 * m + 64.0 * s3 + 81.0;
    -64.0 * (60.0 * s3 - 133.0) * lin * lin * m * m * (m + 3.0).powi(5) / 20667.0
}

/// The mass value (81 + 64√3)/249 at which the determinant above vanishes.
pub fn equilateral_critical_mass() -> f64 {
    (81.0 + 64.0 * 3f64.sqrt()) / 249.0
}

/// Rescales a Dziobek solution (I = 1) to the AC normalization λ' = −1:
/// all six distances multiplied by (U/(M·I))^(1/3).
pub fn dziobek_to_ac(x: &[f64; 8], masses: &[f64; 4]) -> [f64; 6] {
    let r = &x[2..8];
    let total: f64 = masses.iter().sum();
    let mut u = 0.0;
    let mut inertia = 0.0;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        u += masses[i] * masses[j] / r[k];
        inertia += masses[i] * masses[j] * r[k] * r[k];
    }
    inertia /= total;
    let s = (u / (total * inertia)).cbrt();
    let mut out = [0.0; 6];
    for k in 0..6 {
        out[k] = r[k] * s;
    }
    out
}

/// Rescales AC distances to I = 1 and recovers (λ₀, μ) by least squares on
/// the six gradient equations.
pub fn ac_to_dziobek(r: &[f64; 6], masses: &[f64; 4]) -> [f64; 8] {
    let total: f64 = masses.iter().sum();
    let mut inertia = 0.0;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        inertia += masses[i] * masses[j] * r[k] * r[k];
    }
    inertia /= total;
    let s = 1.0 / inertia.sqrt();
    let mut x = [0.0; 8];
    for k in 0..6 {
        x[2 + k] = r[k] * s;
    }
    let (l0, mu) = dziobek_multipliers(&x, masses);
    x[0] = l0;
    x[1] = mu;
    x
}

/// Least-squares (λ₀, μ) from the six cleared gradient equations, which are
/// linear in the multipliers.
pub fn dziobek_multipliers(x: &[f64; 8], masses: &[f64; 4]) -> (f64, f64) {
    let total: f64 = masses.iter().sum();
    let cm = cm_poly_6();
    let r: [f64; 6] = x[2..8].try_into().unwrap();
    let mut a11 = 0.0;
    let mut a12 = 0.0;
    let mut a22 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let mij = masses[i] * masses[j];
        let ds = cm.diff(k as u32).eval_f64(&r);
        // eq: ca·λ₀ + cb·μ + cc = 0
        let ca = 2.0 * mij * r[k].powi(3);
        let cb = total * r[k] * r[k] * ds;
        let cc = -total * mij;
        a11 += ca * ca;
        a12 += ca * cb;
        a22 += cb * cb;
        b1 -= ca * cc;
        b2 -= cb * cc;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() < 1e-300 {
        return (0.0, 0.0);
    }
    ((b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cayley_menger_regular_tetrahedron() {
        assert!((cayley_menger(&[1.0; 6]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cayley_menger_unit_square_is_coplanar() {
        // sides 1, diagonals √2 placed as r₁₃ and r₂₄
        let d = 2f64.sqrt();
        let s = cayley_menger(&[1.0, d, 1.0, 1.0, d, 1.0]);
        assert!(s.abs() < 1e-12, "S = {s}");
    }

    #[test]
    fn cayley_menger_scales_as_r6() {
        // S(r,...,r) = 4 r⁶ exactly in rational arithmetic
        let r = q(3, 2);
        let val = cayley_menger_q(&[r.clone(), r.clone(), r.clone(), r.clone(), r.clone(), r]);
        let expect = q(4, 1) * q(3, 2).pow(6);
        assert_eq!(val, expect);
    }

    #[test]
    fn cayley_menger_invariant_under_d6_permutations() {
        // exact invariance under the coordinate action of each group element
        use crate::symmetry::{Group, GroupElement};
        let r = [q(1, 2), q(2, 3), q(3, 4), q(4, 5), q(5, 6), q(6, 7)];
        let base = cayley_menger_q(&r);
        for g in Group::D6.elements() {
            let perm = GroupElement::new(Group::D6, g).ac_permutation();
            let mut rp = r.clone();
            for (slot, &src) in perm.iter().enumerate() {
                rp[slot] = r[src].clone();
            }
            assert_eq!(cayley_menger_q(&rp), base, "element {g}");
        }
    }

    #[test]
    fn dziobek_f1_cleared_value() {
        // At all r = 1 with unit masses: I − 1 = 1/2, and the cleared
        // F₁ = M (I − 1) = 2.
        let mp = MassParams::general([q(1, 1), q(1, 1), q(1, 1), q(1, 1)]).unwrap();
        let sys = build_dziobek(&mp);
        let x = vec![q(0, 1), q(0, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1)];
        assert_eq!(sys.equations[0].eval_q(&x), q(2, 1));
    }

    #[test]
    fn dziobek_f2_is_cayley_menger() {
        let mp = MassParams::three_equal(q(1, 1)).unwrap();
        let sys = build_dziobek(&mp);
        let mut x = vec![0.0; 9];
        for k in 2..8 {
            x[k] = 1.0;
        }
        assert!((sys.equations[1].eval_f64(&x) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equilateral_family_solves_dziobek() {
        for &m in &[0.5, 1.0, 1.7, 3.2] {
            let mp = MassParams::three_equal(BigRational::from_float(m).unwrap()).unwrap();
            let sys = build_dziobek(&mp).at_mass(&BigRational::from_float(m).unwrap());
            let x = equilateral_dziobek_point(m).unwrap();
            assert!(sys.residual_f64(&x) < 1e-9, "m = {m}");
        }
    }

    #[test]
    fn equilateral_family_solves_ac() {
        for &m in &[0.25, 1.0, 2.0, 9.9] {
            let mp = MassParams::three_equal(BigRational::from_float(m).unwrap()).unwrap();
            let sys = build_ac(&mp).at_mass(&BigRational::from_float(m).unwrap());
            let z = equilateral_point(m).unwrap();
            assert!(sys.residual_f64(&z) < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn equilateral_point_rejects_nonpositive_mass() {
        assert!(equilateral_point(0.0).is_err());
        assert!(equilateral_point(-1.0).is_err());
    }

    #[test]
    fn ac_regular_tetrahedron_residuals_equal_by_symmetry() {
        let mp = MassParams::three_equal(q(1, 1)).unwrap();
        let sys = build_ac(&mp).at_mass(&q(1, 1));
        let vals: Vec<BigRational> = sys
            .equations
            .iter()
            .map(|e| e.eval_q(&vec![q(1, 1); 6]))
            .collect();
        for v in &vals[1..] {
            assert_eq!(v, &vals[0]);
        }
    }

    #[test]
    fn differentiate_order_and_trivial_cases() {
        let mp = MassParams::three_equal(q(1, 1)).unwrap();
        let sys = build_dziobek(&mp);
        // F₁ does not contain λ₀
        assert!(differentiate(&sys.equations[0], &[(0, 1)]).unwrap().is_zero());
        assert!(differentiate(&sys.equations[0], &[(0, 4)]).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mp = MassParams::three_equal(q(1, 1)).unwrap();
        let sys = build_dziobek(&mp).at_mass(&q(1, 1));
        let f2 = &sys.equations[1];
        let d = f2.diff(2); // ∂S/∂r₁₂
        let x: Vec<f64> = vec![0.3, 0.7, 1.0, 1.1, 0.9, 1.2, 0.8, 1.05];
        let h = 1e-6;
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[2] += h;
        xm[2] -= h;
        let fd = (f2.eval_f64(&xp) - f2.eval_f64(&xm)) / (2.0 * h);
        let sym = d.eval_f64(&x);
        assert!((fd - sym).abs() / sym.abs().max(1.0) < 1e-8);
    }

    #[test]
    fn equilateral_jacobian_det_endpoints() {
        let mstar = equilateral_critical_mass();
        assert!(equilateral_jacobian_det(mstar).abs() < 1e-6);
        assert!(equilateral_jacobian_det(1e-9).abs() < 1e-8);
        assert!(equilateral_jacobian_det(1.0) > 0.0);
    }

    #[test]
    fn normalization_round_trip() {
        let masses = [1.0, 1.0, 1.0, 1.0];
        let x = equilateral_dziobek_point(1.0).unwrap();
        let z = dziobek_to_ac(&x, &masses);
        let ze = equilateral_point(1.0).unwrap();
        for k in 0..6 {
            assert!((z[k] - ze[k]).abs() < 1e-12, "component {k}");
        }
        let back = ac_to_dziobek(&z, &masses);
        for k in 0..8 {
            assert!((back[k] - x[k]).abs() < 1e-9, "component {k}");
        }
    }

    #[test]
    fn mass_rational_to_f64() {
        assert!((poly::rational_to_f64(&q(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        let big = BigRational::new(BigInt::from(10).pow(40) + 1, BigInt::from(10).pow(40));
        assert!((poly::rational_to_f64(&big) - 1.0).abs() < 1e-12);
        assert!(q(1, 2).to_f64().is_some());
    }
}
