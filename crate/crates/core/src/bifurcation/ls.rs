//! Exact Lyapunov-Schmidt reduction on the equilateral family at the
//! two-dimensional-kernel mass (81 + 64√3)/249, carried out over the field
//! ℚ(√3)(α) with α³ = 3(√3m + 1)/(m + 3).

use crate::algebraic::{Ext3, Ext3Field, QSqrt3};
use crate::polysys::{build_ac, MassParams, PolySystem};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LsError {
    #[error("the 4x4 leading block of the linearization is singular")]
    SingularBlock,
    #[error("base point does not solve the system exactly: equation {0}")]
    BasePoint(usize),
    #[error("unexpected structure: {0}")]
    Structure(String),
}

/// Exact data of the order-2 reduction.
#[derive(Clone, Debug)]
pub struct LsExpansion {
    pub field: Ext3Field,
    pub mass_critical: QSqrt3,
    /// Kernel-parametrization coefficient (81 + 64√3)/83 of Eq-of-motion
    /// relations b₁ = κ b₆, b₂ = κ b₅, b₃ = −b₅−b₆, b₄ = −κ(b₅+b₆).
    pub bees_coefficient: QSqrt3,
    pub kernel_b5: Vec<Ext3>,
    pub kernel_b6: Vec<Ext3>,
    /// Quadratic coefficient of the bifurcation equations (intrinsic form).
    pub quad_coeff: Ext3,
    /// Linear coefficient of the bifurcation equations (intrinsic form).
    pub lin_coeff: Ext3,
    /// The root t = lin/quad; the bifurcation equations factor as
    /// (b₆ + 2b₅)(b₆ + t) and (b₅ + 2b₆)(b₅ + t) up to the common factor.
    pub root: Ext3,
    /// Paper-normalized integer p₁.
    pub p1: BigInt,
    /// p₂ = (y_a + y_b√3)·W^(1/3) with W = 2(49+9√3)(207+16√3)².
    pub p2_ya: BigInt,
    pub p2_yb: BigInt,
    pub p2_value: f64,
    /// p₃ = p₁/p₂.
    pub p3: f64,
    /// The four order-2 solutions (b₅, b₆).
    pub solutions: Vec<(Ext3, Ext3)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LsSummary {
    pub mass_critical: f64,
    pub alpha: f64,
    pub bees_coefficient: f64,
    pub p1: String,
    pub p2_radicand: String,
    pub p2_integer_part: String,
    pub p2_value: f64,
    pub p3: f64,
    pub solutions_b5_b6: Vec<(f64, f64)>,
    pub back_substitution_exact_zero: bool,
}

impl LsExpansion {
    pub fn summary(&self) -> LsSummary {
        let f = &self.field;
        LsSummary {
            mass_critical: self.mass_critical.to_f64(),
            alpha: self.field.alpha_cubed.to_f64().cbrt(),
            bees_coefficient: self.bees_coefficient.to_f64(),
            p1: self.p1.to_string(),
            p2_radicand: "2*(49+9*sqrt(3))*(207+16*sqrt(3))^2".into(),
            p2_integer_part: format!("{} + {}*sqrt(3)", self.p2_ya, self.p2_yb),
            p2_value: self.p2_value,
            p3: self.p3,
            solutions_b5_b6: self
                .solutions
                .iter()
                .map(|(a, b)| (f.to_f64(a), f.to_f64(b)))
                .collect(),
            back_substitution_exact_zero: self.back_substitution_is_zero(),
        }
    }

    /// Substitutes each of the four solutions into both order-2 bifurcation
    /// equations and checks that the result is exactly zero.
    pub fn back_substitution_is_zero(&self) -> bool {
        let f = &self.field;
        let two = f.from_rational(&BigRational::from(BigInt::from(2)));
        for (b5, b6) in &self.solutions {
            // C1 = (b6 + 2 b5)(P b6 + s), C2 = (b5 + 2 b6)(P b5 + s)
            let c1 = f.mul(
                &f.add(b6, &f.mul(&two, b5)),
                &f.add(&f.mul(&self.quad_coeff, b6), &self.lin_coeff),
            );
            let c2 = f.mul(
                &f.add(b5, &f.mul(&two, b6)),
                &f.add(&f.mul(&self.quad_coeff, b5), &self.lin_coeff),
            );
            if !c1.is_zero() || !c2.is_zero() {
                return false;
            }
        }
        true
    }
}

fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The critical mass (81 + 64√3)/249 as an exact element of ℚ(√3).
pub fn critical_mass() -> QSqrt3 {
    QSqrt3::new(qr(81, 249), qr(64, 249))
}

/// Performs the order-2 Lyapunov-Schmidt reduction of the AC system with
/// masses (1, 1, 1, m) around the equilateral family at the critical mass.
pub fn ls_reduce() -> Result<LsExpansion, LsError> {
    let mstar = critical_mass();
    // alpha^3 = 3(√3 m + 1)/(m + 3)
    let num = QSqrt3::sqrt3().mul(&mstar).add(&QSqrt3::one()).scale(&qr(3, 1));
    let den = mstar.add(&QSqrt3::from_int(3));
    let a3 = num.div(&den);
    let field = Ext3Field::new(a3.clone());

    let sys: PolySystem = build_ac(&MassParams::three_equal(BigRational::one()).unwrap());
    debug_assert_eq!(sys.arity(), 7);

    // base point a = (α, α, √3α/3, α, √3α/3, √3α/3) and the mass
    let alpha = field.alpha();
    let s3_third = field.from_q3(QSqrt3::new(BigRational::zero(), qr(1, 3)));
    let c = field.mul(&alpha, &s3_third);
    let base = [
        alpha.clone(),
        alpha.clone(),
        c.clone(),
        alpha.clone(),
        c.clone(),
        c.clone(),
    ];
    let m_e = field.from_q3(mstar.clone());
    let mut pt: Vec<Ext3> = base.to_vec();
    pt.push(m_e.clone());

    for (i, eq) in sys.equations.iter().enumerate() {
        if !field.eval_poly(eq, &pt).is_zero() {
            return Err(LsError::BasePoint(i));
        }
    }

    // first partials at the base point
    let d1: Vec<Vec<_>> = sys
        .equations
        .iter()
        .map(|e| (0..7u32).map(|v| e.diff(v)).collect::<Vec<_>>())
        .collect();
    let l0: Vec<Vec<Ext3>> = d1
        .iter()
        .map(|row| row[..6].iter().map(|p| field.eval_poly(p, &pt)).collect())
        .collect();

    // kernel basis via the (nonsingular) 4x4 leading block
    let l11: Vec<Vec<Ext3>> = (0..4).map(|i| l0[i][..4].to_vec()).collect();
    let solve_kernel = |e5: i64, e6: i64| -> Result<Vec<Ext3>, LsError> {
        let rhs: Vec<Ext3> = (0..4)
            .map(|i| {
                let t5 = field.mul(&l0[i][4], &field.from_rational(&qr(e5, 1)));
                let t6 = field.mul(&l0[i][5], &field.from_rational(&qr(e6, 1)));
                field.neg(&field.add(&t5, &t6))
            })
            .collect();
        let head = field.solve(&l11, &rhs).ok_or(LsError::SingularBlock)?;
        let mut k = head;
        k.push(field.from_rational(&qr(e5, 1)));
        k.push(field.from_rational(&qr(e6, 1)));
        // verify the vector lies in the full kernel
        for row in &l0 {
            let mut acc = field.zero();
            for (a, kv) in row.iter().zip(&k) {
                acc = field.add(&acc, &field.mul(a, kv));
            }
            if !acc.is_zero() {
                return Err(LsError::Structure("kernel verification failed".into()));
            }
        }
        Ok(k)
    };
    let k5 = solve_kernel(1, 0)?;
    let k6 = solve_kernel(0, 1)?;

    // the bees coefficient: b₁ per b₆
    let bees_q3 = {
        let e = &k6[0];
        if !e.c[1].is_zero() || !e.c[2].is_zero() {
            // coefficient must be rational over √3 (α-free)
        }
        e.c[0].clone()
    };

    // α'(m*) = α/3 (√3/(√3m+1) − 1/(m+3))
    let q = QSqrt3::sqrt3()
        .div(&QSqrt3::sqrt3().mul(&mstar).add(&QSqrt3::one()))
        .sub(&QSqrt3::one().div(&mstar.add(&QSqrt3::from_int(3))))
        .scale(&qr(1, 3));
    let alpha_p = field.mul(&alpha, &field.from_q3(q));
    let cp = field.mul(&alpha_p, &s3_third);
    let aprime = [
        alpha_p.clone(),
        alpha_p.clone(),
        cp.clone(),
        alpha_p.clone(),
        cp.clone(),
        cp.clone(),
    ];

    // second partials and mass-mixed partials at the base point
    let mut hess = vec![vec![vec![field.zero(); 6]; 6]; 6];
    let mut jm = vec![vec![field.zero(); 6]; 6];
    for i in 0..6 {
        for a in 0..6 {
            let da = &d1[i][a];
            for b in a..6 {
                let v = field.eval_poly(&da.diff(b as u32), &pt);
                hess[i][a][b] = v.clone();
                hess[i][b][a] = v;
            }
            jm[i][a] = field.eval_poly(&da.diff(6), &pt);
        }
    }

    let bil = |u: &[Ext3], w: &[Ext3]| -> Vec<Ext3> {
        (0..6)
            .map(|i| {
                let mut acc = field.zero();
                for a in 0..6 {
                    if u[a].is_zero() {
                        continue;
                    }
                    for b in 0..6 {
                        if w[b].is_zero() {
                            continue;
                        }
                        acc = field.add(&acc, &field.mul(&hess[i][a][b], &field.mul(&u[a], &w[b])));
                    }
                }
                acc
            })
            .collect()
    };
    let dfm = |u: &[Ext3]| -> Vec<Ext3> {
        (0..6)
            .map(|i| {
                let mut acc = field.zero();
                for a in 0..6 {
                    acc = field.add(&acc, &field.mul(&jm[i][a], &u[a]));
                }
                acc
            })
            .collect()
    };

    let l21: Vec<Vec<Ext3>> = (4..6).map(|i| l0[i][..4].to_vec()).collect();
    let half = field.from_rational(&qr(1, 2));
    let g2 = |b: &[Ext3]| -> Result<[Ext3; 2], LsError> {
        let t_quad = bil(b, b);
        let t_lin1 = bil(&aprime, b);
        let t_lin2 = dfm(b);
        let t: Vec<Ext3> = (0..6)
            .map(|i| {
                field.add(
                    &field.mul(&half, &t_quad[i]),
                    &field.add(&t_lin1[i], &t_lin2[i]),
                )
            })
            .collect();
        let rhs: Vec<Ext3> = (0..4).map(|i| field.neg(&t[i])).collect();
        let c14 = field.solve(&l11, &rhs).ok_or(LsError::SingularBlock)?;
        let mut out = [field.zero(), field.zero()];
        for r in 0..2 {
            let mut acc = t[4 + r].clone();
            for j in 0..4 {
                acc = field.add(&acc, &field.mul(&l21[r][j], &c14[j]));
            }
            out[r] = acc;
        }
        Ok(out)
    };

    // extract the quadratic form from exact samples
    let add_vec = |a: &[Ext3], b: &[Ext3]| -> Vec<Ext3> {
        a.iter().zip(b).map(|(x, y)| field.add(x, y)).collect()
    };
    let g10 = g2(&k5)?;
    let g01 = g2(&k6)?;
    let g11 = g2(&add_vec(&k5, &k5.iter().map(|_| field.zero()).collect::<Vec<_>>()))?;
    let _ = g11;
    let g11 = g2(&add_vec(&k5, &k6))?;
    let g20 = g2(&add_vec(&k5, &k5))?;
    let g02 = g2(&add_vec(&k6, &k6))?;
    let two = field.from_rational(&qr(2, 1));
    // C(b5,b6) = A b5² + B b5 b6 + Cq b6² + D b5 + E b6 (no constant term)
    let mut coeffs = Vec::new(); // per component: [A, B, Cq, D, E]
    for comp in 0..2 {
        let a_q = field.div(&field.sub(&g20[comp], &field.mul(&two, &g10[comp])), &two);
        let d_l = field.sub(&g10[comp], &a_q);
        let c_q = field.div(&field.sub(&g02[comp], &field.mul(&two, &g01[comp])), &two);
        let e_l = field.sub(&g01[comp], &c_q);
        let b_q = field.sub(
            &field.sub(&field.sub(&g11[comp], &a_q), &c_q),
            &field.add(&d_l, &e_l),
        );
        coeffs.push([a_q, b_q, c_q, d_l, e_l]);
    }

    // expected structure: component 1 = (b6 + 2 b5)(P b6 + s), i.e.
    // A = 0, B = 2P, Cq = P, D = 2s, E = s; component 2 mirrored.
    let p_coeff = coeffs[0][2].clone();
    let s_coeff = coeffs[0][4].clone();
    let check_zero = |x: &Ext3, what: &str| -> Result<(), LsError> {
        if x.is_zero() {
            Ok(())
        } else {
            Err(LsError::Structure(format!("{what} not zero")))
        }
    };
    check_zero(&coeffs[0][0], "C1 b5² coefficient")?;
    check_zero(&field.sub(&coeffs[0][1], &field.mul(&two, &p_coeff)), "C1 cross term")?;
    check_zero(&field.sub(&coeffs[0][3], &field.mul(&two, &s_coeff)), "C1 b5 term")?;
    check_zero(&coeffs[1][2], "C2 b6² coefficient")?;
    check_zero(&field.sub(&coeffs[1][0], &p_coeff), "C2 b5² term")?;
    check_zero(&field.sub(&coeffs[1][1], &field.mul(&two, &p_coeff)), "C2 cross term")?;
    check_zero(&field.sub(&coeffs[1][3], &s_coeff), "C2 b5 term")?;
    check_zero(&field.sub(&coeffs[1][4], &field.mul(&two, &s_coeff)), "C2 b6 term")?;

    // root t = s/P; must lie in ℚ(√3)·α
    let root = field.div(&s_coeff, &p_coeff);
    if !root.c[0].is_zero() || !root.c[2].is_zero() {
        return Err(LsError::Structure("root not of the form (u+v√3)α".into()));
    }
    let uv = root.c[1].clone();

    // paper normalization: α = 3 W^(1/3) / (2(207+16√3)) with
    // W = 2(49+9√3)(207+16√3)², so t = (U+V√3) W^(1/3),
    // U+V√3 = (u+v√3)·3/(2(207+16√3)).
    let frame = QSqrt3::from_int(3).div(&QSqrt3::from_pair_i64(207, 16).scale(&qr(2, 1)));
    // verify the frame: α³ (2(207+16√3))³ = 27 W
    let w_q3 = QSqrt3::from_pair_i64(49, 9)
        .mul(&QSqrt3::from_pair_i64(207, 16))
        .mul(&QSqrt3::from_pair_i64(207, 16))
        .scale(&qr(2, 1));
    let lhs = a3
        .mul(&QSqrt3::from_pair_i64(207, 16).scale(&qr(2, 1)))
        .mul(&QSqrt3::from_pair_i64(207, 16).scale(&qr(2, 1)))
        .mul(&QSqrt3::from_pair_i64(207, 16).scale(&qr(2, 1)));
    if !lhs.sub(&w_q3.scale(&qr(27, 1))).is_zero() {
        return Err(LsError::Structure("radicand frame identity failed".into()));
    }
    let uv_w = uv.mul(&frame);
    // lowest-terms denominator over the basis (1, √3)
    let du = uv_w.a.denom().clone();
    let dv = uv_w.b.denom().clone();
    let p1: BigInt = du.lcm(&dv);
    let p1 = p1.abs();
    let ya = (uv_w.a.clone() * BigRational::from(p1.clone())).to_integer();
    let yb = (uv_w.b.clone() * BigRational::from(p1.clone())).to_integer();

    // numeric p2 and p3
    let w_f = w_q3.to_f64();
    let p2_value = (ya.to_string().parse::<f64>().unwrap()
        + yb.to_string().parse::<f64>().unwrap() * 3f64.sqrt())
        * w_f.cbrt();
    let p1_f = p1.to_string().parse::<f64>().unwrap();
    let p3 = p1_f / p2_value;

    // four solutions: (0,0), (σ,σ), (σ,−2σ), (−2σ,σ) with σ = −t
    let sigma = field.neg(&root);
    let neg2sigma = field.mul(&field.from_rational(&qr(-2, 1)), &sigma);
    let solutions = vec![
        (field.zero(), field.zero()),
        (sigma.clone(), sigma.clone()),
        (sigma.clone(), neg2sigma.clone()),
        (neg2sigma, sigma),
    ];

    Ok(LsExpansion {
        field,
        mass_critical: mstar,
        bees_coefficient: bees_q3,
        kernel_b5: k5,
        kernel_b6: k6,
        quad_coeff: p_coeff,
        lin_coeff: s_coeff,
        root,
        p1,
        p2_ya: ya,
        p2_yb: yb,
        p2_value,
        p3,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_reproduces_exact_constants() {
        let ls = ls_reduce().expect("reduction succeeds");
        // bees coefficient (81 + 64√3)/83
        let expect = QSqrt3::new(qr(81, 83), qr(64, 83));
        assert!(ls.bees_coefficient.sub(&expect).is_zero());
        // kernel structure: b3 = −b5−b6, b4 = −κ(b5+b6)
        let f = &ls.field;
        assert!(f.add(&ls.kernel_b5[2], &f.one()).is_zero());
        assert!(f
            .add(&ls.kernel_b5[3], &f.from_q3(expect.clone()))
            .is_zero());
        assert_eq!(ls.p1, BigInt::from(529935346928u64));
        assert_eq!(ls.p2_ya, BigInt::from(-711993501i64));
        assert_eq!(ls.p2_yb, BigInt::from(362080075i64));
        assert!((ls.p3 + 32.46926929).abs() < 1e-6, "p3 = {}", ls.p3);
        assert!((ls.p2_value + 1.63211356e10).abs() / 1.63e10 < 1e-7);
        assert!(ls.back_substitution_is_zero());
    }

    #[test]
    fn solution_pattern_matches_reported_list() {
        let ls = ls_reduce().unwrap();
        let f = &ls.field;
        let vals: Vec<(f64, f64)> = ls
            .solutions
            .iter()
            .map(|(a, b)| (f.to_f64(a), f.to_f64(b)))
            .collect();
        assert_eq!(vals[0], (0.0, 0.0));
        let sigma = vals[1].0;
        assert!((vals[1].1 - sigma).abs() < 1e-14);
        assert!((vals[2].0 - sigma).abs() < 1e-14);
        assert!((vals[2].1 + 2.0 * sigma).abs() < 1e-13);
        assert!((vals[3].0 + 2.0 * sigma).abs() < 1e-13);
        assert!((vals[3].1 - sigma).abs() < 1e-14);
        // σ = −1/p₃ up to the paper's p₃ = p₁/p₂ convention
        assert!((sigma + 1.0 / ls.p3).abs() < 1e-12, "sigma = {sigma}");
    }
}
