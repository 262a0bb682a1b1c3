//! Exact arithmetic in the quadratic field ℚ(√3) and in the cubic extension
//! ℚ(√3)(α) with α³ ∈ ℚ(√3). This is the coefficient field of the
//! Lyapunov-Schmidt reduction on the equilateral family.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// a + b√3 with rational a, b.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSqrt3 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt3 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn from_int(n: i64) -> Self {
        QSqrt3 { a: BigRational::from(BigInt::from(n)), b: BigRational::zero() }
    }

    pub fn from_rational(q: BigRational) -> Self {
        QSqrt3 { a: q, b: BigRational::zero() }
    }

    pub fn from_pair_i64(a: i64, b: i64) -> Self {
        QSqrt3 {
            a: BigRational::from(BigInt::from(a)),
            b: BigRational::from(BigInt::from(b)),
        }
    }

    pub fn sqrt3() -> Self {
        QSqrt3 { a: BigRational::zero(), b: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        QSqrt3 { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QSqrt3 { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> Self {
        QSqrt3 { a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let three = BigRational::from(BigInt::from(3));
        QSqrt3 {
            a: &self.a * &o.a + &three * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }

    pub fn conj(&self) -> Self {
        QSqrt3 { a: self.a.clone(), b: -&self.b }
    }

    /// Field norm a² − 3b².
    pub fn norm(&self) -> BigRational {
        let three = BigRational::from(BigInt::from(3));
        &self.a * &self.a - three * &self.b * &self.b
    }

    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero in Q(sqrt3)");
        let c = self.conj();
        QSqrt3 { a: c.a / n.clone(), b: c.b / n }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        QSqrt3 { a: &self.a * q, b: &self.b * q }
    }

    pub fn to_f64(&self) -> f64 {
        crate::polysys::poly::rational_to_f64(&self.a)
            + crate::polysys::poly::rational_to_f64(&self.b) * 3f64.sqrt()
    }

    /// Outward-rounded interval enclosure at the given precision.
    pub fn to_interval(&self, prec: u32) -> crate::Interval {
        use crate::interval::dyadic::{Dyadic, Round};
        let a = crate::Interval::from_rational(&self.a, prec);
        let s3lo = Dyadic::from_i64(3).sqrt(prec, Round::Down);
        let s3hi = Dyadic::from_i64(3).sqrt(prec, Round::Up);
        let s3 = crate::Interval::new(s3lo, s3hi);
        let b = crate::Interval::from_rational(&self.b, prec);
        a.add(&b.mul(&s3, prec), prec)
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt(3)", self.a, self.b)
    }
}

/// c₀ + c₁α + c₂α² over ℚ(√3), with α³ = `modulus`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ext3 {
    pub c: [QSqrt3; 3],
}

/// The cubic extension context: carries α³.
#[derive(Clone, Debug)]
pub struct Ext3Field {
    pub alpha_cubed: QSqrt3,
}

impl Ext3Field {
    pub fn new(alpha_cubed: QSqrt3) -> Self {
        Ext3Field { alpha_cubed }
    }

    pub fn zero(&self) -> Ext3 {
        Ext3 { c: [QSqrt3::zero(), QSqrt3::zero(), QSqrt3::zero()] }
    }

    pub fn one(&self) -> Ext3 {
        Ext3 { c: [QSqrt3::one(), QSqrt3::zero(), QSqrt3::zero()] }
    }

    pub fn from_q3(&self, q: QSqrt3) -> Ext3 {
        Ext3 { c: [q, QSqrt3::zero(), QSqrt3::zero()] }
    }

    pub fn from_rational(&self, q: &BigRational) -> Ext3 {
        self.from_q3(QSqrt3::from_rational(q.clone()))
    }

    pub fn alpha(&self) -> Ext3 {
        Ext3 { c: [QSqrt3::zero(), QSqrt3::one(), QSqrt3::zero()] }
    }

    pub fn add(&self, x: &Ext3, y: &Ext3) -> Ext3 {
        Ext3 {
            c: [
                x.c[0].add(&y.c[0]),
                x.c[1].add(&y.c[1]),
                x.c[2].add(&y.c[2]),
            ],
        }
    }

    pub fn sub(&self, x: &Ext3, y: &Ext3) -> Ext3 {
        Ext3 {
            c: [
                x.c[0].sub(&y.c[0]),
                x.c[1].sub(&y.c[1]),
                x.c[2].sub(&y.c[2]),
            ],
        }
    }

    pub fn neg(&self, x: &Ext3) -> Ext3 {
        Ext3 { c: [x.c[0].neg(), x.c[1].neg(), x.c[2].neg()] }
    }

    pub fn mul(&self, x: &Ext3, y: &Ext3) -> Ext3 {
        let mut raw = [
            QSqrt3::zero(),
            QSqrt3::zero(),
            QSqrt3::zero(),
            QSqrt3::zero(),
            QSqrt3::zero(),
        ];
        for i in 0..3 {
            if x.c[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y.c[j].is_zero() {
                    continue;
                }
                raw[i + j] = raw[i + j].add(&x.c[i].mul(&y.c[j]));
            }
        }
        let a = &self.alpha_cubed;
        Ext3 {
            c: [
                raw[0].add(&a.mul(&raw[3])),
                raw[1].add(&a.mul(&raw[4])),
                raw[2].clone(),
            ],
        }
    }

    pub fn inv(&self, x: &Ext3) -> Ext3 {
        assert!(!x.is_zero(), "inverse of zero in Ext3");
        // solve M y = e0 where M is the multiplication-by-x matrix
        let a = &self.alpha_cubed;
        let m = [
            [x.c[0].clone(), a.mul(&x.c[2]), a.mul(&x.c[1])],
            [x.c[1].clone(), x.c[0].clone(), a.mul(&x.c[2])],
            [x.c[2].clone(), x.c[1].clone(), x.c[0].clone()],
        ];
        let det3 = |n: &[[QSqrt3; 3]; 3]| {
            let t1 = n[0][0].mul(&n[1][1].mul(&n[2][2]).sub(&n[1][2].mul(&n[2][1])));
            let t2 = n[0][1].mul(&n[1][0].mul(&n[2][2]).sub(&n[1][2].mul(&n[2][0])));
            let t3 = n[0][2].mul(&n[1][0].mul(&n[2][1]).sub(&n[1][1].mul(&n[2][0])));
            t1.sub(&t2).add(&t3)
        };
        let det = det3(&m);
        let mut cols = [QSqrt3::zero(), QSqrt3::zero(), QSqrt3::zero()];
        for k in 0..3 {
            let mut n = m.clone();
            for r in 0..3 {
                n[r][k] = if r == 0 { QSqrt3::one() } else { QSqrt3::zero() };
            }
            cols[k] = det3(&n).div(&det);
        }
        Ext3 { c: cols }
    }

    pub fn div(&self, x: &Ext3, y: &Ext3) -> Ext3 {
        self.mul(x, &self.inv(y))
    }

    pub fn to_f64(&self, x: &Ext3) -> f64 {
        let al = self.alpha_cubed.to_f64().cbrt();
        x.c[0].to_f64() + x.c[1].to_f64() * al + x.c[2].to_f64() * al * al
    }

    /// Outward-rounded interval enclosure of an element.
    pub fn to_interval(&self, x: &Ext3, prec: u32) -> crate::Interval {
        let a3 = self.alpha_cubed.to_interval(prec);
        let al = a3.nth_root(3, prec).expect("alpha^3 > 0");
        let al2 = al.mul(&al, prec);
        x.c[0]
            .to_interval(prec)
            .add(&x.c[1].to_interval(prec).mul(&al, prec), prec)
            .add(&x.c[2].to_interval(prec).mul(&al2, prec), prec)
    }

    /// Solves a small dense linear system over the field by Gaussian
    /// elimination with exact division.
    pub fn solve(&self, a: &[Vec<Ext3>], b: &[Ext3]) -> Option<Vec<Ext3>> {
        let n = b.len();
        let mut m: Vec<Vec<Ext3>> = (0..n)
            .map(|i| {
                let mut row = a[i].clone();
                row.push(b[i].clone());
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = self.div(&m[r][col], &m[col][col]);
                for c in col..=n {
                    let t = self.mul(&f, &m[col][c]);
                    m[r][c] = self.sub(&m[r][c], &t);
                }
            }
        }
        let mut x = vec![self.zero(); n];
        for r in (0..n).rev() {
            let mut acc = m[r][n].clone();
            for c in r + 1..n {
                let t = self.mul(&m[r][c], &x[c]);
                acc = self.sub(&acc, &t);
            }
            x[r] = self.div(&acc, &m[r][r]);
        }
        Some(x)
    }

    /// Evaluates a rational-coefficient polynomial at a point with Ext3
    /// coordinates.
    pub fn eval_poly(&self, p: &crate::polysys::poly::Polynomial, pt: &[Ext3]) -> Ext3 {
        let mut acc = self.zero();
        for (mon, coeff) in p.terms() {
            let mut t = self.from_rational(coeff);
            for &(v, e) in mon.powers() {
                for _ in 0..e {
                    t = self.mul(&t, &pt[v as usize]);
                }
            }
            acc = self.add(&acc, &t);
        }
        acc
    }
}

impl Ext3 {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|q| q.is_zero())
    }
}

impl fmt::Display for Ext3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})*a + ({})*a^2", self.c[0], self.c[1], self.c[2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn qsqrt3_field_ops() {
        let x = QSqrt3::from_pair_i64(2, 1); // 2 + √3
        let y = x.inv();
        assert!(x.mul(&y).sub(&QSqrt3::one()).is_zero());
        // (2+√3)(2−√3) = 1
        assert!(x.mul(&x.conj()).sub(&QSqrt3::one()).is_zero());
        assert!((x.to_f64() - (2.0 + 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn ext3_inverse() {
        // α³ = 2: the field Q(√3)(2^(1/3))
        let f = Ext3Field::new(QSqrt3::from_int(2));
        let x = f.add(
            &f.alpha(),
            &f.from_q3(QSqrt3::new(q(1, 3), q(2, 7))),
        );
        let y = f.inv(&x);
        let prod = f.mul(&x, &y);
        assert!(f.sub(&prod, &f.one()).is_zero());
        assert!((f.to_f64(&x) * f.to_f64(&y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ext3_linear_solve() {
        let f = Ext3Field::new(QSqrt3::from_pair_i64(81, 9).scale(&q(1, 52)));
        let a = vec![
            vec![f.from_rational(&q(2, 1)), f.alpha()],
            vec![f.one(), f.from_rational(&q(3, 1))],
        ];
        let b = vec![f.one(), f.alpha()];
        let x = f.solve(&a, &b).unwrap();
        // check residual exactly
        for i in 0..2 {
            let mut acc = f.neg(&b[i]);
            for j in 0..2 {
                acc = f.add(&acc, &f.mul(&a[i][j], &x[j]));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn interval_enclosure_contains_float() {
        let f = Ext3Field::new(QSqrt3::from_pair_i64(81, 9).scale(&q(1, 52)));
        let x = f.add(&f.alpha(), &f.from_q3(QSqrt3::from_pair_i64(1, 1)));
        let iv = f.to_interval(&x, 128);
        assert!((iv.to_f64_mid() - f.to_f64(&x)).abs() < 1e-12);
        assert!(iv.width(128).to_f64() < 1e-30);
    }
}
