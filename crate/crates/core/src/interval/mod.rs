//! Outward-rounded interval arithmetic at configurable precision, interval
//! linear algebra, and the Krawczyk existence/uniqueness test.

pub mod dyadic;
pub mod krawczyk;
pub mod linalg;

use dyadic::{Dyadic, Round};
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_PREC: u32 = 256;
pub const MAX_PREC: u32 = 4096;

#[derive(Debug, Error)]
pub enum IntervalError {
    #[error("interval endpoints out of order")]
    EndpointOrder,
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("even root of an interval with negative part")]
    NegativeRoot,
    #[error("precision exhausted at {0} bits")]
    PrecisionExhausted(u32),
    #[error("malformed interval string: {0}")]
    Parse(String),
}

/// Closed interval [lo, hi] of dyadic numbers. All arithmetic is
/// outward-rounded: the exact result set is contained in the returned
/// interval.
#[derive(Clone, PartialEq, Debug)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo.cmp_dyadic(&hi) != std::cmp::Ordering::Greater);
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self::point(Dyadic::one())
    }

    pub fn from_f64(x: f64) -> Self {
        Self::point(Dyadic::from_f64(x))
    }

    pub fn from_f64_pair(lo: f64, hi: f64) -> Self {
        Self::new(Dyadic::from_f64(lo), Dyadic::from_f64(hi))
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::point(Dyadic::from_i64(n))
    }

    /// [x − r, x + r].
    pub fn centered(x: &Dyadic, r: &Dyadic) -> Self {
        Interval { lo: x.sub_exact(r), hi: x.add_exact(r) }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> Dyadic {
        let half = Dyadic { mant: num_bigint::BigInt::from(1), exp: -1 };
        self.lo.add_exact(&self.hi).mul_exact(&half)
    }

    /// Upper bound on the radius.
    pub fn rad(&self, prec: u32) -> Dyadic {
        let half = Dyadic { mant: num_bigint::BigInt::from(1), exp: -1 };
        self.hi.sub_exact(&self.lo).mul_exact(&half).round(prec, Round::Up)
    }

    /// Upper bound on the width hi − lo.
    pub fn width(&self, prec: u32) -> Dyadic {
        self.hi.sub_exact(&self.lo).round(prec, Round::Up)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        self.lo.cmp_dyadic(x) != std::cmp::Ordering::Greater
            && x.cmp_dyadic(&self.hi) != std::cmp::Ordering::Greater
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains_dyadic(&Dyadic::from_f64(x))
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.contains_dyadic(&other.lo) && self.contains_dyadic(&other.hi)
    }

    /// Strict containment in the interior.
    pub fn contains_interior(&self, other: &Interval) -> bool {
        self.lo.cmp_dyadic(&other.lo) == std::cmp::Ordering::Less
            && other.hi.cmp_dyadic(&self.hi) == std::cmp::Ordering::Less
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        !(self.hi.cmp_dyadic(&other.lo) == std::cmp::Ordering::Less
            || other.hi.cmp_dyadic(&self.lo) == std::cmp::Ordering::Less)
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if !self.intersects(other) {
            return None;
        }
        Some(Interval { lo: self.lo.max_d(&other.lo), hi: self.hi.min_d(&other.hi) })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min_d(&other.lo), hi: self.hi.max_d(&other.hi) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo, prec, Round::Down),
            hi: self.hi.add(&o.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Interval {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Interval {
        // all four exact products, then one outward rounding
        let p1 = self.lo.mul_exact(&o.lo);
        let p2 = self.lo.mul_exact(&o.hi);
        let p3 = self.hi.mul_exact(&o.lo);
        let p4 = self.hi.mul_exact(&o.hi);
        let lo = p1.min_d(&p2).min_d(&p3).min_d(&p4);
        let hi = p1.max_d(&p2).max_d(&p3).max_d(&p4);
        Interval { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up) }
    }

    /// Exact product without rounding; used inside monomial evaluation where
    /// a single final rounding is applied.
    pub fn mul_exact(&self, o: &Interval) -> Interval {
        let p1 = self.lo.mul_exact(&o.lo);
        let p2 = self.lo.mul_exact(&o.hi);
        let p3 = self.hi.mul_exact(&o.lo);
        let p4 = self.hi.mul_exact(&o.hi);
        Interval {
            lo: p1.min_d(&p2).min_d(&p3).min_d(&p4),
            hi: p1.max_d(&p2).max_d(&p3).max_d(&p4),
        }
    }

    pub fn round_out(&self, prec: u32) -> Interval {
        Interval { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up) }
    }

    pub fn div(&self, o: &Interval, prec: u32) -> Result<Interval, IntervalError> {
        if o.contains_zero() {
            return Err(IntervalError::DivisionByZero);
        }
        let q = |a: &Dyadic, b: &Dyadic, dir: Round| a.div(b, prec, dir);
        let cands_lo = [
            q(&self.lo, &o.lo, Round::Down),
            q(&self.lo, &o.hi, Round::Down),
            q(&self.hi, &o.lo, Round::Down),
            q(&self.hi, &o.hi, Round::Down),
        ];
        let cands_hi = [
            q(&self.lo, &o.lo, Round::Up),
            q(&self.lo, &o.hi, Round::Up),
            q(&self.hi, &o.lo, Round::Up),
            q(&self.hi, &o.hi, Round::Up),
        ];
        let lo = cands_lo.iter().cloned().reduce(|a, b| a.min_d(&b)).unwrap();
        let hi = cands_hi.iter().cloned().reduce(|a, b| a.max_d(&b)).unwrap();
        Ok(Interval { lo, hi })
    }

    /// Integer power with the even-power tightening at zero.
    pub fn powi(&self, e: u32, prec: u32) -> Interval {
        if e == 0 {
            return Interval::one();
        }
        if e % 2 == 0 && self.contains_zero() {
            let m = self.lo.abs().max_d(&self.hi.abs());
            let mut hi = Dyadic::one();
            for _ in 0..e {
                hi = hi.mul_exact(&m);
            }
            return Interval { lo: Dyadic::zero(), hi: hi.round(prec, Round::Up) };
        }
        // endpoint powers are exact; monotone cases resolved by min/max
        let mut plo = Dyadic::one();
        let mut phi = Dyadic::one();
        for _ in 0..e {
            plo = plo.mul_exact(&self.lo);
            phi = phi.mul_exact(&self.hi);
        }
        Interval {
            lo: plo.min_d(&phi).round(prec, Round::Down),
            hi: plo.max_d(&phi).round(prec, Round::Up),
        }
    }

    pub fn sqrt(&self, prec: u32) -> Result<Interval, IntervalError> {
        if self.lo.is_negative() {
            return Err(IntervalError::NegativeRoot);
        }
        Ok(Interval {
            lo: self.lo.sqrt(prec, Round::Down),
            hi: self.hi.sqrt(prec, Round::Up),
        })
    }

    pub fn nth_root(&self, n: u32, prec: u32) -> Result<Interval, IntervalError> {
        if n % 2 == 0 && self.lo.is_negative() {
            return Err(IntervalError::NegativeRoot);
        }
        Ok(Interval {
            lo: self.lo.nth_root(n, prec, Round::Down),
            hi: self.hi.nth_root(n, prec, Round::Up),
        })
    }

    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max_d(&self.hi.abs())
    }

    pub fn to_f64_mid(&self) -> f64 {
        self.mid().to_f64()
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Interval", 2)?;
        s.serialize_field("lo", &self.lo.to_decimal_string())?;
        s.serialize_field("hi", &self.hi.to_decimal_string())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lo: String,
            hi: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let lo = Dyadic::from_decimal_string(&raw.lo).map_err(D::Error::custom)?;
        let hi = Dyadic::from_decimal_string(&raw.hi).map_err(D::Error::custom)?;
        if lo.cmp_dyadic(&hi) == std::cmp::Ordering::Greater {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(Interval { lo, hi })
    }
}

/// Axis-aligned box of intervals.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IntervalBox(pub Vec<Interval>);

impl IntervalBox {
    pub fn point_f64(x: &[f64]) -> Self {
        IntervalBox(x.iter().map(|&v| Interval::from_f64(v)).collect())
    }

    pub fn point(x: &[Dyadic]) -> Self {
        IntervalBox(x.iter().map(|v| Interval::point(v.clone())).collect())
    }

    /// The ∞-norm ball [x]_r around a point.
    pub fn centered(x: &[Dyadic], r: &Dyadic) -> Self {
        IntervalBox(x.iter().map(|v| Interval::centered(v, r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mid(&self) -> Vec<Dyadic> {
        self.0.iter().map(|iv| iv.mid()).collect()
    }

    pub fn mid_f64(&self) -> Vec<f64> {
        self.0.iter().map(|iv| iv.to_f64_mid()).collect()
    }

    pub fn contains_interior(&self, other: &IntervalBox) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.contains_interior(b))
    }

    pub fn contains(&self, other: &IntervalBox) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.contains(b))
    }

    pub fn intersects(&self, other: &IntervalBox) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.intersects(b))
    }

    pub fn intersection(&self, other: &IntervalBox) -> Option<IntervalBox> {
        let mut out = Vec::with_capacity(self.dim());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.intersection(b)?);
        }
        Some(IntervalBox(out))
    }

    pub fn max_width(&self, prec: u32) -> Dyadic {
        self.0
            .iter()
            .map(|iv| iv.width(prec))
            .reduce(|a, b| a.max_d(&b))
            .unwrap_or_else(Dyadic::zero)
    }
}

/// Compiled form of a polynomial for repeated interval evaluation at a fixed
/// precision: rational coefficients pre-rounded to coefficient intervals.
#[derive(Clone, Debug)]
pub struct IPoly {
    pub arity: usize,
    terms: Vec<(Interval, Vec<(u32, u32)>)>,
}

impl IPoly {
    pub fn compile(p: &crate::polysys::poly::Polynomial, prec: u32) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| (Interval::from_rational(c, prec), m.powers().to_vec()))
            .collect();
        IPoly { arity: p.arity as usize, terms }
    }

    /// Encloses the range of the polynomial over the box. Each term is
    /// evaluated with exact endpoint arithmetic and rounded once.
    pub fn eval(&self, bx: &IntervalBox, prec: u32) -> Interval {
        assert_eq!(bx.dim(), self.arity);
        let mut acc = Interval::zero();
        for (coeff, powers) in &self.terms {
            let mut term = coeff.clone();
            for &(v, e) in powers {
                let p = bx.0[v as usize].powi(e, prec + 32);
                term = term.mul_exact(&p);
            }
            acc = acc.add(&term.round_out(prec + 16), prec + 16);
        }
        acc.round_out(prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::poly::Polynomial;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_of_symmetric_interval() {
        // x² over [−1, 1]: tightened to [0, 1]
        let x = Interval::from_f64_pair(-1.0, 1.0);
        let sq = x.powi(2, 64);
        assert!(sq.lo.is_zero());
        assert!((sq.hi.to_f64() - 1.0).abs() < 1e-15);
        // the enclosure property holds in any case
        assert!(sq.contains(&Interval::from_f64_pair(0.0, 1.0)));
    }

    #[test]
    fn point_box_rational_evaluation_is_tight() {
        // evaluating at a rational point box encloses the exact rational value
        // within a width ~2^(1-prec)
        let p = {
            let x = Polynomial::var(2, 0);
            let y = Polynomial::var(2, 1);
            x.mul(&x).mul(&y).scale(&q(7, 3)).add(&y.scale(&q(-1, 7)))
        };
        let prec = 128;
        let pt = IntervalBox(vec![
            Interval::from_rational(&q(1, 3), prec),
            Interval::from_rational(&q(2, 5), prec),
        ]);
        let ip = IPoly::compile(&p, prec);
        let enc = ip.eval(&pt, prec);
        let exact = p.eval_q(&[q(1, 3), q(2, 5)]);
        let exact_lo = enc.lo.to_rational() <= exact;
        let exact_hi = exact <= enc.hi.to_rational();
        assert!(exact_lo && exact_hi);
        assert!(enc.width(prec).to_f64() < 2f64.powi(-100));
    }

    #[test]
    fn division_excludes_zero_divisor() {
        let a = Interval::from_f64_pair(1.0, 2.0);
        let b = Interval::from_f64_pair(-1.0, 1.0);
        assert!(a.div(&b, 64).is_err());
        let c = Interval::from_f64_pair(2.0, 4.0);
        let r = a.div(&c, 64).unwrap();
        assert!(r.contains(&Interval::from_f64_pair(0.25, 1.0)));
    }

    #[test]
    fn serde_round_trip_bit_exact() {
        let iv = Interval::from_f64_pair(-1.375, 2.5e-3);
        let s = serde_json::to_string(&iv).unwrap();
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(iv.lo.normalized(), back.lo.normalized());
        assert_eq!(iv.hi.normalized(), back.hi.normalized());
    }

    #[test]
    fn inclusion_isotonicity_smoke() {
        let p = {
            let x = Polynomial::var(1, 0);
            x.mul(&x).sub(&x.scale(&q(3, 2)))
        };
        let ip = IPoly::compile(&p, 96);
        let inner = IntervalBox(vec![Interval::from_f64_pair(0.2, 0.4)]);
        let outer = IntervalBox(vec![Interval::from_f64_pair(0.0, 1.0)]);
        let ei = ip.eval(&inner, 96);
        let eo = ip.eval(&outer, 96);
        assert!(eo.contains(&ei));
    }
}
