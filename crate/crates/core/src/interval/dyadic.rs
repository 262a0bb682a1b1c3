//! Arbitrary-precision dyadic floating point numbers (mantissa × 2^exp) with
//! explicit directed rounding. All interval arithmetic is built on these.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Round {
    /// Toward −∞.
    Down,
    /// Toward +∞.
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// Value = mant · 2^exp. Zero is stored as mant = 0, exp = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic { mant: BigInt::from(n), exp: 0 }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic from non-finite float");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut m = BigInt::from(mant);
        if sign < 0 {
            m = -m;
        }
        Dyadic { mant: m, exp }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Removes trailing zero bits of the mantissa.
    pub fn normalized(&self) -> Dyadic {
        if self.mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            return self.clone();
        }
        Dyadic { mant: &self.mant >> tz, exp: self.exp + tz as i64 }
    }

    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Directed rounding to `prec` significant bits.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        if self.mant.is_zero() {
            return Dyadic::zero();
        }
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.normalized();
        }
        let shift = bits - prec as u64;
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude().clone());
        let q: BigUint = &mag >> shift;
        let inexact = mag != (&q << shift);
        let mut q = BigInt::from_biguint(Sign::Plus, q);
        if sign == Sign::Minus {
            q = -q;
        }
        if inexact {
            match (dir, sign) {
                (Round::Down, Sign::Minus) => q -= 1,
                (Round::Up, Sign::Plus) => q += 1,
                _ => {}
            }
        }
        Dyadic { mant: q, exp: self.exp + shift as i64 }.normalized()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    /// Exact sum (no rounding).
    pub fn add_exact(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(o.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &o.mant << (o.exp - exp) as u64;
        Dyadic { mant: a + b, exp }
    }

    pub fn sub_exact(&self, o: &Dyadic) -> Dyadic {
        self.add_exact(&o.neg())
    }

    /// Exact product (no rounding).
    pub fn mul_exact(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() || o.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &o.mant, exp: self.exp + o.exp }
    }

    pub fn add(&self, o: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.add_exact(o).round(prec, dir)
    }

    pub fn sub(&self, o: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.sub_exact(o).round(prec, dir)
    }

    pub fn mul(&self, o: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.mul_exact(o).round(prec, dir)
    }

    /// Directed-rounded quotient.
    pub fn div(&self, o: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!o.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let la = self.mant.bits() as i64;
        let lb = o.mant.bits() as i64;
        let shift = (prec as i64 + 2 + lb - la).max(0) as u64;
        let num_mag = self.mant.magnitude() << shift;
        let (q_mag, r_mag) = num_mag.div_rem(o.mant.magnitude());
        let negative = self.mant.is_negative() != o.mant.is_negative();
        let inexact = !r_mag.is_zero();
        let mut q = BigInt::from_biguint(Sign::Plus, q_mag);
        if negative {
            q = -q;
        }
        if inexact {
            match (dir, negative) {
                (Round::Down, true) => q -= 1,
                (Round::Up, false) => q += 1,
                _ => {}
            }
        }
        Dyadic { mant: q, exp: self.exp - o.exp - shift as i64 }.round(prec, dir)
    }

    /// Directed-rounded square root (self ≥ 0).
    pub fn sqrt(&self, prec: u32, dir: Round) -> Dyadic {
        self.nth_root(2, prec, dir)
    }

    /// Directed-rounded n-th root. Requires self ≥ 0 for even n; odd n allows
    /// negative values.
    pub fn nth_root(&self, n: u32, prec: u32, dir: Round) -> Dyadic {
        use num_integer::Roots;
        assert!(n >= 1);
        if self.is_zero() {
            return Dyadic::zero();
        }
        if self.is_negative() {
            assert!(n % 2 == 1, "even root of negative dyadic");
            return self.neg().nth_root(n, prec, dir.flip()).neg();
        }
        // scale so the root carries at least prec+2 significant bits and the
        // exponent is divisible by n
        let want_bits = (n as u64) * (prec as u64 + 3);
        let cur_bits = self.mant.bits();
        let mut extra = want_bits.saturating_sub(cur_bits) as i64;
        let mut exp = self.exp - extra;
        let rem = exp.rem_euclid(n as i64);
        if rem != 0 {
            extra += rem;
            exp -= rem;
        }
        let mag = self.mant.magnitude() << extra as u64;
        let root = mag.nth_root(n);
        let exact = root.pow(n) == mag;
        let mut r = BigInt::from_biguint(Sign::Plus, root);
        if !exact && dir == Round::Up {
            r += 1;
        }
        Dyadic { mant: r, exp: exp / n as i64 }.round(prec, dir)
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Dyadic {
        let num = Dyadic { mant: q.numer().clone(), exp: 0 };
        let den = Dyadic { mant: q.denom().clone(), exp: 0 };
        num.div(&den, prec, dir)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(64, Round::Down);
        let mut m = 0f64;
        for limb in r.mant.magnitude().iter_u64_digits().rev() {
            m = m * 1.8446744073709552e19 + limb as f64;
        }
        if r.mant.is_negative() {
            m = -m;
        }
        m * 2f64.powi(r.exp.clamp(-2000, 2000) as i32)
    }

    pub fn cmp_dyadic(&self, o: &Dyadic) -> Ordering {
        let d = self.sub_exact(o);
        if d.mant.is_zero() {
            Ordering::Equal
        } else if d.mant.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn abs(&self) -> Dyadic {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn min_d(&self, o: &Dyadic) -> Dyadic {
        if self.cmp_dyadic(o) == Ordering::Greater {
            o.clone()
        } else {
            self.clone()
        }
    }

    pub fn max_d(&self, o: &Dyadic) -> Dyadic {
        if self.cmp_dyadic(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// Exact decimal representation (dyadics are always exactly decimal).
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        if self.exp >= 0 {
            return (&self.mant << self.exp as u64).to_string();
        }
        let k = (-self.exp) as u32;
        // mant / 2^k = mant·5^k / 10^k
        let scaled = &self.mant * BigInt::from(5u32).pow(k);
        let neg = scaled.is_negative();
        let digits = scaled.magnitude().to_string();
        let k = k as usize;
        let body = if digits.len() > k {
            let (int_part, frac) = digits.split_at(digits.len() - k);
            format!("{int_part}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat(k - digits.len()), digits)
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Parses an exact decimal string back into a dyadic. Fails unless the
    /// value is exactly representable (which every `to_decimal_string`
    /// output is).
    pub fn from_decimal_string(s: &str) -> Result<Dyadic, String> {
        let s = s.trim();
        let (neg, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = digits.parse().map_err(|e| format!("bad decimal: {e}"))?;
        let k = frac_part.len() as u32;
        // n / 10^k = n / (2^k 5^k): exact iff 5^k divides n
        let five_k = BigInt::from(5u32).pow(k);
        let (q, r) = n.div_rem(&five_k);
        if !r.is_zero() {
            return Err("decimal not exactly representable as dyadic".into());
        }
        let mut d = Dyadic { mant: q, exp: -(k as i64) };
        if neg {
            d = d.neg();
        }
        Ok(d.normalized())
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.20e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x)
    }

    #[test]
    fn rounding_brackets_value() {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        let lo = Dyadic::from_rational(&third, 64, Round::Down);
        let hi = Dyadic::from_rational(&third, 64, Round::Up);
        assert!(lo.cmp_dyadic(&hi) == Ordering::Less);
        assert!(lo.to_rational() < third && third < hi.to_rational());
        let gap = hi.sub_exact(&lo);
        assert!(gap.to_f64() < 1e-18);
    }

    #[test]
    fn division_directed() {
        let a = d(1.0);
        let b = d(3.0);
        let lo = a.div(&b, 128, Round::Down);
        let hi = a.div(&b, 128, Round::Up);
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(lo.to_rational() < third && third < hi.to_rational());
    }

    #[test]
    fn sqrt_directed() {
        let two = d(2.0);
        let lo = two.sqrt(100, Round::Down);
        let hi = two.sqrt(100, Round::Up);
        assert!(lo.mul_exact(&lo).to_rational() < BigRational::from(BigInt::from(2)));
        assert!(hi.mul_exact(&hi).to_rational() > BigRational::from(BigInt::from(2)));
        assert!((lo.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cbrt_directed_negative() {
        let x = d(-8.0);
        let r = x.nth_root(3, 80, Round::Down);
        assert!((r.to_f64() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn decimal_round_trip_exact() {
        for &x in &[0.0, 1.5, -0.28515625, 1234.0, -3.0517578125e-5] {
            let dy = d(x);
            let s = dy.to_decimal_string();
            let back = Dyadic::from_decimal_string(&s).unwrap();
            assert_eq!(back.normalized(), dy.normalized(), "{x} via {s}");
        }
        assert!(Dyadic::from_decimal_string("0.1").is_err());
    }

    #[test]
    fn negative_rounding_direction() {
        let third = BigRational::new(BigInt::from(-1), BigInt::from(3));
        let lo = Dyadic::from_rational(&third, 53, Round::Down);
        let hi = Dyadic::from_rational(&third, 53, Round::Up);
        assert!(lo.to_rational() < third && third < hi.to_rational());
    }
}
