//! Sparse multivariate polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Product of variable powers, stored sparsely: sorted `(var, exp)` pairs
/// with no zero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial {
    powers: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { powers: Vec::new() }
    }

    pub fn var(v: u32) -> Self {
        Monomial { powers: vec![(v, 1)] }
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        Monomial { powers: pairs }
    }

    pub fn exponent(&self, v: u32) -> u32 {
        self.powers
            .binary_search_by_key(&v, |&(var, _)| var)
            .map(|i| self.powers[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.powers.iter().map(|&(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.powers
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() && j < other.powers.len() {
            let (va, ea) = self.powers[i];
            let (vb, eb) = other.powers[j];
            match va.cmp(&vb) {
                std::cmp::Ordering::Less => {
                    out.push((va, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((vb, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.powers[i..]);
        out.extend_from_slice(&other.powers[j..]);
        Monomial { powers: out }
    }

    /// Renames variables through `map`; exponents are preserved.
    pub fn permuted(&self, map: &[u32]) -> Monomial {
        Monomial::from_pairs(
            self.powers
                .iter()
                .map(|&(v, e)| (map[v as usize], e))
                .collect(),
        )
    }
}

/// Anything a polynomial over the rationals can be evaluated in.
pub trait EvalField: Clone {
    fn zero() -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
}

impl EvalField for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
}

impl EvalField for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    // Scale down huge operands so the ratio stays in f64 range.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    if nb < 900 && db < 900 {
        let n = bigint_to_f64(q.numer());
        let d = bigint_to_f64(q.denom());
        n / d
    } else {
        let shift = (nb.max(db) - 512).max(0) as u64;
        let n = bigint_to_f64(&(q.numer() >> shift));
        let d = bigint_to_f64(&(q.denom() >> shift));
        n / d
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Sparse polynomial over the rationals: map from monomial to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    pub arity: u32,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(arity: u32) -> Self {
        Polynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: u32, c: BigRational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn constant_i64(arity: u32, c: i64) -> Self {
        Self::constant(arity, BigRational::from(BigInt::from(c)))
    }

    pub fn var(arity: u32, v: u32) -> Self {
        assert!(v < arity);
        let mut p = Self::zero(arity);
        p.add_term(Monomial::var(v), BigRational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.arity, other.arity);
        let mut out = Polynomial::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Exact partial derivative with respect to variable `v`.
    pub fn diff(&self, v: u32) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut pairs: Vec<(u32, u32)> = m.powers().to_vec();
            for p in pairs.iter_mut() {
                if p.0 == v {
                    p.1 -= 1;
                }
            }
            out.add_term(
                Monomial::from_pairs(pairs),
                c * BigRational::from(BigInt::from(e)),
            );
        }
        out
    }

    /// Substitutes an exact rational value for variable `v`, keeping the arity.
    pub fn substitute(&self, v: u32, value: &BigRational) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let mut coeff = c.clone();
            for _ in 0..e {
                coeff *= value;
            }
            let pairs: Vec<(u32, u32)> =
                m.powers().iter().filter(|&&(w, _)| w != v).cloned().collect();
            out.add_term(Monomial::from_pairs(pairs), coeff);
        }
        out
    }

    /// Substitutes variable `v` by variable `w` (used to impose symmetry constraints).
    pub fn substitute_var(&self, v: u32, w: u32) -> Polynomial {
        let map: Vec<u32> = (0..self.arity).map(|k| if k == v { w } else { k }).collect();
        self.permute_vars(&map)
    }

    /// Renames variables through `map` (index = old var, value = new var).
    pub fn permute_vars(&self, map: &[u32]) -> Polynomial {
        assert_eq!(map.len(), self.arity as usize);
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.permuted(map), c.clone());
        }
        out
    }

    /// Drops trailing unused variables, producing a polynomial of smaller arity.
    pub fn shrink_arity(&self, arity: u32) -> Polynomial {
        for m in self.terms.keys() {
            for &(v, _) in m.powers() {
                assert!(v < arity, "variable {v} still present");
            }
        }
        Polynomial { arity, terms: self.terms.clone() }
    }

    pub fn eval<T: EvalField>(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.arity as usize);
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from_rational(c);
            for &(v, e) in m.powers() {
                for _ in 0..e {
                    t = t.mul_ref(&point[v as usize]);
                }
            }
            acc = acc.add_ref(&t);
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.eval(point)
    }

    pub fn eval_q(&self, point: &[BigRational]) -> BigRational {
        self.eval(point)
    }

    /// Canonical JSON form: sorted monomials, coefficients as exact
    /// `numer/denom` decimal strings.
    pub fn to_canonical_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "monomial": m.powers().iter().map(|&(v, e)| vec![v, e]).collect::<Vec<_>>(),
                    "coeff": format!("{}/{}", c.numer(), c.denom()),
                })
            })
            .collect();
        serde_json::json!({ "arity": self.arity, "terms": terms })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            } else {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            }
            let ac = c.abs();
            let unit_coeff = ac.is_one() && !m.powers().is_empty();
            if !unit_coeff {
                write!(f, "{}", ac)?;
            }
            for &(v, e) in m.powers() {
                write!(f, "{}x{}", if unit_coeff { "" } else { "*" }, v)?;
                if e > 1 {
                    write!(f, "^{}", e)?;
                }
            }
        }
        Ok(())
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion.
/// Only used on small matrices during system construction.
pub fn poly_det(mat: &[Vec<Polynomial>]) -> Polynomial {
    let n = mat.len();
    let arity = mat[0][0].arity;
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = Polynomial::zero(arity);
    for j in 0..n {
        if mat[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let sub = poly_det(&minor);
        let term = mat[0][j].mul(&sub);
        if j % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc
}
