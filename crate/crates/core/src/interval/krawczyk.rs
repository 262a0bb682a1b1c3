//! The Krawczyk operator K(x, [x]_r) = x − C·F(x) + [I − C·DF([x]_r)]([x]_r − x)
//! and the existence/uniqueness test built on it.

use super::dyadic::{Dyadic, Round};
use super::linalg::{imat_vec, midpoint_inverse, IMatrix};
use super::{Interval, IntervalBox, IntervalError};
use serde::{Deserialize, Serialize};

/// A square nonlinear map with rigorous interval evaluation of the map and
/// its Jacobian. Implementations exist for plain polynomial systems and for
/// the determinant-augmented systems used to locate singularities.
pub trait IntervalSystem {
    fn dim(&self) -> usize;
    /// Short identifier recorded in certificates.
    fn system_id(&self) -> String;
    fn eval(&self, bx: &IntervalBox, prec: u32) -> Vec<Interval>;
    fn jacobian(&self, bx: &IntervalBox, prec: u32) -> IMatrix;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniqueZero,
    NoZero,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrawczykCertificate {
    pub system_id: String,
    /// Mass box: the certified enclosure of the mass parameter when the
    /// system includes it as an unknown.
    pub mass_box: Option<Interval>,
    pub input_box: IntervalBox,
    /// The Krawczyk image K(x, [x]).
    pub image_box: IntervalBox,
    pub verdict: Verdict,
    pub precision_bits: u32,
    /// FNV-1a hash of the preconditioner's exact decimal entries.
    pub preconditioner_hash: String,
    /// Reason recorded for inconclusive verdicts.
    pub reason: Option<String>,
}

impl KrawczykCertificate {
    /// Certified enclosure of the root: the intersection of the input box
    /// with its Krawczyk image (valid for unique-zero verdicts).
    pub fn certified_box(&self) -> Option<IntervalBox> {
        if self.verdict != Verdict::UniqueZero {
            return None;
        }
        self.input_box.intersection(&self.image_box)
    }
}

fn fnv1a(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn precond_hash(c: &[Vec<Dyadic>]) -> String {
    let mut buf = String::new();
    for row in c {
        for d in row {
            buf.push_str(&d.to_decimal_string());
            buf.push(';');
        }
    }
    format!("{:016x}", fnv1a(buf.as_bytes()))
}

/// Runs the Krawczyk test for `sys` on the ∞-ball of radius `r` around `x`.
pub fn krawczyk<S: IntervalSystem>(
    sys: &S,
    x: &[Dyadic],
    r: &Dyadic,
    prec: u32,
    mass_index: Option<usize>,
) -> KrawczykCertificate {
    let n = sys.dim();
    assert_eq!(x.len(), n);
    let bx = IntervalBox::centered(x, r);
    let xpt = IntervalBox::point(x);

    let fx = sys.eval(&xpt, prec);
    let jx = sys.jacobian(&xpt, prec);
    let inconclusive = |reason: String, hash: String| KrawczykCertificate {
        system_id: sys.system_id(),
        mass_box: mass_index.map(|k| bx.0[k].clone()),
        input_box: bx.clone(),
        image_box: bx.clone(),
        verdict: Verdict::Inconclusive,
        precision_bits: prec,
        preconditioner_hash: hash,
        reason: Some(reason),
    };

    let c = match midpoint_inverse(&jx, prec) {
        Some(c) => c,
        None => {
            return inconclusive("singular midpoint Jacobian".into(), "0".repeat(16));
        }
    };
    let hash = precond_hash(&c);
    let c_int: IMatrix = c
        .iter()
        .map(|row| row.iter().map(|d| Interval::point(d.clone())).collect())
        .collect();

    // K = x − C·F(x) + (I − C·J([x])) ([x] − x)
    let cfx = imat_vec(&c_int, &fx, prec);
    let jbox = sys.jacobian(&bx, prec);
    let cj = super::linalg::imat_mul(&c_int, &jbox, prec);
    let mut k = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Interval::point(x[i].clone()).sub(&cfx[i], prec);
        for j in 0..n {
            let mut m = cj[i][j].neg();
            if i == j {
                m = m.add(&Interval::one(), prec);
            }
            let dx = bx.0[j].sub(&Interval::point(x[j].clone()), prec);
            acc = acc.add(&m.mul(&dx, prec + 16), prec + 16);
        }
        k.push(acc.round_out(prec));
    }
    let kbox = IntervalBox(k);

    let verdict = if bx.contains_interior(&kbox) {
        Verdict::UniqueZero
    } else if !bx.intersects(&kbox) {
        Verdict::NoZero
    } else {
        Verdict::Inconclusive
    };

    KrawczykCertificate {
        system_id: sys.system_id(),
        mass_box: mass_index.map(|k| {
            if verdict == Verdict::UniqueZero {
                kbox.0[k].intersection(&bx.0[k]).unwrap_or_else(|| bx.0[k].clone())
            } else {
                bx.0[k].clone()
            }
        }),
        input_box: bx,
        image_box: kbox,
        verdict,
        precision_bits: prec,
        preconditioner_hash: hash,
        reason: match verdict {
            Verdict::Inconclusive => Some("Krawczyk image neither interior nor disjoint".into()),
            _ => None,
        },
    }
}

/// Re-runs the Krawczyk computation at the recorded precision and checks the
/// stored certificate bit for bit.
pub fn verify_certificate<S: IntervalSystem>(
    sys: &S,
    cert: &KrawczykCertificate,
    mass_index: Option<usize>,
) -> Result<(), String> {
    if cert.system_id != sys.system_id() {
        return Err(format!(
            "system id mismatch: certificate {}, system {}",
            cert.system_id,
            sys.system_id()
        ));
    }
    let x = cert.input_box.mid();
    let r = cert.input_box.0[0].rad(cert.precision_bits);
    let fresh = krawczyk(sys, &x, &r, cert.precision_bits, mass_index);
    if fresh.verdict != cert.verdict {
        return Err(format!(
            "verdict mismatch: stored {:?}, recomputed {:?}",
            cert.verdict, fresh.verdict
        ));
    }
    if fresh.preconditioner_hash != cert.preconditioner_hash {
        return Err("preconditioner hash mismatch".into());
    }
    for (a, b) in fresh.image_box.0.iter().zip(&cert.image_box.0) {
        if a.lo.normalized() != b.lo.normalized() || a.hi.normalized() != b.hi.normalized() {
            return Err("image box mismatch".into());
        }
    }
    for (a, b) in fresh.input_box.0.iter().zip(&cert.input_box.0) {
        if a.lo.normalized() != b.lo.normalized() || a.hi.normalized() != b.hi.normalized() {
            return Err("input box mismatch".into());
        }
    }
    Ok(())
}

/// Newton refinement in dyadic arithmetic (midpoints only; no rigor claimed)
/// used to produce a sharp center before certification.
pub fn newton_refine<S: IntervalSystem>(
    sys: &S,
    x0: &[Dyadic],
    prec: u32,
    max_iter: usize,
) -> Result<Vec<Dyadic>, IntervalError> {
    let n = sys.dim();
    let mut x: Vec<Dyadic> = x0.to_vec();
    for _ in 0..max_iter {
        let pt = IntervalBox::point(&x);
        let f: Vec<Dyadic> = sys.eval(&pt, prec).iter().map(|iv| iv.mid()).collect();
        let j = sys.jacobian(&pt, prec);
        let step = solve_dyadic(&j, &f, prec).ok_or(IntervalError::DivisionByZero)?;
        let mut maxstep = Dyadic::zero();
        for i in 0..n {
            x[i] = x[i].sub(&step[i], prec, Round::Down);
            maxstep = maxstep.max_d(&step[i].abs());
        }
        // quadratic convergence: stop once the step is far below target width
        let thresh = Dyadic { mant: num_bigint::BigInt::from(1), exp: -(prec as i64) + 24 };
        if maxstep.cmp_dyadic(&thresh) == std::cmp::Ordering::Less {
            return Ok(x);
        }
    }
    Ok(x)
}

fn solve_dyadic(a: &IMatrix, b: &[Dyadic], prec: u32) -> Option<Vec<Dyadic>> {
    let n = b.len();
    let mut m: Vec<Vec<Dyadic>> = (0..n)
        .map(|i| {
            let mut row: Vec<Dyadic> = a[i].iter().map(|iv| iv.mid()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs().cmp_dyadic(&m[piv][col].abs()) == std::cmp::Ordering::Greater {
                piv = r;
            }
        }
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].div(&m[col][col], prec, Round::Down);
            for c in col..=n {
                let t = f.mul(&m[col][c], prec, Round::Down);
                m[r][c] = m[r][c].sub(&t, prec, Round::Down);
            }
        }
    }
    let mut x = vec![Dyadic::zero(); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n].clone();
        for c in r + 1..n {
            let t = m[r][c].mul(&x[c], prec, Round::Down);
            acc = acc.sub(&t, prec, Round::Down);
        }
        x[r] = acc.div(&m[r][r], prec, Round::Down);
    }
    Some(x)
}

/// Plain polynomial system adapter.
pub struct PolyIntervalSystem {
    pub id: String,
    pub eqs: Vec<super::IPoly>,
    pub jac: Vec<Vec<super::IPoly>>,
}

impl PolyIntervalSystem {
    pub fn compile(sys: &crate::polysys::PolySystem, prec: u32) -> Self {
        let id = format!("{:?}-{:?}", sys.kind, sys.pattern).to_lowercase();
        Self::compile_with_id(sys, prec, id)
    }

    pub fn compile_with_id(sys: &crate::polysys::PolySystem, prec: u32, id: String) -> Self {
        assert!(sys.mass_var.is_none(), "substitute the mass before compiling");
        let eqs = sys.equations.iter().map(|e| super::IPoly::compile(e, prec)).collect();
        let jac = sys
            .jacobian_polys()
            .iter()
            .map(|row| row.iter().map(|p| super::IPoly::compile(p, prec)).collect())
            .collect();
        PolyIntervalSystem { id, eqs, jac }
    }
}

/// Certifies a numerically found regular solution: refines the center at the
/// working precision, then sweeps the Krawczyk radius (smallest first).
pub fn certify_solution(
    sys: &PolyIntervalSystem,
    x0: &[f64],
    prec: u32,
) -> Result<KrawczykCertificate, IntervalError> {
    let xd: Vec<Dyadic> = x0.iter().map(|&v| Dyadic::from_f64(v)).collect();
    let xd = newton_refine(sys, &xd, prec, 50)?;
    for r in [1e-12, 1e-10, 1e-8, 1e-6] {
        let cert = krawczyk(sys, &xd, &Dyadic::from_f64(r), prec, None);
        if cert.verdict == Verdict::UniqueZero {
            return Ok(cert);
        }
    }
    Err(IntervalError::PrecisionExhausted(prec))
}

impl IntervalSystem for PolyIntervalSystem {
    fn dim(&self) -> usize {
        self.eqs.len()
    }
    fn system_id(&self) -> String {
        self.id.clone()
    }
    fn eval(&self, bx: &IntervalBox, prec: u32) -> Vec<Interval> {
        self.eqs.iter().map(|p| p.eval(bx, prec)).collect()
    }
    fn jacobian(&self, bx: &IntervalBox, prec: u32) -> IMatrix {
        self.jac
            .iter()
            .map(|row| row.iter().map(|p| p.eval(bx, prec)).collect())
            .collect()
    }
}
