//! Rigorous location and classification of bifurcation points: Krawczyk
//! certification of determinant-augmented systems (plain for folds,
//! symmetry-restricted for pitchforks), certified kernel enclosures, the
//! Sotomayor quantities, and symmetry-forced vanishing arguments.

pub mod ls;
pub mod pipeline;

use crate::interval::dyadic::Dyadic;
use crate::interval::krawczyk::{
    krawczyk, newton_refine, IntervalSystem, KrawczykCertificate, Verdict,
};
use crate::interval::linalg::{
    imat_adjugate, imat_det, interval_gauss_echelon, kernel_vectors, IMatrix,
};
use crate::interval::{IPoly, Interval, IntervalBox, MAX_PREC};
use crate::polysys::{MassPattern, PolySystem, SystemKind};
use crate::solver::fastsys::FastSystem;
use crate::solver::{det_dense, newton, solve_dense};
use crate::symmetry::{self, Group, GroupElement};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BifurcationError {
    #[error("floating-point stage failed: {0}")]
    FloatStage(String),
    #[error("Krawczyk certification inconclusive up to {0} bits; increase precision")]
    Inconclusive(u32),
    #[error("nullity certificate failed: {0}")]
    Nullity(String),
    #[error("kernel symmetry alternative undecided; tighten enclosures")]
    SymmetryUndecided,
    #[error("branch switching found no corrected seeds")]
    BranchSwitchFailed,
    #[error("interval failure: {0}")]
    Interval(#[from] crate::interval::IntervalError),
}

/// Which augmented system certified the singular point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Plain 9×9 system (F₁..F₈, det DF) in (x, m): the fold route.
    Direct,
    /// Symmetry-restricted system under a Z₂ element: the pitchfork route.
    Restricted { element: String },
}

/// The determinant-augmented interval system. The unknown vector is
/// (y₀..y_{k−1}, m); `unfold` maps each of the 9 underlying polynomial
/// variables (8 coordinates + mass) to an unknown index, so the plain and
/// symmetry-restricted routes share one implementation.
pub struct AugmentedSystem {
    id: String,
    eq_idx: Vec<usize>,
    unfold: Vec<usize>,
    n_unknowns: usize,
    polys: Vec<crate::polysys::poly::Polynomial>,
    eqs: Vec<IPoly>,
    d1: Vec<Vec<IPoly>>,
    d2: Vec<Vec<Vec<IPoly>>>,
    d1_polys: Vec<Vec<crate::polysys::poly::Polynomial>>,
    d2_polys: Vec<Vec<Vec<crate::polysys::poly::Polynomial>>>,
}

impl AugmentedSystem {
    /// Plain augmented system in all 8 coordinates plus the mass.
    pub fn plain(sys: &PolySystem, prec: u32) -> Self {
        assert_eq!(sys.kind, SystemKind::Dziobek);
        let mass = sys.mass_var.expect("symbolic-mass system required") as usize;
        assert_eq!(mass, 8);
        Self::build(sys, (0..9).collect(), (0..8).collect(), "dziobek-augmented".into(), prec)
    }

    /// Restricted system: one unknown per coordinate orbit of the Z₂ element
    /// `r`, one equation per equation orbit, plus the determinant of the full
    /// 8×8 Jacobian.
    pub fn restricted(sys: &PolySystem, r: &GroupElement, prec: u32) -> Result<Self, BifurcationError> {
        assert_eq!(sys.kind, SystemKind::Dziobek);
        let perm = r.dziobek_permutation();
        // coordinate orbit representatives (min index), in coordinate order
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..8 {
            let j = perm[i];
            let rep = i.min(j);
            if !reps.contains(&rep) {
                reps.push(rep);
            }
        }
        reps.sort_unstable();
        let mut unfold = vec![0usize; 9];
        for i in 0..8 {
            let rep = i.min(perm[i]);
            unfold[i] = reps.iter().position(|&x| x == rep).unwrap();
        }
        unfold[8] = reps.len(); // the mass unknown comes last

        // equation orbits under the induced permutation
        let eq_perm = equation_permutation(sys, r)
            .ok_or_else(|| BifurcationError::FloatStage("system not equivariant under R".into()))?;
        let mut eq_idx = Vec::new();
        for i in 0..8 {
            let rep = i.min(eq_perm[i]);
            if !eq_idx.contains(&rep) {
                eq_idx.push(rep);
            }
        }
        eq_idx.sort_unstable();
        if eq_idx.len() != reps.len() {
            return Err(BifurcationError::FloatStage(format!(
                "restricted system not square: {} equations, {} unknowns",
                eq_idx.len(),
                reps.len()
            )));
        }
        Ok(Self::build(
            sys,
            unfold,
            eq_idx,
            format!("dziobek-augmented-restricted-{}", r.label()),
            prec,
        ))
    }

    fn build(
        sys: &PolySystem,
        unfold: Vec<usize>,
        eq_idx: Vec<usize>,
        id: String,
        prec: u32,
    ) -> Self {
        let polys = sys.equations.clone();
        let eqs = polys.iter().map(|p| IPoly::compile(p, prec)).collect();
        let d1_polys: Vec<Vec<_>> = polys
            .iter()
            .map(|p| (0..9u32).map(|v| p.diff(v)).collect::<Vec<_>>())
            .collect();
        let d2_polys: Vec<Vec<Vec<_>>> = d1_polys
            .iter()
            .map(|row| {
                row[..8]
                    .iter()
                    .map(|p| (0..9u32).map(|v| p.diff(v)).collect::<Vec<_>>())
                    .collect()
            })
            .collect();
        let d1 = d1_polys
            .iter()
            .map(|row| row.iter().map(|p| IPoly::compile(p, prec)).collect())
            .collect();
        let d2 = d2_polys
            .iter()
            .map(|row: &Vec<Vec<_>>| {
                row.iter()
                    .map(|col| col.iter().map(|p| IPoly::compile(p, prec)).collect())
                    .collect()
            })
            .collect();
        let n_unknowns = unfold.iter().max().unwrap() + 1;
        AugmentedSystem {
            id,
            eq_idx,
            unfold,
            n_unknowns,
            polys,
            eqs,
            d1,
            d2,
            d1_polys,
            d2_polys,
        }
    }

    pub fn mass_index(&self) -> usize {
        self.n_unknowns - 1
    }

    pub fn unfold_box(&self, y: &IntervalBox) -> IntervalBox {
        IntervalBox(self.unfold.iter().map(|&k| y.0[k].clone()).collect())
    }

    pub fn unfold_f64(&self, y: &[f64]) -> Vec<f64> {
        self.unfold.iter().map(|&k| y[k]).collect()
    }

    pub fn fold_point_f64(&self, x9: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_unknowns];
        for (a, &k) in self.unfold.iter().enumerate() {
            y[k] = x9[a];
        }
        y
    }

    /// Interval Jacobian of the full 8-equation system with respect to the 8
    /// coordinates, over an unfolded 9-dim box.
    pub fn coord_jacobian(&self, x9: &IntervalBox, prec: u32) -> IMatrix {
        (0..8)
            .map(|i| (0..8).map(|j| self.d1[i][j].eval(x9, prec)).collect())
            .collect()
    }

    fn det_gradient(&self, x9: &IntervalBox, prec: u32) -> (Interval, Vec<Interval>) {
        let j = self.coord_jacobian(x9, prec);
        let det = imat_det(&j, prec);
        let adj = imat_adjugate(&j, prec);
        // ∂det/∂u_a = tr(adj · ∂J/∂u_a)
        let mut grad = Vec::with_capacity(9);
        for a in 0..9 {
            let mut acc = Interval::zero();
            for i in 0..8 {
                for k in 0..8 {
                    // tr(adj·D)_= Σ_i Σ_k adj[k][i]·D[i][k] ... adj is already
                    // the matrix with A·adj = det·I, so tr uses adj[k][i]·D[i][k]
                    let t = adj[k][i].mul(&self.d2[i][k][a].eval(x9, prec), prec + 16);
                    acc = acc.add(&t, prec + 16);
                }
            }
            grad.push(acc.round_out(prec));
        }
        (det, grad)
    }

    // f64 twins of the interval evaluations, for the initial Newton stage
    pub fn eval_f64(&self, y: &[f64]) -> Vec<f64> {
        let x9 = self.unfold_f64(y);
        let mut out: Vec<f64> = self.eq_idx.iter().map(|&i| self.polys[i].eval_f64(&x9)).collect();
        let mut j = vec![0.0; 64];
        for i in 0..8 {
            for k in 0..8 {
                j[i * 8 + k] = self.d1_polys[i][k].eval_f64(&x9);
            }
        }
        out.push(det_dense(&j, 8));
        out
    }

    pub fn jacobian_f64(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let x9 = self.unfold_f64(y);
        let mut out = vec![0.0; n * n];
        for (row, &i) in self.eq_idx.iter().enumerate() {
            for a in 0..9 {
                let k = self.unfold[a];
                out[row * n + k] += self.d1_polys[i][a].eval_f64(&x9);
            }
        }
        // determinant row via the adjugate
        let mut j = vec![0.0; 64];
        for i in 0..8 {
            for k in 0..8 {
                j[i * 8 + k] = self.d1_polys[i][k].eval_f64(&x9);
            }
        }
        let adj = adjugate_f64(&j, 8);
        let row = n - 1;
        for a in 0..9 {
            let mut acc = 0.0;
            for i in 0..8 {
                for k in 0..8 {
                    acc += adj[k * 8 + i] * self.d2_polys[i][k][a].eval_f64(&x9);
                }
            }
            out[row * n + self.unfold[a]] += acc;
        }
        out
    }
}

impl IntervalSystem for AugmentedSystem {
    fn dim(&self) -> usize {
        self.n_unknowns
    }

    fn system_id(&self) -> String {
        self.id.clone()
    }

    fn eval(&self, bx: &IntervalBox, prec: u32) -> Vec<Interval> {
        let x9 = self.unfold_box(bx);
        let mut out: Vec<Interval> =
            self.eq_idx.iter().map(|&i| self.eqs[i].eval(&x9, prec)).collect();
        let j = self.coord_jacobian(&x9, prec);
        out.push(imat_det(&j, prec));
        out
    }

    fn jacobian(&self, bx: &IntervalBox, prec: u32) -> IMatrix {
        let n = self.dim();
        let x9 = self.unfold_box(bx);
        let mut out: IMatrix = vec![vec![Interval::zero(); n]; n];
        for (row, &i) in self.eq_idx.iter().enumerate() {
            for a in 0..9 {
                let k = self.unfold[a];
                let d = self.d1[i][a].eval(&x9, prec);
                out[row][k] = out[row][k].add(&d, prec);
            }
        }
        let (_, grad) = self.det_gradient(&x9, prec);
        let row = n - 1;
        for a in 0..9 {
            let k = self.unfold[a];
            out[row][k] = out[row][k].add(&grad[a], prec);
        }
        out
    }
}

fn adjugate_f64(a: &[f64], n: usize) -> Vec<f64> {
    let mut adj = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut minor = Vec::with_capacity((n - 1) * (n - 1));
            for r in 0..n {
                if r == i {
                    continue;
                }
                for c in 0..n {
                    if c == j {
                        continue;
                    }
                    minor.push(a[r * n + c]);
                }
            }
            let d = det_dense(&minor, n - 1);
            adj[j * n + i] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

/// Induced permutation of the 8 Dziobek equations under a group element, by
/// exact polynomial comparison. None when the system is not equivariant.
pub fn equation_permutation(sys: &PolySystem, g: &GroupElement) -> Option<Vec<usize>> {
    let coord_perm = g.dziobek_permutation();
    let arity = sys.arity();
    let mut map: Vec<u32> = (0..arity).collect();
    for (s, &src) in coord_perm.iter().enumerate() {
        map[s] = src as u32;
    }
    let mut perm = Vec::with_capacity(8);
    for f in &sys.equations {
        let composed = f.permute_vars(&map);
        perm.push(sys.equations.iter().position(|h| *h == composed)?);
    }
    Some(perm)
}

/// Result of the rigorous singular-point location.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularityCertificate {
    pub family: MassPattern,
    pub route: Route,
    pub krawczyk: KrawczykCertificate,
    /// Certified enclosure of the 8 coordinates.
    pub certified_x: IntervalBox,
    pub certified_m: Interval,
    /// Certified rank lower bound of DF over the box (n−1 = 7 proves
    /// nullity 1 together with det DF = 0 from the augmented certificate).
    pub rank_lower_bound: usize,
    pub v: Vec<Interval>,
    pub w: Vec<Interval>,
    pub precision_bits: u32,
}

/// Locates and certifies a singular point of the Dziobek system near the
/// given guess: Krawczyk on the augmented system, then a nullity-1
/// certificate with kernel enclosures of DF and DFᵀ.
pub fn locate_singularity(
    sys: &PolySystem,
    family: MassPattern,
    x_guess: &[f64; 8],
    m_guess: f64,
    precision: u32,
) -> Result<SingularityCertificate, BifurcationError> {
    assert_eq!(sys.kind, SystemKind::Dziobek);
    // float stage: polish the solution at fixed m, pick the route
    let mq = BigRational::from_float(m_guess)
        .ok_or_else(|| BifurcationError::FloatStage("non-finite mass guess".into()))?;
    let fixed = sys.at_mass(&mq);
    let fast = FastSystem::compile(&fixed);
    let x0 = newton(&fast, x_guess, 1e-9, 80)
        .map_err(|e| BifurcationError::FloatStage(format!("initial Newton failed: {e}")))?;

    let group = match family {
        MassPattern::ThreeEqual => Group::D6,
        MassPattern::TwoPairs => Group::Klein4,
        MassPattern::General => {
            return Err(BifurcationError::FloatStage("family pattern required".into()))
        }
    };
    let route = pick_route(sys, &fast, &x0, group);

    let mut prec = precision.max(64);
    loop {
        let aug = match &route {
            Route::Direct => AugmentedSystem::plain(sys, prec),
            Route::Restricted { element } => {
                let g = group
                    .elements()
                    .map(|i| group.element(i))
                    .find(|g| g.label() == *element)
                    .expect("element exists");
                AugmentedSystem::restricted(sys, &g, prec)?
            }
        };
        match certify_at_precision(&aug, &x0, m_guess, prec, family, &route) {
            Ok(cert) => return Ok(cert),
            Err(err) => {
                if prec >= MAX_PREC {
                    return Err(err);
                }
                prec *= 2;
            }
        }
    }
}

fn pick_route(sys: &PolySystem, fast: &FastSystem, x0: &[f64], group: Group) -> Route {
    let tag = symmetry::isotropy(x0, group, 1e-5);
    if tag.order < 2 {
        return Route::Direct;
    }
    // approximate kernel direction by inverse iteration on J; the start must
    // not be orthogonal to the kernel (the all-ones vector is, for every
    // antisymmetric kernel), so use a generic fixed vector
    let n = 8;
    let mut jac = vec![0.0; n * n];
    fast.jacobian(x0, &mut jac);
    let mut v = vec![1.0, -0.73, 0.31, 1.37, -0.21, 0.83, -1.13, 0.57];
    for _ in 0..8 {
        if let Some(sol) = solve_dense(&jac, &v, n) {
            let norm = sol.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            v = sol.iter().map(|&s| s / norm).collect();
        } else {
            break;
        }
    }
    for gi in group.elements().skip(1) {
        let g = group.element(gi);
        if g.order() != 2 {
            continue;
        }
        if let Ok(gx) = symmetry::act(&g, x0) {
            if symmetry::inf_dist(&gx, x0) > 1e-5 {
                continue;
            }
            if let Ok(gv) = symmetry::act(&g, &v) {
                let plus: f64 = gv.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let minus: f64 = gv.iter().zip(&v).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
                if minus < 0.2 && plus > 0.5 {
                    // antisymmetric kernel: the determinant-augmented system is
                    // singular, certify through the fixed-point subspace
                    return Route::Restricted { element: g.label() };
                }
            }
        }
        let _ = equation_permutation(sys, &g);
    }
    Route::Direct
}

fn certify_at_precision(
    aug: &AugmentedSystem,
    x0: &[f64],
    m_guess: f64,
    prec: u32,
    family: MassPattern,
    route: &Route,
) -> Result<SingularityCertificate, BifurcationError> {
    // f64 Newton on the augmented system; the seed's determinant is already
    // small, so the mass should move by at most a few of the probe offsets
    let mut x9 = x0.to_vec();
    x9.push(m_guess);
    let mut y: Vec<f64> = aug.fold_point_f64(&x9);
    let n = aug.dim();
    let m_idx = aug.mass_index();
    for _ in 0..120 {
        let f = aug.eval_f64(&y);
        let j = aug.jacobian_f64(&y);
        let step = solve_dense(&j, &f, n)
            .ok_or_else(|| BifurcationError::FloatStage("singular augmented Jacobian".into()))?;
        let mut sn = 0.0f64;
        for i in 0..n {
            let s = step[i].clamp(-0.05, 0.05);
            y[i] -= s;
            sn = sn.max(s.abs());
        }
        if (y[m_idx] - m_guess).abs() > 0.02 {
            return Err(BifurcationError::FloatStage(
                "augmented Newton drifted away from the guessed mass".into(),
            ));
        }
        if sn < 1e-14 {
            break;
        }
    }
    let res = aug
        .eval_f64(&y)
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    // the determinant component carries a large natural scale; measure it
    // relative to the determinant's gradient magnitude
    let jn = aug.jacobian_f64(&y);
    let det_scale = (0..n)
        .map(|k| jn[(n - 1) * n + k].abs())
        .fold(1.0f64, f64::max);
    let res_eq = aug.eval_f64(&y)[..n - 1]
        .iter()
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    let res_det = aug.eval_f64(&y)[n - 1].abs() / det_scale;
    if res_eq > 1e-9 || res_det > 1e-9 {
        return Err(BifurcationError::FloatStage(format!(
            "augmented Newton residual {res:.3e} (eqs {res_eq:.3e}, det {res_det:.3e})"
        )));
    }

    // dyadic refinement and radius sweep
    let yd: Vec<Dyadic> = y.iter().map(|&v| Dyadic::from_f64(v)).collect();
    let yd = newton_refine(aug, &yd, prec, 60)?;
    // sweep smallest-first: the refined center is far more accurate than any
    // of these radii, and smaller boxes give tighter certified enclosures
    let radii = [1e-12, 1e-10, 1e-8, 1e-6];
    let mut chosen: Option<KrawczykCertificate> = None;
    for &r in &radii {
        let cert = krawczyk(aug, &yd, &Dyadic::from_f64(r), prec, Some(aug.mass_index()));
        if cert.verdict == Verdict::UniqueZero {
            chosen = Some(cert);
            break;
        }
    }
    let cert = chosen.ok_or(BifurcationError::Inconclusive(prec))?;
    finish_certificate(aug, cert, family, route, prec)
}

/// Post-Krawczyk phase: unfold to the full coordinate box, certify nullity 1
/// of DF over it, and enclose the kernels of DF and DFᵀ.
fn finish_certificate(
    aug: &AugmentedSystem,
    cert: KrawczykCertificate,
    family: MassPattern,
    route: &Route,
    prec: u32,
) -> Result<SingularityCertificate, BifurcationError> {
    let certified = cert
        .certified_box()
        .ok_or(BifurcationError::Inconclusive(prec))?;
    let full = aug.unfold_box(&certified);
    let x_box = IntervalBox(full.0[..8].to_vec());
    let m_box = full.0[8].clone();
    let a = aug.coord_jacobian(&full, prec);
    let ech = interval_gauss_echelon(&a, prec);
    if ech.rank_lower_bound < 7 {
        return Err(BifurcationError::Nullity(format!(
            "rank lower bound {} < 7",
            ech.rank_lower_bound
        )));
    }
    let (v, w) = kernel_vectors(&a, prec).map_err(|e| BifurcationError::Nullity(e.to_string()))?;

    Ok(SingularityCertificate {
        family,
        route: route.clone(),
        krawczyk: cert,
        certified_x: x_box,
        certified_m: m_box,
        rank_lower_bound: ech.rank_lower_bound,
        v,
        w,
        precision_bits: prec,
    })
}

/// Re-checks a stored bifurcation certificate at its recorded precision:
/// the Krawczyk computation is repeated bit for bit, the nullity and kernel
/// enclosures are rebuilt from the stored box, and every derived quantity is
/// compared exactly against the stored one.
pub fn verify_bifurcation_certificate(cert: &BifurcationCertificate) -> Result<(), String> {
    let sys = pipeline::symbolic_system(cert.family);
    let prec = cert.precision_bits;
    let group = match cert.family {
        MassPattern::ThreeEqual => Group::D6,
        MassPattern::TwoPairs => Group::Klein4,
        MassPattern::General => return Err("certificate without a family pattern".into()),
    };
    let aug = match &cert.route {
        Route::Direct => AugmentedSystem::plain(&sys, prec),
        Route::Restricted { element } => {
            let g = group
                .elements()
                .map(|i| group.element(i))
                .find(|g| g.label() == *element)
                .ok_or_else(|| format!("unknown group element {element}"))?;
            AugmentedSystem::restricted(&sys, &g, prec).map_err(|e| e.to_string())?
        }
    };
    crate::interval::krawczyk::verify_certificate(&aug, &cert.krawczyk, Some(aug.mass_index()))?;
    let sing = finish_certificate(
        &aug,
        cert.krawczyk.clone(),
        cert.family,
        &cert.route,
        prec,
    )
    .map_err(|e| e.to_string())?;
    let fresh = sotomayor_classify(&sys, &sing).map_err(|e| e.to_string())?;
    let same = |a: &Interval, b: &Interval| {
        a.lo.normalized() == b.lo.normalized() && a.hi.normalized() == b.hi.normalized()
    };
    if !same(&fresh.certified_m, &cert.certified_m) {
        return Err("certified mass interval mismatch".into());
    }
    for (a, b) in fresh.certified_x.0.iter().zip(&cert.certified_x.0) {
        if !same(a, b) {
            return Err("certified coordinate box mismatch".into());
        }
    }
    for (fa, fb) in [
        (&fresh.v, &cert.v),
        (&fresh.w, &cert.w),
    ] {
        for (a, b) in fa.iter().zip(fb.iter()) {
            if !same(a, b) {
                return Err("kernel enclosure mismatch".into());
            }
        }
    }
    for (a, b, name) in [
        (&fresh.q1, &cert.q1, "q1"),
        (&fresh.q2, &cert.q2, "q2"),
        (&fresh.q3, &cert.q3, "q3"),
        (&fresh.q4, &cert.q4, "q4"),
    ] {
        if !same(a, b) {
            return Err(format!("{name} mismatch"));
        }
    }
    if fresh.classification != cert.classification {
        return Err("classification mismatch".into());
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Fold,
    Transcritical,
    PitchforkSupercritical,
    PitchforkSubcritical,
    Unresolved,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BifurcationCertificate {
    pub family: MassPattern,
    pub route: Route,
    pub certified_x: IntervalBox,
    pub certified_m: Interval,
    pub q1: Interval,
    pub q2: Interval,
    pub q3: Interval,
    pub q4: Interval,
    /// q₁ and q₃ forced to exact zero by the Z₂ lemma (Rv = −v route).
    pub q1_q3_exact_zero: bool,
    pub classification: Classification,
    pub symmetry_route: String,
    pub v: Vec<Interval>,
    pub w: Vec<Interval>,
    pub precision_bits: u32,
    pub krawczyk: KrawczykCertificate,
    pub rank_lower_bound: usize,
}

/// Outcome of the symmetry-alternative inspection for a Z₂ element.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSymmetry {
    /// Rv = v.
    Symmetric,
    /// Rv = −v; the lemma forces wᵀF_m = 0 and wᵀD²F(v,v) = 0 exactly.
    Antisymmetric,
}

/// Decides between Rv = v and Rv = −v from the kernel enclosure: one
/// alternative must hold for a one-dimensional kernel, so it suffices that
/// the other is refuted by the intervals.
pub fn z2_vanishing_check(
    r: &GroupElement,
    x: &IntervalBox,
    v: &[Interval],
    prec: u32,
) -> Result<KernelSymmetry, BifurcationError> {
    // the point must be R-symmetric
    let perm = r.dziobek_permutation();
    for i in 0..8 {
        if !x.0[i].intersects(&x.0[perm[i]]) {
            return Err(BifurcationError::Nullity(format!(
                "point not R-symmetric in coordinate {i}"
            )));
        }
    }
    if r.index == 0 {
        return Ok(KernelSymmetry::Symmetric);
    }
    let gv: Vec<Interval> = perm.iter().map(|&s| v[s].clone()).collect();
    let mut plus_possible = true; // Rv − v ∋ 0 everywhere
    let mut minus_possible = true; // Rv + v ∋ 0 everywhere
    for i in 0..8 {
        if !gv[i].sub(&v[i], prec).contains_zero() {
            plus_possible = false;
        }
        if !gv[i].add(&v[i], prec).contains_zero() {
            minus_possible = false;
        }
    }
    match (plus_possible, minus_possible) {
        (true, false) => Ok(KernelSymmetry::Symmetric),
        (false, true) => Ok(KernelSymmetry::Antisymmetric),
        _ => Err(BifurcationError::SymmetryUndecided),
    }
}

/// Truncated directional substitution: interval coefficients of
/// t⁰..t³ of F_i(x + t v, m) for each equation.
fn directional_coeffs(
    aug: &AugmentedSystem,
    full: &IntervalBox,
    v: &[Interval],
    prec: u32,
) -> Vec<[Interval; 4]> {
    let mut out = Vec::with_capacity(8);
    for i in 0..8 {
        let poly = &aug.polys[i];
        let mut acc = [Interval::zero(), Interval::zero(), Interval::zero(), Interval::zero()];
        for (mon, coeff) in poly.terms() {
            let mut term = [
                Interval::from_rational(coeff, prec),
                Interval::zero(),
                Interval::zero(),
                Interval::zero(),
            ];
            for &(var, e) in mon.powers() {
                let var = var as usize;
                // binomial expansion of (x_var + t v_var)^e truncated at t³
                let base = &full.0[var];
                let mut fac = [Interval::zero(), Interval::zero(), Interval::zero(), Interval::zero()];
                if var == 8 {
                    fac[0] = base.powi(e, prec);
                } else {
                    let vv = &v[var];
                    let mut binom: u64 = 1;
                    for j in 0..=3u32.min(e) {
                        if j > 0 {
                            binom = binom * (e - j + 1) as u64 / j as u64;
                        }
                        let xp = base.powi(e - j, prec);
                        let vp = vv.powi(j, prec);
                        fac[j as usize] = xp
                            .mul(&vp, prec)
                            .mul(&Interval::from_i64(binom as i64), prec);
                    }
                }
                // truncated product term := term * fac
                let mut next = [Interval::zero(), Interval::zero(), Interval::zero(), Interval::zero()];
                for a in 0..4 {
                    for b in 0..4 - a {
                        let p = term[a].mul(&fac[b], prec + 16);
                        next[a + b] = next[a + b].add(&p, prec + 16);
                    }
                }
                term = next;
            }
            for k in 0..4 {
                acc[k] = acc[k].add(&term[k], prec);
            }
        }
        out.push(acc);
    }
    out
}

/// Evaluates the four Sotomayor quantities and classifies the bifurcation.
pub fn sotomayor_classify(
    sys: &PolySystem,
    sing: &SingularityCertificate,
) -> Result<BifurcationCertificate, BifurcationError> {
    let prec = sing.precision_bits;
    let aug = AugmentedSystem::plain(sys, prec);
    let mut full = sing.certified_x.0.clone();
    full.push(sing.certified_m.clone());
    let full = IntervalBox(full);

    // q1 = wᵀ F_m, q2 = wᵀ (∂_m DF) v
    let mut q1 = Interval::zero();
    let mut q2 = Interval::zero();
    for i in 0..8 {
        let fm = aug.d1[i][8].eval(&full, prec);
        q1 = q1.add(&sing.w[i].mul(&fm, prec + 16), prec + 16);
        let mut dfm_v = Interval::zero();
        for j in 0..8 {
            let d2 = aug.d2[i][j][8].eval(&full, prec);
            dfm_v = dfm_v.add(&d2.mul(&sing.v[j], prec + 16), prec + 16);
        }
        q2 = q2.add(&sing.w[i].mul(&dfm_v, prec + 16), prec + 16);
    }
    q1 = q1.round_out(prec);
    q2 = q2.round_out(prec);

    // q3 = wᵀ D²F(v,v) = Σ w_i · 2·[t²] F_i(x+tv); q4 via 6·[t³]
    let coeffs = directional_coeffs(&aug, &full, &sing.v, prec);
    let mut q3 = Interval::zero();
    let mut q4 = Interval::zero();
    for i in 0..8 {
        let two = Interval::from_i64(2);
        let six = Interval::from_i64(6);
        q3 = q3.add(&sing.w[i].mul(&coeffs[i][2].mul(&two, prec), prec + 16), prec + 16);
        q4 = q4.add(&sing.w[i].mul(&coeffs[i][3].mul(&six, prec), prec + 16), prec + 16);
    }
    q3 = q3.round_out(prec);
    q4 = q4.round_out(prec);

    // symmetry route: for a certified Z₂-restricted point with antisymmetric
    // kernel, q1 and q3 vanish exactly by the equivariance lemma
    let group = match sing.family {
        MassPattern::ThreeEqual => Group::D6,
        MassPattern::TwoPairs => Group::Klein4,
        MassPattern::General => Group::D6,
    };
    let mut exact_zero = false;
    let mut symmetry_route = "direct".to_string();
    if let Route::Restricted { element } = &sing.route {
        let g = group
            .elements()
            .map(|i| group.element(i))
            .find(|g| g.label() == *element)
            .expect("element exists");
        match z2_vanishing_check(&g, &sing.certified_x, &sing.v, prec)? {
            KernelSymmetry::Antisymmetric => {
                exact_zero = true;
                symmetry_route = format!("Z2-lemma({})", g.label());
                // consistency: direct enclosures must contain zero
                if !q1.contains_zero() || !q3.contains_zero() {
                    return Err(BifurcationError::Nullity(
                        "lemma contradicts direct interval evaluation".into(),
                    ));
                }
                q1 = Interval::zero();
                q3 = Interval::zero();
            }
            KernelSymmetry::Symmetric => {}
        }
    }

    let classification = classify(&q1, &q2, &q3, &q4, exact_zero);
    Ok(BifurcationCertificate {
        family: sing.family,
        route: sing.route.clone(),
        certified_x: sing.certified_x.clone(),
        certified_m: sing.certified_m.clone(),
        q1,
        q2,
        q3,
        q4,
        q1_q3_exact_zero: exact_zero,
        classification,
        symmetry_route,
        v: sing.v.clone(),
        w: sing.w.clone(),
        precision_bits: prec,
        krawczyk: sing.krawczyk.clone(),
        rank_lower_bound: sing.rank_lower_bound,
    })
}

fn classify(
    q1: &Interval,
    q2: &Interval,
    q3: &Interval,
    q4: &Interval,
    q1_q3_zero: bool,
) -> Classification {
    let nz = |iv: &Interval| !iv.contains_zero();
    if q1_q3_zero {
        if nz(q2) && nz(q4) {
            // flip-invariant supercriticality: sign(q2·q4) < 0 under the
            // normalization q2 > 0
            let prod_neg = q2.mul(q4, 64).hi.is_negative();
            return if prod_neg {
                Classification::PitchforkSupercritical
            } else {
                Classification::PitchforkSubcritical
            };
        }
        return Classification::Unresolved;
    }
    if nz(q1) && nz(q3) {
        return Classification::Fold;
    }
    // Theorem case 2 (not exercised by the certified points of this problem):
    // q1 enclosure consistent with zero, q2 and q3 bounded away from it.
    if q1.contains_zero() && nz(q2) && nz(q3) {
        return Classification::Transcritical;
    }
    Classification::Unresolved
}

/// Seeds for continuing through a certified pitchfork: the symmetric center
/// plus x ± δ·mid(v) on the supercritical side, each corrected by Newton.
pub fn branch_switch(
    sys: &PolySystem,
    cert: &BifurcationCertificate,
    delta_m: f64,
) -> Result<Vec<(Vec<f64>, String)>, BifurcationError> {
    let m0 = cert.certified_m.to_f64_mid();
    let m_target = m0 + delta_m;
    let mq = BigRational::from_float(m_target)
        .ok_or_else(|| BifurcationError::FloatStage("bad target mass".into()))?;
    let fixed = sys.at_mass(&mq);
    let fast = FastSystem::compile(&fixed);
    let x0: Vec<f64> = cert.certified_x.0.iter().map(|iv| iv.to_f64_mid()).collect();
    let vmid: Vec<f64> = cert.v.iter().map(|iv| iv.to_f64_mid()).collect();
    let xnorm = x0.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    let group = match cert.family {
        MassPattern::ThreeEqual => Group::D6,
        MassPattern::TwoPairs => Group::Klein4,
        MassPattern::General => Group::D6,
    };

    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut trials: Vec<Vec<f64>> = vec![x0.clone()];
    for &rel in &[1e-4, 1e-3, 1e-2] {
        let d = rel * xnorm;
        for sign in [-1.0, 1.0] {
            trials.push(
                x0.iter()
                    .zip(&vmid)
                    .map(|(x, v)| x + sign * d * v)
                    .collect(),
            );
        }
    }
    for t in trials {
        if let Ok(sol) = newton(&fast, &t, 1e-11, 60) {
            if !found
                .iter()
                .any(|u| symmetry::inf_dist(u, &sol) < 1e-6)
            {
                found.push(sol);
            }
        }
    }
    if found.is_empty() {
        return Err(BifurcationError::BranchSwitchFailed);
    }
    Ok(found
        .into_iter()
        .map(|x| {
            let tag = symmetry::isotropy(&x, group, 1e-7).subgroup;
            (x, tag)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::{build_dziobek, MassParams};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn equation_permutation_under_g3() {
        let sys = build_dziobek(&MassParams::three_equal(q(1, 1)).unwrap());
        let g3 = GroupElement::new(Group::D6, 3);
        let perm = equation_permutation(&sys, &g3).unwrap();
        // F1, F2, F3 (r12-eq) and F8 (r34-eq) fixed; r13↔r23, r14↔r24 equations swap
        assert_eq!(perm, vec![0, 1, 2, 5, 6, 3, 4, 7]);
    }

    #[test]
    fn restricted_system_is_square() {
        let sys = build_dziobek(&MassParams::three_equal(q(1, 1)).unwrap());
        let g3 = GroupElement::new(Group::D6, 3);
        let aug = AugmentedSystem::restricted(&sys, &g3, 96).unwrap();
        assert_eq!(aug.dim(), 7);
        assert_eq!(aug.mass_index(), 6);
    }

    #[test]
    fn z2_check_on_identity_element() {
        let x = IntervalBox::point_f64(&[4.0, 0.7, 1.0, 0.5, 0.9, 0.5, 0.9, 0.6]);
        let v: Vec<Interval> = (0..8).map(|_| Interval::from_f64(0.1)).collect();
        let e = GroupElement::identity(Group::D6);
        assert_eq!(
            z2_vanishing_check(&e, &x, &v, 64).unwrap(),
            KernelSymmetry::Symmetric
        );
    }

    #[test]
    fn z2_check_detects_antisymmetric_kernel() {
        // g3 swaps coords (3,5) and (4,6): an antisymmetric pattern
        let x = IntervalBox::point_f64(&[4.0, 0.7, 1.0, 0.5, 0.9, 0.5, 0.9, 0.6]);
        let mut v: Vec<Interval> = vec![Interval::zero(); 8];
        v[3] = Interval::from_f64(0.348);
        v[4] = Interval::from_f64(-1.0);
        v[5] = Interval::from_f64(-0.348);
        v[6] = Interval::from_f64(1.0);
        let g3 = GroupElement::new(Group::D6, 3);
        assert_eq!(
            z2_vanishing_check(&g3, &x, &v, 64).unwrap(),
            KernelSymmetry::Antisymmetric
        );
    }
}
