//! Floating-point solution finding: damped Newton, seeded multistart
//! enumeration with symmetry closure, and natural-parameter continuation in
//! the mass parameter.

pub mod fastsys;

use crate::polysys::{
    cayley_menger, MassParams, MassPattern, PolySystem, SystemKind, DZIOBEK_DIM,
};
use crate::symmetry::{self, Group};
use fastsys::FastSystem;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const DEDUP_TOL: f64 = 1e-6;
pub const PLANARITY_TOL: f64 = 1e-9;
pub const COLLINEAR_TOL: f64 = 1e-7;
/// Solutions with |det DF| below this lie on the degenerate variety of the
/// cleared equations, far below any genuine near-singular determinant.
pub const DEGENERATE_DET_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("Newton iteration diverged")]
    Diverged,
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("corrector failed at the starting point")]
    CorrectorFailedAtStart,
    #[error("iterate left the positive cone")]
    LeftPositiveCone,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Collinear,
    Planar,
    Spatial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub masses: [f64; 4],
    pub system: SystemKind,
    pub coordinates: Vec<f64>,
    pub residual: f64,
    pub jacobian_det: f64,
    pub isotropy: String,
    pub geometry: Option<Geometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_id: Option<String>,
}

/// Damped Newton on a square system. Success requires the residual ∞-norm
/// below `tol` and a converged step.
pub fn newton(
    sys: &FastSystem,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, SolverError> {
    let n = sys.dim();
    let mut x = x0.to_vec();
    let mut f = vec![0.0; n];
    let mut jac = vec![0.0; n * n];
    for _ in 0..max_iter {
        sys.eval(&x, &mut f);
        if !f.iter().all(|v| v.is_finite()) {
            return Err(SolverError::Diverged);
        }
        let res = f.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        sys.jacobian(&x, &mut jac);
        let step = match solve_dense(&jac, &f, n) {
            Some(s) => s,
            None => return Err(SolverError::SingularJacobian),
        };
        let mut snorm = 0.0f64;
        for i in 0..n {
            let s = step[i].clamp(-0.5, 0.5);
            x[i] -= s;
            snorm = snorm.max(s.abs());
        }
        // keep distances positive; the cleared equations also vanish on the
        // degenerate variety near r = 0, which the floor excludes
        for i in sys.coord_range() {
            if x[i] <= 0.02 {
                return Err(SolverError::LeftPositiveCone);
            }
        }
        if res < tol && snorm < tol * 10.0 {
            return Ok(x);
        }
        if snorm < 1e-15 {
            sys.eval(&x, &mut f);
            let res = f.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            return if res < tol { Ok(x) } else { Err(SolverError::Diverged) };
        }
    }
    sys.eval(&x, &mut f);
    let res = f.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if res < tol {
        Ok(x)
    } else {
        Err(SolverError::Diverged)
    }
}

/// Dense LU solve with partial pivoting; `a` is row-major n×n.
pub fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-300 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            rhs.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[r * n + c] * x[c];
        }
        x[r] = acc / m[r * n + r];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

pub fn det_dense(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det *= d;
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
        }
    }
    det
}

/// Classifies the geometry of six mutual distances: collinear when every
/// triangle is degenerate (largest side equals the sum of the others within
/// tolerance), spatial when the Cayley-Menger determinant is positive,
/// otherwise planar.
pub fn classify_geometry(r: &[f64; 6]) -> Geometry {
    let triangles = [(0, 1, 3), (0, 2, 4), (1, 2, 5), (3, 4, 5)];
    let mut all_degenerate = true;
    for &(a, b, c) in &triangles {
        let mut s = [r[a], r[b], r[c]];
        s.sort_by(|x, y| y.partial_cmp(x).unwrap());
        if (s[0] - s[1] - s[2]).abs() > COLLINEAR_TOL {
            all_degenerate = false;
            break;
        }
    }
    if all_degenerate {
        return Geometry::Collinear;
    }
    let s = cayley_menger(r);
    if s > 1e-6 {
        Geometry::Spatial
    } else {
        Geometry::Planar
    }
}

fn group_for_pattern(pattern: MassPattern) -> Option<Group> {
    match pattern {
        MassPattern::ThreeEqual => Some(Group::D6),
        MassPattern::TwoPairs => Some(Group::Klein4),
        MassPattern::General => None,
    }
}

/// Multistart enumeration: deterministic seeded random starts in [0.2, 3]⁶
/// for the distances (λ₀, μ initialized by least squares for the Dziobek
/// system), Newton polish, pointwise dedup, symmetry closure.
pub fn multistart_enumerate(
    system: &PolySystem,
    masses: &MassParams,
    budget: usize,
    seed: u64,
) -> Vec<SolutionRecord> {
    assert!(budget >= 1);
    let m_f64 = masses.masses_f64();
    let msys = match system.mass_var {
        Some(_) => {
            let mval = match masses.pattern {
                MassPattern::ThreeEqual => masses.masses[3].clone(),
                MassPattern::TwoPairs => masses.masses[2].clone(),
                MassPattern::General => unreachable!(),
            };
            system.at_mass(&mval)
        }
        None => system.clone(),
    };
    let fast = FastSystem::compile(&msys);
    let n = fast.dim();
    let is_dziobek = system.kind == SystemKind::Dziobek;

    // batched RNG draw so results are independent of thread scheduling
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<[f64; 6]> = (0..budget)
        .map(|_| {
            let mut s = [0.0; 6];
            for v in s.iter_mut() {
                *v = rng.gen_range(0.2..3.0);
            }
            s
        })
        .collect();

    let found: Vec<Vec<f64>> = starts
        .par_iter()
        .filter_map(|r6| {
            let x0: Vec<f64> = if is_dziobek {
                let mut x = [0.0f64; DZIOBEK_DIM];
                x[2..].copy_from_slice(r6);
                let (l0, mu) = crate::polysys::dziobek_multipliers(&x, &m_f64);
                x[0] = l0;
                x[1] = mu;
                x.to_vec()
            } else {
                r6.to_vec()
            };
            newton(&fast, &x0, RESIDUAL_TOL, 80).ok()
        })
        .collect();

    // pointwise dedup; solutions on the degenerate variety (where the
    // cleared polynomials vanish identically) carry an essentially zero
    // Jacobian determinant and are rejected
    let mut jac_buf = vec![0.0; n * n];
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for sol in found {
        if !accept_solution(&sol, is_dziobek) {
            continue;
        }
        fast.jacobian(&sol, &mut jac_buf);
        if det_dense(&jac_buf, n).abs() < DEGENERATE_DET_TOL {
            continue;
        }
        if !unique.iter().any(|u| symmetry::inf_dist(u, &sol) < DEDUP_TOL) {
            unique.push(sol);
        }
    }

    // symmetry closure: every group image re-polished and added if new
    if let Some(group) = group_for_pattern(masses.pattern) {
        let mut k = 0;
        while k < unique.len() {
            let base = unique[k].clone();
            for gi in group.elements() {
                if let Ok(gx) = symmetry::act(&group.element(gi), &base) {
                    if let Ok(polished) = newton(&fast, &gx, RESIDUAL_TOL, 40) {
                        if accept_solution(&polished, is_dziobek)
                            && !unique
                                .iter()
                                .any(|u| symmetry::inf_dist(u, &polished) < DEDUP_TOL)
                        {
                            unique.push(polished);
                        }
                    }
                }
            }
            k += 1;
        }
    }

    // stable ordering: lexicographic by coordinates
    unique.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let group = group_for_pattern(masses.pattern);
    unique
        .into_iter()
        .map(|x| {
            let mut f = vec![0.0; n];
            fast.eval(&x, &mut f);
            let residual = f.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            let mut jac = vec![0.0; n * n];
            fast.jacobian(&x, &mut jac);
            let det = det_dense(&jac, n);
            let r6: [f64; 6] = x[x.len() - 6..].try_into().unwrap();
            let geometry = if is_dziobek { None } else { Some(classify_geometry(&r6)) };
            let isotropy = match group {
                Some(g) => symmetry::isotropy(&x, g, 1e-6).subgroup,
                None => "n/a".into(),
            };
            SolutionRecord {
                masses: m_f64,
                system: system.kind,
                coordinates: x,
                residual,
                jacobian_det: det,
                isotropy,
                geometry,
                certificate_id: None,
            }
        })
        .collect()
}

fn accept_solution(x: &[f64], is_dziobek: bool) -> bool {
    let r = &x[x.len() - 6..];
    if r.iter().any(|&v| v < 0.05 || v > 10.0 || !v.is_finite()) {
        return false;
    }
    if is_dziobek {
        let r6: [f64; 6] = r.try_into().unwrap();
        if cayley_menger(&r6).abs() > PLANARITY_TOL {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchEnd {
    RangeEnd,
    FoldDetected,
    Lost,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchPoint {
    pub m: f64,
    pub coordinates: Vec<f64>,
    pub jacobian_det: f64,
    pub residual: f64,
    pub isotropy: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Branch {
    pub family: MassPattern,
    pub system: SystemKind,
    pub points: Vec<BranchPoint>,
    pub termination: BranchEnd,
}

pub struct StepControl {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
    pub fold_det_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { initial: 1e-3, min: 1e-10, max: 1e-2, fold_det_tol: 1e-10 }
    }
}

/// Natural-parameter continuation with a secant predictor and Newton
/// corrector: step halves on corrector failure, doubles after three
/// successes, and the branch ends at the range end, at a detected fold, or
/// when the solution leaves the positive cone.
pub fn continue_branch(
    system: &PolySystem,
    family: MassPattern,
    x0: &[f64],
    m0: f64,
    m1: f64,
    ctl: &StepControl,
) -> Result<Branch, SolverError> {
    assert!(system.mass_var.is_some(), "continuation needs the symbolic-mass system");
    let group = group_for_pattern(family);
    let dir = if m1 >= m0 { 1.0 } else { -1.0 };
    let make_fast = |m: f64| {
        let sys = system.at_mass(&BigRational::from_float(m).expect("finite m"));
        FastSystem::compile(&sys)
    };

    let fast0 = make_fast(m0);
    let x_start = newton(&fast0, x0, RESIDUAL_TOL, 60).map_err(|_| SolverError::CorrectorFailedAtStart)?;

    let n = x_start.len();
    let record = |m: f64, x: &[f64]| -> BranchPoint {
        let fast = make_fast(m);
        let mut f = vec![0.0; n];
        fast.eval(x, &mut f);
        let mut jac = vec![0.0; n * n];
        fast.jacobian(x, &mut jac);
        BranchPoint {
            m,
            coordinates: x.to_vec(),
            jacobian_det: det_dense(&jac, n),
            residual: f.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
            isotropy: group
                .map(|g| symmetry::isotropy(x, g, 1e-6).subgroup)
                .unwrap_or_else(|| "n/a".into()),
        }
    };

    let mut points = vec![record(m0, &x_start)];
    let mut m = m0;
    let mut x = x_start;
    let mut x_prev: Option<(f64, Vec<f64>)> = None;
    let mut step = ctl.initial;
    let mut successes = 0usize;
    let termination;
    loop {
        if (m - m1).abs() < 1e-14 {
            termination = BranchEnd::RangeEnd;
            break;
        }
        let h = step.min((m1 - m).abs()) * dir;
        let m_next = m + h;
        // secant predictor
        let mut x_pred = x.clone();
        if let Some((mp, xp)) = &x_prev {
            let scale = (m_next - m) / (m - mp);
            if scale.is_finite() {
                for i in 0..n {
                    x_pred[i] = x[i] + (x[i] - xp[i]) * scale;
                }
            }
        }
        let fast = make_fast(m_next);
        match newton(&fast, &x_pred, RESIDUAL_TOL, 40) {
            Ok(xn) => {
                // guard against corrector jumping to a different branch
                if symmetry::inf_dist(&xn, &x) > 0.5 {
                    step /= 2.0;
                    successes = 0;
                    if step < ctl.min {
                        termination = BranchEnd::Lost;
                        break;
                    }
                    continue;
                }
                x_prev = Some((m, x.clone()));
                m = m_next;
                x = xn;
                points.push(record(m, &x));
                successes += 1;
                if successes >= 3 {
                    step = (step * 2.0).min(ctl.max);
                    successes = 0;
                }
            }
            Err(_) => {
                successes = 0;
                step /= 2.0;
                if step < ctl.min {
                    let last_det = points.last().map(|p| p.jacobian_det.abs()).unwrap_or(1.0);
                    let near_fold = last_det < ctl.fold_det_tol
                        || is_det_vanishing(&points);
                    termination = if near_fold { BranchEnd::FoldDetected } else { BranchEnd::Lost };
                    break;
                }
            }
        }
    }

    Ok(Branch { family, system: system.kind, points, termination })
}

/// Determinant trend test: |det| collapsed by orders of magnitude relative
/// to its maximum along the branch.
fn is_det_vanishing(points: &[BranchPoint]) -> bool {
    if points.len() < 4 {
        return false;
    }
    let last = points.last().unwrap().jacobian_det.abs();
    let peak = points
        .iter()
        .map(|p| p.jacobian_det.abs())
        .fold(0.0f64, f64::max);
    peak > 0.0 && last / peak < 1e-3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountRow {
    pub m: f64,
    pub dziobek: usize,
    pub ac: usize,
    pub geometrically_distinct: usize,
    pub ac_collinear: usize,
    pub ac_spatial: usize,
}

/// Runs both enumerations at each mass value. The geometrically distinct
/// count excludes the regular tetrahedron (AC − 1).
pub fn count_table(
    pattern: MassPattern,
    m_values: &[f64],
    budget: usize,
    seed: u64,
) -> Vec<CountRow> {
    m_values
        .iter()
        .map(|&m| {
            let mq = BigRational::from_float(m).expect("finite m");
            let masses = match pattern {
                MassPattern::ThreeEqual => MassParams::three_equal(mq).unwrap(),
                MassPattern::TwoPairs => MassParams::two_pairs(mq).unwrap(),
                MassPattern::General => panic!("count_table needs a family pattern"),
            };
            let dz = multistart_enumerate(&crate::polysys::build_dziobek(&masses), &masses, budget, seed);
            let ac = multistart_enumerate(&crate::polysys::build_ac(&masses), &masses, budget, seed);
            let coll = ac
                .iter()
                .filter(|s| s.geometry == Some(Geometry::Collinear))
                .count();
            let spat = ac
                .iter()
                .filter(|s| s.geometry == Some(Geometry::Spatial))
                .count();
            CountRow {
                m,
                dziobek: dz.len(),
                ac: ac.len(),
                geometrically_distinct: ac.len().saturating_sub(1),
                ac_collinear: coll,
                ac_spatial: spat,
            }
        })
        .collect()
}
