//! End-to-end singular-point workflow: probe masses near a guess, seed from
//! the enumeration, certify and classify.

use super::{locate_singularity, sotomayor_classify, BifurcationCertificate, BifurcationError};
use crate::polysys::{build_dziobek, MassParams, MassPattern, PolySystem};
use crate::solver::{multistart_enumerate, SolutionRecord};
use crate::symmetry::{self, Group};
use num_rational::BigRational;

/// Probe offsets applied multiplicatively around the guessed mass. Tight
/// offsets keep the near-singular solutions' determinants well below every
/// regular solution's, which is what the seed selection keys on.
const PROBE_OFFSETS: [f64; 7] = [0.0, -1e-4, 1e-4, -4e-4, 4e-4, -1.2e-3, 1.2e-3];

pub struct ClassifyConfig {
    pub family: MassPattern,
    pub guess_m: f64,
    pub precision: u32,
    pub budget: usize,
    pub seed: u64,
}

impl ClassifyConfig {
    pub fn new(family: MassPattern, guess_m: f64) -> Self {
        ClassifyConfig {
            family,
            guess_m,
            precision: crate::interval::DEFAULT_PREC,
            budget: 20_000,
            seed: 12345,
        }
    }
}

fn masses_for(family: MassPattern, m: f64) -> MassParams {
    let mq = BigRational::from_float(m).expect("finite mass");
    match family {
        MassPattern::ThreeEqual => MassParams::three_equal(mq).expect("positive"),
        MassPattern::TwoPairs => MassParams::two_pairs(mq).expect("positive"),
        MassPattern::General => panic!("classification needs a family pattern"),
    }
}

/// Finds a near-singular seed around the guess by structural signatures in
/// the enumerations at nearby probe masses: a fold shows up as two close
/// solutions at one mass with opposite Jacobian-determinant signs, a
/// pitchfork as a determinant sign flip along the matched solution between
/// consecutive probes. Returns the seed coordinates and its probe mass.
pub fn find_singular_seed(
    family: MassPattern,
    guess_m: f64,
    budget: usize,
    seed: u64,
) -> Option<(Vec<f64>, f64)> {
    let group = match family {
        MassPattern::ThreeEqual => Group::D6,
        MassPattern::TwoPairs => Group::Klein4,
        MassPattern::General => return None,
    };
    let mut probes: Vec<(f64, Vec<SolutionRecord>)> = PROBE_OFFSETS
        .iter()
        .map(|off| {
            let m = guess_m * (1.0 + off);
            let masses = masses_for(family, m);
            let sys = build_dziobek(&masses);
            (m, multistart_enumerate(&sys, &masses, budget, seed))
        })
        .collect();
    probes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // (seed coordinates, probe mass, score = separation)
    let mut candidates: Vec<(Vec<f64>, f64, f64)> = Vec::new();

    // fold signature: same-mass close pair with opposite det signs; seed
    // from the more symmetric member
    for (m, recs) in &probes {
        for i in 0..recs.len() {
            for j in i + 1..recs.len() {
                let a = &recs[i];
                let b = &recs[j];
                if a.jacobian_det * b.jacobian_det >= 0.0 {
                    continue;
                }
                let d = symmetry::inf_dist(&a.coordinates, &b.coordinates);
                if d > 0.2 {
                    continue;
                }
                let ia = symmetry::isotropy(&a.coordinates, group, 1e-6).order;
                let ib = symmetry::isotropy(&b.coordinates, group, 1e-6).order;
                let pick = if ia >= ib { a } else { b };
                candidates.push((pick.coordinates.clone(), *m, d));
            }
        }
    }

    // pitchfork signature: det sign flip on the matched solution between
    // consecutive probe masses
    for w in probes.windows(2) {
        let (m0, r0) = &w[0];
        let (m1, r1) = &w[1];
        for a in r0 {
            let near = r1
                .iter()
                .filter(|b| symmetry::inf_dist(&a.coordinates, &b.coordinates) < 0.05)
                .min_by(|x, y| {
                    symmetry::inf_dist(&a.coordinates, &x.coordinates)
                        .partial_cmp(&symmetry::inf_dist(&a.coordinates, &y.coordinates))
                        .unwrap()
                });
            if let Some(b) = near {
                if a.jacobian_det * b.jacobian_det < 0.0 {
                    let d = symmetry::inf_dist(&a.coordinates, &b.coordinates);
                    let ia = symmetry::isotropy(&a.coordinates, group, 1e-6).order;
                    let ib = symmetry::isotropy(&b.coordinates, group, 1e-6).order;
                    let (x, m) = if ia >= ib {
                        (a.coordinates.clone(), *m0)
                    } else {
                        (b.coordinates.clone(), *m1)
                    };
                    candidates.push((x, m, d + 1e-6));
                }
            }
        }
    }

    let best = candidates.into_iter().min_by(|a, b| {
        a.2.partial_cmp(&b.2)
            .unwrap()
            .then_with(|| lex_cmp(&a.0, &b.0))
    })?;

    // canonical labeling: prefer the group image fixed by the
    // highest-indexed order-2 element, ties broken lexicographically
    let images: Vec<Vec<f64>> = group
        .elements()
        .filter_map(|gi| symmetry::act(&group.element(gi), &best.0).ok())
        .collect();
    let stab_key = |x: &[f64]| -> usize {
        group
            .elements()
            .filter(|&gi| {
                let g = group.element(gi);
                gi != 0
                    && g.order() == 2
                    && symmetry::act(&g, x)
                        .map(|gx| symmetry::inf_dist(&gx, x) < 1e-6)
                        .unwrap_or(false)
            })
            .max()
            .unwrap_or(0)
    };
    let chosen = images
        .iter()
        .max_by(|a, b| stab_key(a).cmp(&stab_key(b)).then_with(|| lex_cmp(b, a)))
        .cloned()?;
    Some((chosen, best.1))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// The full classify workflow: seed, certify, classify.
pub fn classify_near(cfg: &ClassifyConfig) -> Result<BifurcationCertificate, BifurcationError> {
    let (x0, m_probe) = find_singular_seed(cfg.family, cfg.guess_m, cfg.budget, cfg.seed)
        .ok_or_else(|| {
            BifurcationError::FloatStage("no near-singular seed found around the guess".into())
        })?;
    let sys = symbolic_system(cfg.family);
    let x8: [f64; 8] = x0[..8].try_into().unwrap();
    let sing = locate_singularity(&sys, cfg.family, &x8, m_probe, cfg.precision)?;
    sotomayor_classify(&sys, &sing)
}

pub fn symbolic_system(family: MassPattern) -> PolySystem {
    let one = BigRational::from_integer(1.into());
    match family {
        MassPattern::ThreeEqual => build_dziobek(&MassParams::three_equal(one).unwrap()),
        MassPattern::TwoPairs => build_dziobek(&MassParams::two_pairs(one).unwrap()),
        MassPattern::General => panic!("classification needs a family pattern"),
    }
}
