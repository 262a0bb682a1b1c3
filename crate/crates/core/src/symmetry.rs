//! Finite group actions on equation space: the dihedral group D₆ for three
//! equal masses and the Klein four-group for two pairs, with equivariance
//! checks, isotropy computation and orbit deduplication.

use crate::polysys::{PolySystem, SystemKind};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, Hash)]
pub enum Group {
    D6,
    Klein4,
}

impl Group {
    pub fn order(self) -> usize {
        match self {
            Group::D6 => 6,
            Group::Klein4 => 4,
        }
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        0..self.order()
    }

    pub fn element(self, index: usize) -> GroupElement {
        GroupElement::new(self, index)
    }

    /// Subgroups listed by the source material, largest first.
    pub fn listed_subgroups(self) -> Vec<Subgroup> {
        match self {
            Group::D6 => vec![
                Subgroup { group: self, members: vec![0, 1, 2, 3, 4, 5] },
                Subgroup { group: self, members: vec![0, 4, 5] },
                Subgroup { group: self, members: vec![0, 1] },
                Subgroup { group: self, members: vec![0, 2] },
                Subgroup { group: self, members: vec![0, 3] },
                Subgroup { group: self, members: vec![0] },
            ],
            Group::Klein4 => vec![
                Subgroup { group: self, members: vec![0, 1, 2, 3] },
                Subgroup { group: self, members: vec![0, 1] },
                Subgroup { group: self, members: vec![0, 2] },
                Subgroup { group: self, members: vec![0, 3] },
                Subgroup { group: self, members: vec![0] },
            ],
        }
    }
}

/// Cayley table of D₆: entry [g][h] = g∘h, indices E, g₁..g₅.
const D6_TABLE: [[usize; 6]; 6] = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 4, 5, 2, 3],
    [2, 5, 0, 4, 3, 1],
    [3, 4, 5, 0, 1, 2],
    [4, 3, 1, 2, 5, 0],
    [5, 2, 3, 1, 0, 4],
];

/// Cayley table of the Klein four-group, indices E, h₁, h₂, h₃.
const KLEIN_TABLE: [[usize; 4]; 4] = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
];

/// Coordinate permutations π of the six mutual distances
/// (r₁₂, r₁₃, r₁₄, r₂₃, r₂₄, r₃₄): (Φ_g x)[s] = x[π[s]].
const D6_AC_PERM: [[usize; 6]; 6] = [
    [0, 1, 2, 3, 4, 5],
    [1, 0, 2, 3, 5, 4],
    [3, 1, 5, 0, 4, 2],
    [0, 3, 4, 1, 2, 5],
    [1, 3, 5, 0, 2, 4],
    [3, 0, 4, 1, 5, 2],
];

const KLEIN_AC_PERM: [[usize; 6]; 4] = [
    [0, 1, 2, 3, 4, 5],
    [0, 3, 4, 1, 2, 5],
    [0, 2, 1, 4, 3, 5],
    [0, 4, 3, 2, 1, 5],
];

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct GroupElement {
    pub group: Group,
    pub index: usize,
}

impl GroupElement {
    pub fn new(group: Group, index: usize) -> Self {
        assert!(index < group.order());
        GroupElement { group, index }
    }

    pub fn identity(group: Group) -> Self {
        GroupElement { group, index: 0 }
    }

    pub fn label(&self) -> String {
        match (self.group, self.index) {
            (_, 0) => "E".into(),
            (Group::D6, k) => format!("g{k}"),
            (Group::Klein4, k) => format!("h{k}"),
        }
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.group, other.group);
        let idx = match self.group {
            Group::D6 => D6_TABLE[self.index][other.index],
            Group::Klein4 => KLEIN_TABLE[self.index][other.index],
        };
        GroupElement { group: self.group, index: idx }
    }

    pub fn order(&self) -> usize {
        let mut g = *self;
        let mut n = 1;
        while g.index != 0 {
            g = g.compose(self);
            n += 1;
        }
        n
    }

    /// Permutation of the 6 distance coordinates.
    pub fn ac_permutation(&self) -> [usize; 6] {
        match self.group {
            Group::D6 => D6_AC_PERM[self.index],
            Group::Klein4 => KLEIN_AC_PERM[self.index],
        }
    }

    /// Permutation of the 8 Dziobek coordinates; λ₀ and μ are always fixed.
    pub fn dziobek_permutation(&self) -> [usize; 8] {
        let p = self.ac_permutation();
        let mut out = [0usize; 8];
        out[1] = 1;
        for s in 0..6 {
            out[2 + s] = 2 + p[s];
        }
        out
    }

    pub fn permutation(&self, dim: usize) -> Result<Vec<usize>, SymmetryError> {
        match dim {
            6 => Ok(self.ac_permutation().to_vec()),
            8 => Ok(self.dziobek_permutation().to_vec()),
            _ => Err(SymmetryError::DimensionMismatch(dim)),
        }
    }
}

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("configuration dimension {0} is not 6 (AC) or 8 (Dziobek)")]
    DimensionMismatch(usize),
    #[error("system mass pattern does not match the group")]
    PatternMismatch,
}

/// Applies the group action to a configuration of dimension 6 or 8.
pub fn act<T: Clone>(g: &GroupElement, x: &[T]) -> Result<Vec<T>, SymmetryError> {
    let perm = g.permutation(x.len())?;
    Ok(perm.iter().map(|&src| x[src].clone()).collect())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    pub group: Group,
    pub members: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn label(&self) -> String {
        match (self.group, self.members.as_slice()) {
            (Group::D6, [0, 1, 2, 3, 4, 5]) => "D6".into(),
            (Group::Klein4, [0, 1, 2, 3]) => "Klein4".into(),
            (_, [0]) => "trivial".into(),
            (g, ms) => {
                let names: Vec<String> =
                    ms.iter().map(|&i| GroupElement::new(g, i).label()).collect();
                format!("{{{}}}", names.join(","))
            }
        }
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct IsotropyTag {
    pub subgroup: String,
    pub order: usize,
    pub tol: f64,
}

impl fmt::Display for IsotropyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.subgroup)
    }
}

/// Largest listed subgroup all of whose elements fix `x` within `tol` in the
/// ∞-norm.
pub fn isotropy(x: &[f64], group: Group, tol: f64) -> IsotropyTag {
    let fixed: Vec<usize> = group
        .elements()
        .filter(|&i| {
            let g = group.element(i);
            match act(&g, x) {
                Ok(gx) => inf_dist(&gx, x) <= tol,
                Err(_) => false,
            }
        })
        .collect();
    for sub in group.listed_subgroups() {
        if sub.members.iter().all(|m| fixed.contains(m)) {
            return IsotropyTag { subgroup: sub.label(), order: sub.order(), tol };
        }
    }
    IsotropyTag { subgroup: "trivial".into(), order: 1, tol }
}

pub fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct OrbitRep {
    pub representative: Vec<f64>,
    /// Number of distinct group images of the representative.
    pub orbit_size: usize,
    /// How many of the input solutions fell into this orbit.
    pub input_members: usize,
    pub isotropy: IsotropyTag,
}

/// Partitions solutions into group orbits. The representative is the
/// lexicographically smallest member seen; the orbit size is the number of
/// distinct images under the full group, so orbit size × isotropy order =
/// group order.
pub fn orbit_dedup(solutions: &[Vec<f64>], group: Group, tol: f64) -> Vec<OrbitRep> {
    let mut orbits: Vec<(Vec<Vec<f64>>, usize)> = Vec::new(); // (images of rep, member count)
    let mut reps: Vec<Vec<f64>> = Vec::new();
    'next: for sol in solutions {
        for (k, (images, members)) in orbits.iter_mut().enumerate() {
            if images.iter().any(|im| inf_dist(im, sol) <= tol) {
                *members += 1;
                if lex_less(sol, &reps[k]) {
                    reps[k] = sol.clone();
                }
                continue 'next;
            }
        }
        let mut images: Vec<Vec<f64>> = Vec::new();
        for gi in group.elements() {
            if let Ok(gx) = act(&group.element(gi), sol) {
                if !images.iter().any(|im| inf_dist(im, &gx) <= tol) {
                    images.push(gx);
                }
            }
        }
        orbits.push((images, 1));
        reps.push(sol.clone());
    }
    reps.into_iter()
        .zip(orbits)
        .map(|(rep, (images, members))| {
            let iso = isotropy(&rep, group, tol);
            OrbitRep {
                representative: rep,
                orbit_size: images.len(),
                input_members: members,
                isotropy: iso,
            }
        })
        .collect()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct EquivarianceReport {
    /// For each group element, the induced permutation of equations
    /// (Π_g with F∘Φ_g = Π_g∘F), when the system is equivariant.
    pub equation_permutations: Vec<(String, Vec<usize>)>,
    /// Offending (element label, equation index) pairs, empty when equivariant.
    pub failures: Vec<(String, usize)>,
}

impl EquivarianceReport {
    pub fn is_equivariant(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Symbolic equivariance check: for each g, F_i ∘ Φ_g must equal some F_j
/// exactly as polynomials. Returns the equation permutation for each element.
pub fn check_equivariance(system: &PolySystem, group: Group) -> EquivarianceReport {
    let dim = system.n_coords;
    let arity = system.arity();
    let mut permutations = Vec::new();
    let mut failures = Vec::new();
    for gi in group.elements() {
        let g = group.element(gi);
        let coord_perm = match g.permutation(dim) {
            Ok(p) => p,
            Err(_) => {
                failures.push((g.label(), usize::MAX));
                continue;
            }
        };
        // variable rename map: occurrences of variable s become variable π(s)
        let mut map: Vec<u32> = (0..arity).collect();
        let offset = match system.kind {
            SystemKind::Dziobek => 0,
            SystemKind::Ac => 0,
        };
        for (s, &src) in coord_perm.iter().enumerate() {
            map[offset + s] = (offset + src) as u32;
        }
        let mut perm = vec![usize::MAX; system.equations.len()];
        for (i, f) in system.equations.iter().enumerate() {
            let composed = f.permute_vars(&map);
            match system.equations.iter().position(|h| *h == composed) {
                Some(j) => perm[i] = j,
                None => failures.push((g.label(), i)),
            }
        }
        if perm.iter().all(|&j| j != usize::MAX) {
            permutations.push((g.label(), perm));
        }
    }
    EquivarianceReport { equation_permutations: permutations, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::{build_ac, build_dziobek, MassParams};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_acts_trivially() {
        let x: Vec<f64> = (0..8).map(|k| k as f64).collect();
        let e = GroupElement::identity(Group::D6);
        assert_eq!(act(&e, &x).unwrap(), x);
    }

    #[test]
    fn g1_action_matches_definition() {
        // Φ_{g₁}(λ₀, μ, a, b, c, d, e, f) = (λ₀, μ, b, a, c, d, f, e)
        let x = vec![10.0, 20.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let g1 = GroupElement::new(Group::D6, 1);
        assert_eq!(
            act(&g1, &x).unwrap(),
            vec![10.0, 20.0, 2.0, 1.0, 3.0, 4.0, 6.0, 5.0]
        );
    }

    #[test]
    fn action_respects_cayley_table() {
        // Φ_{g} ∘ Φ_{h} must equal Φ_{g∘h} on random points, for both groups.
        let x: Vec<f64> = vec![0.3, 1.7, 0.9, 2.4, 1.1, 3.3];
        for group in [Group::D6, Group::Klein4] {
            for gi in group.elements() {
                for hi in group.elements() {
                    let g = group.element(gi);
                    let h = group.element(hi);
                    let lhs = act(&g, &act(&h, &x).unwrap()).unwrap();
                    let rhs = act(&g.compose(&h), &x).unwrap();
                    assert_eq!(lhs, rhs, "{} ∘ {}", g.label(), h.label());
                }
            }
        }
    }

    #[test]
    fn g4_squared_is_g5() {
        let g4 = GroupElement::new(Group::D6, 4);
        assert_eq!(g4.compose(&g4).index, 5);
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let twice = act(&g4, &act(&g4, &x).unwrap()).unwrap();
        let g5 = GroupElement::new(Group::D6, 5);
        assert_eq!(twice, act(&g5, &x).unwrap());
    }

    #[test]
    fn act_is_inf_norm_isometry() {
        let x = vec![0.1, 0.5, 0.9, 1.3, 1.7, 2.1];
        let y = vec![0.2, 0.4, 1.0, 1.1, 1.9, 2.0];
        for gi in Group::D6.elements() {
            let g = Group::D6.element(gi);
            let gx = act(&g, &x).unwrap();
            let gy = act(&g, &y).unwrap();
            assert!((inf_dist(&gx, &gy) - inf_dist(&x, &y)).abs() < 1e-15);
        }
    }

    #[test]
    fn dziobek_three_equal_is_d6_equivariant() {
        let sys = build_dziobek(&MassParams::three_equal(q(1, 1)).unwrap());
        let rep = check_equivariance(&sys, Group::D6);
        assert!(rep.is_equivariant(), "failures: {:?}", rep.failures);
        assert_eq!(rep.equation_permutations.len(), 6);
        // λ₀- and S-equations are fixed by every element
        for (_, perm) in &rep.equation_permutations {
            assert_eq!(perm[0], 0);
            assert_eq!(perm[1], 1);
        }
    }

    #[test]
    fn generic_masses_break_equivariance() {
        let sys = build_dziobek(
            &MassParams::general([q(1, 1), q(2, 1), q(3, 1), q(4, 1)]).unwrap(),
        );
        let rep = check_equivariance(&sys, Group::D6);
        assert!(!rep.is_equivariant());
    }

    #[test]
    fn ac_two_pairs_is_klein4_equivariant() {
        let sys = build_ac(&MassParams::two_pairs(q(1, 1)).unwrap());
        let rep = check_equivariance(&sys, Group::Klein4);
        assert!(rep.is_equivariant(), "failures: {:?}", rep.failures);
    }

    #[test]
    fn dziobek_two_pairs_is_klein4_equivariant() {
        let sys = build_dziobek(&MassParams::two_pairs(q(1, 1)).unwrap());
        let rep = check_equivariance(&sys, Group::Klein4);
        assert!(rep.is_equivariant(), "failures: {:?}", rep.failures);
    }

    #[test]
    fn isotropy_of_symmetric_points() {
        // equilateral family point: full D₆ symmetry
        let x = crate::polysys::equilateral_dziobek_point(1.3).unwrap();
        let tag = isotropy(&x, Group::D6, 1e-9);
        assert_eq!(tag.subgroup, "D6");
        // pitchfork pattern r₁₃ = r₂₃, r₁₄ = r₂₄: {E, g₃}
        let y = vec![4.0, 0.7, 1.01, 0.57, 0.99, 0.57, 0.99, 0.58];
        assert_eq!(isotropy(&y, Group::D6, 1e-9).subgroup, "{E,g3}");
        // generic point: trivial
        let z = vec![4.0, 0.7, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5];
        assert_eq!(isotropy(&z, Group::D6, 1e-9).subgroup, "trivial");
    }

    #[test]
    fn orbit_dedup_counts() {
        // equilateral point: orbit of size 1
        let x = crate::polysys::equilateral_dziobek_point(1.0).unwrap().to_vec();
        let reps = orbit_dedup(&[x.clone()], Group::D6, 1e-9);
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].orbit_size, 1);
        // free orbit: 6 distinct images, one representative
        let y = vec![4.0, 0.7, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5];
        let mut all = Vec::new();
        for gi in Group::D6.elements() {
            all.push(act(&Group::D6.element(gi), &y).unwrap());
        }
        let reps = orbit_dedup(&all, Group::D6, 1e-9);
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].orbit_size, 6);
        assert_eq!(reps[0].input_members, 6);
        // orbit-stabilizer identity
        assert_eq!(reps[0].orbit_size * reps[0].isotropy.order, 6);
    }
}
