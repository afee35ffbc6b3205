//! Finite non-degenerate involutive solutions `r(x, y) = (σ_x(y), τ_y(x))`.

use std::fmt;

use thiserror::Error;

use crate::perm::{self, Partition, PermError, Permutation};

/// Which of the two tables an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Sigma,
    Tau,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Table::Sigma => write!(f, "sigma"),
            Table::Tau => write!(f, "tau"),
        }
    }
}

/// Validation and construction failures. Points in witnesses are 0-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionError {
    #[error("solutions need at least two points, got {n}")]
    TooSmall { n: usize },
    #[error("{table} table: expected {expected} rows of degree {expected}, found {found}")]
    Shape { table: Table, expected: usize, found: usize },
    #[error("{table} row {row} is not a bijection")]
    NotBijective { table: Table, row: usize },
    #[error("r is not involutive at ({x}, {y})")]
    Involutivity { x: usize, y: usize },
    #[error("tau_{y}({x}) disagrees with sigma^-1_(sigma_x(y))(x)")]
    TauMismatch { x: usize, y: usize },
    #[error("Yang-Baxter equation fails at ({x}, {y}, {z})")]
    YangBaxter { x: usize, y: usize, z: usize },
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("r does not restrict to the given subset")]
    NotInvariant,
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

/// A validated solution. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Solution {
    sigma: Vec<Permutation>,
    sigma_inv: Vec<Permutation>,
    tau: Vec<Permutation>,
}

/// `τ_y(x) = σ⁻¹_{σ_x(y)}(x)`, the τ-table forced by involutivity.
pub fn tau_from_sigma(sigma: &[Permutation]) -> Result<Vec<Permutation>, SolutionError> {
    check_shape(sigma, Table::Sigma)?;
    let inv: Vec<Permutation> = sigma.iter().map(Permutation::inverse).collect();
    rows_to_permutations(raw_tau_rows(sigma, &inv), Table::Tau)
}

/// Row `y` holds `τ_y`; rows need not be bijective.
fn raw_tau_rows(sigma: &[Permutation], sigma_inv: &[Permutation]) -> Vec<Vec<usize>> {
    let n = sigma.len();
    (0..n).map(|y| (0..n).map(|x| sigma_inv[sigma[x].at(y)].at(x)).collect()).collect()
}

/// Involutivity, the closed form for τ, and the braid relation, in that
/// order. τ rows are plain maps here so that a degenerate τ still yields a
/// witness.
fn check_axioms(sigma: &[Permutation], sigma_inv: &[Permutation], tau: &[Vec<usize>]) -> Result<(), SolutionError> {
    let n = sigma.len();
    let r = |x: usize, y: usize| (sigma[x].at(y), tau[y][x]);
    for x in 0..n {
        for y in 0..n {
            let (u, v) = r(x, y);
            if r(u, v) != (x, y) {
                return Err(SolutionError::Involutivity { x, y });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if tau[y][x] != sigma_inv[sigma[x].at(y)].at(x) {
                return Err(SolutionError::TauMismatch { x, y });
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                // r₁ r₂ r₁ against r₂ r₁ r₂
                let lhs = {
                    let (a0, a1) = r(x, y);
                    let (b0, b1) = r(a1, z);
                    let (c0, c1) = r(a0, b0);
                    (c0, c1, b1)
                };
                let rhs = {
                    let (a0, a1) = r(y, z);
                    let (b0, b1) = r(x, a0);
                    let (c0, c1) = r(b1, a1);
                    (b0, c0, c1)
                };
                if lhs != rhs {
                    return Err(SolutionError::YangBaxter { x, y, z });
                }
            }
        }
    }
    Ok(())
}

fn check_shape(table: &[Permutation], which: Table) -> Result<(), SolutionError> {
    let n = table.len();
    if let Some(bad) = table.iter().find(|p| p.degree() != n) {
        return Err(SolutionError::Shape { table: which, expected: n, found: bad.degree() });
    }
    Ok(())
}

/// Turns raw image rows into permutations, reporting the first bad row.
pub fn rows_to_permutations(rows: Vec<Vec<usize>>, which: Table) -> Result<Vec<Permutation>, SolutionError> {
    let n = rows.len();
    rows.into_iter()
        .enumerate()
        .map(|(row, images)| {
            if images.len() != n {
                return Err(SolutionError::Shape { table: which, expected: n, found: images.len() });
            }
            Permutation::from_images(images).map_err(|_| SolutionError::NotBijective { table: which, row })
        })
        .collect()
}

impl Solution {
    /// Validates a σ/τ pair. Requires at least two points.
    pub fn validate(sigma: Vec<Permutation>, tau: Vec<Permutation>) -> Result<Self, SolutionError> {
        if sigma.len() < 2 {
            return Err(SolutionError::TooSmall { n: sigma.len() });
        }
        Self::validate_any_size(sigma, tau)
    }

    /// As [`Solution::validate`] but admits a single point. Used for
    /// restrictions and retractions.
    pub(crate) fn validate_any_size(sigma: Vec<Permutation>, tau: Vec<Permutation>) -> Result<Self, SolutionError> {
        let n = sigma.len();
        if n == 0 {
            return Err(SolutionError::TooSmall { n });
        }
        check_shape(&sigma, Table::Sigma)?;
        if tau.len() != n {
            return Err(SolutionError::Shape { table: Table::Tau, expected: n, found: tau.len() });
        }
        check_shape(&tau, Table::Tau)?;
        let sigma_inv: Vec<Permutation> = sigma.iter().map(Permutation::inverse).collect();
        let tau_rows: Vec<Vec<usize>> = tau.iter().map(|p| p.images().to_vec()).collect();
        check_axioms(&sigma, &sigma_inv, &tau_rows)?;
        Ok(Solution { sigma, sigma_inv, tau })
    }

    /// Builds a solution from its σ-table, deriving τ.
    pub fn from_sigma(sigma: Vec<Permutation>) -> Result<Self, SolutionError> {
        if sigma.len() < 2 {
            return Err(SolutionError::TooSmall { n: sigma.len() });
        }
        Self::from_sigma_any_size(sigma)
    }

    pub(crate) fn from_sigma_any_size(sigma: Vec<Permutation>) -> Result<Self, SolutionError> {
        if sigma.is_empty() {
            return Err(SolutionError::TooSmall { n: 0 });
        }
        check_shape(&sigma, Table::Sigma)?;
        let sigma_inv: Vec<Permutation> = sigma.iter().map(Permutation::inverse).collect();
        let tau_rows = raw_tau_rows(&sigma, &sigma_inv);
        check_axioms(&sigma, &sigma_inv, &tau_rows)?;
        let tau = rows_to_permutations(tau_rows, Table::Tau)?;
        Ok(Solution { sigma, sigma_inv, tau })
    }

    /// Builds a solution from 0-based σ image rows.
    pub fn from_sigma_rows(rows: Vec<Vec<usize>>) -> Result<Self, SolutionError> {
        Self::from_sigma(rows_to_permutations(rows, Table::Sigma)?)
    }

    /// The shift solution on `Z/p`: `r(a, b) = (b - 1, a + 1)`.
    pub fn shift(p: usize) -> Result<Self, SolutionError> {
        if p < 2 {
            return Err(SolutionError::TooSmall { n: p });
        }
        let down = Permutation::from_images_unchecked((0..p).map(|b| (b + p - 1) % p).collect());
        let up = down.inverse();
        Self::validate(vec![down; p], vec![up; p])
    }

    /// `r(x, y) = (y, x)`.
    pub fn trivial(n: usize) -> Result<Self, SolutionError> {
        if n < 2 {
            return Err(SolutionError::TooSmall { n });
        }
        let id = Permutation::identity(n);
        Self::validate(vec![id.clone(); n], vec![id; n])
    }

    /// Disjoint union in which points from different parts swap trivially.
    /// Points of `b` are shifted by `a.n()`.
    pub fn disjoint_union(a: &Solution, b: &Solution) -> Result<Self, SolutionError> {
        let (na, nb) = (a.n(), b.n());
        let n = na + nb;
        let sigma = (0..n)
            .map(|x| {
                let images = (0..n)
                    .map(|y| match (x < na, y < na) {
                        (true, true) => a.sigma(x).at(y),
                        (false, false) => na + b.sigma(x - na).at(y - na),
                        _ => y,
                    })
                    .collect();
                Permutation::from_images_unchecked(images)
            })
            .collect();
        Self::from_sigma(sigma)
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    /// True for the one-point solutions produced by restriction or
    /// retraction.
    pub fn is_singleton(&self) -> bool {
        self.n() == 1
    }

    pub fn sigma(&self, x: usize) -> &Permutation {
        &self.sigma[x]
    }

    pub fn sigma_inv(&self, x: usize) -> &Permutation {
        &self.sigma_inv[x]
    }

    pub fn tau(&self, y: usize) -> &Permutation {
        &self.tau[y]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.sigma
    }

    pub fn taus(&self) -> &[Permutation] {
        &self.tau
    }

    #[inline]
    pub fn r(&self, x: usize, y: usize) -> (usize, usize) {
        (self.sigma[x].at(y), self.tau[y].at(x))
    }

    /// The diagonal map `T(x) = τ_x⁻¹(x)`.
    pub fn diagonal(&self) -> Permutation {
        let n = self.n();
        let mut images = vec![0; n];
        // τ_x(T(x)) = x
        for x in 0..n {
            let tx = self.tau[x].inverse().at(x);
            images[x] = tx;
        }
        Permutation::from_images_unchecked(images)
    }

    /// `U(x) = σ_x⁻¹(x)`, the inverse of the diagonal map.
    pub fn inverse_diagonal(&self) -> Permutation {
        Permutation::from_images_unchecked((0..self.n()).map(|x| self.sigma_inv[x].at(x)).collect())
    }

    pub fn t_partition(&self) -> Partition {
        self.diagonal().cycle_type()
    }

    pub fn is_square_free(&self) -> bool {
        (0..self.n()).all(|x| self.sigma[x].at(x) == x)
    }

    /// Orbits of the permutation group generated by the σ's.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        perm::orbits(&self.sigma, self.n()).expect("sigma rows have degree n")
    }

    pub fn is_decomposable(&self) -> bool {
        self.orbits().len() > 1
    }

    /// Primitivity of the σ-group action; an error for decomposable
    /// solutions.
    pub fn is_primitive(&self) -> Result<bool, PermError> {
        perm::is_primitive(&self.sigma, self.n())
    }

    /// The solution induced on an `r`-invariant subset, relabelled
    /// `0..|Y|` in increasing order.
    pub fn restrict(&self, subset: &[usize]) -> Result<Solution, SolutionError> {
        let n = self.n();
        let mut ys = subset.to_vec();
        ys.sort_unstable();
        ys.dedup();
        if ys.is_empty() {
            return Err(SolutionError::TooSmall { n: 0 });
        }
        let mut label = vec![usize::MAX; n];
        for (i, &y) in ys.iter().enumerate() {
            if y >= n {
                return Err(SolutionError::PointOutOfRange(y));
            }
            label[y] = i;
        }
        for &x in &ys {
            for &y in &ys {
                let (u, v) = self.r(x, y);
                if label[u] == usize::MAX || label[v] == usize::MAX {
                    return Err(SolutionError::NotInvariant);
                }
            }
        }
        let relabel = |table: &[Permutation]| -> Vec<Permutation> {
            ys.iter()
                .map(|&x| Permutation::from_images_unchecked(ys.iter().map(|&y| label[table[x].at(y)]).collect()))
                .collect()
        };
        Self::validate_any_size(relabel(&self.sigma), relabel(&self.tau))
    }

    /// Identifies points with equal σ rows.
    pub fn retract(&self) -> Result<RetractionResult, SolutionError> {
        let n = self.n();
        let mut class_map = vec![0; n];
        let mut reps: Vec<usize> = Vec::new();
        for x in 0..n {
            match reps.iter().position(|&r| self.sigma[r] == self.sigma[x]) {
                Some(c) => class_map[x] = c,
                None => {
                    class_map[x] = reps.len();
                    reps.push(x);
                }
            }
        }
        let m = reps.len();
        let quotient_rows: Vec<Vec<usize>> =
            reps.iter().map(|&r| reps.iter().map(|&y| class_map[self.sigma[r].at(y)]).collect()).collect();
        for x in 0..n {
            for y in 0..n {
                if quotient_rows[class_map[x]][class_map[y]] != class_map[self.sigma[x].at(y)] {
                    return Err(SolutionError::Inconsistent(format!("retraction not well defined at ({x}, {y})")));
                }
            }
        }
        let sigma = rows_to_permutations(quotient_rows, Table::Sigma)
            .map_err(|e| SolutionError::Inconsistent(format!("retraction: {e}")))?;
        let quotient =
            Self::from_sigma_any_size(sigma).map_err(|e| SolutionError::Inconsistent(format!("retraction: {e}")))?;
        debug_assert_eq!(quotient.n(), m);
        Ok(RetractionResult { quotient, class_map })
    }

    /// The image of `self` under the relabelling `φ`:
    /// `σ'_{φ(x)} = φ σ_x φ⁻¹`.
    pub fn relabel(&self, phi: &Permutation) -> Result<Solution, SolutionError> {
        if phi.degree() != self.n() {
            return Err(SolutionError::Shape { table: Table::Sigma, expected: self.n(), found: phi.degree() });
        }
        let phi_inv = phi.inverse();
        let sigma = (0..self.n())
            .map(|x| {
                let src = phi_inv.at(x);
                &(phi * &self.sigma[src]) * &phi_inv
            })
            .collect();
        Self::from_sigma_any_size(sigma)
    }

    /// A bijection `φ` with `other.σ_{φ(x)} = φ σ_x φ⁻¹` for all `x`, if one
    /// exists. τ-compatibility follows since τ is determined by σ.
    pub fn is_isomorphic(&self, other: &Solution) -> Option<Permutation> {
        let n = self.n();
        if other.n() != n {
            return None;
        }
        let types_a: Vec<Partition> = self.sigma.iter().map(Permutation::cycle_type).collect();
        let types_b: Vec<Partition> = other.sigma.iter().map(Permutation::cycle_type).collect();
        let mut sorted_a = types_a.clone();
        let mut sorted_b = types_b.clone();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b || self.t_partition() != other.t_partition() {
            return None;
        }
        let mut iso =
            IsoSearch { a: self, b: other, types_a, types_b, phi: vec![usize::MAX; n], phi_inv: vec![usize::MAX; n] };
        if iso.extend(0) {
            Some(Permutation::from_images_unchecked(iso.phi))
        } else {
            None
        }
    }
}

struct IsoSearch<'a> {
    a: &'a Solution,
    b: &'a Solution,
    types_a: Vec<Partition>,
    types_b: Vec<Partition>,
    phi: Vec<usize>,
    phi_inv: Vec<usize>,
}

impl IsoSearch<'_> {
    fn extend(&mut self, x: usize) -> bool {
        let n = self.a.n();
        if x == n {
            return true;
        }
        for y in 0..n {
            if self.phi_inv[y] != usize::MAX || self.types_a[x] != self.types_b[y] {
                continue;
            }
            self.phi[x] = y;
            self.phi_inv[y] = x;
            if self.consistent(x) && self.extend(x + 1) {
                return true;
            }
            self.phi[x] = usize::MAX;
            self.phi_inv[y] = usize::MAX;
        }
        false
    }

    /// Checks `φ(σ_u(v)) = σ'_{φ(u)}(φ(v))` on every assigned pair touching
    /// the new point `x`, in both directions.
    fn consistent(&self, x: usize) -> bool {
        for u in 0..=x {
            for v in 0..=x {
                if u != x && v != x {
                    continue;
                }
                let img_a = self.a.sigma(u).at(v);
                let img_b = self.b.sigma(self.phi[u]).at(self.phi[v]);
                let mapped = self.phi[img_a];
                if mapped != usize::MAX && mapped != img_b {
                    return false;
                }
                let pre = self.phi_inv[img_b];
                if pre != usize::MAX && pre != img_a {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution").field("n", &self.n()).field("sigma", &self.sigma).finish()
    }
}

/// The retraction together with the point-to-class map.
#[derive(Clone, Debug)]
pub struct RetractionResult {
    pub quotient: Solution,
    /// Classes are numbered in order of first occurrence.
    pub class_map: Vec<usize>,
}

impl RetractionResult {
    pub fn class_count(&self) -> usize {
        self.quotient.n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn s8_validates_and_t2_validates() {
        let s8 = fixtures::s8();
        assert_eq!(s8.n(), 8);
        assert!(Solution::trivial(2).is_ok());
    }

    #[test]
    fn swapped_rows_fail_ybe_with_witness() {
        let s8 = fixtures::s8();
        let mut sigma = s8.sigmas().to_vec();
        sigma.swap(0, 1);
        let err = Solution::from_sigma(sigma.clone()).unwrap_err();
        let SolutionError::YangBaxter { x, y, z } = err else {
            panic!("expected a Yang-Baxter failure, got {err:?}");
        };
        // replay the witness by hand with the closed-form tau
        let inv: Vec<Permutation> = sigma.iter().map(Permutation::inverse).collect();
        let r = |a: usize, b: usize| {
            let u = sigma[a].at(b);
            (u, inv[u].at(a))
        };
        let lhs = {
            let (a0, a1) = r(x, y);
            let (b0, b1) = r(a1, z);
            let (c0, c1) = r(a0, b0);
            (c0, c1, b1)
        };
        let rhs = {
            let (a0, a1) = r(y, z);
            let (b0, b1) = r(x, a0);
            let (c0, c1) = r(b1, a1);
            (b0, c0, c1)
        };
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn errors_are_specific() {
        let bad = vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 1]];
        assert_eq!(Solution::from_sigma_rows(bad), Err(SolutionError::NotBijective { table: Table::Sigma, row: 2 }));
        assert_eq!(Solution::from_sigma_rows(vec![vec![0]]), Err(SolutionError::TooSmall { n: 1 }));
        let id = Permutation::identity(2);
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        // trivial sigma with a non-trivial tau is not involutive
        assert_eq!(
            Solution::validate(vec![id.clone(), id.clone()], vec![swap.clone(), swap]),
            Err(SolutionError::Involutivity { x: 0, y: 0 })
        );
    }

    #[test]
    fn tau_from_sigma_examples() {
        let id = Permutation::identity(3);
        assert!(tau_from_sigma(&vec![id.clone(); 3]).unwrap().iter().all(Permutation::is_identity));
        let z3 = Solution::shift(3).unwrap();
        let tau = tau_from_sigma(z3.sigmas()).unwrap();
        for y in 0..3 {
            for x in 0..3 {
                assert_eq!(tau[y].at(x), (x + 1) % 3);
            }
        }
        let s8 = fixtures::s8();
        assert_eq!(tau_from_sigma(s8.sigmas()).unwrap(), s8.taus());
    }

    #[test]
    fn diagonal_examples() {
        let s8 = fixtures::s8();
        // computed from the sigma-table: 3 -> 8 -> 7 -> ... -> 4 -> 3
        let t = Permutation::from_cycles(8, &[&[0, 1], &[2, 7, 6, 5, 4, 3]]).unwrap();
        assert_eq!(s8.diagonal(), t);
        assert_eq!(s8.inverse_diagonal(), t.inverse());
        assert!(Solution::trivial(4).unwrap().diagonal().is_identity());
        let z5 = Solution::shift(5).unwrap();
        assert!((0..5).all(|x| z5.diagonal().at(x) == (x + 4) % 5));
        for s in [s8, z5] {
            assert!((&s.diagonal() * &s.inverse_diagonal()).is_identity());
        }
    }

    #[test]
    fn t_partition_and_square_free() {
        assert_eq!(fixtures::s8().t_partition(), Partition::from_parts(vec![6, 2]));
        assert_eq!(Solution::trivial(3).unwrap().t_partition(), Partition::from_parts(vec![1, 1, 1]));
        assert_eq!(Solution::shift(5).unwrap().t_partition(), Partition::from_parts(vec![5]));
        assert!(Solution::trivial(3).unwrap().is_square_free());
        assert!(!Solution::shift(5).unwrap().is_square_free());
        assert!(!fixtures::s8().is_square_free());
    }

    #[test]
    fn decomposability() {
        assert!(!fixtures::s8().is_decomposable());
        assert!(Solution::trivial(2).unwrap().is_decomposable());
        assert!(!Solution::shift(7).unwrap().is_decomposable());
    }

    #[test]
    fn restrict_examples() {
        let t3 = Solution::trivial(3).unwrap();
        let one = t3.restrict(&[0]).unwrap();
        assert!(one.is_singleton());
        let s8 = fixtures::s8();
        assert_eq!(s8.restrict(&(0..8).collect::<Vec<_>>()).unwrap(), s8);
        let u = fixtures::z2_plus_z3();
        let orbits = u.orbits();
        assert_eq!(orbits, vec![vec![0, 1], vec![2, 3, 4]]);
        assert_eq!(u.restrict(&orbits[0]).unwrap(), Solution::shift(2).unwrap());
        assert_eq!(u.restrict(&orbits[1]).unwrap(), Solution::shift(3).unwrap());
        assert_eq!(u.restrict(&[0, 2]), Err(SolutionError::NotInvariant));
    }

    #[test]
    fn retract_examples() {
        let z5 = Solution::shift(5).unwrap().retract().unwrap();
        assert_eq!(z5.class_count(), 1);
        assert!(z5.quotient.is_singleton());
        let s8 = fixtures::s8();
        let ret = s8.retract().unwrap();
        assert_eq!(ret.class_map, (0..8).collect::<Vec<_>>());
        assert_eq!(ret.quotient, s8);
        assert_eq!(Solution::trivial(4).unwrap().retract().unwrap().class_count(), 1);
    }

    #[test]
    fn isomorphism_examples() {
        let s8 = fixtures::s8();
        assert_eq!(s8.is_isomorphic(&s8), Some(Permutation::identity(8)));
        let z3 = Solution::shift(3).unwrap();
        let phi = Permutation::from_images(vec![2, 0, 1]).unwrap();
        let relabelled = z3.relabel(&phi).unwrap();
        let found = z3.is_isomorphic(&relabelled).unwrap();
        for x in 0..3 {
            assert_eq!(relabelled.sigma(found.at(x)), &(&(&found * z3.sigma(x)) * &found.inverse()));
        }
        assert!(s8.is_isomorphic(&Solution::trivial(8).unwrap()).is_none());
        assert!(z3.is_isomorphic(&Solution::shift(4).unwrap()).is_none());
    }

    #[test]
    fn shift_and_trivial_constructors() {
        assert_eq!(Solution::shift(1), Err(SolutionError::TooSmall { n: 1 }));
        assert_eq!(Solution::trivial(0), Err(SolutionError::TooSmall { n: 0 }));
        let z2 = Solution::shift(2).unwrap();
        assert_eq!(z2.sigma(0).images(), &[1, 0]);
        let t3 = Solution::trivial(3).unwrap();
        assert!(t3.is_square_free() && t3.is_decomposable());
    }

    #[test]
    fn diagonal_fixes_pairs_and_conjugates_sigma_to_tau() {
        for s in fixtures::all() {
            let t = s.diagonal();
            for x in 0..s.n() {
                assert_eq!(s.r(t.at(x), x), (t.at(x), x));
                assert_eq!(&t * s.sigma(x), &s.tau(x).inverse() * &t);
            }
        }
    }
}
