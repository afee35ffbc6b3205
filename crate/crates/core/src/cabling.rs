//! Cabling `r ↦ r^(k)`.
//!
//! Two independent routes are provided. [`cable`] evaluates the closed
//! formula
//!
//! ```text
//! r^(k)(x, y) = (σ_{kx}(y), T^{k-1} τ_{ky} T^{-(k-1)}(x))
//! ```
//!
//! where `kx` is the frozen word `x U(x) … U^{k-1}(x)`. [`cable_oracle`]
//! instead pushes two frozen words through `r_{k,k}`, one adjacent swap at a
//! time, and reads the answer off the output words. The word-action
//! conventions of [`sigma_word`] and [`tau_word`] are the ones that make the
//! two routes agree.

use thiserror::Error;

use crate::perm::Permutation;
use crate::solution::{Solution, SolutionError};

/// Largest `k` handled by a single cabling step. Larger values are split
/// into prime factors and cabled iteratively.
pub const MAX_CABLE_STEP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CablingError {
    #[error("cabling parameter must be at least 1")]
    ZeroLength,
    #[error("cabling parameter {k} has a prime factor above {}", MAX_CABLE_STEP)]
    TooLarge { k: usize },
    #[error("output word for ({x}, {y}) is not frozen")]
    NotFrozen { x: usize, y: usize },
    #[error("cabled tables failed validation: {0}")]
    Inconsistent(SolutionError),
}

/// The tuple `x U(x) U²(x) … U^{k-1}(x)` representing `kx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrozenWord {
    letters: Vec<usize>,
}

impl FrozenWord {
    pub fn base(&self) -> usize {
        self.letters[0]
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }
}

fn word_letters(s: &Solution, x: usize, k: usize) -> Vec<usize> {
    let mut letters = Vec::with_capacity(k);
    let mut z = x;
    for _ in 0..k {
        letters.push(z);
        z = s.sigma_inv(z).at(z);
    }
    letters
}

pub fn frozen_word(s: &Solution, x: usize, k: usize) -> Result<FrozenWord, CablingError> {
    if k == 0 {
        return Err(CablingError::ZeroLength);
    }
    Ok(FrozenWord { letters: word_letters(s, x, k) })
}

/// True iff `r` fixes every pair of adjacent letters.
pub fn is_frozen(s: &Solution, tuple: &[usize]) -> bool {
    tuple.windows(2).all(|w| s.r(w[0], w[1]) == (w[0], w[1]))
}

/// `σ_{kx} = σ_x ∘ σ_{U(x)} ∘ … ∘ σ_{U^{k-1}(x)}`.
pub fn sigma_word(s: &Solution, k: usize, x: usize) -> Result<Permutation, CablingError> {
    if k == 0 {
        return Err(CablingError::ZeroLength);
    }
    let mut acc = Permutation::identity(s.n());
    for z in word_letters(s, x, k) {
        acc = &acc * s.sigma(z);
    }
    Ok(acc)
}

/// `τ_{ky}` as a right action: `τ_y` acts first, `τ_{U^{k-1}(y)}` last.
pub fn tau_word(s: &Solution, k: usize, y: usize) -> Result<Permutation, CablingError> {
    if k == 0 {
        return Err(CablingError::ZeroLength);
    }
    let mut acc = Permutation::identity(s.n());
    for z in word_letters(s, y, k) {
        acc = s.tau(z) * &acc;
    }
    Ok(acc)
}

fn prime_factors(mut k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= k {
        while k.is_multiple_of(p) {
            out.push(p);
            k /= p;
        }
        p += 1;
    }
    if k > 1 {
        out.push(k);
    }
    out
}

/// The `k`-cabled solution via the closed formula. The result is validated.
pub fn cable(s: &Solution, k: usize) -> Result<Solution, CablingError> {
    if k == 0 {
        return Err(CablingError::ZeroLength);
    }
    if k > MAX_CABLE_STEP {
        let factors = prime_factors(k);
        if factors.iter().any(|&p| p > MAX_CABLE_STEP) {
            return Err(CablingError::TooLarge { k });
        }
        return factors.into_iter().try_fold(s.clone(), |acc, p| cable_step(&acc, p));
    }
    cable_step(s, k)
}

fn cable_step(s: &Solution, k: usize) -> Result<Solution, CablingError> {
    let n = s.n();
    let t_pow = s.diagonal().pow(k as i64 - 1);
    let t_pow_inv = t_pow.inverse();
    let sigma = (0..n).map(|x| sigma_word(s, k, x)).collect::<Result<Vec<_>, _>>()?;
    let tau =
        (0..n).map(|y| Ok(&(&t_pow * &tau_word(s, k, y)?) * &t_pow_inv)).collect::<Result<Vec<_>, CablingError>>()?;
    Solution::validate_any_size(sigma, tau).map_err(CablingError::Inconsistent)
}

/// Applies `r` at 0-based positions `(i, i + 1)`.
fn apply_r_at(s: &Solution, word: &mut [usize], i: usize) {
    let (u, v) = s.r(word[i], word[i + 1]);
    word[i] = u;
    word[i + 1] = v;
}

/// `r_{k,l}: X^k × X^l → X^l × X^k`, realised as
/// `(r_l ⋯ r_1) ⋯ (r_{k+l-2} ⋯ r_{k-1}) (r_{k+l-1} ⋯ r_k)`: the letters of
/// `a` cross `b` one at a time, last letter first.
pub fn apply_r_tuple(s: &Solution, a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (k, l) = (a.len(), b.len());
    let mut word: Vec<usize> = a.iter().chain(b).copied().collect();
    // 1-based r_j is 0-based position j - 1
    for j in (1..=k).rev() {
        for pos in j..j + l {
            apply_r_at(s, &mut word, pos - 1);
        }
    }
    let tail = word.split_off(l);
    (word, tail)
}

/// The `k`-cabled solution via frozen words. Independent of [`cable`].
pub fn cable_oracle(s: &Solution, k: usize) -> Result<Solution, CablingError> {
    if k == 0 {
        return Err(CablingError::ZeroLength);
    }
    let n = s.n();
    let words: Vec<Vec<usize>> = (0..n).map(|x| word_letters(s, x, k)).collect();
    let mut sigma_rows = vec![vec![0; n]; n];
    let mut tau_rows = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            let (u, w) = apply_r_tuple(s, &words[x], &words[y]);
            if !is_frozen(s, &u) || !is_frozen(s, &w) {
                return Err(CablingError::NotFrozen { x, y });
            }
            sigma_rows[x][y] = u[0];
            tau_rows[y][x] = w[0];
        }
    }
    let to_perms = |rows: Vec<Vec<usize>>| -> Result<Vec<Permutation>, CablingError> {
        rows.into_iter()
            .map(|r| {
                Permutation::from_images(r).map_err(|_| {
                    CablingError::Inconsistent(SolutionError::Inconsistent("oracle row not bijective".into()))
                })
            })
            .collect()
    };
    Solution::validate_any_size(to_perms(sigma_rows)?, to_perms(tau_rows)?).map_err(CablingError::Inconsistent)
}

/// Whether `(r^(k))^(k')` and `r^(kk')` coincide table by table.
pub fn iterate_check(s: &Solution, k: usize, k2: usize) -> Result<bool, CablingError> {
    let twice = cable(&cable(s, k)?, k2)?;
    let once = cable(s, k * k2)?;
    Ok(twice == once)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::perm::Partition;

    fn shift_by(p: usize, d: i64) -> Permutation {
        Permutation::from_images((0..p).map(|b| (b as i64 + d).rem_euclid(p as i64) as usize).collect()).unwrap()
    }

    #[test]
    fn frozen_word_examples() {
        let t4 = fixtures::trivial(4);
        assert_eq!(frozen_word(&t4, 2, 3).unwrap().letters(), &[2, 2, 2]);
        let z3 = fixtures::shift(3);
        assert_eq!(frozen_word(&z3, 0, 3).unwrap().letters(), &[0, 1, 2]);
        let s8 = fixtures::s8();
        // U = T⁻¹ sends 3 to 4 (1-based) for this table
        let w = frozen_word(&s8, 2, 2).unwrap();
        assert_eq!(w.letters(), &[2, 3]);
        assert_eq!(w.letters()[1], s8.inverse_diagonal().at(2));
        assert_eq!(frozen_word(&s8, 0, 0), Err(CablingError::ZeroLength));
    }

    #[test]
    fn frozen_checks() {
        let s8 = fixtures::s8();
        for x in 0..8 {
            for k in 1..6 {
                assert!(is_frozen(&s8, frozen_word(&s8, x, k).unwrap().letters()));
            }
        }
        let z3 = fixtures::shift(3);
        assert_eq!(z3.r(0, 0), (2, 1));
        assert!(!is_frozen(&z3, &[0, 0]));
        assert!(is_frozen(&z3, &[1]));
    }

    #[test]
    fn word_examples() {
        let s8 = fixtures::s8();
        assert_eq!(&sigma_word(&s8, 1, 4).unwrap(), s8.sigma(4));
        assert_eq!(&tau_word(&s8, 1, 4).unwrap(), s8.tau(4));
        let z5 = fixtures::shift(5);
        for x in 0..5 {
            assert_eq!(sigma_word(&z5, 3, x).unwrap(), shift_by(5, -3));
            assert_eq!(tau_word(&z5, 2, x).unwrap(), shift_by(5, 2));
        }
        let t3 = fixtures::trivial(3);
        assert!(sigma_word(&t3, 4, 1).unwrap().is_identity());
        assert!(tau_word(&t3, 4, 1).unwrap().is_identity());
        assert_eq!(sigma_word(&t3, 0, 1), Err(CablingError::ZeroLength));
    }

    #[test]
    fn cable_examples() {
        let s8 = fixtures::s8();
        let c3 = cable(&s8, 3).unwrap();
        assert!(!c3.is_decomposable());
        assert_eq!(c3.t_partition(), Partition::from_parts(vec![2, 2, 2, 2]));
        for s in fixtures::all() {
            assert_eq!(cable(&s, 1).unwrap(), s);
        }
        let z5 = fixtures::shift(5);
        let c2 = cable(&z5, 2).unwrap();
        assert!((0..5).all(|x| c2.sigma(x) == &shift_by(5, -2) && c2.tau(x) == &shift_by(5, 2)));
        assert_eq!(cable(&z5, 0), Err(CablingError::ZeroLength));
    }

    #[test]
    fn large_k_splits_into_prime_steps() {
        let z5 = fixtures::shift(5);
        // 2^14 = 16384 ≡ 4 (mod 5)
        let big = cable(&z5, 1 << 14).unwrap();
        assert_eq!(big, cable(&z5, 4).unwrap());
        assert_eq!(cable(&z5, 10_007 * 2), Err(CablingError::TooLarge { k: 20_014 }));
        assert_eq!(prime_factors(360), vec![2, 2, 2, 3, 3, 5]);
    }

    #[test]
    fn apply_r_tuple_single_letters_is_r() {
        let s8 = fixtures::s8();
        for x in 0..8 {
            for y in 0..8 {
                let (u, w) = apply_r_tuple(&s8, &[x], &[y]);
                assert_eq!((u[0], w[0]), s8.r(x, y));
            }
        }
    }

    #[test]
    fn apply_r_tuple_matches_stepwise() {
        let z3 = fixtures::shift(3);
        // (0,1 | 2,0): r_2 then r_3, then r_1 then r_2 (1-based positions)
        let mut w = [0, 1, 2, 0];
        for pos in [2, 3, 1, 2] {
            let (u, v) = z3.r(w[pos - 1], w[pos]);
            w[pos - 1] = u;
            w[pos] = v;
        }
        let (u, t) = apply_r_tuple(&z3, &[0, 1], &[2, 0]);
        assert_eq!(u, w[..2]);
        assert_eq!(t, w[2..]);
    }

    #[test]
    fn consecutive_frozen_words_pass_through_unchanged() {
        let s8 = fixtures::s8();
        let u = s8.inverse_diagonal();
        for k in 1..5 {
            for x in 0..8 {
                let a = frozen_word(&s8, x, k).unwrap();
                let b = frozen_word(&s8, u.pow(k as i64).at(x), k).unwrap();
                let (out_b, out_a) = apply_r_tuple(&s8, a.letters(), b.letters());
                assert_eq!(out_b, a.letters());
                assert_eq!(out_a, b.letters());
            }
        }
    }

    #[test]
    fn oracle_examples() {
        for s in fixtures::all() {
            assert_eq!(cable_oracle(&s, 1).unwrap(), s);
            for k in 1..=6 {
                assert_eq!(cable_oracle(&s, k).unwrap(), cable(&s, k).unwrap());
            }
        }
        let z3 = fixtures::shift(3);
        let c = cable_oracle(&z3, 3).unwrap();
        assert!(c.sigmas().iter().all(Permutation::is_identity));
    }

    #[test]
    fn iterate_examples() {
        assert!(iterate_check(&fixtures::s8(), 3, 3).unwrap());
        for s in fixtures::all() {
            assert!(iterate_check(&s, 1, 4).unwrap());
        }
        let z5 = fixtures::shift(5);
        assert!(iterate_check(&z5, 2, 3).unwrap());
        assert_eq!(cable(&z5, 6).unwrap(), cable(&z5, 1).unwrap());
    }
}
