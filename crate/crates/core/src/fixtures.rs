//! Small named solutions used throughout tests, the CLI and the verification
//! harness.

use crate::perm::Permutation;
use crate::solution::Solution;

/// 1-based cycles, as written on paper.
fn cycles_1based(n: usize, cycles: &[&[usize]]) -> Permutation {
    let zero: Vec<Vec<usize>> = cycles.iter().map(|c| c.iter().map(|p| p - 1).collect()).collect();
    let refs: Vec<&[usize]> = zero.iter().map(Vec::as_slice).collect();
    Permutation::from_cycles(n, &refs).expect("fixture cycles are well formed")
}

/// An indecomposable size-8 solution with T-partition (6, 2).
pub fn s8() -> Solution {
    let sigma = vec![
        cycles_1based(8, &[&[1, 2], &[3, 4], &[5, 6], &[7, 8]]),
        cycles_1based(8, &[&[1, 2], &[3, 6], &[4, 7], &[5, 8]]),
        cycles_1based(8, &[&[1, 5, 4, 3], &[2, 6, 7, 8]]),
        cycles_1based(8, &[&[1, 3, 6, 7], &[2, 8, 5, 4]]),
        cycles_1based(8, &[&[1, 7], &[2, 4], &[3, 8], &[5, 6]]),
        cycles_1based(8, &[&[1, 7, 6, 3], &[2, 4, 5, 8]]),
        cycles_1based(8, &[&[1, 3, 4, 5], &[2, 8, 7, 6]]),
        cycles_1based(8, &[&[1, 5], &[2, 6], &[3, 8], &[4, 7]]),
    ];
    Solution::from_sigma(sigma).expect("s8 is a solution")
}

pub fn shift(p: usize) -> Solution {
    Solution::shift(p).expect("p >= 2")
}

pub fn trivial(n: usize) -> Solution {
    Solution::trivial(n).expect("n >= 2")
}

/// `Z/2 ⊔ Z/3` with the trivial interaction between the two parts.
pub fn z2_plus_z3() -> Solution {
    Solution::disjoint_union(&shift(2), &shift(3)).expect("disjoint union of solutions")
}

/// Every fixture, with a short name.
pub fn named() -> Vec<(&'static str, Solution)> {
    vec![
        ("s8", s8()),
        ("z2", shift(2)),
        ("z3", shift(3)),
        ("z5", shift(5)),
        ("z7", shift(7)),
        ("t2", trivial(2)),
        ("t3", trivial(3)),
        ("z2+z3", z2_plus_z3()),
    ]
}

pub fn all() -> Vec<Solution> {
    named().into_iter().map(|(_, s)| s).collect()
}
