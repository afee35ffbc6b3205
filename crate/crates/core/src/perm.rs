//! Permutations of `{0, .., n-1}` and the permutation-group computations the
//! rest of the crate is built on: orbits, block systems, primitivity and
//! explicit group closure.
//!
//! Composition is written `p ∘ q` and means "apply `q` first, then `p`".
//! Every other convention in the crate is derived from this one.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use thiserror::Error;

/// Default upper bound on the number of elements [`group_closure`] will
/// materialise.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("image sequence of length {degree} is not a bijection")]
    NotBijective { degree: usize },
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("no points and no generators")]
    Empty,
    #[error("the group action is not transitive")]
    Intransitive,
    #[error("block seed points must be distinct, got {0} twice")]
    SamePoint(usize),
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("invalid partition: {0}")]
    BadPartition(String),
}

/// A bijection of `{0, .., n-1}`, stored as its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotBijective { degree: n });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection.
    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from disjoint cycles given in 0-based points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                if p >= n {
                    return Err(PermError::PointOutOfRange { point: p, degree: n });
                }
                if touched[p] {
                    return Err(PermError::NotBijective { degree: n });
                }
                touched[p] = true;
                images[p] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, point: usize) -> Result<usize, PermError> {
        self.images.get(point).copied().ok_or(PermError::PointOutOfRange { point, degree: self.degree() })
    }

    /// Image of `point`; panics when out of range.
    #[inline]
    pub fn at(&self, point: usize) -> usize {
        self.images[point]
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(Permutation { images: other.images.iter().map(|&i| self.images[i]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, exp: i64) -> Permutation {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    /// All cycles including fixed points, each starting at its least point,
    /// ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Partition {
        Partition::from_parts(self.cycles().iter().map(Vec::len).collect())
    }

    /// Least `m ≥ 1` with `self^m = id`.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    /// `p * q = p ∘ q`. Panics on degree mismatch.
    fn mul(self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch in composition");
        Permutation { images: rhs.images.iter().map(|&i| self.images[i]).collect() }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// 1-based cycle notation without fixed points, e.g. `(1 2)(3 4 5)`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// A multiset of positive integers, kept in non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Zero parts are dropped.
    pub fn from_parts(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, part: usize) -> bool {
        self.parts.contains(&part)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(usize::to_string).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// Accepts parts separated by spaces or commas, with optional parentheses:
/// `6 2`, `2,6`, `(2,6)`.
impl FromStr for Partition {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = Vec::new();
        for tok in trimmed.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let p: usize = tok.parse().map_err(|_| PermError::BadPartition(s.to_string()))?;
            if p == 0 {
                return Err(PermError::BadPartition(s.to_string()));
            }
            parts.push(p);
        }
        if parts.is_empty() {
            return Err(PermError::BadPartition(s.to_string()));
        }
        Ok(Partition::from_parts(parts))
    }
}

/// A partition of `{0, .., n-1}` into blocks of equal size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSystem {
    degree: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockSystem {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Blocks are sorted internally and ordered by their least element.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1 || self.block_size() == 1
    }

    pub fn block_of(&self, point: usize) -> Option<&[usize]> {
        self.blocks.iter().find(|b| b.contains(&point)).map(Vec::as_slice)
    }
}

impl fmt::Display for BlockSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let pts: Vec<String> = b.iter().map(|p| (p + 1).to_string()).collect();
                format!("{{{}}}", pts.join(" "))
            })
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

fn check_degrees(gens: &[Permutation], n: usize) -> Result<(), PermError> {
    for g in gens {
        if g.degree() != n {
            return Err(PermError::DegreeMismatch { left: g.degree(), right: n });
        }
    }
    Ok(())
}

/// Orbits of `⟨gens⟩` on `{0, .., n-1}`, each sorted, ordered by least
/// element.
pub fn orbits(gens: &[Permutation], n: usize) -> Result<Vec<Vec<usize>>, PermError> {
    if n == 0 && gens.is_empty() {
        return Err(PermError::Empty);
    }
    check_degrees(gens, n)?;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                let q = g.at(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                    queue.push_back(q);
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    Ok(out)
}

pub fn is_transitive(gens: &[Permutation], n: usize) -> Result<bool, PermError> {
    Ok(orbits(gens, n)?.len() == 1)
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns the new root when two classes were merged.
    fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (hi, lo) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        Some(hi)
    }
}

/// The finest `⟨gens⟩`-invariant block system in which `a` and `b` share a
/// block (Atkinson's merge procedure).
pub fn block_system_through(gens: &[Permutation], n: usize, a: usize, b: usize) -> Result<BlockSystem, PermError> {
    for p in [a, b] {
        if p >= n {
            return Err(PermError::PointOutOfRange { point: p, degree: n });
        }
    }
    if a == b {
        return Err(PermError::SamePoint(a));
    }
    if !is_transitive(gens, n)? {
        return Err(PermError::Intransitive);
    }
    let mut uf = UnionFind::new(n);
    uf.union(a, b);
    let mut pending = vec![(a, b)];
    while let Some((x, y)) = pending.pop() {
        for g in gens {
            let (gx, gy) = (g.at(x), g.at(y));
            if uf.union(gx, gy).is_some() {
                pending.push((gx, gy));
            }
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for p in 0..n {
        let r = uf.find(p);
        by_root.entry(r).or_default().push(p);
    }
    let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
    blocks.sort_unstable_by_key(|blk| blk[0]);
    Ok(BlockSystem { degree: n, blocks })
}

/// The distinct minimal block systems `block_system_through(0, b)`, `b ≠ 0`.
pub fn minimal_block_systems(gens: &[Permutation], n: usize) -> Result<Vec<BlockSystem>, PermError> {
    if !is_transitive(gens, n)? {
        return Err(PermError::Intransitive);
    }
    let mut out: Vec<BlockSystem> = Vec::new();
    for b in 1..n {
        let sys = block_system_through(gens, n, 0, b)?;
        if !out.contains(&sys) {
            out.push(sys);
        }
    }
    Ok(out)
}

/// Primitivity of a transitive action. Intransitive actions are an error.
pub fn is_primitive(gens: &[Permutation], n: usize) -> Result<bool, PermError> {
    if !is_transitive(gens, n)? {
        return Err(PermError::Intransitive);
    }
    for b in 1..n {
        if block_system_through(gens, n, 0, b)?.blocks().len() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Explicit element list of a permutation group.
#[derive(Clone, Debug)]
pub struct GroupClosure {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl GroupClosure {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in discovery order; the identity is first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn position(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }
}

/// Breadth-first closure of `⟨gens⟩` under left multiplication by the
/// generators. Fails once more than `cap` elements have been found.
pub fn group_closure(gens: &[Permutation], n: usize, cap: usize) -> Result<GroupClosure, PermError> {
    check_degrees(gens, n)?;
    let id = Permutation::identity(n);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    if cap == 0 {
        return Err(PermError::CapExceeded { cap });
    }
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in gens {
            let next = g * &current;
            if !index.contains_key(&next) {
                if elements.len() >= cap {
                    return Err(PermError::CapExceeded { cap });
                }
                index.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
    }
    Ok(GroupClosure { degree: n, elements, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    fn shift_gen(n: usize) -> Permutation {
        p(&(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>())
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p(&[1, 0, 2]).compose(&p(&[0, 2, 1])).unwrap(), p(&[1, 2, 0]));
        let q = p(&[2, 0, 1]);
        assert_eq!(Permutation::identity(3).compose(&q).unwrap(), q);
        let t = p(&[1, 0]);
        assert!((&t * &t).is_identity());
    }

    #[test]
    fn compose_degree_mismatch() {
        let err = p(&[0, 1]).compose(&p(&[0, 1, 2])).unwrap_err();
        assert_eq!(err, PermError::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn not_bijective() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn inverse_order_cycle_type() {
        assert_eq!(p(&[1, 2, 0]).inverse(), p(&[2, 0, 1]));
        assert_eq!(Permutation::identity(4).order(), 1);
        let t = Permutation::from_cycles(8, &[&[0, 1], &[2, 3, 4, 5, 6, 7]]).unwrap();
        assert_eq!(t.cycle_type(), Partition::from_parts(vec![6, 2]));
        assert_eq!(t.order(), 6);
        assert_eq!(t.to_string(), "(1 2)(3 4 5 6 7 8)");
        assert_eq!(t.pow(-1), t.inverse());
        assert_eq!(t.pow(6), Permutation::identity(8));
        assert_eq!(t.pow(7), t);
    }

    #[test]
    fn apply_out_of_range() {
        assert_eq!(p(&[1, 0]).apply(2), Err(PermError::PointOutOfRange { point: 2, degree: 2 }));
    }

    #[test]
    fn partition_parsing() {
        let a: Partition = "2 6".parse().unwrap();
        let b: Partition = "(6,2)".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "6 2");
        assert_eq!(a.total(), 8);
        assert!("".parse::<Partition>().is_err());
        assert!("2 0".parse::<Partition>().is_err());
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbits(&[p(&[1, 0, 2])], 3).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(orbits(&[], 2).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(orbits(&[], 0), Err(PermError::Empty));
        assert!(is_transitive(&[shift_gen(5)], 5).unwrap());
        assert!(!is_transitive(&[Permutation::identity(3)], 3).unwrap());
    }

    #[test]
    fn block_examples() {
        let c4 = shift_gen(4);
        let sys = block_system_through(std::slice::from_ref(&c4), 4, 0, 2).unwrap();
        assert_eq!(sys.blocks(), &[vec![0, 2], vec![1, 3]]);

        let s4 = [p(&[1, 0, 2, 3]), shift_gen(4)];
        for b in 1..4 {
            let sys = block_system_through(&s4, 4, 0, b).unwrap();
            assert_eq!(sys.blocks(), &[vec![0, 1, 2, 3]]);
        }

        let sys = block_system_through(&[shift_gen(6)], 6, 0, 3).unwrap();
        assert_eq!(sys.blocks(), &[vec![0, 3], vec![1, 4], vec![2, 5]]);

        assert_eq!(block_system_through(&[Permutation::identity(3)], 3, 0, 1), Err(PermError::Intransitive));
        assert_eq!(block_system_through(&[c4], 4, 1, 1), Err(PermError::SamePoint(1)));
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&[shift_gen(5)], 5).unwrap());
        assert!(!is_primitive(&[shift_gen(4)], 4).unwrap());
        assert_eq!(is_primitive(&[Permutation::identity(2)], 2), Err(PermError::Intransitive));
        let systems = minimal_block_systems(&[shift_gen(6)], 6).unwrap();
        // blocks of size 2 and size 3, plus the full set
        assert_eq!(systems.len(), 3);
    }

    #[test]
    fn closure_examples() {
        let g = group_closure(&[p(&[1, 0])], 2, 10).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(group_closure(&[shift_gen(5)], 5, 100).unwrap().len(), 5);
        let triv = group_closure(&[], 3, 1).unwrap();
        assert_eq!(triv.elements(), &[Permutation::identity(3)]);
        let s4 = [p(&[1, 0, 2, 3]), shift_gen(4)];
        assert_eq!(group_closure(&s4, 4, 100).unwrap().len(), 24);
        assert_eq!(group_closure(&s4, 4, 23).unwrap_err(), PermError::CapExceeded { cap: 23 });
    }
}
