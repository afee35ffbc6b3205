//! The brace structure on the permutation group `𝒢(X, r)`.
//!
//! The additive group `(𝒢, +)` is generated by the `σ_x`, with
//!
//! ```text
//! g + σ_x = g ∘ σ_{g⁻¹(x)}.
//! ```
//!
//! A breadth-first closure from the identity under these moves reaches every
//! element and records, for each one, a parent element and the generator
//! that was added. That chain is the element's additive decomposition, and
//! all other additive operations fold over it.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::perm::{self, lcm, PermError, Permutation, DEFAULT_CLOSURE_CAP};
use crate::solution::Solution;

/// Below this group order the brace checks are exhaustive.
pub const EXHAUSTIVE_LIMIT: usize = 200;

/// Full addition tables are cached up to this group order.
const TABLE_LIMIT: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraceError {
    #[error("permutation group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("permutation is not an element of the group")]
    NotInGroup,
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// `g + σ_x = g ∘ σ_{g⁻¹(x)}`.
pub fn add_generator(s: &Solution, g: &Permutation, x: usize) -> Permutation {
    g * s.sigma(g.inverse().at(x))
}

/// `𝒢(X, r)` with its additive structure.
#[derive(Debug)]
pub struct Brace {
    n: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    /// `(parent, generator)`; `None` only for the identity at index 0.
    parent: Vec<Option<(u32, u32)>>,
    /// `plus_gen[i * n + x]` is the index of `elements[i] + σ_x`.
    plus_gen: Vec<u32>,
    gen_index: Vec<usize>,
    gen_order: Vec<u64>,
    add_table: OnceLock<Vec<u32>>,
}

/// Outcome of a brace-identity check.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub checked: usize,
    pub exhaustive: bool,
    /// Offending triples `(a, b, c)`.
    pub witnesses: Vec<(Permutation, Permutation, Permutation)>,
}

impl Brace {
    pub fn new(s: &Solution) -> Result<Self, BraceError> {
        Self::with_cap(s, DEFAULT_CLOSURE_CAP)
    }

    /// Builds the additive closure and checks that its element set agrees
    /// with the multiplicative closure of the σ's.
    pub fn with_cap(s: &Solution, cap: usize) -> Result<Self, BraceError> {
        let n = s.n();
        let id = Permutation::identity(n);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut parent = vec![None];
        let mut plus_gen: Vec<u32> = Vec::new();
        let mut head = 0;
        while head < elements.len() {
            let g = elements[head].clone();
            let g_inv = g.inverse();
            for x in 0..n {
                let h = &g * s.sigma(g_inv.at(x));
                let idx = match index.get(&h) {
                    Some(&i) => i,
                    None => {
                        if elements.len() >= cap {
                            return Err(BraceError::CapExceeded { cap });
                        }
                        let i = elements.len();
                        index.insert(h.clone(), i);
                        elements.push(h);
                        parent.push(Some((head as u32, x as u32)));
                        i
                    }
                };
                plus_gen.push(idx as u32);
            }
            head += 1;
        }

        let group = perm::group_closure(s.sigmas(), n, cap).map_err(|e| match e {
            PermError::CapExceeded { cap } => BraceError::CapExceeded { cap },
            other => BraceError::Perm(other),
        })?;
        if group.len() != elements.len() || !elements.iter().all(|e| group.contains(e)) {
            return Err(BraceError::Inconsistent(format!(
                "additive closure has {} elements, group closure {}",
                elements.len(),
                group.len()
            )));
        }

        let gen_index: Vec<usize> = (0..n).map(|x| index[s.sigma(x)]).collect();
        let mut brace = Brace {
            n,
            elements,
            index,
            parent,
            plus_gen,
            gen_index,
            gen_order: Vec::new(),
            add_table: OnceLock::new(),
        };
        brace.gen_order = (0..n).map(|x| brace.order_idx(brace.gen_index[x])).collect();
        Ok(brace)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Elements in discovery order, identity first.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn position(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains_key(g)
    }

    fn idx(&self, g: &Permutation) -> Result<usize, BraceError> {
        self.position(g).ok_or(BraceError::NotInGroup)
    }

    /// Index of `σ_x` among the elements.
    pub fn generator(&self, x: usize) -> usize {
        self.gen_index[x]
    }

    /// One additive decomposition of element `i`, as a sorted multiset of
    /// generator points. The identity decomposes as the empty sum.
    pub fn decomposition_idx(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = i;
        while let Some((p, x)) = self.parent[cur] {
            out.push(x as usize);
            cur = p as usize;
        }
        out.sort_unstable();
        out
    }

    pub fn decomposition(&self, g: &Permutation) -> Result<Vec<usize>, BraceError> {
        Ok(self.decomposition_idx(self.idx(g)?))
    }

    #[inline]
    fn plus_generator_idx(&self, i: usize, x: usize) -> usize {
        self.plus_gen[i * self.n + x] as usize
    }

    /// Sums generators from the identity.
    pub fn sum_of_generators(&self, points: &[usize]) -> usize {
        points.iter().fold(0, |acc, &x| self.plus_generator_idx(acc, x))
    }

    fn fold_add(&self, i: usize, j: usize) -> usize {
        let mut acc = i;
        let mut cur = j;
        while let Some((p, x)) = self.parent[cur] {
            acc = self.plus_generator_idx(acc, x as usize);
            cur = p as usize;
        }
        acc
    }

    /// Index of `elements[i] + elements[j]`.
    pub fn add_idx(&self, i: usize, j: usize) -> usize {
        let m = self.len();
        if m <= TABLE_LIMIT {
            let table = self.add_table.get_or_init(|| {
                let mut t = Vec::with_capacity(m * m);
                for a in 0..m {
                    for b in 0..m {
                        t.push(self.fold_add(a, b) as u32);
                    }
                }
                t
            });
            table[i * m + j] as usize
        } else {
            self.fold_add(i, j)
        }
    }

    /// Index of `elements[i] ∘ elements[j]`.
    pub fn compose_idx(&self, i: usize, j: usize) -> usize {
        self.index[&(&self.elements[i] * &self.elements[j])]
    }

    pub fn add(&self, g: &Permutation, h: &Permutation) -> Result<Permutation, BraceError> {
        Ok(self.elements[self.add_idx(self.idx(g)?, self.idx(h)?)].clone())
    }

    /// `-g`, built generator by generator from the additive orders of the
    /// `σ_x`.
    pub fn negate_idx(&self, i: usize) -> usize {
        let mut counts = vec![0u64; self.n];
        for x in self.decomposition_idx(i) {
            counts[x] += 1;
        }
        let mut acc = 0;
        for (x, &c) in counts.iter().enumerate() {
            let ord = self.gen_order[x];
            let reps = (ord - c % ord) % ord;
            for _ in 0..reps {
                acc = self.plus_generator_idx(acc, x);
            }
        }
        acc
    }

    pub fn negate(&self, g: &Permutation) -> Result<Permutation, BraceError> {
        Ok(self.elements[self.negate_idx(self.idx(g)?)].clone())
    }

    /// `k·elements[i]` by double-and-add.
    pub fn multiple_idx(&self, i: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = i;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add_idx(acc, base);
            }
            base = self.add_idx(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn multiple(&self, g: &Permutation, k: u64) -> Result<Permutation, BraceError> {
        Ok(self.elements[self.multiple_idx(self.idx(g)?, k)].clone())
    }

    fn order_idx(&self, i: usize) -> u64 {
        let mut acc = i;
        let mut m = 1;
        while acc != 0 {
            acc = self.add_idx(acc, i);
            m += 1;
        }
        m
    }

    /// Least `m ≥ 1` with `m·g = 0`.
    pub fn additive_order(&self, g: &Permutation) -> Result<u64, BraceError> {
        Ok(self.order_idx(self.idx(g)?))
    }

    /// Additive order of `σ_x`.
    pub fn per_point_class(&self, x: usize) -> u64 {
        self.gen_order[x]
    }

    /// `λ_g(h)`: every generator `σ_y` in the decomposition of `h` is
    /// replaced by `σ_{g(y)}`.
    pub fn lambda_idx(&self, g: usize, h: usize) -> usize {
        let gp = &self.elements[g];
        let mut acc = 0;
        let mut cur = h;
        while let Some((p, x)) = self.parent[cur] {
            acc = self.plus_generator_idx(acc, gp.at(x as usize));
            cur = p as usize;
        }
        acc
    }

    pub fn lambda(&self, g: &Permutation, h: &Permutation) -> Result<Permutation, BraceError> {
        Ok(self.elements[self.lambda_idx(self.idx(g)?, self.idx(h)?)].clone())
    }

    /// Least common multiple of the additive orders of the `σ_x`.
    pub fn dehornoy_class(&self) -> u64 {
        self.gen_order.iter().fold(1, |acc, &o| lcm(acc, o))
    }

    /// `a ∘ (b + c) = a∘b − a + a∘c`, over all triples when the group is
    /// small and over `samples` seeded random triples otherwise.
    pub fn verify_brace_axiom(&self, samples: usize, seed: u64) -> AxiomReport {
        let m = self.len();
        let mut report = AxiomReport { exhaustive: m <= EXHAUSTIVE_LIMIT, ..Default::default() };
        let check = |a: usize, b: usize, c: usize, report: &mut AxiomReport| {
            let lhs = self.compose_idx(a, self.add_idx(b, c));
            let ab = self.compose_idx(a, b);
            let ac = self.compose_idx(a, c);
            let rhs = self.add_idx(self.add_idx(ab, self.negate_idx(a)), ac);
            report.checked += 1;
            if lhs != rhs {
                report.witnesses.push((self.elements[a].clone(), self.elements[b].clone(), self.elements[c].clone()));
            }
        };
        if report.exhaustive {
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        check(a, b, c, &mut report);
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b, c) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
                check(a, b, c, &mut report);
            }
        }
        report
    }

    /// `B^(k) = {k·g}`, returned sorted. Closure under `+` and `∘` is
    /// checked (exhaustively up to 500 elements, on a seeded sample above).
    pub fn sub_brace_cabling(&self, k: u64) -> Result<Vec<Permutation>, BraceError> {
        let members: HashSet<usize> = (0..self.len()).map(|i| self.multiple_idx(i, k)).collect();
        let list: Vec<usize> = members.iter().copied().collect();
        let closed = |a: usize, b: usize| -> Result<(), BraceError> {
            if !members.contains(&self.add_idx(a, b)) {
                return Err(BraceError::Inconsistent(format!("B^({k}) not closed under +")));
            }
            if !members.contains(&self.compose_idx(a, b)) {
                return Err(BraceError::Inconsistent(format!("B^({k}) not closed under composition")));
            }
            Ok(())
        };
        if list.len() <= 500 {
            for &a in &list {
                for &b in &list {
                    closed(a, b)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(k);
            for _ in 0..10_000 {
                closed(list[rng.gen_range(0..list.len())], list[rng.gen_range(0..list.len())])?;
            }
        }
        let mut out: Vec<Permutation> = list.into_iter().map(|i| self.elements[i].clone()).collect();
        out.sort();
        Ok(out)
    }
}

/// Least `m` with `σ_{T^{m-1}(x)} ⋯ σ_{T(x)} σ_x = id` for every `x`,
/// scanning upward to the order of the permutation group.
pub fn dehornoy_class_direct(s: &Solution) -> Result<u64, BraceError> {
    let n = s.n();
    let bound = perm::group_closure(s.sigmas(), n, DEFAULT_CLOSURE_CAP)
        .map_err(|e| match e {
            PermError::CapExceeded { cap } => BraceError::CapExceeded { cap },
            other => BraceError::Perm(other),
        })?
        .len() as u64;
    let t = s.diagonal();
    let mut products: Vec<Permutation> = (0..n).map(|x| s.sigma(x).clone()).collect();
    let mut fronts: Vec<usize> = (0..n).collect();
    for m in 1..=bound {
        if products.iter().all(Permutation::is_identity) {
            return Ok(m);
        }
        for x in 0..n {
            fronts[x] = t.at(fronts[x]);
            products[x] = s.sigma(fronts[x]) * &products[x];
        }
    }
    Err(BraceError::Inconsistent(format!("no Dehornoy class up to the group order {bound}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cabling::sigma_word;
    use crate::fixtures;

    #[test]
    fn add_generator_examples() {
        let s8 = fixtures::s8();
        let id = Permutation::identity(8);
        for x in 0..8 {
            assert_eq!(&add_generator(&s8, &id, x), s8.sigma(x));
        }
        let t3 = fixtures::trivial(3);
        assert!(add_generator(&t3, &Permutation::identity(3), 1).is_identity());
    }

    #[test]
    fn repeated_generator_addition_is_the_frozen_word() {
        for s in fixtures::all() {
            for x in 0..s.n() {
                let mut acc = Permutation::identity(s.n());
                for k in 1..=6 {
                    acc = add_generator(&s, &acc, x);
                    assert_eq!(acc, sigma_word(&s, k, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn closure_sizes() {
        let z5 = Brace::new(&fixtures::shift(5)).unwrap();
        assert_eq!(z5.len(), 5);
        assert_eq!(Brace::new(&fixtures::trivial(2)).unwrap().len(), 1);
        let s8 = fixtures::s8();
        let b = Brace::new(&s8).unwrap();
        let g = perm::group_closure(s8.sigmas(), 8, 1_000_000).unwrap();
        assert_eq!(b.len(), g.len());
        assert!(matches!(Brace::with_cap(&s8, 3), Err(BraceError::CapExceeded { cap: 3 })));
    }

    #[test]
    fn decompositions_resum() {
        let b = Brace::new(&fixtures::s8()).unwrap();
        assert!(b.decomposition_idx(0).is_empty());
        for i in 0..b.len() {
            assert_eq!(b.sum_of_generators(&b.decomposition_idx(i)), i);
        }
    }

    #[test]
    fn addition_examples() {
        let s8 = fixtures::s8();
        let b = Brace::new(&s8).unwrap();
        let id = Permutation::identity(8);
        for g in b.elements() {
            assert_eq!(&b.add(g, &id).unwrap(), g);
            assert!(b.add(g, &b.negate(g).unwrap()).unwrap().is_identity());
        }
        assert!(b.negate(&id).unwrap().is_identity());
        for x in 0..8 {
            for k in 1..=5u64 {
                let sum = (1..k).try_fold(s8.sigma(x).clone(), |acc, _| b.add(&acc, s8.sigma(x))).unwrap();
                assert_eq!(sum, sigma_word(&s8, k as usize, x).unwrap());
                assert_eq!(b.multiple(s8.sigma(x), k).unwrap(), sum);
            }
        }
        let foreign = Permutation::from_images(vec![1, 0, 2, 3, 4, 5, 6, 7]).unwrap();
        if !b.contains(&foreign) {
            assert_eq!(b.add(&foreign, &id), Err(BraceError::NotInGroup));
        }
    }

    #[test]
    fn lambda_examples() {
        let s8 = fixtures::s8();
        let b = Brace::new(&s8).unwrap();
        let id = Permutation::identity(8);
        for g in b.elements() {
            for y in 0..8 {
                assert_eq!(&b.lambda(g, s8.sigma(y)).unwrap(), s8.sigma(g.at(y)));
            }
            assert_eq!(&b.lambda(&id, g).unwrap(), g);
        }
        for x in 0..8 {
            for y in 0..8 {
                for k in 1..4 {
                    let ky = b.multiple(s8.sigma(y), k).unwrap();
                    let lhs = b.lambda(s8.sigma(x), &ky).unwrap();
                    let rhs = b.multiple(s8.sigma(s8.sigma(x).at(y)), k).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn brace_axiom_reports() {
        let z5 = Brace::new(&fixtures::shift(5)).unwrap();
        let r = z5.verify_brace_axiom(0, 1);
        assert!(r.exhaustive && r.witnesses.is_empty());
        assert_eq!(r.checked, 125);
        let t2 = Brace::new(&fixtures::trivial(2)).unwrap().verify_brace_axiom(0, 1);
        assert_eq!(t2.checked, 1);
        assert!(t2.witnesses.is_empty());
        let s8 = Brace::new(&fixtures::s8()).unwrap().verify_brace_axiom(5_000, 7);
        assert!(s8.witnesses.is_empty());
    }

    #[test]
    fn orders_and_classes() {
        let z5s = fixtures::shift(5);
        let z5 = Brace::new(&z5s).unwrap();
        assert_eq!(z5.additive_order(&Permutation::identity(5)).unwrap(), 1);
        assert!((0..5).all(|x| z5.per_point_class(x) == 5));
        assert_eq!(z5.dehornoy_class(), 5);
        assert_eq!(dehornoy_class_direct(&z5s).unwrap(), 5);

        let t3s = fixtures::trivial(3);
        let t3 = Brace::new(&t3s).unwrap();
        assert!((0..3).all(|x| t3.per_point_class(x) == 1));
        assert_eq!(t3.dehornoy_class(), 1);
        assert_eq!(dehornoy_class_direct(&t3s).unwrap(), 1);

        let u = fixtures::z2_plus_z3();
        let ub = Brace::new(&u).unwrap();
        assert_eq!((0..5).map(|x| ub.per_point_class(x)).collect::<Vec<_>>(), vec![2, 2, 3, 3, 3]);
        assert_eq!(ub.dehornoy_class(), 6);
        assert_eq!(dehornoy_class_direct(&u).unwrap(), 6);

        let s8s = fixtures::s8();
        let s8 = Brace::new(&s8s).unwrap();
        let class = dehornoy_class_direct(&s8s).unwrap();
        assert_eq!(s8.dehornoy_class(), class);
        assert!((0..8).all(|x| s8.per_point_class(x) == class));
    }

    #[test]
    fn sub_brace_examples() {
        let s8 = Brace::new(&fixtures::s8()).unwrap();
        let mut all = s8.elements().to_vec();
        all.sort();
        assert_eq!(s8.sub_brace_cabling(1).unwrap(), all);

        // Z/6 shift: (𝒢, +) is cyclic of order 6, so 2·𝒢 has 3 elements
        let z6 = Brace::new(&fixtures::shift(6)).unwrap();
        assert_eq!(z6.len(), 6);
        assert_eq!(z6.sub_brace_cabling(2).unwrap().len(), 3);
        assert_eq!(z6.sub_brace_cabling(3).unwrap().len(), 2);
    }
}
