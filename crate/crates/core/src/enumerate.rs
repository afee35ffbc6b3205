//! Exhaustive enumeration of solutions of small size.
//!
//! A σ-table with the closed-form τ is a solution exactly when
//!
//! ```text
//! σ_x ∘ σ_{σ_x⁻¹(y)} = σ_y ∘ σ_{σ_y⁻¹(x)}   for all x, y.
//! ```
//!
//! The search fills the inverse table one cell at a time and propagates
//! this identity after every assignment. Every emitted table is
//! re-validated from scratch.
//!
//! Up to isomorphism, only tables that are lexicographically minimal under
//! simultaneous relabelling are kept. Row 0 of such a table is a permutation
//! in cycle-standard form, which fixes the first row outright; every other
//! row must have a standard form no smaller than row 0; and each complete
//! table gets an exact minimality test.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::perm::{Partition, Permutation};
use crate::solution::{Solution, SolutionError};

pub const MIN_ENUM_N: usize = 2;
pub const MAX_ENUM_N: usize = 8;
/// Sizes from here on take tens of seconds or more.
pub const SLOW_ENUM_N: usize = 7;
pub const MAX_NAIVE_N: usize = 4;

const MAXN: usize = MAX_ENUM_N;
const UNSET: u8 = u8::MAX;

type Row = [u8; MAXN];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("size {n} outside the supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("T-partition filter sums to {total}, not {n}")]
    PartitionTotal { total: usize, n: usize },
    #[error("enumerated table failed validation: {0}")]
    Invalid(#[from] SolutionError),
}

/// Optional invariant constraints on enumerated solutions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionFilter {
    pub indecomposable: Option<bool>,
    pub square_free: Option<bool>,
    pub t_partition: Option<Partition>,
    /// `Some(true)` keeps indecomposable primitive solutions; `Some(false)`
    /// keeps everything else, decomposable solutions included.
    pub primitive: Option<bool>,
}

impl SolutionFilter {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn indecomposable() -> Self {
        SolutionFilter { indecomposable: Some(true), ..Self::default() }
    }

    fn check(&self, n: usize) -> Result<(), EnumerateError> {
        match &self.t_partition {
            Some(p) if p.total() != n => Err(EnumerateError::PartitionTotal { total: p.total(), n }),
            _ => Ok(()),
        }
    }

    pub fn matches(&self, s: &Solution) -> bool {
        if let Some(want) = self.square_free {
            if s.is_square_free() != want {
                return false;
            }
        }
        if let Some(p) = &self.t_partition {
            if &s.t_partition() != p {
                return false;
            }
        }
        let needs_orbits = self.indecomposable.is_some() || self.primitive.is_some();
        let indecomposable = needs_orbits && !s.is_decomposable();
        if let Some(want) = self.indecomposable {
            if indecomposable != want {
                return false;
            }
        }
        if let Some(want) = self.primitive {
            let primitive = indecomposable && s.is_primitive().unwrap_or(false);
            if primitive != want {
                return false;
            }
        }
        true
    }
}

fn check_size(n: usize, max: usize) -> Result<(), EnumerateError> {
    if !(MIN_ENUM_N..=max).contains(&n) {
        return Err(EnumerateError::SizeOutOfRange { n, min: MIN_ENUM_N, max });
    }
    Ok(())
}

/// All permutations of `0..n` in lexicographic order.
fn all_perms(n: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        let mut row = [0u8; MAXN];
        row[..n].copy_from_slice(&cur);
        for (i, slot) in row.iter_mut().enumerate().skip(n) {
            *slot = i as u8;
        }
        out.push(row);
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn invert(row: &Row, n: usize) -> Row {
    let mut inv = *row;
    for i in 0..n {
        inv[row[i] as usize] = i as u8;
    }
    inv
}

/// Relabels `p` so that `v` becomes 0 and its cycle comes first, followed
/// by the other cycles in increasing length, each labelled consecutively.
/// This is the least conjugate of `p` sending `v` to 0.
fn standard_form(p: &Row, n: usize, v: usize) -> Row {
    let mut seen = [false; MAXN];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in std::iter::once(v).chain((0..n).filter(|&s| s != v)) {
        if seen[start] {
            continue;
        }
        let mut c = vec![start];
        seen[start] = true;
        let mut q = p[start] as usize;
        while q != start {
            seen[q] = true;
            c.push(q);
            q = p[q] as usize;
        }
        cycles.push(c);
    }
    cycles[1..].sort_by_key(Vec::len);
    let mut out = [0u8; MAXN];
    for (i, slot) in out.iter_mut().enumerate().skip(n) {
        *slot = i as u8;
    }
    let mut label = 0usize;
    for c in &cycles {
        let len = c.len();
        for i in 0..len {
            out[label + i] = (label + (i + 1) % len) as u8;
        }
        label += len;
    }
    out
}

struct Tables {
    n: usize,
    perms: Vec<Row>,
    invs: Vec<Row>,
    /// `std_index[p * n + v]` is the index of `standard_form(perms[p], v)`.
    std_index: Vec<u32>,
    factorial: [usize; MAXN + 1],
}

impl Tables {
    fn new(n: usize) -> Self {
        let perms = all_perms(n);
        let invs = perms.iter().map(|p| invert(p, n)).collect();
        let mut factorial = [1usize; MAXN + 1];
        for i in 1..=MAXN {
            factorial[i] = factorial[i - 1] * i;
        }
        let mut t = Tables { n, perms, invs, std_index: Vec::new(), factorial };
        let mut std_index = Vec::with_capacity(t.perms.len() * n);
        for p in &t.perms {
            for v in 0..n {
                std_index.push(t.rank(&standard_form(p, n, v)) as u32);
            }
        }
        t.std_index = std_index;
        t
    }

    /// Position of `p` in lexicographic order.
    fn rank(&self, p: &Row) -> usize {
        let n = self.n;
        (0..n).map(|i| (i + 1..n).filter(|&j| p[j] < p[i]).count() * self.factorial[n - 1 - i]).sum()
    }
}

/// Cell-by-cell search on the table `m[x][y] = σ_x⁻¹(y)`, in which the
/// defining identity reads
///
/// ```text
/// m[m[x][y]][m[x][z]] = m[m[y][x]][m[y][z]]
/// ```
///
/// and needs no inverses. Any instance with one side known and the other
/// cell empty fills that cell; a row missing a single value is completed.
#[derive(Clone)]
struct CellSearch<'a> {
    t: &'a Tables,
    up_to_iso: bool,
    square_free: bool,
    row0: usize,
    m: [[u8; MAXN]; MAXN],
    used: [u16; MAXN],
    filled: [u8; MAXN],
    trail: Vec<(u8, u8)>,
    out: Vec<Vec<Row>>,
}

impl<'a> CellSearch<'a> {
    fn new(t: &'a Tables, up_to_iso: bool, square_free: bool) -> Self {
        CellSearch {
            t,
            up_to_iso,
            square_free,
            row0: 0,
            m: [[UNSET; MAXN]; MAXN],
            used: [0; MAXN],
            filled: [0; MAXN],
            trail: Vec::new(),
            out: Vec::new(),
        }
    }

    fn sigma_row(&self, x: usize) -> Row {
        invert(&self.m[x], self.t.n)
    }

    fn set(&mut self, x: usize, y: usize, v: u8) -> bool {
        let cur = self.m[x][y];
        if cur != UNSET {
            return cur == v;
        }
        if self.used[x] & (1 << v) != 0 || (self.square_free && x == y && v as usize != x) {
            return false;
        }
        self.m[x][y] = v;
        self.used[x] |= 1 << v;
        self.filled[x] += 1;
        self.trail.push((x as u8, y as u8));
        if self.up_to_iso && x != 0 && self.filled[x] as usize == self.t.n {
            let rank = self.t.rank(&self.sigma_row(x));
            if (self.t.std_index[rank * self.t.n + x] as usize) < self.row0 {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (x, y) = self.trail.pop().expect("trail above mark");
            let (x, y) = (x as usize, y as usize);
            self.used[x] &= !(1 << self.m[x][y]);
            self.filled[x] -= 1;
            self.m[x][y] = UNSET;
        }
    }

    fn propagate(&mut self) -> bool {
        let n = self.t.n;
        loop {
            let mut changed = false;
            for x in 0..n {
                if self.filled[x] as usize == n - 1 {
                    let y = (0..n).find(|&y| self.m[x][y] == UNSET).expect("one empty cell");
                    let v = (!self.used[x]).trailing_zeros() as u8;
                    if !self.set(x, y, v) {
                        return false;
                    }
                    changed = true;
                }
            }
            for x in 0..n {
                for y in (x + 1)..n {
                    let (p, r) = (self.m[x][y], self.m[y][x]);
                    if p == UNSET || r == UNSET {
                        continue;
                    }
                    let (p, r) = (p as usize, r as usize);
                    for z in 0..n {
                        let (q, s) = (self.m[x][z], self.m[y][z]);
                        if q == UNSET || s == UNSET {
                            continue;
                        }
                        let (q, s) = (q as usize, s as usize);
                        let (l, rr) = (self.m[p][q], self.m[r][s]);
                        let ok = match (l != UNSET, rr != UNSET) {
                            (true, true) => l == rr,
                            (true, false) => {
                                changed = true;
                                self.set(r, s, l)
                            }
                            (false, true) => {
                                changed = true;
                                self.set(p, q, rr)
                            }
                            (false, false) => true,
                        };
                        if !ok {
                            return false;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn start(&mut self, sigma0: usize) -> bool {
        self.row0 = sigma0;
        let inv = self.t.invs[sigma0];
        (0..self.t.n).all(|y| self.set(0, y, inv[y])) && self.propagate()
    }

    fn next_cell(&self) -> Option<(usize, usize)> {
        let n = self.t.n;
        (0..n).find(|&x| (self.filled[x] as usize) < n).map(|x| {
            let y = (0..n).find(|&y| self.m[x][y] == UNSET).expect("row has an empty cell");
            (x, y)
        })
    }

    fn children(&mut self, f: &mut dyn FnMut(&mut Self)) {
        let Some((x, y)) = self.next_cell() else {
            return;
        };
        for v in 0..self.t.n as u8 {
            if self.used[x] & (1 << v) != 0 {
                continue;
            }
            let mark = self.trail.len();
            if self.set(x, y, v) && self.propagate() {
                f(self);
            }
            self.undo(mark);
        }
    }

    fn run(&mut self) {
        if self.next_cell().is_none() {
            let table: Vec<Row> = (0..self.t.n).map(|x| self.sigma_row(x)).collect();
            if !self.up_to_iso || is_canonical(&table, self.t.n) {
                self.out.push(table);
            }
            return;
        }
        self.children(&mut |s| s.run());
    }
}

fn flatten(table: &[Row], n: usize) -> Vec<u8> {
    table.iter().flat_map(|r| r[..n].iter().copied()).collect()
}

/// Search for a relabelling whose σ-table is lexicographically smaller than
/// `best`. Labels are handed out greedily in order of first appearance,
/// which is optimal for every fixed choice of the points labelled by
/// branching, so only those choices are explored.
struct Minimiser<'a> {
    n: usize,
    table: &'a [Row],
    phi: [u8; MAXN],
    phi_inv: [u8; MAXN],
    next: usize,
    current: Vec<u8>,
    best: Vec<u8>,
    best_phi_inv: [u8; MAXN],
    found: bool,
}

impl Minimiser<'_> {
    fn assign(&mut self, point: usize) {
        self.phi[point] = self.next as u8;
        self.phi_inv[self.next] = point as u8;
        self.next += 1;
    }

    fn unassign(&mut self, point: usize) {
        self.next -= 1;
        self.phi[point] = UNSET;
        self.phi_inv[self.next] = UNSET;
    }

    /// Stops at the first relabelling below `best`.
    fn dfs(&mut self, pos: usize, less: bool) {
        if self.found {
            return;
        }
        let n = self.n;
        if pos == n * n {
            if less {
                self.best.copy_from_slice(&self.current);
                self.best_phi_inv = self.phi_inv;
                self.found = true;
            }
            return;
        }
        let (x, y) = (pos / n, pos % n);
        if y >= self.next {
            debug_assert!(x == 0 && y == self.next);
            for p in 0..n {
                if self.phi[p] == UNSET {
                    self.assign(p);
                    self.place(pos, x, y, less);
                    self.unassign(p);
                    if self.found {
                        return;
                    }
                }
            }
        } else {
            self.place(pos, x, y, less);
        }
    }

    fn place(&mut self, pos: usize, x: usize, y: usize, less: bool) {
        let vx = self.phi_inv[x] as usize;
        let vy = self.phi_inv[y] as usize;
        let q = self.table[vx][vy] as usize;
        let fresh = self.phi[q] == UNSET;
        if fresh {
            self.assign(q);
        }
        let val = self.phi[q];
        let mut still_less = less;
        let mut prune = false;
        if !less {
            match val.cmp(&self.best[pos]) {
                std::cmp::Ordering::Greater => prune = true,
                std::cmp::Ordering::Less => still_less = true,
                std::cmp::Ordering::Equal => {}
            }
        }
        if !prune {
            self.current[pos] = val;
            self.dfs(pos + 1, still_less);
        }
        if fresh {
            self.unassign(q);
        }
    }
}

fn minimiser(table: &[Row], n: usize) -> Minimiser<'_> {
    Minimiser {
        n,
        table,
        phi: [UNSET; MAXN],
        phi_inv: [UNSET; MAXN],
        next: 0,
        current: vec![0; n * n],
        best: flatten(table, n),
        best_phi_inv: std::array::from_fn(|i| i as u8),
        found: false,
    }
}

fn is_canonical(table: &[Row], n: usize) -> bool {
    let mut m = minimiser(table, n);
    m.dfs(0, false);
    !m.found
}

fn rows_of(s: &Solution) -> Vec<Row> {
    s.sigmas()
        .iter()
        .map(|p| {
            let mut r = [0u8; MAXN];
            for (i, &v) in p.images().iter().enumerate() {
                r[i] = v as u8;
            }
            r
        })
        .collect()
}

fn solution_from_rows(table: &[Row], n: usize) -> Result<Solution, SolutionError> {
    Solution::from_sigma_rows(table.iter().map(|r| r[..n].iter().map(|&v| v as usize).collect()).collect())
}

/// The lexicographically least relabelling of `s`, together with the
/// relabelling `φ` that produces it (`canonical = s.relabel(φ)`).
/// Sizes above 8 are not supported.
pub fn canonical_form(s: &Solution) -> (Solution, Permutation) {
    let n = s.n();
    assert!(n <= MAX_ENUM_N, "canonical form is limited to size {MAX_ENUM_N}");
    let table = rows_of(s);
    let mut best = flatten(&table, n);
    let mut best_phi_inv: [u8; MAXN] = std::array::from_fn(|i| i as u8);
    loop {
        let mut m = minimiser(&table, n);
        m.best = best;
        m.dfs(0, false);
        if !m.found {
            break;
        }
        best = m.best;
        best_phi_inv = m.best_phi_inv;
    }
    let phi_inv = Permutation::from_images(best_phi_inv[..n].iter().map(|&v| v as usize).collect())
        .expect("labelling is a bijection");
    let phi = phi_inv.inverse();
    let canonical = s.relabel(&phi).expect("relabelling preserves validity");
    (canonical, phi)
}

/// True when `s` is its own canonical form.
pub fn is_canonical_solution(s: &Solution) -> bool {
    s.n() <= MAX_ENUM_N && is_canonical(&rows_of(s), s.n())
}

fn collect_prefixes<'a>(s: &mut CellSearch<'a>, depth: usize, out: &mut Vec<CellSearch<'a>>) {
    if depth == 0 || s.next_cell().is_none() {
        out.push(s.clone());
        return;
    }
    s.children(&mut |c| collect_prefixes(c, depth - 1, out));
}

fn raw_tables(n: usize, up_to_iso: bool, square_free: bool) -> Vec<Vec<Row>> {
    let tables = Tables::new(n);
    let roots: Vec<usize> =
        (0..tables.perms.len()).filter(|&c| !up_to_iso || tables.std_index[c * n] as usize == c).collect();
    // fan out over the first row and two further branching levels
    let mut prefixes = Vec::new();
    for c in roots {
        let mut s = CellSearch::new(&tables, up_to_iso, square_free);
        if s.start(c) {
            collect_prefixes(&mut s, 2, &mut prefixes);
        }
    }
    let mut out: Vec<Vec<Row>> = prefixes
        .into_par_iter()
        .map(|mut s| {
            s.trail.clear();
            s.run();
            s.out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    out.sort_unstable();
    out
}

/// All solutions of size `n` passing `filter`, in lexicographic order of
/// their σ-tables. With `up_to_iso`, one canonical representative per
/// isomorphism class.
pub fn enumerate_solutions(
    n: usize,
    filter: &SolutionFilter,
    up_to_iso: bool,
) -> Result<Vec<Solution>, EnumerateError> {
    check_size(n, MAX_ENUM_N)?;
    filter.check(n)?;
    let square_free = filter.square_free == Some(true);
    let tables = raw_tables(n, up_to_iso, square_free);
    let solutions: Vec<Solution> = tables.par_iter().map(|t| solution_from_rows(t, n)).collect::<Result<_, _>>()?;
    Ok(solutions.into_iter().filter(|s| filter.matches(s)).collect())
}

pub fn count_solutions(n: usize, filter: &SolutionFilter, up_to_iso: bool) -> Result<usize, EnumerateError> {
    Ok(enumerate_solutions(n, filter, up_to_iso)?.len())
}

/// Every labelled solution of size `n ≤ 4`, by validating all `(n!)^n`
/// σ-tables with no pruning at all.
pub fn naive_oracle(n: usize) -> Result<Vec<Solution>, EnumerateError> {
    check_size(n, MAX_NAIVE_N)?;
    let perms: Vec<Permutation> = all_perms(n)
        .iter()
        .map(|r| Permutation::from_images(r[..n].iter().map(|&v| v as usize).collect()).expect("permutation"))
        .collect();
    let m = perms.len();
    let total = m.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let sigma: Vec<Permutation> = (0..n)
            .map(|_| {
                let p = perms[c % m].clone();
                c /= m;
                p
            })
            .collect();
        if let Ok(s) = Solution::from_sigma(sigma) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Least σ-table over all `n!` relabellings, computed by trying each one.
pub fn brute_force_canonical(s: &Solution) -> Vec<Vec<usize>> {
    let n = s.n();
    let mut best: Option<Vec<Vec<usize>>> = None;
    for r in all_perms(n) {
        let phi = Permutation::from_images(r[..n].iter().map(|&v| v as usize).collect()).expect("permutation");
        let phi_inv = phi.inverse();
        let table: Vec<Vec<usize>> =
            (0..n).map(|x| (0..n).map(|y| phi.at(s.sigma(phi_inv.at(x)).at(phi_inv.at(y)))).collect()).collect();
        if best.as_ref().is_none_or(|b| &table < b) {
            best = Some(table);
        }
    }
    best.expect("at least one relabelling")
}

/// Number of isomorphism classes among `solutions`, by brute-force
/// canonical tables.
pub fn count_classes_brute_force(solutions: &[Solution]) -> usize {
    solutions.iter().map(brute_force_canonical).collect::<HashSet<_>>().len()
}
