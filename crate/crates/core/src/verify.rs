//! Executable checks of structural results about solutions, run over
//! fixtures, enumerated corpora or solutions read from files.
//!
//! Every check produces a [`TheoremReport`]. A violation means either an
//! implementation bug or a counterexample, and carries the offending
//! solution in file format together with a 1-based witness.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::brace::{dehornoy_class_direct, Brace, EXHAUSTIVE_LIMIT};
use crate::cabling::{cable, cable_oracle, frozen_word, is_frozen, iterate_check, sigma_word};
use crate::enumerate::{enumerate_solutions, EnumerateError, SolutionFilter, MAX_ENUM_N};
use crate::fixtures;
use crate::format::{self, FormatError};
use crate::perm::{gcd, orbits, Partition, Permutation};
use crate::solution::Solution;

/// Largest size for the primitivity classification check.
pub const MAX_PRIMITIVITY_N: usize = 7;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("size {n} is outside 2..={max} for this check")]
    SizeOutOfRange { n: usize, max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub label: String,
    /// The solution in file format.
    pub solution: String,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub instances_checked: usize,
    pub violations: Vec<Violation>,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
    pub notes: Vec<String>,
    /// How often each implication's hypothesis held, so that vacuous
    /// passes are visible.
    pub hypotheses_met: BTreeMap<String, usize>,
}

fn seconds<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl TheoremReport {
    fn empty(id: &str) -> Self {
        TheoremReport {
            theorem_id: id.to_owned(),
            instances_checked: 0,
            violations: Vec::new(),
            elapsed: Duration::ZERO,
            notes: Vec::new(),
            hypotheses_met: BTreeMap::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn absorb(&mut self, other: TheoremReport) {
        self.instances_checked += other.instances_checked;
        self.violations.extend(other.violations);
        for (h, count) in other.hypotheses_met {
            *self.hypotheses_met.entry(h).or_default() += count;
        }
        for note in other.notes {
            if !self.notes.contains(&note) {
                self.notes.push(note);
            }
        }
    }
}

/// Violations printed per report in text form; the JSON form has all.
const SHOWN_VIOLATIONS: usize = 5;

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.is_clean() { "ok" } else { "VIOLATED" };
        write!(
            f,
            "{:<32} {:<8} instances {:>7}  violations {:>4}  {:>8.3} s",
            self.theorem_id,
            status,
            self.instances_checked,
            self.violations.len(),
            self.elapsed.as_secs_f64()
        )?;
        for note in &self.notes {
            write!(f, "\n    note: {note}")?;
        }
        for (h, count) in &self.hypotheses_met {
            write!(f, "\n    hypothesis held {count} time(s): {h}")?;
        }
        for v in self.violations.iter().take(SHOWN_VIOLATIONS) {
            write!(f, "\n    {}: {}", v.label, v.witness)?;
            for line in v.solution.lines() {
                write!(f, "\n      | {line}")?;
            }
        }
        if self.violations.len() > SHOWN_VIOLATIONS {
            write!(f, "\n    ... and {} more", self.violations.len() - SHOWN_VIOLATIONS)?;
        }
        Ok(())
    }
}

pub fn render_text(reports: &[TheoremReport]) -> String {
    let mut out: Vec<String> = reports.iter().map(ToString::to_string).collect();
    let bad = reports.iter().filter(|r| !r.is_clean()).count();
    out.push(if bad == 0 { "all checks clean".to_owned() } else { format!("{bad} check(s) with violations") });
    out.join("\n") + "\n"
}

pub fn to_json(reports: &[TheoremReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Parameters shared by the per-solution checks.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub cable_ks: Vec<usize>,
    pub iterate_ks: Vec<usize>,
    pub tau_identity_k_max: usize,
    pub samples: usize,
    pub seed: u64,
    /// Sizes at which every indecomposable solution is enumerated and
    /// checked against the T-partition restrictions.
    pub partition_sizes: Vec<usize>,
    pub primitivity_sizes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cable_ks: (1..=4).collect(),
            iterate_ks: (1..=3).collect(),
            tau_identity_k_max: 5,
            samples: 2000,
            seed: 0x5eed,
            partition_sizes: Vec::new(),
            primitivity_sizes: Vec::new(),
        }
    }
}

pub type Labelled = (String, Solution);

/// Accumulates one report.
struct Check {
    report: TheoremReport,
    label: String,
}

impl Check {
    fn new(id: &str) -> Self {
        Check { report: TheoremReport::empty(id), label: String::new() }
    }

    fn instance(&mut self) {
        self.report.instances_checked += 1;
    }

    fn fail(&mut self, s: &Solution, witness: impl Into<String>) {
        self.report.violations.push(Violation {
            label: self.label.clone(),
            solution: format::serialize_solution(s),
            witness: witness.into(),
        });
    }

    fn hypothesis(&mut self, what: &str) {
        *self.report.hypotheses_met.entry(what.to_owned()).or_default() += 1;
    }

    fn note(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.report.notes.contains(&note) {
            self.report.notes.push(note);
        }
    }
}

fn timed(id: &str, f: impl FnOnce(&mut Check)) -> TheoremReport {
    let start = Instant::now();
    let mut c = Check::new(id);
    c.label = "input".to_owned();
    f(&mut c);
    c.report.elapsed = start.elapsed();
    c.report
}

fn p1(x: usize) -> usize {
    x + 1
}

/// The largest divisor of `m` coprime to `k`.
pub fn coprime_part(mut m: u64, k: u64) -> u64 {
    loop {
        let g = gcd(m, k);
        if g == 1 {
            return m;
        }
        m /= g;
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn distinct_primes(n: usize) -> Option<(usize, usize)> {
    let p = (2..n).find(|&d| n.is_multiple_of(d))?;
    let q = n / p;
    (is_prime(q) && q != p).then_some((p, q))
}

// ---------------------------------------------------------------- cabling

fn check_cabling_valid(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    let mut seen = HashSet::new();
    for x in 0..s.n() {
        let word = frozen_word(s, x, k).expect("k >= 1");
        if !is_frozen(s, word.letters()) {
            c.fail(s, format!("k={k}: word of {} is not frozen", p1(x)));
        }
        if !seen.insert(word.letters().to_vec()) {
            c.fail(s, format!("k={k}: word of {} repeats an earlier word", p1(x)));
        }
    }
    if let Err(e) = cable(s, k) {
        c.fail(s, format!("k={k}: {e}"));
    }
}

fn first_difference(a: &Solution, b: &Solution) -> String {
    for x in 0..a.n() {
        if a.sigma(x) != b.sigma(x) {
            return format!("sigma_{} is {} versus {}", p1(x), a.sigma(x), b.sigma(x));
        }
        if a.tau(x) != b.tau(x) {
            return format!("tau_{} is {} versus {}", p1(x), a.tau(x), b.tau(x));
        }
    }
    "tables agree".to_owned()
}

fn check_cabling_oracle(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    match (cable(s, k), cable_oracle(s, k)) {
        (Ok(a), Ok(b)) if a == b => {}
        (Ok(a), Ok(b)) => c.fail(s, format!("k={k}: formula and oracle differ: {}", first_difference(&a, &b))),
        (Err(e), _) | (_, Err(e)) => c.fail(s, format!("k={k}: {e}")),
    }
}

fn check_cabling_diagonal(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    match cable(s, k) {
        Ok(ck) => {
            let want = s.diagonal().pow(k as i64);
            if ck.diagonal() != want {
                c.fail(s, format!("k={k}: cabled diagonal {} but T^k = {}", ck.diagonal(), want));
            }
        }
        Err(e) => c.fail(s, format!("k={k}: {e}")),
    }
}

fn orbit_sizes(s: &Solution) -> Vec<u64> {
    let mut size = vec![0; s.n()];
    for orbit in orbits(s.sigmas(), s.n()).expect("n >= 1") {
        for &x in &orbit {
            size[x] = orbit.len() as u64;
        }
    }
    size
}

fn check_cabling_orbits(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    let ck = match cable(s, k) {
        Ok(ck) => ck,
        Err(e) => return c.fail(s, format!("k={k}: {e}")),
    };
    let (before, after) = (orbit_sizes(s), orbit_sizes(&ck));
    for x in 0..s.n() {
        let mk = coprime_part(before[x], k as u64);
        if after[x] % mk != 0 {
            c.fail(
                s,
                format!(
                    "k={k}, x={}: cabled orbit size {} is not a multiple of {mk} (orbit size {})",
                    p1(x),
                    after[x],
                    before[x]
                ),
            );
        }
    }
}

fn check_cabling_iterate(c: &mut Check, s: &Solution, k: usize, k2: usize) {
    c.instance();
    match iterate_check(s, k, k2) {
        Ok(true) => {}
        Ok(false) => c.fail(s, format!("cabling by {k} then {k2} differs from cabling by {}", k * k2)),
        Err(e) => c.fail(s, format!("k={k}, k'={k2}: {e}")),
    }
}

fn check_cabling_retract(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    let ck = match cable(s, k) {
        Ok(ck) => ck,
        Err(e) => return c.fail(s, format!("k={k}: {e}")),
    };
    for x in 0..s.n() {
        for y in (x + 1)..s.n() {
            if s.sigma(x) == s.sigma(y) && ck.sigma(x) != ck.sigma(y) {
                c.fail(s, format!("k={k}: sigma_{0} = sigma_{1} but the cabled rows differ", p1(x), p1(y)));
            }
        }
    }
    match (s.retract(), ck.retract()) {
        (Ok(a), Ok(b)) if b.class_count() > a.class_count() => c.fail(
            s,
            format!("k={k}: cabled retraction has {} classes, more than {}", b.class_count(), a.class_count()),
        ),
        (Ok(_), Ok(_)) => {}
        (Err(e), _) | (_, Err(e)) => c.fail(s, format!("k={k}: retraction failed: {e}")),
    }
}

fn check_cabling_coprime(c: &mut Check, s: &Solution, k: usize) {
    c.instance();
    if s.is_decomposable() || gcd(k as u64, s.n() as u64) != 1 {
        return;
    }
    c.hypothesis("indecomposable with gcd(k, n) = 1");
    match cable(s, k) {
        Ok(ck) if ck.is_decomposable() => c.fail(s, format!("k={k}: cabled solution is decomposable")),
        Ok(_) => {}
        Err(e) => c.fail(s, format!("k={k}: {e}")),
    }
}

pub fn verify_cabling_valid(s: &Solution, k: usize) -> TheoremReport {
    timed("cabling-valid", |c| check_cabling_valid(c, s, k))
}

/// Both parts: the cabled diagonal is `T^k`, and orbit sizes grow by the
/// part of the original orbit size coprime to `k`.
pub fn verify_cabling_diagonal_orbits(s: &Solution, k: usize) -> TheoremReport {
    timed("cabling-diagonal-orbits", |c| {
        check_cabling_diagonal(c, s, k);
        check_cabling_orbits(c, s, k);
    })
}

// ---------------------------------------------------------- decomposability

fn check_rump(c: &mut Check, s: &Solution) {
    c.instance();
    if s.is_square_free() {
        c.hypothesis("square-free");
        if !s.is_decomposable() {
            c.fail(s, "square-free but indecomposable");
        }
    }
}

fn check_cms(c: &mut Check, s: &Solution) {
    c.instance();
    let order = s.diagonal().order();
    if gcd(order, s.n() as u64) == 1 {
        c.hypothesis("gcd(|T|, n) = 1");
        if !s.is_decomposable() {
            c.fail(s, format!("|T| = {order} is coprime to n but the solution is indecomposable"));
        }
    }
}

fn check_partition_criteria(c: &mut Check, s: &Solution) {
    c.instance();
    let n = s.n();
    let parts = s.t_partition();
    let p = parts.parts();
    let forces_decomposable = p == [n - 1, 1]
        || (n % 2 == 1 && n >= 3 && p == [n - 2, 1, 1])
        || (!n.is_multiple_of(3) && n >= 4 && p == [n - 3, 1, 1, 1]);
    if forces_decomposable && !s.is_decomposable() {
        c.fail(s, format!("T-partition ({parts}) forces decomposability"));
    }
    if p == [n] && s.is_decomposable() {
        c.fail(s, format!("T-partition ({parts}) forces indecomposability"));
    }
}

pub fn verify_rump(s: &Solution) -> TheoremReport {
    timed("rump", |c| check_rump(c, s))
}

pub fn verify_cms(s: &Solution) -> TheoremReport {
    timed("cms", |c| check_cms(c, s))
}

/// The ways in which `parts` breaks the T-partition restrictions that hold
/// for indecomposable solutions of size `n`.
pub fn partition_restriction_failures(n: usize, parts: &Partition) -> Vec<String> {
    let mut out = Vec::new();
    let p = parts.parts();
    let g = |a: usize, b: usize| gcd(a as u64, b as u64);
    if let Some((p1_, q1_)) = distinct_primes(n) {
        for (pp, qq) in [(p1_, q1_), (q1_, p1_)] {
            for &s_ in p {
                if (pp - 1) * qq < s_ && s_ < pp * qq && g(s_, pp) == 1 {
                    out.push(format!(
                        "n = {pp}*{qq}: part {s_} lies strictly between {} and {n} and is coprime to {pp}",
                        (pp - 1) * qq
                    ));
                }
            }
        }
        let (small, large) = (p1_.min(q1_), p1_.max(q1_));
        let only_large = p.iter().all(|x| x % large == 0);
        let some_small = p.iter().any(|x| x % small == 0);
        if !only_large && !some_small {
            out.push(format!(
                "n = {small}*{large}: parts are neither all multiples of {large} nor include a multiple of {small}"
            ));
        }
    }
    if p.len() == 3 {
        for ai in 0..3 {
            let a = p[ai];
            if !n.is_multiple_of(a) {
                continue;
            }
            let b = n / a;
            for ci in (0..3).filter(|&i| i != ai) {
                let c_ = p[ci];
                let c2 = p[3 - ai - ci];
                let coprime = g(a, b) == 1 && g(a, c_) == 1 && g(a, c2) == 1 && g(b, c_) == 1 && g(b, c2) == 1;
                if coprime && b > a + c_ {
                    out.push(format!("n = {a}*{b}, parts a={a}, c={c_}, c'={c2} pairwise coprime with b > a + c"));
                }
            }
        }
        if n.is_multiple_of(2) && (n / 2) % 2 == 1 {
            for ei in 0..3 {
                if !p[ei].is_multiple_of(2) {
                    continue;
                }
                let a = p[ei] / 2;
                let mut rest: Vec<usize> = (0..3).filter(|&i| i != ei).map(|i| p[i]).collect();
                rest.sort_unstable();
                let (b, c_) = (rest[0], rest[1]);
                if g(n, a * b * c_) == 1 && 2 * a + b != c_ {
                    out.push(format!("n = 2*{}: parts (2*{a}, {b}, {c_}) coprime to n but 2a + b != c", n / 2));
                }
            }
        }
    }
    if n == 30 && p == [21, 7, 1, 1] {
        out.push("n = 30 with T-partition (21 7 1 1)".to_owned());
    }
    out
}

const LARGE_SIZES_NOTE: &str = "sizes 14, 15, 18 and 22, where these restrictions first exclude partitions, \
    are beyond exhaustive enumeration; there they are checked only on supplied solutions";
const SIZE_30_NOTE: &str = "size 30 with T-partition (21 7 1 1): out of desk scale, implication not exercised \
    unless such a solution is supplied";

fn check_partition_restrictions(c: &mut Check, s: &Solution) {
    c.instance();
    c.note(LARGE_SIZES_NOTE);
    c.note(SIZE_30_NOTE);
    if s.is_decomposable() {
        return;
    }
    for failure in partition_restriction_failures(s.n(), &s.t_partition()) {
        c.fail(s, failure);
    }
}

/// Enumerates every indecomposable solution of size `n` up to
/// isomorphism and checks the T-partition restrictions on each.
pub fn verify_partition_restrictions(n: usize) -> Result<TheoremReport, VerifyError> {
    if !(2..=MAX_ENUM_N).contains(&n) {
        return Err(VerifyError::SizeOutOfRange { n, max: MAX_ENUM_N });
    }
    let solutions = enumerate_solutions(n, &SolutionFilter::indecomposable(), true)?;
    let report = timed("t-partition-restrictions", |c| {
        let mut observed = BTreeSet::new();
        for (i, s) in solutions.iter().enumerate() {
            c.label = format!("n{n}-indecomposable-{}", i + 1);
            observed.insert(std::cmp::Reverse(s.t_partition()));
            check_partition_restrictions(c, s);
        }
        let list: Vec<String> = observed.iter().map(|p| format!("({})", p.0)).collect();
        c.note(format!("n = {n}: {} indecomposable classes, T-partitions {}", solutions.len(), list.join(", ")));
    });
    Ok(report)
}

// ------------------------------------------------------------ diagonal map

fn check_diagonal_identities(c: &mut Check, s: &Solution) {
    c.instance();
    let t = s.diagonal();
    let t_inv = t.inverse();
    for x in 0..s.n() {
        if s.r(t.at(x), x) != (t.at(x), x) {
            c.fail(s, format!("r(T({0}), {0}) != (T({0}), {0})", p1(x)));
        }
        if &t * s.sigma(x) != &s.tau(x).inverse() * &t {
            c.fail(s, format!("T sigma_{0} != tau_{0}^-1 T", p1(x)));
        }
    }
    if &t * &s.inverse_diagonal() != Permutation::identity(s.n()) || t_inv != s.inverse_diagonal() {
        c.fail(s, "U is not the inverse of T");
    }
}

fn check_t_orbits(c: &mut Check, s: &Solution) {
    c.instance();
    let mut orbit_of = vec![0; s.n()];
    for (i, orbit) in orbits(s.sigmas(), s.n()).expect("n >= 1").iter().enumerate() {
        for &x in orbit {
            orbit_of[x] = i;
        }
    }
    for cycle in s.diagonal().cycles() {
        if cycle.iter().any(|&x| orbit_of[x] != orbit_of[cycle[0]]) {
            let pts: Vec<String> = cycle.iter().map(|&x| p1(x).to_string()).collect();
            c.fail(s, format!("T-cycle ({}) meets several orbits", pts.join(" ")));
        }
    }
}

pub fn verify_t_orbit_containment(s: &Solution) -> TheoremReport {
    timed("t-cycles-in-orbits", |c| check_t_orbits(c, s))
}

/// `T^k(τ_x(y)) = τ_{σ_{ky}(x)}(T^k(y))` with `σ_{ky}` the σ-extension to
/// the frozen word `ky`, taken literally.
fn check_diagonal_tau_identity(c: &mut Check, s: &Solution, k_max: usize) {
    let t = s.diagonal();
    for k in 1..=k_max {
        c.instance();
        let tk = t.pow(k as i64);
        let mut failures = Vec::new();
        for y in 0..s.n() {
            let word = sigma_word(s, k, y).expect("k >= 1");
            for x in 0..s.n() {
                let lhs = tk.at(s.tau(x).at(y));
                let rhs = s.tau(word.at(x)).at(tk.at(y));
                if lhs != rhs {
                    failures.push(format!("x={}, y={}: {} != {}", p1(x), p1(y), p1(lhs), p1(rhs)));
                }
            }
        }
        if let Some(first) = failures.first() {
            c.fail(s, format!("k={k}, {first} ({} failing pairs)", failures.len()));
        }
    }
}

/// `T^k(τ_x(y)) = τ_{π(x)}(T^k(y))` with `π = σ_{T^{k-1}(y)} ⋯ σ_{T(y)} σ_y`,
/// the form obtained by iterating the case `k = 1`. The product is built
/// letter by letter and also compared with the frozen-word extension at
/// `T^{k-1}(y)`.
fn check_diagonal_tau_identity_iterated(c: &mut Check, s: &Solution, k_max: usize) {
    let t = s.diagonal();
    for k in 1..=k_max {
        c.instance();
        let tk = t.pow(k as i64);
        let mut failures = Vec::new();
        for y in 0..s.n() {
            let mut product = s.sigma(y).clone();
            let mut front = y;
            for _ in 1..k {
                front = t.at(front);
                product = s.sigma(front) * &product;
            }
            if sigma_word(s, k, front).expect("k >= 1") != product {
                c.fail(s, format!("k={k}, y={}: product differs from the word extension at {}", p1(y), p1(front)));
            }
            for x in 0..s.n() {
                let lhs = tk.at(s.tau(x).at(y));
                let rhs = s.tau(product.at(x)).at(tk.at(y));
                if lhs != rhs {
                    failures.push(format!("x={}, y={}: {} != {}", p1(x), p1(y), p1(lhs), p1(rhs)));
                }
            }
        }
        if let Some(first) = failures.first() {
            c.fail(s, format!("k={k}, {first} ({} failing pairs)", failures.len()));
        }
    }
}

pub fn verify_diagonal_tau_identity(s: &Solution, k_max: usize) -> TheoremReport {
    timed("diagonal-tau-identity", |c| check_diagonal_tau_identity(c, s, k_max))
}

pub fn verify_diagonal_tau_identity_iterated(s: &Solution, k_max: usize) -> TheoremReport {
    timed("diagonal-tau-identity-iterated", |c| check_diagonal_tau_identity_iterated(c, s, k_max))
}

// ------------------------------------------------------------------ braces

fn brace_or_fail(c: &mut Check, s: &Solution) -> Option<Brace> {
    match Brace::new(s) {
        Ok(b) => Some(b),
        Err(e) => {
            c.fail(s, format!("brace construction failed: {e}"));
            None
        }
    }
}

/// All pairs of indices for small groups, a seeded sample otherwise.
fn pairs(m: usize, samples: usize, seed: u64) -> Vec<(usize, usize)> {
    if m <= EXHAUSTIVE_LIMIT {
        (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
    }
}

fn check_dehornoy(c: &mut Check, s: &Solution) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    let class = b.dehornoy_class();
    match dehornoy_class_direct(s) {
        Ok(direct) if direct != class => c.fail(s, format!("lcm of additive orders {class}, direct scan {direct}")),
        Ok(_) => {}
        Err(e) => c.fail(s, format!("direct scan failed: {e}")),
    }
    let t_order = s.diagonal().order();
    if class % t_order != 0 {
        c.fail(s, format!("|T| = {t_order} does not divide the class {class}"));
    }
    if !s.is_decomposable() {
        let orders: BTreeSet<u64> = (0..s.n()).map(|x| b.per_point_class(x)).collect();
        if orders.len() > 1 {
            c.fail(s, format!("indecomposable but generator orders differ: {orders:?}"));
        }
    }
}

pub fn verify_dehornoy(s: &Solution) -> TheoremReport {
    timed("dehornoy-class", |c| check_dehornoy(c, s))
}

fn check_brace_axiom(c: &mut Check, s: &Solution, cfg: &RunConfig) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    let report = b.verify_brace_axiom(cfg.samples, cfg.seed);
    if !report.exhaustive {
        c.note(format!("groups above {EXHAUSTIVE_LIMIT} elements sampled with {} triples", cfg.samples));
    }
    for (x, y, z) in report.witnesses.iter().take(5) {
        c.fail(s, format!("a = {x}, b = {y}, c = {z}"));
    }
}

fn check_brace_commutative(c: &mut Check, s: &Solution, cfg: &RunConfig) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    for (g, h) in pairs(b.len(), cfg.samples, cfg.seed) {
        if b.add_idx(g, h) != b.add_idx(h, g) {
            return c.fail(s, format!("{} + {} is not commutative", b.elements()[g], b.elements()[h]));
        }
    }
}

fn check_brace_lambda(c: &mut Check, s: &Solution, cfg: &RunConfig) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    let m = b.len();
    let el = b.elements();
    let n = s.n();
    for g in 0..m {
        for y in 0..n {
            if b.lambda_idx(g, b.generator(y)) != b.generator(el[g].at(y)) {
                return c.fail(s, format!("lambda_{}(sigma_{}) != sigma of its image", el[g], p1(y)));
            }
        }
    }
    for (g, h) in pairs(m, cfg.samples, cfg.seed) {
        if b.compose_idx(g, h) != b.add_idx(g, b.lambda_idx(g, h)) {
            return c.fail(s, format!("{} o {} != a + lambda_a(b)", el[g], el[h]));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a);
    for _ in 0..cfg.samples.min(m * m * m) {
        let (g, h, h2) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
        let lhs = b.lambda_idx(g, b.add_idx(h, h2));
        let rhs = b.add_idx(b.lambda_idx(g, h), b.lambda_idx(g, h2));
        if lhs != rhs {
            return c.fail(s, format!("lambda_{} is not additive on {}, {}", el[g], el[h], el[h2]));
        }
        let composed = b.lambda_idx(b.compose_idx(g, h), h2);
        if composed != b.lambda_idx(g, b.lambda_idx(h, h2)) {
            return c.fail(s, format!("lambda_({} o {}) != lambda composition on {}", el[g], el[h], el[h2]));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for k in 1..=cfg.cable_ks.iter().copied().max().unwrap_or(1) as u64 {
                let lhs = b.lambda_idx(b.generator(x), b.multiple_idx(b.generator(y), k));
                let rhs = b.multiple_idx(b.generator(s.sigma(x).at(y)), k);
                if lhs != rhs {
                    return c.fail(s, format!("lambda_sigma_{}({k} sigma_{}) != {k} sigma_of_image", p1(x), p1(y)));
                }
            }
        }
    }
}

fn check_orders_same_orbit(c: &mut Check, s: &Solution) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    for orbit in orbits(s.sigmas(), s.n()).expect("n >= 1") {
        let o = b.per_point_class(orbit[0]);
        for &x in &orbit {
            if b.per_point_class(x) != o {
                c.fail(
                    s,
                    format!("sigma_{} has order {o}, sigma_{} has {}", p1(orbit[0]), p1(x), b.per_point_class(x)),
                );
            }
        }
    }
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

fn check_brace_hall(c: &mut Check, s: &Solution) {
    c.instance();
    let Some(b) = brace_or_fail(c, s) else { return };
    let m = b.len();
    for a in divisors(m) {
        let bb = m / a;
        if a == 1 || bb == 1 || gcd(a as u64, bb as u64) != 1 {
            continue;
        }
        c.hypothesis("group order splits into coprime factors");
        match b.sub_brace_cabling(a as u64) {
            Ok(sub) if sub.len() != bb => {
                c.fail(s, format!("|G| = {m} = {a}*{bb} but the {a}-fold multiples form {} elements", sub.len()))
            }
            Ok(_) => {}
            Err(e) => c.fail(s, format!("k = {a}: {e}")),
        }
    }
    let cyclic = b.elements().iter().any(|g| b.additive_order(g).expect("element of the group") == m as u64);
    if cyclic && m > 1 {
        c.hypothesis("cyclic additive group");
        for d in divisors(m) {
            match b.sub_brace_cabling((m / d) as u64) {
                Ok(sub) if sub.len() != d => {
                    c.fail(s, format!("cyclic (G,+) of order {m}: expected a sub-brace of size {d}, got {}", sub.len()))
                }
                Ok(_) => {}
                Err(e) => c.fail(s, format!("k = {}: {e}", m / d)),
            }
        }
    }
}

fn check_cabled_orders(c: &mut Check, s: &Solution, cfg: &RunConfig) {
    let Some(b) = brace_or_fail(c, s) else { return };
    for &k in &cfg.cable_ks {
        c.instance();
        let ck = match cable(s, k) {
            Ok(ck) => ck,
            Err(e) => return c.fail(s, format!("k={k}: {e}")),
        };
        let Some(bk) = brace_or_fail(c, &ck) else { return };
        for x in 0..s.n() {
            let o = b.per_point_class(x);
            let want = o / gcd(o, k as u64);
            if bk.per_point_class(x) != want {
                c.fail(s, format!("k={k}, x={}: cabled order {} but expected {want}", p1(x), bk.per_point_class(x)));
            }
        }
    }
}

// ------------------------------------------------------------- primitivity

/// Every primitive solution of size `n` is a shift solution of prime size.
pub fn verify_primitivity_classification(n: usize) -> Result<TheoremReport, VerifyError> {
    if !(2..=MAX_PRIMITIVITY_N).contains(&n) {
        return Err(VerifyError::SizeOutOfRange { n, max: MAX_PRIMITIVITY_N });
    }
    let solutions = enumerate_solutions(n, &SolutionFilter::indecomposable(), true)?;
    let shift = Solution::shift(n).expect("n >= 2");
    Ok(timed("primitive-classification", |c| {
        let mut primitive = 0;
        for (i, s) in solutions.iter().enumerate() {
            c.label = format!("n{n}-indecomposable-{}", i + 1);
            c.instance();
            if !s.is_primitive().expect("indecomposable") {
                continue;
            }
            primitive += 1;
            if !is_prime(n) {
                c.fail(s, format!("primitive solution of composite size {n}"));
            } else if s.is_isomorphic(&shift).is_none() {
                c.fail(s, "primitive but not isomorphic to the shift solution");
            }
        }
        if is_prime(n) && primitive != 1 {
            c.label = format!("n{n}");
            c.fail(&shift, format!("expected exactly one primitive class at prime size {n}, found {primitive}"));
        }
        c.note(format!("n = {n}: {} indecomposable classes, {primitive} primitive", solutions.len()));
    }))
}

// --------------------------------------------------------------- corpora

#[derive(Clone, Debug)]
pub enum CorpusSpec {
    Fixtures,
    /// Every solution of size `2..=max_n`, up to isomorphism.
    Enumerated {
        max_n: usize,
    },
    Directory(PathBuf),
    Solutions(Vec<Labelled>),
}

pub fn load_corpus(spec: &CorpusSpec) -> Result<Vec<Labelled>, VerifyError> {
    Ok(match spec {
        CorpusSpec::Fixtures => fixtures::named().into_iter().map(|(name, s)| (name.to_owned(), s)).collect(),
        CorpusSpec::Enumerated { max_n } => {
            let mut out = Vec::new();
            for n in 2..=*max_n {
                for (i, s) in enumerate_solutions(n, &SolutionFilter::none(), true)?.into_iter().enumerate() {
                    out.push((format!("n{n}-{}", i + 1), s));
                }
            }
            out
        }
        CorpusSpec::Directory(dir) => format::load_corpus(dir)?,
        CorpusSpec::Solutions(list) => list.clone(),
    })
}

type PerSolution = fn(&mut Check, &Solution, &RunConfig);

fn per_solution_checks() -> Vec<(&'static str, PerSolution)> {
    vec![
        ("brace-axiom", check_brace_axiom),
        ("brace-cabled-orders", check_cabled_orders),
        ("brace-commutative", check_brace_commutative),
        ("brace-hall-subgroups", |c, s, _| check_brace_hall(c, s)),
        ("brace-lambda", check_brace_lambda),
        ("brace-orders-same-orbit", |c, s, _| check_orders_same_orbit(c, s)),
        ("cabling-coprime-indecomposable", |c, s, cfg| {
            cfg.cable_ks.iter().for_each(|&k| check_cabling_coprime(c, s, k))
        }),
        ("cabling-diagonal", |c, s, cfg| cfg.cable_ks.iter().for_each(|&k| check_cabling_diagonal(c, s, k))),
        ("cabling-iterate", |c, s, cfg| {
            for &k in &cfg.iterate_ks {
                for &k2 in &cfg.iterate_ks {
                    check_cabling_iterate(c, s, k, k2);
                }
            }
        }),
        ("cabling-oracle", |c, s, cfg| cfg.cable_ks.iter().for_each(|&k| check_cabling_oracle(c, s, k))),
        ("cabling-orbits", |c, s, cfg| cfg.cable_ks.iter().for_each(|&k| check_cabling_orbits(c, s, k))),
        ("cabling-retract", |c, s, cfg| cfg.cable_ks.iter().for_each(|&k| check_cabling_retract(c, s, k))),
        ("cabling-valid", |c, s, cfg| cfg.cable_ks.iter().for_each(|&k| check_cabling_valid(c, s, k))),
        ("cms", |c, s, _| check_cms(c, s)),
        ("dehornoy-class", |c, s, _| check_dehornoy(c, s)),
        ("diagonal-identities", |c, s, _| check_diagonal_identities(c, s)),
        ("diagonal-tau-identity", |c, s, cfg| check_diagonal_tau_identity(c, s, cfg.tau_identity_k_max)),
        ("diagonal-tau-identity-iterated", |c, s, cfg| {
            check_diagonal_tau_identity_iterated(c, s, cfg.tau_identity_k_max)
        }),
        ("rump", |c, s, _| check_rump(c, s)),
        ("t-cycles-in-orbits", |c, s, _| check_t_orbits(c, s)),
        ("t-partition-criteria", |c, s, _| check_partition_criteria(c, s)),
        ("t-partition-restrictions", |c, s, _| check_partition_restrictions(c, s)),
    ]
}

/// Runs one per-solution check over a corpus.
fn run_check(id: &str, check: PerSolution, corpus: &[Labelled], cfg: &RunConfig) -> TheoremReport {
    let start = Instant::now();
    let parts: Vec<TheoremReport> = corpus
        .par_iter()
        .map(|(label, s)| {
            let mut c = Check::new(id);
            c.label = label.clone();
            check(&mut c, s, cfg);
            c.report
        })
        .collect();
    let mut report = TheoremReport::empty(id);
    for part in parts {
        report.absorb(part);
    }
    if corpus.is_empty() {
        report.notes.push("warning: empty corpus, nothing was checked".to_owned());
    }
    report.elapsed = start.elapsed();
    report
}

/// Names of the per-solution checks, in report order.
pub fn check_ids() -> Vec<&'static str> {
    per_solution_checks().into_iter().map(|(id, _)| id).collect()
}

/// Runs a single named per-solution check over `corpus`.
pub fn run_named(id: &str, corpus: &[Labelled], cfg: &RunConfig) -> Option<TheoremReport> {
    per_solution_checks().into_iter().find(|(name, _)| *name == id).map(|(_, f)| run_check(id, f, corpus, cfg))
}

/// Every per-solution check over the corpus, plus the enumeration-level
/// checks requested by `cfg`, ordered by identifier.
pub fn run_all(spec: &CorpusSpec, cfg: &RunConfig) -> Result<Vec<TheoremReport>, VerifyError> {
    let corpus = load_corpus(spec)?;
    let mut reports: Vec<TheoremReport> =
        per_solution_checks().into_iter().map(|(id, f)| run_check(id, f, &corpus, cfg)).collect();
    for &n in &cfg.partition_sizes {
        let extra = verify_partition_restrictions(n)?;
        let target = reports.iter_mut().find(|r| r.theorem_id == extra.theorem_id).expect("report exists");
        target.elapsed += extra.elapsed;
        target.absorb(extra);
    }
    if !cfg.primitivity_sizes.is_empty() {
        let mut report = TheoremReport::empty("primitive-classification");
        for &n in &cfg.primitivity_sizes {
            let extra = verify_primitivity_classification(n)?;
            report.elapsed += extra.elapsed;
            report.absorb(extra);
        }
        reports.push(report);
    }
    reports.push(mutation_sentinel(cfg.seed));
    reports.sort_by(|a, b| a.theorem_id.cmp(&b.theorem_id));
    Ok(reports)
}

// -------------------------------------------------------------- sentinel

/// The σ-table of the size-8 fixture with two images swapped in one
/// seeded row, 0-based.
pub fn corrupted_s8_rows(seed: u64) -> (Vec<Vec<usize>>, usize) {
    let mut rows: Vec<Vec<usize>> = fixtures::s8().sigmas().iter().map(|p| p.images().to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = rng.gen_range(0..rows.len());
    let a = rng.gen_range(0..8);
    let b = (a + rng.gen_range(1..8)) % 8;
    rows[x].swap(a, b);
    (rows, x)
}

/// Corrupts the size-8 fixture in several seeded ways and requires every
/// corruption to be rejected by validation or flagged by a verifier.
pub fn mutation_sentinel(seed: u64) -> TheoremReport {
    timed("mutation-sentinel", |c| {
        let original = fixtures::s8();
        let mut rejected = 0;
        for i in 0..16 {
            c.instance();
            let (rows, x) = corrupted_s8_rows(seed.wrapping_add(i));
            match Solution::from_sigma_rows(rows) {
                Err(_) => rejected += 1,
                Ok(s) => {
                    let flagged = s.diagonal() != original.diagonal() || s.is_isomorphic(&original).is_none();
                    if !flagged {
                        c.label = format!("s8-mutant-{i}");
                        c.fail(&s, format!("corrupted row {} went unnoticed", p1(x)));
                    }
                }
            }
        }
        c.note(format!("{rejected} of 16 corruptions rejected by validation"));
    })
}
