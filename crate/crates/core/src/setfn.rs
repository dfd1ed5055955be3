//! Ground sets, subset masks, and set-function oracles.
//!
//! The solvers in this crate maximize a difference f(A) = g(A) - l(A) where
//! g is non-negative submodular and l is non-negative modular. Everything a
//! solver learns about g goes through [`SetFunction::eval`], and every such
//! call increments an atomic query counter so that query-complexity claims
//! can be audited after the fact. Evaluations of the modular cost l are
//! arithmetic on a weight vector and are deliberately not counted.
//!
//! Four oracle families are provided:
//!
//! * directed cut: g(A) = total weight of arcs leaving A (non-monotone
//!   submodular for any non-negative arc weights),
//! * weighted coverage: g(A) = total weight of universe items covered by A,
//! * explicit table: g given by a value per subset, capped at n <= 20 and
//!   checked for submodularity and non-negativity at construction,
//! * modular: g(A) = sum of per-element weights.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::error::{Error, Result};

/// Ground sets larger than this refuse exact enumeration (tables, brute force).
pub const EXACT_MAX_N: usize = 20;

/// The ground set {0, 1, ..., n-1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> GroundSet {
        assert!(n >= 1, "ground set must be non-empty");
        GroundSet { n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }
}

/// A subset of the ground set, stored as a dense bitmask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl SubsetMask {
    pub fn empty(n: usize) -> SubsetMask {
        assert!(n >= 1);
        SubsetMask {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> SubsetMask {
        let mut m = SubsetMask::empty(n);
        for w in 0..m.words.len() {
            m.words[w] = !0u64;
        }
        // Clear bits past n so equality and popcounts stay exact.
        let tail = n % 64;
        if tail != 0 {
            *m.words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        m
    }

    pub fn singleton(n: usize, e: usize) -> SubsetMask {
        let mut m = SubsetMask::empty(n);
        m.insert(e);
        m
    }

    pub fn from_elements(n: usize, elements: &[usize]) -> SubsetMask {
        let mut m = SubsetMask::empty(n);
        for &e in elements {
            m.insert(e);
        }
        m
    }

    /// Builds the subset whose characteristic vector is the low n bits of `bits`.
    /// Only meaningful for n <= 64.
    pub fn from_bits(n: usize, bits: u64) -> SubsetMask {
        assert!(n <= 64);
        if n < 64 {
            assert!(bits < (1u64 << n), "bits out of range for ground set");
        }
        let mut m = SubsetMask::empty(n);
        m.words[0] = bits;
        m
    }

    /// Characteristic bits of the subset; inverse of [`SubsetMask::from_bits`].
    pub fn to_bits(&self) -> u64 {
        assert!(self.n <= 64);
        self.words[0]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, e: usize) -> bool {
        assert!(e < self.n);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.n);
        self.words[e / 64] |= 1u64 << (e % 64);
    }

    pub fn remove(&mut self, e: usize) {
        assert!(e < self.n);
        self.words[e / 64] &= !(1u64 << (e % 64));
    }

    pub fn with(&self, e: usize) -> SubsetMask {
        let mut m = self.clone();
        m.insert(e);
        m
    }

    pub fn without(&self, e: usize) -> SubsetMask {
        let mut m = self.clone();
        m.remove(e);
        m
    }

    pub fn complement(&self) -> SubsetMask {
        let mut m = SubsetMask::full(self.n);
        for (w, &word) in m.words.iter_mut().zip(self.words.iter()) {
            *w &= !word;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> Elements<'_> {
        Elements {
            words: &self.words,
            wi: 0,
            cur: self.words[0],
        }
    }

    pub fn elements(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// Ascending iterator over the elements of a [`SubsetMask`].
pub struct Elements<'a> {
    words: &'a [u64],
    wi: usize,
    cur: u64,
}

impl Iterator for Elements<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.cur == 0 {
            self.wi += 1;
            if self.wi >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.wi];
        }
        let bit = self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        Some(self.wi * 64 + bit)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Canonical order used for deterministic tie-breaking: smaller cardinality
/// first, then lexicographic on the ascending element list.
impl Ord for SubsetMask {
    fn cmp(&self, other: &SubsetMask) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &SubsetMask) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
struct Arc {
    from: usize,
    to: usize,
    weight: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    DirectedCut {
        arcs: Vec<Arc>,
    },
    Coverage {
        item_weights: Vec<f64>,
        element_items: Vec<Vec<u64>>,
    },
    Explicit {
        table: Vec<f64>,
    },
    Modular {
        weights: Vec<f64>,
    },
}

/// A set-function oracle with an atomic query counter.
///
/// [`SetFunction::eval`] is the counted entry point every solver uses;
/// [`SetFunction::eval_silent`] computes the same value without touching the
/// counter and exists for diagnostics (exact extensions, brute-force
/// optimization, test assertions) that must not distort query audits.
pub struct SetFunction {
    n: usize,
    kind: Kind,
    queries: AtomicU64,
}

impl Clone for SetFunction {
    /// Cloning copies the function parameters and the current counter value.
    /// Call [`SetFunction::reset_query_count`] on the clone for fresh audits.
    fn clone(&self) -> SetFunction {
        SetFunction {
            n: self.n,
            kind: self.kind.clone(),
            queries: AtomicU64::new(self.queries.load(AtomicOrdering::Relaxed)),
        }
    }
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::DirectedCut { arcs } => format!("directed_cut[{} arcs]", arcs.len()),
            Kind::Coverage { item_weights, .. } => {
                format!("coverage[{} items]", item_weights.len())
            }
            Kind::Explicit { .. } => "explicit".to_string(),
            Kind::Modular { .. } => "modular".to_string(),
        };
        write!(
            f,
            "SetFunction(n={}, {kind}, queries={})",
            self.n,
            self.query_count()
        )
    }
}

impl SetFunction {
    /// Cut function of a weighted digraph: g(A) = sum of w(u, v) over arcs
    /// with u in A and v outside A. Self-loops never cross a cut and are
    /// rejected to keep instance descriptions canonical.
    pub fn directed_cut(n: usize, arcs: &[(usize, usize, f64)]) -> Result<SetFunction> {
        assert!(n >= 1);
        let mut out = Vec::with_capacity(arcs.len());
        for &(from, to, weight) in arcs {
            if from >= n {
                return Err(Error::ElementOutOfRange { element: from, n });
            }
            if to >= n || to == from {
                return Err(Error::ElementOutOfRange { element: to, n });
            }
            if weight.is_nan() || weight < 0.0 {
                return Err(Error::NegativeWeight {
                    element: from,
                    value: weight,
                });
            }
            out.push(Arc { from, to, weight });
        }
        Ok(SetFunction {
            n,
            kind: Kind::DirectedCut { arcs: out },
            queries: AtomicU64::new(0),
        })
    }

    /// Weighted coverage: element e covers the universe items `covers[e]`,
    /// and g(A) is the total weight of items covered by at least one element
    /// of A.
    pub fn weighted_coverage(
        n: usize,
        item_weights: Vec<f64>,
        covers: &[Vec<usize>],
    ) -> Result<SetFunction> {
        assert!(n >= 1);
        if covers.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: covers.len(),
            });
        }
        let items = item_weights.len();
        for (i, &w) in item_weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    element: i,
                    value: w,
                });
            }
        }
        let words = word_count(items.max(1));
        let mut element_items = vec![vec![0u64; words]; n];
        for (e, list) in covers.iter().enumerate() {
            for &item in list {
                if item >= items {
                    return Err(Error::ElementOutOfRange {
                        element: item,
                        n: items,
                    });
                }
                element_items[e][item / 64] |= 1u64 << (item % 64);
            }
        }
        Ok(SetFunction {
            n,
            kind: Kind::Coverage {
                item_weights,
                element_items,
            },
            queries: AtomicU64::new(0),
        })
    }

    /// Explicit value table indexed by characteristic bits; `table.len()`
    /// must be 2^n with n <= 20. The table is checked exhaustively for
    /// non-negativity and submodularity.
    pub fn explicit(table: Vec<f64>) -> Result<SetFunction> {
        let len = table.len();
        assert!(
            len >= 2 && len.is_power_of_two(),
            "table length must be 2^n"
        );
        let n = len.trailing_zeros() as usize;
        if n > EXACT_MAX_N {
            return Err(Error::GroundSetTooLarge {
                n,
                max: EXACT_MAX_N,
            });
        }
        for (mask, &v) in table.iter().enumerate() {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NegativeValue {
                    mask: mask as u64,
                    value: v,
                });
            }
        }
        check_table_submodular(n, &table)?;
        Ok(SetFunction {
            n,
            kind: Kind::Explicit { table },
            queries: AtomicU64::new(0),
        })
    }

    /// Modular function g(A) = sum of weights over A.
    pub fn modular(weights: Vec<f64>) -> Result<SetFunction> {
        assert!(!weights.is_empty());
        for (e, &w) in weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    element: e,
                    value: w,
                });
            }
        }
        let n = weights.len();
        Ok(SetFunction {
            n,
            kind: Kind::Modular { weights },
            queries: AtomicU64::new(0),
        })
    }

    pub fn ground_set(&self) -> GroundSet {
        GroundSet::new(self.n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Counted oracle evaluation.
    pub fn eval(&self, a: &SubsetMask) -> Result<f64> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: a.n(),
            });
        }
        self.queries.fetch_add(1, AtomicOrdering::Relaxed);
        Ok(self.value(a))
    }

    /// Same value as [`SetFunction::eval`] but exempt from query accounting.
    /// For diagnostics only; solvers must go through `eval`.
    pub fn eval_silent(&self, a: &SubsetMask) -> Result<f64> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: a.n(),
            });
        }
        Ok(self.value(a))
    }

    fn value(&self, a: &SubsetMask) -> f64 {
        match &self.kind {
            Kind::DirectedCut { arcs } => arcs
                .iter()
                .filter(|arc| a.contains(arc.from) && !a.contains(arc.to))
                .map(|arc| arc.weight)
                .sum(),
            Kind::Coverage {
                item_weights,
                element_items,
            } => {
                let words = element_items.first().map_or(0, |m| m.len());
                let mut covered = vec![0u64; words];
                for e in a.iter() {
                    for (acc, &w) in covered.iter_mut().zip(element_items[e].iter()) {
                        *acc |= w;
                    }
                }
                let mut total = 0.0;
                for (wi, &word) in covered.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let item = wi * 64 + bits.trailing_zeros() as usize;
                        total += item_weights[item];
                        bits &= bits - 1;
                    }
                }
                total
            }
            Kind::Explicit { table } => table[a.to_bits() as usize],
            Kind::Modular { weights } => a.iter().map(|e| weights[e]).sum(),
        }
    }

    /// Marginal gain f(A + e) - f(A). Elements already in A have zero gain
    /// and are answered without spending oracle queries; otherwise the cost
    /// is exactly two queries.
    pub fn marginal(&self, e: usize, a: &SubsetMask) -> Result<f64> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: a.n(),
            });
        }
        if e >= self.n {
            return Err(Error::ElementOutOfRange {
                element: e,
                n: self.n,
            });
        }
        if a.contains(e) {
            return Ok(0.0);
        }
        Ok(self.eval(&a.with(e))? - self.eval(a)?)
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(AtomicOrdering::Relaxed)
    }

    pub fn reset_query_count(&self) {
        self.queries.store(0, AtomicOrdering::Relaxed);
    }
}

/// Non-negative modular cost l(A) = sum of per-element charges. Evaluating l
/// is vector arithmetic, not an oracle call, so nothing here is counted.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularCost {
    weights: Vec<f64>,
}

impl ModularCost {
    pub fn new(weights: Vec<f64>) -> Result<ModularCost> {
        assert!(!weights.is_empty());
        for (e, &w) in weights.iter().enumerate() {
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    element: e,
                    value: w,
                });
            }
        }
        Ok(ModularCost { weights })
    }

    pub fn zeros(n: usize) -> ModularCost {
        ModularCost {
            weights: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn get(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn value(&self, a: &SubsetMask) -> f64 {
        debug_assert_eq!(a.n(), self.weights.len());
        a.iter().map(|e| self.weights[e]).sum()
    }

    /// Inner product with a fractional point, the linear extension of l.
    pub fn dot(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.weights.len());
        self.weights
            .iter()
            .zip(x.iter())
            .map(|(w, xi)| w * xi)
            .sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

/// Scale parameter M = max(max_e g(e | empty), -min_e g(e | ground - e)),
/// computed with exactly 2n + 2 oracle queries. M is positive for every
/// non-monotone g; a non-positive M means g is outside the class the
/// non-monotone solvers are built for, which is reported as
/// [`Error::NonTargetFunction`] carrying the value so callers that accept
/// monotone inputs can still read it.
pub fn compute_m(g: &SetFunction) -> Result<f64> {
    let n = g.n();
    let empty = SubsetMask::empty(n);
    let full = SubsetMask::full(n);
    let g_empty = g.eval(&empty)?;
    let g_full = g.eval(&full)?;
    let mut max_first = f64::NEG_INFINITY;
    let mut min_last = f64::INFINITY;
    for e in 0..n {
        max_first = max_first.max(g.eval(&empty.with(e))? - g_empty);
        min_last = min_last.min(g_full - g.eval(&full.without(e))?);
    }
    let m = max_first.max(-min_last);
    if m <= 0.0 {
        return Err(Error::NonTargetFunction { m });
    }
    Ok(m)
}

fn check_table_submodular(n: usize, table: &[f64]) -> Result<()> {
    // Local characterization: for every S and e != f outside S,
    // f(S+e) + f(S+f) >= f(S+e+f) + f(S). Tolerates float dust of 1e-9.
    let full = (table.len() - 1) as u64;
    for s in 0..table.len() as u64 {
        let outside = full & !s;
        let mut e_bits = outside;
        while e_bits != 0 {
            let e = e_bits & e_bits.wrapping_neg();
            e_bits &= e_bits - 1;
            let mut f_bits = e_bits;
            while f_bits != 0 {
                let f = f_bits & f_bits.wrapping_neg();
                f_bits &= f_bits - 1;
                let lhs = table[(s | e) as usize] + table[(s | f) as usize];
                let rhs = table[(s | e | f) as usize] + table[s as usize];
                if lhs + 1e-9 < rhs {
                    return Err(Error::NotSubmodular {
                        a: s | e,
                        b: s | f,
                        violation: rhs - lhs,
                    });
                }
            }
        }
    }
    let _ = n;
    Ok(())
}

/// Exhaustively checks submodularity of an arbitrary oracle (n <= 20).
/// Uses uncounted evaluations.
pub fn verify_submodular(g: &SetFunction) -> Result<()> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(Error::GroundSetTooLarge {
            n,
            max: EXACT_MAX_N,
        });
    }
    let mut table = Vec::with_capacity(1usize << n);
    for bits in 0..(1u64 << n) {
        table.push(g.eval_silent(&SubsetMask::from_bits(n, bits))?);
    }
    check_table_submodular(n, &table)
}

/// Exhaustively checks non-negativity of an arbitrary oracle (n <= 20).
/// Uses uncounted evaluations.
pub fn verify_nonnegative(g: &SetFunction) -> Result<()> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(Error::GroundSetTooLarge {
            n,
            max: EXACT_MAX_N,
        });
    }
    for bits in 0..(1u64 << n) {
        let v = g.eval_silent(&SubsetMask::from_bits(n, bits))?;
        if v < 0.0 {
            return Err(Error::NegativeValue {
                mask: bits,
                value: v,
            });
        }
    }
    Ok(())
}
