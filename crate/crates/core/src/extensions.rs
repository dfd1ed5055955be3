//! Continuous extensions of set functions and the sampling machinery that
//! estimates them.
//!
//! For f on ground set of size n and x in [0,1]^n, the multilinear extension
//! is F(x) = E[f(R_x)] where R_x includes each element e independently with
//! probability x_e. The Lovasz extension is f_hat(x) = integral over
//! lambda in (0,1] of f({e : x_e >= lambda}). Both agree with f on integral
//! points, and for submodular f the multilinear extension dominates the
//! Lovasz extension pointwise, which is what makes fractional local-search
//! arguments translate back to sets.
//!
//! Exact evaluation enumerates all 2^n subsets and is capped at n <= 20; it
//! is a diagnostic and spends no oracle queries. The Monte-Carlo weight
//! estimator is the production path used by the continuous solver and is
//! fully counted: each of the r samples for each of the n elements costs
//! exactly two queries, so one call spends 2 n r queries, no more, no less.
//!
//! All randomness flows through [`RngStream`], a small fixed-seed tree.
//! Streams are derived per (caller, iteration, element) so results do not
//! depend on scheduling order, and the underlying generator (ChaCha with 8
//! rounds) produces identical draws on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matroid::FractionalPoint;
use crate::setfn::{SetFunction, SubsetMask, EXACT_MAX_N};

/// Deterministic seed tree. A stream is identified by a 64-bit state; child
/// streams are derived by hashing (state, tag) with two rounds of the
/// splitmix64 finalizer, so `derive` is order-sensitive and collision-
/// resistant for the tag counts used here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> RngStream {
        RngStream {
            state: splitmix_finalize(seed.wrapping_add(0x9e37_79b9_7f4a_7c15)),
        }
    }

    /// Child stream for a labeled subtask (replica index, step index,
    /// element index, ...). Deriving the same tag twice gives the same
    /// stream; different tags or a different derivation order give
    /// unrelated streams.
    pub fn derive(&self, tag: u64) -> RngStream {
        let salted = splitmix_finalize(tag.wrapping_add(0x9e37_79b9_7f4a_7c15));
        RngStream {
            state: splitmix_finalize(self.state ^ salted),
        }
    }

    /// Concrete generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }

    pub fn state(&self) -> u64 {
        self.state
    }
}

/// Draws R_x: element e is included independently with probability x_e.
/// Zero and one coordinates are exact, never approximate.
pub fn sample_random_subset(x: &FractionalPoint, rng: &mut ChaCha8Rng) -> SubsetMask {
    let mut mask = SubsetMask::empty(x.n());
    for e in 0..x.n() {
        if rng.gen::<f64>() < x.get(e) {
            mask.insert(e);
        }
    }
    mask
}

/// Result of one marginal-weight estimation pass.
#[derive(Debug, Clone)]
pub struct WeightEstimate {
    /// Per-element averages of g(e | R_y) over fresh samples.
    pub weights: Vec<f64>,
    /// Samples averaged per element.
    pub samples_per_element: usize,
    /// Oracle queries spent: exactly 2 * n * samples_per_element.
    pub queries_spent: u64,
}

/// Estimates w_e = E[g(e | R_y)] for every element by averaging r fresh
/// samples per element. Elements use independent child streams (tag = the
/// element index), so the result is the same whether elements are processed
/// in parallel or not. Every sample term is evaluated as g(R + e) - g(R)
/// with two counted queries, including when e landed in R (the term is then
/// zero), which keeps the query count exactly 2 n r.
pub fn estimate_marginal_weights(
    g: &SetFunction,
    y: &FractionalPoint,
    r: usize,
    stream: &RngStream,
) -> Result<WeightEstimate> {
    let n = g.n();
    if y.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: y.n(),
        });
    }
    assert!(r >= 1, "need at least one sample per element");
    let weights = (0..n)
        .into_par_iter()
        .map(|e| {
            let mut rng = stream.derive(e as u64).rng();
            let mut sum = 0.0;
            for _ in 0..r {
                let sample = sample_random_subset(y, &mut rng);
                let with_e = g.eval(&sample.with(e))?;
                let without = g.eval(&sample)?;
                sum += with_e - without;
            }
            Ok(sum / r as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WeightEstimate {
        weights,
        samples_per_element: r,
        queries_spent: 2 * n as u64 * r as u64,
    })
}

/// Exact multilinear extension F(x) = sum over S of f(S) prod_{e in S} x_e
/// prod_{e not in S} (1 - x_e), by enumeration (n <= 20, uncounted).
/// Subsets with zero probability are skipped, so integral points reproduce
/// f exactly with no float accumulation.
pub fn multilinear_exact(f: &SetFunction, x: &FractionalPoint) -> Result<f64> {
    let n = f.n();
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.n(),
        });
    }
    if n > EXACT_MAX_N {
        return Err(Error::GroundSetTooLarge {
            n,
            max: EXACT_MAX_N,
        });
    }
    let coords = x.as_slice();
    let mut total = 0.0;
    for bits in 0..(1u64 << n) {
        let mut p = 1.0;
        for (e, &xe) in coords.iter().enumerate() {
            p *= if bits >> e & 1 == 1 { xe } else { 1.0 - xe };
            if p == 0.0 {
                break;
            }
        }
        if p != 0.0 {
            total += p * f.eval_silent(&SubsetMask::from_bits(n, bits))?;
        }
    }
    Ok(total)
}

/// Exact gradient of the multilinear extension: dF/dx_e = F(x with x_e=1) -
/// F(x with x_e=0), by enumeration (n <= 20, uncounted).
pub fn multilinear_gradient_exact(f: &SetFunction, x: &FractionalPoint) -> Result<Vec<f64>> {
    let n = f.n();
    let mut grad = Vec::with_capacity(n);
    for e in 0..n {
        let mut hi = x.to_vec();
        hi[e] = 1.0;
        let mut lo = x.to_vec();
        lo[e] = 0.0;
        let up = multilinear_exact(f, &FractionalPoint::from_vec_unchecked(hi))?;
        let down = multilinear_exact(f, &FractionalPoint::from_vec_unchecked(lo))?;
        grad.push(up - down);
    }
    Ok(grad)
}

/// Exact Lovasz extension: integral over lambda in (0,1] of f(T_lambda)
/// where T_lambda = {e : x_e >= lambda}. Evaluated by sorting coordinates
/// and weighting at most n+1 threshold sets by the gaps between consecutive
/// distinct values (uncounted).
pub fn lovasz_exact(f: &SetFunction, x: &FractionalPoint) -> Result<f64> {
    let n = f.n();
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.n(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        x.get(j)
            .partial_cmp(&x.get(i))
            .unwrap()
            .then_with(|| i.cmp(&j))
    });

    let top = x.get(order[0]);
    let mut total = (1.0 - top) * f.eval_silent(&SubsetMask::empty(n))?;
    let mut set = SubsetMask::empty(n);
    let mut i = 0;
    while i < n {
        let v = x.get(order[i]);
        if v <= 0.0 {
            break; // elements at zero never enter T_lambda for lambda > 0
        }
        while i < n && x.get(order[i]) == v {
            set.insert(order[i]);
            i += 1;
        }
        let next = if i < n { x.get(order[i]).max(0.0) } else { 0.0 };
        total += (v - next) * f.eval_silent(&set)?;
    }
    Ok(total)
}
