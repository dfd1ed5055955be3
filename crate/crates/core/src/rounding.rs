//! Randomized pipage rounding for uniform and partition matroids.
//!
//! Given x in the matroid polytope, repeatedly pick the two lowest-indexed
//! fractional coordinates i < j inside one block and move along 1_i - 1_j:
//! with alpha = min(1 - x_i, x_j) and beta = min(x_i, 1 - x_j), step +alpha
//! with probability beta / (alpha + beta) and -beta otherwise. Each move
//! keeps the block sum fixed, makes at least one coordinate integral, and is
//! mean-preserving, so coordinate marginals survive to the output and, by
//! convexity of the multilinear extension along 1_i - 1_j, the expected
//! rounded value never falls below F(x). A single leftover fractional
//! coordinate is rounded up with probability x_e when the block capacity
//! permits, down otherwise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matroid::{FractionalPoint, Matroid};
use crate::setfn::SubsetMask;

const POLYTOPE_TOL: f64 = 1e-9;
const SNAP_TOL: f64 = 1e-12;

fn snap(v: f64) -> f64 {
    if v.abs() <= SNAP_TOL {
        0.0
    } else if (1.0 - v).abs() <= SNAP_TOL {
        1.0
    } else {
        v
    }
}

/// Rounds x in the polytope of a uniform or partition matroid to an
/// independent set whose indicator has the same coordinate expectations.
pub fn pipage_round(
    matroid: &Matroid,
    x: &FractionalPoint,
    rng: &mut ChaCha8Rng,
) -> Result<SubsetMask> {
    let blocks = matroid.rounding_blocks()?;
    if !matroid.in_polytope(x, POLYTOPE_TOL) {
        return Err(Error::NotInPolytope { tol: POLYTOPE_TOL });
    }
    let mut coords: Vec<f64> = x.to_vec().into_iter().map(snap).collect();
    for (elements, capacity) in &blocks {
        loop {
            let mut fractional = elements
                .iter()
                .copied()
                .filter(|&e| coords[e] > 0.0 && coords[e] < 1.0);
            let Some(i) = fractional.next() else { break };
            let Some(j) = fractional.next() else {
                // Lone fractional coordinate: round up with probability x_e
                // if the block still has room.
                let ones = elements.iter().filter(|&&e| coords[e] == 1.0).count();
                let up = ones < *capacity && rng.gen::<f64>() < coords[i];
                coords[i] = if up { 1.0 } else { 0.0 };
                break;
            };
            let alpha = (1.0 - coords[i]).min(coords[j]);
            let beta = coords[i].min(1.0 - coords[j]);
            debug_assert!(alpha > 0.0 && beta > 0.0);
            if rng.gen::<f64>() < beta / (alpha + beta) {
                let (ci, cj) = (coords[i], coords[j]);
                coords[i] = snap(ci + alpha);
                coords[j] = snap(cj - alpha);
                // The binding side of the min lands exactly on its bound.
                if alpha == 1.0 - ci {
                    coords[i] = 1.0;
                }
                if alpha == cj {
                    coords[j] = 0.0;
                }
            } else {
                let (ci, cj) = (coords[i], coords[j]);
                coords[i] = snap(ci - beta);
                coords[j] = snap(cj + beta);
                if beta == ci {
                    coords[i] = 0.0;
                }
                if beta == 1.0 - cj {
                    coords[j] = 1.0;
                }
            }
        }
    }
    let mut out = SubsetMask::empty(x.n());
    for (e, &v) in coords.iter().enumerate() {
        debug_assert!(v == 0.0 || v == 1.0);
        if v == 1.0 {
            out.insert(e);
        }
    }
    debug_assert!(matroid.is_independent(&out));
    Ok(out)
}
