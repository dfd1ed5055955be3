//! Matroid constraints and fractional points over the matroid polytope.
//!
//! Three kinds are supported. Uniform and partition matroids answer
//! independence, rank, and polytope queries from their parameters. Explicit
//! matroids store an independence table (n <= 20) and are verified at
//! construction: the empty set must be independent, and the rank function
//! derived from the table must be submodular. Together with subcardinality
//! and monotonicity (automatic for a derived rank), those conditions
//! characterize matroid rank functions, so every accepted table is a matroid
//! and every rejected one carries a concrete witness.

use crate::error::{Error, Result};
use crate::setfn::{SubsetMask, EXACT_MAX_N};

/// A point in [0,1]^n, typically inside a matroid polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPoint {
    coords: Vec<f64>,
}

impl FractionalPoint {
    pub fn new(coords: Vec<f64>) -> Result<FractionalPoint> {
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::CoordinateOutOfRange { index, value });
            }
        }
        Ok(FractionalPoint { coords })
    }

    /// Crate-internal constructor for values already proven to lie in [0,1].
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> FractionalPoint {
        debug_assert!(coords.iter().all(|v| (0.0..=1.0).contains(v)));
        FractionalPoint { coords }
    }

    pub fn zeros(n: usize) -> FractionalPoint {
        FractionalPoint {
            coords: vec![0.0; n],
        }
    }

    pub fn from_mask(mask: &SubsetMask) -> FractionalPoint {
        let mut coords = vec![0.0; mask.n()];
        for e in mask.iter() {
            coords[e] = 1.0;
        }
        FractionalPoint { coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.coords.clone()
    }

    /// Coordinate-wise maximum (lattice join).
    pub fn join(&self, other: &FractionalPoint) -> FractionalPoint {
        assert_eq!(self.n(), other.n());
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.max(*b))
            .collect();
        FractionalPoint { coords }
    }

    /// Coordinate-wise minimum (lattice meet).
    pub fn meet(&self, other: &FractionalPoint) -> FractionalPoint {
        assert_eq!(self.n(), other.n());
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.min(*b))
            .collect();
        FractionalPoint { coords }
    }

    /// Coordinate-wise product.
    pub fn hadamard(&self, other: &FractionalPoint) -> FractionalPoint {
        assert_eq!(self.n(), other.n());
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .collect();
        FractionalPoint { coords }
    }

    /// Elements with a strictly positive coordinate.
    pub fn support(&self) -> SubsetMask {
        let mut m = SubsetMask::empty(self.coords.len());
        for (e, &v) in self.coords.iter().enumerate() {
            if v > 0.0 {
                m.insert(e);
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
enum MatroidKind {
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
        block_of: Vec<usize>,
    },
    Explicit {
        // rank[bits] for every subset; independence is rank[bits] == |bits|.
        rank: Vec<u8>,
    },
}

/// A matroid over the ground set {0, ..., n-1}.
#[derive(Debug, Clone)]
pub struct Matroid {
    n: usize,
    kind: MatroidKind,
}

impl Matroid {
    /// Uniform matroid: A independent iff |A| <= k.
    pub fn uniform(n: usize, k: usize) -> Matroid {
        assert!(n >= 1);
        Matroid {
            n,
            kind: MatroidKind::Uniform { k },
        }
    }

    /// Partition matroid: blocks must be disjoint and cover the ground set;
    /// A is independent iff it meets block b in at most capacities[b]
    /// elements.
    pub fn partition(n: usize, blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Matroid> {
        assert!(n >= 1);
        if blocks.len() != capacities.len() {
            return Err(Error::InvalidPartition {
                reason: format!(
                    "{} blocks but {} capacities",
                    blocks.len(),
                    capacities.len()
                ),
            });
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(Error::ElementOutOfRange { element: e, n });
                }
                if block_of[e] != usize::MAX {
                    return Err(Error::InvalidPartition {
                        reason: format!("element {e} appears in more than one block"),
                    });
                }
                block_of[e] = b;
            }
        }
        if let Some(e) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition {
                reason: format!("element {e} is not covered by any block"),
            });
        }
        Ok(Matroid {
            n,
            kind: MatroidKind::Partition {
                blocks,
                capacities,
                block_of,
            },
        })
    }

    /// Explicit matroid from an independence predicate, n <= 20. The
    /// predicate is tabulated and the matroid axioms are verified before the
    /// constructor returns.
    pub fn explicit<F: Fn(&SubsetMask) -> bool>(n: usize, independent: F) -> Result<Matroid> {
        assert!(n >= 1);
        if n > EXACT_MAX_N {
            return Err(Error::GroundSetTooLarge {
                n,
                max: EXACT_MAX_N,
            });
        }
        let size = 1usize << n;
        let mut is_ind = vec![false; size];
        for bits in 0..size as u64 {
            is_ind[bits as usize] = independent(&SubsetMask::from_bits(n, bits));
        }
        if !is_ind[0] {
            return Err(Error::NotAMatroid {
                reason: "empty set is not independent".to_string(),
            });
        }
        // rank(S) = size of the largest independent subset of S, by DP over
        // subsets. Subcardinality and monotonicity hold by construction.
        let mut rank = vec![0u8; size];
        for bits in 1..size as u64 {
            let s = bits as usize;
            let mut r = 0u8;
            if is_ind[s] {
                r = bits.count_ones() as u8;
            } else {
                let mut rest = bits;
                while rest != 0 {
                    let low = rest & rest.wrapping_neg();
                    rest &= rest - 1;
                    r = r.max(rank[(bits ^ low) as usize]);
                }
            }
            rank[s] = r;
        }
        // A derived rank that is also submodular characterizes a matroid.
        let full = (size - 1) as u64;
        for bits in 0..size as u64 {
            let s = bits as usize;
            let outside = full & !bits;
            let mut e_bits = outside;
            while e_bits != 0 {
                let e = e_bits & e_bits.wrapping_neg();
                e_bits &= e_bits - 1;
                let mut f_bits = e_bits;
                while f_bits != 0 {
                    let f = f_bits & f_bits.wrapping_neg();
                    f_bits &= f_bits - 1;
                    let lhs = rank[(bits | e) as usize] + rank[(bits | f) as usize];
                    let rhs = rank[(bits | e | f) as usize] + rank[s];
                    if lhs < rhs {
                        return Err(Error::NotAMatroid {
                            reason: format!(
                                "exchange fails near S={bits:#b} with elements \
                                 {} and {}",
                                e.trailing_zeros(),
                                f.trailing_zeros()
                            ),
                        });
                    }
                }
            }
        }
        // Consistency of the table with the derived rank is automatic:
        // rank[S] == |S| iff S is independent.
        Ok(Matroid {
            n,
            kind: MatroidKind::Explicit { rank },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_independent(&self, a: &SubsetMask) -> bool {
        assert_eq!(a.n(), self.n);
        match &self.kind {
            MatroidKind::Uniform { k } => a.len() <= *k,
            MatroidKind::Partition {
                blocks, capacities, ..
            } => blocks
                .iter()
                .zip(capacities)
                .all(|(block, &cap)| block.iter().filter(|&&e| a.contains(e)).count() <= cap),
            MatroidKind::Explicit { rank } => rank[a.to_bits() as usize] as usize == a.len(),
        }
    }

    /// Rank of A: the size of the largest independent subset of A.
    pub fn rank(&self, a: &SubsetMask) -> usize {
        assert_eq!(a.n(), self.n);
        match &self.kind {
            MatroidKind::Uniform { k } => a.len().min(*k),
            MatroidKind::Partition {
                blocks, capacities, ..
            } => blocks
                .iter()
                .zip(capacities)
                .map(|(block, &cap)| block.iter().filter(|&&e| a.contains(e)).count().min(cap))
                .sum(),
            MatroidKind::Explicit { rank } => rank[a.to_bits() as usize] as usize,
        }
    }

    /// Maximizes a linear objective over independent sets: greedy over
    /// strictly positive weights in descending order, ties broken toward the
    /// lower element index. Returns the set and its indicator vertex.
    pub fn linear_maximize(&self, c: &[f64]) -> (SubsetMask, FractionalPoint) {
        assert_eq!(c.len(), self.n);
        assert!(c.iter().all(|v| v.is_finite()), "weights must be finite");
        let mut order: Vec<usize> = (0..self.n).filter(|&e| c[e] > 0.0).collect();
        order.sort_by(|&i, &j| c[j].partial_cmp(&c[i]).unwrap().then_with(|| i.cmp(&j)));
        let mut chosen = SubsetMask::empty(self.n);
        match &self.kind {
            MatroidKind::Uniform { k } => {
                for &e in order.iter().take(*k) {
                    chosen.insert(e);
                }
            }
            MatroidKind::Partition {
                capacities,
                block_of,
                ..
            } => {
                let mut used = vec![0usize; capacities.len()];
                for &e in &order {
                    let b = block_of[e];
                    if used[b] < capacities[b] {
                        used[b] += 1;
                        chosen.insert(e);
                    }
                }
            }
            MatroidKind::Explicit { .. } => {
                for &e in &order {
                    let next = chosen.with(e);
                    if self.is_independent(&next) {
                        chosen = next;
                    }
                }
            }
        }
        let point = FractionalPoint::from_mask(&chosen);
        (chosen, point)
    }

    /// Membership test for the matroid polytope { x >= 0 : sum_{e in S} x_e
    /// <= rank(S) for all S }, with an additive tolerance per constraint.
    /// Uniform and partition kinds check only their defining constraints;
    /// explicit kind checks every subset.
    pub fn in_polytope(&self, x: &FractionalPoint, tol: f64) -> bool {
        assert_eq!(x.n(), self.n);
        match &self.kind {
            MatroidKind::Uniform { k } => x.as_slice().iter().sum::<f64>() <= *k as f64 + tol,
            MatroidKind::Partition {
                blocks, capacities, ..
            } => blocks.iter().zip(capacities).all(|(block, &cap)| {
                block.iter().map(|&e| x.get(e)).sum::<f64>() <= cap as f64 + tol
            }),
            MatroidKind::Explicit { rank } => {
                let size = 1usize << self.n;
                // sums[S] built by peeling the lowest bit keeps this O(2^n).
                let mut sums = vec![0.0f64; size];
                for bits in 1..size as u64 {
                    let low = bits & bits.wrapping_neg();
                    sums[bits as usize] =
                        sums[(bits ^ low) as usize] + x.get(low.trailing_zeros() as usize);
                    if sums[bits as usize] > rank[bits as usize] as f64 + tol {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// Block structure used by pipage rounding: (elements, capacity) pairs
    /// whose coordinate sums the rounding must preserve. Only uniform and
    /// partition matroids expose one.
    pub(crate) fn rounding_blocks(&self) -> Result<Vec<(Vec<usize>, usize)>> {
        match &self.kind {
            MatroidKind::Uniform { k } => Ok(vec![((0..self.n).collect(), *k)]),
            MatroidKind::Partition {
                blocks, capacities, ..
            } => Ok(blocks
                .iter()
                .cloned()
                .zip(capacities.iter().copied())
                .collect()),
            MatroidKind::Explicit { .. } => Err(Error::UnsupportedMatroidKind),
        }
    }
}
