//! Position sets POS_{n,δ} and weight sparsification.
//!
//! The position set {min{⌈(1+δ)^s⌉, n} : s ≥ 0} is the fixed breakpoint set:
//! sparsifying a non-increasing weight vector onto it loses at most a (1+δ)
//! factor in ordered cost while reducing the description to O(log n / δ)
//! coordinates.

use crate::model::{ArgError, WeightVector, R};
use num::{One, Signed, ToPrimitive, Zero};

/// The position set POS_{n,δ} with its successor map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionSet {
    /// Dimension n.
    pub n: usize,
    /// Sorted distinct positions, always containing 1 and n.
    pub positions: Vec<usize>,
}

impl PositionSet {
    /// Smallest position larger than ℓ, with next(n) = n+1 and next(0) = 1.
    pub fn next(&self, l: usize) -> usize {
        if l == 0 {
            return 1;
        }
        match self.positions.iter().find(|&&p| p > l) {
            Some(&p) => p,
            None => self.n + 1,
        }
    }

    /// True iff ℓ is a breakpoint position.
    pub fn contains(&self, l: usize) -> bool {
        self.positions.binary_search(&l).is_ok()
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// True iff the set is empty (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Computes POS_{n,δ} = {min{⌈(1+δ)^s⌉, n} : s ≥ 0} in exact rational
/// arithmetic (rational power, exact ceiling).
pub fn position_set(n: usize, delta: &R) -> Result<PositionSet, ArgError> {
    if n == 0 {
        return Err(ArgError("dimension must be positive".into()));
    }
    if !delta.is_positive() {
        return Err(ArgError("delta must be positive".into()));
    }
    let base = R::one() + delta;
    let mut positions = Vec::new();
    let mut pow = R::one();
    loop {
        let val = pow.ceil().to_integer().to_usize().unwrap_or(n).min(n);
        if positions.last() != Some(&val) {
            positions.push(val);
        }
        if val == n {
            break;
        }
        pow *= &base;
    }
    Ok(PositionSet { n, positions })
}

/// Sparsifies w onto P: tw_i = w_i for i ∈ POS, and tw_i = w_{next(ℓ)} for
/// ℓ < i < next(ℓ). Guarantees tw ≤ w coordinate-wise and
/// obj(tw;v) ≤ obj(w;v) ≤ (1+δ)·obj(tw;v).
pub fn sparsify_weights(w: &WeightVector, p: &PositionSet) -> WeightVector {
    assert_eq!(w.len(), p.n, "weight length must equal position-set dimension");
    let mut tw = Vec::with_capacity(p.n);
    for i in 1..=p.n {
        if p.contains(i) {
            tw.push(w.get1(i));
        } else {
            // i lies strictly inside a gap (ℓ, next(ℓ)).
            let l = *p.positions.iter().rev().find(|&&q| q < i).unwrap();
            let nx = p.next(l);
            if nx > p.n {
                tw.push(R::zero());
            } else {
                tw.push(w.get1(nx));
            }
        }
    }
    WeightVector::new(tw).expect("sparsified weights stay non-increasing")
}
