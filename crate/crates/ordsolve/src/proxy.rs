//! Proxy-cost functions h and Prox, validity checks, and polytime
//! threshold-vector enumeration.
//!
//! A threshold vector assigns a guess t_ℓ for the ℓ-th largest entry of the
//! optimal cost vector at every breakpoint position ℓ ∈ POS. The proxy cost
//! Prox_t(tw; v) = Σ_ℓ (tw_ℓ − tw_{next(ℓ)})·ℓ·t_ℓ + Σ_i h_t(tw; v_i)
//! linearizes the ordered objective: it always upper-bounds obj(tw; v) and is
//! within (1+2ε) of it at the optimum when the thresholds well-estimate the
//! optimal order statistics.

use crate::model::{ArgError, WeightVector, R};
use crate::sparsify::PositionSet;
use num::{One, Signed, Zero};

/// Per-position thresholds indexed by POS, with implicit t_0 = ∞ and
/// t_{n+1} = 0. Valid iff non-increasing along POS.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ThresholdVector {
    /// Thresholds aligned with `pos.positions`.
    pub t: Vec<R>,
    /// Sorted positions the thresholds live on.
    pub positions: Vec<usize>,
    /// Dimension n.
    pub n: usize,
}

impl ThresholdVector {
    /// Builds a threshold vector over the positions of `p`.
    pub fn new(p: &PositionSet, t: Vec<R>) -> Result<Self, ArgError> {
        if t.len() != p.positions.len() {
            return Err(ArgError(
                "threshold count must match position count".into(),
            ));
        }
        if t.iter().any(|x| x.is_negative()) {
            return Err(ArgError("thresholds must be nonnegative".into()));
        }
        Ok(ThresholdVector {
            t,
            positions: p.positions.clone(),
            n: p.n,
        })
    }

    /// Threshold at position ℓ (must be a breakpoint position).
    pub fn get(&self, l: usize) -> R {
        let idx = self
            .positions
            .binary_search(&l)
            .expect("threshold queried at a non-breakpoint position");
        self.t[idx].clone()
    }

    /// Threshold at next(ℓ), with t_{n+1} = 0.
    pub fn get_next(&self, l: usize) -> R {
        match self.positions.iter().position(|&q| q > l) {
            Some(idx) => self.t[idx].clone(),
            None => R::zero(),
        }
    }

    /// Largest threshold, t at position 1.
    pub fn first(&self) -> R {
        self.t[0].clone()
    }

    /// Pointwise scaling by a nonnegative factor.
    pub fn scale(&self, factor: &R) -> ThresholdVector {
        ThresholdVector {
            t: self.t.iter().map(|x| x * factor).collect(),
            positions: self.positions.clone(),
            n: self.n,
        }
    }
}

/// True iff t is valid: non-increasing along POS.
pub fn is_valid(t: &ThresholdVector) -> bool {
    t.t.windows(2).all(|p| p[0] >= p[1])
}

/// Scalar proxy h_ρ(a) = (a − ρ)⁺.
pub fn h_scalar(rho: &R, a: &R) -> R {
    if a > rho {
        a - rho
    } else {
        R::zero()
    }
}

/// Multi-threshold proxy h_t(tw; a) = Σ_{ℓ∈POS} (tw_ℓ − tw_{next(ℓ)})·(a − t_ℓ)⁺.
///
/// Requires tw sparsified on the same POS as t and t valid.
pub fn h_multi(tw: &WeightVector, t: &ThresholdVector, a: &R) -> Result<R, ArgError> {
    if !is_valid(t) {
        return Err(ArgError("threshold vector is not valid".into()));
    }
    if tw.len() != t.n {
        return Err(ArgError("weight length must equal threshold dimension".into()));
    }
    let mut acc = R::zero();
    for (idx, &l) in t.positions.iter().enumerate() {
        let nx = if idx + 1 < t.positions.len() {
            t.positions[idx + 1]
        } else {
            t.n + 1
        };
        let dw = tw.get1(l) - tw.get1(nx);
        if dw.is_zero() {
            continue;
        }
        acc += dw * h_scalar(&t.t[idx], a);
    }
    Ok(acc)
}

/// Equivalent "band" form of `h_multi`:
/// Σ_{ℓ∈{0}∪POS} tw_{next(ℓ)}·(min{a, t_ℓ} − t_{next(ℓ)})⁺ with t_0 = ∞.
pub fn h_multi_band(tw: &WeightVector, t: &ThresholdVector, a: &R) -> Result<R, ArgError> {
    if !is_valid(t) {
        return Err(ArgError("threshold vector is not valid".into()));
    }
    if tw.len() != t.n {
        return Err(ArgError("weight length must equal threshold dimension".into()));
    }
    // ℓ = 0 band: tw_1 · (a − t_1)⁺.
    let mut acc = tw.get1(1) * h_scalar(&t.t[0], a);
    for idx in 0..t.positions.len() {
        let (nx, tnx) = if idx + 1 < t.positions.len() {
            (t.positions[idx + 1], t.t[idx + 1].clone())
        } else {
            (t.n + 1, R::zero())
        };
        let wnx = tw.get1(nx);
        if wnx.is_zero() {
            continue;
        }
        let cap = if a < &t.t[idx] { a.clone() } else { t.t[idx].clone() };
        if cap > tnx {
            acc += wnx * (cap - tnx);
        }
    }
    Ok(acc)
}

/// Proxy cost Prox_t(tw; v).
pub fn prox(tw: &WeightVector, t: &ThresholdVector, v: &[R]) -> Result<R, ArgError> {
    let mut acc = R::zero();
    for (idx, &l) in t.positions.iter().enumerate() {
        let nx = if idx + 1 < t.positions.len() {
            t.positions[idx + 1]
        } else {
            t.n + 1
        };
        let dw = tw.get1(l) - tw.get1(nx);
        acc += dw * crate::model::rat(l as i64) * &t.t[idx];
    }
    for a in v {
        acc += h_multi(tw, t, a)?;
    }
    Ok(acc)
}

/// Zero convention for positions past the last guessed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroConvention {
    /// t_ℓ = 0 beyond ℓ* (load balancing).
    Zero,
    /// t_ℓ = ε·t₁/n beyond ℓ*, and every threshold floored at ε·t₁/n
    /// (clustering convention).
    FloorEpsOverN,
}

/// Options for threshold enumeration.
#[derive(Clone, Debug)]
pub struct EnumOpts {
    /// Zero convention for trailing positions.
    pub convention: ZeroConvention,
    /// Restrict guessing to these positions (must be a subset of POS);
    /// thresholds at other positions are filled by copying the next guessed
    /// position's value, which preserves validity and every covering bound.
    pub active: Option<Vec<usize>>,
    /// Cap on the number of returned vectors; deterministic evenly-spaced
    /// subsampling applies when exceeded (the all-floor vector is kept).
    pub budget: Option<usize>,
}

impl Default for EnumOpts {
    fn default() -> Self {
        EnumOpts {
            convention: ZeroConvention::Zero,
            active: None,
            budget: None,
        }
    }
}

/// Enumerates valid threshold vectors: guesses ℓ* ∈ POS and t₁ ∈ S, then all
/// non-decreasing exponent sequences t_ℓ = t₁/base^{j_ℓ} down to the cutoff
/// ε·t₁/(n·base), with the zero convention past ℓ*.
///
/// For any target o⃗ whose largest entry is covered by S within a factor of
/// `base`, the output contains a t⃗ with o⃗_ℓ ≤ t_ℓ ≤ base·o⃗_ℓ whenever
/// o⃗_ℓ ≥ ε·o⃗₁/n, and t_ℓ = 0 (or the floor) otherwise.
pub fn enumerate_thresholds(
    p: &PositionSet,
    s: &[R],
    eps: &R,
    base: &R,
) -> Vec<ThresholdVector> {
    enumerate_thresholds_opts(p, s, eps, base, &EnumOpts::default())
}

/// `enumerate_thresholds` with explicit options.
pub fn enumerate_thresholds_opts(
    p: &PositionSet,
    s: &[R],
    eps: &R,
    base: &R,
    opts: &EnumOpts,
) -> Vec<ThresholdVector> {
    assert!(base > &R::one(), "geometric base must exceed 1");
    let active: Vec<usize> = match &opts.active {
        Some(a) => {
            let mut a = a.clone();
            a.sort_unstable();
            a.dedup();
            a.retain(|l| p.contains(*l));
            if a.is_empty() {
                vec![p.positions[0]]
            } else {
                a
            }
        }
        None => p.positions.clone(),
    };
    let n_rat = crate::model::rat(p.n as i64);
    // Largest allowed exponent: base^j ≤ n·base/eps.
    let cutoff_ratio = &n_rat * base / eps;
    let mut jmax = 0usize;
    let mut pw = R::one();
    loop {
        let nextpw = &pw * base;
        if nextpw > cutoff_ratio {
            break;
        }
        pw = nextpw;
        jmax += 1;
    }
    // Precompute base^{-j} as rationals.
    let mut inv_pows = Vec::with_capacity(jmax + 1);
    let mut cur = R::one();
    for _ in 0..=jmax {
        inv_pows.push(cur.clone());
        cur = cur / base;
    }

    let mut out: Vec<ThresholdVector> = Vec::new();
    for t1 in s {
        if t1.is_zero() || t1.is_negative() {
            continue;
        }
        let floor = match opts.convention {
            ZeroConvention::Zero => R::zero(),
            ZeroConvention::FloorEpsOverN => eps * t1 / &n_rat,
        };
        for (lstar_idx, &lstar) in active.iter().enumerate() {
            // Non-decreasing exponent sequences over active positions ≤ ℓ*,
            // with the exponent at the first position fixed to 0.
            let klen = lstar_idx + 1;
            let mut seq = vec![0usize; klen];
            loop {
                // Materialize a full vector over POS from this sequence.
                let mut t = Vec::with_capacity(p.positions.len());
                for &l in &p.positions {
                    if l > lstar {
                        t.push(floor.clone());
                    } else {
                        // Copy from the smallest active position ≥ l.
                        let e = active
                            .iter()
                            .position(|&a| a >= l)
                            .expect("active covers positions up to lstar");
                        let val = t1 * &inv_pows[seq[e.min(klen - 1)]];
                        let val = if val < floor { floor.clone() } else { val };
                        t.push(val);
                    }
                }
                out.push(ThresholdVector {
                    t,
                    positions: p.positions.clone(),
                    n: p.n,
                });
                // Advance to the next non-decreasing sequence (seq[0] fixed 0).
                match (1..klen).rev().find(|&i| seq[i] < jmax) {
                    Some(i) => {
                        seq[i] += 1;
                        let v = seq[i];
                        for q in i + 1..klen {
                            seq[q] = v;
                        }
                    }
                    None => break,
                }
            }
        }
        // Always include the all-floor vector for this anchor.
        out.push(ThresholdVector {
            t: vec![floor.clone(); p.positions.len()],
            positions: p.positions.clone(),
            n: p.n,
        });
    }
    out.sort();
    out.dedup();
    if let Some(b) = opts.budget {
        if out.len() > b && b > 0 {
            let stride = (out.len() + b - 1) / b;
            out = out.into_iter().step_by(stride).collect();
        }
    }
    out
}
