//! Core problem instances, solutions, cost vectors, and monotone symmetric
//! norm evaluation.
//!
//! All data is held as exact rationals. Top-ℓ, ordered, and max-of-ordered
//! norms evaluate exactly; ℓ_p norms with p ∉ {1, ∞} evaluate in floating
//! point within a documented 1e-12 relative tolerance.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type R = BigRational;

/// A nonnegative rational cost vector (length m for load balancing, n for
/// clustering).
pub type CostVector = Vec<R>;

/// Argument / validation error for in-memory constructors and operations.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct ArgError(pub String);

fn arg_err<T>(msg: impl Into<String>) -> Result<T, ArgError> {
    Err(ArgError(msg.into()))
}

/// Exact rational from an integer.
pub fn rat(x: i64) -> R {
    R::from_integer(BigInt::from(x))
}

/// Exact rational a/b.
pub fn ratio(a: i64, b: i64) -> R {
    R::new(BigInt::from(a), BigInt::from(b))
}

/// Sorts a copy of `v` in non-increasing order (stable: descending value,
/// ascending index).
pub fn sorted_desc(v: &[R]) -> Vec<R> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.cmp(a));
    s
}

/// An unrelated-machine load-balancing instance: m machines, n jobs, and an
/// m×n matrix of nonnegative integer processing times.
#[derive(Clone, Debug)]
pub struct LoadBalInstance {
    /// Machine count.
    pub m: usize,
    /// Job count.
    pub n: usize,
    /// Processing times p[i][j] of job j on machine i.
    pub p: Vec<Vec<R>>,
}

impl LoadBalInstance {
    /// Validates dimensions, nonnegativity, and integrality of the times.
    pub fn new(m: usize, n: usize, p: Vec<Vec<R>>) -> Result<Self, ArgError> {
        if m == 0 || n == 0 {
            return arg_err("instance must have at least one machine and one job");
        }
        if p.len() != m || p.iter().any(|row| row.len() != n) {
            return arg_err("processing-time matrix has wrong dimensions");
        }
        for row in &p {
            for v in row {
                if v.is_negative() {
                    return arg_err("processing times must be nonnegative");
                }
                if !v.is_integer() {
                    return arg_err("processing times must be integers");
                }
            }
        }
        Ok(LoadBalInstance { m, n, p })
    }
}

/// An assignment of each job to a machine (0-based machine indices).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    /// sigma[j] = machine serving job j.
    pub sigma: Vec<usize>,
}

/// A k-clustering instance: an n-point metric with facility set = client set
/// and a facility budget k.
#[derive(Clone, Debug)]
pub struct ClusterInstance {
    /// Point count.
    pub n: usize,
    /// Symmetric nonnegative distance matrix with zero diagonal satisfying
    /// the triangle inequality (validated exactly).
    pub c: Vec<Vec<R>>,
    /// Facility budget, 1 ≤ k ≤ n.
    pub k: usize,
}

impl ClusterInstance {
    /// Validates metric axioms exactly on the rational inputs.
    pub fn new(n: usize, c: Vec<Vec<R>>, k: usize) -> Result<Self, ArgError> {
        if n == 0 {
            return arg_err("metric must have at least one point");
        }
        if k == 0 || k > n {
            return arg_err("facility budget k must satisfy 1 <= k <= n");
        }
        if c.len() != n || c.iter().any(|row| row.len() != n) {
            return arg_err("distance matrix has wrong dimensions");
        }
        for i in 0..n {
            if !c[i][i].is_zero() {
                return arg_err("distance matrix must have zero diagonal");
            }
            for j in 0..n {
                if c[i][j].is_negative() {
                    return arg_err("distances must be nonnegative");
                }
                if c[i][j] != c[j][i] {
                    return arg_err("distance matrix must be symmetric");
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if c[i][j] > &c[i][l] + &c[l][j] {
                        return arg_err(format!(
                            "triangle inequality violated at ({i},{j},{l})"
                        ));
                    }
                }
            }
        }
        Ok(ClusterInstance { n, c, k })
    }
}

/// A non-increasing, nonnegative weight vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    /// The weights, w[0] ≥ w[1] ≥ … ≥ 0.
    pub w: Vec<R>,
}

impl WeightVector {
    /// Validates non-increasing nonnegative weights.
    pub fn new(w: Vec<R>) -> Result<Self, ArgError> {
        if w.is_empty() {
            return arg_err("weight vector must be nonempty");
        }
        if w.last().unwrap().is_negative() {
            return arg_err("weights must be nonnegative");
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return arg_err("weights must be non-increasing");
        }
        Ok(WeightVector { w })
    }

    /// Dimension of the weight vector.
    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// True iff the vector has length zero (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// w_ℓ with 1-based index, w_{n+1} = 0 by convention.
    pub fn get1(&self, l: usize) -> R {
        if l == 0 {
            panic!("weight index is 1-based");
        }
        if l > self.w.len() {
            R::zero()
        } else {
            self.w[l - 1].clone()
        }
    }
}

/// Exponent of an ℓ_p norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    /// Finite p ≥ 1.
    Finite(f64),
    /// p = ∞ (max norm).
    Inf,
}

/// A monotone symmetric norm from the supported families. All variants admit
/// an exact ball-optimization oracle (κ = 1).
#[derive(Clone, Debug)]
pub enum NormSpec {
    /// ℓ_p norm, p ≥ 1 or ∞.
    Lp(LpExponent),
    /// Top-ℓ norm: sum of the ℓ largest coordinates.
    TopL(usize),
    /// Ordered norm obj(w; ·) with non-increasing weights.
    Ordered(WeightVector),
    /// Maximum of finitely many ordered norms.
    MaxOrdered(Vec<WeightVector>),
}

impl NormSpec {
    /// Approximation quality of the ball-optimization oracle (always exact).
    pub fn kappa(&self) -> R {
        R::one()
    }
}

/// Sum of the ℓ largest entries of v (1 ≤ ℓ ≤ len(v)).
pub fn topl_cost(l: usize, v: &[R]) -> Result<R, ArgError> {
    if l == 0 || l > v.len() {
        return arg_err(format!("top-l index {l} out of range 1..={}", v.len()));
    }
    let s = sorted_desc(v);
    Ok(s[..l].iter().sum())
}

/// Ordered cost obj(w; v) = wᵀ·(v sorted non-increasing).
pub fn ordered_cost(w: &WeightVector, v: &[R]) -> Result<R, ArgError> {
    if w.len() != v.len() {
        return arg_err(format!(
            "weight length {} does not match cost length {}",
            w.len(),
            v.len()
        ));
    }
    let s = sorted_desc(v);
    Ok(w.w.iter().zip(&s).map(|(a, b)| a * b).sum())
}

/// Evaluates a supported monotone symmetric norm on a nonnegative vector.
///
/// Exact for ℓ_1, ℓ_∞, Top-ℓ, ordered, and max-of-ordered; ℓ_p with finite
/// p ≠ 1 is evaluated in floating point (1e-12 relative tolerance) and
/// converted back to a rational.
pub fn norm_eval(f: &NormSpec, v: &[R]) -> Result<R, ArgError> {
    match f {
        NormSpec::Lp(LpExponent::Inf) => {
            Ok(v.iter().max().cloned().unwrap_or_else(R::zero))
        }
        NormSpec::Lp(LpExponent::Finite(p)) => {
            if *p < 1.0 {
                return arg_err("lp exponent must be at least 1");
            }
            if *p == 1.0 {
                return Ok(v.iter().sum());
            }
            let sum: f64 = v
                .iter()
                .map(|x| x.to_f64().expect("finite rational").powf(*p))
                .sum();
            let val = sum.powf(1.0 / *p);
            Ok(R::from_float(val).expect("finite norm value"))
        }
        NormSpec::TopL(l) => topl_cost(*l, v),
        NormSpec::Ordered(w) => ordered_cost(w, v),
        NormSpec::MaxOrdered(ws) => {
            if ws.is_empty() {
                return arg_err("max-ordered norm needs at least one member");
            }
            let mut best = R::zero();
            for w in ws {
                let val = ordered_cost(w, v)?;
                if val > best {
                    best = val;
                }
            }
            Ok(best)
        }
    }
}

/// Machine loads induced by an assignment.
pub fn load_vector(inst: &LoadBalInstance, sigma: &Assignment) -> CostVector {
    let mut loads = vec![R::zero(); inst.m];
    for (j, &i) in sigma.sigma.iter().enumerate() {
        loads[i] += &inst.p[i][j];
    }
    loads
}

/// Per-client distance to the nearest open facility (ties by lowest facility
/// index; the cost is tie-independent).
pub fn assign_cost_vector(
    inst: &ClusterInstance,
    fset: &[usize],
) -> Result<CostVector, ArgError> {
    if fset.is_empty() {
        return arg_err("facility set must be nonempty");
    }
    let mut out = Vec::with_capacity(inst.n);
    for j in 0..inst.n {
        let mut best: Option<&R> = None;
        for &i in fset {
            let d = &inst.c[i][j];
            if best.is_none() || d < best.unwrap() {
                best = Some(d);
            }
        }
        out.push(best.unwrap().clone());
    }
    Ok(out)
}
