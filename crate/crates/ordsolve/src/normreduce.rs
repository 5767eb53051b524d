//! Ball-optimization oracles for the supported norms and the reduction from
//! min-norm optimization to min-max ordered optimization.
//!
//! The reduction enumerates candidate sparsified weight vectors whose nonzero
//! entries are powers of (1+ε), keeps those the ball-optimization oracle
//! certifies as near-subgradients of the norm (value in [(1−ε)/κ, 1+ε]),
//! and appends a scaled all-ones sentinel. Solving min-max ordered
//! optimization over the resulting collection W solves the min-norm problem
//! up to a κ(1+3ε) factor loss.

use crate::lpround::{solve_lp, Cmp, LinearProgram, Mode};
use crate::model::{
    norm_eval, rat, ArgError, Assignment, ClusterInstance, LoadBalInstance, LpExponent,
    NormSpec, WeightVector, R,
};
use crate::sparsify::position_set;
use num::{One, Signed, ToPrimitive, Zero};

/// Instance-derived bounds: high ≥ o⃗₁ (largest optimal cost coordinate) and
/// lb ≤ OPT ≤ ub.
#[derive(Clone, Debug)]
pub struct Bounds {
    /// Upper estimate on the largest coordinate of the optimal cost vector.
    pub high: R,
    /// Lower bound on the optimal norm value.
    pub lb: R,
    /// Upper bound on the optimal norm value.
    pub ub: R,
}

impl Bounds {
    /// Validates 0 < lb ≤ ub and high ≥ 1.
    pub fn new(high: R, lb: R, ub: R) -> Result<Self, ArgError> {
        if !lb.is_positive() || lb > ub {
            return Err(ArgError("bounds must satisfy 0 < lb <= ub".into()));
        }
        if high < R::one() {
            return Err(ArgError("high must be at least 1".into()));
        }
        Ok(Bounds { high, lb, ub })
    }
}

/// The weight collection W of the reduction: filtered power-of-(1+ε)
/// expansions plus the scaled all-ones sentinel, in lexicographic order.
#[derive(Clone, Debug)]
pub struct WeightCollection {
    /// Member weight vectors (non-increasing, breakpoints in POS_{n,ε}).
    pub weights: Vec<WeightVector>,
}

fn check_nonneg(c: &[R]) -> Result<(), ArgError> {
    if c.is_empty() {
        return Err(ArgError("cost vector must be nonempty".into()));
    }
    if c.iter().any(|x| x.is_negative()) {
        return Err(ArgError("cost vector must be nonnegative".into()));
    }
    Ok(())
}

/// Maximizes cᵀx over the sorted representation of an intersection of
/// ordered-norm balls: variables y₁ ≥ … ≥ y_n ≥ 0 with Σᵢ w_{r,i}·yᵢ ≤ 1
/// per member norm, objective c↓ᵀy. The point is mapped back so that x is
/// ordered like c (ties by lowest index).
fn sorted_ball_lp(c: &[R], members: &[&WeightVector]) -> Result<(R, Vec<R>), ArgError> {
    let n = c.len();
    if members.iter().all(|w| w.get1(1).is_zero()) {
        return Err(ArgError("weights do not define a norm (w1 = 0)".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[b].cmp(&c[a]));
    let mut lp = LinearProgram::new(n);
    lp.objective = order.iter().map(|&i| -c[i].clone()).collect();
    for w in members {
        let coeffs: Vec<(usize, R)> = (1..=n)
            .filter(|&i| !w.get1(i).is_zero())
            .map(|i| (i - 1, w.get1(i)))
            .collect();
        lp.add_row(coeffs, Cmp::Le, R::one());
    }
    for i in 0..n.saturating_sub(1) {
        lp.add_row(vec![(i, R::one()), (i + 1, -R::one())], Cmp::Ge, R::zero());
    }
    let sol = solve_lp(&lp, Mode::Exact)
        .map_err(|e| ArgError(format!("ball LP failed: {e}")))?;
    let mut x = vec![R::zero(); n];
    for (posn, &i) in order.iter().enumerate() {
        x[i] = sol.values[posn].clone();
    }
    Ok((-sol.objective, x))
}

/// Exact ball optimization: maximizes cᵀx over {x ≥ 0 : f(x) ≤ 1} and
/// returns the value and a maximizer (κ = 1 for every supported norm; ℓ_p
/// with finite p ∉ {1} is evaluated in floating point).
pub fn ball_opt(f: &NormSpec, c: &[R]) -> Result<(R, Vec<R>), ArgError> {
    check_nonneg(c)?;
    let n = c.len();
    match f {
        NormSpec::Lp(LpExponent::Inf) => {
            // Ball is the box [0,1]^n.
            Ok((c.iter().sum(), vec![R::one(); n]))
        }
        NormSpec::Lp(LpExponent::Finite(p)) => {
            if *p < 1.0 {
                return Err(ArgError("lp exponent must be at least 1".into()));
            }
            if *p == 1.0 {
                // Dual is ℓ_∞: put all mass on the largest coordinate.
                let mut best = 0usize;
                for i in 1..n {
                    if c[i] > c[best] {
                        best = i;
                    }
                }
                let mut x = vec![R::zero(); n];
                x[best] = R::one();
                Ok((c[best].clone(), x))
            } else {
                // Dual norm ‖c‖_q with x_i = (c_i/‖c‖_q)^{q−1}.
                if c.iter().all(|x| x.is_zero()) {
                    return Ok((R::zero(), vec![R::zero(); n]));
                }
                let q = p / (p - 1.0);
                let cf: Vec<f64> = c.iter().map(|x| x.to_f64().expect("finite")).collect();
                let norm_q = cf.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q);
                let x: Vec<R> = cf
                    .iter()
                    .map(|ci| {
                        R::from_float((ci / norm_q).powf(q - 1.0)).expect("finite point")
                    })
                    .collect();
                Ok((R::from_float(norm_q).expect("finite value"), x))
            }
        }
        NormSpec::TopL(l) => {
            if *l == 0 || *l > n {
                return Err(ArgError(format!("top-l index {l} out of range 1..={n}")));
            }
            let mut w = vec![R::one(); *l];
            w.resize(n, R::zero());
            let w = WeightVector::new(w).expect("top-l weights are non-increasing");
            sorted_ball_lp(c, &[&w])
        }
        NormSpec::Ordered(w) => {
            if w.len() != n {
                return Err(ArgError("weight length must match cost length".into()));
            }
            sorted_ball_lp(c, &[w])
        }
        NormSpec::MaxOrdered(ws) => {
            if ws.is_empty() {
                return Err(ArgError("max-ordered norm needs at least one member".into()));
            }
            if ws.iter().any(|w| w.len() != n) {
                return Err(ArgError("weight length must match cost length".into()));
            }
            let members: Vec<&WeightVector> = ws.iter().collect();
            sorted_ball_lp(c, &members)
        }
    }
}

/// Ascending powers of `base` lying in [lo, hi_excl).
fn powers_in_range(base: &R, lo: &R, hi_excl: &R) -> Vec<R> {
    let mut p = R::one();
    if p < *lo {
        while p < *lo {
            p *= base;
        }
    } else {
        loop {
            let down = &p / base;
            if down < *lo {
                break;
            }
            p = down;
        }
    }
    let mut out = Vec::new();
    while p < *hi_excl {
        out.push(p.clone());
        p *= base;
    }
    out
}

/// Oracle-band slack when the norm is evaluated in floating point.
fn filter_pad(f: &NormSpec) -> R {
    match f {
        NormSpec::Lp(LpExponent::Finite(p)) if *p != 1.0 => {
            R::new(1.into(), 1_000_000_000.into())
        }
        _ => R::zero(),
    }
}

/// Builds the weight collection W of the reduction: enumerates W′ (all
/// expansions of non-increasing power-of-(1+ε) vectors u on POS_{n,ε} with
/// u₁ ∈ [lb/(n·high), ub(1+ε)), u_ℓ ≥ ε·u₁/(n(1+ε)) up to a guessed last
/// nonzero position ℓ*, zero beyond), keeps the candidates whose ball-oracle
/// value lies in [(1−ε)/κ, 1+ε], and appends the sentinel (lb/(n·high))·1ⁿ.
pub fn build_weight_collection(
    f: &NormSpec,
    eps: &R,
    bounds: &Bounds,
    n: usize,
) -> Result<WeightCollection, ArgError> {
    if n == 0 {
        return Err(ArgError("dimension must be positive".into()));
    }
    if !eps.is_positive() || eps > &R::new(1.into(), 2.into()) {
        return Err(ArgError("eps must satisfy 0 < eps <= 1/2".into()));
    }
    let pos = position_set(n, eps)?;
    let base = R::one() + eps;
    let n_rat = rat(n as i64);
    let low = &bounds.lb / (&n_rat * &bounds.high);
    let hi_excl = &bounds.ub * &base;
    let u1s = powers_in_range(&base, &low, &hi_excl);

    // Largest exponent: base^j ≤ n·base/eps, so that u_ℓ ≥ ε·u₁/(n(1+ε)).
    let cutoff_ratio = &n_rat * &base / eps;
    let mut jmax = 0usize;
    let mut pw = R::one();
    loop {
        let nextpw = &pw * &base;
        if nextpw > cutoff_ratio {
            break;
        }
        pw = nextpw;
        jmax += 1;
    }
    let mut inv_pows = Vec::with_capacity(jmax + 1);
    let mut cur = R::one();
    for _ in 0..=jmax {
        inv_pows.push(cur.clone());
        cur = cur / &base;
    }

    let pad = filter_pad(f);
    let lo_band = (R::one() - eps) / f.kappa() - &pad;
    let hi_band = R::one() + eps + &pad;

    let mut kept: Vec<Vec<R>> = Vec::new();
    for u1 in &u1s {
        for (lstar_idx, &lstar) in pos.positions.iter().enumerate() {
            let klen = lstar_idx + 1;
            let mut seq = vec![0usize; klen];
            loop {
                // Expand u to a full weight vector: tw_i takes the u-value at
                // the smallest POS position ≥ i; zero past ℓ*.
                let mut tw = Vec::with_capacity(n);
                for i in 1..=n {
                    let pidx = pos
                        .positions
                        .iter()
                        .position(|&q| q >= i)
                        .expect("POS contains n");
                    if pos.positions[pidx] > lstar {
                        tw.push(R::zero());
                    } else {
                        tw.push(u1 * &inv_pows[seq[pidx]]);
                    }
                }
                let (val, _) = ball_opt(f, &tw)?;
                if val >= lo_band && val <= hi_band {
                    kept.push(tw);
                }
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
    }
    kept.push(vec![low.clone(); n]);
    kept.sort();
    kept.dedup();
    let weights = kept
        .into_iter()
        .map(|w| WeightVector::new(w).expect("candidates are non-increasing"))
        .collect();
    Ok(WeightCollection { weights })
}

/// Approximation guarantee of the reduction: a γ-approximate min-max ordered
/// solution over W is a γ·κ·(1+3ε)-approximate min-norm solution.
pub fn minnorm_guarantee(gamma: &R, f: &NormSpec, eps: &R) -> R {
    gamma * f.kappa() * (R::one() + rat(3) * eps)
}

/// Runs the min-norm → min-max-ordered reduction: builds W from the bounds
/// and hands it to the problem's min-max ordered solver.
///
/// Zero instances (o⃗₁ = 0) must be detected and solved directly by the
/// caller before computing bounds; see `detect_zero_loadbal` and
/// `detect_zero_cluster`.
pub fn minnorm_reduce_and_solve<S>(
    f: &NormSpec,
    eps: &R,
    bounds: &Bounds,
    n: usize,
    solver: impl FnOnce(&WeightCollection) -> Result<S, ArgError>,
) -> Result<S, ArgError> {
    let w = build_weight_collection(f, eps, bounds, n)?;
    solver(&w)
}

/// Assignment with zero load everywhere, if one exists (each job to its
/// lowest-index zero-time machine).
pub fn detect_zero_loadbal(inst: &LoadBalInstance) -> Option<Assignment> {
    let mut sigma = Vec::with_capacity(inst.n);
    for j in 0..inst.n {
        let i = (0..inst.m).find(|&i| inst.p[i][j].is_zero())?;
        sigma.push(i);
    }
    Some(Assignment { sigma })
}

/// Facility set of size ≤ k with all assignment costs zero, if one exists
/// (lowest-index representative of each zero-distance group).
pub fn detect_zero_cluster(inst: &ClusterInstance) -> Option<Vec<usize>> {
    let mut reps: Vec<usize> = Vec::new();
    for j in 0..inst.n {
        if !reps.iter().any(|&r| inst.c[r][j].is_zero()) {
            reps.push(j);
        }
    }
    if reps.len() <= inst.k {
        Some(reps)
    } else {
        None
    }
}

/// Bounds for min-norm load balancing on a nonzero instance: each job's
/// greedy minimum gives high = Σⱼ minᵢ p_ij, ub = Σⱼ f(p_{σ(j)j}·e₁) =
/// f(e₁)·high, and lb = f(e₁) (integer times, so some load is ≥ 1).
pub fn loadbal_bounds(inst: &LoadBalInstance, f: &NormSpec) -> Result<Bounds, ArgError> {
    let mut e1 = vec![R::zero(); inst.m];
    e1[0] = R::one();
    let fe1 = norm_eval(f, &e1)?;
    if !fe1.is_positive() {
        return Err(ArgError("norm vanishes on e1".into()));
    }
    let mut high = R::zero();
    let mut ub = R::zero();
    for j in 0..inst.n {
        let pmin = (0..inst.m).map(|i| inst.p[i][j].clone()).min().unwrap();
        let mut unit = vec![R::zero(); inst.m];
        unit[0] = pmin.clone();
        ub += norm_eval(f, &unit)?;
        high += pmin;
    }
    if high < R::one() {
        return Err(ArgError("instance admits a zero-load assignment".into()));
    }
    Bounds::new(high, fe1, ub)
}

/// Bounds for min-norm k-clustering on a nonzero instance:
/// high = max(1, Σⱼ maxᵢ c_ij), ub = f(e₁)·Σⱼ maxᵢ c_ij, and
/// lb = f(e₁)·(smallest positive distance).
pub fn cluster_bounds(inst: &ClusterInstance, f: &NormSpec) -> Result<Bounds, ArgError> {
    let mut e1 = vec![R::zero(); inst.n];
    e1[0] = R::one();
    let fe1 = norm_eval(f, &e1)?;
    if !fe1.is_positive() {
        return Err(ArgError("norm vanishes on e1".into()));
    }
    let mut sum_max = R::zero();
    let mut dmin: Option<R> = None;
    for j in 0..inst.n {
        let mx = (0..inst.n).map(|i| inst.c[i][j].clone()).max().unwrap();
        sum_max += mx;
        for i in 0..inst.n {
            if inst.c[i][j].is_positive()
                && dmin.as_ref().map_or(true, |d| &inst.c[i][j] < d)
            {
                dmin = Some(inst.c[i][j].clone());
            }
        }
    }
    let dmin =
        dmin.ok_or_else(|| ArgError("instance admits a zero-cost clustering".into()))?;
    let ub = &fe1 * &sum_max;
    let lb = &fe1 * &dmin;
    let high = if sum_max < R::one() { R::one() } else { sum_max };
    Bounds::new(high, lb, ub)
}

/// Upper bound on the number of non-decreasing sequences of k integers from
/// {0,…,N}: (2e)^{max{N,k}}.
pub fn nondec_bound(n_range: usize, k: usize) -> f64 {
    (2.0 * std::f64::consts::E).powi(n_range.max(k) as i32)
}
