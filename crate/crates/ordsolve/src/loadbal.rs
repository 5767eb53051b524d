//! Load-balancing LPs, rounding procedures, and the Top-ℓ, ordered,
//! min-max-ordered, and min-norm solvers for unrelated machines.
//!
//! The LP relaxations split each assignment variable x_ij into below- and
//! above-threshold parts per breakpoint band. Two rounding procedures are
//! provided: a GAP-style (Shmoys–Tardos) min-cost matching over machine
//! copies, used by the Top-ℓ and single-ordered solvers, and a deterministic
//! weight-oblivious iterative rounding whose single output satisfies
//! Σᵢ h_{10t}(nw; load) ≤ 2·OLB(nw; q̄) + 4·Σ_ℓ nw_ℓ t_ℓ for every sparsified
//! weight vector nw simultaneously, which powers the min-max and min-norm
//! solvers.

use crate::lpround::{
    iterative_round, solve_lp, Cmp, IterRoundSystem, LinearProgram, LpError, Mode,
};
use crate::model::{
    load_vector, ordered_cost, rat, ArgError, Assignment, LoadBalInstance, NormSpec,
    WeightVector, R,
};
use crate::normreduce::{detect_zero_loadbal, loadbal_bounds, minnorm_reduce_and_solve};
use crate::proxy::{enumerate_thresholds, is_valid, ThresholdVector};
use crate::sparsify::{position_set, sparsify_weights};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Top-ℓ indicator weight vector of dimension m.
pub fn topl_indicator(l: usize, m: usize) -> Result<WeightVector, ArgError> {
    if l == 0 || l > m {
        return Err(ArgError(format!("top-l index {l} out of range 1..={m}")));
    }
    let mut w = vec![R::one(); l];
    w.resize(m, R::zero());
    WeightVector::new(w)
}

/// Threshold vector with the single breakpoint position ℓ (Top-ℓ case).
pub fn singleton_threshold(l: usize, m: usize, t: &R) -> Result<ThresholdVector, ArgError> {
    if l == 0 || l > m {
        return Err(ArgError(format!("top-l index {l} out of range 1..={m}")));
    }
    if t.is_negative() {
        return Err(ArgError("threshold must be nonnegative".into()));
    }
    Ok(ThresholdVector {
        t: vec![t.clone()],
        positions: vec![l],
        n: m,
    })
}

/// Variable layout of the band LPs: x_ij, then z_ij^{(ℓ)} per band, then
/// y_ij^{(ℓ)} per band.
#[derive(Clone, Copy, Debug)]
pub struct OlbLayout {
    /// Machine count.
    pub m: usize,
    /// Job count.
    pub n: usize,
    /// Number of breakpoint bands |POS|.
    pub bands: usize,
}

impl OlbLayout {
    /// Layout for an instance and threshold vector.
    pub fn new(inst: &LoadBalInstance, t: &ThresholdVector) -> Self {
        OlbLayout {
            m: inst.m,
            n: inst.n,
            bands: t.positions.len(),
        }
    }

    /// Index of x_ij.
    pub fn x(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Index of z_ij^{(ℓ)} for the b-th breakpoint position.
    pub fn z(&self, i: usize, j: usize, b: usize) -> usize {
        self.m * self.n * (1 + b) + i * self.n + j
    }

    /// Index of y_ij^{(ℓ)} for the b-th breakpoint position.
    pub fn y(&self, i: usize, j: usize, b: usize) -> usize {
        self.m * self.n * (1 + self.bands + b) + i * self.n + j
    }

    /// Total variable count.
    pub fn num_vars(&self) -> usize {
        self.m * self.n * (1 + 2 * self.bands)
    }
}

fn check_olb_args(
    inst: &LoadBalInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
) -> Result<(), ArgError> {
    if tw.len() != inst.m {
        return Err(ArgError("weight length must equal machine count".into()));
    }
    if t.n != inst.m {
        return Err(ArgError("threshold dimension must equal machine count".into()));
    }
    if !is_valid(t) {
        return Err(ArgError("threshold vector is not valid".into()));
    }
    Ok(())
}

/// Weight differences tw_ℓ − tw_{next(ℓ)} per breakpoint band of t.
pub(crate) fn band_weight_diffs(tw: &WeightVector, t: &ThresholdVector) -> Vec<R> {
    (0..t.positions.len())
        .map(|b| {
            let l = t.positions[b];
            let nx = if b + 1 < t.positions.len() {
                t.positions[b + 1]
            } else {
                t.n + 1
            };
            tw.get1(l) - tw.get1(nx)
        })
        .collect()
}

/// Builds the LP (OLB-P_t): minimize Σ (tw_ℓ − tw_{next(ℓ)})·p_ij·y_ij^{(ℓ)}
/// subject to (OLB1) job assignment, (OLB2) x = z + y per band, (OLB3) z
/// non-increasing across bands, (OLB4) per-machine band increments bounded by
/// threshold differences, and (OLB5) p·y ≥ (p − t)·x.
pub fn build_olb_lp(
    inst: &LoadBalInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
) -> Result<LinearProgram, ArgError> {
    check_olb_args(inst, tw, t)?;
    let lay = OlbLayout::new(inst, t);
    let nb = lay.bands;
    let mut lp = LinearProgram::new(lay.num_vars());
    let dws = band_weight_diffs(tw, t);
    for i in 0..inst.m {
        for j in 0..inst.n {
            for b in 0..nb {
                lp.objective[lay.y(i, j, b)] = &dws[b] * &inst.p[i][j];
            }
        }
    }
    // (OLB1)
    for j in 0..inst.n {
        lp.add_row(
            (0..inst.m).map(|i| (lay.x(i, j), R::one())).collect(),
            Cmp::Eq,
            R::one(),
        );
    }
    for i in 0..inst.m {
        for b in 0..nb {
            for j in 0..inst.n {
                // (OLB2)
                lp.add_row(
                    vec![
                        (lay.x(i, j), R::one()),
                        (lay.z(i, j, b), -R::one()),
                        (lay.y(i, j, b), -R::one()),
                    ],
                    Cmp::Eq,
                    R::zero(),
                );
                // (OLB3); the last band's successor is z^{(m+1)} = 0.
                if b + 1 < nb {
                    lp.add_row(
                        vec![
                            (lay.z(i, j, b + 1), R::one()),
                            (lay.z(i, j, b), -R::one()),
                        ],
                        Cmp::Le,
                        R::zero(),
                    );
                }
                // (OLB5), nontrivial only when p_ij > t_ℓ.
                if inst.p[i][j] > t.t[b] {
                    lp.add_row(
                        vec![
                            (lay.y(i, j, b), inst.p[i][j].clone()),
                            (lay.x(i, j), &t.t[b] - &inst.p[i][j]),
                        ],
                        Cmp::Ge,
                        R::zero(),
                    );
                }
            }
            // (OLB4)
            let tnx = if b + 1 < nb {
                t.t[b + 1].clone()
            } else {
                R::zero()
            };
            let mut coeffs = Vec::new();
            for j in 0..inst.n {
                if inst.p[i][j].is_positive() {
                    coeffs.push((lay.z(i, j, b), inst.p[i][j].clone()));
                    if b + 1 < nb {
                        coeffs.push((lay.z(i, j, b + 1), -inst.p[i][j].clone()));
                    }
                }
            }
            lp.add_row(coeffs, Cmp::Le, &t.t[b] - tnx);
        }
    }
    Ok(lp)
}

/// Builds the Top-ℓ LP (Top-ℓ-LB_t): the single-band special case of
/// (OLB-P_t) with constraints (T1)–(T4) and objective Σ p_ij·y_ij.
pub fn build_topl_lp(
    inst: &LoadBalInstance,
    l: usize,
    t: &R,
) -> Result<LinearProgram, ArgError> {
    let tw = topl_indicator(l, inst.m)?;
    let tv = singleton_threshold(l, inst.m, t)?;
    build_olb_lp(inst, &tw, &tv)
}

/// Builds the min-max LP: minimize λ subject to (OLB1)–(OLB5) and, for every
/// weight vector r, Σ_ℓ (tw_ℓ^{(r)} − tw_{next(ℓ)}^{(r)})·ℓ·t_ℓ plus the
/// OLB objective under tw^{(r)} being at most λ. λ is the last variable.
pub fn build_minmax_lb_lp(
    inst: &LoadBalInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
) -> Result<LinearProgram, ArgError> {
    if tws.is_empty() {
        return Err(ArgError("min-max needs at least one weight vector".into()));
    }
    let mut lp = build_olb_lp(inst, &tws[0], t)?;
    let lay = OlbLayout::new(inst, t);
    let lam = lay.num_vars();
    lp.num_vars += 1;
    lp.objective = vec![R::zero(); lp.num_vars];
    lp.objective[lam] = R::one();
    lp.unit_upper.push(false);
    for tw in tws {
        check_olb_args(inst, tw, t)?;
        let dws = band_weight_diffs(tw, t);
        let mut lin = R::zero();
        for (b, dw) in dws.iter().enumerate() {
            lin += dw * rat(t.positions[b] as i64) * &t.t[b];
        }
        let mut coeffs = vec![(lam, -R::one())];
        for i in 0..inst.m {
            for j in 0..inst.n {
                for b in 0..lay.bands {
                    let c = &dws[b] * &inst.p[i][j];
                    if !c.is_zero() {
                        coeffs.push((lay.y(i, j, b), c));
                    }
                }
            }
        }
        lp.add_row(coeffs, Cmp::Le, -lin);
    }
    Ok(lp)
}

/// A (fractional) solution of the band LPs, with thresholds attached.
#[derive(Clone, Debug)]
pub struct OlbSolution {
    /// x[i][j]: fraction of job j on machine i.
    pub x: Vec<Vec<R>>,
    /// z[i][j][b]: below-threshold part for the b-th breakpoint band.
    pub z: Vec<Vec<Vec<R>>>,
    /// y[i][j][b]: above-threshold part for the b-th breakpoint band.
    pub y: Vec<Vec<Vec<R>>>,
    /// The threshold vector the solution was solved against.
    pub t: ThresholdVector,
}

impl OlbSolution {
    /// Derived band variables q over ℓ′ ∈ {0} ∪ POS: q^{(0)} = x − z^{(first)},
    /// q^{(ℓ)} = z^{(ℓ)} − z^{(next(ℓ))}, with z^{(m+1)} = 0. Tiny negative
    /// float residues are clamped to zero.
    pub fn q(&self) -> Vec<Vec<Vec<R>>> {
        let nb = self.t.positions.len();
        let clamp = |v: R| if v.is_negative() { R::zero() } else { v };
        self.x
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                xi.iter()
                    .enumerate()
                    .map(|(j, xij)| {
                        let mut bands = Vec::with_capacity(nb + 1);
                        bands.push(clamp(xij - &self.z[i][j][0]));
                        for b in 0..nb {
                            let nxt = if b + 1 < nb {
                                self.z[i][j][b + 1].clone()
                            } else {
                                R::zero()
                            };
                            bands.push(clamp(&self.z[i][j][b] - nxt));
                        }
                        bands
                    })
                    .collect()
            })
            .collect()
    }

    /// OLB objective Σ (tw_ℓ − tw_{next(ℓ)})·p_ij·y_ij^{(ℓ)}.
    pub fn objective(&self, inst: &LoadBalInstance, tw: &WeightVector) -> R {
        let dws = band_weight_diffs(tw, &self.t);
        let mut acc = R::zero();
        for i in 0..inst.m {
            for j in 0..inst.n {
                for (b, dw) in dws.iter().enumerate() {
                    if !dw.is_zero() {
                        acc += dw * &inst.p[i][j] * &self.y[i][j][b];
                    }
                }
            }
        }
        acc
    }

    /// The same objective in band form:
    /// Σ_{ℓ′∈{0}∪POS} tw_{next(ℓ′)}·p_ij·q_ij^{(ℓ′)}.
    pub fn objective_q(&self, inst: &LoadBalInstance, tw: &WeightVector) -> R {
        let q = self.q();
        let nb = self.t.positions.len();
        let mut coef = Vec::with_capacity(nb + 1);
        coef.push(tw.get1(self.t.positions[0]));
        for b in 0..nb {
            if b + 1 < nb {
                coef.push(tw.get1(self.t.positions[b + 1]));
            } else {
                coef.push(R::zero());
            }
        }
        let mut acc = R::zero();
        for i in 0..inst.m {
            for j in 0..inst.n {
                for (b, c) in coef.iter().enumerate() {
                    if !c.is_zero() {
                        acc += c * &inst.p[i][j] * &q[i][j][b];
                    }
                }
            }
        }
        acc
    }

    /// Checks (OLB1)–(OLB5) within an additive tolerance.
    pub fn feasible(&self, inst: &LoadBalInstance, tol: &R) -> bool {
        let nb = self.t.positions.len();
        for j in 0..inst.n {
            let s: R = (0..inst.m).map(|i| self.x[i][j].clone()).sum();
            if (s - R::one()).abs() > *tol {
                return false;
            }
        }
        for i in 0..inst.m {
            for b in 0..nb {
                let mut band_load = R::zero();
                for j in 0..inst.n {
                    let resid = &self.x[i][j] - &self.z[i][j][b] - &self.y[i][j][b];
                    if resid.abs() > *tol {
                        return false;
                    }
                    if self.x[i][j].is_negative()
                        || self.z[i][j][b].is_negative()
                        || self.y[i][j][b].is_negative()
                    {
                        return false;
                    }
                    if b + 1 < nb && self.z[i][j][b + 1] > &self.z[i][j][b] + tol {
                        return false;
                    }
                    let znx = if b + 1 < nb {
                        self.z[i][j][b + 1].clone()
                    } else {
                        R::zero()
                    };
                    band_load += &inst.p[i][j] * (&self.z[i][j][b] - znx);
                    let rhs = (&inst.p[i][j] - &self.t.t[b]) * &self.x[i][j];
                    if &inst.p[i][j] * &self.y[i][j][b] < rhs - tol {
                        return false;
                    }
                }
                let tnx = if b + 1 < nb {
                    self.t.t[b + 1].clone()
                } else {
                    R::zero()
                };
                if band_load > &self.t.t[b] - tnx + tol {
                    return false;
                }
            }
        }
        true
    }
}

/// The canonical feasible point induced by an integral assignment:
/// x_ij = [σ(j) = i] and z_ij^{(ℓ)} = min{1, t_ℓ/load_σ(i)}·x_ij. Its OLB
/// objective equals Σᵢ h_t(tw; load_σ(i)) for every tw on the same POS.
pub fn canonical_olb_point(
    inst: &LoadBalInstance,
    sigma: &Assignment,
    t: &ThresholdVector,
) -> Result<OlbSolution, ArgError> {
    if sigma.sigma.len() != inst.n {
        return Err(ArgError("assignment length must equal job count".into()));
    }
    if t.n != inst.m {
        return Err(ArgError("threshold dimension must equal machine count".into()));
    }
    if !is_valid(t) {
        return Err(ArgError("threshold vector is not valid".into()));
    }
    let loads = load_vector(inst, sigma);
    let nb = t.positions.len();
    let mut x = vec![vec![R::zero(); inst.n]; inst.m];
    let mut z = vec![vec![vec![R::zero(); nb]; inst.n]; inst.m];
    let mut y = vec![vec![vec![R::zero(); nb]; inst.n]; inst.m];
    for (j, &i) in sigma.sigma.iter().enumerate() {
        x[i][j] = R::one();
        for b in 0..nb {
            let zij = if loads[i].is_zero() || loads[i] < t.t[b] {
                R::one()
            } else {
                &t.t[b] / &loads[i]
            };
            y[i][j][b] = R::one() - &zij;
            z[i][j][b] = zij;
        }
    }
    Ok(OlbSolution {
        x,
        z,
        y,
        t: t.clone(),
    })
}

pub(crate) fn unpack_olb(
    inst: &LoadBalInstance,
    t: &ThresholdVector,
    values: &[R],
) -> OlbSolution {
    let lay = OlbLayout::new(inst, t);
    let nb = lay.bands;
    let mut x = vec![vec![R::zero(); inst.n]; inst.m];
    let mut z = vec![vec![vec![R::zero(); nb]; inst.n]; inst.m];
    let mut y = vec![vec![vec![R::zero(); nb]; inst.n]; inst.m];
    for i in 0..inst.m {
        for j in 0..inst.n {
            x[i][j] = values[lay.x(i, j)].clone();
            for b in 0..nb {
                z[i][j][b] = values[lay.z(i, j, b)].clone();
                y[i][j][b] = values[lay.y(i, j, b)].clone();
            }
        }
    }
    OlbSolution {
        x,
        z,
        y,
        t: t.clone(),
    }
}

/// Solves (OLB-P_t) and unpacks the optimum.
pub fn solve_olb_lp(
    inst: &LoadBalInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
    mode: Mode,
) -> Result<(R, OlbSolution), ArgError> {
    let lp = build_olb_lp(inst, tw, t)?;
    let sol = solve_lp(&lp, mode).map_err(|e| ArgError(format!("OLB LP failed: {e}")))?;
    Ok((sol.objective, unpack_olb(inst, t, &sol.values)))
}

/// Solves the min-max LP and unpacks (λ*, solution).
pub fn solve_minmax_lb_lp(
    inst: &LoadBalInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
    mode: Mode,
) -> Result<(R, OlbSolution), ArgError> {
    let lp = build_minmax_lb_lp(inst, tws, t)?;
    let sol =
        solve_lp(&lp, mode).map_err(|e| ArgError(format!("min-max LP failed: {e}")))?;
    Ok((sol.objective, unpack_olb(inst, t, &sol.values)))
}

/// Filtering step: q̂_ij^{(ℓ)} = 0 whenever p_ij > 2t_ℓ; surviving bands are
/// rescaled by x_ij/y_ij^{(ℓ̄)} where ℓ̄ is the smallest position with
/// p_ij > 2t_ℓ̄ (0/0 = 0). Guarantees q̂ ≤ 2q̄ and unchanged per-job totals.
pub fn filter_q(
    sol: &OlbSolution,
    inst: &LoadBalInstance,
) -> Result<Vec<Vec<Vec<R>>>, ArgError> {
    if sol.x.len() != inst.m || sol.x[0].len() != inst.n {
        return Err(ArgError("solution dimensions do not match instance".into()));
    }
    let qbar = sol.q();
    let nb = sol.t.positions.len();
    let two = rat(2);
    let mut qhat = qbar.clone();
    for i in 0..inst.m {
        for j in 0..inst.n {
            let over = (0..nb).find(|&b| inst.p[i][j] > &two * &sol.t.t[b]);
            let Some(lbar) = over else { continue };
            let ybar = &sol.y[i][j][lbar];
            let scale = if ybar.is_positive() {
                &sol.x[i][j] / ybar
            } else {
                R::zero()
            };
            // Band 0 has t_0 = ∞ and is never zeroed, only rescaled.
            qhat[i][j][0] = &qbar[i][j][0] * &scale;
            for b in 0..nb {
                qhat[i][j][b + 1] = if inst.p[i][j] > &two * &sol.t.t[b] {
                    R::zero()
                } else {
                    &qbar[i][j][b + 1] * &scale
                };
            }
        }
    }
    Ok(qhat)
}

fn is_power_of_two(r: &R) -> bool {
    if !r.is_positive() {
        return false;
    }
    let pow2 = |x: &BigInt| {
        let u = x.magnitude();
        u.count_ones() == 1
    };
    (pow2(r.numer()) && r.denom().is_one()) || (r.numer().is_one() && pow2(r.denom()))
}

/// The result of the weight-oblivious rounding: the assignment and the
/// integral band variables q̃ it came from.
#[derive(Clone, Debug)]
pub struct ObliviousRound {
    /// The rounded assignment σ̃.
    pub assignment: Assignment,
    /// q̃[i][j][ℓ′] over ℓ′ ∈ {0} ∪ POS, a {0,1} point.
    pub q: Vec<Vec<Vec<R>>>,
}

/// Deterministic weight-oblivious rounding: filters q̄, then iteratively
/// rounds the auxiliary system (IR) whose budget rows are the per-(machine,
/// band) rows with right-hand side 2(t_ℓ − t_{next(ℓ)}) and the per-band
/// total-load rows with right-hand side 2·Σ p·q̄^{(ℓ)} (k = 2). Requires
/// every t_ℓ to be a power of 2 or 0. The fixed output satisfies
/// Σᵢ h_{10t}(nw; load_σ̃(i)) ≤ 2·OLB(nw; q̄) + 4·Σ_ℓ nw_ℓ·t_ℓ for every
/// sparsified nw simultaneously.
pub fn oblivious_round_lb_detailed(
    sol: &OlbSolution,
    inst: &LoadBalInstance,
    mode: Mode,
) -> Result<ObliviousRound, ArgError> {
    if sol.t.t.iter().any(|t| !t.is_zero() && !is_power_of_two(t)) {
        return Err(ArgError("thresholds must be powers of 2 or 0".into()));
    }
    let nb = sol.t.positions.len();
    let qbar = sol.q();
    let qhat = filter_q(sol, inst)?;
    let nbands = nb + 1;
    let var = |i: usize, j: usize, b: usize| (i * inst.n + j) * nbands + b;
    let num_vars = inst.m * inst.n * nbands;
    let mut c = vec![R::zero(); num_vars];
    for i in 0..inst.m {
        for j in 0..inst.n {
            c[var(i, j, 0)] = inst.p[i][j].clone();
        }
    }
    let mut laminar = Vec::with_capacity(inst.n);
    for j in 0..inst.n {
        let mut s = Vec::with_capacity(inst.m * nbands);
        for i in 0..inst.m {
            for b in 0..nbands {
                s.push(var(i, j, b));
            }
        }
        laminar.push((s, R::one()));
    }
    let two = rat(2);
    let mut budget = Vec::new();
    for i in 0..inst.m {
        for b in 0..nb {
            let tnx = if b + 1 < nb {
                sol.t.t[b + 1].clone()
            } else {
                R::zero()
            };
            let coeffs: Vec<(usize, R)> = (0..inst.n)
                .filter(|&j| inst.p[i][j].is_positive())
                .map(|j| (var(i, j, b + 1), inst.p[i][j].clone()))
                .collect();
            if !coeffs.is_empty() {
                budget.push((coeffs, &two * (&sol.t.t[b] - tnx)));
            }
        }
    }
    for b in 0..nb {
        let mut coeffs = Vec::new();
        let mut total = R::zero();
        for i in 0..inst.m {
            for j in 0..inst.n {
                if inst.p[i][j].is_positive() {
                    coeffs.push((var(i, j, b + 1), inst.p[i][j].clone()));
                    total += &inst.p[i][j] * &qbar[i][j][b + 1];
                }
            }
        }
        if !coeffs.is_empty() {
            budget.push((coeffs, &two * total));
        }
    }
    let sys = IterRoundSystem::new(num_vars, c, laminar.clone(), laminar, budget, 2)
        .map_err(|e| ArgError(format!("rounding system rejected: {e}")))?;
    let mut flat = vec![R::zero(); num_vars];
    for i in 0..inst.m {
        for j in 0..inst.n {
            for b in 0..nbands {
                flat[var(i, j, b)] = qhat[i][j][b].clone();
            }
        }
    }
    let qtil = iterative_round(&sys, &flat, mode)
        .map_err(|e| ArgError(format!("iterative rounding failed: {e}")))?;
    let mut sigma = Vec::with_capacity(inst.n);
    let mut q = vec![vec![vec![R::zero(); nbands]; inst.n]; inst.m];
    for j in 0..inst.n {
        let mut assigned = None;
        for i in 0..inst.m {
            for b in 0..nbands {
                if qtil[var(i, j, b)].is_one() {
                    q[i][j][b] = R::one();
                    assigned = Some(i);
                }
            }
        }
        let Some(i) = assigned else {
            return Err(ArgError("rounding left a job unassigned".into()));
        };
        sigma.push(i);
    }
    Ok(ObliviousRound {
        assignment: Assignment { sigma },
        q,
    })
}

/// `oblivious_round_lb_detailed` returning just the assignment.
pub fn oblivious_round_lb(
    sol: &OlbSolution,
    inst: &LoadBalInstance,
    mode: Mode,
) -> Result<Assignment, ArgError> {
    Ok(oblivious_round_lb_detailed(sol, inst, mode)?.assignment)
}

/// The Shmoys–Tardos copy graph: machine copies with a fractional matching
/// x̄ obtained by filling copies with jobs in non-increasing p_ij order.
#[derive(Clone, Debug)]
pub struct CopyGraph {
    /// Machine owning each copy.
    pub machine_of_copy: Vec<usize>,
    /// True for the first copy of each machine.
    pub is_first: Vec<bool>,
    /// x̄[copy][job] fractional matching values (job totals 1, copy ≤ 1).
    pub xbar: Vec<Vec<R>>,
}

/// Builds the copy graph from a fractional assignment (Σᵢ x_ij = 1 per job):
/// machine i gets ⌈Σⱼ x_ij⌉ copies, filled greedily by jobs sorted by
/// non-increasing p_ij (ties by lower job index).
pub fn build_copy_graph(
    inst: &LoadBalInstance,
    x: &[Vec<R>],
) -> Result<CopyGraph, ArgError> {
    if x.len() != inst.m || x.iter().any(|r| r.len() != inst.n) {
        return Err(ArgError("fractional assignment has wrong dimensions".into()));
    }
    let mut machine_of_copy = Vec::new();
    let mut is_first = Vec::new();
    let mut xbar: Vec<Vec<R>> = Vec::new();
    for i in 0..inst.m {
        let total: R = x[i].iter().sum();
        if !total.is_positive() {
            continue;
        }
        let ni = total.ceil().to_integer().to_usize().ok_or_else(|| {
            ArgError("fractional totals too large for copy construction".into())
        })?;
        let base = machine_of_copy.len();
        for r in 0..ni {
            machine_of_copy.push(i);
            is_first.push(r == 0);
            xbar.push(vec![R::zero(); inst.n]);
        }
        let mut order: Vec<usize> = (0..inst.n).collect();
        order.sort_by(|&a, &b| inst.p[i][b].cmp(&inst.p[i][a]).then(a.cmp(&b)));
        let mut cur = 0usize;
        let mut cap = R::one();
        for &j in &order {
            let mut mass = x[i][j].clone();
            while mass.is_positive() {
                let amt = if mass < cap { mass.clone() } else { cap.clone() };
                xbar[base + cur][j] += &amt;
                mass -= &amt;
                cap -= &amt;
                if cap.is_zero() && cur + 1 < ni {
                    cur += 1;
                    cap = R::one();
                }
            }
        }
    }
    Ok(CopyGraph {
        machine_of_copy,
        is_first,
        xbar,
    })
}

/// Exact min-cost matching covering every job (copies take at most one job),
/// by successive shortest augmenting paths. cost[j][k] = None for absent
/// edges. Returns job → copy.
fn min_cost_job_matching(
    num_jobs: usize,
    num_copies: usize,
    cost: &[Vec<Option<R>>],
) -> Result<Vec<usize>, ArgError> {
    let mut copy_match: Vec<Option<usize>> = vec![None; num_copies];
    let mut job_match: Vec<Option<usize>> = vec![None; num_jobs];
    for j0 in 0..num_jobs {
        // Bellman–Ford over the residual graph from job j0.
        let mut dist_j: Vec<Option<R>> = vec![None; num_jobs];
        let mut dist_k: Vec<Option<R>> = vec![None; num_copies];
        let mut parent_k: Vec<usize> = vec![usize::MAX; num_copies];
        let mut parent_j: Vec<usize> = vec![usize::MAX; num_jobs];
        dist_j[j0] = Some(R::zero());
        for _ in 0..(num_jobs + num_copies) {
            let mut changed = false;
            for j in 0..num_jobs {
                let Some(dj) = dist_j[j].clone() else { continue };
                for k in 0..num_copies {
                    let Some(cjk) = &cost[j][k] else { continue };
                    if copy_match[k] == Some(j) {
                        continue;
                    }
                    let nd = &dj + cjk;
                    if dist_k[k].as_ref().map_or(true, |d| nd < *d) {
                        dist_k[k] = Some(nd);
                        parent_k[k] = j;
                        changed = true;
                    }
                }
            }
            for k in 0..num_copies {
                let Some(dk) = dist_k[k].clone() else { continue };
                if let Some(j2) = copy_match[k] {
                    let c = cost[j2][k].as_ref().expect("matched edge exists");
                    let nd = dk - c;
                    if dist_j[j2].as_ref().map_or(true, |d| nd < *d) {
                        dist_j[j2] = Some(nd);
                        parent_j[j2] = k;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut best: Option<usize> = None;
        for k in 0..num_copies {
            if copy_match[k].is_none() && dist_k[k].is_some() {
                let better = match best {
                    None => true,
                    Some(bk) => dist_k[k] < dist_k[bk],
                };
                if better {
                    best = Some(k);
                }
            }
        }
        let Some(mut k) = best else {
            return Err(ArgError("no augmenting path: matching infeasible".into()));
        };
        loop {
            let j = parent_k[k];
            let prev = job_match[j];
            copy_match[k] = Some(j);
            job_match[j] = Some(k);
            if j == j0 {
                break;
            }
            k = prev.expect("interior path jobs were matched");
            debug_assert_eq!(parent_j[j], k);
        }
    }
    Ok(job_match.into_iter().map(|k| k.unwrap()).collect())
}

fn gap_round_with_costs(
    inst: &LoadBalInstance,
    x: &[Vec<R>],
    first_cost: &dyn Fn(usize, usize) -> R,
) -> Result<Assignment, ArgError> {
    // Integral inputs round to themselves.
    if x.iter().flatten().all(|v| v.is_zero() || v.is_one()) {
        let mut sigma = Vec::with_capacity(inst.n);
        for j in 0..inst.n {
            let i = (0..inst.m)
                .find(|&i| x[i][j].is_one())
                .ok_or_else(|| ArgError("job unassigned in integral input".into()))?;
            sigma.push(i);
        }
        return Ok(Assignment { sigma });
    }
    let g = build_copy_graph(inst, x)?;
    let nk = g.machine_of_copy.len();
    let mut cost = vec![vec![None; nk]; inst.n];
    for (k, col) in g.xbar.iter().enumerate() {
        let i = g.machine_of_copy[k];
        for j in 0..inst.n {
            if col[j].is_positive() {
                cost[j][k] = Some(if g.is_first[k] {
                    first_cost(i, j)
                } else {
                    R::zero()
                });
            }
        }
    }
    let jm = min_cost_job_matching(inst.n, nk, &cost)?;
    Ok(Assignment {
        sigma: jm.into_iter().map(|k| g.machine_of_copy[k]).collect(),
    })
}

/// Deterministic GAP-style rounding: builds the copy graph, puts cost
/// (p_ij − t)⁺ on first-copy edges and 0 elsewhere, and returns the
/// assignment of a min-cost matching covering all jobs. Guarantees
/// Σᵢ (load_σ̃(i) − 2t)⁺ ≤ 2·Σ p_ij·y_ij for any witness (y, z) of the
/// threshold t against the same x.
pub fn gap_round_deterministic(
    inst: &LoadBalInstance,
    x: &[Vec<R>],
    t: &R,
) -> Result<Assignment, ArgError> {
    gap_round_with_costs(inst, x, &|i, j| {
        if &inst.p[i][j] > t {
            &inst.p[i][j] - t
        } else {
            R::zero()
        }
    })
}

/// Birkhoff–von-Neumann decomposition of the copy-graph fractional matching
/// (padded to a doubly stochastic square matrix with dummy jobs): returns
/// (weight, job → copy) pairs whose weights sum to 1 and whose marginals
/// reproduce x̄ exactly on real jobs.
pub fn bvn_decompose(g: &CopyGraph) -> Result<Vec<(R, Vec<usize>)>, ArgError> {
    let nk = g.xbar.len();
    let nj = if nk == 0 { 0 } else { g.xbar[0].len() };
    if nk < nj {
        return Err(ArgError("copy graph has fewer copies than jobs".into()));
    }
    // rows: nj real jobs then nk − nj dummy jobs filling column slack.
    let mut mat = vec![vec![R::zero(); nk]; nk];
    for k in 0..nk {
        for j in 0..nj {
            mat[j][k] = g.xbar[k][j].clone();
        }
    }
    let mut slack: Vec<R> = (0..nk)
        .map(|k| R::one() - g.xbar[k].iter().sum::<R>())
        .collect();
    if slack.iter().any(|s| s.is_negative()) {
        return Err(ArgError("copy loads exceed capacity".into()));
    }
    for d in nj..nk {
        let mut mass = R::one();
        for k in 0..nk {
            if !mass.is_positive() {
                break;
            }
            if slack[k].is_positive() {
                let amt = if mass < slack[k] { mass.clone() } else { slack[k].clone() };
                mat[d][k] = amt.clone();
                slack[k] -= &amt;
                mass -= &amt;
            }
        }
        if mass.is_positive() {
            return Err(ArgError("padding failed: residual dummy mass".into()));
        }
    }
    let mut out: Vec<(R, Vec<usize>)> = Vec::new();
    let mut rem = R::one();
    while rem.is_positive() {
        // Perfect matching in the support of the residual matrix.
        let adj: Vec<Vec<usize>> = (0..nk)
            .map(|r| (0..nk).filter(|&k| mat[r][k].is_positive()).collect())
            .collect();
        let mut row_of: Vec<Option<usize>> = vec![None; nk];
        let mut col_of: Vec<Option<usize>> = vec![None; nk];
        fn try_aug(
            r: usize,
            adj: &[Vec<usize>],
            row_of: &mut Vec<Option<usize>>,
            col_of: &mut Vec<Option<usize>>,
            seen: &mut Vec<bool>,
        ) -> bool {
            for &k in &adj[r] {
                if seen[k] {
                    continue;
                }
                seen[k] = true;
                if row_of[k].is_none()
                    || try_aug(row_of[k].unwrap(), adj, row_of, col_of, seen)
                {
                    row_of[k] = Some(r);
                    col_of[r] = Some(k);
                    return true;
                }
            }
            false
        }
        for r in 0..nk {
            let mut seen = vec![false; nk];
            if !try_aug(r, &adj, &mut row_of, &mut col_of, &mut seen) {
                return Err(ArgError(
                    "decomposition residual admits no perfect matching".into(),
                ));
            }
        }
        let m: Vec<usize> = (0..nk).map(|r| col_of[r].unwrap()).collect();
        let theta = m
            .iter()
            .enumerate()
            .map(|(r, &k)| mat[r][k].clone())
            .min()
            .unwrap();
        for (r, &k) in m.iter().enumerate() {
            mat[r][k] -= &theta;
        }
        rem -= &theta;
        out.push((theta, m[..nj].to_vec()));
    }
    Ok(out)
}

/// Randomized GAP-style rounding: samples a matching from the BvN
/// decomposition of the copy graph with a seeded generator. Edge marginals
/// equal x̄, so Pr[(k,j) matched] ≤ x_ij.
pub fn gap_round_randomized(
    inst: &LoadBalInstance,
    x: &[Vec<R>],
    seed: u64,
) -> Result<Assignment, ArgError> {
    if x.iter().flatten().all(|v| v.is_zero() || v.is_one()) {
        return gap_round_with_costs(inst, x, &|_, _| R::zero());
    }
    let g = build_copy_graph(inst, x)?;
    let parts = bvn_decompose(&g)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let draw = R::new(BigInt::from(rng.next_u64()), BigInt::from(2u128.pow(64)));
    let mut acc = R::zero();
    let mut chosen = &parts[parts.len() - 1].1;
    for (w, m) in &parts {
        acc += w;
        if draw < acc {
            chosen = m;
            break;
        }
    }
    Ok(Assignment {
        sigma: chosen.iter().map(|&k| g.machine_of_copy[k]).collect(),
    })
}

/// Greedy assignment of every job to its lowest-index cheapest machine.
pub fn greedy_assignment(inst: &LoadBalInstance) -> Assignment {
    let sigma = (0..inst.n)
        .map(|j| {
            (0..inst.m)
                .min_by(|&a, &b| inst.p[a][j].cmp(&inst.p[b][j]))
                .unwrap()
        })
        .collect();
    Assignment { sigma }
}

/// Σⱼ minᵢ p_ij, the total load of the greedy assignment; an upper bound on
/// the largest load of any optimal solution whenever w₁ > 0.
pub fn greedy_total(inst: &LoadBalInstance) -> R {
    (0..inst.n)
        .map(|j| (0..inst.m).map(|i| inst.p[i][j].clone()).min().unwrap())
        .sum()
}

/// Sorted union over machines of all subset sums of processing times, capped
/// at `cap`: every load value any assignment can realize (and hence every
/// order statistic of an optimal load vector) appears here.
pub fn achievable_loads(inst: &LoadBalInstance, cap: &R) -> Result<Vec<R>, ArgError> {
    let capu = cap
        .floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| ArgError("threshold cap out of range".into()))?;
    if capu > 2_000_000 {
        return Err(ArgError(
            "processing times too large for the exact threshold grid".into(),
        ));
    }
    let mut seen = vec![false; capu + 1];
    seen[0] = true;
    for i in 0..inst.m {
        let mut dp = vec![false; capu + 1];
        dp[0] = true;
        for j in 0..inst.n {
            let pv = inst.p[i][j]
                .to_integer()
                .to_usize()
                .ok_or_else(|| ArgError("processing time out of range".into()))?;
            if pv == 0 || pv > capu {
                continue;
            }
            for s in (0..=capu - pv).rev() {
                if dp[s] {
                    dp[s + pv] = true;
                }
            }
        }
        for (s, &v) in dp.iter().enumerate() {
            if v {
                seen[s] = true;
            }
        }
    }
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(s, _)| rat(s as i64))
        .collect())
}

/// One active band of the witness LP: weight difference tw_ℓ − tw_{next(ℓ)}
/// and threshold t_ℓ.
#[derive(Clone, Debug)]
struct Band {
    dw: R,
    t: R,
}

/// Band-separable witness LP: minimize Σ_ℓ dw_ℓ Σᵢ s_iℓ over fractional
/// assignments x with s_iℓ ≥ Σⱼ p_ij x_ij − t_ℓ and
/// s_iℓ ≥ Σⱼ (p_ij − t_ℓ)⁺ x_ij. For each machine and band this is the exact
/// minimum of Σⱼ p_ij y_ij over witnesses (y, z) of conditions
/// y + z = x, Σ p z ≤ t, p y ≥ (p − t) x, so the value never exceeds
/// Σᵢ h_t(tw; load_σ(i)) for any integral σ.
fn band_witness_lp(
    inst: &LoadBalInstance,
    bands: &[Band],
    mode: Mode,
) -> Result<(R, Vec<Vec<R>>), ArgError> {
    let nb = bands.len();
    let vx = |i: usize, j: usize| i * inst.n + j;
    let vs = |i: usize, b: usize| inst.m * inst.n + i * nb + b;
    let mut lp = LinearProgram::new(inst.m * inst.n + inst.m * nb);
    for i in 0..inst.m {
        for (b, band) in bands.iter().enumerate() {
            lp.objective[vs(i, b)] = band.dw.clone();
        }
    }
    for j in 0..inst.n {
        lp.add_row(
            (0..inst.m).map(|i| (vx(i, j), R::one())).collect(),
            Cmp::Eq,
            R::one(),
        );
    }
    for i in 0..inst.m {
        for (b, band) in bands.iter().enumerate() {
            let mut c1: Vec<(usize, R)> = (0..inst.n)
                .filter(|&j| inst.p[i][j].is_positive())
                .map(|j| (vx(i, j), inst.p[i][j].clone()))
                .collect();
            c1.push((vs(i, b), -R::one()));
            lp.add_row(c1, Cmp::Le, band.t.clone());
            let mut c2: Vec<(usize, R)> = (0..inst.n)
                .filter(|&j| inst.p[i][j] > band.t)
                .map(|j| (vx(i, j), &inst.p[i][j] - &band.t))
                .collect();
            if !c2.is_empty() {
                c2.push((vs(i, b), -R::one()));
                lp.add_row(c2, Cmp::Le, R::zero());
            }
        }
    }
    let sol =
        solve_lp(&lp, mode).map_err(|e| ArgError(format!("witness LP failed: {e}")))?;
    let mut x = vec![vec![R::zero(); inst.n]; inst.m];
    for i in 0..inst.m {
        for j in 0..inst.n {
            x[i][j] = sol.values[vx(i, j)].clone();
        }
    }
    Ok((sol.objective, x))
}

/// Scans candidate threshold tuples over the active bands, minimizing
/// g(t) = Σ dw_ℓ·ℓ·t_ℓ + witness-LP(t) with lower-bound pruning, then rounds
/// the argmin's x with band-weighted first-copy costs.
fn scan_and_round(
    inst: &LoadBalInstance,
    actives: &[(usize, R)], // (position ℓ, dw_ℓ > 0), ascending ℓ
    mode: Mode,
) -> Result<Assignment, ArgError> {
    let hs = greedy_total(inst);
    if hs.is_zero() {
        return Ok(greedy_assignment(inst));
    }
    let grid = achievable_loads(inst, &hs)?;
    // Candidate values at the first active position: o₁ ≥ max load lower
    // bounds apply only when that position is 1.
    let lo1 = if actives[0].0 == 1 {
        let avg = &hs / rat(inst.m as i64);
        let pj = (0..inst.n)
            .map(|j| (0..inst.m).map(|i| inst.p[i][j].clone()).min().unwrap())
            .max()
            .unwrap();
        if avg > pj {
            avg
        } else {
            pj
        }
    } else {
        R::zero()
    };
    // Enumerate non-increasing tuples over the active positions.
    let mut tuples: Vec<Vec<R>> = Vec::new();
    let mut cur: Vec<R> = Vec::new();
    fn rec(
        grid: &[R],
        actives_len: usize,
        lo1: &R,
        hi: &R,
        cur: &mut Vec<R>,
        out: &mut Vec<Vec<R>>,
    ) {
        if cur.len() == actives_len {
            out.push(cur.clone());
            return;
        }
        let ub = if cur.is_empty() {
            hi.clone()
        } else {
            cur.last().unwrap().clone()
        };
        let lb = if cur.is_empty() { lo1.clone() } else { R::zero() };
        for v in grid.iter().rev() {
            if *v > ub {
                continue;
            }
            if *v < lb {
                break;
            }
            cur.push(v.clone());
            rec(grid, actives_len, lo1, hi, cur, out);
            cur.pop();
        }
    }
    rec(&grid, actives.len(), &lo1, &hs, &mut cur, &mut tuples);
    // Lower bound per tuple: the linear part plus Σ dw·(hs − m·t)⁺, since
    // Σᵢ (load_i − t)⁺ ≥ (total − m·t)⁺ and total ≥ hs.
    let m_rat = rat(inst.m as i64);
    let mut scored: Vec<(R, Vec<R>)> = tuples
        .into_iter()
        .map(|tp| {
            let mut lb = R::zero();
            for ((l, dw), v) in actives.iter().zip(&tp) {
                lb += dw * rat(*l as i64) * v;
                let spread = &hs - &m_rat * v;
                if spread.is_positive() {
                    lb += dw * spread;
                }
            }
            (lb, tp)
        })
        .collect();
    scored.sort();
    let mut best: Option<(R, Vec<R>, Vec<Vec<R>>)> = None;
    for (lb, tp) in &scored {
        if let Some((bg, _, _)) = &best {
            if lb >= bg {
                break;
            }
        }
        let bands: Vec<Band> = actives
            .iter()
            .zip(tp)
            .map(|((_, dw), v)| Band {
                dw: dw.clone(),
                t: v.clone(),
            })
            .collect();
        let (wval, x) = band_witness_lp(inst, &bands, mode)?;
        let mut g = wval;
        for ((l, dw), v) in actives.iter().zip(tp) {
            g += dw * rat(*l as i64) * v;
        }
        if best.as_ref().map_or(true, |(bg, _, _)| &g < bg) {
            best = Some((g, tp.clone(), x));
        }
    }
    let (_, tp, x) = best.ok_or_else(|| ArgError("empty threshold grid".into()))?;
    let bands: Vec<(usize, R, R)> = actives
        .iter()
        .zip(&tp)
        .map(|((l, dw), v)| (*l, dw.clone(), v.clone()))
        .collect();
    gap_round_with_costs(inst, &x, &|i, j| {
        let mut c = R::zero();
        for (_, dw, t) in &bands {
            if &inst.p[i][j] > t {
                c += dw * (&inst.p[i][j] - t);
            }
        }
        c
    })
}

/// 2-approximation for Top-ℓ load balancing: minimizes ℓ·t + LP_t over the
/// exact grid of achievable load values and rounds the minimizer's fractional
/// assignment with (p_ij − t)⁺ first-copy costs.
pub fn solve_topl_lb(
    inst: &LoadBalInstance,
    l: usize,
    mode: Mode,
) -> Result<Assignment, ArgError> {
    if l == 0 || l > inst.m {
        return Err(ArgError(format!(
            "top-l index {l} out of range 1..={}",
            inst.m
        )));
    }
    scan_and_round(inst, &[(l, R::one())], mode)
}

/// (2+ε)-approximation for ordered load balancing: sparsifies w with
/// δ = ε/2, scans exact threshold tuples on the positions carrying weight,
/// and rounds with h-weighted first-copy costs.
pub fn solve_ordered_lb(
    inst: &LoadBalInstance,
    w: &WeightVector,
    eps: &R,
    mode: Mode,
) -> Result<Assignment, ArgError> {
    if w.len() != inst.m {
        return Err(ArgError("weight length must equal machine count".into()));
    }
    if !eps.is_positive() {
        return Err(ArgError("eps must be positive".into()));
    }
    if w.get1(1).is_zero() {
        return Ok(greedy_assignment(inst));
    }
    if let Some(a) = detect_zero_loadbal(inst) {
        return Ok(a);
    }
    let delta = eps / rat(2);
    let pos = position_set(inst.m, &delta)?;
    let tw = sparsify_weights(w, &pos);
    let mut actives: Vec<(usize, R)> = Vec::new();
    for (idx, &l) in pos.positions.iter().enumerate() {
        let nx = if idx + 1 < pos.positions.len() {
            pos.positions[idx + 1]
        } else {
            inst.m + 1
        };
        let dw = tw.get1(l) - tw.get1(nx);
        if dw.is_positive() {
            actives.push((l, dw));
        }
    }
    scan_and_round(inst, &actives, mode)
}

/// 38(1+δ)-approximation for min-max ordered load balancing: sparsifies all
/// weights, enumerates power-of-2 threshold vectors (the ε = 1 grid), solves
/// the min-max LP per guess, rounds each with the weight-oblivious rounding,
/// and returns the assignment with the smallest exact max_r obj(w_r; ·)
/// (lexicographic tie-break).
pub fn solve_minmax_ordered_lb(
    inst: &LoadBalInstance,
    ws: &[WeightVector],
    delta: &R,
    mode: Mode,
) -> Result<Assignment, ArgError> {
    if ws.is_empty() {
        return Err(ArgError("min-max needs at least one weight vector".into()));
    }
    if ws.iter().any(|w| w.len() != inst.m) {
        return Err(ArgError("weight length must equal machine count".into()));
    }
    if !delta.is_positive() {
        return Err(ArgError("delta must be positive".into()));
    }
    if ws.iter().all(|w| w.get1(1).is_zero()) {
        return Ok(greedy_assignment(inst));
    }
    if let Some(a) = detect_zero_loadbal(inst) {
        return Ok(a);
    }
    let pos = position_set(inst.m, delta)?;
    let tws: Vec<WeightVector> = ws.iter().map(|w| sparsify_weights(w, &pos)).collect();
    let hs = greedy_total(inst);
    let two = rat(2);
    let mut s = Vec::new();
    let mut p = R::one();
    let hi = &two * &hs;
    while p <= hi {
        s.push(p.clone());
        p *= &two;
    }
    let mut guesses = enumerate_thresholds(&pos, &s, &R::one(), &two);
    if guesses.is_empty() {
        guesses.push(ThresholdVector {
            t: vec![R::zero(); pos.positions.len()],
            positions: pos.positions.clone(),
            n: inst.m,
        });
    }
    let mut best: Option<(R, Assignment)> = None;
    for t in &guesses {
        // Infeasible guesses and float-mode simplex stalls are bad-guess
        // signals, not errors; some other guess covers the optimum.
        let lp = build_minmax_lb_lp(inst, &tws, t)?;
        let sol = match solve_lp(&lp, mode) {
            Ok(bs) => unpack_olb(inst, t, &bs.values),
            Err(LpError::Infeasible) => continue,
            Err(LpError::Numerical(_)) if mode == Mode::Float => continue,
            Err(e) => return Err(ArgError(format!("min-max LP failed: {e}"))),
        };
        let sigma = match oblivious_round_lb(&sol, inst, mode) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let loads = load_vector(inst, &sigma);
        let val = ws
            .iter()
            .map(|w| ordered_cost(w, &loads).expect("matching dimensions"))
            .max()
            .unwrap();
        let better = match &best {
            None => true,
            Some((bv, ba)) => val < *bv || (val == *bv && sigma < *ba),
        };
        if better {
            best = Some((val, sigma));
        }
    }
    best.map(|(_, a)| a)
        .ok_or_else(|| ArgError("every threshold guess failed to round".into()))
}

/// 38κ(1+5ε)-approximation for min-norm load balancing: detects zero
/// instances, computes the instance bounds, and delegates through the
/// min-norm → min-max reduction to the min-max solver (with δ = ε).
pub fn solve_minnorm_lb(
    inst: &LoadBalInstance,
    f: &NormSpec,
    eps: &R,
    mode: Mode,
) -> Result<Assignment, ArgError> {
    if let Some(a) = detect_zero_loadbal(inst) {
        return Ok(a);
    }
    let bounds = loadbal_bounds(inst, f)?;
    minnorm_reduce_and_solve(f, eps, &bounds, inst.m, |wc| {
        solve_minmax_ordered_lb(inst, &wc.weights, eps, mode)
    })
}
