//! Multi-budgeted and simultaneous optimization on top of the load-balancing
//! and clustering solvers.
//!
//! The multi-budget solver answers "is there a schedule/clustering whose
//! ordered cost stays within B_r for every weight w_r, up to the solver's
//! approximation factor ρ?"; the simultaneous solver searches for the
//! smallest fairness factor A such that some single solution is
//! A-competitive against every Top-ℓ optimum at once.

use num::{One, Signed, Zero};

use crate::cluster::{
    linear_term, minmax_threshold_guesses, oblivious_round_cluster, solve_budget_cl_lp,
};
use crate::loadbal::{
    achievable_loads, band_weight_diffs, build_olb_lp, greedy_total, oblivious_round_lb,
    topl_indicator, unpack_olb, OlbLayout,
};
use crate::lpround::{solve_lp, Cmp, LpError, Mode};
use crate::model::{
    assign_cost_vector, load_vector, ordered_cost, rat, ArgError, Assignment, ClusterInstance,
    CostVector, LoadBalInstance, WeightVector, R,
};
use crate::proxy::{enumerate_thresholds, ThresholdVector};
use crate::sparsify::{position_set, sparsify_weights};

/// A problem instance of either supported kind.
#[derive(Clone, Copy, Debug)]
pub enum Problem<'a> {
    /// Unrelated-machine load balancing; cost vectors are machine loads.
    LoadBal(&'a LoadBalInstance),
    /// k-clustering; cost vectors are client connection distances.
    Cluster(&'a ClusterInstance),
}

impl Problem<'_> {
    /// Dimension of the cost vectors (machine count or client count).
    pub fn dim(&self) -> usize {
        match self {
            Problem::LoadBal(inst) => inst.m,
            Problem::Cluster(inst) => inst.n,
        }
    }
}

/// A solution of either supported kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// A job-to-machine assignment.
    Assignment(Assignment),
    /// An open facility set.
    Facilities(Vec<usize>),
}

impl Solution {
    /// The cost vector of this solution on the given problem.
    pub fn cost_vector(&self, problem: &Problem) -> Result<CostVector, ArgError> {
        match (self, problem) {
            (Solution::Assignment(sigma), Problem::LoadBal(inst)) => {
                Ok(load_vector(inst, sigma))
            }
            (Solution::Facilities(f), Problem::Cluster(inst)) => assign_cost_vector(inst, f),
            _ => Err(ArgError("solution kind does not match problem kind".into())),
        }
    }
}

/// A multi-budget specification: one budget per weight vector.
#[derive(Clone, Debug)]
pub struct BudgetSpec {
    /// The weight vectors w_1, …, w_d.
    pub weights: Vec<WeightVector>,
    /// The budgets B_1, …, B_d (non-negative).
    pub budgets: Vec<R>,
}

impl BudgetSpec {
    /// Validates and builds a budget specification.
    pub fn new(weights: Vec<WeightVector>, budgets: Vec<R>) -> Result<Self, ArgError> {
        if weights.is_empty() {
            return Err(ArgError("budget spec needs at least one weight".into()));
        }
        if weights.len() != budgets.len() {
            return Err(ArgError("budget spec needs one budget per weight".into()));
        }
        if budgets.iter().any(|b| b.is_negative()) {
            return Err(ArgError("budgets must be non-negative".into()));
        }
        Ok(BudgetSpec { weights, budgets })
    }
}

/// The approximation factor ρ of [`solve_multibudget`]: when a solution with
/// ordered cost at most B_r for every r exists, the solver returns one with
/// cost at most ρ·B_r for every r.
pub fn multibudget_rho(problem: &Problem, delta: &R) -> R {
    match problem {
        Problem::LoadBal(_) => rat(38) * (R::one() + delta),
        Problem::Cluster(_) => rat(1224),
    }
}

fn check_spec(problem: &Problem, spec: &BudgetSpec) -> Result<(), ArgError> {
    let d = problem.dim();
    if spec.weights.iter().any(|w| w.len() != d) {
        return Err(ArgError(
            "weight length must equal the problem dimension".into(),
        ));
    }
    if spec.weights.len() != spec.budgets.len() {
        return Err(ArgError("budget spec needs one budget per weight".into()));
    }
    Ok(())
}

/// Checks the ρ-relaxed budgets against the exact ordered costs of a
/// candidate on the original weights; returns the worst cost-to-budget
/// ratio when every budget is met (zero-budget weights must have zero cost
/// and contribute ratio 0).
fn rho_check(spec: &BudgetSpec, costs: &CostVector, rho: &R) -> Result<Option<R>, ArgError> {
    let mut score = R::zero();
    for (w, b) in spec.weights.iter().zip(&spec.budgets) {
        let obj = ordered_cost(w, costs)?;
        if obj > rho * b {
            return Ok(None);
        }
        if b.is_positive() {
            let ratio = obj / b;
            if ratio > score {
                score = ratio;
            }
        }
    }
    Ok(Some(score))
}

fn multibudget_lb(
    inst: &LoadBalInstance,
    spec: &BudgetSpec,
    delta: &R,
    mode: Mode,
) -> Result<Option<Solution>, ArgError> {
    let rho = rat(38) * (R::one() + delta);
    let pos = position_set(inst.m, delta)?;
    let tws: Vec<WeightVector> =
        spec.weights.iter().map(|w| sparsify_weights(w, &pos)).collect();
    let two = rat(2);
    let hi = &two * greedy_total(inst);
    let mut s = Vec::new();
    let mut p = R::one();
    while p <= hi {
        s.push(p.clone());
        p *= &two;
    }
    let mut guesses = enumerate_thresholds(&pos, &s, &R::one(), &two);
    guesses.push(ThresholdVector {
        t: vec![R::zero(); pos.positions.len()],
        positions: pos.positions.clone(),
        n: inst.m,
    });
    let three = rat(3);
    let mut best: Option<(R, Assignment)> = None;
    for t in &guesses {
        // Feasibility LP: (OLB1)–(OLB5) plus one proxy row per weight,
        // lin_r + Σ dw·p·y ≤ 3·B_r, with a zero objective.
        let mut lp = build_olb_lp(inst, &tws[0], t)?;
        lp.objective = vec![R::zero(); lp.num_vars];
        let lay = OlbLayout::new(inst, t);
        for (tw, b) in tws.iter().zip(&spec.budgets) {
            let dws = band_weight_diffs(tw, t);
            let mut lin = R::zero();
            for (bi, dw) in dws.iter().enumerate() {
                lin += dw * rat(t.positions[bi] as i64) * &t.t[bi];
            }
            let mut coeffs = Vec::new();
            for i in 0..inst.m {
                for j in 0..inst.n {
                    for (bi, dw) in dws.iter().enumerate() {
                        let c = dw * &inst.p[i][j];
                        if !c.is_zero() {
                            coeffs.push((lay.y(i, j, bi), c));
                        }
                    }
                }
            }
            lp.add_row(coeffs, Cmp::Le, &three * b - lin);
        }
        let sol = match solve_lp(&lp, mode) {
            Ok(bs) => unpack_olb(inst, t, &bs.values),
            Err(LpError::Infeasible) => continue,
            Err(LpError::Numerical(_)) if mode == Mode::Float => continue,
            Err(e) => return Err(ArgError(format!("budget LP failed: {e}"))),
        };
        let sigma = match oblivious_round_lb(&sol, inst, mode) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let loads = load_vector(inst, &sigma);
        if let Some(score) = rho_check(spec, &loads, &rho)? {
            let better = best.as_ref().map_or(true, |(bs, _)| score < *bs);
            if better {
                best = Some((score, sigma));
            }
        }
    }
    Ok(best.map(|(_, sigma)| Solution::Assignment(sigma)))
}

fn multibudget_cluster(
    inst: &ClusterInstance,
    spec: &BudgetSpec,
    mode: Mode,
) -> Result<Option<Solution>, ArgError> {
    let rho = rat(1224);
    let n = inst.n;
    let one = R::one();
    let pos = position_set(n, &one)?;
    let tws: Vec<WeightVector> =
        spec.weights.iter().map(|w| sparsify_weights(w, &pos)).collect();
    let three = rat(3);
    let mut guesses = match minmax_threshold_guesses(inst, &pos, &one) {
        Ok(g) => g,
        // All distances zero: the all-zero guess below suffices.
        Err(_) => Vec::new(),
    };
    guesses.push(ThresholdVector {
        t: vec![R::zero(); pos.positions.len()],
        positions: pos.positions.clone(),
        n,
    });
    let mut best: Option<(R, Vec<usize>)> = None;
    for t in &guesses {
        let rhs: Vec<R> = tws
            .iter()
            .zip(&spec.budgets)
            .map(|(tw, b)| &three * b - linear_term(tw, t))
            .collect();
        if rhs.iter().any(|r| r.is_negative()) {
            continue;
        }
        let Some(sol) = solve_budget_cl_lp(inst, &tws, t, &rhs, mode)? else {
            continue;
        };
        let Some(fset) = oblivious_round_cluster(&sol, inst, mode)? else {
            continue;
        };
        if fset.is_empty() {
            continue;
        }
        let costs = assign_cost_vector(inst, &fset)?;
        if let Some(score) = rho_check(spec, &costs, &rho)? {
            let better = best.as_ref().map_or(true, |(bs, _)| score < *bs);
            if better {
                best = Some((score, fset));
            }
        }
    }
    Ok(best.map(|(_, fset)| Solution::Facilities(fset)))
}

/// Multi-budgeted optimization: returns a solution whose ordered cost under
/// every weight w_r is at most ρ·B_r (ρ = [`multibudget_rho`]) whenever a
/// solution meeting every budget exactly exists; returns `None` when no
/// guess yields such a solution (in particular whenever no exactly-feasible
/// solution exists). `delta` controls the load-balancing sparsification;
/// clustering always sparsifies at δ = 1.
pub fn solve_multibudget(
    problem: &Problem,
    spec: &BudgetSpec,
    delta: &R,
    mode: Mode,
) -> Result<Option<Solution>, ArgError> {
    check_spec(problem, spec)?;
    if !delta.is_positive() {
        return Err(ArgError("delta must be positive".into()));
    }
    match problem {
        Problem::LoadBal(inst) => multibudget_lb(inst, spec, delta, mode),
        Problem::Cluster(inst) => multibudget_cluster(inst, spec, mode),
    }
}

/// Geometric scale 1, 1+ε, (1+ε)², … up to the first value ≥ `hi`.
fn geometric_scale(eps: &R, hi: &R) -> Vec<R> {
    let base = R::one() + eps;
    let mut scale = vec![R::one()];
    while scale.last().unwrap() < hi {
        let next = scale.last().unwrap() * &base;
        scale.push(next);
    }
    scale
}

/// Non-decreasing index vectors (j_1, …, j_len) with j_1 = 0 and entries in
/// 0..=jmax.
fn nondecreasing_indices(len: usize, jmax: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize];
    fn rec(len: usize, jmax: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let lo = *cur.last().unwrap();
        for j in lo..=jmax {
            cur.push(j);
            rec(len, jmax, cur, out);
            cur.pop();
        }
    }
    if len == 0 {
        return out;
    }
    rec(len, jmax, &mut cur, &mut out);
    out
}

/// Simultaneous optimization: finds a single solution that is
/// A-competitive against the Top-ℓ optimum for every ℓ simultaneously,
/// for the smallest fairness factor A on a (1+ε)-geometric scale, up to the
/// multi-budget factor ρ. Returns the solution and the factor A; the
/// solution's Top-ℓ cost is at most ρ·(1+ε)²·A·min_u Top-ℓ(u) for every
/// ℓ in the sparse position set.
pub fn solve_simultaneous(
    problem: &Problem,
    eps: &R,
    mode: Mode,
) -> Result<(Solution, R), ArgError> {
    if !eps.is_positive() {
        return Err(ArgError("eps must be positive".into()));
    }
    let d = problem.dim();
    let pos = position_set(d, eps)?;
    let weights: Vec<WeightVector> = pos
        .positions
        .iter()
        .map(|&l| topl_indicator(l, d))
        .collect::<Result<_, _>>()?;
    // Anchor grid: contains the exact Top-1 optimum (a realizable load /
    // distance), so some anchor·(1+ε)-power vector over-estimates every
    // Top-ℓ optimum within (1+ε).
    let anchors: Vec<R> = match problem {
        Problem::LoadBal(inst) => {
            let hs = greedy_total(inst);
            let mut a = achievable_loads(inst, &hs)?;
            if a.first().map_or(true, |v| !v.is_zero()) {
                a.insert(0, R::zero());
            }
            a
        }
        Problem::Cluster(inst) => crate::cluster::distance_grid(inst),
    };
    // Top-ℓ optima are non-decreasing in ℓ and within a factor d of Top-1,
    // so estimates are anchor·(1+ε)^{j_ℓ} with non-decreasing exponents and
    // the fairness factor A lies in [1, d] up to (1+ε).
    let hi = rat(d as i64) * (R::one() + eps);
    let scale = geometric_scale(eps, &hi);
    let jvecs = nondecreasing_indices(pos.positions.len(), scale.len() - 1);
    let mut best: Option<(R, Solution)> = None;
    for anchor in &anchors {
        let ests: Vec<Vec<R>> = if anchor.is_zero() {
            vec![vec![R::zero(); pos.positions.len()]]
        } else {
            jvecs
                .iter()
                .map(|jv| jv.iter().map(|&j| anchor * &scale[j]).collect())
                .collect()
        };
        for est in &ests {
            for a_fac in &scale {
                if let Some((ba, _)) = &best {
                    if a_fac >= ba {
                        break;
                    }
                }
                let budgets: Vec<R> = est.iter().map(|e| a_fac * e).collect();
                let spec = BudgetSpec::new(weights.clone(), budgets)?;
                if let Some(sol) = solve_multibudget(problem, &spec, &R::one(), mode)? {
                    best = Some((a_fac.clone(), sol));
                    break;
                }
            }
        }
    }
    best.map(|(a, s)| (s, a))
        .ok_or_else(|| ArgError("simultaneous optimization found no feasible guess".into()))
}
