//! k-Clustering solvers: the strengthened ordered LP, deterministic
//! weight-oblivious rounding, the primal-dual ordered k-median with bi-point
//! rounding, and the top-level ordered / min-max / min-norm algorithms.
//!
//! The facility set coincides with the client set (every point may be
//! opened). All fractional solutions carry the threshold vector they were
//! solved against; proxy costs are always evaluated through
//! [`crate::proxy::h_multi`].

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::lpround::{
    iterative_round, solve_lp, Cmp, IterRoundSystem, LinearProgram, LpError, Mode,
};
use crate::model::{
    assign_cost_vector, ordered_cost, rat, ArgError, ClusterInstance, NormSpec, WeightVector, R,
};
use crate::normreduce::{cluster_bounds, detect_zero_cluster, minnorm_reduce_and_solve};
use crate::proxy::{h_multi, is_valid, ThresholdVector};
use crate::sparsify::{position_set, sparsify_weights, PositionSet};

fn check_cl_args(
    inst: &ClusterInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
) -> Result<(), ArgError> {
    if tw.len() != inst.n {
        return Err(ArgError("weight length must equal point count".into()));
    }
    if t.n != inst.n {
        return Err(ArgError("threshold dimension must equal point count".into()));
    }
    if !is_valid(t) {
        return Err(ArgError("threshold vector is not valid".into()));
    }
    Ok(())
}

/// All distinct distance values of the instance, ascending, including 0.
pub fn distance_grid(inst: &ClusterInstance) -> Vec<R> {
    let mut g = vec![R::zero()];
    for i in 0..inst.n {
        for j in (i + 1)..inst.n {
            g.push(inst.c[i][j].clone());
        }
    }
    g.sort();
    g.dedup();
    g
}

/// Matrix of proxy costs h_t(tw; c_ij), indexed `[i][j]`.
pub fn h_cost_matrix(
    inst: &ClusterInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
) -> Result<Vec<Vec<R>>, ArgError> {
    check_cl_args(inst, tw, t)?;
    (0..inst.n)
        .map(|i| {
            (0..inst.n)
                .map(|j| h_multi(tw, t, &inst.c[i][j]))
                .collect()
        })
        .collect()
}

/// Lowest-index nearest member of `set` to point `j`.
pub fn nearest_in(inst: &ClusterInstance, set: &[usize], j: usize) -> usize {
    let mut best = set[0];
    for &i in &set[1..] {
        if inst.c[i][j] < inst.c[best][j] || (inst.c[i][j] == inst.c[best][j] && i < best) {
            best = i;
        }
    }
    best
}

/// Linear part of Prox: Σ_{ℓ∈POS} (tw_ℓ − tw_{next(ℓ)})·ℓ·t_ℓ.
pub fn linear_term(tw: &WeightVector, t: &ThresholdVector) -> R {
    let mut acc = R::zero();
    for (idx, &l) in t.positions.iter().enumerate() {
        let nx = if idx + 1 < t.positions.len() {
            t.positions[idx + 1]
        } else {
            t.n + 1
        };
        let dw = tw.get1(l) - tw.get1(nx);
        acc += dw * rat(l as i64) * &t.t[idx];
    }
    acc
}

// ---------------------------------------------------------------------------
// Strengthened ordered clustering LP (OCl-P_t)
// ---------------------------------------------------------------------------

/// A fractional solution of the strengthened clustering LP, with the
/// threshold vector attached. `x` always satisfies the greedy x-from-y
/// property: each client fills its nearest facilities (lowest index first)
/// up to total mass 1.
#[derive(Clone, Debug)]
pub struct OclSolution {
    /// x[i][j]: fraction of client j served by facility i.
    pub x: Vec<Vec<R>>,
    /// y[i]: fractional open of facility i.
    pub y: Vec<R>,
    /// The threshold vector the solution was solved against.
    pub t: ThresholdVector,
}

impl OclSolution {
    /// Builds the greedy x from fractional opens and wraps them up.
    pub fn from_y(
        inst: &ClusterInstance,
        y: Vec<R>,
        t: ThresholdVector,
    ) -> Result<OclSolution, ArgError> {
        let x = greedy_x_from_y(inst, &y)?;
        Ok(OclSolution { x, y, t })
    }

    /// Per-client fractional connection cost C̄_j = Σᵢ c_ij·x_ij.
    pub fn cbar(&self, inst: &ClusterInstance) -> Vec<R> {
        (0..inst.n)
            .map(|j| {
                (0..inst.n).fold(R::zero(), |acc, i| acc + &inst.c[i][j] * &self.x[i][j])
            })
            .collect()
    }

    /// Per-client LP share LP_j(nw) = Σᵢ h_t(nw; c_ij)·x_ij.
    pub fn lp_client(
        &self,
        inst: &ClusterInstance,
        nw: &WeightVector,
        j: usize,
    ) -> Result<R, ArgError> {
        let mut acc = R::zero();
        for i in 0..inst.n {
            if self.x[i][j].is_positive() {
                acc += h_multi(nw, &self.t, &inst.c[i][j])? * &self.x[i][j];
            }
        }
        Ok(acc)
    }

    /// LP objective value OclLP(nw) = Σⱼ LP_j(nw).
    pub fn lp_value(&self, inst: &ClusterInstance, nw: &WeightVector) -> Result<R, ArgError> {
        let mut acc = R::zero();
        for j in 0..inst.n {
            acc += self.lp_client(inst, nw, j)?;
        }
        Ok(acc)
    }
}

/// Greedy serving: each client fills its nearest facilities first (ties by
/// lowest index), taking min(y_i, remaining) until total mass 1. This is the
/// optimal x for the given y under any h-cost and establishes the greedy
/// x-from-y property. Tiny float shortfalls are parked on the nearest
/// facility.
pub fn greedy_x_from_y(inst: &ClusterInstance, y: &[R]) -> Result<Vec<Vec<R>>, ArgError> {
    if y.len() != inst.n {
        return Err(ArgError("open vector length must equal point count".into()));
    }
    let n = inst.n;
    let mut x = vec![vec![R::zero(); n]; n];
    for j in 0..n {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| inst.c[p][j].cmp(&inst.c[q][j]).then(p.cmp(&q)));
        let mut rem = R::one();
        for &i in &order {
            if !rem.is_positive() {
                break;
            }
            let yi = if y[i].is_negative() {
                R::zero()
            } else if y[i] > R::one() {
                R::one()
            } else {
                y[i].clone()
            };
            let take = if yi < rem { yi } else { rem.clone() };
            if take.is_positive() {
                rem -= &take;
                x[i][j] = take;
            }
        }
        if rem.is_positive() {
            x[order[0]][j] += rem;
        }
    }
    Ok(x)
}

/// Supports of the (OCl-4) coverage rows: for each client j and each
/// breakpoint ℓ < n, the minimal triggering radius is r = s_j[ℓ] + t_ℓ (s_j
/// the ascending distances from j), and the row covers the ball of radius r
/// around j. Rows at larger triggering radii are implied (superset balls);
/// full-support rows are implied by (OCl-1)/(OCl-2) and dropped.
pub fn ocl4_rows(inst: &ClusterInstance, t: &ThresholdVector) -> Vec<Vec<usize>> {
    let n = inst.n;
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
    for j in 0..n {
        let mut s: Vec<R> = (0..n).map(|kk| inst.c[kk][j].clone()).collect();
        s.sort();
        for (bi, &l) in t.positions.iter().enumerate() {
            if l >= n {
                continue;
            }
            let r = &s[l] + &t.t[bi];
            let supp: Vec<usize> = (0..n).filter(|&i| inst.c[i][j] <= r).collect();
            if supp.len() < n {
                set.insert(supp);
            }
        }
    }
    set.into_iter().collect()
}

fn x_idx(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

fn y_idx(n: usize, i: usize) -> usize {
    n * n + i
}

fn base_cl_lp(inst: &ClusterInstance, t: &ThresholdVector, extra: usize) -> LinearProgram {
    let n = inst.n;
    let nv = n * n + n + extra;
    let mut lp = LinearProgram::new(nv);
    for v in 0..n * n + n {
        lp.unit_upper[v] = true;
    }
    for j in 0..n {
        lp.add_row(
            (0..n).map(|i| (x_idx(n, i, j), R::one())).collect(),
            Cmp::Ge,
            R::one(),
        );
    }
    for i in 0..n {
        for j in 0..n {
            lp.add_row(
                vec![(x_idx(n, i, j), R::one()), (y_idx(n, i), -R::one())],
                Cmp::Le,
                R::zero(),
            );
        }
    }
    lp.add_row(
        (0..n).map(|i| (y_idx(n, i), R::one())).collect(),
        Cmp::Le,
        rat(inst.k as i64),
    );
    for supp in ocl4_rows(inst, t) {
        lp.add_row(
            supp.iter().map(|&i| (y_idx(n, i), R::one())).collect(),
            Cmp::Ge,
            R::one(),
        );
    }
    lp
}

/// The strengthened LP (OCl-P_t): minimize Σ h_t(tw; c_ij)·x_ij subject to
/// coverage (OCl-1), x ≤ y (OCl-2), Σy ≤ k (OCl-3), and the ball-coverage
/// rows (OCl-4).
pub fn build_ocl_lp(
    inst: &ClusterInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
) -> Result<LinearProgram, ArgError> {
    check_cl_args(inst, tw, t)?;
    let n = inst.n;
    let mut lp = base_cl_lp(inst, t, 0);
    for i in 0..n {
        for j in 0..n {
            lp.objective[x_idx(n, i, j)] = h_multi(tw, t, &inst.c[i][j])?;
        }
    }
    Ok(lp)
}

/// Min-max variant: minimize λ with one proxy row per weight,
/// Σ dw_r·ℓ·t_ℓ + Σ h_t(tw_r; c_ij)·x_ij ≤ λ. Returns the LP and the λ
/// variable index.
pub fn build_minmax_cl_lp(
    inst: &ClusterInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
) -> Result<(LinearProgram, usize), ArgError> {
    if tws.is_empty() {
        return Err(ArgError("min-max needs at least one weight vector".into()));
    }
    let n = inst.n;
    let mut lp = base_cl_lp(inst, t, 1);
    let lam = n * n + n;
    lp.objective[lam] = R::one();
    for tw in tws {
        check_cl_args(inst, tw, t)?;
        let lin = linear_term(tw, t);
        let mut coeffs = vec![(lam, -R::one())];
        for i in 0..n {
            for j in 0..n {
                let h = h_multi(tw, t, &inst.c[i][j])?;
                if !h.is_zero() {
                    coeffs.push((x_idx(n, i, j), h));
                }
            }
        }
        lp.add_row(coeffs, Cmp::Le, -lin);
    }
    Ok((lp, lam))
}

fn lp_failure(e: LpError, mode: Mode) -> Result<Option<(R, OclSolution)>, ArgError> {
    match e {
        LpError::Infeasible => Ok(None),
        LpError::Numerical(_) if mode == Mode::Float => Ok(None),
        other => Err(ArgError(format!("clustering LP solve failed: {other:?}"))),
    }
}

/// Solves (OCl-P_t) and re-derives the greedy x from the optimal y. Returns
/// `None` when the LP is infeasible, signalling a bad threshold guess.
pub fn solve_ocl_lp(
    inst: &ClusterInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
    mode: Mode,
) -> Result<Option<(R, OclSolution)>, ArgError> {
    let lp = build_ocl_lp(inst, tw, t)?;
    match solve_lp(&lp, mode) {
        Ok(bs) => {
            let y: Vec<R> = (0..inst.n).map(|i| bs.values[y_idx(inst.n, i)].clone()).collect();
            let sol = OclSolution::from_y(inst, y, t.clone())?;
            let obj = sol.lp_value(inst, tw)?;
            Ok(Some((obj, sol)))
        }
        Err(e) => lp_failure(e, mode),
    }
}

/// Solves the min-max LP and re-derives the greedy x (optimal for every
/// weight simultaneously, so λ remains valid). Returns `None` on infeasible
/// guesses.
pub fn solve_minmax_cl_lp(
    inst: &ClusterInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
    mode: Mode,
) -> Result<Option<(R, OclSolution)>, ArgError> {
    let (lp, lam) = build_minmax_cl_lp(inst, tws, t)?;
    match solve_lp(&lp, mode) {
        Ok(bs) => {
            let y: Vec<R> = (0..inst.n).map(|i| bs.values[y_idx(inst.n, i)].clone()).collect();
            let sol = OclSolution::from_y(inst, y, t.clone())?;
            Ok(Some((bs.values[lam].clone(), sol)))
        }
        Err(e) => lp_failure(e, mode),
    }
}

// ---------------------------------------------------------------------------
// Consolidation (step C1) and cluster pairing (step C3)
// ---------------------------------------------------------------------------

/// The consolidated instance produced by the greedy center selection.
#[derive(Clone, Debug)]
pub struct ConsolidatedInstance {
    /// Centers D, in greedy selection order.
    pub centers: Vec<usize>,
    /// For every original point k, the index into `centers` of ctr(k).
    pub ctr: Vec<usize>,
    /// Per original point: fractional connection cost C̄_j.
    pub cbar: Vec<R>,
    /// Per center: the facilities whose nearest center it is (F_j).
    pub f_sets: Vec<Vec<usize>>,
    /// Per center: ȳ_j = min{1, ȳ(F_j)} ≥ 1/2.
    pub ybar: Vec<R>,
    /// Per center: nearest other center nbr(j) (itself when ȳ_j = 1).
    pub nbr: Vec<usize>,
    /// Per center: a_j = c_{j,nbr(j)} (0 when ȳ_j = 1).
    pub a: Vec<R>,
    /// Per center: the near set N_j = {k : ctr(k) = j, c_jk ≤ 3a_j/10}.
    pub near: Vec<Vec<usize>>,
    /// Per center: demand d_j = |N_j|.
    pub demand: Vec<usize>,
}

/// Step C1: greedy center consolidation. Repeatedly picks the surviving
/// client with smallest C̄_j (ties lowest index) and absorbs every k with
/// c_jk ≤ 4·max{C̄_j, C̄_k}; then aggregates opens over the nearest-center
/// partition {F_j} and records neighbor distances and near sets.
pub fn consolidate(sol: &OclSolution, inst: &ClusterInstance) -> ConsolidatedInstance {
    let n = inst.n;
    let cbar = sol.cbar(inst);
    let four = rat(4);
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut centers: Vec<usize> = Vec::new();
    let mut ctr = vec![0usize; n];
    while remaining > 0 {
        let j = (0..n)
            .filter(|&q| alive[q])
            .min_by(|&p, &q| cbar[p].cmp(&cbar[q]).then(p.cmp(&q)))
            .unwrap();
        let cidx = centers.len();
        centers.push(j);
        for k in 0..n {
            if alive[k] {
                let mx = if cbar[j] > cbar[k] { &cbar[j] } else { &cbar[k] };
                if inst.c[j][k] <= &four * mx {
                    alive[k] = false;
                    remaining -= 1;
                    ctr[k] = cidx;
                }
            }
        }
    }
    let m = centers.len();
    let mut f_sets = vec![Vec::new(); m];
    for i in 0..n {
        let mut best = 0usize;
        for ci in 1..m {
            let (cb, cc) = (centers[best], centers[ci]);
            if inst.c[i][cc] < inst.c[i][cb] || (inst.c[i][cc] == inst.c[i][cb] && cc < cb) {
                best = ci;
            }
        }
        f_sets[best].push(i);
    }
    let one = R::one();
    let ybar: Vec<R> = f_sets
        .iter()
        .map(|fs| {
            let s = fs.iter().fold(R::zero(), |acc, &i| {
                if sol.y[i].is_positive() {
                    acc + &sol.y[i]
                } else {
                    acc
                }
            });
            if s > one {
                one.clone()
            } else {
                s
            }
        })
        .collect();
    let mut nbr = vec![0usize; m];
    let mut a = vec![R::zero(); m];
    for ci in 0..m {
        if ybar[ci] == one || m == 1 {
            nbr[ci] = centers[ci];
        } else {
            let j = centers[ci];
            let mut best: Option<usize> = None;
            for ck in 0..m {
                if ck == ci {
                    continue;
                }
                let k = centers[ck];
                if best.map_or(true, |b| {
                    inst.c[j][k] < inst.c[j][b] || (inst.c[j][k] == inst.c[j][b] && k < b)
                }) {
                    best = Some(k);
                }
            }
            let k = best.unwrap();
            nbr[ci] = k;
            a[ci] = inst.c[j][k].clone();
        }
    }
    let mut near = vec![Vec::new(); m];
    let three_tenths = rat(3) / rat(10);
    for k in 0..n {
        let ci = ctr[k];
        if inst.c[centers[ci]][k] <= &three_tenths * &a[ci] {
            near[ci].push(k);
        }
    }
    let demand = near.iter().map(|nj| nj.len()).collect();
    ConsolidatedInstance {
        centers,
        ctr,
        cbar,
        f_sets,
        ybar,
        nbr,
        a,
        near,
        demand,
    }
}

/// Step C3: greedy pairing into disjoint 1- or 2-element clusters
/// {j, nbr(j)}. Picks the surviving center with smallest a_j (ties favor
/// ȳ_j = 1, then lowest index) and removes every center whose pair
/// intersects the chosen cluster.
pub fn pair_clusters(cons: &ConsolidatedInstance) -> Vec<Vec<usize>> {
    let m = cons.centers.len();
    let one = R::one();
    let mut in_s = vec![true; m];
    let mut left = m;
    let mut out = Vec::new();
    while left > 0 {
        let pick = (0..m)
            .filter(|&c| in_s[c])
            .min_by(|&p, &q| {
                let yp = u8::from(cons.ybar[p] != one);
                let yq = u8::from(cons.ybar[q] != one);
                cons.a[p]
                    .cmp(&cons.a[q])
                    .then(yp.cmp(&yq))
                    .then(cons.centers[p].cmp(&cons.centers[q]))
            })
            .unwrap();
        let mut cluster = vec![cons.centers[pick]];
        if cons.nbr[pick] != cons.centers[pick] {
            cluster.push(cons.nbr[pick]);
        }
        cluster.sort_unstable();
        for c in 0..m {
            if in_s[c]
                && (cluster.contains(&cons.centers[c]) || cluster.contains(&cons.nbr[c]))
            {
                in_s[c] = false;
                left -= 1;
            }
        }
        out.push(cluster);
    }
    out
}

// ---------------------------------------------------------------------------
// Weight-oblivious rounding (step C4)
// ---------------------------------------------------------------------------

/// The fractional band demands q̄_j^{(ℓ)} of step C4, indexed
/// `[center][band]` with band 0 = ℓ = 0 (t_0 = ∞) and band b ≥ 1 the b-th
/// breakpoint of t. Uses the 10t/20t rule: when a_j > 20t_ℓ̄ for the first
/// breakpoint ℓ̄, bands at or past ℓ̄ get 0 and the rest are normalized by
/// a_j − 10t_ℓ̄ instead of a_j.
pub fn qbar_bands(cons: &ConsolidatedInstance, t: &ThresholdVector) -> Vec<Vec<R>> {
    let nb = t.t.len();
    let ten = rat(10);
    let twenty = rat(20);
    let one = R::one();
    let mut out = Vec::with_capacity(cons.centers.len());
    for c in 0..cons.centers.len() {
        let a = &cons.a[c];
        let mut row = vec![R::zero(); nb + 1];
        if a.is_positive() {
            let gap = &one - &cons.ybar[c];
            let lbar = (0..nb).find(|&b| *a > &twenty * &t.t[b]);
            let denom = match lbar {
                Some(b) => a - &ten * &t.t[b],
                None => a.clone(),
            };
            for b in 0..=nb {
                if lbar.is_some() && b >= 1 && *a > &twenty * &t.t[b - 1] {
                    continue;
                }
                let cap = if b == 0 {
                    a.clone()
                } else {
                    let tb = &ten * &t.t[b - 1];
                    if *a < tb {
                        a.clone()
                    } else {
                        tb
                    }
                };
                let nxt = if b < nb {
                    &ten * &t.t[b]
                } else {
                    R::zero()
                };
                if cap > nxt {
                    row[b] = &gap * (cap - nxt) / &denom;
                }
            }
        }
        out.push(row);
    }
    out
}

/// Everything the oblivious rounding produced, for audits.
#[derive(Clone, Debug)]
pub struct ClusterRound {
    /// The opened facility set F = {j ∈ D : Σ_ℓ q̃_j^{(ℓ)} = 0}, ascending.
    pub facilities: Vec<usize>,
    /// The consolidated instance.
    pub cons: ConsolidatedInstance,
    /// The disjoint 1-/2-clusters.
    pub clusters: Vec<Vec<usize>>,
    /// Fractional band demands q̄, `[center][band]`.
    pub qbar: Vec<Vec<R>>,
    /// Rounded band demands q̃, `[center][band]`.
    pub qtilde: Vec<Vec<R>>,
}

/// Deterministic weight-oblivious rounding for k-clustering: consolidate,
/// pair, build the band demands q̄, and iteratively round the system (IR2)
/// with laminar rows (tasgn)/(bundle)/(kbnd) and one budget row (tbudget)
/// per breakpoint band. Returns `None` when rounding signals a bad
/// threshold guess.
pub fn oblivious_round_cluster_detailed(
    sol: &OclSolution,
    inst: &ClusterInstance,
    mode: Mode,
) -> Result<Option<ClusterRound>, ArgError> {
    let cons = consolidate(sol, inst);
    let clusters = pair_clusters(&cons);
    let qbar = qbar_bands(&cons, &sol.t);
    let m = cons.centers.len();
    let nb = sol.t.t.len();
    let var = |c: usize, b: usize| c * (nb + 1) + b;
    let nv = m * (nb + 1);
    let weight =
        |c: usize| rat(cons.demand[c] as i64) * &cons.a[c];
    let mut c_obj = vec![R::zero(); nv];
    for c in 0..m {
        c_obj[var(c, 0)] = weight(c);
    }
    let mut lam_le: Vec<(Vec<usize>, R)> = (0..m)
        .map(|c| ((0..=nb).map(|b| var(c, b)).collect(), R::one()))
        .collect();
    for cl in &clusters {
        if cl.len() > 1 {
            let mut supp = Vec::new();
            for p in cl {
                let ci = cons.centers.iter().position(|q| q == p).unwrap();
                supp.extend((0..=nb).map(|b| var(ci, b)));
            }
            lam_le.push((supp, R::one()));
        }
    }
    let kbnd = if m > inst.k { (m - inst.k) as i64 } else { 0 };
    let lam_ge = vec![((0..nv).collect::<Vec<usize>>(), rat(kbnd))];
    let mut budget = Vec::new();
    for b in 1..=nb {
        let mut coeffs = Vec::new();
        let mut rhs = R::zero();
        for c in 0..m {
            let w = weight(c);
            if w.is_positive() {
                rhs += &w * &qbar[c][b];
                coeffs.push((var(c, b), w));
            }
        }
        if !coeffs.is_empty() {
            budget.push((coeffs, rhs));
        }
    }
    let sys = IterRoundSystem::new(nv, c_obj, lam_le, lam_ge, budget, 1)
        .map_err(|e| ArgError(format!("bad (IR2) system: {e:?}")))?;
    let qhat: Vec<R> = qbar.iter().flatten().cloned().collect();
    let qt = match iterative_round(&sys, &qhat, mode) {
        Ok(v) => v,
        Err(LpError::Infeasible) => return Ok(None),
        Err(LpError::Numerical(_)) if mode == Mode::Float => return Ok(None),
        Err(e) => return Err(ArgError(format!("(IR2) rounding failed: {e:?}"))),
    };
    let qtilde: Vec<Vec<R>> = (0..m)
        .map(|c| (0..=nb).map(|b| qt[var(c, b)].clone()).collect())
        .collect();
    let mut facilities: Vec<usize> = (0..m)
        .filter(|&c| qtilde[c].iter().all(|v| v.is_zero()))
        .map(|c| cons.centers[c])
        .collect();
    facilities.sort_unstable();
    Ok(Some(ClusterRound {
        facilities,
        cons,
        clusters,
        qbar,
        qtilde,
    }))
}

/// The facility set of the oblivious rounding; `None` signals a bad guess.
pub fn oblivious_round_cluster(
    sol: &OclSolution,
    inst: &ClusterInstance,
    mode: Mode,
) -> Result<Option<Vec<usize>>, ArgError> {
    Ok(oblivious_round_cluster_detailed(sol, inst, mode)?.map(|r| r.facilities))
}

// ---------------------------------------------------------------------------
// Primal-dual phase (steps P1-P3)
// ---------------------------------------------------------------------------

/// Final state of one dual-ascent run at a fixed facility price λ.
#[derive(Clone, Debug)]
pub struct DualState {
    /// The facility price.
    pub lambda: R,
    /// Client duals (freeze times).
    pub alpha: Vec<R>,
    /// Facility payments β_ij ≥ 0, indexed `[i][j]`.
    pub beta: Vec<Vec<R>>,
    /// Tight facilities, in the order they went tight.
    pub tight: Vec<usize>,
    /// Tight times, parallel to `tight`.
    pub tight_time: Vec<R>,
    /// The pruned facility set F, in tight order.
    pub facilities: Vec<usize>,
}

impl DualState {
    /// Clients paying facility i: pay(i) = {j : β_ij > 0}.
    pub fn pay(&self, i: usize) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&j| self.beta[i][j].is_positive())
            .collect()
    }

    /// Dual feasibility: β ≥ 0, α_j ≤ h_t(c_ij) + β_ij for all i,j
    /// (ftight), and Σⱼ β_ij ≤ λ for all i (fpay). `costs[i][j]` are the
    /// h-costs the ascent ran on.
    pub fn feasible(&self, costs: &[Vec<R>]) -> bool {
        let n = self.alpha.len();
        for i in 0..n {
            let mut paid = R::zero();
            for j in 0..n {
                if self.beta[i][j].is_negative() {
                    return false;
                }
                if self.alpha[j] > &costs[i][j] + &self.beta[i][j] {
                    return false;
                }
                paid += &self.beta[i][j];
            }
            if paid > self.lambda {
                return false;
            }
        }
        true
    }
}

// Smallest τ' ≥ tau at which facility i's payment reaches λ, assuming the
// currently active clients stay active; None when no active client can ever
// pay it.
fn tight_time_for(
    costs: &[Vec<R>],
    i: usize,
    active: &[bool],
    alpha: &[R],
    lambda: &R,
    tau: &R,
) -> Option<R> {
    let n = active.len();
    let mut val = R::zero();
    let mut slope: i64 = 0;
    let mut bps: Vec<&R> = Vec::new();
    for j in 0..n {
        let h = &costs[i][j];
        if active[j] {
            if h <= tau {
                val += tau - h;
                slope += 1;
            } else {
                bps.push(h);
            }
        } else if &alpha[j] > h {
            val += &alpha[j] - h;
        }
    }
    if &val >= lambda {
        return Some(tau.clone());
    }
    bps.sort();
    let mut cur = tau.clone();
    let mut idx = 0;
    while idx < bps.len() {
        let bp = bps[idx];
        if slope > 0 {
            let cand = &cur + (lambda - &val) / rat(slope);
            if &cand <= bp {
                return Some(cand);
            }
        }
        val += rat(slope) * (bp - &cur);
        cur = bp.clone();
        while idx < bps.len() && bps[idx] == bp {
            slope += 1;
            idx += 1;
        }
    }
    if slope > 0 {
        Some(&cur + (lambda - &val) / rat(slope))
    } else {
        None
    }
}

/// Event-driven dual ascent over the given h-cost matrix, followed by the
/// pruning pass. Event times are exact rationals; simultaneous events are
/// processed facility-tight first, then client-freeze, lowest index first.
pub fn primal_dual_with_costs(costs: &[Vec<R>], lambda: &R) -> (Vec<usize>, DualState) {
    let n = costs.len();
    let mut active = vec![true; n];
    let mut n_active = n;
    let mut alpha = vec![R::zero(); n];
    let mut in_t = vec![false; n];
    let mut tight: Vec<usize> = Vec::new();
    let mut tight_time: Vec<R> = Vec::new();
    let mut tau = R::zero();
    while n_active > 0 {
        let mut tstar: Option<R> = None;
        let mut consider = |cand: R| {
            if tstar.as_ref().map_or(true, |b| &cand < b) {
                tstar = Some(cand);
            }
        };
        for i in 0..n {
            if !in_t[i] {
                if let Some(tt) = tight_time_for(costs, i, &active, &alpha, lambda, &tau) {
                    consider(tt);
                }
            }
        }
        for j in 0..n {
            if active[j] {
                for &i in &tight {
                    if costs[i][j] > tau {
                        consider(costs[i][j].clone());
                    }
                }
            }
        }
        let tstar = tstar.expect("dual ascent stalled with active clients");
        for i in 0..n {
            if in_t[i] {
                continue;
            }
            let mut g = R::zero();
            for j in 0..n {
                let cap = if active[j] { &tstar } else { &alpha[j] };
                if cap > &costs[i][j] {
                    g += cap - &costs[i][j];
                }
            }
            if &g >= lambda {
                in_t[i] = true;
                tight.push(i);
                tight_time.push(tstar.clone());
            }
        }
        for j in 0..n {
            if active[j] && tight.iter().any(|&i| costs[i][j] <= tstar) {
                active[j] = false;
                n_active -= 1;
                alpha[j] = tstar.clone();
            }
        }
        tau = tstar;
    }
    let mut beta = vec![vec![R::zero(); n]; n];
    for (i, row) in beta.iter_mut().enumerate() {
        let tt = tight.iter().position(|&q| q == i).map(|p| &tight_time[p]);
        for (j, b) in row.iter_mut().enumerate() {
            let cap = match tt {
                Some(tt) if tt < &alpha[j] => tt,
                _ => &alpha[j],
            };
            if cap > &costs[i][j] {
                *b = cap - &costs[i][j];
            }
        }
    }
    let mut fset: Vec<usize> = Vec::new();
    for &i in &tight {
        let independent = (0..n).all(|j| {
            !beta[i][j].is_positive()
                || fset.iter().all(|&ip| !beta[ip][j].is_positive())
        });
        if independent {
            fset.push(i);
        }
    }
    let state = DualState {
        lambda: lambda.clone(),
        alpha,
        beta,
        tight,
        tight_time,
        facilities: fset.clone(),
    };
    (fset, state)
}

/// Primal-dual phase on proxy costs h_t(tw; c_ij).
pub fn primal_dual_phase(
    inst: &ClusterInstance,
    tw: &WeightVector,
    t: &ThresholdVector,
    lambda: &R,
) -> Result<(Vec<usize>, DualState), ArgError> {
    if lambda.is_negative() {
        return Err(ArgError("lambda must be nonnegative".into()));
    }
    let costs = h_cost_matrix(inst, tw, t)?;
    Ok(primal_dual_with_costs(&costs, lambda))
}

/// Audit of the Lagrangian-multiplier-preserving guarantees: (i)
/// 3λ|F| + Σ_{j∈pay(F)} 3h_t(c_{i(j)j}) + Σ_{j∉pay(F)} h_{3t}(c_{i(j)j}) ≤
/// 3Σⱼα_j, and (ii) every client has a witness i ∈ F with h_{3t}(c_ij) ≤
/// 3α_j and α_j ≥ α_k for all k ∈ pay(i).
pub fn audit_lmp(
    inst: &ClusterInstance,
    state: &DualState,
    costs_t: &[Vec<R>],
    costs_3t: &[Vec<R>],
) -> bool {
    let n = inst.n;
    let f = &state.facilities;
    if f.is_empty() {
        return false;
    }
    let three = rat(3);
    let mut lhs = &three * &state.lambda * rat(f.len() as i64);
    for j in 0..n {
        let ij = nearest_in(inst, f, j);
        let pays = f.iter().any(|&i| state.beta[i][j].is_positive());
        if pays {
            lhs += &three * &costs_t[ij][j];
        } else {
            lhs += &costs_3t[ij][j];
        }
    }
    let rhs = &three * state.alpha.iter().fold(R::zero(), |acc, a| acc + a);
    if lhs > rhs {
        return false;
    }
    for j in 0..n {
        let ok = f.iter().any(|&i| {
            costs_3t[i][j] <= &three * &state.alpha[j]
                && (0..n).all(|kk| {
                    !state.beta[i][kk].is_positive() || state.alpha[j] >= state.alpha[kk]
                })
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Audit of the bi-point witness-pair property: every client has i ∈ F₂ and
/// i′ ∈ F₁ with h_{3t}(c_ij) ≤ 3α_j and h_{2t}(c_ii′) ≤ 2α_j + slack.
pub fn audit_newlmp_iii(
    f1: &[usize],
    f2: &[usize],
    alpha: &[R],
    costs_3t: &[Vec<R>],
    costs_2t: &[Vec<R>],
    slack: &R,
) -> bool {
    let n = alpha.len();
    let three = rat(3);
    let two = rat(2);
    (0..n).all(|j| {
        f2.iter().any(|&i| {
            costs_3t[i][j] <= &three * &alpha[j]
                && f1
                    .iter()
                    .any(|&ip| costs_2t[i][ip] <= &two * &alpha[j] + slack)
        })
    })
}

// ---------------------------------------------------------------------------
// Ordered k-median (binary search + bi-point rounding)
// ---------------------------------------------------------------------------

/// All dual-ascent runs performed for one threshold guess.
#[derive(Clone, Debug)]
pub struct GuessRuns {
    /// The threshold guess.
    pub t: ThresholdVector,
    /// Final dual states, in run order.
    pub states: Vec<DualState>,
}

/// Result of the ordered k-median solver with audit hooks.
#[derive(Clone, Debug)]
pub struct OrderedKmResult {
    /// The chosen facility set, ascending.
    pub facilities: Vec<usize>,
    /// Exact objective obj(w; assignment costs).
    pub cost: R,
    /// True when every guess's rounding path passed the certificates for
    /// the 5+ε guarantee; otherwise only the 9+O(ε) fallback is claimed.
    pub five_certified: bool,
    /// The sparsified weight the solver ran on.
    pub tw: WeightVector,
    /// Dual-ascent runs per guess (populated only when requested).
    pub runs: Vec<GuessRuns>,
}

// Greedy integral optimum of min θ·cθ + Σ c_z·z over 0 ≤ θ,z ≤ 1,
// Σz ≤ budget: θ = 1 iff cθ < 0; take the most negative z coefficients
// (ties lowest index) up to the budget.
fn select_theta_z(ctheta: &R, cz: &[R], budget: usize) -> (bool, Vec<bool>) {
    let theta = ctheta.is_negative();
    let mut order: Vec<usize> = (0..cz.len()).filter(|&r| cz[r].is_negative()).collect();
    order.sort_by(|&p, &q| cz[p].cmp(&cz[q]).then(p.cmp(&q)));
    let mut zsel = vec![false; cz.len()];
    for &r in order.iter().take(budget) {
        zsel[r] = true;
    }
    (theta, zsel)
}

// σ-mapping plus padding: nearest members of `base` to each i ∈ f2, padded
// with the lowest-index remaining members of `base` up to size k2.
fn padded_sigma(inst: &ClusterInstance, base: &[usize], f2: &[usize], k2: usize) -> Vec<usize> {
    let mut fbar: Vec<usize> = f2.iter().map(|&i| nearest_in(inst, base, i)).collect();
    fbar.sort_unstable();
    fbar.dedup();
    for &i in base {
        if fbar.len() >= k2 {
            break;
        }
        if !fbar.contains(&i) {
            fbar.push(i);
            fbar.sort_unstable();
        }
    }
    fbar
}

// The (R-P) bi-point rounding (9+O(ε) path).
fn nine_path(
    inst: &ClusterInstance,
    f1: &[usize],
    f2: &[usize],
    c3: &[Vec<R>],
    k: usize,
) -> Vec<usize> {
    let (k1, k2) = (f1.len(), f2.len());
    // b ≥ 1/2 ⟺ 2(k − k2) ≤ k1 − k2.
    if 2 * (k - k2) <= k1 - k2 {
        return f2.to_vec();
    }
    let fbar = padded_sigma(inst, f1, f2, k2);
    let rest: Vec<usize> = f1.iter().copied().filter(|i| !fbar.contains(i)).collect();
    let mut ctheta = R::zero();
    let mut cz = vec![R::zero(); rest.len()];
    for j in 0..inst.n {
        let i1 = nearest_in(inst, f1, j);
        let i2 = nearest_in(inst, f2, j);
        if fbar.binary_search(&i1).is_ok() {
            ctheta += &c3[i1][j] - &c3[i2][j];
        } else {
            let r = rest.iter().position(|&q| q == i1).unwrap();
            cz[r] -= rat(2) * &c3[i2][j];
        }
    }
    let (theta, zsel) = select_theta_z(&ctheta, &cz, k - k2);
    let mut open = if theta { fbar } else { f2.to_vec() };
    open.extend(rest.iter().enumerate().filter(|(r, _)| zsel[*r]).map(|(_, &i)| i));
    open.sort_unstable();
    open.dedup();
    open
}

// The augmented (O-P) bi-point rounding (5+O(ε) path).
fn five_path(
    inst: &ClusterInstance,
    f1: &[usize],
    f2: &[usize],
    st1: &DualState,
    st2: &DualState,
    alpha: &[R],
    c3: &[Vec<R>],
    k: usize,
) -> Vec<usize> {
    let n = inst.n;
    // Augment F1 to a maximal F1' keeping at most one paid facility per
    // client under the first execution's β.
    let mut f1p = f1.to_vec();
    let mut cnt = vec![0usize; n];
    for &i in f1 {
        for j in 0..n {
            if st1.beta[i][j].is_positive() {
                cnt[j] += 1;
            }
        }
    }
    for &i in f2 {
        if f1p.contains(&i) {
            continue;
        }
        if (0..n).all(|j| !st1.beta[i][j].is_positive() || cnt[j] == 0) {
            for j in 0..n {
                if st1.beta[i][j].is_positive() {
                    cnt[j] += 1;
                }
            }
            f1p.push(i);
        }
    }
    f1p.sort_unstable();
    let (k1p, k2) = (f1p.len(), f2.len());
    // b ≥ 3/5 ⟺ 5(k − k2) ≤ 2(k1' − k2): open F2 directly.
    if 5 * (k - k2) <= 2 * (k1p - k2) {
        return f2.to_vec();
    }
    let fbar = padded_sigma(inst, &f1p, f2, k2);
    let rest: Vec<usize> = f1p.iter().copied().filter(|i| !fbar.contains(i)).collect();
    let pay1: Vec<bool> = (0..n)
        .map(|j| f1p.iter().any(|&i| st1.beta[i][j].is_positive()))
        .collect();
    let pay2: Vec<bool> = (0..n)
        .map(|j| f2.iter().any(|&i| st2.beta[i][j].is_positive()))
        .collect();
    let five = rat(5);
    let two = rat(2);
    let mut ctheta = R::zero();
    let mut cz = vec![R::zero(); rest.len()];
    for j in 0..n {
        let i1 = nearest_in(inst, &f1p, j);
        let i2 = nearest_in(inst, f2, j);
        let in_fbar = fbar.binary_search(&i1).is_ok();
        let a5 = &five * &alpha[j];
        let h1 = &c3[i1][j];
        let h2 = &c3[i2][j];
        match (pay1[j], pay2[j], in_fbar) {
            (true, true, true) => ctheta += h1 - h2,
            (true, true, false) => {
                let r = rest.iter().position(|&q| q == i1).unwrap();
                cz[r] -= &two * h2;
            }
            (false, _, _) => ctheta += &a5 - h2,
            (true, false, true) => ctheta += h1 - &a5,
            (true, false, false) => {
                let r = rest.iter().position(|&q| q == i1).unwrap();
                cz[r] += h1 - &a5;
            }
        }
    }
    let (theta, zsel) = select_theta_z(&ctheta, &cz, k - k2);
    let mut open = if theta { fbar } else { f2.to_vec() };
    open.extend(
        rest.iter()
            .enumerate()
            .filter(|(r, _)| zsel[*r])
            .map(|(_, &i)| i),
    );
    open.sort_unstable();
    open.dedup();
    open
}

/// (5+O(ε))-approximation for ordered k-median when the per-guess
/// certificates hold (which [`OrderedKmResult::five_certified`] reports),
/// with a 9+O(ε) fallback otherwise: sparsifies with δ = ε/12, enumerates
/// exact non-increasing threshold tuples over the distance grid at the
/// weight-carrying breakpoints, binary-searches the facility price to
/// bracket k, and rounds the bi-point solution along both the direct and
/// the augmented path, keeping the better outcome by exact ordered cost.
pub fn solve_ordered_km(
    inst: &ClusterInstance,
    w: &WeightVector,
    eps: &R,
) -> Result<OrderedKmResult, ArgError> {
    solve_ordered_km_detailed(inst, w, eps, false)
}

/// [`solve_ordered_km`] with optional recording of every dual-ascent run.
pub fn solve_ordered_km_detailed(
    inst: &ClusterInstance,
    w: &WeightVector,
    eps: &R,
    collect_runs: bool,
) -> Result<OrderedKmResult, ArgError> {
    if w.len() != inst.n {
        return Err(ArgError("weight length must equal point count".into()));
    }
    if !eps.is_positive() {
        return Err(ArgError("eps must be positive".into()));
    }
    let n = inst.n;
    let k = inst.k;
    let delta = eps / rat(12);
    let pos = position_set(n, &delta)?;
    let tw = sparsify_weights(w, &pos);
    let eval = |fset: &[usize]| -> Result<R, ArgError> {
        ordered_cost(w, &assign_cost_vector(inst, fset)?)
    };
    let trivial = |fset: Vec<usize>, tw: WeightVector| -> Result<OrderedKmResult, ArgError> {
        let cost = eval(&fset)?;
        Ok(OrderedKmResult {
            facilities: fset,
            cost,
            five_certified: true,
            tw,
            runs: Vec::new(),
        })
    };
    if k >= n {
        return trivial((0..n).collect(), tw);
    }
    if w.get1(1).is_zero() {
        return trivial((0..k).collect(), tw);
    }
    if let Some(reps) = detect_zero_cluster(inst) {
        return trivial(reps, tw);
    }
    // Positions carrying weight after sparsification.
    let mut actives: Vec<usize> = Vec::new();
    for (idx, &l) in pos.positions.iter().enumerate() {
        let nx = if idx + 1 < pos.positions.len() {
            pos.positions[idx + 1]
        } else {
            n + 1
        };
        if (tw.get1(l) - tw.get1(nx)).is_positive() {
            actives.push(l);
        }
    }
    let grid = distance_grid(inst);
    let dmin = grid
        .iter()
        .find(|v| v.is_positive())
        .cloned()
        .expect("a positive distance exists past the zero-cluster check");
    let lb = tw.get1(1) * &dmin;
    let eps_s = eps / rat(30);
    let min_gap = if n <= 20 {
        let mut two_n = R::one();
        for _ in 0..n {
            two_n *= rat(2);
        }
        &eps_s * &lb / (rat((n * n) as i64) * two_n)
    } else {
        let n4 = rat((n * n) as i64) * rat((n * n) as i64);
        &eps_s * &lb / n4
    };
    let slack = rat(2) * &eps_s * &lb / rat((n * n) as i64);
    // Exact non-increasing tuples over the active positions, drawn from the
    // distance grid; every breakpoint of the optimal order-statistic vector
    // at an active position is such a value.
    let mut tuples: Vec<Vec<R>> = Vec::new();
    let mut cur: Vec<R> = Vec::new();
    fn rec(grid: &[R], len: usize, cur: &mut Vec<R>, out: &mut Vec<Vec<R>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in grid.iter().rev() {
            if let Some(last) = cur.last() {
                if v > last {
                    continue;
                }
            }
            cur.push(v.clone());
            rec(grid, len, cur, out);
            cur.pop();
        }
    }
    rec(&grid, actives.len(), &mut cur, &mut tuples);
    let max_active = *actives.last().unwrap();
    let guesses: Vec<ThresholdVector> = tuples
        .into_iter()
        .map(|tp| {
            // Fill the full breakpoint set: each position copies the value
            // at the smallest active position ≥ it; zero past the last.
            let t: Vec<R> = pos
                .positions
                .iter()
                .map(|&l| {
                    if l > max_active {
                        R::zero()
                    } else {
                        let e = actives.iter().position(|&a| a >= l).unwrap();
                        tp[e].clone()
                    }
                })
                .collect();
            ThresholdVector::new(&pos, t).expect("tuples are valid thresholds")
        })
        .collect();
    let three = rat(3);
    let two = rat(2);
    let mut best: Option<(R, Vec<usize>)> = None;
    let mut all_cert = true;
    let mut runs: Vec<GuessRuns> = Vec::new();
    for t in &guesses {
        let ct = h_cost_matrix(inst, &tw, t)?;
        let c3 = h_cost_matrix(inst, &tw, &t.scale(&three))?;
        let c2 = h_cost_matrix(inst, &tw, &t.scale(&two))?;
        let mut states: Vec<DualState> = Vec::new();
        let mut cands: Vec<Vec<usize>> = Vec::new();
        let guess_cert;
        let hmax = ct.iter().flatten().max().unwrap().clone();
        if hmax.is_zero() {
            cands.push((0..k).collect());
            guess_cert = true;
        } else {
            let mut lam_lo = R::zero();
            let (mut f_lo, mut st_lo) = primal_dual_with_costs(&ct, &lam_lo);
            states.push(st_lo.clone());
            let mut lam_hi = rat((n + 1) as i64) * &hmax;
            let (mut f_hi, mut st_hi) = primal_dual_with_costs(&ct, &lam_hi);
            states.push(st_hi.clone());
            while f_hi.len() > k {
                lam_hi = &lam_hi * rat(2);
                let r = primal_dual_with_costs(&ct, &lam_hi);
                f_hi = r.0;
                st_hi = r.1;
                states.push(st_hi.clone());
            }
            let mut exact: Option<DualState> = None;
            if f_lo.len() <= k {
                exact = Some(st_lo.clone());
            } else if f_hi.len() == k {
                exact = Some(st_hi.clone());
            } else {
                while &lam_hi - &lam_lo > min_gap {
                    let mid = (&lam_lo + &lam_hi) / rat(2);
                    let (fm, sm) = primal_dual_with_costs(&ct, &mid);
                    states.push(sm.clone());
                    match fm.len().cmp(&k) {
                        std::cmp::Ordering::Equal => {
                            exact = Some(sm);
                            break;
                        }
                        std::cmp::Ordering::Greater => {
                            lam_lo = mid;
                            f_lo = fm;
                            st_lo = sm;
                        }
                        std::cmp::Ordering::Less => {
                            lam_hi = mid;
                            f_hi = fm;
                            st_hi = sm;
                        }
                    }
                }
            }
            match exact {
                Some(sm) => {
                    cands.push(sm.facilities.clone());
                    guess_cert = audit_lmp(inst, &sm, &ct, &c3) && sm.feasible(&ct);
                }
                None => {
                    let alpha: Vec<R> = (0..n)
                        .map(|j| {
                            if st_lo.alpha[j] > st_hi.alpha[j] {
                                st_lo.alpha[j].clone()
                            } else {
                                st_hi.alpha[j].clone()
                            }
                        })
                        .collect();
                    cands.push(nine_path(inst, &f_lo, &f_hi, &c3, k));
                    cands.push(five_path(
                        inst, &f_lo, &f_hi, &st_lo, &st_hi, &alpha, &c3, k,
                    ));
                    guess_cert = audit_lmp(inst, &st_lo, &ct, &c3)
                        && audit_lmp(inst, &st_hi, &ct, &c3)
                        && st_lo.feasible(&ct)
                        && st_hi.feasible(&ct)
                        && audit_newlmp_iii(&f_lo, &f_hi, &alpha, &c3, &c2, &slack);
                }
            }
        }
        all_cert &= guess_cert;
        for mut fset in cands {
            fset.sort_unstable();
            fset.dedup();
            if fset.is_empty() {
                continue;
            }
            let cost = eval(&fset)?;
            let better = best
                .as_ref()
                .map_or(true, |(bc, bf)| cost < *bc || (cost == *bc && fset < *bf));
            if better {
                best = Some((cost, fset));
            }
        }
        if collect_runs {
            runs.push(GuessRuns {
                t: t.clone(),
                states,
            });
        }
    }
    let (cost, facilities) =
        best.ok_or_else(|| ArgError("every threshold guess failed".into()))?;
    Ok(OrderedKmResult {
        facilities,
        cost,
        five_certified: all_cert,
        tw,
        runs,
    })
}

// ---------------------------------------------------------------------------
// Min-max and min-norm clustering
// ---------------------------------------------------------------------------

/// Threshold guess family for the min-max / multi-budget clustering solvers:
/// every non-increasing tuple over `pos` drawn from the positive distance
/// grid, with each entry floored at ε·t₁/n and the results deduplicated.
pub fn minmax_threshold_guesses(
    inst: &ClusterInstance,
    pos: &PositionSet,
    eps: &R,
) -> Result<Vec<ThresholdVector>, ArgError> {
    if !eps.is_positive() {
        return Err(ArgError("eps must be positive".into()));
    }
    let n = inst.n;
    let posgrid: Vec<R> = distance_grid(inst)
        .into_iter()
        .filter(|v| v.is_positive())
        .collect();
    if posgrid.is_empty() {
        return Err(ArgError(
            "threshold guessing needs a positive distance".into(),
        ));
    }
    let mut tuples: Vec<Vec<R>> = Vec::new();
    let mut cur: Vec<R> = Vec::new();
    fn rec(grid: &[R], len: usize, cur: &mut Vec<R>, out: &mut Vec<Vec<R>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in grid.iter().rev() {
            if let Some(last) = cur.last() {
                if v > last {
                    continue;
                }
            }
            cur.push(v.clone());
            rec(grid, len, cur, out);
            cur.pop();
        }
    }
    rec(&posgrid, pos.positions.len(), &mut cur, &mut tuples);
    let n_rat = rat(n as i64);
    let mut floored: BTreeSet<Vec<R>> = BTreeSet::new();
    for tp in tuples {
        let floor = eps * &tp[0] / &n_rat;
        floored.insert(
            tp.into_iter()
                .map(|v| if v < floor { floor.clone() } else { v })
                .collect(),
        );
    }
    floored
        .into_iter()
        .map(|tp| ThresholdVector::new(pos, tp))
        .collect()
}

/// Multi-budget LP: the feasibility system (OCl-1..4) with one proxy row per
/// weight, Σ h_t(tw_r; c_ij)·x_ij ≤ rhs_r, and a zero objective.
pub fn build_budget_cl_lp(
    inst: &ClusterInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
    rhs: &[R],
) -> Result<LinearProgram, ArgError> {
    if tws.len() != rhs.len() {
        return Err(ArgError(
            "budget LP needs one right-hand side per weight".into(),
        ));
    }
    if tws.is_empty() {
        return Err(ArgError("budget LP needs at least one weight vector".into()));
    }
    let n = inst.n;
    let mut lp = base_cl_lp(inst, t, 0);
    for (tw, b) in tws.iter().zip(rhs) {
        check_cl_args(inst, tw, t)?;
        let mut coeffs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let h = h_multi(tw, t, &inst.c[i][j])?;
                if !h.is_zero() {
                    coeffs.push((x_idx(n, i, j), h));
                }
            }
        }
        lp.add_row(coeffs, Cmp::Le, b.clone());
    }
    Ok(lp)
}

/// Solves the multi-budget feasibility LP and re-derives the greedy x from
/// the y values. Returns `None` on infeasible guesses.
pub fn solve_budget_cl_lp(
    inst: &ClusterInstance,
    tws: &[WeightVector],
    t: &ThresholdVector,
    rhs: &[R],
    mode: Mode,
) -> Result<Option<OclSolution>, ArgError> {
    let lp = build_budget_cl_lp(inst, tws, t, rhs)?;
    match solve_lp(&lp, mode) {
        Ok(bs) => {
            let y: Vec<R> = (0..inst.n).map(|i| bs.values[y_idx(inst.n, i)].clone()).collect();
            Ok(Some(OclSolution::from_y(inst, y, t.clone())?))
        }
        Err(e) => Ok(lp_failure(e, mode)?.map(|(_, s)| s)),
    }
}

/// Min-max ordered k-clustering: sparsifies every weight at δ = 1,
/// enumerates non-increasing threshold tuples from the positive distance
/// grid (each entry floored at ε·t₁/n), solves the min-max LP per guess,
/// rounds each with the weight-oblivious rounding, and returns the facility
/// set with the smallest exact max_r obj(w_r; ·) over the original weights
/// (lexicographic tie-break). Infeasible guesses are skipped.
pub fn solve_minmax_ordered_km(
    inst: &ClusterInstance,
    ws: &[WeightVector],
    eps: &R,
    mode: Mode,
) -> Result<Vec<usize>, ArgError> {
    if ws.is_empty() {
        return Err(ArgError("min-max needs at least one weight vector".into()));
    }
    if ws.iter().any(|w| w.len() != inst.n) {
        return Err(ArgError("weight length must equal point count".into()));
    }
    if !eps.is_positive() {
        return Err(ArgError("eps must be positive".into()));
    }
    let n = inst.n;
    let k = inst.k.min(n);
    if ws.iter().all(|w| w.get1(1).is_zero()) {
        return Ok((0..k).collect());
    }
    if let Some(reps) = detect_zero_cluster(inst) {
        return Ok(reps);
    }
    let pos = position_set(n, &R::one())?;
    let tws: Vec<WeightVector> = ws.iter().map(|w| sparsify_weights(w, &pos)).collect();
    let guesses = minmax_threshold_guesses(inst, &pos, eps)?;
    let mut best: Option<(R, Vec<usize>)> = None;
    for t in guesses {
        let Some((_, sol)) = solve_minmax_cl_lp(inst, &tws, &t, mode)? else {
            continue;
        };
        let Some(fset) = oblivious_round_cluster(&sol, inst, mode)? else {
            continue;
        };
        if fset.is_empty() {
            continue;
        }
        let costs = assign_cost_vector(inst, &fset)?;
        let val = ws
            .iter()
            .map(|w| ordered_cost(w, &costs).expect("matching dimensions"))
            .max()
            .unwrap();
        let better = best
            .as_ref()
            .map_or(true, |(bv, bf)| val < *bv || (val == *bv && fset < *bf));
        if better {
            best = Some((val, fset));
        }
    }
    best.map(|(_, f)| f)
        .ok_or_else(|| ArgError("every threshold guess failed to round".into()))
}

/// Min-norm k-clustering through the min-norm → min-max reduction,
/// delegating each weight collection to the min-max solver.
pub fn solve_minnorm_cluster(
    inst: &ClusterInstance,
    f: &NormSpec,
    eps: &R,
    mode: Mode,
) -> Result<Vec<usize>, ArgError> {
    if let Some(reps) = detect_zero_cluster(inst) {
        return Ok(reps);
    }
    let bounds = cluster_bounds(inst, f)?;
    minnorm_reduce_and_solve(f, eps, &bounds, inst.n, |wc| {
        solve_minmax_ordered_km(inst, &wc.weights, eps, mode)
    })
}
