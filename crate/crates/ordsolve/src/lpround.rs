//! Dense LP solving and the generic iterative-rounding engine.
//!
//! The solver is a self-contained two-phase primal simplex with Bland's rule,
//! generic over the scalar: exact rationals by default (tolerance zero, so
//! "tight" and "positive" classifications are trustworthy), or f64 as a
//! performance escape hatch (feasibility tolerance 1e-9, integrality 1e-7).
//!
//! The iterative rounder repeatedly moves to an optimal extreme point with
//! support inside the current support and, while the point is fractional,
//! drops a tight budget row whose support carries at most k units of
//! fractionality, yielding a {0,1} point with per-row budget violation at
//! most k times the largest coefficient over the starting support.

use crate::model::R;
use num::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// LP solver failure modes.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    /// The LP has no feasible point.
    #[error("linear program is infeasible")]
    Infeasible,
    /// The LP is unbounded below (never occurs for the crate's LPs).
    #[error("linear program is unbounded")]
    Unbounded,
    /// A tolerance/invariant failure (floating mode) or a malformed system.
    #[error("numerical or structural failure: {0}")]
    Numerical(String),
}

/// Arithmetic mode for LP solving and rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact BigRational arithmetic, zero tolerances.
    Exact,
    /// f64 arithmetic with feas_tol 1e-9 and integrality tolerance 1e-7.
    Float,
}

/// Scalar abstraction for the simplex: exact rationals or f64.
pub trait LpScalar:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Conversion from an exact rational.
    fn from_rational(r: &R) -> Self;
    /// Conversion back to an exact rational (identity for rationals).
    fn to_rational(&self) -> R;
    /// Comparison tolerance (zero for rationals).
    fn tol() -> Self;
    /// True iff self > tol.
    fn is_pos(&self) -> bool {
        *self > Self::tol()
    }
    /// True iff self < -tol.
    fn is_neg(&self) -> bool {
        *self < -Self::tol()
    }
    /// True iff |self| ≤ tol.
    fn is_zeroish(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

impl LpScalar for R {
    fn from_rational(r: &R) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> R {
        self.clone()
    }
    fn tol() -> Self {
        <R as Zero>::zero()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
}

impl LpScalar for f64 {
    fn from_rational(r: &R) -> Self {
        r.to_f64().expect("finite rational")
    }
    fn to_rational(&self) -> R {
        R::from_float(*self).expect("finite float")
    }
    fn tol() -> Self {
        1e-9
    }
}

/// Row comparison sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    /// Σ a_j x_j ≤ rhs.
    Le,
    /// Σ a_j x_j ≥ rhs.
    Ge,
    /// Σ a_j x_j = rhs.
    Eq,
}

/// A sparse LP row.
#[derive(Clone, Debug)]
pub struct LpRow {
    /// (variable index, coefficient) pairs.
    pub coeffs: Vec<(usize, R)>,
    /// Comparison sense.
    pub cmp: Cmp,
    /// Right-hand side.
    pub rhs: R,
}

/// A dense LP in inequality form: minimize cᵀx subject to the rows,
/// x ≥ 0, and x_j ≤ 1 for flagged variables.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    /// Number of variables.
    pub num_vars: usize,
    /// Minimization objective (length num_vars).
    pub objective: Vec<R>,
    /// Constraint rows.
    pub rows: Vec<LpRow>,
    /// Per-variable unit upper bound flag (x_j ≤ 1 when true).
    pub unit_upper: Vec<bool>,
}

impl LinearProgram {
    /// Empty LP with the given variable count and zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![R::zero(); num_vars],
            rows: Vec::new(),
            unit_upper: vec![false; num_vars],
        }
    }

    /// Adds a row.
    pub fn add_row(&mut self, coeffs: Vec<(usize, R)>, cmp: Cmp, rhs: R) {
        self.rows.push(LpRow { coeffs, cmp, rhs });
    }
}

/// An optimal basic feasible solution with its vertex certificate.
#[derive(Clone, Debug)]
pub struct BasicSolution {
    /// Optimal variable values (exact rationals; converted in float mode).
    pub values: Vec<R>,
    /// Objective value cᵀx.
    pub objective: R,
    /// Basic column indices of the final simplex basis (structural columns
    /// are 0..num_vars; larger indices are slack/surplus columns).
    pub basis: Vec<usize>,
}

/// Solves the LP to an optimal basic feasible solution.
pub fn solve_lp(lp: &LinearProgram, mode: Mode) -> Result<BasicSolution, LpError> {
    match mode {
        Mode::Exact => solve_generic::<R>(lp),
        Mode::Float => solve_generic::<f64>(lp),
    }
}

struct Tableau<T> {
    ncols: usize,
    tab: Vec<Vec<T>>, // each row: ncols coefficients + rhs
    basis: Vec<usize>,
    banned: Vec<bool>,
}

impl<T: LpScalar> Tableau<T> {
    fn rhs(&self, r: usize) -> &T {
        &self.tab[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.tab[r][c].clone();
        for x in self.tab[r].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        let pr = self.tab[r].clone();
        for i in 0..self.tab.len() {
            if i == r {
                continue;
            }
            let f = self.tab[i][c].clone();
            if f.is_zeroish() {
                continue;
            }
            for j in 0..=self.ncols {
                self.tab[i][j] = self.tab[i][j].clone() - f.clone() * pr[j].clone();
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex with Bland's rule on the given cost vector (length
    /// ncols). Returns Some(false) on unboundedness and None when the pivot
    /// cap is hit (float-mode stalling on degenerate bases).
    fn optimize(&mut self, cost: &[T]) -> Option<bool> {
        let cap = 20_000usize + 100 * self.ncols;
        for _ in 0..cap {
            // Reduced costs r_j = c_j − Σ_i c_{B(i)}·tab[i][j].
            let mut entering = None;
            'cols: for j in 0..self.ncols {
                if self.banned[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rj = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zeroish() {
                        rj = rj - cost[b].clone() * self.tab[i][j].clone();
                    }
                }
                if rj.is_neg() {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let Some(c) = entering else { return Some(true) };
            // Ratio test; Bland tie-break by smallest basis column.
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.tab.len() {
                if self.tab[i][c].is_pos() {
                    let ratio = self.rhs(i).clone() / self.tab[i][c].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr
                                || (!(ratio > *lr) && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return Some(false),
            }
        }
        None
    }
}

fn solve_generic<T: LpScalar>(lp: &LinearProgram) -> Result<BasicSolution, LpError> {
    let nv = lp.num_vars;
    // Assemble rows including unit upper bounds, with rhs ≥ 0.
    let mut dense_rows: Vec<(Vec<T>, Cmp, T)> = Vec::new();
    let mut push_row = |coeffs: &[(usize, R)], cmp: Cmp, rhs: &R| {
        let mut row = vec![T::zero(); nv];
        for (j, a) in coeffs {
            row[*j] = row[*j].clone() + T::from_rational(a);
        }
        let mut rhs_t = T::from_rational(rhs);
        let mut cmp = cmp;
        if rhs_t.is_neg() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            rhs_t = -rhs_t;
            cmp = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        dense_rows.push((row, cmp, rhs_t));
    };
    for row in &lp.rows {
        push_row(&row.coeffs, row.cmp, &row.rhs);
    }
    let one = R::one();
    for j in 0..nv {
        if lp.unit_upper[j] {
            push_row(&[(j, one.clone())], Cmp::Le, &one);
        }
    }
    let m = dense_rows.len();
    // Columns: structural, then one slack/surplus per inequality row, then
    // artificials.
    let mut ncols = nv;
    let mut slack_col = vec![usize::MAX; m];
    for (i, (_, cmp, _)) in dense_rows.iter().enumerate() {
        if matches!(cmp, Cmp::Le | Cmp::Ge) {
            slack_col[i] = ncols;
            ncols += 1;
        }
    }
    let art_start = ncols;
    let mut art_col = vec![usize::MAX; m];
    for (i, (_, cmp, _)) in dense_rows.iter().enumerate() {
        if matches!(cmp, Cmp::Ge | Cmp::Eq) {
            art_col[i] = ncols;
            ncols += 1;
        }
    }
    let mut tab = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (row, cmp, rhs)) in dense_rows.iter().enumerate() {
        let mut trow = vec![T::zero(); ncols + 1];
        trow[..nv].clone_from_slice(row);
        match cmp {
            Cmp::Le => {
                trow[slack_col[i]] = T::one();
                basis.push(slack_col[i]);
            }
            Cmp::Ge => {
                trow[slack_col[i]] = -T::one();
                trow[art_col[i]] = T::one();
                basis.push(art_col[i]);
            }
            Cmp::Eq => {
                trow[art_col[i]] = T::one();
                basis.push(art_col[i]);
            }
        }
        trow[ncols] = rhs.clone();
        tab.push(trow);
    }
    let mut t = Tableau {
        ncols,
        tab,
        basis,
        banned: vec![false; ncols],
    };
    // Phase 1: minimize the sum of artificials.
    if art_start < ncols {
        let mut cost = vec![T::zero(); ncols];
        for c in cost.iter_mut().skip(art_start) {
            *c = T::one();
        }
        match t.optimize(&cost) {
            Some(true) => {}
            Some(false) => return Err(LpError::Numerical("phase-1 unbounded".into())),
            None => return Err(LpError::Numerical("simplex exceeded the pivot cap".into())),
        }
        let mut p1 = T::zero();
        for (i, &b) in t.basis.iter().enumerate() {
            if b >= art_start {
                p1 = p1 + t.rhs(i).clone();
            }
        }
        if p1.is_pos() {
            return Err(LpError::Infeasible);
        }
        // Pivot artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| !t.tab[r][c].is_zeroish()) {
                    t.pivot(r, c);
                }
            }
        }
        for b in t.banned.iter_mut().skip(art_start) {
            *b = true;
        }
    }
    // Phase 2.
    let mut cost = vec![T::zero(); ncols];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[j] = T::from_rational(c);
    }
    match t.optimize(&cost) {
        Some(true) => {}
        Some(false) => return Err(LpError::Unbounded),
        None => return Err(LpError::Numerical("simplex exceeded the pivot cap".into())),
    }
    let mut values = vec![R::zero(); nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            let v = t.rhs(i);
            values[b] = if v.is_neg() { R::zero() } else { v.to_rational() };
        }
    }
    let objective: R = lp
        .objective
        .iter()
        .zip(&values)
        .map(|(c, v)| c * v)
        .sum();
    Ok(BasicSolution {
        values,
        objective,
        basis: t.basis.clone(),
    })
}

/// The structured system rounded by `iterative_round`: laminar {0,1} rows
/// with integral right-hand sides plus nonnegative budget rows, each variable
/// appearing in at most k budget rows.
#[derive(Clone, Debug)]
pub struct IterRoundSystem {
    /// Number of variables.
    pub num_vars: usize,
    /// Nonnegative minimization objective.
    pub c: Vec<R>,
    /// Laminar ≤ rows: (variable support, integral rhs).
    pub laminar_le: Vec<(Vec<usize>, R)>,
    /// Laminar ≥ rows: (variable support, integral rhs).
    pub laminar_ge: Vec<(Vec<usize>, R)>,
    /// Budget ≤ rows with nonnegative coefficients.
    pub budget: Vec<(Vec<(usize, R)>, R)>,
    /// Bound on budget-row memberships per variable.
    pub k: usize,
}

impl IterRoundSystem {
    /// Validates laminarity of the A1 ∪ A2 supports, integrality of their
    /// right-hand sides, nonnegativity, and the per-variable budget count.
    pub fn new(
        num_vars: usize,
        c: Vec<R>,
        laminar_le: Vec<(Vec<usize>, R)>,
        laminar_ge: Vec<(Vec<usize>, R)>,
        budget: Vec<(Vec<(usize, R)>, R)>,
        k: usize,
    ) -> Result<Self, LpError> {
        if c.len() != num_vars || c.iter().any(|x| x.is_negative()) {
            return Err(LpError::Numerical("objective must be nonnegative".into()));
        }
        let mut supports: Vec<Vec<usize>> = Vec::new();
        for (s, b) in laminar_le.iter().chain(laminar_ge.iter()) {
            if !b.is_integer() {
                return Err(LpError::Numerical("laminar rhs must be integral".into()));
            }
            let mut s = s.clone();
            s.sort_unstable();
            supports.push(s);
        }
        for a in &supports {
            for b in &supports {
                let inter = a.iter().any(|x| b.binary_search(x).is_ok());
                if inter {
                    let a_in_b = a.iter().all(|x| b.binary_search(x).is_ok());
                    let b_in_a = b.iter().all(|x| a.binary_search(x).is_ok());
                    if !a_in_b && !b_in_a {
                        return Err(LpError::Numerical(
                            "laminar rows must form a laminar family".into(),
                        ));
                    }
                }
            }
        }
        let mut count = vec![0usize; num_vars];
        for (coeffs, _) in &budget {
            for (j, a) in coeffs {
                if a.is_negative() {
                    return Err(LpError::Numerical(
                        "budget coefficients must be nonnegative".into(),
                    ));
                }
                if a.is_positive() {
                    count[*j] += 1;
                }
            }
        }
        if count.iter().any(|&x| x > k) {
            return Err(LpError::Numerical(
                "a variable appears in more than k budget rows".into(),
            ));
        }
        Ok(IterRoundSystem {
            num_vars,
            c,
            laminar_le,
            laminar_ge,
            budget,
            k,
        })
    }
}

fn int_tol(mode: Mode) -> R {
    match mode {
        Mode::Exact => R::zero(),
        Mode::Float => R::new(1.into(), 10_000_000.into()),
    }
}

/// Iterative rounding of a fractional feasible point to a {0,1} vector.
///
/// Guarantees: (a) cᵀq̃ ≤ cᵀq̂; (b) support(q̃) ⊆ support(q̂); (c) the laminar
/// rows hold exactly; (d) each budget row i is violated by at most
/// k·max_{j: q̂_j>0} B_ij.
pub fn iterative_round(
    sys: &IterRoundSystem,
    qhat: &[R],
    mode: Mode,
) -> Result<Vec<R>, LpError> {
    assert_eq!(qhat.len(), sys.num_vars);
    let itol = int_tol(mode);
    {
        let one = R::one();
        if qhat.iter().all(|x| x <= &itol || (x - &one).abs() <= itol) {
            return Ok(qhat
                .iter()
                .map(|x| if x > &itol { R::one() } else { <R as Zero>::zero() })
                .collect());
        }
    }
    let mut support: Vec<bool> = qhat.iter().map(|x| x > &itol).collect();
    let mut dropped = vec![false; sys.budget.len()];
    let max_iters = sys.budget.len() + 2;
    for _ in 0..max_iters {
        // Build the LP over the surviving constraints, restricted to the
        // current support (other variables fixed to zero).
        let mut lp = LinearProgram::new(sys.num_vars);
        lp.objective = sys.c.clone();
        for j in 0..sys.num_vars {
            lp.unit_upper[j] = true;
            if !support[j] {
                lp.add_row(vec![(j, R::one())], Cmp::Le, R::zero());
            }
        }
        for (s, b) in &sys.laminar_le {
            lp.add_row(
                s.iter().map(|&j| (j, R::one())).collect(),
                Cmp::Le,
                b.clone(),
            );
        }
        for (s, b) in &sys.laminar_ge {
            lp.add_row(
                s.iter().map(|&j| (j, R::one())).collect(),
                Cmp::Ge,
                b.clone(),
            );
        }
        for (i, (coeffs, d)) in sys.budget.iter().enumerate() {
            if !dropped[i] {
                lp.add_row(coeffs.clone(), Cmp::Le, d.clone());
            }
        }
        let sol = solve_lp(&lp, mode)?;
        let q = sol.values;
        for (j, s) in support.iter_mut().enumerate() {
            *s = *s && q[j] > itol;
        }
        let one = R::one();
        let integral = q
            .iter()
            .all(|x| x <= &itol || (x - &one).abs() <= itol);
        if integral {
            return Ok(q
                .iter()
                .map(|x| if x > &itol { R::one() } else { R::zero() })
                .collect());
        }
        // Find a droppable tight budget row: tight at q with at most k units
        // of fractionality over its support; drop the lowest-index one.
        let ttol = match mode {
            Mode::Exact => R::zero(),
            Mode::Float => R::new(1.into(), 1_000_000.into()),
        };
        let mut found = false;
        for (i, (coeffs, d)) in sys.budget.iter().enumerate() {
            if dropped[i] {
                continue;
            }
            let lhs: R = coeffs.iter().map(|(j, a)| a * &q[*j]).sum();
            if (&lhs - d).abs() > ttol {
                continue;
            }
            let frac: R = coeffs
                .iter()
                .filter(|(j, a)| a.is_positive() && q[*j] > itol)
                .map(|(j, _)| &one - &q[*j])
                .sum();
            if frac <= crate::model::rat(sys.k as i64) + &ttol {
                dropped[i] = true;
                found = true;
                break;
            }
        }
        if !found {
            return Err(LpError::Numerical(
                "no droppable tight budget row at a fractional vertex".into(),
            ));
        }
    }
    Err(LpError::Numerical("iterative rounding did not terminate".into()))
}
