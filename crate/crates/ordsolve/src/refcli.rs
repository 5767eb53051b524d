//! Reference oracles, text file formats, and the command-line front end:
//! exact brute-force optima for small instances, parsers/formatters for
//! instances, weights, budgets, and the norm DSL, and the [`RunReport`]
//! emitted by the `ordsolve` binary.

use std::fmt::Write as _;

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::cluster::{solve_minmax_ordered_km, solve_minnorm_cluster, solve_ordered_km};
use crate::fairness::{
    multibudget_rho, solve_multibudget, solve_simultaneous, BudgetSpec, Problem, Solution,
};
use crate::loadbal::{
    solve_minmax_ordered_lb, solve_minnorm_lb, solve_ordered_lb, solve_topl_lb, topl_indicator,
};
use crate::lpround::Mode;
use crate::model::{
    assign_cost_vector, load_vector, norm_eval, rat, Assignment, ClusterInstance, CostVector,
    LoadBalInstance, LpExponent, NormSpec, WeightVector, R,
};

/// CLI-level error with the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input or failed validation (exit code 2).
    #[error("{0}")]
    Parse(String),
    /// Budgets that no solution can meet (exit code 3).
    #[error("{0}")]
    Infeasible(String),
    /// Brute-force size guard exceeded (exit code 4).
    #[error("{0}")]
    SizeGuard(String),
}

impl CliError {
    /// Process exit code for this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::SizeGuard(_) => 4,
        }
    }
}

impl From<crate::model::ArgError> for CliError {
    fn from(e: crate::model::ArgError) -> Self {
        CliError::Parse(e.0)
    }
}

// ---------------------------------------------------------------------------
// Exact rational parsing and printing
// ---------------------------------------------------------------------------

/// Parses an exact rational: "a/b", an integer, or a decimal such as "1.25".
pub fn parse_rational(s: &str) -> Result<R, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("malformed number {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(CliError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(R::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        if !int_abs.chars().all(|c| c.is_ascii_digit())
            || frac.is_empty()
            || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: BigInt = format!("{int_abs}{frac}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let v = R::new(whole, den);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(R::from_integer(n))
}

/// Prints a rational exactly: "a/b" for non-integers, "a" otherwise.
pub fn format_rational(v: &R) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn numbered<T>(line_no: usize, r: Result<T, CliError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Parse(format!("line {line_no}: {e}")))
}

fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Parses a load-balancing instance: header "m n", then m rows of n
/// processing times.
pub fn parse_lb_instance(text: &str) -> Result<LoadBalInstance, CliError> {
    let lines = content_lines(text);
    let (&(hline, header), rows) = lines
        .split_first()
        .ok_or_else(|| CliError::Parse("empty instance file".into()))?;
    let hdr: Vec<&str> = header.split_whitespace().collect();
    if hdr.len() != 2 {
        return Err(CliError::Parse(format!(
            "line {hline}: expected header \"m n\""
        )));
    }
    let m: usize = hdr[0]
        .parse()
        .map_err(|_| CliError::Parse(format!("line {hline}: malformed machine count")))?;
    let n: usize = hdr[1]
        .parse()
        .map_err(|_| CliError::Parse(format!("line {hline}: malformed job count")))?;
    if rows.len() != m {
        return Err(CliError::Parse(format!(
            "expected {m} machine rows, found {}",
            rows.len()
        )));
    }
    let mut p = Vec::with_capacity(m);
    for &(ln, row) in rows {
        let vals: Vec<R> = row
            .split_whitespace()
            .map(|t| numbered(ln, parse_rational(t)))
            .collect::<Result<_, _>>()?;
        if vals.len() != n {
            return Err(CliError::Parse(format!(
                "line {ln}: expected {n} entries, found {}",
                vals.len()
            )));
        }
        p.push(vals);
    }
    LoadBalInstance::new(m, n, p).map_err(|e| CliError::Parse(e.0))
}

/// Formats a load-balancing instance; inverse of [`parse_lb_instance`].
pub fn format_lb_instance(inst: &LoadBalInstance) -> String {
    let mut out = format!("{} {}\n", inst.m, inst.n);
    for row in &inst.p {
        let line: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a clustering instance: header "n k", then the full n×n symmetric
/// distance matrix.
pub fn parse_km_instance(text: &str) -> Result<ClusterInstance, CliError> {
    let lines = content_lines(text);
    let (&(hline, header), rows) = lines
        .split_first()
        .ok_or_else(|| CliError::Parse("empty instance file".into()))?;
    let hdr: Vec<&str> = header.split_whitespace().collect();
    if hdr.len() != 2 {
        return Err(CliError::Parse(format!(
            "line {hline}: expected header \"n k\""
        )));
    }
    let n: usize = hdr[0]
        .parse()
        .map_err(|_| CliError::Parse(format!("line {hline}: malformed point count")))?;
    let k: usize = hdr[1]
        .parse()
        .map_err(|_| CliError::Parse(format!("line {hline}: malformed facility budget")))?;
    if rows.len() != n {
        return Err(CliError::Parse(format!(
            "expected {n} matrix rows, found {}",
            rows.len()
        )));
    }
    let mut c = Vec::with_capacity(n);
    for &(ln, row) in rows {
        let vals: Vec<R> = row
            .split_whitespace()
            .map(|t| numbered(ln, parse_rational(t)))
            .collect::<Result<_, _>>()?;
        if vals.len() != n {
            return Err(CliError::Parse(format!(
                "line {ln}: expected {n} entries, found {}",
                vals.len()
            )));
        }
        c.push(vals);
    }
    ClusterInstance::new(n, c, k).map_err(|e| CliError::Parse(e.0))
}

/// Formats a clustering instance; inverse of [`parse_km_instance`].
pub fn format_km_instance(inst: &ClusterInstance) -> String {
    let mut out = format!("{} {}\n", inst.n, inst.k);
    for row in &inst.c {
        let line: Vec<String> = row.iter().map(format_rational).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a weight file: one number per line, non-increasing.
pub fn parse_weights(text: &str) -> Result<WeightVector, CliError> {
    let mut w = Vec::new();
    for (ln, line) in content_lines(text) {
        w.push(numbered(ln, parse_rational(line))?);
    }
    WeightVector::new(w).map_err(|e| CliError::Parse(e.0))
}

/// Formats a weight vector; inverse of [`parse_weights`].
pub fn format_weights(w: &WeightVector) -> String {
    let mut out = String::new();
    for v in &w.w {
        out.push_str(&format_rational(v));
        out.push('\n');
    }
    out
}

/// Parses a budget file: one line per budget, "B w_1 w_2 … w_d".
pub fn parse_budgets(text: &str, dim: usize) -> Result<BudgetSpec, CliError> {
    let mut weights = Vec::new();
    let mut budgets = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != dim + 1 {
            return Err(CliError::Parse(format!(
                "line {ln}: expected a budget followed by {dim} weights"
            )));
        }
        budgets.push(numbered(ln, parse_rational(toks[0]))?);
        let w: Vec<R> = toks[1..]
            .iter()
            .map(|t| numbered(ln, parse_rational(t)))
            .collect::<Result<_, _>>()?;
        weights.push(
            WeightVector::new(w).map_err(|e| CliError::Parse(format!("line {ln}: {}", e.0)))?,
        );
    }
    BudgetSpec::new(weights, budgets).map_err(|e| CliError::Parse(e.0))
}

/// Parses the norm DSL: `lp <p|inf>`, `topl <L>`, `ordered <path>`,
/// `maxord <path> [<path>...]`. Paths are read from disk; weight lengths are
/// checked against `dim`.
pub fn parse_norm(spec: &str, dim: usize) -> Result<NormSpec, CliError> {
    let toks: Vec<&str> = spec.split_whitespace().collect();
    let read = |path: &str| -> Result<WeightVector, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {path}: {e}")))?;
        let w = parse_weights(&text)?;
        if w.len() != dim {
            return Err(CliError::Parse(format!(
                "{path}: expected {dim} weights, found {}",
                w.len()
            )));
        }
        Ok(w)
    };
    match toks.as_slice() {
        ["lp", "inf"] => Ok(NormSpec::Lp(LpExponent::Inf)),
        ["lp", p] => {
            let p: f64 = p
                .parse()
                .map_err(|_| CliError::Parse(format!("malformed lp exponent {p:?}")))?;
            if p < 1.0 {
                return Err(CliError::Parse("lp exponent must be at least 1".into()));
            }
            Ok(NormSpec::Lp(LpExponent::Finite(p)))
        }
        ["topl", l] => {
            let l: usize = l
                .parse()
                .map_err(|_| CliError::Parse(format!("malformed topl index {l:?}")))?;
            if l == 0 || l > dim {
                return Err(CliError::Parse(format!(
                    "topl index {l} out of range 1..={dim}"
                )));
            }
            Ok(NormSpec::TopL(l))
        }
        ["ordered", path] => Ok(NormSpec::Ordered(read(path)?)),
        ["maxord", paths @ ..] if !paths.is_empty() => Ok(NormSpec::MaxOrdered(
            paths.iter().map(|p| read(p)).collect::<Result<_, _>>()?,
        )),
        _ => Err(CliError::Parse(format!(
            "malformed norm spec {spec:?}: expected lp/topl/ordered/maxord"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

/// Exact optimum of a norm objective over all assignments, by exhaustive
/// enumeration. Guarded at mⁿ ≤ 10⁷; ties go to the lowest assignment code.
pub fn brute_force_lb(
    inst: &LoadBalInstance,
    f: &NormSpec,
) -> Result<(R, Assignment), CliError> {
    let total = (inst.m as u128)
        .checked_pow(inst.n as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| {
            CliError::SizeGuard(format!(
                "brute force refused: {}^{} assignments exceed 10^7",
                inst.m, inst.n
            ))
        })?;
    let mut best: Option<(R, Assignment)> = None;
    for code in 0..total {
        let mut c = code;
        let mut sigma = Vec::with_capacity(inst.n);
        for _ in 0..inst.n {
            sigma.push((c % inst.m as u128) as usize);
            c /= inst.m as u128;
        }
        let a = Assignment { sigma };
        let val = norm_eval(f, &load_vector(inst, &a))?;
        if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
            best = Some((val, a));
        }
    }
    Ok(best.expect("at least one assignment exists"))
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exact optimum of a norm objective over all k-subsets of facilities.
/// Guarded at C(n,k) ≤ 10⁷; ties go to the lexicographically smallest set.
pub fn brute_force_km(
    inst: &ClusterInstance,
    f: &NormSpec,
) -> Result<(R, Vec<usize>), CliError> {
    if binomial(inst.n, inst.k) > 10_000_000 {
        return Err(CliError::SizeGuard(format!(
            "brute force refused: C({},{}) subsets exceed 10^7",
            inst.n, inst.k
        )));
    }
    let mut best: Option<(R, Vec<usize>)> = None;
    let mut cur: Vec<usize> = (0..inst.k).collect();
    loop {
        let val = norm_eval(f, &assign_cost_vector(inst, &cur)?)?;
        if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
            best = Some((val, cur.clone()));
        }
        // Next k-combination of 0..n in lexicographic order.
        let mut i = inst.k;
        loop {
            if i == 0 {
                return Ok(best.expect("at least one subset exists"));
            }
            i -= 1;
            if cur[i] != i + inst.n - inst.k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..inst.k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

/// Structured result of one solver run. The objective value always equals
/// the exact recomputation from the solution and the instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    /// Problem kind: "lb" or "km".
    pub kind: String,
    /// Objective description, e.g. "topl 2" or "minmax 3 weights".
    pub objective: String,
    /// The solution: machine per job, or open facilities, space-separated.
    pub solution: String,
    /// The induced cost vector.
    pub costs: CostVector,
    /// Exact objective value recomputed from the solution.
    pub value: R,
    /// Certified approximation bound for this run, when one applies.
    pub bound: Option<R>,
    /// value / brute-force optimum, when `--oracle` ran and the optimum is
    /// positive (1 when both are zero).
    pub ratio: Option<R>,
    /// Per-guess / per-weight diagnostics.
    pub diagnostics: Vec<String>,
    /// Wall-clock milliseconds (excluded from the deterministic rendering).
    pub wall_ms: u128,
}

impl RunReport {
    /// Line-oriented rendering: `key: value` pairs plus a single
    /// machine-readable line. Deterministic unless `include_wall` is set.
    pub fn render(&self, include_wall: bool) -> String {
        let costs: Vec<String> = self.costs.iter().map(format_rational).collect();
        let costs = costs.join(" ");
        let value = format_rational(&self.value);
        let bound = self
            .bound
            .as_ref()
            .map_or_else(|| "none".to_string(), format_rational);
        let ratio = self
            .ratio
            .as_ref()
            .map_or_else(|| "none".to_string(), format_rational);
        let mut out = String::new();
        writeln!(out, "kind: {}", self.kind).unwrap();
        writeln!(out, "objective: {}", self.objective).unwrap();
        writeln!(out, "solution: {}", self.solution).unwrap();
        writeln!(out, "costs: {costs}").unwrap();
        writeln!(out, "value: {value}").unwrap();
        writeln!(out, "bound: {bound}").unwrap();
        writeln!(out, "ratio: {ratio}").unwrap();
        for d in &self.diagnostics {
            writeln!(out, "diag: {d}").unwrap();
        }
        writeln!(
            out,
            "machine: {}|{}|{}|{}|{}|{}|{}",
            self.kind, self.objective, self.solution, costs, value, bound, ratio
        )
        .unwrap();
        if include_wall {
            writeln!(out, "wall_ms: {}", self.wall_ms).unwrap();
        }
        out
    }
}

/// Objective selected on the command line.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `--topl L`
    TopL(usize),
    /// `--ordered FILE`
    Ordered(WeightVector),
    /// `--minmax FILE...`
    MinMax(Vec<WeightVector>),
    /// `--norm SPEC`
    Norm(NormSpec),
    /// `--budget FILE`
    Budget(BudgetSpec),
    /// `--simul`
    Simul,
}

/// Everything a solver run needs besides the instance.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Selected objective.
    pub objective: Objective,
    /// ε for ordered / min-norm / simultaneous solvers.
    pub eps: R,
    /// δ for the min-max / multi-budget load-balancing solvers.
    pub delta: R,
    /// RNG seed (recorded; current solvers are fully deterministic).
    pub seed: u64,
    /// Arithmetic mode for LP solves.
    pub mode: Mode,
    /// Also run the brute-force oracle and report the ratio.
    pub oracle: bool,
    /// Advisory parallelism degree (recorded; solver stages run guess-lists
    /// sequentially in this build).
    pub jobs: usize,
}

fn oracle_norm(obj: &Objective, dim: usize) -> Option<NormSpec> {
    match obj {
        Objective::TopL(l) => Some(NormSpec::TopL(*l)),
        Objective::Ordered(w) => Some(NormSpec::Ordered(w.clone())),
        Objective::MinMax(ws) => Some(NormSpec::MaxOrdered(ws.clone())),
        Objective::Norm(f) => Some(f.clone()),
        Objective::Budget(_) | Objective::Simul => {
            let _ = dim;
            None
        }
    }
}

fn ratio_against(value: &R, opt: &R, diags: &mut Vec<String>) -> Option<R> {
    if opt.is_positive() {
        Some(value / opt)
    } else if value.is_zero() {
        Some(R::one())
    } else {
        diags.push("oracle optimum is zero; ratio undefined".into());
        None
    }
}

fn objective_label(obj: &Objective) -> String {
    match obj {
        Objective::TopL(l) => format!("topl {l}"),
        Objective::Ordered(_) => "ordered".into(),
        Objective::MinMax(ws) => format!("minmax {} weights", ws.len()),
        Objective::Norm(f) => match f {
            NormSpec::Lp(LpExponent::Inf) => "norm lp inf".into(),
            NormSpec::Lp(LpExponent::Finite(p)) => format!("norm lp {p}"),
            NormSpec::TopL(l) => format!("norm topl {l}"),
            NormSpec::Ordered(_) => "norm ordered".into(),
            NormSpec::MaxOrdered(ws) => format!("norm maxord {} weights", ws.len()),
        },
        Objective::Budget(spec) => format!("budget {} rows", spec.budgets.len()),
        Objective::Simul => "simul".into(),
    }
}

fn check_weight_dim(w: &WeightVector, dim: usize) -> Result<(), CliError> {
    if w.len() != dim {
        return Err(CliError::Parse(format!(
            "expected {dim} weights, found {}",
            w.len()
        )));
    }
    Ok(())
}

fn join_indices(xs: &[usize]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs the selected solver on a load-balancing instance.
pub fn run_lb(inst: &LoadBalInstance, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = std::time::Instant::now();
    let mut diags = vec![
        format!("seed: {}", opts.seed),
        format!("jobs: {}", opts.jobs),
        format!(
            "mode: {}",
            if opts.mode == Mode::Exact { "exact-rational" } else { "float" }
        ),
    ];
    let m = inst.m;
    let problem = Problem::LoadBal(inst);
    let five = rat(5);
    let (sigma, value, bound): (Assignment, R, Option<R>) = match &opts.objective {
        Objective::TopL(l) => {
            let a = solve_topl_lb(inst, *l, opts.mode)?;
            let v = norm_eval(&NormSpec::TopL(*l), &load_vector(inst, &a))?;
            (a, v, Some(rat(2)))
        }
        Objective::Ordered(w) => {
            check_weight_dim(w, m)?;
            let a = solve_ordered_lb(inst, w, &opts.eps, opts.mode)?;
            let v = norm_eval(&NormSpec::Ordered(w.clone()), &load_vector(inst, &a))?;
            (a, v, Some(rat(2) + &opts.eps))
        }
        Objective::MinMax(ws) => {
            for w in ws {
                check_weight_dim(w, m)?;
            }
            let a = solve_minmax_ordered_lb(inst, ws, &opts.delta, opts.mode)?;
            let v = norm_eval(&NormSpec::MaxOrdered(ws.clone()), &load_vector(inst, &a))?;
            (a, v, Some(rat(38) * (R::one() + &opts.delta)))
        }
        Objective::Norm(f) => {
            if let NormSpec::Ordered(w) = f {
                check_weight_dim(w, m)?;
            }
            let a = solve_minnorm_lb(inst, f, &opts.eps, opts.mode)?;
            let v = norm_eval(f, &load_vector(inst, &a))?;
            (a, v, Some(rat(38) * (R::one() + &five * &opts.eps)))
        }
        Objective::Budget(spec) => {
            let rho = multibudget_rho(&problem, &opts.delta);
            let sol = solve_multibudget(&problem, spec, &opts.delta, opts.mode)?
                .ok_or_else(|| {
                    CliError::Infeasible("no solution: budgets are not jointly satisfiable".into())
                })?;
            let Solution::Assignment(a) = sol else {
                unreachable!("load-balancing problems yield assignments");
            };
            let loads = load_vector(inst, &a);
            let mut worst = R::zero();
            for (i, (w, b)) in spec.weights.iter().zip(&spec.budgets).enumerate() {
                let obj = norm_eval(&NormSpec::Ordered(w.clone()), &loads)?;
                diags.push(format!(
                    "budget {}: cost {} of {}",
                    i + 1,
                    format_rational(&obj),
                    format_rational(b)
                ));
                if obj > worst {
                    worst = obj;
                }
            }
            (a, worst, Some(rho))
        }
        Objective::Simul => {
            let (sol, afac) = solve_simultaneous(&problem, &opts.eps, opts.mode)?;
            let Solution::Assignment(a) = sol else {
                unreachable!("load-balancing problems yield assignments");
            };
            let rho = multibudget_rho(&problem, &R::one());
            let base = R::one() + &opts.eps;
            diags.push(format!("fairness factor A: {}", format_rational(&afac)));
            let bound = &rho * &base * &base * &afac;
            let v = norm_eval(&NormSpec::Lp(LpExponent::Finite(1.0)), &load_vector(inst, &a))?;
            (a, v, Some(bound))
        }
    };
    let costs = load_vector(inst, &sigma);
    let mut ratio = None;
    if opts.oracle {
        if let Some(f) = oracle_norm(&opts.objective, m) {
            let (opt, _) = brute_force_lb(inst, &f)?;
            diags.push(format!("oracle optimum: {}", format_rational(&opt)));
            ratio = ratio_against(&value, &opt, &mut diags);
        } else {
            diags.push("oracle unavailable for this objective".into());
        }
    }
    Ok(RunReport {
        kind: "lb".into(),
        objective: objective_label(&opts.objective),
        solution: join_indices(&sigma.sigma),
        costs,
        value,
        bound,
        ratio,
        diagnostics: diags,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Runs the selected solver on a clustering instance.
pub fn run_km(inst: &ClusterInstance, opts: &RunOptions) -> Result<RunReport, CliError> {
    let start = std::time::Instant::now();
    let mut diags = vec![
        format!("seed: {}", opts.seed),
        format!("jobs: {}", opts.jobs),
        format!(
            "mode: {}",
            if opts.mode == Mode::Exact { "exact-rational" } else { "float" }
        ),
    ];
    let n = inst.n;
    let problem = Problem::Cluster(inst);
    // Certified ordered bound: (1+ε/12)(5 + 2ε/5) when the 5+ε certificates
    // fire on every guess, (1+ε/12)(9 + ε/5) otherwise.
    let ordered_bound = |eps: &R, certified: bool| -> R {
        let lead = R::one() + eps / rat(12);
        if certified {
            lead * (rat(5) + rat(2) * eps / rat(5))
        } else {
            lead * (rat(9) + eps / rat(5))
        }
    };
    let ordered_run = |w: &WeightVector, diags: &mut Vec<String>| -> Result<_, CliError> {
        let res = solve_ordered_km(inst, w, &opts.eps)?;
        diags.push(format!(
            "five-certified: {}",
            if res.five_certified { "yes" } else { "no" }
        ));
        let bound = ordered_bound(&opts.eps, res.five_certified);
        Ok((res.facilities, bound))
    };
    let (fset, value, bound): (Vec<usize>, R, Option<R>) = match &opts.objective {
        Objective::TopL(l) => {
            let w = topl_indicator(*l, n)?;
            let (f, b) = ordered_run(&w, &mut diags)?;
            let v = norm_eval(&NormSpec::TopL(*l), &assign_cost_vector(inst, &f)?)?;
            (f, v, Some(b))
        }
        Objective::Ordered(w) => {
            check_weight_dim(w, n)?;
            let (f, b) = ordered_run(w, &mut diags)?;
            let v = norm_eval(&NormSpec::Ordered(w.clone()), &assign_cost_vector(inst, &f)?)?;
            (f, v, Some(b))
        }
        Objective::MinMax(ws) => {
            for w in ws {
                check_weight_dim(w, n)?;
            }
            let f = solve_minmax_ordered_km(inst, ws, &opts.eps, opts.mode)?;
            let v = norm_eval(&NormSpec::MaxOrdered(ws.clone()), &assign_cost_vector(inst, &f)?)?;
            (f, v, Some(rat(408) * (R::one() + &opts.eps)))
        }
        Objective::Norm(f) => {
            if let NormSpec::Ordered(w) = f {
                check_weight_dim(w, n)?;
            }
            let fset = solve_minnorm_cluster(inst, f, &opts.eps, opts.mode)?;
            let v = norm_eval(f, &assign_cost_vector(inst, &fset)?)?;
            let b = rat(408) * (R::one() + &opts.eps) * (R::one() + rat(3) * &opts.eps);
            (fset, v, Some(b))
        }
        Objective::Budget(spec) => {
            let rho = multibudget_rho(&problem, &opts.delta);
            let sol = solve_multibudget(&problem, spec, &opts.delta, opts.mode)?
                .ok_or_else(|| {
                    CliError::Infeasible("no solution: budgets are not jointly satisfiable".into())
                })?;
            let Solution::Facilities(f) = sol else {
                unreachable!("clustering problems yield facility sets");
            };
            let costs = assign_cost_vector(inst, &f)?;
            let mut worst = R::zero();
            for (i, (w, b)) in spec.weights.iter().zip(&spec.budgets).enumerate() {
                let obj = norm_eval(&NormSpec::Ordered(w.clone()), &costs)?;
                diags.push(format!(
                    "budget {}: cost {} of {}",
                    i + 1,
                    format_rational(&obj),
                    format_rational(b)
                ));
                if obj > worst {
                    worst = obj;
                }
            }
            (f, worst, Some(rho))
        }
        Objective::Simul => {
            let (sol, afac) = solve_simultaneous(&problem, &opts.eps, opts.mode)?;
            let Solution::Facilities(f) = sol else {
                unreachable!("clustering problems yield facility sets");
            };
            let rho = multibudget_rho(&problem, &R::one());
            let base = R::one() + &opts.eps;
            diags.push(format!("fairness factor A: {}", format_rational(&afac)));
            let bound = &rho * &base * &base * &afac;
            let v = norm_eval(&NormSpec::Lp(LpExponent::Finite(1.0)), &assign_cost_vector(inst, &f)?)?;
            (f, v, Some(bound))
        }
    };
    let costs = assign_cost_vector(inst, &fset)?;
    let mut ratio = None;
    if opts.oracle {
        if let Some(f) = oracle_norm(&opts.objective, n) {
            let (opt, _) = brute_force_km(inst, &f)?;
            diags.push(format!("oracle optimum: {}", format_rational(&opt)));
            ratio = ratio_against(&value, &opt, &mut diags);
        } else {
            diags.push("oracle unavailable for this objective".into());
        }
    }
    Ok(RunReport {
        kind: "km".into(),
        objective: objective_label(&opts.objective),
        solution: join_indices(&fset),
        costs,
        value,
        bound,
        ratio,
        diagnostics: diags,
        wall_ms: start.elapsed().as_millis(),
    })
}
