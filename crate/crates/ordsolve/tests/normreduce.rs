use num::{One, Signed, Zero};
use ordsolve::model::*;
use ordsolve::normreduce::*;
use ordsolve::sparsify::position_set;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn rv(xs: &[i64]) -> Vec<R> {
    xs.iter().map(|&x| rat(x)).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    loop {
        let mut w: Vec<R> = (0..n)
            .map(|_| ratio(rng.gen_range(0..20), rng.gen_range(1..4)))
            .collect();
        w.sort_by(|a, b| b.cmp(a));
        if w[0].is_positive() {
            return WeightVector::new(w).unwrap();
        }
    }
}

/// Independent oracle for ordered-norm balls: the vertices of
/// {y₁ ≥ … ≥ y_n ≥ 0 : Σᵢ wᵢyᵢ ≤ 1} are the scaled prefix indicators, so
/// Bopt(c) = max_s (Σ_{i≤s} c↓ᵢ) / (Σ_{i≤s} wᵢ).
fn block_formula(c: &[R], w: &WeightVector) -> R {
    let cd = sorted_desc(c);
    let mut best = R::zero();
    let mut pc = R::zero();
    let mut pw = R::zero();
    for i in 0..c.len() {
        pc += &cd[i];
        pw += w.get1(i + 1);
        if pw.is_positive() {
            let val = &pc / &pw;
            if val > best {
                best = val;
            }
        }
    }
    best
}

#[test]
fn ball_opt_examples() {
    // ℓ₂ dual of (3,4) is 5.
    let (v, x) = ball_opt(&NormSpec::Lp(LpExponent::Finite(2.0)), &rv(&[3, 4])).unwrap();
    assert_eq!(v, rat(5));
    let fx = norm_eval(&NormSpec::Lp(LpExponent::Finite(2.0)), &x).unwrap();
    assert!(fx <= R::one() + ratio(1, 1_000_000_000));

    // Top-1 ball is the box: optimum Σc at the all-ones point.
    let (v, x) = ball_opt(&NormSpec::TopL(1), &rv(&[2, 1, 1])).unwrap();
    assert_eq!(v, rat(4));
    assert_eq!(x, rv(&[1, 1, 1]));

    // Ordered norm evaluated on its own weights: Bopt(w) = 1.
    let w = WeightVector::new(rv(&[3, 2, 2, 1])).unwrap();
    let c = w.w.clone();
    let (v, _) = ball_opt(&NormSpec::Ordered(w), &c).unwrap();
    assert_eq!(v, R::one());

    // ℓ∞ ball is [0,1]^n.
    let (v, x) = ball_opt(&NormSpec::Lp(LpExponent::Inf), &rv(&[5, 2])).unwrap();
    assert_eq!(v, rat(7));
    assert_eq!(x, rv(&[1, 1]));

    // ℓ₁ dual is ℓ∞: mass on the largest coordinate.
    let (v, x) = ball_opt(&NormSpec::Lp(LpExponent::Finite(1.0)), &rv(&[2, 6, 3])).unwrap();
    assert_eq!(v, rat(6));
    assert_eq!(x, rv(&[0, 1, 0]));
}

#[test]
fn ball_opt_matches_block_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..60 {
        let n = rng.gen_range(1..=6);
        let c: Vec<R> = (0..n)
            .map(|_| ratio(rng.gen_range(0..20), rng.gen_range(1..4)))
            .collect();
        let w = random_weights(&mut rng, n);
        let (v, x) = ball_opt(&NormSpec::Ordered(w.clone()), &c).unwrap();
        assert_eq!(v, block_formula(&c, &w));
        // The returned point is feasible and attains the value.
        assert!(ordered_cost(&w, &x).unwrap() <= R::one());
        let cx: R = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert_eq!(cx, v);

        // Top-ℓ agrees with the block formula for the 0/1 prefix weights.
        let l = rng.gen_range(1..=n);
        let mut tw = vec![R::one(); l];
        tw.resize(n, R::zero());
        let tw = WeightVector::new(tw).unwrap();
        let (v, _) = ball_opt(&NormSpec::TopL(l), &c).unwrap();
        assert_eq!(v, block_formula(&c, &tw));
    }
}

/// Exact solve of a square rational system by Gaussian elimination.
fn solve_square(a: &[Vec<R>], b: &[R]) -> Option<Vec<R>> {
    let n = b.len();
    let mut m: Vec<Vec<R>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for cidx in 0..=n {
                    let delta = &f * &m[col][cidx];
                    m[r][cidx] = &m[r][cidx] - delta;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

#[test]
fn ball_opt_maxordered_vs_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let rcount = rng.gen_range(1..=2);
        let ws: Vec<WeightVector> = (0..rcount).map(|_| random_weights(&mut rng, n)).collect();
        let c: Vec<R> = (0..n).map(|_| rat(rng.gen_range(0..10))).collect();
        let (got, _) = ball_opt(&NormSpec::MaxOrdered(ws.clone()), &c).unwrap();

        // Exhaustive vertex enumeration in the sorted space: rows are the
        // member norms (= 1), monotone ties (yᵢ = yᵢ₊₁), and zeros (yᵢ = 0).
        let cd = sorted_desc(&c);
        let mut rows: Vec<(Vec<R>, R)> = Vec::new();
        for w in &ws {
            rows.push((w.w.clone(), R::one()));
        }
        for i in 0..n.saturating_sub(1) {
            let mut r = vec![R::zero(); n];
            r[i] = R::one();
            r[i + 1] = -R::one();
            rows.push((r, R::zero()));
        }
        for i in 0..n {
            let mut r = vec![R::zero(); n];
            r[i] = R::one();
            rows.push((r, R::zero()));
        }
        let mut best = R::zero(); // y = 0 is always feasible.
        let ridx: Vec<usize> = (0..rows.len()).collect();
        let mut pick = vec![0usize; n];
        fn combos(idx: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for p in start..idx.len() {
                cur.push(idx[p]);
                combos(idx, k, p + 1, cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        pick.clear();
        combos(&ridx, n, 0, &mut pick, &mut all);
        for combo in all {
            let a: Vec<Vec<R>> = combo.iter().map(|&r| rows[r].0.clone()).collect();
            let b: Vec<R> = combo.iter().map(|&r| rows[r].1.clone()).collect();
            let Some(y) = solve_square(&a, &b) else { continue };
            // Feasibility: monotone, nonnegative, all member norms ≤ 1.
            if y.windows(2).any(|p| p[0] < p[1]) || y.iter().any(|v| v.is_negative()) {
                continue;
            }
            if ws
                .iter()
                .any(|w| w.w.iter().zip(&y).map(|(a, b)| a * b).sum::<R>() > R::one())
            {
                continue;
            }
            let val: R = cd.iter().zip(&y).map(|(a, b)| a * b).sum();
            if val > best {
                best = val;
            }
        }
        assert_eq!(got, best);
    }
}

#[test]
fn nondec_counting_bound() {
    // Exhaustive count of non-decreasing k-sequences over {0..N} vs the
    // (2e)^{max{N,k}} bound.
    for n_range in 0..=6usize {
        for k in 1..=5usize {
            let mut count = 0usize;
            let mut seq = vec![0usize; k];
            loop {
                count += 1;
                match (0..k).rev().find(|&i| seq[i] < n_range) {
                    Some(i) => {
                        seq[i] += 1;
                        let v = seq[i];
                        for q in i + 1..k {
                            seq[q] = v;
                        }
                    }
                    None => break,
                }
            }
            assert!((count as f64) <= nondec_bound(n_range, k));
        }
    }
}

#[test]
fn ordered_subgradient_property() {
    // For f = Ordered(w), the subgradient at x ≥ 0 is w permuted to x's
    // order: σᵀx = f(x) and σᵀy ≤ f(y) for all y ≥ 0.
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let n = rng.gen_range(1..=7);
        let w = random_weights(&mut rng, n);
        let f = NormSpec::Ordered(w.clone());
        let x: Vec<R> = (0..n).map(|_| rat(rng.gen_range(0..15))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| x[b].cmp(&x[a]));
        let mut sg = vec![R::zero(); n];
        for (rank, &i) in order.iter().enumerate() {
            sg[i] = w.get1(rank + 1);
        }
        let sx: R = sg.iter().zip(&x).map(|(a, b)| a * b).sum();
        assert_eq!(sx, norm_eval(&f, &x).unwrap());
        for _ in 0..5 {
            let y: Vec<R> = (0..n).map(|_| rat(rng.gen_range(0..15))).collect();
            let sy: R = sg.iter().zip(&y).map(|(a, b)| a * b).sum();
            assert!(sy <= norm_eval(&f, &y).unwrap());
        }
    }
}

fn e1_norm(f: &NormSpec, n: usize) -> R {
    let mut e1 = vec![R::zero(); n];
    e1[0] = R::one();
    norm_eval(f, &e1).unwrap()
}

#[test]
fn normredn_inequalities() {
    let n = 6usize;
    let eps = ratio(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let norms: Vec<NormSpec> = vec![
        NormSpec::Lp(LpExponent::Finite(2.0)),
        NormSpec::Lp(LpExponent::Inf),
        NormSpec::TopL(2),
        NormSpec::Ordered(random_weights(&mut rng, n)),
    ];
    for f in &norms {
        let fe1 = e1_norm(f, n);
        let bounds = Bounds::new(rat(4), fe1.clone(), fe1).unwrap();
        let coll = build_weight_collection(f, &eps, &bounds, n).unwrap();
        assert!(!coll.weights.is_empty());
        let low = &bounds.lb / (rat(n as i64) * &bounds.high);
        let float_norm = matches!(f, NormSpec::Lp(LpExponent::Finite(p)) if *p != 1.0);
        let slack = if float_norm { ratio(1, 1_000_000) } else { R::zero() };
        for _ in 0..100 {
            let v: Vec<R> = (0..n)
                .map(|_| ratio(rng.gen_range(0..40), rng.gen_range(1..3)))
                .collect();
            let fv = norm_eval(f, &v).unwrap();
            let maxobj = coll
                .weights
                .iter()
                .map(|w| ordered_cost(w, &v).unwrap())
                .max()
                .unwrap();
            // (i) max_W obj(w;v) ≤ max{κ(1+ε)f(v), (lb/(n·high))·Σvᵢ}.
            let sum_v: R = v.iter().sum();
            let cap_a = (R::one() + &eps) * &fv;
            let cap_b = &low * &sum_v;
            let cap = if cap_a > cap_b { cap_a } else { cap_b };
            assert!(
                maxobj <= &cap * (R::one() + &slack),
                "part (i) violated: {maxobj} > {cap}"
            );
            // (ii) f(v) ≤ (1−ε)⁻¹·max_W obj(w;v).
            let rhs = &maxobj / (R::one() - &eps);
            assert!(
                fv <= &rhs * (R::one() + &slack),
                "part (ii) violated: {fv} > {rhs}"
            );
        }
    }
}

#[test]
fn build_contains_power_expansion_of_itself() {
    // An ordered norm whose weights already form a power-of-(1+ε) expansion
    // on POS with Bopt = 1 must survive the oracle filter.
    let n = 6usize;
    let eps = ratio(1, 2);
    let base = R::one() + &eps;
    let p = position_set(n, &eps).unwrap();
    // u over POS {1,2,3,4,6}: powers 1.5^2, 1.5^1, 1.5^0, 1.5^0, 1.5^-1.
    let us = [
        &base * &base,
        base.clone(),
        R::one(),
        R::one(),
        R::one() / &base,
    ];
    let mut w = Vec::with_capacity(n);
    for i in 1..=n {
        let idx = p.positions.iter().position(|&q| q >= i).unwrap();
        w.push(us[idx].clone());
    }
    let w = WeightVector::new(w).unwrap();
    let f = NormSpec::Ordered(w.clone());
    let fe1 = e1_norm(&f, n);
    let bounds = Bounds::new(rat(4), fe1.clone(), fe1).unwrap();
    let coll = build_weight_collection(&f, &eps, &bounds, n).unwrap();
    assert!(
        coll.weights.iter().any(|m| m.w == w.w),
        "self expansion missing from W"
    );
}

#[test]
fn build_single_dimension_and_sentinel() {
    let f = NormSpec::Lp(LpExponent::Inf);
    let bounds = Bounds::new(rat(2), R::one(), rat(3)).unwrap();
    let coll = build_weight_collection(&f, &ratio(1, 2), &bounds, 1).unwrap();
    // Every member is a single coordinate; the sentinel lb/(n·high) = 1/2 is
    // present; members pass the oracle band (Bopt(w) = w₁ for ℓ∞ on n=1).
    assert!(coll.weights.iter().any(|w| w.w == vec![ratio(1, 2)]));
    for w in &coll.weights {
        assert_eq!(w.len(), 1);
        if w.w[0] != ratio(1, 2) {
            assert!(w.w[0] >= ratio(1, 2) && w.w[0] <= ratio(3, 2));
        }
    }
}

#[test]
fn build_cardinality_within_enumeration_bound() {
    let n = 6usize;
    let eps = ratio(1, 2);
    let base = R::one() + &eps;
    let f = NormSpec::Lp(LpExponent::Inf);
    let bounds = Bounds::new(rat(4), R::one(), rat(6)).unwrap();
    let coll = build_weight_collection(&f, &eps, &bounds, n).unwrap();
    let p = position_set(n, &eps).unwrap();
    // u₁ power count over [lb/(n·high), ub(1+ε)).
    let low = &bounds.lb / (rat(n as i64) * &bounds.high);
    let hi = &bounds.ub * &base;
    let mut count_u1 = 0usize;
    let mut pw = R::one();
    while pw >= low {
        pw = pw / &base;
    }
    pw = pw * &base;
    while pw < hi {
        count_u1 += 1;
        pw = pw * &base;
    }
    // Exponent range.
    let lim = rat(n as i64) * &base / &eps;
    let mut jmax = 0usize;
    let mut q = R::one();
    while &q * &base <= lim {
        q = &q * &base;
        jmax += 1;
    }
    let bound =
        (count_u1 * p.positions.len()) as f64 * nondec_bound(jmax, p.positions.len()) + 1.0;
    assert!((coll.weights.len() as f64) <= bound);
}

#[test]
fn detect_zero_examples() {
    // Every job has a zero machine.
    let inst = LoadBalInstance::new(2, 2, vec![rv(&[0, 3]), rv(&[5, 0])]).unwrap();
    let a = detect_zero_loadbal(&inst).unwrap();
    assert_eq!(a.sigma, vec![0, 1]);
    assert_eq!(load_vector(&inst, &a), rv(&[0, 0]));
    // One job has no zero machine.
    let inst = LoadBalInstance::new(2, 2, vec![rv(&[0, 3]), rv(&[5, 1])]).unwrap();
    assert!(detect_zero_loadbal(&inst).is_none());

    // Two co-located pairs, k = 2: zero clustering exists.
    let c = vec![
        rv(&[0, 0, 4, 4]),
        rv(&[0, 0, 4, 4]),
        rv(&[4, 4, 0, 0]),
        rv(&[4, 4, 0, 0]),
    ];
    let inst = ClusterInstance::new(4, c.clone(), 2).unwrap();
    assert_eq!(detect_zero_cluster(&inst).unwrap(), vec![0, 2]);
    let inst = ClusterInstance::new(4, c, 1).unwrap();
    assert!(detect_zero_cluster(&inst).is_none());
}

#[test]
fn instance_bounds_bracket_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let norms = [NormSpec::Lp(LpExponent::Inf), NormSpec::TopL(2)];
    for _ in 0..30 {
        // Load balancing, m ≤ 3, n ≤ 4, entries 1..6 (nonzero instance).
        let m = rng.gen_range(2..=3);
        let nj = rng.gen_range(2..=4);
        let p: Vec<Vec<R>> = (0..m)
            .map(|_| (0..nj).map(|_| rat(rng.gen_range(1..6))).collect())
            .collect();
        let inst = LoadBalInstance::new(m, nj, p).unwrap();
        assert!(detect_zero_loadbal(&inst).is_none());
        for f in &norms {
            let b = loadbal_bounds(&inst, f).unwrap();
            // Exhaustive optimum over mⁿ assignments.
            let mut best: Option<(R, R)> = None; // (f value, max load)
            for code in 0..m.pow(nj as u32) {
                let mut c = code;
                let sigma: Vec<usize> = (0..nj)
                    .map(|_| {
                        let i = c % m;
                        c /= m;
                        i
                    })
                    .collect();
                let loads = load_vector(&inst, &Assignment { sigma });
                let fv = norm_eval(f, &loads).unwrap();
                let maxload = loads.iter().max().unwrap().clone();
                if best.as_ref().map_or(true, |(bf, _)| &fv < bf) {
                    best = Some((fv, maxload));
                }
            }
            let (opt, o1) = best.unwrap();
            assert!(b.lb <= opt && opt <= b.ub);
            assert!(o1 <= b.high);
        }
    }
    for _ in 0..20 {
        // Clustering on a random line metric, n ≤ 5.
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..n);
        let pos: Vec<i64> = {
            let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(0..20)).collect();
            v.sort_unstable();
            v.dedup();
            while v.len() < n {
                v.push(v.last().unwrap() + rng.gen_range(1..5));
            }
            v
        };
        let c: Vec<Vec<R>> = (0..n)
            .map(|i| (0..n).map(|j| rat((pos[i] - pos[j]).abs())).collect())
            .collect();
        let inst = ClusterInstance::new(n, c, k).unwrap();
        if detect_zero_cluster(&inst).is_some() {
            continue;
        }
        for f in &norms {
            let fok = match f {
                NormSpec::TopL(l) => *l <= n,
                _ => true,
            };
            if !fok {
                continue;
            }
            let b = cluster_bounds(&inst, f).unwrap();
            // Exhaustive optimum over all k-subsets.
            let mut best: Option<(R, R)> = None;
            for mask in 1u32..(1 << n) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let fset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let costs = assign_cost_vector(&inst, &fset).unwrap();
                let fv = norm_eval(f, &costs).unwrap();
                let c1 = costs.iter().max().unwrap().clone();
                if best.as_ref().map_or(true, |(bf, _)| &fv < bf) {
                    best = Some((fv, c1));
                }
            }
            let (opt, o1) = best.unwrap();
            assert!(b.lb <= opt && opt <= b.ub);
            assert!(o1 <= b.high);
        }
    }
}
