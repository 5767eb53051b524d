use num::One;
use ordsolve::model::*;
use ordsolve::sparsify::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn rv(xs: &[i64]) -> Vec<R> {
    xs.iter().map(|&x| rat(x)).collect()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let mut w: Vec<R> = (0..n)
        .map(|_| ratio(rng.gen_range(0..40), rng.gen_range(1..5)))
        .collect();
    w.sort_by(|a, b| b.cmp(a));
    WeightVector::new(w).unwrap()
}

#[test]
fn position_set_examples() {
    assert_eq!(position_set(8, &rat(1)).unwrap().positions, vec![1, 2, 4, 8]);
    assert_eq!(position_set(1, &ratio(1, 3)).unwrap().positions, vec![1]);
    assert_eq!(
        position_set(10, &ratio(1, 2)).unwrap().positions,
        vec![1, 2, 3, 4, 6, 8, 10]
    );
    assert!(position_set(5, &rat(0)).is_err());
    assert!(position_set(0, &rat(1)).is_err());
}

#[test]
fn position_set_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let n = rng.gen_range(1..=64);
        let delta = ratio(rng.gen_range(1..5), rng.gen_range(1..5));
        let p = position_set(n, &delta).unwrap();
        assert_eq!(p.positions[0], 1);
        assert_eq!(*p.positions.last().unwrap(), n);
        assert!(p.positions.windows(2).all(|w| w[0] < w[1]));
        // next map.
        assert_eq!(p.next(n), n + 1);
        assert_eq!(p.next(0), 1);
        // Ceiling fact: next(ℓ) − 1 ≤ (1+δ)·ℓ for ℓ ∈ POS.
        let base = R::one() + &delta;
        for &l in &p.positions {
            if l < n {
                let nx = p.next(l);
                assert!(rat((nx - 1) as i64) <= &base * rat(l as i64));
            }
        }
    }
}

#[test]
fn sparsify_examples() {
    let p = position_set(4, &rat(1)).unwrap();
    assert_eq!(p.positions, vec![1, 2, 4]);
    let w = WeightVector::new(rv(&[5, 4, 3, 2])).unwrap();
    assert_eq!(sparsify_weights(&w, &p).w, rv(&[5, 4, 2, 2]));

    let c = WeightVector::new(rv(&[3, 3, 3, 3])).unwrap();
    assert_eq!(sparsify_weights(&c, &p).w, c.w);

    let p8 = position_set(8, &rat(1)).unwrap();
    let w8 = WeightVector::new(rv(&[9, 7, 6, 5, 3, 2, 2, 1])).unwrap();
    assert_eq!(sparsify_weights(&w8, &p8).w, rv(&[9, 7, 5, 5, 1, 1, 1, 1]));
}

#[test]
fn sparsify_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=32);
        let delta = ratio(1, rng.gen_range(1..5));
        let p = position_set(n, &delta).unwrap();
        let w = random_weights(&mut rng, n);
        let tw = sparsify_weights(&w, &p);
        // tw ≤ w coordinate-wise, non-increasing, fixed on POS.
        for i in 1..=n {
            assert!(tw.get1(i) <= w.get1(i));
            if p.contains(i) {
                assert_eq!(tw.get1(i), w.get1(i));
            }
        }
        // Breakpoints of tw lie in POS.
        for i in 1..n {
            if tw.get1(i) != tw.get1(i + 1) {
                assert!(p.contains(i));
            }
        }
        // Idempotence.
        assert_eq!(sparsify_weights(&tw, &p).w, tw.w);
    }
}

#[test]
fn wsparse_inequalities_exact() {
    // obj(tw;v) ≤ obj(w;v) ≤ (1+δ)·obj(tw;v), exact rationals.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let n = rng.gen_range(1..=64);
        let delta = match rng.gen_range(0..3) {
            0 => rat(1),
            1 => ratio(1, 2),
            _ => ratio(1, 4),
        };
        let p = position_set(n, &delta).unwrap();
        let w = random_weights(&mut rng, n);
        let tw = sparsify_weights(&w, &p);
        let v: Vec<R> = (0..n)
            .map(|_| ratio(rng.gen_range(0..50), rng.gen_range(1..4)))
            .collect();
        let ow = ordered_cost(&w, &v).unwrap();
        let otw = ordered_cost(&tw, &v).unwrap();
        assert!(otw <= ow);
        assert!(ow <= (R::one() + &delta) * &otw);
        if delta == rat(1) {
            assert!(ow <= rat(2) * &otw);
        }
    }
}
