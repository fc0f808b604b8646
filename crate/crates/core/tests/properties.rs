use fermat_zeta::arith::units;
use fermat_zeta::cache::{Cache, CacheKey};
use fermat_zeta::equidist::{discrepancy, discrepancy_brute, koksma_check, BVFunction, PointSample};
use fermat_zeta::ffield::field;
use fermat_zeta::orbit::{g_d, is_circ, scale};
use fermat_zeta::{CycElement, JacobiEngine, Lambda, Limits};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn cyc(m: usize) -> impl Strategy<Value = CycElement> {
    prop::collection::vec(-9i64..=9, m)
        .prop_map(move |c| CycElement::from_coeffs(m, c.into_iter().map(BigInt::from).collect()).unwrap())
}

fn cyc_pair() -> impl Strategy<Value = (CycElement, CycElement, i64)> {
    (2usize..=16).prop_flat_map(|m| {
        let us: Vec<i64> = units(m as u64).into_iter().map(|u| u as i64).collect();
        (cyc(m), cyc(m), prop::sample::select(us))
    })
}

fn sample() -> impl Strategy<Value = PointSample> {
    prop::collection::vec((0i64..=60, 1i64..=60), 1..30).prop_map(|v| {
        let pts: Vec<(i64, i64)> = v.into_iter().map(|(n, d)| (n % (d + 1), d)).collect();
        PointSample::from_fractions(&pts).unwrap()
    })
}

fn bv() -> impl Strategy<Value = BVFunction> {
    prop::collection::btree_set(1i64..32, 0..5).prop_flat_map(|inner| {
        let mut breaks = vec![BigRational::from_integer(0.into())];
        breaks.extend(inner.iter().map(|&k| BigRational::new(k.into(), 32.into())));
        breaks.push(BigRational::from_integer(1.into()));
        let n = breaks.len();
        prop::collection::vec(-12i64..=12, n).prop_map(move |vals| {
            let values = vals.into_iter().map(|v| BigRational::new(v.into(), 5.into())).collect();
            BVFunction::new(breaks.clone(), values).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn galois_is_a_ring_map((x, y, t) in cyc_pair()) {
        let lhs = x.mul(&y).unwrap().galois_apply(t).unwrap();
        let rhs = x.galois_apply(t).unwrap().mul(&y.galois_apply(t).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let sum = x.add(&y).unwrap().galois_apply(t).unwrap();
        prop_assert_eq!(sum, x.galois_apply(t).unwrap().add(&y.galois_apply(t).unwrap()).unwrap());
    }

    #[test]
    fn embedding_commutes_with_products((x, y, _t) in cyc_pair(), k in 1usize..4) {
        let m2 = x.conductor() * k;
        let lhs = x.mul(&y).unwrap().embed(m2).unwrap();
        let rhs = x.embed(m2).unwrap().mul(&y.embed(m2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_norm_is_real((x, _y, _t) in cyc_pair()) {
        let n = x.mul(&x.conj()).unwrap();
        prop_assert_eq!(n.conj(), n);
    }

    #[test]
    fn field_logs_add(pn in prop::sample::select(vec![(2u64, 6u32), (3, 4), (5, 2), (7, 3)]), a in 1u64..10_000, b in 1u64..10_000) {
        let f = field(pn.0, pn.1, 1 << 22).unwrap();
        let n = f.size() - 1;
        let (x, y) = (f.pow_gen(a % n), f.pow_gen(b % n));
        prop_assert_eq!(f.dlog(f.mul(x, y)).unwrap(), (a + b) % n);
        // (x + y) y^{-1} = x y^{-1} + 1
        let yinv = f.pow_gen((n - b % n) % n);
        prop_assert_eq!(f.mul(f.add(x, y), yinv), f.add(f.mul(x, yinv), f.pow_gen(0)));
    }

    #[test]
    fn discrepancy_matches_scan(s in sample()) {
        prop_assert_eq!(discrepancy(&s), discrepancy_brute(&s));
    }

    #[test]
    fn koksma_holds(f in bv(), s in sample()) {
        prop_assert!(koksma_check(&f, &s).holds);
    }

    #[test]
    fn cache_round_trip((x, _y, _t) in cyc_pair(), a in prop::array::uniform4(0u64..20)) {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey { p: 2, q: 4, d_a: x.conductor() as u64, a };
        cache.put(&key, &x).unwrap();
        prop_assert_eq!(cache.get(&key), Some(x));
    }

    #[test]
    fn lambda_descriptions_parse(gens in prop::collection::vec(prop::array::uniform4(0u64..30), 1..4)) {
        let l = Lambda::Subgroup(gens);
        prop_assert_eq!(Lambda::parse(&l.describe()).unwrap().describe(), l.describe());
    }
}

#[test]
fn jacobi_sums_are_unit_equivariant() {
    let engine = JacobiEngine::new(Limits::default(), None);
    for (q, d) in [(2u64, 9u64), (3, 8), (4, 5)] {
        for a in g_d(d).filter(is_circ).take(40) {
            let (v, _) = engine.value(q, d, &a).unwrap();
            for t in units(d) {
                let (w, _) = engine.value(q, d, &scale(t, d, &a)).unwrap();
                let da = v.conductor() as u64;
                assert_eq!(v.galois_apply((t % da) as i64).unwrap(), w, "q={q} d={d} a={a:?} t={t}");
            }
        }
    }
}

#[test]
fn engine_values_survive_a_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cold = JacobiEngine::new(Limits::default(), Some(Cache::new(dir.path())));
    let tuples: Vec<_> = g_d(7).filter(is_circ).take(30).collect();
    let first: Vec<_> = tuples.iter().map(|a| cold.value(2, 7, a).unwrap().0).collect();
    let warm = JacobiEngine::new(Limits::default(), Some(Cache::new(dir.path())));
    let second: Vec<_> = tuples.iter().map(|a| warm.value(2, 7, a).unwrap().0).collect();
    assert_eq!(first, second);
    let (hits, _) = warm.cache_stats();
    assert!(hits > 0);
}
