//! Stickelberger valuations, the weights `w_p`, and exact checks of the
//! trivial and refined lower bounds for special values.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{cyclic_subgroup, gcd, mult_order, pow_mod, prime_power, totient, units};
use crate::charsum::JacobiEngine;
use crate::cyclo::{CycElement, QPowRational};
use crate::error::{Error, Result};
use crate::orbit::{
    bad_set_count, g_d, in_g_d, is_circ, neg, orbits, scale, BadSetReport, BadThreshold, Lambda, Tuple,
};
use crate::zeta::ZetaFactorization;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn check_circ(d: u64, b: &Tuple) -> Result<()> {
    if !in_g_d(d, b) || !is_circ(b) {
        return Err(Error::NotInSet(b.to_vec()));
    }
    Ok(())
}

/// `<p>` inside `(Z/d)^x`.
pub fn p_subgroup(p: u64, d: u64) -> Result<Vec<u64>> {
    cyclic_subgroup(p % d, d)
}

fn stick_sum(b: &Tuple, d: u64, h: &[u64]) -> u64 {
    h.iter().map(|&pi| b.iter().map(|&x| x * pi % d).sum::<u64>()).sum()
}

/// `(1/|<p>|) sum_pi (3 - sum_i <b_i pi / d>)`, a rational in `[0, 2]`.
pub fn stickelberger_valuation(b: &Tuple, d: u64, p: u64) -> Result<BigRational> {
    check_circ(d, b)?;
    let h = p_subgroup(p, d)?;
    let s = stick_sum(b, d, &h);
    let n = h.len() as i64;
    let d = d as i64;
    Ok(rat(3 * d * n - s as i64, d * n))
}

/// Sum over `g` in `(Z/d)^x` of `max(0, S_g - 2 d |H|)`, where
/// `S_g = sum_i sum_pi (a_i pi g mod d)`, together with `d |H| phi(d)`.
fn w_parts(a: &Tuple, d: u64, h: &[u64], us: &[u64]) -> (i64, i64) {
    let n = h.len() as i64;
    let mut acc = 0i64;
    for &g in us {
        let s: u64 = h
            .iter()
            .map(|&pi| {
                let m = pi * g % d;
                a.iter().map(|&x| x * m % d).sum::<u64>()
            })
            .sum();
        acc += (s as i64 - 2 * d as i64 * n).max(0);
    }
    (acc, d as i64 * n * us.len() as i64)
}

/// `(1/phi(d)) sum_g max(0, sum_i (-1/2 + avg_pi <a_i pi g / d>))`.
pub fn w_single(a: &Tuple, d: u64, p: u64) -> Result<BigRational> {
    check_circ(d, a)?;
    let h = p_subgroup(p, d)?;
    let (num, den) = w_parts(a, d, &h, &units(d));
    Ok(rat(num, den))
}

/// Lower-bound verdict `q^w |P*| >= 1` for `P* = N / q^e` and rational `w`.
pub fn refined_bound_holds(pstar: &QPowRational, w: &BigRational) -> bool {
    if pstar.is_zero() {
        return false;
    }
    let n = pstar.numerator().abs();
    let q = BigInt::from(pstar.base());
    let den = w.denom();
    let num = w.numer();
    // N^D >= q^{e D - u}
    let k = BigInt::from(pstar.exponent()) * den - num;
    if !k.is_positive() {
        return true;
    }
    let (lo, rem) = k.div_rem(den);
    let lo = lo.to_u32_digits().1.first().copied().unwrap_or(0);
    if n >= q.pow(lo + u32::from(!rem.is_zero())) {
        return true;
    }
    if n < q.pow(lo) {
        return false;
    }
    let d: u32 = den.try_into().expect("small denominator");
    let k: u32 = (&k).try_into().expect("small exponent");
    n.pow(d) >= q.pow(k)
}

/// `q^{|Lambda|} |P*| >= 1`.
pub fn trivial_bound_holds(pstar: &QPowRational, lambda_size: u64) -> bool {
    refined_bound_holds(pstar, &BigRational::from_integer(lambda_size.into()))
}

pub fn trivial_bound_check(z: &ZetaFactorization) -> bool {
    let size: u64 = z.factors.iter().map(|f| f.orbit.len).sum();
    trivial_bound_holds(&z.pstar, size)
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleWeight {
    pub rep: Tuple,
    pub multiplicity: u64,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightReport {
    pub q: u64,
    pub d: u64,
    pub p: u64,
    /// One entry per `(Z/d)^x`-orbit of `Lambda` inside `G_d^o`.
    pub weights: Vec<TupleWeight>,
    #[serde(serialize_with = "ser_rational")]
    pub w_total: BigRational,
    pub pstar: String,
    pub denominator_exponent: i64,
    pub trivial_holds: bool,
    pub refined_holds: bool,
}

pub fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `w_p(Lambda, d)` as the weighted sum over unit orbits of `Lambda` meets `G_d^o`.
pub fn w_weights(d: u64, p: u64, lambda: &Lambda) -> Result<(Vec<(Tuple, u64, BigRational)>, BigRational)> {
    let h = p_subgroup(p, d)?;
    let us = units(d);
    let mut seen = std::collections::BTreeMap::<Tuple, u64>::new();
    for a in g_d(d).filter(|a| is_circ(a) && lambda.contains(d, a)) {
        let key = us.iter().map(|&t| scale(t, d, &a)).min().unwrap();
        *seen.entry(key).or_default() += 1;
    }
    let items: Vec<(Tuple, u64, BigRational)> = seen
        .into_par_iter()
        .map(|(rep, mult)| {
            let (num, den) = w_parts(&rep, d, &h, &us);
            (rep, mult, rat(num, den))
        })
        .collect();
    let total = items
        .iter()
        .fold(BigRational::zero(), |acc, (_, m, w)| acc + w * BigRational::from_integer((*m).into()));
    Ok((items, total))
}

pub fn w_total(q: u64, d: u64, lambda: &Lambda, z: &ZetaFactorization) -> Result<WeightReport> {
    let (p, _) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
    let (items, total) = w_weights(d, p, lambda)?;
    let size: u64 = z.factors.iter().map(|f| f.orbit.len).sum();
    Ok(WeightReport {
        q,
        d,
        p,
        weights: items
            .into_iter()
            .map(|(rep, multiplicity, w)| TupleWeight { rep, multiplicity, weight: w.to_string() })
            .collect(),
        refined_holds: refined_bound_holds(&z.pstar, &total),
        trivial_holds: trivial_bound_holds(&z.pstar, size),
        w_total: total,
        pstar: z.pstar.to_string(),
        denominator_exponent: z.pstar.exponent(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub rep: Tuple,
    #[serde(serialize_with = "crate::zeta::ser_bigint")]
    pub norm: BigInt,
    pub ord_p: u64,
    #[serde(serialize_with = "ser_rational")]
    pub predicted_ord_p: BigRational,
    pub abs_ok: bool,
    pub ord_ok: bool,
}

impl NormReport {
    pub fn holds(&self) -> bool {
        self.abs_ok && self.ord_ok
    }
}

fn ord_p(mut n: BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let mut k = 0;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    k
}

/// `N = prod_{t} Ja(t a)`: checks `|N| = q^{|A| phi(d)}` and
/// `ord_p N = o_p(d) sum_{g in (Z/d)^x / <p>} v_A stick(g a)`, `v_A = r |A|`.
pub fn norm_valuation_check(engine: &JacobiEngine, q: u64, d: u64, a: &Tuple) -> Result<NormReport> {
    check_circ(d, a)?;
    let (p, r) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
    let us = units(d);
    let values: Vec<CycElement> = us
        .par_iter()
        .map(|&t| engine.value(q, d, &scale(t, d, a)).map(|v| v.0))
        .collect::<Result<_>>()?;
    let mut prod = CycElement::one(values[0].conductor());
    for v in &values {
        prod = prod.mul(v)?.reduced();
    }
    let norm = prod
        .as_rational_integer()
        .ok_or_else(|| Error::Certification("norm of a Jacobi sum is not rational".into()))?;
    let (da, _) = crate::orbit::primitive(d, a);
    let len = mult_order(q, da)?;
    let v_a = r as u64 * len;
    let abs_ok = norm.abs() == BigInt::from(q).pow((len * totient(d)) as u32);

    // coset representatives of <p> in (Z/d)^x
    let h = p_subgroup(p, d)?;
    let mut covered = vec![false; d as usize];
    let mut sum = BigRational::zero();
    for &g in &us {
        if covered[g as usize] {
            continue;
        }
        for &pi in &h {
            covered[(g * pi % d) as usize] = true;
        }
        sum += stickelberger_valuation(&scale(g, d, a), d, p)?;
    }
    let predicted = sum * BigRational::from_integer((mult_order(p, d)? * v_a).into());
    let ord = ord_p(norm.clone(), p);
    let ord_ok = predicted == BigRational::from_integer(ord.into());
    Ok(NormReport { rep: *a, norm, ord_p: ord, predicted_ord_p: predicted, abs_ok, ord_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub d: u64,
    pub bad: BadSetReport,
    #[serde(serialize_with = "ser_rational")]
    pub fraction: BigRational,
    pub bound: f64,
    pub verdict: bool,
}

/// Fraction of `G_d` violating `d > max gcd(d, a_i) > d^u`, against `4 tau(d) / d^u`.
pub fn hypothesis_h_check(d: u64, u: BadThreshold, epsilon: f64) -> Result<HypothesisReport> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 1/4)")));
    }
    if !matches!(u, BadThreshold::Power { .. }) {
        return Err(Error::InvalidParameter("u must be a fractional power".into()));
    }
    let bad = bad_set_count(d, u)?;
    let fraction = BigRational::new(bad.count.into(), bad.group_size.into());
    let bound = 4.0 * bad.tau as f64 / u.value(d);
    Ok(HypothesisReport { d, fraction, bound, verdict: bad.within_bound, bad })
}

/// `d | q^n + 1` for some `1 <= n <= max_n`.
pub fn is_supersingular(q: u64, d: u64, max_n: u64) -> bool {
    gcd(q, d) == 1 && (1..=max_n).any(|n| (pow_mod(q, n, d) + 1).is_multiple_of(d))
}

/// Conjugate pair identity `stick(b) + stick(-b) = 2` over `G_d^o`, on the
/// integer numerators: `S(b) + S(-b) = 4 d |<p>|`.
pub fn conjugate_pairs_hold(d: u64, p: u64) -> Result<bool> {
    let h = p_subgroup(p, d)?;
    let target = 4 * d * h.len() as u64;
    let tuples: Vec<Tuple> = g_d(d).filter(is_circ).collect();
    Ok(tuples
        .par_iter()
        .all(|b| stick_sum(b, d, &h) + stick_sum(&neg(d, b), d, &h) == target))
}

/// Orbit representatives of `G_d^o` under `q` (convenience for callers).
pub fn circ_reps(q: u64, d: u64) -> Result<Vec<Tuple>> {
    Ok(orbits(q, d, &Lambda::Circ)?.into_iter().map(|o| o.rep).collect())
}
