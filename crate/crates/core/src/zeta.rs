//! `P(Lambda, T) = prod_A (1 - Ja(a) T^{|A|})` as an exact integer polynomial,
//! its behaviour at `T = 1/q`, the Fermat-surface invariants and point counts.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd, prime_power, units};
use crate::charsum::{JacobiEngine, JacobiRecord};
use crate::cyclo::{ln_bigint, CycElement, QPowRational};
use crate::error::{Error, Result};
use crate::ffield::field;
use crate::orbit::{is_unit_stable, orbits, scale, Lambda, Tuple};

/// Integer polynomial, lowest degree first.
pub type Poly = Vec<BigInt>;

pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn product_tree(mut polys: Vec<Poly>) -> Poly {
    if polys.is_empty() {
        return vec![BigInt::one()];
    }
    while polys.len() > 1 {
        polys = polys
            .par_chunks(2)
            .map(|c| if c.len() == 2 { poly_mul(&c[0], &c[1]) } else { c[0].clone() })
            .collect();
    }
    polys.pop().unwrap()
}

/// `P / (1 - cT)` when the division is exact.
pub fn div_linear(p: &[BigInt], c: &BigInt) -> Option<Poly> {
    if p.len() < 2 {
        return None;
    }
    let mut r = Vec::with_capacity(p.len() - 1);
    let mut prev = BigInt::zero();
    for coeff in &p[..p.len() - 1] {
        let next = coeff + c * &prev;
        r.push(next.clone());
        prev = next;
    }
    // top coefficient must equal -c * r_last
    (p[p.len() - 1] == -(c * &prev)).then_some(r)
}

/// `P(1/q)` as `N / q^deg`.
pub fn eval_at_inverse_q(p: &[BigInt], q: u64) -> QPowRational {
    let qb = BigInt::from(q);
    let deg = p.len().saturating_sub(1);
    let mut num = BigInt::zero();
    for (k, c) in p.iter().enumerate() {
        num += c * qb.pow((deg - k) as u32);
    }
    QPowRational::new(num, deg as i64, q)
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaFactorization {
    pub q: u64,
    pub d: u64,
    pub lambda: String,
    pub factors: Vec<JacobiRecord>,
    #[serde(skip)]
    pub poly: Poly,
    pub rho: u64,
    #[serde(skip)]
    pub pstar: QPowRational,
}

impl ZetaFactorization {
    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    fn is_full(&self) -> bool {
        self.lambda == Lambda::Full.describe()
    }
}

/// Groups q-orbits by their `(Z/d)^x`-orbit; the key is the least tuple in it.
fn unit_orbit_key(d: u64, a: &Tuple, us: &[u64]) -> Tuple {
    us.iter().map(|&t| scale(t, d, a)).min().unwrap_or(*a)
}

fn grouped(d: u64, factors: &[JacobiRecord]) -> BTreeMap<Tuple, Vec<&JacobiRecord>> {
    let us = units(d);
    let mut groups: BTreeMap<Tuple, Vec<&JacobiRecord>> = BTreeMap::new();
    for f in factors {
        if f.value.is_zero() {
            continue;
        }
        groups.entry(unit_orbit_key(d, &f.orbit.rep, &us)).or_default().push(f);
    }
    groups
}

fn certify_integer(x: &CycElement, what: &str) -> Result<BigInt> {
    x.as_rational_integer()
        .ok_or_else(|| Error::Certification(format!("{what} is not a rational integer")))
}

/// `prod (1 - J_i T^k)` over one group with common `|A| = k`, certified integral.
fn group_poly(group: &[&JacobiRecord]) -> Result<Poly> {
    let m = group[0].value.conductor();
    let k = group[0].orbit.len as usize;
    let mut coeffs = vec![CycElement::one(m)];
    for f in group {
        if f.value.conductor() != m || f.orbit.len as usize != k {
            return Err(Error::Certification("inconsistent unit orbit".into()));
        }
        let mut next = coeffs.clone();
        next.push(CycElement::zero(m));
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].sub(&c.mul(&f.value)?)?;
        }
        coeffs = next.iter().map(CycElement::reduced).collect();
    }
    let mut out = vec![BigInt::zero(); (coeffs.len() - 1) * k + 1];
    for (i, c) in coeffs.iter().enumerate() {
        out[i * k] = certify_integer(c, "factor coefficient")?;
    }
    Ok(out)
}

pub fn q_power(q: u64, e: u64) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

fn is_q_power_value(q: u64, f: &JacobiRecord) -> bool {
    f.value.as_rational_integer() == Some(q_power(q, f.orbit.len))
}

/// Exact assembly of `P(Lambda, T)` with vanishing order and special value.
pub fn assemble(engine: &JacobiEngine, q: u64, d: u64, lambda: &Lambda) -> Result<ZetaFactorization> {
    if prime_power(q).is_none() {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    if d < 2 {
        return Err(Error::InvalidParameter("d must be >= 2".into()));
    }
    if gcd(q, d) != 1 {
        return Err(Error::NotCoprime { a: q as i64, m: d });
    }
    if matches!(lambda, Lambda::Predicate(..)) && !is_unit_stable(d, lambda) {
        return Err(Error::InvalidParameter(format!("{} is not stable under units", lambda.describe())));
    }
    let orbit_list = orbits(q, d, lambda)?;
    if orbit_list.is_empty() {
        return Err(Error::InvalidParameter("empty lambda".into()));
    }
    // Fail on any cap violation before doing expensive work.
    for o in &orbit_list {
        engine.limits().check_orbit(q, o.d_a, o.len)?;
    }
    let factors: Vec<JacobiRecord> = orbit_list
        .par_iter()
        .map(|o| engine.record(q, o))
        .collect::<Result<_>>()?;

    let groups = grouped(d, &factors);
    let group_polys: Vec<Poly> = groups
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|g| group_poly(g))
        .collect::<Result<_>>()?;
    let poly = product_tree(group_polys);

    let rho = factors.iter().filter(|f| is_q_power_value(q, f)).count() as u64;
    let pstar = special_value_from_factors(q, d, &factors)?;

    // Cross-checks: (1 - qT)^rho divides P exactly and the quotient at 1/q is P*.
    let mut reduced = poly.clone();
    let qb = BigInt::from(q);
    for _ in 0..rho {
        reduced = div_linear(&reduced, &qb)
            .ok_or_else(|| Error::Certification("vanishing order exceeds multiplicity".into()))?;
    }
    let at = eval_at_inverse_q(&reduced, q);
    if at != pstar {
        return Err(Error::Certification(format!("special value mismatch: {at} vs {pstar}")));
    }
    if pstar.sign() != num_bigint::Sign::Plus {
        return Err(Error::Certification(format!("special value {pstar} is not positive")));
    }
    Ok(ZetaFactorization { q, d, lambda: lambda.describe(), factors, poly, rho, pstar })
}

/// `prod_{Lambda_0} |A| * prod_{Lambda^*} (q^{|A|} - Ja) / q^{sum |A|}`.
fn special_value_from_factors(q: u64, d: u64, factors: &[JacobiRecord]) -> Result<QPowRational> {
    let mut num = BigInt::one();
    let mut e: i64 = 0;
    for f in factors.iter().filter(|f| is_q_power_value(q, f)) {
        num *= BigInt::from(f.orbit.len);
    }
    let rest: Vec<JacobiRecord> = factors
        .iter()
        .filter(|f| !f.value.is_zero() && !is_q_power_value(q, f))
        .cloned()
        .collect();
    for group in grouped(d, &rest).values() {
        let m = group[0].value.conductor();
        let mut prod = CycElement::one(m);
        for f in group {
            let diff = CycElement::from_int(m, q_power(q, f.orbit.len)).sub(&f.value)?;
            prod = prod.mul(&diff)?.reduced();
            e += f.orbit.len as i64;
        }
        num *= certify_integer(&prod, "special-value factor")?;
    }
    Ok(QPowRational::new(num, e, q))
}

pub fn vanishing_order(z: &ZetaFactorization) -> u64 {
    z.rho
}

pub fn special_value(z: &ZetaFactorization) -> &QPowRational {
    &z.pstar
}

/// `q^{2k} c_{D-k} = c_D c_k` for all `k`; returns the sign of `c_D / q^D`
/// when the roots are stable under `alpha -> q^2 / alpha`.
pub fn functional_equation_sign(poly: &[BigInt], q: u64) -> Option<i8> {
    let deg = poly.len() - 1;
    let top = &poly[deg];
    let qd = q_power(q, deg as u64);
    let sign = if *top == qd {
        1
    } else if *top == -qd {
        -1
    } else {
        return None;
    };
    let ok = (0..=deg).all(|k| q_power(q, 2 * k as u64) * &poly[deg - k] == top * &poly[k]);
    ok.then_some(sign)
}

#[derive(Clone, Debug, Serialize)]
pub struct FermatInvariants {
    pub q: u64,
    pub d: u64,
    pub p_g: u64,
    pub b2: u64,
    pub rank: u64,
    #[serde(serialize_with = "crate::zeta::ser_bigint")]
    pub br_reg: BigInt,
    /// `log(|Br| Reg) / log(q^{p_g})`; `None` when `p_g = 0`.
    pub bs_ratio: Option<f64>,
}

pub fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn geometric_genus(d: u64) -> u64 {
    if d < 3 {
        return 0;
    }
    (d - 1) * (d - 2) * (d - 3) / 6
}

pub fn second_betti(d: u64) -> u64 {
    (d - 1) * (d * d + 3 - 3 * d) + 1
}

pub fn fermat_invariants(engine: &JacobiEngine, q: u64, d: u64) -> Result<(FermatInvariants, ZetaFactorization)> {
    let z = assemble(engine, q, d, &Lambda::Full)?;
    let inv = invariants_from(&z)?;
    Ok((inv, z))
}

pub fn invariants_from(z: &ZetaFactorization) -> Result<FermatInvariants> {
    if !z.is_full() {
        return Err(Error::InvalidParameter("invariants need the full group".into()));
    }
    let (q, d) = (z.q, z.d);
    let p_g = geometric_genus(d);
    let b2 = second_betti(d);
    let br_reg = z
        .pstar
        .mul(&QPowRational::new(1, -(p_g as i64), q))
        .to_integer()
        .filter(|x| x.is_positive())
        .ok_or_else(|| Error::Certification(format!("q^p_g P* = q^{p_g} * {} is not a positive integer", z.pstar)))?;
    if z.rho < 1 || z.rho > b2 || z.degree() as u64 != b2 {
        return Err(Error::Certification(format!("rank {} / degree {} inconsistent with b2 = {b2}", z.rho, z.degree())));
    }
    let bs_ratio = (p_g > 0).then(|| ln_bigint(&br_reg) / (p_g as f64 * (q as f64).ln()));
    Ok(FermatInvariants { q, d, p_g, b2, rank: z.rho, br_reg, bs_ratio })
}

/// `#F_d(F_{q^n}) = 1 + q^{2n} + sum_A |A| Ja(a)^{n/|A|}` over `|A|` dividing `n`.
pub fn predicted_point_count(z: &ZetaFactorization, n: u64) -> Result<BigInt> {
    if !z.is_full() {
        return Err(Error::InvalidParameter("point counts need the full group".into()));
    }
    let mut total = BigInt::one() + q_power(z.q, 2 * n);
    for group in grouped(z.d, &z.factors).values() {
        let m = group[0].value.conductor();
        let mut acc = CycElement::zero(m);
        for f in group {
            if n.is_multiple_of(f.orbit.len) {
                let term = f.value.pow(n / f.orbit.len).scale(&BigInt::from(f.orbit.len));
                acc = acc.add(&term)?;
            }
        }
        total += certify_integer(&acc, "power sum")?;
    }
    let newton = BigInt::one() + q_power(z.q, 2 * n) + power_sum(&z.poly, n as usize);
    if newton != total {
        return Err(Error::Certification(format!("power sums disagree: {total} vs {newton}")));
    }
    Ok(total)
}

/// `sum alpha_i^n` for `P = prod (1 - alpha_i T)` by Newton's identities.
pub fn power_sum(poly: &[BigInt], n: usize) -> BigInt {
    let c = |k: usize| poly.get(k).cloned().unwrap_or_default();
    let mut s: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for j in 1..=n {
        let mut v = -BigInt::from(j) * c(j);
        for k in 1..j {
            v -= c(k) * &s[j - k];
        }
        s[j] = v;
    }
    s[n].clone()
}

/// Projective solutions of `X_0^d + X_1^d + X_2^d + X_3^d = 0` over `F_{q^n}`,
/// normalising the first nonzero coordinate to 1.
pub fn brute_point_count(q: u64, d: u64, n: u32, budget: u128) -> Result<u64> {
    let (p, r) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
    let size = (q as u128).pow(n);
    let work = size.pow(3);
    if work > budget {
        return Err(Error::BudgetExceeded { work, budget });
    }
    let f = field(p, r * n, u64::MAX)?;
    let size = size as usize;
    let pw: Vec<u32> = (0..size as u32).map(|x| f.pow(x, d)).collect();
    let mut count_of = vec![0u64; size];
    for &v in &pw {
        count_of[v as usize] += 1;
    }
    let solutions_of = |s: u32| count_of[f.neg(s) as usize];
    // (1 : x1 : x2 : x3)
    let mut total = 0u64;
    for &v1 in &pw {
        let s1 = f.add(1, v1);
        for &v2 in &pw {
            total += solutions_of(f.add(s1, v2));
        }
    }
    // (0 : 1 : x2 : x3)
    for &v2 in &pw {
        total += solutions_of(f.add(1, v2));
    }
    // (0 : 0 : 1 : x3); (0 : 0 : 0 : 1) is never a solution
    total += solutions_of(1);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Limits;

    fn engine() -> JacobiEngine {
        JacobiEngine::new(Limits::default(), None)
    }

    fn ints(v: &[i64]) -> Poly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pow_poly(p: &Poly, e: u32) -> Poly {
        (0..e).fold(ints(&[1]), |acc, _| poly_mul(&acc, p))
    }

    #[test]
    fn quadric() {
        let z = assemble(&engine(), 3, 2, &Lambda::Full).unwrap();
        assert_eq!(z.poly, pow_poly(&ints(&[1, -3]), 2));
        assert_eq!(z.rho, 2);
        assert_eq!(z.pstar, QPowRational::new(1, 0, 3));
    }

    #[test]
    fn cubic_and_quintic() {
        let z = assemble(&engine(), 2, 3, &Lambda::Full).unwrap();
        let expect = poly_mul(&pow_poly(&ints(&[1, -2]), 4), &pow_poly(&ints(&[1, 2]), 3));
        assert_eq!(z.poly, expect);
        assert_eq!(z.rho, 4);
        assert_eq!(z.pstar.to_integer(), Some(8.into()));

        let z = assemble(&engine(), 2, 5, &Lambda::Full).unwrap();
        let mut quartic = ints(&[1, 0, 0, 0, -16]);
        quartic = pow_poly(&quartic, 13);
        assert_eq!(z.poly, poly_mul(&ints(&[1, -2]), &quartic));
        assert_eq!(z.rho, 14);
        assert_eq!(z.pstar.to_integer(), Some(BigInt::from(1u64 << 26)));
    }

    #[test]
    fn invariants_examples() {
        let (inv, _) = fermat_invariants(&engine(), 2, 5).unwrap();
        assert_eq!(inv.rank, 14);
        assert_eq!(inv.br_reg, BigInt::from(1u64 << 30));
        assert!((inv.bs_ratio.unwrap() - 7.5).abs() < 1e-12);
        let (inv, _) = fermat_invariants(&engine(), 2, 3).unwrap();
        assert_eq!((inv.rank, inv.p_g, inv.bs_ratio), (4, 0, None));
        assert_eq!(inv.br_reg, 8.into());
        assert_eq!((geometric_genus(4), second_betti(4)), (1, 22));
    }

    #[test]
    fn point_counts() {
        for (q, d, expect) in [(2, 3, 7u64), (2, 5, 7), (3, 2, 16)] {
            let z = assemble(&engine(), q, d, &Lambda::Full).unwrap();
            assert_eq!(predicted_point_count(&z, 1).unwrap(), expect.into());
            assert_eq!(brute_point_count(q, d, 1, 100_000_000).unwrap(), expect);
        }
        let z = assemble(&engine(), 2, 7, &Lambda::Full).unwrap();
        for n in 1..=4 {
            assert_eq!(predicted_point_count(&z, n).unwrap(), brute_point_count(2, 7, n as u32, 100_000_000).unwrap().into());
        }
        assert!(matches!(brute_point_count(5, 3, 4, 100_000_000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn functional_equation() {
        for (q, d) in [(2, 3), (2, 7), (3, 4), (5, 3)] {
            let z = assemble(&engine(), q, d, &Lambda::Full).unwrap();
            assert!(functional_equation_sign(&z.poly, q).is_some(), "q = {q}, d = {d}");
        }
    }

    #[test]
    fn circ_and_subgroup() {
        let z = assemble(&engine(), 2, 5, &Lambda::Circ).unwrap();
        assert_eq!(z.rho, 13);
        let z = assemble(&engine(), 3, 4, &Lambda::Subgroup(vec![[2, 1, 1, 0]])).unwrap();
        assert_eq!(z.poly[0], BigInt::one());
    }

    #[test]
    fn linear_division() {
        let p = ints(&[1, -5, 6]); // (1-2T)(1-3T)
        assert_eq!(div_linear(&p, &2.into()), Some(ints(&[1, -3])));
        assert_eq!(div_linear(&p, &5.into()), None);
        assert_eq!(eval_at_inverse_q(&ints(&[1, -3]), 2), QPowRational::new(-1, 1, 2));
    }
}
