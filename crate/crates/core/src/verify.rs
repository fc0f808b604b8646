//! Every oracle for one `(q, d)`, collected into a pass/fail report.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::units;
use crate::charsum::{jacobi_direct, jacobi_extension, JacobiEngine};
use crate::cyclo::CycElement;
use crate::error::Result;
use crate::orbit::{g_d, is_circ, scale, Lambda, OrbitClass, Tuple};
use crate::stick::{is_supersingular, norm_valuation_check, trivial_bound_check, w_total};
use crate::zeta::{
    assemble, brute_point_count, functional_equation_sign, invariants_from, predicted_point_count, q_power,
    second_betti, ZetaFactorization,
};

/// Davenport–Hasse is checked for `s = 2` while `Q^2` stays below this.
pub const DH_FIELD_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, cases: u64, failures: Vec<String>) -> Self {
        let passed = failures.is_empty();
        let detail = if passed { String::new() } else { failures.join("; ") };
        Check { name: name.into(), cases, passed, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub q: u64,
    pub d: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest `n` with `q^{3n}` inside the brute-force budget.
pub fn max_point_count_degree(q: u64, budget: u128) -> u32 {
    let mut n = 0;
    while (q as u128).pow(3 * (n + 1)) <= budget {
        n += 1;
    }
    n
}

pub fn point_count_check(z: &ZetaFactorization, budget: u128) -> Result<Check> {
    let max_n = max_point_count_degree(z.q, budget);
    let mut failures = Vec::new();
    for n in 1..=max_n {
        let predicted = predicted_point_count(z, n as u64)?;
        let brute = brute_point_count(z.q, z.d, n, budget)?;
        if predicted != BigInt::from(brute) {
            failures.push(format!("n = {n}: predicted {predicted}, counted {brute}"));
        }
    }
    Ok(Check::new("point_counts", max_n as u64, failures))
}

/// Values of `Ja` on every all-nonzero tuple of `G_d`.
fn circ_values(engine: &JacobiEngine, q: u64, d: u64) -> Result<HashMap<Tuple, CycElement>> {
    let tuples: Vec<Tuple> = g_d(d).filter(is_circ).collect();
    tuples
        .par_iter()
        .map(|a| engine.value(q, d, a).map(|(v, _)| (*a, v)))
        .collect()
}

pub fn character_sum_checks(engine: &JacobiEngine, z: &ZetaFactorization) -> Result<Vec<Check>> {
    let (q, d) = (z.q, z.d);
    let circ: Vec<_> = z.factors.iter().filter(|f| f.orbit.class == OrbitClass::Circ).collect();
    let values = circ_values(engine, q, d)?;
    let us = units(d);

    let mut rh = Vec::new();
    for f in &circ {
        let prod = f.value.mul(&f.value.conj())?;
        if prod.as_rational_integer() != Some(q_power(q, 2 * f.orbit.len)) {
            rh.push(format!("{:?}", f.orbit.rep));
        }
    }

    let mut galois = Vec::new();
    let mut galois_cases = 0;
    for f in &circ {
        for &t in &us {
            galois_cases += 1;
            let lhs = f.value.galois_apply((t % f.orbit.d_a) as i64)?;
            if lhs != values[&scale(t, d, &f.orbit.rep)] {
                galois.push(format!("{:?} t = {t}", f.orbit.rep));
            }
        }
    }

    let mut q_inv = Vec::new();
    for (a, v) in &values {
        if values[&scale(q, d, a)] != *v {
            q_inv.push(format!("{a:?}"));
        }
    }

    let limits = engine.limits();
    let dh_cases: Vec<_> = circ
        .iter()
        .filter(|f| (q as u128).pow(2 * f.orbit.len as u32) <= DH_FIELD_CAP as u128)
        .collect();
    let dh: Vec<String> = dh_cases
        .par_iter()
        .map(|f| jacobi_extension(q, d, &f.orbit.rep, 2, limits).map(|r| (r.holds, f.orbit.rep)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, a)| format!("{a:?}"))
        .collect();

    let direct_cases: Vec<_> = circ
        .iter()
        .filter(|f| (q as u128).pow(f.orbit.len as u32) <= limits.direct_cap as u128)
        .collect();
    let fast: Vec<String> = direct_cases
        .par_iter()
        .map(|f| jacobi_direct(q, d, &f.orbit.rep, limits).map(|v| (v == f.value, f.orbit.rep)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, a)| format!("{a:?}"))
        .collect();

    Ok(vec![
        Check::new("rh_product", circ.len() as u64, rh),
        Check::new("galois_equivariance", galois_cases, galois),
        Check::new("q_invariance", values.len() as u64, q_inv),
        Check::new("davenport_hasse", dh_cases.len() as u64, dh),
        Check::new("fast_vs_direct", direct_cases.len() as u64, fast),
    ])
}

pub fn norm_check(engine: &JacobiEngine, z: &ZetaFactorization) -> Result<Check> {
    let reps: Vec<Tuple> = z
        .factors
        .iter()
        .filter(|f| f.orbit.class == OrbitClass::Circ)
        .map(|f| f.orbit.rep)
        .collect();
    let failures: Vec<String> = reps
        .par_iter()
        .map(|a| norm_valuation_check(engine, z.q, z.d, a))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| !r.holds())
        .map(|r| format!("{:?}: N = {}, ord = {}, predicted {}", r.rep, r.norm, r.ord_p, r.predicted_ord_p))
        .collect();
    Ok(Check::new("norm_valuation", reps.len() as u64, failures))
}

pub fn lower_bound_checks(z: &ZetaFactorization) -> Result<Vec<Check>> {
    let (q, d) = (z.q, z.d);
    let mut checks = vec![Check::new(
        "trivial_bound",
        1,
        if trivial_bound_check(z) { vec![] } else { vec![format!("P* = {}", z.pstar)] },
    )];
    let w = w_total(q, d, &Lambda::Full, z)?;
    checks.push(Check::new(
        "refined_bound",
        1,
        if w.refined_holds { vec![] } else { vec![format!("w = {}, P* = {}", w.w_total, z.pstar)] },
    ));
    if is_supersingular(q, d, 12) {
        let mut failures = Vec::new();
        if !num_traits::Zero::is_zero(&w.w_total) {
            failures.push(format!("w = {}", w.w_total));
        }
        if z.pstar.to_integer().is_none() {
            failures.push(format!("P* = {} is not an integer", z.pstar));
        }
        checks.push(Check::new("supersingular_collapse", 1, failures));
    }
    Ok(checks)
}

pub fn structure_checks(z: &ZetaFactorization) -> Vec<Check> {
    let mut failures = Vec::new();
    if functional_equation_sign(&z.poly, z.q).is_none() {
        failures.push("functional equation fails".to_string());
    }
    if z.degree() as u64 != second_betti(z.d) {
        failures.push(format!("degree {} != b2 {}", z.degree(), second_betti(z.d)));
    }
    if let Err(e) = invariants_from(z) {
        failures.push(e.to_string());
    }
    vec![Check::new("structure", 1, failures)]
}

/// Runs every oracle for `(q, d)` over the full group `G_d`.
pub fn verify_all(engine: &JacobiEngine, q: u64, d: u64) -> Result<VerifyReport> {
    let z = assemble(engine, q, d, &Lambda::Full)?;
    let mut checks = vec![point_count_check(&z, engine.limits().brute_budget)?];
    checks.extend(character_sum_checks(engine, &z)?);
    checks.push(norm_check(engine, &z)?);
    checks.extend(lower_bound_checks(&z)?);
    checks.extend(structure_checks(&z));
    Ok(VerifyReport { q, d, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Limits;

    #[test]
    fn quadric_passes() {
        let engine = JacobiEngine::new(Limits::default(), None);
        let r = verify_all(&engine, 3, 2).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(max_point_count_degree(3, 100_000_000), 5);
        assert_eq!(max_point_count_degree(2, 100_000_000), 8);
    }

    #[test]
    fn septic_passes() {
        let engine = JacobiEngine::new(Limits::default(), None);
        let r = verify_all(&engine, 2, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.check("davenport_hasse").unwrap().cases > 0);
    }
}
