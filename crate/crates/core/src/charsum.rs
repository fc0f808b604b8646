//! Gauss and Jacobi sums attached to tuples of `G_d`.
//!
//! For `a` in a q-orbit `A` put `Q = q^{|A|}` and `d_a = d / gcd(d, a)`. The
//! characters are `chi_i(g^k) = zeta_{d_a}^{a'_i k}` where `g` is the fixed
//! generator of `F_Q^x` and `a'` the primitive tuple in `G_{d_a}`, and
//!
//! ```text
//! Ja_Q(a) = 1/(Q-1) * sum_{x_0 + .. + x_3 = 0, x_i != 0} chi_0(x_0) .. chi_3(x_3).
//! ```
//!
//! Because `chi_0 chi_1 chi_2 chi_3` is trivial, every solution is a scalar
//! multiple of exactly one solution with `x_3 = 1`, and all `Q - 1` multiples
//! carry the same product. So the normalised sum equals the sum over
//! `x_0, x_1` with `x_2 = -1 - x_0 - x_1` (the "direct" path, `O(Q^2)`).
//!
//! The fast path uses `Ja = g(chi_0) g(chi_1) g(chi_2) g(chi_3) / Q` with
//! `g(chi) = sum_{x != 0} chi(x) zeta_p^{Tr x}`: from `g(chi_0) g(chi_1) g(chi_2)
//! = J(chi_0, chi_1, chi_2) g(chi_3^{-1})`, `g(chi) g(chi^{-1}) = chi(-1) Q` and
//! `J_0 = chi_3(-1) (Q - 1) J` the unit in front is `+1`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{gcd, mult_order, prime_power};
use crate::cache::{Cache, CacheKey};
use crate::config::Limits;
use crate::cyclo::CycElement;
use crate::error::{Error, Result};
use crate::ffield::{field, Elem, FieldTable};
use crate::orbit::{d_a, in_g_d, primitive, OrbitClass, OrbitRecord, Tuple};

/// Unit in `Ja = unit * g_0 g_1 g_2 g_3 / Q`; checked against the direct sum in tests.
pub const GAUSS_UNIT: i64 = 1;

const NONE: u32 = u32::MAX;

/// The multiplicative group of `F_Q` viewed inside a table for a possibly
/// larger field `F_{p^n}`: its generator is `g^c`, `c = (p^n - 1)/(Q - 1)`.
#[derive(Clone, Copy)]
pub struct FieldView<'a> {
    table: &'a FieldTable,
    degree: u32,
    size: u64,
    cofactor: u64,
}

impl<'a> FieldView<'a> {
    pub fn full(table: &'a FieldTable) -> Self {
        FieldView { table, degree: table.degree(), size: table.size(), cofactor: 1 }
    }

    pub fn subfield(table: &'a FieldTable, m: u32) -> Result<Self> {
        let sub = table.subfield(m)?;
        Ok(FieldView { table, degree: m, size: sub.size, cofactor: sub.cofactor })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn characteristic(&self) -> u64 {
        self.table.characteristic()
    }

    /// `(g^c)^j`.
    pub fn element(&self, j: u64) -> Elem {
        self.table.pow_gen(j * self.cofactor)
    }

    /// Discrete log to base `g^c`.
    pub fn log(&self, x: Elem) -> Result<u64> {
        let l = self.table.dlog(x)?;
        debug_assert_eq!(l % self.cofactor, 0);
        Ok(l / self.cofactor)
    }

    pub fn trace(&self, x: Elem) -> u64 {
        if self.cofactor == 1 {
            self.table.trace_to_prime(x)
        } else {
            self.table.subfield(self.degree).unwrap().trace_to_prime(x)
        }
    }

    fn log_minus_one(&self) -> u64 {
        if self.characteristic() == 2 {
            0
        } else {
            (self.size - 1) / 2
        }
    }

    /// Zech logs in view units, `NONE` where `1 + x = 0`.
    fn zech_table(&self) -> Vec<u32> {
        let n = (self.size - 1) as usize;
        let c = self.cofactor as usize;
        (0..n)
            .map(|j| match self.table.zech_raw(j * c) {
                NONE => NONE,
                z => {
                    debug_assert_eq!(z as usize % c, 0);
                    (z as usize / c) as u32
                }
            })
            .collect()
    }
}

fn check_circ(d_a: u64, a: &Tuple) -> Result<()> {
    if a.iter().any(|&x| x % d_a == 0) || a.iter().sum::<u64>() % d_a != 0 {
        return Err(Error::NotInSet(a.to_vec()));
    }
    Ok(())
}

fn check_divides(view: &FieldView, d_a: u64) -> Result<()> {
    if !(view.size - 1).is_multiple_of(d_a) {
        return Err(Error::InvalidParameter(format!(
            "{d_a} does not divide {} - 1",
            view.size
        )));
    }
    Ok(())
}

/// Dehomogenised `O(Q^2)` sum for a primitive all-nonzero tuple of `G_{d_a}`.
pub fn jacobi_direct_in(view: &FieldView, d_a: u64, a: &Tuple) -> Result<CycElement> {
    check_circ(d_a, a)?;
    check_divides(view, d_a)?;
    let n = (view.size - 1) as usize;
    let da = d_a as usize;
    let zech = view.zech_table();
    let lm1 = view.log_minus_one() as usize;
    // r_i[k] = a_i k mod d_a
    let residues = |ai: u64| -> Vec<u16> {
        (0..n).map(|k| ((ai as usize % da) * (k % da) % da) as u16).collect()
    };
    let r0 = residues(a[0]);
    let r1 = residues(a[1]);
    let r2 = residues(a[2]);
    let mut hist = vec![0i64; da];
    let wrap = |x: usize| if x >= n { x - n } else { x };
    for k0 in 0..n {
        let b0 = r0[k0] as usize;
        let l0 = zech[k0];
        if l0 == NONE {
            // 1 + x_0 = 0, so x_2 = -x_1.
            for k1 in 0..n {
                let l2 = wrap(k1 + lm1);
                let e = b0 + r1[k1] as usize + r2[l2] as usize;
                hist[e % da] += 1;
            }
            continue;
        }
        let l0 = l0 as usize;
        for k1 in 0..n {
            let t = if k1 >= l0 { k1 - l0 } else { k1 + n - l0 };
            let z = zech[t];
            if z == NONE {
                continue;
            }
            // log(1 + x_0 + x_1) = l0 + log(1 + x_1 / (1 + x_0)); x_2 is its negative.
            let l2 = wrap(wrap(l0 + z as usize) + lm1);
            let e = b0 + r1[k1] as usize + r2[l2] as usize;
            hist[e % da] += 1;
        }
    }
    Ok(CycElement::from_counts(da, &hist))
}

/// The defining sum over all `x_0, x_1, x_2` (cubic cost), used as an oracle.
pub fn jacobi_raw_in(view: &FieldView, d_a: u64, a: &Tuple) -> Result<CycElement> {
    check_circ(d_a, a)?;
    check_divides(view, d_a)?;
    let t = view.table;
    let elems: Vec<Elem> = (0..view.size - 1).map(|j| view.element(j)).collect();
    let mut hist = vec![0i64; d_a as usize];
    for (k0, &x0) in elems.iter().enumerate() {
        for (k1, &x1) in elems.iter().enumerate() {
            let s01 = t.add(x0, x1);
            for (k2, &x2) in elems.iter().enumerate() {
                let x3 = t.neg(t.add(s01, x2));
                if x3 == 0 {
                    continue;
                }
                let k3 = view.log(x3)?;
                let e = a[0] * k0 as u64 + a[1] * k1 as u64 + a[2] * k2 as u64 + a[3] * k3;
                hist[(e % d_a) as usize] += 1;
            }
        }
    }
    let q1 = (view.size - 1) as i64;
    if hist.iter().any(|c| c % q1 != 0) {
        return Err(Error::Certification("raw Jacobi sum not divisible by Q - 1".into()));
    }
    let hist: Vec<i64> = hist.iter().map(|c| c / q1).collect();
    Ok(CycElement::from_counts(d_a as usize, &hist))
}

/// All Gauss sums `g(chi^j)`, `chi(g^k) = zeta_{d_a}^k`, of one field, at
/// conductor `d_a * p`.
pub struct GaussTable {
    d_a: u64,
    p: u64,
    size: u64,
    sums: Vec<CycElement>,
}

impl GaussTable {
    pub fn new(view: &FieldView, d_a: u64) -> Result<Self> {
        check_divides(view, d_a)?;
        let p = view.characteristic();
        if gcd(p, d_a) != 1 {
            return Err(Error::NotCoprime { a: p as i64, m: d_a });
        }
        let da = d_a as usize;
        let pu = p as usize;
        let mut hist = vec![0i64; da * pu];
        for j in 0..view.size - 1 {
            let x = view.element(j);
            hist[(j % d_a) as usize * pu + view.trace(x) as usize] += 1;
        }
        let m = da * pu;
        let sums = (0..da)
            .map(|j| {
                let mut counts = vec![0i64; m];
                for r in 0..da {
                    for t in 0..pu {
                        let c = hist[r * pu + t];
                        if c != 0 {
                            counts[(pu * ((j * r) % da) + da * t) % m] += c;
                        }
                    }
                }
                CycElement::from_counts(m, &counts)
            })
            .collect();
        Ok(GaussTable { d_a, p, size: view.size, sums })
    }

    pub fn conductor(&self) -> usize {
        (self.d_a * self.p) as usize
    }

    /// `g(chi^j)`; `j = 0` gives the (degenerate) sum `-1`.
    pub fn gauss(&self, j: u64) -> &CycElement {
        &self.sums[(j % self.d_a) as usize]
    }

    /// `Ja` of a primitive all-nonzero tuple of `G_{d_a}`, at conductor `d_a`.
    pub fn jacobi(&self, a: &Tuple) -> Result<CycElement> {
        check_circ(self.d_a, a)?;
        let mut prod = self.gauss(a[0]).clone();
        for &ai in &a[1..] {
            prod = prod.mul(self.gauss(ai))?;
        }
        let prod = prod.scale(&BigInt::from(GAUSS_UNIT));
        let quotient = prod
            .div_exact(&BigInt::from(self.size))
            .ok_or_else(|| Error::Certification(format!("Gauss product for {a:?} not divisible by Q")))?;
        quotient.project_coprime(self.d_a as usize).ok_or_else(|| {
            Error::Certification(format!("Gauss product for {a:?} has a nonzero zeta_p part"))
        })
    }
}

/// `g(chi) = sum_{x != 0} zeta_{Q-1}^{e log x} zeta_p^{Tr x}` at conductor `ord(chi) * p`.
pub fn gauss_sum(field: &FieldTable, e: u64) -> Result<CycElement> {
    let n = field.size() - 1;
    if e.is_multiple_of(n) {
        return Err(Error::InvalidParameter("trivial character".into()));
    }
    let g = gcd(e % n, n);
    let table = GaussTable::new(&FieldView::full(field), n / g)?;
    Ok(table.gauss((e % n) / g).clone())
}

/// Character data of a tuple: `Q = q^{|A|}` and the exponents
/// `e_i = (Q - 1) a_i / d`, so that `chi_i(g^k) = zeta_{Q-1}^{e_i k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharSpec {
    pub p: u64,
    pub q: u64,
    pub d: u64,
    pub a: Tuple,
    pub order: u64,
    pub big_q: u64,
    pub d_a: u64,
    pub primitive: Tuple,
    pub exponents: [u64; 4],
    /// Degree of `F_Q` over `F_p`.
    pub degree: u32,
}

impl CharSpec {
    pub fn new(q: u64, d: u64, a: &Tuple, limits: &Limits) -> Result<Self> {
        let (p, r) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
        if d < 1 || !in_g_d(d, a) {
            return Err(Error::NotInSet(a.to_vec()));
        }
        if gcd(q, d) != 1 {
            return Err(Error::NotCoprime { a: q as i64, m: d });
        }
        let (da, prim) = primitive(d, a);
        let order = mult_order(q, da)?;
        limits.check_orbit(q, da, order)?;
        let big_q = (q as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
        if big_q > limits.max_field as u128 {
            return Err(Error::FieldTooLarge { size: big_q, cap: limits.max_field });
        }
        let big_q = big_q as u64;
        let exponents = a.map(|x| (big_q - 1) / d * x);
        let degree = r * order as u32;
        Ok(CharSpec { p, q, d, a: *a, order, big_q, d_a: da, primitive: prim, exponents, degree })
    }

    pub fn field(&self, limits: &Limits) -> Result<Arc<FieldTable>> {
        field(self.p, self.degree, limits.max_field)
    }
}

/// Value for the zero tuple and for tuples with some but not all `a_i = 0`.
fn conventional_value(q: u64, d: u64, a: &Tuple) -> Option<CycElement> {
    match OrbitClass::of(a) {
        OrbitClass::Zero => Some(CycElement::from_int(1, q)),
        OrbitClass::Mixed => Some(CycElement::zero(d_a(d, a) as usize)),
        OrbitClass::Circ => None,
    }
}

/// `Ja(a)` by the direct sum; the zero and mixed conventions are returned without summing.
pub fn jacobi_direct(q: u64, d: u64, a: &Tuple, limits: &Limits) -> Result<CycElement> {
    let spec = CharSpec::new(q, d, a, limits)?;
    if let Some(v) = conventional_value(q, d, a) {
        return Ok(v);
    }
    if spec.big_q > limits.direct_cap {
        return Err(Error::DirectSumCap { size: spec.big_q, cap: limits.direct_cap });
    }
    let f = spec.field(limits)?;
    jacobi_direct_in(&FieldView::full(&f), spec.d_a, &spec.primitive)
}

/// `Ja(a)` through Gauss sums.
pub fn jacobi_fast(q: u64, d: u64, a: &Tuple, limits: &Limits) -> Result<CycElement> {
    let spec = CharSpec::new(q, d, a, limits)?;
    if OrbitClass::of(a) != OrbitClass::Circ {
        return Err(Error::NotInSet(a.to_vec()));
    }
    let f = spec.field(limits)?;
    GaussTable::new(&FieldView::full(&f), spec.d_a)?.jacobi(&spec.primitive)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionReport {
    pub s: u32,
    /// `Ja` over `F_Q`, computed in the subfield of the extension table.
    pub base: CycElement,
    /// `Ja` over `F_{Q^s}`.
    pub extension: CycElement,
    pub holds: bool,
}

/// Compares `Ja_{Q^s}(a)` with `Ja_Q(a)^s`. Both sides use the Teichmuller
/// character of one table for `F_{Q^s}` (its subfield generator for `F_Q`),
/// the compatibility the relation needs. Fields above the spot-check size
/// are summed through Gauss sums.
pub fn jacobi_extension(q: u64, d: u64, a: &Tuple, s: u32, limits: &Limits) -> Result<ExtensionReport> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    let spec = CharSpec::new(q, d, a, limits)?;
    if OrbitClass::of(a) != OrbitClass::Circ {
        return Err(Error::NotInSet(a.to_vec()));
    }
    let n = spec.degree;
    let f = field(spec.p, n * s, limits.max_field)?;
    let eval = |view: FieldView| -> Result<CycElement> {
        if view.size() <= limits.spot_check_cap {
            jacobi_direct_in(&view, spec.d_a, &spec.primitive)
        } else {
            GaussTable::new(&view, spec.d_a)?.jacobi(&spec.primitive)
        }
    };
    let base = eval(FieldView::subfield(&f, n)?)?;
    let extension = eval(FieldView::full(&f))?;
    let holds = extension == base.pow(s as u64);
    Ok(ExtensionReport { s, base, extension, holds })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Convention,
    Direct,
    Gauss,
    Cache,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiRecord {
    pub orbit: OrbitRecord,
    pub value: CycElement,
    pub provenance: Provenance,
}

/// Computes Jacobi sums with shared Gauss tables, an optional disk cache and
/// direct re-checks on small fields.
pub struct JacobiEngine {
    limits: Limits,
    cache: Option<Cache>,
    tables: Mutex<HashMap<(u64, u32, u64), Arc<GaussTable>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl JacobiEngine {
    pub fn new(limits: Limits, cache: Option<Cache>) -> Self {
        JacobiEngine {
            limits,
            cache,
            tables: Mutex::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// `(hits, misses)` of the disk cache.
    pub fn cache_stats(&self) -> (u64, u64) {
        (self.hits.load(Ordering::Relaxed), self.misses.load(Ordering::Relaxed))
    }

    fn gauss_table(&self, spec: &CharSpec) -> Result<Arc<GaussTable>> {
        let key = (spec.p, spec.degree, spec.d_a);
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let f = spec.field(&self.limits)?;
        let t = Arc::new(GaussTable::new(&FieldView::full(&f), spec.d_a)?);
        Ok(self.tables.lock().unwrap().entry(key).or_insert(t).clone())
    }

    /// `Ja(a)` at conductor `d_a`.
    pub fn value(&self, q: u64, d: u64, a: &Tuple) -> Result<(CycElement, Provenance)> {
        let spec = CharSpec::new(q, d, a, &self.limits)?;
        if let Some(v) = conventional_value(q, d, a) {
            return Ok((v, Provenance::Convention));
        }
        let key = CacheKey { p: spec.p, q, d_a: spec.d_a, a: spec.primitive };
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.get(&key) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok((v, Provenance::Cache));
            }
            self.misses.fetch_add(1, Ordering::Relaxed);
        }
        let v = self.gauss_table(&spec)?.jacobi(&spec.primitive)?;
        if spec.big_q <= self.limits.spot_check_cap {
            let f = spec.field(&self.limits)?;
            let direct = jacobi_direct_in(&FieldView::full(&f), spec.d_a, &spec.primitive)?;
            if direct != v {
                return Err(Error::Certification(format!(
                    "Gauss and direct paths disagree for q = {q}, d = {d}, a = {a:?}"
                )));
            }
        }
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.put(&key, &v) {
                log::warn!("cache write failed: {e}");
            }
        }
        Ok((v, Provenance::Gauss))
    }

    pub fn record(&self, q: u64, orbit: &OrbitRecord) -> Result<JacobiRecord> {
        let (value, provenance) = self.value(q, orbit.d, &orbit.rep)?;
        Ok(JacobiRecord { orbit: orbit.clone(), value, provenance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn conventions() {
        assert_eq!(jacobi_direct(5, 3, &[0, 0, 0, 0], &lim()).unwrap(), CycElement::from_int(1, 5));
        assert!(jacobi_direct(2, 3, &[1, 2, 0, 0], &lim()).unwrap().is_zero());
    }

    #[test]
    fn small_examples() {
        assert_eq!(jacobi_direct(3, 2, &[1, 1, 1, 1], &lim()).unwrap(), CycElement::from_int(2, 3));
        assert_eq!(jacobi_direct(2, 3, &[1, 1, 2, 2], &lim()).unwrap(), CycElement::from_int(3, 4));
        assert_eq!(jacobi_fast(2, 5, &[1, 1, 4, 4], &lim()).unwrap(), CycElement::from_int(5, 16));
    }

    #[test]
    fn direct_matches_raw() {
        for (q, d) in [(2u64, 3u64), (2, 5), (2, 7), (3, 2), (3, 4), (4, 3), (4, 5), (5, 3), (2, 9), (3, 8), (7, 3)] {
            let spec_field = |a: &Tuple| CharSpec::new(q, d, a, &lim()).unwrap();
            for a in crate::orbit::g_d(d).filter(crate::orbit::is_circ) {
                let s = spec_field(&a);
                if s.big_q > 64 {
                    continue;
                }
                let f = s.field(&lim()).unwrap();
                let v = FieldView::full(&f);
                let direct = jacobi_direct_in(&v, s.d_a, &s.primitive).unwrap();
                let raw = jacobi_raw_in(&v, s.d_a, &s.primitive).unwrap();
                assert_eq!(direct, raw, "q = {q}, d = {d}, a = {a:?}");
            }
        }
    }

    #[test]
    fn gauss_norms() {
        for (p, n) in [(2u64, 2u32), (2, 4), (3, 1), (3, 2), (5, 2), (7, 1)] {
            let f = field(p, n, 1 << 22).unwrap();
            let big_q = f.size() as i64;
            for e in 1..f.size() - 1 {
                let g = gauss_sum(&f, e).unwrap();
                let prod = g.mul(&g.galois_apply(-1).unwrap()).unwrap();
                assert_eq!(prod.as_rational_integer(), Some(big_q.into()), "p = {p}, n = {n}, e = {e}");
            }
        }
        // quadratic character of F_3: g^2 = chi(-1) 3 = -3
        let f3 = field(3, 1, 1 << 22).unwrap();
        let g = gauss_sum(&f3, 1).unwrap();
        assert_eq!(g.mul(&g).unwrap().as_rational_integer(), Some((-3).into()));
        assert!(gauss_sum(&f3, 2).is_err());
    }

    #[test]
    fn fast_matches_direct() {
        for (q, d) in [(2u64, 3u64), (2, 5), (2, 7), (2, 9), (3, 4), (3, 5), (4, 5), (5, 4), (5, 6), (3, 7)] {
            for a in crate::orbit::g_d(d).filter(crate::orbit::is_circ) {
                let fast = jacobi_fast(q, d, &a, &lim()).unwrap();
                let direct = jacobi_direct(q, d, &a, &lim()).unwrap();
                assert_eq!(fast, direct, "q = {q}, d = {d}, a = {a:?}");
            }
        }
    }

    #[test]
    fn extension_examples() {
        let r = jacobi_extension(3, 2, &[1, 1, 1, 1], 2, &lim()).unwrap();
        assert!(r.holds);
        assert_eq!(r.extension.as_rational_integer(), Some(9.into()));
        let r = jacobi_extension(2, 3, &[1, 1, 2, 2], 2, &lim()).unwrap();
        assert_eq!(r.extension.as_rational_integer(), Some(16.into()));
        let r = jacobi_extension(2, 7, &[1, 1, 2, 3], 1, &lim()).unwrap();
        assert_eq!(r.extension, jacobi_direct(2, 7, &[1, 1, 2, 3], &lim()).unwrap());
        assert!(jacobi_extension(2, 7, &[1, 1, 2, 3], 3, &lim()).unwrap().holds);
    }

    #[test]
    fn rh_product_d7() {
        let v = jacobi_fast(2, 7, &[1, 1, 2, 3], &lim()).unwrap();
        assert_eq!(v.conductor(), 7);
        assert_eq!(v.mul(&v.conj()).unwrap().as_rational_integer(), Some(64.into()));
    }

    #[test]
    fn caps() {
        let l = lim();
        assert!(matches!(CharSpec::new(2, 29, &[1, 1, 1, 26], &l), Err(Error::OrbitOrderCap { .. })));
        assert!(matches!(jacobi_direct(2, 13, &[1, 1, 1, 10], &Limits { direct_cap: 1024, ..l.clone() }), Err(Error::DirectSumCap { .. })));
        assert!(CharSpec::new(2, 3, &[1, 1, 1, 1], &l).is_err());
    }

    #[test]
    fn engine_uses_cache() {
        let dir = tempfile::tempdir().unwrap();
        let engine = JacobiEngine::new(lim(), Some(Cache::new(dir.path())));
        let (v, p) = engine.value(3, 10, &[2, 2, 8, 8]).unwrap();
        assert_eq!(p, Provenance::Gauss);
        let (w, p) = engine.value(3, 5, &[1, 1, 4, 4]).unwrap();
        assert_eq!(p, Provenance::Cache);
        assert_eq!(v, w);
        assert_eq!(engine.cache_stats(), (1, 1));
    }
}
