//! Exact arithmetic in `Z[zeta_m]` and in `Z[1/q]`.
//!
//! A [`CycElement`] keeps a working representation modulo `X^m - 1`
//! (multiplication is a cyclic convolution). Equality, rationality and
//! serialization go through the canonical remainder modulo `Phi_m`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{divisors, gcd, totient};
use crate::error::{Error, Result};

static CYCLOTOMIC: Lazy<Mutex<HashMap<usize, Arc<Vec<i64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The `m`-th cyclotomic polynomial, low-to-high coefficients.
pub fn cyclotomic_poly(m: usize) -> Arc<Vec<i64>> {
    assert!(m >= 1);
    if let Some(c) = CYCLOTOMIC.lock().unwrap().get(&m) {
        return c.clone();
    }
    // X^m - 1 divided by every Phi_k, k | m, k < m.
    let mut num = vec![0i64; m + 1];
    num[0] = -1;
    num[m] = 1;
    for k in divisors(m as u64) {
        let k = k as usize;
        if k == m {
            continue;
        }
        let phi_k = cyclotomic_poly(k);
        num = exact_div_monic(&num, &phi_k);
    }
    let out = Arc::new(num);
    CYCLOTOMIC.lock().unwrap().insert(m, out.clone());
    out
}

fn exact_div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut quot = vec![0i64; a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = r[i + db];
        quot[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    quot
}

/// Element `sum c_i zeta_m^i` of `Z[zeta_m]`.
#[derive(Clone, Debug)]
pub struct CycElement {
    m: usize,
    coeffs: Vec<BigInt>,
}

impl CycElement {
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "conductor must be positive");
        CycElement { m, coeffs: vec![BigInt::zero(); m] }
    }

    pub fn from_int(m: usize, n: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(m);
        x.coeffs[0] = n.into();
        x
    }

    pub fn one(m: usize) -> Self {
        Self::from_int(m, 1)
    }

    /// `zeta_m^k`.
    pub fn zeta_pow(m: usize, k: i64) -> Self {
        let mut x = Self::zero(m);
        x.coeffs[k.rem_euclid(m as i64) as usize] = BigInt::one();
        x
    }

    /// Builds `sum counts[k] zeta_m^k` from a histogram of exponents.
    pub fn from_counts<T: Into<BigInt> + Copy>(m: usize, counts: &[T]) -> Self {
        assert_eq!(counts.len(), m);
        CycElement { m, coeffs: counts.iter().map(|&c| c.into()).collect() }
    }

    /// From coefficients in the power basis `1, zeta, ..., zeta^{k-1}` (`k <= m`).
    pub fn from_coeffs(m: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() > m {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for conductor {m}",
                coeffs.len()
            )));
        }
        let mut c = coeffs;
        c.resize(m, BigInt::zero());
        Ok(CycElement { m, coeffs: c })
    }

    pub fn conductor(&self) -> usize {
        self.m
    }

    /// Working-representation coefficients (length `m`).
    pub fn raw_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::ConductorMismatch(self.m, other.m));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycElement {
            m: self.m,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycElement {
            m: self.m,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        CycElement { m: self.m, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycElement { m: self.m, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let m = self.m;
        let mut out = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = if i + j >= m { i + j - m } else { i + j };
                out[k] += a * b;
            }
        }
        Ok(CycElement { m, coeffs: out })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.m);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).unwrap().reduced();
            }
        }
        acc
    }

    /// `sigma_t : zeta_m -> zeta_m^t`.
    pub fn galois_apply(&self, t: i64) -> Result<Self> {
        let m = self.m as i64;
        if gcd(t.rem_euclid(m) as u64, self.m as u64) != 1 && self.m != 1 {
            return Err(Error::NotCoprime { a: t, m: self.m as u64 });
        }
        let mut out = vec![BigInt::zero(); self.m];
        for (k, c) in self.coeffs.iter().enumerate() {
            let j = (k as i64 * t).rem_euclid(m) as usize;
            out[j] += c;
        }
        Ok(CycElement { m: self.m, coeffs: out })
    }

    /// Complex conjugate `sigma_{-1}`.
    pub fn conj(&self) -> Self {
        self.galois_apply(-1).expect("-1 is always a unit")
    }

    /// Same value at conductor `m2`, a multiple of `m`.
    pub fn embed(&self, m2: usize) -> Result<Self> {
        if !m2.is_multiple_of(self.m) {
            return Err(Error::InvalidParameter(format!(
                "cannot embed conductor {} into {m2}",
                self.m
            )));
        }
        let step = m2 / self.m;
        let mut out = vec![BigInt::zero(); m2];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k * step] = c.clone();
        }
        Ok(CycElement { m: m2, coeffs: out })
    }

    /// Remainder modulo `Phi_m` (length `phi(m)`).
    pub fn canonical(&self) -> Vec<BigInt> {
        let phi = cyclotomic_poly(self.m);
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        for i in (deg..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut r[i]);
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                if pj != 0 {
                    r[i - deg + j] -= &c * pj;
                }
            }
        }
        r.truncate(deg);
        r
    }

    /// Same value with the working representation replaced by the canonical one.
    pub fn reduced(&self) -> Self {
        let mut c = self.canonical();
        c.resize(self.m, BigInt::zero());
        CycElement { m: self.m, coeffs: c }
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().iter().all(Zero::is_zero)
    }

    pub fn as_rational_integer(&self) -> Option<BigInt> {
        let c = self.canonical();
        c[1..].iter().all(Zero::is_zero).then(|| c[0].clone())
    }

    /// Exact division by a rational integer; `None` if not divisible in `Z[zeta_m]`.
    pub fn div_exact(&self, k: &BigInt) -> Option<Self> {
        let c = self.canonical();
        let mut out = Vec::with_capacity(self.m);
        for x in c {
            let (quo, rem) = x.div_rem(k);
            if !rem.is_zero() {
                return None;
            }
            out.push(quo);
        }
        out.resize(self.m, BigInt::zero());
        Some(CycElement { m: self.m, coeffs: out })
    }

    /// For an element of `Q(zeta_{m1}) (x) Q(zeta_{m2})` with coprime `m1, m2`
    /// and `m = m1 * m2`: returns the element at conductor `m1` when the
    /// `zeta_{m2}` components cancel, `None` otherwise.
    pub fn project_coprime(&self, m1: usize) -> Option<Self> {
        let m = self.m;
        if !m.is_multiple_of(m1) {
            return None;
        }
        let m2 = m / m1;
        if gcd(m1 as u64, m2 as u64) != 1 {
            return None;
        }
        if m2 == 1 {
            return Some(self.clone());
        }
        // zeta_m^k = zeta_{m1}^{k1} zeta_{m2}^{k2} with k = k1 * m2 * u + k2 * m1 * v.
        let mut parts: Vec<CycElement> = (0..m2).map(|_| CycElement::zero(m1)).collect();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // zeta_m^k: component exponents solve k = k1*m2 + k2*m1 (mod m).
            let (k1, k2) = crt_split(k, m1, m2);
            parts[k2].coeffs[k1] += c;
        }
        // Basis 1, zeta_{m2}, ..., zeta_{m2}^{phi(m2)-1} over Q(zeta_{m1}) only
        // when m2 is prime; the general case reduces modulo Phi_{m2} with
        // coefficients in Z[zeta_{m1}].
        let phi = cyclotomic_poly(m2);
        let deg = phi.len() - 1;
        for i in (deg..m2).rev() {
            let c = std::mem::replace(&mut parts[i], CycElement::zero(m1));
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                if pj != 0 {
                    let t = c.scale(&BigInt::from(pj));
                    parts[i - deg + j] = parts[i - deg + j].sub(&t).unwrap();
                }
            }
        }
        if parts[1..deg].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(parts.swap_remove(0).reduced())
    }
}

fn crt_split(k: usize, m1: usize, m2: usize) -> (usize, usize) {
    // zeta_m^k with zeta_{m1} = zeta_m^{m2}, zeta_{m2} = zeta_m^{m1}:
    // find k1, k2 with k1*m2 + k2*m1 = k (mod m1*m2).
    let inv_m2 = crate::arith::mod_inverse(m2 as u64 % m1 as u64, m1 as u64).unwrap_or(0) as usize;
    let inv_m1 = crate::arith::mod_inverse(m1 as u64 % m2 as u64, m2 as u64).unwrap_or(0) as usize;
    let k1 = if m1 == 1 { 0 } else { (k % m1) * inv_m2 % m1 };
    let k2 = if m2 == 1 { 0 } else { (k % m2) * inv_m1 % m2 };
    (k1, k2)
}

impl PartialEq for CycElement {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.sub(other).unwrap().is_zero();
        }
        let l = self.m.lcm(&other.m);
        self.embed(l).unwrap() == other.embed(l).unwrap()
    }
}

impl Eq for CycElement {}

impl fmt::Display for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        let mut first = true;
        for (k, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{x}")?,
                _ => write!(f, "{x}*z{}^{k}", self.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycWire {
    m: usize,
    coeffs: Vec<String>,
}

impl Serialize for CycElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycWire { m: self.m, coeffs: self.canonical().iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = CycWire::deserialize(d)?;
        if w.m == 0 || w.coeffs.len() != totient(w.m as u64) as usize {
            return Err(D::Error::custom("coefficient count must equal phi(m)"));
        }
        let coeffs = w
            .coeffs
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycElement::from_coeffs(w.m, coeffs).map_err(D::Error::custom)
    }
}

/// Exact rational `num / q^e` with `q` not dividing `num` (or `num = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPowRational {
    num: BigInt,
    e: i64,
    q: u64,
}

impl QPowRational {
    pub fn new(num: impl Into<BigInt>, e: i64, q: u64) -> Self {
        assert!(q >= 2);
        let mut num = num.into();
        let mut e = e;
        if num.is_zero() {
            return QPowRational { num, e: 0, q };
        }
        let qb = BigInt::from(q);
        loop {
            let (quo, rem) = num.div_rem(&qb);
            if !rem.is_zero() {
                break;
            }
            num = quo;
            e -= 1;
        }
        QPowRational { num, e, q }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Denominator exponent (negative when the value is a multiple of `q`).
    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn base(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.q, other.q, "q mismatch");
        Self::new(&self.num * &other.num, self.e + other.e, self.q)
    }

    pub fn to_rational(&self) -> BigRational {
        let q = BigInt::from(self.q);
        if self.e >= 0 {
            BigRational::new(self.num.clone(), q.pow(self.e as u32))
        } else {
            BigRational::from_integer(&self.num * q.pow((-self.e) as u32))
        }
    }

    /// Integer value, if the denominator is trivial.
    pub fn to_integer(&self) -> Option<BigInt> {
        (self.e <= 0).then(|| &self.num * BigInt::from(self.q).pow((-self.e) as u32))
    }

    /// Three-way comparison of `|value|` against 1.
    pub fn cmp_abs_one(&self) -> std::cmp::Ordering {
        if self.num.is_zero() {
            return std::cmp::Ordering::Less;
        }
        let a = self.num.abs();
        let q = BigInt::from(self.q);
        if self.e >= 0 {
            a.cmp(&q.pow(self.e as u32))
        } else {
            (a * q.pow((-self.e) as u32)).cmp(&BigInt::one())
        }
    }

    /// Natural log of `|value|`.
    pub fn ln_abs(&self) -> f64 {
        ln_bigint(&self.num.abs()) - self.e as f64 * (self.q as f64).ln()
    }

    pub fn sign(&self) -> Sign {
        self.num.sign()
    }
}

impl fmt::Display for QPowRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.e {
            0 => write!(f, "{}", self.num),
            e if e > 0 => write!(f, "{}/{}^{}", self.num, self.q, e),
            e => write!(f, "{}*{}^{}", self.num, self.q, -e),
        }
    }
}

/// Natural logarithm of a positive big integer.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "log of a non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(5), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn cyclotomic_product_identity() {
        for m in 1..=60usize {
            let phi = cyclotomic_poly(m);
            assert_eq!(phi.len() - 1, totient(m as u64) as usize);
            // prod_{k|m} Phi_k = X^m - 1
            let mut prod = vec![1i64];
            for k in divisors(m as u64) {
                let f = cyclotomic_poly(k as usize);
                let mut next = vec![0i64; prod.len() + f.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in f.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut want = vec![0i64; m + 1];
            want[0] = -1;
            want[m] = 1;
            assert_eq!(prod, want, "m = {m}");
        }
    }

    #[test]
    fn ring_examples() {
        let z3 = CycElement::zeta_pow(3, 1);
        let z3sq = CycElement::zeta_pow(3, 2);
        assert_eq!(z3.mul(&z3sq).unwrap(), CycElement::one(3));
        let i = CycElement::zeta_pow(4, 1);
        let one = CycElement::one(4);
        let prod = one.add(&i).unwrap().mul(&one.sub(&i).unwrap()).unwrap();
        assert_eq!(prod.as_rational_integer(), Some(BigInt::from(2)));
        assert!(z3.mul(&CycElement::zero(3)).unwrap().is_zero());
        assert!(matches!(z3.mul(&i), Err(Error::ConductorMismatch(3, 4))));
    }

    #[test]
    fn galois_examples() {
        let z3 = CycElement::zeta_pow(3, 1);
        assert_eq!(z3.galois_apply(2).unwrap(), CycElement::zeta_pow(3, 2));
        let x = CycElement::from_coeffs(5, big(&[1, 1])).unwrap();
        assert_eq!(x.galois_apply(1).unwrap(), x);
        let want = CycElement::one(5).add(&CycElement::zeta_pow(5, 4)).unwrap();
        assert_eq!(x.galois_apply(-1).unwrap(), want);
        assert!(x.galois_apply(5).is_err());
    }

    #[test]
    fn rationality() {
        assert_eq!(CycElement::from_int(3, 3).as_rational_integer(), Some(BigInt::from(3)));
        let s = CycElement::from_counts(3, &[1i64, 1, 1]);
        assert_eq!(s.as_rational_integer(), Some(BigInt::zero()));
        assert_eq!(CycElement::zeta_pow(4, 1).as_rational_integer(), None);
    }

    #[test]
    fn embedding_preserves_value() {
        let x = CycElement::from_coeffs(3, big(&[2, -1, 5])).unwrap();
        let y = x.embed(12).unwrap();
        assert_eq!(x, y);
        assert_eq!(y.embed(24).unwrap(), x);
    }

    #[test]
    fn projection_from_product_conductor() {
        // 3 * zeta_5^2 embedded into conductor 15 (with ζ_3 terms cancelling).
        let x = CycElement::zeta_pow(5, 2).scale(&BigInt::from(3));
        let y = x.embed(15).unwrap();
        let extra = CycElement::from_counts(15, &{
            let mut v = [0i64; 15];
            // 1 + ζ_3 + ζ_3^2 = 0 at conductor 15: exponents 0, 5, 10
            v[0] = 1;
            v[5] = 1;
            v[10] = 1;
            v
        });
        let z = y.add(&extra).unwrap();
        assert_eq!(z.project_coprime(5).unwrap(), x);
        // ζ_3 itself is not in Q(ζ_5)
        assert!(CycElement::zeta_pow(15, 5).project_coprime(5).is_none());
        // p = 2 route: -ζ_3 as ζ_6-conductor element projects to conductor 3
        let w = CycElement::zeta_pow(6, 5);
        assert_eq!(w.project_coprime(3).unwrap(), CycElement::zeta_pow(3, 1).neg());
    }

    #[test]
    fn qpow_examples() {
        let x = QPowRational::new(8, 5, 2);
        assert_eq!(x.numerator(), &BigInt::from(1));
        assert_eq!(x.exponent(), 2);
        let a = QPowRational::new(1, 1, 3);
        let b = QPowRational::new(3, 0, 3);
        assert_eq!(a.mul(&b), QPowRational::new(1, 0, 3));
        assert_eq!(a.mul(&b).cmp_abs_one(), std::cmp::Ordering::Equal);
        let z = QPowRational::new(0, 3, 2);
        assert!(z.is_zero());
        assert_eq!(z.exponent(), 0);
        assert_eq!(QPowRational::new(3, -2, 2).to_integer(), Some(BigInt::from(12)));
        assert_eq!(QPowRational::new(5, 3, 2).cmp_abs_one(), std::cmp::Ordering::Less);
    }

    #[test]
    fn wire_format() {
        let x = CycElement::from_coeffs(5, big(&[7, 0, 0, 0, 3])).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"m":5,"coeffs":["4","-3","-3","-3"]}"#);
        let back: CycElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CycElement>(r#"{"m":5,"coeffs":["1"]}"#).is_err());
    }

    #[test]
    fn ln_big() {
        let n = BigInt::from(2).pow(3000);
        assert!((ln_bigint(&n) - 3000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
