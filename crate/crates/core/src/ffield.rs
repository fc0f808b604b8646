//! Table-driven arithmetic in small finite fields `F_{p^n}`.
//!
//! Elements are indices `0..p^n`: the base-`p` digits of an index are the
//! coefficients of the element in the polynomial basis `1, X, ..., X^{n-1}`
//! modulo the defining polynomial. Multiplication goes through the
//! discrete-log tables, addition is digit-wise.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::arith::{divisors, is_prime};
use crate::error::{Error, Result};

/// Default cap on the number of field elements.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 22;

pub type Elem = u32;

const NONE: u32 = u32::MAX;

#[derive(Debug)]
pub struct FieldTable {
    p: u64,
    n: u32,
    size: u64,
    /// Low-to-high coefficients of the monic defining polynomial (length n + 1).
    modulus: Vec<u64>,
    generator: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, or `NONE` when `1 + g^k = 0`.
    zech: Vec<u32>,
    trace: Vec<u8>,
}

impl FieldTable {
    pub fn build(p: u64, n: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        let size = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if size > cap as u128 || size > (u32::MAX as u128) {
            return Err(Error::FieldTooLarge { size, cap });
        }
        let size = size as u64;
        let modulus = least_irreducible(p, n);
        let ring = PolyRing { p, modulus: &modulus };

        let order = size - 1;
        let prime_factors: Vec<u64> = divisors(order)
            .into_iter()
            .filter(|&r| r > 1 && is_prime(r))
            .collect();
        let generator = (1..size)
            .find(|&g| {
                let gp = ring.from_index(g, n);
                prime_factors
                    .iter()
                    .all(|&r| ring.pow(&gp, order / r) != ring.one(n))
            })
            .expect("multiplicative group of a finite field is cyclic") as Elem;

        // Multiplication by the generator is F_p-linear; split the digits in
        // two halves and tabulate each half.
        let gp = ring.from_index(generator as u64, n);
        let low_digits = n / 2;
        let low_size = p.pow(low_digits);
        let high_size = p.pow(n - low_digits);
        let low_tab: Vec<u64> = (0..low_size)
            .map(|x| ring.to_index(&ring.mul(&ring.from_index(x, n), &gp)))
            .collect();
        let high_tab: Vec<u64> = (0..high_size)
            .map(|x| ring.to_index(&ring.mul(&ring.from_index(x * low_size, n), &gp)))
            .collect();

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![NONE; size as usize];
        let mut x: u64 = 1;
        for k in 0..order {
            exp.push(x as Elem);
            log[x as usize] = k as u32;
            x = digit_add(p, low_tab[(x % low_size) as usize], high_tab[(x / low_size) as usize]);
        }
        debug_assert_eq!(x, 1);

        let zech = exp
            .iter()
            .map(|&e| {
                let y = add_one(p, e as u64);
                if y == 0 {
                    NONE
                } else {
                    log[y as usize]
                }
            })
            .collect();

        // Trace is F_p-linear: tabulate it on the basis, extend by digits.
        let basis_trace: Vec<u64> = (0..n)
            .map(|i| {
                let xi = ring.monomial(i, n);
                let mut acc = vec![0; n as usize];
                let mut power = xi;
                for _ in 0..n {
                    acc = ring.add(&acc, &power);
                    power = ring.pow(&power, p);
                }
                debug_assert!(acc[1..].iter().all(|&c| c == 0));
                acc[0]
            })
            .collect();
        let trace = (0..size)
            .map(|mut x| {
                let mut t = 0;
                for tr in &basis_trace {
                    t += (x % p) * tr;
                    x /= p;
                }
                (t % p) as u8
            })
            .collect();

        Ok(FieldTable { p, n, size, modulus, generator, exp, log, zech, trace })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements `Q = p^n`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    /// `generator^k` for any `k` (taken modulo `Q - 1`).
    pub fn pow_gen(&self, k: u64) -> Elem {
        self.exp[(k % (self.size - 1)) as usize]
    }

    pub fn dlog(&self, x: Elem) -> Result<u64> {
        match self.log.get(x as usize) {
            Some(&l) if l != NONE => Ok(l as u64),
            _ => Err(Error::ZeroLog),
        }
    }

    #[inline]
    pub(crate) fn zech_raw(&self, k: usize) -> u32 {
        self.zech[k]
    }

    /// Zech logarithm `log(1 + g^k)`, `None` when `g^k = -1`.
    #[inline]
    pub fn zech(&self, k: u64) -> Option<u64> {
        let z = self.zech[(k % (self.size - 1)) as usize];
        (z != NONE).then_some(z as u64)
    }

    /// Exponent of `-1`.
    pub fn log_minus_one(&self) -> u64 {
        if self.p == 2 {
            0
        } else {
            (self.size - 1) / 2
        }
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        digit_add(self.p, x as u64, y as u64) as Elem
    }

    pub fn neg(&self, x: Elem) -> Elem {
        let p = self.p;
        let mut v = x as u64;
        let mut out = 0;
        let mut place = 1;
        while v > 0 {
            out += ((p - v % p) % p) * place;
            v /= p;
            place *= p;
        }
        out as Elem
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if x == 0 || y == 0 {
            return 0;
        }
        let k = self.log[x as usize] as u64 + self.log[y as usize] as u64;
        self.pow_gen(k)
    }

    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let order = self.size - 1;
        let k = (self.log[x as usize] as u128 * (e % order) as u128 % order as u128) as u64;
        self.pow_gen(k)
    }

    /// The `F_p`-element `x + x^p + ... + x^{p^{n-1}}`.
    pub fn trace_to_prime(&self, x: Elem) -> u64 {
        self.trace[x as usize] as u64
    }

    /// Norm from `F_{p^n}` to its degree-`m` subfield.
    pub fn norm_to(&self, m: u32, x: Elem) -> Result<Elem> {
        let sub = self.subfield(m)?;
        if x == 0 {
            return Ok(0);
        }
        Ok(self.pow(x, sub.cofactor))
    }

    /// View of the unique subfield of degree `m`.
    pub fn subfield(&self, m: u32) -> Result<Subfield<'_>> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::NotSubfield { sub: m, n: self.n });
        }
        let sub_size = self.p.pow(m);
        Ok(Subfield { field: self, degree: m, size: sub_size, cofactor: (self.size - 1) / (sub_size - 1) })
    }
}

/// The subfield `F_{p^m}` inside a larger table, sharing its generator: the
/// subfield generator is `g^c` with `c = (p^n - 1)/(p^m - 1)`.
#[derive(Clone, Copy)]
pub struct Subfield<'a> {
    pub field: &'a FieldTable,
    pub degree: u32,
    pub size: u64,
    pub cofactor: u64,
}

impl Subfield<'_> {
    /// Element `(g^c)^j`.
    pub fn pow_gen(&self, j: u64) -> Elem {
        self.field.pow_gen(j * self.cofactor)
    }

    /// Absolute trace of a subfield element computed inside the subfield.
    pub fn trace_to_prime(&self, x: Elem) -> u64 {
        if self.degree == self.field.n {
            return self.field.trace_to_prime(x);
        }
        let mut acc = 0;
        let mut y = x;
        for _ in 0..self.degree {
            acc = self.field.add(acc, y);
            y = self.field.pow(y, self.field.p);
        }
        debug_assert!((acc as u64) < self.field.p);
        acc as u64
    }
}

static REGISTRY: Lazy<Mutex<HashMap<(u64, u32), Arc<FieldTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Shared, lazily built table for `F_{p^n}`.
pub fn field(p: u64, n: u32, cap: u64) -> Result<Arc<FieldTable>> {
    let size = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::FieldTooLarge { size, cap });
    }
    if let Some(f) = REGISTRY.lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let built = Arc::new(FieldTable::build(p, n, cap)?);
    Ok(REGISTRY.lock().unwrap().entry((p, n)).or_insert(built).clone())
}

fn digit_add(p: u64, mut x: u64, mut y: u64) -> u64 {
    if p == 2 {
        return x ^ y;
    }
    let mut out = 0;
    let mut place = 1;
    while x > 0 || y > 0 {
        out += ((x % p + y % p) % p) * place;
        x /= p;
        y /= p;
        place *= p;
    }
    out
}

fn add_one(p: u64, x: u64) -> u64 {
    let low = x % p;
    x - low + (low + 1) % p
}

/// Arithmetic in `F_p[X]` modulo a monic polynomial, used only while
/// building tables.
struct PolyRing<'a> {
    p: u64,
    modulus: &'a [u64],
}

impl PolyRing<'_> {
    fn one(&self, n: u32) -> Vec<u64> {
        self.monomial(0, n)
    }

    fn monomial(&self, i: u32, n: u32) -> Vec<u64> {
        let mut v = vec![0; n as usize];
        v[i as usize] = 1;
        v
    }

    fn from_index(&self, mut x: u64, n: u32) -> Vec<u64> {
        (0..n)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    fn to_index(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len();
        let mut prod = vec![0u64; 2 * n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        poly_rem(self.p, &mut prod, self.modulus);
        prod.truncate(n);
        prod
    }

    fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one(a.len() as u32);
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Reduce `a` in place modulo the monic `m` over `F_p`.
fn poly_rem(p: u64, a: &mut Vec<u64>, m: &[u64]) {
    let dm = m.len() - 1;
    for i in (dm..a.len()).rev() {
        let c = a[i] % p;
        if c == 0 {
            continue;
        }
        for (j, &mj) in m.iter().enumerate() {
            let k = i - dm + j;
            a[k] = (a[k] + (p - c) * mj) % p;
        }
    }
    a.truncate(dm.max(1));
    a.resize(dm.max(1), 0);
}

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod(a, p - 2, p)
}

/// Remainder of general polynomials over `F_p` (divisor need not be monic).
fn rem_general(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for j in 0..=db {
            let k = dr - db + j;
            r[k] = (r[k] + (p - c) * b[j] % p) % p;
        }
        r.pop();
        trim(&mut r);
        if db == 0 {
            return vec![0];
        }
    }
    r
}

fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let r = rem_general(p, &x, &y);
        x = y;
        y = r;
    }
    x
}

/// A monic degree-`n` polynomial over `F_p` is irreducible iff it shares no
/// factor with `X^{p^k} - X` for `k <= n/2`.
pub fn is_irreducible(p: u64, modulus: &[u64]) -> bool {
    let n = modulus.len() - 1;
    if n == 1 {
        return true;
    }
    let ring = PolyRing { p, modulus };
    let x = ring.monomial(1, n as u32);
    let mut frob = x.clone();
    for _ in 1..=n / 2 {
        frob = ring.pow(&frob, p);
        let mut diff: Vec<u64> = frob.iter().zip(&x).map(|(a, b)| (a + p - b) % p).collect();
        trim(&mut diff);
        let g = poly_gcd(p, modulus, &diff);
        if g.len() > 1 {
            return false;
        }
        if g.len() == 1 && g[0] == 0 {
            // X^{p^k} = X mod f means f splits in F_{p^k}: reducible.
            return false;
        }
    }
    true
}

/// The least monic irreducible polynomial of degree `n`, ordering by the
/// integer whose base-`p` digits are the non-leading coefficients.
fn least_irreducible(p: u64, n: u32) -> Vec<u64> {
    let count = p.pow(n);
    for code in 0..count {
        let mut m: Vec<u64> = Vec::with_capacity(n as usize + 1);
        let mut c = code;
        for _ in 0..n {
            m.push(c % p);
            c /= p;
        }
        m.push(1);
        if n > 1 && m[0] == 0 {
            continue;
        }
        if is_irreducible(p, &m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
