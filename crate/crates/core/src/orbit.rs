//! Combinatorics of `G_d = {a in (Z/d)^4 : a_0 + a_1 + a_2 + a_3 = 0}`:
//! q-orbits, the subsets `Lambda` they are taken over, orbit statistics and
//! the bad-set counts used by the lower-bound machinery.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd, mult_order, units};
use crate::error::{Error, Result};

pub type Tuple = [u64; 4];

/// Iterates over `G_d` with `(a_0, a_1, a_2)` free and `a_3` determined.
pub fn g_d(d: u64) -> impl Iterator<Item = Tuple> {
    (0..d).flat_map(move |a0| {
        (0..d).flat_map(move |a1| {
            (0..d).map(move |a2| [a0, a1, a2, (3 * d - a0 - a1 - a2) % d])
        })
    })
}

pub fn in_g_d(d: u64, a: &Tuple) -> bool {
    a.iter().all(|&x| x < d) && a.iter().sum::<u64>() % d == 0
}

pub fn is_circ(a: &Tuple) -> bool {
    a.iter().all(|&x| x != 0)
}

pub fn scale(t: u64, d: u64, a: &Tuple) -> Tuple {
    let t = t % d;
    a.map(|x| ((x as u128 * t as u128) % d as u128) as u64)
}

pub fn neg(d: u64, a: &Tuple) -> Tuple {
    a.map(|x| (d - x) % d)
}

/// `d_a = d / gcd(d, a_0, ..., a_3)`.
pub fn d_a(d: u64, a: &Tuple) -> u64 {
    d / a.iter().fold(d, |g, &x| gcd(g, x))
}

/// `a` rescaled into `G_{d_a}`.
pub fn primitive(d: u64, a: &Tuple) -> (u64, Tuple) {
    let da = d_a(d, a);
    let step = d / da;
    (da, a.map(|x| x / step))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    /// The zero tuple.
    Zero,
    /// Some but not all coordinates vanish.
    Mixed,
    /// All coordinates nonzero.
    Circ,
}

impl OrbitClass {
    pub fn of(a: &Tuple) -> Self {
        let zeros = a.iter().filter(|&&x| x == 0).count();
        match zeros {
            4 => OrbitClass::Zero,
            0 => OrbitClass::Circ,
            _ => OrbitClass::Mixed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub rep: Tuple,
    pub d: u64,
    pub d_a: u64,
    pub len: u64,
    pub class: OrbitClass,
}

impl OrbitRecord {
    /// All members `rep, q rep, q^2 rep, ...`.
    pub fn members(&self, q: u64) -> Vec<Tuple> {
        let mut out = Vec::with_capacity(self.len as usize);
        let mut x = self.rep;
        for _ in 0..self.len {
            out.push(x);
            x = scale(q, self.d, &x);
        }
        out
    }
}

/// A `(Z/d)^x`-stable subset of `G_d`.
#[derive(Clone)]
pub enum Lambda {
    Full,
    Circ,
    /// Tuples orthogonal to every listed exponent vector.
    Subgroup(Vec<Tuple>),
    /// Caller-asserted stable predicate; closure under `q` is still checked.
    Predicate(String, Arc<dyn Fn(&Tuple) -> bool + Send + Sync>),
}

impl fmt::Debug for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl Lambda {
    pub fn contains(&self, d: u64, a: &Tuple) -> bool {
        match self {
            Lambda::Full => true,
            Lambda::Circ => is_circ(a),
            Lambda::Subgroup(gens) => gens.iter().all(|h| {
                a.iter().zip(h).map(|(x, y)| (x * (y % d)) % d).sum::<u64>() % d == 0
            }),
            Lambda::Predicate(_, f) => f(a),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Lambda::Full => "full".into(),
            Lambda::Circ => "circ".into(),
            Lambda::Subgroup(gens) => {
                let parts: Vec<String> = gens
                    .iter()
                    .map(|h| h.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                format!("subgroup:{}", parts.join(";"))
            }
            Lambda::Predicate(name, _) => format!("predicate:{name}"),
        }
    }

    /// Parses `full`, `circ` or `subgroup:h0,h1,h2,h3;...`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Lambda::Full),
            "circ" => Ok(Lambda::Circ),
            _ => {
                let body = s
                    .strip_prefix("subgroup:")
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown lambda '{s}'")))?;
                let mut gens = Vec::new();
                for part in body.split(';').filter(|p| !p.trim().is_empty()) {
                    let v: Vec<u64> = part
                        .split(',')
                        .map(|x| x.trim().parse::<u64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::InvalidParameter(format!("bad generator '{part}': {e}")))?;
                    let h: Tuple = v
                        .try_into()
                        .map_err(|_| Error::InvalidParameter(format!("generator '{part}' needs 4 entries")))?;
                    gens.push(h);
                }
                Ok(Lambda::Subgroup(gens))
            }
        }
    }

    /// Number of elements of `Lambda` inside `G_d`.
    pub fn size(&self, d: u64) -> u64 {
        match self {
            Lambda::Full => d * d * d,
            Lambda::Circ => (d - 1) * (d * d + 3 - 3 * d),
            _ => g_d(d).filter(|a| self.contains(d, a)).count() as u64,
        }
    }
}

/// Membership test for the subgroup of `G_d` orthogonal to `generators`.
pub fn lambda_from_subgroup(generators: &[Tuple]) -> Lambda {
    Lambda::Subgroup(generators.to_vec())
}

fn index(d: u64, a: &Tuple) -> usize {
    ((a[0] * d + a[1]) * d + a[2]) as usize
}

/// Partition of `Lambda` into q-orbits, sorted by canonical representative.
pub fn orbits(q: u64, d: u64, lambda: &Lambda) -> Result<Vec<OrbitRecord>> {
    if d < 1 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if gcd(q, d) != 1 {
        return Err(Error::NotCoprime { a: q as i64, m: d });
    }
    let mut seen = vec![false; (d * d * d) as usize];
    let mut out = Vec::new();
    for a in g_d(d) {
        if seen[index(d, &a)] || !lambda.contains(d, &a) {
            continue;
        }
        let mut rep = a;
        let mut x = a;
        let mut len = 0;
        loop {
            if !lambda.contains(d, &x) {
                return Err(Error::NotStable(q));
            }
            seen[index(d, &x)] = true;
            rep = rep.min(x);
            len += 1;
            x = scale(q, d, &x);
            if x == a {
                break;
            }
        }
        let da = d_a(d, &a);
        debug_assert_eq!(len, mult_order(q, da).unwrap());
        out.push(OrbitRecord { rep, d, d_a: da, len, class: OrbitClass::of(&a) });
    }
    out.sort_by_key(|x| x.rep);
    Ok(out)
}

/// Checks `t * Lambda = Lambda` for every unit `t`.
pub fn is_unit_stable(d: u64, lambda: &Lambda) -> bool {
    let us = units(d);
    g_d(d)
        .filter(|a| lambda.contains(d, a))
        .all(|a| us.iter().all(|&t| lambda.contains(d, &scale(t, d, &a))))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitStats {
    pub size: u64,
    pub count: u64,
    pub sum_len: u64,
    pub sum_log_len: f64,
    pub count_bound: f64,
    pub log_len_bound: f64,
    pub loglog_clamped: bool,
    pub count_ok: bool,
    pub log_len_ok: bool,
}

/// Orbit count constant in `|O_q(Lambda)| <= 1 + c log q |Lambda| / log |Lambda|`.
pub const ORBIT_COUNT_CONSTANT: f64 = 9.0;
/// Constant in `sum log|A| <= c log q |Lambda| log log |Lambda| / log |Lambda|`.
pub const ORBIT_LOG_CONSTANT: f64 = 18.0;

/// `log log x`, clamped below at 1 for `x <= e^e`; the flag reports the clamp.
pub fn clamped_loglog(x: f64) -> (f64, bool) {
    let ll = x.ln().ln();
    if x <= std::f64::consts::E.powf(std::f64::consts::E) {
        (ll.max(1.0), true)
    } else {
        (ll, false)
    }
}

pub fn orbit_stats(q: u64, orbit_list: &[OrbitRecord]) -> Result<OrbitStats> {
    let size: u64 = orbit_list.iter().map(|o| o.len).sum();
    if size < 2 {
        return Err(Error::InvalidParameter(format!("|Lambda| = {size} < 2")));
    }
    let count = orbit_list.len() as u64;
    let sum_log_len: f64 = orbit_list.iter().map(|o| (o.len as f64).ln()).sum();
    let n = size as f64;
    let lq = (q as f64).ln();
    let (ll, loglog_clamped) = clamped_loglog(n);
    let count_bound = 1.0 + ORBIT_COUNT_CONSTANT * lq * n / n.ln();
    let log_len_bound = ORBIT_LOG_CONSTANT * lq * n * ll / n.ln();
    Ok(OrbitStats {
        size,
        count,
        sum_len: size,
        sum_log_len,
        count_bound,
        log_len_bound,
        loglog_clamped,
        count_ok: count as f64 <= count_bound,
        log_len_ok: sum_log_len <= log_len_bound,
    })
}

/// Threshold `X` for the bad set: either an integer or `d^{num/den}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BadThreshold {
    Integer(u64),
    Power { num: u32, den: u32 },
}

impl BadThreshold {
    /// Exact `g > X`.
    pub fn exceeded_by(&self, g: u64, d: u64) -> bool {
        match *self {
            BadThreshold::Integer(x) => g > x,
            BadThreshold::Power { num, den } => BigInt::from(g).pow(den) > BigInt::from(d).pow(num),
        }
    }

    /// Parses a decimal exponent such as `0.7` into `d^{7/10}`.
    pub fn power_from_decimal(u: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad exponent '{u}'"));
        let (int, frac) = u.split_once('.').unwrap_or((u, ""));
        let den = 10u32.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let num: u32 = format!("{int}{frac}").parse().map_err(|_| bad())?;
        if num == 0 || num >= den {
            return Err(Error::InvalidParameter(format!("exponent {u} must lie in (0, 1)")));
        }
        let g = gcd(num as u64, den as u64) as u32;
        Ok(BadThreshold::Power { num: num / g, den: den / g })
    }

    pub fn value(&self, d: u64) -> f64 {
        match *self {
            BadThreshold::Integer(x) => x as f64,
            BadThreshold::Power { num, den } => (d as f64).powf(num as f64 / den as f64),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BadSetReport {
    pub d: u64,
    pub count: u64,
    pub group_size: u64,
    pub tau: u64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Number of `a in G_d` whose largest `gcd(d, a_i)` equals `g`, for each `g | d`.
pub fn max_gcd_histogram(d: u64) -> Vec<(u64, u64)> {
    let gt: Vec<u64> = (0..d).map(|x| gcd(d, x)).collect();
    let mut counts = vec![0u64; d as usize + 1];
    for a0 in 0..d {
        for a1 in 0..d {
            let m01 = gt[a0 as usize].max(gt[a1 as usize]);
            let s01 = (a0 + a1) % d;
            for a2 in 0..d {
                let a3 = (2 * d - s01 - a2) % d;
                let m = m01.max(gt[a2 as usize]).max(gt[a3 as usize]);
                counts[m as usize] += 1;
            }
        }
    }
    divisors(d).into_iter().map(|g| (g, counts[g as usize])).collect()
}

/// `|{a in G_d : d > max_i gcd(d, a_i) > X}|` with the bound `4 |G_d| tau(d) / X`.
pub fn bad_set_count(d: u64, threshold: BadThreshold) -> Result<BadSetReport> {
    bad_set_from_histogram(d, &max_gcd_histogram(d), threshold)
}

pub fn bad_set_from_histogram(
    d: u64,
    hist: &[(u64, u64)],
    threshold: BadThreshold,
) -> Result<BadSetReport> {
    if d < 2 {
        return Err(Error::InvalidParameter("d must be >= 2".into()));
    }
    match threshold {
        BadThreshold::Integer(x) if x < 1 || x >= d => {
            return Err(Error::InvalidParameter(format!("threshold {x} outside [1, {d})")))
        }
        _ => {}
    }
    let count: u64 = hist
        .iter()
        .filter(|&&(g, _)| g < d && threshold.exceeded_by(g, d))
        .map(|&(_, c)| c)
        .sum();
    let group_size = d * d * d;
    let tau = divisors(d).len() as u64;
    let rhs = BigInt::from(4 * tau) * BigInt::from(group_size);
    // count <= rhs / X, exactly.
    let within_bound = match threshold {
        BadThreshold::Integer(x) => BigInt::from(count) * BigInt::from(x) <= rhs,
        BadThreshold::Power { num, den } => {
            BigInt::from(count).pow(den) * BigInt::from(d).pow(num) <= rhs.pow(den)
        }
    };
    Ok(BadSetReport {
        d,
        count,
        group_size,
        tau,
        bound: 4.0 * group_size as f64 * tau as f64 / threshold.value(d),
        within_bound,
    })
}
