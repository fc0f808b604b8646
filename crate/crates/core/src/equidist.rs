//! Discrepancy, Koksma and Erdős–Turán evaluators, and the translate averages
//! `Theta_d(a, H)` and `theta_p(a, d)`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{cyclic_subgroup, gcd, units, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::stick::ser_rational;

pub const FLOAT_SLACK: f64 = 1e-9;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSample {
    points: Vec<BigRational>,
}

impl PointSample {
    pub fn new(points: Vec<BigRational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty sample".into()));
        }
        if points.iter().any(|x| x.is_negative() || *x > BigRational::one()) {
            return Err(Error::InvalidParameter("sample point outside [0, 1]".into()));
        }
        Ok(PointSample { points })
    }

    pub fn from_fractions(points: &[(i64, i64)]) -> Result<Self> {
        Self::new(points.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BigRational] {
        &self.points
    }
}

/// Piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BVFunction {
    breaks: Vec<BigRational>,
    values: Vec<BigRational>,
}

impl BVFunction {
    pub fn new(breaks: Vec<BigRational>, values: Vec<BigRational>) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != values.len() {
            return Err(Error::InvalidParameter("need matching breakpoints and values".into()));
        }
        if !breaks[0].is_zero() || !breaks.last().unwrap().is_one() {
            return Err(Error::InvalidParameter("breakpoints must run from 0 to 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("breakpoints must increase strictly".into()));
        }
        Ok(BVFunction { breaks, values })
    }

    /// `F(x) = x`.
    pub fn identity() -> Self {
        Self::new(vec![rat(0, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]).unwrap()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![rat(0, 1), rat(1, 1)], vec![c.clone(), c]).unwrap()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let i = self.breaks.partition_point(|b| b <= x).clamp(1, self.breaks.len() - 1);
        let (x0, x1) = (&self.breaks[i - 1], &self.breaks[i]);
        let (y0, y1) = (&self.values[i - 1], &self.values[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn integral(&self) -> BigRational {
        self.breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| (&b[1] - &b[0]) * (&v[0] + &v[1]) / rat(2, 1))
            .sum()
    }

    pub fn total_variation(&self) -> BigRational {
        self.values.windows(2).map(|v| (&v[1] - &v[0]).abs()).sum()
    }
}

pub fn total_variation(f: &BVFunction) -> BigRational {
    f.total_variation()
}

/// Extreme discrepancy `sup_I |mu(I) - #{x_n in I}/N|`.
///
/// The excess of points is maximised on closed intervals between sample
/// points, the deficit on open intervals whose endpoints are sample points
/// or 0, 1; both are scanned over sorted distinct values.
pub fn discrepancy(s: &PointSample) -> BigRational {
    let n = BigRational::from_integer(s.len().into());
    let mut v = s.points.clone();
    v.sort();
    let mut distinct: Vec<BigRational> = Vec::new();
    let mut at_most: Vec<i64> = Vec::new(); // C(v_i)
    for (i, x) in v.iter().enumerate() {
        if distinct.last() == Some(x) {
            *at_most.last_mut().unwrap() = i as i64 + 1;
        } else {
            distinct.push(x.clone());
            at_most.push(i as i64 + 1);
        }
    }
    let below = |i: usize| if i == 0 { 0 } else { at_most[i - 1] }; // C^-(v_i)
    let mut best = BigRational::zero();
    for i in 0..distinct.len() {
        for j in i..distinct.len() {
            let excess = BigRational::from_integer((at_most[j] - below(i)).into()) / &n
                - (&distinct[j] - &distinct[i]);
            best = best.max(excess);
        }
    }
    // open intervals (a, b): endpoints indexed in {0} + distinct + {1}
    let mut ends: Vec<(BigRational, i64, i64)> = Vec::new(); // (x, C(x), C^-(x))
    ends.push((rat(0, 1), count_le(&v, &rat(0, 1)), 0));
    for (i, x) in distinct.iter().enumerate() {
        ends.push((x.clone(), at_most[i], below(i)));
    }
    ends.push((rat(1, 1), s.len() as i64, count_lt(&v, &rat(1, 1))));
    for i in 0..ends.len() {
        for j in i + 1..ends.len() {
            if ends[j].0 <= ends[i].0 {
                continue;
            }
            let count = ends[j].2 - ends[i].1;
            let deficit = (&ends[j].0 - &ends[i].0) - BigRational::from_integer(count.into()) / &n;
            best = best.max(deficit);
        }
    }
    best
}

fn count_le(sorted: &[BigRational], x: &BigRational) -> i64 {
    sorted.partition_point(|y| y <= x) as i64
}

fn count_lt(sorted: &[BigRational], x: &BigRational) -> i64 {
    sorted.partition_point(|y| y < x) as i64
}

/// Scan over all intervals with endpoints in the sample or `{0, 1}`, with
/// all four open/closed variants, counting points directly.
pub fn discrepancy_brute(s: &PointSample) -> BigRational {
    let n = BigRational::from_integer(s.len().into());
    let mut ends = s.points.clone();
    ends.push(rat(0, 1));
    ends.push(rat(1, 1));
    ends.sort();
    ends.dedup();
    let mut best = BigRational::zero();
    for (i, a) in ends.iter().enumerate() {
        for b in &ends[i..] {
            for (lo_closed, hi_closed) in [(true, true), (true, false), (false, true), (false, false)] {
                if a == b && !(lo_closed && hi_closed) {
                    continue;
                }
                let count = s
                    .points
                    .iter()
                    .filter(|x| {
                        (if lo_closed { *x >= a } else { *x > a }) && (if hi_closed { *x <= b } else { *x < b })
                    })
                    .count();
                let diff = ((b - a) - BigRational::from_integer(count.into()) / &n).abs();
                best = best.max(diff);
            }
        }
    }
    best
}

/// Compensated sum.
fn neumaier(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `|(1/N) sum_n e(k x_n)|`, with `k x_n` reduced mod 1 exactly first.
fn exp_sum_abs(s: &PointSample, k: i64) -> f64 {
    let angles: Vec<f64> = s
        .points
        .iter()
        .map(|x| {
            let kx = x * BigRational::from_integer(k.into());
            let frac = &kx - kx.floor();
            2.0 * PI * to_f64(&frac)
        })
        .collect();
    let re = neumaier(angles.iter().map(|t| t.cos()));
    let im = neumaier(angles.iter().map(|t| t.sin()));
    re.hypot(im) / s.len() as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `6/(K+1) + (4/pi) sum_{k<=K} (1/k) |(1/N) sum e(k x_n)|` against the discrepancy.
pub fn erdos_turan_bound(s: &PointSample, k_max: u32) -> Result<InequalityReport> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("K must be >= 1".into()));
    }
    let tail = neumaier((1..=k_max as i64).map(|k| exp_sum_abs(s, k) / k as f64));
    let rhs = 6.0 / (k_max as f64 + 1.0) + 4.0 / PI * tail;
    let lhs = to_f64(&discrepancy(s));
    Ok(InequalityReport { lhs, rhs, holds: lhs <= rhs + FLOAT_SLACK })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactInequality {
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// `|int F - (1/N) sum F(x_n)| <= V(F) D(x)`, exactly.
pub fn koksma_check(f: &BVFunction, s: &PointSample) -> ExactInequality {
    let avg: BigRational =
        s.points.iter().map(|x| f.eval(x)).sum::<BigRational>() / BigRational::from_integer(s.len().into());
    let lhs = (f.integral() - avg).abs();
    let rhs = f.total_variation() * discrepancy(s);
    let holds = lhs <= rhs;
    ExactInequality { lhs, rhs, holds }
}

fn check_units(d: u64, h: &[u64]) -> Result<()> {
    if h.is_empty() {
        return Err(Error::InvalidParameter("H is empty".into()));
    }
    if let Some(&x) = h.iter().find(|&&x| gcd(x % d, d) != 1) {
        return Err(Error::NotCoprime { a: x as i64, m: d });
    }
    Ok(())
}

/// `(1/phi(d)) sum_g |int F - (1/|H|) sum_h F(<a g h / d>)|`.
pub fn theta_average(d: u64, a: u64, h: &[u64], f: &BVFunction) -> Result<BigRational> {
    if d < 2 {
        return Err(Error::InvalidParameter("d must be >= 2".into()));
    }
    check_units(d, h)?;
    if gcd(a % d, d) != 1 {
        return Err(Error::NotCoprime { a: a as i64, m: d });
    }
    let us = units(d);
    let integral = f.integral();
    let hn = BigRational::from_integer(h.len().into());
    let terms: Vec<BigRational> = us
        .par_iter()
        .map(|&g| {
            let ag = a % d * g % d;
            let avg: BigRational = h
                .iter()
                .map(|&x| f.eval(&rat((ag * (x % d) % d) as i64, d as i64)))
                .sum::<BigRational>()
                / &hn;
            (&integral - avg).abs()
        })
        .collect();
    Ok(terms.into_iter().sum::<BigRational>() / BigRational::from_integer(us.len().into()))
}

/// `c_7(eps) = 12 + e^gamma / (36 pi^3) eps^{-2}`.
pub fn c7(epsilon: f64) -> f64 {
    12.0 + EULER_GAMMA.exp() / (36.0 * PI.powi(3)) / (epsilon * epsilon)
}

fn loglog(d: u64) -> Result<f64> {
    if d < 16 {
        return Err(Error::InvalidParameter(format!("d = {d} < 16; log log d is too small")));
    }
    Ok((d as f64).ln().ln())
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidisReport {
    pub d: u64,
    pub h_size: usize,
    #[serde(serialize_with = "ser_rational")]
    pub theta: BigRational,
    pub c7: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `Theta_d(1, H) <= c_7(eps) (log log d / |H|)^{1/4 - eps}` for `F(x) = x`.
pub fn equidis_bound_check(d: u64, h: &[u64], epsilon: f64) -> Result<EquidisReport> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 1/4)")));
    }
    let ll = loglog(d)?;
    let theta = theta_average(d, 1, h, &BVFunction::identity())?;
    let c = c7(epsilon);
    let bound = c * (ll / h.len() as f64).powf(0.25 - epsilon);
    let holds = to_f64(&theta) <= bound + FLOAT_SLACK;
    Ok(EquidisReport { d, h_size: h.len(), theta, c7: c, bound, holds })
}

/// `psi_H^(y) = (1/|H|) sum_h e(h y / d)`.
pub fn psi_hat(d: u64, h: &[u64], y: u64) -> (f64, f64) {
    let angles: Vec<f64> = h.iter().map(|&x| 2.0 * PI * ((x % d) * (y % d) % d) as f64 / d as f64).collect();
    let n = h.len() as f64;
    (neumaier(angles.iter().map(|t| t.cos())) / n, neumaier(angles.iter().map(|t| t.sin())) / n)
}

/// `(1/phi(d)) sum_g |psi_H^(k g)| <= beta + e^gamma log log d gcd(k, d) / (|H| beta^2)`.
pub fn fourier_avg_check(d: u64, h: &[u64], k: u64, beta: f64) -> Result<InequalityReport> {
    let ll = loglog(d)?;
    check_units(d, h)?;
    if k.is_multiple_of(d) {
        return Err(Error::InvalidParameter("k must be nonzero mod d".into()));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} outside (0, 1]")));
    }
    let us = units(d);
    let lhs = neumaier(us.iter().map(|&g| {
        let (re, im) = psi_hat(d, h, k % d * g % d);
        re.hypot(im)
    })) / us.len() as f64;
    let rhs = beta + EULER_GAMMA.exp() * ll * gcd(k, d) as f64 / (h.len() as f64 * beta * beta);
    Ok(InequalityReport { lhs, rhs, holds: lhs <= rhs + FLOAT_SLACK })
}

/// `(1/phi(d)) sum_g |1/2 - (1/|<p>|) sum_pi <a pi g / d>|`.
pub fn theta_p(a: u64, d: u64, p: u64) -> Result<BigRational> {
    if a.is_multiple_of(d) {
        return Err(Error::InvalidParameter("a must be nonzero mod d".into()));
    }
    let h = cyclic_subgroup(p % d, d)?;
    let us = units(d);
    let hd = (h.len() as u64 * d) as i64;
    let total: BigRational = us
        .iter()
        .map(|&g| {
            let s: u64 = h.iter().map(|&pi| a % d * pi % d * g % d).sum();
            (rat(1, 2) - rat(s as i64, hd)).abs()
        })
        .sum();
    Ok(total / BigRational::from_integer(us.len().into()))
}

/// `<p>` in `(Z/d)^x`.
pub fn subgroup_of(p: u64, d: u64) -> Result<Vec<u64>> {
    cyclic_subgroup(p % d, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variation() {
        assert_eq!(total_variation(&BVFunction::identity()), rat(1, 1));
        assert!(total_variation(&BVFunction::constant(rat(3, 1))).is_zero());
        let tent = BVFunction::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![rat(0, 1), rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(tent.total_variation(), rat(2, 1));
        assert_eq!(tent.integral(), rat(1, 2));
        assert_eq!(tent.eval(&rat(1, 4)), rat(1, 2));
    }

    #[test]
    fn discrepancy_examples() {
        // a single point is always at distance 1: tiny intervals around it
        let one = PointSample::from_fractions(&[(1, 2)]).unwrap();
        assert_eq!(discrepancy(&one), rat(1, 1));
        assert_eq!(discrepancy_brute(&one), rat(1, 1));
        for n in 1..12i64 {
            let pts: Vec<(i64, i64)> = (0..n).map(|k| (2 * k + 1, 2 * n)).collect();
            let s = PointSample::from_fractions(&pts).unwrap();
            assert_eq!(discrepancy(&s), rat(1, n));
            assert_eq!(discrepancy_brute(&s), rat(1, n));
        }
        let zeros = PointSample::from_fractions(&[(0, 1); 5]).unwrap();
        assert_eq!(discrepancy(&zeros), rat(1, 1));
    }

    #[test]
    fn inequalities() {
        let n = 10;
        let pts: Vec<(i64, i64)> = (0..n).map(|k| (2 * k + 1, 2 * n)).collect();
        let s = PointSample::from_fractions(&pts).unwrap();
        let r = erdos_turan_bound(&s, 5).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-12 && r.holds);
        let r = erdos_turan_bound(&PointSample::from_fractions(&[(0, 1)]).unwrap(), 1).unwrap();
        assert!((r.rhs - (3.0 + 4.0 / PI)).abs() < 1e-12 && r.holds);
        let k = koksma_check(&BVFunction::identity(), &s);
        assert!(k.lhs.is_zero() && k.holds);
        let k = koksma_check(&BVFunction::identity(), &PointSample::from_fractions(&[(0, 1)]).unwrap());
        assert_eq!((k.lhs.clone(), k.rhs.clone()), (rat(1, 2), rat(1, 1)));
    }

    #[test]
    fn theta_examples() {
        let f = BVFunction::identity();
        for d in 3..20 {
            assert!(theta_average(d, 1, &units(d), &f).unwrap().is_zero());
        }
        assert_eq!(theta_average(5, 1, &[1], &f).unwrap(), rat(1, 5));
        assert_eq!(theta_average(5, 3, &[1], &f).unwrap(), rat(1, 5));
        assert!(theta_average(6, 1, &[2], &f).is_err());
        assert!(theta_p(1, 5, 2).unwrap().is_zero());
        assert_eq!(theta_p(2, 6, 5).unwrap(), theta_p(1, 3, 5).unwrap());
        assert_eq!(theta_p(2, 6, 7).unwrap(), theta_p(1, 3, 7).unwrap());
    }

    #[test]
    fn bound_checks() {
        for d in [31u64, 257] {
            let h = subgroup_of(2, d).unwrap();
            assert!(equidis_bound_check(d, &h, 0.125).unwrap().holds);
        }
        assert!(equidis_bound_check(15, &[1], 0.125).is_err());
        let h = subgroup_of(2, 21).unwrap();
        assert!(fourier_avg_check(21, &h, 7, 0.5).unwrap().holds);
        assert!(fourier_avg_check(17, &units(17), 1, 0.3).unwrap().holds);
        let r = fourier_avg_check(31, &subgroup_of(2, 31).unwrap(), 3, 1.0).unwrap();
        assert!(r.lhs <= 1.0 + 1e-12 && r.holds);
    }
}
