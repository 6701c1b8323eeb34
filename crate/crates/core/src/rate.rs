//! Closed-form CI-rates `(D, E)` of the Z2Z4 scheme and the ternary and
//! q-ary Hamming baselines, the `H(D) + D` bound, and direct-sum frontiers.
//!
//! Distortion is mean squared error per cover symbol; embedding rate is in
//! bits per cover symbol for every scheme. Formulas are generic over the
//! float type; the distortions are also available as exact rationals.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

/// Float types the rate formulas are evaluated in.
pub trait Real: Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational used for closed-form distortions.
pub type Exact = Ratio<u128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Z2Z4 { m: u32 },
    Ternary { mu: u32 },
    QAry { q: u32, mu: u32 },
    Bound,
}

impl Scheme {
    pub fn family(&self) -> &'static str {
        match self {
            Scheme::Z2Z4 { .. } => "z2z4",
            Scheme::Ternary { .. } => "ternary",
            Scheme::QAry { .. } => "qary",
            Scheme::Bound => "bound",
        }
    }
}

/// One CI-rate. `saturation` is `Some(B)` when extreme symbol values are
/// accounted for at depth `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<T> {
    pub d: T,
    pub e: T,
    pub scheme: Scheme,
    pub saturation: Option<u32>,
}

fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite constant")
}

fn pow2<T: Real>(k: i32) -> T {
    cast::<T>(2.0).powi(k)
}

/// Z2Z4 scheme with `N = 2^(m-1)`: `D = (2N-1)/(2N²)`, `E = m/N`.
pub fn z2z4_rate<T: Real>(m: u32) -> RatePoint<T> {
    let n = pow2::<T>(m as i32 - 1);
    let two = cast::<T>(2.0);
    RatePoint {
        d: (two * n - T::one()) / (two * n * n),
        e: cast::<T>(m as f64) / n,
        scheme: Scheme::Z2Z4 { m },
        saturation: None,
    }
}

/// Z2Z4 scheme with the saturation fallback at depth `b`:
/// `D = (2N - 1 + (N-1)/2^(B-2)) / (N·2^m)`.
pub fn z2z4_rate_saturating<T: Real>(m: u32, b: u32) -> RatePoint<T> {
    let n = pow2::<T>(m as i32 - 1);
    let two = cast::<T>(2.0);
    let num = two * n - T::one() + (n - T::one()) / pow2::<T>(b as i32 - 2);
    RatePoint {
        d: num / (n * pow2::<T>(m as i32)),
        saturation: Some(b),
        ..z2z4_rate(m)
    }
}

/// Ternary Hamming codes with `mu` checks: `D = 2/3^mu`, `E = 2·mu·log2(3)/(3^mu - 1)`;
/// with saturation at depth `B` the distortion gains the factor `1 + 3/2^(B-1)`.
pub fn ternary_rate<T: Real>(mu: u32, saturation: Option<u32>) -> RatePoint<T> {
    let p = qary_point::<T>(3, mu, saturation);
    RatePoint {
        scheme: Scheme::Ternary { mu },
        ..p
    }
}

/// `q`-ary Hamming codes (`q` an odd prime power): `D = 2/q^mu`,
/// `E = 2·mu·log2(q)/(q^mu - 1)`; with saturation the distortion gains the
/// factor `1 + q(q-2)/2^(B-1)`.
pub fn qary_rate<T: Real>(q: u32, mu: u32, saturation: Option<u32>) -> Result<RatePoint<T>> {
    if !is_odd_prime_power(q) {
        return Err(Error::InvalidQ(q));
    }
    Ok(qary_point(q, mu, saturation))
}

fn qary_point<T: Real>(q: u32, mu: u32, saturation: Option<u32>) -> RatePoint<T> {
    let qt = cast::<T>(q as f64);
    let qmu = qt.powi(mu as i32);
    let two = cast::<T>(2.0);
    let mut d = two / qmu;
    if let Some(b) = saturation {
        d = d * (T::one() + qt * (qt - two) / pow2::<T>(b as i32 - 1));
    }
    RatePoint {
        d,
        e: two * cast::<T>(mu as f64) * qt.log2() / (qmu - T::one()),
        scheme: Scheme::QAry { q, mu },
        saturation,
    }
}

pub fn is_odd_prime_power(q: u32) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let p = (3..=q)
        .step_by(2)
        .find(|p| q.is_multiple_of(*p))
        .expect("q itself divides q");
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
    }
    r == 1
}

fn exact_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp)
        .expect("exact distortion overflows u128")
}

/// Exact Z2Z4 distortion, with saturation at depth `B` if given.
pub fn z2z4_distortion_exact(m: u32, saturation: Option<u32>) -> Exact {
    let n = exact_pow(2, m - 1);
    let base = Exact::new(2 * n - 1, 2 * n * n);
    match saturation {
        None => base,
        Some(b) => {
            let extra = Exact::new(n - 1, exact_pow(2, b - 2));
            (Exact::from_integer(2 * n - 1) + extra) / Exact::from_integer(n * exact_pow(2, m))
        }
    }
}

/// Exact q-ary distortion (`q = 3` for the ternary scheme).
pub fn qary_distortion_exact(q: u32, mu: u32, saturation: Option<u32>) -> Exact {
    let base = Exact::new(2, exact_pow(q as u128, mu));
    match saturation {
        None => base,
        Some(b) => {
            let q = q as u128;
            base * (Exact::from_integer(1) + Exact::new(q * (q - 2), exact_pow(2, b - 1)))
        }
    }
}

pub fn exact_to_f64(x: &Exact) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// `H(D) + D` with `0·log 0 = 0`, defined on `0 ≤ D ≤ 2/3`.
pub fn entropy_bound<T: Real>(d: T) -> Result<T> {
    let two_thirds = cast::<T>(2.0) / cast::<T>(3.0);
    // one ulp of slack so that D = 2/3 computed in T is accepted
    if !(d >= T::zero() && d <= two_thirds + T::epsilon()) {
        return Err(Error::DistortionOutOfRange(d.to_f64().unwrap_or(f64::NAN)));
    }
    let xlogx = |x: T| {
        if x > T::zero() {
            x * x.log2()
        } else {
            T::zero()
        }
    };
    Ok(-xlogx(d) - xlogx(T::one() - d) + d)
}

pub fn frontier<T: Real>(points: &[RatePoint<T>]) -> Result<Frontier<T>> {
    Frontier::new(points)
}

/// Upper envelope of the CI-rates reachable by direct sums of the inputs.
#[derive(Debug, Clone)]
pub struct Frontier<T> {
    vertices: Vec<RatePoint<T>>,
}

impl<T: Real> Frontier<T> {
    /// Upper concave hull of the points, vertices sorted by strictly increasing `D`.
    pub fn new(points: &[RatePoint<T>]) -> Result<Frontier<T>> {
        if points.is_empty() {
            return Err(Error::InvalidParameters(
                "frontier needs at least one point".into(),
            ));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| {
            a.d.partial_cmp(&b.d)
                .unwrap()
                .then(b.e.partial_cmp(&a.e).unwrap())
        });
        sorted.dedup_by(|b, a| a.d == b.d);

        let mut hull: Vec<RatePoint<T>> = Vec::with_capacity(sorted.len());
        for p in sorted {
            while hull.len() >= 2 {
                let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop `a` unless it lies strictly above the chord o→p
                let cross = (a.d - o.d) * (p.e - o.e) - (a.e - o.e) * (p.d - o.d);
                if cross >= T::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Ok(Frontier { vertices: hull })
    }

    pub fn vertices(&self) -> &[RatePoint<T>] {
        &self.vertices
    }

    pub fn min_d(&self) -> T {
        self.vertices[0].d
    }

    pub fn max_d(&self) -> T {
        self.vertices[self.vertices.len() - 1].d
    }

    /// Embedding rate on the frontier at distortion `d`.
    pub fn rate_at(&self, d: T) -> Result<T> {
        let (lo, hi) = (self.min_d(), self.max_d());
        if !(d >= lo && d <= hi) {
            return Err(Error::OutsideFrontier {
                query: d.to_f64().unwrap_or(f64::NAN),
                min: lo.to_f64().unwrap(),
                max: hi.to_f64().unwrap(),
            });
        }
        let k = self.vertices.partition_point(|v| v.d < d);
        let right = &self.vertices[k];
        if right.d == d || k == 0 {
            return Ok(right.e);
        }
        let left = &self.vertices[k - 1];
        let lambda = (right.d - d) / (right.d - left.d);
        Ok(lambda * left.e + (T::one() - lambda) * right.e)
    }
}

/// Outcome of comparing the Z2Z4 scheme with direct sums of ternary codes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck<T> {
    pub m: u32,
    pub d: T,
    pub e: T,
    /// Lower `mu` of the bracketing pair; `mu + 1` is the other.
    pub mu: u32,
    /// Weight on the `mu + 1` point.
    pub lambda: T,
    pub hull_e: T,
    pub gap: T,
    pub holds: bool,
}

/// Brackets `D_m` between contiguous ternary points `D_{mu+1} < D_m < D_mu`
/// with `mu, mu + 1` in `mu_range`, interpolates their rates, and reports
/// whether the Z2Z4 rate is at least the interpolated one.
pub fn theorem1_check<T: Real>(
    m: u32,
    mu_range: std::ops::RangeInclusive<u32>,
) -> Result<TheoremCheck<T>> {
    let z = z2z4_rate::<T>(m);
    let (mu_lo, mu_hi) = (*mu_range.start(), *mu_range.end());
    let not_bracketed = || Error::NotBracketed {
        m,
        distortion: z.d.to_f64().unwrap(),
        mu_lo,
        mu_hi,
    };
    if mu_lo >= mu_hi {
        return Err(not_bracketed());
    }
    for mu in mu_lo..mu_hi {
        let (big, small) = (ternary_rate::<T>(mu, None), ternary_rate::<T>(mu + 1, None));
        if small.d < z.d && z.d < big.d {
            let lambda = (big.d - z.d) / (big.d - small.d);
            let hull_e = lambda * small.e + (T::one() - lambda) * big.e;
            return Ok(TheoremCheck {
                m,
                d: z.d,
                e: z.e,
                mu,
                lambda,
                hull_e,
                gap: z.e - hull_e,
                holds: z.e >= hull_e,
            });
        }
    }
    Err(not_bracketed())
}

/// Which curves [`emit_rates_csv`] writes, and over which ranges.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub depth: u32,
    pub z2z4_m: std::ops::RangeInclusive<u32>,
    pub ternary_mu: std::ops::RangeInclusive<u32>,
    pub qary_q: Vec<u32>,
    pub qary_mu: std::ops::RangeInclusive<u32>,
    /// Number of evenly spaced samples of the bound over `[0, 2/3]`.
    pub bound_samples: usize,
    pub include_z2z4: bool,
    pub include_ternary: bool,
    pub include_qary: bool,
    pub include_bound: bool,
    pub saturating: bool,
    pub non_saturating: bool,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            depth: 8,
            z2z4_m: 2..=12,
            ternary_mu: 1..=8,
            qary_q: vec![5, 7, 9],
            qary_mu: 1..=6,
            bound_samples: 201,
            include_z2z4: true,
            include_ternary: true,
            include_qary: true,
            include_bound: true,
            saturating: true,
            non_saturating: true,
        }
    }
}

/// Formats with at least 12 significant digits, no exponent.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.11}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Writes `scheme,param,D,E` rows; returns the number of data rows.
pub fn emit_rates_csv<W: std::io::Write + ?Sized>(cfg: &CsvConfig, out: &mut W) -> Result<usize> {
    let mut rows: Vec<(String, String, f64, f64)> = Vec::new();
    let mut variants = Vec::new();
    if cfg.non_saturating {
        variants.push(None);
    }
    if cfg.saturating {
        variants.push(Some(cfg.depth));
    }
    let tag = |family: &str, sat: Option<u32>| match sat {
        None => family.to_string(),
        Some(_) => format!("{family}-sat"),
    };
    for &sat in &variants {
        if cfg.include_z2z4 {
            for m in cfg.z2z4_m.clone() {
                let p: RatePoint<f64> = match sat {
                    None => z2z4_rate(m),
                    Some(b) => z2z4_rate_saturating(m, b),
                };
                rows.push((tag("z2z4", sat), format!("m={m}"), p.d, p.e));
            }
        }
        if cfg.include_ternary {
            for mu in cfg.ternary_mu.clone() {
                let p: RatePoint<f64> = ternary_rate(mu, sat);
                rows.push((tag("ternary", sat), format!("mu={mu}"), p.d, p.e));
            }
        }
        if cfg.include_qary {
            for &q in &cfg.qary_q {
                for mu in cfg.qary_mu.clone() {
                    let p: RatePoint<f64> = qary_rate(q, mu, sat)?;
                    rows.push((tag("qary", sat), format!("q={q};mu={mu}"), p.d, p.e));
                }
            }
        }
    }
    if cfg.include_bound && cfg.bound_samples > 0 {
        let steps = cfg.bound_samples.max(2) - 1;
        for k in 0..=steps {
            let d = if k == steps {
                2.0 / 3.0
            } else {
                (2.0 / 3.0) * k as f64 / steps as f64
            };
            rows.push(("bound".into(), format!("k={k}"), d, entropy_bound(d)?));
        }
    }

    writeln!(out, "scheme,param,D,E")?;
    for (scheme, param, d, e) in &rows {
        writeln!(
            out,
            "{scheme},{param},{},{}",
            format_sig(*d),
            format_sig(*e)
        )?;
    }
    Ok(rows.len())
}
