//! Radial weights and the norms built from them.
//!
//! Sup-type norms are estimated on a polar grid and reported as lower bounds
//! ([`Direction::GridEstimate`]): every value is `v(r)|f(z)|` at an actual
//! point of the disc, so refinement can only raise the estimate.

use std::path::Path;

use log::warn;
use rayon::prelude::*;

use crate::cesaro::CesaroOperator;
use crate::error::{Error, Result};
use crate::scalar::{log_ratio, Cx, Real};
use crate::series::TaylorSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind<T> {
    /// `v = 1`: the space of bounded analytic functions.
    Unit,
    /// `v(r) = (1 - r)^gamma`.
    StandardGamma(T),
    /// `v(r) = log(e / (1 - r))^{-n}`.
    LogPower(u32),
    /// Piecewise-linear interpolation of samples `(r_i, v_i)`, held constant
    /// outside the sampled range.
    Table(Vec<(T, T)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight<T> {
    kind: WeightKind<T>,
}

impl<T: Real> Weight<T> {
    pub fn unit() -> Self {
        Self {
            kind: WeightKind::Unit,
        }
    }

    pub fn standard(gamma: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::InvalidWeight(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            kind: WeightKind::StandardGamma(gamma),
        })
    }

    pub fn log_power(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeight(
                "log-power exponent must be >= 1".into(),
            ));
        }
        Ok(Self {
            kind: WeightKind::LogPower(n),
        })
    }

    /// Samples must have strictly increasing `r` in `[0, 1)` and positive,
    /// non-increasing values.
    pub fn table(mut samples: Vec<(T, T)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidWeight("empty table".into()));
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        for (i, &(r, v)) in samples.iter().enumerate() {
            if !(r >= T::zero() && r < T::one()) {
                return Err(Error::InvalidWeight(format!(
                    "table radius {r} outside [0, 1)"
                )));
            }
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidWeight(format!(
                    "table value {v} is not positive"
                )));
            }
            if i > 0 {
                let (r0, v0) = samples[i - 1];
                if r == r0 {
                    return Err(Error::InvalidWeight(format!("duplicate table radius {r}")));
                }
                if v > v0 {
                    return Err(Error::InvalidWeight(format!(
                        "table is increasing between r={r0} and r={r}"
                    )));
                }
            }
        }
        Ok(Self {
            kind: WeightKind::Table(samples),
        })
    }

    /// Reads `r,v` rows (header optional) from a CSV file.
    pub fn table_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path.as_ref())
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Format(format!("{other:?}")),
            })?;
        let mut samples = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Format(format!(
                    "weight table row {line}: expected 2 fields"
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(r), Ok(v)) => samples.push((T::of(r), T::of(v))),
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::Format(format!(
                        "weight table row {line}: bad number"
                    )))
                }
            }
        }
        Self::table(samples)
    }

    /// Parses `unit`, `gamma:<float>`, `logpow:<int>` or `table:<path.csv>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "unit" {
            return Ok(Self::unit());
        }
        let Some((tag, arg)) = spec.split_once(':') else {
            return Err(Error::InvalidWeight(format!(
                "unrecognized weight `{spec}`"
            )));
        };
        match tag {
            "gamma" => {
                let g: f64 = arg
                    .parse()
                    .map_err(|_| Error::InvalidWeight(format!("bad gamma `{arg}`")))?;
                Self::standard(T::of(g))
            }
            "logpow" => {
                let n: u32 = arg
                    .parse()
                    .map_err(|_| Error::InvalidWeight(format!("bad log-power exponent `{arg}`")))?;
                Self::log_power(n)
            }
            "table" => Self::table_from_csv(arg),
            _ => Err(Error::InvalidWeight(format!(
                "unrecognized weight `{spec}`"
            ))),
        }
    }

    pub fn kind(&self) -> &WeightKind<T> {
        &self.kind
    }

    /// `true` when `v(r) -> 0` as `r -> 1`.
    pub fn vanishes_at_boundary(&self) -> bool {
        match &self.kind {
            WeightKind::Unit => false,
            WeightKind::StandardGamma(_) | WeightKind::LogPower(_) => true,
            WeightKind::Table(_) => false,
        }
    }

    /// `v(r)` for `r` in `[0, 1)`.
    pub fn eval(&self, r: T) -> T {
        match &self.kind {
            WeightKind::Unit => T::one(),
            WeightKind::StandardGamma(g) => (T::one() - r).powf(*g),
            WeightKind::LogPower(n) => {
                let l = T::one() - (-r).ln_1p();
                l.powi(-(*n as i32))
            }
            WeightKind::Table(s) => {
                let first = s[0];
                let last = s[s.len() - 1];
                if r <= first.0 {
                    return first.1;
                }
                if r >= last.0 {
                    return last.1;
                }
                let i = s.partition_point(|p| p.0 <= r);
                let (r0, v0) = s[i - 1];
                let (r1, v1) = s[i];
                v0 + (v1 - v0) * (r - r0) / (r1 - r0)
            }
        }
    }

    /// Checks `0 < v(r) <= v(0)` and monotonicity on `samples` points of `[0, 1)`.
    pub fn check_monotone(&self, samples: usize) -> bool {
        let v0 = self.eval(T::zero());
        let mut prev = v0;
        (0..samples).all(|j| {
            let r = T::of_usize(j) / T::of_usize(samples);
            let v = self.eval(r);
            let ok = v > T::zero() && v <= prev && v <= v0;
            prev = v;
            ok
        })
    }
}

impl<T: Real> std::fmt::Display for Weight<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            WeightKind::Unit => write!(f, "unit"),
            WeightKind::StandardGamma(g) => write!(f, "gamma:{g}"),
            WeightKind::LogPower(n) => write!(f, "logpow:{n}"),
            WeightKind::Table(s) => write!(f, "table[{} samples]", s.len()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// A ratio realized by a concrete witness: a lower bound for an operator norm.
    LowerWitness,
    /// A grid maximum: a lower bound for a sup-norm, converging from below.
    GridEstimate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate<T> {
    pub value: T,
    pub direction: Direction,
    pub radii: usize,
    pub angles: usize,
    pub truncation: usize,
}

/// Polar evaluation grid.
///
/// Radii are `r_j = 1 - 2^{-j/4}`, `j = 0..radii`, clustering toward the
/// boundary where weighted sup-norms are attained. Angles are uniform.
/// With `refine`, the best grid point is polished by alternating
/// golden-section searches in `log(1 - r)` and `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupGrid {
    pub radii: usize,
    pub angles: usize,
    pub refine: bool,
}

impl Default for SupGrid {
    fn default() -> Self {
        Self {
            radii: 96,
            angles: 1024,
            refine: true,
        }
    }
}

impl SupGrid {
    pub fn new(radii: usize, angles: usize) -> Self {
        Self {
            radii,
            angles,
            refine: true,
        }
    }

    pub fn without_refinement(mut self) -> Self {
        self.refine = false;
        self
    }

    pub fn radius<T: Real>(j: usize) -> T {
        T::one() - T::of(2.0).powf(-T::of_usize(j) / T::of(4.0))
    }

    fn validate(&self, degree: usize) -> Result<()> {
        if self.radii < 8 || self.angles < 8 {
            return Err(Error::param(
                "grid",
                format!(
                    "need at least 8 radii and angles, got {}x{}",
                    self.radii, self.angles
                ),
            ));
        }
        if self.angles < 2 * degree {
            warn!(
                "angle grid {} is coarser than 2N = {}; sup estimates may be low",
                self.angles,
                2 * degree
            );
        }
        Ok(())
    }
}

const GOLDEN_STEPS: usize = 48;
const REFINE_ROUNDS: usize = 3;

/// Maximizes a unimodal-looking function on `[lo, hi]`; returns `(x, f(x))`
/// of the best point seen, never worse than `start`.
fn golden_max<T: Real, F: Fn(T) -> T>(f: F, lo: T, hi: T, start: (T, T)) -> (T, T) {
    let inv_phi = T::of((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = start;
    for _ in 0..GOLDEN_STEPS {
        if fc > best.1 {
            best = (c, fc);
        }
        if fd > best.1 {
            best = (d, fd);
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    best
}

/// Max of `|f|` over the angle grid on `|z| = r` and the angle index attaining it.
fn circle_max<T: Real>(f: &TaylorSeries<T>, r: T, angles: usize) -> (T, usize) {
    f.sample_circle(r, angles)
        .iter()
        .enumerate()
        .fold((T::zero(), 0), |(m, jm), (j, v)| {
            let a = v.norm();
            if a > m {
                (a, j)
            } else {
                (m, jm)
            }
        })
}

/// `q_r(f) = sup_{|z| <= r} |f(z)|`, i.e. the max of `|f|` over the angle
/// grid on the circle `|z| = r` (maximum principle).
pub fn q_r_norm<T: Real>(f: &TaylorSeries<T>, r: T, angles: usize) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::param("r", format!("{r} is not in (0, 1)")));
    }
    if angles == 0 {
        return Err(Error::param("angles", "need at least one angle"));
    }
    Ok(circle_max(f, r, angles).0)
}

/// Like [`q_r_norm`], followed by a golden-section polish in `theta`.
pub fn q_r_norm_refined<T: Real>(f: &TaylorSeries<T>, r: T, angles: usize) -> Result<T> {
    let coarse = q_r_norm(f, r, angles)?;
    let (_, j) = circle_max(f, r, angles);
    let step = T::TAU() / T::of_usize(angles);
    let th0 = step * T::of_usize(j);
    let g = |th: T| f.horner(Cx::from_polar(r, th)).norm();
    Ok(golden_max(g, th0 - step, th0 + step, (th0, coarse)).1)
}

/// Grid estimate of `||f||_{inf,v} = sup_z v(z)|f(z)|`.
pub fn weighted_sup_norm<T: Real>(
    f: &TaylorSeries<T>,
    v: &Weight<T>,
    grid: &SupGrid,
) -> Result<NormEstimate<T>> {
    grid.validate(f.degree())?;
    let per_radius: Vec<(T, usize)> = (0..grid.radii)
        .into_par_iter()
        .map(|j| {
            let r = SupGrid::radius::<T>(j);
            let (m, k) = circle_max(f, r, grid.angles);
            (v.eval(r) * m, k)
        })
        .collect();
    let (jbest, &(mut value, kbest)) =
        per_radius
            .iter()
            .enumerate()
            .fold((0, &per_radius[0]), |best, (j, item)| {
                if item.0 > best.1 .0 {
                    (j, item)
                } else {
                    best
                }
            });

    if grid.refine && value > T::zero() {
        value = refine_point(f, v, grid, jbest, kbest, value);
    }

    Ok(NormEstimate {
        value,
        direction: Direction::GridEstimate,
        radii: grid.radii,
        angles: grid.angles,
        truncation: f.degree(),
    })
}

/// Alternating golden-section polish around grid point `(j, k)`, working in
/// `s = -log2(1 - r)` so that the radial bracket scales with the grid.
fn refine_point<T: Real>(
    f: &TaylorSeries<T>,
    v: &Weight<T>,
    grid: &SupGrid,
    j: usize,
    k: usize,
    start: T,
) -> T {
    let two = T::of(2.0);
    let quarter = T::of(0.25);
    let objective = |s: T, th: T| {
        let r = T::one() - two.powf(-s);
        v.eval(r) * f.horner(Cx::from_polar(r, th)).norm()
    };
    let step = T::TAU() / T::of_usize(grid.angles);
    let s_max = T::of_usize(grid.radii - 1) * quarter;
    let mut s = T::of_usize(j) * quarter;
    let mut th = step * T::of_usize(k);
    let mut best = start;
    for _ in 0..REFINE_ROUNDS {
        let lo = (s - quarter).max(T::zero());
        let hi = (s + quarter).min(s_max);
        let (s_new, val) = golden_max(|x| objective(x, th), lo, hi, (s, best));
        s = s_new;
        best = val;
        let (th_new, val) = golden_max(|x| objective(s, x), th - step, th + step, (th, best));
        th = th_new;
        best = val;
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `||f||_k = sum |a_n| r_k^n`
    Sum,
    /// `|||f|||_k = sup |a_n| r_k^n`
    Sup,
}

/// The Fréchet norms on `H(D)` with `r_k = 1 - 1/k`, `k >= 2`.
pub fn frechet_norm_k<T: Real>(f: &TaylorSeries<T>, k: u32, flavor: Flavor) -> Result<T> {
    if k < 2 {
        return Err(Error::param("k", format!("must be at least 2, got {k}")));
    }
    Ok(frechet_norm_unchecked(f.coeffs(), k, flavor))
}

pub(crate) fn frechet_norm_unchecked<T: Real>(a: &[Cx<T>], k: u32, flavor: Flavor) -> T {
    let rk = T::one() - T::one() / T::of_usize(k as usize);
    let mut p = T::one();
    let mut acc = T::zero();
    for c in a {
        let term = c.norm() * p;
        acc = match flavor {
            Flavor::Sum => acc + term,
            Flavor::Sup => acc.max(term),
        };
        p *= rk;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaBound<T> {
    /// `M_gamma = sup_{s in [0,1]} (1 - (1-s)^gamma) / s`
    pub m_gamma: T,
    /// `M_gamma / gamma`, the bound on `||C_t||` over `H_{v_gamma}^inf`.
    pub ratio: T,
}

const GAMMA_GRID: usize = 20_000;

/// `M_gamma` by maximizing `phi(s) = (1 - (1-s)^gamma)/s` on a uniform grid
/// of `[0, 1]` with `phi(0) = gamma`.
pub fn gamma_norm_bound<T: Real>(gamma: T) -> Result<GammaBound<T>> {
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::param(
            "gamma",
            format!("must be positive, got {gamma}"),
        ));
    }
    let phi = |s: T| {
        if s == T::zero() {
            gamma
        } else {
            -(gamma * (-s).ln_1p()).exp_m1() / s
        }
    };
    let m_gamma = (0..=GAMMA_GRID)
        .map(|i| phi(T::of_usize(i) / T::of_usize(GAMMA_GRID)))
        .fold(T::zero(), T::max);
    Ok(GammaBound {
        m_gamma,
        ratio: m_gamma / gamma,
    })
}

/// `min{-log(1-t)/t, M_gamma/gamma}`: equals `1` for `gamma >= 1` and
/// `min{-log(1-t)/t, 1/gamma}` for `gamma < 1`.
pub fn standard_weight_norm_bound<T: Real>(t: T, gamma: T) -> Result<T> {
    Ok(log_ratio(t).min(gamma_norm_bound(gamma)?.ratio))
}

/// Lower-witness estimate of `||C_t||` on `H_v^inf`: the largest ratio
/// `||C_t f||_{inf,v} / ||f||_{inf,v}` over the witnesses, each padded to
/// `truncation` before the operator is applied.
pub fn operator_norm_witness<T: Real>(
    t: T,
    v: &Weight<T>,
    witnesses: &[TaylorSeries<T>],
    truncation: usize,
    grid: &SupGrid,
) -> Result<NormEstimate<T>> {
    if !(t >= T::zero() && t < T::one()) {
        return Err(Error::param(
            "t",
            format!("{t} is not in [0, 1); C_1 does not act on weighted sup-norm spaces"),
        ));
    }
    if witnesses.is_empty() {
        return Err(Error::EmptyWitnesses);
    }
    let op = CesaroOperator::new(t)?;
    let ratios: Vec<Result<T>> = witnesses
        .par_iter()
        .enumerate()
        .map(|(index, w)| {
            let f = w.with_degree(truncation.max(w.degree()));
            let den = weighted_sup_norm(&f, v, grid)?.value;
            if !(den > T::zero()) {
                return Err(Error::DegenerateWitness { index });
            }
            let num = weighted_sup_norm(&op.apply(&f), v, grid)?.value;
            Ok(num / den)
        })
        .collect();
    let mut value = T::zero();
    for r in ratios {
        value = value.max(r?);
    }
    Ok(NormEstimate {
        value,
        direction: Direction::LowerWitness,
        radii: grid.radii,
        angles: grid.angles,
        truncation,
    })
}
