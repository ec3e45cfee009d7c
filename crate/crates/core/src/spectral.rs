//! Eigenpairs, the resolvent and finite-section spectra of `C_t`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cesaro::CesaroOperator;
use crate::error::{Error, Result};
use crate::scalar::{real, Cx, Real};
use crate::series::TaylorSeries;
use crate::weights::{frechet_norm_unchecked, Flavor};

/// Default distance to `{1/(n+1)} ∪ {0}` below which the resolvent refuses.
pub const TOL_LAMBDA: f64 = 1e-6;

/// Largest dimension accepted by [`dense_spectrum_check`].
pub const DENSE_CHECK_MAX: usize = 64;

fn check_t<T: Real>(t: T) -> Result<()> {
    if t >= T::zero() && t < T::one() {
        Ok(())
    } else {
        Err(Error::param("t", format!("{t} is not in [0, 1)")))
    }
}

/// Distance from `nu` to the closed eigenvalue set `{1/(n+1) : n >= 0} ∪ {0}`.
pub fn distance_to_spectrum<T: Real>(nu: Cx<T>) -> T {
    let (x, y) = (nu.re, nu.im);
    let dist = |p: T| ((x - p) * (x - p) + y * y).sqrt();
    let mut best = dist(T::zero()).min(dist(T::one()));
    if x > T::zero() && x < T::one() {
        let inv = T::one() / x;
        // beyond this the nearest points crowd at 0 and are already covered
        if inv < T::of(1e15) {
            for m in [inv.floor(), inv.ceil()] {
                if m >= T::one() {
                    best = best.min(dist(T::one() / m));
                }
            }
        }
    }
    best
}

fn spectral_error<T: Real>(nu: Cx<T>, tol: T) -> Error {
    Error::SpectralPoint {
        re: nu.re.to_f64_lossy(),
        im: nu.im.to_f64_lossy(),
        distance: distance_to_spectrum(nu).to_f64_lossy(),
        tolerance: tol.to_f64_lossy(),
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair<T> {
    pub m: usize,
    pub lambda: T,
    pub eigenseries: TaylorSeries<T>,
}

/// Eigenfunction for `1/(m+1)` from `x_n (n - m) = t n x_{n-1}`, `x_m = 1`,
/// truncated to `degree`.
pub fn eigenpair<T: Real>(t: T, m: usize, degree: usize) -> Result<EigenPair<T>> {
    check_t(t)?;
    if m > degree {
        return Err(Error::param(
            "m",
            format!("index {m} exceeds the truncation degree {degree}"),
        ));
    }
    let mut x = vec![Cx::<T>::default(); degree + 1];
    x[m] = T::one().into();
    let mut prev = T::one();
    for (n, xn) in x.iter_mut().enumerate().skip(m + 1) {
        prev = t * T::of_usize(n) * prev / T::of_usize(n - m);
        *xn = real(prev);
    }
    Ok(EigenPair {
        m,
        lambda: T::one() / T::of_usize(m + 1),
        eigenseries: TaylorSeries::from_vec(x),
    })
}

/// `binom(n, m) t^{n-m}`, i.e. the coefficients of `z^m / (1 - tz)^{m+1}`.
pub fn eigen_closed_form<T: Real>(t: T, m: usize, degree: usize) -> TaylorSeries<T> {
    let coeffs = (0..=degree)
        .map(|n| {
            if n < m {
                return Cx::default();
            }
            let binom = (1..=m).fold(T::one(), |acc, i| {
                acc * T::of_usize(n - m + i) / T::of_usize(i)
            });
            real(binom * t.powi((n - m) as i32))
        })
        .collect();
    TaylorSeries::from_vec(coeffs)
}

#[derive(Clone, Debug)]
pub struct ResolventQuery<T> {
    nu: Cx<T>,
    rhs: TaylorSeries<T>,
    tol_lambda: T,
}

impl<T: Real> ResolventQuery<T> {
    pub fn new(nu: Cx<T>, rhs: TaylorSeries<T>) -> Result<Self> {
        Self::with_tolerance(nu, rhs, T::of(TOL_LAMBDA))
    }

    pub fn with_tolerance(nu: Cx<T>, rhs: TaylorSeries<T>, tol_lambda: T) -> Result<Self> {
        if !nu.re.is_finite() || !nu.im.is_finite() {
            return Err(Error::param("nu", "must be finite"));
        }
        if !(tol_lambda >= T::zero()) {
            return Err(Error::param("tol_lambda", "must be nonnegative"));
        }
        if distance_to_spectrum(nu) < tol_lambda {
            return Err(spectral_error(nu, tol_lambda));
        }
        Ok(Self {
            nu,
            rhs,
            tol_lambda,
        })
    }

    pub fn nu(&self) -> Cx<T> {
        self.nu
    }

    pub fn rhs(&self) -> &TaylorSeries<T> {
        &self.rhs
    }

    pub fn tol_lambda(&self) -> T {
        self.tol_lambda
    }
}

/// `(C_t - nu I)^{-1} g` coefficientwise:
///
/// `a_n = c_n / (1/(n+1) - nu) - nu^{-2} sum_{h=1}^n t^h c_{n-h} / ((n+1) P_{n,h})`,
/// `P_{n,h} = prod_{j=n-h+1}^{n+1} (1 - 1/(j nu))`, with the products grown
/// one factor at a time as `h` increases. Cost is `O(N^2)`.
pub fn resolvent_apply<T: Real>(query: &ResolventQuery<T>, t: T) -> Result<TaylorSeries<T>> {
    check_t(t)?;
    let nu = query.nu;
    let c = query.rhs.coeffs();
    let one = Cx::<T>::from(T::one());
    let inv_nu = one / nu;
    let inv_nu2 = inv_nu * inv_nu;
    // factors 1 - 1/(j nu) for j = 1..=N
    let factor: Vec<Cx<T>> = (0..=c.len())
        .map(|j| one - inv_nu / T::of_usize(j.max(1)))
        .collect();
    let out: Vec<Cx<T>> = (0..c.len())
        .into_par_iter()
        .map(|n| {
            let np1 = T::of_usize(n + 1);
            let diag = c[n] / (Cx::from(T::one() / np1) - nu);
            if n == 0 || t == T::zero() {
                return diag;
            }
            let mut prod = factor[n + 1];
            let mut tp = T::one();
            let mut acc = Cx::<T>::default();
            for h in 1..=n {
                prod *= factor[n + 1 - h];
                tp *= t;
                acc += c[n - h] * tp / prod;
            }
            diag - acc * inv_nu2 / np1
        })
        .collect();
    TaylorSeries::new(out)
}

/// Direct solve of the lower-triangular system `(C_t - nu I) f = g`:
/// `a_n = (c_n - t S_{n-1} / (n+1)) / (1/(n+1) - nu)` with the running sum
/// `S_n = t S_{n-1} + a_n`.
pub fn resolvent_forward_substitution<T: Real>(
    query: &ResolventQuery<T>,
    t: T,
) -> Result<TaylorSeries<T>> {
    check_t(t)?;
    let nu = query.nu;
    let mut s = Cx::<T>::default();
    let mut out = Vec::with_capacity(query.rhs.len());
    for (n, &cn) in query.rhs.coeffs().iter().enumerate() {
        let np1 = T::of_usize(n + 1);
        let a = (cn - s * t / np1) / (Cx::from(T::one() / np1) - nu);
        s = s * t + a;
        out.push(a);
    }
    TaylorSeries::new(out)
}

/// Eigenvalues of the `dim x dim` finite section, read off its diagonal.
pub fn finite_section_spectrum<T: Real>(t: T, dim: usize) -> Result<Vec<T>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::param("t", format!("{t} is not in [0, 1]")));
    }
    if dim == 0 {
        return Err(Error::param("N", "dimension must be at least 1"));
    }
    Ok(CesaroOperator::new(t)?.matrix(dim).diagonal())
}

/// Runs a dense nonsymmetric eigensolver on the finite section and returns
/// the largest deviation from the diagonal, after sorting both sets.
///
/// The solver sees the transpose. The section is far from normal, so its
/// eigenvalues are badly conditioned and the rounding of a Hessenberg/QR
/// sweep on the lower-triangular form costs most digits. The transpose has
/// the same spectrum and is already upper triangular, i.e. in Schur form,
/// so the iteration introduces no perturbation.
pub fn dense_spectrum_check<T: Real>(t: T, dim: usize) -> Result<f64> {
    if dim > DENSE_CHECK_MAX {
        return Err(Error::param(
            "N",
            format!("dense cross-check is capped at {DENSE_CHECK_MAX}, got {dim}"),
        ));
    }
    let diag = finite_section_spectrum(t, dim)?;
    let m = CesaroOperator::new(t)?.matrix(dim);
    let dense = nalgebra::DMatrix::<f64>::from_fn(dim, dim, |i, j| m.get(j, i).to_f64_lossy());
    let mut eig: Vec<(f64, f64)> = dense
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    eig.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut expect: Vec<f64> = diag.iter().map(|d| d.to_f64_lossy()).collect();
    expect.sort_by(f64::total_cmp);
    Ok(eig
        .iter()
        .zip(&expect)
        .map(|(&(re, im), &d)| (re - d).hypot(im))
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductSample<T> {
    pub n: usize,
    pub p_n: T,
    pub scaled: T,
}

#[derive(Clone, Debug)]
pub struct ProductBoundReport<T> {
    pub nu: Cx<T>,
    pub alpha: T,
    pub samples: Vec<ProductSample<T>>,
    /// min of `scaled` over `n >= 10`
    pub d_hat: T,
    /// max of `scaled` over `n >= 10`
    pub big_d_hat: T,
    /// least-squares slope of `log scaled` against `log n` over the last decade
    pub trend_slope: T,
}

impl<T: Real> ProductBoundReport<T> {
    pub fn ratio(&self) -> T {
        self.big_d_hat / self.d_hat
    }
}

const PRODUCT_MIN_N: usize = 100;
const PRODUCT_TOL: f64 = 1e-9;
const PRODUCT_WINDOW_START: usize = 10;

/// `p_n = prod_{k=1}^n |1 - 1/(k nu)|` accumulated as a sum of logarithms,
/// and `p_n n^alpha` with `alpha = Re(1/nu)`, for `n = 1..=n_max`.
pub fn product_bound_scan<T: Real>(nu: Cx<T>, n_max: usize) -> Result<ProductBoundReport<T>> {
    if n_max < PRODUCT_MIN_N {
        return Err(Error::param(
            "nmax",
            format!("must be at least {PRODUCT_MIN_N}, got {n_max}"),
        ));
    }
    let tol = T::of(PRODUCT_TOL);
    if !(distance_to_spectrum(nu) >= tol) {
        return Err(spectral_error(nu, tol));
    }
    let inv_nu = Cx::<T>::from(T::one()) / nu;
    let alpha = inv_nu.re;
    let mut log_p = T::zero();
    let mut samples = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = T::of_usize(n);
        log_p += (Cx::<T>::from(T::one()) - inv_nu / nf).norm().ln();
        samples.push(ProductSample {
            n,
            p_n: log_p.exp(),
            scaled: (log_p + alpha * nf.ln()).exp(),
        });
    }
    let window = &samples[PRODUCT_WINDOW_START - 1..];
    let d_hat = window.iter().map(|s| s.scaled).fold(T::infinity(), T::min);
    let big_d_hat = window.iter().map(|s| s.scaled).fold(T::zero(), T::max);
    let tail = &samples[n_max / 10 - 1..];
    let trend_slope = log_log_slope(tail.iter().map(|s| (T::of_usize(s.n), s.scaled)));
    Ok(ProductBoundReport {
        nu,
        alpha,
        samples,
        d_hat,
        big_d_hat,
        trend_slope,
    })
}

fn log_log_slope<T: Real>(points: impl Iterator<Item = (T, T)>) -> T {
    let pts: Vec<(T, T)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = T::of_usize(pts.len());
    let mx = pts.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let my = pts.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &(x, y) in &pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Parameters of [`resolvent_equicontinuity_scan`].
#[derive(Clone, Copy, Debug)]
pub struct EquicontinuityScan<T> {
    pub mu: Cx<T>,
    pub delta: T,
    pub t: T,
    pub k: u32,
    /// number of points of the ball sampled (boundary circle plus center)
    pub samples: usize,
    pub truncation: usize,
    /// random test functions in addition to the monomials `z^0..z^15`
    pub random_functions: usize,
    pub seed: u64,
}

impl<T: Real> EquicontinuityScan<T> {
    pub fn new(mu: Cx<T>, delta: T, t: T, k: u32, samples: usize) -> Self {
        Self {
            mu,
            delta,
            t,
            k,
            samples,
            truncation: 128,
            random_functions: 16,
            seed: 0,
        }
    }

    /// Sampled points: the center, then `samples - 1` points equally spaced
    /// on the boundary circle (by the maximum principle the supremum over
    /// the ball is reached there).
    pub fn points(&self) -> Vec<Cx<T>> {
        let ring = self.samples.saturating_sub(1).max(1);
        std::iter::once(self.mu)
            .chain((0..ring).map(|j| {
                let th = T::TAU() * T::of_usize(j) / T::of_usize(ring);
                self.mu + Cx::from_polar(self.delta, th)
            }))
            .collect()
    }

    pub fn test_functions(&self) -> Vec<TaylorSeries<T>> {
        let n = self.truncation;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..16.min(n + 1))
            .map(|j| TaylorSeries::monomial(j, n))
            .chain((0..self.random_functions).map(|_| TaylorSeries::random(&mut rng, n)))
            .collect()
    }
}

/// `max ||(C_t - nu I)^{-1} g||_k / ||g||_k` over sampled `nu` in the closed
/// ball `B(mu, delta)` and the scan's test functions.
pub fn resolvent_equicontinuity_scan<T: Real>(scan: &EquicontinuityScan<T>) -> Result<T> {
    check_t(scan.t)?;
    if scan.k < 2 {
        return Err(Error::param(
            "k",
            format!("must be at least 2, got {}", scan.k),
        ));
    }
    if !(scan.delta >= T::zero()) || scan.samples == 0 {
        return Err(Error::param(
            "delta",
            "need delta >= 0 and at least one sample",
        ));
    }
    let gap = distance_to_spectrum(scan.mu) - scan.delta;
    let tol = T::of(TOL_LAMBDA);
    if !(gap > tol) {
        return Err(Error::param(
            "mu",
            format!(
                "ball of radius {} around {}+{}i meets the spectrum",
                scan.delta, scan.mu.re, scan.mu.im
            ),
        ));
    }
    let funcs = scan.test_functions();
    let norms: Vec<T> = funcs
        .iter()
        .map(|g| frechet_norm_unchecked(g.coeffs(), scan.k, Flavor::Sum))
        .collect();
    let ratios: Vec<Result<T>> = scan
        .points()
        .into_par_iter()
        .map(|nu| {
            let mut worst = T::zero();
            for (g, &ng) in funcs.iter().zip(&norms) {
                let q = ResolventQuery::with_tolerance(nu, g.clone(), tol)?;
                let f = resolvent_apply(&q, scan.t)?;
                worst = worst.max(frechet_norm_unchecked(f.coeffs(), scan.k, Flavor::Sum) / ng);
            }
            Ok(worst)
        })
        .collect();
    let mut best = T::zero();
    for r in ratios {
        best = best.max(r?);
    }
    Ok(best)
}
