//! Iterates and Cesàro means of `C_t`, and the kernel/range decomposition
//! `H(D) = span{g_0} ⊕ {g : g(0) = 0}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cesaro::CesaroOperator;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};
use crate::series::TaylorSeries;
use crate::weights::{frechet_norm_unchecked, weighted_sup_norm, Flavor, SupGrid, Weight};

fn operator<T: Real>(t: T) -> Result<CesaroOperator<T>> {
    if !(t >= T::zero() && t < T::one()) {
        return Err(Error::param("t", format!("{t} is not in [0, 1)")));
    }
    CesaroOperator::new(t)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("n", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// `C_t^n f` by `n` applications of the recurrence.
pub fn power_apply<T: Real>(t: T, f: &TaylorSeries<T>, n: usize) -> Result<TaylorSeries<T>> {
    check_n(n)?;
    let op = operator(t)?;
    let mut a = f.coeffs().to_vec();
    for _ in 0..n {
        a = op.recurrence(&a);
    }
    Ok(TaylorSeries::from_vec(a))
}

/// `T_[n] f = (1/n) sum_{m=1}^n C_t^m f`.
pub fn cesaro_mean<T: Real>(t: T, f: &TaylorSeries<T>, n: usize) -> Result<TaylorSeries<T>> {
    check_n(n)?;
    let mut means = CesaroMeans::new(t, f)?;
    for _ in 1..n {
        means.advance();
    }
    Ok(means.mean())
}

/// Running state for `C_t^m f` and `sum_{j<=m} C_t^j f`.
struct CesaroMeans<T> {
    op: CesaroOperator<T>,
    m: usize,
    iterate: Vec<Cx<T>>,
    sum: Vec<Cx<T>>,
}

impl<T: Real> CesaroMeans<T> {
    fn new(t: T, f: &TaylorSeries<T>) -> Result<Self> {
        let op = operator(t)?;
        let iterate = op.recurrence(f.coeffs());
        Ok(Self {
            op,
            m: 1,
            sum: iterate.clone(),
            iterate,
        })
    }

    fn advance(&mut self) {
        self.iterate = self.op.recurrence(&self.iterate);
        for (s, x) in self.sum.iter_mut().zip(&self.iterate) {
            *s += *x;
        }
        self.m += 1;
    }

    fn mean(&self) -> TaylorSeries<T> {
        let inv = T::one() / T::of_usize(self.m);
        TaylorSeries::from_vec(self.sum.iter().map(|&s| s * inv).collect())
    }
}

/// `P f = f(0) g_0`: projection onto the fixed points along `{g(0) = 0}`.
pub fn ergodic_limit_projection<T: Real>(t: T, f: &TaylorSeries<T>) -> Result<TaylorSeries<T>> {
    operator(t)?;
    Ok(TaylorSeries::geometric(t, f.degree()).scale(f.coeff(0)))
}

/// Solves `(C_t - I) f = g` for `g(0) = 0` with `f(0) = 0`:
/// `f(z) = (tz - 1)^{-1} int_0^z (1 - t xi) h(xi) / xi d xi`, `h = z g' + g`,
/// carried out on coefficients.
pub fn range_preimage<T: Real>(t: T, g: &TaylorSeries<T>) -> Result<TaylorSeries<T>> {
    operator(t)?;
    let g0 = g.coeff(0);
    if g0 != Cx::default() {
        return Err(Error::NotInRange {
            re: g0.re.to_f64_lossy(),
            im: g0.im.to_f64_lossy(),
        });
    }
    let n = g.degree();
    // h(xi)/xi: coefficient j is (j + 2) g_{j+1}
    let u: Vec<Cx<T>> = (0..n)
        .map(|j| g.coeff(j + 1) * T::of_usize(j + 2))
        .collect();
    let mut f = vec![Cx::<T>::default(); n + 1];
    // integrate (1 - t xi) u(xi), then multiply by -1/(1 - tz) as a running sum
    let mut s = Cx::<T>::default();
    for (k, fk) in f.iter_mut().enumerate() {
        let ik = if k == 0 {
            Cx::default()
        } else {
            let w = u[k - 1] - if k >= 2 { u[k - 2] * t } else { Cx::default() };
            w / T::of_usize(k)
        };
        s = s * t + ik;
        *fk = -s;
    }
    Ok(TaylorSeries::from_vec(f))
}

/// Which norm an [`ErgodicTrace`] measures distances in.
#[derive(Clone, Debug, PartialEq)]
pub enum NormTag<T> {
    /// `|||.|||_k`
    KSup(u32),
    /// `||.||_k`
    KSum(u32),
    /// weighted sup-norm grid estimate
    Weighted(Weight<T>, SupGrid),
}

impl<T: Real> NormTag<T> {
    /// Parses `k:<int>` (the sup flavor), `ksum:<int>` or `gamma:<float>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::param("norm", format!("unrecognized norm `{spec}`"));
        let (tag, arg) = spec.trim().split_once(':').ok_or_else(bad)?;
        let k = || -> Result<u32> {
            let k: u32 = arg.parse().map_err(|_| bad())?;
            if k < 2 {
                return Err(Error::param("k", format!("must be at least 2, got {k}")));
            }
            Ok(k)
        };
        match tag {
            "k" => Ok(NormTag::KSup(k()?)),
            "ksum" => Ok(NormTag::KSum(k()?)),
            "gamma" => Ok(NormTag::Weighted(
                Weight::parse_spec(spec)?,
                SupGrid::default(),
            )),
            _ => Err(bad()),
        }
    }

    pub fn measure(&self, f: &TaylorSeries<T>) -> Result<T> {
        match self {
            NormTag::KSup(k) => Ok(frechet_norm_unchecked(f.coeffs(), *k, Flavor::Sup)),
            NormTag::KSum(k) => Ok(frechet_norm_unchecked(f.coeffs(), *k, Flavor::Sum)),
            NormTag::Weighted(v, grid) => Ok(weighted_sup_norm(f, v, grid)?.value),
        }
    }
}

impl<T: Real> std::fmt::Display for NormTag<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormTag::KSup(k) => write!(f, "k:{k}"),
            NormTag::KSum(k) => write!(f, "ksum:{k}"),
            NormTag::Weighted(v, _) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ErgodicTrace<T> {
    pub n_values: Vec<usize>,
    pub distances: Vec<T>,
    pub norm_tag: NormTag<T>,
}

impl<T: Real> ErgodicTrace<T> {
    /// `true` when distances never grow after index `from` (with slack `tol`
    /// relative to the first distance).
    pub fn nonincreasing_from(&self, from: usize, tol: T) -> bool {
        let scale = self.distances.first().copied().unwrap_or(T::zero());
        self.distances
            .iter()
            .skip(from)
            .zip(self.distances.iter().skip(from + 1))
            .all(|(a, b)| *b <= *a + tol * scale)
    }
}

/// `||T_[n] f - P f||` at each of `n_values` (strictly increasing, `>= 1`).
pub fn ergodic_trace<T: Real>(
    t: T,
    f: &TaylorSeries<T>,
    n_values: &[usize],
    norm: NormTag<T>,
) -> Result<ErgodicTrace<T>> {
    if n_values.is_empty() || n_values[0] == 0 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param(
            "n_values",
            "need a nonempty strictly increasing list of positive integers",
        ));
    }
    let limit = ergodic_limit_projection(t, f)?;
    let mut means = CesaroMeans::new(t, f)?;
    let mut distances = Vec::with_capacity(n_values.len());
    for &n in n_values {
        while means.m < n {
            means.advance();
        }
        distances.push(norm.measure(&(&means.mean() - &limit))?);
    }
    Ok(ErgodicTrace {
        n_values: n_values.to_vec(),
        distances,
        norm_tag: norm,
    })
}

/// `1, 2, 4, ...` up to and including `n_max` (appended if not a power of two).
pub fn doubling_schedule(n_max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |&n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect();
    if v.last() != Some(&n_max) && n_max > 0 {
        v.push(n_max);
    }
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerBoundReport<T> {
    pub t: T,
    pub k: u32,
    pub trials: usize,
    pub n_max: usize,
    /// `max (|||C_t^n f|||_k - |||f|||_k)` over trials and `n <= n_max`
    pub max_excess: T,
    /// `max ||C_t^n f||_v / ||f||_v` when a weight was supplied
    pub weighted_max_ratio: Option<T>,
}

impl<T: Real> PowerBoundReport<T> {
    pub fn holds(&self, slack: T) -> bool {
        self.max_excess <= slack
    }
}

/// Optional weighted check for [`power_bound_certificate`].
#[derive(Clone, Debug)]
pub struct WeightedCheck<T> {
    pub weight: Weight<T>,
    pub grid: SupGrid,
    /// iterates `n` at which the weighted norm is estimated
    pub at: Vec<usize>,
}

/// Random-function certificate that `C_t` is power bounded in `|||.|||_k`.
pub fn power_bound_certificate<T: Real>(
    t: T,
    k: u32,
    trials: usize,
    n_max: usize,
    degree: usize,
    seed: u64,
    weighted: Option<&WeightedCheck<T>>,
) -> Result<PowerBoundReport<T>> {
    if k < 2 {
        return Err(Error::param("k", format!("must be at least 2, got {k}")));
    }
    let op = operator(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let funcs: Vec<TaylorSeries<T>> = (0..trials)
        .map(|_| TaylorSeries::random(&mut rng, degree))
        .collect();
    let per: Vec<Result<(T, Option<T>)>> = funcs
        .par_iter()
        .map(|f| {
            let base = frechet_norm_unchecked(f.coeffs(), k, Flavor::Sup);
            let wbase = match weighted {
                Some(w) => Some(weighted_sup_norm(f, &w.weight, &w.grid)?.value),
                None => None,
            };
            let mut a = f.coeffs().to_vec();
            let mut excess = T::neg_infinity();
            let mut ratio = T::zero();
            for n in 1..=n_max {
                a = op.recurrence(&a);
                excess = excess.max(frechet_norm_unchecked(&a, k, Flavor::Sup) - base);
                if let (Some(w), Some(b)) = (weighted, wbase) {
                    if w.at.contains(&n) {
                        let s = TaylorSeries::from_vec(a.clone());
                        ratio = ratio.max(weighted_sup_norm(&s, &w.weight, &w.grid)?.value / b);
                    }
                }
            }
            Ok((excess, wbase.map(|_| ratio)))
        })
        .collect();
    let mut max_excess = T::neg_infinity();
    let mut weighted_max_ratio: Option<T> = None;
    for r in per {
        let (e, w) = r?;
        max_excess = max_excess.max(e);
        if let Some(w) = w {
            weighted_max_ratio = Some(weighted_max_ratio.map_or(w, |m| m.max(w)));
        }
    }
    Ok(PowerBoundReport {
        t,
        k,
        trials,
        n_max,
        max_excess,
        weighted_max_ratio,
    })
}
