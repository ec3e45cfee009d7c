//! Truncated power series `f(z) = sum_{n <= N} a_n z^n` with complex coefficients.
//!
//! The coefficient vector is the representation: every operator in this crate
//! is lower triangular on coefficients, so the prefix `a_0..=a_N` of an image
//! depends only on the prefix of the input and truncation commutes with
//! application.

use std::io::{Read, Write};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use rand::Rng;
use rustfft::FftPlanner;
use serde::de::{Deserialize, Deserializer};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{cx, real, Cx, Real};

/// Default truncation degree for experiments.
pub const DEFAULT_TRUNCATION: usize = 512;

#[derive(Clone, Debug)]
pub struct TaylorSeries<T> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> TaylorSeries<T> {
    /// Builds a series from its coefficients; rejects an empty vector and
    /// non-finite entries.
    pub fn new(coeffs: Vec<Cx<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    /// Internal constructor for coefficient vectors known to be non-empty.
    /// Finiteness is re-checked in debug builds only.
    pub(crate) fn from_vec(coeffs: Vec<Cx<T>>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| real(c)).collect())
    }

    /// The zero series of the given degree.
    pub fn zero(degree: usize) -> Self {
        Self::from_vec(vec![Cx::zero(); degree + 1])
    }

    /// The constant `c`, padded with zeros up to `degree`.
    pub fn constant(c: Cx<T>, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = c;
        s
    }

    /// `z^m`, padded to `degree` (which is raised to `m` if smaller).
    pub fn monomial(m: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree.max(m));
        s.coeffs[m] = Cx::new(T::one(), T::zero());
        s
    }

    /// Coefficients `t^n`, i.e. `1/(1 - tz)` truncated at `degree`.
    pub fn geometric(t: T, degree: usize) -> Self {
        let mut out = Vec::with_capacity(degree + 1);
        let mut p = T::one();
        for n in 0..=degree {
            out.push(real(p));
            if n < degree {
                p *= t;
            }
        }
        Self::from_vec(out)
    }

    /// Coefficients of `log(1 - z) = -sum z^k / k`.
    pub fn log_one_minus(degree: usize) -> Self {
        let mut out = vec![Cx::zero(); degree + 1];
        for (k, c) in out.iter_mut().enumerate().skip(1) {
            *c = real(-T::one() / T::of_usize(k));
        }
        Self::from_vec(out)
    }

    /// Random coefficients drawn uniformly from the square `[-1,1] x [-1,1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize) -> Self {
        let out = (0..=degree)
            .map(|_| {
                cx(
                    T::of(rng.random_range(-1.0..=1.0)),
                    T::of(rng.random_range(-1.0..=1.0)),
                )
            })
            .collect();
        Self::from_vec(out)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cx<T>> {
        self.coeffs
    }

    /// Coefficient `n`; zero beyond the stored degree.
    pub fn coeff(&self, n: usize) -> Cx<T> {
        self.coeffs.get(n).copied().unwrap_or_else(Cx::zero)
    }

    /// Keeps coefficients `0..=degree`, padding with zeros when the series is shorter.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(degree + 1, Cx::zero());
        Self::from_vec(c)
    }

    /// Drops trailing zero coefficients (keeps at least `a_0`).
    pub fn normalized(&self) -> Self {
        let last = self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        Self::from_vec(self.coeffs[..=last].to_vec())
    }

    /// `max_n |a_n|`.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// `max_n |a_n - b_n|` over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n = self.len().max(other.len());
        (0..n).fold(T::zero(), |m, i| {
            m.max((self.coeff(i) - other.coeff(i)).norm())
        })
    }

    /// `max|a - b| / max|b|`, or the absolute difference when `b` vanishes.
    pub fn relative_diff(&self, reference: &Self) -> T {
        let scale = reference.max_abs();
        let d = self.max_abs_diff(reference);
        if scale > T::zero() {
            d / scale
        } else {
            d
        }
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        Self::from_vec(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn scale_real(&self, c: T) -> Self {
        Self::from_vec(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Horner evaluation at `z`, `|z| < 1`.
    pub fn evaluate(&self, z: Cx<T>) -> Result<Cx<T>> {
        if !(z.norm() < T::one()) {
            return Err(Error::OutsideDisc {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
            });
        }
        Ok(self.horner(z))
    }

    /// Horner evaluation without the disc check. The series is a polynomial,
    /// so this is meaningful anywhere; callers that need it outside the disc
    /// (contour sampling, the integrand on `[0, 1]`) use it directly.
    pub(crate) fn horner(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::zero(), |acc, &a| acc * z + a)
    }

    /// Values `f(r e^{2 pi i j / A})` for `j = 0..A` via one inverse FFT.
    ///
    /// Coefficients beyond `A` are folded modulo `A`, which is exact because
    /// the samples of `z^{n + A}` and `z^n` on the grid coincide.
    pub fn sample_circle(&self, r: T, angles: usize) -> Vec<Cx<T>> {
        assert!(angles > 0, "angle grid must be non-empty");
        let mut buf = vec![Cx::zero(); angles];
        let mut rn = T::one();
        for (n, &a) in self.coeffs.iter().enumerate() {
            buf[n % angles] += a * rn;
            rn *= r;
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(angles).process(&mut buf);
        buf
    }

    /// Cauchy product; the result has degree `deg f + deg g`.
    pub fn cauchy_product(&self, other: &Self) -> Self {
        self.cauchy_product_truncated(other, self.degree() + other.degree())
    }

    /// Cauchy product keeping coefficients `0..=degree`.
    ///
    /// When both factors are truncations of infinite series, the first
    /// `min(deg f, deg g) + 1` output coefficients are exact for the
    /// product of the underlying series.
    pub fn cauchy_product_truncated(&self, other: &Self, degree: usize) -> Self {
        let mut out = vec![Cx::zero(); degree + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(degree + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::from_vec(out)
    }

    /// `f^n` keeping coefficients `0..=degree`.
    pub fn power_truncated(&self, n: u32, degree: usize) -> Self {
        let mut acc = Self::constant(real(T::one()), degree);
        for _ in 0..n {
            acc = acc.cauchy_product_truncated(self, degree);
        }
        acc
    }

    /// Derivative: coefficient `n` is `(n + 1) a_{n+1}`. Degree-0 input gives `[0]`.
    pub fn differentiate(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0);
        }
        Self::from_vec(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &a)| a * T::of_usize(n))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0: coefficient `n + 1` is `a_n / (n + 1)`.
    pub fn integrate(&self) -> Self {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(Cx::zero());
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &a)| a / T::of_usize(n + 1)),
        );
        Self::from_vec(out)
    }

    /// Multiplication by `z`.
    pub fn shift_up(&self) -> Self {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(Cx::zero());
        out.extend_from_slice(&self.coeffs);
        Self::from_vec(out)
    }

    /// Division by `z`, discarding `a_0`.
    pub fn shift_down(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0);
        }
        Self::from_vec(self.coeffs[1..].to_vec())
    }

    /// Coefficient pairs `[re, im]` as `f64`.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coeffs
            .iter()
            .map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()])
            .collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| cx(T::of(p[0]), T::of(p[1]))).collect())
    }

    /// JSON array of `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_pairs()).expect("pairs serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(s)?;
        Self::from_pairs(&pairs)
    }

    /// CSV with header `n,re,im` and one row per coefficient.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        wr.write_record(["n", "re", "im"])?;
        for (n, p) in self.to_pairs().iter().enumerate() {
            wr.write_record([n.to_string(), format_f64(p[0]), format_f64(p[1])])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads `n,re,im` rows; a header row is optional and rows may come in any order.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut rows: Vec<(usize, [f64; 2])> = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            if rec.len() != 3 {
                return Err(Error::Format(format!("row {line}: expected 3 fields")));
            }
            let Ok(n) = rec[0].parse::<usize>() else {
                if line == 0 {
                    continue;
                }
                return Err(Error::Format(format!(
                    "row {line}: bad index `{}`",
                    &rec[0]
                )));
            };
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Format(format!("row {line}: bad number `{s}`")))
            };
            rows.push((n, [parse(&rec[1])?, parse(&rec[2])?]));
        }
        let degree = rows.iter().map(|r| r.0).max().ok_or(Error::EmptySeries)?;
        let mut pairs = vec![[0.0, 0.0]; degree + 1];
        for (n, p) in rows {
            pairs[n] = p;
        }
        Self::from_pairs(&pairs)
    }
}

/// Shortest decimal that round-trips; always uses `.` as separator.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

impl<T: Real> PartialEq for TaylorSeries<T> {
    /// Equality after trailing-zero normalization.
    fn eq(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|i| self.coeff(i) == other.coeff(i))
    }
}

impl<T: Real> Add for &TaylorSeries<T> {
    type Output = TaylorSeries<T>;

    fn add(self, rhs: Self) -> TaylorSeries<T> {
        let n = self.len().max(rhs.len());
        TaylorSeries::from_vec((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Real> Sub for &TaylorSeries<T> {
    type Output = TaylorSeries<T>;

    fn sub(self, rhs: Self) -> TaylorSeries<T> {
        let n = self.len().max(rhs.len());
        TaylorSeries::from_vec((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Real> Neg for &TaylorSeries<T> {
    type Output = TaylorSeries<T>;

    fn neg(self) -> TaylorSeries<T> {
        TaylorSeries::from_vec(self.coeffs.iter().map(|&a| -a).collect())
    }
}

impl<T: Real> Mul for &TaylorSeries<T> {
    type Output = TaylorSeries<T>;

    fn mul(self, rhs: Self) -> TaylorSeries<T> {
        self.cauchy_product(rhs)
    }
}

impl<T: Real> Serialize for TaylorSeries<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for p in self.to_pairs() {
            seq.serialize_element(&p)?;
        }
        seq.end()
    }
}

impl<'de, T: Real> Deserialize<'de> for TaylorSeries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(deserializer)?;
        Self::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// A point `r e^{i theta}` of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscPoint<T> {
    r: T,
    theta: T,
}

impl<T: Real> DiscPoint<T> {
    /// `theta` is reduced into `[0, 2 pi)`.
    pub fn new(r: T, theta: T) -> Result<Self> {
        if !(r >= T::zero() && r < T::one()) {
            return Err(Error::param("r", format!("{r} is not in [0, 1)")));
        }
        if !theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        let two_pi = T::TAU();
        let mut th = theta % two_pi;
        if th < T::zero() {
            th += two_pi;
        }
        Ok(Self { r, theta: th })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn to_complex(&self) -> Cx<T> {
        Cx::from_polar(self.r, self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Series;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Series::new(vec![]), Err(Error::EmptySeries)));
        assert!(matches!(
            Series::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(Series::new(vec![c(f64::INFINITY, 0.0)]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let one = Series::constant(c(1.0, 0.0), 5);
        assert_eq!(one.evaluate(c(0.3, -0.7)).unwrap(), c(1.0, 0.0));

        let geo = Series::geometric(0.5, 200);
        let v = geo.evaluate(c(0.5, 0.0)).unwrap();
        assert!((v - c(4.0 / 3.0, 0.0)).norm() < 1e-12);

        let id = Series::monomial(1, 1);
        assert_eq!(id.evaluate(c(0.3, 0.4)).unwrap(), c(0.3, 0.4));
    }

    #[test]
    fn evaluate_rejects_boundary() {
        let f = Series::constant(c(1.0, 0.0), 0);
        assert!(matches!(
            f.evaluate(c(1.0, 0.0)),
            Err(Error::OutsideDisc { .. })
        ));
        assert!(f.evaluate(c(0.6, 0.8)).is_err());
        assert!(f.evaluate(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn cauchy_product_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Series::random(&mut rng, 7);
        let one = Series::constant(c(1.0, 0.0), 0);
        assert_eq!(one.cauchy_product(&g), g);

        let t = 0.37;
        let n = 40;
        let lin = Series::from_real(&[1.0, -t]).unwrap();
        let geo = Series::geometric(t, n);
        let prod = lin.cauchy_product_truncated(&geo, n);
        let expect = Series::constant(c(1.0, 0.0), n);
        assert!(prod.max_abs_diff(&expect) < 1e-15);

        let p = Series::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(
            (&p * &p).coeffs(),
            Series::from_real(&[1.0, 2.0, 1.0]).unwrap().coeffs()
        );
    }

    #[test]
    fn differentiate_examples() {
        let k = Series::constant(c(3.0, 1.0), 0);
        assert_eq!(k.differentiate().coeffs(), &[c(0.0, 0.0)]);
        let z2 = Series::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            z2.differentiate().coeffs(),
            Series::from_real(&[0.0, 2.0]).unwrap().coeffs()
        );
        let ones = Series::from_real(&[1.0; 4]).unwrap();
        assert_eq!(
            ones.differentiate().coeffs(),
            Series::from_real(&[1.0, 2.0, 3.0]).unwrap().coeffs()
        );
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        let a = Series::from_real(&[1.0, 2.0]).unwrap();
        let b = Series::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.normalized().degree(), 1);
        assert_ne!(a, Series::from_real(&[1.0, 2.0, 1e-300]).unwrap());
        assert_eq!(Series::zero(4).normalized().degree(), 0);
    }

    #[test]
    fn circle_samples_match_horner() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Series::random(&mut rng, 50);
        // angles < len exercises folding
        for &angles in &[16usize, 64, 128] {
            let r = 0.83;
            let vals = f.sample_circle(r, angles);
            for (j, v) in vals.iter().enumerate() {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / angles as f64);
                assert!((v - f.horner(z)).norm() < 1e-12, "angles={angles} j={j}");
            }
        }
    }

    #[test]
    fn json_and_csv_round_trip() {
        let f = Series::new(vec![c(1.0, -0.5), c(0.25, 3.0e-17), c(-2.0, 0.0)]).unwrap();
        let js = f.to_json();
        assert_eq!(js, "[[1.0,-0.5],[0.25,3e-17],[-2.0,0.0]]");
        assert_eq!(Series::from_json(&js).unwrap().coeffs(), f.coeffs());

        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,re,im\n0,1.0,-0.5\n"));
        assert!(!text.contains('\r'));
        assert_eq!(
            Series::read_csv(buf.as_slice()).unwrap().coeffs(),
            f.coeffs()
        );
        assert!(Series::read_csv("0,1.0\n".as_bytes()).is_err());
        assert!(Series::from_json("[[1.0]]").is_err());
    }

    #[test]
    fn disc_point() {
        let p = DiscPoint::new(0.5, -std::f64::consts::FRAC_PI_2).unwrap();
        assert!((p.theta() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert!((p.to_complex() - c(0.0, -0.5)).norm() < 1e-15);
        assert!(DiscPoint::new(1.0, 0.0).is_err());
        assert!(DiscPoint::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn single_precision_instantiation() {
        let f = crate::Series32::geometric(0.5, 60);
        let v = f.evaluate(num_complex::Complex32::new(0.5, 0.0)).unwrap();
        assert!((v.re - 4.0 / 3.0).abs() < 1e-6);
    }

    fn series_strategy(max_degree: usize) -> impl Strategy<Value = Series> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_degree + 1)
            .prop_map(|v| Series::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn product_commutes_and_associates(
            f in series_strategy(12), g in series_strategy(12), h in series_strategy(12)
        ) {
            let fg = f.cauchy_product(&g);
            prop_assert!(fg.max_abs_diff(&g.cauchy_product(&f)) < 1e-14);
            let left = fg.cauchy_product(&h);
            let right = f.cauchy_product(&g.cauchy_product(&h));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }

        #[test]
        fn product_evaluates_to_product(
            f in series_strategy(64), g in series_strategy(64),
            r in 0.0f64..0.9, th in 0.0f64..6.3
        ) {
            let z = Complex64::from_polar(r, th);
            let lhs = f.cauchy_product(&g).evaluate(z).unwrap();
            let rhs = f.evaluate(z).unwrap() * g.evaluate(z).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }

        #[test]
        fn derivative_inverts_antiderivative(f in series_strategy(40)) {
            let back = f.integrate().differentiate();
            prop_assert_eq!(back.len(), f.len());
            for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
                prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON * b.norm());
            }
        }
    }
}
