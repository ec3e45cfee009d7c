//! The generalized Cesàro operators `C_t` and their inverse `T_t`.
//!
//! On coefficients `C_t` is the lower-triangular matrix
//! `M[n][k] = t^{n-k} / (n + 1)` for `k <= n`; on functions it is
//! `C_t f(z) = int_0^1 f(sz) / (1 - stz) ds`. `t = 0` is the Hardy operator,
//! `t = 1` the classical Cesàro average.

use num_traits::Zero;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{real, Cx, Real};
use crate::series::TaylorSeries;

/// How `apply` computes the image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// `s_n = t s_{n-1} + a_n`, `b_n = s_n / (n + 1)`; O(N).
    Recurrence,
    /// Dense lower-triangular matrix-vector product; O(N^2).
    Matrix,
    /// Integral form sampled on a circle by Gauss–Legendre, coefficients
    /// recovered by FFT. Validation only.
    Quadrature { nodes: usize },
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recurrence" => Ok(Strategy::Recurrence),
            "matrix" => Ok(Strategy::Matrix),
            "quadrature" => Ok(Strategy::Quadrature { nodes: 128 }),
            other => Err(Error::param(
                "strategy",
                format!("unknown strategy `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CesaroOperator<T> {
    t: T,
    strategy: Strategy,
}

impl<T: Real> CesaroOperator<T> {
    /// `t` must lie in `[0, 1]`.
    pub fn new(t: T) -> Result<Self> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::param("t", format!("{t} is not in [0, 1]")));
        }
        Ok(Self {
            t,
            strategy: Strategy::Recurrence,
        })
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// The image `C_t f`, truncated at the degree of `f`. The whole output
    /// prefix is exact for the recurrence and matrix strategies.
    pub fn apply(&self, f: &TaylorSeries<T>) -> TaylorSeries<T> {
        match self.strategy {
            Strategy::Recurrence => TaylorSeries::from_vec(self.recurrence(f.coeffs())),
            Strategy::Matrix => TaylorSeries::from_vec(self.matrix(f.len()).mul_vec(f.coeffs())),
            Strategy::Quadrature { nodes } => {
                TaylorSeries::from_vec(self.by_quadrature(f, nodes.max(1)))
            }
        }
    }

    pub(crate) fn recurrence(&self, a: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut s = Cx::zero();
        a.iter()
            .enumerate()
            .map(|(n, &an)| {
                s = s * self.t + an;
                s / T::of_usize(n + 1)
            })
            .collect()
    }

    /// The `dim x dim` finite section.
    pub fn matrix(&self, dim: usize) -> LowerTriangular<T> {
        let mut pow = Vec::with_capacity(dim);
        let mut p = T::one();
        for _ in 0..dim {
            pow.push(p);
            p *= self.t;
        }
        let mut data = Vec::with_capacity(dim * (dim + 1) / 2);
        for n in 0..dim {
            let inv = T::one() / T::of_usize(n + 1);
            for k in 0..=n {
                data.push(pow[n - k] * inv);
            }
        }
        LowerTriangular { dim, data }
    }

    /// `C_t f(z)` from `int_0^1 f(sz) / (1 - stz) ds` with an `nodes`-point
    /// Gauss–Legendre rule. Requires `|z| < 1`.
    pub fn apply_integral(&self, f: &TaylorSeries<T>, z: Cx<T>, nodes: usize) -> Result<Cx<T>> {
        if !(z.norm() < T::one()) {
            return Err(Error::OutsideDisc {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
            });
        }
        let rule = GaussLegendre::new(nodes)?;
        Ok(self.integral_with(&rule, f, z))
    }

    fn integral_with(&self, rule: &GaussLegendre<T>, f: &TaylorSeries<T>, z: Cx<T>) -> Cx<T> {
        rule.iter().fold(Cx::zero(), |acc, (s, w)| {
            let sz = z * s;
            acc + f.horner(sz) * w / (real(T::one()) - sz * self.t)
        })
    }

    /// Samples the integral form on `|z| = rho` at `M` points and inverts the
    /// DFT. `M >= 16(N+1)` and `rho^M = 1e-15` keep aliasing at roundoff level
    /// while `rho^{-N} <= 10`.
    fn by_quadrature(&self, f: &TaylorSeries<T>, nodes: usize) -> Vec<Cx<T>> {
        let rule = GaussLegendre::<T>::new(nodes).expect("nodes >= 1");
        let len = f.len();
        let m = (16 * len).next_power_of_two();
        let rho = T::of((-15.0 * std::f64::consts::LN_10 / m as f64).exp());
        let mut planner = FftPlanner::new();
        let inverse = planner.plan_fft_inverse(m);
        let forward = planner.plan_fft_forward(m);
        let theta = T::TAU() / T::of_usize(m);
        let mut acc = vec![Cx::zero(); m];
        for (s, w) in rule.iter() {
            // f(s rho e^{i theta_j}) for every j in one FFT
            let mut buf = vec![Cx::zero(); m];
            let mut p = T::one();
            for (n, &a) in f.coeffs().iter().enumerate() {
                buf[n] = a * p;
                p *= s * rho;
            }
            inverse.process(&mut buf);
            for (j, (slot, v)) in acc.iter_mut().zip(buf).enumerate() {
                let z = Cx::from_polar(rho, theta * T::of_usize(j));
                *slot += v * w / (real(T::one()) - z * (s * self.t));
            }
        }
        forward.process(&mut acc);
        let scale = T::one() / T::of_usize(m);
        let mut rn = T::one();
        acc.iter()
            .take(len)
            .map(|&v| {
                let out = v * scale / rn;
                rn *= rho;
                out
            })
            .collect()
    }
}

/// Dense row-major storage of a lower-triangular matrix.
#[derive(Clone, Debug)]
pub struct LowerTriangular<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> LowerTriangular<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(n, k)`; zero above the diagonal.
    pub fn get(&self, n: usize, k: usize) -> T {
        if k > n {
            T::zero()
        } else {
            self.data[n * (n + 1) / 2 + k]
        }
    }

    pub fn row(&self, n: usize) -> &[T] {
        let start = n * (n + 1) / 2;
        &self.data[start..start + n + 1]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim).map(|n| self.get(n, n)).collect()
    }

    pub fn mul_vec(&self, x: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(x.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|n| {
                self.row(n)
                    .iter()
                    .zip(x)
                    .fold(Cx::zero(), |acc, (&m, &xk)| acc + xk * m)
            })
            .collect()
    }
}

/// `T_t f = (1 - tz)(zf)'`, the inverse of `C_t` on `H(D)`.
#[derive(Clone, Copy, Debug)]
pub struct InverseOperator<T> {
    t: T,
}

impl<T: Real> InverseOperator<T> {
    /// `t` must lie in `[0, 1)`.
    pub fn new(t: T) -> Result<Self> {
        if !(t >= T::zero() && t < T::one()) {
            return Err(Error::param("t", format!("{t} is not in [0, 1)")));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `b_n = (n + 1) a_n - t n a_{n-1}`, exact on the prefix.
    pub fn apply(&self, f: &TaylorSeries<T>) -> TaylorSeries<T> {
        let a = f.coeffs();
        TaylorSeries::from_vec(
            (0..a.len())
                .map(|n| {
                    let cur = a[n] * T::of_usize(n + 1);
                    if n == 0 {
                        cur
                    } else {
                        cur - a[n - 1] * (self.t * T::of_usize(n))
                    }
                })
                .collect(),
        )
    }
}

/// `(log(1-z))^n` together with its image under `C_1`.
#[derive(Clone, Debug)]
pub struct LogImage<T> {
    pub input: TaylorSeries<T>,
    pub output: TaylorSeries<T>,
}

/// `f = (log(1-z))^n` by repeated Cauchy products and `C_1 f` by the recurrence,
/// both truncated at `degree`.
pub fn classical_c1_log_image<T: Real>(n: u32, degree: usize) -> Result<LogImage<T>> {
    if n == 0 {
        return Err(Error::param("n", "power must be at least 1"));
    }
    let input = TaylorSeries::log_one_minus(degree).power_truncated(n, degree);
    let output = CesaroOperator::new(T::one())?.apply(&input);
    Ok(LogImage { input, output })
}

/// Coefficients of `-(log(1-z))^{n+1} / ((n+1) z)` truncated at `degree`.
pub fn c1_log_image_closed_form<T: Real>(n: u32, degree: usize) -> TaylorSeries<T> {
    let p = TaylorSeries::log_one_minus(degree + 1).power_truncated(n + 1, degree + 1);
    p.shift_down()
        .scale_real(-T::one() / T::of_usize(n as usize + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Series;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_out_of_range_t() {
        assert!(CesaroOperator::new(-0.1).is_err());
        assert!(CesaroOperator::new(1.0 + 1e-12).is_err());
        assert!(CesaroOperator::new(f64::NAN).is_err());
        assert!(CesaroOperator::new(1.0).is_ok());
        assert!(InverseOperator::new(1.0).is_err());
    }

    #[test]
    fn hardy_operator_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Series::random(&mut rng, 20);
        let out = CesaroOperator::new(0.0).unwrap().apply(&f);
        for (n, (b, a)) in out.coeffs().iter().zip(f.coeffs()).enumerate() {
            assert!((b - a / (n as f64 + 1.0)).norm() < 1e-16);
        }
    }

    #[test]
    fn classical_average_of_ones() {
        let f = Series::from_real(&[1.0, 1.0, 1.0]).unwrap();
        let out = CesaroOperator::new(1.0).unwrap().apply(&f);
        assert_eq!(out, f);
    }

    #[test]
    fn image_of_constant() {
        let t = 0.5;
        let f1 = Series::constant(c(1.0, 0.0), 30);
        let out = CesaroOperator::new(t).unwrap().apply(&f1);
        for (n, b) in out.coeffs().iter().enumerate() {
            let expect = t.powi(n as i32) / (n as f64 + 1.0);
            assert!((b.re - expect).abs() < 1e-16 * (1.0 + expect));
        }
        assert!((out.coeff(1).re - 0.25).abs() < 1e-16);
        assert!((out.coeff(2).re - 1.0 / 12.0).abs() < 1e-16);
    }

    #[test]
    fn geometric_is_fixed() {
        for &t in &[0.0, 0.2, 0.5, 0.95] {
            let g0 = Series::geometric(t, 300);
            let out = CesaroOperator::new(t).unwrap().apply(&g0);
            assert!(out.max_abs_diff(&g0) < 1e-14, "t={t}");
        }
    }

    #[test]
    fn matrix_entries() {
        let m = CesaroOperator::new(0.5).unwrap().matrix(4);
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(3, 0), 0.125 / 4.0);
        assert_eq!(m.get(2, 1), 0.5 / 3.0);
        assert_eq!(m.diagonal(), vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
    }

    #[test]
    fn strategies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &t in &[0.0, 0.3, 0.9, 1.0] {
            let f = Series::random(&mut rng, 96);
            let op = CesaroOperator::new(t).unwrap();
            let rec = op.apply(&f);
            let mat = op.with_strategy(Strategy::Matrix).apply(&f);
            assert!(mat.relative_diff(&rec) < 1e-13, "t={t}");
            let quad = op
                .with_strategy(Strategy::Quadrature { nodes: 128 })
                .apply(&f);
            assert!(
                quad.relative_diff(&rec) < 1e-8,
                "t={t}: {}",
                quad.relative_diff(&rec)
            );
        }
    }

    #[test]
    fn integral_examples() {
        let op = CesaroOperator::new(0.7).unwrap();
        let one = Series::constant(c(1.0, 0.0), 0);
        assert!((op.apply_integral(&one, c(0.0, 0.0), 8).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let op = CesaroOperator::new(0.5).unwrap();
        let v = op.apply_integral(&one, c(0.8, 0.0), 64).unwrap();
        let expect = -(1.0f64 - 0.4).ln() / 0.4;
        assert!((v.re - expect).abs() < 1e-8 && v.im.abs() < 1e-15);
        assert!((v.re - 1.277064).abs() < 1e-6);

        let id = Series::monomial(1, 1);
        let h = CesaroOperator::new(0.0).unwrap();
        let z = c(0.3, -0.6);
        assert!((h.apply_integral(&id, z, 4).unwrap() - z / 2.0).norm() < 1e-15);

        assert!(op.apply_integral(&one, c(1.0, 0.0), 8).is_err());
        assert!(op.apply_integral(&one, c(0.1, 0.0), 0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let f = Series::from_real(&[2.0, -1.0, 5.0]).unwrap();
        let out = InverseOperator::new(0.0).unwrap().apply(&f);
        assert_eq!(out, Series::from_real(&[2.0, -2.0, 15.0]).unwrap());

        // T_t g0 = g0: (n+1) t^n - t n t^{n-1} = t^n
        let t = 0.5;
        let g0 = Series::geometric(t, 60);
        let out = InverseOperator::new(t).unwrap().apply(&g0);
        assert!(out.max_abs_diff(&g0) < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = 0.3;
        let c_t = CesaroOperator::new(t).unwrap();
        let t_t = InverseOperator::new(t).unwrap();
        for _ in 0..10 {
            let f = Series::random(&mut rng, 128);
            assert!(c_t.apply(&t_t.apply(&f)).max_abs_diff(&f) < 1e-13);
            assert!(t_t.apply(&c_t.apply(&f)).max_abs_diff(&f) < 1e-13);
        }
    }

    #[test]
    fn truncation_commutes_with_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = Series::random(&mut rng, 80);
        for &t in &[0.0, 0.4, 1.0] {
            let op = CesaroOperator::new(t).unwrap();
            let a = op.apply(&f.with_degree(30));
            let b = op.apply(&f).with_degree(30);
            assert_eq!(a, b);
        }
        let inv = InverseOperator::new(0.6).unwrap();
        assert_eq!(inv.apply(&f.with_degree(30)), inv.apply(&f).with_degree(30));
    }

    #[test]
    fn log_image_n1_is_harmonic() {
        let img = classical_c1_log_image::<f64>(1, 64).unwrap();
        assert_eq!(img.input.coeff(0), c(0.0, 0.0));
        assert_eq!(img.input.coeff(1), c(-1.0, 0.0));
        let mut h = 0.0;
        for m in 0..=64 {
            if m > 0 {
                h += 1.0 / m as f64;
            }
            let expect = -h / (m as f64 + 1.0);
            assert!((img.output.coeff(m).re - expect).abs() < 1e-14, "m={m}");
        }
        assert!(classical_c1_log_image::<f64>(0, 8).is_err());
    }

    #[test]
    fn log_image_matches_closed_form() {
        for n in 1..=3 {
            let img = classical_c1_log_image::<f64>(n, 128).unwrap();
            let closed = c1_log_image_closed_form::<f64>(n, 128);
            assert!(img.output.max_abs_diff(&closed) < 1e-10, "n={n}");
        }
    }
}
