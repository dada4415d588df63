//! Periodic symmetric matrix functions `B(t)`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

use super::TOL_SYM;

/// `∫₀ᵀ B(t) cos(2πpt/T) dt` and `∫₀ᵀ B(t) sin(2πpt/T) dt` for `p = 0..=p_max`.
pub type FourierIntegrals = Vec<(DMatrix<f64>, DMatrix<f64>)>;

/// A continuous, `T`-periodic, symmetric `2n × 2n` matrix function.
pub trait MatrixFunction: Sync {
    fn half_dim(&self) -> usize;

    fn period(&self) -> f64;

    /// Value at `t`, reduced modulo the period.
    fn eval(&self, t: f64) -> DMatrix<f64>;

    /// Fourier integrals over one period. The default uses the trapezoidal
    /// rule on a uniform grid, which is spectrally accurate for smooth periodic
    /// functions.
    fn fourier_integrals(&self, p_max: usize) -> FourierIntegrals {
        let n_q = default_quadrature_points(p_max);
        trapezoid_fourier(self, p_max, n_q)
    }

    /// Points at which positivity and similar pointwise properties are checked.
    fn check_points(&self) -> Vec<(f64, DMatrix<f64>)> {
        let count = 256;
        let period = self.period();
        (0..count)
            .map(|i| {
                let t = period * i as f64 / count as f64;
                (t, self.eval(t))
            })
            .collect()
    }
}

pub(crate) fn default_quadrature_points(p_max: usize) -> usize {
    (4 * p_max).max(256)
}

/// Trapezoidal Fourier integrals of an arbitrary matrix function.
pub fn trapezoid_fourier<F: MatrixFunction + ?Sized>(
    f: &F,
    p_max: usize,
    n_q: usize,
) -> FourierIntegrals {
    let period = f.period();
    let dim = 2 * f.half_dim();
    let samples: Vec<DMatrix<f64>> = (0..n_q)
        .map(|j| f.eval(period * j as f64 / n_q as f64))
        .collect();
    trapezoid_fourier_from_samples(&samples, period, p_max, dim)
}

/// Fourier integrals from values on the uniform grid `t_j = jT/N`.
pub(crate) fn trapezoid_fourier_from_samples(
    samples: &[DMatrix<f64>],
    period: f64,
    p_max: usize,
    dim: usize,
) -> FourierIntegrals {
    let n_q = samples.len();
    let weight = period / n_q as f64;
    let mut out: FourierIntegrals = (0..=p_max)
        .map(|_| (DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim)))
        .collect();
    for (j, b) in samples.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n_q as f64;
        let step = Complex::new(theta.cos(), theta.sin());
        let mut rot = Complex::new(1.0, 0.0);
        for (p, (c, s)) in out.iter_mut().enumerate() {
            if p % 64 == 0 {
                let ang = theta * p as f64;
                rot = Complex::new(ang.cos(), ang.sin());
            }
            *c += b * (weight * rot.re);
            *s += b * (weight * rot.im);
            rot *= step;
        }
    }
    out
}

/// A sampled matrix path with piecewise-linear interpolation between samples.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPath {
    n: usize,
    period: f64,
    times: Vec<f64>,
    values: Vec<DMatrix<f64>>,
}

impl MatrixPath {
    /// Builds a path from samples `(t_j, B_j)` covering `[0, period]`.
    ///
    /// Samples must be symmetric, strictly increasing in time, start at 0,
    /// end at `period` and satisfy `B(0) = B(period)`.
    pub fn new(n: usize, period: f64, samples: Vec<(f64, DMatrix<f64>)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("half-dimension must be positive".into()));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidInput(format!("period {period} must be positive")));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two samples".into()));
        }
        let (times, values): (Vec<f64>, Vec<DMatrix<f64>>) = samples.into_iter().unzip();
        for (idx, b) in values.iter().enumerate() {
            if b.nrows() != 2 * n || b.ncols() != 2 * n {
                return Err(Error::Dimension(format!(
                    "sample {idx} is {}x{}, expected {}x{}",
                    b.nrows(),
                    b.ncols(),
                    2 * n,
                    2 * n
                )));
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {idx} has non-finite entries")));
            }
            let asym = (b - b.transpose()).norm();
            if asym > TOL_SYM * (1.0 + b.norm()) {
                return Err(Error::InvalidInput(format!(
                    "sample {idx} is not symmetric (‖B − Bᵀ‖ = {asym:.3e})"
                )));
            }
        }
        if times[0].abs() > 1e-12 * period {
            return Err(Error::InvalidInput(format!("first sample time {} is not 0", times[0])));
        }
        let last = *times.last().unwrap();
        if (last - period).abs() > 1e-12 * period {
            return Err(Error::InvalidInput(format!(
                "last sample time {last} does not equal the period {period}"
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
        }
        let mismatch = (&values[0] - values.last().unwrap()).norm();
        if mismatch > TOL_SYM * (1.0 + values[0].norm()) {
            return Err(Error::InvalidInput(format!(
                "path is not periodic: ‖B(0) − B(T)‖ = {mismatch:.3e}"
            )));
        }
        let mut times = times;
        times[0] = 0.0;
        *times.last_mut().unwrap() = period;
        Ok(Self {
            n,
            period,
            times,
            values,
        })
    }

    /// Samples `f` on `count` uniform intervals; the endpoint reuses `f(0)`.
    pub fn from_fn(
        n: usize,
        period: f64,
        count: usize,
        f: impl Fn(f64) -> DMatrix<f64>,
    ) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        let mut samples: Vec<(f64, DMatrix<f64>)> = (0..count)
            .map(|j| {
                let t = period * j as f64 / count as f64;
                let b = f(t);
                (t, 0.5 * (&b + b.transpose()))
            })
            .collect();
        let first = samples[0].1.clone();
        samples.push((period, first));
        Self::new(n, period, samples)
    }

    pub fn constant(b: DMatrix<f64>, period: f64) -> Result<Self> {
        let n = b.nrows() / 2;
        if b.nrows() % 2 != 0 {
            return Err(Error::Dimension(format!("odd matrix dimension {}", b.nrows())));
        }
        Self::new(n, period, vec![(0.0, b.clone()), (period, b)])
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &DMatrix<f64>)> {
        self.times.iter().copied().zip(self.values.iter())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The same matrix function on `[jτ, (j+1)τ]` shifted to start at 0.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let mut times: Vec<f64> = self
            .times
            .iter()
            .take(self.times.len() - 1)
            .map(|&t| t)
            .collect();
        let s = shift.rem_euclid(self.period);
        times.push(s);
        for t in &mut times {
            *t = (*t - s).rem_euclid(self.period);
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * self.period);
        let mut samples: Vec<(f64, DMatrix<f64>)> =
            times.iter().map(|&t| (t, self.eval(t + s))).collect();
        let first = samples[0].1.clone();
        samples.push((self.period, first));
        Self::new(self.n, self.period, samples)
    }

    /// Parses the plain-text matrix-series format: a header line `n tau samples`
    /// followed by one line per sample holding the time and the `2n × 2n`
    /// entries in row-major order. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header `n tau samples`".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: hline,
                message: format!("header has {} fields, expected 3", fields.len()),
            });
        }
        let parse_err = |line: usize, what: &str, s: &str| Error::Parse {
            line,
            message: format!("cannot parse {what} from `{s}`"),
        };
        let n: usize = fields[0].parse().map_err(|_| parse_err(hline, "n", fields[0]))?;
        let tau: f64 = fields[1].parse().map_err(|_| parse_err(hline, "tau", fields[1]))?;
        let count: usize = fields[2]
            .parse()
            .map_err(|_| parse_err(hline, "sample count", fields[2]))?;
        let dim = 2 * n;
        let mut samples = Vec::with_capacity(count);
        for (line, body) in lines {
            let nums: Vec<f64> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| parse_err(line, "number", s)))
                .collect::<Result<_>>()?;
            if nums.len() != 1 + dim * dim {
                return Err(Error::Parse {
                    line,
                    message: format!("row has {} numbers, expected {}", nums.len(), 1 + dim * dim),
                });
            }
            samples.push((nums[0], DMatrix::from_row_slice(dim, dim, &nums[1..])));
        }
        if samples.len() != count {
            return Err(Error::Parse {
                line: hline,
                message: format!("header announces {count} samples, found {}", samples.len()),
            });
        }
        Self::new(n, tau, samples)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {:e} {}\n", self.n, self.period, self.times.len());
        for (t, b) in self.samples() {
            write!(s, "{t:e}").unwrap();
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    write!(s, " {:e}", b[(i, j)]).unwrap();
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let t = t.rem_euclid(self.period);
        let idx = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.times.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.times.len() - 2),
        };
        let h = self.times[idx + 1] - self.times[idx];
        (idx, ((t - self.times[idx]) / h).clamp(0.0, 1.0))
    }
}

/// `∫₀¹ e^{ixu} du` and `∫₀¹ u e^{ixu} du`.
fn segment_kernels(x: f64) -> (Complex<f64>, Complex<f64>) {
    let i = Complex::new(0.0, 1.0);
    if x.abs() < 0.25 {
        // Taylor series; terms fall below 1e-17 well before j = 14.
        let mut f = Complex::new(0.0, 0.0);
        let mut g = Complex::new(0.0, 0.0);
        let mut pow = Complex::new(1.0, 0.0);
        let mut fact = 1.0;
        for j in 0..16 {
            if j > 0 {
                pow *= i * x;
                fact *= j as f64;
            }
            f += pow / (fact * (j + 1) as f64);
            g += pow / (fact * (j + 2) as f64);
        }
        (f, g)
    } else {
        let e = Complex::new(x.cos(), x.sin());
        let f = (e - 1.0) / (i * x);
        let g = e / (i * x) + (e - 1.0) / (x * x);
        (f, g)
    }
}

impl MatrixFunction for MatrixPath {
    fn half_dim(&self) -> usize {
        self.n
    }

    fn period(&self) -> f64 {
        self.period
    }

    fn eval(&self, t: f64) -> DMatrix<f64> {
        let (idx, u) = self.segment(t);
        (1.0 - u) * &self.values[idx] + u * &self.values[idx + 1]
    }

    /// Exact Fourier integrals of the piecewise-linear interpolant.
    fn fourier_integrals(&self, p_max: usize) -> FourierIntegrals {
        let dim = 2 * self.n;
        let omega = 2.0 * std::f64::consts::PI / self.period;
        let mut out: FourierIntegrals = Vec::with_capacity(p_max + 1);
        for p in 0..=p_max {
            let alpha = omega * p as f64;
            let mut c = DMatrix::zeros(dim, dim);
            let mut s = DMatrix::zeros(dim, dim);
            for seg in 0..self.times.len() - 1 {
                let t0 = self.times[seg];
                let h = self.times[seg + 1] - t0;
                let (f, g) = segment_kernels(alpha * h);
                let phase = Complex::new((alpha * t0).cos(), (alpha * t0).sin());
                let w0 = phase * (f - g) * h;
                let w1 = phase * g * h;
                c += &self.values[seg] * w0.re;
                c += &self.values[seg + 1] * w1.re;
                s += &self.values[seg] * w0.im;
                s += &self.values[seg + 1] * w1.im;
            }
            out.push((c, s));
        }
        out
    }

    /// Positivity of a piecewise-linear path is decided at its samples.
    fn check_points(&self) -> Vec<(f64, DMatrix<f64>)> {
        self.samples().map(|(t, b)| (t, b.clone())).collect()
    }
}

/// A matrix function given by a closure, for smooth analytic coefficient paths.
#[derive(Clone)]
pub struct FnMatrixPath {
    n: usize,
    period: f64,
    f: std::sync::Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>,
}

impl FnMatrixPath {
    /// `f` must be `period`-periodic and symmetric-valued; values are
    /// symmetrized on evaluation.
    pub fn new(
        n: usize,
        period: f64,
        f: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 || !(period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need n ≥ 1 and a positive period, got n = {n}, period = {period}"
            )));
        }
        let b0 = f(0.0);
        if b0.nrows() != 2 * n || b0.ncols() != 2 * n {
            return Err(Error::Dimension(format!(
                "function returns {}x{}, expected {}x{}",
                b0.nrows(),
                b0.ncols(),
                2 * n,
                2 * n
            )));
        }
        let mismatch = (&b0 - f(period)).norm();
        if mismatch > TOL_SYM * (1.0 + b0.norm()) {
            return Err(Error::InvalidInput(format!(
                "function is not periodic: ‖B(0) − B(T)‖ = {mismatch:.3e}"
            )));
        }
        Ok(Self {
            n,
            period,
            f: std::sync::Arc::new(f),
        })
    }

    /// Piecewise-linear sampling on `count` uniform intervals.
    pub fn sample(&self, count: usize) -> Result<MatrixPath> {
        MatrixPath::from_fn(self.n, self.period, count, |t| self.eval(t))
    }
}

impl std::fmt::Debug for FnMatrixPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnMatrixPath")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl MatrixFunction for FnMatrixPath {
    fn half_dim(&self) -> usize {
        self.n
    }

    fn period(&self) -> f64 {
        self.period
    }

    fn eval(&self, t: f64) -> DMatrix<f64> {
        let b = (self.f)(t.rem_euclid(self.period));
        0.5 * (&b + b.transpose())
    }
}

/// A `τ`-periodic function viewed as `kτ`-periodic.
pub struct Periodized<'a> {
    inner: &'a dyn MatrixFunction,
    k: usize,
}

impl<'a> Periodized<'a> {
    pub fn new(inner: &'a dyn MatrixFunction, k: usize) -> Self {
        assert!(k >= 1, "iteration count must be positive");
        Self { inner, k }
    }
}

impl MatrixFunction for Periodized<'_> {
    fn half_dim(&self) -> usize {
        self.inner.half_dim()
    }

    fn period(&self) -> f64 {
        self.k as f64 * self.inner.period()
    }

    fn eval(&self, t: f64) -> DMatrix<f64> {
        self.inner.eval(t)
    }

    /// Harmonic `p` of the `kτ`-periodic function vanishes unless `k | p`, in
    /// which case it is `k` times harmonic `p/k` of the base function.
    fn fourier_integrals(&self, p_max: usize) -> FourierIntegrals {
        let k = self.k;
        let base = self.inner.fourier_integrals(p_max / k);
        let dim = 2 * self.half_dim();
        (0..=p_max)
            .map(|p| {
                if p % k == 0 {
                    let (c, s) = &base[p / k];
                    (c * k as f64, s * k as f64)
                } else {
                    (DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim))
                }
            })
            .collect()
    }

    fn check_points(&self) -> Vec<(f64, DMatrix<f64>)> {
        self.inner.check_points()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn smooth_path() -> MatrixPath {
        MatrixPath::from_fn(1, 2.0 * PI, 64, |t| {
            DMatrix::from_row_slice(2, 2, &[1.0 + 0.3 * t.sin(), 0.2 * t.cos(), 0.2 * t.cos(), 0.5])
        })
        .unwrap()
    }

    #[test]
    fn rejects_period_mismatch() {
        let a = DMatrix::<f64>::identity(2, 2);
        let b = 2.0 * DMatrix::<f64>::identity(2, 2);
        let err = MatrixPath::new(1, 1.0, vec![(0.0, a), (1.0, b)]).unwrap_err();
        assert!(err.to_string().contains("not periodic"));
    }

    #[test]
    fn rejects_asymmetric_sample() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(MatrixPath::new(1, 1.0, vec![(0.0, a.clone()), (1.0, a)]).is_err());
    }

    #[test]
    fn interpolation_is_linear_between_samples() {
        let a = DMatrix::<f64>::identity(2, 2);
        let b = 3.0 * DMatrix::<f64>::identity(2, 2);
        let p = MatrixPath::new(1, 2.0, vec![(0.0, a.clone()), (1.0, b), (2.0, a)]).unwrap();
        assert!((p.eval(0.5)[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((p.eval(1.5)[(1, 1)] - 2.0).abs() < 1e-15);
        assert!((p.eval(2.5)[(1, 1)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_integrals_match_fine_trapezoid() {
        let p = smooth_path();
        let exact = p.fourier_integrals(6);
        let fine = trapezoid_fourier(&p, 6, 64 * 512);
        for ((c0, s0), (c1, s1)) in exact.iter().zip(&fine) {
            assert!((c0 - c1).norm() < 1e-7, "{}", (c0 - c1).norm());
            assert!((s0 - s1).norm() < 1e-7);
        }
    }

    #[test]
    fn segment_kernels_continuous_at_switch() {
        let (f0, g0) = segment_kernels(0.2499999);
        let (f1, g1) = segment_kernels(0.2500001);
        assert!((f0 - f1).norm() < 1e-6 && (g0 - g1).norm() < 1e-6);
    }

    #[test]
    fn periodized_harmonics() {
        let p = smooth_path();
        let base = p.fourier_integrals(4);
        let per = Periodized::new(&p, 3);
        let ext = per.fourier_integrals(12);
        assert!(ext[4].0.norm() == 0.0 && ext[5].1.norm() == 0.0);
        assert!((&ext[6].0 - 3.0 * &base[2].0).norm() < 1e-14);
        let direct = trapezoid_fourier(&per, 12, 3 * 64 * 64);
        for p in [0, 3, 6, 7] {
            assert!((&ext[p].0 - &direct[p].0).norm() < 1e-6);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = smooth_path();
        let q = MatrixPath::parse(&p.to_text()).unwrap();
        assert_eq!(p.len(), q.len());
        assert!((p.eval(1.234) - q.eval(1.234)).norm() < 1e-14);
    }

    #[test]
    fn parse_reports_bad_rows() {
        let text = "1 1.0 2\n0 1 0 0 1\n1 1 0 0\n";
        match MatrixPath::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shifted_path_evaluates_shifted_function() {
        let p = smooth_path();
        let q = p.shifted(1.0).unwrap();
        for t in [0.0, 0.7, 3.3] {
            assert!((q.eval(t) - p.eval(t + 1.0)).norm() < 1e-12);
        }
    }
}
