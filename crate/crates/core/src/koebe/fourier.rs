//! Trigonometric interpolation of closed sampled curves.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Unnormalized forward transform `X_k = sum_j x_j e^{-2 pi i jk/N}`.
pub fn fft(x: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(x.len()).process(x);
}

/// Inverse transform including the `1/N` factor.
pub fn ifft(x: &mut [Complex64]) {
    let n = x.len() as f64;
    FftPlanner::new().plan_fft_inverse(x.len()).process(x);
    for v in x.iter_mut() {
        *v /= n;
    }
}

/// Signed frequency of FFT bin `k` out of `n` (the Nyquist bin is reported as positive).
pub fn frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Trigonometric interpolant `p(s) = sum_n c_n e^{i n s}` through samples
/// taken at `s_j = 2 pi j / N`; an even-length Nyquist term is split evenly
/// between `+N/2` and `-N/2`.
#[derive(Debug, Clone)]
pub struct TrigCurve {
    /// Coefficients of frequencies `0, 1, ..., K`.
    pos: Vec<Complex64>,
    /// Coefficients of frequencies `-1, ..., -K`.
    neg: Vec<Complex64>,
    /// Derivative coefficients of frequencies `1, ..., K` and `-1, ..., -K`, divided by `i`.
    dpos: Vec<Complex64>,
    dneg: Vec<Complex64>,
    n: usize,
}

/// `sum_k a_k e^k` by Horner's rule.
fn horner(coeffs: &[Complex64], e: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * e + c)
}

impl TrigCurve {
    pub fn from_samples(pts: &[Complex64]) -> Self {
        let n = pts.len();
        let mut c = pts.to_vec();
        fft(&mut c);
        let k_max = n / 2;
        let mut pos = vec![Complex64::new(0.0, 0.0); k_max + 1];
        let mut neg = vec![Complex64::new(0.0, 0.0); k_max];
        for (k, v) in c.iter().enumerate() {
            let v = v / n as f64;
            if n % 2 == 0 && k == n / 2 {
                pos[k] += v * 0.5;
                neg[k - 1] += v * 0.5;
            } else {
                let f = frequency(k, n);
                if f >= 0 {
                    pos[f as usize] += v;
                } else {
                    neg[(-f) as usize - 1] += v;
                }
            }
        }
        let dpos = pos.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        let dneg = neg.iter().enumerate().map(|(k, c)| c * (k + 1) as f64).collect();
        TrigCurve { pos, neg, dpos, dneg, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(frequency, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let p = self.pos.iter().enumerate().map(|(k, c)| (k as i64, *c));
        p.chain(self.neg.iter().enumerate().map(|(k, c)| (-(k as i64) - 1, *c)))
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, s);
        horner(&self.pos, e) + e.conj() * horner(&self.neg, e.conj())
    }

    pub fn deriv(&self, s: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, s);
        Complex64::new(0.0, 1.0) * (e * horner(&self.dpos, e) - e.conj() * horner(&self.dneg, e.conj()))
    }

    /// Values at `factor * N` equally spaced parameters (zero-padded transform).
    pub fn upsample(&self, factor: usize) -> Vec<Complex64> {
        let m = self.n * factor;
        let mut spec = vec![Complex64::new(0.0, 0.0); m];
        for (f, c) in self.terms() {
            spec[f.rem_euclid(m as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut spec);
        spec
    }
}

/// Resample a closed smooth curve at `n_out` points equally spaced in
/// arclength, evaluating its trigonometric interpolant. The arclength
/// function is integrated spectrally from the speed on a fine grid and
/// inverted by Newton's method.
pub fn resample_arclength(pts: &[Complex64], n_out: usize) -> Vec<Complex64> {
    let trig = TrigCurve::from_samples(pts);
    let factor = 32;
    let m = trig.n * factor;
    let mut spec = vec![Complex64::new(0.0, 0.0); m];
    for (f, c) in trig.terms() {
        spec[f.rem_euclid(m as i64) as usize] += c * Complex64::new(0.0, f as f64);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(m).process(&mut spec);
    let mut speed: Vec<Complex64> = spec.iter().map(|d| Complex64::new(d.norm(), 0.0)).collect();
    planner.plan_fft_forward(m).process(&mut speed);
    let b0 = speed[0].re / m as f64;
    // arclength s(t) = b0 t + sum_k b_k (e^{ikt} - 1) / (ik)
    let terms: Vec<(f64, Complex64)> = (1..m)
        .filter_map(|k| {
            let b = speed[k] / m as f64;
            let f = frequency(k, m) as f64;
            (b.norm() > 1e-17 * b0 && f != 0.0).then(|| (f, b / Complex64::new(0.0, f)))
        })
        .collect();
    let arclength = |t: f64| b0 * t + terms.iter().map(|(f, c)| (c * (Complex64::from_polar(1.0, f * t) - 1.0)).re).sum::<f64>();
    let total = b0 * std::f64::consts::TAU;
    let mut out = Vec::with_capacity(n_out);
    let mut t = 0.0;
    for k in 0..n_out {
        let target = total * k as f64 / n_out as f64;
        for _ in 0..20 {
            let v = trig.deriv(t).norm();
            if v <= 0.0 {
                break;
            }
            let dt = (arclength(t) - target) / v;
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        out.push(trig.eval(t));
    }
    out
}
