//! Natural cubic smoothing splines with analytic first derivatives.
//!
//! Fits minimize `sum (y_i - f(t_i))^2 + lambda * integral f''(t)^2 dt` over
//! natural cubic splines with knots at the sample times. The solve uses the
//! classic second-derivative parameterization: with `Q` the weighted
//! second-difference operator and `R` the tridiagonal roughness matrix, the
//! interior second derivatives solve `(R + lambda QᵀQ) g = Qᵀy` and the
//! fitted knot values are `y - lambda Q g`. Both matrices are banded, so a
//! fit is O(n).
//!
//! The penalty is picked by generalized cross-validation unless the policy
//! fixes it. GCV needs the trace of the influence matrix; the banded
//! Takahashi recursion yields the required central bands of the inverse
//! exactly, again in O(n).

use crate::config::SplinePolicy;
use crate::error::{Error, Result};

/// Smallest penalty considered; effectively an interpolating fit.
const LAMBDA_FLOOR: f64 = 1e-10;
/// Largest penalty considered; effectively a straight-line fit.
const LAMBDA_CEIL: f64 = 1e12;

/// A fitted smoothing spline: knot values and second derivatives, enough to
/// evaluate the curve and its first derivative anywhere.
#[derive(Debug, Clone)]
pub struct SmoothedSeries {
    knots: Vec<f64>,
    /// Fitted values at the knots.
    values: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at both ends).
    second: Vec<f64>,
    /// Penalty actually used.
    pub lambda: f64,
    /// RMS of the knot residuals against the raw series.
    pub residual_rms: f64,
}

/// Pentadiagonal symmetric system `B = R + lambda QᵀQ` in banded storage.
struct Banded {
    d0: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

/// LDLᵀ factors of a pentadiagonal symmetric positive definite matrix.
struct BandedLdl {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl Banded {
    fn ldl(&self) -> Result<BandedLdl> {
        let m = self.d0.len();
        let mut d = vec![0.0; m];
        let mut l1 = vec![0.0; m];
        let mut l2 = vec![0.0; m];
        for i in 0..m {
            let mut di = self.d0[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) {
                return Err(Error::Invalid("spline system is not positive definite".into()));
            }
            d[i] = di;
            if i + 1 < m {
                let mut v = self.d1[i];
                if i >= 1 {
                    v -= l1[i - 1] * d[i - 1] * l2[i - 1];
                }
                l1[i] = v / di;
            }
            if i + 2 < m {
                l2[i] = self.d2[i] / di;
            }
        }
        Ok(BandedLdl { d, l1, l2 })
    }
}

impl BandedLdl {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let mut z = rhs.to_vec();
        for i in 0..m {
            if i >= 1 {
                z[i] -= self.l1[i - 1] * z[i - 1];
            }
            if i >= 2 {
                z[i] -= self.l2[i - 2] * z[i - 2];
            }
        }
        for i in 0..m {
            z[i] /= self.d[i];
        }
        for i in (0..m).rev() {
            if i + 1 < m {
                z[i] -= self.l1[i] * z[i + 1];
            }
            if i + 2 < m {
                z[i] -= self.l2[i] * z[i + 2];
            }
        }
        z
    }

    /// Central three bands of the inverse, by the Takahashi backward
    /// recursion. Exact for banded LDLᵀ.
    fn band_inverse(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.d.len();
        let mut z0 = vec![0.0; m];
        let mut z1 = vec![0.0; m];
        let mut z2 = vec![0.0; m];
        for i in (0..m).rev() {
            if i + 2 < m {
                z2[i] = -(self.l1[i] * z1[i + 1] + self.l2[i] * z0[i + 2]);
            }
            if i + 1 < m {
                let t = if i + 2 < m { self.l2[i] * z1[i + 1] } else { 0.0 };
                z1[i] = -(self.l1[i] * z0[i + 1] + t);
            }
            let mut zi = 1.0 / self.d[i];
            if i + 1 < m {
                zi -= self.l1[i] * z1[i];
            }
            if i + 2 < m {
                zi -= self.l2[i] * z2[i];
            }
            z0[i] = zi;
        }
        (z0, z1, z2)
    }
}

/// Everything that depends only on the knot placement, reused across
/// penalty evaluations.
struct SplineWorkspace {
    /// Inverse spacings 1/h_i.
    p: Vec<f64>,
    /// Qᵀy.
    qty: Vec<f64>,
    /// QᵀQ bands.
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
    /// R bands.
    r0: Vec<f64>,
    r1: Vec<f64>,
}

impl SplineWorkspace {
    fn new(t: &[f64], y: &[f64]) -> Self {
        let n = t.len();
        let m = n - 2;
        let p: Vec<f64> = (0..n - 1).map(|i| 1.0 / (t[i + 1] - t[i])).collect();
        let mut qty = vec![0.0; m];
        for j in 0..m {
            qty[j] = p[j] * y[j] - (p[j] + p[j + 1]) * y[j + 1] + p[j + 1] * y[j + 2];
        }
        let mut c0 = vec![0.0; m];
        let mut c1 = vec![0.0; m];
        let mut c2 = vec![0.0; m];
        for i in 0..m {
            c0[i] = p[i] * p[i] + (p[i] + p[i + 1]) * (p[i] + p[i + 1]) + p[i + 1] * p[i + 1];
            if i + 1 < m {
                c1[i] = -p[i + 1] * (p[i] + 2.0 * p[i + 1] + p[i + 2]);
            }
            if i + 2 < m {
                c2[i] = p[i + 1] * p[i + 2];
            }
        }
        let h = |i: usize| t[i + 1] - t[i];
        let mut r0 = vec![0.0; m];
        let mut r1 = vec![0.0; m];
        for i in 0..m {
            r0[i] = (h(i) + h(i + 1)) / 3.0;
            if i + 1 < m {
                r1[i] = h(i + 1) / 6.0;
            }
        }
        SplineWorkspace { p, qty, c0, c1, c2, r0, r1 }
    }

    fn system(&self, lambda: f64) -> Banded {
        let m = self.r0.len();
        let mut d0 = vec![0.0; m];
        let mut d1 = vec![0.0; m];
        let mut d2 = vec![0.0; m];
        for i in 0..m {
            d0[i] = self.r0[i] + lambda * self.c0[i];
            if i + 1 < m {
                d1[i] = self.r1[i] + lambda * self.c1[i];
            }
            if i + 2 < m {
                d2[i] = lambda * self.c2[i];
            }
        }
        Banded { d0, d1, d2 }
    }

    /// Solve for a given penalty; returns (gamma, fitted values, rss).
    fn solve(&self, y: &[f64], lambda: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let ldl = self.system(lambda).ldl()?;
        let gamma = ldl.solve(&self.qty);
        let n = y.len();
        let m = gamma.len();
        let mut fitted = y.to_vec();
        let mut rss = 0.0;
        for k in 0..n {
            let mut qg = 0.0;
            if k < m {
                qg += self.p[k] * gamma[k];
            }
            if k >= 1 && k - 1 < m {
                qg -= (self.p[k - 1] + self.p[k]) * gamma[k - 1];
            }
            if k >= 2 && k - 2 < m {
                qg += self.p[k - 1] * gamma[k - 2];
            }
            let correction = lambda * qg;
            fitted[k] -= correction;
            rss += correction * correction;
        }
        Ok((gamma, fitted, rss))
    }

    /// `tr(B^-1 QᵀQ)`, the penalized part of the influence trace.
    fn trace_penalty(&self, lambda: f64) -> Result<f64> {
        let ldl = self.system(lambda).ldl()?;
        let (z0, z1, z2) = ldl.band_inverse();
        let m = z0.len();
        let mut tr_bc = 0.0;
        for i in 0..m {
            tr_bc += z0[i] * self.c0[i];
            if i + 1 < m {
                tr_bc += 2.0 * z1[i] * self.c1[i];
            }
            if i + 2 < m {
                tr_bc += 2.0 * z2[i] * self.c2[i];
            }
        }
        Ok(tr_bc)
    }

    /// Effective degrees of freedom `tr A = n - lambda * tr(B^-1 QᵀQ)`.
    fn trace_influence(&self, lambda: f64) -> Result<f64> {
        let n = (self.r0.len() + 2) as f64;
        Ok(n - lambda * self.trace_penalty(lambda)?)
    }

    /// GCV score `n * RSS / (n - tr A)^2` for a given penalty.
    fn gcv(&self, y: &[f64], lambda: f64) -> Result<f64> {
        let tr_bc = self.trace_penalty(lambda)?;
        let (_, _, rss) = self.solve(y, lambda)?;
        let n = y.len() as f64;
        let denom = lambda * tr_bc;
        if denom <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(n * rss / (denom * denom))
    }
}

impl SmoothedSeries {
    /// Fit a smoothing spline to `(t, y)`. Knot times must be strictly
    /// increasing and at least 4 points are required.
    pub fn fit(t: &[f64], y: &[f64], policy: SplinePolicy, residual_cap: Option<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::Invalid("spline inputs differ in length".into()));
        }
        if t.len() < 4 {
            return Err(Error::TooFewSamples { need: 4, got: t.len() });
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("spline knots must be strictly increasing".into()));
        }
        if t.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("spline inputs"));
        }
        let ws = SplineWorkspace::new(t, y);
        let mut lambda = match policy {
            SplinePolicy::Fixed(l) => l.max(0.0),
            SplinePolicy::Interpolate => 0.0,
            SplinePolicy::Gcv => select_lambda_gcv(&ws, y)?,
        };

        // Enforce the residual cap, if configured, by backing the penalty off.
        let cap = residual_cap.map(|frac| frac * std_dev(y));
        let mut fit = ws.solve(y, lambda)?;
        if let Some(cap) = cap {
            if cap > 0.0 {
                while lambda > LAMBDA_FLOOR && (fit.2 / y.len() as f64).sqrt() > cap {
                    lambda /= 10.0;
                    fit = ws.solve(y, lambda)?;
                }
            }
        }
        let (gamma, fitted, rss) = fit;

        let n = t.len();
        let mut second = vec![0.0; n];
        second[1..n - 1].copy_from_slice(&gamma);
        Ok(SmoothedSeries {
            knots: t.to_vec(),
            values: fitted,
            second,
            lambda,
            residual_rms: (rss / n as f64).sqrt(),
        })
    }

    /// Fit with the penalty chosen so the smoother's effective degrees of
    /// freedom (the influence-matrix trace) hits `target_df`. Useful for
    /// trend overlays where the residual texture is structure, not noise,
    /// and GCV would under-smooth.
    pub fn fit_with_df(t: &[f64], y: &[f64], target_df: f64) -> Result<Self> {
        if t.len() < 4 {
            return Err(Error::TooFewSamples { need: 4, got: t.len() });
        }
        let n = t.len() as f64;
        let target = target_df.clamp(2.0 + 1e-6, n - 1e-6);
        let ws = SplineWorkspace::new(t, y);
        // tr A(lambda) falls monotonically from n to 2; bisect in log space.
        let (mut lo, mut hi) = (LAMBDA_FLOOR.log10(), LAMBDA_CEIL.log10());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ws.trace_influence(10f64.powf(mid))? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 10f64.powf(0.5 * (lo + hi));
        let (gamma, fitted, rss) = ws.solve(y, lambda)?;
        let len = t.len();
        let mut second = vec![0.0; len];
        second[1..len - 1].copy_from_slice(&gamma);
        Ok(SmoothedSeries {
            knots: t.to_vec(),
            values: fitted,
            second,
            lambda,
            residual_rms: (rss / n).sqrt(),
        })
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Spline value at `t`; linear continuation beyond the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let (k, v, m) = (&self.knots, &self.values, &self.second);
        let n = k.len();
        if t <= k[0] {
            return v[0] + self.deriv(k[0]) * (t - k[0]);
        }
        if t >= k[n - 1] {
            return v[n - 1] + self.deriv(k[n - 1]) * (t - k[n - 1]);
        }
        let i = self.segment(t);
        let h = k[i + 1] - k[i];
        let a = (k[i + 1] - t) / h;
        let b = (t - k[i]) / h;
        a * v[i] + b * v[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0
    }

    /// Analytic first derivative of the fitted spline at `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        let (k, v, m) = (&self.knots, &self.values, &self.second);
        let n = k.len();
        let t = t.clamp(k[0], k[n - 1]);
        let i = self.segment(t);
        let h = k[i + 1] - k[i];
        let a = (k[i + 1] - t) / h;
        let b = (t - k[i]) / h;
        (v[i + 1] - v[i]) / h
            + (-(3.0 * a * a - 1.0) * m[i] + (3.0 * b * b - 1.0) * m[i + 1]) * h / 6.0
    }

}

fn std_dev(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Log-grid GCV search with a golden-section refinement around the best
/// grid point. Deterministic.
fn select_lambda_gcv(ws: &SplineWorkspace, y: &[f64]) -> Result<f64> {
    let mut best = (LAMBDA_FLOOR, f64::INFINITY);
    let steps = 41;
    let log_lo = LAMBDA_FLOOR.log10();
    let log_hi = LAMBDA_CEIL.log10();
    let mut scores = Vec::with_capacity(steps);
    for s in 0..steps {
        let lambda = 10f64.powf(log_lo + (log_hi - log_lo) * s as f64 / (steps - 1) as f64);
        let score = ws.gcv(y, lambda)?;
        scores.push((lambda, score));
        if score < best.1 {
            best = (lambda, score);
        }
    }
    // Refine between the neighbors of the best grid point.
    let idx = scores.iter().position(|&(l, _)| l == best.0).unwrap();
    let lo = scores[idx.saturating_sub(1)].0.log10();
    let hi = scores[(idx + 1).min(steps - 1)].0.log10();
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = ws.gcv(y, 10f64.powf(x1))?;
    let mut f2 = ws.gcv(y, 10f64.powf(x2))?;
    for _ in 0..24 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = ws.gcv(y, 10f64.powf(x1))?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = ws.gcv(y, 10f64.powf(x2))?;
        }
    }
    let refined = 10f64.powf(0.5 * (a + b));
    let refined_score = ws.gcv(y, refined)?;
    Ok(if refined_score <= best.1 { refined } else { best.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn needs_four_samples() {
        let t = grid(3);
        assert!(SmoothedSeries::fit(&t, &t, SplinePolicy::Gcv, None).is_err());
    }

    #[test]
    fn linear_series_reproduced_exactly_with_slope_derivative() {
        let t = grid(50);
        let y: Vec<f64> = t.iter().map(|&x| 3.0 * x - 7.0).collect();
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Gcv, None).unwrap();
        for &x in &[0.0, 12.3, 25.0, 48.9] {
            assert!((s.eval(x) - (3.0 * x - 7.0)).abs() < 1e-9, "value at {x}");
            assert!((s.deriv(x) - 3.0).abs() < 1e-9, "derivative at {x}");
        }
        assert!(s.residual_rms < 1e-10);
    }

    #[test]
    fn constant_series_has_zero_derivative() {
        let t = grid(30);
        let y = vec![42.0; 30];
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Gcv, None).unwrap();
        for &x in &[0.0, 10.5, 29.0] {
            assert_eq!(s.eval(x), 42.0);
            assert_eq!(s.deriv(x), 0.0);
        }
    }

    #[test]
    fn interpolate_policy_hits_the_data() {
        let t = grid(20);
        let mut rng = stream(7, &[0]);
        let y: Vec<f64> = t.iter().map(|&x| (0.3 * x).sin() + rng.gen::<f64>()).collect();
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Interpolate, None).unwrap();
        for (i, &x) in t.iter().enumerate() {
            assert!((s.eval(x) - y[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn gcv_on_noiseless_smooth_data_nearly_interpolates() {
        let t = grid(200);
        let y: Vec<f64> = t.iter().map(|&x| (0.05 * x).sin()).collect();
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Gcv, None).unwrap();
        for (i, &x) in t.iter().enumerate() {
            assert!((s.eval(x) - y[i]).abs() < 1e-7, "residual at knot {i}");
        }
    }

    #[test]
    fn noisy_sine_derivative_tracks_truth() {
        // y = sin(0.01 t) + N(0, 0.01); derivative error with noise must stay
        // within 10x the smoothing bias alone (same penalty, no noise).
        let n = 2000;
        let t = grid(n);
        let truth: Vec<f64> = t.iter().map(|&x| (0.01 * x).sin()).collect();
        let normal = Normal::new(0.0, 0.01).unwrap();
        let mut rng = stream(2024, &[1]);
        let noisy: Vec<f64> = truth.iter().map(|&v| v + normal.sample(&mut rng)).collect();

        let s_noisy = SmoothedSeries::fit(&t, &noisy, SplinePolicy::Gcv, None).unwrap();
        let s_clean =
            SmoothedSeries::fit(&t, &truth, SplinePolicy::Fixed(s_noisy.lambda), None).unwrap();

        let rms = |s: &SmoothedSeries| {
            let sq: f64 = t
                .iter()
                .map(|&x| {
                    let d = s.deriv(x) - 0.01 * (0.01 * x).cos();
                    d * d
                })
                .sum();
            (sq / n as f64).sqrt()
        };
        let err_noisy = rms(&s_noisy);
        let err_bias = rms(&s_clean);
        assert!(
            err_noisy < 10.0 * err_bias.max(1e-6),
            "noisy {err_noisy:.3e} vs bias {err_bias:.3e}"
        );
        // And the derivative must actually be informative.
        assert!(err_noisy < 0.005, "derivative rms {err_noisy:.3e}");
    }

    #[test]
    fn residual_cap_backs_the_penalty_off() {
        let n = 200;
        let t = grid(n);
        let y: Vec<f64> = t.iter().map(|&x| (0.2 * x).sin()).collect();
        // A huge fixed penalty would flatten the sine; the cap forces a refit.
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Fixed(1e9), Some(0.05)).unwrap();
        assert!(s.residual_rms <= 0.05 * std_dev(&y) + 1e-12);
        assert!(s.lambda < 1e9);
    }

    #[test]
    fn band_inverse_matches_dense_inverse() {
        // Small system checked against a dense inverse.
        let t = grid(8);
        let y: Vec<f64> = t.iter().map(|&x| (x * 0.7).cos()).collect();
        let ws = SplineWorkspace::new(&t, &y);
        let lambda = 0.37;
        let banded = ws.system(lambda);
        let m = banded.d0.len();
        let mut dense = nalgebra::DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            dense[(i, i)] = banded.d0[i];
            if i + 1 < m {
                dense[(i, i + 1)] = banded.d1[i];
                dense[(i + 1, i)] = banded.d1[i];
            }
            if i + 2 < m {
                dense[(i, i + 2)] = banded.d2[i];
                dense[(i + 2, i)] = banded.d2[i];
            }
        }
        let inv = dense.try_inverse().unwrap();
        let (z0, z1, z2) = banded.ldl().unwrap().band_inverse();
        for i in 0..m {
            assert!((z0[i] - inv[(i, i)]).abs() < 1e-10);
            if i + 1 < m {
                assert!((z1[i] - inv[(i, i + 1)]).abs() < 1e-10);
            }
            if i + 2 < m {
                assert!((z2[i] - inv[(i, i + 2)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn heavy_noise_on_flat_signal_is_smoothed_away() {
        let n = 600;
        let t = grid(n);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = stream(5, &[2]);
        let y: Vec<f64> = (0..n).map(|_| 10.0 + normal.sample(&mut rng)).collect();
        let s = SmoothedSeries::fit(&t, &y, SplinePolicy::Gcv, None).unwrap();
        // Derivative of pure noise around a constant should be near zero.
        let max_deriv = t.iter().map(|&x| s.deriv(x).abs()).fold(0.0, f64::max);
        assert!(max_deriv < 0.2, "max derivative {max_deriv}");
    }
}
