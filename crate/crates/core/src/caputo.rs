//! Caputo derivatives of sampled signals and the boundary excitations λ(t).
//!
//! [`caputo_l1`] is the L1 scheme on arbitrary increasing grids. Excitations
//! know their own derivatives, so [`excitation_caputo`] integrates the smooth
//! form `(1/Γ(2−α)) ∫_0^t (t−s)^{1−α} λ''(s) ds`, valid because λ'(0) = 0.

use crate::error::{Error, Result};
use crate::melf::{gamma, rgamma};
use crate::quadrature;

/// Samples of a signal on a strictly increasing grid starting at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&t)?;
        if values.len() != t.len() {
            return Err(Error::Shape(format!(
                "time grid has {} points but {} values were given",
                t.len(),
                values.len()
            )));
        }
        Ok(Self { t, values })
    }

    /// Uniform grid `0, dt, …, n dt`.
    pub fn uniform_grid(dt: f64, n_steps: usize) -> Vec<f64> {
        (0..=n_steps).map(|k| k as f64 * dt).collect()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().expect("series has at least two samples")
    }

    /// Applies a pointwise map to the values, keeping the grid.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> TimeSeries {
        TimeSeries { t: self.t.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

/// Checks the time-grid invariants: at least two points, t₀ = 0, strictly increasing.
pub fn validate_grid(t: &[f64]) -> Result<()> {
    if t.len() < 2 {
        return Err(Error::Shape(format!("a time series needs at least 2 samples, got {}", t.len())));
    }
    if t[0] != 0.0 {
        return Err(Error::Domain(format!("time grid must start at 0, starts at {}", t[0])));
    }
    if let Some(w) = t.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::Domain(format!(
            "time grid must be strictly increasing and finite ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Caputo order must lie in (0, 1), got {alpha}")))
    }
}

/// L1 discretization of the Caputo derivative on the series' own grid.
pub fn caputo_l1(series: &TimeSeries, alpha: f64) -> Result<TimeSeries> {
    check_order(alpha)?;
    let t = series.t();
    let v = series.values();
    let n = t.len();
    let q = 1.0 - alpha;
    let scale = rgamma(2.0 - alpha);
    let slopes: Vec<f64> = (1..n).map(|m| (v[m] - v[m - 1]) / (t[m] - t[m - 1])).collect();
    let mut out = vec![0.0; n];
    let dt = t[1];
    let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.max(1.0));
    if uniform {
        // (m+1)^{1−α} − m^{1−α}, shared by every step.
        let weights: Vec<f64> = (0..n).map(|m| ((m + 1) as f64).powf(q) - (m as f64).powf(q)).collect();
        let dq = dt.powf(q);
        for k in 1..n {
            let mut acc = 0.0;
            for m in 1..=k {
                acc += slopes[m - 1] * weights[k - m];
            }
            out[k] = scale * dq * acc;
        }
    } else {
        for k in 1..n {
            let mut acc = 0.0;
            for m in 1..=k {
                acc += slopes[m - 1] * ((t[k] - t[m - 1]).powf(q) - (t[k] - t[m]).powf(q));
            }
            out[k] = scale * acc;
        }
    }
    TimeSeries::new(t.to_vec(), out)
}

/// Clamped cubic spline through uniformly spaced samples with zero end slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSeries {
    dt: f64,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    curvature: Vec<f64>,
}

impl CustomSeries {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("custom series step must be positive, got {dt}")));
        }
        if values.len() < 3 {
            return Err(Error::Shape("a custom series needs at least 3 samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("custom series contains non-finite samples".into()));
        }
        let curvature = clamped_curvature(dt, &values);
        Ok(Self { dt, values, curvature })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn t_end(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if t >= self.t_end() {
            return None;
        }
        let i = ((t / self.dt).floor() as usize).min(self.values.len() - 2);
        Some((i, t - i as f64 * self.dt))
    }

    fn value(&self, t: f64) -> f64 {
        let Some((i, s)) = self.locate(t.max(0.0)) else {
            return *self.values.last().expect("non-empty");
        };
        let h = self.dt;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        y0 + b * s + 0.5 * m0 * s * s + (m1 - m0) * s * s * s / (6.0 * h)
    }

    fn derivative(&self, t: f64) -> f64 {
        let Some((i, s)) = self.locate(t.max(0.0)) else {
            return 0.0;
        };
        let h = self.dt;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        b + m0 * s + (m1 - m0) * s * s / (2.0 * h)
    }

    fn second_derivative(&self, t: f64) -> f64 {
        let Some((i, s)) = self.locate(t.max(0.0)) else {
            return 0.0;
        };
        let (m0, m1) = (self.curvature[i], self.curvature[i + 1]);
        m0 + (m1 - m0) * s / self.dt
    }

    /// Exact Caputo derivative of the spline: λ'' is piecewise linear.
    fn caputo(&self, alpha: f64, t: f64) -> f64 {
        let q = 1.0 - alpha;
        let end = t.min(self.t_end());
        let mut acc = 0.0;
        let n_seg = self.values.len() - 1;
        for i in 0..n_seg {
            let a = i as f64 * self.dt;
            if a >= end {
                break;
            }
            let b = ((i + 1) as f64 * self.dt).min(end);
            // λ''(s) = m0 + slope (s − a); with w = t − s this is c0 + c1 w.
            let m0 = self.curvature[i];
            let slope = (self.curvature[i + 1] - m0) / self.dt;
            let c0 = m0 + slope * (t - a);
            let c1 = -slope;
            let (w_lo, w_hi) = (t - b, t - a);
            let p1 = |w: f64| w.powf(q + 1.0) / (q + 1.0);
            let p2 = |w: f64| w.powf(q + 2.0) / (q + 2.0);
            acc += c0 * (p1(w_hi) - p1(w_lo)) + c1 * (p2(w_hi) - p2(w_lo));
        }
        acc * rgamma(2.0 - alpha)
    }

    fn laplace(&self, s: f64) -> f64 {
        let rule = quadrature::gauss_legendre(8);
        let mut acc = 0.0;
        for i in 0..self.values.len() - 1 {
            let a = i as f64 * self.dt;
            let seg = rule.mapped(a, a + self.dt);
            acc += seg.integrate(|t| (-s * t).exp() * self.value(t));
        }
        acc + self.values.last().expect("non-empty") * (-s * self.t_end()).exp() / s
    }
}

fn clamped_curvature(h: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    // Clamped spline moment equations with zero end slopes.
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = h / 3.0;
    sup[0] = h / 6.0;
    rhs[0] = (y[1] - y[0]) / h;
    for i in 1..n - 1 {
        sub[i] = h / 6.0;
        diag[i] = 2.0 * h / 3.0;
        sup[i] = h / 6.0;
        rhs[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
    }
    sub[n - 1] = h / 6.0;
    diag[n - 1] = h / 3.0;
    rhs[n - 1] = -(y[n - 1] - y[n - 2]) / h;
    crate::linalg::solve_tridiagonal(&sub, &diag, &sup, &rhs)
        .expect("clamped spline system is strictly diagonally dominant")
}

/// The boundary excitation λ(t).
#[derive(Debug, Clone, PartialEq)]
pub enum Excitation {
    /// λ(t) = a t² e^{−ct}.
    PolyExp { a: f64, c: f64 },
    /// Clamped cubic spline through samples, held constant after the last one.
    CustomSeries(CustomSeries),
}

impl Default for Excitation {
    fn default() -> Self {
        Excitation::PolyExp { a: 1.0, c: 1.0 }
    }
}

impl Excitation {
    /// Builds an excitation from its kind name and parameter vector.
    ///
    /// `poly_exp` takes `(a, c)`; `custom_series` takes `(dt, v0, v1, …)`.
    pub fn from_parameters(kind: &str, parameters: &[f64]) -> Result<Self> {
        let exc = match kind {
            "poly_exp" => {
                if parameters.len() != 2 || parameters.iter().any(|p| !p.is_finite()) {
                    return Err(Error::Admissibility("poly_exp takes two finite parameters (a, c)".into()));
                }
                Excitation::PolyExp { a: parameters[0], c: parameters[1] }
            }
            "custom_series" => {
                let (dt, values) = parameters
                    .split_first()
                    .ok_or_else(|| Error::Admissibility("custom_series needs (dt, v0, v1, …)".into()))?;
                Excitation::CustomSeries(CustomSeries::new(*dt, values.to_vec())?)
            }
            other => {
                return Err(Error::Domain(format!(
                    "unknown excitation kind '{other}' (expected poly_exp or custom_series)"
                )))
            }
        };
        exc.check_admissible()?;
        Ok(exc)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Excitation::PolyExp { .. } => "poly_exp",
            Excitation::CustomSeries(_) => "custom_series",
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        match self {
            Excitation::PolyExp { a, c } => vec![*a, *c],
            Excitation::CustomSeries(cs) => {
                let mut p = vec![cs.dt];
                p.extend_from_slice(&cs.values);
                p
            }
        }
    }

    /// Multiplies λ by a constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            Excitation::PolyExp { a, c } => Ok(Excitation::PolyExp { a: a * factor, c: *c }),
            Excitation::CustomSeries(cs) => {
                Ok(Excitation::CustomSeries(CustomSeries::new(cs.dt, cs.values.iter().map(|v| v * factor).collect())?))
            }
        }
    }

    /// Checks λ(0) = 0 and λ'(0) = 0.
    pub fn check_admissible(&self) -> Result<()> {
        match self {
            Excitation::PolyExp { .. } => Ok(()),
            Excitation::CustomSeries(cs) => {
                let v = &cs.values;
                let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if scale == 0.0 {
                    return Ok(());
                }
                if v[0].abs() > 1e-12 * scale {
                    return Err(Error::Admissibility(format!(
                        "custom_series violates lambda(0) = 0 (first sample {})",
                        v[0]
                    )));
                }
                let slope = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * cs.dt);
                // The one-sided estimate carries an O(dt²) error; allow a
                // slice of the local curvature on top of the absolute floor.
                let curvature = (v[2] - 2.0 * v[1] + v[0]).abs() / cs.dt;
                if slope.abs() > 1e-3 * scale / cs.t_end() + 0.1 * curvature {
                    return Err(Error::Admissibility(format!(
                        "custom_series violates lambda'(0) = 0 (one-sided slope estimate {slope:e})"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Excitation::PolyExp { a, c } => a * t * t * (-c * t).exp(),
            Excitation::CustomSeries(cs) => cs.value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Excitation::PolyExp { a, c } => a * (2.0 * t - c * t * t) * (-c * t).exp(),
            Excitation::CustomSeries(cs) => cs.derivative(t),
        }
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        match self {
            Excitation::PolyExp { a, c } => a * (2.0 - 4.0 * c * t + c * c * t * t) * (-c * t).exp(),
            Excitation::CustomSeries(cs) => cs.second_derivative(t),
        }
    }

    /// k-th derivative for k = 0, 1, 2.
    pub fn derivative_of_order(&self, k: usize, t: f64) -> f64 {
        match k {
            0 => self.value(t),
            1 => self.derivative(t),
            2 => self.second_derivative(t),
            _ => panic!("only derivatives up to order 2 are available"),
        }
    }

    /// True when λ vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Excitation::PolyExp { a, .. } => *a == 0.0,
            Excitation::CustomSeries(cs) => cs.values.iter().all(|&v| v == 0.0),
        }
    }

    /// Caputo derivative ∂_t^α λ(t).
    pub fn caputo(&self, alpha: f64, t: f64) -> Result<f64> {
        check_order(alpha)?;
        if t <= 0.0 {
            return Ok(0.0);
        }
        match self {
            Excitation::CustomSeries(cs) => Ok(cs.caputo(alpha, t)),
            Excitation::PolyExp { .. } => {
                let q = 1.0 - alpha;
                let f = |s: f64| (t - s).powf(q) * self.second_derivative(s);
                let r = quadrature::adaptive(f, 0.0, t, 1e-14, 1e-12)?;
                Ok(r.value * rgamma(2.0 - alpha))
            }
        }
    }

    /// Time derivative of the Caputo derivative, (1/Γ(1−α)) ∫_0^t (t−s)^{−α} λ''(s) ds.
    pub fn caputo_rate(&self, alpha: f64, t: f64) -> Result<f64> {
        check_order(alpha)?;
        if t <= 0.0 {
            return Ok(0.0);
        }
        // Substituting w = (t−s)^{1−α} removes the endpoint singularity.
        let q = 1.0 - alpha;
        let w_max = t.powf(q);
        let f = |w: f64| self.second_derivative(t - w.powf(1.0 / q)) / q;
        let r = quadrature::adaptive(f, 0.0, w_max, 1e-14, 1e-12)?;
        Ok(r.value * rgamma(1.0 - alpha))
    }

    /// Laplace transform (Lλ)(s).
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("Laplace abscissa must be positive, got {s}")));
        }
        match self {
            Excitation::PolyExp { a, c } => {
                if s + c <= 0.0 {
                    return Err(Error::Domain(format!("Laplace transform of poly_exp diverges for s = {s} <= -c")));
                }
                Ok(2.0 * a / (s + c).powi(3))
            }
            Excitation::CustomSeries(cs) => Ok(cs.laplace(s)),
        }
    }

    /// Growth exponent γ used by the C₀ bound: 0 for decaying λ.
    pub fn growth_rate(&self) -> f64 {
        match self {
            Excitation::PolyExp { c, .. } if *c > 0.0 => 0.0,
            Excitation::PolyExp { c, .. } => 1.0 - c,
            Excitation::CustomSeries(_) => 0.0,
        }
    }

    /// A finite C₀ with |λ^{(k)}(t)| ≤ C₀ e^{C₀ t} for k = 0, 1, 2.
    pub fn growth_constant(&self) -> f64 {
        let gamma_rate = self.growth_rate();
        let horizon = match self {
            Excitation::PolyExp { c, .. } => 60.0 / (c + gamma_rate),
            Excitation::CustomSeries(cs) => cs.t_end() + cs.dt,
        };
        let n = 20_000;
        let mut sup: f64 = 0.0;
        for i in 0..=n {
            let t = horizon * i as f64 / n as f64;
            let damp = (-gamma_rate * t).exp();
            for k in 0..3 {
                sup = sup.max(self.derivative_of_order(k, t).abs() * damp);
            }
        }
        sup.max(gamma_rate)
    }

    /// max over a dense grid of [0, t_end] of max_{k ≤ order} |λ^{(k)}|.
    pub fn c_norm(&self, order: usize, t_end: f64) -> f64 {
        let n = 4000;
        let mut sup: f64 = 0.0;
        for i in 0..=n {
            let t = t_end * i as f64 / n as f64;
            for k in 0..=order {
                sup = sup.max(self.derivative_of_order(k, t).abs());
            }
        }
        sup
    }
}

/// Samples λ on a time grid.
pub fn excitation_eval(exc: &Excitation, t_grid: &[f64]) -> Result<TimeSeries> {
    validate_grid(t_grid)?;
    exc.check_admissible()?;
    TimeSeries::new(t_grid.to_vec(), t_grid.iter().map(|&t| exc.value(t)).collect())
}

/// Caputo derivative of λ on a time grid.
pub fn excitation_caputo(exc: &Excitation, alpha: f64, t_grid: &[f64]) -> Result<TimeSeries> {
    check_order(alpha)?;
    validate_grid(t_grid)?;
    exc.check_admissible()?;
    let values = t_grid.iter().map(|&t| exc.caputo(alpha, t)).collect::<Result<Vec<_>>>()?;
    TimeSeries::new(t_grid.to_vec(), values)
}

/// Closed-form Caputo derivative of t^p, Γ(p+1)/Γ(p+1−α) t^{p−α}.
pub fn caputo_of_power(p: f64, alpha: f64, t: f64) -> f64 {
    gamma(p + 1.0) * rgamma(p + 1.0 - alpha) * t.powf(p - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series_of(f: impl Fn(f64) -> f64, dt: f64, n: usize) -> TimeSeries {
        let t = TimeSeries::uniform_grid(dt, n);
        let v = t.iter().map(|&x| f(x)).collect();
        TimeSeries::new(t, v).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeSeries::new(vec![0.0], vec![1.0]).is_err());
        assert!(TimeSeries::new(vec![0.1, 0.2], vec![1.0, 1.0]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.2, 0.2], vec![1.0; 3]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.2], vec![1.0]).is_err());
    }

    #[test]
    fn constant_has_zero_derivative() {
        let s = series_of(|_| 3.0, 0.01, 100);
        let d = caputo_l1(&s, 0.4).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_signal_is_exact() {
        let s = series_of(|t| t, 0.01, 100);
        let d = caputo_l1(&s, 0.5).unwrap();
        let want = 2.0 / std::f64::consts::PI.sqrt();
        assert!((d.values()[100] - want).abs() < 1e-12);
    }

    #[test]
    fn near_one_recovers_classical_derivative() {
        let s = series_of(|t| t * t, 1e-3, 1000);
        let d = caputo_l1(&s, 0.999).unwrap();
        assert!((d.values()[1000] - 2.0).abs() < 0.04);
    }

    #[test]
    fn rejects_bad_order() {
        let s = series_of(|t| t, 0.1, 10);
        assert!(caputo_l1(&s, 1.0).is_err());
        assert!(caputo_l1(&s, 0.0).is_err());
    }

    #[test]
    fn nonuniform_grid_matches_uniform_path_on_linear_data() {
        let t: Vec<f64> = (0..=40).map(|k| (k as f64 / 40.0).powi(2)).collect();
        let v: Vec<f64> = t.clone();
        let d = caputo_l1(&TimeSeries::new(t.clone(), v).unwrap(), 0.3).unwrap();
        for (ti, di) in t.iter().zip(d.values()).skip(1) {
            assert!((di - caputo_of_power(1.0, 0.3, *ti)).abs() < 1e-12);
        }
    }

    #[test]
    fn poly_exp_values() {
        let e = Excitation::PolyExp { a: 1.0, c: 1.0 };
        assert_eq!(e.value(0.0), 0.0);
        assert!((e.value(1.0) - (-1f64).exp()).abs() < 1e-15);
        let e2 = Excitation::PolyExp { a: 2.0, c: 0.5 };
        assert!((e2.value(2.0) - 8.0 * (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn poly_exp_caputo_matches_series_form() {
        // ∂^α[t² e^{−t}] = t^{2−α} Σ (n+1)(n+2)(−t)^n / Γ(n+3−α)
        let e = Excitation::default();
        for &alpha in &[0.3, 0.5, 0.8] {
            for &t in &[0.5f64, 1.0, 3.0] {
                let mut acc = 0.0;
                for n in 0..80 {
                    let nf = n as f64;
                    acc += (nf + 1.0) * (nf + 2.0) * (-t).powi(n) * rgamma(nf + 3.0 - alpha);
                }
                let want = t.powf(2.0 - alpha) * acc;
                let got = e.caputo(alpha, t).unwrap();
                assert!((got - want).abs() < 1e-10, "alpha={alpha} t={t}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn caputo_rate_is_time_derivative() {
        let e = Excitation::default();
        let (alpha, t, h) = (0.6, 1.3, 1e-5);
        let fd = (e.caputo(alpha, t + h).unwrap() - e.caputo(alpha, t - h).unwrap()) / (2.0 * h);
        assert!((fd - e.caputo_rate(alpha, t).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn custom_series_admissibility() {
        let dt = 0.01;
        let good: Vec<f64> = (0..300)
            .map(|k| {
                let t = k as f64 * dt;
                t * t * (-t).exp()
            })
            .collect();
        let mut params = vec![dt];
        params.extend(&good);
        assert!(Excitation::from_parameters("custom_series", &params).is_ok());
        let bad: Vec<f64> = (0..300).map(|k| k as f64 * dt).collect();
        let mut params = vec![dt];
        params.extend(&bad);
        assert!(matches!(Excitation::from_parameters("custom_series", &params), Err(Error::Admissibility(_))));
        let mut params = vec![dt, 1.0];
        params.extend(&good[1..]);
        assert!(Excitation::from_parameters("custom_series", &params).is_err());
    }

    #[test]
    fn custom_series_tracks_smooth_signal() {
        let dt = 0.02;
        let f = |t: f64| t * t * (-t).exp();
        let v: Vec<f64> = (0..=500).map(|k| f(k as f64 * dt)).collect();
        let exc = Excitation::CustomSeries(CustomSeries::new(dt, v).unwrap());
        let exact = Excitation::default();
        for &t in &[0.3, 1.0, 2.5, 7.0] {
            assert!((exc.value(t) - f(t)).abs() < 1e-6);
            let c = exc.caputo(0.5, t).unwrap();
            let want = exact.caputo(0.5, t).unwrap();
            assert!((c - want).abs() < 1e-4, "t={t}: {c} vs {want}");
        }
        let s = 2.0;
        assert!((exc.laplace(s).unwrap() - exact.laplace(s).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn growth_constant_finite() {
        let c0 = Excitation::default().growth_constant();
        assert!(c0.is_finite() && c0 >= 2.0);
        let grow = Excitation::PolyExp { a: 1.0, c: -0.5 };
        let c1 = grow.growth_constant();
        // |λ^{(k)}(t)| ≤ C₀ e^{C₀ t} at a few points.
        for &t in &[0.0, 1.0, 5.0, 20.0] {
            for k in 0..3 {
                assert!(grow.derivative_of_order(k, t).abs() <= c1 * (c1 * t).exp());
            }
        }
    }

    proptest! {
        #[test]
        fn l1_is_linear(
            u in proptest::collection::vec(-1.0f64..1.0, 30),
            v in proptest::collection::vec(-1.0f64..1.0, 30),
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
        ) {
            let t = TimeSeries::uniform_grid(0.05, 29);
            let su = TimeSeries::new(t.clone(), u.clone()).unwrap();
            let sv = TimeSeries::new(t.clone(), v.clone()).unwrap();
            let comb: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            let sc = TimeSeries::new(t, comb).unwrap();
            let du = caputo_l1(&su, 0.4).unwrap();
            let dv = caputo_l1(&sv, 0.4).unwrap();
            let dc = caputo_l1(&sc, 0.4).unwrap();
            for i in 0..30 {
                let want = a * du.values()[i] + b * dv.values()[i];
                prop_assert!((dc.values()[i] - want).abs() < 1e-11);
            }
        }
    }
}
