//! Two-parameter Mittag-Leffler function and the Gamma family.
//!
//! `E_{α,β}(z) = Σ z^k / Γ(αk + β)` on the real line. Negative arguments, which
//! the solution operators need, are evaluated in three regimes:
//!
//! - the power series with compensated summation while `|z|^{1/α}` is small,
//! - the algebraic asymptotic expansion `−Σ z^{−k}/Γ(β − αk)` once it is large,
//! - the Gorenflo–Loutchko–Luchko integral representation in between.
//!
//! Positive arguments use the series, or the exponential asymptotic once the
//! series would need too many terms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs a positive argument, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum in its accurate range.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// Γ(x) for real x away from the poles; returns ±inf at non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x >= 0.5 {
        ln_gamma_pos(x).exp()
    } else {
        let s = sin_pi(x);
        if s == 0.0 {
            return f64::INFINITY;
        }
        PI / (s * ln_gamma_pos(1.0 - x).exp())
    }
}

/// 1/Γ(x), an entire function: zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x == x.round() && (1.0..=30.0).contains(&x) {
        let mut fact = 1.0;
        for k in 2..x as u32 {
            fact *= k as f64;
        }
        return 1.0 / fact;
    }
    if x >= 0.5 {
        (-ln_gamma_pos(x)).exp()
    } else {
        let s = sin_pi(x);
        if s == 0.0 {
            return 0.0;
        }
        s * ln_gamma_pos(1.0 - x).exp() / PI
    }
}

/// Parameters of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    alpha: f64,
    beta: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Domain(format!("Mittag-Leffler alpha must lie in (0, 2], got {alpha}")));
        }
        if !beta.is_finite() {
            return Err(Error::Domain(format!("Mittag-Leffler beta must be finite, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Shorthand for `ml_eval(MlParams::new(alpha, beta)?, z)`.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    ml_eval(MlParams::new(alpha, beta)?, z)
}

/// Evaluates `E_{α,β}(z)` for real z.
pub fn ml_eval(params: MlParams, z: f64) -> Result<f64> {
    let MlParams { alpha, beta } = params;
    let fail = |reason: &str| Error::Evaluation { alpha, beta, z, reason: reason.to_string() };
    if !z.is_finite() {
        return Err(fail("non-finite argument"));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if alpha == 1.0 {
        return alpha_one(beta, z).ok_or_else(|| fail("alpha = 1 evaluation failed"));
    }
    let radius = z.abs().powf(1.0 / alpha);
    let value = if z > 0.0 {
        if radius <= POSITIVE_SERIES_RADIUS {
            series(alpha, beta, z)
        } else {
            let v = asymptotic_positive(alpha, beta, z);
            if v.map(f64::is_finite) == Some(false) {
                return Err(fail("overflow"));
            }
            v
        }
    } else if alpha == 2.0 && (beta == 1.0 || beta == 2.0) {
        let r = (-z).sqrt();
        Some(if beta == 1.0 { r.cos() } else { r.sin() / r })
    } else if alpha < 1.0 {
        if radius <= SERIES_RADIUS {
            series(alpha, beta, z)
        } else if radius >= ASYMPTOTIC_RADIUS {
            asymptotic_negative(alpha, beta, z).or_else(|| integral_negative(alpha, beta, z))
        } else {
            integral_negative(alpha, beta, z)
        }
    } else if radius <= WIDE_SERIES_RADIUS {
        series(alpha, beta, z)
    } else if radius >= WIDE_ASYMPTOTIC_RADIUS {
        asymptotic_negative(alpha, beta, z).map(|v| v + oscillating_pair(alpha, beta, z))
    } else {
        return Err(fail("no accurate regime for 1 < alpha < 2 at this argument"));
    };
    match value {
        Some(v) if v.is_finite() => Ok(v),
        Some(_) => Err(fail("non-finite result")),
        None => Err(fail("series/asymptotic evaluation did not converge")),
    }
}

const SERIES_RADIUS: f64 = 6.0;
const ASYMPTOTIC_RADIUS: f64 = 40.0;
const WIDE_SERIES_RADIUS: f64 = 12.0;
const WIDE_ASYMPTOTIC_RADIUS: f64 = 30.0;
const POSITIVE_SERIES_RADIUS: f64 = 50.0;
const MAX_SERIES_TERMS: usize = 20_000;
const MAX_ASYMPTOTIC_TERMS: usize = 300;

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// z^k / Γ(αk + β) computed in log space so large k cannot overflow.
fn series_term(alpha: f64, beta: f64, ln_abs_z: f64, negative: bool, k: usize) -> f64 {
    let arg = alpha * k as f64 + beta;
    let sign = if negative && k % 2 == 1 { -1.0 } else { 1.0 };
    if arg >= 0.5 {
        sign * (k as f64 * ln_abs_z - ln_gamma_pos(arg)).exp()
    } else {
        sign * (k as f64 * ln_abs_z).exp() * rgamma(arg)
    }
}

fn series(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut acc = Compensated::default();
    let mut prev = f64::INFINITY;
    for k in 0..MAX_SERIES_TERMS {
        let term = series_term(alpha, beta, ln_abs_z, negative, k);
        acc.add(term);
        let mag = term.abs();
        let past_peak = alpha * k as f64 + beta > 1.0 && mag <= prev;
        if k > 2 && past_peak && mag <= 1e-17 * acc.value().abs().max(1e-300) {
            return Some(acc.value());
        }
        if k > 2 && past_peak && mag == 0.0 {
            return Some(acc.value());
        }
        prev = mag;
    }
    None
}

/// −Σ_{k≥1} z^{−k}/Γ(β − αk), truncated where the term envelope is smallest.
///
/// The envelope drops the oscillating sin(π(β − αk)) factor of the reflected
/// Gamma so that a near-zero sine cannot stop the sum early.
fn asymptotic_sum(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let mut acc = Compensated::default();
    let mut prev = f64::INFINITY;
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        let arg = beta - alpha * k as f64;
        if arg.abs() > 170.0 {
            break;
        }
        let ln_envelope =
            if arg < 0.5 { ln_gamma_pos(1.0 - arg) - PI.ln() } else { -ln_gamma_pos(arg) } - k as f64 * ln_abs_z;
        let envelope = ln_envelope.exp();
        if envelope > prev {
            break;
        }
        prev = envelope;
        let sign = if negative && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = -sign * (-(k as f64) * ln_abs_z).exp() * rgamma(arg);
        acc.add(term);
        if envelope <= 1e-17 * acc.value().abs() {
            return Some(acc.value());
        }
    }
    if prev <= 1e-15 * acc.value().abs() || prev < 1e-17 {
        Some(acc.value())
    } else {
        None
    }
}

fn asymptotic_negative(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    asymptotic_sum(alpha, beta, z)
}

fn asymptotic_positive(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let r = z.powf(1.0 / alpha);
    let lead = (((1.0 - beta) / alpha) * z.ln() + r).exp() / alpha;
    if !lead.is_finite() {
        return Some(f64::INFINITY);
    }
    let tail = asymptotic_sum(alpha, beta, z).unwrap_or(0.0);
    Some(lead + tail)
}

/// Contribution of the two complex-conjugate saddle exponentials for 1 < α < 2 on z < 0.
fn oscillating_pair(alpha: f64, beta: f64, z: f64) -> f64 {
    let r = (-z).powf(1.0 / alpha);
    let theta = PI / alpha;
    let amplitude = (2.0 / alpha) * r.powf(1.0 - beta) * (r * theta.cos()).exp();
    amplitude * ((1.0 - beta) * theta + r * theta.sin()).cos()
}

/// Integral representation on the negative axis for 0 < α < 1.
fn integral_negative(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    if beta >= 1.0 + alpha {
        // E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z
        let lower = integral_negative(alpha, beta - alpha, z)?;
        return Some((lower - rgamma(beta - alpha)) / z);
    }
    let x = -z;
    let c = 1.0 / (alpha * PI);
    let sin_a = sin_pi(1.0 - beta);
    let sin_b = sin_pi(1.0 - beta + alpha);
    let cos_ap = (alpha * PI).cos();
    let expo = (1.0 - beta) / alpha;
    let kernel = |chi: f64| {
        let num = chi * sin_a + x * sin_b;
        let den = chi * chi + 2.0 * chi * x * cos_ap + x * x;
        c * chi.powf(expo) * (-chi.powf(1.0 / alpha)).exp() * num / den
    };
    let chi_max = 60f64.powf(alpha);
    let mut total = 0.0;
    let mut breaks = vec![0.0];
    if x < chi_max {
        breaks.push(x);
    }
    breaks.push(chi_max);
    for w in breaks.windows(2) {
        let piece = quadrature::adaptive(kernel, w[0], w[1], 1e-15, 1e-13).ok()?;
        total += piece.value;
    }
    Some(total)
}

/// α = 1: closed forms, the Laplace-type integral for β > 1, and downward recurrence.
fn alpha_one(beta: f64, z: f64) -> Option<f64> {
    if beta == beta.round() && beta <= 1.0 {
        // E_{1,1−m}(z) = z^m e^z
        let m = (1.0 - beta) as i32;
        return Some(z.powi(m) * z.exp());
    }
    if z > 0.0 {
        return if z <= POSITIVE_SERIES_RADIUS { series(1.0, beta, z) } else { asymptotic_positive(1.0, beta, z) };
    }
    if beta > 1.0 {
        return alpha_one_integral(beta, -z);
    }
    let steps = (1.0 - beta).floor() as usize + 1;
    let mut value = alpha_one_integral(beta + steps as f64, -z)?;
    for i in (0..steps).rev() {
        let b = beta + i as f64;
        value = rgamma(b) + z * value;
    }
    Some(value)
}

/// E_{1,β}(−x) = (1/Γ(β)) ∫_0^1 exp(−x(1 − u^{1/(β−1)})) du for β > 1.
fn alpha_one_integral(beta: f64, x: f64) -> Option<f64> {
    let p = 1.0 / (beta - 1.0);
    let f = |u: f64| (-x * (1.0 - u.powf(p))).exp();
    // The integrand concentrates in a layer of width ~1/(xp) at u = 1.
    let split = (1.0 - 20.0 / (x * p).max(20.0)).max(0.0);
    let mut total = 0.0;
    for (a, b) in [(0.0, split), (split, 1.0)] {
        if b > a {
            total += quadrature::adaptive(f, a, b, 1e-17, 1e-14).ok()?.value;
        }
    }
    Some(total * rgamma(beta))
}

/// Smallest C with |E_{α,1}(−t)| ≤ C/(1+t) over the given points.
pub fn decay_constant(alpha: f64, t_values: &[f64]) -> Result<f64> {
    let params = MlParams::new(alpha, 1.0)?;
    let mut c: f64 = 0.0;
    for &t in t_values {
        c = c.max(ml_eval(params, -t)?.abs() * (1.0 + t));
    }
    Ok(c)
}

/// Checks the decay bound |E_{α,1}(−t)| ≤ C/(1+t) for a given constant.
pub fn satisfies_decay_bound(alpha: f64, bound: f64, t_values: &[f64]) -> Result<bool> {
    Ok(decay_constant(alpha, t_values)? <= bound)
}
