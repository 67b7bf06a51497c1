//! Spectral shift of the Dirichlet disc from partial waves, evaluation of the
//! low-energy series, and the Laplace transform linking `ξ` to `γ(t)`.
//!
//! For the disc of radius `a` the `n`-th phase shift obeys
//! `tan δ_n = J_n(ka)/Y_n(ka)`. The branch is fixed by `δ_n → 0` as `k → 0`:
//! every zero of `Y_n` below `ka` contributes `-π`, so
//! `δ_n = atan(J_n/Y_n) - π N_n(ka)` with `N_n(x)` the number of zeros of
//! `Y_n` in `(0, x)`. This is pointwise, so no sweep state is carried.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{xi_coefficients_to, LogSeries, SeriesVariable};
use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::specfun::{bessel_j, bessel_j_seq, bessel_y, bessel_y_seq, binomial_signed, gamma_derivs_at_one};

/// Largest `k·a` accepted by the partial-wave sum.
pub const MAX_KA: f64 = 50.0;
/// `λ` used to calibrate the overall sign of the partial-wave sum.
pub const CALIBRATION_LAMBDA: f64 = 1e-12;
/// Terms kept in the asymptotic series of [`laplace_log_moment`].
pub const LOG_MOMENT_TERMS: usize = 6;
/// Frozen bounds on `sup |r_l| L^{l+1}`, `l = 1, 2, 3`, for the unit disc
/// over `λ ∈ [1e-12, 1e-6]`.
pub const UNIT_DISC_REMAINDER_BOUNDS: [f64; 3] = [0.5, 3.5, 4.0];
const LAPLACE_REL_TOL: f64 = 1e-8;
/// Below `e^{-U_CUT}/t` the Laplace integrand is dropped.
const U_CUT: f64 = 60.0;

// zeros of Y_0 below 12
const Y0_ZEROS: [f64; 4] = [0.893_576_966_279_167_5, 3.957_678_419_314_858, 7.086_051_060_301_773, 10.222_345_043_496_417];

fn y0_zero_count(x: f64) -> Result<i64> {
    if x < 12.0 {
        return Ok(Y0_ZEROS.iter().filter(|&&z| z < x).count() as i64);
    }
    // continuous phase of H0(x) = M(x) e^{iθ(x)}; Y0 = M sin θ vanishes at θ = mπ
    let j0 = bessel_j(0, x)?;
    let y0 = bessel_y(0, x)?;
    let base = x - PI / 4.0;
    let (s, c) = base.sin_cos();
    // rotate by -base; the remaining phase is small for x >= 12
    let correction = (y0 * c - j0 * s).atan2(j0 * c + y0 * s);
    let theta = base + correction;
    Ok((theta / PI).floor() as i64 + 1)
}

/// Truncation order of the partial-wave sum at `x = ka`.
pub fn partial_wave_cutoff(x: f64) -> usize {
    x.ceil() as usize + 12 + (4.0 * x.cbrt()).ceil() as usize
}

/// `δ_0, ..., δ_{n_max}` at `x = ka`.
fn phase_shifts(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("phase shift needs ka > 0, got {x}")));
    }
    let j = bessel_j_seq(n_max, x)?;
    let y = bessel_y_seq(n_max, x)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut zeros = y0_zero_count(x)?;
    for n in 0..=n_max {
        let Some(&yn) = y.get(n) else {
            // |Y_n| beyond f64 range: J_n/Y_n underflows
            out.push(0.0);
            continue;
        };
        if n > 0 {
            // zeros of Y_n and Y_{n+1} interlace, Y_n(0+) = -∞
            if (yn < 0.0) != (y[n - 1] < 0.0) {
                zeros -= 1;
            }
        }
        out.push((j[n] / yn).atan() - PI * zeros as f64);
    }
    Ok(out)
}

/// Phase shift `δ_n(k)` of the Dirichlet disc of radius `a`.
pub fn disc_phase_shift(n: i64, k: f64, a: f64) -> Result<f64> {
    check_disc(k, a)?;
    let m = n.unsigned_abs() as usize;
    Ok(phase_shifts(m, k * a)?[m])
}

fn check_disc(k: f64, a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("disc radius must be positive, got {a}")));
    }
    if !(k > 0.0) || k * a > MAX_KA {
        return Err(Error::Domain(format!("ka = {} outside (0, {MAX_KA}]", k * a)));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseShiftTable {
    pub k: f64,
    pub a: f64,
    /// `δ_n` for `n = -n_max..=n_max`.
    pub entries: BTreeMap<i64, f64>,
}

impl PhaseShiftTable {
    pub fn n_max(&self) -> i64 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// `(1/π) Σ_n δ_n`, before the sign calibration.
    pub fn raw_sum(&self) -> f64 {
        self.entries.values().sum::<f64>() / PI
    }
}

pub fn phase_shift_table(k: f64, a: f64) -> Result<PhaseShiftTable> {
    phase_shift_table_with(k, a, 0)
}

fn phase_shift_table_with(k: f64, a: f64, extra: usize) -> Result<PhaseShiftTable> {
    check_disc(k, a)?;
    let x = k * a;
    let n_max = partial_wave_cutoff(x) + extra;
    let shifts = phase_shifts(n_max, x)?;
    let mut entries = BTreeMap::new();
    for (n, d) in shifts.iter().enumerate() {
        entries.insert(n as i64, *d);
        entries.insert(-(n as i64), *d);
    }
    Ok(PhaseShiftTable { k, a, entries })
}

fn raw_disc_sum(lambda: f64, a: f64, extra: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let x = lambda.sqrt() * a;
    check_disc(lambda.sqrt(), a)?;
    let shifts = phase_shifts(partial_wave_cutoff(x) + extra, x)?;
    // δ_{-n} = δ_n; sum the small tail first
    let tail: f64 = shifts[1..].iter().rev().sum();
    Ok((shifts[0] + 2.0 * tail) / PI)
}

static SIGN: OnceLock<std::result::Result<f64, f64>> = OnceLock::new();

/// Global sign `s` in `ξ = s (1/π) Σ δ_n`, chosen once so that
/// `(-log λ) ξ(λ) → +1` for the unit disc.
pub fn ssf_sign() -> Result<f64> {
    let r = SIGN.get_or_init(|| {
        let l = -CALIBRATION_LAMBDA.ln();
        let raw = raw_disc_sum(CALIBRATION_LAMBDA, 1.0, 0).unwrap_or(f64::NAN);
        [1.0, -1.0]
            .into_iter()
            .find(|s| (s * raw * l - 1.0).abs() < 0.1)
            .ok_or(raw * l)
    });
    match *r {
        Ok(s) => Ok(s),
        Err(v) => Err(Error::Normalization(v)),
    }
}

/// Spectral shift function `ξ(λ)` of the Dirichlet disc of radius `a`.
pub fn disc_ssf_exact(lambda: f64, a: f64) -> Result<f64> {
    disc_ssf_exact_with(lambda, a, 0)
}

/// As [`disc_ssf_exact`], with `extra` partial waves beyond the default cutoff.
pub fn disc_ssf_exact_with(lambda: f64, a: f64, extra: usize) -> Result<f64> {
    let s = ssf_sign()?;
    Ok(s * raw_disc_sum(lambda, a, extra)?)
}

/// `Σ_k c_k (-log λ)^k`.
pub fn ssf_series_eval(series: &LogSeries, lambda: f64) -> Result<f64> {
    if series.variable() != SeriesVariable::NegLogLambda {
        return Err(Error::InvalidInput("series is not in -log(lambda)".into()));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("series needs 0 < lambda < 1, got {lambda}")));
    }
    Ok(series.eval(-lambda.ln()))
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderPoint {
    pub lambda: f64,
    pub exact: f64,
    pub series: f64,
    pub remainder: f64,
    /// `|r_l| L^{l+1}`.
    pub scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderReport {
    pub a: f64,
    pub l: usize,
    pub points: Vec<RemainderPoint>,
    /// Supremum of `|r_l| L^{l+1}` over the whole grid.
    pub sup: f64,
    /// Supremum over the smaller half of the grid.
    pub sup_low: f64,
    /// Supremum over the larger half of the grid.
    pub sup_high: f64,
    /// Finite and `sup_low <= 1.1 sup_high`: extending the grid towards 0
    /// does not raise the bound.
    pub passes: bool,
}

/// Scaled residual of the `l`-term series against the exact disc `ξ`.
pub fn remainder_order_probe(a: f64, l: usize, grid: &[f64]) -> Result<RemainderReport> {
    if !(1..=3).contains(&l) {
        return Err(Error::OrderTooHigh { requested: l, max: 3 });
    }
    if grid.is_empty() || grid.iter().any(|&x| !(1e-14..=1e-4).contains(&x)) {
        return Err(Error::Domain("lambda grid must lie in [1e-14, 1e-4]".into()));
    }
    let series = xi_coefficients_to(2.0 * a.ln(), l)?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let points = sorted
        .par_iter()
        .map(|&lambda| {
            let exact = disc_ssf_exact(lambda, a)?;
            let s = ssf_series_eval(&series, lambda)?;
            let r = exact - s;
            let big_l = -lambda.ln();
            Ok(RemainderPoint {
                lambda,
                exact,
                series: s,
                remainder: r,
                scaled: r.abs() * big_l.powi(l as i32 + 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_of = |p: &[RemainderPoint]| p.iter().map(|q| q.scaled).fold(0.0, f64::max);
    let half = points.len().div_ceil(2);
    let sup = sup_of(&points);
    let sup_high = sup_of(&points[..half]);
    let sup_low = sup_of(&points[half..]);
    Ok(RemainderReport {
        a,
        l,
        sup,
        sup_low,
        sup_high,
        passes: sup.is_finite() && sup_low <= 1.1 * sup_high,
        points,
    })
}

/// `∫_0^Λ e^{-tλ} f(λ) dλ` split at `1/t`: below, `λ = e^{-u}`.
fn laplace_integral<F>(mut f: F, t: f64, upper: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let split = (1.0 / t).min(upper);
    let u0 = -split.ln();
    let low = integrate(
        |u| {
            let lam = (-u).exp();
            Ok((-t * lam).exp() * f(lam)? * lam)
        },
        u0,
        u0 + U_CUT,
        abs_tol,
        LAPLACE_REL_TOL,
    )?;
    let high = if upper > split {
        // log-spaced pieces keep the e^{-tλ} decay resolved
        let mut total = 0.0;
        let mut a = split;
        while a < upper {
            let b = (a * 8.0).min(upper);
            total += integrate(|lam| Ok((-t * lam).exp() * f(lam)?), a, b, abs_tol, LAPLACE_REL_TOL)?;
            a = b;
        }
        total
    } else {
        0.0
    };
    Ok(low + high)
}

/// `γ(t) = 4π t² ∫_0^∞ e^{-tλ} ξ(λ) dλ`, integrated up to `Λ = 40/t + 25`.
pub fn gamma_via_laplace<F>(ssf: F, t: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(t > 1.5 && t.is_finite()) {
        return Err(Error::Domain(format!("gamma_via_laplace needs t > 3/2, got {t}")));
    }
    let upper = 40.0 / t + 25.0;
    Ok(4.0 * PI * t * t * laplace_integral(ssf, t, upper, 1e-300)?)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogMoment {
    pub numeric: f64,
    pub series: f64,
}

impl LogMoment {
    pub fn ratio(&self) -> f64 {
        self.numeric / self.series
    }
}

/// `∫_0^δ t e^{-tλ} (-log λ)^k dλ` and its asymptotic series
/// `Σ_{r≤6} (-1)^r C(k,r) Γ^{(r)}(1) (log t)^{k-r}`.
pub fn laplace_log_moment(k: i32, t: f64, delta: f64) -> Result<LogMoment> {
    if k > -1 {
        return Err(Error::Domain(format!("log moment needs k <= -1, got {k}")));
    }
    if !(t >= 10.0 && t.is_finite()) {
        return Err(Error::Domain(format!("log moment needs t >= 10, got {t}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("log moment needs 0 < delta < 1, got {delta}")));
    }
    let numeric = t * laplace_integral(|lam| Ok((-lam.ln()).powi(k)), t, delta, 1e-300)?;
    let derivs = gamma_derivs_at_one(LOG_MOMENT_TERMS)?;
    let log_t = t.ln();
    let series = (0..=LOG_MOMENT_TERMS)
        .map(|r| {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial_signed(i64::from(k), r as u32) * derivs[r] * log_t.powi(k - r as i32)
        })
        .sum();
    Ok(LogMoment { numeric, series })
}

/// `t Σ_k c_k (log t)^k`.
pub fn gamma_series_eval(series: &LogSeries, t: f64) -> Result<f64> {
    if series.variable() != SeriesVariable::LogT {
        return Err(Error::InvalidInput("series is not in log(t)".into()));
    }
    if !(t > std::f64::consts::E && t.is_finite()) {
        return Err(Error::Domain(format!("series needs t > e, got {t}")));
    }
    Ok(t * series.eval(t.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::xi_coefficients;
    use crate::specfun::EULER_GAMMA;

    #[test]
    fn y0_zero_table() {
        for z in Y0_ZEROS {
            assert!(bessel_y(0, z).unwrap().abs() < 1e-13);
        }
        // the asymptotic count continues the table
        assert_eq!(y0_zero_count(11.9).unwrap(), 4);
        assert_eq!(y0_zero_count(12.0).unwrap(), 4);
        assert_eq!(y0_zero_count(13.4).unwrap(), 5);
        assert_eq!(y0_zero_count(13.3).unwrap(), 4);
    }

    #[test]
    fn y0_count_agrees_with_sign_changes() {
        let mut count = 0;
        let mut prev = bessel_y(0, 0.01).unwrap();
        let mut x: f64 = 0.01;
        while x < 50.0 {
            x += 0.01;
            let y = bessel_y(0, x).unwrap();
            if (y < 0.0) != (prev < 0.0) {
                count += 1;
            }
            prev = y;
            if (x * 100.0).round() as i64 % 50 == 0 {
                assert_eq!(y0_zero_count(x).unwrap(), count, "x = {x}");
            }
        }
    }

    #[test]
    fn phase_shift_examples() {
        assert!(disc_phase_shift(5, 1e-3, 1.0).unwrap().abs() < 1e-12);
        for (n, ka) in [(0, 0.3), (3, 2.0), (7, 11.0), (2, 40.0)] {
            assert_eq!(disc_phase_shift(n, ka, 1.0).unwrap(), disc_phase_shift(-n, ka, 1.0).unwrap());
        }
        let d0 = disc_phase_shift(0, 1e-4, 1.0).unwrap();
        let approx = PI / (2.0 * (0.5e-4f64).ln() + 2.0 * EULER_GAMMA);
        assert!(((d0 - approx) / approx).abs() < 0.02);
    }

    #[test]
    fn phase_shifts_continuous_in_k() {
        // no jump larger than the local slope allows along a fine sweep
        for n in [0usize, 1, 4, 10] {
            let mut prev = phase_shifts(n, 0.01).unwrap()[n];
            let mut x: f64 = 0.01;
            while x < 45.0 {
                x += 0.005;
                let d = phase_shifts(n, x).unwrap()[n];
                assert!((d - prev).abs() < 0.05, "n = {n}, x = {x}: {prev} -> {d}");
                prev = d;
            }
        }
    }

    #[test]
    fn high_energy_phase_follows_geometric_limit() {
        // J_0/Y_0 -> cot(x - π/4), and 13 zeros of Y_0 lie below 40, so
        // δ_0 ≈ -x + 3π/4 - π
        let x = 40.0;
        let d0 = disc_phase_shift(0, x, 1.0).unwrap();
        assert!((d0 + x + PI / 4.0).abs() < 0.01, "{d0}");
    }

    #[test]
    fn calibrated_sign_and_leading_behaviour() {
        let s = ssf_sign().unwrap();
        assert_eq!(s.abs(), 1.0);
        let l = -CALIBRATION_LAMBDA.ln();
        let xi = disc_ssf_exact(CALIBRATION_LAMBDA, 1.0).unwrap();
        assert!((0.95..=1.05).contains(&(xi * l)));
        let mut lam = 1e-12;
        while lam <= 1e-2 {
            assert!(disc_ssf_exact(lam, 1.0).unwrap() > 0.0);
            lam *= 10.0;
        }
    }

    #[test]
    fn closed_form_small_lambda_disc() {
        // (1/π) arctan(π / (L - C')) carries every power of 1/L from the
        // s-wave; the O(λ) corrections are far below the tolerance
        let c2 = xi_coefficients(0.0).coefficient(-2).unwrap();
        for lam in [1e-8, 1e-10, 1e-12] {
            let l = -f64::ln(lam);
            let closed = (PI / (l - c2)).atan() / PI;
            let xi = disc_ssf_exact(lam, 1.0).unwrap();
            assert!((xi - closed).abs() < 1e-6 * closed, "lambda = {lam}");
        }
    }

    #[test]
    fn truncation_is_stable() {
        for lam in [1e-10, 1e-4, 0.5, 3.0, 24.0] {
            let a = disc_ssf_exact(lam, 1.0).unwrap();
            let b = disc_ssf_exact_with(lam, 1.0, 8).unwrap();
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn series_eval_examples() {
        let one = LogSeries::new(SeriesVariable::NegLogLambda, [(-1, 1.0)]).unwrap();
        assert!((ssf_series_eval(&one, (-10f64).exp()).unwrap() - 0.1).abs() < 1e-15);
        assert!(ssf_series_eval(&one, 1.0).is_err());
        let disc = xi_coefficients(0.0);
        let l = 10.0 * 10f64.ln();
        let expected = (1.0 + disc.coefficient(-2).unwrap() / l + disc.coefficient(-3).unwrap() / (l * l)) / l;
        assert!((ssf_series_eval(&disc, 1e-10).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn laplace_of_zero_and_of_indicator() {
        assert_eq!(gamma_via_laplace(|_| Ok(0.0), 10.0).unwrap(), 0.0);
        // ξ = 1 gives 4π t² (1 - e^{-tΛ})/t
        let t = 5.0;
        let v = gamma_via_laplace(|_| Ok(1.0), t).unwrap();
        let expected = 4.0 * PI * t * (1.0 - (-t * (40.0 / t + 25.0)).exp());
        assert!((v - expected).abs() < 1e-8 * expected);
        assert!(gamma_via_laplace(|_| Ok(1.0), 1.0).is_err());
    }

    #[test]
    fn laplace_chains_to_log_moment() {
        let t = 1e3;
        let delta = 0.5;
        let g = gamma_via_laplace(|lam| Ok(if lam < delta { 1.0 / -lam.ln() } else { 0.0 }), t).unwrap();
        let m = laplace_log_moment(-1, t, delta).unwrap();
        assert!((g - 4.0 * PI * t * m.numeric).abs() < 1e-6 * g);
    }

    #[test]
    fn log_moment_examples() {
        let m = laplace_log_moment(-1, 1e6, 0.5).unwrap();
        assert!((0.99..=1.01).contains(&m.ratio()));
        // second term of the k = -1 series is -γ (log t)^-2
        let lt = 1e6f64.ln();
        let two_terms = 1.0 / lt - EULER_GAMMA / (lt * lt);
        assert!((m.series - two_terms).abs() < 2.0 / lt.powi(3));
        assert!(laplace_log_moment(0, 1e3, 0.5).is_err());
        assert!(laplace_log_moment(-1, 5.0, 0.5).is_err());
        assert!(laplace_log_moment(-1, 1e3, 1.0).is_err());
    }

    #[test]
    fn log_moment_insensitive_to_delta() {
        let t = 100.0;
        let base = laplace_log_moment(-2, t, 0.5).unwrap().numeric;
        for delta in [0.25, 0.75] {
            let other = laplace_log_moment(-2, t, delta).unwrap().numeric;
            assert!((other - base).abs() <= 10.0 * (-t / 4.0).exp());
        }
    }

    #[test]
    fn gamma_series_examples() {
        let t = 10f64.exp();
        let lead = LogSeries::new(SeriesVariable::LogT, [(-1, 4.0 * PI)]).unwrap();
        assert!((gamma_series_eval(&lead, t).unwrap() - 4.0 * PI * t / 10.0).abs() < 1e-9 * t);
        let disc = crate::coeffs::gamma_coefficients(&xi_coefficients(0.0), 3).unwrap();
        let u = EULER_GAMMA - 4f64.ln();
        let expected = t * 4.0 * PI * (0.1 + u / 100.0 + (u * u - PI * PI / 6.0) / 1000.0);
        assert!((gamma_series_eval(&disc, t).unwrap() - expected).abs() < 1e-12 * expected);
        assert!(gamma_series_eval(&disc, 2.0).is_err());
    }

    #[test]
    fn rejects_out_of_range_disc() {
        assert!(disc_ssf_exact(0.0, 1.0).is_err());
        assert!(disc_ssf_exact(3000.0, 1.0).is_err());
        assert!(disc_phase_shift(0, 1.0, -1.0).is_err());
    }
}
