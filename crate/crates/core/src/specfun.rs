//! Special functions and exact constants.
//!
//! The Hankel function `H0(1)` is evaluated from its power-log expansion
//! around the origin for `|z| <= HANKEL_SWITCH` and from the Hankel
//! large-argument series beyond. Integer-order `J_n` and `Y_n` of real
//! argument come from Miller's downward recurrence and upward recurrence
//! respectively, seeded by the same order-0/1 routines.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

/// `zeta(k)` for `k = 2..=13`, indexed by `k - 2`.
pub const ZETA: [f64; 12] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
];

/// Largest order accepted by [`gamma_derivs_at_one`].
pub const GAMMA_DERIV_MAX: usize = 12;

/// Modulus at which `H0(1)` switches from the power-log series to the
/// large-argument expansion.
pub const HANKEL_SWITCH: f64 = 12.0;

const SERIES_MAX_TERMS: usize = 400;
const EPS: f64 = 1e-17;

fn check_principal(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::Domain(format!("{z} lies on the cut (-inf, 0]")));
    }
    Ok(())
}

/// Pieces of the order-zero power-log expansion with the `j = 0` terms
/// removed: `J0(z) - 1` and `sum_{j>=1} (-1)^(j+1) H_j (z^2/4)^j / (j!)^2`.
struct PowerLogTail {
    j0_minus_one: Complex64,
    harmonic_sum: Complex64,
}

fn power_log_tail(z: Complex64) -> Result<PowerLogTail> {
    let w = z * z / 4.0;
    let wabs = w.norm();
    let mut term = Complex64::new(1.0, 0.0);
    let mut harmonic = 0.0;
    let mut j0_minus_one = Complex64::new(0.0, 0.0);
    let mut harmonic_sum = Complex64::new(0.0, 0.0);
    for j in 1..=SERIES_MAX_TERMS {
        let jf = j as f64;
        term *= -w / (jf * jf);
        harmonic += 1.0 / jf;
        j0_minus_one += term;
        harmonic_sum -= term * harmonic;
        let scale = j0_minus_one.norm().max(harmonic_sum.norm());
        if jf * jf > wabs && term.norm() * (1.0 + harmonic) <= EPS * scale {
            return Ok(PowerLogTail {
                j0_minus_one,
                harmonic_sum,
            });
        }
    }
    Err(Error::NotConverged(format!("power-log series at z = {z}")))
}

/// Hankel's large-argument expansion of `H_nu(1)(z)` for `nu` in {0, 1}.
fn hankel_asymptotic(nu: u32, z: Complex64) -> Complex64 {
    let mu = 4.0 * f64::from(nu * nu);
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * i * (mu - odd * odd) / (k as f64 * 8.0 * z);
        let size = next.norm();
        if size >= prev {
            break;
        }
        term = next;
        sum += term;
        prev = size;
        if size <= 1e-17 * sum.norm() {
            break;
        }
    }
    let phase = z - f64::from(nu) * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * z)).sqrt() * (i * phase).exp() * sum
}

/// `K0(w)` for `Re w > 0`, `|w| >= 2` via Steed's continued fraction (CF2).
fn bessel_k0_cf2(w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = 2.0 * (one + w);
    let mut d = one / b;
    let mut delh = d;
    let mut h = delh;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..20_000 {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = one / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < 1e-17 {
            let _ = h;
            return Ok((PI / (2.0 * w)).sqrt() * (-w).exp() / s);
        }
    }
    Err(Error::NotConverged(format!("K0 continued fraction at w = {w}")))
}

/// `H0(1)(z)` on the principal branch `z` not in `(-inf, 0]`.
pub fn hankel0_first(z: Complex64) -> Result<Complex64> {
    check_principal(z)?;
    let modulus = z.norm();
    if modulus > HANKEL_SWITCH {
        return Ok(hankel_asymptotic(0, z));
    }
    // deep in the upper half plane the series loses e^(|z| + Im z) to cancellation
    if z.im >= 1.0 && modulus >= 2.0 {
        let k0 = bessel_k0_cf2(Complex64::new(z.im, -z.re))?;
        return Ok(Complex64::new(0.0, -2.0 / PI) * k0);
    }
    let tail = power_log_tail(z)?;
    let log_term = (z / 2.0).ln() + EULER_GAMMA;
    let two_i_over_pi = Complex64::new(0.0, 2.0 / PI);
    let j0 = 1.0 + tail.j0_minus_one;
    Ok(j0 + two_i_over_pi * (log_term * j0 + tail.harmonic_sum))
}

/// `b(z) = H0(1)(z) - 1 - (2i/pi)(Log(z/2) + gamma)` for `|z| <= 1`,
/// summed from the `j >= 1` terms only.
pub fn hankel_remainder_b(z: Complex64) -> Result<Complex64> {
    check_principal(z)?;
    if z.norm() > 1.0 {
        return Err(Error::Domain(format!("|z| = {} exceeds 1", z.norm())));
    }
    let tail = power_log_tail(z)?;
    let log_term = (z / 2.0).ln() + EULER_GAMMA;
    let two_i_over_pi = Complex64::new(0.0, 2.0 / PI);
    Ok(tail.j0_minus_one + two_i_over_pi * (log_term * tail.j0_minus_one + tail.harmonic_sum))
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Bessel argument {x} must be positive")));
    }
    Ok(())
}

/// `(J0(x), Y0(x))`.
fn bessel_jy0(x: f64) -> Result<(f64, f64)> {
    let h = hankel0_first(Complex64::new(x, 0.0))?;
    Ok((h.re, h.im))
}

/// `(J1(x), Y1(x))`.
fn bessel_jy1(x: f64) -> Result<(f64, f64)> {
    if x > HANKEL_SWITCH {
        let h = hankel_asymptotic(1, Complex64::new(x, 0.0));
        return Ok((h.re, h.im));
    }
    let half = x / 2.0;
    let w = half * half;
    let mut term = half;
    let mut j1 = term;
    let mut hk = 0.0;
    let mut hk1 = 1.0;
    let mut digamma_sum = term * (hk + hk1);
    for k in 1..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= -w / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        hk1 += 1.0 / (kf + 1.0);
        j1 += term;
        digamma_sum += term * (hk + hk1);
        if kf * kf > w && term.abs() * (1.0 + hk1) <= EPS * j1.abs().max(digamma_sum.abs()) {
            let y1 = -2.0 / (PI * x) + (2.0 / PI) * ((half).ln() + EULER_GAMMA) * j1
                - digamma_sum / PI;
            return Ok((j1, y1));
        }
    }
    Err(Error::NotConverged(format!("J1/Y1 series at x = {x}")))
}

/// `J_0(x), ..., J_{n_max}(x)`.
pub fn bessel_j_seq(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_positive(x)?;
    if n_max == 0 {
        return Ok(vec![bessel_jy0(x)?.0]);
    }
    let top = n_max.max(x.ceil() as usize);
    let mut start = top + 24 + (50.0 * top as f64).sqrt() as usize;
    start += start % 2;

    let mut vals = vec![0.0; n_max + 1];
    let mut sum = if start % 2 == 0 { 2.0 } else { 0.0 };
    let mut upper = 0.0;
    let mut current = 1.0;
    for k in (1..=start).rev() {
        let lower = (2.0 * k as f64 / x) * current - upper;
        upper = current;
        current = lower;
        let idx = k - 1;
        if idx <= n_max {
            vals[idx] = current;
        }
        if idx > 0 && idx % 2 == 0 {
            sum += 2.0 * current;
        }
        if current.abs() > 1e200 {
            current *= 1e-200;
            upper *= 1e-200;
            sum *= 1e-200;
            for v in vals.iter_mut().skip(idx) {
                *v *= 1e-200;
            }
        }
    }
    sum += current;
    for v in &mut vals {
        *v /= sum;
    }
    Ok(vals)
}

/// `Y_0(x), ...` up to `Y_{n_max}(x)`, stopping early at the first order
/// whose magnitude leaves the `f64` range.
pub fn bessel_y_seq(n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_positive(x)?;
    let (_, y0) = bessel_jy0(x)?;
    let mut out = vec![y0];
    if n_max == 0 {
        return Ok(out);
    }
    let (_, y1) = bessel_jy1(x)?;
    if !y1.is_finite() {
        return Ok(out);
    }
    out.push(y1);
    for k in 1..n_max {
        let next = (2.0 * k as f64 / x) * out[k] - out[k - 1];
        if !next.is_finite() || next.abs() > 1e300 {
            break;
        }
        out.push(next);
    }
    Ok(out)
}

pub fn bessel_j(n: usize, x: f64) -> Result<f64> {
    match n {
        0 => Ok(bessel_jy0(check_positive(x).map(|_| x)?)?.0),
        1 => Ok(bessel_jy1(check_positive(x).map(|_| x)?)?.0),
        _ => Ok(bessel_j_seq(n, x)?[n]),
    }
}

pub fn bessel_y(n: usize, x: f64) -> Result<f64> {
    let seq = bessel_y_seq(n, x)?;
    seq.get(n).copied().ok_or(Error::Overflow { order: n, x })
}

/// Modified Bessel function `I0(x)`.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 50.0 {
        let w = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-18 * sum {
            term *= w / (k * k);
            sum += term;
            k += 1.0;
        }
        return sum;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term *= odd * odd / (8.0 * k as f64 * x);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    x.exp() / (2.0 * PI * x).sqrt() * sum
}

/// Coefficients of the small-`zeta` expansion of the free resolvent kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCoefficients {
    pub index: usize,
    pub a: Complex64,
    pub b: f64,
    pub c: f64,
}

pub fn kernel_coefficients(j: usize) -> KernelCoefficients {
    // (-1)^j / (4^j (j!)^2)
    let mut factor = 1.0;
    for m in 1..=j {
        factor /= -4.0 * (m * m) as f64;
    }
    let harmonic: f64 = (1..=j).map(|k| 1.0 / k as f64).sum();
    let log_part = (2f64.ln() - EULER_GAMMA + harmonic) / (2.0 * PI);
    let a = Complex64::new(log_part * factor, factor / 4.0);
    let b = if j == 0 {
        -1.0 / (2.0 * PI)
    } else {
        -factor / (2.0 * PI)
    };
    let c = factor / (4.0 * PI);
    KernelCoefficients { index: j, a, b, c }
}

/// `Gamma^(r)(1)` for `r = 0..=r_max`, from the Taylor series of
/// `log Gamma(1 + x)` exponentiated as a formal power series.
pub fn gamma_derivs_at_one(r_max: usize) -> Result<Vec<f64>> {
    if r_max > GAMMA_DERIV_MAX {
        return Err(Error::OrderTooHigh {
            requested: r_max,
            max: GAMMA_DERIV_MAX,
        });
    }
    // g_k: Taylor coefficients of log Gamma(1 + x)
    let mut g = vec![0.0; r_max + 1];
    if r_max >= 1 {
        g[1] = -EULER_GAMMA;
    }
    for (k, gk) in g.iter_mut().enumerate().skip(2) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *gk = sign * ZETA[k - 2] / k as f64;
    }
    // f = exp(g): n f_n = sum_{k=1}^n k g_k f_{n-k}
    let mut f = vec![0.0; r_max + 1];
    f[0] = 1.0;
    for n in 1..=r_max {
        let acc: f64 = (1..=n).map(|k| k as f64 * g[k] * f[n - k]).sum();
        f[n] = acc / n as f64;
    }
    let mut factorial = 1.0;
    Ok(f
        .iter()
        .enumerate()
        .map(|(r, fr)| {
            if r > 0 {
                factorial *= r as f64;
            }
            fr * factorial
        })
        .collect())
}

/// Binomial coefficient `C(s, r)` for any integer upper index; for `s < 0`
/// uses `C(s, r) = (-1)^r C(-s + r - 1, r)`.
pub fn binomial_signed(s: i64, r: u32) -> f64 {
    let sign = if s < 0 && r % 2 == 1 { -1.0 } else { 1.0 };
    let top = if s < 0 { -s + i64::from(r) - 1 } else { s };
    if top < i64::from(r) {
        return 0.0;
    }
    let mut value = 1.0;
    for i in 0..i64::from(r) {
        value = value * (top - i) as f64 / (i + 1) as f64;
    }
    sign * value
}
