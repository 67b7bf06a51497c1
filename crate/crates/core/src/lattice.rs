//! Counting lattice points `x ∈ ℤⁿ` with `x_j ≤ 1` and `Σ x_j = k < 0`, and
//! the surface-area bound on that count.
//!
//! With `y_j = 1 - x_j ≥ 0` the constraint becomes `Σ y_j = n - k`, so the
//! count is a stars-and-bars binomial. The bound places a ball of radius 1/2
//! around each point, disjoint inside the hyperplane slab, and compares areas.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeCount {
    pub n: u32,
    pub k: i64,
    #[serde(serialize_with = "as_decimal")]
    pub exact: BigUint,
    pub bound: f64,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

impl LatticeCount {
    /// `bound / exact`.
    pub fn ratio(&self) -> f64 {
        self.bound / big_to_f64(&self.exact)
    }
}

fn big_to_f64(v: &BigUint) -> f64 {
    v.to_string().parse().unwrap_or(f64::INFINITY)
}

fn check(n: u32, k: i64) -> Result<()> {
    if n == 0 || k > -1 {
        return Err(Error::Domain(format!("lattice count needs n >= 1 and k <= -1, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// Number of `y ∈ ℕⁿ` with `Σ y_j = total`, by dynamic programming over
/// prefix sums.
fn count_by_enumeration(n: u32, total: usize) -> BigUint {
    // after j passes, ways[s] = number of j-tuples summing to s: a cumulative
    // sum over the (j-1)-tuple counts picks the last coordinate
    let mut ways = vec![BigUint::zero(); total + 1];
    ways[0] = BigUint::one();
    for _ in 0..n {
        let mut running = BigUint::zero();
        for w in ways.iter_mut() {
            running += &*w;
            *w = running.clone();
        }
    }
    ways.swap_remove(total)
}

fn binomial(top: u64, r: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= top - i;
        acc /= i + 1;
    }
    acc
}

/// `a(n, k) = #{x ∈ ℤⁿ : x_j ≤ 1, Σ x_j = k}`, computed by enumeration and
/// checked against `C(2n - k - 1, n - 1)`.
pub fn count_exact(n: u32, k: i64) -> Result<BigUint> {
    check(n, k)?;
    let total = (i64::from(n) - k) as usize;
    let dp = count_by_enumeration(n, total);
    let closed = binomial(total as u64 + u64::from(n) - 1, u64::from(n) - 1);
    if dp != closed {
        return Err(Error::Inconsistency {
            n,
            k,
            dp: dp.to_string(),
            closed: closed.to_string(),
        });
    }
    Ok(dp)
}

/// Volume of the unit ball in `ℝ^m`; `α(0) = 1`.
pub fn unit_ball_volume(m: u32) -> f64 {
    // Γ(m/2 + 1): factorial for even m, √π m!! / 2^{(m+1)/2} for odd m
    let gamma_half = if m % 2 == 0 {
        (1..=m / 2).map(f64::from).product::<f64>()
    } else {
        let double_fact: f64 = (1..=m).rev().step_by(2).map(f64::from).product();
        PI.sqrt() * double_fact / 2f64.powi(m.div_ceil(2) as i32)
    };
    PI.powf(f64::from(m) / 2.0) / gamma_half
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// `a(n) = √n 2^{n-1} / (α(n-1) (n-1)!)`.
pub fn bound_constant(n: u32) -> f64 {
    f64::from(n).sqrt() * 2f64.powi(n as i32 - 1) / (unit_ball_volume(n - 1) * factorial(n - 1))
}

/// `a(n) (|k| + 3n/2)^{n-1}`.
pub fn bound_value(n: u32, k: i64) -> Result<f64> {
    check(n, k)?;
    Ok(bound_constant(n) * (k.unsigned_abs() as f64 + 1.5 * f64::from(n)).powi(n as i32 - 1))
}

pub fn lattice_count(n: u32, k: i64) -> Result<LatticeCount> {
    Ok(LatticeCount {
        n,
        k,
        exact: count_exact(n, k)?,
        bound: bound_value(n, k)?,
    })
}

/// Area of `{x ∈ ℝⁿ : x_j ≥ 0, Σ x_j = r}`: `√n r^{n-1} / (n-1)!`.
pub fn simplex_area(n: u32, r: f64) -> Result<f64> {
    if n < 2 || !(r >= 0.0) {
        return Err(Error::Domain(format!("simplex area needs n >= 2, r >= 0; got n = {n}, r = {r}")));
    }
    Ok(f64::from(n).sqrt() * r.powi(n as i32 - 1) / factorial(n - 1))
}

/// Area of `{x ∈ ℝⁿ : x_j ≤ 3/2, Σ x_j = r}` for `r < 0`:
/// `√n (|r| + 3n/2)^{n-1} / (n-1)!`.
pub fn hyperplane_area(n: u32, r: f64) -> Result<f64> {
    if n < 2 || !(r < 0.0) {
        return Err(Error::Domain(format!("hyperplane area needs n >= 2, r < 0; got n = {n}, r = {r}")));
    }
    Ok(f64::from(n).sqrt() * (r.abs() + 1.5 * f64::from(n)).powi(n as i32 - 1) / factorial(n - 1))
}
