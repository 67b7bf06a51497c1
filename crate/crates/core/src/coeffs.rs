//! Exact coefficient algebra for the low-energy spectral shift expansion and
//! the large-time sausage expansions.
//!
//! `xi` coefficients multiply powers of `-log(lambda)`, the sausage
//! coefficients `gamma` and `beta` multiply `t (log t)^k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{binomial_signed, gamma_derivs_at_one, kernel_coefficients, EULER_GAMMA};

/// Highest `|k|` for which `xi_0^k` is available in closed form.
pub const XI_MAX_ORDER: usize = 3;

/// Tolerance on imaginary residues in the trace assembly.
pub const IMAG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVariable {
    /// `L = -log(lambda)`
    NegLogLambda,
    /// `L = log(t)`
    LogT,
}

/// Finite series `sum_k c_k L^k` over negative orders `k <= -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    variable: SeriesVariable,
    coefficients: BTreeMap<i32, f64>,
}

impl LogSeries {
    pub fn new<I>(variable: SeriesVariable, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, f64)>,
    {
        let mut coefficients = BTreeMap::new();
        for (k, c) in terms {
            if k > -1 {
                return Err(Error::InvalidInput(format!("series order {k} must be <= -1")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidInput(format!("coefficient of order {k} is {c}")));
            }
            coefficients.insert(k, c);
        }
        Ok(Self {
            variable,
            coefficients,
        })
    }

    pub fn variable(&self) -> SeriesVariable {
        self.variable
    }

    pub fn get(&self, k: i32) -> Option<f64> {
        self.coefficients.get(&k).copied()
    }

    pub fn coefficient(&self, k: i32) -> Result<f64> {
        self.get(k).ok_or(Error::MissingOrder(k))
    }

    /// Orders in ascending `|k|`.
    pub fn orders(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.coefficients.iter().rev().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Keeps the orders `-1..=-l`.
    pub fn truncated(&self, l: usize) -> Self {
        let lowest = -(l as i32);
        Self {
            variable: self.variable,
            coefficients: self
                .coefficients
                .range(lowest..)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn eval(&self, l: f64) -> f64 {
        self.coefficients.iter().map(|(&k, &c)| c * l.powi(k)).sum()
    }
}

struct OrderedCoefficients<'a>(&'a LogSeries);

impl Serialize for OrderedCoefficients<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, c) in self.0.orders() {
            map.serialize_entry(&k.to_string(), &c)?;
        }
        map.end()
    }
}

impl Serialize for LogSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LogSeries", 2)?;
        st.serialize_field("variable", &self.variable)?;
        st.serialize_field("coefficients", &OrderedCoefficients(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LogSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            variable: SeriesVariable,
            coefficients: BTreeMap<String, f64>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.coefficients.len());
        for (key, c) in raw.coefficients {
            let k: i32 = key.parse().map_err(de::Error::custom)?;
            terms.push((k, c));
        }
        LogSeries::new(raw.variable, terms).map_err(de::Error::custom)
    }
}

impl fmt::Display for LogSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.variable {
            SeriesVariable::NegLogLambda => "L",
            SeriesVariable::LogT => "log t",
        };
        let mut first = true;
        for (k, c) in self.orders() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:.12} ({var})^{k}")?;
        }
        Ok(())
    }
}

/// `a = a_0` and `b = c_0` of the resolvent kernel expansion.
fn sigma_constants() -> (Complex64, f64) {
    let k0 = kernel_coefficients(0);
    (k0.a, k0.c)
}

/// `theta(R) = |(R + a) / b|`, the divergence radius of the `theta_k` series.
pub fn theta_radius(robin: f64) -> f64 {
    let (a, b) = sigma_constants();
    ((robin + a) / b).norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSequence {
    pub robin: f64,
    /// `values[i]` holds `theta_{-(i+1)}`.
    pub values: Vec<Complex64>,
}

impl ThetaSequence {
    /// `theta_k` for `k` in `-1..=-m`.
    pub fn get(&self, k: i32) -> Option<Complex64> {
        if k > -1 {
            return None;
        }
        self.values.get((-k - 1) as usize).copied()
    }

    pub fn radius(&self) -> f64 {
        theta_radius(self.robin)
    }
}

/// `theta_k = (-1)^(-k) (1/b) ((R + a)/b)^(-(k+1))` for `k = -1..=-m`.
pub fn theta_sequence(robin: f64, m: usize) -> Result<ThetaSequence> {
    if m == 0 || m > 64 {
        return Err(Error::InvalidInput(format!("theta length {m} outside 1..=64")));
    }
    let (a, b) = sigma_constants();
    let ratio = (robin + a) / b;
    let mut values = Vec::with_capacity(m);
    let mut power = Complex64::new(1.0, 0.0);
    for i in 0..m {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        values.push(sign / b * power);
        power *= ratio;
    }
    Ok(ThetaSequence { robin, values })
}

/// `|sum_{k=-1}^{-m} theta_k eta^k + 1/(R + a + b eta)|`.
pub fn theta_generating_check(robin: f64, eta: Complex64, m: usize) -> Result<f64> {
    let radius = theta_radius(robin);
    if eta.norm() <= radius {
        return Err(Error::Divergence {
            eta: eta.norm(),
            theta: radius,
        });
    }
    let theta = theta_sequence(robin, m)?;
    let inv = eta.inv();
    let mut power = inv;
    let mut sum = Complex64::new(0.0, 0.0);
    for value in &theta.values {
        sum += value * power;
        power *= inv;
    }
    let (a, b) = sigma_constants();
    Ok((sum + (robin + a + b * eta).inv()).norm())
}

/// `xi_0^{-1}, xi_0^{-2}, xi_0^{-3}` from the capacity constant `C(K)`.
pub fn xi_coefficients(capacity_const: f64) -> LogSeries {
    let shift = capacity_const - 4f64.ln() + 2.0 * EULER_GAMMA;
    LogSeries::new(
        SeriesVariable::NegLogLambda,
        [(-1, 1.0), (-2, shift), (-3, shift * shift - PI * PI / 3.0)],
    )
    .expect("finite coefficients")
}

/// First `l` coefficients; orders past `XI_MAX_ORDER` are refused.
pub fn xi_coefficients_to(capacity_const: f64, l: usize) -> Result<LogSeries> {
    if l > XI_MAX_ORDER {
        return Err(Error::OrderTooHigh {
            requested: l,
            max: XI_MAX_ORDER,
        });
    }
    Ok(xi_coefficients(capacity_const).truncated(l))
}

fn real_part(order: i32, value: Complex64) -> Result<f64> {
    if value.im.abs() > IMAG_TOLERANCE * value.re.abs().max(1.0) {
        return Err(Error::Consistency {
            order,
            residue: value.im,
        });
    }
    Ok(value.re)
}

/// Assembles `xi_0^{-1..-3}` from the single, double and triple trace values
/// `Tr[T^k] = (i/2) theta_k`, `Tr[T^k1 T^k2] = -(1/4) theta_k1 theta_k2`,
/// `Tr[T^k1 T^k2 T^k3] = -(i/8) theta_k1 theta_k2 theta_k3`.
pub fn xi_via_traces(robin: f64) -> Result<LogSeries> {
    let theta = theta_sequence(robin, 3)?;
    let t = |k: i32| theta.get(k).expect("three orders");
    let i = Complex64::new(0.0, 1.0);
    let single = |k: i32| i / 2.0 * t(k);
    let double = |k1: i32, k2: i32| -0.25 * t(k1) * t(k2);
    let triple = |k1: i32, k2: i32, k3: i32| -i / 8.0 * t(k1) * t(k2) * t(k3);
    let prefactor = (2.0 * PI * i).inv();

    let xi1 = -prefactor * single(-1);
    let xi2 = prefactor * (-single(-2) + 0.5 * double(-1, -1));
    let xi3 = prefactor
        * (-single(-3) + 0.5 * (double(-2, -1) + double(-1, -2)) - triple(-1, -1, -1) / 3.0);

    LogSeries::new(
        SeriesVariable::NegLogLambda,
        [
            (-1, real_part(-1, xi1)?),
            (-2, real_part(-2, xi2)?),
            (-3, real_part(-3, xi3)?),
        ],
    )
}

/// `gamma_0^k = 4 pi sum_{s - r = k, s <= -1, r >= 0} xi_0^s (-1)^r C(s, r) Gamma^(r)(1)`
/// for `k = -1..=-l`.
pub fn gamma_coefficients(xi: &LogSeries, l: usize) -> Result<LogSeries> {
    if xi.variable() != SeriesVariable::NegLogLambda {
        return Err(Error::InvalidInput("gamma coefficients need a -log(lambda) series".into()));
    }
    let derivs = gamma_derivs_at_one(l.saturating_sub(1))?;
    let mut terms = Vec::with_capacity(l);
    for order in 1..=l as i32 {
        let k = -order;
        let mut acc = 0.0;
        for s in k..=-1 {
            let r = (s - k) as u32;
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            acc += xi.coefficient(s)? * sign * binomial_signed(i64::from(s), r) * derivs[r as usize];
        }
        terms.push((k, 4.0 * PI * acc));
    }
    LogSeries::new(SeriesVariable::LogT, terms)
}

/// Free-path (unpinned) sausage coefficients.
pub fn beta_coefficients(capacity_const: f64) -> LogSeries {
    let shift = capacity_const + 1.0 + EULER_GAMMA - 4f64.ln();
    LogSeries::new(
        SeriesVariable::LogT,
        [
            (-1, 4.0 * PI),
            (-2, 4.0 * PI * shift),
            (-3, 4.0 * PI * (shift * shift - PI * PI / 6.0)),
        ],
    )
    .expect("finite coefficients")
}
