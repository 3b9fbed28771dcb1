//! Prior ingredients: the centering distribution `F` and the precision
//! function `c(x)`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a discrete centering distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Centering distribution `F` of a beta-Stacy prior, with `F(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum CenteringDistribution {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    /// Sorted atoms `(x_j, p_j)` with positive masses summing to one.
    Discrete { atoms: Vec<(f64, f64)> },
}

impl CenteringDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::invalid("rate", format!("must be positive, got {rate}")));
        }
        Ok(CenteringDistribution::Exponential { rate })
    }

    /// Exponential distribution with the given median (`rate = ln 2 / median`).
    pub fn exp_with_median(median: f64) -> Result<Self> {
        if !(median.is_finite() && median > 0.0) {
            return Err(Error::invalid(
                "median",
                format!("must be positive, got {median}"),
            ));
        }
        Self::exponential(LN_2 / median)
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::invalid("shape", format!("must be positive, got {shape}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
        }
        Ok(CenteringDistribution::Weibull { shape, scale })
    }

    /// Discrete distribution on positive atoms. Atoms are sorted and
    /// duplicate locations merged; defective mass is rejected.
    pub fn discrete(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput("discrete centering distribution"));
        }
        for &(x, p) in &atoms {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::invalid("atom location", format!("must be positive, got {x}")));
            }
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::invalid("atom mass", format!("must be positive, got {p}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid(
                "atom masses",
                format!("must sum to one, got {total}"),
            ));
        }
        Ok(CenteringDistribution::Discrete { atoms: merged })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, CenteringDistribution::Discrete { .. })
    }

    /// Atoms of `F`; empty for the continuous kinds.
    pub fn atoms(&self) -> &[(f64, f64)] {
        match self {
            CenteringDistribution::Discrete { atoms } => atoms,
            _ => &[],
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            CenteringDistribution::Discrete { atoms } => {
                if x < atoms[0].0 {
                    return 0.0;
                }
                let k = atoms.partition_point(|a| a.0 <= x);
                if k == atoms.len() {
                    1.0
                } else {
                    atoms[..k].iter().map(|a| a.1).sum::<f64>().min(1.0)
                }
            }
            _ => -self.ln_sf(x).exp_m1(),
        }
    }

    /// Left limit `F(x-)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match self {
            CenteringDistribution::Discrete { atoms } => {
                let k = atoms.partition_point(|a| a.0 < x);
                if k == atoms.len() {
                    1.0
                } else {
                    atoms[..k].iter().map(|a| a.1).sum::<f64>().min(1.0)
                }
            }
            _ => self.cdf(x),
        }
    }

    /// `1 - F(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            CenteringDistribution::Discrete { atoms } => {
                let k = atoms.partition_point(|a| a.0 <= x);
                atoms[k..].iter().map(|a| a.1).sum()
            }
            _ => self.ln_sf(x).exp(),
        }
    }

    /// `1 - F(x-)`.
    pub fn sf_left(&self, x: f64) -> f64 {
        match self {
            CenteringDistribution::Discrete { atoms } => {
                let k = atoms.partition_point(|a| a.0 < x);
                atoms[k..].iter().map(|a| a.1).sum()
            }
            _ => self.sf(x),
        }
    }

    /// `ΔF(x)`, zero for continuous kinds.
    pub fn mass_at(&self, x: f64) -> f64 {
        match self {
            CenteringDistribution::Discrete { atoms } => {
                match atoms.binary_search_by(|a| a.0.total_cmp(&x)) {
                    Ok(i) => atoms[i].1,
                    Err(_) => 0.0,
                }
            }
            _ => 0.0,
        }
    }

    /// `ln(1 - F(x))` for the continuous kinds, computed without
    /// cancellation in the far tail.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            CenteringDistribution::Exponential { rate } => -rate * x,
            CenteringDistribution::Weibull { shape, scale } => -(x / scale).powf(shape),
            CenteringDistribution::Discrete { .. } => self.sf(x).ln(),
        }
    }

    /// Density of the continuous kinds; `None` for discrete `F`.
    pub fn density(&self, x: f64) -> Option<f64> {
        match *self {
            CenteringDistribution::Exponential { rate } => {
                Some(if x < 0.0 { 0.0 } else { rate * (-rate * x).exp() })
            }
            CenteringDistribution::Weibull { shape, scale } => Some(if x <= 0.0 {
                0.0
            } else {
                let z = x / scale;
                shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
            }),
            CenteringDistribution::Discrete { .. } => None,
        }
    }

    /// Smallest `x >= 0` with `F(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::invalid("probability", format!("must lie in [0, 1), got {p}")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            CenteringDistribution::Discrete { atoms } => {
                let mut acc = 0.0;
                let mut out = atoms[atoms.len() - 1].0;
                for &(x, m) in atoms {
                    acc += m;
                    if acc >= p {
                        out = x;
                        break;
                    }
                }
                out
            }
            _ => self.inverse_ln_sf((-p).ln_1p()),
        })
    }

    /// Continuous kinds: the `x` with `ln(1 - F(x)) = log_survival`.
    pub fn inverse_ln_sf(&self, log_survival: f64) -> f64 {
        let h = -log_survival;
        match *self {
            CenteringDistribution::Exponential { rate } => h / rate,
            CenteringDistribution::Weibull { shape, scale } => scale * h.powf(1.0 / shape),
            CenteringDistribution::Discrete { .. } => {
                // not used for discrete priors; fall back to the generic inverse
                let p = -(-h).exp_m1();
                self.quantile(p.min(1.0 - f64::EPSILON)).unwrap_or(f64::INFINITY)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            CenteringDistribution::Exponential { rate } => 1.0 / rate,
            CenteringDistribution::Weibull { shape, scale } => {
                scale * libm::tgamma(1.0 + 1.0 / shape)
            }
            CenteringDistribution::Discrete { ref atoms } => atoms.iter().map(|a| a.0 * a.1).sum(),
        }
    }
}

/// Precision function `c(x)` with declared bounds `ε <= c(x) <= 1/ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionFunction {
    // strictly increasing, positive
    breakpoints: Vec<f64>,
    // breakpoints.len() + 1 values
    values: Vec<f64>,
    epsilon: f64,
}

impl PrecisionFunction {
    pub fn constant(k: f64) -> Result<Self> {
        Self::piecewise(Vec::new(), alloc::vec![k])
    }

    /// Left-continuous step function: `c(x) = values[i]` for
    /// `x ∈ (breakpoints[i-1], breakpoints[i]]`, with `breakpoints[-1] = 0`
    /// and the last value extending to infinity.
    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::invalid(
                "precision function",
                format!(
                    "{} breakpoints need {} values, got {}",
                    breakpoints.len(),
                    breakpoints.len() + 1,
                    values.len()
                ),
            ));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !(b.is_finite() && b > prev) {
                return Err(Error::invalid(
                    "precision breakpoints",
                    "must be positive, finite and strictly increasing",
                ));
            }
            prev = b;
        }
        for &v in &values {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid("precision value", format!("must be positive, got {v}")));
            }
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        let epsilon = lo.min(1.0 / hi).min(0.5);
        Ok(PrecisionFunction {
            breakpoints,
            values,
            epsilon,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b < x)]
    }

    /// Declared bounds `(ε, 1/ε)`.
    pub fn bounds(&self) -> (f64, f64) {
        // 1/ε can round below the largest value when ε = 1/max
        let hi = self.values.iter().copied().fold(1.0 / self.epsilon, f64::max);
        (self.epsilon, hi)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn as_constant(&self) -> Option<f64> {
        if self.values.len() == 1 {
            Some(self.values[0])
        } else {
            None
        }
    }
}

/// The pair `(c, F)` of a beta-Stacy prior `BS(c, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub precision: PrecisionFunction,
    pub centering: CenteringDistribution,
}

impl PriorSpec {
    pub fn new(precision: PrecisionFunction, centering: CenteringDistribution) -> Self {
        PriorSpec {
            precision,
            centering,
        }
    }
}
