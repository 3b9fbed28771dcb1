//! The beta-Stacy bootstrap and the Bayesian bootstraps it contains as
//! special cases.
//!
//! One bootstrap draw takes `m` samples from `F*`, merges equal values into
//! `X_1 < … < X_D` with empirical CDF `F_m`, and attaches stick-breaking
//! weights `Z_i = U_i ∏_{j<i} (1 - U_j)` where
//! `U_i ~ Beta(c*(X_i) ΔF_m(X_i), c*(X_i) (1 - F_m(X_i)))`. The last stick has
//! `β = 0`, so `U_D = 1` and the weights sum to one.
//!
//! Every draw `b` reads only from the random stream `(seed, b)`, so results
//! do not depend on the order in which draws are evaluated.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::SurvivalDataset;
use crate::distributions::{CenteringDistribution, PrecisionFunction, PriorSpec};
use crate::error::{Error, Result};
use crate::functionals::{Arity, FunctionalSpec};
use crate::numerics::{beta_sample, RngStream};
use crate::posterior::Posterior;
use crate::sampler::{sample_fstar_tagged, DrawSource};

/// Default number of `F*` samples per bootstrap draw.
pub const DEFAULT_M: usize = 1000;
/// Default number of bootstrap draws.
pub const DEFAULT_DRAWS: usize = 10_000;
/// Precision used for the `c -> 0` limit.
pub const LIMIT_PRECISION: f64 = 1e-8;
/// Largest tolerated share of excluded (non-finite) draws.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.001;

// Stream offset for the second group of a two-sample run.
const SECOND_GROUP_STREAMS: u64 = 1 << 63;

/// A discrete distribution `Σ Z_i δ_{X_i}` on sorted distinct support points.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDistribution {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedDistribution {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptyInput("support"));
        }
        if support.len() != weights.len() {
            return Err(Error::invalid(
                "weights",
                format!("{} weights for {} support points", weights.len(), support.len()),
            ));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("support", "points must be finite"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("support", "points must be strictly increasing"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights", "must be finite and nonnegative"));
        }
        Ok(WeightedDistribution { support, weights })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of support points `D`.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `G h = Σ h(X_i) Z_i`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, h: F) -> f64 {
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(x, z)| h(*x) * z)
            .sum()
    }

    /// `G(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.support.partition_point(|s| *s <= x);
        self.weights[..k].iter().sum()
    }

    /// The distribution of `s X`; `s` must be positive.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid("scale", format!("must be positive, got {s}")));
        }
        Self::new(
            self.support.iter().map(|x| x * s).collect(),
            self.weights.clone(),
        )
    }
}

/// One posterior bootstrap draw `G_m` from the random stream `rng`.
pub fn bsb_draw(post: &Posterior, m: usize, rng: &mut RngStream) -> Result<WeightedDistribution> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    let mut draws = Vec::with_capacity(m);
    for _ in 0..m {
        let d = sample_fstar_tagged(post, rng)?;
        if !d.value.is_finite() {
            return Err(Error::Evaluation(format!("non-finite draw from F*: {}", d.value)));
        }
        draws.push((d.value, d.source));
    }
    draws.sort_by(|a, b| a.0.total_cmp(&b.0));

    // merge equal values, keeping the multiplicity
    let mut points: Vec<(f64, DrawSource, usize)> = Vec::new();
    for (x, src) in draws {
        match points.last_mut() {
            Some(last) if last.0 == x => {
                last.2 += 1;
                if src == DrawSource::Atom {
                    last.1 = src;
                }
            }
            _ => points.push((x, src, 1)),
        }
    }

    let mf = m as f64;
    let d = points.len();
    let mut support = Vec::with_capacity(d);
    let mut weights = Vec::with_capacity(d);
    let mut below = 0usize;
    let mut remaining = 1.0;
    for (i, &(x, src, count)) in points.iter().enumerate() {
        below += count;
        let z = if i + 1 == d {
            remaining
        } else {
            let c = precision_at(post, x, src)?;
            let alpha = c * count as f64 / mf;
            let beta = c * (m - below) as f64 / mf;
            let u = beta_sample(alpha, beta, rng)?;
            let z = u * remaining;
            remaining -= z;
            z
        };
        support.push(x);
        weights.push(z);
    }
    WeightedDistribution::new(support, weights)
}

// c* at a drawn value; atoms use the value cached with the posterior.
fn precision_at(post: &Posterior, x: f64, src: DrawSource) -> Result<f64> {
    if src == DrawSource::Atom {
        let atoms = post.atoms();
        let k = atoms.partition_point(|a| a.time < x);
        if let Some(a) = atoms.get(k) {
            if a.time == x && a.c_star.is_finite() && a.c_star > 0.0 {
                return Ok(a.c_star);
            }
        }
    }
    post.c_star(x)
}

/// Outcome of a batch of bootstrap draws.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    /// `φ(G_m)` for every retained draw, in draw order.
    pub values: Vec<f64>,
    /// Indices of draws whose functional could not be evaluated.
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
}

impl FunctionalSample {
    /// Gather per-draw results, failing when more than
    /// [`MAX_EXCLUDED_FRACTION`] of the draws could not be evaluated.
    /// Errors other than functional evaluation failures abort immediately.
    pub fn collect<I: IntoIterator<Item = Result<f64>>>(results: I) -> Result<Self> {
        let mut values = Vec::new();
        let mut excluded = Vec::new();
        let mut total = 0;
        for (b, r) in results.into_iter().enumerate() {
            total += 1;
            match r {
                Ok(v) => values.push(v),
                Err(Error::Evaluation(_)) => excluded.push(b),
                Err(e) => return Err(e),
            }
        }
        if excluded.len() as f64 > MAX_EXCLUDED_FRACTION * total as f64 {
            return Err(Error::TooManyExcluded {
                excluded: excluded.len(),
                total,
            });
        }
        Ok(FunctionalSample {
            values,
            excluded,
            warnings: Vec::new(),
        })
    }
}

fn check_counts(m: usize, draws: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    if draws == 0 {
        return Err(Error::invalid("draws", "must be at least 1"));
    }
    Ok(())
}

/// `φ(G_m)` for bootstrap draw number `b`.
pub fn functional_draw(post: &Posterior, phi: &FunctionalSpec, m: usize, seed: u64, b: u64) -> Result<f64> {
    let mut rng = RngStream::new(seed, b);
    let g = bsb_draw(post, m, &mut rng)?;
    phi.evaluate(&g)
}

/// `φ(G_{1,m}, G_{2,m})` for bootstrap draw number `b`; the two groups use
/// disjoint stream ranges.
pub fn two_sample_draw(
    post1: &Posterior,
    post2: &Posterior,
    phi: &FunctionalSpec,
    m: usize,
    seed: u64,
    b: u64,
) -> Result<f64> {
    let g1 = bsb_draw(post1, m, &mut RngStream::new(seed, b))?;
    let g2 = bsb_draw(post2, m, &mut RngStream::new(seed, SECOND_GROUP_STREAMS | b))?;
    phi.evaluate_two(&g1, &g2)
}

fn check_arity(phi: &FunctionalSpec, arity: Arity) -> Result<()> {
    if phi.arity != arity {
        return Err(Error::invalid(
            "functional",
            format!("'{}' has the wrong number of samples for this run", phi.name),
        ));
    }
    Ok(())
}

/// `B` beta-Stacy bootstrap samples of a one-sample functional.
pub fn functional_sample(
    post: &Posterior,
    phi: &FunctionalSpec,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    check_counts(m, draws)?;
    check_arity(phi, Arity::One)?;
    let mut out = FunctionalSample::collect(
        (0..draws as u64).map(|b| functional_draw(post, phi, m, seed, b)),
    )?;
    out.warnings = posterior_warnings(post);
    Ok(out)
}

/// `B` samples of a two-sample functional from independent posteriors.
pub fn two_sample(
    post1: &Posterior,
    post2: &Posterior,
    phi: &FunctionalSpec,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    check_counts(m, draws)?;
    check_arity(phi, Arity::Two)?;
    let mut out = FunctionalSample::collect(
        (0..draws as u64).map(|b| two_sample_draw(post1, post2, phi, m, seed, b)),
    )?;
    out.warnings = posterior_warnings(post1);
    out.warnings.extend(posterior_warnings(post2));
    Ok(out)
}

/// Diagnostics worth surfacing for a posterior.
pub fn posterior_warnings(post: &Posterior) -> Vec<String> {
    let mut w = Vec::new();
    let data = post.data();
    if !data.is_empty() && data.event_count() == 0 {
        w.push(String::from(
            "all observations are censored: F*_d has no atoms and draws come from the prior tail",
        ));
    }
    w
}

/// Uniform Dirichlet weights over the observed times (uncensored data).
pub fn rubin_weights(data: &SurvivalDataset, rng: &mut RngStream) -> Result<WeightedDistribution> {
    if data.has_censoring() {
        return Err(Error::UnsupportedConfiguration(String::from(
            "Rubin's Bayesian bootstrap needs uncensored data; use the Lo (censored-data) bootstrap",
        )));
    }
    if data.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let mut support: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for obs in data.observations() {
        let e = rng.exponential();
        if support.last() == Some(&obs.time) {
            *weights.last_mut().expect("nonempty") += e;
        } else {
            support.push(obs.time);
            weights.push(e);
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    WeightedDistribution::new(support, weights)
}

/// Rubin's Bayesian bootstrap for uncensored data.
pub fn rubin_bootstrap(data: &SurvivalDataset, phi: &FunctionalSpec, draws: usize, seed: u64) -> Result<FunctionalSample> {
    check_counts(1, draws)?;
    check_arity(phi, Arity::One)?;
    FunctionalSample::collect((0..draws as u64).map(|b| {
        let g = rubin_weights(data, &mut RngStream::new(seed, b))?;
        phi.evaluate(&g)
    }))
}

/// Posterior for Lo's censored-data Bayesian bootstrap: the beta-Stacy
/// posterior with `c ≡` [`LIMIT_PRECISION`]. The centering distribution
/// only matters beyond the last observation when it is censored.
pub fn lo_posterior(data: &SurvivalDataset, centering: &CenteringDistribution) -> Result<Posterior> {
    if data.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let prior = PriorSpec::new(PrecisionFunction::constant(LIMIT_PRECISION)?, centering.clone());
    Ok(Posterior::new(&prior, data))
}

/// Lo's Bayesian bootstrap for censored data, as the `c -> 0` limit of the
/// beta-Stacy bootstrap.
pub fn lo_bootstrap(
    data: &SurvivalDataset,
    centering: &CenteringDistribution,
    phi: &FunctionalSpec,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    functional_sample(&lo_posterior(data, centering)?, phi, m, draws, seed)
}

/// Posterior for the proper Bayesian bootstrap with a `DP(k, F)` prior.
pub fn proper_posterior(k: f64, centering: &CenteringDistribution, data: &SurvivalDataset) -> Result<Posterior> {
    if data.has_censoring() {
        return Err(Error::UnsupportedConfiguration(String::from(
            "the proper Bayesian bootstrap needs uncensored data; use the beta-Stacy bootstrap",
        )));
    }
    let prior = PriorSpec::new(PrecisionFunction::constant(k)?, centering.clone());
    Ok(Posterior::new(&prior, data))
}

/// The proper Bayesian bootstrap: the beta-Stacy bootstrap with `c ≡ k` on
/// uncensored data.
pub fn proper_bayesian_bootstrap(
    k: f64,
    centering: &CenteringDistribution,
    data: &SurvivalDataset,
    phi: &FunctionalSpec,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    functional_sample(&proper_posterior(k, centering, data)?, phi, m, draws, seed)
}
