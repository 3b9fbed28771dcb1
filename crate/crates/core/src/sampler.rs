//! Independent draws from the posterior mean `F*`.
//!
//! For a continuous centering distribution a draw is `min(X_d, X_c)` with
//! `X_d ~ F*_d` (possibly `+∞`) and `X_c ~ F*_c`, both by inverse transform.
//! `X_c` solves `H(X_c) = -ln(1 - U)` by bisection on the cached hazard
//! table when the root lies within the data range, and through the quantile
//! function of `F` beyond it, where `H` reduces to the hazard of `F`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{RngStream, BISECTION_TOL};
use crate::posterior::Posterior;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawSource {
    Atom,
    Continuous,
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FStarDraw {
    /// Positive time, or `+∞` when the discrete component puts no atom.
    pub value: f64,
    pub source: DrawSource,
}

// Inverse transform over the atom table for a given uniform.
fn atom_for_uniform(post: &Posterior, u: f64) -> Option<f64> {
    let atoms = post.atoms();
    // first atom with F*_d(t) = 1 - S(t) >= u
    let k = atoms.partition_point(|a| 1.0 - a.survival_after < u);
    atoms.get(k).map(|a| a.time)
}

/// Draw `X_d` from `F*_d`: atom `t_j` with probability `ΔF*_d(t_j)`, else
/// `+∞`.
pub fn sample_discrete(post: &Posterior, rng: &mut RngStream) -> FStarDraw {
    // U in (0, 1] so that a zero-mass table never returns an atom
    let u = rng.uniform_open_low();
    match atom_for_uniform(post, u) {
        Some(t) => FStarDraw {
            value: t,
            source: DrawSource::Atom,
        },
        None => FStarDraw {
            value: f64::INFINITY,
            source: DrawSource::Atom,
        },
    }
}

/// Solve `H(x) = r` for `x`, the inverse of the continuous component.
pub fn invert_continuous(post: &Posterior, r: f64) -> Result<FStarDraw> {
    if r <= 0.0 {
        return Ok(FStarDraw {
            value: f64::MIN_POSITIVE,
            source: DrawSource::Continuous,
        });
    }
    let h_end = post.continuous_hazard_at_y_max();
    if r > h_end {
        let f = &post.prior().centering;
        let y = post.y_max();
        let value = f.inverse_ln_sf(f.ln_sf(y) - (r - h_end));
        return Ok(FStarDraw {
            value: value.max(y).max(f64::MIN_POSITIVE),
            source: DrawSource::Tail,
        });
    }
    let value = post.invert_hazard_in_range(r, BISECTION_TOL)?;
    Ok(FStarDraw {
        value: value.max(f64::MIN_POSITIVE),
        source: DrawSource::Continuous,
    })
}

/// Draw `X_c` from `F*_c` (continuous centering distributions only).
pub fn sample_continuous(post: &Posterior, rng: &mut RngStream) -> Result<FStarDraw> {
    if !post.has_continuous_part() {
        return Err(Error::UnsupportedConfiguration(
            "continuous component requested for a discrete centering distribution".into(),
        ));
    }
    let r = -(-rng.uniform()).ln_1p();
    invert_continuous(post, r)
}

/// One draw from `F*` for a continuous centering distribution.
pub fn sample_fstar(post: &Posterior, rng: &mut RngStream) -> Result<f64> {
    Ok(sample_fstar_tagged(post, rng)?.value)
}

/// Like [`sample_fstar`] but reporting which component produced the value.
pub fn sample_fstar_tagged(post: &Posterior, rng: &mut RngStream) -> Result<FStarDraw> {
    if !post.has_continuous_part() {
        return sample_fstar_discrete_prior(post, rng).map(|value| FStarDraw {
            value,
            source: DrawSource::Atom,
        });
    }
    let xd = sample_discrete(post, rng);
    let xc = sample_continuous(post, rng)?;
    Ok(combine(xd, xc))
}

/// `min(X_d, X_c)`.
pub fn combine(xd: FStarDraw, xc: FStarDraw) -> FStarDraw {
    if xd.value <= xc.value {
        xd
    } else {
        xc
    }
}

/// One draw from `F*` for a discrete centering distribution, by inverse
/// transform over the prior atoms and event times.
pub fn sample_fstar_discrete_prior(post: &Posterior, rng: &mut RngStream) -> Result<f64> {
    let u = rng.uniform_open_low();
    atom_for_uniform(post, u).ok_or_else(|| {
        Error::UnsupportedConfiguration(
            "posterior mean has mass beyond the support of the discrete centering distribution"
                .into(),
        )
    })
}
