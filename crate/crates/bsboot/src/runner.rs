//! Parallel drivers. Draw `b` always reads the random stream `(seed, b)`,
//! so the output is identical for any number of threads.

use bsboot_core::bootstrap::{
    functional_draw, posterior_warnings, rubin_weights, two_sample_draw, FunctionalSample,
};
use bsboot_core::oracle::{ks_two_sample, PosteriorGrid};
use bsboot_core::{Arity, Error, FunctionalSpec, Posterior, Result, RngStream, SurvivalDataset};
use rayon::prelude::*;

fn check(m: usize, draws: usize, phi: &FunctionalSpec, arity: Arity) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "must be at least 1".into(),
        });
    }
    if draws == 0 {
        return Err(Error::InvalidParameter {
            name: "draws",
            reason: "must be at least 1".into(),
        });
    }
    if phi.arity != arity {
        return Err(Error::InvalidParameter {
            name: "functional",
            reason: format!("'{}' takes the wrong number of samples for this command", phi.name),
        });
    }
    Ok(())
}

/// Beta-Stacy bootstrap samples of a one-sample functional.
pub fn bootstrap(post: &Posterior, phi: &FunctionalSpec, m: usize, draws: usize, seed: u64) -> Result<FunctionalSample> {
    check(m, draws, phi, Arity::One)?;
    let results: Vec<Result<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|b| functional_draw(post, phi, m, seed, b))
        .collect();
    let mut out = FunctionalSample::collect(results)?;
    out.warnings = posterior_warnings(post);
    Ok(out)
}

/// Samples of a two-sample functional from independent posteriors.
pub fn two_sample(
    post1: &Posterior,
    post2: &Posterior,
    phi: &FunctionalSpec,
    m: usize,
    draws: usize,
    seed: u64,
) -> Result<FunctionalSample> {
    check(m, draws, phi, Arity::Two)?;
    let results: Vec<Result<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|b| two_sample_draw(post1, post2, phi, m, seed, b))
        .collect();
    let mut out = FunctionalSample::collect(results)?;
    out.warnings = posterior_warnings(post1);
    out.warnings.extend(posterior_warnings(post2));
    Ok(out)
}

/// Rubin's Bayesian bootstrap (uncensored data only).
pub fn rubin(data: &SurvivalDataset, phi: &FunctionalSpec, draws: usize, seed: u64) -> Result<FunctionalSample> {
    check(1, draws, phi, Arity::One)?;
    // fail before spawning work when the data are censored
    rubin_weights(data, &mut RngStream::new(seed, 0))?;
    let results: Vec<Result<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|b| phi.evaluate(&rubin_weights(data, &mut RngStream::new(seed, b))?))
        .collect();
    FunctionalSample::collect(results)
}

/// Functional values on grid-oracle draws.
pub fn oracle(grid: &PosteriorGrid, phi: &FunctionalSpec, draws: usize, seed: u64) -> Result<Vec<f64>> {
    check(1, draws, phi, Arity::One)?;
    (0..draws as u64)
        .into_par_iter()
        .map(|b| phi.evaluate(&grid.draw_indexed(seed, b)?.distribution))
        .collect()
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DeltaRow {
    pub functional: String,
    pub m: usize,
    pub ks: f64,
}

/// KS distance between bootstrap and oracle samples for each `m` and each
/// functional. All functionals share the same bootstrap and oracle draws.
pub fn delta_table(
    post: &Posterior,
    grid: &PosteriorGrid,
    phis: &[FunctionalSpec],
    ms: &[usize],
    draws: usize,
    seed: u64,
) -> Result<Vec<DeltaRow>> {
    for phi in phis {
        check(1, draws, phi, Arity::One)?;
    }
    let eval_all = |g: &bsboot_core::WeightedDistribution| -> Result<Vec<f64>> {
        phis.iter().map(|phi| phi.evaluate(g)).collect()
    };
    let reference: Vec<Vec<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|b| eval_all(&grid.draw_indexed(seed, b)?.distribution))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &m in ms {
        check(m, draws, &phis[0], Arity::One)?;
        let boot: Vec<Vec<f64>> = (0..draws as u64)
            .into_par_iter()
            .map(|b| {
                let g = bsboot_core::bootstrap::bsb_draw(post, m, &mut RngStream::new(seed, b))?;
                eval_all(&g)
            })
            .collect::<Result<_>>()?;
        for (k, phi) in phis.iter().enumerate() {
            let a: Vec<f64> = boot.iter().map(|v| v[k]).collect();
            let b: Vec<f64> = reference.iter().map(|v| v[k]).collect();
            rows.push(DeltaRow {
                functional: phi.name.clone(),
                m,
                ks: ks_two_sample(&a, &b)?,
            });
        }
    }
    Ok(rows)
}
