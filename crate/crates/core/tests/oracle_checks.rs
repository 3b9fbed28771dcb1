mod common;

use bsboot_core::numerics::beta_sample;
use bsboot_core::oracle::{laplace_discrete, ks_two_sample, PosteriorGrid};
use bsboot_core::{
    bootstrap, CenteringDistribution, FunctionalSpec, Observation, Posterior, PrecisionFunction, PriorSpec,
    RngStream, SurvivalDataset,
};
use common::*;

// Monte Carlo E[exp(-Σ h_j ΔZ_j)] = E[∏ (1 - U_j)^{h_j}] from prior jump draws.
fn laplace_monte_carlo(prior: &PriorSpec, h: &[f64], draws: usize, seed: u64) -> (f64, f64) {
    let f = &prior.centering;
    let atoms = f.atoms();
    let mut rng = RngStream::new(seed, 0);
    let values: Vec<f64> = (0..draws)
        .map(|_| {
            let mut v = 1.0;
            for (j, &(x, p)) in atoms.iter().enumerate() {
                let c = prior.precision.eval(x);
                let beta = if j + 1 == atoms.len() { 0.0 } else { c * f.sf(x) };
                let u = beta_sample(c * p, beta, &mut rng).unwrap();
                v *= (1.0 - u).powf(h[j]);
            }
            v
        })
        .collect();
    mean_se(&values)
}

#[test]
fn laplace_functional_two_atom_example() {
    let p = prior(2.0, CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap());
    let closed = laplace_discrete(&p, |x| if x == 1.0 { 1.0 } else { 0.0 }).unwrap();
    assert!((closed - 0.5).abs() < 1e-14);
    let (mc, se) = laplace_monte_carlo(&p, &[1.0, 0.0], 1_000_000, 1);
    assert!((mc - closed).abs() < 4.0 * se);
}

#[test]
fn laplace_functional_random_configurations() {
    let mut g = Lcg(99);
    for cfg in 0..20 {
        let k = 2 + (g.next_f64() * 5.0) as usize;
        let raw: Vec<f64> = (0..k).map(|_| 0.1 + g.next_f64()).collect();
        let total: f64 = raw.iter().sum();
        let mut atoms: Vec<(f64, f64)> = raw.iter().enumerate().map(|(i, r)| ((i + 1) as f64 * 0.7, r / total)).collect();
        // make the masses sum to one exactly
        let head: f64 = atoms[..k - 1].iter().map(|a| a.1).sum();
        atoms[k - 1].1 = 1.0 - head;
        let precision = if g.next_f64() < 0.5 {
            PrecisionFunction::constant(0.3 + 4.0 * g.next_f64()).unwrap()
        } else {
            PrecisionFunction::piecewise(vec![1.5], vec![0.3 + 4.0 * g.next_f64(), 0.3 + 4.0 * g.next_f64()]).unwrap()
        };
        let p = PriorSpec::new(precision, CenteringDistribution::discrete(atoms.clone()).unwrap());
        let mut h: Vec<f64> = (0..k).map(|_| 2.0 * g.next_f64()).collect();
        h[k - 1] = 0.0;
        let closed = laplace_discrete(&p, |x| h[atoms.iter().position(|a| a.0 == x).unwrap()]).unwrap();
        let (mc, se) = laplace_monte_carlo(&p, &h, 100_000, 100 + cfg);
        assert!((mc - closed).abs() < 4.0 * se, "cfg {cfg}: closed={closed} mc={mc} se={se}");
    }
}

#[test]
fn grid_draws_average_to_posterior_mean() {
    let post = pbc_posterior(0);
    let grid = PosteriorGrid::new(&post, 12.0, 400, &[]).unwrap();
    let b = 10_000;
    let mut sums = vec![Vec::with_capacity(b); grid.grid().len()];
    for i in 0..b as u64 {
        let d = grid.draw_indexed(2, i).unwrap();
        for (r, s) in d.survival.iter().enumerate() {
            sums[r].push(1.0 - s);
        }
    }
    for (r, &t) in grid.grid().iter().enumerate() {
        let (mean, se) = mean_se(&sums[r]);
        assert!((mean - post.cdf(t)).abs() <= 4.0 * se + 1e-12, "t={t} mean={mean} F*={}", post.cdf(t));
    }
}

#[test]
fn grid_is_exact_for_discrete_posterior() {
    // With a discrete F* the grid jumps are the posterior jumps, so the
    // grid law of G(1) is Beta(alpha, beta) of the first atom.
    let p = prior(2.0, CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap());
    let data = SurvivalDataset::new(vec![Observation::new(1.5, false)]).unwrap();
    let post = Posterior::new(&p, &data);
    let a = post.atoms()[0];
    let grid = PosteriorGrid::new(&post, 1.5, 10, &[]).unwrap();
    let v: Vec<f64> = (0..20_000).map(|i| 1.0 - grid.draw_indexed(3, i).unwrap().survival.last().copied().unwrap()).collect();
    let (mean, se) = mean_se(&v);
    let want = a.alpha / (a.alpha + a.beta);
    assert!((mean - want).abs() < 4.0 * se);
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    let want_var = a.alpha * a.beta / ((a.alpha + a.beta).powi(2) * (a.alpha + a.beta + 1.0));
    assert!((var - want_var).abs() < 0.05 * want_var, "var={var} want={want_var}");
}

#[test]
fn refinement_changes_distance_little() {
    let post = pbc_posterior(0);
    let phi = FunctionalSpec::builtin("rmst", Some(10.0)).unwrap();
    let reference = bootstrap::functional_sample(&post, &phi, 1000, 10_000, 11).unwrap().values;
    let distance = |mesh: usize| {
        let grid = PosteriorGrid::new(&post, 12.0, mesh, &[10.0]).unwrap();
        let v: Vec<f64> = (0..10_000)
            .map(|i| phi.evaluate(&grid.draw_indexed(12, i).unwrap().distribution).unwrap())
            .collect();
        ks_two_sample(&v, &reference).unwrap()
    };
    let coarse = distance(500);
    let fine = distance(1000);
    assert!((coarse - fine).abs() < 0.02, "coarse={coarse} fine={fine}");
}

#[test]
fn horizon_past_total_mass_is_rejected() {
    let p = prior(1.0, CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap());
    let post = Posterior::new(&p, &SurvivalDataset::empty());
    assert!(PosteriorGrid::new(&post, 3.0, 100, &[]).is_err());
}

#[test]
fn ks_examples() {
    assert_eq!(ks_two_sample(&[3.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    assert_eq!(ks_two_sample(&[1.0], &[2.0]).unwrap(), 1.0);
    assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.5]).unwrap(), 0.5);
}
