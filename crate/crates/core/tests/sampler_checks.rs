mod common;

use bsboot_core::sampler::{sample_continuous, sample_discrete, sample_fstar, sample_fstar_discrete_prior};
use bsboot_core::{CenteringDistribution, Observation, Posterior, RngStream, SurvivalDataset};
use common::*;

const N: usize = 100_000;

fn draws(post: &Posterior, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed, 0);
    (0..N).map(|_| sample_fstar(post, &mut rng).unwrap()).collect()
}

#[test]
fn empty_data_continuous_draws_follow_prior() {
    let p = exp_prior(1.0, 10.0);
    let post = Posterior::new(&p, &SurvivalDataset::empty());
    let mut rng = RngStream::new(1, 0);
    let mut v: Vec<f64> = (0..N).map(|_| sample_continuous(&post, &mut rng).unwrap().value).collect();
    let d = ks_one_sample(&mut v, |x| p.centering.cdf(x), |x| p.centering.cdf(x));
    assert!(d < 1.63 / (N as f64).sqrt(), "ks={d}");
}

#[test]
fn continuous_draws_match_riemann_cdf_after_censoring() {
    // one censored observation at 5: H is the prior hazard scaled down on
    // (0, 5] and equal to it afterwards
    let data = SurvivalDataset::new(vec![Observation::new(5.0, false)]).unwrap();
    let p = exp_prior(1.0, 10.0);
    let post = Posterior::new(&p, &data);
    let f = &p.centering;
    // H(x) = ∫ f / ((1 - F) + 1) on (0, min(x, 5)] then -ln(1 - F) increments
    let hazard = |x: f64| {
        let a = x.min(5.0);
        let n = 20_000;
        let h = a / n as f64;
        let g = |t: f64| f.density(t).unwrap() / (2.0 - f.cdf(t));
        let mut s = g(0.0) + g(a);
        for i in 1..n {
            s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let mut total = s * h / 3.0;
        if x > 5.0 {
            total += f.ln_sf(5.0) - f.ln_sf(x);
        }
        total
    };
    let oracle = |x: f64| if x <= 0.0 { 0.0 } else { 1.0 - (-hazard(x)).exp() };
    let mut rng = RngStream::new(2, 0);
    let mut v: Vec<f64> = (0..N).map(|_| sample_continuous(&post, &mut rng).unwrap().value).collect();
    v.sort_by(f64::total_cmp);
    // compare on a grid of sample quantiles to keep the oracle cheap
    let mut d: f64 = 0.0;
    for k in 1..200 {
        let i = k * N / 200;
        d = d.max((i as f64 / N as f64 - oracle(v[i])).abs());
    }
    assert!(d < 0.01, "ks={d}");
}

#[test]
fn fstar_draws_within_dkw_band() {
    let configs = [
        pbc_posterior(0),
        pbc_posterior(1),
        Posterior::new(&exp_prior(5.0, 3.0), &random_dataset(31, 50, 0.3)),
        Posterior::new(
            &prior(0.5, CenteringDistribution::weibull(1.5, 8.0).unwrap()),
            &random_dataset(32, 80, 0.5),
        ),
        Posterior::new(
            &prior(2.0, CenteringDistribution::discrete(vec![(1.0, 0.2), (2.5, 0.3), (4.0, 0.5)]).unwrap()),
            &SurvivalDataset::new(vec![
                Observation::new(1.0, true),
                Observation::new(2.0, false),
                Observation::new(2.5, true),
                Observation::new(3.0, true),
            ])
            .unwrap(),
        ),
    ];
    let eps = dkw_epsilon(N, 0.01);
    for (i, post) in configs.iter().enumerate() {
        let mut v = draws(post, 10 + i as u64);
        let d = ks_one_sample(&mut v, |x| post.cdf(x), |x| post.cdf_left(x));
        assert!(d < eps, "config {i}: sup={d} band={eps}");
    }
}

#[test]
fn tail_fraction_matches_posterior() {
    for (i, post) in [pbc_posterior(0), Posterior::new(&exp_prior(2.0, 4.0), &random_dataset(41, 30, 0.5))]
        .iter()
        .enumerate()
    {
        let y = post.y_max();
        let p = post.survival(y);
        let beyond = draws(post, 50 + i as u64).iter().filter(|&&x| x > y).count() as f64 / N as f64;
        let se = (p * (1.0 - p) / N as f64).sqrt();
        assert!((beyond - p).abs() < 4.0 * se, "beyond={beyond} p={p}");
    }
}

#[test]
fn pbc_atom_frequencies() {
    let post = pbc_posterior(0);
    let mut rng = RngStream::new(3, 0);
    let mut counts = vec![0usize; post.atoms().len()];
    let mut infinite = 0;
    for _ in 0..N {
        let x = sample_discrete(&post, &mut rng).value;
        match post.atoms().iter().position(|a| a.time == x) {
            Some(k) => counts[k] += 1,
            None => {
                assert!(x.is_infinite());
                infinite += 1;
            }
        }
    }
    for (a, &c) in post.atoms().iter().zip(&counts) {
        let p = a.mass();
        let se = (p * (1.0 - p) / N as f64).sqrt();
        assert!((c as f64 / N as f64 - p).abs() < 4.0 * se, "t={} p={p} freq={}", a.time, c as f64 / N as f64);
    }
    let p_inf = post.atoms().last().unwrap().survival_after;
    let se = (p_inf * (1.0 - p_inf) / N as f64).sqrt();
    assert!((infinite as f64 / N as f64 - p_inf).abs() < 4.0 * se);
}

#[test]
fn discrete_prior_without_data() {
    let p = prior(1.0, CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap());
    let post = Posterior::new(&p, &SurvivalDataset::empty());
    let mut rng = RngStream::new(4, 0);
    let ones = (0..N).filter(|_| sample_fstar_discrete_prior(&post, &mut rng).unwrap() == 1.0).count();
    let se = (0.25 / N as f64).sqrt();
    assert!((ones as f64 / N as f64 - 0.5).abs() < 4.0 * se);
}

#[test]
fn discrete_prior_with_one_event() {
    // hand masses 0.75 at 1 and 0.25 at 2
    let p = prior(1.0, CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap());
    let data = SurvivalDataset::new(vec![Observation::new(1.0, true)]).unwrap();
    let post = Posterior::new(&p, &data);
    let mut rng = RngStream::new(5, 0);
    let ones = (0..N).filter(|_| sample_fstar(&post, &mut rng).unwrap() == 1.0).count();
    let se = (0.75 * 0.25 / N as f64).sqrt();
    assert!((ones as f64 / N as f64 - 0.75).abs() < 4.0 * se);
}
