#![allow(dead_code)]

use bsboot_core::{
    CenteringDistribution, Observation, Posterior, PrecisionFunction, PriorSpec, SurvivalDataset,
};

pub const DAYS_PER_YEAR: f64 = 365.25;

/// One arm of the PBC trial data shipped in `data/pbc.csv`, in years.
pub fn pbc_arm(group: u32) -> SurvivalDataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pbc.csv");
    let text = std::fs::read_to_string(path).expect("data/pbc.csv");
    let obs = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let g: u32 = f[2].trim().parse().unwrap();
            (g == group).then(|| {
                Observation::new(f[0].trim().parse::<f64>().unwrap() / DAYS_PER_YEAR, f[1].trim() == "2")
            })
        })
        .collect();
    SurvivalDataset::new(obs).unwrap()
}

pub fn prior(c: f64, f: CenteringDistribution) -> PriorSpec {
    PriorSpec::new(PrecisionFunction::constant(c).unwrap(), f)
}

pub fn exp_prior(c: f64, median: f64) -> PriorSpec {
    prior(c, CenteringDistribution::exp_with_median(median).unwrap())
}

pub fn pbc_posterior(group: u32) -> Posterior {
    Posterior::new(&exp_prior(1.0, 10.0), &pbc_arm(group))
}

/// Small deterministic generator for test datasets, independent of the
/// library's random streams.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random dataset with `n` observations, roughly `censor_rate` censored,
/// times rounded to a coarse grid so ties occur.
pub fn random_dataset(seed: u64, n: usize, censor_rate: f64) -> SurvivalDataset {
    let mut g = Lcg(seed);
    let obs = (0..n)
        .map(|_| {
            let t = (1.0 + 40.0 * g.next_f64()).round() / 4.0;
            Observation::new(t, g.next_f64() >= censor_rate)
        })
        .collect();
    SurvivalDataset::new(obs).unwrap()
}

/// Mean and standard error of the mean.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sided DKW band half-width at confidence `1 - alpha`.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// `sup_x |F_n(x) - F(x)|` for a sample and a CDF with left limits.
pub fn ks_one_sample(sample: &mut [f64], cdf: impl Fn(f64) -> f64, cdf_left: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sample.len() {
        let x = sample[i];
        let mut j = i;
        while j < sample.len() && sample[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - cdf_left(x)).abs());
        d = d.max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}
