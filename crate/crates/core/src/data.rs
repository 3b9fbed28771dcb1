//! Right-censored observations, counting processes and the Kaplan-Meier
//! estimator.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// A single survival time, possibly right-censored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub time: f64,
    /// `true` for an observed event, `false` for a right-censored time.
    pub event: bool,
    pub group: u32,
}

impl Observation {
    pub fn new(time: f64, event: bool) -> Self {
        Observation {
            time,
            event,
            group: 0,
        }
    }

    pub fn with_group(time: f64, event: bool, group: u32) -> Self {
        Observation { time, event, group }
    }
}

// Ascending time; at equal times events come before censorings.
fn observation_order(a: &Observation, b: &Observation) -> Ordering {
    a.time
        .total_cmp(&b.time)
        .then_with(|| b.event.cmp(&a.event))
}

/// Immutable, sorted collection of right-censored observations.
///
/// Besides the observations themselves the dataset keeps the sorted time
/// vector and the distinct event times with their multiplicities, so
/// `N(x)`, `M(x)` and `ΔN(x)` are binary searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    observations: Vec<Observation>,
    times: Vec<f64>,
    event_times: Vec<f64>,
    // distinct event times and the number of events at each
    event_counts: Vec<(f64, usize)>,
}

impl SurvivalDataset {
    pub fn new(mut observations: Vec<Observation>) -> Result<Self> {
        for (row, obs) in observations.iter().enumerate() {
            if !obs.time.is_finite() || obs.time <= 0.0 {
                return Err(Error::invalid(
                    "observation time",
                    alloc::format!("row {row}: time must be finite and positive, got {}", obs.time),
                ));
            }
        }
        observations.sort_by(observation_order);

        let times: Vec<f64> = observations.iter().map(|o| o.time).collect();
        let event_times: Vec<f64> = observations
            .iter()
            .filter(|o| o.event)
            .map(|o| o.time)
            .collect();

        let mut event_counts: Vec<(f64, usize)> = Vec::new();
        for &t in &event_times {
            match event_counts.last_mut() {
                Some((last, count)) if *last == t => *count += 1,
                _ => event_counts.push((t, 1)),
            }
        }

        Ok(SurvivalDataset {
            observations,
            times,
            event_times,
            event_counts,
        })
    }

    pub fn empty() -> Self {
        SurvivalDataset {
            observations: Vec::new(),
            times: Vec::new(),
            event_times: Vec::new(),
            event_counts: Vec::new(),
        }
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.event_times.len()
    }

    pub fn censored_count(&self) -> usize {
        self.len() - self.event_count()
    }

    pub fn has_censoring(&self) -> bool {
        self.censored_count() > 0
    }

    /// Largest observed time (event or censored), `None` when empty.
    pub fn max_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    /// Distinct observed times, ascending.
    pub fn distinct_times(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for &t in &self.times {
            if out.last() != Some(&t) {
                out.push(t);
            }
        }
        out
    }

    /// Distinct uncensored event times with their event counts.
    pub fn event_counts(&self) -> &[(f64, usize)] {
        &self.event_counts
    }

    /// Observations belonging to one group label, as a new dataset.
    pub fn filter_group(&self, group: u32) -> SurvivalDataset {
        let obs = self
            .observations
            .iter()
            .filter(|o| o.group == group)
            .copied()
            .collect();
        // already validated
        SurvivalDataset::new(obs).expect("subset of a valid dataset")
    }

    /// Sorted distinct group labels present in the data.
    pub fn groups(&self) -> Vec<u32> {
        let mut g: Vec<u32> = self.observations.iter().map(|o| o.group).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// `N(x)`: number of uncensored observations `<= x`.
    pub fn events_up_to(&self, x: f64) -> usize {
        self.event_times.partition_point(|&t| t <= x)
    }

    /// `M(x)`: number of observations `>= x`, censored or not.
    pub fn at_risk(&self, x: f64) -> usize {
        self.len() - self.times.partition_point(|&t| t < x)
    }

    /// `ΔN(x)`: number of uncensored observations exactly at `x`.
    pub fn events_at(&self, x: f64) -> usize {
        match self
            .event_counts
            .binary_search_by(|(t, _)| t.total_cmp(&x))
        {
            Ok(i) => self.event_counts[i].1,
            Err(_) => 0,
        }
    }

    /// The counting-process pair `(N(x), M(x))`.
    pub fn counting(&self, x: f64) -> (usize, usize) {
        (self.events_up_to(x), self.at_risk(x))
    }

    pub fn kaplan_meier(&self) -> KaplanMeier {
        KaplanMeier::new(self)
    }
}

/// Product-limit estimate `Ĝ(x) = 1 - ∏_{t <= x} (1 - dN(t)/M(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KaplanMeier {
    times: Vec<f64>,
    // survival just after each event time
    survival: Vec<f64>,
}

impl KaplanMeier {
    pub fn new(data: &SurvivalDataset) -> Self {
        let mut times = Vec::with_capacity(data.event_counts.len());
        let mut survival = Vec::with_capacity(data.event_counts.len());
        let mut s = 1.0;
        for &(t, d) in &data.event_counts {
            let m = data.at_risk(t);
            s *= (m - d) as f64 / m as f64;
            times.push(t);
            survival.push(s);
        }
        KaplanMeier { times, survival }
    }

    /// Event times at which the estimator jumps.
    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    pub fn survival(&self, x: f64) -> f64 {
        let k = self.times.partition_point(|&t| t <= x);
        if k == 0 {
            1.0
        } else {
            self.survival[k - 1]
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.survival(x)
    }

    /// Left limit `Ĝ(x-)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.times.partition_point(|&t| t < x);
        if k == 0 {
            0.0
        } else {
            1.0 - self.survival[k - 1]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn obs(t: f64, e: bool) -> Observation {
        Observation::new(t, e)
    }

    #[test]
    fn counting_on_empty_dataset() {
        let d = SurvivalDataset::empty();
        assert_eq!(d.counting(0.0), (0, 0));
        assert_eq!(d.counting(3.0), (0, 0));
    }

    #[test]
    fn counting_by_definition() {
        let d = SurvivalDataset::new(vec![obs(1.0, true), obs(2.0, false)]).unwrap();
        assert_eq!(d.counting(1.5), (1, 1));
        assert_eq!(d.counting(0.0), (0, 2));
        assert_eq!(d.counting(1.0), (1, 2));
        assert_eq!(d.counting(2.0), (1, 1));
        assert_eq!(d.counting(2.1), (1, 0));
    }

    #[test]
    fn ties_put_events_first() {
        let d = SurvivalDataset::new(vec![obs(2.0, false), obs(2.0, true), obs(1.0, false)])
            .unwrap();
        let o = d.observations();
        assert_eq!(o[0], obs(1.0, false));
        assert_eq!(o[1], obs(2.0, true));
        assert_eq!(o[2], obs(2.0, false));
        assert_eq!(d.events_at(2.0), 1);
        assert_eq!(d.at_risk(2.0), 2);
    }

    #[test]
    fn rejects_non_positive_times() {
        assert!(SurvivalDataset::new(vec![obs(0.0, true)]).is_err());
        assert!(SurvivalDataset::new(vec![obs(-1.0, true)]).is_err());
        assert!(SurvivalDataset::new(vec![obs(f64::INFINITY, true)]).is_err());
    }

    #[test]
    fn km_single_event() {
        let d = SurvivalDataset::new(vec![obs(1.0, true)]).unwrap();
        let km = d.kaplan_meier();
        assert_eq!(km.cdf(0.999), 0.0);
        assert_eq!(km.cdf(1.0), 1.0);
        assert_eq!(km.cdf(5.0), 1.0);
    }

    #[test]
    fn km_hand_computed() {
        let d = SurvivalDataset::new(vec![
            obs(1.0, true),
            obs(2.0, false),
            obs(3.0, true),
            obs(4.0, false),
        ])
        .unwrap();
        let km = d.kaplan_meier();
        assert!((km.cdf(3.0) - 0.625).abs() < 1e-15);
        assert!((km.cdf(1.0) - 0.25).abs() < 1e-15);
        // largest time censored: plateau below one
        assert!((km.cdf(100.0) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn km_without_censoring_is_ecdf() {
        let times = [0.5, 1.0, 1.0, 2.0, 3.5, 7.0];
        let d = SurvivalDataset::new(times.iter().map(|&t| obs(t, true)).collect()).unwrap();
        let km = d.kaplan_meier();
        for &x in &[0.1, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 3.5, 6.9, 7.0, 10.0] {
            let ecdf = times.iter().filter(|&&t| t <= x).count() as f64 / times.len() as f64;
            assert!((km.cdf(x) - ecdf).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn event_plus_censored_is_n() {
        let d = SurvivalDataset::new(vec![
            obs(1.0, true),
            obs(1.0, false),
            obs(2.0, true),
            obs(5.0, false),
        ])
        .unwrap();
        assert_eq!(d.events_up_to(f64::INFINITY) + d.censored_count(), d.len());
    }
}
