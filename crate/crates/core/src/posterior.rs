//! Posterior parameters `(c*, F*)` of a beta-Stacy prior updated with
//! right-censored data.
//!
//! `F*` factors as `1 - F*(x) = (1 - F*_d(x)) (1 - F*_c(x))`:
//!
//! * `F*_d` is a product over atoms `t` (prior atoms and event times) of
//!   `1 - h(t)`, `h(t) = (c(t)ΔF(t) + ΔN(t)) / (c(t)(1 - F(t-)) + M(t))`;
//! * `F*_c(x) = 1 - exp(-H(x))` with `H(x) = ∫_0^x c dF_c / (c (1 - F) + M)`.
//!
//! `M(t)` and `c(t)` are step functions, so the integral is split at every
//! observation time and every breakpoint of `c`. On each segment the
//! integrand, written in the variable `u = F(t)`, is `c / (c (1 - u) + M)`
//! with constant `c` and `M`, and is integrated with a fixed Gauss-Legendre
//! rule. The cumulative value at each segment end is cached. Past the
//! largest observation `M = 0`, the integrand is the hazard of `F` and the
//! integral is `-ln(1 - F)` in closed form.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::data::{KaplanMeier, SurvivalDataset};
use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;

/// One atom of `F*_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorAtom {
    pub time: f64,
    /// Discrete hazard `h = alpha / (alpha + beta)`.
    pub hazard: f64,
    /// `c(t) ΔF(t) + ΔN(t)`.
    pub alpha: f64,
    /// `c(t) (1 - F(t)) + M(t) - ΔN(t)`.
    pub beta: f64,
    /// `1 - F*_d(t-)`.
    pub survival_before: f64,
    /// `1 - F*_d(t)`.
    pub survival_after: f64,
    /// `c*(t)`; NaN where the posterior survival is zero at `t`.
    pub c_star: f64,
}

impl PosteriorAtom {
    /// `ΔF*_d(t)`.
    pub fn mass(&self) -> f64 {
        self.survival_before - self.survival_after
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    ua: f64,
    ub: f64,
    c: f64,
    m: f64,
    // H at `a` and at `b`
    h_start: f64,
    h_stop: f64,
}

/// Beta-Stacy posterior `BS(c*, F*)` for one dataset.
#[derive(Debug, Clone)]
pub struct Posterior {
    prior: PriorSpec,
    data: SurvivalDataset,
    atoms: Vec<PosteriorAtom>,
    segments: Vec<Segment>,
    y_max: f64,
    h_end: f64,
    rule: GaussLegendre,
}

impl Posterior {
    pub fn new(prior: &PriorSpec, data: &SurvivalDataset) -> Self {
        Self::with_rule(prior, data, GaussLegendre::default())
    }

    pub fn with_rule(prior: &PriorSpec, data: &SurvivalDataset, rule: GaussLegendre) -> Self {
        let mut post = Posterior {
            prior: prior.clone(),
            data: data.clone(),
            atoms: Vec::new(),
            segments: Vec::new(),
            y_max: data.max_time().unwrap_or(0.0),
            h_end: 0.0,
            rule,
        };
        post.build_segments();
        post.build_atoms();
        post
    }

    fn build_segments(&mut self) {
        let f = &self.prior.centering;
        if f.is_discrete() || self.data.is_empty() {
            return;
        }
        let mut cuts = self.data.distinct_times();
        cuts.extend(
            self.prior
                .precision
                .breakpoints()
                .iter()
                .copied()
                .filter(|&b| b < self.y_max),
        );
        cuts.push(0.0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut h = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let seg = Segment {
                a,
                b,
                ua: f.cdf(a),
                ub: f.cdf(b),
                c: self.prior.precision.eval(mid),
                m: self.data.at_risk(mid) as f64,
                h_start: h,
                h_stop: h,
            };
            h += self.segment_integral(&seg, seg.ua, seg.ub);
            self.segments.push(Segment { h_stop: h, ..seg });
        }
        self.h_end = h;
    }

    fn build_atoms(&mut self) {
        let f = &self.prior.centering;
        let mut times: Vec<f64> = self.data.event_counts().iter().map(|e| e.0).collect();
        times.extend(f.atoms().iter().map(|a| a.0));
        times.sort_by(f64::total_cmp);
        times.dedup();

        let mut surv = 1.0;
        let mut atoms = Vec::with_capacity(times.len());
        for t in times {
            let c = self.prior.precision.eval(t);
            let d_n = self.data.events_at(t) as f64;
            let m = self.data.at_risk(t) as f64;
            let alpha = c * f.mass_at(t) + d_n;
            if alpha <= 0.0 {
                continue;
            }
            let beta = c * f.sf(t) + (m - d_n);
            let total = alpha + beta;
            let before = surv;
            surv *= beta / total;
            atoms.push(PosteriorAtom {
                time: t,
                hazard: alpha / total,
                alpha,
                beta,
                survival_before: before,
                survival_after: surv,
                c_star: f64::NAN,
            });
        }
        self.atoms = atoms;
        for i in 0..self.atoms.len() {
            let t = self.atoms[i].time;
            self.atoms[i].c_star = self.c_star(t).unwrap_or(f64::NAN);
        }
    }

    // ∫ c / (c (1 - u) + m) du over [ua, ub] within one segment.
    fn segment_integral(&self, seg: &Segment, ua: f64, ub: f64) -> f64 {
        if ub <= ua {
            return 0.0;
        }
        let (c, m) = (seg.c, seg.m);
        // the integrand has a pole at u = 1 + m / c; keep each piece no
        // longer than its distance to the pole
        let dist = 1.0 + m / c - ub;
        let pieces = ((ub - ua) / dist).ceil().clamp(1.0, 1024.0) as usize;
        let step = (ub - ua) / pieces as f64;
        let mut total = 0.0;
        for k in 0..pieces {
            let lo = ua + step * k as f64;
            let hi = if k + 1 == pieces { ub } else { lo + step };
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let mut acc = 0.0;
            for (&x, &w) in self.rule.nodes().iter().zip(self.rule.weights()) {
                let u = mid + half * x;
                acc += w * c / (c * (1.0 - u) + m);
            }
            total += acc * half;
        }
        total
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn data(&self) -> &SurvivalDataset {
        &self.data
    }

    /// Atoms of `F*_d`, ascending in time.
    pub fn atoms(&self) -> &[PosteriorAtom] {
        &self.atoms
    }

    /// Largest observed time, `0` for an empty dataset.
    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    /// `H(y_max)`, the continuous cumulative hazard over the data range.
    pub fn continuous_hazard_at_y_max(&self) -> f64 {
        self.h_end
    }

    /// Whether the centering distribution is continuous (so `F*_c` is
    /// nontrivial).
    pub fn has_continuous_part(&self) -> bool {
        !self.prior.centering.is_discrete()
    }

    /// `1 - F*_d(x)`.
    pub fn survival_discrete(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.time <= x);
        if k == 0 {
            1.0
        } else {
            self.atoms[k - 1].survival_after
        }
    }

    /// `1 - F*_d(x-)`, excluding any atom at `x`.
    pub fn survival_discrete_left(&self, x: f64) -> f64 {
        let k = self.atoms.partition_point(|a| a.time < x);
        if k == 0 {
            1.0
        } else {
            self.atoms[k - 1].survival_after
        }
    }

    /// `F*_d(x) = 1 - ∏_{t_j <= x} (1 - h_j)`.
    pub fn cdf_discrete(&self, x: f64) -> f64 {
        1.0 - self.survival_discrete(x)
    }

    /// Cumulative continuous hazard `H(x)`.
    pub fn cumulative_hazard(&self, x: f64) -> f64 {
        if x <= 0.0 || !self.has_continuous_part() {
            return 0.0;
        }
        let f = &self.prior.centering;
        if x >= self.y_max {
            return self.h_end + f.ln_sf(self.y_max) - f.ln_sf(x);
        }
        let k = self.segments.partition_point(|s| s.b < x);
        let seg = &self.segments[k];
        seg.h_start + self.segment_integral(seg, seg.ua, f.cdf(x))
    }

    /// `F*_c(x) = 1 - exp(-H(x))`.
    pub fn cdf_continuous(&self, x: f64) -> f64 {
        -(-self.cumulative_hazard(x)).exp_m1()
    }

    /// `1 - F*(x)`.
    pub fn survival(&self, x: f64) -> f64 {
        self.survival_discrete(x) * (-self.cumulative_hazard(x)).exp()
    }

    /// `1 - F*(x-)`.
    pub fn survival_left(&self, x: f64) -> f64 {
        self.survival_discrete_left(x) * (-self.cumulative_hazard(x)).exp()
    }

    /// Posterior mean `F*(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 - self.survival(x)
    }

    /// `F*(x-)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        1.0 - self.survival_left(x)
    }

    /// Posterior precision
    /// `c*(x) = (c(x)(1 - F(x)) + M(x) - ΔN(x)) / (1 - F*(x))`.
    ///
    /// At continuity points of `F*` this is the same as using left limits;
    /// at atoms it is the value for which the jump `U ~ Beta(c*ΔF*, c*(1 - F*))`
    /// has the conjugate `Beta(alpha, beta)` law. Evaluated in log space so
    /// the ratio stays finite in the far tail.
    pub fn c_star(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::invalid(
                "c* argument",
                alloc::format!("must be positive and finite, got {x}"),
            ));
        }
        let f = &self.prior.centering;
        let c = self.prior.precision.eval(x);
        let sd = self.survival_discrete(x);
        if sd <= 0.0 {
            return Err(Error::DegeneratePosterior { x });
        }
        let ln_den = sd.ln() - self.cumulative_hazard(x);
        let k = (self.data.at_risk(x) - self.data.events_at(x)) as f64;
        let ln_num = if k == 0.0 {
            if f.is_discrete() {
                let s = f.sf(x);
                if s <= 0.0 {
                    return Err(Error::DegeneratePosterior { x });
                }
                c.ln() + s.ln()
            } else {
                c.ln() + f.ln_sf(x)
            }
        } else {
            (c * f.sf(x) + k).ln()
        };
        let v = (ln_num - ln_den).exp();
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::DegeneratePosterior { x });
        }
        Ok(v)
    }

    /// Evaluate `(F*_d, F*_c, F*, c*)` at `x`; `c*` is `None` where it is
    /// undefined.
    pub fn summary_at(&self, x: f64) -> (f64, f64, f64, Option<f64>) {
        (
            self.cdf_discrete(x),
            self.cdf_continuous(x),
            self.cdf(x),
            self.c_star(x).ok(),
        )
    }

    // Smallest x in [0, y_max] with H(x) >= target; target <= h_end.
    pub(crate) fn invert_hazard_in_range(&self, target: f64, tol: f64) -> Result<f64> {
        let k = self
            .segments
            .partition_point(|s| s.h_stop < target);
        let seg = self.segments.get(k).ok_or(Error::Bracketing {
            target,
            lo: 0.0,
            hi: self.y_max,
        })?;
        let f = &self.prior.centering;
        crate::numerics::bisect(
            |x| seg.h_start + self.segment_integral(seg, seg.ua, f.cdf(x)),
            target,
            seg.a,
            seg.b,
            tol,
        )
    }

    /// `sup_{0 <= x <= upper} |F*(x) - Ĝ(x)|`.
    ///
    /// Between consecutive jumps of either function `Ĝ` is constant and `F*`
    /// is nondecreasing, so the supremum is attained at a jump, as a value or
    /// a left limit, or at `upper`.
    pub fn sup_distance_to_km(&self, km: &KaplanMeier, upper: f64) -> f64 {
        let mut points: Vec<f64> = km
            .jump_times()
            .iter()
            .copied()
            .chain(self.atoms.iter().map(|a| a.time))
            .filter(|&t| t <= upper)
            .collect();
        points.push(upper);
        points
            .into_iter()
            .map(|t| {
                let right = (self.cdf(t) - km.cdf(t)).abs();
                let left = (self.cdf_left(t) - km.cdf_left(t)).abs();
                right.max(left)
            })
            .fold(0.0, f64::max)
    }

    /// Cached `H` at segment end points, as `(time, H(time))` pairs.
    pub fn hazard_table(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push((0.0, 0.0));
        out.extend(self.segments.iter().map(|s| (s.b, s.h_stop)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Observation;
    use crate::distributions::{CenteringDistribution, PrecisionFunction};
    use alloc::vec;

    fn exp_prior(c: f64, median: f64) -> PriorSpec {
        PriorSpec::new(
            PrecisionFunction::constant(c).unwrap(),
            CenteringDistribution::exp_with_median(median).unwrap(),
        )
    }

    fn data(obs: &[(f64, bool)]) -> SurvivalDataset {
        SurvivalDataset::new(obs.iter().map(|&(t, e)| Observation::new(t, e)).collect()).unwrap()
    }

    #[test]
    fn empty_data_gives_prior() {
        let prior = exp_prior(1.0, 10.0);
        let post = Posterior::new(&prior, &SurvivalDataset::empty());
        for i in 0..200 {
            let x = i as f64 * 0.37;
            assert!((post.cdf(x) - prior.centering.cdf(x)).abs() < 1e-10);
            if x > 0.0 {
                assert!((post.c_star(x).unwrap() - 1.0).abs() < 1e-10);
            }
        }
        assert!(post.atoms().is_empty());
    }

    #[test]
    fn continuous_prior_atoms_are_event_times() {
        let post = Posterior::new(&exp_prior(1.0, 10.0), &data(&[(1.0, true), (2.0, false)]));
        let times: Vec<f64> = post.atoms().iter().map(|a| a.time).collect();
        assert_eq!(times, vec![1.0]);
    }

    #[test]
    fn discrete_cdf_below_first_atom_is_zero() {
        let post = Posterior::new(&exp_prior(1.0, 10.0), &data(&[(1.0, true), (3.0, true)]));
        assert_eq!(post.cdf_discrete(0.5), 0.0);
    }

    #[test]
    fn single_atom_hazard() {
        // continuous F, one event at 2 with M = 1: h = 1 / (c F̄(2) + 1)
        let prior = exp_prior(1.0, 10.0);
        let post = Posterior::new(&prior, &data(&[(2.0, true)]));
        let h = 1.0 / (prior.centering.sf(2.0) + 1.0);
        assert!((post.cdf_discrete(2.0) - h).abs() < 1e-15);
        assert!((post.cdf_discrete(5.0) - h).abs() < 1e-15);
    }

    #[test]
    fn near_zero_precision_recovers_km_at_three() {
        let d = data(&[(1.0, true), (3.0, true)]);
        let post = Posterior::new(&exp_prior(1e-8, 10.0), &d);
        assert!((post.cdf_discrete(3.0) - d.kaplan_meier().cdf(3.0)).abs() < 1e-7);
        assert!((post.cdf(3.0) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn discrete_prior_has_no_continuous_part() {
        let prior = PriorSpec::new(
            PrecisionFunction::constant(1.0).unwrap(),
            CenteringDistribution::discrete(vec![(1.0, 0.5), (2.0, 0.5)]).unwrap(),
        );
        let post = Posterior::new(&prior, &data(&[(1.5, true)]));
        for x in [0.5, 1.0, 1.5, 2.0, 10.0] {
            assert_eq!(post.cdf_continuous(x), 0.0);
        }
        // atoms: prior atoms and the event
        assert_eq!(post.atoms().len(), 3);
        assert!((post.cdf(10.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn combined_cdf() {
        // 1 - (1 - 0.3)(1 - 0.5)
        let (fd, fc) = (0.3f64, 0.5f64);
        assert!((1.0 - (1.0 - fd) * (1.0 - fc) - 0.65).abs() < 1e-15);
    }

    #[test]
    fn c_star_beyond_data() {
        let prior = exp_prior(1.0, 10.0);
        let post = Posterior::new(&prior, &data(&[(1.0, true), (2.0, false), (3.0, true)]));
        for x in [3.5, 8.0, 40.0, 300.0] {
            let expected = prior.centering.sf(x) / post.survival(x);
            let got = post.c_star(x).unwrap();
            if x < 100.0 {
                assert!((got - expected).abs() < 1e-9 * expected, "x={x}");
            }
            assert!(got.is_finite() && got > 0.0);
        }
        // constant beyond y_max since both tails share the hazard of F
        let a = post.c_star(10.0).unwrap();
        let b = post.c_star(1000.0).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn c_star_matches_conjugate_jump_parameters() {
        let prior = exp_prior(2.0, 5.0);
        let post = Posterior::new(
            &prior,
            &data(&[(0.5, true), (1.0, true), (1.0, false), (2.0, true), (4.0, false)]),
        );
        for a in post.atoms() {
            let c = a.c_star;
            let mass = a.mass() * (-post.cumulative_hazard(a.time)).exp();
            let sf = post.survival(a.time);
            assert!((c * mass - a.alpha).abs() < 1e-9 * a.alpha);
            assert!((c * sf - a.beta).abs() < 1e-9 * a.beta.max(1.0));
        }
    }

    #[test]
    fn hazard_table_is_nondecreasing() {
        let post = Posterior::new(
            &exp_prior(1.0, 10.0),
            &data(&[(0.4, false), (1.0, true), (2.5, false), (3.0, true), (7.0, false)]),
        );
        let table = post.hazard_table();
        for w in table.windows(2) {
            assert!(w[1].0 > w[0].0);
            assert!(w[1].1 >= w[0].1);
        }
        assert_eq!(table.last().unwrap().0, 7.0);
    }
}
