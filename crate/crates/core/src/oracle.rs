//! Independent references for validation: a grid simulator of the
//! posterior process, the closed-form Laplace functional of a discrete-prior
//! beta-Stacy process, and the two-sample Kolmogorov-Smirnov distance.
//!
//! The grid simulator discretizes `[0, T]` at a mesh plus every posterior
//! atom. Each mesh cell contributes the continuous mass of `F*` over the open
//! cell and each atom its own jump; every piece gets an independent hazard
//! `V ~ Beta(c* ΔF*, c* (1 - F*))` with `c*` taken at the cell midpoint or at
//! the atom. The simulation is exact when `F*` is discrete and converges to
//! the posterior law as the mesh is refined.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bootstrap::WeightedDistribution;
use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::numerics::{beta_sample, ln_beta, RngStream};
use crate::posterior::Posterior;

/// Default number of uniform mesh points on `[0, T]`.
pub const DEFAULT_MESH_POINTS: usize = 2000;

// Stream offset keeping oracle draws apart from bootstrap draws under one seed.
const ORACLE_STREAMS: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    // where the piece's mass is placed
    location: f64,
    // grid time reached once this piece is applied
    end: f64,
    alpha: f64,
    beta: f64,
}

/// Precomputed Beta parameters for grid simulation of one posterior.
#[derive(Debug, Clone)]
pub struct PosteriorGrid {
    grid: Vec<f64>,
    pieces: Vec<Piece>,
    tail_point: f64,
}

impl PosteriorGrid {
    /// Grid of `mesh_points` uniform points on `[0, horizon]` plus every
    /// posterior atom up to the horizon and the given `extra` points (e.g.
    /// thresholds of indicator functionals).
    pub fn new(post: &Posterior, horizon: f64, mesh_points: usize, extra: &[f64]) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
        }
        if mesh_points < 2 {
            return Err(Error::invalid("mesh points", "need at least 2"));
        }
        if post.survival(horizon) <= 0.0 {
            return Err(Error::NumericDomain("F* reaches 1 before the grid horizon"));
        }
        let step = horizon / (mesh_points - 1) as f64;
        let mut grid: Vec<f64> = (1..mesh_points).map(|i| i as f64 * step).collect();
        grid.push(horizon);
        grid.extend(post.atoms().iter().map(|a| a.time).filter(|t| *t <= horizon));
        grid.extend(extra.iter().copied().filter(|t| *t > 0.0 && *t <= horizon));
        grid.sort_by(f64::total_cmp);
        grid.dedup();

        let atom_at = |t: f64| {
            let atoms = post.atoms();
            let k = atoms.partition_point(|a| a.time < t);
            atoms.get(k).filter(|a| a.time == t).copied()
        };

        let mut pieces = Vec::with_capacity(grid.len() + post.atoms().len());
        let mut prev = 0.0;
        let mut f_prev = 0.0;
        for &t in &grid {
            // continuous mass on (prev, t)
            let f_left = post.cdf_left(t);
            let d_cont = f_left - f_prev;
            if d_cont > 0.0 {
                let mid = 0.5 * (prev + t);
                let c = post.c_star(mid)?;
                pieces.push(Piece {
                    location: mid,
                    end: t,
                    alpha: c * d_cont,
                    beta: c * (1.0 - f_left),
                });
            }
            let f_t = post.cdf(t);
            if let Some(a) = atom_at(t) {
                let d_atom = f_t - f_left;
                if d_atom > 0.0 {
                    let sf = 1.0 - f_t;
                    let (alpha, beta) = if sf <= 0.0 {
                        (1.0, 0.0)
                    } else {
                        let c = if a.c_star.is_finite() { a.c_star } else { post.c_star(t)? };
                        (c * d_atom, c * sf)
                    };
                    pieces.push(Piece {
                        location: t,
                        end: t,
                        alpha,
                        beta,
                    });
                }
            }
            prev = t;
            f_prev = f_t;
        }
        Ok(PosteriorGrid {
            grid,
            pieces,
            tail_point: horizon + 0.5 * step,
        })
    }

    /// Grid times `t_1 < … < t_R = T`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Location receiving the mass beyond the horizon in
    /// [`GridPosteriorDraw::distribution`].
    pub fn tail_point(&self) -> f64 {
        self.tail_point
    }

    /// One draw of the posterior process on the grid.
    pub fn draw(&self, rng: &mut RngStream) -> Result<GridPosteriorDraw> {
        let mut survival = Vec::with_capacity(self.grid.len());
        let mut locations = Vec::with_capacity(self.pieces.len() + 1);
        let mut masses = Vec::with_capacity(self.pieces.len() + 1);
        let mut s = 1.0;
        let mut pieces = self.pieces.iter().peekable();
        for &t in &self.grid {
            while let Some(p) = pieces.next_if(|p| p.end <= t) {
                let v = if p.alpha > 0.0 {
                    beta_sample(p.alpha, p.beta, rng)?
                } else {
                    0.0
                };
                let mass = s * v;
                s -= mass;
                locations.push(p.location);
                masses.push(mass);
            }
            survival.push(s);
        }
        locations.push(self.tail_point);
        masses.push(s.max(0.0));
        Ok(GridPosteriorDraw {
            grid: self.grid.clone(),
            survival,
            distribution: WeightedDistribution::new(locations, masses)?,
        })
    }

    /// Draw number `b` under `seed`, on a stream range disjoint from the
    /// bootstrap's.
    pub fn draw_indexed(&self, seed: u64, b: u64) -> Result<GridPosteriorDraw> {
        self.draw(&mut RngStream::new(seed, ORACLE_STREAMS | b))
    }
}

/// One grid realization of the posterior process.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosteriorDraw {
    pub grid: Vec<f64>,
    /// `S(t_r) = 1 - G(t_r)`.
    pub survival: Vec<f64>,
    /// The realization as a discrete distribution: continuous cell mass at
    /// cell midpoints, atom mass at the atoms, and the mass beyond the
    /// horizon at [`PosteriorGrid::tail_point`]. Functionals that only look
    /// at `[0, T]` are unaffected by the tail placement.
    pub distribution: WeightedDistribution,
}

/// Convenience wrapper: build the grid and take draw `b`.
pub fn grid_posterior_draw(post: &Posterior, horizon: f64, mesh_points: usize, seed: u64, b: u64) -> Result<GridPosteriorDraw> {
    PosteriorGrid::new(post, horizon, mesh_points, &[])?.draw_indexed(seed, b)
}

/// `E[exp(-∫ h dZ)]` for `Z = -ln(1 - G)`, `G ~ BS(c, F)` with discrete `F`.
///
/// Jumps of `Z` at atoms are independent with `1 - exp(-ΔZ_j) ~
/// Beta(α_j, β_j)`, so the value is `∏_j B(α_j, β_j + h_j) / B(α_j, β_j)`.
/// At the last atom `β = 0` and `U = 1`, giving a factor of 0 unless
/// `h` vanishes there.
pub fn laplace_discrete<H: Fn(f64) -> f64>(prior: &PriorSpec, h: H) -> Result<f64> {
    let f = &prior.centering;
    if !f.is_discrete() {
        return Err(Error::UnsupportedConfiguration(
            "the closed-form Laplace functional needs a discrete centering distribution".into(),
        ));
    }
    let atoms = f.atoms();
    let mut ln_total = 0.0;
    for (j, &(x, p)) in atoms.iter().enumerate() {
        let hj = h(x);
        if !(hj.is_finite() && hj >= 0.0) {
            return Err(Error::invalid("h", format!("must be finite and nonnegative, got {hj} at {x}")));
        }
        if hj == 0.0 {
            continue;
        }
        if j + 1 == atoms.len() {
            return Ok(0.0);
        }
        let c = prior.precision.eval(x);
        let alpha = c * p;
        let beta = c * f.sf(x);
        ln_total += ln_beta(alpha, beta + hj) - ln_beta(alpha, beta);
    }
    Ok(ln_total.exp())
}

/// `sup_x |F_a(x) - F_b(x)|` for the empirical CDFs of two samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::invalid("sample", "contains NaN"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}
