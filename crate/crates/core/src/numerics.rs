//! Quadrature, root bracketing and reproducible random streams.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Default number of Gauss-Legendre nodes per smooth segment.
pub const DEFAULT_NODES: usize = 16;

/// Default relative tolerance for [`bisect`].
pub const BISECTION_TOL: f64 = 1e-10;

/// Fixed-order Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Estimate of `∫_a^b f`; errors on any non-finite integrand value.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            if !v.is_finite() {
                return Err(Error::NumericDomain("quadrature integrand"));
            }
            acc += w * v;
        }
        Ok(acc * half)
    }
}

impl Default for GaussLegendre {
    fn default() -> Self {
        GaussLegendre::new(DEFAULT_NODES)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One-shot fixed-order Gauss-Legendre estimate of `∫_a^b f`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
pub fn gauss_legendre<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> Result<f64> {
    if !(a <= b) {
        return Err(Error::invalid("interval", "need a <= b"));
    }
    GaussLegendre::new(nodes).integrate(f, a, b)
}

/// Bisection for `g(x) = target` with `g` nondecreasing on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol * max(1, |hi|)` and returns
/// the upper end of the final bracket, i.e. the smallest resolved `x` with
/// `g(x) >= target`.
pub fn bisect<G: FnMut(f64) -> f64>(
    mut g: G,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) {
        return Err(Error::NumericDomain("bisection endpoints"));
    }
    if !(glo <= target && target <= ghi) || glo == ghi && glo != target {
        return Err(Error::Bracketing { target, lo, hi });
    }
    let width = tol * hi.abs().max(1.0);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A reproducible random stream identified by `(seed, index)`.
///
/// The same pair always yields the same sequence; distinct indices select
/// distinct ChaCha streams under the same key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        RngStream { seed, index, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open_low(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Standard exponential variate.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform_open_low().ln()
    }

    /// `ln X` for `X ~ Gamma(shape, 1)`, accurate for tiny shapes.
    pub fn ln_gamma_variate(&mut self, shape: f64) -> f64 {
        if shape >= 1.0 {
            sample_gamma(shape, &mut self.rng).ln()
        } else {
            // Gamma(a) = Gamma(a + 1) * U^(1/a)
            let g = sample_gamma(shape + 1.0, &mut self.rng).ln();
            g + self.uniform_open_low().ln() / shape
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0)
        .expect("shape validated by caller")
        .sample(rng)
}

/// `Beta(alpha, beta)` variate; `beta == 0` returns exactly one.
///
/// Built from two gamma variates in log space so very small shapes do not
/// underflow to a spurious 0/0.
pub fn beta_sample(alpha: f64, beta: f64, rng: &mut RngStream) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("beta shape alpha", alloc::format!("must be positive, got {alpha}")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::invalid("beta shape beta", alloc::format!("must be nonnegative, got {beta}")));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    let lx = rng.ln_gamma_variate(alpha);
    let ly = rng.ln_gamma_variate(beta);
    // x / (x + y) = 1 / (1 + exp(ly - lx))
    let d = ly - lx;
    Ok(if d > 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    })
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}
