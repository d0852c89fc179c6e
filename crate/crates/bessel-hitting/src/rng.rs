//! Seedable, counted randomness primitives.
//!
//! Every sampler in the crate draws from an [`RngStream`], which counts the
//! uniform variates it delivers. That counter is a measured output of the
//! experiments (random numbers consumed per replication), so all composite
//! samplers are built strictly on top of [`RngStream::uniform`].
//!
//! The base generator is SplitMix64. Stream splitting derives a child seed by
//! avalanche-mixing the parent seed with the child index:
//! `child_seed = mix(parent_seed ^ mix(index * GOLDEN))`; the rule is a pure
//! function of `(parent_seed, index)`, so replications can be distributed
//! without coordinating draw positions.

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer: full-avalanche 64-bit mix.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A single-owner stream of pseudo-random variates with a draw counter.
///
/// Two streams created with the same seed produce identical sequences.
/// `draw_count` increases by at least one for every sampling call.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    state: u64,
    draws: u64,
    splits: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, state: seed, draws: 0, splits: 0 }
    }

    /// Seed this stream was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform variates delivered so far.
    pub fn draw_count(&self) -> u64 {
        self.draws
    }

    /// Derive an independent child stream. Children are numbered by split
    /// order; the derivation depends only on `(seed, index)`, not on how many
    /// draws the parent has consumed.
    pub fn split(&mut self) -> RngStream {
        self.splits += 1;
        RngStream::new(mix(self.seed ^ mix(self.splits.wrapping_mul(GOLDEN))))
    }

    fn next_bits(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform variate strictly inside (0, 1).
    ///
    /// The 53-bit mapping can produce 0.0 (probability 2^-53); such values
    /// are rejected and redrawn so downstream log/power transforms never see
    /// an endpoint. Counts as one draw.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        loop {
            let u = (self.next_bits() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal variate (Box-Muller, cosine branch). Two draws.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Gamma(shape, 1) variate for shape > 0.
    ///
    /// Shapes below one use Johnk's rejection method; shapes of one and above
    /// use the Marsaglia-Tsang squeeze. The result is clamped to the smallest
    /// positive double so callers can rely on strict positivity even when the
    /// true variate underflows (possible only for very small shapes).
    ///
    /// Panics if `shape` is not a positive finite number.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        assert!(shape.is_finite() && shape > 0.0, "gamma shape must be > 0, got {shape}");
        let g = if shape < 1.0 { self.gamma_johnk(shape) } else { self.gamma_squeeze(shape) };
        g.max(f64::MIN_POSITIVE)
    }

    /// Johnk's method: accept (U^(1/a), V^(1/(1-a))) on the simplex, then
    /// scale an independent exponential.
    fn gamma_johnk(&mut self, shape: f64) -> f64 {
        let inv_a = 1.0 / shape;
        let inv_b = 1.0 / (1.0 - shape);
        loop {
            let x = self.uniform().powf(inv_a);
            let y = self.uniform().powf(inv_b);
            if x + y <= 1.0 {
                let e = -self.uniform().ln();
                return e * x / (x + y);
            }
        }
    }

    /// Marsaglia-Tsang (2000): d = a - 1/3, c = 1/sqrt(9d), accept d*v with
    /// v = (1 + c*x)^3 under the squeeze or the log test.
    fn gamma_squeeze(&mut self, shape: f64) -> f64 {
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.gaussian();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Beta(a, b) via two counted Gammas.
    fn beta(&mut self, a: f64, b: f64) -> f64 {
        let x = self.gamma(a);
        let y = self.gamma(b);
        x / (x + y)
    }

    /// First coordinate of a uniform point on the unit sphere S^(d-1).
    ///
    /// d = 1 is a fair sign; d >= 2 uses the classical projection law
    /// 2 Beta((d-1)/2, (d-1)/2) - 1 (for d = 2 the arcsine law, for d = 3
    /// uniform on [-1, 1]).
    pub fn sphere_first_coordinate(&mut self, d: u32) -> Result<f64> {
        match d {
            0 => Err(Error::Domain("sphere dimension must be >= 1".into())),
            1 => Ok(if self.uniform() < 0.5 { -1.0 } else { 1.0 }),
            _ => {
                let p = (d as f64 - 1.0) / 2.0;
                Ok(2.0 * self.beta(p, p) - 1.0)
            }
        }
    }
}
