//! Reproducible random sources.
//!
//! Two engines are offered: the historical 48-bit linear congruential
//! generator used for the original simulations, and a modern default
//! (ChaCha8). Experiments default to the modern engine; the LCG is kept for
//! fidelity. Parallel replicas each own a source derived from the run seed
//! and a stream id through a fixed avalanche mixing function, so results do
//! not depend on how replicas are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Multiplier of the 48-bit LCG.
pub const LCG_MULTIPLIER: u64 = 142_412_240_584_757;
/// Increment of the 48-bit LCG.
pub const LCG_INCREMENT: u64 = 11;
/// The modulus is 2^48; the generator has maximal period.
pub const LCG_MODULUS_BITS: u32 = 48;

const MASK48: u64 = (1u64 << LCG_MODULUS_BITS) - 1;
const INV_2_48: f64 = 1.0 / (1u64 << LCG_MODULUS_BITS) as f64;

/// State of the 48-bit linear congruential generator.
///
/// The recurrence is `x' = (a*x + c) mod 2^48` with
/// `a = 142412240584757`, `c = 11`. The product is computed modulo 2^64
/// (wrapping), which is exact modulo 2^48 since 2^48 divides 2^64.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lcg48State {
    x: u64,
}

impl Lcg48State {
    pub fn new(x: u64) -> Self {
        Self { x: x & MASK48 }
    }

    /// Current state value, always below 2^48.
    pub fn value(self) -> u64 {
        self.x
    }

    /// One step of the recurrence.
    pub fn step(self) -> Self {
        Self {
            x: self
                .x
                .wrapping_mul(LCG_MULTIPLIER)
                .wrapping_add(LCG_INCREMENT)
                & MASK48,
        }
    }
}

/// Free-standing step, mirroring the recurrence on a bare state.
pub fn lcg_step(s: Lcg48State) -> Lcg48State {
    s.step()
}

/// SplitMix64 avalanche. Used to key substreams; documented so any
/// implementation can reproduce the replica decomposition.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the substream `stream_id` of a run keyed by `seed`:
/// `splitmix64(seed ^ splitmix64(stream_id + 1))`.
pub fn substream_seed(seed: u64, stream_id: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream_id.wrapping_add(1)))
}

/// Which generator backs a [`RandomSource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngKind {
    /// The historical 48-bit linear congruential generator.
    Lcg48,
    /// ChaCha8, the modern default.
    Default,
}

impl std::str::FromStr for RngKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lcg48" => Ok(Self::Lcg48),
            "default" | "chacha8" => Ok(Self::Default),
            other => Err(Error::Domain(format!("unknown rng kind: {other}"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Lcg48(Lcg48State),
    Default(Box<ChaCha8Rng>),
}

/// A single-owner stream of uniform variates.
///
/// Two sources constructed with equal `(kind, seed, stream_id)` produce
/// identical sequences.
#[derive(Debug, Clone)]
pub struct RandomSource {
    kind: RngKind,
    stream_id: u64,
    engine: Engine,
}

impl RandomSource {
    pub fn new(kind: RngKind, seed: u64, stream_id: u64) -> Self {
        let s = substream_seed(seed, stream_id);
        let engine = match kind {
            RngKind::Lcg48 => Engine::Lcg48(Lcg48State::new(s)),
            RngKind::Default => Engine::Default(Box::new(ChaCha8Rng::seed_from_u64(s))),
        };
        Self {
            kind,
            stream_id,
            engine,
        }
    }

    pub fn kind(&self) -> RngKind {
        self.kind
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Next uniform variate in `[0, 1)`.
    ///
    /// For the LCG this is `x'/2^48` after stepping (exact in an f64); for
    /// the default engine the top 48 bits of the next word are used, so both
    /// engines have the same output granularity.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        match &mut self.engine {
            Engine::Lcg48(s) => {
                *s = s.step();
                s.value() as f64 * INV_2_48
            }
            Engine::Default(rng) => (rng.next_u64() >> 16) as f64 * INV_2_48,
        }
    }

    /// Bernoulli draw: true iff `uniform01() < p`. Consumes exactly one draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("bernoulli p out of [0,1]: {p}")));
        }
        Ok(self.uniform01() < p)
    }

    /// Unchecked Bernoulli draw for validated hot loops.
    #[inline(always)]
    pub fn bernoulli_unchecked(&mut self, p: f64) -> bool {
        self.uniform01() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Big-integer oracle for the recurrence, kept independent of the
    /// wrapping-arithmetic implementation.
    fn lcg_oracle(x: u64) -> u64 {
        let wide = (x as u128) * (LCG_MULTIPLIER as u128) + (LCG_INCREMENT as u128);
        (wide % (1u128 << 48)) as u64
    }

    #[test]
    fn step_from_zero_and_one() {
        assert_eq!(Lcg48State::new(0).step().value(), 11);
        assert_eq!(Lcg48State::new(1).step().value(), 142_412_240_584_768);
    }

    #[test]
    fn step_at_modulus_boundary_matches_big_integer_oracle() {
        let x = (1u64 << 48) - 1;
        assert_eq!(Lcg48State::new(x).step().value(), lcg_oracle(x));
    }

    #[test]
    fn sequence_matches_oracle_from_random_seeds() {
        let seeds = [12345u64, 0xDEADBEEF, 987_654_321, 1, (1 << 48) - 17];
        for &seed in &seeds {
            let mut s = Lcg48State::new(seed);
            let mut x = seed & ((1 << 48) - 1);
            for _ in 0..10_000 {
                s = s.step();
                x = lcg_oracle(x);
                assert_eq!(s.value(), x);
            }
        }
    }

    #[test]
    fn uniform01_matches_replayed_recurrence() {
        let mut src = RandomSource::new(RngKind::Lcg48, 12345, 0);
        let mut x = substream_seed(12345, 0) & ((1 << 48) - 1);
        let mut tenth = 0.0;
        for _ in 0..10 {
            tenth = src.uniform01();
            x = lcg_oracle(x);
        }
        assert_eq!(tenth, x as f64 / (1u64 << 48) as f64);
    }

    #[test]
    fn uniform01_is_half_open() {
        for kind in [RngKind::Lcg48, RngKind::Default] {
            let mut src = RandomSource::new(kind, 7, 3);
            for _ in 0..100_000 {
                let u = src.uniform01();
                assert!((0.0..1.0).contains(&u));
            }
        }
    }

    #[test]
    fn bernoulli_extremes_and_domain_error() {
        let mut src = RandomSource::new(RngKind::Default, 5, 0);
        for _ in 0..1000 {
            assert!(!src.bernoulli(0.0).unwrap());
            assert!(src.bernoulli(1.0).unwrap());
        }
        assert!(src.bernoulli(1.5).is_err());
        assert!(src.bernoulli(-0.1).is_err());
    }

    #[test]
    fn bernoulli_mean_within_binomial_bound() {
        // 95% binomial bound: 1.96*sqrt(p(1-p)/n) ~ 0.00096; allow ~3.5 sigma.
        let p = 0.5927439;
        let n = 1_000_000u64;
        for kind in [RngKind::Lcg48, RngKind::Default] {
            let mut src = RandomSource::new(kind, 42, 0);
            let mut hits = 0u64;
            for _ in 0..n {
                if src.bernoulli_unchecked(p) {
                    hits += 1;
                }
            }
            let mean = hits as f64 / n as f64;
            assert!((mean - p).abs() < 0.0017, "{kind:?}: mean {mean}");
        }
    }

    #[test]
    fn determinism_and_stream_separation() {
        for kind in [RngKind::Lcg48, RngKind::Default] {
            let mut a = RandomSource::new(kind, 99, 4);
            let mut b = RandomSource::new(kind, 99, 4);
            for _ in 0..1_000_000 {
                assert_eq!(a.uniform01(), b.uniform01());
            }
        }
        // Distinct stream ids must give distinct initial engine states; for
        // the LCG a shared first output would imply identical streams forever.
        for seed in [0u64, 1, 42, u64::MAX] {
            let mut firsts = std::collections::HashSet::new();
            for stream in 0..64u64 {
                let mut src = RandomSource::new(RngKind::Lcg48, seed, stream);
                assert!(firsts.insert(src.uniform01().to_bits()));
            }
        }
    }
}
