//! Monte Carlo estimates of average distortion.
//!
//! Trials are split into fixed-size shards; shard `k` draws from ChaCha8
//! seeded with the user seed on stream `k`. Per-shard sums are integers, so
//! the merged estimate is bit-identical whatever the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::CodeSpec;
use crate::codec::{Depth, PlanKind, StegoCodec};
use crate::error::Result;

/// Identifier of the generator behind every simulation.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = shard index";

const SHARD_TRIALS: u64 = 1 << 14;

/// How cover symbols are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverModel {
    /// Uniform over `0..=2^B - 1`.
    Uniform,
    /// Uniform over `1..=2^B - 2`; saturation never occurs.
    Interior,
}

impl CoverModel {
    fn draw(self, rng: &mut ChaCha8Rng, depth: Depth) -> u32 {
        match self {
            CoverModel::Uniform => rng.random_range(0..=depth.max_value()),
            CoverModel::Interior => rng.random_range(1..depth.max_value()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionEstimate {
    pub trials: u64,
    /// Mean squared error per cover symbol.
    pub mean: f64,
    pub std_error: f64,
    /// Blocks that used the single-saturation fallback.
    pub fallbacks: u64,
    /// Blocks whose fallback was itself blocked and needed the two-change search.
    pub double_saturations: u64,
    /// Blocks left unchanged.
    pub unchanged: u64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    sum: u64,
    sum_sq: u64,
    fallbacks: u64,
    searched: u64,
    unchanged: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            fallbacks: self.fallbacks + o.fallbacks,
            searched: self.searched + o.searched,
            unchanged: self.unchanged + o.unchanged,
        }
    }

    fn record(&mut self, sq: u64) {
        self.sum += sq;
        self.sum_sq += sq * sq;
    }

    fn finish(self, trials: u64, block_len: usize) -> DistortionEstimate {
        let t = trials as f64;
        let n = block_len as f64;
        let mean_block = self.sum as f64 / t;
        let var_block = if trials > 1 {
            (self.sum_sq as f64 - t * mean_block * mean_block) / (t - 1.0)
        } else {
            0.0
        };
        DistortionEstimate {
            trials,
            mean: mean_block / n,
            std_error: (var_block.max(0.0) / t).sqrt() / n,
            fallbacks: self.fallbacks,
            double_saturations: self.searched,
            unchanged: self.unchanged,
        }
    }
}

fn run_shards<F>(trials: u64, seed: u64, shard: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng, u64) -> Tally + Sync,
{
    let shards = trials.div_ceil(SHARD_TRIALS);
    (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let count = SHARD_TRIALS.min(trials - k * SHARD_TRIALS);
            shard(&mut rng, count)
        })
        .reduce(Tally::default, Tally::merge)
}

/// Embeds uniform secrets into random covers and measures the squared error.
pub fn monte_carlo_distortion(
    spec: &CodeSpec,
    depth: Depth,
    cover: CoverModel,
    trials: u64,
    seed: u64,
) -> Result<DistortionEstimate> {
    let codec = StegoCodec::new(spec.clone(), depth);
    let n = codec.block_len();
    let secrets = spec.layout().size() as u32;
    let failure = std::sync::Mutex::new(None);
    let tally = run_shards(trials, seed, |rng, count| {
        let mut t = Tally::default();
        let mut block = vec![0u32; n];
        for _ in 0..count {
            block.iter_mut().for_each(|x| *x = cover.draw(rng, depth));
            let target = rng.random_range(0..secrets);
            match codec.plan_word(&block, target) {
                Ok(plan) => {
                    match plan.kind() {
                        PlanKind::Unchanged => t.unchanged += 1,
                        PlanKind::Fallback => t.fallbacks += 1,
                        PlanKind::Searched => t.searched += 1,
                        PlanKind::Direct => {}
                    }
                    t.record(plan.squared_error() as u64);
                }
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    break;
                }
            }
        }
        t
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(tally.finish(trials, n))
}

/// Matrix embedding with a ternary Hamming code over symbols mod 3.
///
/// Columns are the nonzero vectors of GF(3)^mu whose first nonzero entry
/// is 1, so `n = (3^mu - 1)/2`. A required `+1` on a symbol at `2^B - 1` or
/// `-1` on a symbol at 0 is replaced by a change of magnitude 2 in the
/// other direction, which is congruent mod 3.
#[derive(Debug, Clone)]
pub struct TernaryHamming {
    mu: u32,
    /// `columns[j]` as a base-3 packed syndrome.
    columns: Vec<u32>,
    /// Indexed by packed syndrome: `(column, scalar ∈ {1, 2})`.
    decode: Vec<(u32, u8)>,
}

fn gf3_digits(mut word: u32, mu: u32) -> Vec<u32> {
    (0..mu)
        .map(|_| {
            let d = word % 3;
            word /= 3;
            d
        })
        .collect()
}

fn gf3_word(digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * 3 + d % 3)
}

impl TernaryHamming {
    pub fn new(mu: u32) -> TernaryHamming {
        assert!((1..=12).contains(&mu), "mu out of range");
        let size = 3u32.pow(mu);
        let columns: Vec<u32> = (1..size)
            .filter(|&w| gf3_digits(w, mu).into_iter().rev().find(|&d| d != 0) == Some(1))
            .collect();
        let mut decode = vec![(u32::MAX, 0u8); size as usize];
        for (j, &c) in columns.iter().enumerate() {
            decode[c as usize] = (j as u32, 1);
            let twice: Vec<u32> = gf3_digits(c, mu).iter().map(|d| 2 * d).collect();
            decode[gf3_word(&twice) as usize] = (j as u32, 2);
        }
        TernaryHamming {
            mu,
            columns,
            decode,
        }
    }

    pub fn block_len(&self) -> usize {
        self.columns.len()
    }

    pub fn syndrome_count(&self) -> u32 {
        3u32.pow(self.mu)
    }

    pub fn syndrome(&self, block: &[u32]) -> u32 {
        let mut acc = vec![0u32; self.mu as usize];
        for (&x, &c) in block.iter().zip(&self.columns) {
            let k = x % 3;
            if k != 0 {
                for (a, d) in acc.iter_mut().zip(gf3_digits(c, self.mu)) {
                    *a += k * d;
                }
            }
        }
        gf3_word(&acc)
    }

    /// Brings the block's syndrome to `target`; returns the squared error.
    pub fn embed(&self, block: &mut [u32], target: u32, depth: Depth) -> u32 {
        let s = gf3_digits(self.syndrome(block), self.mu);
        let t = gf3_digits(target, self.mu);
        let gap: Vec<u32> = t.iter().zip(&s).map(|(a, b)| (a + 3 - b) % 3).collect();
        let gap = gf3_word(&gap);
        if gap == 0 {
            return 0;
        }
        let (j, scalar) = self.decode[gap as usize];
        let x = &mut block[j as usize];
        match scalar {
            1 if *x < depth.max_value() => {
                *x += 1;
                1
            }
            1 => {
                *x -= 2;
                4
            }
            _ if *x > 0 => {
                *x -= 1;
                1
            }
            _ => {
                *x += 2;
                4
            }
        }
    }
}

/// Monte Carlo distortion of the ternary Hamming scheme.
pub fn ternary_baseline_distortion(
    mu: u32,
    depth: Depth,
    cover: CoverModel,
    trials: u64,
    seed: u64,
) -> DistortionEstimate {
    let code = TernaryHamming::new(mu);
    let n = code.block_len();
    let secrets = code.syndrome_count();
    let tally = run_shards(trials, seed, |rng, count| {
        let mut t = Tally::default();
        let mut block = vec![0u32; n];
        for _ in 0..count {
            block.iter_mut().for_each(|x| *x = cover.draw(rng, depth));
            let target = rng.random_range(0..secrets);
            let sq = code.embed(&mut block, target, depth);
            match sq {
                0 => t.unchanged += 1,
                4 => t.fallbacks += 1,
                _ => {}
            }
            t.record(sq as u64);
        }
        t
    });
    tally.finish(trials, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_code_is_perfect() {
        for mu in 1..=5 {
            let code = TernaryHamming::new(mu);
            assert_eq!(code.block_len(), (3usize.pow(mu) - 1) / 2);
            let mut seen = vec![false; code.syndrome_count() as usize];
            seen[0] = true;
            for (j, &c) in code.columns.iter().enumerate() {
                for k in 1..=2u32 {
                    let scaled: Vec<u32> = gf3_digits(c, mu).iter().map(|d| k * d).collect();
                    let w = gf3_word(&scaled) as usize;
                    assert!(!seen[w]);
                    seen[w] = true;
                    assert_eq!(code.decode[w], (j as u32, k as u8));
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn ternary_embedding_hits_target() {
        let code = TernaryHamming::new(2);
        let depth = Depth::EIGHT;
        for x0 in [0u32, 1, 128, 254, 255] {
            for target in 0..9 {
                let mut block = [x0, 255 - x0, 3, x0];
                let before = block;
                let sq = code.embed(&mut block, target, depth);
                assert_eq!(code.syndrome(&block), target);
                let actual: u32 = block
                    .iter()
                    .zip(&before)
                    .map(|(a, b)| (*a as i64 - *b as i64).pow(2) as u32)
                    .sum();
                assert_eq!(sq, actual);
                assert!(block.iter().all(|&x| x <= 255));
            }
        }
    }

    #[test]
    fn zero_gap_costs_nothing() {
        let code = TernaryHamming::new(3);
        let mut block: Vec<u32> = (0..13).map(|i| i * 17).collect();
        let s = code.syndrome(&block);
        assert_eq!(code.embed(&mut block, s, Depth::EIGHT), 0);
    }

    #[test]
    fn repeatable_and_independent_of_threads() {
        let spec = CodeSpec::build(4, 2).unwrap();
        let a =
            monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Uniform, 50_000, 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool
            .install(|| monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Uniform, 50_000, 7))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c =
            monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Uniform, 50_000, 8).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn unchanged_fraction_is_one_over_2m() {
        let spec = CodeSpec::build(3, 1).unwrap();
        let est =
            monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Uniform, 200_000, 1).unwrap();
        let p = est.unchanged as f64 / est.trials as f64;
        let se = (0.125f64 * 0.875 / est.trials as f64).sqrt();
        assert!((p - 0.125).abs() < 4.0 * se, "p = {p}");
    }

    #[test]
    fn interior_covers_never_fall_back() {
        let spec = CodeSpec::build(5, 2).unwrap();
        let est =
            monte_carlo_distortion(&spec, Depth::EIGHT, CoverModel::Interior, 20_000, 3).unwrap();
        assert_eq!(est.fallbacks + est.double_saturations, 0);
        let est = ternary_baseline_distortion(2, Depth::EIGHT, CoverModel::Interior, 20_000, 3);
        assert_eq!(est.fallbacks, 0);
    }
}
