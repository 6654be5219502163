//! Deterministic random-number substrate.
//!
//! Everything random in the pipeline flows from [`SplitMix64`] streams whose
//! seeds are derived with [`derive_seed`]. Both state-transition functions
//! are spelled out in `docs/formats.md` so any implementation, in any
//! language, can reproduce suites and reports bit-exactly.

use std::collections::BTreeSet;

use crate::minilang::{Type, Value};

/// SplitMix64 (Steele, Lea & Flood): `state += 0x9E3779B97F4A7C15`, then two
/// xor-shift-multiply finalization rounds.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `0..n` via modulo reduction (documented; the modulo
    /// bias is irrelevant for the small ranges used here).
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform draw in the inclusive range `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let width = (hi as i128 - lo as i128 + 1) as u64;
        lo.wrapping_add(self.below(width) as i64)
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// FNV-1a over the master seed's little-endian bytes followed by each part's
/// UTF-8 bytes, with a 0x1F separator after every part. Used to give each
/// (purpose, group, program) its own independent stream seed.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    const OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01B3;
    let mut h = OFFSET;
    for b in master.to_le_bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(PRIME);
    }
    for part in parts {
        for &b in part.as_bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(PRIME);
        }
        h = (h ^ 0x1F).wrapping_mul(PRIME);
    }
    h
}

/// Bounds of the uniform half of the input distribution.
pub const UNIFORM_LO: i64 = -100;
pub const UNIFORM_HI: i64 = 100;

/// Initial contents of the integer value pool, in documented order.
pub const POOL_EXTREMES: [i64; 7] = [0, 1, -1, 2, -2, i64::MIN, i64::MAX];

/// Input-tuple sampler: half the integer draws come from a value pool
/// (boundary extremes plus fed-back observed outputs), half are uniform in
/// `[-100, 100]`. Booleans are fair coins.
#[derive(Debug, Clone)]
pub struct InputSampler {
    rng: SplitMix64,
    pool: Vec<i64>,
    pool_seen: BTreeSet<i64>,
}

impl InputSampler {
    pub fn new(seed: u64) -> Self {
        InputSampler {
            rng: SplitMix64::new(seed),
            pool: POOL_EXTREMES.to_vec(),
            pool_seen: POOL_EXTREMES.iter().copied().collect(),
        }
    }

    /// Add an observed integer output to the pool (the feedback-directed
    /// element). Duplicates are ignored so the pool order stays stable.
    pub fn feed(&mut self, value: i64) {
        if self.pool_seen.insert(value) {
            self.pool.push(value);
        }
    }

    /// Feed every integer seen in an execution outcome.
    pub fn feed_outcome(&mut self, outcome: &crate::interp::ExecutionOutcome) {
        if let crate::interp::ExecutionOutcome::Value(Value::Int(v)) = outcome {
            self.feed(*v);
        }
    }

    pub fn sample_value(&mut self, ty: Type) -> Value {
        match ty {
            Type::Bool => Value::Bool(self.rng.coin()),
            Type::Int => {
                if self.rng.coin() {
                    Value::Int(self.rng.int_in(UNIFORM_LO, UNIFORM_HI))
                } else {
                    let idx = self.rng.below(self.pool.len() as u64) as usize;
                    Value::Int(self.pool[idx])
                }
            }
        }
    }

    pub fn sample_tuple(&mut self, types: &[Type]) -> Vec<Value> {
        types.iter().map(|t| self.sample_value(*t)).collect()
    }
}
