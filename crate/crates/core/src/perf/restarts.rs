//! Simulated restarts: a bootstrap runtime for unsolved records.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::{mix64, SplitMix64};

use super::{Outcome, RuntimeRecord};

/// Simulated runtime for `trigger` given the records of the same function,
/// dimension and target across instances.
///
/// A failed trigger contributes its budget; instances are then drawn
/// uniformly with replacement from `pool`, adding the budget of each drawn
/// failure, until a success is drawn, whose runtime completes the total. A
/// successful trigger needs no restart and returns its own runtime.
pub fn simulated_restarts(
    pool: &[RuntimeRecord],
    rng: &mut SplitMix64,
    trigger: &RuntimeRecord,
) -> Result<u64> {
    let mut total = match trigger.outcome {
        Outcome::Success { runtime } => return Ok(runtime),
        Outcome::Failure { budget_used } => budget_used,
    };
    if !pool.iter().any(|r| r.outcome.is_success()) {
        return Err(Error::NoSuccess);
    }
    loop {
        let drawn = &pool[rng.below(pool.len() as u64) as usize];
        match drawn.outcome {
            Outcome::Success { runtime } => return Ok(total + runtime),
            Outcome::Failure { budget_used } => total += budget_used,
        }
    }
}

/// PRNG substream for the (function, dimension, target) pool under `seed`.
pub fn restart_stream(
    seed: u64,
    function_id: u32,
    dimension: usize,
    target_offset: f64,
) -> SplitMix64 {
    let stream = mix64(u64::from(function_id) << 32 | dimension as u64) ^ target_offset.to_bits();
    SplitMix64::substream(seed, stream)
}

/// Replaces every failure by a simulated success where its pool has at
/// least one success. Pools are (function, dimension, target); each pool
/// draws from its own [`restart_stream`], failures in record order.
pub fn fill_with_simulated_restarts(records: &[RuntimeRecord], seed: u64) -> Vec<RuntimeRecord> {
    let mut pools: BTreeMap<(u32, usize, u64), Vec<usize>> = BTreeMap::new();
    for (k, r) in records.iter().enumerate() {
        let key = (
            r.descriptor.function_id,
            r.descriptor.dimension,
            r.target_offset.to_bits(),
        );
        pools.entry(key).or_default().push(k);
    }

    let mut filled = records.to_vec();
    for ((function_id, dimension, target_bits), members) in pools {
        let pool: Vec<RuntimeRecord> = members.iter().map(|&k| records[k]).collect();
        if !pool.iter().any(|r| r.outcome.is_success()) {
            continue;
        }
        let mut rng = restart_stream(seed, function_id, dimension, f64::from_bits(target_bits));
        for &k in &members {
            if records[k].outcome.is_success() {
                continue;
            }
            let runtime =
                simulated_restarts(&pool, &mut rng, &records[k]).expect("pool has a success");
            filled[k].outcome = Outcome::Success { runtime };
            filled[k].simulated = true;
        }
    }
    filled
}
