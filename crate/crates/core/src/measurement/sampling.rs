use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use super::{joint_distribution, CommutingContext, OutcomeTuple};
use crate::error::Result;
use crate::quantum::StateVector;

pub type SampleCounts = BTreeMap<OutcomeTuple, u64>;

/// Draws `n` joint outcomes from the exact distribution.
///
/// The generator is ChaCha8 seeded through `seed_from_u64`, and each draw is
/// one `f64` uniform on `[0, 1)` located by a cumulative walk over tuples in
/// sorted order. Both are fixed by the `rand 0.8` / `rand_chacha 0.3`
/// stability guarantees, so counts are identical on every platform.
pub fn sample_outcomes(
    state: &StateVector,
    ctx: &CommutingContext,
    n: u64,
    seed: u64,
) -> Result<SampleCounts> {
    let dist = joint_distribution(state, ctx)?;
    let entries: Vec<(&OutcomeTuple, f64)> =
        dist.entries().iter().map(|(t, p)| (t, *p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: SampleCounts = entries.iter().map(|(t, _)| ((*t).clone(), 0)).collect();
    let Some((last, _)) = entries.last() else {
        return Ok(counts);
    };
    let total = dist.total();
    for _ in 0..n {
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = *last;
        for (t, p) in &entries {
            acc += p;
            if u < acc {
                chosen = t;
                break;
            }
        }
        *counts.get_mut(chosen).expect("tuple present") += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::Outcome;
    use crate::quantum::PauliString;

    #[test]
    fn deterministic_outcome() {
        let zero = StateVector::basis_state(1, &[0]).unwrap();
        let ctx = CommutingContext::unlabeled(vec!["Z".parse::<PauliString>().unwrap()]).unwrap();
        for seed in [0, 7, u64::MAX] {
            let counts = sample_outcomes(&zero, &ctx, 100, seed).unwrap();
            assert_eq!(counts.len(), 1);
            assert_eq!(counts[&OutcomeTuple::new(vec![Outcome::Plus])], 100);
        }
    }

    #[test]
    fn singlet_anticorrelation() {
        let s = StateVector::singlet_pair();
        let ctx = CommutingContext::unlabeled(vec![
            "ZI".parse::<PauliString>().unwrap(),
            "IZ".parse().unwrap(),
        ])
        .unwrap();
        for (n, seed) in [(1, 3), (500, 11), (2000, 12345)] {
            let counts = sample_outcomes(&s, &ctx, n, seed).unwrap();
            assert_eq!(counts.values().sum::<u64>(), n);
            for (t, c) in &counts {
                if *c > 0 {
                    assert_eq!(t.product(), Outcome::Minus);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_counts() {
        let s = StateVector::singlet_pair();
        let ctx = CommutingContext::unlabeled(vec!["XI".parse::<PauliString>().unwrap()]).unwrap();
        let a = sample_outcomes(&s, &ctx, 1000, 42).unwrap();
        let b = sample_outcomes(&s, &ctx, 1000, 42).unwrap();
        let c = sample_outcomes(&s, &ctx, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
