//! Binary input streams and the delayed-memory / parity target families.

use crate::reservoir::Phases;
use alloc::vec::Vec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Washout / train / eval lengths of one capacity trial.
pub const BINARY_PHASES: Phases = Phases {
    washout: 1000,
    train: 3000,
    eval: 1000,
};

/// Uniform random sequence over {0.0, 1.0}.
pub fn random_binary_inputs(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
        .collect()
}

/// Delayed copy s_{k - tau_b}, zero-padded for k < tau_b.
pub fn stm_target(s: &[f64], tau_b: usize) -> Vec<f64> {
    (0..s.len())
        .map(|k| if k >= tau_b { s[k - tau_b] } else { 0.0 })
        .collect()
}

/// Parity of the window s_{k - tau_b} .. s_k, zero-padded below index 0.
/// Inputs are treated as bits by thresholding at 1/2.
pub fn pc_target(s: &[f64], tau_b: usize) -> Vec<f64> {
    // prefix[k] = number of 1-bits among s_0..s_{k-1}
    let mut prefix = Vec::with_capacity(s.len() + 1);
    prefix.push(0usize);
    let mut acc = 0usize;
    for &v in s {
        acc += usize::from(v > 0.5);
        prefix.push(acc);
    }
    (0..s.len())
        .map(|k| {
            let lo = k.saturating_sub(tau_b);
            let ones = prefix[k + 1] - prefix[lo];
            (ones % 2) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use alloc::vec;

    #[test]
    fn zero_delay_targets_equal_the_input() {
        let mut rng = seed::rng(1, &[seed::tags::INPUT]);
        let s = random_binary_inputs(200, &mut rng);
        assert_eq!(stm_target(&s, 0), s);
        assert_eq!(pc_target(&s, 0), s);
    }

    #[test]
    fn delayed_copy_with_padding() {
        let s = vec![1.0, 0.0, 0.0, 1.0, 1.0];
        assert_eq!(stm_target(&s, 2), vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn parity_hand_examples() {
        // window (1, 0, 1) has even parity
        let s = vec![1.0, 0.0, 1.0];
        assert_eq!(pc_target(&s, 2)[2], 0.0);
        let s = vec![1.0, 1.0, 0.0, 1.0];
        assert_eq!(pc_target(&s, 1), vec![1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn parity_matches_direct_window_count() {
        let mut rng = seed::rng(2, &[seed::tags::INPUT]);
        let s = random_binary_inputs(400, &mut rng);
        for tau in [0, 1, 3, 17, 399, 500] {
            let fast = pc_target(&s, tau);
            for k in 0..s.len() {
                let mut ones = 0usize;
                for m in 0..=tau {
                    if m <= k && s[k - m] > 0.5 {
                        ones += 1;
                    }
                }
                assert_eq!(fast[k], (ones % 2) as f64, "tau = {tau}, k = {k}");
            }
        }
    }

    #[test]
    fn random_bits_are_binary_and_balanced() {
        let mut rng = seed::rng(3, &[seed::tags::INPUT]);
        let s = random_binary_inputs(4000, &mut rng);
        assert!(s.iter().all(|&v| v == 0.0 || v == 1.0));
        let ones: f64 = s.iter().sum();
        let frac = ones / 4000.0;
        assert!((0.45..0.55).contains(&frac), "fraction of ones {frac}");
    }
}
