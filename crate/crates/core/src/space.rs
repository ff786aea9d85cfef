//! Size of the credential space a brute-force emitter has to search.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("{name} must be at least 1")]
    Zero { name: &'static str },
    #[error("pattern length L < 2 (got {0})")]
    TooShort(u32),
}

/// `2^(n·L) · channels^L · max_tu^(L−2)`.
///
/// The first interval is absent and the second is pinned to 1 TU, so only
/// `L − 2` intervals are free. Bit patterns are counted over all `2^n`
/// strings, including the all-equal ones an adversary can still transmit.
pub fn pattern_space_size(n: u32, l: u32, channels: u32, max_tu: u32) -> Result<BigUint, SpaceError> {
    for (name, v) in [("n", n), ("L", l), ("channels", channels), ("max_tu", max_tu)] {
        if v == 0 {
            return Err(SpaceError::Zero { name });
        }
    }
    if l < 2 {
        return Err(SpaceError::TooShort(l));
    }
    let bits = BigUint::from(1u8) << (u64::from(n) * u64::from(l));
    Ok(bits * BigUint::from(channels).pow(l) * BigUint::from(max_tu).pow(l - 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_factors_leave_the_bit_term() {
        assert_eq!(pattern_space_size(2, 2, 1, 1).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn one_hundred_twenty_eight_bits() {
        assert_eq!(pattern_space_size(1, 128, 1, 1).unwrap(), BigUint::from(1u8) << 128u32);
    }

    #[test]
    fn mixed_factors() {
        let expected = BigUint::from(1u64 << 12) * BigUint::from(14u32).pow(4) * BigUint::from(16u32);
        assert_eq!(pattern_space_size(3, 4, 14, 4).unwrap(), expected);
    }

    #[test]
    fn doubling_channels_scales_by_two_to_the_l() {
        for l in 2..7 {
            let a = pattern_space_size(3, l, 5, 3).unwrap();
            let b = pattern_space_size(3, l, 10, 3).unwrap();
            assert_eq!(b, a << l);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(pattern_space_size(2, 1, 1, 1), Err(SpaceError::TooShort(1)));
        assert_eq!(pattern_space_size(0, 2, 1, 1), Err(SpaceError::Zero { name: "n" }));
        assert_eq!(pattern_space_size(2, 2, 1, 0), Err(SpaceError::Zero { name: "max_tu" }));
    }
}
