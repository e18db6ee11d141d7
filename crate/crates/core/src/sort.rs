//! Order-preserving `f64 -> u64` keys and a bitonic sorting network.

/// Maps a finite or infinite `f64` to a `u64` whose unsigned order matches
/// the numeric order. `-0.0` must already be folded into `0.0`.
#[inline]
pub(crate) fn order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

#[inline]
pub(crate) fn decode_key(key: u64) -> f64 {
    if key >> 63 == 1 {
        f64::from_bits(key & !(1 << 63))
    } else {
        f64::from_bits(!key)
    }
}

/// In-place ascending bitonic sort.
///
/// # Panics
/// If the length is not a power of two (callers pad with `u64::MAX`).
pub(crate) fn bitonic_sort(keys: &mut [u64]) {
    let len = keys.len();
    assert!(len.is_power_of_two() || len == 0, "bitonic sort needs a power-of-two length");
    let mut block = 2;
    while block <= len {
        let mut stride = block / 2;
        while stride > 0 {
            for i in 0..len {
                let partner = i ^ stride;
                if partner > i {
                    let ascending = i & block == 0;
                    if (keys[i] > keys[partner]) == ascending {
                        keys.swap(i, partner);
                    }
                }
            }
            stride /= 2;
        }
        block *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn keys_order_like_floats() {
        let vals = [f64::NEG_INFINITY, -1e300, -2.5, -f64::MIN_POSITIVE, 0.0, 1e-310, 3.0, f64::INFINITY];
        for w in vals.windows(2) {
            assert!(order_key(w[0]) < order_key(w[1]), "{} vs {}", w[0], w[1]);
        }
        assert!(order_key(f64::INFINITY) < u64::MAX);
    }

    proptest! {
        #[test]
        fn key_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let v = v + 0.0;
            prop_assert_eq!(decode_key(order_key(v)).to_bits(), v.to_bits());
        }

        #[test]
        fn bitonic_matches_std(mut v in proptest::collection::vec(any::<u64>(), 0..200)) {
            let n = v.len();
            let mut expected = v.clone();
            expected.sort_unstable();
            v.resize(n.next_power_of_two().max(1), u64::MAX);
            if n == 0 { v.clear(); }
            bitonic_sort(&mut v);
            prop_assert_eq!(&v[..n], &expected[..]);
        }
    }
}
