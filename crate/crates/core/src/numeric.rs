//! Integer fixed-point numerics used where a `libm` call would make results
//! platform-dependent (entropy scores, removal-cost ordering, log-space
//! complexity figures).
//!
//! Fractions are Q32: the value `x` represents `x / 2^32`.

use num_bigint::BigUint;

pub const Q32_ONE: u64 = 1 << 32;

/// `log2(x)` for a Q32 value `x` in `(0, 2^32 * 2^31)`, returned in Q32.
///
/// Classic shift-and-square: extract the integer part from the bit length,
/// then produce 32 fractional bits by repeated squaring of the normalized
/// mantissa. Pure integer arithmetic, identical on every platform.
pub fn log2_q32(x: u64) -> i64 {
    assert!(x > 0, "log2 of zero");
    let bits = 64 - x.leading_zeros() as i64; // x in [2^(bits-1), 2^bits)
    let int_part = bits - 1 - 32; // log2(x / 2^32) integer part
    // Normalize mantissa into [1, 2) as Q32.
    let mut m = if bits - 1 >= 32 {
        x >> (bits - 1 - 32)
    } else {
        x << (32 - (bits - 1))
    };
    let mut frac: u64 = 0;
    for _ in 0..32 {
        // m in [1,2) as Q32; square it (Q64 -> Q32).
        let sq = (m as u128 * m as u128) >> 32;
        frac <<= 1;
        if sq >= (2u128 << 32) {
            frac |= 1;
            m = (sq >> 1) as u64;
        } else {
            m = sq as u64;
        }
    }
    (int_part << 32) + frac as i64
}

/// Binary entropy `H(p)` for `p` given as `ones/total`, in Q32.
/// `H(0) = H(1) = 0` by convention.
pub fn binary_entropy_q32(ones: u64, total: u64) -> u64 {
    assert!(total > 0 && ones <= total);
    if ones == 0 || ones == total {
        return 0;
    }
    let p = ((ones as u128) << 32) / total as u128;
    let q = Q32_ONE as u128 - p;
    // -p*log2(p) - q*log2(q); log2 of values < 1 is negative.
    let term = |f: u128| -> u64 {
        let l = log2_q32(f as u64);
        debug_assert!(l <= 0);
        ((f * (-l) as u128) >> 32) as u64
    };
    term(p) + term(q)
}

/// Q32 value as an `f64` (display only; decisions stay in fixed point).
pub fn q32_to_f64(x: u64) -> f64 {
    x as f64 / Q32_ONE as f64
}

/// `log2` of a big integer, as an `f64` derived from fixed-point arithmetic.
pub fn log2_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    // Normalized mantissa: top 33 bits of n, a Q32 value in [1, 2).
    let mantissa: u64 = if bits <= 33 {
        let v: u64 = n.iter_u64_digits().next().unwrap_or(0);
        v << (33 - bits)
    } else {
        let shifted = n >> (bits - 33);
        shifted.iter_u64_digits().next().unwrap_or(0)
    };
    let frac = log2_q32(mantissa); // in [0, 2^32)
    (bits - 1) as f64 + frac as f64 / Q32_ONE as f64
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_matches_float_reference() {
        for &v in &[1u64, 2, 3, 10, 1000, 1 << 20, (1 << 32) + 12345, u32::MAX as u64 * 7] {
            let got = log2_q32(v << 16) as f64 / Q32_ONE as f64;
            let want = ((v as f64) * 65536.0 / Q32_ONE as f64).log2();
            assert!((got - want).abs() < 1e-6, "v={v} got={got} want={want}");
        }
    }

    #[test]
    fn entropy_endpoints_and_half() {
        assert_eq!(binary_entropy_q32(0, 100), 0);
        assert_eq!(binary_entropy_q32(100, 100), 0);
        let h = q32_to_f64(binary_entropy_q32(1, 2));
        assert!((h - 1.0).abs() < 1e-6);
        let h16 = q32_to_f64(binary_entropy_q32(1, 16));
        assert!((h16 - 0.3372900666).abs() < 1e-4);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(12, 10), BigUint::from(66u32));
        assert_eq!(binomial(3, 3), BigUint::from(1u32));
        assert_eq!(binomial(2, 5), BigUint::from(0u32));
    }

    #[test]
    fn log2_biguint_tracks_reference() {
        let n = binomial(12, 10);
        assert!((log2_biguint(&n) - 66f64.log2()).abs() < 1e-6);
        let big = BigUint::from(2u32).pow(100) + BigUint::from(7u32);
        assert!((log2_biguint(&big) - 100.0).abs() < 1e-6);
    }
}
