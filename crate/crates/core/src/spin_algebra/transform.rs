//! The ±1 butterfly relating coefficient tables and value tables.
//!
//! With configuration bit `1` meaning spin `-1`, the value of `σ(X)s(Y)` on
//! configuration `c` is `(-1)^{popcount(mask & c)}`. Both directions of the
//! transform are the same unnormalized butterfly; only the inverse divides
//! by `N = 2^n`.

use alloc::vec::Vec;

use crate::scalar::Scalar;

/// In-place unnormalized Walsh–Hadamard butterfly. `data.len()` must be a
/// power of two. The reduction tree is fixed, so results are reproducible.
pub fn fwht<S: Scalar>(data: &mut [S]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let u = *x;
                let v = *y;
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// Values on every configuration from a dense coefficient table.
pub fn values_from_coefficients<S: Scalar>(mut coefficients: Vec<S>) -> Vec<S> {
    fwht(&mut coefficients);
    coefficients
}

/// Dense coefficient table from values on every configuration
/// (`g(m) = N^{-1} Σ_c (-1)^{|m∧c|} g(c)`).
pub fn coefficients_from_value_table<S: Scalar>(mut values: Vec<S>) -> Vec<S> {
    let n = values.len();
    fwht(&mut values);
    let k = n.trailing_zeros() as i32;
    for v in values.iter_mut() {
        *v = v.scale_pow2(-k);
    }
    values
}
