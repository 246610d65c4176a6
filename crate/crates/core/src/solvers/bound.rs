/// Expected-suboptimality bound for block-coordinate FW with the decay rule
/// after `k` iterations over `n` blocks:
///
/// ```text
/// (2n / (k + 2n)) · (4/λ + h0)
/// ```
///
/// `4/λ` is the upper bound on the product-domain curvature constant and
/// `h0 = f(T⁰) − f*` the initial suboptimality.
pub fn theorem1_bound(n: usize, k: u64, lambda: f64, h0: f64) -> f64 {
    let two_n = 2.0 * n as f64;
    two_n / (k as f64 + two_n) * (4.0 / lambda + h0)
}

/// Smallest `k` for which [`theorem1_bound`] is at most `eps`.
pub fn theorem1_iterations(n: usize, lambda: f64, h0: f64, eps: f64) -> u64 {
    let two_n = 2.0 * n as f64;
    let k = two_n * (4.0 / lambda + h0) / eps - two_n;
    k.max(0.0).ceil() as u64
}
