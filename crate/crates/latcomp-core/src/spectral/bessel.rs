//! Integer-order Bessel functions of the first kind by Miller's algorithm.

use alloc::vec;
use alloc::vec::Vec;

/// `J_0(x) ..= J_kmax(x)` for `x >= 0`.
///
/// Recurs downward from an order well above both `kmax` and `x`, where the
/// true values are negligible, then normalizes with
/// `J_0 + 2 Σ J_2k = 1`.
pub fn bessel_j_all(x: f64, kmax: usize) -> Vec<f64> {
    debug_assert!(x >= 0.0);
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = kmax.max(libm::ceil(x) as usize);
    let mut start = top + 20 + libm::sqrt(40.0 * top as f64) as usize;
    start += start % 2;

    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut even_sum = 0.0;
    let mut vals = vec![0.0; kmax + 1];
    for k in (1..=start).rev() {
        let j_prev = 2.0 * k as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{k-1}
        let order = k - 1;
        if order <= kmax {
            vals[order] = j_cur;
        }
        if order % 2 == 0 && order > 0 {
            even_sum += j_cur;
        }
        if libm::fabs(j_cur) > 1e250 {
            let s = 1e-250;
            j_cur *= s;
            j_next *= s;
            even_sum *= s;
            for v in vals.iter_mut() {
                *v *= s;
            }
        }
    }
    let norm = j_cur + 2.0 * even_sum;
    for (o, v) in out.iter_mut().zip(vals) {
        *o = v / norm;
    }
    out
}
