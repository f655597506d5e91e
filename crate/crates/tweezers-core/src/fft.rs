//! Minimal in-place radix-2 FFT over `Complex64`.
//!
//! Deterministic and allocation-light; sizes are powers of two, which the
//! callers guarantee by construction of their sample grids.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// In-place forward DFT, `X[k] = sum_j x[j] exp(-2 pi i j k / n)`.
///
/// # Panics
/// Panics if `data.len()` is not a power of two.
pub fn fft_in_place(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n < 2 {
        return;
    }

    // bit-reversal permutation
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let angle = -2.0 * core::f64::consts::PI / len as f64;
        let w_len = Complex64::new(angle.cos(), angle.sin());
        for chunk in data.chunks_mut(len) {
            let mut w = Complex64::new(1.0, 0.0);
            let half = len / 2;
            for k in 0..half {
                let a = chunk[k];
                let b = chunk[k + half] * w;
                chunk[k] = a + b;
                chunk[k + half] = a - b;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

/// Magnitudes of the forward DFT of a real sequence.
pub fn real_fft_magnitudes(signal: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = signal.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}
