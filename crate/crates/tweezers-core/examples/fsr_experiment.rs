//! Scratch experiment: rejection rate of the periodicity detector on white
//! noise, and detection margin on the resonant-comb fixture, for a few
//! magnitude-smoothing widths. Not part of the deliverable test suite.

use tweezers_core::cavity::{rad_per_s_from_hz, CavityParams};
use tweezers_core::fft::real_fft_magnitudes;
use tweezers_core::synth::simulate_resonant_comb;

fn reference_cavity() -> CavityParams {
    let gamma_all = rad_per_s_from_hz(40.0e6);
    CavityParams {
        gamma_r: 0.17 * gamma_all,
        gamma_int: 0.83 * gamma_all,
        fsr: rad_per_s_from_hz(3.3e9),
        alpha: 7.3e-3,
        length: 19.67,
        noise_coeff: 25.0,
        acceptance_band: rad_per_s_from_hz(200.0e9),
    }
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn pipeline(samples: &[(f64, f64)], smooth: usize) -> (f64, usize) {
    let n_in = samples.len();
    let span = samples[n_in - 1].0 - samples[0].0;
    let lo = samples[0].0;
    let n = n_in.max(256).next_power_of_two();
    let step = span / (n - 1) as f64;
    let mut signal = Vec::with_capacity(n);
    let mut cursor = 0usize;
    for k in 0..n {
        let w = lo + k as f64 * step;
        while cursor + 1 < n_in && samples[cursor + 1].0 < w {
            cursor += 1;
        }
        let (w0, p0) = samples[cursor];
        let v = if cursor + 1 < n_in {
            let (w1, p1) = samples[cursor + 1];
            p0 + (p1 - p0) * (w - w0) / (w1 - w0)
        } else {
            p0
        };
        signal.push(v);
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    for (k, v) in signal.iter_mut().enumerate() {
        let hann = 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos());
        *v = (*v - mean) * hann;
    }
    let mut mags = real_fft_magnitudes(&signal);
    if smooth > 1 {
        let raw = mags.clone();
        let half = smooth / 2;
        for i in 0..raw.len() {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(raw.len() - 1);
            mags[i] = raw[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
        }
    }
    let fft_span = n as f64 * step;
    let k_min = (1..n / 2).find(|&k| fft_span / k as f64 <= span / 3.0).unwrap_or(n / 2);
    // cap the search at the input Nyquist: finer structure is interpolation
    let d_in = span / (n_in - 1) as f64;
    let k_max = ((fft_span / (2.0 * d_in)).floor() as usize).min(n / 2).max(k_min);
    let search = &mags[k_min..=k_max];
    let mut peak_k = k_min;
    for (off, &m) in search.iter().enumerate() {
        if m > mags[peak_k] {
            peak_k = k_min + off;
        }
    }
    let mut sorted: Vec<f64> = search.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    (mags[peak_k] / median, peak_k)
}

fn main() {
    for smooth in [1usize, 3, 5, 7] {
        for n_samples in [64usize, 128, 256, 512] {
            let mut rejected = 0;
            let mut worst: f64 = 0.0;
            for seed in 0..300u64 {
                let mut s = seed.wrapping_add(0x1234_5678_9abc_def0);
                let samples: Vec<(f64, f64)> =
                    (0..n_samples).map(|j| (j as f64 * 1.0e9, splitmix(&mut s))).collect();
                let (ratio, _) = pipeline(&samples, smooth);
                if ratio <= 3.0 {
                    rejected += 1;
                }
                worst = worst.max(ratio);
            }
            println!("smooth={smooth} n={n_samples}: rejected {rejected}/300 worst ratio {worst:.2}");
        }
        // detection margin on the comb fixture for a few spacings
        let cavity = reference_cavity();
        for (spacing_ghz, teeth) in [(1.0, 601usize), (1.007, 597), (1.1, 546)] {
            let comb = simulate_resonant_comb(
                &cavity,
                rad_per_s_from_hz(194.0e12),
                rad_per_s_from_hz(spacing_ghz * 1.0e9),
                teeth,
            )
            .unwrap();
            let (ratio, peak_k) = pipeline(comb.samples(), smooth);
            let span = comb.span();
            let n = 1024.0;
            let fft_span = span * n / (n - 1.0);
            let period_ghz = fft_span / peak_k as f64 / (2.0 * std::f64::consts::PI * 1.0e9);
            println!(
                "smooth={smooth} comb spacing {spacing_ghz} GHz: ratio {ratio:.1} peak bin {peak_k} period {period_ghz:.3} GHz"
            );
        }
    }
}
