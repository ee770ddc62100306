//! Mode powers of the synthesised field, read back from an ensemble-averaged
//! periodogram.

use fringelab::interference_engine::synthesize_field;
use fringelab::spectral_model::ModeComb;
use num_complex::Complex64;
use rustfft::FftPlanner;

#[test]
fn periodogram_recovers_mode_powers() {
    let amplitudes = vec![1.0, 2.0, 0.5, 1.5, 3.0];
    let comb = ModeComb::new(454e12, 3e-3, 1, amplitudes.clone(), 1e8).unwrap();
    let spacing = comb.line_spacing();
    // four bins per mode spacing, mode offsets fall on bin centres
    let n_fft = 256;
    let bin = spacing / 4.0;
    let dt = 1.0 / (n_fft as f64 * bin);
    let duration = n_fft as f64 * dt;

    let seeds = 1000;
    let mut fft = FftPlanner::new();
    let plan = fft.plan_fft_forward(n_fft);
    let mut power = vec![0.0; n_fft];
    for seed in 0..seeds {
        let trace = synthesize_field(&comb, duration, dt, seed).unwrap();
        let mut buf: Vec<Complex64> = trace.samples.clone();
        assert_eq!(buf.len(), n_fft);
        plan.process(&mut buf);
        for (p, x) in power.iter_mut().zip(&buf) {
            *p += x.norm_sqr() / (n_fft * n_fft) as f64 / seeds as f64;
        }
    }

    for (offset, expected) in comb.mode_offsets().iter().zip(&amplitudes) {
        let centre = (offset / bin).round() as i64;
        let measured: f64 = (-1..=1)
            .map(|d| power[(centre + d).rem_euclid(n_fft as i64) as usize])
            .sum();
        assert!(
            (measured / expected - 1.0).abs() < 0.05,
            "offset {offset:.3e} Hz: {measured} vs {expected}"
        );
    }
    let total: f64 = power.iter().sum();
    let expected_total: f64 = amplitudes.iter().sum();
    // mean field power equals the summed mode powers in expectation
    assert!((total / expected_total - 1.0).abs() < 0.01, "total power {total}");
}
