use num_complex::Complex64;
use rustfft::FftPlanner;
use sfw_core::design::{design, DesignOptions};
use sfw_core::spectral::*;

fn realize(h: impl Fn(f64) -> Complex64 + Sync, rate: f64, m: usize) -> (Vec<f64>, f64) {
    let dt = 1.0 / rate;
    let d_omega = 2.0 * std::f64::consts::PI / (m as f64 * dt);
    let half = m / 2;
    let mut top: Vec<Complex64> = (0..=half).map(|k| h(k as f64 * d_omega)).collect();
    top[0].im = 0.0;
    top[half].im = 0.0;
    let mut spec = vec![Complex64::new(0.0, 0.0); m];
    spec[..=half].copy_from_slice(&top);
    for k in 1..half {
        spec[m - k] = top[k].conj();
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut spec);
    let taps: Vec<f64> = spec.iter().map(|c| c.re / m as f64).collect();
    let total: f64 = taps.iter().map(|t| t * t).sum();
    let neg: f64 = taps[half..].iter().map(|t| t * t).sum();
    (taps, neg / total)
}

#[test]
fn probe_regularizers() {
    let (_, _, s_yy, s_xy) = make_paper_example();
    let opts = DesignOptions { n_modes: Some(100), omega_0: Some(30.0), quad_points: Some(1 << 14), history: false, ..DesignOptions::default() };
    let flt = design(&s_xy, &s_yy, &opts).unwrap();
    let rate = 256.0;
    let nyq = std::f64::consts::PI * rate;
    let m = 1 << 18;
    let wc = 20.0 * std::f64::consts::PI;

    let (_, leak) = realize(|w| flt.response_at(w), rate, m);
    println!("plain: leakage {leak:.3e}");
    let dt = 1.0 / rate;
    let (_, leak) = realize(|w| flt.response_at(w) * Complex64::from_polar(1.0, 0.5 * w * dt), rate, m);
    println!("half-sample advance: leakage {leak:.3e}");
    let (_, leak) = realize(|w| flt.response_at(w) * Complex64::from_polar(1.0, -0.5 * w * dt), rate, m);
    println!("half-sample delay: leakage {leak:.3e}");
    for p in [1i32, 2, 3] {
        for frac in [0.3, 0.5, 0.7] {
            let wr = frac * nyq;
            let reg = move |w: f64| (Complex64::new(1.0, 0.0) / Complex64::new(1.0, -w / wr)).powi(p);
            let (_, leak) = realize(|w| flt.response_at(w) * reg(w), rate, m);
            let d = (reg(wc) - Complex64::new(1.0, 0.0)).norm();
            println!("one-pole^{p} at {frac}Nyq: leakage {leak:.3e}  in-band |W(wc)-1| = {d:.3e}");
        }
    }
}
