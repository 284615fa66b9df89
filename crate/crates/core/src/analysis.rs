//! Small signal-analysis helpers for sampled trajectories: oscillation
//! frequency estimation from zero crossings and windowed amplitude
//! envelopes.

/// Times where a sampled signal crosses zero, by linear interpolation
/// between samples of opposite sign.
pub fn zero_crossing_times(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let mut out = Vec::new();
    for i in 1..values.len() {
        let (a, b) = (values[i - 1], values[i]);
        if a == 0.0 {
            out.push(times[i - 1]);
        } else if a.signum() != b.signum() && b != 0.0 {
            let frac = a / (a - b);
            out.push(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    out
}

/// Angular frequency from the mean spacing of consecutive zero crossings
/// (half a period apart). Returns `None` with fewer than two crossings.
pub fn frequency_from_zero_crossings(times: &[f64], values: &[f64]) -> Option<f64> {
    let crossings = zero_crossing_times(times, values);
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings.last().unwrap() - crossings.first().unwrap();
    let mean_half_period = span / (crossings.len() - 1) as f64;
    Some(std::f64::consts::PI / mean_half_period)
}

/// Peak-to-peak amplitude of a signal in equal-count windows, and the
/// relative spread of those amplitudes (0 = perfectly conserved
/// envelope).
#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    pub amplitudes: Vec<f64>,
    pub rel_spread: f64,
}

pub fn window_envelopes(values: &[f64], n_windows: usize) -> EnvelopeReport {
    assert!(n_windows >= 1
        && values.len() >= 2 * n_windows,
        "need at least two samples per window");
    let mut amplitudes = Vec::with_capacity(n_windows);
    let chunk = values.len() / n_windows;
    for w in 0..n_windows {
        let lo = w * chunk;
        let hi = if w + 1 == n_windows {
            values.len()
        } else {
            lo + chunk
        };
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &values[lo..hi] {
            min = min.min(v);
            max = max.max(v);
        }
        amplitudes.push(max - min);
    }
    let a_max = amplitudes.iter().cloned().fold(f64::MIN, f64::max);
    let a_min = amplitudes.iter().cloned().fold(f64::MAX, f64::min);
    let rel_spread = if a_max > 0.0 { (a_max - a_min) / a_max } else { 0.0 };
    EnvelopeReport {
        amplitudes,
        rel_spread,
    }
}

/// Largest |v| in a slice.
pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}
