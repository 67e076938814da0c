use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};

/// Peak-picking settings for [`extract_period_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakOptions {
    /// A maximum counts only if it rises above the preceding minimum by this
    /// fraction of the series range.
    pub min_prominence: f64,
    /// Restrict the search to `[start, end]`.
    pub window: Option<(f64, f64)>,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self {
            min_prominence: 0.05,
            window: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodEstimate {
    /// Mean spacing of successive maxima.
    pub period: f64,
    /// Standard deviation of the spacings.
    pub uncertainty: f64,
    pub maxima: Vec<f64>,
}

/// Period of the named series from its interpolated maxima.
pub fn extract_period(traj: &Trajectory, observable: &str) -> Result<PeriodEstimate> {
    extract_period_with(traj, observable, PeakOptions::default())
}

pub fn extract_period_with(
    traj: &Trajectory,
    observable: &str,
    options: PeakOptions,
) -> Result<PeriodEstimate> {
    let values = traj.series(observable)?;
    period_from_samples(traj.times(), values, options).map_err(|e| match e {
        Error::InsufficientOscillation { extrema, .. } => Error::InsufficientOscillation {
            observable: observable.to_string(),
            extrema,
        },
        other => other,
    })
}

/// Times of the prominent local maxima of a sampled signal, refined by a
/// parabola through each peak sample and its neighbours.
pub fn interpolated_maxima(times: &[f64], values: &[f64], options: PeakOptions) -> Vec<f64> {
    let (lo, hi) = match options.window {
        Some((a, b)) => (
            times.partition_point(|&t| t < a),
            times.partition_point(|&t| t <= b),
        ),
        None => (0, times.len()),
    };
    if hi < lo + 3 {
        return Vec::new();
    }
    let t = &times[lo..hi];
    let v = &values[lo..hi];
    let (vmin, vmax) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let range = vmax - vmin;
    if !(range > 0.0) {
        return Vec::new();
    }
    let threshold = options.min_prominence * range;

    let mut peaks = Vec::new();
    let mut trough = v[0];
    // Best candidate since the last accepted peak: (index, value).
    let mut candidate: Option<(usize, f64)> = None;
    for i in 1..v.len() - 1 {
        trough = trough.min(v[i]);
        if let Some((_, cv)) = candidate {
            if cv - v[i] >= threshold {
                peaks.push(candidate.take().unwrap().0);
                trough = v[i];
            }
        }
        let is_local_max = v[i] > v[i - 1] && v[i] >= v[i + 1];
        if is_local_max && v[i] - trough >= threshold {
            match candidate {
                Some((_, cv)) if cv >= v[i] => {}
                _ => candidate = Some((i, v[i])),
            }
        }
    }
    if let Some((i, cv)) = candidate {
        let tail_min = v[i..].iter().cloned().fold(f64::INFINITY, f64::min);
        if cv - tail_min >= threshold {
            peaks.push(i);
        }
    }

    peaks
        .into_iter()
        .map(|i| {
            let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
            let denom = y0 - 2.0 * y1 + y2;
            let h = 0.5 * (t[i + 1] - t[i - 1]);
            if denom.abs() > 0.0 {
                let offset = 0.5 * (y0 - y2) / denom;
                t[i] + offset.clamp(-1.0, 1.0) * h
            } else {
                t[i]
            }
        })
        .collect()
}

pub fn period_from_samples(
    times: &[f64],
    values: &[f64],
    options: PeakOptions,
) -> Result<PeriodEstimate> {
    let maxima = interpolated_maxima(times, values, options);
    if maxima.len() < 2 {
        return Err(Error::InsufficientOscillation {
            observable: String::new(),
            extrema: maxima.len(),
        });
    }
    let spacings: Vec<f64> = maxima.windows(2).map(|w| w[1] - w[0]).collect();
    let n = spacings.len() as f64;
    let mean = spacings.iter().sum::<f64>() / n;
    let var = spacings.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    Ok(PeriodEstimate {
        period: mean,
        uncertainty: var.sqrt(),
        maxima,
    })
}

/// Running mean over a window of `window` time units: the integral of the
/// piecewise-linear interpolant over `[t - window/2, t + window/2]`, divided
/// by `window`. Only centers whose window lies inside the sampled range are
/// returned, as `(centers, means)`.
pub fn moving_average(times: &[f64], values: &[f64], window: f64) -> (Vec<f64>, Vec<f64>) {
    let n = times.len().min(values.len());
    if n < 2 || !(window > 0.0) {
        return (Vec::new(), Vec::new());
    }
    let mut cumulative = vec![0.0; n];
    for k in 1..n {
        cumulative[k] =
            cumulative[k - 1] + 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    }
    // Integral of the interpolant from times[0] to t.
    let integral = |t: f64| {
        let k = times[..n].partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
        let h = times[k + 1] - times[k];
        let s = t - times[k];
        cumulative[k] + values[k] * s + (values[k + 1] - values[k]) * s * s / (2.0 * h)
    };
    let half = 0.5 * window;
    let (t0, t1) = (times[0], times[n - 1]);
    times[..n]
        .iter()
        .filter(|&&t| t - half >= t0 && t + half <= t1)
        .map(|&t| (t, (integral(t + half) - integral(t - half)) / window))
        .unzip()
}

const ENVELOPE_MIN_SWING: f64 = 0.05;

/// Period of the slow envelope of a signal that also oscillates with
/// `fast_period`: the fast oscillation is averaged out over one fast period
/// before the maxima are located.
pub fn envelope_period(
    times: &[f64],
    values: &[f64],
    fast_period: f64,
    options: PeakOptions,
) -> Result<PeriodEstimate> {
    let (t, avg) = moving_average(times, values, fast_period);
    // An envelope flatter than this fraction of the raw swing is ripple left
    // over from the averaging, not a slow oscillation.
    let swing = |v: &[f64]| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                (a.min(x), b.max(x))
            });
        hi - lo
    };
    if !(swing(&avg) > ENVELOPE_MIN_SWING * swing(values)) {
        return Err(Error::InsufficientOscillation {
            observable: String::new(),
            extrema: 0,
        });
    }
    period_from_samples(&t, &avg, options)
}

/// Rate `k` of the least-squares fit `ln v = ln A - k t` over the positive
/// samples.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "decay fit needs at least two positive samples".to_string(),
        ));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "decay fit needs distinct sample times".to_string(),
        ));
    }
    Ok(-sxy / sxx)
}

/// Decay rate of an oscillating signal from its successive maxima.
pub fn fit_envelope_decay(times: &[f64], values: &[f64], options: PeakOptions) -> Result<f64> {
    let peaks = interpolated_maxima(times, values, options);
    let vals: Vec<f64> = peaks
        .iter()
        .map(|&tp| {
            let k = times.partition_point(|&t| t < tp).min(times.len() - 1);
            values[k].max(values[k.saturating_sub(1)])
        })
        .collect();
    if peaks.len() < 2 {
        return Err(Error::InsufficientOscillation {
            observable: String::new(),
            extrema: peaks.len(),
        });
    }
    fit_decay_rate(&peaks, &vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(t1: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| t1 * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn cos_squared_period() {
        let gamma = 1.7;
        let t = grid(20.0, 2001);
        let v: Vec<f64> = t.iter().map(|x| (gamma * x).cos().powi(2)).collect();
        let est = period_from_samples(&t, &v, PeakOptions::default()).unwrap();
        let expected = std::f64::consts::PI / gamma;
        assert!((est.period - expected).abs() < 1e-2 * 0.01);
        assert!(est.uncertainty < 1e-4);
    }

    #[test]
    fn constant_series_has_no_period() {
        let t = grid(1.0, 50);
        let v = vec![0.3; 50];
        let err = period_from_samples(&t, &v, PeakOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientOscillation { extrema: 0, .. }
        ));
    }

    #[test]
    fn small_ripples_are_ignored() {
        let t = grid(30.0, 3001);
        let v: Vec<f64> = t
            .iter()
            .map(|x| (x * 0.5).sin() + 1e-3 * (x * 40.0).sin())
            .collect();
        let est = period_from_samples(&t, &v, PeakOptions::default()).unwrap();
        assert!(
            (est.period - 4.0 * std::f64::consts::PI).abs() < 0.02,
            "{}",
            est.period
        );
    }

    #[test]
    fn window_restricts_search() {
        let t = grid(40.0, 4001);
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let opts = PeakOptions {
            window: Some((10.0, 30.0)),
            ..Default::default()
        };
        let est = period_from_samples(&t, &v, opts).unwrap();
        assert!(est.maxima.iter().all(|&m| (10.0..=30.0).contains(&m)));
        assert_eq!(est.maxima.len(), 3);
    }

    #[test]
    fn decay_fits() {
        let t = grid(10.0, 201);
        let v: Vec<f64> = t.iter().map(|x| 2.0 * (-0.3 * x).exp()).collect();
        assert!((fit_decay_rate(&t, &v).unwrap() - 0.3).abs() < 1e-12);
        let t2 = grid(10.0, 20001);
        let osc2: Vec<f64> = t2
            .iter()
            .map(|x| (-0.3 * x).exp() * (3.0 * x).cos().powi(2))
            .collect();
        let k = fit_envelope_decay(&t2, &osc2, PeakOptions::default()).unwrap();
        assert!((k - 0.3).abs() < 0.01, "{k}");
    }

    #[test]
    fn moving_average_of_fast_oscillation() {
        let t = grid(100.0, 10001);
        let v: Vec<f64> = t.iter().map(|x| 0.5 + 0.5 * (2.0 * x).cos()).collect();
        let period = std::f64::consts::PI;
        let (centers, avg) = moving_average(&t, &v, period);
        assert!(centers[0] >= period / 2.0 && *centers.last().unwrap() <= 100.0 - period / 2.0);
        for a in &avg {
            assert!((a - 0.5).abs() < 1e-5, "{a}");
        }
    }

    #[test]
    fn moving_average_of_linear_signal_is_exact() {
        let t = grid(10.0, 101);
        let v: Vec<f64> = t.iter().map(|x| 3.0 * x - 1.0).collect();
        let (centers, avg) = moving_average(&t, &v, 1.234);
        for (c, a) in centers.iter().zip(&avg) {
            assert!((a - (3.0 * c - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_of_beating_signal() {
        let t = grid(400.0, 40001);
        let slow = 2.0 * std::f64::consts::PI / 150.0;
        let v: Vec<f64> = t
            .iter()
            .map(|x| (1.0 + 0.5 * (slow * x).cos()) * (3.0 * x).sin().powi(2))
            .collect();
        let est =
            envelope_period(&t, &v, std::f64::consts::PI / 3.0, PeakOptions::default()).unwrap();
        assert!((est.period - 150.0).abs() < 0.5, "{}", est.period);
        let flat: Vec<f64> = t.iter().map(|x| (3.0 * x).sin().powi(2)).collect();
        assert!(envelope_period(
            &t,
            &flat,
            std::f64::consts::PI / 3.0,
            PeakOptions::default()
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn sinusoid_period_within_grid_spacing(period in 0.5f64..5.0, phase in 0.0f64..std::f64::consts::TAU) {
            let n = 4001;
            let t = grid(40.0, n);
            let dt = 40.0 / (n - 1) as f64;
            let v: Vec<f64> = t.iter().map(|x| (2.0 * std::f64::consts::PI * x / period + phase).sin()).collect();
            let est = period_from_samples(&t, &v, PeakOptions::default()).unwrap();
            prop_assert!((est.period - period).abs() <= dt);
        }
    }
}
