//! Dormand–Prince 5(4) with FSAL and fifth-order dense output.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// `dy/dt = f(t, y)` on complex vectors.
pub(crate) trait OdeSystem {
    fn rhs(&mut self, t: f64, y: &[C64], dy: &mut [C64]);

    /// Called on every accepted step before sampling.
    fn post_step(&mut self, _y: &mut [C64]) {}
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub rhs_evaluations: u64,
    pub min_step: f64,
    pub max_step: f64,
}

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += *c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Integrates from `times[0]` and calls `sample(k, y(times[k]))` for every
/// requested time. `times` must be increasing.
pub(crate) fn integrate<S, F>(
    sys: &mut S,
    y0: Vec<C64>,
    times: &[f64],
    tol: Tolerances,
    mut sample: F,
) -> Result<IntegratorStats>
where
    S: OdeSystem,
    F: FnMut(usize, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut stats = IntegratorStats {
        min_step: f64::INFINITY,
        ..Default::default()
    };
    let Some(&t_start) = times.first() else {
        return Ok(stats);
    };
    let t_end = *times.last().unwrap();
    let mut y = y0;
    sample(0, &y)?;
    let mut next_sample = 1;
    if next_sample >= times.len() {
        return Ok(stats);
    }

    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut y_stage = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut dense = vec![vec![C64::new(0.0, 0.0); n]; 5];
    let mut y_out = vec![C64::new(0.0, 0.0); n];

    let mut t = t_start;
    sys.rhs(t, &y, &mut k[0]);
    stats.rhs_evaluations += 1;

    let span = t_end - t_start;
    let mut h = initial_step(&y, &k[0], tol, span);
    let mut last_rejected = false;

    while next_sample < times.len() {
        if stats.accepted_steps + stats.rejected_steps >= tol.max_steps {
            return Err(Error::ToleranceUnachievable(format!(
                "step budget {} exhausted at t = {t:.6e}",
                tol.max_steps
            )));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(span) {
            return Err(Error::StepUnderflow { t, h });
        }

        {
            let (k1, rest) = k.split_at_mut(1);
            let k1 = &k1[0];
            axpy_into(&mut y_stage, &y, h, &[(A21, k1)]);
            sys.rhs(t + C2 * h, &y_stage, &mut rest[0]);
            axpy_into(&mut y_stage, &y, h, &[(A31, k1), (A32, &rest[0])]);
            sys.rhs(t + C3 * h, &y_stage, &mut rest[1]);
            axpy_into(
                &mut y_stage,
                &y,
                h,
                &[(A41, k1), (A42, &rest[0]), (A43, &rest[1])],
            );
            sys.rhs(t + C4 * h, &y_stage, &mut rest[2]);
            axpy_into(
                &mut y_stage,
                &y,
                h,
                &[(A51, k1), (A52, &rest[0]), (A53, &rest[1]), (A54, &rest[2])],
            );
            sys.rhs(t + C5 * h, &y_stage, &mut rest[3]);
            axpy_into(
                &mut y_stage,
                &y,
                h,
                &[
                    (A61, k1),
                    (A62, &rest[0]),
                    (A63, &rest[1]),
                    (A64, &rest[2]),
                    (A65, &rest[3]),
                ],
            );
            sys.rhs(t + h, &y_stage, &mut rest[4]);
            axpy_into(
                &mut y_new,
                &y,
                h,
                &[
                    (A71, k1),
                    (A73, &rest[1]),
                    (A74, &rest[2]),
                    (A75, &rest[3]),
                    (A76, &rest[4]),
                ],
            );
            sys.rhs(t + h, &y_new, &mut rest[5]);
        }
        stats.rhs_evaluations += 6;

        let mut err_max: f64 = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err_max = err_max.max(e.norm() / sc);
        }
        let err = err_max;
        if !err.is_finite() {
            return Err(Error::ToleranceUnachievable(format!(
                "non-finite error estimate at t = {t:.6e}"
            )));
        }

        if err <= 1.0 {
            for i in 0..n {
                let diff = y_new[i] - y[i];
                let bspl = h * k[0][i] - diff;
                dense[0][i] = y[i];
                dense[1][i] = diff;
                dense[2][i] = bspl;
                dense[3][i] = diff - h * k[6][i] - bspl;
                dense[4][i] = h
                    * (D1 * k[0][i]
                        + D3 * k[2][i]
                        + D4 * k[3][i]
                        + D5 * k[4][i]
                        + D6 * k[5][i]
                        + D7 * k[6][i]);
            }
            let t_new = if t + h >= t_end { t_end } else { t + h };
            stats.accepted_steps += 1;
            stats.min_step = stats.min_step.min(h);
            stats.max_step = stats.max_step.max(h);

            std::mem::swap(&mut y, &mut y_new);
            sys.post_step(&mut y);
            k.swap(0, 6);

            while next_sample < times.len() && times[next_sample] <= t_new {
                if times[next_sample] == t_new {
                    sample(next_sample, &y)?;
                } else {
                    let theta = (times[next_sample] - t) / h;
                    let theta1 = 1.0 - theta;
                    for i in 0..n {
                        y_out[i] = dense[0][i]
                            + theta
                                * (dense[1][i]
                                    + theta1
                                        * (dense[2][i]
                                            + theta * (dense[3][i] + theta1 * dense[4][i])));
                    }
                    sample(next_sample, &y_out)?;
                }
                next_sample += 1;
            }
            t = t_new;

            let mut factor = SAFETY * err.max(1e-10).powf(-0.2);
            factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
            if last_rejected {
                factor = factor.min(1.0);
            }
            last_rejected = false;
            h *= factor;
        } else {
            stats.rejected_steps += 1;
            last_rejected = true;
            h *= (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
        }
    }
    if stats.accepted_steps == 0 {
        stats.min_step = 0.0;
    }
    Ok(stats)
}

/// Starting step from the size of `y` and `f(y)`.
fn initial_step(y: &[C64], f: &[C64], tol: Tolerances, span: f64) -> f64 {
    let sc = |v: &[C64]| -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(vi, yi)| (vi.norm() / (tol.atol + tol.rtol * yi.norm())).powi(2))
            .sum();
        (s / v.len().max(1) as f64).sqrt()
    };
    let d0 = sc(y);
    let d1 = sc(f);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let fmax = max_abs(f);
    let h = if fmax > 0.0 {
        h.min(0.1 / fmax * max_abs(y).max(1e-300))
    } else {
        h
    };
    h.min(span).max(1e-12 * span)
}
