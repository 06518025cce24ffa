use serde::{Deserialize, Serialize};

use super::params::check_lambda;
use super::{tail_distribution, SamplingDistribution, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};

/// Allowed upward step `r(k) − r(k−1)` after an integration step.
const MONOTONE_TOL: f64 = 1e-9;

/// Time-stamped tails produced by [`transient_ode`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Right-hand side of the mean-field equation on a truncated index range:
///
/// `dr(k)/dt = λ Σ_l μ(l) (r(k−1)^l − r(k)^l) − (r(k) − r(k+1))`, `k ≥ 1`,
///
/// with `r(len) = 0` beyond the last entry. Entry 0 is always 0.
pub fn mean_field_drift(mu: &SamplingDistribution, lambda: f64, r: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; r.len()];
    drift_into(mu, lambda, r, &mut out);
    out
}

fn drift_into(mu: &SamplingDistribution, lambda: f64, r: &[f64], out: &mut [f64]) {
    let n = r.len();
    if n == 0 {
        return;
    }
    out[0] = 0.0;
    let mut u_prev = mu.pgf(r[0]);
    for k in 1..n {
        let u_here = mu.pgf(r[k]);
        let next = if k + 1 < n { r[k + 1] } else { 0.0 };
        out[k] = lambda * (u_prev - u_here) - (r[k] - next);
        u_prev = u_here;
    }
}

/// Integrates the mean-field equation from `r0` up to `t_end` with a
/// fixed-step fourth-order Runge–Kutta scheme, recording every step.
///
/// The state is padded with zeros to cover the certified range of the fixed
/// point, so an "empty system" start can be given as `[1.0]`.
pub fn transient_ode(mu: &SamplingDistribution, lambda: f64, r0: &[f64], t_end: f64, dt: f64) -> Result<Trajectory> {
    transient_ode_strided(mu, lambda, r0, t_end, dt, 1)
}

/// Same as [`transient_ode`] but keeps only every `stride`-th step (the
/// initial and final states are always kept).
pub fn transient_ode_strided(
    mu: &SamplingDistribution,
    lambda: f64,
    r0: &[f64],
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    check_lambda(lambda)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("dt must be > 0, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(invalid(format!("t_end must be >= 0, got {t_end}")));
    }
    if stride == 0 {
        return Err(invalid("stride must be >= 1"));
    }
    validate_initial(r0)?;

    let fixed_len = tail_distribution(mu, lambda, DEFAULT_TOL)?.r.len();
    let mut r = r0.to_vec();
    r.resize(r0.len().max(fixed_len + 1), 0.0);
    r[0] = 1.0;

    let n = r.len();
    let steps = (t_end / dt).ceil() as usize;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![r.clone()],
    };
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut probe = vec![0.0; n];
    let mut t = 0.0;
    for step in 1..=steps {
        let h = dt.min(t_end - t);
        drift_into(mu, lambda, &r, &mut k1);
        axpy(&r, h / 2.0, &k1, &mut probe);
        drift_into(mu, lambda, &probe, &mut k2);
        axpy(&r, h / 2.0, &k2, &mut probe);
        drift_into(mu, lambda, &probe, &mut k3);
        axpy(&r, h, &k3, &mut probe);
        drift_into(mu, lambda, &probe, &mut k4);
        for i in 0..n {
            r[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r[0] = 1.0;
        t = if step == steps { t_end } else { t + h };

        for k in 1..n {
            if r[k] - r[k - 1] > MONOTONE_TOL {
                return Err(Error::StepRejected {
                    time: t,
                    k,
                    excess: r[k] - r[k - 1],
                });
            }
        }
        if r[n - 1] < -MONOTONE_TOL {
            return Err(Error::StepRejected {
                time: t,
                k: n,
                excess: -r[n - 1],
            });
        }
        if step % stride == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(r.clone());
        }
    }
    Ok(traj)
}

fn axpy(x: &[f64], a: f64, y: &[f64], out: &mut [f64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

fn validate_initial(r0: &[f64]) -> Result<()> {
    match r0.first() {
        Some(first) if (first - 1.0).abs() <= 1e-12 => {}
        _ => return Err(invalid("initial tail must start with r(0) = 1")),
    }
    for k in 1..r0.len() {
        if !(0.0..=1.0).contains(&r0[k]) {
            return Err(invalid(format!("initial r({k}) = {} outside [0, 1]", r0[k])));
        }
        if r0[k] > r0[k - 1] {
            return Err(invalid(format!("initial tail increases at k = {k}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(l: usize) -> SamplingDistribution {
        SamplingDistribution::point(l, l).unwrap()
    }

    #[test]
    fn drift_vanishes_at_fixed_point() {
        for (mu, lambda) in [
            (point(1), 0.5),
            (point(2), 0.9),
            (SamplingDistribution::new(vec![0.2, 0.5, 0.3]).unwrap(), 0.95),
        ] {
            let t = tail_distribution(&mu, lambda, DEFAULT_TOL).unwrap();
            let d = mean_field_drift(&mu, lambda, &t.r);
            let last = d.len() - 1;
            for (k, v) in d.iter().enumerate().take(last) {
                assert!(v.abs() < 1e-15, "k={k} drift={v}");
            }
            // The last entry sees the zero boundary instead of r(K+1).
            assert!(d[last].abs() <= t.truncation_bound);
        }
    }

    #[test]
    fn fixed_point_is_stationary() {
        let mu = point(2);
        let t = tail_distribution(&mu, 0.9, DEFAULT_TOL).unwrap();
        let traj = transient_ode(&mu, 0.9, &t.r, 5.0, 0.01).unwrap();
        for state in &traj.states {
            for (a, b) in state.iter().zip(&t.r) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mm1_relaxes_from_empty() {
        let mu = point(1);
        let traj = transient_ode_strided(&mu, 0.5, &[1.0], 400.0, 0.01, 1000).unwrap();
        let end = traj.final_state();
        for (k, r) in end.iter().enumerate() {
            assert!((r - 0.5f64.powi(k as i32)).abs() < 1e-6, "k={k}");
        }
        assert_eq!(*traj.times.last().unwrap(), 400.0);
    }

    #[test]
    fn two_choice_stays_above_fixed_point_from_mm1_tail() {
        let mu = point(2);
        let start: Vec<f64> = (0..300).map(|k| 0.9f64.powi(k)).collect();
        let traj = transient_ode_strided(&mu, 0.9, &start, 300.0, 0.01, 10).unwrap();
        let target = tail_distribution(&mu, 0.9, DEFAULT_TOL).unwrap();
        let fixed = |k: usize| target.r.get(k).copied().unwrap_or(0.0);
        for state in &traj.states {
            for (k, r) in state.iter().enumerate() {
                assert!(*r >= fixed(k) - 1e-12, "k={k} fell below the fixed point");
            }
        }
        // The approach is not monotone in time: r(2) first rises from 0.81.
        assert!(traj.states[1][2] > 0.81);
        for (k, r) in traj.final_state().iter().enumerate() {
            assert!((r - fixed(k)).abs() < 1e-6, "k={k}");
        }
    }

    #[test]
    fn rejects_bad_initial_conditions() {
        let mu = point(1);
        assert!(transient_ode(&mu, 0.5, &[0.9, 0.5], 1.0, 0.01).is_err());
        assert!(transient_ode(&mu, 0.5, &[1.0, 0.2, 0.4], 1.0, 0.01).is_err());
        assert!(transient_ode(&mu, 0.5, &[1.0], 1.0, 0.0).is_err());
        assert!(transient_ode(&mu, 1.5, &[1.0], 1.0, 0.01).is_err());
    }

    #[test]
    fn oversized_step_is_rejected() {
        // dt far beyond the stability region of RK4 for this system.
        let mu = point(1);
        let err = transient_ode(&mu, 0.5, &[1.0], 50.0, 5.0).unwrap_err();
        assert!(matches!(err, Error::StepRejected { .. }));
    }
}
