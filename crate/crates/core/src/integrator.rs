//! Dormand–Prince 5(4) integration of `y' = f(t, y)` for complex vectors.
//!
//! Steps propagate the fifth-order solution. The local error is controlled
//! per unit step, `‖err‖₂ ≤ tol·h·‖y‖₂`, so the accumulated error over a run
//! of length `T` stays near `tol·T`. Being relative to `‖y‖₂`, the step
//! sequence is invariant under `y0 → a·y0` and the solution is exactly linear
//! in `y0`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std builds; std provides the inherent methods when linked.
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// Fifth-order weights equal the last row of A (first-same-as-last).
#[cfg(test)]
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];

// B minus the embedded fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    /// Local error target per unit time, relative to `‖y‖₂`.
    pub tol: f64,
    pub initial_step: Option<f64>,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { tol: 1e-9, initial_step: None, min_step: 1e-12, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

struct Stages {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self { k: core::array::from_fn(|_| z.clone()), tmp: z }
    }
}

/// One step of size `h` from `(t, y)`; `st.k[0]` must hold `f(t, y)`.
/// Writes the new state into `y_new` and returns `‖y_new − y_new*‖₂`.
fn dp_step<F>(f: &mut F, t: f64, y: &[Complex64], h: f64, st: &mut Stages, y_new: &mut [Complex64]) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    for s in 1..7 {
        for i in 0..y.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &a) in A[s][..s].iter().enumerate() {
                if a != 0.0 {
                    acc += st.k[j][i] * a;
                }
            }
            st.tmp[i] = y[i] + acc * h;
        }
        let (_, rest) = st.k.split_at_mut(s);
        f(t + C[s] * h, &st.tmp, &mut rest[0]);
    }
    // Stage 6 evaluated at y_new (FSAL), so tmp already holds it.
    y_new.copy_from_slice(&st.tmp);
    let mut err2 = 0.0;
    for i in 0..y.len() {
        let mut e = Complex64::new(0.0, 0.0);
        for (s, &w) in E.iter().enumerate() {
            if w != 0.0 {
                e += st.k[s][i] * w;
            }
        }
        err2 += (e * h).norm_sqr();
    }
    err2.sqrt()
}

fn l2(y: &[Complex64]) -> f64 {
    crate::ket::norm(y)
}

/// Integrates from `times[0]` and records `y` at every grid time.
pub fn integrate_adaptive<F>(mut f: F, y0: &[Complex64], times: &[f64], opts: AdaptiveOptions) -> Result<(Vec<Vec<Complex64>>, StepStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("integrator tolerance must be positive".into()));
    }
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadTimeGrid);
    }
    let n = y0.len();
    let mut st = Stages::new(n);
    let mut y = y0.to_vec();
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());
    let mut stats = StepStats::default();
    let mut t = times[0];
    f(t, &y, &mut st.k[0]);

    let mut h = match opts.initial_step {
        Some(h) => h,
        None => {
            let (d0, d1) = (l2(&y), l2(&st.k[0]));
            if d0 == 0.0 || d1 == 0.0 { 1e-3 } else { 0.01 * d0 / d1 }
        }
    };
    for &target in &times[1..] {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::StepUnderflow { t });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            let err = dp_step(&mut f, t, &y, step, &mut st, &mut y_new);
            let scale = opts.tol * step * l2(&y).max(l2(&y_new));
            let ratio = if scale > 0.0 { err / scale } else if err == 0.0 { 0.0 } else { f64::INFINITY };
            if ratio <= 1.0 {
                t = if last { target } else { t + step };
                core::mem::swap(&mut y, &mut y_new);
                let (k0, rest) = st.k.split_at_mut(1);
                core::mem::swap(&mut k0[0], &mut rest[5]);
                stats.accepted += 1;
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.25)).min(5.0) };
                // A step clipped to the grid does not shrink the next one.
                if !(last && step < h) {
                    h = step * grow;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * ratio.powf(-0.25)).max(0.2);
                if h < opts.min_step {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// `n_steps` equal Dormand–Prince steps over `[t0, t1]`.
pub fn integrate_fixed<F>(mut f: F, y0: &[Complex64], t0: f64, t1: f64, n_steps: usize) -> Vec<Complex64>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut st = Stages::new(n);
    let mut y = y0.to_vec();
    let mut y_new = vec![Complex64::new(0.0, 0.0); n];
    let h = (t1 - t0) / n_steps.max(1) as f64;
    for k in 0..n_steps.max(1) {
        let t = t0 + k as f64 * h;
        f(t, &y, &mut st.k[0]);
        dp_step(&mut f, t, &y, h, &mut st, &mut y_new);
        core::mem::swap(&mut y, &mut y_new);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    // y' = -i w y, y(0) = 1.
    fn rotor(w: f64) -> impl FnMut(f64, &[Complex64], &mut [Complex64]) {
        move |_, y, dy| dy[0] = Complex64::new(0.0, -w) * y[0]
    }

    #[test]
    fn tableau_rows_sum_to_nodes() {
        for s in 0..7 {
            let row: f64 = A[s].iter().sum();
            assert!((row - C[s]).abs() < 1e-14, "row {s}");
        }
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn adaptive_rotor_hits_grid() {
        let times = [0.0, 0.5, 3.0, 10.0];
        let (ys, _) = integrate_adaptive(rotor(2.0), &[Complex64::new(1.0, 0.0)], &times, AdaptiveOptions { tol: 1e-12, ..Default::default() }).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            let want = Complex64::new(0.0, -2.0 * t).exp();
            assert!((y[0] - want).norm() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn fixed_step_order_five() {
        let exact = Complex64::new(0.0, -3.0).exp();
        let e1 = (integrate_fixed(rotor(3.0), &[Complex64::new(1.0, 0.0)], 0.0, 1.0, 20)[0] - exact).norm();
        let e2 = (integrate_fixed(rotor(3.0), &[Complex64::new(1.0, 0.0)], 0.0, 1.0, 40)[0] - exact).norm();
        let r = e1 / e2;
        assert!(r > 25.0 && r < 40.0, "ratio {r}");
    }

    #[test]
    fn rejects_bad_grid() {
        let r = integrate_adaptive(rotor(1.0), &[Complex64::new(1.0, 0.0)], &[0.0, 0.0], AdaptiveOptions::default());
        assert_eq!(r.unwrap_err(), Error::BadTimeGrid);
    }
}
