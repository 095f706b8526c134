//! Dormand–Prince 5(4) integrator on fixed-size states.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

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
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Step-size controller settings.
#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Components are measured against at least `norm_floor` times the largest
    /// component, so identically vanishing components do not force tiny steps.
    pub norm_floor: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            norm_floor: 0.0,
            h_init: 1e-3,
            h_min: 1e-15,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

impl Dopri5 {
    pub fn with_tol(rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol * 1e-4,
            ..Self::default()
        }
    }

    /// One trial step of size `h`. Returns the fifth-order solution and the
    /// scaled error norm (accept when `<= 1`).
    pub fn attempt<const N: usize, F>(&self, f: &mut F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], f64)
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = *y;
        let mut diff = [0.0; N];
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            diff[i] = h * (d5 - d4);
        }
        let floor = if self.norm_floor > 0.0 {
            self.norm_floor * (0..N).map(|i| y[i].abs().max(y5[i].abs())).fold(0.0, f64::max)
        } else {
            0.0
        };
        let mut err = 0.0;
        for i in 0..N {
            let scale = self.atol + self.rtol * y[i].abs().max(y5[i].abs()).max(floor);
            let e = diff[i] / scale;
            err += e * e;
        }
        (y5, (err / N as f64).sqrt())
    }

    /// Proposed next step after an attempt with error norm `err`.
    pub fn adapt(&self, h: f64, err: f64) -> f64 {
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        let next = h * factor;
        next.signum() * next.abs().min(self.h_max)
    }

    /// Integrates from `t0` to `t1`, calling `observe` after every accepted step.
    /// Returns the final time and state (earlier than `t1` when the observer breaks).
    pub fn solve<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        mut observe: O,
    ) -> Result<(f64, [f64; N])>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]) -> ControlFlow<()>,
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok((t0, y0));
        }
        let dir = span.signum();
        let mut h = dir * self.h_init.min(span.abs()).min(self.h_max);
        let (mut t, mut y) = (t0, y0);
        for _ in 0..self.max_steps {
            let remaining = t1 - t;
            let last = h.abs() >= remaining.abs();
            let step = if last { remaining } else { h };
            let (y_new, err) = self.attempt(&mut f, t, &y, step);
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h *= 0.2;
                if h.abs() < self.h_min * t.abs().max(1.0) {
                    return Err(Error::Numerical(format!("non-finite state near t = {t}")));
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + step };
                y = y_new;
                if observe(t, &y).is_break() || last {
                    return Ok((t, y));
                }
                h = self.adapt(step, err);
            } else {
                h = self.adapt(step, err);
                if h.abs() < self.h_min * t.abs().max(1.0) {
                    return Err(Error::Numerical(format!("step size underflow at t = {t}")));
                }
            }
        }
        Err(Error::Numerical(format!(
            "maximum of {} steps exceeded before reaching t = {t1}",
            self.max_steps
        )))
    }

    /// Integrates from `t0` to `t1` and returns the final state.
    pub fn integrate<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Result<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        self.solve(f, t0, y0, t1, |_, _| ControlFlow::Continue(())).map(|(_, y)| y)
    }
}
