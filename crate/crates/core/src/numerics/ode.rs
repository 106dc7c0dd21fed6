//! Explicit Runge–Kutta steppers for small fixed-size systems.

/// Classical fourth-order Runge–Kutta step.
pub fn rk4_step<const N: usize>(f: impl Fn(f64, &[f64; N]) -> [f64; N], t: f64, y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Adaptive Dormand–Prince 5(4) integration settings.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Local error allowed per unit of the independent variable.
    pub tolerance: f64,
    pub max_steps: usize,
    pub initial_step: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_steps: 5_000_000,
            initial_step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdaptiveOutcome {
    Reached,
    /// The guard returned false at the contained abscissa.
    Stopped(f64),
    StepLimit(f64),
}

// Dormand–Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (t1 > t0) with error control
/// per unit length, landing exactly on `t1`. `guard` is checked after each
/// accepted step; returning false stops the integration early.
pub fn dormand_prince<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    options: &AdaptiveOptions,
    guard: &impl Fn(f64, &[f64; N]) -> bool,
) -> ([f64; N], AdaptiveOutcome) {
    let span = t1 - t0;
    if span <= 0.0 {
        return (y0, AdaptiveOutcome::Reached);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = options.initial_step.min(span);
    let mut steps = 0usize;
    while t < t1 {
        if steps >= options.max_steps {
            return (y, AdaptiveOutcome::StepLimit(t));
        }
        steps += 1;
        let last = t + h >= t1;
        let step = if last { t1 - t } else { h };
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += step * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * step, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += step * d5;
            let scale = 1.0 + y[i].abs().max(y5[i].abs());
            err = err.max((step * (d5 - d4)).abs() / scale);
        }
        let allowed = options.tolerance * step;
        if err <= allowed || step < 1e-14 * (1.0 + t.abs()) {
            t = if last { t1 } else { t + step };
            y = y5;
            if !guard(t, &y) {
                return (y, AdaptiveOutcome::Stopped(t));
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h = (step * factor).max(1e-14 * (1.0 + t.abs()));
    }
    (y, AdaptiveOutcome::Reached)
}
