//! Classical fixed-step fourth-order Runge–Kutta on flat arrays.

#[inline]
pub fn rk4_step<const N: usize>(
    y: &[f64; N],
    t: f64,
    h: f64,
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
) -> [f64; N] {
    let axpy = |a: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *a;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += s * ki;
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Splits `duration` into the fewest equal steps no longer than `max_step`.
pub fn step_count(duration: f64, max_step: f64) -> usize {
    if duration <= 0.0 {
        return 0;
    }
    let n = duration / max_step;
    // Tolerate round-off when duration is an exact multiple of the step.
    let rounded = libm_round(n);
    if (n - rounded).abs() < 1e-9 * n.max(1.0) {
        rounded.max(1.0) as usize
    } else {
        libm_ceil(n) as usize
    }
}

fn libm_round(x: f64) -> f64 {
    num_traits::Float::round(x)
}

fn libm_ceil(x: f64) -> f64 {
    num_traits::Float::ceil(x)
}
