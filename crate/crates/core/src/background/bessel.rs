//! Spherical Bessel functions for the partial-wave oracle.

use crate::C64;

/// `j_0 .. j_L` at complex `z ≠ 0` by Miller's downward recurrence.
pub fn sph_j(lmax: usize, z: C64) -> Vec<C64> {
    let start = lmax + 20 + (z.norm() as usize) * 2;
    let mut f = vec![C64::new(0.0, 0.0); start + 2];
    f[start + 1] = C64::new(0.0, 0.0);
    f[start] = C64::new(1e-30, 0.0);
    for l in (1..=start).rev() {
        f[l - 1] = f[l] * ((2 * l + 1) as f64) / z - f[l + 1];
        if f[l - 1].norm() > 1e250 {
            let s = 1.0 / f[l - 1].norm();
            for v in f.iter_mut().take(start + 2).skip(l - 1) {
                *v *= s;
            }
        }
    }
    // normalise with j_0 or, near its zeros, with j_1
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    let scale = if j0.norm() >= j1.norm() { j0 / f[0] } else { j1 / f[1] };
    f.truncate(lmax + 1);
    f.iter().map(|v| v * scale).collect()
}

/// `y_0 .. y_L` at real `x > 0` by upward recurrence.
pub fn sph_y(lmax: usize, x: f64) -> Vec<f64> {
    let mut y = vec![0.0; lmax + 1];
    y[0] = -x.cos() / x;
    if lmax >= 1 {
        y[1] = -x.cos() / (x * x) - x.sin() / x;
    }
    for l in 1..lmax {
        y[l + 1] = (2 * l + 1) as f64 / x * y[l] - y[l - 1];
    }
    y
}

/// Derivatives from `f_l' = f_{l−1} − (l+1)/z f_l`, `f_0' = −f_1`.
/// `f` must hold one more order than the derivatives requested.
pub fn derivatives(f: &[C64], z: C64) -> Vec<C64> {
    let n = f.len() - 1;
    let mut d = vec![C64::new(0.0, 0.0); n];
    d[0] = -f[1];
    for l in 1..n {
        d[l] = f[l - 1] - f[l] * ((l + 1) as f64) / z;
    }
    d
}
