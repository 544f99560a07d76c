//! In-place 3-D FFT over a row-major box (z fastest).

use crate::C64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

pub struct Fft3 {
    dims: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut p = FftPlanner::new();
        let f = |p: &mut FftPlanner<f64>, n, d| p.plan_fft(n, d);
        Self {
            dims,
            fwd: [
                f(&mut p, dims[0], FftDirection::Forward),
                f(&mut p, dims[1], FftDirection::Forward),
                f(&mut p, dims[2], FftDirection::Forward),
            ],
            inv: [
                f(&mut p, dims[0], FftDirection::Inverse),
                f(&mut p, dims[1], FftDirection::Inverse),
                f(&mut p, dims[2], FftDirection::Inverse),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, &self.fwd);
    }

    /// Unnormalised inverse; divide by [`Fft3::len`] to invert [`Fft3::forward`].
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.dims;
        assert_eq!(data.len(), nx * ny * nz);
        // z: contiguous lines
        plans[2].process(data);
        // y: stride nz
        let mut line = vec![C64::new(0.0, 0.0); ny.max(nx)];
        for i in 0..nx {
            for k in 0..nz {
                let base = i * ny * nz + k;
                for j in 0..ny {
                    line[j] = data[base + j * nz];
                }
                plans[1].process(&mut line[..ny]);
                for j in 0..ny {
                    data[base + j * nz] = line[j];
                }
            }
        }
        // x: stride ny*nz
        let s = ny * nz;
        for r in 0..s {
            for i in 0..nx {
                line[i] = data[r + i * s];
            }
            plans[0].process(&mut line[..nx]);
            for i in 0..nx {
                data[r + i * s] = line[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_delta() {
        let dims = [4, 6, 5];
        let f = Fft3::new(dims);
        let n = f.len();
        let orig: Vec<C64> = (0..n).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64).cos())).collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / n as f64 - b).norm() < 1e-13);
        }
        let mut delta = vec![C64::new(0.0, 0.0); n];
        delta[0] = C64::new(1.0, 0.0);
        f.forward(&mut delta);
        assert!(delta.iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-14));
    }
}
