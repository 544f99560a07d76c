use crate::point::{dist, Point};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The region Ω containing the holes and the medium contrast.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    Box { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
}

impl Domain {
    pub fn unit_cube() -> Self {
        Domain::Box { lo: [0.0; 3], hi: [1.0; 3] }
    }

    /// Cube centred at `center` with the given volume.
    pub fn cube_of_volume(center: Point, volume: f64) -> Result<Self> {
        if !(volume > 0.0) {
            return Err(Error::Config(format!("domain volume {volume} must be positive")));
        }
        let h = 0.5 * volume.cbrt();
        Ok(Domain::Box {
            lo: [center[0] - h, center[1] - h, center[2] - h],
            hi: [center[0] + h, center[1] + h, center[2] + h],
        })
    }

    /// Ball centred at `center` with the given volume.
    pub fn ball_of_volume(center: Point, volume: f64) -> Result<Self> {
        if !(volume > 0.0) {
            return Err(Error::Config(format!("domain volume {volume} must be positive")));
        }
        let radius = (3.0 * volume / (4.0 * std::f64::consts::PI)).cbrt();
        Ok(Domain::Ball { center, radius })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Box { lo, hi } => {
                if (0..3).any(|i| !(hi[i] > lo[i])) {
                    return Err(Error::Config("box domain needs hi > lo on every axis".into()));
                }
            }
            Domain::Ball { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config("ball domain needs a positive radius".into()));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: Point) -> bool {
        match self {
            Domain::Box { lo, hi } => (0..3).all(|i| x[i] >= lo[i] && x[i] <= hi[i]),
            Domain::Ball { center, radius } => dist(x, *center) <= *radius,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Box { lo, hi } => (0..3).map(|i| hi[i] - lo[i]).product(),
            Domain::Ball { radius, .. } => 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3),
        }
    }

    /// Axis-aligned box containing Ω.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Box { lo, hi } => (*lo, *hi),
            Domain::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius, center[2] - radius],
                [center[0] + radius, center[1] + radius, center[2] + radius],
            ),
        }
    }

    pub fn center(&self) -> Point {
        let (lo, hi) = self.bounding_box();
        [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])]
    }

    /// Volume of `[lo, hi] ∩ Ω`. Exact for boxes; midpoint sub-sampling with
    /// `sub³` points otherwise.
    pub fn clipped_volume(&self, lo: Point, hi: Point, sub: usize) -> f64 {
        match self {
            Domain::Box { lo: dlo, hi: dhi } => (0..3)
                .map(|i| (hi[i].min(dhi[i]) - lo[i].max(dlo[i])).max(0.0))
                .product(),
            Domain::Ball { .. } => {
                let (cnt, _) = self.sample_box(lo, hi, sub);
                let cell: f64 = (0..3).map(|i| hi[i] - lo[i]).product();
                cell * cnt as f64 / (sub * sub * sub) as f64
            }
        }
    }

    /// Centroid of `[lo, hi] ∩ Ω`, or `None` if empty at this resolution.
    pub fn clipped_centroid(&self, lo: Point, hi: Point, sub: usize) -> Option<Point> {
        match self {
            Domain::Box { lo: dlo, hi: dhi } => {
                let mut c = [0.0; 3];
                for i in 0..3 {
                    let (l, h) = (lo[i].max(dlo[i]), hi[i].min(dhi[i]));
                    if h < l {
                        return None;
                    }
                    c[i] = 0.5 * (l + h);
                }
                Some(c)
            }
            Domain::Ball { .. } => {
                let (cnt, sum) = self.sample_box(lo, hi, sub);
                (cnt > 0).then(|| [sum[0] / cnt as f64, sum[1] / cnt as f64, sum[2] / cnt as f64])
            }
        }
    }

    fn sample_box(&self, lo: Point, hi: Point, sub: usize) -> (usize, Point) {
        let sub = sub.max(1);
        let mut cnt = 0;
        let mut sum = [0.0; 3];
        for i in 0..sub {
            for j in 0..sub {
                for k in 0..sub {
                    let f = |d: usize, t: usize| lo[d] + (hi[d] - lo[d]) * (t as f64 + 0.5) / sub as f64;
                    let x = [f(0, i), f(1, j), f(2, k)];
                    if self.contains(x) {
                        cnt += 1;
                        for d in 0..3 {
                            sum[d] += x[d];
                        }
                    }
                }
            }
        }
        (cnt, sum)
    }
}
