use super::ScattererSet;
use crate::config::AsymptoticRegime;
use crate::point::{dist, Point};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerEntry {
    pub layer: usize,
    pub count: usize,
    /// Smallest surface-to-surface distance from `D_m` to a hole in this layer.
    pub min_distance: f64,
    /// `n a^{(2−β)/3} / 2`.
    pub distance_bound: f64,
    /// `24 n² + 2`.
    pub interior_count: usize,
    /// True when every lattice cell of the layer belongs to the partition.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerCensus {
    pub reference: usize,
    pub layers: Vec<LayerEntry>,
}

impl LayerCensus {
    pub fn distance_bound_holds(&self) -> bool {
        self.layers.iter().all(|l| l.min_distance >= l.distance_bound)
    }

    /// Counts never exceed twice the interior formula.
    pub fn doubled_count_holds(&self) -> bool {
        self.layers.iter().all(|l| l.count <= 2 * l.interior_count)
    }
}

fn cell_key(set: &ScattererSet, j: usize, origin: Point) -> [i64; 3] {
    match set.lattice[j] {
        Some(k) => k,
        None => {
            let c = set.cell_anchor[j];
            let l = set.cell_side;
            [
                ((c[0] - origin[0]) / l).round() as i64,
                ((c[1] - origin[1]) / l).round() as i64,
                ((c[2] - origin[2]) / l).round() as i64,
            ]
        }
    }
}

/// Groups every other hole by the max-norm lattice offset of its cell from
/// the cell of hole `m`.
pub fn layer_census(set: &ScattererSet, m: usize, regime: &AsymptoticRegime) -> LayerCensus {
    let origin = set.cell_anchor[m];
    let km = cell_key(set, m, origin);
    let side = regime.a.powf((2.0 - regime.beta) / 3.0);
    let dm = set.hole_diameter(m);
    let mut occupied: std::collections::HashSet<[i64; 3]> = std::collections::HashSet::new();
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for j in 0..set.len() {
        let kj = cell_key(set, j, origin);
        occupied.insert(kj);
        if j == m {
            continue;
        }
        let n = (0..3).map(|d| (kj[d] - km[d]).unsigned_abs() as usize).max().unwrap();
        if n == 0 {
            continue;
        }
        let surf = dist(set.holes[m].center, set.holes[j].center) - 0.5 * (dm + set.hole_diameter(j));
        let e = acc.entry(n).or_insert((0, f64::INFINITY));
        e.0 += 1;
        e.1 = e.1.min(surf);
    }
    let layers = acc
        .into_iter()
        .map(|(n, (count, min_distance))| {
            let r = n as i64;
            let mut complete = true;
            'outer: for i in -r..=r {
                for j in -r..=r {
                    for k in -r..=r {
                        if i.abs().max(j.abs()).max(k.abs()) == r
                            && !occupied.contains(&[km[0] + i, km[1] + j, km[2] + k])
                        {
                            complete = false;
                            break 'outer;
                        }
                    }
                }
            }
            LayerEntry {
                layer: n,
                count,
                min_distance,
                distance_bound: n as f64 * side / 2.0,
                interior_count: 24 * n * n + 2,
                complete,
            }
        })
        .collect();
    LayerCensus { reference: m, layers }
}
