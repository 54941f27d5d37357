//! Uniform cell grid for fixed-radius and nearest-neighbour queries.

use std::collections::HashMap;

use super::PointSet;

/// Buckets points into axis-aligned cubes of side `cell`.
pub struct CellGrid<'a> {
    points: &'a PointSet,
    cell: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl<'a> CellGrid<'a> {
    pub fn new(points: &'a PointSet, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let d = points.dim();
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for i in 0..points.len() {
            let key = key_of(points.point(i), cell);
            for k in 0..d {
                lo[k] = lo[k].min(key[k]);
                hi[k] = hi[k].max(key[k]);
            }
            buckets.entry(key).or_default().push(i);
        }
        Self {
            points,
            cell,
            buckets,
            lo,
            hi,
        }
    }

    pub fn cell(&self) -> f64 {
        self.cell
    }

    /// Calls `visit(j, dist)` for every point with `dist < radius`, in a
    /// deterministic order. `radius` must not exceed the cell size.
    pub fn for_each_within(&self, query: &[f64], radius: f64, mut visit: impl FnMut(usize, f64)) {
        debug_assert!(radius <= self.cell);
        let center = key_of(query, self.cell);
        let mut key = center.clone();
        self.visit_offsets(&center, 1, &mut key, 0, &mut |bucket| {
            for &j in bucket {
                let dist = distance(query, self.points.point(j));
                if dist < radius {
                    visit(j, dist);
                }
            }
        });
    }

    fn visit_offsets(
        &self,
        center: &[i64],
        reach: i64,
        key: &mut Vec<i64>,
        axis: usize,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if axis == center.len() {
            if let Some(bucket) = self.buckets.get(key.as_slice()) {
                f(bucket);
            }
            return;
        }
        for off in -reach..=reach {
            key[axis] = center[axis] + off;
            if key[axis] < self.lo[axis] || key[axis] > self.hi[axis] {
                continue;
            }
            self.visit_offsets(center, reach, key, axis + 1, f);
        }
    }

    /// Visits buckets whose Chebyshev cell distance from `center` is exactly
    /// `ring`.
    fn visit_ring(&self, center: &[i64], ring: i64, f: &mut dyn FnMut(&[usize])) {
        let mut key = center.to_vec();
        self.visit_offsets(center, ring, &mut key, 0, &mut |bucket| f(bucket));
        // the cube visit above includes inner rings; callers dedupe by
        // tracking the best distance, which is idempotent
    }

    /// Nearest data point to `query` and its distance.
    pub fn nearest(&self, query: &[f64]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let center = key_of(query, self.cell);
        let max_ring = (0..center.len())
            .map(|k| {
                (center[k] - self.lo[k])
                    .abs()
                    .max((self.hi[k] - center[k]).abs())
            })
            .max()
            .unwrap_or(0);
        let mut best: Option<(usize, f64)> = None;
        let mut ring = 0;
        loop {
            self.visit_ring(&center, ring, &mut |bucket| {
                for &j in bucket {
                    let dist = distance(query, self.points.point(j));
                    if best.is_none_or(|(bj, bd)| dist < bd || (dist == bd && j < bj)) {
                        best = Some((j, dist));
                    }
                }
            });
            // anything outside the visited cube is at least ring·cell away
            if let Some((_, bd)) = best {
                if bd <= ring as f64 * self.cell {
                    break;
                }
            }
            if ring > max_ring {
                break;
            }
            ring += 1;
        }
        best
    }
}

fn key_of(x: &[f64], cell: f64) -> Vec<i64> {
    x.iter().map(|c| (c / cell).floor() as i64).collect()
}

/// Euclidean distance, summed in coordinate order.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
