use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{sample_ppp, Point, SimConfig};
#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::se::NetworkParams;
use crate::{Error, Result};

const MAX_RESAMPLES: u32 = 10_000;

/// Uniform bucket grid for nearest-point queries on a bounded pattern.
#[derive(Debug, Clone)]
pub struct GridIndex {
    min_x: f64,
    min_y: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: points of bucket k are order[start[k]..start[k + 1]]
    start: Vec<u32>,
    order: Vec<u32>,
}

impl GridIndex {
    /// Builds an index whose buckets hold about `per_cell` points on average.
    pub fn build(points: &[Point], per_cell: f64) -> Self {
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in points {
            min_x = min_x.min(p.x);
            min_y = min_y.min(p.y);
            max_x = max_x.max(p.x);
            max_y = max_y.max(p.y);
        }
        let w = (max_x - min_x).max(1e-12);
        let h = (max_y - min_y).max(1e-12);
        let n = points.len().max(1) as f64;
        let cell = (w * h * per_cell / n).sqrt().max(1e-12);
        let nx = ((w / cell) as usize + 1).min(1 << 14);
        let ny = ((h / cell) as usize + 1).min(1 << 14);
        let cell = (w / nx as f64).max(h / ny as f64).max(cell * 1e-6);

        let mut idx = Self {
            min_x,
            min_y,
            cell,
            nx,
            ny,
            start: vec![0; nx * ny + 1],
            order: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|p| idx.bucket_of(p)).collect();
        for &k in &keys {
            idx.start[k + 1] += 1;
        }
        for k in 0..nx * ny {
            idx.start[k + 1] += idx.start[k];
        }
        let mut fill = idx.start.clone();
        for (i, &k) in keys.iter().enumerate() {
            idx.order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        idx
    }

    #[inline]
    fn cell_coords(&self, p: &Point) -> (usize, usize) {
        let cx = ((p.x - self.min_x) / self.cell).max(0.0) as usize;
        let cy = ((p.y - self.min_y) / self.cell).max(0.0) as usize;
        (cx.min(self.nx - 1), cy.min(self.ny - 1))
    }

    #[inline]
    fn bucket_of(&self, p: &Point) -> usize {
        let (cx, cy) = self.cell_coords(p);
        cy * self.nx + cx
    }

    /// Index of the point of `points` nearest to `q`, ties to the lower index.
    /// `points` must be the slice the index was built from.
    pub fn nearest(&self, points: &[Point], q: &Point) -> Option<usize> {
        if points.is_empty() {
            return None;
        }
        let (cx, cy) = self.cell_coords(q);
        // distance from q to the boundary of its own cell (0 if clamped)
        let fx = (q.x - self.min_x) / self.cell - cx as f64;
        let fy = (q.y - self.min_y) / self.cell - cy as f64;
        let margin = fx.min(1.0 - fx).min(fy).min(1.0 - fy).clamp(0.0, 0.5) * self.cell;
        let (cx, cy) = (cx as isize, cy as isize);
        let mut best = usize::MAX;
        let mut best_d2 = f64::INFINITY;
        let max_ring = self.nx.max(self.ny) as isize;
        for ring in 0..=max_ring {
            for dy in -ring..=ring {
                let y = cy + dy;
                if y < 0 || y >= self.ny as isize {
                    continue;
                }
                let on_edge_row = dy == -ring || dy == ring;
                let step = if on_edge_row { 1 } else { (2 * ring).max(1) };
                let mut dx = -ring;
                while dx <= ring {
                    let x = cx + dx;
                    if x >= 0 && x < self.nx as isize {
                        let k = y as usize * self.nx + x as usize;
                        for &i in &self.order[self.start[k] as usize..self.start[k + 1] as usize] {
                            let i = i as usize;
                            let d2 = points[i].dist2(q);
                            if d2 < best_d2 || (d2 == best_d2 && i < best) {
                                best_d2 = d2;
                                best = i;
                            }
                        }
                    }
                    dx += step;
                }
            }
            // Anything in ring + 1 or beyond is at least this far away.
            let reach = ring as f64 * self.cell + margin;
            if best != usize::MAX && best_d2 <= reach * reach {
                break;
            }
        }
        (best != usize::MAX).then_some(best)
    }
}

/// One sampled network around the typical user at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyRealization {
    pub bs_points: Vec<Point>,
    /// Users other than the typical user, who sits at the origin.
    pub user_points: Vec<Point>,
    /// BS `i` is on iff it is the nearest BS of some user, the typical user
    /// included.
    pub active_mask: Vec<bool>,
    pub serving_bs_index: usize,
    /// Users in the serving cell, the typical user included (so ≥ 1).
    pub serving_cell_users: u32,
    /// Times the BS pattern was redrawn because it came out empty.
    pub resamples: u32,
}

impl TopologyRealization {
    pub fn active_count(&self) -> usize {
        self.active_mask.iter().filter(|&&a| a).count()
    }

    pub fn serving_distance(&self) -> f64 {
        self.bs_points[self.serving_bs_index].norm2().sqrt()
    }
}

/// Samples independent BS and user PPPs in the window, adds the typical user
/// at the origin and applies nearest-BS association with empty-cell shutoff.
pub fn realize_topology<R: Rng + ?Sized>(
    params: &NetworkParams,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<TopologyRealization> {
    params.validate()?;
    cfg.check_window(params.lambda_b)?;
    let radius = cfg.window_radius;

    let mut resamples = 0;
    let bs_points = loop {
        let pts = sample_ppp(params.lambda_b, radius, rng);
        if !pts.is_empty() {
            break pts;
        }
        resamples += 1;
        if resamples >= MAX_RESAMPLES {
            return Err(Error::Numerical("BS pattern empty after repeated resampling"));
        }
    };
    let user_points = sample_ppp(params.lambda_u, radius, rng);

    let index = GridIndex::build(&bs_points, 1.0);
    let serving = index
        .nearest(&bs_points, &Point::ORIGIN)
        .ok_or(Error::Numerical("no serving BS"))?;
    let mut active_mask = vec![false; bs_points.len()];
    active_mask[serving] = true;
    let mut serving_cell_users = 1;
    for u in &user_points {
        if let Some(i) = index.nearest(&bs_points, u) {
            active_mask[i] = true;
            if i == serving {
                serving_cell_users += 1;
            }
        }
    }

    Ok(TopologyRealization {
        bs_points,
        user_points,
        active_mask,
        serving_bs_index: serving,
        serving_cell_users,
        resamples,
    })
}
