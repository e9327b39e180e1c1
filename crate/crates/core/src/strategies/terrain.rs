//! Diamond-square height maps projected onto network coordinates.

use rand::Rng;

/// Square height grid of side `2^k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainMap {
    side: usize,
    heights: Vec<f64>,
    pub roughness: f64,
}

impl TerrainMap {
    /// Corners drawn uniformly from `corner_range`; every midpoint is the mean
    /// of its diamond or square neighbours plus uniform noise whose amplitude
    /// starts at `roughness · span` and halves at each level.
    pub fn generate<R: Rng + ?Sized>(
        exponent: u32,
        corner_range: (f64, f64),
        roughness: f64,
        rng: &mut R,
    ) -> Self {
        let exponent = exponent.max(1);
        let side = (1usize << exponent) + 1;
        let mut heights = vec![0.0; side * side];
        let (lo, hi) = corner_range;
        let draw_corner = |rng: &mut R| if hi > lo { rng.random_range(lo..=hi) } else { lo };
        for (x, y) in [(0, 0), (side - 1, 0), (0, side - 1), (side - 1, side - 1)] {
            heights[y * side + x] = draw_corner(rng);
        }
        let span = if hi > lo { hi - lo } else { 1.0 };
        let mut amplitude = roughness * span;
        let noise = |rng: &mut R, amp: f64| if amp > 0.0 { rng.random_range(-amp..=amp) } else { 0.0 };

        let mut step = side - 1;
        while step > 1 {
            let half = step / 2;
            // Diamond step: square centres.
            for y in (half..side).step_by(step) {
                for x in (half..side).step_by(step) {
                    let avg = (heights[(y - half) * side + x - half]
                        + heights[(y - half) * side + x + half]
                        + heights[(y + half) * side + x - half]
                        + heights[(y + half) * side + x + half])
                        / 4.0;
                    heights[y * side + x] = avg + noise(rng, amplitude);
                }
            }
            // Square step: edge midpoints, using whichever neighbours exist.
            for y in (0..side).step_by(half) {
                let offset = if (y / half).is_multiple_of(2) { half } else { 0 };
                for x in (offset..side).step_by(step) {
                    let mut sum = 0.0;
                    let mut count = 0.0;
                    if y >= half {
                        sum += heights[(y - half) * side + x];
                        count += 1.0;
                    }
                    if y + half < side {
                        sum += heights[(y + half) * side + x];
                        count += 1.0;
                    }
                    if x >= half {
                        sum += heights[y * side + x - half];
                        count += 1.0;
                    }
                    if x + half < side {
                        sum += heights[y * side + x + half];
                        count += 1.0;
                    }
                    heights[y * side + x] = sum / count + noise(rng, amplitude);
                }
            }
            amplitude *= 0.5;
            step = half;
        }
        TerrainMap {
            side,
            heights,
            roughness,
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn height(&self, x: usize, y: usize) -> f64 {
        self.heights[y * self.side + x]
    }

    pub fn range(&self) -> (f64, f64) {
        self.heights
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| (lo.min(h), hi.max(h)))
    }

    /// Affine map of the grid onto `[lo, hi]`. A flat grid is only clamped.
    pub fn rescale(&mut self, lo: f64, hi: f64) {
        let (min, max) = self.range();
        if max > min {
            for h in &mut self.heights {
                *h = lo + (*h - min) / (max - min) * (hi - lo);
            }
        } else {
            for h in &mut self.heights {
                *h = h.clamp(lo.min(hi), hi.max(lo));
            }
        }
    }

    /// Bilinear interpolation at fractional grid coordinates.
    pub fn sample(&self, gx: f64, gy: f64) -> f64 {
        let max = (self.side - 1) as f64;
        let gx = gx.clamp(0.0, max);
        let gy = gy.clamp(0.0, max);
        let x0 = (gx.floor() as usize).min(self.side - 2);
        let y0 = (gy.floor() as usize).min(self.side - 2);
        let tx = gx - x0 as f64;
        let ty = gy - y0 as f64;
        let h00 = self.height(x0, y0);
        let h10 = self.height(x0 + 1, y0);
        let h01 = self.height(x0, y0 + 1);
        let h11 = self.height(x0 + 1, y0 + 1);
        let top = h00 + (h10 - h00) * tx;
        let bottom = h01 + (h11 - h01) * tx;
        top + (bottom - top) * ty
    }

    /// Heights at plane positions, after scaling their bounding box onto the
    /// grid. A degenerate extent maps to the grid centre along that axis.
    pub fn project(&self, points: &[(f64, f64)]) -> Vec<f64> {
        let (mut xmin, mut xmax, mut ymin, mut ymax) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let cells = (self.side - 1) as f64;
        let to_grid = |v: f64, lo: f64, hi: f64| {
            if hi > lo {
                (v - lo) / (hi - lo) * cells
            } else {
                cells / 2.0
            }
        };
        points
            .iter()
            .map(|&(x, y)| self.sample(to_grid(x, xmin, xmax), to_grid(y, ymin, ymax)))
            .collect()
    }
}

/// Elevations for the given node positions from a fresh map rescaled to
/// `bounds`.
pub fn terrain_elevations<R: Rng + ?Sized>(
    points: &[(f64, f64)],
    exponent: u32,
    corner_range: (f64, f64),
    roughness: f64,
    bounds: (f64, f64),
    rng: &mut R,
) -> Vec<f64> {
    let mut map = TerrainMap::generate(exponent, corner_range, roughness, rng);
    map.rescale(bounds.0, bounds.1);
    map.project(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_corners_without_noise_stay_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let map = TerrainMap::generate(4, (5.0, 5.0), 0.0, &mut rng);
        assert_eq!(map.side(), 17);
        assert_eq!(map.range(), (5.0, 5.0));
        let e = terrain_elevations(&[(0.0, 0.0), (3.0, 9.0)], 4, (5.0, 5.0), 0.0, (0.0, 10.0), &mut rng);
        assert_eq!(e, vec![5.0, 5.0]);
    }

    #[test]
    fn single_point_reads_centre() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let map = TerrainMap::generate(3, (0.0, 10.0), 0.5, &mut rng);
        let e = map.project(&[(42.0, -7.0)]);
        assert_eq!(e[0], map.height(4, 4));
    }

    #[test]
    fn rescaled_map_spans_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut map = TerrainMap::generate(5, (0.0, 1.0), 0.6, &mut rng);
        map.rescale(20.0, 35.0);
        let (lo, hi) = map.range();
        assert!((lo - 20.0).abs() < 1e-9 && (hi - 35.0).abs() < 1e-9);
    }

    #[test]
    fn bilinear_hits_grid_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let map = TerrainMap::generate(2, (0.0, 1.0), 1.0, &mut rng);
        for y in 0..map.side() {
            for x in 0..map.side() {
                assert_eq!(map.sample(x as f64, y as f64), map.height(x, y));
            }
        }
    }
}
