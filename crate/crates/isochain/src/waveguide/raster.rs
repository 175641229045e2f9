//! Guides on the finite-difference lattice.
//!
//! Centerline vertices are put on multiples of `h` so that every wall lies
//! on a node line: with `m = L/h` even the nodes share the centerline
//! lattice, with `m` odd they are offset by `h/2`. A node is interior when
//! the four lattice cells around it are all inside the guide.

use super::{DesignError, GuideGeometry};
use crate::helmholtz::{steps_per_width, GridDomain};

/// Rounds every segment to a multiple of `h` and retraces. Arms are
/// rounded so that their free ends lie on a node line.
pub fn snap_geometry(geometry: &GuideGeometry, h: f64) -> Result<GuideGeometry, DesignError> {
    let m = steps_per_width(h, geometry.width)?;
    let snap = |d: f64| ((d / h).round() * h).max(h);
    let segments: Vec<f64> = geometry.segments.iter().map(|&d| snap(d)).collect();
    let arms = if m % 2 == 1 { ((geometry.arms / h - 0.5).round() + 0.5) * h } else { snap(geometry.arms) };
    GuideGeometry::trace(&segments, &geometry.turns, geometry.width, arms)
}

/// Interior nodes of the snapped guide. The domain origin is the first
/// node inside the bounding box.
pub fn rasterize_mask(geometry: &GuideGeometry, h: f64) -> Result<GridDomain, DesignError> {
    if geometry.vertices.len() < 2 {
        return Err(DesignError::EmptyGeometry);
    }
    let m = steps_per_width(h, geometry.width)?;
    let snapped = snap_geometry(geometry, h)?;
    let offset = if m % 2 == 1 { 0.5 * h } else { 0.0 };
    let bounds = snapped.bounds();
    let lattice = |v: f64| ((v - offset) / h).round() as i64;
    let (a0, a1) = (lattice(bounds.x0), lattice(bounds.x1));
    let (b0, b1) = (lattice(bounds.y0), lattice(bounds.y1));
    let (cells_x, cells_y) = ((a1 - a0) as usize, (b1 - b0) as usize);
    let mut covered = vec![false; cells_x * cells_y];
    for r in snapped.pieces() {
        let (i0, i1) = ((lattice(r.x0) - a0) as usize, (lattice(r.x1) - a0) as usize);
        let (j0, j1) = ((lattice(r.y0) - b0) as usize, (lattice(r.y1) - b0) as usize);
        for j in j0..j1 {
            covered[j * cells_x + i0..j * cells_x + i1].fill(true);
        }
    }
    let (cols, rows) = (cells_x - 1, cells_y - 1);
    let mut mask = vec![false; cols * rows];
    for j in 0..rows {
        for i in 0..cols {
            let cell = |a: usize, b: usize| covered[b * cells_x + a];
            mask[j * cols + i] = cell(i, j) && cell(i + 1, j) && cell(i, j + 1) && cell(i + 1, j + 1);
        }
    }
    let origin = [offset + (a0 + 1) as f64 * h, offset + (b0 + 1) as f64 * h];
    Ok(GridDomain::new(mask, cols, rows, h, geometry.width, origin)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helmholtz::FdError;
    use crate::waveguide::Turn;

    fn brute_force_count(g: &GuideGeometry, h: f64) -> usize {
        // nodes with a small disc inside the union of the open pieces
        let pieces = g.pieces();
        let b = g.bounds();
        let eps = 0.25 * h;
        let inside = |x: f64, y: f64| pieces.iter().any(|r| r.contains(x, y));
        let mut count = 0;
        let (nx, ny) = (((b.x1 - b.x0) / h).round() as i64, ((b.y1 - b.y0) / h).round() as i64);
        for j in 1..ny {
            for i in 1..nx {
                let (x, y) = (b.x0 + i as f64 * h, b.y0 + j as f64 * h);
                if [(-eps, -eps), (eps, -eps), (-eps, eps), (eps, eps)].iter().all(|(dx, dy)| inside(x + dx, y + dy)) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn single_corner_is_union_of_two_strips() {
        // arms reach 2L past the corner square
        let g = GuideGeometry::trace(&[], &[Turn::Left], 1.0, 2.5).unwrap();
        let d = rasterize_mask(&g, 0.125).unwrap();
        assert_eq!(d.unknowns(), 2 * (16 * 7) + 7 * 7);
        assert_eq!(d.unknowns(), brute_force_count(&g, 0.125));
    }

    #[test]
    fn odd_steps_offset_the_lattice() {
        let g = GuideGeometry::trace(&[3.0], &[Turn::Left, Turn::Right], 1.0, 2.0).unwrap();
        let h = 1.0 / 9.0;
        let d = rasterize_mask(&g, h).unwrap();
        assert_eq!(d.unknowns(), brute_force_count(&snap_geometry(&g, h).unwrap(), h));
        // centerline at y = 0 falls between node rows
        let y0 = d.position(0)[1];
        assert!(((y0 / h) - (y0 / h).floor() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn u_and_s_counts_match_brute_force() {
        for turns in [[Turn::Left, Turn::Left], [Turn::Left, Turn::Right]] {
            let g = GuideGeometry::trace(&[2.5], &turns, 1.0, 8.0).unwrap();
            let d = rasterize_mask(&g, 0.1).unwrap();
            assert_eq!(d.unknowns(), brute_force_count(&g, 0.1));
        }
    }

    #[test]
    fn snapping_rounds_segments() {
        let g = GuideGeometry::trace(&[1.26, 2.04], &[Turn::Left, Turn::Right, Turn::Left], 1.0, 8.0).unwrap();
        let s = snap_geometry(&g, 0.125).unwrap();
        assert_eq!(s.segments, vec![1.25, 2.0]);
    }

    #[test]
    fn rejects_empty_and_coarse() {
        let mut g = GuideGeometry::trace(&[], &[Turn::Left], 1.0, 2.0).unwrap();
        assert!(matches!(
            rasterize_mask(&g, 0.25),
            Err(DesignError::Fd(FdError::ResolutionTooCoarse { steps: 4 }))
        ));
        g.vertices.clear();
        assert!(matches!(rasterize_mask(&g, 0.125), Err(DesignError::EmptyGeometry)));
    }
}
