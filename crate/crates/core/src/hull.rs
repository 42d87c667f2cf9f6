//! Convex hulls of pixel sets and their rasterization.
//!
//! Pixel `(row, col)` is treated as the lattice point `(x, y) = (col, row)`.
//! A rasterized hull is the set of grid pixels whose centers lie inside or on
//! the hull polygon, evaluated with exact integer arithmetic.

use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Lattice point `(x, y)`.
pub type Point = (i64, i64);

fn cross(o: Point, a: Point, b: Point) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain. Returns hull vertices with positive turns and no
/// collinear points; collinear input collapses to its two endpoints.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Hull vertices of a set of `(row, col)` pixels.
pub fn pixel_hull(pixels: &[(usize, usize)]) -> Vec<Point> {
    let pts: Vec<Point> = pixels.iter().map(|&(r, c)| (c as i64, r as i64)).collect();
    convex_hull(&pts)
}

/// Column span `[lo, hi]` of lattice points on row `y` that lie inside `hull`,
/// or `None` if the row misses it.
fn row_span(hull: &[Point], y: i64) -> Option<(i64, i64)> {
    let (mut lo, mut hi) = hull
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let n = hull.len();
    if n >= 2 {
        for i in 0..n {
            let a = hull[i];
            let b = hull[(i + 1) % n];
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            // dx * (y - a.y) - dy * (x - a.x) >= 0
            let k = dx * (y - a.1) + dy * a.0;
            if dy == 0 {
                if k < 0 {
                    return None;
                }
            } else if dy > 0 {
                hi = hi.min(k.div_euclid(dy));
            } else {
                let m = -dy;
                lo = lo.max(-(k.div_euclid(m)));
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

fn hull_rows(hull: &[Point], height: usize) -> std::ops::RangeInclusive<i64> {
    let ymin = hull.iter().map(|p| p.1).min().unwrap_or(0).max(0);
    let ymax = hull
        .iter()
        .map(|p| p.1)
        .max()
        .unwrap_or(-1)
        .min(height as i64 - 1);
    ymin..=ymax
}

/// Rasterize hull vertices onto a `width x height` grid.
pub fn rasterize_hull(hull: &[Point], width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::empty(width, height);
    if hull.is_empty() {
        return mask;
    }
    for y in hull_rows(hull, height) {
        if let Some((lo, hi)) = row_span(hull, y) {
            let lo = lo.max(0);
            let hi = hi.min(width as i64 - 1);
            for x in lo..=hi {
                mask.set(y as usize, x as usize, true);
            }
        }
    }
    mask
}

/// Pixel count of a rasterized hull, without materialising the mask.
pub fn hull_pixel_count(hull: &[Point], width: usize, height: usize) -> usize {
    if hull.is_empty() {
        return 0;
    }
    hull_rows(hull, height)
        .filter_map(|y| row_span(hull, y))
        .map(|(lo, hi)| {
            let lo = lo.max(0);
            let hi = hi.min(width as i64 - 1);
            if hi >= lo {
                (hi - lo + 1) as usize
            } else {
                0
            }
        })
        .sum()
}

/// Rasterized convex hull of a pixel set.
pub fn convex_hull_mask(pixels: &[(usize, usize)], width: usize, height: usize) -> Result<BinaryMask> {
    if pixels.is_empty() {
        return Err(Error::InvalidInput("convex hull of an empty pixel set".into()));
    }
    Ok(rasterize_hull(&pixel_hull(pixels), width, height))
}

/// Rasterize a convex polygon given in continuous image coordinates, where
/// pixel `(row, col)` covers `[col, col+1) x [row, row+1)`. A pixel is set when
/// its center lies inside or on the polygon.
pub fn rasterize_convex_polygon(vertices: &[(f64, f64)], width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::empty(width, height);
    let n = vertices.len();
    if n < 3 {
        return mask;
    }
    let area2: f64 = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    let sign = if area2 >= 0.0 { 1.0 } else { -1.0 };
    const EPS: f64 = 1e-9;
    let ymin = vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let ymax = vertices.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let xmin = vertices.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let xmax = vertices.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let row_lo = ((ymin - 0.5).ceil().max(0.0)) as usize;
    let row_hi = ((ymax - 0.5).floor()).min(height as f64 - 1.0);
    if row_hi < 0.0 {
        return mask;
    }
    for row in row_lo..=row_hi as usize {
        let yc = row as f64 + 0.5;
        let (mut lo, mut hi) = (xmin, xmax);
        let mut empty = false;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let (dx, dy) = ((b.0 - a.0) * sign, (b.1 - a.1) * sign);
            // dx * (yc - a.y) - dy * (x - a.x) >= 0
            let k = dx * (yc - a.1) + dy * a.0;
            if dy.abs() < 1e-12 {
                if k < -EPS {
                    empty = true;
                    break;
                }
            } else if dy > 0.0 {
                hi = hi.min(k / dy + EPS);
            } else {
                lo = lo.max(k / dy - EPS);
            }
        }
        if empty {
            continue;
        }
        let c_lo = (lo - 0.5).ceil().max(0.0);
        let c_hi = (hi - 0.5).floor().min(width as f64 - 1.0);
        if c_hi < c_lo {
            continue;
        }
        for col in c_lo as usize..=c_hi as usize {
            mask.set(row, col, true);
        }
    }
    mask
}
