//! Tweezer trajectories.
//!
//! Corridor paths leave the source diagonally to a cell corner, run along
//! the half-pitch corridors between rows and columns, and enter the
//! destination from a corner, so they never pass over another site centre.
//! Parabolic paths are a single arc from source to destination with a
//! sideways bulge, which can pass close to sites lying near the chord.

use serde::{Deserialize, Serialize};

use super::ArrayGeometry;

pub type Point = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum TrajectoryMode {
    #[default]
    Corridor,
    Parabolic {
        /// Apex offset of the arc from the chord, in units of the pitch.
        apex: f64,
    },
}

impl TrajectoryMode {
    /// Parabolic mode with the default apex offset.
    pub fn parabolic() -> Self {
        TrajectoryMode::Parabolic { apex: DEFAULT_PARABOLIC_APEX }
    }
}

/// Default arc apex offset (fraction of the pitch).
pub const DEFAULT_PARABOLIC_APEX: f64 = 0.215;
const ARC_SEGMENTS: usize = 32;

fn sign_or(v: f64, default: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        default
    }
}

fn push_distinct(path: &mut Vec<Point>, p: Point) {
    if path.last().is_none_or(|q| (q.0 - p.0).abs() > 1e-12 || (q.1 - p.1).abs() > 1e-12) {
        path.push(p);
    }
}

/// Corridor path between two points that are site centres or parking
/// positions on the corridor grid.
pub fn corridor_path(geometry: &ArrayGeometry, from: Point, to: Point) -> Vec<Point> {
    let h = 0.5 * geometry.pitch;
    let sx = sign_or(to.0 - from.0, 1.0);
    let sy = sign_or(to.1 - from.1, 1.0);
    let a = (from.0 + sx * h, from.1 + sy * h);
    // corner of the destination cell facing the source; same-column or
    // same-row moves reuse the source's corridor
    let bx = if to.0 == from.0 { a.0 } else { to.0 - sx * h };
    let by = if to.1 == from.1 { a.1 } else { to.1 - sy * h };
    let mut path = vec![from];
    push_distinct(&mut path, a);
    push_distinct(&mut path, (bx, a.1));
    push_distinct(&mut path, (bx, by));
    push_distinct(&mut path, to);
    path
}

/// Arc from `from` to `to` bulging to the left of the travel direction by
/// `apex·pitch` at its midpoint.
pub fn parabolic_path(geometry: &ArrayGeometry, from: Point, to: Point, apex: f64) -> Vec<Point> {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return vec![from];
    }
    let (nx, ny) = (-dy / len, dx / len);
    let b = apex * geometry.pitch;
    (0..=ARC_SEGMENTS)
        .map(|i| {
            let t = i as f64 / ARC_SEGMENTS as f64;
            let off = 4.0 * b * t * (1.0 - t);
            (from.0 + t * dx + off * nx, from.1 + t * dy + off * ny)
        })
        .collect()
}

/// Off-grid parking point for atoms ejected from `site`: one pitch beyond
/// the nearest array edge, on the corridor-aligned line through the site.
pub fn parking_position(geometry: &ArrayGeometry, site: usize) -> Point {
    let (r, c) = geometry.row_col(site);
    let p = geometry.pitch;
    let (x, y) = geometry.position(site);
    let candidates = [
        (c, (-p, y)),
        (geometry.cols - 1 - c, (geometry.cols as f64 * p, y)),
        (r, (x, -p)),
        (geometry.rows - 1 - r, (x, geometry.rows as f64 * p)),
    ];
    candidates.iter().min_by_key(|(d, _)| *d).map(|(_, pt)| *pt).expect("four candidates")
}

/// Distance from point `p` to segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 { (((p.0 - a.0) * abx + (p.1 - a.1) * aby) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (qx, qy) = (a.0 + t * abx, a.1 + t * aby);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

pub fn path_distance(p: Point, path: &[Point]) -> f64 {
    match path.len() {
        0 => f64::INFINITY,
        1 => ((p.0 - path[0].0).powi(2) + (p.1 - path[0].1).powi(2)).sqrt(),
        _ => path.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_corridor(g: &ArrayGeometry, p: Point) -> bool {
        let on = |v: f64| {
            let k = v / g.pitch - 0.5;
            (k - k.round()).abs() < 1e-9
        };
        on(p.0) || on(p.1)
    }

    #[test]
    fn corridor_waypoints() {
        let g = ArrayGeometry::new(6, 6, 5.0).unwrap();
        for (s, d) in [(0, 35), (14, 2), (7, 31), (8, 9), (3, 33)] {
            let path = corridor_path(&g, g.position(s), g.position(d));
            assert_eq!(path[0], g.position(s));
            assert_eq!(*path.last().unwrap(), g.position(d));
            for p in &path[1..path.len() - 1] {
                assert!(on_corridor(&g, *p), "{p:?}");
            }
            for site in 0..g.n_sites() {
                if site != s && site != d {
                    assert!(path_distance(g.position(site), &path) > 1e-9);
                }
            }
        }
    }

    #[test]
    fn arc_ends_and_apex() {
        let g = ArrayGeometry::new(3, 3, 5.0).unwrap();
        let path = parabolic_path(&g, (0.0, 0.0), (10.0, 0.0), 0.3);
        assert_eq!(path[0], (0.0, 0.0));
        let end = path.last().unwrap();
        assert!((end.0 - 10.0).abs() < 1e-12 && end.1.abs() < 1e-12);
        assert!((path[ARC_SEGMENTS / 2].1 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn parking_is_off_grid() {
        let g = ArrayGeometry::new(4, 5, 5.0).unwrap();
        for s in 0..g.n_sites() {
            let (x, y) = parking_position(&g, s);
            assert!(x < 0.0 || y < 0.0 || x > 4.0 * 5.0 || y > 3.0 * 5.0);
        }
    }
}
