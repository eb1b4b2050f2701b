//! Convex hull volumes in the plane and in space.

use serde::Serialize;

use crate::geometry::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HullVolume {
    pub volume: f64,
    /// Number of hull vertices (2D) or facets (3D).
    pub size: usize,
    /// The points do not span a full-dimensional hull.
    pub degenerate: bool,
}

impl HullVolume {
    fn degenerate() -> Self {
        Self {
            volume: 0.0,
            size: 0,
            degenerate: true,
        }
    }
}

/// Hull volume of points in ℝ² (`z` ignored) or ℝ³.
pub fn hull_volume(points: &[Vec3], dim: usize) -> HullVolume {
    match dim {
        2 => hull_area_2d(points),
        3 => hull_volume_3d(points),
        _ => HullVolume::degenerate(),
    }
}

fn cross2(o: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain followed by the shoelace formula.
pub fn hull_area_2d(points: &[Vec3]) -> HullVolume {
    if points.len() < 3 {
        return HullVolume::degenerate();
    }
    let mut pts: Vec<Vec3> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut hull: Vec<Vec3> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross2(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross2(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() < 3 {
        return HullVolume::degenerate();
    }
    let mut twice = 0.0;
    for i in 0..hull.len() {
        let (a, b) = (&hull[i], &hull[(i + 1) % hull.len()]);
        twice += a.x * b.y - a.y * b.x;
    }
    HullVolume {
        volume: 0.5 * twice,
        size: hull.len(),
        degenerate: twice <= 0.0,
    }
}

fn orient(a: &Vec3, b: &Vec3, c: &Vec3, p: &Vec3) -> f64 {
    (b - a).cross(&(c - a)).dot(&(p - a))
}

/// Incremental hull; `O(N F)` for `F` facets.
///
/// Facets are stored with outward normals `(b-a)×(c-a)`.
pub fn hull_volume_3d(points: &[Vec3]) -> HullVolume {
    if points.len() < 4 {
        return HullVolume::degenerate();
    }
    let p0 = points[0];
    let (i1, d1) = farthest(points, |p| (p - p0).norm());
    if d1 == 0.0 {
        return HullVolume::degenerate();
    }
    let scale = d1;
    let dir = (points[i1] - p0) / d1;
    let (i2, d2) = farthest(points, |p| {
        let v = p - p0;
        (v - dir * v.dot(&dir)).norm()
    });
    if d2 <= 1e-12 * scale {
        return HullVolume::degenerate();
    }
    let (i3, d3) = farthest(points, |p| orient(&p0, &points[i1], &points[i2], p).abs());
    let eps = 1e-13 * scale * scale * scale;
    if d3 <= eps {
        return HullVolume::degenerate();
    }
    let seed = [0, i1, i2, i3];
    let interior = (p0 + points[i1] + points[i2] + points[i3]) / 4.0;
    let mut faces: Vec<[usize; 3]> = [[0, i1, i2], [0, i1, i3], [0, i2, i3], [i1, i2, i3]]
        .into_iter()
        .map(|[a, b, c]| {
            if orient(&points[a], &points[b], &points[c], &interior) > 0.0 {
                [a, c, b]
            } else {
                [a, b, c]
            }
        })
        .collect();

    let mut visible = Vec::new();
    let mut edges = Vec::new();
    for (idx, p) in points.iter().enumerate() {
        if seed.contains(&idx) {
            continue;
        }
        visible.clear();
        visible.extend(faces.iter().map(|f| orient(&points[f[0]], &points[f[1]], &points[f[2]], p) > eps));
        if !visible.iter().any(|&v| v) {
            continue;
        }
        edges.clear();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            edges.extend([(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]);
        }
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        for &(a, b) in &edges {
            if !edges.contains(&(b, a)) {
                next.push([a, b, idx]);
            }
        }
        faces = next;
    }
    let volume: f64 = faces
        .iter()
        .map(|f| {
            let (a, b, c) = (points[f[0]] - interior, points[f[1]] - interior, points[f[2]] - interior);
            a.cross(&b).dot(&c) / 6.0
        })
        .sum();
    HullVolume {
        volume,
        size: faces.len(),
        degenerate: false,
    }
}

fn farthest<F: Fn(&Vec3) -> f64>(points: &[Vec3], f: F) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (i, f(p)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}
