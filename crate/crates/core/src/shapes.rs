//! Initial geometry generators: rectangle/ellipse/flower/astroid curves and
//! cuboid/sphere surfaces at the resolutions used by the experiments.

use std::collections::HashMap;

use crate::curve2d::PolygonalCurve;
use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::surface3d::TriSurface;
use crate::vec::{Vec2, Vec3};

/// Shape selection plus resolution, as read from experiment configs.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeSpec {
    Rectangle { length: f64, width: f64, n: usize },
    Ellipse { a: f64, b: f64, n: usize },
    Flower { n: usize },
    Astroid { n: usize },
    Cuboid { lx: f64, ly: f64, lz: f64, level: usize },
    Sphere { radius: f64, level: usize },
}

impl ShapeSpec {
    pub fn dimension(&self) -> usize {
        match self {
            ShapeSpec::Rectangle { .. }
            | ShapeSpec::Ellipse { .. }
            | ShapeSpec::Flower { .. }
            | ShapeSpec::Astroid { .. } => 2,
            ShapeSpec::Cuboid { .. } | ShapeSpec::Sphere { .. } => 3,
        }
    }

    /// Same shape with the resolution raised by `extra` halvings of the mesh
    /// size (curve vertex counts double, surface refinement levels step up).
    pub fn refined(&self, extra: usize) -> Self {
        let f = 1usize << extra;
        match *self {
            ShapeSpec::Rectangle { length, width, n } => {
                ShapeSpec::Rectangle { length, width, n: n * f }
            }
            ShapeSpec::Ellipse { a, b, n } => ShapeSpec::Ellipse { a, b, n: n * f },
            ShapeSpec::Flower { n } => ShapeSpec::Flower { n: n * f },
            ShapeSpec::Astroid { n } => ShapeSpec::Astroid { n: n * f },
            ShapeSpec::Cuboid { lx, ly, lz, level } => {
                ShapeSpec::Cuboid { lx, ly, lz, level: level + extra }
            }
            ShapeSpec::Sphere { radius, level } => {
                ShapeSpec::Sphere { radius, level: level + extra }
            }
        }
    }

    pub fn build_curve<S: Scalar>(&self) -> Result<PolygonalCurve<S>> {
        match *self {
            ShapeSpec::Rectangle { length, width, n } => rectangle_curve(length, width, n),
            ShapeSpec::Ellipse { a, b, n } => ellipse_curve(a, b, n),
            ShapeSpec::Flower { n } => flower_curve(n),
            ShapeSpec::Astroid { n } => astroid_curve(n),
            _ => Err(Error::InvalidParameter(format!("{self:?} is not a curve shape"))),
        }
    }

    pub fn build_surface<S: Scalar>(&self) -> Result<TriSurface<S>> {
        match *self {
            ShapeSpec::Cuboid { lx, ly, lz, level } => cuboid_surface(lx, ly, lz, level),
            ShapeSpec::Sphere { radius, level } => sphere_surface(radius, level),
            _ => Err(Error::InvalidParameter(format!("{self:?} is not a surface shape"))),
        }
    }

    /// Mesh size `h`: `1/N` for curves, `max_j sqrt(|sigma_j|)` of the built
    /// mesh for surfaces.
    pub fn mesh_size(&self) -> Result<f64> {
        match *self {
            ShapeSpec::Rectangle { n, .. }
            | ShapeSpec::Ellipse { n, .. }
            | ShapeSpec::Flower { n }
            | ShapeSpec::Astroid { n } => Ok(1.0 / n as f64),
            _ => {
                let s = self.build_surface::<f64>()?;
                let h = (0..s.num_triangles())
                    .map(|j| s.triangle_area(j).sqrt())
                    .fold(0.0f64, f64::max);
                Ok(h)
            }
        }
    }
}

/// Closed rectangle boundary with `n` vertices; the four corners are always
/// vertices and the remaining `n - 4` are spread over the sides
/// proportionally to side length (largest-remainder rounding).
pub fn rectangle_curve<S: Scalar>(length: f64, width: f64, n: usize) -> Result<PolygonalCurve<S>> {
    if length <= 0.0 || width <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rectangle needs positive sides, got {length} x {width}"
        )));
    }
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "rectangle needs n >= 4 to include the corners, got {n}"
        )));
    }
    let sides = [length, width, length, width];
    let perimeter: f64 = sides.iter().sum();
    let extra = n - 4;
    let ideal: Vec<f64> = sides.iter().map(|s| extra as f64 * s / perimeter).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|v| v.floor() as usize).collect();
    let mut leftover = extra - counts.iter().sum::<usize>();
    let mut by_fraction: Vec<usize> = (0..4).collect();
    by_fraction.sort_by(|&i, &j| {
        (ideal[j] - ideal[j].floor())
            .partial_cmp(&(ideal[i] - ideal[i].floor()))
            .unwrap()
            .then(i.cmp(&j))
    });
    for &i in &by_fraction {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }

    let hl = length / 2.0;
    let hw = width / 2.0;
    let corners = [
        Vec2::new(-hl, -hw),
        Vec2::new(hl, -hw),
        Vec2::new(hl, hw),
        Vec2::new(-hl, hw),
    ];
    let mut pts: Vec<Vec2<S>> = Vec::with_capacity(n);
    for side in 0..4 {
        let from = corners[side];
        let to = corners[(side + 1) % 4];
        let segments = counts[side] + 1;
        for k in 0..segments {
            let t = k as f64 / segments as f64;
            let p = from + (to - from) * t;
            pts.push(Vec2::new(real::<S>(p.x), real::<S>(p.y)));
        }
    }
    PolygonalCurve::new(pts)
}

fn polar_curve<S: Scalar>(n: usize, point: impl Fn(f64) -> (f64, f64)) -> Result<PolygonalCurve<S>> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "polar curve sampling needs n >= 8, got {n}"
        )));
    }
    let pts = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let (x, y) = point(theta);
            Vec2::new(real::<S>(x), real::<S>(y))
        })
        .collect();
    PolygonalCurve::new(pts)
}

/// Ellipse `x^2/a^2 + y^2/b^2 = 1` sampled uniformly in the polar angle.
pub fn ellipse_curve<S: Scalar>(a: f64, b: f64, n: usize) -> Result<PolygonalCurve<S>> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "ellipse needs positive semi-axes, got {a}, {b}"
        )));
    }
    polar_curve(n, |t| (a * t.cos(), b * t.sin()))
}

/// Six-petal flower `r(theta) = 2 + cos(6 theta)`, uniform in `theta`.
pub fn flower_curve<S: Scalar>(n: usize) -> Result<PolygonalCurve<S>> {
    polar_curve(n, |t| {
        let r = 2.0 + (6.0 * t).cos();
        (r * t.cos(), r * t.sin())
    })
}

/// Four-cusp astroid `(3/4)(3 cos t + cos 3t, 3 sin t - sin 3t)`, uniform in
/// `theta`.
pub fn astroid_curve<S: Scalar>(n: usize) -> Result<PolygonalCurve<S>> {
    polar_curve(n, |t| {
        (
            0.75 * (3.0 * t.cos() + (3.0 * t).cos()),
            0.75 * (3.0 * t.sin() - (3.0 * t).sin()),
        )
    })
}

/// Axis-aligned cuboid surface centered at the origin.
///
/// Each face is gridded into cells of target size 1/2, every cell is split
/// into four triangles through its center, and the whole mesh is then
/// uniformly refined `level` times (edge midpoints; flat faces stay exact).
/// For the `(4,1,1)` cuboid this reproduces the vertex/triangle counts
/// `(146, 288) -> (578, 1152) -> (2306, 4608) -> (9218, 18432)`.
pub fn cuboid_surface<S: Scalar>(lx: f64, ly: f64, lz: f64, level: usize) -> Result<TriSurface<S>> {
    if lx <= 0.0 || ly <= 0.0 || lz <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "cuboid needs positive dimensions, got ({lx}, {ly}, {lz})"
        )));
    }
    let cells = |l: f64| ((2.0 * l).round() as usize).max(1);
    let (nx, ny, nz) = (cells(lx), cells(ly), cells(lz));

    // Vertices live on a half-integer lattice (doubled indices), so corners
    // have even and face centers odd coordinates.
    let mut lookup: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut vertices: Vec<Vec3<f64>> = Vec::new();
    let step = (lx / nx as f64, ly / ny as f64, lz / nz as f64);
    let mut vertex_at = |key: (i64, i64, i64)| -> usize {
        if let Some(&id) = lookup.get(&key) {
            return id;
        }
        let id = vertices.len();
        lookup.insert(key, id);
        vertices.push(Vec3::new(
            -lx / 2.0 + key.0 as f64 * step.0 / 2.0,
            -ly / 2.0 + key.1 as f64 * step.1 / 2.0,
            -lz / 2.0 + key.2 as f64 * step.2 / 2.0,
        ));
        id
    };

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // Each face: (fixed axis, fixed doubled-coordinate, u axis, v axis,
    // whether (u, v, normal) is right-handed).
    let faces: [(usize, i64, usize, usize, bool); 6] = [
        (2, 0, 0, 1, false),                 // z = -lz/2, outward -z
        (2, 2 * nz as i64, 0, 1, true),      // z = +lz/2, outward +z
        (1, 0, 0, 2, true),                  // y = -ly/2, outward -y
        (1, 2 * ny as i64, 0, 2, false),     // y = +ly/2, outward +y
        (0, 0, 1, 2, false),                 // x = -lx/2, outward -x
        (0, 2 * nx as i64, 1, 2, true),      // x = +lx/2, outward +x
    ];
    let counts = [nx, ny, nz];
    for (axis, fixed, ua, va, flip) in faces {
        for iu in 0..counts[ua] {
            for iv in 0..counts[va] {
                let mut key = [0i64; 3];
                key[axis] = fixed;
                let mut at = |du: i64, dv: i64| {
                    let mut k = key;
                    k[ua] = 2 * iu as i64 + du;
                    k[va] = 2 * iv as i64 + dv;
                    vertex_at((k[0], k[1], k[2]))
                };
                // Cell corners anticlockwise in (u, v), center in the middle.
                let c00 = at(0, 0);
                let c10 = at(2, 0);
                let c11 = at(2, 2);
                let c01 = at(0, 2);
                let mid = at(1, 1);
                let quads = if flip {
                    [[c00, c10, mid], [c10, c11, mid], [c11, c01, mid], [c01, c00, mid]]
                } else {
                    [[c10, c00, mid], [c00, c01, mid], [c01, c11, mid], [c11, c10, mid]]
                };
                triangles.extend_from_slice(&quads);
            }
        }
    }

    for _ in 0..level {
        let (v, t) = refine_midpoint(&vertices, &triangles, |p| p);
        vertices = v;
        triangles = t;
    }

    let vertices = vertices
        .into_iter()
        .map(|v| Vec3::new(real::<S>(v.x), real::<S>(v.y), real::<S>(v.z)))
        .collect();
    TriSurface::new(vertices, triangles)
}

/// Icosahedron refined `level` times with all vertices projected onto the
/// sphere of radius `radius`, outward oriented.
pub fn sphere_surface<S: Scalar>(radius: f64, level: usize) -> Result<TriSurface<S>> {
    if radius <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sphere needs a positive radius, got {radius}"
        )));
    }
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let project = |v: Vec3<f64>| v * (radius / v.norm());
    let mut vertices: Vec<Vec3<f64>> = raw
        .iter()
        .map(|&(x, y, z)| project(Vec3::new(x, y, z)))
        .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let (v, t) = refine_midpoint(&vertices, &triangles, project);
        vertices = v;
        triangles = t;
    }
    let vertices = vertices
        .into_iter()
        .map(|v| Vec3::new(real::<S>(v.x), real::<S>(v.y), real::<S>(v.z)))
        .collect();
    TriSurface::new(vertices, triangles)
}

/// One uniform 1-to-4 refinement; `post` adjusts newly created midpoints
/// (identity for flat geometry, projection for spheres).
fn refine_midpoint(
    vertices: &[Vec3<f64>],
    triangles: &[[usize; 3]],
    post: impl Fn(Vec3<f64>) -> Vec3<f64>,
) -> (Vec<Vec3<f64>>, Vec<[usize; 3]>) {
    let mut vertices = vertices.to_vec();
    let mut midpoint_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triangles_out = Vec::with_capacity(4 * triangles.len());
    for tri in triangles {
        let mut mid = [0usize; 3];
        for e in 0..3 {
            let a = tri[e];
            let b = tri[(e + 1) % 3];
            let key = (a.min(b), a.max(b));
            mid[e] = *midpoint_of.entry(key).or_insert_with(|| {
                let p = post((vertices[a] + vertices[b]) * 0.5);
                vertices.push(p);
                vertices.len() - 1
            });
        }
        triangles_out.push([tri[0], mid[0], mid[2]]);
        triangles_out.push([tri[1], mid[1], mid[0]]);
        triangles_out.push([tri[2], mid[2], mid[1]]);
        triangles_out.push([mid[0], mid[1], mid[2]]);
    }
    (vertices, triangles_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_from_rectangle() {
        let c = rectangle_curve::<f64>(1.0, 1.0, 4).unwrap();
        assert_eq!(c.num_vertices(), 4);
        for len in c.edge_lengths() {
            assert!((len - 1.0).abs() <= 1e-15);
        }
        assert!((c.enclosed_area() - 1.0).abs() <= 1e-15);
        assert!(rectangle_curve::<f64>(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn rectangle_area_is_exact_and_edges_near_uniform() {
        let c = rectangle_curve::<f64>(5.6, 0.8, 32).unwrap();
        assert_eq!(c.num_vertices(), 32);
        assert!((c.enclosed_area() - 5.6 * 0.8).abs() <= 1e-12);
        assert!((c.perimeter() - 12.8).abs() <= 1e-12);
        let max_edge = c.edge_lengths().into_iter().fold(0.0f64, f64::max);
        // Uniform target spacing plus the corner-rounding adjustment.
        assert!(max_edge <= 12.8 / 32.0 * 1.25);
        // Corners are vertices.
        for corner in [(-2.8, -0.4), (2.8, -0.4), (2.8, 0.4), (-2.8, 0.4)] {
            assert!(
                c.vertices()
                    .iter()
                    .any(|v| (v.x - corner.0).abs() < 1e-15 && (v.y - corner.1).abs() < 1e-15),
                "missing corner {corner:?}"
            );
        }
    }

    #[test]
    fn circle_from_ellipse_is_regular_ngon() {
        let c = ellipse_curve::<f64>(1.0, 1.0, 16).unwrap();
        assert!((c.mesh_ratio() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn flower_and_astroid_anchor_points() {
        let f = flower_curve::<f64>(512).unwrap();
        assert!((f.vertex(0).x - 3.0).abs() <= 1e-15);
        assert!(f.vertex(0).y.abs() <= 1e-15);
        let a = astroid_curve::<f64>(512).unwrap();
        // theta = pi/2 is vertex 128 of 512.
        let v = a.vertex(128);
        assert!(v.x.abs() <= 1e-12);
        assert!((v.y - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn cuboid_reproduces_reference_mesh_counts() {
        let cases = [
            ((4.0, 1.0, 1.0, 0), (146, 288)),
            ((4.0, 1.0, 1.0, 1), (578, 1152)),
            ((4.0, 1.0, 1.0, 2), (2306, 4608)),
            ((8.0, 1.0, 1.0, 1), (1090, 2176)),
            ((16.0, 1.0, 1.0, 1), (2114, 4224)),
        ];
        for ((lx, ly, lz, level), (k, j)) in cases {
            let s = cuboid_surface::<f64>(lx, ly, lz, level).unwrap();
            assert_eq!((s.num_vertices(), s.num_triangles()), (k, j), "({lx},{ly},{lz}) level {level}");
            assert!(!s.was_reoriented());
            assert!((s.enclosed_volume() - lx * ly * lz).abs() <= 1e-12 * lx * ly * lz);
            assert!(
                (s.surface_area() - 2.0 * (lx * ly + ly * lz + lz * lx)).abs() <= 1e-11
            );
        }
    }

    #[test]
    fn cuboid_mesh_size_matches_reference() {
        for (level, h) in [(0, 0.25), (1, 0.125), (2, 0.0625)] {
            let spec = ShapeSpec::Cuboid { lx: 4.0, ly: 1.0, lz: 1.0, level };
            assert!((spec.mesh_size().unwrap() - h).abs() <= 1e-12, "level {level}");
        }
    }

    #[test]
    fn sphere_levels() {
        let s0 = sphere_surface::<f64>(1.0, 0).unwrap();
        assert_eq!((s0.num_vertices(), s0.num_triangles()), (12, 20));
        assert!(!s0.was_reoriented());
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        let mut last = 0.0;
        for level in 0..5 {
            let s = sphere_surface::<f64>(1.0, level).unwrap();
            let v = s.enclosed_volume();
            assert!(v > last && v < exact, "level {level}: {v}");
            last = v;
        }
        assert!(exact - last < 0.01);
        // Face normals are close to radial.
        let s = sphere_surface::<f64>(2.0, 2).unwrap();
        let normals = s.outward_normals();
        for j in 0..s.num_triangles() {
            let [a, b, c] = s.corners(j);
            let centroid = (a + b + c) / 3.0;
            let radial = centroid / centroid.norm();
            assert!(normals[j].dot(radial) > 0.99, "triangle {j}");
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = flower_curve::<f64>(256).unwrap();
        let b = flower_curve::<f64>(256).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let s1 = cuboid_surface::<f64>(4.0, 1.0, 1.0, 1).unwrap();
        let s2 = cuboid_surface::<f64>(4.0, 1.0, 1.0, 1).unwrap();
        assert_eq!(s1.vertices(), s2.vertices());
        assert_eq!(s1.triangles(), s2.triangles());
    }

    #[test]
    fn refined_spec_halves_mesh_size() {
        let spec = ShapeSpec::Ellipse { a: 2.8, b: 0.4, n: 32 };
        assert_eq!(spec.mesh_size().unwrap(), 1.0 / 32.0);
        assert_eq!(spec.refined(1).mesh_size().unwrap(), 1.0 / 64.0);
        let spec = ShapeSpec::Cuboid { lx: 4.0, ly: 1.0, lz: 1.0, level: 0 };
        let h0 = spec.mesh_size().unwrap();
        let h1 = spec.refined(1).mesh_size().unwrap();
        assert!((h1 - h0 / 2.0).abs() <= 1e-12);
    }
}
