//! Closed, consistently oriented triangulated surfaces: orientation vectors,
//! outward normals, area and enclosed volume, mass-lumped inner products and
//! piecewise constant surface gradients.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};
use crate::vec::{FieldValue, Vec3};

/// Relative guard on the orientation vector: `|J| < guard * mean area`
/// counts as degenerate (the surface gradient divides by `|J|`).
pub const TRIANGLE_GUARD_FACTOR: f64 = 1e-14;

/// Closed orientable triangulated surface of genus 0, triangles listed
/// anticlockwise seen from outside.
#[derive(Clone, Debug)]
pub struct TriSurface<S> {
    vertices: Vec<Vec3<S>>,
    triangles: Vec<[usize; 3]>,
    /// Triangles incident to each vertex, ascending.
    incident: Vec<Vec<usize>>,
    num_edges: usize,
    was_reoriented: bool,
}

impl<S: Scalar> TriSurface<S> {
    /// Validates closedness, consistent orientation, the degeneracy guard and
    /// the Euler relation. A surface handed in with inward orientation
    /// (negative volume) is flipped and flagged via [`Self::was_reoriented`].
    pub fn new(vertices: Vec<Vec3<S>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let k = vertices.len();
        for tri in &triangles {
            for &i in tri {
                if i >= k {
                    return Err(Error::VertexIndexOutOfRange { index: i, vertices: k });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::BadTopology(format!(
                    "triangle with repeated vertex: {tri:?}"
                )));
            }
        }

        // Each undirected edge must be traversed exactly once per direction.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                if directed.insert((a, b), t).is_some() {
                    return Err(Error::BadTopology(format!(
                        "directed edge ({a}, {b}) traversed twice"
                    )));
                }
            }
        }
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                return Err(Error::BadTopology(format!(
                    "edge ({a}, {b}) has no oppositely oriented partner"
                )));
            }
        }
        let num_edges = directed.len() / 2;
        let chi = k as isize - num_edges as isize + triangles.len() as isize;
        if chi != 2 {
            return Err(Error::UnsupportedGenus(chi));
        }

        let mut surface = Self {
            vertices,
            triangles,
            incident: Vec::new(),
            num_edges,
            was_reoriented: false,
        };
        let volume = surface.enclosed_volume();
        if volume == S::zero() || !volume.is_finite() {
            return Err(Error::ZeroVolume(volume.to_f64().unwrap_or(0.0)));
        }
        if volume < S::zero() {
            for tri in &mut surface.triangles {
                tri.swap(1, 2);
            }
            surface.was_reoriented = true;
        }
        surface.check_degeneracy()?;

        let mut incident = vec![Vec::new(); k];
        for (t, tri) in surface.triangles.iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        surface.incident = incident;
        Ok(surface)
    }

    /// Same topology, new vertex positions; used by the time stepping. Only
    /// the degeneracy and volume-sign invariants are re-checked.
    pub fn with_vertices(&self, vertices: Vec<Vec3<S>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::FieldSizeMismatch {
                expected: self.vertices.len(),
                found: vertices.len(),
            });
        }
        let moved = Self {
            vertices,
            triangles: self.triangles.clone(),
            incident: self.incident.clone(),
            num_edges: self.num_edges,
            was_reoriented: false,
        };
        moved.check_degeneracy()?;
        if moved.enclosed_volume() <= S::zero() {
            return Err(Error::MeshDegenerated(
                "vertex update flipped the surface inside out".into(),
            ));
        }
        Ok(moved)
    }

    fn check_degeneracy(&self) -> Result<()> {
        let mean_area = self.surface_area() / real::<S>(self.triangles.len() as f64);
        let guard = real::<S>(TRIANGLE_GUARD_FACTOR) * mean_area;
        for j in 0..self.triangles.len() {
            let jac = self.orientation_vector(j).norm();
            if !(jac > guard) {
                return Err(Error::DegenerateTriangle {
                    index: j,
                    jacobian: jac.to_f64().unwrap_or(0.0),
                    guard: guard.to_f64().unwrap_or(0.0),
                });
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn vertices(&self) -> &[Vec3<S>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, j: usize) -> [usize; 3] {
        self.triangles[j]
    }

    /// Triangles incident to vertex `v`, ascending.
    pub fn incident_triangles(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn was_reoriented(&self) -> bool {
        self.was_reoriented
    }

    pub fn corners(&self, j: usize) -> [Vec3<S>; 3] {
        let [a, b, c] = self.triangles[j];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Orientation vector `(q2 - q1) x (q3 - q1)`: twice the area times the
    /// outward unit normal.
    pub fn orientation_vector(&self, j: usize) -> Vec3<S> {
        let [a, b, c] = self.corners(j);
        (b - a).cross(c - a)
    }

    /// Outward unit normal per triangle.
    pub fn outward_normals(&self) -> Vec<Vec3<S>> {
        (0..self.triangles.len())
            .map(|j| {
                let v = self.orientation_vector(j);
                v / v.norm()
            })
            .collect()
    }

    pub fn triangle_area(&self, j: usize) -> S {
        real::<S>(0.5) * self.orientation_vector(j).norm()
    }

    /// Total surface area `W = sum_j |sigma_j|`.
    pub fn surface_area(&self) -> S {
        (0..self.triangles.len()).fold(S::zero(), |acc, j| acc + self.triangle_area(j))
    }

    /// Enclosed volume `V = 1/18 sum_j sum_k q_{j_k} . J{sigma_j}`; positive
    /// for outward orientation.
    pub fn enclosed_volume(&self) -> S {
        let mut acc = S::zero();
        for j in 0..self.triangles.len() {
            let jac = self.orientation_vector(j);
            let [a, b, c] = self.corners(j);
            acc += (a + b + c).dot(jac);
        }
        acc / real::<S>(18.0)
    }

    /// Gradients of the three nodal hat functions on triangle `j`; the
    /// surface gradient of a linear field is `sum_k f_k * d_k`.
    pub fn shape_gradients(&self, j: usize) -> [Vec3<S>; 3] {
        let jac = self.orientation_vector(j);
        let jlen = jac.norm();
        let n = jac / jlen;
        let [a, b, c] = self.corners(j);
        [
            (b - c).cross(n) / jlen,
            (c - a).cross(n) / jlen,
            (a - b).cross(n) / jlen,
        ]
    }

    /// Piecewise constant surface gradient of a nodal scalar field.
    pub fn surface_gradient(&self, f: &[S]) -> Result<Vec<Vec3<S>>> {
        if f.len() != self.vertices.len() {
            return Err(Error::FieldSizeMismatch {
                expected: self.vertices.len(),
                found: f.len(),
            });
        }
        Ok((0..self.triangles.len())
            .map(|j| {
                let d = self.shape_gradients(j);
                let [a, b, c] = self.triangles[j];
                d[0] * f[a] + d[1] * f[b] + d[2] * f[c]
            })
            .collect())
    }

    /// Writes the snapshot format: `SURF3D K J`, `K` vertex lines, `J`
    /// zero-based triangle lines.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "SURF3D {} {}", self.vertices.len(), self.triangles.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::SnapshotFormat("empty file".into()))??;
        let mut parts = header.split_whitespace();
        match parts.next() {
            Some("SURF3D") => {}
            other => {
                return Err(Error::SnapshotFormat(format!(
                    "expected SURF3D header, got {other:?}"
                )))
            }
        }
        let k: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad vertex count".into()))?;
        let j: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad triangle count".into()))?;
        let mut vertices = Vec::with_capacity(k);
        let mut triangles = Vec::with_capacity(j);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if vertices.len() < k {
                let mut toks = line.split_whitespace().map(|t| t.parse::<f64>());
                match (toks.next(), toks.next(), toks.next()) {
                    (Some(Ok(x)), Some(Ok(y)), Some(Ok(z))) => {
                        vertices.push(Vec3::new(real::<S>(x), real::<S>(y), real::<S>(z)));
                    }
                    _ => {
                        return Err(Error::SnapshotFormat(format!("bad vertex line: {line}")));
                    }
                }
            } else {
                let mut toks = line.split_whitespace().map(|t| t.parse::<usize>());
                match (toks.next(), toks.next(), toks.next()) {
                    (Some(Ok(a)), Some(Ok(b)), Some(Ok(c))) => triangles.push([a, b, c]),
                    _ => {
                        return Err(Error::SnapshotFormat(format!("bad triangle line: {line}")));
                    }
                }
            }
        }
        if vertices.len() != k || triangles.len() != j {
            return Err(Error::SnapshotFormat(format!(
                "header promised {k} vertices / {j} triangles, file has {} / {}",
                vertices.len(),
                triangles.len()
            )));
        }
        Self::new(vertices, triangles)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_snapshot(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_snapshot(std::io::BufReader::new(file))
    }
}

/// Operand of the 3D mass-lumped inner product: nodal (one value per vertex)
/// or piecewise constant (one value per triangle).
#[derive(Clone, Copy, Debug)]
pub enum SurfaceField<'a, T> {
    Nodal(&'a [T]),
    PerTriangle(&'a [T]),
}

impl<'a, T: Copy> SurfaceField<'a, T> {
    fn expected_len(&self, k: usize, j: usize) -> usize {
        match self {
            SurfaceField::Nodal(_) => k,
            SurfaceField::PerTriangle(_) => j,
        }
    }

    fn len(&self) -> usize {
        match self {
            SurfaceField::Nodal(v) | SurfaceField::PerTriangle(v) => v.len(),
        }
    }

    fn corner_value(&self, tri: &[usize; 3], j: usize, corner: usize) -> T {
        match self {
            SurfaceField::Nodal(v) => v[tri[corner]],
            SurfaceField::PerTriangle(v) => v[j],
        }
    }
}

/// Mass-lumped inner product over the surface:
/// `1/3 sum_j sum_k |sigma_j| f(q_{j_k}^-) . g(q_{j_k}^-)`.
pub fn lumped_inner_product_3d<S: Scalar, T: FieldValue<S>>(
    surface: &TriSurface<S>,
    f: SurfaceField<'_, T>,
    g: SurfaceField<'_, T>,
) -> Result<S> {
    let (k, j) = (surface.num_vertices(), surface.num_triangles());
    for field in [&f, &g] {
        if field.len() != field.expected_len(k, j) {
            return Err(Error::FieldSizeMismatch {
                expected: field.expected_len(k, j),
                found: field.len(),
            });
        }
    }
    let third = S::one() / real::<S>(3.0);
    let mut acc = S::zero();
    for t in 0..j {
        let tri = &surface.triangles()[t];
        let area = surface.triangle_area(t);
        let mut local = S::zero();
        for corner in 0..3 {
            local += f.corner_value(tri, t, corner).dot(g.corner_value(tri, t, corner));
        }
        acc += third * area * local;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tetrahedron() -> TriSurface<f64> {
        // Outward oriented unit corner tetrahedron.
        TriSurface::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap()
    }

    fn octahedron() -> TriSurface<f64> {
        let v = vec![
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, -1.0),
        ];
        let t = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        TriSurface::new(v, t).unwrap()
    }

    #[test]
    fn orientation_vector_basic() {
        let s = TriSurface::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.3, 0.3, 1.0),
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap();
        // Bottom face listed (0, 2, 1): J = (q2 - q0) x (q1 - q0) = (0,0,-1).
        assert_eq!(s.orientation_vector(0), Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn orientation_vector_cyclic_and_swap() {
        let a = Vec3::new(0.1_f64, -0.4, 0.2);
        let b = Vec3::new(1.3, 0.2, -0.7);
        let c = Vec3::new(-0.5, 0.9, 0.4);
        let jac = |p: Vec3<f64>, q: Vec3<f64>, r: Vec3<f64>| (q - p).cross(r - p);
        let j0 = jac(a, b, c);
        assert!((jac(b, c, a) - j0).norm() <= 1e-15);
        assert!((jac(c, a, b) - j0).norm() <= 1e-15);
        assert!((jac(a, c, b) + j0).norm() <= 1e-15);
    }

    #[test]
    fn cube_normals_are_axis_aligned() {
        let cube = shapes::cuboid_surface::<f64>(1.0, 1.0, 1.0, 0).unwrap();
        for (j, n) in cube.outward_normals().into_iter().enumerate() {
            let mx = n.x.abs().max(n.y.abs()).max(n.z.abs());
            assert!((mx - 1.0).abs() <= 1e-14, "triangle {j} normal {n:?}");
            assert!((n.norm() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn octahedron_normals_point_along_centroids() {
        let oct = octahedron();
        let normals = oct.outward_normals();
        for j in 0..oct.num_triangles() {
            let [a, b, c] = oct.corners(j);
            let centroid = (a + b + c) / 3.0;
            let dir = centroid / centroid.norm();
            assert!((normals[j] - dir).norm() <= 1e-14, "triangle {j}");
        }
    }

    #[test]
    fn areas_and_volumes() {
        let cube = shapes::cuboid_surface::<f64>(1.0, 1.0, 1.0, 0).unwrap();
        assert!((cube.surface_area() - 6.0).abs() <= 1e-13);
        assert!((cube.enclosed_volume() - 1.0).abs() <= 1e-13);
        let cuboid = shapes::cuboid_surface::<f64>(4.0, 1.0, 1.0, 0).unwrap();
        assert!((cuboid.surface_area() - 18.0).abs() <= 1e-12);
        assert!((cuboid.enclosed_volume() - 4.0).abs() <= 1e-12);
        assert!((tetrahedron().enclosed_volume() - 1.0 / 6.0).abs() <= 1e-15);
    }

    #[test]
    fn lumped_product_cases() {
        let ico = shapes::sphere_surface::<f64>(1.0, 0).unwrap();
        let (k, j) = (ico.num_vertices(), ico.num_triangles());
        let ones = vec![1.0; k];
        let w = lumped_inner_product_3d(&ico, SurfaceField::Nodal(&ones), SurfaceField::Nodal(&ones))
            .unwrap();
        assert!((w - ico.surface_area()).abs() <= 1e-13 * w);

        // Hat at vertex v against 1: a third of the incident area.
        for v in [0usize, 5, 11] {
            let mut hat = vec![0.0; k];
            hat[v] = 1.0;
            let ip = lumped_inner_product_3d(
                &ico,
                SurfaceField::Nodal(&hat),
                SurfaceField::Nodal(&ones),
            )
            .unwrap();
            let incident_area: f64 =
                ico.incident_triangles(v).iter().map(|&t| ico.triangle_area(t)).sum();
            assert!((ip - incident_area / 3.0).abs() <= 1e-14);
        }

        // Random nodal fields against a brute-force double loop.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ip = lumped_inner_product_3d(&ico, SurfaceField::Nodal(&f), SurfaceField::Nodal(&g))
            .unwrap();
        let mut brute = 0.0;
        for t in 0..j {
            let tri = ico.triangles()[t];
            for corner in 0..3 {
                brute += ico.triangle_area(t) / 3.0 * f[tri[corner]] * g[tri[corner]];
            }
        }
        assert!((ip - brute).abs() <= 1e-13);

        // Symmetry and positive semidefiniteness.
        let gf = lumped_inner_product_3d(&ico, SurfaceField::Nodal(&g), SurfaceField::Nodal(&f))
            .unwrap();
        assert!((ip - gf).abs() <= 1e-14);
        let ff = lumped_inner_product_3d(&ico, SurfaceField::Nodal(&f), SurfaceField::Nodal(&f))
            .unwrap();
        assert!(ff >= 0.0);
    }

    #[test]
    fn lumped_product_shape_mismatch() {
        let tet = tetrahedron();
        let bad = vec![1.0; 3];
        let good = vec![1.0; 4];
        let err = lumped_inner_product_3d(
            &tet,
            SurfaceField::Nodal(&bad),
            SurfaceField::Nodal(&good),
        );
        assert!(matches!(err, Err(Error::FieldSizeMismatch { .. })));
    }

    #[test]
    fn surface_gradient_of_constant_vanishes() {
        let oct = octahedron();
        let f = vec![2.5; oct.num_vertices()];
        for g in oct.surface_gradient(&f).unwrap() {
            assert!(g.norm() <= 1e-14);
        }
    }

    #[test]
    fn surface_gradient_of_linear_field_is_tangential_projection() {
        let oct = octahedron();
        let a = Vec3::new(0.7_f64, -1.3, 0.4);
        let f: Vec<f64> = oct.vertices().iter().map(|&q| a.dot(q)).collect();
        let grads = oct.surface_gradient(&f).unwrap();
        let normals = oct.outward_normals();
        for (j, g) in grads.iter().enumerate() {
            let proj = a - normals[j] * a.dot(normals[j]);
            assert!((*g - proj).norm() <= 1e-13, "triangle {j}: {g:?} vs {proj:?}");
        }
    }

    #[test]
    fn identity_map_gradient_energy_equals_area() {
        // (1/2) int |grad_S X|_F^2 = |sigma| per triangle.
        let sph = shapes::sphere_surface::<f64>(1.3, 1).unwrap();
        for j in 0..sph.num_triangles() {
            let d = sph.shape_gradients(j);
            let [a, b, c] = sph.corners(j);
            let mut frob = 0.0;
            for axis in 0..3 {
                let g = d[0] * a.component(axis) + d[1] * b.component(axis) + d[2] * c.component(axis);
                frob += g.norm_sq();
            }
            let area = sph.triangle_area(j);
            assert!((0.5 * area * frob - area).abs() <= 1e-12 * area, "triangle {j}");
        }
    }

    #[test]
    fn gradient_is_orthogonal_to_normal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sph = shapes::sphere_surface::<f64>(1.0, 1).unwrap();
        let f: Vec<f64> = (0..sph.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let grads = sph.surface_gradient(&f).unwrap();
        let normals = sph.outward_normals();
        for (g, n) in grads.iter().zip(&normals) {
            assert!(g.dot(*n).abs() <= 1e-13 * g.norm().max(1.0));
        }
    }

    #[test]
    fn orientation_vectors_sum_to_zero() {
        for s in [
            shapes::cuboid_surface::<f64>(4.0, 1.0, 1.0, 0).unwrap(),
            shapes::sphere_surface::<f64>(2.0, 1).unwrap(),
        ] {
            let mut sum = Vec3::zero();
            for j in 0..s.num_triangles() {
                sum += s.orientation_vector(j);
            }
            assert!(sum.norm() <= 1e-12 * s.surface_area());
        }
    }

    #[test]
    fn volume_is_translation_invariant() {
        let s = shapes::sphere_surface::<f64>(1.0, 1).unwrap();
        let v0 = s.enclosed_volume();
        let shift = Vec3::new(123.4, -55.0, 7.9);
        let moved: Vec<Vec3<f64>> = s.vertices().iter().map(|&q| q + shift).collect();
        let moved = s.with_vertices(moved).unwrap();
        assert!((moved.enclosed_volume() - v0).abs() <= 1e-10 * v0.abs());
    }

    #[test]
    fn euler_relation_on_generated_meshes() {
        for s in [
            shapes::cuboid_surface::<f64>(4.0, 1.0, 1.0, 1).unwrap(),
            shapes::sphere_surface::<f64>(1.0, 2).unwrap(),
        ] {
            assert_eq!(s.num_vertices(), s.num_triangles() / 2 + 2);
            assert_eq!(s.num_edges(), 3 * s.num_triangles() / 2);
        }
    }

    #[test]
    fn inward_surface_is_flipped_with_flag() {
        let tet = tetrahedron();
        let flipped: Vec<[usize; 3]> =
            tet.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        let s = TriSurface::new(tet.vertices().to_vec(), flipped).unwrap();
        assert!(s.was_reoriented());
        assert!(s.enclosed_volume() > 0.0);
    }

    #[test]
    fn open_surface_is_rejected() {
        // A single triangle is not closed.
        let err = TriSurface::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        assert!(matches!(err, Err(Error::BadTopology(_))));
    }

    #[test]
    fn snapshot_round_trip() {
        let s = shapes::sphere_surface::<f64>(0.8, 1).unwrap();
        let mut buf = Vec::new();
        s.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&format!(
            "SURF3D {} {}\n",
            s.num_vertices(),
            s.num_triangles()
        )));
        let back = TriSurface::<f64>::read_snapshot(&buf[..]).unwrap();
        assert_eq!(back.vertices(), s.vertices());
        assert_eq!(back.triangles(), s.triangles());
    }
}
