//! Closed polygonal curves in the plane: edges, enclosed area, perimeter,
//! mesh ratio, mass-lumped inner products and arc-length derivatives.
//!
//! Curves are stored anticlockwise (positive shoelace area). The outward unit
//! normal of an edge is its unit tangent rotated by -90 degrees, so for an
//! anticlockwise curve the normal points out of the enclosed region.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{half, real, Scalar};
use crate::vec::{FieldValue, Vec2};

/// Relative edge-length guard: an edge shorter than this fraction of the
/// perimeter counts as degenerate (the scheme divides by edge lengths).
pub const EDGE_GUARD_FACTOR: f64 = 1e-14;

/// Closed, anticlockwise oriented polygon; vertex `N` wraps to vertex `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalCurve<S> {
    vertices: Vec<Vec2<S>>,
}

impl<S: Scalar> PolygonalCurve<S> {
    /// Validates vertex count, orientation and the minimum-edge guard.
    pub fn new(vertices: Vec<Vec2<S>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let curve = Self { vertices };
        let perimeter = curve.perimeter();
        let guard = real::<S>(EDGE_GUARD_FACTOR) * perimeter;
        for (j, len) in curve.edge_lengths().into_iter().enumerate() {
            if !(len > guard) {
                return Err(Error::DegenerateEdge {
                    index: j,
                    length: len.to_f64().unwrap_or(0.0),
                    guard: guard.to_f64().unwrap_or(0.0),
                });
            }
        }
        let area = curve.signed_area();
        if !(area > S::zero()) {
            return Err(Error::ClockwiseCurve(area.to_f64().unwrap_or(0.0)));
        }
        Ok(curve)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec2<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vec2<S> {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge `j` runs from vertex `j` to vertex `j+1` (periodic).
    pub fn edge(&self, j: usize) -> Vec2<S> {
        let n = self.vertices.len();
        self.vertices[(j + 1) % n] - self.vertices[j % n]
    }

    /// All edge vectors, one per edge.
    pub fn edge_vectors(&self) -> Vec<Vec2<S>> {
        (0..self.vertices.len()).map(|j| self.edge(j)).collect()
    }

    pub fn edge_lengths(&self) -> Vec<S> {
        (0..self.vertices.len()).map(|j| self.edge(j).norm()).collect()
    }

    fn signed_area(&self) -> S {
        let n = self.vertices.len();
        let mut acc = S::zero();
        for j in 0..n {
            acc += self.vertices[j].cross(self.vertices[(j + 1) % n]);
        }
        half(acc)
    }

    /// Positive enclosed area (shoelace formula).
    pub fn enclosed_area(&self) -> S {
        self.signed_area()
    }

    /// Sum of edge lengths.
    pub fn perimeter(&self) -> S {
        self.edge_lengths().into_iter().fold(S::zero(), |a, l| a + l)
    }

    /// Mesh ratio indicator: longest edge over shortest edge, `>= 1`.
    pub fn mesh_ratio(&self) -> S {
        let lengths = self.edge_lengths();
        let max = lengths.iter().copied().fold(S::neg_infinity(), S::max);
        let min = lengths.iter().copied().fold(S::infinity(), S::min);
        max / min
    }

    /// Outward unit normal per edge (tangent rotated by -90 degrees).
    pub fn outward_normals(&self) -> Vec<Vec2<S>> {
        (0..self.vertices.len())
            .map(|j| {
                let e = self.edge(j);
                -e.perp() / e.norm()
            })
            .collect()
    }

    /// Derivative with respect to arc length of a nodal field, constant per
    /// edge: `(f_{j+1} - f_j) / |h_j|`.
    pub fn arc_derivative<T: FieldValue<S>>(&self, f: &[T]) -> Result<Vec<T>> {
        let n = self.vertices.len();
        if f.len() != n {
            return Err(Error::FieldSizeMismatch { expected: n, found: f.len() });
        }
        Ok((0..n)
            .map(|j| (f[(j + 1) % n] - f[j]).scale(S::one() / self.edge(j).norm()))
            .collect())
    }

    /// Writes the plain-text snapshot format: header `CURVE2D N`, then one
    /// `x y` line per vertex at full double precision.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "CURVE2D {}", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", v.x, v.y)?;
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
            Some("CURVE2D") => {}
            other => {
                return Err(Error::SnapshotFormat(format!(
                    "expected CURVE2D header, got {other:?}"
                )))
            }
        }
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::SnapshotFormat("bad vertex count".into()))?;
        let mut vertices = Vec::with_capacity(n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let x: f64 = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::SnapshotFormat(format!("bad vertex line: {line}")))?;
            let y: f64 = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::SnapshotFormat(format!("bad vertex line: {line}")))?;
            vertices.push(Vec2::new(real::<S>(x), real::<S>(y)));
        }
        if vertices.len() != n {
            return Err(Error::SnapshotFormat(format!(
                "header promised {n} vertices, file has {}",
                vertices.len()
            )));
        }
        Self::new(vertices)
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

/// Operand of the mass-lumped inner product: either a nodal (piecewise
/// linear, continuous) field with one value per vertex, or a piecewise
/// constant field with one value per edge.
#[derive(Clone, Copy, Debug)]
pub enum CurveField<'a, T> {
    Nodal(&'a [T]),
    PerEdge(&'a [T]),
}

impl<'a, T: Copy> CurveField<'a, T> {
    fn len(&self) -> usize {
        match self {
            CurveField::Nodal(v) | CurveField::PerEdge(v) => v.len(),
        }
    }

    /// One-sided values at the start (vertex `j` from the right) and end
    /// (vertex `j+1` from the left) of edge `j`.
    fn one_sided(&self, j: usize, n: usize) -> (T, T) {
        match self {
            CurveField::Nodal(v) => (v[j], v[(j + 1) % n]),
            CurveField::PerEdge(v) => (v[j], v[j]),
        }
    }
}

/// Mass-lumped inner product over the curve (composite trapezoidal rule):
/// `1/2 * sum_j |h_j| [ (u.v)(end_j) + (u.v)(start_j) ]`.
pub fn lumped_inner_product<S: Scalar, T: FieldValue<S>>(
    curve: &PolygonalCurve<S>,
    u: CurveField<'_, T>,
    v: CurveField<'_, T>,
) -> Result<S> {
    let n = curve.num_vertices();
    for f in [&u, &v] {
        if f.len() != n {
            return Err(Error::FieldSizeMismatch { expected: n, found: f.len() });
        }
    }
    let mut acc = S::zero();
    for j in 0..n {
        let len = curve.edge(j).norm();
        let (u0, u1) = u.one_sided(j, n);
        let (v0, v1) = v.one_sided(j, n);
        acc += half(len) * (u1.dot(v1) + u0.dot(v0));
    }
    Ok(acc)
}
