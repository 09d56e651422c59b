//! Error metrics and diagnostics: symmetric-difference area between plane
//! curves, vertex-to-triangle manifold distance between surfaces,
//! convergence-order tables and equilibrium perimeter errors.

use std::io::Write;

use crate::curve2d::PolygonalCurve;
use crate::error::{Error, Result};
use crate::scalar::{half, real, Scalar};
use crate::surface3d::TriSurface;
use crate::vec::{Vec2, Vec3};

/// Manifold distance between two closed curves: the area of the symmetric
/// difference of their enclosed regions,
/// `M = |A1| + |A2| - 2 |A1 and A2|`.
pub fn manifold_distance_2d<S: Scalar>(
    c1: &PolygonalCurve<S>,
    c2: &PolygonalCurve<S>,
) -> Result<S> {
    ensure_simple(c1)?;
    ensure_simple(c2)?;
    let a1 = c1.enclosed_area();
    let a2 = c2.enclosed_area();
    let inter = intersection_area(c1, c2);
    Ok((a1 + a2 - real::<S>(2.0) * inter).max(S::zero()))
}

/// Rejects polygons whose non-adjacent edges cross transversally.
fn ensure_simple<S: Scalar>(curve: &PolygonalCurve<S>) -> Result<()> {
    let n = curve.num_vertices();
    let v = curve.vertices();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in (i + 1)..n {
            // Skip edges sharing a vertex with edge i.
            if j == i || (j + 1) % n == i || j == (i + 1) % n {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            let d1 = (b - a).cross(c - a);
            let d2 = (b - a).cross(d - a);
            let d3 = (d - c).cross(a - c);
            let d4 = (d - c).cross(b - c);
            if ((d1 > S::zero() && d2 < S::zero()) || (d1 < S::zero() && d2 > S::zero()))
                && ((d3 > S::zero() && d4 < S::zero()) || (d3 < S::zero() && d4 > S::zero()))
            {
                return Err(Error::SelfIntersectingPolygon);
            }
        }
    }
    Ok(())
}

fn diameter<S: Scalar>(curve: &PolygonalCurve<S>) -> S {
    let mut lo = curve.vertices()[0];
    let mut hi = lo;
    for &v in curve.vertices() {
        lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    (hi - lo).norm()
}

#[derive(Clone, Copy, PartialEq)]
enum Location {
    Inside,
    Outside,
    /// On the boundary, on the edge with this index.
    Boundary(usize),
}

/// Classifies a point against a polygon: boundary within `eps`, otherwise
/// even-odd ray crossing.
fn locate<S: Scalar>(p: Vec2<S>, poly: &PolygonalCurve<S>, eps: S) -> Location {
    let n = poly.num_vertices();
    let v = poly.vertices();
    for j in 0..n {
        let (a, b) = (v[j], v[(j + 1) % n]);
        let e = b - a;
        let len_sq = e.norm_sq();
        let t = ((p - a).dot(e) / len_sq).max(S::zero()).min(S::one());
        let closest = a + e * t;
        if (p - closest).norm() <= eps {
            return Location::Boundary(j);
        }
    }
    let mut inside = false;
    for j in 0..n {
        let (a, b) = (v[j], v[(j + 1) % n]);
        if (a.y <= p.y && p.y < b.y) || (b.y <= p.y && p.y < a.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x_cross > p.x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Splitting parameters of segment `[a, b]` against every edge of `poly`.
fn crossing_params<S: Scalar>(a: Vec2<S>, b: Vec2<S>, poly: &PolygonalCurve<S>, out: &mut Vec<S>) {
    out.clear();
    out.push(S::zero());
    out.push(S::one());
    let r = b - a;
    let r_norm = r.norm();
    let n = poly.num_vertices();
    let v = poly.vertices();
    for j in 0..n {
        let (c, d) = (v[j], v[(j + 1) % n]);
        let s = d - c;
        let denom = r.cross(s);
        let scale = r_norm * s.norm();
        if denom.abs() > real::<S>(1e-14) * scale {
            let t = (c - a).cross(s) / denom;
            let u = (c - a).cross(r) / denom;
            let lo = -real::<S>(1e-12);
            let hi = S::one() + real::<S>(1e-12);
            if t > lo && t < hi && u > lo && u < hi {
                out.push(t.max(S::zero()).min(S::one()));
            }
        } else if (c - a).cross(r).abs() <= real::<S>(1e-12) * r_norm * ((c - a).norm() + r_norm) {
            // Collinear overlap: project the other edge's endpoints.
            for q in [c, d] {
                let t = (q - a).dot(r) / r.norm_sq();
                if t > S::zero() && t < S::one() {
                    out.push(t);
                }
            }
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).expect("finite parameters"));
    out.dedup_by(|x, y| (*x - *y).abs() <= real::<S>(1e-12));
}

/// Area of the intersection of the regions bounded by two anticlockwise
/// simple polygons, by integrating `(x dy - y dx)/2` along the boundary of
/// the intersection: pieces of `p` inside `q` (boundary overlaps count when
/// equally oriented) plus pieces of `q` strictly inside `p`.
fn intersection_area<S: Scalar>(p: &PolygonalCurve<S>, q: &PolygonalCurve<S>) -> S {
    let eps = real::<S>(1e-12) * diameter(p).max(diameter(q));
    let mut acc = S::zero();
    let mut params: Vec<S> = Vec::new();

    let mut sweep = |walk: &PolygonalCurve<S>, against: &PolygonalCurve<S>, keep_shared: bool| {
        let n = walk.num_vertices();
        let v = walk.vertices();
        for j in 0..n {
            let (a, b) = (v[j], v[(j + 1) % n]);
            crossing_params(a, b, against, &mut params);
            let splits = params.clone();
            for w in splits.windows(2) {
                let (t0, t1) = (w[0], w[1]);
                if t1 - t0 <= real::<S>(1e-12) {
                    continue;
                }
                let mid = a + (b - a) * (half(t0 + t1));
                let include = match locate(mid, against, eps) {
                    Location::Inside => true,
                    Location::Outside => false,
                    Location::Boundary(e) => {
                        keep_shared && (b - a).dot(against.edge(e)) > S::zero()
                    }
                };
                if include {
                    let p0 = if t0 == S::zero() { a } else { a + (b - a) * t0 };
                    let p1 = if t1 == S::one() { b } else { a + (b - a) * t1 };
                    acc += p0.cross(p1);
                }
            }
        }
    };

    sweep(p, q, true);
    sweep(q, p, false);
    half(acc)
}

/// Exact Euclidean distance from a point to a closed triangle.
pub fn point_triangle_distance<S: Scalar>(p: Vec3<S>, tri: [Vec3<S>; 3]) -> Result<S> {
    let [q1, q2, q3] = tri;
    let e0 = q2 - q1;
    let e1 = q3 - q1;
    let normal = e0.cross(e1);
    let nn = normal.norm_sq();
    let scale = e0.norm_sq().max(e1.norm_sq());
    if nn <= real::<S>(1e-28) * scale * scale {
        return Err(Error::DegenerateTriangle {
            index: 0,
            jacobian: nn.sqrt().to_f64().unwrap_or(0.0),
            guard: 0.0,
        });
    }
    // Barycentric coordinates of the in-plane projection.
    let d = p - q1;
    let a = e0.norm_sq();
    let b = e0.dot(e1);
    let c = e1.norm_sq();
    let d0 = e0.dot(d);
    let d1 = e1.dot(d);
    let det = a * c - b * b;
    let s = (c * d0 - b * d1) / det;
    let t = (a * d1 - b * d0) / det;
    if s >= S::zero() && t >= S::zero() && s + t <= S::one() {
        return Ok(normal.dot(d).abs() / nn.sqrt());
    }
    // Closest point lies on the boundary.
    let seg = |u: Vec3<S>, v: Vec3<S>| -> S {
        let e = v - u;
        let t = ((p - u).dot(e) / e.norm_sq()).max(S::zero()).min(S::one());
        (p - (u + e * t)).norm()
    };
    Ok(seg(q1, q2).min(seg(q2, q3)).min(seg(q3, q1)))
}

/// Manifold distance between two surfaces in the max-min (vertex to
/// triangle) form, symmetrized over both directions.
pub fn manifold_distance_3d<S: Scalar>(s1: &TriSurface<S>, s2: &TriSurface<S>) -> Result<S> {
    let one_sided = |verts: &TriSurface<S>, target: &TriSurface<S>| -> Result<S> {
        let mut worst = S::zero();
        for &q in verts.vertices() {
            let mut best = S::infinity();
            for j in 0..target.num_triangles() {
                let d = point_triangle_distance(q, target.corners(j))?;
                best = best.min(d);
            }
            worst = worst.max(best);
        }
        Ok(worst)
    };
    Ok(half(one_sided(s2, s1)? + one_sided(s1, s2)?))
}

/// One row of a convergence study.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow<S> {
    pub h: S,
    pub tau: S,
    pub error: S,
    /// `log2(previous error / this error)`; empty on the coarsest row.
    pub order: Option<S>,
}

/// Builds the convergence table from per-level `(h, tau, error)` triples;
/// levels must halve `h` and quarter `tau`.
pub fn convergence_table<S: Scalar>(levels: &[(S, S, S)]) -> Result<Vec<ConvergenceRow<S>>> {
    if levels.len() < 2 {
        return Err(Error::InvalidParameter(
            "convergence table needs at least two levels".into(),
        ));
    }
    let two = real::<S>(2.0);
    let four = real::<S>(4.0);
    let tol = real::<S>(1e-9);
    for w in levels.windows(2) {
        let ((h0, t0, _), (h1, t1, _)) = (w[0], w[1]);
        if ((h0 / h1) - two).abs() > tol || ((t0 / t1) - four).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "levels must halve h and quarter tau, got h {h0}->{h1}, tau {t0}->{t1}"
            )));
        }
    }
    let mut rows = Vec::with_capacity(levels.len());
    for (i, &(h, tau, error)) in levels.iter().enumerate() {
        if !(error > S::zero()) {
            return Err(Error::InvalidParameter(format!(
                "errors must be positive, level {i} has {error}"
            )));
        }
        let order = if i == 0 {
            None
        } else {
            Some((levels[i - 1].2 / error).log2())
        };
        rows.push(ConvergenceRow { h, tau, error, order });
    }
    Ok(rows)
}

pub fn write_convergence_csv<S: Scalar, W: Write>(
    rows: &[ConvergenceRow<S>],
    mut w: W,
) -> Result<()> {
    writeln!(w, "h,tau,error,order")?;
    for r in rows {
        match r.order {
            Some(o) => writeln!(w, "{:.16e},{:.16e},{:.16e},{:.4}", r.h, r.tau, r.error, o)?,
            None => writeln!(w, "{:.16e},{:.16e},{:.16e},", r.h, r.tau, r.error)?,
        }
    }
    Ok(())
}

/// Equilibrium perimeter errors: distance of the final perimeter from the
/// circle limit `2 sqrt(A0 pi)`, raw and with the known quadratic mesh term
/// removed:
/// `dL1 = L - 2 sqrt(A0 pi)`, `dL2 = dL1 - sqrt(A0 pi) pi^2 / 3 * h^2`.
pub fn equilibrium_perimeter_errors<S: Scalar>(l_final: S, a0: S, n: usize) -> (S, S) {
    let pi = S::PI();
    let circle = real::<S>(2.0) * (a0 * pi).sqrt();
    let dl1 = l_final - circle;
    let h = S::one() / real::<S>(n as f64);
    let dl2 = dl1 - (a0 * pi).sqrt() * pi * pi / real::<S>(3.0) * h * h;
    (dl1, dl2)
}

/// Perimeter of the equilibrium polygon: the regular `n`-gon enclosing area
/// `a0` has perimeter `2 sqrt(a0 n tan(pi/n))`.
pub fn equilibrium_perimeter<S: Scalar>(a0: S, n: usize) -> S {
    let nf = real::<S>(n as f64);
    real::<S>(2.0) * (a0 * nf * (S::PI() / nf).tan()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(side: f64, center: (f64, f64)) -> PolygonalCurve<f64> {
        let h = side / 2.0;
        PolygonalCurve::new(vec![
            Vec2::new(center.0 - h, center.1 - h),
            Vec2::new(center.0 + h, center.1 - h),
            Vec2::new(center.0 + h, center.1 + h),
            Vec2::new(center.0 - h, center.1 + h),
        ])
        .unwrap()
    }

    #[test]
    fn identical_curves_have_zero_distance() {
        let c = shapes::flower_curve::<f64>(128).unwrap();
        assert_eq!(manifold_distance_2d(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn concentric_squares() {
        let inner = square(1.0, (0.0, 0.0));
        let outer = square(2.0, (0.0, 0.0));
        let m = manifold_distance_2d(&inner, &outer).unwrap();
        assert!((m - 3.0).abs() <= 1e-12, "{m}");
        let m = manifold_distance_2d(&outer, &inner).unwrap();
        assert!((m - 3.0).abs() <= 1e-12, "{m}");
    }

    #[test]
    fn shifted_squares() {
        let a = square(1.0, (0.0, 0.0));
        let b = square(1.0, (0.5, 0.0));
        let m = manifold_distance_2d(&a, &b).unwrap();
        assert!((m - 1.0).abs() <= 1e-12, "{m}");
        // Disjoint squares: no overlap, M = both areas.
        let c = square(1.0, (5.0, 5.0));
        let m = manifold_distance_2d(&a, &c).unwrap();
        assert!((m - 2.0).abs() <= 1e-12, "{m}");
        // Sharing exactly one edge: still disjoint interiors.
        let d = square(1.0, (1.0, 0.0));
        let m = manifold_distance_2d(&a, &d).unwrap();
        assert!((m - 2.0).abs() <= 1e-12, "{m}");
    }

    #[test]
    fn partially_overlapping_collinear_edges() {
        let a = square(1.0, (0.0, 0.0));
        let b = square(1.0, (0.5, 1.0)); // shares half of the top edge
        let m = manifold_distance_2d(&a, &b).unwrap();
        assert!((m - 2.0).abs() <= 1e-12, "{m}");
        let c = square(1.0, (0.5, 0.5));
        let m = manifold_distance_2d(&a, &c).unwrap();
        assert!((m - 1.5).abs() <= 1e-12, "{m}");
    }

    #[test]
    fn distance_is_symmetric_on_solver_like_curves() {
        let a = shapes::ellipse_curve::<f64>(2.8, 0.4, 64).unwrap();
        let b = shapes::ellipse_curve::<f64>(2.7, 0.45, 128).unwrap();
        let ab = manifold_distance_2d(&a, &b).unwrap();
        let ba = manifold_distance_2d(&b, &a).unwrap();
        assert!(ab > 0.0);
        assert!((ab - ba).abs() <= 1e-11 * ab.max(1.0));
    }

    #[test]
    fn self_intersecting_input_is_rejected() {
        // A bow tie with positive signed area.
        let bow = PolygonalCurve::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.0, 2.0),
            Vec2::new(-1.0, 1.0),
        ])
        .unwrap();
        let sq = square(1.0, (0.0, 0.0));
        assert!(matches!(
            manifold_distance_2d(&bow, &sq),
            Err(Error::SelfIntersectingPolygon)
        ));
    }

    #[test]
    fn monte_carlo_oracle_agrees() {
        let a = shapes::ellipse_curve::<f64>(2.8, 0.4, 48).unwrap();
        let b = shapes::rectangle_curve::<f64>(4.0, 1.2, 40).unwrap();
        let m = manifold_distance_2d(&a, &b).unwrap();

        // Monte-Carlo estimate of the symmetric difference area.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let (x0, x1, y0, y1) = (-3.0, 3.0, -1.0, 1.0);
        let box_area = (x1 - x0) * (y1 - y0);
        let inside = |c: &PolygonalCurve<f64>, p: Vec2<f64>| -> bool {
            matches!(locate(p, c, 1e-12), Location::Inside)
        };
        let samples = 200_000usize;
        let mut hits = 0usize;
        for _ in 0..samples {
            let p = Vec2::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
            if inside(&a, p) != inside(&b, p) {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / samples as f64;
        let mc = p_hat * box_area;
        let sigma = box_area * (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
        assert!(
            (m - mc).abs() <= 3.0 * sigma,
            "clip {m} vs Monte-Carlo {mc} (3 sigma = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn point_triangle_cases() {
        let tri = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        // Above the interior at height 1.
        let d = point_triangle_distance(Vec3::new(0.25, 0.25, 1.0), tri).unwrap();
        assert!((d - 1.0_f64).abs() <= 1e-15);
        // At a vertex.
        let d = point_triangle_distance(Vec3::new(1.0, 0.0, 0.0), tri).unwrap();
        assert!(d <= 1e-15);
        // Degenerate triangle is rejected.
        let bad = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        assert!(point_triangle_distance(Vec3::new(0.0, 1.0, 0.0), bad).is_err());
    }

    #[test]
    fn point_triangle_matches_dense_sampling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tri = [
            Vec3::new(0.2, -0.1, 0.4),
            Vec3::new(1.4, 0.3, -0.2),
            Vec3::new(-0.3, 1.1, 0.3),
        ];
        for _ in 0..40 {
            let p = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let fast = point_triangle_distance(p, tri).unwrap();
            // Dense barycentric sampling.
            let mut best = f64::INFINITY;
            let n = 400;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let s = i as f64 / n as f64;
                    let t = j as f64 / n as f64;
                    let q = tri[0] + (tri[1] - tri[0]) * s + (tri[2] - tri[0]) * t;
                    best = best.min((p - q).norm());
                }
            }
            assert!(fast <= best + 1e-12, "fast {fast} > sampled {best}");
            assert!(best - fast <= 1e-4, "fast {fast} vs sampled {best}");
        }
    }

    #[test]
    fn manifold_3d_identical_and_translated() {
        let cube = shapes::cuboid_surface::<f64>(1.0, 1.0, 1.0, 0).unwrap();
        assert_eq!(manifold_distance_3d(&cube, &cube).unwrap(), 0.0);
        let shifted = cube
            .with_vertices(
                cube.vertices()
                    .iter()
                    .map(|&v| v + Vec3::new(0.1, 0.0, 0.0))
                    .collect(),
            )
            .unwrap();
        let m = manifold_distance_3d(&cube, &shifted).unwrap();
        assert!((m - 0.1).abs() <= 1e-12, "{m}");
    }

    #[test]
    fn manifold_3d_scaled_cube_matches_sampling_oracle() {
        let eps = 0.05;
        let cube = shapes::cuboid_surface::<f64>(1.0, 1.0, 1.0, 0).unwrap();
        let scaled = cube
            .with_vertices(cube.vertices().iter().map(|&v| v * (1.0 + eps)).collect())
            .unwrap();
        let m = manifold_distance_3d(&cube, &scaled).unwrap();

        // Oracle: replace the exact point-triangle distance by dense
        // sampling on every triangle.
        let sample_distance = |p: Vec3<f64>, s: &TriSurface<f64>| -> f64 {
            let mut best = f64::INFINITY;
            let n = 40;
            for j in 0..s.num_triangles() {
                let [a, b, c] = s.corners(j);
                for i in 0..=n {
                    for k in 0..=(n - i) {
                        let u = i as f64 / n as f64;
                        let v = k as f64 / n as f64;
                        let q = a + (b - a) * u + (c - a) * v;
                        best = best.min((p - q).norm());
                    }
                }
            }
            best
        };
        let mut side1 = 0.0f64;
        for &q in scaled.vertices() {
            side1 = side1.max(sample_distance(q, &cube));
        }
        let mut side2 = 0.0f64;
        for &q in cube.vertices() {
            side2 = side2.max(sample_distance(q, &scaled));
        }
        let oracle = 0.5 * (side1 + side2);
        assert!((m - oracle).abs() <= 2e-3, "{m} vs {oracle}");
    }

    #[test]
    fn manifold_3d_rigid_invariance() {
        let a = shapes::sphere_surface::<f64>(1.0, 1).unwrap();
        let b = shapes::cuboid_surface::<f64>(1.0, 1.0, 1.0, 1).unwrap();
        let m0 = manifold_distance_3d(&a, &b).unwrap();
        let (sn, cs) = 1.1_f64.sin_cos();
        let rot = |v: Vec3<f64>| Vec3::new(cs * v.x - sn * v.z, v.y, sn * v.x + cs * v.z);
        let shift = Vec3::new(0.4, 9.0, -3.0);
        let am = a.with_vertices(a.vertices().iter().map(|&v| rot(v) + shift).collect()).unwrap();
        let bm = b.with_vertices(b.vertices().iter().map(|&v| rot(v) + shift).collect()).unwrap();
        let m1 = manifold_distance_3d(&am, &bm).unwrap();
        assert!((m0 - m1).abs() <= 1e-12 * m0.max(1.0));
    }

    #[test]
    fn convergence_table_paper_rows() {
        let rows = convergence_table(&[
            (1.0 / 32.0, 0.02, 5.23e-2),
            (1.0 / 64.0, 0.005, 1.33e-2),
        ])
        .unwrap();
        assert!(rows[0].order.is_none());
        let order: f64 = rows[1].order.unwrap();
        assert!((order - 1.97).abs() <= 0.01, "{order}");

        let rows = convergence_table(&[
            (0.25, 0.01, 3.72e-2),
            (0.125, 0.0025, 1.06e-2),
        ])
        .unwrap();
        let order: f64 = rows[1].order.unwrap();
        assert!((order - 1.81).abs() <= 0.01, "{order}");

        // Equal errors give order 0.
        let rows = convergence_table(&[(0.5, 0.04, 1e-3), (0.25, 0.01, 1e-3)]).unwrap();
        assert_eq!(rows[1].order.unwrap(), 0.0);
    }

    #[test]
    fn convergence_table_input_validation() {
        assert!(convergence_table::<f64>(&[(0.5, 0.04, 1e-3)]).is_err());
        // Wrong ratio.
        assert!(convergence_table(&[(0.5, 0.04, 1e-3), (0.3, 0.01, 1e-4)]).is_err());
        // Nonpositive error.
        assert!(convergence_table(&[(0.5, 0.04, 1e-3), (0.25, 0.01, 0.0)]).is_err());
    }

    #[test]
    fn convergence_orders_are_scale_invariant() {
        let base: [(f64, f64, f64); 3] = [
            (0.5, 0.04, 8.0e-2),
            (0.25, 0.01, 2.1e-2),
            (0.125, 0.0025, 5.0e-3),
        ];
        let rows = convergence_table(&base).unwrap();
        let scaled: Vec<_> = base.iter().map(|&(h, t, e)| (h, t, 7.3 * e)).collect();
        let rows_scaled = convergence_table(&scaled).unwrap();
        for (a, b) in rows.iter().zip(&rows_scaled).skip(1) {
            assert!((a.order.unwrap() - b.order.unwrap()).abs() <= 1e-12_f64);
        }
    }

    #[test]
    fn equilibrium_perimeter_error_values() {
        // Exact discrete equilibrium: dL1 is the quadratic mesh correction.
        let a0 = std::f64::consts::PI;
        let (dl1, _) = equilibrium_perimeter_errors(equilibrium_perimeter(a0, 64), a0, 64);
        assert!((dl1 - 2.45e-3).abs() < 1e-4, "{dl1}");
        // n -> infinity: both errors vanish.
        let (dl1, dl2) = equilibrium_perimeter_errors(equilibrium_perimeter(a0, 4096), a0, 4096);
        assert!(dl1.abs() < 1e-6);
        assert!(dl2.abs() < 1e-10);
        // The quadratic term removal leaves O(h^4): check the ratio between
        // successive resolutions.
        let (_, d2a) = equilibrium_perimeter_errors(equilibrium_perimeter(a0, 32), a0, 32);
        let (_, d2b) = equilibrium_perimeter_errors(equilibrium_perimeter(a0, 64), a0, 64);
        let rate = (d2a / d2b).log2();
        assert!((rate - 4.0).abs() < 0.2, "{rate}");
    }
}
