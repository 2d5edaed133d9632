//! Flat hyperbolic metrics by vertex-scaling curvature flow, and the edge
//! weights built from them.
//!
//! Conformal scaling acts on lengths as `sinh(ℓ'/2) = e^{(u_i+u_j)/2} sinh(ℓ/2)`.
//! The flow runs Newton's method on the curvature map `u ↦ K(u)`, whose
//! Jacobian is symmetric positive definite.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hypgeom::angles_from_lengths;
use crate::mesh::{DiscreteMetric, TriMesh};
use crate::sparse::{pcg, Triplets};

/// Per-face corner angles, ordered like the face's corners.
pub fn corner_angles(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<Vec<[f64; 3]>> {
    exec.try_map(mesh.n_faces(), |f| {
        let [a, b, c] = metric.face_lengths(mesh, f);
        angles_from_lengths(a, b, c).map_err(|_| Error::DegenerateFace { face: f })
    })
}

pub fn face_areas(angles: &[[f64; 3]]) -> Vec<f64> {
    angles.iter().map(|a| PI - (a[0] + a[1] + a[2])).collect()
}

/// Angle defects `2π − Σ α` at every vertex.
pub fn curvature_from_angles(mesh: &TriMesh, angles: &[[f64; 3]]) -> Vec<f64> {
    let mut k = vec![2.0 * PI; mesh.n_vertices()];
    for (f, tri) in mesh.faces().iter().enumerate() {
        for c in 0..3 {
            k[tri[c]] -= angles[f][c];
        }
    }
    k
}

pub fn vertex_curvature(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<Vec<f64>> {
    Ok(curvature_from_angles(mesh, &corner_angles(mesh, metric, exec)?))
}

/// `|Σ K − Σ Area − 2πχ|`, which vanishes for every valid hyperbolic metric on a closed mesh.
pub fn gauss_bonnet_residual(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<f64> {
    let angles = corner_angles(mesh, metric, exec)?;
    let k: f64 = curvature_from_angles(mesh, &angles).iter().sum();
    let area: f64 = face_areas(&angles).iter().sum();
    Ok((k - area - 2.0 * PI * mesh.euler_characteristic() as f64).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalFactors {
    pub u: Vec<f64>,
}

pub fn scale_metric(mesh: &TriMesh, base: &DiscreteMetric, u: &[f64]) -> DiscreteMetric {
    let lengths = (0..mesh.n_edges())
        .map(|e| {
            let [i, j] = mesh.edge_vertices(e);
            let s = (0.5 * (u[i] + u[j])).exp() * (0.5 * base.lengths[e]).sinh();
            2.0 * s.asinh()
        })
        .collect();
    DiscreteMetric { lengths }
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Exec,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            tol: 1e-10,
            max_iter: 50,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub metric: DiscreteMetric,
    pub factors: ConformalFactors,
    pub curvature: Vec<f64>,
    /// Newton steps taken.
    pub iterations: usize,
    /// `max |K|` after the length normalization and after every accepted step.
    pub history: Vec<f64>,
    /// Input lengths are first multiplied by this so the total area is right;
    /// the factors `u` are relative to the multiplied lengths.
    pub base_scale: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Curvature and its Jacobian with respect to the conformal factors.
fn curvature_jacobian(
    mesh: &TriMesh,
    metric: &DiscreteMetric,
    exec: Exec,
) -> Result<(Vec<f64>, crate::sparse::Csr)> {
    let local = exec.try_map(mesh.n_faces(), |f| {
        let a = metric.face_lengths(mesh, f);
        let ang = angles_from_lengths(a[0], a[1], a[2]).map_err(|_| Error::DegenerateFace { face: f })?;
        // dA_k/da_m
        let mut da = [[0.0; 3]; 3];
        for k in 0..3 {
            let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
            let d = a[k].sinh() / (a[k1].sinh() * a[k2].sinh() * ang[k].sin());
            da[k][k] = d;
            da[k][k1] = -ang[k2].cos() * d;
            da[k][k2] = -ang[k1].cos() * d;
        }
        // side a_m joins corners m+1 and m+2, and d a_m / d u = tanh(a_m / 2) there
        let mut j = [[0.0; 3]; 3];
        for k in 0..3 {
            for n in 0..3 {
                let mut s = 0.0;
                for m in 0..3 {
                    if m != n {
                        s += da[k][m] * (0.5 * a[m]).tanh();
                    }
                }
                j[k][n] = -s;
            }
        }
        Ok::<_, Error>((ang, j))
    })?;
    let mut k = vec![2.0 * PI; mesh.n_vertices()];
    let mut t = Triplets::new(mesh.n_vertices());
    for (f, (ang, j)) in local.iter().enumerate() {
        let tri = mesh.face(f);
        for c in 0..3 {
            k[tri[c]] -= ang[c];
            for n in 0..3 {
                t.add(tri[c], tri[n], j[c][n]);
            }
        }
    }
    Ok((k, t.build()))
}

fn try_metric(mesh: &TriMesh, base: &DiscreteMetric, u: &[f64], exec: Exec) -> Option<(DiscreteMetric, Vec<f64>)> {
    let m = scale_metric(mesh, base, u);
    if m.check_triangles(mesh).is_err() {
        return None;
    }
    let k = vertex_curvature(mesh, &m, exec).ok()?;
    Some((m, k))
}

fn scaled(base: &DiscreteMetric, lambda: f64) -> DiscreteMetric {
    DiscreteMetric {
        lengths: base.lengths.iter().map(|l| l * lambda).collect(),
    }
}

/// Total hyperbolic area when the lengths are multiplied by `lambda`.
fn total_area(mesh: &TriMesh, base: &DiscreteMetric, lambda: f64, exec: Exec) -> Option<f64> {
    let ang = corner_angles(mesh, &scaled(base, lambda), exec).ok()?;
    Some(face_areas(&ang).iter().sum())
}

/// Length multiplier that gives total area `−2πχ`. Multiplying all lengths
/// keeps every triangle valid, unlike a large uniform conformal factor.
fn area_normalizing_scale(mesh: &TriMesh, base: &DiscreteMetric, exec: Exec) -> Option<f64> {
    let target = -2.0 * PI * mesh.euler_characteristic() as f64;
    let below = |x: f64| total_area(mesh, base, x.exp(), exec).map(|a| a < target);
    // bracket in log-scale: below(lo) and !below(hi)
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    if below(0.0)? {
        while below(hi)? {
            lo = hi;
            hi += 1.0;
            if hi > 20.0 {
                return None;
            }
        }
    } else {
        while !below(lo)? {
            hi = lo;
            lo -= 1.0;
            if lo < -60.0 {
                return None;
            }
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((0.5 * (lo + hi)).exp())
}

pub fn hyperbolic_yamabe_flow(mesh: &TriMesh, metric: &DiscreteMetric, opts: FlowOptions) -> Result<FlowResult> {
    let exec = opts.exec;
    mesh.validate_pipeline_input()?;
    metric.check_triangles(mesh)?;
    let n = mesh.n_vertices();
    let k0 = vertex_curvature(mesh, metric, exec)?;
    if max_abs(&k0) <= opts.tol {
        return Ok(FlowResult {
            metric: metric.clone(),
            factors: ConformalFactors { u: vec![0.0; n] },
            history: vec![max_abs(&k0)],
            curvature: k0,
            iterations: 0,
            base_scale: 1.0,
        });
    }
    let base_scale = area_normalizing_scale(mesh, metric, exec).unwrap_or(1.0);
    let base = scaled(metric, base_scale);
    let mut u = vec![0.0; n];
    let mut cur = base.clone();
    let mut k = vertex_curvature(mesh, &cur, exec)?;
    let mut history = vec![max_abs(&k)];
    let mut iterations = 0;
    while max_abs(&k) > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                what: "curvature flow",
                iterations,
                residual: max_abs(&k),
            });
        }
        iterations += 1;
        let (_, jac) = curvature_jacobian(mesh, &cur, exec)?;
        let rhs: Vec<f64> = k.iter().map(|x| -x).collect();
        let newton = pcg(&jac, &rhs, None, 1e-13, 20 * n + 100).ok();
        let before = max_abs(&k);
        let mut accepted = None;
        for dir in newton.iter().chain(std::iter::once(&rhs)) {
            let mut t = 1.0;
            while t > 1e-12 {
                let trial: Vec<f64> = u.iter().zip(dir).map(|(u, d)| u + t * d).collect();
                if let Some((m, kt)) = try_metric(mesh, &base, &trial, exec) {
                    if max_abs(&kt) < before {
                        accepted = Some((trial, m, kt));
                        break;
                    }
                }
                t *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some((nu, m, nk)) = accepted else {
            return Err(Error::TriangleDegeneration);
        };
        u = nu;
        cur = m;
        k = nk;
        history.push(max_abs(&k));
    }
    Ok(FlowResult {
        metric: cur,
        factors: ConformalFactors { u },
        curvature: k,
        iterations,
        history,
        base_scale,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeWeights {
    pub c: Vec<f64>,
}

/// Half of `α_i + α_j − α_k` for the face on the left of halfedge `h` (`i → j`, apex `k`).
fn apex_term(a: [f64; 3], h: usize) -> f64 {
    let c = h % 3;
    0.5 * (a[c] + a[(c + 1) % 3] - a[(c + 2) % 3])
}

fn edge_halfedges(mesh: &TriMesh, e: usize) -> impl Iterator<Item = usize> {
    let h = mesh.edge_halfedge(e);
    std::iter::once(h).chain(mesh.twin(h))
}

/// Hyperbolic generalization of the cotangent weights, from a hyperbolic metric.
pub fn canonical_weights(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<EdgeWeights> {
    let angles = corner_angles(mesh, metric, exec)?;
    let c = exec.map(mesh.n_edges(), |e| {
        let l = metric.lengths[e];
        let s: f64 = edge_halfedges(mesh, e).map(|h| apex_term(angles[h / 3], h).tan()).sum();
        s * (0.5 * l).tanh() / l
    });
    Ok(EdgeWeights { c })
}

/// Corner angles of the Euclidean triangles with the given side lengths.
pub fn euclidean_corner_cotangents(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<Vec<[f64; 3]>> {
    exec.try_map(mesh.n_faces(), |f| {
        let l = metric.face_lengths(mesh, f);
        let mut s = l;
        s.sort_by(|a, b| b.total_cmp(a));
        // Kahan's stable Heron formula, sides sorted descending
        let (a, b, c) = (s[0], s[1], s[2]);
        let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
        if !(p > 0.0) {
            return Err(Error::DegenerateFace { face: f });
        }
        let area = 0.25 * p.sqrt();
        let mut cot = [0.0; 3];
        for k in 0..3 {
            let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
            cot[k] = (b * b + c * c - a * a) / (4.0 * area);
        }
        Ok(cot)
    })
}

/// `½ (cot α + cot β)` over the angles opposite each edge.
pub fn euclidean_cotangent_weights(mesh: &TriMesh, metric: &DiscreteMetric, exec: Exec) -> Result<EdgeWeights> {
    let cot = euclidean_corner_cotangents(mesh, metric, exec)?;
    let c = exec.map(mesh.n_edges(), |e| {
        edge_halfedges(mesh, e)
            .map(|h| 0.5 * cot[h / 3][(h % 3 + 2) % 3])
            .sum()
    });
    Ok(EdgeWeights { c })
}

/// The per-edge angle condition for a hyperbolic metric: the sum of the apex
/// terms on both sides of the edge is non-negative.
pub fn is_delaunay_edge(mesh: &TriMesh, metric: &DiscreteMetric, e: usize) -> Result<bool> {
    let mut s = 0.0;
    for h in edge_halfedges(mesh, e) {
        let f = h / 3;
        let [a, b, c] = metric.face_lengths(mesh, f);
        let ang = angles_from_lengths(a, b, c).map_err(|_| Error::DegenerateFace { face: f })?;
        s += apex_term(ang, h);
    }
    Ok(s >= 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolicyReport {
    pub floor: f64,
    pub reset: usize,
}

/// 5th percentile of the strictly positive weights (nearest rank).
pub fn default_floor(w: &EdgeWeights) -> f64 {
    let mut pos: Vec<f64> = w.c.iter().copied().filter(|&c| c > 0.0).collect();
    if pos.is_empty() {
        return 1.0;
    }
    pos.sort_by(f64::total_cmp);
    let rank = ((0.05 * pos.len() as f64).ceil() as usize).clamp(1, pos.len());
    pos[rank - 1]
}

/// Resets every non-positive weight to `floor` (default: [`default_floor`]).
pub fn apply_positivity_policy(w: &EdgeWeights, floor: Option<f64>) -> Result<(EdgeWeights, PolicyReport)> {
    let floor = floor.unwrap_or_else(|| default_floor(w));
    if !(floor > 0.0) || !floor.is_finite() {
        return Err(Error::InvalidInput(format!("weight floor must be positive, got {floor}")));
    }
    let mut reset = 0;
    let c = w
        .c
        .iter()
        .map(|&c| {
            if c > 0.0 {
                c
            } else {
                reset += 1;
                floor
            }
        })
        .collect();
    Ok((EdgeWeights { c }, PolicyReport { floor, reset }))
}

#[derive(Serialize)]
struct Dump<'a> {
    u: &'a [f64],
    #[serde(rename = "K")]
    k: &'a [f64],
    c: &'a [f64],
}

/// Debug dump with keys `u`, `K`, `c`.
pub fn dump_json(u: &[f64], k: &[f64], c: &[f64]) -> serde_json::Value {
    serde_json::to_value(Dump { u, k, c }).expect("plain arrays serialize")
}
