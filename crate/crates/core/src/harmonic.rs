//! Riemannian gradient descent of the discrete Dirichlet energy over lifts of
//! the cut disk that respect the side pairings.
//!
//! Each surface vertex owns one representative copy in the cut disk; every
//! other copy is the image of the representative under a stored group
//! element. The optimizer moves representatives with the exponential map and
//! re-derives the copies, so the equivariance constraint holds after every
//! step up to rounding.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cut::CutSurface;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fuchsian::FundamentalPolygon;
use crate::hypgeom::{
    corner_angle, distance_unchecked, exp_map, geodesic_point, klein_orientation, log_map, triangle_area,
    DiskPoint, Mobius, TangentVec,
};
use crate::sparse::{pcg, Triplets};

/// Residual above which the gradient refuses to run.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Copy bookkeeping: `pos[j] = transform[j] · pos[rep[π_V(j)]]`.
#[derive(Clone, Debug)]
pub struct RepresentativeScheme {
    /// Per surface vertex, its representative in the cut disk.
    pub rep: Vec<usize>,
    pub transform: Vec<Mobius>,
    inverse: Vec<Mobius>,
    /// `(from, to, side map)` with `pos[to] = map · pos[from]` along paired segments.
    pub pairs: Vec<(usize, usize, Mobius)>,
}

impl RepresentativeScheme {
    pub fn new(cut: &CutSurface, polygon: &FundamentalPolygon) -> Result<Self> {
        let n = polygon.n_sides();
        if cut.n_segments() != n || cut.segment_pairing != polygon.pairing {
            return Err(Error::InconsistentPairing(
                "cut segments are not aligned with the polygon sides".into(),
            ));
        }
        let nv = cut.mesh.n_vertices();
        let mut pairs = Vec::new();
        let mut adj: Vec<Vec<(usize, Mobius)>> = vec![Vec::new(); nv];
        for k in 0..n {
            let m = polygon.pairing[k];
            if k > m {
                continue;
            }
            let (xs, ys) = (&cut.segments[k], &cut.segments[m]);
            if xs.len() != ys.len() {
                return Err(Error::InconsistentPairing(format!(
                    "segments {k} and {m} have {} and {} vertices",
                    xs.len(),
                    ys.len()
                )));
            }
            let g = polygon.side_maps[k];
            let last = ys.len() - 1;
            for (t, &x) in xs.iter().enumerate() {
                let y = ys[last - t];
                pairs.push((x, y, g));
                adj[x].push((y, g));
                adj[y].push((x, g.inverse()));
            }
        }
        let n_surface = cut.pi_v.iter().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; n_surface];
        rep[cut.base] = cut.segments[0][0];
        for k in 0..n {
            if k < polygon.pairing[k] {
                for &x in &cut.segments[k] {
                    let v = cut.pi_v[x];
                    if rep[v] == usize::MAX {
                        rep[v] = x;
                    }
                }
            }
        }
        for (j, &v) in cut.pi_v.iter().enumerate() {
            if rep[v] == usize::MAX {
                rep[v] = j;
            }
        }
        let mut transform = vec![Mobius::IDENTITY; nv];
        let mut done = vec![false; nv];
        for &r in &rep {
            done[r] = true;
            let mut stack = vec![r];
            while let Some(i) = stack.pop() {
                for &(j, g) in &adj[i] {
                    if !done[j] {
                        done[j] = true;
                        transform[j] = g.compose(&transform[i]);
                        stack.push(j);
                    }
                }
            }
        }
        if let Some(j) = done.iter().position(|d| !d) {
            return Err(Error::InconsistentPairing(format!("copy {j} is not linked to its representative")));
        }
        for &(i, j, g) in &pairs {
            let d = transform[j].coeff_distance(&g.compose(&transform[i]));
            if d > 1e-9 {
                return Err(Error::InconsistentPairing(format!(
                    "pairing cycle through copy {j} does not close (coefficient gap {d:e})"
                )));
            }
        }
        let inverse = transform.iter().map(|t| t.inverse()).collect();
        Ok(RepresentativeScheme {
            rep,
            transform,
            inverse,
            pairs,
        })
    }
}

/// Everything fixed during the optimization: cut, target, weights and the
/// per-edge lift bookkeeping.
#[derive(Clone, Debug)]
pub struct HarmonicProblem {
    pub cut: CutSurface,
    pub polygon: FundamentalPolygon,
    /// Weights on the edges of the closed surface.
    pub weights: Vec<f64>,
    pub scheme: RepresentativeScheme,
    /// Per surface edge, the endpoints of one lift in the cut disk.
    lift: Vec<[usize; 2]>,
    /// Per surface vertex, `(edge, own copy, other copy)` along the lifts.
    incident: Vec<Vec<(usize, usize, usize)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Disp,
    Grad,
    MaxIter,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Disp => "disp",
            Criterion::Grad => "grad",
            Criterion::MaxIter => "max_iter",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    pub tau: f64,
    pub eps_disp: f64,
    pub eps_grad: f64,
    pub max_iter: usize,
    /// Halve the step while it would increase the energy.
    pub backtrack: bool,
    pub exec: Exec,
}

impl DescentOptions {
    pub fn with_tau(tau: f64) -> Self {
        DescentOptions {
            tau,
            eps_disp: 1e-9,
            eps_grad: 1e-12,
            max_iter: 200_000,
            backtrack: false,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub grad_msq: f64,
    pub max_disp: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OptimizerTrace {
    pub rows: Vec<TraceRow>,
}

impl OptimizerTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn to_csv(&self, with_wall: bool) -> String {
        let mut s = String::from(if with_wall {
            "iter,energy,grad_msq,max_disp,wall_ms\n"
        } else {
            "iter,energy,grad_msq,max_disp\n"
        });
        for r in &self.rows {
            let _ = write!(s, "{},{:e},{:e},{:e}", r.iter, r.energy, r.grad_msq, r.max_disp);
            if with_wall {
                let _ = write!(s, ",{:.3}", r.wall_ms);
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, message: "empty trace".into() })?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        let idx = |name: &str| cols.iter().position(|c| *c == name);
        let (Some(i_it), Some(i_e)) = (idx("iter"), idx("energy")) else {
            return Err(Error::Parse {
                line: 1,
                message: "trace header needs iter and energy columns".into(),
            });
        };
        for (ln, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.trim().split(',').collect();
            let num = |i: Option<usize>| -> Result<f64> {
                match i {
                    None => Ok(0.0),
                    Some(i) => f
                        .get(i)
                        .and_then(|t| t.parse::<f64>().ok())
                        .ok_or_else(|| Error::Parse { line: ln + 1, message: format!("bad field {i}") }),
                }
            };
            rows.push(TraceRow {
                iter: num(Some(i_it))? as usize,
                energy: num(Some(i_e))?,
                grad_msq: num(idx("grad_msq"))?,
                max_disp: num(idx("max_disp"))?,
                wall_ms: num(idx("wall_ms"))?,
            });
        }
        Ok(OptimizerTrace { rows })
    }
}

#[derive(Clone, Debug)]
pub struct DescentResult {
    pub positions: Vec<DiskPoint>,
    pub trace: OptimizerTrace,
    pub criterion: Criterion,
    pub iterations: usize,
    pub final_energy: f64,
    /// Largest pairing residual seen after any iteration.
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub flipped_face_count: usize,
    pub min_signed_area: f64,
    pub vertex_angle_sums: Vec<f64>,
}

impl EmbeddingReport {
    pub fn max_angle_sum_error(&self) -> f64 {
        self.vertex_angle_sums
            .iter()
            .map(|s| (s - 2.0 * PI).abs())
            .fold(0.0, f64::max)
    }
}

impl HarmonicProblem {
    pub fn new(cut: CutSurface, polygon: FundamentalPolygon, weights: Vec<f64>) -> Result<Self> {
        let scheme = RepresentativeScheme::new(&cut, &polygon)?;
        let ne = cut.pi_e.iter().max().map_or(0, |m| m + 1);
        if weights.len() != ne {
            return Err(Error::InvalidInput(format!("{} weights for {ne} edges", weights.len())));
        }
        let mut lift = vec![[usize::MAX; 2]; ne];
        for e in 0..cut.mesh.n_edges() {
            let s = cut.pi_e[e];
            if lift[s][0] == usize::MAX {
                lift[s] = cut.mesh.edge_vertices(e);
            }
        }
        let mut incident = vec![Vec::new(); scheme.rep.len()];
        for (e, &[a, b]) in lift.iter().enumerate() {
            incident[cut.pi_v[a]].push((e, a, b));
            incident[cut.pi_v[b]].push((e, b, a));
        }
        Ok(HarmonicProblem {
            cut,
            polygon,
            weights,
            scheme,
            lift,
            incident,
        })
    }

    pub fn n_surface_vertices(&self) -> usize {
        self.scheme.rep.len()
    }

    pub fn n_surface_edges(&self) -> usize {
        self.lift.len()
    }

    /// Cut-disk endpoints of the lift that stands for surface edge `e`.
    pub fn edge_lift(&self, e: usize) -> [usize; 2] {
        self.lift[e]
    }

    /// Full lift from representative positions.
    pub fn propagate(&self, reps: &[DiskPoint], exec: Exec) -> Vec<DiskPoint> {
        exec.map(self.cut.mesh.n_vertices(), |j| {
            self.scheme.transform[j].apply(reps[self.cut.pi_v[j]])
        })
    }

    pub fn representatives(&self, positions: &[DiskPoint]) -> Vec<DiskPoint> {
        self.scheme.rep.iter().map(|&r| positions[r]).collect()
    }

    /// Largest `d(pos[j], γ · pos[i])` over paired boundary copies.
    pub fn constraint_residual(&self, positions: &[DiskPoint]) -> f64 {
        self.scheme
            .pairs
            .iter()
            .map(|&(i, j, g)| distance_unchecked(positions[j], g.apply(positions[i])))
            .fold(0.0, f64::max)
    }

    /// `½ Σ c ℓ²`, one term per surface edge.
    pub fn energy(&self, positions: &[DiskPoint], exec: Exec) -> f64 {
        let terms = exec.map(self.lift.len(), |e| {
            let [a, b] = self.lift[e];
            let l = distance_unchecked(positions[a], positions[b]);
            0.5 * self.weights[e] * l * l
        });
        terms.iter().sum()
    }

    /// Riemannian gradient at every representative.
    pub fn gradient(&self, positions: &[DiskPoint], exec: Exec) -> Result<Vec<TangentVec>> {
        let r = self.constraint_residual(positions);
        if r > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolated { residual: r });
        }
        Ok(self.gradient_unchecked(positions, exec))
    }

    fn gradient_unchecked(&self, positions: &[DiskPoint], exec: Exec) -> Vec<TangentVec> {
        exec.map(self.n_surface_vertices(), |v| {
            let x = positions[self.scheme.rep[v]];
            let (mut gx, mut gy) = (0.0, 0.0);
            for &(e, own, other) in &self.incident[v] {
                let y = self.scheme.inverse[own].apply(positions[other]);
                let l = log_map(x, y);
                // edges shorter than the degeneracy threshold give a zero log already
                gx -= self.weights[e] * l.vx;
                gy -= self.weights[e] * l.vy;
            }
            TangentVec::new(x, gx, gy)
        })
    }

    /// Mean over surface vertices of the squared Riemannian gradient norm.
    pub fn grad_msq(grad: &[TangentVec]) -> f64 {
        grad.iter().map(|g| g.norm_sqr()).sum::<f64>() / grad.len() as f64
    }

    /// Power-iteration estimate of the largest eigenvalue of the energy's
    /// Hessian surrogate: the graph Laplacian with weights `c ℓ coth ℓ`.
    pub fn hessian_scale(&self, positions: &[DiskPoint]) -> f64 {
        let n = self.n_surface_vertices();
        let w: Vec<(usize, usize, f64)> = self
            .lift
            .iter()
            .enumerate()
            .map(|(e, &[a, b])| {
                let l = distance_unchecked(positions[a], positions[b]);
                let f = if l < 1e-8 { 1.0 } else { l / l.tanh() };
                (self.cut.pi_v[a], self.cut.pi_v[b], self.weights[e] * f)
            })
            .collect();
        let mut x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } + 0.01 * (i % 7) as f64).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            let mut y = vec![0.0; n];
            for &(a, b, c) in &w {
                let d = x[a] - x[b];
                y[a] += c * d;
                y[b] -= c * d;
            }
            lambda = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            x = y;
        }
        lambda
    }

    /// Default step `0.075 / λ̂`, where `λ̂` is [`Self::hessian_scale`] at the start.
    pub fn default_tau(&self, positions: &[DiskPoint]) -> f64 {
        DEFAULT_STEP_FRACTION / self.hessian_scale(positions)
    }

    /// The scale-aware alternative `0.5 / max_i Σ_j c_ij`.
    pub fn degree_tau(&self) -> f64 {
        let mut deg = vec![0.0; self.n_surface_vertices()];
        for (e, &[a, b]) in self.lift.iter().enumerate() {
            deg[self.cut.pi_v[a]] += self.weights[e];
            deg[self.cut.pi_v[b]] += self.weights[e];
        }
        0.5 / deg.iter().cloned().fold(0.0, f64::max)
    }

    fn step(&self, reps: &[DiskPoint], grad: &[TangentVec], tau: f64, exec: Exec) -> Vec<DiskPoint> {
        exec.map(reps.len(), |v| exp_map(reps[v], &grad[v].scale(-tau)))
    }

    pub fn descend(&self, start: &[DiskPoint], opts: &DescentOptions) -> Result<DescentResult> {
        if !(opts.tau > 0.0) || !opts.tau.is_finite() {
            return Err(Error::InvalidInput(format!("step size must be positive, got {}", opts.tau)));
        }
        let exec = opts.exec;
        let clock = Instant::now();
        let mut positions = start.to_vec();
        let mut reps = self.representatives(&positions);
        let mut grad = self.gradient(&positions, exec)?;
        let e0 = self.energy(&positions, exec);
        let mut energy = e0;
        let mut gmsq = Self::grad_msq(&grad);
        let mut trace = OptimizerTrace::default();
        trace.rows.push(TraceRow {
            iter: 0,
            energy,
            grad_msq: gmsq,
            max_disp: 0.0,
            wall_ms: 0.0,
        });
        let mut max_residual = self.constraint_residual(&positions);
        let mut criterion = Criterion::MaxIter;
        let mut iterations = 0;
        if gmsq < opts.eps_grad {
            criterion = Criterion::Grad;
        } else {
            for k in 1..=opts.max_iter {
                let mut tau = opts.tau;
                let (mut new_reps, mut new_pos, mut new_energy);
                loop {
                    new_reps = self.step(&reps, &grad, tau, exec);
                    new_pos = self.propagate(&new_reps, exec);
                    new_energy = self.energy(&new_pos, exec);
                    if !opts.backtrack || new_energy <= energy || tau < opts.tau * 1e-12 {
                        break;
                    }
                    tau *= 0.5;
                }
                let disp = exec
                    .map(reps.len(), |v| distance_unchecked(reps[v], new_reps[v]))
                    .into_iter()
                    .fold(0.0, f64::max);
                reps = new_reps;
                positions = new_pos;
                energy = new_energy;
                max_residual = max_residual.max(self.constraint_residual(&positions));
                if !energy.is_finite() || energy > 10.0 * e0 {
                    return Err(Error::Diverged {
                        iteration: k,
                        energy,
                        initial: e0,
                    });
                }
                grad = self.gradient_unchecked(&positions, exec);
                gmsq = Self::grad_msq(&grad);
                iterations = k;
                trace.rows.push(TraceRow {
                    iter: k,
                    energy,
                    grad_msq: gmsq,
                    max_disp: disp,
                    wall_ms: clock.elapsed().as_secs_f64() * 1e3,
                });
                if gmsq < opts.eps_grad {
                    criterion = Criterion::Grad;
                    break;
                }
                if disp < opts.eps_disp {
                    criterion = Criterion::Disp;
                    break;
                }
            }
        }
        Ok(DescentResult {
            positions,
            trace,
            criterion,
            iterations,
            final_energy: energy,
            max_residual,
        })
    }

    /// Boundary copies on the polygon sides by cumulative length along each
    /// segment, interior copies by the weighted Laplace system in disk
    /// coordinates. `lengths` and `weights` live on surface edges.
    pub fn initialize_euclidean(&self, lengths: &[f64], weights: &[f64]) -> Result<Vec<DiskPoint>> {
        let cut = &self.cut;
        let nv = cut.mesh.n_vertices();
        let mut pos = vec![DiskPoint::ORIGIN; nv];
        let mut fixed = vec![false; nv];
        let edge_between = |a: usize, b: usize| -> usize {
            let h = cut
                .mesh
                .outgoing(a)
                .into_iter()
                .find(|&h| cut.mesh.dest(h) == b)
                .or_else(|| cut.mesh.outgoing(b).into_iter().find(|&h| cut.mesh.dest(h) == a))
                .expect("consecutive segment vertices share an edge");
            cut.pi_e[cut.mesh.edge_of(h)]
        };
        for k in 0..self.polygon.n_sides() {
            if k > self.polygon.pairing[k] {
                continue;
            }
            let seg = &cut.segments[k];
            let mut cum = vec![0.0];
            for w in seg.windows(2) {
                cum.push(cum.last().unwrap() + lengths[edge_between(w[0], w[1])]);
            }
            let total = *cum.last().unwrap();
            let (a, b) = self.polygon.side(k);
            for (t, &x) in seg.iter().enumerate() {
                pos[x] = geodesic_point(a, b, cum[t] / total);
            }
        }
        // representatives of boundary vertices are now placed; derive the copies
        for (v, &r) in self.scheme.rep.iter().enumerate() {
            if cut.mesh.is_boundary_vertex(r) {
                let p = pos[r];
                for (j, &pv) in cut.pi_v.iter().enumerate() {
                    if pv == v {
                        pos[j] = self.scheme.transform[j].apply(p);
                        fixed[j] = true;
                    }
                }
            }
        }
        let interior: Vec<usize> = (0..nv).filter(|&j| !fixed[j]).collect();
        let mut index = vec![usize::MAX; nv];
        for (i, &j) in interior.iter().enumerate() {
            index[j] = i;
        }
        let m = interior.len();
        let mut t = Triplets::new(m);
        let mut bx = vec![0.0; m];
        let mut by = vec![0.0; m];
        for e in 0..cut.mesh.n_edges() {
            let [a, b] = cut.mesh.edge_vertices(e);
            let c = weights[cut.pi_e[e]];
            for (p, q) in [(a, b), (b, a)] {
                if index[p] == usize::MAX {
                    continue;
                }
                t.add(index[p], index[p], c);
                if index[q] == usize::MAX {
                    bx[index[p]] += c * pos[q].x;
                    by[index[p]] += c * pos[q].y;
                } else {
                    t.add(index[p], index[q], -c);
                }
            }
        }
        let a = t.build();
        let x = pcg(&a, &bx, None, 1e-15, 10 * m + 100)?;
        let y = pcg(&a, &by, None, 1e-15, 10 * m + 100)?;
        for (i, &j) in interior.iter().enumerate() {
            pos[j] = DiskPoint::new(x[i], y[i]).map_err(|_| {
                Error::SingularSystem(format!("Laplace solve left the disk at copy {j}"))
            })?;
        }
        // one final propagation makes the lift exactly equivariant
        Ok(self.propagate(&self.representatives(&pos), Exec::Sequential))
    }

    /// Orientation, signed areas and per-vertex angle sums of the lifted faces.
    pub fn check_embedding(&self, positions: &[DiskPoint]) -> EmbeddingReport {
        let mesh = &self.cut.mesh;
        let mut flipped = 0;
        let mut min_area = f64::INFINITY;
        let mut sums = vec![0.0; self.n_surface_vertices()];
        for f in 0..mesh.n_faces() {
            let [a, b, c] = mesh.face(f);
            let (pa, pb, pc) = (positions[a], positions[b], positions[c]);
            let orient = klein_orientation(pa, pb, pc);
            let area = triangle_area(
                distance_unchecked(pb, pc),
                distance_unchecked(pc, pa),
                distance_unchecked(pa, pb),
            )
            .unwrap_or(0.0);
            let signed = if orient > 0.0 { area } else { -area };
            if orient <= 0.0 {
                flipped += 1;
            }
            min_area = min_area.min(signed);
            for (v, p, q, r) in [(a, pa, pb, pc), (b, pb, pc, pa), (c, pc, pa, pb)] {
                sums[self.cut.pi_v[v]] += corner_angle(p, q, r);
            }
        }
        EmbeddingReport {
            flipped_face_count: flipped,
            min_signed_area: min_area,
            vertex_angle_sums: sums,
        }
    }

    pub fn realization_json(&self, result: &DescentResult, coords3d: Option<&[[f64; 3]]>) -> serde_json::Value {
        realization_json(
            &result.positions,
            Some(result.criterion),
            result.iterations,
            result.final_energy,
            &self.cut,
            &self.polygon,
            coords3d,
        )
    }
}

/// Fraction of the largest Hessian eigenvalue used as the default step.
pub const DEFAULT_STEP_FRACTION: f64 = 0.075;

/// Realization JSON: `positions`, `criterion`, `iterations`, `final_energy`,
/// plus the cut-disk faces, `pi_v`, the polygon and optional 3D coordinates so
/// later stages can run from this file alone.
pub fn realization_json(
    positions: &[DiskPoint],
    criterion: Option<Criterion>,
    iterations: usize,
    final_energy: f64,
    cut: &CutSurface,
    polygon: &FundamentalPolygon,
    coords3d: Option<&[[f64; 3]]>,
) -> serde_json::Value {
    serde_json::json!({
        "positions": positions.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        "criterion": criterion.map(|c| c.as_str()),
        "iterations": iterations,
        "final_energy": final_energy,
        "faces": cut.mesh.faces(),
        "pi_v": cut.pi_v,
        "base": cut.base,
        "segments": cut.segments,
        "polygon": polygon.to_json(),
        "coords3d": coords3d,
    })
}

/// `(E_k − E*) / (E_{k−1} − E*)`; once the previous gap is not resolvable in
/// floating point the ratio is reported as exactly 0 from then on.
pub fn convergence_rate(energies: &[f64], final_energy: f64) -> Result<Vec<f64>> {
    if energies.len() < 2 {
        return Err(Error::InvalidInput("rate needs at least two energies".into()));
    }
    let floor = 4.0 * f64::EPSILON * final_energy.abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(energies.len() - 1);
    let mut underflow = false;
    for w in energies.windows(2) {
        let (prev, cur) = (w[0] - final_energy, w[1] - final_energy);
        if underflow || prev <= floor {
            underflow = true;
            out.push(0.0);
        } else {
            out.push(cur.max(0.0) / prev);
        }
    }
    Ok(out)
}

/// Mean of the last tenth (at least one) of the ratios before the gap
/// underflow guard took over.
pub fn tail_mean(ratios: &[f64]) -> f64 {
    let live = ratios.iter().rposition(|&r| r != 0.0).map_or(0, |i| i + 1);
    let live = &ratios[..live];
    if live.is_empty() {
        return 0.0;
    }
    let n = (live.len() / 10).max(1);
    live[live.len() - n..].iter().sum::<f64>() / n as f64
}
