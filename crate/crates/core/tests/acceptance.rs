//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Failing criteria are reported,
//! not hidden; the process exits successfully so the rest of the suite's
//! result stays readable, and the summary line lists what failed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hyperharmonic::fuchsian::{regular_polygon, regular_radius};
use hyperharmonic::generate::genus_surface;
use hyperharmonic::harmonic::{convergence_rate, tail_mean, DescentOptions, DescentResult, HarmonicProblem};
use hyperharmonic::hypgeom::{
    exp_map, hyp_distance, hyp_law_of_cosines, log_map, DiskPoint, Mobius, TangentVec,
};
use hyperharmonic::mesh::{DiscreteMetric, Surface};
use hyperharmonic::pipeline::{prepare, Prepared};
use hyperharmonic::remesh::{regular_template, remesh, TemplateMesh};
use hyperharmonic::uniformize::{
    canonical_weights, corner_angles, euclidean_cotangent_weights, face_areas, gauss_bonnet_residual,
    hyperbolic_yamabe_flow, is_delaunay_edge, scale_metric, FlowOptions,
};
use hyperharmonic::Exec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn random_point(rng: &mut ChaCha8Rng, max_dist: f64) -> DiskPoint {
    let r = (rng.random_range(0.0..max_dist) / 2.0).tanh();
    let t = rng.random_range(0.0..2.0 * PI);
    DiskPoint::new_unchecked(r * t.cos(), r * t.sin())
}

fn c1_kernel() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_rt: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_point(&mut rng, 3.0);
        let d = rng.random_range(0.0..10.0);
        let th = rng.random_range(0.0..2.0 * PI);
        let v = TangentVec::from_orthonormal(p, d * th.cos(), d * th.sin());
        let q = exp_map(p, &v);
        let back = log_map(p, q);
        let err = (back.vx - v.vx).hypot(back.vy - v.vy) * p.conformal_factor() / d.max(1.0);
        worst_rt = worst_rt.max(err);
    }
    let mut worst_inv: f64 = 0.0;
    for _ in 0..1000 {
        let (p, q) = (random_point(&mut rng, 4.0), random_point(&mut rng, 4.0));
        let a = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        let b = random_point(&mut rng, 2.0).to_complex() * a;
        let m = Mobius::new(a, b).unwrap();
        let d0 = hyp_distance(p, q).unwrap();
        let d1 = hyp_distance(m.apply(p), m.apply(q)).unwrap();
        worst_inv = worst_inv.max((d0 - d1).abs() / d0.max(1.0));
    }
    let mut worst_loc: f64 = 0.0;
    for _ in 0..1000 {
        let (b, c) = (rng.random_range(0.01..5.0), rng.random_range(0.01..5.0));
        let a = hyp_law_of_cosines(b, c, PI / 2.0);
        worst_loc = worst_loc.max((a.cosh() - b.cosh() * c.cosh()).abs() / (b.cosh() * c.cosh()));
    }
    let secs = t0.elapsed().as_secs_f64();
    (
        worst_rt < 1e-10 && worst_inv < 1e-12 && worst_loc < 1e-12 && secs < 1.0,
        format!("exp/log {worst_rt:.1e}, invariance {worst_inv:.1e}, right triangle {worst_loc:.1e}, {secs:.3}s"),
    )
}

fn c2_gauss_bonnet() -> Outcome {
    let s = genus_surface(2, 3).unwrap();
    let t0 = Instant::now();
    let flow = hyperbolic_yamabe_flow(&s.mesh, &s.induced_metric().unwrap(), FlowOptions::default()).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let max_k = flow.curvature.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let area: f64 = face_areas(&corner_angles(&s.mesh, &flow.metric, Exec::default()).unwrap()).iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_gb: f64 = gauss_bonnet_residual(&s.mesh, &flow.metric, Exec::default()).unwrap().abs();
    let mut metrics = 1;
    for _ in 0..20 {
        let u: Vec<f64> = (0..s.mesh.n_vertices()).map(|_| rng.random_range(-0.05..0.05)).collect();
        let m = scale_metric(&s.mesh, &flow.metric, &u);
        if let Ok(r) = gauss_bonnet_residual(&s.mesh, &m, Exec::default()) {
            worst_gb = worst_gb.max(r.abs());
            metrics += 1;
        }
    }
    let ok = worst_gb < 1e-9 && max_k < 1e-8 && (area - 4.0 * PI).abs() < 1e-6 && secs < 30.0;
    (
        ok,
        format!(
            "{} faces, GB residual {worst_gb:.1e} over {metrics} metrics, max|K| {max_k:.1e}, area-4pi {:.1e}, {secs:.2}s",
            s.mesh.n_faces(),
            area - 4.0 * PI
        ),
    )
}

fn c3_weights() -> Outcome {
    let s = genus_surface(2, 1).unwrap();
    let flat = hyperbolic_yamabe_flow(&s.mesh, &s.induced_metric().unwrap(), FlowOptions::default()).unwrap().metric;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut total) = (0usize, 0usize);
    for trial in 0..10 {
        let amp = 0.05 * trial as f64;
        let u: Vec<f64> = (0..s.mesh.n_vertices()).map(|_| rng.random_range(-amp..=amp)).collect();
        let m = scale_metric(&s.mesh, &flat, &u);
        let Ok(w) = canonical_weights(&s.mesh, &m, Exec::default()) else { continue };
        for e in 0..s.mesh.n_edges() {
            total += 1;
            if is_delaunay_edge(&s.mesh, &m, e).unwrap() == (w.c[e] > 0.0) {
                agree += 1;
            }
        }
    }
    let tiny = DiscreteMetric { lengths: vec![1e-3; s.mesh.n_edges()] };
    let h = canonical_weights(&s.mesh, &tiny, Exec::default()).unwrap();
    let eu = euclidean_cotangent_weights(&s.mesh, &tiny, Exec::default()).unwrap();
    let gap = h.c.iter().zip(&eu.c).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    (
        agree == total && total > 0 && gap < 1e-4,
        format!("Delaunay/positivity agree on {agree}/{total} edges, small-edge relative gap {gap:.1e}"),
    )
}

fn c4_polygon() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for g in [2usize, 3] {
        let poly = regular_polygon(g).unwrap();
        let angle_err = (poly.interior_angles().iter().sum::<f64>() - 2.0 * PI).abs();
        let n = 4.0 * g as f64;
        let cosh_r = 1.0 / (PI / n).tan().powi(2);
        let s_closed = ((cosh_r - 1.0) / (cosh_r + 1.0)).sqrt();
        let s = regular_radius(g);
        let s_err = (s - s_closed).abs();
        let v0 = poly.vertices[0];
        let mut cyc_err: f64 = 0.0;
        for (k, el) in poly.elliptic_cycle().unwrap() {
            cyc_err = cyc_err.max(dist(el.transform.apply(v0), poly.vertices[k]));
        }
        let (last, el) = poly.cycle.last().unwrap().clone();
        let closing = poly.side_maps[last].compose(&el.transform);
        cyc_err = cyc_err.max(dist(closing.apply(v0), v0));
        ok &= angle_err < 1e-10 && s_err < 1e-9 && cyc_err < 1e-10;
        if g == 2 {
            ok &= (s - 0.84090).abs() < 1e-5;
        }
        details.push(format!("g={g}: angle {angle_err:.1e}, s={s:.6} (gap {s_err:.1e}), cycle {cyc_err:.1e}"));
    }
    (ok, details.join("; "))
}

fn dl_dp(p: DiskPoint, q: DiskPoint) -> [f64; 2] {
    let (ap, aq) = (1.0 - p.norm_sqr(), 1.0 - q.norm_sqr());
    let (dx, dy) = (p.x - q.x, p.y - q.y);
    let n2 = dx * dx + dy * dy;
    let delta = 2.0 * n2 / (ap * aq);
    let s = (delta * (delta + 2.0)).sqrt();
    [
        (4.0 * dx / (ap * aq) + 4.0 * n2 * p.x / (ap * ap * aq)) / s,
        (4.0 * dy / (ap * aq) + 4.0 * n2 * p.y / (ap * ap * aq)) / s,
    ]
}

fn c5_gradient(prep: &Prepared) -> Outcome {
    let p = &prep.problem;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = p.cut.base;
    let is_bd = |v: usize| p.cut.mesh.is_boundary_vertex(p.scheme.rep[v]);
    let boundary: Vec<usize> = (0..p.n_surface_vertices()).filter(|&v| v != base && is_bd(v)).collect();
    let interior: Vec<usize> = (0..p.n_surface_vertices()).filter(|&v| !is_bd(v)).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let reps: Vec<DiskPoint> = p
            .representatives(&prep.init)
            .iter()
            .map(|&x| exp_map(x, &TangentVec::from_orthonormal(x, rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05))))
            .collect();
        let state = p.propagate(&reps, Exec::Sequential);
        let grad = p.gradient(&state, Exec::default()).unwrap();
        let picks = [
            base,
            boundary[rng.random_range(0..boundary.len())],
            interior[rng.random_range(0..interior.len())],
        ];
        for v in picks {
            let th = rng.random_range(0.0..2.0 * PI);
            let dir = TangentVec::from_orthonormal(reps[v], th.cos(), th.sin());
            let h = 1e-6;
            let at = |s: f64| {
                let mut r = reps.clone();
                r[v] = exp_map(reps[v], &dir.scale(s));
                p.energy(&p.propagate(&r, Exec::Sequential), Exec::Sequential)
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            let an = grad[v].dot(&dir);
            worst = worst.max((fd - an).abs() / an.abs().max(grad[v].norm()).max(1e-8));
        }
    }
    // coordinate-derivative oracle at interior points well inside the disk
    let grad = p.gradient(&prep.init, Exec::default()).unwrap();
    let mut eu_cart = vec![[0.0f64; 2]; p.n_surface_vertices()];
    for e in 0..p.n_surface_edges() {
        let [a, b] = p.edge_lift(e);
        let l = dist(prep.init[a], prep.init[b]);
        for (x, y) in [(a, b), (b, a)] {
            let v = p.cut.pi_v[x];
            if p.scheme.rep[v] != x || is_bd(v) {
                continue;
            }
            let d = dl_dp(prep.init[x], prep.init[y]);
            eu_cart[v][0] += p.weights[e] * l * d[0];
            eu_cart[v][1] += p.weights[e] * l * d[1];
        }
    }
    let (mut rel_worst, mut checked) = (0.0f64, 0);
    for &v in &interior {
        let x = prep.init[p.scheme.rep[v]];
        if x.norm_sqr() >= 0.25 {
            continue;
        }
        // Riemannian gradient = coordinate gradient / conformal factor²
        let s = (1.0 - x.norm_sqr()).powi(2) / 4.0;
        let (g, e) = (grad[v], eu_cart[v]);
        let rel = (g.vx - s * e[0]).hypot(g.vy - s * e[1]) / (s * e[0].hypot(e[1]));
        rel_worst = rel_worst.max(rel);
        checked += 1;
    }
    (
        worst < 1e-5 && checked > 0 && rel_worst < 1e-9,
        format!(
            "150 directional checks at 50 states, worst relative gap {worst:.1e}; coordinate oracle at {checked} interior points, worst relative gap {rel_worst:.1e}"
        ),
    )
}

fn c6_isometry() -> Outcome {
    let poly = regular_polygon(2).unwrap();
    let t = regular_template(&poly, 6).unwrap();
    let (problem, pos) = t.isometric_realization(&poly).unwrap();
    let g = problem.gradient(&pos, Exec::default()).unwrap();
    let msq = HarmonicProblem::grad_msq(&g);
    (
        msq < 1e-10,
        format!("{} faces on the octagon, mean squared gradient {msq:.1e}", t.mesh.n_faces()),
    )
}

fn c7_end_to_end(prep: &Prepared, run: &DescentResult, secs: f64) -> Outcome {
    let p = &prep.problem;
    let e = run.trace.energies();
    let monotone = e.windows(2).all(|w| w[1] < w[0]);
    let ratios = convergence_rate(&e, run.final_energy).unwrap();
    let live: Vec<f64> = ratios.iter().copied().take_while(|&r| r != 0.0).collect();
    let terminal = &live[live.len().saturating_sub((live.len() / 10).max(1))..];
    let terminal_ok = terminal.iter().all(|&r| r < 1.0);
    let tail = tail_mean(&ratios);
    let emb = p.check_embedding(&run.positions);
    let init_flips = p.check_embedding(&prep.init).flipped_face_count;
    let ok = run.max_residual < 1e-12
        && monotone
        && terminal_ok
        && tail < 0.999
        && emb.flipped_face_count == 0
        && emb.max_angle_sum_error() < 1e-6
        && secs < 300.0;
    (
        ok,
        format!(
            "{} faces, {} iterations ({}), residual {:.1e}, monotone {monotone}, tail mean {tail:.5}, flips {init_flips} -> {}, angle sums {:.1e}, {secs:.1}s",
            p.cut.mesh.n_faces(),
            run.iterations,
            run.criterion.as_str(),
            run.max_residual,
            emb.flipped_face_count,
            emb.max_angle_sum_error()
        ),
    )
}

fn c8_large_step(prep: &Prepared) -> Outcome {
    let p = &prep.problem;
    let tau = 20.0 * p.default_tau(&prep.init);
    match p.descend(&prep.init, &DescentOptions::with_tau(tau)) {
        Err(e) => (false, format!("aborted: {e}")),
        Ok(r) => {
            let e = r.trace.energies();
            let increases = e.windows(2).filter(|w| w[1] > w[0]).count();
            let gm: Vec<f64> = r.trace.rows.iter().map(|r| r.grad_msq).collect();
            let grad_increases = gm.windows(2).filter(|w| w[1] > w[0]).count();
            (
                r.final_energy < e[0] && increases > 0,
                format!(
                    "no abort, {} iterations, energy {:.4} -> {:.4}, energy increases {increases}, gradient-norm increases {grad_increases}",
                    r.iterations, e[0], r.final_energy
                ),
            )
        }
    }
}

fn c9_uniqueness(prep: &Prepared, lengths: &[f64]) -> Outcome {
    let p = &prep.problem;
    let ones = vec![1.0; lengths.len()];
    let other = p.initialize_euclidean(&ones, &ones).unwrap();
    let start_gap = (0..other.len())
        .map(|j| dist(other[j], prep.init[j]))
        .fold(0.0, f64::max);
    let mut opts = DescentOptions::with_tau(20.0 * p.default_tau(&prep.init));
    opts.eps_grad = 1e-26;
    opts.eps_disp = 1e-15;
    let a = p.descend(&prep.init, &opts).unwrap();
    let b = p.descend(&other, &opts).unwrap();
    let gap = (0..a.positions.len())
        .map(|j| dist(a.positions[j], b.positions[j]))
        .fold(0.0, f64::max);
    (
        gap < 1e-5,
        format!("initializations {start_gap:.3} apart, converged maps {gap:.1e} apart"),
    )
}

fn c10_remesh(prep: &Prepared, run: &DescentResult, surface: &Surface) -> Outcome {
    let p = &prep.problem;
    let t = TemplateMesh::from_realization(&p.cut, &p.polygon, &run.positions).unwrap();
    let out = remesh(&t, &run.positions, &p.cut, &p.polygon, &surface.coords, 4, Exec::default()).unwrap();
    let (_, glued) = t.quotient().unwrap();
    // glued vertex ↔ original vertex must be a bijection carrying faces to faces
    let n = surface.mesh.n_vertices();
    let mut to_orig = vec![usize::MAX; out.surface.mesh.n_vertices()];
    let mut bijective = out.surface.mesh.n_vertices() == n;
    for (j, &g) in glued.iter().enumerate() {
        let v = p.cut.pi_v[j];
        if to_orig[g] == usize::MAX {
            to_orig[g] = v;
        } else if to_orig[g] != v {
            bijective = false;
        }
    }
    let mut seen = vec![false; n];
    for &v in &to_orig {
        if v == usize::MAX || std::mem::replace(&mut seen[v], true) {
            bijective = false;
            break;
        }
    }
    let mut faces_match = bijective;
    if bijective {
        let mut orig: Vec<[usize; 3]> = surface.mesh.faces().iter().map(|f| canon(*f)).collect();
        let mut mapped: Vec<[usize; 3]> = out.surface.mesh.faces().iter().map(|f| canon(f.map(|g| to_orig[g]))).collect();
        orig.sort();
        mapped.sort();
        faces_match = orig == mapped;
    }
    let pos_err = if bijective {
        (0..to_orig.len())
            .map(|g| {
                let (a, b) = (out.surface.coords[g], surface.coords[to_orig[g]]);
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let tmpl = regular_template(&p.polygon, 8).unwrap();
    let other = remesh(&tmpl, &run.positions, &p.cut, &p.polygon, &surface.coords, 4, Exec::default());
    let (closed_ok, other_msg) = match other {
        Ok(o) => {
            let g = o.surface.mesh.genus().unwrap_or(0);
            let closed = o.surface.mesh.validate_closed().is_ok();
            (
                g == 2 && closed,
                format!(
                    "octagon template: {} faces, closed {closed}, genus {g}, atlas {} copies, base valences {:?}",
                    o.surface.mesh.n_faces(),
                    o.atlas_size,
                    o.base_valence
                ),
            )
        }
        Err(e) => (false, format!("octagon template failed: {e}")),
    };
    (
        bijective && faces_match && pos_err < 1e-9 && closed_ok,
        format!("round trip isomorphic {faces_match}, position error {pos_err:.1e}; {other_msg}"),
    )
}

fn canon(f: [usize; 3]) -> [usize; 3] {
    let k = (0..3).min_by_key(|&i| f[i]).unwrap();
    [f[k], f[(k + 1) % 3], f[(k + 2) % 3]]
}

fn report(n: usize, f: impl FnOnce() -> Outcome, failed: &mut Vec<usize>) {
    let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        (false, format!("panicked: {msg}"))
    });
    if !ok {
        failed.push(n);
    }
    println!("criterion {n:>2}: {}  {detail}", if ok { "PASS" } else { "FAIL" });
}

fn main() {
    let mut failed = Vec::new();
    report(1, c1_kernel, &mut failed);
    report(2, c2_gauss_bonnet, &mut failed);
    report(3, c3_weights, &mut failed);
    report(4, c4_polygon, &mut failed);

    let surface = genus_surface(2, 1).unwrap();
    let t0 = Instant::now();
    let prep = prepare(&surface, regular_polygon(2).unwrap(), None, Exec::default()).unwrap();
    let run = prep
        .problem
        .descend(&prep.init, &DescentOptions::with_tau(prep.problem.default_tau(&prep.init)))
        .unwrap();
    let secs = t0.elapsed().as_secs_f64();

    report(5, || c5_gradient(&prep), &mut failed);
    report(6, c6_isometry, &mut failed);
    report(7, || c7_end_to_end(&prep, &run, secs), &mut failed);
    report(8, || c8_large_step(&prep), &mut failed);
    report(9, || c9_uniqueness(&prep, &prep.flow.metric.lengths), &mut failed);
    report(10, || c10_remesh(&prep, &run, &surface), &mut failed);
    if failed.is_empty() {
        println!("acceptance: 10/10 criteria pass");
    } else {
        println!(
            "acceptance: {}/10 criteria pass; failing: {:?}",
            10 - failed.len(),
            failed
        );
    }
}

fn dist(p: DiskPoint, q: DiskPoint) -> f64 {
    hyp_distance(p, q).unwrap()
}
