use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperharmonic::cut::{cut_along, find_loop_system, match_segments_to_sides};
use hyperharmonic::generate::genus_surface;
use hyperharmonic::harmonic::{convergence_rate, tail_mean, DescentOptions, OptimizerTrace};
use hyperharmonic::mesh::{load_mesh, DiscreteMetric, Surface, TriMesh};
use hyperharmonic::pipeline::{load_realization, prepare, MetricFile, Target};
use hyperharmonic::remesh::{regular_template, remesh, TemplateMesh};
use hyperharmonic::render::render_tessellation;
use hyperharmonic::uniformize::{
    apply_positivity_policy, canonical_weights, corner_angles, dump_json, face_areas, hyperbolic_yamabe_flow,
    FlowOptions,
};
use hyperharmonic::{Error, ErrorKind, Exec, Result};

#[derive(Parser)]
#[command(name = "hyperharmonic", version, about = "Hyperbolic harmonic maps of closed surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flat hyperbolic metric and canonical edge weights.
    Uniformize(Common),
    /// Cut along a one-point homology basis and match segments to sides.
    Cut(Common),
    /// Initialize and run the gradient descent.
    Harmonic(Common),
    /// Render a realization and its copies under the group.
    Tessellate(Common),
    /// Pull a template back through a realization.
    Remesh(Common),
    /// Energy convergence ratios of a trace CSV.
    Rate(Common),
    /// Write a synthetic test surface.
    Generate {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 1)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    /// regular:<g> or file:<polygon.json>
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    eps_disp: f64,
    #[arg(long, default_value_t = 1e-12)]
    eps_grad: f64,
    #[arg(long, default_value_t = 200_000)]
    max_iter: usize,
    #[arg(long)]
    weight_floor: Option<f64>,
    /// Recorded in outputs; the pipeline has no randomized steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    word_len: usize,
    /// OFF template with a `.json` sidecar of the same stem, or regular:<n>.
    #[arg(long)]
    template: Option<String>,
    /// Comma-separated step sizes; `20x` means 20 times the default.
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<String>>,
}

impl Common {
    fn target(&self) -> Result<Target> {
        Target::parse(self.target.as_deref().unwrap_or("regular:2"))
    }

    fn check(&self) -> Result<()> {
        if let Some(t) = self.tau {
            if !(t > 0.0) {
                return Err(Error::InvalidInput(format!("--tau must be positive, got {t}")));
            }
        }
        if !(self.eps_disp > 0.0 && self.eps_grad > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        std::fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Parse => 1,
        ErrorKind::Convergence => 2,
        ErrorKind::Topology => 3,
        ErrorKind::Divergence => 4,
        ErrorKind::Other => 5,
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn uniformize(c: &Common) -> Result<()> {
    let (mesh, metric): (TriMesh, DiscreteMetric) = if c.input.extension().is_some_and(|e| e == "json") {
        MetricFile::load(&c.input)?
    } else {
        let s = load_mesh(&c.input)?;
        let m = s.induced_metric()?;
        (s.mesh, m)
    };
    let flow = hyperbolic_yamabe_flow(&mesh, &metric, FlowOptions::default())?;
    let (w, policy) = apply_positivity_policy(&canonical_weights(&mesh, &flow.metric, Exec::default())?, c.weight_floor)?;
    let max_k = flow.curvature.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let area: f64 = face_areas(&corner_angles(&mesh, &flow.metric, Exec::default())?).iter().sum();
    let mut v = dump_json(&flow.factors.u, &flow.curvature, &w.c);
    let extra = serde_json::json!({
        "n_vertices": mesh.n_vertices(),
        "faces": mesh.faces(),
        "lengths": flow.metric.lengths,
        "base_scale": flow.base_scale,
        "iterations": flow.iterations,
        "max_abs_curvature": max_k,
        "total_area": area,
        "weight_floor": policy.floor,
        "weights_reset": policy.reset,
    });
    if let (Some(o), Some(e)) = (v.as_object_mut(), extra.as_object()) {
        o.extend(e.clone());
    }
    write(&c.out("flat_metric.json"), &pretty(&v))?;
    let max_u = flow.factors.u.iter().fold(0.0f64, |a, u| a.max(u.abs()));
    println!(
        "max_abs_K={max_k:e} total_area={area} newton_steps={} max_abs_u={max_u:e} base_scale={} weights_reset={}",
        flow.iterations, flow.base_scale, policy.reset
    );
    Ok(())
}

fn cut(c: &Common) -> Result<()> {
    let s = load_mesh(&c.input)?;
    s.mesh.validate_pipeline_input()?;
    let polygon = c.target()?.polygon()?;
    let cut = cut_along(&s.mesh, &find_loop_system(&s.mesh)?)?;
    let assign = match_segments_to_sides(&cut, &polygon)?;
    write(&c.out("cut.json"), &pretty(&cut.to_json(Some(&assign))))?;
    println!(
        "base={} segments={} disk_vertices={} disk_faces={}",
        cut.base,
        cut.n_segments(),
        cut.mesh.n_vertices(),
        cut.mesh.n_faces()
    );
    Ok(())
}

fn edges_of(mesh: &TriMesh) -> Vec<[usize; 2]> {
    (0..mesh.n_edges()).map(|e| mesh.edge_vertices(e)).collect()
}

fn harmonic(c: &Common) -> Result<()> {
    let s: Surface = load_mesh(&c.input)?;
    let polygon = c.target()?.polygon()?;
    let prep = prepare(&s, polygon, c.weight_floor, Exec::default())?;
    let p = &prep.problem;
    let default_tau = p.default_tau(&prep.init);
    let edges = edges_of(&p.cut.mesh);
    let options = |tau: f64| DescentOptions {
        tau,
        eps_disp: c.eps_disp,
        eps_grad: c.eps_grad,
        max_iter: c.max_iter,
        backtrack: false,
        exec: Exec::default(),
    };
    let init_report = p.check_embedding(&prep.init);
    eprintln!(
        "initialization: flipped={} energy={} default_tau={default_tau:e} weights_reset={}",
        init_report.flipped_face_count,
        p.energy(&prep.init, Exec::default()),
        prep.policy.reset
    );
    if let Some(list) = &c.tau_list {
        let mut diverged = None;
        for (i, item) in list.iter().enumerate() {
            let tau = match item.strip_suffix('x') {
                Some(m) => m.parse::<f64>().map(|m| m * default_tau),
                None => item.parse::<f64>(),
            }
            .map_err(|_| Error::InvalidInput(format!("bad --tau-list entry {item:?}")))?;
            match p.descend(&prep.init, &options(tau)) {
                Ok(r) => {
                    let increases = r.trace.rows.windows(2).filter(|w| w[1].energy > w[0].energy).count();
                    write(&c.out(&format!("trace_{i}.csv")), &r.trace.to_csv(true))?;
                    println!(
                        "tau={tau:e} criterion={} iterations={} final_energy={} energy_increases={increases}",
                        r.criterion.as_str(),
                        r.iterations,
                        r.final_energy
                    );
                }
                Err(e) => {
                    println!("tau={tau:e} error={e}");
                    if e.kind() == ErrorKind::Divergence {
                        diverged = Some(e);
                    }
                }
            }
        }
        return diverged.map_or(Ok(()), Err);
    }
    let tau = c.tau.unwrap_or(default_tau);
    write(&c.out("initial.svg"), &render_tessellation(&prep.init, &edges, &p.polygon, 0).0)?;
    let r = p.descend(&prep.init, &options(tau))?;
    let report = p.check_embedding(&r.positions);
    write(&c.out("trace.csv"), &r.trace.to_csv(true))?;
    let mut json = p.realization_json(&r, Some(&s.coords));
    json["seed"] = c.seed.into();
    json["tau"] = tau.into();
    write(&c.out("realization.json"), &pretty(&json))?;
    write(&c.out("final.svg"), &render_tessellation(&r.positions, &edges, &p.polygon, 0).0)?;
    eprintln!(
        "max_constraint_residual={:e} max_angle_sum_error={:e} min_signed_area={:e}",
        r.max_residual,
        report.max_angle_sum_error(),
        report.min_signed_area
    );
    println!(
        "criterion={} iterations={} final_energy={} flipped={}",
        r.criterion.as_str(),
        r.iterations,
        r.final_energy,
        report.flipped_face_count
    );
    Ok(())
}

fn tessellate(c: &Common) -> Result<()> {
    let r = load_realization(&c.input)?;
    let (svg, copies) = render_tessellation(&r.positions, &edges_of(&r.cut.mesh), &r.polygon, c.word_len);
    write(&c.out("tessellation.svg"), &svg)?;
    let problem = hyperharmonic::harmonic::HarmonicProblem::new(
        r.cut.clone(),
        r.polygon.clone(),
        vec![1.0; r.cut.pi_e.iter().max().map_or(0, |m| m + 1)],
    )?;
    println!(
        "copies={copies} paired_boundary_gap={:e}",
        problem.constraint_residual(&r.positions)
    );
    Ok(())
}

fn load_template(spec: &str, polygon: &hyperharmonic::fuchsian::FundamentalPolygon) -> Result<TemplateMesh> {
    if let Some(n) = spec.strip_prefix("regular:") {
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::InvalidInput(format!("bad template subdivision {spec:?}")))?;
        return regular_template(polygon, n);
    }
    let off = PathBuf::from(spec);
    TemplateMesh::load(&off, off.with_extension("json"), polygon)
}

fn remesh_cmd(c: &Common) -> Result<()> {
    let r = load_realization(&c.input)?;
    let coords = r
        .coords3d
        .clone()
        .ok_or_else(|| Error::InvalidInput("realization has no 3D coordinates".into()))?;
    let spec = c
        .template
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("remesh needs --template".into()))?;
    let template = load_template(spec, &r.polygon)?;
    let out = remesh(&template, &r.positions, &r.cut, &r.polygon, &coords, c.word_len.max(4), Exec::default())?;
    write(&c.out("remeshed.off"), &out.surface.to_off())?;
    eprintln!("base_valence_histogram={:?}", out.base_valence);
    println!(
        "vertices={} faces={} genus={} atlas_size={} max_glue_gap={:e}",
        out.surface.mesh.n_vertices(),
        out.surface.mesh.n_faces(),
        out.surface.mesh.genus()?,
        out.atlas_size,
        out.max_glue_gap
    );
    Ok(())
}

fn rate(c: &Common) -> Result<()> {
    let trace = OptimizerTrace::from_csv(&std::fs::read_to_string(&c.input)?)?;
    let e = trace.energies();
    let final_energy = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratios = convergence_rate(&e, final_energy)?;
    let mut csv = String::from("iter,ratio\n");
    for (k, r) in ratios.iter().enumerate() {
        csv.push_str(&format!("{},{r:e}\n", trace.rows[k + 1].iter));
    }
    write(&c.out("rate.csv"), &csv)?;
    println!("ratios={} tail_mean={}", ratios.len(), tail_mean(&ratios));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { genus, resolution, out } => {
            let s = genus_surface(*genus, *resolution)?;
            s.save_off(out)?;
            println!(
                "vertices={} faces={} genus={}",
                s.mesh.n_vertices(),
                s.mesh.n_faces(),
                s.mesh.genus()?
            );
            Ok(())
        }
        Command::Uniformize(c) => c.check().and_then(|_| uniformize(c)),
        Command::Cut(c) => c.check().and_then(|_| cut(c)),
        Command::Harmonic(c) => c.check().and_then(|_| harmonic(c)),
        Command::Tessellate(c) => c.check().and_then(|_| tessellate(c)),
        Command::Remesh(c) => c.check().and_then(|_| remesh_cmd(c)),
        Command::Rate(c) => c.check().and_then(|_| rate(c)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
