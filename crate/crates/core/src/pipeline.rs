//! Stage orchestration shared by the command line and the end-to-end tests.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cut::{cut_along, find_loop_system, CutSurface};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fuchsian::{regular_polygon, FundamentalPolygon, PolygonJson};
use crate::harmonic::{Criterion, HarmonicProblem};
use crate::hypgeom::DiskPoint;
use crate::mesh::{DiscreteMetric, Surface, TriMesh};
use crate::uniformize::{
    apply_positivity_policy, canonical_weights, euclidean_cotangent_weights, hyperbolic_yamabe_flow, FlowOptions,
    FlowResult, PolicyReport,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Regular(usize),
    File(PathBuf),
}

impl Target {
    /// `regular:<g>` or `file:<path>`.
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(g) = s.strip_prefix("regular:") {
            let g = g
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad genus in target {s:?}")))?;
            Ok(Target::Regular(g))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(Target::File(PathBuf::from(p)))
        } else {
            Err(Error::InvalidInput(format!(
                "target must be regular:<g> or file:<path>, got {s:?}"
            )))
        }
    }

    pub fn polygon(&self) -> Result<FundamentalPolygon> {
        match self {
            Target::Regular(g) => regular_polygon(*g),
            Target::File(p) => {
                let j: PolygonJson = serde_json::from_str(&std::fs::read_to_string(p)?)?;
                FundamentalPolygon::from_json(&j)
            }
        }
    }
}

/// Everything up to (and including) the Euclidean initialization.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub flow: FlowResult,
    pub policy: PolicyReport,
    pub problem: HarmonicProblem,
    pub init: Vec<DiskPoint>,
}

/// Flow, weights with the positivity policy, cut, side matching and the
/// Euclidean initialization.
pub fn prepare(surface: &Surface, polygon: FundamentalPolygon, weight_floor: Option<f64>, exec: Exec) -> Result<Prepared> {
    let genus = surface.mesh.validate_pipeline_input()?;
    if genus != polygon.genus {
        return Err(Error::Topology(format!(
            "surface has genus {genus} but the target polygon has genus {}",
            polygon.genus
        )));
    }
    let flow = hyperbolic_yamabe_flow(
        &surface.mesh,
        &surface.induced_metric()?,
        FlowOptions {
            exec,
            ..FlowOptions::default()
        },
    )?;
    let (weights, policy) = apply_positivity_policy(&canonical_weights(&surface.mesh, &flow.metric, exec)?, weight_floor)?;
    let (euclid, _) = apply_positivity_policy(&euclidean_cotangent_weights(&surface.mesh, &flow.metric, exec)?, weight_floor)?;
    let cut = cut_along(&surface.mesh, &find_loop_system(&surface.mesh)?)?.aligned_to(&polygon)?;
    let problem = HarmonicProblem::new(cut, polygon, weights.c)?;
    let init = problem.initialize_euclidean(&flow.metric.lengths, &euclid.c)?;
    Ok(Prepared {
        flow,
        policy,
        problem,
        init,
    })
}

/// A realization read back from its JSON file.
#[derive(Clone, Debug)]
pub struct LoadedRealization {
    pub positions: Vec<DiskPoint>,
    pub cut: CutSurface,
    pub polygon: FundamentalPolygon,
    pub coords3d: Option<Vec<[f64; 3]>>,
    pub criterion: Option<Criterion>,
}

#[derive(Deserialize)]
struct RealizationFile {
    positions: Vec<[f64; 2]>,
    criterion: Option<Criterion>,
    faces: Vec<[usize; 3]>,
    pi_v: Vec<usize>,
    base: usize,
    segments: Vec<Vec<usize>>,
    polygon: PolygonJson,
    coords3d: Option<Vec<[f64; 3]>>,
}

pub fn load_realization(path: impl AsRef<Path>) -> Result<LoadedRealization> {
    let f: RealizationFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let polygon = FundamentalPolygon::from_json(&f.polygon)?;
    let positions = f
        .positions
        .iter()
        .map(|p| DiskPoint::new(p[0], p[1]))
        .collect::<Result<Vec<_>>>()?;
    let n = f.pi_v.iter().max().map_or(0, |m| m + 1);
    let disk = TriMesh::new(positions.len(), f.faces.clone())?;
    let closed = TriMesh::new(n, f.faces.iter().map(|t| t.map(|v| f.pi_v[v])).collect())?;
    let first = f
        .segments
        .first()
        .and_then(|s| s.first())
        .copied()
        .ok_or_else(|| Error::InvalidInput("realization has no segments".into()))?;
    let cut = CutSurface::from_disk(disk, f.pi_v, &closed, f.base, Some(first))?.aligned_to(&polygon)?;
    if cut.segments != f.segments {
        return Err(Error::InconsistentPairing("stored segments disagree with the rebuilt cut".into()));
    }
    Ok(LoadedRealization {
        positions,
        cut,
        polygon,
        coords3d: f.coords3d,
        criterion: f.criterion,
    })
}

/// Closed-surface flat metric stored by the uniformize stage.
#[derive(Clone, Debug, Deserialize)]
pub struct MetricFile {
    pub n_vertices: usize,
    pub faces: Vec<[usize; 3]>,
    pub lengths: Vec<f64>,
}

impl MetricFile {
    pub fn load(path: impl AsRef<Path>) -> Result<(TriMesh, DiscreteMetric)> {
        let m: MetricFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let mesh = TriMesh::new(m.n_vertices, m.faces)?;
        mesh.validate_closed()?;
        if m.lengths.len() != mesh.n_edges() {
            return Err(Error::InvalidInput(format!(
                "{} lengths for {} edges",
                m.lengths.len(),
                mesh.n_edges()
            )));
        }
        Ok((mesh, DiscreteMetric { lengths: m.lengths }))
    }
}
