//! Pull-back of a template mesh on the fundamental polygon to the original
//! surface through a converged realization.
//!
//! Point location happens in the Klein model, where geodesic triangles are
//! straight. Interpolation weights are the Klein barycentrics divided by the
//! hyperboloid height of each corner; unlike raw Klein barycentrics these do
//! not change when the triangle and point are moved by an isometry, so
//! paired boundary vertices located in different copies land on the same
//! surface point.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cut::CutSurface;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fuchsian::{FundamentalPolygon, GroupElement};
use crate::harmonic::HarmonicProblem;
use crate::hypgeom::{distance_unchecked, geodesic_point, DiskPoint, Mobius};
use crate::mesh::{euclidean_distance, parse_off, DiscreteMetric, Surface, TriMesh};
use crate::uniformize::canonical_weights;

/// Barycentric slack for point-in-triangle tests.
pub const LOCATE_TOL: f64 = 1e-12;
/// Largest 3D gap tolerated between paired boundary vertices.
pub const GLUE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTag {
    pub vertex: usize,
    pub side: usize,
    pub param: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TemplateSidecar {
    pub boundary: Vec<BoundaryTag>,
    pub pairs: Vec<[usize; 2]>,
}

/// A triangulated disk in the polygon whose paired boundary vertices are
/// related by side maps.
#[derive(Clone, Debug)]
pub struct TemplateMesh {
    pub mesh: TriMesh,
    pub positions: Vec<DiskPoint>,
    pub boundary: Vec<BoundaryTag>,
    pub pairs: Vec<[usize; 2]>,
}

impl TemplateMesh {
    pub fn new(
        mesh: TriMesh,
        positions: Vec<DiskPoint>,
        boundary: Vec<BoundaryTag>,
        pairs: Vec<[usize; 2]>,
        polygon: &FundamentalPolygon,
    ) -> Result<Self> {
        if positions.len() != mesh.n_vertices() {
            return Err(Error::InvalidInput("template positions do not match its vertices".into()));
        }
        for p in &positions {
            p.validate()?;
        }
        for t in &boundary {
            if t.vertex >= mesh.n_vertices() || t.side >= polygon.n_sides() {
                return Err(Error::InvalidInput(format!("bad boundary tag {t:?}")));
            }
        }
        for &[a, b] in &pairs {
            if a >= mesh.n_vertices() || b >= mesh.n_vertices() {
                return Err(Error::InvalidInput(format!("pair [{a}, {b}] out of range")));
            }
            let gap = polygon
                .side_maps
                .iter()
                .flat_map(|m| [*m, m.inverse()])
                .map(|m| distance_unchecked(m.apply(positions[a]), positions[b]))
                .fold(f64::INFINITY, f64::min);
            if gap > 1e-9 {
                return Err(Error::InconsistentPairing(format!(
                    "template vertices {a} and {b} are not related by a side map (gap {gap:e})"
                )));
            }
        }
        Ok(TemplateMesh {
            mesh,
            positions,
            boundary,
            pairs,
        })
    }

    /// OFF with planar coordinates plus the JSON sidecar.
    pub fn load(off: impl AsRef<Path>, sidecar: impl AsRef<Path>, polygon: &FundamentalPolygon) -> Result<Self> {
        let (coords, faces) = parse_off(&std::fs::read_to_string(off)?)?;
        let side: TemplateSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
        Self::from_parts(coords, faces, side, polygon)
    }

    pub fn from_parts(
        coords: Vec<[f64; 3]>,
        faces: Vec<[usize; 3]>,
        sidecar: TemplateSidecar,
        polygon: &FundamentalPolygon,
    ) -> Result<Self> {
        let mut positions = Vec::with_capacity(coords.len());
        for (i, c) in coords.iter().enumerate() {
            if c[2].abs() > 1e-12 {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("template vertex {i} has non-zero z"),
                });
            }
            positions.push(DiskPoint::new(c[0], c[1])?);
        }
        let mesh = TriMesh::new(positions.len(), faces)?;
        Self::new(mesh, positions, sidecar.boundary, sidecar.pairs, polygon)
    }

    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let _ = writeln!(s, "{} {} 0", self.positions.len(), self.mesh.n_faces());
        for p in &self.positions {
            let _ = writeln!(s, "{} {} 0", p.x, p.y);
        }
        for f in self.mesh.faces() {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        s
    }

    pub fn sidecar(&self) -> TemplateSidecar {
        TemplateSidecar {
            boundary: self.boundary.clone(),
            pairs: self.pairs.clone(),
        }
    }

    /// The cut mesh itself with the realization's positions.
    pub fn from_realization(cut: &CutSurface, polygon: &FundamentalPolygon, positions: &[DiskPoint]) -> Result<Self> {
        let mut boundary = Vec::new();
        let mut pairs = Vec::new();
        for (s, seg) in cut.segments.iter().enumerate() {
            let last = seg.len() - 1;
            for (t, &x) in seg.iter().enumerate().take(last) {
                boundary.push(BoundaryTag {
                    vertex: x,
                    side: s,
                    param: t as f64 / last as f64,
                });
            }
            let m = cut.segment_pairing[s];
            if s < m {
                for (t, &x) in seg.iter().enumerate() {
                    pairs.push([x, cut.segments[m][last - t]]);
                }
            }
        }
        Self::new(cut.mesh.clone(), positions.to_vec(), boundary, pairs, polygon)
    }

    fn roots(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.mesh.n_vertices());
        for &[a, b] in &self.pairs {
            uf.union(a, b);
        }
        (0..self.mesh.n_vertices()).map(|v| uf.find(v)).collect()
    }

    /// The closed surface obtained by identifying paired vertices, with the
    /// projection from template vertices.
    pub fn quotient(&self) -> Result<(TriMesh, Vec<usize>)> {
        let roots = self.roots();
        let mut index = vec![usize::MAX; roots.len()];
        let mut n = 0;
        for &r in &roots {
            if index[r] == usize::MAX {
                index[r] = n;
                n += 1;
            }
        }
        let pi: Vec<usize> = roots.iter().map(|&r| index[r]).collect();
        let faces = self.mesh.faces().iter().map(|f| f.map(|v| pi[v])).collect();
        let closed = TriMesh::new(n, faces)?;
        closed.validate_closed()?;
        Ok((closed, pi))
    }

    /// Treats the template as a geodesic triangulation of the target surface:
    /// the harmonic problem for its quotient with canonical weights of the
    /// induced flat metric, and the identity realization.
    pub fn isometric_realization(&self, polygon: &FundamentalPolygon) -> Result<(HarmonicProblem, Vec<DiskPoint>)> {
        let (closed, pi) = self.quotient()?;
        let corner = self
            .boundary
            .iter()
            .find(|t| t.side == 0 && t.param == 0.0)
            .ok_or_else(|| Error::InvalidInput("template has no vertex tagged as the first corner".into()))?
            .vertex;
        let cut = CutSurface::from_disk(self.mesh.clone(), pi.clone(), &closed, pi[corner], Some(corner))?;
        let mut lengths = vec![0.0; closed.n_edges()];
        for e in 0..self.mesh.n_edges() {
            let [a, b] = self.mesh.edge_vertices(e);
            lengths[cut.pi_e[e]] = distance_unchecked(self.positions[a], self.positions[b]);
        }
        let metric = DiscreteMetric { lengths };
        let weights = canonical_weights(&closed, &metric, Exec::default())?;
        let problem = HarmonicProblem::new(cut, polygon.clone(), weights.c)?;
        Ok((problem, self.positions.clone()))
    }
}

/// Sector-wise subdivision: the triangle (centre, v_k, v_{k+1}) is split into
/// `n²` pieces along a Klein-straight grid. Paired sides carry matching
/// vertex counts, and the second side of each pair is the image of the first.
pub fn regular_template(polygon: &FundamentalPolygon, n: usize) -> Result<TemplateMesh> {
    if n < 2 {
        return Err(Error::InvalidInput("template subdivision needs n >= 2".into()));
    }
    let sides = polygon.n_sides();
    let klein: Vec<[f64; 2]> = polygon.vertices.iter().map(|v| v.to_klein()).collect();
    let mut ids: BTreeMap<(u8, usize, usize, usize), usize> = BTreeMap::new();
    let mut pos: Vec<DiskPoint> = Vec::new();
    let mut faces = Vec::new();
    // keys: centre, ray k (point i/n towards v_k), boundary of side k at j, sector interior
    let key = |k: usize, i: usize, j: usize| -> (u8, usize, usize, usize) {
        if i + j == 0 {
            (0, 0, 0, 0)
        } else if i + j == n {
            if j == n {
                (2, (k + 1) % sides, 0, 0)
            } else {
                (2, k, j, 0)
            }
        } else if j == 0 {
            (1, k, i, 0)
        } else if i == 0 {
            (1, (k + 1) % sides, j, 0)
        } else {
            (3, k, i, j)
        }
    };
    let vertex = |k: usize, i: usize, j: usize, ids: &mut BTreeMap<_, usize>, pos: &mut Vec<DiskPoint>| -> usize {
        let kk = key(k, i, j);
        *ids.entry(kk).or_insert_with(|| {
            let (a, b) = (klein[k], klein[(k + 1) % sides]);
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            let p = DiskPoint::from_klein([s * a[0] + t * b[0], s * a[1] + t * b[1]]);
            pos.push(if i + j == n && j == n { polygon.vertices[(k + 1) % sides] } else if i == n { polygon.vertices[k] } else { p });
            pos.len() - 1
        })
    };
    for k in 0..sides {
        // grid point (i, j): i steps towards v_k, j towards v_{k+1}
        for i in 0..n {
            for j in 0..n - i {
                let a = vertex(k, i, j, &mut ids, &mut pos);
                let b = vertex(k, i + 1, j, &mut ids, &mut pos);
                let c = vertex(k, i, j + 1, &mut ids, &mut pos);
                faces.push([a, b, c]);
                if i + j + 2 <= n {
                    let d = vertex(k, i + 1, j + 1, &mut ids, &mut pos);
                    faces.push([b, d, c]);
                }
            }
        }
    }
    let side_vertex = |k: usize, j: usize| -> usize { ids[&key(k, n - j, j)] };
    let mut boundary = Vec::new();
    let mut pairs = Vec::new();
    for k in 0..sides {
        for j in 0..n {
            boundary.push(BoundaryTag {
                vertex: side_vertex(k, j),
                side: k,
                param: j as f64 / n as f64,
            });
        }
    }
    for k in 0..sides {
        let m = polygon.pairing[k];
        if k > m {
            continue;
        }
        let g = polygon.side_maps[k];
        for j in 0..=n {
            let x = side_vertex(k, j);
            let y = side_vertex(m, n - j);
            // the partner side is the exact image, corners excepted (they stay on the vertices)
            if j != 0 && j != n {
                pos[y] = g.apply(pos[x]);
            }
            pairs.push([x, y]);
        }
    }
    let mesh = TriMesh::new(pos.len(), faces)?;
    // the grid walks each sector clockwise when v_k → v_{k+1} turns clockwise
    let mesh = if crate::hypgeom::klein_orientation(pos[mesh.face(0)[0]], pos[mesh.face(0)[1]], pos[mesh.face(0)[2]]) < 0.0 {
        TriMesh::new(pos.len(), mesh.faces().iter().map(|f| [f[0], f[2], f[1]]).collect())?
    } else {
        mesh
    };
    TemplateMesh::new(mesh, pos, boundary, pairs, polygon)
}

/// Uniform bucket grid over the Klein images of the realization's faces.
#[derive(Clone, Debug)]
struct FaceLocator {
    faces: Vec<[usize; 3]>,
    klein: Vec<[f64; 2]>,
    res: usize,
    cells: Vec<Vec<usize>>,
}

fn cell_of(x: f64, res: usize) -> usize {
    (((x + 1.0) * 0.5 * res as f64).floor().max(0.0) as usize).min(res - 1)
}

fn klein_barycentric(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<[f64; 3]> {
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if det.abs() < 1e-300 {
        return None;
    }
    let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
    Some([1.0 - l1 - l2, l1, l2])
}

impl FaceLocator {
    fn new(faces: &[[usize; 3]], positions: &[DiskPoint]) -> Self {
        let klein: Vec<[f64; 2]> = positions.iter().map(|p| p.to_klein()).collect();
        let res = ((faces.len() as f64).sqrt().ceil() as usize).clamp(4, 256);
        let mut cells = vec![Vec::new(); res * res];
        for (f, tri) in faces.iter().enumerate() {
            let xs = tri.map(|v| klein[v][0]);
            let ys = tri.map(|v| klein[v][1]);
            let lo = |v: [f64; 3]| cell_of(v.iter().cloned().fold(f64::INFINITY, f64::min) - 1e-9, res);
            let hi = |v: [f64; 3]| cell_of(v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-9, res);
            for i in lo(xs)..=hi(xs) {
                for j in lo(ys)..=hi(ys) {
                    cells[j * res + i].push(f);
                }
            }
        }
        FaceLocator {
            faces: faces.to_vec(),
            klein,
            res,
            cells,
        }
    }

    /// Face containing `p` (Klein barycentrics ≥ −tol); the most interior one wins ties.
    fn locate(&self, p: DiskPoint) -> Option<(usize, [f64; 3])> {
        let k = p.to_klein();
        let cell = cell_of(k[1], self.res) * self.res + cell_of(k[0], self.res);
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &f in &self.cells[cell] {
            let [a, b, c] = self.faces[f].map(|v| self.klein[v]);
            if let Some(l) = klein_barycentric(k, a, b, c) {
                let m = l[0].min(l[1]).min(l[2]);
                if m >= -LOCATE_TOL && best.is_none_or(|(_, _, bm)| m > bm) {
                    best = Some((f, l, m));
                }
            }
        }
        best.map(|(f, l, _)| (f, l))
    }
}

#[derive(Clone, Debug)]
pub struct CoveringAtlas {
    pub copies: Vec<GroupElement>,
    inverses: Vec<Mobius>,
    locator: FaceLocator,
    positions: Vec<DiskPoint>,
}

/// Where a point was found: atlas copy, realization face, isometry-invariant weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub copy: usize,
    pub face: usize,
    pub weights: [f64; 3],
}

impl CoveringAtlas {
    /// Greedy cover: group elements in breadth-first word order, each kept
    /// only if it covers a sample point no earlier copy covered.
    pub fn build(
        faces: &[[usize; 3]],
        positions: &[DiskPoint],
        polygon: &FundamentalPolygon,
        samples: &[DiskPoint],
        max_word_len: usize,
    ) -> Result<Self> {
        let locator = FaceLocator::new(faces, positions);
        let mut atlas = CoveringAtlas {
            copies: Vec::new(),
            inverses: Vec::new(),
            locator,
            positions: positions.to_vec(),
        };
        let mut uncovered: Vec<DiskPoint> = samples.to_vec();
        for g in polygon.enumerate_group(max_word_len) {
            if uncovered.is_empty() {
                break;
            }
            let inv = g.transform.inverse();
            let before = uncovered.len();
            uncovered.retain(|&p| atlas.locator.locate(inv.apply(p)).is_none());
            if uncovered.len() < before {
                atlas.copies.push(g);
                atlas.inverses.push(inv);
            }
        }
        if let Some(p) = uncovered.first() {
            return Err(Error::Coverage {
                uncovered: uncovered.len(),
                max_word_len,
                x: p.x,
                y: p.y,
            });
        }
        Ok(atlas)
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn locate(&self, p: DiskPoint) -> Option<Location> {
        self.inverses.iter().enumerate().find_map(|(copy, inv)| {
            let q = inv.apply(p);
            self.locator.locate(q).map(|(face, l)| {
                let tri = self.locator.faces[face];
                let mut w = [0.0; 3];
                for i in 0..3 {
                    w[i] = l[i] / self.positions[tri[i]].hyperboloid_t();
                }
                let s = w[0] + w[1] + w[2];
                Location {
                    copy,
                    face,
                    weights: w.map(|x| x / s),
                }
            })
        })
    }
}

/// Points the atlas must cover: template vertices, geodesic edge midpoints
/// and a Klein grid over the polygon.
pub fn coverage_samples(template: &TemplateMesh, polygon: &FundamentalPolygon, grid: usize) -> Vec<DiskPoint> {
    let mut out = template.positions.clone();
    for e in 0..template.mesh.n_edges() {
        let [a, b] = template.mesh.edge_vertices(e);
        out.push(geodesic_point(template.positions[a], template.positions[b], 0.5));
    }
    for i in 0..=grid {
        for j in 0..=grid {
            let k = [2.0 * i as f64 / grid as f64 - 1.0, 2.0 * j as f64 / grid as f64 - 1.0];
            if k[0] * k[0] + k[1] * k[1] >= 1.0 {
                continue;
            }
            let p = DiskPoint::from_klein(k);
            if polygon.contains(p, 0.0) {
                out.push(p);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct RemeshResult {
    pub surface: Surface,
    pub atlas_size: usize,
    /// Degrees of the glued base-corner vertex and its neighbours.
    pub base_valence: BTreeMap<usize, usize>,
    pub max_glue_gap: f64,
}

/// 3D position of every template vertex interpolated on the original surface.
pub fn pull_back(
    template: &TemplateMesh,
    atlas: &CoveringAtlas,
    pi_v: &[usize],
    coords3d: &[[f64; 3]],
    exec: Exec,
) -> Result<Vec<[f64; 3]>> {
    let located = exec.try_map(template.positions.len(), |v| {
        let p = template.positions[v];
        atlas.locate(p).ok_or(Error::Coverage {
            uncovered: 1,
            max_word_len: 0,
            x: p.x,
            y: p.y,
        })
    })?;
    Ok(located
        .iter()
        .map(|loc| {
            let tri = atlas.locator.faces[loc.face];
            let mut x = [0.0; 3];
            for i in 0..3 {
                let c = coords3d[pi_v[tri[i]]];
                for d in 0..3 {
                    x[d] += loc.weights[i] * c[d];
                }
            }
            x
        })
        .collect())
}

/// Identifies paired boundary vertices; the result is a closed surface.
pub fn glue_boundary(template: &TemplateMesh, coords: &[[f64; 3]], polygon: &FundamentalPolygon) -> Result<(Surface, f64)> {
    let mut count = vec![0usize; polygon.n_sides()];
    for t in &template.boundary {
        count[t.side] += 1;
    }
    for k in 0..polygon.n_sides() {
        if count[k] != count[polygon.pairing[k]] {
            return Err(Error::GluingMismatch(format!(
                "side {k} has {} template vertices but its partner has {}",
                count[k],
                count[polygon.pairing[k]]
            )));
        }
    }
    let mut gap: f64 = 0.0;
    for &[a, b] in &template.pairs {
        let d = euclidean_distance(coords[a], coords[b]);
        if d > GLUE_TOL {
            return Err(Error::GluingMismatch(format!(
                "template vertices {a} and {b} pull back {d:e} apart"
            )));
        }
        gap = gap.max(d);
    }
    let (closed, pi) = template.quotient()?;
    let mut out = vec![[0.0; 3]; closed.n_vertices()];
    let mut seen = vec![false; closed.n_vertices()];
    for (v, &q) in pi.iter().enumerate() {
        if !seen[q] {
            seen[q] = true;
            out[q] = coords[v];
        }
    }
    Ok((
        Surface {
            mesh: closed,
            coords: out,
        },
        gap,
    ))
}

pub fn valence_histogram(mesh: &TriMesh, center: usize) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in std::iter::once(center).chain(mesh.neighbors(center)) {
        *h.entry(mesh.degree(v)).or_insert(0) += 1;
    }
    h
}

/// Atlas, pull-back and gluing in one go.
pub fn remesh(
    template: &TemplateMesh,
    realization: &[DiskPoint],
    cut: &CutSurface,
    polygon: &FundamentalPolygon,
    coords3d: &[[f64; 3]],
    max_word_len: usize,
    exec: Exec,
) -> Result<RemeshResult> {
    let samples = coverage_samples(template, polygon, 48);
    let atlas = CoveringAtlas::build(cut.mesh.faces(), realization, polygon, &samples, max_word_len)?;
    let pulled = pull_back(template, &atlas, &cut.pi_v, coords3d, exec)?;
    let (surface, gap) = glue_boundary(template, &pulled, polygon)?;
    let genus = surface.mesh.genus()?;
    if genus != polygon.genus {
        return Err(Error::Topology(format!("remeshed surface has genus {genus}, expected {}", polygon.genus)));
    }
    let corner = template
        .boundary
        .iter()
        .find(|t| t.side == 0 && t.param == 0.0)
        .map_or(0, |t| t.vertex);
    let (_, pi) = template.quotient()?;
    Ok(RemeshResult {
        base_valence: valence_histogram(&surface.mesh, pi[corner]),
        surface,
        atlas_size: atlas.len(),
        max_glue_gap: gap,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// The smaller index becomes the root, so roots are deterministic.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}
