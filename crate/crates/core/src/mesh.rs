//! Halfedge triangle meshes with dense integer handles, OFF/OBJ ingestion and
//! per-edge length metrics.
//!
//! Halfedge `3f + k` runs from corner `k` of face `f` to corner `k + 1`, so
//! `next`, `prev` and `origin` are arithmetic. Twins are optional so the same
//! type represents the cut disk.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    faces: Vec<[usize; 3]>,
    n_vertices: usize,
    twin: Vec<usize>,
    edge_of: Vec<usize>,
    /// Edge -> its lower-indexed halfedge.
    edge_he: Vec<usize>,
    /// Vertex -> first outgoing halfedge in counter-clockwise order.
    vertex_he: Vec<usize>,
}

impl TriMesh {
    /// Builds connectivity; surfaces with boundary are allowed here.
    pub fn new(n_vertices: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nh = faces.len() * 3;
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        for (f, tri) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a >= n_vertices {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("face {f} references vertex {a} of {n_vertices}"),
                    });
                }
                if a == b {
                    return Err(Error::NonManifold(format!("face {f} repeats vertex {a}")));
                }
                if directed.insert((a, b), 3 * f + k).is_some() {
                    return Err(Error::NonManifold(format!(
                        "directed edge ({a}, {b}) used twice (inconsistent orientation or fin)"
                    )));
                }
            }
        }
        let mut twin = vec![NONE; nh];
        for (&(a, b), &h) in &directed {
            if let Some(&t) = directed.get(&(b, a)) {
                twin[h] = t;
            }
        }
        let mut edge_of = vec![NONE; nh];
        let mut edge_he = Vec::with_capacity(nh / 2 + 1);
        for h in 0..nh {
            if edge_of[h] == NONE {
                edge_of[h] = edge_he.len();
                if twin[h] != NONE {
                    edge_of[twin[h]] = edge_he.len();
                }
                edge_he.push(h);
            }
        }
        let mut mesh = TriMesh {
            faces,
            n_vertices,
            twin,
            edge_of,
            edge_he,
            vertex_he: vec![NONE; n_vertices],
        };
        mesh.build_vertex_fans()?;
        Ok(mesh)
    }

    fn build_vertex_fans(&mut self) -> Result<()> {
        let mut out_count = vec![0usize; self.n_vertices];
        for h in 0..self.n_halfedges() {
            let v = self.origin(h);
            out_count[v] += 1;
            // prefer a halfedge without a clockwise neighbour (boundary start)
            if self.vertex_he[v] == NONE || self.twin[self.prev(h)] == NONE {
                self.vertex_he[v] = h;
            }
        }
        // a halfedge h starts a fan if prev's twin is missing; rotate clockwise
        for v in 0..self.n_vertices {
            let h0 = self.vertex_he[v];
            if h0 == NONE {
                return Err(Error::NonManifold(format!("vertex {v} is isolated")));
            }
            let start = self.fan_start(h0);
            self.vertex_he[v] = start;
            let fan = self.fan_from(start);
            if fan.len() != out_count[v] {
                return Err(Error::NonManifold(format!(
                    "vertex {v} has {} incident faces but its fan reaches {}",
                    out_count[v],
                    fan.len()
                )));
            }
        }
        Ok(())
    }

    fn fan_start(&self, h0: usize) -> usize {
        let mut h = h0;
        loop {
            let t = self.twin[h];
            if t == NONE {
                return h;
            }
            let cw = self.next(t);
            if cw == h0 {
                return h0;
            }
            h = cw;
        }
    }

    fn fan_from(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut h = start;
        loop {
            let t = self.twin[self.prev(h)];
            if t == NONE || t == start {
                return out;
            }
            out.push(t);
            h = t;
            if out.len() > self.n_halfedges() {
                return out;
            }
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_he.len()
    }

    pub fn n_halfedges(&self) -> usize {
        self.faces.len() * 3
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    #[inline]
    pub fn next(&self, h: usize) -> usize {
        if h % 3 == 2 {
            h - 2
        } else {
            h + 1
        }
    }

    #[inline]
    pub fn prev(&self, h: usize) -> usize {
        if h.is_multiple_of(3) {
            h + 2
        } else {
            h - 1
        }
    }

    #[inline]
    pub fn twin(&self, h: usize) -> Option<usize> {
        let t = self.twin[h];
        (t != NONE).then_some(t)
    }

    #[inline]
    pub fn origin(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    #[inline]
    pub fn dest(&self, h: usize) -> usize {
        self.origin(self.next(h))
    }

    #[inline]
    pub fn face_of(&self, h: usize) -> usize {
        h / 3
    }

    #[inline]
    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    pub fn edge_halfedge(&self, e: usize) -> usize {
        self.edge_he[e]
    }

    pub fn edge_vertices(&self, e: usize) -> [usize; 2] {
        let h = self.edge_he[e];
        [self.origin(h), self.dest(h)]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.twin[self.edge_he[e]] == NONE
    }

    /// Outgoing halfedges of `v` in counter-clockwise order. For boundary
    /// vertices the first one lies on the boundary.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        self.fan_from(self.vertex_he[v])
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.twin[self.vertex_he[v]] == NONE
    }

    /// Neighbours of `v` in counter-clockwise order (including the closing
    /// neighbour for boundary vertices).
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let out = self.outgoing(v);
        let mut n: Vec<usize> = out.iter().map(|&h| self.dest(h)).collect();
        if self.is_boundary_vertex(v) {
            let last = *out.last().unwrap();
            n.push(self.origin(self.prev(last)));
        }
        n
    }

    pub fn degree(&self, v: usize) -> usize {
        let d = self.outgoing(v).len();
        if self.is_boundary_vertex(v) {
            d + 1
        } else {
            d
        }
    }

    pub fn boundary_halfedge_count(&self) -> usize {
        self.twin.iter().filter(|&&t| t == NONE).count()
    }

    /// Boundary cycles as halfedge sequences, each following face orientation.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_halfedges()];
        let mut loops = Vec::new();
        for h0 in 0..self.n_halfedges() {
            if self.twin[h0] != NONE || seen[h0] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut h = h0;
            while !seen[h] {
                seen[h] = true;
                cycle.push(h);
                h = self.next_boundary(h);
            }
            loops.push(cycle);
        }
        loops
    }

    /// The boundary halfedge following `h` (which must be a boundary halfedge).
    pub fn next_boundary(&self, h: usize) -> usize {
        let v = self.dest(h);
        self.vertex_he[v]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn genus(&self) -> Result<usize> {
        let two_minus = 2 - self.euler_characteristic() - self.boundary_loops().len() as i64;
        if two_minus < 0 || two_minus % 2 != 0 {
            return Err(Error::Topology(format!(
                "Euler characteristic {} with {} boundary loops gives no integral genus",
                self.euler_characteristic(),
                self.boundary_loops().len()
            )));
        }
        Ok((two_minus / 2) as usize)
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n_vertices
    }

    /// Closed, connected and manifold (manifoldness is checked at construction).
    pub fn validate_closed(&self) -> Result<()> {
        let b = self.boundary_halfedge_count();
        if b > 0 {
            return Err(Error::BoundaryDetected { count: b });
        }
        if !self.is_connected() {
            return Err(Error::Topology("mesh is not connected".into()));
        }
        if 2 * self.n_edges() != 3 * self.n_faces() {
            return Err(Error::Topology("2|E| != 3|F|".into()));
        }
        Ok(())
    }

    /// Pipeline entry check: closed, connected and genus at least two.
    pub fn validate_pipeline_input(&self) -> Result<usize> {
        self.validate_closed()?;
        let g = self.genus()?;
        if g < 2 {
            return Err(Error::Topology(format!(
                "genus {g} surface; hyperbolic targets need genus >= 2"
            )));
        }
        Ok(g)
    }
}

/// A triangle mesh with embedded 3D vertex coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub mesh: TriMesh,
    pub coords: Vec<[f64; 3]>,
}

/// Per-edge positive lengths, indexed by edge handle.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMetric {
    pub lengths: Vec<f64>,
}

impl DiscreteMetric {
    /// Side lengths of face `f` opposite its corners `(0, 1, 2)`.
    pub fn face_lengths(&self, mesh: &TriMesh, f: usize) -> [f64; 3] {
        let h = 3 * f;
        [
            self.lengths[mesh.edge_of(h + 1)],
            self.lengths[mesh.edge_of(h + 2)],
            self.lengths[mesh.edge_of(h)],
        ]
    }

    pub fn check_triangles(&self, mesh: &TriMesh) -> Result<()> {
        for f in 0..mesh.n_faces() {
            let [a, b, c] = self.face_lengths(mesh, f);
            if !(a > 0.0 && b > 0.0 && c > 0.0 && a < b + c && b < c + a && c < a + b) {
                return Err(Error::DegenerateFace { face: f });
            }
        }
        Ok(())
    }
}

pub fn euclidean_distance(p: [f64; 3], q: [f64; 3]) -> f64 {
    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

impl Surface {
    pub fn new(n_coords: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = TriMesh::new(n_coords.len(), faces)?;
        Ok(Surface {
            mesh,
            coords: n_coords,
        })
    }

    pub fn induced_metric(&self) -> Result<DiscreteMetric> {
        let lengths = (0..self.mesh.n_edges())
            .map(|e| {
                let [a, b] = self.mesh.edge_vertices(e);
                euclidean_distance(self.coords[a], self.coords[b])
            })
            .collect();
        let m = DiscreteMetric { lengths };
        m.check_triangles(&self.mesh)?;
        Ok(m)
    }

    pub fn to_off(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "OFF");
        let _ = writeln!(s, "{} {} {}", self.coords.len(), self.mesh.n_faces(), self.mesh.n_edges());
        for c in &self.coords {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        for f in self.mesh.faces() {
            let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
        }
        s
    }

    pub fn save_off(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_off())?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            other => Err(Error::InvalidInput(format!(
                "unrecognised mesh extension {other:?} (expected .off or .obj)"
            ))),
        }
    }
}

/// Raw vertex/face arrays, before connectivity is built.
pub type RawMesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    let t = tok.ok_or_else(|| parse_err(line, "missing coordinate"))?;
    t.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number {t:?}")))
}

/// Parses OFF text; a missing z coordinate is read as 0 so planar templates load.
pub fn parse_off(text: &str) -> Result<RawMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut header_rest: Vec<&str> = Vec::new();
    if let Some(rest) = header.strip_prefix("OFF") {
        header_rest.extend(rest.split_whitespace());
    } else {
        return Err(parse_err(ln, "missing OFF header"));
    }
    let counts: Vec<usize> = if header_rest.is_empty() {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(ln, "missing counts line"))?;
        l.split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad count {t:?}"))))
            .collect::<Result<_>>()?
    } else {
        header_rest
            .iter()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad count {t:?}"))))
            .collect::<Result<_>>()?
    };
    if counts.len() < 2 {
        return Err(parse_err(ln, "counts line needs nV nF [nE]"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of vertex list"))?;
        let mut it = l.split_whitespace();
        let x = parse_f64(it.next(), ln)?;
        let y = parse_f64(it.next(), ln)?;
        let z = match it.next() {
            Some(t) => parse_f64(Some(t), ln)?,
            None => 0.0,
        };
        coords.push([x, y, z]);
    }
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of face list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let arity: usize = toks
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "bad face arity"))?;
        if arity != 3 {
            return Err(Error::NonTriangularFace { face: f, arity });
        }
        if toks.len() < 4 {
            return Err(parse_err(ln, "face line too short"));
        }
        let mut tri = [0usize; 3];
        for k in 0..3 {
            tri[k] = toks[k + 1]
                .parse()
                .map_err(|_| parse_err(ln, format!("bad index {:?}", toks[k + 1])))?;
            if tri[k] >= nv {
                return Err(parse_err(ln, format!("vertex index {} out of range", tri[k])));
            }
        }
        faces.push(tri);
    }
    Ok((coords, faces))
}

/// Parses `v` and `f` records of OBJ text; everything else is ignored.
pub fn parse_obj(text: &str) -> Result<RawMesh> {
    let mut coords = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        let mut it = l.split_whitespace();
        match it.next() {
            Some("v") => {
                let x = parse_f64(it.next(), ln)?;
                let y = parse_f64(it.next(), ln)?;
                let z = parse_f64(it.next(), ln)?;
                coords.push([x, y, z]);
            }
            Some("f") => {
                let toks: Vec<&str> = it.collect();
                if toks.len() != 3 {
                    return Err(Error::NonTriangularFace {
                        face: faces.len(),
                        arity: toks.len(),
                    });
                }
                let mut tri = [0usize; 3];
                for k in 0..3 {
                    let idx = toks[k].split('/').next().unwrap_or("");
                    let n: i64 = idx
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad index {:?}", toks[k])))?;
                    let resolved = if n < 0 { coords.len() as i64 + n } else { n - 1 };
                    if resolved < 0 {
                        return Err(parse_err(ln, format!("index {n} out of range")));
                    }
                    tri[k] = resolved as usize;
                }
                faces.push(tri);
            }
            _ => {}
        }
    }
    for (f, tri) in faces.iter().enumerate() {
        if tri.iter().any(|&v| v >= coords.len()) {
            return Err(parse_err(0, format!("face {f} references a missing vertex")));
        }
    }
    Ok((coords, faces))
}

pub fn load_raw(path: impl AsRef<Path>) -> Result<RawMesh> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let text = std::fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

/// Loads a closed manifold triangle mesh.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Surface> {
    let (coords, faces) = load_raw(path)?;
    let s = Surface::new(coords, faces)?;
    s.mesh.validate_closed()?;
    Ok(s)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn octahedron() -> Surface {
        let coords = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let faces = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        Surface::new(coords, faces).unwrap()
    }

    #[test]
    fn octahedron_counts() {
        let s = octahedron();
        s.mesh.validate_closed().unwrap();
        assert_eq!(
            (s.mesh.n_vertices(), s.mesh.n_edges(), s.mesh.n_faces()),
            (6, 12, 8)
        );
        assert_eq!(s.mesh.euler_characteristic(), 2);
        assert_eq!(s.mesh.genus().unwrap(), 0);
        assert!(matches!(
            s.mesh.validate_pipeline_input(),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn halfedge_algebra() {
        let m = octahedron().mesh;
        for h in 0..m.n_halfedges() {
            let t = m.twin(h).unwrap();
            assert_eq!(m.twin(t), Some(h));
            assert_eq!(m.next(m.next(m.next(h))), h);
            assert_eq!(m.origin(t), m.dest(h));
            assert_eq!(m.edge_of(h), m.edge_of(t));
        }
        for v in 0..m.n_vertices() {
            assert!(m.degree(v) >= 3);
            let n = m.neighbors(v);
            assert_eq!(n.len(), 4);
            // counter-clockwise: consecutive neighbours share a face with v
            for i in 0..n.len() {
                let (a, b) = (n[i], n[(i + 1) % n.len()]);
                assert!(m.faces().iter().any(|f| {
                    let r = [(f[0], f[1], f[2]), (f[1], f[2], f[0]), (f[2], f[0], f[1])];
                    r.contains(&(v, a, b))
                }));
            }
        }
    }

    #[test]
    fn off_round_trip_bit_exact() {
        let mut s = octahedron();
        s.coords[3] = [0.1 + 0.2, -1.0 / 3.0, 1e-300];
        let text = s.to_off();
        let (coords, faces) = parse_off(&text).unwrap();
        assert_eq!(coords, s.coords);
        assert_eq!(faces, s.mesh.faces());
    }

    #[test]
    fn quad_face_rejected() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            parse_off(text),
            Err(Error::NonTriangularFace { arity: 4, .. })
        ));
        let obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(
            parse_obj(obj),
            Err(Error::NonTriangularFace { .. })
        ));
    }

    #[test]
    fn obj_matches_off() {
        let s = octahedron();
        let mut obj = String::from("# comment\no thing\n");
        for c in &s.coords {
            obj += &format!("v {} {} {}\nvn 0 0 1\n", c[0], c[1], c[2]);
        }
        for f in s.mesh.faces() {
            obj += &format!("f {}/1 {}/1 {}/1\n", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        let (coords, faces) = parse_obj(&obj).unwrap();
        assert_eq!(coords, s.coords);
        assert_eq!(faces, s.mesh.faces());
    }

    #[test]
    fn boundary_and_nonmanifold_detection() {
        let open = Surface::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            open.mesh.validate_closed(),
            Err(Error::BoundaryDetected { count: 3 })
        ));
        assert_eq!(open.mesh.boundary_loops().len(), 1);
        assert_eq!(open.mesh.genus().unwrap(), 0);
        // two fans glued at a single vertex
        let bowtie = TriMesh::new(5, vec![[0, 1, 2], [0, 3, 4]]);
        assert!(matches!(bowtie, Err(Error::NonManifold(_))));
        let flipped = TriMesh::new(4, vec![[0, 1, 2], [0, 1, 3]]);
        assert!(matches!(flipped, Err(Error::NonManifold(_))));
    }

    #[test]
    fn induced_metric_lengths() {
        let s = Surface::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [0.5, 3f64.sqrt() / 2.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        for l in s.induced_metric().unwrap().lengths {
            assert!((l - 1.0).abs() < 1e-15);
        }
        let flat = Surface::new(
            vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            flat.induced_metric(),
            Err(Error::DegenerateFace { face: 0 })
        ));
    }

    #[test]
    fn face_lengths_are_opposite_corners() {
        let s = Surface::new(
            vec![[0.0; 3], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let m = s.induced_metric().unwrap();
        let l = m.face_lengths(&s.mesh, 0);
        assert_eq!(l, [5.0, 4.0, 3.0]);
    }

    proptest! {
        #[test]
        fn induced_lengths_symmetric_positive(seed in proptest::collection::vec(-1.0..1.0f64, 18)) {
            let mut s = octahedron();
            for (i, c) in s.coords.iter_mut().enumerate() {
                for k in 0..3 {
                    c[k] += 0.2 * seed[3 * i + k];
                }
            }
            let m = s.induced_metric().unwrap();
            for e in 0..s.mesh.n_edges() {
                let [a, b] = s.mesh.edge_vertices(e);
                prop_assert!(m.lengths[e] > 0.0);
                prop_assert_eq!(m.lengths[e], euclidean_distance(s.coords[b], s.coords[a]));
            }
        }
    }
}
