//! Cutting a closed surface into a disk along `2g` loops through one base
//! vertex.
//!
//! The loops are grown so that their darts at the base appear in blocks
//! `a⁺ b⁺ a⁻ b⁻` counter-clockwise. Loops that are disjoint away from the base
//! and have this rotation cut any closed genus-`g` surface into a single disk
//! whose boundary word is `a b a⁻¹ b⁻¹ …`, which matches the block pairing of
//! the polygon sides.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuchsian::FundamentalPolygon;
use crate::mesh::TriMesh;

/// Loops as closed vertex walks `[base, …, base]`, ordered `a₁, b₁, a₂, b₂, …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoopSystem {
    pub base: usize,
    pub loops: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutSurface {
    /// The cut disk; its faces are the original faces with re-labelled corners.
    pub mesh: TriMesh,
    pub pi_v: Vec<usize>,
    pub pi_e: Vec<usize>,
    pub base: usize,
    pub genus: usize,
    /// Boundary chains of the disk, counter-clockwise, both endpoints included.
    pub segments: Vec<Vec<usize>>,
    /// Involution on segment indices: paired segments are copies of one loop.
    pub segment_pairing: Vec<usize>,
    pub loops: Vec<Vec<usize>>,
}

/// Per-edge bitmask: bit `i` is set when the edge crosses the `i`-th dual
/// generator cycle, so the mod-2 class of a closed walk is the XOR of its
/// edge masks.
pub fn homology_masks(mesh: &TriMesh, root: usize) -> Result<Vec<u64>> {
    let ne = mesh.n_edges();
    let mut in_tree = vec![false; ne];
    let mut seen = vec![false; mesh.n_vertices()];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for h in mesh.outgoing(v) {
            let w = mesh.dest(h);
            if !seen[w] {
                seen[w] = true;
                in_tree[mesh.edge_of(h)] = true;
                queue.push_back(w);
            }
        }
    }
    // dual spanning tree on the remaining edges
    let nf = mesh.n_faces();
    let mut parent_edge = vec![usize::MAX; nf];
    let mut depth = vec![usize::MAX; nf];
    let mut in_cotree = vec![false; ne];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        for k in 0..3 {
            let h = 3 * f + k;
            let e = mesh.edge_of(h);
            if in_tree[e] {
                continue;
            }
            let Some(t) = mesh.twin(h) else { continue };
            let g = t / 3;
            if depth[g] == usize::MAX {
                depth[g] = depth[f] + 1;
                parent_edge[g] = h;
                in_cotree[e] = true;
                queue.push_back(g);
            }
        }
    }
    let leftover: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
    if leftover.len() > 64 {
        return Err(Error::CutFailed(format!(
            "{} generators exceed the 64-bit class mask",
            leftover.len()
        )));
    }
    let mut masks = vec![0u64; ne];
    for (i, &x) in leftover.iter().enumerate() {
        let bit = 1u64 << i;
        masks[x] ^= bit;
        let h = mesh.edge_halfedge(x);
        let (mut f, mut g) = (h / 3, mesh.twin(h).map_or(h / 3, |t| t / 3));
        while f != g {
            if depth[f] < depth[g] {
                std::mem::swap(&mut f, &mut g);
            }
            let ph = parent_edge[f];
            masks[mesh.edge_of(ph)] ^= bit;
            f = ph / 3;
        }
    }
    Ok(masks)
}

struct Search<'a> {
    mesh: &'a TriMesh,
    masks: &'a [u64],
    base: usize,
    ring: Vec<usize>,
    ring_edges: Vec<usize>,
    blocked: Vec<bool>,
}

struct Found {
    walk: Vec<usize>,
    first: usize,
    last: usize,
}

impl Search<'_> {
    /// Loops `base → ring[r1] ⇝ ring[r2] → base` with arc ordinals `r1 < r2`
    /// accepted by `accept(r1, r2, class)`: the shortest one per ordinal
    /// pair, shortest first, at most `limit`.
    fn candidates(
        &self,
        arc: &[usize],
        accept: impl Fn(usize, usize, u64) -> bool,
        limit: usize,
    ) -> Vec<Found> {
        let n = self.mesh.n_vertices();
        let mut root = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut parent = vec![usize::MAX; n];
        let mut class = vec![0u64; n];
        let mut queue = VecDeque::new();
        for (ord, &pos) in arc.iter().enumerate() {
            let v = self.ring[pos];
            if self.blocked[v] || root[v] != usize::MAX {
                continue;
            }
            root[v] = ord;
            class[v] = self.masks[self.ring_edges[pos]];
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for h in self.mesh.outgoing(v) {
                let w = self.mesh.dest(h);
                if w == self.base || self.blocked[w] || root[w] != usize::MAX {
                    continue;
                }
                root[w] = root[v];
                depth[w] = depth[v] + 1;
                parent[w] = v;
                class[w] = class[v] ^ self.masks[self.mesh.edge_of(h)];
                queue.push_back(w);
            }
        }
        let mut best: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        for e in 0..self.mesh.n_edges() {
            let [mut u, mut w] = self.mesh.edge_vertices(e);
            if u == self.base || w == self.base || root[u] == usize::MAX || root[w] == usize::MAX {
                continue;
            }
            if root[u] == root[w] {
                continue;
            }
            if root[u] > root[w] {
                std::mem::swap(&mut u, &mut w);
            }
            let c = class[u] ^ class[w] ^ self.masks[e];
            if !accept(root[u], root[w], c) {
                continue;
            }
            let key = (depth[u] + depth[w], e, u);
            let slot = best.entry((root[u], root[w])).or_insert(key);
            if key < *slot {
                *slot = key;
            }
        }
        let mut ranked: Vec<(usize, usize, usize, usize, usize)> = best
            .into_iter()
            .map(|((r1, r2), (len, e, u))| (len, r1, r2, e, u))
            .collect();
        ranked.sort_unstable();
        ranked.truncate(limit);
        ranked
            .into_iter()
            .map(|(_, r1, r2, e, u)| {
                let [a, b] = self.mesh.edge_vertices(e);
                let w = if a == u { b } else { a };
                let mut left = vec![];
                let mut x = u;
                while x != usize::MAX {
                    left.push(x);
                    x = parent[x];
                }
                let mut walk = vec![self.base];
                walk.extend(left.iter().rev());
                let mut x = w;
                while x != usize::MAX {
                    walk.push(x);
                    x = parent[x];
                }
                walk.push(self.base);
                Found {
                    walk,
                    first: r1,
                    last: r2,
                }
            })
            .collect()
    }

    fn available(&self, arc: &[usize], from: usize, to: usize) -> usize {
        arc[from.min(arc.len())..to.min(arc.len())]
            .iter()
            .filter(|&&p| !self.blocked[self.ring[p]])
            .count()
    }

    fn set_blocked(&mut self, walk: &[usize], on: bool) {
        for &v in &walk[1..walk.len() - 1] {
            self.blocked[v] = on;
        }
    }

    /// Depth-first search over blocks, trying a few short candidates for each
    /// loop. `budget` bounds the number of breadth-first searches.
    fn blocks(&mut self, genus: usize, block: usize, arc: &[usize], budget: &mut usize) -> Option<Vec<Vec<usize>>> {
        if block == genus {
            return Some(Vec::new());
        }
        let remaining = genus - block - 1;
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let a_list = self.candidates(
            arc,
            |r1, r2, c| {
                c != 0
                    && self.available(arc, r1 + 1, r2) >= 1
                    && self.available(arc, r2 + 1, arc.len()) > 4 * remaining
            },
            A_CANDIDATES,
        );
        for a in a_list {
            self.set_blocked(&a.walk, true);
            // b⁺ strictly between a⁺ and a⁻, b⁻ after a⁻
            let sub: Vec<usize> = arc[a.first + 1..].to_vec();
            let split = a.last - a.first - 1;
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let b_list = self.candidates(
                &sub,
                |r1, r2, _| r1 < split && r2 > split && self.available(&sub, r2 + 1, sub.len()) >= 4 * remaining,
                B_CANDIDATES,
            );
            for b in b_list {
                self.set_blocked(&b.walk, true);
                let rest: Vec<usize> = sub[b.last + 1..].to_vec();
                if let Some(mut tail) = self.blocks(genus, block + 1, &rest, budget) {
                    let mut out = vec![a.walk.clone(), b.walk.clone()];
                    out.append(&mut tail);
                    return Some(out);
                }
                self.set_blocked(&b.walk, false);
            }
            self.set_blocked(&a.walk, false);
        }
        None
    }
}

const A_CANDIDATES: usize = 6;
const B_CANDIDATES: usize = 3;
const SEARCH_BUDGET: usize = 300;

/// Loop system at `base`; tries every starting dart before giving up.
pub fn homology_basis(mesh: &TriMesh, base: usize) -> Result<LoopSystem> {
    let genus = mesh.validate_pipeline_input()?;
    let masks = homology_masks(mesh, base)?;
    let ring = mesh.neighbors(base);
    let d = ring.len();
    if d < 4 * genus + 1 {
        return Err(Error::CutFailed(format!(
            "base vertex {base} has degree {d}; at least {} is needed for genus {genus}",
            4 * genus + 1
        )));
    }
    let ring_edges: Vec<usize> = mesh.outgoing(base).iter().map(|&h| mesh.edge_of(h)).collect();
    for start in 0..d {
        let mut blocked = vec![false; mesh.n_vertices()];
        blocked[base] = true;
        let mut s = Search {
            mesh,
            masks: &masks,
            base,
            ring: ring.clone(),
            ring_edges: ring_edges.clone(),
            blocked,
        };
        let arc: Vec<usize> = (0..d).map(|i| (start + i) % d).collect();
        let mut budget = SEARCH_BUDGET;
        if let Some(loops) = s.blocks(genus, 0, &arc, &mut budget) {
            let sys = LoopSystem { base, loops };
            if cut_along(mesh, &sys).is_ok() {
                return Ok(sys);
            }
        }
    }
    Err(Error::CutFailed(format!(
        "no interleaved loop system found at base vertex {base}"
    )))
}

/// Vertices by decreasing degree (ties by index): the base candidates.
pub fn base_candidates(mesh: &TriMesh) -> Vec<usize> {
    let mut v: Vec<usize> = (0..mesh.n_vertices()).collect();
    v.sort_by_key(|&x| (std::cmp::Reverse(mesh.degree(x)), x));
    v
}

/// Loop system at the first base candidate that admits one.
pub fn find_loop_system(mesh: &TriMesh) -> Result<LoopSystem> {
    let genus = mesh.validate_pipeline_input()?;
    let mut last = None;
    for base in base_candidates(mesh) {
        if mesh.degree(base) < 4 * genus + 1 {
            break;
        }
        match homology_basis(mesh, base) {
            Ok(s) => return Ok(s),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| {
        Error::CutFailed(format!(
            "no vertex has degree >= {}; the cut needs a base with room for {} darts",
            4 * genus + 1,
            4 * genus
        ))
    }))
}

/// Splits every vertex into one copy per wedge between consecutive cut edges.
pub fn cut_along(mesh: &TriMesh, system: &LoopSystem) -> Result<CutSurface> {
    let genus = mesh.validate_pipeline_input()?;
    if system.loops.len() != 2 * genus {
        return Err(Error::CutFailed(format!(
            "{} loops given for genus {genus}",
            system.loops.len()
        )));
    }
    let mut cut_edge = vec![false; mesh.n_edges()];
    let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();
    for e in 0..mesh.n_edges() {
        let [a, b] = mesh.edge_vertices(e);
        edge_lookup.insert((a.min(b), a.max(b)), e);
    }
    for l in &system.loops {
        if l.len() < 4 || l[0] != system.base || l[l.len() - 1] != system.base {
            return Err(Error::CutFailed("loops must be closed walks at the base".into()));
        }
        for w in l.windows(2) {
            let e = edge_lookup
                .get(&(w[0].min(w[1]), w[0].max(w[1])))
                .ok_or_else(|| Error::CutFailed(format!("loop step {}-{} is not an edge", w[0], w[1])))?;
            if cut_edge[*e] {
                return Err(Error::CutFailed(format!("edge {e} used twice by the loops")));
            }
            cut_edge[*e] = true;
        }
    }
    // corner (halfedge h = corner at origin(h)) -> new vertex
    let mut corner_vertex = vec![usize::MAX; mesh.n_halfedges()];
    let mut pi_v = Vec::new();
    for v in 0..mesh.n_vertices() {
        let out = mesh.outgoing(v);
        let first_cut = out.iter().position(|&h| cut_edge[mesh.edge_of(h)]).unwrap_or(0);
        for i in 0..out.len() {
            let h = out[(first_cut + i) % out.len()];
            if i == 0 || cut_edge[mesh.edge_of(h)] {
                pi_v.push(v);
            }
            corner_vertex[h] = pi_v.len() - 1;
        }
    }
    let faces: Vec<[usize; 3]> = (0..mesh.n_faces())
        .map(|f| [corner_vertex[3 * f], corner_vertex[3 * f + 1], corner_vertex[3 * f + 2]])
        .collect();
    let disk = TriMesh::new(pi_v.len(), faces)?;
    let mut cut = CutSurface::from_disk(disk, pi_v, mesh, system.base, None)?;
    cut.loops = system.loops.clone();
    Ok(cut)
}

impl CutSurface {
    /// Builds the cut structure from a disk whose faces, mapped through
    /// `pi_v`, are exactly the faces of `closed`. Segment 0 starts at
    /// `first_corner` (a preimage of `base`) or at the first one found.
    pub fn from_disk(
        disk: TriMesh,
        pi_v: Vec<usize>,
        closed: &TriMesh,
        base: usize,
        first_corner: Option<usize>,
    ) -> Result<CutSurface> {
        let genus = closed.genus()?;
        if disk.n_faces() != closed.n_faces() || pi_v.len() != disk.n_vertices() {
            return Err(Error::CutFailed("disk and surface disagree in size".into()));
        }
        for f in 0..disk.n_faces() {
            if disk.face(f).map(|v| pi_v[v]) != closed.face(f) {
                return Err(Error::CutFailed(format!("face {f} does not project onto the surface")));
            }
        }
        if disk.euler_characteristic() != 1 {
            return Err(Error::CutFailed(format!(
                "cut surface has Euler characteristic {}, not a disk",
                disk.euler_characteristic()
            )));
        }
        let loops = disk.boundary_loops();
        if loops.len() != 1 {
            return Err(Error::CutFailed(format!("{} boundary cycles after cutting", loops.len())));
        }
        let pi_e: Vec<usize> = (0..disk.n_edges())
            .map(|e| closed.edge_of(disk.edge_halfedge(e)))
            .collect();
        let cycle = &loops[0];
        let corners: Vec<usize> = cycle
            .iter()
            .enumerate()
            .filter(|&(_, &h)| pi_v[disk.origin(h)] == base)
            .map(|(i, _)| i)
            .collect();
        if corners.len() != 4 * genus {
            return Err(Error::CutFailed(format!(
                "base vertex has {} boundary preimages, expected {}",
                corners.len(),
                4 * genus
            )));
        }
        let start = match first_corner {
            Some(c) => *corners
                .iter()
                .find(|&&i| disk.origin(cycle[i]) == c)
                .ok_or_else(|| Error::CutFailed(format!("vertex {c} is not a base corner")))?,
            None => corners[0],
        };
        let len = cycle.len();
        let mut segments: Vec<Vec<usize>> = Vec::new();
        let mut seg_edges: Vec<Vec<usize>> = Vec::new();
        for i in 0..len {
            let h = cycle[(start + i) % len];
            let o = disk.origin(h);
            if pi_v[o] == base {
                segments.push(vec![o]);
                seg_edges.push(Vec::new());
            }
            segments.last_mut().unwrap().push(disk.dest(h));
            seg_edges.last_mut().unwrap().push(pi_e[disk.edge_of(h)]);
        }
        let n = segments.len();
        let mut segment_pairing = vec![usize::MAX; n];
        for i in 0..n {
            let rev: Vec<usize> = seg_edges[i].iter().rev().copied().collect();
            let partners: Vec<usize> = (0..n).filter(|&j| j != i && seg_edges[j] == rev).collect();
            if partners.len() != 1 {
                return Err(Error::CutFailed(format!("segment {i} has {} partners", partners.len())));
            }
            segment_pairing[i] = partners[0];
        }
        let mut count = vec![0usize; closed.n_vertices()];
        for &v in &pi_v {
            count[v] += 1;
        }
        for (v, &c) in count.iter().enumerate() {
            if c == 0 {
                return Err(Error::CutFailed(format!("vertex {v} has no preimage")));
            }
        }
        for v in 0..disk.n_vertices() {
            if !disk.is_boundary_vertex(v) && count[pi_v[v]] != 1 {
                return Err(Error::CutFailed(format!("interior vertex {v} is duplicated")));
            }
        }
        Ok(CutSurface {
            mesh: disk,
            pi_v,
            pi_e,
            base,
            genus,
            segments,
            segment_pairing,
            loops: Vec::new(),
        })
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    /// Re-indexes segments so that segment `i` lies on polygon side `i`.
    pub fn aligned_to(&self, polygon: &FundamentalPolygon) -> Result<CutSurface> {
        let assign = match_segments_to_sides(self, polygon)?;
        let n = self.n_segments();
        let mut segments = vec![Vec::new(); n];
        for (s, &side) in assign.iter().enumerate() {
            segments[side] = self.segments[s].clone();
        }
        let mut out = self.clone();
        out.segments = segments;
        out.segment_pairing = polygon.pairing.clone();
        Ok(out)
    }

    /// Vertices of `Ṽ` that lie on the boundary.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.mesh.n_vertices())
            .filter(|&v| self.mesh.is_boundary_vertex(v))
            .collect()
    }

    pub fn to_json(&self, segment_to_side: Option<&[usize]>) -> serde_json::Value {
        serde_json::json!({
            "base": self.base,
            "loops": self.loops,
            "segments": self.segments,
            "segment_pairing": self.segment_pairing,
            "segment_to_side": segment_to_side.map(|s| s.to_vec()).unwrap_or_else(|| (0..self.n_segments()).collect()),
        })
    }
}

/// Cyclic re-indexing `segment (r + i) ↦ side i` under which paired segments
/// land on paired sides. The first valid shift wins.
pub fn match_segments_to_sides(cut: &CutSurface, polygon: &FundamentalPolygon) -> Result<Vec<usize>> {
    let n = cut.n_segments();
    if n != polygon.n_sides() {
        return Err(Error::InconsistentPairing(format!(
            "{n} segments for {} sides",
            polygon.n_sides()
        )));
    }
    for r in 0..n {
        let ok = (0..n).all(|i| cut.segment_pairing[(r + i) % n] == (r + polygon.pairing[i]) % n);
        if ok {
            let mut assign = vec![0; n];
            for i in 0..n {
                assign[(r + i) % n] = i;
            }
            return Ok(assign);
        }
    }
    Err(Error::InconsistentPairing(
        "boundary word of the cut does not match the polygon's side pairing".into(),
    ))
}

/// Re-identifies the cut disk along `pi_v` and returns the faces, which must
/// reproduce the original surface.
pub fn reglue_faces(cut: &CutSurface) -> Vec<[usize; 3]> {
    cut.mesh.faces().iter().map(|f| f.map(|v| cut.pi_v[v])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::regular_polygon;
    use crate::generate::genus_surface;

    fn check(g: usize) {
        let s = genus_surface(g, 1).unwrap();
        let sys = find_loop_system(&s.mesh).unwrap();
        assert_eq!(sys.loops.len(), 2 * g);
        let mut used = std::collections::HashSet::new();
        for l in &sys.loops {
            assert_eq!(l[0], sys.base);
            assert_eq!(*l.last().unwrap(), sys.base);
            for &v in &l[1..l.len() - 1] {
                assert!(used.insert(v), "loops share vertex {v}");
            }
        }
        let cut = cut_along(&s.mesh, &sys).unwrap();
        assert_eq!(cut.mesh.euler_characteristic(), 1);
        assert_eq!(cut.mesh.n_faces(), s.mesh.n_faces());
        assert_eq!(cut.n_segments(), 4 * g);
        let loop_edges: usize = sys.loops.iter().map(|l| l.len() - 1).sum();
        assert_eq!(cut.mesh.boundary_loops()[0].len(), 2 * loop_edges);
        assert_eq!(cut.pi_v.iter().filter(|&&v| v == sys.base).count(), 4 * g);
        for (i, seg) in cut.segments.iter().enumerate() {
            let j = cut.segment_pairing[i];
            assert_eq!(seg.len(), cut.segments[j].len());
            let a: Vec<usize> = seg.iter().map(|&v| cut.pi_v[v]).collect();
            let mut b: Vec<usize> = cut.segments[j].iter().map(|&v| cut.pi_v[v]).collect();
            b.reverse();
            assert_eq!(a, b);
            assert_eq!(seg.last(), cut.segments[(i + 1) % cut.n_segments()].first());
        }
        // projections are consistent and surjective
        for e in 0..cut.mesh.n_edges() {
            let [a, b] = cut.mesh.edge_vertices(e);
            let mut x = [cut.pi_v[a], cut.pi_v[b]];
            let mut y = s.mesh.edge_vertices(cut.pi_e[e]);
            x.sort();
            y.sort();
            assert_eq!(x, y);
        }
        let mut hit = vec![false; s.mesh.n_edges()];
        for &e in &cut.pi_e {
            hit[e] = true;
        }
        assert!(hit.iter().all(|&h| h));
        assert_eq!(reglue_faces(&cut), s.mesh.faces());
        let poly = regular_polygon(g).unwrap();
        let aligned = cut.aligned_to(&poly).unwrap();
        assert_eq!(aligned.segment_pairing, poly.pairing);
        for i in 0..aligned.n_segments() {
            let j = aligned.segment_pairing[i];
            let a: Vec<usize> = aligned.segments[i].iter().map(|&v| aligned.pi_v[v]).collect();
            let mut b: Vec<usize> = aligned.segments[j].iter().map(|&v| aligned.pi_v[v]).collect();
            b.reverse();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn genus_two_cut() {
        check(2);
    }

    #[test]
    fn genus_three_cut() {
        check(3);
    }

    #[test]
    fn masks_detect_nontrivial_loops() {
        let s = genus_surface(2, 1).unwrap();
        let sys = find_loop_system(&s.mesh).unwrap();
        let masks = homology_masks(&s.mesh, sys.base).unwrap();
        let class = |walk: &[usize]| {
            walk.windows(2).fold(0u64, |c, w| {
                let e = (0..s.mesh.n_edges())
                    .find(|&e| {
                        let [a, b] = s.mesh.edge_vertices(e);
                        (a, b) == (w[0], w[1]) || (b, a) == (w[0], w[1])
                    })
                    .unwrap();
                c ^ masks[e]
            })
        };
        let classes: Vec<u64> = sys.loops.iter().map(|l| class(l)).collect();
        // the 2g classes are linearly independent over Z2
        let mut basis: Vec<u64> = Vec::new();
        for mut c in classes {
            for &b in &basis {
                c = c.min(c ^ b);
            }
            assert_ne!(c, 0);
            basis.push(c);
        }
        // a face boundary is trivial
        let f = s.mesh.face(0);
        assert_eq!(class(&[f[0], f[1], f[2], f[0]]), 0);
    }

    #[test]
    fn low_degree_base_is_rejected() {
        let s = genus_surface(2, 1).unwrap();
        let low = (0..s.mesh.n_vertices()).find(|&v| s.mesh.degree(v) <= 6).unwrap();
        assert!(matches!(homology_basis(&s.mesh, low), Err(Error::CutFailed(_))));
    }

    #[test]
    fn cut_json_keys() {
        let s = genus_surface(2, 1).unwrap();
        let cut = cut_along(&s.mesh, &find_loop_system(&s.mesh).unwrap()).unwrap();
        let j = cut.to_json(None);
        assert_eq!(j["loops"].as_array().unwrap().len(), 4);
        assert_eq!(j["segments"].as_array().unwrap().len(), 8);
        assert_eq!(j["segment_to_side"].as_array().unwrap().len(), 8);
    }
}
