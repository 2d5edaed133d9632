//! Target surfaces as fundamental polygons in the disk: side pairings, the
//! vertex cycle, group enumeration and point location.
//!
//! Sides are 0-based: side `k` runs from vertex `k` to vertex `k + 1`
//! (mod `4g`). The pairing map of side `k` takes it onto its partner `m`
//! reversed, `v_k ↦ v_{m+1}` and `v_{k+1} ↦ v_m`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeom::{corner_angle, hyp_distance, isometry_mapping, DiskPoint, Mobius};

/// Tolerance for the Poincaré angle condition on constructed or ingested polygons.
pub const ANGLE_SUM_TOL: f64 = 1e-10;
/// Coefficient tolerance under which two group elements are identified.
pub const DEDUP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub transform: Mobius,
    /// Signed 1-based generator indices; the transform is their left-to-right composition.
    pub word: Vec<i32>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            transform: Mobius::IDENTITY,
            word: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalPolygon {
    pub genus: usize,
    pub vertices: Vec<DiskPoint>,
    /// Involution on side indices.
    pub pairing: Vec<usize>,
    /// Per side, the isometry taking it onto its partner (reversed).
    pub side_maps: Vec<Mobius>,
    /// `(vertex, cumulative transform)` along the vertex cycle starting at vertex 0.
    pub cycle: Vec<(usize, GroupElement)>,
}

/// The unique orientation-preserving isometry with `p1 ↦ q1`, `p2 ↦ q2`.
pub fn side_pairing(src: (DiskPoint, DiskPoint), dst: (DiskPoint, DiskPoint)) -> Result<Mobius> {
    isometry_mapping(src.0, src.1, dst.0, dst.1)
}

fn regular_vertices(g: usize, s: f64) -> Vec<DiskPoint> {
    let n = 4 * g;
    (0..n)
        .map(|k| {
            let t = k as f64 * PI / (2 * g) as f64;
            DiskPoint::new_unchecked(s * t.cos(), s * t.sin())
        })
        .collect()
}

fn angle_sum(vertices: &[DiskPoint]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|k| corner_angle(vertices[k], vertices[(k + n - 1) % n], vertices[(k + 1) % n]))
        .sum()
}

/// Vertex radius of the regular `4g`-gon with angle sum `2π`, by bisection.
pub fn regular_radius(g: usize) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        // the angle sum decreases from the Euclidean value towards 0 as s grows
        if angle_sum(&regular_vertices(g, mid)) > 2.0 * PI {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Block pairing `4m ↔ 4m+2`, `4m+1 ↔ 4m+3`.
pub fn block_pairing(g: usize) -> Vec<usize> {
    (0..4 * g).map(|k| k ^ 2).collect()
}

pub fn regular_polygon(g: usize) -> Result<FundamentalPolygon> {
    if g < 2 {
        return Err(Error::InvalidInput(format!("regular polygon needs genus >= 2, got {g}")));
    }
    FundamentalPolygon::new(g, regular_vertices(g, regular_radius(g)), block_pairing(g))
}

impl FundamentalPolygon {
    /// Validates the pairing and angle condition, computes the side maps and
    /// the vertex cycle.
    pub fn new(genus: usize, vertices: Vec<DiskPoint>, pairing: Vec<usize>) -> Result<Self> {
        let n = 4 * genus;
        if genus < 2 || vertices.len() != n || pairing.len() != n {
            return Err(Error::InconsistentPairing(format!(
                "genus {genus} needs {n} vertices and sides, got {} and {}",
                vertices.len(),
                pairing.len()
            )));
        }
        for v in &vertices {
            v.validate()?;
        }
        for (k, &m) in pairing.iter().enumerate() {
            if m >= n || m == k || pairing[m] != k {
                return Err(Error::InconsistentPairing(format!("side {k} pairs with {m}")));
            }
        }
        let sum = angle_sum(&vertices);
        if (sum - 2.0 * PI).abs() > ANGLE_SUM_TOL {
            return Err(Error::InconsistentPairing(format!(
                "interior angle sum {sum} differs from 2π"
            )));
        }
        let side_maps = (0..n)
            .map(|k| {
                let m = pairing[k];
                side_pairing(
                    (vertices[k], vertices[(k + 1) % n]),
                    (vertices[(m + 1) % n], vertices[m]),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut poly = FundamentalPolygon {
            genus,
            vertices,
            pairing,
            side_maps,
            cycle: Vec::new(),
        };
        poly.cycle = poly.elliptic_cycle()?;
        Ok(poly)
    }

    pub fn n_sides(&self) -> usize {
        self.vertices.len()
    }

    pub fn side(&self, k: usize) -> (DiskPoint, DiskPoint) {
        let n = self.n_sides();
        (self.vertices[k % n], self.vertices[(k + 1) % n])
    }

    /// The `2g` generators: the maps of the lower-indexed side of each pair.
    pub fn generators(&self) -> Vec<Mobius> {
        (0..self.n_sides())
            .filter(|&k| k < self.pairing[k])
            .map(|k| self.side_maps[k])
            .collect()
    }

    /// Signed 1-based generator symbol of the map of side `k`.
    pub fn side_symbol(&self, k: usize) -> i32 {
        let lower = k.min(self.pairing[k]);
        let idx = (0..lower).filter(|&j| j < self.pairing[j]).count() as i32 + 1;
        if k == lower {
            idx
        } else {
            -idx
        }
    }

    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.n_sides();
        (0..n)
            .map(|k| {
                corner_angle(
                    self.vertices[k],
                    self.vertices[(k + n - 1) % n],
                    self.vertices[(k + 1) % n],
                )
            })
            .collect()
    }

    /// Walk the vertex identification starting at vertex 0. At vertex `k` the
    /// map of side `k` carries it to vertex `pairing[k] + 1`.
    pub fn elliptic_cycle(&self) -> Result<Vec<(usize, GroupElement)>> {
        let n = self.n_sides();
        let mut cycle = Vec::with_capacity(n);
        let mut k = 0;
        let mut cum = GroupElement::identity();
        loop {
            cycle.push((k, cum.clone()));
            let m = self.pairing[k];
            let next = (m + 1) % n;
            let t = self.side_maps[k].compose(&cum.transform);
            let mut word = vec![self.side_symbol(k)];
            word.extend(&cum.word);
            cum = GroupElement { transform: t, word };
            k = next;
            if k == 0 {
                break;
            }
            if cycle.len() > n {
                return Err(Error::InconsistentPairing("vertex walk does not close".into()));
            }
        }
        if cycle.len() != n {
            return Err(Error::InconsistentPairing(format!(
                "vertices split into several cycles (first has {} of {n})",
                cycle.len()
            )));
        }
        if cum.transform.coeff_distance(&Mobius::IDENTITY) > 1e-9 {
            return Err(Error::InconsistentPairing(format!(
                "cycle product differs from the identity by {:e}",
                cum.transform.coeff_distance(&Mobius::IDENTITY)
            )));
        }
        Ok(cycle)
    }

    /// Klein-model signed distances of `p` to the side lines; negative means outside.
    fn side_margins(&self, p: DiskPoint) -> impl Iterator<Item = (usize, f64)> + '_ {
        let kp = p.to_klein();
        let n = self.n_sides();
        (0..n).map(move |k| {
            let a = self.vertices[k].to_klein();
            let b = self.vertices[(k + 1) % n].to_klein();
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let cross = dx * (kp[1] - a[1]) - dy * (kp[0] - a[0]);
            (k, cross / dx.hypot(dy))
        })
    }

    /// Closed-polygon membership with Klein tolerance `tol`.
    pub fn contains(&self, p: DiskPoint, tol: f64) -> bool {
        self.side_margins(p).all(|(_, m)| m >= -tol)
    }

    /// Greedy descent: while `p` lies beyond some side, apply that side's map.
    pub fn locate(&self, p: DiskPoint, max_word_len: usize) -> Result<(GroupElement, DiskPoint)> {
        p.validate()?;
        let mut q = p;
        let mut g = GroupElement::identity();
        for _ in 0..=max_word_len {
            let (k, worst) = self
                .side_margins(q)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("polygon has sides");
            if worst >= -1e-12 {
                return Ok((g, q));
            }
            if g.word.len() == max_word_len {
                break;
            }
            let s = self.side_maps[k];
            q = s.apply(q);
            g.transform = s.compose(&g.transform);
            g.word.insert(0, self.side_symbol(k));
        }
        Err(Error::NotFound { max_word_len })
    }

    fn generator_by_symbol(&self, sym: i32) -> Mobius {
        let gens = self.generators();
        let m = gens[(sym.unsigned_abs() - 1) as usize];
        if sym > 0 {
            m
        } else {
            m.inverse()
        }
    }

    /// Distinct group elements with word length up to `max_word_len`, in
    /// breadth-first order (identity first).
    pub fn enumerate_group(&self, max_word_len: usize) -> Vec<GroupElement> {
        let ng = self.generators().len() as i32;
        let symbols: Vec<i32> = (1..=ng).flat_map(|i| [i, -i]).collect();
        let mut all = vec![GroupElement::identity()];
        let mut index: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let key = |m: &Mobius| (m.a.norm() * 1e6).round() as i64;
        index.entry(key(&Mobius::IDENTITY)).or_default().push(0);
        let mut frontier = vec![0usize];
        for _ in 0..max_word_len {
            let mut next = Vec::new();
            for &i in &frontier {
                for &s in &symbols {
                    let word_last = all[i].word.last().copied();
                    if word_last == Some(-s) {
                        continue;
                    }
                    let t = all[i].transform.compose(&self.generator_by_symbol(s));
                    let k = key(&t);
                    let dup = (k - 1..=k + 1).any(|kk| {
                        index
                            .get(&kk)
                            .is_some_and(|v| v.iter().any(|&j| all[j].transform.coeff_distance(&t) < DEDUP_TOL))
                    });
                    if dup {
                        continue;
                    }
                    let mut word = all[i].word.clone();
                    word.push(s);
                    index.entry(k).or_default().push(all.len());
                    next.push(all.len());
                    all.push(GroupElement { transform: t, word });
                }
            }
            frontier = next;
        }
        all
    }

    pub fn to_json(&self) -> PolygonJson {
        let n = self.n_sides();
        PolygonJson {
            genus: self.genus,
            vertices: self.vertices.iter().map(|v| [v.x, v.y]).collect(),
            pairing: (0..n).filter(|&k| k < self.pairing[k]).map(|k| [k, self.pairing[k]]).collect(),
            generators: Some(self.generators().iter().map(|m| m.to_array()).collect()),
        }
    }

    /// Builds from the JSON form; supplied generators must agree with the
    /// recomputed side maps.
    pub fn from_json(j: &PolygonJson) -> Result<Self> {
        let n = 4 * j.genus;
        let vertices = j
            .vertices
            .iter()
            .map(|v| DiskPoint::new(v[0], v[1]))
            .collect::<Result<Vec<_>>>()?;
        let mut pairing = vec![usize::MAX; n];
        for &[a, b] in &j.pairing {
            if a >= n || b >= n || pairing[a] != usize::MAX || pairing[b] != usize::MAX {
                return Err(Error::InconsistentPairing(format!("bad pair [{a}, {b}]")));
            }
            pairing[a] = b;
            pairing[b] = a;
        }
        if pairing.contains(&usize::MAX) {
            return Err(Error::InconsistentPairing("some side is unpaired".into()));
        }
        let poly = FundamentalPolygon::new(j.genus, vertices, pairing)?;
        if let Some(gens) = &j.generators {
            let ours = poly.generators();
            if gens.len() != ours.len() {
                return Err(Error::InconsistentPairing("generator count mismatch".into()));
            }
            for (g, o) in gens.iter().zip(&ours) {
                if Mobius::from_array(*g)?.coeff_distance(o) > 1e-8 {
                    return Err(Error::InconsistentPairing(
                        "supplied generator does not map its side onto its partner".into(),
                    ));
                }
            }
        }
        Ok(poly)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonJson {
    pub genus: usize,
    pub vertices: Vec<[f64; 2]>,
    pub pairing: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<[f64; 4]>>,
}

/// Largest distance of a side's sample points from the partner side, after mapping.
pub fn side_map_hausdorff(poly: &FundamentalPolygon, k: usize, samples: usize) -> f64 {
    let (a, b) = poly.side(k);
    let (c, d) = poly.side(poly.pairing[k]);
    let m = poly.side_maps[k];
    (1..=samples)
        .map(|i| {
            let t = i as f64 / (samples + 1) as f64;
            let p = crate::hypgeom::geodesic_point(a, b, t);
            // on the reversed partner, the same parameter measured from its end
            let q = crate::hypgeom::geodesic_point(d, c, t);
            hyp_distance(m.apply(p), q).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::distance_to_geodesic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn octagon_radius_and_angles() {
        let p = regular_polygon(2).unwrap();
        let cot = 1.0 / (PI / 8.0).tan();
        let r = (cot * cot).acosh();
        let s_closed = (r / 2.0).tanh();
        let s = p.vertices[0].x;
        assert!((s - s_closed).abs() < 1e-9);
        assert!((s - 0.84090).abs() < 1e-5);
        for a in p.interior_angles() {
            assert!((a - PI / 4.0).abs() < 1e-10);
        }
        assert!((p.interior_angles().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn twelve_gon() {
        let p = regular_polygon(3).unwrap();
        assert_eq!(p.n_sides(), 12);
        assert!((p.interior_angles().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-10);
        let cot = 1.0 / (PI / 12.0).tan();
        assert!((p.vertices[0].x - ((cot * cot).acosh() / 2.0).tanh()).abs() < 1e-9);
        assert_eq!(p.cycle.len(), 12);
        assert!(regular_polygon(1).is_err());
    }

    #[test]
    fn octagon_pairing_matches_block_pattern() {
        let p = regular_polygon(2).unwrap();
        // 1-based (1,3),(2,4),(5,7),(6,8)
        assert_eq!(p.pairing, vec![2, 3, 0, 1, 6, 7, 4, 5]);
        let g1 = p.generators()[0];
        let v = &p.vertices;
        assert!(hyp_distance(g1.apply(v[0]), v[3]).unwrap() < 1e-12);
        assert!(hyp_distance(g1.apply(v[1]), v[2]).unwrap() < 1e-12);
        let id = side_pairing((v[0], v[1]), (v[0], v[1])).unwrap();
        assert!(id.coeff_distance(&Mobius::IDENTITY) < 1e-12);
    }

    #[test]
    fn elliptic_cycle_matches_expected_word() {
        let p = regular_polygon(2).unwrap();
        let verts: Vec<usize> = p.cycle.iter().map(|(v, _)| *v).collect();
        // 1-based v1, v4, v3, v2, v5, v8, v7, v6
        assert_eq!(verts, vec![0, 3, 2, 1, 4, 7, 6, 5]);
        let mut seen = verts.clone();
        seen.sort();
        assert_eq!(seen, (0..8).collect::<Vec<_>>());
        // γ1, γ2⁻¹, γ1⁻¹, γ2, γ3, γ4⁻¹, γ3⁻¹, γ4 applied in sequence
        let g = p.generators();
        let seq = [g[0], g[1].inverse(), g[0].inverse(), g[1], g[2], g[3].inverse(), g[2].inverse(), g[3]];
        let mut x = p.vertices[0];
        for m in seq {
            x = m.apply(x);
        }
        assert!(hyp_distance(x, p.vertices[0]).unwrap() < 1e-10);
        for (v, el) in &p.cycle {
            assert!(hyp_distance(el.transform.apply(p.vertices[0]), p.vertices[*v]).unwrap() < 1e-10);
        }
        let total: f64 = p.cycle.iter().map(|(v, _)| p.interior_angles()[*v]).sum();
        assert!((total - 2.0 * PI).abs() < 1e-9);
        assert_eq!(p.cycle[1].1.word, vec![1]);
        assert_eq!(p.cycle[2].1.word, vec![-2, 1]);
    }

    #[test]
    fn generators_are_hyperbolic_and_map_sides() {
        for g in [2, 3] {
            let p = regular_polygon(g).unwrap();
            for m in p.generators() {
                assert!(m.trace().abs() > 2.0);
            }
            for k in 0..p.n_sides() {
                assert!(side_map_hausdorff(&p, k, 16) < 1e-10);
                assert!(p.side_maps[k].compose(&p.side_maps[p.pairing[k]]).coeff_distance(&Mobius::IDENTITY) < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let p = regular_polygon(2).unwrap();
        assert_eq!(p.enumerate_group(0).len(), 1);
        let e1 = p.enumerate_group(1);
        assert_eq!(e1.len(), 9);
        let e3 = p.enumerate_group(3);
        let min_move = e3[1..]
            .iter()
            .map(|e| hyp_distance(DiskPoint::ORIGIN, e.transform.apply(DiskPoint::ORIGIN)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min_move > 1.0);
        for e in &e3 {
            let mut t = Mobius::IDENTITY;
            for &s in &e.word {
                t = t.compose(&p.generator_by_symbol(s));
            }
            assert!(t.coeff_distance(&e.transform) < 1e-9);
        }
    }

    #[test]
    fn tiles_do_not_overlap() {
        let p = regular_polygon(2).unwrap();
        let els = p.enumerate_group(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = p.vertices[0].x;
        let mut interior = Vec::new();
        while interior.len() < 40 {
            let q = DiskPoint::new_unchecked(rng.random_range(-s..s), rng.random_range(-s..s));
            if p.side_margins(q).all(|(_, m)| m > 1e-6) {
                interior.push(q);
            }
        }
        for (i, a) in els.iter().enumerate() {
            for x in &interior {
                let y = a.transform.apply(*x);
                for (j, b) in els.iter().enumerate() {
                    if i != j {
                        let back = b.transform.inverse().apply(y);
                        assert!(!p.side_margins(back).all(|(_, m)| m > 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn locate_examples() {
        let p = regular_polygon(2).unwrap();
        let q = DiskPoint::new(0.1, -0.2).unwrap();
        let (g, r) = p.locate(q, 8).unwrap();
        assert!(g.word.is_empty());
        assert_eq!(r, q);
        let x = p.generators()[0].inverse().apply(DiskPoint::ORIGIN);
        let (g, r) = p.locate(x, 8).unwrap();
        assert!(hyp_distance(r, DiskPoint::ORIGIN).unwrap() < 1e-12);
        assert_eq!(g.word, vec![1]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d = rng.random_range(0.0..3.0f64);
            let th = rng.random_range(0.0..2.0 * PI);
            let rr = (d / 2.0).tanh();
            let x = DiskPoint::new_unchecked(rr * th.cos(), rr * th.sin());
            let (g, y) = p.locate(x, 8).unwrap();
            assert!(p.contains(y, 1e-12));
            assert!(hyp_distance(g.transform.apply(x), y).unwrap() < 1e-10);
        }
        let far = DiskPoint::new_unchecked(0.99999, 0.0);
        assert!(matches!(p.locate(far, 1), Err(Error::NotFound { max_word_len: 1 })));
    }

    #[test]
    fn polygon_is_convex_and_sides_are_geodesics() {
        let p = regular_polygon(2).unwrap();
        for k in 0..8 {
            let (a, b) = p.side(k);
            for j in 0..8 {
                if j != k && j != (k + 1) % 8 {
                    assert!(distance_to_geodesic(p.vertices[j], a, b) > 0.1);
                    assert!(p.contains(p.vertices[j], 1e-12));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = regular_polygon(3).unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back = FundamentalPolygon::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, p);
        let mut without = p.to_json();
        without.generators = None;
        assert_eq!(FundamentalPolygon::from_json(&without).unwrap(), p);
        let mut bad = p.to_json();
        bad.vertices[0] = [0.5, 0.0];
        assert!(FundamentalPolygon::from_json(&bad).is_err());
        let mut bad = p.to_json();
        bad.pairing[0] = [0, 1];
        assert!(FundamentalPolygon::from_json(&bad).is_err());
    }
}
