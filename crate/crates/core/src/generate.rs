//! Sample closed surfaces of any genus: the double of a grid rectangle with
//! `g` square holes, puffed into 3D. The top sheet carries one high-valence
//! hub vertex so a base point with room for `4g` cut darts exists.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::Surface;

/// Chebyshev radius of the hub fan, in grid cells (ring of `8·HUB_RADIUS` vertices).
const HUB_RADIUS: i64 = 3;

pub fn genus_surface(genus: usize, resolution: usize) -> Result<Surface> {
    if genus < 1 {
        return Err(Error::InvalidInput("generator needs genus >= 1".into()));
    }
    if resolution == 0 {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let r = resolution as i64;
    let w = 6 * genus as i64 * r;
    let h = 12 * r;
    let in_hole_cell = |i: i64, j: i64| {
        (2 * r..4 * r).contains(&j)
            && (0..genus as i64).any(|k| ((2 + 6 * k) * r..(4 + 6 * k) * r).contains(&i))
    };
    let strictly_in_hole = |i: i64, j: i64| {
        j > 2 * r
            && j < 4 * r
            && (0..genus as i64).any(|k| i > (2 + 6 * k) * r && i < (4 + 6 * k) * r)
    };
    let on_boundary = |i: i64, j: i64| {
        if i == 0 || j == 0 || i == w || j == h {
            return true;
        }
        (2 * r..=4 * r).contains(&j)
            && (0..genus as i64).any(|k| ((2 + 6 * k) * r..=(4 + 6 * k) * r).contains(&i))
            && !strictly_in_hole(i, j)
    };
    let (hx, hy) = (w / 2, 8 * r);
    let in_hub = |i: i64, j: i64| (i - hx).abs().max((j - hy).abs()) < HUB_RADIUS;
    let hub_cell = |i: i64, j: i64| {
        i >= hx - HUB_RADIUS && i < hx + HUB_RADIUS && j >= hy - HUB_RADIUS && j < hy + HUB_RADIUS
    };

    let boundary_pts: Vec<(f64, f64)> = (0..=w)
        .flat_map(|i| (0..=h).map(move |j| (i, j)))
        .filter(|&(i, j)| on_boundary(i, j))
        .map(|(i, j)| (i as f64, j as f64))
        .collect();
    let height = |i: i64, j: i64| -> f64 {
        let d2 = boundary_pts
            .iter()
            .map(|&(x, y)| (x - i as f64).powi(2) + (y - j as f64).powi(2))
            .fold(f64::INFINITY, f64::min);
        let d = d2.sqrt() / r as f64;
        1.5 * (d / 2.0).min(1.0).sqrt()
    };

    let mut coords: Vec<[f64; 3]> = Vec::new();
    let mut top: HashMap<(i64, i64), usize> = HashMap::new();
    let mut bottom: HashMap<(i64, i64), usize> = HashMap::new();
    let scale = 1.0 / r as f64;
    for i in 0..=w {
        for j in 0..=h {
            if strictly_in_hole(i, j) {
                continue;
            }
            let (x, y) = (i as f64 * scale, j as f64 * scale);
            if on_boundary(i, j) {
                top.insert((i, j), coords.len());
                bottom.insert((i, j), coords.len());
                coords.push([x, y, 0.0]);
            } else {
                let z = height(i, j);
                if !in_hub(i, j) {
                    top.insert((i, j), coords.len());
                    coords.push([x, y, z]);
                }
                bottom.insert((i, j), coords.len());
                coords.push([x, y, -z]);
            }
        }
    }
    let hub = coords.len();
    coords.push([hx as f64 * scale, hy as f64 * scale, height(hx, hy) + 0.25]);

    let mut faces = Vec::new();
    for i in 0..w {
        for j in 0..h {
            if in_hole_cell(i, j) {
                continue;
            }
            let quad = if (i + j) % 2 == 0 {
                [[(i, j), (i + 1, j), (i + 1, j + 1)], [(i, j), (i + 1, j + 1), (i, j + 1)]]
            } else {
                [[(i, j), (i + 1, j), (i, j + 1)], [(i + 1, j), (i + 1, j + 1), (i, j + 1)]]
            };
            for tri in quad {
                if !hub_cell(i, j) {
                    faces.push(tri.map(|p| top[&p]));
                }
                let b = tri.map(|p| bottom[&p]);
                faces.push([b[0], b[2], b[1]]);
            }
        }
    }
    // counter-clockwise ring around the hub
    let mut ring = Vec::new();
    let rr = HUB_RADIUS;
    for t in -rr..rr {
        ring.push((hx + t, hy - rr));
    }
    for t in -rr..rr {
        ring.push((hx + rr, hy + t));
    }
    for t in -rr..rr {
        ring.push((hx - t, hy + rr));
    }
    for t in -rr..rr {
        ring.push((hx - rr, hy - t));
    }
    for k in 0..ring.len() {
        faces.push([hub, top[&ring[k]], top[&ring[(k + 1) % ring.len()]]]);
    }
    Surface::new(coords, faces)
}
