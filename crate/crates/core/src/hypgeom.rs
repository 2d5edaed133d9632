//! Poincaré disk kernel: distances, isometries, exponential and logarithm
//! maps, and hyperbolic triangle trigonometry.
//!
//! Tangent vectors are stored by their Euclidean components in disk
//! coordinates. The hyperbolic norm of `v` at `p` is `λ(p)·|v|` with the
//! conformal factor `λ(p) = 2 / (1 − |p|²)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this hyperbolic length an edge has no usable direction.
pub const DEGENERATE_EDGE: f64 = 1e-14;

/// Largest representable radius strictly below one.
const MAX_RADIUS: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        let p = DiskPoint { x, y };
        p.validate()?;
        Ok(p)
    }

    /// Caller guarantees `x² + y² < 1`.
    pub const fn new_unchecked(x: f64, y: f64) -> Self {
        DiskPoint { x, y }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_finite() && self.y.is_finite() && self.norm_sqr() < 1.0 {
            Ok(())
        } else {
            Err(Error::OutsideDisk {
                x: self.x,
                y: self.y,
            })
        }
    }

    pub fn from_complex(z: Complex) -> Self {
        DiskPoint { x: z.re, y: z.im }
    }

    pub fn to_complex(self) -> Complex {
        Complex::new(self.x, self.y)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// `1 − |p|²`, evaluated as `(1 − |p|)(1 + |p|)` to keep digits near the rim.
    pub fn one_minus_norm_sqr(&self) -> f64 {
        let r = self.norm_sqr().sqrt();
        (1.0 - r) * (1.0 + r)
    }

    pub fn conformal_factor(&self) -> f64 {
        2.0 / self.one_minus_norm_sqr()
    }

    /// Projective (Klein) model coordinates, where geodesics are straight.
    pub fn to_klein(self) -> [f64; 2] {
        let s = 2.0 / (1.0 + self.norm_sqr());
        [s * self.x, s * self.y]
    }

    pub fn from_klein(k: [f64; 2]) -> Self {
        let n2 = k[0] * k[0] + k[1] * k[1];
        let s = 1.0 / (1.0 + (1.0 - n2).max(0.0).sqrt());
        DiskPoint {
            x: s * k[0],
            y: s * k[1],
        }
    }

    /// Time-like coordinate of the hyperboloid lift.
    pub fn hyperboloid_t(&self) -> f64 {
        (1.0 + self.norm_sqr()) / self.one_minus_norm_sqr()
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVec {
    pub base: DiskPoint,
    pub vx: f64,
    pub vy: f64,
}

impl TangentVec {
    pub fn zero(base: DiskPoint) -> Self {
        TangentVec {
            base,
            vx: 0.0,
            vy: 0.0,
        }
    }

    pub fn new(base: DiskPoint, vx: f64, vy: f64) -> Self {
        TangentVec { base, vx, vy }
    }

    /// Build from components in an orthonormal frame (hyperbolic units).
    pub fn from_orthonormal(base: DiskPoint, ex: f64, ey: f64) -> Self {
        let s = 1.0 / base.conformal_factor();
        TangentVec {
            base,
            vx: ex * s,
            vy: ey * s,
        }
    }

    pub fn norm(&self) -> f64 {
        self.base.conformal_factor() * self.vx.hypot(self.vy)
    }

    pub fn norm_sqr(&self) -> f64 {
        let l = self.base.conformal_factor();
        l * l * (self.vx * self.vx + self.vy * self.vy)
    }

    /// Riemannian inner product with another vector at the same base.
    pub fn dot(&self, other: &TangentVec) -> f64 {
        let l = self.base.conformal_factor();
        l * l * (self.vx * other.vx + self.vy * other.vy)
    }

    pub fn scale(&self, s: f64) -> Self {
        TangentVec {
            base: self.base,
            vx: self.vx * s,
            vy: self.vy * s,
        }
    }

    pub fn add(&self, other: &TangentVec) -> Self {
        TangentVec {
            base: self.base,
            vx: self.vx + other.vx,
            vy: self.vy + other.vy,
        }
    }
}

/// Orientation-preserving disk isometry `z ↦ (a z + b) / (b̄ z + ā)`,
/// normalized so that `|a|² − |b|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
}

impl Default for Mobius {
    fn default() -> Self {
        Mobius::IDENTITY
    }
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: Complex::new(1.0, 0.0),
        b: Complex::new(0.0, 0.0),
    };

    /// Normalizes the coefficient pair; fails if it does not preserve the disk.
    pub fn new(a: Complex, b: Complex) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Möbius coefficients do not preserve the disk (|a|²−|b|² = {det})"
            )));
        }
        Ok(Mobius { a, b }.normalized())
    }

    pub fn normalized(self) -> Self {
        let s = 1.0 / (self.a.norm_sqr() - self.b.norm_sqr()).sqrt();
        Mobius {
            a: self.a * s,
            b: self.b * s,
        }
    }

    pub fn rotation(theta: f64) -> Self {
        Mobius {
            a: Complex::from_polar(1.0, theta / 2.0),
            b: Complex::new(0.0, 0.0),
        }
    }

    /// The hyperbolic translation along the diameter through `p` taking 0 to `p`.
    pub fn translation_to(p: DiskPoint) -> Self {
        let s = 1.0 / p.one_minus_norm_sqr().sqrt();
        Mobius {
            a: Complex::new(s, 0.0),
            b: p.to_complex() * s,
        }
    }

    pub fn apply(&self, p: DiskPoint) -> DiskPoint {
        let z = p.to_complex();
        let w = (self.a * z + self.b) / (self.b.conj() * z + self.a.conj());
        DiskPoint::from_complex(w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// Trace of the normalized SU(1,1) matrix representative.
    pub fn trace(&self) -> f64 {
        2.0 * self.a.re
    }

    /// Representative with `Re a > 0` (ties broken by `Im a ≥ 0`).
    pub fn canonical(&self) -> Mobius {
        let flip = self.a.re < 0.0 || (self.a.re == 0.0 && self.a.im < 0.0);
        if flip {
            Mobius {
                a: -self.a,
                b: -self.b,
            }
        } else {
            *self
        }
    }

    /// Max coefficient difference after sign canonicalization.
    pub fn coeff_distance(&self, other: &Mobius) -> f64 {
        let p = self.canonical();
        let q = other.canonical();
        (p.a - q.a).norm().max((p.b - q.b).norm())
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a.re, self.a.im, self.b.re, self.b.im]
    }

    pub fn from_array(c: [f64; 4]) -> Result<Self> {
        Mobius::new(Complex::new(c[0], c[1]), Complex::new(c[2], c[3]))
    }
}

/// `δ(p,q) = 2‖p−q‖² / ((1−‖p‖²)(1−‖q‖²))`.
pub fn delta(p: DiskPoint, q: DiskPoint) -> Result<f64> {
    p.validate()?;
    q.validate()?;
    Ok(delta_unchecked(p, q))
}

#[inline]
pub(crate) fn delta_unchecked(p: DiskPoint, q: DiskPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    2.0 * (dx * dx + dy * dy) / (p.one_minus_norm_sqr() * q.one_minus_norm_sqr())
}

/// `arcosh(1 + δ)` via `log1p(δ + √(δ² + 2δ))`.
#[inline]
pub fn arcosh_one_plus(d: f64) -> f64 {
    (d + (d * (d + 2.0)).sqrt()).ln_1p()
}

pub fn hyp_distance(p: DiskPoint, q: DiskPoint) -> Result<f64> {
    Ok(arcosh_one_plus(delta(p, q)?))
}

#[inline]
pub(crate) fn distance_unchecked(p: DiskPoint, q: DiskPoint) -> f64 {
    arcosh_one_plus(delta_unchecked(p, q))
}

/// Riemannian logarithm: the tangent vector at `p` whose geodesic reaches `q`
/// at time one. Its hyperbolic norm is `d(p, q)`.
pub fn log_map(p: DiskPoint, q: DiskPoint) -> TangentVec {
    let pc = p.to_complex();
    let z = (q.to_complex() - pc) / (Complex::new(1.0, 0.0) - pc.conj() * q.to_complex());
    let r = z.norm();
    if r == 0.0 {
        return TangentVec::zero(p);
    }
    let d = distance_unchecked(p, q);
    // At the origin a vector of hyperbolic length d has Euclidean length d/2;
    // translating to p scales by (1 − |p|²) and keeps the direction.
    let s = 0.5 * d * p.one_minus_norm_sqr() / r;
    TangentVec {
        base: p,
        vx: z.re * s,
        vy: z.im * s,
    }
}

pub fn exp_map(p: DiskPoint, v: &TangentVec) -> DiskPoint {
    let e = v.vx.hypot(v.vy);
    if e == 0.0 {
        return p;
    }
    let t = p.conformal_factor() * e;
    let r = (0.5 * t).tanh().min(MAX_RADIUS);
    let z0 = Complex::new(v.vx / e * r, v.vy / e * r);
    let pc = p.to_complex();
    DiskPoint::from_complex((z0 + pc) / (pc.conj() * z0 + 1.0))
}

pub fn geodesic_unit_tangent(p: DiskPoint, q: DiskPoint) -> Result<TangentVec> {
    p.validate()?;
    q.validate()?;
    let d = distance_unchecked(p, q);
    if d < DEGENERATE_EDGE {
        return Err(Error::DegenerateEdge { length: d });
    }
    Ok(log_map(p, q).scale(1.0 / d))
}

/// Point at fraction `t` of the way along the geodesic from `p` to `q`.
pub fn geodesic_point(p: DiskPoint, q: DiskPoint, t: f64) -> DiskPoint {
    exp_map(p, &log_map(p, q).scale(t))
}

/// Hyperbolic distance from `p` to the complete geodesic through `a` and `b`.
pub fn distance_to_geodesic(p: DiskPoint, a: DiskPoint, b: DiskPoint) -> f64 {
    let to_a = Mobius::translation_to(a).inverse();
    let b0 = to_a.apply(b).to_complex();
    let rot = Mobius::rotation(-b0.arg());
    let z = rot.apply(to_a.apply(p));
    // distance to the real diameter: sinh d = 2|y| / (1 − |z|²)
    (2.0 * z.y.abs() / z.one_minus_norm_sqr()).asinh()
}

/// Side `a` opposite angle `A` from the two enclosing sides.
pub fn hyp_law_of_cosines(b: f64, c: f64, angle_a: f64) -> f64 {
    let ch = b.cosh() * c.cosh() - b.sinh() * c.sinh() * angle_a.cos();
    ch.max(1.0).acosh()
}

/// Corner angles `(A, B, C)` opposite sides `(a, b, c)` of a hyperbolic
/// triangle, from the half-angle form of the law of cosines:
/// `tan(A/2) = √(sinh(s−b) sinh(s−c) / (sinh s · sinh(s−a)))`.
pub fn angles_from_lengths(a: f64, b: f64, c: f64) -> Result<[f64; 3]> {
    let s = 0.5 * (a + b + c);
    let (sa, sb, sc) = (s - a, s - b, s - c);
    if !(a > 0.0 && b > 0.0 && c > 0.0 && sa > 0.0 && sb > 0.0 && sc > 0.0) {
        return Err(Error::InvalidTriangle { a, b, c });
    }
    let (hs, ha, hb, hc) = (s.sinh(), sa.sinh(), sb.sinh(), sc.sinh());
    let half = |num: f64, den: f64| 2.0 * num.sqrt().atan2(den.sqrt());
    Ok([
        half(hb * hc, hs * ha),
        half(hc * ha, hs * hb),
        half(ha * hb, hs * hc),
    ])
}

/// Area of the hyperbolic triangle with the given side lengths (angle defect).
pub fn triangle_area(a: f64, b: f64, c: f64) -> Result<f64> {
    let [x, y, z] = angles_from_lengths(a, b, c)?;
    Ok(PI - (x + y + z))
}

/// Angle at `p` between the geodesics towards `q` and `r`.
pub fn corner_angle(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> f64 {
    let u = log_map(p, q);
    let v = log_map(p, r);
    let cross = u.vx * v.vy - u.vy * v.vx;
    let dot = u.vx * v.vx + u.vy * v.vy;
    cross.abs().atan2(dot)
}

/// Twice the signed Euclidean area of the Klein-model image of `(p, q, r)`.
/// Positive when the geodesic triangle is counter-clockwise.
pub fn klein_orientation(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> f64 {
    let (a, b, c) = (p.to_klein(), q.to_klein(), r.to_klein());
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// The unique orientation-preserving isometry taking `p0 ↦ q0`, `p1 ↦ q1`.
pub fn isometry_mapping(
    p0: DiskPoint,
    p1: DiskPoint,
    q0: DiskPoint,
    q1: DiskPoint,
) -> Result<Mobius> {
    let ls = hyp_distance(p0, p1)?;
    let ld = hyp_distance(q0, q1)?;
    if (ls - ld).abs() > 1e-10 * ls.max(1.0) {
        return Err(Error::LengthMismatch { src: ls, dst: ld });
    }
    let tp = Mobius::translation_to(p0).inverse();
    let tq = Mobius::translation_to(q0).inverse();
    let wp = tp.apply(p1).to_complex();
    let wq = tq.apply(q1).to_complex();
    let rot = Mobius::rotation(wq.arg() - wp.arg());
    Ok(tq.inverse().compose(&rot).compose(&tp))
}
