//! Robust planar predicates.
//!
//! Every sign decision goes through a floating-point fast path guarded by a
//! forward error bound. When the bound cannot certify the sign, the inputs are
//! converted exactly into big integers sharing a common binary exponent and the
//! polynomial is re-evaluated without rounding. The fast-path bounds are the
//! classic ones for `orient2d` and `incircle` with `EPS = 2^-53`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Float, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const EPS: f64 = f64::EPSILON * 0.5;
const CCW_BOUND: f64 = (3.0 + 16.0 * EPS) * EPS;
const ICC_BOUND: f64 = (10.0 + 96.0 * EPS) * EPS;
const SQ_LEN_BOUND: f64 = 16.0 * EPS;
// Below this magnitude products may have lost bits to gradual underflow and
// the relative bounds above no longer hold.
const UNDERFLOW_GUARD: f64 = 1e-280;

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

impl Orientation {
    fn from_sign(sign: Ordering) -> Self {
        match sign {
            Ordering::Greater => Orientation::CounterClockwise,
            Ordering::Less => Orientation::Clockwise,
            Ordering::Equal => Orientation::Collinear,
        }
    }

    /// Orientation of the same points in mirrored order.
    pub fn reversed(self) -> Self {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Position of a query point relative to the circle through three points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CirclePosition {
    Inside,
    On,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("degenerate triangle: the three points are collinear")]
    Collinear,
}

/// Orientation of the triangle `abc`.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> Orientation {
    Orientation::from_sign(orient2d_sign(a, b, c))
}

/// Sign of `(b - a) x (c - a)`; `Greater` means counter-clockwise.
pub(crate) fn orient2d_sign(a: Point2, b: Point2, c: Point2) -> Ordering {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let bound = CCW_BOUND * (detleft.abs() + detright.abs());
    if certified(det, bound) {
        return sign_of(det);
    }
    exact::orient2d(a, b, c)
}

/// Classifies `d` against the circle through `a`, `b`, `c`.
///
/// The triangle may be given in either orientation; collinear `a`, `b`, `c`
/// have no circle and are rejected.
pub fn in_circumcircle(
    a: Point2,
    b: Point2,
    c: Point2,
    d: Point2,
) -> Result<CirclePosition, GeomError> {
    let sign = match orient2d_sign(a, b, c) {
        Ordering::Equal => return Err(GeomError::Collinear),
        Ordering::Greater => incircle_sign(a, b, c, d),
        Ordering::Less => incircle_sign(a, c, b, d),
    };
    Ok(match sign {
        Ordering::Greater => CirclePosition::Inside,
        Ordering::Equal => CirclePosition::On,
        Ordering::Less => CirclePosition::Outside,
    })
}

/// Raw in-circle determinant sign. Positive means inside when `abc` is
/// counter-clockwise.
pub(crate) fn incircle_sign(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;

    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;

    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    if certified(det, ICC_BOUND * permanent) {
        return sign_of(det);
    }
    exact::incircle(a, b, c, d)
}

/// In-circle test under a symbolic perturbation of the lifted coordinates.
///
/// Point `i` is lifted to `x^2 + y^2 + eps^(i+1)`, so lower indices carry the
/// dominant perturbation. The result is never `Equal` as long as `abc` is a
/// proper counter-clockwise triangle, which makes the induced triangulation
/// unique even for cocircular inputs.
pub(crate) fn incircle_perturbed(pts: [Point2; 4], ids: [usize; 4]) -> Ordering {
    let [a, b, c, d] = pts;
    let raw = incircle_sign(a, b, c, d);
    if raw != Ordering::Equal {
        return raw;
    }
    let mut slots = [0usize, 1, 2, 3];
    slots.sort_unstable_by_key(|&s| ids[s]);
    for slot in slots {
        // Cofactors of the lift column in the 4x4 lifted determinant.
        let coefficient = match slot {
            0 => orient2d_sign(b, c, d),
            1 => orient2d_sign(a, c, d).reverse(),
            2 => orient2d_sign(a, b, d),
            _ => orient2d_sign(a, b, c).reverse(),
        };
        if coefficient != Ordering::Equal {
            return coefficient;
        }
    }
    Ordering::Equal
}

/// Squared Euclidean distance, rounded once per operation.
#[inline]
pub fn squared_distance(a: Point2, b: Point2) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dx * dx + dy * dy
}

/// Exact comparison of `|ab|^2` against `|cd|^2`.
pub fn cmp_squared_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    cmp_squared_distance_hinted(a, b, squared_distance(a, b), c, d, squared_distance(c, d))
}

/// Same as [`cmp_squared_distance`] when the rounded squared lengths are
/// already at hand.
pub(crate) fn cmp_squared_distance_hinted(
    a: Point2,
    b: Point2,
    ab: f64,
    c: Point2,
    d: Point2,
    cd: f64,
) -> Ordering {
    let diff = ab - cd;
    if certified(diff, SQ_LEN_BOUND * (ab + cd)) {
        return sign_of(diff);
    }
    exact::cmp_squared_distance(a, b, c, d)
}

/// Whether two rounded squared lengths `ab >= cd` certainly come from exact
/// values in the same order. If so, every pair of rounded squared lengths
/// on either side of them is certain as well.
pub(crate) fn squared_lengths_separated(ab: f64, cd: f64) -> bool {
    certified(ab - cd, SQ_LEN_BOUND * (ab + cd))
}

/// Radius of the circle through `a`, `b`, `c`, computed as the product of the
/// side lengths over four times the area.
pub fn circumradius(a: Point2, b: Point2, c: Point2) -> Result<f64, GeomError> {
    if orient2d_sign(a, b, c) == Ordering::Equal {
        return Err(GeomError::Collinear);
    }
    let ab = squared_distance(a, b).sqrt();
    let bc = squared_distance(b, c).sqrt();
    let ca = squared_distance(c, a).sqrt();
    let mut twice_area = ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
    if twice_area == 0.0 {
        // Rounded to zero even though the exact sign is not.
        twice_area = exact::twice_area(a, b, c);
    }
    Ok(ab * bc * ca / (2.0 * twice_area))
}

/// True iff every angle of `abc` is strictly below a right angle.
///
/// Decided by the signs of the three vertex dot products, which is equivalent
/// to comparing the longest squared side against the sum of the other two.
/// Right triangles are not acute.
pub fn is_acute(a: Point2, b: Point2, c: Point2) -> Result<bool, GeomError> {
    if orient2d_sign(a, b, c) == Ordering::Equal {
        return Err(GeomError::Collinear);
    }
    Ok(dot_sign(a, b, c) == Ordering::Greater
        && dot_sign(b, c, a) == Ordering::Greater
        && dot_sign(c, a, b) == Ordering::Greater)
}

/// Sign of `(p - apex) . (q - apex)`.
pub(crate) fn dot_sign(apex: Point2, p: Point2, q: Point2) -> Ordering {
    let left = (p.x - apex.x) * (q.x - apex.x);
    let right = (p.y - apex.y) * (q.y - apex.y);
    let dot = left + right;
    if certified(dot, CCW_BOUND * (left.abs() + right.abs())) {
        return sign_of(dot);
    }
    exact::dot(apex, p, q)
}

#[inline]
fn certified(value: f64, bound: f64) -> bool {
    value.is_finite() && bound.is_finite() && bound > UNDERFLOW_GUARD && value.abs() > bound
}

#[inline]
fn sign_of(v: f64) -> Ordering {
    if v > 0.0 {
        Ordering::Greater
    } else if v < 0.0 {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Exact evaluation on integers scaled by a shared power of two.
mod exact {
    use super::*;

    /// Converts every coordinate to `m * 2^e_min` with integer `m`, where
    /// `e_min` is the smallest exponent among the inputs. The returned
    /// integers are the `m`s; polynomial signs are unaffected by the common
    /// positive scale.
    fn scaled<const N: usize>(values: [f64; N]) -> ([BigInt; N], i32) {
        let parts = values.map(|v| {
            let (mantissa, exponent, sign) = Float::integer_decode(v);
            (mantissa, i32::from(exponent), sign)
        });
        let e_min = parts
            .iter()
            .filter(|(m, _, _)| *m != 0)
            .map(|&(_, e, _)| e)
            .min()
            .unwrap_or(0);
        let ints = parts.map(|(m, e, s)| {
            if m == 0 {
                return BigInt::zero();
            }
            let v = BigInt::from(m) << ((e - e_min) as usize);
            if s < 0 {
                -v
            } else {
                v
            }
        });
        (ints, e_min)
    }

    fn sign(v: &BigInt) -> Ordering {
        if v.is_positive() {
            Ordering::Greater
        } else if v.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn cross(a: Point2, b: Point2, c: Point2) -> (BigInt, i32) {
        let ([ax, ay, bx, by, cx, cy], e) = scaled([a.x, a.y, b.x, b.y, c.x, c.y]);
        ((&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax), e)
    }

    pub(super) fn orient2d(a: Point2, b: Point2, c: Point2) -> Ordering {
        sign(&cross(a, b, c).0)
    }

    pub(super) fn twice_area(a: Point2, b: Point2, c: Point2) -> f64 {
        let (v, e) = cross(a, b, c);
        let mantissa = v.abs().to_f64().unwrap_or(f64::INFINITY);
        mantissa * 2f64.powi(2 * e)
    }

    pub(super) fn dot(apex: Point2, p: Point2, q: Point2) -> Ordering {
        let ([ax, ay, px, py, qx, qy], _) = scaled([apex.x, apex.y, p.x, p.y, q.x, q.y]);
        sign(&((&px - &ax) * (&qx - &ax) + (&py - &ay) * (&qy - &ay)))
    }

    pub(super) fn cmp_squared_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
        let ([ax, ay, bx, by, cx, cy, dx, dy], _) =
            scaled([a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y]);
        let ab = (&bx - &ax).pow(2) + (&by - &ay).pow(2);
        let cd = (&dx - &cx).pow(2) + (&dy - &cy).pow(2);
        ab.cmp(&cd)
    }

    pub(super) fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
        let ([ax, ay, bx, by, cx, cy, dx, dy], _) =
            scaled([a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y]);
        let (adx, ady) = (&ax - &dx, &ay - &dy);
        let (bdx, bdy) = (&bx - &dx, &by - &dy);
        let (cdx, cdy) = (&cx - &dx, &cy - &dy);
        let alift = &adx * &adx + &ady * &ady;
        let blift = &bdx * &bdx + &bdy * &bdy;
        let clift = &cdx * &cdx + &cdy * &cdy;
        let det = alift * (&bdx * &cdy - &cdx * &bdy)
            + blift * (&cdx * &ady - &adx * &cdy)
            + clift * (&adx * &bdy - &bdx * &ady);
        sign(&det)
    }
}
