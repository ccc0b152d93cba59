//! Projective geometry over the rationals.
//!
//! Points of `P^d` are stored as canonical integer homogeneous
//! coordinates: denominators cleared, content divided out, first
//! nonzero coordinate positive. Canonical form makes projective
//! equality plain `==`.

use crate::field::Rat;
use crate::matrix::Mat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A point of projective space in canonical integer coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    /// Canonicalize homogeneous rational coordinates. `None` for the
    /// zero vector (which names no point).
    pub fn try_new(coords: Vec<Rat>) -> Option<ProjPoint> {
        if coords.iter().all(|c| c.is_zero()) {
            return None;
        }
        let mut denom_lcm = BigInt::one();
        for c in &coords {
            denom_lcm = denom_lcm.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = coords
            .iter()
            .map(|c| c.numer() * (&denom_lcm / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for v in &ints {
            content = content.gcd(v);
        }
        let first = ints.iter().find(|v| !v.is_zero()).unwrap();
        if first.is_negative() {
            content = -content;
        }
        for v in &mut ints {
            *v = &*v / &content;
        }
        Some(ProjPoint { coords: ints })
    }

    pub fn new(coords: Vec<Rat>) -> ProjPoint {
        ProjPoint::try_new(coords).expect("zero vector is not a projective point")
    }

    pub fn from_ints(coords: Vec<i64>) -> ProjPoint {
        ProjPoint::new(coords.into_iter().map(crate::field::rat_int).collect())
    }

    /// Standard basis point `e_i` (0-indexed) of `P^d`.
    pub fn basis(i: usize, dim: usize) -> ProjPoint {
        let mut v = vec![Rat::zero(); dim + 1];
        v[i] = Rat::one();
        ProjPoint::new(v)
    }

    /// Ambient projective dimension `d` (the point has `d + 1` coordinates).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords_rat(&self) -> Vec<Rat> {
        self.coords
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }

    pub fn coords_int(&self) -> &[BigInt] {
        &self.coords
    }

    /// Linear combination `a*p + b*q`; `None` when it is the zero vector.
    pub fn combine(a: &Rat, p: &ProjPoint, b: &Rat, q: &ProjPoint) -> Option<ProjPoint> {
        assert_eq!(p.dim(), q.dim());
        let pc = p.coords_rat();
        let qc = q.coords_rat();
        let v: Vec<Rat> = pc
            .iter()
            .zip(&qc)
            .map(|(x, y)| a * x + b * y)
            .collect();
        ProjPoint::try_new(v)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Matrix whose rows are the coordinate vectors of the given points.
pub fn points_matrix(points: &[&ProjPoint]) -> Mat<Rat> {
    let cols = points[0].dim() + 1;
    Mat::from_fn(points.len(), cols, |i, j| {
        BigRational::from_integer(points[i].coords_int()[j].clone())
    })
}

/// Rank of the span of a point set.
pub fn rank_of_points(points: &[&ProjPoint]) -> usize {
    points_matrix(points).rank()
}

pub fn collinear(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> bool {
    rank_of_points(&[a, b, c]) <= 2
}

/// Intersect the line through `p0, p1` with the span of `others`.
/// Returns the unique intersection point, or `None` when the
/// configuration is degenerate (no intersection, or the whole line
/// lies in the span).
pub fn meet_line_with_span(
    p0: &ProjPoint,
    p1: &ProjPoint,
    others: &[&ProjPoint],
) -> Option<ProjPoint> {
    let n = p0.dim() + 1;
    let cols = 2 + others.len();
    let m = Mat::from_fn(n, cols, |i, j| {
        let v = match j {
            0 => &p0.coords_int()[i],
            1 => &p1.coords_int()[i],
            _ => return -BigRational::from_integer(others[j - 2].coords_int()[i].clone()),
        };
        BigRational::from_integer(v.clone())
    });
    let ns = m.nullspace();
    if ns.len() != 1 {
        return None;
    }
    let v = &ns[0];
    ProjPoint::combine(&v[0], p0, &v[1], p1)
}

/// Intersection point of two lines in `P^d`, each given by a pair of
/// points. `None` when the lines are skew or equal.
pub fn meet_lines(
    a0: &ProjPoint,
    a1: &ProjPoint,
    b0: &ProjPoint,
    b1: &ProjPoint,
) -> Option<ProjPoint> {
    meet_line_with_span(a0, a1, &[b0, b1])
}

/// Cross product of the canonical coordinates of two `P^2` objects;
/// join of two points or meet of two lines under duality. `None` for
/// equal inputs.
pub fn cross2(p: &ProjPoint, q: &ProjPoint) -> Option<ProjPoint> {
    assert_eq!(p.dim(), 2);
    assert_eq!(q.dim(), 2);
    let a = p.coords_int();
    let b = q.coords_int();
    let v = vec![
        BigRational::from_integer(&a[1] * &b[2] - &a[2] * &b[1]),
        BigRational::from_integer(&a[2] * &b[0] - &a[0] * &b[2]),
        BigRational::from_integer(&a[0] * &b[1] - &a[1] * &b[0]),
    ];
    ProjPoint::try_new(v)
}

/// A cross-ratio or bracket value on the projective line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtRat {
    Finite(Rat),
    Infinite,
}

/// Cross-ratio of four collinear points of `P^d`, in the convention
/// `(a-b)(c-d) / ((a-c)(b-d))`. `None` when the points are not
/// collinear (or fewer than two are distinct).
pub fn cross_ratio_points(
    a: &ProjPoint,
    b: &ProjPoint,
    c: &ProjPoint,
    d: &ProjPoint,
) -> Option<ExtRat> {
    let pts = [a, b, c, d];
    let second = pts.iter().copied().find(|p| *p != a)?;
    let frame = LineFrame::new(a.clone(), (*second).clone());
    let mut fc = Vec::with_capacity(4);
    for p in pts {
        fc.push(frame.coords(p)?);
    }
    let num = d2(&fc[0], &fc[1]) * d2(&fc[2], &fc[3]);
    let den = d2(&fc[0], &fc[2]) * d2(&fc[1], &fc[3]);
    Some(if den.is_zero() {
        ExtRat::Infinite
    } else {
        ExtRat::Finite(num / den)
    })
}

/// Coordinates of collinear points in a fixed frame on their line.
///
/// The frame is a pair of independent ambient vectors; every point on
/// the line gets homogeneous coordinates `(alpha, beta)` with
/// `point ~ alpha * f0 + beta * f1`. Cross-ratios and the six-point
/// bracket are computed from 2x2 determinants of these coordinates,
/// which makes points "at infinity" of any affine chart unremarkable.
pub struct LineFrame {
    f0: ProjPoint,
    f1: ProjPoint,
}

/// Frame coordinates of one point.
pub type FrameCoords = (Rat, Rat);

impl LineFrame {
    pub fn new(f0: ProjPoint, f1: ProjPoint) -> LineFrame {
        assert!(f0 != f1, "frame points must be distinct");
        LineFrame { f0, f1 }
    }

    /// `None` when `p` is not on the frame's line.
    pub fn coords(&self, p: &ProjPoint) -> Option<FrameCoords> {
        let n = self.f0.dim() + 1;
        let m = Mat::from_fn(n, 3, |i, j| {
            let v = match j {
                0 => self.f0.coords_int()[i].clone(),
                1 => self.f1.coords_int()[i].clone(),
                _ => -p.coords_int()[i].clone(),
            };
            BigRational::from_integer(v)
        });
        let ns = m.nullspace();
        if ns.len() != 1 {
            return None;
        }
        let v = &ns[0];
        if v[2].is_zero() {
            return None;
        }
        Some((&v[0] / &v[2], &v[1] / &v[2]))
    }

    pub fn point(&self, c: &FrameCoords) -> Option<ProjPoint> {
        ProjPoint::combine(&c.0, &self.f0, &c.1, &self.f1)
    }
}

/// `det [[p_a, q_a], [p_b, q_b]]` of two frame-coordinate pairs.
fn d2(p: &FrameCoords, q: &FrameCoords) -> Rat {
    &p.0 * &q.1 - &p.1 * &q.0
}

/// Cross-ratio `[a, b; c, d] = (a-b)(c-d) / (a-c)(b-d)` of four
/// collinear points, in the convention matching the affine formula on
/// the right. `None` when the denominator vanishes.
pub fn cross_ratio(
    a: &FrameCoords,
    b: &FrameCoords,
    c: &FrameCoords,
    d: &FrameCoords,
) -> Option<Rat> {
    let num = d2(a, b) * d2(c, d);
    let den = d2(a, c) * d2(b, d);
    if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

/// Six-point bracket
/// `[a,b,c,d,e,f] = D(a,b) D(c,d) D(e,f) / (D(b,c) D(d,e) D(f,a))`
/// of six collinear points in frame coordinates.
pub fn six_bracket(p: &[FrameCoords; 6]) -> Option<Rat> {
    let num = d2(&p[0], &p[1]) * d2(&p[2], &p[3]) * d2(&p[4], &p[5]);
    let den = d2(&p[1], &p[2]) * d2(&p[3], &p[4]) * d2(&p[5], &p[0]);
    if den.is_zero() {
        None
    } else {
        Some(num / den)
    }
}

/// Given the first five arguments of the six-point bracket and a target
/// value `t`, return frame coordinates of the sixth point making the
/// bracket equal `t`. `None` when the data is degenerate.
pub fn six_bracket_solve_last(p: &[FrameCoords; 5], t: &Rat) -> Option<FrameCoords> {
    let n = d2(&p[0], &p[1]) * d2(&p[2], &p[3]);
    let dn = d2(&p[1], &p[2]) * d2(&p[3], &p[4]);
    if n.is_zero() || dn.is_zero() {
        return None;
    }
    // Bracket = t  <=>  D(e,f) = (t*dn/n) * D(f,a); linear in f.
    let c = t * &dn / &n;
    let a = &p[0];
    let e = &p[4];
    let f = (&e.0 + &c * &a.0, &e.1 + &c * &a.1);
    if f.0.is_zero() && f.1.is_zero() {
        None
    } else {
        Some(f)
    }
}
