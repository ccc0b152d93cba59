//! Exact experiment drivers for three systems where Devron-style collapse
//! is observed but unproven: bipartite circle intersection on plane
//! polygons, the three-dimensional pentagram analogue on space polygons,
//! and bipartite Schubert flips on cyclic line configurations.
//!
//! Every driver follows the same discipline: start configurations are
//! built backward from the expected singular data, dynamics run in exact
//! rational arithmetic, terminal conditions are zero tests, and results
//! are *reported* — no test or verdict ever asserts the conjectured step
//! count. Degenerate trials are discarded with a reason.

use crate::field::{rat_int, rat_to_string, Field, Rat};
use crate::matrix::Mat;
use crate::proj::{rank_of_points, meet_line_with_span, points_matrix, ProjPoint};
use crate::report::{Report, TrialRecord};
use crate::rng::{trial_rng, Seeded};
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Circle intersection
// ---------------------------------------------------------------------------

/// A point of the plane plus the single point at infinity; the natural
/// domain for circle intersection, since three collinear points span a
/// "circle" through infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpherePoint {
    Finite(Rat, Rat),
    Infinity,
}

impl SpherePoint {
    pub fn from_ints(x: i64, y: i64) -> SpherePoint {
        SpherePoint::Finite(rat_int(x), rat_int(y))
    }

    /// Row of the incidence system: a circle `a(x²+y²)+Dx+Ey+F = 0`
    /// passes through this point iff the dot product with this row
    /// vanishes. Infinity lies on exactly the circles with `a = 0`.
    fn incidence_row(&self) -> [Rat; 4] {
        match self {
            SpherePoint::Finite(x, y) => [
                x.clone() * x.clone() + y.clone() * y.clone(),
                x.clone(),
                y.clone(),
                Rat::one(),
            ],
            SpherePoint::Infinity => [Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()],
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(x, y) => write!(f, "({}, {})", rat_to_string(x), rat_to_string(y)),
            SpherePoint::Infinity => write!(f, "infinity"),
        }
    }
}

/// A circle `a(x²+y²) + Dx + Ey + F = 0` with canonicalized rational
/// coefficients; `a = 0` encodes a line (a circle through infinity).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    coeffs: ProjPoint,
}

impl Circle {
    pub fn try_new(coeffs: Vec<Rat>) -> Option<Circle> {
        ProjPoint::try_new(coeffs).map(|coeffs| Circle { coeffs })
    }

    fn abc(&self) -> [Rat; 4] {
        let c = self.coeffs.coords_rat();
        [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]
    }

    pub fn is_line(&self) -> bool {
        self.coeffs.coords_rat()[0].is_zero()
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        let c = self.coeffs.coords_rat();
        let row = p.incidence_row();
        (0..4).map(|i| c[i].clone() * row[i].clone()).sum::<Rat>().is_zero()
    }
}

/// The unique circle (or line) through three distinct sphere points;
/// `None` when the points do not determine one.
pub fn circle_through(p: &SpherePoint, q: &SpherePoint, r: &SpherePoint) -> Option<Circle> {
    let rows = [p.incidence_row(), q.incidence_row(), r.incidence_row()];
    let m = Mat::from_fn(3, 4, |i, j| rows[i][j].clone());
    let ns = m.nullspace();
    if ns.len() != 1 {
        return None;
    }
    Circle::try_new(ns.into_iter().next().unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircleError {
    /// The two circles coincide; the second intersection is undefined.
    Indeterminate,
    Degenerate(String),
}

impl fmt::Display for CircleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleError::Indeterminate => write!(f, "identical circles"),
            CircleError::Degenerate(s) => write!(f, "degenerate configuration: {s}"),
        }
    }
}

/// Second intersection of two distinct circles with a known common
/// point. Rational throughout: the radical line of the pencil carries
/// both intersections, and dividing out the known root of the restricted
/// quadratic leaves a linear equation. Tangency returns the known point.
pub fn second_meet(
    c1: &Circle,
    c2: &Circle,
    known: &SpherePoint,
) -> Result<SpherePoint, CircleError> {
    if c1 == c2 {
        return Err(CircleError::Indeterminate);
    }
    if !c1.contains(known) || !c2.contains(known) {
        return Err(CircleError::Degenerate(
            "claimed common point lies on at most one of the circles".into(),
        ));
    }
    let [a1, d1, e1, f1] = c1.abc();
    let [a2, d2, e2, f2] = c2.abc();
    if a1.is_zero() && a2.is_zero() {
        // Two distinct lines. They share infinity and at most one finite
        // point, so the answer is whichever of the two `known` is not.
        if let SpherePoint::Finite(_, _) = known {
            return Ok(SpherePoint::Infinity);
        }
        let det = d1.clone() * e2.clone() - d2.clone() * e1.clone();
        if det.is_zero() {
            return Ok(SpherePoint::Infinity); // parallel: tangent at infinity
        }
        let x = (e1 * f2.clone() - e2 * f1.clone()) / det.clone();
        let y = (d2 * f1 - d1 * f2) / det;
        return Ok(SpherePoint::Finite(x, y));
    }
    // Radical line: the combination of the two equations that kills the
    // quadratic term. Nonzero because the circles are distinct.
    let l1 = a2.clone() * d1.clone() - a1.clone() * d2;
    let l2 = a2.clone() * e1.clone() - a1.clone() * e2;
    if l1.is_zero() && l2.is_zero() {
        return Err(CircleError::Degenerate(
            "radical line is at infinity despite a common finite point".into(),
        ));
    }
    let (x0, y0) = match known {
        SpherePoint::Finite(x, y) => (x.clone(), y.clone()),
        SpherePoint::Infinity => {
            return Err(CircleError::Degenerate(
                "infinity cannot lie on a genuine circle".into(),
            ))
        }
    };
    // Restrict whichever circle is genuine to the radical line through
    // the known point; `t = 0` is the known root.
    let (a, d, e) = if a1.is_zero() { (a2, c2.abc()[1].clone(), c2.abc()[2].clone()) } else { (a1, d1, e1) };
    let (ux, uy) = (l2.clone(), -l1.clone());
    let lead = a.clone() * (ux.clone() * ux.clone() + uy.clone() * uy.clone());
    let two = rat_int(2);
    let lin = a * two * (x0.clone() * ux.clone() + y0.clone() * uy.clone()) + d * ux.clone() + e * uy.clone();
    let t = -lin / lead;
    if t.is_zero() {
        return Ok(known.clone()); // tangency: the second root is the first
    }
    Ok(SpherePoint::Finite(x0 + t.clone() * ux, y0 + t * uy))
}

/// The circle-intersection flip: given five consecutive vertices, the
/// circles through `A,B,C` and `C,D,E` meet at `C` and one further point.
pub fn circle_second_intersection(
    a: &SpherePoint,
    b: &SpherePoint,
    c: &SpherePoint,
    d: &SpherePoint,
    e: &SpherePoint,
) -> Result<SpherePoint, CircleError> {
    let c1 = circle_through(a, b, c)
        .ok_or_else(|| CircleError::Degenerate("first triple has no unique circle".into()))?;
    let c2 = circle_through(c, d, e)
        .ok_or_else(|| CircleError::Degenerate("second triple has no unique circle".into()))?;
    second_meet(&c1, &c2, c)
}

/// A closed polygon on the sphere, indexed cyclically; always of even
/// length so the two vertex parities can alternate under the dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePolygon {
    verts: Vec<SpherePoint>,
}

impl CirclePolygon {
    pub fn new(verts: Vec<SpherePoint>) -> CirclePolygon {
        assert!(verts.len() >= 6 && verts.len() % 2 == 0);
        CirclePolygon { verts }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: i64) -> &SpherePoint {
        let n = self.verts.len() as i64;
        &self.verts[i.rem_euclid(n) as usize]
    }

    pub fn flip_at(&self, i: i64) -> Result<SpherePoint, CircleError> {
        circle_second_intersection(
            self.vertex(i - 2),
            self.vertex(i - 1),
            self.vertex(i),
            self.vertex(i + 1),
            self.vertex(i + 2),
        )
    }

    /// Flip every vertex of the given parity simultaneously, reading all
    /// five-point windows from the current polygon.
    pub fn flip_parity(&self, parity: usize) -> Result<CirclePolygon, CircleError> {
        let mut verts = self.verts.clone();
        for i in 0..self.verts.len() {
            if i % 2 == parity % 2 {
                verts[i] = self.flip_at(i as i64)?;
            }
        }
        Ok(CirclePolygon { verts })
    }

    /// If all flips of one parity are defined and agree, their common
    /// value; `Ok(None)` when they disagree.
    pub fn common_flip_point(&self, parity: usize) -> Result<Option<SpherePoint>, CircleError> {
        let mut common: Option<SpherePoint> = None;
        for i in 0..self.verts.len() {
            if i % 2 != parity % 2 {
                continue;
            }
            let p = self.flip_at(i as i64)?;
            match &common {
                None => common = Some(p),
                Some(q) if *q == p => {}
                Some(_) => return Ok(None),
            }
        }
        Ok(common)
    }
}

fn random_finite(rng: &mut Seeded) -> SpherePoint {
    SpherePoint::from_ints(rng.gen_range(-9..=9), rng.gen_range(-9..=9))
}

fn random_circle_through(p: &SpherePoint, rng: &mut Seeded) -> Option<Circle> {
    let q = random_finite(rng);
    let r = random_finite(rng);
    circle_through(p, &q, &r)
}

/// A further rational point of `k`: second intersection of `k` with a
/// random rational-slope line through the known point `p`.
fn random_point_on(k: &Circle, p: &SpherePoint, rng: &mut Seeded) -> Option<SpherePoint> {
    let (x0, y0) = match p {
        SpherePoint::Finite(x, y) => (x.clone(), y.clone()),
        SpherePoint::Infinity => return None,
    };
    let t = Rat::random_nonzero(rng);
    let line = Circle::try_new(vec![
        Rat::zero(),
        t.clone(),
        -Rat::one(),
        y0 - t * x0,
    ])?;
    match second_meet(k, &line, p) {
        Ok(q) if q != *p => Some(q),
        _ => None,
    }
}

/// Build a `2n`-gon whose odd-vertex flips all land on one common point,
/// working backward from that point: choose `n` circles through it, put
/// each odd vertex on the second intersection of two consecutive circles
/// and each even vertex elsewhere on its circle. Returns the polygon and
/// the common point.
pub fn circle_start_config(n: usize, rng: &mut Seeded) -> Option<(CirclePolygon, SpherePoint)> {
    let p = random_finite(rng);
    let mut circles = Vec::with_capacity(n);
    for _ in 0..n {
        circles.push(random_circle_through(&p, rng)?);
    }
    for i in 0..n {
        for j in 0..i {
            if circles[i] == circles[j] {
                return None;
            }
        }
    }
    let mut verts = vec![SpherePoint::Infinity; 2 * n];
    for m in 0..n {
        let odd = second_meet(&circles[m], &circles[(m + 1) % n], &p).ok()?;
        if odd == p {
            return None; // tangent circles
        }
        verts[2 * m + 1] = odd;
        verts[2 * m] = random_point_on(&circles[m], &p, rng)?;
    }
    for i in 0..2 * n {
        if verts[i] == p {
            return None;
        }
        for j in 0..i {
            if verts[i] == verts[j] {
                return None;
            }
        }
    }
    let poly = CirclePolygon::new(verts);
    // Re-check the defining property and demand that the first batch
    // (the other parity) is at least well-defined.
    match poly.common_flip_point(1) {
        Ok(Some(q)) if q == p => {}
        _ => return None,
    }
    if poly.common_flip_point(0).is_err() {
        return None;
    }
    Some((poly, p))
}

/// Run bipartite circle intersection from reverse-constructed start
/// polygons and report, per trial, the first step count at which the
/// parity about to be flipped has a common flip point.
pub fn conj_circle_experiment(n: usize, trials: usize, seed: u64) -> Report {
    assert!(n >= 3);
    let max_steps = 2 * n - 6 + 4;
    let mut records = Vec::new();
    let mut kept = 0usize;
    let mut attempt = 0u64;
    while kept < trials && (attempt as usize) < trials * 20 {
        let mut rng = trial_rng(seed, attempt);
        let index = attempt as usize;
        attempt += 1;
        let mut config = None;
        for _ in 0..60 {
            if let Some(c) = circle_start_config(n, &mut rng) {
                config = Some(c);
                break;
            }
        }
        let Some((mut poly, _)) = config else {
            records.push(discarded(index, "start configuration generator degenerated"));
            continue;
        };
        let mut outcome: Option<TrialRecord> = None;
        for k in 0..=max_steps {
            let parity = k % 2;
            match poly.common_flip_point(parity) {
                Err(e) => {
                    outcome = Some(discarded(index, &format!("after {k} steps: {e}")));
                    break;
                }
                Ok(Some(_)) => {
                    outcome = Some(observed(index, k));
                    break;
                }
                Ok(None) => match poly.flip_parity(parity) {
                    Ok(next) => poly = next,
                    Err(e) => {
                        outcome = Some(discarded(index, &format!("flip {k} failed: {e}")));
                        break;
                    }
                },
            }
        }
        let rec = outcome.unwrap_or_else(|| {
            discarded(index, &format!("no common flip point within {max_steps} steps"))
        });
        if !rec.discarded {
            kept += 1;
        }
        records.push(rec);
    }
    experiment_report("circle", n, trials, seed, records)
}

// ---------------------------------------------------------------------------
// Three-dimensional pentagram analogue
// ---------------------------------------------------------------------------

use crate::devron::Singular;

/// A closed polygon of even length in `P^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacePolygon {
    verts: Vec<ProjPoint>,
}

impl SpacePolygon {
    pub fn new(verts: Vec<ProjPoint>) -> SpacePolygon {
        assert!(verts.len() >= 8 && verts.len() % 2 == 0);
        assert!(verts.iter().all(|v| v.dim() == 3));
        SpacePolygon { verts }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, i: i64) -> &ProjPoint {
        let n = self.verts.len() as i64;
        &self.verts[i.rem_euclid(n) as usize]
    }

    /// Do the even vertices span at most a plane, and likewise the odd?
    pub fn parities_coplanar(&self) -> bool {
        let evens: Vec<&ProjPoint> = self.verts.iter().step_by(2).collect();
        let odds: Vec<&ProjPoint> = self.verts.iter().skip(1).step_by(2).collect();
        rank_of_points(&evens) <= 3 && rank_of_points(&odds) <= 3
    }
}

/// One step of the space map: each vertex moves to the intersection of
/// the line through its neighbors with the plane through its second
/// neighbors and itself.
pub fn ks3d_step(p: &SpacePolygon) -> Result<SpacePolygon, Singular> {
    let mut verts = Vec::with_capacity(p.len());
    for i in 0..p.len() as i64 {
        let b = meet_line_with_span(
            p.vertex(i - 1),
            p.vertex(i + 1),
            &[p.vertex(i - 2), p.vertex(i), p.vertex(i + 2)],
        )
        .ok_or_else(|| Singular(format!("no unique line-plane intersection at vertex {i}")))?;
        verts.push(b);
    }
    Ok(SpacePolygon { verts })
}

fn random_space_point(rng: &mut Seeded) -> ProjPoint {
    loop {
        let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        if c.iter().any(|&x| x != 0) {
            return ProjPoint::from_ints(c);
        }
    }
}

fn lincomb(terms: &[(Rat, &ProjPoint)]) -> Option<ProjPoint> {
    let dim = terms[0].1.dim() + 1;
    let mut v = vec![Rat::zero(); dim];
    for (c, p) in terms {
        for (slot, x) in v.iter_mut().zip(p.coords_rat()) {
            *slot = slot.clone() + c.clone() * x;
        }
    }
    ProjPoint::try_new(v)
}

fn plane_covector(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> Option<Vec<Rat>> {
    let m = points_matrix(&[a, b, c]);
    let ns = m.nullspace();
    if ns.len() == 1 {
        ns.into_iter().next()
    } else {
        None
    }
}

fn on_plane(face: [&ProjPoint; 3], x: &ProjPoint) -> bool {
    rank_of_points(&[face[0], face[1], face[2]]) == 3
        && rank_of_points(&[face[0], face[1], face[2], x]) == 3
}

/// Build a closed `2n`-gon in `P^3` whose consecutive-triple face planes
/// pass through `p` (even-centered faces) and `q` (odd-centered faces)
/// alternately. The chain fixes one face per new vertex; the final
/// vertex is the intersection of its three remaining face constraints.
pub fn ks3d_start_config(
    n: usize,
    rng: &mut Seeded,
) -> Option<(SpacePolygon, ProjPoint, ProjPoint)> {
    let p = random_space_point(rng);
    let q = random_space_point(rng);
    if p == q {
        return None;
    }
    let m = 2 * n;
    let mut verts: Vec<ProjPoint> = vec![random_space_point(rng), random_space_point(rng)];
    if verts[0] == verts[1] {
        return None;
    }
    for i in 2..m - 1 {
        let through = if (i - 1) % 2 == 0 { &p } else { &q };
        let v = lincomb(&[
            (Rat::random_nonzero(rng), &verts[i - 2]),
            (Rat::random_nonzero(rng), &verts[i - 1]),
            (Rat::random_nonzero(rng), through),
        ])?;
        if v == verts[i - 1] || v == verts[i - 2] {
            return None;
        }
        verts.push(v);
    }
    // Last vertex: on the faces centered at 2n-2 (through p), 2n-1
    // (through q), and 0 (through p).
    let h1 = plane_covector(&verts[m - 3], &verts[m - 2], &p)?;
    let h2 = plane_covector(&verts[m - 2], &verts[0], &q)?;
    let h3 = plane_covector(&verts[0], &verts[1], &p)?;
    let rows = [h1, h2, h3];
    let sys = Mat::from_fn(3, 4, |i, j| rows[i][j].clone());
    let ns = sys.nullspace();
    if ns.len() != 1 {
        return None;
    }
    let last = ProjPoint::try_new(ns.into_iter().next().unwrap())?;
    verts.push(last);
    for i in 0..m {
        for j in 0..i {
            if verts[i] == verts[j] {
                return None;
            }
        }
    }
    let poly = SpacePolygon::new(verts);
    // Incidence re-check: every face plane contains its designated point.
    for i in 0..m as i64 {
        let through = if i.rem_euclid(2) == 0 { &p } else { &q };
        if !on_plane([poly.vertex(i - 1), poly.vertex(i), poly.vertex(i + 1)], through) {
            return None;
        }
    }
    Some((poly, p, q))
}

/// Iterate the space map from alternating-face start polygons and report
/// the first step at which both vertex parities become coplanar.
pub fn conj_ks3d_experiment(n: usize, trials: usize, seed: u64) -> Report {
    assert!(n >= 4);
    let max_steps = n - 3 + 3;
    let mut records = Vec::new();
    let mut kept = 0usize;
    let mut attempt = 0u64;
    while kept < trials && (attempt as usize) < trials * 20 {
        let mut rng = trial_rng(seed, attempt);
        let index = attempt as usize;
        attempt += 1;
        let mut config = None;
        for _ in 0..60 {
            if let Some(c) = ks3d_start_config(n, &mut rng) {
                config = Some(c);
                break;
            }
        }
        let Some((mut poly, _, _)) = config else {
            records.push(discarded(index, "start configuration generator degenerated"));
            continue;
        };
        if poly.parities_coplanar() {
            records.push(discarded(index, "start polygon already has coplanar parities"));
            continue;
        }
        let mut outcome: Option<TrialRecord> = None;
        for k in 1..=max_steps {
            match ks3d_step(&poly) {
                Ok(next) => poly = next,
                Err(e) => {
                    outcome = Some(discarded(index, &format!("step {k}: {}", e.0)));
                    break;
                }
            }
            if poly.parities_coplanar() {
                outcome = Some(observed(index, k));
                break;
            }
        }
        let rec = outcome.unwrap_or_else(|| {
            discarded(index, &format!("parities not coplanar within {max_steps} steps"))
        });
        if !rec.discarded {
            kept += 1;
        }
        records.push(rec);
    }
    experiment_report("ks3d", n, trials, seed, records)
}

// ---------------------------------------------------------------------------
// Schubert flips
// ---------------------------------------------------------------------------

/// A line in `P^3` as a point of the Klein quadric: canonicalized
/// Plücker coordinates `(p01, p02, p03, p12, p13, p23)` with
/// `omega(p, p) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLine {
    v: ProjPoint,
}

/// The polarization of the Plücker quadric `p01 p23 − p02 p13 + p03 p12`;
/// bilinear, with `omega(p, p)` equal to twice the quadric value. Two
/// lines meet exactly when it vanishes on their coordinates.
pub fn omega_vec(a: &[Rat], b: &[Rat]) -> Rat {
    a[0].clone() * b[5].clone() + a[5].clone() * b[0].clone()
        - a[1].clone() * b[4].clone() - a[4].clone() * b[1].clone()
        + a[2].clone() * b[3].clone() + a[3].clone() * b[2].clone()
}

impl SpaceLine {
    pub fn try_new(coords: Vec<Rat>) -> Option<SpaceLine> {
        assert_eq!(coords.len(), 6);
        let v = ProjPoint::try_new(coords)?;
        let c = v.coords_rat();
        if !omega_vec(&c, &c).is_zero() {
            return None;
        }
        Some(SpaceLine { v })
    }

    pub fn from_points(a: &ProjPoint, b: &ProjPoint) -> Option<SpaceLine> {
        assert_eq!(a.dim(), 3);
        assert_eq!(b.dim(), 3);
        let x = a.coords_rat();
        let y = b.coords_rat();
        let pl = |i: usize, j: usize| x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
        SpaceLine::try_new(vec![pl(0, 1), pl(0, 2), pl(0, 3), pl(1, 2), pl(1, 3), pl(2, 3)])
    }

    pub fn coords(&self) -> Vec<Rat> {
        self.v.coords_rat()
    }

    pub fn meets(&self, other: &SpaceLine) -> bool {
        omega_vec(&self.coords(), &other.coords()).is_zero()
    }
}

pub fn omega(a: &SpaceLine, b: &SpaceLine) -> Rat {
    omega_vec(&a.coords(), &b.coords())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchubertError {
    DegenerateConfiguration(String),
    /// The pencil lies on the quadric; there is no second root.
    ParabolicPencil,
}

impl fmt::Display for SchubertError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchubertError::DegenerateConfiguration(s) => {
                write!(f, "degenerate configuration: {s}")
            }
            SchubertError::ParabolicPencil => write!(f, "pencil lies on the quadric"),
        }
    }
}

/// Second intersection of the quadric with the pencil `L + t·q`, the
/// root `t = 0` being known. If `q` itself sits on the quadric it is
/// traded for `q + L`; only a pencil entirely inside the quadric fails.
pub fn pencil_second_root(l: &SpaceLine, q: &[Rat]) -> Result<SpaceLine, SchubertError> {
    let lw = l.coords();
    let mut qv = q.to_vec();
    if omega_vec(&qv, &qv).is_zero() {
        for (slot, x) in qv.iter_mut().zip(lw.iter()) {
            *slot = slot.clone() + x.clone();
        }
        if omega_vec(&qv, &qv).is_zero() {
            return Err(SchubertError::ParabolicPencil);
        }
    }
    let two = rat_int(2);
    let t = -two * omega_vec(&lw, &qv) / omega_vec(&qv, &qv);
    if t.is_zero() {
        return Ok(l.clone()); // tangent pencil: the flip fixes the line
    }
    let coords: Vec<Rat> = lw
        .iter()
        .zip(qv.iter())
        .map(|(a, b)| a.clone() + t.clone() * b.clone())
        .collect();
    SpaceLine::try_new(coords).ok_or_else(|| {
        SchubertError::DegenerateConfiguration("pencil direction is proportional to the line".into())
    })
}

/// Replace `l` by the unique other line meeting the four given lines.
/// The four incidence conditions cut a pencil through `l` out of Plücker
/// space; the result is the second quadric point of that pencil.
pub fn schubert_flip(l: &SpaceLine, nbrs: &[SpaceLine; 4]) -> Result<SpaceLine, SchubertError> {
    for nb in nbrs {
        if !l.meets(nb) {
            return Err(SchubertError::DegenerateConfiguration(
                "a neighbor does not meet the flipped line".into(),
            ));
        }
    }
    let m = Mat::from_fn(4, 6, |i, j| {
        let c = nbrs[i].coords();
        // Row j-th entry: coefficient of x_j in omega(nbr, x).
        match j {
            0 => c[5].clone(),
            1 => -c[4].clone(),
            2 => c[3].clone(),
            3 => c[2].clone(),
            4 => -c[1].clone(),
            5 => c[0].clone(),
            _ => unreachable!(),
        }
    });
    let ns = m.nullspace();
    if ns.len() != 2 {
        return Err(SchubertError::DegenerateConfiguration(
            "incidence conditions are dependent".into(),
        ));
    }
    let lw = l.coords();
    let q = ns
        .iter()
        .find(|b| {
            let m = Mat::from_fn(2, 6, |i, j| if i == 0 { lw[j].clone() } else { b[j].clone() });
            m.rank() == 2
        })
        .ok_or_else(|| {
            SchubertError::DegenerateConfiguration("pencil collapses onto the line".into())
        })?;
    pencil_second_root(l, q)
}

/// An even-length cyclic configuration of lines; the flip dynamics
/// replaces each line of one parity using its four odd-distance
/// neighbors.
pub fn schubert_flip_parity(
    lines: &[SpaceLine],
    parity: usize,
) -> Result<Vec<SpaceLine>, SchubertError> {
    let m = lines.len() as i64;
    let at = |i: i64| lines[i.rem_euclid(m) as usize].clone();
    let mut out = lines.to_vec();
    for i in 0..lines.len() {
        if i % 2 != parity % 2 {
            continue;
        }
        let i = i as i64;
        let nbrs = [at(i - 3), at(i - 1), at(i + 1), at(i + 3)];
        out[i as usize] = schubert_flip(&lines[i as usize], &nbrs)?;
    }
    Ok(out)
}

pub fn half_equal(lines: &[SpaceLine], parity: usize) -> bool {
    let picked: Vec<&SpaceLine> = lines.iter().skip(parity % 2).step_by(2).collect();
    picked.windows(2).all(|w| w[0] == w[1])
}

/// Start configuration for the flip experiment: every even-indexed line
/// is one common line, every odd-indexed line is a random line meeting
/// it. All adjacency incidences hold by construction.
pub fn schubert_start_config(n: usize, rng: &mut Seeded) -> Option<Vec<SpaceLine>> {
    let a = random_space_point(rng);
    let b = random_space_point(rng);
    let common = SpaceLine::from_points(&a, &b)?;
    let mut lines = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let foot = lincomb(&[
            (Rat::random_nonzero(rng), &a),
            (Rat::random_nonzero(rng), &b),
        ])?;
        let off = random_space_point(rng);
        let l = SpaceLine::from_points(&foot, &off)?;
        if l == common {
            return None;
        }
        lines.push(common.clone());
        lines.push(l);
    }
    for i in (1..2 * n).step_by(2) {
        for j in (1..i).step_by(2) {
            if lines[i] == lines[j] {
                return None;
            }
        }
    }
    // Incidence re-check.
    let m = lines.len() as i64;
    for i in 0..m {
        for d in [1i64, 3] {
            let j = (i + d).rem_euclid(m) as usize;
            if !lines[i as usize].meets(&lines[j]) {
                return None;
            }
        }
    }
    Some(lines)
}

/// Run bipartite Schubert flips from common-line start configurations,
/// beginning with the even (equal) half, and report the first step after
/// which one parity class is again a single line.
pub fn conj_schubert_experiment(n: usize, trials: usize, seed: u64) -> Report {
    assert!(n >= 6);
    let max_steps = 2 * n - 7 + 4;
    let mut records = Vec::new();
    let mut kept = 0usize;
    let mut attempt = 0u64;
    while kept < trials && (attempt as usize) < trials * 20 {
        let mut rng = trial_rng(seed, attempt);
        let index = attempt as usize;
        attempt += 1;
        let mut config = None;
        for _ in 0..60 {
            if let Some(c) = schubert_start_config(n, &mut rng) {
                config = Some(c);
                break;
            }
        }
        let Some(mut lines) = config else {
            records.push(discarded(index, "start configuration generator degenerated"));
            continue;
        };
        let mut outcome: Option<TrialRecord> = None;
        for k in 1..=max_steps {
            match schubert_flip_parity(&lines, (k - 1) % 2) {
                Ok(next) => lines = next,
                Err(e) => {
                    outcome = Some(discarded(index, &format!("step {k}: {e}")));
                    break;
                }
            }
            if half_equal(&lines, 0) || half_equal(&lines, 1) {
                outcome = Some(observed(index, k));
                break;
            }
        }
        let rec = outcome.unwrap_or_else(|| {
            discarded(index, &format!("no equal half within {max_steps} steps"))
        });
        if !rec.discarded {
            kept += 1;
        }
        records.push(rec);
    }
    experiment_report("schubert", n, trials, seed, records)
}

// ---------------------------------------------------------------------------
// Shared report plumbing
// ---------------------------------------------------------------------------

fn discarded(index: usize, reason: &str) -> TrialRecord {
    TrialRecord {
        trial_index: index,
        width: None,
        observed: None,
        singular_at: None,
        discarded: true,
        reason: Some(reason.to_string()),
    }
}

fn observed(index: usize, steps: usize) -> TrialRecord {
    TrialRecord {
        trial_index: index,
        width: None,
        observed: Some(steps),
        singular_at: None,
        discarded: false,
        reason: None,
    }
}

fn experiment_report(
    system: &str,
    n: usize,
    trials: usize,
    seed: u64,
    records: Vec<TrialRecord>,
) -> Report {
    let mut params = BTreeMap::new();
    params.insert("n".to_string(), n.to_string());
    params.insert("trials".to_string(), trials.to_string());
    Report::new(system, params, seed, records, "observed")
}
