//! The pentagram map on twisted polygons, its higher-dimensional
//! versions on corrugated polygons, and the one-dimensional lower map.
//!
//! A twisted n-gon is a bi-infinite vertex sequence with
//! `A_{i+n} = monodromy(A_i)`. The map sends `A` to the polygon whose
//! vertex `i` is `line(A_i, A_{i+d}) ∩ line(A_{i+1}, A_{i+d+1})`
//! (`d = 2`: intersection of consecutive shortest diagonals). The
//! axis-aligned polygons (sides concurrent in `d` points by residue)
//! and the dual axis-aligned ones (vertices on `d` concurrent lines)
//! form a Devron pair of width at most `n - 1`; this is seen by
//! transporting the polygon to a Y-system state over the lattice
//! `<(d,0),(1,n)>`-companion coordinates.

use crate::devron::{Class, Direction, DynSystem, Singular};
use crate::field::{rat_from_str, rat_to_string, Field, Rat};
use crate::lattice::{Lattice2D, PeriodicMatrix};
use crate::matrix::Mat;
use crate::proj::{
    cross_ratio, cross_ratio_points, meet_lines, rank_of_points, ExtRat, FrameCoords, ProjPoint,
};
use crate::rng::Seeded;
use crate::ysystem::YState;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PentagramError {
    #[error("degenerate intersection at vertex {0}")]
    Degenerate(i64),
    #[error("quadruple at vertex {0} is not coplanar")]
    NotCorrugated(i64),
    #[error("monodromy is not invertible")]
    BadMonodromy,
    #[error("parse: {0}")]
    Parse(String),
}

/// Vertices `A_0 .. A_{n-1}` in `P^d` plus an invertible projective
/// transformation extending them to all integer indices.
#[derive(Clone, Debug)]
pub struct TwistedPolygon {
    d: usize,
    verts: Vec<ProjPoint>,
    monodromy: Mat<Rat>,
    inverse_monodromy: Mat<Rat>,
}

impl PartialEq for TwistedPolygon {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.verts == other.verts && self.monodromy == other.monodromy
    }
}

impl TwistedPolygon {
    pub fn new(
        d: usize,
        verts: Vec<ProjPoint>,
        monodromy: Mat<Rat>,
    ) -> Result<TwistedPolygon, PentagramError> {
        assert!(verts.iter().all(|v| v.dim() == d));
        assert_eq!(monodromy.rows, d + 1);
        assert_eq!(monodromy.cols, d + 1);
        let inverse_monodromy = monodromy.inverse().ok_or(PentagramError::BadMonodromy)?;
        Ok(TwistedPolygon {
            d,
            verts,
            monodromy,
            inverse_monodromy,
        })
    }

    pub fn closed(d: usize, verts: Vec<ProjPoint>) -> TwistedPolygon {
        TwistedPolygon::new(d, verts, Mat::identity(d + 1)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn monodromy(&self) -> &Mat<Rat> {
        &self.monodromy
    }

    /// Vertex at any integer index, via monodromy powers.
    pub fn vertex(&self, i: i64) -> ProjPoint {
        let n = self.verts.len() as i64;
        let r = i.rem_euclid(n);
        let m = (i - r) / n;
        let mut coords = self.verts[r as usize].coords_rat();
        let mat = if m >= 0 {
            &self.monodromy
        } else {
            &self.inverse_monodromy
        };
        for _ in 0..m.abs() {
            coords = mat.mul_vec(&coords);
        }
        ProjPoint::new(coords)
    }

    /// Apply a projective transformation to every vertex and conjugate
    /// the monodromy accordingly.
    pub fn transformed(&self, g: &Mat<Rat>) -> Result<TwistedPolygon, PentagramError> {
        let gi = g.inverse().ok_or(PentagramError::BadMonodromy)?;
        let verts = self
            .verts
            .iter()
            .map(|v| ProjPoint::new(g.mul_vec(&v.coords_rat())))
            .collect();
        TwistedPolygon::new(self.d, verts, g.mul(&self.monodromy).mul(&gi))
    }

    /// Text form: header `d n`, one line of `d+1` fractions per vertex,
    /// then `d+1` rows of the monodromy.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.d, self.n());
        for v in &self.verts {
            let line: Vec<String> = v.coords_rat().iter().map(rat_to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        for r in 0..=self.d {
            let line: Vec<String> = (0..=self.d)
                .map(|c| rat_to_string(self.monodromy.at(r, c)))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TwistedPolygon, PentagramError> {
        let bad = |m: &str| PentagramError::Parse(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut hp = header.split_whitespace();
        let d: usize = hp
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad dimension"))?;
        let n: usize = hp
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad vertex count"))?;
        let parse_row = |line: &str| -> Result<Vec<Rat>, PentagramError> {
            let row: Option<Vec<Rat>> = line.split_whitespace().map(rat_from_str).collect();
            let row = row.ok_or_else(|| bad("bad fraction"))?;
            if row.len() != d + 1 {
                return Err(bad("wrong entry count"));
            }
            Ok(row)
        };
        let mut verts = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.next().ok_or_else(|| bad("missing vertex"))?;
            verts.push(
                ProjPoint::try_new(parse_row(line)?).ok_or_else(|| bad("zero vertex"))?,
            );
        }
        let mut rows = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            let line = lines.next().ok_or_else(|| bad("missing monodromy row"))?;
            rows.push(parse_row(line)?);
        }
        TwistedPolygon::new(d, verts, Mat::from_rows(rows))
    }
}

/// Whether every quadruple `A_i, A_{i+1}, A_{i+d}, A_{i+d+1}` is
/// coplanar (vacuous in the projective plane).
pub fn corrugated_check(p: &TwistedPolygon) -> bool {
    if p.d <= 2 {
        return true;
    }
    (0..p.n() as i64).all(|i| {
        let q = [
            p.vertex(i),
            p.vertex(i + 1),
            p.vertex(i + p.d as i64),
            p.vertex(i + p.d as i64 + 1),
        ];
        rank_of_points(&[&q[0], &q[1], &q[2], &q[3]]) <= 3
    })
}

/// One step of the (higher) pentagram map. Forward:
/// `B_i = line(A_i, A_{i+d}) ∩ line(A_{i+1}, A_{i+d+1})`. Backward:
/// `A_i = line(B_{i-d-1}, B_{i-d}) ∩ line(B_{i-1}, B_i)`, the exact
/// inverse under this indexing.
pub fn pentagram_step(
    p: &TwistedPolygon,
    dir: Direction,
) -> Result<TwistedPolygon, PentagramError> {
    let d = p.d as i64;
    if p.d > 2 && !corrugated_check(p) {
        let i = (0..p.n() as i64)
            .find(|&i| {
                let q = [
                    p.vertex(i),
                    p.vertex(i + 1),
                    p.vertex(i + d),
                    p.vertex(i + d + 1),
                ];
                rank_of_points(&[&q[0], &q[1], &q[2], &q[3]]) > 3
            })
            .unwrap();
        return Err(PentagramError::NotCorrugated(i));
    }
    let mut verts = Vec::with_capacity(p.n());
    for i in 0..p.n() as i64 {
        let v = match dir {
            Direction::Forward => meet_lines(
                &p.vertex(i),
                &p.vertex(i + d),
                &p.vertex(i + 1),
                &p.vertex(i + d + 1),
            ),
            Direction::Backward => meet_lines(
                &p.vertex(i - d - 1),
                &p.vertex(i - d),
                &p.vertex(i - 1),
                &p.vertex(i),
            ),
        };
        verts.push(v.ok_or(PentagramError::Degenerate(i))?);
    }
    TwistedPolygon::new(p.d, verts, p.monodromy.clone())
}

/// Sides `s ≡ r (mod d)` all pass through a common point `Q_r`, for
/// each residue `r`. Checked over a window of two monodromy periods.
pub fn is_axis_aligned(p: &TwistedPolygon) -> bool {
    let d = p.d as i64;
    let window = 2 * p.n() as i64 + 2 * d;
    for r in 0..d {
        let sides: Vec<(ProjPoint, ProjPoint)> = (0..)
            .map(|j| r + j * d)
            .take_while(|s| *s <= window)
            .map(|s| (p.vertex(s), p.vertex(s + 1)))
            .collect();
        if sides.len() < 2 {
            return false;
        }
        let Some(q) = meet_lines(&sides[0].0, &sides[0].1, &sides[1].0, &sides[1].1) else {
            return false;
        };
        for (a, b) in &sides {
            if rank_of_points(&[&q, a, b]) != 2 {
                return false;
            }
        }
    }
    true
}

/// Vertices `s ≡ r (mod d)` all lie on a line `L_r`, and the `d` lines
/// have a common point. Checked over a window of two monodromy periods.
pub fn is_dual_axis_aligned(p: &TwistedPolygon) -> bool {
    let d = p.d as i64;
    let window = 2 * p.n() as i64 + 2 * d;
    let mut frames: Vec<(ProjPoint, ProjPoint)> = Vec::new();
    for r in 0..d {
        let pts: Vec<ProjPoint> = (0..)
            .map(|j| r + j * d)
            .take_while(|s| *s <= window)
            .map(|s| p.vertex(s))
            .collect();
        let Some(second) = pts.iter().find(|q| **q != pts[0]) else {
            return false;
        };
        for q in &pts {
            if rank_of_points(&[&pts[0], second, q]) > 2 {
                return false;
            }
        }
        frames.push((pts[0].clone(), second.clone()));
    }
    if d >= 3 {
        let Some(x) = meet_lines(&frames[0].0, &frames[0].1, &frames[1].0, &frames[1].1) else {
            return false;
        };
        for (f0, f1) in &frames[2..] {
            if rank_of_points(&[&x, f0, f1]) > 2 {
                return false;
            }
        }
    }
    true
}

/// The array `P_{i,k}` of vertices of all computed iterates, with the
/// grid index convention `list_k[j] = P_{2j + k(d+1) + (d mod 2), k}`,
/// level 0 holding the starting polygon.
pub struct Grid {
    rows: BTreeMap<i64, TwistedPolygon>,
}

impl Grid {
    pub fn new(a: &TwistedPolygon, back: i64, fwd: i64) -> Result<Grid, PentagramError> {
        let mut rows = BTreeMap::new();
        rows.insert(0, a.clone());
        for k in 1..=fwd {
            let next = pentagram_step(&rows[&(k - 1)], Direction::Forward)?;
            rows.insert(k, next);
        }
        for k in 1..=back {
            let prev = pentagram_step(&rows[&(1 - k)], Direction::Backward)?;
            rows.insert(-k, prev);
        }
        Ok(Grid { rows })
    }

    fn dim(&self) -> i64 {
        self.rows[&0].dim() as i64
    }

    /// `P_{i,k}`; panics when `(i, k)` is off the grid parity or the
    /// level was not built.
    pub fn point(&self, i: i64, k: i64) -> ProjPoint {
        let d = self.dim();
        let offset = k * (d + 1) + d.rem_euclid(2);
        let t = i - offset;
        assert_eq!(t.rem_euclid(2), 0, "no grid point at ({i}, {k})");
        self.rows[&k].vertex(t / 2)
    }

    /// `y_{i,k} = -cross_ratio(P_{i-d,k}, P_{i-1,k+1}, P_{i+1,k+1}, P_{i+d,k})`;
    /// `None` when the four points fail to give a finite ratio.
    pub fn y(&self, i: i64, k: i64) -> Option<Rat> {
        let d = self.dim();
        match cross_ratio_points(
            &self.point(i - d, k),
            &self.point(i - 1, k + 1),
            &self.point(i + 1, k + 1),
            &self.point(i + d, k),
        )? {
            ExtRat::Finite(v) => Some(-v),
            ExtRat::Infinite => None,
        }
    }
}

/// Periodicity lattice of the coordinates of a `(d, n)` polygon.
pub fn pentagram_lattice(d: usize, n: usize) -> Lattice2D {
    Lattice2D::from_generators((d as i64, 1), (n as i64, 0)).unwrap()
}

/// Coordinates of a polygon as a Y-system state over the companion of
/// `<(d,0),(1,n)>`: `u_{i,j} = y_{(d-1)i+(d+1)j, 0}` for `i+j` even
/// and `y_{(d-1)i+(d+1)j, -1}^{-1}` for `i+j` odd, with `sigma = 1`.
pub fn u_state(a: &TwistedPolygon) -> Result<YState, PentagramError> {
    let grid = Grid::new(a, 1, 1)?;
    u_state_from_grid(a, &grid)
}

fn u_state_from_grid(a: &TwistedPolygon, grid: &Grid) -> Result<YState, PentagramError> {
    let d = a.dim() as i64;
    let companion = pentagram_lattice(a.dim(), a.n()).companion();
    let mut vals = HashMap::new();
    for (i, j) in companion.fundamental_domain() {
        let m = (d - 1) * i + (d + 1) * j;
        let v = if (i + j).rem_euclid(2) == 0 {
            grid.y(m, 0)
        } else {
            grid.y(m, -1).and_then(|y| y.inv())
        };
        vals.insert((i, j), v.ok_or(PentagramError::Degenerate(m))?);
    }
    let u = PeriodicMatrix::from_fn(companion, |i, j| vals[&(i, j)].clone());
    Ok(YState { u, sigma: 1 })
}

/// Check that the geometric y-grid of `a` follows the Y-system: the
/// state assembled by `u_state` is stepped forward `depth` times and
/// compared entry-for-entry against the cross-ratios of the iterated
/// polygons.
pub fn correspondence_check(a: &TwistedPolygon, depth: i64) -> Result<bool, String> {
    let d = a.dim() as i64;
    let grid = Grid::new(a, 1, depth + 1).map_err(|e| e.to_string())?;
    let start = u_state_from_grid(a, &grid).map_err(|e| e.to_string())?;
    let sys = crate::ysystem::YSystem::new(pentagram_lattice(a.dim(), a.n()));
    let mut cur = start;
    for k in 1..=depth {
        cur = sys
            .step_g(&cur, Direction::Forward)
            .map_err(|e| e.to_string())?;
        for ((i, j), v) in cur.parity_entries((k % 2) as u8) {
            let m = (d - 1) * i + (d + 1) * j;
            if grid.y(m, k) != Some(v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The map as a registered dynamical system: `U` the axis-aligned
/// polygons, `V` the dual axis-aligned ones.
pub struct PentagramSystem {
    pub d: usize,
    pub n: usize,
}

impl PentagramSystem {
    pub fn new(d: usize, n: usize) -> Self {
        assert!(d >= 2 && n >= 4);
        PentagramSystem { d, n }
    }

    /// Width bound for the axis-aligned pair: `n - 1`.
    pub fn width_bound(&self) -> usize {
        self.n - 1
    }
}

impl DynSystem for PentagramSystem {
    type State = TwistedPolygon;

    fn step(&self, state: &TwistedPolygon, dir: Direction) -> Result<TwistedPolygon, Singular> {
        pentagram_step(state, dir).map_err(|e| Singular(e.to_string()))
    }

    fn in_class(&self, state: &TwistedPolygon, class: Class) -> bool {
        match class {
            Class::U => is_axis_aligned(state),
            Class::V => is_dual_axis_aligned(state),
        }
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> TwistedPolygon {
        match class {
            Class::U => sample_axis_aligned(self.n, self.d, rng),
            Class::V => sample_dual_axis_aligned(self.n, self.d, rng),
        }
    }
}

fn small_nonzero(rng: &mut Seeded) -> Rat {
    Rat::random_nonzero(rng)
}

/// Axis-aligned `(d, n)` sample: the concurrency points are the first
/// `d` coordinate points, side `s` runs through `Q_{s mod d}`, and the
/// monodromy permutes the `Q_r` by `r -> r + n (mod d)`, its last
/// column solved from the closing incidence.
pub fn sample_axis_aligned(n: usize, d: usize, rng: &mut Seeded) -> TwistedPolygon {
    let nd = n as i64;
    'outer: loop {
        let a0: Vec<Rat> = (0..=d).map(|_| small_nonzero(rng)).collect();
        let mut verts = vec![ProjPoint::new(a0.clone())];
        // A_{s+1} = A_s + t * Q_{s mod d}, including the closing vertex A_n.
        let mut chain = a0.clone();
        let mut a_n = Vec::new();
        for s in 0..n {
            let axis = s % d;
            chain[axis] = chain[axis].clone() + small_nonzero(rng);
            if s + 1 < n {
                verts.push(ProjPoint::new(chain.clone()));
            } else {
                a_n = chain.clone();
            }
        }
        // Monodromy: e_r -> lambda_r e_{(r+n) mod d} for r < d; the image
        // of e_d makes phi(A_0) land exactly on A_n.
        let mut m = Mat::<Rat>::zero(d + 1, d + 1);
        let mut lambdas = Vec::with_capacity(d);
        for r in 0..d {
            let lam = small_nonzero(rng);
            *m.at_mut((r + n) % d, r) = lam.clone();
            lambdas.push(lam);
        }
        // a0[d] != 0 by construction.
        for row in 0..=d {
            let mut v = a_n[row].clone();
            for r in 0..d {
                if (r + n) % d == row {
                    v = v - lambdas[r].clone() * a0[r].clone();
                }
            }
            *m.at_mut(row, d) = v / a0[d].clone();
        }
        let Ok(p) = TwistedPolygon::new(d, verts, m) else {
            continue;
        };
        // Guard against accidental degeneracies in the draw.
        for i in 0..nd {
            let q = [p.vertex(i), p.vertex(i + 1), p.vertex(i + d as i64)];
            if q[0] == q[1] || rank_of_points(&[&q[0], &q[1], &q[2]]) < 2 {
                continue 'outer;
            }
        }
        if is_axis_aligned(&p) {
            return p;
        }
    }
}

/// Dual axis-aligned `(d, n)` sample: vertex `s` lies on the line
/// through `e_{s mod d}` and the common point `e_d`; the monodromy
/// permutes the lines compatibly. No closing condition is needed.
pub fn sample_dual_axis_aligned(n: usize, d: usize, rng: &mut Seeded) -> TwistedPolygon {
    loop {
        let verts: Vec<ProjPoint> = (0..n)
            .map(|s| {
                let mut c = vec![Rat::zero(); d + 1];
                c[s % d] = Rat::one();
                c[d] = small_nonzero(rng);
                ProjPoint::new(c)
            })
            .collect();
        let mut m = Mat::<Rat>::zero(d + 1, d + 1);
        for r in 0..d {
            *m.at_mut((r + n) % d, r) = small_nonzero(rng);
            *m.at_mut(d, r) = small_nonzero(rng);
        }
        *m.at_mut(d, d) = small_nonzero(rng);
        let Ok(p) = TwistedPolygon::new(d, verts, m) else {
            continue;
        };
        if is_dual_axis_aligned(&p) {
            return p;
        }
    }
}

/// Random corrugated `(d, n)` polygon (random twisted polygon when
/// `d = 2`): lifted vertices obey `A_{i+d+1} = a_i A_{i+d} + b_i A_{i+1}
/// + c_i A_i` with n-periodic coefficients, so the shift by `n` is a
/// single linear map — the monodromy is read off as a change of basis.
pub fn sample_corrugated(n: usize, d: usize, rng: &mut Seeded) -> TwistedPolygon {
    assert!(n > d + 1);
    let dd = d + 1;
    'outer: loop {
        let coeffs: Vec<[Rat; 3]> = (0..n)
            .map(|_| {
                [
                    small_nonzero(rng),
                    small_nonzero(rng),
                    small_nonzero(rng),
                ]
            })
            .collect();
        let mut lifted: Vec<Vec<Rat>> = (0..dd)
            .map(|_| (0..dd).map(|_| small_nonzero(rng)).collect())
            .collect();
        while lifted.len() <= n + d {
            let i = lifted.len() - d - 1;
            let [a, b, c] = &coeffs[i % n];
            let next: Vec<Rat> = (0..dd)
                .map(|t| {
                    a.clone() * lifted[i + d][t].clone()
                        + b.clone() * lifted[i + 1][t].clone()
                        + c.clone() * lifted[i][t].clone()
                })
                .collect();
            lifted.push(next);
        }
        // Monodromy maps the basis A_0..A_d to A_n..A_{n+d} exactly.
        let basis = Mat::from_fn(dd, dd, |r, c| lifted[c][r].clone());
        let shifted = Mat::from_fn(dd, dd, |r, c| lifted[n + c][r].clone());
        let Some(basis_inv) = basis.inverse() else {
            continue;
        };
        let m = shifted.mul(&basis_inv);
        let verts: Vec<ProjPoint> = match lifted[..n]
            .iter()
            .map(|v| ProjPoint::try_new(v.clone()))
            .collect()
        {
            Some(v) => v,
            None => continue,
        };
        let Ok(p) = TwistedPolygon::new(d, verts, m) else {
            continue;
        };
        // General-position guard: the step and its inverse must both be
        // defined, and neither side of the round trip may have repeated
        // neighbors.
        let Ok(q) = pentagram_step(&p, Direction::Forward) else {
            continue;
        };
        if pentagram_step(&q, Direction::Backward) != Ok(p.clone()) {
            continue;
        }
        if pentagram_step(&p, Direction::Backward).is_err() {
            continue;
        }
        for i in 0..n as i64 {
            for poly in [&p, &q] {
                if poly.vertex(i) == poly.vertex(i + 1)
                    || rank_of_points(&[&poly.vertex(i), &poly.vertex(i + 1), &poly.vertex(i + d as i64)])
                        < 3
                {
                    continue 'outer;
                }
            }
        }
        return p;
    }
}

/// Two point sequences on the projective line with a shared monodromy;
/// the state of the lower map.
#[derive(Clone, Debug)]
pub struct LinePair {
    pub a: Vec<ProjPoint>,
    pub b: Vec<ProjPoint>,
    monodromy: Mat<Rat>,
    inverse_monodromy: Mat<Rat>,
}

impl PartialEq for LinePair {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.monodromy == other.monodromy
    }
}

impl LinePair {
    pub fn new(
        a: Vec<ProjPoint>,
        b: Vec<ProjPoint>,
        monodromy: Mat<Rat>,
    ) -> Result<LinePair, PentagramError> {
        assert_eq!(a.len(), b.len());
        assert!(a.iter().chain(&b).all(|p| p.dim() == 1));
        let inverse_monodromy = monodromy.inverse().ok_or(PentagramError::BadMonodromy)?;
        Ok(LinePair {
            a,
            b,
            monodromy,
            inverse_monodromy,
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    fn extend(&self, list: &[ProjPoint], i: i64) -> ProjPoint {
        let n = list.len() as i64;
        let r = i.rem_euclid(n);
        let m = (i - r) / n;
        let mat = if m >= 0 {
            &self.monodromy
        } else {
            &self.inverse_monodromy
        };
        let mut coords = list[r as usize].coords_rat();
        for _ in 0..m.abs() {
            coords = mat.mul_vec(&coords);
        }
        ProjPoint::new(coords)
    }

    pub fn monodromy(&self) -> &Mat<Rat> {
        &self.monodromy
    }

    pub fn a_at(&self, i: i64) -> ProjPoint {
        self.extend(&self.a, i)
    }

    pub fn b_at(&self, i: i64) -> ProjPoint {
        self.extend(&self.b, i)
    }
}

fn fc(p: &ProjPoint) -> FrameCoords {
    let c = p.coords_rat();
    (c[0].clone(), c[1].clone())
}

/// Next point of the lower map: the solution `C` of
/// `[B_prev, B, A, B_next, B, C] = -1`, equivalently the image of `A`
/// under the involution fixing `B` and swapping `B_prev` with `B_next`.
fn lower_point(
    b_prev: &ProjPoint,
    b: &ProjPoint,
    a: &ProjPoint,
    b_next: &ProjPoint,
) -> Option<ProjPoint> {
    let f = crate::proj::six_bracket_solve_last(
        &[fc(b_prev), fc(b), fc(a), fc(b_next), fc(b)],
        &-Rat::one(),
    )?;
    ProjPoint::try_new(vec![f.0, f.1])
}

/// One step of the lower map: `(A, B) -> (B, C)` forward; backward
/// recovers `A` from `C` by the same construction (the defining
/// relation is an involution in the `A`/`C` pair).
pub fn lower_step(p: &LinePair, dir: Direction) -> Result<LinePair, PentagramError> {
    let n = p.n() as i64;
    let mut out = Vec::with_capacity(p.n());
    for i in 0..n {
        let v = match dir {
            Direction::Forward => lower_point(&p.b_at(i - 1), &p.b_at(i), &p.a_at(i), &p.b_at(i + 1)),
            Direction::Backward => lower_point(&p.a_at(i - 1), &p.a_at(i), &p.b_at(i), &p.a_at(i + 1)),
        };
        out.push(v.ok_or(PentagramError::Degenerate(i))?);
    }
    match dir {
        Direction::Forward => LinePair::new(p.b.clone(), out, p.monodromy.clone()),
        Direction::Backward => LinePair::new(out, p.a.clone(), p.monodromy.clone()),
    }
}

/// The lower map as a dynamical system: `U` the pairs with constant
/// first sequence, `V` those with constant second sequence. Width at
/// most `n`.
pub struct LowerSystem {
    pub n: usize,
}

impl LowerSystem {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        LowerSystem { n }
    }

    pub fn width_bound(&self) -> usize {
        self.n
    }
}

fn constant_list(p: &LinePair, list: &[ProjPoint]) -> bool {
    // Constant for every integer index: equal on one period and fixed
    // by the monodromy.
    list.iter().all(|q| *q == list[0])
        && ProjPoint::new(p.monodromy.mul_vec(&list[0].coords_rat())) == list[0]
}

impl DynSystem for LowerSystem {
    type State = LinePair;

    fn step(&self, state: &LinePair, dir: Direction) -> Result<LinePair, Singular> {
        lower_step(state, dir).map_err(|e| Singular(e.to_string()))
    }

    fn in_class(&self, state: &LinePair, class: Class) -> bool {
        match class {
            Class::U => constant_list(state, &state.a),
            Class::V => constant_list(state, &state.b),
        }
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> LinePair {
        let pair = sample_constant_pair(self.n, rng);
        match class {
            Class::U => pair,
            Class::V => LinePair::new(pair.b, pair.a, pair.monodromy).unwrap(),
        }
    }
}

/// Pair with constant `A` (a fixed point of a random triangularizable
/// monodromy) and random `B`.
pub fn sample_constant_pair(n: usize, rng: &mut Seeded) -> LinePair {
    loop {
        let h = Mat::from_fn(2, 2, |_, _| {
            crate::field::rat_int(rng.gen_range(-9..=9i64))
        });
        let Some(hi) = h.inverse() else { continue };
        let mut tri = Mat::<Rat>::zero(2, 2);
        *tri.at_mut(0, 0) = small_nonzero(rng);
        *tri.at_mut(0, 1) = crate::field::rat_int(rng.gen_range(-9..=9i64));
        *tri.at_mut(1, 1) = small_nonzero(rng);
        let m = h.mul(&tri).mul(&hi);
        let p = ProjPoint::new(h.mul_vec(&ProjPoint::basis(0, 1).coords_rat()));
        let a = vec![p.clone(); n];
        let b: Vec<ProjPoint> = (0..n)
            .map(|_| ProjPoint::new(vec![small_nonzero(rng), Rat::one()]))
            .collect();
        // B must avoid the constant point and repeats next to each other.
        if b.iter().any(|q| *q == p) {
            continue;
        }
        if (0..n).any(|i| b[i] == b[(i + 1) % n]) {
            continue;
        }
        let Ok(pair) = LinePair::new(a, b, m) else {
            continue;
        };
        return pair;
    }
}

/// Periodicity lattice of the lower map's coordinates.
pub fn lower_lattice(n: usize) -> Lattice2D {
    Lattice2D::from_generators((1, 1), (n as i64, 0)).unwrap()
}

/// Grid of iterates of the lower map: row `k` holds the points of the
/// `k`-th polygon in the chain, with `P_{2j+1,k} = row_k[j]`; the
/// starting pair supplies rows -1 and 0.
pub struct LowerGrid {
    rows: BTreeMap<i64, Vec<ProjPoint>>,
    template: LinePair,
}

impl LowerGrid {
    pub fn new(p: &LinePair, back: i64, fwd: i64) -> Result<LowerGrid, PentagramError> {
        let mut rows = BTreeMap::new();
        rows.insert(-1, p.a.clone());
        rows.insert(0, p.b.clone());
        let mut cur = p.clone();
        for k in 1..=fwd {
            cur = lower_step(&cur, Direction::Forward)?;
            rows.insert(k, cur.b.clone());
        }
        let mut cur = p.clone();
        for k in 1..=back {
            cur = lower_step(&cur, Direction::Backward)?;
            rows.insert(-1 - k, cur.a.clone());
        }
        Ok(LowerGrid {
            rows,
            template: p.clone(),
        })
    }

    pub fn point(&self, i: i64, k: i64) -> ProjPoint {
        assert_eq!(i.rem_euclid(2), 1, "lower grid points sit at odd i");
        let pair = LinePair {
            a: self.rows[&k].clone(),
            b: self.rows[&k].clone(),
            monodromy: self.template.monodromy.clone(),
            inverse_monodromy: self.template.inverse_monodromy.clone(),
        };
        pair.a_at((i - 1) / 2)
    }

    /// `y_{i,k} = -cross_ratio(P_{i-1,k}, P_{i-1,k+1}, P_{i+1,k+1}, P_{i+1,k})`
    /// for `i` even.
    pub fn y(&self, i: i64, k: i64) -> Option<Rat> {
        let v = cross_ratio(
            &fc(&self.point(i - 1, k)),
            &fc(&self.point(i - 1, k + 1)),
            &fc(&self.point(i + 1, k + 1)),
            &fc(&self.point(i + 1, k)),
        )?;
        Some(-v)
    }
}

/// Coordinates of a line pair as a Y-system state over the companion
/// of `<(1,0),(1,n)>`: `u_{i,j} = y_{2j,0}` for `i+j` even and
/// `y_{2j,-1}^{-1}` otherwise, `sigma = 1`.
pub fn lower_u_state(p: &LinePair) -> Result<YState, PentagramError> {
    let grid = LowerGrid::new(p, 1, 1)?;
    lower_u_state_from_grid(p, &grid)
}

fn lower_u_state_from_grid(p: &LinePair, grid: &LowerGrid) -> Result<YState, PentagramError> {
    let companion = lower_lattice(p.n()).companion();
    let mut vals = HashMap::new();
    for (i, j) in companion.fundamental_domain() {
        let v = if (i + j).rem_euclid(2) == 0 {
            grid.y(2 * j, 0)
        } else {
            grid.y(2 * j, -1).and_then(|y| y.inv())
        };
        vals.insert((i, j), v.ok_or(PentagramError::Degenerate(2 * j))?);
    }
    let u = PeriodicMatrix::from_fn(companion, |i, j| vals[&(i, j)].clone());
    Ok(YState { u, sigma: 1 })
}

/// Y-system correspondence for the lower map, same contract as
/// `correspondence_check`.
pub fn lower_correspondence_check(p: &LinePair, depth: i64) -> Result<bool, String> {
    let grid = LowerGrid::new(p, 1, depth + 1).map_err(|e| e.to_string())?;
    let start = lower_u_state_from_grid(p, &grid).map_err(|e| e.to_string())?;
    let sys = crate::ysystem::YSystem::new(lower_lattice(p.n()));
    let mut cur = start;
    for k in 1..=depth {
        cur = sys
            .step_g(&cur, Direction::Forward)
            .map_err(|e| e.to_string())?;
        for ((_, j), v) in cur.parity_entries((k % 2) as u8) {
            if grid.y(2 * j, k) != Some(v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devron::{iterate, verify_pair, PairConfig};
    use crate::field::rat_int;
    use crate::rng::seeded;
    use crate::ysystem::rho;

    #[test]
    fn unit_square_collapses_in_one_step() {
        let square = TwistedPolygon::closed(
            2,
            vec![
                ProjPoint::from_ints(vec![0, 0, 1]),
                ProjPoint::from_ints(vec![1, 0, 1]),
                ProjPoint::from_ints(vec![1, 1, 1]),
                ProjPoint::from_ints(vec![0, 1, 1]),
            ],
        );
        let image = pentagram_step(&square, Direction::Forward).unwrap();
        let center = ProjPoint::from_ints(vec![1, 1, 2]);
        for i in 0..4 {
            assert_eq!(image.vertex(i), center);
        }
        // And the collapsed polygon cannot be stepped again.
        assert!(pentagram_step(&image, Direction::Forward).is_err());
    }

    #[test]
    fn step_round_trips() {
        let mut rng = seeded(101);
        for (d, n) in [(2, 6), (3, 6), (4, 7)] {
            for _ in 0..3 {
                let p = sample_corrugated(n, d, &mut rng);
                let q = pentagram_step(&p, Direction::Forward).unwrap();
                assert_eq!(pentagram_step(&q, Direction::Backward).unwrap(), p);
                if d > 2 {
                    assert!(corrugated_check(&q));
                }
            }
        }
    }

    #[test]
    fn monodromy_equivariance() {
        let mut rng = seeded(103);
        let p = sample_corrugated(5, 2, &mut rng);
        let g = Mat::from_rows(vec![
            vec![rat_int(1), rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(1), rat_int(3)],
            vec![rat_int(1), rat_int(0), rat_int(1)],
        ]);
        let moved = p.transformed(&g).unwrap();
        let step_then_move = pentagram_step(&p, Direction::Forward)
            .unwrap()
            .transformed(&g)
            .unwrap();
        let move_then_step = pentagram_step(&moved, Direction::Forward).unwrap();
        assert_eq!(step_then_move, move_then_step);
    }

    #[test]
    fn axis_aligned_samples() {
        let mut rng = seeded(107);
        for (d, n) in [(2, 4), (2, 5), (3, 6), (4, 7)] {
            let p = sample_axis_aligned(n, d, &mut rng);
            assert!(is_axis_aligned(&p));
            assert!(corrugated_check(&p));
            // All y_{i,-1} equal -1, so the u-state sits in the U class.
            let s = u_state(&p).unwrap();
            assert!(s.view_all_minus_one(1), "d={d} n={n}");
            assert_eq!(rho(&s), Rat::one());
        }
    }

    #[test]
    fn axis_aligned_monodromy_parity() {
        let mut rng = seeded(109);
        // n even: the concurrency points are fixed by the monodromy.
        let even = sample_axis_aligned(6, 2, &mut rng);
        for r in 0..2 {
            let e = ProjPoint::basis(r, 2);
            let img = ProjPoint::new(even.monodromy().mul_vec(&e.coords_rat()));
            assert_eq!(img, e);
        }
        // n odd: they are swapped, so the polygon is never closed.
        let odd = sample_axis_aligned(5, 2, &mut rng);
        let img = ProjPoint::new(odd.monodromy().mul_vec(&ProjPoint::basis(0, 2).coords_rat()));
        assert_eq!(img, ProjPoint::basis(1, 2));
    }

    #[test]
    fn dual_axis_aligned_samples() {
        let mut rng = seeded(113);
        for (d, n) in [(2, 5), (3, 7)] {
            let p = sample_dual_axis_aligned(n, d, &mut rng);
            assert!(is_dual_axis_aligned(&p));
            assert!(!is_axis_aligned(&p));
            // All y_{i,0} equal -1: the V class of the Y-system.
            let s = u_state(&p).unwrap();
            assert!(s.view_all_minus_one(0), "d={d} n={n}");
        }
    }

    #[test]
    fn u_product_is_one() {
        let mut rng = seeded(127);
        for (d, n) in [(2, 5), (3, 6), (4, 7)] {
            for _ in 0..3 {
                let p = sample_corrugated(n, d, &mut rng);
                let s = u_state(&p).unwrap();
                assert_eq!(rho(&s), Rat::one(), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn y_system_correspondence() {
        let mut rng = seeded(131);
        let p = sample_corrugated(5, 2, &mut rng);
        assert_eq!(correspondence_check(&p, 3), Ok(true));
        let q = sample_corrugated(6, 3, &mut rng);
        assert_eq!(correspondence_check(&q, 3), Ok(true));
    }

    #[test]
    fn width_bounded_by_n_minus_one() {
        let sys = PentagramSystem::new(2, 5);
        let cfg = PairConfig::new(sys.width_bound(), false);
        let rep = verify_pair(&sys, cfg, 3, 211);
        assert!(rep.pass(), "{:?}", rep.records());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = seeded(137);
        let p = sample_corrugated(6, 3, &mut rng);
        let text = p.to_text();
        assert_eq!(TwistedPolygon::from_text(&text).unwrap(), p);
    }

    #[test]
    fn lower_round_trip_and_bracket() {
        let mut rng = seeded(139);
        let sys = LowerSystem::new(4);
        for _ in 0..5 {
            // Random non-class pair: two random sequences.
            let u = sys.sample(Class::U, &mut rng);
            let b2: Vec<ProjPoint> = (0..4)
                .map(|_| ProjPoint::new(vec![small_nonzero(&mut rng), Rat::one()]))
                .collect();
            let Ok(p) = LinePair::new(b2, u.b.clone(), u.monodromy.clone()) else {
                continue;
            };
            let Ok(q) = lower_step(&p, Direction::Forward) else {
                continue;
            };
            // The defining bracket holds at the solved points.
            for i in 0..4 {
                let br = crate::proj::six_bracket(&[
                    fc(&p.b_at(i - 1)),
                    fc(&p.b_at(i)),
                    fc(&p.a_at(i)),
                    fc(&p.b_at(i + 1)),
                    fc(&p.b_at(i)),
                    fc(&q.b_at(i)),
                ]);
                assert_eq!(br, Some(-Rat::one()));
                // The defining relation is an involution in A and C.
                let swapped = crate::proj::six_bracket(&[
                    fc(&p.b_at(i - 1)),
                    fc(&p.b_at(i)),
                    fc(&q.b_at(i)),
                    fc(&p.b_at(i + 1)),
                    fc(&p.b_at(i)),
                    fc(&p.a_at(i)),
                ]);
                assert_eq!(swapped, Some(-Rat::one()));
            }
            assert_eq!(lower_step(&q, Direction::Backward).unwrap(), p);
        }
    }

    #[test]
    fn lower_u_sample_is_backward_singular() {
        let sys = LowerSystem::new(4);
        let mut rng = seeded(149);
        let u = sys.sample(Class::U, &mut rng);
        assert!(sys.in_class(&u, Class::U));
        let traj = iterate(&sys, &u, 2, Direction::Backward);
        assert_eq!(traj.singular.map(|(s, _)| s), Some(1));
    }

    #[test]
    fn lower_width_bounded_by_n() {
        let sys = LowerSystem::new(4);
        let cfg = PairConfig::new(sys.width_bound(), false);
        let rep = verify_pair(&sys, cfg, 3, 151);
        assert!(rep.pass(), "{:?}", rep.records());
    }

    #[test]
    fn lower_correspondence() {
        let sys = LowerSystem::new(5);
        let mut rng = seeded(157);
        let mut checked = 0;
        for _ in 0..10 {
            // A generic pair away from both classes; collision-heavy
            // draws are skipped.
            let u = sys.sample(Class::U, &mut rng);
            let a2: Vec<ProjPoint> = (0..5)
                .map(|_| ProjPoint::new(vec![small_nonzero(&mut rng), Rat::one()]))
                .collect();
            let p = LinePair::new(a2, u.b.clone(), u.monodromy.clone()).unwrap();
            match lower_correspondence_check(&p, 3) {
                Ok(ok) => {
                    assert!(ok);
                    checked += 1;
                }
                Err(_) => continue,
            }
        }
        assert!(checked >= 3);
    }
}
