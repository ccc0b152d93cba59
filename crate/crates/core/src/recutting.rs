//! Polygon recutting: cut a triangle off along a shortest diagonal and
//! glue it back with reversed orientation, moving one vertex. The
//! vertices live in the plane modeled as the Gaussian rationals, where
//! recutting at vertex `i` with incoming side `w` and outgoing side `z`
//! replaces them by `z' = z̄(w+z)/(w̄+z̄)` and `w' = w̄(w+z)/(w̄+z̄)` —
//! a rational formula for the reflection of the vertex across the
//! perpendicular bisector of the diagonal.
//!
//! The bipartite dynamics on 2n-gons (recut all odd vertices, then all
//! even ones, alternating) has a Devron pair: the polygons whose
//! about-to-be-recut vertices all coincide, and the mirror class. Its
//! width is exactly `n - 1` on generic members.

use crate::devron::{Class, Direction, DynSystem, Singular};
use crate::field::{GaussRat, Rat};
use crate::rng::Seeded;
use num_traits::Zero;
use rand::Rng;

/// Cyclically ordered tuple of plane points.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarPolygon {
    pub vertices: Vec<GaussRat>,
}

impl PlanarPolygon {
    pub fn new(vertices: Vec<GaussRat>) -> Self {
        assert!(vertices.len() >= 3);
        PlanarPolygon { vertices }
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Vertex by 1-based cyclic index.
    pub fn vertex(&self, i: i64) -> &GaussRat {
        let n = self.n() as i64;
        &self.vertices[(i - 1).rem_euclid(n) as usize]
    }

    /// Squared lengths of the n sides `A_1A_2, ..., A_nA_1`.
    pub fn squared_side_lengths(&self) -> Vec<Rat> {
        (1..=self.n() as i64)
            .map(|i| (self.vertex(i + 1).clone() - self.vertex(i).clone()).norm())
            .collect()
    }
}

/// Whether the n side lengths `d(A_1,A_2), ..., d(A_n,A_{n+1})` of an
/// (n+1)-gon are nonzero and pairwise distinct (squared lengths are
/// compared; equivalent for nonnegative reals).
pub fn is_jittery(a: &PlanarPolygon) -> bool {
    let mut seen: Vec<Rat> = Vec::new();
    for i in 1..a.n() as i64 {
        let d = (a.vertex(i + 1).clone() - a.vertex(i).clone()).norm();
        if d.is_zero() || seen.contains(&d) {
            return false;
        }
        seen.push(d);
    }
    true
}

/// Recut at vertex `i` (1-based). Defined when the neighbors of vertex
/// `i` are distinct; only vertex `i` moves.
pub fn recut(p: &PlanarPolygon, i: i64) -> Result<PlanarPolygon, Singular> {
    let prev = p.vertex(i - 1).clone();
    let cur = p.vertex(i).clone();
    let next = p.vertex(i + 1).clone();
    let w = cur.clone() - prev.clone();
    let z = next.clone() - cur;
    let diag = w + z.clone();
    if diag.is_zero() {
        return Err(Singular(format!("recut at vertex {i}: neighbors coincide")));
    }
    let z2 = z.conj() * diag.clone() / diag.conj();
    let mut out = p.clone();
    let n = p.n() as i64;
    out.vertices[(i - 1).rem_euclid(n) as usize] = prev + z2;
    Ok(out)
}

/// Recut every vertex of the given parity of the 1-based index; the
/// individual recuts commute so the order is immaterial.
pub fn recut_parity(p: &PlanarPolygon, parity: u8) -> Result<PlanarPolygon, Singular> {
    assert_eq!(p.n() % 2, 0);
    let mut bad = Vec::new();
    let mut out = p.clone();
    let mut i = if parity % 2 == 1 { 1 } else { 2 };
    while i <= p.n() as i64 {
        match recut(&out, i) {
            Ok(q) => out = q,
            Err(_) => bad.push(i),
        }
        i += 2;
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(Singular(format!("recut batch singular at vertices {bad:?}")))
    }
}

/// A 2n-gon plus the parity about to be recut.
#[derive(Clone, Debug, PartialEq)]
pub struct RecutState {
    pub polygon: PlanarPolygon,
    pub sigma: u8,
}

fn parity_vertices_equal(p: &PlanarPolygon, parity: u8) -> bool {
    // 1-based vertices of the given parity all coincide.
    let first = if parity % 2 == 1 { 1 } else { 2 };
    let probe = p.vertex(first);
    (first..=p.n() as i64)
        .step_by(2)
        .all(|i| p.vertex(i) == probe)
}

/// `sigma = 0` recuts the even 1-based vertices, `sigma = 1` the odd
/// ones; each step flips `sigma`.
pub struct RecutSystem {
    pub n: usize,
}

impl RecutSystem {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        RecutSystem { n }
    }

    pub fn expected_width(&self) -> usize {
        self.n - 1
    }
}

fn batch_parity(sigma: u8) -> u8 {
    // sigma = 0 recuts even vertices, sigma = 1 odd ones; recut_parity
    // already uses that encoding.
    sigma % 2
}

impl DynSystem for RecutSystem {
    type State = RecutState;

    fn step(&self, state: &RecutState, dir: Direction) -> Result<RecutState, Singular> {
        match dir {
            Direction::Forward => Ok(RecutState {
                polygon: recut_parity(&state.polygon, batch_parity(state.sigma))?,
                sigma: 1 - state.sigma,
            }),
            // The previous state had the opposite sigma and its batch is
            // an involution.
            Direction::Backward => Ok(RecutState {
                polygon: recut_parity(&state.polygon, batch_parity(1 - state.sigma))?,
                sigma: 1 - state.sigma,
            }),
        }
    }

    fn in_class(&self, state: &RecutState, class: Class) -> bool {
        // The parity whose vertices must coincide: for U it is the
        // parity about to be recut... rather, U pairs W_0 with sigma 0
        // and W_1 with sigma 1; V swaps the tags.
        let w0 = parity_vertices_equal(&state.polygon, 0);
        let w1 = parity_vertices_equal(&state.polygon, 1);
        match class {
            Class::U => (w0 && state.sigma == 0) || (w1 && state.sigma == 1),
            Class::V => (w0 && state.sigma == 1) || (w1 && state.sigma == 0),
        }
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> RecutState {
        match class {
            Class::U => {
                let a = random_jittery(self.n + 1, rng);
                RecutState {
                    polygon: phi(&a).polygon,
                    sigma: 1,
                }
            }
            Class::V => {
                // W_0 with sigma 1: even vertices equal, odd ones random.
                let anchor = random_point(rng);
                let vertices = (1..=2 * self.n as i64)
                    .map(|i| {
                        if i % 2 == 0 {
                            anchor.clone()
                        } else {
                            random_point(rng)
                        }
                    })
                    .collect();
                RecutState {
                    polygon: PlanarPolygon::new(vertices),
                    sigma: 1,
                }
            }
        }
    }
}

pub fn random_point(rng: &mut Seeded) -> GaussRat {
    GaussRat::from_ints(rng.gen_range(-30..=30i64), rng.gen_range(-30..=30i64))
}

pub fn random_polygon(n: usize, rng: &mut Seeded) -> PlanarPolygon {
    loop {
        let p = PlanarPolygon::new((0..n).map(|_| random_point(rng)).collect());
        // Avoid coincident neighbors-of-neighbors so single recuts are
        // defined everywhere.
        if (1..=n as i64).all(|i| p.vertex(i - 1) != p.vertex(i + 1)) {
            return p;
        }
    }
}

pub fn random_jittery(n: usize, rng: &mut Seeded) -> PlanarPolygon {
    loop {
        let p = PlanarPolygon::new((0..n).map(|_| random_point(rng)).collect());
        if is_jittery(&p) {
            return p;
        }
    }
}

/// The grid of vertices of the iterates of `G = s_n ∘ ... ∘ s_2` on an
/// (n+1)-gon, which is periodic because `G` acts as an (n+1)-cycle.
pub struct JitteryGrid {
    iterates: Vec<PlanarPolygon>,
}

impl JitteryGrid {
    /// Requires a jittery (n+1)-gon so every `s_i` in every `G^k` is
    /// defined.
    pub fn new(a: &PlanarPolygon) -> JitteryGrid {
        assert!(is_jittery(a));
        let n = a.n() - 1;
        let mut iterates = vec![a.clone()];
        for _ in 1..n {
            let mut cur = iterates.last().unwrap().clone();
            for i in 2..=n as i64 {
                cur = recut(&cur, i).expect("jittery polygons recut cleanly");
            }
            iterates.push(cur);
        }
        JitteryGrid { iterates }
    }

    fn period(&self) -> i64 {
        self.iterates[0].n() as i64 - 1
    }

    /// `C_{i,j} = ` vertex `i` of `G^{(j-i)/2}` for `i + j` even,
    /// `1 <= i <= n+1`.
    pub fn c(&self, i: i64, j: i64) -> GaussRat {
        assert_eq!((i + j).rem_euclid(2), 0);
        assert!(1 <= i && i <= self.period() + 1);
        let k = ((j - i) / 2).rem_euclid(self.period());
        self.iterates[k as usize].vertex(i).clone()
    }
}

/// The 2n-gon `B` with `B_j = C_{1,j} = A_1` for `j` odd and
/// `B_j = C_{2,j}` for `j` even, lying in `W_1`; together with the grid
/// it is built from.
pub fn phi(a: &PlanarPolygon) -> RecutState {
    let grid = JitteryGrid::new(a);
    let n = grid.period();
    let vertices = (1..=2 * n)
        .map(|j| {
            if j % 2 == 1 {
                grid.c(1, j)
            } else {
                grid.c(2, j)
            }
        })
        .collect();
    RecutState {
        polygon: PlanarPolygon::new(vertices),
        sigma: 1,
    }
}

/// Grid access alongside `phi`, for callers that need both.
pub fn phi_with_grid(a: &PlanarPolygon) -> (RecutState, JitteryGrid) {
    let state = phi(a);
    (state, JitteryGrid::new(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devron::{iterate, verify_pair, PairConfig};
    use crate::field::rat;
    use crate::rng::seeded;
    use num_traits::One;

    fn pt(re: i64, im: i64) -> GaussRat {
        GaussRat::from_ints(re, im)
    }

    /// Reflection of `x` across the perpendicular bisector of `pq`,
    /// which is rational in the coordinates.
    fn bisector_reflection(p: &GaussRat, q: &GaussRat, x: &GaussRat) -> GaussRat {
        let half = GaussRat::new(rat(1, 2), Rat::zero());
        let mid = (p.clone() + q.clone()) * half;
        let dir = GaussRat::new(Rat::zero(), Rat::one()) * (q.clone() - p.clone());
        mid.clone() + dir.clone() * ((x.clone() - mid) / dir).conj()
    }

    #[test]
    fn recut_fixture() {
        let p = PlanarPolygon::new(vec![pt(0, 0), pt(0, 1), pt(2, 0)]);
        let q = recut(&p, 2).unwrap();
        assert_eq!(q.vertices, vec![pt(0, 0), pt(2, 1), pt(2, 0)]);
    }

    #[test]
    fn recut_matches_reflection_oracle() {
        let mut rng = seeded(31);
        for _ in 0..50 {
            let p = random_polygon(5, &mut rng);
            for i in 1..=5 {
                let q = recut(&p, i).unwrap();
                let r = bisector_reflection(p.vertex(i - 1), p.vertex(i + 1), p.vertex(i));
                assert_eq!(*q.vertex(i), r);
            }
        }
    }

    #[test]
    fn recut_is_an_involution() {
        let mut rng = seeded(37);
        for _ in 0..100 {
            let p = random_polygon(6, &mut rng);
            let i = rng.gen_range(1..=6i64);
            assert_eq!(recut(&recut(&p, i).unwrap(), i).unwrap(), p);
        }
    }

    #[test]
    fn recut_swaps_adjacent_side_lengths() {
        let mut rng = seeded(41);
        for _ in 0..50 {
            let p = random_polygon(6, &mut rng);
            let i = rng.gen_range(1..=6i64);
            let q = recut(&p, i).unwrap();
            let mut before = p.squared_side_lengths();
            let after = q.squared_side_lengths();
            // 1-based side t joins vertices t and t+1.
            let s0 = (i - 2).rem_euclid(6) as usize;
            let s1 = (i - 1).rem_euclid(6) as usize;
            before.swap(s0, s1);
            assert_eq!(before, after);
        }
    }

    #[test]
    fn distant_recuts_commute_and_neighbors_braid() {
        let mut rng = seeded(43);
        for _ in 0..100 {
            let p = random_polygon(7, &mut rng);
            let ab = recut(&recut(&p, 1).unwrap(), 4).unwrap();
            let ba = recut(&recut(&p, 4).unwrap(), 1).unwrap();
            assert_eq!(ab, ba);
            let lhs = recut(&recut(&recut(&p, 2).unwrap(), 3).unwrap(), 2).unwrap();
            let rhs = recut(&recut(&recut(&p, 3).unwrap(), 2).unwrap(), 3).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn batch_order_is_immaterial() {
        let mut rng = seeded(47);
        for _ in 0..20 {
            let p = random_polygon(8, &mut rng);
            let forward = recut_parity(&p, 1).unwrap();
            let mut reversed = p.clone();
            for i in [7i64, 5, 3, 1] {
                reversed = recut(&reversed, i).unwrap();
            }
            assert_eq!(forward, reversed);
        }
    }

    #[test]
    fn rotation_equivariance() {
        // Unit Gaussian rational rotation (3+4i)/5 plus a translation.
        let u = GaussRat::new(rat(3, 5), rat(4, 5));
        assert_eq!(u.norm(), Rat::one());
        let t = pt(7, -2);
        let mut rng = seeded(53);
        for _ in 0..20 {
            let p = random_polygon(5, &mut rng);
            let moved = PlanarPolygon::new(
                p.vertices
                    .iter()
                    .map(|v| u.clone() * v.clone() + t.clone())
                    .collect(),
            );
            let i = rng.gen_range(1..=5i64);
            let lhs = recut(&moved, i).unwrap();
            let rhs = PlanarPolygon::new(
                recut(&p, i)
                    .unwrap()
                    .vertices
                    .iter()
                    .map(|v| u.clone() * v.clone() + t.clone())
                    .collect(),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn triangle_consistency() {
        // Recutting at B in ABD gives ACD iff recutting at A in BAC
        // gives BDC; both are equivalent to ABCD being an isosceles
        // trapezoid with BC parallel to AD.
        let mut rng = seeded(59);
        let check = |a: &GaussRat, b: &GaussRat, c: &GaussRat, d: &GaussRat| {
            let abd = PlanarPolygon::new(vec![a.clone(), b.clone(), d.clone()]);
            let lhs = recut(&abd, 2).map(|q| q.vertices[1] == *c).unwrap_or(false);
            let bac = PlanarPolygon::new(vec![b.clone(), a.clone(), c.clone()]);
            let rhs = recut(&bac, 2).map(|q| q.vertices[1] == *d).unwrap_or(false);
            assert_eq!(lhs, rhs);
            lhs
        };
        for _ in 0..50 {
            let pts: Vec<GaussRat> = (0..4).map(|_| random_point(&mut rng)).collect();
            check(&pts[0], &pts[1], &pts[2], &pts[3]);
        }
        // A genuine isosceles trapezoid must come out true.
        let hit = check(&pt(0, 0), &pt(1, 2), &pt(4, 2), &pt(5, 0));
        assert!(hit);
    }

    #[test]
    fn g_has_order_n() {
        let mut rng = seeded(61);
        for n in 3..=6usize {
            let a = random_jittery(n + 1, &mut rng);
            let mut cur = a.clone();
            for _ in 0..n {
                for i in 2..=n as i64 {
                    cur = recut(&cur, i).unwrap();
                }
            }
            assert_eq!(cur, a);
        }
    }

    #[test]
    fn phi_lands_in_w1_with_periodic_grid() {
        let mut rng = seeded(67);
        let n = 5i64;
        let a = random_jittery(6, &mut rng);
        let (state, grid) = phi_with_grid(&a);
        assert_eq!(state.polygon.n() as i64, 2 * n);
        for j in (1..=2 * n).step_by(2) {
            assert_eq!(state.polygon.vertex(j), a.vertex(1));
        }
        for i in 1..=n + 1 {
            for j in (i - 6..i + 6).filter(|j| (i + j) % 2 == 0) {
                assert_eq!(grid.c(i, j + 2 * n), grid.c(i, j));
            }
        }
    }

    #[test]
    fn grid_diamonds_are_isosceles_trapezoids() {
        let mut rng = seeded(71);
        let a = random_jittery(6, &mut rng);
        let grid = JitteryGrid::new(&a);
        let cross = |p: &GaussRat, q: &GaussRat| {
            // Signed area form Im(p̄ q); zero exactly for parallel vectors.
            (p.conj() * q.clone() - q.conj() * p.clone()).im
        };
        for i in 2..=4i64 {
            for j in (i + 1..i + 9).step_by(2) {
                let p1 = grid.c(i - 1, j);
                let p2 = grid.c(i + 1, j);
                let x = grid.c(i, j - 1);
                let x2 = grid.c(i, j + 1);
                assert!(cross(
                    &(p2.clone() - p1.clone()),
                    &(x2.clone() - x.clone())
                )
                .is_zero());
                assert_eq!((x2.clone() - p1.clone()).norm(), (p2.clone() - x.clone()).norm());
                assert_eq!((x2 - p2).norm(), (p1 - x).norm());
            }
        }
    }

    #[test]
    fn forward_orbit_recovers_the_seed() {
        let sys = RecutSystem::new(5);
        let mut rng = seeded(73);
        let a = random_jittery(6, &mut rng);
        let state = phi(&a);
        let mut cur = state;
        for i in 2..=6i64 {
            // A_i is the i-th vertex of F^{i-2}(B, 1).
            assert_eq!(cur.polygon.vertex(i), a.vertex(i));
            if i < 6 {
                cur = sys.step(&cur, Direction::Forward).unwrap();
            }
        }
    }

    #[test]
    fn side_multiset_is_conserved_by_batches() {
        let sys = RecutSystem::new(4);
        let mut rng = seeded(79);
        let state = sys.sample(Class::U, &mut rng);
        let sorted = |p: &PlanarPolygon| {
            let mut v = p.squared_side_lengths();
            v.sort();
            v
        };
        let start = sorted(&state.polygon);
        let mut cur = state;
        for _ in 0..3 {
            cur = sys.step(&cur, Direction::Forward).unwrap();
            assert_eq!(sorted(&cur.polygon), start);
        }
    }

    #[test]
    fn u_sample_is_backward_singular_and_v_forward_singular() {
        let sys = RecutSystem::new(4);
        let mut rng = seeded(83);
        let u = sys.sample(Class::U, &mut rng);
        assert!(sys.in_class(&u, Class::U));
        let back = iterate(&sys, &u, 1, Direction::Backward);
        assert_eq!(back.singular.map(|(s, _)| s), Some(1));
        let v = sys.sample(Class::V, &mut rng);
        assert!(sys.in_class(&v, Class::V));
        let fwd = iterate(&sys, &v, 1, Direction::Forward);
        assert_eq!(fwd.singular.map(|(s, _)| s), Some(1));
    }

    #[test]
    fn width_is_exactly_n_minus_one() {
        for n in [3usize, 5] {
            let sys = RecutSystem::new(n);
            let cfg = PairConfig::new(sys.expected_width(), true);
            let rep = verify_pair(&sys, cfg, 5, 300 + n as u64);
            assert!(rep.pass(), "n={n}: {:?}", rep.records());
        }
    }

    #[test]
    fn duplicate_side_lengths_are_not_jittery() {
        let p = PlanarPolygon::new(vec![pt(0, 0), pt(1, 0), pt(2, 0), pt(5, 0)]);
        assert!(!is_jittery(&p));
        let q = PlanarPolygon::new(vec![pt(0, 0), pt(0, 0), pt(2, 0), pt(5, 0)]);
        assert!(!is_jittery(&q));
    }
}
