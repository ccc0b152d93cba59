//! Finite-index sublattices of Z^2 and lattice-periodic matrices.
//!
//! A lattice is stored in a canonical basis `(a, 0), (k, n)` with
//! `a, n > 0` and `0 <= k < a`, which makes equality and membership
//! cheap. On top of that sit lattice-periodic infinite matrices, the
//! vanishing theorem for their consecutive `(M+1) x (M+1)` minors, and
//! the explicit 0/1 witness whose consecutive `M x M` minors can be
//! made nonzero.

use crate::field::{rat_int, Field, Rat};
use crate::matrix::Mat;
use num_integer::Integer;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("generators are linearly dependent")]
    DegenerateLattice,
    #[error("cannot parse lattice from {0:?}; expected \"a,b;c,d\"")]
    Parse(String),
}

/// Horizontal or vertical axis of Z^2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A finite-index sublattice of Z^2 in canonical form: generated by
/// `(a, 0)` and `(k, n)` with `a` the minimal horizontal period, `n`
/// the minimal positive second coordinate, and `0 <= k < a`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Lattice2D {
    a: i64,
    k: i64,
    n: i64,
}

impl Lattice2D {
    /// Canonicalize the span of two independent integer vectors.
    pub fn from_generators(v1: (i64, i64), v2: (i64, i64)) -> Result<Lattice2D, LatticeError> {
        let det = v1.0 * v2.1 - v1.1 * v2.0;
        if det == 0 {
            return Err(LatticeError::DegenerateLattice);
        }
        // Minimal positive second coordinate: gcd of the generators'
        // second coordinates, achieved by a Bezout combination.
        let eg = v1.1.extended_gcd(&v2.1);
        let n = eg.gcd;
        debug_assert!(n >= 0);
        let (k_raw, a) = if n == 0 {
            unreachable!("independent generators cannot both be horizontal-only")
        } else {
            let k_raw = eg.x * v1.0 + eg.y * v2.0;
            // Kernel of the second-coordinate map gives the horizontal
            // sublattice; its generator has first coordinate det / n.
            let h = (v2.1 / n) * v1.0 - (v1.1 / n) * v2.0;
            (k_raw, h.abs())
        };
        Ok(Lattice2D {
            a,
            k: k_raw.rem_euclid(a),
            n,
        })
    }

    pub fn from_canonical(a: i64, k: i64, n: i64) -> Lattice2D {
        assert!(a > 0 && n > 0 && (0..a).contains(&k));
        Lattice2D { a, k, n }
    }

    /// Parse the CLI syntax `"a,b;c,d"` as generators `(a,b), (c,d)`.
    pub fn parse(s: &str) -> Result<Lattice2D, LatticeError> {
        let bad = || LatticeError::Parse(s.to_string());
        let mut nums = Vec::new();
        for part in s.split(';') {
            for x in part.split(',') {
                nums.push(x.trim().parse::<i64>().map_err(|_| bad())?);
            }
        }
        if nums.len() != 4 {
            return Err(bad());
        }
        Lattice2D::from_generators((nums[0], nums[1]), (nums[2], nums[3]))
    }

    pub fn horizontal_period(&self) -> i64 {
        self.a
    }

    pub fn shear(&self) -> i64 {
        self.k
    }

    pub fn vertical_step(&self) -> i64 {
        self.n
    }

    /// Index of the lattice in Z^2.
    pub fn det(&self) -> i64 {
        self.a * self.n
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        j % self.n == 0 && (i - (j / self.n) * self.k) % self.a == 0
    }

    /// Image under `(i, j) -> (i + j, -i + j)`; its index doubles.
    pub fn companion(&self) -> Lattice2D {
        let g1 = (self.a, -self.a);
        let g2 = (self.k + self.n, -self.k + self.n);
        Lattice2D::from_generators(g1, g2).expect("companion of a lattice is a lattice")
    }

    /// Scaled lattice `{c * v : v in self}`.
    pub fn scaled(&self, c: i64) -> Lattice2D {
        assert!(c > 0);
        Lattice2D::from_generators((c * self.a, 0), (c * self.k, c * self.n)).unwrap()
    }

    /// Swap the two coordinates.
    pub fn transpose(&self) -> Lattice2D {
        Lattice2D::from_generators((0, self.a), (self.n, self.k))
            .expect("transpose of a lattice is a lattice")
    }

    /// Smallest `M > 0` with `(M, 0)` or `(0, M)` in the lattice, and
    /// which axis attains it (ties go to horizontal).
    pub fn minimal_axis_period(&self) -> (i64, Axis) {
        let mh = self.a;
        let mv = self.n * self.a / self.a.gcd(&self.k);
        if mh <= mv {
            (mh, Axis::Horizontal)
        } else {
            (mv, Axis::Vertical)
        }
    }

    /// Ordered coset representatives `(i, j)`, `1 <= i <= a`,
    /// `1 <= j <= n`.
    pub fn fundamental_domain(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.det() as usize);
        for j in 1..=self.n {
            for i in 1..=self.a {
                out.push((i, j));
            }
        }
        out
    }

    /// The fundamental-domain representative of the coset of `(i, j)`.
    pub fn coset_rep(&self, i: i64, j: i64) -> (i64, i64) {
        let j0 = (j - 1).rem_euclid(self.n) + 1;
        let t = (j - j0) / self.n;
        let i0 = (i - t * self.k - 1).rem_euclid(self.a) + 1;
        (i0, j0)
    }

    /// Position of `coset_rep(i, j)` within `fundamental_domain()`.
    pub fn coset_index(&self, i: i64, j: i64) -> usize {
        let (i0, j0) = self.coset_rep(i, j);
        ((j0 - 1) * self.a + (i0 - 1)) as usize
    }
}

impl fmt::Display for Lattice2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<({},0),({},{})>", self.a, self.k, self.n)
    }
}

/// An infinite lattice-periodic matrix, stored by its values on the
/// fundamental domain.
#[derive(Clone, PartialEq, Debug)]
pub struct PeriodicMatrix<K> {
    lattice: Lattice2D,
    values: Vec<K>,
}

impl<K: Field> PeriodicMatrix<K> {
    pub fn from_fn(lattice: Lattice2D, mut f: impl FnMut(i64, i64) -> K) -> Self {
        let values = lattice.fundamental_domain().iter().map(|&(i, j)| f(i, j)).collect();
        PeriodicMatrix { lattice, values }
    }

    pub fn lattice(&self) -> Lattice2D {
        self.lattice
    }

    pub fn get(&self, i: i64, j: i64) -> &K {
        &self.values[self.lattice.coset_index(i, j)]
    }

    pub fn set(&mut self, i: i64, j: i64, v: K) {
        let idx = self.lattice.coset_index(i, j);
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[K] {
        &self.values
    }

    pub fn map<L: Field>(&self, f: impl Fn(&K) -> L) -> PeriodicMatrix<L> {
        PeriodicMatrix {
            lattice: self.lattice,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Finite window with rows `r0 .. r0+rows` and columns
    /// `c0 .. c0+cols`.
    pub fn window(&self, r0: i64, c0: i64, rows: usize, cols: usize) -> Mat<K> {
        Mat::from_fn(rows, cols, |r, c| {
            self.get(r0 + r as i64, c0 + c as i64).clone()
        })
    }
}

/// True iff every consecutive `(M+1) x (M+1)` minor vanishes, `M` the
/// minimal axis period. Holds for every lattice-periodic matrix.
pub fn vanishing_minor_check<K: Field>(x: &PeriodicMatrix<K>) -> bool {
    let lat = x.lattice();
    let (m, _) = lat.minimal_axis_period();
    let size = (m + 1) as usize;
    // Windows whose top-left corners differ by a lattice vector give
    // equal minors, so one corner per coset suffices.
    for r in 1..=lat.horizontal_period() {
        for c in 1..=lat.vertical_step() {
            if !x.window(r, c, size, size).det().is_zero() {
                return false;
            }
        }
    }
    true
}

/// Multiplier `r` with `r * k = gcd(k, M) (mod M)` and `gcd(r, M) = 1`,
/// returned in `1 ..= M`.
pub fn multiplier(k: i64, m: i64) -> i64 {
    assert!(m >= 1);
    let eg = k.extended_gcd(&m);
    let d = eg.gcd.abs().max(1); // gcd(0, m) = m; guard k = m = 0 impossible here
    let r0 = if eg.gcd >= 0 { eg.x } else { -eg.x };
    let q = m / d;
    // Split M = M1 * M2 with M2 carrying every prime of M dividing M/d.
    let mut m1 = m;
    loop {
        let g = m1.gcd(&q);
        if g == 1 {
            break;
        }
        m1 /= g;
    }
    // r0 is already coprime to M/d; shift it by a multiple of M/d to
    // also make it 1 mod M1.
    let a = if m1 == 1 {
        0
    } else {
        let inv_q = q.extended_gcd(&m1).x.rem_euclid(m1);
        ((1 - r0).rem_euclid(m1) * inv_q).rem_euclid(m1)
    };
    (r0 + a * q - 1).rem_euclid(m) + 1
}

/// The melody/harmony 0/1 score for parameters `m, d, n` with `d | m`
/// and `n >= d`: the positions of its ones within the `m x m` window,
/// built from `d` verses of length `m/d` and `n` measures.
fn score_positions(m: i64, d: i64, n: i64) -> Vec<(i64, i64)> {
    assert!(d >= 1 && m % d == 0 && n >= d);
    let by_residue = |modulus: i64| -> Vec<i64> {
        let mut out = Vec::with_capacity(m as usize);
        for r in 1..=modulus.min(m) {
            let mut x = r;
            while x <= m {
                out.push(x);
                x += modulus;
            }
        }
        out
    };
    let is: Vec<i64> = by_residue(d);
    let js: Vec<i64> = by_residue(n);
    let verse = |t: i64| (t - 1) / (m / d); // 0-based verse of time t
    let residue = |j: i64| (j - 1).rem_euclid(n); // measure label of column j
    let mut ones: Vec<(i64, i64)> = is.iter().copied().zip(js.iter().copied()).collect();
    for t in 1..=m {
        let (it, jt) = ones[(t - 1) as usize];
        // Bounds of the measure containing t.
        let mut start = t;
        while start > 1 && residue(js[(start - 2) as usize]) == residue(jt) {
            start -= 1;
        }
        let mut end = t;
        while end < m && residue(js[end as usize]) == residue(jt) {
            end += 1;
        }
        if verse(start) == verse(end) {
            continue; // measure confined to one verse: no harmony
        }
        if verse(t) == verse(start) {
            ones.push((it + 1, jt));
        } else {
            ones.push((it - 1, jt));
        }
    }
    ones
}

/// Witness matrix data: a lattice-periodic 0/1 matrix whose `M x M`
/// leading block has determinant plus or minus one.
pub struct Witness {
    lattice: Lattice2D,
    /// Lattice the score was built for (shear replaced by `gcd(k, M)`).
    score_lattice: Lattice2D,
    one_cosets: HashSet<usize>,
    r: i64,
    m: i64,
    transposed: bool,
}

impl Witness {
    pub fn entry(&self, i: i64, j: i64) -> bool {
        let (i, j) = if self.transposed { (j, i) } else { (i, j) };
        self.one_cosets.contains(&self.score_lattice.coset_index(self.r * i, j))
    }

    pub fn axis_period(&self) -> i64 {
        self.m
    }

    /// The `M x M` block on rows and columns `1 ..= M`.
    pub fn block(&self) -> Mat<Rat> {
        Mat::from_fn(self.m as usize, self.m as usize, |r, c| {
            if self.entry(r as i64 + 1, c as i64 + 1) {
                rat_int(1)
            } else {
                rat_int(0)
            }
        })
    }

    pub fn periodic_matrix(&self) -> PeriodicMatrix<Rat> {
        PeriodicMatrix::from_fn(self.lattice, |i, j| {
            if self.entry(i, j) {
                rat_int(1)
            } else {
                rat_int(0)
            }
        })
    }
}

/// Build the 0/1 witness for a lattice: melody/harmony score for the
/// lattice with shear `d = gcd(k, M)`, then rows pulled back through
/// the multiplier permutation. Lattices whose minimal axis period is
/// vertical are handled by transposing.
pub fn build_witness(lattice: Lattice2D) -> Witness {
    let (m, axis) = lattice.minimal_axis_period();
    let (work, transposed) = match axis {
        Axis::Horizontal => (lattice, false),
        Axis::Vertical => (lattice.transpose(), true),
    };
    debug_assert_eq!(work.minimal_axis_period(), (m, Axis::Horizontal));
    let k = work.shear();
    let n = work.vertical_step();
    let d = if k == 0 { m } else { k.gcd(&m) };
    let score_lattice = Lattice2D::from_canonical(m, d % m, n);
    let one_cosets = score_positions(m, d, n)
        .into_iter()
        .map(|(i, j)| score_lattice.coset_index(i, j))
        .collect();
    Witness {
        lattice,
        score_lattice,
        one_cosets,
        r: multiplier(k, m),
        m,
        transposed,
    }
}

/// The bare `m x m` melody/harmony block for explicit parameters with
/// `d | m` (no multiplier permutation applied).
pub fn score_block(m: i64, d: i64, n: i64) -> Mat<Rat> {
    let ones: HashSet<(i64, i64)> = score_positions(m, d, n).into_iter().collect();
    Mat::from_fn(m as usize, m as usize, |r, c| {
        if ones.contains(&(r as i64 + 1, c as i64 + 1)) {
            rat_int(1)
        } else {
            rat_int(0)
        }
    })
}

/// Random lattice-periodic matrix with small nonzero rational entries.
pub fn random_periodic<R: rand::Rng>(lattice: Lattice2D, rng: &mut R) -> PeriodicMatrix<Rat> {
    PeriodicMatrix::from_fn(lattice, |_, _| Rat::random_nonzero(rng))
}
