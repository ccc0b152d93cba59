//! The lattice-periodic Y-system map as a dynamical system.
//!
//! State: an infinite matrix `u` of rationals periodic under the
//! companion of a lattice, plus a bit `sigma`. One forward step
//! multiplies each entry on parity `sigma` by
//! `(1 + u_S)(1 + u_N) / ((1 + u_W^{-1})(1 + u_E^{-1}))` and replaces
//! each entry on the other parity by its reciprocal. The product `rho`
//! of the distinct entries is conserved; on the hypersurface `rho = 1`
//! the all-(-1) checkerboard halves form a Devron pair of width at
//! most `n - 1`, `n` the lattice determinant. The width certificates
//! come from an F-polynomial table whose entries double as
//! determinants of "lifted" matrices.

use crate::devron::{Class, Direction, DynSystem, Singular};
use crate::field::{Field, Rat};
use crate::lattice::{Lattice2D, PeriodicMatrix};
use crate::matrix::Mat;
use crate::rng::Seeded;
use num_traits::{One, Zero};
use thiserror::Error;

/// `(u, sigma)`: `u` is companion-periodic; entries with
/// `i + j = sigma (mod 2)` are multiplied on the next forward step,
/// the others inverted.
#[derive(Clone, PartialEq, Debug)]
pub struct YState {
    pub u: PeriodicMatrix<Rat>,
    pub sigma: u8,
}

impl YState {
    /// All fundamental-domain entries on one checkerboard parity.
    pub fn parity_entries(&self, parity: u8) -> Vec<((i64, i64), Rat)> {
        self.u
            .lattice()
            .fundamental_domain()
            .into_iter()
            .filter(|(i, j)| (i + j).rem_euclid(2) == parity as i64)
            .map(|(i, j)| ((i, j), self.u.get(i, j).clone()))
            .collect()
    }

    /// Whether every entry on the given parity equals -1.
    pub fn view_all_minus_one(&self, parity: u8) -> bool {
        let m1 = -Rat::one();
        self.parity_entries(parity).iter().all(|(_, v)| *v == m1)
    }

    /// Relabel parities (shift the plane by `(1, 0)`) so that
    /// `sigma = 1`; determinant formulas for the F-polynomials are
    /// stated in that normalization. Pure bookkeeping: translation
    /// commutes with the dynamics.
    pub fn normalize_sigma(&self) -> YState {
        if self.sigma == 1 {
            return self.clone();
        }
        let u = PeriodicMatrix::from_fn(self.u.lattice(), |i, j| self.u.get(i - 1, j).clone());
        YState { u, sigma: 1 }
    }
}

/// Product of the `2 det(lattice)` distinct entries; conserved by the
/// map in both directions.
pub fn rho(state: &YState) -> Rat {
    state
        .u
        .lattice()
        .fundamental_domain()
        .into_iter()
        .map(|(i, j)| state.u.get(i, j).clone())
        .product()
}

/// Why a step is undefined: the parity being inverted holds a `-1`
/// (a genuine singularity of the rational map) or a `0` (no
/// reciprocal).
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum YStepError {
    #[error("entries equal to -1 on the inverting parity at {0:?}")]
    Singular(Vec<(i64, i64)>),
    #[error("zero entries on the inverting parity at {0:?}")]
    ZeroInversion(Vec<(i64, i64)>),
}

/// The Y-system over one lattice.
pub struct YSystem {
    lattice: Lattice2D,
    companion: Lattice2D,
}

impl YSystem {
    pub fn new(lattice: Lattice2D) -> Self {
        YSystem {
            lattice,
            companion: lattice.companion(),
        }
    }

    pub fn lattice(&self) -> Lattice2D {
        self.lattice
    }

    pub fn companion(&self) -> Lattice2D {
        self.companion
    }

    /// Upper bound for the width of the all-(-1) pair: `n - 1`.
    pub fn width_bound(&self) -> usize {
        (self.lattice.det() - 1) as usize
    }

    /// One step of the map. Forward inverts parity `1 - sigma` and
    /// mutates parity `sigma`; backward is the exact inverse (inverts
    /// parity `sigma`, with the roles of horizontal and vertical
    /// neighbors swapped in the mutation).
    pub fn step_g(&self, state: &YState, dir: Direction) -> Result<YState, YStepError> {
        let inv_parity = match dir {
            Direction::Forward => 1 - state.sigma,
            Direction::Backward => state.sigma,
        } as i64;
        let m1 = -Rat::one();
        let mut at_minus_one = Vec::new();
        let mut at_zero = Vec::new();
        for (i, j) in self.companion.fundamental_domain() {
            if (i + j).rem_euclid(2) == inv_parity {
                let v = state.u.get(i, j);
                if *v == m1 {
                    at_minus_one.push((i, j));
                } else if v.is_zero() {
                    at_zero.push((i, j));
                }
            }
        }
        if !at_minus_one.is_empty() {
            return Err(YStepError::Singular(at_minus_one));
        }
        if !at_zero.is_empty() {
            return Err(YStepError::ZeroInversion(at_zero));
        }
        let one_plus = |i: i64, j: i64| Rat::one() + state.u.get(i, j).clone();
        // 1 + u^{-1}; the entry is on the inverting parity, so it is
        // nonzero and not -1, making this nonzero.
        let one_plus_inv = |i: i64, j: i64| Rat::one() + state.u.get(i, j).inv().unwrap();
        let u = PeriodicMatrix::from_fn(self.companion, |i, j| {
            if (i + j).rem_euclid(2) == inv_parity {
                state.u.get(i, j).inv().unwrap()
            } else {
                let ratio = match dir {
                    Direction::Forward => (one_plus(i, j - 1) * one_plus(i, j + 1))
                        .div_exact(&(one_plus_inv(i - 1, j) * one_plus_inv(i + 1, j))),
                    Direction::Backward => (one_plus(i - 1, j) * one_plus(i + 1, j))
                        .div_exact(&(one_plus_inv(i, j - 1) * one_plus_inv(i, j + 1))),
                };
                state.u.get(i, j).clone() * ratio.unwrap()
            }
        });
        Ok(YState {
            u,
            sigma: 1 - state.sigma,
        })
    }

    /// Random element of the `rho = 1` part of the all-(-1) class `U`:
    /// `sigma = 1`, the odd-parity entries all -1, the even-parity
    /// entries random nonzero with their product forced to `(-1)^n`
    /// (last entry solved rather than rejection-sampled, so membership
    /// is exact).
    pub fn sample_u_bar(&self, rng: &mut Seeded) -> YState {
        let n = self.lattice.det();
        let m1 = -Rat::one();
        let target = if n % 2 == 0 { Rat::one() } else { m1.clone() };
        let evens: Vec<(i64, i64)> = self
            .companion
            .fundamental_domain()
            .into_iter()
            .filter(|(i, j)| (i + j).rem_euclid(2) == 0)
            .collect();
        loop {
            let mut u = PeriodicMatrix::from_fn(self.companion, |_, _| m1.clone());
            let mut prod = Rat::one();
            for &(i, j) in &evens[..evens.len() - 1] {
                let v = random_admissible(rng);
                prod *= v.clone();
                u.set(i, j, v);
            }
            let last = target.clone().div_exact(&prod).unwrap();
            // A forced -1 would land the sample in V as well; redraw.
            if last == m1 && n > 1 {
                continue;
            }
            let &(i, j) = evens.last().unwrap();
            u.set(i, j, last);
            return YState { u, sigma: 1 };
        }
    }

    /// `U`-class state with unconstrained even-parity entries, so
    /// generically `rho != 1` (off the invariant hypersurface).
    pub fn sample_off_surface(&self, rng: &mut Seeded) -> YState {
        let m1 = -Rat::one();
        let u = PeriodicMatrix::from_fn(self.companion, |i, j| {
            if (i + j).rem_euclid(2) == 1 {
                m1.clone()
            } else {
                random_admissible(rng)
            }
        });
        YState { u, sigma: 1 }
    }
}

/// Random nonzero rational that is not -1 (so it neither blocks an
/// inversion nor sits on the singular locus).
pub fn random_admissible(rng: &mut Seeded) -> Rat {
    loop {
        let v = Rat::random_nonzero(rng);
        if v != -Rat::one() {
            return v;
        }
    }
}

impl DynSystem for YSystem {
    type State = YState;

    fn step(&self, state: &YState, dir: Direction) -> Result<YState, Singular> {
        self.step_g(state, dir).map_err(|e| Singular(e.to_string()))
    }

    fn in_class(&self, state: &YState, class: Class) -> bool {
        let parity = match class {
            Class::U => state.sigma,
            Class::V => 1 - state.sigma,
        };
        state.view_all_minus_one(parity)
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> YState {
        let s = self.sample_u_bar(rng);
        match class {
            Class::U => s,
            // Same construction relabeled: with sigma = 0 the all-(-1)
            // parity is the one the forward map is about to invert.
            Class::V => YState { u: s.u, sigma: 0 },
        }
    }
}

/// A zero divisor was hit while solving for the starred entry at this
/// (0-based) position.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("lift fill hit a zero divisor solving entry ({0}, {1})")]
pub struct LiftUndefined(pub usize, pub usize);

/// `-(bc)/(ad)` for the 2x2 block of `m` with top-left (0-based)
/// corner `(r, c)`; `None` if the diagonal product vanishes.
pub fn negated_double_ratio(m: &Mat<Rat>, r: usize, c: usize) -> Option<Rat> {
    let num = m.at(r, c + 1).clone() * m.at(r + 1, c).clone();
    (-num).div_exact(&(m.at(r, c).clone() * m.at(r + 1, c + 1).clone()))
}

/// The unique `(k+1) x (k+1)` matrix with 1's on the diagonal and
/// subdiagonal whose consecutive negated double ratios reproduce the
/// `k x k` input. Each remaining entry is solved from one ratio
/// equation, upper triangle by increasing diagonal offset then lower.
pub fn lift(b: &Mat<Rat>) -> Result<Mat<Rat>, LiftUndefined> {
    assert_eq!(b.rows, b.cols);
    let m = b.rows;
    let mut star = Mat::<Rat>::zero(m + 1, m + 1);
    for i in 0..=m {
        *star.at_mut(i, i) = Rat::one();
        if i > 0 {
            *star.at_mut(i, i - 1) = Rat::one();
        }
    }
    let solve = |num: Rat, den: &Rat| num.div_exact(den);
    for d in 1..=m {
        for i in 0..=(m - d) {
            let j = i + d;
            let num = -(b.at(i, j - 1).clone() * star.at(i, j - 1).clone() * star.at(i + 1, j).clone());
            *star.at_mut(i, j) =
                solve(num, star.at(i + 1, j - 1)).ok_or(LiftUndefined(i, j))?;
        }
    }
    for e in 2..=m {
        for j in 0..=(m - e) {
            let i = j + e;
            let num =
                -(b.at(i - 1, j).clone() * star.at(i - 1, j).clone() * star.at(i, j + 1).clone());
            *star.at_mut(i, j) =
                solve(num, star.at(i - 1, j + 1)).ok_or(LiftUndefined(i, j))?;
        }
    }
    Ok(star)
}

/// Scaled-determinant identity: for any matrix `c` whose consecutive
/// negated double ratios give some `b`, `det(c)` equals the diagonal
/// product of `c` times `det(lift(b))`. This computes the right-hand
/// side; `None` if a ratio or the lift is undefined.
pub fn scaled_lift_det(c: &Mat<Rat>) -> Option<Rat> {
    assert_eq!(c.rows, c.cols);
    assert!(c.rows >= 1);
    let m = c.rows - 1;
    let mut b = Mat::<Rat>::zero(m, m);
    for r in 0..m {
        for col in 0..m {
            *b.at_mut(r, col) = negated_double_ratio(c, r, col)?;
        }
    }
    let diag: Rat = (0..=m).map(|i| c.at(i, i).clone()).product();
    Some(diag * lift(&b).ok()?.det())
}

/// F-polynomial value via the determinant formula: on a state whose
/// odd-parity entries are all -1 (`sigma = 1` normalization),
/// `F_{i,j,k}` is the determinant of the lift of the consecutive
/// `k x k` submatrix of the even view whose `(r, c)` entry (0-based)
/// is `u_{i-k+1+r+c, j+c-r}`.
pub fn f_via_lift(u: &PeriodicMatrix<Rat>, i: i64, j: i64, k: i64) -> Result<Rat, LiftUndefined> {
    assert!(k >= 0);
    let p = Mat::from_fn(k as usize, k as usize, |r, c| {
        u.get(i - k + 1 + r as i64 + c as i64, j + c as i64 - r as i64)
            .clone()
    });
    Ok(lift(&p)?.det())
}

/// Table of the monomials `M_{i,j,k}` and polynomials `F_{i,j,k}`
/// evaluated at one state, for `k` from -1 up to a requested level.
/// `F_{i,j,-1} = F_{i,j,0} = 1` and
/// `F_{i,j,k+1} = (F_{i-1,j,k} F_{i+1,j,k} + M_{i,j,k} F_{i,j-1,k} F_{i,j+1,k}) / F_{i,j,k-1}`.
/// If a division by zero interrupts the recurrence the table is
/// truncated (not an error: the first vanishing layer is the signal
/// width arguments look for). The values follow the `sigma = 1`
/// normalization: `F_{i,j,k}` exists only for `i + j + k` odd.
pub struct FTable {
    lattice: Lattice2D,
    u: PeriodicMatrix<Rat>,
    /// `layers[k + 1][coset]`, populated on the level's parity only;
    /// F is companion-periodic because u is.
    layers: Vec<Vec<Option<Rat>>>,
    /// First level whose layer could not be completed.
    pub truncated_at: Option<i64>,
}

impl FTable {
    pub fn new(u: &PeriodicMatrix<Rat>, levels: i64) -> FTable {
        let lattice = u.lattice();
        let base = |k: i64| {
            lattice
                .fundamental_domain()
                .into_iter()
                .map(|(i, j)| ((i + j + k).rem_euclid(2) == 1).then(Rat::one))
                .collect()
        };
        let mut table = FTable {
            lattice,
            u: u.clone(),
            layers: vec![base(-1), base(0)],
            truncated_at: None,
        };
        'levels: for k in 0..levels {
            let mut layer = Vec::new();
            for (i, j) in lattice.fundamental_domain() {
                if (i + j + k + 1).rem_euclid(2) != 1 {
                    layer.push(None);
                    continue;
                }
                let num = table.f(i - 1, j, k).unwrap() * table.f(i + 1, j, k).unwrap()
                    + table.m(i, j, k)
                        * table.f(i, j - 1, k).unwrap()
                        * table.f(i, j + 1, k).unwrap();
                match num.div_exact(&table.f(i, j, k - 1).unwrap()) {
                    Some(v) => layer.push(Some(v)),
                    None => {
                        table.truncated_at = Some(k + 1);
                        break 'levels;
                    }
                }
            }
            table.layers.push(layer);
        }
        table
    }

    /// Highest fully computed level.
    pub fn levels(&self) -> i64 {
        self.layers.len() as i64 - 2
    }

    /// `F_{i,j,k}`; `None` beyond the truncation point. Panics if
    /// `i + j + k` is even (no F-value lives there).
    pub fn f(&self, i: i64, j: i64, k: i64) -> Option<Rat> {
        assert!(k >= -1);
        assert_eq!((i + j + k).rem_euclid(2), 1, "no F at parity of ({i},{j},{k})");
        let layer = self.layers.get((k + 1) as usize)?;
        layer[self.lattice.coset_index(i, j)].clone()
    }

    /// `M_{i,j,k}`: the product of `u_{i+l,j}` for `l` in `[-k, k]`.
    pub fn m(&self, i: i64, j: i64, k: i64) -> Rat {
        (-k..=k).map(|l| self.u.get(i + l, j).clone()).product()
    }

    /// `Y_{i,j,k} = M_{i,j,k} F_{i,j-1,k} F_{i,j+1,k} / (F_{i-1,j,k} F_{i+1,j,k})`
    /// for `i + j + k` even.
    pub fn y(&self, i: i64, j: i64, k: i64) -> Option<Rat> {
        let num = self.m(i, j, k) * self.f(i, j - 1, k)? * self.f(i, j + 1, k)?;
        num.div_exact(&(self.f(i - 1, j, k)? * self.f(i + 1, j, k)?))
    }
}
