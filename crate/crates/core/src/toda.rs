//! A bipartite variant of the generalized discrete Toda system on
//! 2 x 2n matrices. The elementary move `mu` pushes two adjacent
//! columns past each other; `s_j` applies it to columns j, j+1 (mod
//! 2n), and one step of the dynamics applies all `s_j` of one parity.
//! The matrices whose about-to-merge column pairs are exact negatives
//! form a Devron pair of width `n - 1`. Polygon recutting embeds into
//! the complex instantiation by encoding each edge vector together
//! with its conjugate as a column.

use crate::devron::{Class, Direction, DynSystem, Singular};
use crate::field::{Field, GaussRat};
use crate::recutting::PlanarPolygon;
use crate::rng::Seeded;

pub type Block<K> = [[K; 2]; 2];

fn column_quotient<K: Field>(a: &K, b: &K) -> Option<K> {
    a.clone().div_exact(b)
}

/// `mu` of a 2x2 block `[[x1, y1], [x2, y2]]`: the columns swap places
/// and pick up factors `(x2+y2)/(x1+y1)` on the top row and its
/// reciprocal on the bottom.
pub fn mu<K: Field>(b: &Block<K>) -> Result<Block<K>, Singular> {
    let [[x1, y1], [x2, y2]] = b;
    let top = x1.clone() + y1.clone();
    let bot = x2.clone() + y2.clone();
    let q = column_quotient(&bot, &top)
        .ok_or_else(|| Singular("column sum vanishes in the top row".into()))?;
    let qi = column_quotient(&top, &bot)
        .ok_or_else(|| Singular("column sum vanishes in the bottom row".into()))?;
    Ok([
        [y1.clone() * q.clone(), x1.clone() * q],
        [y2.clone() * qi.clone(), x2.clone() * qi],
    ])
}

/// `nu` of a block, the auxiliary move with differences `x2 - y1` and
/// `x1 - y2` in the denominators.
pub fn nu<K: Field>(b: &Block<K>) -> Result<Block<K>, Singular> {
    let [[x1, y1], [x2, y2]] = b;
    let d1 = x2.clone() - y1.clone();
    let d2 = x1.clone() - y2.clone();
    let q = column_quotient(&d2, &d1)
        .ok_or_else(|| Singular("antidiagonal difference vanishes".into()))?;
    let qi = column_quotient(&d1, &d2)
        .ok_or_else(|| Singular("diagonal difference vanishes".into()))?;
    Ok([
        [-(y1.clone() * q.clone()), -(x1.clone() * qi.clone())],
        [-(y2.clone() * qi), -(x2.clone() * q)],
    ])
}

/// The mu-form and nu-form of the same update agree: if
/// `mu([[x, y]]) = [[y', x']]` then `nu([[x, y']]) = [[-y, -x']]`.
pub fn consistency_check<K: Field>(b: &Block<K>) -> Result<bool, Singular> {
    let [[x1, y1], [x2, y2]] = b;
    let [[y1p, x1p], [y2p, x2p]] = mu(b)?;
    let lhs = nu(&[
        [x1.clone(), y1p.clone()],
        [x2.clone(), y2p.clone()],
    ])?;
    let rhs = [
        [-y1.clone(), -x1p],
        [-y2.clone(), -x2p],
    ];
    Ok(lhs == rhs)
}

/// A 2 x n matrix stored by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct ColMatrix<K> {
    pub cols: Vec<[K; 2]>,
}

impl<K: Field> ColMatrix<K> {
    pub fn new(cols: Vec<[K; 2]>) -> Self {
        ColMatrix { cols }
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    /// Column by 1-based cyclic index.
    pub fn col(&self, j: i64) -> &[K; 2] {
        let n = self.n() as i64;
        &self.cols[(j - 1).rem_euclid(n) as usize]
    }

    fn block(&self, j: i64) -> Block<K> {
        let a = self.col(j);
        let b = self.col(j + 1);
        [
            [a[0].clone(), b[0].clone()],
            [a[1].clone(), b[1].clone()],
        ]
    }

    fn put_block(&mut self, j: i64, b: Block<K>) {
        let n = self.n() as i64;
        let ja = (j - 1).rem_euclid(n) as usize;
        let jb = j.rem_euclid(n) as usize;
        self.cols[ja] = [b[0][0].clone(), b[1][0].clone()];
        self.cols[jb] = [b[0][1].clone(), b[1][1].clone()];
    }

    /// Apply `mu` to columns j and j+1 (mod n), 1-based.
    pub fn s(&self, j: i64) -> Result<ColMatrix<K>, Singular> {
        let mut out = self.clone();
        out.put_block(j, mu(&self.block(j))?);
        Ok(out)
    }

    /// Apply `nu` to columns j and j+1 (mod n), 1-based.
    pub fn t(&self, j: i64) -> Result<ColMatrix<K>, Singular> {
        let mut out = self.clone();
        out.put_block(j, nu(&self.block(j))?);
        Ok(out)
    }
}

/// Apply every `s_j` with 1-based `j` of the given parity; the column
/// pairs are disjoint so the order is immaterial.
pub fn s_batch<K: Field>(m: &ColMatrix<K>, parity: u8) -> Result<ColMatrix<K>, Singular> {
    assert_eq!(m.n() % 2, 0);
    let mut bad = Vec::new();
    let mut out = m.clone();
    let mut j = if parity % 2 == 1 { 1 } else { 2 };
    while j <= m.n() as i64 {
        match out.s(j) {
            Ok(next) => out = next,
            Err(_) => bad.push(j),
        }
        j += 2;
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(Singular(format!("column merges singular at {bad:?}")))
    }
}

fn negated_pairs<K: Field>(m: &ColMatrix<K>, parity: u8) -> bool {
    // col_{j+1} = -col_j for every 1-based j of the given parity.
    let start = if parity % 2 == 1 { 1 } else { 2 };
    (start..=m.n() as i64).step_by(2).all(|j| {
        let a = m.col(j);
        let b = m.col(j + 1);
        b[0] == -a[0].clone() && b[1] == -a[1].clone()
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TodaState<K> {
    pub m: ColMatrix<K>,
    pub sigma: u8,
}

/// The bipartite dynamics on 2 x 2n states: `sigma = 0` merges even
/// 1-based column pairs, `sigma = 1` odd ones, and each step flips
/// `sigma`.
pub struct TodaSystem<K> {
    pub n: usize,
    _marker: std::marker::PhantomData<K>,
}

impl<K: Field> TodaSystem<K> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        TodaSystem {
            n,
            _marker: std::marker::PhantomData,
        }
    }

    pub fn expected_width(&self) -> usize {
        self.n - 1
    }
}

/// The alternating seed grid: `w_{j,k} = (-1)^k` times
/// the j-th column of the k-th iterate of the alternating `G_0`/`G_1`
/// column dynamics on a 2 x n seed.
pub struct SeedGrid<K> {
    iterates: Vec<ColMatrix<K>>,
}

impl<K: Field> SeedGrid<K> {
    /// `G_0` composes the `t_j` with even `j <= n-1`, `G_1` those with
    /// odd `j <= n-1`; fails on any singular `nu`.
    pub fn new(seed: &ColMatrix<K>, levels: usize) -> Result<SeedGrid<K>, Singular> {
        let n = seed.n() as i64;
        let mut iterates = vec![seed.clone()];
        for k in 0..levels {
            let start = if k % 2 == 0 { 2 } else { 1 };
            let mut cur = iterates.last().unwrap().clone();
            let mut j = start;
            while j <= n - 1 {
                cur = cur.t(j)?;
                j += 2;
            }
            iterates.push(cur);
        }
        Ok(SeedGrid { iterates })
    }

    pub fn level(&self, k: usize) -> &ColMatrix<K> {
        &self.iterates[k]
    }

    /// `w_{j,k}` for `k = 0..levels`, j 1-based.
    pub fn w(&self, j: i64, k: usize) -> [K; 2] {
        let col = self.iterates[k].col(j);
        if k % 2 == 0 {
            col.clone()
        } else {
            [-col[0].clone(), -col[1].clone()]
        }
    }
}

/// Assemble a maximally singular U-state from a seed: columns
/// `w_{1,1}, ..., w_{1,2n}` with tag 1.
pub fn state_from_seed<K: Field>(seed: &ColMatrix<K>) -> Result<TodaState<K>, Singular> {
    let n = seed.n();
    let grid = SeedGrid::new(seed, 2 * n)?;
    let cols = (1..=2 * n).map(|k| grid.w(1, k)).collect();
    Ok(TodaState {
        m: ColMatrix::new(cols),
        sigma: 1,
    })
}

fn random_column<K: Field>(rng: &mut Seeded) -> [K; 2] {
    [K::random_nonzero(rng), K::random_nonzero(rng)]
}

pub fn random_seed<K: Field>(n: usize, rng: &mut Seeded) -> ColMatrix<K> {
    ColMatrix::new((0..n).map(|_| random_column::<K>(rng)).collect())
}

impl<K: Field> DynSystem for TodaSystem<K> {
    type State = TodaState<K>;

    fn step(&self, state: &TodaState<K>, dir: Direction) -> Result<TodaState<K>, Singular> {
        let parity = match dir {
            Direction::Forward => state.sigma,
            // The batches are involutions, so undoing the previous step
            // means applying the batch of the opposite tag.
            Direction::Backward => 1 - state.sigma,
        };
        Ok(TodaState {
            m: s_batch(&state.m, parity)?,
            sigma: 1 - state.sigma,
        })
    }

    fn in_class(&self, state: &TodaState<K>, class: Class) -> bool {
        let w0 = negated_pairs(&state.m, 0);
        let w1 = negated_pairs(&state.m, 1);
        match class {
            Class::U => (w0 && state.sigma == 1) || (w1 && state.sigma == 0),
            Class::V => (w0 && state.sigma == 0) || (w1 && state.sigma == 1),
        }
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> TodaState<K> {
        match class {
            Class::U => loop {
                let seed = random_seed::<K>(self.n, rng);
                if let Ok(state) = state_from_seed(&seed) {
                    return state;
                }
            },
            Class::V => {
                // W_0 with tag 0: even pairs are exact negatives.
                let mut cols = vec![[K::zero(), K::zero()]; 2 * self.n];
                for j in (2..=2 * self.n).step_by(2) {
                    let c = random_column::<K>(rng);
                    cols[j % (2 * self.n)] = [-c[0].clone(), -c[1].clone()];
                    cols[j - 1] = c;
                }
                TodaState {
                    m: ColMatrix::new(cols),
                    sigma: 0,
                }
            }
        }
    }
}

/// Encode the edges of a 2n-gon as Toda columns: edge `z_j` becomes the
/// column `[z_j, conj(z_j)]` (`top = false` puts the conjugate on top).
/// Recutting the even vertices is then one bipartite Toda step with
/// `sigma = 1`, which also flips the layout.
pub fn embed_recutting(p: &PlanarPolygon, top: bool) -> ColMatrix<GaussRat> {
    let cols = (1..=p.n() as i64)
        .map(|j| {
            let z = p.vertex(j + 1).clone() - p.vertex(j).clone();
            if top {
                [z.clone(), z.conj()]
            } else {
                [z.conj(), z]
            }
        })
        .collect();
    ColMatrix::new(cols)
}
