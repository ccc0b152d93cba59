//! A minimal six-variable birational map with a Devron pair of width 2.
//!
//! The map couples the odd- and even-position triples of a 6-tuple; the
//! class `U` of states with equal odd-position entries is carried onto
//! the class `V` of states with equal even-position entries in two
//! steps, while the map degenerates a few steps outside the pair in
//! either direction.

use crate::devron::{Class, Direction, DynSystem, Singular};
use crate::field::{Field, Rat};
use crate::rng::Seeded;

#[derive(Clone, PartialEq, Debug)]
pub struct SixState(pub [Rat; 6]);

pub struct SixVarMap;

fn div(n: Rat, d: &Rat, what: &str) -> Result<Rat, Singular> {
    d.inv()
        .map(|i| n * i)
        .ok_or_else(|| Singular(format!("zero denominator {what}")))
}

impl DynSystem for SixVarMap {
    type State = SixState;

    fn step(&self, state: &SixState, dir: Direction) -> Result<SixState, Singular> {
        let [a, b, c, d, e, f] = &state.0;
        let next = match dir {
            Direction::Forward => [
                d.clone(),
                div(b * b - d * f, e, "e")?,
                f.clone(),
                div(d * d - f * b, a, "a")?,
                b.clone(),
                div(f * f - b * d, c, "c")?,
            ],
            Direction::Backward => [
                div(a * a - c * e, d, "d")?,
                e.clone(),
                div(c * c - e * a, f, "f")?,
                a.clone(),
                div(e * e - a * c, b, "b")?,
                c.clone(),
            ],
        };
        Ok(SixState(next))
    }

    fn in_class(&self, state: &SixState, class: Class) -> bool {
        let x = &state.0;
        match class {
            Class::U => x[0] == x[2] && x[2] == x[4],
            Class::V => x[1] == x[3] && x[3] == x[5],
        }
    }

    fn sample(&self, class: Class, rng: &mut Seeded) -> SixState {
        let t = Rat::random_nonzero(rng);
        let p = Rat::random_nonzero(rng);
        let q = Rat::random_nonzero(rng);
        let r = Rat::random_nonzero(rng);
        SixState(match class {
            Class::U => [t.clone(), p, t.clone(), q, t, r],
            Class::V => [p, t.clone(), q, t.clone(), r, t],
        })
    }
}
