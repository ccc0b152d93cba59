//! System-agnostic harness for Devron pairs.
//!
//! A Devron pair for an invertible map `F` is a pair of classes `U, V`
//! of states such that `F` is singular a few steps backward of `U` and
//! a few steps forward of `V`, while some power `F^M` carries `U` into
//! `V` invertibly. The least such `M` is the pair's width. The harness
//! works against the [`DynSystem`] capability so each dynamical system
//! only has to provide stepping, class membership, and seeded
//! sampling.

use crate::report::TrialRecord;
use crate::rng::{trial_rng, Seeded};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// The two classes of a candidate Devron pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Class {
    U,
    V,
}

/// An exact singularity: some denominator of the rational map vanished.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("singular: {0}")]
pub struct Singular(pub String);

/// Capability every registered dynamical system provides.
pub trait DynSystem {
    type State: Clone + PartialEq + fmt::Debug;

    /// One application of the map or its inverse. Singularities are
    /// data, not failures.
    fn step(&self, state: &Self::State, dir: Direction) -> Result<Self::State, Singular>;

    fn in_class(&self, state: &Self::State, class: Class) -> bool;

    /// Seeded random element of a class.
    fn sample(&self, class: Class, rng: &mut Seeded) -> Self::State;
}

/// A computed orbit prefix: `states[0]` is the input; if a singularity
/// interrupted the run, `singular` holds the 1-based step at which it
/// occurred.
pub struct Trajectory<S> {
    pub states: Vec<S>,
    pub singular: Option<(usize, Singular)>,
}

pub fn iterate<Sys: DynSystem>(
    sys: &Sys,
    start: &Sys::State,
    steps: usize,
    dir: Direction,
) -> Trajectory<Sys::State> {
    let mut states = vec![start.clone()];
    for t in 1..=steps {
        match sys.step(states.last().unwrap(), dir) {
            Ok(next) => states.push(next),
            Err(e) => {
                return Trajectory {
                    states,
                    singular: Some((t, e)),
                }
            }
        }
    }
    Trajectory {
        states,
        singular: None,
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WidthError {
    #[error("singular at forward step {step} before reaching V: {detail}")]
    SingularBeforeV { step: usize, detail: String },
    #[error("V not reached within {max_steps} steps")]
    NotReached { max_steps: usize },
    #[error("forward path not invertible at step {step}")]
    NotInvertible { step: usize },
}

pub struct WidthMeasurement<S> {
    pub width: usize,
    /// The forward path `u, F(u), ..., F^width(u)`.
    pub path: Vec<S>,
}

/// Least `m >= 1` with `F^m(u)` in `V`, requiring the whole forward
/// path to be defined and exactly invertible (each backward step
/// reproduces its predecessor).
pub fn measure_width<Sys: DynSystem>(
    sys: &Sys,
    u_state: &Sys::State,
    max_steps: usize,
) -> Result<WidthMeasurement<Sys::State>, WidthError> {
    let mut path = vec![u_state.clone()];
    for m in 1..=max_steps {
        let next = sys
            .step(path.last().unwrap(), Direction::Forward)
            .map_err(|e| WidthError::SingularBeforeV {
                step: m,
                detail: e.0,
            })?;
        // Invertibility certificate for this step.
        match sys.step(&next, Direction::Backward) {
            Ok(back) if &back == path.last().unwrap() => {}
            _ => return Err(WidthError::NotInvertible { step: m }),
        }
        path.push(next);
        if sys.in_class(path.last().unwrap(), Class::V) {
            return Ok(WidthMeasurement { width: m, path });
        }
    }
    Err(WidthError::NotReached { max_steps })
}

/// Verification policy for one system/pair.
#[derive(Clone, Copy, Debug)]
pub struct PairConfig {
    /// Width the trial is checked against.
    pub expected_width: usize,
    /// `true`: measured width must equal `expected_width`;
    /// `false`: measured width must be at most `expected_width`.
    pub exact: bool,
    /// Forward step budget when searching for `V`.
    pub max_steps: usize,
    /// Backward steps within which a `U`-sample must turn singular.
    pub back_bound: usize,
    /// Forward steps within which the reached `V`-state must turn
    /// singular.
    pub fwd_bound: usize,
    /// Non-generic samples are redrawn at most this many times.
    pub redraw_limit: usize,
}

impl PairConfig {
    pub fn new(expected_width: usize, exact: bool) -> PairConfig {
        PairConfig {
            expected_width,
            exact,
            max_steps: 2 * expected_width.max(1) + 2,
            back_bound: 3,
            fwd_bound: 3,
            redraw_limit: 5,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> PairConfig {
        self.max_steps = max_steps;
        self
    }
}

/// One verified trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub index: usize,
    pub redraws: usize,
    pub result: Result<TrialData, String>,
}

#[derive(Clone, Debug)]
pub struct TrialData {
    pub width: usize,
    /// Backward depth at which the `U`-sample became singular.
    pub back_depth: usize,
    /// Forward depth at which the reached `V`-state became singular.
    pub fwd_depth: usize,
}

impl TrialOutcome {
    pub fn record(&self) -> TrialRecord {
        match &self.result {
            Ok(d) => TrialRecord {
                trial_index: self.index,
                width: Some(d.width),
                observed: None,
                singular_at: Some(d.fwd_depth),
                discarded: false,
                reason: None,
            },
            Err(reason) => TrialRecord {
                trial_index: self.index,
                width: None,
                observed: None,
                singular_at: None,
                discarded: true,
                reason: Some(reason.clone()),
            },
        }
    }
}

/// Aggregate of `verify_pair`.
pub struct DevronReport {
    pub trials: Vec<TrialOutcome>,
    pub config: PairConfig,
}

impl DevronReport {
    /// All trials verified all four pair conditions.
    pub fn pass(&self) -> bool {
        self.trials.iter().all(|t| t.result.is_ok())
    }

    pub fn widths(&self) -> Vec<usize> {
        self.trials
            .iter()
            .filter_map(|t| t.result.as_ref().ok().map(|d| d.width))
            .collect()
    }

    pub fn records(&self) -> Vec<TrialRecord> {
        self.trials.iter().map(TrialOutcome::record).collect()
    }
}

fn run_trial<Sys: DynSystem>(
    sys: &Sys,
    cfg: &PairConfig,
    index: usize,
    seed: u64,
) -> TrialOutcome {
    let mut rng = trial_rng(seed, index as u64);
    let mut redraws = 0;
    loop {
        let u = sys.sample(Class::U, &mut rng);
        let retry = |redraws: &mut usize, reason: String| -> Option<TrialOutcome> {
            if *redraws < cfg.redraw_limit {
                *redraws += 1;
                None
            } else {
                Some(TrialOutcome {
                    index,
                    redraws: *redraws,
                    result: Err(reason),
                })
            }
        };
        if !sys.in_class(&u, Class::U) {
            return TrialOutcome {
                index,
                redraws,
                result: Err("sampler produced a state outside U".into()),
            };
        }
        // First condition: the map is singular a few steps backward of U.
        let back = iterate(sys, &u, cfg.back_bound, Direction::Backward);
        let back_depth = match back.singular {
            Some((step, _)) => step,
            None => match retry(
                &mut redraws,
                format!("no backward singularity within {} steps", cfg.back_bound),
            ) {
                Some(fail) => return fail,
                None => continue,
            },
        };
        // Third and fourth conditions: F^M carries U into V invertibly.
        let meas = match measure_width(sys, &u, cfg.max_steps) {
            Ok(m) => m,
            Err(e) => match retry(&mut redraws, e.to_string()) {
                Some(fail) => return fail,
                None => continue,
            },
        };
        let width_ok = if cfg.exact {
            meas.width == cfg.expected_width
        } else {
            meas.width <= cfg.expected_width
        };
        if !width_ok {
            // An atypical width usually means the draw was non-generic
            // (e.g. an accidental extra rank drop); redraw within budget.
            match retry(
                &mut redraws,
                format!(
                    "width {} violates expected {}{}",
                    meas.width,
                    if cfg.exact { "exactly " } else { "at most " },
                    cfg.expected_width
                ),
            ) {
                Some(fail) => return fail,
                None => continue,
            }
        }
        // Second condition: the map is singular a few steps forward of V,
        // checked at the V-state the trial actually reached.
        let v_state = meas.path.last().unwrap();
        let fwd = iterate(sys, v_state, cfg.fwd_bound, Direction::Forward);
        let fwd_depth = match fwd.singular {
            Some((step, _)) => step,
            None => {
                return TrialOutcome {
                    index,
                    redraws,
                    result: Err(format!(
                        "no forward singularity within {} steps of the reached V-state",
                        cfg.fwd_bound
                    )),
                }
            }
        };
        return TrialOutcome {
            index,
            redraws,
            result: Ok(TrialData {
                width: meas.width,
                back_depth,
                fwd_depth,
            }),
        };
    }
}

/// Sample-scale verification of all four Devron-pair conditions.
pub fn verify_pair<Sys: DynSystem>(
    sys: &Sys,
    cfg: PairConfig,
    trials: usize,
    seed: u64,
) -> DevronReport {
    let outcomes = (0..trials)
        .map(|i| run_trial(sys, &cfg, i, seed))
        .collect();
    DevronReport {
        trials: outcomes,
        config: cfg,
    }
}
