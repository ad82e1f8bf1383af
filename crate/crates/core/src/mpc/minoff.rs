//! Minimum-off-step constraints on the binary coast signal.
//!
//! Once the signal makes a 1 -> 0 transition it must stay 0 for at least
//! `d_min` steps. Over a receding horizon the rule is expressed as linear
//! inequalities on the extended vector `[history, plan]`:
//!
//! ```text
//! delta(tau) <= 1 - (delta(j-1) - delta(j)),  tau = j+1 .. min(j+d_min-1, end)
//! ```
//!
//! Truncation at the end of the horizon is allowed: an off-run that is
//! still open when the horizon ends is not a violation there (the history
//! mechanism carries it into the next solve).

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Rolling window of the last `d_min` applied binary signals, oldest first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryHistory {
    recent: Vec<u8>,
}

impl BinaryHistory {
    pub fn new(recent: Vec<u8>) -> Result<Self, ModelError> {
        if recent.is_empty() {
            return Err(ModelError::InvalidParams {
                what: "binary history must not be empty".to_string(),
            });
        }
        if recent.iter().any(|&z| z > 1) {
            return Err(ModelError::InvalidParams {
                what: "binary history entries must be 0 or 1".to_string(),
            });
        }
        Ok(Self { recent })
    }

    /// History of length `d_min` with the engine on throughout.
    pub fn all_on(d_min: usize) -> Self {
        Self {
            recent: vec![1; d_min.max(1)],
        }
    }

    /// Record an applied signal, dropping the oldest entry.
    pub fn push(&mut self, signal: u8) {
        debug_assert!(signal <= 1);
        self.recent.remove(0);
        self.recent.push(signal);
    }

    pub fn last(&self) -> u8 {
        *self.recent.last().unwrap()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.recent
    }

    pub fn len(&self) -> usize {
        self.recent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the trailing off-run, capped at the history length.
    pub fn trailing_zeros(&self) -> usize {
        self.recent.iter().rev().take_while(|&&z| z == 0).count()
    }
}

/// One inequality `delta[tau] <= 1 - (delta[j-1] - delta[j])` over the
/// extended vector `[history, plan]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinOffInequality {
    pub j: usize,
    pub tau: usize,
}

/// The full inequality set for a horizon appended to a history. Entries
/// whose indices fall inside the history evaluate against constants.
pub fn min_off_constraints(
    history: &BinaryHistory,
    horizon: usize,
    d_min: usize,
) -> Vec<MinOffInequality> {
    let ext_len = history.len() + horizon;
    let mut out = Vec::new();
    for j in 1..ext_len {
        let hi = (j + d_min - 1).min(ext_len - 1);
        for tau in (j + 1)..=hi {
            out.push(MinOffInequality { j, tau });
        }
    }
    out
}

/// Check a planned binary sequence against the inequality set.
pub fn satisfies_min_off(history: &BinaryHistory, plan: &[u8], d_min: usize) -> bool {
    let ext: Vec<u8> = history.as_slice().iter().chain(plan).copied().collect();
    min_off_constraints(history, plan.len(), d_min)
        .iter()
        .all(|c| {
            let lhs = i32::from(ext[c.tau]);
            let rhs = 1 - (i32::from(ext[c.j - 1]) - i32::from(ext[c.j]));
            lhs <= rhs
        })
}

/// Automaton state while scanning a binary sequence left to right: either
/// the signal is on, or it is inside an off-run of the given length
/// (capped at d_min, beyond which turning back on is allowed).
fn advance_state(state: Option<usize>, z: u8, d_min: usize) -> Option<Option<usize>> {
    match (state, z) {
        (None, 1) => Some(None),
        (None, 0) => Some(Some(1)),
        (Some(r), 0) => Some(Some((r + 1).min(d_min))),
        (Some(r), 1) if r >= d_min => Some(None),
        (Some(_), 1) => None,
        _ => unreachable!("signal must be 0 or 1"),
    }
}

/// State after consuming the history (None = on, Some(r) = off-run of r).
fn history_state(history: &BinaryHistory, d_min: usize) -> Option<usize> {
    if history.last() == 1 {
        None
    } else {
        Some(history.trailing_zeros().min(d_min))
    }
}

/// Whether a partially assigned plan (None = free) can be completed
/// without violating the rule. Runs the automaton over the set of
/// reachable states.
pub(crate) fn completable(
    history: &BinaryHistory,
    partial: &[Option<u8>],
    d_min: usize,
) -> bool {
    // Reachable run lengths; None state tracked separately.
    let mut on = history.last() == 1;
    let mut runs = vec![false; d_min + 1];
    if !on {
        runs[history.trailing_zeros().min(d_min)] = true;
    }
    for &entry in partial {
        let mut next_on = false;
        let mut next_runs = vec![false; d_min + 1];
        let mut feed = |state: Option<usize>, z: u8| {
            if let Some(s) = advance_state(state, z, d_min) {
                match s {
                    None => next_on = true,
                    Some(r) => next_runs[r] = true,
                }
            }
        };
        let choices: &[u8] = match entry {
            Some(z) => std::slice::from_ref(match z {
                0 => &0,
                _ => &1,
            }),
            None => &[0, 1],
        };
        for &z in choices {
            if on {
                feed(None, z);
            }
            for (r, &live) in runs.iter().enumerate() {
                if live {
                    feed(Some(r), z);
                }
            }
        }
        on = next_on;
        runs = next_runs;
        if !on && runs.iter().all(|&b| !b) {
            return false;
        }
    }
    true
}

/// Enumerate every full binary sequence of the given length that satisfies
/// the rule after the history, in lexicographic order with 1 before 0.
pub(crate) fn enumerate_feasible(
    history: &BinaryHistory,
    horizon: usize,
    d_min: usize,
) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(horizon);
    fn rec(
        state: Option<usize>,
        remaining: usize,
        d_min: usize,
        buf: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) {
        if remaining == 0 {
            out.push(buf.clone());
            return;
        }
        for z in [1u8, 0u8] {
            if let Some(next) = advance_state(state, z, d_min) {
                buf.push(z);
                rec(next, remaining - 1, d_min, buf, out);
                buf.pop();
            }
        }
    }
    rec(history_state(history, d_min), horizon, d_min, &mut buf, &mut out);
    out
}

/// Enumerate the feasible completions of a partial assignment, or None if
/// there are more than `limit`. Order: 1 before 0 at each free slot.
pub(crate) fn enumerate_completions(
    history: &BinaryHistory,
    partial: &[Option<u8>],
    d_min: usize,
    limit: usize,
) -> Option<Vec<Vec<u8>>> {
    fn rec(
        state: Option<usize>,
        partial: &[Option<u8>],
        d_min: usize,
        limit: usize,
        buf: &mut Vec<u8>,
        out: &mut Vec<Vec<u8>>,
    ) -> bool {
        let Some(&entry) = partial.first() else {
            if out.len() >= limit {
                return false;
            }
            out.push(buf.clone());
            return true;
        };
        let choices: &[u8] = match entry {
            Some(0) => &[0],
            Some(_) => &[1],
            None => &[1, 0],
        };
        for &z in choices {
            if let Some(next) = advance_state(state, z, d_min) {
                buf.push(z);
                let ok = rec(next, &partial[1..], d_min, limit, buf, out);
                buf.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(partial.len());
    if rec(
        history_state(history, d_min),
        partial,
        d_min,
        limit,
        &mut buf,
        &mut out,
    ) {
        Some(out)
    } else {
        None
    }
}
