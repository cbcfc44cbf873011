//! The baseline ontological model: the quantum state is ontic.
//!
//! Preparing `|psi>` places all weight on the delta line
//! `{(|psi>, x) : x in [0, 1]}` with `x` uniform. A measurement is answered
//! by stacking the outcome weights `|<phi_k|lambda>|^2` into consecutive
//! intervals of `[0, 1]` in anchor order and reading off the interval
//! containing `x`. Along a preparation's own line the interval lengths are
//! exactly the Born probabilities.

use crate::ontology::{EpistemicState, OnticState, SupportComponent};
use crate::qstate::{OrderedMeasurement, PureState};
use crate::{Error, Result};

/// The epistemic state of `|psi>`: one delta line over the full `x` range.
pub fn prepare(psi: &PureState) -> EpistemicState {
    EpistemicState::new(
        psi.dim(),
        vec![(1.0, SupportComponent::DeltaLine {
            center: psi.clone(),
            interval: [0.0, 1.0],
        })],
    )
    .expect("a full delta line is always a valid epistemic state")
}

/// Scans stacked cumulative intervals in the order given by `map` and
/// returns the original outcome index whose interval contains `x`.
///
/// Interval `k` is `[C_{k-1}, C_k)` with `C_k` the compensated cumulative
/// weight sum; `x = 1` falls past every bound and lands on the last outcome.
#[inline]
fn respond_scan(
    direction: &PureState,
    x: f64,
    outcomes: &[PureState],
    map: impl Fn(usize) -> usize,
) -> usize {
    let d = outcomes.len();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for pos in 0..d - 1 {
        let k = map(pos);
        // Kahan compensated summation keeps interval bounds stable to ~1 ulp.
        let y = outcomes[k].fidelity(direction) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if x < sum {
            return k;
        }
    }
    map(d - 1)
}

/// The deterministic response of ontic state `lambda` to an ordered
/// measurement.
pub fn respond(lambda: &OnticState, meas: &OrderedMeasurement) -> Result<usize> {
    if lambda.direction().dim() != meas.d() {
        return Err(Error::DimensionMismatch {
            expected: meas.d(),
            got: lambda.direction().dim(),
        });
    }
    Ok(respond_scan(lambda.direction(), lambda.x(), meas.outcomes(), |i| i))
}

/// [`respond`] with the stacking order replaced by the permutation `order`.
pub(crate) fn respond_permuted(
    lambda: &OnticState,
    outcomes: &[PureState],
    order: &[usize],
) -> usize {
    respond_scan(lambda.direction(), lambda.x(), outcomes, |i| order[i])
}

/// Cumulative interval bounds `[0, C_0, ..., C_{d-1}]` for a direction,
/// stacked in measurement order.
pub(crate) fn cumulative_bounds(direction: &PureState, outcomes: &[PureState]) -> Vec<f64> {
    cumulative_bounds_permuted(direction, outcomes, None)
}

/// [`cumulative_bounds`] stacked in a permuted order when `order` is given.
pub(crate) fn cumulative_bounds_permuted(
    direction: &PureState,
    outcomes: &[PureState],
    order: Option<&[usize]>,
) -> Vec<f64> {
    let d = outcomes.len();
    let mut bounds = Vec::with_capacity(d + 1);
    bounds.push(0.0);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for pos in 0..d {
        let k = order.map_or(pos, |o| o[pos]);
        let y = outcomes[k].fidelity(direction) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        bounds.push(sum);
    }
    bounds
}

/// The half-open sub-interval of `[0, 1]` on which `direction` responds with
/// outcome `k` (the final outcome also claims the point `x = 1`).
pub fn response_interval(
    direction: &PureState,
    meas: &OrderedMeasurement,
    k: usize,
) -> Result<(f64, f64)> {
    if direction.dim() != meas.d() {
        return Err(Error::DimensionMismatch {
            expected: meas.d(),
            got: direction.dim(),
        });
    }
    if k >= meas.d() {
        return Err(Error::OutcomeOutOfRange { k, d: meas.d() });
    }
    let bounds = cumulative_bounds(direction, meas.outcomes());
    Ok((bounds[k], bounds[k + 1]))
}
