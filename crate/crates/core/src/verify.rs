//! Statistical certification that the implemented models reproduce quantum
//! statistics, and measurement of where their epistemic supports overlap.
//!
//! Every driver here is deterministic given its seed: trial streams are
//! split into fixed-size batches keyed by batch index (not by worker), so
//! reports are byte-identical across thread counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::epistemic::{forced_outcome, z_from_fidelity, ModelVariant};
use crate::model::Model;
use crate::ontology::{
    overlap_measure, EpistemicState, RegionDescriptor, RegionDistribution, SupportComponent,
};
use crate::qstate::{
    born_probabilities, direction_at_fidelity, order_for_anchor, random_basis,
    OrderedMeasurement, PureState,
};
use crate::{bell, epistemic, Error, Result};

/// Minimum trial count accepted by [`run_born_trials`].
pub const MIN_TRIALS: u64 = 1_000;
/// Minimum sample count accepted by [`estimate_overlap_mc`].
pub const MIN_OVERLAP_SAMPLES: u64 = 10_000;
/// Verdicts fail when the goodness-of-fit p-value drops below this.
pub const P_VALUE_FLOOR: f64 = 1e-3;
/// Absolute tolerance for the exact response-mass check.
pub const EXACT_TOL: f64 = 1e-9;
/// Joint confidence of the two-sided overlap interval.
pub const OVERLAP_CONFIDENCE: f64 = 0.99;

/// Born weights at or below this are impossible outcomes: excluded from
/// chi-squared categories, and any observed count there fails the verdict.
const ZERO_PROB_TOL: f64 = 1e-12;
/// Categories with expected counts below this are merged before chi-squared.
const MIN_EXPECTED: f64 = 5.0;
/// Trials per deterministic RNG batch; batching is independent of worker
/// count, so parallel reductions cannot perturb results.
const TRIAL_BATCH: u64 = 1 << 14;
/// Per-branch two-sided confidence backing the joint overlap interval: the
/// union bound over two branches leaves at least [`OVERLAP_CONFIDENCE`].
const BRANCH_CONFIDENCE: f64 = 0.995;

/// Stream-id namespaces keeping every purpose's RNG draws disjoint.
const STREAM_TRIALS: u64 = 1 << 32;
const STREAM_STATES: u64 = 2 << 32;
const STREAM_MEASUREMENTS: u64 = 3 << 32;
const STREAM_OVERLAP: u64 = 4 << 32;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Binary outcome of a statistical or exact check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Total variation distance between two distributions on the same outcomes.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

struct Gof {
    chi_squared: f64,
    dof: usize,
    p_value: f64,
    impossible_observed: u64,
}

/// Pearson goodness of fit of observed counts against Born weights.
///
/// Impossible outcomes are excluded from the statistic; sparse categories
/// (expected below [`MIN_EXPECTED`]) are merged smallest-first; zero
/// remaining degrees of freedom yields `p = 1`.
fn chi_squared_gof(counts: &[u64], probs: &[f64], n: u64) -> Gof {
    let mut impossible_observed = 0;
    let mut cats: Vec<(f64, f64)> = Vec::with_capacity(counts.len());
    for (&c, &p) in counts.iter().zip(probs) {
        if p <= ZERO_PROB_TOL {
            impossible_observed += c;
        } else {
            cats.push((p * n as f64, c as f64));
        }
    }
    while cats.len() > 1 {
        cats.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite expected counts"));
        if cats[0].0 >= MIN_EXPECTED {
            break;
        }
        let (e0, o0) = cats.remove(0);
        cats[0].0 += e0;
        cats[0].1 += o0;
    }
    let chi_squared: f64 = cats
        .iter()
        .map(|(e, o)| {
            let r = o - e;
            r * r / e
        })
        .sum();
    let dof = cats.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("dof >= 1")
            .sf(chi_squared)
    };
    Gof { chi_squared, dof, p_value, impossible_observed }
}

/// Outcome statistics of a seeded Born-rule trial run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub schema: String,
    pub model: String,
    pub d: usize,
    pub psi: PureState,
    pub measurement: OrderedMeasurement,
    pub n: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
    pub empirical: Vec<f64>,
    pub target: Vec<f64>,
    pub tv_distance: f64,
    pub chi_squared: f64,
    pub dof: usize,
    pub p_value: f64,
    pub impossible_observed: u64,
    pub verdict: Verdict,
}

/// Samples `n` ontic states from the model's preparation of `psi` and tallies
/// deterministic responses to `meas`, then certifies the frequencies against
/// the Born distribution.
///
/// The verdict passes iff the chi-squared p-value stays at or above
/// [`P_VALUE_FLOOR`] and no impossible outcome was observed.
pub fn run_born_trials(
    model: &Model,
    psi: &PureState,
    meas: &OrderedMeasurement,
    n: u64,
    seed: u64,
) -> Result<TrialReport> {
    if n < MIN_TRIALS {
        return Err(Error::NotEnoughSamples { min: MIN_TRIALS, got: n });
    }
    let d = model.d();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    if meas.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: meas.d() });
    }
    if matches!(
        model.variant(),
        Some(ModelVariant::QubitHemisphere | ModelVariant::GeneralCap { .. })
    ) && !meas.anchor().approx_eq(&model.ordering_anchor())
    {
        return Err(Error::AnchorMismatch);
    }
    let epistemic_state = model.prepare(psi)?;
    let target = born_probabilities(psi, meas)?;

    let batches = n.div_ceil(TRIAL_BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .fold(
            || vec![0u64; d],
            |mut acc, batch| {
                let mut rng = stream_rng(seed, STREAM_TRIALS + batch);
                let lo = batch * TRIAL_BATCH;
                let hi = n.min(lo + TRIAL_BATCH);
                for _ in lo..hi {
                    let lambda = epistemic_state.sample(&mut rng);
                    let k = model
                        .respond(&lambda, meas)
                        .expect("sampled ontic states match the measurement dimension");
                    acc[k] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; d],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let gof = chi_squared_gof(&counts, &target, n);
    let verdict = if gof.impossible_observed == 0 && gof.p_value >= P_VALUE_FLOOR {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(TrialReport {
        schema: "trial-report/v1".to_string(),
        model: model.name().to_string(),
        d,
        psi: psi.clone(),
        measurement: meas.clone(),
        n,
        seed,
        tv_distance: tv_distance(&empirical, &target),
        chi_squared: gof.chi_squared,
        dof: gof.dof,
        p_value: gof.p_value,
        impossible_observed: gof.impossible_observed,
        counts,
        empirical,
        target,
        verdict,
    })
}

/// Exact per-outcome response masses of a preparation, against the Born
/// distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactBornReport {
    pub schema: String,
    pub model: String,
    pub d: usize,
    pub masses: Vec<f64>,
    pub target: Vec<f64>,
    pub max_abs_diff: f64,
    pub verdict: Verdict,
}

/// Integrates the deterministic response function against the epistemic
/// state symbolically, with no sampling.
///
/// Delta-line components contribute the overlap of each stacked response
/// interval with their `x` interval; region components contribute their full
/// weight to the region's forced outcome. Agreement with the Born weights is
/// required to within [`EXACT_TOL`].
pub fn exact_born_check(
    model: &Model,
    psi: &PureState,
    meas: &OrderedMeasurement,
) -> Result<ExactBornReport> {
    let d = model.d();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    if meas.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: meas.d() });
    }
    let epistemic_state = model.prepare(psi)?;
    let target = born_probabilities(psi, meas)?;
    let mut masses = vec![0.0_f64; d];
    for (w, comp) in epistemic_state.components() {
        match comp {
            SupportComponent::DeltaLine { center, interval: [a, b] } => {
                let order = model.response_order(center, meas);
                let bounds =
                    bell::cumulative_bounds_permuted(center, meas.outcomes(), order.as_deref());
                for pos in 0..d {
                    let k = order.as_ref().map_or(pos, |o| o[pos]);
                    let lo = bounds[pos].max(*a);
                    // The final interval also claims everything above the
                    // last bound, including x = 1.
                    let hi = if pos == d - 1 { *b } else { bounds[pos + 1].min(*b) };
                    if hi > lo {
                        masses[k] += w * (hi - lo) / (b - a);
                    }
                }
            }
            SupportComponent::RegionUniform { region, .. } => {
                masses[forced_outcome(region, meas)?] += w;
            }
        }
    }
    let max_abs_diff = masses
        .iter()
        .zip(&target)
        .map(|(m, t)| (m - t).abs())
        .fold(0.0, f64::max);
    let verdict = if max_abs_diff <= EXACT_TOL { Verdict::Pass } else { Verdict::Fail };
    Ok(ExactBornReport {
        schema: "exact-born/v1".to_string(),
        model: model.name().to_string(),
        d,
        masses,
        target,
        max_abs_diff,
        verdict,
    })
}

/// One response-constancy violation, with everything needed to replay it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstancyFailure {
    pub region: RegionDescriptor,
    pub state_index: u64,
    pub measurement_index: u64,
    pub expected: usize,
    pub got: usize,
    pub seed: u64,
}

/// Result of sweeping region samples against random measurements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub schema: String,
    pub model: String,
    pub d: usize,
    pub n_states: u64,
    pub n_measurements: u64,
    pub seed: u64,
    pub checks: u64,
    pub boundary_stress_states: u64,
    pub failure_count: u64,
    /// At most the first 32 failures; `failure_count` has the full tally.
    pub failures: Vec<ConstancyFailure>,
    pub verdict: Verdict,
}

/// Fraction of swept states pinned just above the cap threshold, where the
/// slab is thinnest.
const BOUNDARY_STRESS_EVERY: u64 = 8;
const MAX_RECORDED_FAILURES: usize = 32;

/// Verifies that every sampled point of every region answers every random
/// measurement with the region's forced outcome.
///
/// States are split evenly across the variant's regions; every
/// [`BOUNDARY_STRESS_EVERY`]-th state of each region sits at anchor fidelity
/// `threshold + 1e-9`. With `inject_failure`, the first recorded response is
/// deliberately flipped to prove the sweep can fail.
pub fn check_region_constancy(
    variant: &ModelVariant,
    n_states: u64,
    n_measurements: u64,
    seed: u64,
    inject_failure: bool,
) -> Result<PropertyReport> {
    if n_states == 0 {
        return Err(Error::NotEnoughSamples { min: 1, got: 0 });
    }
    if n_measurements == 0 {
        return Err(Error::NotEnoughSamples { min: 1, got: 0 });
    }
    let model = Model::Modified(variant.clone());
    let d = model.d();
    let regions = variant.regions();

    let measurements: Vec<OrderedMeasurement> = (0..n_measurements)
        .map(|m| {
            let mut rng = stream_rng(seed, STREAM_MEASUREMENTS + m);
            let basis = random_basis(d, &mut rng)?;
            model.order_measurement(basis)
        })
        .collect::<Result<Vec<_>>>()?;
    // Forced outcomes per region per measurement, fixed before the sweep.
    let expected: Vec<Vec<usize>> = regions
        .iter()
        .map(|r| measurements.iter().map(|m| forced_outcome(r, m)).collect())
        .collect::<Result<Vec<_>>>()?;

    let per_region = n_states / regions.len() as u64;
    let extra = n_states % regions.len() as u64;
    let mut jobs: Vec<(usize, u64)> = Vec::new(); // (region index, global state index)
    let mut next_state = 0;
    for (ri, _) in regions.iter().enumerate() {
        let quota = per_region + u64::from((ri as u64) < extra);
        for _ in 0..quota {
            jobs.push((ri, next_state));
            next_state += 1;
        }
    }

    let threshold = epistemic::cap_threshold(d);
    let results: Vec<(u64, Vec<ConstancyFailure>, bool)> = jobs
        .par_iter()
        .map(|&(ri, state_index)| {
            let region = &regions[ri];
            let mut rng = stream_rng(seed, STREAM_STATES + state_index);
            let stress = state_index % BOUNDARY_STRESS_EVERY == BOUNDARY_STRESS_EVERY - 1;
            let lambda = if stress {
                let anchor = region.anchor_state();
                let dir = direction_at_fidelity(&anchor, threshold + 1e-9, &mut rng)
                    .expect("stress fidelity is valid");
                let z = z_from_fidelity(anchor.fidelity(&dir), d);
                assert!(z > 0.0, "stress direction fell outside its cap");
                let height = rand::Rng::gen_range(&mut rng, 0.0..z);
                let x = if region.is_high_side() { 1.0 - height } else { height };
                crate::ontology::OnticState::new(dir, x).expect("x in [0, 1]")
            } else {
                epistemic::sample_region(region, RegionDistribution::Uniform, &mut rng)
            };
            let mut failures = Vec::new();
            let mut checks = 0u64;
            for (mi, meas) in measurements.iter().enumerate() {
                let mut got = model
                    .respond(&lambda, meas)
                    .expect("sampled states match the measurement dimension");
                if inject_failure && state_index == 0 && mi == 0 {
                    got = (got + 1) % d;
                }
                checks += 1;
                if got != expected[ri][mi] {
                    failures.push(ConstancyFailure {
                        region: region.clone(),
                        state_index,
                        measurement_index: mi as u64,
                        expected: expected[ri][mi],
                        got,
                        seed,
                    });
                }
            }
            (checks, failures, stress)
        })
        .collect();

    let mut checks = 0;
    let mut boundary_stress_states = 0;
    let mut failure_count = 0;
    let mut failures = Vec::new();
    for (c, fs, stress) in results {
        checks += c;
        boundary_stress_states += u64::from(stress);
        failure_count += fs.len() as u64;
        for f in fs {
            if failures.len() < MAX_RECORDED_FAILURES {
                failures.push(f);
            }
        }
    }
    let verdict = if failure_count == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(PropertyReport {
        schema: "property-report/v1".to_string(),
        model: model.name().to_string(),
        d,
        n_states,
        n_measurements,
        seed,
        checks,
        boundary_stress_states,
        failure_count,
        failures,
        verdict,
    })
}

/// One direction of the overlap estimate: the sampled support mass of the
/// other state's support under this state's distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectedOverlap {
    pub hits: u64,
    pub n: u64,
    pub mass: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Monte Carlo estimate of the support overlap of two epistemic states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub schema: String,
    pub n: u64,
    pub seed: u64,
    pub a_in_b: DirectedOverlap,
    pub b_in_a: DirectedOverlap,
    /// Smaller of the two directed masses.
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

/// Wilson score interval for a binomial proportion.
fn wilson_interval(hits: u64, n: u64, confidence: f64) -> (f64, f64) {
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + confidence / 2.0);
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn directed_overlap(
    from: &EpistemicState,
    to: &EpistemicState,
    n: u64,
    seed: u64,
    stream: u64,
) -> DirectedOverlap {
    let mut rng = stream_rng(seed, stream);
    let mut hits = 0;
    for _ in 0..n {
        let lambda = from.sample(&mut rng);
        if to.support_contains(&lambda) {
            hits += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(hits, n, BRANCH_CONFIDENCE);
    DirectedOverlap { hits, n, mass: hits as f64 / n as f64, ci_low, ci_high }
}

/// Estimates the support overlap of two epistemic states by sampling each
/// and testing membership in the other's support.
///
/// For states produced by the models here, each directed support mass equals
/// that state's weight on the shared components, so the overlap measure is
/// the minimum of the two directions. The joint interval takes coordinatewise
/// minima of the two branch intervals; each branch holds at
/// [`BRANCH_CONFIDENCE`], so by the union bound the joint interval covers the
/// overlap with probability at least [`OVERLAP_CONFIDENCE`].
pub fn estimate_overlap_mc(
    e1: &EpistemicState,
    e2: &EpistemicState,
    n: u64,
    seed: u64,
) -> Result<OverlapEstimate> {
    if n < MIN_OVERLAP_SAMPLES {
        return Err(Error::NotEnoughSamples { min: MIN_OVERLAP_SAMPLES, got: n });
    }
    if e1.d() != e2.d() {
        return Err(Error::DimensionMismatch { expected: e1.d(), got: e2.d() });
    }
    let a_in_b = directed_overlap(e1, e2, n, seed, STREAM_OVERLAP);
    let b_in_a = directed_overlap(e2, e1, n, seed, STREAM_OVERLAP + 1);
    Ok(OverlapEstimate {
        schema: "overlap-report/v1".to_string(),
        n,
        seed,
        estimate: a_in_b.mass.min(b_in_a.mass),
        ci_low: a_in_b.ci_low.min(b_in_a.ci_low),
        ci_high: a_in_b.ci_high.min(b_in_a.ci_high),
        confidence: OVERLAP_CONFIDENCE,
        a_in_b,
        b_in_a,
    })
}

/// Classification of a model as psi-ontic or psi-epistemic over a state set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Epistemicity {
    #[serde(rename = "psi-ontic")]
    PsiOntic,
    #[serde(rename = "psi-epistemic")]
    PsiEpistemic,
}

/// A pair of distinct states whose preparations share support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessPair {
    pub i: usize,
    pub j: usize,
    pub psi_a: PureState,
    pub psi_b: PureState,
    pub overlap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpistemicityVerdict {
    pub schema: String,
    pub model: String,
    pub d: usize,
    pub n_states: usize,
    pub threshold: f64,
    pub max_overlap: f64,
    pub verdict: Epistemicity,
    pub witness: Option<WitnessPair>,
}

/// Prepares every state and reports the maximal pairwise support overlap,
/// classifying the model as psi-epistemic on this set iff some overlap
/// exceeds `threshold`.
pub fn classify_epistemicity(
    model: &Model,
    states: &[PureState],
    threshold: f64,
) -> Result<EpistemicityVerdict> {
    if states.len() < 2 {
        return Err(Error::NotEnoughStates { min: 2, got: states.len() });
    }
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::InvalidFidelity(threshold));
    }
    let prepared: Vec<EpistemicState> = states
        .iter()
        .map(|psi| model.prepare(psi))
        .collect::<Result<Vec<_>>>()?;
    let mut max_overlap = 0.0;
    let mut witness = None;
    for i in 0..prepared.len() {
        for j in (i + 1)..prepared.len() {
            let overlap = overlap_measure(&prepared[i], &prepared[j])?;
            if overlap > max_overlap {
                max_overlap = overlap;
                witness = Some(WitnessPair {
                    i,
                    j,
                    psi_a: states[i].clone(),
                    psi_b: states[j].clone(),
                    overlap,
                });
            }
        }
    }
    let verdict = if max_overlap > threshold {
        Epistemicity::PsiEpistemic
    } else {
        Epistemicity::PsiOntic
    };
    if verdict == Epistemicity::PsiOntic {
        witness = None;
    }
    Ok(EpistemicityVerdict {
        schema: "epistemicity-verdict/v1".to_string(),
        model: model.name().to_string(),
        d: model.d(),
        n_states: states.len(),
        threshold,
        max_overlap,
        verdict,
        witness,
    })
}

/// Convenience: a random measurement in this model's layout.
pub fn random_ordered_measurement(
    model: &Model,
    rng: &mut ChaCha8Rng,
) -> Result<OrderedMeasurement> {
    model.order_measurement(random_basis(model.d(), rng)?)
}

/// Convenience: a fresh measurement for a bare anchor, outside any model.
pub fn measurement_for_anchor(
    anchor: &PureState,
    rng: &mut ChaCha8Rng,
) -> Result<OrderedMeasurement> {
    order_for_anchor(random_basis(anchor.dim(), rng)?, anchor.clone())
}
