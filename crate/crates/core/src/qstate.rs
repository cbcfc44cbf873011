//! Hilbert-space primitives: pure states, anchor-ordered projective
//! measurements, Born probabilities, Haar-uniform sampling, and the Bloch
//! parameterization for qubits.
//!
//! All tolerances used for validating algebraic identities live here and are
//! reused across the crate.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Tolerance for algebraic identities checked on inputs: normalization,
/// orthogonality, ordering ties.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Tolerance for identities degraded by accumulated arithmetic: probability
/// sums, mixture weights, round trips through serialization.
pub const ACCUMULATED_TOL: f64 = 1e-10;

/// Amplitudes below this magnitude are treated as zero when fixing the
/// global phase.
const PHASE_EPS: f64 = 1e-12;

/// A normalized pure state of a `d`-dimensional system.
///
/// The amplitude vector always has unit norm within [`ALGEBRAIC_TOL`].
/// Global phase is physically irrelevant; it is canonicalized (first
/// non-negligible amplitude real and positive) on serialization and by
/// [`PureState::canonicalized`].
#[derive(Debug, Clone)]
pub struct PureState {
    amps: Vec<Complex64>,
}

impl PureState {
    /// Wraps an amplitude vector that is already normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amps })
    }

    /// Normalizes an arbitrary non-zero amplitude vector.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || norm_sq < 1e-300 {
            return Err(Error::NotNormalized { norm_sq });
        }
        let norm = norm_sq.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    /// The computational basis state `|k>` in dimension `d`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        if k >= d {
            return Err(Error::BasisIndexOutOfRange { j: k, d });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); d];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// The inner product `<self|other>`.
    #[inline]
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// The fidelity `|<self|other>|^2`.
    #[inline]
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Whether two states are equal up to global phase.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.fidelity(other) >= 1.0 - ALGEBRAIC_TOL
    }

    /// The same ray with the first non-negligible amplitude made real and
    /// positive.
    pub fn canonicalized(&self) -> Self {
        let Some(first) = self.amps.iter().find(|a| a.norm() > PHASE_EPS) else {
            return self.clone();
        };
        let phase = first / first.norm();
        let amps = self.amps.iter().map(|a| a / phase).collect();
        Self { amps }
    }
}

#[derive(Serialize, Deserialize)]
struct StateWire {
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let canon = self.canonicalized();
        let wire = StateWire {
            d: canon.dim(),
            re: canon.amps.iter().map(|a| a.re).collect(),
            im: canon.amps.iter().map(|a| a.im).collect(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = StateWire::deserialize(deserializer)?;
        if wire.re.len() != wire.d || wire.im.len() != wire.d {
            return Err(D::Error::custom(format!(
                "amplitude arrays have lengths {}/{} for d = {}",
                wire.re.len(),
                wire.im.len(),
                wire.d
            )));
        }
        let amps: Vec<Complex64> = wire
            .re
            .iter()
            .zip(&wire.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        // Accept mild rounding from external producers, reject junk.
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-6 {
            return Err(D::Error::custom(format!(
                "state squared norm {norm_sq} too far from 1"
            )));
        }
        PureState::normalized(amps).map_err(D::Error::custom)
    }
}

/// A complete projective measurement with outcomes laid out in a canonical
/// order: non-increasing fidelity to an anchor state, ties broken by input
/// position.
///
/// The first ordered outcome always satisfies `|<phi_0|anchor>|^2 >= 1/d`,
/// since the `d` fidelities sum to 1.
#[derive(Debug, Clone)]
pub struct OrderedMeasurement {
    outcomes: Vec<PureState>,
    anchor: PureState,
}

impl OrderedMeasurement {
    pub fn d(&self) -> usize {
        self.anchor.dim()
    }

    pub fn outcomes(&self) -> &[PureState] {
        &self.outcomes
    }

    pub fn outcome(&self, k: usize) -> &PureState {
        &self.outcomes[k]
    }

    pub fn anchor(&self) -> &PureState {
        &self.anchor
    }
}

#[derive(Serialize, Deserialize)]
struct MeasurementWire {
    d: usize,
    anchor: PureState,
    outcomes: Vec<PureState>,
}

impl Serialize for OrderedMeasurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = MeasurementWire {
            d: self.d(),
            anchor: self.anchor.clone(),
            outcomes: self.outcomes.clone(),
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrderedMeasurement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MeasurementWire::deserialize(deserializer)?;
        if wire.anchor.dim() != wire.d {
            return Err(D::Error::custom(format!(
                "anchor dimension {} does not match d = {}",
                wire.anchor.dim(),
                wire.d
            )));
        }
        order_for_anchor(wire.outcomes, wire.anchor).map_err(D::Error::custom)
    }
}

/// Validates that `states` form an orthonormal set within [`ALGEBRAIC_TOL`].
pub(crate) fn validate_orthonormal(states: &[PureState]) -> Result<()> {
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate().skip(i + 1) {
            let overlap = a.fidelity(b);
            if overlap > ALGEBRAIC_TOL {
                return Err(Error::NotOrthogonal { i, j, overlap });
            }
        }
    }
    Ok(())
}

/// Indices of `outcomes` sorted by non-increasing fidelity to `anchor`.
///
/// Runs of fidelities whose consecutive gaps are within [`ALGEBRAIC_TOL`]
/// count as ties and fall back to input order, so the permutation is stable
/// under reshuffling of exactly degenerate outcomes.
pub(crate) fn anchor_order_indices(outcomes: &[PureState], anchor: &PureState) -> Vec<usize> {
    let weights: Vec<f64> = outcomes.iter().map(|s| s.fidelity(anchor)).collect();
    let mut idx: Vec<usize> = (0..outcomes.len()).collect();
    idx.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).expect("finite weights"));
    let mut run = 0;
    while run < idx.len() {
        let mut end = run + 1;
        while end < idx.len() && weights[idx[end - 1]] - weights[idx[end]] <= ALGEBRAIC_TOL {
            end += 1;
        }
        idx[run..end].sort_unstable();
        run = end;
    }
    idx
}

/// Builds an [`OrderedMeasurement`] from an orthonormal basis and an anchor,
/// sorting outcomes by non-increasing fidelity to the anchor.
///
/// Reordering an already ordered measurement with the same anchor is the
/// identity.
pub fn order_for_anchor(basis: Vec<PureState>, anchor: PureState) -> Result<OrderedMeasurement> {
    let d = anchor.dim();
    if basis.len() != d {
        return Err(Error::IncompleteBasis { d, got: basis.len() });
    }
    for s in &basis {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    validate_orthonormal(&basis)?;
    let order = anchor_order_indices(&basis, &anchor);
    let mut slots: Vec<Option<PureState>> = basis.into_iter().map(Some).collect();
    let outcomes = order
        .into_iter()
        .map(|i| slots[i].take().expect("permutation visits each index once"))
        .collect();
    Ok(OrderedMeasurement { outcomes, anchor })
}

fn gaussian_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Samples a Haar-uniform pure state: a complex Gaussian vector, normalized.
pub fn haar_random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<PureState> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { min: 1, got: 0 });
    }
    loop {
        if let Ok(state) = PureState::normalized(gaussian_vec(d, rng)) {
            return Ok(state);
        }
    }
}

/// Samples a Haar-uniform orthonormal basis via modified Gram-Schmidt on
/// independent Gaussian columns, with one re-orthogonalization pass.
pub fn random_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<PureState>> {
    if d == 0 {
        return Err(Error::DimensionTooSmall { min: 1, got: 0 });
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vec(d, rng);
        for _ in 0..2 {
            for prev in &cols {
                let proj: Complex64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-16 {
            continue;
        }
        let norm = norm_sq.sqrt();
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    cols.into_iter().map(PureState::new).collect()
}

/// Samples a direction with exact fidelity `f` to `anchor`, uniform over the
/// sphere of such directions: `sqrt(f)|anchor> + sqrt(1-f)|w>` with `|w>`
/// Haar-uniform in the orthogonal complement of the anchor.
pub fn direction_at_fidelity<R: Rng + ?Sized>(
    anchor: &PureState,
    f: f64,
    rng: &mut R,
) -> Result<PureState> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidFidelity(f));
    }
    let d = anchor.dim();
    if d == 1 || f == 1.0 {
        if f < 1.0 - ALGEBRAIC_TOL {
            return Err(Error::DimensionTooSmall { min: 2, got: d });
        }
        return Ok(anchor.clone());
    }
    let w = loop {
        let mut v = gaussian_vec(d, rng);
        let proj: Complex64 = anchor
            .amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, x)| a.conj() * x)
            .sum();
        for (x, a) in v.iter_mut().zip(anchor.amplitudes()) {
            *x -= proj * a;
        }
        let norm_sq: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq > 1e-16 {
            let norm = norm_sq.sqrt();
            for x in &mut v {
                *x /= norm;
            }
            break v;
        }
    };
    let (cf, cw) = (f.sqrt(), (1.0 - f).sqrt());
    let amps = anchor
        .amplitudes()
        .iter()
        .zip(&w)
        .map(|(a, x)| cf * a + cw * x)
        .collect();
    PureState::normalized(amps)
}

/// Born probabilities of `psi` under the ordered measurement:
/// `p_k = |<phi_k|psi>|^2`. Completeness keeps the sum at 1 within
/// [`ACCUMULATED_TOL`].
pub fn born_probabilities(psi: &PureState, meas: &OrderedMeasurement) -> Result<Vec<f64>> {
    if psi.dim() != meas.d() {
        return Err(Error::DimensionMismatch {
            expected: meas.d(),
            got: psi.dim(),
        });
    }
    Ok(meas.outcomes.iter().map(|phi| phi.fidelity(psi)).collect())
}

/// Bloch-sphere coordinates of a qubit ray: polar angle from `|0>` in
/// `[0, pi]` and azimuth in `[0, 2pi)`. Azimuth is 0 at the poles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BlochVector {
    pub polar: f64,
    pub azimuth: f64,
}

/// Maps a qubit state to Bloch coordinates.
pub fn bloch_from_state(psi: &PureState) -> Result<BlochVector> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi.dim(),
        });
    }
    let canon = psi.canonicalized();
    let a0 = canon.amps[0];
    let a1 = canon.amps[1];
    let polar = 2.0 * a1.norm().atan2(a0.re);
    let azimuth = if a1.norm() > PHASE_EPS && a0.norm() > PHASE_EPS {
        let arg = a1.arg();
        if arg < 0.0 {
            arg + std::f64::consts::TAU
        } else {
            arg
        }
    } else {
        0.0
    };
    Ok(BlochVector { polar, azimuth })
}

/// Maps Bloch coordinates to the qubit state
/// `cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>`.
pub fn state_from_bloch(b: &BlochVector) -> Result<PureState> {
    if !b.polar.is_finite() || !(0.0..=std::f64::consts::PI).contains(&b.polar) {
        return Err(Error::InvalidPolarAngle(b.polar));
    }
    if !b.azimuth.is_finite() {
        return Err(Error::InvalidFidelity(b.azimuth));
    }
    let az = b.azimuth.rem_euclid(std::f64::consts::TAU);
    let half = b.polar / 2.0;
    let amps = vec![
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), az),
    ];
    PureState::normalized(amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn plus_state() -> PureState {
        PureState::new(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    fn minus_state() -> PureState {
        PureState::new(vec![
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    fn computational_measurement(d: usize) -> OrderedMeasurement {
        let basis = (0..d).map(|k| PureState::basis_state(d, k).unwrap()).collect();
        order_for_anchor(basis, PureState::basis_state(d, 0).unwrap()).unwrap()
    }

    /// One-sample Kolmogorov-Smirnov statistic.
    fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = cdf(x);
                (c - i as f64 / n).abs().max((c - (i as f64 + 1.0) / n).abs())
            })
            .fold(0.0, f64::max)
    }

    /// CDF of the fidelity of a Haar-uniform state to any fixed state.
    fn haar_fidelity_cdf(f: f64, d: usize) -> f64 {
        1.0 - (1.0 - f).powi(d as i32 - 1)
    }

    #[test]
    fn new_rejects_unnormalized() {
        let r = PureState::new(vec![Complex64::new(0.9, 0.0), Complex64::new(0.1, 0.0)]);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
        assert!(PureState::new(vec![]).is_err());
    }

    #[test]
    fn normalized_rescales() {
        let s = PureState::normalized(vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)])
            .unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < ALGEBRAIC_TOL);
        assert!((s.amplitudes()[1].re - 0.8).abs() < ALGEBRAIC_TOL);
        assert!(PureState::normalized(vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn basis_state_layout() {
        let s = PureState::basis_state(3, 1).unwrap();
        assert_eq!(s.dim(), 3);
        assert!((s.amplitudes()[1].re - 1.0).abs() < ALGEBRAIC_TOL);
        assert!(PureState::basis_state(3, 3).is_err());
        assert!(PureState::basis_state(0, 0).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let zero = PureState::basis_state(2, 0).unwrap();
        let plus = plus_state();
        assert!((zero.inner(&plus).re - FRAC_1_SQRT_2).abs() < ALGEBRAIC_TOL);
        assert!((zero.fidelity(&plus) - 0.5).abs() < ALGEBRAIC_TOL);
        assert!((plus.fidelity(&minus_state())).abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn canonicalization_fixes_global_phase() {
        let phase = Complex64::from_polar(1.0, 1.234);
        let amps: Vec<Complex64> = plus_state().amplitudes().iter().map(|a| a * phase).collect();
        let rotated = PureState::new(amps).unwrap();
        assert!(rotated.approx_eq(&plus_state()));
        let canon = rotated.canonicalized();
        assert!(canon.amplitudes()[0].im.abs() < ALGEBRAIC_TOL);
        assert!(canon.amplitudes()[0].re > 0.0);
    }

    #[test]
    fn state_serialization_round_trip_is_exact() {
        let mut r = rng(11);
        for d in [1, 2, 3, 4, 8] {
            for _ in 0..20 {
                let s = haar_random(d, &mut r).unwrap();
                let json = serde_json::to_string(&s).unwrap();
                let back: PureState = serde_json::from_str(&json).unwrap();
                assert!(s.fidelity(&back) >= 1.0 - ACCUMULATED_TOL);
            }
        }
    }

    #[test]
    fn state_deserialization_rejects_malformed() {
        assert!(serde_json::from_str::<PureState>(r#"{"d":2,"re":[1.0],"im":[0.0,0.0]}"#).is_err());
        assert!(serde_json::from_str::<PureState>(
            r#"{"d":2,"re":[0.9,0.0],"im":[0.0,0.0]}"#
        )
        .is_err());
        // Mild rounding is renormalized away.
        let s: PureState =
            serde_json::from_str(r#"{"d":2,"re":[1.0000001,0.0],"im":[0.0,0.0]}"#).unwrap();
        assert!(s.approx_eq(&PureState::basis_state(2, 0).unwrap()));
    }

    #[test]
    fn born_on_eigenstate_is_deterministic() {
        let meas = computational_measurement(3);
        let p = born_probabilities(&PureState::basis_state(3, 0).unwrap(), &meas).unwrap();
        assert!((p[0] - 1.0).abs() < ALGEBRAIC_TOL);
        assert!(p[1].abs() < ALGEBRAIC_TOL && p[2].abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn born_qubit_angles() {
        let theta = 0.7_f64;
        let psi = state_from_bloch(&BlochVector { polar: theta, azimuth: 0.3 }).unwrap();
        let p = born_probabilities(&psi, &computational_measurement(2)).unwrap();
        assert!((p[0] - (theta / 2.0).cos().powi(2)).abs() < ALGEBRAIC_TOL);
        assert!((p[1] - (theta / 2.0).sin().powi(2)).abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn born_sums_to_one_on_random_inputs() {
        let mut r = rng(17);
        for d in [2, 3, 4, 8] {
            for _ in 0..50 {
                let psi = haar_random(d, &mut r).unwrap();
                let anchor = haar_random(d, &mut r).unwrap();
                let meas = order_for_anchor(random_basis(d, &mut r).unwrap(), anchor).unwrap();
                let p = born_probabilities(&psi, &meas).unwrap();
                let sum: f64 = p.iter().sum();
                assert!((sum - 1.0).abs() < ACCUMULATED_TOL);
                assert!(p.iter().all(|&x| (-ALGEBRAIC_TOL..=1.0 + ALGEBRAIC_TOL).contains(&x)));
            }
        }
    }

    #[test]
    fn born_rejects_dimension_mismatch() {
        let psi = PureState::basis_state(3, 0).unwrap();
        assert!(matches!(
            born_probabilities(&psi, &computational_measurement(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ordering_is_non_increasing_and_anchored() {
        let mut r = rng(23);
        for d in [2, 3, 4, 8] {
            for _ in 0..50 {
                let anchor = haar_random(d, &mut r).unwrap();
                let meas =
                    order_for_anchor(random_basis(d, &mut r).unwrap(), anchor.clone()).unwrap();
                let w: Vec<f64> = meas.outcomes().iter().map(|s| s.fidelity(&anchor)).collect();
                for k in 1..d {
                    assert!(w[k - 1] >= w[k] - ALGEBRAIC_TOL);
                }
                assert!(w[0] >= 1.0 / d as f64 - ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn ordering_is_idempotent() {
        let mut r = rng(29);
        let anchor = haar_random(4, &mut r).unwrap();
        let meas = order_for_anchor(random_basis(4, &mut r).unwrap(), anchor.clone()).unwrap();
        let again = order_for_anchor(meas.outcomes().to_vec(), anchor).unwrap();
        for (a, b) in meas.outcomes().iter().zip(again.outcomes()) {
            assert!(a.approx_eq(b));
        }
    }

    #[test]
    fn ordering_breaks_ties_by_input_position() {
        let anchor = PureState::basis_state(2, 0).unwrap();
        let meas = order_for_anchor(vec![minus_state(), plus_state()], anchor.clone()).unwrap();
        assert!(meas.outcome(0).approx_eq(&minus_state()));
        assert!(meas.outcome(1).approx_eq(&plus_state()));
        let meas = order_for_anchor(vec![plus_state(), minus_state()], anchor).unwrap();
        assert!(meas.outcome(0).approx_eq(&plus_state()));
    }

    #[test]
    fn ordering_rejects_bad_bases() {
        let anchor = PureState::basis_state(2, 0).unwrap();
        let r = order_for_anchor(vec![plus_state()], anchor.clone());
        assert!(matches!(r, Err(Error::IncompleteBasis { .. })));
        let r = order_for_anchor(vec![plus_state(), plus_state()], anchor);
        assert!(matches!(r, Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn measurement_serialization_round_trips() {
        let mut r = rng(31);
        let anchor = haar_random(3, &mut r).unwrap();
        let meas = order_for_anchor(random_basis(3, &mut r).unwrap(), anchor).unwrap();
        let json = serde_json::to_string(&meas).unwrap();
        let back: OrderedMeasurement = serde_json::from_str(&json).unwrap();
        assert_eq!(back.d(), 3);
        for (a, b) in meas.outcomes().iter().zip(back.outcomes()) {
            assert!(a.fidelity(b) >= 1.0 - ACCUMULATED_TOL);
        }
    }

    #[test]
    fn random_basis_is_orthonormal() {
        let mut r = rng(37);
        for d in [2, 3, 4, 8] {
            for _ in 0..20 {
                let basis = random_basis(d, &mut r).unwrap();
                assert_eq!(basis.len(), d);
                validate_orthonormal(&basis).unwrap();
            }
        }
    }

    #[test]
    fn haar_fidelity_matches_analytic_cdf() {
        let d = 4;
        let n = 100_000;
        let mut r = rng(41);
        let target = PureState::basis_state(d, 0).unwrap();
        let mut fids: Vec<f64> = (0..n)
            .map(|_| haar_random(d, &mut r).unwrap().fidelity(&target))
            .collect();
        let ks = ks_statistic(&mut fids, |f| haar_fidelity_cdf(f, d));
        assert!(ks < 0.01, "KS statistic {ks} too large");
    }

    #[test]
    fn haar_matches_gram_schmidt_oracle() {
        // Independent sampler: the fully orthogonalized last column of a
        // Gram-Schmidt factorization is also Haar-uniform.
        let d = 4;
        let n = 20_000;
        let mut r = rng(43);
        let target = haar_random(d, &mut r).unwrap();
        let mut fids: Vec<f64> = (0..n)
            .map(|_| {
                let basis = random_basis(d, &mut r).unwrap();
                basis[d - 1].fidelity(&target)
            })
            .collect();
        let ks = ks_statistic(&mut fids, |f| haar_fidelity_cdf(f, d));
        assert!(ks < 0.015, "KS statistic {ks} too large");
    }

    #[test]
    fn haar_mean_fidelity_is_one_over_d() {
        let mut r = rng(47);
        for d in [2, 5] {
            let target = haar_random(d, &mut r).unwrap();
            let n = 20_000;
            let mean: f64 = (0..n)
                .map(|_| haar_random(d, &mut r).unwrap().fidelity(&target))
                .sum::<f64>()
                / n as f64;
            assert!((mean - 1.0 / d as f64).abs() < 0.01);
        }
    }

    #[test]
    fn direction_at_fidelity_hits_target() {
        let mut r = rng(53);
        for d in [2, 3, 8] {
            let anchor = haar_random(d, &mut r).unwrap();
            for &f in &[0.0, 0.3, 0.875, 1.0] {
                let dir = direction_at_fidelity(&anchor, f, &mut r).unwrap();
                assert!((dir.fidelity(&anchor) - f).abs() < ALGEBRAIC_TOL);
            }
        }
        let anchor = PureState::basis_state(1, 0).unwrap();
        assert!(direction_at_fidelity(&anchor, 0.5, &mut r).is_err());
        assert!(direction_at_fidelity(&anchor, 1.0, &mut r).is_ok());
    }

    #[test]
    fn bloch_known_points() {
        let north = bloch_from_state(&PureState::basis_state(2, 0).unwrap()).unwrap();
        assert!(north.polar.abs() < ACCUMULATED_TOL);
        let south = bloch_from_state(&PureState::basis_state(2, 1).unwrap()).unwrap();
        assert!((south.polar - PI).abs() < ACCUMULATED_TOL);
        assert!(south.azimuth.abs() < ACCUMULATED_TOL);
        let plus = bloch_from_state(&plus_state()).unwrap();
        assert!((plus.polar - PI / 2.0).abs() < ACCUMULATED_TOL);
        assert!(plus.azimuth.abs() < ACCUMULATED_TOL);
    }

    #[test]
    fn bloch_round_trips() {
        let mut r = rng(59);
        for _ in 0..200 {
            let psi = haar_random(2, &mut r).unwrap();
            let b = bloch_from_state(&psi).unwrap();
            assert!((0.0..=PI).contains(&b.polar));
            assert!((0.0..std::f64::consts::TAU).contains(&b.azimuth));
            let back = state_from_bloch(&b).unwrap();
            assert!(psi.fidelity(&back) >= 1.0 - ACCUMULATED_TOL);
        }
        assert!(state_from_bloch(&BlochVector { polar: -0.1, azimuth: 0.0 }).is_err());
        assert!(state_from_bloch(&BlochVector { polar: 4.0, azimuth: 0.0 }).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_serde_round_trip(seed in any::<u64>(), d in 1_usize..=8) {
            let mut r = rng(seed);
            let s = haar_random(d, &mut r).unwrap();
            let json = serde_json::to_string(&s).unwrap();
            let back: PureState = serde_json::from_str(&json).unwrap();
            prop_assert!(s.fidelity(&back) >= 1.0 - ACCUMULATED_TOL);
        }

        #[test]
        fn prop_ordering_first_weight_dominates(seed in any::<u64>(), d in 2_usize..=8) {
            let mut r = rng(seed);
            let anchor = haar_random(d, &mut r).unwrap();
            let meas = order_for_anchor(random_basis(d, &mut r).unwrap(), anchor.clone()).unwrap();
            prop_assert!(meas.outcome(0).fidelity(&anchor) >= 1.0 / d as f64 - ALGEBRAIC_TOL);
        }
    }
}
