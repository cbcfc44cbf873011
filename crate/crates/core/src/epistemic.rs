//! The epistemic model variants: cap regions, the floor function `z`, and
//! modified preparations with mutually overlapping supports.
//!
//! For an anchor ray `|a>` in dimension `d`, define over directions `lambda`
//!
//! ```text
//! z(lambda) = inf { |<phi|lambda>|^2 : |<phi|a>|^2 >= 1/d }
//! ```
//!
//! the worst-case weight any measurement's anchor-favoured first outcome can
//! give to `lambda`. The infimum is positive exactly on the cap
//! `|<lambda|a>|^2 > (d-1)/d`, where it takes the closed form
//!
//! ```text
//! z = (sqrt(F) - sqrt((d-1)(1-F)))^2 / d,    F = |<lambda|a>|^2.
//! ```
//!
//! To see this, restrict to the span of `|a>` and `|lambda>` (any component
//! of `|phi>` outside the span is wasted weight), write
//! `|phi> = cos(t)|a> + e^{i b} sin(t)|u>` with the constraint
//! `cos^2(t) >= 1/d`, and minimize `|<phi|lambda>|^2`; the minimum sits at
//! the constraint boundary with the relative phase opposing, giving
//! `(sqrt(F/d) - sqrt((1-F)(d-1)/d))^2`, positive iff `F > (d-1)/d`.
//! [`z_oracle`] re-derives the value numerically without the formula; the
//! closed form is only trusted where the oracle confirms it.
//!
//! A cap region pairs those directions with the slab `x < z(lambda)`, where
//! every anchor-ordered measurement is answered with its first outcome no
//! matter the direction, so a region-valued preparation weight never
//! disturbs outcome statistics. The modified preparation of an in-cap state
//! `|psi>` moves the sub-threshold part of its delta line into the region:
//! weight `z(psi)` spread over the region, weight `1 - z(psi)` on the
//! remaining line. Any two in-cap states then share the region: their
//! supports overlap with mass `min(z_1, z_2)`.

use rand::Rng;
use serde::Serialize;

use crate::ontology::{
    EpistemicState, OnticState, RegionDescriptor, RegionDistribution, SupportComponent,
};
use crate::qstate::{
    anchor_order_indices, direction_at_fidelity, validate_orthonormal, OrderedMeasurement,
    PureState, ALGEBRAIC_TOL,
};
use crate::{Error, Result};

/// Fidelity threshold of the cap around an anchor in dimension `d`.
#[inline]
pub fn cap_threshold(d: usize) -> f64 {
    (d as f64 - 1.0) / d as f64
}

/// The floor function `z` as a function of anchor fidelity `f` alone.
///
/// Zero at and below the cap threshold `(d-1)/d`, strictly increasing above
/// it, and `1/d` at `f = 1`.
#[inline]
pub fn z_from_fidelity(f: f64, d: usize) -> f64 {
    let df = d as f64;
    if f * df <= df - 1.0 {
        return 0.0;
    }
    let rest = ((df - 1.0) * (1.0 - f).max(0.0)).sqrt();
    let g = f.sqrt() - rest;
    g * g / df
}

/// A floor value together with the anchor fidelity it was computed at.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZValue {
    pub value: f64,
    pub fidelity: f64,
}

/// The closed-form floor `z(chi)` for an anchor.
pub fn z_closed_form(chi: &PureState, anchor: &PureState) -> Result<ZValue> {
    if chi.dim() != anchor.dim() {
        return Err(Error::DimensionMismatch {
            expected: anchor.dim(),
            got: chi.dim(),
        });
    }
    let fidelity = anchor.fidelity(chi);
    Ok(ZValue {
        value: z_from_fidelity(fidelity, chi.dim()),
        fidelity,
    })
}

/// Result of the direct numerical minimization behind [`z_oracle`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZOracleResult {
    /// Best (lowest) feasible objective found: the oracle estimate of `z`.
    pub value: f64,
    /// Anchor fidelity of the probed direction.
    pub fidelity: f64,
    /// Minimum over the anchor-`chi` span search.
    pub span_min: f64,
    /// Minimum over full-space rejection-filtered Haar candidates, when any
    /// candidate satisfied the constraint.
    pub full_space_min: Option<f64>,
}

const GOLDEN_RATIO_CONJ: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal slice.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - GOLDEN_RATIO_CONJ * (b - a);
    let mut d = a + GOLDEN_RATIO_CONJ * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN_RATIO_CONJ * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN_RATIO_CONJ * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Numerically minimizes `|<phi|chi>|^2` over feasible first outcomes
/// `|<phi|anchor>|^2 >= 1/d`, without using the closed form.
///
/// Searches a grid over states in the anchor-`chi` span (where the minimizer
/// must lie), refines by coordinate descent, and cross-checks against
/// rejection-filtered Haar-random candidates from the full space. Requires
/// `budget >= 1000` objective evaluations.
pub fn z_oracle<R: Rng + ?Sized>(
    chi: &PureState,
    anchor: &PureState,
    budget: usize,
    rng: &mut R,
) -> Result<ZOracleResult> {
    if chi.dim() != anchor.dim() {
        return Err(Error::DimensionMismatch {
            expected: anchor.dim(),
            got: chi.dim(),
        });
    }
    if budget < 1000 {
        return Err(Error::BudgetTooSmall { min: 1000, got: budget });
    }
    let d = chi.dim();
    let fidelity = anchor.fidelity(chi);
    if d == 1 {
        // The only feasible phi is the anchor itself.
        return Ok(ZOracleResult {
            value: 1.0,
            fidelity,
            span_min: 1.0,
            full_space_min: Some(1.0),
        });
    }

    // Unit vector u orthogonal to the anchor: along the residual of chi when
    // it has one, otherwise along the residual of the least-aligned
    // computational axis.
    let u = {
        let residual_of = |seed: &PureState| -> Option<PureState> {
            let proj = anchor.inner(seed);
            let amps: Vec<_> = seed
                .amplitudes()
                .iter()
                .zip(anchor.amplitudes())
                .map(|(s, a)| s - proj * a)
                .collect();
            PureState::normalized(amps).ok()
        };
        match (fidelity < 1.0 - 1e-14).then(|| residual_of(chi)).flatten() {
            Some(u) => u,
            None => {
                let k = (0..d)
                    .min_by(|&i, &j| {
                        let wi = anchor.amplitudes()[i].norm_sqr();
                        let wj = anchor.amplitudes()[j].norm_sqr();
                        wi.partial_cmp(&wj).expect("finite amplitudes")
                    })
                    .expect("d >= 2");
                residual_of(&PureState::basis_state(d, k).expect("k < d"))
                    .expect("least-aligned axis has nonzero residual")
            }
        }
    };

    // phi(t, b) = cos(t) anchor + e^{ib} sin(t) u; feasibility is t <= t_max.
    let t_max = (1.0 / (d as f64).sqrt()).acos();
    let eval = |t: f64, b: f64| -> f64 {
        let (ct, st) = (t.cos(), t.sin());
        let phase = num_complex::Complex64::from_polar(st, b);
        let amps: Vec<_> = anchor
            .amplitudes()
            .iter()
            .zip(u.amplitudes())
            .map(|(a, w)| ct * a + phase * w)
            .collect();
        let phi = PureState::normalized(amps).expect("unit by construction");
        phi.fidelity(chi)
    };

    let span_budget = budget * 3 / 5;
    let n_beta = 24;
    let n_t = (span_budget / n_beta).max(8);
    let tau = std::f64::consts::TAU;
    let mut best = (0.0_f64, 0.0_f64, fidelity); // t = 0 is the anchor itself
    for i in 0..=n_t {
        let t = t_max * i as f64 / n_t as f64;
        for j in 0..n_beta {
            let b = tau * j as f64 / n_beta as f64;
            let v = eval(t, b);
            if v < best.2 {
                best = (t, b, v);
            }
        }
    }
    let (mut t, mut b, mut span_min) = best;
    let dt = t_max / n_t as f64;
    let db = tau / n_beta as f64;
    for _ in 0..3 {
        let (tb, vb) = golden_min(|tt| eval(tt, b), (t - dt).max(0.0), (t + dt).min(t_max), 60);
        t = tb;
        let (bb, vbb) = golden_min(|bt| eval(t, bt), b - db, b + db, 60);
        b = bb;
        span_min = vb.min(vbb).min(span_min);
    }

    let feasibility_floor = 1.0 / d as f64;
    let mut full_space_min = None;
    for _ in 0..budget.saturating_sub(span_budget + 400) {
        let cand = crate::qstate::haar_random(d, rng)?;
        if cand.fidelity(anchor) >= feasibility_floor {
            let v = cand.fidelity(chi);
            if full_space_min.is_none_or(|m| v < m) {
                full_space_min = Some(v);
            }
        }
    }

    let value = full_space_min.map_or(span_min, |m: f64| m.min(span_min));
    Ok(ZOracleResult { value, fidelity, span_min, full_space_min })
}

/// An epistemic model variant: which regions are carved out of the ontic
/// space and how preparations use them.
#[derive(Debug, Clone)]
pub enum ModelVariant {
    /// Two qubit regions, one per Bloch hemisphere pole.
    QubitHemisphere,
    /// One region around a preferred anchor state.
    GeneralCap { anchor: PureState },
    /// One region around each element of a preferred basis.
    BasisCap { basis: Vec<PureState> },
}

impl ModelVariant {
    pub fn qubit_hemisphere() -> Self {
        Self::QubitHemisphere
    }

    pub fn general_cap(anchor: PureState) -> Result<Self> {
        if anchor.dim() < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: anchor.dim() });
        }
        Ok(Self::GeneralCap { anchor })
    }

    pub fn basis_cap(basis: Vec<PureState>) -> Result<Self> {
        let d = basis.len();
        if d < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: d });
        }
        for s in &basis {
            if s.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
            }
        }
        validate_orthonormal(&basis)?;
        Ok(Self::BasisCap { basis })
    }

    pub fn d(&self) -> usize {
        match self {
            Self::QubitHemisphere => 2,
            Self::GeneralCap { anchor } => anchor.dim(),
            Self::BasisCap { basis } => basis.len(),
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            Self::QubitHemisphere => "qubit-hemisphere",
            Self::GeneralCap { .. } => "general-cap",
            Self::BasisCap { .. } => "basis-cap",
        }
    }

    /// The anchor used to order measurements for this variant.
    pub fn ordering_anchor(&self) -> PureState {
        match self {
            Self::QubitHemisphere => PureState::basis_state(2, 0).expect("d = 2"),
            Self::GeneralCap { anchor } => anchor.clone(),
            Self::BasisCap { basis } => basis[0].clone(),
        }
    }

    /// Every region this variant carves out of the ontic space.
    pub fn regions(&self) -> Vec<RegionDescriptor> {
        match self {
            Self::QubitHemisphere => {
                vec![RegionDescriptor::QubitCap0, RegionDescriptor::QubitCap1]
            }
            Self::GeneralCap { anchor } => {
                vec![RegionDescriptor::GeneralCap { anchor: anchor.clone() }]
            }
            Self::BasisCap { basis } => basis
                .iter()
                .enumerate()
                .map(|(index, anchor)| RegionDescriptor::BasisCap {
                    index,
                    anchor: anchor.clone(),
                })
                .collect(),
        }
    }
}

/// Anchor fidelity and slab height of `lambda` relative to a region.
///
/// Height is the distance of `x` from the slab's own edge of `[0, 1]`, so
/// membership is `fidelity > threshold && height < z(fidelity)` for every
/// region shape.
#[inline]
fn region_coords(lambda: &OnticState, region: &RegionDescriptor) -> (f64, f64) {
    let f = match region {
        RegionDescriptor::QubitCap0 => lambda.direction().amplitudes()[0].norm_sqr(),
        RegionDescriptor::QubitCap1 => lambda.direction().amplitudes()[1].norm_sqr(),
        RegionDescriptor::GeneralCap { anchor } | RegionDescriptor::BasisCap { anchor, .. } => {
            anchor.fidelity(lambda.direction())
        }
    };
    let height = if region.is_high_side() { 1.0 - lambda.x() } else { lambda.x() };
    (f, height)
}

/// Whether `lambda` lies inside a region.
pub fn in_region(lambda: &OnticState, region: &RegionDescriptor) -> bool {
    let d = region.d();
    if lambda.direction().dim() != d {
        return false;
    }
    let (f, height) = region_coords(lambda, region);
    f > cap_threshold(d) && height < z_from_fidelity(f, d)
}

/// Whether `lambda` lies in the support of a region component sampled under
/// `distribution` ([`RegionDistribution::HalfHeight`] occupies only the
/// lower half of each slab).
pub fn in_support(
    lambda: &OnticState,
    region: &RegionDescriptor,
    distribution: RegionDistribution,
) -> bool {
    let d = region.d();
    if lambda.direction().dim() != d {
        return false;
    }
    let (f, height) = region_coords(lambda, region);
    let cap = match distribution {
        RegionDistribution::Uniform => z_from_fidelity(f, d),
        RegionDistribution::HalfHeight => 0.5 * z_from_fidelity(f, d),
    };
    f > cap_threshold(d) && height < cap
}

/// The region of `variant` containing `lambda`, if any. Regions within one
/// variant are disjoint, so at most one matches.
pub fn containing_region(
    lambda: &OnticState,
    variant: &ModelVariant,
) -> Option<RegionDescriptor> {
    variant.regions().into_iter().find(|r| in_region(lambda, r))
}

/// The index of the basis element whose cap contains `direction`, if any.
/// Caps of orthonormal elements are mutually exclusive.
pub(crate) fn basis_cap_of(direction: &PureState, basis: &[PureState]) -> Option<usize> {
    let threshold = cap_threshold(basis.len());
    basis.iter().position(|b| b.fidelity(direction) > threshold)
}

/// The modified preparation of `|psi>` under an epistemic variant.
///
/// Out-of-cap states keep the full delta line. An in-cap state trades the
/// part of its line that lies inside its region for the same weight spread
/// over the whole region.
pub fn prepare(psi: &PureState, variant: &ModelVariant) -> Result<EpistemicState> {
    let d = variant.d();
    if psi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi.dim() });
    }
    let full_line = |psi: &PureState| {
        EpistemicState::new(
            d,
            vec![(1.0, SupportComponent::DeltaLine {
                center: psi.clone(),
                interval: [0.0, 1.0],
            })],
        )
    };
    let in_cap = |region: RegionDescriptor, z: f64| {
        let interval = if region.is_high_side() { [0.0, 1.0 - z] } else { [z, 1.0] };
        EpistemicState::new(
            d,
            vec![
                (1.0 - z, SupportComponent::DeltaLine { center: psi.clone(), interval }),
                (z, SupportComponent::RegionUniform {
                    region,
                    distribution: RegionDistribution::Uniform,
                }),
            ],
        )
    };
    match variant {
        ModelVariant::QubitHemisphere => {
            let f0 = psi.amplitudes()[0].norm_sqr();
            if f0 > 0.5 {
                in_cap(RegionDescriptor::QubitCap0, z_from_fidelity(f0, 2))
            } else if f0 < 0.5 {
                let f1 = psi.amplitudes()[1].norm_sqr();
                in_cap(RegionDescriptor::QubitCap1, z_from_fidelity(f1, 2))
            } else {
                full_line(psi)
            }
        }
        ModelVariant::GeneralCap { anchor } => {
            let z = z_from_fidelity(anchor.fidelity(psi), d);
            if z > 0.0 {
                in_cap(RegionDescriptor::GeneralCap { anchor: anchor.clone() }, z)
            } else {
                full_line(psi)
            }
        }
        ModelVariant::BasisCap { basis } => match basis_cap_of(psi, basis) {
            Some(index) => {
                let z = z_from_fidelity(basis[index].fidelity(psi), d);
                if z > 0.0 {
                    in_cap(
                        RegionDescriptor::BasisCap { index, anchor: basis[index].clone() },
                        z,
                    )
                } else {
                    full_line(psi)
                }
            }
            None => full_line(psi),
        },
    }
}

/// Draws an ontic state uniformly from a region (with respect to the
/// Haar-product measure), or from its half-height squeeze.
///
/// The fidelity marginal over the cap is proposed from the Haar conditional
/// `F = 1 - u^{1/(d-1)}/d` and accepted with probability `z(F) d`, which
/// weights directions by their slab height; `x` is then uniform on the slab.
pub fn sample_region<R: Rng + ?Sized>(
    region: &RegionDescriptor,
    distribution: RegionDistribution,
    rng: &mut R,
) -> OnticState {
    let d = region.d();
    let anchor = region.anchor_state();
    let exponent = 1.0 / (d as f64 - 1.0);
    loop {
        let u: f64 = rng.gen();
        let f = 1.0 - u.powf(exponent) / d as f64;
        let dir = direction_at_fidelity(&anchor, f, rng)
            .expect("cap fidelities are valid and d >= 2");
        let z = z_from_fidelity(anchor.fidelity(&dir), d);
        let accept: f64 = rng.gen();
        if accept < z * d as f64 {
            let mut height = rng.gen_range(0.0..z);
            if distribution == RegionDistribution::HalfHeight {
                height *= 0.5;
            }
            let x = if region.is_high_side() { 1.0 - height } else { height };
            return OnticState::new_unchecked(dir, x);
        }
    }
}

/// The outcome every ontic state of a region forces on an ordered
/// measurement.
///
/// Cap regions force the outcome ranked first by their own anchor; the two
/// qubit regions force outcomes 0 and 1 of `|0>`-anchored measurements.
/// Measurements ordered for a different anchor are rejected.
pub fn forced_outcome(region: &RegionDescriptor, meas: &OrderedMeasurement) -> Result<usize> {
    let d = region.d();
    if meas.d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: meas.d() });
    }
    match region {
        RegionDescriptor::QubitCap0 | RegionDescriptor::QubitCap1 => {
            let north = PureState::basis_state(2, 0).expect("d = 2");
            if !meas.anchor().approx_eq(&north) {
                return Err(Error::AnchorMismatch);
            }
            Ok(usize::from(region.is_high_side()))
        }
        RegionDescriptor::GeneralCap { anchor } => {
            if !meas.anchor().approx_eq(anchor) {
                return Err(Error::AnchorMismatch);
            }
            Ok(0)
        }
        RegionDescriptor::BasisCap { anchor, .. } => {
            Ok(anchor_order_indices(meas.outcomes(), anchor)[0])
        }
    }
}

/// Verifies the defining property of the floor: the first outcome of an
/// anchor-ordered measurement gives an in-cap direction at least `z` weight.
/// Vacuously true outside the cap.
pub fn outcome0_positivity_check(
    direction: &PureState,
    anchor: &PureState,
    meas: &OrderedMeasurement,
) -> Result<bool> {
    if direction.dim() != anchor.dim() || meas.d() != anchor.dim() {
        return Err(Error::DimensionMismatch {
            expected: anchor.dim(),
            got: if direction.dim() != anchor.dim() { direction.dim() } else { meas.d() },
        });
    }
    if !meas.anchor().approx_eq(anchor) {
        return Err(Error::AnchorMismatch);
    }
    let d = anchor.dim();
    let f = anchor.fidelity(direction);
    if f <= cap_threshold(d) {
        return Ok(true);
    }
    let z = z_from_fidelity(f, d);
    Ok(meas.outcome(0).fidelity(direction) >= z - ALGEBRAIC_TOL)
}
