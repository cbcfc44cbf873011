//! The ontic state space `CP^{d-1} x [0, 1]` and distributions over it.
//!
//! An epistemic state is a finite mixture of support components, each either
//! a delta line (all directional weight on one ray, uniform on an `x`
//! sub-interval) or a named region of the product space carved out by one of
//! the epistemic model variants. Components are symbolic, so overlaps
//! between epistemic states are computed exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qstate::{PureState, ACCUMULATED_TOL, ALGEBRAIC_TOL};
use crate::{Error, Result};

/// A single ontic state: a ray `|lambda>` and a coordinate `x in [0, 1]`.
#[derive(Debug, Clone)]
pub struct OnticState {
    direction: PureState,
    x: f64,
}

impl OnticState {
    pub fn new(direction: PureState, x: f64) -> Result<Self> {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            return Err(Error::XOutOfRange(x));
        }
        Ok(Self { direction, x })
    }

    #[inline]
    pub(crate) fn new_unchecked(direction: PureState, x: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&x));
        Self { direction, x }
    }

    #[inline]
    pub fn direction(&self) -> &PureState {
        &self.direction
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }
}

/// How `x` is distributed over a region's slab when the region is sampled.
///
/// `Uniform` is the canonical choice. `HalfHeight` squeezes all mass into
/// the lower half of the slab; any choice supported inside the region leaves
/// response statistics unchanged, since responses are constant there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionDistribution {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "half-height")]
    HalfHeight,
}

/// A named region of the ontic space with nonzero measure.
///
/// Every region is a cap-slab: directions within fidelity range of an anchor
/// ray, paired with the `x` slab below the height `z(lambda)` (mirrored to
/// the top of `[0, 1]` for `QubitCap1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum RegionDescriptor {
    /// Qubit region around `|0>`: `|<lambda|0>|^2 > 1/2`, `x < z(lambda)`.
    #[serde(rename = "qubit-cap-0")]
    QubitCap0,
    /// Qubit region around `|1>`: `|<lambda|1>|^2 > 1/2`, `x > 1 - z(lambda)`.
    #[serde(rename = "qubit-cap-1")]
    QubitCap1,
    /// Cap around an arbitrary anchor ray:
    /// `|<lambda|anchor>|^2 > (d-1)/d`, `x < z(lambda)`.
    #[serde(rename = "general-cap")]
    GeneralCap { anchor: PureState },
    /// Cap around element `index` of a preferred basis.
    #[serde(rename = "basis-cap")]
    BasisCap { index: usize, anchor: PureState },
}

impl RegionDescriptor {
    pub fn d(&self) -> usize {
        match self {
            Self::QubitCap0 | Self::QubitCap1 => 2,
            Self::GeneralCap { anchor } | Self::BasisCap { anchor, .. } => anchor.dim(),
        }
    }

    /// Short tag matching the serialized `variant` field.
    pub fn label(&self) -> &'static str {
        match self {
            Self::QubitCap0 => "qubit-cap-0",
            Self::QubitCap1 => "qubit-cap-1",
            Self::GeneralCap { .. } => "general-cap",
            Self::BasisCap { .. } => "basis-cap",
        }
    }

    /// The anchor ray the cap surrounds.
    pub fn anchor_state(&self) -> PureState {
        match self {
            Self::QubitCap0 => PureState::basis_state(2, 0).expect("d = 2"),
            Self::QubitCap1 => PureState::basis_state(2, 1).expect("d = 2"),
            Self::GeneralCap { anchor } | Self::BasisCap { anchor, .. } => anchor.clone(),
        }
    }

    /// Whether the slab hangs from the top of `[0, 1]` instead of the bottom.
    pub(crate) fn is_high_side(&self) -> bool {
        matches!(self, Self::QubitCap1)
    }

    /// Whether two descriptors name the same region.
    pub fn same_region(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::QubitCap0, Self::QubitCap0) | (Self::QubitCap1, Self::QubitCap1) => true,
            (Self::GeneralCap { anchor: a }, Self::GeneralCap { anchor: b }) => a.approx_eq(b),
            (
                Self::BasisCap { index: i, anchor: a },
                Self::BasisCap { index: j, anchor: b },
            ) => i == j && a.approx_eq(b),
            _ => false,
        }
    }
}

/// One weighted piece of an epistemic state's support.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SupportComponent {
    /// All directional weight on `center`, `x` uniform on `interval`.
    #[serde(rename = "delta")]
    DeltaLine { center: PureState, interval: [f64; 2] },
    /// Weight spread over a region, `x` distributed per `distribution`.
    #[serde(rename = "region")]
    RegionUniform {
        region: RegionDescriptor,
        distribution: RegionDistribution,
    },
}

impl SupportComponent {
    pub fn d(&self) -> usize {
        match self {
            Self::DeltaLine { center, .. } => center.dim(),
            Self::RegionUniform { region, .. } => region.d(),
        }
    }

    fn coincides_with(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Self::DeltaLine { center: c1, interval: i1 },
                Self::DeltaLine { center: c2, interval: i2 },
            ) => {
                c1.approx_eq(c2)
                    && (i1[0] - i2[0]).abs() <= ALGEBRAIC_TOL
                    && (i1[1] - i2[1]).abs() <= ALGEBRAIC_TOL
            }
            (
                Self::RegionUniform { region: r1, distribution: d1 },
                Self::RegionUniform { region: r2, distribution: d2 },
            ) => r1.same_region(r2) && d1 == d2,
            _ => false,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentWire {
    weight: f64,
    #[serde(flatten)]
    support: SupportComponent,
}

#[derive(Serialize, Deserialize)]
struct EpistemicWire {
    d: usize,
    components: Vec<ComponentWire>,
}

/// A probability distribution over the ontic space: a normalized mixture of
/// pairwise-distinct support components.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "EpistemicWire", into = "EpistemicWire")]
pub struct EpistemicState {
    d: usize,
    components: Vec<(f64, SupportComponent)>,
}

impl EpistemicState {
    pub fn new(d: usize, components: Vec<(f64, SupportComponent)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::DimensionTooSmall { min: 1, got: 0 });
        }
        if components.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut total = 0.0;
        for (w, comp) in &components {
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::InvalidWeights(format!("non-positive weight {w}")));
            }
            total += w;
            if comp.d() != d {
                return Err(Error::DimensionMismatch { expected: d, got: comp.d() });
            }
            if let SupportComponent::DeltaLine { interval: [a, b], .. } = comp {
                if !a.is_finite() || !b.is_finite() || *a < 0.0 || *b > 1.0 || a >= b {
                    return Err(Error::InvalidInterval { a: *a, b: *b });
                }
            }
        }
        if (total - 1.0).abs() > ACCUMULATED_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        for i in 0..components.len() {
            for j in (i + 1)..components.len() {
                if components[i].1.coincides_with(&components[j].1) {
                    return Err(Error::DuplicateComponent { i, j });
                }
            }
        }
        Ok(Self { d, components })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[(f64, SupportComponent)] {
        &self.components
    }

    /// Draws one ontic state. Region components delegate to the owning
    /// model's region sampler.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OnticState {
        let mut u: f64 = rng.gen();
        let mut chosen = &self.components[self.components.len() - 1].1;
        for (w, comp) in &self.components {
            if u < *w {
                chosen = comp;
                break;
            }
            u -= w;
        }
        match chosen {
            SupportComponent::DeltaLine { center, interval: [a, b] } => {
                OnticState::new_unchecked(center.clone(), rng.gen_range(*a..*b))
            }
            SupportComponent::RegionUniform { region, distribution } => {
                crate::epistemic::sample_region(region, *distribution, rng)
            }
        }
    }

    /// Whether `lambda` lies in the support of this distribution.
    pub fn support_contains(&self, lambda: &OnticState) -> bool {
        if lambda.direction().dim() != self.d {
            return false;
        }
        self.components.iter().any(|(_, comp)| match comp {
            SupportComponent::DeltaLine { center, interval: [a, b] } => {
                (*a..=*b).contains(&lambda.x()) && lambda.direction().approx_eq(center)
            }
            SupportComponent::RegionUniform { region, distribution } => {
                crate::epistemic::in_support(lambda, region, *distribution)
            }
        })
    }
}

impl From<EpistemicState> for EpistemicWire {
    fn from(e: EpistemicState) -> Self {
        EpistemicWire {
            d: e.d,
            components: e
                .components
                .into_iter()
                .map(|(weight, support)| ComponentWire { weight, support })
                .collect(),
        }
    }
}

impl TryFrom<EpistemicWire> for EpistemicState {
    type Error = Error;

    fn try_from(wire: EpistemicWire) -> Result<Self> {
        EpistemicState::new(
            wire.d,
            wire.components
                .into_iter()
                .map(|c| (c.weight, c.support))
                .collect(),
        )
    }
}

/// The total variation overlap `integral of min(d mu_1, d mu_2)` between two
/// epistemic states, computed symbolically from their components.
///
/// Distinct components never share measure: delta lines on different rays
/// are mutually singular, regions only match identical regions with the same
/// slab distribution, and a delta line inside a region carries zero region
/// measure. Matching components contribute the minimum of their densities
/// integrated over the shared support.
pub fn overlap_measure(e1: &EpistemicState, e2: &EpistemicState) -> Result<f64> {
    if e1.d() != e2.d() {
        return Err(Error::DimensionMismatch { expected: e1.d(), got: e2.d() });
    }
    let mut total = 0.0;
    for (w1, c1) in e1.components() {
        for (w2, c2) in e2.components() {
            match (c1, c2) {
                (
                    SupportComponent::DeltaLine { center: p1, interval: [a1, b1] },
                    SupportComponent::DeltaLine { center: p2, interval: [a2, b2] },
                ) => {
                    if p1.approx_eq(p2) {
                        let lo = a1.max(*a2);
                        let hi = b1.min(*b2);
                        if hi > lo {
                            let len = hi - lo;
                            total += f64::min(w1 * len / (b1 - a1), w2 * len / (b2 - a2));
                        }
                    }
                }
                (
                    SupportComponent::RegionUniform { region: r1, distribution: d1 },
                    SupportComponent::RegionUniform { region: r2, distribution: d2 },
                ) if r1.same_region(r2) && d1 == d2 => {
                    total += f64::min(*w1, *w2);
                }
                _ => {}
            }
        }
    }
    Ok(total.min(1.0))
}

/// Whether the supports of two epistemic states share positive measure.
pub fn support_intersects(e1: &EpistemicState, e2: &EpistemicState) -> Result<bool> {
    Ok(overlap_measure(e1, e2)? > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::haar_random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn delta(center: PureState, a: f64, b: f64) -> SupportComponent {
        SupportComponent::DeltaLine { center, interval: [a, b] }
    }

    fn full_line(center: PureState) -> EpistemicState {
        let d = center.dim();
        EpistemicState::new(d, vec![(1.0, delta(center, 0.0, 1.0))]).unwrap()
    }

    #[test]
    fn ontic_state_validates_x() {
        let dir = PureState::basis_state(2, 0).unwrap();
        assert!(OnticState::new(dir.clone(), 1.5).is_err());
        assert!(OnticState::new(dir.clone(), -0.1).is_err());
        assert!(OnticState::new(dir.clone(), f64::NAN).is_err());
        let lam = OnticState::new(dir, 1.0).unwrap();
        assert_eq!(lam.x(), 1.0);
    }

    #[test]
    fn epistemic_state_validation() {
        let c = PureState::basis_state(2, 0).unwrap();
        assert!(matches!(
            EpistemicState::new(2, vec![]),
            Err(Error::EmptySupport)
        ));
        assert!(EpistemicState::new(2, vec![(0.5, delta(c.clone(), 0.0, 1.0))]).is_err());
        assert!(EpistemicState::new(2, vec![(1.0, delta(c.clone(), 0.7, 0.7))]).is_err());
        assert!(EpistemicState::new(2, vec![(1.0, delta(c.clone(), -0.1, 1.0))]).is_err());
        assert!(EpistemicState::new(3, vec![(1.0, delta(c.clone(), 0.0, 1.0))]).is_err());
        let dup = EpistemicState::new(
            2,
            vec![
                (0.5, delta(c.clone(), 0.0, 1.0)),
                (0.5, delta(c.clone(), 0.0, 1.0)),
            ],
        );
        assert!(matches!(dup, Err(Error::DuplicateComponent { .. })));
        assert!(EpistemicState::new(2, vec![(1.0, delta(c, 0.0, 1.0))]).is_ok());
    }

    #[test]
    fn delta_sampling_stays_in_interval() {
        let c = PureState::basis_state(2, 0).unwrap();
        let e = EpistemicState::new(2, vec![(1.0, delta(c.clone(), 0.3, 1.0))]).unwrap();
        let mut r = rng(5);
        let mut min_x = f64::INFINITY;
        for _ in 0..10_000 {
            let lam = e.sample(&mut r);
            assert!(lam.direction().approx_eq(&c));
            assert!((0.3..1.0).contains(&lam.x()));
            min_x = min_x.min(lam.x());
        }
        assert!(min_x >= 0.3);
        assert!(min_x < 0.31);
    }

    #[test]
    fn mixture_weights_respected() {
        let c0 = PureState::basis_state(2, 0).unwrap();
        let c1 = PureState::basis_state(2, 1).unwrap();
        let e = EpistemicState::new(
            2,
            vec![(0.7, delta(c0.clone(), 0.0, 1.0)), (0.3, delta(c1, 0.0, 1.0))],
        )
        .unwrap();
        let mut r = rng(7);
        let n = 40_000;
        let hits = (0..n)
            .filter(|_| e.sample(&mut r).direction().approx_eq(&c0))
            .count();
        let freq = hits as f64 / n as f64;
        // 4 sigma for p = 0.7 at n = 40000 is about 0.009.
        assert!((freq - 0.7).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn support_contains_delta() {
        let c = PureState::basis_state(2, 0).unwrap();
        let e = EpistemicState::new(2, vec![(1.0, delta(c.clone(), 0.3, 0.8))]).unwrap();
        assert!(e.support_contains(&OnticState::new(c.clone(), 0.5).unwrap()));
        assert!(!e.support_contains(&OnticState::new(c.clone(), 0.9).unwrap()));
        let other = PureState::basis_state(2, 1).unwrap();
        assert!(!e.support_contains(&OnticState::new(other, 0.5).unwrap()));
        assert!(!e.support_contains(&OnticState::new(PureState::basis_state(3, 0).unwrap(), 0.5).unwrap()));
    }

    #[test]
    fn overlap_of_state_with_itself_is_one() {
        let mut r = rng(11);
        for d in [2, 4] {
            let e = full_line(haar_random(d, &mut r).unwrap());
            assert!((overlap_measure(&e, &e).unwrap() - 1.0).abs() < ACCUMULATED_TOL);
        }
    }

    #[test]
    fn overlap_of_distinct_lines_is_zero() {
        let mut r = rng(13);
        let e1 = full_line(haar_random(3, &mut r).unwrap());
        let e2 = full_line(haar_random(3, &mut r).unwrap());
        assert_eq!(overlap_measure(&e1, &e2).unwrap(), 0.0);
        assert!(!support_intersects(&e1, &e2).unwrap());
    }

    #[test]
    fn overlap_of_nested_intervals() {
        let c = PureState::basis_state(2, 0).unwrap();
        let e1 = full_line(c.clone());
        let e2 = EpistemicState::new(2, vec![(1.0, delta(c, 0.5, 1.0))]).unwrap();
        // Densities 1 and 2 on the shared half: min-density mass is 0.5.
        let v = overlap_measure(&e1, &e2).unwrap();
        assert!((v - 0.5).abs() < ACCUMULATED_TOL);
        let sym = overlap_measure(&e2, &e1).unwrap();
        assert!((v - sym).abs() < ACCUMULATED_TOL);
    }

    #[test]
    fn overlap_matches_identical_regions_only() {
        let anchor = PureState::basis_state(3, 0).unwrap();
        let other = PureState::basis_state(3, 1).unwrap();
        let region = |a: &PureState| SupportComponent::RegionUniform {
            region: RegionDescriptor::GeneralCap { anchor: a.clone() },
            distribution: RegionDistribution::Uniform,
        };
        let line = delta(haar_random(3, &mut rng(17)).unwrap(), 0.0, 1.0);
        let e1 = EpistemicState::new(3, vec![(0.4, region(&anchor)), (0.6, line.clone())]).unwrap();
        let e2 = EpistemicState::new(3, vec![(0.25, region(&anchor)), (0.75, line.clone())]).unwrap();
        let e3 = EpistemicState::new(3, vec![(0.4, region(&other)), (0.6, line)]).unwrap();
        // Shared region contributes min(0.4, 0.25); the shared line min(0.6, 0.75).
        assert!((overlap_measure(&e1, &e2).unwrap() - (0.25 + 0.6)).abs() < ACCUMULATED_TOL);
        // Different anchors share only the line.
        assert!((overlap_measure(&e1, &e3).unwrap() - 0.6).abs() < ACCUMULATED_TOL);
        assert!(overlap_measure(&e1, &full_line(PureState::basis_state(3, 2).unwrap())).unwrap() == 0.0);
    }

    #[test]
    fn overlap_distinguishes_slab_distributions() {
        let anchor = PureState::basis_state(2, 0).unwrap();
        let with_dist = |dist| {
            EpistemicState::new(
                2,
                vec![(1.0, SupportComponent::RegionUniform {
                    region: RegionDescriptor::GeneralCap { anchor: anchor.clone() },
                    distribution: dist,
                })],
            )
            .unwrap()
        };
        let u = with_dist(RegionDistribution::Uniform);
        let h = with_dist(RegionDistribution::HalfHeight);
        assert_eq!(overlap_measure(&u, &h).unwrap(), 0.0);
        assert!((overlap_measure(&h, &h).unwrap() - 1.0).abs() < ACCUMULATED_TOL);
    }

    #[test]
    fn overlap_rejects_dimension_mismatch() {
        let e1 = full_line(PureState::basis_state(2, 0).unwrap());
        let e2 = full_line(PureState::basis_state(3, 0).unwrap());
        assert!(overlap_measure(&e1, &e2).is_err());
    }

    #[test]
    fn epistemic_serde_round_trip() {
        let anchor = PureState::basis_state(3, 0).unwrap();
        let e = EpistemicState::new(
            3,
            vec![
                (0.75, delta(haar_random(3, &mut rng(19)).unwrap(), 0.25, 1.0)),
                (0.25, SupportComponent::RegionUniform {
                    region: RegionDescriptor::GeneralCap { anchor },
                    distribution: RegionDistribution::Uniform,
                }),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let back: EpistemicState = serde_json::from_str(&json).unwrap();
        assert!((overlap_measure(&e, &back).unwrap() - 1.0).abs() < ACCUMULATED_TOL);
        assert!(json.contains("\"kind\":\"delta\""));
        assert!(json.contains("\"variant\":\"general-cap\""));
        assert!(json.contains("\"distribution\":\"uniform\""));
    }

    #[test]
    fn region_descriptor_serde_tags() {
        let j = serde_json::to_string(&RegionDescriptor::QubitCap0).unwrap();
        assert_eq!(j, r#"{"variant":"qubit-cap-0"}"#);
        let back: RegionDescriptor = serde_json::from_str(&j).unwrap();
        assert!(back.same_region(&RegionDescriptor::QubitCap0));
        assert!(!back.same_region(&RegionDescriptor::QubitCap1));
    }
}
