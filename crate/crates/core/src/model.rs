//! Runtime selection of an ontological model: the baseline and the three
//! epistemic variants behind one preparation/response interface.

use crate::bell;
use crate::epistemic::{self, ModelVariant};
use crate::ontology::{EpistemicState, OnticState, RegionDescriptor};
use crate::qstate::{anchor_order_indices, order_for_anchor, OrderedMeasurement, PureState};
use crate::{Error, Result};

/// One ontological model of a `d`-dimensional system.
///
/// All models share the same measurement layout (stacked intervals over
/// anchor-ordered outcomes) and the same Born statistics; they differ in how
/// preparations distribute weight and, for [`ModelVariant::BasisCap`], in a
/// per-direction relabelling of the stacking order.
#[derive(Debug, Clone)]
pub enum Model {
    /// The baseline model: every preparation is a full delta line.
    Bell { d: usize },
    /// An epistemic modification.
    Modified(ModelVariant),
}

impl Model {
    pub fn bell(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: d });
        }
        Ok(Self::Bell { d })
    }

    pub fn qubit_hemisphere() -> Self {
        Self::Modified(ModelVariant::QubitHemisphere)
    }

    pub fn general_cap(anchor: PureState) -> Result<Self> {
        Ok(Self::Modified(ModelVariant::general_cap(anchor)?))
    }

    pub fn basis_cap(basis: Vec<PureState>) -> Result<Self> {
        Ok(Self::Modified(ModelVariant::basis_cap(basis)?))
    }

    /// Builds a model from its registered name.
    ///
    /// `general-cap` defaults its anchor to `|0>` and `basis-cap` its basis
    /// to the computational basis when none are supplied.
    pub fn from_name(
        name: &str,
        d: usize,
        anchor: Option<PureState>,
        basis: Option<Vec<PureState>>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall { min: 2, got: d });
        }
        match name {
            "bell" => Self::bell(d),
            "qubit-hemisphere" => {
                if d != 2 {
                    return Err(Error::UnsupportedDimension {
                        model: "qubit-hemisphere",
                        required: 2,
                        got: d,
                    });
                }
                Ok(Self::qubit_hemisphere())
            }
            "general-cap" => {
                let anchor = match anchor {
                    Some(a) => a,
                    None => PureState::basis_state(d, 0)?,
                };
                if anchor.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: anchor.dim() });
                }
                Self::general_cap(anchor)
            }
            "basis-cap" => {
                let basis = match basis {
                    Some(b) => b,
                    None => (0..d)
                        .map(|k| PureState::basis_state(d, k))
                        .collect::<Result<Vec<_>>>()?,
                };
                if basis.len() != d {
                    return Err(Error::IncompleteBasis { d, got: basis.len() });
                }
                Self::basis_cap(basis)
            }
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }

    /// Registered names accepted by [`Model::from_name`].
    pub const NAMES: [&'static str; 4] =
        ["bell", "qubit-hemisphere", "general-cap", "basis-cap"];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bell { .. } => "bell",
            Self::Modified(v) => v.model_name(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Bell { d } => *d,
            Self::Modified(v) => v.d(),
        }
    }

    /// The anchor this model orders measurements by.
    pub fn ordering_anchor(&self) -> PureState {
        match self {
            Self::Bell { d } => PureState::basis_state(*d, 0).expect("d >= 2"),
            Self::Modified(v) => v.ordering_anchor(),
        }
    }

    /// Orders an orthonormal basis into this model's measurement layout.
    pub fn order_measurement(&self, basis: Vec<PureState>) -> Result<OrderedMeasurement> {
        order_for_anchor(basis, self.ordering_anchor())
    }

    /// The epistemic state this model prepares for `|psi>`.
    pub fn prepare(&self, psi: &PureState) -> Result<EpistemicState> {
        match self {
            Self::Bell { d } => {
                if psi.dim() != *d {
                    return Err(Error::DimensionMismatch { expected: *d, got: psi.dim() });
                }
                Ok(bell::prepare(psi))
            }
            Self::Modified(v) => epistemic::prepare(psi, v),
        }
    }

    /// The deterministic response of an ontic state to an ordered
    /// measurement.
    ///
    /// The basis-cap variant restacks intervals in the order ranked by the
    /// basis element whose cap holds the direction; responses still index
    /// into the measurement as given.
    pub fn respond(&self, lambda: &OnticState, meas: &OrderedMeasurement) -> Result<usize> {
        if lambda.direction().dim() != meas.d() || meas.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: lambda.direction().dim(),
            });
        }
        match self {
            Self::Modified(ModelVariant::BasisCap { basis }) => {
                match epistemic::basis_cap_of(lambda.direction(), basis) {
                    Some(j) => {
                        let order = anchor_order_indices(meas.outcomes(), &basis[j]);
                        Ok(bell::respond_permuted(lambda, meas.outcomes(), &order))
                    }
                    None => bell::respond(lambda, meas),
                }
            }
            _ => bell::respond(lambda, meas),
        }
    }

    /// The interval stacking order this model uses for a given direction,
    /// when it differs from the measurement's own order.
    pub(crate) fn response_order(
        &self,
        direction: &PureState,
        meas: &OrderedMeasurement,
    ) -> Option<Vec<usize>> {
        match self {
            Self::Modified(ModelVariant::BasisCap { basis }) => {
                epistemic::basis_cap_of(direction, basis)
                    .map(|j| anchor_order_indices(meas.outcomes(), &basis[j]))
            }
            _ => None,
        }
    }

    pub fn variant(&self) -> Option<&ModelVariant> {
        match self {
            Self::Bell { .. } => None,
            Self::Modified(v) => Some(v),
        }
    }

    /// The regions this model carves out of the ontic space (none for the
    /// baseline model).
    pub fn regions(&self) -> Vec<RegionDescriptor> {
        match self {
            Self::Bell { .. } => Vec::new(),
            Self::Modified(v) => v.regions(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epistemic::{forced_outcome, sample_region, z_from_fidelity};
    use crate::ontology::RegionDistribution;
    use crate::qstate::{direction_at_fidelity, haar_random, random_basis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn from_name_round_trips_and_validates() {
        let m = Model::from_name("bell", 4, None, None).unwrap();
        assert_eq!(m.name(), "bell");
        assert_eq!(m.d(), 4);
        let m = Model::from_name("qubit-hemisphere", 2, None, None).unwrap();
        assert_eq!(m.name(), "qubit-hemisphere");
        assert!(matches!(
            Model::from_name("qubit-hemisphere", 3, None, None),
            Err(Error::UnsupportedDimension { .. })
        ));
        let m = Model::from_name("general-cap", 3, None, None).unwrap();
        assert!(m.ordering_anchor().approx_eq(&PureState::basis_state(3, 0).unwrap()));
        let m = Model::from_name("basis-cap", 3, None, None).unwrap();
        assert_eq!(m.regions().len(), 3);
        assert!(matches!(
            Model::from_name("nosuch", 2, None, None),
            Err(Error::UnknownModel(_))
        ));
        assert!(Model::from_name("bell", 1, None, None).is_err());
    }

    #[test]
    fn bell_prepare_checks_dimension() {
        let m = Model::bell(3).unwrap();
        assert!(m.prepare(&haar_random(2, &mut rng(1)).unwrap()).is_err());
        assert!(m.prepare(&haar_random(3, &mut rng(1)).unwrap()).is_ok());
    }

    #[test]
    fn basis_cap_response_forces_cap_outcome() {
        let mut r = rng(3);
        let d = 4;
        let basis = random_basis(d, &mut r).unwrap();
        let model = Model::basis_cap(basis.clone()).unwrap();
        for (j, anchor) in basis.iter().enumerate() {
            let region = RegionDescriptor::BasisCap { index: j, anchor: anchor.clone() };
            for _ in 0..100 {
                let meas = model
                    .order_measurement(random_basis(d, &mut r).unwrap())
                    .unwrap();
                let lam = sample_region(&region, RegionDistribution::Uniform, &mut r);
                let got = model.respond(&lam, &meas).unwrap();
                assert_eq!(got, forced_outcome(&region, &meas).unwrap());
            }
        }
    }

    #[test]
    fn basis_cap_out_of_cap_matches_baseline() {
        let mut r = rng(5);
        let d = 3;
        let basis = random_basis(d, &mut r).unwrap();
        let model = Model::basis_cap(basis.clone()).unwrap();
        for _ in 0..200 {
            let dir = haar_random(d, &mut r).unwrap();
            if crate::epistemic::basis_cap_of(&dir, &basis).is_some() {
                continue;
            }
            let x = rand::Rng::gen::<f64>(&mut r);
            let lam = OnticState::new(dir, x).unwrap();
            let meas = model.order_measurement(random_basis(d, &mut r).unwrap()).unwrap();
            assert_eq!(
                model.respond(&lam, &meas).unwrap(),
                crate::bell::respond(&lam, &meas).unwrap()
            );
        }
    }

    #[test]
    fn response_order_only_reorders_in_cap() {
        let mut r = rng(7);
        let d = 3;
        let basis = random_basis(d, &mut r).unwrap();
        let model = Model::basis_cap(basis.clone()).unwrap();
        let meas = model.order_measurement(random_basis(d, &mut r).unwrap()).unwrap();
        let in_cap = direction_at_fidelity(&basis[1], 0.95, &mut r).unwrap();
        let order = model.response_order(&in_cap, &meas).unwrap();
        assert_eq!(order.len(), d);
        let w0 = meas.outcome(order[0]).fidelity(&basis[1]);
        assert!(w0 >= z_from_fidelity(0.95, d));
        let far = direction_at_fidelity(&basis[1], 0.3, &mut r).unwrap();
        assert!(model.response_order(&far, &meas).is_none());
        let bell_model = Model::bell(d).unwrap();
        assert!(bell_model.response_order(&in_cap, &meas).is_none());
    }

    #[test]
    fn respond_rejects_dimension_mismatch() {
        let mut r = rng(9);
        let model = Model::bell(3).unwrap();
        let meas = model.order_measurement(random_basis(3, &mut r).unwrap()).unwrap();
        let lam = OnticState::new(haar_random(2, &mut r).unwrap(), 0.4).unwrap();
        assert!(model.respond(&lam, &meas).is_err());
    }
}
