//! C interface to the ontic simulation library.
//!
//! Conventions:
//!
//! - Every fallible function returns an [`OnticStatus`] and writes its
//!   result through out parameters, which are touched only on success.
//! - Handles (`OnticModel`, `OnticPureState`, `OnticMeasurement`) are
//!   opaque. Release them with the matching `*_free` function; every
//!   `*_free` accepts null.
//! - Strings returned through `char **` are NUL-terminated UTF-8 owned by
//!   the caller; release them with [`ontic_string_free`]. Reports are JSON
//!   documents matching the library's serialized report types.
//! - After any non-OK status, [`ontic_last_error`] returns a thread-local
//!   description, valid on that thread until the next failing call.
//! - Panics never unwind across the boundary; they surface as
//!   `ONTIC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ontic_core::epistemic::z_from_fidelity;
use ontic_core::ontology::overlap_measure;
use ontic_core::qstate::{born_probabilities, haar_random, OrderedMeasurement, PureState};
use ontic_core::verify::{
    check_region_constancy, classify_epistemicity, estimate_overlap_mc, exact_born_check,
    random_ordered_measurement, run_born_trials,
};
use ontic_core::Model;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnticStatus {
    /// The call succeeded and out parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was outside its domain.
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    Utf8 = 3,
    /// A JSON document failed to parse or serialize.
    Json = 4,
    /// The library rejected the operation; see `ontic_last_error`.
    Domain = 5,
    /// An internal invariant failed; the call did not complete.
    Panic = 6,
}

/// Opaque handle to a response model.
pub struct OnticModel(Model);

/// Opaque handle to a pure quantum state.
pub struct OnticPureState(PureState);

/// Opaque handle to an ordered projective measurement.
pub struct OnticMeasurement(OrderedMeasurement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(c"no error".to_owned());
}

fn set_last_error(message: String) {
    let stored = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| c"error message unavailable".to_owned());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

enum FfiError {
    Null(&'static str),
    Invalid(String),
    Utf8(&'static str),
    Json(serde_json::Error),
    Domain(ontic_core::Error),
}

impl FfiError {
    fn status(&self) -> OnticStatus {
        match self {
            FfiError::Null(_) => OnticStatus::NullArgument,
            FfiError::Invalid(_) => OnticStatus::InvalidArgument,
            FfiError::Utf8(_) => OnticStatus::Utf8,
            FfiError::Json(_) => OnticStatus::Json,
            FfiError::Domain(_) => OnticStatus::Domain,
        }
    }

    fn message(&self) -> String {
        match self {
            FfiError::Null(name) => format!("argument `{name}` must not be null"),
            FfiError::Invalid(message) => message.clone(),
            FfiError::Utf8(name) => format!("argument `{name}` must be valid UTF-8"),
            FfiError::Json(err) => format!("JSON error: {err}"),
            FfiError::Domain(err) => err.to_string(),
        }
    }
}

impl From<ontic_core::Error> for FfiError {
    fn from(err: ontic_core::Error) -> Self {
        FfiError::Domain(err)
    }
}

impl From<serde_json::Error> for FfiError {
    fn from(err: serde_json::Error) -> Self {
        FfiError::Json(err)
    }
}

/// Runs the body with panics contained and errors routed to the
/// thread-local message slot.
fn wrap(body: impl FnOnce() -> Result<(), FfiError>) -> OnticStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OnticStatus::Ok,
        Ok(Err(err)) => {
            let status = err.status();
            set_last_error(err.message());
            status
        }
        Err(_) => {
            set_last_error("internal panic; the call did not complete".to_string());
            OnticStatus::Panic
        }
    }
}

unsafe fn req<'a, T>(ptr: *const T, name: &'static str) -> Result<&'a T, FfiError> {
    ptr.as_ref().ok_or(FfiError::Null(name))
}

unsafe fn req_out<'a, T>(ptr: *mut T, name: &'static str) -> Result<&'a mut T, FfiError> {
    ptr.as_mut().ok_or(FfiError::Null(name))
}

unsafe fn req_str<'a>(ptr: *const c_char, name: &'static str) -> Result<&'a str, FfiError> {
    if ptr.is_null() {
        return Err(FfiError::Null(name));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| FfiError::Utf8(name))
}

fn give_string(slot: &mut *mut c_char, text: String) -> Result<(), FfiError> {
    let c = CString::new(text)
        .map_err(|_| FfiError::Invalid("output contained an interior NUL".to_string()))?;
    *slot = c.into_raw();
    Ok(())
}

fn give_json<T: Serialize>(slot: &mut *mut c_char, value: &T) -> Result<(), FfiError> {
    give_string(slot, serde_json::to_string(value)?)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Message describing the most recent failure on this thread.
///
/// The pointer stays valid until the next failing call on the same thread;
/// copy the contents before calling anything else. Never returns null.
#[no_mangle]
pub extern "C" fn ontic_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. Accepts null.
///
/// # Safety
/// `s` must be a pointer previously returned through a `char **` out
/// parameter of this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ontic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a model by name: "bell", "qubit-hemisphere", "general-cap", or
/// "basis-cap". Cap models take their default layout (first computational
/// axis anchor, computational preferred basis); see
/// [`ontic_model_general_cap`] and [`ontic_model_basis_cap`] for custom
/// layouts.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_new(
    name: *const c_char,
    d: usize,
    out: *mut *mut OnticModel,
) -> OnticStatus {
    wrap(|| {
        let name = req_str(name, "name")?;
        let out = req_out(out, "out")?;
        let model = Model::from_name(name, d, None, None)?;
        *out = Box::into_raw(Box::new(OnticModel(model)));
        Ok(())
    })
}

/// Creates the single-cap model around a custom anchor state.
///
/// # Safety
/// `anchor` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_general_cap(
    anchor: *const OnticPureState,
    out: *mut *mut OnticModel,
) -> OnticStatus {
    wrap(|| {
        let anchor = req(anchor, "anchor")?;
        let out = req_out(out, "out")?;
        let model = Model::general_cap(anchor.0.clone())?;
        *out = Box::into_raw(Box::new(OnticModel(model)));
        Ok(())
    })
}

/// Creates the preferred-basis model from `len` orthonormal states.
///
/// # Safety
/// `basis` must point to `len` valid state pointers and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_basis_cap(
    basis: *const *const OnticPureState,
    len: usize,
    out: *mut *mut OnticModel,
) -> OnticStatus {
    wrap(|| {
        if basis.is_null() {
            return Err(FfiError::Null("basis"));
        }
        let out = req_out(out, "out")?;
        let handles = std::slice::from_raw_parts(basis, len);
        let mut states = Vec::with_capacity(len);
        for handle in handles {
            states.push(req(*handle, "basis element")?.0.clone());
        }
        let model = Model::basis_cap(states)?;
        *out = Box::into_raw(Box::new(OnticModel(model)));
        Ok(())
    })
}

/// The model's canonical name as a static string; never free it. Returns
/// null if `model` is null.
///
/// # Safety
/// `model` must be a valid model handle or null.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_name(model: *const OnticModel) -> *const c_char {
    let Some(model) = model.as_ref() else {
        return std::ptr::null();
    };
    match model.0.name() {
        "bell" => c"bell".as_ptr(),
        "qubit-hemisphere" => c"qubit-hemisphere".as_ptr(),
        "general-cap" => c"general-cap".as_ptr(),
        _ => c"basis-cap".as_ptr(),
    }
}

/// The model's Hilbert-space dimension.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_d(model: *const OnticModel, out: *mut usize) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let out = req_out(out, "out")?;
        *out = model.0.d();
        Ok(())
    })
}

/// Releases a model handle. Accepts null.
///
/// # Safety
/// `model` must be a handle from this library or null, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontic_model_free(model: *mut OnticModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Creates the computational basis state `|k>` in dimension `d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_basis(
    d: usize,
    k: usize,
    out: *mut *mut OnticPureState,
) -> OnticStatus {
    wrap(|| {
        let out = req_out(out, "out")?;
        let state = PureState::basis_state(d, k)?;
        *out = Box::into_raw(Box::new(OnticPureState(state)));
        Ok(())
    })
}

/// Draws a Haar-random state in dimension `d`, deterministically from
/// `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_random(
    d: usize,
    seed: u64,
    out: *mut *mut OnticPureState,
) -> OnticStatus {
    wrap(|| {
        let out = req_out(out, "out")?;
        let state = haar_random(d, &mut rng_for(seed))?;
        *out = Box::into_raw(Box::new(OnticPureState(state)));
        Ok(())
    })
}

/// Parses a state from its JSON form `{"d": ..., "re": [...], "im": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_from_json(
    json: *const c_char,
    out: *mut *mut OnticPureState,
) -> OnticStatus {
    wrap(|| {
        let json = req_str(json, "json")?;
        let out = req_out(out, "out")?;
        let state: PureState = serde_json::from_str(json)?;
        *out = Box::into_raw(Box::new(OnticPureState(state)));
        Ok(())
    })
}

/// Serializes a state to JSON; release the string with
/// [`ontic_string_free`].
///
/// # Safety
/// `state` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_to_json(
    state: *const OnticPureState,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let state = req(state, "state")?;
        let out_json = req_out(out_json, "out_json")?;
        give_json(out_json, &state.0)
    })
}

/// The state's Hilbert-space dimension.
///
/// # Safety
/// `state` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_d(state: *const OnticPureState, out: *mut usize) -> OnticStatus {
    wrap(|| {
        let state = req(state, "state")?;
        let out = req_out(out, "out")?;
        *out = state.0.dim();
        Ok(())
    })
}

/// Writes `|<a|b>|^2` to `out`.
///
/// # Safety
/// `a`, `b`, and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_fidelity(
    a: *const OnticPureState,
    b: *const OnticPureState,
    out: *mut f64,
) -> OnticStatus {
    wrap(|| {
        let a = req(a, "a")?;
        let b = req(b, "b")?;
        let out = req_out(out, "out")?;
        if a.0.dim() != b.0.dim() {
            return Err(FfiError::Invalid(format!(
                "states have dimensions {} and {}",
                a.0.dim(),
                b.0.dim(),
            )));
        }
        *out = a.0.fidelity(&b.0);
        Ok(())
    })
}

/// Releases a state handle. Accepts null.
///
/// # Safety
/// `state` must be a handle from this library or null, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontic_state_free(state: *mut OnticPureState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Draws a random orthonormal measurement in the model's outcome order,
/// deterministically from `seed`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_measurement_random(
    model: *const OnticModel,
    seed: u64,
    out: *mut *mut OnticMeasurement,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let out = req_out(out, "out")?;
        let meas = random_ordered_measurement(&model.0, &mut rng_for(seed))?;
        *out = Box::into_raw(Box::new(OnticMeasurement(meas)));
        Ok(())
    })
}

/// Parses a measurement from JSON and re-orders its outcomes for this
/// model's layout.
///
/// # Safety
/// `model` must be a valid model handle, `json` a NUL-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_measurement_from_json(
    model: *const OnticModel,
    json: *const c_char,
    out: *mut *mut OnticMeasurement,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let json = req_str(json, "json")?;
        let out = req_out(out, "out")?;
        let parsed: OrderedMeasurement = serde_json::from_str(json)?;
        let meas = model.0.order_measurement(parsed.outcomes().to_vec())?;
        *out = Box::into_raw(Box::new(OnticMeasurement(meas)));
        Ok(())
    })
}

/// Serializes a measurement to JSON; release the string with
/// [`ontic_string_free`].
///
/// # Safety
/// `meas` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_measurement_to_json(
    meas: *const OnticMeasurement,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let meas = req(meas, "meas")?;
        let out_json = req_out(out_json, "out_json")?;
        give_json(out_json, &meas.0)
    })
}

/// Clones outcome `k` of the measurement into a fresh state handle.
///
/// # Safety
/// `meas` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_measurement_outcome(
    meas: *const OnticMeasurement,
    k: usize,
    out: *mut *mut OnticPureState,
) -> OnticStatus {
    wrap(|| {
        let meas = req(meas, "meas")?;
        let out = req_out(out, "out")?;
        if k >= meas.0.d() {
            return Err(FfiError::Invalid(format!(
                "outcome index {k} out of range for dimension {}",
                meas.0.d(),
            )));
        }
        *out = Box::into_raw(Box::new(OnticPureState(meas.0.outcome(k).clone())));
        Ok(())
    })
}

/// Releases a measurement handle. Accepts null.
///
/// # Safety
/// `meas` must be a handle from this library or null, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontic_measurement_free(meas: *mut OnticMeasurement) {
    if !meas.is_null() {
        drop(Box::from_raw(meas));
    }
}

/// Writes the Born probabilities of `psi` under `meas` into `out[0..len]`;
/// `len` must equal the dimension.
///
/// # Safety
/// `psi` and `meas` must be valid handles and `out` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ontic_born_probabilities(
    psi: *const OnticPureState,
    meas: *const OnticMeasurement,
    out: *mut f64,
    len: usize,
) -> OnticStatus {
    wrap(|| {
        let psi = req(psi, "psi")?;
        let meas = req(meas, "meas")?;
        if out.is_null() {
            return Err(FfiError::Null("out"));
        }
        if len != meas.0.d() {
            return Err(FfiError::Invalid(format!(
                "output length {len} does not match dimension {}",
                meas.0.d(),
            )));
        }
        let probs = born_probabilities(&psi.0, &meas.0)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&probs);
        Ok(())
    })
}

/// Writes the epistemic floor `z` for anchor fidelity `fidelity` in
/// dimension `d`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_z_from_fidelity(
    fidelity: f64,
    d: usize,
    out: *mut f64,
) -> OnticStatus {
    wrap(|| {
        let out = req_out(out, "out")?;
        if d == 0 {
            return Err(FfiError::Invalid("dimension must be at least 1".to_string()));
        }
        if !(0.0..=1.0).contains(&fidelity) {
            return Err(FfiError::Invalid(format!(
                "fidelity {fidelity} outside [0, 1]"
            )));
        }
        *out = z_from_fidelity(fidelity, d);
        Ok(())
    })
}

/// Runs one full trial (prepare, sample, respond) and writes the outcome
/// index.
///
/// # Safety
/// `model`, `psi`, `meas`, and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_sample_outcome(
    model: *const OnticModel,
    psi: *const OnticPureState,
    meas: *const OnticMeasurement,
    seed: u64,
    out: *mut usize,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let psi = req(psi, "psi")?;
        let meas = req(meas, "meas")?;
        let out = req_out(out, "out")?;
        let mu = model.0.prepare(&psi.0)?;
        let lambda = mu.sample(&mut rng_for(seed));
        *out = model.0.respond(&lambda, &meas.0)?;
        Ok(())
    })
}

/// Samples `n` trials and writes the Born certification report
/// (`trial-report/v1`) as JSON.
///
/// # Safety
/// `model`, `psi`, `meas`, and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_run_born_trials(
    model: *const OnticModel,
    psi: *const OnticPureState,
    meas: *const OnticMeasurement,
    n: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let psi = req(psi, "psi")?;
        let meas = req(meas, "meas")?;
        let out_json = req_out(out_json, "out_json")?;
        let report = run_born_trials(&model.0, &psi.0, &meas.0, n, seed)?;
        give_json(out_json, &report)
    })
}

/// Integrates the exact response masses and writes the `exact-born/v1`
/// report as JSON.
///
/// # Safety
/// `model`, `psi`, `meas`, and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_exact_born_check(
    model: *const OnticModel,
    psi: *const OnticPureState,
    meas: *const OnticMeasurement,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let psi = req(psi, "psi")?;
        let meas = req(meas, "meas")?;
        let out_json = req_out(out_json, "out_json")?;
        let report = exact_born_check(&model.0, &psi.0, &meas.0)?;
        give_json(out_json, &report)
    })
}

/// Sweeps region samples against random measurements and writes the
/// `property-report/v1` report as JSON. The model must have cap regions.
///
/// # Safety
/// `model` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_check_region_constancy(
    model: *const OnticModel,
    n_states: u64,
    n_measurements: u64,
    seed: u64,
    inject_failure: bool,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let out_json = req_out(out_json, "out_json")?;
        let variant = model.0.variant().ok_or_else(|| {
            FfiError::Invalid(format!("model {} has no cap regions", model.0.name()))
        })?;
        let report =
            check_region_constancy(variant, n_states, n_measurements, seed, inject_failure)?;
        give_json(out_json, &report)
    })
}

/// Writes the exact support overlap of the preparations of `a` and `b`.
///
/// # Safety
/// `model`, `a`, `b`, and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_exact_overlap(
    model: *const OnticModel,
    a: *const OnticPureState,
    b: *const OnticPureState,
    out: *mut f64,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let a = req(a, "a")?;
        let b = req(b, "b")?;
        let out = req_out(out, "out")?;
        let mu_a = model.0.prepare(&a.0)?;
        let mu_b = model.0.prepare(&b.0)?;
        *out = overlap_measure(&mu_a, &mu_b)?;
        Ok(())
    })
}

/// Monte Carlo estimate of the support overlap of the preparations of `a`
/// and `b`; writes the `overlap-report/v1` report as JSON.
///
/// # Safety
/// `model`, `a`, `b`, and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ontic_estimate_overlap(
    model: *const OnticModel,
    a: *const OnticPureState,
    b: *const OnticPureState,
    n: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        let a = req(a, "a")?;
        let b = req(b, "b")?;
        let out_json = req_out(out_json, "out_json")?;
        let mu_a = model.0.prepare(&a.0)?;
        let mu_b = model.0.prepare(&b.0)?;
        let report = estimate_overlap_mc(&mu_a, &mu_b, n, seed)?;
        give_json(out_json, &report)
    })
}

/// Classifies the model over `len` prepared states and writes the
/// `epistemicity-verdict/v1` report as JSON.
///
/// # Safety
/// `model` must be a valid model handle, `states` must point to `len`
/// valid state pointers, and `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_classify_epistemicity(
    model: *const OnticModel,
    states: *const *const OnticPureState,
    len: usize,
    threshold: f64,
    out_json: *mut *mut c_char,
) -> OnticStatus {
    wrap(|| {
        let model = req(model, "model")?;
        if states.is_null() {
            return Err(FfiError::Null("states"));
        }
        let out_json = req_out(out_json, "out_json")?;
        let handles = std::slice::from_raw_parts(states, len);
        let mut owned = Vec::with_capacity(len);
        for handle in handles {
            owned.push(req(*handle, "states element")?.0.clone());
        }
        let report = classify_epistemicity(&model.0, &owned, threshold)?;
        give_json(out_json, &report)
    })
}
