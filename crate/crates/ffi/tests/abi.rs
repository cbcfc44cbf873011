//! Exercises the C entry points exactly as a C caller would: raw pointers
//! in, status codes and owned strings out.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ontic_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ontic_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn take_string(raw: *mut c_char) -> String {
    assert!(!raw.is_null());
    let text = unsafe { CStr::from_ptr(raw) }.to_string_lossy().into_owned();
    unsafe { ontic_string_free(raw) };
    text
}

fn model(name: &str, d: usize) -> *mut OnticModel {
    let cname = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { ontic_model_new(cname.as_ptr(), d, &mut out) };
    assert_eq!(status, OnticStatus::Ok, "{}", last_error());
    out
}

#[test]
fn trial_report_round_trips_through_the_abi() {
    let model = model("general-cap", 3);
    let mut psi = ptr::null_mut();
    assert_eq!(unsafe { ontic_state_random(3, 7, &mut psi) }, OnticStatus::Ok);
    let mut meas = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_measurement_random(model, 8, &mut meas) },
        OnticStatus::Ok
    );

    let mut probs = [0.0f64; 3];
    assert_eq!(
        unsafe { ontic_born_probabilities(psi, meas, probs.as_mut_ptr(), 3) },
        OnticStatus::Ok
    );
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);

    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_run_born_trials(model, psi, meas, 50_000, 5, &mut json) },
        OnticStatus::Ok
    );
    let report: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(report["schema"], "trial-report/v1");
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["n"], 50_000);

    let mut exact = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_exact_born_check(model, psi, meas, &mut exact) },
        OnticStatus::Ok
    );
    let exact: serde_json::Value = serde_json::from_str(&take_string(exact)).unwrap();
    assert_eq!(exact["verdict"], "pass");
    assert!(exact["max_abs_diff"].as_f64().unwrap() <= 1e-9);

    let mut outcome = 42usize;
    assert_eq!(
        unsafe { ontic_sample_outcome(model, psi, meas, 3, &mut outcome) },
        OnticStatus::Ok
    );
    assert!(outcome < 3);

    unsafe {
        ontic_measurement_free(meas);
        ontic_state_free(psi);
        ontic_model_free(model);
    }
}

#[test]
fn overlap_and_classification_agree_with_the_construction() {
    let model = model("qubit-hemisphere", 2);
    // Two states in the upper cap share the region; fidelities are fixed by
    // construction so the exact overlap is the smaller floor value.
    let a_json = CString::new(r#"{"d":2,"re":[0.98,0.19899748742132397],"im":[0.0,0.0]}"#).unwrap();
    let b_json = CString::new(r#"{"d":2,"re":[0.95,0.3122498999199199],"im":[0.0,0.0]}"#).unwrap();
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ontic_state_from_json(a_json.as_ptr(), &mut a) }, OnticStatus::Ok);
    assert_eq!(unsafe { ontic_state_from_json(b_json.as_ptr(), &mut b) }, OnticStatus::Ok);

    let mut z_b = 0.0f64;
    assert_eq!(unsafe { ontic_z_from_fidelity(0.95 * 0.95, 2, &mut z_b) }, OnticStatus::Ok);
    let mut exact = 0.0f64;
    assert_eq!(unsafe { ontic_exact_overlap(model, a, b, &mut exact) }, OnticStatus::Ok);
    assert!((exact - z_b).abs() < 1e-12, "exact={exact} z_b={z_b}");

    let mut estimate = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_estimate_overlap(model, a, b, 60_000, 11, &mut estimate) },
        OnticStatus::Ok
    );
    let estimate: serde_json::Value = serde_json::from_str(&take_string(estimate)).unwrap();
    assert!(estimate["ci_low"].as_f64().unwrap() <= exact);
    assert!(exact <= estimate["ci_high"].as_f64().unwrap());

    let states = [a as *const OnticPureState, b as *const OnticPureState];
    let mut verdict = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_classify_epistemicity(model, states.as_ptr(), 2, 0.0, &mut verdict) },
        OnticStatus::Ok
    );
    let verdict: serde_json::Value = serde_json::from_str(&take_string(verdict)).unwrap();
    assert_eq!(verdict["verdict"], "psi-epistemic");
    assert!(verdict["witness"].is_object());

    unsafe {
        ontic_state_free(a);
        ontic_state_free(b);
        ontic_model_free(model);
    }
}

#[test]
fn constancy_report_flows_through_the_abi() {
    let model = model("basis-cap", 4);
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_check_region_constancy(model, 64, 64, 3, false, &mut json) },
        OnticStatus::Ok
    );
    let report: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(report["schema"], "property-report/v1");
    assert_eq!(report["failure_count"], 0);
    unsafe { ontic_model_free(model) };
}

#[test]
fn status_codes_name_each_failure_mode() {
    // Null arguments.
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_model_new(ptr::null(), 2, &mut out) },
        OnticStatus::NullArgument
    );
    assert!(last_error().contains("name"));

    // Domain rejection from the library.
    let bad = CString::new("nosuch").unwrap();
    assert_eq!(
        unsafe { ontic_model_new(bad.as_ptr(), 2, &mut out) },
        OnticStatus::Domain
    );
    assert!(last_error().contains("unknown model"), "{}", last_error());

    // Invalid argument.
    let mut z = 0.0f64;
    assert_eq!(
        unsafe { ontic_z_from_fidelity(1.5, 2, &mut z) },
        OnticStatus::InvalidArgument
    );

    // Malformed JSON.
    let garbage = CString::new("{not json").unwrap();
    let mut state = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_state_from_json(garbage.as_ptr(), &mut state) },
        OnticStatus::Json
    );

    // Dimension mismatch surfaces as a domain error with a message.
    let model = model("bell", 2);
    let mut psi = ptr::null_mut();
    assert_eq!(unsafe { ontic_state_random(3, 1, &mut psi) }, OnticStatus::Ok);
    let mut meas = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_measurement_random(model, 1, &mut meas) },
        OnticStatus::Ok
    );
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_run_born_trials(model, psi, meas, 2_000, 1, &mut json) },
        OnticStatus::Domain
    );
    // The constancy sweep needs cap regions; the unmodified model has none.
    assert_eq!(
        unsafe { ontic_check_region_constancy(model, 8, 8, 1, false, &mut json) },
        OnticStatus::InvalidArgument
    );
    unsafe {
        ontic_measurement_free(meas);
        ontic_state_free(psi);
        ontic_model_free(model);
    }

    // Frees accept null.
    unsafe {
        ontic_model_free(ptr::null_mut());
        ontic_state_free(ptr::null_mut());
        ontic_measurement_free(ptr::null_mut());
        ontic_string_free(ptr::null_mut());
    }
}

#[test]
fn measurement_outcomes_are_deterministic_eigenstates() {
    let model = model("bell", 3);
    let mut meas = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_measurement_random(model, 21, &mut meas) },
        OnticStatus::Ok
    );
    let mut psi = ptr::null_mut();
    assert_eq!(unsafe { ontic_measurement_outcome(meas, 1, &mut psi) }, OnticStatus::Ok);
    let mut outcome = 0usize;
    assert_eq!(
        unsafe { ontic_sample_outcome(model, psi, meas, 9, &mut outcome) },
        OnticStatus::Ok
    );
    assert_eq!(outcome, 1);

    // The JSON round trip renormalizes amplitudes, so compare physically:
    // same ordering, same Born weights to high precision.
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ontic_measurement_to_json(meas, &mut json) }, OnticStatus::Ok);
    let cjson = CString::new(take_string(json)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_measurement_from_json(model, cjson.as_ptr(), &mut back) },
        OnticStatus::Ok
    );
    let mut before = [0.0f64; 3];
    let mut after = [0.0f64; 3];
    assert_eq!(
        unsafe { ontic_born_probabilities(psi, meas, before.as_mut_ptr(), 3) },
        OnticStatus::Ok
    );
    assert_eq!(
        unsafe { ontic_born_probabilities(psi, back, after.as_mut_ptr(), 3) },
        OnticStatus::Ok
    );
    for (x, y) in before.iter().zip(&after) {
        assert!((x - y).abs() < 1e-12, "born weights drifted: {x} vs {y}");
    }
    let mut outcome_back = 0usize;
    assert_eq!(
        unsafe { ontic_sample_outcome(model, psi, back, 9, &mut outcome_back) },
        OnticStatus::Ok
    );
    assert_eq!(outcome_back, outcome);

    unsafe {
        ontic_measurement_free(back);
        ontic_measurement_free(meas);
        ontic_state_free(psi);
        ontic_model_free(model);
    }
}

#[test]
fn custom_layout_constructors_accept_state_handles() {
    let mut anchor = ptr::null_mut();
    assert_eq!(unsafe { ontic_state_random(4, 2, &mut anchor) }, OnticStatus::Ok);
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { ontic_model_general_cap(anchor, &mut model) }, OnticStatus::Ok);
    let mut d = 0usize;
    assert_eq!(unsafe { ontic_model_d(model, &mut d) }, OnticStatus::Ok);
    assert_eq!(d, 4);
    let name = unsafe { CStr::from_ptr(ontic_model_name(model)) };
    assert_eq!(name.to_str().unwrap(), "general-cap");
    unsafe {
        ontic_model_free(model);
        ontic_state_free(anchor);
    }

    // A non-orthonormal basis is rejected cleanly.
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ontic_state_basis(2, 0, &mut a) }, OnticStatus::Ok);
    assert_eq!(unsafe { ontic_state_basis(2, 0, &mut b) }, OnticStatus::Ok);
    let dup = [a as *const OnticPureState, b as *const OnticPureState];
    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { ontic_model_basis_cap(dup.as_ptr(), 2, &mut bad) },
        OnticStatus::Domain
    );
    unsafe {
        ontic_state_free(a);
        ontic_state_free(b);
    }
}
