use ontic_core::qstate::haar_random;
use ontic_core::{verify, Model};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ontic_core::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let model = Model::qubit_hemisphere();

    let psi = haar_random(2, &mut rng)?;
    let meas = verify::random_ordered_measurement(&model, &mut rng)?;
    let mu = model.prepare(&psi)?;
    let lambda = mu.sample(&mut rng);
    let outcome = model.respond(&lambda, &meas)?;
    println!("one trial answered outcome {outcome}");

    let report = verify::run_born_trials(&model, &psi, &meas, 1_000_000, 7)?;
    assert!(report.verdict.passed());
    println!(
        "tv distance {:.2e} at p = {:.3}",
        report.tv_distance, report.p_value
    );
    Ok(())
}
