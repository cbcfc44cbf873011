//! Shared CLI plumbing: worker pools, state specifications, and output
//! emission.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ontic_core::epistemic::cap_threshold;
use ontic_core::qstate::{direction_at_fidelity, haar_random, PureState};
use ontic_core::Model;

use crate::Format;

/// Runs `f` inside a dedicated rayon pool when a worker count is given,
/// otherwise on the default global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        Some(n) => {
            if n == 0 {
                bail!("--workers must be at least 1");
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building worker pool")?;
            pool.install(f)
        }
        None => f(),
    }
}

/// How a CLI flag names a prepared state.
pub enum StateSpec {
    /// Haar-random in dimension d.
    Random,
    /// The model's ordering anchor.
    Anchor,
    /// Random state inside one of the model's cap regions.
    Cap,
    /// Deserialized from a JSON file.
    File(PathBuf),
}

impl StateSpec {
    pub fn parse(raw: &str) -> StateSpec {
        match raw {
            "random" => StateSpec::Random,
            "anchor" => StateSpec::Anchor,
            "cap" => StateSpec::Cap,
            path => StateSpec::File(PathBuf::from(path)),
        }
    }

    /// Produces the concrete state. `which` selects among multiple cap
    /// anchors (round-robin) so callers can spread states across regions.
    pub fn realize(&self, model: &Model, which: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
        let d = model.d();
        match self {
            StateSpec::Random => Ok(haar_random(d, rng)?),
            StateSpec::Anchor => Ok(model.ordering_anchor()),
            StateSpec::Cap => in_cap_state(model, which, rng),
            StateSpec::File(path) => load_state(path, d),
        }
    }
}

/// Samples a state with fidelity to a cap anchor strictly above the
/// membership threshold. For multi-region models `which` picks the anchor
/// round-robin; the Bell model has no regions, so the cap is taken around
/// the ordering anchor.
pub fn in_cap_state(model: &Model, which: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    let regions = model.regions();
    let anchor = if regions.is_empty() {
        model.ordering_anchor()
    } else {
        regions[which % regions.len()].anchor_state()
    };
    let threshold = cap_threshold(model.d());
    // Strictly interior draw: u in (0, 1] keeps the fidelity above the
    // threshold, and capping at 1 absorbs rounding.
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..=1.0);
    let f = (threshold + (1.0 - threshold) * u).min(1.0);
    Ok(direction_at_fidelity(&anchor, f, rng)?)
}

/// Deterministic RNG for CLI-side draws. The stream namespace sits above
/// every namespace the library uses for the same seed.
pub fn cli_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((16 << 32) + stream);
    rng
}

fn load_state(path: &Path, d: usize) -> Result<PureState> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading state file {}", path.display()))?;
    let state: PureState =
        serde_json::from_str(&raw).with_context(|| format!("parsing state file {}", path.display()))?;
    if state.dim() != d {
        bail!(
            "state file {} has dimension {}, expected {}",
            path.display(),
            state.dim(),
            d
        );
    }
    Ok(state)
}

/// Writes machine-readable output to `--out` or stdout.
pub fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).context("serializing report")?;
    text.push('\n');
    Ok(text)
}

/// Joins a header and rows into CSV. Fields never contain commas or
/// quotes, so no escaping is needed.
pub fn to_csv(header: &str, rows: &[String]) -> String {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    text
}

/// Renders the machine output in the requested format.
pub fn emit_report<T: serde::Serialize>(
    common_out: &Option<PathBuf>,
    format: Format,
    report: &T,
    csv: impl FnOnce() -> String,
) -> Result<()> {
    let content = match format {
        Format::Json => to_json(report)?,
        Format::Csv => csv(),
    };
    emit(common_out, &content)
}
