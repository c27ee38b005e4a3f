// Final error as a function of the sampling rate, both modes, as CSV.
//
// `cargo run --release --example alpha_sweep > sweep.csv`

use kaczmarz_phase::harness::{sweep, ExperimentConfig};
use kaczmarz_phase::ModeTag;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 32;
    let base = ExperimentConfig::new(n, 1.0, ModeTag::Finite)
        .trials(8)
        .seed(11)
        .stride(10 * n);
    let report = sweep(&[4.0, 6.0, 8.0, 12.0], &base)?;
    print!("{}", report.to_csv_string());
    for mode in [ModeTag::Finite, ModeTag::Online] {
        for (alpha, v) in report.final_medians(mode) {
            eprintln!("{mode:>6} alpha = {alpha:<4} final median {v:.3e}");
        }
    }
    eprintln!(
        "finite-mode error decreases with alpha: {}",
        report.strictly_decreasing(ModeTag::Finite)
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
