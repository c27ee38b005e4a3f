// Recover a signal from magnitude-only measurements: spectral start, then
// randomized Kaczmarz steps cycling through a fixed pool of measurements.
//
// `cargo run --example recover_signal`

use kaczmarz_phase::{
    measure, phase_dist, run, spectral_init, InitConfig, RunOptions, SamplingMode, SensingPool,
    Signal,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, m) = (64, 8 * 64);
    let x_star = Signal::random_unit(n, 1)?;
    let pool = SensingPool::generate(n, m, 2)?;
    let y = measure(&pool, &x_star)?;

    let init = spectral_init(&pool, &y, &InitConfig::with_seed(3))?;
    let d0 = phase_dist(&init.x0, &x_star)?;
    println!(
        "spectral start: distance {d0:.4} after {} power sweeps (converged: {})",
        init.sweeps, init.converged
    );

    let mode = SamplingMode::Finite {
        pool: &pool,
        measurements: &y,
    };
    let opts = RunOptions {
        trace_stride: 8 * n,
        ..RunOptions::default()
    };
    let trace = run(&init.x0, &x_star, &mode, 40 * n, 4, &opts)?;
    for (t, d) in trace.iters.iter().zip(&trace.sq_dist) {
        println!("  t = {t:>5}  dist^2 = {d:.3e}");
    }
    let d = phase_dist(&trace.final_iterate, &x_star)?;
    println!("recovered up to global sign: distance {d:.3e}");
    if d > 1e-4 * x_star.norm() {
        return Err(format!("recovery failed: distance {d}").into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
