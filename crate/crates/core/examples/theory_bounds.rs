// Contraction constants, the mismatch-fraction bound and log-domain failure
// probabilities across sampling rates and error levels.
//
// `cargo run --example theory_bounds`

use kaczmarz_phase::harness::{compute_bounds, BoundsOptions};
use kaczmarz_phase::theory::{alpha0, c2_small_error, solve_beta0};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("threshold alpha0 = {:.4}", alpha0());
    println!("alpha  c2_small_err");
    for alpha in [4.0, 6.0, 7.4641, 8.0, 12.0, 20.0] {
        println!("{alpha:>5}  {:>12.5}", c2_small_error(alpha));
    }

    println!("\nbeta0 at alpha = 10 as the relative error grows");
    for rho in [0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.1] {
        let b = solve_beta0(10.0, rho)?;
        println!("  rho = {rho:<7} beta0 = {:.5e} ({:?})", b.beta0, b.status);
    }

    for alpha in [12.0, 4.0] {
        let (bounds, warnings) = compute_bounds(alpha, 256, 0.0, &BoundsOptions::default())?;
        println!("\n{}", bounds.to_json());
        for w in warnings {
            println!("warning: {w}");
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
