// The expected next error over the random row index is a finite average,
// so it can be computed exactly for a pool the iterate depends on. This
// compares it with simulated single steps and splits it by the rows whose
// sign estimate is wrong.
//
// `cargo run --release --example exact_expectation`

use kaczmarz_phase::checks::expectation_instance;
use kaczmarz_phase::theory::{decompose_step_expectation, expected_step_sq_error, mismatch_set};
use kaczmarz_phase::{measure, SensingPool, Signal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, m) = (8, 40);
    let pool = SensingPool::generate(n, m, 7)?;
    let x_star = Signal::random_unit(n, 8)?;
    let y = measure(&pool, &x_star)?;
    let dir = Signal::random_unit(n, 9)?;

    println!("||e||    mismatches  E||e'||^2/||e||^2  correct   mismatch");
    for spread in [1e-3, 0.05, 0.2, 0.5, 1.0] {
        let x_prev = Signal::new(
            x_star
                .iter()
                .zip(dir.iter())
                .map(|(s, d)| s + spread * d)
                .collect(),
        )?;
        let exact = expected_step_sq_error(&pool, &y, &x_star, &x_prev)?;
        let split = decompose_step_expectation(&pool, &x_star, &x_prev)?;
        let s = mismatch_set(&pool, &x_star, &x_prev)?;
        println!(
            "{spread:<8} {:>10}  {:>17.5}  {:>8.5}  {:>8.5}",
            s.indices.len(),
            exact / split.e_sq,
            split.correct_term / split.e_sq,
            split.mismatch_term / split.e_sq,
        );
    }

    println!("\nexact vs simulated mean of 20000 single steps");
    for seed in 0..4 {
        let s = expectation_instance(n, m, 20_000, seed, 0.5)?;
        println!(
            "  exact {:.6}  simulated {:.6}  z = {:+.2}",
            s.exact,
            s.mc_mean,
            s.z_score()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
