// Quality of the spectral starting point as the number of measurements grows.
//
// `cargo run --release --example spectral_init`

use kaczmarz_phase::model::dot;
use kaczmarz_phase::{measure, spectral_init, InitConfig, SensingPool, Signal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 48;
    println!("alpha  |corr(x0, x*)|  ||x0||/||x*||  sweeps");
    for (i, alpha) in [2usize, 4, 8, 16].into_iter().enumerate() {
        let seed = 100 + i as u64;
        let x_star = Signal::random_unit(n, seed)?.scaled(3.0);
        let pool = SensingPool::generate(n, alpha * n, seed + 50)?;
        let y = measure(&pool, &x_star)?;
        let est = spectral_init(&pool, &y, &InitConfig::with_seed(seed))?;
        let corr = dot(&est.x0, &x_star).abs() / (est.x0.norm() * x_star.norm());
        println!(
            "{alpha:>5}  {corr:>14.4}  {:>13.4}  {:>6}",
            est.x0.norm() / x_star.norm(),
            est.sweeps
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
