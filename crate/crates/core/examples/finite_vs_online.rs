// Data reuse versus fresh measurements at the same iteration budget.
//
// `cargo run --release --example finite_vs_online`

use kaczmarz_phase::harness::{simulate, ExperimentConfig};
use kaczmarz_phase::ModeTag;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (n, alpha) = (64, 6.0);
    let mut finals = Vec::new();
    for mode in [ModeTag::Finite, ModeTag::Online] {
        let cfg = ExperimentConfig::new(n, alpha, mode)
            .trials(10)
            .seed(5)
            .stride(4 * n);
        let s = simulate(&cfg)?;
        println!("{mode:>6}: median dist^2 by iteration");
        for (t, v) in s.iters.iter().zip(&s.median) {
            println!("        t = {t:>5}  {v:.3e}");
        }
        finals.push(s.final_median());
    }
    println!(
        "final median: finite {:.3e}, online {:.3e} (ratio {:.1})",
        finals[0],
        finals[1],
        finals[0] / finals[1]
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
