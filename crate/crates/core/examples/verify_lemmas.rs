// Monte Carlo checks of the concentration lemmas at reduced sizes.
// `kpr verify --suite all` runs the full-size versions.
//
// `cargo run --release --example verify_lemmas`

use kaczmarz_phase::harness::{run_suite, Suite, VerifyParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let runs = [
        (
            Suite::Lemma2,
            VerifyParams {
                n: Some(2000),
                trials: Some(1000),
                ..VerifyParams::with_seed(1)
            },
        ),
        (
            Suite::Lemma3,
            VerifyParams {
                n: Some(32),
                p: Some(256),
                trials: Some(200),
                ..VerifyParams::with_seed(2)
            },
        ),
        (
            Suite::Lemma4,
            VerifyParams {
                m: Some(20_000),
                trials: Some(20),
                ..VerifyParams::with_seed(3)
            },
        ),
        (
            Suite::Step,
            VerifyParams {
                trials: Some(500),
                ..VerifyParams::with_seed(4)
            },
        ),
        (
            Suite::Expectation,
            VerifyParams {
                draws: Some(20_000),
                ..VerifyParams::with_seed(5)
            },
        ),
    ];
    let mut failures = 0;
    for (suite, params) in runs {
        for report in run_suite(suite, &params)? {
            println!("{report}");
            failures += usize::from(!report.passed());
        }
    }
    if failures > 0 {
        return Err(format!("{failures} checks failed").into());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
