//! Named verification suites over [`crate::checks`].

use crate::checks::{
    check_expectation_oracle, check_extremal_eigs, check_norm_concentration, check_order_stats,
    check_step_identities, LemmaReport,
};
use crate::error::Result;

use super::config::Suite;

/// Optional overrides; each suite fills the rest from its defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub t: Option<f64>,
    pub eps: Option<f64>,
    pub alpha: Option<f64>,
    pub trials: Option<usize>,
    pub draws: Option<usize>,
    pub seed: u64,
}

impl VerifyParams {
    pub fn with_seed(seed: u64) -> Self {
        VerifyParams {
            seed,
            ..Default::default()
        }
    }
}

/// Runs a suite. `Suite::All` runs every suite with its defaults and only
/// honours `seed`.
pub fn run_suite(suite: Suite, p: &VerifyParams) -> Result<Vec<LemmaReport>> {
    let seed = p.seed;
    Ok(match suite {
        Suite::Lemma2 => vec![check_norm_concentration(
            p.n.unwrap_or(10_000),
            p.trials.unwrap_or(10_000),
            p.eps.unwrap_or(0.5),
            seed,
        )?],
        Suite::Lemma3 => {
            let r = check_extremal_eigs(
                p.n.unwrap_or(64),
                p.p.unwrap_or(512),
                p.trials.unwrap_or(2000),
                p.eps.unwrap_or(0.5),
                seed,
            )?;
            vec![r.max, r.min]
        }
        Suite::Lemma4 => {
            let m = p.m.unwrap_or(100_000);
            let trials = p.trials.unwrap_or(50);
            let ts = match p.t {
                Some(t) => vec![t],
                None => vec![0.1, 0.5, 1.0],
            };
            ts.into_iter()
                .map(|t| check_order_stats(m, t, trials, seed))
                .collect::<Result<_>>()?
        }
        Suite::Step => vec![check_step_identities(
            p.n.unwrap_or(16),
            p.alpha.unwrap_or(6.0),
            p.trials.unwrap_or(10_000),
            seed,
        )?],
        Suite::Expectation => vec![check_expectation_oracle(
            p.n.unwrap_or(8),
            p.m.unwrap_or(40),
            p.trials.unwrap_or(20),
            p.draws.unwrap_or(100_000),
            seed,
        )?],
        Suite::All => {
            let base = VerifyParams::with_seed(seed);
            let mut all = Vec::new();
            for s in [
                Suite::Lemma2,
                Suite::Lemma3,
                Suite::Lemma4,
                Suite::Step,
                Suite::Expectation,
            ] {
                all.extend(run_suite(s, &base)?);
            }
            all
        }
    })
}
