use kaczmarz_phase::model::dot;
use kaczmarz_phase::rng::derive_seed;
use kaczmarz_phase::{measure, spectral_init, InitConfig, SensingPool, Signal};
use nalgebra::DMatrix;

fn dense_top_eigvec(pool: &SensingPool, y: &[f64]) -> (Vec<f64>, f64) {
    let (n, m) = (pool.n(), pool.m());
    let mut d = DMatrix::<f64>::zeros(n, n);
    for (r, a) in pool.rows().enumerate() {
        let w = y[r] * y[r] / m as f64;
        for i in 0..n {
            for j in 0..n {
                d[(i, j)] += w * a[i] * a[j];
            }
        }
    }
    let eig = d.symmetric_eigen();
    let k = eig.eigenvalues.imax();
    (
        eig.eigenvectors.column(k).iter().copied().collect(),
        eig.eigenvalues[k],
    )
}

#[test]
fn power_iteration_matches_dense_eigensolver() {
    for seed in 0..6 {
        let x_star = Signal::random_unit(24, seed).unwrap();
        let pool = SensingPool::generate(24, 240, seed + 40).unwrap();
        let y = measure(&pool, &x_star).unwrap();
        let est = spectral_init(&pool, &y, &InitConfig::with_seed(seed)).unwrap();
        assert!(est.converged);
        let (v, lam) = dense_top_eigvec(&pool, y.values());
        let cos = dot(&v, &est.x0).abs() / est.x0.norm();
        assert!(1.0 - cos < 1e-10, "seed {seed}: cos {cos}");
        assert!((lam - est.eigenvalue).abs() <= 1e-9 * lam);
    }
}

fn median_correlation(n: usize, alpha: usize, trials: u64) -> f64 {
    let mut c: Vec<f64> = (0..trials)
        .map(|i| {
            let s = derive_seed(31, i);
            let x = Signal::random_unit(n, derive_seed(s, 0)).unwrap();
            let pool = SensingPool::generate(n, alpha * n, derive_seed(s, 1)).unwrap();
            let y = measure(&pool, &x).unwrap();
            let est = spectral_init(&pool, &y, &InitConfig::with_seed(derive_seed(s, 2))).unwrap();
            dot(&est.x0, &x).abs() / est.x0.norm()
        })
        .collect();
    c.sort_by(f64::total_cmp);
    c[c.len() / 2]
}

// The plain (untruncated) spectral estimate reaches a median correlation of
// about 0.87 at n = 64, alpha = 12, and crosses 0.9 near alpha = 20.
#[test]
fn correlation_grows_with_alpha() {
    let c12 = median_correlation(64, 12, 200);
    let c20 = median_correlation(64, 20, 200);
    assert!(c12 >= 0.85, "median correlation {c12}");
    assert!(c20 >= 0.9, "median correlation {c20}");
    assert!(c20 > c12);
}
