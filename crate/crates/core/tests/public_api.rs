use approx::assert_relative_eq;
use nystrom_core::{
    bandwidth_heuristic, build_kernel_matrix, build_nystrom_pair, evd_baseline, fixture,
    modified_nystrom, reconstruct, standard_nystrom, uniform_sample, DataMatrix, ErrorEvaluator,
    ErrorRoute, KernelConfig, NormKind, RngSeed, DEFAULT_PINV_TOL,
};

#[test]
fn example1_through_the_public_api() {
    let k = fixture("example1").unwrap();
    let pair = nystrom_core::NystromPair::from_kernel_columns(&k, &[0, 1]).unwrap();
    let eval = ErrorEvaluator::new(k, ErrorRoute::Exact).unwrap();
    let s = standard_nystrom(&pair, 1, DEFAULT_PINV_TOL).unwrap();
    let q = modified_nystrom(&pair, 1, DEFAULT_PINV_TOL).unwrap();
    assert_relative_eq!(eval.relative_error(&s, NormKind::Trace).unwrap(), 101.0 / 102.01, epsilon = 1e-12);
    assert_relative_eq!(eval.relative_error(&q, NormKind::Trace).unwrap(), 1.01 / 102.01, epsilon = 1e-12);
}

#[test]
fn gaussian_pipeline_end_to_end() {
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let t = i as f64 / 10.0;
            vec![t.sin(), t.cos(), 0.1 * t]
        })
        .collect();
    let x = DataMatrix::from_rows(&rows).unwrap();
    let cfg = KernelConfig::gaussian(bandwidth_heuristic(&x).unwrap()).unwrap();
    let k = build_kernel_matrix(&x, &cfg, 1000).unwrap();
    let lm = uniform_sample(60, 8, RngSeed(3)).unwrap();
    let pair = build_nystrom_pair(&x, &lm, &cfg).unwrap();

    let base = evd_baseline(&k, 3, 1000).unwrap();
    let std_f = standard_nystrom(&pair, 3, DEFAULT_PINV_TOL).unwrap();
    let mod_f = modified_nystrom(&pair, 3, DEFAULT_PINV_TOL).unwrap();
    for f in [&base, &std_f, &mod_f] {
        assert_eq!(f.rank(), 3);
        assert_eq!(reconstruct(f, 1000).unwrap().nrows(), 60);
    }

    let eval = ErrorEvaluator::new(k, ErrorRoute::Auto).unwrap();
    let e = |f| eval.relative_error(f, NormKind::Trace).unwrap();
    assert!(e(&base) <= e(&mod_f) + 1e-9);
    assert!(e(&mod_f) <= e(&std_f) + 1e-9);
}
