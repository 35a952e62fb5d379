use covnorm::covmodel::{build_spiked, coordinate_frame, substream, CovarianceSpec, SpikedParams};
use covnorm::estar::kl_upper_bound;
use covnorm::mcsim::{extreme_eigs, run_replications, simulate_sample_cov};
use covnorm::spiked::psi_clamped;
use faer::Mat;

fn rotated_frame(p: usize, r: usize) -> Mat<f64> {
    // Orthonormal columns spread over every coordinate.
    let h = (p as f64).sqrt();
    Mat::from_fn(p, r, |i, j| {
        let angle = std::f64::consts::PI * ((2 * i + 1) * (j + 1)) as f64 / (2 * p) as f64;
        angle.cos() * (2.0f64).sqrt() / h
    })
}

#[test]
fn large_n_sample_covariance_is_within_envelope() {
    let specs = vec![
        CovarianceSpec::identity(4).unwrap(),
        CovarianceSpec::new(vec![3.0, 1.0, 0.2], vec![1, 2, 3]).unwrap(),
        build_spiked(&SpikedParams::new(6, 100_000, 2, 4.0).unwrap(), Some(&rotated_frame(6, 2))).unwrap(),
    ];
    let n = 100_000;
    for (k, spec) in specs.iter().enumerate() {
        let sigma_hat = simulate_sample_cov(spec, n, &mut substream(21, k as u64)).unwrap();
        let err = extreme_eigs(&(&sigma_hat - spec.dense())).unwrap().op_norm() / spec.op_norm();
        let envelope = 2.0 * kl_upper_bound(spec, n);
        assert!(err <= envelope, "spec {k}: {err} > {envelope}");
    }
}

#[test]
fn spiked_frame_does_not_change_the_spectrum() {
    let params = SpikedParams::new(30, 25, 2, 5.0).unwrap();
    let coord = build_spiked(&params, None).unwrap();
    let rotated = build_spiked(&params, Some(&rotated_frame(30, 2))).unwrap();
    let a = run_replications(&coord, 25, 200, 4, Some(&coordinate_frame(30, 2))).unwrap();
    let b = run_replications(&rotated, 25, 200, 5, Some(&rotated_frame(30, 2))).unwrap();
    for (x, y) in [(a.op_norm, b.op_norm), (a.proj_sq.unwrap(), b.proj_sq.unwrap())] {
        let se = (x.std_error.powi(2) + y.std_error.powi(2)).sqrt();
        assert!((x.mean - y.mean).abs() <= 4.0 * se, "{x:?} vs {y:?}");
    }
}

#[test]
fn operator_norm_envelope_on_small_specs() {
    let specs = vec![
        CovarianceSpec::identity(20).unwrap(),
        CovarianceSpec::new(vec![5.0, 1.0], vec![2, 18]).unwrap(),
        CovarianceSpec::new(vec![1.0, 0.5, 0.1], vec![3, 10, 27]).unwrap(),
    ];
    for (k, spec) in specs.iter().enumerate() {
        for n in [10usize, 40, 160] {
            let sum = run_replications(spec, n, 60, 100 + k as u64, None).unwrap();
            let ratio = spec.effective_rank() / n as f64;
            let scale = spec.op_norm();
            let se = 3.0 * sum.op_norm.std_error / scale;
            let mean = sum.op_norm.mean / scale;
            let lower = 0.1 * ratio.sqrt() * ratio.max(1.0).sqrt() - se;
            let upper = (1.0 + 3.0 / spec.effective_rank().sqrt()) * (2.0 * ratio.sqrt() + ratio) + se;
            assert!(mean >= lower && mean <= upper, "spec {k}, n {n}: {mean} not in [{lower}, {upper}]");
        }
    }
}

#[test]
fn desk_scale_spiked_runs() {
    let (p, n) = (500usize, 500usize);
    let frame = coordinate_frame(p, 1);
    let run = |lambda: f64, seed: u64| {
        let params = SpikedParams::new(p, n, 1, lambda).unwrap();
        let spec = build_spiked(&params, None).unwrap();
        (params.delta(), run_replications(&spec, n, 200, seed, Some(&frame)).unwrap())
    };

    let (delta, null) = run(0.0, 31);
    let target = 2.0 * delta.sqrt() + delta;
    assert!(
        (null.op_norm.mean - target).abs() <= 3.0 * null.op_norm.std_error + 0.05,
        "{:?} vs {target}",
        null.op_norm
    );

    let (delta, three) = run(3.0, 32);
    let psi = psi_clamped(delta, 3.0);
    assert!((psi - 3.07).abs() < 0.01);
    assert!((three.op_norm.mean - psi).abs() <= 0.05 * psi, "{:?} vs {psi}", three.op_norm);

    let (_, five) = run(5.0, 33);
    assert!(five.plus_fraction() >= 0.95, "λ₊ side in {}", five.plus_fraction());
}
