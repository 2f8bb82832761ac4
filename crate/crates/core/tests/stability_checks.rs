use srcseek::model::{FieldParams, SeekerParams};
use srcseek::seekers::AveragedScheme;
use srcseek::stability::{build_certificate, certify, eigenvalues, grid_margins, linearize_averaged, position_block};

#[test]
fn newton_spectrum_at_nominal_parameters() {
    let lin = linearize_averaged(
        AveragedScheme::Newton,
        &SeekerParams::default(),
        &FieldParams::default(),
    )
    .unwrap();
    let ev = lin.eigen_pairs();
    let expected = [
        [-1.0, 0.0],
        [-0.5, -0.75f64.sqrt()],
        [-0.5, 0.75f64.sqrt()],
        [-0.3, 0.0],
    ];
    for (got, want) in ev.iter().zip(expected) {
        assert!(
            (got[0] - want[0]).abs() < 1e-6 && (got[1] - want[1]).abs() < 1e-6,
            "{ev:?}"
        );
    }
}

#[test]
fn gradient_spectrum_depends_on_hessian() {
    let p = SeekerParams::default();
    let mut abscissae = Vec::new();
    for h in [0.01, 0.1, 1.0] {
        let f = FieldParams {
            hessian: h,
            ..Default::default()
        };
        let ev = eigenvalues(&position_block(AveragedScheme::Gradient, &p, &f).unwrap()).unwrap();
        abscissae.push(ev.iter().map(|l| l.re).fold(f64::MIN, f64::max));
    }
    assert!((abscissae[0] + 0.005).abs() < 1e-12);
    assert!(((abscissae[1] / abscissae[0]) / 10.0 - 1.0).abs() < 0.05);
    assert!(((abscissae[2] / abscissae[0]) / 100.0 - 1.0).abs() < 0.05);
}

#[test]
fn newton_block_is_hessian_independent() {
    let p = SeekerParams::default();
    let base = eigenvalues(&position_block(AveragedScheme::Newton, &p, &FieldParams::default()).unwrap()).unwrap();
    for h in [0.1, 1.0, 7.3] {
        let f = FieldParams {
            hessian: h,
            ..Default::default()
        };
        let ev = eigenvalues(&position_block(AveragedScheme::Newton, &p, &f).unwrap()).unwrap();
        for (a, b) in ev.iter().zip(&base) {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn certificate_soundness_over_random_parameters() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let c = build_certificate(
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
            0.01,
        )
        .unwrap();
        assert!(c.checks().pass(), "{:?}", c.checks());
        let m = grid_margins(&c, 40, 5.0, 2.0);
        assert!(m.max_vdot_margin <= 1e-9, "{m:?}");
        assert!(m.max_vdot_nonzero < 0.0);
    }
}

#[test]
fn full_report_passes_and_flags_quoted_real_parts() {
    let r = certify(&SeekerParams::default(), &FieldParams::default(), &[0.01, 0.1, 1.0], 7).unwrap();
    assert!(r.passed, "{r:#?}");
    for row in &r.linearization {
        assert!(!row.quoted_consistent, "{}", row.scheme);
    }
    let text = r.to_text().unwrap();
    assert!(text.contains("passed = true"));
    assert!(text.contains("[certificate]"));
    assert!(text.contains("lyapunov_residual"));
}
