//! Reference values computed independently at 30 significant digits
//! (arbitrary-precision quadrature and root finding), frozen here.

use elastica::disk::{modes_for_k, ModeFamily};
use elastica::elastic::{
    b_cflv, b_liu, rayleigh_root, weyl_a, BoundaryCondition, LameParams,
};
use elastica::specfun::{bessel_j, bessel_zeros, gamma_fn};
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn rayleigh_root_at_one_third() {
    let r = rayleigh_root(1.0 / 3.0).unwrap();
    assert!(rel(r.w1, 0.845299461620748470981702438996) < 1e-14);
    assert!(rel(r.gamma_r, 0.919401686761966121955268019809) < 1e-14);
}

#[test]
fn cflv_boundary_coefficients() {
    let cases = [
        (1.0, 1.0, 2, -0.142779234678964412, 0.165802506330631817),
        (1.0, 1.0, 3, -0.0530516476972984453, 0.0663145596216230535),
        (1.0, 2.0, 2, -0.144194828770761822, 0.158987289262217206),
        (2.0, 0.0, 3, -0.0265258238486492226, 0.0397887357729738339),
    ];
    for (mu, lam, n, bm, bp) in cases {
        let p = LameParams::new(mu, lam).unwrap();
        let m = b_cflv(&p, n, BoundaryCondition::Dirichlet).unwrap();
        let f = b_cflv(&p, n, BoundaryCondition::Free).unwrap();
        assert!(rel(m, bm) < 1e-11, "({mu},{lam},{n}) minus {m} vs {bm}");
        assert!(rel(f, bp) < 1e-11, "({mu},{lam},{n}) plus {f} vs {bp}");
    }
}

#[test]
fn liu_coefficients_at_decoupled_point() {
    let p = LameParams::new(1.0, -1.0).unwrap();
    let m = b_liu(&p, 2, BoundaryCondition::Dirichlet).unwrap();
    assert!(rel(m, -1.0 / (2.0 * PI)) < 1e-15);
    assert!(rel(weyl_a(&p, 2).unwrap(), 1.0 / (2.0 * PI)) < 1e-15);
}

#[test]
fn gamma_reference_values() {
    assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-15);
    assert!(rel(gamma_fn(0.1).unwrap(), 9.51350769866873128580797989582) < 1e-14);
    assert!(rel(gamma_fn(5.5).unwrap(), 52.3427777845535201811490084924) < 1e-14);
    assert!(rel(gamma_fn(33.7).unwrap(), 3.03216265473987178706514989506e36) < 1e-13);
}

#[test]
fn bessel_reference_values() {
    let j0 = bessel_zeros(0, 3).unwrap();
    assert!(rel(j0[0], 2.40482555769577276862163187933) < 1e-15);
    assert!(rel(j0[2], 8.65372791291101221695419871266) < 1e-15);
    let j5 = bessel_zeros(5, 1).unwrap();
    assert!(rel(j5[0], 8.77148381595995401912286713341) < 1e-14);
    assert!(rel(bessel_j(3, 2.5).unwrap(), 0.216600391039113524766689003516) < 1e-14);
    assert!(rel(bessel_j(40, 60.0).unwrap(), -0.077646197404715064971205576717) < 1e-11);
}

#[test]
fn disk_roots_match_independent_root_finding() {
    let p = LameParams::new(1.0, 1.0).unwrap();
    let d1 = modes_for_k(1, &p, BoundaryCondition::Dirichlet, 12.0).unwrap();
    assert!(rel(d1[0].lambda_ev, 11.3221446428005833405694091790) < 1e-12);
    let f1 = modes_for_k(1, &p, BoundaryCondition::Free, 8.0).unwrap();
    assert!(rel(f1[0].lambda_ev, 7.60152390900812686021960382157) < 1e-12);
    let f2 = modes_for_k(2, &p, BoundaryCondition::Free, 6.0).unwrap();
    assert!(rel(f2[0].lambda_ev, 5.50483024893831540525714375758) < 1e-12);
    let f0 = modes_for_k(0, &p, BoundaryCondition::Free, 13.0).unwrap();
    let comp = f0.iter().find(|m| m.family == ModeFamily::CompressionalK0).unwrap();
    assert!(rel(comp.lambda_ev, 12.8472304461900865549500604232) < 1e-12);
}
