//! Quadrature study of von Neumann's Gaussian idempotent at the reference
//! settings (D = 48, half-width 8, spacing 0.1).

use std::f64::consts::PI;

use moyal_core::weyl::{
    build_fock_rep, build_vonneumann_a, check_a_idempotent, check_primitivity, gaussian_weight, n_coefficient,
    vacuum_projector, weyl_quantize, CMatrix, FockOperator, FockRep, QuadratureBox,
};
use moyal_core::Error;
use num_complex::Complex64;

fn reference() -> (FockRep, QuadratureBox, FockOperator) {
    let rep = build_fock_rep(48).unwrap();
    let bx = QuadratureBox::from_spacing(8.0, 0.1).unwrap();
    let a = build_vonneumann_a(&rep, &bx).unwrap();
    (rep, bx, a)
}

#[test]
fn reference_settings() {
    let (rep, bx, a) = reference();
    let idem = check_a_idempotent(&a);
    let prim = check_primitivity(&rep, &a, 1.0, 1.0).unwrap();
    println!("idempotency {idem:.4e}, primitivity {prim:.4e}");
    assert!(idem < 1e-4);
    assert!(prim < 1e-3);

    let omega = vacuum_projector(&rep);
    let vac = (a.values() / Complex64::new(2.0 * PI, 0.0) - omega.values())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(vac < 1e-4, "{vac}");
    assert!((a.trace().re / (2.0 * PI) - 1.0).abs() < 1e-3);
    assert!(a.hermiticity_residual() < 1e-8 * a.values().norm());

    let s = a.singular_values();
    assert!(s[1] < 1e-3 * s[0]);

    // primitivity at the origin is the idempotency residual
    let p0 = check_primitivity(&rep, &a, 0.0, 0.0).unwrap();
    assert!((p0 - idem).abs() < 1e-12);
    let pm = check_primitivity(&rep, &a, -1.0, -1.0).unwrap();
    assert!((pm - prim).abs() < 1e-10);

    // the Gaussian coefficient goes through the same quadrature
    let coeff = bx.sample(|x, y| Complex64::new(gaussian_weight(x, y), 0.0));
    let q = weyl_quantize(&rep, &bx, &coeff).unwrap();
    assert_eq!(q.values(), a.values());

    // with a = b = 1 the Gaussian coefficient n(alpha, beta) is the same weight
    let coeff_n = bx.sample(|x, y| Complex64::new(n_coefficient(x, y, 1.0, 1.0).unwrap(), 0.0));
    let qn = weyl_quantize(&rep, &bx, &coeff_n).unwrap();
    let ratio = qn.trace() / a.trace();
    let rel = (qn.values() - a.values() * ratio).norm() / a.values().norm();
    assert!(rel < 1e-6);

    let zero = weyl_quantize(&rep, &bx, &CMatrix::zeros(bx.n_alpha, bx.n_beta)).unwrap();
    assert!(zero.values().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn exact_projector_is_idempotent() {
    let rep = build_fock_rep(16).unwrap();
    let omega = vacuum_projector(&rep);
    let a = FockOperator::new(&rep, omega.values() * Complex64::new(2.0 * PI, 0.0), "2 pi Omega").unwrap();
    assert!(check_a_idempotent(&a) < 1e-15);
}

#[test]
fn refinement_reduces_residuals() {
    let rep = build_fock_rep(48).unwrap();
    let mut idem = Vec::new();
    let mut prim = Vec::new();
    for h in [0.2, 0.1, 0.05] {
        let bx = QuadratureBox::from_spacing(8.0, h).unwrap();
        let a = build_vonneumann_a(&rep, &bx).unwrap();
        idem.push(check_a_idempotent(&a));
        prim.push(check_primitivity(&rep, &a, 1.0, 1.0).unwrap());
    }
    println!("idempotency {idem:?}\nprimitivity {prim:?}");
    assert!(idem[2] < idem[1] && idem[1] < idem[0]);
    assert!(prim[2] < prim[1]);
}

#[test]
fn inadequate_boxes_are_rejected() {
    let rep = build_fock_rep(24).unwrap();
    let narrow = QuadratureBox::from_spacing(4.0, 0.1).unwrap();
    assert!(matches!(build_vonneumann_a(&rep, &narrow), Err(Error::InvalidParameter { .. })));
    let coarse = QuadratureBox::from_spacing(8.0, 0.5).unwrap();
    assert!(matches!(build_vonneumann_a(&rep, &coarse), Err(Error::InvalidParameter { .. })));
    assert!(QuadratureBox::new(8.0, 8.0, 8, 8).is_err());
    // a flat coefficient does not decay at the edge
    let bx = QuadratureBox::from_spacing(6.0, 0.25).unwrap();
    let flat = CMatrix::from_element(bx.n_alpha, bx.n_beta, Complex64::new(1.0, 0.0));
    assert!(matches!(weyl_quantize(&rep, &bx, &flat), Err(Error::InvalidParameter { .. })));
    // nodes beyond the calibrated range of a small representation
    let small = build_fock_rep(8).unwrap();
    assert!(matches!(build_vonneumann_a(&small, &bx), Err(Error::TruncationRange { .. })));
}
