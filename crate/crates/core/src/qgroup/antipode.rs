use super::algebra::SliceAlgebra;
use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::report::CheckReport;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{realign_left, PositiveOperator};

/// The coinverse on `A` as a matrix on basis coefficients.
#[derive(Clone, Debug)]
pub struct Kappa {
    pub matrix: Mat,
    /// Relative least-squares residual of `κ(B_s) = C_s` over all slices.
    pub consistency: f64,
    /// Largest distance of a slice of `W*` from `A`.
    pub range_leak: f64,
}

/// `κ((ω⊗id)W) = (ω⊗id)W*`, fitted by least squares over matrix-unit slices.
///
/// Fails with a precondition error when the slice relations are inconsistent
/// beyond `tol`, i.e. `κ` is not well defined on `A`.
pub fn kappa(w: &MultUnitary, a: &SliceAlgebra, tol: f64) -> Result<Kappa> {
    let k = kappa_fit(w, a)?;
    if !(k.consistency < tol) || !(k.range_leak < tol) {
        return Err(MuError::Precondition(format!(
            "coinverse ill-defined on the slice span: consistency {:e}, range leak {:e}",
            k.consistency, k.range_leak
        )));
    }
    Ok(k)
}

/// The least-squares fit behind [`kappa`], without the validity gate.
pub fn kappa_fit(w: &MultUnitary, a: &SliceAlgebra) -> Result<Kappa> {
    let d = w.h_dim();
    let slices_w = realign_left(w.op())?;
    let slices_w_star = realign_left(&w.op().adjoint())?;
    let r = a.rank();
    let n = slices_w.nrows();
    let mut b = Mat::zeros(r, n);
    let mut g = Mat::zeros(r, n);
    let mut range_leak: f64 = 0.0;
    for s in 0..n {
        let bs = linalg::unflatten(slices_w.row(s).iter().copied().collect::<Vec<_>>().as_slice(), d, d);
        let cs = linalg::unflatten(slices_w_star.row(s).iter().copied().collect::<Vec<_>>().as_slice(), d, d);
        for (mu, z) in a.coeffs(&bs).into_iter().enumerate() {
            b[(mu, s)] = z;
        }
        let gc = a.coeffs(&cs);
        range_leak = range_leak.max(linalg::op_norm(&(&cs - a.from_coeffs(&gc))));
        for (mu, z) in gc.into_iter().enumerate() {
            g[(mu, s)] = z;
        }
    }
    let matrix = linalg::lstsq(&b.transpose(), &g.transpose()).transpose();
    let scale = linalg::fro_norm(&g).max(f64::MIN_POSITIVE);
    let consistency = linalg::fro_norm(&(&matrix * &b - &g)) / scale;
    Ok(Kappa { matrix, consistency, range_leak })
}

/// Antimultiplicativity and `κ(κ(a)*)* = a` on basis elements.
pub fn check_kappa(a: &SliceAlgebra, k: &Kappa, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("coinverse", tol);
    report.push("consistency", k.consistency);
    report.push("range_leak", k.range_leak);
    let apply = |m: &Mat| a.apply(&k.matrix, m);
    let mut antimult: f64 = 0.0;
    for x in a.basis() {
        for y in a.basis() {
            antimult = antimult.max(linalg::op_norm(&(apply(&(x * y)) - apply(y) * apply(x))));
        }
    }
    report.push("antimultiplicative", antimult);
    let involution = a.basis().iter().map(|x| linalg::op_norm(&(apply(&apply(x).adjoint()).adjoint() - x))).fold(0.0, f64::max);
    report.push("star_involution", involution);
    report
}

/// `τ_t(m) = Q^{2it} m Q^{-2it}`; complex `t` continues analytically, so
/// `τ_{i/2}(m) = Q⁻¹mQ` and `τ_{-i/2}(m) = QmQ⁻¹`.
pub fn tau(q: &PositiveOperator, t: C64, m: &Mat) -> Mat {
    let z = C64::new(0.0, 2.0) * t;
    q.pow(z).data() * m * q.pow(-z).data()
}

/// Matrix of `τ_t` on the coefficients of `A`, with the largest leak out of `A`.
pub fn tau_matrix(a: &SliceAlgebra, q: &PositiveOperator, t: C64) -> (Mat, f64) {
    a.matrix_of(|m| tau(q, t, m))
}

/// `R = κ∘τ_{-i/2}` on `A`, and the checks of the polar decomposition.
///
/// Residuals: `tau_leak` (τ_{±i/2} and τ_t keep `A`), `involution` (`R² = id`),
/// `antimultiplicative`, `star` (`R(a*) = R(a)*`), `commutes_tau` over
/// `t_samples`, `polar` (`‖κ − R∘τ_{i/2}‖` on coefficients).
pub fn unitary_antipode(a: &SliceAlgebra, k: &Kappa, q: &PositiveOperator, t_samples: &[f64], tol: f64) -> (Mat, CheckReport) {
    let mut report = CheckReport::new("unitary antipode", tol);
    let (minus_half, leak_m) = tau_matrix(a, q, C64::new(0.0, -0.5));
    let (plus_half, leak_p) = tau_matrix(a, q, C64::new(0.0, 0.5));
    let r = &k.matrix * &minus_half;
    let id = Mat::identity(a.rank(), a.rank());
    let mut leak = leak_m.max(leak_p);
    let mut commutes: f64 = 0.0;
    for &t in t_samples {
        let (tt, l) = tau_matrix(a, q, C64::new(t, 0.0));
        leak = leak.max(l);
        commutes = commutes.max(linalg::op_norm(&(&r * &tt - &tt * &r)));
    }
    report.push("tau_leak", leak);
    report.push("involution", linalg::op_norm(&(&r * &r - &id)));
    let apply = |m: &Mat| a.apply(&r, m);
    let mut antimult: f64 = 0.0;
    for x in a.basis() {
        for y in a.basis() {
            antimult = antimult.max(linalg::op_norm(&(apply(&(x * y)) - apply(y) * apply(x))));
        }
    }
    report.push("antimultiplicative", antimult);
    report.push("star", a.basis().iter().map(|x| linalg::op_norm(&(apply(&x.adjoint()) - apply(x).adjoint()))).fold(0.0, f64::max));
    report.push("commutes_tau", commutes);
    report.push("polar", linalg::op_norm(&(&k.matrix - &r * &plus_half)));
    (r, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qgroup::algebra::algebra_left;
    use crate::tensor::linalg::{c, real_matrix};
    use crate::tensor::{Operator, Space};
    use crate::workbench::{gen_group_kt, GroupTable};

    fn kt(t: &GroupTable) -> (MultUnitary, SliceAlgebra) {
        let w = gen_group_kt(t).unwrap();
        let a = algebra_left(&w).unwrap();
        (w, a)
    }

    #[test]
    fn cnot_kappa_is_identity() {
        let (w, a) = kt(&GroupTable::cyclic(2));
        let k = kappa(&w, &a, 1e-10).unwrap();
        assert!(linalg::max_abs(&(&k.matrix - Mat::identity(2, 2))) < 1e-12);
        let q = PositiveOperator::identity(&Space::hilbert(2));
        let (r, rep) = unitary_antipode(&a, &k, &q, &[0.3], 1e-10);
        assert!(rep.is_pass());
        assert!(linalg::max_abs(&(r - Mat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn kappa_inverts_group_elements() {
        for t in [GroupTable::cyclic(3), GroupTable::symmetric(3)] {
            let (w, a) = kt(&t);
            let k = kappa(&w, &a, 1e-10).unwrap();
            assert!(check_kappa(&a, &k, 1e-10).is_pass());
            for g in 0..t.order() {
                let image = a.apply(&k.matrix, &t.left_regular(g));
                let rounded = image.map(|z| c(z.re.round(), z.im.round()));
                assert_eq!(rounded, t.left_regular(t.inverse(g)));
                assert!(linalg::max_abs(&(image - t.left_regular(t.inverse(g)))) < 1e-12);
            }
            let unit = a.apply(&k.matrix, &Mat::identity(t.order(), t.order()));
            assert!(linalg::max_abs(&(unit - Mat::identity(t.order(), t.order()))) < 1e-12);
        }
    }

    #[test]
    fn nontrivial_scaling_keeps_polar_decomposition() {
        // a positive circulant commutes with the left regular representation of ℤ₃
        let (w, a) = kt(&GroupTable::cyclic(3));
        let t = GroupTable::cyclic(3);
        let m = t.left_regular(1).map(|z| z * c(0.5, 0.3)) + t.left_regular(2).map(|z| z * c(0.5, -0.3)) + Mat::identity(3, 3).scale(2.0);
        let q = PositiveOperator::new(Operator::on(Space::hilbert(3), m).unwrap()).unwrap();
        let k = kappa(&w, &a, 1e-10).unwrap();
        let (r, rep) = unitary_antipode(&a, &k, &q, &[0.3, 1.7, -2.5], 1e-10);
        assert!(rep.is_pass(), "{}", rep.to_json());
        let lam1 = a.apply(&r, &t.left_regular(1));
        assert!(linalg::max_abs(&(lam1 - t.left_regular(2))) < 1e-12);
    }

    #[test]
    fn tau_examples() {
        let x = real_matrix(&[&[0., 1.], &[1., 0.]]);
        let id = PositiveOperator::identity(&Space::hilbert(2));
        assert!(linalg::max_abs(&(tau(&id, c(1.3, 0.0), &x) - &x)) < 1e-15);
        let q = PositiveOperator::from_diag(&Space::hilbert(2), &[1.0, 2.0]).unwrap();
        let half = tau(&q, c(0.0, 0.5), &x);
        assert!(linalg::max_abs(&(half - real_matrix(&[&[0., 2.], &[0.5, 0.]]))) < 1e-14);
        let tt = 0.7;
        let real = tau(&q, c(tt, 0.0), &x);
        let phase = C64::from_polar(1.0, -2.0 * tt * 2f64.ln());
        assert!((real[(0, 1)] - phase).norm() < 1e-14 && (real[(1, 0)] - phase.conj()).norm() < 1e-14);
        assert!(linalg::max_abs(&(real.adjoint() * &real - Mat::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn inconsistent_slices_abort() {
        // the slices of a perturbed unitary leave span{I, X}
        let w = crate::workbench::perturbed(&crate::workbench::cnot(), 1e-2, 7);
        let t = GroupTable::cyclic(2);
        let small = SliceAlgebra::span_of(Space::hilbert(2), &[t.left_regular(0), t.left_regular(1)]).unwrap();
        assert!(matches!(kappa(&w, &small, 1e-10), Err(MuError::Precondition(_))));
    }
}
