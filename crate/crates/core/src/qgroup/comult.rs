use super::algebra::{product_decomposition, SliceAlgebra, RANK_TOL};
use crate::error::Result;
use crate::munit::MultUnitary;
use crate::report::CheckReport;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::DENSE_BUDGET;

/// `Δ(m) = W(m⊗I)W*`.
pub fn comult(w: &MultUnitary, m: &Mat) -> Mat {
    let d = w.h_dim();
    w.data() * linalg::kron(m, &Mat::identity(d, d)) * w.data().adjoint()
}

/// Structure constants: `structure[μ][(ν,ρ)]` is the coefficient of
/// `a_ν⊗a_ρ` in `Δ(a_μ)`; the second value is `max_μ ‖(1−P_{A⊗A})Δ(a_μ)‖`.
pub fn structure_constants(w: &MultUnitary, a: &SliceAlgebra) -> (Vec<Mat>, f64) {
    let mut leak: f64 = 0.0;
    let consts = a
        .basis()
        .iter()
        .map(|b| {
            let (c, res) = product_decomposition(a, a, &comult(w, b));
            leak = leak.max(res);
            c
        })
        .collect();
    (consts, leak)
}

/// Frobenius norm of `(Δ⊗id)Δ − (id⊗Δ)Δ` on each basis element, in coefficients.
fn coassociativity(consts: &[Mat]) -> f64 {
    let r = consts.len();
    let mut worst: f64 = 0.0;
    for c in consts {
        let mut sq = 0.0;
        for al in 0..r {
            for be in 0..r {
                for ga in 0..r {
                    let mut left = linalg::ZERO;
                    let mut right = linalg::ZERO;
                    for k in 0..r {
                        left += c[(k, ga)] * consts[k][(al, be)];
                        right += c[(al, k)] * consts[k][(be, ga)];
                    }
                    sq += (left - right).norm_sqr();
                }
            }
        }
        worst = worst.max(sq.sqrt());
    }
    worst
}

fn density(products: &[Mat], a: &SliceAlgebra) -> (usize, f64) {
    let n = products.first().map_or(0, |m| m.len());
    let rows = Mat::from_fn(products.len(), n, |k, idx| {
        let m = &products[k];
        m[(idx / m.ncols(), idx % m.ncols())]
    });
    let containment = products.iter().map(|m| product_decomposition(a, a, m).1).fold(0.0, f64::max);
    (linalg::rank(&rows, RANK_TOL), containment)
}

/// Checks of the comultiplication on `A`:
///
/// * `c1 = ‖W₂₃W₁₂W₂₃* − W₁₂W₁₃‖` on `H^{⊗3}` (skipped above the dense budget)
/// * `c2`: `Δ(a_μ) ∈ span(A⊗A)`
/// * `c3`: coassociativity from structure constants
/// * `c4_*`: `Δ(a)(I⊗b)` and `(a⊗I)Δ(b)` lie in and span `A⊗A`
///
/// For `A` equal to the full matrix algebra `c2` and `c4` hold for any unitary.
pub fn check_comult(w: &MultUnitary, a: &SliceAlgebra, tol: f64) -> Result<CheckReport> {
    let mut report = CheckReport::new("comultiplication", tol);
    let d = w.h_dim();
    if d.pow(3) <= DENSE_BUDGET {
        let (w12, w13, w23) = w.legs3()?;
        let lhs = &(&w23 * &w12) * &w23.adjoint();
        report.push("c1", lhs.distance(&(&w12 * &w13)));
    } else {
        report.note("c1 skipped: H⊗H⊗H exceeds the dense budget");
    }
    let (consts, leak) = structure_constants(w, a);
    report.push("c2", leak);
    report.push("c3", coassociativity(&consts));

    let id = Mat::identity(d, d);
    let deltas: Vec<Mat> = a.basis().iter().map(|b| comult(w, b)).collect();
    let mut right = Vec::new();
    let mut left = Vec::new();
    for (mu, da) in deltas.iter().enumerate() {
        for (nu, b) in a.basis().iter().enumerate() {
            right.push(da * linalg::kron(&id, b));
            left.push(linalg::kron(&a.basis()[nu], &id) * &deltas[mu]);
        }
    }
    let full = a.rank() * a.rank();
    for (name, family) in [("c4_right", &right), ("c4_left", &left)] {
        let (rank, containment) = density(family, a);
        report.info(format!("{name}_rank"), rank as f64);
        report.push(format!("{name}_containment"), containment);
        report.push_with_tol(format!("{name}_rank_deficit"), full.abs_diff(rank) as f64, 0.5);
    }
    report.info("rank_a_squared", full as f64);
    if a.rank() == d * d {
        report.note("A is the full matrix algebra; membership and density hold for any unitary");
    }
    Ok(report)
}

/// `(τ⊗τ')` applied to `Σ c_νρ a_ν⊗a_ρ` given coefficient maps; used for transported identities.
pub fn tensor_map(coeffs: &Mat, left: &Mat, right: &Mat) -> Mat {
    left * coeffs * right.transpose()
}

/// Rebuilds `Σ c_νρ a_ν⊗a_ρ`.
pub fn from_product_coeffs(a: &SliceAlgebra, coeffs: &Mat) -> Mat {
    let d = a.dim();
    let mut out = Mat::zeros(d * d, d * d);
    for (i, x) in a.basis().iter().enumerate() {
        for (j, y) in a.basis().iter().enumerate() {
            let z: C64 = coeffs[(i, j)];
            if z != linalg::ZERO {
                out += linalg::kron(x, y).map(|v| v * z);
            }
        }
    }
    out
}
