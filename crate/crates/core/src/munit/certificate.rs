use super::{dual, pentagon_residual, random_probes, MultUnitary, EXACT_TOL};
use crate::error::{MuError, Result};
use crate::report::CheckReport;
use crate::tensor::linalg::{self, Mat};
use crate::tensor::{flip, Operator, PositiveOperator, Space, DENSE_BUDGET};

/// Largest `dim(H)` for which inner-product relations are checked on the
/// full product basis; above it a seeded random sample is used.
pub const BASIS_GRID_MAX_DIM: usize = 16;
/// Number of random vector quadruples above [`BASIS_GRID_MAX_DIM`].
pub const RANDOM_GRID_POINTS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tol: f64,
    /// Seed for the random quadruple grid (only used when `dim(H) > 16`).
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tol: EXACT_TOL, seed: 0 }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: f64) -> Self {
        CheckOptions { tol, ..Default::default() }
    }
}

/// The data `(Q, Q̂, W̃)` together with the report that judged it.
#[derive(Clone, Debug)]
pub struct ModularStructure {
    pub q: PositiveOperator,
    pub q_hat: PositiveOperator,
    pub w_tilde: Operator,
    pub report: CheckReport,
}

impl ModularStructure {
    /// Builds `W̃` from `q` and checks the full certificate; the result carries
    /// the report whether or not it passes.
    pub fn certify(w: &MultUnitary, q: PositiveOperator, q_hat: PositiveOperator, opts: &CheckOptions) -> Result<Self> {
        let w_tilde = build_wtilde(w, &q)?;
        let report = check_modular_with(w, &q, &q_hat, &w_tilde, opts)?;
        Ok(ModularStructure { q, q_hat, w_tilde, report })
    }

    pub fn is_valid(&self) -> bool {
        self.report.is_pass()
    }
}

fn expect_on_h(p: &PositiveOperator, w: &MultUnitary, what: &str) -> Result<()> {
    if p.space() != &w.h_space() {
        return Err(MuError::Shape(format!("{what} acts on {}, expected {}", p.space(), w.h_space())));
    }
    Ok(())
}

fn conj_h_h(d: usize) -> Space {
    Space::hilbert(d).conj().tensor(&Space::hilbert(d))
}

/// `W̃ = (1⊗Q⁻¹)·W^{T₁}·(1⊗Q)` on `H̄⊗H`.
///
/// Entrywise `W̃_{(z̄,u),(x̄,y)} = Σ (Q⁻¹)_{u u'} W_{(x,u'),(z,y')} Q_{y' y}`, so
/// `⟨z̄⊗Qu, W̃(x̄⊗Q⁻¹y)⟩ = ⟨x⊗u, W(z⊗y)⟩` holds identically. Homogeneous of
/// degree zero in `Q`.
pub fn build_wtilde(w: &MultUnitary, q: &PositiveOperator) -> Result<Operator> {
    expect_on_h(q, w, "Q")?;
    let d = w.h_dim();
    let wt1 = w.op().partial_transpose(0)?;
    let id = Mat::identity(d, d);
    let left = linalg::kron(&id, q.inverse().op().data());
    let right = linalg::kron(&id, q.op().data());
    Operator::on(conj_h_h(d), left * wt1.data() * right)
}

/// Vector grid for inner-product relations on `H⊗H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Basis,
    Random { count: usize, seed: u64 },
}

impl Grid {
    pub fn for_dim(d: usize, seed: u64) -> Grid {
        if d <= BASIS_GRID_MAX_DIM {
            Grid::Basis
        } else {
            Grid::Random { count: RANDOM_GRID_POINTS, seed }
        }
    }

    pub fn points(&self, d: usize) -> usize {
        match *self {
            Grid::Basis => d.pow(4),
            Grid::Random { count, .. } => count,
        }
    }
}

/// Maps of the relation `⟨x⊗u, W(z⊗y)⟩ = ⟨conj(A z)⊗B u, V(conj(C x)⊗D y)⟩`.
pub struct RelationSides<'a> {
    pub a: &'a Mat,
    pub b: &'a Mat,
    pub c: &'a Mat,
    pub d: &'a Mat,
}

/// Maximum deviation of the relation over `grid`.
///
/// `V` acts on `H̄⊗H`; conjugate vectors carry conjugated coordinates.
pub fn relation_residual(w: &Mat, v: &Mat, d: usize, sides: &RelationSides<'_>, grid: Grid) -> f64 {
    match grid {
        Grid::Basis => {
            // columns indexed (z,u) and (x,y)
            let l = linalg::kron(&sides.a.map(|z| z.conj()), sides.b);
            let r = linalg::kron(&sides.c.map(|z| z.conj()), sides.d);
            let g = l.adjoint() * v * r;
            let mut worst: f64 = 0.0;
            for x in 0..d {
                for u in 0..d {
                    for z in 0..d {
                        for y in 0..d {
                            let lhs = w[(x * d + u, z * d + y)];
                            let rhs = g[(z * d + u, x * d + y)];
                            worst = worst.max((lhs - rhs).norm());
                        }
                    }
                }
            }
            worst
        }
        Grid::Random { count, seed } => {
            let vecs = random_probes(d, 4 * count, seed);
            let mut worst: f64 = 0.0;
            for q in vecs.chunks_exact(4) {
                let (x, u, z, y) = (&q[0], &q[1], &q[2], &q[3]);
                let lhs = linalg::vdot(&linalg::vec_kron(x, u), &linalg::matvec(w, &linalg::vec_kron(z, y)));
                let left = linalg::vec_kron(&linalg::vec_conj(&linalg::matvec(sides.a, z)), &linalg::matvec(sides.b, u));
                let right = linalg::vec_kron(&linalg::vec_conj(&linalg::matvec(sides.c, x)), &linalg::matvec(sides.d, y));
                let rhs = linalg::vdot(&left, &linalg::matvec(v, &right));
                worst = worst.max((lhs - rhs).norm());
            }
            worst
        }
    }
}

/// Residuals `r1`–`r5` for a certificate with a given `W̃`.
///
/// * `r1 = ‖W̃*W̃ − I‖`
/// * `r2 = ‖W(Q̂⊗Q)W* − Q̂⊗Q‖ / ‖Q̂⊗Q‖`
/// * `r3`: the defining inner-product relation of `W̃`, evaluated directly
/// * `r4 = ‖[W̃, Q̂^⊤⊗Q⁻¹]‖ / ‖Q̂^⊤⊗Q⁻¹‖`
/// * `r5`: `⟨x⊗u,W(z⊗y)⟩ = ⟨conj(Q̂z)⊗u, W̃(conj(Q̂⁻¹x)⊗y)⟩`, evaluated directly
///
/// Norms are operator norms. `info` carries the ∞-norm of `W̃*W̃ − I` and,
/// within the dense budget, the pentagon residual of `W` (not part of the verdict).
pub fn check_modular_with(
    w: &MultUnitary,
    q: &PositiveOperator,
    q_hat: &PositiveOperator,
    w_tilde: &Operator,
    opts: &CheckOptions,
) -> Result<CheckReport> {
    expect_on_h(q, w, "Q")?;
    expect_on_h(q_hat, w, "Q̂")?;
    let d = w.h_dim();
    if w_tilde.domain() != &conj_h_h(d) || w_tilde.codomain() != &conj_h_h(d) {
        return Err(MuError::Shape(format!("W̃ must act on {}, got {}", conj_h_h(d), w_tilde.space())));
    }
    let mut report = CheckReport::new("modular", opts.tol);
    let wt = w_tilde.data();
    let n = d * d;

    let gram = wt.adjoint() * wt - Mat::identity(n, n);
    report.push("r1", linalg::op_norm(&gram));
    report.info("r1_inf", linalg::inf_norm(&gram));

    let qq = linalg::kron(q_hat.op().data(), q.op().data());
    let moved = w.data() * &qq * w.data().adjoint();
    report.push("r2", linalg::op_norm(&(moved - &qq)) / linalg::op_norm(&qq));

    let q_inv = q.inverse();
    let q_hat_inv = q_hat.inverse();
    let id = Mat::identity(d, d);
    let grid = Grid::for_dim(d, opts.seed);
    report.info("grid_points", grid.points(d) as f64);
    let defining = RelationSides { a: &id, b: q.op().data(), c: &id, d: q_inv.op().data() };
    report.push("r3", relation_residual(w.data(), wt, d, &defining, grid));

    let t = linalg::kron(&q_hat.op().data().transpose(), q_inv.op().data());
    let comm = wt * &t - &t * wt;
    report.push("r4", linalg::op_norm(&comm) / linalg::op_norm(&t));

    let twisted = RelationSides { a: q_hat.op().data(), b: &id, c: q_hat_inv.op().data(), d: &id };
    report.push("r5", relation_residual(w.data(), wt, d, &twisted, grid));

    if d.pow(3) <= DENSE_BUDGET {
        report.info("pentagon", pentagon_residual(w)?);
    }
    Ok(report)
}

/// [`check_modular_with`] on the `W̃` produced by [`build_wtilde`].
pub fn check_modular(w: &MultUnitary, q: &PositiveOperator, q_hat: &PositiveOperator, opts: &CheckOptions) -> Result<CheckReport> {
    let w_tilde = build_wtilde(w, q)?;
    check_modular_with(w, q, q_hat, &w_tilde, opts)
}

/// The certificate check with `Q̂ = Q`.
pub fn check_manageable(w: &MultUnitary, q: &PositiveOperator, opts: &CheckOptions) -> Result<CheckReport> {
    let mut report = check_modular(w, q, q, opts)?;
    report.name = "manageable".into();
    Ok(report)
}

/// Certificate for `Ŵ = ΣW*Σ`: `Q_new = Q̂`, `Q̂_new = Q`, and
/// `W̃_new = (ΣW̃*Σ)^⊤ = Σ·conj(W̃)·Σ` on `H̄⊗H`.
pub fn dual_modular(w: &MultUnitary, cert: &ModularStructure, opts: &CheckOptions) -> Result<ModularStructure> {
    let input = check_modular_with(w, &cert.q, &cert.q_hat, &cert.w_tilde, opts)?;
    if !input.is_pass() {
        return Err(MuError::Precondition(format!("input certificate fails: {}", input.failures().join(", "))));
    }
    let hbar_h = cert.w_tilde.space().clone();
    let h_hbar = hbar_h.swapped();
    let into = flip(&hbar_h)?;
    let back = flip(&h_hbar)?;
    // ΣW̃*Σ acts on H⊗H̄; its full transpose acts on H̄⊗H
    let on_h_hbar = into.data() * cert.w_tilde.data().adjoint() * back.data();
    let w_tilde = Operator::on(h_hbar, on_h_hbar)?.transpose();
    let w_hat = dual(w);
    let (q, q_hat) = (cert.q_hat.clone(), cert.q.clone());
    let report = check_modular_with(&w_hat, &q, &q_hat, &w_tilde, opts)?;
    Ok(ModularStructure { q, q_hat, w_tilde, report })
}
