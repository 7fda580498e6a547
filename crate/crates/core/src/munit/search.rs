use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::certificate::{CheckOptions, ModularStructure};
use super::simplex::{nelder_mead, SimplexOptions};
use super::{MultUnitary, EXACT_TOL};
use crate::error::Result;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{PositiveOperator, DENSE_BUDGET};

/// Largest `dim(H)⁴` for which the fixed space of `P ↦ WPW*` is computed.
pub const FIXED_SPACE_BUDGET: usize = 1296;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub tol: f64,
    pub restarts: usize,
    /// Simplex iterations per restart.
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { tol: EXACT_TOL, restarts: 6, max_iter: 4000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// A certificate passing the modular check at `tol`, if one was found.
    pub certificate: Option<ModularStructure>,
    pub best_objective: f64,
    pub restarts_run: usize,
    /// Dimension of the fixed space of `P ↦ WPW*`, when computed.
    pub fixed_space_dim: Option<usize>,
    pub diagnostic: String,
}

struct Problem<'a> {
    w: &'a MultUnitary,
    wt1: Mat,
    basis: Mat,
    basis_hat: Mat,
}

fn center(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

fn log_variance(p: &[f64], d: usize) -> f64 {
    let var = |v: &[f64]| center(v).iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    var(&p[..d]) + var(&p[d..])
}

fn spectral(u: &Mat, logs: &[f64], sign: f64) -> Mat {
    let values: Vec<f64> = logs.iter().map(|l| (sign * l).exp()).collect();
    u * linalg::diag_real(&values) * u.adjoint()
}

impl Problem<'_> {
    fn d(&self) -> usize {
        self.w.h_dim()
    }

    /// `‖W̃*W̃ − I‖²_F + ‖W(Q̂⊗Q)W* − Q̂⊗Q‖²_F / ‖Q̂⊗Q‖²_F`.
    fn objective(&self, p: &[f64]) -> f64 {
        let d = self.d();
        let (th, th_hat) = (center(&p[..d]), center(&p[d..]));
        if th.iter().chain(&th_hat).any(|x| x.abs() > 40.0) {
            return f64::INFINITY;
        }
        let id = Mat::identity(d, d);
        let q = spectral(&self.basis, &th, 1.0);
        let q_inv = spectral(&self.basis, &th, -1.0);
        let q_hat = spectral(&self.basis_hat, &th_hat, 1.0);
        let wt = linalg::kron(&id, &q_inv) * &self.wt1 * linalg::kron(&id, &q);
        let unitarity = linalg::fro_norm(&(wt.adjoint() * &wt - Mat::identity(d * d, d * d))).powi(2);
        let qq = linalg::kron(&q_hat, &q);
        let moved = self.w.data() * &qq * self.w.data().adjoint();
        let invariance = (linalg::fro_norm(&(moved - &qq)) / linalg::fro_norm(&qq)).powi(2);
        unitarity + invariance
    }

    fn certificate(&self, p: &[f64], opts: &CheckOptions) -> Result<ModularStructure> {
        let d = self.d();
        let h = self.w.h_space();
        let exp = |v: Vec<f64>| v.into_iter().map(f64::exp).collect::<Vec<_>>();
        let q = PositiveOperator::from_spectral(&h, exp(center(&p[..d])), self.basis.clone())?;
        let q_hat = PositiveOperator::from_spectral(&h, exp(center(&p[d..])), self.basis_hat.clone())?;
        ModularStructure::certify(self.w, q, q_hat, opts)
    }
}

fn hermitian_eigenbasis(m: &Mat) -> Mat {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    SymmetricEigen::new(h).eigenvectors
}

/// A positive element of the fixed space of `P ↦ WPW*`: the orthogonal
/// projection of a seeded random positive operator onto that space.
fn fixed_positive(w: &MultUnitary, seed: u64) -> (Mat, usize) {
    let n = w.h_dim().pow(2);
    // row-major vec(W P W*) = (W ⊗ conj W) vec(P)
    let s = linalg::kron(w.data(), &w.data().map(|z| z.conj())) - Mat::identity(n * n, n * n);
    let null = linalg::null_space(&s, 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(n, n, |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
    let seedpos = &g * g.adjoint();
    let v = nalgebra::DVector::from_vec(linalg::flatten(&seedpos));
    let projected = &null * (null.adjoint() * v);
    let p = linalg::unflatten(projected.as_slice(), n, n);
    ((&p + p.adjoint()).map(|z| z * 0.5), null.ncols())
}

/// Heuristic search for `(Q, Q̂)` making `W` modular.
///
/// The eigenbases of `Q` and `Q̂` are those of the two partial traces of a
/// positive element of the fixed space of `P ↦ WPW*` (standard basis above
/// [`FIXED_SPACE_BUDGET`]). The log-eigenvalues, centred to remove the scalar
/// gauge, are fitted by simplex descent; restart 0 starts from `Q = Q̂ = I`,
/// the others from seeded Gaussian points. Among validated candidates the one
/// with least log-variance wins, then the lowest restart index.
///
/// Returns no certificate when no restart validates; that proves nothing.
pub fn find_certificate(w: &MultUnitary, opts: &SearchOptions) -> Result<SearchOutcome> {
    let d = w.h_dim();
    if d * d > DENSE_BUDGET {
        return Err(crate::MuError::Budget { dim: d * d, budget: DENSE_BUDGET });
    }
    let (basis, basis_hat, fixed_space_dim) = if d.pow(4) <= FIXED_SPACE_BUDGET {
        let (p0, k) = fixed_positive(w, opts.seed);
        let second = linalg::partial_trace(&p0, d, d, false);
        let first = linalg::partial_trace(&p0, d, d, true);
        (hermitian_eigenbasis(&second), hermitian_eigenbasis(&first), Some(k))
    } else {
        (Mat::identity(d, d), Mat::identity(d, d), None)
    };
    let problem = Problem { w, wt1: w.op().partial_transpose(0)?.into_data(), basis, basis_hat };
    let check = CheckOptions { tol: opts.tol, seed: opts.seed };
    let f_target = (1e-2 * opts.tol).powi(2);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    // (log-variance, restart index, certificate)
    let mut accepted: Option<(f64, usize, ModularStructure)> = None;
    let mut best_objective = f64::INFINITY;
    let restarts = opts.restarts.max(1);
    for k in 0..restarts {
        let start: Vec<f64> = if k == 0 { vec![0.0; 2 * d] } else { (0..2 * d).map(|_| StandardNormal.sample(&mut rng)).collect() };
        let mut simplex = SimplexOptions { max_iter: opts.max_iter, initial_step: 0.5, f_target, x_tol: 1e-15 };
        let mut result = nelder_mead(|p| problem.objective(p), &start, &simplex);
        for _ in 0..3 {
            if result.value <= f_target {
                break;
            }
            simplex.initial_step *= 0.1;
            let again = nelder_mead(|p| problem.objective(p), &result.x, &simplex);
            if again.value >= result.value {
                break;
            }
            result = again;
        }
        best_objective = best_objective.min(result.value);
        let cert = problem.certificate(&result.x, &check)?;
        if cert.is_valid() {
            let var = log_variance(&result.x, d);
            if accepted.as_ref().is_none_or(|(v, _, _)| var < *v) {
                accepted = Some((var, k, cert));
            }
        }
    }
    let diagnostic = match &accepted {
        Some((var, k, _)) => format!("certificate from restart {k} (log-variance {var:.3e})"),
        None => format!("no restart validated at tol {:e}; best objective {best_objective:.3e}", opts.tol),
    };
    Ok(SearchOutcome { certificate: accepted.map(|(_, _, c)| c), best_objective, restarts_run: restarts, fixed_space_dim, diagnostic })
}
