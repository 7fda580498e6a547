//! The intertwiner `X` and the lifted unitary `W_M = X₁₂W₂₄X₁₂*`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::weyl::WeylPair;
use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::tensor::legs::LegLayout;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{Operator, PositiveOperator, Space, DENSE_BUDGET};

/// `X = Σ_j P_j ⊗ Q^{is_j}Q̂^{−is_j}` on `K⊗H`, kept as its diagonal blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Intertwiner {
    blocks: Vec<Mat>,
    h_dim: usize,
}

/// Assembles `X` over the eigenvalues of `s`.
pub fn build_x(wp: &WeylPair, q: &PositiveOperator, q_hat: &PositiveOperator) -> Result<Intertwiner> {
    if q.space() != q_hat.space() {
        return Err(MuError::Shape(format!("Q on {}, Q̂ on {}", q.space(), q_hat.space())));
    }
    let blocks = wp.positions().iter().map(|&s| q.it(s).data() * q_hat.it(-s).data()).collect();
    Ok(Intertwiner { blocks, h_dim: q.dim() })
}

impl Intertwiner {
    /// `X = I` on `K⊗H` with `dim K = n_points`.
    pub fn identity(n_points: usize, h_dim: usize) -> Self {
        Intertwiner { blocks: vec![Mat::identity(h_dim, h_dim); n_points], h_dim }
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn n_points(&self) -> usize {
        self.blocks.len()
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn space(&self) -> Space {
        Space::from_dims(&[self.n_points(), self.h_dim])
    }

    /// Dense block-diagonal matrix on `K⊗H`.
    pub fn to_operator(&self) -> Operator {
        let (n, d) = (self.n_points(), self.h_dim);
        let mut m = Mat::zeros(n * d, n * d);
        for (j, b) in self.blocks.iter().enumerate() {
            m.view_mut((j * d, j * d), (d, d)).copy_from(b);
        }
        Operator::on(self.space(), m).expect("square by construction")
    }

    /// `X^⊤` on `K̄⊗H̄`.
    pub fn transpose(&self) -> Intertwiner {
        Intertwiner { blocks: self.blocks.iter().map(|b| b.transpose()).collect(), h_dim: self.h_dim }
    }

    pub fn adjoint(&self) -> Intertwiner {
        Intertwiner { blocks: self.blocks.iter().map(|b| b.adjoint()).collect(), h_dim: self.h_dim }
    }

    /// `max_j ‖B_j*B_j − I‖`.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Mat::identity(self.h_dim, self.h_dim);
        self.blocks.iter().map(|b| linalg::op_norm(&(b.adjoint() * b - &id))).fold(0.0, f64::max)
    }

    /// Applies `X` with its `K` factor on `k_leg` and `H` factor on `h_leg`.
    pub fn apply_on(&self, v: &[C64], dims: &[usize], k_leg: usize, h_leg: usize) -> Vec<C64> {
        let (n, d) = (self.n_points(), self.h_dim);
        assert!(dims[k_leg] == n && dims[h_leg] == d, "legs do not match X");
        let stride = |leg: usize| -> usize { dims[leg + 1..].iter().product() };
        let (sk, sh) = (stride(k_leg), stride(h_leg));
        let mut out = vec![linalg::ZERO; v.len()];
        let mut x = vec![linalg::ZERO; d];
        for base in 0..v.len() {
            if (base / sh) % d != 0 {
                continue;
            }
            let b = &self.blocks[(base / sk) % n];
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = v[base + k * sh];
            }
            for a in 0..d {
                let mut acc = linalg::ZERO;
                for (k, xk) in x.iter().enumerate() {
                    acc += b[(a, k)] * xk;
                }
                out[base + a * sh] = acc;
            }
        }
        out
    }

    /// `α(m) = X(I⊗m)X*`, blockwise.
    pub fn alpha(&self, m: &Mat) -> Mat {
        let (n, d) = (self.n_points(), self.h_dim);
        let mut out = Mat::zeros(n * d, n * d);
        for (j, b) in self.blocks.iter().enumerate() {
            out.view_mut((j * d, j * d), (d, d)).copy_from(&(b * m * b.adjoint()));
        }
        out
    }

    /// `α^⊤(m) = (X^⊤)*(I⊗m)X^⊤` for `m` on `H̄`.
    pub fn alpha_transpose(&self, m: &Mat) -> Mat {
        let (n, d) = (self.n_points(), self.h_dim);
        let mut out = Mat::zeros(n * d, n * d);
        for (j, b) in self.blocks.iter().enumerate() {
            let bt = b.transpose();
            out.view_mut((j * d, j * d), (d, d)).copy_from(&(bt.adjoint() * m * bt));
        }
        out
    }
}

/// `β(m) = I⊗m` on `K⊗H`.
pub fn beta(n_points: usize, m: &Mat) -> Mat {
    linalg::kron(&Mat::identity(n_points, n_points), m)
}

/// `β⁻¹` on the range of `β`: `Tr_K(b)/dim K`.
pub fn beta_inverse(n_points: usize, b: &Mat) -> Mat {
    let d = b.nrows() / n_points;
    linalg::partial_trace(b, n_points, d, false).map(|z| z / n_points as f64)
}

/// `W_M = X₁₂W₂₄X₁₂*` on `K⊗H⊗K⊗H`, evaluated leg by leg.
#[derive(Clone, Debug)]
pub struct LiftedUnitary {
    w: MultUnitary,
    x: Intertwiner,
    dense: OnceLock<Option<MultUnitary>>,
}

/// Builds the pipeline and checks it against `(α⊗β)W` on sampled columns.
pub fn build_wm(w: &MultUnitary, x: &Intertwiner) -> Result<LiftedUnitary> {
    if x.h_dim() != w.h_dim() {
        return Err(MuError::Shape(format!("X acts on K⊗H with dim H = {}, W has {}", x.h_dim(), w.h_dim())));
    }
    let lifted = LiftedUnitary { w: w.clone(), x: x.clone(), dense: OnceLock::new() };
    let defect = lifted.alpha_beta_residual(16, 0);
    if !(defect < 1e-12) {
        return Err(MuError::Precondition(format!("W_M differs from (α⊗β)W by {defect:e}")));
    }
    Ok(lifted)
}

impl LiftedUnitary {
    pub fn w(&self) -> &MultUnitary {
        &self.w
    }

    pub fn x(&self) -> &Intertwiner {
        &self.x
    }

    pub fn n_points(&self) -> usize {
        self.x.n_points()
    }

    pub fn h_dim(&self) -> usize {
        self.w.h_dim()
    }

    /// `dim(K⊗H)`.
    pub fn lifted_dim(&self) -> usize {
        self.n_points() * self.h_dim()
    }

    /// The dense `W_M` on `(K⊗H)^{⊗2}` when `(nd)² ≤ 4096`, built on first use.
    pub fn dense(&self) -> Option<&MultUnitary> {
        self.dense
            .get_or_init(|| {
                let nd = self.lifted_dim();
                (nd * nd <= DENSE_BUDGET).then(|| MultUnitary::from_matrix(nd, self.materialize()).expect("W_M is unitary"))
            })
            .as_ref()
    }

    /// Applies `(W_M)` with its two `K⊗H` factors on the leg pairs `first`
    /// and `second` (each `(k_leg, h_leg)`) of a product with dims `dims`.
    pub fn apply_on(&self, v: &[C64], dims: &[usize], first: (usize, usize), second: (usize, usize)) -> Vec<C64> {
        let layout = LegLayout::new(dims, &[first.1, second.1]).expect("distinct legs");
        let y = self.x.adjoint().apply_on(v, dims, first.0, first.1);
        let y = layout.apply(self.w.data(), &y);
        self.x.apply_on(&y, dims, first.0, first.1)
    }

    /// `W_M v` for `v` on `K⊗H⊗K⊗H`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let (n, d) = (self.n_points(), self.h_dim());
        self.apply_on(v, &[n, d, n, d], (0, 1), (2, 3))
    }

    fn materialize(&self) -> Mat {
        let nd = self.lifted_dim();
        let total = nd * nd;
        let mut m = Mat::zeros(total, total);
        let mut e = vec![linalg::ZERO; total];
        for col in 0..total {
            e[col] = linalg::ONE;
            for (row, z) in self.apply(&e).into_iter().enumerate() {
                m[(row, col)] = z;
            }
            e[col] = linalg::ZERO;
        }
        m
    }

    /// `α(m) = X(I⊗m)X*`.
    pub fn alpha(&self, m: &Mat) -> Mat {
        self.x.alpha(m)
    }

    /// `β(m) = I⊗m`.
    pub fn beta(&self, m: &Mat) -> Mat {
        beta(self.n_points(), m)
    }

    /// `max |W_M − (α⊗β)W|` over all rows of `columns` seeded columns, the
    /// columns of `W_M` coming from the pipeline.
    pub fn alpha_beta_residual(&self, columns: usize, seed: u64) -> f64 {
        let (n, d) = (self.n_points(), self.h_dim());
        let nd = n * d;
        let w = self.w.data();
        // α(e_ij) for every matrix unit
        let units: Vec<Mat> = (0..d * d)
            .map(|k| {
                let mut e = Mat::zeros(d, d);
                e[(k / d, k % d)] = linalg::ONE;
                self.alpha(&e)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut e = vec![linalg::ZERO; nd * nd];
        for _ in 0..columns {
            let col = rng.random_range(0..nd * nd);
            e[col] = linalg::ONE;
            let image = self.apply(&e);
            e[col] = linalg::ZERO;
            let (c1, c2) = (col / nd, col % nd);
            for (row, z) in image.into_iter().enumerate() {
                let (r1, r2) = (row / nd, row % nd);
                // β(e_kl) = I⊗e_kl vanishes off matching K indices
                let mut acc = linalg::ZERO;
                if r2 / d == c2 / d {
                    let (k, l) = (r2 % d, c2 % d);
                    for i in 0..d {
                        for j in 0..d {
                            acc += w[(i * d + k, j * d + l)] * units[i * d + j][(r1, c1)];
                        }
                    }
                }
                worst = worst.max((z - acc).norm());
            }
        }
        worst
    }

    /// `W̃_M = (X^⊤₁₂)*W̃₂₄X^⊤₁₂` on `K̄⊗H̄⊗K⊗H`, applied to `v`.
    pub fn apply_wtilde(&self, w_tilde: &Operator, v: &[C64]) -> Vec<C64> {
        let (n, d) = (self.n_points(), self.h_dim());
        let dims = [n, d, n, d];
        let xt = self.x.transpose();
        let layout = LegLayout::new(&dims, &[1, 3]).expect("distinct legs");
        let y = xt.apply_on(v, &dims, 0, 1);
        let y = layout.apply(w_tilde.data(), &y);
        xt.adjoint().apply_on(&y, &dims, 0, 1)
    }

    /// Dense `W̃_M`, when within budget.
    pub fn wtilde_dense(&self, w_tilde: &Operator) -> Result<Operator> {
        let nd = self.lifted_dim();
        if nd * nd > DENSE_BUDGET {
            return Err(MuError::Budget { dim: nd * nd, budget: DENSE_BUDGET });
        }
        let total = nd * nd;
        let mut m = Mat::zeros(total, total);
        let mut e = vec![linalg::ZERO; total];
        for col in 0..total {
            e[col] = linalg::ONE;
            for (row, z) in self.apply_wtilde(w_tilde, &e).into_iter().enumerate() {
                m[(row, col)] = z;
            }
            e[col] = linalg::ZERO;
        }
        let kh = Space::from_dims(&[nd]);
        Operator::on(kh.conj().tensor(&kh), m)
    }
}

/// `Q_M = r⊗Q` as a positive operator on `K⊗H`.
pub fn q_m(wp: &WeylPair, q: &PositiveOperator) -> PositiveOperator {
    wp.r().tensor(q)
}
