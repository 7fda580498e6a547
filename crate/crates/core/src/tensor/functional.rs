use super::linalg::{self, Mat, C64};
use super::operator::Operator;
use super::space::Space;
use crate::error::{MuError, Result};

/// A normal functional `ω(m) = tr(F·m)` given by its trace frame `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    space: Space,
    frame: Mat,
}

impl Functional {
    pub fn new(space: Space, frame: Mat) -> Result<Self> {
        let n = space.dim();
        if frame.nrows() != n || frame.ncols() != n {
            return Err(MuError::Shape(format!("frame is {}x{}, space has dimension {n}", frame.nrows(), frame.ncols())));
        }
        Ok(Functional { space, frame })
    }

    /// `ω(m) = m_{ij}`, i.e. `⟨e_i, m e_j⟩`.
    pub fn matrix_unit(space: &Space, i: usize, j: usize) -> Self {
        let n = space.dim();
        let mut frame = Mat::zeros(n, n);
        frame[(j, i)] = linalg::ONE;
        Functional { space: space.clone(), frame }
    }

    /// `ω(m) = ⟨x, m y⟩`.
    pub fn vector_state(space: &Space, x: &[C64], y: &[C64]) -> Self {
        let n = space.dim();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        let frame = Mat::from_fn(n, n, |a, b| y[a] * x[b].conj());
        Functional { space: space.clone(), frame }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn frame(&self) -> &Mat {
        &self.frame
    }

    pub fn eval(&self, m: &Operator) -> Result<C64> {
        if m.domain() != &self.space || m.codomain() != &self.space {
            return Err(MuError::Shape(format!("functional on {} applied to operator on {}", self.space, m.space())));
        }
        Ok((&self.frame * m.data()).trace())
    }

    /// Trace-class norm of the frame, which is the norm of the functional.
    pub fn norm(&self) -> f64 {
        self.frame.singular_values().iter().sum()
    }

    /// `μ⊗ν` on the product space.
    pub fn tensor(&self, other: &Functional) -> Self {
        Functional { space: self.space.tensor(&other.space), frame: linalg::kron(&self.frame, &other.frame) }
    }

    /// Convolution `ν*μ = (μ⊗ν)∘Δ` where `Δ(m) = W(m⊗I)W*`.
    ///
    /// The frame is the partial trace over the second leg of `W*(F_μ⊗F_ν)W`.
    pub fn convolution(nu: &Functional, mu: &Functional, w: &Operator) -> Result<Self> {
        let pair = mu.tensor(nu);
        if w.space() != &pair.space || !w.is_square() {
            return Err(MuError::Shape(format!("W acts on {}, functionals on {}", w.space(), pair.space)));
        }
        let f = w.data().adjoint() * &pair.frame * w.data();
        let (d1, d2) = (mu.space.dim(), nu.space.dim());
        Ok(Functional { space: mu.space.clone(), frame: linalg::partial_trace(&f, d1, d2, true) })
    }
}
