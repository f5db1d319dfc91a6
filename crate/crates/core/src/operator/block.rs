use super::{c, eigh_raw, psd_sqrt, re_trace, trace_product, CMatrix, CVector};

/// Square operator stored either densely or as a real diagonal.
///
/// Classical (commuting) inputs stay diagonal through every protocol step,
/// which turns matrix algebra into elementwise vector arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Dense(CMatrix),
    Diagonal(Vec<f64>),
}

impl Block {
    pub fn zeros_like(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(CMatrix::zeros(m.nrows(), m.ncols())),
            Block::Diagonal(v) => Block::Diagonal(vec![0.0; v.len()]),
        }
    }

    pub fn identity_like(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(CMatrix::identity(m.nrows(), m.ncols())),
            Block::Diagonal(v) => Block::Diagonal(vec![1.0; v.len()]),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Block::Dense(m) => m.nrows(),
            Block::Diagonal(v) => v.len(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Block::Diagonal(_))
    }

    pub fn trace(&self) -> f64 {
        match self {
            Block::Dense(m) => re_trace(m),
            Block::Diagonal(v) => v.iter().sum(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Diagonal(v) => CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))),
        }
    }

    /// `Tr[self · other]` (real part).
    pub fn trace_with(&self, other: &Block) -> f64 {
        match (self, other) {
            (Block::Diagonal(a), Block::Diagonal(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Block::Dense(a), Block::Dense(b)) => trace_product(a, b),
            (Block::Dense(a), Block::Diagonal(b)) | (Block::Diagonal(b), Block::Dense(a)) => {
                b.iter().enumerate().map(|(i, y)| a[(i, i)].re * y).sum()
            }
        }
    }

    pub fn scale(&self, s: f64) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m * c(s)),
            Block::Diagonal(v) => Block::Diagonal(v.iter().map(|x| x * s).collect()),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Block, b: f64) -> Block {
        match (self, other) {
            (Block::Diagonal(x), Block::Diagonal(y)) => {
                Block::Diagonal(x.iter().zip(y).map(|(p, q)| a * p + b * q).collect())
            }
            _ => Block::Dense(self.to_dense() * c(a) + other.to_dense() * c(b)),
        }
    }

    pub fn add(&self, other: &Block) -> Block {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Block) -> Block {
        self.combine(1.0, other, -1.0)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Block) -> Block {
        match (self, other) {
            (Block::Diagonal(x), Block::Diagonal(y)) => Block::Diagonal(x.iter().zip(y).map(|(p, q)| p * q).collect()),
            _ => Block::Dense(self.to_dense() * other.to_dense()),
        }
    }

    pub fn adjoint(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.adjoint()),
            Block::Diagonal(v) => Block::Diagonal(v.clone()),
        }
    }

    /// `self · x · self†`.
    pub fn sandwich(&self, x: &Block) -> Block {
        match (self, x) {
            (Block::Diagonal(s), Block::Diagonal(v)) => Block::Diagonal(s.iter().zip(v).map(|(a, b)| a * a * b).collect()),
            _ => {
                let s = self.to_dense();
                Block::Dense(&s * x.to_dense() * s.adjoint())
            }
        }
    }

    /// Square root of the positive part (Hermitian input).
    pub fn sqrt_psd(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(psd_sqrt(m)),
            Block::Diagonal(v) => Block::Diagonal(v.iter().map(|x| x.max(0.0).sqrt()).collect()),
        }
    }

    /// Eigenvalues, descending (Hermitian input).
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            Block::Dense(m) => eigh_raw(m).0,
            Block::Diagonal(v) => {
                let mut s = v.clone();
                s.sort_by(|a, b| b.total_cmp(a));
                s
            }
        }
    }

    /// Projector onto eigenvalues strictly above `tol` (Hermitian input).
    pub fn projector_above(&self, tol: f64) -> Block {
        match self {
            Block::Dense(m) => {
                let (vals, vecs) = eigh_raw(m);
                let n = m.nrows();
                let mut p = CMatrix::zeros(n, n);
                for (j, &l) in vals.iter().enumerate() {
                    if l > tol {
                        let v = vecs.column(j);
                        p += v * v.adjoint();
                    }
                }
                Block::Dense(p)
            }
            Block::Diagonal(v) => Block::Diagonal(v.iter().map(|&x| if x > tol { 1.0 } else { 0.0 }).collect()),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        match self {
            Block::Dense(m) => super::max_abs(m),
            Block::Diagonal(v) => v.iter().fold(0.0f64, |a, x| a.max(x.abs())),
        }
    }
}
