use crate::{Error, Result};

/// Ordered subsystem labels with their dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertDims {
    parts: Vec<(String, usize)>,
}

impl HilbertDims {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> = parts.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if parts.is_empty() {
            return Err(Error::InvalidDims("no subsystems".into()));
        }
        for (i, (label, dim)) in parts.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidDims(format!("subsystem `{label}` has dimension 0")));
            }
            if parts[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidDims(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { parts })
    }

    /// A single subsystem.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim)]).expect("single subsystem dims are valid")
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|(l, _)| l.as_str())
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.parts[self.position(label)?].1)
    }

    /// Concatenation `self ⊗ other`; labels must stay unique.
    pub fn concat(&self, other: &HilbertDims) -> Result<Self> {
        Self::new(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    /// The kept subsystems, in their original order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for k in keep {
            self.position(k)?;
        }
        Self::new(self.parts.iter().filter(|(l, _)| keep.contains(&l.as_str())).cloned())
    }

    /// For every full basis index, its (kept, traced) index pair.
    pub(crate) fn split_indices(&self, keep: &[&str]) -> Result<(Vec<(usize, usize)>, usize, usize)> {
        for k in keep {
            self.position(k)?;
        }
        let kept_mask: Vec<bool> = self.parts.iter().map(|(l, _)| keep.contains(&l.as_str())).collect();
        let dk: usize = self.parts.iter().zip(&kept_mask).filter(|(_, k)| **k).map(|(p, _)| p.1).product();
        let dt = self.total() / dk;
        let mut out = Vec::with_capacity(self.total());
        let dims: Vec<usize> = self.parts.iter().map(|(_, d)| *d).collect();
        let mut digits = vec![0usize; dims.len()];
        for _ in 0..self.total() {
            let (mut ki, mut ti) = (0usize, 0usize);
            for (pos, &dig) in digits.iter().enumerate() {
                if kept_mask[pos] {
                    ki = ki * dims[pos] + dig;
                } else {
                    ti = ti * dims[pos] + dig;
                }
            }
            out.push((ki, ti));
            for pos in (0..dims.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < dims[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok((out, dk, dt))
    }

    /// Digit of `label` in the mixed-radix expansion of each full index.
    pub(crate) fn digit_of(&self, label: &str) -> Result<Vec<usize>> {
        let pos = self.position(label)?;
        let stride: usize = self.parts[pos + 1..].iter().map(|(_, d)| d).product();
        let dim = self.parts[pos].1;
        Ok((0..self.total()).map(|i| (i / stride) % dim).collect())
    }
}

impl std::fmt::Display for HilbertDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|(l, d)| format!("{l}:{d}")).collect();
        write!(f, "[{}]", s.join(", "))
    }
}
