//! Representations of the linearly oriented A_n quiver and their interval
//! decomposition.

use crate::field::Field;
use crate::linalg::Matrix;

/// A representation of `1 -> 2 -> ... -> n`: a space per vertex and a
/// `dims[i+1] x dims[i]` matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverRep<F> {
    pub dims: Vec<usize>,
    pub maps: Vec<Matrix<F>>,
}

impl<F: Field> QuiverRep<F> {
    pub fn new(dims: Vec<usize>, maps: Vec<Matrix<F>>) -> Self {
        assert_eq!(maps.len() + 1, dims.len().max(1), "one map per arrow");
        for (i, m) in maps.iter().enumerate() {
            assert_eq!((m.rows(), m.cols()), (dims[i + 1], dims[i]), "arrow {i} shape");
        }
        QuiverRep { dims, maps }
    }

    pub fn zero(n: usize) -> Self {
        QuiverRep {
            dims: vec![0; n],
            maps: (0..n.saturating_sub(1)).map(|_| Matrix::zeros(0, 0)).collect(),
        }
    }

    pub fn vertices(&self) -> usize {
        self.dims.len()
    }

    /// Composite map `V_a -> V_b` for 1-based vertices `a <= b`.
    pub fn composite(&self, a: usize, b: usize) -> Matrix<F> {
        let mut m = Matrix::identity(self.dims[a - 1]);
        for arrow in a..b {
            m = &self.maps[arrow - 1] * &m;
        }
        m
    }

    /// Rank of the composite `V_a -> V_b`; zero outside `1..=n`.
    fn rank_between(&self, a: usize, b: usize) -> i64 {
        if a == 0 || b > self.vertices() {
            return 0;
        }
        self.composite(a, b).rank() as i64
    }
}

/// Multiplicities of interval modules `[a, b]` (1-based, `a <= b`) in `rep`,
/// by inclusion–exclusion over ranks of composite arrow maps.
pub fn rep_decompose<F: Field>(rep: &QuiverRep<F>) -> Vec<((usize, usize), u32)> {
    let n = rep.vertices();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a..=n {
            let m = rep.rank_between(a, b) - rep.rank_between(a - 1, b) - rep.rank_between(a, b + 1)
                + rep.rank_between(a - 1, b + 1);
            assert!(m >= 0, "negative interval multiplicity");
            if m > 0 {
                out.push(((a, b), m as u32));
            }
        }
    }
    out
}
