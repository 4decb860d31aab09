//! Bounded complexes of projective kA_n-modules and the homotopy category.
//!
//! The indecomposable projective `P_i` is the interval `[i, n]`, so
//! `Hom(P_i, P_j)` is one-dimensional exactly when `j <= i`, spanned by the
//! inclusion. A differential or chain-map component between sums of
//! projectives is therefore a scalar matrix whose `(r, c)` entry may be
//! nonzero only when `vertex(target r) <= vertex(source c)`; composition is
//! ordinary matrix multiplication.

use crate::field::Field;
use crate::linalg::{Matrix, QuotientCoords, Span};

use super::rep::{rep_decompose, QuiverRep};

/// A bounded complex `... -> X^d -> X^{d+1} -> ...` of projectives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjComplex<F> {
    n: usize,
    lo: i32,
    terms: Vec<Vec<u8>>,
    diffs: Vec<Matrix<F>>,
}

impl<F: Field> ProjComplex<F> {
    pub fn zero(n: usize) -> Self {
        ProjComplex {
            n,
            lo: 0,
            terms: Vec::new(),
            diffs: Vec::new(),
        }
    }

    /// Builds a complex from its terms starting at degree `lo` and the
    /// differentials between consecutive terms.
    pub fn new(n: usize, lo: i32, terms: Vec<Vec<u8>>, diffs: Vec<Matrix<F>>) -> Self {
        assert_eq!(diffs.len() + 1, terms.len().max(1), "one differential per gap");
        let c = ProjComplex { n, lo, terms, diffs };
        for d in c.lo..c.hi() {
            let m = c.diff(d);
            for r in 0..m.rows() {
                for col in 0..m.cols() {
                    if !m[(r, col)].is_zero() {
                        assert!(
                            c.term(d + 1)[r] <= c.term(d)[col],
                            "differential entry outside Hom(P_i, P_j)"
                        );
                    }
                }
            }
        }
        debug_assert!(c.is_complex());
        c.trimmed()
    }

    /// Stalk complex of `P_vertex` in degree `deg`.
    pub fn projective(n: usize, vertex: u8, deg: i32) -> Self {
        ProjComplex::new(n, deg, vec![vec![vertex]], Vec::new())
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// One past the top nonzero degree.
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Vec::is_empty)
    }

    pub fn term(&self, d: i32) -> &[u8] {
        if d < self.lo || d >= self.hi() {
            return &[];
        }
        &self.terms[(d - self.lo) as usize]
    }

    /// Differential `X^d -> X^{d+1}`.
    pub fn diff(&self, d: i32) -> Matrix<F> {
        if d >= self.lo && d + 1 < self.hi() {
            return self.diffs[(d - self.lo) as usize].clone();
        }
        Matrix::zeros(self.term(d + 1).len(), self.term(d).len())
    }

    pub fn is_complex(&self) -> bool {
        (self.lo..self.hi()).all(|d| (&self.diff(d + 1) * &self.diff(d)).is_zero())
    }

    fn trimmed(mut self) -> Self {
        while self.terms.last().is_some_and(Vec::is_empty) {
            self.terms.pop();
            self.diffs.pop();
        }
        while self.terms.first().is_some_and(Vec::is_empty) {
            self.terms.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        if self.terms.is_empty() {
            self.lo = 0;
            self.diffs.clear();
        }
        self
    }

    /// `X[k]`: `X[k]^d = X^{d+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i32) -> Self {
        let sign = if k.rem_euclid(2) == 0 { F::one() } else { -F::one() };
        ProjComplex {
            n: self.n,
            lo: self.lo - k,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|m| m.scale(sign)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let terms: Vec<Vec<u8>> = (lo..hi)
            .map(|d| [self.term(d), other.term(d)].concat())
            .collect();
        let diffs = (lo..hi - 1)
            .map(|d| block_diag(&self.diff(d), &other.diff(d)))
            .collect();
        ProjComplex::new(self.n, lo, terms, diffs)
    }

    /// Total dimension of the cohomology in each degree, as quiver
    /// representations.
    pub fn cohomology(&self, d: i32) -> QuiverRep<F> {
        let n = self.n;
        let here = self.term(d);
        let d_out = self.diff(d);
        let d_in = self.diff(d - 1);
        let prev = self.term(d - 1);
        let next = self.term(d + 1);
        // per vertex v: coordinates of X^d at v are summands with vertex <= v
        let mut bases: Vec<Vec<Vec<F>>> = Vec::with_capacity(n);
        let mut images: Vec<Span<F>> = Vec::with_capacity(n);
        for v in 1..=n as u8 {
            let cols_here: Vec<usize> = idx_le(here, v);
            let rows_next: Vec<usize> = idx_le(next, v);
            let cols_prev: Vec<usize> = idx_le(prev, v);
            let out_v = d_out.submatrix(&rows_next, &cols_here);
            let in_v = d_in.submatrix(&cols_here, &cols_prev);
            let kernel = out_v.kernel();
            let image_vecs: Vec<Vec<F>> = (0..in_v.cols()).map(|j| in_v.col(j)).collect();
            let image = Span::of(cols_here.len(), &image_vecs);
            let mut grow = image.clone();
            let mut basis = Vec::new();
            for k in kernel {
                if grow.insert(&k) {
                    basis.push(k);
                }
            }
            bases.push(basis);
            images.push(image);
        }
        let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
        let mut maps = Vec::new();
        for v in 1..n {
            let from_idx = idx_le(here, v as u8);
            let to_idx = idx_le(here, v as u8 + 1);
            let qc = QuotientCoords::new(to_idx.len(), images[v].basis(), &bases[v]);
            let mut m = Matrix::zeros(dims[v], dims[v - 1]);
            for (j, b) in bases[v - 1].iter().enumerate() {
                // inclusion of coordinates at v into those at v+1
                let mut w = vec![F::zero(); to_idx.len()];
                for (pos, &s) in from_idx.iter().enumerate() {
                    let t = to_idx.iter().position(|&x| x == s).expect("inclusion");
                    w[t] = b[pos];
                }
                let c = qc.coords(&w).expect("cycle maps to cycle");
                for (i, x) in c.into_iter().enumerate() {
                    m[(i, j)] = x;
                }
            }
            maps.push(m);
        }
        QuiverRep::new(dims, maps)
    }

    /// Krull-Schmidt decomposition via `X ≅ ⊕ H^d(X)[-d]`: each entry is
    /// `(a, b, shift, multiplicity)`.
    pub fn decompose(&self) -> Vec<(usize, usize, i32, u32)> {
        let mut out = Vec::new();
        for d in self.lo..self.hi() {
            for ((a, b), m) in rep_decompose(&self.cohomology(d)) {
                out.push((a, b, -d, m));
            }
        }
        out
    }
}

fn idx_le(term: &[u8], v: u8) -> Vec<usize> {
    term.iter()
        .enumerate()
        .filter(|(_, &s)| s <= v)
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn block_diag<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let mut m = Matrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), a.cols(), b);
    m
}

/// A degree-0 map of graded objects `X -> Y`, one matrix per degree.
/// Components outside `lo..hi` are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<F> {
    lo: i32,
    comps: Vec<Matrix<F>>,
}

impl<F: Field> ChainMap<F> {
    pub fn zero(x: &ProjComplex<F>, y: &ProjComplex<F>) -> Self {
        let (lo, hi) = joint_range(x, y);
        ChainMap {
            lo,
            comps: (lo..hi)
                .map(|d| Matrix::zeros(y.term(d).len(), x.term(d).len()))
                .collect(),
        }
    }

    pub fn from_fn(
        x: &ProjComplex<F>,
        y: &ProjComplex<F>,
        mut f: impl FnMut(i32) -> Matrix<F>,
    ) -> Self {
        let (lo, hi) = joint_range(x, y);
        ChainMap {
            lo,
            comps: (lo..hi).map(&mut f).collect(),
        }
    }

    pub fn comp(&self, d: i32, rows: usize, cols: usize) -> Matrix<F> {
        if d >= self.lo && ((d - self.lo) as usize) < self.comps.len() {
            let m = &self.comps[(d - self.lo) as usize];
            if m.rows() == rows && m.cols() == cols {
                return m.clone();
            }
            assert!(m.is_zero(), "component shape mismatch");
        }
        Matrix::zeros(rows, cols)
    }

    /// `g ∘ f` for `f: X -> Y` (self) and `g: Y -> Z`.
    pub fn then(
        &self,
        g: &ChainMap<F>,
        x: &ProjComplex<F>,
        y: &ProjComplex<F>,
        z: &ProjComplex<F>,
    ) -> ChainMap<F> {
        ChainMap::from_fn(x, z, |d| {
            let f_d = self.comp(d, y.term(d).len(), x.term(d).len());
            let g_d = g.comp(d, z.term(d).len(), y.term(d).len());
            &g_d * &f_d
        })
    }

    pub fn add(&self, other: &ChainMap<F>, x: &ProjComplex<F>, y: &ProjComplex<F>) -> Self {
        ChainMap::from_fn(x, y, |d| {
            let (r, c) = (y.term(d).len(), x.term(d).len());
            self.comp(d, r, c).add(&other.comp(d, r, c))
        })
    }

    pub fn scale(&self, s: F) -> Self {
        ChainMap {
            lo: self.lo,
            comps: self.comps.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn is_chain_map(&self, x: &ProjComplex<F>, y: &ProjComplex<F>) -> bool {
        let (lo, hi) = joint_range(x, y);
        (lo - 1..hi).all(|d| {
            let f_d = self.comp(d, y.term(d).len(), x.term(d).len());
            let f_d1 = self.comp(d + 1, y.term(d + 1).len(), x.term(d + 1).len());
            (&y.diff(d) * &f_d).sub(&(&f_d1 * &x.diff(d))).is_zero()
        })
    }

    /// Shifted map `f[k]: X[k] -> Y[k]` (components are reindexed, no sign).
    pub fn shift(&self, k: i32) -> Self {
        ChainMap {
            lo: self.lo - k,
            comps: self.comps.clone(),
        }
    }
}

fn joint_range<F: Field>(x: &ProjComplex<F>, y: &ProjComplex<F>) -> (i32, i32) {
    match (x.is_zero(), y.is_zero()) {
        (true, true) => (0, 0),
        (true, false) => (y.lo(), y.hi()),
        (false, true) => (x.lo(), x.hi()),
        (false, false) => (x.lo().min(y.lo()), x.hi().max(y.hi())),
    }
}

/// `Hom_K(X, Y)`: chain maps modulo null-homotopic maps, with a fixed
/// basis of representatives and a coordinate map.
#[derive(Clone, Debug)]
pub struct HomSpace<F> {
    x: ProjComplex<F>,
    y: ProjComplex<F>,
    coords: Vec<(i32, usize, usize)>,
    boundaries: Span<F>,
    reps: Vec<Vec<F>>,
    quotient: QuotientCoords<F>,
}

impl<F: Field> HomSpace<F> {
    pub fn new(x: &ProjComplex<F>, y: &ProjComplex<F>) -> Self {
        let (lo, hi) = joint_range(x, y);
        let coords = allowed_entries(x, y, lo, hi, 0);
        let htpy = allowed_entries(x, y, lo, hi + 1, -1);

        // chain condition d_Y f - f d_X, one column per coordinate
        let cond_rows: Vec<(i32, usize, usize)> = (lo - 1..hi)
            .flat_map(|d| {
                let (r, c) = (y.term(d + 1).len(), x.term(d).len());
                (0..r).flat_map(move |i| (0..c).map(move |j| (d, i, j)))
            })
            .collect();
        let mut cond = Matrix::zeros(cond_rows.len(), coords.len());
        for (col, &(d, r, c)) in coords.iter().enumerate() {
            // unit map at (d, r, c) contributes d_Y^d e at degree d and
            // -e d_X^{d-1} at degree d-1
            let dy = y.diff(d);
            for i in 0..dy.rows() {
                let v = dy[(i, r)];
                if !v.is_zero() {
                    let row = row_of(&cond_rows, d, i, c);
                    cond[(row, col)] = cond[(row, col)] + v;
                }
            }
            let dx = x.diff(d - 1);
            for j in 0..dx.cols() {
                let v = dx[(c, j)];
                if !v.is_zero() {
                    let row = row_of(&cond_rows, d - 1, r, j);
                    cond[(row, col)] = cond[(row, col)] - v;
                }
            }
        }
        let cycles = cond.kernel();

        // homotopies h: X^d -> Y^{d-1}; image d_Y h + h d_X
        let mut boundary_vecs = Vec::new();
        for &(d, r, c) in &htpy {
            let mut v = vec![F::zero(); coords.len()];
            // d_Y^{d-1} h^d lands in degree d-1 component X^d -> Y^d ... at degree d
            let dy = y.diff(d - 1);
            for i in 0..dy.rows() {
                let s = dy[(i, r)];
                if !s.is_zero() {
                    let k = coord_of(&coords, d, i, c);
                    v[k] = v[k] + s;
                }
            }
            // h^d d_X^{d-1} at degree d-1
            let dx = x.diff(d - 1);
            for j in 0..dx.cols() {
                let s = dx[(c, j)];
                if !s.is_zero() {
                    let k = coord_of(&coords, d - 1, r, j);
                    v[k] = v[k] + s;
                }
            }
            boundary_vecs.push(v);
        }
        let boundaries = Span::of(coords.len(), &boundary_vecs);
        let mut grow = boundaries.clone();
        let mut reps = Vec::new();
        for z in cycles {
            if grow.insert(&z) {
                reps.push(z);
            }
        }
        let quotient = QuotientCoords::new(coords.len(), boundaries.basis(), &reps);
        HomSpace {
            x: x.clone(),
            y: y.clone(),
            coords,
            boundaries,
            reps,
            quotient,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn source(&self) -> &ProjComplex<F> {
        &self.x
    }

    pub fn target(&self) -> &ProjComplex<F> {
        &self.y
    }

    pub fn basis(&self) -> Vec<ChainMap<F>> {
        self.reps.iter().map(|v| self.unflatten(v)).collect()
    }

    /// Representative chain map for the class with the given coordinates.
    pub fn element(&self, coeffs: &[F]) -> ChainMap<F> {
        assert_eq!(coeffs.len(), self.dim());
        let mut v = vec![F::zero(); self.coords.len()];
        for (rep, &c) in self.reps.iter().zip(coeffs) {
            for (vi, ri) in v.iter_mut().zip(rep) {
                *vi = *vi + c * *ri;
            }
        }
        self.unflatten(&v)
    }

    /// Coordinates of the homotopy class of the chain map `f`.
    pub fn coordinates(&self, f: &ChainMap<F>) -> Vec<F> {
        let v = self.flatten(f);
        self.quotient
            .coords(&v)
            .expect("argument is not a chain map between these complexes")
    }

    pub fn is_null(&self, f: &ChainMap<F>) -> bool {
        self.boundaries.contains(&self.flatten(f))
    }

    fn flatten(&self, f: &ChainMap<F>) -> Vec<F> {
        let (lo, hi) = joint_range(&self.x, &self.y);
        for d in lo..hi {
            let m = f.comp(d, self.y.term(d).len(), self.x.term(d).len());
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if !m[(r, c)].is_zero() {
                        assert!(
                            self.y.term(d)[r] <= self.x.term(d)[c],
                            "map entry outside Hom(P_i, P_j)"
                        );
                    }
                }
            }
        }
        self.coords
            .iter()
            .map(|&(d, r, c)| f.comp(d, self.y.term(d).len(), self.x.term(d).len())[(r, c)])
            .collect()
    }

    fn unflatten(&self, v: &[F]) -> ChainMap<F> {
        let (x, y) = (&self.x, &self.y);
        ChainMap::from_fn(x, y, |d| {
            let mut m = Matrix::zeros(y.term(d).len(), x.term(d).len());
            for (k, &(dd, r, c)) in self.coords.iter().enumerate() {
                if dd == d {
                    m[(r, c)] = v[k];
                }
            }
            m
        })
    }
}

fn allowed_entries<F: Field>(
    x: &ProjComplex<F>,
    y: &ProjComplex<F>,
    lo: i32,
    hi: i32,
    offset: i32,
) -> Vec<(i32, usize, usize)> {
    let mut out = Vec::new();
    for d in lo..hi {
        let src = x.term(d);
        let tgt = y.term(d + offset);
        for (r, &t) in tgt.iter().enumerate() {
            for (c, &s) in src.iter().enumerate() {
                if t <= s {
                    out.push((d, r, c));
                }
            }
        }
    }
    out
}

fn coord_of(coords: &[(i32, usize, usize)], d: i32, r: usize, c: usize) -> usize {
    coords
        .iter()
        .position(|&e| e == (d, r, c))
        .expect("entry is an allowed coordinate")
}

fn row_of(rows: &[(i32, usize, usize)], d: i32, r: usize, c: usize) -> usize {
    rows.iter()
        .position(|&e| e == (d, r, c))
        .expect("condition row exists")
}

/// Rank of the map `Hom(S, X) -> Hom(S, Y)` given by postcomposition with `f`.
pub fn postcompose_rank<F: Field>(
    from: &HomSpace<F>,
    to: &HomSpace<F>,
    f: &ChainMap<F>,
) -> usize {
    let (s, x, y) = (from.source(), from.target(), to.target());
    let images: Vec<Vec<F>> = from
        .basis()
        .iter()
        .map(|g| to.coordinates(&g.then(f, s, x, y)))
        .collect();
    if images.is_empty() || to.dim() == 0 {
        return 0;
    }
    Matrix::from_cols(to.dim(), &images).rank()
}

/// Rank of the map `Hom(Y, T) -> Hom(X, T)` given by precomposition with `f: X -> Y`.
pub fn precompose_rank<F: Field>(
    from: &HomSpace<F>,
    to: &HomSpace<F>,
    f: &ChainMap<F>,
) -> usize {
    let (y, t, x) = (from.source(), from.target(), to.source());
    let images: Vec<Vec<F>> = from
        .basis()
        .iter()
        .map(|g| to.coordinates(&f.then(g, x, y, t)))
        .collect();
    if images.is_empty() || to.dim() == 0 {
        return 0;
    }
    Matrix::from_cols(to.dim(), &images).rank()
}

/// A realized triangle `A -> B -> C -> A[1]` with explicit maps.
#[derive(Clone, Debug)]
pub struct Triangle<F> {
    pub a: ProjComplex<F>,
    pub b: ProjComplex<F>,
    pub c: ProjComplex<F>,
    pub inflation: ChainMap<F>,
    pub deflation: ChainMap<F>,
    /// `C -> A[1]`, where `A[1]` is `a.shift(1)`.
    pub connecting: ChainMap<F>,
}

/// Twisted sum realizing `delta: C -> A[1]`: `B^d = C^d ⊕ A^d` with
/// differential `[[d_C, 0], [delta, d_A]]`.
pub fn realize_extension<F: Field>(
    c: &ProjComplex<F>,
    a: &ProjComplex<F>,
    delta: &ChainMap<F>,
) -> Triangle<F> {
    let n = c.vertices();
    let a1 = a.shift(1);
    debug_assert!(delta.is_chain_map(c, &a1));
    let (lo, hi) = match (c.is_zero(), a.is_zero()) {
        (true, true) => (0, 0),
        (true, false) => (a.lo(), a.hi()),
        (false, true) => (c.lo(), c.hi()),
        (false, false) => (c.lo().min(a.lo()), c.hi().max(a.hi())),
    };
    let terms: Vec<Vec<u8>> = (lo..hi).map(|d| [c.term(d), a.term(d)].concat()).collect();
    let diffs: Vec<Matrix<F>> = (lo..hi - 1)
        .map(|d| {
            let mut m = block_diag(&c.diff(d), &a.diff(d));
            let delta_d = delta.comp(d, a1.term(d).len(), c.term(d).len());
            m.set_block(c.term(d + 1).len(), 0, &delta_d);
            m
        })
        .collect();
    let b = if terms.is_empty() {
        ProjComplex::zero(n)
    } else {
        ProjComplex::new(n, lo, terms, diffs)
    };
    let inflation = ChainMap::from_fn(a, &b, |d| {
        let (ci, ai) = (c.term(d).len(), a.term(d).len());
        let mut m = Matrix::zeros(ci + ai, ai);
        m.set_block(ci, 0, &Matrix::identity(ai));
        m
    });
    let deflation = ChainMap::from_fn(&b, c, |d| {
        let (ci, ai) = (c.term(d).len(), a.term(d).len());
        let mut m = Matrix::zeros(ci, ci + ai);
        m.set_block(0, 0, &Matrix::identity(ci));
        m
    });
    Triangle {
        a: a.clone(),
        b,
        c: c.clone(),
        inflation,
        deflation,
        connecting: delta.clone(),
    }
}

/// Completes `f: M -> X` to a triangle `K -> M -> X -> K[1]` with
/// `K^d = M^d ⊕ X^{d-1}`.
pub fn realize_deflation<F: Field>(
    m: &ProjComplex<F>,
    x: &ProjComplex<F>,
    f: &ChainMap<F>,
) -> Triangle<F> {
    let n = m.vertices();
    debug_assert!(f.is_chain_map(m, x));
    let x_lo = if x.is_zero() { m.lo() } else { x.lo() + 1 };
    let x_hi = if x.is_zero() { m.hi() } else { x.hi() + 1 };
    let (lo, hi) = match (m.is_zero(), x.is_zero()) {
        (true, true) => (0, 0),
        (true, false) => (x_lo, x_hi),
        (false, true) => (m.lo(), m.hi()),
        (false, false) => (m.lo().min(x_lo), m.hi().max(x_hi)),
    };
    let terms: Vec<Vec<u8>> = (lo..hi).map(|d| [m.term(d), x.term(d - 1)].concat()).collect();
    let diffs: Vec<Matrix<F>> = (lo..hi - 1)
        .map(|d| {
            let mut mat = block_diag(&m.diff(d), &x.diff(d - 1).scale(-F::one()));
            let f_d = f.comp(d, x.term(d).len(), m.term(d).len()).scale(-F::one());
            mat.set_block(m.term(d + 1).len(), 0, &f_d);
            mat
        })
        .collect();
    let k = if terms.is_empty() {
        ProjComplex::zero(n)
    } else {
        ProjComplex::new(n, lo, terms, diffs)
    };
    let inflation = ChainMap::from_fn(&k, m, |d| {
        let (mi, xi) = (m.term(d).len(), x.term(d - 1).len());
        let mut mat = Matrix::zeros(mi, mi + xi);
        mat.set_block(0, 0, &Matrix::identity(mi));
        mat
    });
    let k1 = k.shift(1);
    let connecting = ChainMap::from_fn(x, &k1, |d| {
        // K[1]^d = K^{d+1} = M^{d+1} ⊕ X^d
        let (mi, xi) = (m.term(d + 1).len(), x.term(d).len());
        let mut mat = Matrix::zeros(mi + xi, xi);
        mat.set_block(mi, 0, &Matrix::identity(xi));
        mat
    });
    Triangle {
        a: k,
        b: m.clone(),
        c: x.clone(),
        inflation,
        deflation: f.clone(),
        connecting,
    }
}
