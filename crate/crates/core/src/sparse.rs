//! Sparse matrices over exact scalars and the elimination routines behind every
//! cohomology computation. Rows index the codomain, columns the domain.

use crate::scalar::{Field, Scalar};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("scalar backend mismatch: {0} vs {1}")]
    BackendMismatch(Field, Field),
    #[error("not a complex at {bin}: d_out * d_in has {nonzero} nonzero entries")]
    NotAComplex { bin: String, nonzero: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// A sparse row: strictly increasing column indices, no zero values.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

fn axpy(a: &Scalar, x: &SparseVec, b: &Scalar, y: &SparseVec) -> SparseVec {
    // a*x + b*y
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        let (c, v) = if take_x {
            i += 1;
            (x[i - 1].0, a * &x[i - 1].1)
        } else if take_y {
            j += 1;
            (y[j - 1].0, b * &y[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (x[i - 1].0, &(a * &x[i - 1].1) + &(b * &y[j - 1].1))
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

fn scale(v: &mut SparseVec, f: &Scalar) {
    for e in v.iter_mut() {
        e.1 = &e.1 * f;
    }
}

fn normalize(v: &mut SparseVec) {
    if v.is_empty() {
        return;
    }
    let refs: Vec<&Scalar> = v.iter().map(|e| &e.1).collect();
    let f = Scalar::content_factor(&refs);
    if !f.is_one() {
        scale(v, &f);
    }
}

fn lookup(v: &SparseVec, col: usize) -> Option<&Scalar> {
    v.binary_search_by_key(&col, |e| e.0).ok().map(|k| &v[k].1)
}

/// Forward elimination: each row in order is reduced against earlier pivots.
/// Returns pivot rows (in creation order), their leading columns.
fn echelon(rows: &[SparseVec]) -> Vec<SparseVec> {
    let mut pivots: Vec<SparseVec> = Vec::new();
    let mut lead_of: BTreeMap<usize, usize> = BTreeMap::new();
    for r in rows {
        let mut r = r.clone();
        loop {
            let Some(&(c, _)) = r.first() else { break };
            match lead_of.get(&c) {
                None => break,
                Some(&k) => {
                    let p = &pivots[k];
                    // fraction-free: r <- p_lead * r - r_lead * p
                    let a = p[0].1.clone();
                    let b = -&r[0].1;
                    r = axpy(&a, &r, &b, p);
                    normalize(&mut r);
                }
            }
        }
        if let Some(&(c, _)) = r.first() {
            normalize(&mut r);
            lead_of.insert(c, pivots.len());
            pivots.push(r);
        }
    }
    pivots
}

/// Reduced row echelon form (leading ones), rows sorted by leading column.
fn rref(rows: &[SparseVec]) -> Vec<SparseVec> {
    let mut piv = echelon(rows);
    piv.sort_by_key(|r| r[0].0);
    for r in piv.iter_mut() {
        let inv = r[0].1.inv();
        scale(r, &inv);
    }
    // back substitution, last pivot first
    for k in (0..piv.len()).rev() {
        let c = piv[k][0].0;
        let pk = piv[k].clone();
        for r in piv.iter_mut().take(k) {
            if let Some(v) = lookup(r, c) {
                let f = -v;
                *r = axpy(&Scalar::one(), r, &f, &pk);
            }
        }
    }
    piv
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Scalar::one()));
        }
        m
    }

    /// Duplicate positions are summed; zero results are dropped.
    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            let slot = acc[r].entry(c).or_default();
            *slot = &*slot + &v;
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { rows, cols, data }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v.clone())));
        Self::from_triplets(rows.len(), cols, trip)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let d: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect();
        Self::from_dense(&d)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        lookup(&self.data[r], c).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    /// Common backend of all entries.
    pub fn field(&self) -> Result<Field, KernelError> {
        let mut f = Field::Rational;
        for (_, _, v) in self.entries() {
            let g = v.field();
            f = f.join(g).ok_or(KernelError::BackendMismatch(f, g))?;
        }
        Ok(f)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut data = vec![Vec::new(); self.cols];
        for (i, j, v) in self.entries() {
            data[j].push((i, v.clone()));
        }
        SparseMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// self * other.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, KernelError> {
        if self.cols != other.rows {
            return Err(KernelError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows);
        for r in &self.data {
            let mut acc: SparseVec = Vec::new();
            for (k, a) in r {
                if !other.data[*k].is_empty() {
                    acc = axpy(&Scalar::one(), &acc, a, &other.data[*k]);
                }
            }
            data.push(acc);
        }
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| axpy(&Scalar::one(), a, &Scalar::int(-1), b))
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| axpy(&Scalar::one(), a, &Scalar::one(), b))
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, f: &Scalar) -> SparseMatrix {
        let mut m = self.clone();
        if f.is_zero() {
            return SparseMatrix::zeros(self.rows, self.cols);
        }
        for r in m.data.iter_mut() {
            scale(r, f);
        }
        m
    }

    /// Stack columns: [self | other].
    pub fn hcat(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (j + self.cols, v.clone())));
                r
            })
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols + other.cols, data }
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(rows: usize, vecs: &[SparseVec]) -> SparseMatrix {
        let trip = vecs
            .iter()
            .enumerate()
            .flat_map(|(j, v)| v.iter().map(move |(i, x)| (*i, j, x.clone())));
        SparseMatrix::from_triplets(rows, vecs.len(), trip)
    }

    /// Restrict to a subset of columns (in the given order).
    pub fn select_cols(&self, cols: &[usize]) -> SparseMatrix {
        let pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let trip = self
            .entries()
            .filter_map(|(i, j, v)| pos.get(&j).map(|&k| (i, k, v.clone())));
        SparseMatrix::from_triplets(self.rows, cols.len(), trip)
    }
}

/// Rank over the fraction field; deterministic.
pub fn rank(m: &SparseMatrix) -> Result<usize, KernelError> {
    m.field()?;
    Ok(echelon(&m.data).len())
}

/// Echelonized basis of the right kernel with leading ones.
pub fn kernel_basis(m: &SparseMatrix) -> Result<Vec<SparseVec>, KernelError> {
    m.field()?;
    let r = rref(&m.data);
    let pivot_cols: Vec<usize> = r.iter().map(|row| row[0].0).collect();
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut vecs: Vec<SparseVec> = Vec::new();
    for f in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v: BTreeMap<usize, Scalar> = BTreeMap::new();
        v.insert(f, Scalar::one());
        for row in &r {
            if let Some(x) = lookup(row, f) {
                v.insert(row[0].0, -x);
            }
        }
        vecs.push(v.into_iter().collect());
    }
    Ok(rref(&vecs))
}

/// Column space basis as a list of sparse vectors (echelonized).
pub fn column_space(m: &SparseMatrix) -> Result<Vec<SparseVec>, KernelError> {
    m.field()?;
    Ok(echelon(&m.transpose().data))
}

/// dim ker(d_out) - rank(d_in), after checking d_out * d_in = 0.
pub fn cohomology_dims(d_in: &SparseMatrix, d_out: &SparseMatrix, bin: &str) -> Result<usize, KernelError> {
    if d_in.rows() != d_out.cols() {
        return Err(KernelError::Shape(format!(
            "at {bin}: d_in lands in dim {} but d_out starts from dim {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(KernelError::NotAComplex { bin: bin.to_string(), nonzero: comp.nnz() });
    }
    let ker = d_out.cols() - rank(d_out)?;
    Ok(ker - rank(d_in)?)
}

/// Rank of the map induced on cohomology by a chain map `f` between two complexes,
/// given the cycles of the source and the boundary map into the target degree.
pub fn induced_rank(
    f: &SparseMatrix,
    d_src_out: &SparseMatrix,
    d_tgt_in: &SparseMatrix,
) -> Result<usize, KernelError> {
    let z = kernel_basis(d_src_out)?;
    let fz = f.mul(&SparseMatrix::from_columns(f.cols(), &z))?;
    let both = fz.hcat(d_tgt_in);
    Ok(rank(&both)? - rank(d_tgt_in)?)
}
