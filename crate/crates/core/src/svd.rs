//! Truncated SVD of a weighted matrix into dense row embeddings.
//!
//! Small inputs (both sides under [`SvdOptions::dense_cutoff`]) go through an
//! exact dense SVD. Larger ones use a randomized range finder with Gaussian test
//! vectors, oversampling and subspace (power) iterations, followed by an exact
//! SVD of the small projected matrix.
//!
//! Component signs are fixed so that the largest-magnitude entry of every left
//! singular vector is positive, which makes output independent of the path taken
//! up to numerical error, and bit-identical for a fixed seed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sparse::Csr;
use crate::vocab::{Vocabulary, WordId};
use crate::weighting::{Scheme, WeightedMatrix};

/// Exponent `p` applied to the singular values in the row embedding `U Σ^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EigenWeight {
    Zero,
    Half,
    #[default]
    One,
}

impl EigenWeight {
    pub fn exponent(self) -> f64 {
        match self {
            EigenWeight::Zero => 0.0,
            EigenWeight::Half => 0.5,
            EigenWeight::One => 1.0,
        }
    }

    fn apply(self, s: f64) -> f64 {
        match self {
            EigenWeight::Zero => 1.0,
            EigenWeight::Half => s.sqrt(),
            EigenWeight::One => s,
        }
    }
}

impl fmt::Display for EigenWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EigenWeight::Zero => "0",
            EigenWeight::Half => "0.5",
            EigenWeight::One => "1",
        })
    }
}

impl FromStr for EigenWeight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "0.0" => Ok(EigenWeight::Zero),
            "0.5" | ".5" => Ok(EigenWeight::Half),
            "1" | "1.0" => Ok(EigenWeight::One),
            _ => Err(Error::config(format!("eigen weight p must be 0, 0.5 or 1, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SvdOptions {
    pub k: usize,
    pub eigen_weight: EigenWeight,
    pub seed: u64,
    pub oversample: usize,
    pub power_iters: usize,
    /// Matrices with both dimensions at or below this size use the exact dense path.
    pub dense_cutoff: usize,
}

impl SvdOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        SvdOptions {
            k,
            eigen_weight: EigenWeight::One,
            seed,
            oversample: 10,
            power_iters: 4,
            dense_cutoff: 1000,
        }
    }
}

/// Top-`k` factors: `u` is rows × k, `vt` is k × cols, `singular_values` descending.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub vt: DMatrix<f64>,
}

impl Decomposition {
    /// `‖M − U Σ Vᵀ‖_F`, computed densely.
    pub fn reconstruction_error(&self, m: &Csr<f64>) -> f64 {
        let mut dense = to_dense(m);
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..k {
            us.column_mut(j).scale_mut(self.singular_values[j]);
        }
        dense -= us * &self.vt;
        dense.norm()
    }
}

fn to_dense(m: &Csr<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (r, c, v) in m.iter() {
        d[(r, c as usize)] = v;
    }
    d
}

/// Sorts components by descending singular value and fixes signs.
fn canonicalize(u: DMatrix<f64>, s: Vec<f64>, vt: DMatrix<f64>, k: usize) -> Decomposition {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    order.truncate(k);
    let mut uk = DMatrix::zeros(u.nrows(), k);
    let mut vk = DMatrix::zeros(k, vt.ncols());
    let mut sk = Vec::with_capacity(k);
    for (j, &src) in order.iter().enumerate() {
        let col = u.column(src);
        let mut pivot = 0;
        for i in 0..col.len() {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if !col.is_empty() && col[pivot] < 0.0 { -1.0 } else { 1.0 };
        uk.column_mut(j).copy_from(&(col * sign));
        vk.row_mut(j).copy_from(&(vt.row(src) * sign));
        sk.push(s[src].max(0.0));
    }
    Decomposition {
        u: uk,
        singular_values: sk,
        vt: vk,
    }
}

fn dense_svd(m: &Csr<f64>, k: usize) -> Decomposition {
    let svd = to_dense(m).svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    canonicalize(u, svd.singular_values.iter().copied().collect(), vt, k)
}

fn orthonormal_basis(y: DMatrix<f64>) -> DMatrix<f64> {
    y.qr().q()
}

fn randomized_svd(m: &Csr<f64>, opts: &SvdOptions) -> Decomposition {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let width = (opts.k + opts.oversample).min(rows.min(cols));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let omega: Vec<f64> = (0..cols * width).map(|_| StandardNormal.sample(&mut rng)).collect();

    let mut y = vec![0.0; rows * width];
    m.mul_dense(&omega, width, &mut y);
    let mut q = orthonormal_basis(DMatrix::from_vec(rows, width, y));
    let mut z = vec![0.0; cols * width];
    for _ in 0..opts.power_iters {
        m.tmul_dense(q.as_slice(), width, &mut z);
        let qz = orthonormal_basis(DMatrix::from_column_slice(cols, width, &z));
        let mut y = vec![0.0; rows * width];
        m.mul_dense(qz.as_slice(), width, &mut y);
        q = orthonormal_basis(DMatrix::from_vec(rows, width, y));
    }
    // Bᵀ = Aᵀ Q is cols × width; its SVD Bᵀ = W Σ Xᵀ gives B = X Σ Wᵀ
    m.tmul_dense(q.as_slice(), width, &mut z);
    let bt = DMatrix::from_vec(cols, width, z);
    let svd = bt.svd(true, true);
    let w = svd.u.expect("u requested");
    let xt = svd.v_t.expect("v_t requested");
    let u = q * xt.transpose();
    canonicalize(u, svd.singular_values.iter().copied().collect(), w.transpose(), opts.k)
}

/// Top-`k` singular triplets of `m`.
pub fn decompose(m: &Csr<f64>, opts: &SvdOptions) -> Result<Decomposition> {
    let limit = m.n_rows().min(m.n_cols());
    if opts.k < 1 || opts.k > limit {
        return Err(Error::config(format!(
            "k = {} outside 1..={} for a {}×{} matrix",
            opts.k,
            limit,
            m.n_rows(),
            m.n_cols()
        )));
    }
    if m.n_rows() <= opts.dense_cutoff && m.n_cols() <= opts.dense_cutoff {
        Ok(dense_svd(m, opts.k))
    } else {
        Ok(randomized_svd(m, opts))
    }
}

/// Dense `k`-dimensional row embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseModel {
    vocab: Vocabulary,
    rows: Vec<WordId>,
    /// rows × k, row-major.
    vectors: Vec<f64>,
    singular_values: Vec<f64>,
    eigen_weight: EigenWeight,
    seed: u64,
    scheme: Scheme,
    pub provenance: BTreeMap<String, String>,
}

impl DenseModel {
    pub fn from_parts(
        vocab: Vocabulary,
        rows: Vec<WordId>,
        vectors: Vec<f64>,
        singular_values: Vec<f64>,
        eigen_weight: EigenWeight,
        seed: u64,
        scheme: Scheme,
    ) -> Self {
        assert_eq!(vectors.len(), rows.len() * singular_values.len());
        DenseModel {
            vocab,
            rows,
            vectors,
            singular_values,
            eigen_weight,
            seed,
            scheme,
            provenance: BTreeMap::new(),
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn rows(&self) -> &[WordId] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.singular_values.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn eigen_weight(&self) -> EigenWeight {
        self.eigen_weight
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Weighting of the matrix the model was reduced from.
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn vectors_flat(&self) -> &[f64] {
        &self.vectors
    }

    pub fn vector(&self, row: usize) -> &[f64] {
        let k = self.k();
        &self.vectors[row * k..(row + 1) * k]
    }

    pub fn row_of(&self, id: WordId) -> Option<usize> {
        self.rows.binary_search(&id).ok()
    }
}

/// Reduces `m` to `U_k Σ_k^p` row embeddings.
pub fn truncated_svd(m: &WeightedMatrix, opts: &SvdOptions) -> Result<DenseModel> {
    let d = decompose(m.values(), opts)?;
    let k = opts.k;
    let n = m.rows().len();
    let mut vectors = vec![0.0; n * k];
    for j in 0..k {
        let w = opts.eigen_weight.apply(d.singular_values[j]);
        for i in 0..n {
            vectors[i * k + j] = d.u[(i, j)] * w;
        }
    }
    let mut model = DenseModel::from_parts(
        m.vocab().clone(),
        m.rows().to_vec(),
        vectors,
        d.singular_values,
        opts.eigen_weight,
        opts.seed,
        m.scheme(),
    );
    model.provenance = m.provenance.clone();
    Ok(model)
}
