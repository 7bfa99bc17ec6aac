//! Reconstruction weights: the constrained least-squares step.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{NeighborGraph, PointCloud};

/// Default regularization tolerance for the local Gram systems.
pub const DEFAULT_REG_TOL: f64 = 1e-3;

/// Row-stochastic sparse weight matrix W.
///
/// Row `i` holds the reconstruction weights of point `i` over its k
/// neighbors; all other entries (including the diagonal) are zero. Every
/// row sums to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseWeights {
    p: usize,
    k: usize,
    // exactly k column indices / values per row, in neighbor order
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseWeights {
    pub fn num_points(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = i * self.k..(i + 1) * self.k;
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).1.iter().sum()
    }

    /// W v
    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.p);
        for i in 0..self.p {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &w) in cols.iter().zip(vals) {
                acc += w * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Wᵀ v
    pub fn tr_mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.p);
        for i in 0..self.p {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[j] += w * v[i];
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.p, self.p);
        for i in 0..self.p {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                out[(i, j)] += w;
            }
        }
        out
    }

    pub(crate) fn max_abs_row_sum(&self) -> f64 {
        (0..self.p)
            .map(|i| self.row(i).1.iter().map(|w| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub(crate) fn max_abs_col_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.p];
        for i in 0..self.p {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                sums[j] += w.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Symmetrized support edges (i, j), each undirected edge once.
    pub(crate) fn support_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.p).flat_map(move |i| {
            let (cols, _) = self.row(i);
            cols.iter().map(move |&j| if i < j { (i, j) } else { (j, i) })
        })
    }

    /// The principal submatrix on `keep` (sorted global indices). Only valid
    /// when every neighbor of a kept point is itself kept, as is the case
    /// for a connected component of the support graph.
    pub(crate) fn restrict(&self, keep: &[usize]) -> SparseWeights {
        let mut remap = vec![usize::MAX; self.p];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let mut indices = Vec::with_capacity(keep.len() * self.k);
        let mut values = Vec::with_capacity(keep.len() * self.k);
        for &old in keep {
            let (cols, vals) = self.row(old);
            for (&j, &w) in cols.iter().zip(vals) {
                debug_assert_ne!(remap[j], usize::MAX, "neighbor crosses the component");
                indices.push(remap[j]);
                values.push(w);
            }
        }
        SparseWeights {
            p: keep.len(),
            k: self.k,
            indices,
            values,
        }
    }
}

/// Solves the per-point constrained least-squares problems and assembles W.
///
/// For each point the k x k Gram matrix C with entries
/// (x_i - x_j)·(x_i - x_l) is regularized as C + I·reg_tol·Tr(C), the system
/// C w = 1 is solved, and the weights are rescaled to sum to one. The
/// regularization is applied unconditionally; it is what keeps C invertible
/// when k exceeds the ambient dimension.
pub fn solve_weights(
    cloud: &PointCloud,
    graph: &NeighborGraph,
    reg_tol: f64,
) -> Result<SparseWeights> {
    if graph.num_points() != cloud.num_points() {
        return Err(Error::ShapeMismatch(format!(
            "graph covers {} points, cloud has {}",
            graph.num_points(),
            cloud.num_points()
        )));
    }
    if !(reg_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "reg_tol must be positive".into(),
        ));
    }
    let p = cloud.num_points();
    let dim = cloud.dim();
    let k = graph.k();

    let rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let xi = cloud.point(i);
            let nbrs = graph.neighbors(i);
            let diffs = DMatrix::from_fn(dim, k, |r, c| xi[r] - cloud.point(nbrs[c])[r]);
            let mut gram = diffs.tr_mul(&diffs);
            let ridge = reg_tol * gram.trace();
            for j in 0..k {
                gram[(j, j)] += ridge;
            }
            let ones = DVector::from_element(k, 1.0);
            let solved = match Cholesky::new(gram.clone()) {
                Some(chol) => chol.solve(&ones),
                None => gram
                    .lu()
                    .solve(&ones)
                    .ok_or(Error::SingularWeights { point: i })?,
            };
            let total: f64 = solved.sum();
            if !total.is_finite() || total == 0.0 {
                return Err(Error::SingularWeights { point: i });
            }
            Ok(solved.iter().map(|w| w / total).collect())
        })
        .collect::<Result<_>>()?;

    let mut indices = Vec::with_capacity(p * k);
    let mut values = Vec::with_capacity(p * k);
    for (i, row) in rows.into_iter().enumerate() {
        indices.extend_from_slice(graph.neighbors(i));
        values.extend(row);
    }
    Ok(SparseWeights {
        p,
        k,
        indices,
        values,
    })
}
