//! The three-step embedding: reconstruction weights, cost matrix with
//! connectivity repair, and the bottom-eigenvector coordinates.

mod cost;
mod eigen;
mod weights;

pub use cost::{
    build_cost_matrix, count_components, cycle_laplacian, cycle_laplacian_with, perturb,
    perturb_with, CycleLaplacian, CycleVariant, EmbedCostMatrix, DEFAULT_COMPONENT_TOL,
    DEFAULT_LAMBDA,
};
pub use eigen::{EigenOptions, EigenPath};
pub use weights::{solve_weights, SparseWeights, DEFAULT_REG_TOL};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{knn, Metric, PointCloud};

pub const DEFAULT_K: usize = 4;
pub const DEFAULT_D: usize = 2;

// Bottom eigenvector must be this close to constant, relative to 1/sqrt(p).
const CONSTANT_DEVIATION_LIMIT: f64 = 1e-3;

/// A d x p embedding: column `i` holds the low-dimensional coordinates of
/// point `i`. Rows are orthonormal (Y Yᵀ = I) and each row sums to zero.
///
/// Embeddings are defined only up to per-row sign flips, and up to rotations
/// within groups of equal eigenvalues; consumers must not depend on either.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    y: DMatrix<f64>,
    eigenvalues: Vec<f64>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.y.nrows()
    }

    pub fn num_points(&self) -> usize {
        self.y.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// The d retained eigenvalues in increasing order (the near-zero
    /// eigenvalue of the discarded constant mode is not included).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Coordinates of point `i`.
    pub fn coordinates(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.y.as_slice()[i * d..(i + 1) * d]
    }

    /// One row per point, d comma-separated values.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.num_points() {
            let row: Vec<String> = self.coordinates(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Extracts the embedding from a (perturbed) cost matrix.
///
/// Computes the d+1 eigenvectors of smallest eigenvalue, verifies that the
/// bottom one is the constant mode, discards it, and returns the remaining d
/// as rows of Y. Unperturbed inputs are accepted only when the neighbor
/// graph is connected.
pub fn embed(m: &EmbedCostMatrix, d: usize) -> Result<Embedding> {
    embed_with(m, d, EigenPath::Auto, &EigenOptions::default())
}

pub fn embed_with(
    m: &EmbedCostMatrix,
    d: usize,
    path: EigenPath,
    opts: &EigenOptions,
) -> Result<Embedding> {
    let p = m.num_points();
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if d + 1 > p {
        return Err(Error::InvalidParameter(format!(
            "d = {d} needs at least {} points, cloud has {p}",
            d + 1
        )));
    }
    if !m.is_perturbed() {
        let components = count_components(m, DEFAULT_COMPONENT_TOL)?;
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
    }
    let use_dense = match path {
        EigenPath::Dense => true,
        EigenPath::Iterative => false,
        EigenPath::Auto => p <= opts.dense_limit,
    };
    let scale = 1.0 / (p as f64).sqrt();
    let (vals, vecs) = if use_dense {
        eigen::dense_bottom_eigenpairs(&m.to_dense(), d + 1)
    } else {
        eigen::iterative_bottom_eigenpairs(m, d + 1, opts)?
    };

    let bottom = &vecs[0];
    let mean = bottom.mean();
    let deviation = bottom
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max)
        / scale;
    if deviation > CONSTANT_DEVIATION_LIMIT {
        return Err(Error::NonConstantBottomEigenvector { deviation });
    }

    // Deflate the constant direction exactly and re-orthonormalize. When the
    // bottom of the spectrum is nearly degenerate the raw eigenvectors can
    // carry a small constant component; this restores the zero-mean and
    // whitening constraints without changing the spanned space.
    let constant = DVector::from_element(p, scale);
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(d);
    for vec in vecs.iter().skip(1) {
        let mut v = vec.clone();
        v.axpy(-constant.dot(&v), &constant, 1.0);
        for prev in &rows {
            v.axpy(-prev.dot(&v), prev, 1.0);
        }
        let n = v.norm();
        if n < 1e-6 {
            return Err(Error::NonConstantBottomEigenvector { deviation: n });
        }
        rows.push(v / n);
    }

    // canonical sign: the coordinate of largest magnitude is positive
    for v in &mut rows {
        let mut idx = 0;
        let mut best = -1.0;
        for (i, &x) in v.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                idx = i;
            }
        }
        if v[idx] < 0.0 {
            v.neg_mut();
        }
    }

    let y = DMatrix::from_fn(d, p, |r, c| rows[r][c]);
    Ok(Embedding {
        y,
        eigenvalues: vals[1..].to_vec(),
    })
}

/// Parameters for the full embedding pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct LleParams {
    pub k: usize,
    pub d: usize,
    /// Perturbation scale for the connectivity repair; zero disables it, in
    /// which case disconnected inputs are rejected.
    pub lambda: f64,
    pub reg_tol: f64,
    pub metric: Metric,
    pub cycle_variant: CycleVariant,
    pub eigen_path: EigenPath,
    pub eigen: EigenOptions,
}

impl Default for LleParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            d: DEFAULT_D,
            lambda: DEFAULT_LAMBDA,
            reg_tol: DEFAULT_REG_TOL,
            metric: Metric::Euclidean,
            cycle_variant: CycleVariant::Path,
            eigen_path: EigenPath::Auto,
            eigen: EigenOptions::default(),
        }
    }
}

/// Neighbor search, weight solve, cost matrix, repair, and embedding in one
/// call.
pub fn run_lle(cloud: &PointCloud, params: &LleParams) -> Result<Embedding> {
    if params.lambda < 0.0 {
        return Err(Error::InvalidParameter(
            "lambda must be nonnegative".into(),
        ));
    }
    let graph = knn(cloud, params.k, params.metric)?;
    let weights = solve_weights(cloud, &graph, params.reg_tol)?;
    let mut m = build_cost_matrix(weights);
    if params.lambda > 0.0 {
        m = perturb_with(&m, params.lambda, params.cycle_variant)?;
    }
    embed_with(&m, params.d, params.eigen_path, &params.eigen)
}

const PROVENANCE_MAGIC: [u8; 4] = *b"LLEC";
const PROVENANCE_VERSION: u16 = 1;

/// Size in bytes of the serialized provenance sidecar.
pub const PROVENANCE_LEN: usize = 30;

/// Provenance sidecar written next to serialized embeddings: the parameters
/// the embedding was produced with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Provenance {
    pub k: u32,
    pub d: u32,
    pub lambda: f64,
    pub reg_tol: f64,
}

impl Provenance {
    pub fn to_bytes(&self) -> [u8; PROVENANCE_LEN] {
        let mut out = [0u8; PROVENANCE_LEN];
        out[0..4].copy_from_slice(&PROVENANCE_MAGIC);
        out[4..6].copy_from_slice(&PROVENANCE_VERSION.to_le_bytes());
        out[6..10].copy_from_slice(&self.k.to_le_bytes());
        out[10..14].copy_from_slice(&self.d.to_le_bytes());
        out[14..22].copy_from_slice(&self.lambda.to_le_bytes());
        out[22..30].copy_from_slice(&self.reg_tol.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != PROVENANCE_LEN {
            return Err(Error::Parse(format!(
                "provenance sidecar must be {PROVENANCE_LEN} bytes, found {}",
                bytes.len()
            )));
        }
        if bytes[0..4] != PROVENANCE_MAGIC {
            return Err(Error::Parse("bad provenance magic".into()));
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != PROVENANCE_VERSION {
            return Err(Error::Parse(format!(
                "unsupported provenance version {version}"
            )));
        }
        Ok(Self {
            k: u32::from_le_bytes(bytes[6..10].try_into().unwrap()),
            d: u32::from_le_bytes(bytes[10..14].try_into().unwrap()),
            lambda: f64::from_le_bytes(bytes[14..22].try_into().unwrap()),
            reg_tol: f64::from_le_bytes(bytes[22..30].try_into().unwrap()),
        })
    }
}
