//! Embedding cost matrix M = (I - W)ᵀ(I - W) and its connectivity repair.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lle::weights::SparseWeights;

/// Default perturbation scale for the connectivity repair.
pub const DEFAULT_LAMBDA: f64 = 1e-9;

/// Default relative eigenvalue cutoff for component counting.
pub const DEFAULT_COMPONENT_TOL: f64 = 1e-10;

// Above this size component counting walks the graph instead of solving a
// dense eigenproblem; both routes agree and the graph walk is O(p k).
const COMPONENT_EIGEN_LIMIT: usize = 600;

/// Shape of the tridiagonal repair matrix T.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CycleVariant {
    /// Path Laplacian: diagonal (1, 2, ..., 2, 1), off-diagonals -1.
    ///
    /// This is the matrix used by default; the boundary rows have degree 1.
    #[default]
    Path,
    /// Circulant cycle Laplacian: constant diagonal 2 with -1 entries in the
    /// (0, p-1) and (p-1, 0) corners. Either variant repairs the corank.
    Circulant,
}

/// Zero-row-sum tridiagonal matrix added as λT to reconnect components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleLaplacian {
    p: usize,
    variant: CycleVariant,
}

/// Builds the repair matrix in its default (path) shape.
pub fn cycle_laplacian(p: usize) -> Result<CycleLaplacian> {
    cycle_laplacian_with(p, CycleVariant::Path)
}

pub fn cycle_laplacian_with(p: usize, variant: CycleVariant) -> Result<CycleLaplacian> {
    if p < 2 {
        return Err(Error::InvalidParameter(
            "cycle laplacian needs at least 2 points".into(),
        ));
    }
    Ok(CycleLaplacian { p, variant })
}

impl CycleLaplacian {
    pub fn size(&self) -> usize {
        self.p
    }

    pub fn variant(&self) -> CycleVariant {
        self.variant
    }

    /// T v without materializing T.
    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        let p = self.p;
        let mut out = DVector::zeros(p);
        for i in 0..p {
            let mut acc = 2.0 * v[i];
            if i > 0 {
                acc -= v[i - 1];
            }
            if i + 1 < p {
                acc -= v[i + 1];
            }
            match self.variant {
                CycleVariant::Path => {
                    if i == 0 || i == p - 1 {
                        acc -= v[i];
                    }
                }
                CycleVariant::Circulant => {
                    if i == 0 {
                        acc -= v[p - 1];
                    }
                    if i == p - 1 {
                        acc -= v[0];
                    }
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.p;
        let mut t = DMatrix::zeros(p, p);
        for i in 0..p {
            t[(i, i)] = 2.0;
            if i > 0 {
                t[(i, i - 1)] = -1.0;
            }
            if i + 1 < p {
                t[(i, i + 1)] = -1.0;
            }
        }
        match self.variant {
            CycleVariant::Path => {
                t[(0, 0)] = 1.0;
                t[(p - 1, p - 1)] = 1.0;
            }
            CycleVariant::Circulant => {
                t[(0, p - 1)] = -1.0;
                t[(p - 1, 0)] = -1.0;
            }
        }
        t
    }
}

/// The p x p embedding cost matrix, kept in factored form.
///
/// `apply` evaluates (I - W)ᵀ(I - W) v + λ T v from the sparse weights, so
/// the matrix itself is only materialized for small dense solves.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbedCostMatrix {
    weights: SparseWeights,
    lambda: f64,
    variant: CycleVariant,
}

/// Wraps the weight matrix as the unperturbed cost matrix.
pub fn build_cost_matrix(weights: SparseWeights) -> EmbedCostMatrix {
    EmbedCostMatrix {
        weights,
        lambda: 0.0,
        variant: CycleVariant::Path,
    }
}

/// Returns M + λT with λ > 0. The repair keeps the row sums at zero and
/// shrinks the null space to the single constant direction.
pub fn perturb(m: &EmbedCostMatrix, lambda: f64) -> Result<EmbedCostMatrix> {
    perturb_with(m, lambda, CycleVariant::Path)
}

pub fn perturb_with(
    m: &EmbedCostMatrix,
    lambda: f64,
    variant: CycleVariant,
) -> Result<EmbedCostMatrix> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(
            "perturbation scale lambda must be positive".into(),
        ));
    }
    Ok(EmbedCostMatrix {
        weights: m.weights.clone(),
        lambda,
        variant,
    })
}

impl EmbedCostMatrix {
    pub fn num_points(&self) -> usize {
        self.weights.num_points()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_perturbed(&self) -> bool {
        self.lambda > 0.0
    }

    pub fn variant(&self) -> CycleVariant {
        self.variant
    }

    pub fn weights(&self) -> &SparseWeights {
        &self.weights
    }

    /// M v (or M' v when perturbed).
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let wv = self.weights.mul_vec(v);
        let residual = v - wv; // (I - W) v
        let wt = self.weights.tr_mul_vec(&residual);
        let mut out = residual - wt; // (I - W)ᵀ (I - W) v
        if self.lambda > 0.0 {
            let t = CycleLaplacian {
                p: self.num_points(),
                variant: self.variant,
            };
            out += t.mul_vec(v) * self.lambda;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.num_points();
        let w = self.weights.to_dense();
        let a = DMatrix::identity(p, p) - w;
        let mut m = a.tr_mul(&a);
        if self.lambda > 0.0 {
            let t = CycleLaplacian {
                p,
                variant: self.variant,
            };
            m += t.to_dense() * self.lambda;
        }
        m
    }

    /// Upper bound on the spectral norm, from ‖M‖₂ ≤ ‖I-W‖₁‖I-W‖∞ plus the
    /// Gershgorin bound on λT.
    pub(crate) fn operator_norm_bound(&self) -> f64 {
        let row = 1.0 + self.weights.max_abs_row_sum();
        let col = 1.0 + self.weights.max_abs_col_sum();
        row * col + self.lambda * 4.0
    }
}

/// Number of connected components of the neighbor graph, as witnessed by the
/// near-null eigenvalues of the unperturbed cost matrix.
///
/// `tol` is relative to the largest eigenvalue. For sizes where the dense
/// eigensolve would dominate, the count falls back to a traversal of the
/// symmetrized weight support, which yields the same number.
pub fn count_components(m: &EmbedCostMatrix, tol: f64) -> Result<usize> {
    if m.is_perturbed() {
        return Err(Error::InvalidParameter(
            "component counting requires the unperturbed cost matrix".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let p = m.num_points();
    if p > COMPONENT_EIGEN_LIMIT {
        return Ok(graph_components(&m.weights));
    }
    let eigen = SymmetricEigen::new(m.to_dense());
    let max = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        // M = 0 cannot arise from a valid weight matrix; count defensively
        return Ok(p);
    }
    Ok(eigen
        .eigenvalues
        .iter()
        .filter(|&&ev| ev < tol * max)
        .count())
}

/// Connected components of the symmetrized weight support (union-find).
pub(crate) fn graph_components(weights: &SparseWeights) -> usize {
    component_labels(weights).1
}

/// Per-point component labels (0..count) plus the component count.
pub(crate) fn component_labels(weights: &SparseWeights) -> (Vec<usize>, usize) {
    let p = weights.num_points();
    let mut parent: Vec<usize> = (0..p).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for (i, j) in weights.support_edges() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut labels = vec![usize::MAX; p];
    let mut count = 0;
    for i in 0..p {
        let root = find(&mut parent, i);
        if labels[root] == usize::MAX {
            labels[root] = count;
            count += 1;
        }
        labels[i] = labels[root];
    }
    (labels, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{knn, Metric, PointCloud};
    use crate::lle::weights::{solve_weights, DEFAULT_REG_TOL};

    fn two_triangles() -> PointCloud {
        PointCloud::from_points(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.8],
            vec![10.0, 10.0],
            vec![11.0, 10.0],
            vec![10.5, 10.8],
        ])
        .unwrap()
    }

    fn cost_for(cloud: &PointCloud, k: usize) -> EmbedCostMatrix {
        let graph = knn(cloud, k, Metric::Euclidean).unwrap();
        let w = solve_weights(cloud, &graph, DEFAULT_REG_TOL).unwrap();
        build_cost_matrix(w)
    }

    #[test]
    fn cycle_laplacian_smallest_case() {
        let t = cycle_laplacian(2).unwrap().to_dense();
        assert_eq!(t, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn cycle_laplacian_p4_pattern() {
        let t = cycle_laplacian(4).unwrap().to_dense();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, -1.0, 0.0, 0.0, //
                -1.0, 2.0, -1.0, 0.0, //
                0.0, -1.0, 2.0, -1.0, //
                0.0, 0.0, -1.0, 1.0,
            ],
        );
        assert_eq!(t, expected);
    }

    #[test]
    fn cycle_laplacian_rejects_tiny_sizes() {
        assert!(cycle_laplacian(1).is_err());
    }

    #[test]
    fn cycle_laplacian_zero_row_sums_both_variants() {
        for variant in [CycleVariant::Path, CycleVariant::Circulant] {
            let t = cycle_laplacian_with(7, variant).unwrap();
            let ones = DVector::from_element(7, 1.0);
            assert!(t.mul_vec(&ones).amax() < 1e-15);
            let dense = t.to_dense();
            assert_eq!(dense.transpose(), dense);
            // matvec agrees with the dense form
            let v = DVector::from_fn(7, |i, _| (i as f64).sin());
            assert!((t.mul_vec(&v) - dense * v).amax() < 1e-14);
        }
    }

    #[test]
    fn circulant_variant_has_corner_entries() {
        let t = cycle_laplacian_with(5, CycleVariant::Circulant)
            .unwrap()
            .to_dense();
        assert_eq!(t[(0, 0)], 2.0);
        assert_eq!(t[(4, 4)], 2.0);
        assert_eq!(t[(0, 4)], -1.0);
        assert_eq!(t[(4, 0)], -1.0);
    }

    #[test]
    fn two_point_cost_matrix_by_hand() {
        // w01 = w10 = 1 forces M = [[2, -2], [-2, 2]]
        let cloud = PointCloud::from_points(&[vec![0.0], vec![1.0]]).unwrap();
        let graph = knn(&cloud, 1, Metric::Euclidean).unwrap();
        let w = solve_weights(&cloud, &graph, DEFAULT_REG_TOL).unwrap();
        let m = build_cost_matrix(w).to_dense();
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]);
        assert!((m - expected).amax() < 1e-12);
    }

    #[test]
    fn cost_matrix_rows_sum_to_zero_and_symmetric() {
        let cloud = two_triangles();
        let m = cost_for(&cloud, 2);
        let dense = m.to_dense();
        let ones = DVector::from_element(6, 1.0);
        assert!((dense.clone() * ones).amax() < 1e-10);
        assert!((dense.clone() - dense.transpose()).amax() < 1e-12);

        // perturbation preserves both properties
        let mp = perturb(&m, DEFAULT_LAMBDA).unwrap();
        let densep = mp.to_dense();
        let ones = DVector::from_element(6, 1.0);
        assert!((densep.clone() * ones).amax() < 1e-10);
        assert!((densep.clone() - densep.transpose()).amax() < 1e-12);
    }

    #[test]
    fn apply_matches_dense() {
        let cloud = two_triangles();
        let m = perturb(&cost_for(&cloud, 2), 1e-3).unwrap();
        let dense = m.to_dense();
        let v = DVector::from_fn(6, |i, _| ((i * 7 + 3) as f64).cos());
        assert!((m.apply(&v) - dense * v).amax() < 1e-12);
    }

    #[test]
    fn perturbation_difference_is_lambda_t() {
        let cloud = two_triangles();
        let m = cost_for(&cloud, 2);
        let mp = perturb(&m, 1e-4).unwrap();
        let diff = mp.to_dense() - m.to_dense();
        let t = cycle_laplacian(6).unwrap().to_dense();
        // the subtraction cancels O(1) entries, so allow rounding noise
        assert!((diff - t * 1e-4).amax() < 1e-15);
    }

    #[test]
    fn perturb_requires_positive_lambda() {
        let cloud = two_triangles();
        let m = cost_for(&cloud, 2);
        assert!(perturb(&m, 0.0).is_err());
        assert!(perturb(&m, -1e-9).is_err());
    }

    #[test]
    fn component_count_connected_line() {
        let points: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let cloud = PointCloud::from_points(&points).unwrap();
        let m = cost_for(&cloud, 2);
        assert_eq!(count_components(&m, DEFAULT_COMPONENT_TOL).unwrap(), 1);
    }

    #[test]
    fn component_count_two_triangles() {
        let cloud = two_triangles();
        let m = cost_for(&cloud, 2);
        assert_eq!(count_components(&m, DEFAULT_COMPONENT_TOL).unwrap(), 2);
        assert_eq!(graph_components(m.weights()), 2);
    }

    #[test]
    fn component_count_rejects_perturbed_input() {
        let cloud = two_triangles();
        let m = perturb(&cost_for(&cloud, 2), DEFAULT_LAMBDA).unwrap();
        assert!(count_components(&m, DEFAULT_COMPONENT_TOL).is_err());
    }

    #[test]
    fn eigen_and_graph_component_counts_agree() {
        for (points, k) in [
            (
                vec![
                    vec![0.0, 0.0],
                    vec![0.1, 0.0],
                    vec![0.0, 0.1],
                    vec![5.0, 5.0],
                    vec![5.1, 5.0],
                    vec![5.0, 5.1],
                    vec![9.0, 0.0],
                    vec![9.1, 0.0],
                    vec![9.0, 0.1],
                ],
                2usize,
            ),
            (
                (0..12).map(|i| vec![i as f64 * 0.3, 0.0]).collect(),
                3usize,
            ),
        ] {
            let cloud = PointCloud::from_points(&points).unwrap();
            let m = cost_for(&cloud, k);
            assert_eq!(
                count_components(&m, DEFAULT_COMPONENT_TOL).unwrap(),
                graph_components(m.weights())
            );
        }
    }

    #[test]
    fn psd_on_random_vectors() {
        let cloud = two_triangles();
        let m = cost_for(&cloud, 2);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let v = DVector::from_fn(6, |_, _| rng.random::<f64>() - 0.5);
            let quad = v.dot(&m.apply(&v));
            assert!(quad >= -1e-10 * v.norm_squared());
        }
    }
}
