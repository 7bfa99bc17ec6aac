//! Iterative subspace segmentation of an embedded cloud.
//!
//! Each round picks a seed point, fits an affine subspace to the epsilon
//! ball around it (SVD of the centered ball), collects every active point
//! that is both close to that subspace and similar in color to the seed,
//! records the group with its prototype color, and removes it. The loop
//! ends when every point has been assigned.

use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::lle::{run_lle, LleParams};

/// Default number of neighbors consulted by the b-th-neighbor seed rule.
pub const DEFAULT_B: usize = 50;

/// Default proximity / color tolerance.
pub const DEFAULT_EPSILON: f64 = 0.4;

/// How the seed point of each round is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum SeedStrategy {
    /// Uniformly among active points, driven by the run seed.
    Random,
    /// The point with the most active points inside a ball of this radius.
    DensestBall { radius: f64 },
    /// The point whose b-th nearest active neighbor is closest. When only
    /// b or fewer points remain, b falls back to ceil(active / 2).
    BthNeighbor { b: usize },
    /// The point whose ball has the smallest sigma2/sigma1 singular-value
    /// ratio, i.e. the most line-like local structure.
    MinSvRatio { radius: f64 },
}

impl Default for SeedStrategy {
    fn default() -> Self {
        SeedStrategy::BthNeighbor { b: DEFAULT_B }
    }
}

/// One recovered subspace group.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceCluster {
    /// Member point indices, ascending. Every member passed both thresholds
    /// at assignment time.
    pub member_indices: Vec<usize>,
    /// Orthonormal subspace directions (d x m; m = 0 for a degenerate ball).
    pub basis: DMatrix<f64>,
    /// Ball mean the subspace is anchored at.
    pub center: DVector<f64>,
    /// Global index of the seed point.
    pub seed_index: usize,
    /// Mean original-space color of the members; this is what the
    /// reconstruction paints with.
    pub prototype: DVector<f64>,
    /// Mean embedding vector of the members, kept alongside the color
    /// prototype for consumers that want the embedding-space mean instead.
    pub embedding_mean: DVector<f64>,
}

/// A complete partition of the point indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub clusters: Vec<SubspaceCluster>,
    /// Point index -> cluster index; total over 0..p.
    pub assignment: Vec<usize>,
}

impl Clustering {
    /// Number of distinct subspaces S.
    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn num_points(&self) -> usize {
        self.assignment.len()
    }
}

/// Parameters of the segmentation loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationParams {
    /// Subspace proximity tolerance.
    pub eps1: f64,
    /// Color similarity tolerance.
    pub eps2: f64,
    /// Radius of the ball the subspace is fitted to; defaults to eps1.
    pub eps_ball: Option<f64>,
    /// Subspace dimension m (1 recovers lines).
    pub subspace_dim: usize,
    pub strategy: SeedStrategy,
    /// Seed for the random strategy; unused otherwise.
    pub seed: u64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            eps1: DEFAULT_EPSILON,
            eps2: DEFAULT_EPSILON,
            eps_ball: None,
            subspace_dim: 1,
            strategy: SeedStrategy::default(),
            seed: 0,
        }
    }
}

/// Embedding plus segmentation parameters for the full pipeline.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LlecParams {
    pub lle: LleParams,
    pub seg: SegmentationParams,
}

fn col_dist(m: &DMatrix<f64>, i: usize, other: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.nrows() {
        let diff = m[(r, i)] - other[r];
        acc += diff * diff;
    }
    acc.sqrt()
}

/// Picks the seed point among the active embedding columns.
///
/// Ties under the deterministic strategies resolve to the lowest index, so
/// repeated runs reproduce the same clustering.
pub fn select_seed<R: Rng>(
    active: &DMatrix<f64>,
    strategy: &SeedStrategy,
    rng: &mut R,
) -> Result<usize> {
    let n = active.ncols();
    if n == 0 {
        return Err(Error::EmptyActiveSet);
    }
    if n == 1 {
        return Ok(0);
    }
    match strategy {
        SeedStrategy::Random => Ok(rng.random_range(0..n)),
        SeedStrategy::DensestBall { radius } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidParameter("ball radius must be positive".into()));
            }
            let mut best = (0usize, 0usize);
            for cand in 0..n {
                let center = active.column(cand).into_owned();
                let count = (0..n).filter(|&i| col_dist(active, i, &center) < *radius).count();
                if count > best.1 {
                    best = (cand, count);
                }
            }
            Ok(best.0)
        }
        SeedStrategy::BthNeighbor { b } => {
            if *b == 0 {
                return Err(Error::InvalidParameter("b must be at least 1".into()));
            }
            let b_eff = if n <= *b { n.div_ceil(2) } else { *b };
            let mut best_idx = 0;
            let mut best_dist = f64::INFINITY;
            for cand in 0..n {
                let center = active.column(cand).into_owned();
                let mut dists: Vec<f64> = (0..n)
                    .filter(|&i| i != cand)
                    .map(|i| col_dist(active, i, &center))
                    .collect();
                dists.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                let d = dists[b_eff - 1];
                if d < best_dist {
                    best_dist = d;
                    best_idx = cand;
                }
            }
            Ok(best_idx)
        }
        SeedStrategy::MinSvRatio { radius } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidParameter("ball radius must be positive".into()));
            }
            let mut best_idx = 0;
            let mut best_ratio = f64::INFINITY;
            for cand in 0..n {
                let center = active.column(cand).into_owned();
                let ball: Vec<usize> = (0..n)
                    .filter(|&i| col_dist(active, i, &center) < *radius)
                    .collect();
                let ratio = ball_sv_ratio(active, &ball);
                if ratio < best_ratio {
                    best_ratio = ratio;
                    best_idx = cand;
                }
            }
            Ok(best_idx)
        }
    }
}

/// sigma2/sigma1 of the centered ball; infinite when no direction exists.
fn ball_sv_ratio(active: &DMatrix<f64>, ball: &[usize]) -> f64 {
    if ball.len() < 2 {
        return f64::INFINITY;
    }
    let d = active.nrows();
    let mut center = DVector::zeros(d);
    for &i in ball {
        center += active.column(i);
    }
    center /= ball.len() as f64;
    let a = DMatrix::from_fn(ball.len(), d, |r, c| active[(c, ball[r])] - center[c]);
    let svd = SVD::new(a, false, false);
    let sv = svd.singular_values;
    let sigma1 = sv[0];
    if sigma1 <= 0.0 {
        return f64::INFINITY;
    }
    if sv.len() < 2 {
        // one-dimensional embeddings are trivially line-like
        return 0.0;
    }
    sv[1] / sigma1
}

/// Top-m principal directions of a ball of embedding points.
///
/// The ball matrix is centered about its mean before the SVD, so the
/// subspace is affine through the mean; the m = 1 direction is the line
/// minimizing squared distances to the ball points.
pub fn principal_subspace(
    ball: &DMatrix<f64>,
    m: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = ball.ncols();
    let d = ball.nrows();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "principal subspace needs at least 2 points".into(),
        ));
    }
    if m == 0 || m > d.min(n) {
        return Err(Error::InvalidParameter(format!(
            "subspace dimension m = {m} must be in 1..={}",
            d.min(n)
        )));
    }
    let first = ball.column(0);
    if (1..n).all(|i| ball.column(i) == first) {
        return Err(Error::DegenerateBall);
    }
    let center = ball.column_mean();
    let a = DMatrix::from_fn(n, d, |r, c| ball[(c, r)] - center[c]);
    let svd = SVD::new(a, false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    // nalgebra sorts singular values in decreasing order
    let basis = DMatrix::from_fn(d, m, |r, c| v_t[(c, r)]);
    Ok((basis, center))
}

/// Active indices whose subspace residual is below eps1 and whose color is
/// within eps2 of the seed color. An empty basis treats the subspace as the
/// zero-dimensional point at `center`.
pub fn assign_to_subspace(
    embedded: &DMatrix<f64>,
    colors: &DMatrix<f64>,
    basis: &DMatrix<f64>,
    center: &DVector<f64>,
    seed_color: &DVector<f64>,
    eps1: f64,
    eps2: f64,
) -> Vec<usize> {
    let n = embedded.ncols();
    let mut members = Vec::new();
    for i in 0..n {
        let r = embedded.column(i) - center;
        let residual = if basis.ncols() == 0 {
            r.norm()
        } else {
            let coords = basis.tr_mul(&r);
            (r - basis * coords).norm()
        };
        if residual >= eps1 {
            continue;
        }
        let color_dist = (colors.column(i) - seed_color).norm();
        if color_dist < eps2 {
            members.push(i);
        }
    }
    members
}

/// Runs the segmentation loop over an already-embedded cloud.
///
/// `embedded` is d x p (one column per point); `colors` supplies the
/// original-space vectors used for the color threshold and the prototypes.
pub fn segment_embedding(
    embedded: &DMatrix<f64>,
    colors: &PointCloud,
    params: &SegmentationParams,
) -> Result<Clustering> {
    let p = embedded.ncols();
    if p == 0 {
        return Err(Error::EmptyActiveSet);
    }
    if colors.num_points() != p {
        return Err(Error::ShapeMismatch(format!(
            "embedding covers {p} points, colors cover {}",
            colors.num_points()
        )));
    }
    if !(params.eps1 > 0.0) || !(params.eps2 > 0.0) {
        return Err(Error::InvalidParameter(
            "eps1 and eps2 must be positive".into(),
        ));
    }
    let eps_ball = params.eps_ball.unwrap_or(params.eps1);
    if !(eps_ball > 0.0) {
        return Err(Error::InvalidParameter("eps_ball must be positive".into()));
    }
    let d = embedded.nrows();
    let m = params.subspace_dim;
    if m == 0 || m > d {
        return Err(Error::InvalidParameter(format!(
            "subspace dimension m = {m} must be in 1..={d}"
        )));
    }

    let color_dim = colors.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut active: Vec<usize> = (0..p).collect();
    let mut assignment = vec![usize::MAX; p];
    let mut clusters = Vec::new();

    while !active.is_empty() {
        let n = active.len();
        let mut ya = DMatrix::zeros(d, n);
        let mut xa = DMatrix::zeros(color_dim, n);
        for (t, &g) in active.iter().enumerate() {
            ya.set_column(t, &embedded.column(g));
            xa.set_column(t, &colors.data().column(g));
        }

        let seed_local = select_seed(&ya, &params.strategy, &mut rng)?;
        let seed_global = active[seed_local];
        let y_seed = ya.column(seed_local).into_owned();
        let x_seed = xa.column(seed_local).into_owned();

        let ball: Vec<usize> = (0..n)
            .filter(|&i| col_dist(&ya, i, &y_seed) < eps_ball)
            .collect();
        let identical = ball
            .iter()
            .all(|&i| ya.column(i) == ya.column(ball[0]));
        let (basis, center) = if ball.len() < 2 || identical {
            // degenerate ball: the subspace is the zero-dimensional point
            (DMatrix::zeros(d, 0), y_seed.clone())
        } else {
            let mut ball_mat = DMatrix::zeros(d, ball.len());
            for (t, &i) in ball.iter().enumerate() {
                ball_mat.set_column(t, &ya.column(i));
            }
            let m_eff = m.min(ball.len());
            principal_subspace(&ball_mat, m_eff)?
        };

        let mut members =
            assign_to_subspace(&ya, &xa, &basis, &center, &x_seed, params.eps1, params.eps2);
        // the seed always belongs to its own group, which also guarantees
        // that every round removes at least one point
        if !members.contains(&seed_local) {
            members.push(seed_local);
            members.sort_unstable();
        }

        let count = members.len() as f64;
        let mut prototype = DVector::zeros(color_dim);
        let mut embedding_mean = DVector::zeros(d);
        for &i in &members {
            prototype += xa.column(i);
            embedding_mean += ya.column(i);
        }
        prototype /= count;
        embedding_mean /= count;

        let member_indices: Vec<usize> = members.iter().map(|&i| active[i]).collect();
        let cluster_idx = clusters.len();
        for &g in &member_indices {
            assignment[g] = cluster_idx;
        }
        clusters.push(SubspaceCluster {
            member_indices,
            basis,
            center,
            seed_index: seed_global,
            prototype,
            embedding_mean,
        });

        let removed: std::collections::HashSet<usize> = members.into_iter().collect();
        let mut next = Vec::with_capacity(n - removed.len());
        for (t, &g) in active.iter().enumerate() {
            if !removed.contains(&t) {
                next.push(g);
            }
        }
        active = next;
    }

    Ok(Clustering {
        clusters,
        assignment,
    })
}

/// The full pipeline: embed the cloud, then segment the embedding.
pub fn llec_cluster(cloud: &PointCloud, params: &LlecParams) -> Result<Clustering> {
    let embedding = run_lle(cloud, &params.lle)?;
    segment_embedding(embedding.matrix(), cloud, &params.seg)
}

/// Replaces every point with the prototype of its cluster.
pub fn reconstruct(cloud: &PointCloud, clustering: &Clustering) -> Result<PointCloud> {
    let p = cloud.num_points();
    if clustering.assignment.len() != p {
        return Err(Error::ShapeMismatch(format!(
            "clustering covers {} points, cloud has {p}",
            clustering.assignment.len()
        )));
    }
    let d = cloud.dim();
    let mut data = DMatrix::zeros(d, p);
    for i in 0..p {
        let c = clustering.assignment[i];
        let proto = clustering
            .clusters
            .get(c)
            .ok_or_else(|| Error::ShapeMismatch(format!("point {i} assigned to missing cluster {c}")))?;
        if proto.prototype.len() != d {
            return Err(Error::DimensionMismatch {
                left: proto.prototype.len(),
                right: d,
            });
        }
        data.set_column(i, &proto.prototype);
    }
    PointCloud::new(data)
}
