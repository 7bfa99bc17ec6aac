//! LBG vector quantization: codebook initializers, the iterative refinement
//! loop, and the distortion measure.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Default LBG iteration count.
pub const DEFAULT_MAX_ITERS: usize = 15;

/// Default number of centers for the random initializers.
pub const DEFAULT_N_CENTERS: usize = 25;

/// The 17 hand-picked colors that accompany the 8 color-cube corners in the
/// hand-identified initializer: samples near green, yellow, blue, white, and
/// black. Callers may substitute their own table.
pub const HAND_IDENTIFIED_EXTRAS: [[f64; 3]; 17] = [
    // greens
    [0.0, 0.39, 0.0],
    [0.13, 0.55, 0.13],
    [0.2, 0.8, 0.2],
    [0.42, 0.56, 0.14],
    [0.6, 0.8, 0.2],
    // yellows
    [1.0, 0.84, 0.0],
    [0.94, 0.9, 0.55],
    [0.8, 0.72, 0.1],
    // blues
    [0.0, 0.0, 0.55],
    [0.25, 0.41, 0.88],
    [0.53, 0.81, 0.92],
    [0.27, 0.51, 0.71],
    // whites
    [1.0, 0.98, 0.94],
    [0.96, 0.96, 0.96],
    [0.83, 0.83, 0.83],
    // blacks
    [0.08, 0.08, 0.08],
    [0.17, 0.17, 0.17],
];

/// Identifies which initializer produced a codebook.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitializerKind {
    LlecPalette,
    HandIdentified,
    RandomRgb,
    RandomFromData,
}

impl std::fmt::Display for InitializerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            InitializerKind::LlecPalette => "llec-palette",
            InitializerKind::HandIdentified => "hand-identified",
            InitializerKind::RandomRgb => "random-rgb",
            InitializerKind::RandomFromData => "random-from-data",
        };
        f.write_str(name)
    }
}

/// Center initialization schemes.
#[derive(Clone, Debug, PartialEq)]
pub enum Initializer {
    /// Centers taken from a previously computed palette (cluster prototypes).
    LlecPalette { centers: Vec<Vec<f64>> },
    /// The 8 corners of the unit color cube plus 17 named colors (25 total).
    /// `extras` overrides the built-in table.
    HandIdentified { extras: Option<Vec<[f64; 3]>> },
    /// `n` uniform draws from the unit cube of the cloud's dimension.
    RandomRgb { n: usize, seed: u64 },
    /// `n` distinct columns of the data matrix, drawn without replacement.
    RandomFromData { n: usize, seed: u64 },
}

/// A list of prototype vectors together with its origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    pub centers: Vec<DVector<f64>>,
    pub origin: InitializerKind,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Builds the starting codebook for [`lbg`].
pub fn init_centers(cloud: &PointCloud, init: &Initializer) -> Result<Codebook> {
    let dim = cloud.dim();
    match init {
        Initializer::LlecPalette { centers } => {
            if centers.is_empty() {
                return Err(Error::InvalidParameter("palette has no centers".into()));
            }
            let mut out = Vec::with_capacity(centers.len());
            for c in centers {
                if c.len() != dim {
                    return Err(Error::DimensionMismatch {
                        left: c.len(),
                        right: dim,
                    });
                }
                out.push(DVector::from_column_slice(c));
            }
            Ok(Codebook {
                centers: out,
                origin: InitializerKind::LlecPalette,
            })
        }
        Initializer::HandIdentified { extras } => {
            if dim != 3 {
                return Err(Error::InvalidParameter(format!(
                    "hand-identified centers are RGB; cloud has dimension {dim}"
                )));
            }
            let mut centers = Vec::new();
            for corner in 0..8u8 {
                centers.push(DVector::from_column_slice(&[
                    f64::from(corner & 1),
                    f64::from((corner >> 1) & 1),
                    f64::from((corner >> 2) & 1),
                ]));
            }
            let table: Vec<[f64; 3]> = extras
                .clone()
                .unwrap_or_else(|| HAND_IDENTIFIED_EXTRAS.to_vec());
            for color in &table {
                centers.push(DVector::from_column_slice(color));
            }
            Ok(Codebook {
                centers,
                origin: InitializerKind::HandIdentified,
            })
        }
        Initializer::RandomRgb { n, seed } => {
            if *n == 0 {
                return Err(Error::InvalidParameter("need at least one center".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            use rand::Rng;
            let centers = (0..*n)
                .map(|_| DVector::from_fn(dim, |_, _| rng.random::<f64>()))
                .collect();
            Ok(Codebook {
                centers,
                origin: InitializerKind::RandomRgb,
            })
        }
        Initializer::RandomFromData { n, seed } => {
            let p = cloud.num_points();
            if *n == 0 {
                return Err(Error::InvalidParameter("need at least one center".into()));
            }
            if *n > p {
                return Err(Error::InvalidParameter(format!(
                    "cannot draw {n} distinct centers from {p} points"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let chosen = rand::seq::index::sample(&mut rng, p, *n);
            let centers = chosen
                .iter()
                .map(|i| DVector::from_column_slice(cloud.point(i)))
                .collect();
            Ok(Codebook {
                centers,
                origin: InitializerKind::RandomFromData,
            })
        }
    }
}

/// What to do with a center whose Voronoi region is empty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EmptyRegionPolicy {
    /// Leave the center where it is (keeps distortion monotone).
    #[default]
    KeepCenter,
    /// Move the center onto the point farthest from its assigned center.
    ReseedFarthest,
}

/// Options for the LBG loop.
#[derive(Clone, Debug, PartialEq)]
pub struct LbgOptions {
    pub max_iters: usize,
    /// Relative improvement below which iteration stops; 0 runs all
    /// iterations (exact fixed points still stop early).
    pub stop_tol: f64,
    pub empty_region: EmptyRegionPolicy,
}

impl Default for LbgOptions {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            stop_tol: 0.0,
            empty_region: EmptyRegionPolicy::KeepCenter,
        }
    }
}

/// Result of an LBG run: final codebook, the matching assignment, and the
/// distortion after each assignment step.
#[derive(Clone, Debug, PartialEq)]
pub struct LbgRun {
    pub codebook: Codebook,
    pub assignment: Vec<usize>,
    pub history: Vec<f64>,
}

fn nearest_center(point: &[f64], centers: &[DVector<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let mut acc = 0.0;
        for (a, b) in point.iter().zip(c.iter()) {
            let diff = a - b;
            acc += diff * diff;
        }
        if acc < best_d {
            best_d = acc;
            best = j;
        }
    }
    best
}

/// Iterative codebook refinement.
///
/// Each iteration assigns every point to its nearest center (ties to the
/// lowest index) and replaces each nonempty center with its region mean.
/// The recorded distortion sequence is nonincreasing; the final codebook is
/// always consistent with the returned assignment.
pub fn lbg(cloud: &PointCloud, codebook: &Codebook, opts: &LbgOptions) -> Result<LbgRun> {
    if codebook.is_empty() {
        return Err(Error::InvalidParameter("codebook has no centers".into()));
    }
    if opts.max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    if opts.stop_tol < 0.0 {
        return Err(Error::InvalidParameter("stop_tol must be nonnegative".into()));
    }
    let dim = cloud.dim();
    for c in &codebook.centers {
        if c.len() != dim {
            return Err(Error::DimensionMismatch {
                left: c.len(),
                right: dim,
            });
        }
    }

    let p = cloud.num_points();
    let mut centers = codebook.centers.clone();
    let mut history = Vec::new();
    let mut assignment: Vec<usize> = Vec::new();

    for iter in 1..=opts.max_iters {
        let new_assignment: Vec<usize> = (0..p)
            .into_par_iter()
            .map(|i| nearest_center(cloud.point(i), &centers))
            .collect();

        let book = Codebook {
            centers: centers.clone(),
            origin: codebook.origin,
        };
        let d = distortion(cloud, &book, &new_assignment)?;
        let fixed_point = !assignment.is_empty() && new_assignment == assignment;
        assignment = new_assignment;
        let prev = history.last().copied();
        history.push(d);

        if iter == opts.max_iters || d == 0.0 || fixed_point {
            break;
        }
        if let Some(prev) = prev {
            if prev > 0.0 && (prev - d) / prev < opts.stop_tol {
                break;
            }
        }

        // update step: nonempty regions move to their means
        let mut sums = vec![DVector::<f64>::zeros(dim); centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (i, &j) in assignment.iter().enumerate() {
            counts[j] += 1;
            let pt = cloud.point(i);
            for (r, value) in pt.iter().enumerate() {
                sums[j][r] += value;
            }
        }
        let mut empties = Vec::new();
        for j in 0..centers.len() {
            if counts[j] > 0 {
                centers[j] = &sums[j] / counts[j] as f64;
            } else {
                empties.push(j);
            }
        }
        if !empties.is_empty() && opts.empty_region == EmptyRegionPolicy::ReseedFarthest {
            for j in empties {
                // farthest point from its own center, lowest index on ties
                let mut far = (0usize, -1.0);
                for i in 0..p {
                    let c = &centers[assignment[i]];
                    let dist: f64 = cloud
                        .point(i)
                        .iter()
                        .zip(c.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if dist > far.1 {
                        far = (i, dist);
                    }
                }
                centers[j] = DVector::from_column_slice(cloud.point(far.0));
            }
        }
    }

    Ok(LbgRun {
        codebook: Codebook {
            centers,
            origin: codebook.origin,
        },
        assignment,
        history,
    })
}

/// Mean squared distance between matching columns; shared by the distortion
/// measure and the image quality report so the two agree bit for bit.
pub(crate) fn mean_squared_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if a.num_points() != b.num_points() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} points",
            a.num_points(),
            b.num_points()
        )));
    }
    let p = a.num_points();
    let mut total = 0.0;
    for i in 0..p {
        let mut acc = 0.0;
        for (x, y) in a.point(i).iter().zip(b.point(i)) {
            let diff = x - y;
            acc += diff * diff;
        }
        total += acc;
    }
    Ok(total / p as f64)
}

/// Replaces every point with its assigned center.
pub fn quantized_cloud(
    cloud: &PointCloud,
    codebook: &Codebook,
    assignment: &[usize],
) -> Result<PointCloud> {
    let p = cloud.num_points();
    if assignment.len() != p {
        return Err(Error::ShapeMismatch(format!(
            "assignment covers {} points, cloud has {p}",
            assignment.len()
        )));
    }
    let dim = cloud.dim();
    let mut data = nalgebra::DMatrix::zeros(dim, p);
    for (i, &j) in assignment.iter().enumerate() {
        let center = codebook
            .centers
            .get(j)
            .ok_or_else(|| Error::ShapeMismatch(format!("point {i} assigned to missing center {j}")))?;
        data.set_column(i, center);
    }
    PointCloud::new(data)
}

/// Mean squared distance from each point to its assigned center (the 1/p
/// factor included); p times this value equals the squared Frobenius norm of
/// the residual matrix.
pub fn distortion(cloud: &PointCloud, codebook: &Codebook, assignment: &[usize]) -> Result<f64> {
    let quantized = quantized_cloud(cloud, codebook, assignment)?;
    mean_squared_distance(cloud, &quantized)
}
