//! Generators for synthetic test data: the torus of translated squares and
//! noisy line clouds with per-line colors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;

/// Parameters for the translated-square dataset.
///
/// A `bg_size` x `bg_size` background of uniform noise is fixed once; each
/// data point is the background with a `block_size` x `block_size` zero block
/// superimposed at one of the bg_size² offsets, wrapping at both edges. The
/// index set therefore carries a toroidal adjacency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusSpec {
    pub bg_size: usize,
    pub block_size: usize,
    pub seed: u64,
}

impl Default for TorusSpec {
    fn default() -> Self {
        Self {
            bg_size: 20,
            block_size: 10,
            seed: 0,
        }
    }
}

/// Generates the translated-square frames as a bg_size² x bg_size² cloud.
///
/// Column (i * bg_size + j) is the frame whose block sits at offset (i, j);
/// frames are flattened row-major.
pub fn torus_dataset(spec: &TorusSpec) -> Result<PointCloud> {
    if spec.block_size == 0 || spec.block_size > spec.bg_size {
        return Err(Error::InvalidParameter(format!(
            "block_size must be in 1..={}, got {}",
            spec.bg_size, spec.block_size
        )));
    }
    let n = spec.bg_size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();

    let p = n * n;
    let dim = n * n;
    let mut data = nalgebra::DMatrix::zeros(dim, p);
    for i in 0..n {
        for j in 0..n {
            let col = i * n + j;
            for r in 0..n {
                for c in 0..n {
                    let in_block = ((r + n - i) % n) < spec.block_size
                        && ((c + n - j) % n) < spec.block_size;
                    let value = if in_block { 0.0 } else { background[r * n + c] };
                    data[(r * n + c, col)] = value;
                }
            }
        }
    }
    PointCloud::new(data)
}

/// Parameters for noisy line clouds.
///
/// Line `l` runs parallel to the first ambient axis, anchored at offset `l`
/// along the second axis (lines are unit-separated), with points drawn
/// uniformly along [-1, 1] and Gaussian noise of scale `noise_sigma` added
/// in every ambient coordinate. Each line carries one exact color.
#[derive(Clone, Debug, PartialEq)]
pub struct LineCloudSpec {
    pub num_lines: usize,
    pub points_per_line: usize,
    pub ambient_dim: usize,
    pub noise_sigma: f64,
    /// One color per line; all colors must share a dimension.
    pub colors: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Output of [`line_cloud`]: positions, matching colors, and the generating
/// line of every point.
#[derive(Clone, Debug, PartialEq)]
pub struct LineCloud {
    pub positions: PointCloud,
    pub colors: PointCloud,
    pub labels: Vec<usize>,
}

pub fn line_cloud(spec: &LineCloudSpec) -> Result<LineCloud> {
    if spec.num_lines == 0 || spec.points_per_line == 0 {
        return Err(Error::InvalidParameter(
            "need at least one line and one point per line".into(),
        ));
    }
    if spec.ambient_dim == 0 || (spec.num_lines > 1 && spec.ambient_dim < 2) {
        return Err(Error::InvalidParameter(
            "ambient_dim must be at least 2 for multiple lines".into(),
        ));
    }
    if spec.noise_sigma < 0.0 {
        return Err(Error::InvalidParameter(
            "noise_sigma must be nonnegative".into(),
        ));
    }
    if spec.colors.len() != spec.num_lines {
        return Err(Error::InvalidParameter(format!(
            "expected {} colors, got {}",
            spec.num_lines,
            spec.colors.len()
        )));
    }
    let color_dim = spec.colors[0].len();
    if color_dim == 0 || spec.colors.iter().any(|c| c.len() != color_dim) {
        return Err(Error::InvalidParameter(
            "line colors must be nonempty and share a dimension".into(),
        ));
    }

    let total = spec.num_lines * spec.points_per_line;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positions = nalgebra::DMatrix::zeros(spec.ambient_dim, total);
    let mut colors = nalgebra::DMatrix::zeros(color_dim, total);
    let mut labels = Vec::with_capacity(total);

    for line in 0..spec.num_lines {
        for q in 0..spec.points_per_line {
            let col = line * spec.points_per_line + q;
            let t = rng.random::<f64>() * 2.0 - 1.0;
            positions[(0, col)] = t;
            if spec.ambient_dim > 1 {
                positions[(1, col)] = line as f64;
            }
            for r in 0..spec.ambient_dim {
                let noise: f64 = rng.sample(StandardNormal);
                positions[(r, col)] += spec.noise_sigma * noise;
            }
            for r in 0..color_dim {
                colors[(r, col)] = spec.colors[line][r];
            }
            labels.push(line);
        }
    }

    Ok(LineCloud {
        positions: PointCloud::new(positions)?,
        colors: PointCloud::new(colors)?,
        labels,
    })
}
