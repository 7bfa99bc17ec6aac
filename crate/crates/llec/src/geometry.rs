//! Point-cloud container, distance metrics, and nearest-neighbor search.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Distance metric used for neighbor searches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Euclidean,
}

/// A set of points stored as the columns of a D x p matrix.
///
/// Column `i` is the point `x_i`. Image-derived clouds have D = 3 with
/// entries in [0, 1]; other producers (e.g. the torus generator) use larger
/// ambient dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    data: DMatrix<f64>,
}

impl PointCloud {
    /// Wraps a D x p matrix, rejecting empty shapes and non-finite entries.
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::EmptyCloud);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteData);
        }
        Ok(Self { data })
    }

    /// Builds a cloud from a list of equally sized points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let p = points.len();
        if p == 0 {
            return Err(Error::EmptyCloud);
        }
        let dim = points[0].len();
        for pt in points {
            if pt.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: pt.len(),
                });
            }
        }
        let data = DMatrix::from_fn(dim, p, |r, c| points[c][r]);
        Self::new(data)
    }

    /// Ambient dimension D.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of points p.
    pub fn num_points(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Point `i` as a slice (columns are contiguous in memory).
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.data.as_slice()[i * d..(i + 1) * d]
    }

    /// One row per point, comma-separated decimal values, no header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.num_points() {
            let row: Vec<String> = self.point(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV form produced by [`PointCloud::to_csv_string`].
    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut points: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| {
                        Error::Parse(format!("line {}: bad value {:?}", lineno + 1, field))
                    })
                })
                .collect::<Result<_>>()?;
            if let Some(first) = points.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} values, found {}",
                        lineno + 1,
                        first.len(),
                        row.len()
                    )));
                }
            }
            points.push(row);
        }
        Self::from_points(&points)
    }
}

/// Distance between two points under the given metric.
///
/// Zero exactly when the points are equal, which is what the neighbor
/// search relies on to drop duplicates.
pub fn distance(a: &[f64], b: &[f64], metric: Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    match metric {
        Metric::Euclidean => {
            let mut acc = 0.0;
            for (x, y) in a.iter().zip(b) {
                let diff = x - y;
                acc += diff * diff;
            }
            Ok(acc.sqrt())
        }
    }
}

/// k nearest neighbors per point, ordered by nondecreasing distance.
///
/// Zero-distance candidates (duplicate points) are never listed as
/// neighbors, so every graph edge carries a strictly positive distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborGraph {
    neighbors: Vec<Vec<usize>>,
    k: usize,
}

impl NeighborGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_points(&self) -> usize {
        self.neighbors.len()
    }

    /// Neighbor indices of point `i`, nearest first.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.neighbors.iter().map(|n| n.as_slice())
    }
}

/// Brute-force k-nearest-neighbor search with duplicate exclusion.
///
/// Candidates at distance exactly zero are skipped. Ties are broken toward
/// the lower point index so results are reproducible. Errors when a point
/// has fewer than `k` positive-distance candidates.
pub fn knn(cloud: &PointCloud, k: usize, metric: Metric) -> Result<NeighborGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let p = cloud.num_points();
    let neighbors: Vec<Vec<usize>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let xi = cloud.point(i);
            let mut cands: Vec<(f64, usize)> = Vec::with_capacity(p.saturating_sub(1));
            for j in 0..p {
                if j == i {
                    continue;
                }
                let d = distance(xi, cloud.point(j), metric)?;
                if d > 0.0 {
                    cands.push((d, j));
                }
            }
            if cands.len() < k {
                return Err(Error::InsufficientNeighbors {
                    point: i,
                    available: cands.len(),
                    needed: k,
                });
            }
            let cmp = |a: &(f64, usize), b: &(f64, usize)| {
                a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1))
            };
            if cands.len() > k {
                cands.select_nth_unstable_by(k - 1, cmp);
                cands.truncate(k);
            }
            cands.sort_unstable_by(cmp);
            Ok(cands.into_iter().map(|(_, j)| j).collect())
        })
        .collect::<Result<_>>()?;
    Ok(NeighborGraph { neighbors, k })
}
