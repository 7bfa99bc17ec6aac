//! Bottom eigenpairs of the cost matrix.
//!
//! Small problems go through a dense symmetric eigensolve. Large ones are
//! handled structurally: the unperturbed cost matrix block-diagonalizes over
//! the connected components of the neighbor graph, and the component
//! indicator vectors span its null space exactly. For the default tiny
//! perturbation scale the bottom eigenpairs of M + λT therefore live in
//! that indicator subspace up to a rotation of order λ‖T‖/gap, so a
//! Rayleigh-Ritz projection onto it replaces thousands of Krylov steps.
//! Anything beyond the lifted cluster (connected graphs, large λ, or more
//! pairs than components) runs through a thick-restart Lanczos iteration on
//! the reversed operator σI - M with the known null directions deflated,
//! which plays the role of a shift-invert transform without a
//! factorization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lle::cost::{component_labels, EmbedCostMatrix};

/// Selects how the bottom eigenpairs are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenPath {
    /// Dense up to [`EigenOptions::dense_limit`] points, iterative above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

/// Controls for the eigensolver.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenOptions {
    /// Largest problem the Auto path hands to the dense solver.
    pub dense_limit: usize,
    /// Lanczos basis size per restart cycle; 0 derives one from nev.
    pub basis_size: usize,
    /// Cap on operator applications before reporting non-convergence.
    pub max_matvecs: usize,
    /// Ritz residual tolerance relative to the operator norm estimate.
    pub tol: f64,
    /// Seed for the deterministic start vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_limit: 500,
            basis_size: 0,
            max_matvecs: 400_000,
            tol: 1e-12,
            seed: 0x11ec,
        }
    }
}

// The indicator-subspace route is only a good approximation while the
// perturbation stays far below the genuine spectral gap.
const LIFTED_CLUSTER_LAMBDA_MAX: f64 = 1e-8;

// Dense Rayleigh-Ritz on the indicator subspace is cubic in the component
// count; beyond this we let Lanczos have it.
const COMPONENT_SUBSPACE_LIMIT: usize = 1500;

/// The `nev` smallest eigenpairs of a dense symmetric matrix, ascending.
pub(crate) fn dense_bottom_eigenpairs(
    m: &DMatrix<f64>,
    nev: usize,
) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eigen = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .partial_cmp(&eigen.eigenvalues[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(nev);
    let vals = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eigen.eigenvectors.column(i).into_owned())
        .collect();
    (vals, vecs)
}

/// The `nev` smallest eigenpairs of the cost operator, ascending, without
/// materializing it. The constant mode is always pair zero.
pub(crate) fn iterative_bottom_eigenpairs(
    op: &EmbedCostMatrix,
    nev: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let p = op.num_points();
    if nev == 0 || nev > p {
        return Err(Error::InvalidParameter(format!(
            "cannot extract {nev} eigenpairs from {p} points"
        )));
    }
    let (labels, components) = component_labels(op.weights());

    // The subspace route trades a little eigenvector accuracy (a rotation
    // of order lambda/gap) for robustness against the lifted near-null
    // cluster, which stalls Krylov iterations. Small problems instead
    // exhaust the deflated space below, which is exact.
    if op.is_perturbed()
        && op.lambda() <= LIFTED_CLUSTER_LAMBDA_MAX
        && components > 1
        && components <= COMPONENT_SUBSPACE_LIMIT
        && p > opts.dense_limit
    {
        // normalized indicator columns: orthonormal by disjoint supports,
        // and exact null vectors of the unperturbed matrix
        let mut sizes = vec![0usize; components];
        for &label in &labels {
            sizes[label] += 1;
        }
        let mut indicators: Vec<DVector<f64>> = (0..components)
            .map(|c| {
                let scale = 1.0 / (sizes[c] as f64).sqrt();
                DVector::from_fn(p, |i, _| if labels[i] == c { scale } else { 0.0 })
            })
            .collect();

        // Rayleigh-Ritz of the perturbed operator on the indicator subspace
        let images: Vec<DVector<f64>> = indicators.iter().map(|u| op.apply(u)).collect();
        let mut small = DMatrix::zeros(components, components);
        for i in 0..components {
            for j in 0..=i {
                let v = indicators[i].dot(&images[j]);
                small[(i, j)] = v;
                small[(j, i)] = v;
            }
        }
        let ritz = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..components).collect();
        order.sort_by(|&a, &b| {
            ritz.eigenvalues[a]
                .partial_cmp(&ritz.eigenvalues[b])
                .unwrap()
                .then(a.cmp(&b))
        });

        let take = nev.min(components);
        let mut vals: Vec<f64> = Vec::with_capacity(nev);
        let mut vecs: Vec<DVector<f64>> = Vec::with_capacity(nev);
        for &idx in &order[..take] {
            let mut x = DVector::zeros(p);
            for (c, u) in indicators.iter().enumerate() {
                x.axpy(ritz.eigenvectors[(c, idx)], u, 1.0);
            }
            let n = x.norm();
            vals.push(ritz.eigenvalues[idx]);
            vecs.push(x / n);
        }
        if nev > components {
            // The rest of the spectrum is genuine. The unperturbed matrix
            // is exactly block-diagonal over components, so each block is
            // solved on its own (dense when small) and the results merged;
            // the neglected coupling is again of order lambda.
            let need = nev - components;
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); components];
            for (i, &label) in labels.iter().enumerate() {
                members[label].push(i);
            }
            let mut genuine: Vec<(f64, DVector<f64>)> = Vec::new();
            for keep in &members {
                let block = crate::lle::cost::build_cost_matrix(op.weights().restrict(keep));
                let want = (need + 1).min(keep.len());
                let (bvals, bvecs) = if keep.len() <= opts.dense_limit {
                    dense_bottom_eigenpairs(&block.to_dense(), want)
                } else {
                    iterative_bottom_eigenpairs(&block, want, opts)?
                };
                // skip the block's own constant mode: that direction is
                // already covered by the indicator subspace
                for (val, vec) in bvals.into_iter().zip(bvecs).skip(1) {
                    let mut full = DVector::zeros(p);
                    for (local, &global) in keep.iter().enumerate() {
                        full[global] = vec[local];
                    }
                    genuine.push((val, full));
                }
            }
            genuine.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            genuine.truncate(need);
            if genuine.len() < need {
                return Err(Error::InvalidParameter(format!(
                    "cannot extract {nev} eigenpairs from {p} points in {components} components"
                )));
            }
            for (val, vec) in genuine {
                vals.push(val);
                vecs.push(vec);
            }
            // lifted values sit below the genuine ones for tiny lambda, but
            // keep the contract honest if they interleave
            let mut order: Vec<usize> = (0..vals.len()).collect();
            order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap().then(a.cmp(&b)));
            let vals = order.iter().map(|&i| vals[i]).collect();
            let vecs = order.iter().map(|&i| vecs[i].clone()).collect();
            return Ok((vals, vecs));
        }
        indicators.clear();
        return Ok((vals, vecs));
    }

    // connected graph (or a perturbation too large for the subspace
    // shortcut): the constant vector is still an exact null vector
    let constant = DVector::from_element(p, 1.0 / (p as f64).sqrt());
    let (mut vals, mut vecs) =
        lanczos_smallest_deflated(op, nev - 1, std::slice::from_ref(&constant), opts)?;
    vals.insert(0, 0.0);
    vecs.insert(0, constant);
    Ok((vals, vecs))
}

/// Subtracts the projections of `w` onto the deflators and every basis
/// vector. One pass records the coefficients against the basis; callers run
/// it twice to keep the basis orthonormal to working precision.
fn orth_pass(
    w: &mut DVector<f64>,
    deflators: &[DVector<f64>],
    basis: &[DVector<f64>],
    mut record: Option<&mut [f64]>,
) {
    for u in deflators {
        let c = u.dot(w);
        w.axpy(-c, u, 1.0);
    }
    for (i, v) in basis.iter().enumerate() {
        let c = v.dot(w);
        w.axpy(-c, v, 1.0);
        if let Some(rec) = record.as_deref_mut() {
            rec[i] += c;
        }
    }
}

/// Draws a unit vector orthogonal to the deflators and the current basis.
fn fresh_direction(
    rng: &mut ChaCha8Rng,
    deflators: &[DVector<f64>],
    basis: &[DVector<f64>],
) -> Option<DVector<f64>> {
    let p = deflators
        .first()
        .map(|d| d.len())
        .or_else(|| basis.first().map(|b| b.len()))?;
    for _ in 0..64 {
        let mut v = DVector::from_fn(p, |_, _| rng.random::<f64>() - 0.5);
        orth_pass(&mut v, deflators, basis, None);
        orth_pass(&mut v, deflators, basis, None);
        let n = v.norm();
        if n > 1e-8 {
            return Some(v / n);
        }
    }
    None
}

/// Smallest `nev` eigenpairs of the cost operator restricted to the
/// orthogonal complement of `deflators`, ascending.
///
/// Thick-restart Lanczos on B = σI - M: the largest eigenvalues of B are
/// the smallest of M for any σ, and a tight σ (estimated by power
/// iteration) keeps the spectrum narrow enough for the restarts to make
/// progress. Full reorthogonalization keeps the basis clean, and the
/// projected matrix is assembled from the actually computed coefficients,
/// which makes the restart insensitive to rounding in the three-term
/// recurrence.
pub(crate) fn lanczos_smallest_deflated(
    op: &EmbedCostMatrix,
    nev: usize,
    deflators: &[DVector<f64>],
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let p = op.num_points();
    let max_dim = p - deflators.len();
    if nev == 0 || nev > max_dim {
        return Err(Error::InvalidParameter(format!(
            "cannot extract {nev} deflated eigenpairs from {p} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut matvecs = 0usize;

    // A tight shift matters: the reversal maps smallest to largest for any
    // σ, but convergence degrades with spectral width, so σ comes from a
    // short power iteration rather than a norm product bound (which can be
    // orders too large).
    let sigma = {
        let mut v = DVector::from_fn(p, |_, _| rng.random::<f64>() - 0.5);
        let mut estimate = 0.0;
        v /= v.norm();
        for _ in 0..30 {
            let w = op.apply(&v);
            matvecs += 1;
            let n = w.norm();
            if n == 0.0 {
                break;
            }
            estimate = n;
            v = w / n;
        }
        let cap = op.operator_norm_bound();
        (estimate * 1.02 + 1e-12).min(cap * 1.01 + 1e-12)
    };
    let tol_abs = (opts.tol * sigma).max(1e-300);
    let breakdown = sigma * 1e-14;

    let m = if opts.basis_size > 0 {
        opts.basis_size.max(nev + 2)
    } else if p <= opts.dense_limit {
        // exhaust the deflated space: one exact Rayleigh-Ritz cycle
        max_dim
    } else {
        (10 * nev + 80).clamp(nev + 2, 384)
    }
    .min(max_dim);

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m + 1);
    let mut proj = DMatrix::<f64>::zeros(m, m);
    basis.push(
        fresh_direction(&mut rng, deflators, &basis)
            .expect("a start direction always exists below max_dim"),
    );

    loop {
        // expand the basis one Lanczos step at a time
        let (beta_last, resid_dir, exhausted) = loop {
            let j = basis.len() - 1;
            let mut w = {
                let av = op.apply(&basis[j]);
                matvecs += 1;
                &basis[j] * sigma - av
            };
            let mut coeffs = vec![0.0; basis.len()];
            orth_pass(&mut w, deflators, &basis, Some(&mut coeffs));
            orth_pass(&mut w, deflators, &basis, None);
            for (i, &c) in coeffs.iter().enumerate() {
                proj[(i, j)] = c;
                proj[(j, i)] = c;
            }
            let beta = w.norm();
            if basis.len() == m || basis.len() == max_dim {
                break (beta, (beta > breakdown).then(|| w / beta), false);
            }
            if beta > breakdown {
                proj[(j, j + 1)] = beta;
                proj[(j + 1, j)] = beta;
                basis.push(w / beta);
            } else {
                // invariant subspace hit early: continue in a fresh direction
                match fresh_direction(&mut rng, deflators, &basis) {
                    Some(v) => {
                        proj[(j, j + 1)] = 0.0;
                        proj[(j + 1, j)] = 0.0;
                        basis.push(v);
                    }
                    None => break (0.0, None, true),
                }
            }
        };

        // Rayleigh-Ritz on the projected operator
        let s = basis.len();
        let small = proj.view((0, 0), (s, s)).into_owned();
        let small = (&small + small.transpose()) * 0.5;
        let ritz = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..s).collect();
        // largest eigenvalues of B first = smallest of M first
        order.sort_by(|&a, &b| {
            ritz.eigenvalues[b]
                .partial_cmp(&ritz.eigenvalues[a])
                .unwrap()
                .then(a.cmp(&b))
        });

        let exact = resid_dir.is_none() || s == max_dim || exhausted;
        let residual_of = |idx: usize| {
            if exact {
                0.0
            } else {
                (beta_last * ritz.eigenvectors[(s - 1, idx)]).abs()
            }
        };
        let wanted = &order[..nev.min(s)];
        let worst = wanted.iter().map(|&i| residual_of(i)).fold(0.0, f64::max);
        let done = wanted.len() == nev && (worst <= tol_abs || exact);

        if std::env::var("LLEC_EIGEN_TRACE").is_ok() {
            let vals: Vec<f64> = wanted.iter().map(|&i| sigma - ritz.eigenvalues[i]).collect();
            eprintln!("lanczos: matvecs={matvecs} s={s} worst={worst:.3e} vals={vals:?}");
        }

        if done {
            let mut vals = Vec::with_capacity(nev);
            let mut vecs: Vec<DVector<f64>> = Vec::with_capacity(nev);
            for &idx in wanted {
                let mut x = DVector::zeros(p);
                for (j, v) in basis.iter().enumerate() {
                    x.axpy(ritz.eigenvectors[(j, idx)], v, 1.0);
                }
                orth_pass(&mut x, deflators, &vecs, None);
                let n = x.norm();
                if n < 1e-8 {
                    return Err(Error::EigenNonConvergence {
                        matvecs,
                        residual: worst,
                    });
                }
                vecs.push(x / n);
                vals.push(sigma - ritz.eigenvalues[idx]);
            }
            return Ok((vals, vecs));
        }
        if matvecs >= opts.max_matvecs {
            return Err(Error::EigenNonConvergence {
                matvecs,
                residual: worst,
            });
        }

        // thick restart: keep the leading Ritz vectors plus the residual,
        // leaving at least half the basis free for new directions
        let half = (s.saturating_sub(2) / 2).max(nev);
        let keep = (nev + 8).min(half).min(s.saturating_sub(2)).max(1);
        let mut kept: Vec<DVector<f64>> = Vec::with_capacity(keep + 1);
        let mut kept_vals: Vec<f64> = Vec::with_capacity(keep);
        for &idx in &order[..keep] {
            let mut x = DVector::zeros(p);
            for (j, v) in basis.iter().enumerate() {
                x.axpy(ritz.eigenvectors[(j, idx)], v, 1.0);
            }
            orth_pass(&mut x, deflators, &kept, None);
            let n = x.norm();
            if n > 1e-10 {
                kept.push(x / n);
                kept_vals.push(ritz.eigenvalues[idx]);
            }
        }
        proj.fill(0.0);
        for (i, &val) in kept_vals.iter().enumerate() {
            proj[(i, i)] = val;
        }
        let next = match resid_dir {
            Some(r) => r,
            None => match fresh_direction(&mut rng, deflators, &kept) {
                Some(v) => v,
                None => {
                    return Err(Error::EigenNonConvergence {
                        matvecs,
                        residual: worst,
                    })
                }
            },
        };
        basis = kept;
        basis.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{knn, Metric, PointCloud};
    use crate::lle::cost::{build_cost_matrix, perturb};
    use crate::lle::weights::solve_weights;

    fn random_cost(p: usize, dim: usize, k: usize, seed: u64, lambda: f64) -> EmbedCostMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<Vec<f64>> = (0..p)
            .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
            .collect();
        let cloud = PointCloud::from_points(&points).unwrap();
        let graph = knn(&cloud, k, Metric::Euclidean).unwrap();
        let weights = solve_weights(&cloud, &graph, 1e-3).unwrap();
        let m = build_cost_matrix(weights);
        if lambda > 0.0 {
            perturb(&m, lambda).unwrap()
        } else {
            m
        }
    }

    fn assert_spans_agree(
        got: &[DVector<f64>],
        reference: &[DVector<f64>],
        tol: f64,
        context: &str,
    ) {
        for (i, v) in got.iter().enumerate() {
            let mut residual = v.clone();
            for r in reference {
                residual.axpy(-r.dot(v), r, 1.0);
            }
            assert!(
                residual.norm() < tol,
                "{context}: vector {i} leaves the reference span by {}",
                residual.norm()
            );
        }
    }

    #[test]
    fn iterative_matches_dense_on_small_instances() {
        for seed in 0..8u64 {
            let op = random_cost(11, 3, 3, seed, 1e-9);
            let nev = 4;
            let (ivals, ivecs) =
                iterative_bottom_eigenpairs(&op, nev, &EigenOptions::default()).unwrap();
            let (dvals, dvecs) = dense_bottom_eigenpairs(&op.to_dense(), nev);
            for i in 0..nev {
                assert!(
                    (ivals[i] - dvals[i]).abs() < 1e-8,
                    "seed {seed}: eigenvalue {i}: {} vs {}",
                    ivals[i],
                    dvals[i]
                );
            }
            assert_spans_agree(&ivecs[1..], &dvecs[1..], 1e-6, &format!("seed {seed}"));
        }
    }

    #[test]
    fn lanczos_restarts_on_larger_instance() {
        // basis smaller than the problem forces thick restarts
        let op = random_cost(80, 3, 4, 42, 1e-9);
        let opts = EigenOptions {
            basis_size: 32,
            ..EigenOptions::default()
        };
        let (lvals, lvecs) = iterative_bottom_eigenpairs(&op, 4, &opts).unwrap();
        let (dvals, dvecs) = dense_bottom_eigenpairs(&op.to_dense(), 4);
        for i in 0..4 {
            assert!(
                (lvals[i] - dvals[i]).abs() < 1e-8,
                "eigenvalue {i}: {} vs {}",
                lvals[i],
                dvals[i]
            );
        }
        assert_spans_agree(&lvecs[1..], &dvecs[1..], 1e-6, "restarted");
        // residual check against the operator itself
        for (val, vec) in lvals.iter().zip(&lvecs).skip(1) {
            let r = op.apply(vec) - vec * *val;
            assert!(r.norm() < 1e-8, "residual {}", r.norm());
        }
    }

    #[test]
    fn small_disconnected_instance_is_exact() {
        // below the dense limit the deflated space is exhausted, so the
        // lifted cluster is resolved exactly even under forced iteration
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.8],
            vec![10.0, 10.0],
            vec![11.0, 10.0],
            vec![10.5, 10.8],
        ];
        let cloud = PointCloud::from_points(&points).unwrap();
        let graph = knn(&cloud, 2, Metric::Euclidean).unwrap();
        let weights = solve_weights(&cloud, &graph, 1e-3).unwrap();
        let op = perturb(&build_cost_matrix(weights), 1e-9).unwrap();

        let (ivals, ivecs) = iterative_bottom_eigenpairs(&op, 2, &EigenOptions::default()).unwrap();
        let (dvals, dvecs) = dense_bottom_eigenpairs(&op.to_dense(), 2);
        assert!(ivals[0].abs() < 1e-12);
        assert!((ivals[1] - dvals[1]).abs() < 1e-12);
        assert_spans_agree(&ivecs[1..], &dvecs[1..], 1e-6, "lifted");
        let mean = ivecs[0].mean();
        assert!(ivecs[0].iter().all(|v| (v - mean).abs() < 1e-12));
    }

    fn two_blob_cost(per_blob: usize, seed: u64) -> EmbedCostMatrix {
        let mut points = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in 0..2 {
            let offset = c as f64 * 50.0;
            for _ in 0..per_blob {
                points.push(vec![
                    offset + rng.random::<f64>(),
                    offset + rng.random::<f64>(),
                    rng.random::<f64>(),
                ]);
            }
        }
        let cloud = PointCloud::from_points(&points).unwrap();
        let graph = knn(&cloud, 4, Metric::Euclidean).unwrap();
        let weights = solve_weights(&cloud, &graph, 1e-3).unwrap();
        perturb(&build_cost_matrix(weights), 1e-9).unwrap()
    }

    #[test]
    fn large_disconnected_instance_uses_the_indicator_subspace() {
        // above the dense limit the lifted pairs come from the indicator
        // subspace, exact up to a rotation of order lambda over the gap
        let op = two_blob_cost(320, 3);
        assert_eq!(crate::lle::cost::graph_components(op.weights()), 2);

        let (ivals, ivecs) = iterative_bottom_eigenpairs(&op, 2, &EigenOptions::default()).unwrap();
        let (dvals, dvecs) = dense_bottom_eigenpairs(&op.to_dense(), 2);
        assert!(ivals[0].abs() < 1e-12);
        assert!((ivals[1] - dvals[1]).abs() < 1e-12 + dvals[1] * 1e-3);
        assert_spans_agree(&ivecs[1..], &dvecs[1..], 1e-2, "lifted");
        let mean = ivecs[0].mean();
        assert!(ivecs[0].iter().all(|v| (v - mean).abs() < 1e-12));
    }

    #[test]
    fn hybrid_route_returns_genuine_pairs_beyond_the_cluster() {
        // two components but four pairs requested: the last two must come
        // from the genuine spectrum via deflated Lanczos
        let op = two_blob_cost(320, 7);
        let (ivals, ivecs) = iterative_bottom_eigenpairs(&op, 4, &EigenOptions::default()).unwrap();
        let (dvals, dvecs) = dense_bottom_eigenpairs(&op.to_dense(), 4);
        for i in 0..4 {
            let tol = 1e-8 + dvals[i] * 1e-3;
            assert!(
                (ivals[i] - dvals[i]).abs() < tol,
                "eigenvalue {i}: {} vs {}",
                ivals[i],
                dvals[i]
            );
        }
        assert_spans_agree(&ivecs[2..], &dvecs[2..], 1e-2, "genuine");
    }

    #[test]
    fn iterative_path_is_deterministic() {
        let op = random_cost(40, 3, 4, 5, 1e-9);
        let a = iterative_bottom_eigenpairs(&op, 3, &EigenOptions::default()).unwrap();
        let b = iterative_bottom_eigenpairs(&op, 3, &EigenOptions::default()).unwrap();
        assert_eq!(a.0, b.0);
        for (x, y) in a.1.iter().zip(&b.1) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn rejects_oversized_requests() {
        let op = random_cost(6, 2, 2, 1, 1e-9);
        assert!(iterative_bottom_eigenpairs(&op, 7, &EigenOptions::default()).is_err());
    }

    #[test]
    fn returned_vectors_are_orthonormal_and_mean_free() {
        let op = random_cost(30, 3, 4, 9, 1e-9);
        let (_, vecs) = iterative_bottom_eigenpairs(&op, 4, &EigenOptions::default()).unwrap();
        for (i, v) in vecs.iter().enumerate() {
            assert!((v.norm() - 1.0).abs() < 1e-10);
            for w in &vecs[i + 1..] {
                assert!(v.dot(w).abs() < 1e-10);
            }
        }
        for v in &vecs[1..] {
            assert!(v.sum().abs() < 1e-9);
        }
    }
}
