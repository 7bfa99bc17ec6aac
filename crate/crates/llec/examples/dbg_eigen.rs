// debug: inspect ritz values per cycle
use llec::geometry::{knn, Metric, PointCloud};
use llec::lle::{build_cost_matrix, perturb, solve_weights, EigenOptions, EigenPath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::DVector;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let p = 80;
    let points: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
        .collect();
    let cloud = PointCloud::from_points(&points).unwrap();
    let graph = knn(&cloud, 4, Metric::Euclidean).unwrap();
    let weights = solve_weights(&cloud, &graph, 1e-3).unwrap();
    let m = perturb(&build_cost_matrix(weights), 1e-9).unwrap();

    // dense reference
    let dense = m.to_dense();
    let eig = nalgebra::SymmetricEigen::new(dense.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("dense bottom: {:?}", &vals[..6]);
    println!("dense top: {:?}", &vals[vals.len()-3..]);
    println!("norm bound: {}", {
        // reproduce operator bound logic
        let w = m.weights();
        let mut rowmax: f64 = 0.0;
        for i in 0..p { let (_, v) = w.row(i); rowmax = rowmax.max(v.iter().map(|x| x.abs()).sum()); }
        rowmax
    });

    // iterative with small basis
    let opts = EigenOptions { basis_size: 12, ..EigenOptions::default() };
    match llec::lle::embed_with(&m, 3, EigenPath::Iterative, &opts) {
        Ok(emb) => println!("iterative eigenvalues: {:?}", emb.eigenvalues()),
        Err(e) => println!("iterative failed: {e}"),
    }
    let opts = EigenOptions { basis_size: 40, ..EigenOptions::default() };
    match llec::lle::embed_with(&m, 3, EigenPath::Iterative, &opts) {
        Ok(emb) => println!("basis 40 eigenvalues: {:?}", emb.eigenvalues()),
        Err(e) => println!("basis 40 failed: {e}"),
    }
    let x = DVector::from_fn(p, |i, _| (i as f64).sin());
    let diff = (m.apply(&x) - dense * &x).norm();
    println!("apply vs dense: {diff:.3e}");
}
