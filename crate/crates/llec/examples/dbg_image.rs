// debug: A6-scale eigensolve timing
use llec::geometry::{knn, Metric, PointCloud};
use llec::lle::{build_cost_matrix, perturb, solve_weights, count_components, EigenOptions, EigenPath};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let side = 64usize;
    let bases: [[f64; 3]; 5] = [
        [0.1, 0.1, 0.1],
        [0.9, 0.1, 0.1],
        [0.1, 0.9, 0.1],
        [0.1, 0.1, 0.9],
        [0.9, 0.9, 0.1],
    ];
    let mut points = Vec::new();
    for y in 0..side {
        for x in 0..side {
            let region = (x * 5) / side;
            let base = bases[region];
            let px: Vec<f64> = base
                .iter()
                .map(|&b| {
                    let noisy: f64 = b + (rng.random::<f64>() * 2.0 - 1.0) * 0.02;
                    (noisy * 255.0).round() / 255.0
                })
                .collect();
            points.push(px);
        }
    }
    let cloud = PointCloud::from_points(&points).unwrap();
    let t0 = Instant::now();
    let graph = knn(&cloud, 4, Metric::Euclidean).unwrap();
    println!("knn: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let weights = solve_weights(&cloud, &graph, 1e-3).unwrap();
    println!("weights: {:?}", t0.elapsed());
    let m0 = build_cost_matrix(weights);
    println!("components: {}", count_components(&m0, 1e-10).unwrap());
    let m = perturb(&m0, 1e-9).unwrap();
    let t0 = Instant::now();
    let opts = EigenOptions::default();
    match llec::lle::embed_with(&m, 2, EigenPath::Iterative, &opts) {
        Ok(emb) => println!(
            "embed ok in {:?}, eigenvalues {:?}",
            t0.elapsed(),
            emb.eigenvalues()
        ),
        Err(e) => println!("embed failed after {:?}: {e}", t0.elapsed()),
    }
}
