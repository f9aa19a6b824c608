#![allow(dead_code)] // shared across test binaries; not every binary uses every helper

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thickening::{euclidean_metric, FiniteMetricSpace, Measure, PointCloud};

/// Seeded cloud of points in the unit cube of R^3; generic distances, valid
/// metric by construction.
pub fn random_cloud(seed: u64, n: usize) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| (0..3).map(|_| rng.gen::<f64>()).collect())
        .collect();
    PointCloud::new(points).unwrap()
}

pub fn random_space(seed: u64, n: usize) -> Arc<FiniteMetricSpace> {
    euclidean_metric(&random_cloud(seed, n)).unwrap()
}

/// Moves every point of the cloud by at most `radius`, so every pairwise
/// distance changes by at most `2 * radius` and the result stays a metric.
pub fn jiggle_cloud(cloud: &PointCloud, radius: f64, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = cloud
        .points()
        .iter()
        .map(|p| {
            let dir: Vec<f64> = (0..p.len()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            let scale = rng.gen::<f64>() * radius / norm;
            p.iter().zip(&dir).map(|(x, d)| x + d * scale).collect()
        })
        .collect();
    PointCloud::new(points).unwrap()
}

pub fn random_measure(
    space: &Arc<FiniteMetricSpace>,
    rng: &mut ChaCha8Rng,
) -> Measure {
    loop {
        let raw: Vec<f64> = (0..space.len())
            .map(|_| {
                if rng.gen::<f64>() < 0.25 {
                    0.0
                } else {
                    rng.gen::<f64>()
                }
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        if sum > 1e-6 {
            return Measure::new(space.clone(), raw.iter().map(|x| x / sum).collect()).unwrap();
        }
    }
}
