//! Deterministic inputs shared by the benchmarks.

use tcpkit::fixtures::{diagonally_dominant, rng};
use tcpkit::{TcpInstance, Tensor};

pub fn dominant_tensor(order: usize, dim: usize) -> Tensor {
    diagonally_dominant(&mut rng(order as u64 * 100 + dim as u64), order, dim)
}

pub fn instance(order: usize, dim: usize) -> TcpInstance {
    let q = (0..dim).map(|i| if i % 2 == 0 { -1.0 } else { 0.5 }).collect();
    TcpInstance::new(dominant_tensor(order, dim), q).expect("matching dimensions")
}

pub fn point(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| 0.25 + 0.5 * i as f64 / dim as f64).collect()
}
