#![allow(dead_code)]

use asym_mms::space::FiniteAsymmSpace;
use asym_mms::transport::Measure;
use asym_mms::Field;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random weighted digraph closed under shortest paths. With `connected`
/// a directed Hamiltonian cycle is added so every distance is finite.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64, connected: bool) -> FiniteAsymmSpace<f64> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(edge_prob) {
                edges.push((i, j, rng.gen_range(0.5..2.0)));
            }
        }
    }
    if connected && n > 1 {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for k in 0..n {
            edges.push((perm[k], perm[(k + 1) % n], rng.gen_range(0.5..2.0)));
        }
    }
    FiniteAsymmSpace::from_digraph(n, &edges, None).unwrap()
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Field {
    Field::new((0..n).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}

/// Random probability vector; roughly a quarter of the entries vanish.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> Measure<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    Measure::new(w.iter().map(|v| v / s).collect()).unwrap()
}

pub fn two_point() -> FiniteAsymmSpace<f64> {
    FiniteAsymmSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap()
}
