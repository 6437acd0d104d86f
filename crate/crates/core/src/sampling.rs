//! Seeded point sampling inside domains.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainSpec;
use crate::graph::Window;

/// Deterministic generator used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points of `window` lying in the domain at Euclidean distance
/// at least `margin` from the boundary. Gives up after `200 n` trials.
pub fn random_points(dom: &DomainSpec, window: Window, n: usize, margin: f64, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    let mut trials = 0;
    while out.len() < n && trials < 200 * n.max(1) {
        trials += 1;
        let z = Complex64::new(rng.gen_range(window.lo.re..=window.hi.re), rng.gen_range(window.lo.im..=window.hi.im));
        if dom.contains_finite(z) && dom.dist_euclidean(z) >= margin {
            out.push(z);
        }
    }
    out
}

/// Greedy farthest-point subsample of `candidates` (Euclidean), starting
/// from the first candidate. Returns indices into `candidates`.
pub fn farthest_point_indices(candidates: &[Complex64], m: usize) -> Vec<usize> {
    if candidates.is_empty() || m == 0 {
        return Vec::new();
    }
    let mut chosen = vec![0usize];
    let mut best: Vec<f64> = candidates.iter().map(|z| (z - candidates[0]).norm()).collect();
    while chosen.len() < m.min(candidates.len()) {
        let (k, _) = best
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        if best[k] == 0.0 {
            break;
        }
        chosen.push(k);
        for (i, z) in candidates.iter().enumerate() {
            best[i] = best[i].min((z - candidates[k]).norm());
        }
    }
    chosen
}
