//! Weighted random sampling.
//!
//! Growth and attack both draw nodes proportionally to a weight that changes
//! as the graph mutates, so the workhorse here is a Fenwick tree over
//! per-node weights with O(log n) update and O(log n) sampling. A plain
//! linear-scan sampler ([`sample_targets`]) serves as the reference
//! implementation; on integer weights the two pick identical sequences.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Cumulative-weight structure supporting weighted index sampling with
/// O(log n) weight updates.
#[derive(Debug, Clone)]
pub struct FenwickSampler {
    // 1-based Fenwick partial sums
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl FenwickSampler {
    pub fn new(n: usize) -> Self {
        FenwickSampler {
            tree: vec![0.0; n + 1],
            weights: vec![0.0; n],
        }
    }

    pub fn from_weights(weights: &[f64]) -> Self {
        let mut s = Self::new(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            s.set(i, w);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Replaces the weight at `i`. Weights must be finite and nonnegative.
    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w.is_finite() && w >= 0.0);
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of all weights (subject to ordinary float accumulation error).
    pub fn total(&self) -> f64 {
        self.prefix_sum(self.weights.len())
    }

    /// Sum of weights at indices `0..n`.
    fn prefix_sum(&self, n: usize) -> f64 {
        let mut sum = 0.0;
        let mut j = n;
        while j > 0 {
            sum += self.tree[j];
            j -= j & j.wrapping_neg();
        }
        sum
    }

    /// Draws an index with probability proportional to its weight, or `None`
    /// if no index has positive weight.
    ///
    /// Rounding in the running sums can in principle land the tree descent on
    /// a zero-weight leaf; the draw is then repaired by scanning to the next
    /// positive weight, so a returned index always has weight > 0.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if total <= 0.0 {
            return self.first_positive();
        }
        let r = rng.random::<f64>() * total;
        let idx = self.descend(r);
        match idx {
            Some(i) if self.weights[i] > 0.0 => Some(i),
            _ => self.repair(idx),
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `r`.
    fn descend(&self, r: f64) -> Option<usize> {
        let n = self.weights.len();
        let mut pos = 0usize; // 1-based position of the last accepted node
        let mut rem = r;
        let mut mask = n.next_power_of_two();
        while mask > 0 {
            let next = pos + mask;
            if next < self.tree.len() && self.tree[next] <= rem {
                rem -= self.tree[next];
                pos = next;
            }
            mask >>= 1;
        }
        if pos < n {
            Some(pos)
        } else {
            None
        }
    }

    fn first_positive(&self) -> Option<usize> {
        self.weights.iter().position(|&w| w > 0.0)
    }

    fn repair(&self, near: Option<usize>) -> Option<usize> {
        let start = near.unwrap_or(self.weights.len().saturating_sub(1));
        self.weights[start..]
            .iter()
            .position(|&w| w > 0.0)
            .map(|p| start + p)
            .or_else(|| self.weights[..start].iter().rposition(|&w| w > 0.0))
    }
}

/// Draws `m` distinct candidates, sequentially and without replacement:
/// after each pick the picked weight is dropped and the remaining weights
/// are implicitly renormalized by the shrunken total.
///
/// If the positive weights run out before `m` picks, the remaining picks are
/// drawn uniformly from the not-yet-picked candidates. Fewer than `m`
/// candidates overall is a parameter error.
pub fn sample_targets<R: Rng>(
    candidates: &[(NodeId, f64)],
    m: usize,
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    if candidates.len() < m {
        return Err(Error::Parameter(format!(
            "cannot draw {m} distinct targets from {} candidates",
            candidates.len()
        )));
    }
    if candidates.iter().any(|&(_, w)| !w.is_finite() || w < 0.0) {
        return Err(Error::Parameter(
            "sampling weights must be finite and nonnegative".into(),
        ));
    }

    let mut weights: Vec<f64> = candidates.iter().map(|&(_, w)| w).collect();
    let mut positive = weights.iter().filter(|&&w| w > 0.0).count();
    let mut picked_flags = vec![false; candidates.len()];
    let mut picked = Vec::with_capacity(m);

    while picked.len() < m && positive > 0 {
        let total: f64 = weights.iter().sum();
        let r = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if w > 0.0 && acc > r {
                chosen = Some(i);
                break;
            }
        }
        // float round-off can exhaust the scan; fall back to the last
        // positive-weight candidate
        let i = match chosen {
            Some(i) => i,
            None => weights
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("positive > 0 guarantees a positive weight"),
        };
        weights[i] = 0.0;
        positive -= 1;
        picked_flags[i] = true;
        picked.push(candidates[i].0);
    }

    // degenerate input: pad uniformly over whoever is left
    if picked.len() < m {
        let mut remaining: Vec<usize> = (0..candidates.len()).filter(|&i| !picked_flags[i]).collect();
        while picked.len() < m {
            let j = rng.random_range(0..remaining.len());
            let i = remaining.swap_remove(j);
            picked.push(candidates[i].0);
        }
    }
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ids(ws: &[f64]) -> Vec<(NodeId, f64)> {
        let mut g = crate::graph::Graph::new();
        ws.iter().map(|&w| (g.add_node(0.5).unwrap(), w)).collect()
    }

    #[test]
    fn point_mass_always_picked() {
        let cand = ids(&[1.0, 0.0, 0.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..100 {
            let picks = sample_targets(&cand, 1, &mut rng).unwrap();
            assert_eq!(picks, vec![cand[0].0]);
        }
    }

    #[test]
    fn exhaustion_returns_full_set() {
        let cand = ids(&[1.0; 5]);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut picks = sample_targets(&cand, 5, &mut rng).unwrap();
        picks.sort();
        let mut want: Vec<_> = cand.iter().map(|&(v, _)| v).collect();
        want.sort();
        assert_eq!(picks, want);
    }

    #[test]
    fn frequency_follows_weights() {
        // weights (2,1,1): first pick lands on index 0 half the time
        let cand = ids(&[2.0, 1.0, 1.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let trials = 100_000;
        let mut hits = 0usize;
        for _ in 0..trials {
            let picks = sample_targets(&cand, 1, &mut rng).unwrap();
            if picks[0] == cand[0].0 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn too_few_candidates_is_error() {
        let cand = ids(&[1.0, 1.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(sample_targets(&cand, 3, &mut rng).is_err());
    }

    #[test]
    fn zero_weights_padded_uniformly() {
        let cand = ids(&[1.0, 0.0, 0.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut second_counts = [0usize; 3];
        for _ in 0..20_000 {
            let picks = sample_targets(&cand, 2, &mut rng).unwrap();
            assert_eq!(picks[0], cand[0].0);
            let j = cand.iter().position(|&(v, _)| v == picks[1]).unwrap();
            second_counts[j] += 1;
        }
        assert_eq!(second_counts[0], 0);
        let frac = second_counts[1] as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.02, "frac = {frac}");
    }

    #[test]
    fn negative_weight_rejected() {
        let cand = ids(&[1.0, -0.5]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(sample_targets(&cand, 1, &mut rng).is_err());
    }

    #[test]
    fn fenwick_total_and_set() {
        let mut s = FenwickSampler::new(10);
        for i in 0..10 {
            s.set(i, i as f64);
        }
        assert_eq!(s.total(), 45.0);
        s.set(3, 0.0);
        assert_eq!(s.total(), 42.0);
        assert_eq!(s.weight(3), 0.0);
        assert_eq!(s.weight(4), 4.0);
    }

    #[test]
    fn fenwick_empty_total_samples_none() {
        let s = FenwickSampler::new(4);
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        assert_eq!(s.sample(&mut rng), None);
    }

    #[test]
    fn fenwick_matches_linear_scan_on_integer_weights() {
        // same uniform draw drives both selectors; integer weights make the
        // partial sums exact, so the picks must agree index-for-index
        let mut rng = ChaCha12Rng::seed_from_u64(1234);
        for round in 0..200 {
            let n = 1 + (round % 37);
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0..5u32) as f64).collect();
            let fen = FenwickSampler::from_weights(&weights);
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                continue;
            }
            let mut pick_rng = ChaCha12Rng::seed_from_u64(round as u64);
            let r = pick_rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut linear = None;
            for (i, &w) in weights.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > r {
                    linear = Some(i);
                    break;
                }
            }
            let mut pick_rng = ChaCha12Rng::seed_from_u64(round as u64);
            let fenwick = fen.sample(&mut pick_rng);
            assert_eq!(fenwick, linear, "weights {weights:?}");
        }
    }

    #[test]
    fn fenwick_sample_frequencies() {
        let s = FenwickSampler::from_weights(&[3.0, 1.0, 0.0, 4.0]);
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut counts = [0usize; 4];
        let trials = 80_000;
        for _ in 0..trials {
            counts[s.sample(&mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[2], 0);
        for (i, want) in [(0, 3.0 / 8.0), (1, 1.0 / 8.0), (3, 4.0 / 8.0)] {
            let freq = counts[i] as f64 / trials as f64;
            assert!((freq - want).abs() < 0.01, "index {i}: freq {freq}");
        }
    }
}
