//! Exhaustive batch-plan oracles for small job sets.

#![allow(dead_code)]

/// Minimum of Σ over batches of `a + b·max cost`, over every partition of
/// the jobs into batches of at most `batch_size`.
pub fn best_partition_latency(costs: &[u64], batch_size: usize, a: f64, b: f64) -> f64 {
    fn go(
        i: usize,
        costs: &[u64],
        blocks: &mut Vec<(usize, u64)>,
        cap: usize,
        a: f64,
        b: f64,
        best: &mut f64,
    ) {
        if i == costs.len() {
            let total: f64 = blocks.iter().map(|&(_, m)| a + b * m as f64).sum();
            if total < *best {
                *best = total;
            }
            return;
        }
        for k in 0..blocks.len() {
            if blocks[k].0 < cap {
                let saved = blocks[k];
                blocks[k] = (saved.0 + 1, saved.1.max(costs[i]));
                go(i + 1, costs, blocks, cap, a, b, best);
                blocks[k] = saved;
            }
        }
        blocks.push((1, costs[i]));
        go(i + 1, costs, blocks, cap, a, b, best);
        blocks.pop();
    }
    let mut best = f64::INFINITY;
    go(0, costs, &mut Vec::new(), batch_size, a, b, &mut best);
    best
}

/// Every permutation of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, v: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        heap(k - 1, v, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
            heap(k - 1, v, out);
        }
    }
    let mut v: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut v, &mut out);
    out
}
