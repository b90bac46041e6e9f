//! Exact shortest-path betweenness (Brandes) on unweighted undirected graphs.

use std::collections::VecDeque;

use num_traits::Num;

use super::SimpleGraph;
use crate::exec::Exec;

const UNSEEN: u32 = u32::MAX;

/// Per-source scratch space, reset lazily through the visit stack.
struct Workspace<T> {
    sigma: Vec<T>,
    delta: Vec<T>,
    dist: Vec<u32>,
    stack: Vec<usize>,
    queue: VecDeque<usize>,
}

impl<T: Num + Clone> Workspace<T> {
    fn new(n: usize) -> Self {
        Workspace {
            sigma: vec![T::zero(); n],
            delta: vec![T::zero(); n],
            dist: vec![UNSEEN; n],
            stack: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Adds the dependencies of `source` on every other node into `acc`.
    ///
    /// Each unordered pair is reached from both endpoints, so summing over all
    /// sources double counts.
    fn accumulate(&mut self, g: &SimpleGraph, source: usize, acc: &mut [T]) {
        self.sigma[source] = T::one();
        self.dist[source] = 0;
        self.queue.push_back(source);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            let next = self.dist[v] + 1;
            for &w in g.neighbors(v) {
                if self.dist[w] == UNSEEN {
                    self.dist[w] = next;
                    self.queue.push_back(w);
                }
                if self.dist[w] == next {
                    let add = self.sigma[v].clone();
                    self.sigma[w] = self.sigma[w].clone() + add;
                }
            }
        }
        for &w in self.stack.iter().rev() {
            if self.dist[w] == 0 {
                continue;
            }
            let coeff = (T::one() + self.delta[w].clone()) / self.sigma[w].clone();
            let prev = self.dist[w] - 1;
            for &v in g.neighbors(w) {
                if self.dist[v] == prev {
                    let add = self.sigma[v].clone() * coeff.clone();
                    self.delta[v] = self.delta[v].clone() + add;
                }
            }
            acc[w] = acc[w].clone() + self.delta[w].clone();
        }
        for &v in &self.stack {
            self.sigma[v] = T::zero();
            self.delta[v] = T::zero();
            self.dist[v] = UNSEEN;
        }
        self.stack.clear();
    }
}

/// Sequential Brandes over any exact or floating number type.
///
/// With a rational `T` the result is exact; unreachable pairs contribute 0.
pub fn betweenness_generic<T: Num + Clone>(g: &SimpleGraph) -> Vec<T> {
    let n = g.node_count();
    let mut acc = vec![T::zero(); n];
    let mut ws = Workspace::new(n);
    for s in 0..n {
        if !g.neighbors(s).is_empty() {
            ws.accumulate(g, s, &mut acc);
        }
    }
    let two = T::one() + T::one();
    acc.into_iter().map(|b| b / two.clone()).collect()
}

/// Sources per accumulation block. Depends only on the graph so that the
/// floating-point summation order is the same for every execution mode.
fn block_size(sources: usize) -> usize {
    sources.div_ceil(256).max(32)
}

/// Unnormalized betweenness of every node, indexed like the graph's nodes.
///
/// Sources are split into fixed blocks; blocks may run concurrently but their
/// partial sums are folded in block order, so the output is bitwise identical
/// for [`Exec::Sequential`] and [`Exec::Parallel`].
pub fn betweenness(g: &SimpleGraph, exec: Exec) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).filter(|&v| !g.neighbors(v).is_empty()).collect();
    let partials = exec.map_chunks(&sources, block_size(sources.len()), |block| {
        let mut ws = Workspace::<f64>::new(n);
        let mut acc = vec![0.0; n];
        for &s in block {
            ws.accumulate(g, s, &mut acc);
        }
        acc
    });
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    for b in &mut total {
        *b /= 2.0;
    }
    total
}
