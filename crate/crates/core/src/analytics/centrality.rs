use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{AnalyticsError, Indexed, Sampling};
use crate::graph::Graph;
use crate::measure::{MeasureKey, NodeMeasure};

/// Unnormalized betweenness: every unordered pair `{s, t}` contributes the
/// fraction of its shortest paths through `v`, endpoints excluded.
///
/// Single-source dependency accumulation per source. When sampling kicks in
/// (see [`Sampling::effective_sources`]) the partial sums are scaled by
/// `n / k` and the result is flagged inexact.
pub fn betweenness(g: &Graph, sampling: &Sampling) -> Result<NodeMeasure, AnalyticsError> {
    sampling.validate()?;
    let idx = Indexed::new(g);
    let n = idx.len();
    let sources = sampling.sources_for(n);
    let mut bc = vec![0.0f64; n];

    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for &s in &sources {
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &idx.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }

    // Undirected accumulation sees each pair from both ends.
    let scale = if sources.len() < n {
        n as f64 / sources.len() as f64 / 2.0
    } else {
        0.5
    };
    Ok(NodeMeasure {
        measure: MeasureKey::Betweenness,
        values: idx.ids.iter().zip(&bc).map(|(&id, &b)| (id, b * scale)).collect(),
        exact: sources.len() == n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-8,
            max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    /// `exact` mirrors `converged`.
    pub measure: NodeMeasure,
    pub iterations: usize,
    /// L1 change of every iterate.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Power iteration on the degree-normalized random walk. Mass sitting on
/// isolated nodes is teleported uniformly.
///
/// Running out of iterations is not an error: the last iterate is returned
/// with `converged == false`.
pub fn pagerank(g: &Graph, params: &PageRankParams) -> Result<PageRank, AnalyticsError> {
    let d = params.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(AnalyticsError::InvalidDamping(d));
    }
    let idx = Indexed::new(g);
    let n = idx.len();
    if n == 0 {
        return Ok(PageRank {
            measure: NodeMeasure {
                measure: MeasureKey::Pagerank,
                values: Default::default(),
                exact: true,
            },
            iterations: 0,
            residuals: Vec::new(),
            converged: true,
        });
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_iters {
        let dangling: f64 = (0..n).filter(|&v| idx.adj[v].is_empty()).map(|v| x[v]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        for v in 0..n {
            let inflow: f64 = idx.adj[v].iter().map(|&u| x[u] / idx.adj[u].len() as f64).sum();
            next[v] = base + d * inflow;
        }
        // Renormalize so rounding drift never accumulates.
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|p| *p /= total);
        let change: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        residuals.push(change);
        if change < params.tol {
            converged = true;
            break;
        }
    }

    Ok(PageRank {
        measure: NodeMeasure {
            measure: MeasureKey::Pagerank,
            values: idx.ids.iter().zip(&x).map(|(&id, &p)| (id, p)).collect(),
            exact: converged,
        },
        iterations: residuals.len(),
        residuals,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::*;
    use crate::NodeId;

    #[test]
    fn betweenness_examples() {
        let b = betweenness(&path(3), &Sampling::exact()).unwrap();
        assert_eq!(b.values.values().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);

        let b = betweenness(&star(3), &Sampling::exact()).unwrap();
        assert_eq!(b.get(NodeId(0)), 3.0);
        assert!((1..4).all(|i| b.get(NodeId(i)) == 0.0));

        let b = betweenness(&complete(3), &Sampling::exact()).unwrap();
        assert!(b.values.values().all(|&x| x == 0.0));
        assert!(b.exact);
    }

    #[test]
    fn zero_samples_rejected() {
        assert_eq!(
            betweenness(&path(3), &Sampling::sampled(0, 1)),
            Err(AnalyticsError::NonPositiveSampleCount)
        );
    }

    #[test]
    fn sampled_with_all_sources_is_exact() {
        let g = path(6);
        let exact = betweenness(&g, &Sampling::exact()).unwrap();
        let all = betweenness(&g, &Sampling::sampled(6, 3)).unwrap();
        assert_eq!(exact, all);
        let some = betweenness(&g, &Sampling::sampled(3, 3)).unwrap();
        assert!(!some.exact);
    }

    #[test]
    fn pagerank_symmetric_cases() {
        let pr = pagerank(&path(2), &PageRankParams::default()).unwrap();
        assert!(pr.measure.values.values().all(|&p| (p - 0.5).abs() < 1e-12));
        let pr = pagerank(&complete(4), &PageRankParams::default()).unwrap();
        assert!(pr.measure.values.values().all(|&p| (p - 0.25).abs() < 1e-12));
        assert!(pr.converged);
    }

    #[test]
    fn pagerank_isolated_nodes_get_teleport_mass() {
        let mut g = path(2);
        add_nodes(&mut g, 2);
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        let sum: f64 = pr.measure.values.values().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(pr.measure.get(NodeId(2)) > 0.0);
        assert!(pr.measure.get(NodeId(0)) > pr.measure.get(NodeId(2)));
    }

    #[test]
    fn pagerank_flags_non_convergence() {
        let params = PageRankParams {
            max_iters: 2,
            tol: 1e-15,
            ..Default::default()
        };
        let pr = pagerank(&star(5), &params).unwrap();
        assert!(!pr.converged);
        assert!(!pr.measure.exact);
        assert_eq!(pr.iterations, 2);
        assert!(pagerank(&star(5), &PageRankParams { damping: 1.0, ..Default::default() }).is_err());
    }
}
