//! The active-saturated exploration process, node diameters with respect
//! to subgraphs, the Chernoff upper-tail utility, and the empirical
//! stochastic-dominance check.
//!
//! One exploration step moves a chosen active node to the saturated set
//! and activates its not-yet-seen neighbors; `Y_i` counts the new
//! activations. The process visits exactly the component of the start
//! node.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rgg::Graph;
use crate::rng::stream_rng;
use crate::scalar::Real;

/// How the next active node is chosen. The process definition leaves the
/// choice free; FIFO yields breadth-first layers, the seeded-random
/// policy exercises arbitrary orders reproducibly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    Fifo,
    Random { seed: u64 },
}

/// One step of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    /// Node moved from active to saturated this step.
    pub chosen: usize,
    /// `Y_i`: neighbors newly moved into the active set.
    pub newly_active: usize,
    /// Active-set size after the step.
    pub active_size: usize,
    /// Saturated-set size after the step (equals the step count).
    pub saturated_size: usize,
}

/// Full history of one active-saturated run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplorationTrace {
    pub start: usize,
    pub steps: Vec<TraceStep>,
    pub terminated: bool,
}

impl ExplorationTrace {
    /// Total nodes explored, `|Γ_v|`; one node saturates per step.
    pub fn explored(&self) -> usize {
        self.steps.len()
    }

    /// The `Y_i` sequence.
    pub fn y_values(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.newly_active)
    }

    /// Saturated nodes in saturation order.
    pub fn saturated_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.chosen)
    }
}

/// Outcome of the empirical upper-tail dominance comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DominanceReport<F> {
    pub sample_count_x: usize,
    pub sample_count_y: usize,
    /// `max_z [ P̂{X ≥ z} − P̂{Y ≥ z} ]` over the pooled support.
    pub max_violation: F,
    pub tolerance: F,
    pub passes: bool,
}

/// Diagnostics from the chain-depth condition of a run: the first step
/// index after which every active node has diameter ≥ t−2 with respect to
/// the saturated set, and how many nodes had been seen by then.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDiagnostics {
    pub chain_ready_step: usize,
    pub nodes_seen_at_ready: usize,
}

/// Run the active-saturated process from `start` until the active set
/// empties; the saturated set then equals the component of `start`.
pub fn active_saturated_run<F: Real>(
    graph: &Graph<F>,
    start: usize,
    policy: SelectionPolicy,
) -> Result<ExplorationTrace> {
    let n = graph.node_count();
    if start >= n {
        return Err(Error::NodeNotInSet { node: start });
    }
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut active: VecDeque<usize> = VecDeque::from([start]);
    let mut rng = match policy {
        SelectionPolicy::Fifo => None,
        SelectionPolicy::Random { seed } => Some(stream_rng(seed, 0)),
    };
    let mut steps = Vec::new();
    while !active.is_empty() {
        let chosen = match rng.as_mut() {
            None => active.pop_front().expect("nonempty"),
            Some(rng) => {
                let idx = rng.gen_range(0..active.len());
                active.swap_remove_back(idx).expect("nonempty")
            }
        };
        let mut newly_active = 0usize;
        for &w in graph.neighbors(chosen) {
            if !seen[w] {
                seen[w] = true;
                active.push_back(w);
                newly_active += 1;
            }
        }
        steps.push(TraceStep {
            chosen,
            newly_active,
            active_size: active.len(),
            saturated_size: steps.len() + 1,
        });
    }
    Ok(ExplorationTrace {
        start,
        steps,
        terminated: true,
    })
}

/// Hop diameter of `u` with respect to the subgraph induced on
/// `node_subset`: the maximum shortest-path distance from `u` to any
/// subset node, or `None` when some subset node is unreachable.
pub fn diameter_wrt<F: Real>(
    u: usize,
    node_subset: &[usize],
    graph: &Graph<F>,
) -> Result<Option<usize>> {
    let n = graph.node_count();
    let mut member = vec![false; n];
    let mut subset_size = 0usize;
    for &v in node_subset {
        if v >= n {
            return Err(Error::NodeNotInSet { node: v });
        }
        if !member[v] {
            member[v] = true;
            subset_size += 1;
        }
    }
    if u >= n || !member[u] {
        return Err(Error::NodeNotInSet { node: u });
    }
    let mut dist = vec![usize::MAX; n];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    let mut reached = 1usize;
    let mut max_dist = 0usize;
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if member[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                max_dist = max_dist.max(dist[w]);
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    Ok(if reached == subset_size {
        Some(max_dist)
    } else {
        None
    })
}

/// Chernoff upper tail `Pr{Z ≥ E[Z] + δ} ≤ exp(−δ²/(2 E[Z] + 2δ/3))`.
pub fn chernoff_upper_tail<F: Real>(mean: F, delta: F) -> Result<F> {
    if !(mean >= F::zero()) || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean must be nonnegative, got {mean}"
        )));
    }
    if !(delta > F::zero()) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let two = F::of(2.0);
    Ok((-(delta * delta) / (two * mean + two * delta / F::of(3.0))).exp())
}

/// Empirical upper-tail dominance: passes when
/// `P̂{X ≥ z} ≤ P̂{Y ≥ z} + tolerance` for every z in the pooled support.
pub fn dominance_check<F: Real>(
    samples_x: &[F],
    samples_y: &[F],
    tolerance: F,
) -> Result<DominanceReport<F>> {
    if samples_x.is_empty() || samples_y.is_empty() {
        return Err(Error::InvalidParameter(
            "dominance check needs nonempty samples on both sides".into(),
        ));
    }
    if !(tolerance >= F::zero()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be nonnegative, got {tolerance}"
        )));
    }
    let mut xs = samples_x.to_vec();
    let mut ys = samples_y.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    ys.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));

    // P̂{V ≥ z} from an ascending-sorted sample.
    let tail = |sorted: &[F], z: F| -> F {
        let idx = sorted.partition_point(|&v| v < z);
        F::of_usize(sorted.len() - idx) / F::of_usize(sorted.len())
    };

    // The tails only change at sample values, so the supremum of the
    // difference is attained on the pooled support.
    let mut max_violation = F::of(-1.0);
    let mut check = |z: F| {
        let diff = tail(&xs, z) - tail(&ys, z);
        if diff > max_violation {
            max_violation = diff;
        }
    };
    let mut last: Option<F> = None;
    for &z in xs.iter().chain(ys.iter()) {
        if last != Some(z) {
            check(z);
            last = Some(z);
        }
    }
    Ok(DominanceReport {
        sample_count_x: xs.len(),
        sample_count_y: ys.len(),
        max_violation,
        tolerance,
        passes: max_violation <= tolerance,
    })
}

/// Re-run the process tracking active sets to locate the first step after
/// which every active node satisfies the depth condition
/// `diam(u, S_j ∪ u) ≥ t − 2`. Reported for inspection only; cost is
/// quadratic in the component size.
pub fn chain_depth_diagnostics<F: Real>(
    graph: &Graph<F>,
    start: usize,
    policy: SelectionPolicy,
    t: usize,
) -> Result<TraceDiagnostics> {
    if t < 3 {
        return Err(Error::InvalidParameter(format!(
            "chain order t must be at least 3, got {t}"
        )));
    }
    let trace = active_saturated_run(graph, start, policy)?;
    let need = t - 2;

    // Reconstruct (A_j, S_j) states from the saturation order.
    let mut saturated: Vec<usize> = Vec::new();
    let mut active: Vec<usize> = vec![start];
    let mut seen = vec![false; graph.node_count()];
    seen[start] = true;
    let mut last_violation: Option<usize> = None; // state index j
    let mut seen_count_at: Vec<usize> = vec![1];

    for (j, step) in trace.steps.iter().enumerate() {
        // state j: check every active node before step j+1 executes
        let mut scope: Vec<usize> = saturated.clone();
        scope.push(0); // placeholder; replaced per active node below
        for &u in &active {
            *scope.last_mut().expect("nonempty") = u;
            let diam = diameter_wrt(u, &scope, graph)?;
            let satisfied = match diam {
                None => true, // unreachable counts as infinite depth
                Some(d) => d >= need,
            };
            if !satisfied {
                last_violation = Some(j);
                break;
            }
        }
        // apply step j+1
        active.retain(|&v| v != step.chosen);
        saturated.push(step.chosen);
        for &w in graph.neighbors(step.chosen) {
            if !seen[w] {
                seen[w] = true;
                active.push(w);
            }
        }
        seen_count_at.push(saturated.len() + active.len());
    }

    let chain_ready_step = match last_violation {
        None => 0,
        Some(j) => j + 1,
    };
    Ok(TraceDiagnostics {
        chain_ready_step,
        nodes_seen_at_ready: seen_count_at[chain_ready_step.min(seen_count_at.len() - 1)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::connected_components;
    use crate::geometry::{torus_distance, Point, TorusBox};
    use crate::rgg::{build_graph, sample_poisson_points, PointSet};
    use rand_distr::{Binomial, Distribution};

    fn path_graph(n: usize) -> (Graph<f64>, PointSet<f64>) {
        let bbox = TorusBox::new(2, (n as f64 + 4.0).max(8.0)).unwrap();
        let points: Vec<Point<f64>> = (0..n).map(|i| Point::new(vec![i as f64, 0.0])).collect();
        let ps = PointSet { bbox, points };
        (build_graph(&ps, 1.0).unwrap(), ps)
    }

    #[test]
    fn isolated_node_run() {
        let bbox = TorusBox::new(2, 10.0).unwrap();
        let ps = PointSet {
            bbox,
            points: vec![Point::new(vec![1.0, 1.0])],
        };
        let g = build_graph(&ps, 1.0).unwrap();
        let trace = active_saturated_run(&g, 0, SelectionPolicy::Fifo).unwrap();
        assert_eq!(trace.explored(), 1);
        assert_eq!(trace.steps[0].newly_active, 0);
        assert!(trace.terminated);
    }

    #[test]
    fn path_graph_hand_trace() {
        let (g, _) = path_graph(3);
        let trace = active_saturated_run(&g, 0, SelectionPolicy::Fifo).unwrap();
        let ys: Vec<usize> = trace.y_values().collect();
        assert_eq!(ys, vec![1, 1, 0]);
        assert_eq!(trace.explored(), 3);
    }

    #[test]
    fn trace_conservation_and_component_equality() {
        for trial in 0..30u64 {
            let mut rng = stream_rng(70, trial);
            let bbox = TorusBox::new(2, 16.0).unwrap();
            let mut ps = sample_poisson_points(1.0, &bbox, &mut rng).unwrap();
            ps.points.truncate(500);
            if ps.is_empty() {
                continue;
            }
            let g = build_graph(&ps, 1.0).unwrap();
            let labeling = connected_components(&g);
            let start = (trial as usize * 7) % g.node_count();
            for policy in [
                SelectionPolicy::Fifo,
                SelectionPolicy::Random { seed: trial },
            ] {
                let trace = active_saturated_run(&g, start, policy).unwrap();
                // |A_i| + |S_i| = 1 + Σ Y_j at every step
                let mut y_sum = 0usize;
                for step in &trace.steps {
                    y_sum += step.newly_active;
                    assert_eq!(step.active_size + step.saturated_size, 1 + y_sum);
                }
                // explored set equals the union-find component of start
                assert_eq!(
                    trace.explored(),
                    labeling.size_of_component_containing(start)
                );
                let label = labeling.label_of(start);
                assert!(trace
                    .saturated_order()
                    .all(|v| labeling.label_of(v) == label));
            }
        }
    }

    #[test]
    fn diameter_basics() {
        let (g, _) = path_graph(6);
        assert_eq!(diameter_wrt(2, &[2], &g).unwrap(), Some(0));
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(diameter_wrt(0, &all, &g).unwrap(), Some(5));
        assert_eq!(diameter_wrt(2, &all, &g).unwrap(), Some(3));
        // Disconnected induced subgraph: {0, 2} skips the middle node.
        assert_eq!(diameter_wrt(0, &[0, 2], &g).unwrap(), None);
        assert!(diameter_wrt(1, &[0, 2], &g).is_err());
        assert!(diameter_wrt(99, &[99], &g).is_err());
    }

    #[test]
    fn diameter_bounds_euclidean_distance_along_runs() {
        // If diam(u, S∪u) ≤ c in hops, every subset node lies within
        // c·radius in torus distance.
        let mut rng = stream_rng(71, 0);
        let bbox = TorusBox::new(2, 20.0).unwrap();
        let ps = sample_poisson_points(1.2, &bbox, &mut rng).unwrap();
        let g = build_graph(&ps, 1.0).unwrap();
        let trace = active_saturated_run(&g, 0, SelectionPolicy::Fifo).unwrap();
        let mut s: Vec<usize> = Vec::new();
        for step in trace.steps.iter().take(40) {
            s.push(step.chosen);
            let u = step.chosen;
            if let Some(c) = diameter_wrt(u, &s, &g).unwrap() {
                for &v in &s {
                    let dist = torus_distance(&ps.points[u], &ps.points[v], &bbox).unwrap();
                    assert!(
                        dist <= c as f64 * g.radius() + 1e-9,
                        "hop diameter {c} but distance {dist}"
                    );
                }
            }
        }
    }

    #[test]
    fn chernoff_values_and_monotonicity() {
        let v = chernoff_upper_tail(0.0, 3.0).unwrap();
        assert!((v - (-4.5f64).exp()).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for delta in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let b = chernoff_upper_tail(5.0, delta).unwrap();
            assert!(b < prev, "bound not decreasing at delta {delta}");
            prev = b;
        }
        assert!(chernoff_upper_tail(-1.0, 1.0).is_err());
        assert!(chernoff_upper_tail(1.0, 0.0).is_err());
    }

    #[test]
    fn chernoff_dominates_empirical_binomial_tails() {
        // Grid from the tail contract, 10^5 samples, 3σ slack.
        let samples = 100_000usize;
        for &(n, p) in &[(100u64, 0.01f64), (100, 0.1), (1000, 0.01), (1000, 0.1)] {
            let mut rng = stream_rng(72, n ^ ((p * 1000.0) as u64));
            let dist = Binomial::new(n, p).unwrap();
            let draws: Vec<u64> = (0..samples).map(|_| dist.sample(&mut rng)).collect();
            let mean = n as f64 * p;
            for &delta in &[3.0f64, 10.0] {
                let bound = chernoff_upper_tail(mean, delta).unwrap();
                let emp = draws.iter().filter(|&&z| z as f64 >= mean + delta).count() as f64
                    / samples as f64;
                let slack = 3.0 * (emp * (1.0 - emp) / samples as f64).sqrt();
                assert!(
                    emp <= bound + slack,
                    "n={n} p={p} δ={delta}: empirical {emp} exceeds bound {bound} + {slack}"
                );
            }
        }
    }

    #[test]
    fn dominance_identical_lists() {
        let xs = vec![1.0f64, 2.0, 2.0, 5.0];
        let report = dominance_check(&xs, &xs, 0.0).unwrap();
        assert!(report.max_violation <= 0.0);
        assert!(report.passes);
        assert!(dominance_check::<f64>(&[], &xs, 0.0).is_err());
    }

    #[test]
    fn dominance_on_binomial_pair_and_antisymmetry() {
        let n = 100_000usize;
        let mut rng = stream_rng(73, 0);
        let lo = Binomial::new(10, 0.3).unwrap();
        let hi = Binomial::new(10, 0.5).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| lo.sample(&mut rng) as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| hi.sample(&mut rng) as f64).collect();
        let report = dominance_check(&xs, &ys, 0.01).unwrap();
        assert!(report.passes, "violation {}", report.max_violation);
        let swapped = dominance_check(&ys, &xs, 0.01).unwrap();
        assert!(
            !swapped.passes,
            "swap should fail: {}",
            swapped.max_violation
        );
    }

    #[test]
    fn diagnostics_on_path() {
        // Path from an endpoint, FIFO: after the first step every active
        // node is adjacent to a saturated node, so t=3 is ready at once.
        let (g, _) = path_graph(6);
        let diag = chain_depth_diagnostics(&g, 0, SelectionPolicy::Fifo, 3).unwrap();
        assert!(diag.chain_ready_step <= 1);
        let deep = chain_depth_diagnostics(&g, 0, SelectionPolicy::Fifo, 5).unwrap();
        assert!(deep.chain_ready_step >= diag.chain_ready_step);
        assert!(deep.nodes_seen_at_ready >= 1);
    }
}
