//! Connected components by union-find; supplies the order parameter for
//! the percolation experiments.

use crate::error::{Error, Result};
use crate::rgg::Graph;
use crate::scalar::Real;

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let root = self.find(x);
        self.size[root]
    }

    pub fn component_count(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&i| self.find(i) == i)
            .count()
    }
}

/// Partition of the node set into connected components.
///
/// Labels are dense ids in order of first appearance, so the labeling is
/// deterministic for a given graph.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    label: Vec<usize>,
    sizes: Vec<usize>,
    largest_size: usize,
}

impl ComponentLabeling {
    pub fn label_of(&self, node: usize) -> usize {
        self.label[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.label
    }

    /// Node count per label id.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest_size(&self) -> usize {
        self.largest_size
    }

    pub fn size_of_component_containing(&self, node: usize) -> usize {
        self.sizes[self.label[node]]
    }
}

/// Label connected components of `graph`.
pub fn connected_components<F: Real>(graph: &Graph<F>) -> ComponentLabeling {
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for &j in graph.neighbors(i) {
            if j > i {
                uf.union(i, j);
            }
        }
    }
    labeling_from(&mut uf, n)
}

/// Dense labeling out of an arbitrary union-find state.
pub fn labeling_from(uf: &mut UnionFind, n: usize) -> ComponentLabeling {
    let mut label = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut next = 0usize;
    let mut root_label = vec![usize::MAX; n];
    for (node, slot) in label.iter_mut().enumerate() {
        let root = uf.find(node);
        if root_label[root] == usize::MAX {
            root_label[root] = next;
            sizes.push(0);
            next += 1;
        }
        *slot = root_label[root];
        sizes[root_label[root]] += 1;
    }
    let largest_size = sizes.iter().copied().max().unwrap_or(0);
    ComponentLabeling {
        label,
        sizes,
        largest_size,
    }
}

/// Largest-component fraction, `largest_size / n`.
pub fn largest_component_fraction<F: Real>(labeling: &ComponentLabeling, n: usize) -> Result<F> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "fraction undefined for zero nodes".into(),
        ));
    }
    Ok(F::of_usize(labeling.largest_size()) / F::of_usize(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, TorusBox};
    use crate::rgg::{build_graph, sample_poisson_points, PointSet};
    use crate::rng::stream_rng;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn path_graph(n: usize, spacing: f64) -> Graph<f64> {
        let bbox = TorusBox::new(2, (n as f64 + 2.0) * spacing.max(1.0)).unwrap();
        let points = (0..n)
            .map(|i| Point::new(vec![i as f64 * spacing, 0.0]))
            .collect();
        build_graph(&PointSet { bbox, points }, 1.0).unwrap()
    }

    /// BFS oracle partition, independent of the union-find path.
    fn bfs_partition(graph: &Graph<f64>) -> Vec<usize> {
        let n = graph.node_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0usize;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let mut queue = std::collections::VecDeque::from([start]);
            label[start] = next;
            while let Some(u) = queue.pop_front() {
                for &v in graph.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    fn partitions_equal(a: &[usize], b: &[usize]) -> bool {
        // Same partition up to relabeling.
        let mut map_ab = std::collections::HashMap::new();
        let mut map_ba = std::collections::HashMap::new();
        a.iter().zip(b).all(|(&x, &y)| {
            *map_ab.entry(x).or_insert(y) == y && *map_ba.entry(y).or_insert(x) == x
        })
    }

    #[test]
    fn path_and_split_components() {
        let g = path_graph(5, 1.0);
        let labeling = connected_components(&g);
        assert_eq!(labeling.component_count(), 1);
        assert_eq!(labeling.largest_size(), 5);

        // Two far-apart adjacent pairs.
        let bbox = TorusBox::new(2, 20.0).unwrap();
        let points = vec![
            Point::new(vec![1.0, 1.0]),
            Point::new(vec![1.5, 1.0]),
            Point::new(vec![10.0, 10.0]),
            Point::new(vec![10.5, 10.0]),
        ];
        let g = build_graph(&PointSet { bbox, points }, 1.0).unwrap();
        let labeling = connected_components(&g);
        assert_eq!(labeling.component_count(), 2);
        assert_eq!(labeling.sizes(), &[2, 2]);
    }

    #[test]
    fn matches_bfs_oracle_on_random_graphs() {
        for trial in 0..100u64 {
            let mut rng = stream_rng(50, trial);
            let bbox = TorusBox::new(2, 14.0).unwrap();
            let density = 0.3 + 2.0 * (trial % 10) as f64 / 10.0;
            let mut ps = sample_poisson_points(density, &bbox, &mut rng).unwrap();
            ps.points.truncate(500);
            let g = build_graph(&ps, 1.0).unwrap();
            let labeling = connected_components(&g);
            let oracle = bfs_partition(&g);
            assert!(
                partitions_equal(labeling.labels(), &oracle),
                "partition mismatch at trial {trial}"
            );
            assert_eq!(labeling.sizes().iter().sum::<usize>(), g.node_count());
        }
    }

    #[test]
    fn partition_independent_of_edge_order() {
        let mut rng = stream_rng(51, 0);
        let bbox = TorusBox::new(2, 12.0).unwrap();
        let ps = sample_poisson_points(1.2, &bbox, &mut rng).unwrap();
        let g = build_graph(&ps, 1.0).unwrap();
        let n = g.node_count();
        let mut edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| {
                g.neighbors(i)
                    .iter()
                    .filter(move |&&j| j > i)
                    .map(move |&j| (i, j))
            })
            .collect();
        let reference = connected_components(&g);
        for _ in 0..5 {
            edges.shuffle(&mut rng);
            let mut uf = UnionFind::new(n);
            for &(i, j) in &edges {
                uf.union(i, j);
            }
            let labeling = labeling_from(&mut uf, n);
            assert!(partitions_equal(labeling.labels(), reference.labels()));
        }
    }

    #[test]
    fn edge_addition_never_splits_components() {
        let mut rng = stream_rng(52, 0);
        let n = 120;
        let mut uf = UnionFind::new(n);
        let mut prev = n;
        for _ in 0..300 {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                uf.union(a, b);
            }
            let count = uf.component_count();
            assert!(
                count <= prev,
                "component count increased: {prev} -> {count}"
            );
            prev = count;
        }
    }

    #[test]
    fn deep_supercritical_fraction_is_large() {
        // λ=3.0 on a side-32 torus sits far above the simulated threshold;
        // the largest-component fraction exceeds 0.9 in ≥ 95% of trials.
        let bbox = TorusBox::new(2, 32.0).unwrap();
        let trials = 100;
        let mut hits = 0;
        for k in 0..trials {
            let mut rng = stream_rng(53, k as u64);
            let ps = sample_poisson_points(3.0, &bbox, &mut rng).unwrap();
            let g = build_graph(&ps, 1.0).unwrap();
            let labeling = connected_components(&g);
            let fraction = largest_component_fraction::<f64>(&labeling, g.node_count()).unwrap();
            if fraction > 0.9 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "only {hits}/{trials} trials above 0.9");
    }

    #[test]
    fn fraction_edges() {
        let g = path_graph(5, 1.0);
        let labeling = connected_components(&g);
        assert_eq!(
            largest_component_fraction::<f64>(&labeling, 5).unwrap(),
            1.0
        );
        let isolated = path_graph(4, 3.0); // spacing 3 > radius 1: all isolated
        let labeling = connected_components(&isolated);
        assert_eq!(
            largest_component_fraction::<f64>(&labeling, 4).unwrap(),
            0.25
        );
        assert!(largest_component_fraction::<f64>(&labeling, 0).is_err());
    }
}
