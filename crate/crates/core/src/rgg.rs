//! Poisson point processes on the torus and random geometric graph
//! construction with fixed-radius neighbor search.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Point, TorusBox};
use crate::scalar::Real;

/// A realization of the point process inside a torus box.
#[derive(Debug, Clone)]
pub struct PointSet<F> {
    pub bbox: TorusBox<F>,
    pub points: Vec<Point<F>>,
}

impl<F: Real> PointSet<F> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Immutable undirected graph: nodes indexed by insertion order, sorted
/// neighbor lists, edges exactly the pairs at torus distance ≤ radius.
#[derive(Debug, Clone)]
pub struct Graph<F> {
    adjacency: Vec<Vec<usize>>,
    radius: F,
    bbox: TorusBox<F>,
}

impl<F: Real> Graph<F> {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    pub fn bbox(&self) -> &TorusBox<F> {
        &self.bbox
    }

    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }
}

/// Degree statistics of one sampled graph against the Poisson limit law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeSummary<F> {
    pub mean_degree: F,
    /// Degree → observed frequency; keys ascending, frequencies sum to 1.
    pub empirical_pmf: Vec<(usize, F)>,
    /// Total-variation distance to Poisson(λ V^(d) r^d).
    pub tv_distance_to_poisson: F,
}

/// Sample a homogeneous Poisson process: N ~ Poisson(density · L^d) points
/// placed i.i.d. uniformly in the box.
pub fn sample_poisson_points<F: Real, R: Rng + ?Sized>(
    density: F,
    bbox: &TorusBox<F>,
    rng: &mut R,
) -> Result<PointSet<F>> {
    if !(density >= F::zero()) {
        return Err(Error::InvalidParameter(format!(
            "density must be nonnegative, got {density}"
        )));
    }
    let mean = (density * bbox.volume())
        .to_f64()
        .expect("finite Poisson mean");
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?
            .sample(rng) as usize
    } else {
        0
    };
    let points = (0..count).map(|_| bbox.sample_uniform(rng)).collect();
    Ok(PointSet {
        bbox: *bbox,
        points,
    })
}

/// Cell grid for fixed-radius search; cell side ≥ radius so candidate
/// pairs all live in the 3^d surrounding cells.
struct CellGrid {
    cells_per_side: usize,
    cells: Vec<Vec<usize>>,
    dim: usize,
}

impl CellGrid {
    fn build<F: Real>(points: &[Point<F>], bbox: &TorusBox<F>, radius: F) -> Self {
        let n = points.len().max(1);
        let d = bbox.dim();
        let m_fit = (bbox.side() / radius)
            .to_f64()
            .map(|x| x.floor() as usize)
            .unwrap_or(1)
            .max(1);
        // Keep total cell count O(n) even for tiny radii; larger cells only
        // add candidates, never miss pairs.
        let m_cap = ((4.0 * n as f64).powf(1.0 / d as f64).floor() as usize).max(1);
        let m = m_fit.min(m_cap);
        let side = bbox.side() / F::of_usize(m);
        let mut cells = vec![Vec::new(); m.pow(d as u32)];
        for (idx, p) in points.iter().enumerate() {
            cells[Self::cell_of(p, side, m)].push(idx);
        }
        CellGrid {
            cells_per_side: m,
            cells,
            dim: d,
        }
    }

    fn cell_of<F: Real>(p: &Point<F>, side: F, m: usize) -> usize {
        let mut idx = 0usize;
        for &c in p.coords().iter().rev() {
            let k = (c / side)
                .to_f64()
                .map(|x| x as usize)
                .unwrap_or(0)
                .min(m - 1);
            idx = idx * m + k;
        }
        idx
    }

    /// Visit every distinct cell in the 3^d periodic neighborhood of `cell`.
    fn for_each_neighbor_cell(&self, cell: usize, mut visit: impl FnMut(&[usize])) {
        let m = self.cells_per_side;
        let d = self.dim;
        let mut coords = vec![0usize; d];
        let mut rest = cell;
        for c in coords.iter_mut() {
            *c = rest % m;
            rest /= m;
        }
        let mut seen = Vec::with_capacity(3usize.pow(d as u32));
        let combos = 3usize.pow(d as u32);
        for mut code in 0..combos {
            let mut idx = 0usize;
            for k in (0..d).rev() {
                let offset = code % 3;
                code /= 3;
                // careful: consume digits in fixed order per k
                let shifted = (coords[k] + m + offset - 1) % m;
                idx = idx * m + shifted;
            }
            if !seen.contains(&idx) {
                seen.push(idx);
                visit(&self.cells[idx]);
            }
        }
    }
}

/// Build the random geometric graph on `points` with the given radius.
///
/// Uses a cell list with cell side ≥ radius, so adjacency matches the
/// all-pairs torus-distance rule exactly at expected O(n) cost for fixed
/// density. Ties at exactly `radius` count as adjacent.
pub fn build_graph<F: Real>(points: &PointSet<F>, radius: F) -> Result<Graph<F>> {
    let bbox = points.bbox;
    if !(radius > F::zero()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if radius > bbox.side() / F::of(2.0) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} exceeds half the torus side {}; wrap adjacency would be ambiguous",
            bbox.side()
        )));
    }
    let n = points.len();
    let mut adjacency = vec![Vec::new(); n];
    if n > 1 {
        let grid = CellGrid::build(&points.points, &bbox, radius);
        let r_sq = radius * radius;
        for i in 0..n {
            let cell = CellGrid::cell_of(
                &points.points[i],
                bbox.side() / F::of_usize(grid.cells_per_side),
                grid.cells_per_side,
            );
            grid.for_each_neighbor_cell(cell, |members| {
                for &j in members {
                    if j > i
                        && bbox.torus_distance_sq_unchecked(&points.points[i], &points.points[j])
                            <= r_sq
                    {
                        adjacency[i].push(j);
                        adjacency[j].push(i);
                    }
                }
            });
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
    }
    Ok(Graph {
        adjacency,
        radius,
        bbox,
    })
}

/// Link probability `λ V^(d) r^d / n` between two given nodes.
pub fn expected_link_probability<F: Real>(n: usize, density: F, radius: F, d: usize) -> Result<F> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two nodes, got {n}"
        )));
    }
    if !(density > F::zero()) || !(radius > F::zero()) {
        return Err(Error::InvalidParameter(
            "density and radius must be positive".into(),
        ));
    }
    let v = unit_ball_volume::<F>(d)?;
    Ok(density * v * radius.powi(d as i32) / F::of_usize(n))
}

/// Empirical degree statistics and total-variation distance to the
/// limiting Poisson(λ V^(d) r^d) law.
pub fn degree_summary<F: Real>(graph: &Graph<F>, density: F) -> Result<DegreeSummary<F>> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut counts: Vec<(usize, usize)> = Vec::new();
    let mut total_degree = 0usize;
    for node in 0..n {
        let k = graph.degree(node);
        total_degree += k;
        match counts.binary_search_by_key(&k, |&(deg, _)| deg) {
            Ok(pos) => counts[pos].1 += 1,
            Err(pos) => counts.insert(pos, (k, 1)),
        }
    }
    let n_f = F::of_usize(n);
    let mean_degree = F::of_usize(total_degree) / n_f;
    let empirical_pmf: Vec<(usize, F)> = counts
        .iter()
        .map(|&(k, c)| (k, F::of_usize(c) / n_f))
        .collect();

    let d = graph.bbox().dim();
    let mu = (density * unit_ball_volume::<F>(d)? * graph.radius().powi(d as i32))
        .to_f64()
        .expect("finite mean degree");
    let max_degree = counts.last().map(|&(k, _)| k).unwrap_or(0);
    // Poisson pmf by upward recurrence; tail mass beyond max_degree counts
    // fully toward the distance (empirical mass there is zero).
    let mut q = (-mu).exp();
    let mut acc = 0.0f64;
    let mut covered = 0.0f64;
    for k in 0..=max_degree {
        let p_hat = empirical_pmf
            .iter()
            .find(|&&(deg, _)| deg == k)
            .map(|&(_, f)| f.to_f64().unwrap())
            .unwrap_or(0.0);
        acc += (p_hat - q).abs();
        covered += q;
        q *= mu / (k + 1) as f64;
    }
    let tv = 0.5 * (acc + (1.0 - covered).max(0.0));
    Ok(DegreeSummary {
        mean_degree,
        empirical_pmf,
        tv_distance_to_poisson: F::of(tv),
    })
}

/// Write the reproducibility dump: header `n d L r`, then one `i j` line
/// per edge with i < j.
pub fn write_edge_list<F: Real, W: Write>(graph: &Graph<F>, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{} {} {} {}",
        graph.node_count(),
        graph.bbox().dim(),
        graph.bbox().side(),
        graph.radius()
    )?;
    for i in 0..graph.node_count() {
        for &j in graph.neighbors(i) {
            if j > i {
                writeln!(out, "{i} {j}")?;
            }
        }
    }
    Ok(())
}

/// Read a graph back from the edge-list format written by
/// [`write_edge_list`].
pub fn read_edge_list<F: Real, R: BufRead>(input: R) -> Result<Graph<F>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!(
            "expected header 'n d L r', got '{header}'"
        )));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad node count '{}'", fields[0])))?;
    let d: usize = fields[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension '{}'", fields[1])))?;
    let side: f64 = fields[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad side '{}'", fields[2])))?;
    let radius: f64 = fields[3]
        .parse()
        .map_err(|_| Error::Parse(format!("bad radius '{}'", fields[3])))?;
    let mut adjacency = vec![Vec::new(); n];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (i, j): (usize, usize) = match (it.next(), it.next()) {
            (Some(a), Some(b)) => (
                a.parse()
                    .map_err(|_| Error::Parse(format!("bad edge line '{line}'")))?,
                b.parse()
                    .map_err(|_| Error::Parse(format!("bad edge line '{line}'")))?,
            ),
            _ => return Err(Error::Parse(format!("bad edge line '{line}'"))),
        };
        if i >= n || j >= n {
            return Err(Error::Parse(format!("edge {i} {j} out of range (n={n})")));
        }
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    Ok(Graph {
        adjacency,
        radius: F::of(radius),
        bbox: TorusBox::new(d, F::of(side))?,
    })
}
