//! k-nearest-neighbour queries over point clouds in `ℝ^d` (kd-tree).

use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 16;

#[derive(Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// A static kd-tree over `points.len() / dim` points stored row-major.
#[derive(Debug)]
pub struct KdTree<'a> {
    dim: usize,
    points: &'a [f64],
    order: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(PartialEq)]
struct Candidate(f64, usize);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [f64], dim: usize) -> Self {
        assert!(dim > 0 && points.len() % dim == 0);
        let count = points.len() / dim;
        let mut tree = Self {
            dim,
            points,
            order: (0..count).collect(),
            nodes: Vec::new(),
        };
        if count > 0 {
            tree.build(0, count);
        }
        tree
    }

    fn coord(&self, i: usize, axis: usize) -> f64 {
        self.points[i * self.dim + axis]
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return self.nodes.len() - 1;
        }
        // Split along the axis of largest spread, at the median.
        let axis = (0..self.dim)
            .map(|a| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| {
                        let x = self.coord(i, a);
                        (lo.min(x), hi.max(x))
                    },
                );
                (hi - lo, a)
            })
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .map(|(_, a)| a)
            .unwrap_or(0);
        let mid = start + (end - start) / 2;
        let (points, dim) = (self.points, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&i, &j| {
            points[i * dim + axis].total_cmp(&points[j * dim + axis])
        });
        let value = self.coord(self.order[mid], axis);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    /// Indices of the `k` nearest points to `query` (excluding `skip`),
    /// nearest first, ties broken by index.
    pub fn nearest(&self, query: &[f64], k: usize, skip: Option<usize>) -> Vec<usize> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        if k > 0 && !self.nodes.is_empty() {
            self.search(0, query, k, skip, &mut heap);
        }
        let mut out = heap.into_vec();
        out.sort();
        out.into_iter().map(|c| c.1).collect()
    }

    fn search(
        &self,
        node: usize,
        query: &[f64],
        k: usize,
        skip: Option<usize>,
        heap: &mut BinaryHeap<Candidate>,
    ) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if Some(i) == skip {
                        continue;
                    }
                    let d: f64 = (0..self.dim)
                        .map(|a| (self.coord(i, a) - query[a]).powi(2))
                        .sum();
                    let cand = Candidate(d, i);
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[axis] - value;
                let (near, far) = if delta < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, k, skip, heap);
                let worst = heap.peek().map(|c| c.0).unwrap_or(f64::INFINITY);
                if heap.len() < k || delta * delta <= worst {
                    self.search(far, query, k, skip, heap);
                }
            }
        }
    }
}
