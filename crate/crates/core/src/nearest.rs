//! Static k-d tree answering nearest-point queries in the sup metric.

const LEAF: usize = 8;

enum Node {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

pub struct SupTree {
    dim: usize,
    coords: Vec<f64>,
    nodes: Vec<Node>,
    /// Bounding box of each node: `dim` minima then `dim` maxima.
    boxes: Vec<f64>,
}

impl SupTree {
    #[cfg(test)]
    /// Builds a tree over `points`, all of dimension `dim`.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Self {
        SupTree::from_flat(dim, points.iter().flatten().copied().collect())
    }

    /// Builds a tree over points stored consecutively in `flat`.
    pub fn from_flat(dim: usize, flat: Vec<f64>) -> Self {
        let n = flat.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::new();
        build(dim, &flat, &mut order, 0, n, &mut nodes);
        let mut coords = Vec::with_capacity(flat.len());
        for &i in &order {
            coords.extend_from_slice(&flat[i * dim..(i + 1) * dim]);
        }
        let mut boxes = vec![0.0; nodes.len() * 2 * dim];
        if !nodes.is_empty() {
            fill_boxes(dim, &coords, &nodes, 0, &mut boxes);
        }
        SupTree { dim, coords, nodes, boxes }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim.max(1)
    }

    /// Sup distance from `q` to the nearest stored point (`inf` when empty).
    pub fn distance(&self, q: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        if !self.nodes.is_empty() {
            self.search(0, q, &mut best);
        }
        best
    }

    fn box_distance(&self, node: usize, q: &[f64]) -> f64 {
        let b = &self.boxes[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let mut d = 0.0f64;
        for a in 0..self.dim {
            d = d.max(b[a] - q[a]).max(q[a] - b[self.dim + a]);
        }
        d
    }

    fn search(&self, node: usize, q: &[f64], best: &mut f64) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for p in self.coords[start * self.dim..end * self.dim].chunks_exact(self.dim) {
                    let mut d = 0.0f64;
                    for (a, b) in p.iter().zip(q) {
                        d = d.max((a - b).abs());
                        if d >= *best {
                            break;
                        }
                    }
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Split { left, right } => {
                let (dl, dr) = (self.box_distance(left, q), self.box_distance(right, q));
                let ((near, dn), (far, df)) = if dl <= dr { ((left, dl), (right, dr)) } else { ((right, dr), (left, dl)) };
                if dn < *best {
                    self.search(near, q, best);
                }
                if df < *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build(dim: usize, flat: &[f64], order: &mut [usize], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if end - start <= LEAF {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let slice = &mut order[start..end];
    let axis = (0..dim)
        .map(|a| {
            let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(flat[i * dim + a]), hi.max(flat[i * dim + a]))
            });
            (a, hi - lo)
        })
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map_or(0, |(a, _)| a);
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&i, &j| flat[i * dim + axis].total_cmp(&flat[j * dim + axis]));
    nodes.push(Node::Leaf { start, end });
    let left = build(dim, flat, order, start, start + mid, nodes);
    let right = build(dim, flat, order, start + mid, end, nodes);
    nodes[id] = Node::Split { left, right };
    id
}

fn fill_boxes(dim: usize, coords: &[f64], nodes: &[Node], node: usize, boxes: &mut [f64]) {
    let mut b = vec![f64::INFINITY; dim];
    b.extend(std::iter::repeat(f64::NEG_INFINITY).take(dim));
    match nodes[node] {
        Node::Leaf { start, end } => {
            for p in coords[start * dim..end * dim].chunks_exact(dim) {
                for a in 0..dim {
                    b[a] = b[a].min(p[a]);
                    b[dim + a] = b[dim + a].max(p[a]);
                }
            }
        }
        Node::Split { left, right } => {
            fill_boxes(dim, coords, nodes, left, boxes);
            fill_boxes(dim, coords, nodes, right, boxes);
            for child in [left, right] {
                let c = &boxes[child * 2 * dim..(child + 1) * 2 * dim];
                for a in 0..dim {
                    b[a] = b[a].min(c[a]);
                    b[dim + a] = b[dim + a].max(c[dim + a]);
                }
            }
        }
    }
    boxes[node * 2 * dim..(node + 1) * 2 * dim].copy_from_slice(&b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Vec<f64>> = (0..2000).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();
        let tree = SupTree::new(4, &pts);
        for _ in 0..300 {
            let q: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.2..1.2)).collect();
            let brute = pts
                .iter()
                .map(|p| p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(tree.distance(&q), brute);
        }
        assert_eq!(tree.distance(&pts[17]), 0.0);
    }
}
