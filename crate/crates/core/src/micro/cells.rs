//! Cell lists for fixed-radius pair search on a periodic rectangle.

use crate::potential::PeriodicDomain;

/// Particles binned into a grid of cells with side at least `cutoff`.
#[derive(Debug, Clone)]
pub struct CellList {
    nc: [usize; 2],
    /// Particle indices sorted by cell; cell `c` owns `order[start[c]..start[c+1]]`.
    order: Vec<usize>,
    start: Vec<usize>,
}

fn cell_coord(x: f64, half: f64, n: usize) -> usize {
    let c = ((x + half) / (2.0 * half) * n as f64).floor();
    (c.max(0.0) as usize).min(n - 1)
}

impl CellList {
    pub fn build(positions: &[[f64; 2]], dom: &PeriodicDomain, cutoff: f64) -> Self {
        let nc = [
            ((2.0 * dom.l1 / cutoff).floor() as usize).max(1),
            ((2.0 * dom.l2 / cutoff).floor() as usize).max(1),
        ];
        let ncell = nc[0] * nc[1];
        let cell_of: Vec<usize> = positions
            .iter()
            .map(|p| cell_coord(p[0], dom.l1, nc[0]) * nc[1] + cell_coord(p[1], dom.l2, nc[1]))
            .collect();
        let mut start = vec![0usize; ncell + 1];
        for &c in &cell_of {
            start[c + 1] += 1;
        }
        for c in 0..ncell {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut order = vec![0usize; positions.len()];
        for (i, &c) in cell_of.iter().enumerate() {
            order[fill[c]] = i;
            fill[c] += 1;
        }
        Self { nc, order, start }
    }

    fn members(&self, c: usize) -> &[usize] {
        &self.order[self.start[c]..self.start[c + 1]]
    }

    /// Distinct periodic neighbours of a cell, itself included.
    fn neighbours(&self, a: usize, b: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(9);
        for da in [self.nc[0] - 1, 0, 1] {
            for db in [self.nc[1] - 1, 0, 1] {
                let c = (a + da) % self.nc[0] * self.nc[1] + (b + db) % self.nc[1];
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// All pairs `(i, j)`, `i < j`, at minimal-image distance `<= cutoff`,
    /// sorted lexicographically.
    pub fn pairs_within(&self, positions: &[[f64; 2]], dom: &PeriodicDomain, cutoff: f64) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for a in 0..self.nc[0] {
            for b in 0..self.nc[1] {
                let own = self.members(a * self.nc[1] + b);
                if own.is_empty() {
                    continue;
                }
                for c in self.neighbours(a, b) {
                    for &i in own {
                        for &j in self.members(c) {
                            if j > i && dom.distance(positions[i], positions[j]) <= cutoff {
                                pairs.push((i, j));
                            }
                        }
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs
    }
}

/// `O(N^2)` reference for [`CellList::pairs_within`].
pub fn brute_force_pairs(positions: &[[f64; 2]], dom: &PeriodicDomain, cutoff: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if dom.distance(positions[i], positions[j]) <= cutoff {
                pairs.push((i, j));
            }
        }
    }
    pairs
}
