//! Maximum bipartite matching with right-side capacities.
//!
//! Left vertices have demand 1. Augmenting paths are found by BFS from each
//! unmatched left vertex in index order; a right vertex with spare capacity
//! ends a path. Scanning order is fixed, so the result is deterministic.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct CapacitatedMatching {
    /// Right vertex matched to each left vertex.
    pub assignment: Vec<Option<usize>>,
    pub size: usize,
}

impl CapacitatedMatching {
    pub fn is_left_perfect(&self) -> bool {
        self.size == self.assignment.len()
    }
}

/// `adj[l]` lists the right vertices adjacent to left vertex `l`.
pub fn max_matching(adj: &[Vec<usize>], capacity: &[usize]) -> CapacitatedMatching {
    let n_left = adj.len();
    let n_right = capacity.len();
    let mut assignment: Vec<Option<usize>> = vec![None; n_left];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_right];
    let mut size = 0;

    let mut col_parent = vec![usize::MAX; n_right];
    let mut row_seen = vec![false; n_left];
    let mut touched_cols = Vec::new();
    let mut touched_rows = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..n_left {
        // greedy shortcut before the full search
        if let Some(&c) = adj[start].iter().find(|&&c| members[c].len() < capacity[c]) {
            assignment[start] = Some(c);
            members[c].push(start);
            size += 1;
            continue;
        }
        queue.clear();
        queue.push_back(start);
        row_seen[start] = true;
        touched_rows.push(start);
        let mut free_end = None;
        'bfs: while let Some(r) = queue.pop_front() {
            for &c in &adj[r] {
                if col_parent[c] != usize::MAX {
                    continue;
                }
                col_parent[c] = r;
                touched_cols.push(c);
                if members[c].len() < capacity[c] {
                    free_end = Some(c);
                    break 'bfs;
                }
                for &r2 in &members[c] {
                    if !row_seen[r2] {
                        row_seen[r2] = true;
                        touched_rows.push(r2);
                        queue.push_back(r2);
                    }
                }
            }
        }
        if let Some(mut c) = free_end {
            loop {
                let r = col_parent[c];
                let previous = assignment[r].replace(c);
                members[c].push(r);
                match previous {
                    Some(p) => {
                        let pos = members[p].iter().position(|&x| x == r).expect("row listed in its column");
                        members[p].swap_remove(pos);
                        c = p;
                    }
                    None => break,
                }
            }
            size += 1;
        }
        for c in touched_cols.drain(..) {
            col_parent[c] = usize::MAX;
        }
        for r in touched_rows.drain(..) {
            row_seen[r] = false;
        }
    }
    CapacitatedMatching { assignment, size }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn augmenting_path_needed() {
        // greedy puts row 0 on column 0, row 1 then needs the augmenting path
        let adj = vec![vec![0, 1], vec![0]];
        let m = max_matching(&adj, &[1, 1]);
        assert!(m.is_left_perfect());
        assert_eq!(m.assignment, vec![Some(1), Some(0)]);
    }

    #[test]
    fn capacity_respected() {
        let adj = vec![vec![0], vec![0], vec![0, 1]];
        let m = max_matching(&adj, &[2, 1]);
        assert!(m.is_left_perfect());
        let m = max_matching(&adj, &[1, 1]);
        assert_eq!(m.size, 2);
    }

    #[test]
    fn long_chain() {
        // row i adjacent to columns i and i+1; only the last column is spare
        let n = 50;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i == 0 { vec![0] } else { vec![i - 1, i] }).collect();
        let m = max_matching(&adj, &vec![1; n]);
        assert!(m.is_left_perfect());
    }
}
