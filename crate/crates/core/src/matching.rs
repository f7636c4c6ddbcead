//! Maximum bipartite matching by augmenting paths (Kuhn's algorithm).

/// A matching between left vertices `0..n_left` and right vertices `0..n_right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
    pub size: usize,
}

impl Matching {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left_to_right
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
    }
}

/// `adj[l]` lists the right vertices adjacent to left vertex `l`.
pub fn maximum_matching(adj: &[Vec<usize>], n_right: usize) -> Matching {
    let n_left = adj.len();
    let mut left_to_right = vec![None; n_left];
    let mut right_to_left = vec![None; n_right];
    let mut visited = vec![false; n_right];
    let mut size = 0;

    for l in 0..n_left {
        visited.iter_mut().for_each(|v| *v = false);
        if augment(l, adj, &mut visited, &mut left_to_right, &mut right_to_left) {
            size += 1;
        }
    }
    Matching {
        left_to_right,
        right_to_left,
        size,
    }
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    visited: &mut [bool],
    left_to_right: &mut [Option<usize>],
    right_to_left: &mut [Option<usize>],
) -> bool {
    for &r in &adj[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        let free = match right_to_left[r] {
            None => true,
            Some(other) => augment(other, adj, visited, left_to_right, right_to_left),
        };
        if free {
            left_to_right[l] = Some(r);
            right_to_left[r] = Some(l);
            return true;
        }
    }
    false
}
