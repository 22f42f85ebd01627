use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Maximal cliques by Bron–Kerbosch with Tomita pivoting. Fails once more
/// than `budget` cliques have been reported.
pub fn maximal_cliques(adj: &[BTreeSet<usize>], budget: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let p: BTreeSet<usize> = (0..adj.len()).collect();
    expand(adj, &mut Vec::new(), p, BTreeSet::new(), &mut out, budget)?;
    out.sort();
    Ok(out)
}

fn expand(
    adj: &[BTreeSet<usize>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
    budget: usize,
) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() {
            if out.len() == budget {
                return Err(Error::BudgetExceeded {
                    what: "maximal cliques",
                    size: budget + 1,
                    budget,
                });
            }
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
        }
        return Ok(());
    }
    let pivot = p
        .union(&x)
        .max_by_key(|&&u| p.intersection(&adj[u]).count())
        .copied()
        .expect("p is nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        r.push(v);
        let np = p.intersection(&adj[v]).copied().collect();
        let nx = x.intersection(&adj[v]).copied().collect();
        expand(adj, r, np, nx, out, budget)?;
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    #[test]
    fn triangle_plus_pendant() {
        let g = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(maximal_cliques(&g, 10).unwrap(), vec![vec![0, 1, 2], vec![2, 3]]);
    }

    #[test]
    fn isolated_vertex_is_a_clique() {
        let g = graph(2, &[]);
        assert_eq!(maximal_cliques(&g, 10).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn budget() {
        let g = graph(4, &[]);
        assert!(matches!(maximal_cliques(&g, 3), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn matches_brute_force() {
        // Complement of a 6-cycle: every maximal clique found by subset search.
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                if (v - u) % 6 != 1 && (v - u) % 6 != 5 {
                    edges.push((u, v));
                }
            }
        }
        let g = graph(6, &edges);
        let is_clique = |s: u32| {
            (0..6).all(|u| (0..6).all(|v| u == v || s >> u & 1 == 0 || s >> v & 1 == 0 || g[u].contains(&v)))
        };
        let mut brute = Vec::new();
        for s in 1u32..64 {
            if is_clique(s) && (0..6).all(|w| s >> w & 1 == 1 || !is_clique(s | 1 << w)) {
                brute.push((0..6).filter(|v| s >> v & 1 == 1).collect::<Vec<usize>>());
            }
        }
        brute.sort();
        assert_eq!(maximal_cliques(&g, 100).unwrap(), brute);
    }
}
