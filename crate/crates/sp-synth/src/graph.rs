//! Small directed-graph helpers over adjacency lists.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::NodeFiltered;

pub(crate) struct Digraph {
    g: DiGraph<(), ()>,
    pub(crate) succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub(crate) fn new(succ: Vec<Vec<usize>>) -> Self {
        let mut g = DiGraph::with_capacity(succ.len(), succ.iter().map(Vec::len).sum());
        for _ in 0..succ.len() {
            g.add_node(());
        }
        for (u, out) in succ.iter().enumerate() {
            for &v in out {
                g.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
            }
        }
        Digraph { g, succ }
    }

    pub(crate) fn len(&self) -> usize {
        self.succ.len()
    }

    /// Strongly connected components of the subgraph induced by `keep`.
    pub(crate) fn sccs_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let f = NodeFiltered::from_fn(&self.g, |n: NodeIndex| keep[n.index()]);
        let mut out: Vec<Vec<usize>> = tarjan_scc(&f)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
                c.sort_unstable();
                c
            })
            .collect();
        out.sort();
        out
    }

    /// Components that carry at least one cycle.
    pub(crate) fn nontrivial_sccs_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        self.sccs_within(keep)
            .into_iter()
            .filter(|c| c.len() > 1 || self.succ[c[0]].contains(&c[0]))
            .collect()
    }

    /// Shortest path `from .. to` (both included) through nodes in `within`.
    pub(crate) fn path(&self, from: usize, to: &dyn Fn(usize) -> bool, within: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
        if to(from) {
            return Some(vec![from]);
        }
        let mut parent = vec![usize::MAX; self.len()];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.succ[u] {
                if parent[v] != usize::MAX || !within(v) {
                    continue;
                }
                parent[v] = u;
                if to(v) {
                    let mut p = vec![v];
                    let mut x = v;
                    while x != from {
                        x = parent[x];
                        p.push(x);
                    }
                    p.reverse();
                    return Some(p);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Closed walk from `start` that visits every node of the strongly
    /// connected set `comp`; returned without the final repetition of `start`.
    pub(crate) fn covering_cycle(&self, start: usize, comp: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.len()];
        for &x in comp {
            inside[x] = true;
        }
        self.tour(start, comp, &inside)
    }

    /// Closed walk from `start` through every node of `goals`, staying in
    /// `within` (assumed strongly connected), without the final `start`.
    pub(crate) fn tour(&self, start: usize, goals: &[usize], within: &[bool]) -> Vec<usize> {
        let inside = |x: usize| within[x];
        let mut walk = vec![start];
        let mut cur = start;
        for &goal in goals.iter().filter(|&&g| g != start) {
            if goal == cur {
                continue;
            }
            let seg = self.path(cur, &|z| z == goal, &inside).expect("goal is reachable inside the component");
            walk.extend_from_slice(&seg[1..]);
            cur = goal;
        }
        if cur != start {
            let seg = self.path(cur, &|z| z == start, &inside).expect("start is reachable inside the component");
            walk.extend_from_slice(&seg[1..seg.len() - 1]);
            return walk;
        }
        // nothing visited yet: take the shortest way back to `start`
        let back = self.succ[start]
            .iter()
            .filter(|&&y| within[y])
            .filter_map(|&y| self.path(y, &|z| z == start, &inside))
            .min_by_key(Vec::len)
            .expect("start lies on a cycle");
        walk.extend_from_slice(&back[..back.len() - 1]);
        walk
    }
}
