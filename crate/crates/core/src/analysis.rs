//! Explicit-state graph algorithms over indexed state spaces.

use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Successor lists of an explored state space. Node 0 is the initial state;
/// edges carry an opaque id (usually a transition index) and are kept in
/// the order they were added, which fixes witness tie-breaking.
#[derive(Debug, Clone, Default)]
pub struct StateGraph {
    pub succ: Vec<Vec<(usize, usize)>>,
}

impl StateGraph {
    pub fn with_nodes(n: usize) -> Self {
        Self {
            succ: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_edge(&mut self, from: usize, edge: usize, to: usize) {
        self.succ[from].push((edge, to));
    }

    /// Shortest path (as `(edge, target)` steps) from `start` to the first
    /// node satisfying `goal`, in BFS order.
    pub fn shortest_path(
        &self,
        start: usize,
        goal: impl Fn(usize) -> bool,
    ) -> Option<Vec<(usize, usize)>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            if goal(n) {
                let mut path = Vec::new();
                let mut cur = n;
                while let Some((prev, edge)) = parent[cur] {
                    path.push((edge, cur));
                    cur = prev;
                }
                path.reverse();
                return Some(path);
            }
            for &(edge, to) in &self.succ[n] {
                if !seen[to] {
                    seen[to] = true;
                    parent[to] = Some((n, edge));
                    queue.push_back(to);
                }
            }
        }
        None
    }

    /// Nodes from which some node in `targets` is reachable (including targets).
    pub fn can_reach(&self, targets: &[bool]) -> Vec<bool> {
        let mut pred = vec![Vec::new(); self.len()];
        for (n, edges) in self.succ.iter().enumerate() {
            for &(_, to) in edges {
                pred[to].push(n);
            }
        }
        let mut reach = targets.to_vec();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&n| targets[n]).collect();
        while let Some(n) = queue.pop_front() {
            for &p in &pred[n] {
                if !reach[p] {
                    reach[p] = true;
                    queue.push_back(p);
                }
            }
        }
        reach
    }

    /// Strongly connected components of the subgraph induced by `nodes`,
    /// each sorted ascending, ordered by smallest member.
    pub fn sccs_within(&self, nodes: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut g: DiGraph<usize, ()> = DiGraph::new();
        let mut index = vec![None; self.len()];
        for &n in nodes {
            index[n] = Some(g.add_node(n));
        }
        for &n in nodes {
            for &(_, to) in &self.succ[n] {
                if let (Some(a), Some(b)) = (index[n], index[to]) {
                    g.add_edge(a, b, ());
                }
            }
        }
        let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|i: NodeIndex| g[i]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        out.sort();
        out
    }

    pub fn sccs(&self) -> Vec<Vec<usize>> {
        self.sccs_within(&(0..self.len()).collect())
    }

    /// Whether the component contains a cycle (more than one node or a self loop).
    pub fn has_cycle(&self, component: &[usize]) -> bool {
        component.len() > 1
            || component
                .iter()
                .any(|&n| self.succ[n].iter().any(|&(_, to)| to == n))
    }

    /// Nodes lying on some cycle whose exact node set `S` satisfies `accept(S)`.
    /// Emerson–Lei style decomposition: an SCC that fails the predicate is
    /// searched again with each single node removed.
    pub fn good_cycle_nodes(&self, accept: &dyn Fn(&[usize]) -> bool) -> Vec<bool> {
        let mut good = vec![false; self.len()];
        let mut visited: BTreeSet<Vec<usize>> = BTreeSet::new();
        let all: BTreeSet<usize> = (0..self.len()).collect();
        self.good_cycle_rec(&all, accept, &mut good, &mut visited);
        good
    }

    fn good_cycle_rec(
        &self,
        nodes: &BTreeSet<usize>,
        accept: &dyn Fn(&[usize]) -> bool,
        good: &mut [bool],
        visited: &mut BTreeSet<Vec<usize>>,
    ) {
        for comp in self.sccs_within(nodes) {
            if !self.has_cycle(&comp) || !visited.insert(comp.clone()) {
                continue;
            }
            if accept(&comp) {
                for &n in &comp {
                    good[n] = true;
                }
                continue;
            }
            if comp.len() == 1 {
                continue;
            }
            for &drop in &comp {
                let sub: BTreeSet<usize> = comp.iter().copied().filter(|&n| n != drop).collect();
                self.good_cycle_rec(&sub, accept, good, visited);
            }
        }
    }

    /// A cycle through `start` staying inside `component`, as `(edge, target)` steps.
    pub fn cycle_through(&self, start: usize, component: &[usize]) -> Vec<(usize, usize)> {
        let inside: BTreeSet<usize> = component.iter().copied().collect();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::new();
        for &(edge, to) in &self.succ[start] {
            if to == start {
                return vec![(edge, to)];
            }
            if inside.contains(&to) && !seen[to] {
                seen[to] = true;
                parent[to] = Some((start, edge));
                queue.push_back(to);
            }
        }
        while let Some(n) = queue.pop_front() {
            for &(edge, to) in &self.succ[n] {
                if to == start {
                    let mut path = vec![(edge, start)];
                    let mut cur = n;
                    while let Some((prev, e)) = parent[cur] {
                        path.push((e, cur));
                        cur = prev;
                    }
                    path.reverse();
                    return path;
                }
                if inside.contains(&to) && !seen[to] {
                    seen[to] = true;
                    parent[to] = Some((n, edge));
                    queue.push_back(to);
                }
            }
        }
        Vec::new()
    }
}
