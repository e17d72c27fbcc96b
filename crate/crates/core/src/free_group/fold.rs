use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{letter_name, FreeGroupError, FreeHom, FreeWord, Result};

/// Folded core graph of a finitely generated subgroup of `F(rank)`.
///
/// States are numbered in breadth-first order from the basepoint (state 0),
/// visiting labels in ascending order, so two graphs of the same subgroup
/// are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupGraph {
    rank: usize,
    edges: Vec<BTreeMap<i32, usize>>,
}

impl SubgroupGraph {
    pub fn trivial(rank: usize) -> Self {
        SubgroupGraph {
            rank,
            edges: vec![BTreeMap::new()],
        }
    }

    /// The whole group: one state with a loop for every generator.
    pub fn full(rank: usize) -> Self {
        let mut m = BTreeMap::new();
        for i in 1..=rank as i32 {
            m.insert(i, 0);
            m.insert(-i, 0);
        }
        SubgroupGraph {
            rank,
            edges: vec![m],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edges.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Free rank of the subgroup, `|E| - |V| + 1`.
    pub fn graph_rank(&self) -> usize {
        self.num_edges() + 1 - self.num_states()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_edges() == 0
    }

    pub fn is_full(&self) -> bool {
        self.num_states() == 1 && self.edges[0].len() == 2 * self.rank
    }

    pub fn transitions(&self, state: usize) -> &BTreeMap<i32, usize> {
        &self.edges[state]
    }

    pub fn contains(&self, w: &FreeWord) -> Result<bool> {
        if w.rank() != self.rank {
            return Err(FreeGroupError::RankMismatch {
                expected: self.rank,
                found: w.rank(),
            });
        }
        let mut state = 0;
        for l in w.letters() {
            match self.edges[state].get(l) {
                Some(&next) => state = next,
                None => return Ok(false),
            }
        }
        Ok(state == 0)
    }

    /// Free basis read off a breadth-first spanning tree.
    pub fn basis(&self) -> Vec<FreeWord> {
        let n = self.edges.len();
        let mut path: Vec<Option<Vec<i32>>> = vec![None; n];
        let mut tree: HashSet<(usize, i32)> = HashSet::new();
        path[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for (&l, &v) in &self.edges[u] {
                if path[v].is_none() {
                    let mut p = path[u].clone().unwrap();
                    p.push(l);
                    path[v] = Some(p);
                    tree.insert((u, l));
                    queue.push_back(v);
                }
            }
        }
        let is_tree = |u: usize, l: i32, v: usize| {
            tree.contains(&(u, l)) || tree.contains(&(v, -l))
        };
        let mut basis = Vec::new();
        for u in 0..n {
            for (&l, &v) in &self.edges[u] {
                if l < 0 || is_tree(u, l, v) {
                    continue;
                }
                let mut letters = path[u].clone().unwrap();
                letters.push(l);
                letters.extend(path[v].as_ref().unwrap().iter().rev().map(|x| -x));
                basis.push(FreeWord::reduce(self.rank, &letters).expect("letters in range"));
            }
        }
        basis
    }

    /// Whether `other` is a subgroup of `self`.
    pub fn contains_subgroup(&self, other: &SubgroupGraph) -> Result<bool> {
        if other.rank != self.rank {
            return Err(FreeGroupError::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        for b in other.basis() {
            if !self.contains(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Adjacency list dump, one state per line.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("rank {}\nstates {}\n", self.rank, self.edges.len());
        for (s, m) in self.edges.iter().enumerate() {
            let _ = write!(out, "{s}:");
            for (&l, &t) in m {
                let _ = write!(out, " {}->{}", letter_name(l), t);
            }
            out.push('\n');
        }
        out
    }

    /// Trim and renumber an arbitrary deterministic adjacency whose state 0
    /// is the basepoint. States unreachable from the basepoint are dropped.
    fn from_adjacency(rank: usize, mut adj: Vec<BTreeMap<i32, usize>>) -> Self {
        let n = adj.len();
        let mut alive = vec![true; n];
        let mut queue: VecDeque<usize> = (1..n).filter(|&s| adj[s].len() <= 1).collect();
        while let Some(s) = queue.pop_front() {
            if !alive[s] || adj[s].len() > 1 {
                continue;
            }
            alive[s] = false;
            let edges = std::mem::take(&mut adj[s]);
            for (l, t) in edges {
                if t != s {
                    adj[t].remove(&-l);
                    if t != 0 && alive[t] && adj[t].len() <= 1 {
                        queue.push_back(t);
                    }
                }
            }
        }
        let mut id = vec![usize::MAX; n];
        let mut order = Vec::new();
        id[0] = 0;
        order.push(0);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &v in adj[u].values() {
                if id[v] == usize::MAX {
                    id[v] = order.len();
                    order.push(v);
                }
            }
        }
        let edges = order
            .iter()
            .map(|&u| adj[u].iter().map(|(&l, &v)| (l, id[v])).collect())
            .collect();
        SubgroupGraph { rank, edges }
    }
}

/// Union-find folding: edges are inserted one at a time and every label
/// clash is resolved by identifying the two endpoints.
struct Folder {
    parent: Vec<usize>,
    adj: Vec<BTreeMap<i32, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Self {
        Folder {
            parent: vec![0],
            adj: vec![BTreeMap::new()],
            pending: Vec::new(),
        }
    }

    fn add_state(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn link(&mut self, u: usize, l: i32, v: usize) {
        match self.adj[u].get(&l).copied() {
            Some(w) => {
                let w = self.find(w);
                if w != v {
                    self.pending.push((v, w));
                }
            }
            None => {
                self.adj[u].insert(l, v);
            }
        }
    }

    fn add_edge(&mut self, u: usize, l: i32, v: usize) {
        let u = self.find(u);
        let v = self.find(v);
        self.link(u, l, v);
        self.link(v, -l, u);
        self.settle();
    }

    fn settle(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            let moved = std::mem::take(&mut self.adj[gone]);
            for (l, t) in moved {
                let t = self.find(t);
                self.link(keep, l, t);
            }
        }
    }

    fn add_loop(&mut self, word: &[i32]) {
        let mut cur = 0;
        for (i, &l) in word.iter().enumerate() {
            let next = if i + 1 == word.len() {
                0
            } else {
                self.add_state()
            };
            self.add_edge(cur, l, next);
            cur = next;
        }
    }

    fn finish(mut self, rank: usize) -> SubgroupGraph {
        let n = self.parent.len();
        let mut index = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for (s, slot) in index.iter_mut().enumerate() {
            if self.find(s) == s {
                *slot = reps.len();
                reps.push(s);
            }
        }
        let adj: Vec<BTreeMap<i32, usize>> = reps
            .iter()
            .map(|&r| {
                let m = self.adj[r].clone();
                m.into_iter()
                    .map(|(l, t)| (l, index[self.find(t)]))
                    .collect()
            })
            .collect();
        SubgroupGraph::from_adjacency(rank, adj)
    }
}

fn check_rank(rank: usize, gens: &[FreeWord]) -> Result<()> {
    match gens.iter().find(|g| g.rank() != rank) {
        Some(g) => Err(FreeGroupError::RankMismatch {
            expected: rank,
            found: g.rank(),
        }),
        None => Ok(()),
    }
}

/// Folded core graph of the subgroup of `F(rank)` generated by `gens`.
pub fn fold(rank: usize, gens: &[FreeWord]) -> Result<SubgroupGraph> {
    check_rank(rank, gens)?;
    let mut folder = Folder::new();
    for g in gens.iter().filter(|g| !g.is_empty()) {
        folder.add_loop(g.letters());
    }
    Ok(folder.finish(rank))
}

/// Textbook folding on an explicit edge list: at each step a clashing pair of
/// edges is chosen at random (seeded) and identified. Quadratic per step;
/// meant for cross-checking [`fold`] on small inputs.
pub fn fold_by_random_steps(rank: usize, gens: &[FreeWord], seed: u64) -> Result<SubgroupGraph> {
    check_rank(rank, gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (u, l, v) with l > 0 means u --l--> v.
    let mut edges: Vec<(usize, i32, usize)> = Vec::new();
    let mut n = 1;
    for g in gens.iter().filter(|g| !g.is_empty()) {
        let mut cur = 0;
        for (i, &l) in g.letters().iter().enumerate() {
            let next = if i + 1 == g.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            if l > 0 {
                edges.push((cur, l, next));
            } else {
                edges.push((next, -l, cur));
            }
            cur = next;
        }
    }
    edges.sort_unstable();
    edges.dedup();
    loop {
        let mut clashes: Vec<(usize, usize)> = Vec::new();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a, b) = (edges[i], edges[j]);
                if a.1 != b.1 {
                    continue;
                }
                if a.0 == b.0 && a.2 != b.2 {
                    clashes.push((a.2, b.2));
                }
                if a.2 == b.2 && a.0 != b.0 {
                    clashes.push((a.0, b.0));
                }
            }
        }
        let Some(&(x, y)) = clashes.choose(&mut rng) else {
            break;
        };
        let (keep, gone) = if x < y { (x, y) } else { (y, x) };
        for e in edges.iter_mut() {
            if e.0 == gone {
                e.0 = keep;
            }
            if e.2 == gone {
                e.2 = keep;
            }
        }
        edges.sort_unstable();
        edges.dedup();
    }
    let mut adj = vec![BTreeMap::new(); n];
    for &(u, l, v) in &edges {
        adj[u].insert(l, v);
        adj[v].insert(-l, u);
    }
    Ok(SubgroupGraph::from_adjacency(rank, adj))
}

/// Folded graph of `f(s)`; `s = None` stands for the whole source group.
pub fn image(f: &FreeHom, s: Option<&SubgroupGraph>) -> Result<SubgroupGraph> {
    let gens = match s {
        Some(s) => {
            if s.rank() != f.source_rank() {
                return Err(FreeGroupError::RankMismatch {
                    expected: f.source_rank(),
                    found: s.rank(),
                });
            }
            s.basis()
                .iter()
                .map(|w| f.apply(w))
                .collect::<Result<Vec<_>>>()?
        }
        None => f.images().to_vec(),
    };
    fold(f.target_rank(), &gens)
}

pub fn equal_subgroups(a: &SubgroupGraph, b: &SubgroupGraph) -> Result<bool> {
    if a.rank() != b.rank() {
        return Err(FreeGroupError::RankMismatch {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    Ok(a == b)
}
