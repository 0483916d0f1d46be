//! Proper vertex colorings, coarsenings of the color set, and the induced
//! `N^m`-gradings.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Face, VertexId};
use crate::error::{Error, Result};

/// A map from vertices to colors `0..d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub d: usize,
    pub colors: BTreeMap<VertexId, usize>,
}

impl Coloring {
    pub fn new(d: usize, colors: BTreeMap<VertexId, usize>) -> Coloring {
        Coloring { d, colors }
    }

    pub fn color(&self, v: VertexId) -> Option<usize> {
        self.colors.get(&v).copied()
    }

    /// Checks that every vertex of `c` is colored and no edge is monochromatic.
    pub fn validate(&self, c: &Complex) -> Result<()> {
        for &v in c.vertices() {
            match self.color(v) {
                None => return Err(Error::ColoringIncomplete(v)),
                Some(k) if k >= self.d => {
                    return Err(Error::InvalidArgument(format!("vertex {v} has color {k} outside 0..{}", self.d)))
                }
                _ => {}
            }
        }
        for e in c.faces(1) {
            let [u, v] = e.vertices() else { unreachable!() };
            if self.colors[u] == self.colors[v] {
                return Err(Error::ColoringImproper(e.clone()));
            }
        }
        Ok(())
    }

    /// Restriction to the vertices of `c`.
    pub fn restrict(&self, c: &Complex) -> Coloring {
        let colors = c.vertices().iter().filter_map(|&v| self.color(v).map(|k| (v, k))).collect();
        Coloring { d: self.d, colors }
    }

    /// Colors used by a face, as a bitmask.
    pub fn mask(&self, f: &Face) -> u64 {
        f.vertices().iter().fold(0, |m, v| m | 1 << self.colors[v])
    }
}

/// A coarsening of the colors `0..d` into `m` groups; `a_i` colors go to group `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grouping {
    pub a: Vec<usize>,
    pub assign: Vec<usize>,
}

impl Grouping {
    /// Builds the grouping from `assign[color] = group`. Every group in
    /// `0..m` must receive at least one color.
    pub fn new(assign: Vec<usize>) -> Result<Grouping> {
        let m = assign.iter().max().map_or(0, |&g| g + 1);
        let mut a = vec![0; m];
        for &g in &assign {
            a[g] += 1;
        }
        if let Some(i) = a.iter().position(|&x| x == 0) {
            return Err(Error::InvalidGrouping(format!("group {i} receives no color")));
        }
        Ok(Grouping { a, assign })
    }

    /// `a = (1,…,1)`: the fine grading.
    pub fn identity(d: usize) -> Grouping {
        Grouping { a: vec![1; d], assign: (0..d).collect() }
    }

    /// `a = (d)`: the ordinary `N`-grading.
    pub fn monochromatic(d: usize) -> Grouping {
        Grouping { a: vec![d], assign: vec![0; d] }
    }

    /// A uniformly shuffled coarsening into `m` nonempty groups.
    pub fn random<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Grouping {
        assert!(1 <= m && m <= d);
        let mut assign: Vec<usize> = (0..d).map(|i| if i < m { i } else { rng.gen_range(0..m) }).collect();
        assign.shuffle(rng);
        Grouping::new(assign).expect("every group is hit")
    }

    pub fn d(&self) -> usize {
        self.assign.len()
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn is_identity(&self) -> bool {
        self.assign.iter().enumerate().all(|(i, &g)| i == g)
    }

    /// Colors in group `g`.
    pub fn colors_of(&self, g: usize) -> Vec<usize> {
        (0..self.d()).filter(|&c| self.assign[c] == g).collect()
    }
}

/// Largest flag table built without `allow_large`.
pub const FLAG_TABLE_BUDGET: usize = 4096;

/// The grading `deg x_v = e_{group(v)}` with context vector `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub a: Vec<usize>,
    group: HashMap<VertexId, usize>,
}

impl Grading {
    /// Grading from a proper coloring of `c` and a grouping of its colors.
    pub fn new(c: &Complex, coloring: &Coloring, grouping: &Grouping) -> Result<Grading> {
        Self::build(c, coloring, grouping, false)
    }

    pub fn new_large(c: &Complex, coloring: &Coloring, grouping: &Grouping) -> Result<Grading> {
        Self::build(c, coloring, grouping, true)
    }

    fn build(c: &Complex, coloring: &Coloring, grouping: &Grouping, allow_large: bool) -> Result<Grading> {
        coloring.validate(c)?;
        if grouping.d() != coloring.d {
            return Err(Error::InvalidGrouping(format!(
                "grouping covers {} colors, coloring uses {}",
                grouping.d(),
                coloring.d
            )));
        }
        let size = grouping.a.iter().try_fold(1usize, |acc, &x| acc.checked_mul(x + 1));
        match size {
            Some(s) if s <= FLAG_TABLE_BUDGET || allow_large => {}
            Some(s) => return Err(Error::TooLarge(s)),
            None => return Err(Error::TooLarge(usize::MAX)),
        }
        let group = c.vertices().iter().map(|&v| (v, grouping.assign[coloring.colors[&v]])).collect();
        Ok(Grading { a: grouping.a.clone(), group })
    }

    /// Every vertex in one group, `a = (d)`; needs no coloring.
    pub fn monochromatic(c: &Complex) -> Grading {
        let d = (c.dim() + 1).max(0) as usize;
        Grading { a: vec![d], group: c.vertices().iter().map(|&v| (v, 0)).collect() }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn d(&self) -> usize {
        self.a.iter().sum()
    }

    pub fn group(&self, v: VertexId) -> usize {
        self.group[&v]
    }

    /// Restriction to a subcomplex (e.g. a link), keeping `a`.
    pub fn restrict(&self, c: &Complex) -> Grading {
        Grading { a: self.a.clone(), group: c.vertices().iter().map(|&v| (v, self.group[&v])).collect() }
    }

    /// Same vertex groups with a different context vector.
    pub fn with_a(&self, a: Vec<usize>) -> Grading {
        Grading { a, group: self.group.clone() }
    }

    /// `Σ_{v∈σ} e_{group(v)}`.
    pub fn degree(&self, f: &Face) -> Vec<usize> {
        let mut b = vec![0; self.m()];
        for v in f.vertices() {
            b[self.group[v]] += 1;
        }
        b
    }
}

/// Node budget of the backtracking search.
const SEARCH_BUDGET: u64 = 10_000_000;

/// Finds a proper `(dim+1)`-coloring by DSATUR-ordered backtracking. The first
/// facet is colored `0..d` in vertex order.
pub fn find_balanced_coloring(c: &Complex) -> Result<Coloring> {
    let d = (c.dim() + 1).max(0) as usize;
    let verts = c.vertices();
    let n = verts.len();
    if n == 0 {
        return Ok(Coloring::new(d, BTreeMap::new()));
    }
    let idx: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = verts.iter().map(|&v| c.neighbors(v).iter().map(|w| idx[w]).collect()).collect();
    if d > 64 {
        return Err(Error::InvalidArgument("more than 64 colors".into()));
    }

    let mut color: Vec<Option<usize>> = vec![None; n];
    // seen[v][k]: neighbors of v colored k
    let mut seen: Vec<Vec<u32>> = vec![vec![0; d]; n];
    let mut forbid: Vec<u64> = vec![0; n];
    let assign = |v: usize, k: usize, color: &mut Vec<Option<usize>>, seen: &mut Vec<Vec<u32>>, forbid: &mut Vec<u64>| {
        color[v] = Some(k);
        for &w in &adj[v] {
            seen[w][k] += 1;
            forbid[w] |= 1 << k;
        }
    };
    let unassign = |v: usize, color: &mut Vec<Option<usize>>, seen: &mut Vec<Vec<u32>>, forbid: &mut Vec<u64>| {
        let k = color[v].take().unwrap();
        for &w in &adj[v] {
            seen[w][k] -= 1;
            if seen[w][k] == 0 {
                forbid[w] &= !(1 << k);
            }
        }
    };

    for (k, v) in c.facets()[0].vertices().iter().enumerate() {
        assign(idx[v], k, &mut color, &mut seen, &mut forbid);
    }
    let full: u64 = if d == 64 { u64::MAX } else { (1 << d) - 1 };
    // stack of (vertex, colors still to try)
    let mut stack: Vec<(usize, u64)> = Vec::new();
    let mut nodes = 0u64;
    let pick = |color: &[Option<usize>], forbid: &[u64]| -> Option<usize> {
        (0..n)
            .filter(|&v| color[v].is_none())
            .max_by_key(|&v| (forbid[v].count_ones(), adj[v].len(), std::cmp::Reverse(v)))
    };
    let mut next = pick(&color, &forbid);
    loop {
        let Some(v) = next else { break };
        let options = full & !forbid[v];
        stack.push((v, options));
        // descend or backtrack until a vertex gets a color
        loop {
            nodes += 1;
            if nodes > SEARCH_BUDGET {
                return Err(not_balanced(c, &adj, d, "search budget exhausted"));
            }
            let Some(top) = stack.last_mut() else {
                return Err(not_balanced(c, &adj, d, "no proper coloring exists"));
            };
            if top.1 == 0 {
                let (u, _) = stack.pop().unwrap();
                if color[u].is_some() {
                    unassign(u, &mut color, &mut seen, &mut forbid);
                }
                match stack.last() {
                    Some(&(w, _)) => {
                        unassign(w, &mut color, &mut seen, &mut forbid);
                        continue;
                    }
                    None => return Err(not_balanced(c, &adj, d, "no proper coloring exists")),
                }
            }
            let k = top.1.trailing_zeros() as usize;
            top.1 &= !(1 << k);
            let u = top.0;
            assign(u, k, &mut color, &mut seen, &mut forbid);
            break;
        }
        next = pick(&color, &forbid);
    }
    let colors = verts.iter().enumerate().map(|(i, &v)| (v, color[i].unwrap())).collect();
    Ok(Coloring::new(d, colors))
}

fn not_balanced(c: &Complex, adj: &[Vec<usize>], d: usize, why: &str) -> Error {
    let verts = c.vertices();
    let mut best: Vec<usize> = Vec::new();
    for start in 0..verts.len() {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = adj[start].clone();
        cand.sort_by_key(|&w| std::cmp::Reverse(adj[w].len()));
        for w in cand {
            if clique.iter().all(|&u| adj[u].contains(&w)) {
                clique.push(w);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    let mut witness: Vec<VertexId> = best.iter().map(|&i| verts[i]).collect();
    witness.sort();
    let reason = if witness.len() > d {
        format!("clique on {} vertices needs more than {d} colors", witness.len())
    } else {
        format!("{why} (largest clique found has {} vertices)", witness.len())
    };
    Error::NotBalanced { reason, witness }
}
