//! Generators: cross-polytope boundaries, connected sums, balanced handle
//! additions, stacked cross-polytopal spheres, random members of the balanced
//! Walkup class, barycentric subdivisions and a small catalog of classical
//! triangulations.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::complex::{Complex, Face, VertexId};
use crate::error::{Error, Result};

/// Boundary of the `d`-dimensional cross-polytope. Vertex `+i` is labelled `i`
/// and `-i` is labelled `d + i`; both get color `i - 1`.
pub fn cross_polytope_boundary(d: usize) -> (Complex, Coloring) {
    assert!(d >= 1);
    let d32 = d as u32;
    let facets = (0..1u64 << d).map(|signs| {
        (1..=d32)
            .map(|i| if signs >> (i - 1) & 1 == 0 { i } else { d32 + i })
            .collect::<Vec<_>>()
    });
    let c = Complex::from_facets(facets).expect("valid facets");
    let colors = (1..=2 * d32).map(|v| (v, ((v - 1) % d32) as usize)).collect();
    (c, Coloring::new(d, colors))
}

/// Shifts every label of `b` past the largest label of `a` and takes the union.
pub fn disjoint_union(a: &Complex, b: &Complex) -> Complex {
    let off = a.max_label().unwrap_or(0);
    let shifted = b.relabel(|v| v + off).expect("shift is injective");
    Complex::from_faces(a.facets().iter().chain(shifted.facets()).cloned())
}

/// A bijection between the vertex sets of two facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetBijection {
    pub source: Face,
    pub target: Face,
    /// `(v, φ(v))` for each `v` in `source`.
    pub map: Vec<(VertexId, VertexId)>,
}

impl FacetBijection {
    pub fn new(source: Face, target: Face, map: Vec<(VertexId, VertexId)>) -> Result<FacetBijection> {
        let mut dom: Vec<VertexId> = map.iter().map(|p| p.0).collect();
        let mut img: Vec<VertexId> = map.iter().map(|p| p.1).collect();
        dom.sort_unstable();
        img.sort_unstable();
        if dom != source.vertices() || img != target.vertices() {
            return Err(Error::InvalidBijection(format!("map is not a bijection {source} → {target}")));
        }
        Ok(FacetBijection { source, target, map })
    }

    /// The unique color-preserving bijection between two rainbow facets.
    pub fn by_color(source: &Face, target: &Face, col_s: &Coloring, col_t: &Coloring) -> Result<FacetBijection> {
        let by: HashMap<usize, VertexId> = target
            .vertices()
            .iter()
            .map(|&w| col_t.color(w).map(|k| (k, w)).ok_or(Error::ColoringIncomplete(w)))
            .collect::<Result<_>>()?;
        let map = source
            .vertices()
            .iter()
            .map(|&v| {
                let k = col_s.color(v).ok_or(Error::ColoringIncomplete(v))?;
                by.get(&k).map(|&w| (v, w)).ok_or(Error::ColorMismatch(v))
            })
            .collect::<Result<Vec<_>>>()?;
        FacetBijection::new(source.clone(), target.clone(), map)
    }

    pub fn check_colors(&self, col_s: &Coloring, col_t: &Coloring) -> Result<()> {
        for &(v, w) in &self.map {
            if col_s.color(v) != col_t.color(w) {
                return Err(Error::ColorMismatch(v));
            }
        }
        Ok(())
    }
}

fn require_facet(c: &Complex, f: &Face) -> Result<()> {
    if c.facets().binary_search(f).is_ok() {
        Ok(())
    } else {
        Err(Error::NotAFacet(f.clone()))
    }
}

/// Glues `Δ ∖ {σ}` and `Γ ∖ {τ}` along `φ`. Each pair `v ~ φ(v)` keeps the
/// smaller label.
pub fn connected_sum(delta: &Complex, gamma: &Complex, phi: &FacetBijection) -> Result<Complex> {
    require_facet(delta, &phi.source)?;
    require_facet(gamma, &phi.target)?;
    if delta.vertices().iter().any(|v| gamma.vertices().binary_search(v).is_ok()) {
        return Err(Error::LabelCollision);
    }
    let rename: HashMap<VertexId, VertexId> = phi
        .map
        .iter()
        .flat_map(|&(v, w)| {
            let keep = v.min(w);
            [(v, keep), (w, keep)]
        })
        .collect();
    let r = |x: VertexId| rename.get(&x).copied().unwrap_or(x);
    let facets = delta
        .facets()
        .iter()
        .filter(|f| **f != phi.source)
        .chain(gamma.facets().iter().filter(|f| **f != phi.target))
        .map(|f| f.map(r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Complex::from_faces(facets))
}

fn merge_colorings(a: &Coloring, b: &Coloring, c: &Complex) -> Coloring {
    let colors = c
        .vertices()
        .iter()
        .map(|&v| (v, a.color(v).or_else(|| b.color(v)).expect("colored vertex")))
        .collect();
    Coloring::new(a.d, colors)
}

/// Connected sum of two colored complexes along the color-preserving bijection.
pub fn connected_sum_colored(
    delta: &Complex,
    dc: &Coloring,
    sigma: &Face,
    gamma: &Complex,
    gc: &Coloring,
    tau: &Face,
) -> Result<(Complex, Coloring)> {
    require_facet(delta, sigma)?;
    require_facet(gamma, tau)?;
    let phi = FacetBijection::by_color(sigma, tau, dc, gc)?;
    let c = connected_sum(delta, gamma, &phi)?;
    let col = merge_colorings(dc, gc, &c);
    Ok((c, col))
}

fn check_disjoint_facets(c: &Complex, phi: &FacetBijection) -> Result<()> {
    require_facet(c, &phi.source)?;
    require_facet(c, &phi.target)?;
    if !phi.source.is_disjoint(&phi.target) {
        return Err(Error::InvalidBijection(format!("{} and {} share a vertex", phi.source, phi.target)));
    }
    Ok(())
}

/// First `(v, φ(v), face)` with a nonempty face common to both links.
///
/// Two links share a nonempty face exactly when they share a vertex, so the
/// witness is a common neighbour.
pub fn admissibility_witness(c: &Complex, phi: &FacetBijection) -> Option<(VertexId, VertexId, Face)> {
    phi.map.iter().find_map(|&(v, w)| {
        let nw = c.neighbors(w);
        c.neighbors(v).into_iter().find(|u| nw.contains(u)).map(|u| (v, w, Face::vertex(u)))
    })
}

/// `lk(v) ∩ lk(φ(v)) = {∅}` for every `v` in the source facet.
pub fn is_admissible(c: &Complex, phi: &FacetBijection) -> Result<bool> {
    check_disjoint_facets(c, phi)?;
    Ok(admissibility_witness(c, phi).is_none())
}

/// Removes both facets of `φ` and identifies `v ~ φ(v)`, keeping the smaller label.
pub fn handle_addition(c: &Complex, phi: &FacetBijection, coloring: Option<&Coloring>) -> Result<Complex> {
    check_disjoint_facets(c, phi)?;
    if let Some(col) = coloring {
        phi.check_colors(col, col)?;
    }
    if let Some((v, w, witness)) = admissibility_witness(c, phi) {
        return Err(Error::NotAdmissible { v, w, witness });
    }
    let rename: HashMap<VertexId, VertexId> = phi
        .map
        .iter()
        .flat_map(|&(v, w)| {
            let keep = v.min(w);
            [(v, keep), (w, keep)]
        })
        .collect();
    let r = |x: VertexId| rename.get(&x).copied().unwrap_or(x);
    let facets = c
        .facets()
        .iter()
        .filter(|f| **f != phi.source && **f != phi.target)
        .map(|f| f.map(r))
        .collect::<Result<Vec<_>>>()?;
    Ok(Complex::from_faces(facets))
}

/// One step of a Walkup-class construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum WalkupStep {
    /// Sum with a fresh `∂C*_d` (labels shifted past the current maximum) along
    /// `facet` and the fresh copy's all-positive facet.
    ConnectedSum { facet: Face },
    /// Handle addition along the color-preserving bijection `source → target`.
    HandleAddition { source: Face, target: Face },
}

/// A replayable construction starting from `∂C*_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkupTrace {
    pub d: usize,
    pub seed: u64,
    pub steps: Vec<WalkupStep>,
}

impl WalkupTrace {
    /// Rebuilds the complex and its coloring.
    pub fn replay(&self) -> Result<(Complex, Coloring)> {
        let (mut c, mut col) = cross_polytope_boundary(self.d);
        for step in &self.steps {
            (c, col) = apply_step(&c, &col, self.d, step)?;
        }
        Ok((c, col))
    }

    pub fn handles(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, WalkupStep::HandleAddition { .. })).count()
    }

    pub fn sums(&self) -> usize {
        self.steps.len() - self.handles()
    }
}

/// Applies one step to a colored complex.
pub fn apply_step(c: &Complex, col: &Coloring, d: usize, step: &WalkupStep) -> Result<(Complex, Coloring)> {
    match step {
        WalkupStep::ConnectedSum { facet } => {
            let off = c.max_label().unwrap_or(0);
            let (fresh, fcol) = cross_polytope_boundary(d);
            let fresh = fresh.relabel(|v| v + off)?;
            let fcol = Coloring::new(d, fcol.colors.iter().map(|(&v, &k)| (v + off, k)).collect());
            let tau = Face::new((1..=d as u32).map(|i| i + off).collect())?;
            connected_sum_colored(c, col, facet, &fresh, &fcol, &tau)
        }
        WalkupStep::HandleAddition { source, target } => {
            let phi = FacetBijection::by_color(source, target, col, col)?;
            let h = handle_addition(c, &phi, Some(col))?;
            let col = col.restrict(&h);
            Ok((h, col))
        }
    }
}

/// `ST(d, n)`: `n − 1` connected sums of `∂C*_d` along random facets.
pub fn stacked_cross_polytopal_sphere(d: usize, n: usize, seed: u64) -> (Complex, Coloring, WalkupTrace) {
    assert!(d >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut c, mut col) = cross_polytope_boundary(d);
    let mut trace = WalkupTrace { d, seed, steps: Vec::new() };
    for _ in 1..n {
        let step = WalkupStep::ConnectedSum { facet: c.facets()[rng.gen_range(0..c.facets().len())].clone() };
        (c, col) = apply_step(&c, &col, d, &step).expect("connected sum along an existing facet");
        trace.steps.push(step);
    }
    (c, col, trace)
}

/// Facet pairs tried per handle before growing the complex.
pub const HANDLE_REJECTION_BUDGET: usize = 1000;
/// Extra connected sums allowed per handle when the budget runs out.
const MAX_REGROWTHS: usize = 32;

/// A random member of the balanced Walkup class: `n_sums` connected sums with
/// fresh cross-polytope boundaries, then `n_handles` admissible handle additions.
pub fn walkup_sample(d: usize, n_sums: usize, n_handles: usize, seed: u64) -> Result<(Complex, Coloring, WalkupTrace)> {
    if d < 3 {
        return Err(Error::InvalidArgument("walkup samples need d ≥ 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut c, mut col) = cross_polytope_boundary(d);
    let mut trace = WalkupTrace { d, seed, steps: Vec::new() };
    let grow = |c: &mut Complex, col: &mut Coloring, trace: &mut WalkupTrace, rng: &mut ChaCha8Rng| {
        let step = WalkupStep::ConnectedSum { facet: c.facets()[rng.gen_range(0..c.facets().len())].clone() };
        (*c, *col) = apply_step(c, col, d, &step).expect("connected sum along an existing facet");
        trace.steps.push(step);
    };
    for _ in 0..n_sums {
        grow(&mut c, &mut col, &mut trace, &mut rng);
    }
    for _ in 0..n_handles {
        let mut done = false;
        for attempt in 0..=MAX_REGROWTHS {
            if attempt > 0 {
                log::debug!("handle budget exhausted, growing by another connected sum");
                grow(&mut c, &mut col, &mut trace, &mut rng);
            }
            if let Some(step) = find_handle(&c, &col, &mut rng) {
                (c, col) = apply_step(&c, &col, d, &step)?;
                trace.steps.push(step);
                done = true;
                break;
            }
        }
        if !done {
            let steps = trace.steps.len();
            return Err(Error::BudgetExhausted { steps, partial: Box::new(trace) });
        }
    }
    Ok((c, col, trace))
}

/// A random admissible handle step on `c`, or `None` once
/// [`HANDLE_REJECTION_BUDGET`] facet pairs have been rejected.
pub fn random_handle(c: &Complex, col: &Coloring, seed: u64) -> Option<WalkupStep> {
    find_handle(c, col, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn find_handle(c: &Complex, col: &Coloring, rng: &mut ChaCha8Rng) -> Option<WalkupStep> {
    let n = c.facets().len();
    for _ in 0..HANDLE_REJECTION_BUDGET {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (s, t) = (&c.facets()[i], &c.facets()[j]);
        if i == j || !s.is_disjoint(t) {
            continue;
        }
        let phi = FacetBijection::by_color(s, t, col, col).ok()?;
        if admissibility_witness(c, &phi).is_none() {
            return Some(WalkupStep::HandleAddition { source: s.clone(), target: t.clone() });
        }
    }
    None
}

/// Barycentric subdivision. Vertex `i` is the `i`-th nonempty face of `c`
/// (ordered by dimension, then lexicographically) and is colored by the
/// dimension of that face.
pub fn barycentric_subdivision(c: &Complex) -> (Complex, Coloring) {
    let faces: Vec<&Face> = c.all_faces().filter(|f| !f.is_empty()).collect();
    let label: HashMap<&Face, VertexId> = faces.iter().enumerate().map(|(i, f)| (*f, i as VertexId + 1)).collect();
    let mut chains = Vec::new();
    for facet in c.facets() {
        for perm in facet.vertices().iter().copied().permutations(facet.len()) {
            let chain: Vec<VertexId> = (1..=perm.len())
                .map(|k| {
                    let f = Face::new(perm[..k].to_vec()).expect("distinct vertices");
                    label[&f]
                })
                .collect();
            chains.push(Face::new(chain).expect("distinct faces"));
        }
    }
    let sd = Complex::from_faces(chains);
    let d = (c.dim() + 1).max(0) as usize;
    let colors: BTreeMap<VertexId, usize> = faces.iter().map(|f| (label[f], f.len() - 1)).collect();
    (sd, Coloring::new(d, colors))
}

/// Names accepted by [`builtin`].
pub const BUILTIN_CATALOG: &[&str] = &["simplex_boundary:<n>", "simplex:<n>", "cross_polytope:<d>", "bipyramid:<n>", "rp2_6", "torus_7"];

/// A named classical complex with canonical labels starting at 1.
pub fn builtin(name: &str) -> Result<Complex> {
    let lower = name.to_ascii_lowercase();
    let (base, arg) = match lower.split_once(':') {
        Some((b, a)) => {
            let n: usize = a.parse().map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
            (b, Some(n))
        }
        None => (lower.as_str(), None),
    };
    let facets: Vec<Vec<VertexId>> = match (base, arg) {
        ("simplex_boundary", Some(n)) if n >= 1 => {
            let all: Vec<VertexId> = (1..=n as u32 + 1).collect();
            all.iter().map(|&skip| all.iter().copied().filter(|&v| v != skip).collect()).collect()
        }
        ("simplex", Some(n)) => vec![(1..=n as u32 + 1).collect()],
        ("cross_polytope", Some(d)) if d >= 1 => return Ok(cross_polytope_boundary(d).0),
        ("bipyramid", Some(n)) if n >= 3 => {
            let n = n as u32;
            (1..=n)
                .flat_map(|i| {
                    let j = i % n + 1;
                    [vec![i, j, n + 1], vec![i, j, n + 2]]
                })
                .collect()
        }
        ("rp2_6", None) => vec![
            vec![1, 2, 3],
            vec![1, 3, 4],
            vec![1, 4, 5],
            vec![1, 5, 6],
            vec![1, 6, 2],
            vec![2, 3, 5],
            vec![3, 4, 6],
            vec![4, 5, 2],
            vec![5, 6, 3],
            vec![6, 2, 4],
        ],
        ("torus_7", None) => (0..7u32)
            .flat_map(|i| {
                let v = |k: u32| (i + k) % 7 + 1;
                [vec![v(0), v(1), v(3)], vec![v(0), v(2), v(3)]]
            })
            .collect(),
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    };
    Complex::from_facets(facets)
}
