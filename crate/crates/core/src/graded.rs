//! Multigraded pieces of Stanley–Reisner rings `F[Δ]` and modules
//! `F[Δ,Γ] = I_Γ/I_Δ`, linear systems of parameters, the quotients by `Θ` and by
//! `Σ(Θ;M)`, and randomized Lefschetz tests.
//!
//! A slice `M_b` has the monomials of multidegree `b` whose support is a face
//! of `Δ` not in `Γ` as a basis. Multiplying by `x_v` sends a basis monomial to
//! another basis monomial or to zero, so no Gröbner machinery is needed.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::Grading;
use crate::complex::{Complex, Face, PairRef, VertexId};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::flags::{binomial, leq, FlagVector};
use crate::linalg::{kernel, Echelon};
use crate::with_generic_field;

/// Exponent vector `(vertex, exponent)` sorted by vertex, exponents positive.
pub type Monomial = Vec<(VertexId, u32)>;

/// The monomial basis of one multigraded slice.
#[derive(Debug)]
pub struct Slice {
    pub degree: Vec<usize>,
    pub basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Slice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// `F[Δ]` or `F[Δ,Γ]` with a fixed grading; slices are built on demand and memoized.
pub struct GradedModule<'a> {
    pair: PairRef<'a>,
    grading: Grading,
    faces: Vec<(Face, Vec<usize>)>,
    slices: Mutex<HashMap<Vec<usize>, Arc<Slice>>>,
}

/// Ways to write `n` as an ordered sum of `k` positive parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if k == 1 {
        return if n >= 1 { vec![vec![n as u32]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

impl<'a> GradedModule<'a> {
    pub fn new(p: impl Into<PairRef<'a>>, g: &Grading) -> GradedModule<'a> {
        let pair = p.into();
        let faces = pair.all_faces().map(|f| (f.clone(), g.degree(f))).collect();
        GradedModule { pair, grading: g.clone(), faces, slices: Mutex::new(HashMap::new()) }
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn a(&self) -> &[usize] {
        &self.grading.a
    }

    pub fn ambient(&self) -> &'a Complex {
        self.pair.ambient
    }

    /// Faces that support monomials of degree `b`: `deg σ ≤ b` with the same
    /// set of nonzero groups.
    fn supports<'s>(&'s self, b: &'s [usize]) -> impl Iterator<Item = &'s (Face, Vec<usize>)> + 's {
        self.faces.iter().filter(move |(_, k)| {
            k.len() == b.len() && k.iter().zip(b).all(|(&ki, &bi)| ki <= bi && (ki == 0) == (bi == 0))
        })
    }

    /// `dim M_b` by counting, without building the basis.
    pub fn slice_dim(&self, b: &[usize]) -> u64 {
        self.supports(b)
            .map(|(_, k)| {
                k.iter()
                    .zip(b)
                    .map(|(&ki, &bi)| if bi == 0 { 1 } else { binomial(bi - 1, ki - 1).unwrap_or(i64::MAX) as u64 })
                    .product::<u64>()
            })
            .sum()
    }

    /// The monomial basis of `M_b`, sorted lexicographically.
    pub fn slice(&self, b: &[usize]) -> Arc<Slice> {
        if let Some(s) = self.slices.lock().unwrap().get(b) {
            return s.clone();
        }
        let mut basis: Vec<Monomial> = Vec::new();
        for (face, k) in self.supports(b) {
            // per group: the face's vertices in that group and the compositions
            let mut per_group: Vec<(Vec<VertexId>, Vec<Vec<u32>>)> = Vec::new();
            for (i, &bi) in b.iter().enumerate() {
                let vs: Vec<VertexId> =
                    face.vertices().iter().copied().filter(|&v| self.grading.group(v) == i).collect();
                per_group.push((vs, compositions(bi, k[i])));
            }
            let mut partial: Vec<Monomial> = vec![Vec::new()];
            for (vs, comps) in &per_group {
                if vs.is_empty() {
                    continue;
                }
                partial = partial
                    .iter()
                    .flat_map(|m| {
                        comps.iter().map(move |comp| {
                            let mut m = m.clone();
                            m.extend(vs.iter().copied().zip(comp.iter().copied()));
                            m
                        })
                    })
                    .collect();
            }
            for mut m in partial {
                m.sort_unstable();
                basis.push(m);
            }
        }
        basis.sort();
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let s = Arc::new(Slice { degree: b.to_vec(), basis, index });
        self.slices.lock().unwrap().entry(b.to_vec()).or_insert(s).clone()
    }

    /// `x_v · m` as a basis monomial, or `None` when its support is not a face.
    fn times_variable(&self, m: &Monomial, v: VertexId) -> Option<Monomial> {
        let mut out = m.clone();
        match out.binary_search_by_key(&v, |e| e.0) {
            Ok(i) => out[i].1 += 1,
            Err(i) => {
                out.insert(i, (v, 1));
                let support = Face::from_sorted(out.iter().map(|e| e.0).collect());
                if !self.pair.ambient.contains(&support) {
                    return None;
                }
            }
        }
        Some(out)
    }

    fn shifted(&self, b: &[usize], group: usize) -> Vec<usize> {
        let mut c = b.to_vec();
        c[group] += 1;
        c
    }

    /// Images `θ·m` of the basis monomials `m` of `M_b`, as vectors in `M_{b+deg θ}`.
    pub fn multiplication_columns<F: Field>(&self, f: &F, form: &LinearForm<F>, b: &[usize]) -> Vec<Vec<F::Elem>> {
        let src = self.slice(b);
        let dst = self.slice(&self.shifted(b, form.group));
        src.basis
            .iter()
            .map(|m| {
                let mut col = vec![f.zero(); dst.dim()];
                for (&v, c) in &form.coeffs {
                    if let Some(p) = self.times_variable(m, v) {
                        let i = dst.position(&p).expect("product lies in the target slice");
                        col[i] = f.add(&col[i], c);
                    }
                }
                col
            })
            .collect()
    }

    /// `θ·x` for a vector `x ∈ M_b`.
    fn apply<F: Field>(&self, f: &F, form: &LinearForm<F>, b: &[usize], x: &[F::Elem]) -> Vec<F::Elem> {
        let src = self.slice(b);
        let dst = self.slice(&self.shifted(b, form.group));
        let mut out = vec![f.zero(); dst.dim()];
        for (xj, m) in x.iter().zip(&src.basis) {
            if f.is_zero(xj) {
                continue;
            }
            for (&v, c) in &form.coeffs {
                if let Some(p) = self.times_variable(m, v) {
                    let i = dst.position(&p).expect("product lies in the target slice");
                    out[i] = f.add(&out[i], &f.mul(xj, c));
                }
            }
        }
        out
    }

    /// `b − deg θ`, if nonnegative.
    fn below(&self, b: &[usize], group: usize) -> Option<Vec<usize>> {
        let mut c = b.to_vec();
        c[group] = c[group].checked_sub(1)?;
        Some(c)
    }

    /// Echelon basis of `Σ_{j ∈ forms} θ_j M_{b − deg θ_j}` inside `M_b`.
    fn image_span<F: Field>(&self, f: &F, lsop: &Lsop<F>, b: &[usize], skip: Option<usize>) -> Echelon<F> {
        let n = self.slice(b).dim();
        let mut e = Echelon::new(f.clone(), n);
        for (j, form) in lsop.forms.iter().enumerate() {
            if Some(j) == skip || e.is_full() {
                continue;
            }
            if let Some(src) = self.below(b, form.group) {
                for col in self.multiplication_columns(f, form, &src) {
                    e.insert(col);
                    if e.is_full() {
                        break;
                    }
                }
            }
        }
        e
    }

    /// `dim (M/ΘM)_b`.
    pub fn quotient_dim<F: Field>(&self, f: &F, lsop: &Lsop<F>, b: &[usize]) -> usize {
        let n = self.slice(b).dim();
        n - self.image_span(f, lsop, b, None).dim()
    }

    /// Dimensions of `(M/ΘM)_b` and `(M/Σ(Θ;M))_b` together with a basis of
    /// each colon part `((θ_j : j ≠ i)M :_M θ_i)_b`.
    pub fn sigma_slice<F: Field>(&self, f: &F, lsop: &Lsop<F>, b: &[usize]) -> SigmaSlice<F> {
        let n = self.slice(b).dim();
        let mut sigma = self.image_span(f, lsop, b, None);
        let quotient = n - sigma.dim();
        let mut colon = Vec::new();
        for (i, form) in lsop.forms.iter().enumerate() {
            let up = self.shifted(b, form.group);
            let others = self.image_span(f, lsop, &up, Some(i));
            let cols: Vec<Vec<F::Elem>> = self
                .multiplication_columns(f, form, b)
                .into_iter()
                .map(|mut c| {
                    others.reduce(&mut c);
                    c
                })
                .collect();
            let ker = kernel(f, self.slice(&up).dim(), &cols);
            for k in &ker {
                sigma.insert(k.clone());
            }
            colon.push((i, ker));
        }
        SigmaSlice { degree: b.to_vec(), dim: n, quotient, sigma_quotient: n - sigma.dim(), colon }
    }

    /// Checks that `x_v · s ∈ ΘM` for every colon representative `s` and every
    /// variable `x_v`; returns the first failure.
    pub fn socle_violation<F: Field>(&self, f: &F, lsop: &Lsop<F>, s: &SigmaSlice<F>) -> Option<(Vec<usize>, VertexId)> {
        let b = &s.degree;
        for group in 0..self.a().len() {
            let up = self.shifted(b, group);
            let theta = self.image_span(f, lsop, &up, None);
            let vars: Vec<VertexId> =
                self.pair.ambient.vertices().iter().copied().filter(|&v| self.grading.group(v) == group).collect();
            for v in vars {
                let xv = LinearForm { group, coeffs: [(v, f.one())].into_iter().collect() };
                for (_, reps) in &s.colon {
                    for r in reps {
                        if !theta.contains(&self.apply(f, &xv, b, r)) {
                            return Some((b.clone(), v));
                        }
                    }
                }
            }
        }
        None
    }
}

/// One slice of `M/ΘM` and `M/Σ(Θ;M)`.
#[derive(Clone, Debug)]
pub struct SigmaSlice<F: Field> {
    pub degree: Vec<usize>,
    pub dim: usize,
    pub quotient: usize,
    pub sigma_quotient: usize,
    /// `(i, basis of the colon part for θ_i)`.
    pub colon: Vec<(usize, Vec<Vec<F::Elem>>)>,
}

impl<F: Field> SigmaSlice<F> {
    /// `dim (Σ(Θ;M)/ΘM)_b`.
    pub fn socle_dim(&self) -> usize {
        self.quotient - self.sigma_quotient
    }
}

/// A linear form homogeneous of degree `e_group`.
#[derive(Clone, Debug)]
pub struct LinearForm<F: Field> {
    pub group: usize,
    pub coeffs: BTreeMap<VertexId, F::Elem>,
}

/// A graded linear system of parameters: `a_i` forms of degree `e_i`.
#[derive(Clone, Debug)]
pub struct Lsop<F: Field> {
    pub a: Vec<usize>,
    pub forms: Vec<LinearForm<F>>,
}

impl<F: Field> Lsop<F> {
    /// Checks that every facet restriction has full rank, block by block.
    pub fn verify(&self, f: &F, c: &Complex, g: &Grading) -> Result<()> {
        if self.a != g.a {
            return Err(Error::InvalidArgument("l.s.o.p. and grading disagree on a".into()));
        }
        for (i, &ai) in self.a.iter().enumerate() {
            if self.forms.iter().filter(|t| t.group == i).count() != ai {
                return Err(Error::InvalidArgument(format!("group {i} needs exactly {ai} forms")));
            }
        }
        for facet in c.facets() {
            for (i, &ai) in self.a.iter().enumerate() {
                let vs: Vec<VertexId> = facet.vertices().iter().copied().filter(|&v| g.group(v) == i).collect();
                if vs.len() != ai {
                    return Err(Error::NotAnLsop(facet.clone()));
                }
                let rows: Vec<Vec<F::Elem>> = self
                    .forms
                    .iter()
                    .filter(|t| t.group == i)
                    .map(|t| vs.iter().map(|v| t.coeffs.get(v).cloned().unwrap_or_else(|| f.zero())).collect())
                    .collect();
                if crate::linalg::dense_rank(f, &rows) != ai {
                    return Err(Error::NotAnLsop(facet.clone()));
                }
            }
        }
        Ok(())
    }
}

/// A form of degree `e_group` with random nonzero coefficients on every vertex
/// of that group.
pub fn random_form<F: Field, R: Rng + ?Sized>(f: &F, c: &Complex, g: &Grading, group: usize, rng: &mut R) -> LinearForm<F> {
    let coeffs = c
        .vertices()
        .iter()
        .filter(|&&v| g.group(v) == group)
        .map(|&v| (v, f.random_nonzero(rng)))
        .collect();
    LinearForm { group, coeffs }
}

pub const LSOP_RETRIES: usize = 32;

/// Samples colored l.s.o.p.'s until one passes the facet-rank test.
pub fn random_lsop<F: Field, R: Rng + ?Sized>(f: &F, c: &Complex, g: &Grading, rng: &mut R) -> Result<Lsop<F>> {
    for _ in 0..LSOP_RETRIES {
        let forms = g
            .a
            .iter()
            .enumerate()
            .flat_map(|(i, &ai)| std::iter::repeat_n(i, ai))
            .map(|i| random_form(f, c, g, i, rng))
            .collect();
        let lsop = Lsop { a: g.a.clone(), forms };
        match lsop.verify(f, c, g) {
            Ok(()) => return Ok(lsop),
            Err(Error::NotAnLsop(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::LsopNotFound { field: f.name(), attempts: LSOP_RETRIES })
}

/// Outcome of comparing monomial counts with the expansion of
/// `Σ h_b t^b / ∏ (1 − t_i)^{a_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesCheck {
    pub passes: bool,
    pub degrees_checked: usize,
    /// `(c, monomial count, series coefficient)` at the first mismatch.
    pub witness: Option<(Vec<usize>, u64, i64)>,
}

/// All `c ∈ N^m` with `|c| ≤ total`.
fn degrees_up_to(m: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                let used: usize = c.iter().sum();
                (0..=total - used).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    out
}

/// Coefficient of `t^c` in `Σ h_b t^b / ∏ (1 − t_i)^{a_i}`.
pub fn series_coefficient(h: &FlagVector, c: &[usize]) -> Result<i64> {
    let a = h.a();
    let mut total = 0i64;
    for (b, hb) in h.entries() {
        if hb == 0 || !leq(&b, c) {
            continue;
        }
        let mut w = 1i64;
        for i in 0..a.len() {
            let n = c[i] - b[i];
            let k = if a[i] == 0 {
                i64::from(n == 0)
            } else {
                binomial(n + a[i] - 1, a[i] - 1)?
            };
            w = w.checked_mul(k).ok_or(Error::Overflow("Hilbert series"))?;
        }
        total = total.checked_add(w.checked_mul(hb).ok_or(Error::Overflow("Hilbert series"))?).ok_or(Error::Overflow("Hilbert series"))?;
    }
    Ok(total)
}

/// Compares `dim M_c` with the series built from `h` for every `|c| ≤ total`.
pub fn hilbert_series_check_with(module: &GradedModule<'_>, h: &FlagVector, total: usize) -> Result<SeriesCheck> {
    let degrees = degrees_up_to(module.a().len(), total);
    for c in &degrees {
        let count = module.slice_dim(c);
        let series = series_coefficient(h, c)?;
        if i64::try_from(count).ok() != Some(series) {
            return Ok(SeriesCheck { passes: false, degrees_checked: degrees.len(), witness: Some((c.clone(), count, series)) });
        }
    }
    Ok(SeriesCheck { passes: true, degrees_checked: degrees.len(), witness: None })
}

/// [`hilbert_series_check_with`] using the flag h-vector of the module itself.
pub fn hilbert_series_check<'a>(p: impl Into<PairRef<'a>>, g: &Grading, total: usize) -> Result<SeriesCheck> {
    let p = p.into();
    let h = crate::flags::flag_h(p, g)?;
    hilbert_series_check_with(&GradedModule::new(p, g), &h, total)
}

/// Result of a randomized Lefschetz test. `passes` is a certificate: some
/// sampled `(Θ, ω)` had the required rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefschetzOutcome {
    pub passes: bool,
    /// Trials used (the successful one included).
    pub trials: usize,
    /// Field the coefficients were sampled from.
    pub field: String,
    /// Source degree of the multiplication map.
    pub degree: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lefschetz {
    Weak,
    Dual,
}

fn lefschetz<F: Field>(f: &F, c: &Complex, kind: Lefschetz, trials: usize, seed: u64) -> LefschetzOutcome {
    let g = Grading::monochromatic(c);
    let d = g.d();
    let k = match kind {
        Lefschetz::Weak => d / 2,
        Lefschetz::Dual => ((d + 1) / 2).saturating_sub(1),
    };
    let mut out = LefschetzOutcome { passes: false, trials: 0, field: f.name(), degree: k };
    if kind == Lefschetz::Dual && (d + 1) / 2 == 0 {
        // the source degree is −1, so the map is injective
        out.passes = true;
        return out;
    }
    let module = GradedModule::new(c, &g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 1..=trials {
        out.trials = t;
        let Ok(lsop) = random_lsop(f, c, &g, &mut rng) else { continue };
        let omega = random_form(f, c, &g, 0, &mut rng);
        let ok = match kind {
            Lefschetz::Weak => {
                // Θ M_{k+1} + ω M_k = M_{k+1}
                let mut span = module.image_span(f, &lsop, &[k + 1], None);
                for col in module.multiplication_columns(f, &omega, &[k]) {
                    if span.is_full() {
                        break;
                    }
                    span.insert(col);
                }
                span.is_full()
            }
            Lefschetz::Dual => {
                // dim of ω (M/Θ)_k inside (M/Θ)_{k+1} equals dim (M/Θ)_k
                let source = module.quotient_dim(f, &lsop, &[k]);
                let mut span = module.image_span(f, &lsop, &[k + 1], None);
                let before = span.dim();
                for col in module.multiplication_columns(f, &omega, &[k]) {
                    span.insert(col);
                }
                span.dim() - before == source
            }
        };
        if ok {
            out.passes = true;
            return out;
        }
    }
    out
}

/// Randomized weak Lefschetz test in degree `⌊d/2⌋ → ⌊d/2⌋+1`. Coefficients
/// over a prime below [`crate::field::SMALL_PRIME_BOUND`] are drawn from an
/// extension field of the same characteristic.
pub fn wlp_test(c: &Complex, field: FieldSpec, trials: usize, seed: u64) -> LefschetzOutcome {
    with_generic_field!(field, |f| lefschetz(&f, c, Lefschetz::Weak, trials, seed))
}

/// Randomized dual weak Lefschetz test in degree `⌊(d+1)/2⌋−1 → ⌊(d+1)/2⌋`.
pub fn dual_wlp_test(c: &Complex, field: FieldSpec, trials: usize, seed: u64) -> LefschetzOutcome {
    with_generic_field!(field, |f| lefschetz(&f, c, Lefschetz::Dual, trials, seed))
}

pub const DEFAULT_TRIALS: usize = 8;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Grouping;
    use crate::constructions::{barycentric_subdivision, builtin, cross_polytope_boundary, disjoint_union};
    use crate::field::{GaloisField, PrimeField, GENERIC_FIELD_SIZE};
    use crate::flags::{box_degrees, flag_vectors};
    use crate::homology::reduced_betti;
    use crate::manifold::boundary_subcomplex;
    use crate::complex::RelativePair;

    fn identity(c: &Complex, col: &crate::coloring::Coloring) -> Grading {
        Grading::new(c, col, &Grouping::identity(col.d)).unwrap()
    }

    #[test]
    fn slice_bases() {
        let (oct, col) = cross_polytope_boundary(3);
        let m = GradedModule::new(&oct, &identity(&oct, &col));
        let s = m.slice(&[1, 1, 0]);
        assert_eq!(s.dim(), 4);
        assert_eq!(m.slice_dim(&[1, 1, 0]), 4);
        let mono = GradedModule::new(&oct, &Grading::monochromatic(&oct));
        assert_eq!(mono.slice(&[2]).dim(), 18);
        assert_eq!(mono.slice_dim(&[5]), mono.slice(&[5]).dim() as u64);

        // relative slice in a degree only boundary faces can support
        let (c4, _) = cross_polytope_boundary(4);
        let removed = c4.facets()[0].clone();
        let ball = Complex::from_faces(c4.facets()[1..].iter().cloned());
        let bd = boundary_subcomplex(&ball, FieldSpec::Q);
        let pair = RelativePair::new(ball.clone(), bd).unwrap();
        let g = Grading::monochromatic(&ball);
        let rel = GradedModule::new(&pair, &g);
        assert_eq!(rel.slice(&[0]).dim(), 0);
        // x_v^2 for v in the removed facet: its support is a boundary vertex
        let v = removed.vertices()[0];
        assert!(rel.slice(&[2]).position(&vec![(v, 2)]).is_none());
    }

    #[test]
    fn explicit_lsop_on_octahedron() {
        let f = PrimeField::new(32003);
        let (oct, col) = cross_polytope_boundary(3);
        let g = identity(&oct, &col);
        let forms = (1..=3u32)
            .map(|i| LinearForm::<PrimeField> { group: (i - 1) as usize, coeffs: [(i, 1), (i + 3, f.from_i64(-1))].into_iter().collect() })
            .collect();
        let lsop = Lsop { a: g.a.clone(), forms };
        lsop.verify(&f, &oct, &g).unwrap();
        let m = GradedModule::new(&oct, &g);
        assert_eq!(m.quotient_dim(&f, &lsop, &[1, 1, 0]), 1);
        for b in box_degrees(&[2, 2, 2]) {
            if !leq(&b, &g.a) {
                assert_eq!(m.quotient_dim(&f, &lsop, &b), 0, "{b:?}");
            }
        }
        // a form missing a vertex is not an l.s.o.p.
        let mut bad = lsop.clone();
        bad.forms[0].coeffs.remove(&1);
        assert!(matches!(bad.verify(&f, &oct, &g), Err(Error::NotAnLsop(_))));
    }

    #[test]
    fn disjoint_octahedra_quotients() {
        let f = PrimeField::new(32003);
        let (oct, _) = cross_polytope_boundary(3);
        let two = disjoint_union(&oct, &oct);
        let g = Grading::monochromatic(&two);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lsop = random_lsop(&f, &two, &g, &mut rng).unwrap();
        let m = GradedModule::new(&two, &g);
        let slices: Vec<_> = (0..=3).map(|k| m.sigma_slice(&f, &lsop, &[k])).collect();
        assert_eq!(slices.iter().map(|s| s.quotient).collect::<Vec<_>>(), vec![1, 9, 6, 2]);
        assert_eq!(slices.iter().map(|s| s.sigma_quotient).collect::<Vec<_>>(), vec![1, 6, 6, 2]);
        assert_eq!(slices[1].socle_dim(), 3);
        assert_eq!(slices[2].socle_dim(), 0);
        for s in &slices {
            assert_eq!(m.socle_violation(&f, &lsop, s), None);
        }
    }

    #[test]
    fn projective_plane_socle_over_char_two() {
        let f = GaloisField::at_least(2, GENERIC_FIELD_SIZE);
        let (sd, col) = barycentric_subdivision(&builtin("rp2_6").unwrap());
        let g = identity(&sd, &col);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lsop = random_lsop(&f, &sd, &g, &mut rng).unwrap();
        let m = GradedModule::new(&sd, &g);
        let beta = reduced_betti(&sd, FieldSpec::F2);
        let fv = flag_vectors(&sd, &g, FieldSpec::F2).unwrap();
        for b in box_degrees(&g.a) {
            let s = m.sigma_slice(&f, &lsop, &b);
            assert_eq!(s.quotient as i64, fv.h_prime.get(&b), "h' at {b:?}");
            assert_eq!(s.sigma_quotient as i64, fv.h_dprime.get(&b), "h'' at {b:?}");
            let n: usize = b.iter().sum();
            if n == 2 {
                assert_eq!(s.socle_dim(), beta.get(1));
            }
        }
    }

    #[test]
    fn stanley_series() {
        let (oct, col) = cross_polytope_boundary(3);
        assert!(hilbert_series_check(&oct, &identity(&oct, &col), 6).unwrap().passes);
        assert!(hilbert_series_check(&oct, &Grading::monochromatic(&oct), 6).unwrap().passes);
        let g = identity(&oct, &col);
        let h = crate::flags::flag_h(&oct, &g).unwrap();
        let module = GradedModule::new(&oct, &g);
        assert!(hilbert_series_check_with(&module, &h, 6).unwrap().passes);
        let r = hilbert_series_check_with(&module, &bump(&h), 6).unwrap();
        assert!(!r.passes);
        assert_eq!(r.witness.unwrap().0, vec![1, 0, 0]);
    }

    /// Adds one to the entry at `e_0`.
    fn bump(h: &FlagVector) -> FlagVector {
        let mut e = vec![0; h.a().len()];
        e[0] = 1;
        let mut v = h.clone();
        v.add_at(&e, 1);
        v
    }

    #[test]
    fn lefschetz_on_spheres() {
        for d in 2..=4 {
            let (c, _) = cross_polytope_boundary(d);
            for field in [FieldSpec::F2, FieldSpec::F3, FieldSpec::F32003] {
                assert!(wlp_test(&c, field, DEFAULT_TRIALS, 1).passes);
                assert!(dual_wlp_test(&c, field, DEFAULT_TRIALS, 1).passes);
            }
        }
        assert_eq!(wlp_test(&cross_polytope_boundary(3).0, FieldSpec::F2, 8, 1).field, "GF(2^16)");
        let (sd, _) = barycentric_subdivision(&builtin("simplex_boundary:3").unwrap());
        assert!(wlp_test(&sd, FieldSpec::F32003, DEFAULT_TRIALS, 3).passes);
        // a cone over an octahedron: h ends in 0, target of ·ω vanishes
        let (oct, _) = cross_polytope_boundary(3);
        let cone = Complex::from_faces(oct.facets().iter().map(|f| f.with(100)));
        assert!(wlp_test(&cone, FieldSpec::F32003, DEFAULT_TRIALS, 3).passes);
        let points = Complex::from_facets(vec![vec![1u32], vec![2]]).unwrap();
        assert!(dual_wlp_test(&points, FieldSpec::F32003, DEFAULT_TRIALS, 3).passes);
    }

    #[test]
    fn literal_small_field_lsop() {
        // over F2 the only nonzero coefficient is 1, and the all-ones colored
        // forms are an l.s.o.p. for any balanced complex
        let f = PrimeField::new(2);
        let (sd, col) = barycentric_subdivision(&builtin("torus_7").unwrap());
        let g = identity(&sd, &col);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_lsop(&f, &sd, &g, &mut rng).is_ok());
        // monochromatic all-ones forms are linearly dependent on every facet
        let mono = Grading::monochromatic(&sd);
        assert!(matches!(random_lsop(&f, &sd, &mono, &mut rng), Err(Error::LsopNotFound { .. })));
    }
}
