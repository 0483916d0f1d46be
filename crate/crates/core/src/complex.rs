//! Finite abstract simplicial complexes stored by their facets.
//!
//! A [`Complex`] is immutable once built. Its full face lattice is enumerated
//! lazily on first use and cached behind a [`OnceLock`], so shared references
//! can be queried from several threads at once.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;

/// A face, stored as a strictly increasing list of vertex labels.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Face(Vec<VertexId>);

impl Face {
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Face> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex(Face(vertices)));
        }
        Ok(Face(vertices))
    }

    /// Builds a face from a list that is already strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Face {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Face(vertices)
    }

    pub fn empty() -> Face {
        Face(Vec::new())
    }

    pub fn vertex(v: VertexId) -> Face {
        Face(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<VertexId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &Face) -> bool {
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_disjoint(&self, other: &Face) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Face) -> Face {
        let mut v: Vec<VertexId> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Face(v)
    }

    pub fn difference(&self, other: &Face) -> Face {
        Face(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn with(&self, v: VertexId) -> Face {
        let mut out = self.0.clone();
        if let Err(pos) = out.binary_search(&v) {
            out.insert(pos, v);
        }
        Face(out)
    }

    pub fn without(&self, v: VertexId) -> Face {
        Face(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    /// All subfaces with exactly `k` vertices, in lexicographic order.
    pub fn subfaces(&self, k: usize) -> impl Iterator<Item = Face> + '_ {
        self.0.iter().copied().combinations(k).map(Face)
    }

    /// Relabels every vertex through `f`, re-sorting the result.
    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Face> {
        Face::new(self.0.iter().map(|&v| f(v)).collect())
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&[VertexId]> for Face {
    fn from(v: &[VertexId]) -> Self {
        Face::new(v.to_vec()).expect("face with repeated vertex")
    }
}

/// A finite simplicial complex given by its facets.
///
/// Two special complexes have no vertices: the *void* complex, which has no
/// faces at all, and the complex `{∅}` whose only face is the empty face.
/// They differ in reduced homology and as the subcomplex of a relative pair.
pub struct Complex {
    vertices: Vec<VertexId>,
    facets: Vec<Face>,
    dropped: Vec<Face>,
    faces: OnceLock<Vec<Vec<Face>>>,
    face_set: OnceLock<HashSet<Face>>,
    incidence: OnceLock<HashMap<VertexId, Vec<usize>>>,
}

impl Clone for Complex {
    fn clone(&self) -> Self {
        Complex {
            vertices: self.vertices.clone(),
            facets: self.facets.clone(),
            dropped: self.dropped.clone(),
            faces: self.faces.clone(),
            face_set: self.face_set.clone(),
            incidence: self.incidence.clone(),
        }
    }
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.facets == other.facets
    }
}

impl Eq for Complex {}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Complex")
            .field("dim", &self.dim())
            .field("facets", &self.facets)
            .finish()
    }
}

impl Complex {
    /// Validates a facet list. Facets contained in other facets are dropped and
    /// remembered in [`Complex::dropped_facets`].
    pub fn from_facets<I, F>(facets: I) -> Result<Complex>
    where
        I: IntoIterator<Item = F>,
        F: Into<Vec<VertexId>>,
    {
        let faces = facets
            .into_iter()
            .map(|f| {
                let f: Vec<VertexId> = f.into();
                if f.is_empty() {
                    Err(Error::EmptyFacet)
                } else {
                    Face::new(f)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if faces.is_empty() {
            return Err(Error::NoFacets);
        }
        let (kept, dropped) = maximal_faces(faces);
        if !dropped.is_empty() {
            log::warn!("dropped {} non-maximal facet(s)", dropped.len());
        }
        let mut c = Complex::from_maximal(kept);
        c.dropped = dropped;
        Ok(c)
    }

    /// Like [`Complex::from_facets`], but also checks an explicit vertex list:
    /// every listed vertex must lie in some facet and vice versa.
    pub fn from_vertices_and_facets(vertices: &[VertexId], facets: Vec<Vec<VertexId>>) -> Result<Complex> {
        let c = Complex::from_facets(facets)?;
        let listed: BTreeSet<VertexId> = vertices.iter().copied().collect();
        for &v in &listed {
            if c.vertices.binary_search(&v).is_err() {
                return Err(Error::GhostVertex(v));
            }
        }
        for &v in &c.vertices {
            if !listed.contains(&v) {
                return Err(Error::InvalidArgument(format!("facet vertex {v} missing from vertex list")));
            }
        }
        Ok(c)
    }

    /// The complex with no faces at all.
    pub fn void() -> Complex {
        Complex::from_maximal(Vec::new())
    }

    /// The complex `{∅}`.
    pub fn empty_face() -> Complex {
        Complex::from_maximal(vec![Face::empty()])
    }

    /// Builds a complex from faces that may include non-maximal ones.
    pub(crate) fn from_faces(faces: impl IntoIterator<Item = Face>) -> Complex {
        let (kept, _) = maximal_faces(faces.into_iter().collect());
        Complex::from_maximal(kept)
    }

    fn from_maximal(mut facets: Vec<Face>) -> Complex {
        facets.sort();
        facets.dedup();
        if facets.len() > 1 {
            facets.retain(|f| !f.is_empty());
        }
        let vertices: BTreeSet<VertexId> = facets.iter().flat_map(|f| f.0.iter().copied()).collect();
        Complex {
            vertices: vertices.into_iter().collect(),
            facets,
            dropped: Vec::new(),
            faces: OnceLock::new(),
            face_set: OnceLock::new(),
            incidence: OnceLock::new(),
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Face] {
        &self.facets
    }

    /// Facets that were dropped at construction for being non-maximal.
    pub fn dropped_facets(&self) -> &[Face] {
        &self.dropped
    }

    pub fn is_void(&self) -> bool {
        self.facets.is_empty()
    }

    /// Dimension; `-1` for `{∅}` and for the void complex.
    pub fn dim(&self) -> isize {
        self.facets.iter().map(|f| f.dim()).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        self.facets.iter().map(Face::len).all_equal()
    }

    fn face_table(&self) -> &Vec<Vec<Face>> {
        self.faces.get_or_init(|| {
            if self.facets.is_empty() {
                return Vec::new();
            }
            let top = self.facets.iter().map(Face::len).max().unwrap_or(0);
            let mut levels: Vec<HashSet<Face>> = vec![HashSet::new(); top + 1];
            for facet in &self.facets {
                for k in 0..=facet.len() {
                    for sub in facet.subfaces(k) {
                        levels[k].insert(sub);
                    }
                }
            }
            levels
                .into_iter()
                .map(|s| {
                    let mut v: Vec<Face> = s.into_iter().collect();
                    v.sort();
                    v
                })
                .collect()
        })
    }

    /// The `k`-dimensional faces in lexicographic order; `k = -1` gives `[∅]`.
    pub fn faces(&self, k: isize) -> &[Face] {
        let table = self.face_table();
        usize::try_from(k + 1)
            .ok()
            .and_then(|i| table.get(i))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Every face, ordered by dimension and then lexicographically.
    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.face_table().iter().flatten()
    }

    pub fn num_faces(&self) -> usize {
        self.face_table().iter().map(Vec::len).sum()
    }

    pub fn contains(&self, face: &Face) -> bool {
        if face.is_empty() {
            return !self.is_void();
        }
        self.face_set
            .get_or_init(|| self.face_table().iter().flatten().cloned().collect())
            .contains(face)
    }

    /// `(f_{-1}, f_0, …, f_{dim})`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.face_table().iter().map(Vec::len).collect()
    }

    fn incidence(&self) -> &HashMap<VertexId, Vec<usize>> {
        self.incidence.get_or_init(|| {
            let mut map: HashMap<VertexId, Vec<usize>> = HashMap::new();
            for (i, f) in self.facets.iter().enumerate() {
                for &v in f.vertices() {
                    map.entry(v).or_default().push(i);
                }
            }
            map
        })
    }

    /// Facets containing `face`.
    pub fn facets_containing<'a>(&'a self, face: &'a Face) -> Box<dyn Iterator<Item = &'a Face> + 'a> {
        match face.vertices().first() {
            None => Box::new(self.facets.iter()),
            Some(v) => Box::new(
                self.incidence()
                    .get(v)
                    .into_iter()
                    .flatten()
                    .map(|&i| &self.facets[i])
                    .filter(move |f| face.is_subset(f)),
            ),
        }
    }

    pub fn link(&self, sigma: &Face) -> Result<Complex> {
        if !self.contains(sigma) {
            return Err(Error::FaceNotInComplex(sigma.clone()));
        }
        if sigma.is_empty() {
            return Ok(self.clone());
        }
        let faces: Vec<Face> = self.facets_containing(sigma).map(|f| f.difference(sigma)).collect();
        Ok(Complex::from_faces(faces))
    }

    pub fn star(&self, sigma: &Face) -> Result<Complex> {
        if !self.contains(sigma) {
            return Err(Error::FaceNotInComplex(sigma.clone()));
        }
        Ok(Complex::from_maximal(self.facets_containing(sigma).cloned().collect()))
    }

    /// Neighbours of `v` in the 1-skeleton.
    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incidence()
            .get(&v)
            .into_iter()
            .flatten()
            .flat_map(|&i| self.facets[i].vertices().iter().copied())
            .filter(|&w| w != v)
            .collect()
    }

    /// Connected components of the 1-skeleton, each with its facets.
    pub fn connected_components(&self) -> Vec<Complex> {
        let idx: HashMap<VertexId, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in &self.facets {
            let mut it = f.vertices().iter();
            if let Some(first) = it.next() {
                let a = find(&mut parent, idx[first]);
                for v in it {
                    let b = find(&mut parent, idx[v]);
                    parent[b] = a;
                }
            }
        }
        let mut groups: Vec<(usize, Vec<Face>)> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for f in &self.facets {
            let Some(first) = f.vertices().first() else { continue };
            let root = find(&mut parent, idx[first]);
            let s = *slot.entry(root).or_insert_with(|| {
                groups.push((root, Vec::new()));
                groups.len() - 1
            });
            groups[s].1.push(f.clone());
        }
        groups.into_iter().map(|(_, fs)| Complex::from_maximal(fs)).collect()
    }

    /// The subcomplex generated by `faces` (each must be a face of `self`).
    pub fn subcomplex(&self, faces: impl IntoIterator<Item = Face>) -> Result<Complex> {
        let faces: Vec<Face> = faces.into_iter().collect();
        for f in &faces {
            if !self.contains(f) {
                return Err(Error::FaceNotInComplex(f.clone()));
            }
        }
        Ok(Complex::from_faces(faces))
    }

    /// Applies a vertex relabelling. The map must be injective on faces.
    pub fn relabel(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Complex> {
        let facets = self.facets.iter().map(|x| x.map(&f)).collect::<Result<Vec<_>>>()?;
        Ok(Complex::from_faces(facets))
    }

    pub fn max_label(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }
}

/// Splits `faces` into the inclusion-maximal ones and the rest.
fn maximal_faces(mut faces: Vec<Face>) -> (Vec<Face>, Vec<Face>) {
    faces.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    faces.dedup();
    let mut kept: Vec<Face> = Vec::new();
    let mut dropped = Vec::new();
    let mut by_vertex: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for f in faces {
        let covered = match f.vertices().first() {
            None => !kept.is_empty(),
            Some(v) => by_vertex
                .get(v)
                .is_some_and(|ix| ix.iter().any(|&i| f.is_subset(&kept[i]))),
        };
        if covered {
            dropped.push(f);
        } else {
            for &v in f.vertices() {
                by_vertex.entry(v).or_default().push(kept.len());
            }
            kept.push(f);
        }
    }
    (kept, dropped)
}

/// A simplicial complex together with a subcomplex. The faces of the pair are
/// the faces of `ambient` not in `sub`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativePair {
    ambient: Complex,
    sub: Complex,
}

impl RelativePair {
    pub fn new(ambient: Complex, sub: Complex) -> Result<RelativePair> {
        for f in sub.facets() {
            if !ambient.contains(f) {
                return Err(Error::FaceNotInComplex(f.clone()));
            }
        }
        Ok(RelativePair { ambient, sub })
    }

    /// The pair `(c, void)`, which behaves exactly like `c` itself.
    pub fn absolute(c: Complex) -> RelativePair {
        RelativePair { ambient: c, sub: Complex::void() }
    }

    pub fn ambient(&self) -> &Complex {
        &self.ambient
    }

    pub fn sub(&self) -> &Complex {
        &self.sub
    }

    pub fn is_absolute(&self) -> bool {
        self.sub.is_void()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.ambient.contains(face) && !self.sub.contains(face)
    }

    /// Faces of the pair of dimension `k`.
    pub fn faces(&self, k: isize) -> impl Iterator<Item = &Face> {
        self.ambient.faces(k).iter().filter(move |f| !self.sub.contains(f))
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.ambient.all_faces().filter(move |f| !self.sub.contains(f))
    }

    /// Number of faces in each dimension `-1..=dim(ambient)`.
    pub fn f_vector(&self) -> Vec<usize> {
        (-1..=self.ambient.dim()).map(|k| self.faces(k).count()).collect()
    }
}

/// A borrowed complex or pair; the absolute case has no subcomplex.
#[derive(Clone, Copy, Debug)]
pub struct PairRef<'a> {
    pub ambient: &'a Complex,
    pub sub: Option<&'a Complex>,
}

impl<'a> PairRef<'a> {
    pub fn contains(&self, face: &Face) -> bool {
        self.ambient.contains(face) && self.sub.is_none_or(|s| !s.contains(face))
    }

    pub fn faces(&self, k: isize) -> impl Iterator<Item = &'a Face> + 'a {
        let sub = self.sub;
        self.ambient.faces(k).iter().filter(move |f| sub.is_none_or(|s| !s.contains(f)))
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &'a Face> + 'a {
        let sub = self.sub;
        self.ambient.all_faces().filter(move |f| sub.is_none_or(|s| !s.contains(f)))
    }

    pub fn is_absolute(&self) -> bool {
        self.sub.is_none()
    }

    /// Number of faces in each dimension `-1..=dim(ambient)`.
    pub fn f_vector(&self) -> Vec<usize> {
        (-1..=self.ambient.dim()).map(|k| self.faces(k).count()).collect()
    }
}

impl<'a> From<&'a Complex> for PairRef<'a> {
    fn from(c: &'a Complex) -> Self {
        PairRef { ambient: c, sub: None }
    }
}

impl<'a> From<&'a RelativePair> for PairRef<'a> {
    fn from(p: &'a RelativePair) -> Self {
        PairRef { ambient: &p.ambient, sub: (!p.sub.is_void()).then_some(&p.sub) }
    }
}

impl From<Complex> for RelativePair {
    fn from(c: Complex) -> Self {
        RelativePair::absolute(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::cross_polytope_boundary;

    fn c(facets: &[&[u32]]) -> Complex {
        Complex::from_facets(facets.iter().map(|f| f.to_vec())).unwrap()
    }

    #[test]
    fn triangle_boundary() {
        let t = c(&[&[1, 2], &[2, 3], &[1, 3]]);
        assert_eq!(t.dim(), 1);
        assert_eq!(t.facets().len(), 3);
        assert_eq!(t.f_vector(), vec![1, 3, 3]);
    }

    #[test]
    fn non_maximal_facet_is_dropped() {
        let t = c(&[&[1, 2, 3], &[1, 2]]);
        assert_eq!(t.facets(), &[Face::from(&[1, 2, 3][..])]);
        assert_eq!(t.dropped_facets(), &[Face::from(&[1, 2][..])]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Complex::from_facets(vec![vec![1u32, 1, 2]]), Err(Error::DuplicateVertex(_))));
        assert!(matches!(Complex::from_facets(Vec::<Vec<u32>>::new()), Err(Error::NoFacets)));
        assert!(matches!(Complex::from_facets(vec![Vec::<u32>::new()]), Err(Error::EmptyFacet)));
        assert!(matches!(
            Complex::from_vertices_and_facets(&[1, 2, 3, 9], vec![vec![1, 2, 3]]),
            Err(Error::GhostVertex(9))
        ));
    }

    #[test]
    fn octahedron_faces() {
        let (oct, _) = cross_polytope_boundary(3);
        assert_eq!(oct.f_vector(), vec![1, 6, 12, 8]);
        assert_eq!(oct.faces(1).len(), 12);
        assert_eq!(oct.faces(-1), &[Face::empty()]);
        assert!(oct.faces(7).is_empty());
        let (c4, _) = cross_polytope_boundary(4);
        assert_eq!(c4.faces(2).len(), 32);
        assert_eq!(c4.f_vector(), vec![1, 8, 24, 32, 16]);
    }

    #[test]
    fn link_and_star_of_octahedron_vertex() {
        let (oct, _) = cross_polytope_boundary(3);
        // +1 is vertex 1; ±2 are 2 and 5, ±3 are 3 and 6.
        let lk = oct.link(&Face::vertex(1)).unwrap();
        assert_eq!(lk.vertices(), &[2, 3, 5, 6]);
        assert_eq!(lk.f_vector(), vec![1, 4, 4]);
        let st = oct.star(&Face::vertex(1)).unwrap();
        assert_eq!(st.facets().len(), 4);
        assert_eq!(oct.link(&Face::empty()).unwrap(), oct);
        assert!(matches!(oct.link(&Face::from(&[1, 4][..])), Err(Error::FaceNotInComplex(_))));
    }

    #[test]
    fn link_of_facet_is_empty_face_complex() {
        let t = c(&[&[1, 2, 3]]);
        let lk = t.link(&Face::from(&[1, 2, 3][..])).unwrap();
        assert_eq!(lk, Complex::empty_face());
        assert_eq!(lk.f_vector(), vec![1]);
        assert!(!lk.is_void());
    }

    #[test]
    fn purity_and_components() {
        let (oct, _) = cross_polytope_boundary(3);
        assert!(oct.is_pure());
        assert_eq!(oct.connected_components().len(), 1);
        let two = crate::constructions::disjoint_union(&oct, &oct);
        assert!(two.is_pure());
        assert_eq!(two.connected_components().len(), 2);
        assert!(!c(&[&[1, 2, 3], &[3, 4]]).is_pure());
    }

    #[test]
    fn void_and_empty_face() {
        let v = Complex::void();
        assert!(v.is_void());
        assert!(!v.contains(&Face::empty()));
        assert_eq!(v.f_vector(), Vec::<usize>::new());
        let e = Complex::empty_face();
        assert!(e.contains(&Face::empty()));
        assert_eq!(e.dim(), -1);
    }

    #[test]
    fn relative_pair_faces() {
        let (oct, _) = cross_polytope_boundary(3);
        let pair = RelativePair::new(oct.clone(), oct.clone()).unwrap();
        assert_eq!(pair.f_vector(), vec![0, 0, 0, 0]);
        let abs = RelativePair::absolute(oct.clone());
        assert_eq!(abs.f_vector(), oct.f_vector());
        let bad = RelativePair::new(c(&[&[1, 2]]), c(&[&[1, 3]]));
        assert!(bad.is_err());
    }

    #[test]
    fn subset_and_disjoint() {
        let a = Face::from(&[1, 3][..]);
        let b = Face::from(&[1, 2, 3][..]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert!(Face::empty().is_subset(&a));
        assert!(!a.is_disjoint(&b));
        assert!(Face::from(&[4][..]).is_disjoint(&b));
    }
}
