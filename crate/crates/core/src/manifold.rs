//! Link-homology criteria: Cohen–Macaulay, Buchsbaum, homology manifolds and
//! their boundaries.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Face};
use crate::field::FieldSpec;
use crate::homology::{reduced_betti, BettiVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    ClosedHomologyManifold,
    HomologyManifoldWithBoundary,
    CohenMacaulay,
    Buchsbaum,
    None,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::ClosedHomologyManifold => "closed-homology-manifold",
            Label::HomologyManifoldWithBoundary => "homology-manifold-with-boundary",
            Label::CohenMacaulay => "cohen-macaulay",
            Label::Buchsbaum => "buchsbaum",
            Label::None => "none",
        };
        f.write_str(s)
    }
}

/// The most specific label together with every label that holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub field: FieldSpec,
    pub primary: Label,
    pub labels: Vec<Label>,
}

impl Classification {
    pub fn has(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }

    pub fn is_manifold(&self) -> bool {
        self.has(Label::ClosedHomologyManifold) || self.has(Label::HomologyManifoldWithBoundary)
    }

    pub fn is_buchsbaum(&self) -> bool {
        self.has(Label::Buchsbaum)
    }

    pub fn is_cohen_macaulay(&self) -> bool {
        self.has(Label::CohenMacaulay)
    }
}

/// Reduced homology of every link, the empty face included.
pub struct LinkHomology {
    d: usize,
    pure: bool,
    links: HashMap<Face, BettiVector>,
}

impl LinkHomology {
    pub fn new(c: &Complex, field: FieldSpec) -> LinkHomology {
        let faces: Vec<&Face> = c.all_faces().collect();
        let links = faces
            .par_iter()
            .map(|&f| {
                let lk = c.link(f).expect("face of the complex");
                (f.clone(), reduced_betti(&lk, field))
            })
            .collect();
        LinkHomology { d: (c.dim() + 1).max(0) as usize, pure: c.is_pure(), links }
    }

    pub fn get(&self, sigma: &Face) -> Option<&BettiVector> {
        self.links.get(sigma)
    }

    /// Top dimension a link of `sigma` would have in a pure complex.
    fn expected_dim(&self, sigma: &Face) -> isize {
        self.d as isize - 1 - sigma.len() as isize
    }

    fn nonempty(&self) -> impl Iterator<Item = (&Face, &BettiVector)> {
        self.links.iter().filter(|(f, _)| !f.is_empty())
    }

    fn only_top(&self, sigma: &Face, b: &BettiVector) -> bool {
        let k = self.expected_dim(sigma);
        (-1..b.betti.len() as isize - 1).all(|i| i == k || b.get(i) == 0)
    }

    pub fn is_cohen_macaulay(&self) -> bool {
        self.pure && !self.links.is_empty() && self.links.iter().all(|(f, b)| self.only_top(f, b))
    }

    /// Pure with Cohen–Macaulay vertex links, i.e. every nonempty face has
    /// link homology concentrated in the top degree.
    pub fn is_buchsbaum(&self) -> bool {
        self.pure && !self.links.is_empty() && self.nonempty().all(|(f, b)| self.only_top(f, b))
    }

    pub fn is_closed_manifold(&self) -> bool {
        self.pure && !self.links.is_empty() && self.nonempty().all(|(f, b)| b.is_sphere(self.expected_dim(f)))
    }

    /// Nonempty faces whose links are acyclic.
    pub fn acyclic_faces(&self) -> Vec<Face> {
        let mut v: Vec<Face> = self.nonempty().filter(|(_, b)| b.is_acyclic()).map(|(f, _)| f.clone()).collect();
        v.sort();
        v
    }

    fn links_sphere_or_ball(&self) -> bool {
        self.pure
            && !self.links.is_empty()
            && self.nonempty().all(|(f, b)| b.is_acyclic() || b.is_sphere(self.expected_dim(f)))
    }
}

/// The complex generated by the nonempty faces with acyclic links, or the void
/// complex when there are none.
pub fn boundary_subcomplex(c: &Complex, field: FieldSpec) -> Complex {
    boundary_with(&LinkHomology::new(c, field))
}

pub fn boundary_with(lh: &LinkHomology) -> Complex {
    let faces = lh.acyclic_faces();
    if faces.is_empty() {
        Complex::void()
    } else {
        Complex::from_faces(faces)
    }
}

pub fn classify(c: &Complex, field: FieldSpec) -> Classification {
    classify_with(c, &LinkHomology::new(c, field), field)
}

pub fn classify_with(c: &Complex, lh: &LinkHomology, field: FieldSpec) -> Classification {
    let mut labels = Vec::new();
    if lh.is_closed_manifold() {
        labels.push(Label::ClosedHomologyManifold);
    } else if lh.links_sphere_or_ball() {
        let boundary = boundary_with(lh);
        let ok = !boundary.is_void()
            && boundary.dim() == c.dim() - 1
            && LinkHomology::new(&boundary, field).is_closed_manifold();
        if ok {
            labels.push(Label::HomologyManifoldWithBoundary);
        }
    }
    if lh.is_cohen_macaulay() {
        labels.push(Label::CohenMacaulay);
    }
    if lh.is_buchsbaum() {
        labels.push(Label::Buchsbaum);
    }
    let primary = labels.first().copied().unwrap_or(Label::None);
    if labels.is_empty() {
        labels.push(Label::None);
    }
    Classification { field, primary, labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{barycentric_subdivision, builtin, cross_polytope_boundary, disjoint_union};

    fn cx(facets: &[&[u32]]) -> Complex {
        Complex::from_facets(facets.iter().map(|f| f.to_vec())).unwrap()
    }

    #[test]
    fn spheres_are_closed_manifolds() {
        let (c4, _) = cross_polytope_boundary(4);
        for field in [FieldSpec::Q, FieldSpec::F2, FieldSpec::F3] {
            let cl = classify(&c4, field);
            assert_eq!(cl.primary, Label::ClosedHomologyManifold);
            assert!(cl.is_cohen_macaulay() && cl.is_buchsbaum());
            assert!(boundary_subcomplex(&c4, field).is_void());
        }
    }

    #[test]
    fn projective_plane() {
        let (sd, _) = barycentric_subdivision(&builtin("rp2_6").unwrap());
        for field in [FieldSpec::Q, FieldSpec::F2] {
            assert_eq!(classify(&sd, field).primary, Label::ClosedHomologyManifold);
        }
        // acyclic over Q, so Reisner holds on ∅ there but not over F2
        assert!(classify(&sd, FieldSpec::Q).is_cohen_macaulay());
        assert!(!classify(&sd, FieldSpec::F2).is_cohen_macaulay());
        assert!(boundary_subcomplex(&sd, FieldSpec::Q).is_void());
    }

    #[test]
    fn disjoint_spheres() {
        let (oct, _) = cross_polytope_boundary(3);
        let cl = classify(&disjoint_union(&oct, &oct), FieldSpec::Q);
        assert!(cl.is_buchsbaum());
        assert!(!cl.is_cohen_macaulay());
        assert_eq!(cl.primary, Label::ClosedHomologyManifold);
    }

    #[test]
    fn ball_boundary() {
        let (c4, _) = cross_polytope_boundary(4);
        let removed = c4.facets()[0].clone();
        let ball = Complex::from_faces(c4.facets()[1..].iter().cloned());
        let bd = boundary_subcomplex(&ball, FieldSpec::Q);
        assert_eq!(bd, Complex::from_faces(removed.subfaces(3)));
        let cl = classify(&ball, FieldSpec::Q);
        assert_eq!(cl.primary, Label::HomologyManifoldWithBoundary);
        assert!(cl.is_cohen_macaulay());
    }

    #[test]
    fn cone_boundary() {
        let (oct, _) = cross_polytope_boundary(3);
        let cone = Complex::from_faces(oct.facets().iter().map(|f| f.with(100)));
        assert_eq!(boundary_subcomplex(&cone, FieldSpec::Q), oct);
    }

    #[test]
    fn non_pure_is_none() {
        let cl = classify(&cx(&[&[1, 2, 3], &[3, 4]]), FieldSpec::Q);
        assert_eq!(cl.primary, Label::None);
        assert_eq!(cl.labels, vec![Label::None]);
    }
}
