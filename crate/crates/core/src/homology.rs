//! Reduced and relative simplicial homology with field coefficients.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, Face, PairRef, RelativePair};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::ExactMatrix;
use crate::manifold;

/// Reduced Betti numbers `β̃_{-1}, β̃_0, …, β̃_{dim}` over a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiVector {
    pub field: FieldSpec,
    pub betti: Vec<usize>,
}

impl BettiVector {
    /// `β̃_k`; zero outside the stored range.
    pub fn get(&self, k: isize) -> usize {
        usize::try_from(k + 1)
            .ok()
            .and_then(|i| self.betti.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// `β̃_0, β̃_1, …` without the `k = -1` entry.
    pub fn from_dim0(&self) -> &[usize] {
        self.betti.get(1..).unwrap_or(&[])
    }

    pub fn is_acyclic(&self) -> bool {
        self.betti.iter().all(|&b| b == 0)
    }

    /// Homology of a `k`-sphere: `β̃_i = δ_{ik}` (`k = -1` is `{∅}`).
    pub fn is_sphere(&self, k: isize) -> bool {
        (-1..self.betti.len() as isize - 1).all(|i| self.get(i) == usize::from(i == k)) && self.get(k) == 1
    }

    /// Euler characteristic `Σ (-1)^k β̃_k` over `k ≥ -1`.
    pub fn reduced_euler(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 1 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} over {}", self.from_dim0(), self.field)
    }
}

fn boundary_of(p: PairRef<'_>, k: isize) -> ExactMatrix {
    let rows: Vec<&Face> = p.faces(k - 1).collect();
    let cols: Vec<&Face> = p.faces(k).collect();
    let index: HashMap<&Face, usize> = rows.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let columns = cols
        .iter()
        .map(|sigma| {
            let vs = sigma.vertices();
            (0..vs.len())
                .filter_map(|i| {
                    let tau = sigma.without(vs[i]);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    index.get(&tau).map(|&r| (r, sign))
                })
                .collect()
        })
        .collect();
    ExactMatrix::from_columns(rows.len(), columns)
}

/// Matrix of `∂_k : C_k → C_{k-1}`; rows are `(k-1)`-faces and columns
/// `k`-faces, both in lexicographic order. `k = 0` maps vertices to `∅`.
pub fn boundary_matrix(c: &Complex, k: isize) -> ExactMatrix {
    boundary_of(c.into(), k)
}

/// Boundary matrix of the relative chain complex of a pair.
pub fn relative_boundary_matrix(pair: &RelativePair, k: isize) -> ExactMatrix {
    boundary_of(pair.into(), k)
}

/// Reduced Betti numbers of a complex or, for a pair, of the relative chain
/// complex spanned by the faces of `Δ∖Γ`.
pub fn betti<'a>(p: impl Into<PairRef<'a>>, field: FieldSpec) -> BettiVector {
    let p = p.into();
    if p.ambient.is_void() {
        return BettiVector { field, betti: Vec::new() };
    }
    let top = p.ambient.dim();
    let dims: Vec<usize> = (-1..=top).map(|k| p.faces(k).count()).collect();
    let ranks: Vec<usize> = (0..=top)
        .into_par_iter()
        .map(|k| boundary_of(p, k).rank(field))
        .collect();
    let rank = |k: isize| -> usize {
        if (0..=top).contains(&k) {
            ranks[k as usize]
        } else {
            0
        }
    };
    let betti = (-1..=top)
        .map(|k| dims[(k + 1) as usize] - rank(k) - rank(k + 1))
        .collect();
    BettiVector { field, betti }
}

/// Reduced Betti numbers of `c`. The void complex has an empty vector and `{∅}`
/// has `β̃_{-1} = 1`.
pub fn reduced_betti(c: &Complex, field: FieldSpec) -> BettiVector {
    betti(c, field)
}

/// Betti numbers of the relative chain complex spanned by faces of `Δ∖Γ`.
pub fn relative_betti(pair: &RelativePair, field: FieldSpec) -> BettiVector {
    betti(pair, field)
}

/// Whether the top relative Betti number `β̃_{d-1}(Δ, ∂Δ)` equals the number
/// of connected components.
pub fn is_orientable(c: &Complex, field: FieldSpec) -> Result<bool> {
    let class = manifold::classify(c, field);
    if !class.is_manifold() {
        return Err(Error::NotAManifold(field.to_string()));
    }
    let boundary = manifold::boundary_subcomplex(c, field);
    let pair = RelativePair::new(c.clone(), boundary)?;
    let top = relative_betti(&pair, field).get(c.dim());
    Ok(top == c.connected_components().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{barycentric_subdivision, builtin, cross_polytope_boundary, disjoint_union};
    use proptest::prelude::*;

    fn cx(facets: &[&[u32]]) -> Complex {
        Complex::from_facets(facets.iter().map(|f| f.to_vec())).unwrap()
    }

    #[test]
    fn boundary_matrices() {
        let t = cx(&[&[1, 2], &[2, 3], &[1, 3]]);
        let d1 = boundary_matrix(&t, 1);
        assert_eq!((d1.rows(), d1.cols()), (3, 3));
        assert_eq!(d1.rank(FieldSpec::Q), 2);
        let d0 = boundary_matrix(&t, 0);
        assert_eq!((d0.rows(), d0.cols()), (1, 3));
        assert!((0..3).all(|j| d0.get(0, j) == 1));

        let (oct, _) = cross_polytope_boundary(3);
        let d2 = boundary_matrix(&oct, 2);
        assert_eq!((d2.rows(), d2.cols()), (12, 8));
        assert_eq!(d2.rank(FieldSpec::Q), 7);
    }

    #[test]
    fn sphere_and_projective_plane() {
        let (c4, _) = cross_polytope_boundary(4);
        assert_eq!(reduced_betti(&c4, FieldSpec::Q).from_dim0(), &[0, 0, 0, 1]);
        let (sd, _) = barycentric_subdivision(&builtin("rp2_6").unwrap());
        assert_eq!(reduced_betti(&sd, FieldSpec::F2).from_dim0(), &[0, 1, 1]);
        assert_eq!(reduced_betti(&sd, FieldSpec::Q).from_dim0(), &[0, 0, 0]);
        assert_eq!(reduced_betti(&sd, FieldSpec::F3).from_dim0(), &[0, 0, 0]);
    }

    #[test]
    fn disjoint_octahedra() {
        let (oct, _) = cross_polytope_boundary(3);
        let two = disjoint_union(&oct, &oct);
        let b = reduced_betti(&two, FieldSpec::Q);
        assert_eq!(b.from_dim0(), &[1, 0, 2]);
        assert_eq!(b.get(-1), 0);
    }

    #[test]
    fn special_complexes() {
        assert_eq!(reduced_betti(&Complex::empty_face(), FieldSpec::Q).betti, vec![1]);
        assert!(reduced_betti(&Complex::void(), FieldSpec::Q).betti.is_empty());
        let torus = builtin("torus_7").unwrap();
        assert_eq!(reduced_betti(&torus, FieldSpec::Q).from_dim0(), &[0, 2, 1]);
    }

    #[test]
    fn relative_homology() {
        let (c4, _) = cross_polytope_boundary(4);
        let abs = RelativePair::absolute(c4.clone());
        assert_eq!(relative_betti(&abs, FieldSpec::Q), reduced_betti(&c4, FieldSpec::Q));

        let removed = c4.facets()[0].clone();
        let ball = Complex::from_faces(c4.facets()[1..].iter().cloned());
        let sphere = Complex::from_faces(removed.subfaces(3));
        let pair = RelativePair::new(ball, sphere).unwrap();
        assert_eq!(relative_betti(&pair, FieldSpec::Q).from_dim0(), &[0, 0, 0, 1]);

        let (oct, _) = cross_polytope_boundary(3);
        let same = RelativePair::new(oct.clone(), oct).unwrap();
        assert!(relative_betti(&same, FieldSpec::Q).is_acyclic());
    }

    #[test]
    fn orientability() {
        let (c4, _) = cross_polytope_boundary(4);
        assert!(is_orientable(&c4, FieldSpec::Q).unwrap());
        let (sd, _) = barycentric_subdivision(&builtin("rp2_6").unwrap());
        assert!(!is_orientable(&sd, FieldSpec::Q).unwrap());
        assert!(is_orientable(&sd, FieldSpec::F2).unwrap());
        let (oct, _) = cross_polytope_boundary(3);
        assert!(is_orientable(&disjoint_union(&oct, &oct), FieldSpec::Q).unwrap());
        assert!(matches!(is_orientable(&cx(&[&[1, 2, 3], &[3, 4]]), FieldSpec::Q), Err(Error::NotAManifold(_))));
    }

    #[test]
    fn cone_is_acyclic() {
        let (oct, _) = cross_polytope_boundary(3);
        let star = oct.star(&Face::vertex(1)).unwrap();
        assert!(reduced_betti(&star, FieldSpec::Q).is_acyclic());
    }

    pub(crate) fn arb_complex() -> impl Strategy<Value = Complex> {
        proptest::collection::vec(proptest::collection::btree_set(0u32..8, 1..5), 1..8)
            .prop_map(|fs| Complex::from_facets(fs.into_iter().map(|s| s.into_iter().collect::<Vec<_>>())).unwrap())
    }

    proptest! {
        #[test]
        fn boundary_squares_to_zero(c in arb_complex()) {
            for k in 1..=c.dim() {
                prop_assert!(boundary_matrix(&c, k).mul(&boundary_matrix(&c, k + 1)).is_zero());
            }
        }

        #[test]
        fn euler_relation_and_field_comparison(c in arb_complex()) {
            let f = c.f_vector();
            let chi: i64 = f.iter().enumerate().map(|(i, &n)| if i % 2 == 1 { n as i64 } else { -(n as i64) }).sum();
            let q = reduced_betti(&c, FieldSpec::Q);
            for field in [FieldSpec::Q, FieldSpec::F2, FieldSpec::F3] {
                let b = reduced_betti(&c, field);
                prop_assert_eq!(b.reduced_euler(), chi);
                for k in -1..=c.dim() {
                    prop_assert!(b.get(k) >= q.get(k));
                }
            }
        }

        #[test]
        fn subdivision_preserves_homology(c in arb_complex()) {
            let (sd, _) = barycentric_subdivision(&c);
            for field in [FieldSpec::Q, FieldSpec::F2] {
                prop_assert_eq!(reduced_betti(&sd, field), reduced_betti(&c, field));
            }
        }
    }
}
