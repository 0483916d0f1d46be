//! Flag f-, h-, h'- and h''-vectors indexed by multidegrees `b ≤ a`, and their
//! classical (ungraded) counterparts.

use num_rational::Rational64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::coloring::Grading;
use crate::complex::PairRef;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::homology::{betti, BettiVector};

pub type MultiDegree = Vec<usize>;

/// `b ≤ a` componentwise.
pub fn leq(b: &[usize], a: &[usize]) -> bool {
    b.len() == a.len() && b.iter().zip(a).all(|(x, y)| x <= y)
}

/// All `b ≤ a` in lexicographic order.
pub fn box_degrees(a: &[usize]) -> Vec<MultiDegree> {
    let mut out = vec![Vec::new()];
    for &ai in a {
        out = out
            .into_iter()
            .flat_map(|b| {
                (0..=ai).map(move |x| {
                    let mut b = b.clone();
                    b.push(x);
                    b
                })
            })
            .collect();
    }
    out
}

pub fn binomial(n: usize, k: usize) -> Result<i64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut r: i64 = 1;
    for i in 0..k {
        r = r
            .checked_mul((n - i) as i64)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as i64 + 1);
    }
    Ok(r)
}

/// `(a choose b) = ∏ C(a_i, b_i)`.
pub fn multi_binomial(a: &[usize], b: &[usize]) -> Result<i64> {
    a.iter().zip(b).try_fold(1i64, |acc, (&x, &y)| {
        acc.checked_mul(binomial(x, y)?).ok_or(Error::Overflow("multinomial coefficient"))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlagKind {
    F,
    H,
    HPrime,
    HDoublePrime,
}

/// An integer table over `{b : b ≤ a}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagVector {
    pub kind: FlagKind,
    a: Vec<usize>,
    values: Vec<i64>,
}

impl FlagVector {
    fn zeros(kind: FlagKind, a: &[usize]) -> FlagVector {
        let size = a.iter().map(|x| x + 1).product();
        FlagVector { kind, a: a.to_vec(), values: vec![0; size] }
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    fn index(&self, b: &[usize]) -> Option<usize> {
        if !leq(b, &self.a) {
            return None;
        }
        Some(b.iter().zip(&self.a).fold(0, |acc, (&x, &y)| acc * (y + 1) + x))
    }

    /// The entry at `b`; zero outside the box.
    pub fn get(&self, b: &[usize]) -> i64 {
        self.index(b).map_or(0, |i| self.values[i])
    }

    /// Adds `delta` to the entry at `b`, which must lie in the box.
    pub fn add_at(&mut self, b: &[usize], delta: i64) {
        let i = self.index(b).expect("degree inside the box");
        self.values[i] += delta;
    }

    fn set(&mut self, b: &[usize], v: i64) {
        let i = self.index(b).expect("degree inside the box");
        self.values[i] = v;
    }

    /// `(b, value)` pairs in lexicographic order of `b`.
    pub fn entries(&self) -> impl Iterator<Item = (MultiDegree, i64)> + '_ {
        box_degrees(&self.a).into_iter().zip(self.values.iter().copied())
    }

    /// `Σ_{|b| = i} v_b` for `i = 0..=|a|`.
    pub fn rank_sums(&self) -> Vec<i64> {
        let d: usize = self.a.iter().sum();
        let mut s = vec![0; d + 1];
        for (b, v) in self.entries() {
            s[b.iter().sum::<usize>()] += v;
        }
        s
    }

    /// Partial sums over the fibers of a map from these groups to coarser ones:
    /// the table the coarser grading would produce.
    pub fn coarsen(&self, assign: &[usize]) -> FlagVector {
        assert_eq!(assign.len(), self.a.len());
        let m = assign.iter().max().map_or(0, |&g| g + 1);
        let mut a = vec![0; m];
        for (i, &g) in assign.iter().enumerate() {
            a[g] += self.a[i];
        }
        let mut out = FlagVector::zeros(self.kind, &a);
        for (b, v) in self.entries() {
            let mut c = vec![0; m];
            for (i, &g) in assign.iter().enumerate() {
                c[g] += b[i];
            }
            let i = out.index(&c).unwrap();
            out.values[i] += v;
        }
        out
    }
}

#[derive(Serialize)]
struct Entry<'a> {
    b: &'a [usize],
    v: i64,
}

impl Serialize for FlagVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let degrees = box_degrees(&self.a);
        let entries: Vec<Entry> = degrees.iter().zip(&self.values).map(|(b, &v)| Entry { b, v }).collect();
        let mut st = s.serialize_struct("FlagVector", 2)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Number of faces of the complex (or of `Δ∖Γ`) in each multidegree.
pub fn flag_f<'a>(p: impl Into<PairRef<'a>>, g: &Grading) -> Result<FlagVector> {
    let p = p.into();
    let mut f = FlagVector::zeros(FlagKind::F, &g.a);
    for face in p.all_faces() {
        let b = g.degree(face);
        let i = f.index(&b).ok_or_else(|| Error::ColoringImproper(face.clone()))?;
        f.values[i] += 1;
    }
    Ok(f)
}

/// `h_b = Σ_{c≤b} (-1)^{|b|-|c|} (a-c choose b-c) f_c`.
pub fn flag_h_from_f(f: &FlagVector) -> Result<FlagVector> {
    let a = f.a.clone();
    let mut h = FlagVector::zeros(FlagKind::H, &a);
    for b in box_degrees(&a) {
        let mut acc: i64 = 0;
        for c in box_degrees(&b) {
            let ac: Vec<usize> = a.iter().zip(&c).map(|(x, y)| x - y).collect();
            let bc: Vec<usize> = b.iter().zip(&c).map(|(x, y)| x - y).collect();
            let sign = if bc.iter().sum::<usize>() % 2 == 0 { 1 } else { -1 };
            let term = multi_binomial(&ac, &bc)?
                .checked_mul(f.get(&c))
                .ok_or(Error::Overflow("flag h-vector"))?;
            acc = acc.checked_add(sign * term).ok_or(Error::Overflow("flag h-vector"))?;
        }
        h.set(&b, acc);
    }
    Ok(h)
}

pub fn flag_h<'a>(p: impl Into<PairRef<'a>>, g: &Grading) -> Result<FlagVector> {
    flag_h_from_f(&flag_f(p, g)?)
}

/// `Σ_{j=1}^{top} (-1)^{n-j} β̃_{j-1}`.
fn betti_sum(beta: &BettiVector, n: usize, top: usize) -> i64 {
    (1..=top)
        .map(|j| {
            let s = if (n - j) % 2 == 0 { 1 } else { -1 };
            s * beta.get(j as isize - 1) as i64
        })
        .sum()
}

fn corrected(h: &FlagVector, beta: &BettiVector, double: bool) -> Result<FlagVector> {
    let a = h.a.clone();
    let d: usize = a.iter().sum();
    let kind = if double { FlagKind::HDoublePrime } else { FlagKind::HPrime };
    let mut out = FlagVector::zeros(kind, &a);
    for b in box_degrees(&a) {
        let n: usize = b.iter().sum();
        let v = if double && n == d {
            beta.get(d as isize - 1) as i64
        } else {
            let top = if double { n } else { n.saturating_sub(1) };
            let corr = multi_binomial(&a, &b)?
                .checked_mul(betti_sum(beta, n, top))
                .ok_or(Error::Overflow("flag h'-vector"))?;
            h.get(&b) - corr
        };
        out.set(&b, v);
    }
    Ok(out)
}

/// `h'_b = h_b − (a choose b) Σ_{j=1}^{|b|-1} (-1)^{|b|-j} β̃_{j-1}`.
pub fn flag_h_prime_from(h: &FlagVector, beta: &BettiVector) -> Result<FlagVector> {
    corrected(h, beta, false)
}

/// `h''_b = h_b − (a choose b) Σ_{j=1}^{|b|} (-1)^{|b|-j} β̃_{j-1}` for `b ≠ a`,
/// and `h''_a = β̃_{|a|-1}`.
pub fn flag_h_dprime_from(h: &FlagVector, beta: &BettiVector) -> Result<FlagVector> {
    corrected(h, beta, true)
}

pub fn flag_h_prime<'a>(p: impl Into<PairRef<'a>>, g: &Grading, field: FieldSpec) -> Result<FlagVector> {
    let p = p.into();
    flag_h_prime_from(&flag_h(p, g)?, &betti(p, field))
}

pub fn flag_h_dprime<'a>(p: impl Into<PairRef<'a>>, g: &Grading, field: FieldSpec) -> Result<FlagVector> {
    let p = p.into();
    flag_h_dprime_from(&flag_h(p, g)?, &betti(p, field))
}

/// Flag f, h, h', h'' together with the Betti numbers they were built from.
#[derive(Clone, Debug, Serialize)]
pub struct FlagVectors {
    pub f: FlagVector,
    pub h: FlagVector,
    pub h_prime: FlagVector,
    pub h_dprime: FlagVector,
    pub betti: BettiVector,
}

/// All flag vectors of a complex or pair.
pub fn flag_vectors<'a>(p: impl Into<PairRef<'a>>, g: &Grading, field: FieldSpec) -> Result<FlagVectors> {
    let p = p.into();
    let f = flag_f(p, g)?;
    let h = flag_h_from_f(&f)?;
    let betti = betti(p, field);
    Ok(FlagVectors {
        h_prime: flag_h_prime_from(&h, &betti)?,
        h_dprime: flag_h_dprime_from(&h, &betti)?,
        f,
        h,
        betti,
    })
}

/// Relative flag vectors of `(Δ, Γ)`; same as [`flag_vectors`] on a pair.
pub fn relative_flag_vectors(pair: &crate::complex::RelativePair, g: &Grading, field: FieldSpec) -> Result<FlagVectors> {
    flag_vectors(pair, g, field)
}

/// Classical `f`, `h`, `h'`, `h''` indexed by `i = 0..=d`; `f[i] = f_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalVectors {
    pub d: usize,
    pub f: Vec<i64>,
    pub h: Vec<i64>,
    pub h_prime: Vec<i64>,
    pub h_dprime: Vec<i64>,
    pub betti: BettiVector,
}

/// The classical vectors, obtained from the monochromatic flag vectors.
pub fn classical_vectors<'a>(p: impl Into<PairRef<'a>>, field: FieldSpec) -> Result<ClassicalVectors> {
    let p = p.into();
    let g = Grading::monochromatic(p.ambient);
    let fv = flag_vectors(p, &g, field)?;
    let d = g.d();
    let col = |v: &FlagVector| (0..=d).map(|i| v.get(&[i])).collect::<Vec<i64>>();
    Ok(ClassicalVectors {
        d,
        f: col(&fv.f),
        h: col(&fv.h),
        h_prime: col(&fv.h_prime),
        h_dprime: col(&fv.h_dprime),
        betti: fv.betti,
    })
}

/// `h̄''_i = h''_i / (d choose i)`.
pub fn normalized_hdprime(v: &ClassicalVectors, i: usize) -> Result<Rational64> {
    let h = *v.h_dprime.get(i).ok_or_else(|| Error::InvalidArgument(format!("index {i} exceeds d = {}", v.d)))?;
    Ok(Rational64::new(h, binomial(v.d, i)?))
}
