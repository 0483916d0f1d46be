//! Theorem-by-theorem checks on concrete complexes. Each check returns a
//! [`VerificationReport`] whose status is one of verified, violated,
//! hypothesis-unmet or inconclusive; the hypotheses themselves are computed.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coloring::{find_balanced_coloring, Coloring, Grading, Grouping};
use crate::complex::{Complex, Face, PairRef, RelativePair, VertexId};
use crate::constructions::{
    barycentric_subdivision, builtin, cross_polytope_boundary, disjoint_union, stacked_cross_polytopal_sphere,
    walkup_sample, WalkupTrace,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::flags::{
    binomial, box_degrees, classical_vectors, flag_h, flag_h_dprime_from, flag_vectors, multi_binomial, FlagVector,
    FlagVectors,
};
use crate::graded::{dual_wlp_test, hilbert_series_check_with, random_lsop, wlp_test, GradedModule, DEFAULT_TRIALS};
use crate::homology::{betti, BettiVector};
use crate::manifold::{boundary_with, classify_with, Classification, Label, LinkHomology};
use crate::with_generic_field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Violated,
    HypothesisUnmet,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Violated => "violated",
            Status::HypothesisUnmet => "hypothesis-unmet",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Stanley,
    Schenzel,
    Hdprime,
    Duality,
    Average,
    Lbt,
    G2,
    StackedLinks,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Stanley,
        Check::Schenzel,
        Check::Hdprime,
        Check::Duality,
        Check::Average,
        Check::Lbt,
        Check::G2,
        Check::StackedLinks,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Stanley => "stanley",
            Check::Schenzel => "schenzel",
            Check::Hdprime => "hdprime",
            Check::Duality => "duality",
            Check::Average => "average",
            Check::Lbt => "lbt",
            Check::G2 => "g2",
            Check::StackedLinks => "stacked-links",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        let t = s.trim().to_ascii_lowercase();
        if t == "thm44" {
            return Ok(Check::Lbt);
        }
        Check::ALL
            .into_iter()
            .find(|c| c.name() == t)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check `{s}`")))
    }
}

/// What a report is about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceInfo {
    pub name: String,
    pub field: FieldSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Vec<usize>>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub instance: InstanceInfo,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    pub numbers: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(check: Check, inst: &Instance, field: FieldSpec, seed: u64) -> VerificationReport {
        VerificationReport {
            theorem_id: check.name().to_string(),
            instance: InstanceInfo { name: inst.name.clone(), field, grouping: None, seed },
            status: Status::Verified,
            witness: None,
            lhs: None,
            rhs: None,
            numbers: json!({}),
            note: None,
        }
    }

    fn unmet(mut self, why: impl Into<String>) -> VerificationReport {
        self.status = Status::HypothesisUnmet;
        self.note = Some(why.into());
        self
    }

    fn violated(&mut self, witness: Value) {
        self.status = Status::Violated;
        self.witness.get_or_insert(witness);
    }

    fn inconclusive(&mut self, witness: Value, why: impl Into<String>) {
        if self.status != Status::Violated {
            self.status = Status::Inconclusive;
            self.witness.get_or_insert(witness);
            self.note.get_or_insert(why.into());
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.numbers.as_object_mut().expect("numbers is an object").insert(key.to_string(), v);
    }
}

/// Tunables shared by all checks.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Independent l.s.o.p.'s per graded comparison.
    pub n_lsops: usize,
    pub seed: u64,
    /// Lefschetz trials per link.
    pub trials: usize,
    /// `ℓ` values for the lower bound check; empty means `{1, 2}` capped at `⌊d/2⌋`.
    pub ells: Vec<usize>,
    /// Groupings for the graded checks; `None` means identity plus monochromatic.
    pub groupings: Option<Vec<Grouping>>,
    /// Largest slice dimension the graded checks build.
    pub slice_budget: u64,
}

pub const DEFAULT_LSOPS: usize = 3;
pub const DEFAULT_SLICE_BUDGET: u64 = 1500;

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            n_lsops: DEFAULT_LSOPS,
            seed: 0,
            trials: DEFAULT_TRIALS,
            ells: Vec::new(),
            groupings: None,
            slice_budget: DEFAULT_SLICE_BUDGET,
        }
    }
}

/// Field-dependent topology of an instance.
#[derive(Clone, Debug)]
pub struct Topology {
    pub class: Classification,
    pub boundary: Complex,
    pub betti: BettiVector,
    /// Only computed for homology manifolds.
    pub orientable: Option<bool>,
}

impl Topology {
    pub fn has_boundary(&self) -> bool {
        self.class.has(Label::HomologyManifoldWithBoundary)
    }
}

/// A complex under test together with its provenance.
pub struct Instance {
    pub name: String,
    pub complex: Complex,
    pub coloring: Option<Coloring>,
    pub trace: Option<WalkupTrace>,
    topology: Mutex<HashMap<FieldSpec, Arc<Topology>>>,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance").field("name", &self.name).field("complex", &self.complex).finish()
    }
}

impl Instance {
    /// Without a coloring, a balanced one is searched for.
    pub fn new(name: impl Into<String>, complex: Complex, coloring: Option<Coloring>, trace: Option<WalkupTrace>) -> Instance {
        let coloring = coloring.or_else(|| find_balanced_coloring(&complex).ok());
        Instance { name: name.into(), complex, coloring, trace, topology: Mutex::new(HashMap::new()) }
    }

    /// `d = dim + 1`.
    pub fn d(&self) -> usize {
        (self.complex.dim() + 1).max(0) as usize
    }

    pub fn topology(&self, field: FieldSpec) -> Arc<Topology> {
        if let Some(t) = self.topology.lock().unwrap().get(&field) {
            return t.clone();
        }
        let lh = LinkHomology::new(&self.complex, field);
        let class = classify_with(&self.complex, &lh, field);
        let boundary = boundary_with(&lh);
        let betti = betti(&self.complex, field);
        let orientable = class.is_manifold().then(|| {
            let pair = RelativePair::new(self.complex.clone(), boundary.clone()).expect("boundary is a subcomplex");
            betti_of(&pair, field).get(self.complex.dim()) == self.complex.connected_components().len()
        });
        let t = Arc::new(Topology { class, boundary, betti, orientable });
        self.topology.lock().unwrap().entry(field).or_insert(t).clone()
    }

    pub fn grading(&self, grouping: &Grouping) -> Option<Grading> {
        let col = self.coloring.as_ref()?;
        Grading::new(&self.complex, col, grouping).ok()
    }

    pub fn identity_grading(&self) -> Option<Grading> {
        self.grading(&Grouping::identity(self.d()))
    }
}

fn betti_of(pair: &RelativePair, field: FieldSpec) -> BettiVector {
    betti(pair, field)
}

/// Q-Betti numbers are paired with linear algebra over `F_32003`; small
/// primes are replaced by extension fields inside [`with_generic_field!`].
pub fn linalg_field(field: FieldSpec) -> FieldSpec {
    match field {
        FieldSpec::Rationals => FieldSpec::F32003,
        f => f,
    }
}

fn table(entries: impl IntoIterator<Item = (Vec<usize>, i64)>) -> Value {
    Value::Array(entries.into_iter().map(|(b, v)| json!({"b": b, "v": v})).collect())
}

fn sums(v: &[i64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

// ---------------------------------------------------------------------------
// Stanley series

/// Compares monomial counts with `Σ h_b t^b / ∏ (1 − t_i)^{a_i}` up to total
/// degree `total`, for each grouping (monochromatic only without a coloring).
pub fn check_stanley_series(inst: &Instance, groupings: &[Grouping], total: usize, field: FieldSpec, seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new(Check::Stanley, inst, field, seed);
    let gradings: Vec<(Vec<usize>, Grading)> = if inst.coloring.is_some() {
        groupings.iter().filter_map(|g| Some((g.assign.clone(), inst.grading(g)?))).collect()
    } else {
        vec![(vec![0; inst.d()], Grading::monochromatic(&inst.complex))]
    };
    let mut rows = Vec::new();
    for (assign, g) in &gradings {
        let h = match flag_h(&inst.complex, g) {
            Ok(h) => h,
            Err(e) => return r.unmet(format!("flag h-vector unavailable: {e}")),
        };
        rows.push(stanley_row(&mut r, inst, assign, g, &h, total));
    }
    r.lhs = Some(format!("{} gradings", gradings.len()));
    r.rhs = Some(format!("total degree ≤ {total}"));
    r.set("gradings", Value::Array(rows));
    r
}

/// Same comparison against a caller-supplied h-table (used to self-test the
/// check with deliberately wrong data).
pub fn check_stanley_series_with_table(inst: &Instance, grouping: &Grouping, h: &FlagVector, total: usize, seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new(Check::Stanley, inst, FieldSpec::Q, seed);
    let Some(g) = inst.grading(grouping) else {
        return r.unmet("no balanced coloring for this grouping");
    };
    r.instance.grouping = Some(grouping.assign.clone());
    let row = stanley_row(&mut r, inst, &grouping.assign, &g, h, total);
    r.set("gradings", Value::Array(vec![row]));
    r
}

fn stanley_row(r: &mut VerificationReport, inst: &Instance, assign: &[usize], g: &Grading, h: &FlagVector, total: usize) -> Value {
    let module = GradedModule::new(&inst.complex, g);
    match hilbert_series_check_with(&module, h, total) {
        Ok(res) => {
            if let Some((c, count, series)) = &res.witness {
                r.violated(json!({"grouping": assign, "degree": c, "monomials": count, "series": series}));
            }
            json!({"grouping": assign, "a": g.a, "degrees_checked": res.degrees_checked, "passes": res.passes})
        }
        Err(e) => {
            r.inconclusive(json!({"grouping": assign}), format!("arithmetic failure: {e}"));
            json!({"grouping": assign, "error": e.to_string()})
        }
    }
}

// ---------------------------------------------------------------------------
// Graded comparisons: quotient by Θ and by Σ(Θ;M)

#[derive(Clone, Copy, PartialEq, Eq)]
enum Graded {
    Schenzel,
    Hdprime,
}

fn default_groupings(inst: &Instance) -> Vec<Grouping> {
    let d = inst.d();
    if inst.coloring.is_some() && d > 1 {
        vec![Grouping::identity(d), Grouping::monochromatic(d)]
    } else {
        vec![Grouping::monochromatic(d)]
    }
}

fn grading_for(inst: &Instance, grouping: &Grouping) -> Option<Grading> {
    if grouping.m() == 1 && inst.coloring.is_none() {
        Some(Grading::monochromatic(&inst.complex))
    } else {
        inst.grading(grouping)
    }
}

/// Degrees `b` outside the box with `b_i = a_i + 1` for one `i` and `b ≤ a`
/// elsewhere; vanishing there forces vanishing everywhere outside the box.
fn shell_degrees(a: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..a.len() {
        for mut b in box_degrees(a) {
            if b[i] == a[i] {
                b[i] += 1;
                out.push(b);
            }
        }
    }
    out
}

fn max_slice(module: &GradedModule<'_>, a: &[usize]) -> u64 {
    let up: Vec<usize> = a.iter().map(|x| x + 1).collect();
    box_degrees(&up).iter().map(|b| module.slice_dim(b)).max().unwrap_or(0)
}

struct GradedOutcome {
    mismatch: Option<Value>,
    quotient: Vec<(Vec<usize>, i64)>,
    sigma: Vec<(Vec<usize>, i64)>,
    socle: Vec<(Vec<usize>, i64)>,
    field: String,
}

fn graded_run<F: Field>(
    f: &F,
    ambient: &Complex,
    module: &GradedModule<'_>,
    g: &Grading,
    fv: &FlagVectors,
    kind: Graded,
    opts: &CheckOptions,
) -> Result<GradedOutcome> {
    let a = g.a.clone();
    let degrees = box_degrees(&a);
    let shell = shell_degrees(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = GradedOutcome { mismatch: None, quotient: Vec::new(), sigma: Vec::new(), socle: Vec::new(), field: f.name() };
    for t in 0..opts.n_lsops.max(1) {
        let lsop = random_lsop(f, ambient, g, &mut rng)?;
        let mismatch = |b: &[usize], what: &str, expected: i64, got: i64| {
            json!({"lsop": t, "b": b, "quantity": what, "expected": expected, "computed": got})
        };
        match kind {
            Graded::Schenzel => {
                let dims: Vec<usize> = degrees.par_iter().map(|b| module.quotient_dim(f, &lsop, b)).collect();
                for (b, &q) in degrees.iter().zip(&dims) {
                    if q as i64 != fv.h_prime.get(b) && out.mismatch.is_none() {
                        out.mismatch = Some(mismatch(b, "h'", fv.h_prime.get(b), q as i64));
                    }
                }
                let outside: Vec<usize> = shell.par_iter().map(|b| module.quotient_dim(f, &lsop, b)).collect();
                if let Some((b, &q)) = shell.iter().zip(&outside).find(|(_, &q)| q != 0) {
                    out.mismatch.get_or_insert(mismatch(b, "vanishing outside the box", 0, q as i64));
                }
                if t == 0 {
                    out.quotient = degrees.iter().cloned().zip(dims.iter().map(|&q| q as i64)).collect();
                }
            }
            Graded::Hdprime => {
                let slices: Vec<_> = degrees.par_iter().map(|b| module.sigma_slice(f, &lsop, b)).collect();
                for s in &slices {
                    let b = &s.degree;
                    if s.sigma_quotient as i64 != fv.h_dprime.get(b) {
                        out.mismatch.get_or_insert(mismatch(b, "h''", fv.h_dprime.get(b), s.sigma_quotient as i64));
                    }
                    if *b != a {
                        let n: usize = b.iter().sum();
                        let expected = multi_binomial(&a, b)? * fv.betti.get(n as isize - 1) as i64;
                        if s.socle_dim() as i64 != expected {
                            out.mismatch.get_or_insert(mismatch(b, "socle", expected, s.socle_dim() as i64));
                        }
                    }
                }
                if t == 0 {
                    let bad: Vec<_> = slices.par_iter().filter_map(|s| module.socle_violation(f, &lsop, s)).collect();
                    if let Some((b, v)) = bad.first() {
                        out.mismatch.get_or_insert(json!({"lsop": t, "b": b, "quantity": "socle annihilation", "variable": v}));
                    }
                    out.sigma = slices.iter().map(|s| (s.degree.clone(), s.sigma_quotient as i64)).collect();
                    out.socle = slices.iter().map(|s| (s.degree.clone(), s.socle_dim() as i64)).collect();
                }
            }
        }
    }
    Ok(out)
}

fn graded_check(inst: &Instance, field: FieldSpec, opts: &CheckOptions, kind: Graded) -> VerificationReport {
    let check = if kind == Graded::Schenzel { Check::Schenzel } else { Check::Hdprime };
    let r = VerificationReport::new(check, inst, field, opts.seed);
    if !inst.complex.is_pure() {
        return r.unmet("complex is not pure");
    }
    let topo = inst.topology(field);
    if !topo.class.is_buchsbaum() {
        return r.unmet(format!("not Buchsbaum over {field}"));
    }
    let mut r = r;
    let relative = topo.has_boundary().then(|| RelativePair::new(inst.complex.clone(), topo.boundary.clone()).expect("subcomplex"));
    let mut modules: Vec<(&str, PairRef<'_>)> = vec![("absolute", (&inst.complex).into())];
    if let Some(p) = &relative {
        modules.push(("relative", p.into()));
    }
    let groupings = opts.groupings.clone().unwrap_or_else(|| default_groupings(inst));
    let mut rows = Vec::new();
    let mut compared = 0;
    for (label, p) in &modules {
        for grouping in &groupings {
            let Some(g) = grading_for(inst, grouping) else {
                rows.push(json!({"module": label, "grouping": grouping.assign, "skipped": "grouping incompatible with the coloring"}));
                continue;
            };
            let fv = match flag_vectors(*p, &g, field) {
                Ok(v) => v,
                Err(e) => {
                    rows.push(json!({"module": label, "grouping": grouping.assign, "skipped": e.to_string()}));
                    continue;
                }
            };
            let module = GradedModule::new(*p, &g);
            let largest = max_slice(&module, &g.a);
            if largest > opts.slice_budget {
                rows.push(json!({"module": label, "grouping": grouping.assign, "skipped": format!("slice dimension {largest} exceeds budget {}", opts.slice_budget)}));
                continue;
            }
            let res = with_generic_field!(linalg_field(field), |f| graded_run(&f, &inst.complex, &module, &g, &fv, kind, opts));
            match res {
                Ok(out) => {
                    compared += 1;
                    if let Some(mut w) = out.mismatch {
                        w["module"] = json!(label);
                        w["grouping"] = json!(grouping.assign);
                        r.violated(w);
                    }
                    let mut row = json!({"module": label, "grouping": grouping.assign, "a": g.a, "linalg_field": out.field});
                    match kind {
                        Graded::Schenzel => {
                            row["h_prime"] = serde_json::to_value(&fv.h_prime).unwrap();
                            row["quotient"] = table(out.quotient.clone());
                            if r.lhs.is_none() {
                                r.lhs = Some(sums(&rank_sums(&out.quotient)));
                                r.rhs = Some(sums(&fv.h_prime.rank_sums()));
                            }
                        }
                        Graded::Hdprime => {
                            row["h_dprime"] = serde_json::to_value(&fv.h_dprime).unwrap();
                            row["sigma_quotient"] = table(out.sigma.clone());
                            row["socle"] = table(out.socle);
                            if r.lhs.is_none() {
                                r.lhs = Some(sums(&rank_sums(&out.sigma)));
                                r.rhs = Some(sums(&fv.h_dprime.rank_sums()));
                            }
                        }
                    }
                    rows.push(row);
                }
                Err(e @ Error::LsopNotFound { .. }) => {
                    r.inconclusive(json!({"module": label, "grouping": grouping.assign}), e.to_string());
                }
                Err(e) => {
                    r.inconclusive(json!({"module": label, "grouping": grouping.assign}), format!("arithmetic failure: {e}"));
                }
            }
        }
    }
    if compared == 0 && r.status == Status::Verified {
        r.inconclusive(json!(null), "every grading exceeded the slice budget");
    }
    r.set("lsops", json!(opts.n_lsops.max(1)));
    r.set("betti", json!(topo.betti.from_dim0()));
    r.set("modules", Value::Array(rows));
    r
}

fn rank_sums(t: &[(Vec<usize>, i64)]) -> Vec<i64> {
    let d = t.iter().map(|(b, _)| b.iter().sum::<usize>()).max().unwrap_or(0);
    let mut s = vec![0; d + 1];
    for (b, v) in t {
        s[b.iter().sum::<usize>()] += v;
    }
    s
}

/// `dim (M/ΘM)_b = h'_b` for every `b ≤ a` and vanishing outside the box, for
/// independent random l.s.o.p.'s. Manifolds with boundary are also checked
/// on `F[Δ,∂Δ]`.
pub fn check_flag_schenzel(inst: &Instance, field: FieldSpec, opts: &CheckOptions) -> VerificationReport {
    graded_check(inst, field, opts, Graded::Schenzel)
}

/// `dim (M/Σ(Θ;M))_b = h''_b`, `dim (Σ/ΘM)_b = (a choose b) β̃_{|b|-1}` for
/// `b ⪇ a`, and every colon representative is killed by every variable mod `ΘM`.
pub fn check_flag_hdprime(inst: &Instance, field: FieldSpec, opts: &CheckOptions) -> VerificationReport {
    graded_check(inst, field, opts, Graded::Hdprime)
}

// ---------------------------------------------------------------------------
// Duality

/// `h''_b(Δ,∂Δ) = h''_{a−b}(Δ)` for connected orientable homology manifolds,
/// with both sides also compared to `Σ`-quotient dimensions.
pub fn check_duality(inst: &Instance, field: FieldSpec, opts: &CheckOptions) -> VerificationReport {
    let mut r = VerificationReport::new(Check::Duality, inst, field, opts.seed);
    let topo = inst.topology(field);
    if !topo.class.is_manifold() {
        return r.unmet(format!("not a homology manifold over {field}"));
    }
    if inst.complex.connected_components().len() != 1 {
        return r.unmet("not connected");
    }
    if topo.orientable != Some(true) {
        return r.unmet(format!("not orientable over {field}"));
    }
    let groupings = opts.groupings.clone().unwrap_or_else(|| default_groupings(inst));
    let pair = RelativePair::new(inst.complex.clone(), topo.boundary.clone()).expect("subcomplex");
    let mut rows = Vec::new();
    for grouping in &groupings {
        let Some(g) = grading_for(inst, grouping) else { continue };
        let (abs, rel) = match (flag_vectors(&inst.complex, &g, field), flag_vectors(&pair, &g, field)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return r.unmet(format!("flag vectors unavailable: {e}")),
        };
        for b in box_degrees(&g.a) {
            let dual: Vec<usize> = g.a.iter().zip(&b).map(|(x, y)| x - y).collect();
            if rel.h_dprime.get(&b) != abs.h_dprime.get(&dual) {
                r.violated(json!({"grouping": grouping.assign, "b": b, "relative": rel.h_dprime.get(&b), "absolute_at_a_minus_b": abs.h_dprime.get(&dual)}));
            }
        }
        // third side of the triangle: the algebra
        let mut algebra = json!("skipped: slice budget");
        let am = GradedModule::new(&inst.complex, &g);
        let rm = GradedModule::new(&pair, &g);
        if max_slice(&am, &g.a).max(max_slice(&rm, &g.a)) <= opts.slice_budget {
            let one = CheckOptions { n_lsops: 1, ..opts.clone() };
            let res = with_generic_field!(linalg_field(field), |f| {
                graded_run(&f, &inst.complex, &am, &g, &abs, Graded::Hdprime, &one)
                    .and_then(|x| Ok((x, graded_run(&f, &inst.complex, &rm, &g, &rel, Graded::Hdprime, &one)?)))
            });
            match res {
                Ok((x, y)) => {
                    for (label, out) in [("absolute", &x), ("relative", &y)] {
                        if let Some(mut w) = out.mismatch.clone() {
                            w["module"] = json!(label);
                            r.violated(w);
                        }
                    }
                    algebra = json!({"absolute": table(x.sigma), "relative": table(y.sigma)});
                }
                Err(e) => r.inconclusive(json!({"grouping": grouping.assign}), e.to_string()),
            }
        }
        if r.lhs.is_none() {
            r.lhs = Some(sums(&rel.h_dprime.rank_sums()));
            let mut rev = abs.h_dprime.rank_sums();
            rev.reverse();
            r.rhs = Some(sums(&rev));
        }
        rows.push(json!({
            "grouping": grouping.assign,
            "relative_h_dprime": rel.h_dprime,
            "absolute_h_dprime": abs.h_dprime,
            "sigma_quotient": algebra,
        }));
    }
    r.set("boundary_facets", json!(topo.boundary.facets().len()));
    r.set("gradings", Value::Array(rows));
    r
}

// ---------------------------------------------------------------------------
// Averaging identity

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(k).collect()
}

fn indicator(d: usize, s: &[usize]) -> Vec<usize> {
    let mut b = vec![0; d];
    for &i in s {
        b[i] = 1;
    }
    b
}

/// `Σ_{T⊆S,|T|=ℓ} h''_T − Σ_{T⊆S,|T|=ℓ−1} h''_T` from an identity-graded table.
fn subset_difference(h: &FlagVector, s: &[usize], ell: usize) -> i64 {
    let d = h.a().len();
    let sum = |k: usize| -> i64 {
        subsets(s.len(), k)
            .iter()
            .map(|t| h.get(&indicator(d, &t.iter().map(|&i| s[i]).collect::<Vec<_>>())))
            .sum()
    };
    sum(ell) - sum(ell - 1)
}

fn normalized(h: &[i64], d: usize, i: usize) -> Result<Rational64> {
    Ok(Rational64::new(h[i], binomial(d, i)?))
}

fn pair_for<'a>(inst: &'a Instance, rel: &'a Option<RelativePair>) -> PairRef<'a> {
    match rel {
        Some(p) => p.into(),
        None => (&inst.complex).into(),
    }
}

/// `h̄''_ℓ − h̄''_{ℓ−1}` equals the subset average of flag differences for
/// every `1 ≤ ℓ ≤ d/2`; the relative version is included for manifolds with boundary.
pub fn check_average_identity(inst: &Instance, field: FieldSpec, ells: &[usize], seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new(Check::Average, inst, field, seed);
    let Some(g) = inst.identity_grading() else {
        return r.unmet("no balanced coloring");
    };
    let d = inst.d();
    let valid: Vec<usize> = if ells.is_empty() { (1..=d / 2).collect() } else { ells.iter().copied().filter(|&l| l >= 1 && 2 * l <= d).collect() };
    if valid.is_empty() {
        return r.unmet(format!("no valid ℓ for d = {d}"));
    }
    let topo = inst.topology(field);
    let relative = topo.has_boundary().then(|| RelativePair::new(inst.complex.clone(), topo.boundary.clone()).expect("subcomplex"));
    let mut targets = vec![("absolute", None)];
    if relative.is_some() {
        targets.push(("relative", relative));
    }
    let mut rows = Vec::new();
    for (label, rel) in &targets {
        let p = pair_for(inst, rel);
        let (fv, cv) = match (flag_vectors(p, &g, field), classical_vectors(p, field)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return r.unmet(format!("vectors unavailable: {e}")),
        };
        for &ell in &valid {
            let res = (|| -> Result<(Rational64, Rational64)> {
                let lhs = normalized(&cv.h_dprime, d, ell)? - normalized(&cv.h_dprime, d, ell - 1)?;
                let total: i64 = subsets(d, 2 * ell - 1).iter().map(|s| subset_difference(&fv.h_dprime, s, ell)).sum();
                let rhs = Rational64::new(total, binomial(2 * ell - 1, ell)? * binomial(d, 2 * ell - 1)?);
                Ok((lhs, rhs))
            })();
            match res {
                Ok((lhs, rhs)) => {
                    if lhs != rhs {
                        r.violated(json!({"module": label, "ell": ell, "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
                    }
                    if r.lhs.is_none() {
                        r.lhs = Some(lhs.to_string());
                        r.rhs = Some(rhs.to_string());
                    }
                    rows.push(json!({"module": label, "ell": ell, "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
                }
                Err(e) => r.inconclusive(json!({"module": label, "ell": ell}), e.to_string()),
            }
        }
    }
    r.set("identities", Value::Array(rows));
    r
}

// ---------------------------------------------------------------------------
// Balanced lower bound

/// The per-subset and normalized inequalities of the balanced lower bound
/// theorem at `ℓ`, with the Lefschetz hypothesis on every codimension-(2ℓ−1)
/// link certified by random tests (weak for orientable, dual for closed
/// non-orientable manifolds). `ℓ = 1` is pure counting.
pub fn check_lbt(inst: &Instance, field: FieldSpec, ell: usize, opts: &CheckOptions) -> VerificationReport {
    let mut r = VerificationReport::new(Check::Lbt, inst, field, opts.seed);
    r.set("ell", json!(ell));
    let Some(g) = inst.identity_grading() else {
        return r.unmet("no balanced coloring");
    };
    let d = inst.d();
    if ell == 0 || 2 * ell > d {
        return r.unmet(format!("ℓ = {ell} outside 1..=⌊{d}/2⌋"));
    }
    let topo = inst.topology(field);
    if !topo.class.is_manifold() {
        return r.unmet(format!("not a homology manifold over {field}"));
    }
    let orientable = topo.orientable == Some(true);
    let with_boundary = topo.has_boundary();
    if with_boundary && !orientable {
        return r.unmet("manifold with boundary is not orientable");
    }
    let dual = !with_boundary && !orientable;
    let relative = with_boundary.then(|| RelativePair::new(inst.complex.clone(), topo.boundary.clone()).expect("subcomplex"));
    let p = pair_for(inst, &relative);
    let lf = linalg_field(field);

    // hypothesis on links
    let mut link_summary = json!("counting (no Lefschetz hypothesis at ℓ = 1)");
    if ell >= 2 {
        let size = d - (2 * ell - 1);
        let faces: Vec<&Face> = inst.complex.faces(size as isize - 1).iter().collect();
        let outcomes: Vec<_> = faces
            .par_iter()
            .map(|&s| {
                let lk = inst.complex.link(s).expect("face of the complex");
                let res = if dual { dual_wlp_test(&lk, lf, opts.trials, opts.seed) } else { wlp_test(&lk, lf, opts.trials, opts.seed) };
                (s, res)
            })
            .collect();
        let failed: Vec<_> = outcomes.iter().filter(|(_, o)| !o.passes).collect();
        if let Some((s, o)) = failed.first() {
            r.inconclusive(json!({"link_of": s.vertices(), "trials": o.trials}), format!("{} link(s) without a Lefschetz certificate", failed.len()));
        }
        link_summary = json!({
            "property": if dual { "dual-wlp" } else { "wlp" },
            "links": outcomes.len(),
            "certified": outcomes.len() - failed.len(),
            "field": outcomes.first().map(|(_, o)| o.field.clone()),
        });
    }
    r.set("links", link_summary);

    let beta_p = betti(p, field);
    let beta = beta_p.get(ell as isize - 1) as i64;
    let h = match flag_h(p, &g).and_then(|h| flag_h_dprime_from(&h, &beta_p)) {
        Ok(h) => h,
        Err(e) => return r.unmet(format!("flag vectors unavailable: {e}")),
    };
    let bound = match binomial(2 * ell - 1, ell) {
        Ok(c) => c * beta,
        Err(e) => return r.unmet(e.to_string()),
    };
    let mut per_s = Vec::new();
    for s in subsets(d, 2 * ell - 1) {
        let diff = subset_difference(&h, &s, ell);
        // the same number from the coarsened grading with S as one block
        let mut assign = vec![0; d];
        let mut next = 1;
        for (c, slot) in assign.iter_mut().enumerate() {
            if !s.contains(&c) {
                *slot = next;
                next += 1;
            }
        }
        let coarse = Grouping::new(assign)
            .ok()
            .and_then(|gr| inst.grading(&gr))
            .and_then(|gs| flag_h(p, &gs).and_then(|hh| flag_h_dprime_from(&hh, &beta_p)).ok());
        if let Some(hs) = coarse {
            let mut e = vec![0; hs.a().len()];
            e[0] = ell;
            let top = hs.get(&e);
            e[0] = ell - 1;
            let coarse_diff = top - hs.get(&e);
            if coarse_diff != diff {
                r.violated(json!({"S": s, "subset_sum": diff, "coarsened": coarse_diff}));
            }
        }
        if diff < bound {
            r.violated(json!({"S": s, "difference": diff, "bound": bound}));
        }
        per_s.push(json!({"S": s, "difference": diff}));
    }
    r.set("bound", json!(bound));
    r.set("per_subset", Value::Array(per_s));

    match classical_vectors(p, field).and_then(|cv| Ok(normalized(&cv.h_dprime, d, ell)? - normalized(&cv.h_dprime, d, ell - 1)?)) {
        Ok(lhs) => {
            let rhs = Rational64::from_integer(beta);
            if lhs < rhs {
                r.violated(json!({"normalized_difference": lhs.to_string(), "betti": beta}));
            }
            r.set("equality", json!(lhs == rhs));
            r.lhs = Some(lhs.to_string());
            r.rhs = Some(rhs.to_string());
        }
        Err(e) => r.inconclusive(json!(null), e.to_string()),
    }
    r.set("module", json!(if with_boundary { "relative" } else { "absolute" }));
    r
}

// ---------------------------------------------------------------------------
// g2 and stacked links

/// `h̄_2 − h̄_1` of each vertex link; `None` when some link is too small.
fn link_differences(inst: &Instance, field: FieldSpec) -> Result<Vec<(VertexId, Rational64)>> {
    let vs: Vec<VertexId> = inst.complex.vertices().to_vec();
    vs.par_iter()
        .map(|&v| {
            let lk = inst.complex.link(&Face::vertex(v))?;
            let cv = classical_vectors(&lk, field)?;
            let dl = cv.d;
            if dl < 2 {
                return Err(Error::InvalidArgument("vertex link of dimension < 1".into()));
            }
            Ok((v, normalized(&cv.h, dl, 2)? - normalized(&cv.h, dl, 1)?))
        })
        .collect()
}

/// `2h_2 − (d−1)h_1 ≥ 4 (d choose 2)(β̃_1 − β̃_0)` on balanced closed homology
/// manifolds with `d ≥ 4`. Equality is expected for Walkup-class members and,
/// when `d ≥ 5`, must coincide with every vertex link having `h̄_2 = h̄_1`.
pub fn check_g2(inst: &Instance, field: FieldSpec, seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new(Check::G2, inst, field, seed);
    let d = inst.d();
    if inst.coloring.is_none() {
        return r.unmet("no balanced coloring");
    }
    if d < 4 {
        return r.unmet(format!("d = {d} < 4"));
    }
    let topo = inst.topology(field);
    if !topo.class.has(Label::ClosedHomologyManifold) {
        return r.unmet(format!("not a closed homology manifold over {field}"));
    }
    let cv = match classical_vectors(&inst.complex, field) {
        Ok(v) => v,
        Err(e) => return r.unmet(e.to_string()),
    };
    let lhs = 2 * cv.h[2] - (d as i64 - 1) * cv.h[1];
    let rhs = 4 * binomial(d, 2).unwrap_or(0) * (topo.betti.get(1) as i64 - topo.betti.get(0) as i64);
    let equality = lhs == rhs;
    r.lhs = Some(lhs.to_string());
    r.rhs = Some(rhs.to_string());
    r.set("h", json!(cv.h));
    r.set("betti", json!(topo.betti.from_dim0()));
    r.set("equality", json!(equality));
    if lhs < rhs {
        r.violated(json!({"lhs": lhs, "rhs": rhs}));
    }
    if inst.trace.is_some() && !equality {
        r.violated(json!({"expected": "equality for a Walkup-class member", "lhs": lhs, "rhs": rhs}));
    }
    if d >= 5 {
        match link_differences(inst, field) {
            Ok(diffs) => {
                let bad = diffs.iter().find(|(_, x)| *x != Rational64::from_integer(0));
                r.set("all_links_stacked", json!(bad.is_none()));
                if equality != bad.is_none() {
                    r.violated(json!({"equality": equality, "failing_link_vertex": bad.map(|(v, _)| *v)}));
                }
            }
            Err(e) => r.inconclusive(json!(null), e.to_string()),
        }
    } else {
        r.note = Some("equality is recorded but not characterized for d = 4".into());
    }
    r
}

/// Whether every vertex link has `h̄_2 − h̄_1 = 0`; compared with the Walkup
/// provenance and with g2-equality where those predict the answer (`d ≥ 5`).
pub fn check_stacked_link_criterion(inst: &Instance, field: FieldSpec, seed: u64) -> VerificationReport {
    let mut r = VerificationReport::new(Check::StackedLinks, inst, field, seed);
    let d = inst.d();
    if inst.coloring.is_none() {
        return r.unmet("no balanced coloring");
    }
    if d < 3 {
        return r.unmet(format!("d = {d} < 3"));
    }
    let topo = inst.topology(field);
    if !topo.class.is_manifold() {
        return r.unmet(format!("not a homology manifold over {field}"));
    }
    let diffs = match link_differences(inst, field) {
        Ok(x) => x,
        Err(e) => return r.unmet(e.to_string()),
    };
    let failing: Vec<&(VertexId, Rational64)> = diffs.iter().filter(|(_, x)| *x != Rational64::from_integer(0)).collect();
    let all = failing.is_empty();
    r.lhs = Some((diffs.len() - failing.len()).to_string());
    r.rhs = Some(diffs.len().to_string());
    r.set("all_links_stacked", json!(all));
    if let Some((v, x)) = failing.first() {
        r.witness = Some(json!({"vertex": v, "difference": x.to_string()}));
    }
    if d >= 5 {
        if inst.trace.is_some() && !all {
            r.violated(json!({"expected": "stacked links for a Walkup-class member"}));
        }
        if topo.class.has(Label::ClosedHomologyManifold) {
            if let Ok(cv) = classical_vectors(&inst.complex, field) {
                let lhs = 2 * cv.h[2] - (d as i64 - 1) * cv.h[1];
                let rhs = 4 * binomial(d, 2).unwrap_or(0) * (topo.betti.get(1) as i64 - topo.betti.get(0) as i64);
                r.set("g2_equality", json!(lhs == rhs));
                if (lhs == rhs) != all {
                    r.violated(json!({"g2_equality": lhs == rhs, "all_links_stacked": all}));
                }
            }
        }
    } else {
        r.note = Some("links below dimension 3: criterion computed, no expectation asserted".into());
    }
    r
}

// ---------------------------------------------------------------------------
// Corpus and suite

/// A reproducible description of a corpus member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorpusEntry {
    CrossPolytope { d: usize },
    Stacked { d: usize, n: usize, seed: u64 },
    Walkup { d: usize, sums: usize, handles: usize, seed: u64 },
    Builtin { name: String },
    Barycentric { of: Box<CorpusEntry> },
    DisjointUnion { left: Box<CorpusEntry>, right: Box<CorpusEntry> },
    /// Removes the lexicographically first facet.
    MinusFacet { of: Box<CorpusEntry> },
    Facets { name: String, facets: Vec<Vec<VertexId>> },
    File { path: String },
}

impl CorpusEntry {
    pub fn name(&self) -> String {
        match self {
            CorpusEntry::CrossPolytope { d } => format!("cross-polytope:{d}"),
            CorpusEntry::Stacked { d, n, seed } => format!("stacked:{d},{n},s{seed}"),
            CorpusEntry::Walkup { d, sums, handles, seed } => format!("walkup:{d},{sums},{handles},s{seed}"),
            CorpusEntry::Builtin { name } => name.clone(),
            CorpusEntry::Barycentric { of } => format!("sd({})", of.name()),
            CorpusEntry::DisjointUnion { left, right } => format!("{}+{}", left.name(), right.name()),
            CorpusEntry::MinusFacet { of } => format!("{}-facet", of.name()),
            CorpusEntry::Facets { name, .. } => name.clone(),
            CorpusEntry::File { path } => path.clone(),
        }
    }

    fn parts(&self) -> Result<(Complex, Option<Coloring>, Option<WalkupTrace>)> {
        Ok(match self {
            CorpusEntry::CrossPolytope { d } => {
                let (c, col) = cross_polytope_boundary(*d);
                (c, Some(col), None)
            }
            CorpusEntry::Stacked { d, n, seed } => {
                let (c, col, t) = stacked_cross_polytopal_sphere(*d, *n, *seed);
                (c, Some(col), Some(t))
            }
            CorpusEntry::Walkup { d, sums, handles, seed } => {
                let (c, col, t) = walkup_sample(*d, *sums, *handles, *seed)?;
                (c, Some(col), Some(t))
            }
            CorpusEntry::Builtin { name } => (builtin(name)?, None, None),
            CorpusEntry::Barycentric { of } => {
                let (c, _, _) = of.parts()?;
                let (sd, col) = barycentric_subdivision(&c);
                (sd, Some(col), None)
            }
            CorpusEntry::DisjointUnion { left, right } => {
                let (a, _, _) = left.parts()?;
                let (b, _, _) = right.parts()?;
                (disjoint_union(&a, &b), None, None)
            }
            CorpusEntry::MinusFacet { of } => {
                let (c, col, _) = of.parts()?;
                let rest = Complex::from_facets(c.facets()[1..].iter().map(|f| f.vertices().to_vec()))?;
                let col = col.map(|k| k.restrict(&rest));
                (rest, col, None)
            }
            CorpusEntry::Facets { facets, .. } => (Complex::from_facets(facets.clone())?, None, None),
            CorpusEntry::File { path } => {
                let l = crate::io::read_complex(std::path::Path::new(path))?;
                (l.complex, l.coloring, l.trace)
            }
        })
    }

    pub fn build(&self) -> Result<Instance> {
        let (c, col, trace) = self.parts()?;
        Ok(Instance::new(self.name(), c, col, trace))
    }
}

/// Seeds whose Walkup samples are orientable (checked in the test suite).
pub const WALKUP4_SEED: u64 = 1;
pub const WALKUP5_SEED: u64 = 1;

/// The desk-scale corpus the acceptance suite runs on.
pub fn default_corpus() -> Vec<CorpusEntry> {
    use CorpusEntry::*;
    let b = |e: CorpusEntry| Box::new(e);
    vec![
        CrossPolytope { d: 3 },
        CrossPolytope { d: 4 },
        CrossPolytope { d: 5 },
        CrossPolytope { d: 6 },
        Stacked { d: 3, n: 3, seed: 0 },
        Stacked { d: 4, n: 2, seed: 0 },
        Stacked { d: 4, n: 3, seed: 0 },
        Stacked { d: 5, n: 2, seed: 0 },
        Walkup { d: 4, sums: 2, handles: 1, seed: WALKUP4_SEED },
        Walkup { d: 5, sums: 2, handles: 2, seed: WALKUP5_SEED },
        Barycentric { of: b(Builtin { name: "simplex_boundary:3".into() }) },
        Barycentric { of: b(Builtin { name: "simplex_boundary:4".into() }) },
        Barycentric { of: b(Builtin { name: "torus_7".into() }) },
        Barycentric { of: b(Builtin { name: "rp2_6".into() }) },
        DisjointUnion { left: b(CrossPolytope { d: 3 }), right: b(CrossPolytope { d: 3 }) },
        MinusFacet { of: b(CrossPolytope { d: 4 }) },
        Facets { name: "triangle-and-edge".into(), facets: vec![vec![1, 2, 3], vec![3, 4]] },
    ]
}

pub fn build_corpus(entries: &[CorpusEntry]) -> Result<Vec<Instance>> {
    entries.par_iter().map(|e| e.build()).collect()
}

/// Runs one check on one instance and field; the lower bound check yields a
/// report per `ℓ`.
pub fn run_check(inst: &Instance, check: Check, field: FieldSpec, opts: &CheckOptions) -> Vec<VerificationReport> {
    match check {
        Check::Stanley => {
            let d = inst.d();
            let mut groupings = vec![Grouping::identity(d)];
            if d > 1 {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                for _ in 0..2 {
                    let m = rng.gen_range(1..d);
                    groupings.push(Grouping::random(d, m, &mut rng));
                }
            }
            vec![check_stanley_series(inst, &groupings, d + 4, field, opts.seed)]
        }
        Check::Schenzel => vec![check_flag_schenzel(inst, field, opts)],
        Check::Hdprime => vec![check_flag_hdprime(inst, field, opts)],
        Check::Duality => vec![check_duality(inst, field, opts)],
        Check::Average => vec![check_average_identity(inst, field, &[], opts.seed)],
        Check::Lbt => {
            let ells: Vec<usize> = if opts.ells.is_empty() {
                (1..=2.min(inst.d() / 2).max(1)).collect()
            } else {
                opts.ells.clone()
            };
            ells.into_iter().map(|l| check_lbt(inst, field, l, opts)).collect()
        }
        Check::G2 => vec![check_g2(inst, field, opts.seed)],
        Check::StackedLinks => vec![check_stacked_link_criterion(inst, field, opts.seed)],
    }
}

/// Every (instance, check, field) combination, in that nesting order,
/// computed in parallel and returned in a deterministic order.
pub fn run_suite(instances: &[Instance], checks: &[Check], fields: &[FieldSpec], opts: &CheckOptions) -> Vec<VerificationReport> {
    let mut tasks = Vec::new();
    for inst in instances {
        for &check in checks {
            for &field in fields {
                tasks.push((inst, check, field));
            }
        }
    }
    tasks
        .par_iter()
        .flat_map_iter(|&(inst, check, field)| {
            let start = std::time::Instant::now();
            let out = run_check(inst, check, field, opts);
            log::info!("{} {check} {field}: {:.2?}", inst.name, start.elapsed());
            out
        })
        .collect()
}

/// Counts per status.
pub fn summarize(reports: &[VerificationReport]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for r in reports {
        *m.entry(r.status.to_string()).or_insert(0) += 1;
    }
    m
}

pub fn to_jsonl(reports: &[VerificationReport]) -> String {
    reports.iter().map(|r| serde_json::to_string(r).expect("reports serialize") + "\n").collect()
}

/// `instance,check,field,status,lhs,rhs` with RFC 4180 quoting.
pub fn to_csv(reports: &[VerificationReport]) -> String {
    fn q(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    let mut out = String::from("instance,check,field,status,lhs,rhs\n");
    for r in reports {
        let row = [
            r.instance.name.clone(),
            r.theorem_id.clone(),
            r.instance.field.to_string(),
            r.status.to_string(),
            r.lhs.clone().unwrap_or_default(),
            r.rhs.clone().unwrap_or_default(),
        ];
        out += &row.iter().map(|s| q(s)).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out
}
