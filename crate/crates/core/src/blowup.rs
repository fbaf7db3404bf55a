//! Combinatorial blowups along faces.
//!
//! Blowing up along a face F of codimension k ≥ 2 truncates F by a new
//! facet F_0 whose characteristic vector is `λ_0 = Σ b_j λ_j` with every
//! `b_j > 0`. The blowup is crepant when `Σ b_j = 1` and a resolution step
//! when every `b_j < 1`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cohomology::{cr_betti, euler_cr, CRBettiTable, CohomologyError};
use crate::linalg::{gcd_all, primitivity, solve_rational, Primitivity, Rational, RationalVector};
use crate::model::{BoxElement, CharacteristicModel, ModelError};
use crate::polytope::{Face, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("blowup face must have codimension at least 2, got {0}")]
    CodimensionTooSmall(usize),
    #[error("lambda0 has {len} entries, expected {dim}")]
    WrongLength { len: usize, dim: usize },
    #[error("lambda0 is not primitive")]
    NotPrimitive,
    #[error("lambda0 is not in the linear span of the face's characteristic vectors")]
    NotInSpan,
    #[error("lambda0 is outside the open cone of the face: coefficients ({})", fmt_coeffs(.0))]
    OutsideCone(RationalVector),
    #[error("resolution did not terminate within {0} steps")]
    NoTermination(BigInt),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

fn fmt_coeffs(v: &[Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupSpec {
    pub face: Face,
    pub lambda0: Vec<BigInt>,
    /// `λ_0 = Σ b_j λ_j`, indexed like `face.facets`.
    pub b: RationalVector,
    pub crepant: bool,
    pub resolution_step: bool,
}

impl BlowupSpec {
    pub fn b_sum(&self) -> Rational {
        self.b.iter().sum()
    }
}

pub fn make_blowup_spec(
    model: &CharacteristicModel,
    face: &Face,
    lambda0: &[BigInt],
) -> Result<BlowupSpec, BlowupError> {
    let face = model.polytope().face(&face.facets)?;
    if face.codim() < 2 {
        return Err(BlowupError::CodimensionTooSmall(face.codim()));
    }
    if lambda0.len() != model.dim() {
        return Err(BlowupError::WrongLength {
            len: lambda0.len(),
            dim: model.dim(),
        });
    }
    if primitivity(lambda0) != Primitivity::Primitive {
        return Err(BlowupError::NotPrimitive);
    }
    let b = solve_rational(&model.face_matrix(&face), lambda0)
        .expect("face columns are independent in a valid model")
        .ok_or(BlowupError::NotInSpan)?;
    if b.iter().any(|x| !x.is_positive()) {
        return Err(BlowupError::OutsideCone(b));
    }
    let one = Rational::one();
    let crepant = b.iter().sum::<Rational>() == one;
    let resolution_step = b.iter().all(|x| *x < one);
    Ok(BlowupSpec {
        face,
        lambda0: lambda0.to_vec(),
        b,
        crepant,
        resolution_step,
    })
}

/// A facet name not yet used by the model: `F0`, then `F0_2`, `F0_3`, …
pub fn fresh_facet_name(model: &CharacteristicModel) -> String {
    let p = model.polytope();
    std::iter::once("F0".to_string())
        .chain((2..).map(|i| format!("F0_{i}")))
        .find(|n| p.facet_index(n).is_none())
        .expect("unbounded name supply")
}

/// Truncates the face and assigns λ_0 to the new facet, which is appended
/// last. If the model has normals, the new facet's normal is the sum of the
/// normals of the facets containing the face.
pub fn blow_up(model: &CharacteristicModel, spec: &BlowupSpec) -> Result<CharacteristicModel, BlowupError> {
    let checked = make_blowup_spec(model, &spec.face, &spec.lambda0)?;
    let name = fresh_facet_name(model);
    let polytope = model.polytope().truncate(&checked.face, &name)?;
    let mut charvecs = model.charvecs().to_vec();
    charvecs.push(checked.lambda0.clone());
    let normals = model.normals().map(|ns| {
        let mut ns = ns.to_vec();
        let mut sum = vec![Rational::zero(); model.dim()];
        for &i in &checked.face.facets {
            for (s, x) in sum.iter_mut().zip(&ns[i]) {
                *s += x;
            }
        }
        ns.push(sum);
        ns
    });
    // Valid by construction: λ_0 is primitive, each new vertex determinant is
    // ±b_i·det Λ_w ≠ 0, and likewise for the normals (with all b_i = 1).
    Ok(CharacteristicModel::new_unchecked(polytope, charvecs, normals))
}

/// A vertex `v` of the blowup lying over the vertex `w` of the blown-up face,
/// obtained by dropping facet `dropped` from `I(w)` and adding the new facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    pub old_vertex: usize,
    pub new_vertex: usize,
    pub dropped: usize,
    /// Coefficient b_i of the dropped facet.
    pub b: Rational,
}

/// Pairs each new vertex on F_0 with the old vertex it replaces.
pub fn preimages(x: &CharacteristicModel, spec: &BlowupSpec, y: &CharacteristicModel) -> Vec<Preimage> {
    let new_facet = x.polytope().num_facets();
    let mut out = Vec::new();
    for w in x.polytope().face_vertices(&spec.face) {
        let iw = &x.polytope().vertices()[w];
        for (pos, &i) in spec.face.facets.iter().enumerate() {
            let mut target: Vec<usize> = iw.iter().copied().filter(|&j| j != i).collect();
            target.push(new_facet);
            let new_vertex = y
                .polytope()
                .vertices()
                .iter()
                .position(|v| *v == target)
                .expect("truncation creates every preimage vertex");
            out.push(Preimage {
                old_vertex: w,
                new_vertex,
                dropped: i,
                b: spec.b[pos].clone(),
            });
        }
    }
    out
}

/// Primitive interior box elements of age 1: exactly the λ_0 giving crepant blowups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrepantCandidateReport {
    pub face: Face,
    /// For each vertex w of the face, the unique v with ⟨λ_i, v⟩ = 1 for i ∈ I(w).
    pub dual_vectors: Vec<(usize, RationalVector)>,
    pub candidates: Vec<BoxElement>,
}

pub fn crepant_candidates(model: &CharacteristicModel, face: &Face) -> Result<CrepantCandidateReport, BlowupError> {
    let face = model.polytope().face(&face.facets)?;
    if face.codim() < 2 {
        return Err(BlowupError::CodimensionTooSmall(face.codim()));
    }
    let p = model.polytope();
    let ones = vec![BigInt::one(); model.dim()];
    let dual_vectors = p
        .face_vertices(&face)
        .into_iter()
        .map(|w| {
            let rows = model.face_matrix(&p.vertex_face(w)).transpose();
            let v = solve_rational(&rows, &ones)
                .expect("vertex matrix is invertible")
                .expect("square invertible system has a solution");
            (w, v)
        })
        .collect();
    let candidates = model
        .interior_box_elements(&face)
        .into_iter()
        .filter(|e| e.age.is_one() && gcd_all(&e.lattice_point).is_one())
        .collect();
    Ok(CrepantCandidateReport {
        face,
        dual_vectors,
        candidates,
    })
}

/// Outcome of one theorem check. Checks outside the theorem's hypotheses
/// record what was observed without passing judgement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    OutOfScope { observed: bool },
}

impl Verdict {
    fn judge(in_scope: bool, observed: bool) -> Self {
        match (in_scope, observed) {
            (true, true) => Self::Holds,
            (true, false) => Self::Fails,
            (false, observed) => Self::OutOfScope { observed },
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Self::Fails)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Holds => "holds",
            Self::Fails => "FAILS",
            Self::OutOfScope { .. } => "out of theorem scope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McKayReport {
    pub spec: BlowupSpec,
    /// Real dimension 2n.
    pub real_dim: usize,
    pub x_quasi_sl: bool,
    pub y_quasi_sl: bool,
    pub euler_before: BigInt,
    pub euler_after: BigInt,
    pub betti_before: CRBettiTable,
    pub betti_after: CRBettiTable,
    /// Euler conservation; in scope for quasi-SL X and crepant blowups.
    pub euler_conserved: Verdict,
    /// Full table equality; in scope additionally when 2n ≤ 6.
    pub betti_conserved: Verdict,
    /// h²_CR(Y) ≥ h²_CR(X); in scope additionally when 2n ≥ 8.
    pub h2_monotone: Verdict,
    /// Y is quasi-SL; in scope for quasi-SL X and crepant blowups.
    pub quasi_sl_preserved: Verdict,
}

impl McKayReport {
    pub fn in_theorem_scope(&self) -> bool {
        self.x_quasi_sl && self.spec.crepant
    }

    pub fn any_failure(&self) -> bool {
        [
            self.euler_conserved,
            self.betti_conserved,
            self.h2_monotone,
            self.quasi_sl_preserved,
        ]
        .iter()
        .any(Verdict::is_failure)
    }
}

pub fn verify_mckay(model: &CharacteristicModel, spec: &BlowupSpec) -> Result<McKayReport, BlowupError> {
    let spec = make_blowup_spec(model, &spec.face, &spec.lambda0)?;
    let y = blow_up(model, &spec)?;
    let (before, after) = (cr_betti(model), cr_betti(&y));
    let (euler_before, euler_after) = (
        euler_cr(model)?.by_vertices,
        euler_cr(&y)?.by_vertices,
    );
    let real_dim = 2 * model.dim();
    let scope = before.quasi_sl && spec.crepant;
    Ok(McKayReport {
        real_dim,
        x_quasi_sl: before.quasi_sl,
        y_quasi_sl: after.quasi_sl,
        euler_conserved: Verdict::judge(scope, euler_before == euler_after),
        betti_conserved: Verdict::judge(scope && real_dim <= 6, before.entries == after.entries),
        h2_monotone: Verdict::judge(scope && real_dim >= 8, after.h2() >= before.h2()),
        quasi_sl_preserved: Verdict::judge(scope, after.quasi_sl),
        euler_before,
        euler_after,
        betti_before: before,
        betti_after: after,
        spec,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub steps: Vec<BlowupSpec>,
    pub model: CharacteristicModel,
}

/// The next blowup of [`resolve`], or `None` for a manifold.
///
/// Picks the first face of maximal codimension with a nontrivial interior
/// box, primitivizes its interior elements, and takes the one of least age
/// (then least lattice point).
pub fn next_resolution_step(model: &CharacteristicModel) -> Option<BlowupSpec> {
    next_step_cached(model, &mut StepCache::default())
}

/// Box contents depend only on the characteristic vectors of a face, which a
/// blowup leaves alone, so [`resolve`] remembers them across steps.
#[derive(Default)]
struct StepCache {
    singular: HashMap<Vec<i64>, bool>,
    twisted: HashMap<Vec<i64>, bool>,
}

impl StepCache {
    /// Looks up `facets` by their flattened characteristic vectors; models
    /// whose entries overflow `i64` just skip the cache.
    fn get(
        map: &mut HashMap<Vec<i64>, bool>,
        model: &CharacteristicModel,
        facets: &[usize],
        compute: impl FnOnce() -> bool,
    ) -> bool {
        let key: Option<Vec<i64>> = facets.iter().flat_map(|&i| model.charvec(i)).map(|x| x.to_i64()).collect();
        match key {
            Some(key) => *map.entry(key).or_insert_with(compute),
            None => compute(),
        }
    }
}

fn next_step_cached(model: &CharacteristicModel, cache: &mut StepCache) -> Option<BlowupSpec> {
    // G_F embeds in G_v for every vertex v of F, so only faces through a
    // singular vertex can be twisted. Scan those by decreasing codimension,
    // then facet set, and stop at the first twisted one. Facets never qualify.
    let p = model.polytope();
    let n = model.dim();
    let mut candidates: BTreeSet<(Reverse<usize>, Vec<usize>)> = BTreeSet::new();
    for (vi, v) in p.vertices().iter().enumerate() {
        let singular = StepCache::get(&mut cache.singular, model, v, || {
            !model.vertex_determinant(vi).abs().is_one()
        });
        if !singular {
            continue;
        }
        for mask in 0u64..(1u64 << v.len()) {
            if mask.count_ones() >= 2 {
                let facets: Vec<usize> = (0..v.len()).filter(|b| mask >> b & 1 == 1).map(|b| v[b]).collect();
                candidates.insert((Reverse(facets.len()), facets));
            }
        }
    }
    let face = candidates
        .into_iter()
        .map(|(codim, facets)| Face { facets, dim: n - codim.0 })
        .find(|f| {
            StepCache::get(&mut cache.twisted, model, &f.facets, || {
                !model.local_group_order(f).is_one() && !model.interior_box_elements(f).is_empty()
            })
        })?;
    let face = &face;

    let best = model
        .interior_box_elements(face)
        .into_iter()
        .map(|e| {
            let g = Rational::from_integer(gcd_all(&e.lattice_point));
            let coeffs = e.coeffs.iter().map(|a| a / &g).collect();
            model.element_from_coeffs(face.clone(), coeffs)
        })
        .min_by(|a, b| (&a.age, &a.lattice_point).cmp(&(&b.age, &b.lattice_point)))?;
    Some(make_blowup_spec(model, face, &best.lattice_point).expect("interior primitive element lies in the open cone"))
}

/// Blows up repeatedly until the model is a manifold.
///
/// Every step is a resolution step, so each vertex of the blown-up face, of
/// order o ≥ 2, is replaced by at most n vertices of orders b_i·o ≤ o − 1.
/// Hence `Σ_v ((n+1)^{o_v − 1} − 1)` drops by at least one per step and
/// bounds the number of steps.
pub fn resolve(model: &CharacteristicModel) -> Result<Resolution, BlowupError> {
    let bound = resolution_bound(model);
    let mut current = model.clone();
    let mut steps = Vec::new();
    let mut cache = StepCache::default();
    while let Some(spec) = next_step_cached(&current, &mut cache) {
        if BigInt::from(steps.len()) >= bound {
            return Err(BlowupError::NoTermination(bound));
        }
        current = blow_up(&current, &spec)?;
        steps.push(spec);
    }
    debug_assert!(current.is_manifold());
    Ok(Resolution {
        steps,
        model: current,
    })
}

/// The step bound used by [`resolve`].
pub fn resolution_bound(model: &CharacteristicModel) -> BigInt {
    let base = BigInt::from(model.dim() + 1);
    let p = model.polytope();
    (0..p.num_vertices())
        .map(|v| {
            let o: u32 = model
                .local_group_order(&p.vertex_face(v))
                .try_into()
                .expect("vertex order fits in u32");
            base.pow(o - 1) - 1
        })
        .sum()
}
