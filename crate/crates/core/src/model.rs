//! The characteristic pair (P, Λ) of a quasitoric orbifold.
//!
//! Local groups are never built as group objects. A face's group is seen
//! through its elementary divisors and its box: the lattice points
//! `Σ a_j λ_j` with `0 ≤ a_j < 1` over the facets containing the face.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    determinant, integral_combination, primitivity, rational_determinant,
    smith_normal_form, solve_rational, IntMatrix, Primitivity, Rational, RationalVector,
};
use crate::polytope::{is_subset, CombinatorialPolytope, Face, PolytopeDiagnostic, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid characteristic model:\n{}", join_lines(.0))]
    Invalid(Vec<ModelDiagnostic>),
    #[error("model carries no inward normals; orientation signs are unavailable")]
    MissingNormals,
    #[error("the untwisted sector has no inverse sector")]
    Untwisted,
    #[error("sector does not belong to this model: {0}")]
    ForeignSector(String),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn join_lines(d: &[ModelDiagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelDiagnostic {
    Polytope(PolytopeDiagnostic),
    CharvecCount { expected: usize, found: usize },
    CharvecLength { facet: String, len: usize, dim: usize },
    ZeroCharvec { facet: String },
    NotPrimitive { facet: String, gcd: BigInt },
    SingularVertex { vertex: usize, facets: String },
    NormalCount { expected: usize, found: usize },
    NormalLength { facet: String, len: usize, dim: usize },
    DependentNormals { vertex: usize, facets: String },
}

impl fmt::Display for ModelDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polytope(d) => write!(f, "{d}"),
            Self::CharvecCount { expected, found } => write!(
                f,
                "expected {expected} characteristic vectors (one per facet), found {found}"
            ),
            Self::CharvecLength { facet, len, dim } => write!(
                f,
                "characteristic vector of {facet} has {len} entries, expected {dim}"
            ),
            Self::ZeroCharvec { facet } => write!(f, "characteristic vector of {facet} is zero"),
            Self::NotPrimitive { facet, gcd } => write!(
                f,
                "characteristic vector of {facet} is not primitive (gcd {gcd})"
            ),
            Self::SingularVertex { vertex, facets } => write!(
                f,
                "characteristic vectors at vertex {vertex} ({facets}) are linearly dependent"
            ),
            Self::NormalCount { expected, found } => {
                write!(f, "expected {expected} normals, found {found}")
            }
            Self::NormalLength { facet, len, dim } => {
                write!(f, "normal of {facet} has {len} entries, expected {dim}")
            }
            Self::DependentNormals { vertex, facets } => write!(
                f,
                "inward normals at vertex {vertex} ({facets}) are linearly dependent"
            ),
        }
    }
}

/// A lattice point `Σ a_j λ_j` over `I(face)` with every `a_j ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxElement {
    pub face: Face,
    /// Indexed like `face.facets`.
    pub coeffs: RationalVector,
    pub lattice_point: Vec<BigInt>,
    pub age: Rational,
}

impl BoxElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// All coefficients strictly inside (0, 1).
    pub fn is_interior(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_positive())
    }

    /// Coefficient on a given facet index (zero off the face).
    pub fn coeff_on(&self, facet: usize) -> Rational {
        self.face
            .facets
            .iter()
            .position(|&f| f == facet)
            .map_or_else(Rational::zero, |i| self.coeffs[i].clone())
    }
}

/// A sector `(F, g)`, `g ∈ Box_F°`. The untwisted sector is `(P, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwistedSector {
    pub face: Face,
    pub element: BoxElement,
}

impl TwistedSector {
    pub fn is_untwisted(&self) -> bool {
        self.face.is_whole()
    }

    pub fn age(&self) -> &Rational {
        &self.element.age
    }

    /// `2ι(g)`.
    pub fn degree_shift(&self) -> Rational {
        &self.element.age * Rational::from_integer(2.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiSlReport {
    pub quasi_sl: bool,
    /// Twisted sectors with non-integral age.
    pub offenders: Vec<TwistedSector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicModel {
    polytope: CombinatorialPolytope,
    charvecs: Vec<Vec<BigInt>>,
    normals: Option<Vec<RationalVector>>,
    boxes: BoxCache,
}

/// Boxes computed so far, keyed by facet set. Models are immutable, so the
/// cache never goes stale; it takes no part in equality.
#[derive(Default)]
struct BoxCache(Mutex<HashMap<Vec<usize>, Vec<BoxElement>>>);

impl BoxCache {
    fn lock(&self) -> std::sync::MutexGuard<'_, HashMap<Vec<usize>, Vec<BoxElement>>> {
        self.0.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl Clone for BoxCache {
    fn clone(&self) -> Self {
        Self(Mutex::new(self.lock().clone()))
    }
}

impl PartialEq for BoxCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for BoxCache {}

impl fmt::Debug for BoxCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("..")
    }
}

impl CharacteristicModel {
    /// Builds and validates a model.
    pub fn new(
        polytope: CombinatorialPolytope,
        charvecs: Vec<Vec<BigInt>>,
        normals: Option<Vec<RationalVector>>,
    ) -> Result<Self, ModelError> {
        let m = Self::new_unchecked(polytope, charvecs, normals);
        let diags = m.validate();
        if diags.is_empty() {
            Ok(m)
        } else {
            Err(ModelError::Invalid(diags))
        }
    }

    /// No validation; most queries assume [`validate`](Self::validate) is clean.
    pub fn new_unchecked(
        polytope: CombinatorialPolytope,
        charvecs: Vec<Vec<BigInt>>,
        normals: Option<Vec<RationalVector>>,
    ) -> Self {
        Self {
            polytope,
            charvecs,
            normals,
            boxes: BoxCache::default(),
        }
    }

    pub fn from_i64(
        polytope: CombinatorialPolytope,
        charvecs: &[Vec<i64>],
    ) -> Result<Self, ModelError> {
        let cv = charvecs
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(polytope, cv, None)
    }

    pub fn polytope(&self) -> &CombinatorialPolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn charvecs(&self) -> &[Vec<BigInt>] {
        &self.charvecs
    }

    pub fn charvec(&self, facet: usize) -> &[BigInt] {
        &self.charvecs[facet]
    }

    pub fn normals(&self) -> Option<&[RationalVector]> {
        self.normals.as_deref()
    }

    /// Same data with the normals dropped or replaced.
    pub fn with_normals(&self, normals: Option<Vec<RationalVector>>) -> Result<Self, ModelError> {
        Self::new(self.polytope.clone(), self.charvecs.clone(), normals)
    }

    pub fn validate(&self) -> Vec<ModelDiagnostic> {
        let mut diags: Vec<ModelDiagnostic> = self
            .polytope
            .validate()
            .into_iter()
            .map(ModelDiagnostic::Polytope)
            .collect();
        if !diags.is_empty() {
            return diags;
        }
        let n = self.dim();
        let m = self.polytope.num_facets();
        if self.charvecs.len() != m {
            diags.push(ModelDiagnostic::CharvecCount {
                expected: m,
                found: self.charvecs.len(),
            });
            return diags;
        }
        let mut shapes_ok = true;
        for (i, v) in self.charvecs.iter().enumerate() {
            let facet = self.polytope.facet_name(i).to_string();
            if v.len() != n {
                shapes_ok = false;
                diags.push(ModelDiagnostic::CharvecLength { facet, len: v.len(), dim: n });
                continue;
            }
            match primitivity(v) {
                Primitivity::Primitive => {}
                Primitivity::Zero => diags.push(ModelDiagnostic::ZeroCharvec { facet }),
                Primitivity::Divisible(gcd) => {
                    diags.push(ModelDiagnostic::NotPrimitive { facet, gcd })
                }
            }
        }
        if !shapes_ok {
            return diags;
        }
        // Singularity is independent of primitivity, so report both.
        for vi in 0..self.polytope.num_vertices() {
            if self.vertex_determinant(vi).is_zero() {
                diags.push(ModelDiagnostic::SingularVertex {
                    vertex: vi,
                    facets: self.polytope.face_label(&self.polytope.vertex_face(vi)),
                });
            }
        }
        if let Some(normals) = &self.normals {
            if normals.len() != m {
                diags.push(ModelDiagnostic::NormalCount {
                    expected: m,
                    found: normals.len(),
                });
                return diags;
            }
            let mut lengths_ok = true;
            for (i, v) in normals.iter().enumerate() {
                if v.len() != n {
                    lengths_ok = false;
                    diags.push(ModelDiagnostic::NormalLength {
                        facet: self.polytope.facet_name(i).to_string(),
                        len: v.len(),
                        dim: n,
                    });
                }
            }
            if lengths_ok {
                for vi in 0..self.polytope.num_vertices() {
                    if self.normal_determinant(vi).is_some_and(|d| d.is_zero()) {
                        diags.push(ModelDiagnostic::DependentNormals {
                            vertex: vi,
                            facets: self.polytope.face_label(&self.polytope.vertex_face(vi)),
                        });
                    }
                }
            }
        }
        diags
    }

    /// Λ_F: the n×k matrix with columns λ_i, i ∈ I(F).
    pub fn face_matrix(&self, face: &Face) -> IntMatrix {
        let cols: Vec<&[BigInt]> = face.facets.iter().map(|&i| self.charvec(i)).collect();
        IntMatrix::from_columns(self.dim(), &cols).expect("charvec lengths validated")
    }

    /// det Λ_v with columns in increasing facet order.
    pub fn vertex_determinant(&self, vertex: usize) -> BigInt {
        let face = self.polytope.vertex_face(vertex);
        determinant(&self.face_matrix(&face)).expect("vertex matrix is square")
    }

    fn normal_determinant(&self, vertex: usize) -> Option<Rational> {
        let normals = self.normals.as_ref()?;
        let cols: Vec<RationalVector> = self.polytope.vertices()[vertex]
            .iter()
            .map(|&i| normals[i].clone())
            .collect();
        Some(rational_determinant(self.dim(), &cols).expect("normal lengths validated"))
    }

    /// Elementary divisors of Λ_F; their product is |G_F|.
    pub fn elementary_divisors(&self, face: &Face) -> Vec<BigInt> {
        if face.is_whole() {
            return Vec::new();
        }
        smith_normal_form(&self.face_matrix(face)).elementary_divisors()
    }

    /// Order of the local group G_F (1 for the polytope itself).
    pub fn local_group_order(&self, face: &Face) -> BigInt {
        self.elementary_divisors(face).iter().product()
    }

    /// Box_F, sorted by age and then lattice point; `Box_P = {0}`.
    ///
    /// With `U Λ_F V = D` the saturation of the column lattice is spanned by
    /// `U⁻¹ e_i`, so the cosets are `U⁻¹ c` for `0 ≤ c_i < d_i`, and such a
    /// representative has coefficient vector `V D⁻¹ c`. Reducing those
    /// coefficients mod 1 gives the box element of the coset.
    pub fn box_elements(&self, face: &Face) -> Vec<BoxElement> {
        if let Some(b) = self.boxes.lock().get(&face.facets) {
            return b.clone();
        }
        let b = self.compute_box(face);
        self.boxes.lock().insert(face.facets.clone(), b.clone());
        b
    }

    fn compute_box(&self, face: &Face) -> Vec<BoxElement> {
        let k = face.codim();
        if k == 0 {
            return vec![self.zero_element(face.clone())];
        }
        let snf = smith_normal_form(&self.face_matrix(face));
        let divisors = snf.diagonal();
        debug_assert!(divisors.iter().all(|d| !d.is_zero()), "Λ_F has full column rank");

        // Work with integer numerators over l = lcm(d_i) rather than rationals.
        let l = divisors.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
        let scale: Vec<BigInt> = divisors.iter().map(|d| &l / d).collect();
        let cols: Vec<&[BigInt]> = face.facets.iter().map(|&i| self.charvec(i)).collect();
        let denom = Rational::from_integer(l.clone());

        let mut out = Vec::new();
        let mut c = vec![BigInt::zero(); k];
        loop {
            let nums: Vec<BigInt> = (0..k)
                .map(|row| {
                    let s: BigInt = (0..k).map(|col| &snf.v[(row, col)] * &c[col] * &scale[col]).sum();
                    s.mod_floor(&l)
                })
                .collect();
            let mut point = vec![BigInt::zero(); self.dim()];
            for (a, col) in nums.iter().zip(&cols) {
                for (p, x) in point.iter_mut().zip(col.iter()) {
                    *p += a * x;
                }
            }
            let lattice_point: Vec<BigInt> = point
                .into_iter()
                .map(|p| {
                    debug_assert!((&p % &l).is_zero(), "box element is a lattice point");
                    p / &l
                })
                .collect();
            let age = Rational::from_integer(nums.iter().sum()) / &denom;
            out.push(BoxElement {
                face: face.clone(),
                coeffs: nums.into_iter().map(|a| Rational::new(a, l.clone())).collect(),
                lattice_point,
                age,
            });

            // odometer over the digits c_i ∈ [0, d_i)
            let mut pos = 0;
            loop {
                if pos == k {
                    out.sort_by(|a, b| (&a.age, &a.lattice_point).cmp(&(&b.age, &b.lattice_point)));
                    return out;
                }
                c[pos] += 1;
                if c[pos] < divisors[pos] {
                    break;
                }
                c[pos] = BigInt::zero();
                pos += 1;
            }
        }
    }

    /// Box_F°: elements with every coefficient in (0, 1).
    pub fn interior_box_elements(&self, face: &Face) -> Vec<BoxElement> {
        if face.is_whole() {
            return vec![self.zero_element(face.clone())];
        }
        self.box_elements(face)
            .into_iter()
            .filter(BoxElement::is_interior)
            .collect()
    }

    fn zero_element(&self, face: Face) -> BoxElement {
        let k = face.codim();
        BoxElement {
            face,
            coeffs: vec![Rational::zero(); k],
            lattice_point: vec![BigInt::zero(); self.dim()],
            age: Rational::zero(),
        }
    }

    /// Builds the element with the given coefficients over `face`.
    ///
    /// Panics if the combination is not a lattice point.
    pub fn element_from_coeffs(&self, face: Face, coeffs: RationalVector) -> BoxElement {
        let cols: Vec<&[BigInt]> = face.facets.iter().map(|&i| self.charvec(i)).collect();
        let lattice_point =
            integral_combination(&coeffs, &cols, self.dim()).expect("box element is a lattice point");
        let age = coeffs.iter().sum();
        BoxElement {
            face,
            coeffs,
            lattice_point,
            age,
        }
    }

    /// Finds the box element over `face` with the given lattice point, if any.
    pub fn element_at(&self, face: &Face, point: &[BigInt]) -> Option<BoxElement> {
        if point.len() != self.dim() {
            return None;
        }
        if face.is_whole() {
            return point
                .iter()
                .all(Zero::is_zero)
                .then(|| self.zero_element(face.clone()));
        }
        let coeffs = solve_rational(&self.face_matrix(face), point).ok()??;
        if coeffs
            .iter()
            .any(|a| a.is_negative() || *a >= Rational::one())
        {
            return None;
        }
        Some(self.element_from_coeffs(face.clone(), coeffs))
    }

    /// All sectors: the untwisted one first, then twisted sectors by face
    /// (canonical face order) and element.
    pub fn sectors(&self) -> Vec<TwistedSector> {
        self.polytope
            .enumerate_faces()
            .into_iter()
            .flat_map(|face| {
                self.interior_box_elements(&face)
                    .into_iter()
                    .map(move |element| TwistedSector {
                        face: face.clone(),
                        element,
                    })
            })
            .collect()
    }

    pub fn twisted_sectors(&self) -> Vec<TwistedSector> {
        self.sectors()
            .into_iter()
            .filter(|s| !s.is_untwisted())
            .collect()
    }

    /// `(F, g) ↦ (F, g⁻¹)`, with coefficients `1 − a_i`.
    pub fn inverse_sector(&self, s: &TwistedSector) -> Result<TwistedSector, ModelError> {
        if s.is_untwisted() {
            return Err(ModelError::Untwisted);
        }
        self.check_sector(s)?;
        let coeffs = s
            .element
            .coeffs
            .iter()
            .map(|a| Rational::one() - a)
            .collect();
        Ok(TwistedSector {
            face: s.face.clone(),
            element: self.element_from_coeffs(s.face.clone(), coeffs),
        })
    }

    /// Checks that a sector's data is consistent with this model.
    pub fn check_sector(&self, s: &TwistedSector) -> Result<(), ModelError> {
        let label = || format!("{:?} over {:?}", s.element.lattice_point, s.face.facets);
        let face = self
            .polytope
            .face(&s.face.facets)
            .map_err(|_| ModelError::ForeignSector(label()))?;
        if face != s.face || s.element.face != s.face {
            return Err(ModelError::ForeignSector(label()));
        }
        match self.element_at(&face, &s.element.lattice_point) {
            Some(e) if e == s.element && (e.is_interior() || face.is_whole()) => Ok(()),
            _ => Err(ModelError::ForeignSector(label())),
        }
    }

    pub fn quasi_sl(&self) -> QuasiSlReport {
        let offenders: Vec<TwistedSector> = self
            .twisted_sectors()
            .into_iter()
            .filter(|s| !s.age().is_integer())
            .collect();
        QuasiSlReport {
            quasi_sl: offenders.is_empty(),
            offenders,
        }
    }

    pub fn is_quasi_sl(&self) -> bool {
        self.quasi_sl().quasi_sl
    }

    /// Every vertex has |det Λ_v| = 1.
    pub fn is_manifold(&self) -> bool {
        (0..self.polytope.num_vertices()).all(|v| self.vertex_determinant(v).abs().is_one())
    }

    /// Orientation sign of a vertex: order its facets so the inward normals
    /// form a positive basis, then take the sign of det Λ_v.
    pub fn vertex_sign(&self, vertex: usize) -> Result<i8, ModelError> {
        let nd = self.normal_determinant(vertex).ok_or(ModelError::MissingNormals)?;
        let ld = self.vertex_determinant(vertex);
        // reordering so that the normal determinant is positive flips both signs together
        let s = nd.signum().to_integer() * ld.signum();
        Ok(if s.is_positive() { 1 } else { -1 })
    }

    pub fn vertex_signs(&self) -> Result<Vec<i8>, ModelError> {
        (0..self.polytope.num_vertices())
            .map(|v| self.vertex_sign(v))
            .collect()
    }

    pub fn is_positively_omnioriented(&self) -> Result<bool, ModelError> {
        Ok(self.vertex_signs()?.iter().all(|&s| s == 1))
    }

    /// For each vertex v, Box_v must be the disjoint union of Box_F° over
    /// the faces F ⊇ v. Returns the vertices where this fails.
    pub fn vertex_partition_violations(&self) -> Vec<usize> {
        let faces = self.polytope.enumerate_faces();
        (0..self.polytope.num_vertices())
            .filter(|&vi| {
                let vset = &self.polytope.vertices()[vi];
                let mut from_box: Vec<Vec<BigInt>> = self
                    .box_elements(&self.polytope.vertex_face(vi))
                    .into_iter()
                    .map(|e| e.lattice_point)
                    .collect();
                let mut from_faces: Vec<Vec<BigInt>> = faces
                    .iter()
                    .filter(|f| is_subset(&f.facets, vset))
                    .flat_map(|f| self.interior_box_elements(f))
                    .map(|e| e.lattice_point)
                    .collect();
                from_box.sort();
                from_faces.sort();
                from_box != from_faces
            })
            .collect()
    }
}
