//! Simple polytopes given purely by vertex–facet incidence.
//!
//! A face is identified with the set of facets containing it. For a simple
//! n-polytope every face of codimension k lies on exactly k facets, and a
//! facet set is a face exactly when it is contained in some vertex's set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Facet indices; always sorted and duplicate-free.
pub type FacetSet = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("facet set {0:?} is not a face of the polytope")]
    NotAFace(FacetSet),
    #[error("cannot truncate a face of codimension {0}; codimension at least 2 is required")]
    CodimensionTooSmall(usize),
    #[error("invalid polytope: {0}")]
    Invalid(String),
}

/// One violated invariant of a [`CombinatorialPolytope`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolytopeDiagnostic {
    ZeroDimension,
    Simplicity { vertex: usize, size: usize, dim: usize },
    UnknownFacet { vertex: usize, facet: usize },
    RepeatedFacet { vertex: usize, facet: usize },
    UnusedFacet { facet: usize },
    DuplicateVertex { first: usize, second: usize },
    DuplicateFacetName { name: String },
}

impl fmt::Display for PolytopeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroDimension => write!(f, "polytope dimension must be at least 1"),
            Self::Simplicity { vertex, size, dim } => write!(
                f,
                "simplicity violated at vertex {vertex}: lies on {size} facets, expected {dim}"
            ),
            Self::UnknownFacet { vertex, facet } => {
                write!(f, "vertex {vertex} refers to unknown facet index {facet}")
            }
            Self::RepeatedFacet { vertex, facet } => {
                write!(f, "vertex {vertex} lists facet {facet} more than once")
            }
            Self::UnusedFacet { facet } => write!(f, "facet {facet} contains no vertex"),
            Self::DuplicateVertex { first, second } => {
                write!(f, "vertices {first} and {second} have the same facet set")
            }
            Self::DuplicateFacetName { name } => write!(f, "facet name {name:?} is used twice"),
        }
    }
}

/// A face, named by its facet set `I(F)`. The empty set is the polytope itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub facets: FacetSet,
    pub dim: usize,
}

impl Face {
    pub fn codim(&self) -> usize {
        self.facets.len()
    }

    pub fn is_whole(&self) -> bool {
        self.facets.is_empty()
    }

    /// `self ≤ other` in the face poset, i.e. `I(other) ⊆ I(self)`.
    pub fn is_subface_of(&self, other: &Face) -> bool {
        is_subset(&other.facets, &self.facets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialPolytope {
    dim: usize,
    facet_names: Vec<String>,
    vertices: Vec<FacetSet>,
}

impl CombinatorialPolytope {
    /// Vertex sets are sorted on construction; no other checking is done
    /// (see [`validate`](Self::validate)).
    pub fn new(dim: usize, facet_names: Vec<String>, vertices: Vec<Vec<usize>>) -> Self {
        let vertices = vertices
            .into_iter()
            .map(|mut v| {
                v.sort_unstable();
                v
            })
            .collect();
        Self {
            dim,
            facet_names,
            vertices,
        }
    }

    /// The n-simplex with facets `F1 … F(n+1)`.
    pub fn simplex(n: usize) -> Self {
        let names = (1..=n + 1).map(|i| format!("F{i}")).collect();
        let vertices = (0..=n)
            .map(|omit| (0..=n).filter(|&i| i != omit).collect())
            .collect();
        Self::new(n, names, vertices)
    }

    /// Product polytope; facet names get the given prefixes.
    pub fn product(a: &Self, b: &Self, prefix_a: &str, prefix_b: &str) -> Self {
        let m = a.num_facets();
        let names = a
            .facet_names
            .iter()
            .map(|s| format!("{prefix_a}{s}"))
            .chain(b.facet_names.iter().map(|s| format!("{prefix_b}{s}")))
            .collect();
        let mut vertices = Vec::new();
        for va in &a.vertices {
            for vb in &b.vertices {
                vertices.push(va.iter().copied().chain(vb.iter().map(|j| j + m)).collect());
            }
        }
        Self::new(a.dim + b.dim, names, vertices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.facet_names.len()
    }

    pub fn facet_names(&self) -> &[String] {
        &self.facet_names
    }

    pub fn facet_name(&self, i: usize) -> &str {
        &self.facet_names[i]
    }

    pub fn facet_index(&self, name: &str) -> Option<usize> {
        self.facet_names.iter().position(|n| n == name)
    }

    pub fn vertices(&self) -> &[FacetSet] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn validate(&self) -> Vec<PolytopeDiagnostic> {
        let mut diags = Vec::new();
        if self.dim == 0 {
            diags.push(PolytopeDiagnostic::ZeroDimension);
        }
        let m = self.num_facets();
        let mut seen_names = BTreeSet::new();
        for name in &self.facet_names {
            if !seen_names.insert(name) {
                diags.push(PolytopeDiagnostic::DuplicateFacetName { name: name.clone() });
            }
        }
        let mut used = vec![false; m];
        let mut first_seen: BTreeMap<&FacetSet, usize> = BTreeMap::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            if v.len() != self.dim {
                diags.push(PolytopeDiagnostic::Simplicity {
                    vertex: vi,
                    size: v.len(),
                    dim: self.dim,
                });
            }
            for w in v.windows(2) {
                if w[0] == w[1] {
                    diags.push(PolytopeDiagnostic::RepeatedFacet { vertex: vi, facet: w[0] });
                }
            }
            for &f in v {
                if f >= m {
                    diags.push(PolytopeDiagnostic::UnknownFacet { vertex: vi, facet: f });
                } else {
                    used[f] = true;
                }
            }
            if let Some(&first) = first_seen.get(v) {
                diags.push(PolytopeDiagnostic::DuplicateVertex { first, second: vi });
            } else {
                first_seen.insert(v, vi);
            }
        }
        for (f, u) in used.iter().enumerate() {
            if !u {
                diags.push(PolytopeDiagnostic::UnusedFacet { facet: f });
            }
        }
        diags
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn whole(&self) -> Face {
        Face {
            facets: Vec::new(),
            dim: self.dim,
        }
    }

    /// Returns the face with the given facet set, or an error if the facets
    /// have no common vertex.
    pub fn face(&self, facets: &[usize]) -> Result<Face, PolytopeError> {
        let mut facets = facets.to_vec();
        facets.sort_unstable();
        facets.dedup();
        if facets.len() > self.dim || !self.vertices.iter().any(|v| is_subset(&facets, v)) {
            return Err(PolytopeError::NotAFace(facets));
        }
        let dim = self.dim - facets.len();
        Ok(Face { facets, dim })
    }

    pub fn vertex_face(&self, vertex: usize) -> Face {
        Face {
            facets: self.vertices[vertex].clone(),
            dim: 0,
        }
    }

    /// Every face exactly once, sorted by codimension and then by facet set,
    /// so the polytope itself comes first and vertices last.
    pub fn enumerate_faces(&self) -> Vec<Face> {
        let mut sets: BTreeSet<FacetSet> = BTreeSet::new();
        for v in &self.vertices {
            let k = v.len();
            for mask in 0u64..(1u64 << k) {
                let s: FacetSet = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| v[b]).collect();
                sets.insert(s);
            }
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|facets| Face {
                dim: self.dim - facets.len(),
                facets,
            })
            .collect();
        faces.sort_by(|a, b| (a.codim(), &a.facets).cmp(&(b.codim(), &b.facets)));
        faces
    }

    /// Indices of the vertices lying on `face`.
    pub fn face_vertices(&self, face: &Face) -> Vec<usize> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| is_subset(&face.facets, v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Faces G with G ≤ F.
    pub fn subfaces(&self, face: &Face) -> Vec<Face> {
        self.enumerate_faces()
            .into_iter()
            .filter(|g| g.is_subface_of(face))
            .collect()
    }

    /// (f_0, …, f_d) for the face F of dimension d; f_d = 1.
    pub fn f_vector(&self, face: &Face) -> Vec<u64> {
        // Subfaces are I(F) ∪ S for S ⊆ I(v) ∖ I(F), v a vertex of F.
        let mut extra: BTreeSet<FacetSet> = BTreeSet::new();
        for v in self.vertices.iter().filter(|v| is_subset(&face.facets, v)) {
            let rest: Vec<usize> = v.iter().copied().filter(|i| !face.facets.contains(i)).collect();
            for mask in 0u64..(1u64 << rest.len()) {
                extra.insert((0..rest.len()).filter(|b| mask >> b & 1 == 1).map(|b| rest[b]).collect());
            }
        }
        let mut f = vec![0u64; face.dim + 1];
        for s in extra {
            f[face.dim - s.len()] += 1;
        }
        f
    }

    /// h-vector of the face, from `Σ f_i (t−1)^i = Σ h_i t^{d−i}`.
    pub fn h_vector(&self, face: &Face) -> Vec<i64> {
        h_from_f(&self.f_vector(face))
    }

    /// Cuts off `face` by a new facet (appended at index `m`, named `new_name`).
    ///
    /// Vertices off the face survive; each vertex w on the face is replaced
    /// by the k vertices `(I(w) ∖ {i}) ∪ {new}` for `i ∈ I(face)`.
    pub fn truncate(&self, face: &Face, new_name: &str) -> Result<CombinatorialPolytope, PolytopeError> {
        let face = self.face(&face.facets)?;
        if face.codim() < 2 {
            return Err(PolytopeError::CodimensionTooSmall(face.codim()));
        }
        if self.facet_index(new_name).is_some() {
            return Err(PolytopeError::Invalid(format!(
                "facet name {new_name:?} already in use"
            )));
        }
        let new = self.num_facets();
        let mut vertices = Vec::with_capacity(self.vertices.len() + face.codim() * 4);
        for v in &self.vertices {
            if !is_subset(&face.facets, v) {
                vertices.push(v.clone());
            }
        }
        for v in &self.vertices {
            if is_subset(&face.facets, v) {
                for &i in &face.facets {
                    let mut nv: FacetSet = v.iter().copied().filter(|&j| j != i).collect();
                    nv.push(new);
                    vertices.push(nv);
                }
            }
        }
        let mut names = self.facet_names.clone();
        names.push(new_name.to_string());
        let out = CombinatorialPolytope::new(self.dim, names, vertices);
        let diags = out.validate();
        if let Some(d) = diags.first() {
            return Err(PolytopeError::Invalid(d.to_string()));
        }
        Ok(out)
    }

    pub fn face_label(&self, face: &Face) -> String {
        if face.is_whole() {
            "P".to_string()
        } else {
            face.facets
                .iter()
                .map(|&i| self.facet_names[i].as_str())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

/// h-vector from an f-vector `(f_0, …, f_d)`.
pub fn h_from_f(f: &[u64]) -> Vec<i64> {
    let d = f.len() - 1;
    // coefficient of t^j in Σ_i f_i (t−1)^i
    let mut coeff = vec![0i64; d + 1];
    for (i, &fi) in f.iter().enumerate() {
        for (j, c) in coeff.iter_mut().enumerate().take(i + 1) {
            let sign = if (i - j) % 2 == 0 { 1 } else { -1 };
            *c += sign * binomial(i, j) * fi as i64;
        }
    }
    (0..=d).map(|k| coeff[d - k]).collect()
}

pub fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Both slices sorted.
pub fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}
