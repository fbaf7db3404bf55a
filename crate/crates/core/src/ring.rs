//! Combinatorial skeleton of the Chen-Ruan product.
//!
//! For sectors (K_1, g_1) and (K_2, g_2) the coefficients of both elements
//! are added facet by facet over I(K_1) ∪ I(K_2). A sum below 1 stays in
//! the twist factor, a sum above 1 leaves its fractional part in the twist
//! factor and one Thom form θ_i in Θ(g_1, g_2), and a sum of exactly 1
//! moves θ_i into Θ and drops facet i from the target face. The product
//! vanishes when K_1 ∩ K_2 is empty.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{frac, Rational};
use crate::model::{BoxElement, CharacteristicModel, ModelError, TwistedSector};
use crate::polytope::{is_subset, Face, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("product bookkeeping is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwistCase {
    /// a_1 + a_2 < 1
    FracOnly,
    /// a_1 + a_2 > 1
    IntegerPlusFrac,
    /// a_1 + a_2 = 1
    IntegerExact,
}

impl TwistCase {
    pub fn label(&self) -> &'static str {
        match self {
            Self::FracOnly => "frac-only",
            Self::IntegerPlusFrac => "integer-plus-frac",
            Self::IntegerExact => "integer-exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSkeleton {
    /// K_1 ∩ K_2.
    pub meet: Face,
    /// A vertex of K_1 ∩ K_2, used to check the result inside Box_v.
    pub witness_vertex: usize,
    /// K: the face with g_1 g_2 ∈ Box_K°.
    pub target_face: Face,
    pub product_element: BoxElement,
    /// Facets contributing a Thom form to Θ(g_1, g_2).
    pub theta_facets: Vec<usize>,
    pub case_tags: BTreeMap<usize, TwistCase>,
}

impl ProductSkeleton {
    pub fn target_sector(&self) -> TwistedSector {
        TwistedSector {
            face: self.target_face.clone(),
            element: self.product_element.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectorProduct {
    /// K_1 ∩ K_2 is empty.
    Zero,
    Product(ProductSkeleton),
}

impl SectorProduct {
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn skeleton(&self) -> Option<&ProductSkeleton> {
        match self {
            Self::Zero => None,
            Self::Product(p) => Some(p),
        }
    }
}

pub fn sector_product(
    model: &CharacteristicModel,
    s1: &TwistedSector,
    s2: &TwistedSector,
) -> Result<SectorProduct, RingError> {
    model.check_sector(s1)?;
    model.check_sector(s2)?;
    let p = model.polytope();

    let mut union: Vec<usize> = s1.face.facets.iter().chain(&s2.face.facets).copied().collect();
    union.sort_unstable();
    union.dedup();
    let Some(witness_vertex) = p.vertices().iter().position(|v| is_subset(&union, v)) else {
        return Ok(SectorProduct::Zero);
    };
    let meet = p.face(&union)?;

    let one = Rational::one();
    let mut case_tags = BTreeMap::new();
    let mut theta_facets = Vec::new();
    let mut target = Vec::new();
    let mut coeffs = Vec::new();
    for &i in &union {
        let sum = s1.element.coeff_on(i) + s2.element.coeff_on(i);
        if sum.is_zero() {
            continue;
        }
        let case = if sum < one {
            TwistCase::FracOnly
        } else if sum > one {
            TwistCase::IntegerPlusFrac
        } else {
            TwistCase::IntegerExact
        };
        case_tags.insert(i, case);
        if case != TwistCase::FracOnly {
            theta_facets.push(i);
        }
        let f = frac(&sum);
        if f.is_positive() {
            target.push(i);
            coeffs.push(f);
        }
    }
    let target_face = p.face(&target)?;
    let product_element = model.element_from_coeffs(target_face.clone(), coeffs);

    if !meet.is_subface_of(&target_face) {
        return Err(RingError::Inconsistent(format!(
            "K_1 ∩ K_2 = {:?} is not a subface of K = {:?}",
            meet.facets, target_face.facets
        )));
    }
    if !(product_element.is_interior() || target_face.is_whole()) {
        return Err(RingError::Inconsistent("product is not interior to K".into()));
    }
    let vertex_face = p.vertex_face(witness_vertex);
    if model.element_at(&vertex_face, &product_element.lattice_point).is_none() {
        return Err(RingError::Inconsistent("product is not a box element at the witness vertex".into()));
    }
    let lhs = s1.age() + s2.age();
    let rhs = &product_element.age + Rational::from_integer(theta_facets.len().into());
    if lhs != rhs {
        return Err(RingError::Inconsistent(format!(
            "ages {lhs} on the left, {rhs} on the right"
        )));
    }
    Ok(SectorProduct::Product(ProductSkeleton {
        meet,
        witness_vertex,
        target_face,
        product_element,
        theta_facets,
        case_tags,
    }))
}

/// One cell of the multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableEntry {
    Zero,
    /// Index into [`ProductTable::sectors`] and the Θ facets.
    Sector { index: usize, theta_facets: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTable {
    /// All sectors, the untwisted one first.
    pub sectors: Vec<TwistedSector>,
    pub entries: Vec<Vec<TableEntry>>,
    /// Triples (i, j, k) with a common vertex where (s_i s_j) s_k ≠ s_i (s_j s_k).
    pub associativity_violations: Vec<(usize, usize, usize)>,
    pub commutativity_violations: Vec<(usize, usize)>,
}

impl ProductTable {
    pub fn is_consistent(&self) -> bool {
        self.associativity_violations.is_empty() && self.commutativity_violations.is_empty()
    }
}

pub fn sector_product_table(model: &CharacteristicModel) -> Result<ProductTable, RingError> {
    let sectors = model.sectors();
    let index: BTreeMap<&TwistedSector, usize> = sectors.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut entries = Vec::with_capacity(sectors.len());
    for a in &sectors {
        let mut row = Vec::with_capacity(sectors.len());
        for b in &sectors {
            row.push(match sector_product(model, a, b)? {
                SectorProduct::Zero => TableEntry::Zero,
                SectorProduct::Product(p) => {
                    let t = p.target_sector();
                    let Some(&i) = index.get(&t) else {
                        return Err(RingError::Inconsistent(format!(
                            "product {:?} is not a sector",
                            t.element.lattice_point
                        )));
                    };
                    TableEntry::Sector {
                        index: i,
                        theta_facets: p.theta_facets,
                    }
                }
            });
        }
        entries.push(row);
    }

    let n = sectors.len();
    let target = |i: usize, j: usize| match &entries[i][j] {
        TableEntry::Zero => None,
        TableEntry::Sector { index, .. } => Some(*index),
    };
    let mut commutativity_violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if entries[i][j] != entries[j][i] {
                commutativity_violations.push((i, j));
            }
        }
    }
    let p = model.polytope();
    let mut associativity_violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut union: Vec<usize> = [&sectors[i], &sectors[j], &sectors[k]]
                    .iter()
                    .flat_map(|s| s.face.facets.iter().copied())
                    .collect();
                union.sort_unstable();
                union.dedup();
                if !p.vertices().iter().any(|v| is_subset(&union, v)) {
                    continue;
                }
                let left = target(i, j).and_then(|ij| target(ij, k));
                let right = target(j, k).and_then(|jk| target(i, jk));
                if left.is_none() || left != right {
                    associativity_violations.push((i, j, k));
                }
            }
        }
    }
    Ok(ProductTable {
        sectors,
        entries,
        associativity_violations,
        commutativity_violations,
    })
}
