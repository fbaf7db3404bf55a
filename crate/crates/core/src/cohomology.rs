//! Ordinary and Chen-Ruan Betti numbers.
//!
//! The rational cohomology of the quasitoric orbifold X(F) over a face F is
//! concentrated in even degrees with rank H^{2i} = h_i(F). Chen-Ruan
//! cohomology adds one copy of H*(X(F)) per twisted sector (F, g), shifted
//! up by 2ι(g).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::Rational;
use crate::model::{CharacteristicModel, TwistedSector};
use crate::polytope::Face;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("Euler cross-check failed: {by_sectors} from sectors, {by_vertices} from vertex orders")]
    EulerMismatch {
        by_sectors: BigInt,
        by_vertices: BigInt,
    },
}

/// Ranks of H^d(X(F); Q), keyed by (even) degree.
pub fn ordinary_betti(model: &CharacteristicModel, face: &Face) -> BTreeMap<usize, i64> {
    model
        .polytope()
        .h_vector(face)
        .into_iter()
        .enumerate()
        .map(|(i, h)| (2 * i, h))
        .collect()
}

/// A Chen-Ruan Betti table; degrees are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CRBettiTable {
    /// Real dimension 2n of the orbifold.
    pub real_dim: usize,
    pub entries: BTreeMap<Rational, i64>,
    /// Total rank. This is χ_CR when the model is quasi-SL.
    pub euler: BigInt,
    pub quasi_sl: bool,
}

impl CRBettiTable {
    pub fn rank(&self, degree: &Rational) -> i64 {
        self.entries.get(degree).copied().unwrap_or(0)
    }

    pub fn rank_at(&self, degree: usize) -> i64 {
        self.rank(&Rational::from_integer(degree.into()))
    }

    pub fn h2(&self) -> i64 {
        self.rank_at(2)
    }

    /// Ranks in degrees 0, 2, …, 2n. Only meaningful for integral tables.
    pub fn even_ranks(&self) -> Vec<i64> {
        (0..=self.real_dim).step_by(2).map(|d| self.rank_at(d)).collect()
    }

    pub fn has_integral_degrees(&self) -> bool {
        self.entries.keys().all(Rational::is_integer)
    }

    /// Degrees d with h^d ≠ h^{2n−d}, with both ranks.
    pub fn duality_violations(&self) -> Vec<(Rational, i64, i64)> {
        let top = Rational::from_integer(self.real_dim.into());
        self.entries
            .iter()
            .filter_map(|(d, &r)| {
                let mirror = self.rank(&(&top - d));
                (mirror != r).then(|| (d.clone(), r, mirror))
            })
            .collect()
    }

    pub fn is_palindromic(&self) -> bool {
        self.duality_violations().is_empty()
    }
}

impl fmt::Display for CRBettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .entries
            .iter()
            .map(|(d, r)| format!("h^{d}={r}"))
            .collect();
        write!(f, "{}", cells.join(" "))
    }
}

/// Ordinary Betti numbers of sector spaces, memoized by face.
#[derive(Default)]
struct BettiCache(BTreeMap<Vec<usize>, BTreeMap<usize, i64>>);

impl BettiCache {
    fn shifted(&mut self, model: &CharacteristicModel, sector: &TwistedSector) -> Vec<(Rational, i64)> {
        let shift = sector.degree_shift();
        self.0
            .entry(sector.face.facets.clone())
            .or_insert_with(|| ordinary_betti(model, &sector.face))
            .iter()
            .map(|(&d, &r)| (Rational::from_integer(d.into()) + &shift, r))
            .collect()
    }
}

/// H*_CR = ⊕_F ⊕_{g ∈ Box_F°} H^{*−2ι(g)}(X(F)), including the untwisted sector.
pub fn cr_betti(model: &CharacteristicModel) -> CRBettiTable {
    let sectors = model.sectors();
    let quasi_sl = sectors.iter().all(|s| s.age().is_integer());
    let mut entries: BTreeMap<Rational, i64> = BTreeMap::new();
    let mut cache = BettiCache::default();
    for s in &sectors {
        for (d, r) in cache.shifted(model, s) {
            if r != 0 {
                *entries.entry(d).or_insert(0) += r;
            }
        }
    }
    let euler = entries.values().map(|&r| BigInt::from(r)).sum();
    CRBettiTable {
        real_dim: 2 * model.dim(),
        entries,
        euler,
        quasi_sl,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerReport {
    /// Σ_F (#vertices of F) · |Box_F°|.
    pub by_sectors: BigInt,
    /// Σ_v |det Λ_v|.
    pub by_vertices: BigInt,
    /// True when the model is quasi-SL, so the value is the CR Euler characteristic.
    pub is_cr_euler: bool,
}

impl EulerReport {
    pub fn value(&self) -> &BigInt {
        &self.by_vertices
    }
}

/// Computes Σ_v o(G_v) two ways and insists they agree.
pub fn euler_cr(model: &CharacteristicModel) -> Result<EulerReport, CohomologyError> {
    let p = model.polytope();
    let mut by_sectors = BigInt::zero();
    let mut quasi_sl = true;
    for face in p.enumerate_faces() {
        let inner = model.interior_box_elements(&face);
        quasi_sl &= inner.iter().all(|e| e.age.is_integer());
        by_sectors += BigInt::from(p.face_vertices(&face).len()) * BigInt::from(inner.len());
    }
    let by_vertices: BigInt = (0..p.num_vertices())
        .map(|v| model.local_group_order(&p.vertex_face(v)))
        .sum();
    if by_sectors != by_vertices {
        return Err(CohomologyError::EulerMismatch {
            by_sectors,
            by_vertices,
        });
    }
    Ok(EulerReport {
        by_sectors,
        by_vertices,
        is_cr_euler: quasi_sl,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorDualityViolation {
    pub sector: TwistedSector,
    pub degree: Rational,
    pub rank: i64,
    pub partner_rank: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub table: CRBettiTable,
    pub table_violations: Vec<(Rational, i64, i64)>,
    pub sector_violations: Vec<SectorDualityViolation>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.table_violations.is_empty() && self.sector_violations.is_empty()
    }
}

/// Checks h^d = h^{2n−d} for the whole table, and sector by sector that the
/// contribution of (F, g) in degree d matches that of (F, g⁻¹) in 2n − d.
pub fn check_poincare_duality(model: &CharacteristicModel) -> DualityReport {
    let table = cr_betti(model);
    let table_violations = table.duality_violations();
    let top = Rational::from_integer((2 * model.dim()).into());
    let mut sector_violations = Vec::new();
    let mut cache = BettiCache::default();
    for s in model.sectors() {
        let partner = if s.is_untwisted() {
            s.clone()
        } else {
            model.inverse_sector(&s).expect("twisted sector has an inverse")
        };
        let theirs: BTreeMap<Rational, i64> = cache.shifted(model, &partner).into_iter().collect();
        for (d, r) in cache.shifted(model, &s) {
            let partner_rank = theirs.get(&(&top - &d)).copied().unwrap_or(0);
            if partner_rank != r {
                sector_violations.push(SectorDualityViolation {
                    sector: s.clone(),
                    degree: d,
                    rank: r,
                    partner_rank,
                });
            }
        }
    }
    DualityReport {
        table,
        table_violations,
        sector_violations,
    }
}

/// Ranks in degrees 0, 2, …, 2n of an integral table, as plain integers.
pub fn even_rank_vector(table: &CRBettiTable) -> Option<Vec<i64>> {
    table.has_integral_degrees().then(|| table.even_ranks())
}

/// Convenience for reports: a degree as an integer when it is one.
pub fn integral_degree(d: &Rational) -> Option<usize> {
    d.is_integer().then(|| d.to_integer().to_usize()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::CombinatorialPolytope;

    fn simplex4(last: [i64; 4]) -> CharacteristicModel {
        CharacteristicModel::from_i64(
            CombinatorialPolytope::simplex(4),
            &[
                vec![1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                last.to_vec(),
            ],
        )
        .unwrap()
    }

    fn w2() -> CharacteristicModel {
        CharacteristicModel::from_i64(
            CombinatorialPolytope::simplex(2),
            &[vec![1, 0], vec![0, 1], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn ordinary_betti_examples() {
        let x = simplex4([1, 3, 3, 3]);
        let p = x.polytope();
        let tri = p.face(&[0, 4]).unwrap();
        assert_eq!(
            ordinary_betti(&x, &tri),
            BTreeMap::from([(0, 1), (2, 1), (4, 1)])
        );
        assert_eq!(
            ordinary_betti(&x, &p.whole()),
            BTreeMap::from([(0, 1), (2, 1), (4, 1), (6, 1), (8, 1)])
        );
        assert_eq!(ordinary_betti(&x, &p.vertex_face(0)), BTreeMap::from([(0, 1)]));
        // h^2 = m − n for the whole polytope
        assert_eq!(ordinary_betti(&x, &p.whole())[&2], (p.num_facets() - p.dim()) as i64);
    }

    #[test]
    fn cr_table_of_weighted_simplex() {
        let t = cr_betti(&simplex4([1, 3, 3, 3]));
        assert!(t.quasi_sl);
        assert_eq!(t.even_ranks(), vec![1, 3, 3, 3, 1]);
        assert_eq!(t.euler, 11.into());
        assert!(t.is_palindromic());
    }

    #[test]
    fn cr_table_w2() {
        let t = cr_betti(&w2());
        assert_eq!(t.even_ranks(), vec![1, 2, 1]);
        assert_eq!(t.entries.len(), 3);
    }

    #[test]
    fn manifold_table_is_ordinary() {
        let cp4 = simplex4([-1, -1, -1, -1]);
        let t = cr_betti(&cp4);
        assert_eq!(t.even_ranks(), vec![1, 1, 1, 1, 1]);
        assert_eq!(euler_cr(&cp4).unwrap().value(), &BigInt::from(5));
    }

    #[test]
    fn fan_orientation_has_fractional_degrees() {
        let t = cr_betti(&simplex4([-1, -3, -3, -3]));
        assert!(!t.quasi_sl);
        assert!(!t.has_integral_degrees());
        assert!(t.is_palindromic());
        assert_eq!(even_rank_vector(&t), None);
        let e = euler_cr(&simplex4([-1, -3, -3, -3])).unwrap();
        assert!(!e.is_cr_euler);
        assert_eq!(e.by_sectors, e.by_vertices);
    }

    #[test]
    fn euler_two_ways() {
        let e = euler_cr(&simplex4([1, 3, 3, 3])).unwrap();
        assert_eq!(e.by_sectors, 11.into());
        assert_eq!(e.by_vertices, 11.into());
        assert!(e.is_cr_euler);
    }

    #[test]
    fn duality_reports() {
        for m in [simplex4([1, 3, 3, 3]), w2(), simplex4([-1, -3, -3, -3]), simplex4([2, 3, 5, 7])] {
            let r = check_poincare_duality(&m);
            assert!(r.holds(), "{:?}", r.table_violations);
        }
    }
}
