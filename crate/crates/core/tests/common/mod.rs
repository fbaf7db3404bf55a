#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use qtorb::linalg::{integral_combination, is_primitive};
use qtorb::{CharacteristicModel, CombinatorialPolytope, Face, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn fixture(name: &str) -> CharacteristicModel {
    qtorb::io::load_fixture(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn face(m: &CharacteristicModel, names: &[&str]) -> Face {
    let idx: Vec<usize> = names
        .iter()
        .map(|n| m.polytope().facet_index(n).unwrap_or_else(|| panic!("no facet {n}")))
        .collect();
    m.polytope().face(&idx).unwrap()
}

/// Every model file shipped in the fixtures directory (invalid ones excluded).
pub fn all_fixtures() -> Vec<(String, CharacteristicModel)> {
    let mut names: Vec<String> = std::fs::read_dir(qtorb::io::fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), fixture(&n))).collect()
}

/// Brute-force box: every coefficient vector on the grid (1/o)·Z ∩ [0,1)^k
/// whose combination of the face's characteristic vectors is integral.
/// None if the grid has more than `limit` points.
pub fn grid_box(m: &CharacteristicModel, f: &Face, limit: u64) -> Option<Vec<Vec<BigInt>>> {
    let o = m.local_group_order(f).to_u64()?;
    let k = f.codim() as u32;
    let total = o.checked_pow(k).filter(|&t| t <= limit)?;
    let cols: Vec<&[BigInt]> = f.facets.iter().map(|&i| m.charvec(i)).collect();
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let coeffs: Vec<Rational> = (0..k)
            .map(|_| {
                let digit = rest % o;
                rest /= o;
                Rational::new(digit.into(), o.into())
            })
            .collect();
        if let Some(p) = integral_combination(&coeffs, &cols, m.dim()) {
            out.push(p);
        }
    }
    out.sort();
    Some(out)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random simple polytope of dimension 2..=4: a simplex or a product of
/// simplices, followed by up to two truncations of random faces.
pub fn random_polytope(r: &mut ChaCha8Rng) -> CombinatorialPolytope {
    let mut p = match r.gen_range(0..5) {
        0 | 1 => CombinatorialPolytope::simplex(r.gen_range(2..=4)),
        2 => CombinatorialPolytope::product(
            &CombinatorialPolytope::simplex(1),
            &CombinatorialPolytope::simplex(r.gen_range(1..=3)),
            "A",
            "B",
        ),
        3 => CombinatorialPolytope::product(
            &CombinatorialPolytope::simplex(2),
            &CombinatorialPolytope::simplex(2),
            "A",
            "B",
        ),
        _ => CombinatorialPolytope::product(
            &CombinatorialPolytope::product(
                &CombinatorialPolytope::simplex(1),
                &CombinatorialPolytope::simplex(1),
                "A",
                "B",
            ),
            &CombinatorialPolytope::simplex(1),
            "",
            "C",
        ),
    };
    for t in 0..r.gen_range(0..=2) {
        let faces: Vec<Face> = p
            .enumerate_faces()
            .into_iter()
            .filter(|f| f.codim() >= 2)
            .collect();
        let f = faces.choose(r).expect("dimension ≥ 2 has codim-2 faces").clone();
        p = p.truncate(&f, &format!("T{t}")).unwrap();
    }
    assert!(p.is_valid());
    p
}

/// Largest vertex order the generator accepts; keeps the box sizes desk-scale.
pub const MAX_ORDER: u32 = 16;

/// Random characteristic vectors with entries in [-2, 2], mostly in [-1, 1].
/// With `gorenstein` every vector has first coordinate 1, which forces every
/// age to be an integer (the age is the first coordinate of the box element).
pub fn random_model(r: &mut ChaCha8Rng, gorenstein: bool) -> CharacteristicModel {
    let p = random_polytope(r);
    let n = p.dim();
    loop {
        let charvecs: Vec<Vec<BigInt>> = (0..p.num_facets())
            .map(|_| loop {
                let v: Vec<BigInt> = (0..n)
                    .map(|j| {
                        if gorenstein && j == 0 {
                            BigInt::from(1)
                        } else {
                            let big = r.gen_bool(0.15);
                            BigInt::from(if big { r.gen_range(-2..=2) } else { r.gen_range(-1..=1) })
                        }
                    })
                    .collect();
                if is_primitive(&v) {
                    break v;
                }
            })
            .collect();
        if let Ok(m) = CharacteristicModel::new(p.clone(), charvecs, None) {
            let small = (0..p.num_vertices()).all(|v| m.vertex_determinant(v).magnitude() <= &MAX_ORDER.into());
            if small {
                return m;
            }
        }
    }
}

/// Seeded stream of models: `count` cases starting at `base`.
pub fn models(base: u64, count: u64, gorenstein: bool) -> impl Iterator<Item = (u64, CharacteristicModel)> {
    (base..base + count).map(move |seed| (seed, random_model(&mut rng(seed), gorenstein)))
}
