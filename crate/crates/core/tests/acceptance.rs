//! Acceptance checks, one line per criterion. Every comparison is exact.
//! Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{face, fixture, grid_box, ints, models, q, rng};
use num_bigint::BigInt;
use num_traits::Zero;
use qtorb::blowup::{blow_up, crepant_candidates, make_blowup_spec, preimages, resolve, verify_mckay, Verdict};
use qtorb::cohomology::{check_poincare_duality, cr_betti, euler_cr};
use qtorb::ring::{sector_product, SectorProduct};
use qtorb::{CharacteristicModel, Rational};
use rand::seq::SliceRandom;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn even_table(m: &CharacteristicModel) -> Result<Vec<i64>, String> {
    let t = cr_betti(m);
    ensure!(t.has_integral_degrees(), "table has fractional degrees: {t}");
    Ok(t.even_ranks())
}

fn sector_reproduction() -> Check {
    let x = fixture("simplex4.json");
    let f15 = face(&x, &["F1", "F5"]);
    let rows: Vec<_> = x
        .twisted_sectors()
        .into_iter()
        .map(|s| (s.face, s.element.lattice_point, s.element.age))
        .collect();
    let expected = vec![
        (f15.clone(), ints(&[1, 1, 1, 1]), q(1, 1)),
        (f15, ints(&[1, 2, 2, 2]), q(1, 1)),
    ];
    ensure!(rows == expected, "got {rows:?}");
    Ok(())
}

fn crepant_coefficients() -> Check {
    let x = fixture("simplex4.json");
    let spec = make_blowup_spec(&x, &face(&x, &["F1", "F5"]), &ints(&[1, 1, 1, 1])).map_err(|e| e.to_string())?;
    ensure!(spec.b == vec![q(2, 3), q(1, 3)], "b = {:?}", spec.b);
    ensure!(spec.crepant, "not crepant");
    Ok(())
}

fn euler_cross_check() -> Check {
    let x = fixture("simplex4.json");
    let e = euler_cr(&x).map_err(|e| e.to_string())?;
    ensure!(e.by_sectors == 11.into() && e.by_vertices == 11.into(), "X: {e:?}");
    // Independent of the library: 1 + 1 + 3 + 3 + 3 from the vertex determinants.
    let sum: BigInt = (0..5).map(|v| num_traits::Signed::abs(&x.vertex_determinant(v))).sum();
    ensure!(sum == 11.into(), "Σ|det| = {sum}");
    let spec = make_blowup_spec(&x, &face(&x, &["F1", "F5"]), &ints(&[1, 1, 1, 1])).unwrap();
    let y = blow_up(&x, &spec).map_err(|e| e.to_string())?;
    let e = euler_cr(&y).map_err(|e| e.to_string())?;
    ensure!(e.by_sectors == 11.into() && e.by_vertices == 11.into(), "Y: {e:?}");
    Ok(())
}

fn dim8_mckay() -> Check {
    let x = fixture("simplex4.json");
    let spec = make_blowup_spec(&x, &face(&x, &["F1", "F5"]), &ints(&[1, 1, 1, 1])).unwrap();
    let y = blow_up(&x, &spec).unwrap();
    let (tx, ty) = (even_table(&x)?, even_table(&y)?);
    ensure!(tx == vec![1, 3, 3, 3, 1], "X table {tx:?}");
    ensure!(tx == ty, "Y table {ty:?}");
    Ok(())
}

fn second_blowup() -> Check {
    let x = fixture("simplex4.json");
    let y = blow_up(&x, &make_blowup_spec(&x, &face(&x, &["F1", "F5"]), &ints(&[1, 1, 1, 1])).unwrap()).unwrap();
    let spec = make_blowup_spec(&y, &face(&y, &["F0", "F5"]), &ints(&[1, 2, 2, 2])).map_err(|e| e.to_string())?;
    let z = blow_up(&y, &spec).map_err(|e| e.to_string())?;
    let orders: Vec<BigInt> = (0..z.polytope().num_vertices())
        .map(|v| z.local_group_order(&z.polytope().vertex_face(v)))
        .collect();
    ensure!(orders.iter().all(|o| *o == 1.into()), "orders {orders:?}");
    ensure!(z.is_manifold(), "not a manifold");
    ensure!(z == fixture("simplex4_z.json"), "differs from the shipped Z");
    Ok(())
}

fn quasi_sl_discrimination() -> Check {
    ensure!(fixture("simplex4.json").is_quasi_sl(), "SIMPLEX4 should be quasi-SL");
    ensure!(!fixture("simplex4_fan.json").is_quasi_sl(), "fan variant should not be quasi-SL");
    Ok(())
}

fn low_dim_betti_conservation() -> Check {
    for (name, facets, lambda0, expected) in [
        ("w2.json", vec!["F1", "F3"], vec![1, 1], vec![1, 2, 1]),
        ("w3.json", vec!["F1", "F2", "F3"], vec![0, 0, 1], vec![1, 2, 2, 1]),
    ] {
        let x = fixture(name);
        let spec = make_blowup_spec(&x, &face(&x, &facets), &ints(&lambda0)).map_err(|e| e.to_string())?;
        ensure!(spec.crepant, "{name}: not crepant");
        let y = blow_up(&x, &spec).unwrap();
        let (tx, ty) = (even_table(&x)?, even_table(&y)?);
        ensure!(tx == expected && ty == expected, "{name}: {tx:?} -> {ty:?}");
        let r = verify_mckay(&x, &spec).map_err(|e| e.to_string())?;
        ensure!(r.betti_conserved == Verdict::Holds, "{name}: verdict {:?}", r.betti_conserved);
    }
    Ok(())
}

fn h2_monotonicity() -> Check {
    let x = fixture("simplex4.json");
    let f15 = face(&x, &["F1", "F5"]);
    let spec = make_blowup_spec(&x, &f15, &ints(&[1, 1, 1, 1])).unwrap();
    let r = verify_mckay(&x, &spec).map_err(|e| e.to_string())?;
    ensure!(r.h2_monotone == Verdict::Holds, "verdict {:?}", r.h2_monotone);
    ensure!(r.betti_after.h2() == r.betti_before.h2(), "h2 {} -> {}", r.betti_before.h2(), r.betti_after.h2());
    // Control: λ_0 = (2,1,1,1) = 5/3 λ_1 + 1/3 λ_5 is not crepant.
    let control = make_blowup_spec(&x, &f15, &ints(&[2, 1, 1, 1])).map_err(|e| e.to_string())?;
    ensure!(!control.crepant && control.b == vec![q(5, 3), q(1, 3)], "control b {:?}", control.b);
    let r = verify_mckay(&x, &control).map_err(|e| e.to_string())?;
    for (what, v) in [("h2", r.h2_monotone), ("euler", r.euler_conserved), ("quasi-SL", r.quasi_sl_preserved)] {
        ensure!(matches!(v, Verdict::OutOfScope { .. }), "control {what} verdict {v:?}");
    }
    Ok(())
}

fn box_oracle_equivalence() -> Check {
    let mut compared = 0;
    for (name, m) in common::all_fixtures() {
        for f in m.polytope().enumerate_faces() {
            if m.local_group_order(&f) > 200.into() {
                continue;
            }
            let expected = grid_box(&m, &f, u64::MAX).ok_or("grid overflow")?;
            let mut got: Vec<Vec<BigInt>> = m.box_elements(&f).into_iter().map(|e| e.lattice_point).collect();
            got.sort();
            ensure!(got == expected, "{name} face {}: {got:?} vs {expected:?}", m.polytope().face_label(&f));
            compared += 1;
        }
    }
    ensure!(compared > 100, "only {compared} faces compared");
    Ok(())
}

/// One pass over 500 seeded models per family, counting violations of each property.
fn property_suite() -> Check {
    const CASES: u64 = 500;
    let mut violations: Vec<String> = Vec::new();
    let mut note = |cond: bool, what: &str, seed: u64| {
        if !cond {
            violations.push(format!("{what} (seed {seed})"));
        }
    };
    let mut crepant_cases = 0;
    for (seed, x) in models(20_000, CASES, false).chain(models(30_000, CASES, true)) {
        let p = x.polytope();
        let mut r = rng(seed ^ 0x5eed);

        let ds = p.enumerate_faces().iter().all(|f| {
            let h = p.h_vector(f);
            h.iter().eq(h.iter().rev())
        });
        note(ds, "Dehn-Sommerville", seed);
        note(check_poincare_duality(&x).holds(), "CR Poincare duality", seed);
        note(x.vertex_partition_violations().is_empty(), "vertex-box partition", seed);

        // Determinant scaling on a random non-crepant-or-crepant blowup.
        let faces: Vec<_> = p.enumerate_faces().into_iter().filter(|f| f.codim() >= 2).collect();
        let f = faces.choose(&mut r).unwrap().clone();
        let mut lambda0 = vec![BigInt::zero(); x.dim()];
        for &i in &f.facets {
            for (a, b) in lambda0.iter_mut().zip(x.charvec(i)) {
                *a += b;
            }
        }
        let g = qtorb::linalg::gcd_all(&lambda0);
        let lambda0: Vec<BigInt> = lambda0.into_iter().map(|a| a / &g).collect();
        let spec = make_blowup_spec(&x, &f, &lambda0).unwrap();
        let y = blow_up(&x, &spec).unwrap();
        let scaling = preimages(&x, &spec, &y).iter().all(|pre| {
            let lhs = Rational::from_integer(num_traits::Signed::abs(&y.vertex_determinant(pre.new_vertex)));
            let rhs = Rational::from_integer(num_traits::Signed::abs(&x.vertex_determinant(pre.old_vertex))) * &pre.b;
            lhs == rhs
        });
        note(scaling, "det scaling", seed);

        // Quasi-SL closure under a random crepant blowup.
        if x.is_quasi_sl() {
            let options: Vec<_> = faces
                .iter()
                .flat_map(|f| {
                    crepant_candidates(&x, f)
                        .unwrap()
                        .candidates
                        .into_iter()
                        .map(move |c| (f.clone(), c.lattice_point))
                })
                .collect();
            if let Some((f, l0)) = options.choose(&mut r) {
                let spec = make_blowup_spec(&x, f, l0).unwrap();
                let rep = verify_mckay(&x, &spec).unwrap();
                note(rep.y_quasi_sl && !rep.any_failure(), "quasi-SL closure / McKay", seed);
                crepant_cases += 1;
            }
        }

        // Degree additivity of sector products.
        let sectors = x.sectors();
        for _ in 0..4 {
            let a = sectors.choose(&mut r).unwrap();
            let b = sectors.choose(&mut r).unwrap();
            if let SectorProduct::Product(s) = sector_product(&x, a, b).unwrap() {
                let theta = Rational::from_integer(s.theta_facets.len().into());
                note(a.age() + b.age() == &s.product_element.age + theta, "degree additivity", seed);
            }
        }

        // Resolve terminates with a manifold.
        let res = resolve(&x);
        note(matches!(&res, Ok(r) if r.model.is_manifold()), "resolve", seed);
    }
    ensure!(crepant_cases >= 100, "only {crepant_cases} crepant cases");
    ensure!(violations.is_empty(), "{} violations: {}", violations.len(), violations.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("SIMPLEX4 twisted sectors", sector_reproduction),
        ("crepant coefficients over F1,F5", crepant_coefficients),
        ("Euler number by both formulas, before and after blowup", euler_cross_check),
        ("Betti table conserved by the dimension-8 crepant blowup", dim8_mckay),
        ("second blowup gives a manifold", second_blowup),
        ("quasi-SL discrimination", quasi_sl_discrimination),
        ("Betti conservation for W2 and W3", low_dim_betti_conservation),
        ("h2 monotonicity and out-of-scope control", h2_monotonicity),
        ("SNF box equals grid oracle on every fixture face", box_oracle_equivalence),
        ("randomized property suite (500 seeded cases per family)", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("[PASS] {:>2}. {name} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name} ({ms} ms): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
