//! End-to-end acceptance suite. Each test prints one PASS/FAIL line so a
//! full run reads as a checklist; assertions are exact wherever the
//! arithmetic is rational.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Zero};

use pentagram::boussinesq::{SmoothPeriodic, 
    conservation_run, discretization_expansion, hamiltonian_consistency, stable_dt,
    BoussinesqState, TrigField,
};
use pentagram::invariants::{
    algebraic_independence_rank, closed_relations_residual, evaluate_from_ab,
    evaluate_from_corner, expected_rank, symbolic,
};
use pentagram::pentagram::{
    alpha_map, beta_map, pentagram_in_ab, pentagram_in_corner, pentagram_vertices, shift_ab,
};
use pentagram::poisson::{
    structure_corank, verify_casimirs, verify_commutation, verify_T_invariance, Chart,
};
use pentagram::polyalg::LaurentPoly;
use pentagram::polygon::{
    ab_from_corner, closed_pentagon_ab, corner_from_ab, generate_spiral,
    generate_universally_convex, projectively_equivalent, random_rational_polygon, ABCoords,
    CornerCoords, TwistedPolygon,
};
use pentagram::projgeo::ProjPoint;
use pentagram::sampling::SeededRng;
use pentagram::{Rat, Scalar};

/// Runs the body, prints one line, and re-raises any failure.
fn criterion(name: &str, body: impl FnOnce()) {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body));
    let verdict = if result.is_ok() { "PASS" } else { "FAIL" };
    println!("{verdict}: {name} ({:.2}s)", start.elapsed().as_secs_f64());
    if let Err(e) = result {
        resume_unwind(e);
    }
}

/// Closed convex polygon with exact rational vertices: distinct sorted
/// parameters on the parabola (t, t^2, 1) are in convex position.
fn convex_polygon(n: usize, rng: &mut SeededRng) -> TwistedPolygon<Rat> {
    loop {
        let mut ts: Vec<Rat> = Vec::new();
        while ts.len() < n {
            let t = rng.rat(9);
            if !ts.contains(&t) {
                ts.push(t);
            }
        }
        ts.sort();
        let verts: Vec<ProjPoint<Rat>> = ts
            .iter()
            .map(|t| {
                ProjPoint::new([t.clone(), t.clone() * t.clone(), Rat::one()]).unwrap()
            })
            .collect();
        if let Ok(p) = TwistedPolygon::closed(verts) {
            return p;
        }
    }
}

fn random_ab(rng: &mut SeededRng, n: usize) -> ABCoords<Rat> {
    let (a, b) = rng.generic_ab_coords(n, 6);
    ABCoords::new(a, b).unwrap()
}

#[test]
fn pentagon_periodicity() {
    criterion("pentagon maps to a projectively equivalent pentagon", || {
        let mut rng = SeededRng::new(101);
        for _ in 0..50 {
            let p = convex_polygon(5, &mut rng);
            let t = pentagram_vertices(&p).unwrap();
            assert!(projectively_equivalent(&p, &t, 0.0).unwrap());
        }
    });
}

#[test]
fn hexagon_period_two() {
    criterion("hexagon returns after two steps, not one", || {
        let mut rng = SeededRng::new(103);
        for _ in 0..50 {
            let p = convex_polygon(6, &mut rng);
            let t = pentagram_vertices(&p).unwrap();
            let tt = pentagram_vertices(&t).unwrap();
            assert!(projectively_equivalent(&p, &tt, 0.0).unwrap());
            assert!(!projectively_equivalent(&p, &t, 0.0).unwrap());
        }
    });
}

#[test]
fn exact_invariance_of_the_corner_family() {
    criterion("corner invariants unchanged by the map, exactly", || {
        let mut rng = SeededRng::new(107);
        for &n in &[4usize, 5, 7, 8] {
            let mut checked = 0;
            while checked < 20 {
                let (x, y) = rng.generic_corner_coords(n, 6);
                let c = CornerCoords::new(x, y).unwrap();
                let image = match pentagram_in_corner(&c) {
                    Ok(i) => i,
                    Err(_) => continue,
                };
                let before = evaluate_from_corner(&c).unwrap();
                let after = evaluate_from_corner(&image).unwrap();
                assert_eq!(before.o, after.o, "n={n}");
                assert_eq!(before.e, after.e, "n={n}");
                assert_eq!(before.o_n, after.o_n, "n={n}");
                assert_eq!(before.e_n, after.e_n, "n={n}");
                assert_eq!(before.o_half, after.o_half, "n={n}");
                assert_eq!(before.e_half, after.e_half, "n={n}");
                checked += 1;
            }
        }
    });
}

#[test]
fn poisson_suite_and_corank() {
    criterion("bracket invariance, commutation, Casimirs, corank", || {
        for &n in &[4usize, 5, 7, 8] {
            assert!(verify_T_invariance(n, 5, 109).exact, "invariance n={n}");
            assert!(verify_commutation(n).unwrap().all_zero, "commutation n={n}");
            assert!(verify_casimirs(n).unwrap().all_central, "casimirs n={n}");
            let expect = if n % 2 == 0 { 4 } else { 2 };
            assert_eq!(structure_corank(n, Chart::Corner), expect, "corank n={n}");
        }
    });
}

/// x_i -> a_{i-2}/(b_{i-2} b_{i-1}), y_i -> -b_{i-1}/(a_{i-2} a_{i-1}),
/// as monomial substitutions into the recurrence variables.
fn corner_to_ab_subst(n: usize) -> Vec<(Rat, Vec<(usize, i32)>)> {
    let idx = |k: i64| k.rem_euclid(n as i64) as usize;
    let mut subst = Vec::with_capacity(2 * n);
    for i in 0..n as i64 {
        subst.push((
            Rat::one(),
            vec![(idx(i - 2), 1), (n + idx(i - 2), -1), (n + idx(i - 1), -1)],
        ));
    }
    for i in 0..n as i64 {
        subst.push((
            -Rat::one(),
            vec![(n + idx(i - 1), 1), (idx(i - 2), -1), (idx(i - 1), -1)],
        ));
    }
    subst
}

fn mono(n: usize, powers: &[(usize, i32)]) -> LaurentPoly {
    LaurentPoly::monomial(2 * n, Rat::one(), powers)
}

#[test]
fn invariant_cross_validation() {
    criterion("two invariant constructions agree; charts are bridged", || {
        // Trace grading equals the direct marking enumeration.
        for n in 4..=10usize {
            let sym = symbolic(n);
            assert_eq!(sym.i_polys, sym.t_polys, "n={n}");
        }

        // Quadrilateral polynomials written out by hand.
        let n = 4;
        let sym = symbolic(n);
        let i0 = mono(n, &[(4, 1), (6, 1)]).add(&mono(n, &[(5, 1), (7, 1)])).unwrap();
        let mut i1 = LaurentPoly::zero(2 * n);
        for t in 0..4usize {
            i1 = i1.add(&mono(n, &[(t, 1)])).unwrap();
            i1 = i1
                .add(&mono(n, &[(4 + t, 1), ((t + 1) % 4, 1), ((t + 2) % 4, 1)]))
                .unwrap();
        }
        let i2 = mono(n, &[(0, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(sym.i_polys[0], i0);
        assert_eq!(sym.i_polys[1], i1);
        assert_eq!(sym.i_polys[2], i2);

        // Bridge between the corner family and the trace family, as
        // polynomial identities after substituting the chart change.
        for &n in &[4usize, 5, 7, 8] {
            let sym = symbolic(n);
            let k = sym.k;
            let subst = corner_to_ab_subst(n);
            let prod_a: Vec<(usize, i32)> = (0..n).map(|i| (i, 1)).collect();
            let prod_b: Vec<(usize, i32)> = (0..n).map(|i| (n + i, 1)).collect();
            let a = mono(n, &prod_a);
            let b = mono(n, &prod_b);
            let top = if n % 2 == 0 { k - 1 } else { k };
            for j in 1..=top {
                let e_sub = sym.e_polys[j - 1].subst_monomials(&subst);
                assert_eq!(e_sub.mul(&a).unwrap(), sym.i_polys[k - j], "E_{j} n={n}");
            }
            let en_sub = sym.e_n.subst_monomials(&subst);
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                en_sub.mul(&a).unwrap().mul(&a).unwrap(),
                b.scale(&Rat::from_int(sign)),
                "E_n n={n}"
            );
        }
    });
}

#[test]
fn closed_polygon_relations() {
    criterion("closure relations vanish on closed families", || {
        // Quadrilateral point a = 1, b = -1.
        let c = ABCoords::new(vec![Rat::one(); 4], vec![-Rat::one(); 4]).unwrap();
        let inv = evaluate_from_ab(&c).unwrap();
        assert_eq!(inv.i, vec![Rat::from_int(2), Rat::zero(), Rat::one()]);
        for r in closed_relations_residual(&c, 0.0).unwrap() {
            assert!(r.is_zero());
        }

        // Ten random members of the closed-pentagon family; the trace
        // values collapse to one parameter z = xy(1+x)(1+y)/(1-xy).
        let mut rng = SeededRng::new(113);
        let mut tested = 0;
        while tested < 10 {
            let x = rng.rat_nonzero(5);
            let y = rng.rat_nonzero(5);
            // x = -1 or y = -1 zeroes a coefficient; the chart needs all
            // of them nonzero.
            if (Rat::one() + &x).is_zero() || (Rat::one() + &y).is_zero() {
                continue;
            }
            let ab = match closed_pentagon_ab(x.clone(), y.clone()) {
                Ok(ab) => ab,
                Err(_) => continue,
            };
            let z = &x * &y * (Rat::one() + &x) * (Rat::one() + &y) / (Rat::one() - &x * &y);
            let inv = evaluate_from_ab(&ab).unwrap();
            let want = vec![
                Rat::from_int(2) - z.clone(),
                Rat::one() + Rat::from_int(2) * z.clone(),
                -z,
            ];
            assert_eq!(inv.i, want);
            for r in closed_relations_residual(&ab, 0.0).unwrap() {
                assert!(r.is_zero());
            }
            tested += 1;
        }
    });
}

#[test]
fn duality_algebra() {
    criterion("map factors through the two dualities, exactly", || {
        let mut rng = SeededRng::new(127);
        for &n in &[4usize, 5, 7] {
            for _ in 0..20 {
                let c = random_ab(&mut rng, n);
                // alpha^2 is the index shift; beta^2 is the identity.
                assert_eq!(alpha_map(&alpha_map(&c)), shift_ab(&c, 1), "n={n}");
                let (d, f) = beta_map(&c).unwrap();
                assert_eq!(beta_map(&d).unwrap().0, c, "n={n}");
                assert_eq!(alpha_map(&d), pentagram_in_ab(&c).unwrap(), "n={n}");
                // Scale factors: triple product and three-step recurrence.
                for i in 0..n {
                    let rhs =
                        -Rat::one() / (Rat::one() + &c.b[(i + n - 1) % n] * &c.a[i]);
                    assert_eq!(f.triple_product(i), rhs, "n={n}");
                    let lhs = f.ratio(i + 3, i);
                    let rhs = (Rat::one() + &c.a[i] * &c.b[(i + n - 1) % n])
                        / (Rat::one() + &c.a[(i + 1) % n] * &c.b[i]);
                    assert_eq!(lhs, rhs, "n={n}");
                }
            }
        }
    });
}

#[test]
fn chart_coherence() {
    criterion("chart changes invert and commute with the map", || {
        let mut rng = SeededRng::new(131);
        for &n in &[4usize, 5, 7, 8] {
            for _ in 0..5 {
                let ab = random_ab(&mut rng, n);
                let c = match corner_from_ab(&ab) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                assert_eq!(ab_from_corner(&c).unwrap(), ab, "round trip n={n}");
                // Map in the recurrence chart vs map in the corner chart.
                if let Ok(t_ab) = pentagram_in_ab(&ab) {
                    assert_eq!(
                        corner_from_ab(&t_ab).unwrap(),
                        pentagram_in_corner(&c).unwrap(),
                        "two-path n={n}"
                    );
                }
            }
            // Vertex map vs corner-chart map on a full polygon.
            let p = random_rational_polygon(n, &mut rng).unwrap();
            let q = pentagram_vertices(&p).unwrap();
            assert_eq!(
                q.corner_coords().unwrap(),
                pentagram_in_corner(&p.corner_coords().unwrap()).unwrap(),
                "vertices vs corner n={n}"
            );
        }
    });
}

#[test]
fn quasi_periodic_orbits_stay_bounded() {
    criterion("long float orbits: tiny drift, bounded coordinates", || {
        let polys: Vec<TwistedPolygon<f64>> = vec![
            generate_universally_convex(7, 0.5, 2.0, (1.0, 1.0)).unwrap(),
            generate_spiral(8, 0.3, 1.05).unwrap(),
        ];
        for p in &polys {
            let mut c = p.corner_coords().unwrap();
            let base = evaluate_from_corner(&c).unwrap();
            let mut max_drift: f64 = 0.0;
            let mut sup_log: f64 = 0.0;
            for _ in 0..100_000 {
                c = pentagram_in_corner(&c).expect("no singularity");
                for v in c.x.iter().chain(c.y.iter()) {
                    sup_log = sup_log.max(v.abs().ln().abs());
                }
                let inv = evaluate_from_corner(&c).unwrap();
                for (v, v0) in inv
                    .o
                    .iter()
                    .chain(inv.e.iter())
                    .chain([&inv.o_n, &inv.e_n])
                    .zip(base.o.iter().chain(base.e.iter()).chain([&base.o_n, &base.e_n]))
                {
                    max_drift = max_drift.max((v - v0).abs() / v0.abs().max(1.0));
                }
            }
            assert!(max_drift < 1e-8, "drift {max_drift}");
            assert!(sup_log < 50.0, "coordinates wandered: {sup_log}");
        }
    });
}

#[test]
fn boussinesq_conservation() {
    criterion("continuous-limit run conserves its functionals", || {
        let n = 256;
        let mut rng = SeededRng::new(17);
        let s0 = BoussinesqState::random_band_limited(n, 10, 0.5, &mut rng).unwrap();
        let r = conservation_run(&s0, stable_dt(n) / 2.0, 0.5, usize::MAX, None).unwrap();
        assert!(r.h1_abs < 1e-12, "{r:?}");
        assert!(r.h2_abs < 1e-12, "{r:?}");
        assert!(r.h3_rel < 1e-7, "{r:?}");
        assert!(r.h_rel < 1e-7, "{r:?}");
        assert!(hamiltonian_consistency(&s0).unwrap() < 1e-10);
    });
}

#[test]
fn discretization_bridge() {
    criterion("fitted chord expansion matches the field formulas", || {
        let u = TrigField {
            terms: vec![(0.7, 1, 0.3)],
        };
        let w = TrigField {
            terms: vec![(0.5, 1, -0.4)],
        };
        let eps: Vec<f64> = (0..16).map(|i| 0.006 + 0.002 * i as f64).collect();
        for &x in &[0.1, 0.25, 0.4, 0.55, 0.7] {
            let fit = discretization_expansion(&u, &w, x, &eps).unwrap();
            let (uv, upv, wv) = (u.value(x), u.derivative(1, x), w.value(x));
            assert!((fit.a[0] - 3.0).abs() < 1e-6, "a0 at {x}: {}", fit.a[0]);
            assert!((fit.b[0] + 3.0).abs() < 1e-6, "b0 at {x}: {}", fit.b[0]);
            assert!(fit.a[1].abs() < 1e-5, "a1 at {x}: {}", fit.a[1]);
            assert!(fit.b[1].abs() < 1e-5, "b1 at {x}: {}", fit.b[1]);
            assert!((fit.a[2] + uv).abs() < 1e-4, "a2 at {x}: {}", fit.a[2]);
            assert!((fit.b[2] - uv).abs() < 1e-4, "b2 at {x}: {}", fit.b[2]);
            let a3 = -1.75 * upv - 0.5 * wv;
            let b3 = 1.25 * upv - 0.5 * wv;
            assert!((fit.a[3] - a3).abs() < 1e-3, "a3 at {x}: {}", fit.a[3]);
            assert!((fit.b[3] - b3).abs() < 1e-3, "b3 at {x}: {}", fit.b[3]);
        }
    });
}

#[test]
fn independence_rank() {
    criterion("invariant family has full Jacobian rank", || {
        let mut rng = SeededRng::new(137);
        for &n in &[4usize, 5, 7, 8] {
            let mut ok = false;
            let mut rank = 0;
            for _ in 0..10 {
                let (x, y) = rng.generic_corner_coords(n, 6);
                let mut pt = x;
                pt.extend(y);
                rank = algebraic_independence_rank(n, &pt).unwrap();
                if rank == expected_rank(n) {
                    ok = true;
                    break;
                }
            }
            assert!(ok, "n={n}: rank {rank}, want {}", expected_rank(n));
        }
    });
}
