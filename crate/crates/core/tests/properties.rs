use dyadic_lab::constants::{apq_alpha, WeightPair};
use dyadic_lab::operators::{dyadic_frac_maximal, dyadic_riesz, frac_maximal};
use dyadic_lab::orlicz::{luxemburg, orlicz_holder_check};
use dyadic_lab::runner::random_positive;
use dyadic_lab::sparse::{build_sparse, certify_carleson, default_ratio, domination_check, verify_sparse, CarlesonSequence};
use dyadic_lab::{shifted_grids, ExponentTuple, GridFamily, Mesh, SampledFunction, YoungFunction};
use proptest::prelude::*;

fn mesh(dim: usize) -> Mesh {
    Mesh::unit(dim, if dim == 1 { 5 } else { 3 }).unwrap()
}

fn grids(m: &Mesh) -> Vec<GridFamily> {
    shifted_grids(m.dim(), &m.window(), 0, m.refinement() as i32).unwrap()
}

fn step(m: &Mesh, seed: u64, level: i32, spread: f64) -> SampledFunction {
    random_positive(m, seed, level, spread).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sparse_families_are_thick_and_dominate(dim in 1usize..=2, seed: u64, level in 1i32..=3, spread in 0.1f64..3.0, gi in 0usize..4, ai in 0usize..4) {
        let m = mesh(dim);
        let gs = grids(&m);
        let g = &gs[gi % gs.len()];
        let alpha = [0.0, 0.25, 0.5, 0.75][ai];
        let f = step(&m, seed, level, spread);
        let s = build_sparse(&f, alpha, g, default_ratio(dim)).unwrap();
        for q in &s.cubes {
            prop_assert!(2 * q.e_units >= q.volume_units);
        }
        let v = verify_sparse(&s).unwrap();
        prop_assert!(v.disjoint && v.masks_inside_cubes);
        prop_assert_eq!(domination_check(&f, &s, g).unwrap().violations, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sparse_masses_are_carleson(dim in 1usize..=2, seed: u64, level in 1i32..=3, spread in 0.5f64..3.0) {
        let m = mesh(dim);
        let g = &grids(&m)[0];
        let s = build_sparse(&step(&m, seed, level, spread), 0.5, g, default_ratio(dim)).unwrap();
        let c = certify_carleson(&CarlesonSequence::from_sparse(&s).unwrap(), &SampledFunction::constant(m, 1.0).unwrap()).unwrap();
        prop_assert!(c <= 1.0 + 1e-9, "Carleson constant {}", c);
    }

    #[test]
    fn dyadic_maximal_below_dyadic_riesz(dim in 1usize..=2, seed: u64, level in 1i32..=3, ai in 0usize..3) {
        let m = mesh(dim);
        let alpha = [0.25, 0.5, 0.75][ai];
        let f = step(&m, seed, level, 2.0);
        for g in grids(&m) {
            let md = dyadic_frac_maximal(&f, alpha, &g).unwrap().values;
            let id = dyadic_riesz(&f, alpha, &g).unwrap().values;
            for (a, b) in md.values().iter().zip(id.values()) {
                prop_assert!(*a <= b * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn maximal_function_is_monotone(dim in 1usize..=2, s1: u64, s2: u64) {
        let m = mesh(dim);
        let gs = grids(&m);
        let f = step(&m, s1, 2, 1.0);
        let g = f.zip_with(&step(&m, s2, 3, 1.0), |a, b| a + b).unwrap();
        let mf = frac_maximal(&f, 0.5, &gs).unwrap().values;
        let mg = frac_maximal(&g, 0.5, &gs).unwrap().values;
        for (a, b) in mf.values().iter().zip(mg.values()) {
            prop_assert!(*a <= *b * (1.0 + 1e-12));
        }
    }

    #[test]
    fn apq_duality_symmetry(dim in 1usize..=2, s1: u64, s2: u64, ei in 0usize..3) {
        let e = [("1/2", "3/2", "6"), ("1/4", "2", "3"), ("1/3", "2", "5")][ei];
        let e = ExponentTuple::parse(dim, e.0, e.1, e.2).unwrap();
        let m = mesh(dim);
        let pair = WeightPair::new(step(&m, s1, 3, 2.0), step(&m, s2, 3, 2.0)).unwrap();
        let (sw, dual) = (pair.swapped(), e.dual().unwrap());
        for q in grids(&m)[0].cubes() {
            let (a, b) = (apq_alpha(&pair, &e, &q).unwrap(), apq_alpha(&sw, &dual, &q).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn cube_integral_splits_over_children(dim in 1usize..=2, seed: u64, k in 0i32..3, shift: bool) {
        let m = mesh(dim);
        let f = step(&m, seed, 3, 2.0);
        let g = GridFamily::new(&vec![shift; dim], k, k + 1, m.window()).unwrap();
        for q in g.level_cubes(k) {
            let whole = f.cube_integral(&q).unwrap();
            let parts: f64 = g.level_cubes(k + 1).iter().filter(|c| q.contains(c)).map(|c| f.cube_integral(c).unwrap()).sum();
            prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
        }
    }

    #[test]
    fn function_json_roundtrip(dim in 1usize..=2, seed: u64) {
        let f = step(&mesh(dim), seed, 3, 2.0);
        let back = SampledFunction::from_json(&f.to_json().unwrap()).unwrap();
        prop_assert_eq!(f.values(), back.values());
    }
}

fn young(i: usize) -> YoungFunction {
    match i % 5 {
        0 => YoungFunction::Power { p: 2.0 },
        1 => YoungFunction::LogBump { p: 2.0, delta: 0.5 },
        2 => YoungFunction::LogDamped { p: 3.0, eps: 1.0 },
        3 => YoungFunction::Borderline { p: 2.0, q: 4.0, eps: 0.5 },
        _ => YoungFunction::power_bump(1.5, 1.5),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn orlicz_holder_factor_two(dim in 1usize..=2, s1: u64, s2: u64, yi in 0usize..5, ci: usize) {
        let m = mesh(dim);
        let (f, g) = (step(&m, s1, 3, 2.5), step(&m, s2, 3, 2.5));
        let cubes = grids(&m)[ci % (2 * dim)].level_cubes(1 + (ci % 2) as i32);
        let q = cubes[ci % cubes.len()];
        prop_assume!(m.cube_cells(&q).unwrap().is_some_and(|r| r.contained));
        let (lhs, rhs) = orlicz_holder_check(&f, &g, &q, &young(yi)).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9), "{} > {}", lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn luxemburg_is_homogeneous(dim in 1usize..=2, seed: u64, c in 0.01f64..100.0, yi in 0usize..5) {
        let m = mesh(dim);
        let f = step(&m, seed, 3, 2.0);
        let q = grids(&m)[0].level_cubes(0)[0];
        let phi = young(yi);
        let a = luxemburg(&f.scale(c).unwrap(), &q, &phi).unwrap();
        let b = c * luxemburg(&f, &q, &phi).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b, "{} vs {}", a, b);
    }
}
