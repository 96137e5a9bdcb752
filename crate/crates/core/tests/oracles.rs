//! Closed-form values the numerics must reproduce.

use dyadic_lab::constants::{ainfty_m, ap_constant, apq_alpha_constant, WeightPair};
use dyadic_lab::examples::power_integral;
use dyadic_lab::operators::{dyadic_frac_maximal, geometric_maximal, riesz_at_point, riesz_potential_1d};
use dyadic_lab::orlicz::{conjugate_at, luxemburg};
use dyadic_lab::{shifted_grids, ExponentTuple, GridFamily, Mesh, Rational, RationalBox, SampledFunction, YoungFunction};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn riesz_of_unit_indicator() {
    // ∫_0^1 |x−y|^{α−1} dy = (x^α + (1−x)^α)/α
    let mesh = Mesh::unit(1, 4).unwrap();
    let f = SampledFunction::constant(mesh, 1.0).unwrap();
    for alpha in [0.25, 0.5, 0.75] {
        let exact = |x: f64| (x.powf(alpha) + (1.0 - x).powf(alpha)) / alpha;
        let cells = riesz_potential_1d(&f, alpha).unwrap().values;
        for i in 0..mesh.n_cells() {
            let x = mesh.cell_center(i)[0];
            assert!(close(cells.values()[i], exact(x), 1e-12), "alpha {alpha}, x {x}");
        }
        for x in [0.0, 0.1, 0.37, 0.5, 0.99] {
            let v = riesz_at_point(&f, alpha, x).unwrap();
            assert!(close(v, exact(x), 1e-12), "alpha {alpha}, x {x}: {v} vs {}", exact(x));
        }
    }
}

#[test]
fn constant_weights_have_unit_constants() {
    for dim in [1, 2] {
        let mesh = Mesh::unit(dim, 2).unwrap();
        let grids = shifted_grids(dim, &mesh.window(), 0, 2).unwrap();
        let one = SampledFunction::constant(mesh, 1.0).unwrap();
        let e = ExponentTuple::sobolev(dim, Rational::new(dim as i64, 2), Rational::new(3, 2)).unwrap();
        let pair = WeightPair::new(one.clone(), one.clone()).unwrap();
        assert!(close(apq_alpha_constant(&pair, &e, &grids).unwrap().value, 1.0, 1e-14));
        let three = one.scale(3.0).unwrap();
        assert!(close(ap_constant(&three, 2.0, &grids).unwrap().value, 1.0, 1e-14));
        assert!(close(ainfty_m(&three, &grids).unwrap().value, 1.0, 1e-14));
    }
}

#[test]
fn below_sobolev_scale_factor() {
    // u = σ = 1: A(Q) = |Q|^{α/n + 1/q − 1/p}, largest on the biggest cube
    let mesh = Mesh::unit(1, 3).unwrap();
    let grids = shifted_grids(1, &mesh.window(), 0, 3).unwrap();
    let one = SampledFunction::constant(mesh, 1.0).unwrap();
    let e = ExponentTuple::parse(1, "1/2", "2", "3").unwrap();
    let c = apq_alpha_constant(&WeightPair::new(one.clone(), one).unwrap(), &e, &grids).unwrap();
    assert!(close(c.value, 1.0, 1e-14));
    assert_eq!(c.argmax.unwrap().level(), 0);
}

#[test]
fn maximal_of_window_indicator() {
    // every cube inside [0,1) has |Q|^{α−1}∫χ = |Q|^α, so the level-0 cube wins
    let mesh = Mesh::unit(1, 4).unwrap();
    let g = GridFamily::new(&[false], 0, 4, mesh.window()).unwrap();
    let f = SampledFunction::constant(mesh, 1.0).unwrap();
    for alpha in [0.0, 0.3, 0.8] {
        let m = dyadic_frac_maximal(&f, alpha, &g).unwrap().values;
        assert!(m.values().iter().all(|v| close(*v, 1.0, 1e-14)));
    }
    let geo = geometric_maximal(&f.scale(2.5).unwrap(), &g).unwrap().values;
    assert!(geo.values().iter().all(|v| close(*v, 2.5, 1e-12)));
}

#[test]
fn luxemburg_of_constants() {
    let mesh = Mesh::unit(2, 2).unwrap();
    let q = GridFamily::new(&[false, false], 1, 1, mesh.window()).unwrap().cubes()[0];
    let f = SampledFunction::constant(mesh, 4.0).unwrap();
    assert!(close(luxemburg(&f, &q, &YoungFunction::Power { p: 3.0 }).unwrap(), 4.0, 1e-10));
    // Φ(t) = 2t^2: Φ(4/λ) = 1 at λ = 4√2
    let s = YoungFunction::ScaledPower { c: 2.0, r: 2.0 };
    assert!(close(luxemburg(&f, &q, &s).unwrap(), 4.0 * 2f64.sqrt(), 1e-10));
}

#[test]
fn power_conjugate() {
    // t^p has associate (p−1)(t/p)^{p′}
    for p in [1.5f64, 2.0, 4.0] {
        let pp = p / (p - 1.0);
        for t in [0.1, 1.0, 7.0] {
            let exact = (p - 1.0) * (t / p).powf(pp);
            assert!(close(conjugate_at(&YoungFunction::Power { p }, t).unwrap(), exact, 1e-9));
        }
    }
}

#[test]
fn power_integral_antiderivative() {
    assert!(close(power_integral(-Rational::from_integer(1), 20.0), 20f64.ln(), 1e-15));
    assert!(close(power_integral(Rational::new(1, 2), 4.0), (8.0 - 1.0) / 1.5, 1e-15));
}

#[test]
fn indicator_integrates_to_volume() {
    let w = RationalBox::cube(2, Rational::new(-1, 3), Rational::from_integer(2)).unwrap();
    let mesh = Mesh::new(&w, 2).unwrap();
    let b = RationalBox::new(vec![Rational::new(0, 1), Rational::new(1, 4)], vec![Rational::new(5, 4), Rational::new(1, 2)]).unwrap();
    let f = SampledFunction::indicator(mesh, &b).unwrap();
    assert!(close(f.total(), 1.25 * 0.25, 1e-14));
}
