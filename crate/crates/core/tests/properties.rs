use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pressplit::experiments::{SampleFamily, SampleSpec};
use pressplit::grid::{inner_product, norms, BoundaryData, BoundaryKind, Grid2D, ScalarField, Side, VectorField};
use pressplit::ops::{div_h, grad_h, lap_h, stokes_neumann_data};
use pressplit::oracle::{DenseDirichlet, DenseNeumann};
use pressplit::pressure::stokes_pressure;
use pressplit::solvers::{DirichletPlan, NeumannPlan};
use pressplit::timestep::{SimState, Stepper};

fn noise(grid: Grid2D, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarField::from_values(grid, (0..grid.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn boundary_noise(grid: Grid2D, kind: BoundaryKind, seed: u64) -> BoundaryData {
    let trace = BoundaryData::trace(&noise(grid, seed ^ 0x5eed));
    match kind {
        // shared corners stay single-valued
        BoundaryKind::Dirichlet => trace,
        BoundaryKind::Neumann => {
            let [l, r, b, t] = Side::ALL.map(|side| trace.side(side).to_vec());
            BoundaryData::from_sides(grid, kind, l, r, b, t).unwrap()
        }
    }
}

/// Zero outside the nodes at least two layers in from the boundary.
fn deep_interior(grid: Grid2D, seed: u64) -> ScalarField {
    let mut f = noise(grid, seed);
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            if i < 2 || j < 2 || i + 2 > grid.nx() || j + 2 > grid.ny() {
                f.set(i, j, 0.0);
            }
        }
    }
    f
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).unwrap().max_abs()
}

fn sizes() -> impl Strategy<Value = Grid2D> {
    (8usize..=32, 8usize..=32).prop_map(|(nx, ny)| Grid2D::new(nx, ny).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_product_is_symmetric(grid in sizes(), s in any::<u64>()) {
        let (a, b) = (noise(grid, s), noise(grid, s.wrapping_add(1)));
        let (ab, ba) = (inner_product(&a, &b).unwrap(), inner_product(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-14 * (1.0 + ab.abs()));
    }

    #[test]
    fn inner_product_exact_on_bilinear_integrands(
        grid in sizes(),
        c in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let a = ScalarField::from_fn(grid, |x, _| c[0] + c[1] * x);
        let b = ScalarField::from_fn(grid, |_, y| c[2] + c[3] * y);
        let exact = (c[0] + 0.5 * c[1]) * (c[2] + 0.5 * c[3]);
        prop_assert!((inner_product(&a, &b).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_scales(grid in sizes(), s in any::<u64>(), alpha in -1e3f64..1e3) {
        let u = VectorField::new(noise(grid, s), noise(grid, s.wrapping_add(7))).unwrap();
        let (n1, n2) = (norms(&u).l2, norms(&u.scaled(alpha)).l2);
        prop_assert!((n2 - alpha.abs() * n1).abs() <= 1e-13 * (1.0 + n2));
    }

    #[test]
    fn summation_by_parts(grid in sizes(), s in any::<u64>()) {
        let p = deep_interior(grid, s);
        let v = VectorField::new(deep_interior(grid, s ^ 1), deep_interior(grid, s ^ 2)).unwrap();
        let lhs = grad_h(&p).dot(&v).unwrap();
        let rhs = -inner_product(&p, &div_h(&v)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gradient_and_divergence_exact_on_linears(grid in sizes(), c in prop::array::uniform6(-3.0f64..3.0)) {
        let p = ScalarField::from_fn(grid, |x, y| c[0] + c[1] * x + c[2] * y);
        let g = grad_h(&p);
        prop_assert!(g.u1.map(|v| v - c[1]).max_abs() < 1e-11);
        prop_assert!(g.u2.map(|v| v - c[2]).max_abs() < 1e-11);
        let u = VectorField::from_fn(grid, |x, y| [c[3] * x + c[4] * y, c[5] * x - c[0] * y]);
        prop_assert!(div_h(&u).map(|v| v - (c[3] - c[0])).max_abs() < 1e-11);
    }

    #[test]
    fn stokes_data_has_zero_boundary_mean(grid in sizes(), s in any::<u64>()) {
        let u = VectorField::new(noise(grid, s), noise(grid, s ^ 9)).unwrap();
        prop_assert!(stokes_neumann_data(&u).boundary_integral().abs() < 1e-9);
    }

    #[test]
    fn solvers_are_linear(grid in sizes(), s in any::<u64>(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let (x, y) = (noise(grid, s), noise(grid, s ^ 3));
        let combo = x.scaled(a).add_scaled(b, &y).unwrap();
        let zero_d = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        let d = DirichletPlan::new(grid);
        let (dx, dy) = (d.solve_helmholtz(0.3, &x, &zero_d).unwrap(), d.solve_helmholtz(0.3, &y, &zero_d).unwrap());
        let dc = d.solve_helmholtz(0.3, &combo, &zero_d).unwrap();
        prop_assert!(max_diff(&dc, &dx.scaled(a).add_scaled(b, &dy).unwrap()) < 1e-11);

        let zero_n = BoundaryData::zeros(grid, BoundaryKind::Neumann);
        let n = NeumannPlan::new(grid);
        let (nx, ny) = (n.solve(&x, &zero_n).unwrap().p, n.solve(&y, &zero_n).unwrap().p);
        let nc = n.solve(&combo, &zero_n).unwrap().p;
        prop_assert!(max_diff(&nc, &nx.scaled(a).add_scaled(b, &ny).unwrap()) < 1e-10);
    }

    #[test]
    fn dirichlet_helmholtz_contracts(grid in sizes(), s in any::<u64>(), alpha in 1e-6f64..1e2) {
        let rhs = noise(grid, s);
        let zero = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        let v = DirichletPlan::new(grid).solve_helmholtz(alpha, &rhs, &zero).unwrap();
        prop_assert!(v.l2_norm() <= rhs.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn neumann_solution_has_zero_mean(grid in sizes(), s in any::<u64>()) {
        let g = boundary_noise(grid, BoundaryKind::Neumann, s);
        let p = NeumannPlan::new(grid).solve(&noise(grid, s), &g).unwrap().p;
        prop_assert!(p.mean().abs() < 1e-12 * (1.0 + p.max_abs()));
    }

    #[test]
    fn stokes_pressure_is_discretely_harmonic(grid in sizes(), s in any::<u64>()) {
        let u = VectorField::new(noise(grid, s), noise(grid, s ^ 5)).unwrap();
        let ps = stokes_pressure(&NeumannPlan::new(grid), &u).unwrap().potential.p;
        let lap = lap_h(&ps);
        let scale = ps.max_abs() / (grid.hx() * grid.hy());
        prop_assert!(lap.interior_max_abs() <= 1e-8 * (1.0 + scale), "{}", lap.interior_max_abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn fast_dirichlet_matches_dense(grid in sizes(), s in any::<u64>(), alpha in 0.0f64..1.0) {
        let rhs = noise(grid, s);
        let g = boundary_noise(grid, BoundaryKind::Dirichlet, s);
        let fast = DirichletPlan::new(grid).solve_helmholtz(alpha, &rhs, &g).unwrap();
        let dense = DenseDirichlet::new(grid, alpha).unwrap().solve(&rhs, &g).unwrap();
        prop_assert!(max_diff(&fast, &dense) < 1e-8 * (1.0 + dense.max_abs()));
    }

    #[test]
    fn fast_neumann_matches_dense(grid in sizes(), s in any::<u64>()) {
        let rhs = noise(grid, s);
        let g = boundary_noise(grid, BoundaryKind::Neumann, s);
        let fast = NeumannPlan::new(grid).solve(&rhs, &g).unwrap();
        let dense = DenseNeumann::new(grid).unwrap().solve(&rhs, &g).unwrap();
        prop_assert!(max_diff(&fast.p, &dense.p) < 1e-8 * (1.0 + dense.p.max_abs()));
        prop_assert!((fast.correction - dense.correction).abs() < 1e-8 * (1.0 + dense.correction.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sampled_stokes_ratio_is_bounded(seed in any::<u64>(), index in 0usize..1000, family in 0usize..2) {
        let grid = Grid2D::square(32).unwrap();
        let spec = SampleSpec {
            family: [SampleFamily::RandomSineSeries, SampleFamily::StreamFunction][family],
            modes: 4,
            amplitude_exponent: 2.0,
            seed,
            divergence_free: true,
            count: 1,
        };
        let u = spec.sample(grid, index);
        let ratio = stokes_pressure(&NeumannPlan::new(grid), &u).unwrap().ratio_data.ratio();
        let h = grid.hx();
        prop_assert!(ratio <= 1.0 + 10.0 * h * h, "{}", ratio);
    }

    #[test]
    fn boundary_values_follow_data(seed in any::<u64>(), speed in -2.0f64..2.0) {
        let grid = Grid2D::square(16).unwrap();
        let stepper = Stepper::new(grid, 0.5, 1e-2).unwrap();
        let mut g = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        let top = g.side_mut(Side::Top);
        let last = top.len() - 1;
        for v in &mut top[1..last] {
            *v = speed;
        }
        let zero = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        let data = pressplit::timestep::InhomogeneousData {
            h: ScalarField::zeros(grid),
            dt_h: ScalarField::zeros(grid),
            dt_ng: BoundaryData::zeros(grid, BoundaryKind::Neumann),
            g_next: [g.clone(), zero.clone()],
        };
        let mut u = VectorField::new(noise(grid, seed), noise(grid, seed ^ 1)).unwrap();
        g.write_into(&mut u.u1).unwrap();
        zero.write_into(&mut u.u2).unwrap();
        let f = VectorField::zeros(grid);
        let mut state = SimState { u, t: 0.0, n: 0 };
        for _ in 0..3 {
            state = stepper.step_nonhomogeneous(&state, &f, &data).unwrap().state;
            prop_assert!(BoundaryData::trace(&state.u.u1).add_scaled(-1.0, &g).unwrap().max_abs() == 0.0);
            prop_assert!(BoundaryData::trace(&state.u.u2).max_abs() == 0.0);
        }
    }
}
