use multifrac::caputo::{Excitation, TimeSeries};
use multifrac::forward::{solve_l1, BoundaryPair, SolutionField};
use multifrac::laplace_dtn::{
    dtn_from_timeseries, dtn_solve, elliptic_residual, laplace_transform, spectral_symbol, verify_laplace_identity,
    SGrid, SymbolSamples, Tail,
};
use multifrac::model::FractionalModel;
use multifrac::spectral::SpatialGrid;
use multifrac::Error;
use proptest::prelude::*;

fn reference(grid: &SpatialGrid) -> FractionalModel {
    FractionalModel::from_functions(grid, &[0.8, 0.3], &[&|_| 1.0, &|x| 0.5 * (1.0 + x)], &|x| -1.0 - x * x).unwrap()
}

fn simulate(exc: &Excitation) -> (FractionalModel, SolutionField) {
    let grid = SpatialGrid::new(1.0, 40).unwrap();
    let model = reference(&grid);
    let sol = solve_l1(&model, exc, BoundaryPair::new(1.0, 0.5), &grid, 4e-3, 12.0).unwrap();
    (model, sol)
}

fn model_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (1usize..=3)
        .prop_flat_map(|ell| {
            (prop::collection::vec(0.05f64..0.95, ell), prop::collection::vec(0.0f64..2.0, ell), -3.0f64..0.0)
        })
        .prop_filter("orders must be distinct", |(a, ..)| {
            let mut a = a.clone();
            a.sort_by(|x, y| y.total_cmp(x));
            a.windows(2).all(|w| w[0] - w[1] > 1e-3)
        })
        .prop_map(|(mut a, mut p, q)| {
            a.sort_by(|x, y| y.total_cmp(x));
            p[0] += 0.1;
            p.iter_mut().skip(1).for_each(|v| *v += 0.01);
            (a, p, q)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_decreases_in_s((alphas, p, q) in model_strategy(), slope in 0.0f64..1.0) {
        let grid = SpatialGrid::new(1.0, 8).unwrap();
        let fields: Vec<Box<dyn Fn(f64) -> f64>> = p
            .iter()
            .map(|&c| Box::new(move |x: f64| c * (1.0 + slope * x)) as Box<dyn Fn(f64) -> f64>)
            .collect();
        let refs: Vec<&dyn Fn(f64) -> f64> = fields.iter().map(|f| f.as_ref()).collect();
        let model = FractionalModel::from_functions(&grid, &alphas, &refs, &|x| q * (1.0 + x)).unwrap();
        let samples = SymbolSamples::from_model(&model, &SGrid::default_grid(), model.nodes()).unwrap();
        prop_assert!(samples.is_strictly_decreasing());
    }

    #[test]
    fn dtn_map_is_symmetric(
        (alphas, p, q) in model_strategy(),
        s in 1.0f64..100.0,
        g in (-2.0f64..2.0, -2.0f64..2.0),
        h in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let grid = SpatialGrid::new(1.0, 30).unwrap();
        let model = FractionalModel::constant(&grid, &alphas, &p, q).unwrap();
        let symbol = spectral_symbol(&model, s, &grid.closed_nodes()).unwrap();
        let (g, h) = (BoundaryPair::new(g.0, g.1), BoundaryPair::new(h.0, h.1));
        let a = dtn_solve(&symbol, &grid, g, s).unwrap();
        let b = dtn_solve(&symbol, &grid, h, s).unwrap();
        prop_assert_eq!(a.dirichlet_trace, g);
        let lhs = a.energy_trace.left * h.left + a.energy_trace.right * h.right;
        let rhs = g.left * b.energy_trace.left + g.right * b.energy_trace.right;
        let scale = 1.0 + a.energy_trace.max_abs().max(b.energy_trace.max_abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }
}

#[test]
fn laplace_identity_holds_for_desk_orders() {
    let grid = SGrid::log_spaced(1.0, 50.0, 20, 1.0).unwrap();
    for alpha in [0.3, 0.5, 0.8] {
        let r = verify_laplace_identity(&Excitation::default(), alpha, &grid).unwrap();
        assert!(r <= 1e-3, "alpha {alpha}: residual {r:e}");
    }
}

#[test]
fn first_derivative_transform_matches_s_times_transform() {
    let exc = Excitation::default();
    let dt = 1e-3;
    let t = TimeSeries::uniform_grid(dt, 40_000);
    let lam = TimeSeries::new(t.clone(), t.iter().map(|&x| exc.value(x)).collect()).unwrap();
    let slope = TimeSeries::new(t.clone(), t.iter().map(|&x| exc.derivative(x)).collect()).unwrap();
    for s in [1.0, 3.0, 10.0, 50.0] {
        let left = laplace_transform(&slope, s, Tail::Truncate).unwrap();
        let right = s * laplace_transform(&lam, s, Tail::Truncate).unwrap();
        assert!((left - right).abs() <= 1e-3 * right.abs(), "s = {s}: {left} vs {right}");
        let exact = 2.0 / (s + 1.0f64).powi(3);
        assert!((right / s - exact).abs() <= 1e-8, "s = {s}");
    }
}

#[test]
fn time_data_reproduces_elliptic_reduction() {
    let exc = Excitation::default();
    let (model, sol) = simulate(&exc);
    for s in [2.0, 5.0, 10.0] {
        let residual = elliptic_residual(&sol, &model, s).unwrap();
        assert!(residual <= 1e-2, "s = {s}: elliptic residual {residual:e}");
        let from_time = dtn_from_timeseries(&sol, &exc, s, 1.0).unwrap();
        assert!((from_time.g.left - 1.0).abs() < 1e-8 && (from_time.g.right - 0.5).abs() < 1e-8);
        let symbol = spectral_symbol(&model, s, &sol.grid().closed_nodes()).unwrap();
        let elliptic = dtn_solve(&symbol, sol.grid(), from_time.g, s).unwrap();
        let (a, b) = (from_time.neumann_trace, elliptic.neumann_trace);
        let err = (a.left - b.left).hypot(a.right - b.right) / b.left.hypot(b.right);
        assert!(err <= 2e-2, "s = {s}: DtN mismatch {err:e}");
    }
}

#[test]
fn normalized_dtn_ignores_excitation_amplitude() {
    let exc = Excitation::default();
    let (_, sol) = simulate(&exc);
    let doubled = exc.scaled(2.0).unwrap();
    let grid = *sol.grid();
    let model = reference(&grid);
    let sol2 = solve_l1(&model, &doubled, BoundaryPair::new(1.0, 0.5), &grid, 4e-3, 12.0).unwrap();
    for s in [2.0, 10.0] {
        let a = dtn_from_timeseries(&sol, &exc, s, 1.0).unwrap().neumann_trace;
        let b = dtn_from_timeseries(&sol2, &doubled, s, 1.0).unwrap().neumann_trace;
        assert!((a.left - b.left).abs() <= 1e-12 * a.left.abs());
        assert!((a.right - b.right).abs() <= 1e-12 * a.right.abs().max(1.0));
    }
}

#[test]
fn zero_excitation_fails_sigma_membership() {
    let grid = SpatialGrid::new(1.0, 10).unwrap();
    let model = reference(&grid);
    let exc = Excitation::PolyExp { a: 0.0, c: 1.0 };
    let sol = solve_l1(&model, &exc, BoundaryPair::new(1.0, 0.5), &grid, 0.05, 2.0).unwrap();
    assert!(matches!(dtn_from_timeseries(&sol, &exc, 2.0, 1.0), Err(Error::SigmaMembership { .. })));
    assert!(matches!(SGrid::default_grid().admissible_for(&exc), Err(Error::SigmaMembership { .. })));
}

#[test]
fn symbol_reference_value() {
    let grid = SpatialGrid::new(1.0, 4).unwrap();
    let model = FractionalModel::constant(&grid, &[0.8, 0.3], &[1.0, 0.5], -1.0).unwrap();
    let p = spectral_symbol(&model, 10.0, &[0.0, 0.5, 1.0]).unwrap();
    let expected = -1.0 - 10f64.powf(0.8) - 0.5 * 10f64.powf(0.3);
    assert!(p.iter().all(|v| (v - expected).abs() < 1e-12));
    assert!((expected + 8.3072).abs() < 1e-3);
}
