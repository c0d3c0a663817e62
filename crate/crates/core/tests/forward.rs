mod common;

use multifrac::caputo::Excitation;
use multifrac::forward::{
    solve_l1, solve_picard, BoundaryPair, ContractionProfile, LiftedProblem, PicardOptions, SolutionField,
};
use multifrac::model::FractionalModel;
use multifrac::spectral::SpatialGrid;
use proptest::prelude::*;

use common::{modal_duhamel, relative_l2};

fn uniform_times(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

fn flat(sol: &SolutionField) -> Vec<f64> {
    sol.values().iter().flatten().copied().collect()
}

/// Admissible models with affine coefficient fields on [0, 1].
/// Orders, affine p_j coefficients (value at 0, slope) and affine potential.
type ModelParts = (Vec<f64>, Vec<(f64, f64)>, (f64, f64));

fn admissible_model() -> impl Strategy<Value = ModelParts> {
    (1usize..=3)
        .prop_flat_map(|ell| {
            (
                prop::collection::vec(0.05f64..0.95, ell),
                (0.5f64..2.0, -0.4f64..1.0),
                prop::collection::vec((0.05f64..1.0, 0.0f64..1.0), ell - 1),
                (0.0f64..2.0, 0.0f64..2.0),
            )
        })
        .prop_filter("orders must be separated", |(alphas, ..)| {
            let mut a = alphas.clone();
            a.sort_by(|x, y| y.total_cmp(x));
            a.windows(2).all(|w| w[0] - w[1] > 0.03)
        })
        .prop_map(|(mut alphas, p1, rest, q)| {
            alphas.sort_by(|x, y| y.total_cmp(x));
            let mut p = vec![p1];
            p.extend(rest);
            (alphas, p, q)
        })
}

fn build(grid: &SpatialGrid, alphas: &[f64], p: &[(f64, f64)], q: (f64, f64)) -> FractionalModel {
    let fields: Vec<Box<dyn Fn(f64) -> f64>> =
        p.iter().map(|&(a, b)| Box::new(move |x: f64| a + b * x) as Box<dyn Fn(f64) -> f64>).collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = fields.iter().map(|f| f.as_ref()).collect();
    FractionalModel::from_functions(grid, alphas, &refs, &|x| -(q.0 + q.1 * x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn maximum_principle_and_one_sided_bound(
        (alphas, p, q) in admissible_model(),
        gl in -2.0f64..2.0,
        gr in -2.0f64..2.0,
        amp in -2.0f64..2.0,
        rate in 0.5f64..2.0,
    ) {
        let grid = SpatialGrid::new(1.0, 15).unwrap();
        let model = build(&grid, &alphas, &p, q);
        let exc = Excitation::PolyExp { a: amp, c: rate };
        let g = BoundaryPair::new(gl, gr);
        let t_end = 3.0;
        let sol = solve_l1(&model, &exc, g, &grid, 0.02, t_end).unwrap();
        let lam_max = sol.t().iter().fold(exc.c_norm(0, t_end), |m, &t| m.max(exc.value(t).abs()));
        prop_assert!(sol.max_abs() <= g.max_abs() * lam_max + 1e-8);
        let top = sol
            .t()
            .iter()
            .fold(0.0f64, |m, &t| m.max(gl * exc.value(t)).max(gr * exc.value(t)));
        prop_assert!(sol.max_value() <= top + 1e-8, "{} > {}", sol.max_value(), top);
    }

    #[test]
    fn solution_is_linear_in_g(
        (alphas, p, q) in admissible_model(),
        g1 in (-2.0f64..2.0, -2.0f64..2.0),
        g2 in (-2.0f64..2.0, -2.0f64..2.0),
        c in -3.0f64..3.0,
    ) {
        let grid = SpatialGrid::new(1.0, 12).unwrap();
        let model = build(&grid, &alphas, &p, q);
        let exc = Excitation::default();
        let run = |g: BoundaryPair| flat(&solve_l1(&model, &exc, g, &grid, 0.05, 2.0).unwrap());
        let a = run(BoundaryPair::new(g1.0, g1.1));
        let b = run(BoundaryPair::new(g2.0, g2.1));
        let scaled = run(BoundaryPair::new(c * g1.0, c * g1.1));
        let sum = run(BoundaryPair::new(g1.0 + g2.0, g1.1 + g2.1));
        let scale = a.iter().chain(&b).fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..a.len() {
            prop_assert!((scaled[i] - c * a[i]).abs() <= 1e-12 * scale * c.abs().max(1.0));
            prop_assert!((sum[i] - a[i] - b[i]).abs() <= 1e-12 * scale);
        }
    }
}

#[test]
fn solution_field_invariants() {
    let grid = SpatialGrid::new(1.0, 20).unwrap();
    let model = FractionalModel::constant(&grid, &[0.8, 0.3], &[1.0, 0.5], -1.0).unwrap();
    let exc = Excitation::default();
    let g = BoundaryPair::new(2.0, -1.0);
    let l1 = solve_l1(&model, &exc, g, &grid, 0.01, 1.0).unwrap();
    let picard = solve_picard(&model, &exc, g, &grid, &uniform_times(1.0, 10), &PicardOptions::default()).unwrap();
    for sol in [&l1, &picard] {
        assert_eq!(sol.t()[0], 0.0);
        assert!(sol.values()[0].iter().all(|v| *v == 0.0));
        for (t, u) in sol.t().iter().zip(sol.values()) {
            let lam = exc.value(*t);
            assert!((u[0] - lam * g.left).abs() <= 1e-14);
            assert!((u[u.len() - 1] - lam * g.right).abs() <= 1e-14);
        }
    }
}

#[test]
fn zero_excitation_gives_identical_zero_fields() {
    let grid = SpatialGrid::new(1.0, 16).unwrap();
    let model = FractionalModel::constant(&grid, &[0.7, 0.4], &[1.0, 1.0], -0.5).unwrap();
    let exc = Excitation::PolyExp { a: 0.0, c: 1.0 };
    let g = BoundaryPair::new(1.0, 1.0);
    let l1 = solve_l1(&model, &exc, g, &grid, 0.1, 1.0).unwrap();
    let picard = solve_picard(&model, &exc, g, &grid, l1.t(), &PicardOptions::default()).unwrap();
    assert_eq!(l1.values(), picard.values());
    assert!(flat(&l1).iter().all(|v| *v == 0.0));
    assert!(picard.increments().iter().all(|v| *v == 0.0));
}

#[test]
fn single_term_picard_matches_modal_duhamel() {
    let grid = SpatialGrid::new(1.0, 40).unwrap();
    let alpha = 0.6;
    let model = FractionalModel::constant(&grid, &[alpha], &[1.0], 0.0).unwrap();
    let exc = Excitation::default();
    let g = BoundaryPair::new(1.0, 0.5);
    let times = uniform_times(1.0, 20);
    let options = PicardOptions { n_modes: Some(grid.n_interior()), ..PicardOptions::default() };
    let picard = solve_picard(&model, &exc, g, &grid, &times, &options).unwrap();
    let oracle = modal_duhamel(alpha, &exc, g, &grid, &times);
    let err = relative_l2(picard.values(), &oracle);
    assert!(err <= 1e-4, "relative L2 error {err:e}");
}

#[test]
fn single_term_l1_matches_modal_duhamel() {
    let grid = SpatialGrid::new(1.0, 50).unwrap();
    let alpha = 0.5;
    let model = FractionalModel::constant(&grid, &[alpha], &[1.0], 0.0).unwrap();
    let exc = Excitation::default();
    let g = BoundaryPair::new(0.0, 1.0);
    let l1 = solve_l1(&model, &exc, g, &grid, 2e-3, 1.0).unwrap().subsampled(25);
    let oracle = modal_duhamel(alpha, &exc, g, &grid, l1.t());
    let err = relative_l2(l1.values(), &oracle);
    assert!(err <= 1e-2, "relative L2 error {err:e}");
}

#[test]
fn picard_increments_follow_contraction_profile() {
    let grid = SpatialGrid::new(1.0, 40).unwrap();
    let alphas = [0.8, 0.3];
    let model = FractionalModel::constant(&grid, &alphas, &[1.0, 0.5], -1.0).unwrap();
    let sol = solve_picard(
        &model,
        &Excitation::default(),
        BoundaryPair::new(1.0, 0.5),
        &grid,
        &uniform_times(1.0, 10),
        &PicardOptions::default(),
    )
    .unwrap();
    let inc = sol.increments();
    assert!(inc.len() <= 30 && *inc.last().unwrap() < 1e-8, "{inc:?}");
    assert!(inc.windows(2).all(|w| w[1] < w[0]), "{inc:?}");
    assert!((ContractionProfile::exponent(&alphas) - 0.4).abs() < 1e-15);
    let profile = ContractionProfile::fit(inc, &alphas, 1.0, inc.len()).unwrap();
    assert!(profile.constant > 0.0 && profile.constant.is_finite());
    assert!(profile.dominates(inc, 1e-12).unwrap());
}

#[test]
fn picard_reports_non_convergence_with_history() {
    let grid = SpatialGrid::new(1.0, 20).unwrap();
    let model = FractionalModel::constant(&grid, &[0.8, 0.3], &[1.0, 0.5], -1.0).unwrap();
    let options = PicardOptions { max_iter: 2, ..PicardOptions::default() };
    let err = solve_picard(
        &model,
        &Excitation::default(),
        BoundaryPair::new(1.0, 0.0),
        &grid,
        &uniform_times(1.0, 5),
        &options,
    )
    .unwrap_err();
    match err {
        multifrac::Error::Convergence { history, max_iter, .. } => {
            assert_eq!(max_iter, 2);
            assert_eq!(history.len(), 2);
        }
        other => panic!("expected a convergence error, got {other}"),
    }
}

#[test]
fn two_term_solvers_agree() {
    let grid = SpatialGrid::new(1.0, 40).unwrap();
    let model =
        FractionalModel::from_functions(&grid, &[0.8, 0.3], &[&|_| 1.0, &|x| 0.5 * (1.0 + x)], &|x| -1.0 - x * x)
            .unwrap();
    let exc = Excitation::default();
    let g = BoundaryPair::new(1.0, 0.5);
    let l1 = solve_l1(&model, &exc, g, &grid, 2e-3, 1.0).unwrap().subsampled(50);
    let picard = solve_picard(&model, &exc, g, &grid, l1.t(), &PicardOptions::default()).unwrap();
    let err = picard.relative_l2_distance(&l1).unwrap();
    assert!(err <= 2e-2, "discrepancy {err:e}");
}

#[test]
fn growth_stays_bounded_over_five_horizons() {
    let grid = SpatialGrid::new(1.0, 20).unwrap();
    let model = FractionalModel::constant(&grid, &[0.8, 0.3], &[1.0, 0.5], -1.0).unwrap();
    let exc = Excitation::default();
    let sol = solve_l1(&model, &exc, BoundaryPair::new(1.0, 1.0), &grid, 0.01, 5.0).unwrap();
    let sup: Vec<f64> = sol.values().iter().map(|u| u.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    assert!(sup.iter().all(|v| v.is_finite() && *v <= exc.c_norm(0, 5.0) + 1e-8));
    assert!(sup.last().unwrap() < &sup[200]);
}

/// sup_t ‖F‖ + sup_t ‖∂_t F‖ over (0, T].
fn source_norm(lifted: &LiftedProblem, exc: &Excitation, grid: &SpatialGrid, t_end: f64) -> f64 {
    let mut sup_f: f64 = 0.0;
    let mut sup_df: f64 = 0.0;
    for i in 1..=400 {
        let t = t_end * i as f64 / 400.0;
        sup_f = sup_f.max(grid.norm(&lifted.source_at(exc, t).unwrap()));
        sup_df = sup_df.max(grid.norm(&lifted.source_rate_at(exc, t).unwrap()));
    }
    sup_f + sup_df
}

#[test]
fn source_obeys_linear_in_time_bound() {
    let grid = SpatialGrid::new(1.0, 50).unwrap();
    let model = FractionalModel::from_functions(&grid, &[0.8, 0.3], &[&|x| 1.0 + x, &|_| 0.5], &|x| -1.0 - x).unwrap();
    let exc = Excitation::default();
    let lifted = LiftedProblem::new(&model, BoundaryPair::new(1.0, 0.5), &grid).unwrap();
    let ratio = |t_end: f64| source_norm(&lifted, &exc, &grid, t_end) / (t_end * exc.c_norm(2, t_end));
    let fitted = ratio(1.0).max(ratio(2.0));
    assert!(fitted.is_finite() && fitted > 0.0);
    assert!(ratio(4.0) <= fitted, "C fitted on T ∈ {{1, 2}} = {fitted}, T = 4 needs {}", ratio(4.0));
}
