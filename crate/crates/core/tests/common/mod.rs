//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod ml_reference;

use multifrac::caputo::Excitation;
use multifrac::forward::{lift_boundary, BoundaryPair};
use multifrac::quadrature::gauss_legendre;
use multifrac::spectral::{assemble_operator, eigensystem, solution_multiplier, SolutionKind, SpatialGrid};

/// Single-term reference solution for `∂^α u = Δu` with `u = λ g` on the boundary.
///
/// Every eigenmode is kept, so the result is the exact semi-discrete solution
/// `u = λ g̃ − ∫_0^t λ'(t−w) S(w) g̃ dw` up to quadrature error. The convolution is
/// integrated on dyadic panels in `w` graded toward `w = 0`.
pub fn modal_duhamel(
    alpha: f64,
    exc: &Excitation,
    g: BoundaryPair,
    grid: &SpatialGrid,
    times: &[f64],
) -> Vec<Vec<f64>> {
    let n = grid.n_interior();
    let op = assemble_operator(grid, &vec![1.0; n + 2]).unwrap();
    let eig = eigensystem(&op, n).unwrap();
    let lift = lift_boundary(g, grid);
    let coeffs = eig.coefficients(&lift[1..=n]);
    let panel = gauss_legendre(10);
    times
        .iter()
        .map(|&t| {
            let lam = exc.value(t);
            let mut modal = vec![0.0; n];
            if t > 0.0 {
                let mut edges = vec![t];
                while *edges.last().unwrap() > t * 1e-12 {
                    let last = *edges.last().unwrap();
                    edges.push(0.5 * last);
                }
                edges.push(0.0);
                edges.reverse();
                for pair in edges.windows(2) {
                    let rule = panel.mapped(pair[0], pair[1]);
                    for (&w, &weight) in rule.nodes.iter().zip(&rule.weights) {
                        let slope = exc.derivative(t - w);
                        for (k, m) in modal.iter_mut().enumerate() {
                            let s = solution_multiplier(SolutionKind::S, alpha, eig.eigenvalues()[k], w).unwrap();
                            *m -= weight * slope * s * coeffs[k];
                        }
                    }
                }
            }
            let interior = eig.synthesize(&modal);
            let mut closed = Vec::with_capacity(n + 2);
            closed.push(lam * g.left);
            closed.extend(interior.iter().zip(&lift[1..=n]).map(|(v, l)| v + lam * l));
            closed.push(lam * g.right);
            closed
        })
        .collect()
}

/// Relative discrete L² distance between two space-time arrays.
pub fn relative_l2(a: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(reference) {
        for (u, v) in x.iter().zip(y) {
            num += (u - v) * (u - v);
            den += v * v;
        }
    }
    (num / den).sqrt()
}
