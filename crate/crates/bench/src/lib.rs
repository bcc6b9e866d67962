//! Fixtures shared by the benchmarks.

use ogl_core::data_io::{synth_overlap_dataset, SynthSpec};
use ogl_core::{lambda_max, GroupStructure, LeastSquaresLoss, PenaltyParams};

/// Chain-structured least-squares problem at `λ1 = λ2 = ρ·λ1_max`.
pub fn chain_problem(
    n: usize,
    g: usize,
    group_size: usize,
    overlap: usize,
    rho: f64,
) -> (LeastSquaresLoss, GroupStructure, PenaltyParams) {
    let p = (g - 1) * (group_size - overlap) + group_size;
    let spec = SynthSpec {
        p,
        n,
        g,
        group_size,
        overlap,
        active_groups: (g / 10).max(1),
        noise_sigma: 0.5,
        seed: 42,
    };
    let (data, gs, _) = synth_overlap_dataset(&spec).expect("valid spec");
    let loss = LeastSquaresLoss::new(data.a, data.b).expect("consistent data");
    let lmax = lambda_max(loss.matrix(), loss.response()).expect("consistent data");
    let params = PenaltyParams::new(rho * lmax, rho * lmax).expect("valid parameters");
    (loss, gs, params)
}

/// A prox input: one proximal-gradient step from zero on [`chain_problem`].
pub fn prox_input(g: usize, rho: f64) -> (Vec<f64>, GroupStructure, PenaltyParams) {
    let (loss, gs, params) = chain_problem(100, g, 10, 2, rho);
    let grad = ogl_core::SmoothLoss::gradient(&loss, &vec![0.0; gs.p()]);
    let v = grad.iter().map(|x| -x).collect();
    (v, gs, params)
}
