//! Solves the full master equation for 1, 3 and 5 atoms and measures how
//! closely the intensive expectations track the classical flow.

use dicke_lab::microdyn::BlochVector;
use dicke_lab::model::{MacroState, ModelParams};
use dicke_lab::oracle::{convergence_report, ConvergenceOptions, DEFAULT_DIMENSION_CAP};
use num_complex::Complex64;

fn main() -> dicke_lab::Result<()> {
    let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.5, 1.0, 0.5, 0.2);
    let theta = BlochVector::new(0.4, 0.2, 0.3);
    let x0 = MacroState {
        alpha: vec![Complex64::new(0.5, 0.0)],
        s: vec![theta.minus()],
        p: vec![Complex64::new(theta.z(), 0.0)],
    };
    let opts = ConvergenceOptions {
        n_list: vec![0, 1, 2],
        cutoffs: None,
        t_grid: (1..=10).map(|k| k as f64 * 0.2).collect(),
        tol: 1e-10,
        dimension_cap: DEFAULT_DIMENSION_CAP,
    };
    let report = convergence_report(&params, &x0, &opts)?;
    for row in &report.rows {
        println!(
            "N={} ({} atoms, cutoff {:?}, dim {}): error s {:.3e}  p {:.3e}  alpha {:.3e}  max photons/(2N+1) {:.4}",
            row.n_half,
            row.atoms,
            row.cutoffs,
            row.dim,
            row.error_s,
            row.error_p,
            row.error_alpha,
            row.max_scaled_photons
        );
    }
    println!("photon bound {:.4} holds: {}", report.photon_bound, report.photon_bound_holds);
    Ok(())
}
