//! Locates the laser threshold by bisection on the fixed-point spectrum and
//! compares it with the resonant closed form `kappa gamma1 / lambda^2`.

use dicke_lab::macroflow::{find_eta1, fixed_point_leading_eigenvalue};
use dicke_lab::model::ModelParams;

fn main() -> dicke_lab::Result<()> {
    for lambda in [2.0, 3.0, 4.0] {
        let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, lambda);
        let hopf = find_eta1(&params, (0.0, 1.0))?;
        let below = fixed_point_leading_eigenvalue(&params.with_eta(hopf.eta1 - 0.01));
        let above = fixed_point_leading_eigenvalue(&params.with_eta(hopf.eta1 + 0.01));
        println!(
            "lambda={lambda}: eta1={:.8} (closed form {:.8}), crossing frequency {:.4}, leading Re {:+.4} -> {:+.4}",
            hopf.eta1,
            1.0 / (lambda * lambda),
            hopf.crossing.im,
            below.re,
            above.re
        );
    }
    Ok(())
}
