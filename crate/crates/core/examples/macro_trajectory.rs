//! Integrates the classical flow from a small kick off the normal state and
//! prints the field intensity and inversion as the laser switches on.

use dicke_lab::macroflow::{integrate_flow, perturbed_start};
use dicke_lab::model::ModelParams;

fn main() -> dicke_lab::Result<()> {
    let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.2, 1.0, 1.0, 4.0).validate()?;
    let traj = integrate_flow(&params, &perturbed_start(&params, 1e-3), 60.0, 1e-9)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "|alpha|^2", "|s|", "p0");
    for t in (0..=12).map(|k| 5.0 * k as f64) {
        let x = traj.state_at(t)?;
        println!("{t:>6.1} {:>12.6} {:>12.6} {:>12.6}", x.alpha[0].norm_sqr(), x.s[0].norm(), x.p[0].re);
    }
    Ok(())
}
