//! Classifies the long-time behaviour over a pump sweep and reports where
//! the normal phase gives way to coherent emission.

use dicke_lab::macroflow::{find_eta1, normal_to_coherent, perturbed_start, scan_eta, ClassifyOptions};
use dicke_lab::model::ModelParams;

fn main() -> dicke_lab::Result<()> {
    let params = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 4.0);
    let etas: Vec<f64> = (0..=20).map(|k| k as f64 * 0.01).collect();
    let opts = ClassifyOptions { t_transient: 800.0, t_sample: 200.0, tol: 1e-9 };
    let rows = scan_eta(&params, &etas, |p| perturbed_start(p, 1e-2), opts)?;
    for row in &rows {
        let nu = row.nu.map_or(String::from("-"), |v| format!("{v:.5}"));
        println!("eta={:.3}  {:<12} top Lyapunov {:+.4}  nu {nu}", row.eta, row.label, row.largest_lyapunov);
    }
    let hopf = find_eta1(&params, (0.0, 1.0))?;
    println!("scan transition {:?}, bisection eta1 = {:.6}", normal_to_coherent(&rows), hopf.eta1);
    Ok(())
}
