//! Bad-cavity single-mode laser: the flow reduces to the Lorenz system and
//! turns chaotic well above threshold. Prints the Lyapunov spectrum and label.

use dicke_lab::macroflow::{classify_phase_with, find_eta1, perturbed_start, ClassifyOptions};
use dicke_lab::model::ModelParams;

fn main() -> dicke_lab::Result<()> {
    let base = ModelParams::single_mode(1.0, 1.0, 1.0, 0.0, 1.0, 10.0, 20.0);
    let eta1 = find_eta1(&base, (0.0, 1.0))?.eta1;
    println!("threshold eta1 = {eta1:.6}");
    let opts = ClassifyOptions { t_transient: 100.0, t_sample: 400.0, tol: 1e-9 };
    for eta in [0.3, 0.5, 0.7, 0.9] {
        let params = base.with_eta(eta);
        let portrait = classify_phase_with(&params, &perturbed_start(&params, 1e-2), opts)?;
        let spectrum: Vec<String> = portrait.lyapunov.iter().map(|l| format!("{l:+.3}")).collect();
        println!("eta={eta:.2} (r = {:.1}): {:<10} [{}]", eta / eta1, portrait.label, spectrum.join(", "));
    }
    Ok(())
}
