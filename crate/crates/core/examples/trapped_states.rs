use stoptics::radial::{neumann_eigenvalues, trapped_state_scan};

fn main() -> stoptics::Result<()> {
    let mu = neumann_eigenvalues(0, 1.0, None, 3)?;
    println!("Neumann eigenvalues of the unit ball, l = 0: {mu:?}");
    for n in [16, 32] {
        let scan = trapped_state_scan(n, 15.0, 25.0, 401, 0, 0.0)?;
        println!(
            "n = {n}: peak at E = {:.3} ratio {:.3}, median {:.2e}, width {:.3}, {} resonant samples skipped",
            scan.peak_energy,
            scan.peak_ratio,
            scan.median_ratio,
            scan.fwhm,
            scan.skipped.len()
        );
    }
    Ok(())
}
