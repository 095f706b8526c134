//! Approximate quantum cloak: DN map of `-Laplace + V` against free space for
//! two different potentials hidden in the unit ball.

use stoptics::radial::quantum_dn_convergence;

fn main() -> stoptics::Result<()> {
    let layers = [4, 8, 16, 32];
    let table = quantum_dn_convergence(1.0, &layers, &[0.0, 10.0], 4)?;
    for row in &table.rows {
        let max = row.errors.iter().cloned().fold(0.0, f64::max);
        println!("n = {:>2} R = {:.5} W = {:>4}: max DN error {max:.3e}", row.layers, row.r_trunc, row.potential);
    }
    for &n in &layers {
        let d = table.potential_difference(n, 0.0, 10.0).unwrap();
        println!("n = {n:>2}: W-dependence {:.3e}", d.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}
