//! Truncated cloaks approaching the ideal one at a nonzero frequency, and the
//! flux on the inner side of the truncation sphere.

use stoptics::radial::{cloak_convergence_sweep, hidden_flux_sweep};

fn main() -> stoptics::Result<()> {
    let radii = [1.5, 1.25, 1.1, 1.05, 1.01];
    let table = cloak_convergence_sweep(1.0, 4, &radii)?;
    println!("DN errors against free space, omega = 1");
    for row in &table.rows {
        match &row.errors {
            Some(e) => println!("R = {:<5} {}", row.parameter, e.iter().map(|v| format!("{v:10.3e}")).collect::<String>()),
            None => println!("R = {:<5} {}", row.parameter, row.flag.as_deref().unwrap_or("")),
        }
    }
    println!("\ninterior flux r^2 a du/dr at the truncation sphere");
    for l in 1..=4 {
        let fluxes = hidden_flux_sweep(1.0, l, &radii)?;
        println!("l = {l}: {}", fluxes.iter().map(|h| format!("{:11.3e}", h.interior_flux)).collect::<String>());
    }
    Ok(())
}
