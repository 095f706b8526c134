use stoptics::designs::{laminate_phases, layered_isotropic_profile};
use stoptics::radial::homogenization_sweep;

fn main() -> stoptics::Result<()> {
    let (hi, lo) = laminate_phases(0.5, 2.0)?;
    println!("phases for radial 0.5, tangential 2: {hi:.6} / {lo:.6}");
    println!("  harmonic mean   {:.6}", 2.0 / (1.0 / hi + 1.0 / lo));
    println!("  arithmetic mean {:.6}", 0.5 * (hi + lo));

    let p = layered_isotropic_profile(1.2, 4)?;
    println!("\n{} has {} intervals", p.label, p.intervals.len());

    let table = homogenization_sweep(1.2, 0.0, 4, &[4, 8, 16, 32])?;
    println!("\nstatic DN error against the anisotropic truncated cloak (R = 1.2)");
    for row in &table.rows {
        let e = row.errors.as_ref().expect("static laminates are never resonant");
        println!("n = {:>2}: {}", row.parameter, e.iter().map(|v| format!("{v:10.3e}")).collect::<String>());
    }
    Ok(())
}
