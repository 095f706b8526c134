use stoptics::designs::{truncated_cloak_profile, RadialMediumProfile};
use stoptics::radial::{dn_spectrum, DEFAULT_LMAX};

/// DN eigenvalues of nearly ideal static cloaks next to the homogeneous ball.
fn main() -> stoptics::Result<()> {
    let free = dn_spectrum(&RadialMediumProfile::homogeneous(), 0.0, DEFAULT_LMAX)?;
    let cloaks = [1.1, 1.01, 1.001]
        .iter()
        .map(|&r| Ok((r, dn_spectrum(&truncated_cloak_profile(r)?, 0.0, DEFAULT_LMAX)?)))
        .collect::<stoptics::Result<Vec<_>>>()?;
    print!("{:>3} {:>10}", "l", "free");
    for (r, _) in &cloaks {
        print!(" {:>14}", format!("R={r}"));
    }
    println!();
    for l in 0..=DEFAULT_LMAX {
        print!("{l:>3} {:>10.6}", free.get(l).unwrap());
        for (_, s) in &cloaks {
            print!(" {:>14.9}", s.get(l).unwrap());
        }
        println!();
    }
    Ok(())
}
