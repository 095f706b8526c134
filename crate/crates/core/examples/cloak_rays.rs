//! Rays through the cloak leave exactly where the straight lines would.

use stoptics::geometry::Vec3;
use stoptics::rays::{random_ray_family, trace, travel_time_compare, CloakMetric, RayLaunch, RayState, TraceOptions};

fn main() -> stoptics::Result<()> {
    let opts = TraceOptions::default();
    for b in [1.5, 0.5, 0.05, 0.0] {
        let ray = RayLaunch::new(3.0, Vec3::x(), Vec3::y(), b)?;
        let res = trace(&CloakMetric, RayState::launch(&CloakMetric, ray.position(), ray.dir())?, &opts)?;
        let closest = res
            .samples
            .iter()
            .map(|s| Vec3::from(s.position).norm())
            .fold(f64::INFINITY, f64::min);
        println!(
            "b = {b:<4}: {:?} after {} steps, closest approach {closest:.6}, length {:.9}",
            res.termination, res.steps, res.end.length
        );
    }

    let family = random_ray_family(100, (0.1, 1.9), 3.0, 42)?;
    let cmp = travel_time_compare(&CloakMetric, &family, &opts)?;
    let worst = |f: fn(&stoptics::rays::RayComparison) -> f64| cmp.iter().map(f).fold(0.0, f64::max);
    println!("\n100 random rays");
    println!("  max exit error      {:.2e}", worst(|c| c.exit_error));
    println!("  max direction error {:.2e}", worst(|c| c.direction_error));
    println!("  max length error    {:.2e}", worst(|c| c.length_error));
    println!("  max drift rate      {:.2e}", worst(|c| c.drift_rate));
    Ok(())
}
