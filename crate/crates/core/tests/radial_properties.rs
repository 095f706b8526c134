use proptest::prelude::*;
use stoptics::designs::{Coef, RadialInterval, RadialMediumProfile, Side, WaveModel};
use stoptics::maps::RadialDiffeo;
use stoptics::radial::{dn_spectrum, radial_solve, SolveOptions};

fn layered(breaks: &[f64], values: &[(f64, f64, f64)]) -> RadialMediumProfile {
    let mut edges = vec![0.0];
    let mut sorted = breaks.to_vec();
    sorted.sort_by(f64::total_cmp);
    edges.extend(sorted);
    edges.push(2.0);
    let intervals = edges
        .windows(2)
        .zip(values)
        .map(|(e, &(a, b, w))| RadialInterval::uniform(e[0], e[1], a, b, w))
        .collect();
    RadialMediumProfile::new("random layers", WaveModel::Helmholtz, intervals).unwrap()
}

fn coef() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2..5.0f64, 0.2..5.0f64, 0.2..3.0f64)
}

fn layers() -> impl Strategy<Value = (Vec<f64>, Vec<(f64, f64, f64)>)> {
    (1usize..5).prop_flat_map(|k| {
        (
            prop::collection::vec(0.1..1.9f64, k).prop_filter("distinct breaks", |b| {
                let mut s = b.clone();
                s.sort_by(f64::total_cmp);
                s.windows(2).all(|w| w[1] - w[0] > 0.02)
            }),
            prop::collection::vec(coef(), k + 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uniform_ball_static_spectrum(a in 0.1..10.0f64, w in 0.1..4.0f64, l in 0u32..10) {
        let sol = radial_solve(&RadialMediumProfile::uniform(a, w), l, 0.0, None, 1.0, SolveOptions::default()).unwrap();
        let lambda = sol.dn_ratio().unwrap();
        prop_assert!((lambda - a * l as f64 / 2.0).abs() < 1e-10 * (1.0 + lambda.abs()));
    }

    #[test]
    fn layered_transmission_conditions((breaks, values) in layers(), l in 0u32..6, omega in 0.0..0.6f64) {
        let p = layered(&breaks, &values);
        let sol = radial_solve(&p, l, omega, None, 1.0, SolveOptions::default()).unwrap();
        let scale = sol.condition.max(1.0);
        for (r, du, dq) in sol.interface_jumps().unwrap() {
            prop_assert!(du.abs() < 1e-10 * scale && dq.abs() < 1e-10 * scale, "r = {r}: {du:e} {dq:e}");
        }
    }

    #[test]
    fn static_energy_identity((breaks, values) in layers(), l in 0u32..6) {
        let p = layered(&breaks, &values);
        let sol = radial_solve(&p, l, 0.0, None, 1.0, SolveOptions::default()).unwrap();
        let lf = (l * (l + 1)) as f64;
        let energy = sol
            .integrate(0.0, 2.0, |r, u, du, c| (c.a * du * du + c.b * lf * u * u / (r * r)) * r * r)
            .unwrap();
        let pairing = sol.flux(2.0, Side::Minus).unwrap() * sol.eval(2.0, Side::Minus).unwrap().0;
        prop_assert!((energy - pairing).abs() < 1e-8 * pairing.abs().max(1.0), "{energy} vs {pairing}");
    }

    #[test]
    fn spectrum_survives_a_smooth_pushforward(c in -0.45..0.45f64, k in 0.0..0.5f64, omega in 0.0..0.8f64) {
        let base = RadialMediumProfile::new(
            "smooth",
            WaveModel::Helmholtz,
            vec![RadialInterval::new(
                0.0,
                2.0,
                Coef::var(move |r| 1.0 + k * r * r),
                Coef::var(move |r| 1.0 + k * (1.0 - r / 2.0)),
                Coef::var(move |r| 1.0 + k * (0.7 * r).sin()),
            )],
        )
        .unwrap();
        let pushed = base.pushforward(&RadialDiffeo::smooth_bump(c).unwrap()).unwrap();
        let a = dn_spectrum(&base, omega, 4).unwrap();
        let b = dn_spectrum(&pushed, omega, 4).unwrap();
        for (l, e) in a.errors(&b).iter().enumerate() {
            prop_assert!(*e < 1e-7, "l = {l}: {e:e}");
        }
    }
}
