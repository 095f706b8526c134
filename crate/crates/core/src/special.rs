//! Spherical Bessel functions, Gauss–Legendre rules and scalar root bracketing.

/// Regular/irregular pair of solutions of
/// `u'' + (2/r) u' - l(l+1)/r^2 u + kappa u = 0`, with derivatives in `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselPair {
    pub f: f64,
    pub df: f64,
    pub g: f64,
    pub dg: f64,
}

fn double_factorial_odd(l: u32) -> f64 {
    (0..=l).map(|k| (2 * k + 1) as f64).product()
}

/// Power series of `j_l` (`sign = -1`) or `i_l` (`sign = +1`).
fn regular_series(l: u32, x: f64, sign: f64) -> f64 {
    let z = 0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= sign * z / (m as f64 * (2 * l + 2 * m + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    x.powi(l as i32) / double_factorial_odd(l) * sum
}

/// `j_0 .. j_{lmax}` at `x`.
pub fn sph_j(lmax: u32, x: f64) -> Vec<f64> {
    let n = lmax as usize + 1;
    if x.abs() < 1e-300 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return v;
    }
    if x.abs() <= 1.0 + lmax as f64 {
        return (0..=lmax).map(|l| regular_series(l, x, -1.0)).collect();
    }
    let mut v = Vec::with_capacity(n);
    v.push(x.sin() / x);
    if lmax >= 1 {
        v.push(x.sin() / (x * x) - x.cos() / x);
    }
    for l in 1..lmax as usize {
        let next = (2 * l + 1) as f64 / x * v[l] - v[l - 1];
        v.push(next);
    }
    v
}

/// `y_0 .. y_{lmax}` at `x > 0` (upward recurrence is stable for `y`).
pub fn sph_y(lmax: u32, x: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(lmax as usize + 1);
    v.push(-x.cos() / x);
    if lmax >= 1 {
        v.push(-x.cos() / (x * x) - x.sin() / x);
    }
    for l in 1..lmax as usize {
        let next = (2 * l + 1) as f64 / x * v[l] - v[l - 1];
        v.push(next);
    }
    v
}

/// Modified `i_0 .. i_{lmax}` (regular at the origin).
pub fn sph_i(lmax: u32, x: f64) -> Vec<f64> {
    (0..=lmax).map(|l| regular_series(l, x, 1.0)).collect()
}

/// Modified `k_l(x) = e^{-x}/x * poly`, normalised so that `k_0 = e^{-x}/x`.
pub fn sph_k(lmax: u32, x: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(lmax as usize + 1);
    let e = (-x).exp();
    v.push(e / x);
    if lmax >= 1 {
        v.push(e / x * (1.0 + 1.0 / x));
    }
    for l in 1..lmax as usize {
        let next = v[l - 1] + (2 * l + 1) as f64 / x * v[l];
        v.push(next);
    }
    v
}

/// Spherical Bessel pair for `kappa > 0` (`j_l, y_l` in `k r`), `kappa < 0`
/// (`i_l, k_l` in `k r`) or `kappa = 0` (`r^l, r^{-l-1}`), with derivatives
/// taken in `r`.
pub fn radial_pair(l: u32, kappa: f64, r: f64) -> BesselPair {
    let lf = l as f64;
    if kappa == 0.0 {
        return BesselPair {
            f: r.powi(l as i32),
            df: if l == 0 { 0.0 } else { lf * r.powi(l as i32 - 1) },
            g: r.powi(-(l as i32) - 1),
            dg: -(lf + 1.0) * r.powi(-(l as i32) - 2),
        };
    }
    let k = kappa.abs().sqrt();
    let x = k * r;
    let (f, g, df, dg) = if kappa > 0.0 {
        let j = sph_j(l + 1, x);
        let y = sph_y(l + 1, x);
        // z_l' = (l/x) z_l - z_{l+1}
        (j[l as usize], y[l as usize], lf / x * j[l as usize] - j[l as usize + 1], lf / x * y[l as usize] - y[l as usize + 1])
    } else {
        let i = sph_i(l + 1, x);
        let kk = sph_k(l + 1, x);
        // i_l' = (l/x) i_l + i_{l+1};  k_l' = (l/x) k_l - k_{l+1}
        (i[l as usize], kk[l as usize], lf / x * i[l as usize] + i[l as usize + 1], lf / x * kk[l as usize] - kk[l as usize + 1])
    };
    BesselPair {
        f,
        df: df * k,
        g,
        dg: dg * k,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `int_a^b f` with a composite Gauss–Legendre rule of `panels` panels of `order` points.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Bisection on a bracketing interval; `None` when `f(a)`, `f(b)` share a sign.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    while (b - a).abs() > xtol * (1.0 + a.abs().max(b.abs())) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a).abs() < f64::EPSILON * m.abs() {
            break;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_forms_low_degree() {
        for &x in &[0.3, 1.7, 5.0, 12.5] {
            let j = sph_j(2, x);
            let (s, c) = (x.sin(), x.cos());
            assert!((j[0] - s / x).abs() < 1e-14);
            assert!((j[1] - (s / (x * x) - c / x)).abs() < 1e-14);
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            assert!((j[2] - j2).abs() < 1e-13);
            let i = sph_i(1, x);
            assert!((i[0] - x.sinh() / x).abs() < 1e-13 * i[0]);
            assert!((i[1] - (x * x.cosh() - x.sinh()) / (x * x)).abs() < 1e-12 * i[1]);
        }
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        for l in 0..9u32 {
            let x = 1.0 + l as f64;
            let series = regular_series(l, x, -1.0);
            let rec = sph_j(l, x + 1e-12)[l as usize];
            assert!((series - rec).abs() < 1e-11, "l={l}: {series} vs {rec}");
        }
    }

    #[test]
    fn wronskians() {
        // j_l y_l' - j_l' y_l = 1/x^2 ; i_l k_l' - i_l' k_l = -1/x^2 (this normalisation)
        for l in 0..8 {
            for &x in &[0.4, 2.0, 9.0] {
                let p = radial_pair(l, 1.0, x);
                assert!((p.f * p.dg - p.df * p.g - 1.0 / (x * x)).abs() < 1e-10 / (x * x));
                let m = radial_pair(l, -1.0, x);
                assert!((m.f * m.dg - m.df * m.g + 1.0 / (x * x)).abs() < 1e-10 / (x * x));
            }
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((integrate(|x| x.exp(), 0.0, 1.0, 3, 8) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn bisection_finds_tan_root() {
        let k = bisect(|k| k.tan() - k, 4.0, 4.6, 1e-14).unwrap();
        assert!((k - 4.493409457909064).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    proptest! {
        #[test]
        fn pair_solves_the_radial_equation(l in 0u32..9, kappa in -20.0f64..20.0, r in 0.2f64..2.0) {
            // residual of u'' + 2u'/r - L u/r^2 + kappa u via central differences of u'
            let h = 1e-5;
            let p = radial_pair(l, kappa, r);
            let (pp, pm) = (radial_pair(l, kappa, r + h), radial_pair(l, kappa, r - h));
            let lf = (l * (l + 1)) as f64;
            for (u, du, ddu) in [(p.f, p.df, (pp.df - pm.df) / (2.0 * h)), (p.g, p.dg, (pp.dg - pm.dg) / (2.0 * h))] {
                let res = ddu + 2.0 * du / r - lf * u / (r * r) + kappa * u;
                let scale = u.abs() / (r * r) + du.abs() / r + ddu.abs() + 1e-300;
                prop_assert!(res.abs() < 1e-6 * scale * (1.0 + kappa.abs()));
            }
        }
    }
}
