use super::Vars;

/// Below this state jump the two-point flux falls back to the central flux.
const FALLBACK_JUMP: f64 = 1e-12;

#[inline]
pub(super) fn flux(u: &Vars, dir: usize) -> Vars {
    let v = if dir == 0 { u[0].sin() } else { u[0].cos() };
    [v, 0.0, 0.0, 0.0]
}

#[inline]
pub(super) fn entropy_flux(u: f64, dir: usize) -> f64 {
    if dir == 0 {
        u * u.sin() + u.cos()
    } else {
        u * u.cos() - u.sin()
    }
}

#[inline]
pub(super) fn potential(u: f64, dir: usize) -> f64 {
    if dir == 0 {
        -u.cos()
    } else {
        u.sin()
    }
}

/// Entropy-conservative flux for `S = u²/2`:
/// `(cos a - cos b)/(b - a)` in x and `(sin b - sin a)/(b - a)` in y.
///
/// Evaluated in the product form `sin(ā)·sinc(Δ/2)` / `cos(ā)·sinc(Δ/2)`,
/// which is the same quantity without the cancellation in the differences.
#[inline]
pub(super) fn ec_flux(u_l: &Vars, u_r: &Vars, dir: usize) -> Vars {
    let (a, b) = (u_l[0], u_r[0]);
    let jump = b - a;
    if jump.abs() <= FALLBACK_JUMP {
        let fa = flux(u_l, dir)[0];
        let fb = flux(u_r, dir)[0];
        return [0.5 * (fa + fb), 0.0, 0.0, 0.0];
    }
    let mean = 0.5 * (a + b);
    let half = 0.5 * jump;
    let sinc = half.sin() / half;
    let v = if dir == 0 { mean.sin() * sinc } else { mean.cos() * sinc };
    [v, 0.0, 0.0, 0.0]
}
