use super::Vars;

#[inline]
pub(super) fn flux(u: &Vars) -> Vars {
    [0.5 * u[0] * u[0], 0.0, 0.0, 0.0]
}

#[inline]
pub(super) fn ec_flux(u_l: &Vars, u_r: &Vars) -> Vars {
    let (a, b) = (u_l[0], u_r[0]);
    [(a * a + a * b + b * b) / 6.0, 0.0, 0.0, 0.0]
}

/// Exact Riemann solver flux for the convex flux `u²/2`.
#[inline]
pub(super) fn godunov(u_l: &Vars, u_r: &Vars) -> Vars {
    let (a, b) = (u_l[0], u_r[0]);
    let f = |u: f64| 0.5 * u * u;
    let value = if a <= b {
        if a <= 0.0 && b >= 0.0 {
            0.0
        } else {
            f(a).min(f(b))
        }
    } else {
        f(a).max(f(b))
    };
    [value, 0.0, 0.0, 0.0]
}
