//! Ideal-gas compressible Euler equations in one and two dimensions.
//!
//! Conserved layout: `(ρ, ρv_x, [ρv_y,] ρE)`; primitive layout `(ρ, v_x, [v_y,] p)`.

use super::Vars;

#[inline]
fn velocity(u: &Vars, ndims: usize) -> [f64; 2] {
    let inv_rho = 1.0 / u[0];
    if ndims == 1 {
        [u[1] * inv_rho, 0.0]
    } else {
        [u[1] * inv_rho, u[2] * inv_rho]
    }
}

#[inline]
pub(super) fn pressure(u: &Vars, ndims: usize, gamma: f64) -> f64 {
    let e = u[ndims + 1];
    let kinetic = if ndims == 1 {
        0.5 * u[1] * u[1] / u[0]
    } else {
        0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]
    };
    (gamma - 1.0) * (e - kinetic)
}

pub(super) fn prim_to_cons(prim: &Vars, ndims: usize, gamma: f64) -> Vars {
    let rho = prim[0];
    if ndims == 1 {
        let (v, p) = (prim[1], prim[2]);
        [rho, rho * v, p / (gamma - 1.0) + 0.5 * rho * v * v, 0.0]
    } else {
        let (vx, vy, p) = (prim[1], prim[2], prim[3]);
        [
            rho,
            rho * vx,
            rho * vy,
            p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy),
        ]
    }
}

pub(super) fn cons_to_prim(u: &Vars, ndims: usize, gamma: f64) -> Vars {
    let v = velocity(u, ndims);
    let p = pressure(u, ndims, gamma);
    if ndims == 1 {
        [u[0], v[0], p, 0.0]
    } else {
        [u[0], v[0], v[1], p]
    }
}

#[inline]
pub(super) fn flux_1d(u: &Vars, gamma: f64) -> Vars {
    let v = u[1] / u[0];
    let p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * v);
    [u[1], u[1] * v + p, (u[2] + p) * v, 0.0]
}

#[inline]
pub(super) fn flux_2d(u: &Vars, dir: usize, gamma: f64) -> Vars {
    let inv_rho = 1.0 / u[0];
    let vx = u[1] * inv_rho;
    let vy = u[2] * inv_rho;
    let p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * vx + u[2] * vy));
    if dir == 0 {
        [u[1], u[1] * vx + p, u[1] * vy, (u[3] + p) * vx]
    } else {
        [u[2], u[2] * vx, u[2] * vy + p, (u[3] + p) * vy]
    }
}

#[inline]
pub(super) fn wave_speed(u: &Vars, ndims: usize, dir: usize, gamma: f64) -> f64 {
    let v = velocity(u, ndims);
    let p = pressure(u, ndims, gamma);
    v[dir].abs() + (gamma * p / u[0]).sqrt()
}

/// `S = -ρ s / (γ - 1)` with `s = ln p - γ ln ρ`.
#[inline]
pub(super) fn entropy(u: &Vars, ndims: usize, gamma: f64) -> f64 {
    let p = pressure(u, ndims, gamma);
    let s = p.ln() - gamma * u[0].ln();
    -u[0] * s / (gamma - 1.0)
}

#[inline]
pub(super) fn entropy_variables(u: &Vars, ndims: usize, gamma: f64) -> Vars {
    let rho = u[0];
    let v = velocity(u, ndims);
    let p = pressure(u, ndims, gamma);
    let s = p.ln() - gamma * rho.ln();
    let rho_p = rho / p;
    let v2 = v[0] * v[0] + v[1] * v[1];
    let w0 = (gamma - s) / (gamma - 1.0) - 0.5 * rho_p * v2;
    if ndims == 1 {
        [w0, rho_p * v[0], -rho_p, 0.0]
    } else {
        [w0, rho_p * v[0], rho_p * v[1], -rho_p]
    }
}

#[inline]
pub(super) fn entropy_flux(u: &Vars, ndims: usize, dir: usize, gamma: f64) -> f64 {
    u[1 + dir] / u[0] * entropy(u, ndims, gamma)
}

/// Logarithmic mean `(y - x) / (ln y - ln x)`, with a series expansion near `x = y`.
#[inline]
pub fn ln_mean(x: f64, y: f64) -> f64 {
    let f2 = (x * (x - 2.0 * y) + y * y) / (x * (x + 2.0 * y) + y * y);
    if f2 < 1e-4 {
        (x + y) / (2.0 + f2 * (2.0 / 3.0 + f2 * (2.0 / 5.0 + f2 * (2.0 / 7.0))))
    } else {
        (y - x) / (y / x).ln()
    }
}

/// Reciprocal of [`ln_mean`].
#[inline]
pub fn inv_ln_mean(x: f64, y: f64) -> f64 {
    let f2 = (x * (x - 2.0 * y) + y * y) / (x * (x + 2.0 * y) + y * y);
    if f2 < 1e-4 {
        (2.0 + f2 * (2.0 / 3.0 + f2 * (2.0 / 5.0 + f2 * (2.0 / 7.0)))) / (x + y)
    } else {
        (y / x).ln() / (y - x)
    }
}

struct Prim {
    rho: f64,
    v: [f64; 2],
    p: f64,
}

#[inline]
fn prim(u: &Vars, ndims: usize, gamma: f64) -> Prim {
    Prim {
        rho: u[0],
        v: velocity(u, ndims),
        p: pressure(u, ndims, gamma),
    }
}

/// Entropy-conservative, kinetic-energy-preserving flux of Ranocha.
#[inline]
pub(super) fn ranocha_1d(u_l: &Vars, u_r: &Vars, gamma: f64) -> Vars {
    let l = prim(u_l, 1, gamma);
    let r = prim(u_r, 1, gamma);
    let rho_mean = ln_mean(l.rho, r.rho);
    let inv_rho_p_mean = l.p * r.p * inv_ln_mean(l.rho * r.p, r.rho * l.p);
    let v_avg = 0.5 * (l.v[0] + r.v[0]);
    let p_avg = 0.5 * (l.p + r.p);
    let v2_avg = 0.5 * (l.v[0] * r.v[0]);
    let f1 = rho_mean * v_avg;
    let f2 = f1 * v_avg + p_avg;
    let f3 = f1 * (v2_avg + inv_rho_p_mean / (gamma - 1.0)) + 0.5 * (l.p * r.v[0] + r.p * l.v[0]);
    [f1, f2, f3, 0.0]
}

#[inline]
pub(super) fn ranocha_2d(u_l: &Vars, u_r: &Vars, dir: usize, gamma: f64) -> Vars {
    let l = prim(u_l, 2, gamma);
    let r = prim(u_r, 2, gamma);
    let rho_mean = ln_mean(l.rho, r.rho);
    let inv_rho_p_mean = l.p * r.p * inv_ln_mean(l.rho * r.p, r.rho * l.p);
    let v_avg = [0.5 * (l.v[0] + r.v[0]), 0.5 * (l.v[1] + r.v[1])];
    let p_avg = 0.5 * (l.p + r.p);
    let v2_avg = 0.5 * (l.v[0] * r.v[0] + l.v[1] * r.v[1]);
    let f1 = rho_mean * v_avg[dir];
    let mut f = [f1, f1 * v_avg[0], f1 * v_avg[1], 0.0];
    f[1 + dir] += p_avg;
    f[3] = f1 * (v2_avg + inv_rho_p_mean / (gamma - 1.0))
        + 0.5 * (l.p * r.v[dir] + r.p * l.v[dir]);
    f
}

/// Entropy-conservative, kinetic-energy-preserving flux of Chandrashekar.
#[inline]
pub(super) fn chandrashekar_1d(u_l: &Vars, u_r: &Vars, gamma: f64) -> Vars {
    let l = prim(u_l, 1, gamma);
    let r = prim(u_r, 1, gamma);
    let beta_l = 0.5 * l.rho / l.p;
    let beta_r = 0.5 * r.rho / r.p;
    let rho_avg = 0.5 * (l.rho + r.rho);
    let rho_mean = ln_mean(l.rho, r.rho);
    let beta_mean = ln_mean(beta_l, beta_r);
    let beta_avg = 0.5 * (beta_l + beta_r);
    let v_avg = 0.5 * (l.v[0] + r.v[0]);
    let p_mean = 0.5 * rho_avg / beta_avg;
    let v2_avg = 0.5 * (l.v[0] * l.v[0] + r.v[0] * r.v[0]);
    let f1 = rho_mean * v_avg;
    let f2 = f1 * v_avg + p_mean;
    let f3 = f1 * 0.5 * (1.0 / ((gamma - 1.0) * beta_mean) - v2_avg) + f2 * v_avg;
    [f1, f2, f3, 0.0]
}

#[inline]
pub(super) fn chandrashekar_2d(u_l: &Vars, u_r: &Vars, dir: usize, gamma: f64) -> Vars {
    let l = prim(u_l, 2, gamma);
    let r = prim(u_r, 2, gamma);
    let beta_l = 0.5 * l.rho / l.p;
    let beta_r = 0.5 * r.rho / r.p;
    let rho_avg = 0.5 * (l.rho + r.rho);
    let rho_mean = ln_mean(l.rho, r.rho);
    let beta_mean = ln_mean(beta_l, beta_r);
    let beta_avg = 0.5 * (beta_l + beta_r);
    let v_avg = [0.5 * (l.v[0] + r.v[0]), 0.5 * (l.v[1] + r.v[1])];
    let p_mean = 0.5 * rho_avg / beta_avg;
    let v2_avg = 0.5 * (l.v[0] * l.v[0] + l.v[1] * l.v[1] + r.v[0] * r.v[0] + r.v[1] * r.v[1]);
    let f1 = rho_mean * v_avg[dir];
    let mut f = [f1, f1 * v_avg[0], f1 * v_avg[1], 0.0];
    f[1 + dir] += p_mean;
    f[3] = f1 * 0.5 * (1.0 / ((gamma - 1.0) * beta_mean) - v2_avg) + f[1] * v_avg[0] + f[2] * v_avg[1];
    f
}

#[inline]
fn physical(u: &Vars, ndims: usize, dir: usize, gamma: f64) -> Vars {
    if ndims == 1 {
        flux_1d(u, gamma)
    } else {
        flux_2d(u, dir, gamma)
    }
}

/// HLL flux with Davis wave-speed estimates.
pub(super) fn hll(u_l: &Vars, u_r: &Vars, ndims: usize, dir: usize, gamma: f64) -> Vars {
    let l = prim(u_l, ndims, gamma);
    let r = prim(u_r, ndims, gamma);
    let c_l = (gamma * l.p / l.rho).sqrt();
    let c_r = (gamma * r.p / r.rho).sqrt();
    let s_l = (l.v[dir] - c_l).min(r.v[dir] - c_r);
    let s_r = (l.v[dir] + c_l).max(r.v[dir] + c_r);
    let f_l = physical(u_l, ndims, dir, gamma);
    if s_l >= 0.0 {
        return f_l;
    }
    let f_r = physical(u_r, ndims, dir, gamma);
    if s_r <= 0.0 {
        return f_r;
    }
    let inv = 1.0 / (s_r - s_l);
    std::array::from_fn(|v| (s_r * f_l[v] - s_l * f_r[v] + s_l * s_r * (u_r[v] - u_l[v])) * inv)
}

/// HLLC flux with pressure-based (PVRS) wave-speed estimates.
pub(super) fn hllc(u_l: &Vars, u_r: &Vars, ndims: usize, dir: usize, gamma: f64) -> Vars {
    let l = prim(u_l, ndims, gamma);
    let r = prim(u_r, ndims, gamma);
    let c_l = (gamma * l.p / l.rho).sqrt();
    let c_r = (gamma * r.p / r.rho).sqrt();
    let (vn_l, vn_r) = (l.v[dir], r.v[dir]);

    let rho_bar = 0.5 * (l.rho + r.rho);
    let c_bar = 0.5 * (c_l + c_r);
    let p_pvrs = 0.5 * (l.p + r.p) - 0.5 * (vn_r - vn_l) * rho_bar * c_bar;
    let p_star = p_pvrs.max(0.0);
    let q = |p_k: f64| {
        if p_star <= p_k {
            1.0
        } else {
            (1.0 + (gamma + 1.0) / (2.0 * gamma) * (p_star / p_k - 1.0)).sqrt()
        }
    };
    let s_l = vn_l - c_l * q(l.p);
    let s_r = vn_r + c_r * q(r.p);

    let f_l = physical(u_l, ndims, dir, gamma);
    if s_l >= 0.0 {
        return f_l;
    }
    let f_r = physical(u_r, ndims, dir, gamma);
    if s_r <= 0.0 {
        return f_r;
    }
    let s_star = (r.p - l.p + l.rho * vn_l * (s_l - vn_l) - r.rho * vn_r * (s_r - vn_r))
        / (l.rho * (s_l - vn_l) - r.rho * (s_r - vn_r));

    let star = |u: &Vars, pk: &Prim, s_k: f64| -> Vars {
        let vn = pk.v[dir];
        let factor = pk.rho * (s_k - vn) / (s_k - s_star);
        let e = ndims + 1;
        let mut us = [0.0; 4];
        us[0] = factor;
        for d in 0..ndims {
            us[1 + d] = factor * if d == dir { s_star } else { pk.v[d] };
        }
        us[e] = factor * (u[e] / pk.rho + (s_star - vn) * (s_star + pk.p / (pk.rho * (s_k - vn))));
        us
    };
    if s_star >= 0.0 {
        let us = star(u_l, &l, s_l);
        std::array::from_fn(|v| f_l[v] + s_l * (us[v] - u_l[v]))
    } else {
        let us = star(u_r, &r, s_r);
        std::array::from_fn(|v| f_r[v] + s_r * (us[v] - u_r[v]))
    }
}
