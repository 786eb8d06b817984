use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

const E1: Equation = Equation::Euler1d { gamma: 1.4 };
const E2: Equation = Equation::Euler2d { gamma: 1.4 };

fn s(v: f64) -> Vars {
    [v, 0.0, 0.0, 0.0]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn physical_flux_examples() {
    assert_eq!(Equation::Burgers1d.physical_flux(&s(2.0), 0).unwrap()[0], 2.0);
    assert_eq!(Equation::Kpp2d.physical_flux(&s(0.0), 1).unwrap()[0], 1.0);
    let u = E1.primitive_to_conserved(&[1.0, 0.0, 1.0, 0.0]).unwrap();
    let f = E1.physical_flux(&u, 0).unwrap();
    assert!(close(f[0], 0.0, 1e-15) && close(f[1], 1.0, 1e-15) && close(f[2], 0.0, 1e-15));
}

#[test]
fn inadmissible_states_rejected() {
    let bad = [1.0, 0.0, -1.0, 0.0];
    assert!(matches!(E1.physical_flux(&bad, 0), Err(Error::Inadmissible { .. })));
    assert!(E1.primitive_to_conserved(&[-1.0, 0.0, 1.0, 0.0]).is_err());
    assert!(E1.primitive_to_conserved(&[1.0, 0.0, -1.0, 0.0]).is_err());
    assert!(E1.physical_flux(&[1.0, 0.0, 2.5, 0.0], 1).is_err());
}

#[test]
fn wave_speed_examples() {
    assert_eq!(Equation::Burgers1d.max_wave_speed(&s(-3.0), &s(2.0), 0).unwrap(), 3.0);
    assert_eq!(Equation::Kpp2d.max_wave_speed(&s(0.3), &s(9.0), 1).unwrap(), 1.0);
    let u = E1.primitive_to_conserved(&[1.0, 0.0, 1.0, 0.0]).unwrap();
    let c = E1.max_wave_speed(&u, &u, 0).unwrap();
    assert!(close(c, 1.4f64.sqrt(), 1e-15));
}

#[test]
fn entropy_examples() {
    let q = Equation::Burgers1d.entropy_quantities(&s(2.0)).unwrap();
    assert!(close(q.entropy, 2.0, 1e-15));
    assert!(close(q.variables[0], 2.0, 1e-15));
    assert!(close(q.flux[0], 8.0 / 3.0, 1e-15));
    assert!(close(q.potential[0], 4.0 / 3.0, 1e-15));

    let q = Equation::Kpp2d.entropy_quantities(&s(PI)).unwrap();
    assert!(close(q.entropy, PI * PI / 2.0, 1e-15));
    assert!(close(q.variables[0], PI, 1e-15));

    let u = E1.primitive_to_conserved(&[2.0, 3.0, 1.0, 0.0]).unwrap();
    let q = E1.entropy_quantities(&u).unwrap();
    assert!(close(q.potential[0], 6.0, 1e-14));
}

#[test]
fn two_point_examples() {
    let f = Equation::Burgers1d.ec_two_point_flux(FluxKind::EcBurgers, &s(1.0), &s(2.0), 0).unwrap();
    assert!(close(f[0], 7.0 / 6.0, 1e-15));
    let f = Equation::Kpp2d.ec_two_point_flux(FluxKind::EcKpp, &s(0.0), &s(PI), 0).unwrap();
    assert!(close(f[0], 2.0 / PI, 1e-15));
    // KPP fallback to the central flux
    let f = Equation::Kpp2d.ec_two_point_flux(FluxKind::EcKpp, &s(0.4), &s(0.4 + 1e-13), 1).unwrap();
    assert!(close(f[0], 0.5 * (0.4f64.cos() + (0.4f64 + 1e-13).cos()), 1e-15));
    for kind in [FluxKind::EcRanocha, FluxKind::EcChandrashekar] {
        let u = E2.primitive_to_conserved(&[1.3, 0.2, -0.7, 2.1]).unwrap();
        for dir in 0..2 {
            let fe = E2.ec_two_point_flux(kind, &u, &u, dir).unwrap();
            let fp = E2.physical_flux(&u, dir).unwrap();
            for v in 0..4 {
                assert!(close(fe[v], fp[v], 1e-14));
            }
        }
    }
}

#[test]
fn flux_kind_mismatch_is_config_error() {
    let r = E1.ec_two_point_flux(FluxKind::EcBurgers, &[1.0, 0.0, 2.5, 0.0], &[1.0, 0.0, 2.5, 0.0], 0);
    assert!(matches!(r, Err(Error::Config(_))));
    assert!(Equation::Burgers1d.surface_flux(FluxKind::Hllc, &s(1.0), &s(1.0), 0).is_err());
    assert!(Equation::Burgers1d.ec_two_point_flux(FluxKind::Rusanov, &s(1.0), &s(1.0), 0).is_err());
}

#[test]
fn surface_flux_examples() {
    let b = Equation::Burgers1d;
    assert!(close(b.surface_flux(FluxKind::GodunovBurgers, &s(1.0), &s(-1.0), 0).unwrap()[0], 0.5, 0.0));
    assert_eq!(b.surface_flux(FluxKind::GodunovBurgers, &s(-1.0), &s(1.0), 0).unwrap()[0], 0.0);
    let u = E2.primitive_to_conserved(&[0.8, -0.3, 0.4, 1.7]).unwrap();
    for kind in [FluxKind::Rusanov, FluxKind::HllDavis, FluxKind::Hllc, FluxKind::Central] {
        for dir in 0..2 {
            let f = E2.surface_flux(kind, &u, &u, dir).unwrap();
            let fp = E2.physical_flux(&u, dir).unwrap();
            for v in 0..4 {
                assert!(close(f[v], fp[v], 1e-14), "{kind} dir {dir}");
            }
        }
    }
}

#[test]
fn primitive_conversion_examples() {
    let u = E1.primitive_to_conserved(&[1.0, 0.0, 1.0, 0.0]).unwrap();
    assert!(close(u[0], 1.0, 0.0) && u[1] == 0.0 && close(u[2], 2.5, 1e-15));
    let u = E2.primitive_to_conserved(&[1.0, 0.1, 0.2, 20.0]).unwrap();
    assert!(close(u[3], 50.025, 1e-15));
    assert_eq!(&u[..3], &[1.0, 0.1, 0.2]);
}

#[test]
fn flux_kind_parsing() {
    for k in FluxKind::ALL {
        assert_eq!(k.name().parse::<FluxKind>().unwrap(), k);
    }
    assert_eq!("LLF".parse::<FluxKind>().unwrap(), FluxKind::Rusanov);
    assert!("roe".parse::<FluxKind>().is_err());
}

#[test]
fn ln_mean_matches_definition() {
    for (x, y) in [(1.0, 2.0), (0.3, 0.30001), (5.0, 5.0), (1e-3, 7.0)] {
        let m = ln_mean(x, y);
        let e = if x == y { x } else { (y - x) / (y.ln() - x.ln()) };
        assert!(close(m, e, 1e-12), "{x} {y}");
        assert!(close(m * inv_ln_mean(x, y), 1.0, 1e-14));
    }
}

// ---- property tests ----

fn euler1d_state() -> impl Strategy<Value = Vars> {
    (0.1f64..5.0, -2.0f64..2.0, 0.1f64..10.0)
        .prop_map(|(r, v, p)| E1.primitive_to_conserved(&[r, v, p, 0.0]).unwrap())
}

fn euler2d_state() -> impl Strategy<Value = Vars> {
    (0.1f64..5.0, -2.0f64..2.0, -2.0f64..2.0, 0.1f64..10.0)
        .prop_map(|(r, vx, vy, p)| E2.primitive_to_conserved(&[r, vx, vy, p]).unwrap())
}

fn check_ec(eq: Equation, kind: FluxKind, ul: Vars, ur: Vars) -> std::result::Result<(), TestCaseError> {
    let nv = eq.nvars();
    for dir in 0..eq.ndims() {
        let f = eq.ec_two_point_flux(kind, &ul, &ur, dir).unwrap();
        let g = eq.ec_two_point_flux(kind, &ur, &ul, dir).unwrap();
        let fl = eq.physical_flux(&ul, dir).unwrap();
        let fr = eq.physical_flux(&ur, dir).unwrap();
        for v in 0..nv {
            let scale = 1.0 + fl[v].abs() + fr[v].abs();
            prop_assert!((f[v] - g[v]).abs() <= 1e-14 * scale, "symmetry {kind} var {v}");
        }
        let fc = eq.ec_two_point_flux(kind, &ul, &ul, dir).unwrap();
        let fp = eq.physical_flux(&ul, dir).unwrap();
        for v in 0..nv {
            prop_assert!(close(fc[v], fp[v], 1e-13), "consistency {kind} var {v}");
        }
        let ql = eq.entropy_quantities(&ul).unwrap();
        let qr = eq.entropy_quantities(&ur).unwrap();
        let mut lhs = 0.0;
        let mut scale = qr.potential[dir].abs() + ql.potential[dir].abs();
        for v in 0..nv {
            let dw = qr.variables[v] - ql.variables[v];
            lhs += dw * f[v];
            scale += (dw * f[v]).abs();
        }
        let rhs = qr.potential[dir] - ql.potential[dir];
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale.max(1e-300), "Tadmor {kind}: {lhs} vs {rhs}");
    }
    Ok(())
}

fn check_entropy_pair(eq: Equation, u: Vars) -> std::result::Result<(), TestCaseError> {
    let q = eq.entropy_quantities(&u).unwrap();
    let nv = eq.nvars();
    for dir in 0..eq.ndims() {
        let f = eq.physical_flux(&u, dir).unwrap();
        let wf: f64 = (0..nv).map(|v| q.variables[v] * f[v]).sum();
        let scale = wf.abs() + q.flux[dir].abs() + 1.0;
        prop_assert!((q.potential[dir] - (wf - q.flux[dir])).abs() <= 1e-12 * scale);
    }
    // w = ∂S/∂u by central differences
    for v in 0..nv {
        let h = 1e-6 * u[v].abs().max(1.0);
        let mut up = u;
        let mut um = u;
        up[v] += h;
        um[v] -= h;
        let fd = (eq.entropy(&up) - eq.entropy(&um)) / (2.0 * h);
        prop_assert!(
            (fd - q.variables[v]).abs() <= 1e-5 * q.variables[v].abs().max(1.0),
            "dS/du[{v}]: {fd} vs {}",
            q.variables[v]
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn burgers_ec_flux(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        check_ec(Equation::Burgers1d, FluxKind::EcBurgers, s(a), s(b))?;
    }

    #[test]
    fn kpp_ec_flux(a in -1.0f64..12.0, b in -1.0f64..12.0) {
        check_ec(Equation::Kpp2d, FluxKind::EcKpp, s(a), s(b))?;
    }

    #[test]
    fn euler1d_ec_fluxes(ul in euler1d_state(), ur in euler1d_state()) {
        check_ec(E1, FluxKind::EcRanocha, ul, ur)?;
        check_ec(E1, FluxKind::EcChandrashekar, ul, ur)?;
    }

    #[test]
    fn euler2d_ec_fluxes(ul in euler2d_state(), ur in euler2d_state()) {
        check_ec(E2, FluxKind::EcRanocha, ul, ur)?;
        check_ec(E2, FluxKind::EcChandrashekar, ul, ur)?;
    }

    #[test]
    fn euler_nearby_states(ul in euler2d_state(), eps in -1e-6f64..1e-6) {
        let mut ur = ul;
        ur[0] *= 1.0 + eps;
        ur[3] *= 1.0 - 0.5 * eps;
        check_ec(E2, FluxKind::EcRanocha, ul, ur)?;
        check_ec(E2, FluxKind::EcChandrashekar, ul, ur)?;
    }

    #[test]
    fn entropy_pairs(u1 in euler1d_state(), u2 in euler2d_state(), a in -4.0f64..4.0) {
        check_entropy_pair(E1, u1)?;
        check_entropy_pair(E2, u2)?;
        check_entropy_pair(Equation::Burgers1d, s(a))?;
        check_entropy_pair(Equation::Kpp2d, s(a))?;
    }

    #[test]
    fn primitive_round_trip(u in euler2d_state(), w in euler1d_state()) {
        for (eq, st) in [(E2, u), (E1, w)] {
            let back = eq.primitive_to_conserved(&eq.conserved_to_primitive(&st).unwrap()).unwrap();
            for v in 0..eq.nvars() {
                prop_assert!((back[v] - st[v]).abs() <= 1e-14 * st[v].abs().max(1.0));
            }
        }
    }

    #[test]
    fn godunov_matches_extremum_oracle(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = Equation::Burgers1d.surface_flux(FluxKind::GodunovBurgers, &s(a), &s(b), 0).unwrap()[0];
        // brute-force extremum of u²/2 over the interval between the states
        let n = 2000;
        let (lo, hi) = (a.min(b), a.max(b));
        let samples = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).chain([0.0].into_iter().filter(|z| lo <= *z && *z <= hi));
        let vals: Vec<f64> = samples.map(|u| 0.5 * u * u).collect();
        let oracle = if a <= b {
            vals.iter().cloned().fold(f64::INFINITY, f64::min)
        } else {
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        };
        prop_assert!((f - oracle).abs() <= 1e-12);
    }

    #[test]
    fn surface_fluxes_consistent(u in euler2d_state(), w in euler1d_state()) {
        for kind in [FluxKind::Rusanov, FluxKind::HllDavis, FluxKind::Hllc] {
            for (eq, st) in [(E2, u), (E1, w)] {
                for dir in 0..eq.ndims() {
                    let f = eq.surface_flux(kind, &st, &st, dir).unwrap();
                    let fp = eq.physical_flux(&st, dir).unwrap();
                    for v in 0..eq.nvars() {
                        prop_assert!(close(f[v], fp[v], 1e-13));
                    }
                }
            }
        }
    }
}
