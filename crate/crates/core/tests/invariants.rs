mod common;

use damped_spectra::modal::modal_eigenvalues;
use damped_spectra::simulate::{propagate, uniform_times};
use damped_spectra::witness::witness_polyopt;
use damped_spectra::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = SystemParams> {
    (0.5f64..4.0, 0.5f64..4.0, 0.1f64..10.0, -1.0f64..=1.0)
        .prop_filter("distinct stiffnesses", |(a, b, _, _)| (a - b).abs() > 1e-3)
        .prop_map(|(a, b, g, t)| SystemParams::new(a, b, g, t).unwrap())
}

fn state_strategy() -> impl Strategy<Value = [f64; 8]> {
    prop::array::uniform8(-1.0f64..1.0)
}

fn state(omega: f64, x: [f64; 8]) -> ModalState {
    let c = |k: usize| Complex64::new(x[2 * k], x[2 * k + 1]);
    ModalState::new(omega, c(0), c(1), c(2), c(3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn modal_norm_matches_nalgebra(p in params_strategy(), lw in 0.0f64..6.0, ll in -1.0f64..3.0) {
        let omega = 10f64.powf(lw);
        let lambda = 10f64.powf(ll);
        let got = modal_resolvent_norm(&p, omega, lambda).unwrap();
        let want = common::oracle_modal_norm(&p, omega, lambda);
        prop_assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn modal_norm_is_even_in_lambda(p in params_strategy(), lw in 0.0f64..6.0, ll in -1.0f64..3.0) {
        let omega = 10f64.powf(lw);
        let lambda = 10f64.powf(ll);
        let plus = modal_resolvent_norm(&p, omega, lambda).unwrap();
        let minus = modal_resolvent_norm(&p, omega, -lambda).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-12 * plus);
    }

    #[test]
    fn damped_spectrum_in_closed_left_half_plane(p in params_strategy(), lw in 0.0f64..6.0) {
        let omega = 10f64.powf(lw);
        let scale = (p.a().max(p.b()) * omega).sqrt() + p.damping(omega);
        for ev in modal_eigenvalues(&p, omega).unwrap() {
            prop_assert!(ev.re <= 1e-10 * scale, "{ev}");
        }
    }

    #[test]
    fn dissipativity_form_matches_inner_product(p in params_strategy(), lw in 0.0f64..4.0, x in state_strategy()) {
        let omega = 10f64.powf(lw);
        let s = state(omega, x);
        let az = damped_spectra::modal::apply_generator(&p, &s).unwrap();
        // Re <A Z, Z> in the energy inner product.
        let inner = (p.a() * omega * az.u * s.u.conj()
            + az.v * s.v.conj()
            + p.b() * omega * az.w * s.w.conj()
            + az.z * s.z.conj())
        .re;
        let form = dissipativity_form(&p, &s).unwrap();
        let scale = s.hnorm_sq(&p) * (1.0 + p.damping(omega) + (p.a().max(p.b()) * omega).sqrt());
        prop_assert!((inner - form).abs() <= 1e-12 * scale, "{inner} vs {form}");
        prop_assert!(form <= 0.0);
    }

    #[test]
    fn solve_inverts_shift(p in params_strategy(), lw in 0.0f64..4.0, ll in -1.0f64..2.0, x in state_strategy()) {
        let omega = 10f64.powf(lw);
        let lambda = 10f64.powf(ll);
        let rhs = state(omega, x);
        let z = modal_solve(&p, omega, lambda, &rhs).unwrap();
        let back = damped_spectra::modal::apply_shifted(&p, lambda, &z).unwrap();
        let r = modal_resolvent_norm(&p, omega, lambda).unwrap();
        let diff = ModalState::new(omega, back.u - rhs.u, back.v - rhs.v, back.w - rhs.w, back.z - rhs.z);
        prop_assert!(diff.hnorm(&p) <= 1e-10 * (1.0 + r) * rhs.hnorm(&p));
        // ||z|| <= R ||rhs||.
        prop_assert!(z.hnorm(&p) <= r * rhs.hnorm(&p) * (1.0 + 1e-10));
    }

    #[test]
    fn window_matches_exhaustive_on_explicit_spectrum(
        p in params_strategy(),
        mut values in prop::collection::vec(0.5f64..5000.0, 5..60),
        lambda in 0.5f64..60.0,
    ) {
        values.sort_by(f64::total_cmp);
        values.dedup();
        let s = SpectrumModel::explicit(values.clone()).unwrap();
        let g = global_resolvent_norm(&p, &s, lambda, &Window::default()).unwrap();
        let (want, _) = common::exhaustive_max(&p, &s, lambda, values.len());
        prop_assert!((g.norm - want).abs() <= 1e-12 * want, "{} vs {want}", g.norm);
    }

    #[test]
    fn polyopt_witness_certifies(p in params_strategy(), lw in 1.0f64..8.0) {
        let q = p.with_theta(p.theta().min(0.5)).unwrap();
        let w = witness_polyopt(&q, 10f64.powf(lw)).unwrap();
        prop_assert!(w.hnorm_error <= 1e-10);
        prop_assert!(w.residual_disagreement() <= 1e-9);
        let bound = certify_lower_bound(&q, &w).unwrap();
        prop_assert!(bound > 0.0);
    }

    #[test]
    fn evolution_never_increases_energy(p in params_strategy(), count in 1usize..12, t in 0.01f64..5.0) {
        let s = SpectrumModel::power_law(1.0, 2.0).unwrap();
        let data = InitialData::smooth(&p, &s, count).unwrap();
        let trace = evolve(&p, &data, &uniform_times(t, 6)).unwrap();
        for w in trace.total_norm.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn propagation_is_a_semigroup(p in params_strategy(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let s = SpectrumModel::power_law(1.0, 2.0).unwrap();
        let data = InitialData::smooth(&p, &s, 4).unwrap();
        let direct = propagate(&p, &data, t1 + t2).unwrap();
        let stepped = propagate(&p, &propagate(&p, &data, t1).unwrap(), t2).unwrap();
        let scale = data.hnorm(&p);
        for ((_, x), (_, y)) in direct.modes.iter().zip(&stepped.modes) {
            let d = ModalState::new(x.omega, x.u - y.u, x.v - y.v, x.w - y.w, x.z - y.z);
            prop_assert!(d.hnorm(&p) <= 1e-11 * scale);
        }
    }
}

#[test]
fn global_norm_dominates_every_mode() {
    let p = SystemParams::new(1.0, 3.0, 0.5, 0.3).unwrap();
    let s = SpectrumModel::power_law(1.0, 2.0).unwrap();
    for lambda in [0.3, 2.0, 17.0, 90.0] {
        let g = global_resolvent_norm(&p, &s, lambda, &Window::default()).unwrap();
        let (want, n) = common::exhaustive_max(&p, &s, lambda, 500);
        assert_eq!(g.norm, want);
        assert_eq!(g.mode_index, n);
    }
}
