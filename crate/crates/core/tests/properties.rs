use fdsic::bias::{analytic_bias, monte_carlo_bias, BiasSignal, SignalMoments};
use fdsic::cancel::{build_augmented_matrix, estimate_linear_ls, estimate_wl_ls, ChannelEstimate};
use fdsic::impairments::pa::calibrate_pa;
use fdsic::signal::awgn;
use fdsic::units::dbm_to_w;
use fdsic::{ComplexBasebandSignal, Fir, RngSeed, SystemParameters, C64};
use nalgebra::DVector;
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn vec_c(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(cplx(), n)
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(p, q)| (p - q).norm() <= tol * (1.0 + q.norm()))
}

fn signal(v: Vec<C64>) -> ComplexBasebandSignal {
    ComplexBasebandSignal::new(v, 1.0).unwrap()
}

fn truth(h1: Vec<C64>, h2: Vec<C64>) -> ChannelEstimate {
    ChannelEstimate::new(h1, h2, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filtering_is_linear(taps in vec_c(1..8), lead in 0usize..4, x in vec_c(40..41), y in vec_c(40..41), a in cplx(), b in cplx()) {
        let lead = lead % taps.len();
        let h = Fir::with_lead(taps, lead);
        let mix: Vec<C64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = h.apply(&mix);
        let rhs: Vec<C64> = h.apply(&x).iter().zip(h.apply(&y)).map(|(p, q)| a * p + b * q).collect();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn conjugation_commutes_with_filtering(taps in vec_c(1..8), x in vec_c(30..31)) {
        let h = Fir::causal(taps);
        let xc: Vec<C64> = x.iter().map(|v| v.conj()).collect();
        let lhs = h.conj().apply(&xc);
        let rhs: Vec<C64> = h.apply(&x).iter().map(|v| v.conj()).collect();
        prop_assert!(close(&lhs, &rhs, 1e-12));
        let s = signal(x);
        prop_assert!((s.conj().power() - s.power()).abs() <= 1e-15 * (1.0 + s.power()));
    }

    #[test]
    fn conjugate_block_mirrors_direct_block(x in vec_c(20..60), taps in 1usize..5, pre in 0usize..3) {
        prop_assume!(pre < taps && x.len() > 2 * taps + pre);
        let s = signal(x);
        let m = build_augmented_matrix(&s, &s, taps, pre).unwrap();
        for c in 0..taps {
            for r in 0..m.data.nrows() {
                prop_assert_eq!(m.data[(r, c + taps)], m.data[(r, c)].conj());
            }
        }
    }

    #[test]
    fn wl_residual_is_orthogonal_to_data(seed in any::<u64>(), taps in 1usize..6) {
        let x = awgn(1.0, 300, 1.0, RngSeed(seed)).unwrap();
        let y = awgn(1.0, 300, 1.0, RngSeed(seed ^ 1)).unwrap();
        let m = build_augmented_matrix(&x, &y, taps, 0).unwrap();
        let h = DVector::from_vec(estimate_wl_ls(&m).unwrap().stacked());
        let r = &m.reference - &m.data * h;
        for c in 0..m.data.ncols() {
            let col = m.data.column(c);
            prop_assert!(col.dotc(&r).norm() <= 1e-9 * col.norm() * r.norm());
        }
    }

    #[test]
    fn noiseless_wl_data_is_recovered(h1 in vec_c(3..4), h2 in vec_c(3..4), seed in any::<u64>()) {
        let t = truth(h1, h2);
        let x = awgn(1.0, 200, 1.0, RngSeed(seed)).unwrap();
        let m = build_augmented_matrix(&x, &t.predict(&x), 3, 1).unwrap();
        prop_assert!(close(&estimate_wl_ls(&m).unwrap().stacked(), &t.stacked(), 1e-9));
    }

    #[test]
    fn wl_never_fits_worse_than_linear(seed in any::<u64>(), g in cplx()) {
        let x = awgn(1.0, 200, 1.0, RngSeed(seed)).unwrap();
        let y = x.add(&x.conj().scaled(g * 0.1)).unwrap().add(&awgn(0.01, 200, 1.0, RngSeed(seed ^ 7)).unwrap()).unwrap();
        let m = build_augmented_matrix(&x, &y, 2, 0).unwrap();
        let res = |e: &ChannelEstimate| (&m.reference - &m.data * DVector::from_vec(e.stacked())).norm();
        prop_assert!(res(&estimate_wl_ls(&m).unwrap()) <= res(&estimate_linear_ls(&m).unwrap()) + 1e-9);
    }

    #[test]
    fn derived_seeds_do_not_collide(base in any::<u64>(), s in 0u64..16, i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(RngSeed(base).derive(s, i), RngSeed(base).derive(s, j));
        prop_assert_ne!(RngSeed(base).derive(s, i), RngSeed(base).derive(s + 1, i));
    }

    #[test]
    fn bias_scales_with_third_order_coefficient(iip3 in 0.0..30.0f64, tx in -5.0..25.0f64) {
        let p = SystemParameters { pa_iip3: iip3, ..SystemParameters::default().with_tx_power(tx) };
        let q = SystemParameters { pa_iip3: iip3 + 6.0, ..p.clone() };
        let m = SignalMoments::gaussian(dbm_to_w(p.dac_power_dbm()));
        let (a, b) = (analytic_bias(&p, m).unwrap(), analytic_bias(&q, m).unwrap());
        let ka = calibrate_pa(p.pa_gain, p.pa_iip3, None).unwrap().alpha1;
        let kb = calibrate_pa(q.pa_gain, q.pa_iip3, None).unwrap().alpha1;
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u / ka - v / kb).norm() <= 1e-9 * (u / ka).norm());
        }
    }
}

// Mean coefficient error over independent noisy fits.
fn coefficient_error(n: usize, trials: u64) -> f64 {
    let t = truth(
        vec![C64::new(0.1, 0.0), C64::new(1.0, 0.2), C64::new(-0.2, 0.1)],
        vec![C64::new(0.0, 0.01), C64::new(0.05, 0.0), C64::new(0.01, -0.01)],
    );
    let total: f64 = (0..trials)
        .map(|k| {
            let seed = RngSeed(99).derive(n as u64, k);
            let x = awgn(1.0, n, 1.0, seed.derive(0, 0)).unwrap();
            let y = t.predict(&x).add(&awgn(0.01, n, 1.0, seed.derive(1, 0)).unwrap()).unwrap();
            let e = estimate_wl_ls(&build_augmented_matrix(&x, &y, 3, 1).unwrap()).unwrap();
            e.stacked().iter().zip(t.stacked()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        })
        .sum();
    total / trials as f64
}

#[test]
fn estimation_error_falls_as_inverse_root_n() {
    let ns = [100usize, 400, 1600, 6400];
    let errs: Vec<f64> = ns.iter().map(|&n| coefficient_error(n, 200)).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    let lx: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / 4.0, ly.iter().sum::<f64>() / 4.0);
    let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
}

#[test]
fn bias_does_not_depend_on_training_length() {
    let p = SystemParameters::default();
    let short = monte_carlo_bias(&p, 1000, 400, RngSeed(31), BiasSignal::Gaussian).unwrap();
    let long = monte_carlo_bias(&p, 8000, 400, RngSeed(32), BiasSignal::Gaussian).unwrap();
    for i in 0..2 {
        let d = (short.empirical_mean_error[i] - long.empirical_mean_error[i]).norm();
        let se = short.standard_error[i].hypot(long.standard_error[i]);
        assert!(d <= 4.0 * se, "component {i}: {d:e} vs se {se:e}");
    }
    assert!(short.agreement < 0.15 && long.agreement < 0.1);
}
