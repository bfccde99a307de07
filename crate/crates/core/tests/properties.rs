use elastica::asymptotics::{
    counting, fit_two_term, heat_trace, heat_trace_stieltjes, log_grid, remainder_series,
    CountingSeries, FitModel,
};
use elastica::disk::modes_for_k;
use elastica::elastic::{
    b_liu, rayleigh_cubic, rayleigh_root, weyl_a, BoundaryCondition, Domain, LameParams,
};
use elastica::spectrum::{Spectrum, SpectrumEntry, SpectrumMethod};
use elastica::symbol::boundary_layer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lame() -> impl Strategy<Value = LameParams> {
    (0.05f64..20.0, -1.0f64..5.0).prop_map(|(mu, r)| LameParams::new(mu, r * mu).unwrap())
}

fn spectrum_strategy() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((0.0f64..500.0, 1u32..5), 1..60).prop_map(|raw| {
        let entries = raw
            .into_iter()
            .map(|(value, multiplicity)| SpectrumEntry {
                value: value + 1e-3,
                multiplicity,
                tag: "k1".into(),
            })
            .collect();
        Spectrum::new(
            Domain::UnitDisk,
            BoundaryCondition::Dirichlet,
            LameParams::new(1.3, 0.2).unwrap(),
            600.0,
            SpectrumMethod::Fem,
            entries,
        )
        .unwrap()
        .with_meta("h", 0.03125)
    })
}

proptest! {
    #[test]
    fn liu_coefficients_cancel(p in lame(), n in 2u32..=6) {
        let m = b_liu(&p, n, BoundaryCondition::Dirichlet).unwrap();
        let f = b_liu(&p, n, BoundaryCondition::Free).unwrap();
        prop_assert_eq!(m + f, 0.0);
    }

    #[test]
    fn weyl_a_homogeneity(p in lame(), n in 2u32..=6, c in 0.1f64..10.0) {
        let a = weyl_a(&p, n).unwrap();
        let b = weyl_a(&p.scaled(c).unwrap(), n).unwrap();
        prop_assert!((b - a * c.powf(-(n as f64) / 2.0)).abs() <= 1e-13 * b);
    }

    #[test]
    fn rayleigh_root_is_a_root(alpha in 1e-6f64..1.0) {
        let r = rayleigh_root(alpha).unwrap();
        prop_assert!(r.w1 > 0.0 && r.w1 < 1.0);
        prop_assert!(rayleigh_cubic(alpha, r.w1).abs() <= 1e-12);
    }

    #[test]
    fn csv_round_trip_is_byte_identical(s in spectrum_strategy()) {
        let text = s.to_csv_string();
        let back = Spectrum::read_csv(text.as_bytes()).unwrap();
        prop_assert_eq!(back.to_csv_string(), text);
        prop_assert_eq!(back.total_count(), s.total_count());
    }

    #[test]
    fn counting_is_monotone(s in spectrum_strategy()) {
        let grid = log_grid(0.01, 600.0, 200);
        let c = counting(&s, &grid).unwrap();
        prop_assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(c.values.last().copied().unwrap() <= s.total_count() as f64);
    }

    #[test]
    fn heat_trace_decreasing_and_log_convex(s in spectrum_strategy()) {
        let t0 = elastica::asymptotics::min_admissible_t(&s).unwrap();
        let grid = log_grid(t0, 4.0 * t0, 30);
        let h = heat_trace(&s, &grid).unwrap();
        prop_assert!(h.z.windows(2).all(|w| w[1] <= w[0]));
        // log-convexity on a log grid: check midpoint inequality on equal-ratio triples
        for w in h.z.windows(3).zip(h.t.windows(3)) {
            let (z, t) = w;
            let lhs = z[1].ln();
            let theta = (t[2] - t[1]) / (t[2] - t[0]);
            let rhs = theta * z[0].ln() + (1.0 - theta) * z[2].ln();
            prop_assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn stieltjes_consistency(s in spectrum_strategy(), t in 0.05f64..2.0) {
        let a: f64 = s.entries().iter().map(|e| e.multiplicity as f64 * (-t * e.value).exp()).sum();
        let b = heat_trace_stieltjes(&s, t);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn remainder_recovers_planted(a in 0.01f64..1.0, b in -1.0f64..1.0) {
        let grid = log_grid(1.0, 1e5, 40);
        let dom = Domain::UnitDisk;
        let series = CountingSeries::synthetic(&grid, a * dom.volume(), b * dom.boundary_length());
        let r = remainder_series(&series, a, dom);
        for (x, y) in r.r.iter().zip(&r.r_bar) {
            prop_assert!((x - b).abs() <= 1e-12 && (y - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn heat_fit_recovers_planted(c0 in 0.1f64..10.0, c1 in -3.0f64..3.0, c2 in -1.0f64..1.0) {
        let pts: Vec<(f64, f64)> = log_grid(1e-4, 1e-3, 24)
            .into_iter()
            .map(|t| (t, c0 / t + c1 / t.sqrt() + c2))
            .collect();
        let f = fit_two_term(&pts, FitModel::Heat).unwrap();
        prop_assert!((f.estimates[0] - c0).abs() <= 1e-10 * c0.max(1.0));
        prop_assert!((f.estimates[1] - c1).abs() <= 1e-10 * c0.max(1.0));
    }

    #[test]
    fn boundary_tail_within_gaussian_bound(p in lame(), t in 1e-3f64..0.2, n in 2u32..=4) {
        let c = boundary_layer(t, &p, n, 0.5).unwrap();
        prop_assert!(c.gap.relative_gap <= 1e-9);
        prop_assert!(c.tail_within_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn disk_roots_scale_with_moduli(c in 0.2f64..5.0, k in 1u32..4) {
        let p = LameParams::new(1.0, 0.7).unwrap();
        let q = p.scaled(c).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Free] {
            let a = modes_for_k(k, &p, bc, 150.0).unwrap();
            let b = modes_for_k(k, &q, bc, 150.0 * c).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((y.lambda_ev - c * x.lambda_ev).abs() <= 1e-10 * y.lambda_ev);
            }
        }
    }
}

#[test]
fn heat_fit_tolerates_small_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let pts: Vec<(f64, f64)> = log_grid(1e-3, 1.0, 24)
            .into_iter()
            .map(|t| (t, (3.0 / t + 0.5 / t.sqrt()) * (1.0 + 1e-4 * rng.gen_range(-1.0..1.0))))
            .collect();
        let f = fit_two_term(&pts, FitModel::Heat).unwrap();
        assert!((f.estimates[0] - 3.0).abs() <= 1e-3, "{f:?}");
        assert!((f.estimates[1] - 0.5).abs() <= 1e-3, "{f:?}");
    }
}

#[test]
fn doubling_the_cutoff_stays_within_tail_bound() {
    use elastica::asymptotics::min_admissible_t;
    use elastica::fem::analytic_decoupled_spectrum;
    let small = analytic_decoupled_spectrum(Domain::UnitSquare, BoundaryCondition::Dirichlet, 1.0, 5e3).unwrap();
    let big = analytic_decoupled_spectrum(Domain::UnitSquare, BoundaryCondition::Dirichlet, 1.0, 1e4).unwrap();
    let t0 = min_admissible_t(&small).unwrap();
    let grid = log_grid(t0, 10.0 * t0, 12);
    let a = heat_trace(&small, &grid).unwrap();
    let b = heat_trace(&big, &grid).unwrap();
    for i in 0..grid.len() {
        assert!((b.z[i] - a.z[i]).abs() <= a.tail_bound[i]);
    }
}
