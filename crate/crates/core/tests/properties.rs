use anticritical::config::{parse_config, Config};
use anticritical::fock::Sector;
use anticritical::qfi::{qfi_analytic_squeezed, qfi_sandwich, qfi_spectral_sum};
use anticritical::spectral::{energy_gap, evolve, expectation, variance, Basis};
use anticritical::sweep::Grid;
use anticritical::{eigendecompose, solve, Error, Family, HermitianOperator, ModelSpec, QuantumState, Settings, C64};
use ndarray::{Array1, Array2};
use proptest::prelude::*;

fn hermitian(dim: usize, re: &[f64], im: &[f64], sparse: bool) -> HermitianOperator {
    let mut m = Array2::<C64>::zeros((dim, dim));
    let mut k = 0;
    for i in 0..dim {
        m[[i, i]] = C64::new(re[k], 0.0);
        k += 1;
        for j in (i + 1)..dim {
            // sparse: couple only indices of equal parity
            if sparse && (i + j) % 2 == 1 {
                continue;
            }
            let z = C64::new(re[k], im[k]);
            m[[i, j]] = z;
            m[[j, i]] = z.conj();
            k += 1;
        }
    }
    HermitianOperator::new(Basis::Plain { dim }, m).unwrap()
}

fn entries() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (2usize..12).prop_flat_map(|d| {
        let n = d * (d + 1) / 2;
        (
            Just(d),
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_is_accurate((d, re, im) in entries(), real in any::<bool>(), sparse in any::<bool>()) {
        let im: Vec<f64> = if real { vec![0.0; im.len()] } else { im };
        let h = hermitian(d, &re, &im, sparse);
        let spec = eigendecompose(&h).unwrap();
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(spec.max_residual(&h) <= spec.residual_bound());
        prop_assert!(spec.max_orthonormality_error() <= 1e-12);
        let trace: f64 = (0..d).map(|i| h.entries()[[i, i]].re).sum();
        let sum: f64 = spec.eigenvalues.iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-10);
    }

    #[test]
    fn gap_is_shift_invariant((d, re, im) in entries(), c in -50.0f64..50.0) {
        let h = hermitian(d, &re, &im, false);
        let a = energy_gap(&eigendecompose(&h).unwrap()).unwrap();
        let b = energy_gap(&eigendecompose(&h.shifted(c)).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn variance_nonnegative_and_evolution_unitary(
        (d, re, im) in entries(),
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12),
        t in -5.0f64..5.0,
    ) {
        let h = hermitian(d, &re, &im, false);
        let v = Array1::from_iter(amps.iter().take(d).map(|&(a, b)| C64::new(a, b)));
        prop_assume!(v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let s = QuantumState::normalized(h.basis(), v).unwrap();
        prop_assert!(variance(&h, &s).unwrap() >= 0.0);
        let e0 = expectation(&h, &s).unwrap();
        let u = evolve(&s, &h, t).unwrap();
        let norm: f64 = u.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
        // energy is conserved under its own evolution
        prop_assert!((expectation(&h, &u).unwrap() - e0).abs() <= 1e-10 * (1.0 + e0.abs()));
    }

    #[test]
    fn grid_parser_never_panics(s in ".{0,40}") {
        let _ = s.parse::<Grid>();
    }

    #[test]
    fn grid_round_trips(start in -100.0f64..100.0, span in 0.001f64..100.0, count in 2usize..500, up in any::<bool>()) {
        let stop = if up { start + span } else { start - span };
        let g = Grid::linear(start, stop, count).unwrap();
        let back: Grid = g.to_string().parse().unwrap();
        prop_assert_eq!(back.values(), g.values());
        let v = g.values();
        prop_assert_eq!(v.len(), count);
        let monotone = v.windows(2).all(|w| if up { w[0] < w[1] } else { w[0] > w[1] });
        prop_assert!(monotone);
    }

    #[test]
    fn config_parser_never_panics(s in "(?s).{0,200}") {
        let _ = parse_config(&s);
    }

    #[test]
    fn config_round_trips(omega in 0.01f64..100.0, x in 0.0f64..10.0, jobs in 0usize..64, fd in any::<bool>(), tol in 1e-15f64..1e-3) {
        let mut c = Config { omega, x: Some(x), jobs, fd_chain: fd, ..Default::default() };
        c.settings.truncation_tol = tol;
        let text = c.emit();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.emit(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn effective_spectral_matches_closed_form(x in 0.0f64..0.95, high in any::<bool>(), scale in 1.0f64..40.0) {
        let (sector, x) = if high { (Sector::High, x * scale) } else { (Sector::Low, x) };
        let s = Settings::default();
        let spec = ModelSpec::effective(sector, 1.0, x, &s).unwrap();
        let sol = solve(&spec, &s).unwrap();
        let q = qfi_spectral_sum(&sol, &s).unwrap().value;
        let a = qfi_analytic_squeezed(sector, 1.0, x).unwrap().value;
        prop_assert!((q - a).abs() <= 1e-6 * a.max(1e-12), "{} vs {}", q, a);
    }

    #[test]
    fn lmg_sandwich(n in 2usize..40, c in -2.0f64..2.0) {
        let s = Settings::default();
        let spec = ModelSpec::from_coupling(Family::Lmg, 1.0, None, c, Some(n), &s).unwrap();
        let sol = solve(&spec, &s).unwrap();
        match qfi_sandwich(&sol, &s) {
            Ok(b) => prop_assert!(b.lower <= b.value && b.value <= b.upper),
            Err(Error::DegeneracyGuard { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn tfim_is_even_in_g(half in 2usize..5, c in 0.0f64..3.0) {
        // g -> -g is a sublattice rotation, so the ring must be bipartite
        let n = 2 * half;
        let s = Settings::default();
        let gap = |g: f64| {
            let spec = ModelSpec::from_coupling(Family::Tfim, 1.0, None, g, Some(n), &s).unwrap();
            energy_gap(&solve(&spec, &s).unwrap().spectrum).unwrap()
        };
        prop_assert!((gap(c) - gap(-c)).abs() <= 1e-9);
    }
}
