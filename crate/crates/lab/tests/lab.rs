use mv3::{initialize, KeyMaterial, StreamSession};
use num_integer::gcd;
use mv3_lab::graph::{build_nonlinear_graph, build_squaring_graph};
use mv3_lab::sequencing::{min_pair_weight, SearchConfig, SequencingScheme};
use mv3_lab::spectrum::{explicit_census, fit_gap_constant, spectrum};
use mv3_lab::stats::{stat_tests, StatTest};
use mv3_lab::walk::{gillman_bound, mixing_time, visit_count_experiment, MixingOptions, Start, WalkExperiment};

#[test]
fn nonlinear_spectra_contain_every_explicit_eigenvalue() {
    let mut censuses = Vec::new();
    for n in [64u64, 128, 256] {
        for r in [3u64, 5] {
            let g = build_nonlinear_graph(n, r).unwrap();
            let s = spectrum(&g).unwrap();
            assert!((s.sum() - g.trace() as f64).abs() < 1e-6);
            let c = explicit_census(&s, n, r, 1e-9);
            assert!(c.complete(), "n={n} r={r} missing {:?}", c.missing);
            assert_eq!(c.explicit_is_plus_minus_four(), gcd(r - 1, n) == 2);
            censuses.push(c);
        }
    }
    let c = fit_gap_constant(&censuses);
    assert!(c > 0.0);
    assert!(censuses.iter().all(|x| x.check_gap_bound(c)));
}

#[test]
fn squaring_walk_mixes_lazily() {
    let g = build_squaring_graph(8).unwrap();
    let s = spectrum(&g).unwrap();
    // Connected and bipartite: ±4 once each, then a real gap.
    assert_eq!(s.multiplicity(4.0, 1e-9), 1);
    assert_eq!(s.multiplicity(-4.0, 1e-9), 1);
    assert!(s.eigenvalues()[2].abs() < 3.9);
    assert!(mixing_time(&g, 0, 0.01, MixingOptions { lazy: false, max_steps: 2000 }).is_err());
    let r = mixing_time(&g, 0, 0.01, MixingOptions::default()).unwrap();
    assert!(r.steps > 0 && r.tv < 0.01);
}

#[test]
fn visit_tails_respect_the_bound_on_a_small_graph() {
    let g = build_nonlinear_graph(128, 3).unwrap();
    let eps = spectrum(&g).unwrap().epsilon();
    assert!(eps > 0.0 && eps < 1.0);
    let exp = WalkExperiment { graph: &g, start: Start::Uniform, steps: 500, target: (0..32).collect(), trials: 1000, seed: 3 };
    let rep = visit_count_experiment(&exp, eps, &[20.0, 40.0, 80.0]).unwrap();
    for row in &rep.rows {
        assert!(row.holds(), "{row:?}");
        assert_eq!(row.bound, gillman_bound(row.x, eps, 500));
    }
}

#[test]
fn cipher_scheme_relations_verify() {
    let s = SequencingScheme::mv3();
    let r = min_pair_weight(&s, SearchConfig { max_b: 3, horizon: 4 * 32 + 96 }).unwrap();
    let w = r.witness.unwrap();
    assert!(w.verify(&s));
    assert_eq!(r.a_min, Some(12));
}

#[test]
fn keystream_passes_light_statistics() {
    let km = KeyMaterial::from_hex("00112233445566778899aabbccddeeff01234567", "89abcdef0011223344556677deadbeefcafef00d").unwrap();
    let ks = StreamSession::new(&km).keystream_bytes(1 << 21);
    let r = stat_tests(&ks, &StatTest::ALL).unwrap();
    assert!(r.pass(), "{r:?}");
    let (mut state, _) = initialize(&km);
    let mut words = vec![0u32; 1 << 12];
    state.fill_words(&mut words).unwrap();
    let first: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
    assert_eq!(&ks[..first.len()], &first[..]);
}
