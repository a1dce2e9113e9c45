use proptest::prelude::*;
use quatfreq_core::complex::clarke;
use quatfreq_core::signal::{
    add_noise, empirical_snr_db, generate, ingest_csv, preset, read_frames, simulate, write_frames, ScenarioSpec,
    ThreePhaseFrame, PRESETS,
};
use quatfreq_core::Error;

fn frame_strategy() -> impl Strategy<Value = Vec<ThreePhaseFrame>> {
    prop::collection::vec([-1e3..1e3f64, -1e3..1e3f64, -1e3..1e3f64], 0..60).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(n, [va, vb, vc])| ThreePhaseFrame { n: n as u64, t: n as f64 * 1e-3, va, vb, vc })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn csv_round_trip_is_bit_exact(frames in frame_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frames.csv");
        write_frames(std::fs::File::create(&path).unwrap(), &frames).unwrap();
        let back = ingest_csv(&path).unwrap();
        prop_assert_eq!(&back.frames, &frames);
        if frames.len() >= 2 {
            prop_assert!((back.fs.unwrap() - 1000.0).abs() < 1e-6);
        }
    }

    #[test]
    fn noise_is_reproducible_per_seed(seed in 0u64..1000, snr in 0.0..60.0f64) {
        let clean = generate(&preset("balanced").unwrap()).unwrap();
        let a = add_noise(&clean, snr, seed).unwrap();
        prop_assert_eq!(&a, &add_noise(&clean, snr, seed).unwrap());
        prop_assert_ne!(&a, &add_noise(&clean, snr, seed + 1).unwrap());
    }
}

#[test]
fn balanced_presets_have_no_zero_sequence() {
    let mut spec = preset("balanced").unwrap();
    spec.snr_db = None;
    for f in generate(&spec).unwrap() {
        let (v0, _, _) = clarke(f.va, f.vb, f.vc);
        assert!(v0.abs() < 1e-12);
    }
}

#[test]
fn empirical_snr_matches_request() {
    let mut spec = preset("sag").unwrap();
    spec.duration = 12.0;
    spec.snr_db = None;
    let clean = generate(&spec).unwrap();
    for snr in [10.0, 40.0] {
        let noisy = add_noise(&clean, snr, 3).unwrap();
        let got = empirical_snr_db(&clean, &noisy);
        assert!((got - snr).abs() < 0.5, "{snr} dB requested, {got} dB measured");
    }
}

#[test]
fn scenarios_survive_toml() {
    for name in PRESETS {
        let spec = preset(name).unwrap();
        let text = toml::to_string(&spec).unwrap();
        let back: ScenarioSpec = toml::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(simulate(&back).unwrap(), simulate(&spec).unwrap());
    }
}

#[test]
fn handwritten_scenario_parses() {
    let spec: ScenarioSpec = toml::from_str(
        r#"
        fs = 2000.0
        duration = 0.5
        seed = 9
        [[segments]]
        start_t = 0.0
        V_a = 1.0
        V_b = 0.9
        V_c = 1.1
        phi_a = 0.0
        phi_b = 0.1
        phi_c = -0.1
        freq = 50.0
        [[segments]]
        start_t = 0.25
        V_a = 1.0
        V_b = 1.0
        V_c = 1.0
        phi_a = 0.0
        phi_b = 0.0
        phi_c = 0.0
        freq = { f0 = 50.0, slope = 2.0 }
        "#,
    )
    .unwrap();
    assert_eq!(spec.snr_db, None);
    assert_eq!(generate(&spec).unwrap().len(), 1000);
}

#[test]
fn aliasing_scenarios_are_rejected() {
    let mut spec = preset("balanced").unwrap();
    spec.fs = 90.0;
    assert!(generate(&spec).is_err());
}

#[test]
fn malformed_streams_report_the_line() {
    let text = "t,va,vb,vc\n0,1,2,3\n0.001,1,2\n";
    match read_frames(text.as_bytes()) {
        Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let text = "t,va,vb,vc\n0.002,1,2,3\n0.001,1,2,3\n";
    assert!(matches!(read_frames(text.as_bytes()), Err(Error::NonMonotoneTime { line: 3 })));
}
