use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nfmb_core::io::{load_estimates, load_tensor};
use nfmb_core::scene::{demo_scene, load_scene, save_scene, scatterer_chain_paths};
use serde_json::Value;

fn nfmb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nfmb"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = nfmb(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: [&str; 4] = ["--subbands", "8", "--frames", "2"];

#[test]
fn scene_demo_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["scene-demo", "--out", "a.json"]);
    ok(dir.path(), &["scene-demo", "--out", "b.json"]);
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());
    let scene = load_scene(dir.path().join("a.json")).unwrap();
    assert_eq!((scene.walls.len(), scene.scatterers.len()), (4, 3));
    let paths = scatterer_chain_paths(&scene, 2).unwrap();
    assert!(paths.iter().any(|p| p.bounce_order == 2));
}

#[test]
fn synth_noise_handling() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["scene-demo", "--out", "scene.json"]);
    ok(d, &[&["synth", "--scene", "scene.json", "--out", "clean.nfmb"], &SMALL[..]].concat());
    let meta = json(d.join("clean.nfmb.json"));
    assert!(meta["snr_db"].is_null());
    assert!(load_tensor(&d.join("clean.nfmb")).unwrap().energy() > 0.0);

    for name in ["n1.nfmb", "n2.nfmb"] {
        ok(d, &[&["synth", "--scene", "scene.json", "--snr-db", "10", "--seed", "4", "--out", name], &SMALL[..]].concat());
    }
    assert_eq!(fs::read(d.join("n1.nfmb")).unwrap(), fs::read(d.join("n2.nfmb")).unwrap());
    assert_eq!(json(d.join("n1.nfmb.json"))["snr_db"], 10.0);

    let out = nfmb(d, &["synth", "--scene", "scene.json", "--snr-db", "10", "--out", "x.nfmb"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    assert!(!d.join("x.nfmb").exists());
}

#[test]
fn empty_scene_gives_zero_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let mut scene = demo_scene();
    scene.walls.clear();
    scene.scatterers.clear();
    save_scene(&scene, dir.path().join("empty.json")).unwrap();
    ok(dir.path(), &[&["synth", "--scene", "empty.json", "--out", "z.nfmb"], &SMALL[..]].concat());
    let z = load_tensor(&dir.path().join("z.nfmb")).unwrap();
    assert!(z.data.iter().all(|c| c.norm() == 0.0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("run")).unwrap();
    ok(d, &["scene-demo", "--out", "run/scene.json"]);
    let cfg = r#"{
        "scene": "scene.json",
        "waveform": {"carrier_hz": 30e9, "subband_hz": 10e6, "subbands": 4, "frame_s": 1e-3, "frames": 1},
        "snr_db": 5.0,
        "seed": 11,
        "outputs": {"tensor": "z.nfmb"}
    }"#;
    fs::write(d.join("run/cfg.json"), cfg).unwrap();
    ok(d, &["synth", "--config", "run/cfg.json", "--noiseless"]);
    let meta = json(d.join("run/z.nfmb.json"));
    assert!(meta["snr_db"].is_null());
    assert_eq!(meta["waveform"]["subbands"], 4);

    fs::write(d.join("run/bad.json"), r#"{"estimator": {"max_order": 3, "max_paths": 6, "gamma": 2.0, "max_iters": 1, "eps": 0.0, "refine_cycles": 1}}"#).unwrap();
    let out = nfmb(d, &["estimate", "--config", "run/bad.json", "--tensor", "run/z.nfmb", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimator.gamma"));
    assert!(!d.join("e.csv").exists());

    fs::write(d.join("run/typo.json"), r#"{"snr": 3}"#).unwrap();
    let out = nfmb(d, &["synth", "--config", "run/typo.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("snr"));
}

#[test]
fn missing_tensor_and_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = nfmb(d, &["estimate", "--tensor", "nope.nfmb", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.nfmb"));

    ok(d, &["scene-demo", "--out", "scene.json"]);
    ok(d, &[&["synth", "--scene", "scene.json", "--out", "z.nfmb"], &SMALL[..]].concat());
    let side = d.join("z.nfmb.json");
    let text = fs::read_to_string(&side).unwrap().replace("\"subbands\": 8", "\"subbands\": 9");
    fs::write(&side, text).unwrap();
    let out = nfmb(d, &["baseline", "--tensor", "z.nfmb", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!d.join("e.csv").exists());
}

#[test]
fn demo_estimate_recovers_scatterers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["scene-demo", "--out", "scene.json"]);
    ok(d, &[&["synth", "--scene", "scene.json", "--out", "z.nfmb"], &SMALL[..]].concat());
    ok(d, &["estimate", "--tensor", "z.nfmb", "--out", "est.csv", "--report", "report.json"]);
    ok(d, &["evaluate", "--estimates", "est.csv", "--scene", "scene.json", "--radius", "0.15", "--out", "m.json"]);

    let scene = load_scene(d.join("scene.json")).unwrap();
    let est = load_estimates(&d.join("est.csv")).unwrap();
    for s in &scene.scatterers {
        let hit = est.iter().flat_map(|p| &p.positions).any(|p| {
            (p.x - s.position.x).abs() <= 0.1 + 1e-9
                && (p.y - s.position.y).abs() <= 0.1 + 1e-9
                && (p.z - s.position.z).abs() <= 0.1 + 1e-9
        });
        assert!(hit, "no detection near {:?}", s.position);
    }
    let m = json(d.join("m.json"));
    assert_eq!(m["missed"], 0);
    let report = json(d.join("report.json"));
    assert_eq!(report["estimator"], "gm-sage");
    let trace = report["residual_trace"].as_array().unwrap();
    assert!(trace.windows(2).all(|w| w[1].as_f64().unwrap() <= w[0].as_f64().unwrap() * (1.0 + 1e-12)));
}

#[test]
fn baseline_ghosts_on_two_bounce_scene() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut scene = demo_scene();
    scene.walls.clear();
    // only the scatterer pairs contribute
    scene.bounce_scale = [0.0, 1.0, 0.0];
    save_scene(&scene, d.join("scene.json")).unwrap();
    ok(d, &[&["synth", "--scene", "scene.json", "--out", "z.nfmb"], &SMALL[..]].concat());
    for name in ["a.csv", "b.csv"] {
        ok(d, &["baseline", "--tensor", "z.nfmb", "--out", name, "--report", "r.json"]);
    }
    assert_eq!(fs::read(d.join("a.csv")).unwrap(), fs::read(d.join("b.csv")).unwrap());
    assert_eq!(json(d.join("r.json"))["estimator"], "one-bounce-baseline");
    ok(d, &["evaluate", "--estimates", "a.csv", "--scene", "scene.json", "--out", "m.json"]);
    assert!(json(d.join("m.json"))["ghosts"].as_u64().unwrap() >= 1);
}

#[test]
fn evaluate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["scene-demo", "--out", "scene.json"]);
    let header = "path_id,bounce,x_m,y_m,z_m,x2_m,y2_m,z2_m,amp_re,amp_im,velocity_mps,energy\n";
    let perfect = format!(
        "{header}0,1,0.5,1.2,0,,,,1,0,0,1\n1,2,1.4,0.6,0,1.2,1.7,0,1,0,0,1\n"
    );
    fs::write(d.join("perfect.csv"), perfect).unwrap();
    fs::write(d.join("empty.csv"), header).unwrap();
    fs::write(d.join("offset.csv"), format!("{header}0,1,0.57,1.2,0,,,,1,0,0,1\n")).unwrap();

    ok(d, &["evaluate", "--estimates", "perfect.csv", "--scene", "scene.json", "--out", "p.json"]);
    let m = json(d.join("p.json"));
    assert_eq!((m["true_positives"].as_u64(), m["ghosts"].as_u64()), (Some(3), Some(0)));
    assert!(m["rmse_m"].as_f64().unwrap() < 1e-12);

    ok(d, &["evaluate", "--estimates", "empty.csv", "--scene", "scene.json", "--out", "e.json"]);
    let m = json(d.join("e.json"));
    assert_eq!((m["true_positives"].as_u64(), m["ghosts"].as_u64()), (Some(0), Some(0)));
    assert!(m["rmse_m"].is_null());

    ok(d, &["evaluate", "--estimates", "offset.csv", "--scene", "scene.json", "--radius", "0.15", "--out", "o.json"]);
    let m = json(d.join("o.json"));
    assert_eq!(m["true_positives"], 1);
    assert!((m["rmse_m"].as_f64().unwrap() - 0.07).abs() < 1e-12);

    fs::write(d.join("bad.csv"), format!("{header}0,1,x,1.2,0,,,,1,0,0,1\n")).unwrap();
    let out = nfmb(d, &["evaluate", "--estimates", "bad.csv", "--scene", "scene.json", "--out", "b.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
}
