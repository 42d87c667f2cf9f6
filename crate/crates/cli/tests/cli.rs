use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scs_core::dataset::{load_mask, save_image, save_mask};
use scs_core::phantom::{render, PhantomConfig};
use scs_core::BinaryMask;

fn scs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scs")).args(args).output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write_phantom(dir: &Path, name: &str, seed: u64) -> BinaryMask {
    let mut cfg = PhantomConfig::plain(240, 200, (70.0, 50.0));
    cfg.noise_sigma = 3.0;
    let p = render(&cfg, seed);
    save_image(&p.image, dir.join(name)).unwrap();
    p.truth
}

#[test]
fn segment_writes_outputs_at_input_resolution() {
    let dir = tempfile::tempdir().unwrap();
    write_phantom(dir.path(), "lesion.png", 1);
    let out = dir.path().join("out");
    let img = dir.path().join("lesion.png");
    let run = scs(&["segment", img.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let mask = load_mask(out.join("lesion_mask.png")).unwrap();
    assert_eq!((mask.width(), mask.height()), (240, 200));
    assert!(out.join("lesion_boundary.png").exists());
    let report = fs::read_to_string(out.join("lesion_report.txt")).unwrap();
    assert!(report.contains("low_confidence: false"));
    assert!(report.contains("stage binarize:"));

    let first = fs::read(out.join("lesion_mask.png")).unwrap();
    let again = scs(&["segment", img.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(fs::read(out.join("lesion_mask.png")).unwrap(), first);
}

#[test]
fn truncated_image_fails_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write_phantom(dir.path(), "whole.png", 2);
    let bytes = fs::read(dir.path().join("whole.png")).unwrap();
    let cut = dir.path().join("cut.png");
    fs::write(&cut, &bytes[..bytes.len() / 3]).unwrap();
    let out = dir.path().join("out");
    let run = scs(&["segment", cut.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!run.status.success());
    assert!(text(&run.stderr).contains("error"));
    assert!(!out.join("cut_mask.png").exists());
    assert!(!out.join("cut_boundary.png").exists());
}

#[test]
fn constant_image_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("flat.png");
    save_image(&scs_core::RgbImage::filled(64, 64, [200, 170, 150]).unwrap(), &img).unwrap();
    let run = scs(&["segment", img.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(run.status.success());
    assert!(text(&run.stderr).contains("warning"));
}

#[test]
fn eval_prints_all_nine_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let gt = BinaryMask::from_fn(10, 10, |_, c| c < 5);
    let pred = BinaryMask::from_fn(10, 10, |r, _| r < 5);
    let (gp, pp, cp) = (dir.path().join("gt.png"), dir.path().join("pred.png"), dir.path().join("comp.png"));
    save_mask(&gt, &gp).unwrap();
    save_mask(&pred, &pp).unwrap();
    save_mask(&gt.complement(), &cp).unwrap();

    let same = text(&scs(&["eval", gp.to_str().unwrap(), gp.to_str().unwrap()]).stdout);
    for line in ["ac=1.000000", "di=1.000000", "e=0.000000", "hd=0.000000", "xor=0.000000"] {
        assert!(same.lines().any(|l| l == line), "{same}");
    }

    let quad = text(&scs(&["eval", pp.to_str().unwrap(), gp.to_str().unwrap()]).stdout);
    let expected = [
        "ac=0.500000", "se=0.500000", "sp=0.500000", "di=0.500000", "ja=0.333333", "p=0.500000", "e=0.500000",
        "hd=0.666667", "xor=1.000000",
    ];
    assert_eq!(quad.lines().collect::<Vec<_>>(), expected);

    let comp = text(&scs(&["eval", cp.to_str().unwrap(), gp.to_str().unwrap()]).stdout);
    assert!(comp.lines().any(|l| l == "se=0.000000"));
    assert!(comp.lines().any(|l| l == "p=0.000000"));
}

#[test]
fn eval_dimension_mismatch_names_both_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    save_mask(&BinaryMask::empty(10, 10), &a).unwrap();
    save_mask(&BinaryMask::empty(12, 8), &b).unwrap();
    let run = scs(&["eval", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(!run.status.success());
    let err = text(&run.stderr);
    assert!(err.contains("10x10") && err.contains("12x8"), "{err}");
}

fn batch_tree(dir: &Path) {
    for (i, name) in ["ISIC_0000001", "ISIC_0000002", "ISIC_0000003"].iter().enumerate() {
        let truth = write_phantom(dir, &format!("{name}.png"), i as u64);
        save_mask(&truth, dir.join(format!("{name}_Segmentation.png"))).unwrap();
    }
}

fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn batch_with_perfect_predictions_has_ideal_means() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    batch_tree(&data);
    let first = dir.path().join("first");
    let run = scs(&["batch", data.to_str().unwrap(), "--layout", "isic", "--out", first.to_str().unwrap()]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    // predictions become the ground truth of a second run
    for id in ["ISIC_0000001", "ISIC_0000002", "ISIC_0000003"] {
        fs::copy(first.join(format!("{id}_mask.png")), data.join(format!("{id}_Segmentation.png"))).unwrap();
    }
    let second = dir.path().join("second");
    let run = scs(&["batch", data.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(run.status.success());
    let lines = csv_lines(&second.join("results.csv"));
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[4],
        "mean,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000,0.000000,0.000000,0.000000,,"
    );
}

#[test]
fn batch_survives_one_undecodable_image() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    batch_tree(&data);
    fs::write(data.join("ISIC_0000002.png"), b"not an image").unwrap();
    let out = dir.path().join("out");
    let run = scs(&["batch", data.to_str().unwrap(), "--out", out.to_str().unwrap(), "--overlay"]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let lines = csv_lines(&out.join("results.csv"));
    assert_eq!(lines[0], "id,ac,se,sp,di,ja,p,e,hd,xor,low_confidence,ms");
    assert!(lines[1].starts_with("ISIC_0000001,0."));
    assert_eq!(lines[2], "ISIC_0000002,,,,,,,,,,,");
    assert!(lines[3].starts_with("ISIC_0000003,0."));
    assert!(out.join("ISIC_0000001_overlay.png").exists());
}

#[test]
fn batch_fails_when_every_image_fails() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ISIC_0000001.png"), b"junk").unwrap();
    let out = dir.path().join("out");
    let run = scs(&["batch", dir.path().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!run.status.success());
}

#[test]
fn parallel_batch_matches_serial_batch() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    batch_tree(&data);
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let r = scs(&["batch", data.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(r.status.success());
        csv_lines(&out.join("results.csv"))
            .into_iter()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(run("serial", "1"), run("parallel", "3"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_phantom(dir.path(), "x.png", 4);
    let conf = dir.path().join("scs.conf");
    fs::write(&conf, "colnum = 1\n").unwrap();
    let img = dir.path().join("x.png");
    let bad = scs(&["segment", img.to_str().unwrap(), "--config", conf.to_str().unwrap()]);
    assert!(!bad.status.success());
    assert!(text(&bad.stderr).contains("colnum"));
    let out = dir.path().join("out");
    let good = scs(&[
        "segment",
        img.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
        "--colnum",
        "32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(good.status.success(), "{}", text(&good.stderr));
}

#[test]
fn unknown_strategy_lists_alternatives() {
    let dir = tempfile::tempdir().unwrap();
    write_phantom(dir.path(), "x.png", 5);
    let img = dir.path().join("x.png");
    let run = scs(&["segment", img.to_str().unwrap(), "--quantizer", "octree"]);
    assert!(!run.status.success());
    let err = text(&run.stderr);
    assert!(err.contains("octree") && err.contains("median-cut"), "{err}");
    let list = text(&scs(&["strategies"]).stdout);
    assert!(list.contains("som") && list.contains("frequency-tuned") && list.contains("band"));
}

#[test]
fn gen_phantoms_writes_an_isic_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ph");
    let run = scs(&["gen-phantoms", "--count", "2", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert!(out.join("ISIC_0000000.png").exists());
    assert!(out.join("ISIC_0000001_Segmentation.png").exists());
    let manifest = csv_lines(&out.join("manifest.csv"));
    assert_eq!(manifest[0], "id,image,gt");
    assert_eq!(manifest.len(), 3);
    let isic = scs_core::dataset::discover(&out, scs_core::dataset::Layout::Isic).unwrap();
    let csv = scs_core::dataset::discover(&out, scs_core::dataset::Layout::Csv).unwrap();
    assert_eq!(isic.pairs, csv.pairs);
}
