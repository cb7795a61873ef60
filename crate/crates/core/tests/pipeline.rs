mod common;

use std::fs;
use std::path::Path;

use somqe::imaging::{resample, save_image, RasterImage, RegistrationTransform};
use somqe::pipeline::{
    correlate, emit_csv, emit_svg_plots, fit_trend, format_csv, load_manifest, run_frames, run_pipeline, AnchorPolicy,
    Frame, QeReport, QeRow, RunConfig,
};
use somqe::som::{pixel_vectors, PixelVector, SomGrid};
use somqe::stats::{Series, YearFix};

fn write_stack(dir: &Path, images: &[RasterImage]) -> std::path::PathBuf {
    let mut manifest = String::from("# roi: synthetic\n");
    for (i, img) in images.iter().enumerate() {
        let name = format!("frame{i:02}.ppm");
        save_image(img, dir.join(&name)).unwrap();
        manifest.push_str(&format!("{name}\tf{i}\t{}\n", 2000 + i));
    }
    let path = dir.join("stack.tsv");
    fs::write(&path, manifest).unwrap();
    path
}

fn shifted_stack() -> Vec<RasterImage> {
    let anchor = common::smooth_image(96, 96, 17);
    let mut images: Vec<_> = [(1.5, -0.5), (-2.0, 1.25), (0.5, 2.0)]
        .iter()
        .map(|&(dx, dy)| resample(&anchor, &RegistrationTransform::translation(dx, dy)))
        .collect();
    images.push(anchor);
    images
}

fn run_to_dir(manifest: &Path, out: &Path) {
    let report = run_pipeline(&load_manifest(manifest).unwrap(), &RunConfig::default()).unwrap();
    let (visitors, _) = common::demographics_table();
    let cov = Series::new("visitors", visitors.points()[..4].to_vec()).unwrap();
    let report = correlate(&report, &[cov]).unwrap();
    emit_csv(&report, out.join("report.csv")).unwrap();
    emit_svg_plots(&report, out).unwrap();
}

#[test]
fn file_based_run_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_stack(dir.path(), &shifted_stack());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        fs::create_dir_all(out).unwrap();
        run_to_dir(&manifest, out);
    }
    for name in ["report.csv", "qe_trend.svg", "qe_vs_visitors.svg"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let csv = fs::read_to_string(a.join("report.csv")).unwrap();
    assert!(csv.starts_with("# somqe report\n# roi: synthetic\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with('f')).count(), 4);
}

#[test]
fn report_rows_follow_manifest_and_anchor_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = load_manifest(write_stack(dir.path(), &shifted_stack())).unwrap();
    let report = run_pipeline(&manifest, &RunConfig::default()).unwrap();
    let labels: Vec<_> = report.rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["f0", "f1", "f2", "f3"]);
    assert!(report.transforms[3].1.is_identity());
    assert!((report.transforms[0].1.dx - 1.5).abs() < 0.1);
}

#[test]
fn svg_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_stack(dir.path(), &shifted_stack());
    run_to_dir(&manifest, dir.path());
    for name in ["qe_trend.svg", "qe_vs_visitors.svg"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(doc.descendants().any(|n| n.has_tag_name("line")));
        assert!(doc.descendants().filter(|n| n.has_tag_name("circle")).count() >= 4);
    }
}

#[test]
fn golden_three_point_report() {
    let rows = vec![
        QeRow {
            label: "a".into(),
            year: 2000.0,
            qe: 0.125,
            empty_models: 3,
        },
        QeRow {
            label: "b".into(),
            year: 2001.0,
            qe: 0.25,
            empty_models: 0,
        },
        QeRow {
            label: "c, late".into(),
            year: 2002.0,
            qe: 0.5,
            empty_models: 1,
        },
    ];
    let trend = fit_trend(&rows, YearFix::AsPrinted);
    let report = QeReport {
        roi_name: "golden".into(),
        rows,
        grid: SomGrid::new(1, 1, vec![PixelVector::new([0.0; 3]).unwrap()]).unwrap(),
        transforms: Vec::new(),
        trend,
        correlations: Vec::new(),
    };
    let golden = fs::read_to_string(common::golden_path("three_point_report.csv")).unwrap();
    assert_eq!(format_csv(&report), golden);
}

#[test]
fn growth_series_qe_strictly_increases() {
    let images = common::growth_series(10, 64, 64);
    let frames: Vec<Frame> = images
        .iter()
        .enumerate()
        .map(|(k, image)| Frame {
            label: format!("g{k}"),
            year: 2000.0 + k as f64,
            image: image.clone(),
        })
        .collect();
    let config = RunConfig {
        register: false,
        normalize: false,
        anchor: AnchorPolicy::Index(0),
        ..Default::default()
    };
    let report = run_frames("growth", frames, &config).unwrap();
    assert!(report.rows.windows(2).all(|w| w[1].qe > w[0].qe), "{:?}", report.rows);

    // Hand count: mean over pixels of the distance to the nearest model.
    for (row, image) in report.rows.iter().zip(&images) {
        let pixels = pixel_vectors(image);
        let total: f64 = pixels
            .iter()
            .map(|p| {
                report
                    .grid
                    .models()
                    .iter()
                    .map(|m| p.distance(m))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum();
        assert!((row.qe - total / pixels.len() as f64).abs() < 1e-12);
    }
    let fit = report.trend.fit().expect("fitted trend");
    assert!(fit.slope > 0.0 && fit.p < 0.001);
}

#[test]
fn preprocessing_is_a_no_op_on_aligned_full_contrast_stack() {
    let full_range = |seed| {
        let mut r = common::rng(seed);
        RasterImage::from_fn(48, 48, |x, y| {
            use rand::Rng;
            match (x + y * 48) % 97 {
                0 => [0.0; 3],
                1 => [255.0; 3],
                _ => [
                    r.random_range(0..=255) as f64,
                    r.random_range(0..=255) as f64,
                    r.random_range(0..=255) as f64,
                ],
            }
        })
        .unwrap()
    };
    let frames = |_: ()| -> Vec<Frame> {
        (0..3)
            .map(|k| Frame {
                label: format!("{k}"),
                year: k as f64,
                image: full_range(k as u64),
            })
            .collect()
    };
    let on = run_frames(
        "x",
        frames(()),
        &RunConfig {
            register: false,
            ..Default::default()
        },
    )
    .unwrap();
    let off = run_frames(
        "x",
        frames(()),
        &RunConfig {
            register: false,
            normalize: false,
            ..Default::default()
        },
    )
    .unwrap();
    for (a, b) in on.rows.iter().zip(&off.rows) {
        assert!((a.qe - b.qe).abs() <= 1e-12);
    }
}

#[test]
fn registration_and_normalization_leave_aligned_copies_unchanged() {
    let scene = common::textured_image(64, 64);
    let stretched = somqe::imaging::normalize_contrast(&scene);
    let frames = || -> Vec<Frame> {
        (0..3)
            .map(|k| Frame {
                label: format!("{k}"),
                year: k as f64,
                image: stretched.clone(),
            })
            .collect()
    };
    let on = run_frames("x", frames(), &RunConfig::default()).unwrap();
    let off = run_frames(
        "x",
        frames(),
        &RunConfig {
            register: false,
            normalize: false,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(on.transforms.iter().all(|t| t.1.is_identity()));
    for (a, b) in on.rows.iter().zip(&off.rows) {
        assert!((a.qe - b.qe).abs() <= 1e-12);
    }
}
