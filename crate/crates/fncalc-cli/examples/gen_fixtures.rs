//! Regenerates the `fixtures/` directory from the engine's built-in fixture
//! values, together with each fixture's property-check manifest. Run from
//! the workspace root:
//!
//!     cargo run -p fncalc-cli --example gen_fixtures

use std::fmt::Write as _;
use std::path::PathBuf;

use fncalc::calibration::KVectorFrame;
use fncalc::fixtures;
use fncalc::forms::hat;
use fncalc::forms::ConstMetric;
use fncalc::poly::{rat, Point, Rational};
use fncalc_cli::printer;

fn e(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![rat(0); n];
    v[i] = rat(1);
    v
}

fn vecs(vs: &[Vec<Rational>]) -> String {
    vs.iter()
        .map(|v| printer::vector_text(v))
        .collect::<Vec<_>>()
        .join(" ")
}

fn flat_patch_line(n: usize) -> String {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    format!("patch ({} |) jet 0", vars.join(" "))
}

fn euclid_line(n: usize) -> String {
    let ones: Vec<&str> = std::iter::repeat("1").take(n).collect();
    format!("metric g = diag ({})", ones.join(" "))
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR"))
                .join("../..")
                .join("fixtures")
        });
    std::fs::create_dir_all(&out_dir).expect("create fixtures dir");

    let write = |name: &str, text: String| {
        let path = out_dir.join(format!("{name}.fn"));
        std::fs::write(&path, text).expect("write fixture");
        println!("wrote {}", path.display());
    };

    // --- omega-r4 ---
    {
        let f = fixtures::omega_r4();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(4)).unwrap();
        writeln!(t, "{}", euclid_line(4)).unwrap();
        writeln!(t, "sform omega deg 2 = {}", printer::sform_text(&f)).unwrap();
        writeln!(t, "check square-zero-hat omega g").unwrap();
        writeln!(t, "check value omega = 1 {}", vecs(&[e(4, 0), e(4, 1)])).unwrap();
        writeln!(
            t,
            "check cousin omega g {} {}",
            printer::vector_text(&e(4, 2)),
            vecs(&[e(4, 0), e(4, 1)])
        )
        .unwrap();
        write("omega-r4", t);
    }

    // --- omega-r6 ---
    {
        let f = fixtures::omega_r6();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(6)).unwrap();
        writeln!(t, "{}", euclid_line(6)).unwrap();
        writeln!(t, "sform omega deg 2 = {}", printer::sform_text(&f)).unwrap();
        writeln!(t, "check square-zero-hat omega g").unwrap();
        writeln!(t, "check value omega = 1 {}", vecs(&[e(6, 0), e(6, 1)])).unwrap();
        writeln!(
            t,
            "check cousin omega g {} {}",
            printer::vector_text(&e(6, 2)),
            vecs(&[e(6, 0), e(6, 1)])
        )
        .unwrap();
        write("omega-r6", t);
    }

    // --- vol-r3 ---
    {
        let f = fixtures::vol_r3();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(3)).unwrap();
        writeln!(t, "{}", euclid_line(3)).unwrap();
        writeln!(t, "sform vol deg 3 = {}", printer::sform_text(&f)).unwrap();
        writeln!(t, "check square-zero-hat vol g").unwrap();
        writeln!(
            t,
            "check value vol = 1 {}",
            vecs(&[e(3, 0), e(3, 1), e(3, 2)])
        )
        .unwrap();
        write("vol-r3", t);
    }

    // --- g2-phi ---
    {
        let phi = fixtures::g2_phi();
        let g = ConstMetric::euclidean(7);
        let chi = hat(&fixtures::g2_star_phi(), &g).expect("hat *phi");
        let phihat = hat(&phi, &g).expect("hat phi");
        // Oracle constant for the Harvey-Lawson identity, solved from one
        // generic sample: phi(xi)^2 + c*|chi(xi)|^2 = |xi|^2.
        let sample: Vec<Vec<Rational>> = vec![
            vec![rat(1), rat(2), rat(0), rat(1), rat(-1), rat(0), rat(3)],
            vec![rat(0), rat(1), rat(1), rat(-2), rat(0), rat(2), rat(1)],
            vec![rat(2), rat(0), rat(-1), rat(0), rat(1), rat(1), rat(0)],
        ];
        let frame = KVectorFrame::new(sample.clone()).expect("sample frame");
        let split = phi.split().clone();
        let origin = Point::origin(&split);
        let phi_val = phi.eval_on_vectors(&origin, frame.vectors()).unwrap();
        let chi_val = chi.eval_on_vectors(&origin, frame.vectors()).unwrap();
        let chi_sq = fncalc::linalg::dot(&chi_val, &chi_val);
        let c = (frame.gram_sq() - &phi_val * &phi_val) / chi_sq;
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(7)).unwrap();
        writeln!(t, "{}", euclid_line(7)).unwrap();
        writeln!(t, "sform phi deg 3 = {}", printer::sform_text(&phi)).unwrap();
        writeln!(t, "vform chi = {}", printer::vform_text(&chi)).unwrap();
        writeln!(t, "vform phihat = {}", printer::vform_text(&phihat)).unwrap();
        writeln!(t, "check square-zero-hat phi g").unwrap();
        writeln!(
            t,
            "check value phi = 1 {}",
            vecs(&[e(7, 0), e(7, 1), e(7, 2)])
        )
        .unwrap();
        writeln!(
            t,
            "check plane phihat {}",
            vecs(&[e(7, 0), e(7, 1), e(7, 2)])
        )
        .unwrap();
        writeln!(
            t,
            "check cousin phi g {} {}",
            printer::vector_text(&e(7, 3)),
            vecs(&[e(7, 0), e(7, 1), e(7, 2)])
        )
        .unwrap();
        writeln!(
            t,
            "check hl phi chi {} {}",
            printer::rational_text(&c),
            vecs(&sample)
        )
        .unwrap();
        write("g2-phi", t);
        println!("g2 Harvey-Lawson constant c = {c}");
    }

    // --- g2-star-phi ---
    {
        let f = fixtures::g2_star_phi();
        let split = f.split().clone();
        let origin = Point::origin(&split);
        let co_frame = vec![e(7, 3), e(7, 4), e(7, 5), e(7, 6)];
        let val = f.eval_on_vectors(&origin, &co_frame).unwrap();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(7)).unwrap();
        writeln!(t, "{}", euclid_line(7)).unwrap();
        writeln!(t, "sform starphi deg 4 = {}", printer::sform_text(&f)).unwrap();
        writeln!(t, "check square-zero-hat starphi g").unwrap();
        writeln!(
            t,
            "check value starphi = {} {}",
            printer::rational_text(&val),
            vecs(&co_frame)
        )
        .unwrap();
        write("g2-star-phi", t);
    }

    // --- cayley-r8 ---
    {
        let f = fixtures::cayley_r8();
        let split = f.split().clone();
        let origin = Point::origin(&split);
        let frame = vec![e(8, 0), e(8, 1), e(8, 2), e(8, 7)];
        let val = f.eval_on_vectors(&origin, &frame).unwrap();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(8)).unwrap();
        writeln!(t, "{}", euclid_line(8)).unwrap();
        writeln!(t, "sform cayley deg 4 = {}", printer::sform_text(&f)).unwrap();
        writeln!(t, "check square-zero-hat cayley g").unwrap();
        writeln!(
            t,
            "check value cayley = {} {}",
            printer::rational_text(&val),
            vecs(&frame)
        )
        .unwrap();
        write("cayley-r8", t);
    }

    // --- sl-re-vol-r6 ---
    {
        let f = fixtures::sl_re_vol_r6();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(6)).unwrap();
        writeln!(t, "{}", euclid_line(6)).unwrap();
        writeln!(t, "sform revol deg 3 = {}", printer::sform_text(&f)).unwrap();
        writeln!(
            t,
            "check value revol = 1 {}",
            vecs(&[e(6, 0), e(6, 2), e(6, 4)])
        )
        .unwrap();
        write("sl-re-vol-r6", t);
    }

    // --- tau-r7 ---
    {
        let tau = fixtures::tau_r7();
        let mut t = String::new();
        writeln!(t, "{}", flat_patch_line(7)).unwrap();
        writeln!(t, "vform tau = {}", printer::vform_text(&tau)).unwrap();
        writeln!(
            t,
            "check plane tau {}",
            vecs(&[e(7, 0), e(7, 1), e(7, 2), e(7, 3)])
        )
        .unwrap();
        writeln!(
            t,
            "check plane tau {}",
            vecs(&[
                vec![rat(1), rat(1), rat(0), rat(2), rat(0), rat(-1), rat(0)],
                vec![rat(0), rat(1), rat(1), rat(0), rat(3), rat(0), rat(1)],
                vec![rat(2), rat(0), rat(1), rat(1), rat(0), rat(1), rat(-1)],
                vec![rat(0), rat(0), rat(2), rat(0), rat(1), rat(1), rat(1)],
            ])
        )
        .unwrap();
        write("tau-r7", t);
    }

    // --- j-line ---
    {
        let v = fixtures::j_line_vdata();
        let mut t = String::new();
        writeln!(t, "patch (x1 x2 | y1 y2) jet 6").unwrap();
        writeln!(t, "vform J = {}", printer::vform_text(v.delta())).unwrap();
        writeln!(t, "check vdata J").unwrap();
        writeln!(t, "check square-zero J").unwrap();
        write("j-line", t);
    }

    // --- omega-line ---
    {
        let v = fixtures::omega_line_vdata();
        let mut t = String::new();
        writeln!(t, "patch (x1 x2 | y1 y2) jet 6").unwrap();
        writeln!(t, "vform delta = {}", printer::vform_text(v.delta())).unwrap();
        writeln!(t, "check vdata delta").unwrap();
        write("omega-line", t);
    }

    // --- volume ---
    {
        let v = fixtures::volume_vdata();
        let mut t = String::new();
        writeln!(t, "patch (x1 x2 | y1) jet 6").unwrap();
        writeln!(t, "vform delta = {}", printer::vform_text(v.delta())).unwrap();
        writeln!(t, "check vdata delta").unwrap();
        write("volume", t);
    }

    // --- g2-chi ---
    {
        let v = fixtures::g2_chi_vdata();
        let split = v.split();
        let base: Vec<&str> = split.var_names().take(split.n_base()).collect();
        let fiber: Vec<&str> = split.var_names().skip(split.n_base()).collect();
        let mut t = String::new();
        writeln!(
            t,
            "patch ({} | {}) jet {}",
            base.join(" "),
            fiber.join(" "),
            split.jet_order()
        )
        .unwrap();
        writeln!(t, "vform chi = {}", printer::vform_text(v.delta())).unwrap();
        writeln!(t, "check vdata chi").unwrap();
        write("g2-chi", t);
    }
}
