//! Canonical text rendering of declarations and values. The printer and
//! parser are inverse to each other: parsing a printed document reproduces
//! the same values, and printing is deterministic (sorted term order).

use fncalc::forms::ConstMetric;
use num_traits::Zero;
use fncalc::poly::{PatchSplit, Rational};
use fncalc::vdata::NormalValuedForm;
use fncalc::{ScalarForm, VectorForm};

use crate::parser::{Decl, Document};

pub fn rational_text(r: &Rational) -> String {
    r.to_string()
}

pub fn vector_text(v: &[Rational]) -> String {
    let inner: Vec<String> = v.iter().map(rational_text).collect();
    format!("({})", inner.join(" "))
}

pub fn patch_text(split: &PatchSplit) -> String {
    let names: Vec<&str> = split.var_names().collect();
    let (base, fiber) = names.split_at(split.n_base());
    let fiber_part = if fiber.is_empty() {
        String::new()
    } else {
        format!(" {}", fiber.join(" "))
    };
    format!(
        "patch ({} |{}) jet {}",
        base.join(" "),
        fiber_part,
        split.jet_order()
    )
}

pub fn metric_text(g: &ConstMetric) -> String {
    let n = g.dim();
    let diagonal = (0..n)
        .all(|i| (0..n).all(|j| i == j || g.entry(i, j).is_zero()));
    if diagonal {
        let entries: Vec<String> = (0..n).map(|i| rational_text(g.entry(i, i))).collect();
        format!("diag ({})", entries.join(" "))
    } else {
        let rows: Vec<String> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| rational_text(g.entry(i, j)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("rows ({})", rows.join(" ; "))
    }
}

fn index_text(split: &PatchSplit, idx: &[usize]) -> String {
    let names: Vec<&str> = idx.iter().map(|&i| split.var_name(i)).collect();
    format!("[{}]", names.join(" "))
}

pub fn sform_text(f: &ScalarForm) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let split = f.split();
    let terms: Vec<String> = f
        .terms()
        .map(|(idx, c)| format!("{} ({})", index_text(split, &idx.0), c))
        .collect();
    terms.join(" ; ")
}

pub fn vform_text(f: &VectorForm) -> String {
    if f.is_zero() {
        return format!("deg {} 0", f.degree());
    }
    let split = f.split();
    let terms: Vec<String> = f
        .terms()
        .map(|((idx, dir), c)| {
            format!(
                "{}->{} ({})",
                index_text(split, &idx.0),
                split.var_name(*dir),
                c
            )
        })
        .collect();
    terms.join(" ; ")
}

pub fn section_text(s: &NormalValuedForm) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let split = s.split();
    let terms: Vec<String> = s
        .terms()
        .map(|((_, dir), c)| format!("{} ({})", split.var_name(*dir), c))
        .collect();
    terms.join(" ; ")
}

/// Normal-valued forms of any degree render in vform syntax; degree-0
/// sections use the shorter section syntax.
pub fn nvform_text(s: &NormalValuedForm) -> String {
    if s.degree() == 0 {
        return section_text(s);
    }
    if s.is_zero() {
        return format!("deg {} 0", s.degree());
    }
    let split = s.split();
    let terms: Vec<String> = s
        .terms()
        .map(|((idx, dir), c)| {
            format!(
                "{}->{} ({})",
                index_text(split, &idx.0),
                split.var_name(*dir),
                c
            )
        })
        .collect();
    terms.join(" ; ")
}

pub fn decl_text(name: &str, decl: &Decl) -> String {
    match decl {
        Decl::Metric(g) => format!("metric {name} = {}", metric_text(g)),
        Decl::SForm(f) => format!("sform {name} deg {} = {}", f.degree(), sform_text(f)),
        Decl::VForm(f) => format!("vform {name} = {}", vform_text(f)),
        Decl::Section(s) => format!("section {name} = {}", section_text(s)),
        Decl::Frame(vs) => {
            let parts: Vec<String> = vs.iter().map(|v| vector_text(v)).collect();
            format!("frame {name} = {}", parts.join(" "))
        }
        Decl::Point(p) => format!("point {name} = {}", vector_text(p.coords())),
        Decl::Vector(v) => format!("vector {name} = {}", vector_text(v)),
        Decl::FSeries(parts) => format!("fseries {name} = {}", parts.join(" ")),
    }
}

pub fn command_text(cmd: &crate::parser::Command) -> String {
    use crate::parser::Command::*;
    match cmd {
        FnBracket { k, l } => format!("fn-bracket {k} {l}"),
        Hat { phi, metric } => format!("hat {phi} {metric}"),
        SquareZero { k } => format!("square-zero {k}"),
        VdataValidate { delta, samples } => format!("vdata-validate {delta} {samples}"),
        Ell { delta, args } => format!("ell {} {delta} {}", args.len(), args.join(" ")),
        Ell1Matrix { delta, d_bound } => format!("ell1-matrix {delta} {d_bound}"),
        Symbol { delta, point, xi } => format!("symbol {delta} {point} {xi}"),
        FPsi { delta, series, order } => format!("fpsi {delta} {series} {order}"),
        McResidual { delta, series, order } => format!("mc-residual {delta} {series} {order}"),
        McSolve { delta, s1, order, d_bound } => {
            format!("mc-solve {delta} {s1} {order} {d_bound}")
        }
        PlaneCheck { psi, point, frame } => format!("plane-check {psi} {point} {frame}"),
        Cousin { phi, metric, point, frame, normal } => {
            format!("cousin {phi} {metric} {point} {frame} {normal}")
        }
        Hl { phi, psi_e, frame, c } => {
            format!("hl {phi} {psi_e} {frame} {}", rational_text(c))
        }
        Plie { delta, xi, kmax } => format!("plie {delta} {xi} {kmax}"),
        Fixture { name } => format!("fixture {name}"),
    }
}

pub fn check_text(check: &crate::parser::Check) -> String {
    use crate::parser::Check::*;
    let vecs = |vs: &[Vec<Rational>]| -> String {
        vs.iter().map(|v| vector_text(v)).collect::<Vec<_>>().join(" ")
    };
    match check {
        SquareZero { k } => format!("check square-zero {k}"),
        SquareZeroHat { phi, metric } => format!("check square-zero-hat {phi} {metric}"),
        Value { phi, value, vectors } => {
            format!("check value {phi} = {} {}", rational_text(value), vecs(vectors))
        }
        Plane { psi, vectors } => format!("check plane {psi} {}", vecs(vectors)),
        Vdata { delta } => format!("check vdata {delta}"),
        Cousin { phi, metric, normal, vectors } => format!(
            "check cousin {phi} {metric} {} {}",
            vector_text(normal),
            vecs(vectors)
        ),
        Hl { phi, psi_e, c, vectors } => format!(
            "check hl {phi} {psi_e} {} {}",
            rational_text(c),
            vecs(vectors)
        ),
    }
}

pub fn document_text(doc: &Document) -> String {
    let mut lines = Vec::new();
    if let Some(split) = &doc.split {
        lines.push(patch_text(split));
    }
    for (name, decl) in &doc.decls {
        lines.push(decl_text(name, decl));
    }
    for check in &doc.checks {
        lines.push(check_text(check));
    }
    for cmd in &doc.commands {
        lines.push(command_text(cmd));
    }
    lines.join("\n") + "\n"
}
