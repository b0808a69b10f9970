//! Constant-coefficient fixture catalog: the classical calibration forms
//! (Kaehler, G2, Spin(7), special Lagrangian, volume), the tangent-valued
//! forms built from them, and the validated split-patch V-data used by the
//! deformation machinery. Conventions are pinned by the unit tests below,
//! not by transcription.

use std::sync::Arc;

use crate::forms::{hat, ConstMetric, MultiIndex, ScalarForm, VectorForm};
use crate::poly::{rat, JetPoly, PatchSplit, Point, Rational};
use crate::vdata::VData;

/// Flat patch with variables x1..xn and no fibers.
pub fn flat_patch(n: usize) -> Arc<PatchSplit> {
    PatchSplit::flat((1..=n).map(|i| format!("x{i}")).collect())
}

/// Unit coordinate form dx^idx (0-based indices).
pub fn basis_form(split: &Arc<PatchSplit>, idx: &[usize]) -> ScalarForm {
    ScalarForm::from_terms(
        split,
        idx.len(),
        vec![(MultiIndex(idx.to_vec()), JetPoly::one(split))],
    )
}

fn sum(terms: &[(&[usize], i64)], split: &Arc<PatchSplit>) -> ScalarForm {
    let deg = terms.first().map_or(0, |(i, _)| i.len());
    ScalarForm::from_terms(
        split,
        deg,
        terms.iter().map(|(idx, c)| {
            (
                MultiIndex(idx.to_vec()),
                JetPoly::constant(split, rat(*c)),
            )
        }),
    )
}

/// Kaehler form dx1^dx2 + dx3^dx4 on flat R^4.
pub fn omega_r4() -> ScalarForm {
    sum(&[(&[0, 1], 1), (&[2, 3], 1)], &flat_patch(4))
}

/// Kaehler form on flat R^6.
pub fn omega_r6() -> ScalarForm {
    sum(&[(&[0, 1], 1), (&[2, 3], 1), (&[4, 5], 1)], &flat_patch(6))
}

/// Volume form dx1^dx2^dx3 on flat R^3.
pub fn vol_r3() -> ScalarForm {
    sum(&[(&[0, 1, 2], 1)], &flat_patch(3))
}

/// The associative 3-form on flat R^7:
/// e123 + e145 + e167 + e246 - e257 - e347 - e356.
pub fn g2_phi() -> ScalarForm {
    sum(
        &[
            (&[0, 1, 2], 1),
            (&[0, 3, 4], 1),
            (&[0, 5, 6], 1),
            (&[1, 3, 5], 1),
            (&[1, 4, 6], -1),
            (&[2, 3, 6], -1),
            (&[2, 4, 5], -1),
        ],
        &flat_patch(7),
    )
}

/// The coassociative 4-form *phi (Euclidean Hodge dual of `g2_phi`).
pub fn g2_star_phi() -> ScalarForm {
    hodge_dual(&g2_phi())
}

/// The Cayley 4-form on flat R^8: dx8 ^ phi + *7 phi, with phi the
/// associative form on the first seven coordinates.
pub fn cayley_r8() -> ScalarForm {
    let s8 = flat_patch(8);
    let phi8 = ScalarForm::from_terms(
        &s8,
        3,
        g2_phi()
            .terms()
            .map(|(i, c)| (i.clone(), JetPoly::constant(&s8, c.constant_term()))),
    );
    // *7 phi: dual taken inside the first seven coordinates
    let star7 = ScalarForm::from_terms(
        &s8,
        4,
        g2_phi().terms().map(|(i, c)| {
            let (j, sign) = complement_with_sign(i, 7);
            let coeff = if sign < 0 {
                -c.constant_term()
            } else {
                c.constant_term()
            };
            (j, JetPoly::constant(&s8, coeff))
        }),
    );
    basis_form(&s8, &[7])
        .wedge(&phi8)
        .unwrap()
        .add(&star7)
        .unwrap()
}

/// Special Lagrangian calibration Re(dz1^dz2^dz3) on flat R^6 with
/// z_k = x_{2k-1} + i x_{2k}.
pub fn sl_re_vol_r6() -> ScalarForm {
    sum(
        &[
            (&[0, 2, 4], 1),
            (&[0, 3, 5], -1),
            (&[1, 2, 5], -1),
            (&[1, 3, 4], -1),
        ],
        &flat_patch(6),
    )
}

/// Euclidean Hodge dual on a flat patch with the standard orientation.
pub fn hodge_dual(phi: &ScalarForm) -> ScalarForm {
    let n = phi.split().n_vars();
    ScalarForm::from_terms(
        phi.split(),
        n - phi.degree(),
        phi.terms().map(|(i, c)| {
            let (j, sign) = complement_with_sign(i, n);
            let coeff = if sign < 0 { c.neg() } else { c.clone() };
            (j, coeff)
        }),
    )
}

/// Complement of an increasing index inside 0..n and the sign of the
/// permutation (I, complement) relative to (0..n).
fn complement_with_sign(idx: &MultiIndex, n: usize) -> (MultiIndex, i32) {
    let comp: Vec<usize> = (0..n).filter(|v| !idx.contains(*v)).collect();
    let comp = MultiIndex(comp);
    let (_, neg) = idx.merge(&comp).expect("disjoint by construction");
    (comp, if neg { -1 } else { 1 })
}

/// The Le-Vanzura tangent-valued 4-form on flat R^7:
/// tau(x,y,z,w) = -(phi(y,z,w) x + phi(z,x,w) y + phi(x,y,w) z
///                 + phi(y,x,z) w).
pub fn tau_r7() -> VectorForm {
    let split = flat_patch(7);
    let phi = g2_phi();
    let origin = Point::origin(&split);
    let e = |i: usize| -> Vec<Rational> {
        let mut v = vec![rat(0); 7];
        v[i] = rat(1);
        v
    };
    let phi_val = |a: usize, b: usize, c: usize| -> Rational {
        phi.eval_on_vectors(&origin, &[e(a), e(b), e(c)]).unwrap()
    };
    let mut terms = Vec::new();
    for a in 0..7 {
        for b in (a + 1)..7 {
            for c in (b + 1)..7 {
                for d in (c + 1)..7 {
                    // value on (e_a, e_b, e_c, e_d)
                    let coeffs = [
                        (a, -phi_val(b, c, d)),
                        (b, -phi_val(c, a, d)),
                        (c, -phi_val(a, b, d)),
                        (d, -phi_val(b, a, c)),
                    ];
                    for (dir, coeff) in coeffs {
                        terms.push((
                            MultiIndex(vec![a, b, c, d]),
                            dir,
                            JetPoly::constant(&split, coeff),
                        ));
                    }
                }
            }
        }
    }
    VectorForm::from_terms(&split, 4, terms)
}

/// Relabel patch variables of a constant-coefficient scalar form:
/// `perm[old] = new`, with the shuffle sign absorbed into coefficients.
fn reindex_scalar(phi: &ScalarForm, new_split: &Arc<PatchSplit>, perm: &[usize]) -> ScalarForm {
    ScalarForm::from_terms(
        new_split,
        phi.degree(),
        phi.terms().map(|(idx, c)| {
            let mapped: Vec<usize> = idx.0.iter().map(|&v| perm[v]).collect();
            let (sorted, neg) = sort_with_sign(mapped);
            let coeff = JetPoly::constant(new_split, c.constant_term());
            (
                MultiIndex(sorted),
                if neg { coeff.neg() } else { coeff },
            )
        }),
    )
}

fn sort_with_sign(mut v: Vec<usize>) -> (Vec<usize>, bool) {
    let mut swaps = 0usize;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if v[j] < v[i] {
                v.swap(i, j);
                swaps += 1;
            }
        }
    }
    (v, swaps % 2 == 1)
}

/// Split patch of the complex-line fixture: base (x1, x2) a complex line,
/// fiber (y1, y2), generous jet order for the formal machinery.
pub fn j_line_split() -> Arc<PatchSplit> {
    PatchSplit::new(vec!["x1", "x2"], vec!["y1", "y2"], 6).unwrap()
}

/// The standard complex structure on the split patch: J dx1 = dx2 etc. on
/// the base and the analogous rotation on the fiber.
pub fn j_std(split: &Arc<PatchSplit>) -> VectorForm {
    VectorForm::tensor(&basis_form(split, &[0]), 1)
        .sub(&VectorForm::tensor(&basis_form(split, &[1]), 0))
        .unwrap()
        .add(&VectorForm::tensor(&basis_form(split, &[2]), 3))
        .unwrap()
        .sub(&VectorForm::tensor(&basis_form(split, &[3]), 2))
        .unwrap()
}

/// V-data of a complex line in C^2: delta = J_std.
pub fn j_line_vdata() -> VData {
    VData::new(j_std(&j_line_split())).unwrap()
}

/// V-data of an omega-calibrated line: delta = hat(dx1^dx2 + dy1^dy2),
/// which equals -J_std on the same split patch.
pub fn omega_line_vdata() -> VData {
    let split = j_line_split();
    let omega = basis_form(&split, &[0, 1])
        .add(&basis_form(&split, &[2, 3]))
        .unwrap();
    VData::new(hat(&omega, &ConstMetric::euclidean(4)).unwrap()).unwrap()
}

/// Split patch of a coassociative 4-plane in R^7: the base coordinates are
/// the old e4..e7 directions, the fibers the old e1..e3.
pub fn coassociative_split() -> Arc<PatchSplit> {
    PatchSplit::new(
        vec!["x1", "x2", "x3", "x4"],
        vec!["y1", "y2", "y3"],
        6,
    )
    .unwrap()
}

/// V-data of a coassociative plane: delta = chi = hat(*phi) in the
/// relabeled coordinates (degree 3, odd).
pub fn g2_chi_vdata() -> VData {
    let split = coassociative_split();
    // old coordinate i (0-based, standard e1..e7 order) -> new position
    let perm = [4, 5, 6, 0, 1, 2, 3];
    let star = reindex_scalar(&g2_star_phi(), &split, &perm);
    VData::new(hat(&star, &ConstMetric::euclidean(7)).unwrap()).unwrap()
}

/// Split patch of a volume-calibrated plane R^2 in R^3.
pub fn volume_split() -> Arc<PatchSplit> {
    PatchSplit::new(vec!["x1", "x2"], vec!["y1"], 6).unwrap()
}

/// V-data of the volume fixture: delta = hat(dx1^dx2) on (x1,x2|y1),
/// degree 1.
pub fn volume_vdata() -> VData {
    let split = volume_split();
    let vol = basis_form(&split, &[0, 1]);
    VData::new(hat(&vol, &ConstMetric::euclidean(3)).unwrap()).unwrap()
}
