//! Independent closed-form cross-checks for the GL(2, F_q) layer.
//!
//! The character values of GL(2, F_q) admit textbook closed forms indexed
//! by the four class types (central, central·unipotent, regular split,
//! regular elliptic). These tests recompute the cuspidal characters and the
//! induced principal-series characters from those formulas alone — using
//! nothing but discrete logarithms and class labels — and compare them with
//! the values produced by the table-splitting oracle and the exhaustive
//! induction sums. The two routes share no code beyond field arithmetic.

use depthzero_core::cyclotomic::Cyclo;
use depthzero_core::finite_field::{build_tower, fq_of_order, Poly, ResidueCharacter};
use depthzero_core::gl_classes::{class_set, ClassFunction, GlClass};
use depthzero_core::harish_chandra::{cuspidal_character, gl1_character, hc_induce, LeviDatum};

/// The four class types of GL(2, F_q).
enum ClassType {
    Central(u8),
    CentralUnipotent(u8),
    RegularSplit(u8, u8),
    RegularElliptic(Poly),
}

fn classify(c: &GlClass, q: u64) -> ClassType {
    let f = fq_of_order(q).unwrap();
    match c.data.as_slice() {
        [(coeffs, lam)] if coeffs.len() == 2 && lam == &vec![1, 1] => {
            ClassType::Central(f.neg(coeffs[0]))
        }
        [(coeffs, lam)] if coeffs.len() == 2 && lam == &vec![2] => {
            ClassType::CentralUnipotent(f.neg(coeffs[0]))
        }
        [(c1, _), (c2, _)] => ClassType::RegularSplit(f.neg(c1[0]), f.neg(c2[0])),
        [(coeffs, _)] => ClassType::RegularElliptic(Poly { coeffs: coeffs.clone() }),
        _ => unreachable!("GL(2) classes have at most two primary components"),
    }
}

#[test]
fn cuspidal_characters_match_their_closed_forms() {
    for q in [2u64, 3, 5, 7] {
        let field = fq_of_order(q).unwrap();
        let tower = build_tower(field.p, field.e, 2).unwrap();
        let set = class_set(2, q).unwrap();
        let m = q * q - 1;
        for a in 0..m {
            let theta = ResidueCharacter::new(q, 2, a);
            if !theta.is_regular() {
                continue;
            }
            let cusp = cuspidal_character(2, q, a).unwrap();
            for (ci, class) in set.classes.iter().enumerate() {
                let expect = match classify(class, q) {
                    ClassType::Central(z) => theta
                        .evaluate(&tower, tower.embed_base(z))
                        .unwrap()
                        .scale(q as i64 - 1, 1),
                    ClassType::CentralUnipotent(z) => theta
                        .evaluate(&tower, tower.embed_base(z))
                        .unwrap()
                        .scale(-1, 1),
                    ClassType::RegularSplit(_, _) => Cyclo::integer(0),
                    ClassType::RegularElliptic(poly) => {
                        let r = tower
                            .elements()
                            .find(|&z| tower.eval_base_poly(&poly, z) == 0)
                            .unwrap();
                        let s = theta
                            .evaluate(&tower, r)
                            .unwrap()
                            .add(&theta.evaluate(&tower, tower.frobenius(r)).unwrap());
                        s.scale(-1, 1)
                    }
                };
                assert_eq!(cusp.values[ci], expect, "q={q} a={a} class {ci}");
            }
        }
    }
    println!("closed-form check: cuspidal values of GL(2,q) for q ∈ {{2,3,5,7}}");
}

#[test]
fn gl3_cuspidal_characters_match_their_closed_forms() {
    // Cuspidal characters of GL(3, F_q) are supported on the classes whose
    // semisimple part lies in the anisotropic torus: central·unipotent
    // classes carry θ(z) times the degenerate values (q−1)(q²−1), −(q−1), 1
    // for unipotent types (1,1,1), (2,1), (3), regular elliptic classes
    // carry Σ_j θ(x^{q^j}), and everything else vanishes.
    for q in [2u64, 3] {
        let field = fq_of_order(q).unwrap();
        let tower = build_tower(field.p, field.e, 3).unwrap();
        let set = class_set(3, q).unwrap();
        let m = q.pow(3) - 1;
        for a in 0..m {
            let theta = ResidueCharacter::new(q, 3, a);
            if !theta.is_regular() {
                continue;
            }
            let cusp = cuspidal_character(3, q, a).unwrap();
            for (ci, class) in set.classes.iter().enumerate() {
                let expect = match class.data.as_slice() {
                    [(coeffs, lam)] if coeffs.len() == 2 => {
                        // central semisimple part z with unipotent type λ
                        let z = field.neg(coeffs[0]);
                        let green = match lam.as_slice() {
                            [1, 1, 1] => (q as i64 - 1) * (q.pow(2) as i64 - 1),
                            [2, 1] => -(q as i64 - 1),
                            [3] => 1,
                            _ => unreachable!("partitions of 3"),
                        };
                        theta
                            .evaluate(&tower, tower.embed_base(z))
                            .unwrap()
                            .scale(green, 1)
                    }
                    [(coeffs, _)] if coeffs.len() == 4 => {
                        // regular elliptic: sum over the Frobenius orbit of a root
                        let poly = Poly { coeffs: coeffs.clone() };
                        let r = tower
                            .elements()
                            .find(|&z| tower.eval_base_poly(&poly, z) == 0)
                            .unwrap();
                        let mut s = Cyclo::zero(m);
                        let mut x = r;
                        for _ in 0..3 {
                            s = s.add(&theta.evaluate(&tower, x).unwrap());
                            x = tower.frobenius(x);
                        }
                        s
                    }
                    // semisimple part neither central nor elliptic
                    _ => Cyclo::integer(0),
                };
                assert_eq!(cusp.values[ci], expect, "q={q} a={a} class {ci}");
            }
        }
    }
    println!("closed-form check: cuspidal values of GL(3,q) for q ∈ {{2,3}}");
}

#[test]
fn principal_series_match_their_closed_forms() {
    for q in [2u64, 3, 5] {
        let field = fq_of_order(q).unwrap();
        let t1 = build_tower(field.p, field.e, 1).unwrap();
        let set = class_set(2, q).unwrap();
        let levi = LeviDatum::new(2, q, vec![1, 1]).unwrap();
        for a in 0..(q - 1).max(1) {
            for b in 0..(q - 1).max(1) {
                let ta = ResidueCharacter::new(q, 1, a);
                let tb = ResidueCharacter::new(q, 1, b);
                let val = |theta: &ResidueCharacter, x: u8| {
                    theta.evaluate(&t1, t1.embed_base(x)).unwrap()
                };
                let pair = ClassFunction::tensor(&[
                    gl1_character(q, a).unwrap(),
                    gl1_character(q, b).unwrap(),
                ])
                .unwrap();
                let ind = hc_induce(&levi, &pair).unwrap();
                for (ci, class) in set.classes.iter().enumerate() {
                    let expect = match classify(class, q) {
                        ClassType::Central(z) => {
                            val(&ta, z).mul(&val(&tb, z)).scale(q as i64 + 1, 1)
                        }
                        ClassType::CentralUnipotent(z) => val(&ta, z).mul(&val(&tb, z)),
                        ClassType::RegularSplit(x, y) => val(&ta, x)
                            .mul(&val(&tb, y))
                            .add(&val(&ta, y).mul(&val(&tb, x))),
                        ClassType::RegularElliptic(_) => Cyclo::integer(0),
                    };
                    assert_eq!(ind.values[ci], expect, "q={q} a={a} b={b} class {ci}");
                }
            }
        }
    }
    println!("closed-form check: principal series of GL(2,q) for q ∈ {{2,3,5}}");
}

#[test]
fn steinberg_values_match_their_closed_form() {
    // St = Ind(1 ⊠ 1) − 1: q at central classes, 0 at central·unipotent,
    // 1 at regular split, −1 at regular elliptic
    for q in [2u64, 3, 5] {
        let set = class_set(2, q).unwrap();
        let levi = LeviDatum::new(2, q, vec![1, 1]).unwrap();
        let pair = ClassFunction::tensor(&[
            gl1_character(q, 0).unwrap(),
            gl1_character(q, 0).unwrap(),
        ])
        .unwrap();
        let ind = hc_induce(&levi, &pair).unwrap();
        for (ci, class) in set.classes.iter().enumerate() {
            let got = ind.values[ci].add(&Cyclo::integer(-1));
            let expect = match classify(class, q) {
                ClassType::Central(_) => q as i64,
                ClassType::CentralUnipotent(_) => 0,
                ClassType::RegularSplit(_, _) => 1,
                ClassType::RegularElliptic(_) => -1,
            };
            assert_eq!(got, Cyclo::integer(expect), "q={q} class {ci}");
        }
    }
}

#[test]
fn class_counts_follow_the_gl2_formula() {
    // GL(2, F_q) has q² − 1 classes: q−1 central, q−1 central·unipotent,
    // (q−1)(q−2)/2 regular split, (q²−q)/2 regular elliptic
    for q in [2u64, 3, 4, 5, 7] {
        let set = class_set(2, q).unwrap();
        assert_eq!(set.len() as u64, q * q - 1);
        let mut central = 0u64;
        let mut unip = 0u64;
        let mut split = 0u64;
        let mut elliptic = 0u64;
        for c in &set.classes {
            match classify(c, q) {
                ClassType::Central(_) => central += 1,
                ClassType::CentralUnipotent(_) => unip += 1,
                ClassType::RegularSplit(_, _) => split += 1,
                ClassType::RegularElliptic(_) => elliptic += 1,
            }
        }
        assert_eq!(central, q - 1);
        assert_eq!(unip, q - 1);
        assert_eq!(split, (q - 1) * (q - 2) / 2);
        assert_eq!(elliptic, (q * q - q) / 2);
    }
}
