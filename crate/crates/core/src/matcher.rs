//! The matching engine: at every face of the standard chamber of the GL(N)
//! building, compare the characteristic function attached to an induced
//! depth-zero datum (computed through restriction from a vertex, with the
//! shift sign (−1)^N) against the compact restriction of the corresponding
//! generalized principal series (computed at the vertex by exhaustive
//! parabolic induction and at faces through the fibre-sum form of parabolic
//! restriction). Also: the coherence conditions of a Frobenius structure,
//! and the alternating facet sum over the GL(2) tree.

use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::building::{chamber_faces, Facet};
use crate::cyclotomic::{lcm_u64, Cyclo};
use crate::error::{Error, Result};
use crate::finite_field::{fq_of_order, Fq, ResidueCharacter};
use crate::gl_classes::{class_set, ClassFunction, GlClass, Shape};
use crate::harish_chandra::{
    cuspidal_character, hc_induce, hc_restrict, hc_restrict_fibre_sum, LeviDatum,
};
use crate::laurent::LMat;
use crate::tree::{edge_reduction, fixed_facets_gl2, vertex_reduction};

/// One torus block of a depth-zero datum: GL(n) with residue-character
/// exponent a mod q^n − 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDatum {
    pub n: u32,
    pub a: u64,
}

/// A depth-zero matching datum: a composition (N_1, …, N_r) of N and one
/// residue-character exponent per block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingDatum {
    #[serde(rename = "N")]
    pub big_n: u32,
    pub q: u64,
    pub blocks: Vec<BlockDatum>,
}

impl MatchingDatum {
    pub fn new(big_n: u32, q: u64, blocks: Vec<BlockDatum>) -> Result<MatchingDatum> {
        if blocks.is_empty() || blocks.iter().any(|b| b.n == 0) {
            return Err(Error::Invalid("block sizes must be positive".into()));
        }
        if blocks.iter().map(|b| b.n).sum::<u32>() != big_n {
            return Err(Error::ShapeMismatch(format!(
                "blocks do not sum to N = {big_n}"
            )));
        }
        Ok(MatchingDatum { big_n, q, blocks })
    }

    pub fn composition(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.n).collect()
    }

    /// All block exponents must be regular for the matching suite.
    pub fn check_regular(&self) -> Result<()> {
        for b in &self.blocks {
            let theta = ResidueCharacter::new(self.q, b.n, b.a);
            if !theta.is_regular() {
                return Err(Error::NonRegular { a: b.a, modulus: theta.modulus().max(1) });
            }
        }
        Ok(())
    }

    /// Common cyclotomic modulus: lcm of q^{N_i} − 1 over the blocks.
    pub fn target_modulus(&self) -> u64 {
        self.blocks
            .iter()
            .map(|b| self.q.pow(b.n) - 1)
            .fold(1u64, |acc, m| lcm_u64(acc, m.max(1)))
    }

    pub fn sign(&self) -> i64 {
        if self.big_n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// The two vertex-level class functions of a datum, computed once: the
/// compact-restriction side and the (−1)^N-shifted sheaf side.
pub struct DatumFunctions {
    pub datum: MatchingDatum,
    pub vertex_rep: ClassFunction,
    pub vertex_sheaf: ClassFunction,
}

pub fn datum_functions(datum: &MatchingDatum) -> Result<DatumFunctions> {
    datum.check_regular()?;
    let modulus = datum.target_modulus();
    let cuspidals: Vec<ClassFunction> = datum
        .blocks
        .iter()
        .map(|b| {
            let c = cuspidal_character(b.n, datum.q, b.a)?;
            Ok(lift_values(&c, modulus))
        })
        .collect::<Result<_>>()?;
    let levi = LeviDatum::new(datum.big_n, datum.q, datum.composition())?;
    let tensor = ClassFunction::tensor(&cuspidals)?;
    let vertex_rep = hc_induce(&levi, &tensor)?;
    let vertex_sheaf = vertex_rep.scale(datum.sign(), 1);
    Ok(DatumFunctions { datum: datum.clone(), vertex_rep, vertex_sheaf })
}

fn lift_values(f: &ClassFunction, modulus: u64) -> ClassFunction {
    ClassFunction {
        shape: f.shape.clone(),
        values: f
            .values
            .iter()
            .map(|v| {
                let m = lcm_u64(v.modulus(), modulus);
                v.lift_to(m)
            })
            .collect(),
    }
}

impl DatumFunctions {
    /// Sheaf side at a face of the standard chamber: the vertex function for
    /// vertices (conjugation transport is block relabeling, trivial on one
    /// block), restriction along the refinement parabolic otherwise,
    /// evaluated by averaging over the unipotent radical.
    pub fn sheaf_side(&self, facet: &Facet) -> Result<ClassFunction> {
        self.check_facet(facet)?;
        if facet.is_vertex() {
            return Ok(self.vertex_sheaf.clone());
        }
        let levi = LeviDatum::new(self.datum.big_n, self.datum.q, facet.composition())?;
        hc_restrict(&self.vertex_sheaf, &levi)
    }

    /// Representation side at a face: compact restriction of the induced
    /// representation. At vertices this is the exhaustively induced
    /// character; at faces, the q^{-dim τ} fibre sum over the parabolic.
    pub fn rep_side(&self, facet: &Facet) -> Result<ClassFunction> {
        self.check_facet(facet)?;
        if facet.is_vertex() {
            return Ok(self.vertex_rep.clone());
        }
        let levi = LeviDatum::new(self.datum.big_n, self.datum.q, facet.composition())?;
        hc_restrict_fibre_sum(&self.vertex_rep, &levi)
    }

    fn check_facet(&self, facet: &Facet) -> Result<()> {
        if facet.big_n != self.datum.big_n {
            return Err(Error::ShapeMismatch(format!(
                "facet is for GL({}), datum for GL({})",
                facet.big_n, self.datum.big_n
            )));
        }
        Ok(())
    }
}

pub fn sheaf_side(datum: &MatchingDatum, facet: &Facet) -> Result<ClassFunction> {
    datum_functions(datum)?.sheaf_side(facet)
}

pub fn rep_side(datum: &MatchingDatum, facet: &Facet) -> Result<ClassFunction> {
    datum_functions(datum)?.rep_side(facet)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceRole {
    BaseVertex,
    OtherVertex,
    Face,
}

#[derive(Serialize)]
pub struct FaceCheck {
    pub facet: Facet,
    pub role: FaceRole,
    pub sheaf: ClassFunction,
    pub rep: ClassFunction,
    pub equal: bool,
    pub max_modulus: u64,
}

#[derive(Serialize)]
pub struct MatchReport {
    pub datum: MatchingDatum,
    pub verdict: bool,
    pub frobenius_a: bool,
    pub frobenius_b: bool,
    pub faces: Vec<FaceCheck>,
    /// wall-clock duration; not serialized so reports stay byte-identical
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Verify sheaf = (−1)^N · rep exactly at every face of the standard
/// chamber, plus the Frobenius-structure conditions. Failures are report
/// entries, not errors.
pub fn verify_matching(datum: &MatchingDatum) -> Result<MatchReport> {
    let start = Instant::now();
    let funcs = datum_functions(datum)?;
    let sign = datum.sign();
    let mut faces = Vec::new();
    let mut verdict = true;
    for facet in chamber_faces(datum.big_n) {
        let sheaf = funcs.sheaf_side(&facet)?;
        let rep = funcs.rep_side(&facet)?;
        let expected = rep.scale(sign, 1);
        let equal = sheaf == expected;
        verdict &= equal;
        let role = if facet.is_vertex() {
            if facet.vertices[0] == 0 {
                FaceRole::BaseVertex
            } else {
                FaceRole::OtherVertex
            }
        } else {
            FaceRole::Face
        };
        let max_modulus = lcm_u64(sheaf.max_modulus(), rep.max_modulus());
        faces.push(FaceCheck { facet, role, sheaf, rep, equal, max_modulus });
    }
    let frob = frobenius_checks(&funcs)?;
    Ok(MatchReport {
        datum: datum.clone(),
        verdict,
        frobenius_a: frob.condition_a,
        frobenius_b: frob.condition_b,
        faces,
        elapsed: start.elapsed(),
    })
}

#[derive(Serialize)]
pub struct FrobeniusReport {
    pub datum: MatchingDatum,
    /// restriction compatibility: every vertex ≤ face route agrees
    pub condition_a: bool,
    /// conjugation compatibility under the chamber rotations
    pub condition_b: bool,
    pub checks_a: usize,
    pub checks_b: usize,
}

/// Condition (a): for every face S and every vertex i ∈ S, restricting the
/// vertex function along the refinement starting at i and relabeling blocks
/// to canonical order reproduces the face function. Condition (b): for the
/// chamber rotations g (vertex i ↦ i+k), the transported function equals
/// the function computed at the image facet.
pub fn check_frobenius_structure(datum: &MatchingDatum) -> Result<FrobeniusReport> {
    frobenius_checks(&datum_functions(datum)?)
}

fn frobenius_checks(funcs: &DatumFunctions) -> Result<FrobeniusReport> {
    let datum = &funcs.datum;
    let n = datum.big_n;
    let mut cond_a = true;
    let mut checks_a = 0usize;
    for facet in chamber_faces(n) {
        let face_fn = funcs.sheaf_side(&facet)?;
        let starts = facet.block_starts();
        let r = starts.len();
        for (idx_i, &_i) in starts.iter().enumerate() {
            // composition in cyclic order starting at vertex starts[idx_i]
            let canonical = facet.composition();
            let rotated: Vec<u32> = (0..r).map(|j| canonical[(idx_i + j) % r]).collect();
            let levi = LeviDatum::new(n, datum.q, rotated)?;
            let restricted = if facet.is_vertex() {
                funcs.vertex_sheaf.clone()
            } else {
                hc_restrict(&funcs.vertex_sheaf, &levi)?
            };
            // block p of the restricted function starts at starts[(idx_i+p) mod r];
            // canonical block j therefore sits at position (j - idx_i) mod r
            let perm: Vec<usize> = (0..r).map(|j| (j + r - idx_i) % r).collect();
            let relabeled = permute_blocks(&restricted, &perm)?;
            checks_a += 1;
            if relabeled != face_fn {
                cond_a = false;
            }
        }
    }
    let mut cond_b = true;
    let mut checks_b = 0usize;
    for k in 0..n {
        for facet in chamber_faces(n) {
            let image = facet.rotate(k);
            let f_source = funcs.sheaf_side(&facet)?;
            let f_image = funcs.sheaf_side(&image)?;
            // block of `facet` starting at s maps to the block of `image`
            // starting at (s+k) mod N
            let src_starts = facet.block_starts();
            let img_starts = image.block_starts();
            let perm: Vec<usize> = img_starts
                .iter()
                .map(|&t| {
                    let s = (t + n - k % n) % n;
                    src_starts
                        .iter()
                        .position(|&v| v == s)
                        .expect("rotation permutes block starts")
                })
                .collect();
            let transported = permute_blocks(&f_source, &perm)?;
            checks_b += 1;
            if transported != f_image {
                cond_b = false;
            }
        }
    }
    Ok(FrobeniusReport {
        datum: datum.clone(),
        condition_a: cond_a,
        condition_b: cond_b,
        checks_a,
        checks_b,
    })
}

/// Reorder the blocks of a class function: output block k is input block
/// perm\[k\].
pub fn permute_blocks(f: &ClassFunction, perm: &[usize]) -> Result<ClassFunction> {
    if perm.len() != f.shape.blocks.len() {
        return Err(Error::ShapeMismatch("permutation arity mismatch".into()));
    }
    let new_blocks: Vec<u32> = perm.iter().map(|&p| f.shape.blocks[p]).collect();
    let new_shape = Shape::new(f.shape.q, new_blocks);
    let new_sets = new_shape.class_sets()?;
    let old_sets = f.shape.class_sets()?;
    let count: usize = new_sets.iter().map(|s| s.len()).product();
    let mut values = Vec::with_capacity(count);
    let mut new_tuple = vec![0usize; new_sets.len()];
    for flat in 0..count {
        let mut rest = flat;
        for i in (0..new_sets.len()).rev() {
            new_tuple[i] = rest % new_sets[i].len();
            rest /= new_sets[i].len();
        }
        let mut old_tuple = vec![0usize; new_tuple.len()];
        for (k, &p) in perm.iter().enumerate() {
            old_tuple[p] = new_tuple[k];
        }
        let mut old_flat = 0usize;
        for (i, &t) in old_tuple.iter().enumerate() {
            old_flat = old_flat * old_sets[i].len() + t;
        }
        values.push(f.values[old_flat].clone());
    }
    Ok(ClassFunction { shape: new_shape, values })
}

pub const CENTER_WARNING: &str = "facet sums on GL(N) are reported, not asserted: \
the anisotropic-centre hypothesis behind the distribution identity fails for GL(N)";

#[derive(Serialize)]
pub struct Theta0Report {
    pub datum: MatchingDatum,
    pub value: Cyclo,
    pub fixed_vertices: usize,
    pub fixed_edges: usize,
    pub truncated: bool,
    pub warning: String,
}

/// Θ⁰(g): the alternating sum over the facets of the tree fixed by g of the
/// sheaf-side value at the reduction of g, for GL(2) data.
pub fn theta0(
    datum: &MatchingDatum,
    g: &LMat,
    radius_hint: Option<u32>,
) -> Result<Theta0Report> {
    if datum.big_n != 2 {
        return Err(Error::Invalid("facet sums are implemented on the GL(2) tree".into()));
    }
    let field = fq_of_order(datum.q)?;
    let funcs = datum_functions(datum)?;
    let vertex_fn = funcs.sheaf_side(&Facet::vertex(2, 0))?;
    let edge_fn = funcs.sheaf_side(&Facet::chamber(2))?;
    let fixed = fixed_facets_gl2(&field, g, radius_hint)?;
    let gl2_set = class_set(2, datum.q)?;
    let gl1_set = class_set(1, datum.q)?;
    let mut value = Cyclo::integer(0);
    for v in &fixed.vertices {
        let reduction = vertex_reduction(&field, v, g)?;
        let class = crate::gl_classes::class_of_matrix(&field, &reduction)?;
        let idx = gl2_set.index_of(&class);
        value = value.add(&vertex_fn.values[idx]);
    }
    for e in &fixed.edges {
        let (r0, r1) = edge_reduction(&field, e, g)?;
        let i0 = gl1_class_index(&gl1_set, &field, r0);
        let i1 = gl1_class_index(&gl1_set, &field, r1);
        let idx = i0 * gl1_set.len() + i1;
        value = value.sub(&edge_fn.values[idx]);
    }
    Ok(Theta0Report {
        datum: datum.clone(),
        value,
        fixed_vertices: fixed.vertices.len(),
        fixed_edges: fixed.edges.len(),
        truncated: fixed.truncated,
        warning: CENTER_WARNING.to_string(),
    })
}

fn gl1_class_index(set: &crate::gl_classes::ClassSet, f: &Arc<Fq>, c: u8) -> usize {
    let class = GlClass {
        n: 1,
        q: f.q,
        data: vec![(vec![f.neg(c), 1], vec![1])],
    };
    set.index_of(&class)
}
