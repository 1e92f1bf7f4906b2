//! Faces of the standard chamber of the reduced Bruhat–Tits building of
//! GL(N) over a local field.
//!
//! A face is a nonempty set S of vertices 0..N−1 of the standard chamber
//! (vertex i is the homothety class of the lattice with the first i basis
//! vectors scaled by the uniformizer). The reductive quotient at S is the
//! product of GL-blocks cut out by the cyclic gaps of S; the Bruhat partial
//! order is vertex-set containment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Facet {
    #[serde(rename = "N")]
    pub big_n: u32,
    #[serde(rename = "S")]
    pub vertices: Vec<u32>,
}

impl Facet {
    pub fn new(big_n: u32, mut vertices: Vec<u32>) -> Result<Facet> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::Invalid("a facet needs at least one vertex".into()));
        }
        if vertices.iter().any(|&v| v >= big_n) {
            return Err(Error::Invalid(format!("vertex out of range for N = {big_n}")));
        }
        Ok(Facet { big_n, vertices })
    }

    pub fn vertex(big_n: u32, v: u32) -> Facet {
        Facet::new(big_n, vec![v]).expect("single vertex")
    }

    pub fn chamber(big_n: u32) -> Facet {
        Facet::new(big_n, (0..big_n).collect()).expect("chamber")
    }

    /// Polysimplex dimension in the reduced building.
    pub fn dim(&self) -> u32 {
        self.vertices.len() as u32 - 1
    }

    pub fn is_vertex(&self) -> bool {
        self.vertices.len() == 1
    }

    /// Bruhat order: x ≤ y iff the vertex set of x is contained in y's.
    pub fn leq(&self, other: &Facet) -> bool {
        self.big_n == other.big_n && self.vertices.iter().all(|v| other.vertices.contains(v))
    }

    /// The cyclic composition of N given by the gaps between consecutive
    /// vertices, listed from the smallest vertex.
    pub fn composition(&self) -> Vec<u32> {
        let s = &self.vertices;
        let r = s.len();
        let mut comp = Vec::with_capacity(r);
        for i in 0..r {
            let next = if i + 1 < r { s[i + 1] } else { s[0] + self.big_n };
            comp.push(next - s[i]);
        }
        comp
    }

    /// The starting vertex of each block, aligned with `composition()`.
    pub fn block_starts(&self) -> Vec<u32> {
        self.vertices.clone()
    }

    /// dim ν at this facet: N² − Σ m_i², always even.
    pub fn dim_nu(&self) -> u32 {
        let n2 = self.big_n * self.big_n;
        let s: u32 = self.composition().iter().map(|&m| m * m).sum();
        n2 - s
    }

    /// Image under the chamber rotation (vertex i ↦ i + k mod N).
    pub fn rotate(&self, k: u32) -> Facet {
        Facet::new(
            self.big_n,
            self.vertices
                .iter()
                .map(|&v| (v + k) % self.big_n)
                .collect(),
        )
        .expect("rotation preserves facets")
    }
}

/// All faces of the standard chamber: the 2^N − 1 nonempty vertex subsets,
/// ordered by dimension then lexicographically.
pub fn chamber_faces(big_n: u32) -> Vec<Facet> {
    assert!((1..=20).contains(&big_n));
    let mut out = Vec::with_capacity((1usize << big_n) - 1);
    for mask in 1u32..(1 << big_n) {
        let vertices: Vec<u32> = (0..big_n).filter(|&v| mask & (1 << v) != 0).collect();
        out.push(Facet { big_n, vertices });
    }
    out.sort_by_key(|f| (f.vertices.len(), f.vertices.clone()));
    out
}

/// The parabolic of the reductive quotient at x with Levi the quotient at y,
/// for x ≤ y: per block of x, the composition describing how y refines it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementParabolic {
    pub coarse: Facet,
    pub fine: Facet,
    /// refinement of each coarse block, in `coarse.composition()` order
    pub per_block: Vec<Vec<u32>>,
}

impl RefinementParabolic {
    /// dim τ = Σ over blocks of the block-level unipotent dimension; equals
    /// (dim ν_y − dim ν_x)/2.
    pub fn dim_tau(&self) -> u32 {
        self.per_block
            .iter()
            .map(|refinement| {
                let m: u32 = refinement.iter().sum();
                let s: u32 = refinement.iter().map(|&k| k * k).sum();
                (m * m - s) / 2
            })
            .sum()
    }
}

pub fn refinement_parabolic(x: &Facet, y: &Facet) -> Result<RefinementParabolic> {
    if !x.leq(y) {
        return Err(Error::IncomparableFacets);
    }
    let n = x.big_n;
    let starts = x.block_starts();
    let comp = x.composition();
    let mut per_block = Vec::with_capacity(starts.len());
    for (bi, &a) in starts.iter().enumerate() {
        let m = comp[bi];
        // vertices of y inside the cyclic interval [a, a+m), shifted to 0..m
        let mut offsets: Vec<u32> = y
            .vertices
            .iter()
            .map(|&v| (v + n - a) % n)
            .filter(|&d| d < m)
            .collect();
        offsets.sort_unstable();
        debug_assert_eq!(offsets.first(), Some(&0), "x ≤ y puts a in S_y");
        let mut refinement = Vec::with_capacity(offsets.len());
        for i in 0..offsets.len() {
            let next = if i + 1 < offsets.len() { offsets[i + 1] } else { m };
            refinement.push(next - offsets[i]);
        }
        per_block.push(refinement);
    }
    let rp = RefinementParabolic { coarse: x.clone(), fine: y.clone(), per_block };
    debug_assert_eq!(2 * rp.dim_tau(), y.dim_nu() - x.dim_nu());
    Ok(rp)
}
