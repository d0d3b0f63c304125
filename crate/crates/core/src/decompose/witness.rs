//! Witness records in their stable JSON form:
//!
//! ```text
//! {"n": .., "kind": "tri",  "components": {"practical": .., "tri_index": ..},
//!  "proof": {"x": .., "m": .., "s": ..}}
//! {"n": .., "kind": "poly", "components": {"practical": .., "x": .., "y": .., "s": ..},
//!  "proof": {"r": .., "k": .., "n_k": .., "residues": [{"modulus": .., "x": .., "y": ..}, ..],
//!            "certification": "quotient_bound" | "direct"}}
//! ```

use serde::{Deserialize, Serialize};

use super::theorem2::{Certification, PolyDecomposition, Theorem2Decomposition};
use super::tri::TriDecomposition;
use crate::polygonal::polygonal;
use crate::practical::is_practical;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Tri,
    Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Components {
    #[serde(rename_all = "snake_case")]
    Poly { practical: u64, x: u64, y: u64, s: u32 },
    Tri { practical: u64, tri_index: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub modulus: u64,
    pub x: u64,
    pub y: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Proof {
    Poly {
        r: usize,
        k: u32,
        n_k: u64,
        residues: Vec<ResidueEntry>,
        certification: Certification,
    },
    Tri { x: u64, m: u32, s: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: u64,
    pub kind: WitnessKind,
    pub components: Components,
    pub proof: Proof,
}

impl From<&TriDecomposition> for Witness {
    fn from(d: &TriDecomposition) -> Self {
        Witness {
            n: d.n,
            kind: WitnessKind::Tri,
            components: Components::Tri { practical: d.practical_part, tri_index: d.tri_index },
            proof: Proof::Tri { x: d.x, m: d.m, s: d.s },
        }
    }
}

impl From<&Theorem2Decomposition> for Witness {
    fn from(d: &Theorem2Decomposition) -> Self {
        let PolyDecomposition { n, s_gon, practical_part, x, y } = d.decomposition;
        Witness {
            n,
            kind: WitnessKind::Poly,
            components: Components::Poly { practical: practical_part, x, y, s: s_gon },
            proof: Proof::Poly {
                r: d.proof.r,
                k: d.proof.k,
                n_k: d.proof.n_k,
                residues: d
                    .proof
                    .residues
                    .iter()
                    .map(|pc| ResidueEntry { modulus: pc.modulus, x: pc.x_res, y: pc.y_res })
                    .collect(),
                certification: d.proof.certification,
            },
        }
    }
}

impl Witness {
    /// Recomputes the sum and the practicality of the practical component
    /// from the witness fields alone; the proof section is not trusted.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let (practical, rest) = match (&self.kind, &self.components) {
            (WitnessKind::Tri, Components::Tri { practical, tri_index }) => {
                let t = *tri_index as u128;
                (*practical, t * (t + 1) / 2)
            }
            (WitnessKind::Poly, Components::Poly { practical, x, y, s }) => {
                let px = polygonal(*s, *x).map_err(|e| e.to_string())?;
                let py = polygonal(*s, *y).map_err(|e| e.to_string())?;
                (*practical, px + py)
            }
            _ => return Err("kind does not match components".into()),
        };
        if practical as u128 + rest != self.n as u128 {
            return Err(format!("components do not sum to {}", self.n));
        }
        let report = is_practical(practical).map_err(|e| e.to_string())?;
        if !report.practical {
            return Err(format!(
                "{practical} is not practical (prime {} violates the bound)",
                report.failing_prime.unwrap_or(0)
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }

    /// Text rendering such as `10 = 4 (practical) + 6 (T_3)`.
    pub fn to_text(&self) -> String {
        match &self.components {
            Components::Tri { practical, tri_index } => {
                let t = *tri_index as u128 * (*tri_index as u128 + 1) / 2;
                format!("{} = {} (practical) + {} (T_{})", self.n, practical, t, tri_index)
            }
            Components::Poly { practical, x, y, s } => {
                let px = polygonal(*s, *x).unwrap_or(0);
                let py = polygonal(*s, *y).unwrap_or(0);
                format!(
                    "{} = {} (practical) + {} (P_{}({})) + {} (P_{}({}))",
                    self.n, practical, px, s, x, py, s, y
                )
            }
        }
    }
}
