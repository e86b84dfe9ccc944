//! Per-class chamber bundles: everything needed to re-check a class without rerunning the walk.

use serde::{Deserialize, Serialize};

use crate::chamber::lift::WallRecord;
use crate::chamber::walls::ChamberGroup;
use crate::chamber::{
    chamber_aut_group, class_chamber, interiority_check, s_lattice, vinberg, wall_invariants, InducedChamber,
    InteriorityCheck, WeylVector,
};
use crate::error::{Error, Result};
use crate::lattice::{EmbeddingModel, Lattice};
use crate::matrix::{qvec, Int, IntMatrix, Rat, RatMatrix};
use crate::serial;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassBundle {
    pub label: String,
    /// Index into the canonical class list.
    pub class_index: usize,
    pub root_type: String,
    #[serde(with = "serial::int_matrix")]
    pub r_gram: IntMatrix,
    /// Basis of `L_φ` in coordinates of `L10(2) ⊕ R`.
    #[serde(with = "serial::rat_matrix")]
    pub glue_basis: RatMatrix,
    #[serde(with = "serial::int_matrix")]
    pub lattice_gram: IntMatrix,
    /// Initial Weyl vector.
    #[serde(with = "serial::int_vec")]
    pub w0: Vec<Int>,
    #[serde(with = "serial::rat_vec")]
    pub walk_start: Vec<Rat>,
    /// Walls of `C(w0)` crossed by the walk, in order.
    #[serde(with = "serial::int_vecs")]
    pub walk_roots: Vec<Vec<Int>>,
    pub walk_ties: usize,
    pub weyl: WeylVector,
    pub interiority: InteriorityCheck,
    pub chamber: InducedChamber,
    pub group: ChamberGroup,
    /// One record per wall, in the order of `chamber.walls`.
    pub walls: Vec<WallRecord>,
}

impl ClassBundle {
    /// Walk, walls, group and a verified lift for every wall.
    pub fn compute(r: &Lattice, class_index: usize, root_type: &str, seed: u64, max_steps: usize) -> Result<Self> {
        let cc = class_chamber(r, seed, max_steps)?;
        let interiority = interiority_check(&cc.model, &qvec(&vinberg::a10()))?;
        if !interiority.holds() {
            return Err(Error::Verification(format!("a10 is not interior for class {class_index}: {interiority:?}")));
        }
        let group = chamber_aut_group(&cc.chamber)?;
        let mut walls = Vec::with_capacity(cc.chamber.walls.len());
        for wall in &cc.chamber.walls {
            let rec = wall_invariants(&cc.model, &cc.weyl.w, wall)?;
            if rec.lift.is_none() {
                return Err(Error::Verification(format!("no lift for the wall {wall:?} of class {class_index}")));
            }
            walls.push(rec);
        }
        Ok(ClassBundle {
            label: String::new(),
            class_index,
            root_type: root_type.to_string(),
            r_gram: r.gram().clone(),
            glue_basis: cc.model.basis.clone(),
            lattice_gram: cc.model.lattice.gram().clone(),
            w0: cc.w0.w.clone(),
            walk_start: cc.start.clone(),
            walk_roots: cc.walk.frame_roots.clone(),
            walk_ties: cc.ties,
            weyl: cc.weyl,
            interiority,
            chamber: cc.chamber,
            group,
            walls,
        })
    }

    /// The model rebuilt from `R` and the glue basis.
    pub fn model(&self) -> Result<EmbeddingModel> {
        EmbeddingModel::from_basis(s_lattice(), Lattice::new(self.r_gram.clone())?, self.glue_basis.clone())
    }

    /// Orbit index of each wall.
    pub fn wall_orbits(&self) -> Vec<usize> {
        let mut o = vec![0; self.chamber.walls.len()];
        for (k, orbit) in self.group.orbits.iter().enumerate() {
            for &i in orbit {
                o[i] = k;
            }
        }
        o
    }
}
