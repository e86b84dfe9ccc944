//! Chambers: the Vinberg chamber of `L10`, Weyl vectors and Conway chambers of the rank-26
//! overlattices `L_φ ⊃ L10(2) ⊕ R`, chamber walking, induced chambers, their automorphism
//! groups, and lifts of wall reflections.

pub mod affine;
pub mod lift;
pub mod vinberg;
pub mod walk;
pub mod walls;
pub mod weyl;

use num_traits::{One, Signed};

use crate::catalog;
use crate::definite::Definite;
use crate::error::{Error, Result};
use crate::fqf::{discriminant_form, discriminant_form_with, find_glue_isomorphism, halves_generators};
use crate::lattice::{overlattice_from_glue, EmbeddingModel, Lattice};
use crate::matrix::{qvec, qvec_to_int, vec_gcd, Int, Rat};

pub use affine::{separating_roots, separating_vectors, SeparatingRoot, Slice};
pub use lift::{wall_invariants, wall_lift_search, WallLift, WallRecord};
pub use walk::{walk_to_chamber, LeechFrame, WalkResult};
pub use walls::{
    adjacent_chamber, chamber_aut_group, chamber_isomorphic, induced_chamber_walls, interiority_check, ChamberGroup,
    InducedChamber, InteriorityCheck,
};
pub use weyl::{conway_interior_point, is_weyl_vector, weyl_vector_from_isotropic, WeylCheck, WeylVector};

/// `L10(2)`.
pub fn s_lattice() -> Lattice {
    catalog::l10().rescale(2).expect("nonzero scale")
}

/// The overlattice `L_φ` of `L10(2) ⊕ R` for the first glue map found. Every class of the
/// genus carries exactly one such embedding up to isomorphism since `O(L10) → O(q)` is onto.
pub fn embedding_model(r: &Lattice) -> Result<EmbeddingModel> {
    if r.rank() != 16 || !r.is_negative_definite() || !r.is_even() {
        return Err(Error::Precondition("complement must be even negative definite of rank 16".into()));
    }
    let s = s_lattice();
    let qs = discriminant_form_with(&s, halves_generators(10))?;
    let qr = discriminant_form(r)?.negate();
    let phi = find_glue_isomorphism(&qs, &qr).ok_or_else(|| Error::Invalid("discriminant forms are not anti-isometric".into()))?;
    let model = overlattice_from_glue(&s, r, &phi)?;
    if !model.lattice.is_unimodular() || !model.lattice.is_even() {
        return Err(Error::Verification("glued lattice is not even unimodular".into()));
    }
    Ok(model)
}

/// `ι(x)` for `x ∈ L10` given in the basis `e_i`, as integer `L_φ`-coordinates.
pub fn embed_l10(model: &EmbeddingModel, x: &[Int]) -> Result<Vec<Int>> {
    qvec_to_int(&model.embed_m(&qvec(x))).ok_or_else(|| Error::Verification("image of L10(2) is not integral".into()))
}

/// A Weyl vector of the model from the isotropic vector `ι(δ)` of `L10(2)`, oriented so that
/// `⟨w, ι(a10)⟩ > 0`.
pub fn find_weyl_vector(model: &EmbeddingModel) -> Result<WeylVector> {
    let z = embed_l10(model, &vinberg::null_root())?;
    let g = vec_gcd(&z);
    let z: Vec<Int> = z.iter().map(|x| x / &g).collect();
    let orient = qvec(&embed_l10(model, &vinberg::a10())?);
    weyl_vector_from_isotropic(&model.lattice, &z, &orient)
}

/// Whether the complement is the rootless class, which has no induced chambers of finite type.
pub fn is_rootless(r: &Lattice) -> Result<bool> {
    Ok(Definite::new(r)?.count_vectors(-2)? == 0)
}

/// Everything computed for one class: the model, the Weyl vector of the chamber containing
/// `ι(a10)`, and the walk that reached it.
#[derive(Clone, Debug)]
pub struct ClassChamber {
    pub model: EmbeddingModel,
    pub w0: WeylVector,
    pub walk: WalkResult,
    pub weyl: WeylVector,
    /// The start of the walk inside `C(w0)`: `a26` or a perturbation of it.
    pub start: Vec<Rat>,
    /// Start points rejected because two walls were crossed at once.
    pub ties: usize,
    pub chamber: InducedChamber,
}

/// Random perturbations `a10 + ε d` with `d` a small vector of `L10` and `ε = 2⁻⁶⁻ᵏ`.
pub fn perturbations(seed: u64, count: usize) -> Vec<Vec<Rat>> {
    perturb(&qvec(&vinberg::a10()), seed, count)
}

fn perturb(a: &[Rat], seed: u64, count: usize) -> Vec<Vec<Rat>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let eps = Rat::new(Int::one(), Int::from(1u64 << (6 + k.min(40))));
            a.iter().map(|x| x + &eps * Rat::from_integer(Int::from(rng.gen_range(-8i64..=8)))).collect()
        })
        .collect()
}

/// Vectors `x` of `L10` with `⟨x, a⟩ > 0 > ⟨x, b⟩` and norm `-2` or `-4`. A root of `L_φ`
/// separating `ι(a)` from `ι(b)` projects to `x/2 ∈ 𝕊∨` for one of these `x`, so an empty
/// result rules out separating roots.
pub fn separating_candidates(a: &[Rat], b: &[Rat]) -> Result<Vec<Vec<Int>>> {
    if a == b {
        return Ok(Vec::new());
    }
    let g = catalog::l10_gram();
    let mut out = Vec::new();
    for norm in [-2, -4] {
        out.extend(affine::separating_vectors(&g, a, b, norm)?.into_iter().map(|s| s.root));
    }
    Ok(out)
}

/// Checks (i) and (ii) for a perturbed `a10′`: the roots of `L_φ` orthogonal to `ι(a10′)` are
/// those of `R`, and no root of `L_φ` separates `ι(a10)` from `ι(a10′)`.
pub fn perturbation_ok(model: &EmbeddingModel, a10: &[Rat], a10p: &[Rat]) -> Result<bool> {
    if !interiority_check(model, a10p)?.holds() {
        return Ok(false);
    }
    Ok(separating_candidates(a10, a10p)?.is_empty())
}

/// Perturbs `a10` to `a10 + ε d` (`ε = 2⁻⁶⁻ᵏ` on retry `k`) until (i), (ii) and the caller's
/// distinctness test (iii) hold.
pub fn perturb_interior(
    model: &EmbeddingModel,
    a10: &[Rat],
    seed: u64,
    budget: usize,
    distinct: &mut dyn FnMut(&[Rat]) -> Result<bool>,
) -> Result<Vec<Rat>> {
    let check = interiority_check(model, a10)?;
    if !check.holds() {
        return Err(Error::Precondition(format!("a10 is not interior: {check:?}")));
    }
    let mut rejected = [0usize; 3];
    for cand in perturb(a10, seed, budget) {
        if !interiority_check(model, &cand)?.holds() {
            rejected[0] += 1;
        } else if !separating_candidates(a10, &cand)?.is_empty() {
            rejected[1] += 1;
        } else if !distinct(&cand)? {
            rejected[2] += 1;
        } else {
            return Ok(cand);
        }
    }
    Err(Error::Exhausted(format!(
        "{budget} perturbations rejected (interiority {}, separation {}, distinctness {})",
        rejected[0], rejected[1], rejected[2]
    )))
}

/// Runs the walk from `a26` (then from perturbations of it inside `C(w0)` after a tie) to
/// `ι(a10)` and computes the induced chamber.
pub fn class_chamber(r: &Lattice, seed: u64, max_steps: usize) -> Result<ClassChamber> {
    if is_rootless(r)? {
        return Err(Error::Unsupported("the rootless class has no induced chamber of this kind".into()));
    }
    let model = embedding_model(r)?;
    let l = &model.lattice;
    let w0 = find_weyl_vector(&model)?;
    let frame0 = LeechFrame::from_weyl(l, &w0)?;
    let (_, a26) = conway_interior_point(l, &w0)?;
    let a26 = qvec(&a26);
    let mut starts = vec![a26.clone()];
    starts.extend(perturb(&a26, seed, 24));
    let a10 = qvec(&vinberg::a10());
    let t = model.embed_m(&a10);
    let mut ties = 0;
    let w0q = qvec(&w0.w);
    for start in starts {
        if !l.gram().to_rat().form(&start, &w0q).is_positive() || !frame0.walls_against(&start, true)?.is_empty() {
            continue;
        }
        let walk = match walk_to_chamber(l, &frame0, &start, &t, max_steps) {
            Ok(w) => w,
            Err(Error::Tie) => {
                ties += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let frame = LeechFrame::new(l, &walk.w, &walk.partner)?;
        if !walk::chamber_contains(&frame, &t)? {
            return Err(Error::Verification("walk ended outside the target chamber".into()));
        }
        let check = is_weyl_vector(l, &walk.w)?;
        if !check.is_weyl {
            return Err(Error::Verification("walk produced a non-Weyl vector".into()));
        }
        let weyl = WeylVector { w: walk.w.clone(), quotient: check.quotient, quotient_roots: check.roots };
        let chamber = induced_chamber_walls(&model, &weyl.w)?;
        return Ok(ClassChamber { model, w0, walk, weyl, start, chamber, ties });
    }
    Err(Error::Exhausted(format!("no start point avoided ties ({ties} ties)")))
}
