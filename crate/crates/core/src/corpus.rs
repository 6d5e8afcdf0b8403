//! Seeded generators for partitions, selections, and integer lattices.
//!
//! Every generator is deterministic in its seed, so a test corpus can be
//! regenerated byte for byte. The partition builders grow a connected
//! gluing graph piece by piece and then close a random batch of the
//! remaining open slots; the selection helpers search for piece subsets
//! that pass the essential or generic gates.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{IntMatrix, Lattice};
use crate::partition::{CircleRef, EndPoint, PartitionedSurface, Selection};
use crate::subsurface::{is_essential, is_generic_subsurface};
use crate::surface::SurfaceType;

/// RNG used by every generator in this module.
pub type CorpusRng = ChaCha8Rng;

/// Builds the generator RNG for a seed.
pub fn corpus_rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const KLEIN_BOTTLE: SurfaceType = SurfaceType::new(-2, 0, 0);

/// Piece types drawn by [`random_partition`], with the three-holed sphere
/// weighted double.
const PIECE_POOL: [SurfaceType; 8] = [
    SurfaceType::new(0, 3, 0),
    SurfaceType::new(0, 3, 0),
    SurfaceType::new(0, 2, 1),
    SurfaceType::new(0, 2, 0),
    SurfaceType::new(0, 1, 2),
    SurfaceType::new(-1, 2, 0),
    SurfaceType::new(-1, 1, 1),
    SurfaceType::new(-2, 1, 0),
];

fn pool_pick(rng: &mut CorpusRng) -> SurfaceType {
    PIECE_POOL[rng.gen_range(0..PIECE_POOL.len())]
}

/// Grows a connected partition with at most `max_pieces` pieces.
///
/// Each new piece is glued by its first slot to an open slot of the surface
/// built so far; afterwards a random batch of the remaining open slot pairs
/// is closed. Slots left open become ambient boundary.
pub fn random_partition(rng: &mut CorpusRng, max_pieces: usize) -> PartitionedSurface {
    let target = rng.gen_range(2..=max_pieces.max(2));
    let mut p = PartitionedSurface::new();
    p.add_piece("r0", pool_pick(rng)).expect("generated ids are fresh");
    for i in 1..target {
        let open = p.free_slots();
        if open.is_empty() {
            break;
        }
        let anchor = open[rng.gen_range(0..open.len())].clone();
        let id = format!("r{i}");
        p.add_piece(id.as_str(), pool_pick(rng)).expect("generated ids are fresh");
        p.glue(anchor, EndPoint::new(id.as_str(), 1), rng.gen_bool(0.5), None)
            .expect("anchor slot is open");
    }
    while rng.gen_bool(0.7) {
        let open = p.free_slots();
        if open.len() < 2 {
            break;
        }
        let first = open[rng.gen_range(0..open.len())].clone();
        let partners: Vec<EndPoint> =
            open.into_iter().filter(|e| e.piece != first.piece).collect();
        if partners.is_empty() {
            break;
        }
        let second = partners[rng.gen_range(0..partners.len())].clone();
        p.glue(first, second, rng.gen_bool(0.5), None).expect("both slots are open");
    }
    p
}

fn select_where(
    rng: &mut CorpusRng,
    p: &PartitionedSurface,
    mut keep: impl FnMut(&Selection) -> bool,
) -> Option<Selection> {
    let ids: Vec<_> = p.piece_ids().cloned().collect();
    for _ in 0..64 {
        let sel: Selection = ids.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if sel.is_empty() || sel.len() == ids.len() {
            continue;
        }
        if keep(&sel) {
            return Some(sel);
        }
    }
    None
}

/// Searches for a nonempty proper piece subset that passes the essential
/// gate, giving up after a bounded number of draws.
pub fn random_essential_selection(
    rng: &mut CorpusRng,
    p: &PartitionedSurface,
) -> Option<Selection> {
    select_where(rng, p, |sel| matches!(is_essential(p, sel), Ok(true)))
}

/// Same search with the generic-subsurface gate.
pub fn random_generic_selection(
    rng: &mut CorpusRng,
    p: &PartitionedSurface,
) -> Option<Selection> {
    select_where(rng, p, |sel| matches!(is_generic_subsurface(p, sel), Ok(true)))
}

fn corpus(
    seed: u64,
    count: usize,
    pick: fn(&mut CorpusRng, &PartitionedSurface) -> Option<Selection>,
) -> Vec<(PartitionedSurface, Selection)> {
    let mut rng = corpus_rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut budget = 10_000usize.saturating_mul(count.max(1));
    while out.len() < count {
        budget = budget.checked_sub(1).expect("selection search stalled");
        let p = random_partition(&mut rng, 8);
        if p.assemble_type().map(|t| t == KLEIN_BOTTLE).unwrap_or(true) {
            continue;
        }
        if let Some(sel) = pick(&mut rng, &p) {
            out.push((p, sel));
        }
    }
    out
}

/// Generates `count` pairs of a partition and an essential selection.
///
/// Partitions have at most eight pieces and never assemble to the closed
/// Klein bottle.
pub fn essential_corpus(seed: u64, count: usize) -> Vec<(PartitionedSurface, Selection)> {
    corpus(seed, count, random_essential_selection)
}

/// Same corpus with selections that pass the generic gate.
pub fn generic_corpus(seed: u64, count: usize) -> Vec<(PartitionedSurface, Selection)> {
    corpus(seed, count, random_generic_selection)
}

/// Instances of two selections sharing a middle component, each side
/// reaching the rest of the surface through a complement annulus.
///
/// The shared component and both flanks vary in shape, so the pairwise
/// verdicts cover both outcomes.
pub fn common_component_instances(
    seed: u64,
    count: usize,
) -> Vec<(PartitionedSurface, Selection, Selection)> {
    let mut rng = corpus_rng(seed);
    (0..count).map(|k| common_component_instance(&mut rng, k)).collect()
}

fn common_component_instance(
    rng: &mut CorpusRng,
    k: usize,
) -> (PartitionedSurface, Selection, Selection) {
    let mut p = PartitionedSurface::new();
    let center = format!("u{k}");
    let center_t = match rng.gen_range(0..3) {
        0 => SurfaceType::new(0, 3, 0),
        1 => SurfaceType::new(0, 2, 1),
        _ => SurfaceType::new(-1, 2, 0),
    };
    p.add_piece(center.as_str(), center_t).expect("generated ids are fresh");
    if center_t.boundary == 3 {
        let cap = format!("u{k}cap");
        p.add_piece(cap.as_str(), SurfaceType::new(0, 1, 2)).expect("generated ids are fresh");
        p.glue(EndPoint::new(center.as_str(), 3), EndPoint::new(cap.as_str(), 1), false, None)
            .expect("slots are open");
    }
    let mut selections = [Selection::new(), Selection::new()];
    for (side, sel) in selections.iter_mut().enumerate() {
        let link = format!("x{side}_{k}");
        p.add_piece(link.as_str(), SurfaceType::new(0, 2, 0)).expect("generated ids are fresh");
        p.glue(
            EndPoint::new(center.as_str(), side as u32 + 1),
            EndPoint::new(link.as_str(), 1),
            rng.gen_bool(0.5),
            None,
        )
        .expect("slots are open");
        let flank = format!("f{side}_{k}");
        let anchor = EndPoint::new(link.as_str(), 2);
        match (k + side * (k % 2)) % 3 {
            0 => {
                p.add_piece(flank.as_str(), SurfaceType::new(0, 3, 0))
                    .expect("generated ids are fresh");
                p.glue(anchor, EndPoint::new(flank.as_str(), 1), false, None)
                    .expect("slots are open");
                let ring = format!("y{side}_{k}");
                p.add_piece(ring.as_str(), SurfaceType::new(0, 2, 0))
                    .expect("generated ids are fresh");
                p.glue(
                    EndPoint::new(flank.as_str(), 2),
                    EndPoint::new(ring.as_str(), 1),
                    rng.gen_bool(0.5),
                    None,
                )
                .expect("slots are open");
                p.glue(
                    EndPoint::new(ring.as_str(), 2),
                    EndPoint::new(flank.as_str(), 3),
                    rng.gen_bool(0.5),
                    None,
                )
                .expect("slots are open");
            }
            1 => {
                p.add_piece(flank.as_str(), SurfaceType::new(0, 3, 0))
                    .expect("generated ids are fresh");
                p.glue(anchor, EndPoint::new(flank.as_str(), 1), false, None)
                    .expect("slots are open");
                for c in 0..2u32 {
                    let cap = format!("c{side}{c}_{k}");
                    p.add_piece(cap.as_str(), SurfaceType::new(0, 1, 2))
                        .expect("generated ids are fresh");
                    p.glue(
                        EndPoint::new(flank.as_str(), 2 + c),
                        EndPoint::new(cap.as_str(), 1),
                        false,
                        None,
                    )
                    .expect("slots are open");
                }
            }
            _ => {
                p.add_piece(flank.as_str(), SurfaceType::new(-1, 1, 1))
                    .expect("generated ids are fresh");
                p.glue(anchor, EndPoint::new(flank.as_str(), 1), false, None)
                    .expect("slots are open");
            }
        }
        sel.insert(flank.as_str().into());
        sel.insert(center.as_str().into());
    }
    let [s0, s1] = selections;
    (p, s0, s1)
}

/// A family of partitions assembling to the Klein bottle with one hole,
/// built from a refined one-piece decomposition with a boundary collar and
/// a few extra annulus insertions.
pub fn klein_ambient_family(seed: u64, count: usize) -> Vec<PartitionedSurface> {
    let mut rng = corpus_rng(seed);
    (0..count)
        .map(|k| {
            let mut p = PartitionedSurface::new();
            p.add_piece("kcore", SurfaceType::new(0, 2, 0)).expect("generated ids are fresh");
            p.add_piece("kbody", SurfaceType::new(0, 3, 0)).expect("generated ids are fresh");
            let label = format!("klein-core(f{k})");
            p.glue(EndPoint::new("kcore", 1), EndPoint::new("kbody", 1), false, Some(label.clone()))
                .expect("slots are open");
            p.glue(EndPoint::new("kcore", 2), EndPoint::new("kbody", 2), true, Some(label))
                .expect("slots are open");
            let mut tail = EndPoint::new("kbody", 3);
            for j in 0..rng.gen_range(1..=3) {
                let id = format!("collar{j}");
                p.add_piece(id.as_str(), SurfaceType::new(0, 2, 0))
                    .expect("generated ids are fresh");
                p.glue(tail, EndPoint::new(id.as_str(), 1), rng.gen_bool(0.5), None)
                    .expect("slots are open");
                tail = EndPoint::new(id.as_str(), 2);
            }
            for _ in 0..rng.gen_range(0..=2) {
                let edges: Vec<CircleRef> = p
                    .circle_refs()
                    .into_iter()
                    .filter(|c| matches!(c, CircleRef::Edge(_)))
                    .collect();
                let at = edges[rng.gen_range(0..edges.len())].clone();
                p = p.insert_annulus(&at).expect("edge circles admit an annulus").0;
            }
            p
        })
        .collect()
}

/// A random lattice in `Z^n` for `n` up to `max_rank`, with up to `n + 1`
/// generators and entries bounded by `max_entry`.
pub fn random_lattice(rng: &mut CorpusRng, max_rank: usize, max_entry: i64) -> Lattice {
    let ambient = rng.gen_range(1..=max_rank.max(1));
    let k = rng.gen_range(0..=ambient + 1);
    let rows: Vec<Vec<i64>> = (0..k)
        .map(|_| (0..ambient).map(|_| rng.gen_range(-max_entry..=max_entry)).collect())
        .collect();
    Lattice::from_rows(ambient, &rows)
}

/// Random integer matrix with shape up to `max_rows` by `max_cols` and
/// entries uniform in `[-max_entry, max_entry]`.
pub fn random_matrix(rng: &mut CorpusRng, max_rows: usize, max_cols: usize, max_entry: i64) -> IntMatrix {
    let rows = rng.gen_range(1..=max_rows.max(1));
    let cols = rng.gen_range(1..=max_cols.max(1));
    let data: Vec<Vec<BigInt>> = (0..rows)
        .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-max_entry..=max_entry))).collect())
        .collect();
    IntMatrix::from_rows(cols, data)
}

/// Random square nonsingular generator matrix for a sublattice of Z^n,
/// with n up to `max_rank`. The result has finite index in Z^n.
pub fn random_full_rank_instance(rng: &mut CorpusRng, max_rank: usize, max_entry: i64) -> Lattice {
    let n = rng.gen_range(1..=max_rank.max(1));
    loop {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = BigInt::from(rng.gen_range(-max_entry..=max_entry));
            }
        }
        if !m.determinant().is_zero() {
            return Lattice::new(n, m);
        }
    }
}

/// Random homomorphism out of Z^rows, as a matrix acting on row vectors
/// from the right; the column count is drawn up to `rows`.
pub fn random_map(rng: &mut CorpusRng, rows: usize, max_entry: i64) -> IntMatrix {
    let cols = rng.gen_range(1..=rows.max(1));
    let data: Vec<Vec<BigInt>> = (0..rows)
        .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-max_entry..=max_entry))).collect())
        .collect();
    IntMatrix::from_rows(cols, data)
}

/// Random subgroup of `g`: a few small integer combinations of the
/// generators of `g`.
pub fn random_sublattice(rng: &mut CorpusRng, g: &Lattice) -> Lattice {
    let gens = g.generators();
    let k = rng.gen_range(1..=gens.rows().max(1));
    let rows: Vec<Vec<BigInt>> = (0..k)
        .map(|_| {
            let mut row = vec![BigInt::zero(); g.ambient_rank()];
            for i in 0..gens.rows() {
                let c = BigInt::from(rng.gen_range(-2i64..=2));
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot += &c * gens.at(i, j);
                }
            }
            row
        })
        .collect();
    Lattice::new(g.ambient_rank(), IntMatrix::from_rows(g.ambient_rank(), rows))
}

/// A finite-index sublattice of `g`, produced by mixing a basis of `g`
/// with a random integer matrix of nonzero determinant.
pub fn random_finite_index_sublattice(rng: &mut CorpusRng, g: &Lattice) -> Lattice {
    let basis = g.basis();
    let rank = basis.rows();
    if rank == 0 {
        return Lattice::new(g.ambient_rank(), IntMatrix::zero(0, g.ambient_rank()));
    }
    let mix = loop {
        let mut m = IntMatrix::zero(rank, rank);
        for i in 0..rank {
            for j in 0..rank {
                *m.at_mut(i, j) = BigInt::from(rng.gen_range(-3i64..=3));
            }
        }
        if !m.determinant().is_zero() {
            break m;
        }
    };
    Lattice::new(g.ambient_rank(), mix.mul(&basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::relative_index;
    use crate::partition::PieceId;

    #[test]
    fn partitions_are_connected_and_reproducible() {
        let mut rng = corpus_rng(7);
        let mut again = corpus_rng(7);
        for _ in 0..20 {
            let p = random_partition(&mut rng, 8);
            let q = random_partition(&mut again, 8);
            assert!(p.same_model(&q));
            assert!(p.assemble_type().is_ok());
            assert!(p.pieces().count() <= 8);
        }
    }

    #[test]
    fn essential_corpus_passes_its_own_gate() {
        let corpus = essential_corpus(11, 10);
        assert_eq!(corpus.len(), 10);
        for (p, sel) in &corpus {
            assert!(matches!(is_essential(p, sel), Ok(true)));
            assert_ne!(p.assemble_type().expect("connected"), KLEIN_BOTTLE);
        }
    }

    #[test]
    fn common_component_instances_share_the_middle_piece() {
        for (k, (p, s0, s1)) in common_component_instances(3, 6).into_iter().enumerate() {
            let center: PieceId = format!("u{k}").as_str().into();
            assert!(s0.contains(&center) && s1.contains(&center));
            assert!(matches!(is_generic_subsurface(&p, &s0), Ok(true)));
            assert!(matches!(is_generic_subsurface(&p, &s1), Ok(true)));
        }
    }

    #[test]
    fn klein_family_assembles_to_the_one_holed_klein_bottle() {
        for p in klein_ambient_family(5, 8) {
            assert_eq!(p.assemble_type().expect("connected"), SurfaceType::new(-2, 1, 0));
        }
    }

    #[test]
    fn shared_component_instances_admit_symmetric_verdicts() {
        let mut seen_true = false;
        let mut seen_false = false;
        for (p, s0, s1) in common_component_instances(17, 12) {
            let a = crate::commensurability::commensurable(&p, &s0, &s1).expect("gates pass");
            let b = crate::commensurability::commensurable(&p, &s1, &s0).expect("gates pass");
            assert_eq!(a.commensurable, b.commensurable);
            assert_eq!(a.obstruction, b.obstruction);
            seen_true |= a.commensurable;
            seen_false |= !a.commensurable;
        }
        assert!(seen_true && seen_false);
    }

    #[test]
    fn sublattices_have_finite_index() {
        let mut rng = corpus_rng(13);
        for _ in 0..25 {
            let g = random_lattice(&mut rng, 4, 10);
            let h = random_finite_index_sublattice(&mut rng, &g);
            let idx = relative_index(&g, &h).expect("h lies in g");
            assert!(idx.is_finite());
        }
    }
}
