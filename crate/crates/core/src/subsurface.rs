//! Subsurfaces as piece selections: essentiality, genericity, kernels of the
//! inclusion-induced maps, virtually abelian classification, and the basic
//! circle systems that generate the twist subgroups.

use std::collections::BTreeMap;

use crate::partition::{CircleRef, EndPoint, PartitionedSurface, PieceId, Selection};
use crate::surface::{classify_piece, PieceClass, SurfaceType};
use crate::Error;

pub(crate) fn validate_selection(p: &PartitionedSurface, sel: &Selection) -> Result<(), Error> {
    for id in sel {
        if p.piece_type(id).is_none() {
            return Err(Error::UnknownPiece(id.clone()));
        }
    }
    if sel.len() == p.piece_count() {
        return Err(Error::SelectionIsAll);
    }
    Ok(())
}

fn essential_inner(p: &PartitionedSurface, sel: &Selection) -> Result<bool, Error> {
    if sel.is_empty() {
        return Ok(true);
    }
    if !p.free_slots_of(sel).is_empty() {
        return Ok(false);
    }
    let comps: Vec<(Selection, SurfaceType)> = p
        .components_within(sel)
        .into_iter()
        .map(|c| {
            let t = p.assemble_type_of(&c)?;
            Ok((c, t))
        })
        .collect::<Result<_, Error>>()?;
    let excluded = [SurfaceType::new(0, 1, 0), SurfaceType::new(0, 1, 1), SurfaceType::new(-1, 1, 0)];
    if comps.iter().any(|(_, t)| excluded.contains(t)) {
        return Ok(false);
    }
    // An annulus component parallel to a boundary circle of another
    // component is redundant, hence inessential.
    let classes = p.isotopy_classes();
    for (i, (comp, t)) in comps.iter().enumerate() {
        if classify_piece(*t) != PieceClass::Annulus {
            continue;
        }
        let Some(b) = p.boundary_edges_of(comp).first().copied() else { continue };
        let meridian = classes.class_of(&CircleRef::Edge(b)).expect("edge is a known circle");
        for (j, (other, _)) in comps.iter().enumerate() {
            if i == j {
                continue;
            }
            for e in p.boundary_edges_of(other) {
                if meridian.members.contains(&CircleRef::Edge(e)) {
                    return Ok(false);
                }
            }
        }
    }
    let complement: Selection = p.piece_ids().filter(|id| !sel.contains(*id)).cloned().collect();
    for comp in p.components_within(&complement) {
        if p.assemble_type_of(&comp)? == SurfaceType::new(0, 1, 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the selection is an essential subsurface: no disk-like or
/// Möbius-like components, no unglued slots, no annulus component parallel
/// to another component's boundary, and no unpunctured-disk complement
/// component. The empty selection is vacuously essential.
pub fn is_essential(p: &PartitionedSurface, sel: &Selection) -> Result<bool, Error> {
    validate_selection(p, sel)?;
    essential_inner(p, sel)
}

/// Whether every boundary circle of the selection is generic. Requires an
/// essential selection.
pub fn is_generic_subsurface(p: &PartitionedSurface, sel: &Selection) -> Result<bool, Error> {
    validate_selection(p, sel)?;
    if !essential_inner(p, sel)? {
        return Err(Error::NotEssential);
    }
    for comp in p.components_within(sel) {
        for e in p.boundary_edges_of(&comp) {
            if !p.is_generic_circle(&CircleRef::Edge(e))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Complement components that are a single unpunctured annulus piece glued
/// to the selection along both of its circles. Each is returned with its
/// edge pair in sorted order.
pub fn exterior_cylinders(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<Vec<(PieceId, (CircleRef, CircleRef))>, Error> {
    validate_selection(p, sel)?;
    let complement: Selection = p.piece_ids().filter(|id| !sel.contains(*id)).cloned().collect();
    let mut out = Vec::new();
    for comp in p.components_within(&complement) {
        if comp.len() != 1 {
            continue;
        }
        let a = comp.iter().next().expect("singleton").clone();
        if p.piece_type(&a) != Some(SurfaceType::new(0, 2, 0)) {
            continue;
        }
        let e1 = p.edge_at(&EndPoint { piece: a.clone(), slot: 1 });
        let e2 = p.edge_at(&EndPoint { piece: a.clone(), slot: 2 });
        let (Some(e1), Some(e2)) = (e1, e2) else { continue };
        let adjacent = [e1, e2].iter().all(|e| {
            p.edge(*e)
                .and_then(|g| g.other_end(&a))
                .is_some_and(|end| sel.contains(&end.piece))
        });
        if adjacent {
            let (b, b2) = (CircleRef::Edge(e1.min(e2)), CircleRef::Edge(e1.max(e2)));
            out.push((a, (b, b2)));
        }
    }
    Ok(out)
}

/// Enumerated twist candidates of an essential selection, shared by the
/// kernel computations and the lattice-rank routes.
pub(crate) struct TwistCandidates {
    /// Connected components with their types, ordered by smallest piece id.
    pub components: Vec<(Selection, SurfaceType)>,
    /// Per component, its boundary circles in sorted order. Essentiality
    /// guarantees these are all gluing edges.
    pub boundary: Vec<Vec<CircleRef>>,
    /// Non-generic boundary circles of non-annulus components, sorted.
    pub nongeneric_boundary: Vec<CircleRef>,
    /// Indices of annulus-typed components whose meridian is non-generic.
    pub nongeneric_meridians: Vec<usize>,
    /// Exterior cylinders with their edge pairs.
    pub cylinders: Vec<(PieceId, (CircleRef, CircleRef))>,
}

pub(crate) fn twist_candidates(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<TwistCandidates, Error> {
    validate_selection(p, sel)?;
    let ambient = p.assemble_type()?;
    if ambient == SurfaceType::new(-2, 0, 0) {
        return Err(Error::AmbientExcluded(ambient));
    }
    if !essential_inner(p, sel)? {
        return Err(Error::NotEssential);
    }
    let mut components = Vec::new();
    let mut boundary = Vec::new();
    for comp in p.components_within(sel) {
        let t = p.assemble_type_of(&comp)?;
        debug_assert!(p.free_slots_of(&comp).is_empty(), "essential selections have no open slots");
        let mut circles: Vec<CircleRef> =
            p.boundary_edges_of(&comp).into_iter().map(CircleRef::Edge).collect();
        circles.sort();
        components.push((comp, t));
        boundary.push(circles);
    }
    let mut nongeneric_boundary = Vec::new();
    let mut nongeneric_meridians = Vec::new();
    for (idx, (_, t)) in components.iter().enumerate() {
        if classify_piece(*t) == PieceClass::Annulus {
            // The meridian is isotopic to either boundary circle, so its
            // genericity matches theirs.
            if let Some(b) = boundary[idx].first() {
                if !p.is_generic_circle(b)? {
                    nongeneric_meridians.push(idx);
                }
            }
        } else {
            for b in &boundary[idx] {
                if !p.is_generic_circle(b)? {
                    nongeneric_boundary.push(b.clone());
                }
            }
        }
    }
    nongeneric_boundary.sort();
    let cylinders = exterior_cylinders(p, sel)?;
    Ok(TwistCandidates { components, boundary, nongeneric_boundary, nongeneric_meridians, cylinders })
}

/// Generators of the kernel of the map induced by including the selection's
/// regular neighbourhood into the ambient surface.
///
/// The kernel is free abelian on three families: twists along non-generic
/// boundary circles, twists along non-generic meridians of annulus
/// components, and the twist differences across exterior cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelDescription {
    /// Non-generic boundary circles of non-annulus components.
    pub boundary_twists: Vec<CircleRef>,
    /// Non-generic annulus-component meridians, each named by its smallest
    /// boundary edge.
    pub meridian_twists: Vec<CircleRef>,
    /// Exterior cylinder edge pairs whose twist difference dies.
    pub cylinder_pairs: Vec<(CircleRef, CircleRef)>,
    /// Number of free generators.
    pub rank: usize,
}

impl KernelDescription {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0
    }

    /// Stable textual names for the generators.
    pub fn generator_symbols(&self, p: &PartitionedSurface) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.boundary_twists {
            out.push(format!("t({})", p.display_circle(a)));
        }
        for c in &self.meridian_twists {
            out.push(format!("t(meridian({}))", p.display_circle(c)));
        }
        for (b, b2) in &self.cylinder_pairs {
            out.push(format!("t({})*t({})^-1", p.display_circle(b), p.display_circle(b2)));
        }
        out
    }
}

/// Compute the kernel generators for the selection. Requires an essential
/// selection and an ambient surface other than the Klein bottle.
pub fn kernel_description(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<KernelDescription, Error> {
    let cands = twist_candidates(p, sel)?;
    let boundary_twists = cands.nongeneric_boundary.clone();
    let meridian_twists: Vec<CircleRef> = cands
        .nongeneric_meridians
        .iter()
        .map(|idx| cands.boundary[*idx].first().expect("annulus component has edges").clone())
        .collect();
    let cylinder_pairs: Vec<(CircleRef, CircleRef)> =
        cands.cylinders.iter().map(|(_, pair)| pair.clone()).collect();
    let rank = boundary_twists.len() + meridian_twists.len() + cylinder_pairs.len();
    Ok(KernelDescription { boundary_twists, meridian_twists, cylinder_pairs, rank })
}

/// Whether the inclusion-induced map is injective: the kernel is trivial.
/// Refused on the torus and the Klein bottle, where isotopy collapses too
/// much for the kernel enumeration to be sound.
pub fn is_injective(p: &PartitionedSurface, sel: &Selection) -> Result<bool, Error> {
    let ambient = p.assemble_type()?;
    if ambient == SurfaceType::new(1, 0, 0) || ambient == SurfaceType::new(-2, 0, 0) {
        return Err(Error::AmbientExcluded(ambient));
    }
    Ok(kernel_description(p, sel)?.rank == 0)
}

/// Second route to injectivity for cross-checking: every boundary circle of
/// the selection is generic and no exterior cylinder exists.
pub fn injective_by_complement_scan(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<bool, Error> {
    let cands = twist_candidates(p, sel)?;
    for circles in &cands.boundary {
        for b in circles {
            if !p.is_generic_circle(b)? {
                return Ok(false);
            }
        }
    }
    Ok(cands.cylinders.is_empty())
}

const VA_COMPONENT_TYPES: [SurfaceType; 7] = [
    SurfaceType::new(-2, 1, 0),
    SurfaceType::new(-1, 1, 1),
    SurfaceType::new(-1, 2, 0),
    SurfaceType::new(0, 1, 2),
    SurfaceType::new(0, 2, 1),
    SurfaceType::new(0, 3, 0),
    SurfaceType::new(0, 2, 0),
];

/// First component whose mapping class group is not virtually abelian,
/// with its type, if any.
pub fn non_va_component(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<Option<(Selection, SurfaceType)>, Error> {
    validate_selection(p, sel)?;
    for comp in p.components_within(sel) {
        let t = p.assemble_type_of(&comp)?;
        if !VA_COMPONENT_TYPES.contains(&t) {
            return Ok(Some((comp, t)));
        }
    }
    Ok(None)
}

/// Whether every component of the selection has a virtually abelian mapping
/// class group: each must be a pantalon, skirt, annulus, or Klein bottle
/// with one hole.
pub fn is_virtually_abelian(p: &PartitionedSurface, sel: &Selection) -> Result<bool, Error> {
    Ok(non_va_component(p, sel)?.is_none())
}

/// Record of one Klein-bottle-with-one-hole piece replaced by its core
/// annulus and body pants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinRefinement {
    pub original: PieceId,
    pub core: PieceId,
    pub body: PieceId,
}

/// Refine every Klein-bottle-with-one-hole piece of the partition, keeping
/// the given selections aligned: a selected refined piece is replaced by its
/// core and body.
pub fn refine_kleins(
    p: &PartitionedSurface,
    selections: &mut [Selection],
) -> (PartitionedSurface, Vec<KleinRefinement>) {
    let klein_pieces: Vec<PieceId> = p
        .pieces()
        .filter(|(_, t)| *t == SurfaceType::new(-2, 1, 0))
        .map(|(id, _)| id.clone())
        .collect();
    let mut out = p.clone();
    let mut refinements = Vec::new();
    for k in klein_pieces {
        out = out.refine_klein(&k).expect("piece type was checked");
        let core = PieceId::new(format!("{k}_core"));
        let body = PieceId::new(format!("{k}_body"));
        for sel in selections.iter_mut() {
            if sel.remove(&k) {
                sel.insert(core.clone());
                sel.insert(body.clone());
            }
        }
        refinements.push(KleinRefinement { original: k, core, body });
    }
    (out, refinements)
}

/// The basic circle system of a generic, virtually abelian selection.
///
/// Klein-bottle pieces are refined first so every reported circle resolves
/// to an edge class of the returned partition; the carried selection is the
/// refined one.
#[derive(Debug, Clone)]
pub struct BasicCircles {
    /// Partition after Klein refinement.
    pub partition: PartitionedSurface,
    /// Selection aligned with the refined partition.
    pub selection: Selection,
    /// Refinements that were applied.
    pub refinements: Vec<KleinRefinement>,
    /// Distinct twist-circle classes, sorted by representative.
    pub circles: Vec<crate::partition::IsotopyClass>,
    /// For each exterior cylinder, the two interchangeable edges of the
    /// shared class. Empty on the torus.
    pub exterior_cylinder_alternatives: Vec<(CircleRef, CircleRef)>,
    /// Number of distinct classes.
    pub rank: usize,
}

/// Compute the basic circles of the selection: meridian classes of annulus
/// components, core and boundary classes of Klein-bottle components, and
/// boundary classes of everything else, deduplicated as isotopy classes.
///
/// Requires a generic, virtually abelian selection; the ambient surface must
/// not be the Klein bottle.
pub fn basic_circles(p: &PartitionedSurface, sel: &Selection) -> Result<BasicCircles, Error> {
    validate_selection(p, sel)?;
    let ambient = p.assemble_type()?;
    if ambient == SurfaceType::new(-2, 0, 0) {
        return Err(Error::AmbientExcluded(ambient));
    }
    if !is_generic_subsurface(p, sel)? {
        return Err(Error::NotGeneric);
    }
    if !is_virtually_abelian(p, sel)? {
        return Err(Error::NotVirtuallyAbelian);
    }
    let mut selections = [sel.clone()];
    let (q, refinements) = refine_kleins(p, &mut selections);
    let [selection] = selections;
    let classes = q.isotopy_classes();
    let mut reps: BTreeMap<CircleRef, crate::partition::IsotopyClass> = BTreeMap::new();
    let mut add_class = |c: &CircleRef| {
        let class = classes.class_of(c).expect("circle is known").clone();
        reps.insert(class.representative.clone(), class);
    };
    for comp in q.components_within(&selection) {
        let t = q.assemble_type_of(&comp)?;
        let boundary: Vec<CircleRef> =
            q.boundary_edges_of(&comp).into_iter().map(CircleRef::Edge).collect();
        match classify_piece(t) {
            PieceClass::Annulus => {
                let b = boundary.first().expect("annulus component has boundary edges");
                add_class(b);
            }
            PieceClass::KleinBottleOneHole => {
                let core = klein_core_edge(&q, &comp)?;
                add_class(&CircleRef::Edge(core));
                for b in &boundary {
                    add_class(b);
                }
            }
            _ => {
                for b in &boundary {
                    add_class(b);
                }
            }
        }
    }
    let alternatives = if q.assemble_type()? == SurfaceType::new(1, 0, 0) {
        Vec::new()
    } else {
        exterior_cylinders(&q, &selection)?.into_iter().map(|(_, pair)| pair).collect()
    };
    let circles: Vec<crate::partition::IsotopyClass> = reps.into_values().collect();
    let rank = circles.len();
    Ok(BasicCircles {
        partition: q,
        selection,
        refinements,
        circles,
        exterior_cylinder_alternatives: alternatives,
        rank,
    })
}

/// Basic circle class representatives without the precondition gates, for
/// pipeline stages that have already validated their inputs and refined
/// every Klein piece.
pub(crate) fn basic_class_reps(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<std::collections::BTreeSet<CircleRef>, Error> {
    let classes = p.isotopy_classes();
    let rep = |c: &CircleRef| classes.representative(c).expect("circle is known").clone();
    let mut reps = std::collections::BTreeSet::new();
    for comp in p.components_within(sel) {
        let t = p.assemble_type_of(&comp)?;
        let boundary: Vec<CircleRef> =
            p.boundary_edges_of(&comp).into_iter().map(CircleRef::Edge).collect();
        match classify_piece(t) {
            PieceClass::Annulus => {
                let b = boundary.first().expect("annulus component has boundary edges");
                reps.insert(rep(b));
            }
            PieceClass::KleinBottleOneHole => {
                let core = klein_core_edge(p, &comp)?;
                reps.insert(rep(&CircleRef::Edge(core)));
                for b in &boundary {
                    reps.insert(rep(b));
                }
            }
            _ => {
                for b in &boundary {
                    reps.insert(rep(b));
                }
            }
        }
    }
    Ok(reps)
}

/// An interior edge of the component that does not separate it: a
/// representative of the distinguished nonseparating circle of a Klein
/// bottle with one hole.
pub(crate) fn klein_core_edge(
    p: &PartitionedSurface,
    comp: &Selection,
) -> Result<crate::partition::EdgeId, Error> {
    let inner: Vec<crate::partition::EdgeId> =
        p.edges_within(comp).map(|(id, _)| id).collect();
    for e in &inner {
        let (cutted, _) = p.cut(&CircleRef::Edge(*e))?;
        if cutted.components_within(comp).len() == 1 {
            return Ok(*e);
        }
    }
    Err(Error::KleinCoreUnrepresentable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::EndPoint;

    fn t(g: i32, r: u32, s: u32) -> SurfaceType {
        SurfaceType::new(g, r, s)
    }

    fn end(p: &str, slot: u32) -> EndPoint {
        EndPoint::new(p, slot)
    }

    fn sel(ids: &[&str]) -> Selection {
        ids.iter().map(|s| PieceId::new(*s)).collect()
    }

    fn genus_two() -> PartitionedSurface {
        let mut p = PartitionedSurface::new();
        p.add_piece("P1", t(0, 3, 0)).unwrap();
        p.add_piece("P2", t(0, 3, 0)).unwrap();
        for slot in 1..=3 {
            p.glue(end("P1", slot), end("P2", slot), false, None).unwrap();
        }
        p
    }

    /// Genus two with an exterior annulus between the two selected pants.
    fn cylinder_fixture() -> PartitionedSurface {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("A", 1), false, None).unwrap();
        p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        p
    }

    #[test]
    fn essential_basics() {
        let p = genus_two();
        assert!(is_essential(&p, &sel(&["P1"])).unwrap());
        assert!(is_essential(&p, &Selection::new()).unwrap());
        assert_eq!(is_essential(&p, &sel(&["P1", "P2"])).unwrap_err(), Error::SelectionIsAll);
        assert_eq!(is_essential(&p, &sel(&["missing"])).unwrap_err(), Error::UnknownPiece("missing".into()));
    }

    #[test]
    fn open_slots_block_essentiality() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        assert!(!is_essential(&p, &sel(&["P"])).unwrap());
    }

    #[test]
    fn boundary_parallel_annulus_is_inessential() {
        let p = genus_two();
        let e = CircleRef::Edge(p.edges().next().unwrap().0);
        let (p, _) = p.insert_annulus(&e).unwrap();
        let first_new_edge = p
            .edge_at(&end("n0", 2))
            .expect("second annulus edge exists");
        let (p, _) = p.insert_annulus(&CircleRef::Edge(first_new_edge)).unwrap();
        // n1 sits between n0 and P2; its meridian class reaches a boundary
        // edge of the component {P1}.
        assert!(!is_essential(&p, &sel(&["n1", "P1"])).unwrap());
        // On its own the doubled collar is still essential.
        assert!(is_essential(&p, &sel(&["n1"])).unwrap());
    }

    #[test]
    fn complement_disk_blocks_essentiality() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.add_piece("D", t(0, 1, 0)).unwrap();
        p.add_piece("E", t(0, 1, 1)).unwrap();
        p.glue(end("P", 1), end("D", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        p.glue(end("Q", 3), end("E", 1), false, None).unwrap();
        assert!(!is_essential(&p, &sel(&["P", "Q"])).unwrap());
    }

    #[test]
    fn generic_and_injective_on_genus_two_half() {
        let p = genus_two();
        let half = sel(&["P1"]);
        assert!(is_generic_subsurface(&p, &half).unwrap());
        let k = kernel_description(&p, &half).unwrap();
        assert_eq!(k.rank, 0);
        assert!(k.is_trivial());
        assert!(is_injective(&p, &half).unwrap());
        assert!(injective_by_complement_scan(&p, &half).unwrap());
    }

    #[test]
    fn cylinder_produces_kernel_rank_one() {
        let p = cylinder_fixture();
        let n = sel(&["P", "Q"]);
        assert!(is_essential(&p, &n).unwrap());
        assert!(is_generic_subsurface(&p, &n).unwrap());
        let cyl = exterior_cylinders(&p, &n).unwrap();
        assert_eq!(cyl.len(), 1);
        assert_eq!(cyl[0].0, PieceId::new("A"));
        let k = kernel_description(&p, &n).unwrap();
        assert_eq!(k.rank, 1);
        assert!(k.boundary_twists.is_empty());
        assert!(k.meridian_twists.is_empty());
        assert_eq!(k.cylinder_pairs.len(), 1);
        assert!(!is_injective(&p, &n).unwrap());
        assert!(!injective_by_complement_scan(&p, &n).unwrap());
        let symbols = k.generator_symbols(&p);
        assert_eq!(symbols.len(), 1);
        assert!(symbols[0].contains("^-1"));
    }

    #[test]
    fn nongeneric_boundary_enters_the_kernel() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("D", t(0, 1, 1)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("D", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        p.add_piece("E", t(0, 1, 1)).unwrap();
        p.glue(end("Q", 3), end("E", 1), false, None).unwrap();
        let n = sel(&["P"]);
        assert!(is_essential(&p, &n).unwrap());
        assert!(!is_generic_subsurface(&p, &n).unwrap());
        let k = kernel_description(&p, &n).unwrap();
        assert_eq!(k.boundary_twists.len(), 1);
        assert_eq!(k.rank, 1);
        assert!(!is_injective(&p, &n).unwrap());
    }

    #[test]
    fn va_classification_and_exhibit() {
        let p = cylinder_fixture();
        // {P, Q} assembles to a one-handled two-holed surface, not in the
        // virtually abelian table.
        let witness = non_va_component(&p, &sel(&["P", "Q"])).unwrap();
        let (_, ty) = witness.expect("component should be exhibited");
        assert_eq!(ty, t(1, 2, 0));
        assert!(!is_virtually_abelian(&p, &sel(&["P", "Q"])).unwrap());
        assert!(is_virtually_abelian(&p, &sel(&["P"])).unwrap());
        assert!(is_virtually_abelian(&p, &sel(&["A"])).unwrap());
    }

    #[test]
    fn basic_circles_on_genus_two_half() {
        let p = genus_two();
        let b = basic_circles(&p, &sel(&["P1"])).unwrap();
        assert_eq!(b.rank, 3);
        assert!(b.refinements.is_empty());
        assert!(b.exterior_cylinder_alternatives.is_empty());
        assert_eq!(b.circles.len(), 3);
    }

    #[test]
    fn basic_circles_merge_cylinder_classes() {
        let p = cylinder_fixture();
        // Select only P: its boundary circles are the two chained edges
        // through A plus the two direct edges to Q.
        let b = basic_circles(&p, &sel(&["P"])).unwrap();
        assert_eq!(b.rank, 3);
        // The non-virtually-abelian selection is refused.
        assert_eq!(basic_circles(&p, &sel(&["P", "Q"])).unwrap_err(), Error::NotVirtuallyAbelian);
    }

    #[test]
    fn basic_circles_refuse_nongeneric() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("D", t(0, 1, 1)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("D", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        p.add_piece("E", t(0, 1, 1)).unwrap();
        p.glue(end("Q", 3), end("E", 1), false, None).unwrap();
        assert_eq!(basic_circles(&p, &sel(&["P"])).unwrap_err(), Error::NotGeneric);
    }

    #[test]
    fn refine_kleins_updates_selections() {
        let mut p = PartitionedSurface::new();
        p.add_piece("K", t(-2, 1, 0)).unwrap();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("K", 1), end("P", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        let mut sels = [sel(&["K"]), sel(&["P"])];
        let (q, refs) = refine_kleins(&p, &mut sels);
        assert_eq!(refs.len(), 1);
        assert_eq!(sels[0], sel(&["K_core", "K_body"]));
        assert_eq!(sels[1], sel(&["P"]));
        assert_eq!(q.assemble_type(), p.assemble_type());
    }

    #[test]
    fn klein_component_reports_core_and_boundary() {
        let mut p = PartitionedSurface::new();
        p.add_piece("K", t(-2, 1, 0)).unwrap();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("K", 1), end("P", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        let b = basic_circles(&p, &sel(&["K"])).unwrap();
        assert_eq!(b.refinements.len(), 1);
        assert_eq!(b.selection, sel(&["K_core", "K_body"]));
        // Core class and boundary class.
        assert_eq!(b.rank, 2);
    }
}
