//! Commensurability of geometric subgroups: stripping shared components,
//! trading Klein-bottle pieces for their core circles, and comparing the
//! resulting basic circle systems.
//!
//! Two selections on the same ambient partition determine two twist
//! subgroups.  The pipeline in [`commensurable`] reduces both selections to
//! a normal form and decides commensurability from the surviving circle
//! classes, reporting either a certificate or a named obstruction.

use std::collections::BTreeSet;

use crate::partition::{CircleRef, EdgeId, PartitionedSurface, PieceId, Selection};
use crate::subsurface::{
    basic_class_reps, is_essential, is_generic_subsurface, is_virtually_abelian, klein_core_edge,
    non_va_component, refine_kleins, validate_selection,
};
use crate::surface::{classify_piece, PieceClass, SurfaceType};
use crate::Error;

const KLEIN_BOTTLE_ONE_HOLE: SurfaceType = SurfaceType::new(-2, 1, 0);
const KLEIN_BOTTLE: SurfaceType = SurfaceType::new(-2, 0, 0);
const UNPUNCTURED_ANNULUS: SurfaceType = SurfaceType::new(0, 2, 0);

/// How a Klein-bottle component was traded against the other selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KleinMatchMode {
    /// The partner is an annulus component around the core circle.
    Neighbourhood,
    /// The partner has the same core pieces as the component minus the
    /// annuli running along its core circle.
    Complement,
}

/// A matched pair removed during Klein reduction.
#[derive(Debug, Clone)]
pub struct KleinMatch {
    /// The Klein-bottle component that was removed.
    pub klein: Selection,
    /// The component of the other selection it was traded against.
    pub partner: Selection,
    /// Which of the two trade rules applied.
    pub mode: KleinMatchMode,
}

/// Result of removing the components shared by two selections.
#[derive(Debug, Clone)]
pub struct StripOutcome {
    /// The partition, extended by any collar annuli added to keep one
    /// side's boundary record intact.
    pub partition: PartitionedSurface,
    /// First selection with matched components removed.
    pub sel0: Selection,
    /// Second selection with matched components removed.
    pub sel1: Selection,
    /// The matched component pairs, in first-selection order.
    pub stripped: Vec<(Selection, Selection)>,
}

/// Result of trading the Klein-bottle components of one selection against
/// the other selection.
#[derive(Debug, Clone)]
pub struct KleinReduceOutcome {
    /// The partition, extended by any collar annuli added during boundary
    /// bookkeeping.
    pub partition: PartitionedSurface,
    /// The reduced side that owned the Klein-bottle components.
    pub n: Selection,
    /// The other side, with matched partners removed.
    pub opposite: Selection,
    /// Matched pairs in processing order.
    pub matches: Vec<KleinMatch>,
    /// Klein-bottle components for which no partner exists.
    pub unmatched: Vec<Selection>,
}

/// Evidence backing a positive commensurability verdict.
#[derive(Debug, Clone)]
pub struct CommensurabilityCertificate {
    /// Final partition on which the circle classes are compared.
    pub partition: PartitionedSurface,
    /// Component pairs removed as shared.
    pub stripped: Vec<(Selection, Selection)>,
    /// Klein-bottle trades performed on either side.
    pub klein_matches: Vec<KleinMatch>,
    /// The common basic circle class representatives.
    pub circles: Vec<CircleRef>,
    /// Number of distinct classes, the common twist rank.
    pub rank: usize,
}

/// Outcome of the commensurability decision.
#[derive(Debug, Clone)]
pub struct CommensurabilityVerdict {
    /// Whether the two twist subgroups are commensurable.
    pub commensurable: bool,
    /// Obstruction code when the answer is negative.  One of
    /// `non-VA-component`, `klein-unmatched`, `basic-circles-differ`,
    /// `boundary-mismatch`.
    pub obstruction: Option<String>,
    /// A component witnessing the obstruction, when one exists.
    pub witness: Option<(Selection, SurfaceType)>,
    /// Certificate accompanying a positive verdict.
    pub certificate: Option<CommensurabilityCertificate>,
}

impl CommensurabilityVerdict {
    fn no(code: &str, witness: Option<(Selection, SurfaceType)>) -> Self {
        CommensurabilityVerdict {
            commensurable: false,
            obstruction: Some(code.to_string()),
            witness,
            certificate: None,
        }
    }
}

/// The component left after repeatedly peeling off boundary-collar annuli:
/// unpunctured annulus pieces attached to the rest of the component along a
/// single edge.
pub fn component_core(p: &PartitionedSurface, comp: &Selection) -> Selection {
    let mut core = comp.clone();
    loop {
        let peel = core.iter().find(|id| {
            p.piece_type(id) == Some(UNPUNCTURED_ANNULUS)
                && p.edges()
                    .filter(|(_, e)| {
                        e.touches(id) && core.contains(&e.ends.0.piece) && core.contains(&e.ends.1.piece)
                    })
                    .count()
                    == 1
        });
        match peel {
            Some(id) => {
                let id = id.clone();
                core.remove(&id);
            }
            None => break,
        }
    }
    core
}

fn meridian_rep(
    p: &PartitionedSurface,
    classes: &crate::partition::CircleClasses,
    comp: &Selection,
) -> CircleRef {
    let e = *p
        .boundary_edges_of(comp)
        .first()
        .expect("annulus component has boundary edges");
    classes
        .representative(&CircleRef::Edge(e))
        .expect("edge is a known circle")
        .clone()
}

fn boundary_class_reps(
    p: &PartitionedSurface,
    classes: &crate::partition::CircleClasses,
    sel: &Selection,
) -> BTreeSet<CircleRef> {
    p.boundary_edges_of(sel)
        .into_iter()
        .map(|e| {
            classes
                .representative(&CircleRef::Edge(e))
                .expect("edge is a known circle")
                .clone()
        })
        .collect()
}

/// Components of the two selections that bound isotopic subsurfaces, paired
/// greedily in component order.  Annulus components match by meridian class;
/// all other components match when their cores coincide.
pub fn isotopic_components(
    p: &PartitionedSurface,
    s0: &Selection,
    s1: &Selection,
) -> Result<Vec<(Selection, Selection)>, Error> {
    for sel in [s0, s1] {
        if !is_essential(p, sel)? {
            return Err(Error::NotEssential);
        }
    }
    let classes = p.isotopy_classes();
    let comps0: Vec<(Selection, SurfaceType)> = p
        .components_within(s0)
        .into_iter()
        .map(|c| {
            let t = p.assemble_type_of(&c)?;
            Ok((c, t))
        })
        .collect::<Result<_, Error>>()?;
    let comps1: Vec<(Selection, SurfaceType)> = p
        .components_within(s1)
        .into_iter()
        .map(|c| {
            let t = p.assemble_type_of(&c)?;
            Ok((c, t))
        })
        .collect::<Result<_, Error>>()?;

    let mut taken = vec![false; comps1.len()];
    let mut pairs = Vec::new();
    for (u, tu) in &comps0 {
        let u_annulus = classify_piece(*tu) == PieceClass::Annulus;
        let hit = comps1.iter().enumerate().find(|(j, (v, tv))| {
            if taken[*j] {
                return false;
            }
            let v_annulus = classify_piece(*tv) == PieceClass::Annulus;
            if u_annulus != v_annulus {
                return false;
            }
            if u_annulus {
                meridian_rep(p, &classes, u) == meridian_rep(p, &classes, v)
            } else {
                component_core(p, u) == component_core(p, v)
            }
        });
        if let Some((j, (v, _))) = hit {
            taken[j] = true;
            pairs.push((u.clone(), v.clone()));
        }
    }
    Ok(pairs)
}

/// Insert a collar annulus for each boundary class of the removed
/// components that only one remaining side still runs along, selecting the
/// collar into the side that lost the class.
fn augment_boundaries(
    p: PartitionedSurface,
    mut sels: [Selection; 2],
    removed: &[Selection],
) -> (PartitionedSurface, [Selection; 2]) {
    let classes = p.isotopy_classes();
    let mut candidates: std::collections::BTreeMap<CircleRef, EdgeId> = Default::default();
    for comp in removed {
        for e in p.boundary_edges_of(comp) {
            let class = classes
                .class_of(&CircleRef::Edge(e))
                .expect("edge is a known circle");
            let min_edge = class
                .members
                .iter()
                .find_map(|c| match c {
                    CircleRef::Edge(id) => Some(*id),
                    CircleRef::AmbientBoundary(_) => None,
                })
                .expect("class containing an edge has a minimal edge member");
            candidates.insert(class.representative.clone(), min_edge);
        }
    }
    let bd = [
        boundary_class_reps(&p, &classes, &sels[0]),
        boundary_class_reps(&p, &classes, &sels[1]),
    ];
    let mut out = p;
    for (rep, min_edge) in candidates {
        let side = match (bd[0].contains(&rep), bd[1].contains(&rep)) {
            (false, true) => Some(0),
            (true, false) => Some(1),
            _ => None,
        };
        if let Some(i) = side {
            let (next, collar) = out
                .insert_annulus(&CircleRef::Edge(min_edge))
                .expect("candidate edge is present in the partition");
            out = next;
            sels[i].insert(collar);
        }
    }
    (out, sels)
}

/// Remove the components shared by both selections and patch up the
/// boundary record of the remainders with collar annuli.
pub fn strip_common(
    p: &PartitionedSurface,
    s0: &Selection,
    s1: &Selection,
) -> Result<StripOutcome, Error> {
    let pairs = isotopic_components(p, s0, s1)?;
    let mut sel0 = s0.clone();
    let mut sel1 = s1.clone();
    let mut removed = Vec::new();
    for (u, v) in &pairs {
        for id in u {
            sel0.remove(id);
        }
        for id in v {
            sel1.remove(id);
        }
        removed.push(u.clone());
        removed.push(v.clone());
    }
    let (partition, [sel0, sel1]) = augment_boundaries(p.clone(), [sel0, sel1], &removed);
    Ok(StripOutcome { partition, sel0, sel1, stripped: pairs })
}

fn annulus_piece_class_rep(
    p: &PartitionedSurface,
    classes: &crate::partition::CircleClasses,
    id: &PieceId,
) -> CircleRef {
    let slot = crate::partition::EndPoint::new(id.clone(), 1);
    let circle = match p.edge_at(&slot) {
        Some(e) => CircleRef::Edge(e),
        None => CircleRef::AmbientBoundary(slot),
    };
    classes
        .representative(&circle)
        .expect("slot circle is known")
        .clone()
}

/// Trade every Klein-bottle component of `n` for a matching component of
/// `opposite`: either an annulus around its core circle or a component
/// sharing its core pieces once the core annuli are peeled away.
pub fn klein_reduce(
    p: &PartitionedSurface,
    n: &Selection,
    opposite: &Selection,
) -> Result<KleinReduceOutcome, Error> {
    let part = p.clone();
    let mut n = n.clone();
    let mut opp = opposite.clone();
    let mut matches = Vec::new();
    let mut unmatched: Vec<Selection> = Vec::new();
    let mut removed = Vec::new();
    let mut skipped: BTreeSet<PieceId> = BTreeSet::new();
    loop {
        let klein = part.components_within(&n).into_iter().find(|c| {
            part.assemble_type_of(c) == Ok(KLEIN_BOTTLE_ONE_HOLE)
                && !skipped.contains(c.iter().next().expect("component is nonempty"))
        });
        let Some(k) = klein else { break };
        let core_edge = klein_core_edge(&part, &k)?;
        let classes = part.isotopy_classes();
        let core_rep = classes
            .representative(&CircleRef::Edge(core_edge))
            .expect("core edge is a known circle")
            .clone();

        let opp_comps = part.components_within(&opp);
        let mut partner: Option<(Selection, KleinMatchMode)> = None;
        for l in &opp_comps {
            let t = part.assemble_type_of(l)?;
            if classify_piece(t) == PieceClass::Annulus && meridian_rep(&part, &classes, l) == core_rep
            {
                partner = Some((l.clone(), KleinMatchMode::Neighbourhood));
                break;
            }
        }
        if partner.is_none() {
            let mut k_rest = k.clone();
            for id in &k {
                if part.piece_type(id) == Some(UNPUNCTURED_ANNULUS)
                    && annulus_piece_class_rep(&part, &classes, id) == core_rep
                {
                    k_rest.remove(id);
                }
            }
            let k_core = component_core(&part, &k_rest);
            for l in &opp_comps {
                let t = part.assemble_type_of(l)?;
                if classify_piece(t) == PieceClass::Annulus {
                    continue;
                }
                if component_core(&part, l) == k_core {
                    partner = Some((l.clone(), KleinMatchMode::Complement));
                    break;
                }
            }
        }
        match partner {
            Some((l, mode)) => {
                for id in &k {
                    n.remove(id);
                }
                for id in &l {
                    opp.remove(id);
                }
                removed.push(k.clone());
                removed.push(l.clone());
                matches.push(KleinMatch { klein: k, partner: l, mode });
            }
            None => {
                skipped.insert(k.iter().next().expect("component is nonempty").clone());
                unmatched.push(k);
            }
        }
    }
    let (partition, [n, opp]) = augment_boundaries(part, [n, opp], &removed);
    Ok(KleinReduceOutcome { partition, n, opposite: opp, matches, unmatched })
}

/// Decide commensurability of the two twist subgroups determined by `s0`
/// and `s1`.
///
/// Both selections must be generic and the ambient surface must not be the
/// Klein bottle.  Negative verdicts carry one of the obstruction codes
/// documented on [`CommensurabilityVerdict`]; positive verdicts carry a
/// [`CommensurabilityCertificate`].
pub fn commensurable(
    p: &PartitionedSurface,
    s0: &Selection,
    s1: &Selection,
) -> Result<CommensurabilityVerdict, Error> {
    for sel in [s0, s1] {
        if !is_generic_subsurface(p, sel)? {
            return Err(Error::NotGeneric);
        }
    }
    let ambient = p.assemble_type()?;
    if ambient == KLEIN_BOTTLE {
        return Err(Error::AmbientExcluded(ambient));
    }

    let mut sels = [s0.clone(), s1.clone()];
    let (refined, _) = refine_kleins(p, &mut sels);
    let normalized = refined.normalize_with_selections(&mut sels);
    let [n0, n1] = sels;

    let strip = strip_common(&normalized, &n0, &n1)?;
    let stripped = strip.stripped;

    let kr0 = klein_reduce(&strip.partition, &strip.sel0, &strip.sel1)?;
    if let Some(k) = kr0.unmatched.first() {
        let t = kr0.partition.assemble_type_of(k)?;
        return Ok(CommensurabilityVerdict::no("klein-unmatched", Some((k.clone(), t))));
    }
    let kr1 = klein_reduce(&kr0.partition, &kr0.opposite, &kr0.n)?;
    if let Some(k) = kr1.unmatched.first() {
        let t = kr1.partition.assemble_type_of(k)?;
        return Ok(CommensurabilityVerdict::no("klein-unmatched", Some((k.clone(), t))));
    }
    let part = kr1.partition;
    let r0 = kr1.opposite;
    let r1 = kr1.n;
    let mut klein_matches = kr0.matches;
    klein_matches.extend(kr1.matches);

    for r in [&r0, &r1] {
        if let Some(witness) = non_va_component(&part, r)? {
            debug_assert!(
                !decide_by_gluing_structure(&part, &r0, &r1)?,
                "structural path disagrees on a non-VA remainder"
            );
            return Ok(CommensurabilityVerdict::no("non-VA-component", Some(witness)));
        }
    }

    if r0.intersection(&r1).next().is_some() {
        return Err(Error::OverlappingSelections);
    }

    let structural = decide_by_gluing_structure(&part, &r0, &r1)?;

    let classes = part.isotopy_classes();
    let bd0 = boundary_class_reps(&part, &classes, &r0);
    let bd1 = boundary_class_reps(&part, &classes, &r1);
    if bd0 != bd1 {
        debug_assert!(!structural, "structural path disagrees on a boundary mismatch");
        return Ok(CommensurabilityVerdict::no("boundary-mismatch", None));
    }

    let c0 = basic_class_reps(&part, &r0)?;
    let c1 = basic_class_reps(&part, &r1)?;
    let equal = c0 == c1;
    debug_assert_eq!(structural, equal, "structural path disagrees with circle comparison");
    if !equal {
        return Ok(CommensurabilityVerdict::no("basic-circles-differ", None));
    }
    let circles: Vec<CircleRef> = c0.into_iter().collect();
    let rank = circles.len();
    Ok(CommensurabilityVerdict {
        commensurable: true,
        obstruction: None,
        witness: None,
        certificate: Some(CommensurabilityCertificate {
            partition: part,
            stripped,
            klein_matches,
            circles,
            rank,
        }),
    })
}

/// Independent decision route on fully reduced selections, reading the
/// answer off the gluing graph: every remaining component must be an
/// annulus, a pantalon, or a skirt, and every boundary circle of either
/// side must be isotopic to a boundary circle of the other side.
pub fn decide_by_gluing_structure(
    p: &PartitionedSurface,
    r0: &Selection,
    r1: &Selection,
) -> Result<bool, Error> {
    validate_selection(p, r0).or_else(|e| match e {
        Error::SelectionIsAll => Ok(()),
        other => Err(other),
    })?;
    validate_selection(p, r1).or_else(|e| match e {
        Error::SelectionIsAll => Ok(()),
        other => Err(other),
    })?;
    let comps0 = p.components_within(r0);
    let comps1 = p.components_within(r1);
    for comp in comps0.iter().chain(comps1.iter()) {
        let t = p.assemble_type_of(comp)?;
        let ok = matches!(
            classify_piece(t),
            PieceClass::Annulus
                | PieceClass::PantalonI
                | PieceClass::PantalonII
                | PieceClass::PantalonIII
                | PieceClass::SkirtI
                | PieceClass::SkirtII
        );
        if !ok {
            return Ok(false);
        }
    }

    let boundary = |comps: &[Selection]| -> Vec<EdgeId> {
        comps.iter().flat_map(|c| p.boundary_edges_of(c)).collect()
    };
    let bd0 = boundary(&comps0);
    let bd1 = boundary(&comps1);
    for (ours, theirs) in [(&bd0, &bd1), (&bd1, &bd0)] {
        for &e in ours.iter() {
            let covered = theirs.iter().any(|&f| {
                p.circles_isotopic(&CircleRef::Edge(e), &CircleRef::Edge(f)).unwrap_or(false)
            });
            if !covered {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Shape of the abstract commensurator of a twist subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommensuratorCase {
    /// Whether the commensurator is the stabilizer extended by an
    /// involution swapping the subsurface with its complement.
    pub semidirect_z2: bool,
    /// In the extended case, whether the extension splits as a direct
    /// product; `None` outside that case.
    pub direct_product: Option<bool>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    fn heap(k: usize, v: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(v.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, v, out);
            if k % 2 == 0 {
                v.swap(i, k - 1);
            } else {
                v.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut current, &mut out);
    out
}

/// Decide which shape the abstract commensurator of the twist subgroup
/// takes.  Requires an injective inclusion and a selection without annulus
/// or Klein-bottle components.
pub fn commensurator_case(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<CommensuratorCase, Error> {
    let injective = crate::subsurface::is_injective(p, sel)?;
    let comps: Vec<(Selection, SurfaceType)> = p
        .components_within(sel)
        .into_iter()
        .map(|c| {
            let t = p.assemble_type_of(&c)?;
            Ok((c, t))
        })
        .collect::<Result<_, Error>>()?;
    for (_, t) in &comps {
        if matches!(
            classify_piece(*t),
            PieceClass::Annulus | PieceClass::KleinBottleOneHole
        ) {
            return Err(Error::ForbiddenComponents);
        }
    }
    if !injective {
        return Err(Error::NotInjective);
    }

    let ambient = p.assemble_type()?;
    let closed = ambient.is_closed();
    let va = is_virtually_abelian(p, sel)?;
    let swap = closed && va && complement_swappable(p, sel, &comps)?;
    let direct_product = if swap {
        let product_types = [
            SurfaceType::new(0, 2, 1),
            SurfaceType::new(0, 3, 0),
            SurfaceType::new(-1, 2, 0),
        ];
        Some(comps.iter().all(|(_, t)| product_types.contains(t)))
    } else {
        None
    };
    Ok(CommensuratorCase { semidirect_z2: swap, direct_product })
}

/// Whether some pair of type-preserving bijections between the components
/// of the selection and of its complement preserves the count of gluing
/// edges between each pair of components.
fn complement_swappable(
    p: &PartitionedSurface,
    sel: &Selection,
    comps: &[(Selection, SurfaceType)],
) -> Result<bool, Error> {
    let complement: Selection = p
        .all_pieces()
        .into_iter()
        .filter(|id| !sel.contains(id))
        .collect();
    let other: Vec<(Selection, SurfaceType)> = p
        .components_within(&complement)
        .into_iter()
        .map(|c| {
            let t = p.assemble_type_of(&c)?;
            Ok((c, t))
        })
        .collect::<Result<_, Error>>()?;
    if comps.len() != other.len() {
        return Ok(false);
    }
    let k = comps.len();
    let mut crossing = vec![vec![0usize; k]; k];
    for (_, edge) in p.edges() {
        let (a, b) = (&edge.ends.0.piece, &edge.ends.1.piece);
        let i = comps.iter().position(|(c, _)| c.contains(a) || c.contains(b));
        let j = other.iter().position(|(c, _)| c.contains(a) || c.contains(b));
        if let (Some(i), Some(j)) = (i, j) {
            crossing[i][j] += 1;
        }
    }
    let perms = permutations(k);
    let type_preserving = |perm: &[usize], from: &[(Selection, SurfaceType)], to: &[(Selection, SurfaceType)]| {
        perm.iter().enumerate().all(|(i, &j)| from[i].1 == to[j].1)
    };
    for phi in &perms {
        if !type_preserving(phi, comps, &other) {
            continue;
        }
        for psi in &perms {
            if !type_preserving(psi, &other, comps) {
                continue;
            }
            let ok = (0..k).all(|x| (0..k).all(|z| crossing[x][z] == crossing[psi[z]][phi[x]]));
            if ok {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Curve system generating the part of the subsurface stabilizer shared
/// with the twist subgroup, for selections with components beyond the
/// virtually abelian types.
#[derive(Debug, Clone)]
pub struct StabStarDescriptor {
    /// Partition after refining Klein-bottle pieces, on which the circle
    /// classes live.
    pub partition: PartitionedSurface,
    /// Components whose internal mapping classes go beyond twists.
    pub special_components: Vec<(Selection, SurfaceType)>,
    /// Basic circles of the remaining components together with the
    /// boundary classes of the special ones.
    pub curves: Vec<crate::partition::IsotopyClass>,
}

/// Describe the stabilizer of a generic subsurface whose components are not
/// all of the virtually abelian piece types.
pub fn stab_star_descriptor(
    p: &PartitionedSurface,
    sel: &Selection,
) -> Result<StabStarDescriptor, Error> {
    if !is_generic_subsurface(p, sel)? {
        return Err(Error::NotGeneric);
    }
    let comps = p.components_within(sel);
    let mut special: Vec<Selection> = Vec::new();
    let mut rest: Selection = Selection::new();
    for comp in &comps {
        let t = p.assemble_type_of(comp)?;
        let basic = matches!(
            classify_piece(t),
            PieceClass::Annulus
                | PieceClass::PantalonI
                | PieceClass::PantalonII
                | PieceClass::PantalonIII
                | PieceClass::SkirtI
                | PieceClass::SkirtII
                | PieceClass::KleinBottleOneHole
        );
        if basic {
            rest.extend(comp.iter().cloned());
        } else {
            special.push(comp.clone());
        }
    }

    let mut track: Vec<Selection> = Vec::with_capacity(1 + special.len());
    track.push(rest);
    track.extend(special.iter().cloned());
    let (refined, _) = refine_kleins(p, &mut track);
    let rest = track.remove(0);
    let special = track;

    let basic = crate::subsurface::basic_circles(&refined, &rest)?;
    let classes = refined.isotopy_classes();
    let mut curves: std::collections::BTreeMap<CircleRef, crate::partition::IsotopyClass> = basic
        .circles
        .iter()
        .map(|c| (c.representative.clone(), c.clone()))
        .collect();
    let mut special_components = Vec::new();
    for comp in special {
        let t = refined.assemble_type_of(&comp)?;
        for e in refined.boundary_edges_of(&comp) {
            let class = classes
                .class_of(&CircleRef::Edge(e))
                .expect("edge is a known circle");
            curves.insert(class.representative.clone(), class.clone());
        }
        special_components.push((comp, t));
    }
    Ok(StabStarDescriptor {
        partition: refined,
        special_components,
        curves: curves.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{EndPoint, PartitionedSurface};

    fn end(p: &str, slot: u32) -> EndPoint {
        EndPoint::new(p, slot)
    }

    fn sel(ids: &[&str]) -> Selection {
        ids.iter().map(|s| PieceId::from(*s)).collect()
    }

    fn genus_two() -> (PartitionedSurface, Selection, Selection) {
        let mut p = PartitionedSurface::new();
        p.add_piece("P1", SurfaceType::new(0, 3, 0)).unwrap();
        p.add_piece("P2", SurfaceType::new(0, 3, 0)).unwrap();
        for slot in 1..=3 {
            p.glue(end("P1", slot), end("P2", slot), false, None).unwrap();
        }
        (p, sel(&["P1"]), sel(&["P2"]))
    }

    fn cylinder_fixture() -> (PartitionedSurface, Selection, Selection) {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", SurfaceType::new(0, 3, 0)).unwrap();
        p.add_piece("Q", SurfaceType::new(0, 3, 0)).unwrap();
        p.add_piece("A", SurfaceType::new(0, 2, 0)).unwrap();
        p.glue(end("P", 1), end("A", 1), false, None).unwrap();
        p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        (p, sel(&["P"]), sel(&["Q"]))
    }

    fn bounded_pants_pair() -> (PartitionedSurface, Selection, Selection) {
        let mut p = PartitionedSurface::new();
        for id in ["P0", "P1", "Q1", "Q2", "Q3"] {
            p.add_piece(id, SurfaceType::new(0, 3, 0)).unwrap();
        }
        p.glue(end("P0", 1), end("Q1", 1), false, None).unwrap();
        p.glue(end("P0", 2), end("Q1", 2), false, None).unwrap();
        p.glue(end("P0", 3), end("Q2", 1), false, None).unwrap();
        p.glue(end("P1", 1), end("Q2", 2), false, None).unwrap();
        p.glue(end("P1", 2), end("Q3", 1), false, None).unwrap();
        p.glue(end("P1", 3), end("Q3", 2), false, None).unwrap();
        (p, sel(&["P0"]), sel(&["P1"]))
    }

    fn refined_klein_with_tail() -> PartitionedSurface {
        let mut p = PartitionedSurface::new();
        p.add_piece("Kc", SurfaceType::new(0, 2, 0)).unwrap();
        p.add_piece("Kb", SurfaceType::new(0, 3, 0)).unwrap();
        p.add_piece("P", SurfaceType::new(0, 3, 0)).unwrap();
        p.add_piece("Q", SurfaceType::new(0, 3, 0)).unwrap();
        p.glue(end("Kc", 1), end("Kb", 1), false, Some("core".to_string())).unwrap();
        p.glue(end("Kc", 2), end("Kb", 2), true, Some("core".to_string())).unwrap();
        p.glue(end("Kb", 3), end("P", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        p
    }

    #[test]
    fn opposite_pants_in_genus_two_are_commensurable() {
        let (p, s0, s1) = genus_two();
        let verdict = commensurable(&p, &s0, &s1).unwrap();
        assert!(verdict.commensurable);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.rank, 3);
        assert!(cert.stripped.is_empty());
        assert!(cert.klein_matches.is_empty());
    }

    #[test]
    fn identical_selections_strip_to_nothing() {
        let (p, s0, _) = genus_two();
        let verdict = commensurable(&p, &s0, &s0.clone()).unwrap();
        assert!(verdict.commensurable);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.stripped.len(), 1);
        assert_eq!(cert.rank, 0);
    }

    #[test]
    fn shared_non_va_component_strips_before_the_va_check() {
        let (p, _, _) = cylinder_fixture();
        let joint: Selection = sel(&["P", "Q"]);
        assert!(!is_virtually_abelian(&p, &joint).unwrap());
        let verdict = commensurable(&p, &joint, &joint.clone()).unwrap();
        assert!(verdict.commensurable);
    }

    #[test]
    fn pants_on_either_side_of_a_cylinder_are_commensurable() {
        let (p, s0, s1) = cylinder_fixture();
        let verdict = commensurable(&p, &s0, &s1).unwrap();
        assert!(verdict.commensurable);
        assert_eq!(verdict.certificate.unwrap().rank, 3);
    }

    #[test]
    fn disjoint_pants_with_disjoint_boundaries_are_not_commensurable() {
        let (p, s0, s1) = bounded_pants_pair();
        let verdict = commensurable(&p, &s0, &s1).unwrap();
        assert!(!verdict.commensurable);
        assert_eq!(verdict.obstruction.as_deref(), Some("boundary-mismatch"));
        assert!(
            !decide_by_gluing_structure(&p, &s0, &s1).unwrap(),
            "structural route must agree on the reduced pair"
        );
    }

    #[test]
    fn klein_component_trades_against_its_core_annulus() {
        let p = refined_klein_with_tail();
        let s0 = sel(&["Kc", "Kb"]);
        let s1 = sel(&["Kc"]);
        assert_eq!(
            p.assemble_type_of(&s0),
            Ok(SurfaceType::new(-2, 1, 0))
        );
        let verdict = commensurable(&p, &s0, &s1).unwrap();
        assert!(verdict.commensurable);
        let cert = verdict.certificate.unwrap();
        assert_eq!(cert.klein_matches.len(), 1);
        assert_eq!(cert.klein_matches[0].mode, KleinMatchMode::Neighbourhood);
        assert_eq!(cert.rank, 0);
    }

    #[test]
    fn klein_component_without_partner_is_an_obstruction() {
        let p = refined_klein_with_tail();
        let s0 = sel(&["Kc", "Kb"]);
        let s1 = sel(&["P"]);
        let verdict = commensurable(&p, &s0, &s1).unwrap();
        assert!(!verdict.commensurable);
        assert_eq!(verdict.obstruction.as_deref(), Some("klein-unmatched"));
        let (witness, t) = verdict.witness.unwrap();
        assert_eq!(t, SurfaceType::new(-2, 1, 0));
        assert!(witness.contains(&PieceId::from("Kb")));
    }

    #[test]
    fn component_core_peels_collar_annuli() {
        let p = refined_klein_with_tail();
        assert_eq!(component_core(&p, &sel(&["Kc", "Kb"])), sel(&["Kc", "Kb"]));
        let e = p.edge_at(&end("Kb", 3)).unwrap();
        let (q, collar) = p.insert_annulus(&CircleRef::Edge(e)).unwrap();
        let mut comp = sel(&["Kc", "Kb"]);
        comp.insert(collar);
        assert_eq!(component_core(&q, &comp), sel(&["Kc", "Kb"]));
    }

    #[test]
    fn strip_common_adds_collars_for_one_sided_boundary_classes() {
        let mut p = PartitionedSurface::new();
        for id in ["Q0", "Q", "Q1"] {
            p.add_piece(id, SurfaceType::new(0, 3, 0)).unwrap();
        }
        for id in ["X1", "X2", "Y0", "Y1"] {
            p.add_piece(id, SurfaceType::new(0, 2, 0)).unwrap();
        }
        p.add_piece("C", SurfaceType::new(0, 1, 2)).unwrap();
        p.glue(end("Q0", 1), end("Y0", 1), false, None).unwrap();
        p.glue(end("Y0", 2), end("Q0", 2), false, None).unwrap();
        p.glue(end("Q0", 3), end("X1", 1), false, None).unwrap();
        p.glue(end("X1", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("Q", 2), end("X2", 1), false, None).unwrap();
        p.glue(end("X2", 2), end("Q1", 1), false, None).unwrap();
        p.glue(end("Q1", 2), end("Y1", 1), false, None).unwrap();
        p.glue(end("Y1", 2), end("Q1", 3), false, None).unwrap();
        p.glue(end("Q", 3), end("C", 1), false, None).unwrap();
        assert_eq!(p.assemble_type(), Ok(SurfaceType::new(2, 0, 2)));

        let n0 = sel(&["Q0", "Q"]);
        let n1 = sel(&["Q1", "Q"]);
        let outcome = strip_common(&p, &n0, &n1).unwrap();
        assert_eq!(outcome.stripped.len(), 1);
        assert_eq!(outcome.stripped[0].0, sel(&["Q"]));

        assert!(outcome.sel0.contains(&PieceId::from("Q0")));
        assert!(outcome.sel1.contains(&PieceId::from("Q1")));
        assert_eq!(outcome.sel0.len(), 2, "one collar joins the first side");
        assert_eq!(outcome.sel1.len(), 2, "one collar joins the second side");
        let collar0 = outcome
            .sel0
            .iter()
            .find(|id| *id != &PieceId::from("Q0"))
            .unwrap();
        let collar1 = outcome
            .sel1
            .iter()
            .find(|id| *id != &PieceId::from("Q1"))
            .unwrap();
        assert_eq!(
            outcome.partition.piece_type(collar0),
            Some(SurfaceType::new(0, 2, 0))
        );
        assert_eq!(
            outcome.partition.piece_type(collar1),
            Some(SurfaceType::new(0, 2, 0))
        );

        let verdict = commensurable(&p, &n0, &n1).unwrap();
        assert!(!verdict.commensurable);
        assert_eq!(verdict.obstruction.as_deref(), Some("boundary-mismatch"));
    }

    #[test]
    fn commensurator_of_a_pants_in_genus_two_extends_by_the_swap() {
        let (p, s0, _) = genus_two();
        let case = commensurator_case(&p, &s0).unwrap();
        assert!(case.semidirect_z2);
        assert_eq!(case.direct_product, Some(true));
    }

    #[test]
    fn commensurator_rejects_annulus_components_and_non_injective_selections() {
        let (p, _, _) = cylinder_fixture();
        assert!(matches!(
            commensurator_case(&p, &sel(&["A"])),
            Err(Error::ForbiddenComponents)
        ));
        assert!(matches!(
            commensurator_case(&p, &sel(&["P", "Q"])),
            Err(Error::NotInjective)
        ));
    }

    #[test]
    fn stab_descriptor_collects_special_boundaries() {
        let (p, _, _) = cylinder_fixture();
        let joint = sel(&["P", "Q"]);
        let desc = stab_star_descriptor(&p, &joint).unwrap();
        assert_eq!(desc.special_components.len(), 1);
        assert_eq!(desc.special_components[0].1, SurfaceType::new(1, 2, 0));
        assert_eq!(desc.curves.len(), 1);
    }

    #[test]
    fn structural_route_accepts_the_cylinder_bridge() {
        let (p, s0, s1) = cylinder_fixture();
        assert!(decide_by_gluing_structure(&p, &s0, &s1).unwrap());
    }
}
