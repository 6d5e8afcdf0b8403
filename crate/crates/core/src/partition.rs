//! The gluing-graph model of an ambient surface.
//!
//! Pieces are nodes carrying a [`SurfaceType`]; gluing edges join boundary
//! slots of distinct pieces and carry a flip parity and an optional curve
//! label. Unglued slots are the boundary circles of the assembled surface.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::surface::SurfaceType;
use crate::Error;

/// Identifier of a piece. Ids are caller-chosen or generated; ordering is
/// lexicographic and drives every deterministic traversal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PieceId(String);

impl PieceId {
    pub fn new(id: impl Into<String>) -> Self {
        PieceId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PieceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PieceId {
    fn from(s: &str) -> Self {
        PieceId(s.to_string())
    }
}

/// Internal identifier of a gluing edge, assigned in creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(u32);

/// A boundary slot of a piece. Slots are numbered 1 through the piece's
/// boundary count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndPoint {
    pub piece: PieceId,
    pub slot: u32,
}

impl EndPoint {
    pub fn new(piece: impl Into<PieceId>, slot: u32) -> Self {
        EndPoint { piece: piece.into(), slot }
    }
}

impl fmt::Display for EndPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.piece, self.slot)
    }
}

/// A gluing of two boundary slots on distinct pieces.
///
/// `flip` is the orientation-compatibility bit; `label` optionally names the
/// circle the edge represents. Ends are stored in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingEdge {
    pub ends: (EndPoint, EndPoint),
    pub flip: bool,
    pub label: Option<String>,
}

impl GluingEdge {
    pub fn other_end(&self, piece: &PieceId) -> Option<&EndPoint> {
        if &self.ends.0.piece == piece {
            Some(&self.ends.1)
        } else if &self.ends.1.piece == piece {
            Some(&self.ends.0)
        } else {
            None
        }
    }

    pub fn touches(&self, piece: &PieceId) -> bool {
        &self.ends.0.piece == piece || &self.ends.1.piece == piece
    }
}

/// A circle on the assembled surface that the partition can point at: either
/// a gluing edge or an unglued boundary slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CircleRef {
    Edge(EdgeId),
    AmbientBoundary(EndPoint),
}

/// An equivalence class of circles under the annulus-chain relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IsotopyClass {
    pub representative: CircleRef,
    pub members: BTreeSet<CircleRef>,
}

/// A set of piece ids denoting a subsurface of the ambient partition.
pub type Selection = BTreeSet<PieceId>;

/// A surface given as pieces plus gluing edges.
#[derive(Debug, Clone, Default)]
pub struct PartitionedSurface {
    pieces: BTreeMap<PieceId, SurfaceType>,
    edges: BTreeMap<EdgeId, GluingEdge>,
    occupied: BTreeMap<EndPoint, EdgeId>,
    next_edge: u32,
    next_generated: u32,
}

impl PartitionedSurface {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_piece(&mut self, id: impl Into<PieceId>, t: SurfaceType) -> Result<(), Error> {
        let id = id.into();
        if self.pieces.contains_key(&id) {
            return Err(Error::DuplicatePiece(id));
        }
        self.pieces.insert(id, t);
        Ok(())
    }

    /// Glue two boundary slots. Both slots must exist, be free, and lie on
    /// distinct pieces.
    pub fn glue(
        &mut self,
        a: EndPoint,
        b: EndPoint,
        flip: bool,
        label: Option<String>,
    ) -> Result<EdgeId, Error> {
        for end in [&a, &b] {
            let t = self
                .pieces
                .get(&end.piece)
                .ok_or_else(|| Error::UnknownPiece(end.piece.clone()))?;
            if end.slot == 0 || end.slot > t.boundary {
                return Err(Error::BadSlot(end.clone()));
            }
            if self.occupied.contains_key(end) {
                return Err(Error::SlotOccupied(end.clone()));
            }
        }
        if a.piece == b.piece {
            return Err(Error::SelfGluing(a.piece));
        }
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        let ends = if a <= b { (a, b) } else { (b, a) };
        self.occupied.insert(ends.0.clone(), id);
        self.occupied.insert(ends.1.clone(), id);
        self.edges.insert(id, GluingEdge { ends, flip, label });
        Ok(id)
    }

    fn remove_edge(&mut self, id: EdgeId) -> Option<GluingEdge> {
        let e = self.edges.remove(&id)?;
        self.occupied.remove(&e.ends.0);
        self.occupied.remove(&e.ends.1);
        Some(e)
    }

    fn remove_piece(&mut self, id: &PieceId) -> Option<SurfaceType> {
        debug_assert!(self.edges.values().all(|e| !e.touches(id)), "detach edges first");
        self.pieces.remove(id)
    }

    /// A fresh piece id with the given prefix, avoiding collisions with
    /// existing ids.
    pub(crate) fn generate_id(&mut self, prefix: &str) -> PieceId {
        loop {
            let candidate = PieceId(format!("{prefix}{}", self.next_generated));
            self.next_generated += 1;
            if !self.pieces.contains_key(&candidate) {
                return candidate;
            }
        }
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn piece_type(&self, id: &PieceId) -> Option<SurfaceType> {
        self.pieces.get(id).copied()
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&PieceId, SurfaceType)> {
        self.pieces.iter().map(|(id, t)| (id, *t))
    }

    pub fn piece_ids(&self) -> impl Iterator<Item = &PieceId> {
        self.pieces.keys()
    }

    pub fn all_pieces(&self) -> Selection {
        self.pieces.keys().cloned().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &GluingEdge)> {
        self.edges.iter().map(|(id, e)| (*id, e))
    }

    pub fn edge(&self, id: EdgeId) -> Option<&GluingEdge> {
        self.edges.get(&id)
    }

    pub fn edge_at(&self, end: &EndPoint) -> Option<EdgeId> {
        self.occupied.get(end).copied()
    }

    /// Unglued slots, in sorted order. These are the boundary circles of the
    /// assembled surface.
    pub fn free_slots(&self) -> Vec<EndPoint> {
        let mut out = Vec::new();
        for (id, t) in &self.pieces {
            for slot in 1..=t.boundary {
                let end = EndPoint { piece: id.clone(), slot };
                if !self.occupied.contains_key(&end) {
                    out.push(end);
                }
            }
        }
        out
    }

    /// Every circle the partition can refer to: all edges plus all unglued
    /// slots.
    pub fn circle_refs(&self) -> Vec<CircleRef> {
        let mut out: Vec<CircleRef> = self.edges.keys().map(|id| CircleRef::Edge(*id)).collect();
        out.extend(self.free_slots().into_iter().map(CircleRef::AmbientBoundary));
        out.sort();
        out
    }

    pub fn has_circle(&self, c: &CircleRef) -> bool {
        match c {
            CircleRef::Edge(id) => self.edges.contains_key(id),
            CircleRef::AmbientBoundary(end) => {
                match self.pieces.get(&end.piece) {
                    Some(t) => {
                        end.slot >= 1 && end.slot <= t.boundary && !self.occupied.contains_key(end)
                    }
                    None => false,
                }
            }
        }
    }

    /// Human-readable name of a circle: edges print as their endpoint pair,
    /// boundary circles with a `bd:` prefix.
    pub fn display_circle(&self, c: &CircleRef) -> String {
        match c {
            CircleRef::Edge(id) => match self.edges.get(id) {
                Some(e) => format!("{}-{}", e.ends.0, e.ends.1),
                None => "<removed edge>".to_string(),
            },
            CircleRef::AmbientBoundary(end) => format!("bd:{end}"),
        }
    }

    /// Connected components of the whole partition, each as a piece set.
    pub fn components(&self) -> Vec<Selection> {
        self.components_within(&self.all_pieces())
    }

    /// Connected components of the induced subgraph on `subset`.
    pub fn components_within(&self, subset: &Selection) -> Vec<Selection> {
        let mut seen: BTreeSet<&PieceId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in subset {
            if seen.contains(start) || !self.pieces.contains_key(start) {
                continue;
            }
            let mut comp = Selection::new();
            let mut queue = VecDeque::from([start.clone()]);
            seen.insert(start);
            while let Some(p) = queue.pop_front() {
                comp.insert(p.clone());
                for e in self.edges.values() {
                    if let Some(other) = e.other_end(&p) {
                        if subset.contains(&other.piece) && !comp.contains(&other.piece) {
                            if let Some(q) = subset.get(&other.piece) {
                                if seen.insert(q) {
                                    queue.push_back(other.piece.clone());
                                }
                            }
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Edges with both ends inside `set`.
    pub fn edges_within<'a>(
        &'a self,
        set: &'a Selection,
    ) -> impl Iterator<Item = (EdgeId, &'a GluingEdge)> + 'a {
        self.edges().filter(move |(_, e)| {
            set.contains(&e.ends.0.piece) && set.contains(&e.ends.1.piece)
        })
    }

    /// Edges with exactly one end inside `set`.
    pub fn boundary_edges_of(&self, set: &Selection) -> Vec<EdgeId> {
        self.edges()
            .filter(|(_, e)| set.contains(&e.ends.0.piece) != set.contains(&e.ends.1.piece))
            .map(|(id, _)| id)
            .collect()
    }

    /// Unglued slots lying on pieces of `set`.
    pub fn free_slots_of(&self, set: &Selection) -> Vec<EndPoint> {
        self.free_slots().into_iter().filter(|end| set.contains(&end.piece)).collect()
    }

    /// Topological type of the connected union of pieces `component`.
    ///
    /// The Euler characteristic and puncture count add up over pieces;
    /// boundary circles are the slots not glued within the component. The
    /// component is orientable when every piece is orientable and every cycle
    /// of the induced gluing graph has even total flip parity.
    pub fn assemble_type_of(&self, component: &Selection) -> Result<SurfaceType, Error> {
        if component.is_empty() {
            return Err(Error::Disconnected);
        }
        for id in component {
            if !self.pieces.contains_key(id) {
                return Err(Error::UnknownPiece(id.clone()));
            }
        }
        if self.components_within(component).len() != 1 {
            return Err(Error::Disconnected);
        }
        let mut chi: i64 = 0;
        let mut punctures: u32 = 0;
        let mut slots: i64 = 0;
        for id in component {
            let t = self.pieces[id];
            chi += t.euler_characteristic();
            punctures += t.punctures;
            slots += i64::from(t.boundary);
        }
        let inner: Vec<(EdgeId, &GluingEdge)> = self.edges_within(component).collect();
        let boundary = (slots - 2 * inner.len() as i64) as u32;
        let any_nonorientable = component.iter().any(|id| !self.pieces[id].orientable());
        let orientable = if any_nonorientable {
            false
        } else {
            self.even_parity_on_cycles(component, &inner)
        };
        Ok(SurfaceType::from_invariants(chi, orientable, boundary, punctures))
    }

    /// Spanning-tree parity normalization: assign each piece a sign along a
    /// BFS tree so tree edges become even, then check every non-tree edge.
    fn even_parity_on_cycles(&self, component: &Selection, inner: &[(EdgeId, &GluingEdge)]) -> bool {
        let start = component.iter().next().expect("component is nonempty");
        let mut sign: BTreeMap<&PieceId, bool> = BTreeMap::new();
        sign.insert(start, false);
        let mut queue = VecDeque::from([start]);
        let mut tree: BTreeSet<EdgeId> = BTreeSet::new();
        while let Some(p) = queue.pop_front() {
            let s = sign[p];
            for (id, e) in inner {
                if let Some(other) = e.other_end(p) {
                    let q = component.get(&other.piece).expect("inner edge stays inside");
                    if !sign.contains_key(q) {
                        sign.insert(q, s ^ e.flip);
                        tree.insert(*id);
                        queue.push_back(q);
                    }
                }
            }
        }
        inner.iter().all(|(id, e)| {
            tree.contains(id) || sign[&e.ends.0.piece] == sign[&e.ends.1.piece] && !e.flip
                || sign[&e.ends.0.piece] != sign[&e.ends.1.piece] && e.flip
        })
    }

    /// Topological type of the whole surface. The partition must be
    /// connected.
    pub fn assemble_type(&self) -> Result<SurfaceType, Error> {
        self.assemble_type_of(&self.all_pieces())
    }

    /// Remove the edge `c` and return the result together with its connected
    /// components and their assembled types.
    pub fn cut(&self, c: &CircleRef) -> Result<(PartitionedSurface, Vec<(Selection, SurfaceType)>), Error> {
        let CircleRef::Edge(id) = c else {
            return Err(Error::NotAnEdge);
        };
        if !self.edges.contains_key(id) {
            return Err(Error::NotAnEdge);
        }
        let mut cutted = self.clone();
        cutted.remove_edge(*id);
        let mut sides = Vec::new();
        for comp in cutted.components() {
            let t = cutted.assemble_type_of(&comp)?;
            sides.push((comp, t));
        }
        Ok((cutted, sides))
    }

    /// Whether no side of the cut at `c` is a disk with fewer than two
    /// punctures or an unpunctured Möbius strip.
    pub fn is_generic_circle(&self, c: &CircleRef) -> Result<bool, Error> {
        let (_, sides) = self.cut(c)?;
        Ok(sides.iter().all(|(_, t)| {
            *t != SurfaceType::new(0, 1, 0)
                && *t != SurfaceType::new(0, 1, 1)
                && *t != SurfaceType::new(-1, 1, 0)
        }))
    }

    /// Whether no side of the cut at `c` is an unpunctured disk.
    pub fn is_essential_circle(&self, c: &CircleRef) -> Result<bool, Error> {
        let (_, sides) = self.cut(c)?;
        Ok(sides.iter().all(|(_, t)| *t != SurfaceType::new(0, 1, 0)))
    }

    /// Whether the cut at edge `c` leaves the surface disconnected.
    pub fn is_separating(&self, c: &CircleRef) -> Result<bool, Error> {
        let (_, sides) = self.cut(c)?;
        Ok(sides.len() > 1)
    }

    /// The annulus-chain relation on circles, with the Klein-bottle-one-hole
    /// ambient lookup applied when it is sound to do so.
    ///
    /// Each unpunctured annulus piece identifies the two circles at its
    /// slots. When the whole partition is connected and assembles to a Klein
    /// bottle with one hole, circles additionally merge by the two-class
    /// lookup: generic separating circles and the ambient boundary form one
    /// class, generic nonseparating circles the other.
    pub fn isotopy_classes(&self) -> CircleClasses {
        let refs = self.circle_refs();
        let mut uf = UnionFind::new(&refs);
        for (id, t) in &self.pieces {
            if *t != SurfaceType::new(0, 2, 0) {
                continue;
            }
            let sides: Vec<CircleRef> = (1..=2)
                .map(|slot| {
                    let end = EndPoint { piece: id.clone(), slot };
                    match self.occupied.get(&end) {
                        Some(e) => CircleRef::Edge(*e),
                        None => CircleRef::AmbientBoundary(end),
                    }
                })
                .collect();
            uf.union(&sides[0], &sides[1]);
        }
        if self.assemble_type() == Ok(SurfaceType::new(-2, 1, 0)) {
            let mut boundary_like: Vec<CircleRef> = Vec::new();
            let mut core_like: Vec<CircleRef> = Vec::new();
            for r in &refs {
                match r {
                    CircleRef::AmbientBoundary(_) => boundary_like.push(r.clone()),
                    CircleRef::Edge(_) => {
                        if self.is_generic_circle(r).unwrap_or(false) {
                            if self.is_separating(r).unwrap_or(false) {
                                boundary_like.push(r.clone());
                            } else {
                                core_like.push(r.clone());
                            }
                        }
                    }
                }
            }
            for pair in boundary_like.windows(2) {
                uf.union(&pair[0], &pair[1]);
            }
            for pair in core_like.windows(2) {
                uf.union(&pair[0], &pair[1]);
            }
        }
        uf.finish()
    }

    /// Whether two circles are isotopic on the assembled surface.
    ///
    /// On small ambient surfaces where chain reasoning alone is incomplete
    /// the answer is refused unless both circles are edges of a normalized
    /// partition.
    pub fn circles_isotopic(&self, a: &CircleRef, b: &CircleRef) -> Result<bool, Error> {
        if !self.has_circle(a) || !self.has_circle(b) {
            return Err(Error::NotAnEdge);
        }
        let t = self.assemble_type()?;
        if ambient_isotopy_guard(t) {
            let both_edges = matches!(a, CircleRef::Edge(_)) && matches!(b, CircleRef::Edge(_));
            if !(both_edges && self.is_normalized()) {
                return Err(Error::AmbiguousAmbient(t));
            }
        }
        Ok(self.isotopy_classes().same(a, b).unwrap_or(false))
    }

    /// An interior unpunctured annulus piece that `normalize` may merge away:
    /// both slots glued, neither edge labeled, far ends on distinct pieces,
    /// and membership agreement with a glued neighbor in every given
    /// selection.
    fn mergeable_annulus(&self, selections: &[&Selection]) -> Option<PieceId> {
        'pieces: for (id, t) in &self.pieces {
            if *t != SurfaceType::new(0, 2, 0) {
                continue;
            }
            let e1 = self.occupied.get(&EndPoint { piece: id.clone(), slot: 1 });
            let e2 = self.occupied.get(&EndPoint { piece: id.clone(), slot: 2 });
            let (Some(e1), Some(e2)) = (e1, e2) else { continue };
            let g1 = &self.edges[e1];
            let g2 = &self.edges[e2];
            if g1.label.is_some() || g2.label.is_some() {
                continue;
            }
            let far1 = g1.other_end(id).expect("edge touches its annulus");
            let far2 = g2.other_end(id).expect("edge touches its annulus");
            if far1.piece == far2.piece {
                continue;
            }
            for sel in selections {
                let inside = sel.contains(id);
                if sel.contains(&far1.piece) != inside && sel.contains(&far2.piece) != inside {
                    continue 'pieces;
                }
            }
            return Some(id.clone());
        }
        None
    }

    pub fn is_normalized(&self) -> bool {
        self.mergeable_annulus(&[]).is_none()
    }

    /// Merge away every interior unpunctured annulus chain that carries no
    /// label, preserving the assembled type. Idempotent.
    pub fn normalize(&self) -> PartitionedSurface {
        self.normalize_with_selections(&mut [])
    }

    /// `normalize` that also keeps a set of selections meaningful: an annulus
    /// is merged only when its selection membership agrees with a glued
    /// neighbor in every selection, and merged pieces are dropped from the
    /// selections.
    pub fn normalize_with_selections(&self, selections: &mut [Selection]) -> PartitionedSurface {
        let mut p = self.clone();
        loop {
            let refs: Vec<&Selection> = selections.iter().map(|s| &*s).collect();
            let Some(id) = p.mergeable_annulus(&refs) else { break };
            let e1 = p.occupied[&EndPoint { piece: id.clone(), slot: 1 }];
            let e2 = p.occupied[&EndPoint { piece: id.clone(), slot: 2 }];
            let g1 = p.remove_edge(e1).expect("edge exists");
            let g2 = p.remove_edge(e2).expect("edge exists");
            let far1 = g1.other_end(&id).expect("edge touches annulus").clone();
            let far2 = g2.other_end(&id).expect("edge touches annulus").clone();
            p.remove_piece(&id);
            p.glue(far1, far2, g1.flip ^ g2.flip, None).expect("merged edge is valid");
            for sel in selections.iter_mut() {
                sel.remove(&id);
            }
        }
        p
    }

    /// Replace edge `c` by an annulus piece and two edges, realizing a
    /// regular neighbourhood of the circle. The assembled type is unchanged.
    /// The lower edge keeps the original flip and label.
    pub fn insert_annulus(&self, c: &CircleRef) -> Result<(PartitionedSurface, PieceId), Error> {
        let CircleRef::Edge(id) = c else {
            return Err(Error::NotAnEdge);
        };
        if !self.edges.contains_key(id) {
            return Err(Error::NotAnEdge);
        }
        let mut p = self.clone();
        let e = p.remove_edge(*id).expect("edge exists");
        let a = p.generate_id("n");
        p.add_piece(a.clone(), SurfaceType::new(0, 2, 0)).expect("generated id is fresh");
        p.glue(e.ends.0, EndPoint { piece: a.clone(), slot: 1 }, e.flip, e.label)
            .expect("released slot is free");
        p.glue(EndPoint { piece: a.clone(), slot: 2 }, e.ends.1, false, None)
            .expect("released slot is free");
        Ok((p, a))
    }

    /// Replace a Klein-bottle-with-one-hole piece by an annulus around its
    /// distinguished nonseparating circle glued twice (one flip odd) to a
    /// pair of pants. The two new edges carry the label `klein-core(<id>)`;
    /// the third pants slot inherits the old piece's gluing.
    pub fn refine_klein(&self, k: &PieceId) -> Result<PartitionedSurface, Error> {
        if self.piece_type(k) != Some(SurfaceType::new(-2, 1, 0)) {
            return Err(Error::NotKleinBottleOneHole(k.clone()));
        }
        let mut p = self.clone();
        let old_slot = EndPoint { piece: k.clone(), slot: 1 };
        let inherited = p.occupied.get(&old_slot).copied().and_then(|e| p.remove_edge(e));
        p.remove_piece(k);
        let core = PieceId(format!("{k}_core"));
        let body = PieceId(format!("{k}_body"));
        p.add_piece(core.clone(), SurfaceType::new(0, 2, 0))?;
        p.add_piece(body.clone(), SurfaceType::new(0, 3, 0))?;
        let label = Some(format!("klein-core({k})"));
        p.glue(
            EndPoint { piece: core.clone(), slot: 1 },
            EndPoint { piece: body.clone(), slot: 1 },
            false,
            label.clone(),
        )
        .expect("fresh pieces have free slots");
        p.glue(
            EndPoint { piece: core.clone(), slot: 2 },
            EndPoint { piece: body.clone(), slot: 2 },
            true,
            label,
        )
        .expect("fresh pieces have free slots");
        if let Some(e) = inherited {
            let far = e.other_end(k).expect("inherited edge touched the old piece").clone();
            p.glue(EndPoint { piece: body.clone(), slot: 3 }, far, e.flip, e.label)
                .expect("inherited slot is free");
        }
        Ok(p)
    }

    /// Model equality up to edge identity: same pieces and the same multiset
    /// of (ends, flip, label) gluings.
    pub fn same_model(&self, other: &PartitionedSurface) -> bool {
        self.pieces == other.pieces && self.canonical_edges() == other.canonical_edges()
    }

    /// Edge data sorted by endpoints, independent of edge ids.
    pub fn canonical_edges(&self) -> Vec<(EndPoint, EndPoint, bool, Option<String>)> {
        let mut out: Vec<_> = self
            .edges
            .values()
            .map(|e| (e.ends.0.clone(), e.ends.1.clone(), e.flip, e.label.clone()))
            .collect();
        out.sort();
        out
    }

    /// Total boundary-slot count over all pieces.
    pub fn total_slots(&self) -> u64 {
        self.pieces.values().map(|t| u64::from(t.boundary)).sum()
    }

    /// Sum of piece Euler characteristics.
    pub fn total_chi(&self) -> i64 {
        self.pieces.values().map(|t| t.euler_characteristic()).sum()
    }
}

/// Ambient types on which annulus-chain isotopy reasoning is incomplete.
pub(crate) fn ambient_isotopy_guard(t: SurfaceType) -> bool {
    t == SurfaceType::new(1, 0, 0)
        || t == SurfaceType::new(-2, 0, 0)
        || (t.genus == 0 && t.boundary + t.punctures <= 4)
        || (t.genus == -1 && 2 * t.boundary + t.punctures <= 2)
        || t == SurfaceType::new(-2, 1, 0)
}

/// Disjoint-set structure over circle references.
struct UnionFind {
    index: BTreeMap<CircleRef, usize>,
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(refs: &[CircleRef]) -> Self {
        let index = refs.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        UnionFind { index, parent: (0..refs.len()).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: &CircleRef, b: &CircleRef) {
        let (Some(&i), Some(&j)) = (self.index.get(a), self.index.get(b)) else {
            return;
        };
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[ri.max(rj)] = ri.min(rj);
        }
    }

    fn finish(mut self) -> CircleClasses {
        let mut groups: BTreeMap<usize, BTreeSet<CircleRef>> = BTreeMap::new();
        let items: Vec<(CircleRef, usize)> =
            self.index.iter().map(|(r, i)| (r.clone(), *i)).collect();
        for (r, i) in items {
            let root = self.find(i);
            groups.entry(root).or_default().insert(r);
        }
        let mut class_of = BTreeMap::new();
        let mut classes = Vec::new();
        for members in groups.into_values() {
            let representative = members.iter().next().expect("group is nonempty").clone();
            let idx = classes.len();
            for m in &members {
                class_of.insert(m.clone(), idx);
            }
            classes.push(IsotopyClass { representative, members });
        }
        classes.sort();
        let mut class_of = class_of;
        for (idx, c) in classes.iter().enumerate() {
            for m in &c.members {
                class_of.insert(m.clone(), idx);
            }
        }
        CircleClasses { class_of, classes }
    }
}

/// The partition's circles grouped into annulus-chain classes.
#[derive(Debug, Clone)]
pub struct CircleClasses {
    class_of: BTreeMap<CircleRef, usize>,
    classes: Vec<IsotopyClass>,
}

impl CircleClasses {
    /// Whether two circles fall in the same class; `None` when a reference is
    /// unknown.
    pub fn same(&self, a: &CircleRef, b: &CircleRef) -> Option<bool> {
        Some(self.class_of.get(a)? == self.class_of.get(b)?)
    }

    pub fn class_of(&self, c: &CircleRef) -> Option<&IsotopyClass> {
        self.classes.get(*self.class_of.get(c)?)
    }

    pub fn representative(&self, c: &CircleRef) -> Option<&CircleRef> {
        self.class_of(c).map(|cl| &cl.representative)
    }

    pub fn classes(&self) -> &[IsotopyClass] {
        &self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceType;

    fn t(g: i32, r: u32, s: u32) -> SurfaceType {
        SurfaceType::new(g, r, s)
    }

    fn end(p: &str, slot: u32) -> EndPoint {
        EndPoint::new(p, slot)
    }

    /// Two pairs of pants glued along all three slot pairs, all even.
    fn genus_two() -> PartitionedSurface {
        let mut p = PartitionedSurface::new();
        p.add_piece("P1", t(0, 3, 0)).unwrap();
        p.add_piece("P2", t(0, 3, 0)).unwrap();
        for slot in 1..=3 {
            p.glue(end("P1", slot), end("P2", slot), false, None).unwrap();
        }
        p
    }

    #[test]
    fn genus_two_assembles() {
        assert_eq!(genus_two().assemble_type().unwrap(), t(2, 0, 0));
    }

    #[test]
    fn odd_annulus_pair_is_a_klein_bottle() {
        let mut p = PartitionedSurface::new();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("B", t(0, 2, 0)).unwrap();
        p.glue(end("A", 1), end("B", 1), false, None).unwrap();
        p.glue(end("A", 2), end("B", 2), true, None).unwrap();
        assert_eq!(p.assemble_type().unwrap(), t(-2, 0, 0));
        let mut q = PartitionedSurface::new();
        q.add_piece("A", t(0, 2, 0)).unwrap();
        q.add_piece("B", t(0, 2, 0)).unwrap();
        q.glue(end("A", 1), end("B", 1), false, None).unwrap();
        q.glue(end("A", 2), end("B", 2), false, None).unwrap();
        assert_eq!(q.assemble_type().unwrap(), t(1, 0, 0));
    }

    #[test]
    fn nonorientable_piece_forces_nonorientable_assembly() {
        let mut p = PartitionedSurface::new();
        p.add_piece("S", t(-1, 2, 0)).unwrap();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.glue(end("S", 1), end("P", 1), false, None).unwrap();
        p.glue(end("S", 2), end("P", 2), false, None).unwrap();
        let ty = p.assemble_type().unwrap();
        assert!(ty.genus < 0, "assembled {ty}");
    }

    #[test]
    fn gluing_violations_are_rejected() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        assert_eq!(p.add_piece("P", t(0, 2, 0)), Err(Error::DuplicatePiece("P".into())));
        assert_eq!(
            p.glue(end("P", 1), end("P", 2), false, None),
            Err(Error::SelfGluing("P".into()))
        );
        assert_eq!(p.glue(end("P", 4), end("Q", 1), false, None), Err(Error::BadSlot(end("P", 4))));
        p.glue(end("P", 1), end("Q", 1), false, None).unwrap();
        assert_eq!(
            p.glue(end("P", 1), end("Q", 2), false, None),
            Err(Error::SlotOccupied(end("P", 1)))
        );
    }

    #[test]
    fn cut_preserves_chi_and_adds_two_boundary_slots() {
        let p = genus_two();
        let e = CircleRef::Edge(p.edges().next().unwrap().0);
        let (cutted, sides) = p.cut(&e).unwrap();
        assert_eq!(cutted.total_chi(), p.total_chi());
        assert_eq!(sides.len(), 1);
        assert_eq!(sides[0].1, t(1, 2, 0));
        let glued_before = 2 * p.edge_count() as i64;
        let glued_after = 2 * cutted.edge_count() as i64;
        assert_eq!(glued_before - glued_after, 2);
    }

    #[test]
    fn cut_refuses_boundary_circles() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("Q", 1), false, None).unwrap();
        let b = CircleRef::AmbientBoundary(end("P", 2));
        assert_eq!(p.cut(&b).unwrap_err(), Error::NotAnEdge);
    }

    #[test]
    fn disk_sides_are_not_generic() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("D", t(0, 1, 1)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        let e_disk = p.glue(end("P", 1), end("D", 1), false, None).unwrap();
        let e_mid = p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        assert!(!p.is_generic_circle(&CircleRef::Edge(e_disk)).unwrap());
        assert!(p.is_essential_circle(&CircleRef::Edge(e_disk)).unwrap());
        assert!(p.is_generic_circle(&CircleRef::Edge(e_mid)).unwrap());
    }

    #[test]
    fn moebius_sides_are_not_generic() {
        let mut p = PartitionedSurface::new();
        p.add_piece("M", t(-1, 1, 0)).unwrap();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        let e = p.glue(end("M", 1), end("P", 1), false, None).unwrap();
        assert!(!p.is_generic_circle(&CircleRef::Edge(e)).unwrap());
    }

    #[test]
    fn annulus_chain_identifies_circles() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        let e1 = p.glue(end("P", 1), end("A", 1), false, None).unwrap();
        let e2 = p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        let e3 = p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        let classes = p.isotopy_classes();
        assert_eq!(classes.same(&CircleRef::Edge(e1), &CircleRef::Edge(e2)), Some(true));
        assert_eq!(classes.same(&CircleRef::Edge(e1), &CircleRef::Edge(e3)), Some(false));
    }

    #[test]
    fn isotopy_guard_refuses_small_ambients_for_boundary_refs() {
        let mut p = PartitionedSurface::new();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("B", t(0, 2, 0)).unwrap();
        p.glue(end("A", 1), end("B", 1), false, None).unwrap();
        let b1 = CircleRef::AmbientBoundary(end("A", 2));
        let b2 = CircleRef::AmbientBoundary(end("B", 2));
        assert_eq!(p.circles_isotopic(&b1, &b2).unwrap_err(), Error::AmbiguousAmbient(t(0, 2, 0)));
    }

    #[test]
    fn isotopy_guard_allows_edges_of_normalized_torus_partition() {
        let mut p = PartitionedSurface::new();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("B", t(0, 2, 0)).unwrap();
        let e1 = p.glue(end("A", 1), end("B", 1), false, None).unwrap();
        let e2 = p.glue(end("A", 2), end("B", 2), false, None).unwrap();
        assert!(p.is_normalized());
        assert_eq!(p.circles_isotopic(&CircleRef::Edge(e1), &CircleRef::Edge(e2)), Ok(true));
    }

    #[test]
    fn genus_two_edges_are_pairwise_nonisotopic() {
        let p = genus_two();
        let edges: Vec<EdgeId> = p.edges().map(|(id, _)| id).collect();
        for (i, a) in edges.iter().enumerate() {
            for b in &edges[i + 1..] {
                assert_eq!(
                    p.circles_isotopic(&CircleRef::Edge(*a), &CircleRef::Edge(*b)),
                    Ok(false)
                );
            }
        }
    }

    #[test]
    fn normalize_merges_unlabeled_interior_annuli() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("A", 1), true, None).unwrap();
        p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        let n = p.normalize();
        assert_eq!(n.piece_count(), 2);
        assert_eq!(n.edge_count(), 3);
        assert_eq!(n.assemble_type(), p.assemble_type());
        let merged = n
            .edges()
            .find(|(_, e)| e.ends.0 == end("P", 1))
            .expect("merged edge present");
        assert!(merged.1.flip, "merged flip is the parity sum");
        assert!(n.is_normalized());
        assert!(n.normalize().same_model(&n));
    }

    #[test]
    fn normalize_keeps_labeled_annuli() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("A", 1), false, Some("c".into())).unwrap();
        p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        assert!(p.normalize().same_model(&p));
    }

    #[test]
    fn normalize_respects_selection_boundaries() {
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("A", t(0, 2, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("A", 1), false, None).unwrap();
        p.glue(end("A", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        // A is an exterior annulus between the selected pieces; merging it
        // would rewire the selection's complement, so it must stay.
        let mut sels = [Selection::from(["P".into(), "Q".into()])];
        let n = p.normalize_with_selections(&mut sels);
        assert!(n.same_model(&p));
        // With the annulus selected alongside a neighbor the merge is safe.
        let mut sels = [Selection::from(["P".into(), "A".into(), "Q".into()])];
        let n = p.normalize_with_selections(&mut sels);
        assert_eq!(n.piece_count(), 2);
        assert_eq!(sels[0].len(), 2);
    }

    #[test]
    fn insert_annulus_round_trips_through_normalize() {
        let p = genus_two();
        let e = CircleRef::Edge(p.edges().next().unwrap().0);
        let (q, a) = p.insert_annulus(&e).unwrap();
        assert_eq!(q.piece_count(), p.piece_count() + 1);
        assert_eq!(q.edge_count(), p.edge_count() + 1);
        assert_eq!(q.total_chi(), p.total_chi());
        assert_eq!(q.assemble_type(), p.assemble_type());
        assert!(q.piece_type(&a).is_some());
        assert!(q.normalize().same_model(&p));
    }

    #[test]
    fn refined_klein_assembles_back() {
        let mut p = PartitionedSurface::new();
        p.add_piece("K", t(-2, 1, 0)).unwrap();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("K", 1), end("P", 1), false, None).unwrap();
        p.glue(end("P", 2), end("Q", 1), false, None).unwrap();
        p.glue(end("P", 3), end("Q", 2), false, None).unwrap();
        let before = p.assemble_type().unwrap();
        let q = p.refine_klein(&"K".into()).unwrap();
        assert_eq!(q.assemble_type().unwrap(), before);
        assert_eq!(q.total_chi(), p.total_chi());
        let refined: Selection = ["K_core".into(), "K_body".into()].into();
        assert_eq!(q.assemble_type_of(&refined).unwrap(), t(-2, 1, 0));
        assert_eq!(
            q.refine_klein(&"K".into()).unwrap_err(),
            Error::NotKleinBottleOneHole("K".into())
        );
        let labeled = q
            .edges()
            .filter(|(_, e)| e.label.as_deref() == Some("klein-core(K)"))
            .count();
        assert_eq!(labeled, 2);
    }

    #[test]
    fn klein_refinement_complement_of_core_is_a_pantalon() {
        let mut p = PartitionedSurface::new();
        p.add_piece("K", t(-2, 1, 0)).unwrap();
        let q = p.refine_klein(&"K".into()).unwrap();
        assert_eq!(q.assemble_type().unwrap(), t(-2, 1, 0));
        let body: Selection = ["K_body".into()].into();
        assert_eq!(q.assemble_type_of(&body).unwrap(), t(0, 3, 0));
    }

    #[test]
    fn klein_hole_lookup_separates_core_from_boundary() {
        let mut p = PartitionedSurface::new();
        p.add_piece("K", t(-2, 1, 0)).unwrap();
        let q = p.refine_klein(&"K".into()).unwrap();
        // Collar the boundary so the boundary-parallel class has an edge.
        let mut q = q;
        q.add_piece("C", t(0, 2, 0)).unwrap();
        let e_bd = q.glue(end("K_body", 3), end("C", 1), false, None).unwrap();
        let core_edge = q.edge_at(&end("K_core", 1)).unwrap();
        let classes = q.isotopy_classes();
        assert_eq!(classes.same(&CircleRef::Edge(core_edge), &CircleRef::Edge(e_bd)), Some(false));
        assert_eq!(
            classes.same(
                &CircleRef::Edge(e_bd),
                &CircleRef::AmbientBoundary(end("C", 2))
            ),
            Some(true)
        );
        let generic_edge_classes: BTreeSet<&CircleRef> = q
            .edges()
            .map(|(id, _)| CircleRef::Edge(id))
            .filter(|c| q.is_generic_circle(c).unwrap())
            .map(|c| classes.representative(&c).unwrap())
            .collect();
        assert_eq!(generic_edge_classes.len(), 2);
    }

    #[test]
    fn flip_coboundary_does_not_change_assembled_type() {
        // Re-gluing the same pieces with all parities toggled at one
        // orientable piece leaves every cycle parity unchanged.
        let mut p = PartitionedSurface::new();
        p.add_piece("P", t(0, 3, 0)).unwrap();
        p.add_piece("Q", t(0, 3, 0)).unwrap();
        p.glue(end("P", 1), end("Q", 1), true, None).unwrap();
        p.glue(end("P", 2), end("Q", 2), true, None).unwrap();
        p.glue(end("P", 3), end("Q", 3), false, None).unwrap();
        let mut q = PartitionedSurface::new();
        q.add_piece("P", t(0, 3, 0)).unwrap();
        q.add_piece("Q", t(0, 3, 0)).unwrap();
        q.glue(end("P", 1), end("Q", 1), false, None).unwrap();
        q.glue(end("P", 2), end("Q", 2), false, None).unwrap();
        q.glue(end("P", 3), end("Q", 3), true, None).unwrap();
        assert_eq!(p.assemble_type(), q.assemble_type());
    }
}
