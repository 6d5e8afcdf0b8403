//! Surface types in the signed-genus convention and the classification
//! facts attached to them.
//!
//! A [`SurfaceType`] records (genus, boundary components, punctures).
//! Negative genus means nonorientable: genus `-g` (g > 0) is the connected
//! sum of g projective planes. Orientable genus is counted in handles.

use std::fmt;

use crate::partition::{EndPoint, PartitionedSurface, PieceId};
use crate::Error;

/// Homeomorphism type of a compact surface with boundary and punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceType {
    /// Signed genus: `>= 0` orientable handle count, `< 0` crosscap count negated.
    pub genus: i32,
    /// Number of boundary components.
    pub boundary: u32,
    /// Number of punctures (marked interior points).
    pub punctures: u32,
}

impl SurfaceType {
    pub const fn new(genus: i32, boundary: u32, punctures: u32) -> Self {
        SurfaceType { genus, boundary, punctures }
    }

    pub fn orientable(&self) -> bool {
        self.genus >= 0
    }

    /// A surface is closed when it has no boundary components; punctures do
    /// not count against closedness.
    pub fn is_closed(&self) -> bool {
        self.boundary == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = i64::from(self.genus);
        let r = i64::from(self.boundary);
        let s = i64::from(self.punctures);
        if self.genus >= 0 {
            2 - 2 * g - r - s
        } else {
            2 + g - r - s
        }
    }

    /// Reconstruct a type from its Euler characteristic, orientability,
    /// boundary count and puncture count. Inverse of `euler_characteristic`
    /// on valid data.
    pub(crate) fn from_invariants(chi: i64, orientable: bool, boundary: u32, punctures: u32) -> Self {
        let r = i64::from(boundary);
        let s = i64::from(punctures);
        let genus = if orientable {
            let twice = 2 - chi - r - s;
            debug_assert!(twice >= 0 && twice % 2 == 0, "orientable genus must be a nonnegative integer");
            (twice / 2) as i32
        } else {
            let g = chi - 2 + r + s;
            debug_assert!(g <= -1, "nonorientable genus must be negative");
            g as i32
        };
        SurfaceType::new(genus, boundary, punctures)
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M_{{{},{}}}", self.genus, self.boundary)?;
        if self.punctures > 0 {
            write!(f, "^{}", self.punctures)?;
        }
        Ok(())
    }
}

/// Elementary piece classes plus the small closed surfaces that show up as
/// ambient guards. `Other` collects everything outside the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceClass {
    /// Disk with two punctures, `M_{0,1}^2`.
    PantalonI,
    /// Annulus with one puncture, `M_{0,2}^1`.
    PantalonII,
    /// Pair of pants, `M_{0,3}`.
    PantalonIII,
    /// Punctured Möbius strip, `M_{-1,1}^1`.
    SkirtI,
    /// Möbius strip with an extra hole, `M_{-1,2}`.
    SkirtII,
    /// Unpunctured annulus, `M_{0,2}`.
    Annulus,
    /// Unpunctured Möbius strip, `M_{-1,1}`.
    MobiusStrip,
    /// Annulus with one puncture. Alias class for `M_{0,2}^1`; classification
    /// reports `PantalonII` for that type, so this tag names the concept in
    /// APIs without ever being the canonical answer.
    PuncturedAnnulus,
    /// Klein bottle with one boundary component, `M_{-2,1}`.
    KleinBottleOneHole,
    /// Disk with the given number of punctures, `M_{0,1}^s`.
    Disk(u32),
    Torus,
    KleinBottle,
    Other,
}

/// Total classification of a surface type into the piece table.
///
/// The named pantalon/skirt/annulus/Klein classes take precedence over the
/// generic `Disk(s)` family, so `M_{0,1}^2` classifies as `PantalonI` and
/// `M_{0,2}^1` as `PantalonII`.
pub fn classify_piece(t: SurfaceType) -> PieceClass {
    match (t.genus, t.boundary, t.punctures) {
        (0, 1, 2) => PieceClass::PantalonI,
        (0, 2, 1) => PieceClass::PantalonII,
        (0, 3, 0) => PieceClass::PantalonIII,
        (-1, 1, 1) => PieceClass::SkirtI,
        (-1, 2, 0) => PieceClass::SkirtII,
        (0, 2, 0) => PieceClass::Annulus,
        (-1, 1, 0) => PieceClass::MobiusStrip,
        (-2, 1, 0) => PieceClass::KleinBottleOneHole,
        (0, 1, s) => PieceClass::Disk(s),
        (1, 0, 0) => PieceClass::Torus,
        (-2, 0, 0) => PieceClass::KleinBottle,
        _ => PieceClass::Other,
    }
}

/// What is known about the mapping class group of a surface type.
///
/// Fields are `None` when the table has nothing to say. Invariants kept by
/// construction: `trivial` implies `finite_order == Some(1)`, and any finite
/// order implies `virtually_abelian == Some(true)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McgProfile {
    pub trivial: bool,
    pub finite_order: Option<u64>,
    pub virtually_abelian: Option<bool>,
    pub abelian_rank: Option<u32>,
    pub name: Option<String>,
}

impl McgProfile {
    fn unknown() -> Self {
        McgProfile { trivial: false, finite_order: None, virtually_abelian: None, abelian_rank: None, name: None }
    }

    fn trivial_group() -> Self {
        McgProfile {
            trivial: true,
            finite_order: Some(1),
            virtually_abelian: Some(true),
            abelian_rank: Some(0),
            name: None,
        }
    }

    fn finite(order: u64, name: &str) -> Self {
        McgProfile {
            trivial: false,
            finite_order: Some(order),
            virtually_abelian: Some(true),
            abelian_rank: Some(0),
            name: Some(name.to_string()),
        }
    }

    fn free_abelian(rank: u32) -> Self {
        McgProfile {
            trivial: false,
            finite_order: None,
            virtually_abelian: Some(true),
            abelian_rank: Some(rank),
            name: None,
        }
    }
}

/// Mapping class group facts for a surface type, with punctures fixed
/// pointwise and boundary fixed pointwise.
pub fn mcg_profile(t: SurfaceType) -> McgProfile {
    match (t.genus, t.boundary, t.punctures) {
        // Disk-like and small projective-plane types carry no mapping classes.
        (0, 0 | 1, 0 | 1) => McgProfile::trivial_group(),
        (-1, 0 | 1, 0) => McgProfile::trivial_group(),
        (-1, 0, 1) => McgProfile::finite(2, "Z2"),
        (-1, 0, 2) => McgProfile::finite(8, "D4"),
        (-2, 0, 0) => McgProfile::finite(4, "Z2xZ2"),
        (1, 0, 0 | 1) => McgProfile {
            trivial: false,
            finite_order: None,
            virtually_abelian: Some(false),
            abelian_rank: None,
            name: Some("SL2Z".to_string()),
        },
        (0, 2, 0) => McgProfile::free_abelian(1),
        // Annulus with one puncture: free abelian on the two boundary twists.
        (0, 2, 1) => McgProfile::free_abelian(2),
        (0, 3, 0) => McgProfile::free_abelian(3),
        (-1, 1, 1) => McgProfile::free_abelian(1),
        (-1, 2, 0) => McgProfile::free_abelian(2),
        // Klein bottle with one hole: contains the free abelian group on the
        // core twist and the boundary twist with index two.
        (-2, 1, 0) => McgProfile {
            trivial: false,
            finite_order: None,
            virtually_abelian: Some(true),
            abelian_rank: Some(2),
            name: Some("ZxZ_index_2".to_string()),
        },
        (0, 1, s) => {
            let mut p = if s == 2 { McgProfile::free_abelian(1) } else { McgProfile::unknown() };
            p.name = Some(format!("braid_{s}"));
            if s >= 3 {
                p.virtually_abelian = Some(false);
            }
            p
        }
        _ => McgProfile::unknown(),
    }
}

/// Whether the type decomposes into pantalons and skirts along circles.
pub fn ps_decomposition_exists(t: SurfaceType) -> bool {
    let g = i64::from(t.genus);
    let r = i64::from(t.boundary);
    let s = i64::from(t.punctures);
    if t.genus >= 0 {
        2 * g + r + s > 2 && t != SurfaceType::new(0, 0, 3)
    } else {
        r + s - g > 2 && t != SurfaceType::new(-1, 0, 2)
    }
}

pub(crate) fn is_single_piece_type(t: SurfaceType) -> bool {
    matches!(
        classify_piece(t),
        PieceClass::PantalonI
            | PieceClass::PantalonII
            | PieceClass::PantalonIII
            | PieceClass::SkirtI
            | PieceClass::SkirtII
            | PieceClass::Annulus
    )
}

/// Guard shared by the builder: buildable means decomposable or a piece type.
pub(crate) fn ps_buildable(t: SurfaceType) -> Result<(), Error> {
    if ps_decomposition_exists(t) || is_single_piece_type(t) {
        Ok(())
    } else {
        Err(Error::NoDecomposition(t))
    }
}

/// Build a concrete partition of `t` into pantalons, skirts and annuli.
///
/// Annulus pieces stand in for decomposition circles whose regular
/// neighbourhood meets the same piece from both sides; a direct gluing of two
/// slots of one piece is not representable. Construction is deterministic:
/// generated piece ids follow creation order and every attachment targets the
/// first open slot.
pub fn build_ps_partition(t: SurfaceType) -> Result<PartitionedSurface, Error> {
    ps_buildable(t)?;
    let mut p = PartitionedSurface::new();
    if t.boundary >= 1 {
        build_open(&mut p, t);
    } else {
        let g = t.genus;
        match (g, t.punctures) {
            (1, 1) => build_closed_loop(&mut p, false),
            (-2, 1) => build_closed_loop(&mut p, true),
            (_, 1) if g >= 2 => {
                build_open(&mut p, SurfaceType::new(g - 1, 1, 1));
                close_with_loop(&mut p, false);
            }
            (_, 1) if g <= -3 => {
                build_open(&mut p, SurfaceType::new(g + 2, 1, 1));
                close_with_loop(&mut p, true);
            }
            (_, s) if s >= 2 => {
                build_open(&mut p, SurfaceType::new(g, 1, s - 2));
                let slot = first_free(&p);
                let cap = add_piece(&mut p, SurfaceType::new(0, 1, 2));
                p.glue(EndPoint { piece: cap, slot: 1 }, slot, false, None)
                    .expect("cap slot is free");
            }
            (_, 0) if g >= 2 => build_necklace(&mut p, g),
            (-3, 0) => {
                let s = add_piece(&mut p, SurfaceType::new(-1, 2, 0));
                let a = add_piece(&mut p, SurfaceType::new(0, 2, 0));
                p.glue(EndPoint { piece: s.clone(), slot: 1 }, EndPoint { piece: a.clone(), slot: 1 }, false, None)
                    .expect("fresh slots are free");
                p.glue(EndPoint { piece: s, slot: 2 }, EndPoint { piece: a, slot: 2 }, false, None)
                    .expect("fresh slots are free");
            }
            (_, 0) if g <= -4 => build_skirt_cycle(&mut p, (-g) as u32),
            _ => unreachable!("buildable closed type {t} missed by the dispatch"),
        }
    }
    debug_assert_eq!(p.assemble_type(), Ok(t));
    Ok(p)
}

fn add_piece(p: &mut PartitionedSurface, t: SurfaceType) -> PieceId {
    let id = p.generate_id("b");
    p.add_piece(id.clone(), t).expect("generated id is fresh");
    id
}

fn first_free(p: &PartitionedSurface) -> EndPoint {
    p.free_slots().into_iter().next().expect("construction keeps an open slot")
}

/// Surface with one open slot: pair of pants with two slots closed by an
/// annulus. Even parity yields a one-holed torus, odd a one-holed Klein
/// bottle.
fn build_open_loop(p: &mut PartitionedSurface, odd: bool) {
    let pants = add_piece(p, SurfaceType::new(0, 3, 0));
    let a = add_piece(p, SurfaceType::new(0, 2, 0));
    p.glue(EndPoint { piece: pants.clone(), slot: 1 }, EndPoint { piece: a.clone(), slot: 1 }, false, None)
        .expect("fresh slots are free");
    p.glue(EndPoint { piece: pants, slot: 2 }, EndPoint { piece: a, slot: 2 }, odd, None)
        .expect("fresh slots are free");
}

/// Closed surface with one puncture: punctured annulus with its two slots
/// closed by an annulus. Even parity yields a punctured torus, odd a
/// punctured Klein bottle.
fn build_closed_loop(p: &mut PartitionedSurface, odd: bool) {
    let base = add_piece(p, SurfaceType::new(0, 2, 1));
    let a = add_piece(p, SurfaceType::new(0, 2, 0));
    p.glue(EndPoint { piece: base.clone(), slot: 1 }, EndPoint { piece: a.clone(), slot: 1 }, false, None)
        .expect("fresh slots are free");
    p.glue(EndPoint { piece: base, slot: 2 }, EndPoint { piece: a, slot: 2 }, odd, None)
        .expect("fresh slots are free");
}

/// Close the single remaining slot with a pair of pants whose other two slots
/// are joined by an annulus, trading the slot for a handle (even) or two
/// crosscaps (odd).
fn close_with_loop(p: &mut PartitionedSurface, odd: bool) {
    let slot = first_free(p);
    let pants = add_piece(p, SurfaceType::new(0, 3, 0));
    let a = add_piece(p, SurfaceType::new(0, 2, 0));
    p.glue(EndPoint { piece: pants.clone(), slot: 1 }, slot, false, None)
        .expect("targeted slot is free");
    p.glue(EndPoint { piece: pants.clone(), slot: 2 }, EndPoint { piece: a.clone(), slot: 1 }, false, None)
        .expect("fresh slots are free");
    p.glue(EndPoint { piece: pants, slot: 3 }, EndPoint { piece: a, slot: 2 }, odd, None)
        .expect("fresh slots are free");
}

/// Closed orientable genus `g >= 2` as a cyclic ring of `2g-2` pairs of
/// pants with third slots matched in adjacent pairs.
fn build_necklace(p: &mut PartitionedSurface, g: i32) {
    let n = (2 * g - 2) as usize;
    let ids: Vec<PieceId> = (0..n).map(|_| add_piece(p, SurfaceType::new(0, 3, 0))).collect();
    for i in 0..n {
        let j = (i + 1) % n;
        p.glue(
            EndPoint { piece: ids[i].clone(), slot: 1 },
            EndPoint { piece: ids[j].clone(), slot: 2 },
            false,
            None,
        )
        .expect("ring slots are free");
    }
    for i in (0..n).step_by(2) {
        p.glue(
            EndPoint { piece: ids[i].clone(), slot: 3 },
            EndPoint { piece: ids[i + 1].clone(), slot: 3 },
            false,
            None,
        )
        .expect("pair slots are free");
    }
}

/// Closed nonorientable surface with `c >= 4` crosscaps as a cycle of `c-2`
/// two-holed Möbius pieces.
fn build_skirt_cycle(p: &mut PartitionedSurface, c: u32) {
    let n = (c - 2) as usize;
    let ids: Vec<PieceId> = (0..n).map(|_| add_piece(p, SurfaceType::new(-1, 2, 0))).collect();
    for i in 0..n {
        let j = (i + 1) % n;
        p.glue(
            EndPoint { piece: ids[i].clone(), slot: 2 },
            EndPoint { piece: ids[j].clone(), slot: 1 },
            false,
            None,
        )
        .expect("cycle slots are free");
    }
}

/// Build a surface with `t.boundary >= 1` open slots by peeling punctures,
/// boundary circles, handles and crosscaps down to a single-piece base.
fn build_open(p: &mut PartitionedSurface, t: SurfaceType) {
    debug_assert!(t.boundary >= 1, "open builder needs a boundary slot");
    if is_single_piece_type(t) {
        add_piece(p, t);
        return;
    }
    if t == SurfaceType::new(1, 1, 0) {
        build_open_loop(p, false);
        return;
    }
    if t == SurfaceType::new(-2, 1, 0) {
        build_open_loop(p, true);
        return;
    }
    let (g, r, s) = (t.genus, t.boundary, t.punctures);
    if s >= 1 {
        build_open(p, SurfaceType::new(g, r, s - 1));
        let slot = first_free(p);
        let q = add_piece(p, SurfaceType::new(0, 2, 1));
        p.glue(EndPoint { piece: q, slot: 1 }, slot, false, None)
            .expect("targeted slot is free");
        return;
    }
    if r >= 2 {
        build_open(p, SurfaceType::new(g, r - 1, 0));
        let slot = first_free(p);
        let q = add_piece(p, SurfaceType::new(0, 3, 0));
        p.glue(EndPoint { piece: q, slot: 1 }, slot, false, None)
            .expect("targeted slot is free");
        return;
    }
    if g >= 2 {
        build_open(p, SurfaceType::new(g - 1, 1, 0));
        let slot = first_free(p);
        let a = add_piece(p, SurfaceType::new(0, 3, 0));
        let b = add_piece(p, SurfaceType::new(0, 3, 0));
        p.glue(EndPoint { piece: a.clone(), slot: 1 }, slot, false, None)
            .expect("targeted slot is free");
        p.glue(EndPoint { piece: a.clone(), slot: 2 }, EndPoint { piece: b.clone(), slot: 1 }, false, None)
            .expect("fresh slots are free");
        p.glue(EndPoint { piece: a, slot: 3 }, EndPoint { piece: b, slot: 2 }, false, None)
            .expect("fresh slots are free");
        return;
    }
    if g <= -3 {
        build_open(p, SurfaceType::new(g + 1, 1, 0));
        let slot = first_free(p);
        let sk = add_piece(p, SurfaceType::new(-1, 2, 0));
        p.glue(EndPoint { piece: sk, slot: 1 }, slot, false, None)
            .expect("targeted slot is free");
        return;
    }
    unreachable!("buildable open type {t} missed by the peel dispatch")
}
