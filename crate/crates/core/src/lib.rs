//! Surfaces presented as graphs of glued elementary pieces.
//!
//! The crate models a compact connected surface as a collection of small
//! standard pieces (pantalons, skirts, annuli) joined along boundary circles,
//! and answers group-theoretic questions about the mapping class groups of
//! its subsurfaces: kernels of inclusion-induced maps, virtually abelian
//! classification, commensurability of geometric subgroups, commensurator
//! case analysis, and noncommensurable-stabilizer sweeps over the reduced
//! complex of curves. An exact integer-lattice toolkit backs the rank and
//! index computations as an independent oracle.

pub mod commensurability;
pub mod complex;
pub mod corpus;
pub mod format;
pub mod lattice;
pub mod par;
pub mod partition;
pub mod report;
pub mod subsurface;
pub mod surface;

use partition::{EndPoint, PieceId};

/// Errors shared by all model operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("piece id {0} already in use")]
    DuplicatePiece(PieceId),
    #[error("piece {0} does not exist")]
    UnknownPiece(PieceId),
    #[error("slot {0} does not exist on its piece")]
    BadSlot(EndPoint),
    #[error("slot {0} is already glued")]
    SlotOccupied(EndPoint),
    #[error("both ends of a gluing lie on piece {0}; insert an annulus instead")]
    SelfGluing(PieceId),
    #[error("{0} admits no decomposition into pantalons and skirts")]
    NoDecomposition(SurfaceType),
    #[error("piece set is not connected")]
    Disconnected,
    #[error("circle reference is not an edge of this partition")]
    NotAnEdge,
    #[error("ambient surface {0} is too small for a sound isotopy answer")]
    AmbiguousAmbient(SurfaceType),
    #[error("piece {0} is not a Klein bottle with one hole")]
    NotKleinBottleOneHole(PieceId),
    #[error("selection covers every piece; a proper subsurface is required")]
    SelectionIsAll,
    #[error("selection is not an essential subsurface")]
    NotEssential,
    #[error("selection is not a generic subsurface")]
    NotGeneric,
    #[error("selection is not virtually abelian")]
    NotVirtuallyAbelian,
    #[error("selection does not induce an injective map")]
    NotInjective,
    #[error("operation is undefined for ambient surface {0}")]
    AmbientExcluded(SurfaceType),
    #[error("selections share pieces that are not whole common components")]
    OverlappingSelections,
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("no interior edge represents the distinguished circle of this Klein component")]
    KleinCoreUnrepresentable,
    #[error("generators do not lie in the claimed supergroup")]
    NotASubgroup,
    #[error("selection has a component (Klein bottle with one hole or annulus) outside this operation's scope")]
    ForbiddenComponents,
}

pub use commensurability::{
    commensurable, commensurator_case, component_core, decide_by_gluing_structure,
    isotopic_components, klein_reduce, stab_star_descriptor, strip_common,
    CommensurabilityCertificate, CommensurabilityVerdict, CommensuratorCase, KleinMatch,
    KleinMatchMode, KleinReduceOutcome, StabStarDescriptor, StripOutcome,
};
pub use complex::{
    eligible_vertices, is_reduced, m_sigma, ncs_check, phi, stab_commensurable, NcsReport,
    ReducedFlag, Simplex,
};
pub use corpus::{
    common_component_instances, corpus_rng, essential_corpus, generic_corpus,
    klein_ambient_family, random_essential_selection, random_finite_index_sublattice,
    random_full_rank_instance, random_generic_selection, random_lattice, random_map,
    random_matrix, random_partition, random_sublattice, CorpusRng,
};
pub use format::{parse, serialize, ParseError, ParseErrorKind, SurfaceDocument};
pub use report::{Report, ReportFormat};
pub use par::ExecMode;
pub use lattice::{
    coset_count, kernel_relation_rank, lattice_commensurable, smith_normal_form, subgroup_index,
    twist_lattice_rank, verify_index_product, Index, IntMatrix, Lattice, SmithDecomposition,
};
pub use partition::{
    CircleRef, EdgeId, GluingEdge, IsotopyClass, PartitionedSurface, Selection,
};
pub use subsurface::{
    basic_circles, exterior_cylinders, is_essential, is_generic_subsurface, is_injective,
    is_virtually_abelian, kernel_description, non_va_component, refine_kleins, BasicCircles,
    KernelDescription, KleinRefinement,
};
pub use surface::{
    build_ps_partition, classify_piece, mcg_profile, ps_decomposition_exists, McgProfile,
    PieceClass, SurfaceType,
};
