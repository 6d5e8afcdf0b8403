//! The circle complex of a partitioned surface: simplices of circle
//! classes, complement subsurfaces, the reduction retraction, and the sweep
//! verifying that distinct simplices have non-commensurable stabilizers.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::commensurability::commensurable;
use crate::par::ExecMode;
use crate::partition::{CircleRef, EndPoint, IsotopyClass, PartitionedSurface, PieceId, Selection};
use crate::subsurface::klein_core_edge;
use crate::surface::SurfaceType;
use crate::Error;

const KLEIN_BOTTLE_ONE_HOLE: SurfaceType = SurfaceType::new(-2, 1, 0);
const PHI_EXCLUDED_AMBIENT: SurfaceType = SurfaceType::new(-4, 0, 0);

fn eligible_class(p: &PartitionedSurface, class: &IsotopyClass) -> Result<bool, Error> {
    let interior = class
        .members
        .iter()
        .all(|m| matches!(m, CircleRef::Edge(_)));
    if !interior {
        return Ok(false);
    }
    p.is_generic_circle(&class.representative)
}

/// Class representatives usable as vertices: classes made of gluing edges
/// only, whose circles are generic.
pub fn eligible_vertices(p: &PartitionedSurface) -> Result<Vec<CircleRef>, Error> {
    let classes = p.isotopy_classes();
    let mut out = Vec::new();
    for class in classes.classes() {
        if eligible_class(p, class)? {
            out.push(class.representative.clone());
        }
    }
    out.sort();
    Ok(out)
}

/// A set of distinct vertex classes, stored as canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Simplex(BTreeSet<CircleRef>);

impl Simplex {
    /// Validate a set of circles as a simplex: every circle must lie in an
    /// eligible class and no two may share a class.
    pub fn new(
        p: &PartitionedSurface,
        circles: impl IntoIterator<Item = CircleRef>,
    ) -> Result<Simplex, Error> {
        let classes = p.isotopy_classes();
        let mut reps = BTreeSet::new();
        for c in circles {
            let class = classes.class_of(&c).ok_or_else(|| {
                Error::InvalidSimplex(format!("unknown circle {}", p.display_circle(&c)))
            })?;
            if !eligible_class(p, class)? {
                return Err(Error::InvalidSimplex(format!(
                    "circle {} is not a generic interior circle",
                    p.display_circle(&c)
                )));
            }
            if !reps.insert(class.representative.clone()) {
                return Err(Error::InvalidSimplex(format!(
                    "two vertices share the class of {}",
                    p.display_circle(&class.representative)
                )));
            }
        }
        Ok(Simplex(reps))
    }

    fn from_reps(reps: BTreeSet<CircleRef>) -> Simplex {
        Simplex(reps)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &CircleRef> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &CircleRef) -> bool {
        self.0.contains(c)
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Render the vertex set with the partition's circle names.
    pub fn display(&self, p: &PartitionedSurface) -> String {
        let names: Vec<String> = self.0.iter().map(|c| p.display_circle(c)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Outcome of the reducedness test, listing the vertices that fail it.
#[derive(Debug, Clone)]
pub struct ReducedFlag {
    /// Whether every vertex cut avoids Klein-bottle components.
    pub reduced: bool,
    /// Vertices whose cut produces a Klein bottle with one hole.
    pub offending: Vec<CircleRef>,
}

/// A simplex is reduced when cutting along any of its vertices never
/// produces a Klein bottle with one hole.
pub fn is_reduced(p: &PartitionedSurface, sigma: &Simplex) -> Result<ReducedFlag, Error> {
    let mut offending = Vec::new();
    for v in sigma.vertices() {
        let (_, sides) = p.cut(v)?;
        if sides.iter().any(|(_, t)| *t == KLEIN_BOTTLE_ONE_HOLE) {
            offending.push(v.clone());
        }
    }
    Ok(ReducedFlag { reduced: offending.is_empty(), offending })
}

/// The reduction retraction: a vertex whose cut produces a Klein bottle
/// with one hole is replaced by the core circle of that component; all
/// other vertices are fixed.  Undefined on the closed genus-4 nonorientable
/// ambient surface.
pub fn phi(p: &PartitionedSurface, sigma: &Simplex) -> Result<Simplex, Error> {
    let ambient = p.assemble_type()?;
    if ambient == PHI_EXCLUDED_AMBIENT {
        return Err(Error::AmbientExcluded(ambient));
    }
    let classes = p.isotopy_classes();
    let mut reps = BTreeSet::new();
    for v in sigma.vertices() {
        let (cut, sides) = p.cut(v)?;
        let klein = sides.iter().find(|(_, t)| *t == KLEIN_BOTTLE_ONE_HOLE);
        let image = match klein {
            Some((comp, _)) => {
                let core = klein_core_edge(&cut, comp)?;
                classes
                    .representative(&CircleRef::Edge(core))
                    .expect("cut preserves the other edges")
                    .clone()
            }
            None => v.clone(),
        };
        reps.insert(image);
    }
    Ok(Simplex::from_reps(reps))
}

fn class_annulus_site(
    p: &PartitionedSurface,
    classes: &crate::partition::CircleClasses,
    rep: &CircleRef,
) -> Result<crate::partition::EdgeId, Error> {
    let class = classes.class_of(rep).ok_or_else(|| {
        Error::InvalidSimplex(format!(
            "vertex {} is not a circle of this partition",
            p.display_circle(rep)
        ))
    })?;
    class
        .members
        .iter()
        .find_map(|c| match c {
            CircleRef::Edge(id) => Some(*id),
            CircleRef::AmbientBoundary(_) => None,
        })
        .ok_or_else(|| {
            Error::InvalidSimplex(format!(
                "vertex {} has no gluing-edge representative",
                p.display_circle(rep)
            ))
        })
}

fn add_boundary_collars(mut q: PartitionedSurface) -> (PartitionedSurface, Selection) {
    let mut collars = Selection::new();
    for slot in q.free_slots() {
        let collar = q.generate_id("n");
        q.add_piece(collar.clone(), SurfaceType::new(0, 2, 0))
            .expect("generated id is fresh");
        q.glue(slot, EndPoint::new(collar.clone(), 1), false, None)
            .expect("slot was free and collar slot 1 is new");
        collars.insert(collar);
    }
    (q, collars)
}

/// The complement subsurface of a simplex: the partition with an annulus
/// inserted at each vertex class and a collar at each free slot, selecting
/// everything except those insertions.
pub fn m_sigma(
    p: &PartitionedSurface,
    sigma: &Simplex,
) -> Result<(PartitionedSurface, Selection), Error> {
    if sigma.is_empty() {
        return Err(Error::InvalidSimplex(
            "the empty simplex has no complement subsurface".to_string(),
        ));
    }
    let classes = p.isotopy_classes();
    let original = p.all_pieces();
    let mut q = p.clone();
    for rep in sigma.vertices() {
        let site = class_annulus_site(p, &classes, rep)?;
        let (next, _) = q.insert_annulus(&CircleRef::Edge(site))?;
        q = next;
    }
    let (q, _collars) = add_boundary_collars(q);
    Ok((q, original))
}

/// Whether the stabilizers of two simplices are commensurable, compared on
/// a common ambient partition carrying annuli for every vertex class of
/// either simplex.
pub fn stab_commensurable(
    p: &PartitionedSurface,
    sigma0: &Simplex,
    sigma1: &Simplex,
) -> Result<bool, Error> {
    if sigma0.is_empty() || sigma1.is_empty() {
        return Err(Error::InvalidSimplex(
            "the empty simplex has no stabilizer subsurface".to_string(),
        ));
    }
    let classes = p.isotopy_classes();
    let union: BTreeSet<CircleRef> = sigma0.vertices().chain(sigma1.vertices()).cloned().collect();
    let mut q = p.clone();
    let mut annulus_for: BTreeMap<CircleRef, PieceId> = BTreeMap::new();
    for rep in &union {
        let site = class_annulus_site(p, &classes, rep)?;
        let (next, piece) = q.insert_annulus(&CircleRef::Edge(site))?;
        q = next;
        annulus_for.insert(rep.clone(), piece);
    }
    let (q, collars) = add_boundary_collars(q);
    let all = q.all_pieces();
    let selection_for = |sigma: &Simplex| -> Selection {
        all.iter()
            .filter(|id| {
                !collars.contains(*id)
                    && !sigma
                        .vertices()
                        .any(|rep| annulus_for.get(rep) == Some(id))
            })
            .cloned()
            .collect()
    };
    let sel0 = selection_for(sigma0);
    let sel1 = selection_for(sigma1);
    Ok(commensurable(&q, &sel0, &sel1)?.commensurable)
}

/// Result of sweeping all simplex pairs for commensurable stabilizers.
#[derive(Debug, Clone)]
pub struct NcsReport {
    /// Number of eligible vertex classes.
    pub vertex_count: usize,
    /// The simplices that entered the sweep, in sorted order.
    pub simplices: Vec<Simplex>,
    /// Number of unordered pairs compared.
    pub pair_count: usize,
    /// Distinct pairs whose stabilizers came back commensurable.
    pub violations: Vec<(Simplex, Simplex)>,
    /// Wall-clock time of the sweep.
    pub elapsed: Duration,
    /// Execution mode that effectively ran.
    pub mode: ExecMode,
}

impl NcsReport {
    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }

    /// Render the face lattice as a DOT graph, highlighting violations.
    pub fn to_dot(&self, p: &PartitionedSurface) -> String {
        let escape = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::from("graph stabilizer_sweep {\n  node [shape=box];\n");
        for (i, s) in self.simplices.iter().enumerate() {
            out.push_str(&format!("  s{} [label=\"{}\"];\n", i, escape(&s.display(p))));
        }
        for (i, a) in self.simplices.iter().enumerate() {
            for (j, b) in self.simplices.iter().enumerate() {
                if a.len() + 1 == b.len() && a.is_face_of(b) {
                    out.push_str(&format!("  s{i} -- s{j};\n"));
                }
            }
        }
        for (a, b) in &self.violations {
            let i = self.simplices.iter().position(|s| s == a);
            let j = self.simplices.iter().position(|s| s == b);
            if let (Some(i), Some(j)) = (i, j) {
                out.push_str(&format!("  s{i} -- s{j} [color=red, penwidth=2];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Enumerate every simplex up to `max_dim` and check that all distinct
/// pairs have non-commensurable stabilizers.  With `include_non_reduced`
/// false, simplices failing [`is_reduced`] are left out of the sweep.
pub fn ncs_check(
    p: &PartitionedSurface,
    max_dim: usize,
    include_non_reduced: bool,
    mode: ExecMode,
) -> Result<NcsReport, Error> {
    let start = Instant::now();
    let vertices = eligible_vertices(p)?;
    let max_size = max_dim + 1;
    let mut simplices = Vec::new();
    for mask in 1u64..(1u64 << vertices.len().min(63)) {
        if (mask.count_ones() as usize) > max_size {
            continue;
        }
        let reps: BTreeSet<CircleRef> = vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        let sigma = Simplex::from_reps(reps);
        if !include_non_reduced && !is_reduced(p, &sigma)?.reduced {
            continue;
        }
        simplices.push(sigma);
    }
    simplices.sort();

    let mut pairs = Vec::new();
    for i in 0..simplices.len() {
        for j in (i + 1)..simplices.len() {
            pairs.push((i, j));
        }
    }
    let pair_count = pairs.len();
    let results = mode.map(pairs, |(i, j)| {
        let verdict = stab_commensurable(p, &simplices[i], &simplices[j]);
        ((i, j), verdict)
    });
    let mut violations = Vec::new();
    for ((i, j), verdict) in results {
        if verdict? {
            violations.push((simplices[i].clone(), simplices[j].clone()));
        }
    }
    Ok(NcsReport {
        vertex_count: vertices.len(),
        simplices,
        pair_count,
        violations,
        elapsed: start.elapsed(),
        mode: mode.effective(),
    })
}
