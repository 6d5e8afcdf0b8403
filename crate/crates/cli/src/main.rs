//! Command-line front end over the surface toolkit: file-based queries on
//! partitioned surfaces, curve-complex sweeps, and randomized exact-arithmetic
//! oracle suites.
//!
//! Exit codes: 0 when the query was answered (negative verdicts included),
//! 1 on usage errors, 2 on model errors such as unparsable files or guard
//! violations.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use geosub::{
    basic_circles, commensurable, commensurator_case, corpus_rng, coset_count, eligible_vertices,
    is_essential, is_generic_subsurface, is_injective, is_reduced, is_virtually_abelian,
    kernel_description, lattice_commensurable, mcg_profile, ncs_check, phi,
    random_finite_index_sublattice, random_full_rank_instance, random_lattice, random_map,
    random_matrix, random_sublattice, refine_kleins, smith_normal_form, stab_star_descriptor,
    subgroup_index, verify_index_product, classify_piece, subsurface::non_va_component,
    lattice::relative_index, ExecMode, Index, KleinMatchMode, Lattice,
    PartitionedSurface, Report, ReportFormat, Selection, Simplex, SurfaceDocument,
};

#[derive(Parser)]
#[command(name = "geosub", version, about = "Mapping class group queries on glued-piece surfaces")]
struct Cli {
    /// Report rendering: human or machine.
    #[arg(long, global = true, default_value = "human")]
    format: String,
    /// Seed for the randomized oracle suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ambient type, piece classes, and the mapping class group profile.
    Classify {
        /// Surface file to read.
        file: PathBuf,
    },
    /// Essential, generic, and injective flags for a named selection.
    Check {
        file: PathBuf,
        /// Name of a selection declared in the file.
        #[arg(long)]
        select: String,
    },
    /// Kernel of the map induced by including the selection.
    Kernel {
        file: PathBuf,
        #[arg(long)]
        select: String,
    },
    /// Virtually abelian test with a witness component on failure.
    Va {
        file: PathBuf,
        #[arg(long)]
        select: String,
    },
    /// Basic circle system of a generic virtually abelian selection.
    BasicCircles {
        file: PathBuf,
        #[arg(long)]
        select: String,
    },
    /// Commensurability of the twist subgroups of two selections.
    Commensurable {
        file: PathBuf,
        /// Selection name; pass exactly twice.
        #[arg(long)]
        select: Vec<String>,
    },
    /// Commensurator shape for an injective selection.
    Commensurator {
        file: PathBuf,
        #[arg(long)]
        select: String,
    },
    /// Curve-complex queries on the file's partition.
    #[command(subcommand)]
    Complex(ComplexCommand),
    /// Randomized exact-arithmetic cross-check suites.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum ComplexCommand {
    /// Eligible vertices and every simplex up to a dimension.
    Enumerate {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
    },
    /// Retraction image of every simplex up to a dimension.
    Phi {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
    },
    /// Pairwise stabilizer-commensurability sweep.
    Ncs {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        /// Sweep simplices outside the reduced complex as well.
        #[arg(long)]
        include_non_reduced: bool,
        /// Print the face lattice as DOT text instead of a report.
        #[arg(long)]
        emit_graph: bool,
        /// Force the single-threaded sweep.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Smith normal form transform identities on random matrices.
    Snf {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Determinant, normal-form, and coset-enumeration index routes.
    Index {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Finite-index closure properties of subgroups of Z^n.
    Comm {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

/// A failed run, split by exit code.
enum Failure {
    Usage(String),
    Model(String),
}

impl From<geosub::Error> for Failure {
    fn from(e: geosub::Error) -> Failure {
        Failure::Model(e.to_string())
    }
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return std::process::ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return std::process::ExitCode::from(1);
        }
    };
    let format = match ReportFormat::from_name(&cli.format) {
        Some(f) => f,
        None => {
            eprintln!("unknown format {:?}; expected human or machine", cli.format);
            return std::process::ExitCode::from(1);
        }
    };
    match run(&cli, format) {
        Ok(output) => {
            print!("{output}");
            std::process::ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            std::process::ExitCode::from(1)
        }
        Err(Failure::Model(msg)) => {
            eprintln!("{msg}");
            std::process::ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, format: ReportFormat) -> Result<String, Failure> {
    match &cli.command {
        Command::Classify { file } => classify_cmd(file, format),
        Command::Check { file, select } => check_cmd(file, select, format),
        Command::Kernel { file, select } => kernel_cmd(file, select, format),
        Command::Va { file, select } => va_cmd(file, select, format),
        Command::BasicCircles { file, select } => basic_circles_cmd(file, select, format),
        Command::Commensurable { file, select } => commensurable_cmd(file, select, format),
        Command::Commensurator { file, select } => commensurator_cmd(file, select, format),
        Command::Complex(action) => complex_cmd(action, format),
        Command::Oracle(action) => oracle_cmd(action, cli.seed, format),
    }
}

fn load(path: &Path) -> Result<SurfaceDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Model(format!("{}: {e}", path.display())))?;
    geosub::parse(&text).map_err(|e| Failure::Model(format!("{}: {e}", path.display())))
}

fn named_selection(doc: &SurfaceDocument, name: &str) -> Result<Selection, Failure> {
    doc.selection(name).cloned().map_err(|e| Failure::Model(e.to_string()))
}

/// Renders an optional value, spelling absence out as `none`.
fn opt<T: Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "none".to_string(),
    }
}

fn piece_set(sel: &Selection) -> String {
    sel.iter().map(|id| id.as_str()).collect::<Vec<_>>().join("+")
}

fn classify_cmd(file: &Path, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let p = &doc.partition;
    let ambient = p.assemble_type()?;
    let mut r = Report::new();
    r.section("surface");
    if let Some(name) = &doc.name {
        r.kv("name", name);
    }
    r.kv("ambient", ambient)
        .kv("orientable", ambient.orientable())
        .kv("closed", ambient.is_closed())
        .kv("euler", ambient.euler_characteristic())
        .kv("pieces", p.pieces().count())
        .kv("edges", p.edges().count())
        .kv("selections", doc.selections.keys().cloned().collect::<Vec<_>>().join(" "));
    r.section("pieces");
    for (id, t) in p.pieces() {
        r.kv(id.as_str(), format!("{t} {:?}", classify_piece(t)));
    }
    let profile = mcg_profile(ambient);
    r.section("mcg")
        .kv("trivial", profile.trivial)
        .kv("finite_order", opt(&profile.finite_order))
        .kv("virtually_abelian", opt(&profile.virtually_abelian))
        .kv("abelian_rank", opt(&profile.abelian_rank))
        .kv("name", opt(&profile.name));
    Ok(r.render(format))
}

fn check_cmd(file: &Path, select: &str, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let p = &doc.partition;
    let sel = named_selection(&doc, select)?;
    let essential = is_essential(p, &sel)?;
    let (generic, injective) = if essential {
        let generic = is_generic_subsurface(p, &sel)?;
        let injective = is_injective(p, &sel)?;
        (generic.to_string(), injective.to_string())
    } else {
        ("undefined".to_string(), "undefined".to_string())
    };
    let mut r = Report::new();
    r.section("check")
        .kv("selection", select)
        .kv("pieces", piece_set(&sel))
        .kv("essential", essential)
        .kv("generic", generic)
        .kv("injective", injective);
    Ok(r.render(format))
}

fn kernel_cmd(file: &Path, select: &str, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let p = &doc.partition;
    let sel = named_selection(&doc, select)?;
    let kernel = kernel_description(p, &sel)?;
    let mut r = Report::new();
    r.section("kernel")
        .kv("selection", select)
        .kv("rank", kernel.rank)
        .kv("trivial", kernel.is_trivial())
        .kv("boundary_twists", kernel.boundary_twists.len())
        .kv("meridian_twists", kernel.meridian_twists.len())
        .kv("cylinder_pairs", kernel.cylinder_pairs.len());
    if kernel.rank > 0 {
        r.section("generators");
        for (i, symbol) in kernel.generator_symbols(p).iter().enumerate() {
            r.kv(format!("g{i}"), symbol);
        }
    }
    Ok(r.render(format))
}

fn va_cmd(file: &Path, select: &str, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let p = &doc.partition;
    let sel = named_selection(&doc, select)?;
    let witness = non_va_component(p, &sel)?;
    let mut r = Report::new();
    r.section("va")
        .kv("selection", select)
        .kv("virtually_abelian", is_virtually_abelian(p, &sel)?)
        .kv("witness_pieces", opt(&witness.as_ref().map(|(c, _)| piece_set(c))))
        .kv("witness_type", opt(&witness.as_ref().map(|(_, t)| *t)));
    Ok(r.render(format))
}

fn basic_circles_cmd(file: &Path, select: &str, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let sel = named_selection(&doc, select)?;
    let bc = basic_circles(&doc.partition, &sel)?;
    let mut r = Report::new();
    r.section("basic-circles")
        .kv("selection", select)
        .kv("rank", bc.rank)
        .kv("klein_refinements", bc.refinements.len());
    for (i, class) in bc.circles.iter().enumerate() {
        r.kv(format!("circle{i}"), bc.partition.display_circle(&class.representative));
    }
    if !bc.exterior_cylinder_alternatives.is_empty() {
        r.section("exterior-cylinders");
        for (i, (a, b)) in bc.exterior_cylinder_alternatives.iter().enumerate() {
            r.kv(
                format!("pair{i}"),
                format!(
                    "{} | {}",
                    bc.partition.display_circle(a),
                    bc.partition.display_circle(b)
                ),
            );
        }
    }
    Ok(r.render(format))
}

fn klein_mode_label(mode: KleinMatchMode) -> &'static str {
    match mode {
        KleinMatchMode::Neighbourhood => "neighbourhood",
        KleinMatchMode::Complement => "complement",
    }
}

fn commensurable_cmd(file: &Path, select: &[String], format: ReportFormat) -> Result<String, Failure> {
    let [s0, s1] = select else {
        return Err(Failure::Usage("commensurable requires exactly two --select flags".to_string()));
    };
    let doc = load(file)?;
    let p = &doc.partition;
    let sel0 = named_selection(&doc, s0)?;
    let sel1 = named_selection(&doc, s1)?;
    let verdict = commensurable(p, &sel0, &sel1)?;
    let mut r = Report::new();
    r.section("verdict")
        .kv("selection0", s0)
        .kv("selection1", s1)
        .kv("commensurable", verdict.commensurable)
        .kv("obstruction", opt(&verdict.obstruction))
        .kv("witness_pieces", opt(&verdict.witness.as_ref().map(|(c, _)| piece_set(c))))
        .kv("witness_type", opt(&verdict.witness.as_ref().map(|(_, t)| *t)));
    if let Some(cert) = &verdict.certificate {
        r.section("certificate")
            .kv("rank", cert.rank)
            .kv("stripped_pairs", cert.stripped.len())
            .kv("klein_matches", cert.klein_matches.len());
        for (i, m) in cert.klein_matches.iter().enumerate() {
            r.kv(format!("match{i}_klein"), piece_set(&m.klein))
                .kv(format!("match{i}_partner"), piece_set(&m.partner))
                .kv(format!("match{i}_mode"), klein_mode_label(m.mode));
        }
        for (i, c) in cert.circles.iter().enumerate() {
            r.kv(format!("circle{i}"), cert.partition.display_circle(c));
        }
    }
    Ok(r.render(format))
}

fn commensurator_cmd(file: &Path, select: &str, format: ReportFormat) -> Result<String, Failure> {
    let doc = load(file)?;
    let p = &doc.partition;
    let sel = named_selection(&doc, select)?;
    let case = commensurator_case(p, &sel)?;
    let mut r = Report::new();
    r.section("commensurator")
        .kv("selection", select)
        .kv("semidirect_z2", case.semidirect_z2)
        .kv("direct_product", opt(&case.direct_product));
    if !is_virtually_abelian(p, &sel)? {
        let desc = stab_star_descriptor(p, &sel)?;
        r.section("stabilizer").kv("special_components", desc.special_components.len());
        for (i, (comp, t)) in desc.special_components.iter().enumerate() {
            r.kv(format!("special{i}"), format!("{} {t}", piece_set(comp)));
        }
        r.kv("curves", desc.curves.len());
        for (i, class) in desc.curves.iter().enumerate() {
            r.kv(format!("curve{i}"), desc.partition.display_circle(&class.representative));
        }
    }
    Ok(r.render(format))
}

/// Every simplex on the eligible vertex classes with at most `max_dim + 1`
/// vertices, in sorted order.
fn simplices_up_to(
    p: &PartitionedSurface,
    max_dim: usize,
) -> Result<Vec<Simplex>, geosub::Error> {
    let vertices = eligible_vertices(p)?;
    let max_size = max_dim + 1;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << vertices.len().min(63)) {
        if (mask.count_ones() as usize) > max_size {
            continue;
        }
        let members = vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone());
        out.push(Simplex::new(p, members)?);
    }
    out.sort();
    Ok(out)
}

fn complex_cmd(action: &ComplexCommand, format: ReportFormat) -> Result<String, Failure> {
    match action {
        ComplexCommand::Enumerate { file, max_dim } => {
            let doc = load(file)?;
            let (p, _) = refine_kleins(&doc.partition, &mut []);
            let vertices = eligible_vertices(&p)?;
            let simplices = simplices_up_to(&p, *max_dim)?;
            let mut r = Report::new();
            r.section("vertices").kv("count", vertices.len());
            for (i, v) in vertices.iter().enumerate() {
                r.kv(format!("v{i}"), p.display_circle(v));
            }
            r.section("simplices").kv("count", simplices.len());
            for (i, s) in simplices.iter().enumerate() {
                r.kv(format!("s{i}"), s.display(&p))
                    .kv(format!("s{i}_reduced"), is_reduced(&p, s)?.reduced);
            }
            Ok(r.render(format))
        }
        ComplexCommand::Phi { file, max_dim } => {
            let doc = load(file)?;
            let (p, _) = refine_kleins(&doc.partition, &mut []);
            let simplices = simplices_up_to(&p, *max_dim)?;
            let mut r = Report::new();
            r.section("phi").kv("count", simplices.len());
            for (i, s) in simplices.iter().enumerate() {
                let image = phi(&p, s)?;
                r.kv(format!("s{i}"), s.display(&p))
                    .kv(format!("s{i}_image"), image.display(&p))
                    .kv(format!("s{i}_fixed"), image == *s);
            }
            Ok(r.render(format))
        }
        ComplexCommand::Ncs { file, max_dim, include_non_reduced, emit_graph, sequential } => {
            let doc = load(file)?;
            let (p, _) = refine_kleins(&doc.partition, &mut []);
            let mode = if *sequential { ExecMode::Sequential } else { ExecMode::Parallel };
            let report = ncs_check(&p, *max_dim, *include_non_reduced, mode)?;
            if *emit_graph {
                return Ok(report.to_dot(&p));
            }
            let mut r = Report::new();
            r.section("ncs")
                .kv("vertices", report.vertex_count)
                .kv("simplices", report.simplex_count())
                .kv("pairs", report.pair_count)
                .kv("include_non_reduced", include_non_reduced)
                .kv("mode", report.mode.label())
                .kv("violations", report.violation_count());
            for (i, (a, b)) in report.violations.iter().enumerate() {
                r.kv(format!("violation{i}"), format!("{} | {}", a.display(&p), b.display(&p)));
            }
            if format == ReportFormat::Human {
                r.kv("elapsed_ms", report.elapsed.as_millis());
            }
            Ok(r.render(format))
        }
    }
}

fn standard_lattice(n: usize) -> Lattice {
    let rows: Vec<Vec<i64>> =
        (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    Lattice::from_rows(n, &rows)
}

fn oracle_cmd(action: &OracleCommand, seed: u64, format: ReportFormat) -> Result<String, Failure> {
    let mut rng = corpus_rng(seed);
    let mut r = Report::new();
    match action {
        OracleCommand::Snf { count } => {
            let mut failures = 0usize;
            for _ in 0..*count {
                let m = random_matrix(&mut rng, 4, 4, 10);
                let snf = smith_normal_form(&m);
                let u_det = snf.u.determinant();
                let v_det = snf.v.determinant();
                let transforms_ok = snf.u.mul(&m).mul(&snf.v) == snf.d
                    && snf.v.mul(&snf.v_inv).is_identity()
                    && (u_det == 1.into() || u_det == (-1).into())
                    && (v_det == 1.into() || v_det == (-1).into());
                let diag = snf.diagonal();
                let chain_ok = (0..diag.len()).all(|i| {
                    let nonneg = diag[i] >= 0.into();
                    let divides = i + 1 >= diag.len()
                        || diag[i + 1] == 0.into()
                        || (&diag[i + 1] % &diag[i]) == 0.into();
                    nonneg && (diag[i] != 0.into() || diag[i + 1..].iter().all(|d| *d == 0.into()))
                        && divides
                });
                if !(transforms_ok && chain_ok) {
                    failures += 1;
                }
            }
            r.section("oracle-snf")
                .kv("seed", seed)
                .kv("count", count)
                .kv("failures", failures);
        }
        OracleCommand::Index { count } => {
            let mut failures = 0usize;
            for _ in 0..*count {
                let h = random_full_rank_instance(&mut rng, 3, 3);
                let det = h.generators().determinant();
                let det = if det < 0.into() { -det } else { det };
                let snf_route = subgroup_index(&h);
                let coset_route = coset_count(&h, 2000);
                let agree = snf_route == Index::Finite(det.clone())
                    && coset_route.map(|c| c.to_string()) == Some(det.to_string());
                if !agree {
                    failures += 1;
                }
            }
            r.section("oracle-index")
                .kv("seed", seed)
                .kv("count", count)
                .kv("failures", failures);
        }
        OracleCommand::Comm { count } => {
            let mut image_failures = 0usize;
            let mut intersection_failures = 0usize;
            let mut product_failures = 0usize;
            let mut sum_failures = 0usize;
            for _ in 0..*count {
                let g = random_lattice(&mut rng, 4, 10);
                let h = random_finite_index_sublattice(&mut rng, &g);

                let map = random_map(&mut rng, g.ambient_rank(), 3);
                let image_ok = relative_index(&g.image(&map), &h.image(&map))
                    .map(|i| i.is_finite())
                    .unwrap_or(false);
                if !image_ok {
                    image_failures += 1;
                }

                let k = random_sublattice(&mut rng, &g);
                let cap_ok = relative_index(&k, &h.intersection(&k))
                    .map(|i| i.is_finite())
                    .unwrap_or(false);
                if !cap_ok {
                    intersection_failures += 1;
                }

                let g1 = random_lattice(&mut rng, 4, 10);
                let h1 = random_finite_index_sublattice(&mut rng, &g1);
                if !verify_index_product(&g, &h, &g1, &h1).unwrap_or(false) {
                    product_failures += 1;
                }

                let h0b = random_finite_index_sublattice(&mut rng, &g);
                let kb = random_sublattice(&mut rng, &standard_lattice(g.ambient_rank()));
                let sum_ok = !lattice_commensurable(&h, &h0b)
                    || lattice_commensurable(&h.sum(&kb), &h0b.sum(&kb));
                if !sum_ok {
                    sum_failures += 1;
                }
            }

            // The rank-two example where the sum construction is not
            // reversible: both sums fill the ambient lattice while the
            // summands intersect trivially.
            let h0 = Lattice::from_rows(2, &[vec![1, 0]]);
            let h1 = Lattice::from_rows(2, &[vec![1, 1]]);
            let k = Lattice::from_rows(2, &[vec![0, 1]]);
            let one = Index::Finite(1.into());
            let opposite_ok = subgroup_index(&h0.sum(&k)) == one
                && subgroup_index(&h1.sum(&k)) == one
                && h0.intersection(&h1).rank() == 0
                && !lattice_commensurable(&h0, &h1)
                && lattice_commensurable(&h0.sum(&k), &h1.sum(&k));

            r.section("oracle-comm")
                .kv("seed", seed)
                .kv("count", count)
                .kv("image_failures", image_failures)
                .kv("intersection_failures", intersection_failures)
                .kv("product_failures", product_failures)
                .kv("sum_failures", sum_failures)
                .kv("opposite_example", if opposite_ok { "reproduced" } else { "failed" });
        }
    }
    Ok(r.render(format))
}
