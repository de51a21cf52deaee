use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use shapeinv::factorization::partner_potential;
use shapeinv::superalgebra::{sector_oracle_matrix, verify_with, PairKind, VerifyOptions, RATIO_WINDOW};
use shapeinv::{
    bps_states, build_model, build_model_with_etas, build_tridiagonal, compare_spectra, degeneracy_table,
    eigenvector, exact_energies, excited_state, ground_state, lowest_eigenvalues, orbit, Catalog, Error,
    Grid, IdentityClass, MultiSectorModel, Ordering, ParamValue, Provenance, Spectrum, SuperpotentialFamily,
    TridiagonalMatrix,
};

use crate::config::{Format, GridSpec, RunConfig};
use crate::output::{cell, emit, opt_cell, round12, round_all, to_csv, to_json, write_file};
use crate::{CliError, Command, Outcome};

const ORACLE_BISECTION_TOL: f64 = 1e-9;
/// Largest half-width the default box is widened to.
const MAX_HALF_WIDTH: f64 = 64.0;
const WIDEN_STEP: f64 = 4.0;

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Catalog => catalog(cfg, &Catalog::builtin()),
        Command::Spectrum => spectrum(cfg),
        Command::States => states(cfg),
        Command::Verify => verify(cfg),
        Command::Figure => figure(cfg),
    }
}

#[derive(Debug, Clone, Serialize)]
struct CatalogMeta {
    command: &'static str,
    version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub name: String,
    pub param_arity: usize,
    /// `None` for an unbounded side.
    pub domain_min: Option<f64>,
    pub domain_max: Option<f64>,
    pub parameter_map: String,
}

#[derive(Debug, Clone, Serialize)]
struct RunMeta {
    command: &'static str,
    version: &'static str,
    family: String,
    g: Vec<f64>,
    grid: GridSpec,
    levels: usize,
    partnerships: usize,
    eta1: f64,
    physics_tol: f64,
    structural_tol: f64,
    seed: u64,
    broken_alignment: Option<f64>,
}

impl RunMeta {
    fn new(command: Command, cfg: &RunConfig, grid: &Grid) -> Self {
        Self {
            command: command.name(),
            version: env!("CARGO_PKG_VERSION"),
            family: cfg.family.clone(),
            g: round_all(cfg.g.values()),
            grid: GridSpec {
                x_min: round12(grid.x_min()),
                x_max: round12(grid.x_max()),
                n_points: grid.len(),
            },
            levels: cfg.levels,
            partnerships: cfg.partnerships,
            eta1: round12(cfg.eta1),
            physics_tol: cfg.physics_tol,
            structural_tol: cfg.structural_tol,
            seed: cfg.seed,
            broken_alignment: cfg.broken_alignment.map(round12),
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then(|| round12(x))
}

pub fn catalog_entries(catalog: &Catalog) -> Vec<FamilyEntry> {
    catalog
        .iter()
        .map(|family| {
            let domain = family.domain();
            FamilyEntry {
                name: family.name().to_string(),
                param_arity: family.param_arity(),
                domain_min: finite(domain.min),
                domain_max: finite(domain.max),
                parameter_map: family.parameter_map_description(),
            }
        })
        .collect()
}

pub fn catalog(cfg: &RunConfig, catalog: &Catalog) -> Result<Outcome, CliError> {
    let entries = catalog_entries(catalog);
    let text = match cfg.format {
        Format::Json => to_json(
            &CatalogMeta {
                command: "catalog",
                version: env!("CARGO_PKG_VERSION"),
            },
            &entries,
        )?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        e.param_arity.to_string(),
                        opt_cell(e.domain_min),
                        opt_cell(e.domain_max),
                        e.parameter_map.clone(),
                    ]
                })
                .collect();
            to_csv(&["name", "param_arity", "domain_min", "domain_max", "parameter_map"], &rows)?
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(Outcome::Success)
}

fn family_for(cfg: &RunConfig) -> Result<Arc<dyn SuperpotentialFamily>, CliError> {
    let family = Catalog::builtin().lookup(&cfg.family)?;
    family.check_arity(&cfg.g)?;
    Ok(family)
}

/// The configured grid, or, when none was given, the default box widened at
/// fixed spacing until every ground state at `params` passes the wall check.
pub fn working_grid(
    cfg: &RunConfig,
    family: &dyn SuperpotentialFamily,
    params: &[ParamValue],
) -> Result<Grid, CliError> {
    let base = cfg.grid;
    if cfg.grid_explicit {
        return Ok(base);
    }
    let h = base.spacing();
    let center = 0.5 * (base.x_min() + base.x_max());
    let mut half = 0.5 * base.length();
    loop {
        let n = (2.0 * half / h).round() as usize + 1;
        let grid = Grid::new(center - half, center + half, n)?;
        match params.iter().try_for_each(|g| ground_state(family, g, &grid).map(drop)) {
            Ok(()) => {
                if grid != base {
                    eprintln!(
                        "note: default box widened to [{}, {}] with {} points so every ground state decays at the walls",
                        grid.x_min(),
                        grid.x_max(),
                        grid.len()
                    );
                }
                return Ok(grid);
            }
            Err(Error::NonNormalizable { .. }) if half + WIDEN_STEP <= MAX_HALF_WIDTH => half += WIDEN_STEP,
            Err(err) => return Err(err.into()),
        }
    }
}

fn oracle_matrix(family: &dyn SuperpotentialFamily, g: &ParamValue, grid: &Grid) -> TridiagonalMatrix {
    build_tridiagonal(|x| partner_potential(family, g, Ordering::AdaggerA, x), grid)
}

fn encode_table<D: Serialize>(
    cfg: &RunConfig,
    meta: &RunMeta,
    data: &D,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => to_json(meta, data),
        Format::Csv => to_csv(header, rows),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub e_exact: f64,
    pub e_oracle: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SpectrumData {
    requested: usize,
    truncated: bool,
    tolerance: f64,
    max_difference: f64,
    pass: bool,
    levels: Vec<SpectrumRow>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = family_for(cfg)?;
    let exact = exact_energies(family.as_ref(), &cfg.g, cfg.levels)?;
    if exact.is_empty() {
        return Err(CliError::Config(format!(
            "{} has no bound states at g = {}",
            cfg.family, cfg.g
        )));
    }
    if exact.truncated {
        eprintln!(
            "note: {} at g = {} has {} bound levels; {} requested, output truncated",
            cfg.family,
            cfg.g,
            exact.len(),
            cfg.levels
        );
    }
    let grid = cfg.grid;
    let t = oracle_matrix(family.as_ref(), &cfg.g, &grid);
    let oracle = lowest_eigenvalues(&t, exact.len(), ORACLE_BISECTION_TOL)?;
    let report = compare_spectra(&exact, &Spectrum::from_energies(&oracle.energies(), Provenance::Oracle), cfg.physics_tol);
    let rows: Vec<SpectrumRow> = exact
        .entries
        .iter()
        .zip(&oracle.entries)
        .zip(&report.differences)
        .map(|((e, o), d)| SpectrumRow {
            n: e.n,
            e_exact: round12(e.energy),
            e_oracle: round12(o.energy),
            abs_diff: round12(*d),
        })
        .collect();
    let data = SpectrumData {
        requested: cfg.levels,
        truncated: exact.truncated,
        tolerance: cfg.physics_tol,
        max_difference: round12(report.max_difference),
        pass: report.pass,
        levels: rows,
    };
    let csv_rows: Vec<Vec<String>> = data
        .levels
        .iter()
        .map(|r| vec![r.n.to_string(), cell(r.e_exact), cell(r.e_oracle), cell(r.abs_diff)])
        .collect();
    let meta = RunMeta::new(Command::Spectrum, cfg, &grid);
    let text = encode_table(cfg, &meta, &data, &["n", "e_exact", "e_oracle", "abs_diff"], &csv_rows)?;
    emit(cfg.out.as_deref(), &text)?;
    if !report.pass {
        eprintln!(
            "spectrum: max |E_exact - E_oracle| = {:e} exceeds tolerance {:e}",
            report.max_difference, cfg.physics_tol
        );
    }
    Ok(Outcome::from_pass(report.pass))
}

#[derive(Debug, Clone, Serialize)]
pub struct StateSummary {
    pub level: usize,
    pub energy: f64,
    pub nodes: usize,
    pub oracle_energy: f64,
    pub oracle_overlap: f64,
    pub file: String,
}

#[derive(Debug, Clone, Serialize)]
struct StateProfile {
    level: usize,
    energy: f64,
    x: Vec<f64>,
    psi: Vec<f64>,
}

pub fn states(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = family_for(cfg)?;
    let bound = family.bound_state_count(&cfg.g);
    if !bound.allows(cfg.levels) {
        return Err(Error::LevelOutOfRange {
            level: cfg.levels,
            available: bound.cap(cfg.levels),
        }
        .into());
    }
    let orbit = orbit(family.as_ref(), &cfg.g, cfg.levels)?;
    let grid = working_grid(cfg, family.as_ref(), orbit.points())?;
    let exact = exact_energies(family.as_ref(), &cfg.g, cfg.levels)?;
    let t = oracle_matrix(family.as_ref(), &cfg.g, &grid);
    let oracle = lowest_eigenvalues(&t, cfg.levels, ORACLE_BISECTION_TOL)?;
    let dir: PathBuf = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let meta = RunMeta::new(Command::States, cfg, &grid);
    let x = round_all(&grid.nodes());
    let mut summary = Vec::with_capacity(cfg.levels);
    for level in 1..=cfg.levels {
        let psi = excited_state(family.as_ref(), &cfg.g, level, &grid)?;
        let oracle_energy = oracle.entries[level - 1].energy;
        let reference = eigenvector(&t, oracle_energy)?.wavefunction(&grid);
        let energy = round12(exact.entries[level - 1].energy);
        let file = format!("state_{level}.{}", cfg.format.extension());
        let profile = StateProfile {
            level,
            energy,
            x: x.clone(),
            psi: round_all(psi.values()),
        };
        let rows: Vec<Vec<String>> = profile
            .x
            .iter()
            .zip(&profile.psi)
            .map(|(x, p)| vec![x.to_string(), p.to_string()])
            .collect();
        let text = encode_table(cfg, &meta, &profile, &["x", "psi"], &rows)?;
        write_file(&dir.join(&file), &text)?;
        summary.push(StateSummary {
            level,
            energy,
            nodes: psi.node_count(),
            oracle_energy: round12(oracle_energy),
            oracle_overlap: round12(psi.overlap(&reference)),
            file,
        });
    }
    let rows: Vec<Vec<String>> = summary
        .iter()
        .map(|s| {
            vec![
                s.level.to_string(),
                cell(s.energy),
                s.nodes.to_string(),
                cell(s.oracle_energy),
                cell(s.oracle_overlap),
                s.file.clone(),
            ]
        })
        .collect();
    let text = encode_table(
        cfg,
        &meta,
        &summary,
        &["level", "energy", "nodes", "oracle_energy", "oracle_overlap", "file"],
        &rows,
    )?;
    write_file(&dir.join(format!("summary.{}", cfg.format.extension())), &text)?;
    emit(None, &text)?;
    Ok(Outcome::Success)
}

fn model_grid(cfg: &RunConfig, family: &Arc<dyn SuperpotentialFamily>) -> Result<Grid, CliError> {
    let orbit = orbit(family.as_ref(), &cfg.g, 2 * cfg.partnerships - 1)?;
    working_grid(cfg, family.as_ref(), orbit.points())
}

/// The shape-invariant model, or with `broken` the same model with
/// `offset` added to every η beyond the first.
pub fn model_for(cfg: &RunConfig, grid: &Grid, broken: Option<f64>) -> Result<MultiSectorModel, CliError> {
    let family = family_for(cfg)?;
    let model = build_model(family.clone(), &cfg.g, cfg.partnerships, grid, cfg.eta1)?;
    Ok(match broken {
        None => model,
        Some(offset) => {
            let etas: Vec<f64> = model
                .etas()
                .iter()
                .enumerate()
                .map(|(j, &eta)| if j == 0 { eta } else { eta + offset })
                .collect();
            build_model_with_etas(family, &cfg.g, grid, &etas)?
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub classification: IdentityClass,
    pub residual: f64,
    pub refined_residual: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BpsRow {
    pub sector: usize,
    pub energy: f64,
    pub oracle_energy: f64,
    /// Oracle eigenvalues within the physics tolerance of `energy`.
    pub matches: usize,
    pub overlap: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorRow {
    pub sector: usize,
    pub partnership: usize,
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentRow {
    pub lower_sector: usize,
    pub upper_sector: usize,
    pub kind: PairKind,
    pub compared: usize,
    pub max_difference: f64,
    pub aligned: bool,
}

#[derive(Debug, Clone, Serialize)]
struct Degeneracy {
    tolerance: f64,
    sectors: Vec<SectorRow>,
    alignment: Vec<AlignmentRow>,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyData {
    all_pass: bool,
    structural_tol: f64,
    ratio_window: (f64, f64),
    etas: Vec<f64>,
    central_charges: Vec<f64>,
    b: Vec<f64>,
    checks: Vec<CheckRow>,
    bps_states: Vec<BpsRow>,
    degeneracy: Degeneracy,
}

fn degeneracy(model: &MultiSectorModel, cfg: &RunConfig) -> Result<Degeneracy, CliError> {
    let table = degeneracy_table(model, cfg.levels, cfg.physics_tol)?;
    Ok(Degeneracy {
        tolerance: table.tolerance,
        sectors: table
            .sectors
            .iter()
            .map(|s| SectorRow {
                sector: s.sector,
                partnership: s.partnership,
                levels: round_all(&s.levels),
            })
            .collect(),
        alignment: table
            .alignment
            .iter()
            .map(|a| AlignmentRow {
                lower_sector: a.lower_sector,
                upper_sector: a.upper_sector,
                kind: a.kind,
                compared: a.compared,
                max_difference: round12(a.max_difference),
                aligned: a.aligned,
            })
            .collect(),
    })
}

fn bps_rows(model: &MultiSectorModel, tol: f64) -> Result<Vec<BpsRow>, CliError> {
    let levels_checked = 4;
    bps_states(model)?
        .into_iter()
        .map(|bps| {
            let t = sector_oracle_matrix(model, bps.sector);
            let k = levels_checked.min(t.len());
            let levels = lowest_eigenvalues(&t, k, ORACLE_BISECTION_TOL)?.energies();
            let nearest = levels
                .iter()
                .copied()
                .min_by(|a, b| (a - bps.energy).abs().total_cmp(&(b - bps.energy).abs()))
                .expect("at least one oracle level");
            let matches = levels.iter().filter(|e| (*e - bps.energy).abs() <= tol).count();
            let reference = eigenvector(&t, nearest)?.wavefunction(model.grid());
            let overlap = bps.state.overlap(&reference).abs();
            Ok(BpsRow {
                sector: bps.sector,
                energy: round12(bps.energy),
                oracle_energy: round12(nearest),
                matches,
                overlap: round12(overlap),
                saturated: matches == 1 && overlap >= 0.999,
            })
        })
        .collect()
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = family_for(cfg)?;
    let grid = model_grid(cfg, &family)?;
    let model = model_for(cfg, &grid, None)?;
    let report = verify_with(
        &model,
        &VerifyOptions {
            n_test_vectors: 10,
            seed: cfg.seed,
            structural_tol: cfg.structural_tol,
            ratio_window: RATIO_WINDOW,
        },
    );
    let checks: Vec<CheckRow> = report
        .checks
        .iter()
        .map(|c| CheckRow {
            name: c.name.clone(),
            classification: c.classification,
            residual: round12(c.residual),
            refined_residual: c.refined_residual.map(round12),
            ratio: c.ratio.map(round12),
            pass: c.pass,
        })
        .collect();
    let bps = bps_rows(&model, cfg.physics_tol)?;
    let degeneracy = degeneracy(&model, cfg)?;
    let all_pass = report.all_pass() && bps.iter().all(|b| b.saturated) && degeneracy.alignment.iter().all(|a| a.aligned);
    let data = VerifyData {
        all_pass,
        structural_tol: cfg.structural_tol,
        ratio_window: RATIO_WINDOW,
        etas: round_all(model.etas()),
        central_charges: round_all(model.central_charges()),
        b: round_all(model.b()),
        checks,
        bps_states: bps,
        degeneracy,
    };
    let rows: Vec<Vec<String>> = data
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                match c.classification {
                    IdentityClass::StructuralExact => "structural-exact".into(),
                    IdentityClass::DiscretizationLimited => "discretization-limited".into(),
                },
                cell(c.residual),
                opt_cell(c.refined_residual),
                opt_cell(c.ratio),
                c.pass.to_string(),
            ]
        })
        .collect();
    let meta = RunMeta::new(Command::Verify, cfg, &grid);
    let text = encode_table(
        cfg,
        &meta,
        &data,
        &["name", "classification", "residual", "refined_residual", "ratio", "pass"],
        &rows,
    )?;
    emit(cfg.out.as_deref(), &text)?;
    for check in report.failures() {
        eprintln!("verify: {} failed (residual {:e}, ratio {:?})", check.name, check.residual, check.ratio);
    }
    for row in data.bps_states.iter().filter(|b| !b.saturated) {
        eprintln!("verify: sector {} BPS state not saturated", row.sector);
    }
    for flag in data.degeneracy.alignment.iter().filter(|a| !a.aligned) {
        eprintln!("verify: sectors {} and {} not aligned", flag.lower_sector, flag.upper_sector);
    }
    Ok(Outcome::from_pass(all_pass))
}

#[derive(Debug, Clone, Serialize)]
struct FigureData {
    broken_alignment: Option<f64>,
    etas: Vec<f64>,
    b: Vec<f64>,
    tolerance: f64,
    sectors: Vec<SectorRow>,
    alignment: Vec<AlignmentRow>,
}

fn alignment_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_alignment.csv"))
}

pub fn figure(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let grid = cfg.grid;
    let model = model_for(cfg, &grid, cfg.broken_alignment)?;
    let table = degeneracy(&model, cfg)?;
    let data = FigureData {
        broken_alignment: cfg.broken_alignment.map(round12),
        etas: round_all(model.etas()),
        b: round_all(model.b()),
        tolerance: table.tolerance,
        sectors: table.sectors,
        alignment: table.alignment,
    };
    let meta = RunMeta::new(Command::Figure, cfg, &grid);
    match cfg.format {
        Format::Json => emit(cfg.out.as_deref(), &to_json(&meta, &data)?)?,
        Format::Csv => {
            let sector_names: Vec<String> = data.sectors.iter().map(|s| format!("sector_{}", s.sector)).collect();
            let mut header = vec!["level"];
            header.extend(sector_names.iter().map(String::as_str));
            let depth = data.sectors.iter().map(|s| s.levels.len()).max().unwrap_or(0);
            let rows: Vec<Vec<String>> = (0..depth)
                .map(|n| {
                    let mut row = vec![(n + 1).to_string()];
                    row.extend(data.sectors.iter().map(|s| s.levels.get(n).map(|e| cell(*e)).unwrap_or_default()));
                    row
                })
                .collect();
            let levels = to_csv(&header, &rows)?;
            let flags: Vec<Vec<String>> = data
                .alignment
                .iter()
                .map(|a| {
                    vec![
                        a.lower_sector.to_string(),
                        a.upper_sector.to_string(),
                        match a.kind {
                            PairKind::WithinPartnership => "within-partnership".into(),
                            PairKind::CrossPartnership => "cross-partnership".into(),
                        },
                        a.compared.to_string(),
                        cell(a.max_difference),
                        a.aligned.to_string(),
                    ]
                })
                .collect();
            let alignment = to_csv(
                &["lower_sector", "upper_sector", "kind", "compared", "max_difference", "aligned"],
                &flags,
            )?;
            match cfg.out.as_deref() {
                Some(path) => {
                    write_file(path, &levels)?;
                    write_file(&alignment_path(path), &alignment)?;
                }
                None => emit(None, &format!("{levels}\n{alignment}"))?,
            }
        }
    }
    Ok(Outcome::Success)
}
