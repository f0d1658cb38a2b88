use std::path::Path;

use deloc_core::io::{self, MatrixKind};
use deloc_core::pipeline::{self, Solution};
use deloc_core::{build_ring, ci, measure, IntegralSet, MOCoefficients, MeasureOptions, ReportDocument, RingModelSpec};
use nalgebra::DMatrix;

use crate::args::{ElectronArgs, MeasureArgs, ModelArgs, PipelineArgs, SolveArgs};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output;

fn with_path<T>(path: &Path, r: deloc_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

struct Hamiltonian {
    integrals: IntegralSet,
    n_alpha: usize,
    n_beta: usize,
}

fn read_fcidump(path: &Path, electrons: &ElectronArgs) -> CliResult<Hamiltonian> {
    let text = output::read(path)?;
    let dump = with_path(path, io::parse_fcidump(&text))?;
    for w in &dump.warnings {
        log::warn!("{}: {w}", path.display());
    }
    let (n_alpha, n_beta) = match (electrons.n_alpha, electrons.n_beta) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            let (ha, hb) = with_path(path, dump.header.electron_counts())?;
            (a.unwrap_or(ha), b.unwrap_or(hb))
        }
    };
    Ok(Hamiltonian {
        integrals: dump.integrals,
        n_alpha,
        n_beta,
    })
}

fn read_matrix(path: &Path, kind: MatrixKind) -> CliResult<DMatrix<f64>> {
    let text = output::read(path)?;
    Ok(with_path(path, io::parse_matrix_json(&text, kind))?.matrix)
}

fn read_mo(path: &Path, overlap: &DMatrix<f64>, opts: &MeasureOptions) -> CliResult<MOCoefficients> {
    let c = read_matrix(path, MatrixKind::MoCoefficients)?;
    with_path(path, MOCoefficients::new(c, overlap, opts.tolerances.orthonormality))
}

fn solve_hamiltonian(h: &Hamiltonian, cfg: &Config, electrons: &ElectronArgs) -> CliResult<Solution> {
    let cap = cfg.max_determinants(electrons.max_determinants);
    Ok(pipeline::solve(&h.integrals, h.n_alpha, h.n_beta, cap)?)
}

fn report_for_solution(
    sol: &Solution,
    mo: &MOCoefficients,
    overlap: &DMatrix<f64>,
    opts: &MeasureOptions,
) -> CliResult<ReportDocument> {
    let m = measure(&sol.civector, mo, overlap, opts)?;
    Ok(ReportDocument::from_measurement(
        &m,
        Some(sol.ground.energy),
        Some(sol.spin_squared),
        Some(sol.ground.is_degenerate()),
    ))
}

pub fn solve(args: &SolveArgs, cfg: &Config) -> CliResult<()> {
    let h = read_fcidump(&args.fcidump, &args.electrons)?;
    let sol = solve_hamiltonian(&h, cfg, &args.electrons)?;
    log::info!(
        "E0 = {:.12} over {} determinants, <S^2> = {:.6}",
        sol.ground.energy,
        sol.civector.len(),
        sol.spin_squared
    );
    output::write_atomic(
        &args.out,
        io::write_civector_json(&sol.civector, Some(sol.ground.energy)),
    )
}

pub fn measure_cmd(args: &MeasureArgs, cfg: &Config) -> CliResult<()> {
    let opts = cfg.measure_options(&args.flags);
    let overlap = read_matrix(&args.overlap, MatrixKind::Overlap)?;
    let mo = read_mo(&args.mo, &overlap, &opts)?;
    let doc = match (&args.civector, &args.fcidump) {
        (Some(path), _) => {
            let file = with_path(
                path,
                io::parse_civector_json(&output::read(path)?, opts.tolerances.mo_norm),
            )?;
            let m = measure(&file.civector, &mo, &overlap, &opts)?;
            let s2 = ci::spin_squared(&file.civector)?;
            ReportDocument::from_measurement(&m, file.energy, Some(s2), None)
        }
        (None, Some(path)) => {
            let h = read_fcidump(path, &args.electrons)?;
            let sol = solve_hamiltonian(&h, cfg, &args.electrons)?;
            report_for_solution(&sol, &mo, &overlap, &opts)?
        }
        (None, None) => return Err(CliError::Usage("one of --civector or --fcidump is required".into())),
    };
    output::write_atomic(&args.out, io::write_report(&doc))
}

fn read_spec(path: &Path) -> CliResult<RingModelSpec> {
    let text = output::read(path)?;
    toml::from_str(&text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        source: deloc_core::Error::Validation(e.to_string()),
    })
}

pub fn model(args: &ModelArgs) -> CliResult<()> {
    let spec = read_spec(&args.spec)?;
    let ring = with_path(&args.spec, build_ring(&spec))?;
    std::fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    let nelec = ring.n_alpha + ring.n_beta;
    let ms2 = ring.n_alpha as i64 - ring.n_beta as i64;
    let labels: Vec<String> = (0..spec.n_sites).map(|i| format!("site{i}")).collect();
    output::write_all_atomic(&[
        (
            args.out.join("overlap.json"),
            io::write_matrix_json(&ring.ao_overlap, Some(&labels)),
        ),
        (
            args.out.join("mo.json"),
            io::write_matrix_json(ring.mo.matrix(), Some(&labels)),
        ),
        (
            args.out.join("FCIDUMP"),
            io::write_fcidump(&ring.mo_integrals, nelec, ms2),
        ),
    ])
}

pub fn pipeline_cmd(args: &PipelineArgs, cfg: &Config) -> CliResult<()> {
    let opts = cfg.measure_options(&args.flags);
    let (h, mo, overlap) = match (&args.spec, &args.fcidump, &args.overlap, &args.mo) {
        (Some(path), ..) => {
            let spec = read_spec(path)?;
            let ring = with_path(path, build_ring(&spec))?;
            let h = Hamiltonian {
                integrals: ring.mo_integrals,
                n_alpha: args.electrons.n_alpha.unwrap_or(ring.n_alpha),
                n_beta: args.electrons.n_beta.unwrap_or(ring.n_beta),
            };
            (h, ring.mo, ring.ao_overlap)
        }
        (None, Some(f), Some(s), Some(c)) => {
            let overlap = read_matrix(s, MatrixKind::Overlap)?;
            let mo = read_mo(c, &overlap, &opts)?;
            (read_fcidump(f, &args.electrons)?, mo, overlap)
        }
        _ => {
            return Err(CliError::Usage(
                "pipeline needs --spec, or --fcidump with --overlap and --mo".into(),
            ))
        }
    };
    let sol = solve_hamiltonian(&h, cfg, &args.electrons)?;
    let doc = report_for_solution(&sol, &mo, &overlap, &opts)?;
    output::write_atomic(&args.out, io::write_report(&doc))
}
