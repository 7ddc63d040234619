use std::io::Write;
use std::path::{Path, PathBuf};

use noisy_grover::analysis::{trajectory_report, TrajectoryReport};
use noisy_grover::noise::{
    chi_star, closed_form_choi_gap, closed_form_kraus, compare_nearest_unitaries, hamiltonian_kraus,
    nearest_unitary_pair_with, scalar_profile,
};
use noisy_grover::{ComplexMatrix, KrausChannel, NoiseStrength, PsiBranch, SearchInstance};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{ChiStarArgs, Command, KrausArgs, SearchArgs, SweepArgs};
use crate::config::Config;
use crate::discrepancy::{prop3_exponent, prop3_normalization, DiscrepancyRecord};
use crate::output::{self, Format, Row};
use crate::{verify, CliError, Exit, OUT_DIR_ENV};

const COMPLETENESS_TOL: f64 = 1e-10;
const PSI_ZERO_TOL: f64 = 1e-10;
const ENTROPY_TOL: f64 = 1e-12;

pub fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    match command {
        Command::Kraus(a) => kraus(a, stdout),
        Command::ChiStar(a) => chi_star_table(a, stdout),
        Command::Search(a) => search(a, stdout, stderr),
        Command::Sweep(a) => sweep(a, stdout, stderr),
        Command::Verify(a) => verify::command(a, stdout, stderr),
    }
}

pub(crate) fn strength(chi: f64) -> Result<NoiseStrength, CliError> {
    NoiseStrength::new(chi).map_err(|e| CliError::Usage(format!("--chi {chi}: {e}")))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn stream(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// `--out` if given, else `$NOISY_GROVER_OUT_DIR/<default_name>`, else `None` (stdout).
fn destination(out: Option<PathBuf>, default_name: &str) -> Result<Option<PathBuf>, CliError> {
    if out.is_some() {
        return Ok(out);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir).map_err(io(&dir))?;
            Ok(Some(dir.join(default_name)))
        }
        _ => Ok(None),
    }
}

pub(crate) fn emit(dest: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(io(path)),
        None => stdout.write_all(text.as_bytes()).map_err(stream),
    }
}

// ---------------------------------------------------------------- kraus

fn matrix_lines(m: &ComplexMatrix) -> Vec<String> {
    (0..m.dim())
        .map(|i| {
            let cells: Vec<String> = (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    format!("{:+.12e}{:+.12e}i", z.re, z.im)
                })
                .collect();
            format!("    [{}]", cells.join(", "))
        })
        .collect()
}

fn print_channel(out: &mut dyn Write, label: &str, ch: &KrausChannel) -> std::io::Result<()> {
    for (i, (k, w)) in ch.operators().iter().zip(ch.weights()).enumerate() {
        if *w == 1.0 {
            writeln!(out, "  {label}{i}:")?;
        } else {
            writeln!(out, "  {label}{i} (weight {w}):")?;
        }
        for line in matrix_lines(k) {
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}

fn kraus(args: KrausArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let chi = strength(args.chi)?;
    let closed = closed_form_kraus(chi);
    let hamiltonian = hamiltonian_kraus(chi);
    let res_closed = closed.completeness_residual();
    let res_ham = hamiltonian.completeness_residual();

    let mut report = || -> std::io::Result<()> {
        writeln!(out, "chi = {}", chi.value())?;
        match scalar_profile(chi) {
            Ok(p) => writeln!(
                out,
                "mu = {:.16e}\ndelta = {:.16e}\npsi = {:.16e}",
                p.mu, p.delta, p.psi
            )?,
            Err(e) => writeln!(out, "scalar profile: {e}")?,
        }
        writeln!(out, "\nclosed-form Kraus pair:")?;
        print_channel(out, "R", &closed)?;
        writeln!(out, "Hamiltonian-derived Kraus pair (exp(iH), environment in |0>):")?;
        print_channel(out, "R", &hamiltonian)?;
        writeln!(out, "\ncompleteness residual (closed form)  = {res_closed:.6e}")?;
        writeln!(out, "completeness residual (Hamiltonian)  = {res_ham:.6e}")?;
        writeln!(
            out,
            "Choi distance closed form vs Hamiltonian = {:.6e}",
            closed_form_choi_gap(chi)
        )?;
        writeln!(
            out,
            "|R1| (closed form) = {:.6e}",
            closed.operators()[1].frobenius_norm()
        )?;

        match nearest_unitary_pair_with(chi, PsiBranch::Principal) {
            Ok(pair) => {
                writeln!(out, "\nnearest-unitary pair (weights 1/2):")?;
                print_channel(out, "V", &pair)?;
            }
            Err(e) => writeln!(out, "\nnearest-unitary pair: {e}")?,
        }
        for branch in [PsiBranch::Principal, PsiBranch::Negated] {
            if let Ok(cmp) = compare_nearest_unitaries(chi, branch) {
                let show = |d: Option<f64>| d.map_or_else(|| "singular".to_string(), |d| format!("{d:.6e}"));
                writeln!(
                    out,
                    "polar factor vs V ({branch:?} psi): phase-aligned [{}, {}]",
                    show(cmp.phase_aligned[0]),
                    show(cmp.phase_aligned[1])
                )?;
            }
        }
        Ok(())
    };
    report().map_err(stream)?;

    if res_closed > COMPLETENESS_TOL || res_ham > COMPLETENESS_TOL {
        return Err(CliError::Invariant(format!(
            "completeness residual above {COMPLETENESS_TOL:e}: closed {res_closed:e}, Hamiltonian {res_ham:e}"
        )));
    }
    Ok(Exit::Success)
}

// ------------------------------------------------------------- chi-star

fn chi_star_table(args: ChiStarArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    if args.n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let shift = args.perturb.unwrap_or(0.0);
    let mut worst = 0.0_f64;
    writeln!(out, "n,chi_n,psi,abs_cos_2psi").map_err(stream)?;
    for n in 1..=args.n_max {
        let chi = chi_star(n).expect("n >= 1").value() + shift;
        let profile = scalar_profile(strength(chi)?)?;
        worst = worst.max(profile.psi);
        writeln!(
            out,
            "{n},{},{},{}",
            output::float(chi),
            output::float(profile.psi),
            output::float((2.0 * profile.psi).cos().abs())
        )
        .map_err(stream)?;
    }
    if worst > PSI_ZERO_TOL {
        return Err(CliError::Invariant(format!(
            "psi(chi_n) = {worst:e} exceeds {PSI_ZERO_TOL:e}"
        )));
    }
    Ok(Exit::Success)
}

// --------------------------------------------------------------- search

/// Default iteration budget: `ceil(4 sqrt N)`, comfortably past the first peak.
fn default_m(n: usize) -> usize {
    (4.0 * (n as f64).sqrt()).ceil() as usize
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    path.map_or_else(|| Ok(Config::default()), Config::load)
}

fn instance(chi: f64, n: usize, w: usize, flip_psi: bool) -> Result<SearchInstance, CliError> {
    let inst = SearchInstance::new(n, w, strength(chi)?).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(if flip_psi {
        inst.with_branch(PsiBranch::Negated)
    } else {
        inst
    })
}

/// Hard invariants along one trajectory; empty when all hold.
pub fn violations(report: &TrajectoryReport) -> Vec<String> {
    let mut found = Vec::new();
    if !report.states_valid() {
        found.push(format!(
            "state invalid: trace error {:e}, min eigenvalue {:e}",
            report.max_trace_error, report.min_eigenvalue
        ));
    }
    if !report.entropy_non_decreasing(ENTROPY_TOL) {
        found.push("entropy decreased".to_string());
    }
    if let Some(k) = report.majorization_ok().iter().position(|ok| !ok) {
        found.push(format!("majorization fails at m = {k}"));
    }
    found
}

fn discrepancies(report: &TrajectoryReport) -> Vec<DiscrepancyRecord> {
    let mut records = vec![prop3_normalization(report)];
    records.extend(prop3_exponent(report));
    records
}

fn render(report: &TrajectoryReport, format: Format) -> String {
    match format {
        Format::Csv => output::csv(&output::rows(report)),
        Format::Json => output::json(output::rows(report), discrepancies(report)),
    }
}

fn search(args: SearchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let chi = cfg.pick(args.chi, "chi")?.unwrap_or(0.0);
    let n = cfg.pick(args.n, "n")?.unwrap_or(64);
    let m = cfg
        .pick(args.m, "m")?
        .or(cfg.pick(None, "m_max")?)
        .unwrap_or_else(|| default_m(n));
    let w = cfg.pick(args.w, "w")?.unwrap_or(0);
    let format = cfg.pick(args.format, "format")?.unwrap_or_default();
    let flip = cfg.switch(args.flip_psi, "flip_psi")?;
    let bits = cfg.switch(args.bits, "bits")?;
    let out = cfg.pick(args.out, "out")?;
    if m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }

    let inst = instance(chi, n, w, flip)?;
    let dest = destination(out, &format!("search_chi{chi}_n{n}.{}", format.extension()))?;
    let report = trajectory_report(&inst, m)?;
    emit(dest.as_deref(), &render(&report, format), stdout)?;

    let peak = report
        .points
        .iter()
        .max_by(|a, b| a.p_success.total_cmp(&b.p_success))
        .expect("at least one point");
    let final_entropy = *report.entropies.last().expect("at least one point");
    let _ = write!(
        stderr,
        "peak p_success {:.12} at m = {}; final entropy {final_entropy:.6e} nats",
        peak.p_success, peak.m
    );
    if bits {
        let _ = write!(stderr, " = {:.6e} bits", final_entropy / std::f64::consts::LN_2);
    }
    let _ = writeln!(stderr);

    let bad = violations(&report);
    if bad.is_empty() {
        Ok(Exit::Success)
    } else {
        Err(CliError::Invariant(bad.join("; ")))
    }
}

// ---------------------------------------------------------------- sweep

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse `{s}`")))
        })
        .collect()
}

/// `start:stop:step`, stop included when it lies on the grid (to 1e-9 steps).
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts = parse_list::<f64>(&text.replace(':', ","), "--chi-range")?;
    let [start, stop, step] = parts[..] else {
        return Err(CliError::Usage(format!(
            "--chi-range `{text}`: expected start:stop:step"
        )));
    };
    if !(step > 0.0 && stop >= start && step.is_finite() && stop.is_finite()) {
        return Err(CliError::Usage(format!(
            "--chi-range `{text}`: need step > 0 and stop >= start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

#[derive(Debug, Serialize)]
struct SweepCell {
    chi: f64,
    n: usize,
    rows: Vec<Row>,
    discrepancies: Vec<DiscrepancyRecord>,
}

#[derive(Debug, Serialize)]
struct SweepDocument {
    cells: Vec<SweepCell>,
}

fn sweep(args: SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let chis: Vec<f64> = match (cfg.pick(args.chi, "chi")?, cfg.pick(args.chi_range, "chi_range")?) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --chi or --chi-range, not both".into())),
        (Some(list), None) => parse_list(&list, "--chi")?,
        (None, Some(range)) => parse_range(&range)?,
        (None, None) => Vec::new(),
    };
    let ns: Vec<usize> = cfg
        .pick(args.n, "n")?
        .map_or(Ok(Vec::new()), |s| parse_list(&s, "--n"))?;
    if chis.is_empty() {
        return Err(CliError::Usage("empty chi list".into()));
    }
    if ns.is_empty() {
        return Err(CliError::Usage("empty n list".into()));
    }
    let m = cfg.pick(args.m, "m")?.or(cfg.pick(None, "m_max")?);
    let w = cfg.pick(args.w, "w")?.unwrap_or(0);
    let format = cfg.pick(args.format, "format")?.unwrap_or_default();
    let flip = cfg.switch(args.flip_psi, "flip_psi")?;
    let per_cell = cfg.switch(args.per_cell, "per_cell")?;
    let out = cfg.pick(args.out, "out")?;
    if m == Some(0) {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }

    // validate every cell before spending time on any of them
    let mut cells = Vec::with_capacity(chis.len() * ns.len());
    for &chi in &chis {
        for &n in &ns {
            cells.push((instance(chi, n, w, flip)?, m.unwrap_or_else(|| default_m(n))));
        }
    }

    let out_dir = if per_cell {
        let dir = match out.clone() {
            Some(dir) => dir,
            None => destination(None, "")?
                .ok_or_else(|| CliError::Usage(format!("--per-cell needs --out or ${OUT_DIR_ENV}")))?,
        };
        std::fs::create_dir_all(&dir).map_err(io(&dir))?;
        Some(dir)
    } else {
        None
    };

    // collect() on an indexed parallel iterator keeps input order
    let reports: Vec<_> = cells.par_iter().map(|(inst, m)| trajectory_report(inst, *m)).collect();

    let mut failures = Vec::new();
    let mut blocks = Vec::new();
    for ((inst, _), report) in cells.iter().zip(reports) {
        let (chi, n) = (inst.chi().value(), inst.n());
        match report {
            Ok(report) => {
                for v in violations(&report) {
                    failures.push(format!("chi={chi} n={n}: {v}"));
                }
                blocks.push((chi, n, report));
            }
            Err(e) => failures.push(format!("chi={chi} n={n}: {e}")),
        }
    }

    if let Some(dir) = &out_dir {
        for (chi, n, report) in &blocks {
            let path = dir.join(format!("chi{chi}_n{n}.{}", format.extension()));
            emit(Some(&path), &render(report, format), stdout)?;
        }
    } else {
        let text = match format {
            Format::Csv => blocks
                .iter()
                .map(|(_, _, r)| output::csv(&output::rows(r)))
                .collect::<Vec<_>>()
                .join("\n"),
            Format::Json => {
                let doc = SweepDocument {
                    cells: blocks
                        .iter()
                        .map(|(chi, n, r)| SweepCell {
                            chi: *chi,
                            n: *n,
                            rows: output::rows(r),
                            discrepancies: discrepancies(r),
                        })
                        .collect(),
                };
                let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
                text.push('\n');
                text
            }
        };
        let dest = destination(out, &format!("sweep.{}", format.extension()))?;
        emit(dest.as_deref(), &text, stdout)?;
    }

    if failures.is_empty() {
        Ok(Exit::Success)
    } else {
        for f in &failures {
            let _ = writeln!(stderr, "invariant violated: {f}");
        }
        Ok(Exit::Violation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_stop_on_grid() {
        assert_eq!(parse_range("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0:0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_range("1:1:0.1").unwrap(), vec![1.0]);
    }

    #[test]
    fn malformed_ranges_are_usage_errors() {
        for bad in ["0:1", "0:1:0", "1:0:0.1", "a:b:c"] {
            assert!(matches!(parse_range(bad), Err(CliError::Usage(_))), "{bad}");
        }
    }

    #[test]
    fn default_budget_covers_first_peak() {
        // first Grover peak sits near (pi/4) sqrt N
        for n in [4, 16, 64, 256] {
            assert!(default_m(n) as f64 >= std::f64::consts::FRAC_PI_4 * (n as f64).sqrt());
        }
        assert_eq!(default_m(16), 16);
    }

    #[test]
    fn negative_strength_is_a_usage_error() {
        assert!(matches!(strength(-1.0), Err(CliError::Usage(_))));
    }
}
