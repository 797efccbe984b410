//! Batch verifier for L-infinity structure files: constructions and
//! symbolic identity checks, exact over the rationals.

mod format;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linfty_core::courant::{
    canonical_morphism, courant_from_2term, new_two_term, verify_courant_axioms,
    verify_courant_two_term,
};
use linfty_core::hpoisson::{mc_residual, HomotopyPoissonPresentation, McConvention};
use linfty_core::ikeda::{
    bidegree_split, induced_structure_constants, induced_two_term, iu_from_3term,
    verify_induced_two_term, verify_iu_axioms,
};
use linfty_core::linfty::{
    check_higher_jacobi, check_master_equation, hamiltonian_encode, verify_morphism,
};
use linfty_core::poly::GradedPolynomial;
use linfty_core::quasi::{
    kerd_two_term, split_quasi_bialgebroid, verify_quasi_poisson, GroupoidModel,
    TranslationConvention,
};
use linfty_core::report::VerificationReport;

use format::{parse_structure_file, serialize_structure, StructureFile};

#[derive(Parser)]
#[command(
    name = "linfty",
    about = "Exact verification of L-infinity structures, Courant algebroids and their derived geometry",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Structure file to read.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Where constructions write their output structure file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write the machine-readable report (one record per check) here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Coefficient-degree cap for section-level verifications.
    #[arg(long, default_value_t = 2, global = true)]
    degree_cap: u32,
    /// Largest n for the higher Jacobi checks.
    #[arg(long, default_value_t = 4, global = true)]
    jacobi_max: usize,
    /// Translation sign convention for the quasi-Poisson checks.
    #[arg(long, value_enum, default_value_t = Convention::Left, global = true)]
    convention: Convention,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Command {
    /// Degree audit, higher Jacobi and master equation.
    Verify,
    /// Print the Hamiltonian encoding on the shifted cotangent chart.
    Encode,
    /// Build the Courant algebroid and verify its axioms.
    Courant,
    /// Build the induced 2-term structure on g0 + (g-1 (x) g0*).
    New2term,
    /// Verify the canonical homomorphism from the new structure back.
    Morphism,
    /// Split off the Lie quasi-bialgebroid and verify its equations.
    Bialgebroid,
    /// Print the integration bivector and verify delta_Pi = delta.
    Bivector,
    /// The quasi-Poisson identities for the action groupoid.
    QuasiCheck,
    /// Build the Ikeda-Uchino algebroid of a 3-term input and verify
    /// (A1)-(A4).
    Iu,
    /// The induced 2-term structure of a 3-term input, with exact kernel.
    Induce2term,
    /// Maurer-Cartan residual of the `alpha` block against the encoded
    /// structure.
    McCheck {
        /// Drop the arity-1 term (the l1-free homotopy-symplectic variant).
        #[arg(long)]
        l1_free: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            if let Some(path) = &cli.report {
                if let Err(e) = fs::write(path, report.to_machine_lines()) {
                    eprintln!("error: cannot write report: {e}");
                    return ExitCode::from(2);
                }
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli) -> Result<StructureFile, String> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| "missing --input FILE".to_string())?;
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    parse_structure_file(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn convention_of(cli: &Cli, file: &StructureFile) -> TranslationConvention {
    // the file-level flag wins over the command line when present
    match file.extras.convention.as_deref() {
        Some("right") => TranslationConvention::Right,
        Some("left") => TranslationConvention::Left,
        _ => match cli.convention {
            Convention::Left => TranslationConvention::Left,
            Convention::Right => TranslationConvention::Right,
        },
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {path:?}: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<VerificationReport, String> {
    let file = load(cli)?;
    let g = &file.structure;
    let fail = |e: linfty_core::GradedError| e.to_string();
    match &cli.command {
        Command::Verify => {
            let mut report = check_higher_jacobi(g, cli.jacobi_max);
            let enc = hamiltonian_encode(g).map_err(fail)?;
            report.merge(check_master_equation(&enc.hamiltonian, &enc.chart));
            Ok(report)
        }
        Command::Encode => {
            let enc = hamiltonian_encode(g).map_err(fail)?;
            let mut text = String::new();
            text.push_str(&format!(
                "# chart T*[{}], coordinates:\n",
                enc.chart.shift()
            ));
            for c in enc.chart.coordinates() {
                text.push_str(&format!(
                    "#   {} degree {}{}\n",
                    c.label,
                    c.degree,
                    if c.is_momentum { " (momentum)" } else { "" }
                ));
            }
            text.push_str(&format!(
                "# Hamiltonian: {}\n",
                enc.hamiltonian.display(&enc.chart)
            ));
            write_output(cli, &text)?;
            Ok(check_master_equation(&enc.hamiltonian, &enc.chart))
        }
        Command::Courant => {
            let cd = courant_from_2term(g).map_err(fail)?;
            let mut report = verify_courant_axioms(&cd, cli.degree_cap);
            report.merge(verify_courant_two_term(&cd, 1, cli.jacobi_max.min(4)));
            Ok(report)
        }
        Command::New2term => {
            let tilde = new_two_term(g).map_err(fail)?;
            write_output(cli, &serialize_structure(&tilde, None))?;
            Ok(check_higher_jacobi(&tilde, cli.jacobi_max))
        }
        Command::Morphism => {
            let tilde = new_two_term(g).map_err(fail)?;
            let f = canonical_morphism(g).map_err(fail)?;
            verify_morphism(&f, &tilde, g).map_err(fail)
        }
        Command::Bialgebroid => {
            let (_, report) = split_quasi_bialgebroid(g).map_err(fail)?;
            Ok(report)
        }
        Command::Bivector => {
            let model = GroupoidModel::new(g).map_err(fail)?;
            let pi = model.bivector();
            let names: Vec<String> = (0..model.nvars()).map(|v| model.var_name(v)).collect();
            let text = format!(
                "# groupoid bivector:\n# Pi = {}\n",
                pi.display(&|i| names[i].clone())
            );
            write_output(cli, &text)?;
            Ok(verify_quasi_poisson(&model, convention_of(cli, &file)))
        }
        Command::QuasiCheck => {
            let model = GroupoidModel::new(g).map_err(fail)?;
            let mut report = verify_quasi_poisson(&model, convention_of(cli, &file));
            let (b, split_report) = split_quasi_bialgebroid(g).map_err(fail)?;
            report.merge(split_report);
            let (_, kerd_report) = kerd_two_term(&b, cli.degree_cap, cli.jacobi_max.min(4));
            report.merge(kerd_report);
            Ok(report)
        }
        Command::Iu => {
            let d = iu_from_3term(g).map_err(fail)?;
            let split = bidegree_split(g).map_err(fail)?;
            let mut report = VerificationReport::new();
            if split.theta2.add(&split.theta13).add(&split.theta4) == split.hamiltonian {
                report.pass("bidegree split theta2 + theta13 + theta4 = Theta");
            } else {
                report.fail("bidegree split theta2 + theta13 + theta4 = Theta", vec![]);
            }
            report.merge(verify_iu_axioms(&d, cli.degree_cap));
            Ok(report)
        }
        Command::Induce2term => {
            let it = induced_two_term(g).map_err(fail)?;
            let finite = induced_structure_constants(&it).map_err(fail)?;
            write_output(cli, &serialize_structure(&finite, None))?;
            let mut report = verify_induced_two_term(&it, cli.jacobi_max.min(4));
            report.merge(check_higher_jacobi(&finite, cli.jacobi_max.min(4)));
            Ok(report)
        }
        Command::McCheck { l1_free } => {
            let pres = HomotopyPoissonPresentation::from_structure(g).map_err(fail)?;
            let mut report = pres.verify();
            let mut alpha = GradedPolynomial::zero();
            for (c, labels) in &file.extras.alpha {
                let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
                let mono =
                    GradedPolynomial::monomial(&pres.chart, c.clone(), &refs).map_err(fail)?;
                alpha = alpha.add(&mono);
            }
            let convention = if *l1_free {
                McConvention::FromArityTwo
            } else {
                McConvention::FromArityOne
            };
            let residual = mc_residual(&pres, &alpha, convention).map_err(fail)?;
            if residual.is_zero() {
                report.pass("Maurer-Cartan residual = 0");
            } else {
                report.fail(
                    "Maurer-Cartan residual = 0",
                    vec![residual.display(&pres.chart).to_string()],
                );
            }
            Ok(report)
        }
    }
}
