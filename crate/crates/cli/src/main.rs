//! Command-line front end.
//!
//! Every subcommand reads one JSON document (from `--input` or standard
//! input), writes a single JSON report to standard output with all
//! rationals as exact strings, and a short human summary to standard
//! error. Exit codes: 0 pass/success, 1 semistability failure (the report
//! carries a witness), 2 input or validation error.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use swampstab::cone::bounds_pipeline;
use swampstab::filtration::{FailCondition, Mode, Strictness, Verdict, WallScan};
use swampstab::invariant::{canonical_degree_sum, dual_iso_criterion, euler_calculus, EulerOp};
use swampstab::io::{parse_rational, rational_string, BlocksDoc, InstanceDoc, IoError};
use swampstab::model::{basic_invariants, validate_instance};
use swampstab::weights::verify_block_lemma;
use swampstab::{Scalar, Q};

#[derive(Parser)]
#[command(
    name = "swampstab",
    about = "Exact semistability calculus for swamps on reducible curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArg {
    /// Input JSON file; standard input when omitted.
    #[arg(short, long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide (kappa, delta)- or asymptotic (semi)stability of an instance.
    Check {
        #[command(flatten)]
        input: InputArg,
        /// Stability parameter as `p/q`.
        #[arg(long, conflicts_with = "asymptotic")]
        delta: Option<String>,
        /// Test the asymptotic condition instead of a fixed delta.
        #[arg(long)]
        asymptotic: bool,
        /// Strict inequalities (stability instead of semistability).
        #[arg(long)]
        stable: bool,
        /// Override the instance's kappa weights, comma-separated `p/q`.
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Exact delta walls, chamber verdicts, and the stabilization threshold.
    Walls {
        #[command(flatten)]
        input: InputArg,
        /// Override the instance's kappa weights, comma-separated `p/q`.
        #[arg(long)]
        kappa: Option<String>,
    },
    /// The boundedness constant chain for the instance data.
    Constants {
        #[command(flatten)]
        input: InputArg,
        /// Tensor arity override (defaults to the instance's tensor type).
        #[arg(long)]
        a: Option<usize>,
        /// Refuse to enumerate more cone functions than this.
        #[arg(long, default_value_t = 1_000_000)]
        ceiling: u64,
        /// Override the instance's kappa weights, comma-separated `p/q`.
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Transfer a nodal instance to its normalization (GPS side).
    Transfer {
        #[command(flatten)]
        input: InputArg,
    },
    /// Check the block-group semistability equivalence on a representation
    /// file.
    VerifyGit {
        #[command(flatten)]
        input: InputArg,
        /// Box bound for the advisory exhaustive enumeration.
        #[arg(long, default_value_t = 1)]
        bound: i64,
    },
    /// Euler-characteristic calculus: twists, duals, and degree checks.
    Euler {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated twist degrees, one per component.
        #[arg(long)]
        twist: Option<String>,
        /// Report the dual Euler characteristic.
        #[arg(long)]
        dual: bool,
        /// Report the omega-dual Euler characteristic.
        #[arg(long)]
        omega_dual: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let report = json!({
                "error": "input",
                "diagnostics": [err.to_string()],
            });
            println!("{}", pretty(&report));
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

/// Applies a `--kappa` override to the parsed document.
fn override_kappa(doc: &mut InstanceDoc, kappa: Option<String>) -> Result<(), IoError> {
    if let Some(text) = kappa {
        let entries = swampstab::io::parse_rational_list(&text)?;
        doc.kappa = Some(entries.iter().map(rational_string).collect());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, IoError> {
    match cli.command {
        Command::Check {
            input,
            delta,
            asymptotic,
            stable,
            kappa,
        } => {
            let mut doc: InstanceDoc = read_doc(&input)?;
            override_kappa(&mut doc, kappa)?;
            let instance = doc.to_instance()?;
            let strictness = if stable {
                Strictness::Stable
            } else {
                Strictness::Semistable
            };
            let mode = match (&delta, asymptotic) {
                (Some(text), false) => {
                    let delta = parse_rational(text)?;
                    if delta <= Q::from_int(0) {
                        return Err(IoError::Rejected("delta must be positive".into()));
                    }
                    Mode::Delta(delta)
                }
                (None, true) => Mode::Asymptotic,
                (None, false) => {
                    return Err(IoError::Rejected(
                        "one of --delta or --asymptotic is required".into(),
                    ))
                }
                (Some(_), true) => unreachable!("clap conflicts_with"),
            };
            let verdict = instance
                .check(&mode, strictness)
                .map_err(|e| IoError::Rejected(e.to_string()))?;
            let report = verdict_report(&verdict, &mode, strictness);
            println!("{}", pretty(&report));
            if verdict.pass {
                eprintln!("verdict: pass");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verdict: fail (witness in report)");
                Ok(ExitCode::from(1))
            }
        }
        Command::Walls { input, kappa } => {
            let mut doc: InstanceDoc = read_doc(&input)?;
            override_kappa(&mut doc, kappa)?;
            let instance = doc.to_instance()?;
            let scan = instance
                .wall_scan()
                .map_err(|e| IoError::Rejected(e.to_string()))?;
            println!("{}", pretty(&walls_report(&scan)));
            eprintln!(
                "walls: {}, threshold {}",
                scan.walls.len(),
                rational_string(&scan.delta_threshold)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Constants {
            input,
            a,
            ceiling,
            kappa,
        } => {
            let doc: InstanceDoc = read_doc(&input)?;
            let (transferred, mut doc) = if doc.is_nodal() {
                (true, doc.transferred()?)
            } else {
                (false, doc)
            };
            override_kappa(&mut doc, kappa)?;
            let curve = doc.curve();
            let sheaf = doc.sheaf_data()?;
            let validated = validate_instance(&curve, &sheaf)
                .map_err(|errs| IoError::Rejected(format!("{errs:?}")))?;
            let rank = validated
                .uniform_rank
                .ok_or_else(|| IoError::Rejected("constants need uniform rank".into()))?;
            let kappa = match doc.kappa()? {
                Some(kappa) => kappa,
                None if doc.marked_pairs.is_empty() => {
                    swampstab::invariant::KappaVector::new(Vec::new())
                        .expect("the empty weight vector is valid")
                }
                None => {
                    return Err(IoError::Rejected(
                        "constants need kappa weights for the marked pairs".into(),
                    ))
                }
            };
            let gps_types = sheaf.gps_types().unwrap_or(&[]).to_vec();
            let arity = a.unwrap_or_else(|| doc.tensor().0);
            let record = bounds_pipeline(
                rank,
                sheaf.euler,
                &kappa,
                &gps_types,
                &curve,
                arity,
                ceiling,
            )
            .map_err(|e| IoError::Rejected(e.to_string()))?;
            let report = json!({
                "command": "constants",
                "transferred": transferred,
                "alpha": record.alpha,
                "a": record.arity,
                "cone_functions": record.cone_functions,
                "D": rational_string(&record.d),
                "K0_squared": rational_string(&record.k0_squared),
                "K1": rational_string(&record.k1),
                "B_squared": rational_string(&record.b_squared),
                "B_upper": rational_string(&record.b_upper),
                "kappa_slope_bound": rational_string(&record.kappa_slope_bound),
                "slope_bound": rational_string(&record.slope_bound),
                "K": rational_string(&record.k),
                "delta_lp": rational_string(&record.delta_lp),
                "delta_cap": rational_string(&record.delta_cap),
                "delta_infinity": rational_string(&record.delta_infinity),
            });
            println!("{}", pretty(&report));
            eprintln!(
                "constants: alpha = {}, K0^2 = {}, delta_infinity = {}",
                record.alpha,
                rational_string(&record.k0_squared),
                rational_string(&record.delta_infinity)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Transfer { input } => {
            let doc: InstanceDoc = read_doc(&input)?;
            let transferred = doc.transferred()?;
            println!("{}", pretty(&serde_json::to_value(&transferred)?));
            eprintln!(
                "transferred: euler {} -> {}, kappa = 1",
                doc.sheaf.euler, transferred.sheaf.euler
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyGit { input, bound } => {
            let doc: BlocksDoc = read_doc(&input)?;
            let (group, support) = doc.to_group()?;
            let report = verify_block_lemma::<Q>(&group, &support, bound)
                .map_err(|e| IoError::Rejected(e.to_string()))?;
            let value = json!({
                "command": "verify-git",
                "equivalence_holds": report.equivalence_holds,
                "lp_semistable": report.lp_semistable,
                "componentwise_semistable": report.componentwise_semistable,
                "blocks": report
                    .blocks
                    .iter()
                    .map(|b| json!({
                        "nonzero": b.nonzero,
                        "sl_semistable": b.sl_semistable,
                    }))
                    .collect::<Vec<_>>(),
                "destabilizer": report.destabilizer.as_ref().map(|d| d.per_block.clone()),
                "enumerated": report.enumerated,
                "enumerated_destabilizer": report
                    .enumerated_destabilizer
                    .as_ref()
                    .map(|d| d.per_block.clone()),
                "bound_warning": report.bound_warning,
            });
            println!("{}", pretty(&value));
            if report.equivalence_holds {
                eprintln!("equivalence holds");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("equivalence FAILED");
                Ok(ExitCode::from(1))
            }
        }
        Command::Euler {
            input,
            twist,
            dual,
            omega_dual,
        } => {
            let doc: InstanceDoc = read_doc(&input)?;
            let curve = doc.curve();
            let sheaf = doc.sheaf_data()?;
            validate_instance(&curve, &sheaf)
                .map_err(|errs| IoError::Rejected(format!("{errs:?}")))?;
            let uniform = sheaf.uniform_rank();
            let inv = basic_invariants::<Q>(&curve, &sheaf);
            let mut report = json!({
                "command": "euler",
                "chi": sheaf.euler,
                "total_rank": inv.total_rank,
                "rank_ell": rational_string(&inv.rank_ell),
                "degree_ell": rational_string(&inv.degree_ell),
                "euler_o_glued": curve.euler_o_glued(),
                "arithmetic_genus": curve.arithmetic_genus(),
                "canonical_degree_sum": canonical_degree_sum(&curve),
            });
            let object = report.as_object_mut().expect("report is an object");
            if let Some(text) = twist {
                let degrees: Vec<i64> = text
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| {
                        p.trim().parse::<i64>().map_err(|e| IoError::BadRational {
                            text: p.to_string(),
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let chi = euler_calculus(&curve, uniform, sheaf.euler, &EulerOp::Twist(degrees))
                    .map_err(|e| IoError::Rejected(e.to_string()))?;
                object.insert("chi_twisted".into(), json!(chi));
            }
            if dual {
                let chi = euler_calculus(&curve, uniform, sheaf.euler, &EulerOp::Dual)
                    .map_err(|e| IoError::Rejected(e.to_string()))?;
                object.insert("chi_dual".into(), json!(chi));
            }
            if omega_dual {
                let chi = euler_calculus(&curve, uniform, sheaf.euler, &EulerOp::OmegaDual)
                    .map_err(|e| IoError::Rejected(e.to_string()))?;
                object.insert("chi_omega_dual".into(), json!(chi));
            }
            if uniform.is_some() {
                let iso = dual_iso_criterion(&curve, uniform, sheaf.euler)
                    .map_err(|e| IoError::Rejected(e.to_string()))?;
                object.insert("dual_iso".into(), json!(iso));
            }
            println!("{}", pretty(&report));
            eprintln!("euler: chi = {}", sheaf.euler);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_doc<T: serde::de::DeserializeOwned>(input: &InputArg) -> Result<T, IoError> {
    let text = match &input.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| IoError::Rejected(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| IoError::Rejected(format!("cannot read standard input: {e}")))?;
            buffer
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn verdict_report(
    verdict: &Verdict<Q>,
    mode: &Mode<Q>,
    strictness: Strictness,
) -> serde_json::Value {
    let mode_value = match mode {
        Mode::Delta(delta) => json!({ "delta": rational_string(delta) }),
        Mode::Asymptotic => json!("asymptotic"),
    };
    let strictness_value = match strictness {
        Strictness::Semistable => "semistable",
        Strictness::Stable => "stable",
    };
    let verdict_value = match (verdict.pass, strictness) {
        (true, Strictness::Semistable) => "semistable",
        (true, Strictness::Stable) => "stable",
        (false, _) => "unstable",
    };
    json!({
        "command": "check",
        "mode": mode_value,
        "strictness": strictness_value,
        "verdict": verdict_value,
        "witness": verdict.witness.as_ref().map(|w| json!({
            "flag_index": w.shape_index,
            "m": w.weights.iter().map(rational_string).collect::<Vec<_>>(),
            "value": rational_string(&w.value),
            "condition": match w.condition {
                FailCondition::DeltaValue => "delta_value",
                FailCondition::MuNegative => "mu_negative",
                FailCondition::ChiOnMuZero => "chi_on_mu_zero",
            },
        })),
    })
}

fn walls_report(scan: &WallScan<Q>) -> serde_json::Value {
    json!({
        "command": "walls",
        "walls": scan.walls.iter().map(rational_string).collect::<Vec<_>>(),
        "delta_threshold": rational_string(&scan.delta_threshold),
        "asymptotic": {
            "semistable": scan.asymptotic_semi,
            "stable": scan.asymptotic_stable,
        },
        "chambers": scan
            .chambers
            .iter()
            .map(|chamber| json!({
                "from": rational_string(&chamber.from),
                "to": chamber.to.as_ref().map(rational_string),
                "sample": rational_string(&chamber.sample),
                "semistable": chamber.semistable,
                "stable": chamber.stable,
            }))
            .collect::<Vec<_>>(),
    })
}
