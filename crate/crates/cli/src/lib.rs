//! Command-line front end: group facts, kernel tables, cohomology queries,
//! scenario adjudication, sweeps and the self-test suite.

pub mod schema;
pub mod selftest;

use clap::{Parser, Subcommand};
use norm1_core::adjudicator::{Adjudicator, PlaceScenario, scenario_sweep};
use norm1_core::cochain;
use norm1_core::glattice::{self, perm_lattice, trivial_lattice, GLattice};
use norm1_core::group::{GroupElement, HeisenbergGroup, PrimeParam, SubgroupLabel};
use norm1_core::pipeline::{self, Engine, Stabilizer};
use norm1_core::qz;
use norm1_core::smallgroup::FiniteGroup;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "norm1", version, about = "exact cohomology tables and Hasse norm principle verdicts for the Heisenberg group of order p^3")]
pub struct Cli {
    /// output format: markdown or json
    #[arg(long, global = true, default_value = "markdown")]
    pub format: String,
    /// content-addressed result cache directory
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// group facts and the 2p+5 subgroup class table
    Info {
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// restriction kernels of H^2(G, Q/Z) over every subgroup class
    QzKernels {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// write the two generating cocycle tables to norm1-cocycles.json
        #[arg(long)]
        dump_cocycles: bool,
    },
    /// restriction kernels of H^2(G, J) over every subgroup class
    JgKernels {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// point stabilizer H: 1 or a
        #[arg(long, default_value = "1")]
        stabilizer: String,
        /// direct, reduction, or both (both verifies agreement cell by cell)
        #[arg(long, default_value = "reduction")]
        engine: String,
    },
    /// one cohomology group of a subgroup class with chosen coefficients
    Cohomology {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// subgroup class label: 1, Z, H0..Hp, K0..Kp, G
        #[arg(long)]
        subgroup: String,
        /// Z (trivial), ZGH (coset lattice Z[G/H]), or J (norm-one lattice)
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        degree: usize,
        /// point stabilizer H for ZGH and J coefficients
        #[arg(long, default_value = "a")]
        stabilizer: String,
        /// write the boundary matrices to norm1-matrices.json
        #[arg(long)]
        dump_matrices: bool,
        /// write the acting lattice to norm1-lattice.json
        #[arg(long)]
        dump_lattices: bool,
        /// write the representative cocycles to norm1-cocycles.json
        #[arg(long)]
        dump_cocycles: bool,
    },
    /// Sha, weak approximation defect, Tamagawa number and case label
    Sha {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value = "1")]
        stabilizer: String,
        /// semicolon-separated labels, or gens:s,t,u/s,t,u generator lists
        #[arg(long, default_value = "")]
        places: String,
        /// drop the cyclic classes contributed by unramified places
        #[arg(long)]
        no_cyclic: bool,
    },
    /// adjudicate every ramified subset of the subgroup classes
    Sweep {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// 1, a, or both
        #[arg(long, default_value = "both")]
        stabilizer: String,
    },
    /// run the acceptance criteria
    Selftest {
        #[arg(long, default_value = "quick")]
        level: String,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

pub struct Outcome {
    pub stdout: String,
    pub exit: i32,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn heis(p: u32) -> Result<HeisenbergGroup, CliError> {
    let p = PrimeParam::new(p).map_err(failure_to_usage)?;
    Ok(HeisenbergGroup::new(p))
}

fn failure_to_usage(e: impl std::fmt::Display) -> CliError {
    usage(e.to_string())
}

fn parse_stabilizer(s: &str) -> Result<Stabilizer, CliError> {
    Stabilizer::parse(s).ok_or_else(|| usage(format!("--stabilizer {s}: expected 1 or a")))
}

fn parse_format(s: &str) -> Result<bool, CliError> {
    match s {
        "json" => Ok(true),
        "markdown" => Ok(false),
        other => Err(usage(format!("--format {other}: expected json or markdown"))),
    }
}

/// Place-list grammar: semicolon-separated class labels, or raw generator
/// lists "gens:s,t,u/s,t,u" which are reduced to their conjugacy class.
fn parse_places(
    g: &HeisenbergGroup,
    s: &str,
) -> Result<Vec<SubgroupLabel>, CliError> {
    let mut out = Vec::new();
    for item in s.split(';') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some(rest) = item.strip_prefix("gens:") {
            let mut gens: Vec<GroupElement> = Vec::new();
            for triple in rest.split('/') {
                let parts: Vec<&str> = triple.split(',').collect();
                if parts.len() != 3 {
                    return Err(usage(format!(
                        "--places item {item}: generator {triple} is not s,t,u"
                    )));
                }
                let nums: Result<Vec<i64>, _> =
                    parts.iter().map(|x| x.trim().parse::<i64>()).collect();
                let nums = nums.map_err(|_| {
                    usage(format!("--places item {item}: bad integer in {triple}"))
                })?;
                gens.push(g.element(nums[0], nums[1], nums[2]));
            }
            let (class, _) = g.conjugacy_reduce(&gens).map_err(failure)?;
            out.push(class.label);
        } else {
            out.push(SubgroupLabel::parse(item, g.p()).map_err(failure_to_usage)?);
        }
    }
    Ok(out)
}

fn big_entries(m: &norm1_core::linalg::IntMatrix) -> Value {
    let entries: Vec<Value> = m
        .entries()
        .map(|(r, c, v)| json!([r, c, v.to_i64().expect("boundary entry fits i64")]))
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

fn write_dump(path: &str, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(failure)?;
    std::fs::write(path, text + "\n").map_err(failure)?;
    eprintln!("wrote {path}");
    Ok(())
}

fn info_output(p: u32, as_json: bool) -> Result<String, CliError> {
    let g = heis(p)?;
    let facts = g.facts();
    let classes = g.subgroup_classes();
    if as_json {
        let class_rows: Vec<Value> = classes
            .iter()
            .map(|c| {
                json!({
                    "label": c.label.to_string(),
                    "order": c.order(),
                    "generators": c.generators.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let v = json!({"facts": facts, "classes": class_rows});
        return Ok(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()));
    }
    let mut out = format!("# Heisenberg group of order {}^3 = {}\n\n", p, facts.order);
    out.push_str(&format!("- exponent {}\n", facts.exponent));
    out.push_str(&format!("- center <c> of order {}\n", facts.center_order));
    out.push_str(&format!(
        "- derived subgroup <c> of order {}\n",
        facts.derived_order
    ));
    out.push_str(&format!(
        "- abelianization {}\n",
        facts
            .abelianization
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    ));
    out.push_str(&format!(
        "- {} subgroup classes up to conjugacy\n\n",
        facts.subgroup_class_count
    ));
    out.push_str("| class | order | generators |\n|---|---|---|\n");
    for c in &classes {
        let gens = c
            .generators
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("| {} | {} | {} |\n", c.label, c.order(), gens));
    }
    Ok(out)
}

fn qz_kernels_output(p: u32, as_json: bool, dump_cocycles: bool) -> Result<String, CliError> {
    let g = heis(p)?;
    let table = pipeline::lemma25_table(&g).map_err(failure)?;
    if dump_cocycles {
        let (f1, f2) = qz::make_f1_f2(&g);
        let dump = json!({
            "group": format!("Heisenberg p={p}"),
            "degree": 2,
            "modulus": f1.modulus(),
            "table": [f1.table, f2.table],
        });
        write_dump("norm1-cocycles.json", &dump)?;
    }
    if as_json {
        Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&table.to_json()).unwrap()
        ))
    } else {
        Ok(table.to_markdown())
    }
}

fn jg_kernels_output(
    p: u32,
    stabilizer: &str,
    engine: &str,
    as_json: bool,
) -> Result<String, CliError> {
    let g = heis(p)?;
    let stab = parse_stabilizer(stabilizer)?;
    let engine = Engine::parse(engine)
        .ok_or_else(|| usage(format!("--engine {engine}: expected direct, reduction or both")))?;
    let table = pipeline::theorem_table(&g, stab, engine).map_err(failure)?;
    if as_json {
        Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&table.to_json()).unwrap()
        ))
    } else {
        Ok(table.to_markdown())
    }
}

#[allow(clippy::too_many_arguments)]
fn cohomology_output(
    p: u32,
    subgroup: &str,
    coeff: &str,
    degree: usize,
    stabilizer: &str,
    as_json: bool,
    dump_matrices: bool,
    dump_lattices: bool,
    dump_cocycles: bool,
) -> Result<String, CliError> {
    let g = heis(p)?;
    let label = SubgroupLabel::parse(subgroup, g.p()).map_err(failure_to_usage)?;
    let sub = g.subgroup(label);
    if degree > 3 {
        return Err(usage(format!("--degree {degree}: supported range is 0..=3")));
    }
    let lat: GLattice = match coeff {
        "Z" => {
            let (fg, _) = FiniteGroup::from_subgroup(&g, &sub);
            trivial_lattice(fg)
        }
        "ZGH" | "J" => {
            let stab = parse_stabilizer(stabilizer)?;
            let h = stab.subgroup(&g);
            let (p_lat, _) = perm_lattice(&g, &h);
            let ambient = if coeff == "J" {
                glattice::chevalley_dual(&p_lat).0
            } else {
                p_lat
            };
            ambient.restrict(&g, &sub).map_err(failure)?
        }
        other => {
            return Err(usage(format!("--coeff {other}: expected Z, ZGH or J")));
        }
    };
    if dump_lattices {
        write_dump("norm1-lattice.json", &lat.dump_json())?;
    }
    let coh = cochain::cohomology(&lat, degree).map_err(failure)?;
    if dump_matrices {
        let d_out = cochain::boundary_matrix(&lat, degree).map_err(failure)?;
        let mut dump = json!({"degree": degree, "d_out": big_entries(&d_out)});
        if degree > 0 {
            let d_in = cochain::boundary_matrix(&lat, degree - 1).map_err(failure)?;
            dump["d_in"] = big_entries(&d_in);
        }
        write_dump("norm1-matrices.json", &dump)?;
    }
    if dump_cocycles {
        let table: Vec<Vec<String>> = coh
            .reps
            .iter()
            .map(|rep| rep.iter().map(|v| v.to_string()).collect())
            .collect();
        let dump = json!({
            "group": label.to_string(),
            "degree": degree,
            "lattice": {"rank": lat.rank},
            "table": table,
        });
        write_dump("norm1-cocycles.json", &dump)?;
    }
    let coeff_name = match coeff {
        "Z" => "Z".to_string(),
        "ZGH" => "Z[G/H]".to_string(),
        _ => "J".to_string(),
    };
    if as_json {
        let v = json!({
            "p": p,
            "subgroup": label.to_string(),
            "coeff": coeff_name,
            "degree": degree,
            "group": coh.structure,
            "orders": coh.orders,
        });
        Ok(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()))
    } else {
        Ok(format!(
            "H^{degree}({label}, {coeff_name}) = {}\n",
            coh.structure
        ))
    }
}

fn sha_output(
    p: u32,
    stabilizer: &str,
    places: &str,
    no_cyclic: bool,
    as_json: bool,
) -> Result<String, CliError> {
    let g = heis(p)?;
    let stab = parse_stabilizer(stabilizer)?;
    let ramified = parse_places(&g, places)?;
    let adj = Adjudicator::new(&g).map_err(failure)?;
    let scenario = PlaceScenario {
        stabilizer: stab,
        ramified,
        include_all_cyclic: !no_cyclic,
    };
    let report = adj.adjudicate(&scenario).map_err(failure)?;
    if as_json {
        Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&report.to_json()).unwrap()
        ))
    } else {
        Ok(report.to_markdown())
    }
}

fn sweep_output(p: u32, stabilizer: &str, as_json: bool) -> Result<String, CliError> {
    let g = heis(p)?;
    let stabs: Vec<Stabilizer> = match stabilizer {
        "both" => vec![Stabilizer::Trivial, Stabilizer::GenA],
        other => vec![parse_stabilizer(other)?],
    };
    let adj = Adjudicator::new(&g).map_err(failure)?;
    let mut reports = Vec::new();
    for stab in stabs {
        reports.push(scenario_sweep(&adj, stab).map_err(failure)?);
    }
    if as_json {
        let v = json!({
            "p": p,
            "sweeps": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        });
        Ok(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()))
    } else {
        Ok(reports
            .iter()
            .map(|r| r.to_markdown())
            .collect::<Vec<_>>()
            .join("\n"))
    }
}

fn selftest_output(level: &str, as_json: bool) -> Result<Outcome, CliError> {
    let level = selftest::Level::parse(level)
        .ok_or_else(|| usage(format!("--level {level}: expected quick or full")))?;
    let results = selftest::run(level);
    let all_pass = results.iter().all(|r| r.pass);
    let stdout = if as_json {
        let v = json!({
            "level": level.name(),
            "pass": all_pass,
            "results": results.iter().map(|r| json!({
                "name": r.name,
                "pass": r.pass,
                "seconds": r.seconds,
                "detail": r.detail,
            })).collect::<Vec<_>>(),
        });
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else {
        let mut out = String::new();
        for r in &results {
            out.push_str(&r.line());
            out.push('\n');
        }
        out.push_str(if all_pass { "all criteria passed\n" } else { "FAILURES\n" });
        out
    };
    Ok(Outcome {
        stdout,
        exit: if all_pass { 0 } else { 2 },
    })
}

/// Canonical invocation string, the cache key preimage.  Includes the budget
/// override since it can change budget-guarded outputs.
fn cache_key(cli: &Cli) -> String {
    let budget = std::env::var("NORM1_BUDGET").unwrap_or_default();
    format!("format={};budget={};cmd={:?}", cli.format, budget, cli.cmd)
}

fn cache_lookup(dir: &PathBuf, key: &str) -> Option<String> {
    let digest = hex::encode(Sha256::digest(key.as_bytes()));
    std::fs::read_to_string(dir.join(digest + ".out")).ok()
}

fn cache_store(dir: &PathBuf, key: &str, output: &str) {
    let digest = hex::encode(Sha256::digest(key.as_bytes()));
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join(digest + ".out"), output);
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let as_json = parse_format(&cli.format)?;
    let has_dumps = matches!(
        cli.cmd,
        Cmd::QzKernels { dump_cocycles: true, .. }
            | Cmd::Cohomology { dump_matrices: true, .. }
            | Cmd::Cohomology { dump_lattices: true, .. }
            | Cmd::Cohomology { dump_cocycles: true, .. }
    );
    let cacheable = !matches!(cli.cmd, Cmd::Selftest { .. }) && !has_dumps;
    let key = cache_key(cli);
    if cacheable {
        if let Some(dir) = &cli.cache {
            if let Some(hit) = cache_lookup(dir, &key) {
                return Ok(Outcome { stdout: hit, exit: 0 });
            }
        }
    }
    let outcome = match &cli.cmd {
        Cmd::Info { p } => Outcome {
            stdout: info_output(*p, as_json)?,
            exit: 0,
        },
        Cmd::QzKernels { p, dump_cocycles } => Outcome {
            stdout: qz_kernels_output(*p, as_json, *dump_cocycles)?,
            exit: 0,
        },
        Cmd::JgKernels { p, stabilizer, engine } => Outcome {
            stdout: jg_kernels_output(*p, stabilizer, engine, as_json)?,
            exit: 0,
        },
        Cmd::Cohomology {
            p,
            subgroup,
            coeff,
            degree,
            stabilizer,
            dump_matrices,
            dump_lattices,
            dump_cocycles,
        } => Outcome {
            stdout: cohomology_output(
                *p,
                subgroup,
                coeff,
                *degree,
                stabilizer,
                as_json,
                *dump_matrices,
                *dump_lattices,
                *dump_cocycles,
            )?,
            exit: 0,
        },
        Cmd::Sha { p, stabilizer, places, no_cyclic } => Outcome {
            stdout: sha_output(*p, stabilizer, places, *no_cyclic, as_json)?,
            exit: 0,
        },
        Cmd::Sweep { p, stabilizer } => Outcome {
            stdout: sweep_output(*p, stabilizer, as_json)?,
            exit: 0,
        },
        Cmd::Selftest { level } => selftest_output(level, as_json)?,
    };
    if cacheable && outcome.exit == 0 {
        if let Some(dir) = &cli.cache {
            cache_store(dir, &key, &outcome.stdout);
        }
    }
    Ok(outcome)
}

pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.exit
        }
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            1
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}
