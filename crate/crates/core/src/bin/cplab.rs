use std::path::PathBuf;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{Arg, ArgMatches, Command};

use cplab::harness::{replay, run_experiment, threads_from_env, Experiment, ExperimentConfig, Format, HarnessError, Status};

fn experiment_command(e: Experiment) -> Command {
    let mut cmd = Command::new(e.name())
        .about(e.about())
        .arg(Arg::new("seed").long("seed").value_name("S").default_value("0").value_parser(clap::value_parser!(u64)))
        .arg(Arg::new("out").long("out").value_name("DIR").help("output directory [default: cplab-out/<experiment>]"))
        .arg(Arg::new("format").long("format").value_name("LIST").default_value("csv,json,svg").help("subset of csv,json,svg"));
    for spec in e.params() {
        let mut arg = Arg::new(spec.name).long(spec.name).value_name("VALUE").help(spec.help).allow_hyphen_values(true);
        arg = if spec.default.is_empty() { arg } else { arg.default_value(spec.default) };
        cmd = cmd.arg(arg);
    }
    cmd
}

fn cli() -> Command {
    let experiments: Vec<Command> = Experiment::ALL.into_iter().map(experiment_command).collect();
    Command::new("cplab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Circle packing experiments on random planar triangulations")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .after_help("CPLAB_THREADS caps the number of worker threads.")
        .subcommands(experiments.clone())
        .subcommand(Command::new("run").about("run an experiment (same as naming it directly)").subcommand_required(true).subcommands(experiments))
        .subcommand(
            Command::new("replay")
                .about("re-run the config recorded in a manifest and compare checksums")
                .arg(Arg::new("manifest").required(true).value_parser(clap::value_parser!(PathBuf)))
                .arg(Arg::new("out").long("out").value_name("DIR").value_parser(clap::value_parser!(PathBuf))),
        )
        .subcommand(Command::new("list").about("list experiments"))
}

fn config_from(e: Experiment, m: &ArgMatches) -> Result<ExperimentConfig, HarnessError> {
    let seed = *m.get_one::<u64>("seed").expect("defaulted");
    let out = m.get_one::<String>("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("cplab-out").join(e.name()));
    let formats = m.get_one::<String>("format").expect("defaulted").split(',').map(str::parse).collect::<Result<Vec<Format>, _>>()?;
    let mut config = ExperimentConfig::new(e, seed, out);
    config.formats = formats;
    for spec in e.params() {
        if m.value_source(spec.name) == Some(ValueSource::CommandLine) {
            if let Some(v) = m.get_one::<String>(spec.name) {
                config.params.insert(spec.name.to_string(), v.clone());
            }
        }
    }
    Ok(config)
}

fn run(config: ExperimentConfig) -> Result<i32, HarnessError> {
    let manifest = run_experiment(&config)?;
    for a in &manifest.artifacts {
        println!("{}  {}", a.sha256, config.out.join(&a.path).display());
    }
    println!("config_hash {}", manifest.config_hash);
    if let Status::ValidationFailed { reason } = &manifest.status {
        eprintln!("validation failed: {reason}");
    }
    Ok(manifest.exit_code())
}

fn dispatch(m: &ArgMatches) -> Result<i32, HarnessError> {
    let (name, sub) = m.subcommand().expect("subcommand required");
    match name {
        "run" => dispatch(sub),
        "list" => {
            for e in Experiment::ALL {
                println!("{:<20} {}", e.name(), e.about());
            }
            Ok(0)
        }
        "replay" => {
            let manifest = sub.get_one::<PathBuf>("manifest").expect("required");
            let out = sub.get_one::<PathBuf>("out").cloned().unwrap_or_else(|| {
                manifest.parent().map(|p| p.join("replay")).unwrap_or_else(|| PathBuf::from("replay"))
            });
            let report = replay(manifest, &out)?;
            if report.identical() {
                println!("replay identical: {} artifacts in {}", report.replayed.artifacts.len(), out.display());
                Ok(report.replayed.exit_code())
            } else {
                eprintln!("replay differs: {}", report.mismatched.join(", "));
                Ok(2)
            }
        }
        other => {
            let e: Experiment = other.parse()?;
            run(config_from(e, sub)?)
        }
    }
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    if let Some(n) = threads_from_env() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cplab: cannot size thread pool: {e}");
        }
    }
    match dispatch(&matches) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("cplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
