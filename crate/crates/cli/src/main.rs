mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Options};
use commands::Run;
use report::{pretty, write_atomic, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", pretty(&json!({ "command": null, "error": { "kind": err.kind(), "message": e.to_string() } })));
            return ExitCode::from(2);
        }
    };
    let name = cli.command.name();
    match execute(&cli) {
        Ok(path) => {
            println!("{path}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!("{}", pretty(&e.to_json(Some(name))));
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let loaded = commands::load(cli.opts.config.as_deref())?;
    let name = cli.command.name();
    let config: Value = serde_json::from_str(&loaded.config.to_json()).expect("config is JSON");
    let mut artifacts = Vec::new();
    let body = match &cli.opts.sweep {
        None => {
            let run = commands::run(cli.command, &loaded, &cli.opts)?;
            envelope(run, "", &mut artifacts)
        }
        Some(spec) => {
            let (key, values) = parse_sweep(spec)?;
            let mut runs = Vec::new();
            for v in values {
                let opts = with_value(&cli.opts, &key, &v)?;
                let run = commands::run(cli.command, &loaded, &opts)?;
                runs.push(envelope(run, &format!("{key}-{v}"), &mut artifacts));
            }
            json!({ "sweep": { "key": key, "runs": runs } })
        }
    };
    let mut report = json!({ "command": name, "config": config });
    report.as_object_mut().unwrap().extend(body.as_object().unwrap().clone());
    report["artifacts"] = json!(artifacts.iter().map(|(n, _)| n).collect::<Vec<_>>());
    for (n, contents) in &artifacts {
        write_atomic(&cli.opts.out, n, contents)?;
    }
    let file = format!("{name}.json");
    write_atomic(&cli.opts.out, &file, &pretty(&report))?;
    Ok(cli.opts.out.join(file).display().to_string())
}

fn envelope(run: Run, suffix: &str, artifacts: &mut Vec<(String, String)>) -> Value {
    let names: Vec<String> = run
        .artifacts
        .into_iter()
        .map(|(n, c)| {
            let n = if suffix.is_empty() {
                n
            } else {
                match n.rsplit_once('.') {
                    Some((stem, ext)) => format!("{stem}.{suffix}.{ext}"),
                    None => format!("{n}.{suffix}"),
                }
            };
            artifacts.push((n.clone(), c));
            n
        })
        .collect();
    json!({ "parameters": run.params, "ledger": run.ledger.to_json(), "result": run.result, "run_artifacts": names })
}

fn parse_sweep(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, vals) = spec.split_once('=').ok_or_else(|| CliError::Usage(format!("--sweep expects KEY=V1,V2,..., got {spec:?}")))?;
    let values: Vec<String> = vals.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage("--sweep needs at least one value".into()));
    }
    Ok((key.trim().to_string(), values))
}

fn with_value(opts: &Options, key: &str, v: &str) -> Result<Options, CliError> {
    fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        v.parse().map_err(|e: T::Err| CliError::Usage(format!("--sweep {key}: {v:?}: {e}")))
    }
    let mut o = opts.clone();
    match key {
        "seed" => o.seed = Some(num(key, v)?),
        "radius" => o.radius = Some(num(key, v)?),
        "budget" => o.budget = Some(num(key, v)?),
        "d0" => o.d0 = Some(num(key, v)?),
        "d1" => o.d1 = Some(num(key, v)?),
        "dconfig" => o.dconfig = Some(num(key, v)?),
        "depth" => o.depth = Some(num(key, v)?),
        "mk" => o.mk = Some(num(key, v)?),
        _ => return Err(CliError::Usage(format!("--sweep: unknown key {key:?}"))),
    }
    Ok(o)
}

