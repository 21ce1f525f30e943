use std::io::Write;

use anyhow::Context;
use dcscn_core::complexity::{builtin_spec, per_pixel_ops, report_table, spec_from_config, BUILTIN_NAMES};
use dcscn_core::model::{load_weights, param_count, ModelConfig};

use crate::{AnalyzeArgs, CliError, CliResult, InspectArgs};

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CliResult {
    let names: Vec<&str> =
        if args.names.is_empty() { BUILTIN_NAMES.to_vec() } else { args.names.iter().map(String::as_str).collect() };
    let specs = names
        .iter()
        .map(|n| builtin_spec(n).map_err(|e| CliError::usage(e.to_string())))
        .collect::<CliResult<Vec<_>>>()?;
    let table = report_table(&specs)?;
    let text = format!("{}{}", table.to_text(), table.to_records());
    out.write_all(text.as_bytes())?;
    if let Some(path) = &args.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn cmd_inspect(args: &InspectArgs, out: &mut dyn Write) -> CliResult {
    let (label, config) = match (&args.weights, &args.preset) {
        (Some(path), _) => {
            let p = load_weights::<f32>(path).map_err(|e| CliError::usage(e.to_string()))?;
            (path.display().to_string(), p.config)
        }
        (None, Some(name)) => (name.clone(), ModelConfig::preset(name, args.scale).map_err(|e| CliError::usage(e.to_string()))?),
        (None, None) => return Err(CliError::usage("give --weights or --preset")),
    };
    let counts = param_count(&config);
    let ops = per_pixel_ops(&spec_from_config(&label, &config));
    writeln!(
        out,
        "model={label} scale={} fe_filters={:?} a1={} b1={} b2={} feature_channels={}",
        config.scale,
        config.fe_filters,
        config.a1_filters,
        config.b1_filters,
        config.b2_filters,
        config.feature_channels()
    )?;
    writeln!(
        out,
        "weights={} biases={} prelu_slopes={} total={} ops_per_pixel={ops}",
        counts.weights,
        counts.biases,
        counts.prelu_slopes,
        counts.total()
    )?;
    Ok(())
}
