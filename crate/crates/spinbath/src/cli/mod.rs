//! Command-line interface: argument/config parsing, dispatch, and
//! CSV/JSON/SVG serialization.

pub mod config;
pub mod envelope;
pub mod plot;
pub mod run;

pub use config::{parse_and_validate, parse_config_text, CommandKind, OutputFormat, RunConfig};
pub use envelope::{Cell, Column, ResultEnvelope};
pub use plot::emit_plot;
pub use run::run;

use crate::Result;

/// Full pipeline: parse argv, run, serialize to the requested sink.
/// Returns the rendered output when it went to stdout.
pub fn main_from_args<I, T>(argv: I) -> Result<Option<String>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = parse_and_validate(argv)?;
    let env = run(&config)?;
    let format = config.format.unwrap_or(OutputFormat::Csv);
    let rendered = match format {
        OutputFormat::Csv => env.to_csv(),
        OutputFormat::Json => env.to_json()?,
        OutputFormat::Svg => emit_plot(&env)?,
    };
    match &config.out {
        Some(path) => {
            std::fs::write(path, rendered.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(rendered)),
    }
}
