//! CSV and JSON rendering. JSON records carry the same fields as the CSV rows.

use serde::Serialize;

use crate::config::Format;
use crate::CliError;

/// Renders `rows` as a CSV table with a header, or as a JSON array.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(rows).map_err(|e| CliError::Output(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

/// Two tables. CSV keeps them apart; JSON returns one object holding both,
/// as `{"pixels": [...], "discs": [...]}`, in the first string.
pub fn render_sections<A: Serialize, B: Serialize>(
    pixels: &[A],
    discs: &[B],
    format: Format,
) -> Result<(String, String), CliError> {
    match format {
        Format::Csv => Ok((render(pixels, format)?, render(discs, format)?)),
        Format::Json => {
            #[derive(Serialize)]
            struct Both<'a, A, B> {
                pixels: &'a [A],
                discs: &'a [B],
            }
            let mut text = serde_json::to_string_pretty(&Both { pixels, discs })
                .map_err(|e| CliError::Output(e.to_string()))?;
            text.push('\n');
            Ok((text, String::new()))
        }
    }
}
