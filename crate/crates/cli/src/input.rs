use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use quatpoly::PolygonConfig;

use crate::commands::{BendData, SampleData};
use crate::error::{CliError, CliResult};
use crate::table;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn parse<D: DeserializeOwned>(v: Value, what: &str) -> CliResult<D> {
    serde_json::from_value(v).map_err(|e| CliError::usage(format!("invalid {what}: {e}")))
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::usage(format!("{} is not JSON: {e}", path.display())))
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Polygons from a single polygon, an array of polygons, a `sample` or
/// `bend` artifact, or a `sample` CSV table.
pub fn load_polygons(path: &Path) -> CliResult<Vec<PolygonConfig<f64>>> {
    if is_csv(path) {
        return Ok(table::read_sample_csv(&read_text(path)?)?.data.polygons);
    }
    polygons_from_value(read_json(path)?)
}

pub fn polygons_from_value(v: Value) -> CliResult<Vec<PolygonConfig<f64>>> {
    if v.is_array() {
        return parse(v, "polygon list");
    }
    match v.get("command").and_then(Value::as_str) {
        Some("sample") => Ok(parse::<SampleData>(v["data"].clone(), "sample artifact")?.polygons),
        Some("bend") => Ok(vec![
            parse::<BendData>(v["data"].clone(), "bend artifact")?.polygon,
        ]),
        Some(other) => Err(CliError::usage(format!(
            "a `{other}` artifact holds no polygons"
        ))),
        None => Ok(vec![parse(v, "polygon")?]),
    }
}
