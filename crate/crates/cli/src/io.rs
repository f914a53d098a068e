use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use logskel::fixtures;
use logskel::logstructure::Pair;
use logskel::polyhedra::Fan;
use logskel::weights::Form;

use crate::CliError;

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_VAR: &str = "LOGSKEL_OUT_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("example_pair", fixtures::EXAMPLE_PAIR),
    ("example_form", fixtures::EXAMPLE_FORM),
    ("example_pair_trivial", fixtures::EXAMPLE_PAIR_TRIVIAL),
    ("example_form_trivial", fixtures::EXAMPLE_FORM_TRIVIAL),
    ("dwork_pair", fixtures::DWORK_PAIR),
    ("dwork_form", fixtures::DWORK_FORM),
    ("dwork_pair_dvf", fixtures::DWORK_PAIR_DVF),
    ("dwork_form_dvf", fixtures::DWORK_FORM_DVF),
    ("dwork_slice", fixtures::DWORK_SLICE),
    ("a2_pair", fixtures::A2_PAIR),
    ("a2_forms", fixtures::A2_FORMS),
    ("p2_fan", fixtures::P2_FAN),
    ("p1_fan", fixtures::P1_FAN),
    ("tate_sweep", fixtures::TATE_SWEEP),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|(n, _)| *n).collect()
}

/// Reads a file, or a bundled fixture given as `fixture:<name>`.
pub fn read_input(spec: &str) -> Result<String, CliError> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s.to_string())
            .ok_or_else(|| CliError::Input(format!("unknown fixture {name:?}; known: {}", bundled_names().join(", "))));
    }
    fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

fn parse_json(spec: &str, text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

pub fn load_pair(spec: &str) -> Result<Pair, CliError> {
    Pair::from_json(&read_input(spec)?).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

pub fn load_fan(spec: &str) -> Result<Fan, CliError> {
    Fan::from_json(&read_input(spec)?).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

/// A form file, or one entry `<file>#<name>` of a file holding `{"forms": {name: form}}`.
pub fn load_form(pair: &Pair, spec: &str) -> Result<Form, CliError> {
    let (path, name) = match spec.rsplit_once('#') {
        Some((p, n)) => (p, Some(n)),
        None => (spec, None),
    };
    let v = parse_json(path, &read_input(path)?)?;
    let body = match (v.get("forms"), name) {
        (Some(forms), Some(n)) => forms.get(n).ok_or_else(|| CliError::Input(format!("{path}: no form named {n:?}")))?,
        (Some(_), None) => return Err(CliError::Input(format!("{path} holds several forms; select one with {path}#<name>"))),
        (None, _) => &v,
    };
    Form::from_value(pair, body).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

pub fn load_value(spec: &str) -> Result<Value, CliError> {
    parse_json(spec, &read_input(spec)?)
}

/// Relative paths are taken inside `$LOGSKEL_OUT_DIR` when it is set.
pub fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

pub fn write_file(p: &Path, contents: &str) -> Result<(), CliError> {
    let path = output_path(p);
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Adds the schema tag; keys come out sorted because `serde_json` maps are ordered.
pub fn render(mut report: Value) -> String {
    if let Value::Object(m) = &mut report {
        m.insert("schema".into(), json!("1"));
    }
    let mut s = serde_json::to_string_pretty(&report).expect("JSON values always serialize");
    s.push('\n');
    s
}
