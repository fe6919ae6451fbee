use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{csv_string, to_json, write_output, CliError, CliResult, ReportArgs};
use crate::io::SCHEMA_VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub eps: f64,
    pub conclusion: String,
}

/// The plot-ready part of one `diagnose` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub name: String,
    pub group: String,
    /// `(shell, sup tail)` per filtration step.
    pub tail_vs_shell: Vec<(u32, f64)>,
    pub p: Value,
    /// `(delta, omega)` over the mesh.
    pub omega_vs_delta: Vec<(f64, f64)>,
    pub verdicts: Vec<VerdictLine>,
}

fn field<'a>(v: &'a Value, path: &[&str]) -> Result<&'a Value, String> {
    let mut cur = v;
    for k in path {
        cur = cur.get(k).ok_or_else(|| format!("missing field {}", path.join(".")))?;
    }
    Ok(cur)
}

fn num(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("expected a number, found {v}"))
}

impl FamilySummary {
    pub fn from_diagnose(doc: &Value) -> Result<Self, String> {
        let name = field(doc, &["family", "name"])?
            .as_str()
            .ok_or("family.name is not a string")?;
        let group = field(doc, &["family", "group"])?
            .as_str()
            .ok_or("family.group is not a string")?;
        let d = field(doc, &["diagnosis"])?;
        let steps = field(d, &["decay", "steps"])?
            .as_array()
            .ok_or("decay.steps is not an array")?;
        let mut tail_vs_shell = Vec::with_capacity(steps.len());
        for s in steps {
            let shell = field(s, &["shell"])?.as_u64().ok_or("shell is not an integer")? as u32;
            tail_vs_shell.push((shell, num(field(s, &["sup_tail"])?)?));
        }
        let c = field(d, &["continuity"])?;
        let mesh = field(c, &["mesh"])?.as_array().ok_or("mesh is not an array")?;
        let omega = field(c, &["omega"])?.as_array().ok_or("omega is not an array")?;
        if mesh.len() != omega.len() {
            return Err("mesh and omega differ in length".into());
        }
        let omega_vs_delta = mesh
            .iter()
            .zip(omega)
            .map(|(a, b)| Ok((num(a)?, num(b)?)))
            .collect::<Result<_, String>>()?;
        let verdicts = field(d, &["verdicts"])?
            .as_array()
            .ok_or("verdicts is not an array")?
            .iter()
            .map(|v| {
                Ok(VerdictLine {
                    eps: num(field(v, &["eps"])?)?,
                    conclusion: field(v, &["conclusion"])?
                        .as_str()
                        .ok_or("conclusion is not a string")?
                        .to_string(),
                })
            })
            .collect::<Result<_, String>>()?;
        Ok(Self {
            name: name.to_string(),
            group: group.to_string(),
            tail_vs_shell,
            p: field(c, &["p"])?.clone(),
            omega_vs_delta,
            verdicts,
        })
    }
}

/// `(tail_vs_shell.csv, omega_vs_delta.csv)`.
pub fn tables(families: &[FamilySummary]) -> CliResult<(String, String)> {
    let mut tails = vec![["family", "group", "shell", "sup_tail"].map(String::from).to_vec()];
    let mut omega = vec![["family", "group", "p", "delta", "omega"].map(String::from).to_vec()];
    for f in families {
        for (s, t) in &f.tail_vs_shell {
            tails.push(vec![f.name.clone(), f.group.clone(), s.to_string(), t.to_string()]);
        }
        let p = match &f.p {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        for (d, w) in &f.omega_vs_delta {
            omega.push(vec![
                f.name.clone(),
                f.group.clone(),
                p.clone(),
                d.to_string(),
                w.to_string(),
            ]);
        }
    }
    Ok((csv_string(tails)?, csv_string(omega)?))
}

fn summaries_in(path: &Path) -> CliResult<Vec<FamilySummary>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let bad = |e: String| CliError::input(format!("{}: {e}", path.display()));
    match doc.get("command").and_then(Value::as_str) {
        Some("diagnose") => Ok(vec![FamilySummary::from_diagnose(&doc).map_err(bad)?]),
        Some("report") => {
            serde_json::from_value(field(&doc, &["families"]).map_err(bad)?.clone()).map_err(|e| bad(e.to_string()))
        }
        _ => Err(bad("not a diagnose or report output".into())),
    }
}

pub fn run(a: &ReportArgs, out: Option<&Path>) -> CliResult<u8> {
    if a.inputs.is_empty() {
        return Err(CliError::input("report needs at least one input file"));
    }
    let mut by_key = BTreeMap::new();
    for p in &a.inputs {
        for s in summaries_in(p)? {
            by_key.insert((s.name.clone(), s.group.clone()), s);
        }
    }
    let families: Vec<FamilySummary> = by_key.into_values().collect();
    let (tails, omega) = tables(&families)?;
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "command": "report",
        "config": {},
        "families": families,
    });
    let dir = out.unwrap_or(Path::new("."));
    write_output(dir, "tail_vs_shell.csv", &tails)?;
    write_output(dir, "omega_vs_delta.csv", &omega)?;
    write_output(dir, "report.json", &to_json(&doc)?)?;
    for f in &families {
        for v in &f.verdicts {
            println!("{} eps={}: {}", f.name, v.eps, v.conclusion);
        }
    }
    Ok(0)
}
