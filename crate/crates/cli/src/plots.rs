//! CSV extraction from a run report for external plotting.

use serde_json::Value;

#[derive(Debug)]
pub enum PlotError {
    /// the report has no task with data for the requested section
    MissingSection(String),
    Malformed(String),
}

impl std::fmt::Display for PlotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlotError::MissingSection(s) => {
                write!(f, "report has no data for section `{s}`")
            }
            PlotError::Malformed(s) => write!(f, "malformed report: {s}"),
        }
    }
}

impl std::error::Error for PlotError {}

fn tasks_of_kind<'a>(report: &'a Value, kind: &str) -> Vec<&'a Value> {
    report["tasks"]
        .as_array()
        .map(|ts| {
            ts.iter()
                .filter(|t| t["kind"].as_str() == Some(kind))
                .collect()
        })
        .unwrap_or_default()
}

fn pick_task<'a>(
    report: &'a Value,
    kind: &str,
    task_name: Option<&str>,
    section: &str,
) -> Result<&'a Value, PlotError> {
    let tasks = tasks_of_kind(report, kind);
    let found = match task_name {
        Some(name) => tasks
            .into_iter()
            .find(|t| t["name"].as_str() == Some(name)),
        None => tasks.into_iter().next(),
    };
    found.ok_or_else(|| PlotError::MissingSection(section.to_string()))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

/// `df-ladder`: one row per attempted (A, η) pair of the search.
pub fn df_ladder_csv(report: &Value, task: Option<&str>) -> Result<String, PlotError> {
    let t = pick_task(report, "df_search", task, "df-ladder")?;
    let ladder = t["detail"]["ladder"]
        .as_array()
        .ok_or_else(|| PlotError::Malformed("df_search task has no ladder".into()))?;
    let mut out = String::from("A,eta,min_D,certified\n");
    for rung in ladder {
        out.push_str(&format!(
            "{},{},{},{}\n",
            num(&rung["A"]),
            num(&rung["eta"]),
            num(&rung["min_D"]),
            rung["certified"].as_bool().unwrap_or(false)
        ));
    }
    Ok(out)
}

/// `contact-ladder`: one row per δ-level of the approximation.
pub fn contact_ladder_csv(report: &Value, task: Option<&str>) -> Result<String, PlotError> {
    let t = pick_task(report, "contact_approx", task, "contact-ladder")?;
    let levels = t["detail"]["levels"]
        .as_array()
        .ok_or_else(|| PlotError::Malformed("contact_approx task has no levels".into()))?;
    let mut out = String::from("delta,contact_min,confoliation_min,c0_distance,c1_distance,critical\n");
    for l in levels {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(&l["delta"]),
            num(&l["contact_min_abs"]),
            num(&l["confoliation_min"]),
            num(&l["c0_distance"]),
            num(&l["c1_distance"]),
            l["critical"].as_bool().unwrap_or(false)
        ));
    }
    Ok(out)
}

/// `disc`: one row per grid node with the disc components.
pub fn disc_csv(report: &Value, task: Option<&str>) -> Result<String, PlotError> {
    let t = pick_task(report, "disc", task, "disc")?;
    let nodes = t["detail"]["nodes"]
        .as_array()
        .ok_or_else(|| PlotError::Malformed("disc task has no node dump".into()))?;
    let dim = nodes
        .first()
        .and_then(|n| n["z"].as_array())
        .map(|z| z.len())
        .unwrap_or(0);
    let mut out = String::from("r,theta");
    for k in 0..dim {
        out.push_str(&format!(",re_z{k},im_z{k}"));
    }
    out.push('\n');
    for node in nodes {
        out.push_str(&format!("{},{}", num(&node["r"]), num(&node["theta"])));
        if let Some(z) = node["z"].as_array() {
            for comp in z {
                out.push_str(&format!(",{},{}", num(&comp[0]), num(&comp[1])));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// `levi`: one row per compared sample of a Levi scan.
pub fn levi_csv(report: &Value, task: Option<&str>) -> Result<String, PlotError> {
    let t = pick_task(report, "levi_scan", task, "levi")?;
    let records = t["detail"]["records"]
        .as_array()
        .ok_or_else(|| PlotError::Malformed("levi_scan task has no records".into()))?;
    let mut out = String::from("l_direct,l_disc,gap\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            num(&r["l_direct"]),
            num(&r["l_disc"]),
            num(&r["gap"])
        ));
    }
    Ok(out)
}

pub fn emit(report: &Value, section: &str, task: Option<&str>) -> Result<String, PlotError> {
    match section {
        "df-ladder" => df_ladder_csv(report, task),
        "contact-ladder" => contact_ladder_csv(report, task),
        "disc" => disc_csv(report, task),
        "levi" => levi_csv(report, task),
        other => Err(PlotError::MissingSection(format!(
            "{other} (known: df-ladder, contact-ladder, disc, levi)"
        ))),
    }
}
