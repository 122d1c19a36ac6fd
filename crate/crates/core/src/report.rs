//! Report serialization: a plain-text table and a structured JSON form.
//!
//! Both outputs depend only on the report contents; check timings are never
//! written, so repeated runs on one manifest are byte-identical.

use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{Map, Value};

use crate::curvature::ScalarPanel;
use crate::error::{Error, Result};
use crate::manifest::{format_number, json_string};
use crate::norden::{ClassLabel, NordenClass};
use crate::suite::{CheckResult, CheckStatus, Diagnostics, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Structured,
}

pub fn emit_report(report: &VerificationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => to_text(report),
        ReportFormat::Structured => to_json(report),
    }
}

fn residual_text(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"))
}

pub fn to_text(report: &VerificationReport) -> String {
    let mut out = String::new();
    let label = &report.class_label;
    let _ = writeln!(out, "manifold  {}", report.manifold_id);
    let _ = writeln!(out, "class     {}", label.class);
    let _ = writeln!(
        out,
        "          |F| {:.3e}  W3 {:.3e}  JF-cyclic {:.3e}  twisted {:.3e}",
        label.f_norm, label.w3_residual, label.jf_cyclic_residual, label.twisted_symmetric_residual
    );
    let _ = writeln!(out, "suite     {}", report.suite_version);
    if let Some(panel) = &report.scalar_panel {
        out.push_str("\nscalars\n");
        for (name, value) in panel.entries() {
            let _ = writeln!(out, "  {name:<22} {value:>24.16e}");
        }
    }
    out.push_str("\ndiagnostics\n");
    let _ = writeln!(
        out,
        "  {:<22} {:>24.16e}",
        "tau_star_via_rho_star", report.diagnostics.tau_star_via_rho_star
    );
    let _ = writeln!(
        out,
        "  {:<22} {:>24.16e}",
        "assoc_sq_norm_outer", report.diagnostics.assoc_sq_norm_outer
    );

    let id_width = report.checks.iter().map(|c| c.check_id.len()).max().unwrap_or(5).max(5);
    let _ = writeln!(out, "\n{:<id_width$}  {:<6} {:>10}  anchor", "check", "status", "residual");
    for c in &report.checks {
        let _ = write!(
            out,
            "{:<id_width$}  {:<6} {:>10}  {}",
            c.check_id,
            c.status.label(),
            residual_text(c.residual),
            c.paper_anchor
        );
        if let CheckStatus::NotApplicable(reason) = &c.status {
            let _ = write!(out, "  [{reason}]");
        }
        out.push('\n');
    }
    let count = |s: &str| report.checks.iter().filter(|c| c.status.label() == s).count();
    let _ = writeln!(
        out,
        "\n{} PASS, {} FAIL, {} NA (tolerance {:e})",
        count("PASS"),
        count("FAIL"),
        count("NA"),
        report.checks.first().map_or(0.0, |c| c.tolerance)
    );
    out
}

fn num_or_null(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_string(), format_number)
}

pub fn to_json(report: &VerificationReport) -> String {
    let label = &report.class_label;
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"manifold_id\": {},", json_string(&report.manifold_id));
    let _ = writeln!(out, "  \"class\": {},", json_string(label.class.as_str()));
    let _ = writeln!(
        out,
        "  \"class_residuals\": {{\"f_norm\": {}, \"w3_residual\": {}, \"jf_cyclic_residual\": {}, \"twisted_symmetric_residual\": {}}},",
        format_number(label.f_norm),
        format_number(label.w3_residual),
        format_number(label.jf_cyclic_residual),
        format_number(label.twisted_symmetric_residual)
    );
    match &report.scalar_panel {
        Some(panel) => {
            let items: Vec<String> = panel
                .entries()
                .iter()
                .map(|(k, v)| format!("    \"{k}\": {}", format_number(*v)))
                .collect();
            let _ = writeln!(out, "  \"scalars\": {{\n{}\n  }},", items.join(",\n"));
        }
        None => out.push_str("  \"scalars\": null,\n"),
    }
    let _ = writeln!(
        out,
        "  \"diagnostics\": {{\"tau_star_via_rho_star\": {}, \"assoc_sq_norm_outer\": {}}},",
        format_number(report.diagnostics.tau_star_via_rho_star),
        format_number(report.diagnostics.assoc_sq_norm_outer)
    );
    out.push_str("  \"checks\": [\n");
    for (n, c) in report.checks.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"id\": {}, \"anchor\": {}, \"residual\": {}, \"tolerance\": {}, \"status\": {}",
            json_string(&c.check_id),
            json_string(&c.paper_anchor),
            num_or_null(c.residual),
            format_number(c.tolerance),
            json_string(c.status.label())
        );
        if let CheckStatus::NotApplicable(reason) = &c.status {
            let _ = write!(out, ", \"reason\": {}", json_string(reason));
        }
        out.push('}');
        out.push_str(if n + 1 < report.checks.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ],\n");
    let _ = writeln!(out, "  \"suite_version\": {}", json_string(&report.suite_version));
    out.push_str("}\n");
    out
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("report is missing {key:?}")))
}

fn get_f64(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    get(obj, key)?
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be a number")))
}

fn get_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str> {
    get(obj, key)?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be a string")))
}

fn get_obj<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Map<String, Value>> {
    get(obj, key)?
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{key:?} must be an object")))
}

/// Reads a structured report back. Timings come back as zero.
pub fn parse_report_json(text: &str) -> Result<VerificationReport> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let top = v
        .as_object()
        .ok_or_else(|| Error::Parse("report must be a JSON object".into()))?;

    let class_name = get_str(top, "class")?;
    let class = NordenClass::parse(class_name)
        .ok_or_else(|| Error::Parse(format!("unknown class {class_name:?}")))?;
    let cr = get_obj(top, "class_residuals")?;
    let class_label = ClassLabel {
        class,
        f_norm: get_f64(cr, "f_norm")?,
        w3_residual: get_f64(cr, "w3_residual")?,
        jf_cyclic_residual: get_f64(cr, "jf_cyclic_residual")?,
        twisted_symmetric_residual: get_f64(cr, "twisted_symmetric_residual")?,
    };

    let scalar_panel = match get(top, "scalars")? {
        Value::Null => None,
        Value::Object(s) => Some(
            ScalarPanel::from_entries(|k| s.get(k).and_then(Value::as_f64))
                .ok_or_else(|| Error::Parse("scalars must carry all ten entries".into()))?,
        ),
        _ => return Err(Error::Parse("scalars must be an object or null".into())),
    };

    let diag = get_obj(top, "diagnostics")?;
    let diagnostics = Diagnostics {
        tau_star_via_rho_star: get_f64(diag, "tau_star_via_rho_star")?,
        assoc_sq_norm_outer: get_f64(diag, "assoc_sq_norm_outer")?,
    };

    let checks = get(top, "checks")?
        .as_array()
        .ok_or_else(|| Error::Parse("checks must be an array".into()))?
        .iter()
        .map(|c| {
            let c = c
                .as_object()
                .ok_or_else(|| Error::Parse("each check must be an object".into()))?;
            let residual = match get(c, "residual")? {
                Value::Null => None,
                other => Some(
                    other
                        .as_f64()
                        .ok_or_else(|| Error::Parse("residual must be a number or null".into()))?,
                ),
            };
            let status = match get_str(c, "status")? {
                "PASS" => CheckStatus::Pass,
                "FAIL" => CheckStatus::Fail,
                "NA" => CheckStatus::NotApplicable(get_str(c, "reason")?.to_string()),
                other => return Err(Error::Parse(format!("unknown status {other:?}"))),
            };
            Ok(CheckResult {
                check_id: get_str(c, "id")?.to_string(),
                paper_anchor: get_str(c, "anchor")?.to_string(),
                residual,
                tolerance: get_f64(c, "tolerance")?,
                status,
                elapsed: Duration::ZERO,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(VerificationReport {
        manifold_id: get_str(top, "manifold_id")?.to_string(),
        class_label,
        scalar_panel,
        diagnostics,
        checks,
        suite_version: get_str(top, "suite_version")?.to_string(),
    })
}
