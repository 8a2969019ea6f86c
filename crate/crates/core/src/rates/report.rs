use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dstar::{tradeoff_curve, TradeoffPoint};
use super::mirror::psi2_optimizer_oracle;
use super::psi::{
    cycle_expectation_bound_check, psi2_closed_form, psi2_collision_form, psi2_trace, psi_k_trace, CycleMargin,
    MethodTag, PsiK,
};
use crate::distances::DistortionMeasure;
use crate::entropy::{collision_entropy, shannon_entropy};
use crate::error::{Error, Result};
use crate::io::{ext_f64, write_provenance, TOOL_VERSION};
use crate::model::SourceSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedValue {
    pub method: MethodTag,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct RateOptions {
    pub k_max: usize,
    pub deltas: Vec<f64>,
    /// Run the mirror-descent oracle at this tolerance.
    pub oracle_tol: Option<f64>,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            k_max: 8,
            deltas: (0..=10).map(|i| i as f64 / 10.0).collect(),
            oracle_tol: Some(1e-12),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateReport {
    pub psi2: f64,
    pub psi2_paths: Vec<TaggedValue>,
    pub psi_k: Vec<PsiK>,
    pub cycle_margins: Vec<CycleMargin>,
    #[serde(with = "ext_f64")]
    pub beta_threshold: f64,
    pub shannon_entropy: f64,
    pub collision_entropy: f64,
    /// `psi_2 < H_2(P_X) / 2`: the transposition lower bound applies.
    pub collision_condition: bool,
    pub tradeoff: Vec<TradeoffPoint>,
}

pub fn rate_report(spec: &SourceSpec, measure: &DistortionMeasure, opts: &RateOptions) -> Result<RateReport> {
    let psi2 = psi2_closed_form(spec)?;
    let mut paths = vec![
        TaggedValue {
            method: MethodTag::ClosedForm,
            value: psi2,
        },
        TaggedValue {
            method: MethodTag::CollisionForm,
            value: psi2_collision_form(spec)?,
        },
        TaggedValue {
            method: MethodTag::Trace,
            value: psi2_trace(spec)?,
        },
    ];
    if let Some(tol) = opts.oracle_tol {
        paths.push(TaggedValue {
            method: MethodTag::Optimizer,
            value: psi2_optimizer_oracle(spec, tol)?.value,
        });
    }
    let psi_k = (2..=opts.k_max.max(2))
        .map(|k| psi_k_trace(spec, k))
        .collect::<Result<Vec<_>>>()?;
    let cycle_margins = cycle_expectation_bound_check(spec, opts.k_max.max(2))?;
    let h2 = collision_entropy(spec.p_x());
    Ok(RateReport {
        psi2,
        psi2_paths: paths,
        psi_k,
        cycle_margins,
        beta_threshold: 1.0 / psi2,
        shannon_entropy: shannon_entropy(spec.p_x()),
        collision_entropy: h2,
        collision_condition: psi2 < 0.5 * h2,
        tradeoff: tradeoff_curve(spec, measure, &opts.deltas)?,
    })
}

impl RateReport {
    /// Flat rows `(quantity, parameter, value, method)`.
    pub fn rows(&self) -> Vec<(String, String, f64, &'static str)> {
        let mut rows = Vec::new();
        for p in &self.psi2_paths {
            rows.push(("psi2".into(), String::new(), p.value, p.method.as_str()));
        }
        for p in &self.psi_k {
            rows.push(("psi_k".into(), format!("K={}", p.k), p.value, p.method.as_str()));
        }
        for m in &self.cycle_margins {
            rows.push((
                "cycle_margin".into(),
                format!("K={}", m.k),
                m.margin,
                MethodTag::Trace.as_str(),
            ));
        }
        rows.push((
            "beta_threshold".into(),
            String::new(),
            self.beta_threshold,
            MethodTag::ClosedForm.as_str(),
        ));
        rows.push((
            "entropy".into(),
            String::new(),
            self.shannon_entropy,
            MethodTag::ClosedForm.as_str(),
        ));
        rows.push((
            "collision_entropy".into(),
            String::new(),
            self.collision_entropy,
            MethodTag::ClosedForm.as_str(),
        ));
        for t in &self.tradeoff {
            rows.push((
                "d_star".into(),
                format!("delta={}", t.delta),
                t.d_star,
                t.method.as_str(),
            ));
            rows.push((
                "xi_min".into(),
                format!("delta={}", t.delta),
                t.xi_min,
                t.method.as_str(),
            ));
        }
        rows
    }

    pub fn write_csv(&self, path: &Path, provenance: &[String]) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        let mut out = BufWriter::new(file);
        write_provenance(&mut out, provenance)?;
        let wrap = |e| Error::io(format!("writing {}", path.display()), e);
        writeln!(out, "quantity,parameter,value,method").map_err(wrap)?;
        for (q, p, v, m) in self.rows() {
            writeln!(out, "{q},{p},{v},{m}").map_err(wrap)?;
        }
        out.flush().map_err(wrap)
    }

    pub fn write_json(&self, path: &Path, provenance: &[String]) -> Result<()> {
        let doc = serde_json::json!({
            "version": TOOL_VERSION,
            "config": provenance,
            "report": self,
        });
        let text = serde_json::to_string_pretty(&doc)?;
        std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelKernel, Pmf};

    #[test]
    fn report_for_bsc() {
        let spec = SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap();
        let r = rate_report(&spec, &DistortionMeasure::hamming(2), &RateOptions::default()).unwrap();
        assert!((r.psi2 - 0.192831).abs() < 1e-6);
        assert_eq!(r.beta_threshold, 1.0 / r.psi2);
        assert!((r.beta_threshold - 5.186).abs() < 1e-3);
        assert!(r.collision_condition);
        for p in &r.psi2_paths {
            assert!((p.value - r.psi2).abs() < 1e-8, "{:?}", p.method);
        }
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"inf\""), "delta = 0 has an infinite xi_min");
    }
}
