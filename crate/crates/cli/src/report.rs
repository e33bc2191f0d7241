use evoset_core::exact::{exact_mixing_times, spectrum, DistanceKind, MixingTime};
use evoset_core::verify::{dominance_harness, ChainAnalysis, HarnessOptions, SuiteChain};
use serde_json::{json, Map, Value};

use crate::{to_value, CliError};

fn mixing_value(t: MixingTime) -> Value {
    match t {
        MixingTime::Reached(t) => json!(t),
        MixingTime::NotReached(cap) => json!({ "not_reached_by": cap }),
    }
}

/// The `analyze` report and whether every dominance check passed.
pub fn analyze(
    chain: &SuiteChain,
    transforms: &[&str],
    eps: &[f64],
    t_max: usize,
    trials: usize,
    seed: u64,
) -> Result<(Value, bool), CliError> {
    let k = &chain.kernel;
    let a = ChainAnalysis::new(chain).map_err(CliError::analysis)?;
    let spec = spectrum(k).map_err(CliError::analysis)?;

    let mut mixing = Vec::new();
    let mut by_kind = Map::new();
    for kind in DistanceKind::ALL {
        let times = exact_mixing_times(k, kind, eps, t_max).map_err(CliError::analysis)?;
        by_kind.insert(
            kind.name().into(),
            Value::Array(times.into_iter().map(mixing_value).collect()),
        );
    }
    for (i, e) in eps.iter().enumerate() {
        let mut row = Map::new();
        row.insert("eps".into(), json!(e));
        for (name, times) in &by_kind {
            row.insert(name.clone(), times[i].clone());
        }
        mixing.push(Value::Object(row));
    }

    let bounds: Vec<Value> = eps.iter().map(|e| to_value(&a.bound_report(*e))).collect();

    let opts = HarnessOptions {
        eps: eps.to_vec(),
        evoset_trials: trials,
        seed,
        ..Default::default()
    };
    let table =
        dominance_harness(std::slice::from_ref(chain), &opts).map_err(CliError::analysis)?;
    let passed = table.passed();
    let checks: Value = serde_json::from_str(&table.to_json()).expect("harness JSON parses");

    let eigenvalues: Vec<Value> = spec
        .eigenvalues()
        .iter()
        .map(|z| json!([z.re, z.im]))
        .collect();
    let v = json!({
        "chain": {
            "name": chain.name,
            "n": k.n(),
            "family": a.family,
            "lazy": a.lazy,
            "expanding": a.expanding,
            "transforms": transforms,
        },
        "stationary": a.pi,
        "spectrum": {
            "eigenvalues": eigenvalues,
            "residual": spec.residual(),
            "second_modulus": a.second_modulus,
            "eigen_gap": a.eigen_gap,
        },
        "spectral_gap": a.spectral_gap,
        "isoperimetry": {
            "summary": to_value(&a.summary),
            "psi_min_all": a.psi_min_all,
            "psi_min_all_reversed": a.psi_min_all_reversed,
            "c_sin": a.c_sin,
        },
        "mixing": mixing,
        "t_max": t_max,
        "bounds": bounds,
        "checks": checks,
        "passed": passed,
    });
    Ok((v, passed))
}
