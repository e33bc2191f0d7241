use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    TauTv,
    TauLinf,
    TauL2,
    TauEntropy,
    /// Lower bound on `min_{i != 0} 1 - |lambda_i|`.
    EigenGap,
    /// Lower bound on the spectral gap of `(P + P*)/2`.
    SpectralGap,
}

impl Quantity {
    pub fn is_mixing_time(self) -> bool {
        matches!(
            self,
            Self::TauTv | Self::TauLinf | Self::TauL2 | Self::TauEntropy
        )
    }
}

/// Which family of results an entry comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Geometric decay at the measured sin-congestion rate.
    CongestionContraction,
    /// Capped Psi, subset-measure gap and minimum cut.
    IsoperimetricGeneral,
    /// Closed forms for the simple walk on an Eulerian graph.
    EulerianSimpleWalk,
    /// Closed forms for the max-degree walk on an Eulerian graph.
    EulerianMaxDegreeWalk,
    /// Integrals of the measured congestion profile.
    EvolvingSetIntegral,
    /// Closed forms in `Psi_min * A_max`.
    PsiDeltaProduct,
    /// L-infinity from the L2 bounds of the chain and its reversal.
    ReversalComposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub source: BoundSource,
    pub quantity: Quantity,
    /// `+inf` (serialized as `null`) when the bound is vacuous.
    #[serde(
        serialize_with = "finite_or_null",
        deserialize_with = "null_as_infinity"
    )]
    pub value: f64,
    /// Asymptotic approximation; never used for dominance checks.
    pub informational: bool,
    /// A side condition could not be confirmed; see `note`.
    pub conditional: bool,
    pub inputs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundEntry {
    pub fn new(source: BoundSource, quantity: Quantity, value: f64) -> Self {
        Self {
            source,
            quantity,
            value,
            informational: false,
            conditional: false,
            inputs: BTreeMap::new(),
            note: None,
        }
    }

    pub fn input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn conditional(mut self, why: impl Into<String>) -> Self {
        self.conditional = true;
        self.note = Some(why.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_vacuous(&self) -> bool {
        !self.value.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub chain: String,
    pub eps: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn new(chain: impl Into<String>, eps: f64) -> Self {
        Self {
            chain: chain.into(),
            eps,
            entries: Vec::new(),
        }
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = BoundEntry>) {
        self.entries.extend(entries);
    }

    /// Non-informational entries for one quantity.
    pub fn applicable(&self, q: Quantity) -> impl Iterator<Item = &BoundEntry> {
        self.entries
            .iter()
            .filter(move |e| e.quantity == q && !e.informational)
    }

    /// Tightest non-informational bound: smallest for mixing times, largest
    /// for gaps.
    pub fn best(&self, q: Quantity) -> Option<&BoundEntry> {
        let cmp = |a: &&BoundEntry, b: &&BoundEntry| a.value.partial_cmp(&b.value).unwrap();
        if q.is_mixing_time() {
            self.applicable(q).min_by(cmp)
        } else {
            self.applicable(q).max_by(cmp)
        }
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_as_infinity<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}
