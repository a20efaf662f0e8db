use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::gog::{GraphOfGroups, GroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Configured,
    Measured,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub value: Value,
    pub provenance: Provenance,
    pub note: String,
}

/// Named constants with their provenance. Reports cite entries by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConstantsLedger {
    entries: BTreeMap<String, LedgerEntry>,
}

impl ConstantsLedger {
    /// Seeds `delta_<vertex>`: 0 for free vertex groups (trees), the Cayley
    /// diameter for finite ones.
    pub fn for_gog(gog: &GraphOfGroups) -> Self {
        let mut l = ConstantsLedger::default();
        for v in 0..gog.vertex_count() {
            let d = match gog.vgroup(v) {
                GroupSpec::Free(_) => 0,
                GroupSpec::Finite { table, .. } => usize::from(table.order() > 1),
            };
            l.record(
                &format!("delta_{}", gog.vertex_name(v)),
                d,
                Provenance::Computed,
                "hyperbolicity constant of the vertex space",
            );
        }
        l
    }

    pub fn record(&mut self, name: &str, value: impl Serialize, provenance: Provenance, note: &str) {
        let value = serde_json::to_value(value).expect("ledger values serialize");
        self.entries.insert(name.to_string(), LedgerEntry { value, provenance, note: note.to_string() });
    }

    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.get(name)
    }

    pub fn entries(&self) -> &BTreeMap<String, LedgerEntry> {
        &self.entries
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(&self.entries).expect("ledger serializes")
    }
}
