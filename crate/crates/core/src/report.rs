//! Check records and their aggregation.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckRecord {
    pub fn new(suite: &str, name: &str) -> Self {
        CheckRecord {
            suite: suite.into(),
            name: name.into(),
            params: BTreeMap::new(),
            status: Status::Pass,
            lhs: None,
            rhs: None,
            witness: None,
            elapsed_ms: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(v).expect("serializable"));
        self
    }

    pub fn values(mut self, lhs: impl Serialize, rhs: impl Serialize) -> Self {
        self.lhs = Some(serde_json::to_value(lhs).expect("serializable"));
        self.rhs = Some(serde_json::to_value(rhs).expect("serializable"));
        self
    }

    /// Sets the status from `ok`; a failure without a witness gets the values as witness.
    pub fn outcome(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        if !ok && self.witness.is_none() {
            self.witness = Some(serde_json::json!({ "lhs": self.lhs, "rhs": self.rhs }));
        }
        self
    }

    pub fn fail_with(mut self, witness: impl Serialize) -> Self {
        self.status = Status::Fail;
        self.witness = Some(serde_json::to_value(witness).expect("serializable"));
        self
    }

    pub fn skipped(mut self, reason: &str) -> Self {
        self.status = Status::Skipped;
        self.witness = Some(Value::String(reason.into()));
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    fn sort_key(&self) -> (String, String, String) {
        (self.suite.clone(), self.name.clone(), serde_json::to_string(&self.params).unwrap_or_default())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(mut records: Vec<CheckRecord>) -> Self {
        records.sort_by_key(CheckRecord::sort_key);
        let mut summary = Summary { total: records.len(), ..Default::default() };
        for r in &records {
            match r.status {
                Status::Pass => summary.passed += 1,
                Status::Fail => summary.failed += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Report { records, summary }
    }

    pub fn merge(reports: impl IntoIterator<Item = Report>) -> Self {
        Report::new(reports.into_iter().flat_map(|r| r.records).collect())
    }

    pub fn ok(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.status == Status::Fail)
    }

    pub fn strip_timings(&mut self) {
        for r in &mut self.records {
            r.elapsed_ms = None;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Runs `f` and stamps the elapsed time on every record it returns.
pub fn timed(f: impl FnOnce() -> Vec<CheckRecord>) -> Vec<CheckRecord> {
    let start = Instant::now();
    let mut out = f();
    let ms = start.elapsed().as_millis() as u64;
    for r in &mut out {
        r.elapsed_ms.get_or_insert(ms);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_and_order() {
        let a = CheckRecord::new("b", "x").param("m", 1).values("1", "1").outcome(true);
        let b = CheckRecord::new("a", "x").param("m", 2).values("1", "2").outcome(false);
        let rep = Report::new(vec![a, b]);
        assert_eq!(rep.records[0].suite, "a");
        assert_eq!(rep.summary, Summary { total: 2, passed: 1, failed: 1, skipped: 0 });
        assert!(rep.first_failure().unwrap().witness.is_some());
        assert!(!rep.ok());
    }
}
