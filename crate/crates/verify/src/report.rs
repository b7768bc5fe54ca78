use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Present exactly when the check failed.
    pub witness: Option<String>,
}

/// Named pass/fail results plus measured quantities. Each check name appears
/// once; the first failure of a check is the one kept.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checks: Vec<Check>,
    pub measures: Vec<(String, String)>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    fn slot(&mut self, name: &str) -> &mut Check {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(Check { name: name.to_string(), pass: true, witness: None });
        self.checks.last_mut().unwrap()
    }

    /// Registers `name` as passing unless it already failed.
    pub fn pass(&mut self, name: &str) {
        self.slot(name);
    }

    pub fn fail(&mut self, name: &str, witness: impl Into<String>) {
        let c = self.slot(name);
        if c.pass {
            c.pass = false;
            c.witness = Some(witness.into());
        }
    }

    /// `pass` or `fail` depending on `ok`; the witness is built lazily.
    pub fn expect(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness());
        }
    }

    pub fn measure(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.measures.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.measures.push((key.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn measured(&self, key: &str) -> Option<&str> {
        self.measures.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| !c.pass)
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn merge(&mut self, prefix: &str, other: CheckReport) {
        for c in other.checks {
            let name = format!("{prefix}{}", c.name);
            match c.witness {
                Some(w) => self.fail(&name, w),
                None => self.pass(&name),
            }
        }
        for (k, v) in other.measures {
            self.measure(&format!("{prefix}{k}"), v);
        }
    }

    /// `check.<name>=pass|fail`, `witness.<name>=...`, `measure.<key>=...`,
    /// then `status=pass|fail`.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "check.{}={}", c.name, if c.pass { "pass" } else { "fail" });
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "witness.{}={}", c.name, w.replace('\n', " | "));
            }
        }
        for (k, v) in &self.measures {
            let _ = writeln!(out, "measure.{k}={v}");
        }
        let _ = writeln!(out, "status={}", if self.ok() { "pass" } else { "fail" });
        out
    }
}
