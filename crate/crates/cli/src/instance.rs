//! Instance files: DFA bundles, grid maps and annotated CNF.

use anyhow::{bail, Context, Result};
use improv_core::approx::{parse_dimacs, CnfInstanceJson, CnfSpec};
use improv_core::exact_scheme::{DfaInstance, DfaInstanceJson};
use improv_core::gridworld::GridInstanceJson;
use improv_core::lqci::LqciParams;
use serde_json::Value;

/// An instance file as written on disk. The kind is told apart by the key
/// holding the constraints: `hard`, `grid` or `cnf`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum InstanceFile {
    Dfa(DfaInstanceJson),
    Grid(GridInstanceJson),
    Cnf(CnfInstanceJson),
}

/// A loaded instance ready for the improvisation schemes.
#[derive(Debug, Clone)]
pub enum Instance {
    Dfa(DfaInstance),
    Cnf(CnfSpec, LqciParams),
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).context("instance is not valid JSON")?;
        let Some(obj) = value.as_object() else {
            bail!("instance must be a JSON object");
        };
        let file = if obj.contains_key("hard") {
            InstanceFile::Dfa(serde_json::from_value(value).context("invalid DFA instance")?)
        } else if obj.contains_key("grid") {
            InstanceFile::Grid(serde_json::from_value(value).context("invalid grid instance")?)
        } else if obj.contains_key("cnf") {
            InstanceFile::Cnf(serde_json::from_value(value).context("invalid CNF instance")?)
        } else {
            bail!("instance needs one of the keys `hard`, `grid` or `cnf`");
        };
        Ok(file)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Pretty-printed JSON with a trailing newline. Parsing the output and
    /// printing it again gives the same bytes.
    pub fn to_canonical_json(&self) -> String {
        let mut s = match self {
            InstanceFile::Dfa(x) => serde_json::to_string_pretty(x),
            InstanceFile::Grid(x) => serde_json::to_string_pretty(x),
            InstanceFile::Cnf(x) => serde_json::to_string_pretty(x),
        }
        .expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn params(&self) -> &LqciParams {
        match self {
            InstanceFile::Dfa(x) => &x.params,
            InstanceFile::Grid(x) => &x.params,
            InstanceFile::Cnf(x) => &x.params,
        }
    }

    pub fn load(&self) -> Result<Instance> {
        Ok(match self {
            InstanceFile::Dfa(x) => Instance::Dfa(x.to_instance()?),
            InstanceFile::Grid(x) => Instance::Dfa(x.to_instance()?),
            InstanceFile::Cnf(x) => {
                let spec = parse_dimacs(&x.cnf)?;
                spec.validate()?;
                x.params.validate()?;
                if spec.labels != x.params.num_labels() {
                    bail!(
                        "CNF declares {} labels but bounds are given for {}",
                        spec.labels,
                        x.params.num_labels()
                    );
                }
                Instance::Cnf(spec, x.params.clone())
            }
        })
    }
}

impl Instance {
    pub fn params(&self) -> &LqciParams {
        match self {
            Instance::Dfa(d) => &d.params,
            Instance::Cnf(_, p) => p,
        }
    }
}
