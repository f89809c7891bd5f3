//! Bundled example models and their expected verdicts.
//!
//! Every model under `corpus/` is compiled into the crate. `manifest.toml`
//! lists cause queries (`[[case]]`) and conservative-extension checks
//! (`[[pair]]`); [`verify_corpus`] runs them and reports each outcome.

use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::causality::{
    check_ac2a, check_ac2b, is_actual_cause, CandidateCause, ModelRef, RuleVariant, Witness,
};
use crate::dsl::{self, ModelDocument};
use crate::error::{Error, Result};
use crate::model::Value;
use crate::transforms::{is_conservative_extension, is_conservative_extension_extended};

macro_rules! corpus_files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name, ".cm")))),*]
    };
}

static MODELS: &[(&str, &str)] = corpus_files![
    "bogus_naive",
    "bogus_normality",
    "bogus_pn",
    "glymour_mechanism",
    "glymour_naive",
    "glymour_second_story",
    "hall_m",
    "hall_m_prime",
    "hopkins_pearl",
    "hopkins_pearl_e",
    "livengood_17_2_0",
    "livengood_5_2_0",
    "livengood_naive",
    "livengood_normality",
    "livengood_preferences",
    "rock_throwing",
    "rock_throwing_cheating",
    "rock_throwing_naive",
    "scanner_m",
    "scanner_m1",
    "scanner_m2",
    "spohn_de",
    "spohn_de_prime",
    "spohn_naive",
    "stability_0",
    "stability_1",
    "stability_2",
    "stability_3",
    "stability_4",
    "stability_5",
    "weslake_naive",
    "weslake_not",
    "weslake_two",
];

static MANIFEST: &str = include_str!("../corpus/manifest.toml");

/// Names of the bundled models, sorted.
pub fn model_names() -> impl Iterator<Item = &'static str> {
    MODELS.iter().map(|(n, _)| *n)
}

/// Source text of a bundled model.
pub fn model_source(name: &str) -> Option<&'static str> {
    MODELS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load_model(name: &str) -> Result<ModelDocument> {
    let src =
        model_source(name).ok_or_else(|| Error::Corpus(format!("no bundled model `{name}`")))?;
    dsl::parse_model(src)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Cause,
    NotCause,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusCase {
    pub id: String,
    pub model: String,
    pub context: String,
    pub cause: String,
    pub effect: String,
    pub variant: String,
    pub expect: Expect,
    pub note: String,
    #[serde(default)]
    pub slow: bool,
    /// When set, only this witness is checked (with `alt` as `x'`) instead
    /// of running the full search.
    pub contingency: Option<String>,
    pub alt: Option<Vec<Value>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectExtension {
    Conservative,
    NotConservative,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusPair {
    pub id: String,
    pub base: String,
    pub extension: String,
    pub expect: ExpectExtension,
    /// Also check condition CE on the declared normality orders.
    #[serde(default)]
    pub extended: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Manifest {
    #[serde(rename = "case")]
    pub cases: Vec<CorpusCase>,
    #[serde(rename = "pair")]
    pub pairs: Vec<CorpusPair>,
}

pub fn manifest() -> Result<Manifest> {
    toml::from_str(MANIFEST).map_err(|e| Error::Corpus(e.to_string()))
}

/// A parsed cause query.
#[derive(Debug, Clone)]
pub struct Query {
    pub doc: ModelDocument,
    pub cause: CandidateCause,
    pub effect: crate::formula::CausalFormula,
    pub variant: RuleVariant,
}

impl CorpusCase {
    pub fn query(&self) -> Result<Query> {
        Ok(Query {
            doc: load_model(&self.model)?,
            cause: dsl::parse_cause(&self.cause)?,
            effect: dsl::parse_formula(&self.effect)?,
            variant: self.variant.parse()?,
        })
    }

    fn run(&self) -> Result<bool> {
        let q = self.query()?;
        let ctx = q.doc.context(&self.context)?;
        let ext;
        let model: ModelRef = if q.variant == RuleVariant::Extended {
            ext = q.doc.extended()?;
            (&ext).into()
        } else {
            (&q.doc.model).into()
        };
        match (&self.contingency, &self.alt) {
            (Some(w), Some(alt)) => {
                let w = Witness::new(dsl::parse_assignments(w)?, alt.clone());
                Ok(check_ac2a(model, ctx, &q.cause, &q.effect, &w, q.variant)?
                    && check_ac2b(model, ctx, &q.cause, &q.effect, &w, q.variant)?)
            }
            (None, None) => {
                Ok(is_actual_cause(model, ctx, &q.cause, &q.effect, q.variant)?.is_cause)
            }
            _ => Err(Error::Corpus(format!(
                "case `{}` needs both `contingency` and `alt` or neither",
                self.id
            ))),
        }
    }
}

impl CorpusPair {
    fn run(&self) -> Result<bool> {
        let base = load_model(&self.base)?;
        let ext = load_model(&self.extension)?;
        let mut ok = is_conservative_extension(&ext.model, &base.model)?.is_conservative;
        if self.extended {
            ok &= is_conservative_extension_extended(&ext.extended()?, &base.extended()?)?
                .is_conservative;
        }
        Ok(ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub id: String,
    pub expected: String,
    /// The observed verdict, or `error: ...` when the engine failed.
    pub actual: String,
    pub passed: bool,
    pub elapsed: Duration,
}

fn report(id: String, expected: &str, outcome: Result<&str>, elapsed: Duration) -> CaseReport {
    let actual = match outcome {
        Ok(a) => a.to_string(),
        Err(e) => format!("error: {e}"),
    };
    CaseReport {
        passed: actual == expected,
        id,
        expected: expected.to_string(),
        actual,
        elapsed,
    }
}

/// Runs every case and pair, sorted by id. Pair ids are prefixed with
/// `extends/`. Slow cases are skipped unless `include_slow` is set.
pub fn verify_corpus(include_slow: bool) -> Result<Vec<CaseReport>> {
    let manifest = manifest()?;
    let mut out = Vec::new();
    for case in manifest.cases.iter().filter(|c| include_slow || !c.slow) {
        let start = Instant::now();
        let outcome = case.run().map(|c| if c { "cause" } else { "not-cause" });
        let expected = match case.expect {
            Expect::Cause => "cause",
            Expect::NotCause => "not-cause",
        };
        out.push(report(case.id.clone(), expected, outcome, start.elapsed()));
    }
    for pair in &manifest.pairs {
        let start = Instant::now();
        let outcome = pair.run().map(|c| {
            if c {
                "conservative"
            } else {
                "not-conservative"
            }
        });
        let expected = match pair.expect {
            ExpectExtension::Conservative => "conservative",
            ExpectExtension::NotConservative => "not-conservative",
        };
        out.push(report(
            format!("extends/{}", pair.id),
            expected,
            outcome,
            start.elapsed(),
        ));
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_parses_and_is_named_after_itself() {
        for name in model_names() {
            let doc = load_model(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(doc.model.name(), name);
        }
        let names: Vec<_> = model_names().collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn manifest_refers_to_bundled_models() {
        let m = manifest().unwrap();
        for c in &m.cases {
            let q = c.query().unwrap_or_else(|e| panic!("{}: {e}", c.id));
            q.doc.context(&c.context).unwrap();
        }
        for p in &m.pairs {
            load_model(&p.base).unwrap();
            load_model(&p.extension).unwrap();
        }
        let mut ids: Vec<_> = m.cases.iter().map(|c| &c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), m.cases.len());
    }
}
