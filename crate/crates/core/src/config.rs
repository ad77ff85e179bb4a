//! JSON configuration files.
//!
//! A spectrum file has `nodes`, a cosine file has `cosine`; both share the
//! optional `basis`. Basis values and decimal coefficients are strings so no
//! digits are lost to `f64` parsing.

use serde::{Deserialize, Serialize};

use crate::angle::{AngleSpec, BasisDecl};
use crate::error::{Error, Result};
use crate::precision;
use crate::spectrum::{Coefficient, CosineConfig, CosineTerm, Node, SpectrumConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    pub value: String,
}

/// `b` as `[re, im]` or as an exact decimal or `p/q` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Complex([f64; 2]),
    Exact(String),
}

/// A real cosine coefficient, as a JSON number or a decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Number(f64),
    Decimal(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub b: CoefficientSpec,
    pub angle: AngleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineSpec {
    pub b: RealSpec,
    pub alpha: AngleSpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<NodeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosine: Option<Vec<CosineSpec>>,
}

#[derive(Debug, Clone)]
pub enum Config {
    Spectrum(SpectrumConfig),
    Cosine(CosineConfig),
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let path = path.into();
    move |e| match e {
        Error::Config { .. } => e,
        other => Error::Config { path, message: other.to_string() },
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = match inner.classify() {
                serde_json::error::Category::Data => inner.to_string(),
                _ => format!("malformed JSON: {inner}"),
            };
            Error::Config { path: if path == "." { "$".into() } else { path }, message }
        })
    }

    pub fn basis_decl(&self) -> Result<BasisDecl> {
        for (i, entry) in self.basis.iter().enumerate() {
            precision::parse_decimal(&entry.value).map_err(at(format!("basis[{i}].value")))?;
        }
        BasisDecl::new(self.basis.iter().map(|e| (e.label.clone(), e.value.clone()))).map_err(at("basis"))
    }

    pub fn build(&self) -> Result<Config> {
        let basis = self.basis_decl()?;
        match (&self.nodes, &self.cosine) {
            (Some(nodes), None) => {
                let mut out = Vec::with_capacity(nodes.len());
                for (j, node) in nodes.iter().enumerate() {
                    let b = coefficient(&node.b).map_err(at(format!("nodes[{j}].b")))?;
                    let angle = node.angle.to_angle(&basis).map_err(at(format!("nodes[{j}].angle")))?;
                    out.push(Node::new(b, angle));
                }
                SpectrumConfig::new(basis, out).map(Config::Spectrum).map_err(at("nodes"))
            }
            (None, Some(terms)) => {
                let mut out = Vec::with_capacity(terms.len());
                for (j, term) in terms.iter().enumerate() {
                    let b = real(&term.b).map_err(at(format!("cosine[{j}].b")))?;
                    let alpha = term.alpha.to_angle(&basis).map_err(at(format!("cosine[{j}].alpha")))?;
                    out.push(CosineTerm { b, alpha });
                }
                CosineConfig::new(basis, out).map(Config::Cosine).map_err(at("cosine"))
            }
            (Some(_), Some(_)) => Err(Error::Config { path: "$".into(), message: "give either `nodes` or `cosine`, not both".into() }),
            (None, None) => Err(Error::Config { path: "$".into(), message: "missing field `nodes` or `cosine`".into() }),
        }
    }

    pub fn from_spectrum(cfg: &SpectrumConfig) -> Self {
        let nodes = cfg
            .nodes()
            .iter()
            .map(|n| NodeSpec { b: coefficient_spec(&n.b), angle: AngleSpec::from_angle(&n.angle) })
            .collect();
        Self { basis: basis_entries(cfg.basis()), nodes: Some(nodes), cosine: None }
    }

    pub fn from_cosine(cfg: &CosineConfig) -> Self {
        let terms = cfg
            .terms()
            .iter()
            .map(|t| CosineSpec { b: RealSpec::Number(t.b), alpha: AngleSpec::from_angle(&t.alpha) })
            .collect();
        Self { basis: basis_entries(cfg.basis()), nodes: None, cosine: Some(terms) }
    }
}

/// Parses and validates a configuration file's contents.
pub fn parse_config(text: &str) -> Result<Config> {
    ConfigFile::parse(text)?.build()
}

fn coefficient(spec: &CoefficientSpec) -> Result<Coefficient> {
    match spec {
        CoefficientSpec::Complex([re, im]) => {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::InvalidCoefficient("non-finite component".into()));
            }
            Ok(Coefficient::complex(*re, *im))
        }
        CoefficientSpec::Exact(text) => Ok(Coefficient::Rational(precision::parse_rational(text)?)),
    }
}

fn real(spec: &RealSpec) -> Result<f64> {
    match spec {
        RealSpec::Number(x) => Ok(*x),
        RealSpec::Decimal(text) => Ok(precision::rational_to_f64(&precision::parse_rational(text)?)),
    }
}

fn coefficient_spec(b: &Coefficient) -> CoefficientSpec {
    match b {
        Coefficient::Rational(r) if r.is_integer() => CoefficientSpec::Exact(r.numer().to_string()),
        Coefficient::Rational(r) => CoefficientSpec::Exact(format!("{}/{}", r.numer(), r.denom())),
        Coefficient::Complex(c) => CoefficientSpec::Complex([c.re, c.im]),
    }
}

fn basis_entries(basis: &BasisDecl) -> Vec<BasisEntry> {
    basis
        .labels()
        .iter()
        .zip(basis.literals())
        .map(|(label, value)| BasisEntry { label: label.clone(), value: value.clone() })
        .collect()
}
