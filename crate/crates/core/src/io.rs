//! JSON game files and worst-case configuration files.
//!
//! Every number may be written as a JSON number or as a string (`"3/4"`,
//! `"0.1"`); values are kept exact until converted to the working scalar.

use std::collections::HashMap;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::formulations::WorstCaseConfig;
use crate::game::{BasisFunction, BasisKind, CongestionModel, GeneralizedGame, SocialKind, SocialSpec};
use crate::representative::RepresentativeModel;
use crate::scalar::{identity, Number, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKindName {
    Monomial,
    Indicator,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub kind: BasisKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<(Number, Number)>>,
}

impl BasisEntry {
    pub fn to_basis<S: Scalar>(&self) -> Result<BasisFunction<S>> {
        let f = match self.kind {
            BasisKindName::Monomial => BasisFunction::monomial(self.degree.unwrap_or(1)),
            BasisKindName::Indicator => BasisFunction::indicator(),
            BasisKindName::Table => {
                let entries = self
                    .table
                    .as_ref()
                    .ok_or_else(|| invalid!("table basis function without `table`"))?;
                BasisFunction::table(entries.iter().map(|(x, y)| (x.get(), y.get())).collect())
            }
        };
        f.validate()?;
        Ok(f)
    }

    pub fn from_basis<S: Scalar>(f: &BasisFunction<S>) -> Self {
        match &f.kind {
            BasisKind::Monomial(d) => BasisEntry { kind: BasisKindName::Monomial, degree: Some(*d), table: None },
            BasisKind::Indicator => BasisEntry { kind: BasisKindName::Indicator, degree: None, table: None },
            BasisKind::Table(entries) => BasisEntry {
                kind: BasisKindName::Table,
                degree: None,
                table: Some(
                    entries
                        .iter()
                        .map(|(x, y)| (Number::from_scalar(x), Number::from_scalar(y)))
                        .collect(),
                ),
            },
        }
    }
}

fn default_basis() -> Vec<BasisEntry> {
    vec![BasisEntry { kind: BasisKindName::Monomial, degree: Some(1), table: None }]
}

fn numbers<S: Scalar>(v: &[Number]) -> Vec<S> {
    v.iter().map(Number::get).collect()
}

fn matrix<S: Scalar>(m: &[Vec<Number>]) -> Vec<Vec<S>> {
    m.iter().map(|r| numbers(r)).collect()
}

fn to_numbers<S: Scalar>(v: &[S]) -> Vec<Number> {
    v.iter().map(Number::from_scalar).collect()
}

fn to_matrix<S: Scalar>(m: &[Vec<S>]) -> Vec<Vec<Number>> {
    m.iter().map(|r| to_numbers(r)).collect()
}

fn basis_of<S: Scalar>(entries: &[BasisEntry]) -> Result<Vec<BasisFunction<S>>> {
    if entries.is_empty() {
        return Err(invalid!("basis is empty"));
    }
    entries.iter().map(BasisEntry::to_basis).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    pub weights: Vec<Number>,
    pub resources: Vec<String>,
    /// Per player, per strategy: resource ids.
    pub strategies: Vec<Vec<Vec<String>>>,
    #[serde(default = "default_basis")]
    pub basis: Vec<BasisEntry>,
    /// Per resource, one coefficient per basis function. Absent in skeletons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Number>,
}

impl GameFile {
    pub fn model<S: Scalar>(&self) -> Result<CongestionModel<S>> {
        if self.weights.len() != self.n {
            return Err(invalid!("n is {} but {} weights are given", self.n, self.weights.len()));
        }
        let ids: HashMap<&str, usize> = self.resources.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
        let index = |id: &String| {
            ids.get(id.as_str())
                .copied()
                .ok_or_else(|| invalid!("unknown resource id `{id}`"))
        };
        let strategies = self
            .strategies
            .iter()
            .map(|set| {
                set.iter()
                    .map(|s| s.iter().map(index).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        CongestionModel::new(numbers(&self.weights), self.resources.clone(), strategies)
    }

    pub fn game<S: Scalar>(&self) -> Result<GeneralizedGame<S>> {
        let model = self.model()?;
        let coefficients = self
            .coefficients
            .as_ref()
            .ok_or_else(|| invalid!("game file has no coefficients"))?;
        let alpha = self.alpha.as_ref().map_or_else(|| identity(self.n), |a| matrix(a));
        GeneralizedGame::new(model, basis_of(&self.basis)?, matrix(coefficients), alpha)
    }

    /// The file's beta (identity when absent) under `kind`.
    pub fn spec<S: Scalar>(&self, kind: SocialKind) -> Result<SocialSpec<S>> {
        match &self.beta {
            Some(b) => SocialSpec::new(kind, matrix(b)),
            None => Ok(SocialSpec::identity(kind, self.n)),
        }
    }

    pub fn epsilon<S: Scalar>(&self) -> Option<S> {
        self.epsilon.as_ref().map(Number::get)
    }

    pub fn from_game<S: Scalar>(game: &GeneralizedGame<S>, beta: Option<&[Vec<S>]>, epsilon: Option<&S>) -> Self {
        let mut file = Self::from_model(game.model(), game.basis());
        file.coefficients = Some(to_matrix(game.coefficients()));
        file.alpha = Some(to_matrix(game.alpha()));
        file.beta = beta.map(to_matrix);
        file.epsilon = epsilon.map(Number::from_scalar);
        file
    }

    /// A skeleton without coefficients.
    pub fn from_model<S: Scalar>(model: &CongestionModel<S>, basis: &[BasisFunction<S>]) -> Self {
        let ids = model.resources();
        GameFile {
            n: model.n(),
            weights: to_numbers(model.weights()),
            resources: ids.to_vec(),
            strategies: (0..model.n())
                .map(|i| {
                    model
                        .strategies(i)
                        .iter()
                        .map(|s| s.iter().map(|&e| ids[e].clone()).collect())
                        .collect()
                })
                .collect(),
            basis: basis.iter().map(BasisEntry::from_basis).collect(),
            coefficients: None,
            alpha: None,
            beta: None,
            epsilon: None,
        }
    }

    pub fn representative_skeleton<S: Scalar>(rep: &RepresentativeModel<S>, cfg: &WorstCaseConfig<S>) -> Self {
        let mut file = Self::from_model(rep.model(), &cfg.basis);
        file.alpha = Some(to_matrix(&cfg.alpha));
        file.beta = Some(to_matrix(&cfg.spec.beta));
        file.epsilon = Some(Number::from_scalar(&cfg.epsilon));
        file
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub weights: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<Number>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sf: Option<SocialKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Number>,
    #[serde(default = "default_basis")]
    pub basis: Vec<BasisEntry>,
}

impl ConfigFile {
    /// Builds the configuration; `kind` and `epsilon` override the file.
    pub fn config<S: Scalar>(&self, kind: Option<SocialKind>, epsilon: Option<S>) -> Result<WorstCaseConfig<S>> {
        let n = self.weights.len();
        let kind = kind.or(self.sf).unwrap_or(SocialKind::Sum);
        let spec = match &self.beta {
            Some(b) => SocialSpec::new(kind, matrix(b))?,
            None => SocialSpec::identity(kind, n),
        };
        let alpha = self.alpha.as_ref().map_or_else(|| identity(n), |a| matrix(a));
        let epsilon = epsilon.or_else(|| self.epsilon.as_ref().map(Number::get)).unwrap_or_else(S::zero);
        WorstCaseConfig::new(numbers(&self.weights), alpha, spec, epsilon, basis_of(&self.basis)?)
    }

    pub fn from_config<S: Scalar>(cfg: &WorstCaseConfig<S>) -> Self {
        ConfigFile {
            weights: to_numbers(&cfg.weights),
            alpha: Some(to_matrix(&cfg.alpha)),
            beta: Some(to_matrix(&cfg.spec.beta)),
            sf: Some(cfg.spec.kind),
            epsilon: Some(Number::from_scalar(&cfg.epsilon)),
            basis: cfg.basis.iter().map(BasisEntry::from_basis).collect(),
        }
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| invalid!("malformed JSON: {e}"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid!("cannot read {}: {e}", path.display()))?;
    parse_json(&text).map_err(|e| match e {
        Error::Invalid(msg) => Error::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| invalid!("cannot serialise: {e}"))?;
    std::fs::write(path, text + "\n").map_err(|e| invalid!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::g1;
    use crate::scalar::Rational;

    const G1: &str = r#"{
        "n": 2, "weights": [1, "1"], "resources": ["a", "b"],
        "strategies": [[["a"], ["b"]], [["a"], ["b"]]],
        "basis": [{"kind": "monomial", "degree": 1}],
        "coefficients": [["1"], [1.0]],
        "alpha": [[1, 0], [0, 1]]
    }"#;

    #[test]
    fn game_file_round_trip() {
        let file: GameFile = parse_json(G1).unwrap();
        let game = file.game::<Rational>().unwrap();
        assert_eq!(game, g1());
        let back = GameFile::from_game(&game, None, None);
        let text = serde_json::to_string(&back).unwrap();
        assert_eq!(parse_json::<GameFile>(&text).unwrap().game::<Rational>().unwrap(), game);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_json::<GameFile>("{"), Err(Error::Invalid(_))));
        assert!(parse_json::<GameFile>(&G1.replace(r#"["1"]"#, r#"["1/0"]"#)).is_err());
        assert!(parse_json::<GameFile>(&G1.replace(r#""n": 2"#, r#""n": 2, "extra": 1"#)).is_err());
        let unknown: GameFile = parse_json(&G1.replace(r#"[["a"], ["b"]], [["a"]"#, r#"[["a"], ["c"]], [["a"]"#)).unwrap();
        assert!(unknown.game::<f64>().is_err());
        let skeleton: GameFile = parse_json(&G1.replace(r#""coefficients": [["1"], [1.0]],"#, "")).unwrap();
        assert!(skeleton.model::<f64>().is_ok());
        assert!(skeleton.game::<f64>().is_err());
    }

    #[test]
    fn config_defaults_and_overrides() {
        let file: ConfigFile = parse_json(r#"{"weights": [1, 1], "epsilon": "1/2"}"#).unwrap();
        let cfg = file.config::<Rational>(Some(SocialKind::Max), None).unwrap();
        assert_eq!(cfg.spec.kind, SocialKind::Max);
        assert_eq!(cfg.epsilon, Rational::ratio(1, 2));
        assert_eq!(cfg.alpha, identity(2));
        assert_eq!(cfg.basis, vec![BasisFunction::monomial(1)]);
        let cfg = file.config::<f64>(None, Some(0.0)).unwrap();
        assert_eq!((cfg.spec.kind, cfg.epsilon), (SocialKind::Sum, 0.0));
    }
}
