use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::design::{contextual_terms, groups, team_terms, DesignMatrix, Term};
use crate::error::{Error, Result};
use crate::types::{PotentialAssist, TeamGameRatio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Linear,
    Logistic,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_log_likelihood: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_norm: Option<f64>,
}

pub type Coefficients = BTreeMap<String, BTreeMap<String, f64>>;

/// Estimated coefficients grouped by effect family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub fit_kind: FitKind,
    pub lambda: Option<f64>,
    pub n_obs: usize,
    pub diagnostics: Diagnostics,
    pub groups: Coefficients,
}

impl ModelFit {
    /// Attach names from `design` to a coefficient vector.
    pub fn from_vector(
        design: &DesignMatrix,
        beta: &[f64],
        fit_kind: FitKind,
        lambda: Option<f64>,
        diagnostics: Diagnostics,
    ) -> Self {
        let mut groups = Coefficients::new();
        for g in design.groups() {
            let levels = g
                .levels
                .iter()
                .zip(&beta[g.range()])
                .map(|(l, &b)| (l.clone(), b))
                .collect();
            groups.insert(g.name.clone(), levels);
        }
        Self {
            fit_kind,
            lambda,
            n_obs: design.n_rows(),
            diagnostics,
            groups,
        }
    }

    /// Coefficient of one level; zero when the group or level is absent.
    pub fn coefficient(&self, group: &str, level: &str) -> f64 {
        self.groups
            .get(group)
            .and_then(|g| g.get(level))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn group(&self, name: &str) -> Option<&BTreeMap<String, f64>> {
        self.groups.get(name)
    }

    /// Group coefficients minus their mean over the group's levels.
    pub fn centered(&self, name: &str) -> BTreeMap<String, f64> {
        let Some(g) = self.groups.get(name) else {
            return BTreeMap::new();
        };
        let mean = g.values().sum::<f64>() / g.len().max(1) as f64;
        g.iter().map(|(k, v)| (k.clone(), v - mean)).collect()
    }

    pub fn mean_of(&self, name: &str) -> f64 {
        self.groups
            .get(name)
            .filter(|g| !g.is_empty())
            .map_or(0.0, |g| g.values().sum::<f64>() / g.len() as f64)
    }

    fn terms_value(&self, terms: &[Term<'_>], keep: impl Fn(&str) -> bool) -> f64 {
        terms
            .iter()
            .filter(|t| keep(t.group))
            .map(|t| self.coefficient(t.group, t.level) * t.value)
            .sum()
    }

    /// Linear predictor of the contextual model for one potential assist.
    pub fn linear_predictor(&self, pa: &PotentialAssist) -> f64 {
        self.terms_value(&contextual_terms(pa), |_| true)
    }

    /// Linear predictor with the named groups zeroed.
    pub fn linear_predictor_without(&self, pa: &PotentialAssist, removed: &[&str]) -> f64 {
        self.terms_value(&contextual_terms(pa), |g| !removed.contains(&g))
    }

    /// Contribution of the named groups to the linear predictor of one row.
    pub fn contribution(&self, pa: &PotentialAssist, of: &[&str]) -> f64 {
        self.terms_value(&contextual_terms(pa), |g| of.contains(&g))
    }

    /// Fitted ratio of the team-level model.
    pub fn predict_ratio(&self, obs: &TeamGameRatio) -> f64 {
        self.terms_value(&team_terms(obs), |_| true)
    }

    pub fn intercept(&self) -> f64 {
        self.coefficient(groups::INTERCEPT, groups::INTERCEPT)
    }

    /// Coefficient of a single-column group such as a continuous covariate.
    pub fn scalar(&self, group: &str) -> f64 {
        self.coefficient(group, group)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut groups = Coefficients::new();
        groups.insert("intercept".into(), [("intercept".to_string(), 0.5)].into());
        groups.insert("team".into(), [("A".to_string(), 0.1), ("B".to_string(), -0.1)].into());
        let fit = ModelFit {
            fit_kind: FitKind::Logistic,
            lambda: Some(1e-3),
            n_obs: 10,
            diagnostics: Diagnostics {
                mean_log_likelihood: Some(-0.6),
                ..Default::default()
            },
            groups,
        };
        let v: serde_json::Value = serde_json::from_str(&fit.to_json().unwrap()).unwrap();
        assert_eq!(v["fit_kind"], "logistic");
        assert_eq!(v["lambda"], 1e-3);
        assert_eq!(v["n_obs"], 10);
        assert_eq!(v["groups"]["team"]["B"], -0.1);
        assert_eq!(v["diagnostics"]["mean_log_likelihood"], -0.6);
        assert_eq!(ModelFit::from_json(&fit.to_json().unwrap()).unwrap(), fit);
    }

    #[test]
    fn centering_and_missing_levels() {
        let mut groups = Coefficients::new();
        groups.insert("g".into(), [("a".to_string(), 1.0), ("b".to_string(), 3.0)].into());
        let fit = ModelFit {
            fit_kind: FitKind::Linear,
            lambda: None,
            n_obs: 0,
            diagnostics: Diagnostics::default(),
            groups,
        };
        assert_eq!(fit.centered("g")["a"], -1.0);
        assert_eq!(fit.mean_of("g"), 2.0);
        assert_eq!(fit.coefficient("g", "zzz"), 0.0);
        assert_eq!(fit.coefficient("nope", "a"), 0.0);
        assert!(fit.centered("nope").is_empty());
    }
}
