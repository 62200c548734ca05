//! Flat key-value run configuration.

use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

/// Every recognised key. Shift keys accept a scalar or one value per shift.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<String>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub rate: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub power: Option<Vec<u32>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub t0: Option<Vec<f64>>,
    /// Growth constant for tabulated families.
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_doublings: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub point_sigma: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub point_t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub afe_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub em_order: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(
        rename = "T",
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Option::is_none"
    )]
    pub big_t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,

    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_sigma: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<usize>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub target_re: Option<Vec<f64>>,
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub target_im: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_tau: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_omega: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional_sigma: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_panels: Option<u64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match Either::deserialize(d)? {
        Either::One(v) => vec![v],
        Either::Many(v) => v,
    }))
}

/// Pulls the field name out of serde's "unknown field `name`" message.
fn unknown_field(message: &str) -> Option<String> {
    let rest = message.split("unknown field `").nth(1)?;
    Some(rest.split('`').next()?.to_string())
}

impl Config {
    /// Parses a table, reporting every unrecognised key at once.
    pub fn from_table(table: toml::Table) -> Result<Self, CliError> {
        let mut table = table;
        let mut unknown = Vec::new();
        loop {
            match Config::deserialize(toml::Value::Table(table.clone())) {
                Ok(cfg) => {
                    return if unknown.is_empty() {
                        Ok(cfg)
                    } else {
                        Err(CliError::Config(format!("unknown config keys: {}", unknown.join(", "))))
                    };
                }
                Err(e) => match unknown_field(&e.to_string()) {
                    Some(key) if table.remove(&key).is_some() => unknown.push(key),
                    _ => {
                        let mut msg = e.to_string();
                        if !unknown.is_empty() {
                            msg = format!("unknown config keys: {}; {msg}", unknown.join(", "));
                        }
                        return Err(CliError::Config(msg.trim().to_string()));
                    }
                },
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim().to_string()))?;
        Self::from_table(table)
    }

    /// Canonical text form; reparses to an equal value.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

/// Applies `key=value` overrides; values use TOML syntax, bare words are strings.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<(), CliError> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Config(format!("override `{item}` has an empty key")));
        }
        let raw = raw.trim();
        let value = match format!("v = {raw}").parse::<toml::Table>() {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        table.insert(key.to_string(), value);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_broadcast_to_lists() {
        let c = Config::parse("family = \"exp\"\nrate = 1.0\nT = [3.0, 4.0]").unwrap();
        assert_eq!(c.family, Some(vec!["exp".to_string()]));
        assert_eq!(c.rate, Some(vec![1.0]));
        assert_eq!(c.big_t, Some(vec![3.0, 4.0]));
    }

    #[test]
    fn lists_every_unknown_key() {
        let err = Config::parse("famly = \"exp\"\nrate = 1.0\nsigmaa = 0.7").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("famly") && msg.contains("sigmaa"), "{msg}");
    }

    #[test]
    fn wrong_type_is_config_error() {
        assert!(matches!(Config::parse("n_tau = \"many\""), Err(CliError::Config(_))));
    }

    #[test]
    fn overrides_parse_toml_values() {
        let mut t = toml::Table::new();
        apply_overrides(
            &mut t,
            &["n_tau=100".into(), "family=exp".into(), "k_t=[-0.05, 0.05]".into()],
        )
        .unwrap();
        let c = Config::from_table(t).unwrap();
        assert_eq!(c.n_tau, Some(100));
        assert_eq!(c.family, Some(vec!["exp".into()]));
        assert_eq!(c.k_t, Some(vec![-0.05, 0.05]));
        assert!(apply_overrides(&mut toml::Table::new(), &["novalue".into()]).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = Config::parse(
            "family = [\"exp\", \"exp\"]\nrate = [0.5, 0.6]\nT = 12.0\nk_sigma = [0.7, 0.72]\nseed = 7\nepsilon = 0.1",
        )
        .unwrap();
        assert_eq!(Config::parse(&c.to_toml()).unwrap(), c);
    }
}
