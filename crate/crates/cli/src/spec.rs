//! Textual density specifications, `family:key=value[,key=value]`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use epi_lab::{Density1D, GridDensity};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Gaussian { var: f64 },
    Mixture { eps: f64 },
    Laplace { scale: f64 },
    Quartic { a: f64, scale: Option<f64> },
    Grid { file: PathBuf },
}

fn spec_err(pos: usize, msg: impl Into<String>) -> CliError {
    CliError::Spec {
        pos,
        msg: msg.into(),
    }
}

/// A `key=value` field and the byte offset of its value.
struct Field<'a> {
    key: &'a str,
    key_pos: usize,
    value: &'a str,
    value_pos: usize,
}

fn split_fields(body: &str, offset: usize) -> Result<Vec<Field<'_>>> {
    let mut fields = Vec::new();
    let mut pos = offset;
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| spec_err(pos, format!("expected key=value, found {part:?}")))?;
        if key.is_empty() {
            return Err(spec_err(pos, "empty key"));
        }
        if fields.iter().any(|f: &Field| f.key == key) {
            return Err(spec_err(pos, format!("duplicate key {key:?}")));
        }
        fields.push(Field {
            key,
            key_pos: pos,
            value,
            value_pos: pos + key.len() + 1,
        });
        pos += part.len() + 1;
    }
    Ok(fields)
}

fn number(f: &Field, ok: impl Fn(f64) -> bool, expect: &str) -> Result<f64> {
    let v: f64 = f.value.parse().map_err(|_| {
        spec_err(
            f.value_pos,
            format!("{} is not a number: {:?}", f.key, f.value),
        )
    })?;
    if !v.is_finite() || !ok(v) {
        return Err(spec_err(
            f.value_pos,
            format!("{} = {v} out of range, expected {expect}", f.key),
        ));
    }
    Ok(v)
}

impl FromStr for DensitySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(spec_err(0, "empty spec"));
        }
        let (family, body) = s
            .split_once(':')
            .ok_or_else(|| spec_err(s.len(), "expected family:key=value"))?;
        let fields = split_fields(body, family.len() + 1)?;
        let allowed: &[&str] = match family {
            "gaussian" => &["var"],
            "mixture" => &["eps"],
            "laplace" => &["scale"],
            "quartic" => &["a", "scale"],
            "grid" => &["file"],
            _ => return Err(spec_err(0, format!("unknown family {family:?}"))),
        };
        if let Some(f) = fields.iter().find(|f| !allowed.contains(&f.key)) {
            return Err(spec_err(
                f.key_pos,
                format!("unknown key {:?} for {family}", f.key),
            ));
        }
        let get = |key: &str| fields.iter().find(|f| f.key == key);
        let need =
            |key: &str| get(key).ok_or_else(|| spec_err(s.len(), format!("{family} needs {key}=")));
        let positive = |v: f64| v > 0.0;
        Ok(match family {
            "gaussian" => Self::Gaussian {
                var: number(need("var")?, positive, "> 0")?,
            },
            "mixture" => Self::Mixture {
                eps: number(need("eps")?, |v| v > 0.0 && v < 1.0, "in (0, 1)")?,
            },
            "laplace" => Self::Laplace {
                scale: number(need("scale")?, positive, "> 0")?,
            },
            "quartic" => Self::Quartic {
                a: number(need("a")?, |v| v >= 0.0, ">= 0")?,
                scale: get("scale")
                    .map(|f| number(f, positive, "> 0"))
                    .transpose()?,
            },
            _ => {
                let f = need("file")?;
                if f.value.is_empty() {
                    return Err(spec_err(f.value_pos, "empty file name"));
                }
                Self::Grid {
                    file: PathBuf::from(f.value),
                }
            }
        })
    }
}

impl fmt::Display for DensitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { var } => write!(f, "gaussian:var={var}"),
            Self::Mixture { eps } => write!(f, "mixture:eps={eps}"),
            Self::Laplace { scale } => write!(f, "laplace:scale={scale}"),
            Self::Quartic { a, scale: None } => write!(f, "quartic:a={a}"),
            Self::Quartic { a, scale: Some(s) } => write!(f, "quartic:a={a},scale={s}"),
            Self::Grid { file } => write!(f, "grid:file={}", file.display()),
        }
    }
}

impl DensitySpec {
    pub fn to_density(&self) -> Result<Density1D> {
        Ok(match self {
            Self::Gaussian { var } => Density1D::gaussian(*var)?,
            Self::Mixture { eps } => Density1D::mixture_counterexample(*eps)?,
            Self::Laplace { scale } => Density1D::laplace(*scale)?,
            Self::Quartic { a, scale } => Density1D::quartic_scaled(*a, scale.unwrap_or(1.0))?,
            Self::Grid { file } => Density1D::grid(GridDensity::read_csv(file)?),
        })
    }
}

pub fn parse_density_spec(s: &str) -> Result<Density1D> {
    s.parse::<DensitySpec>()?.to_density()
}

#[cfg(test)]
mod tests {
    use super::*;
    use epi_lab::Law1D;

    #[test]
    fn canonical_forms_round_trip() {
        for s in [
            "gaussian:var=2",
            "gaussian:var=0.001",
            "mixture:eps=0.03",
            "laplace:scale=1",
            "quartic:a=0.1",
            "quartic:a=0,scale=2.5",
            "grid:file=data/f.csv",
        ] {
            let spec: DensitySpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<DensitySpec>().unwrap(), spec);
        }
    }

    #[test]
    fn errors_carry_positions() {
        let pos = |s: &str| match s.parse::<DensitySpec>() {
            Err(CliError::Spec { pos, .. }) => pos,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("gaussian:variance=2"), 9);
        assert_eq!(pos("gaussian:var=-1"), 13);
        assert_eq!(pos("gaussian:var=abc"), 13);
        assert_eq!(pos("quartic:a=0.1,b=3"), 14);
        assert_eq!(pos("mixture:eps=1"), 12);
        assert_eq!(pos("cauchy:scale=1"), 0);
        assert_eq!(pos(""), 0);
        assert!(matches!(
            "gaussian".parse::<DensitySpec>(),
            Err(CliError::Spec { .. })
        ));
        assert!(matches!(
            "gaussian:var=1,var=2".parse::<DensitySpec>(),
            Err(CliError::Spec { .. })
        ));
        assert!(matches!(
            "quartic:scale=1".parse::<DensitySpec>(),
            Err(CliError::Spec { .. })
        ));
    }

    #[test]
    fn specs_build_the_named_densities() {
        assert_eq!(
            parse_density_spec("gaussian:var=2").unwrap(),
            Density1D::gaussian(2.0).unwrap()
        );
        let half = parse_density_spec("mixture:eps=0.5").unwrap();
        let g = Density1D::standard_gaussian();
        for x in [-2.0, 0.0, 0.7, 3.0] {
            assert!((half.pdf(x) - g.pdf(x)).abs() < 1e-15);
        }
        match parse_density_spec("quartic:a=0.1").unwrap() {
            Density1D::QuarticGibbs(q) => {
                assert!((q.log_normalizer() - 0.765_331_055_384_966_8).abs() < 1e-10)
            }
            other => panic!("{other:?}"),
        }
    }
}
