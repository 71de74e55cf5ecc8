//! Parameter domains, validation and the `family:key=value,...` string form.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CopulaSpec, Family, HinzmannForm};
use crate::error::{Error, Result, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Independence,
    Fgm,
    FischerKock,
    Clayton,
    GumbelHougaard,
    GumbelBarnet,
    NelsenTen,
    MarshallOlkin,
    Amh,
    FischerHinzmann,
    RluExtended,
    LinearSpearman,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 12] = [
        FamilyKind::Independence,
        FamilyKind::Fgm,
        FamilyKind::FischerKock,
        FamilyKind::Clayton,
        FamilyKind::GumbelHougaard,
        FamilyKind::GumbelBarnet,
        FamilyKind::NelsenTen,
        FamilyKind::MarshallOlkin,
        FamilyKind::Amh,
        FamilyKind::FischerHinzmann,
        FamilyKind::RluExtended,
        FamilyKind::LinearSpearman,
    ];

    pub fn of(f: &Family) -> Self {
        match f {
            Family::Independence => FamilyKind::Independence,
            Family::Fgm { .. } => FamilyKind::Fgm,
            Family::FischerKock { .. } => FamilyKind::FischerKock,
            Family::Clayton { .. } => FamilyKind::Clayton,
            Family::GumbelHougaard { .. } => FamilyKind::GumbelHougaard,
            Family::GumbelBarnet { .. } => FamilyKind::GumbelBarnet,
            Family::NelsenTen { .. } => FamilyKind::NelsenTen,
            Family::MarshallOlkin { .. } => FamilyKind::MarshallOlkin,
            Family::Amh { .. } => FamilyKind::Amh,
            Family::FischerHinzmann { .. } => FamilyKind::FischerHinzmann,
            Family::RluExtended { .. } => FamilyKind::RluExtended,
            Family::LinearSpearman { .. } => FamilyKind::LinearSpearman,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Independence => "independence",
            FamilyKind::Fgm => "fgm",
            FamilyKind::FischerKock => "fischer_kock",
            FamilyKind::Clayton => "clayton",
            FamilyKind::GumbelHougaard => "gumbel_hougaard",
            FamilyKind::GumbelBarnet => "gumbel_barnet",
            FamilyKind::NelsenTen => "nelsen_ten",
            FamilyKind::MarshallOlkin => "marshall_olkin",
            FamilyKind::Amh => "amh",
            FamilyKind::FischerHinzmann => "fischer_hinzmann",
            FamilyKind::RluExtended => "rlu_extended",
            FamilyKind::LinearSpearman => "linear_spearman",
        }
    }

    /// Draws a spec with parameters inside the family's domain.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, dim: usize) -> CopulaSpec {
        let family = match self {
            FamilyKind::Independence => Family::Independence,
            FamilyKind::Fgm => Family::Fgm {
                alpha: rng.random_range(-1.0..=1.0),
            },
            FamilyKind::FischerKock => Family::FischerKock {
                r: rng.random_range(1.0..=4.0),
                alpha: rng.random_range(-1.0..=1.0),
            },
            FamilyKind::Clayton => Family::Clayton {
                alpha: rng.random_range(0.1..=5.0),
            },
            FamilyKind::GumbelHougaard => Family::GumbelHougaard {
                alpha: rng.random_range(1.0..=5.0),
            },
            FamilyKind::GumbelBarnet => Family::GumbelBarnet {
                alpha: rng.random_range(0.0..=1.0),
            },
            FamilyKind::NelsenTen => Family::NelsenTen {
                alpha: rng.random_range(0.05..=1.0),
            },
            FamilyKind::MarshallOlkin => Family::MarshallOlkin {
                alphas: (0..dim).map(|_| rng.random_range(0.1..=3.0)).collect(),
            },
            FamilyKind::Amh => Family::Amh {
                alpha: rng.random_range(-1.0..=1.0),
            },
            FamilyKind::FischerHinzmann => Family::FischerHinzmann {
                m: rng.random_range(1.0..=4.0),
                alpha: rng.random_range(0.0..=1.0),
                form: HinzmannForm::Literal,
            },
            FamilyKind::RluExtended => Family::RluExtended {
                a: (0..dim).map(|_| rng.random_range(1.0..=4.0)).collect(),
                b: (0..dim).map(|_| rng.random_range(1.0..=4.0)).collect(),
                alpha: rng.random_range(0.0..=1.0),
            },
            FamilyKind::LinearSpearman => Family::LinearSpearman {
                theta: rng.random_range(-1.0..=1.0),
            },
        };
        CopulaSpec::new(family, dim)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::parse(s, "unknown copula family"))
    }
}

struct Check<'a> {
    out: &'a mut Vec<Violation>,
}

impl Check<'_> {
    fn require(&mut self, ok: bool, parameter: &str, value: impl fmt::Display, admissible: &str) {
        if !ok {
            self.out.push(Violation {
                parameter: parameter.to_string(),
                value: value.to_string(),
                admissible: admissible.to_string(),
            });
        }
    }

    fn closed(&mut self, p: &str, v: f64, lo: f64, hi: f64, text: &str) {
        self.require(v.is_finite() && v >= lo && v <= hi, p, v, text);
    }
}

impl CopulaSpec {
    /// Lists every parameter outside its family's domain.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut c = Check { out: &mut out };
        // a single independent component is a valid (degenerate) system
        if self.is_independence() {
            c.require(self.dim >= 1, "n", self.dim, "{1, 2, ...}");
        } else {
            c.require(self.dim >= 2, "n", self.dim, "{2, 3, ...}");
        }
        match &self.family {
            Family::Independence => {}
            Family::Fgm { alpha } | Family::Amh { alpha } => {
                c.closed("alpha", *alpha, -1.0, 1.0, "[-1, 1]")
            }
            Family::FischerKock { r, alpha } => {
                c.require(r.is_finite() && *r >= 1.0, "r", r, "[1, ∞)");
                c.closed("alpha", *alpha, -1.0, 1.0, "[-1, 1]");
            }
            Family::Clayton { alpha } => {
                c.require(alpha.is_finite() && *alpha > 0.0, "alpha", alpha, "(0, ∞)")
            }
            Family::GumbelHougaard { alpha } => {
                c.require(alpha.is_finite() && *alpha >= 1.0, "alpha", alpha, "[1, ∞)")
            }
            Family::GumbelBarnet { alpha } => c.closed("alpha", *alpha, 0.0, 1.0, "[0, 1]"),
            Family::NelsenTen { alpha } => {
                c.require(*alpha > 0.0 && *alpha <= 1.0, "alpha", alpha, "(0, 1]")
            }
            Family::MarshallOlkin { alphas } => {
                for (i, a) in alphas.iter().enumerate() {
                    c.require(a.is_finite() && *a > 0.0, &format!("alpha[{i}]"), a, "(0, ∞)");
                }
            }
            Family::FischerHinzmann { m, alpha, .. } => {
                c.require(m.is_finite() && *m >= 1.0, "m", m, "[1, ∞)");
                c.closed("alpha", *alpha, 0.0, 1.0, "[0, 1]");
            }
            Family::RluExtended { a, b, alpha } => {
                c.require(a.len() == b.len(), "len(b)", b.len(), &format!("{{{}}}", a.len()));
                for (i, x) in a.iter().enumerate() {
                    c.require(x.is_finite() && *x >= 1.0, &format!("a[{i}]"), x, "[1, ∞)");
                }
                for (i, x) in b.iter().enumerate() {
                    c.require(x.is_finite() && *x >= 1.0, &format!("b[{i}]"), x, "[1, ∞)");
                }
                c.closed("alpha", *alpha, 0.0, 1.0, "[0, 1]");
            }
            Family::LinearSpearman { theta } => {
                c.closed("theta", *theta, -1.0, 1.0, "[-1, 1]");
                c.require(self.dim == 2, "n", self.dim, "{2}");
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("/")
}

impl fmt::Display for CopulaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match &self.family {
            Family::Independence => {}
            Family::Fgm { alpha }
            | Family::Clayton { alpha }
            | Family::GumbelHougaard { alpha }
            | Family::GumbelBarnet { alpha }
            | Family::NelsenTen { alpha }
            | Family::Amh { alpha } => parts.push(format!("alpha={alpha}")),
            Family::FischerKock { r, alpha } => {
                parts.push(format!("r={r}"));
                parts.push(format!("alpha={alpha}"));
            }
            Family::MarshallOlkin { alphas } => parts.push(format!("alpha={}", fmt_vec(alphas))),
            Family::FischerHinzmann { m, alpha, form } => {
                parts.push(format!("m={m}"));
                parts.push(format!("alpha={alpha}"));
                if *form == HinzmannForm::Corrected {
                    parts.push("form=corrected".into());
                }
            }
            Family::RluExtended { a, b, alpha } => {
                parts.push(format!("a={}", fmt_vec(a)));
                parts.push(format!("b={}", fmt_vec(b)));
                parts.push(format!("alpha={alpha}"));
            }
            Family::LinearSpearman { theta } => parts.push(format!("theta={theta}")),
        }
        let vector_family = matches!(
            self.family,
            Family::MarshallOlkin { .. } | Family::RluExtended { .. } | Family::LinearSpearman { .. }
        );
        if !vector_family && self.dim != 2 {
            parts.push(format!("n={}", self.dim));
        }
        f.write_str(self.kind().name())?;
        if !parts.is_empty() {
            write!(f, ":{}", parts.join(","))?;
        }
        Ok(())
    }
}

struct Fields<'a> {
    source: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(source: &'a str, body: &'a str) -> Result<Self> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        if !body.is_empty() {
            for item in body.split(',') {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::parse(item, "expected key=value"))?;
                if pairs.iter().any(|(seen, _)| *seen == k) {
                    return Err(Error::parse(item, "duplicate parameter"));
                }
                pairs.push((k, v));
            }
        }
        Ok(Fields { source, pairs })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        let pos = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(pos).1)
    }

    fn number(&mut self, key: &str) -> Result<f64> {
        let v = self
            .take(key)
            .ok_or_else(|| Error::parse(self.source, format!("missing parameter `{key}`")))?;
        v.parse::<f64>()
            .map_err(|_| Error::parse(format!("{key}={v}"), "expected a real number"))
    }

    fn vector(&mut self, key: &str) -> Result<Vec<f64>> {
        let v = self
            .take(key)
            .ok_or_else(|| Error::parse(self.source, format!("missing parameter `{key}`")))?;
        v.split('/')
            .map(|x| {
                x.parse::<f64>()
                    .map_err(|_| Error::parse(format!("{key}={v}"), "expected `/`-separated reals"))
            })
            .collect()
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, v)) => Err(Error::parse(format!("{k}={v}"), "unknown parameter")),
        }
    }
}

impl FromStr for CopulaSpec {
    type Err = Error;

    /// Parses `family[:key=value,...]`, e.g. `fgm:alpha=0.5` or
    /// `marshall_olkin:alpha=0.5/0.5`. Scalar families accept `n=` (default 2).
    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let kind: FamilyKind = name.parse()?;
        let mut f = Fields::parse(s, body)?;
        let explicit_n = f
            .take("n")
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::parse(format!("n={v}"), "expected a dimension"))
            })
            .transpose()?;
        let dim = explicit_n.unwrap_or(2);
        let family = match kind {
            FamilyKind::Independence => Family::Independence,
            FamilyKind::Fgm => Family::Fgm {
                alpha: f.number("alpha")?,
            },
            FamilyKind::FischerKock => Family::FischerKock {
                r: f.number("r")?,
                alpha: f.number("alpha")?,
            },
            FamilyKind::Clayton => Family::Clayton {
                alpha: f.number("alpha")?,
            },
            FamilyKind::GumbelHougaard => Family::GumbelHougaard {
                alpha: f.number("alpha")?,
            },
            FamilyKind::GumbelBarnet => Family::GumbelBarnet {
                alpha: f.number("alpha")?,
            },
            FamilyKind::NelsenTen => Family::NelsenTen {
                alpha: f.number("alpha")?,
            },
            FamilyKind::MarshallOlkin => Family::MarshallOlkin {
                alphas: f.vector("alpha")?,
            },
            FamilyKind::Amh => Family::Amh {
                alpha: f.number("alpha")?,
            },
            FamilyKind::FischerHinzmann => {
                let m = f.number("m")?;
                let alpha = f.number("alpha")?;
                let form = match f.take("form") {
                    None | Some("literal") => HinzmannForm::Literal,
                    Some("corrected") => HinzmannForm::Corrected,
                    Some(other) => {
                        return Err(Error::parse(format!("form={other}"), "expected literal or corrected"))
                    }
                };
                Family::FischerHinzmann { m, alpha, form }
            }
            FamilyKind::RluExtended => Family::RluExtended {
                a: f.vector("a")?,
                b: f.vector("b")?,
                alpha: f.number("alpha")?,
            },
            FamilyKind::LinearSpearman => Family::LinearSpearman {
                theta: f.number("theta")?,
            },
        };
        f.finish()?;
        let spec = CopulaSpec::new(family, dim);
        match explicit_n {
            Some(n) if n != spec.dim => Err(Error::DimensionMismatch {
                expected: spec.dim,
                got: n,
            }),
            _ => Ok(spec),
        }
    }
}

#[cfg(test)]
pub(crate) fn sample_specs(dim: usize) -> Vec<CopulaSpec> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    FamilyKind::ALL
        .into_iter()
        .filter(|k| dim == 2 || *k != FamilyKind::LinearSpearman)
        .map(|k| k.draw(&mut rng, dim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn parameter_domains() {
        let fgm: CopulaSpec = "fgm:alpha=1.5".parse().unwrap();
        let v = fgm.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].admissible, "[-1, 1]");
        assert!(v[0].to_string().contains("alpha ∈ [-1, 1]"));

        let gh: CopulaSpec = "gumbel_hougaard:alpha=0.5".parse().unwrap();
        assert_eq!(gh.violations()[0].admissible, "[1, ∞)");

        let clayton: CopulaSpec = "clayton:alpha=1".parse().unwrap();
        assert!(clayton.validate().is_ok());
    }

    #[test]
    fn multiple_violations_are_all_reported() {
        let rlu: CopulaSpec = "rlu_extended:a=0.5/2,b=2/0,alpha=3".parse().unwrap();
        assert_eq!(rlu.violations().len(), 3);
        let ls = CopulaSpec::new(Family::LinearSpearman { theta: 2.0 }, 2);
        assert_eq!(ls.violations().len(), 1);
    }

    #[test]
    fn parse_errors_name_the_token() {
        let e = "fgm:beta=1".parse::<CopulaSpec>().unwrap_err();
        assert!(e.to_string().contains("alpha"), "{e}");
        let e = "fgm:alpha=0.5,beta=1".parse::<CopulaSpec>().unwrap_err();
        assert!(e.to_string().contains("beta=1"), "{e}");
        let e = "frank:alpha=1".parse::<CopulaSpec>().unwrap_err();
        assert!(e.to_string().contains("frank"), "{e}");
        let e = "clayton:alpha=x".parse::<CopulaSpec>().unwrap_err();
        assert!(e.to_string().contains("alpha=x"), "{e}");
        let e = "marshall_olkin:alpha=1/2,n=3".parse::<CopulaSpec>().unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn canonical_strings_round_trip() {
        for s in [
            "independence",
            "independence:n=4",
            "fgm:alpha=0.5",
            "fgm:alpha=-1,n=3",
            "fischer_kock:r=2,alpha=-0.5",
            "marshall_olkin:alpha=0.5/0.25/2",
            "fischer_hinzmann:m=2,alpha=0.5",
            "fischer_hinzmann:m=2,alpha=0.5,form=corrected",
            "rlu_extended:a=2/2,b=3/3,alpha=1",
            "linear_spearman:theta=0.5",
        ] {
            let c: CopulaSpec = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
    }

    proptest! {
        #[test]
        fn print_parse_is_identity(seed in any::<u64>(), k in 0usize..12, dim in 2usize..5) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let kind = FamilyKind::ALL[k];
            let spec = kind.draw(&mut rng, dim);
            let text = spec.to_string();
            let back: CopulaSpec = text.parse().unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(back.to_string(), text);
            prop_assert!(spec.validate().is_ok());
        }
    }
}
