//! Inequality systems and their line-oriented text form.
//!
//! ```text
//! # comment
//! vars: RBAR RH1 RS1
//! 1*RH1 + -1*I(Y0;Yh1|X1) + -1*RS1 < 0  # (17)
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::expr::{InfoSymbol, Inequality, LinearExpr};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RateSystem {
    pub vars: Vec<String>,
    pub ineqs: Vec<Inequality>,
}

pub(crate) fn valid_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
}

impl RateSystem {
    pub fn new(vars: &[&str], ineqs: Vec<Inequality>) -> Result<Self> {
        let sys = RateSystem {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            ineqs,
        };
        sys.check()?;
        Ok(sys)
    }

    fn check(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in &self.vars {
            if !valid_var_name(v) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid rate variable name `{v}`"),
                });
            }
            if !seen.insert(v.as_str()) {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("variable `{v}` declared twice"),
                });
            }
        }
        for q in &self.ineqs {
            if let Some(v) = q.expr.rates().keys().find(|v| !seen.contains(v.as_str())) {
                return Err(Error::UnknownVariable(v.clone()));
            }
        }
        Ok(())
    }

    pub fn has_var(&self, v: &str) -> bool {
        self.vars.iter().any(|x| x == v)
    }

    pub fn symbols(&self) -> BTreeSet<InfoSymbol> {
        self.ineqs.iter().flat_map(|q| q.expr.symbols()).collect()
    }

    /// Same rows in a deterministic order.
    pub fn canonical(&self) -> RateSystem {
        let mut ineqs = self.ineqs.clone();
        ineqs.sort_by(|a, b| {
            a.expr
                .cmp(&b.expr)
                .then(b.strict.cmp(&a.strict))
                .then(a.provenance.cmp(&b.provenance))
        });
        RateSystem {
            vars: self.vars.clone(),
            ineqs,
        }
    }
}

impl fmt::Display for RateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.vars.join(" "))?;
        for q in &self.ineqs {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}

fn parse_term(line: usize, tok: &str, expr: &mut LinearExpr, vars: &[String]) -> Result<()> {
    let err = |msg: String| Error::Parse { line, msg };
    let (coef, name) = tok
        .split_once('*')
        .ok_or_else(|| err(format!("expected `<rational>*<name>`, got `{tok}`")))?;
    let coef = BigRational::from_str(coef.trim())
        .map_err(|_| err(format!("bad coefficient `{}`", coef.trim())))?;
    let name = name.trim();
    if name.starts_with("I(") {
        let q = name.parse().map_err(|e: Error| err(e.to_string()))?;
        expr.add_sym(InfoSymbol(q), coef);
    } else if vars.iter().any(|v| v == name) {
        expr.add_rate(name, coef);
    } else if valid_var_name(name) {
        return Err(Error::UnknownVariable(name.to_string()));
    } else {
        return Err(err(format!("unrecognised term `{name}`")));
    }
    Ok(())
}

impl FromStr for RateSystem {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut vars: Option<Vec<String>> = None;
        let mut ineqs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let (body, comment) = match raw.split_once('#') {
                Some((b, c)) => (b.trim(), c.trim()),
                None => (raw.trim(), ""),
            };
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("vars:") {
                if vars.is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: "duplicate `vars:` header".into(),
                    });
                }
                vars = Some(rest.split_whitespace().map(str::to_string).collect());
                continue;
            }
            let vars = vars.as_ref().ok_or_else(|| Error::Parse {
                line,
                msg: "inequality before `vars:` header".into(),
            })?;
            let (lhs, strict) = if let Some(l) = body.strip_suffix("<= 0") {
                (l, false)
            } else if let Some(l) = body.strip_suffix("< 0") {
                (l, true)
            } else {
                return Err(Error::Parse {
                    line,
                    msg: "expected a line ending in `< 0` or `<= 0`".into(),
                });
            };
            let mut expr = LinearExpr::new();
            let lhs = lhs.trim();
            if lhs != "0" {
                for tok in lhs.split(" + ") {
                    parse_term(line, tok.trim(), &mut expr, vars)?;
                }
            }
            ineqs.push(Inequality {
                expr: expr.normalized(),
                strict,
                provenance: comment.to_string(),
            });
        }
        let vars = vars.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `vars:` header".into(),
        })?;
        let sys = RateSystem { vars, ineqs };
        sys.check().map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: 1, msg },
            other => other,
        })?;
        Ok(sys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo
vars: RH1 RS1
-1*RH1 + 1*I(Y1;Yh1|X1) < 0  # (9)
1*RH1 + -1*RS1 + -1*I(Y0;Yh1|X1) < 0  # (17)
-1*RS1 <= 0  # nonneg(RS1)
0 < 0
";

    #[test]
    fn round_trip() {
        let sys: RateSystem = SAMPLE.parse().unwrap();
        assert_eq!(sys.ineqs.len(), 4);
        let again: RateSystem = sys.to_string().parse().unwrap();
        assert_eq!(again, sys);
    }

    #[test]
    fn unknown_names_are_reported() {
        let bad = "vars: RH1\n1*RS9 < 0\n";
        assert!(matches!(bad.parse::<RateSystem>(), Err(Error::UnknownVariable(v)) if v == "RS9"));
        assert!("1*RH1 < 0\n".parse::<RateSystem>().is_err());
        assert!("vars: RH1\n1*RH1 > 0\n".parse::<RateSystem>().is_err());
        assert!("vars: RH1\n1*I(X1;X1) < 0\n".parse::<RateSystem>().is_err());
    }
}
