//! Linear expressions with exact rational coefficients over rate variables
//! and information symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::info::InfoQuery;

/// A named information quantity such as `I(Y1;Yh1|X1)`. Always
/// nonnegative when bound to a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSymbol(pub InfoQuery);

impl InfoSymbol {
    pub fn parse(s: &str) -> InfoSymbol {
        InfoSymbol(InfoQuery::parse(s))
    }

    pub fn query(&self) -> &InfoQuery {
        &self.0
    }
}

impl fmt::Display for InfoSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Σ a_v · v + Σ b_s · s`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LinearExpr {
    rates: BTreeMap<String, BigRational>,
    syms: BTreeMap<InfoSymbol, BigRational>,
}

fn add_into<K: Ord + Clone>(map: &mut BTreeMap<K, BigRational>, key: &K, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(key.clone()).or_insert_with(BigRational::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(key);
    }
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rate(mut self, name: &str, c: i64) -> Self {
        add_into(&mut self.rates, &name.to_string(), rat(c));
        self
    }

    pub fn sym(mut self, s: &str, c: i64) -> Self {
        add_into(&mut self.syms, &InfoSymbol::parse(s), rat(c));
        self
    }

    pub fn add_rate(&mut self, name: &str, c: BigRational) {
        add_into(&mut self.rates, &name.to_string(), c);
    }

    pub fn add_sym(&mut self, s: InfoSymbol, c: BigRational) {
        add_into(&mut self.syms, &s, c);
    }

    pub fn rates(&self) -> &BTreeMap<String, BigRational> {
        &self.rates
    }

    pub fn syms(&self) -> &BTreeMap<InfoSymbol, BigRational> {
        &self.syms
    }

    pub fn rate_coef(&self, name: &str) -> BigRational {
        self.rates.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rates.is_empty() && self.syms.is_empty()
    }

    pub fn scaled(&self, k: &BigRational) -> LinearExpr {
        if k.is_zero() {
            return LinearExpr::new();
        }
        LinearExpr {
            rates: self.rates.iter().map(|(n, c)| (n.clone(), c * k)).collect(),
            syms: self.syms.iter().map(|(s, c)| (*s, c * k)).collect(),
        }
    }

    pub fn plus(&self, other: &LinearExpr) -> LinearExpr {
        let mut out = self.clone();
        for (n, c) in &other.rates {
            add_into(&mut out.rates, n, c.clone());
        }
        for (s, c) in &other.syms {
            add_into(&mut out.syms, s, c.clone());
        }
        out
    }

    /// First nonzero coefficient, rates before symbols.
    fn leading(&self) -> Option<&BigRational> {
        self.rates.values().next().or_else(|| self.syms.values().next())
    }

    /// Positive rescaling so the leading coefficient has magnitude one.
    /// The sign is never flipped: that would reverse the inequality.
    pub fn normalized(&self) -> LinearExpr {
        match self.leading() {
            Some(c) if !c.abs().is_one() => self.scaled(&c.abs().recip()),
            _ => self.clone(),
        }
    }

    /// The symbol part only.
    pub fn sym_part(&self) -> LinearExpr {
        LinearExpr {
            rates: BTreeMap::new(),
            syms: self.syms.clone(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<InfoSymbol> {
        self.syms.keys().copied().collect()
    }

    /// Value under numeric bindings for rates and symbols. Missing names
    /// evaluate to `None`.
    pub fn eval(
        &self,
        rate: impl Fn(&str) -> Option<f64>,
        sym: impl Fn(&InfoSymbol) -> Option<f64>,
    ) -> Option<f64> {
        let (pos, neg) = self.eval_split(rate, sym)?;
        Some(pos - neg)
    }

    /// `(Σ positive terms, Σ |negative terms|)`.
    pub fn eval_split(
        &self,
        rate: impl Fn(&str) -> Option<f64>,
        sym: impl Fn(&InfoSymbol) -> Option<f64>,
    ) -> Option<(f64, f64)> {
        let mut pos = 0.0;
        let mut neg = 0.0;
        let terms = self
            .rates
            .iter()
            .map(|(n, c)| rate(n).map(|v| (c, v)))
            .chain(self.syms.iter().map(|(s, c)| sym(s).map(|v| (c, v))));
        for t in terms {
            let (c, v) = t?;
            let cf = to_f64(c);
            if cf > 0.0 {
                pos += cf * v;
            } else {
                neg -= cf * v;
            }
        }
        Some((pos, neg))
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn fmt_coef(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let rates = self.rates.iter().map(|(n, c)| (n.clone(), c));
        let syms = self.syms.iter().map(|(s, c)| (s.to_string(), c));
        for (name, c) in rates.chain(syms) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}*{}", fmt_coef(c), name)?;
        }
        Ok(())
    }
}

/// One row `expr < 0` or `expr <= 0` with a provenance trace: the source
/// labels it was combined from, joined by `+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub expr: LinearExpr,
    pub strict: bool,
    pub provenance: String,
}

impl Inequality {
    pub fn lt(expr: LinearExpr, provenance: &str) -> Self {
        Inequality {
            expr: expr.normalized(),
            strict: true,
            provenance: provenance.to_string(),
        }
    }

    pub fn le(expr: LinearExpr, provenance: &str) -> Self {
        Inequality {
            expr: expr.normalized(),
            strict: false,
            provenance: provenance.to_string(),
        }
    }

    pub fn relation(&self) -> &'static str {
        if self.strict {
            "<"
        } else {
            "<="
        }
    }

    /// Source labels recorded in the provenance.
    pub fn sources(&self) -> Vec<&str> {
        self.provenance.split('+').filter(|s| !s.is_empty()).collect()
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.expr, self.relation())?;
        if !self.provenance.is_empty() {
            write!(f, "  # {}", self.provenance)?;
        }
        Ok(())
    }
}

/// Sort key for source labels: numbered labels like `(12)` in numeric
/// order, then everything else alphabetically.
pub(crate) fn label_key(label: &str) -> (u8, u64, String) {
    let inner = label.strip_prefix('(').and_then(|r| r.strip_suffix(')'));
    if let Some(inner) = inner {
        let digits: String = inner.chars().take_while(|c| c.is_ascii_digit()).collect();
        if let Ok(n) = digits.parse::<u64>() {
            return (0, n, inner[digits.len()..].to_string());
        }
    }
    (1, 0, label.to_string())
}

/// Union of two provenance traces, deduplicated and sorted.
pub(crate) fn merge_provenance(a: &str, b: &str) -> String {
    let mut labels: Vec<&str> = a
        .split('+')
        .chain(b.split('+'))
        .filter(|s| !s.is_empty())
        .collect();
    labels.sort_by_key(|l| label_key(l));
    labels.dedup();
    labels.join("+")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_vanish() {
        let e = LinearExpr::new().rate("R1", 2).rate("R1", -2).sym("I(X1;X2)", 0);
        assert!(e.is_zero());
        assert_eq!(e.to_string(), "0");
    }

    #[test]
    fn normalization_keeps_sign() {
        let e = LinearExpr::new().rate("RH1", -3).sym("I(Yh1;Y1|X1)", 6).normalized();
        assert_eq!(e.to_string(), "-1*RH1 + 2*I(Y1;Yh1|X1)");
        let e = LinearExpr::new().sym("I(X1;X2)", 4).sym("I(X0;Y0)", -2).normalized();
        assert_eq!(e.to_string(), "-1*I(X0;Y0) + 2*I(X1;X2)");
        let e = LinearExpr::new().sym("I(X0;Y0)", 2).sym("I(X1;X2)", 1).normalized();
        assert_eq!(e.to_string(), "1*I(X0;Y0) + 1/2*I(X1;X2)");
    }

    #[test]
    fn provenance_merge_is_sorted_set() {
        assert_eq!(merge_provenance("(11)+(9)", "(9)+nonneg(RS1)"), "(9)+(11)+nonneg(RS1)");
        assert_eq!(merge_provenance("(4b)", "(4a)"), "(4a)+(4b)");
    }

    #[test]
    fn split_evaluation() {
        let e = LinearExpr::new().rate("RH1", -1).sym("I(Yh1;Y1|X1)", 1);
        let (p, n) = e
            .eval_split(|_| Some(0.25), |_| Some(0.5))
            .unwrap();
        assert_eq!((p, n), (0.5, 0.25));
        assert!(e.eval(|_| None, |_| Some(0.5)).is_none());
    }
}
