//! Summaries `φ(G) = f(G h_1, …, G h_k)` of a random distribution and their
//! two-sample analogues `f(G_1 h_1, …, G_1 h_p, G_2 h_1, …, G_2 h_p)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bootstrap::WeightedDistribution;
use crate::error::{Error, Result};

/// Integrand `h` in `G h = ∫ h dG`.
#[derive(Debug, Clone, PartialEq)]
pub enum HFunction {
    Identity,
    /// `x^j`; `j = 0` gives the total mass.
    Power(i32),
    /// `min(x, τ)`.
    Truncation(f64),
    /// `I{x > t}`.
    SurvivalIndicator(f64),
    /// `I{x <= t}`.
    CdfIndicator(f64),
    /// `Σ a_i h_i(x)`.
    Linear(Vec<(f64, HFunction)>),
}

impl HFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            HFunction::Identity => x,
            HFunction::Power(j) => x.powi(*j),
            HFunction::Truncation(tau) => x.min(*tau),
            HFunction::SurvivalIndicator(t) => {
                if x > *t {
                    1.0
                } else {
                    0.0
                }
            }
            HFunction::CdfIndicator(t) => {
                if x <= *t {
                    1.0
                } else {
                    0.0
                }
            }
            HFunction::Linear(terms) => terms.iter().map(|(a, h)| a * h.eval(x)).sum(),
        }
    }
}

impl fmt::Display for HFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HFunction::Identity => write!(f, "x"),
            HFunction::Power(0) => write!(f, "1"),
            HFunction::Power(j) => write!(f, "x^{j}"),
            HFunction::Truncation(tau) => write!(f, "min(x,{tau})"),
            HFunction::SurvivalIndicator(t) => write!(f, "gt({t})"),
            HFunction::CdfIndicator(t) => write!(f, "le({t})"),
            HFunction::Linear(terms) => {
                for (i, (a, h)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{a}*{h}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for HFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')'))
        };
        if s == "x" {
            return Ok(HFunction::Identity);
        }
        if s == "1" {
            return Ok(HFunction::Power(0));
        }
        if let Some(j) = s.strip_prefix("x^") {
            let j: i32 = j
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad power in h-function '{s}'")))?;
            return Ok(HFunction::Power(j));
        }
        if let Some(arg) = inner("min(x,") {
            return Ok(HFunction::Truncation(parse_positive(arg, "tau")?));
        }
        if let Some(arg) = inner("gt(") {
            return Ok(HFunction::SurvivalIndicator(parse_positive(arg, "t")?));
        }
        if let Some(arg) = inner("le(") {
            return Ok(HFunction::CdfIndicator(parse_positive(arg, "t")?));
        }
        Err(Error::Parse(format!(
            "unknown h-function '{s}' (expected x, 1, x^j, min(x,tau), gt(t) or le(t))"
        )))
    }
}

fn parse_positive(s: &str, name: &'static str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse {name} from '{s}'")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(name, format!("must be positive, got {v}")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    One,
    Two,
}

/// The combiner `f`.
#[derive(Debug, Clone, PartialEq)]
pub enum Combiner {
    Identity,
    /// `x1 - x2`, or `x1 - y1` for two samples.
    Difference,
    /// `x1 / x2`, or `x1 / y1` for two samples.
    Ratio,
    /// `x1 - x2^2`.
    Variance,
    /// Arithmetic expression over `x1..xk` (and `y1..yp` for two samples).
    Expression(Expr),
}

/// A parsed arithmetic expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// `x_i` (first sample) or `y_i` (second sample), zero-based.
    Var { second: bool, index: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input in expression '{s}'")));
        }
        Ok(e)
    }

    pub fn eval(&self, xs: &[f64], ys: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Number(v) => *v,
            Expr::Var { second, index } => {
                let src = if *second { ys } else { xs };
                *src.get(*index).ok_or_else(|| {
                    Error::Evaluation(format!(
                        "variable {}{} out of range",
                        if *second { 'y' } else { 'x' },
                        index + 1
                    ))
                })?
            }
            Expr::Neg(a) => -a.eval(xs, ys)?,
            Expr::Add(a, b) => a.eval(xs, ys)? + b.eval(xs, ys)?,
            Expr::Sub(a, b) => a.eval(xs, ys)? - b.eval(xs, ys)?,
            Expr::Mul(a, b) => a.eval(xs, ys)? * b.eval(xs, ys)?,
            Expr::Div(a, b) => {
                let d = b.eval(xs, ys)?;
                if d == 0.0 {
                    return Err(Error::Evaluation("division by zero".to_string()));
                }
                a.eval(xs, ys)? / d
            }
            Expr::Pow(a, b) => a.eval(xs, ys)?.powf(b.eval(xs, ys)?),
        })
    }

    fn max_index(&self, second: bool) -> Option<usize> {
        match self {
            Expr::Number(_) => None,
            Expr::Var { second: s, index } => (*s == second).then_some(*index),
            Expr::Neg(a) => a.max_index(second),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                match (a.max_index(second), b.max_index(second)) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var(bool, usize),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if "+-*/^()".contains(ch) {
            out.push(Token::Op(ch));
            i += 1;
        } else if ch == 'x' || ch == 'y' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let idx: usize = chars[start..j]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse(format!("variable '{ch}' needs an index, e.g. {ch}1")))?;
            if idx == 0 {
                return Err(Error::Parse("variable indices start at 1".to_string()));
            }
            out.push(Token::Var(ch == 'y', idx - 1));
            i = j;
        } else if ch.is_ascii_digit() || ch == '.' {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_ascii_digit()
                    || chars[j] == '.'
                    || chars[j] == 'e'
                    || chars[j] == 'E'
                    || ((chars[j] == '-' || chars[j] == '+')
                        && j > i
                        && (chars[j - 1] == 'e' || chars[j - 1] == 'E')))
            {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{text}'")))?;
            out.push(Token::Num(v));
            i = j;
        } else {
            return Err(Error::Parse(format!("unexpected character '{ch}' in expression")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of expression".to_string()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Number(v)),
            Token::Var(second, index) => Ok(Expr::Var { second, index }),
            Token::Op('(') => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing ')'".to_string()));
                }
                self.pos += 1;
                Ok(e)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

/// A functional `φ` of one or two distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSpec {
    pub name: String,
    pub h: Vec<HFunction>,
    pub combiner: Combiner,
    pub arity: Arity,
}

impl FunctionalSpec {
    pub fn new(name: impl Into<String>, h: Vec<HFunction>, combiner: Combiner, arity: Arity) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::EmptyInput("h-function list"));
        }
        let k = h.len();
        let need = match (&combiner, arity) {
            (Combiner::Identity, Arity::One) => 1,
            (Combiner::Identity, Arity::Two) => {
                return Err(Error::invalid("combiner", "identity needs a one-sample functional"))
            }
            (Combiner::Difference | Combiner::Ratio, Arity::One) => 2,
            (Combiner::Difference | Combiner::Ratio, Arity::Two) => 1,
            (Combiner::Variance, Arity::One) => 2,
            (Combiner::Variance, Arity::Two) => {
                return Err(Error::invalid("combiner", "variance needs a one-sample functional"))
            }
            (Combiner::Expression(e), _) => {
                if arity == Arity::One && e.max_index(true).is_some() {
                    return Err(Error::invalid(
                        "combiner",
                        "y-variables need a two-sample functional",
                    ));
                }
                let m = e.max_index(false).max(e.max_index(true)).map_or(0, |i| i + 1);
                if m > k {
                    return Err(Error::invalid(
                        "combiner",
                        format!("expression uses {m} inputs but only {k} h-functions are given"),
                    ));
                }
                0
            }
        };
        if k < need {
            return Err(Error::invalid(
                "h-function list",
                format!("combiner needs {need} h-functions, got {k}"),
            ));
        }
        Ok(FunctionalSpec {
            name: name.into(),
            h,
            combiner,
            arity,
        })
    }

    /// Named functionals: `mean`, `variance`, `rmst(τ)`, `surv_prob(t)`,
    /// `diff_mean`, `ratio_surv(t)`, `diff_rmst(τ)` and `mass`.
    pub fn builtin(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &'static str| -> Result<f64> {
            let v = param.ok_or_else(|| Error::invalid(what, format!("'{name}' needs {what}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(what, format!("must be positive, got {v}")));
            }
            Ok(v)
        };
        use Arity::*;
        use Combiner as C;
        use HFunction as H;
        match name {
            "mean" => Self::new("mean", alloc::vec![H::Identity], C::Identity, One),
            "mass" => Self::new("mass", alloc::vec![H::Power(0)], C::Identity, One),
            "variance" => Self::new(
                "variance",
                alloc::vec![H::Power(2), H::Identity],
                C::Variance,
                One,
            ),
            "rmst" => {
                let tau = need("tau")?;
                Self::new(format!("rmst(tau={tau})"), alloc::vec![H::Truncation(tau)], C::Identity, One)
            }
            "surv_prob" | "surv" => {
                let t = need("t")?;
                Self::new(
                    format!("surv_prob(t={t})"),
                    alloc::vec![H::SurvivalIndicator(t)],
                    C::Identity,
                    One,
                )
            }
            "diff_mean" => Self::new("diff_mean", alloc::vec![H::Identity], C::Difference, Two),
            "ratio_surv" => {
                let t = need("t")?;
                Self::new(
                    format!("ratio_surv(t={t})"),
                    alloc::vec![H::SurvivalIndicator(t)],
                    C::Ratio,
                    Two,
                )
            }
            "diff_rmst" => {
                let tau = need("tau")?;
                Self::new(
                    format!("diff_rmst(tau={tau})"),
                    alloc::vec![H::Truncation(tau)],
                    C::Difference,
                    Two,
                )
            }
            other => Err(Error::invalid(
                "functional",
                format!("unknown functional '{other}'"),
            )),
        }
    }

    /// `(G h_1, …, G h_k)`.
    pub fn integrals(&self, g: &WeightedDistribution) -> Vec<f64> {
        self.h.iter().map(|h| g.integrate(|x| h.eval(x))).collect()
    }

    fn combine(&self, xs: &[f64], ys: &[f64]) -> Result<f64> {
        let two = self.arity == Arity::Two;
        let second = |i: usize| if two { ys[i] } else { xs[i + 1] };
        let v = match &self.combiner {
            Combiner::Identity => xs[0],
            Combiner::Difference => xs[0] - second(0),
            Combiner::Ratio => {
                let d = second(0);
                if d == 0.0 {
                    return Err(Error::Evaluation("ratio with zero denominator".to_string()));
                }
                xs[0] / d
            }
            Combiner::Variance => xs[0] - xs[1] * xs[1],
            Combiner::Expression(e) => e.eval(xs, ys)?,
        };
        if !v.is_finite() {
            return Err(Error::Evaluation(format!("non-finite value {v}")));
        }
        Ok(v)
    }

    /// `φ(G)` for a one-sample functional.
    pub fn evaluate(&self, g: &WeightedDistribution) -> Result<f64> {
        if self.arity != Arity::One {
            return Err(Error::invalid("arity", "two-sample functional needs two distributions"));
        }
        self.combine(&self.integrals(g), &[])
    }

    /// `φ(G_1, G_2)` for a two-sample functional.
    pub fn evaluate_two(&self, g1: &WeightedDistribution, g2: &WeightedDistribution) -> Result<f64> {
        if self.arity != Arity::Two {
            return Err(Error::invalid("arity", "one-sample functional takes one distribution"));
        }
        self.combine(&self.integrals(g1), &self.integrals(g2))
    }
}

impl FromStr for FunctionalSpec {
    type Err = Error;

    /// Command-line syntax: `mean`, `variance`, `rmst:tau=10`, `surv:t=10`,
    /// `diff_mean`, `ratio_surv:t=10`, `diff_rmst:tau=10`, or a custom
    /// `custom:h=x^2|x;f=x1-x2^2` (`custom2:` for two samples).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s, None),
        };
        if head == "custom" || head == "custom2" {
            let rest = rest.ok_or_else(|| Error::Parse("custom functional needs h=...;f=...".to_string()))?;
            let mut hs = None;
            let mut f = None;
            for part in rest.split(';') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
                match k.trim() {
                    "h" => {
                        hs = Some(
                            v.split('|')
                                .map(HFunction::from_str)
                                .collect::<Result<Vec<_>>>()?,
                        )
                    }
                    "f" => f = Some(Expr::parse(v)?),
                    other => return Err(Error::Parse(format!("unknown key '{other}'"))),
                }
            }
            let hs = hs.ok_or_else(|| Error::Parse("custom functional needs h=".to_string()))?;
            let f = f.ok_or_else(|| Error::Parse("custom functional needs f=".to_string()))?;
            let arity = if head == "custom2" { Arity::Two } else { Arity::One };
            return FunctionalSpec::new(s, hs, Combiner::Expression(f), arity);
        }
        let param = match rest {
            None => None,
            Some(r) => {
                let (k, v) = r
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got '{r}'")))?;
                let k = k.trim();
                if k != "t" && k != "tau" {
                    return Err(Error::Parse(format!("unknown parameter '{k}'")));
                }
                Some(
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("cannot parse number '{v}'")))?,
                )
            }
        };
        FunctionalSpec::builtin(head, param)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn wd(points: &[(f64, f64)]) -> WeightedDistribution {
        WeightedDistribution::new(
            points.iter().map(|p| p.0).collect(),
            points.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn point_mass_mean() {
        let phi = FunctionalSpec::builtin("mean", None).unwrap();
        assert_eq!(phi.evaluate(&wd(&[(2.0, 1.0)])).unwrap(), 2.0);
    }

    #[test]
    fn variance_of_two_points() {
        let phi = FunctionalSpec::builtin("variance", None).unwrap();
        let v = phi.evaluate(&wd(&[(1.0, 0.5), (3.0, 0.5)])).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rmst_hand_value() {
        let phi = FunctionalSpec::builtin("rmst", Some(10.0)).unwrap();
        let v = phi.evaluate(&wd(&[(4.0, 0.25), (12.0, 0.75)])).unwrap();
        assert!((v - 8.5).abs() < 1e-15);
    }

    #[test]
    fn builtins_have_expected_shape() {
        let s = FunctionalSpec::builtin("surv_prob", Some(10.0)).unwrap();
        assert_eq!(s.h, vec![HFunction::SurvivalIndicator(10.0)]);
        assert_eq!(s.combiner, Combiner::Identity);
        let r = FunctionalSpec::builtin("rmst", Some(10.0)).unwrap();
        assert_eq!(r.h, vec![HFunction::Truncation(10.0)]);
        let d = FunctionalSpec::builtin("diff_mean", None).unwrap();
        assert_eq!(d.arity, Arity::Two);
        assert_eq!(d.h, vec![HFunction::Identity]);
        assert_eq!(d.combiner, Combiner::Difference);
        assert!(FunctionalSpec::builtin("median", None).is_err());
        assert!(FunctionalSpec::builtin("rmst", Some(0.0)).is_err());
        assert!(FunctionalSpec::builtin("surv_prob", Some(-1.0)).is_err());
        assert!(FunctionalSpec::builtin("rmst", None).is_err());
    }

    #[test]
    fn survival_indicator_is_strict() {
        let phi = FunctionalSpec::builtin("surv_prob", Some(10.0)).unwrap();
        assert_eq!(phi.evaluate(&wd(&[(10.0, 1.0)])).unwrap(), 0.0);
        assert_eq!(phi.evaluate(&wd(&[(10.5, 1.0)])).unwrap(), 1.0);
    }

    #[test]
    fn cli_syntax() {
        let p: FunctionalSpec = "rmst:tau=10".parse().unwrap();
        assert_eq!(p.h, vec![HFunction::Truncation(10.0)]);
        let p: FunctionalSpec = "surv:t=10".parse().unwrap();
        assert_eq!(p.h, vec![HFunction::SurvivalIndicator(10.0)]);
        let p: FunctionalSpec = "ratio_surv:t=5".parse().unwrap();
        assert_eq!(p.arity, Arity::Two);
        let p: FunctionalSpec = "custom:h=x^2|x;f=x1-x2^2".parse().unwrap();
        let g = wd(&[(1.0, 0.5), (3.0, 0.5)]);
        assert!((p.evaluate(&g).unwrap() - 1.0).abs() < 1e-15);
        let p: FunctionalSpec = "custom2:h=min(x,10);f=(x1-y1)/2".parse().unwrap();
        let g2 = wd(&[(2.0, 1.0)]);
        assert!((p.evaluate_two(&g, &g2).unwrap() - 0.0).abs() < 1e-15);
        assert!("custom:h=x;f=x1-y1".parse::<FunctionalSpec>().is_err());
        assert!("custom:h=x;f=x1+x2".parse::<FunctionalSpec>().is_err());
        assert!("rmst:k=3".parse::<FunctionalSpec>().is_err());
    }

    #[test]
    fn ratio_with_zero_denominator_errors() {
        let phi = FunctionalSpec::builtin("ratio_surv", Some(10.0)).unwrap();
        let g1 = wd(&[(12.0, 1.0)]);
        let g2 = wd(&[(5.0, 1.0)]);
        assert!(matches!(phi.evaluate_two(&g1, &g2), Err(Error::Evaluation(_))));
        assert_eq!(phi.evaluate_two(&g1, &g1).unwrap(), 1.0);
    }

    #[test]
    fn expression_precedence() {
        let e = Expr::parse("-x1^2 + 3*(x2 - 1)/2").unwrap();
        assert!((e.eval(&[2.0, 5.0], &[]).unwrap() - (-4.0 + 6.0)).abs() < 1e-15);
        let e = Expr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(&[], &[]).unwrap(), 512.0);
        assert!(Expr::parse("x1 +").is_err());
        assert!(Expr::parse("(x1").is_err());
        assert!(Expr::parse("x0").is_err());
        assert!(Expr::parse("sqrt(x1)").is_err());
        assert!(Expr::parse("1e-3*x1").is_ok());
    }

    #[test]
    fn arity_mismatch() {
        let one = FunctionalSpec::builtin("mean", None).unwrap();
        let two = FunctionalSpec::builtin("diff_mean", None).unwrap();
        let g = wd(&[(1.0, 1.0)]);
        assert!(one.evaluate_two(&g, &g).is_err());
        assert!(two.evaluate(&g).is_err());
    }
}
