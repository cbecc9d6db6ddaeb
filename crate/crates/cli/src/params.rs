//! Decoding numbers and parameter files.
//!
//! A number is a JSON number, a string ("3/7", "0.25", "1e-3") or an [re, im] pair.

use origami::nekrasov::ParamSet;
use origami::scalar::{fmt_q, parse_q, Q, C64};
use origami::specfun::TheoryKind;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::Fail;

pub fn config(msg: impl Into<String>) -> Fail {
    Fail::Config(msg.into())
}

/// Inline JSON (starting with `{` or `[`) or a path to a JSON file.
pub fn load_json(src: &str) -> Result<Value, Fail> {
    let text = if src.trim_start().starts_with(['{', '[']) {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| config(format!("cannot read {src}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| config(format!("invalid JSON in {src}: {e}")))
}

pub fn parse_value_str(s: &str) -> Result<Value, Fail> {
    let t = s.trim();
    if t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| config(format!("invalid number {s}: {e}")))
    } else {
        Ok(Value::String(t.to_string()))
    }
}

pub fn to_q(v: &Value) -> Result<Q, Fail> {
    match v {
        Value::Number(n) => parse_q(&n.to_string()).ok_or_else(|| config(format!("not a rational: {n}"))),
        Value::String(s) => parse_q(s).ok_or_else(|| config(format!("not a rational: {s}"))),
        Value::Array(a) if a.len() == 2 => {
            let im = to_q(&a[1])?;
            if im != Q::from_integer(0.into()) {
                return Err(config("exact mode takes real rationals only"));
            }
            to_q(&a[0])
        }
        _ => Err(config(format!("not a number: {v}"))),
    }
}

fn to_f64(v: &Value) -> Result<f64, Fail> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| config(format!("not a number: {n}"))),
        Value::String(s) => {
            if let Ok(f) = s.trim().parse::<f64>() {
                return Ok(f);
            }
            let q = parse_q(s).ok_or_else(|| config(format!("not a number: {s}")))?;
            Ok(origami::scalar::Scalar::to_c64(&q).map(|c| c.re).unwrap_or(f64::NAN))
        }
        _ => Err(config(format!("not a real number: {v}"))),
    }
}

pub fn to_c64(v: &Value) -> Result<C64, Fail> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(C64::new(to_f64(&a[0])?, to_f64(&a[1])?)),
        _ => Ok(C64::new(to_f64(v)?, 0.0)),
    }
}

pub fn list<T>(v: &Value, f: impl Fn(&Value) -> Result<T, Fail>) -> Result<Vec<T>, Fail> {
    v.as_array().ok_or_else(|| config(format!("expected an array, got {v}")))?.iter().map(f).collect()
}

pub fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, Fail> {
    v.get(name).ok_or_else(|| config(format!("parameter file is missing `{name}`")))
}

pub fn q_json(v: &Q) -> Value {
    Value::String(fmt_q(v))
}

pub fn c_json(v: &C64) -> Value {
    json!([v.re, v.im])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Theory {
    #[value(name = "4d")]
    D4,
    #[value(name = "5d")]
    D5,
    #[value(name = "6d")]
    D6,
}

impl Theory {
    pub fn label(self) -> &'static str {
        match self {
            Theory::D4 => "4d",
            Theory::D5 => "5d",
            Theory::D6 => "6d",
        }
    }
}

/// Gauge-theory parameters as read from `a`, `eps`, `q` and (6d only) `p_nome`.
#[derive(Clone, Debug, Deserialize)]
pub struct RawParams {
    pub a: Vec<Value>,
    pub eps: Vec<Value>,
    #[serde(default)]
    pub q: Option<Value>,
    #[serde(default)]
    pub p_nome: Option<Value>,
}

impl RawParams {
    pub fn from_value(v: Value) -> Result<Self, Fail> {
        let raw: RawParams = serde_json::from_value(v).map_err(|e| config(format!("bad parameter file: {e}")))?;
        if raw.eps.len() != 3 {
            return Err(config("eps must have three entries (ε₁, ε₂, ε₃)"));
        }
        if raw.a.is_empty() {
            return Err(config("a must have at least one entry"));
        }
        Ok(raw)
    }

    /// Seeded generic rationals: a_α, ε's with numerators up to 50 over denominators up to 37.
    pub fn random(n: usize, seed: u64) -> Self {
        use origami::sample::{rational_nonzero, rng};
        let mut g = rng(seed);
        let mut draw = || q_json(&rational_nonzero(&mut g, 50, 37));
        let a = (0..n).map(|_| draw()).collect();
        let eps = (0..3).map(|_| draw()).collect();
        RawParams { a, eps, q: Some(Value::String("1/10".into())), p_nome: None }
    }

    pub fn exact(&self) -> Result<ParamSet<Q>, Fail> {
        let a = self.a.iter().map(to_q).collect::<Result<_, _>>()?;
        let eps = [to_q(&self.eps[0])?, to_q(&self.eps[1])?, to_q(&self.eps[2])?];
        let q = match &self.q {
            Some(v) => to_q(v)?,
            None => parse_q("1/10").unwrap(),
        };
        Ok(ParamSet::new(a, eps, q, TheoryKind::H))
    }

    pub fn float(&self, theory: Theory) -> Result<ParamSet<C64>, Fail> {
        let a = self.a.iter().map(to_c64).collect::<Result<_, _>>()?;
        let eps = [to_c64(&self.eps[0])?, to_c64(&self.eps[1])?, to_c64(&self.eps[2])?];
        let q = match &self.q {
            Some(v) => to_c64(v)?,
            None => C64::new(0.1, 0.0),
        };
        let kind = match theory {
            Theory::D4 => TheoryKind::H,
            Theory::D5 => TheoryKind::K,
            Theory::D6 => {
                let nome = to_c64(self.p_nome.as_ref().ok_or_else(|| config("6d theory needs p_nome"))?)?;
                TheoryKind::ell(nome).map_err(Fail::Core)?
            }
        };
        Ok(ParamSet::new(a, eps, q, kind))
    }

    pub fn echo(&self) -> Value {
        let mut v = json!({ "a": self.a, "eps": self.eps });
        if let Some(q) = &self.q {
            v["q"] = q.clone();
        }
        if let Some(p) = &self.p_nome {
            v["p_nome"] = p.clone();
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_forms() {
        assert_eq!(to_q(&json!("3/7")).unwrap(), parse_q("3/7").unwrap());
        assert_eq!(to_q(&json!(0.25)).unwrap(), parse_q("1/4").unwrap());
        assert_eq!(to_q(&json!(["1/2", 0])).unwrap(), parse_q("1/2").unwrap());
        assert!(to_q(&json!(["1/2", 1])).is_err());
        assert_eq!(to_c64(&json!([0.5, -1])).unwrap(), C64::new(0.5, -1.0));
        assert_eq!(to_c64(&json!("1/4")).unwrap(), C64::new(0.25, 0.0));
        assert!(to_q(&json!({})).is_err());
    }

    #[test]
    fn random_params_are_reproducible() {
        let a = RawParams::random(2, 7).echo();
        let b = RawParams::random(2, 7).echo();
        assert_eq!(a, b);
        assert_ne!(a, RawParams::random(2, 8).echo());
    }
}
