//! Parameter bag merged from a JSON config and command-line flags, with typed
//! getters that record every value they hand out.

use std::cell::RefCell;
use std::fmt;

use gausslab::{ComplexHP, GaussInt};
use serde_json::{Map, Value};

pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISSING: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn missing(field: &str) -> Self {
        CliError { code: EXIT_MISSING, msg: format!("missing field `{field}`") }
    }

    pub fn invalid(field: &str, why: impl fmt::Display) -> Self {
        CliError { code: EXIT_PRECONDITION, msg: format!("field `{field}`: {why}") }
    }
}

impl From<gausslab::Error> for CliError {
    fn from(e: gausslab::Error) -> Self {
        use gausslab::Error as E;
        let code = match e {
            E::Precondition(_) | E::ZeroInput(_) | E::Parse(_) => EXIT_PRECONDITION,
            _ => EXIT_COMPUTE,
        };
        CliError { code, msg: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Upper-case config keys accepted as aliases of flag names.
const ALIASES: [(&str, &str); 5] = [("N", "n"), ("A", "a"), ("B", "b"), ("C", "c_const"), ("P", "p")];

pub struct Bag {
    values: Map<String, Value>,
    prec: u32,
    used: RefCell<Vec<(String, Value)>>,
}

fn normalize_key(k: &str) -> String {
    ALIASES.iter().find(|(a, _)| *a == k).map(|(_, b)| b.to_string()).unwrap_or_else(|| k.replace('-', "_"))
}

impl Bag {
    /// `config` entries first, then `flags` on top. A `sector` object in the
    /// config is spread into `r_min`, `r_max`, `theta_min`, `theta_max`.
    pub fn new(config: Map<String, Value>, flags: Map<String, Value>, prec: u32) -> CliResult<Bag> {
        let mut values = Map::new();
        for (k, v) in config {
            let k = normalize_key(&k);
            match (k.as_str(), v) {
                ("sector", Value::Object(s)) => {
                    for (sk, sv) in s {
                        values.insert(normalize_key(&sk), sv);
                    }
                }
                ("sector", _) => return Err(CliError::invalid("sector", "expected an object")),
                (_, v) => {
                    values.insert(k, v);
                }
            }
        }
        for (k, v) in flags {
            if !v.is_null() {
                values.insert(normalize_key(&k), v);
            }
        }
        Ok(Bag { values, prec, used: RefCell::new(Vec::new()) })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// Parameters handed out so far, in request order.
    pub fn used(&self) -> Vec<(String, Value)> {
        self.used.borrow().clone()
    }

    fn note(&self, key: &str, v: Value) {
        let mut used = self.used.borrow_mut();
        if !used.iter().any(|(k, _)| k == key) {
            used.push((key.to_string(), v));
        }
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn f64_opt(&self, key: &str) -> CliResult<Option<f64>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let x = match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse::<f64>().ok(),
            _ => None,
        }
        .ok_or_else(|| CliError::invalid(key, format!("expected a number, got {v}")))?;
        if !x.is_finite() {
            return Err(CliError::invalid(key, "must be finite"));
        }
        self.note(key, v.clone());
        Ok(Some(x))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        self.f64_opt(key)?.ok_or_else(|| CliError::missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.f64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, gausslab::report::num(default));
                Ok(default)
            }
        }
    }

    pub fn u64_opt(&self, key: &str) -> CliResult<Option<u64>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let x = match v {
            Value::Number(n) => n.as_u64().or_else(|| n.as_f64().filter(|f| f.fract() == 0.0 && *f >= 0.0 && *f < 1.8e19).map(|f| f as u64)),
            Value::String(s) => s.trim().parse::<u64>().ok(),
            _ => None,
        }
        .ok_or_else(|| CliError::invalid(key, format!("expected a non-negative integer, got {v}")))?;
        self.note(key, v.clone());
        Ok(Some(x))
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        self.u64_opt(key)?.ok_or_else(|| CliError::missing(key))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> CliResult<u64> {
        match self.u64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, default.into());
                Ok(default)
            }
        }
    }

    pub fn str_or(&self, key: &str, default: &str) -> CliResult<String> {
        let s = match self.raw(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => return Err(CliError::invalid(key, format!("expected a string, got {v}"))),
        };
        self.note(key, Value::String(s.clone()));
        Ok(s)
    }

    /// A string like `0.31+0.17i` or a preset name, or `[re, im]` decimal strings.
    pub fn complex(&self, key: &str) -> CliResult<ComplexHP> {
        let v = self.raw(key).ok_or_else(|| CliError::missing(key))?;
        let c = match v {
            Value::String(s) => ComplexHP::parse(s, self.prec),
            Value::Array(a) if a.len() == 2 => {
                let part = |x: &Value| match x {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(CliError::invalid(key, "components must be decimal strings")),
                };
                ComplexHP::from_decimal(&part(&a[0])?, &part(&a[1])?, self.prec)
            }
            Value::Number(n) => ComplexHP::from_decimal(&n.to_string(), "0", self.prec),
            _ => return Err(CliError::invalid(key, format!("expected a complex constant, got {v}"))),
        }
        .map_err(|e| CliError::invalid(key, e))?;
        self.note(key, v.clone());
        Ok(c)
    }

    /// A Gaussian integer as `a+bi` or `[a, b]`.
    pub fn gauss_opt(&self, key: &str) -> CliResult<Option<GaussInt>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let bad = || CliError::invalid(key, format!("expected a Gaussian integer, got {v}"));
        let g = match v {
            Value::Array(a) if a.len() == 2 => {
                GaussInt::new(a[0].as_i64().ok_or_else(bad)?, a[1].as_i64().ok_or_else(bad)?)
            }
            Value::Number(n) => GaussInt::new(n.as_i64().ok_or_else(bad)?, 0),
            Value::String(s) => s.parse::<GaussInt>().map_err(|_| bad())?,
            _ => return Err(bad()),
        };
        self.note(key, v.clone());
        Ok(Some(g))
    }

    pub fn gauss_or(&self, key: &str, default: GaussInt) -> CliResult<GaussInt> {
        match self.gauss_opt(key)? {
            Some(g) => Ok(g),
            None => {
                self.note(key, Value::String(default.to_string()));
                Ok(default)
            }
        }
    }
}
