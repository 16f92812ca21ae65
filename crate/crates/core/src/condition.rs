//! Boolean conditions over world variables.
//!
//! Concrete syntax is a prefix-notation JSON array:
//! `["and", ["==", "priority", "high"], [">=", "energy", 4]]`.
//! `true`/`false` and `{"var": value, ...}` patterns are accepted as input
//! shorthands and normalize to `["and"]`, `["or"]` and a conjunction of
//! equalities respectively.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value as Json;

use crate::report::Report;
use crate::value::Value;
use crate::world::{var_index, VariableSpec, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "==" => Comparator::Eq,
            "!=" => Comparator::Ne,
            "<" => Comparator::Lt,
            "<=" => Comparator::Le,
            ">" => Comparator::Gt,
            ">=" => Comparator::Ge,
            _ => return None,
        })
    }

    pub fn is_ordered(self) -> bool {
        !matches!(self, Comparator::Eq | Comparator::Ne)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Condition {
    Atom {
        variable: String,
        op: Comparator,
        value: Value,
    },
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    /// The empty conjunction.
    pub fn always() -> Self {
        Condition::And(Vec::new())
    }

    pub fn atom(variable: impl Into<String>, op: Comparator, value: impl Into<Value>) -> Self {
        Condition::Atom {
            variable: variable.into(),
            op,
            value: value.into(),
        }
    }

    pub fn eq(variable: impl Into<String>, value: impl Into<Value>) -> Self {
        Self::atom(variable, Comparator::Eq, value)
    }

    pub fn and(parts: impl IntoIterator<Item = Condition>) -> Self {
        Condition::And(parts.into_iter().collect())
    }

    pub fn or(parts: impl IntoIterator<Item = Condition>) -> Self {
        Condition::Or(parts.into_iter().collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Condition) -> Self {
        Condition::Not(Box::new(inner))
    }

    pub fn is_always(&self) -> bool {
        matches!(self, Condition::And(parts) if parts.is_empty())
    }

    /// `w ⊨ c`. Unknown variables never satisfy an atom; validation rejects
    /// them before evaluation.
    pub fn eval(&self, vars: &[VariableSpec], world: &WorldState) -> bool {
        match self {
            Condition::Atom { variable, op, value } => {
                match var_index(vars, variable).and_then(|i| world.0.get(i)) {
                    Some(actual) => compare(actual, *op, value),
                    None => false,
                }
            }
            Condition::And(parts) => parts.iter().all(|c| c.eval(vars, world)),
            Condition::Or(parts) => parts.iter().any(|c| c.eval(vars, world)),
            Condition::Not(inner) => !inner.eval(vars, world),
        }
    }

    /// Reference and typing checks; findings are appended under `path`.
    pub fn validate(&self, vars: &[VariableSpec], path: &str, report: &mut Report) {
        match self {
            Condition::Atom { variable, op, value } => {
                let Some(spec) = var_index(vars, variable).map(|i| &vars[i]) else {
                    report.error(path, format!("undeclared variable `{variable}`"));
                    return;
                };
                if op.is_ordered() {
                    if !spec.is_integer() {
                        report.error(
                            path,
                            format!(
                                "`{}` needs an integer domain but `{variable}` is symbolic",
                                op.symbol()
                            ),
                        );
                    } else if !value.is_int() {
                        report.error(
                            path,
                            format!(
                                "`{}` compares `{variable}` with non-integer `{value}`",
                                op.symbol()
                            ),
                        );
                    }
                } else if spec.position(value).is_none() {
                    report.warning(
                        path,
                        format!("`{value}` is not in the domain of `{variable}`; the atom is constant"),
                    );
                }
            }
            Condition::And(parts) | Condition::Or(parts) => {
                for (i, c) in parts.iter().enumerate() {
                    c.validate(vars, &format!("{path}[{}]", i + 1), report);
                }
            }
            Condition::Not(inner) => inner.validate(vars, &format!("{path}[1]"), report),
        }
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Condition::Atom { variable, .. } => out.push(variable),
            Condition::And(ps) | Condition::Or(ps) => ps.iter().for_each(|c| c.collect_vars(out)),
            Condition::Not(c) => c.collect_vars(out),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Condition::Atom { variable, op, value } => Json::Array(vec![
                Json::from(op.symbol()),
                Json::from(variable.as_str()),
                serde_json::to_value(value).expect("values serialize"),
            ]),
            Condition::And(ps) if ps.is_empty() => Json::Bool(true),
            Condition::Or(ps) if ps.is_empty() => Json::Bool(false),
            Condition::And(ps) if ps.is_empty() => Json::Bool(true),
            Condition::Or(ps) if ps.is_empty() => Json::Bool(false),
            Condition::And(ps) | Condition::Or(ps) => {
                let head = if matches!(self, Condition::And(_)) {
                    "and"
                } else {
                    "or"
                };
                let mut items = vec![Json::from(head)];
                items.extend(ps.iter().map(Condition::to_json));
                Json::Array(items)
            }
            Condition::Not(c) => Json::Array(vec![Json::from("not"), c.to_json()]),
        }
    }

    pub fn from_json(json: &Json) -> Result<Self, String> {
        match json {
            Json::Bool(true) => Ok(Condition::always()),
            Json::Bool(false) => Ok(Condition::Or(Vec::new())),
            Json::Object(map) => map
                .iter()
                .map(|(k, v)| Ok(Condition::eq(k.clone(), json_value(v)?)))
                .collect::<Result<Vec<_>, String>>()
                .map(Condition::And),
            Json::Array(items) => {
                let head = items
                    .first()
                    .and_then(Json::as_str)
                    .ok_or("condition array must start with an operator string")?;
                let rest = &items[1..];
                match head {
                    "and" | "or" => {
                        let parts = rest
                            .iter()
                            .enumerate()
                            .map(|(i, c)| Condition::from_json(c).map_err(|e| format!("[{}]: {e}", i + 1)))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(if head == "and" {
                            Condition::And(parts)
                        } else {
                            Condition::Or(parts)
                        })
                    }
                    "not" => match rest {
                        [inner] => Ok(Condition::not(
                            Condition::from_json(inner).map_err(|e| format!("[1]: {e}"))?,
                        )),
                        _ => Err(format!("`not` takes one operand, got {}", rest.len())),
                    },
                    op => {
                        let op = Comparator::parse(op).ok_or_else(|| format!("unknown operator `{op}`"))?;
                        match rest {
                            [Json::String(var), value] => {
                                Ok(Condition::atom(var.clone(), op, json_value(value)?))
                            }
                            _ => Err(format!("`{}` takes a variable name and a constant", op.symbol())),
                        }
                    }
                }
            }
            other => Err(format!("not a condition: {other}")),
        }
    }
}

fn json_value(v: &Json) -> Result<Value, String> {
    match v {
        Json::String(s) => Ok(Value::Sym(s.clone())),
        Json::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| format!("constant {n} is not an integer")),
        other => Err(format!("constant must be a string or integer, got {other}")),
    }
}

fn compare(actual: &Value, op: Comparator, expected: &Value) -> bool {
    match op {
        Comparator::Eq => actual == expected,
        Comparator::Ne => actual != expected,
        _ => match (actual.as_int(), expected.as_int()) {
            (Some(a), Some(b)) => match op {
                Comparator::Lt => a < b,
                Comparator::Le => a <= b,
                Comparator::Gt => a > b,
                Comparator::Ge => a >= b,
                Comparator::Eq | Comparator::Ne => unreachable!(),
            },
            _ => false,
        },
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let json = Json::deserialize(d)?;
        Condition::from_json(&json).map_err(D::Error::custom)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn nested(c: &Condition) -> String {
            match c {
                Condition::And(ps) | Condition::Or(ps) if ps.len() > 1 => format!("({c})"),
                _ => c.to_string(),
            }
        }
        match self {
            Condition::Atom { variable, op, value } => write!(f, "{variable} {} {value}", op.symbol()),
            Condition::And(ps) if ps.is_empty() => f.write_str("true"),
            Condition::Or(ps) if ps.is_empty() => f.write_str("false"),
            Condition::And(ps) | Condition::Or(ps) => {
                let sep = if matches!(self, Condition::And(_)) {
                    " and "
                } else {
                    " or "
                };
                let parts: Vec<String> = ps.iter().map(nested).collect();
                f.write_str(&parts.join(sep))
            }
            Condition::Not(c) => match **c {
                Condition::Atom { .. } => write!(f, "not ({c})"),
                _ => write!(f, "not {}", nested(c)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn vars() -> Vec<VariableSpec> {
        vec![
            VariableSpec::symbolic("priority", &["low", "high"]),
            VariableSpec::new("energy", (0..=10).map(Value::Int)),
            VariableSpec::new("x", [Value::Int(0), Value::Int(1)]),
        ]
    }

    fn world(priority: &str, energy: i64, x: i64) -> WorldState {
        WorldState(vec![Value::sym(priority), Value::Int(energy), Value::Int(x)])
    }

    #[test]
    fn empty_conjunction_holds_everywhere() {
        let c = Condition::always();
        assert!(c.eval(&vars(), &world("low", 0, 0)));
        assert!(c.eval(&vars(), &world("high", 10, 1)));
        assert_eq!(c.to_string(), "true");
        assert_eq!(Condition::from_json(&json!(true)).unwrap(), c);
    }

    #[test]
    fn priority_and_energy() {
        let c =
            Condition::from_json(&json!(["and", ["==", "priority", "high"], [">=", "energy", 4]])).unwrap();
        assert!(c.eval(&vars(), &world("high", 4, 0)));
        assert!(!c.eval(&vars(), &world("high", 3, 0)));
        assert!(!c.eval(&vars(), &world("low", 9, 0)));
        assert_eq!(c.to_string(), "priority == high and energy >= 4");
    }

    #[test]
    fn negation() {
        let c = Condition::from_json(&json!(["not", ["==", "x", 1]])).unwrap();
        assert!(!c.eval(&vars(), &world("low", 0, 1)));
        assert!(c.eval(&vars(), &world("low", 0, 0)));
        assert_eq!(c.to_string(), "not (x == 1)");
    }

    #[test]
    fn pattern_shorthand_is_conjunction() {
        let c = Condition::from_json(&json!({"priority": "high", "x": 0})).unwrap();
        assert_eq!(
            c,
            Condition::and([Condition::eq("priority", "high"), Condition::eq("x", 0)])
        );
    }

    #[test]
    fn json_round_trip() {
        let c = Condition::or([
            Condition::not(Condition::atom("energy", Comparator::Lt, 3)),
            Condition::and([
                Condition::eq("priority", "low"),
                Condition::atom("x", Comparator::Ne, 1),
            ]),
        ]);
        let back = Condition::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn malformed_conditions() {
        assert!(Condition::from_json(&json!(["xor", true])).is_err());
        assert!(Condition::from_json(&json!(["not", true, false])).is_err());
        assert!(Condition::from_json(&json!(["==", "x"])).is_err());
        assert!(Condition::from_json(&json!(["==", "x", 1.5])).is_err());
        assert!(Condition::from_json(&json!(3)).is_err());
    }

    #[test]
    fn validation_findings() {
        let vs = vars();
        let mut r = Report::new();
        Condition::eq("ghost", 1).validate(&vs, "c", &mut r);
        Condition::atom("priority", Comparator::Gt, "low").validate(&vs, "c", &mut r);
        Condition::eq("priority", "medium").validate(&vs, "c", &mut r);
        assert_eq!(r.errors().count(), 2);
        assert_eq!(r.warnings().count(), 1);
        assert!(r.issues[0].message.contains("ghost"));
    }
}
