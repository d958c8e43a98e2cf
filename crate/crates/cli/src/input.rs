use std::fs;

use cvwitness::exact::{parse_decimal, ExactMatrix3, QuadraticNumber};
use cvwitness::states::{
    make_ghzw_state_exact, make_proposition_state, make_xi_state_exact, GaussianPureState,
};
use cvwitness::{Error, Result};
use num_rational::BigRational;
use serde_json::Value;

use crate::args::{Family, StateArgs};

fn required(value: &Option<String>, flag: &str) -> Result<BigRational> {
    let text = value
        .as_deref()
        .ok_or_else(|| Error::Domain(format!("--{flag} is required for this family")))?;
    parse_decimal(text)
}

/// Resolves the state selected on the command line.
pub fn load_state(args: &StateArgs) -> Result<GaussianPureState> {
    if let Some(path) = &args.state {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("reading {}: {e}", path.display())))?;
        return parse_state_file(&text);
    }
    match args.family {
        Some(Family::Xi) => make_xi_state_exact(required(&args.xi, "xi")?),
        Some(Family::Ghzw) => make_ghzw_state_exact(required(&args.a, "a")?).map(|(s, _)| s),
        Some(Family::Proposition) => Ok(make_proposition_state()),
        Some(Family::Vacuum) => make_xi_state_exact(parse_decimal("0")?),
        None => Err(Error::Domain(
            "select a state with --family or --state".into(),
        )),
    }
}

fn number_text(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(Error::Format(format!("expected a number, got {v}"))),
    }
}

fn decimal_field(obj: &serde_json::Map<String, Value>, key: &str) -> Result<BigRational> {
    let v = obj
        .get(key)
        .ok_or_else(|| Error::Format(format!("state file is missing \"{key}\"")))?;
    parse_decimal(&number_text(v)?)
}

fn matrix_field(v: &Value) -> Result<ExactMatrix3> {
    let rows = v
        .as_array()
        .filter(|r| r.len() == 3)
        .ok_or_else(|| Error::Format("\"A\" must be a 3×3 array".into()))?;
    let mut entries = Vec::with_capacity(9);
    for row in rows {
        let row = row
            .as_array()
            .filter(|r| r.len() == 3)
            .ok_or_else(|| Error::Format("\"A\" must be a 3×3 array".into()))?;
        for x in row {
            entries.push(QuadraticNumber::from_rational(parse_decimal(
                &number_text(x)?,
            )?));
        }
    }
    Ok(ExactMatrix3::from_fn(|i, j| entries[3 * i + j].clone()))
}

/// `{"kind": "xi"|"ghzw"|"proposition"|"raw", "xi": .., "a": .., "A": [[..]]}`.
/// Numbers may be JSON numbers or decimal strings and are read exactly.
pub fn parse_state_file(text: &str) -> Result<GaussianPureState> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("state file: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Format("state file must hold a JSON object".into()))?;
    let kind = match obj.get("kind") {
        Some(Value::String(k)) => k.as_str(),
        Some(_) => return Err(Error::Format("\"kind\" must be a string".into())),
        None if obj.contains_key("A") => "raw",
        None => return Err(Error::Format("state file needs \"kind\" or \"A\"".into())),
    };
    match kind {
        "xi" => make_xi_state_exact(decimal_field(obj, "xi")?),
        "ghzw" => make_ghzw_state_exact(decimal_field(obj, "a")?).map(|(s, _)| s),
        "proposition" => Ok(make_proposition_state()),
        "raw" => {
            let a = obj
                .get("A")
                .ok_or_else(|| Error::Format("raw state needs \"A\"".into()))?;
            GaussianPureState::from_exact(matrix_field(a)?)
        }
        other => Err(Error::Format(format!("unknown state kind \"{other}\""))),
    }
}
