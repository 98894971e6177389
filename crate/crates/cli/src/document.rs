//! JSON documents: game specs in, solutions and reports out.
//!
//! Every rational is written as a canonical `p/q` string, usually next to
//! a `*_decimal` convenience float. Inputs accept strings or JSON numbers;
//! numbers keep their source text, so `0.4` parses as exactly `2/5`.
//! Objects are `serde_json` maps, which keep keys sorted.

use std::fmt;

use alignment_core::model::{
    Arc, Atom, CostProfile, Domain, Family, GameSpec, MixedStrategy, PureStrategy, Solution, Subset,
    MAX_GROUND_SET,
};
use alignment_core::oracle::{Number, VerificationReport};
use alignment_core::rational::{canonical, is_unit_interval, parse_rational, to_f64, Rational};
use alignment_core::simulate::SimulationResult;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

/// A document that failed to parse or validate, with the path of the
/// offending field (`$` is the whole document).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentError {
    pub field: String,
    pub message: String,
}

impl DocumentError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        DocumentError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for DocumentError {}

type Result<T> = std::result::Result<T, DocumentError>;

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| DocumentError::new("$", format!("not valid JSON: {e}")))
}

fn object<'a>(value: &'a Value, field: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let map = value
        .as_object()
        .ok_or_else(|| DocumentError::new(field, "expected an object"))?;
    if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(DocumentError::new(join(field, key), "unknown field"));
    }
    Ok(map)
}

fn join(parent: &str, key: &str) -> String {
    if parent == "$" {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

fn required<'a>(map: &'a Map<String, Value>, parent: &str, key: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| DocumentError::new(join(parent, key), "missing field"))
}

fn string<'a>(value: &'a Value, field: &str) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| DocumentError::new(field, "expected a string"))
}

/// A rational from a JSON string (`"2/5"`, `"0.4"`) or number (`0.4`).
pub fn rational(value: &Value, field: &str) -> Result<Rational> {
    let text = match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(DocumentError::new(field, "expected a number or numeric string")),
    };
    parse_rational(&text).map_err(|e| DocumentError::new(field, e.to_string()))
}

fn count(value: &Value, field: &str, max: usize) -> Result<usize> {
    value
        .as_u64()
        .and_then(|k| usize::try_from(k).ok())
        .filter(|&k| k <= max)
        .ok_or_else(|| DocumentError::new(field, format!("expected an integer in 0..={max}")))
}

fn rational_list(value: &Value, field: &str) -> Result<Vec<Rational>> {
    let items = value
        .as_array()
        .ok_or_else(|| DocumentError::new(field, "expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| rational(v, &format!("{field}[{i}]")))
        .collect()
}

fn parse_domain(value: &Value) -> Result<&str> {
    let name = string(value, "domain")?;
    match name {
        "circle" | "interval" | "finite" => Ok(name),
        _ => Err(DocumentError::new(
            "domain",
            format!("unknown domain {name:?}; expected \"circle\", \"interval\" or \"finite\""),
        )),
    }
}

fn parse_family(value: &Value, field: &str, continuous: bool, n: usize) -> Result<Family> {
    let map = object(value, field, &["type", "k", "value", "sets"])?;
    let kind = string(required(map, field, "type")?, &join(field, "type"))?;
    let extra = |allowed: &[&str]| -> Result<()> {
        match map.keys().find(|k| *k != "type" && !allowed.contains(&k.as_str())) {
            Some(key) => Err(DocumentError::new(
                join(field, key),
                format!("not a field of a {kind} family"),
            )),
            None => Ok(()),
        }
    };
    let family = match kind {
        "power_set" => {
            extra(&[])?;
            Family::PowerSet
        }
        "fixed_cardinality" => {
            extra(&["k"])?;
            let k_field = join(field, "k");
            Family::FixedCardinality(count(required(map, field, "k")?, &k_field, n)?)
        }
        "explicit" => {
            extra(&["sets"])?;
            let sets_field = join(field, "sets");
            let sets = required(map, field, "sets")?
                .as_array()
                .ok_or_else(|| DocumentError::new(&sets_field, "expected an array of sets"))?;
            if sets.is_empty() {
                return Err(DocumentError::new(sets_field, "no sets"));
            }
            let sets = sets
                .iter()
                .enumerate()
                .map(|(i, s)| subset(s, &format!("{sets_field}[{i}]"), n))
                .collect::<Result<Vec<_>>>()?;
            Family::Explicit(sets)
        }
        "free_length" => {
            extra(&[])?;
            Family::FreeLength
        }
        "fixed_length" => {
            extra(&["value"])?;
            let value_field = join(field, "value");
            let x = rational(required(map, field, "value")?, &value_field)?;
            if !is_unit_interval(&x) {
                return Err(DocumentError::new(value_field, "length must lie in [0, 1]"));
            }
            Family::FixedLength(x)
        }
        other => {
            return Err(DocumentError::new(
                join(field, "type"),
                format!("unknown family type {other:?}"),
            ))
        }
    };
    if family.is_continuous() != continuous {
        let domain = if continuous { "continuous" } else { "finite" };
        return Err(DocumentError::new(
            join(field, "type"),
            format!("{kind} is not a {domain} family"),
        ));
    }
    Ok(family)
}

/// A subset written as a list of one-based locations.
fn subset(value: &Value, field: &str, n: usize) -> Result<Subset> {
    let items = value
        .as_array()
        .ok_or_else(|| DocumentError::new(field, "expected an array of locations"))?;
    let mut indices = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let j = item
            .as_u64()
            .and_then(|j| usize::try_from(j).ok())
            .filter(|&j| (1..=n).contains(&j))
            .ok_or_else(|| DocumentError::new(format!("{field}[{i}]"), format!("expected a location in 1..={n}")))?;
        indices.push(j - 1);
    }
    Subset::from_indices(n, indices).map_err(|e| DocumentError::new(field, e.to_string()))
}

fn nonnegative(values: &[Rational], field: &str) -> Result<()> {
    match values.iter().position(Signed::is_negative) {
        Some(i) => Err(DocumentError::new(format!("{field}[{i}]"), "must be non-negative")),
        None => Ok(()),
    }
}

/// Parses and validates a game document.
pub fn parse_game_spec(text: &str) -> Result<GameSpec> {
    game_spec_from_value(&parse_json(text)?, "$")
}

pub fn game_spec_from_value(value: &Value, field: &str) -> Result<GameSpec> {
    let map = object(value, field, &["domain", "costs", "penalties", "hider", "searcher", "n"])?;
    let domain = parse_domain(required(map, field, "domain")?)?;
    let costs_field = join(field, "costs");
    let penalties_field = join(field, "penalties");
    let costs = required(map, field, "costs")?;
    let penalties = map.get("penalties");
    let (domain, profile) = match domain {
        "circle" | "interval" => {
            if let Some(key) = ["n"].iter().find(|k| map.contains_key(**k)) {
                return Err(DocumentError::new(join(field, key), "only finite games have n"));
            }
            let rate = |value: &Value, name: &str| -> Result<Rational> {
                if value.is_array() {
                    return Err(DocumentError::new(name, "a continuous game takes a single rate"));
                }
                let r = rational(value, name)?;
                if !r.is_positive() {
                    return Err(DocumentError::new(name, "rate must be positive"));
                }
                Ok(r)
            };
            let c = rate(costs, &costs_field)?;
            let pi = match penalties {
                Some(p) => rate(p, &penalties_field)?,
                None => c.clone(),
            };
            let domain = if domain == "circle" { Domain::Circle } else { Domain::Interval };
            (domain, CostProfile::continuous(c, pi).map_err(|e| DocumentError::new(field, e.to_string()))?)
        }
        _ => {
            let n_field = join(field, "n");
            let n = map.get("n").map(|v| count(v, &n_field, MAX_GROUND_SET)).transpose()?;
            let list = |value: &Value, name: &str| -> Result<Vec<Rational>> {
                if value.is_array() {
                    let items = rational_list(value, name)?;
                    if items.is_empty() {
                        return Err(DocumentError::new(name, "no locations"));
                    }
                    if let Some(n) = n {
                        if items.len() != n {
                            return Err(DocumentError::new(name, format!("{} entries but n = {n}", items.len())));
                        }
                    }
                    if items.len() > MAX_GROUND_SET {
                        return Err(DocumentError::new(name, format!("more than {MAX_GROUND_SET} locations")));
                    }
                    Ok(items)
                } else {
                    let n = n.ok_or_else(|| DocumentError::new(name, "a single value needs n"))?;
                    if n == 0 {
                        return Err(DocumentError::new(n_field.clone(), "no locations"));
                    }
                    Ok(vec![rational(value, name)?; n])
                }
            };
            let c = list(costs, &costs_field)?;
            let pi = match penalties {
                Some(p) => list(p, &penalties_field)?,
                None => c.clone(),
            };
            if c.len() != pi.len() {
                return Err(DocumentError::new(
                    penalties_field,
                    format!("{} penalties for {} costs", pi.len(), c.len()),
                ));
            }
            nonnegative(&c, &costs_field)?;
            nonnegative(&pi, &penalties_field)?;
            let n = c.len();
            (
                Domain::Finite(n),
                CostProfile::discrete(c, pi).map_err(|e| DocumentError::new(field, e.to_string()))?,
            )
        }
    };
    let (continuous, n) = match domain {
        Domain::Finite(n) => (false, n),
        _ => (true, 0),
    };
    let hider = parse_family(required(map, field, "hider")?, &join(field, "hider"), continuous, n)?;
    let searcher = parse_family(required(map, field, "searcher")?, &join(field, "searcher"), continuous, n)?;
    GameSpec::new(domain, hider, searcher, profile).map_err(|e| DocumentError::new(field, e.to_string()))
}

fn exact(value: &Rational) -> Value {
    Value::String(canonical(value))
}

fn decimal(value: f64) -> Value {
    serde_json::Number::from_f64(value).map_or(Value::Null, Value::Number)
}

fn exact_list(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(exact).collect())
}

fn family_to_json(family: &Family) -> Value {
    match family {
        Family::PowerSet => json!({"type": "power_set"}),
        Family::FixedCardinality(k) => json!({"type": "fixed_cardinality", "k": k}),
        Family::Explicit(sets) => json!({
            "type": "explicit",
            "sets": sets.iter().map(subset_to_json).collect::<Vec<_>>(),
        }),
        Family::FreeLength => json!({"type": "free_length"}),
        Family::FixedLength(x) => json!({"type": "fixed_length", "value": exact(x)}),
    }
}

fn subset_to_json(subset: &Subset) -> Value {
    Value::Array(subset.indices().map(|j| json!(j + 1)).collect())
}

/// The game in canonical document form.
pub fn game_spec_to_json(spec: &GameSpec) -> Value {
    let (domain, costs, penalties) = match (&spec.domain, &spec.profile) {
        (Domain::Finite(_), CostProfile::Discrete { costs, penalties }) => {
            ("finite", exact_list(costs), exact_list(penalties))
        }
        (domain, profile) => {
            let (c, pi) = profile.rates().expect("continuous game has rates");
            let name = if *domain == Domain::Circle { "circle" } else { "interval" };
            (name, exact(c), exact(pi))
        }
    };
    json!({
        "domain": domain,
        "costs": costs,
        "penalties": penalties,
        "hider": family_to_json(&spec.hider),
        "searcher": family_to_json(&spec.searcher),
    })
}

pub fn pure_to_json(strategy: &PureStrategy) -> Value {
    match strategy {
        PureStrategy::Subset(s) => json!({"set": subset_to_json(s)}),
        PureStrategy::Arc(a) => json!({"start": exact(a.start()), "length": exact(a.length())}),
    }
}

pub fn strategy_to_json(strategy: &MixedStrategy) -> Value {
    match strategy {
        MixedStrategy::Atoms(atoms) => json!({
            "type": "atoms",
            "atoms": atoms
                .iter()
                .map(|atom| {
                    let mut entry = pure_to_json(&atom.strategy);
                    entry["probability"] = exact(&atom.probability);
                    entry
                })
                .collect::<Vec<_>>(),
        }),
        MixedStrategy::UniformStartArc { length } => json!({"type": "uniform_start_arc", "length": exact(length)}),
        MixedStrategy::IndependentInclusion { inclusion } => {
            json!({"type": "independent_inclusion", "inclusion": exact_list(inclusion)})
        }
    }
}

fn parse_pure(value: &Value, field: &str, domain: Domain) -> Result<PureStrategy> {
    match domain {
        Domain::Finite(n) => {
            let map = object(value, field, &["set", "probability"])?;
            let set = subset(required(map, field, "set")?, &join(field, "set"), n)?;
            Ok(PureStrategy::Subset(set))
        }
        Domain::Circle | Domain::Interval => {
            let map = object(value, field, &["start", "length", "probability"])?;
            let start = rational(required(map, field, "start")?, &join(field, "start"))?;
            let length = rational(required(map, field, "length")?, &join(field, "length"))?;
            Arc::for_domain(domain, start, length)
                .map(PureStrategy::Arc)
                .map_err(|e| DocumentError::new(field, e.to_string()))
        }
    }
}

/// A mixed strategy document for a game on `domain`.
pub fn parse_strategy(value: &Value, field: &str, domain: Domain) -> Result<MixedStrategy> {
    let map = object(value, field, &["type", "atoms", "length", "inclusion"])?;
    let kind = string(required(map, field, "type")?, &join(field, "type"))?;
    let invalid = |e: alignment_core::Error| DocumentError::new(field, e.to_string());
    match kind {
        "atoms" => {
            let atoms_field = join(field, "atoms");
            let items = required(map, field, "atoms")?
                .as_array()
                .ok_or_else(|| DocumentError::new(&atoms_field, "expected an array"))?;
            let atoms = items
                .iter()
                .enumerate()
                .map(|(i, item)| {
                    let item_field = format!("{atoms_field}[{i}]");
                    let strategy = parse_pure(item, &item_field, domain)?;
                    let probability = rational(
                        required(item.as_object().expect("checked object"), &item_field, "probability")?,
                        &join(&item_field, "probability"),
                    )?;
                    Ok(Atom { strategy, probability })
                })
                .collect::<Result<Vec<_>>>()?;
            MixedStrategy::atoms(atoms).map_err(invalid)
        }
        "uniform_start_arc" => {
            let length = rational(required(map, field, "length")?, &join(field, "length"))?;
            MixedStrategy::uniform_start_arc(length).map_err(invalid)
        }
        "independent_inclusion" => {
            let inclusion = rational_list(required(map, field, "inclusion")?, &join(field, "inclusion"))?;
            MixedStrategy::independent(inclusion).map_err(invalid)
        }
        other => Err(DocumentError::new(
            join(field, "type"),
            format!("unknown strategy type {other:?}"),
        )),
    }
}

pub fn solution_to_json(spec: &GameSpec, solution: &Solution) -> Value {
    json!({
        "game": game_spec_to_json(spec),
        "hider": strategy_to_json(&solution.hider),
        "searcher": strategy_to_json(&solution.searcher),
        "value": exact(&solution.value),
        "value_decimal": decimal(to_f64(&solution.value)),
        "provenance": solution.provenance.0,
    })
}

/// Parses a solution document for `spec`. A `game` field, when present,
/// must describe the same game.
pub fn parse_solution(text: &str, spec: &GameSpec) -> Result<Solution> {
    let value = parse_json(text)?;
    let map = object(
        &value,
        "$",
        &["game", "hider", "searcher", "value", "value_decimal", "provenance"],
    )?;
    if let Some(game) = map.get("game") {
        if &game_spec_from_value(game, "game")? != spec {
            return Err(DocumentError::new("game", "solution belongs to a different game"));
        }
    }
    let hider = parse_strategy(required(map, "$", "hider")?, "hider", spec.domain)?;
    let searcher = parse_strategy(required(map, "$", "searcher")?, "searcher", spec.domain)?;
    let value = rational(required(map, "$", "value")?, "value")?;
    let provenance = match map.get("provenance") {
        Some(p) => string(p, "provenance")?.to_string(),
        None => String::new(),
    };
    Ok(Solution::new(hider, searcher, value, provenance))
}

fn number_to_json(number: &Number) -> Value {
    match number {
        Number::Exact(r) => exact(r),
        Number::Approx(x) => decimal(*x),
    }
}

pub fn report_to_json(report: &VerificationReport) -> Value {
    json!({
        "passed": report.passed,
        "claimed_value": exact(&report.claimed_value),
        "oracle_value": report.oracle_value.as_ref().map_or(Value::Null, number_to_json),
        "hider_guarantee": number_to_json(&report.hider_guarantee),
        "searcher_guarantee": number_to_json(&report.searcher_guarantee),
        "hider_gap": number_to_json(&report.hider_gap),
        "searcher_gap": number_to_json(&report.searcher_gap),
        "hider_best_response": pure_to_json(&report.hider_best_response),
        "searcher_best_response": pure_to_json(&report.searcher_best_response),
        "tolerance": exact(&report.tolerance),
    })
}

pub fn simulation_to_json(result: &SimulationResult, value: &Rational) -> Value {
    let analytic = to_f64(value);
    let z = if result.std_error.is_zero() {
        if result.mean == analytic { 0.0 } else { f64::INFINITY }
    } else {
        (result.mean - analytic) / result.std_error
    };
    json!({
        "trials": result.trials,
        "mean": decimal(result.mean),
        "std_error": decimal(result.std_error),
        "seed": result.seed,
        "spec_digest": result.spec_digest,
        "value": exact(value),
        "value_decimal": decimal(analytic),
        "z_score": decimal(z),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use alignment_core::rational::{int, ratio};

    #[test]
    fn parses_decimals_exactly() {
        let spec = parse_game_spec(
            r#"{"domain":"interval","costs":1,"hider":{"type":"fixed_length","value":0.4},
                "searcher":{"type":"fixed_length","value":"2/5"}}"#,
        )
        .unwrap();
        assert_eq!(spec.hider, Family::FixedLength(ratio(2, 5)));
        assert_eq!(spec.hider, spec.searcher);
        assert_eq!(spec.profile.rates(), Some((&int(1), &int(1))));
    }

    #[test]
    fn errors_name_the_field() {
        let field = |text: &str| parse_game_spec(text).unwrap_err().field;
        let base = r#""hider":{"type":"power_set"},"searcher":{"type":"power_set"}"#;
        assert_eq!(field(&format!(r#"{{"domain":"finite","costs":[1,"x"],{base}}}"#)), "costs[1]");
        assert_eq!(field(&format!(r#"{{"domain":"finite","costs":[1,-2],{base}}}"#)), "costs[1]");
        assert_eq!(field(&format!(r#"{{"domain":"finite","costs":[1],"penalties":[1,2],{base}}}"#)), "penalties");
        assert_eq!(field(&format!(r#"{{"domain":"torus","costs":[1],{base}}}"#)), "domain");
        assert_eq!(field(&format!(r#"{{"domain":"finite","costs":[1],"extra":1,{base}}}"#)), "extra");
        assert_eq!(field(r#"{"domain":"finite","costs":[1,1],"hider":{"type":"fixed_cardinality","k":3},"searcher":{"type":"power_set"}}"#), "hider.k");
        assert_eq!(field(r#"{"domain":"circle","costs":1,"hider":{"type":"fixed_length","value":"3/2"},"searcher":{"type":"free_length"}}"#), "hider.value");
        assert_eq!(field(r#"{"domain":"circle","costs":0,"hider":{"type":"free_length"},"searcher":{"type":"free_length"}}"#), "costs");
        assert_eq!(field(r#"{"domain":"circle","costs":1,"hider":{"type":"power_set"},"searcher":{"type":"free_length"}}"#), "hider.type");
        assert_eq!(field(r#"{"domain":"circle","costs":1,"searcher":{"type":"free_length"}}"#), "hider");
        assert_eq!(field("[1"), "$");
    }

    #[test]
    fn scalar_costs_need_n() {
        let spec = parse_game_spec(
            r#"{"domain":"finite","costs":"3","n":4,"hider":{"type":"power_set"},"searcher":{"type":"power_set"}}"#,
        )
        .unwrap();
        assert_eq!(spec.domain, Domain::Finite(4));
        assert_eq!(spec.profile.costs().unwrap(), &[int(3), int(3), int(3), int(3)]);
        let err = parse_game_spec(r#"{"domain":"finite","costs":"3","hider":{"type":"power_set"},"searcher":{"type":"power_set"}}"#).unwrap_err();
        assert_eq!(err.field, "costs");
    }

    #[test]
    fn spec_documents_round_trip() {
        let text = r#"{"domain":"finite","costs":[3,"1/2"],"penalties":[1,2],
            "hider":{"type":"explicit","sets":[[1],[1,2],[]]},"searcher":{"type":"fixed_cardinality","k":1}}"#;
        let spec = parse_game_spec(text).unwrap();
        let again = parse_game_spec(&render(&game_spec_to_json(&spec))).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn keys_are_sorted() {
        let spec = parse_game_spec(r#"{"searcher":{"type":"free_length"},"hider":{"type":"free_length"},"domain":"circle","costs":1}"#).unwrap();
        let text = render(&game_spec_to_json(&spec));
        let keys: Vec<usize> = ["costs", "domain", "hider", "penalties", "searcher"]
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn strategies_round_trip() {
        let circle = MixedStrategy::arcs(vec![
            (Arc::circle(ratio(9, 10), ratio(1, 5)).unwrap(), ratio(1, 3)),
            (Arc::circle(int(0), int(1)).unwrap(), ratio(2, 3)),
        ])
        .unwrap();
        let sets = MixedStrategy::subsets(vec![
            (Subset::from_indices(3, [0, 2]).unwrap(), ratio(1, 4)),
            (Subset::empty(3).unwrap(), ratio(3, 4)),
        ])
        .unwrap();
        let cases = [
            (circle, Domain::Circle),
            (MixedStrategy::uniform_start_arc(ratio(1, 4)).unwrap(), Domain::Circle),
            (sets, Domain::Finite(3)),
            (MixedStrategy::independent(vec![ratio(1, 2), int(0), int(1)]).unwrap(), Domain::Finite(3)),
        ];
        for (strategy, domain) in cases {
            let parsed = parse_strategy(&strategy_to_json(&strategy), "hider", domain).unwrap();
            assert_eq!(parsed, strategy);
        }
    }

    #[test]
    fn strategy_errors_name_the_field() {
        let err = parse_strategy(
            &json!({"type": "atoms", "atoms": [{"set": [1], "probability": "1/2"}, {"set": [4], "probability": "1/2"}]}),
            "hider",
            Domain::Finite(3),
        )
        .unwrap_err();
        assert_eq!(err.field, "hider.atoms[1].set[0]");
        let err = parse_strategy(&json!({"type": "atoms", "atoms": [{"set": [1], "probability": "1/2"}]}), "searcher", Domain::Finite(3)).unwrap_err();
        assert_eq!(err.field, "searcher");
        assert!(err.message.contains("sum"));
    }
}
