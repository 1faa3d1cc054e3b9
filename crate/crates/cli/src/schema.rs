//! Minimal structural validator for the shipped JSON schemas.  Supports the
//! subset of JSON Schema the schemas actually use: type, enum, required,
//! properties, additionalProperties (bool or schema), items.

use serde_json::Value;

pub const KERNEL_TABLE: &str = include_str!("../schemas/kernel_table.schema.json");
pub const SHA_REPORT: &str = include_str!("../schemas/sha_report.schema.json");
pub const INFO: &str = include_str!("../schemas/info.schema.json");
pub const COHOMOLOGY: &str = include_str!("../schemas/cohomology.schema.json");
pub const SWEEP: &str = include_str!("../schemas/sweep.schema.json");
pub const SELFTEST: &str = include_str!("../schemas/selftest.schema.json");

pub fn validate(schema: &Value, value: &Value) -> Result<(), String> {
    check(schema, value, "$")
}

pub fn validate_str(schema_src: &str, value: &Value) -> Result<(), String> {
    let schema: Value =
        serde_json::from_str(schema_src).map_err(|e| format!("bad schema: {e}"))?;
    validate(&schema, value)
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) if n.is_u64() || n.is_i64() => "integer",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn check(schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let obj = schema
        .as_object()
        .ok_or_else(|| format!("{path}: schema node is not an object"))?;
    if let Some(allowed) = obj.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in enum {allowed:?}"));
        }
    }
    if let Some(ty) = obj.get("type").and_then(Value::as_str) {
        let actual = type_name(value);
        let ok = actual == ty || (ty == "number" && actual == "integer");
        if !ok {
            return Err(format!("{path}: expected {ty}, got {actual}"));
        }
    }
    if let Some(req) = obj.get("required").and_then(Value::as_array) {
        let map = value
            .as_object()
            .ok_or_else(|| format!("{path}: required on non-object"))?;
        for key in req {
            let key = key.as_str().unwrap_or_default();
            if !map.contains_key(key) {
                return Err(format!("{path}: missing required field {key}"));
            }
        }
    }
    if let Value::Object(map) = value {
        let props = obj.get("properties").and_then(Value::as_object);
        let extra = obj.get("additionalProperties");
        for (key, sub) in map {
            if let Some(ps) = props.and_then(|p| p.get(key)) {
                check(ps, sub, &format!("{path}.{key}"))?;
            } else {
                match extra {
                    Some(Value::Bool(false)) => {
                        return Err(format!("{path}: unexpected field {key}"));
                    }
                    Some(Value::Object(_)) => {
                        check(extra.unwrap(), sub, &format!("{path}.{key}"))?;
                    }
                    _ => {}
                }
            }
        }
    }
    if let (Some(items), Value::Array(arr)) = (obj.get("items"), value) {
        for (i, sub) in arr.iter().enumerate() {
            check(items, sub, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}
