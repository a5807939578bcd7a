//! Small JSON Schema checker covering the keyword subset the tool catalog
//! and the published envelope/journal schemas actually use: `type`, `enum`,
//! `const`, `required`, `properties`, `additionalProperties` (boolean),
//! `items`, `minimum`, `maximum`, `minLength`, `maxLength`, `minItems`,
//! `maxItems`, and `pattern`. Incoming tool arguments are validated against
//! the very schema documents the catalog advertises, so the two can never
//! drift apart.

use regex::Regex;
use serde_json::Value;

/// Validate `instance` against `schema`; returns human-readable errors,
/// empty when valid.
pub fn validate_value(schema: &Value, instance: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, instance, "$", &mut errors);
    errors
}

fn check(schema: &Value, instance: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(schema) = schema.as_object() else {
        return; // a non-object schema constrains nothing
    };

    if let Some(expected) = schema.get("type") {
        let names: Vec<&str> = match expected {
            Value::String(s) => vec![s.as_str()],
            Value::Array(items) => items.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        if !names.is_empty() && !names.iter().any(|n| type_matches(n, instance)) {
            errors.push(format!(
                "{path}: expected type {}, got {}",
                names.join(" or "),
                type_name(instance)
            ));
            return;
        }
    }

    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(instance) {
            errors.push(format!("{path}: value is not one of the allowed values"));
        }
    }
    if let Some(expected) = schema.get("const") {
        if expected != instance {
            errors.push(format!("{path}: value does not equal the required constant"));
        }
    }

    match instance {
        Value::Object(fields) => {
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for key in required.iter().filter_map(Value::as_str) {
                    if !fields.contains_key(key) {
                        errors.push(format!("{path}: missing required property {key:?}"));
                    }
                }
            }
            let properties = schema.get("properties").and_then(Value::as_object);
            let additional = schema
                .get("additionalProperties")
                .and_then(Value::as_bool)
                .unwrap_or(true);
            for (key, value) in fields {
                match properties.and_then(|p| p.get(key)) {
                    Some(subschema) => check(subschema, value, &format!("{path}.{key}"), errors),
                    None if !additional => {
                        errors.push(format!("{path}: unexpected property {key:?}"));
                    }
                    None => {}
                }
            }
        }
        Value::Array(items) => {
            if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
                if (items.len() as u64) < min {
                    errors.push(format!("{path}: fewer than {min} items"));
                }
            }
            if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
                if (items.len() as u64) > max {
                    errors.push(format!("{path}: more than {max} items"));
                }
            }
            if let Some(item_schema) = schema.get("items") {
                for (i, item) in items.iter().enumerate() {
                    check(item_schema, item, &format!("{path}[{i}]"), errors);
                }
            }
        }
        Value::String(s) => {
            if let Some(min) = schema.get("minLength").and_then(Value::as_u64) {
                if (s.chars().count() as u64) < min {
                    errors.push(format!("{path}: shorter than {min} characters"));
                }
            }
            if let Some(max) = schema.get("maxLength").and_then(Value::as_u64) {
                if (s.chars().count() as u64) > max {
                    errors.push(format!("{path}: longer than {max} characters"));
                }
            }
            if let Some(pattern) = schema.get("pattern").and_then(Value::as_str) {
                match Regex::new(pattern) {
                    Ok(re) => {
                        if !re.is_match(s) {
                            errors.push(format!("{path}: does not match pattern {pattern:?}"));
                        }
                    }
                    Err(_) => errors.push(format!("{path}: schema pattern {pattern:?} is invalid")),
                }
            }
        }
        Value::Number(n) => {
            if let (Some(min), Some(v)) = (schema.get("minimum").and_then(Value::as_f64), n.as_f64()) {
                if v < min {
                    errors.push(format!("{path}: below minimum {min}"));
                }
            }
            if let (Some(max), Some(v)) = (schema.get("maximum").and_then(Value::as_f64), n.as_f64()) {
                if v > max {
                    errors.push(format!("{path}: above maximum {max}"));
                }
            }
        }
        _ => {}
    }
}

fn type_matches(name: &str, instance: &Value) -> bool {
    match name {
        "object" => instance.is_object(),
        "array" => instance.is_array(),
        "string" => instance.is_string(),
        "boolean" => instance.is_boolean(),
        "null" => instance.is_null(),
        "number" => instance.is_number(),
        "integer" => instance.as_i64().is_some() || instance.as_u64().is_some(),
        _ => false,
    }
}

fn type_name(instance: &Value) -> &'static str {
    match instance {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn type_checks() {
        let schema = json!({"type": "object", "properties": {"n": {"type": "integer", "minimum": 1}}});
        assert!(validate_value(&schema, &json!({"n": 3})).is_empty());
        assert!(!validate_value(&schema, &json!({"n": 0})).is_empty());
        assert!(!validate_value(&schema, &json!({"n": "three"})).is_empty());
        assert!(!validate_value(&schema, &json!([1])).is_empty());
    }

    #[test]
    fn required_and_additional() {
        let schema = json!({
            "type": "object",
            "required": ["path"],
            "properties": {"path": {"type": "string"}},
            "additionalProperties": false
        });
        assert!(validate_value(&schema, &json!({"path": "a"})).is_empty());
        let missing = validate_value(&schema, &json!({}));
        assert!(missing[0].contains("path"));
        let extra = validate_value(&schema, &json!({"path": "a", "mystery": 1}));
        assert!(extra[0].contains("mystery"));
    }

    #[test]
    fn enums_and_patterns() {
        let schema = json!({
            "type": "object",
            "properties": {
                "mode": {"type": "string", "enum": ["create", "overwrite", "append"]},
                "sha": {"type": "string", "pattern": "^[0-9a-f]{64}$"}
            }
        });
        assert!(validate_value(&schema, &json!({"mode": "create"})).is_empty());
        assert!(!validate_value(&schema, &json!({"mode": "truncate"})).is_empty());
        assert!(validate_value(&schema, &json!({"sha": "a".repeat(64)})).is_empty());
        assert!(!validate_value(&schema, &json!({"sha": "xyz"})).is_empty());
    }

    #[test]
    fn arrays_and_items() {
        let schema = json!({
            "type": "array",
            "minItems": 1,
            "items": {"type": "object", "required": ["path"], "properties": {"path": {"type": "string"}}}
        });
        assert!(validate_value(&schema, &json!([{"path": "x"}])).is_empty());
        assert!(!validate_value(&schema, &json!([])).is_empty());
        let nested = validate_value(&schema, &json!([{"nope": 1}]));
        assert!(nested[0].contains("[0]"));
    }

    #[test]
    fn const_false_for_envelope_ok() {
        let schema = json!({"properties": {"ok": {"const": false}}});
        assert!(validate_value(&schema, &json!({"ok": false})).is_empty());
        assert!(!validate_value(&schema, &json!({"ok": true})).is_empty());
    }
}
