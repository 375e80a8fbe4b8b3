//! Plain text view of a JSON report: one `path: value` line per leaf.

use serde_json::Value;

pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    walk(v, "", &mut out);
    out
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(x, &p, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                walk(x, &format!("{path}[{i}]"), out);
            }
        }
        Value::Array(items) => line(path, &format!("({})", items.iter().map(scalar).collect::<Vec<_>>().join(", ")), out),
        other => line(path, &scalar(other), out),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn line(path: &str, value: &str, out: &mut String) {
    out.push_str(path);
    out.push_str(": ");
    out.push_str(value);
    out.push('\n');
}
