use crate::{Cli, Format};
use serde_json::Value;

/// A rectangular block of output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: Option<&str>, headers: &[&str]) -> Table {
        Table { title: title.map(str::to_string), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    fn aligned(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if let Some(t) = &self.title {
            out.push_str(&format!("{t}\n"));
        }
        out.push_str(&line(&self.headers));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&line(&rule));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn csv(&self) -> String {
        let mut out = csv_line(&self.headers);
        for r in &self.rows {
            out.push_str(&csv_line(r));
        }
        out
    }
}

fn csv_line(cells: &[String]) -> String {
    let quoted: Vec<String> = cells
        .iter()
        .map(|c| if c.contains([',', '"', '\n']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() })
        .collect();
    quoted.join(",") + "\n"
}

/// What a subcommand produced, before formatting.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub json: Value,
    pub tables: Vec<Table>,
    /// Replaces the first table in CSV mode (profiles, spectra, sphere rows).
    pub csv: Option<String>,
    /// Lines shown only in table mode (timings and other run-dependent data).
    pub notes: Vec<String>,
    pub checks_failed: bool,
}

/// Shortest round-trip form, switching to exponent notation away from unit scale.
pub fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-4..1e9).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn command_name(cli: &Cli) -> String {
    match serde_json::to_value(&cli.command) {
        Ok(Value::Object(m)) => m.get("name").and_then(Value::as_str).unwrap_or("?").to_string(),
        _ => "?".into(),
    }
}

fn config(cli: &Cli) -> Value {
    serde_json::to_value(cli).expect("config is plain data")
}

pub fn render(cli: &Cli, out: &Output) -> String {
    let name = command_name(cli);
    match cli.format {
        Format::Json => {
            let doc = serde_json::json!({ "command": name, "config": config(cli), "result": out.json });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut s = format!("# ltlab {name}\n# config: {}\n", config(cli));
            match (&out.csv, out.tables.first()) {
                (Some(c), _) => s.push_str(c),
                (None, Some(t)) => s.push_str(&t.csv()),
                (None, None) => {}
            }
            s
        }
        Format::Table => {
            let mut s = format!("# ltlab {name}\n# config: {}\n", config(cli));
            for t in &out.tables {
                s.push('\n');
                s.push_str(&t.aligned());
            }
            if !out.notes.is_empty() {
                s.push('\n');
                for n in &out.notes {
                    s.push_str(n);
                    s.push('\n');
                }
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(5.7e-9), "5.7e-9");
        assert_eq!(num(-2e12), "-2e12");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn csv_quoting() {
        let mut t = Table::new(None, &["a", "b"]);
        t.row(vec!["x,y".into(), "say \"hi\"".into()]);
        assert_eq!(t.csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn aligned_columns() {
        let mut t = Table::new(Some("T"), &["name", "v"]);
        t.row(vec!["long-name".into(), "1".into()]);
        let s = t.aligned();
        assert!(s.starts_with("T\nname       v\n---------  -\nlong-name  1\n"), "{s}");
    }
}
