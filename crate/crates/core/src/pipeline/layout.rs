use std::fmt;

use serde::{Deserialize, Serialize};

use crate::params::ParamKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableType {
    Static,
    Dynamic,
    Curve,
}

impl TableType {
    pub fn token(self) -> &'static str {
        match self {
            TableType::Static => "static",
            TableType::Dynamic => "dynamic",
            TableType::Curve => "curve",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "static" => Some(TableType::Static),
            "dynamic" => Some(TableType::Dynamic),
            "curve" => Some(TableType::Curve),
            _ => None,
        }
    }

    pub fn of(kind: ParamKind) -> Self {
        match kind {
            ParamKind::Static | ParamKind::Category => TableType::Static,
            ParamKind::Pattern => TableType::Dynamic,
            ParamKind::Curve => TableType::Curve,
        }
    }

    /// Name of the per-scenario row index column, if any.
    pub fn index_column(self) -> Option<&'static str> {
        match self {
            TableType::Static => None,
            TableType::Dynamic => Some("step"),
            TableType::Curve => Some("point"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Io {
    Input,
    Output,
}

impl Io {
    pub fn token(self) -> &'static str {
        match self {
            Io::Input => "input",
            Io::Output => "output",
        }
    }
}

/// `<component>_<parameter>_<index>_<type>_<io>`. Multi-word tokens use
/// hyphens so that underscores only separate tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableName {
    pub component: String,
    pub parameter: String,
    pub index: usize,
    pub table_type: TableType,
    pub io: Io,
}

pub const TABLE_EXTENSION: &str = "csv";

impl TableName {
    pub fn new(component: &str, parameter: &str, table_type: TableType, io: Io) -> Self {
        TableName {
            component: component.replace('_', "-"),
            parameter: parameter.replace('_', "-"),
            index: 0,
            table_type,
            io,
        }
    }

    pub fn with_index(&self, index: usize) -> Self {
        TableName {
            index,
            ..self.clone()
        }
    }

    pub fn stem(&self) -> String {
        format!(
            "{}_{}_{}_{}_{}",
            self.component,
            self.parameter,
            self.index,
            self.table_type.token(),
            self.io.token()
        )
    }

    pub fn file_name(&self) -> String {
        format!("{}.{TABLE_EXTENSION}", self.stem())
    }

    /// Table identity without the shard index.
    pub fn key(&self) -> String {
        format!(
            "{}_{}_{}_{}",
            self.component,
            self.parameter,
            self.table_type.token(),
            self.io.token()
        )
    }

    pub fn parse(file_name: &str) -> Option<Self> {
        let stem = file_name.strip_suffix(&format!(".{TABLE_EXTENSION}"))?;
        let tokens: Vec<&str> = stem.split('_').collect();
        let [component, parameter, index, table_type, io] = tokens.as_slice() else {
            return None;
        };
        let word = |s: &str| {
            !s.is_empty()
                && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
        };
        if !word(component) || !word(parameter) {
            return None;
        }
        if index.is_empty() || !index.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let io = match *io {
            "input" => Io::Input,
            "output" => Io::Output,
            _ => return None,
        };
        Some(TableName {
            component: component.to_string(),
            parameter: parameter.to_string(),
            index: index.parse().ok()?,
            table_type: TableType::from_token(table_type)?,
            io,
        })
    }
}

impl fmt::Display for TableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.file_name())
    }
}

/// `24H` for a day, `1Y` for a year; other durations have no token.
pub fn duration_token(hours: f64) -> Option<&'static str> {
    if (hours - 24.0).abs() < 1e-9 {
        Some("24H")
    } else if (hours - 8760.0).abs() < 1e-9 {
        Some("1Y")
    } else {
        None
    }
}

/// Size on disk rounded to whole gigabytes.
pub fn capacity_gb(bytes: u64) -> u64 {
    (bytes as f64 / 1e9).round() as u64
}

/// `<network>_<capacity>_<duration>`.
pub fn folder_name(network: &str, capacity_gb: u64, duration_token: &str) -> String {
    format!("{network}_{capacity_gb}GB_{duration_token}")
}

/// Split a dataset folder name into network, capacity and duration token.
pub fn parse_folder_name(name: &str) -> Option<(String, u64, String)> {
    let (rest, duration) = name.rsplit_once('_')?;
    let (network, capacity) = rest.rsplit_once('_')?;
    let gb = capacity.strip_suffix("GB")?.parse().ok()?;
    if !matches!(duration, "24H" | "1Y") || network.is_empty() {
        return None;
    }
    Some((network.to_string(), gb, duration.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let n = TableName::new("head_pump", "pump_curve_y", TableType::Curve, Io::Input).with_index(3);
        assert_eq!(n.file_name(), "head-pump_pump-curve-y_3_curve_input.csv");
        assert_eq!(TableName::parse(&n.file_name()), Some(n));
        assert!(TableName::parse("junction_pressure_0_dynamic.csv").is_none());
        assert!(TableName::parse("junction_pressure_x_dynamic_output.csv").is_none());
    }

    #[test]
    fn folder_tokens() {
        assert_eq!(folder_name("hanoi", 0, "24H"), "hanoi_0GB_24H");
        assert_eq!(
            parse_folder_name("net_a_12GB_1Y"),
            Some(("net_a".into(), 12, "1Y".into()))
        );
        assert_eq!(duration_token(8760.0), Some("1Y"));
        assert_eq!(duration_token(48.0), None);
        assert_eq!(capacity_gb(1_600_000_000), 2);
    }
}
