//! Named fixtures: the strong exceptional toric systems per degree and the
//! default center coordinates.

use crate::error::{Error, Result};
use crate::picard::SurfaceConfig;
use crate::toric_system::ToricSystem;

/// Integer coordinates of the default centers `E_1, ..., E_6`.
pub const DEFAULT_CENTERS: [[i64; 3]; 6] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 1],
    [1, 2, 3],
    [1, 3, -2],
];

/// One fixture row: the degree `K^2` and the toric system entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table1Row {
    pub degree: u32,
    pub entries: &'static [&'static str],
}

impl Table1Row {
    pub fn r(&self) -> usize {
        9 - self.degree as usize
    }
}

/// Rows for degrees 9 (the plane) down to 3.
///
/// The degree-3 entry `E_5 - E_1` is read as `E_1 - E_5`, the only reading
/// that satisfies the pairing axioms.
pub const TABLE1: [Table1Row; 7] = [
    Table1Row {
        degree: 9,
        entries: &["H", "H", "H"],
    },
    Table1Row {
        degree: 8,
        entries: &["H-E1", "E1", "H-E1", "H"],
    },
    Table1Row {
        degree: 7,
        entries: &["H-E1-E2", "E2", "E1-E2", "H-E1", "H"],
    },
    Table1Row {
        degree: 6,
        entries: &["H-E1-E2-E3", "E3", "E2-E3", "E1-E2", "H-E1", "H"],
    },
    Table1Row {
        degree: 5,
        entries: &["H-E1-E2-E3", "E3", "E2-E3", "E1-E2", "H-E1-E4", "E4", "H-E4"],
    },
    Table1Row {
        degree: 4,
        entries: &[
            "H-E1-E2-E3",
            "E3",
            "E2-E3",
            "E1-E2",
            "H-E1-E4-E5",
            "E5",
            "E4-E5",
            "H-E4",
        ],
    },
    Table1Row {
        degree: 3,
        entries: &[
            "E4",
            "E2-E4",
            "H-E1-E2-E5",
            "E5",
            "E1-E5",
            "H-E1-E3-E6",
            "E6",
            "E3-E6",
            "H-E2-E3-E4",
        ],
    },
];

/// Default surface with the first `r` default centers, validated for
/// general position.
pub fn default_surface(r: usize) -> Result<SurfaceConfig> {
    if r > DEFAULT_CENTERS.len() {
        return Err(Error::Range {
            position: r,
            max: DEFAULT_CENTERS.len(),
        });
    }
    SurfaceConfig::from_integers(&DEFAULT_CENTERS[..r])
}

pub fn table1_row(degree: u32) -> Result<Table1Row> {
    TABLE1
        .iter()
        .find(|row| row.degree == degree)
        .copied()
        .ok_or_else(|| Error::Config(format!("no fixture row of degree {degree}")))
}

/// Toric system and default surface of a fixture row.
pub fn table1_system(degree: u32) -> Result<(ToricSystem, SurfaceConfig)> {
    let row = table1_row(degree)?;
    let ts = ToricSystem::parse(row.entries, row.r())?;
    Ok((ts, default_surface(row.r())?))
}
