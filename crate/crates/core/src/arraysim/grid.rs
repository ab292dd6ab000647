//! Array geometry, occupancy and target patterns with their text/JSON forms.
//!
//! Site `i` sits at row `i / cols`, column `i % cols`, position
//! (col·pitch, row·pitch) in μm. The text form writes row 0 first.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ArrayError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Site spacing in μm.
    pub pitch: f64,
}

impl ArrayGeometry {
    pub fn new(rows: usize, cols: usize, pitch: f64) -> Result<Self, ArrayError> {
        let g = ArrayGeometry { rows, cols, pitch };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ArrayError> {
        if self.rows == 0 || self.cols == 0 || !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return Err(ArrayError::BadGeometry { rows: self.rows, cols: self.cols, pitch: self.pitch });
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn site(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn row_col(&self, site: usize) -> (usize, usize) {
        (site / self.cols, site % self.cols)
    }

    pub fn position(&self, site: usize) -> (f64, f64) {
        let (r, c) = self.row_col(site);
        (c as f64 * self.pitch, r as f64 * self.pitch)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    Iso1,
    Iso2,
}

impl Species {
    pub fn other(self) -> Species {
        match self {
            Species::Iso1 => Species::Iso2,
            Species::Iso2 => Species::Iso1,
        }
    }

    pub fn occupancy(self) -> Occupancy {
        match self {
            Species::Iso1 => Occupancy::Iso1,
            Species::Iso2 => Occupancy::Iso2,
        }
    }

    pub fn target(self) -> SiteTarget {
        match self {
            Species::Iso1 => SiteTarget::WantIso1,
            Species::Iso2 => SiteTarget::WantIso2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Occupancy {
    #[default]
    Empty,
    Iso1,
    Iso2,
    Dual,
}

impl Occupancy {
    pub fn to_char(self) -> char {
        match self {
            Occupancy::Empty => '.',
            Occupancy::Iso1 => '1',
            Occupancy::Iso2 => '2',
            Occupancy::Dual => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(Occupancy::Empty),
            '1' => Some(Occupancy::Iso1),
            '2' => Some(Occupancy::Iso2),
            'D' | 'd' => Some(Occupancy::Dual),
            _ => None,
        }
    }

    pub fn is_occupied(self) -> bool {
        self != Occupancy::Empty
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum SiteTarget {
    WantIso1,
    WantIso2,
    #[default]
    DontCare,
}

impl SiteTarget {
    pub fn to_char(self) -> char {
        match self {
            SiteTarget::WantIso1 => '1',
            SiteTarget::WantIso2 => '2',
            SiteTarget::DontCare => '.',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '1' => Some(SiteTarget::WantIso1),
            '2' => Some(SiteTarget::WantIso2),
            '.' => Some(SiteTarget::DontCare),
            _ => None,
        }
    }

    /// Occupancy this designation requires, if any.
    pub fn wanted(self) -> Option<Occupancy> {
        match self {
            SiteTarget::WantIso1 => Some(Occupancy::Iso1),
            SiteTarget::WantIso2 => Some(Occupancy::Iso2),
            SiteTarget::DontCare => None,
        }
    }
}

fn parse_rows(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn grid_shape(rows: &[(usize, &str)]) -> Result<(usize, usize), ArrayError> {
    let Some(&(_, first)) = rows.first() else {
        return Err(ArrayError::Parse { line: 0, msg: "empty grid".into() });
    };
    let cols = first.chars().count();
    for &(line, l) in rows {
        if l.chars().count() != cols {
            return Err(ArrayError::Parse { line, msg: format!("expected {cols} columns") });
        }
    }
    Ok((rows.len(), cols))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayState {
    pub geometry: ArrayGeometry,
    pub occupancy: Vec<Occupancy>,
}

impl ArrayState {
    pub fn new(geometry: ArrayGeometry, occupancy: Vec<Occupancy>) -> Result<Self, ArrayError> {
        geometry.validate()?;
        if occupancy.len() != geometry.n_sites() {
            return Err(ArrayError::SizeMismatch { got: occupancy.len(), want: geometry.n_sites() });
        }
        Ok(ArrayState { geometry, occupancy })
    }

    pub fn empty(geometry: ArrayGeometry) -> Self {
        ArrayState { geometry, occupancy: vec![Occupancy::Empty; geometry.n_sites()] }
    }

    pub fn get(&self, row: usize, col: usize) -> Occupancy {
        self.occupancy[self.geometry.site(row, col)]
    }

    pub fn count(&self, occ: Occupancy) -> usize {
        self.occupancy.iter().filter(|&&o| o == occ).count()
    }

    pub fn count_in_column(&self, col: usize, occ: Occupancy) -> usize {
        (0..self.geometry.rows).filter(|&r| self.get(r, col) == occ).count()
    }

    pub fn parse_text(text: &str, pitch: f64) -> Result<Self, ArrayError> {
        let rows = parse_rows(text);
        let (nr, nc) = grid_shape(&rows)?;
        let mut occ = Vec::with_capacity(nr * nc);
        for (line, l) in rows {
            for ch in l.chars() {
                occ.push(
                    Occupancy::from_char(ch)
                        .ok_or_else(|| ArrayError::Parse { line, msg: format!("unexpected character `{ch}`") })?,
                );
            }
        }
        ArrayState::new(ArrayGeometry::new(nr, nc, pitch)?, occ)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.occupancy.len() + self.geometry.rows);
        for r in 0..self.geometry.rows {
            for c in 0..self.geometry.cols {
                s.push(self.get(r, c).to_char());
            }
            s.push('\n');
        }
        s
    }

    /// True when every non-DontCare site holds the wanted species.
    pub fn satisfies(&self, target: &TargetPattern) -> bool {
        self.occupancy.len() == target.sites.len()
            && self.occupancy.iter().zip(&target.sites).all(|(o, t)| t.wanted().is_none_or(|w| w == *o))
    }
}

impl fmt::Display for ArrayState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetPattern {
    pub rows: usize,
    pub cols: usize,
    pub sites: Vec<SiteTarget>,
}

impl TargetPattern {
    pub fn new(rows: usize, cols: usize, sites: Vec<SiteTarget>) -> Result<Self, ArrayError> {
        if sites.len() != rows * cols {
            return Err(ArrayError::SizeMismatch { got: sites.len(), want: rows * cols });
        }
        Ok(TargetPattern { rows, cols, sites })
    }

    pub fn dont_care(rows: usize, cols: usize) -> Self {
        TargetPattern { rows, cols, sites: vec![SiteTarget::DontCare; rows * cols] }
    }

    pub fn get(&self, row: usize, col: usize) -> SiteTarget {
        self.sites[row * self.cols + col]
    }

    /// `size × size` checkerboard centred in the array: Iso1 where
    /// (row + col) of the block is even.
    pub fn centered_checkerboard(rows: usize, cols: usize, size: usize) -> Self {
        Self::centered_block(rows, cols, size, |r, c| (r + c) % 2 == 0)
    }

    /// `size × size` block of alternating columns (Iso1 on even columns).
    pub fn centered_stripes(rows: usize, cols: usize, size: usize) -> Self {
        Self::centered_block(rows, cols, size, |_, c| c % 2 == 0)
    }

    fn centered_block(rows: usize, cols: usize, size: usize, iso1: impl Fn(usize, usize) -> bool) -> Self {
        let mut t = Self::dont_care(rows, cols);
        let size_r = size.min(rows);
        let size_c = size.min(cols);
        let (r0, c0) = ((rows - size_r) / 2, (cols - size_c) / 2);
        for r in 0..size_r {
            for c in 0..size_c {
                t.sites[(r0 + r) * cols + c0 + c] =
                    if iso1(r, c) { SiteTarget::WantIso1 } else { SiteTarget::WantIso2 };
            }
        }
        t
    }

    pub fn count(&self, t: SiteTarget) -> usize {
        self.sites.iter().filter(|&&s| s == t).count()
    }

    pub fn count_in_column(&self, col: usize, t: SiteTarget) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col) == t).count()
    }

    pub fn parse_text(text: &str) -> Result<Self, ArrayError> {
        let rows = parse_rows(text);
        let (nr, nc) = grid_shape(&rows)?;
        let mut sites = Vec::with_capacity(nr * nc);
        for (line, l) in rows {
            for ch in l.chars() {
                sites.push(
                    SiteTarget::from_char(ch)
                        .ok_or_else(|| ArrayError::Parse { line, msg: format!("unexpected character `{ch}`") })?,
                );
            }
        }
        TargetPattern::new(nr, nc, sites)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(self.get(r, c).to_char());
            }
            s.push('\n');
        }
        s
    }
}

/// JSON form shared by states and targets: `{"rows", "cols", "pitch", "grid": [row strings]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_pitch")]
    pub pitch: f64,
    pub grid: Vec<String>,
}

fn default_pitch() -> f64 {
    5.0
}

impl From<&ArrayState> for GridJson {
    fn from(s: &ArrayState) -> Self {
        GridJson {
            rows: s.geometry.rows,
            cols: s.geometry.cols,
            pitch: s.geometry.pitch,
            grid: s.to_text().lines().map(str::to_owned).collect(),
        }
    }
}

impl ArrayState {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GridJson::from(self)).expect("grid serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ArrayError> {
        let g: GridJson =
            serde_json::from_value(v.clone()).map_err(|e| ArrayError::Parse { line: 0, msg: e.to_string() })?;
        let s = ArrayState::parse_text(&g.grid.join("\n"), g.pitch)?;
        if s.geometry.rows != g.rows || s.geometry.cols != g.cols {
            return Err(ArrayError::Parse { line: 0, msg: "rows/cols disagree with grid".into() });
        }
        Ok(s)
    }
}

impl TargetPattern {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "grid": self.to_text().lines().collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ArrayError> {
        let g: GridJson =
            serde_json::from_value(v.clone()).map_err(|e| ArrayError::Parse { line: 0, msg: e.to_string() })?;
        let t = TargetPattern::parse_text(&g.grid.join("\n"))?;
        if t.rows != g.rows || t.cols != g.cols {
            return Err(ArrayError::Parse { line: 0, msg: "rows/cols disagree with grid".into() });
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let text = "1.2D\n..11\n2222\n";
        let s = ArrayState::parse_text(text, 5.0).unwrap();
        assert_eq!(s.geometry.rows, 3);
        assert_eq!(s.geometry.cols, 4);
        assert_eq!(s.get(0, 3), Occupancy::Dual);
        assert_eq!(s.to_text(), text);
        let back = ArrayState::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(ArrayState::parse_text("11\n1\n", 5.0).is_err());
        assert!(ArrayState::parse_text("1x\n", 5.0).is_err());
        assert!(TargetPattern::parse_text("1D\n").is_err());
    }

    #[test]
    fn checkerboard_counts() {
        let t = TargetPattern::centered_checkerboard(10, 10, 4);
        assert_eq!(t.count(SiteTarget::WantIso1), 8);
        assert_eq!(t.count(SiteTarget::WantIso2), 8);
        assert_eq!(t.get(3, 3), SiteTarget::WantIso1);
        assert_eq!(t.get(3, 4), SiteTarget::WantIso2);
        assert_eq!(TargetPattern::from_json(&t.to_json()).unwrap(), t);
    }
}
