use crate::float::Sign;

/// One cell of a pipeline row: an integer in units of β^(-frac_digits).
///
/// Stored chunks have `frac_digits = t`; raw convolution terms have `2t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceCell {
    pub value: i128,
    pub frac_digits: usize,
}

/// One row of an operation's pipeline table.
///
/// `cells[i]` is the coefficient of the power `first_power + i`, where power k
/// multiplies (β^(t+1))^(-k); a `first_power` of -1 therefore starts one chunk
/// above the leading chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub step: char,
    pub label: String,
    pub sign: Sign,
    pub exponent: i64,
    pub first_power: i64,
    pub cells: Vec<Option<TraceCell>>,
}

impl TraceRow {
    /// Rendered cells keyed by power, skipping empty slots.
    pub fn rendered_cells(&self, base: u32) -> Vec<(i64, String)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (self.first_power + i as i64, render_cell(c, base))))
            .collect()
    }

    /// Rendered cells as a list starting at `first_power`; empty slots are `None`.
    pub fn cell_strings(&self, base: u32) -> Vec<Option<String>> {
        self.cells.iter().map(|c| c.map(|c| render_cell(c, base))).collect()
    }
}

/// Rows of one add, sub or mul in the order they were produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineTrace {
    pub rows: Vec<TraceRow>,
}

impl PipelineTrace {
    pub(crate) fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn rows_for(&self, step: char) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.step == step)
    }

    /// Render the rows as a table: step, label, exponent, then one column per power.
    pub fn render(&self, base: u32) -> String {
        let lo = self.rows.iter().map(|r| r.first_power).min().unwrap_or(0);
        let hi = self
            .rows
            .iter()
            .map(|r| r.first_power + r.cells.len() as i64)
            .max()
            .unwrap_or(0);
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["".to_string(), "step".to_string(), "exponent".to_string()];
        for k in lo..hi {
            header.push(format!("①^{}", -k));
        }
        grid.push(header);
        let mut last_step = None;
        for r in &self.rows {
            let mut line = vec![
                if last_step == Some(r.step) {
                    String::new()
                } else {
                    format!("({})", r.step)
                },
                r.label.clone(),
                format!("{}{}^{}", if r.sign.is_negative() { "-" } else { "" }, base, r.exponent),
            ];
            last_step = Some(r.step);
            let cells = r.cell_strings(base);
            for k in lo..hi {
                let i = k - r.first_power;
                let cell = if i >= 0 { cells.get(i as usize).cloned().flatten() } else { None };
                line.push(cell.unwrap_or_default());
            }
            grid.push(line);
        }
        let cols = grid[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in grid {
            let text: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}", w = *w))
                .collect();
            out.push_str(text.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Digits of a cell with the radix point `frac_digits` from the right; at
/// least one integer digit is shown.
pub fn render_cell(cell: TraceCell, base: u32) -> String {
    let neg = cell.value < 0;
    let mut v = cell.value.unsigned_abs();
    let mut digits = Vec::new();
    while v > 0 {
        digits.push(std::char::from_digit((v % base as u128) as u32, base).unwrap());
        v /= base as u128;
    }
    while digits.len() < cell.frac_digits + 1 {
        digits.push('0');
    }
    digits.reverse();
    let split = digits.len() - cell.frac_digits;
    let mut s: String = if neg { "-".to_string() } else { String::new() };
    s.extend(&digits[..split]);
    if cell.frac_digits > 0 {
        s.push('.');
        s.extend(&digits[split..]);
    }
    s
}
