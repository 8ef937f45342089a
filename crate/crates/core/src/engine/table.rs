use std::fmt::Write as _;

use crate::term::Term;

/// Query result: named columns and rows of optional terms.
///
/// Rows are kept in canonical order: ascending by the vector of N-Triples
/// renderings of the cells, with an unbound cell rendered as the empty string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

impl ResultTable {
    /// Builds a table and sorts its rows canonically.
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Option<Term>>>) -> Self {
        let mut t = Self { columns, rows };
        t.sort_canonical();
        t
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sort_canonical(&mut self) {
        let mut keyed: Vec<(Vec<String>, Vec<Option<Term>>)> = std::mem::take(&mut self.rows)
            .into_iter()
            .map(|r| (r.iter().map(cell_text).collect(), r))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        self.rows = keyed.into_iter().map(|(_, r)| r).collect();
    }

    /// Tab-separated, header cells `?name`. Literal tabs are written as `\t`
    /// so that every line has exactly one cell per column.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| format!("?{c}")).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push('\t');
                }
                out.push_str(&cell_text(cell).replace('\t', "\\t"));
            }
            out.push('\n');
        }
        out
    }

    /// RFC 4180 quoting with `\n` line endings; header cells are bare names.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("cells are UTF-8")
    }
}

fn cell_text(cell: &Option<Term>) -> String {
    let mut s = String::new();
    if let Some(t) = cell {
        write!(s, "{t}").expect("writing to a String");
    }
    s
}
