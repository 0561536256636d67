//! Row maxima of a totally monotone implicit matrix in O(m + n).
//!
//! This is the classic SMAWK routine (Aggarwal, Klawe, Moran, Shor,
//! Wilber), specialized to row *maxima* with leftmost tie-breaking. The
//! caller supplies the matrix as a closure. Correctness requires the
//! "difference" property used throughout this crate: for columns
//! `i < i'`, `value(j, i) - value(j, i')` is non-increasing in the row
//! index `j`. Under that property the leftmost maximum column index is
//! non-decreasing in `j` for every submatrix, which is exactly what the
//! reduce/interpolate recursion exploits.

/// Returns, for every row, the column index of its leftmost maximum.
pub(crate) fn smawk_row_maxima<F>(nrows: usize, ncols: usize, value: &F) -> Vec<usize>
where
    F: Fn(usize, usize) -> i128,
{
    assert!(ncols > 0, "matrix must have at least one column");
    let rows: Vec<usize> = (0..nrows).collect();
    let cols: Vec<usize> = (0..ncols).collect();
    let mut out = vec![0usize; nrows];
    smawk_inner(&rows, &cols, value, &mut out);
    out
}

fn smawk_inner<F>(rows: &[usize], cols: &[usize], value: &F, out: &mut [usize])
where
    F: Fn(usize, usize) -> i128,
{
    if rows.is_empty() {
        return;
    }

    // Reduce: survivors are the only columns that can hold a leftmost
    // row maximum; at most |rows| of them remain. A column is popped
    // once the incoming column strictly beats it at its diagonal row,
    // because a strict win persists for all later rows.
    let mut survivors: Vec<usize> = Vec::with_capacity(rows.len());
    for &c in cols {
        while let Some(&top) = survivors.last() {
            let r = rows[survivors.len() - 1];
            if value(r, top) < value(r, c) {
                survivors.pop();
            } else {
                break;
            }
        }
        if survivors.len() < rows.len() {
            survivors.push(c);
        }
    }
    let cols = survivors;

    let odd_rows: Vec<usize> = rows.iter().copied().skip(1).step_by(2).collect();
    smawk_inner(&odd_rows, &cols, value, out);

    // Interpolate even rows: the leftmost maximum of rows[k] lies between
    // the answers of the neighbouring odd rows.
    let mut col_idx = 0usize;
    for (k, &r) in rows.iter().enumerate().step_by(2) {
        let stop_col = if k + 1 < rows.len() {
            out[rows[k + 1]]
        } else {
            *cols.last().unwrap()
        };
        let mut best_idx = col_idx;
        let mut best_val = value(r, cols[col_idx]);
        let mut idx = col_idx;
        while cols[idx] != stop_col {
            idx += 1;
            let v = value(r, cols[idx]);
            if v > best_val {
                best_val = v;
                best_idx = idx;
            }
        }
        out[r] = cols[best_idx];
        col_idx = idx;
    }
}
