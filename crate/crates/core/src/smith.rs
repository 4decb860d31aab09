//! Smith normal form of integer matrices (invariant factors only).

/// Nonzero invariant factors `d_1 | d_2 | ...` of the matrix given by `rows`,
/// each with `ncols` entries. The abelian group `Z^ncols / rowspace` is
/// `Z^(ncols - len) ⊕ ⊕ Z/d_i`.
pub fn invariant_factors(rows: &[Vec<i64>], ncols: usize) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols);
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry in the trailing block becomes the pivot
        let Some((pi, pj)) = smallest_nonzero(&m, t) else {
            break;
        };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nrows {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    for j in t..ncols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..ncols {
                let q = m[t][j].div_euclid(m[t][t]);
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility: fold any non-multiple into the pivot row
                let bad = (t + 1..nrows)
                    .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % m[t][t] != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..ncols {
                            m[t][j] += m[i][j];
                        }
                    }
                    None => break,
                }
            }
            let Some((pi, pj)) = smallest_nonzero_in_cross(&m, t) else {
                break;
            };
            if pi != t {
                m.swap(t, pi);
            }
            if pj != t {
                for row in m.iter_mut() {
                    row.swap(t, pj);
                }
            }
        }
        diag.push(m[t][t].abs() as i64);
        t += 1;
    }
    diag
}

fn smallest_nonzero(m: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i128)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, &v) in row.iter().enumerate().skip(t) {
            if v != 0 && best.is_none_or(|(_, _, b)| v.abs() < b) {
                best = Some((i, j, v.abs()));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

// Smallest nonzero among the pivot row and pivot column.
fn smallest_nonzero_in_cross(m: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i128)> = None;
    let mut consider = |i: usize, j: usize, v: i128| {
        if v != 0 && best.is_none_or(|(_, _, b)| v.abs() < b) {
            best = Some((i, j, v.abs()));
        }
    };
    for (i, row) in m.iter().enumerate().skip(t) {
        consider(i, t, row[t]);
    }
    for (j, &v) in m[t].iter().enumerate().skip(t) {
        consider(t, j, v);
    }
    best.map(|(i, j, _)| (i, j))
}
