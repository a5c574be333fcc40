//! Grid syntax shared by `--grid` and `--gamma-db`: a comma-separated list,
//! `lin:a:b:n` (n evenly spaced points, both ends included) or `log:a:b:n`
//! (n log-spaced points between a and b, both positive).

pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty grid".into());
    }
    let values = if let Some(rest) = text.strip_prefix("lin:") {
        let (a, b, n) = range_parts(rest)?;
        if n == 1 {
            vec![a]
        } else {
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
                .collect()
        }
    } else if let Some(rest) = text.strip_prefix("log:") {
        let (a, b, n) = range_parts(rest)?;
        if !(a > 0.0 && b > 0.0) {
            return Err(format!("log grid needs positive ends, got {a} and {b}"));
        }
        if n == 1 {
            vec![a]
        } else {
            let (la, lb) = (a.log10(), b.log10());
            (0..n)
                .map(|i| match i {
                    0 => a,
                    i if i == n - 1 => b,
                    i => 10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64),
                })
                .collect()
        }
    } else {
        text.split(',')
            .map(|s| parse_number(s.trim()))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}

fn range_parts(rest: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range `{rest}` should look like a:b:n"));
    }
    let a = parse_number(parts[0])?;
    let b = parse_number(parts[1])?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| format!("point count `{}` is not a positive integer", parts[2]))?;
    if n == 0 {
        return Err("a range needs at least one point".into());
    }
    Ok((a, b, n))
}

fn parse_number(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}
