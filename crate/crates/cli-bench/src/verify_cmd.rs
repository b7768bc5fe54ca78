use verify::{
    check_balance_with, check_carve_trace, check_coloring, check_decomposition, check_mis, parse_coloring,
    parse_decomposition, parse_mis, parse_trace_params, Bounds, Side,
};

use crate::{load_graph_arg, read_file, Algo, CliError, Outcome, VerifyArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Decomposition,
    Trace,
    Mis,
    Coloring,
    Balance,
}

fn detect(text: &str, hint: Option<Algo>) -> Result<Kind, CliError> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    Ok(match first {
        Some("decomposition v1") => Kind::Decomposition,
        Some("carve v1") => Kind::Trace,
        Some(l) if l.starts_with("m ") => Kind::Mis,
        Some(l) if l.starts_with("col ") => Kind::Coloring,
        Some(l) if l.starts_with("bc ") => Kind::Balance,
        Some(l) => return Err(CliError::Format(format!("unrecognized result, first line `{l}`"))),
        None => match hint {
            Some(Algo::Coloring) => Kind::Coloring,
            Some(Algo::BalancedColor) => Kind::Balance,
            Some(a) if a.variant().is_some() => Kind::Decomposition,
            _ => Kind::Mis,
        },
    })
}

fn parse_balance(text: &str, n: usize) -> Result<Vec<Side>, CliError> {
    let mut sides = vec![None; n];
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || CliError::Format(format!("line {}: expected `bc <node> r|b|u`", i + 1));
        if f.len() != 3 || f[0] != "bc" {
            return Err(bad());
        }
        let v: usize = f[1].parse().map_err(|_| bad())?;
        let s = f[2].chars().next().and_then(Side::parse).filter(|_| f[2].len() == 1).ok_or_else(bad)?;
        if v >= n || sides[v].replace(s).is_some() {
            return Err(CliError::Format(format!("line {}: node {v} out of range or repeated", i + 1)));
        }
    }
    sides
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or_else(|| CliError::Format(format!("node {v} has no side"))))
        .collect()
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let g = load_graph_arg(&a.graph)?;
    let text = read_file(&a.input)?;
    let n = g.n();
    let fmt = |e: verify::FormatError| CliError::Format(e.to_string());
    let fmt_trace = |e: String| CliError::Format(e);
    let report = match detect(&text, a.algo)? {
        Kind::Decomposition => {
            let rec = parse_decomposition(&text).map_err(fmt)?;
            if rec.n != n {
                return Err(CliError::Format(format!("decomposition has n = {}, graph has {n}", rec.n)));
            }
            check_decomposition(&g, &rec, &Bounds::for_record(&rec))
        }
        Kind::Trace => {
            let p = parse_trace_params(&text).map_err(fmt_trace)?;
            if p.n != n {
                return Err(CliError::Format(format!("trace has n = {}, graph has {n}", p.n)));
            }
            check_carve_trace(&text)
        }
        Kind::Mis => check_mis(&g, &parse_mis(&text, n).map_err(fmt)?),
        Kind::Coloring => {
            let delta = a.delta.unwrap_or_else(|| g.max_degree());
            check_coloring(&g, &parse_coloring(&text, n).map_err(fmt)?, delta as u32 + 1)
        }
        Kind::Balance => check_balance_with(&parse_balance(&text, n)?, None, |k| 3 * k / 4),
    };
    Ok(Outcome { stdout: report.to_kv(), stderr: String::new(), passed: report.ok() })
}
