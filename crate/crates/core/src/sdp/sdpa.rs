//! SDPA sparse format (`.dat-s`) and solver output files.
//!
//! The file encodes `minimize cᵀx s.t. Σ F_i x_i − F_0 ⪰ 0`, so a block
//! `K + Σ λ_i F_i` is written with `F_0 = −K`. Equality rows are eliminated
//! first; exported variables are the reduced ones and import lifts them back.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{eliminate_equalities, SdpBlock, SdpError, SdpProblem, SdpSolution, SdpStatus};

fn parse_err(line: usize, message: impl Into<String>) -> SdpError {
    SdpError::Parse { line, message: message.into() }
}

/// SDPA text of `p` after equality elimination.
pub fn to_sdpa_string(p: &SdpProblem) -> Result<String, SdpError> {
    let q = eliminate_equalities(p)?.problem;
    let mut out = String::new();
    let _ = writeln!(out, "\"bbrelax moment relaxation, objective constant {}", q.objective_constant);
    let _ = writeln!(out, "{}", q.num_vars);
    let _ = writeln!(out, "{}", q.blocks.len());
    let structure: Vec<String> =
        q.blocks.iter().map(|b| if b.diagonal { format!("-{}", b.size) } else { b.size.to_string() }).collect();
    let _ = writeln!(out, "{}", structure.join(" "));
    let c: Vec<String> = q.objective.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    for (k, blk) in q.blocks.iter().enumerate() {
        write_matrix(&mut out, 0, k, &(-&blk.constant), blk.diagonal);
        for (i, f) in &blk.terms {
            write_matrix(&mut out, i + 1, k, f, blk.diagonal);
        }
    }
    Ok(out)
}

fn write_matrix(out: &mut String, matno: usize, blk: usize, m: &DMatrix<f64>, diagonal: bool) {
    for i in 0..m.nrows() {
        let range = if diagonal { i..i + 1 } else { i..m.ncols() };
        for j in range {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{} {} {} {} {}", matno, blk + 1, i + 1, j + 1, v);
            }
        }
    }
}

pub fn export_sdpa(p: &SdpProblem, path: &Path) -> Result<(), SdpError> {
    std::fs::write(path, to_sdpa_string(p)?)?;
    Ok(())
}

/// Parse a `.dat-s` file into an equality-free problem.
pub fn parse_sdpa(text: &str) -> Result<SdpProblem, SdpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with(['"', '*']) && !l.trim().is_empty());
    let clean = |l: &str| l.replace(['{', '}', '(', ')', ','], " ");

    let mut header = |what: &str| -> Result<(usize, String), SdpError> {
        let (n, l) = lines.next().ok_or_else(|| parse_err(text.lines().count().max(1), format!("missing {what}")))?;
        Ok((n, clean(l)))
    };
    let (ln, l) = header("number of variables")?;
    let m: usize = first_token(&l).parse().map_err(|_| parse_err(ln, "expected the number of variables"))?;
    let (ln, l) = header("number of blocks")?;
    let nblocks: usize = first_token(&l).parse().map_err(|_| parse_err(ln, "expected the number of blocks"))?;
    let (ln, l) = header("block structure")?;
    let structure: Vec<i64> = l
        .split_whitespace()
        .take(nblocks)
        .map(|t| t.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(ln, "bad block structure"))?;
    if structure.len() != nblocks || structure.contains(&0) {
        return Err(parse_err(ln, "bad block structure"));
    }
    let mut c = Vec::with_capacity(m);
    while c.len() < m {
        let (ln, l) = header("objective vector")?;
        for t in l.split_whitespace() {
            if c.len() < m {
                c.push(t.parse::<f64>().map_err(|_| parse_err(ln, format!("bad number {t:?}")))?);
            }
        }
    }

    let mut blocks: Vec<SdpBlock> = structure
        .iter()
        .map(|&s| {
            let size = s.unsigned_abs() as usize;
            SdpBlock { size, diagonal: s < 0, constant: DMatrix::zeros(size, size), terms: Vec::new() }
        })
        .collect();
    let mut mats: Vec<Vec<Option<DMatrix<f64>>>> = vec![vec![None; m]; nblocks];
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(parse_err(ln, "expected `matno block i j value`"));
        }
        let int = |t: &str| t.parse::<usize>().map_err(|_| parse_err(ln, format!("bad index {t:?}")));
        let (matno, blk, i, j) = (int(toks[0])?, int(toks[1])?, int(toks[2])?, int(toks[3])?);
        let v: f64 = toks[4].parse().map_err(|_| parse_err(ln, format!("bad number {:?}", toks[4])))?;
        if matno > m || blk == 0 || blk > nblocks {
            return Err(parse_err(ln, "matrix or block index out of range"));
        }
        let size = blocks[blk - 1].size;
        if i == 0 || j == 0 || i > size || j > size || (blocks[blk - 1].diagonal && i != j) {
            return Err(parse_err(ln, "entry outside its block"));
        }
        let target = if matno == 0 {
            &mut blocks[blk - 1].constant
        } else {
            mats[blk - 1][matno - 1].get_or_insert_with(|| DMatrix::zeros(size, size))
        };
        let v = if matno == 0 { -v } else { v };
        target[(i - 1, j - 1)] = v;
        target[(j - 1, i - 1)] = v;
    }
    for (blk, ms) in blocks.iter_mut().zip(mats) {
        blk.terms = ms.into_iter().enumerate().filter_map(|(i, f)| f.map(|f| (i, f))).collect();
    }
    Ok(SdpProblem { num_vars: m, blocks, objective: DVector::from_vec(c), objective_constant: 0.0, equalities: vec![] })
}

fn first_token(l: &str) -> &str {
    l.split_whitespace().next().unwrap_or("")
}

/// Solution vector and status read from a solver output file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaOutput {
    pub status: SdpStatus,
    pub x: Vec<f64>,
    pub dual_objective: Option<f64>,
}

/// Accepts SDPA output (`phase.value`, `xVec` or `yVec`) and the CSDP
/// solution format (vector on the first line, then matrix entries).
pub fn parse_solution(text: &str) -> Result<SdpaOutput, SdpError> {
    let first = text.lines().position(|l| !l.trim().is_empty()).ok_or_else(|| parse_err(1, "empty solution file"))?;
    let first_line = text.lines().nth(first).unwrap_or_default();
    let numbers: Option<Vec<f64>> = first_line.split_whitespace().map(|t| t.parse().ok()).collect();
    if let Some(x) = numbers {
        return Ok(SdpaOutput { status: SdpStatus::Optimal, x, dual_objective: None });
    }

    let mut status = None;
    let mut x = None;
    let mut dual = None;
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let l = lines[i].trim();
        if let Some(rest) = l.strip_prefix("phase.value") {
            let word = rest.trim_start_matches([' ', '=', '\t']).split_whitespace().next().unwrap_or("");
            status = Some(match word {
                "pdOPT" => SdpStatus::Optimal,
                "pINF" | "pINF_dFEAS" | "pdINF" => SdpStatus::Infeasible,
                "pUNBD" | "pFEAS_dINF" | "dINF" => SdpStatus::Unbounded,
                "" => return Err(parse_err(i + 1, "missing phase value")),
                _ => SdpStatus::SlowProgress,
            });
        } else if let Some(rest) = l.strip_prefix("objValDual") {
            let t = rest.trim_start_matches([' ', '=', '\t']).trim();
            dual = Some(t.parse::<f64>().map_err(|_| parse_err(i + 1, "bad objValDual"))?);
        } else if l.starts_with("xVec") || l.starts_with("yVec") {
            let start = i;
            let mut body = l.split_once('=').map_or("", |(_, r)| r).to_string();
            while !body.contains('}') {
                i += 1;
                let next = lines.get(i).ok_or_else(|| parse_err(start + 1, "unterminated vector"))?;
                body.push_str(next);
            }
            let inner = body
                .split_once('{')
                .and_then(|(_, r)| r.split_once('}'))
                .map(|(v, _)| v)
                .ok_or_else(|| parse_err(start + 1, "expected `{...}`"))?;
            let v: Vec<f64> = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err(start + 1, "bad number in vector"))?;
            x = Some(v);
        }
        i += 1;
    }
    let x = x.ok_or_else(|| parse_err(lines.len().max(1), "no xVec or yVec section"))?;
    Ok(SdpaOutput { status: status.unwrap_or(SdpStatus::Optimal), x, dual_objective: dual })
}

/// SDPA-style output for a reduced solution vector.
pub fn write_solution(out: &SdpaOutput, primal_objective: f64) -> String {
    let phase = match out.status {
        SdpStatus::Optimal => "pdOPT",
        SdpStatus::Infeasible => "pINF",
        SdpStatus::Unbounded => "pUNBD",
        SdpStatus::SlowProgress => "noINFO",
    };
    let xs: Vec<String> = out.x.iter().map(|v| v.to_string()).collect();
    let mut s = format!("phase.value  = {phase}\nobjValPrimal = {primal_objective}\n");
    if let Some(d) = out.dual_objective {
        let _ = writeln!(s, "objValDual   = {d}");
    }
    let _ = writeln!(s, "xVec = \n{{{}}}", xs.join(","));
    s
}

/// Solution of `p` from an external solver's output, mapping the reduced
/// variables back through the equality elimination.
pub fn import_solution_str(p: &SdpProblem, text: &str) -> Result<SdpSolution, SdpError> {
    let out = parse_solution(text)?;
    let red = eliminate_equalities(p)?;
    if out.x.len() != red.problem.num_vars {
        return Err(SdpError::Mismatch(format!(
            "solution has {} entries, problem has {} variables",
            out.x.len(),
            red.problem.num_vars
        )));
    }
    let x = red.lift(&DVector::from_vec(out.x));
    let primal = p.objective_value(&x);
    let dual = out.dual_objective.map_or(primal, |d| d + red.problem.objective_constant);
    Ok(SdpSolution {
        status: out.status,
        primal_objective: primal,
        dual_objective: dual,
        blocks: p.block_values(&x),
        x,
        dual_blocks: Vec::new(),
        iterations: 0,
        gap: (primal - dual).abs() / (1.0 + primal.abs() + dual.abs()),
    })
}

pub fn import_sdpa_solution(p: &SdpProblem, path: &Path) -> Result<SdpSolution, SdpError> {
    import_solution_str(p, &std::fs::read_to_string(path)?)
}

/// Reduced-variable output for an internally solved problem, in the format
/// [`parse_solution`] reads.
pub fn solution_to_string(p: &SdpProblem, sol: &SdpSolution) -> Result<String, SdpError> {
    let red = eliminate_equalities(p)?;
    // N has orthonormal columns, so μ = Nᵀ(λ − λ₀).
    let mu = red.null.transpose() * (&sol.x - &red.offset);
    let out = SdpaOutput {
        status: sol.status,
        x: mu.iter().copied().collect(),
        dual_objective: Some(sol.dual_objective - red.problem.objective_constant),
    };
    Ok(write_solution(&out, sol.primal_objective - red.problem.objective_constant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve, SdpOptions};

    fn correlation() -> SdpProblem {
        SdpProblem {
            num_vars: 1,
            blocks: vec![SdpBlock {
                size: 2,
                diagonal: false,
                constant: DMatrix::identity(2, 2),
                terms: vec![(0, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))],
            }],
            objective: DVector::from_vec(vec![1.0]),
            objective_constant: 0.0,
            equalities: vec![],
        }
    }

    #[test]
    fn export_layout() {
        let s = to_sdpa_string(&correlation()).unwrap();
        let body: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(body, ["1", "1", "2", "1", "0 1 1 1 -1", "0 1 2 2 -1", "1 1 1 2 1"]);
    }

    #[test]
    fn parse_round_trip_is_exact() {
        let mut p = correlation();
        p.blocks[0].constant[(0, 0)] = 0.1 + 0.2;
        p.blocks.push(SdpBlock {
            size: 2,
            diagonal: true,
            constant: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / 3.0, 2.0])),
            terms: vec![(0, DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 0.0])))],
        });
        let back = parse_sdpa(&to_sdpa_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn solution_round_trip() {
        let p = correlation();
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        let text = solution_to_string(&p, &sol).unwrap();
        let back = import_solution_str(&p, &text).unwrap();
        assert_eq!(back.status, SdpStatus::Optimal);
        assert!((back.x[0] + 1.0).abs() < 1e-6);
        assert_eq!(back.x, sol.x);
    }

    #[test]
    fn reads_sdpa7_and_csdp() {
        let sdpa = "phase.value  = pdOPT\nobjValPrimal = -1.0\nxVec = \n{-9.99e-01,\n 2.5}\nxMat = \n{ {1,2} }\n";
        let out = parse_solution(sdpa).unwrap();
        assert_eq!(out.x, vec![-0.999, 2.5]);
        assert_eq!(out.status, SdpStatus::Optimal);
        let y = parse_solution("yVec = {1.5}\nphase.value = pINF\n").unwrap();
        assert_eq!((y.x, y.status), (vec![1.5], SdpStatus::Infeasible));
        let csdp = "-1.0e+00 3\n1 1 1 1 1.0\n2 1 1 1 0.5\n";
        assert_eq!(parse_solution(csdp).unwrap().x, vec![-1.0, 3.0]);
    }

    #[test]
    fn malformed_header_reports_line_one() {
        match parse_sdpa("two\n1\n2\n1\n") {
            Err(SdpError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_sdpa("1\n1\n2\n1\n0 1 3 1 1.0\n") {
            Err(SdpError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equalities_are_eliminated_on_export() {
        let mut p = correlation();
        p.num_vars = 2;
        p.objective = DVector::from_vec(vec![1.0, 0.0]);
        p.blocks[0].terms.push((1, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])));
        p.equalities = vec![(DVector::from_vec(vec![0.0, 1.0]), 0.5)];
        let text = to_sdpa_string(&p).unwrap();
        assert_eq!(text.lines().nth(1), Some("1"));
        let sol = solve(&p, &SdpOptions::default()).unwrap();
        let back = import_solution_str(&p, &solution_to_string(&p, &sol).unwrap()).unwrap();
        assert!((back.x[1] - 0.5).abs() < 1e-12);
        assert!((&back.x - &sol.x).amax() < 1e-12);
    }
}
