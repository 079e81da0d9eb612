use std::path::{Path, PathBuf};

use dynprec::precision::{adaptive_sum_with, SumStep};
use dynprec::profiler::{predict_add_cost, predict_mul_cost};
use dynprec::rootfind::{newton_solve, sci17, Mode, NewtonOptions, Polynomial, SolveTrace};
use dynprec::{parse_decimal, Arith, BigRational, GrossFloat, NoCount, OpCounter, PrecisionError, Rounding, Sign};

use num_traits::{Signed, ToPrimitive};

use crate::settings::{Format, Layer, Settings};
use crate::{Cli, CliError, DemoOp, ReportKind};

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Literal if it contains `:`, decimal otherwise.
fn number(ar: &Arith, s: &str) -> Result<GrossFloat, CliError> {
    let x = if s.contains(':') || s.trim() == "0" {
        ar.parse_literal(s)?
    } else {
        ar.from_decimal_string(s)?
    };
    Ok(x)
}

/// Left-aligned columns from comma-separated lines.
fn align(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn cost_line(c: &OpCounter) -> String {
    format!("cost     mults={} adds={} carry_adds={}\n", c.grossdigit_mults, c.grossdigit_adds, c.carry_adds)
}

fn small(t: u32, big_t: usize) -> Layer {
    Layer {
        base: Some(2),
        t: Some(t),
        big_t: Some(big_t),
        rounding: Some(Rounding::NearestEven),
        ..Layer::default()
    }
}

pub fn demo(cli: &Cli, op: DemoOp, operands: &[String], rs: Option<usize>) -> Result<(), CliError> {
    let want = if op == DemoOp::Recip { 1 } else { 2 };
    let (preset, defaults): (Layer, &[&str]) = match op {
        DemoOp::Add | DemoOp::Sub => (small(3, 2), &["+2^0 : 1.110|1.010|1.110", "+2^-3 : 1.111|1.100|1.011"]),
        DemoOp::Mul => (small(3, 2), &["+2^0 : 1.011|0.111|1.100", "+2^0 : 1.101|1.111|1.101"]),
        DemoOp::Recip => (small(3, 7), &["10"]),
        DemoOp::Div => (small(3, 7), &["1", "10"]),
    };
    let (layer, texts): (Layer, Vec<String>) = if operands.is_empty() {
        (cli.layers(preset)?, defaults.iter().map(|s| s.to_string()).collect())
    } else if operands.len() == want {
        (cli.layers(Layer::default())?, operands.to_vec())
    } else {
        return Err(CliError::Usage(format!("{op:?} takes {want} operand(s), got {}", operands.len()).to_lowercase()));
    };
    let st = Settings::resolve(layer, Format::Table);
    let ar = st.arith()?;
    let rs = rs.unwrap_or(st.big_t);
    let xs = texts.iter().map(|s| number(&ar, s)).collect::<Result<Vec<_>, _>>()?;
    let mut counter = OpCounter::new();
    let mut out = String::new();
    match op {
        DemoOp::Add | DemoOp::Sub | DemoOp::Mul => {
            let (x, y) = (&xs[0], &xs[1]);
            let (z, _, trace) = match op {
                DemoOp::Add => ar.add_traced(x, y, rs)?,
                DemoOp::Sub => ar.sub_traced(x, y, rs)?,
                _ => ar.mul_traced(x, y, rs)?,
            };
            match op {
                DemoOp::Add => ar.add(x, y, rs, &mut counter)?,
                DemoOp::Sub => ar.sub(x, y, rs, &mut counter)?,
                _ => ar.mul(x, y, rs, &mut counter)?,
            };
            match st.format {
                Format::Table => {
                    out.push_str(&trace.render(ar.base()));
                    out.push_str(&format!("result   {}\n", ar.to_literal(&z)));
                    out.push_str(&format!("decimal  {}\n", ar.to_decimal_string(&z, 40)));
                    out.push_str(&cost_line(&counter));
                }
                Format::Csv => {
                    out.push_str("step,label,sign,exponent,power,cell\n");
                    for r in &trace.rows {
                        for (power, cell) in r.rendered_cells(ar.base()) {
                            let sign = if r.sign.is_negative() { "-" } else { "+" };
                            out.push_str(&format!("{},{},{sign},{},{power},{cell}\n", r.step, r.label, r.exponent));
                        }
                    }
                }
            }
        }
        DemoOp::Recip | DemoOp::Div => {
            let y = xs.last().unwrap();
            let tr = ar.reciprocal_traced(y, rs, &mut NoCount)?;
            let yhat = ar.to_rational(&tr.scaled_input);
            let one = BigRational::from_integer(1.into());
            let resid = |z: &GrossFloat| (&one - &yhat * ar.to_rational(z)).abs().to_f64().unwrap_or(f64::NAN);
            let result = if op == DemoOp::Div {
                ar.div(&xs[0], y, rs, &mut counter)?.0
            } else {
                ar.reciprocal(y, rs, &mut counter)?
            };
            match st.format {
                Format::Table => {
                    out.push_str(&format!("scaled   {}  (scale {})\n", ar.to_literal(&tr.scaled_input), tr.scale));
                    let mut rows = String::from("k,Z_k,|1 - Y Z_k|\n");
                    for (k, z) in tr.iterates.iter().enumerate() {
                        rows.push_str(&format!("{k},{},{}\n", ar.to_literal(z), sci17(resid(z))));
                    }
                    out.push_str(&align(&rows));
                    out.push_str(&format!("result   {}\n", ar.to_literal(&result)));
                    out.push_str(&format!("decimal  {}\n", ar.to_decimal_string(&result, 40)));
                    out.push_str(&cost_line(&counter));
                }
                Format::Csv => {
                    out.push_str("k,z_k,residual\n");
                    for (k, z) in tr.iterates.iter().enumerate() {
                        out.push_str(&format!("{k},{},{}\n", ar.to_literal(z), sci17(resid(z))));
                    }
                }
            }
        }
    }
    write_out(st.out.as_deref(), &out)
}

/// Terms of the three-term worked examples with t = 7, T = 3.
fn example_terms(ar: &Arith, which: u8) -> Result<Vec<(Sign, GrossFloat)>, CliError> {
    use Sign::{Minus, Plus};
    let (digits, signs): ([(i64, &str); 3], [Sign; 3]) = match which {
        3 => (
            [
                (0, "1.0010101101010111111001001110110"),
                (0, "1.0010100010110010110101001101011"),
                (-7, "1.0101000011011110010010110001010"),
            ],
            [Plus, Minus, Minus],
        ),
        n => (
            [
                (-1, "1.0001100000010111111001001110110"),
                (0, "1.0010101010110010110101001101011"),
                (0, "1.1011011010111011011011010111001"),
            ],
            if n == 1 { [Plus, Plus, Plus] } else { [Plus, Plus, Minus] },
        ),
    };
    digits
        .iter()
        .zip(signs)
        .map(|(&(e, d), s)| Ok((s, ar.from_binary_string(Sign::Plus, e, d)?)))
        .collect()
}

fn sum_row(ar: &Arith, s: &SumStep, sep: &str) -> String {
    let levels: Vec<String> = s.levels.iter().map(|l| l.to_string()).collect();
    format!(
        "{},S{},{},{},{},{},{},{},{}\n",
        s.pass,
        s.node,
        levels.join(sep),
        ar.to_literal(&s.value),
        sci17(s.estimate),
        s.cancellation.shift_digits,
        s.action,
        s.charged_adds,
        s.reused
    )
}

pub fn eval_sum(cli: &Cli, terms: &[String], target: Option<f64>, example: Option<u8>) -> Result<(), CliError> {
    let preset = match example {
        Some(_) => Layer {
            rounding: Some(Rounding::Truncate),
            ..small(7, 3)
        },
        None => Layer::default(),
    };
    let st = Settings::resolve(cli.layers(preset)?, Format::Table);
    let ar = st.arith()?;
    let terms: Vec<(Sign, GrossFloat)> = match example {
        Some(n) if terms.is_empty() => example_terms(&ar, n)?,
        Some(_) => return Err(CliError::Usage("--example takes no terms".into())),
        None => terms
            .iter()
            .map(|s| number(&ar, s).map(|x| (x.sign(), x.abs())))
            .collect::<Result<_, _>>()?,
    };
    let target = target.unwrap_or(if example.is_some() { 2f64.powi(-8) } else { st.tol });
    let sep = if st.format == Format::Csv { ";" } else { " " };
    let mut rows = String::from("pass,node,levels,value,estimate,shift,action,adds,reused\n");
    let res = adaptive_sum_with(&ar, &terms, target, |s| rows.push_str(&sum_row(&ar, s, sep)));
    let mut out = match st.format {
        Format::Table => align(&rows),
        Format::Csv => rows,
    };
    let res = res.map_err(|e| {
        if let PrecisionError::AccuracyExhausted { best, .. } = &e {
            out.push_str(&format!("best     {}\n", ar.to_literal(best)));
        }
        e
    });
    match res {
        Ok(o) => {
            if st.format == Format::Table {
                let levels: Vec<String> = o.levels.iter().map(|l| l.to_string()).collect();
                out.push_str(&format!("sum      {}\n", ar.to_literal(&o.value)));
                out.push_str(&format!("decimal  {}\n", ar.to_decimal_string(&o.value, 40)));
                out.push_str(&format!("levels   {}\n", levels.join(" ")));
                out.push_str(&format!("estimate {}\n", sci17(o.estimate)));
                out.push_str(&format!("adds     {}\n", o.adds));
            }
            write_out(st.out.as_deref(), &out)
        }
        Err(e) => {
            write_out(st.out.as_deref(), &out)?;
            Err(e.into())
        }
    }
}

fn options(st: &Settings, mode: Mode, tol: f64) -> NewtonOptions {
    let mut o = NewtonOptions::new(mode);
    o.tol = tol;
    o.max_iter = st.max_iter;
    o.safety = st.safety;
    o
}

/// True error at the first step whose err stops decreasing.
fn saturation(ar: &Arith, tr: &SolveTrace, root: &BigRational) -> Option<f64> {
    let k = tr.steps.windows(2).position(|w| w[1].err >= w[0].err)? + 1;
    Some(tr.true_errors(ar, root)[k])
}

fn summary(ar: &Arith, tr: &SolveTrace, root: Option<&BigRational>) -> String {
    let last = tr.last();
    let sat = root.and_then(|r| saturation(ar, tr, r)).map_or("none".to_string(), sci17);
    format!(
        "mode {}\ntermination {}\niterations {}\nx {}\nerr {}\nprec {}\nescalations {:?}\nsaturation {sat}\nmults {} adds {}\n",
        tr.mode,
        tr.termination,
        tr.iterations(),
        ar.to_decimal_string(&last.x, 40),
        sci17(last.err),
        last.prec,
        tr.escalations,
        last.cum_mults,
        last.cum_adds
    )
}

pub fn newton(cli: &Cli, poly: Option<&str>, x0: Option<&str>, root: Option<&str>) -> Result<(), CliError> {
    let st = Settings::resolve(cli.layers(Layer::default())?, Format::Csv);
    let ar = st.arith()?;
    let p = match poly {
        Some(text) => {
            let c = text
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("bad coefficient list `{text}`")))?;
            Polynomial::from_integers(&ar, &c)?
        }
        None => Polynomial::quintic(&ar),
    };
    let root = match (root, poly) {
        (Some(r), _) => Some(parse_decimal(r)?),
        (None, None) => Some(BigRational::from_integer(1.into())),
        _ => None,
    };
    let x0 = number(&ar, x0.unwrap_or("2"))?;
    let tr = newton_solve(&ar, &p, &x0, &options(&st, st.mode, st.tol))?;
    let csv = tr.to_csv(&ar, root.as_ref());
    let sum = summary(&ar, &tr, root.as_ref());
    match (st.format, &st.out) {
        (Format::Csv, Some(path)) => {
            std::fs::write(path, csv)?;
            print!("{sum}");
        }
        (Format::Csv, None) => {
            print!("{csv}");
            eprint!("{sum}");
        }
        (Format::Table, out) => write_out(out.as_deref(), &format!("{}{sum}", align(&csv)))?,
    }
    Ok(())
}

pub fn figure(cli: &Cli, which: u8) -> Result<(), CliError> {
    let layer = cli.layers(Layer::default())?;
    // Curves run to stagnation unless a tolerance is asked for.
    let tol = layer.tol.unwrap_or(0.0);
    let st = Settings::resolve(layer, Format::Csv);
    let ar = st.arith()?;
    let modes: Vec<(String, Mode)> = if which == 1 {
        vec![("figure1.csv".into(), Mode::Fixed(0))]
    } else {
        if st.big_t < 4 {
            return Err(CliError::Usage(format!("figure 2 needs T >= 4, got {}", st.big_t)));
        }
        let mut m: Vec<(String, Mode)> = (0..=4).map(|q| (format!("figure2_fixed{q}.csv"), Mode::Fixed(q))).collect();
        m.push(("figure2_dynamic.csv".into(), Mode::Dynamic));
        m
    };
    let dir = st.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let p = Polynomial::quintic(&ar);
    let x0 = ar.from_integer(2)?;
    let root = BigRational::from_integer(1.into());
    let mut lines = String::from("file,mode,iterations,termination,saturation,min_true_err,mults,adds\n");
    for (name, mode) in modes {
        let tr = newton_solve(&ar, &p, &x0, &options(&st, mode, tol))?;
        std::fs::write(dir.join(&name), tr.to_csv(&ar, Some(&root)))?;
        let best = tr.true_errors(&ar, &root).into_iter().fold(f64::INFINITY, f64::min);
        let last = tr.last();
        lines.push_str(&format!(
            "{name},{mode},{},{},{},{},{},{}\n",
            tr.iterations(),
            tr.termination,
            saturation(&ar, &tr, &root).map_or(String::new(), sci17),
            sci17(best),
            last.cum_mults,
            last.cum_adds
        ));
    }
    print!("{}", if st.format == Format::Table { align(&lines) } else { lines });
    Ok(())
}

/// Operand of `chunks` chunks, every digit β-1.
fn full(ar: &Arith, chunks: usize) -> Result<GrossFloat, CliError> {
    Ok(ar.from_parts(Sign::Plus, 0, vec![ar.modulus() - 1; chunks])?)
}

pub fn report(cli: &Cli, kind: ReportKind) -> Result<(), CliError> {
    let st = Settings::resolve(cli.layers(Layer::default())?, Format::Csv);
    let ar = st.arith()?;
    let csv = match kind {
        ReportKind::Costs => {
            let mut s = String::from("op,q,p,predicted_mults,predicted_adds,mults,adds,carry_adds\n");
            for q in 0..=st.big_t {
                for p in q..=st.big_t {
                    let (x, y) = (full(&ar, q + 1)?, full(&ar, p + 1)?);
                    let mut c = OpCounter::new();
                    ar.mul(&x, &y, st.big_t, &mut c)?;
                    let (pm, pa) = predict_mul_cost(q, p);
                    s.push_str(&format!("mul,{q},{p},{pm},{pa},{},{},{}\n", c.grossdigit_mults, c.grossdigit_adds, c.carry_adds));
                    let mut c = OpCounter::new();
                    ar.add(&x, &y, st.big_t, &mut c)?;
                    s.push_str(&format!("add,{q},{p},0,{},{},{},{}\n", predict_add_cost(q, p), c.grossdigit_mults, c.grossdigit_adds, c.carry_adds));
                }
            }
            s
        }
        ReportKind::Newton => {
            let p = Polynomial::quintic(&ar);
            let tr = newton_solve(&ar, &p, &ar.from_integer(2)?, &options(&st, st.mode, st.tol))?;
            let mut c = OpCounter::new();
            c.merge(&tr.counter);
            c.to_csv()
        }
    };
    let text = if st.format == Format::Table { align(&csv) } else { csv };
    write_out(st.out.as_deref(), &text)
}
