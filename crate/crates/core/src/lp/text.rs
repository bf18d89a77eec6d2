//! Line-oriented LP text export for debugging against external solvers.
//!
//! Format, one item per line, labels preserved verbatim:
//!
//! ```text
//! min: 2.5 y_cap(wind) + 1 x_gen(wind,0)
//! bal(elec,z1,power,0): 1 x_gen(wind,0) + 1 x_nse(elec,z1,power,0) - 1 x_crt(elec,z1,power,0) = 12
//! bounds:
//! 0 <= y_cap(wind) <= 40
//! free x_exp(elec,z1,power,hydrogen,0)
//! ```

use std::fmt::Write as _;

use super::{Sense, StandardLp};

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn push_terms(out: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut first = true;
    for (label, coef) in terms {
        if coef == 0.0 {
            continue;
        }
        if first {
            if coef < 0.0 {
                let _ = write!(out, "- {} {}", fmt_num(-coef), label);
            } else {
                let _ = write!(out, "{} {}", fmt_num(coef), label);
            }
            first = false;
        } else if coef < 0.0 {
            let _ = write!(out, " - {} {}", fmt_num(-coef), label);
        } else {
            let _ = write!(out, " + {} {}", fmt_num(coef), label);
        }
    }
    if first {
        out.push('0');
    }
}

impl StandardLp {
    /// Renders the problem in the line-oriented text format.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        out.push_str("min: ");
        push_terms(
            &mut out,
            self.vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.cost != 0.0)
                .map(|(j, v)| (self.var_label(j as u32).to_string(), v.cost)),
        );
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{}: ", self.row_label(i as u32));
            push_terms(
                &mut out,
                row.terms
                    .iter()
                    .map(|&(v, c)| (self.var_label(v).to_string(), c)),
            );
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {}", fmt_num(row.rhs));
        }
        out.push_str("bounds:\n");
        for (j, v) in self.vars.iter().enumerate() {
            let label = self.var_label(j as u32);
            if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
                let _ = writeln!(out, "free {label}");
            } else {
                let lo = if v.lower == f64::NEG_INFINITY {
                    "-inf".to_string()
                } else {
                    fmt_num(v.lower)
                };
                let hi = if v.upper == f64::INFINITY {
                    "inf".to_string()
                } else {
                    fmt_num(v.upper)
                };
                let _ = writeln!(out, "{lo} <= {label} <= {hi}");
            }
        }
        out
    }
}
