//! Parametric benchmark generator.

use std::fmt::Write;

/// The max-of-`n` problem with the arithmetic grammar over `n` parameters.
pub fn gen_max_n(n: usize) -> String {
    assert!(n >= 2, "max-of-n needs n >= 2");
    let name = format!("max{}", n);
    let xs: Vec<String> = (1..=n).map(|i| format!("x{}", i)).collect();
    let call = format!("({} {})", name, xs.join(" "));
    let mut out = String::from("(set-logic LIA)\n");
    let params: Vec<String> = xs.iter().map(|x| format!("({} Int)", x)).collect();
    let _ = writeln!(out, "(synth-fun {} ({}) Int", name, params.join(" "));
    let _ = writeln!(out, "  ((S Int ({} 0 1 (+ S S) (- S S) (ite C S S)))", xs.join(" "));
    out.push_str("   (C Bool ((<= S S) (= S S) (and C C) (not C)))))\n");
    let decls: Vec<String> = xs.iter().map(|x| format!("(declare-var {} Int)", x)).collect();
    let _ = writeln!(out, "{}", decls.join(" "));
    for x in &xs {
        let _ = writeln!(out, "(constraint (>= {} {}))", call, x);
    }
    let eqs: Vec<String> = xs.iter().map(|x| format!("(= {} {})", call, x)).collect();
    let _ = writeln!(out, "(constraint (or {}))", eqs.join(" "));
    out.push_str("(check-synth)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_is_the_reference_input() {
        let reference = "(set-logic LIA)
(synth-fun max2 ((x1 Int) (x2 Int)) Int
  ((S Int (x1 x2 0 1 (+ S S) (- S S) (ite C S S)))
   (C Bool ((<= S S) (= S S) (and C C) (not C)))))
(declare-var x1 Int) (declare-var x2 Int)
(constraint (>= (max2 x1 x2) x1))
(constraint (>= (max2 x1 x2) x2))
(constraint (or (= (max2 x1 x2) x1) (= (max2 x1 x2) x2)))
(check-synth)
";
        assert_eq!(gen_max_n(2), reference);
    }

    #[test]
    fn three_has_four_constraints() {
        let p = crate::parse::parse(&gen_max_n(3)).unwrap();
        assert_eq!(p.constraints.len(), 4);
        assert_eq!(p.target.params.len(), 3);
    }
}
