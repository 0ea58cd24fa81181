//! Bounded simplex over exact rationals with branch-and-bound for integer
//! solutions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Budget, TheoryError};

type Q = BigRational;

/// `Σ coeffs·x ≤ bound` (or `≥` when `upper` is false).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<(usize, BigInt)>,
    pub bound: BigInt,
    pub upper: bool,
}

#[derive(Clone)]
struct Tableau {
    /// rows[r][j]: coefficient of variable j in the definition of basic[r].
    rows: Vec<Vec<Q>>,
    basic: Vec<usize>,
    row_of: Vec<Option<usize>>,
    lower: Vec<Option<Q>>,
    upper: Vec<Option<Q>>,
    value: Vec<Q>,
    /// Index of the constraint that set each bound.
    lsrc: Vec<Option<usize>>,
    usrc: Vec<Option<usize>>,
    /// Constraints responsible for the last failed `check`.
    core: Vec<usize>,
}

impl Tableau {
    fn violated(&self, v: usize) -> Option<bool> {
        if let Some(l) = &self.lower[v] {
            if self.value[v] < *l {
                return Some(true);
            }
        }
        if let Some(u) = &self.upper[v] {
            if self.value[v] > *u {
                return Some(false);
            }
        }
        None
    }

    fn update(&mut self, j: usize, v: Q) {
        let delta = &v - &self.value[j];
        for (r, row) in self.rows.iter().enumerate() {
            let a = &row[j];
            if !a.is_zero() {
                let b = self.basic[r];
                self.value[b] += a * &delta;
            }
        }
        self.value[j] = v;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let i = self.basic[r];
        let a = self.rows[r][j].clone();
        // x_j = (x_i - Σ_{k≠j} a_k x_k) / a
        let mut new_row: Vec<Q> = self.rows[r].iter().map(|c| -c / &a).collect();
        new_row[j] = Q::zero();
        new_row[i] = Q::one() / &a;
        for s in 0..self.rows.len() {
            if s == r {
                continue;
            }
            let c = self.rows[s][j].clone();
            if c.is_zero() {
                continue;
            }
            let row = &mut self.rows[s];
            row[j] = Q::zero();
            for (k, nk) in new_row.iter().enumerate() {
                if !nk.is_zero() {
                    row[k] += &c * nk;
                }
            }
        }
        self.rows[r] = new_row;
        self.basic[r] = j;
        self.row_of[i] = None;
        self.row_of[j] = Some(r);
    }

    fn pivot_and_update(&mut self, r: usize, j: usize, v: Q) {
        let i = self.basic[r];
        let theta = (&v - &self.value[i]) / &self.rows[r][j];
        self.value[i] = v;
        self.value[j] += &theta;
        for (s, row) in self.rows.iter().enumerate() {
            if s != r {
                let a = &row[j];
                if !a.is_zero() {
                    let b = self.basic[s];
                    self.value[b] += a * &theta;
                }
            }
        }
        self.pivot(r, j);
    }

    /// Restore bound feasibility; false when the bounds are infeasible.
    fn check(&mut self, budget: &mut Budget) -> Result<bool, TheoryError> {
        loop {
            budget.tick_pivot()?;
            let bad = self
                .basic
                .iter()
                .enumerate()
                .filter_map(|(r, &b)| self.violated(b).map(|low| (b, r, low)))
                .min_by_key(|(b, _, _)| *b);
            let (i, r, below) = match bad {
                None => return Ok(true),
                Some(x) => x,
            };
            let n = self.value.len();
            let mut pick = None;
            for j in 0..n {
                if self.row_of[j].is_some() {
                    continue;
                }
                let a = &self.rows[r][j];
                if a.is_zero() {
                    continue;
                }
                let can_inc = self.upper[j].as_ref().map_or(true, |u| self.value[j] < *u);
                let can_dec = self.lower[j].as_ref().map_or(true, |l| self.value[j] > *l);
                let ok = if below {
                    (a.is_positive() && can_inc) || (a.is_negative() && can_dec)
                } else {
                    (a.is_negative() && can_inc) || (a.is_positive() && can_dec)
                };
                if ok {
                    pick = Some(j);
                    break;
                }
            }
            let j = match pick {
                None => {
                    self.explain_row(i, r, below);
                    return Ok(false);
                }
                Some(j) => j,
            };
            let target = if below {
                self.lower[i].clone().unwrap()
            } else {
                self.upper[i].clone().unwrap()
            };
            self.pivot_and_update(r, j, target);
        }
    }

    /// Row `r` forces basic `i` past its violated bound: that bound plus the
    /// bounds blocking every nonbasic variable of the row.
    fn explain_row(&mut self, i: usize, r: usize, below: bool) {
        let mut core = Vec::new();
        core.push(if below { self.lsrc[i] } else { self.usrc[i] });
        for (j, a) in self.rows[r].iter().enumerate() {
            if a.is_zero() || self.row_of[j].is_some() {
                continue;
            }
            let at_upper = a.is_positive() == below;
            core.push(if at_upper { self.usrc[j] } else { self.lsrc[j] });
        }
        self.core = core.into_iter().flatten().collect();
    }

    fn set_lower(&mut self, v: usize, b: Q) -> bool {
        self.set_lower_from(v, b, None)
    }

    fn set_upper(&mut self, v: usize, b: Q) -> bool {
        self.set_upper_from(v, b, None)
    }

    fn set_lower_from(&mut self, v: usize, b: Q, src: Option<usize>) -> bool {
        if self.lower[v].as_ref().map_or(true, |l| b > *l) {
            self.lower[v] = Some(b.clone());
            self.lsrc[v] = src;
        }
        if let (Some(l), Some(u)) = (&self.lower[v], &self.upper[v]) {
            if l > u {
                self.core = [self.lsrc[v], self.usrc[v]].into_iter().flatten().collect();
                return false;
            }
        }
        if self.row_of[v].is_none() && self.value[v] < b {
            self.update(v, b);
        }
        true
    }

    fn set_upper_from(&mut self, v: usize, b: Q, src: Option<usize>) -> bool {
        if self.upper[v].as_ref().map_or(true, |u| b < *u) {
            self.upper[v] = Some(b.clone());
            self.usrc[v] = src;
        }
        if let (Some(l), Some(u)) = (&self.lower[v], &self.upper[v]) {
            if l > u {
                self.core = [self.lsrc[v], self.usrc[v]].into_iter().flatten().collect();
                return false;
            }
        }
        if self.row_of[v].is_none() && self.value[v] > b {
            self.update(v, b);
        }
        true
    }
}

/// Build a tableau over `nvars` structural variables plus one slack per
/// distinct multi-variable row. Fails with the clashing constraints when two
/// bounds clash outright.
fn build(nvars: usize, cs: &[Constraint]) -> Result<Tableau, Vec<usize>> {
    let mut slack_of: BTreeMap<&Vec<(usize, BigInt)>, usize> = BTreeMap::new();
    let mut rows_def: Vec<&Vec<(usize, BigInt)>> = Vec::new();
    for c in cs {
        let direct = c.coeffs.len() == 1 && c.coeffs[0].1.is_one();
        if !direct && !slack_of.contains_key(&c.coeffs) {
            slack_of.insert(&c.coeffs, nvars + rows_def.len());
            rows_def.push(&c.coeffs);
        }
    }
    let total = nvars + rows_def.len();
    let mut t = Tableau {
        rows: Vec::new(),
        basic: Vec::new(),
        row_of: alloc::vec![None; total],
        lower: alloc::vec![None; total],
        upper: alloc::vec![None; total],
        value: alloc::vec![Q::zero(); total],
        lsrc: alloc::vec![None; total],
        usrc: alloc::vec![None; total],
        core: Vec::new(),
    };
    for (r, def) in rows_def.iter().enumerate() {
        let mut row = alloc::vec![Q::zero(); total];
        for (x, a) in def.iter() {
            row[*x] = Q::from_integer(a.clone());
        }
        t.rows.push(row);
        t.basic.push(nvars + r);
        t.row_of[nvars + r] = Some(r);
    }
    for (k, c) in cs.iter().enumerate() {
        let direct = c.coeffs.len() == 1 && c.coeffs[0].1.is_one();
        let v = if direct { c.coeffs[0].0 } else { slack_of[&c.coeffs] };
        let b = Q::from_integer(c.bound.clone());
        let ok = if c.upper {
            t.set_upper_from(v, b, Some(k))
        } else {
            t.set_lower_from(v, b, Some(k))
        };
        if !ok {
            return Err(core::mem::take(&mut t.core));
        }
    }
    Ok(t)
}

/// Rational feasibility.
pub fn feasible_rational(nvars: usize, cs: &[Constraint], budget: &mut Budget) -> Result<bool, TheoryError> {
    Ok(infeasible_subset(nvars, cs, budget)?.is_none())
}

/// Indices of a rationally infeasible subset of `cs`, or None when `cs` is
/// feasible.
pub fn infeasible_subset(nvars: usize, cs: &[Constraint], budget: &mut Budget) -> Result<Option<Vec<usize>>, TheoryError> {
    let mut t = match build(nvars, cs) {
        Err(core) => return Ok(Some(core)),
        Ok(t) => t,
    };
    if t.check(budget)? {
        return Ok(None);
    }
    let mut core = core::mem::take(&mut t.core);
    core.sort();
    core.dedup();
    Ok(Some(core))
}

/// Magnitude bound within which an integer solution exists if any does.
fn solution_box(nvars: usize, cs: &[Constraint]) -> BigInt {
    let mut a = BigInt::one();
    for c in cs {
        for (_, k) in &c.coeffs {
            a = a.max(k.abs());
        }
        a = a.max(c.bound.abs());
    }
    let m = cs.len().max(1);
    let base = BigInt::from(m) * a;
    BigInt::from(nvars + 1) * num_traits::pow(base, 2 * m + 1)
}

/// `Σ coeffs·y + constant`.
#[derive(Clone, Debug, Default)]
struct Affine {
    coeffs: BTreeMap<usize, BigInt>,
    constant: BigInt,
}

impl Affine {
    fn var(v: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, BigInt::one());
        Affine {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    fn add_scaled(&mut self, other: &Affine, k: &BigInt) {
        for (v, c) in &other.coeffs {
            let e = self.coeffs.entry(*v).or_insert_with(BigInt::zero);
            *e += c * k;
        }
        self.coeffs.retain(|_, c| !c.is_zero());
        self.constant += &other.constant * k;
    }

    /// Replace variable `v` by `repl`.
    fn subst(&mut self, v: usize, repl: &Affine) {
        if let Some(c) = self.coeffs.remove(&v) {
            self.add_scaled(repl, &c);
        }
    }

    fn eval(&self, point: &[BigInt]) -> BigInt {
        let mut s = self.constant.clone();
        for (v, c) in &self.coeffs {
            s += c * &point[*v];
        }
        s
    }
}

/// Integer solution for the structural variables, if one exists.
///
/// Equalities are eliminated exactly by unimodular substitutions; the
/// remaining inequalities are searched by branch and bound inside boxes of
/// growing radius. A box search that fails is conclusive once the rational
/// relaxation is shown to lie strictly inside the box, or once the box
/// reaches the radius within which some solution must exist.
pub fn solve_integer(nvars: usize, cs: &[Constraint], budget: &mut Budget) -> Result<Option<Vec<BigInt>>, TheoryError> {
    let mut ineqs: Vec<Affine> = Vec::new();
    let mut eqs: Vec<Affine> = Vec::new();
    let mut uppers: BTreeMap<&Vec<(usize, BigInt)>, &BigInt> = BTreeMap::new();
    let mut lowers: BTreeMap<&Vec<(usize, BigInt)>, &BigInt> = BTreeMap::new();
    for c in cs {
        let mut a = Affine::default();
        for (v, k) in &c.coeffs {
            a.coeffs.insert(*v, k.clone());
        }
        a.constant = -c.bound.clone();
        if c.upper {
            uppers.entry(&c.coeffs).and_modify(|b| *b = (*b).min(&c.bound)).or_insert(&c.bound);
        } else {
            a = a_neg(a);
            lowers.entry(&c.coeffs).and_modify(|b| *b = (*b).max(&c.bound)).or_insert(&c.bound);
        }
        ineqs.push(a);
    }
    for (coeffs, u) in &uppers {
        if lowers.get(coeffs) == Some(u) {
            let mut a = Affine::default();
            for (v, k) in coeffs.iter() {
                a.coeffs.insert(*v, k.clone());
            }
            a.constant = -(*u).clone();
            eqs.push(a);
        }
    }
    // defs[i]: original variable i in terms of the current variables.
    let mut defs: Vec<Affine> = (0..nvars).map(Affine::var).collect();
    while let Some(mut e) = eqs.pop() {
        loop {
            budget.tick_pivot()?;
            let (j, cj) = match e.coeffs.iter().min_by_key(|(_, c)| c.abs()) {
                None => {
                    if !e.constant.is_zero() {
                        return Ok(None);
                    }
                    break;
                }
                Some((j, c)) => (*j, c.clone()),
            };
            if cj.abs().is_one() || e.coeffs.len() == 1 {
                if !(&e.constant % &cj).is_zero() {
                    return Ok(None);
                }
                // y_j = -(rest + constant) / cj
                let mut repl = Affine::default();
                for (v, c) in &e.coeffs {
                    if *v != j {
                        repl.coeffs.insert(*v, -(c / &cj));
                    }
                }
                repl.constant = -(&e.constant / &cj);
                substitute_all(&mut ineqs, &mut eqs, &mut defs, j, &repl);
                break;
            }
            // y_j := y_j - Σ q_l y_l shrinks every other coefficient below |cj|.
            let mut repl = Affine::var(j);
            for (l, cl) in e.coeffs.iter() {
                if *l != j {
                    let q = cl.div_floor(&cj);
                    if !q.is_zero() {
                        repl.coeffs.insert(*l, -q);
                    }
                }
            }
            substitute_all(&mut ineqs, &mut eqs, &mut defs, j, &repl);
            e.subst(j, &repl);
        }
    }
    // Tightened inequalities over the remaining variables.
    let mut tight: Vec<Constraint> = Vec::new();
    for a in &ineqs {
        if a.coeffs.is_empty() {
            if a.constant.is_positive() {
                return Ok(None);
            }
            continue;
        }
        let g = a.coeffs.values().fold(BigInt::zero(), |g, c| g.gcd(c));
        let mut coeffs: Vec<(usize, BigInt)> = a.coeffs.iter().map(|(v, c)| (*v, c / &g)).collect();
        let mut bound = (-&a.constant).div_floor(&g);
        let mut upper = true;
        if coeffs[0].1.is_negative() {
            for (_, c) in coeffs.iter_mut() {
                *c = -&*c;
            }
            bound = -bound;
            upper = false;
        }
        tight.push(Constraint { coeffs, bound, upper });
    }
    tight.sort();
    tight.dedup();
    let ys = match search_integer(nvars, &tight, budget)? {
        None => return Ok(None),
        Some(y) => y,
    };
    Ok(Some(defs.iter().map(|d| d.eval(&ys)).collect()))
}

fn a_neg(mut a: Affine) -> Affine {
    for c in a.coeffs.values_mut() {
        *c = -&*c;
    }
    a.constant = -a.constant;
    a
}

fn substitute_all(ineqs: &mut [Affine], eqs: &mut [Affine], defs: &mut [Affine], j: usize, repl: &Affine) {
    for a in ineqs.iter_mut().chain(eqs.iter_mut()).chain(defs.iter_mut()) {
        a.subst(j, repl);
    }
}

fn search_integer(nvars: usize, cs: &[Constraint], budget: &mut Budget) -> Result<Option<Vec<BigInt>>, TheoryError> {
    let base = match build(nvars, cs) {
        Err(_) => return Ok(None),
        Ok(t) => t,
    };
    if !base.clone().check(budget)? {
        return Ok(None);
    }
    let used: Vec<usize> = {
        let mut u: Vec<usize> = cs.iter().flat_map(|c| c.coeffs.iter().map(|(v, _)| *v)).collect();
        u.sort();
        u.dedup();
        u
    };
    let limit = solution_box(used.len(), cs);
    let mut radius = BigInt::from(16);
    loop {
        let last = radius >= limit;
        let r = if last { limit.clone() } else { radius.clone() };
        if let Some(sol) = branch_in_box(&base, &used, &r, budget)? {
            let mut out = alloc::vec![BigInt::zero(); nvars];
            for v in 0..nvars {
                out[v] = sol[v].clone();
            }
            return Ok(Some(out));
        }
        if last || inside_box(nvars, cs, &used, &r, budget)? {
            return Ok(None);
        }
        radius *= 16;
    }
}

/// Whether every rational solution has all used variables strictly inside
/// `(-r, r)`.
fn inside_box(nvars: usize, cs: &[Constraint], used: &[usize], r: &BigInt, budget: &mut Budget) -> Result<bool, TheoryError> {
    for &v in used {
        for upper in [false, true] {
            let mut ext = cs.to_vec();
            ext.push(Constraint {
                coeffs: alloc::vec![(v, BigInt::one())],
                bound: if upper { -r.clone() } else { r.clone() },
                upper,
            });
            if feasible_rational(nvars, &ext, budget)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn branch_in_box(base: &Tableau, used: &[usize], r: &BigInt, budget: &mut Budget) -> Result<Option<Vec<BigInt>>, TheoryError> {
    let mut t = base.clone();
    let rq = Q::from_integer(r.clone());
    for &v in used {
        if !t.set_upper(v, rq.clone()) || !t.set_lower(v, -rq.clone()) {
            return Ok(None);
        }
    }
    let (lo0, hi0) = (t.lower.clone(), t.upper.clone());
    // Each node is a list of extra bounds (variable, is_lower, value).
    let mut stack: Vec<Vec<(usize, bool, Q)>> = alloc::vec![Vec::new()];
    while let Some(extra) = stack.pop() {
        budget.tick_node()?;
        t.lower.clone_from(&lo0);
        t.upper.clone_from(&hi0);
        let mut ok = true;
        for (v, is_lower, b) in &extra {
            ok = if *is_lower { t.set_lower(*v, b.clone()) } else { t.set_upper(*v, b.clone()) };
            if !ok {
                break;
            }
        }
        if !ok || !t.check(budget)? {
            continue;
        }
        let frac = used.iter().copied().find(|&v| !t.value[v].is_integer());
        let v = match frac {
            None => return Ok(Some(t.value.iter().map(|q| q.to_integer()).collect())),
            Some(v) => v,
        };
        let val = t.value[v].clone();
        let fl = val.floor();
        let mut down = extra.clone();
        down.push((v, false, fl.clone()));
        let mut up = extra;
        up.push((v, true, fl.clone() + Q::one()));
        // Explore the side nearer the relaxed value first.
        if &val - &fl > Q::new(BigInt::one(), BigInt::from(2)) {
            stack.push(down);
            stack.push(up);
        } else {
            stack.push(up);
            stack.push(down);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(coeffs: &[(usize, i64)], bound: i64, upper: bool) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().map(|(v, a)| (*v, BigInt::from(*a))).collect(),
            bound: BigInt::from(bound),
            upper,
        }
    }

    fn budget() -> Budget {
        Budget::default()
    }

    #[test]
    fn simple_infeasible_bounds() {
        let cs = vec![c(&[(0, 1)], -1, true), c(&[(0, 1)], 0, false)];
        assert_eq!(solve_integer(1, &cs, &mut budget()), Ok(None));
    }

    #[test]
    fn needs_integrality() {
        // 1 <= 2x - 2y... would be tightened upstream; here 2x + 2y = 1 has no
        // integer solution but a rational one within a bounded box.
        let cs = vec![
            c(&[(0, 2), (1, 2)], 1, true),
            c(&[(0, 2), (1, 2)], 1, false),
            c(&[(0, 1)], 3, true),
            c(&[(0, 1)], -3, false),
            c(&[(1, 1)], 3, true),
            c(&[(1, 1)], -3, false),
        ];
        assert!(feasible_rational(2, &cs, &mut budget()).unwrap());
        assert_eq!(solve_integer(2, &cs, &mut budget()), Ok(None));
    }

    #[test]
    fn finds_a_point() {
        // x + y >= 3, x - y <= 0, y <= 2
        let cs = vec![c(&[(0, 1), (1, 1)], 3, false), c(&[(0, 1), (1, -1)], 0, true), c(&[(1, 1)], 2, true)];
        let sol = solve_integer(2, &cs, &mut budget()).unwrap().unwrap();
        let (x, y) = (&sol[0], &sol[1]);
        assert!(x + y >= BigInt::from(3));
        assert!(x <= y);
        assert!(*y <= BigInt::from(2));
    }
}
