//! t-norms, s-norms and negations over exact rationals in `[0,1]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{format_rational, one, zero, Rational, UnitRational};
use crate::report::{Check, Report};

/// A binary operation tabulated over a finite grid closed under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTable {
    pub grid: Vec<Rational>,
    pub values: Vec<Vec<Rational>>,
}

impl BinaryTable {
    pub fn new(grid: Vec<Rational>, values: Vec<Vec<Rational>>) -> Result<BinaryTable> {
        let n = grid.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::input("table shape does not match its grid"));
        }
        if values.iter().flatten().any(|v| !grid.contains(v)) {
            return Err(Error::input("grid not closed under the tabulated operation"));
        }
        Ok(BinaryTable { grid, values })
    }

    /// Tabulates `f` over `grid`; fails if the grid is not closed under `f`.
    pub fn tabulate(grid: Vec<Rational>, f: impl Fn(Rational, Rational) -> Rational) -> Result<BinaryTable> {
        let values = grid.iter().map(|&a| grid.iter().map(|&b| f(a, b)).collect()).collect();
        BinaryTable::new(grid, values)
    }

    fn pos(&self, a: Rational) -> Result<usize> {
        self.grid
            .iter()
            .position(|&g| g == a)
            .ok_or_else(|| Error::input(format!("{} is not on the table grid", format_rational(&a))))
    }

    pub fn eval(&self, a: Rational, b: Rational) -> Result<Rational> {
        Ok(self.values[self.pos(a)?][self.pos(b)?])
    }

    /// First triple violating associativity.
    pub fn associativity_witness(&self) -> Option<[Rational; 3]> {
        let g = &self.grid;
        let ev = |a, b| self.eval(a, b).expect("closed grid");
        for &a in g {
            for &b in g {
                for &c in g {
                    if ev(a, ev(b, c)) != ev(ev(a, b), c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }
}

/// A unary map tabulated over a finite grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryTable {
    pub entries: Vec<(Rational, Rational)>,
}

impl UnaryTable {
    pub fn new(entries: Vec<(Rational, Rational)>) -> UnaryTable {
        UnaryTable { entries }
    }

    pub fn eval(&self, x: Rational) -> Result<Rational> {
        self.entries
            .iter()
            .find(|(a, _)| *a == x)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::input(format!("{} is not on the negation grid", format_rational(&x))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TNorm {
    Min,
    Product,
    Lukasiewicz,
    Table(BinaryTable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SNorm {
    Max,
    Probabilistic,
    Lukasiewicz,
    Table(BinaryTable),
    /// `a ⊕ b = n(n(a) ⊗ n(b))`.
    Derived(Box<TNorm>, Negation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Negation {
    /// `1 − x`.
    Standard,
    Table(UnaryTable),
}

impl TNorm {
    pub fn eval(&self, a: Rational, b: Rational) -> Result<Rational> {
        Ok(match self {
            TNorm::Min => a.min(b),
            TNorm::Product => a * b,
            TNorm::Lukasiewicz => (a + b - one()).max(zero()),
            TNorm::Table(t) => t.eval(a, b)?,
        })
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, TNorm::Table(_))
    }
}

impl SNorm {
    pub fn eval(&self, a: Rational, b: Rational) -> Result<Rational> {
        Ok(match self {
            SNorm::Max => a.max(b),
            SNorm::Probabilistic => a + b - a * b,
            SNorm::Lukasiewicz => (a + b).min(one()),
            SNorm::Table(t) => t.eval(a, b)?,
            SNorm::Derived(t, n) => n.eval(t.eval(n.eval(a)?, n.eval(b)?)?)?,
        })
    }
}

impl Negation {
    pub fn eval(&self, x: Rational) -> Result<Rational> {
        match self {
            Negation::Standard => Ok(one() - x),
            Negation::Table(t) => t.eval(x),
        }
    }
}

impl FromStr for TNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<TNorm> {
        match s {
            "min" => Ok(TNorm::Min),
            "product" | "prod" => Ok(TNorm::Product),
            "luk" | "lukasiewicz" => Ok(TNorm::Lukasiewicz),
            _ => Err(Error::input(format!("unknown t-norm `{s}` (min|product|luk)"))),
        }
    }
}

/// Parses `max|prob|luk`; `derived` needs the t-norm and is built by [`derive_snorm`].
impl FromStr for SNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<SNorm> {
        match s {
            "max" => Ok(SNorm::Max),
            "prob" | "probabilistic" => Ok(SNorm::Probabilistic),
            "luk" | "lukasiewicz" => Ok(SNorm::Lukasiewicz),
            _ => Err(Error::input(format!("unknown s-norm `{s}` (max|prob|luk|derived)"))),
        }
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNorm::Min => "min",
            TNorm::Product => "product",
            TNorm::Lukasiewicz => "luk",
            TNorm::Table(_) => "table",
        })
    }
}

impl fmt::Display for SNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SNorm::Max => f.write_str("max"),
            SNorm::Probabilistic => f.write_str("prob"),
            SNorm::Lukasiewicz => f.write_str("luk"),
            SNorm::Table(_) => f.write_str("table"),
            SNorm::Derived(t, _) => write!(f, "derived({t})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormTriple {
    pub tnorm: TNorm,
    pub snorm: SNorm,
    pub negation: Negation,
}

impl NormTriple {
    /// Custom tables must be associative; other axioms are the caller's to check.
    pub fn new(tnorm: TNorm, snorm: SNorm, negation: Negation) -> Result<NormTriple> {
        for t in [table_of_t(&tnorm), table_of_s(&snorm)].into_iter().flatten() {
            if let Some(w) = t.associativity_witness() {
                return Err(Error::precondition(format!("custom norm table is not associative at {}", show3(&w))));
            }
        }
        Ok(NormTriple { tnorm, snorm, negation })
    }

    pub fn min_max() -> NormTriple {
        NormTriple { tnorm: TNorm::Min, snorm: SNorm::Max, negation: Negation::Standard }
    }

    pub fn product_prob() -> NormTriple {
        NormTriple { tnorm: TNorm::Product, snorm: SNorm::Probabilistic, negation: Negation::Standard }
    }

    pub fn lukasiewicz() -> NormTriple {
        NormTriple { tnorm: TNorm::Lukasiewicz, snorm: SNorm::Lukasiewicz, negation: Negation::Standard }
    }

    pub fn t(&self, a: Rational, b: Rational) -> Rational {
        self.tnorm.eval(a, b).expect("operands on the norm grid")
    }

    pub fn s(&self, a: Rational, b: Rational) -> Rational {
        self.snorm.eval(a, b).expect("operands on the norm grid")
    }
}

fn table_of_t(t: &TNorm) -> Option<&BinaryTable> {
    match t {
        TNorm::Table(b) => Some(b),
        _ => None,
    }
}

fn table_of_s(s: &SNorm) -> Option<&BinaryTable> {
    match s {
        SNorm::Table(b) => Some(b),
        _ => None,
    }
}

fn show3(w: &[Rational; 3]) -> String {
    w.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    T,
    S,
}

/// Left fold of the chosen binary norm.
pub fn norm_eval(nt: &NormTriple, kind: NormKind, args: &[UnitRational]) -> Result<UnitRational> {
    let (first, rest) = args.split_first().ok_or_else(|| Error::input("norm of an empty sequence"))?;
    let table = match kind {
        NormKind::T => table_of_t(&nt.tnorm),
        NormKind::S => table_of_s(&nt.snorm),
    };
    if let Some(w) = table.and_then(|t| t.associativity_witness()) {
        return Err(Error::precondition(format!("custom norm table is not associative at {}", show3(&w))));
    }
    let mut acc = first.get();
    for a in rest {
        acc = match kind {
            NormKind::T => nt.tnorm.eval(acc, a.get())?,
            NormKind::S => nt.snorm.eval(acc, a.get())?,
        };
    }
    UnitRational::new(acc)
}

fn grid_report(
    grid: &[Rational],
    unit: Rational,
    unit_name: &str,
    op: &(dyn Fn(Rational, Rational) -> Result<Rational> + Sync),
) -> Result<Report> {
    let f = |x: &Rational| format_rational(x);
    let mut values = vec![vec![zero(); grid.len()]; grid.len()];
    for (i, &a) in grid.iter().enumerate() {
        for (k, &b) in grid.iter().enumerate() {
            values[i][k] = op(a, b)?;
        }
    }
    let ev = |i: usize, k: usize| values[i][k];
    let n = grid.len();
    let mut r = Report::new();
    r.push(Check::from_witness(unit_name, (0..n).find(|&i| op(grid[i], unit).ok() != Some(grid[i])).map(|i| vec![f(&grid[i])])));
    r.push(Check::from_witness(
        "commutativity",
        (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).find(|&(i, k)| ev(i, k) != ev(k, i)).map(|(i, k)| vec![f(&grid[i]), f(&grid[k])]),
    ));
    let mono = crate::par::find_first(n, |i| {
        for b in 0..n {
            for c in 0..n {
                if grid[b] <= grid[c] && ev(i, b) > ev(i, c) {
                    return Some(vec![f(&grid[i]), f(&grid[b]), f(&grid[c])]);
                }
            }
        }
        None
    });
    r.push(Check::from_witness("monotonicity", mono));
    let assoc = crate::par::find_first(n, |i| {
        for b in 0..n {
            for c in 0..n {
                let l = op(grid[i], ev(b, c)).ok();
                if l.is_none() || l != op(ev(i, b), grid[c]).ok() {
                    return Some(vec![f(&grid[i]), f(&grid[b]), f(&grid[c])]);
                }
            }
        }
        None
    });
    r.push(Check::from_witness("associativity", assoc));
    Ok(r)
}

/// T0, commutativity, monotonicity and associativity on `grid`.
pub fn check_tnorm_axioms(t: &TNorm, grid: &[Rational]) -> Result<Report> {
    grid_report(grid, one(), "T0", &|a, b| t.eval(a, b))
}

/// S0, commutativity, monotonicity and associativity on `grid`.
pub fn check_snorm_axioms(s: &SNorm, grid: &[Rational]) -> Result<Report> {
    grid_report(grid, zero(), "S0", &|a, b| s.eval(a, b))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct NegationFlags {
    pub boundary: bool,
    pub antitone: bool,
    pub weak: bool,
    pub strong: bool,
    /// Boundary, antitone and weak together.
    pub negation: bool,
}

/// Evaluates the negation conditions on a tabulated map; `n(n(x))` outside
/// the table counts as a violation.
pub fn negation_check(table: &UnaryTable) -> Result<NegationFlags> {
    let xs: Vec<Rational> = table.entries.iter().map(|e| e.0).collect();
    if !xs.contains(&zero()) || !xs.contains(&one()) {
        return Err(Error::input("negation grid must contain 0 and 1"));
    }
    let n = |x| table.eval(x);
    let boundary = n(zero())? == one() && n(one())? == zero();
    let antitone = table
        .entries
        .iter()
        .all(|&(a, na)| table.entries.iter().all(|&(b, nb)| !(a <= b) || nb <= na));
    let nn = |x: Rational| n(x).and_then(n).ok();
    let weak = xs.iter().all(|&x| nn(x).is_some_and(|v| x <= v));
    let strong = xs.iter().all(|&x| nn(x) == Some(x));
    Ok(NegationFlags { boundary, antitone, weak, strong, negation: boundary && antitone && weak })
}

/// `a ⊕ b = n(n(a) ⊗ n(b))`; the negation must be strong.
pub fn derive_snorm(t: TNorm, n: Negation) -> Result<SNorm> {
    if let Negation::Table(tab) = &n {
        let f = negation_check(tab)?;
        if !(f.negation && f.strong) {
            return Err(Error::precondition("negation is not strong"));
        }
    }
    Ok(SNorm::Derived(Box::new(t), n))
}

/// `sup{c : c ⊗ a ≤ b}` in closed form for the built-in t-norms.
pub fn residual_implication(t: &TNorm, a: UnitRational, b: UnitRational) -> Result<UnitRational> {
    let (a, b) = (a.get(), b.get());
    if a <= b {
        return Ok(UnitRational::one());
    }
    let v = match t {
        TNorm::Min => b,
        TNorm::Product => b / a,
        TNorm::Lukasiewicz => (one() - a + b).min(one()),
        TNorm::Table(_) => {
            return Err(Error::unsupported("left continuity of a tabulated t-norm cannot be certified"));
        }
    };
    UnitRational::new(v)
}
