//! Granular rough inclusion functions: 2×2 matrices of inclusion degrees
//! between the lower and upper approximations of two elements.
//!
//! Layout is fixed as `[[ll, lu], [ul, uu]]`: the row picks the approximation
//! of the first argument, the column that of the second.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{NormTriple, SNorm};
use crate::par;
use crate::rational::{as_str, format_rational, one, ratio_or_one, zero, Rational};
use crate::report::{Check, Report};
use crate::rif::{profile_inclusion_fn, InclusionFn, RifClass};
use crate::spaces::{check_morphism, GgsMorphism, GranularSpace, SetHgos};
use crate::subset::Subset;

/// Largest universe on which the pair-quantified theorems are scanned.
pub const FORM_SCAN_LIMIT: usize = 10;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrifMatrix {
    #[serde(with = "as_str")]
    pub ll: Rational,
    #[serde(with = "as_str")]
    pub lu: Rational,
    #[serde(with = "as_str")]
    pub ul: Rational,
    #[serde(with = "as_str")]
    pub uu: Rational,
}

impl GrifMatrix {
    pub fn new(ll: Rational, lu: Rational, ul: Rational, uu: Rational) -> GrifMatrix {
        GrifMatrix { ll, lu, ul, uu }
    }

    /// Row-major `[ll, lu, ul, uu]`.
    pub fn from_entries(e: [Rational; 4]) -> GrifMatrix {
        GrifMatrix::new(e[0], e[1], e[2], e[3])
    }

    pub fn entries(&self) -> [Rational; 4] {
        [self.ll, self.lu, self.ul, self.uu]
    }

    pub fn zero() -> GrifMatrix {
        GrifMatrix::from_entries([zero(); 4])
    }

    pub fn ones() -> GrifMatrix {
        GrifMatrix::from_entries([one(); 4])
    }

    /// `[[1,0],[0,1]]`, the unit of `⋏` under (min, max).
    pub fn unit() -> GrifMatrix {
        GrifMatrix::new(one(), zero(), zero(), one())
    }

    /// The pattern no set HGOS can produce under K0.
    pub fn forbidden() -> GrifMatrix {
        GrifMatrix::new(zero(), one(), one(), one())
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries()[2 * i + j]
    }

    pub fn in_unit_range(&self) -> bool {
        self.entries().iter().all(|e| *e >= zero() && *e <= one())
    }

    /// Key for the lexicographic tie-break on `(ll, lu, ul, uu)`.
    pub fn lex_key(&self) -> [Rational; 4] {
        self.entries()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matrix serializes")
    }
}

impl fmt::Display for GrifMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.entries().map(|r| if r.is_integer() { r.numer().to_string() } else { format_rational(&r) });
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

impl fmt::Debug for GrifMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Entrywise `≤`.
pub fn matrix_leq(x: &GrifMatrix, y: &GrifMatrix) -> bool {
    x.entries().iter().zip(y.entries()).all(|(a, b)| *a <= b)
}

/// `x ⪯ y` and `x ≠ y`.
pub fn matrix_lt(x: &GrifMatrix, y: &GrifMatrix) -> bool {
    matrix_leq(x, y) && x != y
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrifKind {
    Basic,
    Cobasic,
    Zeta(InclusionFn),
    OneCertain(InclusionFn),
    TwoCertain(InclusionFn),
}

impl GrifKind {
    /// `basic`, `cobasic`, `zeta`, `one-certain` or `two-certain`, with `tau`
    /// supplying the inclusion function where one is needed.
    pub fn parse(kind: &str, tau: InclusionFn) -> Result<GrifKind> {
        Ok(match kind {
            "basic" => GrifKind::Basic,
            "cobasic" => GrifKind::Cobasic,
            "zeta" => GrifKind::Zeta(tau),
            "one-certain" => GrifKind::OneCertain(tau),
            "two-certain" => GrifKind::TwoCertain(tau),
            _ => return Err(Error::input(format!("unknown GRIF kind {kind:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrifValue {
    Matrix(GrifMatrix),
    Pair(Rational, Rational),
}

impl GrifValue {
    pub fn matrix(self) -> Option<GrifMatrix> {
        match self {
            GrifValue::Matrix(m) => Some(m),
            GrifValue::Pair(..) => None,
        }
    }

    pub fn out_of_range(&self) -> bool {
        match self {
            GrifValue::Matrix(m) => !m.in_unit_range(),
            GrifValue::Pair(a, b) => [a, b].iter().any(|e| **e < zero() || **e > one()),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = match self {
            GrifValue::Matrix(m) => m.to_json_value(),
            GrifValue::Pair(a, b) => serde_json::json!({"pair": [format_rational(a), format_rational(b)]}),
        };
        if self.out_of_range() {
            v["out_of_range"] = serde_json::Value::Bool(true);
        }
        v
    }
}

fn lu(s: &SetHgos, x: Subset) -> [Subset; 2] {
    [s.lower_set(x), s.upper_set(x)]
}

fn check_args(s: &SetHgos, a: Subset, b: Subset) -> Result<()> {
    if !s.in_family(a) || !s.in_family(b) {
        return Err(Error::input("argument outside the space family"));
    }
    Ok(())
}

fn check_tau(s: &SetHgos, tau: &InclusionFn) -> Result<()> {
    if tau.needs_complement() && !crate::rif::complement_closed(s) {
        return Err(Error::unsupported("K2 needs a family closed under complement"));
    }
    Ok(())
}

/// `ζ^τ` without argument validation.
fn zeta_raw(s: &SetHgos, tau: &InclusionFn, a: Subset, b: Subset) -> Result<GrifMatrix> {
    let n = s.universe().len();
    let (x, y) = (lu(s, a), lu(s, b));
    Ok(GrifMatrix::new(
        tau.eval_sets(x[0], y[0], n)?,
        tau.eval_sets(x[0], y[1], n)?,
        tau.eval_sets(x[1], y[0], n)?,
        tau.eval_sets(x[1], y[1], n)?,
    ))
}

/// `ζ^τ(A, B) = [[τ(Aˡ,Bˡ), τ(Aˡ,Bᵘ)], [τ(Aᵘ,Bˡ), τ(Aᵘ,Bᵘ)]]`.
pub fn zeta(s: &SetHgos, tau: &InclusionFn, a: Subset, b: Subset) -> Result<GrifMatrix> {
    check_args(s, a, b)?;
    check_tau(s, tau)?;
    zeta_raw(s, tau, a, b)
}

/// `ζ^τ` on arbitrary subsets of the universe; set approximations are
/// defined whether or not the arguments belong to the family.
pub fn zeta_sets(s: &SetHgos, tau: &InclusionFn, a: Subset, b: Subset) -> Result<GrifMatrix> {
    let full = s.universe().full();
    if !a.is_subset(full) || !b.is_subset(full) {
        return Err(Error::input("argument not over the universe"));
    }
    check_tau(s, tau)?;
    zeta_raw(s, tau, a, b)
}

/// `#(A^σ ∩ B^π) / #(A^σ)`, 1 when `A^σ = ∅`; equal to `ζ^{K0}`.
pub fn basic(s: &SetHgos, a: Subset, b: Subset) -> GrifMatrix {
    let (x, y) = (lu(s, a), lu(s, b));
    let e = |i: usize, j: usize| ratio_or_one(x[i].intersect(y[j]).len(), x[i].len());
    GrifMatrix::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
}

/// `#(A^σ ∩ B^π) / #(A^π)`, 1 when `A^π = ∅`. Entries may exceed 1.
pub fn cobasic(s: &SetHgos, a: Subset, b: Subset) -> GrifMatrix {
    let (x, y) = (lu(s, a), lu(s, b));
    let e = |i: usize, j: usize| ratio_or_one(x[i].intersect(y[j]).len(), x[j].len());
    GrifMatrix::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
}

/// `(τ(A, Bˡ), τ(A, Bᵘ))` for definite `A`.
pub fn one_certain(s: &SetHgos, tau: &InclusionFn, a: Subset, b: Subset) -> Result<(Rational, Rational)> {
    check_args(s, a, b)?;
    check_tau(s, tau)?;
    if !s.is_definite(a) {
        return Err(Error::precondition(format!("{} is not definite", s.universe().show(a))));
    }
    let n = s.universe().len();
    let y = lu(s, b);
    Ok((tau.eval_sets(a, y[0], n)?, tau.eval_sets(a, y[1], n)?))
}

/// `(τ(Aˡ, B), τ(Aᵘ, B))` for definite `B`.
pub fn two_certain(s: &SetHgos, tau: &InclusionFn, a: Subset, b: Subset) -> Result<(Rational, Rational)> {
    check_args(s, a, b)?;
    check_tau(s, tau)?;
    if !s.is_definite(b) {
        return Err(Error::precondition(format!("{} is not definite", s.universe().show(b))));
    }
    let n = s.universe().len();
    let x = lu(s, a);
    Ok((tau.eval_sets(x[0], b, n)?, tau.eval_sets(x[1], b, n)?))
}

pub fn grif_value(s: &SetHgos, kind: &GrifKind, a: Subset, b: Subset) -> Result<GrifValue> {
    Ok(match kind {
        GrifKind::Basic => {
            check_args(s, a, b)?;
            GrifValue::Matrix(basic(s, a, b))
        }
        GrifKind::Cobasic => {
            check_args(s, a, b)?;
            GrifValue::Matrix(cobasic(s, a, b))
        }
        GrifKind::Zeta(t) => GrifValue::Matrix(zeta(s, t, a, b)?),
        GrifKind::OneCertain(t) => {
            let (x, y) = one_certain(s, t, a, b)?;
            GrifValue::Pair(x, y)
        }
        GrifKind::TwoCertain(t) => {
            let (x, y) = two_certain(s, t, a, b)?;
            GrifValue::Pair(x, y)
        }
    })
}

/// Matrix-valued kinds only.
pub fn grif_matrix(s: &SetHgos, kind: &GrifKind, a: Subset, b: Subset) -> Result<GrifMatrix> {
    grif_value(s, kind, a, b)?
        .matrix()
        .ok_or_else(|| Error::input("certain GRIFs are pairs, not matrices"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineKind {
    Disj,
    Conj,
    Hprod,
}

impl std::str::FromStr for CombineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<CombineKind> {
        match s {
            "disj" => Ok(CombineKind::Disj),
            "conj" => Ok(CombineKind::Conj),
            "hprod" => Ok(CombineKind::Hprod),
            _ => Err(Error::input(format!("unknown combination {s:?}"))),
        }
    }
}

/// `⋎` is entrywise `⊕`; `⋏` is `⊕ₖ xᵢₖ ⊗ yₖⱼ`; the H-product multiplies entrywise.
pub fn matrix_combine(x: &GrifMatrix, y: &GrifMatrix, kind: CombineKind, nt: &NormTriple) -> Result<GrifMatrix> {
    let (a, b) = (x.entries(), y.entries());
    let e: [Rational; 4] = match kind {
        CombineKind::Disj => [
            nt.snorm.eval(a[0], b[0])?,
            nt.snorm.eval(a[1], b[1])?,
            nt.snorm.eval(a[2], b[2])?,
            nt.snorm.eval(a[3], b[3])?,
        ],
        CombineKind::Conj => {
            let cell = |i: usize, j: usize| -> Result<Rational> {
                let p = nt.tnorm.eval(a[2 * i], b[j])?;
                let q = nt.tnorm.eval(a[2 * i + 1], b[2 + j])?;
                nt.snorm.eval(p, q)
            };
            [cell(0, 0)?, cell(0, 1)?, cell(1, 0)?, cell(1, 1)?]
        }
        CombineKind::Hprod => [a[0] * b[0], a[1] * b[1], a[2] * b[2], a[3] * b[3]],
    };
    Ok(GrifMatrix::from_entries(e))
}

/// Largest number of triples scanned exhaustively by [`check_semiring`].
pub const SEMIRING_EXHAUSTIVE_LIMIT: usize = 1_000_000;
/// Triples drawn when the grid is too large for an exhaustive scan.
pub const SEMIRING_SAMPLES: usize = 200_000;

/// Semiring laws for `(⋎, ⋏, 𝟎, 𝟏)` over every matrix with entries on `grid`.
pub fn check_semiring(nt: &NormTriple, grid: &[Rational]) -> Result<Report> {
    if grid.is_empty() {
        return Err(Error::input("empty grid"));
    }
    let g = grid.len();
    let ms: Vec<GrifMatrix> = (0..g.pow(4))
        .map(|k| GrifMatrix::from_entries([grid[k % g], grid[k / g % g], grid[k / g / g % g], grid[k / g / g / g]]))
        .collect();
    // Fail early on operands the norms cannot evaluate.
    for a in grid {
        for b in grid {
            nt.tnorm.eval(*a, *b)?;
            nt.snorm.eval(*a, *b)?;
        }
    }
    let m = ms.len();
    let triples = m.checked_pow(3).unwrap_or(usize::MAX);
    let exhaustive = triples <= SEMIRING_EXHAUSTIVE_LIMIT;
    let sample: Vec<(usize, usize, usize)> = if exhaustive {
        Vec::new()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e31);
        (0..SEMIRING_SAMPLES).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m))).collect()
    };
    let count = if exhaustive { triples } else { sample.len() };
    let at = |k: usize| -> (usize, usize, usize) {
        if exhaustive {
            (k / (m * m), k / m % m, k % m)
        } else {
            sample[k]
        }
    };
    let c = |x: &GrifMatrix, y: &GrifMatrix, k| matrix_combine(x, y, k, nt).expect("grid operands");
    let disj = |x: &GrifMatrix, y: &GrifMatrix| c(x, y, CombineKind::Disj);
    let conj = |x: &GrifMatrix, y: &GrifMatrix| c(x, y, CombineKind::Conj);
    let w = |xs: &[&GrifMatrix]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();

    let single = |name: &str, bad: &(dyn Fn(&GrifMatrix) -> bool + Sync)| {
        Check::from_witness(name, par::find_first(m, |i| bad(&ms[i]).then(|| w(&[&ms[i]]))))
    };
    let pair = |name: &str, bad: &(dyn Fn(&GrifMatrix, &GrifMatrix) -> bool + Sync)| {
        Check::from_witness(
            name,
            par::find_first(m * m, |k| {
                let (x, y) = (&ms[k / m], &ms[k % m]);
                bad(x, y).then(|| w(&[x, y]))
            }),
        )
    };
    let triple = |name: &str, bad: &(dyn Fn(&GrifMatrix, &GrifMatrix, &GrifMatrix) -> bool + Sync)| {
        Check::from_witness(
            name,
            par::find_first(count, |k| {
                let (i, j, l) = at(k);
                let (x, y, z) = (&ms[i], &ms[j], &ms[l]);
                bad(x, y, z).then(|| w(&[x, y, z]))
            }),
        )
    };

    let (zero_m, unit_m) = (GrifMatrix::zero(), GrifMatrix::unit());
    let mut r = Report::new();
    r.push(triple("⋎ associative", &|x, y, z| disj(&disj(x, y), z) != disj(x, &disj(y, z))));
    r.push(pair("⋎ commutative", &|x, y| disj(x, y) != disj(y, x)));
    r.push(single("𝟎 neutral for ⋎", &|x| disj(x, &zero_m) != *x));
    r.push(triple("⋏ associative", &|x, y, z| conj(&conj(x, y), z) != conj(x, &conj(y, z))));
    r.push(single("𝟏 unit for ⋏", &|x| conj(x, &unit_m) != *x || conj(&unit_m, x) != *x));
    r.push(triple("left distributivity", &|x, y, z| conj(x, &disj(y, z)) != disj(&conj(x, y), &conj(x, z))));
    r.push(triple("right distributivity", &|x, y, z| conj(&disj(y, z), x) != disj(&conj(y, x), &conj(z, x))));
    r.push(single("𝟎 absorbing for ⋏", &|x| conj(x, &zero_m) != zero_m || conj(&zero_m, x) != zero_m));
    let plus_max = matches!(nt.snorm, SNorm::Max);
    let note = "the statement names the Min t-norm for ⊕; its proof needs ⊕ to be the Max s-norm";
    r.push(if plus_max {
        Check::holds("⊕ is Max").with_note(note)
    } else {
        Check::fails("⊕ is Max", vec![nt.snorm.to_string()]).with_note(note)
    });
    if !exhaustive {
        for c in r.checks.iter_mut().filter(|c| c.name.contains("associative") || c.name.contains("distributivity")) {
            c.note = Some(format!("{SEMIRING_SAMPLES} sampled triples"));
        }
    }
    Ok(r)
}

/// `r ⪯ ζ(A, B)`.
pub fn r_included(s: &SetHgos, a: Subset, b: Subset, r: &GrifMatrix, kind: &GrifKind) -> Result<bool> {
    Ok(matrix_leq(r, &grif_matrix(s, kind, a, b)?))
}

/// All `ζ^τ(A, B)` over the family, indexed `i * n + j`.
fn zeta_table(s: &SetHgos, tau: &InclusionFn, es: &[Subset]) -> Result<Vec<GrifMatrix>> {
    check_tau(s, tau)?;
    let n = es.len();
    par::map_range(n * n, |k| zeta_raw(s, tau, es[k / n], es[k % n])).into_iter().collect()
}

fn scan_limit(s: &SetHgos) -> Result<()> {
    if s.universe().len() > FORM_SCAN_LIMIT && s.is_powerset() {
        return Err(Error::unsupported(format!(
            "pair scans stop at universes of {FORM_SCAN_LIMIT} elements"
        )));
    }
    Ok(())
}

/// The three quantified properties of r-inclusion under `ζ^τ`.
pub fn check_inclusion_theorem(s: &SetHgos, tau: &InclusionFn) -> Result<Report> {
    scan_limit(s)?;
    let es = s.elements();
    let n = es.len();
    let z = zeta_table(s, tau, &es)?;
    let show = |x: Subset| s.universe().show(x);
    let profile = profile_inclusion_fn(tau, s)?;
    let mut r = Report::new();

    // Taking r and q maximal loses nothing: h = 𝟎 satisfies every triple.
    let p1 = par::find_first(n * n * n, |k| {
        let (a, c) = (k / (n * n), k % n);
        (!matrix_leq(&GrifMatrix::zero(), &z[a * n + c])).then(|| vec![show(es[a]), show(es[c])])
    });
    r.push(Check::from_witness("inclusion property 1", p1).with_note("h = 𝟎 witnesses every triple"));

    if profile.classification == RifClass::Rif {
        let bottom = s.bottom();
        let bad = |a: usize, b: usize| {
            es[b] != bottom && matrix_lt(&GrifMatrix::zero(), &z[a * n + b]) && z[b * n + a] == GrifMatrix::zero()
        };
        let render = |a: usize, b: usize| {
            vec![show(es[a]), show(es[b]), z[a * n + b].to_string(), z[b * n + a].to_string()]
        };
        let nonbottom = par::find_first(n * n, |k| (es[k / n] != bottom && bad(k / n, k % n)).then(|| render(k / n, k % n)));
        let any = par::find_first(n * n, |k| bad(k / n, k % n).then(|| render(k / n, k % n)));
        let check = Check::from_witness("inclusion property 2", nonbottom.clone().or(any));
        r.push(if nonbottom.is_some() { check.with_note("refuted with A ≠ ⊥") } else { check });
    } else {
        r.push(Check::not_applicable("inclusion property 2", "τ is not a RIF"));
    }

    if profile.r0 {
        let p3 = par::find_first(n * n * n, |k| {
            let (a, b, c) = (k / (n * n), k / n % n, k % n);
            (s.part(es[a], es[b]) && !matrix_leq(&z[c * n + a], &z[c * n + b]))
                .then(|| vec![show(es[a]), show(es[b]), show(es[c])])
        });
        r.push(Check::from_witness("inclusion property 3", p3));
    } else {
        r.push(Check::not_applicable("inclusion property 3", "τ fails R0"));
    }
    Ok(r)
}

/// Which inclusion function the form theorems are read for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormTau {
    K0,
    K1,
}

/// Necessary conditions from the form analysis, for `Aˡ ≠ ∅`:
/// `Aˡ ⊆ Bˡ`, `Aˡ ⊆ Bᵘ`, `Aᵘ ⊄ Bˡ`, `Aᵘ ⊆ Bᵘ`.
pub fn form_conditions(s: &SetHgos, a: Subset, b: Subset) -> [bool; 4] {
    let (x, y) = (lu(s, a), lu(s, b));
    [x[0].is_subset(y[0]), x[0].is_subset(y[1]), !x[1].is_subset(y[0]), x[1].is_subset(y[1])]
}

/// `Aˡ ⊂ Bˡ ⊂ Aᵘ ⊂ Bᵘ`, `A ⊂ B` or `A = B`.
pub fn form_disjunction(s: &SetHgos, a: Subset, b: Subset) -> bool {
    let (x, y) = (lu(s, a), lu(s, b));
    let chain = x[0].is_proper_subset(y[0]) && y[0].is_proper_subset(x[1]) && x[1].is_proper_subset(y[1]);
    chain || a.is_proper_subset(b) || a == b
}

/// `[[1, 1], [r, 1]]` for some `r ≤ 1`.
pub fn has_upper_form(m: &GrifMatrix) -> bool {
    m.ll == one() && m.lu == one() && m.uu == one() && m.ul <= one()
}

/// The three alternatives characterizing an all-ones K1 matrix.
pub fn k1_all_ones_conditions(s: &SetHgos, a: Subset, b: Subset) -> [bool; 3] {
    let (x, y) = (lu(s, a), lu(s, b));
    [
        x[1].union(y[1]).is_empty(),
        x[1].union(y[0]).is_empty() && !y[1].is_empty(),
        x[0].is_subset(x[1]) && x[1].is_subset(y[0]) && y[0].is_subset(y[1]),
    ]
}

/// Form-of-matrix theorems over every ordered pair of a powerset space.
pub fn form_theorems(s: &SetHgos, tau: FormTau) -> Result<Report> {
    if !s.is_powerset() {
        return Err(Error::precondition("form theorems quantify over the full powerset"));
    }
    scan_limit(s)?;
    let es = s.elements();
    let n = es.len();
    let f = match tau {
        FormTau::K0 => InclusionFn::K0,
        FormTau::K1 => InclusionFn::K1,
    };
    let z = zeta_table(s, &f, &es)?;
    let show = |x: Subset| s.universe().show(x);
    let scan = |name: &str, bad: &(dyn Fn(Subset, Subset, &GrifMatrix) -> bool + Sync)| {
        Check::from_witness(
            name,
            par::find_first(n * n, |k| {
                let (a, b, m) = (es[k / n], es[k % n], &z[k]);
                bad(a, b, m).then(|| vec![show(a), show(b), m.to_string()])
            }),
        )
    };
    let nonempty_lower = |a: Subset| !s.lower_set(a).is_empty();
    let mut r = Report::new();
    r.push(scan("row feasibility", &|_, _, m| m.ll > m.lu || m.ul > m.uu));
    match tau {
        FormTau::K0 => {
            r.push(scan("entry characterization", &|a, b, m| {
                let (x, y) = (lu(s, a), lu(s, b));
                (0..4).any(|k| {
                    let (xs, yp) = (x[k / 2], y[k % 2]);
                    (m.get(k / 2, k % 2) == one()) != (xs.is_subset(yp) || xs.is_empty())
                })
            }));
            r.push(scan("[[0,1],[1,1]] unreachable", &|_, _, m| *m == GrifMatrix::forbidden()));
            r.push(scan("upper form necessary conditions", &|a, b, m| {
                nonempty_lower(a) && (has_upper_form(m) && m.ul < one()) != form_conditions(s, a, b).iter().all(|c| *c)
            }));
            r.push(scan("upper form sufficiency", &|a, b, m| {
                nonempty_lower(a) && form_disjunction(s, a, b) && !has_upper_form(m)
            }));
            let conv = scan("upper form converse", &|a, b, m| {
                nonempty_lower(a) && has_upper_form(m) && !form_disjunction(s, a, b)
            });
            r.push(conv.with_note("the disjunctive converse is a finding, not an invariant"));
        }
        FormTau::K1 => {
            r.push(scan("K1 all-ones characterization", &|a, b, m| {
                (*m == GrifMatrix::ones()) != k1_all_ones_conditions(s, a, b).iter().any(|c| *c)
            }));
        }
    }
    Ok(r)
}

/// The entry rule violated by `m`, if any.
pub fn feasibility_violation(m: &GrifMatrix) -> Option<&'static str> {
    if m.ll > m.lu {
        Some("r_ll > r_lu")
    } else if m.ul > m.uu {
        Some("r_ul > r_uu")
    } else if *m == GrifMatrix::forbidden() {
        Some("[[0,1],[1,1]]")
    } else {
        None
    }
}

/// False when some matrix cannot arise from a set HGOS under K0.
/// Passing is necessary, not sufficient.
pub fn feasibility_filter(ms: &[GrifMatrix]) -> bool {
    ms.iter().all(|m| feasibility_violation(m).is_none())
}

/// The six order properties of the basic GRIF.
pub fn monotonicity_check(s: &SetHgos) -> Result<Report> {
    if s.bottom() != Subset::EMPTY {
        return Err(Error::precondition("⊥ must be ∅"));
    }
    scan_limit(s)?;
    let es = s.elements();
    let n = es.len();
    let z: Vec<GrifMatrix> = par::map_range(n * n, |k| basic(s, es[k / n], es[k % n]));
    let show = |x: Subset| s.universe().show(x);
    let w2 = |k: usize| vec![show(es[k / n]), show(es[k % n]), z[k].to_string()];
    let pairs = |name: &str, bad: &(dyn Fn(&GrifMatrix) -> bool + Sync)| {
        Check::from_witness(name, par::find_first(n * n, |k| bad(&z[k]).then(|| w2(k))))
    };
    let mut r = Report::new();
    r.push(pairs("unit range", &|m| !m.in_unit_range()));
    r.push(pairs("ulu2", &|m| m.ul > m.uu));
    r.push(pairs("llu2", &|m| m.ll > m.lu));
    r.push(Check::from_witness(
        "mo",
        par::find_first(n * n * n, |k| {
            let (a, b, e) = (k / (n * n), k / n % n, k % n);
            (es[b].is_proper_subset(es[e]) && !matrix_leq(&z[a * n + b], &z[a * n + e]))
                .then(|| vec![show(es[a]), show(es[b]), show(es[e])])
        }),
    ));
    r.push(Check::from_witness(
        "refl",
        par::find_first(n, |i| {
            let m = &z[i * n + i];
            let ok = m.lu <= m.ll && m.ll == one() && m.uu == one();
            (!ok).then(|| vec![show(es[i]), m.to_string()])
        }),
    ));
    let bot = es.iter().position(|x| x.is_empty()).expect("⊥ in the family");
    r.push(Check::from_witness(
        "bot",
        (0..n).find(|&j| z[bot * n + j] != GrifMatrix::ones()).map(|j| vec![show(es[j]), z[bot * n + j].to_string()]),
    ));
    let top = s.top();
    if s.is_definite(top) {
        let t = es.iter().position(|x| *x == top).expect("⊤ in the family");
        r.push(Check::from_witness(
            "top",
            (0..n).find(|&i| z[i * n + t] != GrifMatrix::ones()).map(|i| vec![show(es[i]), z[i * n + t].to_string()]),
        ));
    } else {
        r.push(Check::vacuous("top", "⊤ is not definite"));
    }
    Ok(r)
}

/// A pair whose cobasic matrix leaves `[0, 1]`.
pub fn cobasic_out_of_range(s: &SetHgos) -> Option<(Subset, Subset, GrifMatrix)> {
    let es = s.elements();
    let n = es.len();
    par::find_first(n * n, |k| {
        let (a, b) = (es[k / n], es[k % n]);
        let m = cobasic(s, a, b);
        (!m.in_unit_range()).then_some((a, b, m))
    })
}

/// True when `τ(a, b)` is decided by the empty-denominator convention.
fn guard_applies(tau: &InclusionFn, a: Subset, b: Subset) -> bool {
    match tau {
        InclusionFn::K0 => a.is_empty(),
        InclusionFn::K1 => a.union(b).is_empty(),
        InclusionFn::Kst { base, .. } => guard_applies(base, a, b),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GranularParamApprox {
    /// Distinct `ℏ(x)` in object order.
    pub lower: Vec<Subset>,
    pub upper: Vec<Subset>,
    /// Some member of `upper` is there only through guard-valued entries.
    pub guard_driven: bool,
}

/// `L⁺ = {ℏ(x) : ζ(ℏ(x), X) = 1ₒ}` and `U⁺ = {ℏ(x) : 0ₒ ≺ ζ(ℏ(x), X)}`.
pub fn granular_param_approx(
    s: &SetHgos,
    hslash: &[Subset],
    tau: &InclusionFn,
    one_o: &GrifMatrix,
    zero_o: &GrifMatrix,
    x: Subset,
) -> Result<GranularParamApprox> {
    if hslash.len() != s.universe().len() {
        return Err(Error::input("uncertainty map must cover every object"));
    }
    let mut seen = std::collections::HashSet::new();
    let (mut lower, mut upper, mut guard_driven) = (Vec::new(), Vec::new(), false);
    for &h in hslash {
        if !seen.insert(h) {
            continue;
        }
        let m = zeta(s, tau, h, x)?;
        if m == *one_o {
            lower.push(h);
        }
        if matrix_lt(zero_o, &m) {
            upper.push(h);
            let (p, q) = (lu(s, h), lu(s, x));
            let mut e = m.entries();
            for (k, v) in e.iter_mut().enumerate() {
                if guard_applies(tau, p[k / 2], q[k % 2]) {
                    *v = zero();
                }
            }
            if !matrix_lt(zero_o, &GrifMatrix::from_entries(e)) {
                guard_driven = true;
            }
        }
    }
    Ok(GranularParamApprox { lower, upper, guard_driven })
}

/// GRIFs transported into a set HGOS through a validated morphism.
pub struct Transported<'m, 'a, S: GranularSpace> {
    m: &'m GgsMorphism<'a, S, SetHgos>,
    closed: bool,
}

impl<'m, 'a, S: GranularSpace> Transported<'m, 'a, S> {
    pub fn new(m: &'m GgsMorphism<'a, S, SetHgos>) -> Result<Self> {
        if let Some(f) = check_morphism(m, false).failures().next() {
            return Err(Error::precondition(format!("not a morphism: {} fails", f.name)));
        }
        Ok(Transported { m, closed: check_morphism(m, true).all_ok() })
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    fn approximations(&self, a: S::Elem) -> Result<[S::Elem; 2]> {
        let s = self.m.source;
        match (s.lower(a), s.upper(a)) {
            (Some(l), Some(u)) => Ok([l, u]),
            _ => Err(Error::unsupported(format!("approximations of {} undefined", s.label(a)))),
        }
    }

    /// `#(φ(A^σ) ∩ φ(B^π)) / #φ(A^σ)`, 1 on an empty denominator.
    pub fn hasty(&self, a: S::Elem, b: S::Elem) -> Result<GrifMatrix> {
        let (x, y) = (self.approximations(a)?, self.approximations(b)?);
        let f = |e: S::Elem| self.m.apply(e);
        let e = |i: usize, j: usize| ratio_or_one(f(x[i]).intersect(f(y[j])).len(), f(x[i]).len());
        Ok(GrifMatrix::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1)))
    }

    /// `#φ(A^σ ∧ B^π) / #φ(A^σ)`, 1 on an empty denominator; needs the meets.
    pub fn phi(&self, a: S::Elem, b: S::Elem) -> Result<GrifMatrix> {
        let s = self.m.source;
        let (x, y) = (self.approximations(a)?, self.approximations(b)?);
        let mut e = [zero(); 4];
        for (k, v) in e.iter_mut().enumerate() {
            let (p, q) = (x[k / 2], y[k % 2]);
            let meet = s
                .meet(p, q)
                .ok_or_else(|| Error::unsupported(format!("{} ∧ {} undefined", s.label(p), s.label(q))))?;
            *v = ratio_or_one(self.m.apply(meet).len(), self.m.apply(p).len());
        }
        Ok(GrifMatrix::from_entries(e))
    }
}

/// Under a closed morphism the hasty and φ-GRIFs agree on every pair.
pub fn check_closed_transport<S: GranularSpace>(m: &GgsMorphism<S, SetHgos>) -> Result<Report> {
    let t = Transported::new(m)?;
    let mut r = Report::new();
    if !t.is_closed() {
        r.push(Check::not_applicable("hasty = φ-GRIF", "morphism is not closed"));
        return Ok(r);
    }
    let es = m.source.elements();
    let n = es.len();
    let w = par::find_first(n * n, |k| {
        let (a, b) = (es[k / n], es[k % n]);
        let agree = matches!((t.hasty(a, b), t.phi(a, b)), (Ok(x), Ok(y)) if x == y);
        (!agree).then(|| vec![m.source.label(a), m.source.label(b)])
    });
    r.push(Check::from_witness("hasty = φ-GRIF", w));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{five_element_relation, five_element_space};
    use crate::rational::{grid, rat};
    use crate::spaces::build_set_hgos;
    use crate::tables::successor_neighborhoods;

    fn set(s: &SetHgos, x: &str) -> Subset {
        s.universe().parse_subset(x).unwrap()
    }

    fn m(e: [(i64, i64); 4]) -> GrifMatrix {
        GrifMatrix::from_entries(e.map(|(p, q)| rat(p, q)))
    }

    #[test]
    fn zeta_values() {
        let s = five_element_space();
        let z = zeta(&s, &InclusionFn::K0, set(&s, "a,b"), set(&s, "a,c,f")).unwrap();
        assert_eq!(z, m([(1, 1), (1, 1), (1, 3), (1, 1)]));
        let full = s.universe().full();
        assert_eq!(zeta(&s, &InclusionFn::K0, full, full).unwrap(), GrifMatrix::ones());
        let z = zeta(&s, &InclusionFn::K0, set(&s, "c"), set(&s, "f")).unwrap();
        assert_eq!(z, m([(1, 1), (1, 1), (0, 1), (2, 3)]));
        assert_eq!(basic(&s, set(&s, "c"), set(&s, "f")), z);
    }

    #[test]
    fn matrix_json_round_trip() {
        let z = m([(1, 1), (1, 1), (1, 3), (1, 1)]);
        let j = serde_json::to_string(&z).unwrap();
        assert_eq!(j, r#"{"ll":"1/1","lu":"1/1","ul":"1/3","uu":"1/1"}"#);
        assert_eq!(serde_json::from_str::<GrifMatrix>(&j).unwrap(), z);
        assert_eq!(z.to_string(), "[[1, 1], [1/3, 1]]");
    }

    #[test]
    fn certain_grifs() {
        let s = five_element_space();
        let a = s.universe().full();
        assert!(s.is_definite(a));
        let b = set(&s, "a,c,f");
        let (x, y) = one_certain(&s, &InclusionFn::K0, a, b).unwrap();
        let z = zeta(&s, &InclusionFn::K0, a, b).unwrap();
        assert_eq!((x, y), (z.ll, z.lu));
        assert_eq!((x, y), (z.ul, z.uu));
        assert!(one_certain(&s, &InclusionFn::K0, b, a).is_err());
        let (p, q) = two_certain(&s, &InclusionFn::K0, b, a).unwrap();
        let z = zeta(&s, &InclusionFn::K0, b, a).unwrap();
        assert_eq!((p, q), (z.ll, z.ul));
        assert!(grif_matrix(&s, &GrifKind::OneCertain(InclusionFn::K0), a, b).is_err());
    }

    #[test]
    fn cobasic_leaves_unit_range() {
        let s = five_element_space();
        let (a, b, w) = cobasic_out_of_range(&s).expect("a witness exists");
        assert!(!w.in_unit_range());
        let v = grif_value(&s, &GrifKind::Cobasic, a, b).unwrap();
        assert!(v.out_of_range());
        assert_eq!(v.to_json_value()["out_of_range"], serde_json::Value::Bool(true));
    }

    #[test]
    fn combine_examples() {
        let nt = NormTriple::min_max();
        let x = m([(1, 1), (1, 1), (1, 3), (1, 1)]);
        let y = m([(1, 1), (1, 1), (0, 1), (2, 3)]);
        assert_eq!(matrix_combine(&x, &GrifMatrix::unit(), CombineKind::Conj, &nt).unwrap(), x);
        assert_eq!(matrix_combine(&x, &y, CombineKind::Disj, &nt).unwrap(), x);
        assert_eq!(matrix_combine(&x, &y, CombineKind::Hprod, &nt).unwrap(), y);
    }

    #[test]
    fn order_examples() {
        let x = m([(1, 1), (1, 1), (1, 3), (1, 1)]);
        assert!(matrix_leq(&GrifMatrix::zero(), &x));
        assert!(matrix_leq(&x, &GrifMatrix::ones()));
        let (p, q) = (GrifMatrix::unit(), m([(0, 1), (1, 1), (1, 1), (0, 1)]));
        assert!(!matrix_leq(&p, &q) && !matrix_leq(&q, &p));
    }

    #[test]
    fn r_inclusion_examples() {
        let s = five_element_space();
        let (a, b) = (set(&s, "a,b"), set(&s, "a,c,f"));
        let k = GrifKind::Zeta(InclusionFn::K0);
        assert!(r_included(&s, a, b, &GrifMatrix::zero(), &k).unwrap());
        assert!(r_included(&s, a, b, &m([(1, 1), (1, 1), (1, 3), (1, 1)]), &k).unwrap());
        assert!(!r_included(&s, a, b, &GrifMatrix::ones(), &k).unwrap());
    }

    #[test]
    fn semiring_min_max_and_product_luk() {
        let g = grid(2);
        let r = check_semiring(&NormTriple::min_max(), &g).unwrap();
        assert!(r.all_ok(), "{r:?}");
        let nt = NormTriple::new(
            crate::norms::TNorm::Product,
            crate::norms::SNorm::Lukasiewicz,
            crate::norms::Negation::Standard,
        )
        .unwrap();
        let r = check_semiring(&nt, &g).unwrap();
        let fails: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(fails.contains(&"left distributivity"));
        assert_eq!(r.status("𝟎 neutral for ⋎"), Some(crate::report::Status::Holds));
    }

    #[test]
    fn inclusion_theorem_on_fixture() {
        let s = five_element_space();
        let r = check_inclusion_theorem(&s, &InclusionFn::K0).unwrap();
        assert_eq!(r.status("inclusion property 1"), Some(crate::report::Status::Holds));
        assert_eq!(r.status("inclusion property 3"), Some(crate::report::Status::Holds));
        assert_eq!(r.status("inclusion property 2"), Some(crate::report::Status::Fails));
        // {f} is r-included in {a} with ll = 1 only through the empty lower guard.
        let (f, a) = (set(&s, "f"), set(&s, "a"));
        let fa = zeta(&s, &InclusionFn::K0, f, a).unwrap();
        assert!(matrix_lt(&GrifMatrix::zero(), &fa));
        assert_eq!(zeta(&s, &InclusionFn::K0, a, f).unwrap(), GrifMatrix::zero());
    }

    #[test]
    fn property_three_gated_on_r0() {
        let s = build_set_hgos(crate::subset::Universe::parse_list("x,y").unwrap(), vec![Subset(1), Subset(2)]).unwrap();
        let mut table = std::collections::BTreeMap::new();
        for a in 0..4u64 {
            for b in 0..4u64 {
                table.insert((Subset(a), Subset(b)), rat(1, 2));
            }
        }
        let r = check_inclusion_theorem(&s, &InclusionFn::Table(table)).unwrap();
        assert_eq!(r.status("inclusion property 3"), Some(crate::report::Status::NotApplicable));
        assert_eq!(r.status("inclusion property 2"), Some(crate::report::Status::NotApplicable));
    }

    #[test]
    fn form_theorems_on_fixture() {
        let s = five_element_space();
        let r = form_theorems(&s, FormTau::K0).unwrap();
        for name in [
            "row feasibility",
            "entry characterization",
            "[[0,1],[1,1]] unreachable",
            "upper form necessary conditions",
            "upper form sufficiency",
        ] {
            assert_eq!(r.status(name), Some(crate::report::Status::Holds), "{name}");
        }
        assert_eq!(r.status("upper form converse"), Some(crate::report::Status::Fails));
        let (a, b) = (set(&s, "a,b"), set(&s, "a,c,f"));
        assert!(has_upper_form(&basic(&s, a, b)) && !form_disjunction(&s, a, b));
        let r1 = form_theorems(&s, FormTau::K1).unwrap();
        assert!(r1.all_ok(), "{r1:?}");
    }

    #[test]
    fn k1_all_ones_on_chains() {
        let s = five_element_space();
        for (a, b) in [("a", "a,b,e"), ("a,b", "S"), ("", "c")] {
            let b = if b == "S" { s.universe().full() } else { set(&s, b) };
            let a = if a.is_empty() { Subset::EMPTY } else { set(&s, a) };
            let conds = k1_all_ones_conditions(&s, a, b);
            assert!(conds[2]);
            assert_eq!(zeta(&s, &InclusionFn::K1, a, b).unwrap(), GrifMatrix::ones());
        }
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasibility_filter(&[m([(1, 1), (1, 1), (1, 3), (1, 1)])]));
        assert!(!feasibility_filter(&[GrifMatrix::unit()]));
        assert!(!feasibility_filter(&[GrifMatrix::forbidden()]));
        assert!(feasibility_filter(&[]));
    }

    #[test]
    fn monotonicity_on_fixture() {
        let s = five_element_space();
        let r = monotonicity_check(&s).unwrap();
        assert!(r.all_ok(), "{r:?}");
        assert_eq!(r.status("top"), Some(crate::report::Status::Holds));
        for sigma in basic(&s, Subset::EMPTY, set(&s, "c")).entries() {
            assert_eq!(sigma, one());
        }
    }

    #[test]
    fn granular_parametric_examples() {
        let s = five_element_space();
        let xi = successor_neighborhoods(&five_element_relation()).sets;
        let full = s.universe().full();
        let (o, z) = (GrifMatrix::ones(), GrifMatrix::zero());
        let p = granular_param_approx(&s, &xi, &InclusionFn::K0, &o, &z, full).unwrap();
        assert_eq!(p.lower.len(), 5);
        // Neighborhoods are granules, so no lower approximation is empty.
        let p = granular_param_approx(&s, &xi, &InclusionFn::K0, &o, &z, Subset::EMPTY).unwrap();
        assert!(p.upper.is_empty() && !p.guard_driven);
        let singletons: Vec<Subset> = (0..5).map(Subset::singleton).collect();
        let p = granular_param_approx(&s, &singletons, &InclusionFn::K0, &o, &z, Subset::EMPTY).unwrap();
        assert_eq!(p.upper, vec![set(&s, "b"), set(&s, "c"), set(&s, "f")]);
        assert!(p.guard_driven);
        let p = granular_param_approx(&s, &xi, &InclusionFn::K0, &o, &o, set(&s, "a,b")).unwrap();
        assert!(p.upper.is_empty());
    }

    #[test]
    fn identity_transport_is_closed_and_agrees() {
        let s = five_element_space();
        let m = GgsMorphism::new(&s, &s, |x| x);
        let t = Transported::new(&m).unwrap();
        assert!(t.is_closed());
        let (a, b) = (set(&s, "a,b"), set(&s, "a,c,f"));
        assert_eq!(t.hasty(a, b).unwrap(), basic(&s, a, b));
        assert_eq!(t.phi(a, b).unwrap(), basic(&s, a, b));
        assert!(check_closed_transport(&m).unwrap().all_ok());
    }
}
