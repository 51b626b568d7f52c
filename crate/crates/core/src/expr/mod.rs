//! Exact multivariate polynomials over named variables.
//!
//! Coefficients are arbitrary-precision rationals; floats only appear when a
//! polynomial is evaluated. Terms are kept in descending graded-lexicographic
//! order (total degree first, then names in byte order), which makes
//! structural equality the same as polynomial equality.

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::finset::FinSet;

pub use parse::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound name `{0}`")]
    Unbound(String),
    #[error("division by a non-constant polynomial")]
    NonConstantDivisor,
    #[error("division by zero")]
    DivisionByZero,
    #[error("`{name}` is not allowed in component `{component}`")]
    ForeignName { component: String, name: String },
    #[error("{0}")]
    Shape(String),
}

pub type Rational = BigRational;

/// Product of names raised to positive powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    powers: BTreeMap<String, u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str) -> Self {
        let mut powers = BTreeMap::new();
        powers.insert(name.to_string(), 1);
        Self { powers }
    }

    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.powers.iter().map(|(k, &v)| (k.as_str(), v))
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut powers = self.powers.clone();
        for (k, v) in &other.powers {
            *powers.entry(k.clone()).or_insert(0) += v;
        }
        Monomial { powers }
    }
}

// Descending grlex: the "smallest" monomial in this order is printed first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            for ((na, ea), (nb, eb)) in self.powers.iter().zip(&other.powers) {
                match na.cmp(nb) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                match eb.cmp(ea) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
            }
            self.powers.len().cmp(&other.powers.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in canonical form; the zero polynomial has no terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(name: &str) -> Self {
        Self::term(Rational::one(), Monomial::var(name))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no names in it.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.terms
            .keys()
            .flat_map(|m| m.powers.keys().map(String::as_str))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Simultaneous substitution; names missing from `subst` are kept.
    pub fn substitute<F>(&self, subst: F) -> Polynomial
    where
        F: Fn(&str) -> Option<Polynomial>,
    {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for (name, &e) in &m.powers {
                let factor = subst(name).unwrap_or_else(|| Polynomial::var(name));
                term = &term * &factor.pow(e);
            }
            out = &out + &term;
        }
        out
    }

    /// Substitution from an explicit table.
    pub fn substitute_map(&self, subst: &BTreeMap<String, Polynomial>) -> Polynomial {
        self.substitute(|n| subst.get(n).cloned())
    }

    /// Renames names; the renaming must not merge two names of one monomial
    /// into a power collision it cannot represent (it never does: powers add).
    pub fn rename<F>(&self, f: F) -> Polynomial
    where
        F: Fn(&str) -> Option<String>,
    {
        self.substitute(|n| f(n).map(|m| Polynomial::var(&m)))
    }

    /// Float evaluation as a direct sum of term values in canonical order.
    pub fn evaluate<F>(&self, lookup: F) -> Result<f64, ExprError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut value = rational_to_f64(c);
            for (name, &e) in &m.powers {
                let x = lookup(name).ok_or_else(|| ExprError::Unbound(name.clone()))?;
                value *= x.powi(e as i32);
            }
            total += value;
        }
        Ok(total)
    }

    /// Evaluation against a state point and a parameter table.
    pub fn evaluate_at(&self, point: &BTreeMap<String, f64>, params: &BTreeMap<String, f64>) -> Result<f64, ExprError> {
        self.evaluate(|n| point.get(n).or_else(|| params.get(n)).copied())
    }

    pub fn evaluate_exact(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, ExprError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for (name, &e) in &m.powers {
                let x = point.get(name).ok_or_else(|| ExprError::Unbound(name.clone()))?;
                value *= num_traits::pow(x.clone(), e as usize);
            }
            total += value;
        }
        Ok(total)
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |acc, p| &acc + &p)
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form, e.g. `-F*R*gamma + R*beta`. It parses back to the
/// same polynomial.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut first = true;
            if !magnitude.is_one() || m.powers.is_empty() {
                fmt_rational(&magnitude, f)?;
                first = false;
            }
            for (name, &e) in &m.powers {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{name}")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// One polynomial per element of `cod`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    cod: FinSet,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(cod: FinSet, components: Vec<Polynomial>) -> Result<Self, ExprError> {
        if cod.len() != components.len() {
            return Err(ExprError::Shape(format!(
                "{} components for {} outputs",
                components.len(),
                cod.len()
            )));
        }
        Ok(Self { cod, components })
    }

    pub fn from_pairs<I, S>(cod: FinSet, pairs: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (S, Polynomial)>,
        S: AsRef<str>,
    {
        let mut slots: Vec<Option<Polynomial>> = vec![None; cod.len()];
        for (name, p) in pairs {
            let i = cod
                .index_of(name.as_ref())
                .ok_or_else(|| ExprError::Shape(format!("unknown component `{}`", name.as_ref())))?;
            if slots[i].replace(p).is_some() {
                return Err(ExprError::Shape(format!("component `{}` given twice", name.as_ref())));
            }
        }
        let components = slots
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| ExprError::Shape(format!("missing component `{}`", cod.name(i)))))
            .collect::<Result<_, _>>()?;
        Ok(Self { cod, components })
    }

    pub fn empty() -> Self {
        Self {
            cod: FinSet::empty(),
            components: Vec::new(),
        }
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, name: &str) -> Option<&Polynomial> {
        self.cod.index_of(name).map(|i| &self.components[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Polynomial)> + '_ {
        self.cod.iter().zip(&self.components)
    }

    /// Fails on the first component mentioning a name outside `allowed`.
    pub fn check_names<F>(&self, allowed: F) -> Result<(), ExprError>
    where
        F: Fn(&str) -> bool,
    {
        for (c, p) in self.iter() {
            if let Some(bad) = p.names().into_iter().find(|n| !allowed(n)) {
                return Err(ExprError::ForeignName {
                    component: c.to_string(),
                    name: bad.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn map_components<F>(&self, f: F) -> PolyMap
    where
        F: Fn(&Polynomial) -> Polynomial,
    {
        PolyMap {
            cod: self.cod.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }
}

/// A polynomial with names resolved to slots, for repeated float evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new<F>(p: &Polynomial, slot: F) -> Result<Self, ExprError>
    where
        F: Fn(&str) -> Option<usize>,
    {
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| {
                let factors = m
                    .powers
                    .iter()
                    .map(|(n, &e)| {
                        slot(n)
                            .map(|s| (s, e as i32))
                            .ok_or_else(|| ExprError::Unbound(n.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((rational_to_f64(c), factors))
            })
            .collect::<Result<Vec<_>, ExprError>>()?;
        Ok(Self { terms })
    }

    /// Factors are multiplied and terms added in increasing order of value,
    /// so the result does not depend on how the variables are named.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut factors = Vec::new();
        let mut terms: Vec<f64> = self
            .terms
            .iter()
            .map(|(c, powers)| {
                factors.clear();
                factors.extend(powers.iter().map(|&(slot, e)| values[slot].powi(e)));
                factors.sort_by(f64::total_cmp);
                factors.iter().fold(*c, |acc, x| acc * x)
            })
            .collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().fold(0.0, |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        parse(s).unwrap()
    }

    #[test]
    fn shared_rabbit_pool_adds_two_terms() {
        let sum = &p("beta*r") + &p("-gamma*f*r");
        assert_eq!(sum.len(), 2);
        assert_eq!(sum, p("beta*r - gamma*f*r"));
        assert_eq!(&sum + &Polynomial::zero(), sum);
        assert!((&sum - &sum).is_zero());
    }

    #[test]
    fn product_basics() {
        let q = p("x^2 + 3*y - 1/2");
        assert_eq!(&Polynomial::one() * &q, q);
        assert!((&Polynomial::zero() * &q).is_zero());
        assert_eq!(&p("r") * &p("f"), p("f*r"));
    }

    #[test]
    fn prey_substitution() {
        let fox = p("alpha*e*f");
        let s = fox.substitute(|n| (n == "e").then(|| Polynomial::var("r")));
        assert_eq!(s, p("alpha*r*f"));
        assert_eq!(fox.substitute(|n| Some(Polynomial::var(n))), fox);
    }

    #[test]
    fn evaluate_simple() {
        let v = p("beta*r")
            .evaluate(|n| match n {
                "r" => Some(2.0),
                "beta" => Some(0.5),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(Polynomial::zero().evaluate(|_| None).unwrap(), 0.0);
        assert_eq!(p("x").evaluate(|_| None), Err(ExprError::Unbound("x".into())));
    }

    #[test]
    fn construction_order_irrelevant() {
        let a = &p("beta*r") - &p("gamma*f*r");
        let b = &(-&p("gamma*f*r")) + &p("beta*r");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), b.to_string());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "1", "-3/4*x^2*y + 2", "-F*R*gamma + R*beta", "a.b*x' - 7"] {
            let q = p(s);
            assert_eq!(parse(&q.to_string()).unwrap(), q, "{s}");
        }
        assert_eq!(p("beta*R - gamma*F*R").to_string(), "-F*R*gamma + R*beta");
    }

    #[test]
    fn grlex_order() {
        let q = p("y^2 + x*y + x^2 + x + 1");
        let printed = q.to_string();
        assert_eq!(printed, "x^2 + x*y + y^2 + x + 1");
    }

    #[test]
    fn polymap_rejects_foreign_names() {
        let m = PolyMap::from_pairs(FinSet::new(["x"]).unwrap(), [("x", p("k*y"))]).unwrap();
        assert!(m.check_names(|n| n == "k" || n == "x").is_err());
        assert!(m.check_names(|n| n == "k" || n == "y").is_ok());
        assert!(PolyMap::from_pairs(FinSet::new(["x"]).unwrap(), Vec::<(&str, Polynomial)>::new()).is_err());
    }

    #[test]
    fn compiled_matches_direct() {
        let q = p("3*x^2*y - y + 1/3");
        let c = CompiledPoly::new(&q, |n| match n {
            "x" => Some(0),
            "y" => Some(1),
            _ => None,
        })
        .unwrap();
        let direct = q
            .evaluate(|n| match n {
                "x" => Some(1.5),
                "y" => Some(-2.0),
                _ => None,
            })
            .unwrap();
        assert_eq!(c.eval(&[1.5, -2.0]), direct);
    }
}
