//! Seeded property checks shared by the property suites and the
//! acceptance run. Each returns a description of the first failure.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsm::expr::Rational;
use rsm::finset::{pullback, pushout};
use rsm::rsm::act_compose_check;
use rsm::{parse, FilledBox, FinMap, FinSet, Interface, Polynomial, RsmMorphism, Slot};

use super::{random_automaton, random_interface, random_morphism};

pub const NAMES: [&str; 3] = ["x", "y", "beta"];

#[derive(Clone, Debug)]
pub enum Tree {
    Num(i64, i64),
    Var(usize),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Neg(Box<Tree>),
    Pow(Box<Tree>, u32),
}

impl Tree {
    pub fn text(&self) -> String {
        match self {
            Tree::Num(n, 1) => format!("{n}"),
            Tree::Num(n, d) => format!("({n}/{d})"),
            Tree::Var(k) => NAMES[*k].to_string(),
            Tree::Add(a, b) => format!("({} + {})", a.text(), b.text()),
            Tree::Sub(a, b) => format!("({} - {})", a.text(), b.text()),
            Tree::Mul(a, b) => format!("{} * {}", a.text(), b.text()),
            Tree::Neg(a) => format!("(-{})", a.text()),
            Tree::Pow(a, e) => format!("({})^{e}", a.text()),
        }
    }

    pub fn eval(&self, pt: &[Rational]) -> Rational {
        match self {
            Tree::Num(n, d) => Rational::new(BigInt::from(*n), BigInt::from(*d)),
            Tree::Var(k) => pt[*k].clone(),
            Tree::Add(a, b) => a.eval(pt) + b.eval(pt),
            Tree::Sub(a, b) => a.eval(pt) - b.eval(pt),
            Tree::Mul(a, b) => a.eval(pt) * b.eval(pt),
            Tree::Neg(a) => -a.eval(pt),
            Tree::Pow(a, e) => {
                let base = a.eval(pt);
                (0..*e).fold(Rational::one(), |acc, _| acc * &base)
            }
        }
    }
}

pub fn random_tree(rng: &mut ChaCha8Rng, depth: u32) -> Tree {
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            Tree::Num(rng.gen_range(-5..=5), rng.gen_range(1..=4))
        } else {
            Tree::Var(rng.gen_range(0..NAMES.len()))
        };
    }
    let op = rng.gen_range(0..5);
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_tree(rng, depth - 1));
    match op {
        0 => Tree::Add(sub(rng), sub(rng)),
        1 => Tree::Sub(sub(rng), sub(rng)),
        2 => Tree::Mul(sub(rng), sub(rng)),
        3 => Tree::Neg(sub(rng)),
        _ => Tree::Pow(sub(rng), rng.gen_range(0..=3)),
    }
}

pub fn random_point(rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..NAMES.len())
        .map(|_| {
            Rational::new(
                BigInt::from(rng.gen_range(-20..=20)),
                BigInt::from(rng.gen_range(1..=7)),
            )
        })
        .collect()
}

pub fn table(pt: &[Rational]) -> BTreeMap<String, Rational> {
    NAMES.iter().map(|n| n.to_string()).zip(pt.iter().cloned()).collect()
}

/// Pairs `(s, q)` with `p[s] == i[q]`, in lexicographic order.
pub fn pullback_oracle(p: &[usize], i: &[usize]) -> Vec<(usize, usize)> {
    let mut out = vec![];
    for (s, ps) in p.iter().enumerate() {
        for (q, iq) in i.iter().enumerate() {
            if ps == iq {
                out.push((s, q));
            }
        }
    }
    out
}

/// Whether `x` and `y` of `A + B` are joined by the span `A <- M -> B`,
/// as a reachability matrix.
pub fn pushout_oracle(a: usize, b: usize, pa: &[usize], pb: &[usize]) -> Vec<Vec<bool>> {
    let n = a + b;
    let mut rel = vec![vec![false; n]; n];
    for (k, row) in rel.iter_mut().enumerate() {
        row[k] = true;
    }
    for (x, y) in pa.iter().zip(pb) {
        rel[*x][a + y] = true;
        rel[a + y][*x] = true;
    }
    for via in 0..n {
        for x in 0..n {
            for y in 0..n {
                if rel[x][via] && rel[via][y] {
                    rel[x][y] = true;
                }
            }
        }
    }
    rel
}

fn set(prefix: &str, n: usize) -> FinSet {
    FinSet::new((0..n).map(|k| format!("{prefix}{k}"))).unwrap()
}

fn random_indices(rng: &mut ChaCha8Rng, d: usize, c: usize) -> Vec<usize> {
    (0..d).map(|_| rng.gen_range(0..c)).collect()
}

/// One pullback and one pushout on sets of at most five elements.
pub fn limits_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m = rng.gen_range(1..=5);
    let (s, q) = (rng.gen_range(0..=5), rng.gen_range(0..=5));
    let (p, i) = (random_indices(rng, s, m), random_indices(rng, q, m));
    let mset = set("m", m);
    let pb = pullback(
        &FinMap::from_indices(set("s", s), mset.clone(), p.clone()).unwrap(),
        &FinMap::from_indices(set("q", q), mset.clone(), i.clone()).unwrap(),
    )
    .unwrap();
    let got: Vec<(usize, usize)> = (0..pb.apex.len()).map(|k| (pb.proj1.at(k), pb.proj2.at(k))).collect();
    if got != pullback_oracle(&p, &i) {
        return Err(format!("pullback of {p:?} and {i:?}"));
    }

    let (a, b) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let k = rng.gen_range(0..=5);
    let (pa, pbm) = (random_indices(rng, k, a), random_indices(rng, k, b));
    let kset = set("m", k);
    let po = pushout(
        &FinMap::from_indices(kset.clone(), set("a", a), pa.clone()).unwrap(),
        &FinMap::from_indices(kset, set("b", b), pbm.clone()).unwrap(),
    )
    .unwrap();
    let rel = pushout_oracle(a, b, &pa, &pbm);
    let class = |x: usize| if x < a { po.inj1.at(x) } else { po.inj2.at(x - a) };
    for (x, row) in rel.iter().enumerate() {
        for (y, &related) in row.iter().enumerate() {
            if (class(x) == class(y)) != related {
                return Err(format!("pushout of {pa:?} and {pbm:?}"));
            }
        }
    }
    let classes = (0..a + b).filter(|&x| (0..x).all(|y| !rel[x][y])).count();
    if classes != po.apex.len() {
        return Err(format!("pushout of {pa:?} and {pbm:?} has {} classes", po.apex.len()));
    }
    Ok(())
}

/// Random fillings, an inner wiring on them, and an outer one-slot wiring.
pub fn random_composable<F>(rng: &mut ChaCha8Rng, ty: &str, fill: F) -> (RsmMorphism, RsmMorphism, Vec<FilledBox>)
where
    F: Fn(&mut ChaCha8Rng, &Interface) -> FilledBox,
{
    let n = rng.gen_range(1..=3);
    let slots: Vec<Slot> = (0..n)
        .map(|k| Slot::new(format!("b{k}"), random_interface(rng, ty, [1, 1, 1])))
        .collect();
    let fillings: Vec<FilledBox> = slots.iter().map(|s| fill(rng, &s.interface)).collect();
    let mid = random_interface(rng, ty, [1, 1, 2]);
    let inner = random_morphism(rng, slots, mid, ty);
    let top = random_interface(rng, ty, [1, 1, 1]);
    let outer = random_morphism(rng, vec![Slot::new("m", inner.codomain.clone())], top, ty);
    (inner, outer, fillings)
}

/// Acting twice versus acting by the substitution, on automata with at most
/// four states per factor.
pub fn functoriality_case(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (inner, outer, fillings) =
        random_composable(&mut rng, "bit", |rng, iface| random_automaton(rng, iface, 4).into());
    match act_compose_check(&inner, &outer, &fillings) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("seed {seed}: composites differ")),
        Err(e) => Err(format!("seed {seed}: {e}")),
    }
}

/// Ring laws and substitution on random polynomials, evaluated at twenty
/// random rational points.
pub fn polynomial_case(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let trees: Vec<Tree> = (0..3).map(|_| random_tree(rng, 4)).collect();
    let images: Vec<Tree> = (0..NAMES.len()).map(|_| random_tree(rng, 3)).collect();
    let polys: Vec<Polynomial> = trees.iter().map(|t| parse(&t.text()).unwrap()).collect();
    let (a, b, c) = (&polys[0], &polys[1], &polys[2]);
    let fail = |what: &str| {
        Err(format!(
            "{what}: {} / {} / {}",
            trees[0].text(),
            trees[1].text(),
            trees[2].text()
        ))
    };
    if a + b != b + a || a * b != b * a {
        return fail("commutativity");
    }
    if &(a + b) + c != a + &(b + c) || &(a * b) * c != a * &(b * c) {
        return fail("associativity");
    }
    if a * &(b + c) != &(a * b) + &(a * c) {
        return fail("distributivity");
    }
    if a + &Polynomial::zero() != *a || a * &Polynomial::one() != *a || !(a - &a.clone()).is_zero() {
        return fail("units");
    }
    let subst: BTreeMap<String, Polynomial> = NAMES
        .iter()
        .zip(&images)
        .map(|(n, t)| (n.to_string(), parse(&t.text()).unwrap()))
        .collect();
    let s = |r: &Polynomial| r.substitute_map(&subst);
    if s(&(a * b)) != &s(a) * &s(b) || s(&(a + b)) != &s(a) + &s(b) || s(&Polynomial::one()) != Polynomial::one() {
        return fail("substitution");
    }
    for _ in 0..20 {
        let pt = random_point(rng);
        let at = |p: &Polynomial, pt: &[Rational]| p.evaluate_exact(&table(pt)).unwrap();
        for (t, p) in trees.iter().zip(&polys) {
            if at(p, &pt) != t.eval(&pt) {
                return fail("evaluation");
            }
        }
        if at(&(a * b), &pt) != at(a, &pt) * at(b, &pt) || at(&(a + b), &pt) != at(a, &pt) + at(b, &pt) {
            return fail("evaluation homomorphism");
        }
        let moved: Vec<Rational> = images.iter().map(|t| t.eval(&pt)).collect();
        if at(&s(a), &pt) != at(a, &moved) {
            return fail("substitution at a point");
        }
    }
    Ok(())
}
