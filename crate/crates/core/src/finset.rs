//! Finite sets of named elements, maps between them, spans, cospans and the
//! two finite limits/colimits everything else is built from.
//!
//! Elements are text atoms kept in construction order. Every canonical
//! construction names its output deterministically:
//!
//! * pullback apex elements are `"(s,q)"`, enumerated in lexicographic order of
//!   the two domains;
//! * pushout classes are named after their least member, taking every element
//!   of the first codomain before any element of the second;
//! * sums prefix each element with its summand label, `"label.elem"`.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinSetError {
    #[error("duplicate element `{0}`")]
    Duplicate(String),
    #[error("unknown element `{elem}` (expected one of {set})")]
    Unknown { elem: String, set: Box<FinSet> },
    #[error("element `{0}` is not assigned")]
    Unassigned(String),
    #[error("index {index} out of range for a set of {len} elements")]
    OutOfRange { index: usize, len: usize },
    #[error("codomains differ: {left} vs {right}")]
    CodomainMismatch { left: Box<FinSet>, right: Box<FinSet> },
    #[error("domains differ: {left} vs {right}")]
    DomainMismatch { left: Box<FinSet>, right: Box<FinSet> },
    #[error("cannot compose: {left} does not match {right}")]
    BoundaryMismatch { left: Box<FinSet>, right: Box<FinSet> },
    #[error("`{elem}` has type `{found}` but `{expected}` was required")]
    TypeMismatch {
        elem: String,
        expected: String,
        found: String,
    },
    #[error("labeling has {found} entries but the set has {expected}")]
    LabelingLength { expected: usize, found: usize },
    #[error("no alphabet named `{0}`")]
    UnknownAlphabet(String),
}

pub type Result<T> = std::result::Result<T, FinSetError>;

/// An ordered finite set of distinct names.
#[derive(Clone, Default)]
pub struct FinSet {
    elems: IndexSet<String>,
}

impl FinSet {
    pub fn new<I, S>(elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut set = IndexSet::new();
        for e in elems {
            let e = e.into();
            if set.contains(&e) {
                return Err(FinSetError::Duplicate(e));
            }
            set.insert(e);
        }
        Ok(Self { elems: set })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The one-element set `{*}`.
    pub fn point() -> Self {
        Self::new(["*"]).expect("single element")
    }

    /// `{0, 1, ..., n-1}`.
    pub fn range(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string())).expect("distinct numerals")
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.elems.iter().map(String::as_str)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.elems[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elems.get_index_of(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.elems.contains(name)
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| FinSetError::Unknown {
            elem: name.to_string(),
            set: Box::new(self.clone()),
        })
    }

    /// Disjoint union with provenance prefixes, `label.elem`.
    pub fn sum<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a FinSet)>,
    {
        Self::new(
            parts
                .into_iter()
                .flat_map(|(label, set)| set.iter().map(move |e| qualify(label, e))),
        )
    }
}

/// Prefixes an element name with a summand label.
pub fn qualify(label: &str, elem: &str) -> String {
    format!("{label}.{elem}")
}

/// Names a tuple of components: a single component keeps its own name, any
/// other arity is parenthesised and comma separated.
pub fn tuple_name<S: AsRef<str>>(parts: &[S]) -> String {
    match parts {
        [one] => one.as_ref().to_string(),
        _ => {
            let inner: Vec<&str> = parts.iter().map(AsRef::as_ref).collect();
            format!("({})", inner.join(","))
        }
    }
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        self.elems.iter().eq(other.elems.iter())
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// A finite set whose elements carry a type label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypedFinSet {
    base: FinSet,
    types: Vec<String>,
}

impl TypedFinSet {
    pub fn new<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let (names, types): (Vec<String>, Vec<String>) = pairs.into_iter().map(|(s, t)| (s.into(), t.into())).unzip();
        Ok(Self {
            base: FinSet::new(names)?,
            types,
        })
    }

    /// Every element typed by the same label.
    pub fn uniform(base: FinSet, ty: &str) -> Self {
        let types = vec![ty.to_string(); base.len()];
        Self { base, types }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn base(&self) -> &FinSet {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn type_at(&self, index: usize) -> &str {
        &self.types[index]
    }

    pub fn type_of(&self, name: &str) -> Option<&str> {
        self.base.index_of(name).map(|i| self.type_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.base.iter().zip(self.types.iter().map(String::as_str))
    }

    pub fn sum<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a TypedFinSet)>,
    {
        let pairs: Vec<(String, String)> = parts
            .into_iter()
            .flat_map(|(label, set)| set.iter().map(move |(e, t)| (qualify(label, e), t.to_string())))
            .collect();
        Self::new(pairs)
    }

    /// Plain disjoint union without prefixes; fails on a name clash.
    pub fn concat<'a, I>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TypedFinSet>,
    {
        let pairs: Vec<(String, String)> = parts
            .into_iter()
            .flat_map(|set| set.iter().map(|(e, t)| (e.to_string(), t.to_string())))
            .collect();
        Self::new(pairs)
    }

    /// Checks that `f: self -> cod` preserves types, returning one error per
    /// offending element.
    pub fn type_errors(&self, f: &FinMap, cod: &TypedFinSet) -> Vec<FinSetError> {
        let mut out = Vec::new();
        for (i, name) in f.dom().iter().enumerate() {
            let Some(expected) = self.type_of(name) else {
                continue;
            };
            let found = cod.type_of(f.cod().name(f.at(i))).unwrap_or("<untyped>");
            if expected != found {
                out.push(FinSetError::TypeMismatch {
                    elem: name.to_string(),
                    expected: expected.to_string(),
                    found: found.to_string(),
                });
            }
        }
        out
    }
}

/// A total function between finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMap {
    dom: FinSet,
    cod: FinSet,
    map: Vec<usize>,
}

impl FinMap {
    pub fn from_indices(dom: FinSet, cod: FinSet, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.len() {
            let missing = dom.name(map.len().min(dom.len().saturating_sub(1)));
            return Err(FinSetError::Unassigned(missing.to_string()));
        }
        if let Some(&index) = map.iter().find(|&&j| j >= cod.len()) {
            return Err(FinSetError::OutOfRange { index, len: cod.len() });
        }
        Ok(Self { dom, cod, map })
    }

    /// Builds a map from `(source, target)` name pairs. Every element of
    /// `dom` must be assigned exactly once.
    pub fn from_pairs<I, S, T>(dom: FinSet, cod: FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut map = vec![usize::MAX; dom.len()];
        for (s, t) in pairs {
            let i = dom.require(s.as_ref())?;
            if map[i] != usize::MAX {
                return Err(FinSetError::Duplicate(s.as_ref().to_string()));
            }
            map[i] = cod.require(t.as_ref())?;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(FinSetError::Unassigned(dom.name(i).to_string()));
        }
        Ok(Self { dom, cod, map })
    }

    pub fn from_fn(dom: FinSet, cod: FinSet, f: impl Fn(&str) -> String) -> Result<Self> {
        let pairs: Vec<(String, String)> = dom.iter().map(|d| (d.to_string(), f(d))).collect();
        Self::from_pairs(dom, cod, pairs)
    }

    pub fn identity(set: &FinSet) -> Self {
        Self {
            dom: set.clone(),
            cod: set.clone(),
            map: (0..set.len()).collect(),
        }
    }

    /// The unique map out of the empty set.
    pub fn initial(cod: &FinSet) -> Self {
        Self {
            dom: FinSet::empty(),
            cod: cod.clone(),
            map: Vec::new(),
        }
    }

    /// The unique map into `{*}`.
    pub fn terminal(dom: &FinSet) -> Self {
        Self {
            dom: dom.clone(),
            cod: FinSet::point(),
            map: vec![0; dom.len()],
        }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn indices(&self) -> &[usize] {
        &self.map
    }

    pub fn at(&self, index: usize) -> usize {
        self.map[index]
    }

    pub fn apply(&self, name: &str) -> Option<&str> {
        self.dom.index_of(name).map(|i| self.cod.name(self.map[i]))
    }

    /// Diagrammatic composite `self ; next`.
    pub fn then(&self, next: &FinMap) -> Result<FinMap> {
        if self.cod != next.dom {
            return Err(FinSetError::BoundaryMismatch {
                left: Box::new(self.cod.clone()),
                right: Box::new(next.dom.clone()),
            });
        }
        Ok(FinMap {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            map: self.map.iter().map(|&j| next.map[j]).collect(),
        })
    }

    /// Elements of the domain sent to `target`, in domain order.
    pub fn preimage(&self, target: usize) -> impl Iterator<Item = usize> + '_ {
        self.map
            .iter()
            .enumerate()
            .filter(move |&(_, &j)| j == target)
            .map(|(i, _)| i)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &j in &self.map {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijection(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinMap> {
        if !self.is_bijection() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Some(FinMap {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            map: inv,
        })
    }

    /// Sum of maps, `Σ fᵢ : Σ domᵢ -> Σ codᵢ`, with the same labels on both sides.
    pub fn sum<'a, I>(parts: I) -> Result<FinMap>
    where
        I: IntoIterator<Item = (&'a str, &'a FinMap)>,
    {
        let parts: Vec<(&str, &FinMap)> = parts.into_iter().collect();
        let dom = FinSet::sum(parts.iter().map(|(l, f)| (*l, &f.dom)))?;
        let cod = FinSet::sum(parts.iter().map(|(l, f)| (*l, &f.cod)))?;
        let mut map = Vec::with_capacity(dom.len());
        let mut offset = 0;
        for (_, f) in &parts {
            map.extend(f.map.iter().map(|&j| j + offset));
            offset += f.cod.len();
        }
        FinMap::from_indices(dom, cod, map)
    }
}

/// Pullback square over a common codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pullback {
    pub apex: FinSet,
    pub proj1: FinMap,
    pub proj2: FinMap,
}

/// Pullback of `p: S -> M` and `i: Q -> M`: the pairs `(s,q)` with `p(s) = i(q)`.
pub fn pullback(p: &FinMap, i: &FinMap) -> Result<Pullback> {
    if p.cod != i.cod {
        return Err(FinSetError::CodomainMismatch {
            left: Box::new(p.cod.clone()),
            right: Box::new(i.cod.clone()),
        });
    }
    let mut names = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (s, &ps) in p.map.iter().enumerate() {
        for (q, &iq) in i.map.iter().enumerate() {
            if ps == iq {
                names.push(tuple_name(&[p.dom.name(s), i.dom.name(q)]));
                left.push(s);
                right.push(q);
            }
        }
    }
    let apex = FinSet::new(names)?;
    Ok(Pullback {
        proj1: FinMap::from_indices(apex.clone(), p.dom.clone(), left)?,
        proj2: FinMap::from_indices(apex.clone(), i.dom.clone(), right)?,
        apex,
    })
}

/// Pushout cocone under a common domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushout {
    pub apex: FinSet,
    pub inj1: FinMap,
    pub inj2: FinMap,
}

/// Pushout of `pi: M -> A` and `a: M -> B`, i.e. `(A + B)/~` with
/// `pi(m) ~ a(m)`.
///
/// Each class is named after its least member (all of `A` precedes all of
/// `B`). Should that name already belong to an earlier class, primes are
/// appended until it is fresh.
pub fn pushout(pi: &FinMap, a: &FinMap) -> Result<Pushout> {
    if pi.dom != a.dom {
        return Err(FinSetError::DomainMismatch {
            left: Box::new(pi.dom.clone()),
            right: Box::new(a.dom.clone()),
        });
    }
    let n_left = pi.cod.len();
    let total = n_left + a.cod.len();
    let mut uf = UnionFind::new(total);
    for (&x, &y) in pi.map.iter().zip(&a.map) {
        uf.union(x, n_left + y);
    }
    let name_of = |k: usize| -> &str {
        if k < n_left {
            pi.cod.name(k)
        } else {
            a.cod.name(k - n_left)
        }
    };
    // Roots are least members, so scanning in order visits classes by rank.
    let mut class_of_root = vec![usize::MAX; total];
    let mut names: IndexSet<String> = IndexSet::new();
    let mut class = vec![0; total];
    for (k, slot) in class.iter_mut().enumerate() {
        let root = uf.find(k);
        if class_of_root[root] == usize::MAX {
            let mut name = name_of(root).to_string();
            while names.contains(&name) {
                name.push('\'');
            }
            class_of_root[root] = names.len();
            names.insert(name);
        }
        *slot = class_of_root[root];
    }
    let apex = FinSet::new(names)?;
    Ok(Pushout {
        inj1: FinMap::from_indices(pi.cod.clone(), apex.clone(), class[..n_left].to_vec())?,
        inj2: FinMap::from_indices(a.cod.clone(), apex.clone(), class[n_left..].to_vec())?,
        apex,
    })
}

/// `L <- Q -> R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    left: FinMap,
    right: FinMap,
}

impl Span {
    pub fn new(left: FinMap, right: FinMap) -> Result<Self> {
        if left.dom != right.dom {
            return Err(FinSetError::DomainMismatch {
                left: Box::new(left.dom.clone()),
                right: Box::new(right.dom.clone()),
            });
        }
        Ok(Self { left, right })
    }

    pub fn identity(set: &FinSet) -> Self {
        Self {
            left: FinMap::identity(set),
            right: FinMap::identity(set),
        }
    }

    pub fn left(&self) -> &FinMap {
        &self.left
    }

    pub fn right(&self) -> &FinMap {
        &self.right
    }

    pub fn apex(&self) -> &FinSet {
        &self.left.dom
    }
}

/// A composite span together with the pullback that produced its apex.
#[derive(Clone, Debug)]
pub struct ComposedSpan {
    pub span: Span,
    pub middle: Pullback,
}

/// Composes `L <- A -> M` with `M <- B -> R` by pulling back over `M`.
pub fn compose_spans(first: &Span, second: &Span) -> Result<ComposedSpan> {
    if first.right.cod != second.left.cod {
        return Err(FinSetError::BoundaryMismatch {
            left: Box::new(first.right.cod.clone()),
            right: Box::new(second.left.cod.clone()),
        });
    }
    let middle = pullback(&first.right, &second.left)?;
    let span = Span::new(middle.proj1.then(&first.left)?, middle.proj2.then(&second.right)?)?;
    Ok(ComposedSpan { span, middle })
}

/// `L -> Q <- R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cospan {
    left: FinMap,
    right: FinMap,
}

impl Cospan {
    pub fn new(left: FinMap, right: FinMap) -> Result<Self> {
        if left.cod != right.cod {
            return Err(FinSetError::CodomainMismatch {
                left: Box::new(left.cod.clone()),
                right: Box::new(right.cod.clone()),
            });
        }
        Ok(Self { left, right })
    }

    pub fn identity(set: &FinSet) -> Self {
        Self {
            left: FinMap::identity(set),
            right: FinMap::identity(set),
        }
    }

    pub fn left(&self) -> &FinMap {
        &self.left
    }

    pub fn right(&self) -> &FinMap {
        &self.right
    }

    pub fn apex(&self) -> &FinSet {
        &self.left.cod
    }

    /// Tensor of cospans with summand labels on feet and apexes alike.
    pub fn sum<'a, I>(parts: I) -> Result<Cospan>
    where
        I: IntoIterator<Item = (&'a str, &'a Cospan)>,
    {
        let parts: Vec<(&str, &Cospan)> = parts.into_iter().collect();
        Cospan::new(
            FinMap::sum(parts.iter().map(|(l, c)| (*l, &c.left)))?,
            FinMap::sum(parts.iter().map(|(l, c)| (*l, &c.right)))?,
        )
    }

    /// The bijection between apexes of two cospans with the same feet that
    /// commutes with both legs, if one exists. Apex elements hit by neither
    /// leg are paired off in order.
    pub fn iso_to(&self, other: &Cospan) -> Option<FinMap> {
        if self.left.dom != other.left.dom
            || self.right.dom != other.right.dom
            || self.apex().len() != other.apex().len()
        {
            return None;
        }
        let mut map = vec![usize::MAX; self.apex().len()];
        let legs = [(&self.left, &other.left), (&self.right, &other.right)];
        for (mine, theirs) in legs {
            for (&x, &y) in mine.map.iter().zip(&theirs.map) {
                if map[x] == usize::MAX {
                    map[x] = y;
                } else if map[x] != y {
                    return None;
                }
            }
        }
        let mut hit = vec![false; other.apex().len()];
        for &y in map.iter().filter(|&&y| y != usize::MAX) {
            hit[y] = true;
        }
        let mut spare = (0..hit.len()).filter(|&y| !hit[y]);
        for slot in map.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = spare.next()?;
        }
        let iso = FinMap::from_indices(self.apex().clone(), other.apex().clone(), map).ok()?;
        iso.is_bijection().then_some(iso)
    }
}

/// A composite cospan together with the pushout that produced its apex.
#[derive(Clone, Debug)]
pub struct ComposedCospan {
    pub cospan: Cospan,
    pub middle: Pushout,
}

/// Composes `L -> A <- M` with `M -> B <- R` by pushing out under `M`.
pub fn compose_cospans(first: &Cospan, second: &Cospan) -> Result<ComposedCospan> {
    if first.right.dom != second.left.dom {
        return Err(FinSetError::BoundaryMismatch {
            left: Box::new(first.right.dom.clone()),
            right: Box::new(second.left.dom.clone()),
        });
    }
    let middle = pushout(&first.right, &second.left)?;
    let cospan = Cospan::new(first.left.then(&middle.inj1)?, second.right.then(&middle.inj2)?)?;
    Ok(ComposedCospan { cospan, middle })
}

/// Pulls a labeling of `f.cod()` back along `f`: `m ↦ sigma(f(m))`.
pub fn label_pull<L: Clone>(f: &FinMap, sigma: &[L]) -> Result<Vec<L>> {
    if sigma.len() != f.cod.len() {
        return Err(FinSetError::LabelingLength {
            expected: f.cod.len(),
            found: sigma.len(),
        });
    }
    Ok(f.map.iter().map(|&j| sigma[j].clone()).collect())
}

/// All labelings of a typed set, each port drawn from the alphabet named by
/// its type. Elements are enumerated with the last port varying fastest and
/// named by [`tuple_name`] of their letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelings {
    ports: TypedFinSet,
    letters: Vec<FinSet>,
    elements: FinSet,
    tuples: Vec<Vec<usize>>,
}

impl Labelings {
    pub fn new(ports: &TypedFinSet, alphabets: &BTreeMap<String, FinSet>) -> Result<Self> {
        let letters: Vec<FinSet> = ports
            .iter()
            .map(|(_, ty)| {
                alphabets
                    .get(ty)
                    .cloned()
                    .ok_or_else(|| FinSetError::UnknownAlphabet(ty.to_string()))
            })
            .collect::<Result<_>>()?;
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for alphabet in &letters {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..alphabet.len()).map(move |k| {
                        let mut t = t.clone();
                        t.push(k);
                        t
                    })
                })
                .collect();
        }
        let elements = FinSet::new(tuples.iter().map(|t| {
            let names: Vec<&str> = t.iter().zip(&letters).map(|(&k, a)| a.name(k)).collect();
            tuple_name(&names)
        }))?;
        Ok(Self {
            ports: ports.clone(),
            letters,
            elements,
            tuples,
        })
    }

    pub fn ports(&self) -> &TypedFinSet {
        &self.ports
    }

    pub fn elements(&self) -> &FinSet {
        &self.elements
    }

    pub fn alphabet(&self, port: usize) -> &FinSet {
        &self.letters[port]
    }

    /// Letter indices of one labeling, one per port.
    pub fn tuple(&self, element: usize) -> &[usize] {
        &self.tuples[element]
    }

    /// Index of the labeling with the given letters.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        tuple
            .iter()
            .zip(&self.letters)
            .fold(0, |acc, (&k, a)| acc * a.len() + k)
    }

    /// `f^*: Label(f.cod) -> Label(f.dom)` where `self` labels `f.dom` and
    /// `target` labels `f.cod`.
    pub fn pull_map(&self, f: &FinMap, target: &Labelings) -> Result<FinMap> {
        if f.dom != *self.ports.base() || f.cod != *target.ports.base() {
            return Err(FinSetError::BoundaryMismatch {
                left: Box::new(f.dom.clone()),
                right: Box::new(self.ports.base().clone()),
            });
        }
        if let Some(e) = self.ports.type_errors(f, &target.ports).into_iter().next() {
            return Err(e);
        }
        let map = target
            .tuples
            .iter()
            .map(|sigma| Ok(self.index_of(&label_pull(f, sigma)?)))
            .collect::<Result<Vec<_>>>()?;
        FinMap::from_indices(target.elements.clone(), self.elements.clone(), map)
    }
}

/// Disjoint sets over `0..n` whose representative is always the least member.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(names: &[&str]) -> FinSet {
        FinSet::new(names.iter().copied()).unwrap()
    }

    fn parity() -> FinMap {
        FinMap::from_fn(set(&["0", "1", "2", "3"]), set(&["even", "odd"]), |s| {
            if s.parse::<u32>().unwrap() % 2 == 0 {
                "even".into()
            } else {
                "odd".into()
            }
        })
        .unwrap()
    }

    #[test]
    fn duplicate_names_rejected() {
        assert_eq!(FinSet::new(["a", "b", "a"]), Err(FinSetError::Duplicate("a".into())));
    }

    #[test]
    fn pullback_of_parity_along_identity() {
        let p = parity();
        let pb = pullback(&p, &FinMap::identity(p.cod())).unwrap();
        assert_eq!(pb.apex, set(&["(0,even)", "(1,odd)", "(2,even)", "(3,odd)"]));
        assert!(pb.proj1.is_bijection());
        assert_eq!(
            pb.proj1.then(&p).unwrap(),
            pb.proj2.then(&FinMap::identity(p.cod())).unwrap()
        );
    }

    #[test]
    fn pullback_with_empty_leg_is_empty() {
        let p = FinMap::from_pairs(set(&["a"]), set(&["m"]), [("a", "m")]).unwrap();
        let pb = pullback(&p, &FinMap::initial(&set(&["m"]))).unwrap();
        assert!(pb.apex.is_empty());
    }

    #[test]
    fn pullback_codomain_mismatch() {
        let p = parity();
        let err = pullback(&p, &FinMap::identity(&set(&["x"]))).unwrap_err();
        assert!(matches!(err, FinSetError::CodomainMismatch { .. }));
    }

    #[test]
    fn pushout_folds_populations() {
        let foot = set(&["p1", "p2", "p3", "p4"]);
        let pi = FinMap::from_pairs(
            foot.clone(),
            set(&["r1", "f2", "r3", "f4"]),
            [("p1", "r1"), ("p2", "f2"), ("p3", "r3"), ("p4", "f4")],
        )
        .unwrap();
        let a = FinMap::from_pairs(
            foot,
            set(&["R", "F"]),
            [("p1", "R"), ("p2", "F"), ("p3", "R"), ("p4", "F")],
        )
        .unwrap();
        let po = pushout(&pi, &a).unwrap();
        assert_eq!(po.apex, set(&["r1", "f2"]));
        assert_eq!(po.inj1.apply("r3"), Some("r1"));
        assert_eq!(po.inj1.apply("f4"), Some("f2"));
        assert_eq!(po.inj2.apply("R"), Some("r1"));
        assert_eq!(po.inj2.apply("F"), Some("f2"));
    }

    #[test]
    fn pushout_of_empty_foot_is_disjoint_union() {
        let po = pushout(&FinMap::initial(&set(&["a", "b"])), &FinMap::initial(&set(&["c"]))).unwrap();
        assert_eq!(po.apex, set(&["a", "b", "c"]));
    }

    #[test]
    fn pushout_renames_clashing_classes() {
        let po = pushout(&FinMap::initial(&set(&["x"])), &FinMap::initial(&set(&["x"]))).unwrap();
        assert_eq!(po.apex, set(&["x", "x'"]));
    }

    #[test]
    fn pushout_foot_mismatch() {
        let err = pushout(&FinMap::identity(&set(&["a"])), &FinMap::identity(&set(&["b"]))).unwrap_err();
        assert!(matches!(err, FinSetError::DomainMismatch { .. }));
    }

    #[test]
    fn two_parity_spans_compose_to_eight_pairs() {
        let p = parity();
        // {0..3} <- {0..3} -> {even,odd} <- {0..3} -> {0..3}
        let up = Span::new(FinMap::identity(p.dom()), p.clone()).unwrap();
        let down = Span::new(p.clone(), FinMap::identity(p.dom())).unwrap();
        let c = compose_spans(&up, &down).unwrap();
        assert_eq!(c.span.apex().len(), 8);
        assert!(matches!(
            compose_spans(&up, &up),
            Err(FinSetError::BoundaryMismatch { .. })
        ));
    }

    #[test]
    fn identity_span_is_a_unit() {
        let p = parity();
        let s = Span::new(FinMap::identity(p.dom()), p.clone()).unwrap();
        let left = compose_spans(&Span::identity(p.dom()), &s).unwrap();
        // pullback along an identity: proj2 is the canonical bijection
        assert!(left.middle.proj2.is_bijection());
        assert_eq!(left.middle.proj2.then(s.right()).unwrap(), *left.span.right());
        let right = compose_spans(&s, &Span::identity(p.cod())).unwrap();
        assert!(right.middle.proj1.is_bijection());
        assert_eq!(right.middle.proj1.then(s.left()).unwrap(), *right.span.left());
    }

    #[test]
    fn label_pull_follows_wires() {
        let f = FinMap::from_pairs(set(&["x", "y"]), set(&["a"]), [("x", "a"), ("y", "a")]).unwrap();
        assert_eq!(label_pull(&f, &["b"]).unwrap(), vec!["b", "b"]);
        assert!(label_pull(&f, &["a", "b"]).is_err());
        let id = FinMap::identity(&set(&["p", "q"]));
        assert_eq!(label_pull(&id, &[1, 2]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn labelings_enumerate_tuples() {
        let mut alphabets = BTreeMap::new();
        alphabets.insert("parity".to_string(), set(&["even", "odd"]));
        let ports = TypedFinSet::new([("a", "parity"), ("b", "parity")]).unwrap();
        let l = Labelings::new(&ports, &alphabets).unwrap();
        assert_eq!(
            *l.elements(),
            set(&["(even,even)", "(even,odd)", "(odd,even)", "(odd,odd)"])
        );
        let shared = TypedFinSet::new([("s", "parity")]).unwrap();
        let q = Labelings::new(&shared, &alphabets).unwrap();
        let fold = FinMap::from_pairs(ports.base().clone(), shared.base().clone(), [("a", "s"), ("b", "s")]).unwrap();
        let diag = l.pull_map(&fold, &q).unwrap();
        assert_eq!(diag.apply("even"), Some("(even,even)"));
        assert_eq!(diag.apply("odd"), Some("(odd,odd)"));
        let none = Labelings::new(&TypedFinSet::empty(), &alphabets).unwrap();
        assert_eq!(*none.elements(), set(&["()"]));
    }

    #[test]
    fn typed_map_errors_name_the_port() {
        let dom = TypedFinSet::new([("x", "R"), ("y", "parity")]).unwrap();
        let cod = TypedFinSet::new([("z", "R")]).unwrap();
        let f = FinMap::from_pairs(dom.base().clone(), cod.base().clone(), [("x", "z"), ("y", "z")]).unwrap();
        let errs = dom.type_errors(&f, &cod);
        assert_eq!(errs.len(), 1);
        assert!(matches!(&errs[0], FinSetError::TypeMismatch { elem, .. } if elem == "y"));
    }

    #[test]
    fn cospan_iso_recovers_renaming() {
        let a = set(&["a", "b"]);
        let c1 = Cospan::new(
            FinMap::from_pairs(a.clone(), set(&["u", "v"]), [("a", "u"), ("b", "u")]).unwrap(),
            FinMap::initial(&set(&["u", "v"])),
        )
        .unwrap();
        let c2 = Cospan::new(
            FinMap::from_pairs(a, set(&["w", "k"]), [("a", "k"), ("b", "k")]).unwrap(),
            FinMap::initial(&set(&["w", "k"])),
        )
        .unwrap();
        let iso = c1.iso_to(&c2).unwrap();
        assert_eq!(iso.apply("u"), Some("k"));
        assert_eq!(iso.apply("v"), Some("w"));
    }
}
