use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::term::{Ladder, TermKey, MAX_MODES};
use crate::error::{Error, Result};

/// Default magnitude below which coefficients are dropped.
pub const DEFAULT_PRUNE: f64 = 1e-14;
/// Default cap on stored terms before a product is abandoned.
pub const DEFAULT_MAX_TERMS: usize = 10_000_000;
/// Default cap on the length of a raw ladder product passed to `normal_order`.
pub const DEFAULT_MAX_LADDER: usize = 16;

/// Thresholds shared by the symbolic kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraLimits {
    pub prune: f64,
    pub max_terms: usize,
    pub max_ladder: usize,
}

impl Default for AlgebraLimits {
    fn default() -> Self {
        Self {
            prune: DEFAULT_PRUNE,
            max_terms: DEFAULT_MAX_TERMS,
            max_ladder: DEFAULT_MAX_LADDER,
        }
    }
}

/// Finite sum of canonical excitation strings with complex coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration order (and everything
/// serialized from it) is deterministic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionOperator {
    terms: BTreeMap<TermKey, Complex64>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::from_term(TermKey::IDENTITY, c)
    }

    pub fn from_term(key: TermKey, coeff: Complex64) -> Self {
        let mut op = Self::zero();
        op.add_term(key, coeff);
        op.prune(DEFAULT_PRUNE);
        op
    }

    /// `n_p = a†_p a_p`.
    pub fn number(p: usize) -> Self {
        Self::from_term(TermKey::new(1 << p, 1 << p), Complex64::new(1.0, 0.0))
    }

    pub fn creation(p: usize) -> Self {
        Self::from_term(Ladder::Create(p).key(), Complex64::new(1.0, 0.0))
    }

    pub fn annihilation(p: usize) -> Self {
        Self::from_term(Ladder::Annihilate(p).key(), Complex64::new(1.0, 0.0))
    }

    /// `coeff * E^{creators}_{annihilators}` for arbitrarily ordered index
    /// lists; vanishes when an index repeats.
    pub fn excitation(creators: &[usize], annihilators: &[usize], coeff: Complex64) -> Self {
        match TermKey::from_indices(creators, annihilators) {
            Some((key, sign)) => Self::from_term(key, coeff * sign),
            None => Self::zero(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (TermKey, Complex64)>>(terms: I) -> Self {
        let mut op = Self::zero();
        for (k, c) in terms {
            op.add_term(k, c);
        }
        op.prune(DEFAULT_PRUNE);
        op
    }

    /// Accumulates without pruning; call [`prune`](Self::prune) afterwards.
    pub fn add_term(&mut self, key: TermKey, coeff: Complex64) {
        *self.terms.entry(key).or_default() += coeff;
    }

    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, c| c.norm() >= threshold);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TermKey> {
        self.terms.keys()
    }

    pub fn coefficient(&self, key: &TermKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_body_rank(&self) -> usize {
        self.terms.keys().map(TermKey::body_rank).max().unwrap_or(0)
    }

    /// Smallest spin-orbital count that holds every index.
    pub fn min_modes(&self) -> usize {
        self.terms
            .keys()
            .filter_map(TermKey::max_index)
            .max()
            .map_or(0, |p| p + 1)
    }

    /// Keeps the terms selected by `keep`.
    pub fn filter<F: FnMut(&TermKey) -> bool>(&self, mut keep: F) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (*k, *c))
                .collect(),
        }
    }

    /// Drops terms above the given many-body rank.
    pub fn truncate_rank(&self, max_rank: usize) -> Self {
        self.filter(|k| k.body_rank() <= max_rank)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * factor)).collect(),
        };
        out.prune(DEFAULT_PRUNE);
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.adjoint(), c.conj()))
                .collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_with(other, &AlgebraLimits::default())
    }

    /// Exact canonical product. Pruning happens only after full
    /// accumulation so the surviving terms do not depend on summation order.
    pub fn multiply_with(&self, other: &Self, limits: &AlgebraLimits) -> Result<Self> {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                for (key, sign) in ka.product(kb) {
                    out.add_term(key, c * sign);
                }
                if out.terms.len() > limits.max_terms {
                    return Err(Error::Capacity {
                        what: "terms in operator product",
                        size: out.terms.len(),
                        limit: limits.max_terms,
                    });
                }
            }
        }
        out.prune(limits.prune);
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.commutator_with(other, &AlgebraLimits::default())
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator_with(&self, other: &Self, limits: &AlgebraLimits) -> Result<Self> {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                for (key, sign) in ka.product(kb) {
                    out.add_term(key, c * sign);
                }
                for (key, sign) in kb.product(ka) {
                    out.add_term(key, -c * sign);
                }
                if out.terms.len() > limits.max_terms {
                    return Err(Error::Capacity {
                        what: "terms in commutator",
                        size: out.terms.len(),
                        limit: limits.max_terms,
                    });
                }
            }
        }
        out.prune(limits.prune);
        Ok(out)
    }

    /// `sqrt(sum |c|^2)` over stored coefficients.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).fold(0.0, |a, b| a + b).sqrt()
    }

    /// `sum |c|`; bounds the operator norm since every excitation string has
    /// operator norm at most one.
    pub fn norm_l1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, |a, b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient deviation between `self` and `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// `‖A - A†‖_max <= tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.distance(&self.adjoint()) <= tol
    }

    /// `‖A + A†‖_max <= tol`.
    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        (self + &self.adjoint()).max_abs() <= tol
    }

    pub fn is_number_conserving(&self) -> bool {
        self.terms.keys().all(TermKey::is_number_conserving)
    }

    /// Renames every index through `map` (old index -> new index).
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let remap = |ix: Vec<usize>| -> Result<Vec<usize>> {
                ix.into_iter()
                    .map(|p| {
                        map.get(p).copied().ok_or(Error::Bounds {
                            index: p,
                            limit: map.len(),
                        })
                    })
                    .collect()
            };
            let cr = remap(k.creator_indices())?;
            let an = remap(k.annihilator_indices())?;
            if let Some((key, sign)) = TermKey::from_indices(&cr, &an) {
                out.add_term(key, c * sign);
            }
        }
        out.prune(DEFAULT_PRUNE);
        Ok(out)
    }

    /// Writes one term per line as `coeff  c:p,q  a:r,s` with one-based
    /// indices and 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in &self.terms {
            let join = |v: Vec<usize>| {
                v.iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            s.push_str(&format!(
                "{}  c:{}  a:{}\n",
                format_complex(*c),
                join(k.creator_indices()),
                join(k.annihilator_indices())
            ));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut out = Self::zero();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            let coeff = fields
                .next()
                .ok_or_else(|| err("missing coefficient".into()))
                .and_then(|f| parse_complex(f).map_err(err))?;
            let mut parse_list = |prefix: &str| -> Result<Vec<usize>> {
                let f = fields
                    .next()
                    .ok_or_else(|| err(format!("missing {prefix} field")))?;
                let body = f
                    .strip_prefix(prefix)
                    .ok_or_else(|| err(format!("expected '{prefix}' field, got '{f}'")))?;
                if body.is_empty() {
                    return Ok(Vec::new());
                }
                body.split(',')
                    .map(|t| match t.parse::<usize>() {
                        Ok(p) if (1..=MAX_MODES).contains(&p) => Ok(p - 1),
                        _ => Err(err(format!("bad index '{t}'"))),
                    })
                    .collect()
            };
            let cr = parse_list("c:")?;
            let an = parse_list("a:")?;
            let (key, sign) = TermKey::from_indices(&cr, &an)
                .ok_or_else(|| err("repeated index in term".into()))?;
            out.add_term(key, coeff * sign);
        }
        out.prune(DEFAULT_PRUNE);
        Ok(out)
    }
}

/// Normal-orders a raw product of ladder operators times `coeff`.
pub fn normal_order(raw: &[Ladder], coeff: Complex64) -> Result<FermionOperator> {
    normal_order_with(raw, coeff, &AlgebraLimits::default())
}

pub fn normal_order_with(
    raw: &[Ladder],
    coeff: Complex64,
    limits: &AlgebraLimits,
) -> Result<FermionOperator> {
    if raw.len() > limits.max_ladder {
        return Err(Error::Capacity {
            what: "ladder operators in raw product",
            size: raw.len(),
            limit: limits.max_ladder,
        });
    }
    if let Some(op) = raw.iter().find(|op| op.index() >= MAX_MODES) {
        return Err(Error::Bounds {
            index: op.index(),
            limit: MAX_MODES,
        });
    }
    let mut acc = FermionOperator::scalar(coeff);
    for op in raw {
        acc = acc.multiply_with(
            &FermionOperator::from_term(op.key(), Complex64::new(1.0, 0.0)),
            limits,
        )?;
    }
    Ok(acc)
}

pub(crate) fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:.16e}", c.re)
    } else {
        format!("{:.16e}{:+.16e}i", c.re, c.im)
    }
}

pub(crate) fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let bad = || format!("bad coefficient '{s}'");
    if let Some(body) = s.strip_suffix('i') {
        // split at the sign that starts the imaginary part (not an exponent sign)
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
            .ok_or_else(bad)?;
        let re = body[..split].parse::<f64>().map_err(|_| bad())?;
        let im = body[split..].parse::<f64>().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad())
    }
}

impl fmt::Display for FermionOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add<&FermionOperator> for &FermionOperator {
    type Output = FermionOperator;
    fn add(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&FermionOperator> for &FermionOperator {
    type Output = FermionOperator;
    fn sub(self, rhs: &FermionOperator) -> FermionOperator {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for FermionOperator {
    type Output = FermionOperator;
    fn add(mut self, rhs: FermionOperator) -> FermionOperator {
        self += &rhs;
        self
    }
}

impl Sub for FermionOperator {
    type Output = FermionOperator;
    fn sub(mut self, rhs: FermionOperator) -> FermionOperator {
        self -= &rhs;
        self
    }
}

impl AddAssign<&FermionOperator> for FermionOperator {
    fn add_assign(&mut self, rhs: &FermionOperator) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, *c);
        }
        self.prune(DEFAULT_PRUNE);
    }
}

impl SubAssign<&FermionOperator> for FermionOperator {
    fn sub_assign(&mut self, rhs: &FermionOperator) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, -*c);
        }
        self.prune(DEFAULT_PRUNE);
    }
}

impl Neg for &FermionOperator {
    type Output = FermionOperator;
    fn neg(self) -> FermionOperator {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn normal_order_anticommutation() {
        // [a_1, a_1†] -> 1 - n_1
        let op = normal_order(&[Ladder::Annihilate(0), Ladder::Create(0)], c(1.0)).unwrap();
        let expected = &FermionOperator::identity() - &FermionOperator::number(0);
        assert_eq!(op, expected);
    }

    #[test]
    fn normal_order_sorts_creators() {
        let op = normal_order(&[Ladder::Create(1), Ladder::Create(0)], c(1.0)).unwrap();
        assert_eq!(op, FermionOperator::from_term(TermKey::new(0b11, 0), c(-1.0)));
    }

    #[test]
    fn normal_order_four_operator_example() {
        // a_1 a_2 a_2† a_1† = 1 - n_1 - n_2 + a_1†a_2†a_2a_1
        let raw = [
            Ladder::Annihilate(0),
            Ladder::Annihilate(1),
            Ladder::Create(1),
            Ladder::Create(0),
        ];
        let op = normal_order(&raw, c(1.0)).unwrap();
        let expected = FermionOperator::from_terms([
            (TermKey::IDENTITY, c(1.0)),
            (TermKey::new(1, 1), c(-1.0)),
            (TermKey::new(2, 2), c(-1.0)),
            (TermKey::new(3, 3), c(1.0)),
        ]);
        assert_eq!(op, expected);
    }

    #[test]
    fn normal_order_capacity() {
        let raw = vec![Ladder::Create(0); 17];
        assert!(matches!(
            normal_order(&raw, c(1.0)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn identity_and_idempotent_number() {
        let b = FermionOperator::excitation(&[0, 2], &[1, 3], Complex64::new(0.3, -0.1));
        assert_eq!(FermionOperator::identity().multiply(&b).unwrap(), b);
        let n = FermionOperator::number(0);
        assert_eq!(n.multiply(&n).unwrap(), n);
    }

    #[test]
    fn number_ladder_commutator() {
        // [n_p, a_p†] = a_p†
        let comm = FermionOperator::number(2)
            .commutator(&FermionOperator::creation(2))
            .unwrap();
        assert_eq!(comm, FermionOperator::creation(2));
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = FermionOperator::excitation(&[0], &[1], c(0.7))
            + FermionOperator::excitation(&[1, 2], &[0, 2], c(-0.2));
        assert!(a.commutator(&a).unwrap().is_empty());
    }

    #[test]
    fn adjoint_examples() {
        let hop = FermionOperator::excitation(&[0], &[1], c(1.0));
        assert_eq!(hop.adjoint(), FermionOperator::excitation(&[1], &[0], c(1.0)));
        let ini = FermionOperator::number(0).scale(Complex64::new(0.0, 1.0));
        assert_eq!(ini.adjoint(), ini.scale_real(-1.0));
    }

    #[test]
    fn capacity_error_reports_partial_size() {
        let a = FermionOperator::number(0) + FermionOperator::number(1);
        let limits = AlgebraLimits {
            max_terms: 1,
            ..Default::default()
        };
        match a.multiply_with(&a, &limits) {
            Err(Error::Capacity { size, limit, .. }) => {
                assert!(size > limit);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let a = FermionOperator::excitation(&[0, 3], &[1, 2], Complex64::new(0.1, -2.5e-7))
            + FermionOperator::number(4).scale_real(-1.0 / 3.0)
            + FermionOperator::identity();
        let text = a.to_text();
        assert!(text.contains("c:1,4  a:2,3"));
        assert_eq!(FermionOperator::from_text(&text).unwrap(), a);
    }

    #[test]
    fn text_parse_error_names_line() {
        let err = FermionOperator::from_text("1.0 c:1 a:1\n2.0 c:x a:1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn relabel_permutes_indices() {
        let a = FermionOperator::excitation(&[0], &[1], c(1.0));
        let b = a.relabel(&[1, 0]).unwrap();
        assert_eq!(b, FermionOperator::excitation(&[1], &[0], c(1.0)));
    }
}
