//! Canonical creation/annihilation operator strings.
//!
//! A [`TermKey`] stores the creator and annihilator index sets as bit masks
//! (bit `p` = spin-orbital `p`, zero-based). The operator it denotes is the
//! excitation string
//!
//! ```text
//! E^{c1 c2 .. ck}_{r1 r2 .. rm} = a†_{c1} a†_{c2} .. a†_{ck} a_{rm} .. a_{r2} a_{r1}
//! ```
//!
//! with `c1 < c2 < ..` and `r1 < r2 < ..`. Creators appear in ascending order,
//! annihilators in descending order, so that `E^S_S` is exactly the product of
//! the number operators in `S` and the adjoint of `E^C_A` is `E^A_C`.

use std::fmt;

/// Largest spin-orbital count representable by a [`TermKey`].
pub const MAX_MODES: usize = 64;

/// Canonical key of a creation/annihilation operator string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TermKey {
    pub creators: u64,
    pub annihilators: u64,
}

/// One elementary ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    pub fn index(self) -> usize {
        match self {
            Ladder::Create(p) | Ladder::Annihilate(p) => p,
        }
    }

    pub fn key(self) -> TermKey {
        match self {
            Ladder::Create(p) => TermKey::new(1 << p, 0),
            Ladder::Annihilate(p) => TermKey::new(0, 1 << p),
        }
    }
}

#[inline]
fn bits_above(p: usize) -> u64 {
    if p >= 63 {
        0
    } else {
        !((1u64 << (p + 1)) - 1)
    }
}

#[inline]
pub(crate) fn bits_below(p: usize) -> u64 {
    (1u64 << p) - 1
}

/// Number of pairs `(x in xs, y in ys)` with `x > y`.
#[inline]
fn crossings(xs: u64, ys: u64) -> u32 {
    let mut count = 0;
    let mut rest = ys;
    while rest != 0 {
        let y = rest.trailing_zeros() as usize;
        count += (xs & bits_above(y)).count_ones();
        rest &= rest - 1;
    }
    count
}

#[inline]
fn parity_sign(n: u32) -> f64 {
    if n & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Iterates the set bits of a mask in ascending order.
pub fn mask_indices(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        }
    })
}

pub fn mask_from_indices(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &p| m | (1u64 << p))
}

impl TermKey {
    pub const IDENTITY: TermKey = TermKey {
        creators: 0,
        annihilators: 0,
    };

    pub const fn new(creators: u64, annihilators: u64) -> Self {
        Self {
            creators,
            annihilators,
        }
    }

    /// Canonicalizes `a†_{c[0]} a†_{c[1]} .. a_{a[last]} .. a_{a[0]}`, i.e. the
    /// excitation string `E^{c..}_{a..}` with arbitrarily ordered index lists.
    /// Returns `None` when an index repeats within either list.
    pub fn from_indices(creators: &[usize], annihilators: &[usize]) -> Option<(TermKey, f64)> {
        let (cmask, csign) = sort_sign(creators)?;
        let (amask, asign) = sort_sign(annihilators)?;
        Some((TermKey::new(cmask, amask), csign * asign))
    }

    pub fn is_identity(&self) -> bool {
        self.creators == 0 && self.annihilators == 0
    }

    /// Creators equal annihilators as sets: a product of number operators.
    pub fn is_diagonal(&self) -> bool {
        self.creators == self.annihilators
    }

    pub fn is_number_conserving(&self) -> bool {
        self.creators.count_ones() == self.annihilators.count_ones()
    }

    /// Many-body rank: the larger of the creator and annihilator counts.
    pub fn body_rank(&self) -> usize {
        self.creators.count_ones().max(self.annihilators.count_ones()) as usize
    }

    /// Union of all indices touched by the string.
    pub fn support(&self) -> u64 {
        self.creators | self.annihilators
    }

    /// Highest index touched, if any.
    pub fn max_index(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    pub fn adjoint(&self) -> TermKey {
        TermKey::new(self.annihilators, self.creators)
    }

    pub fn creator_indices(&self) -> Vec<usize> {
        mask_indices(self.creators).collect()
    }

    pub fn annihilator_indices(&self) -> Vec<usize> {
        mask_indices(self.annihilators).collect()
    }

    /// Elementary operators in left-to-right order.
    pub fn ladder_sequence(&self) -> Vec<Ladder> {
        let mut seq: Vec<Ladder> = mask_indices(self.creators).map(Ladder::Create).collect();
        let mut ann: Vec<Ladder> = mask_indices(self.annihilators)
            .map(Ladder::Annihilate)
            .collect();
        ann.reverse();
        seq.extend(ann);
        seq
    }

    /// Exact normal-ordered expansion of the product `self * other`.
    ///
    /// Each returned `(key, sign)` pair contributes `sign * E_key`; contraction
    /// terms come from `a_p a†_p = 1 - a†_p a_p`.
    pub fn product(&self, other: &TermKey) -> Vec<(TermKey, f64)> {
        let mut out = Vec::new();
        let left_ann: Vec<usize> = mask_indices(self.annihilators).collect();
        contract(
            &left_ann,
            0,
            other.creators,
            0,
            1.0,
            &mut |rest_creators, uncontracted, sign| {
                if self.creators & rest_creators != 0 || uncontracted & other.annihilators != 0 {
                    return;
                }
                let s = sign
                    * parity_sign(crossings(self.creators, rest_creators))
                    * parity_sign(crossings(other.annihilators, uncontracted));
                out.push((
                    TermKey::new(
                        self.creators | rest_creators,
                        uncontracted | other.annihilators,
                    ),
                    s,
                ));
            },
        );
        out
    }

    /// Action on an occupation-number basis state (bit p = occupation of
    /// spin-orbital p). Returns the target state and the Jordan-Wigner sign.
    pub fn apply_to_basis(&self, state: u64) -> Option<(u64, f64)> {
        let mut s = state;
        let mut sign = 1.0;
        // rightmost operator acts first: annihilators smallest index first
        for p in mask_indices(self.annihilators) {
            if s & (1 << p) == 0 {
                return None;
            }
            sign *= parity_sign((s & bits_below(p)).count_ones());
            s &= !(1 << p);
        }
        let creators: Vec<usize> = mask_indices(self.creators).collect();
        for &p in creators.iter().rev() {
            if s & (1 << p) != 0 {
                return None;
            }
            sign *= parity_sign((s & bits_below(p)).count_ones());
            s |= 1 << p;
        }
        Some((s, sign))
    }
}

/// Moves the annihilators `ann[idx..]` (ascending, rightmost first) through
/// the creator string `creators`, branching on every possible contraction.
fn contract(
    ann: &[usize],
    idx: usize,
    creators: u64,
    uncontracted: u64,
    sign: f64,
    emit: &mut dyn FnMut(u64, u64, f64),
) {
    if idx == ann.len() {
        emit(creators, uncontracted, sign);
        return;
    }
    let r = ann[idx];
    let pass = parity_sign(creators.count_ones());
    contract(ann, idx + 1, creators, uncontracted | (1 << r), sign * pass, emit);
    if creators & (1 << r) != 0 {
        let before = parity_sign((creators & bits_below(r)).count_ones());
        contract(ann, idx + 1, creators & !(1 << r), uncontracted, sign * before, emit);
    }
}

fn sort_sign(indices: &[usize]) -> Option<(u64, f64)> {
    let mut mask = 0u64;
    let mut inversions = 0u32;
    for (i, &p) in indices.iter().enumerate() {
        if mask & (1 << p) != 0 {
            return None;
        }
        mask |= 1 << p;
        inversions += indices[..i].iter().filter(|&&q| q > p).count() as u32;
    }
    Some((mask, parity_sign(inversions)))
}

impl fmt::Display for TermKey {
    /// Renders `E^{1,2}_{3,4}` with one-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let join = |m: u64| {
            mask_indices(m)
                .map(|p| (p + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "E^{{{}}}_{{{}}}", join(self.creators), join(self.annihilators))
    }
}
