//! Binary polynomials: univariate arithmetic in F2[π], reduction modulo
//! π^N + 1, factorization of π^N + 1, divisor enumeration, and bivariate
//! polynomials in F2[x, y]/(x^l + 1, y^m + 1) with the π = xy bijection
//! available when gcd(l, m) = 1.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{flip_bit, get_bit, popcount, words_for, BinMatrix};

/// A polynomial over GF(2), stored as a coefficient bitset.
///
/// The word vector never carries trailing zero words, so the zero polynomial
/// is the empty vector and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    words: Vec<u64>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(e: usize) -> Self {
        let mut words = vec![0; e / 64 + 1];
        flip_bit(&mut words, e);
        Self { words }
    }

    /// Sum of `π^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let max = exps.iter().copied().max().unwrap_or(0);
        let mut words = vec![0; max / 64 + 1];
        for &e in exps {
            flip_bit(&mut words, e);
        }
        Self::from_words(words)
    }

    fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Self { words }
    }

    /// `π^n + 1`.
    pub fn circulant_modulus(n: usize) -> Self {
        Self::from_exponents(&[0, n])
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn coeff(&self, e: usize) -> bool {
        e / 64 < self.words.len() && get_bit(&self.words, e)
    }

    /// Exponents with a nonzero coefficient, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// Number of nonzero terms.
    pub fn weight(&self) -> usize {
        popcount(&self.words)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let mut words = vec![0u64; n];
        for (i, w) in words.iter_mut().enumerate() {
            *w = self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0);
        }
        Self::from_words(words)
    }

    fn xor_shifted(acc: &mut Vec<u64>, src: &[u64], shift: usize) {
        let (ws, bs) = (shift / 64, shift % 64);
        let need = src.len() + ws + 1;
        if acc.len() < need {
            acc.resize(need, 0);
        }
        for (i, &w) in src.iter().enumerate() {
            acc[i + ws] ^= w << bs;
            if bs != 0 {
                acc[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut acc = vec![0u64; self.words.len() + other.words.len()];
        for e in self.exponents() {
            Self::xor_shifted(&mut acc, &other.words, e);
        }
        Self::from_words(acc)
    }

    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroDivisor)?;
        let mut rem = self.words.clone();
        let mut quot = vec![0u64; words_for(self.degree().map_or(1, |d| d + 1))];
        loop {
            let r = Self::from_words(rem.clone());
            match r.degree() {
                Some(rd) if rd >= dd => {
                    let shift = rd - dd;
                    flip_bit(&mut quot, shift);
                    Self::xor_shifted(&mut rem, &divisor.words, shift);
                    rem = Self::from_words(rem).words;
                }
                _ => return Ok((Self::from_words(quot), r)),
            }
        }
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Greatest common divisor; `gcd(0, q) = q`. Monic by construction over GF(2).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// Folds exponents modulo `n`, i.e. reduces modulo `π^n + 1`.
    pub fn reduce_circulant(&self, n: usize) -> Self {
        assert!(n >= 1);
        let mut words = vec![0u64; words_for(n)];
        for e in self.exponents() {
            flip_bit(&mut words, e % n);
        }
        Self::from_words(words)
    }

    pub fn mulmod(&self, other: &Self, n: usize) -> Self {
        self.mul(other).reduce_circulant(n)
    }

    /// Multiplies by `π^shift` inside F2[π]/(π^n + 1).
    pub fn rotate(&self, shift: usize, n: usize) -> Self {
        let exps: Vec<usize> = self.exponents().iter().map(|e| (e + shift) % n).collect();
        Self::from_exponents(&exps)
    }

    /// Substitutes `π -> π^{-1}` inside F2[π]/(π^n + 1).
    pub fn reciprocal_circulant(&self, n: usize) -> Self {
        let exps: Vec<usize> = self.exponents().iter().map(|e| (n - e % n) % n).collect();
        Self::from_exponents(&exps)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Renders with the given variable letter, ascending exponents.
    pub fn to_text(&self, var: char) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.exponents()
            .iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                1 => var.to_string(),
                e => format!("{var}{e}"),
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Parses the text format `1+p+p2` (letter `p` or `π`, case-insensitive).
    pub fn parse(text: &str) -> Result<Self> {
        let monomials = parse_monomials(text, &['p', 'π'])?;
        let mut exps = Vec::new();
        for mono in monomials {
            exps.push(mono.iter().map(|(_, e)| e).sum());
        }
        Ok(Self::from_exponents(&exps))
    }
}

impl Ord for UniPoly {
    /// Degree first, then coefficients read as a binary integer.
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for UniPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({})", self.to_text('p'))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text('p'))
    }
}

impl FromStr for UniPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `gcd(a, b, π^n + 1)`.
pub fn circulant_gcd(a: &UniPoly, b: &UniPoly, n: usize) -> UniPoly {
    a.gcd(b).gcd(&UniPoly::circulant_modulus(n))
}

/// Splits a sum of monomials into `(letter, exponent)` lists. `1` is the
/// empty monomial.
fn parse_monomials(text: &str, letters: &[char]) -> Result<Vec<Vec<(char, usize)>>> {
    let err = |reason: &str| Error::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let cleaned: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    if cleaned.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut out = Vec::new();
    for term in cleaned.split('+') {
        if term.is_empty() {
            return Err(err("empty term"));
        }
        if term == "1" {
            out.push(Vec::new());
            continue;
        }
        let mut mono = Vec::new();
        let mut chars = term.chars().peekable();
        while let Some(c) = chars.next() {
            if !letters.contains(&c) {
                return Err(err(&format!("unexpected character {c:?}")));
            }
            if chars.peek() == Some(&'^') {
                chars.next();
            }
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let e = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| err("bad exponent"))?
            };
            mono.push((c, e));
        }
        out.push(mono);
    }
    Ok(out)
}

/// Complete factorization of `π^N + 1` into irreducibles with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: usize,
    pub factors: Vec<(UniPoly, usize)>,
}

impl Factorization {
    /// Multiplies the factors back out.
    pub fn product(&self) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::one(), |acc, (f, mult)| acc.mul(&f.pow(*mult)))
    }
}

/// 2-cyclotomic cosets modulo an odd `n`, each sorted, ordered by least element.
pub fn cyclotomic_cosets(n: usize) -> Vec<Vec<usize>> {
    assert!(n % 2 == 1, "cosets are taken modulo an odd number");
    let mut seen = vec![false; n];
    let mut cosets = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut coset = Vec::new();
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            coset.push(c);
            c = (2 * c) % n;
        }
        coset.sort_unstable();
        cosets.push(coset);
    }
    cosets
}

/// Factors `π^N + 1` over GF(2).
///
/// Writes `N = 2^s N'` with `N'` odd, splits the squarefree `π^{N'} + 1` with
/// Berlekamp's algorithm, and raises every factor to multiplicity `2^s`. The
/// factor count and degrees are checked against the 2-cyclotomic cosets of `N'`.
pub fn factorize_circulant(n: usize) -> Factorization {
    assert!(n >= 1, "π^0 + 1 = 0 has no factorization");
    let mut odd = n;
    let mut mult = 1;
    while odd.is_multiple_of(2) {
        odd /= 2;
        mult *= 2;
    }
    let mut factors = berlekamp(&UniPoly::circulant_modulus(odd));
    factors.sort();
    let mut expected: Vec<usize> = cyclotomic_cosets(odd).iter().map(Vec::len).collect();
    let mut got: Vec<usize> = factors.iter().map(|f| f.degree().unwrap()).collect();
    expected.sort_unstable();
    got.sort_unstable();
    assert_eq!(
        expected, got,
        "factor degrees disagree with cyclotomic cosets of {odd}"
    );
    Factorization {
        n,
        factors: factors.into_iter().map(|f| (f, mult)).collect(),
    }
}

/// Berlekamp factorization of a squarefree polynomial over GF(2).
fn berlekamp(f: &UniPoly) -> Vec<UniPoly> {
    let d = f.degree().expect("nonzero");
    if d <= 1 {
        return vec![f.clone()];
    }
    // Row i of Q - I holds π^{2i} mod f minus π^i; the Berlekamp subalgebra is
    // its left kernel.
    let mut q_minus_i = BinMatrix::zeros(d, d);
    let step = UniPoly::monomial(2).rem(f).unwrap();
    let mut power = UniPoly::one();
    for i in 0..d {
        for e in power.exponents() {
            q_minus_i.toggle(i, e);
        }
        q_minus_i.toggle(i, i);
        power = power.mul(&step).rem(f).unwrap();
    }
    let basis = q_minus_i.transpose().kernel_basis();
    let count = basis.rows();
    let mut factors = vec![f.clone()];
    for r in 0..basis.rows() {
        if factors.len() == count {
            break;
        }
        let v = UniPoly::from_exponents(&basis.row_support(r));
        if v.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(factors.len() + 1);
        for h in factors {
            if h.degree() == Some(1) {
                next.push(h);
                continue;
            }
            let g = h.gcd(&v.rem(&h).unwrap());
            match g.degree() {
                Some(gd) if gd > 0 && gd < h.degree().unwrap() => {
                    let (other, _) = h.div_rem(&g).unwrap();
                    next.push(g);
                    next.push(other);
                }
                _ => next.push(h),
            }
        }
        factors = next;
    }
    debug_assert_eq!(factors.len(), count);
    factors
}

/// Ben-Or irreducibility test over GF(2).
pub fn is_irreducible(f: &UniPoly) -> bool {
    let Some(d) = f.degree() else {
        return false;
    };
    if d == 0 {
        return false;
    }
    let x = UniPoly::monomial(1);
    let mut power = x.rem(f).unwrap();
    for _ in 0..d / 2 {
        power = power.mul(&power).rem(f).unwrap();
        if f.gcd(&power.add(&x)).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// Every monic divisor of `π^N + 1` with degree in `[min_deg, max_deg]`, each
/// once, sorted by degree and then by coefficients.
pub fn divisors(f: &Factorization, min_deg: usize, max_deg: usize) -> Vec<UniPoly> {
    fn walk(
        factors: &[(UniPoly, usize)],
        acc: UniPoly,
        acc_deg: usize,
        min_deg: usize,
        max_deg: usize,
        out: &mut Vec<UniPoly>,
    ) {
        let Some(((poly, mult), rest)) = factors.split_first() else {
            if acc_deg >= min_deg {
                out.push(acc);
            }
            return;
        };
        let deg = poly.degree().unwrap();
        let mut cur = acc;
        let mut cur_deg = acc_deg;
        for k in 0..=*mult {
            if k > 0 {
                cur = cur.mul(poly);
                cur_deg += deg;
            }
            if cur_deg > max_deg {
                break;
            }
            walk(rest, cur.clone(), cur_deg, min_deg, max_deg, out);
        }
    }
    let mut out = Vec::new();
    if min_deg <= max_deg {
        walk(&f.factors, UniPoly::one(), 0, min_deg, max_deg, &mut out);
    }
    out.sort();
    out
}

/// A polynomial in F2[x, y]/(x^l + 1, y^m + 1): a set of exponent pairs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BivPoly {
    l: usize,
    m: usize,
    terms: BTreeSet<(usize, usize)>,
}

impl BivPoly {
    /// Reduces exponents modulo `(l, m)`; coinciding terms cancel in pairs.
    pub fn from_terms(l: usize, m: usize, terms: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set = BTreeSet::new();
        for (i, j) in terms {
            let t = (i % l, j % m);
            if !set.remove(&t) {
                set.insert(t);
            }
        }
        Self { l, m, terms: set }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.terms.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a(x^{-1}, y^{-1})`, the polynomial of the transposed matrix.
    pub fn transpose(&self) -> Self {
        let (l, m) = (self.l, self.m);
        Self::from_terms(l, m, self.terms().map(|(i, j)| ((l - i) % l, (m - j) % m)))
    }

    pub fn shift(&self, di: usize, dj: usize) -> Self {
        Self::from_terms(self.l, self.m, self.terms().map(|(i, j)| (i + di, j + dj)))
    }

    pub fn parse(text: &str, l: usize, m: usize) -> Result<Self> {
        let monomials = parse_monomials(text, &['x', 'y'])?;
        let terms = monomials.into_iter().map(|mono| {
            mono.iter().fold((0, 0), |(i, j), &(c, e)| match c {
                'x' => (i + e, j),
                _ => (i, j + e),
            })
        });
        Ok(Self::from_terms(l, m, terms))
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let part = |c: char, e: usize| match e {
            0 => String::new(),
            1 => c.to_string(),
            e => format!("{c}{e}"),
        };
        self.terms()
            .map(|(i, j)| {
                let s = format!("{}{}", part('x', i), part('y', j));
                if s.is_empty() {
                    "1".into()
                } else {
                    s
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Debug for BivPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivPoly[{}x{}]({})", self.l, self.m, self.to_text())
    }
}

impl fmt::Display for BivPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn gcd_usize(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The unique `t` in `[0, lm)` with `t ≡ i (mod l)` and `t ≡ j (mod m)`.
pub fn crt_exponent(i: usize, j: usize, l: usize, m: usize) -> Result<usize> {
    if gcd_usize(l, m) != 1 {
        return Err(Error::NotCoprime { l, m });
    }
    (0..m)
        .map(|k| i % l + k * l)
        .find(|t| t % m == j % m)
        .ok_or_else(|| Error::Integrity("CRT solution not found".into()))
}

/// Rewrites every `x^i y^j` as `π^t` with `π = xy`.
pub fn biv_to_uni(p: &BivPoly) -> Result<UniPoly> {
    let exps = p
        .terms()
        .map(|(i, j)| crt_exponent(i, j, p.l, p.m))
        .collect::<Result<Vec<_>>>()?;
    Ok(UniPoly::from_exponents(&exps))
}

/// Maps `π^t` to `x^(t mod l) y^(t mod m)`.
pub fn uni_to_biv(p: &UniPoly, l: usize, m: usize) -> Result<BivPoly> {
    if gcd_usize(l, m) != 1 {
        return Err(Error::NotCoprime { l, m });
    }
    let n = l * m;
    let reduced = p.reduce_circulant(n);
    Ok(BivPoly::from_terms(
        l,
        m,
        reduced.exponents().into_iter().map(|t| (t % l, t % m)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> UniPoly {
        UniPoly::parse(s).unwrap()
    }

    #[test]
    fn ring_basics() {
        let a = p("1+p+p2");
        assert!(a.add(&a).is_zero());
        assert_eq!(p("p14").mulmod(&p("p"), 15), UniPoly::one());
        assert_eq!(p("1+p").mulmod(&p("1+p+p2"), 15), p("1+p3"));
        assert_eq!(UniPoly::zero().degree(), None);
        assert_eq!(a.degree(), Some(2));
        assert_eq!(p("p70+1").degree(), Some(70));
        assert_eq!(p("P^2 + p").to_text('p'), "p+p2");
        assert!(UniPoly::parse("1+q").is_err());
        assert!(UniPoly::parse("").is_err());
        assert!(UniPoly::parse("1++p").is_err());
    }

    #[test]
    fn gcd_examples() {
        let g = circulant_gcd(&p("1+p+p2"), &p("p+p3+p8"), 15);
        assert_eq!(g, p("1+p+p2"));
        assert_eq!(p("1+p3").gcd(&UniPoly::zero()), p("1+p3"));
        assert_eq!(UniPoly::zero().gcd(&p("1+p")), p("1+p"));
        assert_eq!(p("1+p2").gcd(&p("1+p")), p("1+p"));
        assert!(matches!(
            p("p").rem(&UniPoly::zero()),
            Err(Error::ZeroDivisor)
        ));
    }

    #[test]
    fn small_factorizations() {
        let f3 = factorize_circulant(3);
        assert_eq!(f3.factors, vec![(p("1+p"), 1), (p("1+p+p2"), 1)]);
        let f2 = factorize_circulant(2);
        assert_eq!(f2.factors, vec![(p("1+p"), 2)]);
        let f15 = factorize_circulant(15);
        let mut got: Vec<_> = f15.factors.iter().map(|(f, _)| f.clone()).collect();
        let mut want = vec![
            p("1+p"),
            p("1+p+p2"),
            p("1+p+p2+p3+p4"),
            p("1+p+p4"),
            p("1+p3+p4"),
        ];
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(f15.product(), UniPoly::circulant_modulus(15));
    }

    #[test]
    fn factorization_product_and_irreducibility_up_to_200() {
        for n in 1..=200 {
            let f = factorize_circulant(n);
            assert_eq!(f.product(), UniPoly::circulant_modulus(n), "N = {n}");
            for (g, _) in &f.factors {
                assert!(is_irreducible(g), "N = {n}: {g} is reducible");
            }
        }
    }

    fn brute_irreducible(f: &UniPoly) -> bool {
        let d = f.degree().unwrap();
        for bits in 2u64..(1 << (d / 2 + 1)) {
            let g = UniPoly::from_exponents(
                &(0..64).filter(|i| bits >> i & 1 == 1).collect::<Vec<_>>(),
            );
            if g.degree().unwrap() >= 1 && f.rem(&g).unwrap().is_zero() {
                return false;
            }
        }
        true
    }

    #[test]
    fn ben_or_matches_trial_division() {
        for bits in 2u64..(1 << 11) {
            let f = UniPoly::from_exponents(
                &(0..11).filter(|i| bits >> i & 1 == 1).collect::<Vec<_>>(),
            );
            if f.degree().unwrap() == 0 {
                continue;
            }
            assert_eq!(is_irreducible(&f), brute_irreducible(&f), "{f}");
        }
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(
            divisors(&factorize_circulant(3), 1, 2),
            vec![p("1+p"), p("1+p+p2")]
        );
        assert_eq!(
            divisors(&factorize_circulant(2), 1, 2),
            vec![p("1+p"), p("1+p2")]
        );
        for n in [1, 6, 15, 63] {
            assert_eq!(
                divisors(&factorize_circulant(n), 0, 0),
                vec![UniPoly::one()]
            );
        }
        // 5 irreducible factors of π^15+1 give 2^5 divisors in total.
        let all = divisors(&factorize_circulant(15), 0, 15);
        assert_eq!(all.len(), 32);
        let modulus = UniPoly::circulant_modulus(15);
        assert!(all.iter().all(|g| modulus.rem(g).unwrap().is_zero()));
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn cosets_mod_15() {
        let c = cyclotomic_cosets(15);
        let sizes: Vec<usize> = c.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 4, 4, 2, 4]);
    }

    #[test]
    fn biv_parse_and_print() {
        let a = BivPoly::parse("1+y2+y4", 3, 9).unwrap();
        assert_eq!(a.to_text(), "1+y2+y4");
        let b = BivPoly::parse("y^3 + X + x2", 3, 9).unwrap();
        assert_eq!(b.to_text(), "y3+x+x2");
        let c = BivPoly::parse("x2y3+x5", 3, 9).unwrap();
        assert_eq!(c.terms().collect::<Vec<_>>(), vec![(2, 0), (2, 3)]);
        // x^3 = 1 when l = 3, so the two terms cancel.
        assert!(BivPoly::parse("1+x3", 3, 9).unwrap().is_empty());
        assert!(BivPoly::parse("1+z", 3, 9).is_err());
    }

    #[test]
    fn crt_examples() {
        let l = 3;
        let m = 5;
        let x = BivPoly::from_terms(l, m, [(1, 0)]);
        assert_eq!(biv_to_uni(&x).unwrap(), UniPoly::monomial(10));
        assert_eq!(
            biv_to_uni(&BivPoly::from_terms(l, m, [(0, 0)])).unwrap(),
            UniPoly::one()
        );
        assert_eq!(
            biv_to_uni(&BivPoly::from_terms(l, m, [(1, 1)])).unwrap(),
            UniPoly::monomial(1)
        );
        assert!(matches!(
            biv_to_uni(&BivPoly::from_terms(3, 6, [(1, 0)])),
            Err(Error::NotCoprime { .. })
        ));
        // Matrix oracle: (S_3 ⊗ S_5)^10 = S_3 ⊗ I_5.
        let pi = BinMatrix::shift(3).kron(&BinMatrix::shift(5));
        let mut power = BinMatrix::identity(15);
        for _ in 0..10 {
            power = power.matmul(&pi).unwrap();
        }
        assert_eq!(power, BinMatrix::shift(3).kron(&BinMatrix::identity(5)));
    }

    fn coprime_pair() -> impl Strategy<Value = (usize, usize)> {
        (2usize..=15, 2usize..=15).prop_filter("coprime, lm <= 105", |(l, m)| {
            gcd_usize(*l, *m) == 1 && l * m <= 105
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn crt_round_trip(((l, m), raw) in coprime_pair().prop_flat_map(|(l, m)| {
            (Just((l, m)), proptest::collection::vec((0..l, 0..m), 1..8))
        })) {
            let b = BivPoly::from_terms(l, m, raw);
            let u = biv_to_uni(&b).unwrap();
            prop_assert_eq!(uni_to_biv(&u, l, m).unwrap(), b);
        }

        #[test]
        fn gcd_divides_and_is_greatest(a in proptest::collection::vec(0usize..40, 1..6),
                                       b in proptest::collection::vec(0usize..40, 1..6),
                                       c in proptest::collection::vec(0usize..12, 1..4)) {
            let common = UniPoly::from_exponents(&c);
            let a = UniPoly::from_exponents(&a).mul(&common);
            let b = UniPoly::from_exponents(&b).mul(&common);
            prop_assume!(!a.is_zero() && !b.is_zero() && !common.is_zero());
            let g = a.gcd(&b);
            prop_assert!(a.rem(&g).unwrap().is_zero());
            prop_assert!(b.rem(&g).unwrap().is_zero());
            prop_assert!(g.rem(&common).unwrap().is_zero());
        }
    }
}
