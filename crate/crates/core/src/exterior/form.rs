use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::exterior::ExteriorError;
use crate::scalar::Scalar;

/// Largest supported model dimension (multi-indices are `u32` bitmasks).
pub const MAX_DIM: usize = 24;

/// A strictly increasing multi-index `i₁ < … < i_k`, stored as a bitmask
/// with bit `i - 1` set for index `i` (indices are 1-based).
///
/// Ordering is by cardinality, then lexicographic on the increasing
/// sequence, which is the canonical basis order of every degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    /// From 1-based indices; `None` unless strictly increasing and positive.
    pub fn from_sorted(indices: &[usize]) -> Option<Self> {
        let mut bits = 0u32;
        let mut prev = 0;
        for &i in indices {
            if i <= prev || i > 32 {
                return None;
            }
            bits |= 1 << (i - 1);
            prev = i;
        }
        Some(MultiIndex(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= 32 && self.0 & (1 << (i - 1)) != 0
    }

    /// The 1-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// `e^self ∧ e^other = sign · e^(self ∪ other)`, or `None` when they overlap.
    pub fn wedge(self, other: MultiIndex) -> Option<(MultiIndex, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // One transposition per pair (a ∈ self, b ∈ other) with a > b.
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let b = rest.trailing_zeros();
            swaps += (self.0 >> b).count_ones();
            rest &= rest - 1;
        }
        Some((MultiIndex(self.0 | other.0), swaps % 2 == 1))
    }

    /// Comma-separated 1-based indices, e.g. `"1,2,5"`; empty for degree 0.
    pub fn to_key(self) -> String {
        self.indices().iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn parse_key(key: &str) -> Option<Self> {
        let key = key.trim();
        if key.is_empty() {
            return Some(MultiIndex::EMPTY);
        }
        let mut idx = Vec::new();
        for part in key.split(',') {
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            idx.push(part.parse().ok()?);
        }
        MultiIndex::from_sorted(&idx)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (1 << diff.trailing_zeros()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.indices().iter().map(ToString::to_string).collect::<String>())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Canonical basis of k-forms in dimension `dim`, in lexicographic order.
pub fn basis(dim: usize, k: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(dim, k));
    let mut current: Vec<usize> = (1..=k).collect();
    if k > dim {
        return out;
    }
    loop {
        out.push(MultiIndex::from_sorted(&current).expect("increasing"));
        // Advance to the next combination in lexicographic order.
        let mut t = k;
        loop {
            if t == 0 {
                return out;
            }
            t -= 1;
            if current[t] < dim - (k - 1 - t) {
                current[t] += 1;
                for u in t + 1..k {
                    current[u] = current[u - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of `idx` in `basis(dim, idx.len())`.
pub fn basis_position(dim: usize, idx: MultiIndex) -> usize {
    let k = idx.len();
    let mut pos = 0;
    let mut prev = 0;
    for (t, &a) in idx.indices().iter().enumerate() {
        for v in prev + 1..a {
            pos += binomial(dim - v, k - t - 1);
        }
        prev = a;
    }
    pos
}

/// A homogeneous complex-valued form on the dual of a `dim`-dimensional Lie
/// algebra. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, Scalar>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, coeffs: BTreeMap::new() }
    }

    /// The constant function `c`.
    pub fn constant(dim: usize, c: Scalar) -> Self {
        Form::zero(dim, 0).with_term(MultiIndex::EMPTY, c)
    }

    /// `c · e^{i₁} ∧ … ∧ e^{i_k}` for arbitrary (not necessarily sorted)
    /// 1-based indices; repeated indices give the zero form.
    pub fn monomial(dim: usize, indices: &[usize], c: Scalar) -> Result<Self, ExteriorError> {
        let mut acc = (MultiIndex::EMPTY, false);
        for &i in indices {
            if i == 0 || i > dim {
                return Err(ExteriorError::IndexOutOfRange { index: i, dim });
            }
            let single = MultiIndex::from_sorted(&[i]).expect("positive");
            match acc.0.wedge(single) {
                Some((m, s)) => acc = (m, acc.1 ^ s),
                None => return Ok(Form::zero(dim, indices.len())),
            }
        }
        let c = if acc.1 { -c } else { c };
        Ok(Form::zero(dim, indices.len()).with_term(acc.0, c))
    }

    /// Shorthand for a unit monomial; panics on bad indices.
    pub fn e(dim: usize, indices: &[usize]) -> Self {
        Form::monomial(dim, indices, Scalar::one()).expect("valid basis monomial")
    }

    fn with_term(mut self, idx: MultiIndex, c: Scalar) -> Self {
        self.add_term(idx, c);
        self
    }

    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Scalar)>,
    ) -> Result<Self, ExteriorError> {
        let mut f = Form::zero(dim, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(ExteriorError::DegreeMismatch { expected: degree, found: idx.len() });
            }
            if idx.max_index() > dim {
                return Err(ExteriorError::IndexOutOfRange { index: idx.max_index(), dim });
            }
            f.add_term(idx, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, idx: MultiIndex, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(idx).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(Scalar::is_real)
    }

    pub fn coeff(&self, idx: MultiIndex) -> Scalar {
        self.coeffs.get(&idx).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, &Scalar)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient vector in the canonical basis of `degree`-forms.
    pub fn to_vector(&self) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); binomial(self.dim, self.degree)];
        for (idx, c) in &self.coeffs {
            v[basis_position(self.dim, *idx)] = c.clone();
        }
        v
    }

    pub fn from_vector(dim: usize, degree: usize, v: &[Scalar]) -> Self {
        let b = basis(dim, degree);
        assert_eq!(b.len(), v.len(), "vector length does not match basis size");
        let mut f = Form::zero(dim, degree);
        for (idx, c) in b.into_iter().zip(v) {
            f.add_term(idx, c.clone());
        }
        f
    }

    fn check_same_space(&self, other: &Form) -> Result<(), ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.degree != other.degree {
            return Err(ExteriorError::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            out.add_term(*idx, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, ExteriorError> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.dim, self.degree);
        for (idx, x) in &self.coeffs {
            out.add_term(*idx, x * c);
        }
        out
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::from_int(-1))
    }

    /// Complex conjugation of the coefficients (the basis forms are real).
    pub fn conj(&self) -> Form {
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut out = Form::zero(self.dim, self.degree + other.degree);
        if out.degree > self.dim {
            return Ok(out);
        }
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                if let Some((m, negative)) = a.wedge(*b) {
                    let p = x * y;
                    out.add_term(m, if negative { -p } else { p });
                }
            }
        }
        Ok(out)
    }

    /// `self ∧ self ∧ … ` (`k` factors); `k = 0` gives the constant 1.
    pub fn wedge_power(&self, k: usize) -> Form {
        let mut acc = Form::constant(self.dim, Scalar::one());
        for _ in 0..k {
            acc = acc.wedge(self).expect("same dimension");
        }
        acc
    }

    /// Interior product with the `v`-th basis vector (1-based).
    pub fn contract(&self, v: usize) -> Result<Form, ExteriorError> {
        if v == 0 || v > self.dim {
            return Err(ExteriorError::IndexOutOfRange { index: v, dim: self.dim });
        }
        if self.degree == 0 {
            return Ok(Form::zero(self.dim, 0));
        }
        let bit = 1u32 << (v - 1);
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.coeffs {
            if idx.bits() & bit == 0 {
                continue;
            }
            // Moving e^v to the front passes the indices below it.
            let below = (idx.bits() & (bit - 1)).count_ones();
            let rest = MultiIndex::from_bits(idx.bits() & !bit);
            out.add_term(rest, if below % 2 == 1 { -c } else { c.clone() });
        }
        Ok(out)
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.coeffs.iter().map(|(k, v)| format!("({v})·{k:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Wedge product; errors on dimension mismatch.
pub fn wedge(a: &Form, b: &Form) -> Result<Form, ExteriorError> {
    a.wedge(b)
}

/// Interior product `i_{e_v} a`.
pub fn contraction(v: usize, a: &Form) -> Result<Form, ExteriorError> {
    a.contract(v)
}

/// The scalar `c` with `top = c · vol`.
pub fn integrate(top: &Form, vol: &Form) -> Result<Scalar, ExteriorError> {
    let dim = vol.dim();
    if top.dim() != dim {
        return Err(ExteriorError::DimensionMismatch { left: top.dim(), right: dim });
    }
    if vol.degree() != dim {
        return Err(ExteriorError::DegreeMismatch { expected: dim, found: vol.degree() });
    }
    if top.degree() != dim {
        return Err(ExteriorError::DegreeMismatch { expected: dim, found: top.degree() });
    }
    let full = MultiIndex::from_bits(if dim == 32 { u32::MAX } else { (1u32 << dim) - 1 });
    let v = vol.coeff(full);
    if v.is_zero() {
        return Err(ExteriorError::ZeroVolume);
    }
    Ok(&top.coeff(full) / &v)
}
