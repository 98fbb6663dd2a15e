//! The closed family of coefficient rings: ℤ, ℤ/m, 𝔽_p and univariate
//! quotients `R[a]/(f)` of any member by a polynomial whose leading
//! coefficient is a unit.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::RingError;

/// Upper bound on the number of monic trial divisors enumerated when
/// certifying that a quotient of a prime field is a field.
const IRREDUCIBILITY_SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Integers,
    IntegersMod(BigInt),
    PrimeField(BigInt),
    UnivariateQuotient {
        base: Box<BaseRing>,
        var: String,
        /// Canonical coefficients over `base`, constant term first.
        modulus: Vec<Scalar>,
    },
}

/// An element of some [`BaseRing`], always held in the canonical form that
/// ring dictates: residues in `[0, m)`, quotient elements as trimmed
/// coefficient lists of degree below the modulus degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Int(BigInt),
    Poly(Vec<Scalar>),
}

impl BaseRing {
    pub fn integers_mod(m: impl Into<BigInt>) -> Result<Self, RingError> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(RingError::InvalidBase(format!("modulus {m} is below 2")));
        }
        Ok(BaseRing::IntegersMod(m))
    }

    pub fn prime_field(p: impl Into<BigInt>) -> Result<Self, RingError> {
        let p = p.into();
        if !is_prime(&p) {
            return Err(RingError::InvalidBase(format!("{p} is not prime")));
        }
        Ok(BaseRing::PrimeField(p))
    }

    /// `base[var]/(modulus)`; the modulus is given constant term first and
    /// must have positive degree and a unit leading coefficient.
    pub fn quotient(base: BaseRing, var: &str, modulus: Vec<Scalar>) -> Result<Self, RingError> {
        if var.is_empty() || !var.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(RingError::InvalidBase(format!("bad variable name {var:?}")));
        }
        if base.variables().iter().any(|v| v == var) {
            return Err(RingError::InvalidBase(format!("variable {var} used twice")));
        }
        let modulus = base.poly_trim(modulus.iter().map(|c| base.normalize(c)).collect());
        if modulus.len() < 2 {
            return Err(RingError::InvalidBase("modulus must have positive degree".into()));
        }
        if !base.is_unit(modulus.last().expect("nonempty")) {
            return Err(RingError::InvalidBase(
                "modulus must have a unit leading coefficient".into(),
            ));
        }
        Ok(BaseRing::UnivariateQuotient {
            base: Box::new(base),
            var: var.to_string(),
            modulus,
        })
    }

    /// Quotient variable names, innermost first.
    pub fn variables(&self) -> Vec<String> {
        match self {
            BaseRing::UnivariateQuotient { base, var, .. } => {
                let mut v = base.variables();
                v.push(var.clone());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            BaseRing::UnivariateQuotient { .. } => Scalar::Poly(Vec::new()),
            _ => Scalar::Int(BigInt::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_int(BigInt::one())
    }

    pub fn from_int(&self, n: BigInt) -> Scalar {
        match self {
            BaseRing::Integers => Scalar::Int(n),
            BaseRing::IntegersMod(m) | BaseRing::PrimeField(m) => Scalar::Int(n.mod_floor(m)),
            BaseRing::UnivariateQuotient { base, .. } => {
                let c = base.from_int(n);
                Scalar::Poly(base.poly_trim(vec![c]))
            }
        }
    }

    /// The generator of the outermost quotient, or `None` for integer rings.
    pub fn generator(&self) -> Option<Scalar> {
        match self {
            BaseRing::UnivariateQuotient { base, modulus, .. } => {
                let x = vec![base.zero(), base.one()];
                Some(Scalar::Poly(self.reduce(base, modulus, x)))
            }
            _ => None,
        }
    }

    /// Embeds an element of the nested base `level` steps down, or the
    /// generator named `name` at whatever depth it lives.
    pub fn named_generator(&self, name: &str) -> Option<Scalar> {
        match self {
            BaseRing::UnivariateQuotient { base, var, .. } => {
                if var == name {
                    self.generator()
                } else {
                    base.named_generator(name).map(|s| self.embed(&s))
                }
            }
            _ => None,
        }
    }

    /// Lifts an element of the immediate base ring.
    pub fn embed(&self, s: &Scalar) -> Scalar {
        match self {
            BaseRing::UnivariateQuotient { base, .. } => Scalar::Poly(base.poly_trim(vec![s.clone()])),
            _ => s.clone(),
        }
    }

    pub fn normalize(&self, s: &Scalar) -> Scalar {
        match (self, s) {
            (BaseRing::UnivariateQuotient { base, modulus, .. }, Scalar::Poly(c)) => {
                let c = c.iter().map(|x| base.normalize(x)).collect();
                Scalar::Poly(self.reduce(base, modulus, c))
            }
            (BaseRing::UnivariateQuotient { .. }, Scalar::Int(n)) => self.from_int(n.clone()),
            (_, Scalar::Int(n)) => self.from_int(n.clone()),
            (_, Scalar::Poly(c)) => {
                // a constant polynomial over an integer ring collapses
                match c.as_slice() {
                    [] => self.zero(),
                    [x] => self.normalize(x),
                    _ => panic!("polynomial scalar given to an integer ring"),
                }
            }
        }
    }

    pub fn is_zero(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Int(n) => n.is_zero(),
            Scalar::Poly(c) => c.is_empty(),
        }
    }

    pub fn add(&self, x: &Scalar, y: &Scalar) -> Scalar {
        match (self, x, y) {
            (BaseRing::UnivariateQuotient { base, .. }, Scalar::Poly(a), Scalar::Poly(b)) => {
                Scalar::Poly(base.poly_add(a, b))
            }
            (_, Scalar::Int(a), Scalar::Int(b)) => self.from_int(a + b),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, x: &Scalar) -> Scalar {
        match (self, x) {
            (BaseRing::UnivariateQuotient { base, .. }, Scalar::Poly(a)) => {
                Scalar::Poly(a.iter().map(|c| base.neg(c)).collect())
            }
            (_, Scalar::Int(a)) => self.from_int(-a),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Scalar, y: &Scalar) -> Scalar {
        match (self, x, y) {
            (BaseRing::UnivariateQuotient { base, modulus, .. }, Scalar::Poly(a), Scalar::Poly(b)) => {
                let prod = base.poly_mul(a, b);
                Scalar::Poly(self.reduce(base, modulus, prod))
            }
            (_, Scalar::Int(a), Scalar::Int(b)) => self.from_int(a * b),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn pow(&self, x: &Scalar, mut e: u64) -> Scalar {
        let mut acc = self.one();
        let mut b = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, x: &Scalar) -> bool {
        match (self, x) {
            (BaseRing::Integers, Scalar::Int(n)) => n.abs().is_one(),
            (BaseRing::IntegersMod(m) | BaseRing::PrimeField(m), Scalar::Int(n)) => n.gcd(m).is_one(),
            (BaseRing::UnivariateQuotient { base, .. }, Scalar::Poly(_)) => {
                // x is a unit iff multiplication by x, an endomorphism of a
                // free module of finite rank, has unit determinant
                let m = self.multiplication_matrix(x);
                base.is_unit(&base.determinant(&m))
            }
            _ => false,
        }
    }

    pub fn inverse(&self, x: &Scalar) -> Option<Scalar> {
        match (self, x) {
            (BaseRing::Integers, Scalar::Int(n)) => n.abs().is_one().then(|| x.clone()),
            (BaseRing::IntegersMod(m) | BaseRing::PrimeField(m), Scalar::Int(n)) => {
                let e = n.extended_gcd(m);
                e.gcd.is_one().then(|| self.from_int(e.x))
            }
            (BaseRing::UnivariateQuotient { base, .. }, Scalar::Poly(_)) => {
                let m = self.multiplication_matrix(x);
                let det_inv = base.inverse(&base.determinant(&m))?;
                // first column of the adjugate, scaled by det^{-1}
                let d = m.len();
                let coeffs: Vec<Scalar> = (0..d)
                    .map(|i| {
                        let minor = minor_matrix(&m, 0, i);
                        let c = base.determinant(&minor);
                        let c = if i % 2 == 1 { base.neg(&c) } else { c };
                        base.mul(&c, &det_inv)
                    })
                    .collect();
                Some(Scalar::Poly(base.poly_trim(coeffs)))
            }
            _ => None,
        }
    }

    /// Whether this ring can be certified an integral domain.
    pub fn certify_domain(&self) -> Result<bool, RingError> {
        match self {
            BaseRing::Integers | BaseRing::PrimeField(_) => Ok(true),
            BaseRing::IntegersMod(m) => Ok(is_prime(m)),
            BaseRing::UnivariateQuotient { base, modulus, .. } => {
                if modulus.len() == 2 {
                    return base.certify_domain();
                }
                let p = match base.as_ref() {
                    BaseRing::PrimeField(p) => p.clone(),
                    BaseRing::IntegersMod(m) if is_prime(m) => m.clone(),
                    _ => {
                        return Err(RingError::UnsupportedBase(format!(
                            "cannot decide whether {self} is an integral domain"
                        )))
                    }
                };
                base.is_irreducible_over_prime_field(&p, modulus).map_err(|_| {
                    RingError::UnsupportedBase(format!(
                        "irreducibility search for the modulus of {self} is too large"
                    ))
                })
            }
        }
    }

    pub fn is_field(&self) -> bool {
        match self {
            BaseRing::PrimeField(_) => true,
            BaseRing::IntegersMod(m) => is_prime(m),
            BaseRing::UnivariateQuotient { .. } => {
                matches!(self.certify_domain(), Ok(true)) && self.base_is_finite_field()
            }
            BaseRing::Integers => false,
        }
    }

    fn base_is_finite_field(&self) -> bool {
        match self {
            BaseRing::UnivariateQuotient { base, .. } => base.is_field(),
            _ => self.is_field(),
        }
    }

    fn is_irreducible_over_prime_field(&self, p: &BigInt, f: &[Scalar]) -> Result<bool, ()> {
        let deg = f.len() - 1;
        let p_small = p.to_u64().ok_or(())?;
        let mut budget = IRREDUCIBILITY_SEARCH_LIMIT;
        for k in 1..=deg / 2 {
            let count = p_small.checked_pow(k as u32).ok_or(())?;
            if count > budget {
                return Err(());
            }
            budget -= count;
            for idx in 0..count {
                // monic g of degree k, lower coefficients from the digits of idx
                let mut g = Vec::with_capacity(k + 1);
                let mut rest = idx;
                for _ in 0..k {
                    g.push(self.from_int(BigInt::from(rest % p_small)));
                    rest /= p_small;
                }
                g.push(self.one());
                if self.poly_rem(f.to_vec(), &g).is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    // -- dense polynomials over this ring, constant term first --

    pub(crate) fn poly_trim(&self, mut p: Vec<Scalar>) -> Vec<Scalar> {
        while p.last().is_some_and(|c| self.is_zero(c)) {
            p.pop();
        }
        p
    }

    fn poly_add(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let n = a.len().max(b.len());
        let z = self.zero();
        let out = (0..n)
            .map(|i| self.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.poly_trim(out)
    }

    fn poly_mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        self.poly_trim(out)
    }

    /// Remainder of `a` modulo `f`, where `f` has a unit leading coefficient.
    fn poly_rem(&self, mut a: Vec<Scalar>, f: &[Scalar]) -> Vec<Scalar> {
        let d = f.len() - 1;
        let lc_inv = self
            .inverse(f.last().expect("nonzero modulus"))
            .expect("leading coefficient is a unit");
        a = self.poly_trim(a);
        while a.len() > d {
            let k = a.len() - 1;
            let c = self.mul(&a[k], &lc_inv);
            for (i, fi) in f.iter().enumerate() {
                let idx = k - d + i;
                a[idx] = self.sub(&a[idx], &self.mul(&c, fi));
            }
            a = self.poly_trim(a);
        }
        a
    }

    fn reduce(&self, base: &BaseRing, modulus: &[Scalar], a: Vec<Scalar>) -> Vec<Scalar> {
        debug_assert!(matches!(self, BaseRing::UnivariateQuotient { .. }));
        base.poly_rem(a, modulus)
    }

    /// Matrix of multiplication by `x` on the power basis of a quotient
    /// ring, over the immediate base; column `j` is `x·a^j`.
    fn multiplication_matrix(&self, x: &Scalar) -> Vec<Vec<Scalar>> {
        let BaseRing::UnivariateQuotient { base, modulus, .. } = self else {
            unreachable!("only quotients have a power basis")
        };
        let Scalar::Poly(xc) = x else { unreachable!() };
        let d = modulus.len() - 1;
        let mut m = vec![vec![base.zero(); d]; d];
        for j in 0..d {
            let mut monomial = vec![base.zero(); j + 1];
            monomial[j] = base.one();
            let col = self.reduce(base, modulus, base.poly_mul(xc, &monomial));
            for (i, c) in col.into_iter().enumerate() {
                m[i][j] = c;
            }
        }
        m
    }

    /// Division-free determinant: expansion over column subsets.
    pub(crate) fn determinant(&self, m: &[Vec<Scalar>]) -> Scalar {
        let n = m.len();
        if n == 0 {
            return self.one();
        }
        let mut dp: Vec<Option<Scalar>> = vec![None; 1 << n];
        dp[0] = Some(self.one());
        for mask in 0usize..(1 << n) {
            let Some(acc) = dp[mask].clone() else { continue };
            if self.is_zero(&acc) {
                continue;
            }
            let row = mask.count_ones() as usize;
            if row == n {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 || self.is_zero(&m[row][j]) {
                    continue;
                }
                let above = (mask >> (j + 1)).count_ones();
                let mut term = self.mul(&acc, &m[row][j]);
                if above % 2 == 1 {
                    term = self.neg(&term);
                }
                let slot = &mut dp[mask | (1 << j)];
                *slot = Some(match slot.take() {
                    Some(s) => self.add(&s, &term),
                    None => term,
                });
            }
        }
        dp[(1 << n) - 1].clone().unwrap_or_else(|| self.zero())
    }
}

fn minor_matrix(m: &[Vec<Scalar>], row: usize, col: usize) -> Vec<Vec<Scalar>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

pub(crate) fn is_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Integers => write!(f, "Z"),
            BaseRing::IntegersMod(m) => write!(f, "Z/{m}"),
            BaseRing::PrimeField(p) => write!(f, "F{p}"),
            BaseRing::UnivariateQuotient { base, var, modulus } => {
                let poly = super::text::render_univariate(base, var, modulus);
                write!(f, "{base}[{var}]/({poly})")
            }
        }
    }
}
