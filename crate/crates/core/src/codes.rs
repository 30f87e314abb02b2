//! BB and coprime-BB code construction.
//!
//! With `x = S_l ⊗ I_m` and `y = I_l ⊗ S_m`, a pair of polynomials `a, b`
//! gives `H_X = [A|B]` and `H_Z = [Bᵀ|Aᵀ]`. Qubit `r1 * m + r2` of each block
//! sits at coordinate `(r1, r2)` of the `l × m` torus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinMatrix;
use crate::polyring::{biv_to_uni, circulant_gcd, gcd_usize, uni_to_biv, BivPoly, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CodeForm {
    /// Polynomials given directly in `x, y`.
    Xy,
    /// Polynomials given in `π = xy`; `a`, `b` of the spec hold their CRT image.
    Pi { a: UniPoly, b: UniPoly },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub l: usize,
    pub m: usize,
    pub a: BivPoly,
    pub b: BivPoly,
    pub form: CodeForm,
}

/// The code-spec JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDocument {
    pub l: usize,
    pub m: usize,
    pub a: String,
    pub b: String,
    #[serde(default = "default_form")]
    pub form: String,
}

fn default_form() -> String {
    "xy".into()
}

impl CodeSpec {
    pub fn bivariate(l: usize, m: usize, a: BivPoly, b: BivPoly) -> Result<Self> {
        Self::check_sizes(l, m)?;
        if a.l() != l || a.m() != m || b.l() != l || b.m() != m {
            return Err(Error::InvalidSpec(
                "polynomials built for a different (l, m)".into(),
            ));
        }
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidSpec("a and b must be nonzero".into()));
        }
        Ok(Self {
            l,
            m,
            a,
            b,
            form: CodeForm::Xy,
        })
    }

    /// A coprime-BB spec; `a` and `b` are reduced modulo `π^{lm} + 1`.
    pub fn coprime(l: usize, m: usize, a: &UniPoly, b: &UniPoly) -> Result<Self> {
        Self::check_sizes(l, m)?;
        if gcd_usize(l, m) != 1 {
            return Err(Error::NotCoprime { l, m });
        }
        let n = l * m;
        let (a, b) = (a.reduce_circulant(n), b.reduce_circulant(n));
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidSpec("a and b must be nonzero".into()));
        }
        Ok(Self {
            l,
            m,
            a: uni_to_biv(&a, l, m)?,
            b: uni_to_biv(&b, l, m)?,
            form: CodeForm::Pi { a, b },
        })
    }

    fn check_sizes(l: usize, m: usize) -> Result<()> {
        if l < 2 || m < 2 {
            return Err(Error::InvalidSpec(format!(
                "l = {l}, m = {m}; both must be at least 2"
            )));
        }
        Ok(())
    }

    pub fn parse(l: usize, m: usize, a: &str, b: &str, form: &str) -> Result<Self> {
        match form.to_ascii_lowercase().as_str() {
            "xy" => Self::bivariate(l, m, BivPoly::parse(a, l, m)?, BivPoly::parse(b, l, m)?),
            "pi" => Self::coprime(l, m, &UniPoly::parse(a)?, &UniPoly::parse(b)?),
            other => Err(Error::InvalidSpec(format!(
                "unknown form {other:?}, expected xy or pi"
            ))),
        }
    }

    pub fn from_document(doc: &SpecDocument) -> Result<Self> {
        Self::parse(doc.l, doc.m, &doc.a, &doc.b, &doc.form)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(text)?)
    }

    pub fn to_document(&self) -> SpecDocument {
        match &self.form {
            CodeForm::Xy => SpecDocument {
                l: self.l,
                m: self.m,
                a: self.a.to_text(),
                b: self.b.to_text(),
                form: "xy".into(),
            },
            CodeForm::Pi { a, b } => SpecDocument {
                l: self.l,
                m: self.m,
                a: a.to_text('p'),
                b: b.to_text('p'),
                form: "pi".into(),
            },
        }
    }

    pub fn n(&self) -> usize {
        2 * self.l * self.m
    }

    pub fn is_coprime_form(&self) -> bool {
        matches!(self.form, CodeForm::Pi { .. })
    }

    /// Univariate images of `a` and `b`, available whenever gcd(l, m) = 1.
    pub fn univariate(&self) -> Result<(UniPoly, UniPoly)> {
        match &self.form {
            CodeForm::Pi { a, b } => Ok((a.clone(), b.clone())),
            CodeForm::Xy => Ok((biv_to_uni(&self.a)?, biv_to_uni(&self.b)?)),
        }
    }

    /// A bivariate spec with the given polynomials, keeping the coprime form
    /// when this spec has one.
    pub fn with_polys(&self, a: BivPoly, b: BivPoly) -> Result<Self> {
        match self.form {
            CodeForm::Xy => Self::bivariate(self.l, self.m, a, b),
            CodeForm::Pi { .. } => {
                Self::coprime(self.l, self.m, &biv_to_uni(&a)?, &biv_to_uni(&b)?)
            }
        }
    }
}

/// `[[n, k, d]]` with the distance kept as separate bound and exact fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_upper: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_exact: Option<usize>,
}

/// `S_l^i ⊗ S_m^j`.
pub fn monomial_matrix(i: usize, j: usize, l: usize, m: usize) -> Result<BinMatrix> {
    if i >= l || j >= m {
        return Err(Error::InvalidArgument(format!(
            "exponent ({i}, {j}) outside [0, {l}) x [0, {m})"
        )));
    }
    let n = l * m;
    let mut out = BinMatrix::zeros(n, n);
    for r1 in 0..l {
        for r2 in 0..m {
            out.set(r1 * m + r2, ((r1 + i) % l) * m + (r2 + j) % m, true);
        }
    }
    Ok(out)
}

/// The `lm × lm` matrix of a polynomial: the sum of its monomial matrices.
pub fn poly_matrix(p: &BivPoly) -> BinMatrix {
    let (l, m) = (p.l(), p.m());
    let mut out = BinMatrix::zeros(l * m, l * m);
    for (i, j) in p.terms() {
        for r1 in 0..l {
            for r2 in 0..m {
                out.toggle(r1 * m + r2, ((r1 + i) % l) * m + (r2 + j) % m);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityChecks {
    pub h_x: BinMatrix,
    pub h_z: BinMatrix,
    pub spec: CodeSpec,
}

impl ParityChecks {
    pub fn n(&self) -> usize {
        self.h_x.cols()
    }
}

/// Builds `H_X = [A|B]`, `H_Z = [Bᵀ|Aᵀ]` and checks `H_X H_Zᵀ = 0`.
pub fn build_checks(spec: &CodeSpec) -> Result<ParityChecks> {
    let a = poly_matrix(&spec.a);
    let b = poly_matrix(&spec.b);
    let h_x = a.hstack(&b)?;
    let h_z = poly_matrix(&spec.b.transpose()).hstack(&poly_matrix(&spec.a.transpose()))?;
    if !h_x.matmul(&h_z.transpose())?.is_zero() {
        return Err(Error::Integrity("H_X H_Z^T != 0".into()));
    }
    Ok(ParityChecks {
        h_x,
        h_z,
        spec: spec.clone(),
    })
}

/// `k = 2lm − 2 rank(H_X)`, after confirming `rank(H_X) = rank(H_Z)`.
pub fn dimension(pc: &ParityChecks) -> Result<usize> {
    let rx = pc.h_x.rank();
    let rz = pc.h_z.rank();
    if rx != rz {
        return Err(Error::Integrity(format!(
            "rank(H_X) = {rx} but rank(H_Z) = {rz}"
        )));
    }
    Ok(pc.n() - 2 * rx)
}

/// `k = 2 deg gcd(a, b, π^N + 1)`.
pub fn dimension_coprime(a: &UniPoly, b: &UniPoly, n: usize) -> Result<usize> {
    if a.reduce_circulant(n).is_zero() || b.reduce_circulant(n).is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = circulant_gcd(a, b, n);
    Ok(2 * g.degree().expect("gcd with π^N + 1 is nonzero"))
}

/// Which checks contribute edges to the Tanner graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckSet {
    X,
    Z,
    Both,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Number of connected components of the Tanner graph over qubit nodes and
/// the selected check nodes.
pub fn tanner_components(pc: &ParityChecks, checks: CheckSet) -> usize {
    let n = pc.n();
    let mut blocks: Vec<&BinMatrix> = Vec::new();
    if checks != CheckSet::Z {
        blocks.push(&pc.h_x);
    }
    if checks != CheckSet::X {
        blocks.push(&pc.h_z);
    }
    let total = n + blocks.iter().map(|h| h.rows()).sum::<usize>();
    let mut sets = DisjointSets::new(total);
    let mut offset = n;
    for h in blocks {
        for r in 0..h.rows() {
            for q in h.row_support(r) {
                sets.union(offset + r, q);
            }
        }
        offset += h.rows();
    }
    let mut roots: Vec<usize> = (0..total).map(|v| sets.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Whether the Tanner graph of both check types is a single component.
pub fn is_connected(spec: &CodeSpec) -> Result<bool> {
    if !support_may_connect(spec) {
        return Ok(false);
    }
    Ok(tanner_components(&build_checks(spec)?, CheckSet::Both) == 1)
}

/// Cheap necessary condition: the exponent differences within `a` and `b`
/// must generate the whole group Z_l × Z_m.
fn support_may_connect(spec: &CodeSpec) -> bool {
    let (l, m) = (spec.l, spec.m);
    let mut gens = Vec::new();
    for p in [&spec.a, &spec.b] {
        let terms: Vec<_> = p.terms().collect();
        for &(i0, j0) in &terms {
            for &(i, j) in &terms {
                gens.push(((i + l - i0) % l, (j + m - j0) % m));
            }
        }
    }
    let mut seen = vec![false; l * m];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    let mut count = 1;
    while let Some((i, j)) = stack.pop() {
        for &(di, dj) in &gens {
            let next = ((i + di) % l, (j + dj) % m);
            if !seen[next.0 * m + next.1] {
                seen[next.0 * m + next.1] = true;
                count += 1;
                stack.push(next);
            }
        }
    }
    count == l * m
}

/// The four equivalent codes `(a, b)`, `(aᵀ, bᵀ)`, `(b, a)`, `(bᵀ, aᵀ)`.
pub fn equivalent_transforms(spec: &CodeSpec) -> Result<[CodeSpec; 4]> {
    let (a, b) = (&spec.a, &spec.b);
    Ok([
        spec.clone(),
        spec.with_polys(a.transpose(), b.transpose())?,
        spec.with_polys(b.clone(), a.clone())?,
        spec.with_polys(b.transpose(), a.transpose())?,
    ])
}

/// `H_X = [Aᵀ|B]`, `H_Z = [Bᵀ|A]`: transposes only `a`. Not in general
/// equivalent to the original code.
pub fn transpose_a_only(spec: &CodeSpec) -> Result<CodeSpec> {
    spec.with_polys(spec.a.transpose(), spec.b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::gcd_usize;
    use proptest::prelude::*;

    fn table1_row1() -> CodeSpec {
        CodeSpec::parse(3, 9, "1+y2+y4", "y3+x+x2", "xy").unwrap()
    }

    #[test]
    fn monomial_matrices() {
        assert_eq!(
            monomial_matrix(0, 0, 3, 5).unwrap(),
            BinMatrix::identity(15)
        );
        // m = 1 gives the bare shift of the l-cycle.
        assert_eq!(monomial_matrix(1, 0, 3, 1).unwrap(), BinMatrix::shift(3));
        let xy = monomial_matrix(1, 1, 3, 5).unwrap();
        let prod = monomial_matrix(1, 0, 3, 5)
            .unwrap()
            .matmul(&monomial_matrix(0, 1, 3, 5).unwrap())
            .unwrap();
        assert_eq!(xy, prod);
        let x = BinMatrix::shift(3).kron(&BinMatrix::identity(5));
        assert_eq!(monomial_matrix(1, 0, 3, 5).unwrap(), x);
        assert!(monomial_matrix(3, 0, 3, 5).is_err());
    }

    #[test]
    fn table1_row1_shape() {
        let pc = build_checks(&table1_row1()).unwrap();
        assert_eq!((pc.h_x.rows(), pc.h_x.cols()), (27, 54));
        assert_eq!((pc.h_z.rows(), pc.h_z.cols()), (27, 54));
        for r in 0..27 {
            assert_eq!(pc.h_x.row_weight(r), 6);
            assert_eq!(pc.h_z.row_weight(r), 6);
        }
        for c in 0..54 {
            assert_eq!(pc.h_x.col_weight(c), 3);
        }
        assert_eq!(pc.h_x.rank(), 23);
        assert_eq!(dimension(&pc).unwrap(), 8);
        assert!(is_connected(&table1_row1()).unwrap());
    }

    #[test]
    fn single_monomial_code_is_trivial() {
        let spec = CodeSpec::parse(3, 4, "x", "y2", "xy").unwrap();
        let pc = build_checks(&spec).unwrap();
        for r in 0..12 {
            assert_eq!(pc.h_x.row_weight(r), 2);
        }
        assert_eq!(dimension(&pc).unwrap(), 0);
    }

    #[test]
    fn gross_neighbour_dimension() {
        let spec = CodeSpec::parse(6, 12, "x4+y2+y6", "y5+x3+x4", "xy").unwrap();
        assert_eq!(dimension(&build_checks(&spec).unwrap()).unwrap(), 8);
        let c5 = transpose_a_only(&spec).unwrap();
        assert_eq!(c5.a, BivPoly::parse("x2+y6+y10", 6, 12).unwrap());
        assert_eq!(dimension(&build_checks(&c5).unwrap()).unwrap(), 8);
    }

    #[test]
    fn coprime_spec_matches_its_image() {
        let spec = CodeSpec::parse(3, 5, "1+p+p2", "p+p3+p8", "pi").unwrap();
        let (a, b) = spec.univariate().unwrap();
        let image = CodeSpec::bivariate(3, 5, spec.a.clone(), spec.b.clone()).unwrap();
        assert_eq!(
            build_checks(&spec).unwrap().h_x,
            build_checks(&image).unwrap().h_x
        );
        assert_eq!(
            build_checks(&spec).unwrap().h_z,
            build_checks(&image).unwrap().h_z
        );
        assert_eq!(dimension_coprime(&a, &b, 15).unwrap(), 4);
        assert_eq!(dimension(&build_checks(&spec).unwrap()).unwrap(), 4);
        assert!(matches!(
            CodeSpec::parse(3, 6, "1+p", "p", "pi"),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn dimension_coprime_edges() {
        let n = 63;
        // g = an irreducible degree-6 factor of π^63 + 1.
        let g = UniPoly::parse("1+p+p6").unwrap();
        assert!(UniPoly::circulant_modulus(n).rem(&g).unwrap().is_zero());
        let a = g.mul(&UniPoly::parse("1+p2").unwrap());
        let b = g.mul(&UniPoly::parse("p+p5+p9").unwrap());
        assert_eq!(dimension_coprime(&a, &b, n).unwrap(), 12);
        assert_eq!(
            dimension_coprime(
                &UniPoly::parse("1+p+p3").unwrap(),
                &UniPoly::parse("p").unwrap(),
                15
            )
            .unwrap(),
            0
        );
        assert!(dimension_coprime(&UniPoly::zero(), &g, n).is_err());
    }

    #[test]
    fn connectivity_examples() {
        let split = CodeSpec::parse(3, 2, "1+x+x2", "1+x+x2", "xy").unwrap();
        assert!(!is_connected(&split).unwrap());
        let pc = build_checks(&split).unwrap();
        assert_eq!(tanner_components(&pc, CheckSet::Both), 2);
        let dense = CodeSpec::parse(2, 2, "1+x+y+xy", "1", "xy").unwrap();
        assert!(is_connected(&dense).unwrap());
    }

    #[test]
    fn spec_document_round_trip() {
        let spec = CodeSpec::parse(7, 9, "1+p+p58", "p3+p16+p44", "pi").unwrap();
        let doc = spec.to_document();
        assert_eq!(doc.a, "1+p+p58");
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(CodeSpec::from_json(&json).unwrap(), spec);
        assert!(CodeSpec::from_json(r#"{"l":3,"m":3,"a":"1","b":"x","form":"zz"}"#).is_err());
        assert!(CodeSpec::from_json(r#"{"l":1,"m":3,"a":"1","b":"y"}"#).is_err());
    }

    fn bfs_connected(pc: &ParityChecks) -> bool {
        let n = pc.n();
        let checks: Vec<Vec<usize>> = (0..pc.h_x.rows())
            .map(|r| pc.h_x.row_support(r))
            .chain((0..pc.h_z.rows()).map(|r| pc.h_z.row_support(r)))
            .collect();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut used = vec![false; checks.len()];
        while let Some(q) = stack.pop() {
            for (ci, c) in checks.iter().enumerate() {
                if !used[ci] && c.contains(&q) {
                    used[ci] = true;
                    for &q2 in c {
                        if !seen[q2] {
                            seen[q2] = true;
                            stack.push(q2);
                        }
                    }
                }
            }
        }
        seen.iter().all(|&s| s) && used.iter().all(|&u| u)
    }

    fn random_spec() -> impl Strategy<Value = CodeSpec> {
        (2usize..=6, 2usize..=7).prop_flat_map(|(l, m)| {
            let term = (0..l, 0..m);
            (
                Just((l, m)),
                proptest::collection::vec(term.clone(), 1..4),
                proptest::collection::vec(term, 1..4),
            )
                .prop_filter_map("nonzero", |((l, m), a, b)| {
                    let a = BivPoly::from_terms(l, m, a);
                    let b = BivPoly::from_terms(l, m, b);
                    CodeSpec::bivariate(l, m, a, b).ok()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn css_condition_and_weights(spec in random_spec()) {
            let pc = build_checks(&spec).unwrap();
            prop_assert!(pc.h_x.matmul(&pc.h_z.transpose()).unwrap().is_zero());
            let w = spec.a.len() + spec.b.len();
            for r in 0..pc.h_x.rows() {
                prop_assert_eq!(pc.h_x.row_weight(r), w);
            }
            for c in 0..pc.n() {
                prop_assert!(pc.h_x.col_weight(c) <= spec.a.len().max(spec.b.len()));
            }
            prop_assert_eq!(is_connected(&spec).unwrap(), bfs_connected(&pc));
        }

        #[test]
        fn pi_matrix_equals_bivariate_matrix(
            ((l, m), raw) in (2usize..=11, 2usize..=11)
                .prop_filter("coprime", |(l, m)| gcd_usize(*l, *m) == 1 && l * m <= 105)
                .prop_flat_map(|(l, m)| (Just((l, m)), proptest::collection::vec((0..l, 0..m), 1..5)))
        ) {
            let p = BivPoly::from_terms(l, m, raw);
            prop_assume!(!p.is_empty());
            let u = biv_to_uni(&p).unwrap();
            let pi = monomial_matrix(1, 1, l, m).unwrap();
            let mut acc = BinMatrix::zeros(l * m, l * m);
            let mut power = BinMatrix::identity(l * m);
            for t in 0..l * m {
                if u.coeff(t) {
                    acc = acc.add(&power).unwrap();
                }
                power = power.matmul(&pi).unwrap();
            }
            prop_assert_eq!(acc, poly_matrix(&p));
        }
    }
}
