//! Lattices given by Gram matrices, and sublattice calculus inside a fixed ambient lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fqf::FiniteQuadraticForm;
use crate::linalg::{determinant, inertia, integer_kernel, saturate_columns, smith_normal_form, span_basis};
use crate::matrix::Matrix;
use crate::{IntMatrix, RatMatrix};

/// A nondegenerate integral symmetric bilinear form on `Zⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    gram: IntMatrix,
    labels: Option<Vec<String>>,
    even: bool,
    det: BigInt,
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let det = determinant(&gram)?;
        if det.is_zero() {
            return Err(Error::Degenerate);
        }
        let even = (0..gram.rows()).all(|i| gram.get(i, i).is_even());
        Ok(Lattice { gram, labels: None, even, det })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Lattice::new(Matrix::from_i64_rows(rows))
    }

    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        Lattice::new(Matrix::diagonal(&entries.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank() {
            return Err(Error::Dimension(format!("{} labels for rank {}", labels.len(), self.rank())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_unimodular(&self) -> bool {
        self.det.abs().is_one()
    }

    /// `(t₊, t₋)`.
    pub fn signature(&self) -> (usize, usize) {
        let (p, n, _) = inertia(&self.gram).expect("gram is symmetric");
        (p, n)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().0 == 0
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, x)
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.gram.bilinear(x, y)
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Lattice {
            gram: self.gram.block_diag(&other.gram),
            labels,
            even: self.even && other.even,
            det: &self.det * &other.det,
        }
    }

    /// `L(λ)`: the Gram matrix multiplied by `λ`.
    pub fn rescale(&self, lambda: i64) -> Result<Lattice> {
        if lambda == 0 {
            return Err(Error::ZeroScale);
        }
        let l = BigInt::from(lambda);
        let mut out = Lattice::new(self.gram.scale(&l))?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    /// Invariant factors `d_i > 1` of `L*/L`, in divisibility order.
    pub fn discriminant_group(&self) -> Vec<BigInt> {
        smith_normal_form(&self.gram).diagonal().into_iter().filter(|d| !d.is_one()).collect()
    }

    /// Discriminant quadratic form on SNF-adapted generators, largest invariant factor last.
    pub fn discriminant_form(&self) -> Result<FiniteQuadraticForm> {
        if !self.even {
            return Err(Error::OddLattice);
        }
        Ok(self.disc_generators().0)
    }

    /// Discriminant bilinear form, also defined for odd lattices. The returned form carries
    /// `q` values equal to `b(g,g)` and is only meaningful through its bilinear part.
    pub fn discriminant_bilinear_form(&self) -> (Vec<BigInt>, RatMatrix) {
        let (_, gens) = self.disc_generators_raw();
        let orders: Vec<BigInt> = gens.iter().map(|(d, _)| d.clone()).collect();
        let n = gens.len();
        let mut b = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b.set(i, j, frac_mod(&self.dual_inner(&gens[i].1, &gens[j].1), 1));
            }
        }
        (orders, b)
    }

    fn dual_inner(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        self.gram.to_rational().bilinear(x, y)
    }

    fn disc_generators_raw(&self) -> (crate::linalg::SnfResult, Vec<(BigInt, Vec<BigRational>)>) {
        let snf = smith_normal_form(&self.gram);
        let d = snf.diagonal();
        let gens = (0..d.len())
            .filter(|&i| !d[i].is_one())
            .map(|i| {
                let col = snf.v.col(i).into_iter().map(|x| BigRational::new(x, d[i].clone())).collect();
                (d[i].clone(), col)
            })
            .collect();
        (snf, gens)
    }

    /// The discriminant form together with a map from dual vectors to class coordinates.
    pub fn disc_generators(&self) -> (FiniteQuadraticForm, DualCoordinates) {
        let (snf, gens) = self.disc_generators_raw();
        let n = gens.len();
        let orders: Vec<BigInt> = gens.iter().map(|(d, _)| d.clone()).collect();
        let q = gens.iter().map(|(_, g)| frac_mod(&self.dual_inner(g, g), 2)).collect();
        let mut b = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b.set(i, j, frac_mod(&self.dual_inner(&gens[i].1, &gens[j].1), 1));
            }
        }
        let keep: Vec<usize> = (0..snf.diagonal().len()).filter(|&i| !snf.diagonal()[i].is_one()).collect();
        let coords = DualCoordinates {
            rows: keep.iter().map(|&i| snf.u.row(i).to_vec()).collect(),
            gram: self.gram.clone(),
            orders: orders.clone(),
            generators: gens.into_iter().map(|(_, g)| g).collect(),
        };
        (FiniteQuadraticForm::from_parts_unchecked(orders, q, b), coords)
    }

    /// Overlattice generated by `L` and dual vectors `glue` (coordinates in the basis of `L`).
    pub fn overlattice(&self, glue: &[Vec<BigRational>]) -> Result<Lattice> {
        Ok(self.overlattice_with_basis(glue)?.0)
    }

    /// As [`Lattice::overlattice`], also returning the new basis as rational columns in the old basis.
    pub fn overlattice_with_basis(&self, glue: &[Vec<BigRational>]) -> Result<(Lattice, RatMatrix)> {
        let n = self.rank();
        for g in glue {
            if g.len() != n {
                return Err(Error::Dimension(format!("glue vector of length {} for rank {n}", g.len())));
            }
        }
        let den = glue
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut cols: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { den.clone() } else { BigInt::zero() }).collect())
            .collect();
        for g in glue {
            cols.push(g.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect());
        }
        let h = span_basis(&Matrix::from_cols(n, &cols));
        let scaled = self.gram.congruence(&h);
        let d2 = &den * &den;
        if scaled.entries().iter().any(|x| !x.is_multiple_of(&d2)) {
            return Err(Error::BadGlue("result is not integral".into()));
        }
        let gram = scaled.map(|x| x / &d2);
        if self.even && (0..n).any(|i| gram.get(i, i).is_odd()) {
            return Err(Error::BadGlue("result is not even".into()));
        }
        let basis = h.to_rational().scale(&BigRational::new(BigInt::one(), den));
        Ok((Lattice::new(gram)?, basis))
    }

    /// Parses `{"gram": [[..]], "labels": [..]}`. Entries may be JSON integers or decimal strings.
    pub fn from_json(text: &str) -> Result<Lattice> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
        Lattice::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Lattice> {
        let gram = v.get("gram").ok_or_else(|| Error::Invalid("missing field `gram`".into()))?;
        let gram = int_matrix_from_json(gram)?;
        let lat = Lattice::new(gram)?;
        match v.get("labels") {
            None | Some(Value::Null) => Ok(lat),
            Some(Value::Array(ls)) => {
                let labels = ls
                    .iter()
                    .map(|l| l.as_str().map(str::to_owned).ok_or_else(|| Error::Invalid("labels must be strings".into())))
                    .collect::<Result<Vec<_>>>()?;
                lat.with_labels(labels)
            }
            Some(_) => Err(Error::Invalid("`labels` must be an array".into())),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("gram".into(), int_matrix_to_json(&self.gram));
        if let Some(l) = &self.labels {
            obj.insert("labels".into(), Value::from(l.clone()));
        }
        Value::Object(obj)
    }
}

/// Maps dual vectors of a lattice to coordinates in its discriminant group.
#[derive(Clone, Debug)]
pub struct DualCoordinates {
    rows: Vec<Vec<BigInt>>,
    gram: IntMatrix,
    orders: Vec<BigInt>,
    generators: Vec<Vec<BigRational>>,
}

impl DualCoordinates {
    /// Class coordinates of a dual vector `x` (rational, in lattice coordinates).
    pub fn coords(&self, x: &[BigRational]) -> Vec<BigInt> {
        let gx = self.gram.to_rational().mul_vec(x);
        let gx: Vec<BigInt> = gx
            .into_iter()
            .map(|v| {
                assert!(v.is_integer(), "vector is not in the dual lattice");
                v.to_integer()
            })
            .collect();
        self.rows
            .iter()
            .zip(&self.orders)
            .map(|(r, d)| r.iter().zip(&gx).fold(BigInt::zero(), |acc, (a, b)| acc + a * b).mod_floor(d))
            .collect()
    }

    /// Dual vector representing the `i`-th generator.
    pub fn generator(&self, i: usize) -> &[BigRational] {
        &self.generators[i]
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }
}

/// A finite-rank sublattice of an ambient lattice, given by integer coordinates of its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    basis: IntMatrix,
}

impl Sublattice {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.rows() != ambient.rank() {
            return Err(Error::Dimension(format!("basis has {} rows, ambient rank {}", basis.rows(), ambient.rank())));
        }
        if crate::linalg::rank(&basis) != basis.cols() {
            return Err(Error::RankDeficient);
        }
        Ok(Sublattice { ambient, basis })
    }

    /// Sublattice spanned by an arbitrary generating set (columns may be dependent).
    pub fn spanned_by(ambient: Lattice, generators: &IntMatrix) -> Result<Self> {
        let basis = span_basis(generators);
        Sublattice::new(ambient, basis)
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn gram(&self) -> IntMatrix {
        self.ambient.gram.congruence(&self.basis)
    }

    /// The induced lattice; fails if the restricted form is degenerate.
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram())
    }

    pub fn saturate(&self) -> Sublattice {
        Sublattice { ambient: self.ambient.clone(), basis: saturate_columns(&self.basis) }
    }

    pub fn is_primitive(&self) -> bool {
        smith_normal_form(&self.basis).diagonal().iter().all(One::is_one)
    }

    pub fn orthogonal_complement(&self) -> Sublattice {
        let rows = &self.basis.transpose() * &self.ambient.gram;
        Sublattice { ambient: self.ambient.clone(), basis: integer_kernel(&rows) }
    }

    /// Coordinates of an ambient vector in this sublattice's basis, if it lies in the sublattice.
    pub fn coordinates_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let snf = smith_normal_form(&self.basis);
        let ux = snf.u.mul_vec(x);
        let d = snf.diagonal();
        let r = snf.rank();
        if ux[r..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut y = Vec::with_capacity(self.rank());
        for i in 0..r {
            if !ux[i].is_multiple_of(&d[i]) {
                return None;
            }
            y.push(&ux[i] / &d[i]);
        }
        Some(snf.v.mul_vec(&y))
    }
}

/// Canonical representative of `x` modulo `m·Z` in `[0, m)`.
pub fn frac_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let q = (x / &m).floor();
    x - q * m
}

pub fn int_matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Invalid("matrix must be an array of rows".into()))?;
    let parsed = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Invalid("matrix row must be an array".into()))?
                .iter()
                .map(bigint_from_json)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let c = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != c) {
        return Err(Error::Invalid("ragged matrix rows".into()));
    }
    Ok(Matrix::from_rows(parsed))
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Invalid(format!("non-integer entry {n}")))
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| Error::Invalid(format!("non-integer entry {s:?}"))),
        other => Err(Error::Invalid(format!("non-integer entry {other}"))),
    }
}

pub fn bigint_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(i) => Value::from(i),
        Err(_) => Value::from(x.to_string()),
    }
}

pub fn int_matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(bigint_to_json).collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(bi(n), bi(d))
    }

    #[test]
    fn sums_and_rescaling() {
        let m2 = Lattice::diagonal(&[-2]).unwrap();
        assert_eq!(m2.direct_sum(&m2).gram(), &Matrix::from_i64_rows(&[vec![-2, 0], vec![0, -2]]));
        let a3 = Lattice::from_rows(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]).unwrap();
        assert_eq!(
            a3.rescale(-5).unwrap().gram(),
            &Matrix::from_i64_rows(&[vec![10, -5, 0], vec![-5, 10, -5], vec![0, -5, 10]])
        );
        assert_eq!(a3.rescale(1).unwrap(), a3);
        assert_eq!(Lattice::diagonal(&[2, 4]).unwrap().rescale(3).unwrap().det(), &bi(72));
        assert_eq!(a3.rescale(0), Err(Error::ZeroScale));
    }

    #[test]
    fn rejects_bad_grams() {
        assert_eq!(Lattice::from_rows(&[vec![1, 2], vec![2, 4]]), Err(Error::Degenerate));
        assert_eq!(Lattice::from_rows(&[vec![1, 2], vec![3, 4]]), Err(Error::NotSymmetric));
    }

    #[test]
    fn discriminant_groups() {
        assert_eq!(Lattice::diagonal(&[-2]).unwrap().discriminant_group(), vec![bi(2)]);
        let a2 = Lattice::from_rows(&[vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(a2.discriminant_group(), vec![bi(3)]);
        assert_eq!(Lattice::diagonal(&[2, 4, 16]).unwrap().discriminant_group(), vec![bi(2), bi(4), bi(16)]);
    }

    #[test]
    fn discriminant_forms() {
        let q = Lattice::diagonal(&[-2]).unwrap().discriminant_form().unwrap();
        assert_eq!(q.orders(), &[bi(2)]);
        assert_eq!(q.q_values(), &[rat(3, 2)]);
        let h = Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.discriminant_form().unwrap().order(), bi(1));
        let q2 = Lattice::diagonal(&[-2, -2]).unwrap().discriminant_form().unwrap();
        assert_eq!(q2.q_values(), &[rat(3, 2), rat(3, 2)]);
        assert!(q2.b_value(0, 1).is_zero());
        assert_eq!(Lattice::diagonal(&[1, 2]).unwrap().discriminant_form(), Err(Error::OddLattice));
    }

    #[test]
    fn saturation_and_complements() {
        let amb = Lattice::diagonal(&[-2]).unwrap();
        let sub = Sublattice::new(amb, Matrix::from_i64_rows(&[vec![2]])).unwrap();
        let sat = sub.saturate();
        assert_eq!(sat.basis().get(0, 0).abs(), bi(1));
        assert_eq!(sat.saturate(), sat);

        let a2 = Lattice::from_rows(&[vec![-2, 1], vec![1, -2]]).unwrap();
        let root = Sublattice::new(a2, Matrix::from_i64_rows(&[vec![1], vec![0]])).unwrap();
        let c = root.orthogonal_complement();
        assert_eq!(c.gram(), Matrix::from_i64_rows(&[vec![-6]]));
    }

    #[test]
    fn overlattice_of_a1_pair() {
        // ⟨-2⟩ ⊕ ⟨-2⟩ ⊕ ⟨-2⟩ ⊕ ⟨-2⟩ glued by (1,1,1,1)/2 is D4(-1).
        let l = Lattice::diagonal(&[-2, -2, -2, -2]).unwrap();
        let glue = vec![vec![rat(1, 2); 4]];
        let o = l.overlattice(&glue).unwrap();
        assert_eq!(o.det().abs(), bi(4));
        assert!(o.is_even());
        assert!(l.overlattice(&[vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)]]).is_err());
        assert_eq!(l.overlattice(&[]).unwrap().det(), l.det());
    }

    #[test]
    fn dual_coordinates_roundtrip() {
        let l = Lattice::from_rows(&[vec![2, 1, 0], vec![1, 6, 0], vec![0, 0, 4]]).unwrap();
        let (q, dc) = l.disc_generators();
        for i in 0..q.rank() {
            let c = dc.coords(dc.generator(i));
            let expect: Vec<BigInt> = (0..q.rank()).map(|j| if i == j { bi(1) } else { bi(0) }).collect();
            assert_eq!(c, expect);
        }
    }

    #[test]
    fn json_roundtrip() {
        let l = Lattice::from_json(r#"{"gram": [[2, "1"], [1, 2]], "labels": ["a", "b"]}"#).unwrap();
        assert_eq!(l.labels().unwrap(), &["a".to_string(), "b".to_string()]);
        let back = Lattice::from_json_value(&l.to_json_value()).unwrap();
        assert_eq!(back, l);
        assert!(Lattice::from_json("{\"gram\": [[1.5]]}").is_err());
        assert!(Lattice::from_json("{").is_err());
    }
}
