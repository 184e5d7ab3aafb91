//! Component maps of univariate maps over `F_{q^n}` and numeric extraction of
//! the `(g1, g2)` pair on the quadratic tower.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{BivarPoly, ComponentTable, FamilySpec};
use crate::gf::{Embedding, FieldCtx, FieldElem};
use crate::oracle::{field_bijection, multivar_bijection};
use crate::tower::TowerCtx;

/// Square matrix over `F_q`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn identity(field: &FieldCtx, n: usize) -> Self {
        let mut data = vec![field.zero(); n * n];
        for i in 0..n {
            data[i * n + i] = field.one();
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix must be square".into()));
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn random<R: Rng>(field: &FieldCtx, n: usize, rng: &mut R) -> Self {
        let data = (0..n * n)
            .map(|_| field.decode_unchecked(rng.gen_range(0..field.q())))
            .collect();
        Matrix { n, data }
    }

    /// Rejection-sampled invertible matrix.
    pub fn random_invertible<R: Rng>(field: &FieldCtx, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, rng);
            if m.inverse(field).is_ok() {
                return m;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.n + j]
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self, field: &FieldCtx) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(field, n).data;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let s = field.inv(a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = field.mul(a[col * n + j], s);
                inv[col * n + j] = field.mul(inv[col * n + j], s);
            }
            for r in 0..n {
                let k = a[r * n + col];
                if r == col || k.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = field.sub(a[r * n + j], field.mul(k, a[col * n + j]));
                    inv[r * n + j] = field.sub(inv[r * n + j], field.mul(k, inv[col * n + j]));
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, field: &FieldCtx, v: &[FieldElem], out: &mut [FieldElem]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..self.n).fold(field.zero(), |acc, i| {
                field.add(acc, field.mul(v[i], self.get(i, j)))
            });
        }
    }
}

/// Bases, matrices and offsets defining a component map.
#[derive(Clone, Debug)]
pub struct DecompositionConfig {
    pub n: usize,
    pub input_basis: Vec<FieldElem>,
    pub output_basis: Vec<FieldElem>,
    pub a: Matrix,
    pub b: Matrix,
    pub a_vec: Vec<FieldElem>,
    pub b_vec: Vec<FieldElem>,
    /// Subtracted from `f(x)` before coordinates are read.
    pub c: FieldElem,
}

impl DecompositionConfig {
    /// Polynomial basis on both sides, identity matrices, zero offsets.
    pub fn standard(emb: &Embedding) -> Self {
        let (small, big) = (emb.small(), emb.big());
        let n = big.m() / small.m();
        let theta = primitive_basis_generator(emb);
        let basis: Vec<_> = (0..n as u64).map(|i| big.pow(theta, i)).collect();
        DecompositionConfig {
            n,
            input_basis: basis.clone(),
            output_basis: basis,
            a: Matrix::identity(small, n),
            b: Matrix::identity(small, n),
            a_vec: vec![small.zero(); n],
            b_vec: vec![small.zero(); n],
            c: big.zero(),
        }
    }

    pub fn random<R: Rng>(emb: &Embedding, rng: &mut R) -> Self {
        let (small, big) = (emb.small(), emb.big());
        let n = big.m() / small.m();
        let mut basis = || loop {
            let b: Vec<_> = (0..n)
                .map(|_| big.decode_unchecked(rng.gen_range(0..big.q())))
                .collect();
            if dual_basis(emb, &b).is_ok() {
                return b;
            }
        };
        let input_basis = basis();
        let output_basis = basis();
        let vec = |rng: &mut R| -> Vec<FieldElem> {
            (0..n)
                .map(|_| small.decode_unchecked(rng.gen_range(0..small.q())))
                .collect()
        };
        let a_vec = vec(rng);
        let b_vec = vec(rng);
        DecompositionConfig {
            n,
            input_basis,
            output_basis,
            a: Matrix::random_invertible(small, n, rng),
            b: Matrix::random_invertible(small, n, rng),
            a_vec,
            b_vec,
            c: big.decode_unchecked(rng.gen_range(0..big.q())),
        }
    }
}

/// An element whose powers `1, θ, …, θ^{n-1}` form a basis over the subfield.
fn primitive_basis_generator(emb: &Embedding) -> FieldElem {
    let big = emb.big();
    let n = big.m() / emb.small().m();
    big.elements()
        .find(|&t| {
            let b: Vec<_> = (0..n as u64).map(|i| big.pow(t, i)).collect();
            dual_basis(emb, &b).is_ok()
        })
        .expect("a field has a primitive element")
}

/// Trace-dual basis: `Tr(β_i β*_j) = [i = j]`, from the inverse Gram matrix.
pub fn dual_basis(emb: &Embedding, basis: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let (small, big) = (emb.small(), emb.big());
    let n = basis.len();
    if n * small.m() != big.m() {
        return Err(Error::Invalid(format!(
            "basis has {n} elements, extension degree is {}",
            big.m() / small.m()
        )));
    }
    let tr = |x| restrict_trace(emb, x);
    let gram = Matrix::from_rows(
        (0..n)
            .map(|i| (0..n).map(|j| tr(big.mul(basis[i], basis[j]))).collect())
            .collect(),
    )?;
    let ginv = gram.inverse(small).map_err(|_| Error::DependentBasis)?;
    Ok((0..n)
        .map(|j| {
            (0..n).fold(big.zero(), |acc, k| {
                big.add(acc, big.mul(emb.embed(ginv.get(j, k)), basis[k]))
            })
        })
        .collect())
}

fn restrict_trace(emb: &Embedding, x: FieldElem) -> FieldElem {
    let t = emb
        .big()
        .trace(x, emb.small().q())
        .expect("embedding implies a subfield");
    emb.restrict(t).expect("traces lie in the subfield")
}

/// `(f_1, …, f_n)` on `F_q^n`, precomputed from a config.
pub struct ComponentMap<'a, F> {
    emb: &'a Embedding,
    cfg: &'a DecompositionConfig,
    f: F,
    /// `A α^T`
    input_vecs: Vec<FieldElem>,
    dual_out: Vec<FieldElem>,
    b_inv: Matrix,
}

impl<'a, F: Fn(FieldElem) -> FieldElem> ComponentMap<'a, F> {
    pub fn new(f: F, emb: &'a Embedding, cfg: &'a DecompositionConfig) -> Result<Self> {
        let (small, big) = (emb.small(), emb.big());
        let n = cfg.n;
        if cfg.input_basis.len() != n
            || cfg.output_basis.len() != n
            || cfg.a.n() != n
            || cfg.b.n() != n
            || cfg.a_vec.len() != n
            || cfg.b_vec.len() != n
        {
            return Err(Error::Invalid("config dimensions disagree".into()));
        }
        dual_basis(emb, &cfg.input_basis)?;
        let dual_out = dual_basis(emb, &cfg.output_basis)?;
        cfg.a.inverse(small)?;
        let b_inv = cfg.b.inverse(small)?;
        let input_vecs = (0..n)
            .map(|i| {
                (0..n).fold(big.zero(), |acc, j| {
                    big.add(acc, big.mul(emb.embed(cfg.a.get(i, j)), cfg.input_basis[j]))
                })
            })
            .collect();
        Ok(ComponentMap {
            emb,
            cfg,
            f,
            input_vecs,
            dual_out,
            b_inv,
        })
    }

    /// `x = (x + a) A α^T`.
    pub fn assemble(&self, xs: &[FieldElem]) -> FieldElem {
        let (small, big) = (self.emb.small(), self.emb.big());
        xs.iter()
            .zip(&self.cfg.a_vec)
            .zip(&self.input_vecs)
            .fold(big.zero(), |acc, ((&x, &a), &v)| {
                big.add(acc, big.mul(self.emb.embed(small.add(x, a)), v))
            })
    }

    /// Coordinates of `y` in the output basis.
    pub fn coordinates(&self, y: FieldElem, out: &mut [FieldElem]) {
        let big = self.emb.big();
        for (o, &d) in out.iter_mut().zip(&self.dual_out) {
            *o = restrict_trace(self.emb, big.mul(y, d));
        }
    }

    pub fn apply(&self, xs: &[FieldElem], out: &mut [FieldElem]) {
        let (small, big) = (self.emb.small(), self.emb.big());
        let y = big.sub((self.f)(self.assemble(xs)), self.cfg.c);
        let mut w = vec![small.zero(); self.cfg.n];
        self.coordinates(y, &mut w);
        self.b_inv.left_mul(small, &w, out);
        for (o, &b) in out.iter_mut().zip(&self.cfg.b_vec) {
            *o = small.sub(*o, b);
        }
    }
}

pub fn component_map<'a, F>(
    f: F,
    emb: &'a Embedding,
    cfg: &'a DecompositionConfig,
) -> Result<ComponentMap<'a, F>>
where
    F: Fn(FieldElem) -> FieldElem,
{
    ComponentMap::new(f, emb, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub f_is_pp: bool,
    pub components_permute: bool,
    pub agree: bool,
}

/// Runs the univariate oracle on `f` and the tuple oracle on its components.
pub fn verify_equivalence<F>(f: F, emb: &Embedding, cfg: &DecompositionConfig) -> Result<Equivalence>
where
    F: Fn(FieldElem) -> FieldElem,
{
    let map = component_map(&f, emb, cfg)?;
    let f_is_pp = field_bijection(emb.big(), &f)?.is_permutation;
    let components_permute =
        multivar_bijection(emb.small(), cfg.n, |xs, out| map.apply(xs, out))?.is_permutation;
    let eq = Equivalence {
        f_is_pp,
        components_permute,
        agree: f_is_pp == components_permute,
    };
    debug_assert!(eq.agree, "univariate and component oracles disagree");
    Ok(eq)
}

/// Result of reading `(g1, g2)` off a tower family numerically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    q: u64,
    /// `(g1, g2)` at `(y, z)`, index `enc(y) + q enc(z)`, constant removed.
    pub values: Vec<(FieldElem, FieldElem)>,
    /// Reduced interpolant; only trusted when no family degree aliases.
    interpolated: ComponentTable,
}

impl Extraction {
    /// Bases below this order fold degree-6 terms onto lower ones.
    pub const MIN_COEFF_Q: u64 = 7;

    pub fn value(&self, y: FieldElem, z: FieldElem) -> (FieldElem, FieldElem) {
        self.values[(y.encode() + self.q * z.encode()) as usize]
    }

    pub fn coefficients(&self) -> Result<&ComponentTable> {
        if self.q < Self::MIN_COEFF_Q {
            Err(Error::DegreeOverflow)
        } else {
            Ok(&self.interpolated)
        }
    }

    pub fn y_degree(&self) -> u8 {
        self.interpolated
            .g1
            .y_degree()
            .max(self.interpolated.g2.y_degree())
    }

    /// Exact comparison against a component table at every `(y, z)`.
    pub fn matches(&self, field: &FieldCtx, table: &ComponentTable) -> bool {
        let (c1, c2) = table.eval(field, field.zero(), field.zero());
        field.elements().all(|z| {
            field.elements().all(|y| {
                let (g1, g2) = table.eval(field, y, z);
                self.value(y, z) == (field.sub(g1, c1), field.sub(g2, c2))
            })
        })
    }

    /// `(y, z)` encodings where the table differs.
    pub fn mismatches(&self, field: &FieldCtx, table: &ComponentTable) -> Vec<(u64, u64)> {
        let (c1, c2) = table.eval(field, field.zero(), field.zero());
        let mut out = Vec::new();
        for z in field.elements() {
            for y in field.elements() {
                let (g1, g2) = table.eval(field, y, z);
                if self.value(y, z) != (field.sub(g1, c1), field.sub(g2, c2)) {
                    out.push((y.encode(), z.encode()));
                }
            }
        }
        out
    }
}

/// Coefficients `c_0..c_{q-1}` of the unique reduced polynomial with the given
/// values (indexed by encoding).
pub fn interpolate(field: &FieldCtx, values: &[FieldElem]) -> Vec<FieldElem> {
    let q = field.q();
    let mut c = vec![field.zero(); q as usize];
    c[0] = values[0];
    for k in 1..q {
        let s = field.elements().fold(field.zero(), |acc, a| {
            // 0^0 = 1 for k = q - 1
            let w = if k == q - 1 { field.one() } else { field.pow(a, q - 1 - k) };
            field.add(acc, field.mul(values[a.encode() as usize], w))
        });
        c[k as usize] = field.neg(s);
    }
    c
}

fn interpolate_bivariate(field: &FieldCtx, values: &[FieldElem]) -> BivarPoly {
    let q = field.q() as usize;
    // along y for each z, then along z for each y-degree
    let rows: Vec<Vec<FieldElem>> = (0..q)
        .map(|z| interpolate(field, &values[z * q..(z + 1) * q]))
        .collect();
    let mut g = BivarPoly::new();
    for dy in 0..q {
        let col: Vec<FieldElem> = rows.iter().map(|r| r[dy]).collect();
        for (dz, c) in interpolate(field, &col).into_iter().enumerate() {
            if (dy, dz) != (0, 0) {
                g.add_term(field, dy as u8, dz as u64, c);
            }
        }
    }
    g
}

/// Evaluates a tower family at the proof substitution for every `(y, z)` and
/// reads `(g1, g2)` as the `{1, α}` coordinates, minus the value at `(0, 0)`.
pub fn lemma31_extract(spec: &FamilySpec, tower: &TowerCtx) -> Result<Extraction> {
    let delta = match spec {
        FamilySpec::DeltaPower(s) | FamilySpec::EvenDeltaPower(s) => s.delta,
        _ => return Err(Error::KindContextMismatch),
    };
    let eval = spec.tower_evaluator(tower)?;
    let f = tower.base();
    let q = f.q();
    let base = eval(tower.proof_substitution(delta, f.zero(), f.zero()));
    let mut values = Vec::with_capacity((q * q) as usize);
    for z in f.elements() {
        for y in f.elements() {
            let v = tower.sub(eval(tower.proof_substitution(delta, y, z)), base);
            values.push(tower.coords(v)?);
        }
    }
    let g1: Vec<_> = values.iter().map(|v| v.0).collect();
    let g2: Vec<_> = values.iter().map(|v| v.1).collect();
    let interpolated = ComponentTable {
        g1: interpolate_bivariate(f, &g1),
        g2: interpolate_bivariate(f, &g2),
    };
    Ok(Extraction {
        q,
        values,
        interpolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{closed_form_components, TheoremId};
    use crate::gf::build_field;
    use crate::tower::build_tower;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn emb(p: u64, m: usize, n: usize) -> Embedding {
        Embedding::new(&build_field(p, m).unwrap(), &build_field(p, m * n).unwrap()).unwrap()
    }

    #[test]
    fn matrix_inverse_round_trip() {
        let f = build_field(5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = Matrix::random_invertible(&f, 3, &mut rng);
            let inv = m.inverse(&f).unwrap();
            let mut row = vec![f.zero(); 3];
            let mut back = vec![f.zero(); 3];
            for i in 0..3 {
                let e: Vec<_> = (0..3).map(|j| if i == j { f.one() } else { f.zero() }).collect();
                m.left_mul(&f, &e, &mut row);
                inv.left_mul(&f, &row, &mut back);
                assert_eq!(back, e);
            }
        }
        let sing = Matrix::from_rows(vec![vec![f.one(), f.one()], vec![f.one(), f.one()]]).unwrap();
        assert_eq!(sing.inverse(&f), Err(Error::SingularMatrix));
    }

    #[test]
    fn identity_config_gives_identity_components() {
        let e = emb(3, 1, 2);
        let cfg = DecompositionConfig::standard(&e);
        let map = component_map(|x| x, &e, &cfg).unwrap();
        let s = e.small();
        let mut out = vec![s.zero(); 2];
        for a in s.elements() {
            for b in s.elements() {
                map.apply(&[a, b], &mut out);
                assert_eq!(out, vec![a, b]);
            }
        }
    }

    #[test]
    fn frobenius_components_on_tower_basis() {
        // basis {1, α} with α² = u: x^3 = c0 - c1 α
        let e = emb(3, 1, 2);
        let (s, big) = (e.small(), e.big());
        let u = build_tower(s).unwrap().u();
        let alpha = big
            .elements()
            .find(|&a| big.mul(a, a) == e.embed(u))
            .unwrap();
        let mut cfg = DecompositionConfig::standard(&e);
        cfg.input_basis = vec![big.one(), alpha];
        cfg.output_basis = cfg.input_basis.clone();
        let map = component_map(|x| big.pow(x, 3), &e, &cfg).unwrap();
        let mut out = vec![s.zero(); 2];
        for a in s.elements() {
            for b in s.elements() {
                map.apply(&[a, b], &mut out);
                assert_eq!(out, vec![a, s.neg(b)]);
            }
        }
    }

    #[test]
    fn constant_shift_is_absorbed() {
        let e = emb(3, 1, 2);
        let big = e.big();
        let mut cfg = DecompositionConfig::standard(&e);
        let c = big.decode(5).unwrap();
        cfg.c = c;
        let f = |x| big.add(big.pow(x, 5), c);
        let shifted = component_map(f, &e, &cfg).unwrap();
        let cfg0 = DecompositionConfig::standard(&e);
        let plain = component_map(|x| big.pow(x, 5), &e, &cfg0).unwrap();
        let s = e.small();
        let (mut o1, mut o2) = (vec![s.zero(); 2], vec![s.zero(); 2]);
        for a in s.elements() {
            for b in s.elements() {
                shifted.apply(&[a, b], &mut o1);
                plain.apply(&[a, b], &mut o2);
                assert_eq!(o1, o2);
            }
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let e = emb(3, 1, 2);
        let big = e.big();
        let mut cfg = DecompositionConfig::standard(&e);
        cfg.input_basis = vec![big.one(), big.from_int(2)];
        assert!(matches!(
            component_map(|x| x, &e, &cfg),
            Err(Error::DependentBasis)
        ));
        let mut cfg = DecompositionConfig::standard(&e);
        cfg.b = Matrix::from_rows(vec![vec![e.small().zero(); 2]; 2]).unwrap();
        assert!(matches!(
            component_map(|x| x, &e, &cfg),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn cube_on_f4_is_not_pp() {
        let e = emb(2, 1, 2);
        let big = e.big();
        let cfg = DecompositionConfig::standard(&e);
        let r = verify_equivalence(|x| big.pow(x, 3), &e, &cfg).unwrap();
        assert_eq!(
            r,
            Equivalence {
                f_is_pp: false,
                components_permute: false,
                agree: true
            }
        );
    }

    #[test]
    fn translation_permutes_under_random_configs() {
        let e = emb(3, 1, 2);
        let big = e.big();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let cfg = DecompositionConfig::random(&e, &mut rng);
            let r = verify_equivalence(|x| big.add(x, big.one()), &e, &cfg).unwrap();
            assert!(r.f_is_pp && r.components_permute);
        }
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let f = build_field(7, 1).unwrap();
        let coeffs: Vec<_> = [3, 0, 5, 1, 0, 0, 6].iter().map(|&c| f.from_int(c)).collect();
        let vals: Vec<_> = f.elements().map(|x| f.eval_poly(&coeffs, x)).collect();
        assert_eq!(interpolate(&f, &vals), coeffs);
        let f9 = build_field(3, 2).unwrap();
        let coeffs: Vec<_> = (0..9).map(|k| f9.decode((k * 4 + 1) % 9).unwrap()).collect();
        let vals: Vec<_> = f9.elements().map(|x| f9.eval_poly(&coeffs, x)).collect();
        assert_eq!(interpolate(&f9, &vals), coeffs);
    }

    #[test]
    fn extraction_of_t31_at_q7() {
        let t = build_tower(&build_field(7, 1).unwrap()).unwrap();
        let f = t.base();
        let delta = t.elem(f.from_int(2), f.from_int(4));
        let gamma = t.elem(f.from_int(3), f.from_int(1));
        let spec = FamilySpec::for_theorem(TheoremId::T3_1, &t, delta, gamma, None).unwrap();
        let ex = lemma31_extract(&spec, &t).unwrap();
        let closed = closed_form_components(TheoremId::T3_1, &t, delta, gamma, None).unwrap();
        assert!(ex.matches(f, &closed));
        assert_eq!(ex.coefficients().unwrap(), &closed);
        assert_eq!(ex.y_degree(), 1);
    }

    #[test]
    fn extraction_of_t319_at_q4() {
        let t = build_tower(&build_field(2, 2).unwrap()).unwrap();
        let elems: Vec<_> = t.elements().collect();
        for &delta in &elems {
            for &gamma in &elems {
                let spec = FamilySpec::for_theorem(TheoremId::T3_19, &t, delta, gamma, None).unwrap();
                let ex = lemma31_extract(&spec, &t).unwrap();
                let closed =
                    closed_form_components(TheoremId::T3_19, &t, delta, gamma, None).unwrap();
                assert!(ex.matches(t.base(), &closed));
            }
        }
    }

    #[test]
    fn small_q_has_no_coefficients() {
        let t = build_tower(&build_field(5, 1).unwrap()).unwrap();
        let spec =
            FamilySpec::for_theorem(TheoremId::T3_14, &t, t.zero(), t.one(), None).unwrap();
        let ex = lemma31_extract(&spec, &t).unwrap();
        assert_eq!(ex.coefficients(), Err(Error::DegreeOverflow));
    }

    #[test]
    fn pure_core_power_has_no_y() {
        // (x^q - x)^q with δ = γ = 0
        use crate::families::{DeltaPowerSpec, Exponent, LinearKind};
        let t = build_tower(&build_field(7, 1).unwrap()).unwrap();
        let spec = FamilySpec::DeltaPower(DeltaPowerSpec {
            terms: vec![Exponent::Affine {
                q_coeff: 1,
                constant: 0,
            }],
            delta: t.zero(),
            gamma: t.zero(),
            linear: LinearKind::X,
        });
        let ex = lemma31_extract(&spec, &t).unwrap();
        assert_eq!(ex.y_degree(), 0);
    }
}
