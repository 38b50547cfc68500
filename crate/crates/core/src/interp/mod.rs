//! Finite-dimensional numerical interpretation of ground terms.
//!
//! Every space label gets a small dimension; a compound space is the
//! Kronecker product of its labels taken in ascending label order, so the
//! coordinates of a tensor product do not depend on the syntactic order of
//! its factors.

mod soundness;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{Space, SpaceLabel};
use crate::syntax::render_canonical;
use crate::term::{Constant, Symbol, Term};

pub use soundness::{
    check_registry_soundness, check_rule_soundness, Counterexample, RuleSoundness,
    SoundnessReport, SOUNDNESS_TOLERANCE,
};

/// Concrete value of a ground term.
#[derive(Clone, Debug, PartialEq)]
pub enum ConcreteValue {
    Scalar(Complex64),
    Vector { space: Space, data: Vec<Complex64> },
    /// Square matrix in row-major order.
    Operator { space: Space, dim: usize, data: Vec<Complex64> },
}

impl ConcreteValue {
    fn entries(&self) -> &[Complex64] {
        match self {
            ConcreteValue::Scalar(z) => std::slice::from_ref(z),
            ConcreteValue::Vector { data, .. } | ConcreteValue::Operator { data, .. } => data,
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn space(&self) -> Option<&Space> {
        match self {
            ConcreteValue::Scalar(_) => None,
            ConcreteValue::Vector { space, .. } | ConcreteValue::Operator { space, .. } => Some(space),
        }
    }

    /// `‖a − b‖ / (1 + max(‖a‖, ‖b‖))`, or infinity when the values have
    /// different kinds or shapes.
    pub fn discrepancy(&self, other: &ConcreteValue) -> f64 {
        let same_shape = match (self, other) {
            (ConcreteValue::Scalar(_), ConcreteValue::Scalar(_)) => true,
            (ConcreteValue::Vector { space: s1, data: d1 }, ConcreteValue::Vector { space: s2, data: d2 }) => {
                s1 == s2 && d1.len() == d2.len()
            }
            (
                ConcreteValue::Operator { space: s1, dim: n1, .. },
                ConcreteValue::Operator { space: s2, dim: n2, .. },
            ) => s1 == s2 && n1 == n2,
            _ => false,
        };
        if !same_shape {
            return f64::INFINITY;
        }
        let diff: f64 = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff / (1.0 + self.norm().max(other.norm()))
    }

    pub fn close_to(&self, other: &ConcreteValue, tolerance: f64) -> bool {
        self.discrepancy(other) <= tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot evaluate a pattern variable")]
    NotGround,
    #[error("no value assigned to {0}")]
    Unassigned(String),
    #[error("{0}")]
    Sort(String),
}

/// Assignment of dimensions and values used to evaluate terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    seed: u64,
    dims: BTreeMap<SpaceLabel, usize>,
    vectors: HashMap<Constant, Vec<Complex64>>,
    operators: HashMap<Constant, Vec<Complex64>>,
    scalars: BTreeMap<String, Complex64>,
}

fn unit_disc(rng: &mut impl Rng) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, theta)
}

fn is_qubit_gate(c: &Constant) -> bool {
    matches!((c.name.as_str(), c.subscript.len()), ("h", 1) | ("cnot", 2))
}

#[derive(Default)]
struct Inventory {
    labels: BTreeSet<SpaceLabel>,
    qubits: BTreeSet<SpaceLabel>,
    vectors: BTreeMap<String, Constant>,
    operators: BTreeMap<String, Constant>,
    atoms: BTreeSet<String>,
}

impl Inventory {
    fn scan(&mut self, t: &Term) {
        match t {
            Term::Var(_) | Term::Num(_) => {}
            Term::Atom(n) => {
                self.atoms.insert(n.clone());
            }
            Term::Vector(c) | Term::Operator(c) => {
                let labels: Vec<SpaceLabel> = c.subscript.iter().filter_map(|a| a.as_label().cloned()).collect();
                if (matches!(t, Term::Vector(_)) && c.is_computational())
                    || (matches!(t, Term::Operator(_)) && is_qubit_gate(c))
                {
                    self.qubits.extend(labels.iter().cloned());
                }
                self.labels.extend(labels);
                let key = render_canonical(t);
                if matches!(t, Term::Vector(_)) {
                    self.vectors.insert(key, c.clone());
                } else {
                    self.operators.insert(key, c.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| self.scan(a)),
        }
    }
}

impl Model {
    /// An empty model; dimensions and values are assigned explicitly.
    pub fn new(seed: u64) -> Self {
        Model { seed, ..Model::default() }
    }

    /// A random model covering every constant in `t`.
    pub fn random_for(t: &Term, seed: u64) -> Self {
        Model::random_for_terms(&[t], seed)
    }

    /// A random model covering every constant in all of `terms`.
    ///
    /// Labels used by computational-basis vectors or by the `h` and `cnot`
    /// gates get dimension 2; every other label gets 2 or 3. Entries are
    /// uniform in the unit disc except for computational-basis vectors and
    /// the `h`, `cnot` and `id` operators, which have their standard values.
    pub fn random_for_terms(terms: &[&Term], seed: u64) -> Self {
        let mut inv = Inventory::default();
        for t in terms {
            inv.scan(t);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = Model::new(seed);
        for label in &inv.labels {
            let d = if inv.qubits.contains(label) { 2 } else { rng.gen_range(2..=3) };
            model.dims.insert(label.clone(), d);
        }
        for c in inv.vectors.values() {
            let n = model.dim_of_subscript(c);
            let data = match c.name.as_str() {
                "0" | "1" if c.is_computational() => {
                    let k = if c.name == "0" { 0 } else { 1 };
                    (0..n).map(|i| if i == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }).collect()
                }
                _ => (0..n).map(|_| unit_disc(&mut rng)).collect(),
            };
            model.vectors.insert(c.clone(), data);
        }
        for c in inv.operators.values() {
            let data = model
                .standard_gate(c)
                .unwrap_or_else(|| {
                    let n = model.dim_of_subscript(c);
                    (0..n * n).map(|_| unit_disc(&mut rng)).collect()
                });
            model.operators.insert(c.clone(), data);
        }
        for a in &inv.atoms {
            model.scalars.insert(a.clone(), unit_disc(&mut rng));
        }
        model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dims(&self) -> &BTreeMap<SpaceLabel, usize> {
        &self.dims
    }

    pub fn set_dim(&mut self, label: &str, dim: usize) {
        self.dims.insert(SpaceLabel::new(label), dim);
    }

    pub fn assign_vector(&mut self, c: Constant, data: Vec<Complex64>) {
        self.vectors.insert(c, data);
    }

    pub fn assign_operator(&mut self, c: Constant, data: Vec<Complex64>) {
        self.operators.insert(c, data);
    }

    pub fn assign_scalar(&mut self, name: &str, value: Complex64) {
        self.scalars.insert(name.to_string(), value);
    }

    /// Dimension of a ground space, or `None` if a label has no dimension.
    pub fn dim(&self, space: &Space) -> Option<usize> {
        space.labels().map(|l| self.dims.get(l).copied()).product()
    }

    fn dim_of_subscript(&self, c: &Constant) -> usize {
        self.dim(&c.space()).unwrap_or(1)
    }

    fn label_dims(&self, space: &Space) -> Result<Vec<usize>, EvalError> {
        space
            .labels()
            .map(|l| self.dims.get(l).copied().ok_or_else(|| EvalError::Unassigned(format!("dimension of {l}"))))
            .collect()
    }

    /// Standard matrices for `h`, `cnot` (control first) and `id`.
    fn standard_gate(&self, c: &Constant) -> Option<Vec<Complex64>> {
        let space = c.space();
        let dims = self.label_dims(&space).ok()?;
        let n: usize = dims.iter().product();
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match c.name.as_str() {
            "id" => Some((0..n * n).map(|k| if k / n == k % n { one } else { z }).collect()),
            "h" if c.subscript.len() == 1 && n == 2 => {
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Some(vec![s, s, s, -s])
            }
            "cnot" if c.subscript.len() == 2 && dims == [2, 2] => {
                let control = c.subscript[0].as_label()?;
                let target = c.subscript[1].as_label()?;
                if control == target {
                    return None;
                }
                let labels: Vec<&SpaceLabel> = space.labels().collect();
                let ci = labels.iter().position(|l| *l == control)?;
                let ti = 1 - ci;
                let mut m = vec![z; 16];
                for col in 0..4 {
                    let mut digits = [col / 2, col % 2];
                    if digits[ci] == 1 {
                        digits[ti] ^= 1;
                    }
                    let row = digits[0] * 2 + digits[1];
                    m[row * 4 + col] = one;
                }
                Some(m)
            }
            _ => None,
        }
    }
}

/// Convenience wrapper for [`Model::random_for`].
pub fn random_model(t: &Term, seed: u64) -> Model {
    Model::random_for(t, seed)
}

/// Index map for the Kronecker product of two spaces in ascending label
/// order: `map[ix][iy]` is the index of `e_ix ⊗ e_iy` in the joined space.
fn merge_map(model: &Model, sx: &Space, sy: &Space) -> Result<(Space, Vec<Vec<usize>>), EvalError> {
    let dx = model.label_dims(sx)?;
    let dy = model.label_dims(sy)?;
    let lx: Vec<&SpaceLabel> = sx.labels().collect();
    let ly: Vec<&SpaceLabel> = sy.labels().collect();
    // Stable merge: ties take the left factor first.
    let mut slots = Vec::with_capacity(lx.len() + ly.len());
    let (mut i, mut j) = (0, 0);
    while i < lx.len() || j < ly.len() {
        if j == ly.len() || (i < lx.len() && lx[i] <= ly[j]) {
            slots.push((0usize, i));
            i += 1;
        } else {
            slots.push((1usize, j));
            j += 1;
        }
    }
    let digits = |mut k: usize, d: &[usize]| {
        let mut out = vec![0; d.len()];
        for p in (0..d.len()).rev() {
            out[p] = k % d[p];
            k /= d[p];
        }
        out
    };
    let nx: usize = dx.iter().product();
    let ny: usize = dy.iter().product();
    let mut map = vec![vec![0; ny]; nx];
    for (ix, row) in map.iter_mut().enumerate() {
        let gx = digits(ix, &dx);
        for (iy, cell) in row.iter_mut().enumerate() {
            let gy = digits(iy, &dy);
            let mut idx = 0;
            for &(side, k) in &slots {
                let (g, d) = if side == 0 { (gx[k], dx[k]) } else { (gy[k], dy[k]) };
                idx = idx * d + g;
            }
            *cell = idx;
        }
    }
    Ok((sx.join(sy), map))
}

/// Evaluates a ground term.
pub fn eval(t: &Term, model: &Model) -> Result<ConcreteValue, EvalError> {
    use ConcreteValue as V;
    let mismatch = |what: &str| EvalError::Sort(format!("{what} in {}", render_canonical(t)));
    match t {
        Term::Var(_) => Err(EvalError::NotGround),
        Term::Atom(n) => model.scalars.get(n).map(|z| V::Scalar(*z)).ok_or_else(|| EvalError::Unassigned(n.clone())),
        Term::Num(c) => Ok(V::Scalar(c.to_complex())),
        Term::Vector(c) => {
            let data = model.vectors.get(c).ok_or_else(|| EvalError::Unassigned(render_canonical(t)))?;
            Ok(V::Vector { space: c.space(), data: data.clone() })
        }
        Term::Operator(c) => {
            let data = model.operators.get(c).ok_or_else(|| EvalError::Unassigned(render_canonical(t)))?;
            let dim = (data.len() as f64).sqrt().round() as usize;
            Ok(V::Operator { space: c.space(), dim, data: data.clone() })
        }
        Term::App(symbol, args) => {
            let vals = args.iter().map(|a| eval(a, model)).collect::<Result<Vec<_>, _>>()?;
            match (symbol, &vals[..]) {
                (Symbol::Conjugate, [V::Scalar(a)]) => Ok(V::Scalar(a.conj())),
                (Symbol::PlusS, [V::Scalar(a), V::Scalar(b)]) => Ok(V::Scalar(a + b)),
                (Symbol::TimesS, [V::Scalar(a), V::Scalar(b)]) => Ok(V::Scalar(a * b)),
                (Symbol::PlusV, [V::Vector { space: s1, data: x }, V::Vector { space: s2, data: y }]) => {
                    if s1 != s2 || x.len() != y.len() {
                        return Err(mismatch("vector sum across spaces"));
                    }
                    Ok(V::Vector { space: s1.clone(), data: x.iter().zip(y).map(|(a, b)| a + b).collect() })
                }
                (Symbol::TimesV, [V::Scalar(a), V::Vector { space, data }]) => {
                    Ok(V::Vector { space: space.clone(), data: data.iter().map(|x| a * x).collect() })
                }
                (
                    Symbol::PlusO,
                    [V::Operator { space: s1, dim, data: x }, V::Operator { space: s2, data: y, .. }],
                ) => {
                    if s1 != s2 || x.len() != y.len() {
                        return Err(mismatch("operator sum across spaces"));
                    }
                    Ok(V::Operator { space: s1.clone(), dim: *dim, data: x.iter().zip(y).map(|(a, b)| a + b).collect() })
                }
                (Symbol::TimesO, [V::Scalar(a), V::Operator { space, dim, data }]) => Ok(V::Operator {
                    space: space.clone(),
                    dim: *dim,
                    data: data.iter().map(|x| a * x).collect(),
                }),
                (Symbol::Ip, [V::Vector { space: s1, data: x }, V::Vector { space: s2, data: y }]) => {
                    if s1 != s2 || x.len() != y.len() {
                        return Err(mismatch("inner product across spaces"));
                    }
                    Ok(V::Scalar(x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()))
                }
                (Symbol::Apply, [V::Operator { space: so, dim, data: m }, V::Vector { space: sv, data: x }]) => {
                    if so != sv || *dim != x.len() {
                        return Err(mismatch("operator applied across spaces"));
                    }
                    let n = *dim;
                    let data = (0..n).map(|r| (0..n).map(|c| m[r * n + c] * x[c]).sum()).collect();
                    Ok(V::Vector { space: sv.clone(), data })
                }
                (
                    Symbol::Compose,
                    [V::Operator { space: s1, dim, data: a }, V::Operator { space: s2, data: b, .. }],
                ) => {
                    if s1 != s2 || a.len() != b.len() {
                        return Err(mismatch("composition across spaces"));
                    }
                    let n = *dim;
                    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
                    for r in 0..n {
                        for k in 0..n {
                            let ark = a[r * n + k];
                            for c in 0..n {
                                data[r * n + c] += ark * b[k * n + c];
                            }
                        }
                    }
                    Ok(V::Operator { space: s1.clone(), dim: n, data })
                }
                (Symbol::Projector, [V::Vector { space: s1, data: psi }, V::Vector { space: s2, data: phi }]) => {
                    if s1 != s2 || psi.len() != phi.len() {
                        return Err(mismatch("projector across spaces"));
                    }
                    let n = psi.len();
                    let data = (0..n * n).map(|k| psi[k / n] * phi[k % n].conj()).collect();
                    Ok(V::Operator { space: s1.clone(), dim: n, data })
                }
                (Symbol::TensorV, [V::Vector { space: sx, data: x }, V::Vector { space: sy, data: y }]) => {
                    let (space, map) = merge_map(model, sx, sy)?;
                    let mut data = vec![Complex64::new(0.0, 0.0); x.len() * y.len()];
                    for (ix, a) in x.iter().enumerate() {
                        for (iy, b) in y.iter().enumerate() {
                            data[map[ix][iy]] = a * b;
                        }
                    }
                    Ok(V::Vector { space, data })
                }
                (
                    Symbol::TensorO,
                    [V::Operator { space: sx, dim: nx, data: x }, V::Operator { space: sy, dim: ny, data: y }],
                ) => {
                    let (space, map) = merge_map(model, sx, sy)?;
                    let n = nx * ny;
                    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
                    for rx in 0..*nx {
                        for cx in 0..*nx {
                            let a = x[rx * nx + cx];
                            for ry in 0..*ny {
                                for cy in 0..*ny {
                                    data[map[rx][ry] * n + map[cx][cy]] = a * y[ry * ny + cy];
                                }
                            }
                        }
                    }
                    Ok(V::Operator { space, dim: n, data })
                }
                _ => Err(mismatch(&format!("ill-sorted arguments to {symbol}"))),
            }
        }
    }
}
