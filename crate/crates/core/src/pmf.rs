//! Dense probability tensors over finite alphabets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::var::{Var, VarSet};

/// Largest alphabet accepted for any single variable.
pub const MAX_ALPHABET: usize = 8;
/// Largest number of entries in any assembled joint tensor.
pub const MAX_JOINT_ENTRIES: usize = 100_000_000;
/// Normalization and negativity tolerance for every pmf.
pub const PMF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub var: Var,
    pub size: usize,
}

impl Alphabet {
    pub fn new(var: Var, size: usize) -> Self {
        Alphabet { var, size }
    }
}

/// Neumaier-compensated sum.
pub(crate) fn stable_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_axes(name: &str, axes: &[Alphabet]) -> Result<usize> {
    for w in axes.windows(2) {
        if w[0].var >= w[1].var {
            return Err(Error::pmf(
                name,
                format!(
                    "axes must be distinct and in canonical order, got {} before {}",
                    w[0].var, w[1].var
                ),
            ));
        }
    }
    let mut total: usize = 1;
    for a in axes {
        if a.size == 0 {
            return Err(Error::pmf(name, format!("alphabet of {} is empty", a.var)));
        }
        if a.size > MAX_ALPHABET {
            return Err(Error::CapExceeded(format!(
                "alphabet of {} has {} symbols (cap {MAX_ALPHABET})",
                a.var, a.size
            )));
        }
        total = total
            .checked_mul(a.size)
            .filter(|&t| t <= MAX_JOINT_ENTRIES)
            .ok_or_else(|| {
                Error::CapExceeded(format!(
                    "tensor `{name}` exceeds {MAX_JOINT_ENTRIES} entries"
                ))
            })?;
    }
    Ok(total)
}

/// Row-major strides (last axis fastest) scaled by `scale`.
fn strides_of(axes: &[Alphabet], scale: usize) -> Vec<(Var, usize)> {
    let mut out = vec![(Var::X0, 0); axes.len()];
    let mut s = scale;
    for (i, a) in axes.iter().enumerate().rev() {
        out[i] = (a.var, s);
        s *= a.size;
    }
    out
}

/// Validation report for a pmf tensor split into slices that must each sum to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Magnitude of the most negative entry (0 when none is negative).
    pub max_negativity: f64,
    /// Largest |slice sum - 1|.
    pub max_deviation: f64,
    pub slice_deviations: Vec<f64>,
    pub has_nan: bool,
    pub pass: bool,
}

/// Validates raw tensor data: `mass` is split into consecutive slices of
/// `slice_len` entries, each of which must be a pmf.
///
/// Negative entries of magnitude at most [`PMF_TOL`] are treated as rounding
/// noise and do not fail validation.
pub fn validate_slices(mass: &[f64], slice_len: usize) -> Diagnostics {
    let slice_len = slice_len.max(1);
    let has_nan = mass.iter().any(|x| !x.is_finite());
    let min = mass.iter().copied().fold(0.0_f64, f64::min);
    let max_negativity = (-min).max(0.0);
    let slice_deviations: Vec<f64> = mass
        .chunks(slice_len)
        .map(|s| {
            let clamped: Vec<f64> = s.iter().map(|&x| x.max(0.0)).collect();
            (stable_sum(&clamped) - 1.0).abs()
        })
        .collect();
    let max_deviation = slice_deviations.iter().copied().fold(0.0, f64::max);
    let pass = !has_nan
        && mass.len().is_multiple_of(slice_len)
        && max_negativity <= PMF_TOL
        && max_deviation <= PMF_TOL;
    Diagnostics {
        max_negativity,
        max_deviation,
        slice_deviations,
        has_nan,
        pass,
    }
}

fn clamp_checked(name: &str, mut mass: Vec<f64>, slice_len: usize) -> Result<Vec<f64>> {
    let diag = validate_slices(&mass, slice_len);
    if diag.has_nan {
        return Err(Error::pmf(name, "non-finite entry"));
    }
    if diag.max_negativity > PMF_TOL {
        return Err(Error::pmf(
            name,
            format!("negative entry of magnitude {:e}", diag.max_negativity),
        ));
    }
    if diag.max_deviation > PMF_TOL {
        let (slice, dev) = diag
            .slice_deviations
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, d)| (i, *d))
            .unwrap_or((0, 0.0));
        return Err(Error::pmf(
            name,
            format!("slice {slice} sums to 1 {:+e}", dev),
        ));
    }
    for x in &mut mass {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    Ok(mass)
}

/// A joint pmf over an ordered tuple of alphabets, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        Self::named("joint", axes, mass)
    }

    pub fn named(name: &str, axes: Vec<Alphabet>, mass: Vec<f64>) -> Result<Self> {
        let total = check_axes(name, &axes)?;
        if mass.len() != total {
            return Err(Error::pmf(
                name,
                format!("expected {total} entries, found {}", mass.len()),
            ));
        }
        let mass = clamp_checked(name, mass, total)?;
        Ok(JointPmf { axes, mass })
    }

    /// Single-variable pmf.
    pub fn over(var: Var, probs: Vec<f64>) -> Result<Self> {
        let n = probs.len();
        Self::new(vec![Alphabet::new(var, n)], probs)
    }

    pub fn uniform(axes: Vec<Alphabet>) -> Result<Self> {
        let total = check_axes("uniform", &axes)?;
        Self::new(axes, vec![1.0 / total as f64; total])
    }

    pub fn point(var: Var, size: usize, at: usize) -> Result<Self> {
        let mut p = vec![0.0; size];
        if at >= size {
            return Err(Error::pmf("point", format!("index {at} outside alphabet of {size}")));
        }
        p[at] = 1.0;
        Self::over(var, p)
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn vars(&self) -> VarSet {
        self.axes.iter().map(|a| a.var).collect()
    }

    pub fn size_of(&self, var: Var) -> Option<usize> {
        self.axes.iter().find(|a| a.var == var).map(|a| a.size)
    }

    pub fn strides(&self) -> Vec<(Var, usize)> {
        strides_of(&self.axes, 1)
    }

    /// Entry at a multi-index given in axis order.
    pub fn at(&self, index: &[usize]) -> f64 {
        let flat = index
            .iter()
            .zip(self.strides())
            .map(|(i, (_, s))| i * s)
            .sum::<usize>();
        self.mass[flat]
    }

    pub fn validate(&self) -> Diagnostics {
        validate_slices(&self.mass, self.mass.len())
    }

    /// Sums out every axis not in `keep`. Axes of the result stay in
    /// canonical order.
    pub fn marginalize(&self, keep: VarSet) -> Result<JointPmf> {
        let have = self.vars();
        if let Some(v) = keep.minus(have).first() {
            return Err(Error::UnknownVariable(v.name().to_string()));
        }
        if keep == have {
            return Ok(self.clone());
        }
        let out_axes: Vec<Alphabet> = self
            .axes
            .iter()
            .copied()
            .filter(|a| keep.contains(a.var))
            .collect();
        let out_strides = strides_of(&out_axes, 1);
        let ostride: Vec<usize> = self
            .axes
            .iter()
            .map(|a| {
                out_strides
                    .iter()
                    .find(|(v, _)| *v == a.var)
                    .map_or(0, |(_, s)| *s)
            })
            .collect();
        let sizes: Vec<usize> = self.axes.iter().map(|a| a.size).collect();
        let out_len: usize = out_axes.iter().map(|a| a.size).product();
        let mut out = vec![0.0; out_len];
        let mut idx = vec![0usize; sizes.len()];
        let mut oi = 0usize;
        for &m in &self.mass {
            out[oi] += m;
            for ax in (0..sizes.len()).rev() {
                idx[ax] += 1;
                oi += ostride[ax];
                if idx[ax] < sizes[ax] {
                    break;
                }
                oi -= ostride[ax] * sizes[ax];
                idx[ax] = 0;
            }
        }
        Ok(JointPmf {
            axes: out_axes,
            mass: out,
        })
    }

    /// Conditional pmf of `target` given `given`, derived from this joint.
    /// Conditioning cells of zero probability get a uniform slice.
    pub fn conditional(&self, target: VarSet, given: VarSet) -> Result<CondPmf> {
        if !target.is_disjoint(given) || target.is_empty() {
            return Err(Error::InvalidQuery(format!(
                "cannot condition {target} on {given}"
            )));
        }
        let joint = self.marginalize(target.union(given))?;
        let target_axes: Vec<Alphabet> = joint
            .axes
            .iter()
            .copied()
            .filter(|a| target.contains(a.var))
            .collect();
        let given_axes: Vec<Alphabet> = joint
            .axes
            .iter()
            .copied()
            .filter(|a| given.contains(a.var))
            .collect();
        let tlen: usize = target_axes.iter().map(|a| a.size).product();
        let glen: usize = given_axes.iter().map(|a| a.size).product();
        // joint index -> (given, target) layout
        let jstr = joint.strides();
        let tstr = strides_of(&target_axes, 1);
        let gstr = strides_of(&given_axes, tlen);
        let remap: Vec<usize> = jstr
            .iter()
            .map(|(v, _)| {
                tstr.iter()
                    .chain(gstr.iter())
                    .find(|(w, _)| w == v)
                    .map(|(_, s)| *s)
                    .unwrap_or(0)
            })
            .collect();
        let sizes: Vec<usize> = joint.axes.iter().map(|a| a.size).collect();
        let mut data = vec![0.0; tlen * glen];
        let mut idx = vec![0usize; sizes.len()];
        let mut oi = 0usize;
        for &m in &joint.mass {
            data[oi] += m;
            for ax in (0..sizes.len()).rev() {
                idx[ax] += 1;
                oi += remap[ax];
                if idx[ax] < sizes[ax] {
                    break;
                }
                oi -= remap[ax] * sizes[ax];
                idx[ax] = 0;
            }
        }
        for slice in data.chunks_mut(tlen) {
            let s = stable_sum(slice);
            if s > 0.0 {
                slice.iter_mut().for_each(|x| *x /= s);
            } else {
                slice.iter_mut().for_each(|x| *x = 1.0 / tlen as f64);
            }
        }
        CondPmf::new("conditional", target_axes, given_axes, data)
    }
}

/// A conditional pmf `p(target | given)`. Storage is given-major: the flat
/// index is `given_flat * target_len + target_flat`, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CondPmf {
    target: Vec<Alphabet>,
    given: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl CondPmf {
    pub fn new(
        name: &str,
        target: Vec<Alphabet>,
        given: Vec<Alphabet>,
        mass: Vec<f64>,
    ) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::pmf(name, "no target variable"));
        }
        let tlen = check_axes(name, &target)?;
        let glen = check_axes(name, &given)?;
        let tset: VarSet = target.iter().map(|a| a.var).collect();
        let gset: VarSet = given.iter().map(|a| a.var).collect();
        if !tset.is_disjoint(gset) {
            return Err(Error::pmf(name, "target and given axes overlap"));
        }
        let total = tlen.checked_mul(glen).filter(|&t| t <= MAX_JOINT_ENTRIES);
        if total != Some(mass.len()) {
            return Err(Error::pmf(
                name,
                format!(
                    "expected {} entries ({glen} slices of {tlen}), found {}",
                    tlen * glen,
                    mass.len()
                ),
            ));
        }
        let mass = clamp_checked(name, mass, tlen)?;
        Ok(CondPmf {
            target,
            given,
            mass,
        })
    }

    /// `p(target | given)` built from a closure over (given index, target index).
    pub fn from_fn(
        name: &str,
        target: Vec<Alphabet>,
        given: Vec<Alphabet>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let tl = multi_indices(&target);
        let gl = multi_indices(&given);
        let mut mass = Vec::with_capacity(tl.len() * gl.len());
        for g in &gl {
            for t in &tl {
                mass.push(f(g, t));
            }
        }
        Self::new(name, target, given, mass)
    }

    pub fn uniform(target: Vec<Alphabet>, given: Vec<Alphabet>) -> Result<Self> {
        Self::from_fn("uniform", target.clone(), given, |_, _| {
            1.0 / target.iter().map(|a| a.size).product::<usize>() as f64
        })
    }

    /// `p(to | from)` placing all mass on the equal index; the alphabets must
    /// have the same size.
    pub fn identity(from: Alphabet, to: Var) -> Result<Self> {
        let target = vec![Alphabet::new(to, from.size)];
        let given = vec![from];
        Self::from_fn("identity", target, given, |g, t| {
            if g[0] == t[0] {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn target(&self) -> &[Alphabet] {
        &self.target
    }

    pub fn given(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn target_len(&self) -> usize {
        self.target.iter().map(|a| a.size).product()
    }

    pub fn num_slices(&self) -> usize {
        self.given.iter().map(|a| a.size).product()
    }

    pub fn slice(&self, given_flat: usize) -> &[f64] {
        let t = self.target_len();
        &self.mass[given_flat * t..(given_flat + 1) * t]
    }

    /// Copy with one conditional slice replaced.
    pub fn with_slice(&self, given_flat: usize, values: &[f64]) -> Result<Self> {
        let t = self.target_len();
        if values.len() != t || given_flat >= self.num_slices() {
            return Err(Error::LengthMismatch(format!(
                "slice {given_flat} of length {}",
                values.len()
            )));
        }
        let mut mass = self.mass.clone();
        mass[given_flat * t..(given_flat + 1) * t].copy_from_slice(values);
        CondPmf::new("slice update", self.target.clone(), self.given.clone(), mass)
    }

    pub fn strides(&self) -> Vec<(Var, usize)> {
        let mut s = strides_of(&self.target, 1);
        s.extend(strides_of(&self.given, self.target_len()));
        s
    }

    pub fn size_of(&self, var: Var) -> Option<usize> {
        self.target
            .iter()
            .chain(self.given.iter())
            .find(|a| a.var == var)
            .map(|a| a.size)
    }

    pub fn validate(&self) -> Diagnostics {
        validate_slices(&self.mass, self.target_len())
    }
}

/// All multi-indices of the given axes in row-major order.
pub(crate) fn multi_indices(axes: &[Alphabet]) -> Vec<Vec<usize>> {
    let total: usize = axes.iter().map(|a| a.size).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        out.push(idx.clone());
        for ax in (0..axes.len()).rev() {
            idx[ax] += 1;
            if idx[ax] < axes[ax].size {
                break;
            }
            idx[ax] = 0;
        }
    }
    out
}

/// One factor of a product tensor: flat data plus the stride of each of its
/// variables.
pub(crate) struct Factor<'a> {
    pub data: &'a [f64],
    pub strides: Vec<(Var, usize)>,
}

impl<'a> From<&'a JointPmf> for Factor<'a> {
    fn from(p: &'a JointPmf) -> Self {
        Factor {
            data: p.mass(),
            strides: p.strides(),
        }
    }
}

impl<'a> From<&'a CondPmf> for Factor<'a> {
    fn from(p: &'a CondPmf) -> Self {
        Factor {
            data: p.mass(),
            strides: p.strides(),
        }
    }
}

/// Dense product of factors over `axes`. Every factor variable must be an
/// output axis.
pub(crate) fn product(axes: &[Alphabet], factors: &[Factor<'_>]) -> Result<Vec<f64>> {
    let total = check_axes("product", axes)?;
    let out_vars: VarSet = axes.iter().map(|a| a.var).collect();
    for f in factors {
        for (v, _) in &f.strides {
            if !out_vars.contains(*v) {
                return Err(Error::UnknownVariable(v.name().to_string()));
            }
        }
    }
    let fstride: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| {
            axes.iter()
                .map(|a| {
                    f.strides
                        .iter()
                        .find(|(v, _)| *v == a.var)
                        .map_or(0, |(_, s)| *s)
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = axes.iter().map(|a| a.size).collect();
    let mut fidx = vec![0usize; factors.len()];
    let mut idx = vec![0usize; axes.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let mut p = 1.0;
        for (k, f) in factors.iter().enumerate() {
            p *= f.data[fidx[k]];
        }
        out.push(p);
        for ax in (0..sizes.len()).rev() {
            idx[ax] += 1;
            for (k, fs) in fstride.iter().enumerate() {
                fidx[k] += fs[ax];
            }
            if idx[ax] < sizes[ax] {
                break;
            }
            for (k, fs) in fstride.iter().enumerate() {
                fidx[k] -= fs[ax] * sizes[ax];
            }
            idx[ax] = 0;
        }
    }
    Ok(out)
}
