//! The discrete memoryless two-relay network and the two factored input laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{product, Alphabet, CondPmf, Factor, JointPmf};
use crate::var::Var;

/// Alphabet sizes for all ten variables, indexed by [`Var`].
///
/// Channel alphabets (`X*`, `Y*`) are fixed by the channel; the auxiliary
/// sizes (`V*`, `Yh*`) are the defaults used when a law family is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sizes(pub [usize; 10]);

impl Sizes {
    pub fn get(&self, v: Var) -> usize {
        self.0[v.index()]
    }

    pub fn set(&mut self, v: Var, n: usize) {
        self.0[v.index()] = n;
    }

    pub fn with(mut self, v: Var, n: usize) -> Self {
        self.set(v, n);
        self
    }

    pub fn alphabet(&self, v: Var) -> Alphabet {
        Alphabet::new(v, self.get(v))
    }

    pub fn alphabets(&self, vars: &[Var]) -> Vec<Alphabet> {
        vars.iter().map(|&v| self.alphabet(v)).collect()
    }

    /// All variables binary.
    pub fn binary() -> Self {
        Sizes([2; 10])
    }
}

/// `p(y0, y1, y2 | x0, x1, x2)` together with the alphabet sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkChannel {
    sizes: Sizes,
    kernel: CondPmf,
}

const INPUTS: [Var; 3] = [Var::X0, Var::X1, Var::X2];
const OUTPUTS: [Var; 3] = [Var::Y0, Var::Y1, Var::Y2];

impl NetworkChannel {
    pub fn new(sizes: Sizes, kernel: CondPmf) -> Result<Self> {
        let want_t = sizes.alphabets(&OUTPUTS);
        let want_g = sizes.alphabets(&INPUTS);
        if kernel.target() != want_t.as_slice() || kernel.given() != want_g.as_slice() {
            return Err(Error::pmf(
                "channel",
                "kernel must be p(Y0,Y1,Y2 | X0,X1,X2) with the declared sizes",
            ));
        }
        for v in [Var::V1, Var::V2, Var::Yh1, Var::Yh2] {
            let n = sizes.get(v);
            if n == 0 || n > crate::pmf::MAX_ALPHABET {
                return Err(Error::CapExceeded(format!(
                    "alphabet of {v} has {n} symbols"
                )));
            }
        }
        Ok(NetworkChannel { sizes, kernel })
    }

    /// Builds the kernel from `f(x, y)` where `x = [x0,x1,x2]`, `y = [y0,y1,y2]`.
    pub fn from_fn(sizes: Sizes, f: impl Fn([usize; 3], [usize; 3]) -> f64) -> Result<Self> {
        let kernel = CondPmf::from_fn(
            "channel",
            sizes.alphabets(&OUTPUTS),
            sizes.alphabets(&INPUTS),
            |g, t| f([g[0], g[1], g[2]], [t[0], t[1], t[2]]),
        )?;
        Self::new(sizes, kernel)
    }

    pub fn sizes(&self) -> Sizes {
        self.sizes
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    /// Same channel, different auxiliary (`V*`, `Yh*`) default sizes.
    pub fn with_aux(&self, var: Var, n: usize) -> Result<Self> {
        if !matches!(var, Var::V1 | Var::V2 | Var::Yh1 | Var::Yh2) {
            return Err(Error::Config(format!("{var} is not an auxiliary variable")));
        }
        Self::new(self.sizes.with(var, n), self.kernel.clone())
    }

    /// `Y0 = X0`, relays observe a constant and are ignored by the receiver.
    pub fn identity_direct() -> Self {
        let sizes = Sizes([2, 2, 2, 2, 2, 2, 1, 1, 1, 1]);
        Self::from_fn(sizes, |x, y| if y[0] == x[0] { 1.0 } else { 0.0 })
            .expect("preset is valid")
    }

    /// All outputs uniform and independent of every input.
    pub fn all_noise() -> Self {
        Self::from_fn(Sizes::binary(), |_, _| 1.0 / 8.0).expect("preset is valid")
    }

    /// Binary links with independent crossover noise. The receiver output
    /// `Y0` is the 3-bit word `(X0^N, X1^N', X2^N'')` encoded as
    /// `4*b0 + 2*b1 + b2`; each relay observes `X0` through its own BSC.
    pub fn binary_symmetric_links(links: BscLinks) -> Result<Self> {
        for (name, p) in links.named() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("crossover `{name}` = {p} outside [0,1]")));
            }
        }
        let sizes = Sizes([2, 2, 2, 2, 2, 8, 2, 2, 2, 2]);
        let bsc = |p: f64, a: usize, b: usize| if a == b { 1.0 - p } else { p };
        Self::from_fn(sizes, |x, y| {
            let (b0, b1, b2) = ((y[0] >> 2) & 1, (y[0] >> 1) & 1, y[0] & 1);
            bsc(links.sender_dest, x[0], b0)
                * bsc(links.relay1_dest, x[1], b1)
                * bsc(links.relay2_dest, x[2], b2)
                * bsc(links.sender_relay1, x[0], y[1])
                * bsc(links.sender_relay2, x[0], y[2])
        })
    }
}

/// Crossover probabilities for [`NetworkChannel::binary_symmetric_links`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscLinks {
    pub sender_dest: f64,
    pub sender_relay1: f64,
    pub sender_relay2: f64,
    pub relay1_dest: f64,
    pub relay2_dest: f64,
}

impl BscLinks {
    /// Every link with the same crossover probability.
    pub fn uniform(p: f64) -> Self {
        BscLinks {
            sender_dest: p,
            sender_relay1: p,
            sender_relay2: p,
            relay1_dest: p,
            relay2_dest: p,
        }
    }

    fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("sender_dest", self.sender_dest),
            ("sender_relay1", self.sender_relay1),
            ("sender_relay2", self.sender_relay2),
            ("relay1_dest", self.relay1_dest),
            ("relay2_dest", self.relay2_dest),
        ]
    }
}

fn expect_shape(
    name: &str,
    p: &CondPmf,
    target: &[Var],
    given: &[Var],
) -> Result<()> {
    let t: Vec<Var> = p.target().iter().map(|a| a.var).collect();
    let g: Vec<Var> = p.given().iter().map(|a| a.var).collect();
    if t != target || g != given {
        return Err(Error::pmf(
            name,
            format!("expected p({:?} | {:?}), found p({:?} | {:?})", target, given, t, g),
        ));
    }
    Ok(())
}

fn expect_var(name: &str, p: &JointPmf, var: Var) -> Result<()> {
    if p.axes().len() != 1 || p.axes()[0].var != var {
        return Err(Error::pmf(name, format!("expected a pmf over {var}")));
    }
    Ok(())
}

/// Checks that `var` has one size across all the places it appears.
fn agree(var: Var, sizes: &[Option<usize>]) -> Result<usize> {
    let mut seen: Option<usize> = None;
    for s in sizes.iter().flatten() {
        match seen {
            None => seen = Some(*s),
            Some(prev) if prev != *s => {
                return Err(Error::AlphabetMismatch {
                    var,
                    expected: prev,
                    found: *s,
                })
            }
            _ => {}
        }
    }
    seen.ok_or_else(|| Error::UnknownVariable(var.name().to_string()))
}

fn match_channel(channel: &NetworkChannel, var: Var, found: usize) -> Result<()> {
    let expected = channel.sizes().get(var);
    if expected != found {
        return Err(Error::AlphabetMismatch {
            var,
            expected,
            found,
        });
    }
    Ok(())
}

/// `p(x1) p(x2) p(x0|x1,x2) p(yh1|x1,y1) p(yh2|x2,y2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct T1Law {
    pub p_x1: JointPmf,
    pub p_x2: JointPmf,
    pub p_x0: CondPmf,
    pub p_yh1: CondPmf,
    pub p_yh2: CondPmf,
}

impl T1Law {
    pub fn new(
        p_x1: JointPmf,
        p_x2: JointPmf,
        p_x0: CondPmf,
        p_yh1: CondPmf,
        p_yh2: CondPmf,
    ) -> Result<Self> {
        expect_var("p(x1)", &p_x1, Var::X1)?;
        expect_var("p(x2)", &p_x2, Var::X2)?;
        expect_shape("p(x0|x1,x2)", &p_x0, &[Var::X0], &[Var::X1, Var::X2])?;
        expect_shape("p(yh1|x1,y1)", &p_yh1, &[Var::Yh1], &[Var::X1, Var::Y1])?;
        expect_shape("p(yh2|x2,y2)", &p_yh2, &[Var::Yh2], &[Var::X2, Var::Y2])?;
        let law = T1Law {
            p_x1,
            p_x2,
            p_x0,
            p_yh1,
            p_yh2,
        };
        law.sizes()?;
        Ok(law)
    }

    /// Sizes of every variable the law touches (`V*` entries are 1).
    pub fn sizes(&self) -> Result<Sizes> {
        let mut s = Sizes([1; 10]);
        s.set(Var::X0, self.p_x0.size_of(Var::X0).unwrap_or(1));
        s.set(
            Var::X1,
            agree(
                Var::X1,
                &[self.p_x1.size_of(Var::X1), self.p_x0.size_of(Var::X1), self.p_yh1.size_of(Var::X1)],
            )?,
        );
        s.set(
            Var::X2,
            agree(
                Var::X2,
                &[self.p_x2.size_of(Var::X2), self.p_x0.size_of(Var::X2), self.p_yh2.size_of(Var::X2)],
            )?,
        );
        s.set(Var::Y1, self.p_yh1.size_of(Var::Y1).unwrap_or(1));
        s.set(Var::Y2, self.p_yh2.size_of(Var::Y2).unwrap_or(1));
        s.set(Var::Yh1, self.p_yh1.size_of(Var::Yh1).unwrap_or(1));
        s.set(Var::Yh2, self.p_yh2.size_of(Var::Yh2).unwrap_or(1));
        Ok(s)
    }

    /// Every component uniform, with `Yh*` sizes from `sizes`.
    pub fn uniform(sizes: Sizes) -> Result<Self> {
        T1Law::new(
            JointPmf::uniform(sizes.alphabets(&[Var::X1]))?,
            JointPmf::uniform(sizes.alphabets(&[Var::X2]))?,
            CondPmf::uniform(sizes.alphabets(&[Var::X0]), sizes.alphabets(&[Var::X1, Var::X2]))?,
            CondPmf::uniform(sizes.alphabets(&[Var::Yh1]), sizes.alphabets(&[Var::X1, Var::Y1]))?,
            CondPmf::uniform(sizes.alphabets(&[Var::Yh2]), sizes.alphabets(&[Var::X2, Var::Y2]))?,
        )
    }

    /// Uniform inputs; each relay quantizes its observation `Yk` through a
    /// BSC with crossover `q` (`|Yk| = |Ŷk| = 2`).
    pub fn binary_quantizers(sizes: Sizes, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Config(format!("crossover {q} outside [0,1]")));
        }
        let sizes = sizes.with(Var::Yh1, 2).with(Var::Yh2, 2);
        for v in [Var::Y1, Var::Y2] {
            if sizes.get(v) != 2 {
                return Err(Error::Config(format!("{v} must be binary for a BSC quantizer")));
            }
        }
        let bsc = |g: &[usize], t: &[usize]| if g[1] == t[0] { 1.0 - q } else { q };
        let u = T1Law::uniform(sizes)?;
        T1Law::new(
            u.p_x1,
            u.p_x2,
            u.p_x0,
            CondPmf::from_fn("p(yh1|x1,y1)", sizes.alphabets(&[Var::Yh1]), sizes.alphabets(&[Var::X1, Var::Y1]), bsc)?,
            CondPmf::from_fn("p(yh2|x2,y2)", sizes.alphabets(&[Var::Yh2]), sizes.alphabets(&[Var::X2, Var::Y2]), bsc)?,
        )
    }

    pub fn check_channel(&self, channel: &NetworkChannel) -> Result<()> {
        let s = self.sizes()?;
        for v in [Var::X0, Var::X1, Var::X2, Var::Y1, Var::Y2] {
            match_channel(channel, v, s.get(v))?;
        }
        Ok(())
    }

    /// Flattened conditional slices in component order
    /// `p(x1), p(x2), p(x0|..), p(yh1|..), p(yh2|..)`.
    pub fn slices(&self) -> Vec<Vec<f64>> {
        let mut out = vec![self.p_x1.mass().to_vec(), self.p_x2.mass().to_vec()];
        for c in [&self.p_x0, &self.p_yh1, &self.p_yh2] {
            out.extend((0..c.num_slices()).map(|g| c.slice(g).to_vec()));
        }
        out
    }

    /// Rebuilds a law of the same shape from [`T1Law::slices`] output.
    pub fn with_slices(&self, slices: &[Vec<f64>]) -> Result<Self> {
        let mut it = slices.iter();
        let mut next = || {
            it.next()
                .cloned()
                .ok_or_else(|| Error::LengthMismatch("too few slices".into()))
        };
        let p_x1 = JointPmf::named("p(x1)", self.p_x1.axes().to_vec(), next()?)?;
        let p_x2 = JointPmf::named("p(x2)", self.p_x2.axes().to_vec(), next()?)?;
        let mut rebuild = |c: &CondPmf, name: &str| -> Result<CondPmf> {
            let mut mass = Vec::with_capacity(c.mass().len());
            for _ in 0..c.num_slices() {
                mass.extend(next()?);
            }
            CondPmf::new(name, c.target().to_vec(), c.given().to_vec(), mass)
        };
        let p_x0 = rebuild(&self.p_x0, "p(x0|x1,x2)")?;
        let p_yh1 = rebuild(&self.p_yh1, "p(yh1|x1,y1)")?;
        let p_yh2 = rebuild(&self.p_yh2, "p(yh2|x2,y2)")?;
        T1Law::new(p_x1, p_x2, p_x0, p_yh1, p_yh2)
    }
}

/// `p(x1) p(x2) p(v1|x1) p(v2|x2) p(x0|x1,x2,v1,v2) p(yh1|x1,v1,y1) p(yh2|x2,v2,y2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Law {
    pub p_x1: JointPmf,
    pub p_x2: JointPmf,
    pub p_v1: CondPmf,
    pub p_v2: CondPmf,
    pub p_x0: CondPmf,
    pub p_yh1: CondPmf,
    pub p_yh2: CondPmf,
}

impl T2Law {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p_x1: JointPmf,
        p_x2: JointPmf,
        p_v1: CondPmf,
        p_v2: CondPmf,
        p_x0: CondPmf,
        p_yh1: CondPmf,
        p_yh2: CondPmf,
    ) -> Result<Self> {
        expect_var("p(x1)", &p_x1, Var::X1)?;
        expect_var("p(x2)", &p_x2, Var::X2)?;
        expect_shape("p(v1|x1)", &p_v1, &[Var::V1], &[Var::X1])?;
        expect_shape("p(v2|x2)", &p_v2, &[Var::V2], &[Var::X2])?;
        expect_shape(
            "p(x0|x1,x2,v1,v2)",
            &p_x0,
            &[Var::X0],
            &[Var::X1, Var::X2, Var::V1, Var::V2],
        )?;
        expect_shape(
            "p(yh1|x1,v1,y1)",
            &p_yh1,
            &[Var::Yh1],
            &[Var::X1, Var::V1, Var::Y1],
        )?;
        expect_shape(
            "p(yh2|x2,v2,y2)",
            &p_yh2,
            &[Var::Yh2],
            &[Var::X2, Var::V2, Var::Y2],
        )?;
        let law = T2Law {
            p_x1,
            p_x2,
            p_v1,
            p_v2,
            p_x0,
            p_yh1,
            p_yh2,
        };
        law.sizes()?;
        Ok(law)
    }

    pub fn sizes(&self) -> Result<Sizes> {
        let mut s = Sizes([1; 10]);
        s.set(Var::X0, self.p_x0.size_of(Var::X0).unwrap_or(1));
        s.set(
            Var::X1,
            agree(
                Var::X1,
                &[
                    self.p_x1.size_of(Var::X1),
                    self.p_v1.size_of(Var::X1),
                    self.p_x0.size_of(Var::X1),
                    self.p_yh1.size_of(Var::X1),
                ],
            )?,
        );
        s.set(
            Var::X2,
            agree(
                Var::X2,
                &[
                    self.p_x2.size_of(Var::X2),
                    self.p_v2.size_of(Var::X2),
                    self.p_x0.size_of(Var::X2),
                    self.p_yh2.size_of(Var::X2),
                ],
            )?,
        );
        s.set(
            Var::V1,
            agree(
                Var::V1,
                &[
                    self.p_v1.size_of(Var::V1),
                    self.p_x0.size_of(Var::V1),
                    self.p_yh1.size_of(Var::V1),
                ],
            )?,
        );
        s.set(
            Var::V2,
            agree(
                Var::V2,
                &[
                    self.p_v2.size_of(Var::V2),
                    self.p_x0.size_of(Var::V2),
                    self.p_yh2.size_of(Var::V2),
                ],
            )?,
        );
        s.set(Var::Y1, self.p_yh1.size_of(Var::Y1).unwrap_or(1));
        s.set(Var::Y2, self.p_yh2.size_of(Var::Y2).unwrap_or(1));
        s.set(Var::Yh1, self.p_yh1.size_of(Var::Yh1).unwrap_or(1));
        s.set(Var::Yh2, self.p_yh2.size_of(Var::Yh2).unwrap_or(1));
        Ok(s)
    }

    pub fn uniform(sizes: Sizes) -> Result<Self> {
        let a = |v: &[Var]| sizes.alphabets(v);
        T2Law::new(
            JointPmf::uniform(a(&[Var::X1]))?,
            JointPmf::uniform(a(&[Var::X2]))?,
            CondPmf::uniform(a(&[Var::V1]), a(&[Var::X1]))?,
            CondPmf::uniform(a(&[Var::V2]), a(&[Var::X2]))?,
            CondPmf::uniform(a(&[Var::X0]), a(&[Var::X1, Var::X2, Var::V1, Var::V2]))?,
            CondPmf::uniform(a(&[Var::Yh1]), a(&[Var::X1, Var::V1, Var::Y1]))?,
            CondPmf::uniform(a(&[Var::Yh2]), a(&[Var::X2, Var::V2, Var::Y2]))?,
        )
    }

    pub fn check_channel(&self, channel: &NetworkChannel) -> Result<()> {
        let s = self.sizes()?;
        for v in [Var::X0, Var::X1, Var::X2, Var::Y1, Var::Y2] {
            match_channel(channel, v, s.get(v))?;
        }
        Ok(())
    }

    pub fn slices(&self) -> Vec<Vec<f64>> {
        let mut out = vec![self.p_x1.mass().to_vec(), self.p_x2.mass().to_vec()];
        for c in [&self.p_v1, &self.p_v2, &self.p_x0, &self.p_yh1, &self.p_yh2] {
            out.extend((0..c.num_slices()).map(|g| c.slice(g).to_vec()));
        }
        out
    }

    pub fn with_slices(&self, slices: &[Vec<f64>]) -> Result<Self> {
        let mut it = slices.iter();
        let mut next = || {
            it.next()
                .cloned()
                .ok_or_else(|| Error::LengthMismatch("too few slices".into()))
        };
        let p_x1 = JointPmf::named("p(x1)", self.p_x1.axes().to_vec(), next()?)?;
        let p_x2 = JointPmf::named("p(x2)", self.p_x2.axes().to_vec(), next()?)?;
        let mut rebuild = |c: &CondPmf, name: &str| -> Result<CondPmf> {
            let mut mass = Vec::with_capacity(c.mass().len());
            for _ in 0..c.num_slices() {
                mass.extend(next()?);
            }
            CondPmf::new(name, c.target().to_vec(), c.given().to_vec(), mass)
        };
        let p_v1 = rebuild(&self.p_v1, "p(v1|x1)")?;
        let p_v2 = rebuild(&self.p_v2, "p(v2|x2)")?;
        let p_x0 = rebuild(&self.p_x0, "p(x0|x1,x2,v1,v2)")?;
        let p_yh1 = rebuild(&self.p_yh1, "p(yh1|x1,v1,y1)")?;
        let p_yh2 = rebuild(&self.p_yh2, "p(yh2|x2,v2,y2)")?;
        T2Law::new(p_x1, p_x2, p_v1, p_v2, p_x0, p_yh1, p_yh2)
    }
}

fn joint_axes(sizes: &Sizes, vars: &[Var]) -> Vec<Alphabet> {
    sizes.alphabets(vars)
}

/// Joint pmf over `(X0,X1,X2,Y0,Y1,Y2,Yh1,Yh2)` for a compress-and-forward law.
pub fn assemble_joint_t1(channel: &NetworkChannel, law: &T1Law) -> Result<JointPmf> {
    law.check_channel(channel)?;
    let mut sizes = channel.sizes();
    let ls = law.sizes()?;
    sizes.set(Var::Yh1, ls.get(Var::Yh1));
    sizes.set(Var::Yh2, ls.get(Var::Yh2));
    let axes = joint_axes(
        &sizes,
        &[Var::X0, Var::X1, Var::X2, Var::Y0, Var::Y1, Var::Y2, Var::Yh1, Var::Yh2],
    );
    let mass = product(
        &axes,
        &[
            (&law.p_x1).into(),
            (&law.p_x2).into(),
            (&law.p_x0).into(),
            Factor::from(channel.kernel()),
            (&law.p_yh1).into(),
            (&law.p_yh2).into(),
        ],
    )?;
    JointPmf::named("t1 joint", axes, mass)
}

/// Joint pmf over all ten variables for a combined-scheme law.
pub fn assemble_joint_t2(channel: &NetworkChannel, law: &T2Law) -> Result<JointPmf> {
    law.check_channel(channel)?;
    let mut sizes = channel.sizes();
    let ls = law.sizes()?;
    for v in [Var::V1, Var::V2, Var::Yh1, Var::Yh2] {
        sizes.set(v, ls.get(v));
    }
    let axes = joint_axes(&sizes, &Var::ALL);
    let mass = product(
        &axes,
        &[
            (&law.p_x1).into(),
            (&law.p_x2).into(),
            (&law.p_v1).into(),
            (&law.p_v2).into(),
            (&law.p_x0).into(),
            Factor::from(channel.kernel()),
            (&law.p_yh1).into(),
            (&law.p_yh2).into(),
        ],
    )?;
    JointPmf::named("t2 joint", axes, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::VarSet;

    #[test]
    fn singleton_alphabets_give_unit_mass() {
        let ch = NetworkChannel::from_fn(Sizes([1; 10]), |_, _| 1.0).unwrap();
        let law = T1Law::uniform(ch.sizes()).unwrap();
        let j = assemble_joint_t1(&ch, &law).unwrap();
        assert_eq!(j.mass(), &[1.0]);
        let law2 = T2Law::uniform(ch.sizes()).unwrap();
        let j2 = assemble_joint_t2(&ch, &law2).unwrap();
        assert_eq!(j2.mass(), &[1.0]);
    }

    #[test]
    fn deterministic_law_concentrates_mass() {
        let ch = NetworkChannel::identity_direct();
        let s = ch.sizes();
        let law = T1Law::new(
            JointPmf::point(Var::X1, 2, 1).unwrap(),
            JointPmf::point(Var::X2, 2, 0).unwrap(),
            CondPmf::from_fn(
                "x0",
                s.alphabets(&[Var::X0]),
                s.alphabets(&[Var::X1, Var::X2]),
                |_, t| if t[0] == 1 { 1.0 } else { 0.0 },
            )
            .unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh1]), s.alphabets(&[Var::X1, Var::Y1])).unwrap(),
            CondPmf::uniform(s.alphabets(&[Var::Yh2]), s.alphabets(&[Var::X2, Var::Y2])).unwrap(),
        )
        .unwrap();
        let j = assemble_joint_t1(&ch, &law).unwrap();
        // (x0, x1, x2, y0, y1, y2, yh1, yh2) = (1, 1, 0, 1, 0, 0, 0, 0)
        assert_eq!(j.at(&[1, 1, 0, 1, 0, 0, 0, 0]), 1.0);
        assert_eq!(j.mass().iter().filter(|&&m| m > 0.0).count(), 1);
    }

    #[test]
    fn mismatched_law_is_rejected() {
        let ch = NetworkChannel::all_noise();
        let law = T1Law::uniform(Sizes([3, 2, 2, 2, 2, 2, 2, 2, 2, 2])).unwrap();
        assert!(matches!(
            assemble_joint_t1(&ch, &law),
            Err(Error::AlphabetMismatch { var: Var::X0, .. })
        ));
    }

    #[test]
    fn bsc_links_preset_marginals() {
        let ch = NetworkChannel::binary_symmetric_links(BscLinks {
            sender_dest: 0.1,
            sender_relay1: 0.2,
            sender_relay2: 0.3,
            relay1_dest: 0.0,
            relay2_dest: 0.5,
        })
        .unwrap();
        let law = T1Law::uniform(ch.sizes()).unwrap();
        let j = assemble_joint_t1(&ch, &law).unwrap();
        let xy1 = j.marginalize(VarSet::of(&[Var::X0, Var::Y1])).unwrap();
        assert!((xy1.at(&[0, 1]) - 0.5 * 0.2).abs() < 1e-15);
        assert!(NetworkChannel::binary_symmetric_links(BscLinks {
            sender_dest: 1.5,
            sender_relay1: 0.0,
            sender_relay2: 0.0,
            relay1_dest: 0.0,
            relay2_dest: 0.0,
        })
        .is_err());
    }

    #[test]
    fn slices_round_trip() {
        let ch = NetworkChannel::all_noise();
        let law = T2Law::uniform(ch.sizes()).unwrap();
        let back = law.with_slices(&law.slices()).unwrap();
        assert_eq!(back, law);
    }
}
