//! Seeded random channels and laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::Result;
use crate::network::{NetworkChannel, Sizes, T1Law, T2Law};
use crate::pmf::{CondPmf, JointPmf};
use crate::var::Var;

/// Independent stream `index` of the generator seeded by `master`.
pub fn rng_for(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// A point drawn uniformly from the `k`-simplex (Dirichlet with all
/// concentrations 1).
pub fn dirichlet1<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        w.iter_mut().for_each(|x| *x /= s);
    } else {
        w = vec![1.0 / k as f64; k];
    }
    w
}

fn random_cond<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    sizes: &Sizes,
    target: &[Var],
    given: &[Var],
) -> Result<CondPmf> {
    let t = sizes.alphabets(target);
    let g = sizes.alphabets(given);
    let tlen: usize = t.iter().map(|a| a.size).product();
    let glen: usize = g.iter().map(|a| a.size).product();
    let mass: Vec<f64> = (0..glen).flat_map(|_| dirichlet1(rng, tlen)).collect();
    CondPmf::new(name, t, g, mass)
}

fn random_marginal<R: Rng + ?Sized>(rng: &mut R, sizes: &Sizes, v: Var) -> Result<JointPmf> {
    JointPmf::over(v, dirichlet1(rng, sizes.get(v)))
}

/// Random channel kernel with the given sizes; each input row is an
/// independent uniform simplex draw.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, sizes: Sizes) -> Result<NetworkChannel> {
    let kernel = random_cond(
        rng,
        "channel",
        &sizes,
        &[Var::Y0, Var::Y1, Var::Y2],
        &[Var::X0, Var::X1, Var::X2],
    )?;
    NetworkChannel::new(sizes, kernel)
}

pub fn random_t1_law<R: Rng + ?Sized>(rng: &mut R, sizes: Sizes) -> Result<T1Law> {
    T1Law::new(
        random_marginal(rng, &sizes, Var::X1)?,
        random_marginal(rng, &sizes, Var::X2)?,
        random_cond(rng, "p(x0|x1,x2)", &sizes, &[Var::X0], &[Var::X1, Var::X2])?,
        random_cond(rng, "p(yh1|x1,y1)", &sizes, &[Var::Yh1], &[Var::X1, Var::Y1])?,
        random_cond(rng, "p(yh2|x2,y2)", &sizes, &[Var::Yh2], &[Var::X2, Var::Y2])?,
    )
}

pub fn random_t2_law<R: Rng + ?Sized>(rng: &mut R, sizes: Sizes) -> Result<T2Law> {
    T2Law::new(
        random_marginal(rng, &sizes, Var::X1)?,
        random_marginal(rng, &sizes, Var::X2)?,
        random_cond(rng, "p(v1|x1)", &sizes, &[Var::V1], &[Var::X1])?,
        random_cond(rng, "p(v2|x2)", &sizes, &[Var::V2], &[Var::X2])?,
        random_cond(
            rng,
            "p(x0|x1,x2,v1,v2)",
            &sizes,
            &[Var::X0],
            &[Var::X1, Var::X2, Var::V1, Var::V2],
        )?,
        random_cond(
            rng,
            "p(yh1|x1,v1,y1)",
            &sizes,
            &[Var::Yh1],
            &[Var::X1, Var::V1, Var::Y1],
        )?,
        random_cond(
            rng,
            "p(yh2|x2,v2,y2)",
            &sizes,
            &[Var::Yh2],
            &[Var::X2, Var::V2, Var::Y2],
        )?,
    )
}

/// Mixes every slice of `p` toward uniform: `lambda * p + (1 - lambda) / k`.
pub fn temper(p: &CondPmf, lambda: f64) -> Result<CondPmf> {
    let k = p.target_len() as f64;
    let mass = p.mass().iter().map(|&x| lambda * x + (1.0 - lambda) / k).collect();
    CondPmf::new("tempered", p.target().to_vec(), p.given().to_vec(), mass)
}

/// Random law whose compression kernels are pulled toward uniform by a
/// random amount, so both feasible and infeasible instances are common.
pub fn random_t1_law_tempered<R: Rng + ?Sized>(rng: &mut R, sizes: Sizes) -> Result<T1Law> {
    let mut law = random_t1_law(rng, sizes)?;
    let lambda: f64 = rng.random();
    law.p_yh1 = temper(&law.p_yh1, lambda)?;
    law.p_yh2 = temper(&law.p_yh2, lambda)?;
    Ok(law)
}

/// Two-auxiliary counterpart of [`random_t1_law_tempered`].
pub fn random_t2_law_tempered<R: Rng + ?Sized>(rng: &mut R, sizes: Sizes) -> Result<T2Law> {
    let mut law = random_t2_law(rng, sizes)?;
    let lambda: f64 = rng.random();
    law.p_yh1 = temper(&law.p_yh1, lambda)?;
    law.p_yh2 = temper(&law.p_yh2, lambda)?;
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_is_on_simplex() {
        let mut rng = rng_for(7, 0);
        for k in 1..6 {
            let p = dirichlet1(&mut rng, k);
            assert_eq!(p.len(), k);
            assert!(p.iter().all(|&x| x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = dirichlet1(&mut rng_for(1, 3), 4);
        let b: Vec<f64> = dirichlet1(&mut rng_for(1, 3), 4);
        let c: Vec<f64> = dirichlet1(&mut rng_for(1, 4), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
