//! Models whose levels are residue rings or coset spaces given by formulas.

use super::assemble;
use crate::error::{invalid, Result};
use crate::model::{ChainModel, GeneratorAlphabet};

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// The odometer `lim Z/(n_1⋯n_ℓ)` with the single generator `t = +1`.
pub fn build_odometer(arities: &[usize]) -> Result<ChainModel> {
    if let Some(&a) = arities.iter().find(|&&a| a < 2) {
        return Err(invalid(format!("odometer arity {a} is below 2")));
    }
    let mut moduli = vec![1usize];
    for &a in arities {
        let next = moduli.last().unwrap().checked_mul(a).ok_or_else(|| invalid("odometer too large"))?;
        moduli.push(next);
    }
    let alphabet = GeneratorAlphabet::new(["t"])?;
    let name = format!(
        "odometer({})",
        arities.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    assemble(
        name,
        alphabet,
        &moduli,
        |l, _, x| (x + 1) % moduli[l],
        |l, x| x % moduli[l - 1],
    )
}

/// Infinite dihedral group `⟨t, s⟩` acting on `Z/p^ℓ` by `t: x ↦ x+1` and
/// `s: x ↦ −x`. The construction is a reconstruction; the metadata name
/// says so.
pub fn build_dihedral(p: u64, depth: usize) -> Result<ChainModel> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(invalid(format!("dihedral model needs an odd prime, got {p}")));
    }
    if depth == 0 {
        return Err(invalid("dihedral model needs depth at least 1"));
    }
    let p = p as usize;
    let moduli: Vec<usize> = (0..=depth as u32).map(|l| p.pow(l)).collect();
    let alphabet = GeneratorAlphabet::with_involutions(vec!["t".into(), "s".into()], vec![false, true])?;
    assemble(
        format!("dihedral(p={p}, reconstructed)"),
        alphabet,
        &moduli,
        |l, g, x| {
            let n = moduli[l];
            match g {
                0 => (x + 1) % n,
                _ => (n - x) % n,
            }
        },
        |l, x| x % moduli[l - 1],
    )
}

/// Coset space of `G_n = {(p^n a, q^n b, p^n c)}` in the discrete Heisenberg
/// group with law `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x y')`.
///
/// Right multiplication by `G_n` shifts `z` by `x·q^n b`, so the naive
/// residue `z mod p^n` is not a coset invariant. The complete invariant used
/// here is `(x mod p^n, y mod q^n, (z − x·(y − ȳ)) mod p^n)` where
/// `ȳ = y mod q^n`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HeisenbergLevel {
    pub pn: i128,
    pub qn: i128,
}

impl HeisenbergLevel {
    pub fn new(p: u64, q: u64, n: u32) -> Self {
        HeisenbergLevel {
            pn: (p as i128).pow(n),
            qn: (q as i128).pow(n),
        }
    }

    pub fn size(&self) -> usize {
        (self.pn * self.pn * self.qn) as usize
    }

    pub fn canon(&self, (x, y, z): (i128, i128, i128)) -> (i128, i128, i128) {
        let yb = y.rem_euclid(self.qn);
        let zb = (z - x * (y - yb)).rem_euclid(self.pn);
        (x.rem_euclid(self.pn), yb, zb)
    }

    pub fn index(&self, (x, y, z): (i128, i128, i128)) -> usize {
        (x + self.pn * (y + self.qn * z)) as usize
    }

    pub fn decode(&self, idx: usize) -> (i128, i128, i128) {
        let i = idx as i128;
        let x = i % self.pn;
        let y = (i / self.pn) % self.qn;
        let z = i / (self.pn * self.qn);
        (x, y, z)
    }
}

pub(crate) fn heisenberg_mul(a: (i128, i128, i128), b: (i128, i128, i128)) -> (i128, i128, i128) {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2 + a.0 * b.1)
}

/// Heisenberg chain for distinct primes `p`, `q`, with generators
/// `X = (1,0,0)`, `Y = (0,1,0)`, `Z = (0,0,1)` acting by left translation.
pub fn build_heisenberg(p: u64, q: u64, depth: usize) -> Result<ChainModel> {
    if !is_prime(p) || !is_prime(q) {
        return Err(invalid(format!("Heisenberg chain needs primes, got {p} and {q}")));
    }
    if p == q {
        return Err(invalid("Heisenberg chain needs distinct primes"));
    }
    if depth == 0 {
        return Err(invalid("Heisenberg chain needs depth at least 1"));
    }
    let levels: Vec<HeisenbergLevel> =
        (0..=depth as u32).map(|n| HeisenbergLevel::new(p, q, n)).collect();
    let sizes: Vec<usize> = levels.iter().map(HeisenbergLevel::size).collect();
    let gens = [(1, 0, 0), (0, 1, 0), (0, 0, 1)];
    assemble(
        format!("heisenberg(p={p}, q={q})"),
        GeneratorAlphabet::new(["X", "Y", "Z"])?,
        &sizes,
        |l, g, idx| {
            let lv = &levels[l];
            lv.index(lv.canon(heisenberg_mul(gens[g], lv.decode(idx))))
        },
        |l, idx| {
            let lower = &levels[l - 1];
            lower.index(lower.canon(levels[l].decode(idx)))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_chain, Word};

    #[test]
    fn binary_odometer_level_three_is_eight_cycle() {
        let m = build_odometer(&[2, 2, 2]).unwrap();
        assert_eq!(m.point_count(3), 8);
        let t = m.level_image(&Word::power(0, 1), 3).unwrap();
        assert_eq!(t.order(), 8);
        assert_eq!(t.cycles(), "(0 1 2 3 4 5 6 7)");
    }

    #[test]
    fn odometer_power_is_trivial_at_level() {
        let m = build_odometer(&[2, 3, 2]).unwrap();
        for (l, n) in [(1, 2i64), (2, 6), (3, 12)] {
            assert!(m.level_image(&Word::power(0, n), l).unwrap().is_identity());
            assert!(!m.level_image(&Word::power(0, n - 1), l).unwrap().is_identity());
        }
    }

    #[test]
    fn odometer_rejects_small_arity() {
        assert!(build_odometer(&[2, 1]).is_err());
    }

    #[test]
    fn dihedral_relations() {
        let m = build_dihedral(3, 3).unwrap();
        assert!(validate_chain(&m).is_valid());
        let al = m.alphabet();
        for l in 0..=3 {
            let ss = Word::new(vec![crate::model::Letter::plain(1); 2]);
            assert!(m.level_image(&ss, l).unwrap().is_identity());
            let sts = al.parse_word("s*t*s").unwrap();
            assert_eq!(
                m.level_image(&sts, l).unwrap(),
                m.level_image(&al.parse_word("t^-1").unwrap(), l).unwrap()
            );
        }
        assert!(build_dihedral(9, 2).is_err());
        assert!(build_dihedral(2, 2).is_err());
    }

    #[test]
    fn heisenberg_level_sizes() {
        let m = build_heisenberg(2, 3, 2).unwrap();
        assert_eq!(m.point_count(1), 12);
        assert_eq!(m.point_count(2), 144);
        assert!(build_heisenberg(3, 3, 1).is_err());
    }

    #[test]
    fn heisenberg_z_has_order_two_at_level_one() {
        let m = build_heisenberg(2, 3, 1).unwrap();
        let z = m.alphabet().parse_word("Z").unwrap();
        assert_eq!(m.level_image(&z, 1).unwrap().order(), 2);
    }

    #[test]
    fn heisenberg_commutator_is_z() {
        let m = build_heisenberg(2, 3, 2).unwrap();
        let al = m.alphabet();
        let comm = al.parse_word("X*Y*X^-1*Y^-1").unwrap();
        let z = al.parse_word("Z").unwrap();
        for l in 0..=2 {
            assert_eq!(m.level_image(&comm, l).unwrap(), m.level_image(&z, l).unwrap());
        }
    }

    #[test]
    fn canonical_form_is_a_coset_invariant() {
        let lv = HeisenbergLevel::new(2, 3, 2);
        let h = (3, 7, 5);
        for a in -2..=2 {
            for b in -2..=2 {
                for c in -2..=2 {
                    let g = (lv.pn * a, lv.qn * b, lv.pn * c);
                    assert_eq!(lv.canon(heisenberg_mul(h, g)), lv.canon(h));
                }
            }
        }
    }
}
