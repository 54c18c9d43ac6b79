//! Slit labels, open-slit configurations and the Sorkin combination.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slit {
    A,
    B,
    C,
}

impl Slit {
    pub const ALL: [Slit; 3] = [Slit::A, Slit::B, Slit::C];

    /// Centre position in units of the slit separation: A at +1, B at 0, C at −1.
    pub fn offset(self) -> f64 {
        match self {
            Slit::A => 1.0,
            Slit::B => 0.0,
            Slit::C => -1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lower and upper edge for separation `d` and width `w`.
    pub fn extent(self, separation: f64, width: f64) -> (f64, f64) {
        let centre = self.offset() * separation;
        (centre - 0.5 * width, centre + 0.5 * width)
    }
}

impl fmt::Display for Slit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Slit::A => 'A',
            Slit::B => 'B',
            Slit::C => 'C',
        };
        write!(f, "{c}")
    }
}

/// A non-empty set of open slits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlitSet(u8);

impl SlitSet {
    pub const ABC: SlitSet = SlitSet(0b111);

    pub fn new(slits: &[Slit]) -> Result<Self> {
        if slits.is_empty() {
            return Err(Error::InvalidSlits("at least one slit must be open".into()));
        }
        let mut bits = 0u8;
        for &s in slits {
            let bit = 1 << s.index();
            if bits & bit != 0 {
                return Err(Error::InvalidSlits(format!("slit {s} listed twice")));
            }
            bits |= bit;
        }
        Ok(SlitSet(bits))
    }

    pub fn single(slit: Slit) -> Self {
        SlitSet(1 << slit.index())
    }

    pub fn contains(self, slit: Slit) -> bool {
        self.0 & (1 << slit.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Slit> {
        Slit::ALL.into_iter().filter(move |&s| self.contains(s))
    }

    /// Ordered pairs (P, Q), P ≠ Q, of open slits.
    pub fn ordered_pairs(self) -> impl Iterator<Item = (Slit, Slit)> {
        self.iter()
            .flat_map(move |p| self.iter().filter(move |&q| q != p).map(move |q| (p, q)))
    }

    /// The seven configurations entering the Sorkin combination.
    pub fn configurations() -> [SlitSet; 7] {
        [
            SlitSet(0b111),
            SlitSet(0b011),
            SlitSet(0b110),
            SlitSet(0b101),
            SlitSet(0b001),
            SlitSet(0b010),
            SlitSet(0b100),
        ]
    }
}

impl fmt::Display for SlitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.iter() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// ε = I_ABC − (I_AB + I_BC + I_CA) + (I_A + I_B + I_C).
pub fn sorkin_combination(mut intensity: impl FnMut(SlitSet) -> f64) -> f64 {
    let [abc, ab, bc, ca, a, b, c] = SlitSet::configurations();
    intensity(abc) - (intensity(ab) + intensity(bc) + intensity(ca))
        + (intensity(a) + intensity(b) + intensity(c))
}

/// Per-slit classical amplitudes plus single-kink amplitudes ψ_{P,Q} at one
/// detector point. `kinked[p][q]` is the path source → P → Q → detector; the
/// diagonal is unused.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathAmplitudes {
    pub classical: [Complex64; 3],
    pub kinked: [[Complex64; 3]; 3],
}

impl PathAmplitudes {
    pub fn classical_only(classical: [Complex64; 3]) -> Self {
        Self {
            classical,
            kinked: Default::default(),
        }
    }

    pub fn kink(&self, p: Slit, q: Slit) -> Complex64 {
        self.kinked[p.index()][q.index()]
    }

    /// Total amplitude with the slits in `set` open: classical terms of the
    /// open slits plus kinks between ordered pairs of open slits.
    pub fn amplitude(&self, set: SlitSet) -> Complex64 {
        let classical: Complex64 = set.iter().map(|s| self.classical[s.index()]).sum();
        let kinked: Complex64 = set.ordered_pairs().map(|(p, q)| self.kink(p, q)).sum();
        classical + kinked
    }

    pub fn intensity(&self, set: SlitSet) -> f64 {
        self.amplitude(set).norm_sqr()
    }

    /// Sorkin numerator from the seven configuration intensities.
    pub fn epsilon_full(&self) -> f64 {
        sorkin_combination(|s| self.intensity(s))
    }

    /// 2 Re[ψ*_A(ψ_BC + ψ_CB) + ψ*_B(ψ_AC + ψ_CA) + ψ*_C(ψ_AB + ψ_BA)],
    /// dropping products of two kink amplitudes.
    pub fn epsilon_first_order(&self) -> f64 {
        use Slit::*;
        let term = |r: Slit, p: Slit, q: Slit| {
            self.classical[r.index()].conj() * (self.kink(p, q) + self.kink(q, p))
        };
        2.0 * (term(A, B, C) + term(B, A, C) + term(C, A, B)).re
    }

    /// Largest kink amplitude modulus.
    pub fn max_kink(&self) -> f64 {
        SlitSet::ABC
            .ordered_pairs()
            .map(|(p, q)| self.kink(p, q).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn configuration_sets() {
        let names: Vec<String> = SlitSet::configurations().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["ABC", "AB", "BC", "AC", "A", "B", "C"]);
        assert!(SlitSet::new(&[]).is_err());
        assert!(SlitSet::new(&[Slit::A, Slit::A]).is_err());
        assert_eq!(SlitSet::ABC.ordered_pairs().count(), 6);
        assert_eq!(SlitSet::single(Slit::B).ordered_pairs().count(), 0);
    }

    #[test]
    fn extents() {
        assert_eq!(Slit::A.extent(100.0, 30.0), (85.0, 115.0));
        assert_eq!(Slit::B.extent(100.0, 30.0), (-15.0, 15.0));
        assert_eq!(Slit::C.extent(100.0, 30.0), (-115.0, -85.0));
    }

    #[test]
    fn single_kink_gives_nonzero_epsilon() {
        let mut amps = PathAmplitudes::classical_only([c(1.0, 0.0); 3]);
        amps.kinked[0][2] = c(0.01, 0.0);
        // ψ_AC enters I_ABC and I_AC only; ε = 2 Re[ψ_B* ψ_AC].
        assert!((amps.epsilon_full() - 0.02).abs() < 1e-15);
        assert!((amps.epsilon_first_order() - 0.02).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn additive_intensities_cancel(
            re in prop::array::uniform3(-10.0f64..10.0),
            im in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let amps = PathAmplitudes::classical_only([
                c(re[0], im[0]), c(re[1], im[1]), c(re[2], im[2]),
            ]);
            let scale = amps.intensity(SlitSet::ABC).max(1.0);
            prop_assert!(amps.epsilon_full().abs() <= 1e-12 * scale);
        }

        #[test]
        fn first_order_matches_full_to_second_order(
            re in prop::array::uniform3(0.5f64..2.0),
            kinks in prop::array::uniform6(-1e-4f64..1e-4),
        ) {
            let mut amps = PathAmplitudes::classical_only([c(re[0], 0.3), c(re[1], -0.2), c(re[2], 0.1)]);
            let mut it = kinks.iter();
            for (p, q) in SlitSet::ABC.ordered_pairs() {
                let v = *it.next().unwrap();
                amps.kinked[p.index()][q.index()] = c(v, 0.5 * v);
            }
            let diff = (amps.epsilon_full() - amps.epsilon_first_order()).abs();
            prop_assert!(diff <= 20.0 * amps.max_kink().powi(2) + 1e-14);
        }
    }
}
