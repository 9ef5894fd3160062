//! The single-qubit states `|0⟩, |1⟩, |+⟩, |−⟩`, the four product
//! preparations, the entangled ξ-basis and its forbidden-outcome table.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{inner, tensor, Amplitude, Basis, StateVector, TOL};

/// One-based index of a ξ-basis vector, `ξ(1)..ξ(4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct XiIndex(u8);

impl XiIndex {
    pub const ALL: [XiIndex; 4] = [XiIndex(1), XiIndex(2), XiIndex(3), XiIndex(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Self(index))
        } else {
            Err(Error::InvalidArgument(format!("xi index {index} not in 1..=4")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based position in [`xi_basis`].
    pub fn position(self) -> usize {
        usize::from(self.0) - 1
    }
}

impl fmt::Display for XiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xi{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SingleChoice {
    Zero,
    Plus,
}

impl SingleChoice {
    pub fn symbol(self) -> &'static str {
        match self {
            SingleChoice::Zero => "0",
            SingleChoice::Plus => "+",
        }
    }
}

/// Choice of `|0⟩` or `|+⟩` on each of the two independent preparation devices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Preparation {
    pub a_choice: SingleChoice,
    pub b_choice: SingleChoice,
}

impl Preparation {
    pub const ALL: [Preparation; 4] = [
        Preparation::new(SingleChoice::Zero, SingleChoice::Zero),
        Preparation::new(SingleChoice::Zero, SingleChoice::Plus),
        Preparation::new(SingleChoice::Plus, SingleChoice::Zero),
        Preparation::new(SingleChoice::Plus, SingleChoice::Plus),
    ];

    pub const fn new(a_choice: SingleChoice, b_choice: SingleChoice) -> Self {
        Self { a_choice, b_choice }
    }

    /// Short label such as `0+`.
    pub fn label(self) -> String {
        format!("{}{}", self.a_choice.symbol(), self.b_choice.symbol())
    }
}

impl fmt::Display for Preparation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩|{}⟩", self.a_choice.symbol(), self.b_choice.symbol())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleStates {
    pub zero: StateVector,
    pub one: StateVector,
    pub plus: StateVector,
    pub minus: StateVector,
}

impl SingleStates {
    /// Lookup by symbol: `"0"`, `"1"`, `"+"`, `"-"` (or `"−"`).
    pub fn get(&self, symbol: &str) -> Option<&StateVector> {
        match symbol {
            "0" => Some(&self.zero),
            "1" => Some(&self.one),
            "+" => Some(&self.plus),
            "-" | "−" => Some(&self.minus),
            _ => None,
        }
    }

    pub fn choice(&self, choice: SingleChoice) -> &StateVector {
        match choice {
            SingleChoice::Zero => &self.zero,
            SingleChoice::Plus => &self.plus,
        }
    }
}

pub fn single_states() -> SingleStates {
    let zero = StateVector::basis_state(2, 0).expect("valid");
    let one = StateVector::basis_state(2, 1).expect("valid");
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    let plus = zero.add(&one).and_then(|s| s.scale(h)).expect("finite");
    let minus = zero.add(&one.scale(-Amplitude::new(1.0, 0.0)).expect("finite")).and_then(|s| s.scale(h)).expect("finite");
    SingleStates { zero, one, plus, minus }
}

pub fn prepared_state(p: Preparation) -> StateVector {
    let s = single_states();
    tensor(s.choice(p.a_choice), s.choice(p.b_choice))
}

/// `(|x⟩|y⟩ + |z⟩|w⟩)/√2`
fn entangled_pair(x: &StateVector, y: &StateVector, z: &StateVector, w: &StateVector) -> StateVector {
    tensor(x, y)
        .add(&tensor(z, w))
        .and_then(|s| s.scale(Amplitude::new(FRAC_1_SQRT_2, 0.0)))
        .expect("finite")
}

/// The four entangled basis vectors, assembled from the single-qubit states.
pub fn xi_basis() -> Basis {
    let s = single_states();
    let vectors = vec![
        entangled_pair(&s.zero, &s.one, &s.one, &s.zero),
        entangled_pair(&s.zero, &s.minus, &s.one, &s.plus),
        entangled_pair(&s.plus, &s.one, &s.minus, &s.zero),
        entangled_pair(&s.plus, &s.minus, &s.minus, &s.plus),
    ];
    let labels = XiIndex::ALL.iter().map(|j| j.to_string()).collect();
    Basis::new(vectors, labels).expect("xi vectors are orthonormal")
}

pub fn xi(index: XiIndex) -> StateVector {
    xi_basis().vectors()[index.position()].clone()
}

/// Preparation → the ξ outcome it assigns zero probability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForbiddenTable {
    entries: [(Preparation, XiIndex); 4],
}

impl ForbiddenTable {
    pub fn get(&self, p: Preparation) -> XiIndex {
        self.entries
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, k)| *k)
            .expect("table covers every preparation")
    }

    pub fn entries(&self) -> &[(Preparation, XiIndex); 4] {
        &self.entries
    }

    pub fn is_bijective(&self) -> bool {
        XiIndex::ALL
            .iter()
            .all(|k| self.entries.iter().filter(|(_, j)| j == k).count() == 1)
    }
}

/// The forbidden-outcome table, each entry checked against the overlap
/// `⟨prepared|ξ(k)⟩`.
pub fn forbidden_table() -> Result<ForbiddenTable> {
    let entries = [
        (Preparation::ALL[0], XiIndex(1)),
        (Preparation::ALL[1], XiIndex(2)),
        (Preparation::ALL[2], XiIndex(3)),
        (Preparation::ALL[3], XiIndex(4)),
    ];
    let basis = xi_basis();
    for (p, k) in entries {
        let overlap = inner(&prepared_state(p), &basis.vectors()[k.position()])?.norm();
        if overlap >= TOL {
            return Err(Error::Consistency(format!(
                "preparation {p} has overlap {overlap:e} with {k}"
            )));
        }
    }
    let table = ForbiddenTable { entries };
    if !table.is_bijective() {
        return Err(Error::Consistency("forbidden table is not a bijection".into()));
    }
    Ok(table)
}
