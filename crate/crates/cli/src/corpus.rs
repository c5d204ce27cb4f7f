//! The bundled example corpus.

use serde::Serialize;

use crate::InputKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "expect", rename_all = "snake_case")]
pub enum Expectation {
    /// `verify` passes with this Euler characteristic.
    Verify { euler_characteristic: usize },
    /// Validation rejects the input with a witness of this class.
    Reject { witness_class: &'static str },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Example {
    pub name: &'static str,
    pub file: &'static str,
    pub kind: InputKind,
    pub description: &'static str,
    #[serde(flatten)]
    pub expectation: Expectation,
    #[serde(skip)]
    pub source: &'static str,
}

impl Example {
    pub fn is_positive(&self) -> bool {
        matches!(self.expectation, Expectation::Verify { .. })
    }
}

macro_rules! example {
    ($name:literal, $file:literal, $kind:ident, $desc:literal, $exp:expr) => {
        Example {
            name: $name,
            file: $file,
            kind: InputKind::$kind,
            description: $desc,
            expectation: $exp,
            source: include_str!(concat!("../corpus/", $file)),
        }
    };
}

const fn chi(euler_characteristic: usize) -> Expectation {
    Expectation::Verify {
        euler_characteristic,
    }
}

const fn reject(witness_class: &'static str) -> Expectation {
    Expectation::Reject { witness_class }
}

pub const EXAMPLES: &[Example] = &[
    example!("p1", "p1.fan.json", Fan, "projective line", chi(2)),
    example!("p2", "p2.fan.json", Fan, "projective plane", chi(3)),
    example!("p3", "p3.fan.json", Fan, "projective 3-space", chi(4)),
    example!("p4", "p4.fan.json", Fan, "projective 4-space", chi(5)),
    example!(
        "p1xp1",
        "p1xp1.fan.json",
        Fan,
        "product of two projective lines",
        chi(4)
    ),
    example!(
        "p1xp1xp1",
        "p1xp1xp1.fan.json",
        Fan,
        "product of three projective lines",
        chi(8)
    ),
    example!(
        "hirzebruch0",
        "hirzebruch0.fan.json",
        Fan,
        "Hirzebruch surface F_0",
        chi(4)
    ),
    example!(
        "hirzebruch1",
        "hirzebruch1.fan.json",
        Fan,
        "Hirzebruch surface F_1",
        chi(4)
    ),
    example!(
        "hirzebruch2",
        "hirzebruch2.fan.json",
        Fan,
        "Hirzebruch surface F_2",
        chi(4)
    ),
    example!(
        "hirzebruch3",
        "hirzebruch3.fan.json",
        Fan,
        "Hirzebruch surface F_3",
        chi(4)
    ),
    example!(
        "bl1p2",
        "bl1p2.fan.json",
        Fan,
        "projective plane blown up at one fixed point",
        chi(4)
    ),
    example!(
        "bl2p2",
        "bl2p2.fan.json",
        Fan,
        "projective plane blown up at two fixed points",
        chi(5)
    ),
    example!(
        "bl3p2",
        "bl3p2.fan.json",
        Fan,
        "projective plane blown up at three fixed points",
        chi(6)
    ),
    example!(
        "square-quasitoric",
        "square-quasitoric.cp.json",
        CharPair,
        "quasitoric manifold over the square",
        chi(4)
    ),
    example!(
        "halfplane",
        "halfplane.fan.json",
        Fan,
        "fan covering a half-plane",
        reject("incomplete")
    ),
    example!(
        "singular",
        "singular.fan.json",
        Fan,
        "complete fan with a cone of determinant 2",
        reject("singular")
    ),
    example!(
        "nonstandard",
        "nonstandard.cp.json",
        CharPair,
        "square with a vertex that is not locally standard",
        reject("not_unimodular")
    ),
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use toric_kring::fan::{to_char_pair, Fan, FanData};

    fn fan_of(name: &str) -> Fan {
        let data: FanData = serde_json::from_str(find(name).unwrap().source).unwrap();
        Fan::from_data(&data).unwrap()
    }

    #[test]
    fn has_enough_entries() {
        assert!(EXAMPLES.len() >= 14);
        assert_eq!(EXAMPLES.iter().filter(|e| !e.is_positive()).count(), 3);
    }

    #[test]
    fn files_match_the_constructors() {
        for n in 1..=4 {
            assert_eq!(fan_of(&format!("p{n}")), Fan::projective_space(n));
        }
        for a in 0..=3 {
            assert_eq!(fan_of(&format!("hirzebruch{a}")), Fan::hirzebruch(a));
        }
        let p1 = Fan::projective_space(1);
        let square = to_char_pair(&p1.product(&p1)).unwrap();
        assert_eq!(
            to_char_pair(&fan_of("p1xp1")).unwrap().lambda(),
            square.lambda()
        );
        let cube = p1.product(&p1).product(&p1);
        assert_eq!(fan_of("p1xp1xp1").rays(), cube.rays());
    }

    #[test]
    fn file_names_carry_the_kind() {
        for e in EXAMPLES {
            let suffix = match e.kind {
                InputKind::Fan => ".fan.json",
                InputKind::CharPair => ".cp.json",
            };
            assert!(e.file.ends_with(suffix), "{}", e.file);
        }
    }
}
