use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, ParseError, Result};
use crate::state::{make_state, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedState {
    pub name: &'static str,
    /// Accepted parameter names, all optional and defaulting to zero.
    pub params: &'static [&'static str],
    pub description: &'static str,
}

const NAMED: &[NamedState] = &[
    NamedState {
        name: "zero",
        params: &[],
        description: "|0>",
    },
    NamedState {
        name: "one",
        params: &[],
        description: "|1>",
    },
    NamedState {
        name: "plus",
        params: &[],
        description: "(|0> + |1>)/sqrt(2)",
    },
    NamedState {
        name: "minus",
        params: &[],
        description: "(|0> - |1>)/sqrt(2)",
    },
    NamedState {
        name: "plus-i",
        params: &[],
        description: "(|0> + i|1>)/sqrt(2)",
    },
    NamedState {
        name: "minus-i",
        params: &[],
        description: "(|0> - i|1>)/sqrt(2)",
    },
    NamedState {
        name: "bell",
        params: &["alpha"],
        description: "(|00> + e^(i alpha)|11>)/sqrt(2)",
    },
    NamedState {
        name: "ghz",
        params: &["alpha"],
        description: "(|000> + e^(i alpha)|111>)/sqrt(2)",
    },
    NamedState {
        name: "w",
        params: &[],
        description: "(|001> + |010> + |100>)/sqrt(3)",
    },
    NamedState {
        name: "w-gsd",
        params: &[],
        description: "(|000> + |101> + |110>)/sqrt(3), the W class in its decomposed form",
    },
    NamedState {
        name: "plus-zero",
        params: &[],
        description: "|+>|0>, a two-qubit product state",
    },
    NamedState {
        name: "partial2",
        params: &[],
        description: "(|00> + |01> + |11>)/sqrt(3), concurrence 2/3",
    },
    NamedState {
        name: "product3",
        params: &[],
        description: "|+>|0>|+i>, a three-qubit product state",
    },
    NamedState {
        name: "general3",
        params: &[],
        description: "a fixed three-qubit state with all five decomposed terms present",
    },
];

pub fn named_states() -> &'static [NamedState] {
    NAMED
}

pub fn is_named_state(name: &str) -> bool {
    NAMED.iter().any(|n| n.name == name)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sparse(n: usize, terms: &[(usize, Complex64)]) -> Result<StateVector> {
    let mut amps = vec![c(0.0, 0.0); 1 << n];
    for &(k, a) in terms {
        amps[k] = a;
    }
    make_state(&amps, n)
}

/// Build a named state. Names are matched exactly (lower case).
pub fn named_state(name: &str, args: &[f64]) -> Result<StateVector> {
    let entry = NAMED
        .iter()
        .find(|n| n.name == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))?;
    if args.len() > entry.params.len() {
        return Err(Error::Parse(ParseError::at(
            "",
            0,
            format!(
                "`{name}` takes at most {} parameter(s), got {}",
                entry.params.len(),
                args.len()
            ),
        )));
    }
    let alpha = args.first().copied().unwrap_or(0.0);
    let one = c(1.0, 0.0);
    let h = FRAC_1_SQRT_2;
    match name {
        "zero" => sparse(1, &[(0, one)]),
        "one" => sparse(1, &[(1, one)]),
        "plus" => sparse(1, &[(0, one), (1, one)]),
        "minus" => sparse(1, &[(0, one), (1, -one)]),
        "plus-i" => sparse(1, &[(0, one), (1, c(0.0, 1.0))]),
        "minus-i" => sparse(1, &[(0, one), (1, c(0.0, -1.0))]),
        "bell" => sparse(2, &[(0, one), (3, Complex64::from_polar(1.0, alpha))]),
        "ghz" => sparse(3, &[(0, one), (7, Complex64::from_polar(1.0, alpha))]),
        "w" => sparse(3, &[(1, one), (2, one), (4, one)]),
        "w-gsd" => sparse(3, &[(0, one), (5, one), (6, one)]),
        "plus-zero" => sparse(2, &[(0, one), (2, one)]),
        "partial2" => sparse(2, &[(0, one), (1, one), (3, one)]),
        "product3" => {
            let q = [c(h, 0.0), c(h, 0.0)];
            let r = [one, c(0.0, 0.0)];
            let s = [c(h, 0.0), c(0.0, h)];
            let mut amps = Vec::with_capacity(8);
            for a in q {
                for b in r {
                    for d in s {
                        amps.push(a * b * d);
                    }
                }
            }
            make_state(&amps, 3)
        }
        _ => sparse(
            3,
            &[
                (0, c(0.62, 0.0)),
                (4, c(0.21, 0.18)),
                (5, c(0.33, 0.0)),
                (6, c(0.0, 0.41)),
                (7, c(-0.27, 0.35)),
            ],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for n in named_states() {
            let s = named_state(n.name, &[]).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-14, "{}", n.name);
        }
    }

    #[test]
    fn listing_contains_the_figure_states() {
        for name in ["ghz", "w", "w-gsd", "bell"] {
            assert!(is_named_state(name));
        }
    }

    #[test]
    fn parameters() {
        let s = named_state("bell", &[std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((s.amplitude(3) - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(matches!(named_state("w", &[1.0]), Err(Error::Parse(_))));
        assert!(matches!(named_state("nope", &[]), Err(Error::UnknownName(_))));
    }
}
