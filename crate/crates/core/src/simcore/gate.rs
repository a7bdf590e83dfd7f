use core::fmt;

use num_complex::Complex64;

/// Maximum gate arity supported by the dense simulator.
pub const MAX_ARITY: usize = 3;

/// A concrete gate with any rotation angles already evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    R1(f64),
    Rz(f64),
    Cnot,
    Swap,
    Toffoli,
    Cswap,
}

/// Dense unitary of a gate, at most 8x8.
#[derive(Clone, Debug)]
pub struct GateMatrix {
    pub dim: usize,
    pub m: [[Complex64; 8]; 8],
}

impl GateMatrix {
    fn zero(dim: usize) -> Self {
        GateMatrix {
            dim,
            m: [[Complex64::new(0.0, 0.0); 8]; 8],
        }
    }

    fn from_rows(rows: &[&[Complex64]]) -> Self {
        let mut g = GateMatrix::zero(rows.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                g.m[i][j] = v;
            }
        }
        g
    }

    /// Permutation matrix sending basis state `i` to `perm[i]`.
    fn permutation(perm: &[usize]) -> Self {
        let mut g = GateMatrix::zero(perm.len());
        for (i, &p) in perm.iter().enumerate() {
            g.m[p][i] = Complex64::new(1.0, 0.0);
        }
        g
    }

    /// Max-norm of `G†G - I`; zero for an exact unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.m[k][i].conj() * self.m[k][j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                let d = (acc - Complex64::new(expect, 0.0)).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::X
            | Gate::Y
            | Gate::Z
            | Gate::H
            | Gate::S
            | Gate::Sdg
            | Gate::T
            | Gate::Tdg
            | Gate::R1(_)
            | Gate::Rz(_) => 1,
            Gate::Cnot | Gate::Swap => 2,
            Gate::Toffoli | Gate::Cswap => 3,
        }
    }

    /// The inverse gate; `matrix(inverse) = matrix(self)†`.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S => Gate::Sdg,
            Gate::Sdg => Gate::S,
            Gate::T => Gate::Tdg,
            Gate::Tdg => Gate::T,
            Gate::R1(theta) => Gate::R1(-theta),
            Gate::Rz(theta) => Gate::Rz(-theta),
            g => g,
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *self {
            Gate::X => GateMatrix::from_rows(&[&[zero, one], &[one, zero]]),
            Gate::Y => GateMatrix::from_rows(&[&[zero, -i], &[i, zero]]),
            Gate::Z => GateMatrix::from_rows(&[&[one, zero], &[zero, -one]]),
            Gate::H => GateMatrix::from_rows(&[&[h, h], &[h, -h]]),
            Gate::S => GateMatrix::from_rows(&[&[one, zero], &[zero, i]]),
            Gate::Sdg => GateMatrix::from_rows(&[&[one, zero], &[zero, -i]]),
            Gate::T => Gate::R1(core::f64::consts::FRAC_PI_4).matrix(),
            Gate::Tdg => Gate::R1(-core::f64::consts::FRAC_PI_4).matrix(),
            Gate::R1(theta) => {
                let p = Complex64::new(libm::cos(theta), libm::sin(theta));
                GateMatrix::from_rows(&[&[one, zero], &[zero, p]])
            }
            Gate::Rz(theta) => {
                let m = Complex64::new(libm::cos(theta / 2.0), -libm::sin(theta / 2.0));
                let p = Complex64::new(libm::cos(theta / 2.0), libm::sin(theta / 2.0));
                GateMatrix::from_rows(&[&[m, zero], &[zero, p]])
            }
            // Qubit 0 of the gate operand is the most significant index bit,
            // so |10> (control set, target clear) is row/column 2.
            Gate::Cnot => GateMatrix::permutation(&[0, 1, 3, 2]),
            Gate::Swap => GateMatrix::permutation(&[0, 2, 1, 3]),
            Gate::Toffoli => GateMatrix::permutation(&[0, 1, 2, 3, 4, 5, 7, 6]),
            Gate::Cswap => GateMatrix::permutation(&[0, 1, 2, 3, 4, 6, 5, 7]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::H => "h",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::T => "t",
            Gate::Tdg => "tdg",
            Gate::R1(_) => "r1",
            Gate::Rz(_) => "rz",
            Gate::Cnot => "cnot",
            Gate::Swap => "swap",
            Gate::Toffoli => "toffoli",
            Gate::Cswap => "cswap",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::R1(t) => write!(f, "r1({t})"),
            Gate::Rz(t) => write!(f, "rz({t})"),
            g => f.write_str(g.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_sample_gates() -> alloc::vec::Vec<Gate> {
        alloc::vec![
            Gate::X,
            Gate::Y,
            Gate::Z,
            Gate::H,
            Gate::S,
            Gate::Sdg,
            Gate::T,
            Gate::Tdg,
            Gate::R1(0.3),
            Gate::R1(-2.1),
            Gate::Rz(1.7),
            Gate::Cnot,
            Gate::Swap,
            Gate::Toffoli,
            Gate::Cswap,
        ]
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in all_sample_gates() {
            assert!(
                g.matrix().unitarity_defect() < 1e-12,
                "{g} fails unitarity"
            );
        }
    }

    #[test]
    fn inverse_matrix_is_conjugate_transpose() {
        for g in all_sample_gates() {
            let m = g.matrix();
            let inv = g.inverse().matrix();
            for a in 0..m.dim {
                for b in 0..m.dim {
                    let d = (inv.m[a][b] - m.m[b][a].conj()).norm();
                    assert!(d < 1e-12, "{g}: inverse is not the adjoint");
                }
            }
        }
    }

    #[test]
    fn s_inverse_is_sdg() {
        assert_eq!(Gate::S.inverse(), Gate::Sdg);
        assert_eq!(Gate::Tdg.inverse(), Gate::T);
        assert_eq!(Gate::R1(0.5).inverse(), Gate::R1(-0.5));
    }
}
