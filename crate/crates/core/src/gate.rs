//! Primitive gate library for the netlist IR.

use serde::{Deserialize, Serialize};

/// Maximum truth-table width for `Table` gates.
pub const MAX_TABLE_WIDTH: u8 = 6;

/// A logic primitive. `Table` holds an explicit truth table (bit `k` is the
/// output for the input assignment whose binary encoding is `k`, fanin 0 as
/// the least significant bit). `Mux2` has fanin order `(sel, a, b)` and
/// outputs `a` when `sel = 0`, `b` when `sel = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    Const0,
    Const1,
    Buf,
    Not,
    And(u8),
    Or(u8),
    Nand(u8),
    Nor(u8),
    Xor,
    Xnor,
    Mux2,
    Table { width: u8, bits: u64 },
    Dff,
}

impl GateKind {
    /// Number of fanins this kind requires.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Const0 | GateKind::Const1 => 0,
            GateKind::Buf | GateKind::Not | GateKind::Dff => 1,
            GateKind::And(n) | GateKind::Or(n) | GateKind::Nand(n) | GateKind::Nor(n) => {
                *n as usize
            }
            GateKind::Xor | GateKind::Xnor => 2,
            GateKind::Mux2 => 3,
            GateKind::Table { width, .. } => *width as usize,
        }
    }

    /// Checks the arity bounds from the gate library (n-ary gates take 2..=4
    /// inputs, tables at most [`MAX_TABLE_WIDTH`]).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            GateKind::And(n) | GateKind::Or(n) | GateKind::Nand(n) | GateKind::Nor(n) => {
                if !(2..=4).contains(n) {
                    return Err(format!("n-ary gate arity {n} outside [2,4]"));
                }
            }
            GateKind::Table { width, .. } => {
                if *width > MAX_TABLE_WIDTH {
                    return Err(format!(
                        "table width {width} exceeds cap {MAX_TABLE_WIDTH}"
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `true` for the sequential element.
    pub fn is_dff(&self) -> bool {
        matches!(self, GateKind::Dff)
    }

    /// Combinational evaluation. `Dff` is not evaluated here (the simulator
    /// reads its state instead).
    pub fn eval(&self, inputs: &[bool]) -> bool {
        debug_assert_eq!(inputs.len(), self.arity());
        match self {
            GateKind::Const0 => false,
            GateKind::Const1 => true,
            GateKind::Buf => inputs[0],
            GateKind::Not => !inputs[0],
            GateKind::And(_) => inputs.iter().all(|&b| b),
            GateKind::Or(_) => inputs.iter().any(|&b| b),
            GateKind::Nand(_) => !inputs.iter().all(|&b| b),
            GateKind::Nor(_) => !inputs.iter().any(|&b| b),
            GateKind::Xor => inputs[0] ^ inputs[1],
            GateKind::Xnor => !(inputs[0] ^ inputs[1]),
            GateKind::Mux2 => {
                if inputs[0] {
                    inputs[2]
                } else {
                    inputs[1]
                }
            }
            GateKind::Table { bits, .. } => {
                let mut k = 0usize;
                for (j, &v) in inputs.iter().enumerate() {
                    if v {
                        k |= 1 << j;
                    }
                }
                (bits >> k) & 1 == 1
            }
            GateKind::Dff => panic!("DFF evaluated combinationally"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_and_eval() {
        assert_eq!(GateKind::And(3).arity(), 3);
        assert!(GateKind::And(3).eval(&[true, true, true]));
        assert!(!GateKind::And(3).eval(&[true, false, true]));
        assert!(GateKind::Xor.eval(&[true, false]));
        assert!(GateKind::Mux2.eval(&[false, true, false]));
        assert!(GateKind::Mux2.eval(&[true, false, true]));
        // AND2 as a table: bits 0001 -> only k=3 true.
        let t = GateKind::Table { width: 2, bits: 0b1000 };
        assert!(t.eval(&[true, true]));
        assert!(!t.eval(&[true, false]));
    }

    #[test]
    fn arity_bounds() {
        assert!(GateKind::And(5).validate().is_err());
        assert!(GateKind::Table { width: 7, bits: 0 }.validate().is_err());
        assert!(GateKind::Nor(2).validate().is_ok());
    }
}
