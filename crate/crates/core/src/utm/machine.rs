//! The frozen monotone machine. The encoding is fixed by `machine.json` and
//! must not change without bumping its version (which rotates the hash and
//! invalidates enumeration caches).

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MACHINE_DEFINITION: &str = include_str!("../../machine.json");

/// Hex SHA-256 of the machine definition file.
pub fn machine_hash() -> String {
    hex::encode(Sha256::digest(MACHINE_DEFINITION.as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Out0,
    Out1,
    OutR,
    NotR,
    ReadP,
    ReadA,
    Loop,
    Halt,
}

impl Op {
    pub const ALL: [Op; 8] = [Op::Out0, Op::Out1, Op::OutR, Op::NotR, Op::ReadP, Op::ReadA, Op::Loop, Op::Halt];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Op {
        Op::ALL[(code & 7) as usize]
    }

    pub fn bits(self) -> [u8; 3] {
        let c = self.code();
        [(c >> 2) & 1, (c >> 1) & 1, c & 1]
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Op::Out0 => "OUT0",
            Op::Out1 => "OUT1",
            Op::OutR => "OUTR",
            Op::NotR => "NOTR",
            Op::ReadP => "READP",
            Op::ReadA => "READA",
            Op::Loop => "LOOP",
            Op::Halt => "HALT",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// Concatenated opcodes, no data bits.
pub fn assemble(ops: &[Op]) -> Vec<u8> {
    ops.iter().flat_map(|op| op.bits()).collect()
}

/// Parses a `0`/`1` string into program bits.
pub fn parse_bits(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    /// Emits the whole interleaved string; `READA` halts.
    Joint,
    /// Emits percepts only and reads actions on demand.
    Chron,
}

/// Worked example programs shipped with the machine.
pub mod examples {
    use super::{assemble, Op};

    /// `OUT0 LOOP`: all zeros on either machine.
    pub fn constant_zero() -> Vec<u8> {
        assemble(&[Op::Out0, Op::Loop])
    }

    /// `READA OUTR LOOP`: percept equals action.
    pub fn echo() -> Vec<u8> {
        assemble(&[Op::ReadA, Op::OutR, Op::Loop])
    }

    /// `READA NOTR OUTR LOOP`: percept is the complemented action.
    pub fn complement() -> Vec<u8> {
        assemble(&[Op::ReadA, Op::NotR, Op::OutR, Op::Loop])
    }

    /// `READP OUTR OUTR LOOP` followed by data bits `d_1 d_2 …`, with `d_1`
    /// placed right after the first opcode. Emits `d_1 d_1 d_2 d_2 …`.
    pub fn copy(data: &[u8]) -> Vec<u8> {
        let mut p = Vec::new();
        p.extend(Op::ReadP.bits());
        if let Some(&d) = data.first() {
            p.push(d);
        }
        p.extend(assemble(&[Op::OutR, Op::OutR, Op::Loop]));
        p.extend(data.iter().skip(1));
        p
    }

    /// Code length of [`copy`] excluding data bits.
    pub const COPY_CODE_BITS: usize = 12;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pending {
    Fetch { got: u8, value: u8 },
    Data,
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    /// The machine wants another program bit.
    NeedBit,
    /// Step budget exhausted.
    OutOfSteps,
    Halted,
    /// An action read was not admissible yet.
    Suspended,
    /// Output reached the requested depth.
    Depth,
}

/// Interpreter state. Cheap to clone, which is how enumeration branches.
#[derive(Clone, Debug)]
pub struct State {
    kind: MachineKind,
    code: Vec<Op>,
    pending: Option<Pending>,
    pc: usize,
    r: u8,
    pub steps: u64,
    pub bits_read: usize,
    pub actions_read: usize,
    pub output: Vec<u8>,
}

impl State {
    pub fn new(kind: MachineKind) -> Self {
        State {
            kind,
            code: Vec::new(),
            pending: None,
            pc: 0,
            r: 0,
            steps: 0,
            bits_read: 0,
            actions_read: 0,
            output: Vec::new(),
        }
    }

    /// Supplies the program bit requested by the last [`Stop::NeedBit`].
    pub fn feed(&mut self, bit: u8) {
        self.bits_read += 1;
        match self.pending.take() {
            Some(Pending::Fetch { got, value }) => {
                let value = (value << 1) | (bit & 1);
                if got + 1 == 3 {
                    self.code.push(Op::from_code(value));
                } else {
                    self.pending = Some(Pending::Fetch { got: got + 1, value });
                }
            }
            Some(Pending::Data) => {
                self.r = bit & 1;
                self.pc += 1;
            }
            None => panic!("feed without a pending read"),
        }
    }

    /// Runs until the machine needs input or stops, calling `emit` with the
    /// output (after appending) for every emitted symbol.
    pub fn run(&mut self, actions: &[u8], max_steps: u64, depth: usize, mut emit: impl FnMut(&State)) -> Stop {
        loop {
            if self.output.len() >= depth {
                return Stop::Depth;
            }
            if self.pending.is_some() {
                return Stop::NeedBit;
            }
            if self.pc == self.code.len() {
                self.pending = Some(Pending::Fetch { got: 0, value: 0 });
                continue;
            }
            if self.steps >= max_steps {
                return Stop::OutOfSteps;
            }
            let op = self.code[self.pc];
            match op {
                Op::ReadA if self.kind == MachineKind::Joint => {
                    self.steps += 1;
                    return Stop::Halted;
                }
                Op::ReadA => {
                    let j = self.actions_read + 1;
                    if j > self.output.len() + 1 || j > actions.len() {
                        return Stop::Suspended;
                    }
                    self.steps += 1;
                    self.r = actions[j - 1] & 1;
                    self.actions_read = j;
                    self.pc += 1;
                }
                Op::Halt => {
                    self.steps += 1;
                    return Stop::Halted;
                }
                Op::ReadP => {
                    self.steps += 1;
                    self.pending = Some(Pending::Data);
                }
                Op::Out0 | Op::Out1 | Op::OutR => {
                    self.steps += 1;
                    let s = match op {
                        Op::Out0 => 0,
                        Op::Out1 => 1,
                        _ => self.r,
                    };
                    self.output.push(s);
                    self.pc += 1;
                    emit(self);
                }
                Op::NotR => {
                    self.steps += 1;
                    self.r ^= 1;
                    self.pc += 1;
                }
                Op::Loop => {
                    self.steps += 1;
                    self.pc = 0;
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutput {
    pub output: Vec<u8>,
    /// Program bits actually read.
    pub consumed: usize,
    pub steps: u64,
    pub stop: Stop,
}

/// Runs `program` on the joint machine (`actions = None`) or the
/// chronological machine with the given action tape, for at most `budget`
/// steps. Running out of program bits ends the run with [`Stop::NeedBit`].
pub fn run_program(program: &[u8], actions: Option<&[u8]>, budget: u64) -> RunOutput {
    let (kind, tape) = match actions {
        Some(a) => (MachineKind::Chron, a),
        None => (MachineKind::Joint, &[][..]),
    };
    let mut st = State::new(kind);
    let stop = loop {
        match st.run(tape, budget, usize::MAX, |_| ()) {
            Stop::NeedBit if st.bits_read < program.len() => st.feed(program[st.bits_read]),
            other => break other,
        }
    };
    RunOutput { output: st.output, consumed: st.bits_read, steps: st.steps, stop }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn definition_matches_opcodes() {
        let def: serde_json::Value = serde_json::from_str(MACHINE_DEFINITION).unwrap();
        let ops = def["opcodes"].as_array().unwrap();
        for (op, entry) in Op::ALL.iter().zip(ops) {
            let bits: String = op.bits().iter().map(|b| b.to_string()).collect();
            assert_eq!(entry["code"], bits.as_str());
            assert_eq!(entry["name"], op.mnemonic());
        }
        let ex = def["examples"].as_array().unwrap();
        let bits = |v: Vec<u8>| v.iter().map(|b| b.to_string()).collect::<String>();
        assert_eq!(ex[0]["program"], bits(constant_zero()).as_str());
        assert_eq!(ex[1]["program"], bits(echo()).as_str());
        assert_eq!(ex[2]["program"], bits(complement()).as_str());
        assert_eq!(machine_hash().len(), 64);
    }

    #[test]
    fn example_lengths() {
        assert_eq!(constant_zero().len(), 6);
        assert_eq!(echo().len(), 9);
        assert_eq!(complement().len(), 12);
        assert_eq!(copy(&[1]).len(), COPY_CODE_BITS + 1);
    }

    #[test]
    fn constant_zero_runs() {
        let r = run_program(&constant_zero(), None, 100);
        assert_eq!(r.output, vec![0; 50]);
        assert_eq!(r.consumed, 6);
        assert_eq!(r.stop, Stop::OutOfSteps);
    }

    #[test]
    fn empty_program() {
        let r = run_program(&[], None, 100);
        assert!(r.output.is_empty());
        assert_eq!(r.consumed, 0);
        assert_eq!(r.stop, Stop::NeedBit);
    }

    #[test]
    fn echo_and_complement() {
        let r = run_program(&echo(), Some(&[1, 0]), 100);
        assert_eq!(r.output, vec![1, 0]);
        assert_eq!(r.stop, Stop::Suspended);
        let r = run_program(&complement(), Some(&[1, 0, 0]), 100);
        assert_eq!(r.output, vec![0, 1, 1]);
        // the joint machine halts on READA
        assert_eq!(run_program(&echo(), None, 100).stop, Stop::Halted);
    }

    #[test]
    fn copy_program() {
        let r = run_program(&copy(&[1, 0, 1]), None, 1000);
        assert_eq!(r.output, vec![1, 1, 0, 0, 1, 1]);
        assert_eq!(r.stop, Stop::NeedBit);
        assert_eq!(r.consumed, 15);
    }

    #[test]
    fn action_reads_respect_discipline() {
        // READA READA OUTR: the second read would need a_2 before e_1
        let p = assemble(&[Op::ReadA, Op::ReadA, Op::OutR]);
        let r = run_program(&p, Some(&[1, 1]), 100);
        assert!(r.output.is_empty());
        assert_eq!(r.stop, Stop::Suspended);
    }

    #[test]
    fn output_is_monotone_in_budget() {
        for code in 0u32..(1 << 9) {
            let p: Vec<u8> = (0..9).rev().map(|i| ((code >> i) & 1) as u8).collect();
            let mut prev = run_program(&p, None, 0).output;
            for s in 1..40 {
                let out = run_program(&p, None, s).output;
                assert!(out.starts_with(&prev), "{p:?} at {s}");
                prev = out;
            }
        }
    }
}
