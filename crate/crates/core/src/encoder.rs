//! Fixed-layout bit vectors for rooms and responses, plus the sliding
//! window fed to the sequence network.
//!
//! Input layout, with `d` doors and `m` mazes:
//!
//! ```text
//! [context-begin marks: d][maze-entry marks: m][interior mark: 1][context-end marks: d]
//! ```
//!
//! A window is slot-major with `maze_length + 3` slots of one input each.
//! Start alignment puts step `i` in slot `i`; recent alignment puts the
//! current step in slot 0 and step `t - k` in slot `k`. Unused slots are zero.

use serde::{Deserialize, Serialize};

use crate::config::TaskConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoomKind {
    ContextBegin,
    MazeEntry,
    MazeInterior,
    ContextEnd,
}

/// A room together with the identifier its marks carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Room {
    ContextBegin { door: usize },
    MazeEntry { maze: usize },
    MazeInterior,
    ContextEnd,
}

impl Room {
    pub fn kind(&self) -> RoomKind {
        match self {
            Room::ContextBegin { .. } => RoomKind::ContextBegin,
            Room::MazeEntry { .. } => RoomKind::MazeEntry,
            Room::MazeInterior => RoomKind::MazeInterior,
            Room::ContextEnd => RoomKind::ContextEnd,
        }
    }
}

/// Where step inputs sit in the window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowAlignment {
    /// Slot `i` holds step `i`.
    Start,
    /// Slot `k` holds step `t - k`, so slot 0 is always the current room.
    /// A maze module then occupies the same slots whether or not a context
    /// room precedes it.
    #[default]
    Recent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingDims {
    pub doors: usize,
    pub mazes: usize,
    pub maze_length: usize,
}

impl EncodingDims {
    pub fn new(doors: usize, mazes: usize, maze_length: usize) -> Self {
        Self {
            doors,
            mazes,
            maze_length,
        }
    }

    pub fn from_config(config: &TaskConfig) -> Self {
        Self::new(config.num_doors, config.num_mazes(), config.maze_length)
    }

    pub fn input_width(&self) -> usize {
        2 * self.doors + self.mazes + 1
    }

    /// Doors plus the wait response.
    pub fn output_width(&self) -> usize {
        self.doors + 1
    }

    /// Longest sequence: context begin, entry, interiors, context end.
    pub fn window_steps(&self) -> usize {
        self.maze_length + 3
    }

    pub fn window_width(&self) -> usize {
        self.window_steps() * self.input_width()
    }

    pub fn wait_index(&self) -> usize {
        self.doors
    }

    fn entry_offset(&self) -> usize {
        self.doors
    }

    fn interior_offset(&self) -> usize {
        self.doors + self.mazes
    }

    fn end_offset(&self) -> usize {
        self.doors + self.mazes + 1
    }
}

pub fn encode_room(room: Room, dims: &EncodingDims) -> Result<Vec<f64>> {
    let mut input = vec![0.0; dims.input_width()];
    match room {
        Room::ContextBegin { door } => {
            check_range("door", door, dims.doors)?;
            input[door] = 1.0;
        }
        Room::MazeEntry { maze } => {
            check_range("maze", maze, dims.mazes)?;
            input[dims.entry_offset() + maze] = 1.0;
        }
        Room::MazeInterior => input[dims.interior_offset()] = 1.0,
        Room::ContextEnd => input[dims.end_offset()..].fill(1.0),
    }
    Ok(input)
}

/// Recovers the room from an input vector. Exactly one section may be
/// active and it must hold a pattern `encode_room` can produce.
pub fn decode_room(input: &[f64], dims: &EncodingDims) -> Result<Room> {
    check_width(dims.input_width(), input.len())?;
    let on = |range: std::ops::Range<usize>| -> Vec<usize> {
        range.filter(|&i| input[i] != 0.0).collect()
    };
    if let Some(bad) = input.iter().find(|v| **v != 0.0 && **v != 1.0) {
        return Err(Error::Malformed(format!("non-binary mark value {bad}")));
    }
    let begin = on(0..dims.entry_offset());
    let entry = on(dims.entry_offset()..dims.interior_offset());
    let interior = on(dims.interior_offset()..dims.end_offset());
    let end = on(dims.end_offset()..dims.input_width());

    let active = [&begin, &entry, &interior, &end]
        .iter()
        .filter(|s| !s.is_empty())
        .count();
    if active != 1 {
        return Err(Error::Malformed(format!(
            "expected exactly one active input section, found {active}"
        )));
    }
    match (begin.as_slice(), entry.as_slice(), interior.len(), end.len()) {
        ([door], [], 0, 0) => Ok(Room::ContextBegin { door: *door }),
        ([], [maze], 0, 0) => Ok(Room::MazeEntry {
            maze: maze - dims.entry_offset(),
        }),
        ([], [], 1, 0) => Ok(Room::MazeInterior),
        ([], [], 0, n) if n == dims.doors => Ok(Room::ContextEnd),
        _ => Err(Error::Malformed("active section is not a valid room pattern".into())),
    }
}

/// One-hot response vector; `index == dims.doors` is the wait response.
pub fn encode_response(index: usize, dims: &EncodingDims) -> Result<Vec<f64>> {
    check_range("response", index, dims.output_width())?;
    let mut out = vec![0.0; dims.output_width()];
    out[index] = 1.0;
    Ok(out)
}

pub fn decode_response(output: &[f64]) -> usize {
    argmax(output)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Start-aligned window of the inputs seen up to and including step `t`.
pub fn build_window(inputs: &[Vec<f64>], t: usize, dims: &EncodingDims) -> Result<Vec<f64>> {
    build_window_aligned(inputs, t, dims, WindowAlignment::Start)
}

pub fn build_window_aligned(
    inputs: &[Vec<f64>],
    t: usize,
    dims: &EncodingDims,
    alignment: WindowAlignment,
) -> Result<Vec<f64>> {
    if inputs.len() > dims.window_steps() {
        return Err(Error::WindowOverflow {
            steps: inputs.len(),
            capacity: dims.window_steps(),
        });
    }
    if t >= inputs.len() {
        return Err(Error::StepOutOfRange {
            step: t,
            len: inputs.len(),
        });
    }
    let width = dims.input_width();
    let mut window = vec![0.0; dims.window_width()];
    for (i, input) in inputs[..=t].iter().enumerate() {
        check_width(width, input.len())?;
        let slot = match alignment {
            WindowAlignment::Start => i,
            WindowAlignment::Recent => t - i,
        };
        window[slot * width..(slot + 1) * width].copy_from_slice(input);
    }
    Ok(window)
}

fn check_range(what: &'static str, index: usize, limit: usize) -> Result<()> {
    if index >= limit {
        return Err(Error::OutOfRange { what, index, limit });
    }
    Ok(())
}

pub(crate) fn check_width(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::WidthMismatch { expected, actual });
    }
    Ok(())
}
