//! Maze modules and the train/test sequence sets built from them.
//!
//! Training holds three kinds of sequence: bare door associations (context
//! begin then context end), door associations wrapped around each
//! context-attached maze, and every independent maze on its own. The test
//! set wraps each independent maze in each door association, a combination
//! never seen during training.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::TaskConfig;
use crate::encoder::{encode_response, encode_room, EncodingDims, Room, RoomKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MazeRole {
    ContextAttached,
    Independent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MazeModule {
    pub maze_id: usize,
    pub role: MazeRole,
    /// Entry-room door followed by one door per interior room.
    pub doors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    #[serde(with = "bits")]
    pub input: Vec<f64>,
    #[serde(with = "bits")]
    pub target: Vec<f64>,
    pub room_kind: RoomKind,
}

impl Step {
    fn new(room: Room, response: usize, dims: &EncodingDims) -> Result<Self> {
        Ok(Self {
            input: encode_room(room, dims)?,
            target: encode_response(response, dims)?,
            room_kind: room.kind(),
        })
    }

    pub fn target_index(&self) -> usize {
        crate::encoder::argmax(&self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    DoorAssociation,
    ContextMaze,
    IndependentMaze,
    TestComposite,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub door: Option<usize>,
    pub maze_id: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub kind: SequenceKind,
    pub provenance: Provenance,
    pub steps: Vec<Step>,
}

impl Sequence {
    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.steps.iter().map(|s| s.input.clone()).collect()
    }

    pub fn target_indices(&self) -> Vec<usize> {
        self.steps.iter().map(Step::target_index).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn door_association(door: usize, dims: &EncodingDims) -> Result<Sequence> {
    Ok(Sequence {
        kind: SequenceKind::DoorAssociation,
        provenance: Provenance {
            door: Some(door),
            maze_id: None,
        },
        steps: vec![
            Step::new(Room::ContextBegin { door }, door, dims)?,
            Step::new(Room::ContextEnd, door, dims)?,
        ],
    })
}

fn maze_steps(maze: &MazeModule, dims: &EncodingDims) -> Result<Vec<Step>> {
    let (entry, interior) = maze
        .doors
        .split_first()
        .ok_or_else(|| Error::Malformed(format!("maze {} has no doors", maze.maze_id)))?;
    let mut steps = vec![Step::new(Room::MazeEntry { maze: maze.maze_id }, *entry, dims)?];
    for door in interior {
        steps.push(Step::new(Room::MazeInterior, *door, dims)?);
    }
    Ok(steps)
}

pub fn independent_maze(maze: &MazeModule, dims: &EncodingDims) -> Result<Sequence> {
    Ok(Sequence {
        kind: SequenceKind::IndependentMaze,
        provenance: Provenance {
            door: None,
            maze_id: Some(maze.maze_id),
        },
        steps: maze_steps(maze, dims)?,
    })
}

/// Context begin, the maze's rooms, context end. `kind` is either
/// [`SequenceKind::ContextMaze`] or [`SequenceKind::TestComposite`].
pub fn context_maze(
    door: usize,
    maze: &MazeModule,
    kind: SequenceKind,
    dims: &EncodingDims,
) -> Result<Sequence> {
    let mut steps = vec![Step::new(Room::ContextBegin { door }, door, dims)?];
    steps.extend(maze_steps(maze, dims)?);
    steps.push(Step::new(Room::ContextEnd, door, dims)?);
    Ok(Sequence {
        kind,
        provenance: Provenance {
            door: Some(door),
            maze_id: Some(maze.maze_id),
        },
        steps,
    })
}

/// Draws every maze's door sequence uniformly. Context-attached mazes take
/// ids `0..num_context_mazes`, independent mazes the rest.
pub fn generate_maze_modules<R: Rng + ?Sized>(config: &TaskConfig, rng: &mut R) -> Vec<MazeModule> {
    (0..config.num_mazes())
        .map(|maze_id| MazeModule {
            maze_id,
            role: if maze_id < config.num_context_mazes {
                MazeRole::ContextAttached
            } else {
                MazeRole::Independent
            },
            doors: (0..=config.maze_length)
                .map(|_| rng.gen_range(0..config.num_doors))
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub config: TaskConfig,
    pub dims: EncodingDims,
    pub mazes: Vec<MazeModule>,
    pub train: Vec<Sequence>,
    pub test: Vec<Sequence>,
}

pub fn generate_dataset(config: &TaskConfig) -> Result<Dataset> {
    config.validate()?;
    let dims = EncodingDims::from_config(config);
    if dims.input_width() == 0 {
        return Err(Error::InvalidConfig("input width is zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mazes = generate_maze_modules(config, &mut rng);
    let (context, independent) = mazes.split_at(config.num_context_mazes);
    let doors = 0..config.num_doors;

    let mut train = Vec::new();
    for door in doors.clone() {
        train.push(door_association(door, &dims)?);
    }
    for door in doors.clone() {
        for maze in context {
            train.push(context_maze(door, maze, SequenceKind::ContextMaze, &dims)?);
        }
    }
    for maze in independent {
        train.push(independent_maze(maze, &dims)?);
    }

    let mut test = Vec::new();
    for door in doors {
        for maze in independent {
            test.push(context_maze(door, maze, SequenceKind::TestComposite, &dims)?);
        }
    }

    Ok(Dataset {
        config: config.clone(),
        dims,
        mazes,
        train,
        test,
    })
}

impl Dataset {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let dataset: Dataset = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        dataset.check()?;
        Ok(dataset)
    }

    /// Structural consistency of a deserialized dataset.
    pub fn check(&self) -> Result<()> {
        self.config.validate()?;
        if self.dims != EncodingDims::from_config(&self.config) {
            return Err(Error::Malformed("dims disagree with config".into()));
        }
        for maze in &self.mazes {
            if maze.doors.len() != self.dims.maze_length + 1
                || maze.doors.iter().any(|d| *d >= self.dims.doors)
            {
                return Err(Error::Malformed(format!("maze {} is inconsistent", maze.maze_id)));
            }
        }
        for seq in self.train.iter().chain(&self.test) {
            if seq.len() > self.dims.window_steps() {
                return Err(Error::WindowOverflow {
                    steps: seq.len(),
                    capacity: self.dims.window_steps(),
                });
            }
            for step in &seq.steps {
                crate::encoder::check_width(self.dims.input_width(), step.input.len())?;
                crate::encoder::check_width(self.dims.output_width(), step.target.len())?;
                if step.target.iter().filter(|v| **v == 1.0).count() != 1 {
                    return Err(Error::Malformed("target is not one-hot".into()));
                }
            }
        }
        Ok(())
    }
}

/// Serializes {0.0, 1.0} vectors as integer 0/1 arrays.
mod bits {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| u8::from(*v != 0.0)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(0.0),
                1 => Ok(1.0),
                other => Err(D::Error::custom(format!("expected 0 or 1, got {other}"))),
            })
            .collect()
    }
}
