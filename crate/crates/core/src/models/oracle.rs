use serde::{Deserialize, Serialize};

use crate::encoder::{decode_room, EncodingDims, Room};
use crate::error::{Error, Result};
use crate::maze::Dataset;

/// Rule-based reference that reads the room marks and replays the task's
/// rules from explicit memory: the context door, the current maze and the
/// position inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleModel {
    pub dims: EncodingDims,
    /// Door sequence per maze id.
    pub mazes: Vec<Vec<usize>>,
}

impl OracleModel {
    pub fn new(dims: EncodingDims) -> Self {
        Self {
            dims,
            mazes: Vec::new(),
        }
    }

    pub fn fit(&mut self, dataset: &Dataset) -> Result<()> {
        let mut table = vec![Vec::new(); dataset.mazes.len()];
        for maze in &dataset.mazes {
            let slot = table.get_mut(maze.maze_id).ok_or(Error::OutOfRange {
                what: "maze",
                index: maze.maze_id,
                limit: dataset.mazes.len(),
            })?;
            *slot = maze.doors.clone();
        }
        self.mazes = table;
        Ok(())
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<usize>> {
        oracle_predict(inputs, &self.dims, &self.mazes)
    }
}

pub fn oracle_predict(inputs: &[Vec<f64>], dims: &EncodingDims, mazes: &[Vec<usize>]) -> Result<Vec<usize>> {
    let mut context_door = None;
    let mut current: Option<&[usize]> = None;
    let mut position = 0;
    inputs
        .iter()
        .map(|input| match decode_room(input, dims)? {
            Room::ContextBegin { door } => {
                context_door = Some(door);
                Ok(door)
            }
            Room::MazeEntry { maze } => {
                let doors = mazes
                    .get(maze)
                    .filter(|d| !d.is_empty())
                    .ok_or_else(|| Error::Malformed(format!("unknown maze id {maze}")))?;
                current = Some(doors);
                position = 0;
                Ok(doors[0])
            }
            Room::MazeInterior => {
                position += 1;
                current
                    .ok_or_else(|| Error::Malformed("interior room before any maze entry".into()))?
                    .get(position)
                    .copied()
                    .ok_or_else(|| Error::Malformed("more interior rooms than the maze has".into()))
            }
            Room::ContextEnd => {
                context_door.ok_or_else(|| Error::Malformed("context end without context begin".into()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::encode_room;

    #[test]
    fn worked_example() {
        let dims = EncodingDims::new(3, 6, 3);
        let mut mazes = vec![vec![0; 4]; 6];
        mazes[3] = vec![2, 2, 0, 2];
        let rooms = [
            Room::ContextBegin { door: 0 },
            Room::MazeEntry { maze: 3 },
            Room::MazeInterior,
            Room::MazeInterior,
            Room::MazeInterior,
            Room::ContextEnd,
        ];
        let inputs: Vec<Vec<f64>> = rooms.iter().map(|r| encode_room(*r, &dims).unwrap()).collect();
        assert_eq!(oracle_predict(&inputs, &dims, &mazes).unwrap(), vec![0, 2, 2, 0, 2, 0]);
    }

    #[test]
    fn bare_association() {
        let dims = EncodingDims::new(4, 0, 2);
        for door in 0..4 {
            let inputs = vec![
                encode_room(Room::ContextBegin { door }, &dims).unwrap(),
                encode_room(Room::ContextEnd, &dims).unwrap(),
            ];
            assert_eq!(oracle_predict(&inputs, &dims, &[]).unwrap(), vec![door, door]);
        }
    }

    #[test]
    fn malformed_inputs() {
        let dims = EncodingDims::new(2, 2, 1);
        let zero = vec![vec![0.0; dims.input_width()]];
        assert!(oracle_predict(&zero, &dims, &[vec![0, 1], vec![1, 0]]).is_err());
        let unknown = vec![encode_room(Room::MazeEntry { maze: 1 }, &dims).unwrap()];
        assert!(oracle_predict(&unknown, &dims, &[vec![0, 1]]).is_err());
        let orphan = vec![encode_room(Room::MazeInterior, &dims).unwrap()];
        assert!(oracle_predict(&orphan, &dims, &[vec![0, 1]]).is_err());
        let end = vec![encode_room(Room::ContextEnd, &dims).unwrap()];
        assert!(oracle_predict(&end, &dims, &[]).is_err());
    }
}
