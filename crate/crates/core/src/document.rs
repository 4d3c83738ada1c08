//! On-disk JSON documents for games and communication graphs.
//!
//! A game document carries either a dense `values` array, indexed by
//! coalition bitmask with bit `t` standing for player `t`, or a `generator`
//! clause naming a family. Rationals are written as `"p/q"` or integer
//! strings; integers are also accepted as JSON numbers on input.

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::game::{Game, MAX_PLAYERS};
use crate::generators::{Graph, ScenarioSpec};
use crate::rational::GameValue;

pub const FORMAT_VERSION: u32 = 1;

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<GameValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<ScenarioSpec>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("a game document needs exactly one of `values` or `generator`")]
    Shape,
    #[error("{0} table entries is not a power of two")]
    NotPowerOfTwo(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl GameDocument {
    pub fn from_game(g: &Game) -> Self {
        Self {
            version: FORMAT_VERSION,
            names: g.names().map(<[String]>::to_vec),
            values: Some(g.table()),
            generator: None,
        }
    }

    pub fn from_generator(spec: ScenarioSpec) -> Self {
        Self {
            version: FORMAT_VERSION,
            names: None,
            values: None,
            generator: Some(spec),
        }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.version != FORMAT_VERSION {
            return Err(DocumentError::Version(doc.version));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn into_game(self) -> Result<Game, DocumentError> {
        let game = match (self.values, self.generator) {
            (Some(values), None) => {
                let len = values.len();
                if !len.is_power_of_two() {
                    return Err(DocumentError::NotPowerOfTwo(len));
                }
                let n = len.trailing_zeros() as usize;
                if n > MAX_PLAYERS {
                    return Err(GameError::SizeLimitExceeded(n).into());
                }
                Game::new(n, values)?
            }
            (None, Some(spec)) => {
                let n = spec.player_count();
                if n > MAX_PLAYERS {
                    return Err(GameError::SizeLimitExceeded(n).into());
                }
                spec.build()?
            }
            _ => return Err(DocumentError::Shape),
        };
        match self.names {
            Some(names) => Ok(game.with_names(names)?),
            None => Ok(game),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    #[serde(default = "default_version")]
    pub version: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.version != FORMAT_VERSION {
            return Err(DocumentError::Version(doc.version));
        }
        Ok(doc)
    }

    pub fn into_graph(self) -> Result<Graph, DocumentError> {
        Ok(Graph::new(self.vertices, self.edges)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::triangle_example;
    use crate::rational::q;

    #[test]
    fn values_document() {
        let doc = GameDocument::parse(r#"{"version":1,"values":[0,0,0,"6",0,6,6,"12/1"]}"#).unwrap();
        let g = doc.into_game().unwrap();
        assert_eq!(g, triangle_example());
    }

    #[test]
    fn generator_document() {
        let doc = GameDocument::parse(r#"{"generator":{"family":"homogeneous","n":4}}"#).unwrap();
        assert_eq!(doc.into_game().unwrap().grand_value(), q(3, 1));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            GameDocument::parse(r#"{"version":1}"#).unwrap().into_game(),
            Err(DocumentError::Shape)
        ));
        assert!(matches!(
            GameDocument::parse(r#"{"values":[0,1,2]}"#).unwrap().into_game(),
            Err(DocumentError::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            GameDocument::parse(r#"{"values":[1,1]}"#).unwrap().into_game(),
            Err(DocumentError::Game(GameError::NonzeroEmptyCoalition(_)))
        ));
        assert!(matches!(
            GameDocument::parse(r#"{"version":2,"values":[0,0]}"#),
            Err(DocumentError::Version(2))
        ));
        assert!(matches!(
            GameDocument::parse(r#"{"values":[0,0],"extra":1}"#),
            Err(DocumentError::Syntax(_))
        ));
        assert!(matches!(
            GameDocument::parse(r#"{"generator":{"family":"three_block","n":7}}"#)
                .unwrap()
                .into_game(),
            Err(DocumentError::Game(GameError::SizeLimitExceeded(21)))
        ));
    }

    #[test]
    fn round_trip_keeps_names_and_fractions() {
        let g = Game::new(2, vec![q(0, 1), q(5, 3), q(-1, 2), q(7, 6)])
            .unwrap()
            .with_names(vec!["x".into(), "y".into()])
            .unwrap();
        let text = GameDocument::from_game(&g).to_json();
        assert!(text.contains("\"5/3\""));
        let back = GameDocument::parse(&text).unwrap().into_game().unwrap();
        assert_eq!(back, g);
        assert_eq!(back.names(), g.names());
    }

    #[test]
    fn graph_document() {
        let g = GraphDocument::parse(r#"{"vertices":3,"edges":[[0,1],[2,1]]}"#)
            .unwrap()
            .into_graph()
            .unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(GraphDocument::parse(r#"{"vertices":2,"edges":[[0,2]]}"#)
            .unwrap()
            .into_graph()
            .is_err());
    }
}
