//! JSON game documents.
//!
//! ```json
//! { "name": "chsh", "nx": 2, "ny": 2, "na": 2, "nb": 2,
//!   "predicate": { "dsl": "(a + b) % 2 == x * y" },
//!   "distribution": "uniform" }
//! ```
//!
//! `predicate` is one of `{"winning": [[x,y,a,b], ...]}`, `{"dsl": str}`
//! or `{"table": [reals]}` (row-major over `(x, y, a, b)`).
//! `distribution` is `"uniform"` (also the default when omitted) or a
//! row-major list over `(x, y)`.

use serde::{Deserialize, Serialize};

use super::{uniform_distribution, Game};
use crate::dsl::parse_predicate_dsl;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    #[serde(default)]
    name: String,
    nx: usize,
    ny: usize,
    na: usize,
    nb: usize,
    predicate: PredicateDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distribution: Option<DistributionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum PredicateDoc {
    Winning(Vec<[usize; 4]>),
    Dsl(String),
    Table(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DistributionDoc {
    Named(String),
    Table(Vec<f64>),
}

/// Parses a JSON game document and validates it.
pub fn parse_game(text: &str) -> Result<Game> {
    let doc: GameDoc = serde_json::from_str(text)?;
    let (nx, ny, na, nb) = (doc.nx, doc.ny, doc.na, doc.nb);
    for (field, v) in [("nx", nx), ("ny", ny), ("na", na), ("nb", nb)] {
        if v == 0 {
            return Err(Error::invalid(field, "must be positive"));
        }
    }
    let cells = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(na))
        .and_then(|v| v.checked_mul(nb))
        .ok_or_else(|| Error::invalid("predicate", "table size overflows"))?;
    let predicate = match doc.predicate {
        PredicateDoc::Table(t) => t,
        PredicateDoc::Dsl(src) => parse_predicate_dsl(&src, nx, ny, na, nb)?,
        PredicateDoc::Winning(list) => {
            let mut t = vec![0.0; cells];
            for [x, y, a, b] in list {
                if x >= nx || y >= ny || a >= na || b >= nb {
                    return Err(Error::invalid(
                        "predicate.winning",
                        format!("quadruple [{x},{y},{a},{b}] is out of range"),
                    ));
                }
                t[((x * ny + y) * na + a) * nb + b] = 1.0;
            }
            t
        }
    };
    let distribution = match doc.distribution {
        None => uniform_distribution(nx * ny),
        Some(DistributionDoc::Named(s)) if s == "uniform" => uniform_distribution(nx * ny),
        Some(DistributionDoc::Named(s)) => {
            return Err(Error::invalid("distribution", format!("unknown distribution `{s}`")))
        }
        Some(DistributionDoc::Table(t)) => t,
    };
    Game::new(doc.name, (nx, ny, na, nb), predicate, distribution)
}

/// Serializes a game so that [`parse_game`] reproduces it bit for bit.
/// 0/1 games are written as winning lists, others as full tables.
pub fn serialize_game(g: &Game) -> String {
    let predicate = if g.is_boolean() {
        PredicateDoc::Winning(g.winning_quads().iter().map(|q| [q.x, q.y, q.a, q.b]).collect())
    } else {
        PredicateDoc::Table(g.predicate_table().to_vec())
    };
    let distribution = if g.distribution_table() == uniform_distribution(g.k()).as_slice() {
        DistributionDoc::Named("uniform".into())
    } else {
        DistributionDoc::Table(g.distribution_table().to_vec())
    };
    let doc = GameDoc {
        name: g.name().to_string(),
        nx: g.nx(),
        ny: g.ny(),
        na: g.na(),
        nb: g.nb(),
        predicate,
        distribution: Some(distribution),
    };
    serde_json::to_string_pretty(&doc).expect("game documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{chsh, magic_square};

    const CHSH_WINNING: &str = r#"{
        "name": "chsh", "nx": 2, "ny": 2, "na": 2, "nb": 2,
        "predicate": {"winning": [[0,0,0,0],[0,0,1,1],[0,1,0,0],[0,1,1,1],
                                  [1,0,0,0],[1,0,1,1],[1,1,0,1],[1,1,1,0]]},
        "distribution": "uniform"
    }"#;

    #[test]
    fn chsh_document() {
        assert_eq!(parse_game(CHSH_WINNING).unwrap(), chsh());
    }

    #[test]
    fn chsh_from_dsl_without_distribution() {
        let doc = r#"{"name":"chsh","nx":2,"ny":2,"na":2,"nb":2,
                      "predicate":{"dsl":"(a + b) % 2 == x * y"}}"#;
        assert_eq!(parse_game(doc).unwrap(), chsh());
    }

    #[test]
    fn unnormalized_distribution() {
        let doc = r#"{"nx":2,"ny":2,"na":1,"nb":1,"predicate":{"dsl":"1"},
                      "distribution":[0.3,0.2,0.2,0.2]}"#;
        let err = parse_game(doc).unwrap_err();
        assert!(matches!(err, Error::DistributionNotNormalized { .. }));
        assert!(err.to_string().contains("distribution not normalized"));
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_game("{\n  \"nx\": 2,\n  \"ny\": ]") {
            Err(Error::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invariant_errors_name_the_field() {
        let doc = r#"{"nx":1,"ny":1,"na":1,"nb":2,"predicate":{"table":[0.5,1.5]}}"#;
        match parse_game(doc) {
            Err(Error::InvalidGame { field, .. }) => assert_eq!(field, "predicate"),
            other => panic!("unexpected {other:?}"),
        }
        let doc = r#"{"nx":1,"ny":1,"na":1,"nb":1,"predicate":{"winning":[[0,0,0,1]]}}"#;
        assert!(matches!(parse_game(doc), Err(Error::InvalidGame { .. })));
    }

    #[test]
    fn serialize_round_trip() {
        for g in [chsh(), magic_square()] {
            assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
        }
        let weighted = Game::new(
            "w",
            (1, 2, 1, 2),
            vec![0.25, 1.0, 0.1, 0.0],
            vec![1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        assert_eq!(parse_game(&serialize_game(&weighted)).unwrap(), weighted);
    }
}
