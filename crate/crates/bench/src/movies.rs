//! MovieLens-style `movies.csv` parsing.

use std::io::Read;
use std::path::Path;

use thiserror::Error;

const NO_GENRES: &str = "(no genres listed)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovieRecord {
    pub movie_id: u64,
    pub title: String,
    /// Never empty.
    pub genres: Vec<String>,
}

#[derive(Debug, Error)]
pub enum MoviesError {
    #[error("cannot read {path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },
    #[error("header must be `movieId,title,genres`, found {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

pub fn parse_movies_csv(path: &Path) -> Result<Vec<MovieRecord>, MoviesError> {
    let file = std::fs::File::open(path).map_err(|source| MoviesError::Open {
        path: path.display().to_string(),
        source,
    })?;
    parse_movies(file)
}

/// Parses CSV text with a `movieId,title,genres` header. Quoted fields follow
/// the usual CSV rules, so titles may contain commas and quotes.
pub fn parse_movies<R: Read>(reader: R) -> Result<Vec<MovieRecord>, MoviesError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| row_error(&e, 1))?.clone();
    let names: Vec<String> = header
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();
    if names != ["movieId", "title", "genres"] {
        return Err(MoviesError::Header(names));
    }

    let mut out = Vec::new();
    for result in rdr.records() {
        let rec = result.map_err(|e| row_error(&e, 0))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| MoviesError::Row { line, message };
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", rec.len())));
        }
        let movie_id = rec[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("movieId {:?} is not an integer", &rec[0])))?;
        let genres = split_genres(&rec[2]);
        if genres.is_empty() {
            return Err(bad("empty genre list".into()));
        }
        out.push(MovieRecord {
            movie_id,
            title: rec[1].to_string(),
            genres,
        });
    }
    Ok(out)
}

/// `A|B|C` into tokens; the no-genre marker stays one token.
pub fn split_genres(field: &str) -> Vec<String> {
    let field = field.trim();
    if field == NO_GENRES {
        return vec![NO_GENRES.to_string()];
    }
    field
        .split('|')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(String::from)
        .collect()
}

fn row_error(e: &csv::Error, fallback_line: u64) -> MoviesError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    MoviesError::Row {
        line,
        message: e.to_string(),
    }
}
