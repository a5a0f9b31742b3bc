use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("construction failure: {0}")]
    Construction(String),
    #[error("sign certificate failure at r = {r}: {reason}")]
    Certificate { r: f64, reason: String },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error(
        "quadrature did not converge on segment [{a}, {b}] (annulus {k}) after {depth} refinements: last estimates {prev:e}, {last:e}"
    )]
    Quadrature {
        k: u32,
        a: f64,
        b: f64,
        depth: u32,
        prev: f64,
        last: f64,
    },
    #[error("division guard: |{what}| = {value:e} below floor {floor:e}")]
    Guard {
        what: &'static str,
        value: f64,
        floor: f64,
    },
    #[error("document error: {0}")]
    Document(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
