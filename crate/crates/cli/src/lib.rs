//! Seeded verification campaigns and JSON queries over `padic-transfer-core`.

pub mod campaigns;
pub mod encode;
pub mod queries;
pub mod report;

use padic_transfer_core::padic::Ctx;

pub use report::{CampaignConfig, Format, Report, Row, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] padic_transfer_core::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("input: {0}")]
    Input(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Context for `p`; `prec` defaults to the largest precision the arithmetic supports.
pub fn context(p: u32, prec: Option<u32>) -> CliResult<Ctx> {
    Ok(match prec {
        Some(k) => Ctx::with_prec(p, k)?,
        None => Ctx::new(p)?,
    })
}
