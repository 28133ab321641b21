//! Errors shared by the artifact file readers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("file is empty; expected a header line")]
    MissingHeader,
    #[error("expected a {expected:?} header, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error("unsupported format version {found:?}")]
    UnsupportedVersion { found: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl FormatError {
    /// Whether the error concerns the file's header or version rather than
    /// its body.
    pub fn is_version_error(&self) -> bool {
        matches!(
            self,
            FormatError::MissingHeader | FormatError::BadHeader { .. } | FormatError::UnsupportedVersion { .. }
        )
    }
}

/// Checks a `<magic> <version>` header line.
pub(crate) fn check_header(header: Option<&str>, magic: &str, version: &str) -> Result<(), FormatError> {
    let header = header.ok_or(FormatError::MissingHeader)?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(magic) {
        return Err(FormatError::BadHeader {
            expected: magic.to_string(),
            found: header.to_string(),
        });
    }
    match parts.next() {
        Some(v) if v == version => Ok(()),
        other => Err(FormatError::UnsupportedVersion {
            found: other.unwrap_or("").to_string(),
        }),
    }
}
