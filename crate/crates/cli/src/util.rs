use std::io::Write;
use std::path::Path;

pub struct AppError {
    pub code: u8,
    pub message: String,
}

pub fn fail(code: u8, message: impl Into<String>) -> AppError {
    AppError { code, message: message.into() }
}

/// Reads a UTF-8 input file; a missing file is the canonical exit-2 case.
pub fn read_input(path: &Path) -> Result<String, AppError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(fail(2, format!("InputNotFound: {}", path.display())))
        }
        Err(e) => Err(fail(2, format!("InputUnreadable: {}: {e}", path.display()))),
    }
}

/// Writes to stdout when no path is given; otherwise writes atomically by
/// staging in a temporary file next to the target and renaming over it.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), AppError> {
    let Some(path) = path else {
        print!("{content}");
        return Ok(());
    };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| fail(2, format!("OutputInvalid: {}", path.display())))?;
    let tmp = match dir {
        Some(d) => d.join(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id())),
        None => Path::new(&format!(
            ".{}.tmp-{}",
            file_name.to_string_lossy(),
            std::process::id()
        ))
        .to_path_buf(),
    };
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        fail(2, format!("OutputFailed: {}: {e}", path.display()))
    })
}
