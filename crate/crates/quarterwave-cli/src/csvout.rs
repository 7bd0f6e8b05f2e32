//! CSV writing: 17-significant-digit scientific notation, atomic
//! temp-and-rename so partially written files never land under the final name.

use std::fs;
use std::io::Write;
use std::path::Path;

/// Format a float with 17 significant digits in scientific notation.
pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `content` to `path` atomically (same-directory temp + rename).
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_roundtrips_doubles() {
        for v in [1.0 / 3.0, -2.718281828459045e-15, 6.02214076e23] {
            assert_eq!(sci(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn write_atomic_creates_dirs_and_leaves_no_temp() {
        let dir = std::env::temp_dir().join("quarterwave-csvout-test");
        let _ = fs::remove_dir_all(&dir);
        let p = dir.join("sub").join("x.csv");
        write_atomic(&p, "a,b\n").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a,b\n");
        assert!(!p.with_extension("tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
