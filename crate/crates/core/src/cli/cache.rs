//! Content-addressed report cache. Entries are `<key>.txt` holding a checksum line
//! followed by the report; writes go through a temp file and a rename.

use sha2::{Digest, Sha256};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

const MAGIC: &str = "loopcoh-cache 1";

pub enum Lookup {
    Hit(String),
    Miss,
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

impl Cache {
    pub fn new(dir: &Path) -> io::Result<Cache> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn key(parts: &[&str]) -> String {
        digest(parts)
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.txt"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let Ok(text) = fs::read_to_string(self.path(key)) else { return Lookup::Miss };
        let Some((head, body)) = text.split_once('\n') else {
            return Lookup::Corrupt("missing header".into());
        };
        let want = format!("{MAGIC} {}", digest(&[body]));
        if head != want {
            return Lookup::Corrupt("checksum mismatch".into());
        }
        Lookup::Hit(body.to_string())
    }

    pub fn store(&self, key: &str, body: &str) -> io::Result<()> {
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "{MAGIC} {}", digest(&[body]))?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let d = tempfile::tempdir().unwrap();
        let c = Cache::new(d.path()).unwrap();
        let k = Cache::key(&["a", "b"]);
        assert_ne!(k, Cache::key(&["ab", ""]));
        assert!(matches!(c.load(&k), Lookup::Miss));
        c.store(&k, "report\nline\n").unwrap();
        assert!(matches!(c.load(&k), Lookup::Hit(s) if s == "report\nline\n"));
        let p = d.path().join(format!("{k}.txt"));
        let t = fs::read_to_string(&p).unwrap().replace("line", "lime");
        fs::write(&p, t).unwrap();
        assert!(matches!(c.load(&k), Lookup::Corrupt(_)));
    }
}
