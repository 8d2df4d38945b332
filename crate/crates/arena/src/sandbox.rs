//! Confinement for agent processes.
//!
//! Every agent gets its own scratch directory, a scrubbed environment and an
//! address-space limit. On Linux with Landlock the process can additionally
//! read only system directories plus its own scratch directory, cannot open
//! TCP connections, and cannot signal processes outside its own domain.
//! Without Landlock the remaining measures still apply; [`landlock_abi`]
//! reports what the kernel offers.

use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;

/// Directories agents may read (and execute from) when they exist.
pub const SYSTEM_READ_DIRS: [&str; 11] = [
    "/usr", "/lib", "/lib32", "/lib64", "/bin", "/sbin", "/etc", "/opt", "/proc", "/sys", "/dev",
];

/// Environment variables passed through to agents. Everything else
/// (credentials, proxies, tokens) is dropped.
pub const KEPT_ENV: [&str; 3] = ["PATH", "LANG", "TZ"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Confinement {
    /// Working directory, the only writable location.
    pub scratch: PathBuf,
    /// Extra read-only locations (for example an agent's source file).
    pub readable: Vec<PathBuf>,
    pub memory_bytes: u64,
    /// Apply Landlock rules when available.
    pub filesystem: bool,
}

/// Environment for a child: the kept variables plus a private HOME/TMPDIR.
pub fn scrubbed_env(scratch: &Path) -> Vec<(OsString, OsString)> {
    let mut env: Vec<(OsString, OsString)> = KEPT_ENV
        .iter()
        .filter_map(|k| std::env::var_os(k).map(|v| (OsString::from(k), v)))
        .collect();
    if !env.iter().any(|(k, _)| k == "PATH") {
        env.push(("PATH".into(), "/usr/local/bin:/usr/bin:/bin".into()));
    }
    for key in ["HOME", "TMPDIR"] {
        env.push((key.into(), scratch.as_os_str().to_owned()));
    }
    env.push(("PYTHONDONTWRITEBYTECODE".into(), "1".into()));
    env.push(("PYTHONUNBUFFERED".into(), "1".into()));
    env
}

/// Configures `cmd` with the scrubbed environment, the scratch directory as
/// working directory, and the pre-exec restrictions.
pub fn apply(cmd: &mut Command, c: &Confinement) -> io::Result<()> {
    cmd.env_clear();
    cmd.envs(scrubbed_env(&c.scratch));
    cmd.current_dir(&c.scratch);
    imp::apply(cmd, c)
}

/// The Landlock ABI version, or `None` when unsupported.
pub fn landlock_abi() -> Option<u32> {
    imp::landlock_abi()
}

#[cfg(target_os = "linux")]
mod imp {
    use std::fs::File;
    use std::io;
    use std::os::fd::{AsRawFd, FromRawFd, OwnedFd};
    use std::os::unix::process::CommandExt;
    use std::path::Path;
    use std::process::Command;

    use super::{Confinement, SYSTEM_READ_DIRS};

    const SYS_CREATE_RULESET: libc::c_long = 444;
    const SYS_ADD_RULE: libc::c_long = 445;
    const SYS_RESTRICT_SELF: libc::c_long = 446;
    const CREATE_RULESET_VERSION: u32 = 1;
    const RULE_PATH_BENEATH: libc::c_int = 1;

    const FS_EXECUTE: u64 = 1 << 0;
    const FS_WRITE_FILE: u64 = 1 << 1;
    const FS_READ_FILE: u64 = 1 << 2;
    const FS_READ_DIR: u64 = 1 << 3;
    const FS_TRUNCATE: u64 = 1 << 14;
    const FS_IOCTL_DEV: u64 = 1 << 15;
    const NET_BIND_TCP: u64 = 1 << 0;
    const NET_CONNECT_TCP: u64 = 1 << 1;
    const SCOPE_ABSTRACT_UNIX: u64 = 1 << 0;
    const SCOPE_SIGNAL: u64 = 1 << 1;

    #[repr(C)]
    struct RulesetAttr {
        handled_access_fs: u64,
        handled_access_net: u64,
        scoped: u64,
    }

    #[repr(C, packed)]
    struct PathBeneathAttr {
        allowed_access: u64,
        parent_fd: i32,
    }

    pub fn landlock_abi() -> Option<u32> {
        // SAFETY: the version query takes no pointers.
        let v = unsafe {
            libc::syscall(
                SYS_CREATE_RULESET,
                std::ptr::null::<RulesetAttr>(),
                0usize,
                CREATE_RULESET_VERSION,
            )
        };
        (v > 0).then_some(v as u32)
    }

    fn fs_rights(abi: u32) -> u64 {
        // ABI 1 covers bits 0..=12, 2 adds REFER, 3 TRUNCATE, 5 IOCTL_DEV.
        let mut all = (1u64 << 13) - 1;
        if abi >= 2 {
            all |= 1 << 13;
        }
        if abi >= 3 {
            all |= FS_TRUNCATE;
        }
        if abi >= 5 {
            all |= FS_IOCTL_DEV;
        }
        all
    }

    fn add_path(ruleset: &OwnedFd, path: &Path, access: u64) -> io::Result<()> {
        let Ok(file) = File::open(path) else {
            return Ok(());
        };
        let file_only = FS_EXECUTE | FS_WRITE_FILE | FS_READ_FILE | FS_TRUNCATE | FS_IOCTL_DEV;
        let access = if file.metadata()?.is_dir() {
            access
        } else {
            access & file_only
        };
        let attr = PathBeneathAttr {
            allowed_access: access,
            parent_fd: file.as_raw_fd(),
        };
        // SAFETY: `attr` outlives the call and matches the kernel layout.
        let r = unsafe {
            libc::syscall(
                SYS_ADD_RULE,
                ruleset.as_raw_fd(),
                RULE_PATH_BENEATH,
                &attr as *const PathBeneathAttr,
                0u32,
            )
        };
        if r != 0 {
            return Err(io::Error::last_os_error());
        }
        Ok(())
    }

    fn build_ruleset(c: &Confinement, abi: u32) -> io::Result<OwnedFd> {
        let all = fs_rights(abi);
        let attr = RulesetAttr {
            handled_access_fs: all,
            handled_access_net: if abi >= 4 {
                NET_BIND_TCP | NET_CONNECT_TCP
            } else {
                0
            },
            scoped: if abi >= 6 {
                SCOPE_ABSTRACT_UNIX | SCOPE_SIGNAL
            } else {
                0
            },
        };
        let size = match abi {
            1..=3 => 8,
            4 | 5 => 16,
            _ => std::mem::size_of::<RulesetAttr>(),
        };
        // SAFETY: `attr` is valid for `size` bytes.
        let fd =
            unsafe { libc::syscall(SYS_CREATE_RULESET, &attr as *const RulesetAttr, size, 0u32) };
        if fd < 0 {
            return Err(io::Error::last_os_error());
        }
        // SAFETY: the kernel returned a fresh descriptor we now own.
        let ruleset = unsafe { OwnedFd::from_raw_fd(fd as i32) };
        let read = FS_EXECUTE | FS_READ_FILE | FS_READ_DIR;
        for dir in SYSTEM_READ_DIRS {
            add_path(&ruleset, Path::new(dir), read)?;
        }
        add_path(
            &ruleset,
            Path::new("/dev/null"),
            FS_READ_FILE | FS_WRITE_FILE,
        )?;
        for p in &c.readable {
            add_path(&ruleset, p, read)?;
        }
        add_path(&ruleset, &c.scratch, all)?;
        Ok(ruleset)
    }

    pub fn apply(cmd: &mut Command, c: &Confinement) -> io::Result<()> {
        let ruleset = match (c.filesystem, landlock_abi()) {
            (true, Some(abi)) => Some(build_ruleset(c, abi)?),
            _ => None,
        };
        let memory = c.memory_bytes;
        // SAFETY: the closure only makes async-signal-safe system calls.
        unsafe {
            cmd.pre_exec(move || {
                if memory > 0 {
                    let lim = libc::rlimit {
                        rlim_cur: memory as libc::rlim_t,
                        rlim_max: memory as libc::rlim_t,
                    };
                    if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                        return Err(io::Error::last_os_error());
                    }
                }
                let no_core = libc::rlimit {
                    rlim_cur: 0,
                    rlim_max: 0,
                };
                libc::setrlimit(libc::RLIMIT_CORE, &no_core);
                if libc::prctl(libc::PR_SET_NO_NEW_PRIVS, 1, 0, 0, 0) != 0 {
                    return Err(io::Error::last_os_error());
                }
                if let Some(rs) = &ruleset {
                    if libc::syscall(SYS_RESTRICT_SELF, rs.as_raw_fd(), 0u32) != 0 {
                        return Err(io::Error::last_os_error());
                    }
                }
                Ok(())
            });
        }
        Ok(())
    }
}

#[cfg(not(target_os = "linux"))]
mod imp {
    use std::io;
    use std::process::Command;

    use super::Confinement;

    pub fn landlock_abi() -> Option<u32> {
        None
    }

    pub fn apply(_cmd: &mut Command, _c: &Confinement) -> io::Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_is_scrubbed() {
        let env = scrubbed_env(Path::new("/tmp/x"));
        let keys: Vec<_> = env
            .iter()
            .map(|(k, _)| k.to_string_lossy().into_owned())
            .collect();
        assert!(keys.contains(&"HOME".to_string()));
        assert!(!keys
            .iter()
            .any(|k| k.contains("KEY") || k.contains("TOKEN") || k.contains("PROXY")));
    }
}
